//! Adaptive-precision Horner evaluation with rigorous error bounds.
//!
//! Values are big-integer mantissas with a binary exponent. Every rounding
//! step is tracked in a running bound, so the sign of the result is certified
//! whenever the bound is below the magnitude.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::intpoly::decompose;

/// `m * 2^e`
#[derive(Debug, Clone)]
struct Big {
    m: BigInt,
    e: i64,
}

impl Big {
    fn zero() -> Self {
        Big { m: BigInt::zero(), e: 0 }
    }

    fn top(&self) -> i64 {
        if self.m.is_zero() {
            i64::MIN / 4
        } else {
            self.m.bits() as i64 + self.e
        }
    }
}

/// Scaled value `mant * 2^exp` with `mant` in `[1, 2)`, or zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub sign: i8,
    pub mant: f64,
    pub exp: i64,
}

impl Scaled {
    fn of(b: &Big) -> Self {
        if b.m.is_zero() {
            return Scaled { sign: 0, mant: 0.0, exp: 0 };
        }
        let bits = b.m.bits();
        let mag = b.m.magnitude();
        let (top, shift) = if bits > 64 { ((mag >> (bits - 64) as usize).to_f64().unwrap(), bits as i64 - 64) } else { (mag.to_f64().unwrap(), 0) };
        let lt = top.log2().floor();
        let mant = top / 2f64.powf(lt);
        Scaled {
            sign: if b.m.sign() == Sign::Minus { -1 } else { 1 },
            mant,
            exp: lt as i64 + shift + b.e,
        }
    }

    pub fn log2_abs(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.mant.log2() + self.exp as f64
        }
    }

    /// `self / other` as a float (may overflow to infinity).
    pub fn ratio(&self, other: &Scaled) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let v = self.mant / other.mant;
        let de = (self.exp - other.exp).clamp(-5000, 5000) as i32;
        (self.sign * other.sign) as f64 * v * 2f64.powi(de)
    }
}

/// Result of a certified evaluation of `S`, `S'` and `S''/2`.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: [Scaled; 3],
    /// log2 of the absolute error bound of each component (`-inf` when exact).
    pub err_log2: [f64; 3],
}

impl Evaluation {
    /// `S'/S`
    pub fn g(&self) -> f64 {
        self.value[1].ratio(&self.value[0])
    }

    /// `S''/S`
    pub fn s2_over_s(&self) -> f64 {
        2.0 * self.value[2].ratio(&self.value[0])
    }
}

fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Coefficients truncated to a working precision, with an exactness flag each.
type Truncated = Arc<Vec<(Big, bool)>>;

/// A polynomial prepared for repeated high-precision evaluation.
pub struct HpPoly {
    coeffs: Vec<BigUint>,
    log2c: Vec<f64>,
    truncated: Mutex<HashMap<u64, Truncated>>,
}

const MAX_BITS: u64 = 1 << 22;
const EXACT: u64 = u64::MAX / 4;

/// Smallest power of two at least `v` (and at least 64).
fn quantize(v: f64) -> u64 {
    if !(v < MAX_BITS as f64) {
        return MAX_BITS;
    }
    (v.max(64.0) as u64).next_power_of_two()
}

/// `a <- a * x + q`, keeping about `w` bits and accumulating the error bound.
#[allow(clippy::too_many_arguments)]
fn horner_step(a: &mut Big, err: &mut f64, q: &Big, q_err: f64, xm: &BigInt, xe: i64, lx: f64, w: i64) {
    let mut e = *err + lx;
    if !a.m.is_zero() {
        a.m *= xm;
        a.e += xe;
    }
    let t = a.top().max(q.top());
    let finest = match (a.m.is_zero(), q.m.is_zero()) {
        (true, true) => 0,
        (true, false) => q.e,
        (false, true) => a.e,
        (false, false) => a.e.min(q.e),
    };
    let r = (t - w).max(finest);
    if a.m.is_zero() {
        a.e = r;
    } else if r > a.e {
        let s = (r - a.e) as u64;
        if a.m.trailing_zeros().is_some_and(|tz| tz < s) {
            e = log2_add(e, r as f64);
        }
        a.m >>= s as usize;
        a.e = r;
    } else if r < a.e {
        a.m <<= (a.e - r) as usize;
        a.e = r;
    }
    if !q.m.is_zero() {
        if q.e == r {
            a.m += &q.m;
        } else if q.e > r {
            a.m += &q.m << (q.e - r) as usize;
        } else {
            let s = (r - q.e) as u64;
            if q.m.trailing_zeros().is_some_and(|tz| tz < s) {
                e = log2_add(e, r as f64);
            }
            a.m += &q.m >> s as usize;
        }
    }
    e = log2_add(e, q_err);
    *err = if e == f64::NEG_INFINITY { e } else { e + 1e-9 };
}

impl HpPoly {
    pub fn new(coeffs: Vec<BigUint>) -> Self {
        let log2c = coeffs.iter().map(|c| super::intpoly::ln_big(c) / std::f64::consts::LN_2).collect();
        HpPoly { coeffs, log2c, truncated: Mutex::new(HashMap::new()) }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// log2 of the leading coefficient.
    pub fn log2_lead(&self) -> f64 {
        self.log2c[self.log2c.len() - 1]
    }

    /// `log2 sum_k c_k |x|^k`, the scale against which rounding errors are measured.
    pub fn log2_abs_sum(&self, x: f64) -> f64 {
        let lx = x.abs().log2();
        self.log2c
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_finite())
            .map(|(k, c)| if k == 0 { *c } else { c + k as f64 * lx })
            .fold(f64::NEG_INFINITY, log2_add)
    }

    fn coeffs_at(&self, w: u64) -> Arc<Vec<(Big, bool)>> {
        let mut cache = self.truncated.lock().unwrap();
        cache
            .entry(w)
            .or_insert_with(|| {
                Arc::new(
                    self.coeffs
                        .iter()
                        .map(|c| {
                            let bits = c.bits();
                            let keep = w.saturating_add(64);
                            if bits > keep {
                                let s = bits - keep;
                                (Big { m: BigInt::from(c >> s as usize), e: s as i64 }, false)
                            } else {
                                (Big { m: BigInt::from(c.clone()), e: 0 }, true)
                            }
                        })
                        .collect(),
                )
            })
            .clone()
    }

    /// One Horner pass keeping about `w` significant bits per step.
    ///
    /// With `derivs = false` only `S` is computed and the other components are zero.
    pub fn eval_at(&self, x: f64, w: u64, derivs: bool) -> Evaluation {
        let (xm, xe) = decompose(x.abs());
        let xm = if x < 0.0 { -BigInt::from(xm) } else { BigInt::from(xm) };
        let lx = if x == 0.0 { f64::NEG_INFINITY } else { x.abs().log2() };
        let cs = self.coeffs_at(w);
        let [mut a0, mut a1, mut a2] = [Big::zero(), Big::zero(), Big::zero()];
        let mut err = [f64::NEG_INFINITY; 3];
        let wi = w.min(i64::MAX as u64 / 4) as i64;
        for (c, exact) in cs.iter().rev() {
            // S''/2 <- S''/2 * x + S', S' <- S' * x + S, S <- S * x + c_k
            if derivs {
                let (e0, e1) = (err[0], err[1]);
                horner_step(&mut a2, &mut err[2], &a1, e1, &xm, xe, lx, wi);
                horner_step(&mut a1, &mut err[1], &a0, e0, &xm, xe, lx, wi);
            }
            let ce = if *exact { f64::NEG_INFINITY } else { c.e as f64 };
            horner_step(&mut a0, &mut err[0], c, ce, &xm, xe, lx, wi);
        }
        Evaluation { value: [Scaled::of(&a0), Scaled::of(&a1), Scaled::of(&a2)], err_log2: err }
    }

    /// Evaluates with increasing precision until `S` carries `need` certified bits
    /// and, when `need_deriv > 0`, `S'` and `S''` carry `need_deriv` bits relative to
    /// their natural scales. `w_hint` is updated with the precision the next call
    /// at a nearby point will probably need.
    pub fn eval_certified(&self, x: f64, w_hint: &mut u64, need: f64, need_deriv: f64) -> Option<Evaluation> {
        self.eval_adaptive(x, w_hint, need, need_deriv, true)
    }

    /// As [`HpPoly::eval_certified`]; with `allow_exact = false` gives up (returns `None`)
    /// instead of falling back to exact arithmetic, which signals a near-exact zero.
    pub fn eval_adaptive(&self, x: f64, w_hint: &mut u64, need: f64, need_deriv: f64, allow_exact: bool) -> Option<Evaluation> {
        let derivs = need_deriv > 0.0;
        let mut w = (*w_hint).max(64);
        loop {
            let ev = self.eval_at(x, w, derivs);
            let exact_zero = ev.value[0].sign == 0 && ev.err_log2[0] == f64::NEG_INFINITY;
            let scale = |i: usize| match i {
                0 => ev.value[0].log2_abs(),
                1 => ev.value[1].log2_abs(),
                _ => log2_add(ev.value[2].log2_abs(), 2.0 * ev.value[1].log2_abs() - ev.value[0].log2_abs()),
            };
            let short = |i: usize, want: f64| {
                if ev.err_log2[i] == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    want - (scale(i) - ev.err_log2[i])
                }
            };
            let mut deficit = short(0, need);
            if derivs {
                deficit = deficit.max(short(1, need_deriv)).max(short(2, need_deriv));
            }
            if exact_zero || deficit <= 0.0 || deficit.is_nan() && w == EXACT {
                if w != EXACT {
                    *w_hint = quantize(w as f64 + deficit + 16.0);
                }
                return Some(ev);
            }
            if w == EXACT {
                return None;
            }
            let target = if deficit.is_finite() { w as f64 + deficit + 16.0 } else { 2.0 * w as f64 };
            // an exact zero never certifies in floating mode; switch to exact arithmetic early
            w = if w >= 4 * (*w_hint).max(256) || w >= MAX_BITS {
                if !allow_exact {
                    return None;
                }
                EXACT
            } else {
                quantize(target.max(2.0 * w as f64))
            };
        }
    }

    /// Certified sign of `S(x)`, starting from the precision suggested by `log2_expected`,
    /// an estimate of `log2 |S(x)|`.
    pub fn sign_at(&self, x: f64, log2_expected: f64) -> Option<i8> {
        let mut w = quantize(self.log2_abs_sum(x) - log2_expected + 32.0);
        self.eval_certified(x, &mut w, 2.0, 0.0).map(|e| e.value[0].sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[u64]) -> HpPoly {
        HpPoly::new(c.iter().map(|&v| BigUint::from(v)).collect())
    }

    #[test]
    fn exact_small_evaluation() {
        // (x+1)(x+2)(x+3) at x = -2.5: (-1.5)(-0.5)(0.5) = 0.375
        let p = poly(&[6, 11, 6, 1]);
        let mut w = 64;
        let ev = p.eval_certified(-2.5, &mut w, 40.0, 0.0).unwrap();
        assert_eq!(ev.value[0].sign, 1);
        assert!((ev.value[0].mant * 2f64.powi(ev.value[0].exp as i32) - 0.375).abs() < 1e-15);
        let ev = p.eval_at(-2.0, 64, true);
        assert_eq!(ev.value[0].sign, 0);
        assert_eq!(ev.err_log2[0], f64::NEG_INFINITY);
        // S'(-1) = 2, S''(-1)/2 = 3
        let ev = p.eval_at(-1.0, 64, true);
        assert!((ev.value[1].ratio(&Scaled { sign: 1, mant: 1.0, exp: 0 }) - 2.0).abs() < 1e-15);
        assert!((ev.value[2].ratio(&Scaled { sign: 1, mant: 1.0, exp: 0 }) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn ill_conditioned_sign_is_certified() {
        // (x+1)^60 at x = -1 + 2^-20: value 2^-1200, far below f64 cancellation level
        let mut c = vec![BigUint::from(1u32)];
        for _ in 0..60 {
            let mut next = vec![BigUint::zero(); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k] += ck;
                next[k + 1] += ck;
            }
            c = next;
        }
        let p = HpPoly::new(c);
        let mut w = 64;
        let x = -1.0 + 2f64.powi(-20);
        let ev = p.eval_certified(x, &mut w, 30.0, 0.0).unwrap();
        assert_eq!(ev.value[0].sign, 1);
        assert!((ev.value[0].log2_abs() + 1200.0).abs() < 1e-9);
        let ev = p.eval_certified(-1.0 - 2f64.powi(-20), &mut w, 30.0, 0.0).unwrap();
        assert_eq!(ev.value[0].sign, 1);
    }
}
