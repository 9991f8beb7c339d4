//! Exact integer polynomials with a power-of-two argument scaling.
//!
//! An [`IntPoly`] with coefficients `c_k` and `scale_log2 = F` stands for a
//! positive multiple of `sum_k c_k (2^F x)^k`. Overall positive factors never
//! matter for roots, so every operation below drops them freely.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub coeffs: Vec<BigUint>,
    pub scale_log2: i64,
}

/// Splits a finite nonnegative float into `(mantissa, exponent)` with `x = m * 2^e`.
pub(crate) fn decompose(x: f64) -> (u64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let tz = m.trailing_zeros() as i64;
    m >>= tz;
    e += tz;
    (m, e)
}

fn factorial(k: usize) -> BigUint {
    (2..=k as u64).fold(BigUint::one(), |acc, v| acc * v)
}

/// `m (m-1) ... (m-b+1)`, zero when `m < b`.
fn falling(m: usize, b: usize) -> BigUint {
    if m < b {
        return BigUint::zero();
    }
    ((m - b + 1) as u64..=m as u64).fold(BigUint::one(), |acc, v| acc * v)
}

impl IntPoly {
    fn trimmed(mut coeffs: Vec<BigUint>, scale_log2: i64) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigUint::zero());
        }
        IntPoly { coeffs, scale_log2 }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when both stand for the same polynomial up to a positive factor.
    pub fn proportional(&self, other: &Self) -> bool {
        if self.degree() != other.degree() {
            return false;
        }
        let m = self.scale_log2.min(other.scale_log2);
        let lift = |p: &IntPoly| -> Vec<BigUint> {
            let d = (p.scale_log2 - m) as usize;
            p.coeffs.iter().enumerate().map(|(k, c)| c << (d * k)).collect()
        };
        let (a, b) = (lift(self), lift(other));
        let (la, lb) = (a.last().unwrap(), b.last().unwrap());
        a.iter().zip(&b).all(|(x, y)| x * lb == y * la)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `prod (x + |r|)` for nonpositive float roots; each float is an exact dyadic.
    pub fn from_roots(roots: &[f64]) -> Result<Self> {
        let parts: Vec<(u64, i64)> = roots
            .iter()
            .map(|&r| {
                if !(r <= 0.0) || !r.is_finite() {
                    Err(Error::Domain(format!("root {r} is not a finite nonpositive number")))
                } else {
                    Ok(decompose(-r))
                }
            })
            .collect::<Result<_>>()?;
        let scale = parts
            .iter()
            .filter(|p| p.0 != 0)
            .map(|p| -p.1)
            .max()
            .unwrap_or(0)
            .max(0);
        let mut c = vec![BigUint::one()];
        for &(m, e) in &parts {
            let v = BigUint::from(m) << ((e + scale) as usize);
            let mut next = vec![BigUint::zero(); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k] += ck * &v;
                next[k + 1] += ck;
            }
            c = next;
        }
        Ok(IntPoly::trimmed(c, scale))
    }

    /// Exact dyadic image of `exp(logc[k])`, each rounded to 53 bits.
    pub fn from_logc(logc: &[f64]) -> Self {
        let parts: Vec<Option<(u64, i64)>> = logc
            .iter()
            .map(|&l| {
                if l == f64::NEG_INFINITY {
                    None
                } else {
                    let l2 = l / std::f64::consts::LN_2;
                    let e = l2.floor();
                    let m = (2f64.powf(l2 - e) * (1u64 << 52) as f64).round() as u64;
                    Some((m, e as i64 - 52))
                }
            })
            .collect();
        let emin = parts.iter().flatten().map(|p| p.1).min().unwrap_or(0);
        let coeffs = parts
            .iter()
            .map(|p| match p {
                None => BigUint::zero(),
                Some((m, e)) => BigUint::from(*m) << ((e - emin) as usize),
            })
            .collect();
        IntPoly::trimmed(coeffs, 0)
    }

    /// The b-th derivative.
    pub fn derivative(&self, b: usize) -> Result<Self> {
        let d = self.degree();
        if b > d || self.is_zero() {
            return Err(Error::Degree(format!("derivative of order {b} of a degree-{d} polynomial vanishes")));
        }
        let coeffs = (0..=d - b)
            .into_par_iter()
            .map(|j| &self.coeffs[j + b] * falling(j + b, b))
            .collect();
        Ok(IntPoly::trimmed(coeffs, self.scale_log2))
    }

    /// Multiplies by `x^s` (`s > 0`) or divides by `x^{-s}` (`s < 0`, requires divisibility).
    pub fn shift(&self, s: i64) -> Result<Self> {
        if s >= 0 {
            let mut c = vec![BigUint::zero(); s as usize];
            c.extend(self.coeffs.iter().cloned());
            Ok(IntPoly::trimmed(c, self.scale_log2))
        } else {
            let k = (-s) as usize;
            if k > self.degree() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
                return Err(Error::Precondition(format!("polynomial is not divisible by x^{k}")));
            }
            Ok(IntPoly::trimmed(self.coeffs[k..].to_vec(), self.scale_log2))
        }
    }

    pub fn hadamard(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let c = (0..len).map(|k| &self.coeffs[k] * &other.coeffs[k]).collect();
        IntPoly::trimmed(c, self.scale_log2 + other.scale_log2)
    }

    /// Multiplicative convolution with normalization degree `n` (nonnegative-coefficient form).
    pub fn boxtimes(&self, other: &Self, n: usize) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len()).min(n + 1);
        let c = (0..len)
            .into_par_iter()
            .map(|k| &self.coeffs[k] * &other.coeffs[k] * factorial(k) * factorial(n - k))
            .collect();
        IntPoly::trimmed(c, self.scale_log2 + other.scale_log2)
    }

    fn rescaled(&self, scale: i64, n: usize) -> Vec<BigUint> {
        let diff = (scale - self.scale_log2) as usize;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c << (diff * (n - k)))
            .collect()
    }

    /// Additive convolution with normalization degree `n`.
    pub fn boxplus(&self, other: &Self, n: usize) -> Self {
        let scale = self.scale_log2.max(other.scale_log2);
        let fact: Vec<BigUint> = {
            let mut v = vec![BigUint::one()];
            for k in 1..=n {
                let next = &v[k - 1] * k as u64;
                v.push(next);
            }
            v
        };
        let weigh = |c: Vec<BigUint>| -> Vec<BigUint> {
            c.into_iter().enumerate().map(|(j, c)| c * &fact[j]).collect()
        };
        let a = weigh(self.rescaled(scale, n));
        let b = weigh(other.rescaled(scale, n));
        let c = (0..=n)
            .into_par_iter()
            .map(|k| {
                let mut s = BigUint::zero();
                for j1 in k..=n {
                    let j2 = n + k - j1;
                    if j1 < a.len() && j2 < b.len() && !a[j1].is_zero() && !b[j2].is_zero() {
                        s += &a[j1] * &b[j2];
                    }
                }
                if s.is_zero() {
                    s
                } else {
                    s * falling(n, n - k)
                }
            })
            .collect();
        IntPoly::trimmed(c, scale)
    }

    /// Integer coefficients of the repeated-action polynomial, up to a positive constant.
    pub fn t_poly(n: usize, ell: usize, a: usize, b: usize) -> Self {
        let delta = a as i64 - b as i64;
        let c = (0..=n)
            .into_par_iter()
            .map(|j| {
                let mut v = binom(n, j);
                for i in 0..ell as i64 {
                    let m = j as i64 + i * delta;
                    if m < b as i64 {
                        return BigUint::zero();
                    }
                    v *= falling(m as usize, b);
                }
                v
            })
            .collect();
        IntPoly::trimmed(c, 0)
    }
}

fn binom(n: usize, k: usize) -> BigUint {
    falling(n, k) / factorial(k)
}

/// Natural log of a big unsigned integer; `-inf` for zero.
pub(crate) fn ln_big(c: &BigUint) -> f64 {
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits <= 64 {
        return c.to_f64().unwrap().ln();
    }
    let top = (c >> (bits - 64)).to_f64().unwrap();
    top.ln() + (bits - 64) as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(p: &IntPoly) -> Vec<u64> {
        p.coeffs.iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn decompose_is_exact() {
        for x in [1.0, 0.75, 3.0e-300, 1.0 / 3.0, 1e300] {
            let (m, e) = decompose(x);
            assert_eq!(libm::ldexp(m as f64, e as i32), x);
        }
    }

    #[test]
    fn product_of_integer_roots() {
        let p = IntPoly::from_roots(&[-1.0, -2.0, -3.0]).unwrap();
        assert_eq!(ints(&p), vec![6, 11, 6, 1]);
        assert_eq!(p.scale_log2, 0);
        let h = IntPoly::from_roots(&[-0.5]).unwrap();
        assert_eq!((ints(&h), h.scale_log2), (vec![1, 1], 1));
    }

    #[test]
    fn boxplus_of_squares() {
        let p = IntPoly::from_roots(&[-1.0, -1.0]).unwrap();
        let s = p.boxplus(&p, 2);
        // proportional to (x + 2)^2
        let v = ints(&s);
        assert_eq!(v[0], v[2] * 4);
        assert_eq!(v[1], v[2] * 4);
    }

    #[test]
    fn t_poly_equal_exponents() {
        // a = b = 1: C(n, j) j^ell
        let t = IntPoly::t_poly(4, 2, 1, 1);
        assert_eq!(ints(&t), vec![0, 4, 24, 36, 16]);
    }
}
