//! Certified real roots of integer polynomials whose roots are all real and nonpositive.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use super::hpeval::{Evaluation, HpPoly};
use super::intpoly::{ln_big, IntPoly};
use super::modgcd::squarefree;
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

fn isolation_error(stage: &'static str, lo: f64, hi: f64, detail: impl Into<String>) -> Error {
    Error::RootIsolation { stage, lo, hi, detail: detail.into() }
}

/// Upper bound on the magnitude of every root (Fujiwara), in log2.
fn root_bound_log2(c: &[BigUint]) -> f64 {
    let d = c.len() - 1;
    let l2 = |v: &BigUint| ln_big(v) / std::f64::consts::LN_2;
    let lead = l2(&c[d]);
    (1..=d)
        .filter(|&k| !c[d - k].is_zero())
        .map(|k| {
            let v = (l2(&c[d - k]) - lead) / k as f64;
            if k == d {
                v - 1.0 / d as f64
            } else {
                v
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0
}

/// Simple roots of a square-free polynomial with positive coefficients, ascending.
fn simple_roots(s: &HpPoly, coeffs: &[BigUint]) -> Result<Vec<f64>> {
    let d = s.degree();
    if d == 0 {
        return Ok(vec![]);
    }
    let bound = root_bound_log2(coeffs);
    if bound > 1000.0 {
        return Err(isolation_error("bound", f64::NAN, f64::NAN, "root bound overflows double precision"));
    }
    let mut w = 128u64;
    let mut found: Vec<f64> = Vec::with_capacity(d);
    let mut x = -(2f64.powf(bound)) * 1.0625;
    let eval = |x: f64, w: &mut u64, need: f64, nd: f64| -> Result<Evaluation> {
        s.eval_certified(x, w, need, nd)
            .ok_or_else(|| isolation_error("evaluate", x, x, "precision limit reached"))
    };
    while found.len() < d {
        let k = found.len();
        let m = (d - k) as f64;
        let mut iter = 0;
        let root = loop {
            iter += 1;
            if iter > 200 {
                return Err(isolation_error("laguerre", x, 0.0, "no convergence"));
            }
            let Some(ev) = s.eval_adaptive(x, &mut w, 62.0, 58.0, false) else {
                // |S(x)| is below any reasonable rounding level: x is a root to full accuracy
                break x;
            };
            if ev.value[0].sign == 0 {
                break x;
            }
            let raw = ev.g();
            let mut g = raw;
            let mut h = raw * raw - ev.s2_over_s();
            for &r in &found {
                let t = 1.0 / (x - r);
                g -= t;
                h -= t * t;
            }
            // close to a deflated root the second-order terms cancel badly: plain Newton then
            let step = if raw.abs() > 100.0 * g.abs() {
                1.0 / g
            } else {
                let disc = ((m - 1.0) * (m * h - g * g)).max(0.0).sqrt();
                let den = if g < 0.0 { g - disc } else { g + disc };
                m / den
            };
            if !step.is_finite() {
                return Err(isolation_error("laguerre", x, x, "non-finite step"));
            }
            let next = x - step;
            if step.abs() <= 4.0 * EPS * x.abs() || next == x {
                break next.min(x.max(next));
            }
            if next >= 0.0 {
                x *= 0.5;
                continue;
            }
            x = next;
        };
        found.push(root);
        if found.len() == d {
            break;
        }
        // restart just to the right of the new root, checking that no root was skipped
        let expected = if (d - found.len()).is_multiple_of(2) { 1 } else { -1 };
        let mut eta = 1e-6;
        loop {
            let cand = root + eta * root.abs();
            let ev = eval(cand, &mut w, 2.0, 0.0)?;
            if ev.value[0].sign == expected {
                x = cand;
                break;
            }
            eta *= 1e-2;
            if eta < 16.0 * EPS {
                return Err(isolation_error("restart", root, cand, "roots closer than double resolution"));
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(found)
}

/// Point strictly between two consecutive negative roots.
fn separator(lo: f64, hi: f64) -> f64 {
    if hi < 0.5 * lo && hi < 0.0 {
        -(lo * hi).sqrt()
    } else {
        0.5 * (lo + hi)
    }
}

/// Verifies by sign alternation that each root has an isolating bracket of width at most `tol(r)`.
fn certify(s: &HpPoly, roots: &[f64], tol: &(dyn Fn(f64) -> f64 + Sync)) -> Result<()> {
    let d = roots.len();
    if d == 0 {
        return Ok(());
    }
    let seps: Vec<f64> = roots.windows(2).map(|w| separator(w[0], w[1])).collect();
    let mut points = Vec::with_capacity(2 * d);
    for (i, &r) in roots.iter().enumerate() {
        let lo_lim = if i == 0 { f64::NEG_INFINITY } else { seps[i - 1] };
        let hi_lim = if i + 1 == d { 0.0 } else { seps[i] };
        let t = tol(r);
        let lo = (r - t).max(lo_lim);
        let hi = (r + t).min(hi_lim);
        if !(lo < r && r < hi) && !(lo <= r && r <= hi && lo < hi) {
            return Err(isolation_error("certify", lo, hi, "degenerate bracket"));
        }
        points.push((i, lo, hi));
    }
    let lead = s.log2_lead();
    let expected = |x: f64| lead + roots.iter().map(|r| (x - r).abs().log2()).sum::<f64>();
    points.par_iter().try_for_each(|&(i, lo, hi)| {
        let right_count = d - i;
        let want_lo: i8 = if right_count.is_multiple_of(2) { 1 } else { -1 };
        for (x, want) in [(lo, want_lo), (hi, -want_lo)] {
            let sign = if x == 0.0 {
                1
            } else {
                s.sign_at(x, expected(x))
                    .ok_or_else(|| isolation_error("certify", lo, hi, "sign not certified"))?
            };
            if sign != want {
                return Err(isolation_error("certify", lo, hi, format!("expected sign {want}, found {sign}")));
            }
        }
        Ok(())
    })
}

/// Multiplicities of the distinct roots from residues of `Q'/Q`.
fn multiplicities(q: &HpPoly, distinct: &[f64], total: usize) -> Result<Vec<usize>> {
    let n = distinct.len();
    let mults: Vec<usize> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = distinct[i];
            let mut gap = r.abs();
            if i > 0 {
                gap = gap.min(r - distinct[i - 1]);
            }
            if i + 1 < n {
                gap = gap.min(distinct[i + 1] - r);
            }
            let delta = 1e-6 * gap;
            let x = r + delta;
            let mut w = 256u64;
            let ev = q
                .eval_certified(x, &mut w, 30.0, 30.0)
                .ok_or_else(|| isolation_error("multiplicity", r, x, "precision limit reached"))?;
            let res = delta * ev.g();
            let m = res.round();
            if m < 1.0 || (res - m).abs() > 0.25 {
                return Err(isolation_error("multiplicity", r, x, format!("residue {res} is not near an integer")));
            }
            Ok(m as usize)
        })
        .collect::<Result<_>>()?;
    if mults.iter().sum::<usize>() != total {
        return Err(isolation_error("multiplicity", f64::NAN, f64::NAN, "multiplicities do not add up to the degree"));
    }
    Ok(mults)
}

/// All roots (with multiplicity) of an integer polynomial with nonnegative coefficients
/// and only real nonpositive roots, ascending, in the unscaled variable `x`.
///
/// `tol(x)` is the certified accuracy demanded for a root at `x`.
pub fn real_roots(p: &IntPoly, tol: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("roots of the zero polynomial".into()));
    }
    let zeros = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let q: Vec<BigUint> = p.coeffs[zeros..].to_vec();
    let deg = q.len() - 1;
    let unscale = 2f64.powi(-p.scale_log2 as i32);
    let scale = 2f64.powi(p.scale_log2 as i32);
    let mut out = Vec::with_capacity(deg + zeros);
    if deg > 0 {
        let (s, gdeg) = squarefree(&q)?;
        let hs = HpPoly::new(s.clone());
        let distinct = simple_roots(&hs, &s)?;
        let ytol = |y: f64| tol(y * unscale) * scale;
        certify(&hs, &distinct, &ytol)?;
        let mults = if gdeg == 0 {
            vec![1; distinct.len()]
        } else {
            multiplicities(&HpPoly::new(q), &distinct, deg)?
        };
        for (r, m) in distinct.iter().zip(mults) {
            out.extend(std::iter::repeat_n(r * unscale, m));
        }
    }
    out.extend(std::iter::repeat_n(0.0, zeros));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(x: f64) -> f64 {
        1e-12 * (1.0 + x.abs())
    }

    #[test]
    fn integer_roots() {
        let p = IntPoly::from_roots(&[-1.0, -2.0, -3.0]).unwrap();
        assert_eq!(real_roots(&p, &tol).unwrap(), vec![-3.0, -2.0, -1.0]);
    }

    #[test]
    fn repeated_and_zero_roots() {
        let p = IntPoly::from_roots(&[-2.0, -2.0, 0.0, -0.25, -2.0]).unwrap();
        let r = real_roots(&p, &tol).unwrap();
        assert_eq!(r, vec![-2.0, -2.0, -2.0, -0.25, 0.0]);
    }

    #[test]
    fn uniform_grid_round_trip() {
        let n = 200;
        let roots: Vec<f64> = (0..n).map(|j| -(j as f64) / n as f64).collect();
        let p = IntPoly::from_roots(&roots).unwrap();
        let r = real_roots(&p, &tol).unwrap();
        let mut sorted = roots.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let err = r.iter().zip(&sorted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13, "err {err}");
    }

    #[test]
    fn geometric_roots() {
        let roots: Vec<f64> = (0..40).map(|j| -(10f64).powi(-2 * j)).collect();
        let p = IntPoly::from_roots(&roots).unwrap();
        let r = real_roots(&p, &|x: f64| 1e-12 * x.abs()).unwrap();
        for (a, b) in r.iter().zip(roots.iter()) {
            assert!(((a - b) / b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
