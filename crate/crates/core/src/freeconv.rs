//! Finite free convolutions and the repeated-action polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logpoly::{LogPoly, Node, Shadow};
use crate::numeric::{ln_binom, ln_factorial, ln_gamma, logsumexp};

fn check_cap(p: &LogPoly, n: usize, name: &str) -> Result<()> {
    if p.cap() != n {
        return Err(Error::Argument(format!("{name} has cap {} but n = {n}", p.cap())));
    }
    Ok(())
}

/// Additive convolution of two polynomials normalized at degree `n`.
pub fn boxplus_n(p1: &LogPoly, p2: &LogPoly, n: usize) -> Result<LogPoly> {
    check_cap(p1, n, "left operand")?;
    check_cap(p2, n, "right operand")?;
    if p1.reflected() != p2.reflected() {
        return Err(Error::Precondition("operands use different sign conventions".into()));
    }
    let (d1, d2) = (p1.degree(), p2.degree());
    if d1 + d2 < n {
        return Err(Error::ZeroPolynomial(format!("deg {d1} + deg {d2} < n = {n}: the convolution vanishes")));
    }
    let (l1, l2) = (p1.logc(), p2.logc());
    let ln_n = ln_factorial(n);
    let logc: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let terms: Vec<f64> = (k..=n)
                .map(|j1| {
                    let j2 = n + k - j1;
                    l1[j1] + l2[j2] + ln_gamma(j1 as f64 + 1.0) + ln_gamma(j2 as f64 + 1.0)
                })
                .collect();
            logsumexp(&terms) - ln_gamma(k as f64 + 1.0) - ln_n
        })
        .collect();
    let shadow = Shadow::new(Node::BoxPlus(p1.shadow().clone(), p2.shadow().clone(), n));
    LogPoly::from_parts(n, p1.reflected(), logc, shadow)
}

/// Multiplicative convolution of two nonnegative-rooted (reflected) polynomials.
pub fn boxtimes_n(p1: &LogPoly, p2: &LogPoly, n: usize) -> Result<LogPoly> {
    check_cap(p1, n, "left operand")?;
    check_cap(p2, n, "right operand")?;
    if !p1.reflected() || !p2.reflected() {
        return Err(Error::Precondition("multiplicative convolution needs reflected operands".into()));
    }
    let m = p1.degree().min(p2.degree());
    for (p, name) in [(p1, "left"), (p2, "right")] {
        if m > 0 && p.support().0 >= m {
            return Err(Error::Precondition(format!("{name} operand is divisible by z^{m}")));
        }
    }
    let logc: Vec<f64> = (0..=n).map(|k| p1.logc()[k] + p2.logc()[k] - ln_binom(n, k)).collect();
    if logc.iter().all(|v| !v.is_finite()) {
        return Err(Error::ZeroPolynomial("coefficient supports do not intersect".into()));
    }
    let shadow = Shadow::new(Node::BoxTimes(p1.shadow().clone(), p2.shadow().clone(), n));
    LogPoly::from_parts(n, true, logc, shadow)
}

/// Coefficientwise product.
pub fn hadamard_n(p1: &LogPoly, p2: &LogPoly) -> Result<LogPoly> {
    if p1.cap() != p2.cap() {
        return Err(Error::Argument(format!("caps differ: {} and {}", p1.cap(), p2.cap())));
    }
    if p1.reflected() != p2.reflected() {
        return Err(Error::Precondition("operands use different sign conventions".into()));
    }
    let logc: Vec<f64> = p1.logc().iter().zip(p2.logc()).map(|(a, b)| a + b).collect();
    if logc.iter().all(|v| !v.is_finite()) {
        return Err(Error::ZeroPolynomial("coefficient supports do not intersect".into()));
    }
    let shadow = Shadow::new(Node::Hadamard(p1.shadow().clone(), p2.shadow().clone()));
    LogPoly::from_parts(p1.cap(), p1.reflected(), logc, shadow)
}

/// Generator `T_{n,ell}^{(a,b)}` of the `ell`-fold action of `z^a (d/dz)^b / n^b`, stored reflected.
pub fn t_poly(n: usize, ell: usize, a: usize, b: usize) -> Result<LogPoly> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    let delta = a as i64 - b as i64;
    if n as i64 + delta * ell as i64 <= 0 {
        return Err(Error::Precondition(format!("1 + ({delta})({ell})/{n} must be positive")));
    }
    let ln_n = (n as f64).ln();
    let logc: Vec<f64> = (0..=n)
        .map(|j| {
            let admissible = (0..ell as i64).all(|i| j as i64 + i * delta >= b as i64);
            if !admissible {
                return f64::NEG_INFINITY;
            }
            let mut v = ln_binom(n, j) - (ell * b) as f64 * ln_n;
            for i in 0..ell as i64 {
                let m = (j as i64 + i * delta) as f64;
                v += ln_gamma(m + 1.0) - ln_gamma(m - b as f64 + 1.0);
            }
            v
        })
        .collect();
    if logc.iter().all(|v| !v.is_finite()) {
        return Err(Error::ZeroPolynomial("empty index set".into()));
    }
    LogPoly::from_parts(n, true, logc, Shadow::new(Node::TPoly { n, ell, a, b }))
}

/// `z^{-ell Delta} A_{a,b}^ell q`, checked against `q` convolved multiplicatively with [`t_poly`].
pub fn repeated_action(q: &LogPoly, a: usize, b: usize, ell: usize, n: usize) -> Result<LogPoly> {
    check_cap(q, n, "operand")?;
    if !q.reflected() {
        return Err(Error::Precondition("repeated action needs a reflected operand".into()));
    }
    if ell == 0 {
        return Ok(q.clone());
    }
    let mut left = q.clone();
    for _ in 0..ell {
        left = left.apply_aab(a, b, n)?;
    }
    let delta = a as i64 - b as i64;
    let left = left.shift(-delta * ell as i64)?;
    let right = boxtimes_n(q, &t_poly(n, ell, a, b)?, n)?;
    for (k, (x, y)) in left.logc().iter().zip(right.logc()).enumerate() {
        let ok = if x.is_finite() && y.is_finite() {
            (x - y).abs() <= 1e-9 * (1.0 + x.abs())
        } else {
            x == y
        };
        if !ok {
            return Err(Error::Consistency(format!("coefficient {k}: operator path {x}, convolution path {y}")));
        }
    }
    Ok(left)
}

/// Polynomial with exact rational coefficients, `coeffs[k]` multiplying `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoly {
    pub coeffs: Vec<BigRational>,
}

pub const EXACT_MAX_DEGREE: usize = 12;

impl ExactPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        let p = ExactPoly { coeffs };
        if p.degree() > EXACT_MAX_DEGREE {
            return Err(Error::Degree(format!("exact polynomials are limited to degree {EXACT_MAX_DEGREE}")));
        }
        Ok(p)
    }

    /// `prod (x - r)` over integer roots.
    pub fn from_integer_roots(roots: &[i64]) -> Result<Self> {
        let mut c = vec![BigRational::one()];
        for &r in roots {
            let mut next = vec![BigRational::zero(); c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= v * BigRational::from_integer(BigInt::from(r));
            }
            c = next;
        }
        ExactPoly::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Additive convolution through `(1/n!) (d/dz)^{n+1}` of the classical convolution integral.
///
/// `z^j * z^k` integrates to `j! k! / (j+k+1)! z^{j+k+1}`; differentiating `n+1`
/// times leaves `j! k! / (j+k-n)! z^{j+k-n}`.
pub fn boxplus_oracle(p1: &ExactPoly, p2: &ExactPoly, n: usize) -> Result<ExactPoly> {
    if n > 8 {
        return Err(Error::Argument("the exact oracle is limited to n <= 8".into()));
    }
    let mut out = vec![BigRational::zero(); n + 1];
    let nf = factorial(n);
    for (j, a) in p1.coeffs.iter().enumerate() {
        for (k, b) in p2.coeffs.iter().enumerate() {
            if a.is_zero() || b.is_zero() || j + k < n {
                continue;
            }
            let d = j + k - n;
            let w = BigRational::new(factorial(j) * factorial(k), factorial(d) * &nf);
            out[d] += a * b * w;
        }
    }
    ExactPoly::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(p: &LogPoly) -> Vec<f64> {
        p.logc().iter().map(|v| v.exp()).collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn boxplus_example() {
        let p = LogPoly::from_roots(&[-1.0, -1.0], 2).unwrap();
        let q = boxplus_n(&p, &p, 2).unwrap();
        assert!(close(&coeffs(&q), &[4.0, 4.0, 1.0], 1e-14));
        assert_eq!(q.roots().unwrap(), vec![-2.0, -2.0]);
        let lin = LogPoly::from_roots(&[-1.0], 3).unwrap();
        assert!(matches!(boxplus_n(&lin, &lin, 3), Err(Error::ZeroPolynomial(_))));
    }

    #[test]
    fn boxplus_identity() {
        for n in 1..=6 {
            let xn = LogPoly::from_roots(&vec![0.0; n], n).unwrap();
            let roots: Vec<f64> = (0..n).map(|j| -(j as f64) - 0.5).collect();
            let p = LogPoly::from_roots(&roots, n).unwrap();
            let q = boxplus_n(&xn, &p, n).unwrap();
            assert!(close(&coeffs(&q), &coeffs(&p), 1e-13));
        }
    }

    #[test]
    fn boxtimes_examples() {
        let c = 3.5;
        let one = LogPoly::from_nonneg_roots(&[1.0], 1).unwrap();
        let xc = LogPoly::from_nonneg_roots(&[c], 1).unwrap();
        let r = boxtimes_n(&one, &xc, 1).unwrap();
        assert!(close(&coeffs(&r), &[c, 1.0], 1e-14));
        let sq = LogPoly::from_nonneg_roots(&[1.0, 1.0], 2).unwrap();
        let r = boxtimes_n(&sq, &sq, 2).unwrap();
        assert!(close(&coeffs(&r), &[1.0, 2.0, 1.0], 1e-14));
        assert_eq!(r.empirical_measure().unwrap().atoms, vec![1.0, 1.0]);
        let neg = LogPoly::from_roots(&[-1.0], 1).unwrap();
        assert!(matches!(boxtimes_n(&neg, &xc, 1), Err(Error::Precondition(_))));
        let lo = LogPoly::from_logc(2, true, vec![0.0, f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap();
        let hi = LogPoly::from_logc(2, true, vec![f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0]).unwrap();
        assert!(matches!(boxtimes_n(&lo, &hi, 2), Err(Error::ZeroPolynomial(_))));
    }

    #[test]
    fn hadamard_examples() {
        let n = 8;
        let p = LogPoly::from_roots(&vec![-1.0; n], n).unwrap();
        let h = hadamard_n(&p, &p).unwrap();
        for k in 0..=n {
            assert!((h.logc()[k] - 2.0 * ln_binom(n, k)).abs() < 1e-12);
        }
        let one = LogPoly::from_roots(&[], n).unwrap();
        let h1 = hadamard_n(&p, &one).unwrap();
        assert_eq!(h1.degree(), 0);
        assert_eq!(h1.logc()[0], p.logc()[0]);
        let hi = LogPoly::from_roots(&[0.0], 1).unwrap();
        let c1 = LogPoly::from_roots(&[], 1).unwrap();
        assert!(matches!(hadamard_n(&hi, &c1), Err(Error::ZeroPolynomial(_))));
    }

    #[test]
    fn oracle_examples() {
        let p = ExactPoly::from_integer_roots(&[-1, -1]).unwrap();
        let q = boxplus_oracle(&p, &p, 2).unwrap();
        assert_eq!(q, ExactPoly::from_integer_roots(&[-2, -2]).unwrap());
        for j in 0..=6usize {
            for k in 0..=6usize {
                let n = 6;
                let mono = |d: usize| {
                    let mut c = vec![BigRational::zero(); d + 1];
                    c[d] = BigRational::one();
                    ExactPoly::new(c).unwrap()
                };
                let o = boxplus_oracle(&mono(j), &mono(k), n).unwrap();
                if j + k < n {
                    assert!(o.coeffs.iter().all(|c| c.is_zero()));
                    continue;
                }
                let d = j + k - n;
                let want = ln_factorial(j) + ln_factorial(k) - ln_factorial(d) - ln_factorial(n);
                assert!((o.to_f64()[d].ln() - want).abs() < 1e-12);
                let swapped = boxplus_oracle(&mono(k), &mono(j), n).unwrap();
                assert_eq!(o, swapped);
            }
        }
    }

    #[test]
    fn t_poly_examples() {
        let n = 12;
        for ell in 0..4 {
            let t = t_poly(n, ell, 1, 1).unwrap();
            for j in 0..=n {
                let want = if ell == 0 {
                    ln_binom(n, j)
                } else if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    ln_binom(n, j) + ell as f64 * (j as f64 / n as f64).ln()
                };
                assert!(t.logc()[j] == want || (t.logc()[j] - want).abs() < 1e-12);
            }
        }
        let zeros = |t: &LogPoly| t.empirical_measure().unwrap().atoms.iter().filter(|x| **x == 0.0).count();
        assert_eq!(zeros(&t_poly(n, 2, 2, 1).unwrap()), 1);
        assert_eq!(zeros(&t_poly(n, 3, 0, 1).unwrap()), 3);
        assert!(t_poly(4, 4, 0, 1).is_err());

        let q = LogPoly::from_nonneg_roots(&vec![1.0; n], n).unwrap();
        let via_op = q.apply_aab(0, 1, n).unwrap().shift(1).unwrap();
        let t = t_poly(n, 1, 0, 1).unwrap();
        assert!(close(&coeffs(&via_op), &coeffs(&t), 1e-12));
    }

    #[test]
    fn repeated_action_examples() {
        let n = 50;
        let q = LogPoly::from_nonneg_roots(&vec![1.0; n], n).unwrap();
        let r = repeated_action(&q, 2, 1, 3, n).unwrap();
        let t = t_poly(n, 3, 2, 1).unwrap();
        assert!(close(&coeffs(&r), &coeffs(&t), 1e-10));

        let roots: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
        let q = LogPoly::from_nonneg_roots(&roots, n).unwrap();
        let r = repeated_action(&q, 0, 1, 1, n).unwrap();
        let d = q.derivative(1).unwrap();
        for k in 1..=n {
            assert!((r.logc()[k] - (d.logc()[k - 1] - (n as f64).ln())).abs() < 1e-10);
        }
        assert_eq!(repeated_action(&q, 1, 1, 0, n).unwrap().logc(), q.logc());
    }
}
