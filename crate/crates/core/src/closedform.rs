//! Reference measures with explicit transforms, and the special functions behind them.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;
use crate::transforms::Measure;

const INV_E: f64 = 1.0 / E;

/// Series of `W_0` around the branch point in `p = sqrt(2 (e x + 1))`.
fn branch_series<T>(p: T) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Mul<f64, Output = T> + From<f64>,
{
    let c = [-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0];
    let mut acc = T::from(c[5]);
    for k in (0..5).rev() {
        acc = acc * p + T::from(c[k]);
    }
    acc
}

/// Principal branch of the Lambert W function on `[-1/e, inf)`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E {
        return Err(Error::Domain(format!("W0 is undefined below -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(x);
    }
    let q = (E * x + 1.0).max(0.0);
    let p = (2.0 * q).sqrt();
    if p < 1e-3 {
        return Ok(branch_series(p));
    }
    let mut w = if x < -0.25 {
        branch_series(p)
    } else if x < 3.0 {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

fn halley(z: Complex64, mut w: Complex64) -> Complex64 {
    for _ in 0..200 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if !(step.norm() > 4.0 * f64::EPSILON * (1.0 + w.norm())) {
            break;
        }
    }
    w
}

fn w0_complex_guess(z: Complex64, upper: bool) -> Complex64 {
    let q = z * E + 1.0;
    if q.norm() < 1.5 {
        let mut p = (q * 2.0).sqrt();
        if q.im == 0.0 && q.re < 0.0 {
            p = Complex64::new(0.0, if upper { 1.0 } else { -1.0 } * (-2.0 * q.re).sqrt());
        }
        return branch_series(p);
    }
    let mut l1 = z.ln();
    if z.im == 0.0 && z.re < 0.0 && !upper {
        l1 = l1.conj();
    }
    let l2 = l1.ln();
    l1 - l2 + l2 / l1
}

/// Principal branch of W at a complex argument off the cut `(-inf, -1/e]`.
pub fn lambert_w0_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re >= -INV_E {
        return Complex64::new(lambert_w0(z.re).expect("checked domain"), 0.0);
    }
    let guess = w0_complex_guess(z, z.im >= 0.0);
    if (z * E + 1.0).norm() < 1e-7 {
        return guess;
    }
    halley(z, guess)
}

/// Boundary value `W_0(y + i0)` for `y < -1/e`, approached from the upper half-plane.
pub fn lambert_w0_above(y: f64) -> Result<Complex64> {
    if !(y < -INV_E) {
        return Err(Error::Domain(format!("boundary value needs y < -1/e, got {y}")));
    }
    let z = Complex64::new(y, 0.0);
    let guess = w0_complex_guess(z, true);
    if (E * y + 1.0).abs() < 1e-7 {
        return Ok(guess);
    }
    Ok(halley(z, guess))
}

/// Right end of the continuous support of the diagonal family, `a k e^{1 - a k}`.
pub fn nu_aa_support_end(a: f64, kappa: f64) -> f64 {
    let c = a * kappa;
    c * (1.0 - c).exp()
}

/// Cauchy transform of the diagonal-family law at complex `t`.
pub fn nu_aa_cauchy(a: f64, kappa: f64, t: Complex64) -> Result<Complex64> {
    let c = a * kappa;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("a*kappa must be positive, got {c}")));
    }
    let end = nu_aa_support_end(a, kappa);
    if t.im == 0.0 && t.re >= 0.0 && t.re <= end {
        return Err(Error::Singularity(t.re));
    }
    if c < 1.0 && (t - 1.0).norm() < 1e-12 {
        return Err(Error::Singularity(1.0));
    }
    let arg = -c / (t * c.exp());
    let w = lambert_w0_complex(arg);
    Ok(1.0 / (t * (1.0 + w / c)))
}

/// `W_0(-e^l + i0)` for large `l`, from `w + log w = l + i pi`.
fn w0_above_from_log(l: f64) -> Complex64 {
    let lz = Complex64::new(l, PI);
    let mut w = lz - lz.ln();
    for _ in 0..50 {
        let step = (w + w.ln() - lz) / (1.0 + 1.0 / w);
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * w.norm() {
            break;
        }
    }
    w
}

/// `x p(x)` at `x = e^{-s}`; stays finite for arbitrarily small `x`.
fn nu_aa_x_density(c: f64, s: f64) -> Result<f64> {
    let l = c.ln() - c + s;
    let w = if l > 30.0 { w0_above_from_log(l) } else { lambert_w0_above(-l.exp())? };
    let v = 1.0 / (1.0 + w / c);
    Ok((-v.im / PI).max(0.0))
}

/// Density of the continuous part of the diagonal-family law.
pub fn nu_aa_density(a: f64, kappa: f64, x: f64) -> Result<f64> {
    let c = a * kappa;
    let end = nu_aa_support_end(a, kappa);
    if !(x > 0.0 && x < end) {
        return Err(Error::Domain(format!("x = {x} is outside (0, {end})")));
    }
    Ok(nu_aa_x_density(c, -x.ln())? / x)
}

/// Mass of the continuous part by quadrature.
///
/// Near 0 the density decays like `1 / (x log^2 x)`, so the piece below the
/// `1e-6` margin is integrated in `v = 1 / log(1/x)`, where the integrand is bounded.
/// The right half uses `x = end - u^2` to absorb an inverse square-root edge.
pub fn nu_aa_continuous_mass(a: f64, kappa: f64) -> Result<f64> {
    let c = a * kappa;
    let end = nu_aa_support_end(a, kappa);
    let margin = 1e-6;
    let body = |x: f64| nu_aa_density(a, kappa, x).unwrap_or(0.0);
    let left = adaptive_simpson(&body, margin, 0.5 * end, 1e-11);
    let edge = |u: f64| 2.0 * u * nu_aa_density(a, kappa, end - u * u).unwrap_or(0.0);
    let right = adaptive_simpson(&edge, 1e-12, (0.5 * end).sqrt(), 1e-11);
    let tail = |v: f64| {
        if v <= 0.0 {
            c
        } else {
            nu_aa_x_density(c, 1.0 / v).unwrap_or(0.0) / (v * v)
        }
    };
    let rest = adaptive_simpson(&tail, 0.0, 1.0 / -margin.ln(), 1e-11);
    Ok(left + right + rest)
}

/// Mass of the atom at 1 of the diagonal-family law.
pub fn nu_aa_atom_at_one(a: f64, kappa: f64) -> f64 {
    (1.0 - a * kappa).max(0.0)
}

fn check_ab(a: f64, b: f64, kappa: f64) -> Result<f64> {
    let delta = a - b;
    if !(kappa > 0.0) || !(1.0 + delta * kappa > 0.0) {
        return Err(Error::Domain(format!("need kappa > 0 and 1 + (a-b) kappa > 0, got a={a} b={b} kappa={kappa}")));
    }
    Ok(delta)
}

/// S-transform of the general family on `t + 1` in `(0, 1)` intersected with `(-(a-b) kappa, inf)`.
pub fn nu_ab_s_transform(a: f64, b: f64, kappa: f64, t: f64) -> Result<f64> {
    let delta = check_ab(a, b, kappa)?;
    let u = t + 1.0;
    let lo = (-delta * kappa).max(0.0);
    if !(u > lo && u < 1.0) {
        return Err(Error::Range { x: t, lo: lo - 1.0, hi: 0.0 });
    }
    Ok(if delta > 0.0 {
        (b / delta * (delta * kappa / u).ln_1p()).exp()
    } else if delta < 0.0 {
        (u / (u + delta * kappa)).powf(b / -delta)
    } else {
        (b * kappa / u).exp()
    })
}

pub fn nu_ab_atom_at_zero(a: f64, b: f64, kappa: f64) -> f64 {
    (-(a - b) * kappa).max(0.0)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!("kappa must lie in (0, 1), got {kappa}")));
    }
    Ok(())
}

/// `coth t - kappa / t`.
pub fn y_kappa(kappa: f64, t: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if t == 0.0 {
        return Err(Error::Singularity(0.0));
    }
    Ok(1.0 / t.tanh() - kappa / t)
}

/// Positive solution of `sinh z = z / sqrt(kappa)`.
pub fn z_kappa(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let s = kappa.sqrt();
    let f = |z: f64| z.sinh() - z / s;
    let (mut lo, mut hi) = (1e-9, 2.0 * (2.0 / s).ln() + 10.0);
    if f(lo) >= 0.0 {
        lo = 0.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
}

/// Cauchy transform of the limiting law, as the branch of the inverse of `Y_kappa` on `(0, z_kappa)`.
pub fn mu_kappa_cauchy(kappa: f64, z: f64) -> Result<f64> {
    let zk = z_kappa(kappa)?;
    let edge = y_kappa(kappa, zk)?;
    if !(z.abs() > edge) {
        return Err(Error::Singularity(z));
    }
    let target = z.abs();
    // Y is decreasing on (0, z_kappa); bisect in log t.
    let (mut lo, mut hi) = ((1e-300f64).ln(), zk.ln());
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let g = mid.exp();
            return Ok(if z < 0.0 { -g } else { g });
        }
        if y_kappa(kappa, mid.exp())? > target {
            lo = mid
        } else {
            hi = mid
        }
    }
}

/// Support `[Y(-z_kappa), Y(z_kappa)]` of the limiting law.
pub fn mu_kappa_support(kappa: f64) -> Result<(f64, f64)> {
    let e = y_kappa(kappa, z_kappa(kappa)?)?;
    Ok((-e, e))
}

/// Solution of `w / (e^w - 1) = alpha`.
pub fn w_s(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let h = |w: f64| w / w.exp_m1();
    let mut hi = 1.0;
    while h(hi) > alpha {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if h(mid) > alpha {
            lo = mid
        } else {
            hi = mid
        }
    }
}

/// Coefficient profile of the rising-factorial family.
pub fn stirling_profile(alpha: f64) -> Result<f64> {
    let w = w_s(alpha)?;
    Ok(-1.0 + alpha + (1.0 - alpha) * alpha.ln() + w + (alpha - 1.0) * w.ln())
}

/// Reference measure given by a formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params", rename_all = "snake_case")]
pub enum MeasureSpec {
    DiracMixture { atoms: Vec<f64>, weights: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    NuAbKappa { a: f64, b: f64, kappa: f64 },
    MuKappa { kappa: f64 },
    Bernoulli01 { kappa: f64 },
}

impl MeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::DiracMixture { atoms, weights } => {
                if atoms.len() != weights.len() || atoms.is_empty() {
                    return Err(Error::Argument("atoms and weights must be nonempty and of equal length".into()));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) || atoms.iter().any(|a| !a.is_finite()) {
                    return Err(Error::Argument("weights must be nonnegative and atoms finite".into()));
                }
                let s: f64 = weights.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::Argument(format!("weights sum to {s}")));
                }
            }
            MeasureSpec::Uniform { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Argument(format!("bad uniform interval [{lo}, {hi}]")));
                }
            }
            MeasureSpec::NuAbKappa { a, b, kappa } => {
                check_ab(*a, *b, *kappa)?;
            }
            MeasureSpec::MuKappa { kappa } => check_kappa(*kappa)?,
            MeasureSpec::Bernoulli01 { kappa } => {
                if !(*kappa >= 0.0 && *kappa <= 1.0) {
                    return Err(Error::Domain(format!("kappa must lie in [0, 1], got {kappa}")));
                }
            }
        }
        Ok(())
    }

    /// Parses `name:p1:p2:...`, e.g. `mu_kappa:0.5`, `nu_aa:1:0.5`, `uniform:-1:0`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or("");
        let nums: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| Error::Argument(format!("bad number {p:?} in {s:?}"))))
            .collect::<Result<_>>()?;
        let want = |k: usize| -> Result<()> {
            if nums.len() != k {
                return Err(Error::Argument(format!("{name} takes {k} parameters, got {}", nums.len())));
            }
            Ok(())
        };
        let spec = match name {
            "dirac" => {
                want(1)?;
                MeasureSpec::DiracMixture { atoms: vec![nums[0]], weights: vec![1.0] }
            }
            "uniform" => {
                want(2)?;
                MeasureSpec::Uniform { lo: nums[0], hi: nums[1] }
            }
            "nu_aa" => {
                want(2)?;
                MeasureSpec::NuAbKappa { a: nums[0], b: nums[0], kappa: nums[1] }
            }
            "nu_ab" => {
                want(3)?;
                MeasureSpec::NuAbKappa { a: nums[0], b: nums[1], kappa: nums[2] }
            }
            "mu_kappa" => {
                want(1)?;
                MeasureSpec::MuKappa { kappa: nums[0] }
            }
            "bernoulli01" => {
                want(1)?;
                MeasureSpec::Bernoulli01 { kappa: nums[0] }
            }
            _ => return Err(Error::Argument(format!("unknown closed form {name:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Two-atom form of the family members that are Bernoulli laws.
    fn as_bernoulli(&self) -> Option<f64> {
        match self {
            MeasureSpec::Bernoulli01 { kappa } => Some(*kappa),
            MeasureSpec::NuAbKappa { a, b, kappa } if *a == 0.0 => Some(b * kappa),
            _ => None,
        }
    }
}

impl Measure for MeasureSpec {
    fn cauchy(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if let Some(k) = self.as_bernoulli() {
            let atoms = [(0.0, k), (1.0, 1.0 - k)];
            let mut s = 0.0;
            for (x, w) in atoms {
                if w > 0.0 {
                    if (t - x).abs() <= 1e-12 * (1.0 + x.abs()) {
                        return Err(Error::Singularity(t));
                    }
                    s += w / (t - x);
                }
            }
            return Ok(s);
        }
        match self {
            MeasureSpec::DiracMixture { atoms, weights } => {
                let mut s = 0.0;
                for (x, w) in atoms.iter().zip(weights) {
                    if (t - x).abs() <= 1e-12 * (1.0 + x.abs()) {
                        return Err(Error::Singularity(t));
                    }
                    s += w / (t - x);
                }
                Ok(s)
            }
            MeasureSpec::Uniform { lo, hi } => {
                if t >= *lo && t <= *hi {
                    return Err(Error::Singularity(t));
                }
                Ok(((t - lo) / (t - hi)).ln() / (hi - lo))
            }
            MeasureSpec::NuAbKappa { a, b, kappa } => {
                if a != b {
                    return Err(Error::Argument("no closed-form Cauchy transform for a != b; use the S-transform".into()));
                }
                Ok(nu_aa_cauchy(*a, *kappa, Complex64::new(t, 0.0))?.re)
            }
            MeasureSpec::MuKappa { kappa } => mu_kappa_cauchy(*kappa, t),
            MeasureSpec::Bernoulli01 { .. } => unreachable!(),
        }
    }

    fn hull(&self) -> Option<(f64, f64)> {
        if let Some(k) = self.as_bernoulli() {
            let lo = if k > 0.0 { 0.0 } else { 1.0 };
            let hi = if k < 1.0 { 1.0 } else { 0.0 };
            return Some((lo, hi));
        }
        match self {
            MeasureSpec::DiracMixture { atoms, weights } => {
                let live = atoms.iter().zip(weights).filter(|(_, w)| **w > 0.0).map(|(a, _)| *a);
                let lo = live.clone().fold(f64::INFINITY, f64::min);
                let hi = live.fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
            MeasureSpec::Uniform { lo, hi } => Some((*lo, *hi)),
            MeasureSpec::NuAbKappa { a, kappa, .. } => {
                let end = nu_aa_support_end(*a, *kappa);
                Some((0.0, if nu_aa_atom_at_one(*a, *kappa) > 0.0 { 1.0 } else { end }))
            }
            MeasureSpec::MuKappa { kappa } => mu_kappa_support(*kappa).ok(),
            MeasureSpec::Bernoulli01 { .. } => unreachable!(),
        }
    }

    fn psi(&self, t: f64) -> Result<f64> {
        let discrete = |pairs: &[(f64, f64)]| pairs.iter().map(|(z, w)| w * z * t / (1.0 - z * t)).sum::<f64>();
        if let Some(k) = self.as_bernoulli() {
            return Ok(discrete(&[(0.0, k), (1.0, 1.0 - k)]));
        }
        match self {
            MeasureSpec::DiracMixture { atoms, weights } => {
                let pairs: Vec<(f64, f64)> = atoms.iter().cloned().zip(weights.iter().cloned()).collect();
                Ok(discrete(&pairs))
            }
            _ => Ok(self.cauchy(1.0 / t)? / t - 1.0),
        }
    }

    fn infinity_mass(&self) -> f64 {
        match self {
            MeasureSpec::MuKappa { kappa } => *kappa,
            _ => 0.0,
        }
    }

    fn infinity_sign(&self) -> i8 {
        1
    }

    fn mass_at_zero(&self) -> f64 {
        if let Some(k) = self.as_bernoulli() {
            return k;
        }
        match self {
            MeasureSpec::DiracMixture { atoms, weights } => {
                atoms.iter().zip(weights).filter(|(a, _)| **a == 0.0).map(|(_, w)| w).sum()
            }
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(-INV_E).unwrap() + 1.0).abs() < 1e-8);
        assert!(lambert_w0(-0.5).is_err());
        for i in 0..200 {
            let x = -INV_E + 10f64.powf(-12.0 + 0.1 * i as f64);
            let w = lambert_w0(x).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-13 * (1.0 + x.abs()), "x = {x}");
        }
    }

    #[test]
    fn lambert_above_examples() {
        let w = lambert_w0_above(-INV_E - 1e-12).unwrap();
        assert!((w - Complex64::new(-1.0, 0.0)).norm() < 1e-5);
        let w = lambert_w0_above(-1.0).unwrap();
        assert!((w * w.exp() + 1.0).norm() < 1e-12);
        assert!((w - Complex64::new(-0.318_131_505_204_764_1, 1.337_235_701_430_689)).norm() < 1e-12);
        for i in 0..300 {
            let y = -INV_E - 10f64.powf(-8.0 + 0.05 * i as f64);
            let w = lambert_w0_above(y).unwrap();
            assert!(w.im > 0.0 && w.im < PI, "y = {y}");
            assert!((w * w.exp() - y).norm() <= 1e-12 * (1.0 + y.abs()), "y = {y}");
        }
    }

    #[test]
    fn nu_aa_examples() {
        assert!((nu_aa_support_end(1.0, 1.0) - 1.0).abs() < 1e-15);
        let g = nu_aa_cauchy(1.0, 0.5, Complex64::new(1e8, 0.0)).unwrap();
        assert!((g.re * 1e8 - 1.0).abs() < 1e-6);
        assert_eq!(nu_aa_atom_at_one(1.0, 0.5), 0.5);
        assert!(nu_aa_cauchy(1.0, 0.5, Complex64::new(0.5, 0.0)).is_err());
        for &(a, k) in &[(1.0, 0.5), (1.0, 1.0), (2.0, 0.8), (1.0, 0.3)] {
            let end = nu_aa_support_end(a, k);
            let f = |x: f64| nu_aa_density(a, k, x).unwrap();
            let mass = nu_aa_continuous_mass(a, k).unwrap();
            assert!((mass - f64::min(a * k, 1.0)).abs() < 1e-4, "a={a} kappa={k} mass={mass}");
            for i in 1..1000 {
                assert!(f(end * i as f64 / 1000.0) >= 0.0);
            }
            for i in 1..20 {
                let x = end * i as f64 / 20.0;
                let g = nu_aa_cauchy(a, k, Complex64::new(x, 1e-6)).unwrap();
                assert!((-g.im / PI - f(x)).abs() < 1e-4, "x = {x}");
            }
        }
    }

    #[test]
    fn nu_ab_examples() {
        for &t in &[-0.6, -0.3, -0.1] {
            let s = nu_ab_s_transform(0.0, 1.0, 0.3, t).unwrap();
            assert!((s - (t + 1.0) / (1.0 + t - 0.3)).abs() < 1e-14);
            let s0 = nu_ab_s_transform(1.0, 1.0, 0.3, t).unwrap();
            for d in [1e-6, -1e-6] {
                let sd = nu_ab_s_transform(1.0 + d, 1.0, 0.3, t).unwrap();
                assert!((sd - s0).abs() < 1e-4);
            }
        }
        assert!(nu_ab_s_transform(0.0, 1.0, 0.3, -0.8).is_err());
        assert!((nu_ab_atom_at_zero(0.0, 1.0, 0.3) - 0.3).abs() < 1e-15);
        assert_eq!(nu_ab_atom_at_zero(1.0, 1.0, 0.3), 0.0);
        assert_eq!(nu_ab_atom_at_zero(2.0, 1.0, 0.3), 0.0);
    }

    #[test]
    fn mu_kappa_examples() {
        let z = z_kappa(0.25).unwrap();
        assert!((z - 2.1773).abs() < 1e-4);
        assert!((z.sinh() - 2.0 * z).abs() < 1e-10);
        for t in [0.3, 1.0, 4.0] {
            assert_eq!(y_kappa(0.4, -t).unwrap(), -y_kappa(0.4, t).unwrap());
        }
        let (lo, hi) = mu_kappa_support(1e-4).unwrap();
        assert!((hi - 1.0).abs() < 5e-2 && (lo + 1.0).abs() < 5e-2);
        let g = mu_kappa_cauchy(1e-4, 2.0).unwrap();
        assert!((g - 0.5 * 3f64.ln()).abs() < 1e-3);
        let g = mu_kappa_cauchy(0.5, 1e6).unwrap();
        assert!((1e6 * g - 0.5).abs() < 1e-4);
        assert!(mu_kappa_cauchy(0.5, 0.1).is_err());
        assert_eq!(mu_kappa_cauchy(0.5, -3.0).unwrap(), -mu_kappa_cauchy(0.5, 3.0).unwrap());
        assert!(z_kappa(1.5).is_err());
    }

    #[test]
    fn stirling_examples() {
        let w = w_s(0.5).unwrap();
        assert!((w - 1.2564).abs() < 1e-4);
        assert!((w.exp() - 2.0 * w - 1.0).abs() < 1e-12);
        assert!(w_s(1.0 - 1e-9).unwrap() < 1e-8);
        assert!(stirling_profile(1.0 - 1e-9).unwrap().abs() < 1e-7);
        assert!(stirling_profile(0.0).is_err());
    }

    #[test]
    fn spec_parsing_and_json() {
        let s = MeasureSpec::parse("mu_kappa:0.5").unwrap();
        assert_eq!(s, MeasureSpec::MuKappa { kappa: 0.5 });
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"variant":"mu_kappa","params":{"kappa":0.5}}"#);
        assert_eq!(serde_json::from_str::<MeasureSpec>(&j).unwrap(), s);
        assert!(MeasureSpec::parse("nu_aa:1").is_err());
        assert!(MeasureSpec::parse("nu_ab:0:2:0.6").is_err());
        let u = MeasureSpec::parse("uniform:-1:0").unwrap();
        assert!((u.cauchy(1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn spec_mass_at_infinity() {
        for s in [
            MeasureSpec::parse("uniform:-1:0").unwrap(),
            MeasureSpec::parse("nu_aa:1:0.5").unwrap(),
            MeasureSpec::parse("bernoulli01:0.3").unwrap(),
            MeasureSpec::parse("dirac:-2").unwrap(),
        ] {
            let t = 1e8;
            assert!((t * s.cauchy(t).unwrap() - 1.0).abs() < 1e-6, "{s:?}");
        }
    }
}
