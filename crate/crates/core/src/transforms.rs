//! Cauchy, R, psi and S transforms of measures on the extended real line.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logpoly::EmpiricalMeasure;
use crate::numeric::fmt17;
use crate::profile::Profile;

/// A probability measure on the real line extended by one signed point at infinity.
pub trait Measure {
    /// `G(t) = int dmu(z) / (t - z)` for real `t` off the support; mass at infinity contributes 0.
    fn cauchy(&self, t: f64) -> Result<f64>;
    /// Smallest interval containing the finite part of the support.
    fn hull(&self) -> Option<(f64, f64)>;
    fn infinity_mass(&self) -> f64;
    fn infinity_sign(&self) -> i8;
    fn mass_at_zero(&self) -> f64;

    /// `G(1/t)/t - 1` for `t < 0`.
    fn psi(&self, t: f64) -> Result<f64> {
        Ok(self.cauchy(1.0 / t)? / t - 1.0)
    }
}

impl Measure for EmpiricalMeasure {
    fn cauchy(&self, t: f64) -> Result<f64> {
        let mut s = 0.0;
        for &a in &self.atoms {
            if (t - a).abs() <= 1e-12 * (1.0 + a.abs()) {
                return Err(Error::Singularity(t));
            }
            s += 1.0 / (t - a);
        }
        Ok(s * self.weight())
    }

    fn hull(&self) -> Option<(f64, f64)> {
        Some((*self.atoms.first()?, *self.atoms.last()?))
    }

    fn infinity_mass(&self) -> f64 {
        self.infinity_mass
    }

    fn infinity_sign(&self) -> i8 {
        self.infinity_sign
    }

    fn mass_at_zero(&self) -> f64 {
        self.mass_at(0.0)
    }

    fn psi(&self, t: f64) -> Result<f64> {
        let s: f64 = self.atoms.iter().map(|z| z * t / (1.0 - z * t)).sum();
        let top = if self.infinity_sign > 0 { self.infinity_mass } else { 0.0 };
        Ok(s * self.weight() - top)
    }
}

/// Cauchy transform at real `t`.
pub fn cauchy<M: Measure + ?Sized>(mu: &M, t: f64) -> Result<f64> {
    mu.cauchy(t)
}

fn mass_below(mu: &(impl Measure + ?Sized)) -> f64 {
    if mu.infinity_sign() < 0 {
        mu.infinity_mass()
    } else {
        0.0
    }
}

fn mass_above(mu: &(impl Measure + ?Sized)) -> f64 {
    if mu.infinity_sign() > 0 {
        mu.infinity_mass()
    } else {
        0.0
    }
}

/// `R(s) = s G^{-1}(s) - 1` for a measure on `[-inf, A]`, `G^{-1}` taken on `(A, inf)`.
pub fn r_transform<M: Measure + ?Sized>(mu: &M, s: f64) -> Result<f64> {
    if mass_above(mu) > 0.0 {
        return Err(Error::Domain("R-transform needs a measure bounded above".into()));
    }
    let (_, a) = mu.hull().ok_or_else(|| Error::Domain("no finite mass".into()))?;
    let g = |t: f64| match mu.cauchy(t) {
        Err(Error::Singularity(_)) => Ok(f64::INFINITY),
        other => other,
    };
    let near = a + 1e-9 * (1.0 + a.abs());
    let g_near = g(near)?;
    if !(s > 0.0) || s >= g_near {
        return Err(Error::Range { x: s, lo: 0.0, hi: g_near });
    }
    let mut gap = 1.0 + a.abs();
    while g(a + gap)? >= s {
        gap *= 2.0;
        if !gap.is_finite() {
            return Err(Error::Range { x: s, lo: 0.0, hi: g_near });
        }
    }
    let (mut lo, mut hi) = (a, a + gap);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(s * mid - 1.0);
        }
        if g(mid)? > s {
            lo = mid
        } else {
            hi = mid
        }
    }
}

fn check_nonneg(nu: &(impl Measure + ?Sized)) -> Result<()> {
    if mass_below(nu) > 0.0 || nu.hull().is_some_and(|(lo, _)| lo < 0.0) {
        return Err(Error::Domain("measure must live on [0, +inf]".into()));
    }
    if nu.mass_at_zero() + mass_above(nu) >= 1.0 {
        return Err(Error::Domain("all mass sits at 0 and +inf".into()));
    }
    Ok(())
}

/// `psi(t) = G(1/t)/t - 1` for a measure on `[0, +inf]` and `t < 0`.
pub fn psi_transform<M: Measure + ?Sized>(nu: &M, t: f64) -> Result<f64> {
    check_nonneg(nu)?;
    if !(t < 0.0) {
        return Err(Error::Domain(format!("psi needs t < 0, got {t}")));
    }
    nu.psi(t)
}

fn psi_inverse(nu: &(impl Measure + ?Sized), t: f64) -> Result<f64> {
    if t > 0.0 {
        // analytic continuation to small positive arguments, below 1 / max atom
        let top = nu.hull().map_or(1.0, |h| h.1);
        let (mut lo, mut hi) = (0.0, if top > 0.0 { 1.0 / top } else { 1.0 });
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if nu.psi(mid)? < t {
                lo = mid
            } else {
                hi = mid
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    // psi(-e^x) decreases in x.
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if nu.psi(-mid.exp())? > t {
            lo = mid
        } else {
            hi = mid
        }
    }
    Ok(-(0.5 * (lo + hi)).exp())
}

/// `S(t) = (t+1)/t psi^{-1}(t)`; at `t = 0` the average of the values at `+-1e-8`.
pub fn s_transform<M: Measure + ?Sized>(nu: &M, t: f64) -> Result<f64> {
    check_nonneg(nu)?;
    let (lo, hi) = (nu.mass_at_zero() - 1.0, -mass_above(nu));
    if !(t > lo && t < hi) && t != 0.0 {
        return Err(Error::Range { x: t, lo, hi });
    }
    if t == 0.0 {
        let e = 1e-8;
        if !(-e > lo) {
            return Err(Error::Range { x: t, lo, hi });
        }
        let at = |t: f64| -> Result<f64> { Ok((t + 1.0) / t * psi_inverse(nu, t)?) };
        return Ok(0.5 * (at(-e)? + at(e)?));
    }
    Ok((t + 1.0) / t * psi_inverse(nu, t)?)
}

/// `S` of the reflected root law read off a profile: `-(t+1)/t e^{g'(t+1)}`.
pub fn s_from_profile(prof: &Profile, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Singularity(0.0));
    }
    Ok(-(t + 1.0) / t * prof.gprime(t + 1.0)?.exp())
}

/// `R` read off a profile: the solution of `log alpha + g'(alpha) = log t`, minus 1.
pub fn r_from_profile(prof: &Profile, t: f64) -> Result<f64> {
    let (mut lo, hi) = prof.gprime_domain();
    if lo <= 0.0 {
        lo = prof.grid.iter().cloned().find(|a| *a > 0.0).unwrap_or(hi);
    }
    let h = |a: f64| -> Result<f64> { Ok(a.ln() + prof.gprime(a)?) };
    let (h_lo, h_hi) = (h(lo)?, h(hi)?);
    let lt = t.ln();
    if !(t > 0.0) || lt > h_lo || lt < h_hi {
        return Err(Error::Range { x: t, lo: h_hi.exp(), hi: h_lo.exp() });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        if h(mid)? > lt {
            a = mid
        } else {
            b = mid
        }
    }
    Ok(0.5 * (a + b) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    G,
    R,
    S,
    #[serde(rename = "psi")]
    Psi,
    #[serde(rename = "exp_gprime")]
    ExpGprime,
}

impl std::str::FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "G" => TransformKind::G,
            "R" => TransformKind::R,
            "S" => TransformKind::S,
            "psi" => TransformKind::Psi,
            "exp_gprime" => TransformKind::ExpGprime,
            _ => return Err(Error::Argument(format!("unknown transform kind {s:?}"))),
        })
    }
}

/// Sampled transform on a grid of arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSample {
    pub kind: TransformKind,
    pub points: Vec<(f64, f64)>,
    pub domain: (f64, f64),
    pub open: (bool, bool),
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    kind: TransformKind,
    domain_lo: f64,
    domain_hi: f64,
}

impl TransformSample {
    pub fn new(kind: TransformKind, points: Vec<(f64, f64)>, domain: (f64, f64), open: (bool, bool)) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Argument("sample arguments must increase strictly".into()));
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::Argument("sample values must be finite".into()));
        }
        Ok(TransformSample { kind, points, domain, open })
    }

    /// Evaluates `f` on `args` in parallel.
    pub fn sample<F>(kind: TransformKind, args: &[f64], domain: (f64, f64), open: (bool, bool), f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let points = args.par_iter().map(|&x| Ok((x, f(x)?))).collect::<Result<Vec<_>>>()?;
        TransformSample::new(kind, points, domain, open)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("arg,value\n");
        for (x, y) in &self.points {
            let _ = writeln!(out, "{},{}", fmt17(*x), fmt17(*y));
        }
        out
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string(&Sidecar { kind: self.kind, domain_lo: self.domain.0, domain_hi: self.domain.1 })
            .expect("serializable")
    }

    /// Largest violation of the monotonicity expected for this kind (0 when none).
    pub fn monotonicity_defect(&self) -> f64 {
        let sign = match self.kind {
            TransformKind::G | TransformKind::ExpGprime => -1.0,
            TransformKind::Psi => 1.0,
            _ => return 0.0,
        };
        self.points
            .windows(2)
            .map(|w| -sign * (w[1].1 - w[0].1))
            .fold(0.0, f64::max)
    }
}

/// Pointwise `S^p`: the transform of the `p`-fold multiplicative self-convolution.
pub fn s_power(s: &TransformSample, p: f64) -> Result<TransformSample> {
    if s.kind != TransformKind::S {
        return Err(Error::Argument("s_power needs an S-transform sample".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Argument(format!("exponent must be at least 1, got {p}")));
    }
    if let Some((x, _)) = s.points.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Domain(format!("S is not positive at {x}")));
    }
    let points = s.points.iter().map(|(x, v)| (*x, v.powf(p))).collect();
    TransformSample::new(TransformKind::S, points, s.domain, s.open)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{nu_ab_s_transform, MeasureSpec};
    use crate::logpoly::LogPoly;

    fn dirac(x: f64) -> MeasureSpec {
        MeasureSpec::DiracMixture { atoms: vec![x], weights: vec![1.0] }
    }

    fn emp(atoms: Vec<f64>, cap: usize, sign: i8) -> EmpiricalMeasure {
        let infinity_mass = (cap - atoms.len()) as f64 / cap as f64;
        EmpiricalMeasure { atoms, cap, infinity_mass, infinity_sign: sign }
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy(&dirac(-1.0), 1.0).unwrap(), 0.5);
        let m = emp(vec![-2.0, 0.0], 2, -1);
        assert_eq!(cauchy(&m, 2.0).unwrap(), 0.375);
        assert!(matches!(cauchy(&m, 1e-13), Err(Error::Singularity(_))));
        let m = emp(vec![-1.0, -0.5], 5, -1);
        let t = 1e8;
        assert!((t * cauchy(&m, t).unwrap() / 0.4 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn r_examples() {
        for a in [-1.0, -2.0, 0.5] {
            for s in [0.01, 0.3, 2.0] {
                assert!((r_transform(&dirac(a), s).unwrap() - a * s).abs() < 1e-12);
            }
        }
        let m = emp(vec![-1.0, -0.5, -0.2], 5, -1);
        assert!((r_transform(&m, 1e-6).unwrap() + 0.4).abs() < 1e-3);
        let u = MeasureSpec::Uniform { lo: -1.0, hi: 0.0 };
        let s = 0.3;
        let t = r_transform(&u, s).unwrap();
        assert!((u.cauchy((t + 1.0) / s).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn psi_examples() {
        assert!((psi_transform(&dirac(1.0), -1.0).unwrap() + 0.5).abs() < 1e-15);
        let m = emp(vec![0.0, 1.0, 3.0], 4, 1);
        assert!((psi_transform(&m, -1e-6).unwrap() + 0.25).abs() < 1e-3);
        assert!((psi_transform(&m, -1e6).unwrap() - (0.25 - 1.0)).abs() < 1e-3);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..100 {
            let v = psi_transform(&m, -10f64.powf(3.0 - 0.06 * i as f64)).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let all_top = emp(vec![], 3, 1);
        assert!(psi_transform(&all_top, -1.0).is_err());
    }

    #[test]
    fn s_examples() {
        for c in [1.0, 2.5] {
            for t in [-0.7, -0.2, 0.0] {
                assert!((s_transform(&dirac(c), t).unwrap() - 1.0 / c).abs() < 1e-9);
            }
        }
        let k = 0.3;
        let b = MeasureSpec::Bernoulli01 { kappa: k };
        for t in [-0.6, -0.3, -0.1] {
            let want = (t + 1.0) / (1.0 + t - k);
            assert!((s_transform(&b, t).unwrap() - want).abs() < 1e-12);
            assert!((nu_ab_s_transform(0.0, 1.0, k, t).unwrap() - want).abs() < 1e-14);
        }
        assert!(s_transform(&b, -0.8).is_err());
        let n = 1000;
        let zeros = (k * n as f64) as usize;
        let mut atoms = vec![0.0; zeros];
        atoms.extend(vec![1.0; n - zeros]);
        let m = emp(atoms, n, 1);
        for t in [-0.6, -0.3, -0.1] {
            assert!((s_transform(&m, t).unwrap() - nu_ab_s_transform(0.0, 1.0, k, t).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn s_power_examples() {
        let args = [-0.5, -0.4, -0.3];
        let b = MeasureSpec::Bernoulli01 { kappa: 0.2 };
        let s = TransformSample::sample(TransformKind::S, &args, (-0.8, 0.0), (true, true), |t| s_transform(&b, t)).unwrap();
        assert_eq!(s_power(&s, 1.0).unwrap(), s);
        let (a, bb, k) = (1.0, 3.0, 0.1);
        let p = s_power(&s, bb / (bb - a)).unwrap();
        for (t, v) in p.points {
            assert!((v - nu_ab_s_transform(a, bb, k, t).unwrap()).abs() < 1e-10);
        }
        let c = TransformSample::new(TransformKind::S, vec![(-0.5, 0.5)], (-1.0, 0.0), (true, true)).unwrap();
        assert!((s_power(&c, 3.0).unwrap().points[0].1 - 0.125).abs() < 1e-15);
    }

    #[test]
    fn profile_paths_on_binomial() {
        let n = 400;
        let p = LogPoly::from_roots(&vec![-1.0; n], n).unwrap();
        let prof = crate::profile::empirical_profile(&p).unwrap();
        for t in [-0.7, -0.5, -0.2] {
            assert!((s_from_profile(&prof, t).unwrap() - 1.0).abs() < 1e-2);
        }
        for t in [0.2, 0.4, 0.6] {
            assert!((r_from_profile(&prof, t).unwrap() + t).abs() < 1e-2);
        }
    }

    #[test]
    fn sample_csv_and_sidecar() {
        let s = TransformSample::new(TransformKind::Psi, vec![(-2.0, -0.5), (-1.0, -0.25)], (f64::NEG_INFINITY, 0.0), (true, true)).unwrap();
        assert_eq!(s.to_csv().lines().next(), Some("arg,value"));
        assert_eq!(s.to_csv().lines().count(), 3);
        assert!(s.sidecar_json().starts_with(r#"{"kind":"psi""#));
        assert_eq!(s.monotonicity_defect(), 0.0);
        assert!(TransformSample::new(TransformKind::G, vec![(1.0, 1.0), (1.0, 2.0)], (0.0, 1.0), (true, true)).is_err());
    }
}
