//! Exponential profiles of coefficient sequences and their link to root distributions.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::closedform::MeasureSpec;
use crate::error::{Error, Result};
use crate::logpoly::{EmpiricalMeasure, LogPoly};
use crate::numeric::{bisect_increasing, fmt17, Pchip};
use crate::transforms::{TransformKind, TransformSample};

/// Sampled profile `g` on a grid inside `(m_lo, m_hi)`.
#[derive(Debug, Clone)]
pub struct Profile {
    pub m_lo: f64,
    pub m_hi: f64,
    pub grid: Vec<f64>,
    pub g: Vec<f64>,
    pub mg: f64,
    slopes: Vec<f64>,
    neg_slope: Pchip,
}

fn centered_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

impl Profile {
    pub fn new(m_lo: f64, m_hi: f64, grid: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        let slopes = if grid.len() == g.len() { centered_slopes(&grid, &g) } else { Vec::new() };
        Profile::with_slopes(m_lo, m_hi, grid, g, slopes)
    }

    /// A profile whose derivative at the grid points is known.
    pub fn with_slopes(m_lo: f64, m_hi: f64, grid: Vec<f64>, g: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if !(m_lo < m_hi) {
            return Err(Error::DegenerateInterval(m_lo));
        }
        if grid.len() < 2 || grid.len() != g.len() || slopes.len() != g.len() {
            return Err(Error::Argument("a profile needs at least two samples".into()));
        }
        if g.iter().chain(&slopes).any(|v| !v.is_finite()) {
            return Err(Error::Argument("profile values must be finite".into()));
        }
        let neg_slope = Pchip::new(grid.clone(), slopes.iter().map(|s| -s).collect())?;
        let mg = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Profile { m_lo, m_hi, grid, g, mg, slopes, neg_slope })
    }

    /// `g'` at the grid points: exact for tilting profiles, centered differences otherwise.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Range of `alpha` on which `g'` is available.
    pub fn gprime_domain(&self) -> (f64, f64) {
        self.neg_slope.domain()
    }

    /// Interpolated `g'(alpha)`.
    pub fn gprime(&self, alpha: f64) -> Result<f64> {
        let (lo, hi) = self.gprime_domain();
        if !(alpha >= lo && alpha <= hi) {
            return Err(Error::Range { x: alpha, lo, hi });
        }
        Ok(-self.neg_slope.eval(alpha))
    }

    /// Largest second difference of `g` (negative for a strictly concave sample).
    pub fn concavity_defect(&self) -> f64 {
        second_difference_max(&self.g)
    }

    /// Largest second difference of `g(alpha) + alpha log alpha`.
    pub fn entropy_shifted_defect(&self) -> f64 {
        let h: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.g)
            .map(|(a, g)| g + if *a > 0.0 { a * a.ln() } else { 0.0 })
            .collect();
        second_difference_max(&h)
    }

    /// `alpha,g,gprime_exp` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,g,gprime_exp\n");
        for ((a, g), s) in self.grid.iter().zip(&self.g).zip(&self.slopes) {
            let _ = writeln!(out, "{},{},{}", fmt17(*a), fmt17(*g), fmt17(s.exp()));
        }
        out
    }
}

fn second_difference_max(v: &[f64]) -> f64 {
    v.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::NEG_INFINITY, f64::max)
}

/// Raw profile `(logc[k] - log P(1)) / cap` on the grid `k / cap`.
pub fn empirical_profile(p: &LogPoly) -> Result<Profile> {
    let (lo, hi) = p.support();
    let n = p.cap() as f64;
    if lo == hi {
        return Err(Error::DegenerateInterval(lo as f64 / n.max(1.0)));
    }
    let l1 = p.evaluate_log(1.0)?;
    let grid = (lo..=hi).map(|k| k as f64 / n).collect();
    let g = (lo..=hi).map(|k| (p.logc()[k] - l1) / n).collect();
    Profile::new(lo as f64 / n, hi as f64 / n, grid, g)
}

/// Consecutive coefficient ratios `a_{k+1} / a_k` at `k / cap`.
pub fn ratio_derivative(p: &LogPoly) -> Result<TransformSample> {
    let (lo, hi) = p.support();
    let n = p.cap() as f64;
    if lo == hi {
        return Err(Error::DegenerateInterval(lo as f64 / n.max(1.0)));
    }
    let l = p.logc();
    let points = (lo..hi).map(|k| (k as f64 / n, (l[k + 1] - l[k]).exp())).collect();
    TransformSample::new(TransformKind::ExpGprime, points, (lo as f64 / n, (hi - 1) as f64 / n), (false, false))
}

/// `G(t) = alpha / t` with `e^{-g'(alpha)} = t`.
pub fn cauchy_from_profile(prof: &Profile, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let (lo, hi) = prof.gprime_domain();
    let (y_lo, y_hi) = (prof.neg_slope.eval(lo), prof.neg_slope.eval(hi));
    let y = t.ln();
    if !(y >= y_lo && y <= y_hi) {
        return Err(Error::Extrapolation { t, t_min: y_lo.exp(), t_max: y_hi.exp() });
    }
    let alpha = bisect_increasing(|a| prof.neg_slope.eval(a), y, lo, hi, 1e-12);
    Ok(alpha / t)
}

/// Atom locations `p` in `[0, 1]` with weights; the Bernoulli success probabilities of a root law.
#[derive(Debug, Clone)]
pub struct TiltingContext {
    /// `(p, 1 - p, weight)`; `1 - p` is stored separately to keep it exact near `p = 1`.
    atoms: Vec<(f64, f64, f64)>,
    pub m_lo: f64,
    pub m_hi: f64,
}

impl TiltingContext {
    pub fn new(probs: &[f64], weights: &[f64]) -> Result<Self> {
        if probs.len() != weights.len() || probs.is_empty() {
            return Err(Error::Argument("probabilities and weights must be nonempty and of equal length".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Argument("probabilities must lie in [0, 1], weights be nonnegative".into()));
        }
        let atoms = probs.iter().zip(weights).map(|(p, w)| (*p, 1.0 - p, *w)).collect();
        TiltingContext::from_atoms(atoms)
    }

    fn from_atoms(atoms: Vec<(f64, f64, f64)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.2).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!("weights sum to {total}")));
        }
        let at = |v: f64| atoms.iter().filter(|a| a.0 == v).map(|a| a.2).sum::<f64>();
        let (m_lo, m_hi) = (at(1.0), 1.0 - at(0.0));
        if !(m_lo < m_hi) {
            return Err(Error::DegenerateInterval(m_lo));
        }
        Ok(TiltingContext { atoms, m_lo, m_hi })
    }

    /// Pushes a root law on `[-inf, 0]` forward under `z -> 1 / (1 - z)`.
    pub fn from_measure(mu: &EmpiricalMeasure) -> Result<Self> {
        if mu.infinity_sign > 0 && mu.infinity_mass > 0.0 || mu.atoms.iter().any(|z| *z > 0.0) {
            return Err(Error::Domain("root law must live on [-inf, 0]".into()));
        }
        let w = mu.weight();
        let mut atoms: Vec<(f64, f64, f64)> = mu.atoms.iter().map(|&z| (1.0 / (1.0 - z), -z / (1.0 - z), w)).collect();
        if mu.infinity_mass > 0.0 {
            atoms.push((0.0, 1.0, mu.infinity_mass));
        }
        TiltingContext::from_atoms(atoms)
    }

    /// Finite discretizations of the reference laws on `[-inf, 0]`.
    pub fn from_spec(spec: &MeasureSpec) -> Result<Self> {
        spec.validate()?;
        let zs: Vec<(f64, f64)> = match spec {
            MeasureSpec::DiracMixture { atoms, weights } => atoms.iter().cloned().zip(weights.iter().cloned()).collect(),
            MeasureSpec::Uniform { lo, hi } => {
                let m = 20_000;
                (0..m).map(|j| (lo + (hi - lo) * (j as f64 + 0.5) / m as f64, 1.0 / m as f64)).collect()
            }
            _ => return Err(Error::Argument("tilting is available for Dirac mixtures and uniform laws".into())),
        };
        if zs.iter().any(|(z, _)| *z > 0.0) {
            return Err(Error::Domain("root law must live on [-inf, 0]".into()));
        }
        TiltingContext::from_atoms(zs.into_iter().map(|(z, w)| (1.0 / (1.0 - z), -z / (1.0 - z), w)).collect())
    }

    /// `Psi(t) = int log(1 - p + p t) dM(p)`.
    pub fn psi(&self, t: f64) -> f64 {
        self.atoms.iter().map(|(p, q, w)| if *w > 0.0 { w * (q + p * t).ln() } else { 0.0 }).sum()
    }

    /// `Phi(t) = t Psi'(t)`, the mean of the tilted law.
    pub fn phi(&self, t: f64) -> f64 {
        self.atoms.iter().map(|(p, q, w)| w * p * t / (q + p * t)).sum()
    }

    /// `theta` with `Phi(theta) = alpha`.
    pub fn theta(&self, alpha: f64) -> Result<f64> {
        if !(alpha > self.m_lo && alpha < self.m_hi) {
            return Err(Error::Range { x: alpha, lo: self.m_lo, hi: self.m_hi });
        }
        let f = |x: f64| self.phi(x.exp());
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while f(lo) >= alpha && lo > -740.0 {
            lo *= 2.0;
        }
        while f(hi) <= alpha && hi < 700.0 {
            hi *= 2.0;
        }
        Ok(bisect_increasing(f, alpha, lo, hi, 1e-13).exp())
    }

    /// `theta` for the mean `k / n`.
    pub fn theta_star(&self, k: usize, n: usize) -> Result<f64> {
        self.theta(k as f64 / n as f64)
    }

    /// `g(alpha) = Psi(theta) - alpha log theta`.
    pub fn g_at(&self, alpha: f64) -> Result<f64> {
        let th = self.theta(alpha)?;
        Ok(self.psi(th) - alpha * th.ln())
    }

    /// Profile on `points` uniform cells strictly inside `(m_lo, m_hi)`.
    pub fn profile(&self, points: usize) -> Result<Profile> {
        let w = self.m_hi - self.m_lo;
        let grid: Vec<f64> = (0..points).map(|i| self.m_lo + w * (i as f64 + 0.5) / points as f64).collect();
        // g'(alpha) = -log theta(alpha) exactly, since theta is the optimizer of the Legendre transform
        let pairs = grid
            .par_iter()
            .map(|a| {
                let th = self.theta(*a)?;
                Ok((self.psi(th) - a * th.ln(), -th.ln()))
            })
            .collect::<Result<Vec<_>>>()?;
        let (g, slopes) = pairs.into_iter().unzip();
        Profile::with_slopes(self.m_lo, self.m_hi, grid, g, slopes)
    }
}

pub const PROFILE_GRID: usize = 512;

/// Profile of a root law on `[-inf, 0]`.
pub fn profile_from_measure(mu: &EmpiricalMeasure) -> Result<Profile> {
    TiltingContext::from_measure(mu)?.profile(PROFILE_GRID)
}

/// Profile of a reference law on `[-inf, 0]`.
pub fn profile_from_spec(spec: &MeasureSpec) -> Result<Profile> {
    TiltingContext::from_spec(spec)?.profile(PROFILE_GRID)
}

pub fn theta_star(ctx: &TiltingContext, k: usize, n: usize) -> Result<f64> {
    ctx.theta_star(k, n)
}

/// Exponentially tilted success probabilities `theta p / (1 - p + p theta)`.
pub fn tilt(probs: &[f64], theta: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    Ok(probs
        .iter()
        .map(|&p| if p == 0.0 || p == 1.0 { p } else { theta * p / (1.0 - p + p * theta) })
        .collect())
}

/// `sup_i f_i + x_i u` over a concave sample.
pub fn legendre(x: &[f64], f: &[f64], u: f64) -> Result<f64> {
    if x.is_empty() || x.len() != f.len() {
        return Err(Error::Argument("legendre needs matching nonempty samples".into()));
    }
    let slopes: Vec<f64> = x.windows(2).zip(f.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect();
    if let Some(i) = slopes.windows(2).position(|s| s[1] > s[0] + 1e-6) {
        return Err(Error::Shape(format!("sample is not concave near x = {}", x[i + 1])));
    }
    Ok(x.iter().zip(f).map(|(a, v)| v + a * u).fold(f64::NEG_INFINITY, f64::max))
}
