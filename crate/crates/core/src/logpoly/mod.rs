//! Log-domain polynomials with nonpositive real roots.
//!
//! A [`LogPoly`] stores `log a_k` for the coefficients of `P(x) = sum a_k x^k`, all
//! `a_k >= 0`. With `reflected = true` the object stands for `(-1)^n P(-x)`, a
//! polynomial with nonnegative roots. Besides the floating coefficients every
//! value remembers how it was built; root extraction replays that history in
//! exact integer arithmetic, because evaluating `P` at negative arguments from
//! rounded coefficients loses all accuracy once the degree reaches a few dozen.

mod hpeval;
mod intpoly;
mod modgcd;
mod rootfind;
mod shadow;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, log_add, logsumexp};
pub use shadow::Recipe;
pub(crate) use shadow::{Node, Shadow};

/// Polynomial with nonnegative coefficients stored as natural logarithms.
#[derive(Debug, Clone)]
pub struct LogPoly {
    cap: usize,
    reflected: bool,
    logc: Vec<f64>,
    shadow: Arc<Shadow>,
}

/// Empirical distribution of the roots: weight `1/cap` per root, the rest at a signed infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<f64>,
    pub cap: usize,
    pub infinity_mass: f64,
    pub infinity_sign: i8,
}

impl EmpiricalMeasure {
    pub fn weight(&self) -> f64 {
        1.0 / self.cap as f64
    }

    /// Mass of the finite atoms equal to `x`.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|&&a| a == x).count() as f64 * self.weight()
    }
}

fn check_logc(logc: &[f64]) -> Result<(usize, usize)> {
    if logc.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::Argument("log coefficients must be finite or -inf".into()));
    }
    let lo = logc
        .iter()
        .position(|v| v.is_finite())
        .ok_or_else(|| Error::ZeroPolynomial("no finite coefficient".into()))?;
    let hi = logc.iter().rposition(|v| v.is_finite()).unwrap();
    if logc[lo..=hi].iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("finite coefficients must occupy a contiguous range".into()));
    }
    Ok((lo, hi))
}

impl LogPoly {
    /// Builds from raw log coefficients; roots are then computed from their dyadic rounding.
    pub fn from_logc(cap: usize, reflected: bool, logc: Vec<f64>) -> Result<Self> {
        if logc.len() != cap + 1 {
            return Err(Error::Argument(format!("expected {} log coefficients, got {}", cap + 1, logc.len())));
        }
        check_logc(&logc)?;
        let shadow = Shadow::new(Node::Dyadic(logc.clone()));
        Ok(LogPoly { cap, reflected, logc, shadow })
    }

    pub(crate) fn from_parts(cap: usize, reflected: bool, logc: Vec<f64>, shadow: Arc<Shadow>) -> Result<Self> {
        debug_assert_eq!(logc.len(), cap + 1);
        check_logc(&logc)?;
        Ok(LogPoly { cap, reflected, logc, shadow })
    }

    /// `prod (x - r)` over nonpositive roots, normalized at degree `cap`.
    pub fn from_roots(roots: &[f64], cap: usize) -> Result<Self> {
        if let Some(r) = roots.iter().find(|r| !(**r <= 0.0) || !r.is_finite()) {
            return Err(Error::Domain(format!("root {r} is not a finite nonpositive number")));
        }
        if cap < roots.len() {
            return Err(Error::Argument(format!("cap {cap} is below the number of roots {}", roots.len())));
        }
        let mut logc = vec![f64::NEG_INFINITY; cap + 1];
        logc[0] = 0.0;
        for (i, &r) in roots.iter().enumerate() {
            let lr = (-r).ln();
            for k in (0..=i + 1).rev() {
                let shifted = if k > 0 { logc[k - 1] } else { f64::NEG_INFINITY };
                logc[k] = log_add(shifted, logc[k] + lr);
            }
        }
        let shadow = Shadow::new(Node::Roots(roots.to_vec()));
        LogPoly::from_parts(cap, false, logc, shadow)
    }

    /// `prod (x - r)` over nonnegative roots, stored reflected.
    pub fn from_nonneg_roots(roots: &[f64], cap: usize) -> Result<Self> {
        if let Some(r) = roots.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
            return Err(Error::Domain(format!("root {r} is not a finite nonnegative number")));
        }
        let neg: Vec<f64> = roots.iter().map(|r| -r).collect();
        Ok(LogPoly::from_roots(&neg, cap)?.with_reflected(true))
    }

    /// Same coefficients with the reflection flag replaced.
    pub fn with_reflected(mut self, reflected: bool) -> Self {
        self.reflected = reflected;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn reflected(&self) -> bool {
        self.reflected
    }

    pub fn logc(&self) -> &[f64] {
        &self.logc
    }

    pub(crate) fn shadow(&self) -> &Arc<Shadow> {
        &self.shadow
    }

    /// Exact construction history.
    pub fn recipe(&self) -> Recipe {
        self.shadow.to_recipe()
    }

    /// Whether both coefficient polynomials agree up to a positive factor, decided exactly
    /// from the construction histories.
    pub fn exactly_proportional(&self, other: &LogPoly) -> Result<bool> {
        Ok(self.reflected == other.reflected && self.shadow.poly()?.proportional(&*other.shadow.poly()?))
    }

    /// Index range `[lo, hi]` of the nonzero coefficients.
    pub fn support(&self) -> (usize, usize) {
        check_logc(&self.logc).expect("invariant: nonzero polynomial")
    }

    pub fn degree(&self) -> usize {
        self.support().1
    }

    /// Largest violation of `logc[k-1] + logc[k+1] <= 2 logc[k]` on the support (0 if none).
    pub fn log_concavity_defect(&self) -> f64 {
        let (lo, hi) = self.support();
        (lo + 1..hi)
            .map(|k| self.logc[k - 1] + self.logc[k + 1] - 2.0 * self.logc[k])
            .fold(0.0, f64::max)
    }

    /// `log P(x)` for `x > 0`.
    pub fn evaluate_log(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("evaluate_log needs x > 0, got {x}")));
        }
        let lx = x.ln();
        let terms: Vec<f64> = self.logc.iter().enumerate().map(|(k, c)| c + k as f64 * lx).collect();
        Ok(logsumexp(&terms))
    }

    /// Sign and `log |P(x)|` of the coefficient polynomial at any real `x`.
    ///
    /// Reports sign 0 when the positive and negative groups cancel to within
    /// `1e-14` of the larger one.
    pub fn evaluate_signed(&self, x: f64) -> (i8, f64) {
        if x == 0.0 {
            return if self.logc[0].is_finite() { (1, self.logc[0]) } else { (0, f64::NEG_INFINITY) };
        }
        let lx = x.abs().ln();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (k, c) in self.logc.iter().enumerate() {
            if c.is_finite() {
                let t = c + k as f64 * lx;
                if x < 0.0 && k % 2 == 1 {
                    neg.push(t)
                } else {
                    pos.push(t)
                }
            }
        }
        let (lp, ln) = (logsumexp(&pos), logsumexp(&neg));
        let big = lp.max(ln);
        let diff = if lp >= ln { 1.0 - (ln - lp).exp() } else { 1.0 - (lp - ln).exp() };
        if diff <= 1e-14 {
            return (0, f64::NEG_INFINITY);
        }
        (if lp >= ln { 1 } else { -1 }, big + diff.ln())
    }

    /// Roots of the coefficient polynomial (all nonpositive), ascending, with multiplicity.
    ///
    /// Each root carries a certified isolating bracket of width at most `1e-12 (1 + |r|)`.
    pub fn roots(&self) -> Result<Vec<f64>> {
        let r = self.shadow.roots()?;
        let deg = self.degree();
        if r.len() != deg {
            return Err(Error::Consistency(format!("exact history has {} roots, coefficients have degree {deg}", r.len())));
        }
        Ok((*r).clone())
    }

    /// The `b`-th derivative, normalized at degree `cap - b`.
    pub fn derivative(&self, b: usize) -> Result<Self> {
        let deg = self.degree();
        if deg < b {
            return Err(Error::Degree(format!("derivative of order {b} of a degree-{deg} polynomial is zero")));
        }
        let logc = (0..=self.cap - b)
            .map(|k| self.logc[k + b] + ln_factorial(k + b) - ln_factorial(k))
            .collect();
        let shadow = Shadow::derivative(&self.shadow, b);
        LogPoly::from_parts(self.cap - b, self.reflected, logc, shadow)
    }

    /// `n^{-b} z^a (d/dz)^b` with `n = scale_n`; the cap moves by `a - b`.
    pub fn apply_aab(&self, a: usize, b: usize, scale_n: usize) -> Result<Self> {
        if scale_n == 0 {
            return Err(Error::Argument("scale_n must be positive".into()));
        }
        let deg = self.degree();
        if deg < b {
            return Err(Error::Degree(format!("z^{a} (d/dz)^{b} annihilates a degree-{deg} polynomial")));
        }
        let cap = self.cap as i64 + a as i64 - b as i64;
        if cap < 0 {
            return Err(Error::Degree("normalization degree would become negative".into()));
        }
        let mut logc = vec![f64::NEG_INFINITY; cap as usize + 1];
        let ln_n = (scale_n as f64).ln();
        for j in b..=self.cap {
            let t = j + a - b;
            logc[t] = self.logc[j] + ln_factorial(j) - ln_factorial(j - b) - b as f64 * ln_n;
        }
        let shadow = Shadow::aab(&self.shadow, a, b);
        LogPoly::from_parts(cap as usize, self.reflected, logc, shadow)
    }

    /// Same polynomial normalized at a different `cap >= degree`.
    pub fn recapped(&self, cap: usize) -> Result<Self> {
        let deg = self.degree();
        if cap < deg {
            return Err(Error::Degree(format!("cap {cap} is below the degree {deg}")));
        }
        let mut logc = vec![f64::NEG_INFINITY; cap + 1];
        logc[..=deg].copy_from_slice(&self.logc[..=deg]);
        LogPoly::from_parts(cap, self.reflected, logc, self.shadow.clone())
    }

    /// Multiplies by `x^s` (`s > 0`) or divides by `x^{-s}`; the cap moves by `s`.
    pub fn shift(&self, s: i64) -> Result<Self> {
        let cap = self.cap as i64 + s;
        let (lo, _) = self.support();
        if s < 0 && (lo as i64) < -s {
            return Err(Error::Precondition(format!("polynomial is not divisible by x^{}", -s)));
        }
        let mut logc = vec![f64::NEG_INFINITY; cap as usize + 1];
        for (k, c) in self.logc.iter().enumerate() {
            let t = k as i64 + s;
            if t >= 0 && (t as usize) < logc.len() {
                logc[t as usize] = *c;
            }
        }
        LogPoly::from_parts(cap as usize, self.reflected, logc, Shadow::shift(&self.shadow, s))
    }

    /// Empirical root distribution; reflected polynomials give nonnegative atoms and mass at `+inf`.
    pub fn empirical_measure(&self) -> Result<EmpiricalMeasure> {
        if self.cap == 0 {
            return Err(Error::Argument("empirical measure needs cap >= 1".into()));
        }
        let mut atoms = self.roots()?;
        if self.reflected {
            atoms = atoms.iter().rev().map(|r| -r).collect();
        }
        let infinity_mass = (self.cap - atoms.len()) as f64 / self.cap as f64;
        Ok(EmpiricalMeasure {
            atoms,
            cap: self.cap,
            infinity_mass,
            infinity_sign: if self.reflected { 1 } else { -1 },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LogPolyJson {
            cap: self.cap,
            reflected: self.reflected,
            logc: self.logc.clone(),
            exact: Some(self.recipe()),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: LogPolyJson = serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))?;
        if j.logc.len() != j.cap + 1 {
            return Err(Error::Argument(format!("expected {} log coefficients, got {}", j.cap + 1, j.logc.len())));
        }
        let shadow = match &j.exact {
            Some(r) => Shadow::from_recipe(r),
            None => Shadow::new(Node::Dyadic(j.logc.clone())),
        };
        LogPoly::from_parts(j.cap, j.reflected, j.logc, shadow)
    }
}

#[derive(Serialize, Deserialize)]
struct LogPolyJson {
    cap: usize,
    reflected: bool,
    #[serde(with = "logc_serde")]
    logc: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<Recipe>,
}

/// Numbers, with `-inf` written as the string `"-inf"`.
pub(crate) mod logc_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let vals: Vec<Value> = v
            .iter()
            .map(|x| if x.is_finite() { Value::from(*x) } else { Value::from("-inf") })
            .collect();
        vals.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let vals = Vec::<Value>::deserialize(d)?;
        vals.into_iter()
            .map(|v| match v {
                Value::Number(n) => n.as_f64().ok_or_else(|| D::Error::custom("bad number")),
                Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("unexpected log coefficient {other}"))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x - y).abs() <= tol)
    }

    #[test]
    fn from_roots_examples() {
        let p = LogPoly::from_roots(&[-1.0, -1.0], 2).unwrap();
        assert!(close(p.logc(), &[0.0, 2f64.ln(), 0.0], 1e-15));
        let c = LogPoly::from_roots(&[], 5).unwrap();
        assert_eq!(c.logc()[0], 0.0);
        assert!(c.logc()[1..].iter().all(|v| *v == f64::NEG_INFINITY));
        let q = LogPoly::from_roots(&[-1.0, -2.0, -3.0], 3).unwrap();
        assert!(close(q.logc(), &[6f64.ln(), 11f64.ln(), 6f64.ln(), 0.0], 1e-14));
        assert!(matches!(LogPoly::from_roots(&[0.5], 1), Err(Error::Domain(_))));
        assert!(matches!(LogPoly::from_roots(&[-1.0, -2.0], 1), Err(Error::Argument(_))));
    }

    #[test]
    fn evaluate_examples() {
        let p = LogPoly::from_roots(&[-1.0, -1.0], 2).unwrap();
        assert!((p.evaluate_log(1.0).unwrap() - 4f64.ln()).abs() < 1e-15);
        let c = LogPoly::from_roots(&[], 0).unwrap();
        assert_eq!(c.evaluate_log(7.0).unwrap(), 0.0);
        let q = LogPoly::from_logc(3, false, vec![6f64.ln(), 11f64.ln(), 6f64.ln(), 0.0]).unwrap();
        assert!((q.evaluate_log(2.0).unwrap() - 60f64.ln()).abs() < 1e-14);
        assert!(p.evaluate_log(-1.0).is_err());

        let (s, l) = p.evaluate_signed(-2.0);
        assert_eq!(s, 1);
        assert!(l.abs() < 1e-14);
        let r = LogPoly::from_roots(&[-1.0, -3.0], 2).unwrap();
        let (s, l) = r.evaluate_signed(-2.0);
        assert_eq!(s, -1);
        assert!(l.abs() < 1e-14);
        assert_eq!(p.evaluate_signed(-1.0), (0, f64::NEG_INFINITY));
    }

    #[test]
    fn roots_examples() {
        let p = LogPoly::from_roots(&[-2.0, -2.0], 2).unwrap();
        assert_eq!(p.roots().unwrap(), vec![-2.0, -2.0]);
        let q = LogPoly::from_logc(3, false, vec![6f64.ln(), 11f64.ln(), 6f64.ln(), 0.0]).unwrap();
        let r = q.roots().unwrap();
        assert!(close(&r, &[-3.0, -2.0, -1.0], 1e-10));
    }

    #[test]
    fn derivative_examples() {
        let p = LogPoly::from_roots(&[-1.0, -1.0], 2).unwrap();
        let d = p.derivative(1).unwrap();
        assert!(close(d.logc(), &[2f64.ln(), 2f64.ln()], 1e-15));
        assert_eq!(d.roots().unwrap(), vec![-1.0]);
        let q = LogPoly::from_roots(&[-1.0, -2.0, -3.0], 3).unwrap();
        let d2 = q.derivative(2).unwrap();
        assert!(close(d2.logc(), &[12f64.ln(), 6f64.ln()], 1e-14));
        let d3 = q.derivative(3).unwrap();
        assert_eq!(d3.cap(), 0);
        assert!((d3.logc()[0] - 6f64.ln()).abs() < 1e-14);
        assert!(matches!(q.derivative(4), Err(Error::Degree(_))));
    }

    #[test]
    fn aab_examples() {
        let n = 10;
        let p = LogPoly::from_roots(&[-1.0; 10], n).unwrap();
        let e = p.apply_aab(1, 1, n).unwrap();
        for k in 1..=n {
            let want = p.logc()[k] + (k as f64 / n as f64).ln();
            assert!((e.logc()[k] - want).abs() < 1e-13);
        }
        let d = p.apply_aab(0, 1, n).unwrap();
        let dd = p.derivative(1).unwrap();
        for k in 0..n {
            assert!((d.logc()[k] - (dd.logc()[k] - (n as f64).ln())).abs() < 1e-13);
        }
        assert_eq!(d.roots().unwrap(), vec![-1.0; 9]);
    }

    #[test]
    fn empirical_measure_examples() {
        let p = LogPoly::from_roots(&[-2.0, -2.0], 2).unwrap();
        let m = p.empirical_measure().unwrap();
        assert_eq!((m.atoms.clone(), m.weight(), m.infinity_mass), (vec![-2.0, -2.0], 0.5, 0.0));
        let q = LogPoly::from_roots(&[-1.0], 2).unwrap();
        let m = q.empirical_measure().unwrap();
        assert_eq!((m.atoms.clone(), m.infinity_mass, m.infinity_sign), (vec![-1.0], 0.5, -1));
        let r = LogPoly::from_nonneg_roots(&[1.0, 3.0], 3).unwrap();
        let m = r.empirical_measure().unwrap();
        assert_eq!((m.atoms.clone(), m.infinity_sign), (vec![1.0, 3.0], 1));
    }

    #[test]
    fn json_round_trip() {
        let p = LogPoly::from_roots(&[-0.1, -1.0 / 3.0, 0.0], 4).unwrap().derivative(1).unwrap();
        let s = p.to_json();
        let q = LogPoly::from_json(&s).unwrap();
        assert_eq!(q.logc(), p.logc());
        assert_eq!((q.cap(), q.reflected()), (p.cap(), p.reflected()));
        assert_eq!(q.recipe(), p.recipe());
        assert_eq!(q.roots().unwrap(), p.roots().unwrap());
        let bare = r#"{"cap":2,"reflected":false,"logc":[0,0.6931471805599453,0]}"#;
        assert_eq!(LogPoly::from_json(bare).unwrap().roots().unwrap(), vec![-1.0, -1.0]);
        let inf = r#"{"cap":2,"reflected":true,"logc":[0,"-inf","-inf"]}"#;
        assert_eq!(LogPoly::from_json(inf).unwrap().degree(), 0);
    }
}
