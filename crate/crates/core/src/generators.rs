//! Root generators shared by the command line and the experiment suite.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::logpoly::LogPoly;

/// Source of a root multiset.
#[derive(Debug, Clone, PartialEq)]
pub enum RootSpec {
    /// `n` points `lo + j (hi - lo) / n`, `j = 0..n`.
    UniformGrid { lo: f64, hi: f64 },
    Dirac { value: f64, count: usize },
    /// `-j / n`, `j = 0..n`: the rising factorial `x (x + 1/n) ... (x + (n-1)/n)`.
    Stirling,
    /// `n` roots at `-1`.
    Binomial,
    /// One root per line; blank lines and lines starting with `#` are skipped.
    File(PathBuf),
}

impl RootSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("bad root generator {s:?}"));
        let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(RootSpec::File(PathBuf::from(path)));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["uniform_grid", lo, hi] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if !(lo < hi) {
                    return Err(bad());
                }
                Ok(RootSpec::UniformGrid { lo, hi })
            }
            ["dirac", v, c] => Ok(RootSpec::Dirac { value: num(v)?, count: c.parse().map_err(|_| bad())? }),
            ["stirling"] => Ok(RootSpec::Stirling),
            ["binomial"] => Ok(RootSpec::Binomial),
            _ => Err(bad()),
        }
    }

    /// Roots for degree parameter `n` (ignored by `dirac` and `file`).
    pub fn generate(&self, n: usize) -> Result<Vec<f64>> {
        Ok(match self {
            RootSpec::UniformGrid { lo, hi } => uniform_grid(*lo, *hi, n),
            RootSpec::Dirac { value, count } => vec![*value; *count],
            RootSpec::Stirling => (0..n).map(|j| -(j as f64) / n as f64).collect(),
            RootSpec::Binomial => vec![-1.0; n],
            RootSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| l.parse::<f64>().map_err(|_| Error::Argument(format!("bad root {l:?}"))))
                    .collect::<Result<_>>()?
            }
        })
    }
}

/// `lo + j (hi - lo) / n` for `j = 0..n`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect()
}

/// Polynomial with the given roots, stored reflected when they are nonnegative and not all zero.
pub fn poly_from_roots(roots: &[f64], cap: usize) -> Result<LogPoly> {
    if roots.iter().all(|r| *r <= 0.0) {
        LogPoly::from_roots(roots, cap)
    } else if roots.iter().all(|r| *r >= 0.0) {
        LogPoly::from_nonneg_roots(roots, cap)
    } else {
        Err(Error::Domain("roots must all be nonpositive or all nonnegative".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_generate() {
        let g = RootSpec::parse("uniform_grid:-1:0").unwrap();
        let r = g.generate(4).unwrap();
        assert_eq!(r, vec![-1.0, -0.75, -0.5, -0.25]);
        assert_eq!(RootSpec::parse("dirac:-1:50").unwrap().generate(7).unwrap(), vec![-1.0; 50]);
        assert_eq!(RootSpec::parse("stirling").unwrap().generate(2).unwrap(), vec![-0.0, -0.5]);
        assert!(RootSpec::parse("uniform_grid:1:0").is_err());
        assert!(RootSpec::parse("gauss:0:1").is_err());
        let p = poly_from_roots(&uniform_grid(0.0, 1.0, 4), 4).unwrap();
        assert!(p.reflected());
        assert!(poly_from_roots(&[-1.0, 1.0], 2).is_err());
    }
}
