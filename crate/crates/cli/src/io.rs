use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use profilekit_core::generators::{poly_from_roots, RootSpec};
use profilekit_core::numeric::fmt17;
use profilekit_core::LogPoly;

use crate::Source;

pub const MAX_N: usize = 5000;

/// Invalid invocation; reported with exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

pub fn check_n(n: usize) -> anyhow::Result<()> {
    if n > MAX_N {
        return Err(usage(format!("n = {n} exceeds the limit {MAX_N}")));
    }
    Ok(())
}

pub fn read_poly(path: &Path) -> anyhow::Result<LogPoly> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?
    };
    let p = LogPoly::from_json(&text).with_context(|| format!("bad polynomial file {}", path.display()))?;
    check_n(p.cap())?;
    Ok(p)
}

/// Roots from a generator; `n` defaults to the root count for `dirac` and `file`.
pub fn generate(spec: &str, n: Option<usize>) -> anyhow::Result<(Vec<f64>, usize)> {
    let g = RootSpec::parse(spec).map_err(|e| usage(e.to_string()))?;
    let fixed = matches!(g, RootSpec::Dirac { .. } | RootSpec::File(_));
    let n = match (n, fixed) {
        (Some(n), _) => n,
        (None, true) => 0,
        (None, false) => return Err(usage(format!("--n is required for {spec}"))),
    };
    check_n(n)?;
    let roots = g.generate(n)?;
    let cap = if fixed && n == 0 { roots.len() } else { n };
    check_n(cap)?;
    if roots.len() > cap {
        return Err(usage(format!("{} roots do not fit in degree {cap}", roots.len())));
    }
    Ok((roots, cap))
}

impl Source {
    pub fn given(&self) -> bool {
        self.input.is_some() || self.roots.is_some()
    }

    pub fn load(&self) -> anyhow::Result<LogPoly> {
        match (&self.input, &self.roots) {
            (Some(path), _) => {
                let p = read_poly(path)?;
                if let Some(n) = self.n {
                    if n != p.cap() {
                        return Ok(p.recapped(n)?);
                    }
                }
                Ok(p)
            }
            (None, Some(spec)) => {
                let (roots, cap) = generate(spec, self.n)?;
                Ok(poly_from_roots(&roots, cap)?)
            }
            (None, None) => Err(usage("one of --input or --roots is required")),
        }
    }
}

pub fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// CSV with a header; every float is written with 17 significant digits.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn f(x: f64) -> String {
    fmt17(x)
}

/// `LO:HI:COUNT` with `COUNT >= 1`.
pub fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let bad = || usage(format!("bad grid {s:?}; expected LO:HI:COUNT"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    let count: usize = count.parse().map_err(|_| bad())?;
    if count == 0 || !(lo <= hi) || (count > 1 && lo == hi) || count > 1_000_000 {
        return Err(bad());
    }
    Ok(linspace(lo, hi, count))
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
