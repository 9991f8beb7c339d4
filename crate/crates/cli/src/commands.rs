use std::time::Instant;

use anyhow::{bail, Context};
use profilekit_core::closedform::{mu_kappa_support, nu_aa_support_end, nu_ab_atom_at_zero, nu_ab_s_transform};
use profilekit_core::freeconv::{boxplus_n, boxtimes_n, hadamard_n, repeated_action, t_poly};
use profilekit_core::profile::{empirical_profile, profile_from_spec};
use profilekit_core::suite;
use profilekit_core::transforms::{cauchy, psi_transform, r_from_profile, r_transform, s_from_profile, s_transform};
use profilekit_core::{EmpiricalMeasure, LogPoly, Measure, MeasureSpec, TransformKind, TransformSample};

use crate::io::{check_n, csv_text, emit, f, linspace, parse_grid, read_poly, usage};
use crate::{CompareArgs, ConvArgs, ConvOp, DiffArgs, MakeArgs, ProfileArgs, RootsArgs, SuiteArgs, TransformArgs};

fn parse_spec(s: &str) -> anyhow::Result<MeasureSpec> {
    MeasureSpec::parse(s).map_err(|e| usage(e.to_string()))
}

fn write_poly(p: &LogPoly, out: &Option<std::path::PathBuf>) -> anyhow::Result<()> {
    let mut text = p.to_json();
    text.push('\n');
    emit(out, &text)
}

pub fn make(args: MakeArgs) -> anyhow::Result<bool> {
    let p = match &args.t_poly {
        Some(s) => {
            let v: Vec<usize> = s
                .split(':')
                .map(|x| x.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| usage(format!("bad --t-poly {s:?}; expected N:ELL:A:B")))?;
            let [n, ell, a, b] = v.as_slice() else {
                return Err(usage(format!("bad --t-poly {s:?}; expected N:ELL:A:B")));
            };
            check_n(*n)?;
            t_poly(*n, *ell, *a, *b)?
        }
        None => args.source.load()?,
    };
    write_poly(&p, &args.out)?;
    Ok(true)
}

pub fn profile(args: ProfileArgs) -> anyhow::Result<bool> {
    let prof = match &args.measure {
        Some(s) => profile_from_spec(&parse_spec(s)?)?,
        None => empirical_profile(&args.source.load()?)?,
    };
    emit(&args.out, &prof.to_csv())?;
    Ok(true)
}

pub fn roots(args: RootsArgs) -> anyhow::Result<bool> {
    let m = args.source.load()?.empirical_measure()?;
    emit(&args.out, &csv_text(&["root"], m.atoms.iter().map(|x| vec![f(*x)]))?)?;
    Ok(true)
}

pub fn conv(args: ConvArgs) -> anyhow::Result<bool> {
    let (p, q) = (read_poly(&args.left)?, read_poly(&args.right)?);
    let n = args.n.unwrap_or(p.cap());
    check_n(n)?;
    let r = match args.op {
        ConvOp::Boxplus => {
            let r = boxplus_n(&p, &q, n)?;
            let want = p.degree() + q.degree() - n;
            if r.degree() != want {
                bail!("degree law violated: got {}, expected {want}", r.degree());
            }
            r
        }
        ConvOp::Boxtimes => boxtimes_n(&p, &q, n)?,
        ConvOp::Hadamard => hadamard_n(&p, &q)?,
    };
    write_poly(&r, &args.out)?;
    Ok(true)
}

/// The `ell`-fold action normalized at degree `max(n, n + (a - b) ell)`; lost degree is mass at infinity.
pub fn diff(args: DiffArgs) -> anyhow::Result<bool> {
    let q = args.source.load()?;
    let n = q.cap();
    let delta = args.a as i64 - args.b as i64;
    let aligned = repeated_action(&q, args.a, args.b, args.ell, n)?;
    let acted = aligned.shift(delta * args.ell as i64)?;
    let out = if acted.cap() < n { acted.recapped(n)? } else { acted };
    check_n(out.cap())?;
    write_poly(&out, &args.out)?;
    Ok(true)
}

fn reflect(m: EmpiricalMeasure) -> EmpiricalMeasure {
    EmpiricalMeasure {
        atoms: m.atoms.iter().rev().map(|x| -x).collect(),
        cap: m.cap,
        infinity_mass: m.infinity_mass,
        infinity_sign: -m.infinity_sign,
    }
}

pub fn transform(args: TransformArgs) -> anyhow::Result<bool> {
    let kind: TransformKind = args.kind.parse().map_err(|e: profilekit_core::Error| usage(e.to_string()))?;
    if kind == TransformKind::ExpGprime {
        return Err(usage("--kind must be one of G, R, S, psi"));
    }
    let grid = parse_grid(&args.t_grid)?;
    let domain = (grid[0], grid[grid.len() - 1]);
    let sample = if args.from_profile {
        if args.measure.is_some() {
            return Err(usage("--from-profile needs a polynomial"));
        }
        let prof = empirical_profile(&args.source.load()?)?;
        match kind {
            TransformKind::R => TransformSample::sample(kind, &grid, domain, (false, false), |t| r_from_profile(&prof, t))?,
            TransformKind::S => TransformSample::sample(kind, &grid, domain, (false, false), |t| s_from_profile(&prof, t))?,
            _ => return Err(usage("--from-profile supports R and S only")),
        }
    } else {
        let mu: Box<dyn Measure + Sync> = match &args.measure {
            Some(s) => Box::new(parse_spec(s)?),
            None => {
                let m = args.source.load()?.empirical_measure()?;
                Box::new(if args.reflect { reflect(m) } else { m })
            }
        };
        let mu = &*mu;
        TransformSample::sample(kind, &grid, domain, (false, false), |t| match kind {
            TransformKind::G => cauchy(mu, t),
            TransformKind::R => r_transform(mu, t),
            TransformKind::S => s_transform(mu, t),
            _ => psi_transform(mu, t),
        })?
    };
    emit(&args.out, &sample.to_csv())?;
    if let Some(path) = &args.sidecar {
        std::fs::write(path, sample.sidecar_json() + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(true)
}

fn parse_affine(s: &str) -> anyhow::Result<(f64, f64)> {
    let bad = || usage(format!("bad --affine {s:?}; expected SCALE:SHIFT"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn compare(args: CompareArgs) -> anyhow::Result<bool> {
    let start = Instant::now();
    let spec = parse_spec(&args.closed_form)?;
    if !(args.tol >= 0.0) {
        return Err(usage("--tol must be nonnegative"));
    }
    let p = args.source.load()?;
    let m = p.empirical_measure()?;
    let default_affine = if matches!(spec, MeasureSpec::MuKappa { .. }) { (2.0, -1.0) } else { (1.0, 0.0) };
    let (scale, shift) = match &args.affine {
        Some(s) => parse_affine(s)?,
        None => default_affine,
    };
    let mut atoms: Vec<f64> = m.atoms.iter().map(|x| scale * x + shift).collect();
    atoms.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    let mapped = EmpiricalMeasure { atoms, ..m };

    let s_mode = matches!(spec, MeasureSpec::NuAbKappa { a, b, .. } if a != b);
    let grid = match &args.t_grid {
        Some(g) => parse_grid(g)?,
        None => default_grid(&spec, &mapped)?,
    };
    let mut rows = Vec::with_capacity(grid.len() + 1);
    let (mut sup, mut sum) = (0.0f64, 0.0);
    for &t in &grid {
        let (emp, cf) = if let (true, MeasureSpec::NuAbKappa { a, b, kappa }) = (s_mode, &spec) {
            (s_transform(&mapped, t)?, nu_ab_s_transform(*a, *b, *kappa, t)?)
        } else {
            (cauchy(&mapped, t)?, spec.cauchy(t)?)
        };
        let err = (emp - cf).abs();
        sup = sup.max(err);
        sum += err;
        rows.push(vec![f(t), f(emp), f(cf), f(err), String::new(), String::new(), String::new(), String::new()]);
    }
    let mean = sum / grid.len() as f64;
    let secs = start.elapsed().as_secs_f64();
    rows.push(vec![
        "summary".into(),
        String::new(),
        String::new(),
        String::new(),
        f(sup),
        f(mean),
        p.cap().to_string(),
        format!("{secs:.3}"),
    ]);
    let header = ["arg", "empirical", "closed_form", "abs_error", "sup_error", "mean_error", "n", "runtime_s"];
    emit(&args.out, &csv_text(&header, rows)?)?;
    let passed = sup <= args.tol;
    eprintln!(
        "{} {}: sup error {sup:.3e}, mean error {mean:.3e}, tolerance {:.1e}",
        if passed { "PASS" } else { "FAIL" },
        args.closed_form,
        args.tol
    );
    Ok(passed)
}

/// Grid to the right of both supports, where the transforms are smooth.
fn default_grid(spec: &MeasureSpec, m: &EmpiricalMeasure) -> anyhow::Result<Vec<f64>> {
    Ok(match spec {
        MeasureSpec::MuKappa { kappa } => {
            let edge = mu_kappa_support(*kappa)?.1;
            linspace(1.5 * edge, 2.0 * edge, 11)
        }
        MeasureSpec::NuAbKappa { a, b, kappa } if a != b => {
            let top = nu_ab_atom_at_zero(*a, *b, *kappa) - 1.0;
            linspace(0.8 * top, 0.2 * top, 11)
        }
        MeasureSpec::NuAbKappa { a, kappa, .. } => {
            let right = nu_aa_support_end(*a, *kappa).max(1.0).max(m.hull().map_or(0.0, |h| h.1));
            linspace(right + 1.0, right + 4.0, 7)
        }
        _ => {
            let right = spec.hull().map_or(0.0, |h| h.1).max(m.hull().map_or(0.0, |h| h.1));
            linspace(right + 1.0, right + 4.0, 7)
        }
    })
}

pub fn suite(args: SuiteArgs) -> anyhow::Result<bool> {
    let ids: Vec<usize> = if args.only.is_empty() { (1..=suite::TITLES.len()).collect() } else { args.only };
    if let Some(bad) = ids.iter().find(|i| **i == 0 || **i > suite::TITLES.len()) {
        return Err(usage(format!("no criterion {bad}; valid numbers are 1..={}", suite::TITLES.len())));
    }
    let mut all = true;
    for id in ids {
        let o = suite::run(id, args.seed);
        println!("{o}");
        all &= o.passed;
    }
    Ok(all)
}
