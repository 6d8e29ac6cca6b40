use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use renyi_core::divergence::{d_max, sandwiched_renyi, standard_renyi};
use renyi_core::exponent::{chernoff, hoeffding, hoeffding_test, regularized_test_with_tolerance};
use renyi_core::measurement::{
    gap_explorer_with, measured_divergence, test_divergence_classical, test_divergence_quantum, GapOptions,
    OptimizerOptions, Verdict,
};
use renyi_core::verify::{self, VerifyConfig};
use renyi_core::{Family, Method};

use crate::config::{parse_grid, Pair, Tolerances};
use crate::error::{CliError, Result};
use crate::output::{Cell, Format, Table};
use crate::Command;

pub fn run(cmd: Command) -> Result<()> {
    let tols = Tolerances::from_env()?;
    match cmd {
        Command::Compute { pair, family, alpha, opt } => {
            let p = Pair::load(&pair.inputs)?;
            let families = parse_families(&family, false)?;
            let method = parse_method(&opt.method)?;
            let opts = optimizer_options(opt.restarts, opt.seed, &tols);
            let table = compute(&p, &families, &alpha, method, &opts, &tols)?;
            emit(&table, pair.format, pair.out.as_deref())
        }
        Command::Scan { pair, alpha_grid, r_grid, family, opt } => {
            let p = Pair::load(&pair.inputs)?;
            let table = match (alpha_grid, r_grid) {
                (Some(g), None) => {
                    let families = parse_families(&family, true)?;
                    let grid = parse_grid(&g, |_| None)?;
                    let method = parse_method(&opt.method)?;
                    let opts = optimizer_options(opt.restarts, opt.seed, &tols);
                    alpha_scan(&p, &families, &grid, method, &opts, &tols)?
                }
                (None, Some(g)) => hoeffding_scan(&p, &g)?,
                _ => return Err(CliError::Usage("scan needs exactly one of --alpha-grid, --r-grid".into())),
            };
            emit(&table, pair.format, pair.out.as_deref())
        }
        Command::Ncopy { pair, alpha, n_max } => {
            let p = Pair::load(&pair.inputs)?;
            let (table, violations) = ncopy(&p, alpha, n_max, &tols)?;
            emit(&table, pair.format, pair.out.as_deref())?;
            if violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Invariant(violations.join("; ")))
            }
        }
        Command::Verify { seed, dims, trials, only, list, out, format } => {
            if list {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                for id in verify::check_ids() {
                    writeln!(w, "{id}")?;
                }
                return Ok(());
            }
            let cfg = VerifyConfig {
                seed,
                dims,
                trials,
                only: (!only.is_empty()).then_some(only),
            };
            let results = verify::run(&cfg)?;
            let mut table = Table::new(&["id", "status", "worst_residual", "tolerance", "cases", "detail"]);
            let mut failed = Vec::new();
            for r in &results {
                eprintln!(
                    "{} {:<30} worst {:<12.3e} tol {:<8.1e} ({} cases, {:.2}s)",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.id,
                    r.worst_residual,
                    r.tolerance,
                    r.cases,
                    r.seconds
                );
                if !r.passed {
                    failed.push(r.id);
                }
                table.push(vec![
                    r.id.into(),
                    (if r.passed { "PASS" } else { "FAIL" }).into(),
                    r.worst_residual.into(),
                    r.tolerance.into(),
                    r.cases.into(),
                    r.detail.clone().map_or(Cell::Empty, Cell::Text),
                ]);
            }
            emit(&table, format, out.as_deref())?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::HoeffdingTest { pair, n, r, alpha } => {
            let p = Pair::load(&pair.inputs)?;
            let (rho, sigma) = p.dense();
            let rep = hoeffding_test(&rho, &sigma, n, r, alpha)?;
            let (ok_i, ok_ii) = (rep.type_i_ok(1e-12), rep.type_ii_ok(1e-12));
            let mut table = Table::new(&[
                "n", "r", "alpha", "log_threshold", "type_i", "bound_i", "type_ii", "bound_ii", "type_i_ok", "type_ii_ok",
            ]);
            table.push(vec![
                n.into(),
                r.into(),
                alpha.into(),
                rep.log_threshold.into(),
                rep.type_i.into(),
                rep.bound_i.into(),
                rep.type_ii.into(),
                rep.bound_ii.into(),
                ok_i.into(),
                ok_ii.into(),
            ]);
            emit(&table, pair.format, pair.out.as_deref())?;
            if ok_i && ok_ii {
                Ok(())
            } else {
                Err(CliError::Invariant("Hoeffding test error probability above its bound".into()))
            }
        }
    }
}

fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            table.write(format, stdout.lock())?;
        }
    }
    Ok(())
}

fn optimizer_options(restarts: usize, seed: u64, tols: &Tolerances) -> OptimizerOptions {
    OptimizerOptions {
        restarts,
        seed,
        max_dim: tols.optimizer_dim,
    }
}

fn parse_method(s: &str) -> Result<Method> {
    s.parse().map_err(|e: renyi_core::Error| CliError::Usage(e.to_string()))
}

/// Expands `all`; with `alpha_only`, `all` means the α-parametrized families.
fn parse_families(names: &[String], alpha_only: bool) -> Result<Vec<Family>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Family::ALL.into_iter().filter(|f| !alpha_only || f.has_alpha()));
            continue;
        }
        let f: Family = n.parse().map_err(|e: renyi_core::Error| CliError::Usage(e.to_string()))?;
        if alpha_only && !f.has_alpha() {
            return Err(CliError::Usage(format!("family `{f}` takes no alpha and cannot be scanned")));
        }
        out.push(f);
    }
    let mut seen = Vec::new();
    out.retain(|f| {
        let fresh = !seen.contains(f);
        seen.push(*f);
        fresh
    });
    Ok(out)
}

fn check_alpha(f: Family, a: f64) -> Result<()> {
    let ok = match f {
        Family::Standard | Family::Sandwiched => a > 0.0 && a != 1.0 && a.is_finite(),
        _ => a > 0.0 && a < 1.0,
    };
    if ok {
        Ok(())
    } else {
        let range = if matches!(f, Family::Standard | Family::Sandwiched) { "(0,1) ∪ (1,∞)" } else { "(0,1)" };
        Err(CliError::Usage(format!("alpha = {a} is outside {range} for family `{f}`")))
    }
}

/// (value, method label, residual) for one family at one α.
fn evaluate(
    p: &Pair,
    f: Family,
    alpha: Option<f64>,
    method: Method,
    opts: &OptimizerOptions,
    tols: &Tolerances,
) -> Result<(f64, String, Option<f64>)> {
    let a = alpha.unwrap_or(f64::NAN);
    let (rho, sigma) = p.dense();
    Ok(match f {
        Family::Standard => (standard_renyi(&rho, &sigma, a)?.value, "spectral".into(), None),
        Family::Sandwiched => (sandwiched_renyi(&rho, &sigma, a)?.value, "spectral".into(), None),
        Family::Measured => match p.classical() {
            // the eigenbasis measurement is optimal for commuting states
            Some(_) => (p.profile.renyi(a), "commuting".into(), None),
            None => (measured_divergence(&rho, &sigma, a, opts)?.value, "optimizer".into(), None),
        },
        Family::Test => match p.classical() {
            Some((cp, cq)) => {
                let t = test_divergence_classical(cp, cq, a)?;
                let label = if t.certified { "exhaustive" } else { "threshold" };
                (t.value, label.into(), None)
            }
            None => (test_divergence_quantum(&rho, &sigma, a, opts)?.value, "optimizer".into(), None),
        },
        Family::RelativeEntropy => (p.profile.relative_entropy(), "spectral".into(), None),
        Family::D0 => (p.profile.d_zero(), "spectral".into(), None),
        Family::Dmax => (d_max(&rho, &sigma)?.value, "spectral".into(), None),
        Family::Chernoff => (chernoff(&p.profile), "golden-section".into(), None),
        Family::RegularizedTest => {
            let r = regularized_test_with_tolerance(&p.profile, a, method, tols.method_residual)?;
            (r.value, r.method.to_string(), r.residual)
        }
    })
}

fn compute(
    p: &Pair,
    families: &[Family],
    alphas: &[f64],
    method: Method,
    opts: &OptimizerOptions,
    tols: &Tolerances,
) -> Result<Table> {
    let mut table = Table::new(&["family", "alpha", "value", "method", "residual"]);
    for &f in families {
        if f.has_alpha() {
            for &a in alphas {
                check_alpha(f, a)?;
                let (v, m, res) = evaluate(p, f, Some(a), method, opts, tols)?;
                table.push(vec![f.name().into(), a.into(), v.into(), m.into(), res.into()]);
            }
        } else {
            let (v, m, res) = evaluate(p, f, None, method, opts, tols)?;
            table.push(vec![f.name().into(), Cell::Empty, v.into(), m.into(), res.into()]);
        }
    }
    Ok(table)
}

fn alpha_scan(
    p: &Pair,
    families: &[Family],
    grid: &[f64],
    method: Method,
    opts: &OptimizerOptions,
    tols: &Tolerances,
) -> Result<Table> {
    let mut header = vec!["x"];
    header.extend(families.iter().map(|f| f.name()));
    let mut table = Table::new(&header);
    for &a in grid {
        let mut row: Vec<Cell> = vec![a.into()];
        for &f in families {
            check_alpha(f, a)?;
            row.push(evaluate(p, f, Some(a), method, opts, tols)?.0.into());
        }
        table.push(row);
    }
    Ok(table)
}

fn hoeffding_scan(p: &Pair, grid: &str) -> Result<Table> {
    let d0 = p.profile.d_zero();
    let d = p.profile.relative_entropy();
    let rs = parse_grid(grid, |s| match s.trim() {
        "d0" => Some(d0),
        "d" => Some(d),
        _ => None,
    })?;
    let mut table = Table::new(&["x", "value", "c_r"]);
    for r in rs {
        let h = hoeffding(&p.profile, r);
        table.push(vec![r.into(), h.h.into(), h.c_r.into()]);
    }
    Ok(table)
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Identical => "identical",
        Verdict::TwoLevel => "(i) two-level",
        Verdict::Generic => "(ii) generic",
        Verdict::Unclassified => "unclassified",
    }
}

fn ncopy(p: &Pair, alpha: f64, n_max: usize, tols: &Tolerances) -> Result<(Table, Vec<String>)> {
    let Some((cp, cq)) = p.classical() else {
        return Err(CliError::Usage(
            "ncopy needs two classical state files; for dense states the n-copy space is limited by \
             the dense budget d^n <= 4096, see `renyi hoeffding-test`"
                .into(),
        ));
    };
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let opts = GapOptions {
        ratio_cluster: tols.ratio_cluster,
        verdict_margin: tols.verdict_margin,
        method_residual: tols.method_residual,
    };
    let rep = gap_explorer_with(cp, cq, alpha, n_max, &opts)?;
    let mut table = Table::new(&["n", "dtest_per_copy", "gap_to_dalpha", "running_max", "certified"]);
    for r in &rep.rows {
        table.push(vec![
            r.n.into(),
            r.dtest_per_copy.into(),
            r.gap_to_dalpha.into(),
            r.running_max.into(),
            r.certified.into(),
        ]);
    }
    table.summarize("alpha", alpha);
    table.summarize("dalpha", rep.dalpha);
    table.summarize("regularized_test", rep.regularized_test);
    table.summarize("dhat_lower_bound", rep.dhat_lower_bound);
    table.summarize("verdict", verdict_label(rep.verdict));
    table.summarize("condition_two_level", rep.equality.condition_two_level);
    table.summarize("c0", rep.equality.c0);
    table.summarize("c1", rep.equality.c1);
    table.summarize("violations", rep.violations.len());
    Ok((table, rep.violations))
}
