//! Seeded invariant suite.
//!
//! Every check draws its own random instances from a generator seeded by the
//! suite seed and the check id, so `--only` selections reproduce the numbers
//! of a full run. A check reports the worst residual it saw; it passes when
//! that residual is at most its tolerance. Residuals are amounts of
//! violation: 0 means the inequality held with room to spare.

use std::time::Instant;

use serde::Serialize;

use crate::divergence::{
    fidelity, sandwiched_renyi, standard_renyi, trace_distance, PsiProfile,
};
use crate::error::{Error, Result};
use crate::exponent::{chernoff, hoeffding, hoeffding_test_classical, regularized_test, Method};
use crate::io::{parse_state, state_to_json, State};
use crate::measurement::{
    measured_divergence, measured_relative_entropy, ncopy_table_classical, test_divergence_classical,
    test_divergence_exhaustive, test_divergence_quantum, test_divergence_threshold, OptimizerOptions,
};
use crate::operator::{tensor_power_classical, ClassicalState, DensityMatrix, Test};
use crate::random::{random_classical, random_density, random_unitary, rng, SeededRng};
use rand::Rng;

/// Suite configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Dimensions (or alphabet sizes) cycled through by the random instances.
    pub dims: Vec<usize>,
    /// Random instances per check; optimizer-backed checks run a fifth of
    /// this (at least one).
    pub trials: usize,
    /// Restrict to these check ids.
    pub only: Option<Vec<String>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dims: vec![2, 3],
            trials: 20,
            only: None,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
    /// Where the worst residual occurred, or the error that stopped the check.
    pub detail: Option<String>,
    pub seconds: f64,
}

const ALPHAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

struct Ctx {
    rng: SeededRng,
    dims: Vec<usize>,
    trials: usize,
    heavy_trials: usize,
    worst: f64,
    detail: Option<String>,
    cases: usize,
}

impl Ctx {
    fn record(&mut self, residual: f64, detail: impl FnOnce() -> String) {
        self.cases += 1;
        let r = if residual.is_nan() { f64::INFINITY } else { residual.max(0.0) };
        if r > self.worst || self.detail.is_none() {
            self.worst = self.worst.max(r);
            self.detail = Some(detail());
        }
    }

    fn dim(&self, i: usize) -> usize {
        self.dims[i % self.dims.len()]
    }

    /// Quantum pair for even i, commuting (diagonal) pair for odd i.
    fn pair(&mut self, i: usize) -> (DensityMatrix, DensityMatrix) {
        let d = self.dim(i);
        if i.is_multiple_of(2) {
            (random_density(d, &mut self.rng), random_density(d, &mut self.rng))
        } else {
            let (p, q) = self.classical(d);
            (p.to_density(), q.to_density())
        }
    }

    fn classical(&mut self, k: usize) -> (ClassicalState, ClassicalState) {
        (random_classical(k, &mut self.rng), random_classical(k, &mut self.rng))
    }

    fn profile(&mut self, i: usize) -> Result<(DensityMatrix, DensityMatrix, PsiProfile)> {
        let (a, b) = self.pair(i);
        let p = PsiProfile::from_states(&a, &b)?;
        Ok((a, b, p))
    }
}

type CheckFn = fn(&mut Ctx) -> Result<()>;

struct CheckDef {
    id: &'static str,
    description: &'static str,
    tolerance: f64,
    run: CheckFn,
}

fn kind(i: usize) -> &'static str {
    if i.is_multiple_of(2) { "quantum" } else { "classical" }
}

fn power_law(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let a = random_density(c.dim(i), &mut c.rng);
        let x: f64 = c.rng.random_range(0.01..2.0);
        let y: f64 = c.rng.random_range(0.01..2.0);
        let lhs = a.op().power(x).entries() * a.op().power(y).entries();
        let rhs = a.op().power(x + y);
        let r = (lhs - rhs.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        c.record(r, || format!("trial {i}, x = {x}, y = {y}"));
    }
    Ok(())
}

fn zero_power_projection(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let d = c.dim(i);
        // rank-deficient: mix fewer pure directions than d
        let a = if i % 2 == 0 {
            random_density(d, &mut c.rng)
        } else {
            let (p, _) = c.classical(d);
            let mut w = p.weights().to_vec();
            w[0] = 0.0;
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            DensityMatrix::from_diagonal(&w)?
        };
        let p = a.op().power(0.0);
        let pm = p.entries();
        let idem = (pm * pm - pm).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let comm = (pm * a.entries() - a.entries() * pm).iter().map(|z| z.norm()).fold(0.0, f64::max);
        c.record(idem.max(comm), || format!("trial {i}"));
    }
    Ok(())
}

fn type_normalization(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let k = 2 + i % 3;
        let n = 1 + i % 6;
        let (p, _) = c.classical(k);
        let total: f64 = tensor_power_classical(&p, n)?
            .iter()
            .map(|t| (t.class.log_multiplicity + t.log_prob).exp())
            .sum();
        c.record((total - 1.0).abs(), || format!("|Ω| = {k}, n = {n}"));
    }
    Ok(())
}

fn apply_test_range(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let d = c.dim(i);
        let rho = random_density(d, &mut c.rng);
        let u = random_unitary(d, &mut c.rng);
        let k = c.rng.random_range(0..=d);
        let t = Test::from_columns(&u, k);
        let (a, b) = crate::operator::apply_test(rho.op(), &t)?;
        let out = |x: f64| (-x).max(x - 1.0).max(0.0);
        c.record(out(a).max(out(b)), || format!("trial {i}, rank {k}"));
    }
    Ok(())
}

fn q_endpoints(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma, p) = c.profile(i)?;
        let q0 = rho.op().support_projection().trace_product(sigma.op())?;
        let q1 = sigma.op().support_projection().trace_product(rho.op())?;
        let r = (p.q_at(0.0) - q0).abs().max((p.q_at(1.0) - q1).abs());
        c.record(r, || format!("{} trial {i}", kind(i)));
    }
    Ok(())
}

fn psi_nonpositive(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        for j in 0..=20 {
            let a = j as f64 / 20.0;
            c.record(p.psi_at(a), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn psi_convex(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let h = 1.0 / 64.0;
        for j in 1..64 {
            let a = j as f64 * h;
            let second = p.psi_at(a - h) - 2.0 * p.psi_at(a) + p.psi_at(a + h);
            c.record(-second, || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn skew_symmetry(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma) = c.pair(i);
        for a in ALPHAS {
            let x = standard_renyi(&rho, &sigma, a)?.value;
            let y = standard_renyi(&sigma, &rho, 1.0 - a)?.value;
            c.record(((1.0 - a) * x - a * y).abs(), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn monotonicity_in_alpha(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma) = c.pair(i);
        let (mut ps, mut pw) = (0.0, 0.0);
        for a in ALPHAS {
            let s = standard_renyi(&rho, &sigma, a)?.value;
            let w = sandwiched_renyi(&rho, &sigma, a)?.value;
            c.record((ps - s).max(pw - w), || format!("{} trial {i}, alpha = {a}", kind(i)));
            ps = s;
            pw = w;
        }
        let (p, q) = c.classical(c.dim(i));
        let mut pt = 0.0;
        for a in ALPHAS {
            let t = test_divergence_classical(&p, &q, a)?.value;
            c.record(pt - t, || format!("classical test trial {i}, alpha = {a}"));
            pt = t;
        }
    }
    Ok(())
}

fn sandwiched_le_standard(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma) = c.pair(i);
        for a in ALPHAS {
            let s = standard_renyi(&rho, &sigma, a)?.value;
            let w = sandwiched_renyi(&rho, &sigma, a)?.value;
            c.record(w - s, || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn alpha_standard_le_sandwiched(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma) = c.pair(i);
        for a in ALPHAS {
            let s = standard_renyi(&rho, &sigma, a)?.value;
            let w = sandwiched_renyi(&rho, &sigma, a)?.value;
            c.record(a * s - w, || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn pinching(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma) = c.pair(i);
        let pinched = rho.pinch(sigma.op())?;
        for a in ALPHAS {
            let x = standard_renyi(&pinched, &sigma, a)?.value;
            let y = standard_renyi(&rho, &sigma, a)?.value;
            c.record(x - y, || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn psi_prime_fd(c: &mut Ctx) -> Result<()> {
    let h = 1e-5;
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let fd = (p.psi_at(a + h) - p.psi_at(a - h)) / (2.0 * h);
            c.record((fd - p.psi_prime_at(a)).abs(), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn method_equivalence(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        for a in ALPHAS {
            let x = regularized_test(&p, a, Method::HoeffdingRoot)?.value;
            let y = regularized_test(&p, a, Method::SalzmannDatta)?.value;
            c.record((x - y).abs(), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn sandwich_bounds(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        for a in ALPHAS {
            let d = p.renyi(a);
            let v = regularized_test(&p, a, Method::Both)?.value;
            c.record((0.5 * d - v).max(v - d), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn upper_gap_generic(c: &mut Ctx) -> Result<()> {
    // generic 3-point pairs: D̄ᵗᵉˢᵗ_α < D_α by at least 1e−6
    for i in 0..c.trials {
        let (p, q) = c.classical(3);
        let prof = PsiProfile::from_classical(&p, &q)?;
        for a in ALPHAS {
            let gap = prof.renyi(a) - regularized_test(&prof, a, Method::Both)?.value;
            c.record(1e-6 - gap, || format!("trial {i}, alpha = {a}, gap = {gap}"));
        }
    }
    Ok(())
}

fn regularized_skew_symmetry(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let rev = p.reversed();
        for a in ALPHAS {
            let x = regularized_test(&p, a, Method::Both)?.value;
            let y = regularized_test(&rev, 1.0 - a, Method::Both)?.value;
            c.record(((1.0 - a) * x - a * y).abs(), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn weak_additivity(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let (rho, sigma) = c.pair(i);
        let p1 = PsiProfile::from_states(&rho, &sigma)?;
        let p2 = PsiProfile::from_states(&rho.tensor_power(2)?, &sigma.tensor_power(2)?)?;
        for a in [0.2, 0.5, 0.8] {
            let x = regularized_test(&p1, a, Method::Both)?.value;
            let y = regularized_test(&p2, a, Method::Both)?.value;
            c.record((y - 2.0 * x).abs(), || format!("{} trial {i}, alpha = {a}", kind(i)));
        }
    }
    Ok(())
}

fn hoeffding_monotone(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let (lo, hi) = (p.d_zero(), p.relative_entropy());
        let mut prev = f64::INFINITY;
        for j in 0..=20 {
            let r = lo + (hi - lo) * j as f64 / 20.0;
            let h = hoeffding(&p, r).h;
            c.record(h - prev, || format!("{} trial {i}, r = {r}", kind(i)));
            prev = h;
        }
    }
    Ok(())
}

fn chernoff_fixed_point(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let cv = chernoff(&p);
        let h = hoeffding(&p, cv).h;
        c.record((h - cv).abs(), || format!("{} trial {i}, C = {cv}", kind(i)));
    }
    Ok(())
}

fn chernoff_identity(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let v = regularized_test(&p, 0.5, Method::Both)?.value;
        c.record((v - chernoff(&p)).abs(), || format!("{} trial {i}", kind(i)));
    }
    Ok(())
}

fn strict_positivity(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (rho, sigma, p) = c.profile(i)?;
        if trace_distance(&rho, &sigma)? > 1e-6 {
            for a in ALPHAS {
                let v = regularized_test(&p, a, Method::Both)?.value;
                c.record(1e-8 - v, || format!("{} trial {i}, alpha = {a}", kind(i)));
            }
        }
        let (p, q) = c.classical(c.dim(i));
        for a in ALPHAS {
            let v = test_divergence_classical(&p, &q, a)?.value;
            c.record(if v > 0.0 { 0.0 } else { f64::INFINITY }, || {
                format!("classical test trial {i}, alpha = {a}")
            });
        }
    }
    Ok(())
}

fn limit_alpha_zero(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let lo = regularized_test(&p, 0.01, Method::Both)?.value;
        c.record((lo - p.d_zero()).abs(), || format!("{} trial {i}", kind(i)));
    }
    Ok(())
}

/// D − D̄ᵗᵉˢᵗ_α closes like √(1−α), so a fixed endpoint such as α = 0.99
/// can sit 0.1–0.4 away from the limit. The check walks α = 1 − 10^{−k},
/// requires the gap to shrink at every step, and bounds the last gap.
fn limit_alpha_one(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        let d = p.relative_entropy();
        let mut prev = f64::INFINITY;
        let mut growth = 0.0f64;
        for k in 2..=5 {
            let a = 1.0 - 10f64.powi(-k);
            let gap = (d - regularized_test(&p, a, Method::Both)?.value).abs();
            growth = growth.max(gap - prev);
            prev = gap;
        }
        c.record(growth.max(prev - 0.05), || {
            format!("{} trial {i}, gap at 1 - 1e-5 = {prev}", kind(i))
        });
    }
    Ok(())
}

fn renyi_ratio(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (_, _, p) = c.profile(i)?;
        for a in ALPHAS {
            for b in ALPHAS {
                let k = a * (1.0 - b) / (a - 2.0 * a * b + b);
                c.record(k * p.renyi(b) - p.renyi(a), || {
                    format!("{} trial {i}, alpha = {a}, beta = {b}", kind(i))
                });
            }
        }
    }
    Ok(())
}

fn threshold_optimality(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        // single copies up to 20 atoms and 2- or 4-copy product alphabets
        let (k, n) = match i % 3 {
            0 => (2 + i % 19, 1),
            1 => (2 + i % 3, 2),
            _ => (2, 4),
        };
        let (p, q) = c.classical(k);
        let (p, q) = (p.tensor_power(n)?, q.tensor_power(n)?);
        for a in [0.1, 0.5, 0.9] {
            let x = test_divergence_threshold(&p, &q, a)?.value;
            let y = test_divergence_exhaustive(&p, &q, a)?.value;
            c.record((x - y).abs(), || format!("|Ω| = {k}, n = {n}, alpha = {a}"));
        }
    }
    Ok(())
}

fn test_skew_symmetry(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let (p, q) = c.classical(c.dim(i).max(2));
        for a in ALPHAS {
            let x = test_divergence_classical(&p, &q, a)?.value;
            let y = test_divergence_classical(&q, &p, 1.0 - a)?.value;
            c.record(((1.0 - a) * x - a * y).abs(), || format!("trial {i}, alpha = {a}"));
        }
    }
    Ok(())
}

fn optimizer_options(c: &mut Ctx) -> OptimizerOptions {
    OptimizerOptions {
        restarts: 2,
        seed: c.rng.random(),
        ..OptimizerOptions::default()
    }
}

fn ordering_chain(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let d = c.dim(i).min(3);
        let rho = random_density(d, &mut c.rng);
        let sigma = random_density(d, &mut c.rng);
        let p = PsiProfile::from_states(&rho, &sigma)?;
        let opts = optimizer_options(c);
        for a in [0.2, 0.5, 0.8] {
            let t = test_divergence_quantum(&rho, &sigma, a, &opts)?.value;
            let m = measured_divergence(&rho, &sigma, a, &opts)?.value;
            let d_a = p.renyi(a);
            let reg = regularized_test(&p, a, Method::Both)?.value;
            let r = (t - m)
                .max(m - d_a - 1e-6)
                .max(reg - t - 2f64.ln() / (1.0 - a));
            c.record(r, || format!("d = {d}, trial {i}, alpha = {a}"));
        }
    }
    Ok(())
}

fn measured_below_sandwiched(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let rho = random_density(2, &mut c.rng);
        let sigma = random_density(2, &mut c.rng);
        let opts = optimizer_options(c);
        for a in [0.6, 0.75, 0.9] {
            let m = measured_divergence(&rho, &sigma, a, &opts)?.value;
            let s = sandwiched_renyi(&rho, &sigma, a)?.value;
            c.record(m - (s - 1e-6), || format!("trial {i}, alpha = {a}, gap = {}", s - m));
        }
    }
    Ok(())
}

fn commuting_oracle(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let k = c.dim(i);
        let (p, q) = c.classical(k);
        let opts = optimizer_options(c);
        for a in [0.2, 0.5, 0.8] {
            let x = test_divergence_classical(&p, &q, a)?.value;
            let y = test_divergence_quantum(&p.to_density(), &q.to_density(), a, &opts)?.value;
            c.record((x - y).abs(), || format!("|Ω| = {k}, trial {i}, alpha = {a}"));
        }
    }
    Ok(())
}

fn test_alpha_limits(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let d = c.dim(i).min(3);
        let (rho, sigma) = c.pair(i);
        let (rho, sigma) = if rho.dim() == d { (rho, sigma) } else { (random_density(d, &mut c.rng), random_density(d, &mut c.rng)) };
        let p = PsiProfile::from_states(&rho, &sigma)?;
        let opts = optimizer_options(c);
        let t = test_divergence_quantum(&rho, &sigma, 0.01, &opts)?.value;
        let m = measured_divergence(&rho, &sigma, 0.99, &opts)?.value;
        let m1 = measured_relative_entropy(&rho, &sigma, &opts)?.value;
        let r = (t - p.d_zero()).abs().max((m - m1).abs());
        c.record(r, || format!("{} trial {i}", kind(i)));
    }
    Ok(())
}

fn measured_half_fidelity(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let rho = random_density(2, &mut c.rng);
        let sigma = random_density(2, &mut c.rng);
        let opts = optimizer_options(c);
        let m = measured_divergence(&rho, &sigma, 0.5, &opts)?.value;
        let f = fidelity(&rho, &sigma)?;
        c.record((m + 2.0 * f.ln()).abs(), || format!("trial {i}"));
    }
    Ok(())
}

fn ncopy_bounds(c: &mut Ctx) -> Result<()> {
    for i in 0..c.heavy_trials {
        let k = 2 + i % 2;
        let (p, q) = c.classical(k);
        let prof = PsiProfile::from_classical(&p, &q)?;
        for a in [0.3, 0.7] {
            let d = prof.renyi(a);
            let reg = regularized_test(&prof, a, Method::Both)?.value;
            for row in ncopy_table_classical(&p, &q, a, 4)? {
                let slack = 2f64.ln() / (row.n as f64 * (1.0 - a));
                let r = (row.dtest_per_copy - d).max(reg - slack - row.dtest_per_copy);
                c.record(r, || format!("|Ω| = {k}, trial {i}, alpha = {a}, n = {}", row.n));
            }
        }
    }
    Ok(())
}

fn hoeffding_attainability(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let k = c.dim(i);
        let (p, q) = c.classical(k);
        for &(n, r, a) in &[(2, 0.05, 0.3), (4, 0.1, 0.7), (8, 0.2, 0.3)] {
            let rep = hoeffding_test_classical(&p, &q, n, r, a)?;
            let v = (rep.type_ii - rep.bound_ii).max(rep.type_i - rep.bound_i);
            c.record(v, || format!("|Ω| = {k}, trial {i}, n = {n}, r = {r}, alpha = {a}"));
        }
    }
    Ok(())
}

fn state_round_trip(c: &mut Ctx) -> Result<()> {
    for i in 0..c.trials {
        let d = c.dim(i);
        let rho = random_density(d, &mut c.rng);
        let back = parse_state(&state_to_json(&State::Density(rho.clone()))?)?.to_density();
        let r = if back.entries() == rho.entries() { 0.0 } else { f64::INFINITY };
        let (p, _) = c.classical(d);
        let back = parse_state(&state_to_json(&State::Classical(p.clone()))?)?;
        let same = back.as_classical().is_some_and(|b| b.weights() == p.weights());
        c.record(if same { r } else { f64::INFINITY }, || format!("trial {i}"));
    }
    Ok(())
}

const CHECKS: &[CheckDef] = &[
    CheckDef { id: "power-law", description: "A^x A^y = A^(x+y) on the support", tolerance: 1e-8, run: power_law },
    CheckDef { id: "zero-power-projection", description: "A^0 is idempotent and commutes with A", tolerance: 1e-9, run: zero_power_projection },
    CheckDef { id: "type-normalization", description: "type-class masses of p^n sum to 1", tolerance: 1e-10, run: type_normalization },
    CheckDef { id: "apply-test-range", description: "test outcome probabilities lie in [0, 1]", tolerance: 1e-12, run: apply_test_range },
    CheckDef { id: "q-endpoints", description: "Q(0) = Tr rho^0 sigma and Q(1) = Tr rho sigma^0", tolerance: 1e-10, run: q_endpoints },
    CheckDef { id: "psi-nonpositive", description: "psi <= 0 on [0, 1]", tolerance: 1e-10, run: psi_nonpositive },
    CheckDef { id: "psi-convex", description: "second differences of psi are non-negative", tolerance: 1e-8, run: psi_convex },
    CheckDef { id: "skew-symmetry", description: "(1-a) D_a(rho||sigma) = a D_(1-a)(sigma||rho)", tolerance: 1e-9, run: skew_symmetry },
    CheckDef { id: "monotonicity-in-alpha", description: "standard, sandwiched and test divergences non-decreasing in alpha", tolerance: 1e-9, run: monotonicity_in_alpha },
    CheckDef { id: "sandwiched-le-standard", description: "sandwiched <= standard", tolerance: 1e-9, run: sandwiched_le_standard },
    CheckDef { id: "alpha-standard-le-sandwiched", description: "a * standard <= sandwiched", tolerance: 1e-9, run: alpha_standard_le_sandwiched },
    CheckDef { id: "pinching", description: "pinching in the eigenbasis of sigma does not increase D_a", tolerance: 1e-9, run: pinching },
    CheckDef { id: "psi-prime-finite-difference", description: "psi' matches a centered difference with h = 1e-5", tolerance: 1e-6, run: psi_prime_fd },
    CheckDef { id: "method-equivalence", description: "Hoeffding-root and Salzmann-Datta regularized values agree", tolerance: 1e-6, run: method_equivalence },
    CheckDef { id: "sandwich-bounds", description: "D_a / 2 <= regularized test <= D_a", tolerance: 1e-8, run: sandwich_bounds },
    CheckDef { id: "upper-gap-generic", description: "regularized test < D_a - 1e-6 on generic 3-point pairs", tolerance: 0.0, run: upper_gap_generic },
    CheckDef { id: "regularized-skew-symmetry", description: "skew symmetry of the regularized test divergence", tolerance: 1e-7, run: regularized_skew_symmetry },
    CheckDef { id: "weak-additivity", description: "regularized test of two copies is twice the single-copy value", tolerance: 1e-7, run: weak_additivity },
    CheckDef { id: "hoeffding-monotone", description: "H_r non-increasing in r on [D0, D]", tolerance: 0.0, run: hoeffding_monotone },
    CheckDef { id: "chernoff-fixed-point", description: "H_C = C", tolerance: 1e-7, run: chernoff_fixed_point },
    CheckDef { id: "chernoff-identity", description: "regularized test at 1/2 equals the Chernoff divergence", tolerance: 1e-6, run: chernoff_identity },
    CheckDef { id: "strict-positivity", description: "distinct states have positive regularized and classical test divergences", tolerance: 0.0, run: strict_positivity },
    CheckDef { id: "limit-alpha-zero", description: "regularized test at alpha = 0.01 within 0.05 of D0", tolerance: 0.05, run: limit_alpha_zero },
    CheckDef { id: "limit-alpha-one", description: "D - regularized test shrinks along alpha = 1 - 10^-k, below 0.05 at k = 5", tolerance: 0.0, run: limit_alpha_one },
    CheckDef { id: "renyi-ratio-inequality", description: "D_a >= a(1-b)/(a-2ab+b) D_b", tolerance: 1e-9, run: renyi_ratio },
    CheckDef { id: "threshold-optimality", description: "threshold sets match exhaustive enumeration exactly", tolerance: 0.0, run: threshold_optimality },
    CheckDef { id: "test-skew-symmetry", description: "skew symmetry of the classical test divergence", tolerance: 1e-12, run: test_skew_symmetry },
    CheckDef { id: "ordering-chain", description: "test <= measured <= D_a and regularized <= test + log 2/(1-a)", tolerance: 1e-6, run: ordering_chain },
    CheckDef { id: "measured-below-sandwiched", description: "measured < sandwiched - 1e-6 for non-commuting qubits, a in (1/2, 1)", tolerance: 0.0, run: measured_below_sandwiched },
    CheckDef { id: "commuting-oracle", description: "quantum test optimizer matches enumeration on commuting pairs", tolerance: 1e-6, run: commuting_oracle },
    CheckDef { id: "test-alpha-limits", description: "test at 0.01 near D0, measured at 0.99 near measured relative entropy", tolerance: 0.05, run: test_alpha_limits },
    CheckDef { id: "measured-half-fidelity", description: "measured D_1/2 = -2 log F", tolerance: 1e-4, run: measured_half_fidelity },
    CheckDef { id: "ncopy-bounds", description: "regularized - log 2/(n(1-a)) <= per-copy test <= D_a", tolerance: 1e-9, run: ncopy_bounds },
    CheckDef { id: "hoeffding-attainability", description: "Hoeffding test error probabilities obey their bounds", tolerance: 1e-12, run: hoeffding_attainability },
    CheckDef { id: "state-round-trip", description: "state files re-read entry-identical", tolerance: 0.0, run: state_round_trip },
];

/// Stable identifiers of all checks, in run order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

fn check_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a of the id, mixed with the suite seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed
}

/// Runs the selected checks. Unknown ids in `only` are an error.
pub fn run(config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    if let Some(only) = &config.only {
        for id in only {
            if !CHECKS.iter().any(|c| c.id == id) {
                return Err(Error::UnknownName { kind: "check", name: id.clone() });
            }
        }
    }
    if config.dims.is_empty() || config.dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter {
            name: "dims",
            value: config.dims.iter().copied().min().unwrap_or(0) as f64,
            range: "non-empty, each >= 2",
        });
    }
    let mut out = Vec::new();
    for def in CHECKS {
        if let Some(only) = &config.only {
            if !only.iter().any(|o| o == def.id) {
                continue;
            }
        }
        let mut ctx = Ctx {
            rng: rng(check_seed(config.seed, def.id)),
            dims: config.dims.clone(),
            trials: config.trials.max(1),
            heavy_trials: (config.trials / 5).max(1),
            worst: 0.0,
            detail: None,
            cases: 0,
        };
        let start = Instant::now();
        let outcome = (def.run)(&mut ctx);
        let seconds = start.elapsed().as_secs_f64();
        let result = match outcome {
            Ok(()) => CheckResult {
                id: def.id,
                description: def.description,
                passed: ctx.worst <= def.tolerance,
                worst_residual: ctx.worst,
                tolerance: def.tolerance,
                cases: ctx.cases,
                detail: ctx.detail,
                seconds,
            },
            Err(e) => CheckResult {
                id: def.id,
                description: def.description,
                passed: false,
                worst_residual: f64::INFINITY,
                tolerance: def.tolerance,
                cases: ctx.cases,
                detail: Some(format!("error: {e}")),
                seconds,
            },
        };
        out.push(result);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let ids = check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
    }

    #[test]
    fn only_filter_and_unknown_id() {
        let cfg = VerifyConfig {
            only: Some(vec!["skew-symmetry".into()]),
            trials: 4,
            ..VerifyConfig::default()
        };
        let res = run(&cfg).unwrap();
        assert_eq!(res.len(), 1);
        assert!(res[0].passed, "{:?}", res[0]);
        let cfg = VerifyConfig {
            only: Some(vec!["no-such-check".into()]),
            ..VerifyConfig::default()
        };
        assert!(matches!(run(&cfg), Err(Error::UnknownName { .. })));
    }

    #[test]
    fn selection_reproduces_full_run_numbers() {
        let one = VerifyConfig {
            only: Some(vec!["psi-convex".into()]),
            trials: 3,
            ..VerifyConfig::default()
        };
        let two = VerifyConfig {
            only: Some(vec!["psi-convex".into(), "q-endpoints".into()]),
            trials: 3,
            ..VerifyConfig::default()
        };
        let a = run(&one).unwrap();
        let b = run(&two).unwrap();
        assert_eq!(a[0].worst_residual, b.iter().find(|r| r.id == "psi-convex").unwrap().worst_residual);
    }
}
