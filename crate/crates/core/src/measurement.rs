//! Optimization over tests and measurements.
//!
//! Classical pairs are handled exactly: the binary objective
//! F(a, b) = a^α b^{1−α} + (1−a)^α (1−b)^{1−α} is jointly concave, so its
//! minimum over the achievable (p(S), q(S)) region sits on likelihood-ratio
//! threshold sets. Quantum pairs go through a derivative-free local search over
//! unitaries built from Givens rotations.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::divergence::PsiProfile;
use crate::error::{check_alpha_open_unit, Error, Result};
use crate::exponent::{regularized_test_with_tolerance, Method};
use crate::operator::{
    check_dims, joint_types_by_ratio, CMatrix, ClassicalState, Complex64, DensityMatrix,
    HermitianOperator, Test,
};
use crate::random::{random_unitary, rng};
use crate::search::{grid_then_golden, log_add_exp};
use crate::tol;

/// D_α of the binary distributions (a, a_c) and (b, b_c).
///
/// Equal arguments give exactly 0, and the value is symmetric in swapping
/// the two outcomes bit for bit.
pub fn binary_renyi(a: f64, a_c: f64, b: f64, b_c: f64, alpha: f64) -> f64 {
    if a == b && a_c == b_c {
        return 0.0;
    }
    let f = a.max(0.0).powf(alpha) * b.max(0.0).powf(1.0 - alpha)
        + a_c.max(0.0).powf(alpha) * b_c.max(0.0).powf(1.0 - alpha);
    (f.ln() / (alpha - 1.0)).max(0.0)
}

/// Classical D_α of two outcome distributions, clamping round-off
/// negatives.
pub fn classical_renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let f: f64 = p
        .iter()
        .zip(q)
        .map(|(&x, &y)| x.max(0.0).powf(alpha) * y.max(0.0).powf(1.0 - alpha))
        .sum();
    (f.ln() / (alpha - 1.0)).max(0.0)
}

/// Classical relative entropy of two outcome distributions.
pub fn classical_relative_entropy(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&x, &y) in p.iter().zip(q) {
        let x = x.max(0.0);
        if x > 0.0 {
            if y <= 0.0 {
                return f64::INFINITY;
            }
            s += x * (x / y).ln();
        }
    }
    s.max(0.0)
}

/// Best test found by an optimizer.
#[derive(Debug, Clone)]
pub struct TestOptimum {
    pub value: f64,
    pub optimizer: Test,
    /// Atoms of the optimal subset, for classical optimizations.
    pub subset: Option<Vec<usize>>,
    pub rank: usize,
    pub restarts_used: usize,
    /// True when the value comes from exhaustive subset enumeration.
    pub certified: bool,
}

/// Subset value with masses summed in index order, so that a subset has
/// the same value regardless of which search produced it.
fn subset_value(p: &[f64], q: &[f64], mask: &[bool], alpha: f64) -> f64 {
    let k = mask.iter().filter(|&&m| m).count();
    if k == 0 || k == mask.len() {
        return 0.0;
    }
    let (mut a, mut ac, mut b, mut bc) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..mask.len() {
        if mask[i] {
            a += p[i];
            b += q[i];
        } else {
            ac += p[i];
            bc += q[i];
        }
    }
    binary_renyi(a, ac, b, bc, alpha)
}

/// Tie-break order: fewer atoms first, then lexicographically smaller index
/// list.
fn smaller_subset(x: &[bool], y: &[bool]) -> bool {
    let cx = x.iter().filter(|&&m| m).count();
    let cy = y.iter().filter(|&&m| m).count();
    if cx != cy {
        return cx < cy;
    }
    let ix = x.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i);
    let iy = y.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i);
    ix.lt(iy)
}

#[derive(Debug, Clone)]
struct SubsetBest {
    value: f64,
    mask: Vec<bool>,
}

impl SubsetBest {
    /// The full set (T = I) with value 0.
    fn start(k: usize) -> Self {
        Self {
            value: 0.0,
            mask: vec![true; k],
        }
    }

    fn offer(&mut self, value: f64, mask: &[bool]) {
        if value > self.value
            || (value == self.value && value > 0.0 && smaller_subset(mask, &self.mask))
        {
            self.value = value;
            self.mask = mask.to_vec();
        }
    }
}

fn ratio_order(p: &[f64], q: &[f64]) -> Vec<usize> {
    let lr = |i: usize| match (p[i] > 0.0, q[i] > 0.0) {
        (true, true) => p[i].ln() - q[i].ln(),
        (true, false) => f64::INFINITY,
        _ => f64::NEG_INFINITY,
    };
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| lr(b).total_cmp(&lr(a)));
    idx
}

fn threshold_search(p: &[f64], q: &[f64], alpha: f64) -> SubsetBest {
    let k = p.len();
    let order = ratio_order(p, q);
    let mut best = SubsetBest::start(k);
    let mut mask = vec![false; k];
    for &i in order.iter().take(k.saturating_sub(1)) {
        mask[i] = true;
        let v = subset_value(p, q, &mask, alpha);
        best.offer(v, &mask);
        let comp: Vec<bool> = mask.iter().map(|m| !m).collect();
        best.offer(v, &comp);
    }
    best
}

fn exhaustive_search(p: &[f64], q: &[f64], alpha: f64) -> SubsetBest {
    let k = p.len();
    let mut best = SubsetBest::start(k);
    let mut mask = vec![false; k];
    for bits in 0u64..(1u64 << k) {
        for (i, m) in mask.iter_mut().enumerate() {
            *m = bits >> i & 1 == 1;
        }
        let v = subset_value(p, q, &mask, alpha);
        best.offer(v, &mask);
    }
    best
}

fn optimum_from_subset(best: SubsetBest, certified: bool) -> TestOptimum {
    let diag: Vec<f64> = best.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
    let subset: Vec<usize> = (0..diag.len()).filter(|&i| best.mask[i]).collect();
    TestOptimum {
        value: best.value,
        optimizer: Test::diagonal(&diag).expect("0/1 diagonal is a test"),
        rank: subset.len(),
        subset: Some(subset),
        restarts_used: 0,
        certified,
    }
}

/// Maximum of the binary D_α over all 2^|Ω| subsets (certified).
pub fn test_divergence_exhaustive(p: &ClassicalState, q: &ClassicalState, alpha: f64) -> Result<TestOptimum> {
    check_alpha_open_unit(alpha)?;
    p.check_same_labels(q)?;
    if p.len() > 63 {
        return Err(Error::BudgetExceeded {
            what: "exhaustive subset enumeration",
            needed: p.len() as f64,
            budget: 63.0,
        });
    }
    Ok(optimum_from_subset(
        exhaustive_search(p.weights(), q.weights(), alpha),
        true,
    ))
}

/// Maximum over likelihood-ratio threshold sets and their complements.
pub fn test_divergence_threshold(p: &ClassicalState, q: &ClassicalState, alpha: f64) -> Result<TestOptimum> {
    check_alpha_open_unit(alpha)?;
    p.check_same_labels(q)?;
    Ok(optimum_from_subset(
        threshold_search(p.weights(), q.weights(), alpha),
        false,
    ))
}

/// D^test_α for commuting states: exhaustive when |Ω| ≤ 20, threshold sets
/// otherwise.
pub fn test_divergence_classical(p: &ClassicalState, q: &ClassicalState, alpha: f64) -> Result<TestOptimum> {
    if p.len() <= tol::EXHAUSTIVE_ATOMS {
        test_divergence_exhaustive(p, q, alpha)
    } else {
        test_divergence_threshold(p, q, alpha)
    }
}

/// Options for the quantum optimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Random initializations per rank (tests) or in total (measurements).
    pub restarts: usize,
    pub seed: u64,
    /// Largest dimension accepted.
    pub max_dim: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 42,
            max_dim: tol::OPTIMIZER_DIM,
        }
    }
}

/// Orthonormal frame U with the compressed states U†ρU and U†σU.
struct Frame {
    u: CMatrix,
    r: CMatrix,
    s: CMatrix,
}

impl Frame {
    fn new(u: CMatrix, rho: &CMatrix, sigma: &CMatrix) -> Self {
        let r = u.adjoint() * rho * &u;
        let s = u.adjoint() * sigma * &u;
        Self { u, r, s }
    }

    fn diag(m: &CMatrix) -> Vec<f64> {
        (0..m.nrows()).map(|i| m[(i, i)].re).collect()
    }

    /// Diagonals after the rotation u_i ← c u_i + s e^{iφ} u_j,
    /// u_j ← −s e^{−iφ} u_i + c u_j.
    fn rotated_diag(m: &CMatrix, base: &mut [f64], i: usize, j: usize, t: f64, phi: f64) {
        let (s, c) = t.sin_cos();
        let cross = 2.0 * c * s * (Complex64::from_polar(1.0, phi) * m[(i, j)]).re;
        let (mii, mjj) = (m[(i, i)].re, m[(j, j)].re);
        base[i] = c * c * mii + s * s * mjj + cross;
        base[j] = s * s * mii + c * c * mjj - cross;
    }

    fn rotate(&mut self, i: usize, j: usize, t: f64, phi: f64, rho: &CMatrix, sigma: &CMatrix) {
        let d = self.u.nrows();
        let (s, c) = t.sin_cos();
        let mut g = CMatrix::identity(d, d);
        g[(i, i)] = Complex64::new(c, 0.0);
        g[(j, j)] = Complex64::new(c, 0.0);
        g[(j, i)] = Complex64::from_polar(s, phi);
        g[(i, j)] = -Complex64::from_polar(s, -phi);
        let u = &self.u * g;
        *self = Frame::new(u, rho, sigma);
    }
}

/// Coordinate-wise search over Givens rotations of the given index pairs.
fn local_search<F: Fn(&[f64], &[f64]) -> f64>(
    frame: &mut Frame,
    pairs: &[(usize, usize)],
    obj: &F,
    rho: &CMatrix,
    sigma: &CMatrix,
) -> f64 {
    let mut best = obj(&Frame::diag(&frame.r), &Frame::diag(&frame.s));
    for _sweep in 0..200 {
        let start = best;
        for &(i, j) in pairs {
            for phi in [0.0, FRAC_PI_2] {
                let rd0 = Frame::diag(&frame.r);
                let sd0 = Frame::diag(&frame.s);
                let line = |t: f64| {
                    let mut rd = rd0.clone();
                    let mut sd = sd0.clone();
                    Frame::rotated_diag(&frame.r, &mut rd, i, j, t, phi);
                    Frame::rotated_diag(&frame.s, &mut sd, i, j, t, phi);
                    obj(&rd, &sd)
                };
                let m = grid_then_golden(line, -FRAC_PI_2, FRAC_PI_2, 24, 1e-10);
                if m.value > best + 1e-15 && m.arg != 0.0 {
                    frame.rotate(i, j, m.arg, phi, rho, sigma);
                    best = obj(&Frame::diag(&frame.r), &Frame::diag(&frame.s));
                }
            }
        }
        if best - start < 1e-13 {
            break;
        }
    }
    best
}

/// Deterministic starting bases: standard basis and the eigenbases of ρ, σ
/// and ρ − λσ for a few λ.
fn seed_bases(rho: &DensityMatrix, sigma: &DensityMatrix) -> Vec<CMatrix> {
    let d = rho.dim();
    let mut out = vec![
        CMatrix::identity(d, d),
        rho.op().spectrum().vectors.clone(),
        sigma.op().spectrum().vectors.clone(),
    ];
    for lam in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let diff = rho.op().sub_scaled(lam, sigma.op()).expect("same dimension");
        out.push(diff.spectrum().vectors.clone());
    }
    out
}

/// Reorders columns of `u` by decreasing ⟨u,ρu⟩/⟨u,σu⟩.
fn sort_columns_by_ratio(u: &CMatrix, rho: &CMatrix, sigma: &CMatrix) -> CMatrix {
    let f = Frame::new(u.clone(), rho, sigma);
    let order = ratio_order(&Frame::diag(&f.r), &Frame::diag(&f.s));
    CMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, order[c])])
}

fn check_optimizer_dims(rho: &DensityMatrix, sigma: &DensityMatrix, opts: &OptimizerOptions) -> Result<()> {
    check_dims(rho.dim(), sigma.dim())?;
    if rho.dim() > opts.max_dim {
        return Err(Error::BudgetExceeded {
            what: "optimizer dimension",
            needed: rho.dim() as f64,
            budget: opts.max_dim as f64,
        });
    }
    Ok(())
}

struct RankBest {
    value: f64,
    u: CMatrix,
    rank: usize,
}

fn optimize_test(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, opts: &OptimizerOptions) -> RankBest {
    let d = rho.dim();
    let (re, se) = (rho.entries(), sigma.entries());
    let seeds: Vec<CMatrix> = seed_bases(rho, sigma)
        .iter()
        .map(|u| sort_columns_by_ratio(u, re, se))
        .collect();
    let mut best = RankBest {
        value: 0.0,
        u: CMatrix::identity(d, d),
        rank: d,
    };
    let mut rand = rng(opts.seed);
    for k in 1..d {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (k..d).map(move |j| (i, j))).collect();
        let obj = |rd: &[f64], sd: &[f64]| {
            let a: f64 = rd[..k].iter().sum();
            let ac: f64 = rd[k..].iter().sum();
            let b: f64 = sd[..k].iter().sum();
            let bc: f64 = sd[k..].iter().sum();
            binary_renyi(a, ac, b, bc, alpha)
        };
        let mut starts = seeds.clone();
        starts.extend((0..opts.restarts).map(|_| random_unitary(d, &mut rand)));
        for u in starts {
            let mut frame = Frame::new(u, re, se);
            let v = local_search(&mut frame, &pairs, &obj, re, se);
            if v > best.value {
                best = RankBest {
                    value: v,
                    u: frame.u,
                    rank: k,
                };
            }
        }
    }
    best
}

/// D^test_α(ρ‖σ) = max over projections P of D_α((Tr ρP, Tr ρ(I−P)) ‖
/// (Tr σP, Tr σ(I−P))), by local search from seeded and random starts.
///
/// The result is never below the classical test divergence of the diagonals.
pub fn test_divergence_quantum(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    opts: &OptimizerOptions,
) -> Result<TestOptimum> {
    check_alpha_open_unit(alpha)?;
    check_optimizer_dims(rho, sigma, opts)?;
    let best = optimize_test(rho, sigma, alpha, opts);
    let pinched = threshold_search(&rho.op().diagonal(), &sigma.op().diagonal(), alpha).value;
    if best.value < pinched - 1e-12 {
        return Err(Error::InvariantViolation(format!(
            "quantum test optimum {} below the diagonal value {pinched}",
            best.value
        )));
    }
    let optimizer = if best.rank == rho.dim() {
        Test::identity(rho.dim())
    } else {
        Test::from_columns(&best.u, best.rank)
    };
    Ok(TestOptimum {
        value: best.value,
        optimizer,
        subset: None,
        rank: best.rank,
        restarts_used: opts.restarts,
        certified: false,
    })
}

/// Best rank-one projective measurement found.
#[derive(Debug, Clone)]
pub struct MeasuredOptimum {
    pub value: f64,
    /// Columns are the measurement basis.
    pub basis: CMatrix,
    pub outcomes_rho: Vec<f64>,
    pub outcomes_sigma: Vec<f64>,
    pub restarts_used: usize,
}

fn optimize_pvm<F: Fn(&[f64], &[f64]) -> f64>(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    obj: F,
    extra_seed: Option<CMatrix>,
    opts: &OptimizerOptions,
) -> MeasuredOptimum {
    let d = rho.dim();
    let (re, se) = (rho.entries(), sigma.entries());
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let mut starts = seed_bases(rho, sigma);
    starts.extend(extra_seed);
    let mut rand = rng(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    starts.extend((0..opts.restarts).map(|_| random_unitary(d, &mut rand)));
    let mut best: Option<(f64, Frame)> = None;
    for u in starts {
        let mut frame = Frame::new(u, re, se);
        let v = local_search(&mut frame, &pairs, &obj, re, se);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, frame));
        }
    }
    let (value, frame) = best.expect("at least one start");
    MeasuredOptimum {
        value,
        outcomes_rho: Frame::diag(&frame.r),
        outcomes_sigma: Frame::diag(&frame.s),
        basis: frame.u,
        restarts_used: opts.restarts,
    }
}

/// D^meas_α(ρ‖σ) = max over orthonormal bases of the classical D_α of the
/// outcome distributions. Seeded with the best test found, so the result is
/// never below [`test_divergence_quantum`].
pub fn measured_divergence(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    opts: &OptimizerOptions,
) -> Result<MeasuredOptimum> {
    check_alpha_open_unit(alpha)?;
    check_optimizer_dims(rho, sigma, opts)?;
    let test = optimize_test(rho, sigma, alpha, opts);
    let m = optimize_pvm(
        rho,
        sigma,
        |r, s| classical_renyi(r, s, alpha),
        Some(test.u),
        opts,
    );
    if m.value < test.value - 1e-6 {
        return Err(Error::InvariantViolation(format!(
            "measured optimum {} below test optimum {}",
            m.value, test.value
        )));
    }
    Ok(m)
}

/// Measured relative entropy, max over bases of the classical relative
/// entropy of the outcomes.
pub fn measured_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    opts: &OptimizerOptions,
) -> Result<MeasuredOptimum> {
    check_optimizer_dims(rho, sigma, opts)?;
    Ok(optimize_pvm(rho, sigma, classical_relative_entropy, None, opts))
}

/// One row of the n-copy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NCopyRow {
    pub n: usize,
    /// (1/n) D^test_α(p^{⊗n} ‖ q^{⊗n}).
    pub dtest_per_copy: f64,
    /// D_α − dtest_per_copy.
    pub gap_to_dalpha: f64,
    /// Max of dtest_per_copy over rows so far: a lower bound on D̂ᵗᵉˢᵗ_α.
    pub running_max: f64,
    /// Cross-checked against enumeration of all subsets of Ωⁿ.
    pub certified: bool,
}

/// (1/n) D^test_α(p^{⊗n}‖q^{⊗n}) over unions of likelihood-ratio-sorted type
/// classes, in the log domain.
pub fn ncopy_test_divergence(p: &ClassicalState, q: &ClassicalState, alpha: f64, n: usize) -> Result<f64> {
    check_alpha_open_unit(alpha)?;
    let types = joint_types_by_ratio(p, q, n)?;
    let m = types.len();
    let lp: Vec<f64> = types.iter().map(|t| t.class_log_p()).collect();
    let lq: Vec<f64> = types.iter().map(|t| t.class_log_q()).collect();
    let mut suf_p = vec![f64::NEG_INFINITY; m + 1];
    let mut suf_q = vec![f64::NEG_INFINITY; m + 1];
    for i in (0..m).rev() {
        suf_p[i] = log_add_exp(suf_p[i + 1], lp[i]);
        suf_q[i] = log_add_exp(suf_q[i + 1], lq[i]);
    }
    let (mut pre_p, mut pre_q) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut best = 0.0f64;
    for i in 0..m.saturating_sub(1) {
        pre_p = log_add_exp(pre_p, lp[i]);
        pre_q = log_add_exp(pre_q, lq[i]);
        let (ap, aq) = (suf_p[i + 1], suf_q[i + 1]);
        if pre_p == pre_q && ap == aq {
            continue;
        }
        let head = alpha * pre_p + (1.0 - alpha) * pre_q;
        let tail = alpha * ap + (1.0 - alpha) * aq;
        let v = log_add_exp(head, tail) / (alpha - 1.0);
        if v > best {
            best = v;
        }
    }
    Ok(best / n as f64)
}

/// Per-copy test-measured values for n = 1..=n_max.
pub fn ncopy_table_classical(p: &ClassicalState, q: &ClassicalState, alpha: f64, n_max: usize) -> Result<Vec<NCopyRow>> {
    check_alpha_open_unit(alpha)?;
    let d_alpha = PsiProfile::from_classical(p, q)?.renyi(alpha);
    let mut rows = Vec::with_capacity(n_max);
    let mut running = 0.0f64;
    for n in 1..=n_max {
        let v = ncopy_test_divergence(p, q, alpha, n)?;
        let atoms = (p.len() as f64).powi(n as i32);
        let certified = atoms <= tol::EXHAUSTIVE_ATOMS as f64;
        if certified {
            let (pn, qn) = (p.tensor_power(n)?, q.tensor_power(n)?);
            let flat = exhaustive_search(pn.weights(), qn.weights(), alpha).value / n as f64;
            if (flat - v).abs() > 1e-12 {
                return Err(Error::InvariantViolation(format!(
                    "n = {n}: type-class value {v} differs from enumeration {flat}"
                )));
            }
        }
        running = running.max(v);
        rows.push(NCopyRow {
            n,
            dtest_per_copy: v,
            gap_to_dalpha: d_alpha - v,
            running_max: running,
            certified,
        });
    }
    Ok(rows)
}

/// Which case of the single-state characterization of D̄ᵗᵉˢᵗ = D_α applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProportionalCase {
    /// ρ(ω) ∈ {0, κσ(ω)}.
    CaseA,
    /// σ(ω) ∈ {0, ηρ(ω)}.
    CaseB,
    Neither,
}

/// Two-level likelihood-ratio structure of a classical pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    /// Equal supports and at most two distinct ratios p(ω)/q(ω).
    pub condition_two_level: bool,
    /// Labels carrying the larger ratio c₀.
    pub omega0: Option<Vec<String>>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub cor_oll_case: ProportionalCase,
    pub kappa_or_eta: Option<f64>,
    /// Distinct log-ratio levels found on the common support.
    pub levels: usize,
}

/// Clusters sorted values: a new cluster starts when the gap to the previous
/// value exceeds `tol`. Returns cluster representatives (first member).
fn clusters(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut prev = f64::NAN;
    for &x in sorted {
        if out.is_empty() || x - prev > tol {
            out.push(x);
        }
        prev = x;
    }
    out
}

pub fn equality_conditions(p: &ClassicalState, q: &ClassicalState) -> Result<EqualityReport> {
    equality_conditions_with_tolerance(p, q, tol::RATIO_CLUSTER)
}

pub fn equality_conditions_with_tolerance(
    p: &ClassicalState,
    q: &ClassicalState,
    cluster_tol: f64,
) -> Result<EqualityReport> {
    p.check_same_labels(q)?;
    let (pw, qw) = (p.weights(), q.weights());
    let common: Vec<usize> = (0..pw.len()).filter(|&i| pw[i] > 0.0 && qw[i] > 0.0).collect();
    let equal_supports = (0..pw.len()).all(|i| (pw[i] > 0.0) == (qw[i] > 0.0));
    let mut lr: Vec<f64> = common.iter().map(|&i| pw[i].ln() - qw[i].ln()).collect();
    lr.sort_by(f64::total_cmp);
    let levels = clusters(&lr, cluster_tol);
    let condition_two_level = equal_supports && !levels.is_empty() && levels.len() <= 2;

    let (mut omega0, mut c0, mut c1) = (None, None, None);
    if condition_two_level {
        let top = *levels.last().expect("non-empty");
        let boundary = if levels.len() == 2 { Some(levels[0]) } else { None };
        let in_top = |i: usize| match boundary {
            Some(low) => pw[i].ln() - qw[i].ln() - low > cluster_tol,
            None => true,
        };
        let labels: Vec<String> = common
            .iter()
            .filter(|&&i| in_top(i))
            .map(|&i| p.labels()[i].clone())
            .collect();
        // representative ratios as mass ratios on each part
        let (mut a0, mut b0, mut a1, mut b1) = (0.0, 0.0, 0.0, 0.0);
        for &i in &common {
            if in_top(i) {
                a0 += pw[i];
                b0 += qw[i];
            } else {
                a1 += pw[i];
                b1 += qw[i];
            }
        }
        let _ = top;
        omega0 = Some(labels);
        c0 = Some(a0 / b0);
        if boundary.is_some() {
            c1 = Some(a1 / b1);
        }
    }

    let uniform = |num: &[f64], den: &[f64]| -> Option<f64> {
        // num(ω) ∈ {0, k·den(ω)} with den > 0 wherever num > 0
        let idx: Vec<usize> = (0..num.len()).filter(|&i| num[i] > 0.0).collect();
        if idx.iter().any(|&i| den[i] <= 0.0) || idx.is_empty() {
            return None;
        }
        let mut r: Vec<f64> = idx.iter().map(|&i| num[i].ln() - den[i].ln()).collect();
        r.sort_by(f64::total_cmp);
        (r[r.len() - 1] - r[0] <= cluster_tol).then(|| {
            let s: f64 = idx.iter().map(|&i| num[i]).sum();
            let t: f64 = idx.iter().map(|&i| den[i]).sum();
            s / t
        })
    };
    let (cor_oll_case, kappa_or_eta) = if let Some(k) = uniform(pw, qw) {
        (ProportionalCase::CaseA, Some(k))
    } else if let Some(e) = uniform(qw, pw) {
        (ProportionalCase::CaseB, Some(e))
    } else {
        (ProportionalCase::Neither, None)
    };

    Ok(EqualityReport {
        condition_two_level,
        omega0,
        c0,
        c1,
        cor_oll_case,
        kappa_or_eta,
        levels: levels.len(),
    })
}

/// Residuals ‖(Tr σP)PρP − (Tr ρP)PσP‖₂ for P and for I − P.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionResiduals {
    pub residual: f64,
    pub residual_complement: f64,
}

pub fn optimal_projection_diagnostic(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: &HermitianOperator,
) -> Result<ProjectionResiduals> {
    check_dims(rho.dim(), p.dim())?;
    check_dims(sigma.dim(), p.dim())?;
    let t = Test::projection(p.clone())?;
    let one = |proj: &HermitianOperator| -> Result<f64> {
        let sp = sigma.op().trace_product(proj)?;
        let rp = rho.op().trace_product(proj)?;
        let a = rho.op().compress(proj)?;
        let b = sigma.op().compress(proj)?;
        let diff = a.entries().scale(sp) - b.entries().scale(rp);
        Ok(diff.norm())
    };
    Ok(ProjectionResiduals {
        residual: one(t.op())?,
        residual_complement: one(t.complement().op())?,
    })
}

/// Regime of a classical pair with respect to the test-measured
/// regularizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// p = q: every quantity vanishes.
    Identical,
    /// Two-level ratios with both parts non-trivial: D̂ = D_α at n = 1 and
    /// D̄ < D̂.
    TwoLevel,
    /// Equal supports, three or more ratio levels: every row and D̄ lie
    /// strictly below D_α.
    Generic,
    /// Unequal supports or a degenerate split; no claim.
    Unclassified,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub alpha: f64,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub dalpha: f64,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub regularized_test: f64,
    pub rows: Vec<NCopyRow>,
    pub dhat_lower_bound: f64,
    pub equality: EqualityReport,
    pub verdict: Verdict,
    /// Verdict assertions that failed against the computed numbers.
    pub violations: Vec<String>,
}

/// Tolerances of [`gap_explorer_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    pub ratio_cluster: f64,
    pub verdict_margin: f64,
    pub method_residual: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            ratio_cluster: tol::RATIO_CLUSTER,
            verdict_margin: tol::VERDICT_MARGIN,
            method_residual: tol::METHOD_RESIDUAL,
        }
    }
}

pub fn gap_explorer(p: &ClassicalState, q: &ClassicalState, alpha: f64, n_max: usize) -> Result<GapReport> {
    gap_explorer_with(p, q, alpha, n_max, &GapOptions::default())
}

pub fn gap_explorer_with(
    p: &ClassicalState,
    q: &ClassicalState,
    alpha: f64,
    n_max: usize,
    opts: &GapOptions,
) -> Result<GapReport> {
    check_alpha_open_unit(alpha)?;
    let profile = PsiProfile::from_classical(p, q)?;
    let dalpha = profile.renyi(alpha);
    let reg = regularized_test_with_tolerance(&profile, alpha, Method::Both, opts.method_residual)?.value;
    let rows = ncopy_table_classical(p, q, alpha, n_max)?;
    let dhat = rows.iter().map(|r| r.dtest_per_copy).fold(0.0, f64::max);
    let equality = equality_conditions_with_tolerance(p, q, opts.ratio_cluster)?;
    let margin = opts.verdict_margin;

    let verdict = if profile.identical {
        Verdict::Identical
    } else if equality.condition_two_level && equality.c1.is_some() {
        Verdict::TwoLevel
    } else if !equality.condition_two_level && equality.levels >= 3 && (0..p.len()).all(|i| (p.weights()[i] > 0.0) == (q.weights()[i] > 0.0)) {
        Verdict::Generic
    } else {
        Verdict::Unclassified
    };

    let mut violations = Vec::new();
    match verdict {
        Verdict::Identical => {
            if dalpha.abs() > margin || reg.abs() > margin || dhat.abs() > margin {
                violations.push("identical pair with non-zero quantities".to_string());
            }
        }
        Verdict::TwoLevel => {
            if let Some(first) = rows.first() {
                if (first.dtest_per_copy - dalpha).abs() > margin {
                    violations.push(format!(
                        "row n=1 = {} differs from D_alpha = {dalpha}",
                        first.dtest_per_copy
                    ));
                }
            }
            if reg >= dalpha - margin {
                violations.push(format!("regularized {reg} not below D_alpha = {dalpha}"));
            }
            if dhat < reg - margin {
                violations.push(format!("D-hat lower bound {dhat} below regularized {reg}"));
            }
        }
        Verdict::Generic => {
            for r in &rows {
                if r.gap_to_dalpha <= margin {
                    violations.push(format!("row n={} not below D_alpha (gap {})", r.n, r.gap_to_dalpha));
                }
            }
            if reg >= dalpha - margin {
                violations.push(format!("regularized {reg} not below D_alpha = {dalpha}"));
            }
        }
        Verdict::Unclassified => {}
    }

    Ok(GapReport {
        alpha,
        dalpha,
        regularized_test: reg,
        rows,
        dhat_lower_bound: dhat,
        equality,
        verdict,
        violations,
    })
}
