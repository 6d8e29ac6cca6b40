//! Error exponents of binary state discrimination and the regularized
//! test-measured Rényi divergence.
//!
//! The regularized divergence D̄ᵗᵉˢᵗ_α is the unique r at which the Hoeffding
//! curve H_r crosses the line ((1−α)/α)·r. It is computed either by bisecting
//! that crossing or from the closed supremum
//! α·sup_{t∈(0,1)} (t−1)D_t / (t(2α−1) − α); the two must agree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::divergence::PsiProfile;
use crate::error::{check_alpha_open_unit, Error, Result};
use crate::operator::{
    apply_test, joint_types_by_ratio, ClassicalState, DensityMatrix, JointType, Test,
};
use crate::search::{bisect_decreasing, golden_max, grid_then_golden, log_add_exp, log_sum_exp};
use crate::tol;

/// φ(c) = max_{α∈[0,1]} {c(α−1) − ψ(α)}.
pub fn legendre_phi(profile: &PsiProfile, c: f64) -> f64 {
    if profile.orthogonal {
        return f64::INFINITY;
    }
    golden_max(|a| c * (a - 1.0) - profile.psi_at(a), 0.0, 1.0, tol::GOLDEN).value
}

/// φ₊(c) = max_{α∈[0,1]} {cα − ψ(α)} = φ(c) + c.
pub fn legendre_phi_plus(profile: &PsiProfile, c: f64) -> f64 {
    legendre_phi(profile, c) + c
}

/// Where the supremum defining H_r is attained, in the u = 1 − 1/α
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "u", rename_all = "kebab-case")]
pub enum UStar {
    Interior(f64),
    /// u → 0⁻ (α → 1).
    ZeroMinus,
    /// u → −∞ (α → 0).
    NegInfinity,
    /// H_r = +∞; no maximizer.
    Unbounded,
}

/// One sample of the Hoeffding curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoeffdingPoint {
    pub r: f64,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub h: f64,
    pub u_star: UStar,
    /// c_r = r − H_r, the point where φ(c_r) = H_r; present when H_r < ∞.
    pub c_r: Option<f64>,
}

impl HoeffdingPoint {
    fn new(r: f64, h: f64, u_star: UStar) -> Self {
        let c_r = h.is_finite().then_some(r - h);
        Self { r, h, u_star, c_r }
    }
}

/// H_r at r = D₀, the α → 0 limit −ψ′(0) − ψ(0).
fn hoeffding_at_d0(profile: &PsiProfile) -> f64 {
    -profile.psi_prime_at(0.0) - profile.psi_at(0.0)
}

/// H_r = sup_{u<0} {ur − ψ̃(u)}.
///
/// Evaluated as ((α−1)r − ψ(α))/α with α = 1/(1−u), rewritten as
/// r − (r − D₀)/α − (ψ(α) − ψ(0))/α so that nothing cancels as α → 0.
pub fn hoeffding(profile: &PsiProfile, r: f64) -> HoeffdingPoint {
    if profile.orthogonal {
        return HoeffdingPoint::new(r, f64::INFINITY, UStar::Unbounded);
    }
    let d0 = -profile.psi_at(0.0);
    if r < d0 - 1e-13 {
        return HoeffdingPoint::new(r, f64::INFINITY, UStar::Unbounded);
    }
    if r <= d0 + 1e-13 {
        return HoeffdingPoint::new(r, hoeffding_at_d0(profile), UStar::NegInfinity);
    }
    let h_zero = -profile.psi_at(1.0);
    if profile.supp_rho_le_sigma && r >= profile.relative_entropy() {
        return HoeffdingPoint::new(r, h_zero.max(0.0), UStar::ZeroMinus);
    }
    let delta = r - d0;
    let g = |u: f64| -> f64 {
        if u == 0.0 {
            return h_zero;
        }
        let a = 1.0 / (1.0 - u);
        r - delta / a - profile.psi_increment(a) / a
    };
    // Geometric bracketing on the concave g: find u_k = −2^k with
    // g(u_{k+1}) ≤ g(u_k); the maximum then lies in [u_{k+1}, u_{k−1}].
    let mut prev = 0.0;
    let mut g_prev = h_zero;
    let mut u = -1.0;
    let mut gu = g(u);
    let (lo, hi) = if gu <= g_prev {
        (u, 0.0)
    } else {
        loop {
            let next = 2.0 * u;
            let gn = g(next);
            if gn <= gu || next < -1e15 {
                break (next, prev);
            }
            prev = u;
            g_prev = gu;
            u = next;
            gu = gn;
        }
    };
    let _ = g_prev;
    let m = golden_max(g, lo, hi, tol::GOLDEN * lo.abs().max(1.0));
    let u_star = if m.arg == 0.0 {
        UStar::ZeroMinus
    } else if m.arg <= -1e15 {
        UStar::NegInfinity
    } else {
        UStar::Interior(m.arg)
    };
    HoeffdingPoint::new(r, m.value.max(h_zero).max(0.0), u_star)
}

/// C = −min_{α∈[0,1]} ψ(α).
pub fn chernoff(profile: &PsiProfile) -> f64 {
    if profile.identical {
        return 0.0;
    }
    if profile.orthogonal {
        return f64::INFINITY;
    }
    golden_max(|a| -profile.psi_at(a), 0.0, 1.0, tol::GOLDEN)
        .value
        .max(0.0)
}

/// Algorithm used for the regularized test-measured divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Bisection of H_r = ((1−α)/α) r.
    HoeffdingRoot,
    /// α·sup_t (t−1)D_t / (t(2α−1) − α).
    SalzmannDatta,
    /// Both, with a residual check.
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::HoeffdingRoot => "hoeffding-root",
            Method::SalzmannDatta => "salzmann-datta",
            Method::Both => "both",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hoeffding-root" => Ok(Method::HoeffdingRoot),
            "salzmann-datta" => Ok(Method::SalzmannDatta),
            "both" => Ok(Method::Both),
            _ => Err(Error::UnknownName {
                kind: "method",
                name: s.to_string(),
            }),
        }
    }
}

/// Which branch produced a regularized value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Identical,
    Orthogonal,
    /// ψ affine with supp ρ ⊆ supp σ: D_α ≡ log κ.
    ConstantKappa,
    /// H_{D₀} ≤ ((1−α)/α)·D₀: the value is D₀.
    D0Boundary,
    /// Interior crossing of H_r and ((1−α)/α)·r.
    Crossing,
    /// H_{D_α} ≥ ((1−α)/α)·D_α: the value is D_α.
    UpperEndpoint,
    /// Closed supremum over t.
    Supremum,
}

/// Value of D̄ᵗᵉˢᵗ_α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedResult {
    pub alpha: f64,
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub value: f64,
    pub method: Method,
    pub regime: Regime,
    /// The crossing point r_α (hoeffding-root only).
    pub r_alpha: Option<f64>,
    /// |hoeffding-root − salzmann-datta| when both ran.
    pub residual: Option<f64>,
}

/// D̄ᵗᵉˢᵗ_α with the default cross-check tolerance.
pub fn regularized_test(profile: &PsiProfile, alpha: f64, method: Method) -> Result<RegularizedResult> {
    regularized_test_with_tolerance(profile, alpha, method, tol::METHOD_RESIDUAL)
}

pub fn regularized_test_states(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    method: Method,
) -> Result<RegularizedResult> {
    regularized_test(&PsiProfile::from_states(rho, sigma)?, alpha, method)
}

/// D̄ᵗᵉˢᵗ_α; with [`Method::Both`] an [`Error::InvariantViolation`] is raised
/// when the two methods differ by more than `residual_tol`.
pub fn regularized_test_with_tolerance(
    profile: &PsiProfile,
    alpha: f64,
    method: Method,
    residual_tol: f64,
) -> Result<RegularizedResult> {
    check_alpha_open_unit(alpha)?;
    let trivial = |value, regime| RegularizedResult {
        alpha,
        value,
        method,
        regime,
        r_alpha: None,
        residual: (method == Method::Both).then_some(0.0),
    };
    if profile.identical {
        return Ok(trivial(0.0, Regime::Identical));
    }
    if profile.orthogonal {
        return Ok(trivial(f64::INFINITY, Regime::Orthogonal));
    }
    if let Some(k) = profile.kappa {
        return Ok(trivial(k.ln().max(0.0), Regime::ConstantKappa));
    }
    match method {
        Method::HoeffdingRoot => hoeffding_root(profile, alpha),
        Method::SalzmannDatta => Ok(salzmann_datta(profile, alpha)),
        Method::Both => {
            let a = hoeffding_root(profile, alpha)?;
            let b = salzmann_datta(profile, alpha);
            let residual = (a.value - b.value).abs();
            if residual > residual_tol {
                return Err(Error::InvariantViolation(format!(
                    "regularized methods disagree at alpha = {alpha}: hoeffding-root {} vs salzmann-datta {} (residual {residual:e})",
                    a.value, b.value
                )));
            }
            Ok(RegularizedResult {
                method: Method::Both,
                residual: Some(residual),
                ..a
            })
        }
    }
}

fn hoeffding_root(profile: &PsiProfile, alpha: f64) -> Result<RegularizedResult> {
    let lam = (1.0 - alpha) / alpha;
    let d0 = profile.d_zero();
    let d_alpha = profile.renyi(alpha);
    let done = |value: f64, regime| {
        Ok(RegularizedResult {
            alpha,
            value,
            method: Method::HoeffdingRoot,
            regime,
            r_alpha: Some(value),
            residual: None,
        })
    };
    let g_lo = hoeffding_at_d0(profile) - lam * d0;
    if d0 > 0.0 && g_lo <= 0.0 {
        return done(d0, Regime::D0Boundary);
    }
    let gfun = |r: f64| hoeffding(profile, r).h - lam * r;
    let g_hi = gfun(d_alpha);
    if g_hi >= 0.0 {
        return done(d_alpha, Regime::UpperEndpoint);
    }
    if !(g_lo > 0.0) || d_alpha <= d0 {
        return Err(Error::BracketFailure {
            lo: d0,
            hi: d_alpha,
            g_lo,
            g_hi,
        });
    }
    let root = bisect_decreasing(gfun, d0, d_alpha, tol::BISECTION * 1e-2);
    done(root, Regime::Crossing)
}

/// The objective α ψ(t) / (t(2α−1) − α) on t ∈ [0, 1]; its t → 0 endpoint is
/// D₀ and its t → 1 endpoint is α ψ(1)/(α − 1).
fn salzmann_datta(profile: &PsiProfile, alpha: f64) -> RegularizedResult {
    let f = |t: f64| {
        let den = t * (2.0 * alpha - 1.0) - alpha;
        debug_assert!(den < 0.0);
        alpha * profile.psi_at(t) / den
    };
    let m = grid_then_golden(f, 0.0, 1.0, 1023, 1e-12);
    RegularizedResult {
        alpha,
        value: m.value.max(0.0),
        method: Method::SalzmannDatta,
        regime: Regime::Supremum,
        r_alpha: None,
        residual: None,
    }
}

/// Error probabilities of a Hoeffding test and the bounds they must obey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoeffdingTestReport {
    pub n: usize,
    pub r: f64,
    pub alpha: f64,
    /// log of the threshold e^{n(r+ψ(α))/α}.
    pub log_threshold: f64,
    /// Tr σ^{⊗n} T.
    pub type_ii: f64,
    /// Tr ρ^{⊗n} (I − T).
    pub type_i: f64,
    /// e^{−nr}.
    pub bound_ii: f64,
    /// e^{−n((α−1)/α)(r − D_α)}.
    pub bound_i: f64,
}

impl HoeffdingTestReport {
    pub fn type_ii_ok(&self, slack: f64) -> bool {
        self.type_ii <= self.bound_ii + slack
    }

    pub fn type_i_ok(&self, slack: f64) -> bool {
        self.type_i <= self.bound_i + slack
    }
}

fn hoeffding_setup(profile: &PsiProfile, n: usize, r: f64, alpha: f64) -> Result<(f64, f64, f64)> {
    check_alpha_open_unit(alpha)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            range: "r > 0",
        });
    }
    let nf = n as f64;
    let psi = profile.psi_at(alpha);
    let log_threshold = nf * (r + psi) / alpha;
    let d_alpha = profile.renyi(alpha);
    let bound_i = (-nf * ((alpha - 1.0) / alpha) * (r - d_alpha)).exp();
    Ok((log_threshold, (-nf * r).exp(), bound_i))
}

/// Hoeffding test for commuting states: the set of sequences where
/// p^{⊗n} > e^{n(r+ψ(α))/α} q^{⊗n}, evaluated type class by type class.
pub fn hoeffding_test_classical(
    p: &ClassicalState,
    q: &ClassicalState,
    n: usize,
    r: f64,
    alpha: f64,
) -> Result<HoeffdingTestReport> {
    let profile = PsiProfile::from_classical(p, q)?;
    let (log_threshold, bound_ii, bound_i) = hoeffding_setup(&profile, n, r, alpha)?;
    let types = joint_types_by_ratio(p, q, n)?;
    let included = |t: &JointType| t.log_ratio() > log_threshold;
    let log_ii = log_sum_exp(types.iter().filter(|t| included(t)).map(JointType::class_log_q));
    let log_i = log_sum_exp(types.iter().filter(|t| !included(t)).map(JointType::class_log_p));
    Ok(HoeffdingTestReport {
        n,
        r,
        alpha,
        log_threshold,
        type_ii: log_ii.exp(),
        type_i: log_i.exp(),
        bound_ii,
        bound_i,
    })
}

/// Hoeffding test as the projection onto the positive part of
/// ρ^{⊗n} − e^{n(r+ψ(α))/α} σ^{⊗n}, computed densely.
pub fn hoeffding_test_dense(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    r: f64,
    alpha: f64,
) -> Result<(Test, HoeffdingTestReport)> {
    let profile = PsiProfile::from_states(rho, sigma)?;
    let (log_threshold, bound_ii, bound_i) = hoeffding_setup(&profile, n, r, alpha)?;
    let rn = rho.tensor_power(n)?;
    let sn = sigma.tensor_power(n)?;
    let diff = rn.op().sub_scaled(log_threshold.exp(), sn.op())?;
    let t = Test::new(diff.positive_part_projection())?;
    let (_, type_i) = apply_test(rn.op(), &t)?;
    let (type_ii, _) = apply_test(sn.op(), &t)?;
    Ok((
        t,
        HoeffdingTestReport {
            n,
            r,
            alpha,
            log_threshold,
            type_ii: type_ii.max(0.0),
            type_i: type_i.max(0.0),
            bound_ii,
            bound_i,
        },
    ))
}

/// Dispatches to the type-class evaluation for diagonal inputs and to the
/// dense construction otherwise.
pub fn hoeffding_test(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    r: f64,
    alpha: f64,
) -> Result<HoeffdingTestReport> {
    match (rho.to_classical(), sigma.to_classical()) {
        (Some(p), Some(q)) => hoeffding_test_classical(&p, &q, n, r, alpha),
        _ => Ok(hoeffding_test_dense(rho, sigma, n, r, alpha)?.1),
    }
}

/// (1/n) log min_T {Tr p^{⊗n}(I−T) + e^{nb} Tr q^{⊗n} T}; the minimum is
/// Σ_x min(p^{⊗n}(x), e^{nb} q^{⊗n}(x)).
pub fn nagaoka_objective_classical(p: &ClassicalState, q: &ClassicalState, n: usize, b: f64) -> Result<f64> {
    let types = joint_types_by_ratio(p, q, n)?;
    let nb = n as f64 * b;
    let lm = log_sum_exp(types.iter().map(|t| {
        t.class.log_multiplicity + t.log_p.min(nb + t.log_q)
    }));
    Ok(lm / n as f64)
}

/// Dense version of [`nagaoka_objective_classical`], using the projection
/// onto the positive part of ρ^{⊗n} − e^{nb} σ^{⊗n}.
pub fn nagaoka_objective_dense(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, b: f64) -> Result<f64> {
    let rn = rho.tensor_power(n)?;
    let sn = sigma.tensor_power(n)?;
    let c = (n as f64 * b).exp();
    let diff = rn.op().sub_scaled(c, sn.op())?;
    let t = Test::new(diff.positive_part_projection())?;
    let (_, miss) = apply_test(rn.op(), &t)?;
    let (hit, _) = apply_test(sn.op(), &t)?;
    Ok((miss.max(0.0) + c * hit.max(0.0)).ln() / n as f64)
}

pub fn nagaoka_objective(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, b: f64) -> Result<f64> {
    match (rho.to_classical(), sigma.to_classical()) {
        (Some(p), Some(q)) => nagaoka_objective_classical(&p, &q, n, b),
        _ => nagaoka_objective_dense(rho, sigma, n, b),
    }
}

/// Minimizes (a − λP)^γ + b + λQ over λ ∈ [0, 1].
fn min_fractional(a: f64, b: f64, pm: f64, qm: f64, gamma: f64) -> f64 {
    let f = |l: f64| (a - l * pm).max(0.0).powf(gamma) + b + l * qm;
    let m = golden_max(|l| -f(l), 0.0, 1.0, 1e-13);
    (-m.value).min(f(0.0)).min(f(1.0))
}

/// −(1/n) log min_T {(Tr p^{⊗n}(I−T))^{α/(1−α)} + Tr q^{⊗n} T} for commuting
/// states.
///
/// For a fixed Tr p^{⊗n}T the second term is minimized by a Neyman–Pearson
/// test, so the search runs over likelihood-ratio thresholds with one
/// fractionally included level.
pub fn salzmann_datta_finite_n(p: &ClassicalState, q: &ClassicalState, alpha: f64, n: usize) -> Result<f64> {
    check_alpha_open_unit(alpha)?;
    let types = joint_types_by_ratio(p, q, n)?;
    // merge classes that share a likelihood ratio into levels
    let mut levels: Vec<(f64, f64, f64)> = Vec::new(); // (ratio, log P, log Q)
    for t in &types {
        let (lr, lp, lq) = (t.log_ratio(), t.class_log_p(), t.class_log_q());
        match levels.last_mut() {
            Some(last) if last.0 == lr || (last.0 - lr).abs() <= 1e-12 * lr.abs().max(1.0) => {
                last.1 = log_add_exp(last.1, lp);
                last.2 = log_add_exp(last.2, lq);
            }
            _ => levels.push((lr, lp, lq)),
        }
    }
    let pm: Vec<f64> = levels.iter().map(|l| l.1.exp()).collect();
    let qm: Vec<f64> = levels.iter().map(|l| l.2.exp()).collect();
    let k = levels.len();
    // suffix p-mass (excluded) and prefix q-mass (included)
    let mut p_after = vec![0.0; k + 1];
    for i in (0..k).rev() {
        p_after[i] = p_after[i + 1] + pm[i];
    }
    let gamma = alpha / (1.0 - alpha);
    let mut best = f64::INFINITY;
    let mut q_before = 0.0;
    for i in 0..k {
        // levels < i fully included, level i fractional
        let v = min_fractional(p_after[i], q_before, pm[i], qm[i], gamma);
        best = best.min(v);
        q_before += qm[i];
    }
    best = best.min(q_before); // T = I
    Ok(-best.ln() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Complex64;
    use crate::random::{random_classical, random_density, rng};
    use proptest::prelude::*;

    fn cl(w: &[f64]) -> ClassicalState {
        ClassicalState::from_weights(w.to_vec()).unwrap()
    }

    fn two_level() -> PsiProfile {
        PsiProfile::from_classical(&cl(&[0.5, 0.5]), &cl(&[0.25, 0.75])).unwrap()
    }

    fn grid_hoeffding(p: &PsiProfile, r: f64) -> f64 {
        (1..200_000)
            .map(|k| {
                let a = k as f64 / 200_000.0;
                ((a - 1.0) * r - p.psi_at(a)) / a
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .max(-p.psi_at(1.0))
    }

    #[test]
    fn phi_of_identical_pair() {
        let p = PsiProfile::from_classical(&cl(&[0.3, 0.7]), &cl(&[0.3, 0.7])).unwrap();
        for c in [-1.0, -0.2, 0.0, 0.5, 2.0] {
            assert!((legendre_phi(&p, c) - (-c).max(0.0)).abs() < 1e-12);
            assert_eq!(legendre_phi_plus(&p, c), legendre_phi(&p, c) + c);
        }
    }

    #[test]
    fn phi_plus_shape() {
        let p = two_level();
        let d0 = -p.psi_at(0.0);
        let slope0 = p.psi_prime_at(0.0);
        for k in 0..20 {
            let c = slope0 - 1.0 + k as f64 * 0.05;
            let v = legendre_phi_plus(&p, c);
            if c <= slope0 {
                assert!((v - d0).abs() < 1e-10);
            }
        }
        let mut prev = legendre_phi_plus(&p, slope0);
        for k in 1..20 {
            let v = legendre_phi_plus(&p, slope0 + k as f64 * 0.05);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn phi_at_zero_is_chernoff() {
        let p = two_level();
        let grid_min = (0..=100_000)
            .map(|k| p.psi_at(k as f64 / 100_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!((legendre_phi(&p, 0.0) + grid_min).abs() < 1e-9);
        assert!((chernoff(&p) + grid_min).abs() < 1e-9);
    }

    #[test]
    fn hoeffding_special_points() {
        let p = two_level();
        let d = p.relative_entropy();
        assert_eq!(hoeffding(&p, d).h, 0.0);
        assert_eq!(hoeffding(&p, d).u_star, UStar::ZeroMinus);
        let d0 = -p.psi_at(0.0);
        let h0 = hoeffding(&p, d0);
        assert!((h0.h - (-p.psi_prime_at(0.0) - p.psi_at(0.0))).abs() < 1e-14);
        assert_eq!(hoeffding(&p, d0 - 1e-3).h, f64::INFINITY);
        let h = hoeffding(&p, 0.2);
        assert!((h.h - grid_hoeffding(&p, 0.2)).abs() < 1e-7);
        assert!((h.c_r.unwrap() - (0.2 - h.h)).abs() < 1e-15);
        // φ(c_r) = H_r
        assert!((legendre_phi(&p, h.c_r.unwrap()) - h.h).abs() < 1e-8);
    }

    #[test]
    fn hoeffding_near_d0_is_continuous() {
        let p = PsiProfile::from_classical(&cl(&[0.5, 0.3, 0.2, 0.0]), &cl(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let d0 = p.d_zero();
        assert!(d0 > 0.0);
        // H has infinite slope at D₀, so the gap closes like √ε
        let at = hoeffding(&p, d0).h;
        let mut last_gap = f64::INFINITY;
        for eps in [1e-4, 1e-6, 1e-8, 1e-10] {
            let near = hoeffding(&p, d0 + eps).h;
            let gap = at - near;
            assert!(gap >= -1e-9 && gap < last_gap, "eps {eps}: {at} vs {near}");
            last_gap = gap;
        }
        assert!(last_gap < 1e-4);
    }

    #[test]
    fn chernoff_fixed_point() {
        let p = two_level();
        let c = chernoff(&p);
        assert!((hoeffding(&p, c).h - c).abs() < 1e-7);
        assert!((c - 0.0346882).abs() < 1e-6);
    }

    #[test]
    fn regularized_special_cases() {
        let p = PsiProfile::from_classical(&cl(&[0.3, 0.7]), &cl(&[0.3, 0.7])).unwrap();
        assert_eq!(regularized_test(&p, 0.3, Method::Both).unwrap().value, 0.0);

        let p = two_level();
        let r = regularized_test(&p, 0.5, Method::Both).unwrap();
        assert!((r.value - chernoff(&p)).abs() < 1e-7);

        let s = 0.5f64.sqrt();
        let zero = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let plus = DensityMatrix::pure(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap();
        let pp = PsiProfile::from_states(&zero, &plus).unwrap();
        for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let v = regularized_test(&pp, a, Method::Both).unwrap().value;
            let expected = if a <= 0.5 { 2f64.ln() } else { a / (1.0 - a) * 2f64.ln() };
            assert!((v - expected).abs() < 1e-8, "alpha {a}: {v} vs {expected}");
        }
    }

    #[test]
    fn regularized_alpha_checked() {
        assert!(regularized_test(&two_level(), 1.0, Method::Both).is_err());
    }

    #[test]
    fn hoeffding_test_degenerate_pair() {
        let p = cl(&[0.3, 0.7]);
        let rep = hoeffding_test_classical(&p, &p, 3, 0.1, 0.5).unwrap();
        assert_eq!(rep.type_ii, 0.0);
        assert!((rep.type_i - 1.0).abs() < 1e-12);
        assert!(rep.type_i_ok(1e-12) && rep.type_ii_ok(1e-12));
    }

    #[test]
    fn hoeffding_test_classical_bounds() {
        let rep = hoeffding_test_classical(&cl(&[0.5, 0.5]), &cl(&[0.25, 0.75]), 4, 0.1, 0.5).unwrap();
        assert!(rep.type_ii_ok(1e-12) && rep.type_i_ok(1e-12));
        // the same test, evaluated on the flat product distribution
        let pn = cl(&[0.5, 0.5]).tensor_power(4).unwrap();
        let qn = cl(&[0.25, 0.75]).tensor_power(4).unwrap();
        let thr = rep.log_threshold.exp();
        let (mut a, mut b) = (0.0, 0.0);
        for (x, y) in pn.weights().iter().zip(qn.weights()) {
            if x - thr * y > 0.0 {
                b += y;
            } else {
                a += x;
            }
        }
        assert!((a - rep.type_i).abs() < 1e-14 && (b - rep.type_ii).abs() < 1e-14);
    }

    #[test]
    fn hoeffding_test_dense_bounds() {
        let mut r = rng(5);
        let rho = random_density(2, &mut r);
        let sigma = random_density(2, &mut r);
        for rr in [0.05, 0.1, 0.2] {
            let (t, rep) = hoeffding_test_dense(&rho, &sigma, 3, rr, 0.5).unwrap();
            assert_eq!(t.dim(), 8);
            assert!(t.idempotency_residual() < 1e-10);
            assert!(rep.type_ii_ok(1e-12) && rep.type_i_ok(1e-12));
        }
    }

    #[test]
    fn nagaoka_trivial_bounds() {
        let (p, q) = (cl(&[0.5, 0.5]), cl(&[0.25, 0.75]));
        for n in 1..4 {
            let v = nagaoka_objective_classical(&p, &q, n, -50.0).unwrap();
            assert!(v <= (-50.0f64).min(0.0) + 1e-12);
            assert!(nagaoka_objective_classical(&p, &p, n, 0.0).unwrap().abs() < 1e-15);
        }
        // Σ min(p, q) ≤ Σ p^α q^{1−α}, so the b = 0 objective sits below −C
        // and approaches it as n grows
        let target = -chernoff(&two_level());
        for n in 1..=8 {
            let v = nagaoka_objective_classical(&p, &q, n, 0.0).unwrap();
            assert!(v <= target + 1e-12, "n {n}");
            if n == 8 {
                assert!(target - v < 0.1);
            }
        }
        // dense path agrees with the type-class path
        let d = nagaoka_objective_dense(&p.to_density(), &q.to_density(), 3, 0.1).unwrap();
        let c = nagaoka_objective_classical(&p, &q, 3, 0.1).unwrap();
        assert!((d - c).abs() < 1e-12);
    }

    fn sd_brute(p: &[f64], q: &[f64], alpha: f64) -> f64 {
        // all deterministic tests plus a dense fractional scan of each atom
        let k = p.len();
        let gamma = alpha / (1.0 - alpha);
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << k) {
            for free in 0..k {
                for s in 0..=10_000 {
                    let lam = s as f64 / 10_000.0;
                    let (mut a, mut b) = (0.0, 0.0);
                    for i in 0..k {
                        let t = if i == free { lam } else if mask >> i & 1 == 1 { 1.0 } else { 0.0 };
                        a += p[i] * (1.0 - t);
                        b += q[i] * t;
                    }
                    best = best.min(a.powf(gamma) + b);
                }
            }
        }
        -best.ln()
    }

    #[test]
    fn salzmann_datta_n1_matches_scan() {
        for alpha in [0.3, 0.5, 0.7] {
            let v = salzmann_datta_finite_n(&cl(&[0.5, 0.5]), &cl(&[0.25, 0.75]), alpha, 1).unwrap();
            let b = sd_brute(&[0.5, 0.5], &[0.25, 0.75], alpha);
            assert!(v >= b - 1e-12 && v - b < 1e-6, "alpha {alpha}: {v} vs {b}");
        }
        let p = cl(&[0.3, 0.7]);
        assert!(salzmann_datta_finite_n(&p, &p, 0.3, 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn salzmann_datta_trends_to_regularized() {
        let (p, q) = (cl(&[0.5, 0.5]), cl(&[0.25, 0.75]));
        let reg = regularized_test(&two_level(), 0.3, Method::Both).unwrap().value;
        let v6 = salzmann_datta_finite_n(&p, &q, 0.3, 6).unwrap();
        assert!((v6 - reg).abs() < 0.05);
    }

    proptest! {
        #[test]
        fn methods_agree_on_random_pairs(seed in 0u64..200, d in 2usize..5, k in 1usize..10) {
            let mut r = rng(seed);
            let alpha = k as f64 / 10.0;
            let (rho, sigma) = (random_density(d, &mut r), random_density(d, &mut r));
            let p = PsiProfile::from_states(&rho, &sigma).unwrap();
            let v = regularized_test(&p, alpha, Method::Both).unwrap();
            prop_assert!(v.residual.unwrap() <= 1e-6);
            let da = p.renyi(alpha);
            prop_assert!(v.value <= da + 1e-8 && v.value >= 0.5 * da - 1e-8);
            prop_assert!(v.value >= p.d_zero() - 1e-8);
        }

        #[test]
        fn hoeffding_decreasing(seed in 0u64..200) {
            let mut r = rng(seed);
            let p = PsiProfile::from_classical(&random_classical(3, &mut r), &random_classical(3, &mut r)).unwrap();
            let (lo, hi) = (p.d_zero(), p.relative_entropy());
            let mut prev = f64::INFINITY;
            for i in 0..=20 {
                let h = hoeffding(&p, lo + (hi - lo) * i as f64 / 20.0).h;
                prop_assert!(h <= prev + 1e-12);
                prev = h;
            }
        }

        #[test]
        fn regularized_skew_symmetric(seed in 0u64..100, k in 1usize..10) {
            let mut r = rng(seed);
            let alpha = k as f64 / 10.0;
            let (rho, sigma) = (random_density(3, &mut r), random_density(3, &mut r));
            let p = PsiProfile::from_states(&rho, &sigma).unwrap();
            let a = regularized_test(&p, alpha, Method::HoeffdingRoot).unwrap().value;
            let b = regularized_test(&p.reversed(), 1.0 - alpha, Method::HoeffdingRoot).unwrap().value;
            prop_assert!(((1.0 - alpha) * a - alpha * b).abs() < 1e-7);
        }
    }
}
