//! Single-letter divergences of a pair of states.
//!
//! Everything that depends on α only through Tr ρ^α σ^{1−α} is evaluated from a
//! [`PsiProfile`]: the positive eigenvalues r_i of ρ, s_j of σ and the overlap
//! weights W_ij = |⟨u_i, v_j⟩|². One pair of eigendecompositions then serves
//! every α.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{check_dims, CMatrix, ClassicalState, DensityMatrix, HermitianOperator};
use crate::search::log_sum_exp;
use crate::tol;

/// Which divergence a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Standard,
    Sandwiched,
    Measured,
    Test,
    RelativeEntropy,
    #[serde(rename = "d0")]
    D0,
    #[serde(rename = "dmax")]
    Dmax,
    Chernoff,
    RegularizedTest,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Standard,
        Family::Sandwiched,
        Family::Measured,
        Family::Test,
        Family::RelativeEntropy,
        Family::D0,
        Family::Dmax,
        Family::Chernoff,
        Family::RegularizedTest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Standard => "standard",
            Family::Sandwiched => "sandwiched",
            Family::Measured => "measured",
            Family::Test => "test",
            Family::RelativeEntropy => "relative-entropy",
            Family::D0 => "d0",
            Family::Dmax => "dmax",
            Family::Chernoff => "chernoff",
            Family::RegularizedTest => "regularized-test",
        }
    }

    /// Whether the family takes an α parameter.
    pub fn has_alpha(self) -> bool {
        matches!(
            self,
            Family::Standard
                | Family::Sandwiched
                | Family::Measured
                | Family::Test
                | Family::RegularizedTest
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "family",
                name: s.to_string(),
            })
    }
}

/// A divergence value; `f64::INFINITY` is a legitimate value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceValue {
    #[serde(serialize_with = "crate::io::serialize_extended")]
    pub value: f64,
    pub family: Family,
    pub alpha: Option<f64>,
}

impl DivergenceValue {
    pub fn new(value: f64, family: Family, alpha: Option<f64>) -> Self {
        Self {
            value,
            family,
            alpha,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    /// log r_i
    a: f64,
    /// log s_j
    b: f64,
    /// log W_ij
    lw: f64,
}

/// Precomputed eigenvalues and overlaps of a pair (ρ, σ).
#[derive(Debug, Clone)]
pub struct PsiProfile {
    /// Positive eigenvalues of ρ.
    pub r: Vec<f64>,
    /// Positive eigenvalues of σ.
    pub s: Vec<f64>,
    /// W_ij = |⟨u_i, v_j⟩|² over positive-eigenvalue indices.
    pub w: Vec<Vec<f64>>,
    pub orthogonal: bool,
    pub supp_rho_le_sigma: bool,
    pub supp_sigma_le_rho: bool,
    pub psi_affine: bool,
    /// ρ = σ up to 1e−12 per entry.
    pub identical: bool,
    /// exp(−ψ(0)) when ψ is affine and supp ρ ⊆ supp σ; then D_α = log κ for
    /// every α.
    pub kappa: Option<f64>,
    /// Tr ρσ.
    pub tr_rho_sigma: f64,
    terms: Vec<Term>,
}

impl PsiProfile {
    pub fn from_states(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Self> {
        check_dims(rho.dim(), sigma.dim())?;
        let sr = rho.op().spectrum();
        let ss = sigma.op().spectrum();
        let ri: Vec<usize> = positive_indices(&sr.values);
        let si: Vec<usize> = positive_indices(&ss.values);
        let overlap = sr.vectors.adjoint() * &ss.vectors;
        let r: Vec<f64> = ri.iter().map(|&i| sr.values[i]).collect();
        let s: Vec<f64> = si.iter().map(|&j| ss.values[j]).collect();
        let w: Vec<Vec<f64>> = ri
            .iter()
            .map(|&i| si.iter().map(|&j| overlap[(i, j)].norm_sqr()).collect())
            .collect();

        let leak = |x: &DensityMatrix, y: &DensityMatrix| -> f64 {
            let p = y.op().support_projection();
            let d = x.dim();
            let comp = HermitianOperator::identity(d)
                .sub_scaled(1.0, &p)
                .expect("same dimension");
            x.op().compress(&comp).expect("same dimension").max_abs()
        };
        let supp_rho_le_sigma = leak(rho, sigma) <= tol::SUPPORT_INCLUSION;
        let supp_sigma_le_rho = leak(sigma, rho) <= tol::SUPPORT_INCLUSION;
        let identical = rho.op().max_abs_diff(sigma.op()) <= tol::IDENTICAL;
        Ok(Self::assemble(
            r,
            s,
            w,
            supp_rho_le_sigma,
            supp_sigma_le_rho,
            identical,
        ))
    }

    pub fn from_classical(p: &ClassicalState, q: &ClassicalState) -> Result<Self> {
        p.check_same_labels(q)?;
        let (pw, qw) = (p.weights(), q.weights());
        let ri: Vec<usize> = (0..pw.len()).filter(|&i| pw[i] > 0.0).collect();
        let si: Vec<usize> = (0..qw.len()).filter(|&j| qw[j] > 0.0).collect();
        let r = ri.iter().map(|&i| pw[i]).collect();
        let s = si.iter().map(|&j| qw[j]).collect();
        let w = ri
            .iter()
            .map(|&i| si.iter().map(|&j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let supp_rho_le_sigma = ri.iter().all(|&i| qw[i] > 0.0);
        let supp_sigma_le_rho = si.iter().all(|&j| pw[j] > 0.0);
        let identical = pw
            .iter()
            .zip(qw)
            .all(|(a, b)| (a - b).abs() <= tol::IDENTICAL);
        Ok(Self::assemble(
            r,
            s,
            w,
            supp_rho_le_sigma,
            supp_sigma_le_rho,
            identical,
        ))
    }

    fn assemble(
        r: Vec<f64>,
        s: Vec<f64>,
        w: Vec<Vec<f64>>,
        supp_rho_le_sigma: bool,
        supp_sigma_le_rho: bool,
        identical: bool,
    ) -> Self {
        let mut terms = Vec::new();
        let mut tr_rho_sigma = 0.0;
        for (i, &ri) in r.iter().enumerate() {
            for (j, &sj) in s.iter().enumerate() {
                let wij = w[i][j];
                if wij > 0.0 {
                    terms.push(Term {
                        a: ri.ln(),
                        b: sj.ln(),
                        lw: wij.ln(),
                    });
                    tr_rho_sigma += ri * sj * wij;
                }
            }
        }
        let orthogonal = tr_rho_sigma <= tol::ORTHOGONAL;
        let mut prof = Self {
            r,
            s,
            w,
            orthogonal,
            supp_rho_le_sigma,
            supp_sigma_le_rho,
            psi_affine: false,
            identical,
            kappa: None,
            tr_rho_sigma,
            terms,
        };
        if !orthogonal {
            let (p0, p1) = (prof.psi_at(0.0), prof.psi_at(1.0));
            let gap = (0..64)
                .map(|k| {
                    let a = k as f64 / 63.0;
                    (prof.psi_at(a) - ((1.0 - a) * p0 + a * p1)).abs()
                })
                .fold(0.0, f64::max);
            prof.psi_affine = gap < tol::AFFINE_GAP;
            if prof.psi_affine && supp_rho_le_sigma {
                prof.kappa = Some((-p0).exp());
            }
        }
        prof
    }

    /// Profile of the swapped pair (σ, ρ).
    pub fn reversed(&self) -> PsiProfile {
        let w = (0..self.s.len())
            .map(|j| (0..self.r.len()).map(|i| self.w[i][j]).collect())
            .collect();
        Self::assemble(
            self.s.clone(),
            self.r.clone(),
            w,
            self.supp_sigma_le_rho,
            self.supp_rho_le_sigma,
            self.identical,
        )
    }

    /// ψ(α) = log Σ r_i^α s_j^{1−α} W_ij, evaluated by log-sum-exp. Returns
    /// `-inf` for an orthogonal pair.
    pub fn psi_at(&self, alpha: f64) -> f64 {
        log_sum_exp(self.exponents(alpha))
    }

    fn exponents(&self, alpha: f64) -> impl Iterator<Item = f64> + '_ {
        self.terms
            .iter()
            .map(move |t| alpha * t.a + (1.0 - alpha) * t.b + t.lw)
    }

    /// ψ′(α) = Σ r^α s^{1−α} W (log r − log s) / Q(α).
    pub fn psi_prime_at(&self, alpha: f64) -> f64 {
        let e: Vec<f64> = self.exponents(alpha).collect();
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return f64::NAN;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, x) in self.terms.iter().zip(&e) {
            let wgt = (x - m).exp();
            num += wgt * (t.a - t.b);
            den += wgt;
        }
        num / den
    }

    /// ψ(α) − ψ(0), computed with expm1/log1p so that the increment keeps
    /// its relative accuracy as α → 0.
    pub fn psi_increment(&self, alpha: f64) -> f64 {
        let p0 = self.psi_at(0.0);
        let s: f64 = self
            .terms
            .iter()
            .map(|t| (t.b + t.lw - p0).exp() * (alpha * (t.a - t.b)).exp_m1())
            .sum();
        s.ln_1p()
    }

    /// ψ̃(u) = (1−u) ψ(1/(1−u)) for u ≤ 0, with ψ̃(0) = ψ(1).
    pub fn psi_tilde(&self, u: f64) -> f64 {
        if u == 0.0 {
            return self.psi_at(1.0);
        }
        (1.0 - u) * self.psi_at(1.0 / (1.0 - u))
    }

    /// D₀ = −ψ(0).
    pub fn d_zero(&self) -> f64 {
        if self.identical {
            return 0.0;
        }
        if self.orthogonal {
            return f64::INFINITY;
        }
        (-self.psi_at(0.0)).max(0.0)
    }

    /// Standard (Petz) Rényi divergence for α ∈ (0,1) ∪ (1,∞).
    pub fn renyi(&self, alpha: f64) -> f64 {
        if self.identical {
            return 0.0;
        }
        if alpha > 1.0 && !self.supp_rho_le_sigma {
            return f64::INFINITY;
        }
        if self.orthogonal {
            return f64::INFINITY;
        }
        self.psi_at(alpha) / (alpha - 1.0)
    }

    /// D(ρ‖σ) = Σ r_i W_ij (log r_i − log s_j), +∞ unless supp ρ ⊆ supp σ.
    pub fn relative_entropy(&self) -> f64 {
        if self.identical {
            return 0.0;
        }
        if !self.supp_rho_le_sigma || self.orthogonal {
            return f64::INFINITY;
        }
        self.terms
            .iter()
            .map(|t| (t.a + t.lw).exp() * (t.a - t.b))
            .sum()
    }

    /// Q(α) = e^{ψ(α)}.
    pub fn q_at(&self, alpha: f64) -> f64 {
        self.psi_at(alpha).exp()
    }
}

fn positive_indices(values: &[f64]) -> Vec<usize> {
    (0..values.len())
        .filter(|&i| values[i] > tol::SUPPORT_CUTOFF)
        .collect()
}

fn check_alpha_renyi(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() && alpha != 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            range: "(0, 1) ∪ (1, ∞)",
        })
    }
}

pub fn standard_renyi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<DivergenceValue> {
    check_alpha_renyi(alpha)?;
    let p = PsiProfile::from_states(rho, sigma)?;
    Ok(DivergenceValue::new(p.renyi(alpha), Family::Standard, Some(alpha)))
}

/// Singular values of `m` by one-sided (Hestenes) Jacobi. Accurate to high
/// relative precision when the badness of `m` is in its column scaling.
fn jacobi_singular_values(mut m: CMatrix) -> Vec<f64> {
    let n = m.ncols();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let a: f64 = m.column(p).norm_squared();
                let b: f64 = m.column(q).norm_squared();
                let g = m.column(p).dotc(&m.column(q));
                let gn = g.norm();
                if gn <= 1e-15 * (a * b).sqrt() || gn == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = g / gn;
                let zeta = (b - a) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..m.nrows() {
                    let xp = m[(r, p)];
                    let xq = m[(r, q)] * phase.conj();
                    m[(r, p)] = xp * c - xq * s;
                    m[(r, q)] = xp * s + xq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| m.column(j).norm()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Tr (ρ^{1/2} σ^{(1−α)/α} ρ^{1/2})^α with the support convention on every
/// power.
///
/// The eigenvalues of the sandwich are the squared singular values of
/// diag(r^{1/2}) U†V diag(s^{γ/2}), γ = (1−α)/α. For small α the column
/// scaling s^{γ/2} spans many orders of magnitude and an eigensolver on the
/// assembled product loses the small eigenvalues to round-off, which then
/// dominate after the power α. One-sided Jacobi keeps them.
fn sandwich_trace(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> f64 {
    let gamma = (1.0 - alpha) / alpha;
    let (sr, ss) = (rho.op().spectrum(), sigma.op().spectrum());
    let ri: Vec<usize> = (0..sr.values.len()).filter(|&i| sr.values[i] > tol::SUPPORT_CUTOFF).collect();
    let si: Vec<usize> = (0..ss.values.len()).filter(|&i| ss.values[i] > tol::SUPPORT_CUTOFF).collect();
    let overlap = CMatrix::from_fn(ri.len(), si.len(), |a, b| {
        sr.vectors.column(ri[a]).dotc(&ss.vectors.column(si[b]))
    });
    let rank = jacobi_singular_values(overlap.clone())
        .iter()
        .filter(|&&c| c * c > 1e-9)
        .count();
    let x = CMatrix::from_fn(ri.len(), si.len(), |a, b| {
        overlap[(a, b)] * (sr.values[ri[a]].sqrt() * ss.values[si[b]].powf(gamma / 2.0))
    });
    jacobi_singular_values(x)
        .iter()
        .take(rank)
        .map(|&v| (v * v).powf(alpha))
        .sum()
}

/// Sandwiched Rényi divergence for α ∈ (0,1) ∪ (1,∞).
pub fn sandwiched_renyi(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_alpha_renyi(alpha)?;
    let p = PsiProfile::from_states(rho, sigma)?;
    let v = if p.identical {
        0.0
    } else if (alpha > 1.0 && !p.supp_rho_le_sigma) || p.orthogonal {
        f64::INFINITY
    } else {
        let t = sandwich_trace(rho, sigma, alpha);
        if t <= 0.0 {
            f64::INFINITY
        } else {
            t.ln() / (alpha - 1.0)
        }
    };
    Ok(DivergenceValue::new(v, Family::Sandwiched, Some(alpha)))
}

pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    let p = PsiProfile::from_states(rho, sigma)?;
    Ok(DivergenceValue::new(
        p.relative_entropy(),
        Family::RelativeEntropy,
        None,
    ))
}

pub fn d_zero(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    let p = PsiProfile::from_states(rho, sigma)?;
    Ok(DivergenceValue::new(p.d_zero(), Family::D0, None))
}

/// log λ_max(σ^{−1/2} ρ σ^{−1/2}) on supp σ; +∞ unless supp ρ ⊆ supp σ.
pub fn d_max(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    let p = PsiProfile::from_states(rho, sigma)?;
    let v = if p.identical {
        0.0
    } else if !p.supp_rho_le_sigma {
        f64::INFINITY
    } else {
        let inv = sigma.op().power(-0.5);
        let m = inv.entries() * rho.entries() * inv.entries();
        let m = (&m + m.adjoint()).scale(0.5);
        let op = HermitianOperator::new(m).expect("Hermitian by construction");
        let top = *op.spectrum().values.last().expect("non-empty");
        top.ln().max(0.0)
    };
    Ok(DivergenceValue::new(v, Family::Dmax, None))
}

/// F(ρ,σ) = Tr (ρ^{1/2} σ ρ^{1/2})^{1/2}, clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    Ok(sandwich_trace(rho, sigma, 0.5).clamp(0.0, 1.0))
}

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let diff = rho.op().sub_scaled(1.0, sigma.op())?;
    Ok(0.5 * diff.spectrum().values.iter().map(|l| l.abs()).sum::<f64>())
}

/// Closed-form divergences of two pure states with |⟨ψ,φ⟩|² = c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureStatePanel {
    pub overlap_sq: f64,
    pub alpha: f64,
    pub standard: f64,
    pub sandwiched: f64,
    /// Common value of the measured, test-measured and regularized
    /// test-measured divergences.
    pub measured: f64,
}

pub fn pure_state_panel(overlap_sq: f64, alpha: f64) -> Result<PureStatePanel> {
    if !(overlap_sq > 0.0 && overlap_sq < 1.0) {
        return Err(Error::InvalidParameter {
            name: "overlap_sq",
            value: overlap_sq,
            range: "(0, 1)",
        });
    }
    crate::error::check_alpha_open_unit(alpha)?;
    let lc = overlap_sq.ln();
    let sandwiched = alpha / (alpha - 1.0) * lc;
    Ok(PureStatePanel {
        overlap_sq,
        alpha,
        standard: lc / (alpha - 1.0),
        sandwiched,
        measured: if alpha <= 0.5 { -lc } else { sandwiched },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Complex64;
    use crate::random::{random_classical, random_density, rng};
    use proptest::prelude::*;

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(p).unwrap()
    }

    fn pure_pair() -> (DensityMatrix, DensityMatrix) {
        let s = 0.5f64.sqrt();
        let zero = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let plus = DensityMatrix::pure(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap();
        (zero, plus)
    }

    #[test]
    fn identical_pair_is_zero() {
        let rho = random_density(3, &mut rng(1));
        let p = PsiProfile::from_states(&rho, &rho).unwrap();
        for a in [0.0, 0.3, 1.0] {
            assert!(p.psi_at(a).abs() < 1e-12);
            assert!(p.psi_prime_at(a).abs() < 1e-10);
        }
        for a in [0.2, 0.7, 2.0] {
            assert_eq!(standard_renyi(&rho, &rho, a).unwrap().value, 0.0);
            assert_eq!(sandwiched_renyi(&rho, &rho, a).unwrap().value, 0.0);
        }
        assert_eq!(relative_entropy(&rho, &rho).unwrap().value, 0.0);
        assert_eq!(d_zero(&rho, &rho).unwrap().value, 0.0);
        assert_eq!(d_max(&rho, &rho).unwrap().value, 0.0);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn classical_closed_forms() {
        let (rho, sigma) = (diag(&[0.5, 0.5]), diag(&[0.25, 0.75]));
        let p = PsiProfile::from_states(&rho, &sigma).unwrap();
        let expected = (0.125f64.sqrt() + 0.375f64.sqrt()).ln();
        assert!((p.psi_at(0.5) - expected).abs() < 1e-15);
        let d = standard_renyi(&rho, &sigma, 0.5).unwrap().value;
        assert!((d + 2.0 * expected).abs() < 1e-14);
        let dm = d_max(&rho, &sigma).unwrap().value;
        assert!((dm - 2f64.ln()).abs() < 1e-12);
        let sw = sandwiched_renyi(&rho, &sigma, 0.5).unwrap().value;
        assert!((sw - d).abs() < 1e-10);
    }

    #[test]
    fn pure_states_are_affine() {
        let (rho, sigma) = pure_pair();
        let p = PsiProfile::from_states(&rho, &sigma).unwrap();
        assert!(p.psi_affine);
        assert!(p.kappa.is_none(), "supports differ");
        for a in [0.1, 0.4, 0.9] {
            assert!((p.psi_at(a) - 0.5f64.ln()).abs() < 1e-12);
            let std = standard_renyi(&rho, &sigma, a).unwrap().value;
            assert!((std - 0.5f64.ln() / (a - 1.0)).abs() < 1e-10);
            let sw = sandwiched_renyi(&rho, &sigma, a).unwrap().value;
            assert!((sw - a / (a - 1.0) * 0.5f64.ln()).abs() < 1e-10);
        }
        // slope of an affine profile, via finite differences
        let h = 1e-5;
        let fd = (p.psi_at(0.5 + h) - p.psi_at(0.5 - h)) / (2.0 * h);
        assert!((p.psi_prime_at(0.5) - fd).abs() < 1e-6);
        assert!(p.psi_prime_at(0.5).abs() < 1e-6);
    }

    #[test]
    fn fidelity_matches_sandwiched_half() {
        let mut r = rng(11);
        for _ in 0..10 {
            let rho = random_density(2, &mut r);
            let sigma = random_density(2, &mut r);
            let f = fidelity(&rho, &sigma).unwrap();
            let sw = sandwiched_renyi(&rho, &sigma, 0.5).unwrap().value;
            assert!((-2.0 * f.ln() - sw).abs() < 1e-10);
        }
    }

    #[test]
    fn support_branches() {
        let rho = diag(&[0.5, 0.5, 0.0]);
        let sigma = diag(&[0.5, 0.0, 0.5]);
        assert_eq!(standard_renyi(&rho, &sigma, 2.0).unwrap().value, f64::INFINITY);
        assert!(standard_renyi(&rho, &sigma, 0.5).unwrap().value.is_finite());
        assert_eq!(relative_entropy(&rho, &sigma).unwrap().value, f64::INFINITY);
        let orth = diag(&[0.0, 0.0, 1.0]);
        let only = diag(&[1.0, 0.0, 0.0]);
        let p = PsiProfile::from_states(&only, &orth).unwrap();
        assert!(p.orthogonal);
        assert_eq!(p.renyi(0.5), f64::INFINITY);
        // α > 1 evaluated on σ's support
        let rho = diag(&[0.5, 0.5, 0.0]);
        let sigma = diag(&[0.25, 0.25, 0.5]);
        let v = standard_renyi(&rho, &sigma, 2.0).unwrap().value;
        assert!((v - (0.25f64 / 0.25 + 0.25 / 0.25).ln()).abs() < 1e-12);
    }

    #[test]
    fn kappa_case() {
        // ρ = κ σ on a sub-support: D_α = log κ for all α
        let rho = diag(&[0.5, 0.5, 0.0]);
        let sigma = diag(&[0.25, 0.25, 0.5]);
        let p = PsiProfile::from_states(&rho, &sigma).unwrap();
        assert!(p.psi_affine);
        let k = p.kappa.unwrap();
        assert!((k - 2.0).abs() < 1e-12);
        for a in [0.2, 0.5, 0.8] {
            assert!((p.renyi(a) - 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_panel_values() {
        let p = pure_state_panel(0.5, 0.25).unwrap();
        assert!((p.measured - 2f64.ln()).abs() < 1e-15);
        let p = pure_state_panel(0.5, 0.75).unwrap();
        assert!((p.measured - 3.0 * 2f64.ln()).abs() < 1e-14);
        let p = pure_state_panel(0.5, 0.5).unwrap();
        assert!((p.measured - 2f64.ln()).abs() < 1e-15);
        assert!((p.sandwiched - 2f64.ln()).abs() < 1e-15);
        assert!(pure_state_panel(1.0, 0.5).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            let j = serde_json::to_string(&f).unwrap();
            assert_eq!(j, format!("\"{}\"", f.name()));
        }
    }

    fn pair(seed: u64, d: usize) -> (DensityMatrix, DensityMatrix) {
        let mut r = rng(seed);
        (random_density(d, &mut r), random_density(d, &mut r))
    }

    proptest! {
        #[test]
        fn q_endpoints_match_direct_traces(seed in 0u64..500, d in 2usize..5) {
            let (rho, sigma) = pair(seed, d);
            let p = PsiProfile::from_states(&rho, &sigma).unwrap();
            let q0 = rho.op().support_projection().trace_product(sigma.op()).unwrap();
            let q1 = rho.op().trace_product(&sigma.op().support_projection()).unwrap();
            prop_assert!((p.q_at(0.0) - q0).abs() < 1e-10);
            prop_assert!((p.q_at(1.0) - q1).abs() < 1e-10);
        }

        #[test]
        fn psi_nonpositive_and_convex(seed in 0u64..500, d in 2usize..5) {
            let (rho, sigma) = pair(seed, d);
            let p = PsiProfile::from_states(&rho, &sigma).unwrap();
            let g: Vec<f64> = (0..=40).map(|k| p.psi_at(k as f64 / 40.0)).collect();
            prop_assert!(g.iter().all(|&v| v <= 1e-10));
            for k in 1..40 {
                prop_assert!(g[k - 1] - 2.0 * g[k] + g[k + 1] >= -1e-8);
            }
        }

        #[test]
        fn psi_prime_matches_finite_difference(seed in 0u64..500) {
            let (rho, sigma) = pair(seed, 3);
            let p = PsiProfile::from_states(&rho, &sigma).unwrap();
            let h = 1e-5;
            let fd = (p.psi_at(0.3 + h) - p.psi_at(0.3 - h)) / (2.0 * h);
            prop_assert!((p.psi_prime_at(0.3) - fd).abs() < 1e-6);
        }

        #[test]
        fn skew_symmetry(seed in 0u64..500, d in 2usize..4, k in 1usize..10) {
            let a = k as f64 / 10.0;
            let (rho, sigma) = pair(seed, d);
            let lhs = (1.0 - a) * standard_renyi(&rho, &sigma, a).unwrap().value;
            let rhs = a * standard_renyi(&sigma, &rho, 1.0 - a).unwrap().value;
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn ordering_and_monotonicity(seed in 0u64..300, d in 2usize..4) {
            let (rho, sigma) = pair(seed, d);
            let mut prev_std = 0.0;
            let mut prev_sw = 0.0;
            for k in 1..20 {
                let a = k as f64 * 0.1;
                if (a - 1.0).abs() < 1e-9 { continue; }
                let std = standard_renyi(&rho, &sigma, a).unwrap().value;
                let sw = sandwiched_renyi(&rho, &sigma, a).unwrap().value;
                prop_assert!(std >= prev_std - 1e-9);
                prop_assert!(sw >= prev_sw - 1e-9);
                prop_assert!(sw <= std + 1e-9);
                if a < 1.0 {
                    prop_assert!(a * std <= sw + 1e-9);
                }
                prev_std = std;
                prev_sw = sw;
            }
        }

        #[test]
        fn pinching_does_not_increase(seed in 0u64..300, d in 2usize..4, k in 1usize..10) {
            let a = k as f64 / 10.0;
            let (rho, sigma) = pair(seed, d);
            let pinched = rho.pinch(sigma.op()).unwrap();
            let before = standard_renyi(&rho, &sigma, a).unwrap().value;
            let after = standard_renyi(&pinched, &sigma, a).unwrap().value;
            prop_assert!(after <= before + 1e-9);
        }

        #[test]
        fn classical_and_dense_profiles_agree(seed in 0u64..300, k in 2usize..5) {
            let mut r = rng(seed);
            let p = random_classical(k, &mut r);
            let q = random_classical(k, &mut r);
            let a = PsiProfile::from_classical(&p, &q).unwrap();
            let b = PsiProfile::from_states(&p.to_density(), &q.to_density()).unwrap();
            for t in [0.0, 0.25, 0.5, 1.0] {
                prop_assert!((a.psi_at(t) - b.psi_at(t)).abs() < 1e-14);
            }
            prop_assert!((a.relative_entropy() - b.relative_entropy()).abs() < 1e-14);
        }
    }
}
