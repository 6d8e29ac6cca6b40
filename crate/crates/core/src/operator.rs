//! Finite-dimensional operators: Hermitian matrices with cached spectra,
//! density matrices, tests, classical distributions and type classes.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::tol;

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belonging to `values[i]`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// Rank-one projection onto the `i`-th eigenvector.
    pub fn projector(&self, i: usize) -> CMatrix {
        let v = self.vectors.column(i);
        v * v.adjoint()
    }
}

/// Dense complex Hermitian matrix. The spectrum is computed on first use and
/// cached.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    entries: CMatrix,
    spectrum: OnceLock<Spectrum>,
}

impl HermitianOperator {
    /// Validates Hermiticity (max entry deviation ≤ 1e−10) and stores the
    /// exactly symmetrized matrix.
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let adj = entries.adjoint();
        let dev = max_abs_diff(&entries, &adj);
        if !dev.is_finite() || dev > tol::HERMITICITY {
            return Err(Error::NotHermitian(dev));
        }
        let sym = if dev == 0.0 {
            entries
        } else {
            (entries + adj).scale(0.5)
        };
        Ok(Self::from_entries_unchecked(sym))
    }

    pub(crate) fn from_entries_unchecked(entries: CMatrix) -> Self {
        Self {
            entries,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let m = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_entries_unchecked(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![0.0; dim])
    }

    /// Builds U diag(λ) U† and caches the given spectrum.
    pub fn from_spectrum(values: Vec<f64>, vectors: CMatrix) -> Self {
        let entries = reconstruct(&values, &vectors);
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let spectrum = Spectrum {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: CMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]),
        };
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Self {
            entries,
            spectrum: cell,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.entries[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| compute_spectrum(&self.entries))
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Σ_{a > ε} a^x P_a, with eigenvalues at or below ε_supp = 1e−12
    /// treated as zero. `power(0)` is the support projection.
    pub fn power(&self, x: f64) -> HermitianOperator {
        let sp = self.spectrum();
        let values: Vec<f64> = sp
            .values
            .iter()
            .map(|&a| if a > tol::SUPPORT_CUTOFF { a.powf(x) } else { 0.0 })
            .collect();
        HermitianOperator::from_spectrum(values, sp.vectors.clone())
    }

    pub fn support_projection(&self) -> HermitianOperator {
        self.power(0.0)
    }

    /// Number of eigenvalues above the support cutoff.
    pub fn rank(&self) -> usize {
        self.spectrum()
            .values
            .iter()
            .filter(|&&a| a > tol::SUPPORT_CUTOFF)
            .count()
    }

    /// Spectral projection onto the strictly positive eigenvalues.
    pub fn positive_part_projection(&self) -> HermitianOperator {
        let sp = self.spectrum();
        let values = sp
            .values
            .iter()
            .map(|&a| if a > 0.0 { 1.0 } else { 0.0 })
            .collect();
        HermitianOperator::from_spectrum(values, sp.vectors.clone())
    }

    /// `self − c·other`.
    pub fn sub_scaled(&self, c: f64, other: &HermitianOperator) -> Result<HermitianOperator> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::from_entries_unchecked(
            &self.entries - other.entries.scale(c),
        ))
    }

    pub fn tensor(&self, other: &HermitianOperator) -> HermitianOperator {
        Self::from_entries_unchecked(self.entries.kronecker(&other.entries))
    }

    pub fn tensor_power(&self, n: usize) -> HermitianOperator {
        assert!(n >= 1, "tensor power needs n >= 1");
        let mut out = self.entries.clone();
        for _ in 1..n {
            out = out.kronecker(&self.entries);
        }
        Self::from_entries_unchecked(out)
    }

    /// Real part of Tr(self · other).
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(trace_product(&self.entries, &other.entries).re)
    }

    /// P A P.
    pub fn compress(&self, p: &HermitianOperator) -> Result<HermitianOperator> {
        check_dims(self.dim(), p.dim())?;
        Ok(Self::from_entries_unchecked(
            &p.entries * &self.entries * &p.entries,
        ))
    }

    /// ⟨v, A v⟩ for a column vector `v`.
    pub fn expectation(&self, v: &DVector<Complex64>) -> f64 {
        (v.adjoint() * &self.entries * v)[(0, 0)].re
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.entries, &other.entries)
    }
}

/// Unit-trace positive semi-definite operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validates a state. Eigenvalues in (−1e−10, 0) are clamped to zero and
    /// the trace renormalized; larger negativity is rejected.
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(entries)?)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !tr.is_finite() || (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidTrace(tr));
        }
        let sp = op.spectrum();
        let min = sp.values.first().copied().unwrap_or(0.0);
        if min < -tol::PSD_CLAMP {
            return Err(Error::NotPsd(min));
        }
        if min < 0.0 {
            let clamped: Vec<f64> = sp.values.iter().map(|&a| a.max(0.0)).collect();
            let total: f64 = clamped.iter().sum();
            let values = clamped.iter().map(|a| a / total).collect();
            let op = HermitianOperator::from_spectrum(values, sp.vectors.clone());
            return Ok(Self { op });
        }
        Ok(Self { op })
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::from_operator(HermitianOperator::from_real_diagonal(p))
    }

    /// |ψ⟩⟨ψ| for a unit vector ψ (norm checked to 1e−10).
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm2 = v.norm_squared();
        if (norm2 - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidTrace(norm2));
        }
        let v = v.unscale(norm2.sqrt());
        let mut values = vec![0.0; psi.len()];
        values[0] = 1.0;
        // Complete v to an orthonormal basis so the spectrum is exact.
        let basis = complete_basis(&v);
        let op = HermitianOperator::from_spectrum(values, basis);
        Ok(Self { op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::from_real_diagonal(&vec![1.0 / dim as f64; dim]),
        }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        self.op.entries()
    }

    pub fn is_diagonal(&self) -> bool {
        self.op.is_diagonal()
    }

    /// The diagonal as a classical state when the matrix is diagonal.
    pub fn to_classical(&self) -> Option<ClassicalState> {
        if !self.is_diagonal() {
            return None;
        }
        ClassicalState::from_weights(self.op.diagonal()).ok()
    }

    /// ρ^{⊗n}; refuses dimensions above the dense budget.
    pub fn tensor_power(&self, n: usize) -> Result<DensityMatrix> {
        let total = (self.dim() as f64).powi(n as i32);
        if n == 0 || total > tol::DENSE_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                what: "dense tensor power dimension",
                needed: total,
                budget: tol::DENSE_BUDGET as f64,
            });
        }
        Ok(Self {
            op: self.op.tensor_power(n),
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            op: self.op.tensor(&other.op),
        }
    }

    /// Pinching in the eigenbasis of `basis_of`: Σ P_i ρ P_i over rank-one
    /// eigenprojections.
    pub fn pinch(&self, basis_of: &HermitianOperator) -> Result<DensityMatrix> {
        check_dims(self.dim(), basis_of.dim())?;
        let sp = basis_of.spectrum();
        let values: Vec<f64> = (0..self.dim())
            .map(|i| self.op.expectation(&sp.vectors.column(i).into_owned()))
            .collect();
        let op = HermitianOperator::from_spectrum(values, sp.vectors.clone());
        Self::from_operator(op)
    }
}

/// Operator T with 0 ≤ T ≤ I (within 1e−10).
#[derive(Debug, Clone)]
pub struct Test {
    op: HermitianOperator,
}

impl Test {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let sp = op.spectrum();
        for &a in &sp.values {
            if !(-tol::PSD_CLAMP..=1.0 + tol::PSD_CLAMP).contains(&a) {
                return Err(Error::NotATest(a));
            }
        }
        Ok(Self { op })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            op: HermitianOperator::zeros(dim),
        }
    }

    /// Diagonal test with the given entries in [0, 1].
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(entries))
    }

    /// A projection; idempotency is checked to 1e−8.
    pub fn projection(op: HermitianOperator) -> Result<Self> {
        let sq = op.entries() * op.entries();
        let res = max_abs_diff(&sq, op.entries());
        if res > tol::PROJECTION {
            return Err(Error::NotAProjection(res));
        }
        Self::new(op)
    }

    /// Projection onto the span of the first `k` columns of a unitary.
    pub fn from_columns(u: &CMatrix, k: usize) -> Self {
        let cols = u.columns(0, k);
        let p = cols * cols.adjoint();
        Self {
            op: HermitianOperator::from_entries_unchecked(p),
        }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// I − T.
    pub fn complement(&self) -> Test {
        let d = self.dim();
        let e = CMatrix::identity(d, d) - self.op.entries();
        Test {
            op: HermitianOperator::from_entries_unchecked(e),
        }
    }

    /// ‖T² − T‖ (max entry).
    pub fn idempotency_residual(&self) -> f64 {
        let sq = self.op.entries() * self.op.entries();
        max_abs_diff(&sq, self.op.entries())
    }
}

/// (Tr XT, Tr X(I−T)). The second component is computed as Tr X − Tr XT so
/// the pair sums to Tr X.
pub fn apply_test(x: &HermitianOperator, t: &Test) -> Result<(f64, f64)> {
    check_dims(x.dim(), t.dim())?;
    let z = trace_product(x.entries(), t.op().entries());
    if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
        return Err(Error::InvariantViolation(format!(
            "Tr XT has imaginary part {:e}",
            z.im
        )));
    }
    let a = z.re;
    Ok((a, x.trace() - a))
}

/// Two-outcome distribution (p, 1 − p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryDistribution {
    p: f64,
}

impl BinaryDistribution {
    /// Clamps round-off of up to 1e−14 outside [0, 1].
    pub fn new(p: f64) -> Result<Self> {
        if !(-tol::PROBABILITY_ROUNDOFF..=1.0 + tol::PROBABILITY_ROUNDOFF).contains(&p) {
            return Err(Error::InvalidDistribution(format!(
                "binary mass {p} outside [0, 1]"
            )));
        }
        Ok(Self {
            p: p.clamp(0.0, 1.0),
        })
    }

    /// Post-measurement distribution of a state under a test.
    pub fn measure(rho: &DensityMatrix, t: &Test) -> Result<Self> {
        let (a, _) = apply_test(rho.op(), t)?;
        let a = if (-tol::PSD_CLAMP..0.0).contains(&a) {
            0.0
        } else if a > 1.0 && a <= 1.0 + tol::PSD_CLAMP {
            1.0
        } else {
            a
        };
        Self::new(a)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

/// Probability vector on an ordered label set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl ClassicalState {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidDistribution("duplicate labels".into()));
        }
        let mut ws = Vec::with_capacity(weights.len());
        for &w in &weights {
            if !w.is_finite() || w < -tol::PROBABILITY_ROUNDOFF {
                return Err(Error::InvalidDistribution(format!("weight {w} is negative")));
            }
            ws.push(w.max(0.0));
        }
        let s: f64 = ws.iter().sum();
        if (s - 1.0).abs() > tol::CLASSICAL_SUM {
            return Err(Error::InvalidDistribution(format!("weights sum to {s}")));
        }
        Ok(Self {
            labels,
            weights: ws,
        })
    }

    /// Labels "0", "1", ….
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::new(labels, weights)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn check_same_labels(&self, other: &ClassicalState) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        Ok(())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            op: HermitianOperator::from_real_diagonal(&self.weights),
        }
    }

    /// Flat n-fold product distribution over label sequences, in
    /// lexicographic sequence order. Labels are joined with commas.
    pub fn tensor_power(&self, n: usize) -> Result<ClassicalState> {
        let total = (self.len() as f64).powi(n as i32);
        if n == 0 || total > tol::TYPE_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                what: "flat product distribution size",
                needed: total,
                budget: tol::TYPE_BUDGET as f64,
            });
        }
        let mut labels = self.labels.clone();
        let mut weights = self.weights.clone();
        for _ in 1..n {
            let mut nl = Vec::with_capacity(labels.len() * self.len());
            let mut nw = Vec::with_capacity(labels.len() * self.len());
            for (l, w) in labels.iter().zip(&weights) {
                for (m, v) in self.labels.iter().zip(&self.weights) {
                    nl.push(format!("{l},{m}"));
                    nw.push(w * v);
                }
            }
            labels = nl;
            weights = nw;
        }
        // Products of exact weights may drift from unit sum by a few ulps.
        Ok(Self { labels, weights })
    }
}

/// A type (empirical distribution with denominator n) together with its
/// class size.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeClass {
    /// Occurrence count of each letter; sums to n.
    pub counts: Vec<u32>,
    /// log of the multinomial coefficient n! / Π counts!.
    pub log_multiplicity: f64,
    /// Exact multinomial coefficient when it fits in a u128.
    pub multiplicity: Option<u128>,
}

impl TypeClass {
    /// Per-sequence log-probability Σ counts_ω log w(ω); `-inf` when a letter
    /// of zero weight occurs.
    pub fn log_prob(&self, weights: &[f64]) -> f64 {
        let mut s = 0.0;
        for (&c, &w) in self.counts.iter().zip(weights) {
            if c > 0 {
                if w <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                s += c as f64 * w.ln();
            }
        }
        s
    }
}

/// A type class with the per-sequence log-probability under some state.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedType {
    pub class: TypeClass,
    pub log_prob: f64,
}

/// Number of types with denominator n over k letters: C(n+k−1, k−1).
pub fn type_count(k: usize, n: usize) -> f64 {
    let mut c = 1.0f64;
    for i in 1..k {
        c = c * (n + i) as f64 / i as f64;
    }
    c.round()
}

/// All types over `k` letters with denominator `n`, first count descending.
pub fn enumerate_types(k: usize, n: usize, budget: usize) -> Result<Vec<TypeClass>> {
    let count = type_count(k, n);
    if count > budget as f64 {
        return Err(Error::BudgetExceeded {
            what: "type classes",
            needed: count,
            budget: budget as f64,
        });
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut counts = vec![0u32; k];
    fill_types(&mut counts, 0, n as u32, &ln_fact, &mut out);
    Ok(out)
}

fn fill_types(counts: &mut [u32], pos: usize, remaining: u32, ln_fact: &[f64], out: &mut Vec<TypeClass>) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        let n: u32 = counts.iter().sum();
        let log_multiplicity =
            ln_fact[n as usize] - counts.iter().map(|&c| ln_fact[c as usize]).sum::<f64>();
        out.push(TypeClass {
            counts: counts.to_vec(),
            log_multiplicity,
            multiplicity: multinomial(counts),
        });
        return;
    }
    for c in (0..=remaining).rev() {
        counts[pos] = c;
        fill_types(counts, pos + 1, remaining - c, ln_fact, out);
    }
}

/// Exact multinomial coefficient, `None` on u128 overflow.
pub fn multinomial(counts: &[u32]) -> Option<u128> {
    let mut total: u128 = 1;
    let mut m: u128 = 0;
    for &c in counts {
        for i in 1..=c as u128 {
            m += 1;
            // total * C(m, i) / C(m-1, i-1) = total * m / i, exact at every step
            total = total.checked_mul(m)? / i;
        }
    }
    Some(total)
}

/// Type-class decomposition of p^{⊗n}.
pub fn tensor_power_classical(p: &ClassicalState, n: usize) -> Result<Vec<WeightedType>> {
    tensor_power_classical_with_budget(p, n, tol::TYPE_BUDGET)
}

pub fn tensor_power_classical_with_budget(
    p: &ClassicalState,
    n: usize,
    budget: usize,
) -> Result<Vec<WeightedType>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    let types = enumerate_types(p.len(), n, budget)?;
    Ok(types
        .into_iter()
        .map(|class| {
            let log_prob = class.log_prob(p.weights());
            WeightedType { class, log_prob }
        })
        .collect())
}

/// A type class of a pair (p, q) with per-sequence log-probabilities under
/// both.
#[derive(Debug, Clone, PartialEq)]
pub struct JointType {
    pub class: TypeClass,
    pub log_p: f64,
    pub log_q: f64,
}

impl JointType {
    /// log p^{⊗n}(class) = log multiplicity + per-sequence log p.
    pub fn class_log_p(&self) -> f64 {
        self.class.log_multiplicity + self.log_p
    }

    pub fn class_log_q(&self) -> f64 {
        self.class.log_multiplicity + self.log_q
    }

    /// Per-sequence log-likelihood ratio; ±∞ off the common support, −∞ for
    /// classes that carry no mass under either state.
    pub fn log_ratio(&self) -> f64 {
        match (self.log_p == f64::NEG_INFINITY, self.log_q == f64::NEG_INFINITY) {
            (false, false) => self.log_p - self.log_q,
            (false, true) => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        }
    }
}

/// Type classes of (p^{⊗n}, q^{⊗n}) sorted by decreasing log-likelihood
/// ratio. The sort is stable, so ties keep enumeration order.
pub fn joint_types_by_ratio(p: &ClassicalState, q: &ClassicalState, n: usize) -> Result<Vec<JointType>> {
    p.check_same_labels(q)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    let mut out: Vec<JointType> = enumerate_types(p.len(), n, tol::TYPE_BUDGET)?
        .into_iter()
        .map(|class| {
            let log_p = class.log_prob(p.weights());
            let log_q = class.log_prob(q.weights());
            JointType { class, log_p, log_q }
        })
        .collect();
    out.sort_by(|a, b| b.log_ratio().total_cmp(&a.log_ratio()));
    Ok(out)
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Tr(AB) without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

fn reconstruct(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let d = vectors.nrows();
    let mut scaled = vectors.clone();
    for (j, &l) in values.iter().enumerate() {
        for i in 0..d {
            scaled[(i, j)] *= l;
        }
    }
    let m = scaled * vectors.adjoint();
    (&m + m.adjoint()).scale(0.5)
}

fn compute_spectrum(m: &CMatrix) -> Spectrum {
    let d = m.nrows();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
    let (values, vectors) = if diagonal {
        let values: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
        (values, CMatrix::identity(d, d))
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Spectrum {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: CMatrix::from_fn(d, d, |r, c| vectors[(r, order[c])]),
    }
}

/// Orthonormal basis whose first column is the unit vector `v`
/// (Gram–Schmidt against the standard basis).
fn complete_basis(v: &DVector<Complex64>) -> CMatrix {
    let d = v.len();
    let mut cols: Vec<DVector<Complex64>> = vec![v.clone()];
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut w = DVector::from_fn(d, |i, _| {
            if i == e {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&w);
                w -= c * proj;
            }
        }
        let n = w.norm();
        if n > 1e-8 {
            cols.push(w.unscale(n));
        }
    }
    CMatrix::from_columns(&cols)
}
