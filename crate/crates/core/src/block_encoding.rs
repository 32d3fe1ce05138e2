//! The encoded-operator algebra: scale, linear combination, product,
//! tensor product, amplification, polynomial transformation and
//! density-matrix encoding, each updating a query-cost ledger.
//!
//! Block encodings are simulated logically: an [`EncodedOperator`] holds
//! the encoded block itself (subnormalization already applied) plus
//! metadata, never the dilated unitary. [`crate::numerics::dilate`] can
//! materialize a witness unitary on demand for verification.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::numerics::{c, operator_norm, partial_trace_pure, C64, CMatrix, CVector};
use crate::{Error, Result};

/// Default amplification tolerance delta.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Default amplification error target.
pub const DEFAULT_EPS_AMP: f64 = 1e-6;

/// Slack allowed above the unit norm bound for float round-off.
pub const NORM_SLACK: f64 = 1e-9;

/// Query-cost ledger standing in for circuit complexity.
///
/// `primitive_queries` counts uses of the primitive data encodings by
/// source label; structural composition (products, linear combinations,
/// polynomial degree, amplification gain) multiplies or sums them the way
/// the corresponding lemmas charge their inputs. Gate-level cost, in
/// particular the full phase-modulation length of amplification, goes to
/// `two_qubit_gates`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    pub primitive_queries: BTreeMap<String, u64>,
    pub two_qubit_gates: u64,
    pub classical_preprocessing: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: &str, count: u64) {
        *self.primitive_queries.entry(label.to_string()).or_insert(0) += count;
    }

    pub fn add_gates(&mut self, count: u64) {
        self.two_qubit_gates += count;
    }

    pub fn add_preprocessing(&mut self, count: u64) {
        self.classical_preprocessing += count;
    }

    /// Accumulate another ledger (one structural use of its operator).
    pub fn merge(&mut self, other: &QueryLedger) {
        for (label, count) in &other.primitive_queries {
            *self.primitive_queries.entry(label.clone()).or_insert(0) += count;
        }
        self.two_qubit_gates += other.two_qubit_gates;
        self.classical_preprocessing += other.classical_preprocessing;
    }

    /// Multiply every counter by `k` (k structural uses of the operator).
    pub fn scaled(&self, k: u64) -> QueryLedger {
        QueryLedger {
            primitive_queries: self
                .primitive_queries
                .iter()
                .map(|(l, c)| (l.clone(), c * k))
                .collect(),
            two_qubit_gates: self.two_qubit_gates * k,
            classical_preprocessing: self.classical_preprocessing,
        }
    }

    pub fn total_primitive_queries(&self) -> u64 {
        self.primitive_queries.values().sum()
    }

    /// True when every counter of `self` is >= the matching counter of
    /// `other` and at least one is strictly larger.
    pub fn dominates(&self, other: &QueryLedger) -> bool {
        let mut strictly = self.two_qubit_gates > other.two_qubit_gates
            || self.classical_preprocessing > other.classical_preprocessing;
        if self.two_qubit_gates < other.two_qubit_gates
            || self.classical_preprocessing < other.classical_preprocessing
        {
            return false;
        }
        for (label, count) in &other.primitive_queries {
            let mine = self.primitive_queries.get(label).copied().unwrap_or(0);
            if mine < *count {
                return false;
            }
            if mine > *count {
                strictly = true;
            }
        }
        for (label, count) in &self.primitive_queries {
            if *count > 0 && !other.primitive_queries.contains_key(label) {
                strictly = true;
            }
        }
        strictly
    }
}

/// Sign of a summand in a linear combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A logically block-encoded matrix: the encoded block (subnormalization
/// included), ancilla count, accumulated error bound, and query ledger.
#[derive(Clone, Debug)]
pub struct EncodedOperator {
    block: CMatrix,
    ancillas: u32,
    eps: f64,
    ledger: QueryLedger,
}

impl EncodedOperator {
    pub(crate) fn assemble(
        block: CMatrix,
        ancillas: u32,
        eps: f64,
        ledger: QueryLedger,
    ) -> Result<Self> {
        if !block.all_finite() {
            return Err(Error::InvalidInput("non-finite block entries".into()));
        }
        let norm = operator_norm(&block)?;
        if norm > 1.0 + NORM_SLACK {
            return Err(Error::NormBudgetExceeded { norm, step: 0 });
        }
        if eps < 0.0 {
            return Err(Error::InvalidInput("negative error bound".into()));
        }
        Ok(Self {
            block,
            ancillas,
            eps,
            ledger,
        })
    }

    /// An arbitrary unitary block encodes itself.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        Self::from_unitary_labeled(u, "U")
    }

    pub fn from_unitary_labeled(u: &CMatrix, label: &str) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::Shape("unitary must be square".into()));
        }
        let defect = crate::numerics::unitarity_defect(u);
        if defect > 1e-9 {
            return Err(Error::NotUnitary(defect));
        }
        let mut ledger = QueryLedger::new();
        ledger.charge(label, 1);
        Self::assemble(u.clone(), 0, 0.0, ledger)
    }

    /// Exact encoding of the identity (sigma_z tensor I recipe).
    pub fn identity(dim: usize) -> Self {
        let mut ledger = QueryLedger::new();
        ledger.charge("I", 1);
        ledger.add_gates(1);
        Self {
            block: CMatrix::identity(dim),
            ancillas: 1,
            eps: 0.0,
            ledger,
        }
    }

    /// Exact encoding of a real diagonal with entries of magnitude <= 1.
    ///
    /// Diagonal matrices are 1-sparse, so the sparse-access encoding
    /// applies with unit subnormalization.
    pub fn from_diagonal(entries: &[f64], label: &str) -> Result<Self> {
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("non-finite diagonal entries".into()));
        }
        let max = entries.iter().map(|e| e.abs()).fold(0.0, f64::max);
        if max > 1.0 + NORM_SLACK {
            return Err(Error::NormBudgetExceeded { norm: max, step: 0 });
        }
        let dim = entries.len();
        let mut ledger = QueryLedger::new();
        ledger.charge(label, 1);
        ledger.add_gates(log2_ceil(dim) as u64 + 1);
        Self::assemble(CMatrix::from_real_diag(entries), log2_ceil(dim) + 2, 0.0, ledger)
    }

    /// Exact encoding of the partial trace of |psi><psi|.
    ///
    /// `dim_traced` is the dimension of the factor being traced out;
    /// `trace_first` selects whether it is the leading or trailing factor
    /// of the index layout |first>|second>.
    pub fn encode_density(
        psi: &CVector,
        dim_traced: usize,
        trace_first: bool,
        label: &str,
    ) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm));
        }
        if dim_traced == 0 || psi.dim() % dim_traced != 0 {
            return Err(Error::Shape(format!(
                "state dimension {} does not factor through {}",
                psi.dim(),
                dim_traced
            )));
        }
        let dim_keep = psi.dim() / dim_traced;
        let rho = partial_trace_pure(psi, dim_keep, trace_first);
        let mut ledger = QueryLedger::new();
        // The construction uses the preparation unitary and its adjoint once each.
        ledger.charge(label, 2);
        ledger.add_gates(1);
        Self::assemble(rho, log2_ceil(psi.dim()), 0.0, ledger)
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    pub fn dim(&self) -> usize {
        self.block.dim()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn ancillas(&self) -> u32 {
        self.ancillas
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn norm(&self) -> f64 {
        operator_norm(&self.block).expect("validated on construction")
    }

    pub fn is_diagonal(&self) -> bool {
        self.block.is_diagonal(0.0)
    }

    pub fn diag_real(&self) -> Vec<f64> {
        self.block.diag_real()
    }

    pub(crate) fn ledger_mut(&mut self) -> &mut QueryLedger {
        &mut self.ledger
    }

    pub(crate) fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Encoding of `block / p` for `p > 1` (RY-rotation construction).
    pub fn scale_down(&self, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidScale(p));
        }
        let mut ledger = self.ledger.clone();
        ledger.add_gates(2);
        Self::assemble(
            self.block.scale(c(1.0 / p)),
            self.ancillas + 1,
            self.eps / p,
            ledger,
        )
    }

    /// Encoding of `block1 * block2`, charging each input once.
    pub fn product(&self, rhs: &Self) -> Result<Self> {
        if self.block.cols() != rhs.block.rows() {
            return Err(Error::Shape(format!(
                "product of {}x{} and {}x{}",
                self.block.rows(),
                self.block.cols(),
                rhs.block.rows(),
                rhs.block.cols()
            )));
        }
        let mut ledger = self.ledger.clone();
        ledger.merge(&rhs.ledger);
        ledger.add_gates(1);
        Self::assemble(
            self.block.mul(&rhs.block),
            self.ancillas + rhs.ancillas,
            self.eps + rhs.eps,
            ledger,
        )
    }

    /// Encoding of `block1 (x) block2` with parallel single uses.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        let mut ledger = self.ledger.clone();
        ledger.merge(&rhs.ledger);
        ledger.add_gates(1);
        Self::assemble(
            self.block.kron(&rhs.block),
            self.ancillas + rhs.ancillas,
            self.eps + rhs.eps,
            ledger,
        )
    }

    /// Uniform singular-value amplification by `gamma > 1` under the
    /// guarantee `gamma * norm <= 1 - delta`.
    ///
    /// Simulated exactly as scalar multiplication. The ledger charges the
    /// Theta(gamma) structural repetitions against the primitive counters
    /// and the full phase-modulation length
    /// `m = ceil((gamma/delta) ln(gamma/eps_amp))` as gate cost.
    pub fn amplify(&self, gamma: f64, delta: f64, eps_amp: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidScale(gamma));
        }
        if !(0.0 < delta && delta < 0.5) || !(0.0 < eps_amp && eps_amp < 0.5) {
            return Err(Error::InvalidInput(
                "amplification tolerances must lie in (0, 1/2)".into(),
            ));
        }
        let norm = self.norm();
        let limit = 1.0 - delta;
        if gamma * norm > limit + NORM_SLACK {
            return Err(Error::AmplificationOutOfRange {
                scaled: gamma * norm,
                limit,
            });
        }
        let m = ((gamma / delta) * (gamma / eps_amp).ln()).ceil() as u64;
        let mut ledger = self.ledger.scaled(gamma.ceil() as u64);
        ledger.add_gates(m);
        let block = self.block.scale(c(gamma));
        let out_norm = gamma * norm;
        Self::assemble(
            block,
            self.ancillas + 1,
            self.eps * gamma + eps_amp * out_norm,
            ledger,
        )
    }

    /// The phase-modulation length the amplification ledger charges.
    pub fn amplification_queries(gamma: f64, delta: f64, eps_amp: f64) -> u64 {
        ((gamma / delta) * (gamma / eps_amp).ln()).ceil() as u64
    }

    /// Polynomial transformation of a Hermitian block: `P(block)` for a
    /// real polynomial given by ascending coefficients.
    ///
    /// The bound check samples `10d + 1` Chebyshev nodes of the spectral
    /// interval `[-beta, beta]`, `beta = min(1, norm + eps)`, and requires
    /// `|P| <= 1` there (margin 1e-9) so the output stays a valid block.
    pub fn qsvt_poly(&self, coeffs: &[f64]) -> Result<Self> {
        let degree = coeffs.len().saturating_sub(1);
        if degree == 0 {
            return Err(Error::InvalidInput(
                "polynomial transformation needs degree >= 1".into(),
            ));
        }
        if !self.block.is_hermitian(1e-9) {
            return Err(Error::UnsupportedBlock(
                "polynomial transformation is restricted to Hermitian blocks".into(),
            ));
        }
        let beta = (self.norm() + self.eps).min(1.0);
        let nodes = 10 * degree + 1;
        for k in 0..nodes {
            let x = beta * (std::f64::consts::PI * k as f64 / (nodes - 1) as f64).cos();
            let v = eval_poly(coeffs, x);
            if v.abs() > 1.0 + 1e-9 {
                return Err(Error::PolynomialOutOfBounds { at: x, value: v });
            }
        }
        let block = if self.block.is_diagonal(0.0) {
            let entries: Vec<f64> = self
                .block
                .diag()
                .iter()
                .map(|z| eval_poly(coeffs, z.re))
                .collect();
            CMatrix::from_real_diag(&entries)
        } else {
            let (vals, vecs) = crate::numerics::hermitian_eig(&self.block)?;
            let transformed: Vec<f64> = vals.iter().map(|&v| eval_poly(coeffs, v)).collect();
            let lambda = CMatrix::from_real_diag(&transformed);
            vecs.mul(&lambda).mul(&vecs.dagger())
        };
        let d = degree as u64;
        let mut ledger = self.ledger.scaled(d);
        ledger.add_gates((self.ancillas as u64 + 1) * d);
        let eps = if self.eps == 0.0 {
            0.0
        } else {
            4.0 * degree as f64 * self.eps.sqrt()
        };
        Self::assemble(block, self.ancillas + 2, eps, ledger)
    }
}

/// Encoding of `(1/m) sum_i signs_i * blocks_i`, charging each input once.
pub fn linear_combine(terms: &[(&EncodedOperator, Sign)]) -> Result<EncodedOperator> {
    if terms.is_empty() {
        return Err(Error::Shape("linear combination of an empty list".into()));
    }
    let dim = terms[0].0.dim();
    if terms.iter().any(|(e, _)| e.dim() != dim) {
        return Err(Error::Shape("mixed dimensions in linear combination".into()));
    }
    let m = terms.len() as f64;
    let mut block = CMatrix::zeros(dim, dim);
    let mut eps = 0.0;
    let mut ledger = QueryLedger::new();
    let mut ancillas = log2_ceil(terms.len()) + 1;
    for (e, sign) in terms {
        block = block.add(&e.block.scale(c(sign.value() / m)));
        eps += e.eps / m;
        ledger.merge(&e.ledger);
        ancillas = ancillas.max(e.ancillas);
    }
    ledger.add_gates(terms.len() as u64);
    EncodedOperator::assemble(block, ancillas + log2_ceil(terms.len()) + 1, eps, ledger)
}

pub(crate) fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn log2_ceil(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}
