//! Constructions that turn encoded diagonals into encoded scalars and
//! slices: both inner-product routes (a_i^T x + b as a scalar tensored
//! with the identity), single-entry extraction, direct-sum slicing, and
//! the positive-power transform.

use crate::block_encoding::{
    linear_combine, log2_ceil, EncodedOperator, QueryLedger, Sign, DEFAULT_DELTA, DEFAULT_EPS_AMP,
};
use crate::numerics::{c, CMatrix, CVector};
use crate::state_prep::PreparedState;
use crate::{Error, Result};

/// Indices of the nonzero coefficients of a row (0-based, strictly
/// increasing).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput(
                    "support indices must be strictly increasing".into(),
                ));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::Index { index: last, dim: n });
            }
        }
        Ok(Self { indices })
    }

    pub fn from_row(row: &[f64]) -> Self {
        Self {
            indices: row
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(j, _)| j)
                .collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// Effective size: empty supports count as one dummy slot so the
    /// construction never divides by zero.
    pub fn effective_size(&self) -> usize {
        self.indices.len().max(1)
    }
}

/// The Hadamard-test routine behind the v1 construction: the two-branch
/// pure state whose reduced density matrix is diag(p0, p1) with
/// p0 = (1 + overlap)/2.
pub fn hadamard_test_state(overlap: f64) -> (CVector, f64, f64) {
    let p0 = (1.0 + overlap) / 2.0;
    let p1 = (1.0 - overlap) / 2.0;
    let psi = CVector::new(vec![
        c(p0.max(0.0).sqrt()),
        c(0.0),
        c(0.0),
        c(p1.max(0.0).sqrt()),
    ]);
    (psi, p0, p1)
}

/// First inner-product route: from encoded diag(x) and diag(a_i) build
/// the block encoding of (a_i^T x + b) tensor I_n.
///
/// Follows the full pipeline: product, Hadamard-test overlap, density
/// encoding, subtraction of I/2, tensor with the identity, offset
/// insertion, and one amplification removing the 8 s_i factor.
pub fn inner_product_v1(
    x: &EncodedOperator,
    a: &EncodedOperator,
    support: &SupportSet,
    b: f64,
) -> Result<EncodedOperator> {
    if !x.is_diagonal() || !a.is_diagonal() {
        return Err(Error::UnsupportedBlock(
            "inner product needs diagonal blocks".into(),
        ));
    }
    if x.dim() != a.dim() {
        return Err(Error::Shape(format!(
            "inner product dimensions {} vs {}",
            x.dim(),
            a.dim()
        )));
    }
    let n = x.dim();
    let s_i = support.effective_size();
    if b.abs() >= 4.0 * s_i as f64 {
        return Err(Error::InvalidInput(format!(
            "offset {b} too large for the 8 s_i pipeline"
        )));
    }

    let xa = x.product(a)?;
    let overlap = support
        .indices()
        .iter()
        .map(|&j| xa.block().get(j, j).re)
        .sum::<f64>()
        / s_i as f64;

    let (psi, _, _) = hadamard_test_state(overlap);
    let mut rho = EncodedOperator::encode_density(&psi, 2, false, "hadamard_test")?;
    // The controlled preparations behind the test each query the
    // product encoding once.
    rho.ledger_mut().merge(xa.ledger());
    let rho = rho.with_eps(xa.eps());

    let half = EncodedOperator::identity(2).scale_down(2.0)?;
    let sub = linear_combine(&[(&rho, Sign::Plus), (&half, Sign::Minus)])?;
    let wide = sub.tensor(&EncodedOperator::identity(n))?;

    let offset = offset_encoding(2 * n, b, 4.0 * s_i as f64)?;
    let combined = linear_combine(&[(&wide, Sign::Plus), (&offset.0, offset.1)])?;
    let window = principal_block(&combined, 0, n)?;
    window.amplify(8.0 * s_i as f64, DEFAULT_DELTA, DEFAULT_EPS_AMP)
}

/// Encoding of (|b| / divisor) I_dim and the sign to combine it with.
fn offset_encoding(dim: usize, b: f64, divisor: f64) -> Result<(EncodedOperator, Sign)> {
    let id = EncodedOperator::identity(dim);
    let sign = if b < 0.0 { Sign::Minus } else { Sign::Plus };
    if b == 0.0 {
        let zero = linear_combine(&[(&id, Sign::Plus), (&id, Sign::Minus)])?;
        return Ok((zero, Sign::Plus));
    }
    Ok((id.scale_down(divisor / b.abs())?, sign))
}

/// Second inner-product route: the state-preparation unitary for
/// sqrt(a_i) replaces the support walk; two uses of each input and one
/// amplification removing the factor 2.
pub fn inner_product_v2(
    x: &EncodedOperator,
    sqrt_a: &PreparedState,
    b: f64,
) -> Result<EncodedOperator> {
    if !x.is_diagonal() {
        return Err(Error::UnsupportedBlock(
            "inner product needs a diagonal block".into(),
        ));
    }
    let n = x.dim();
    let window = sqrt_a.logical_dim().min(n);
    let mut overlap = 0.0;
    for j in 0..window {
        let amp = sqrt_a.amplitudes().get(j);
        if amp.im != 0.0 || amp.re < 0.0 {
            return Err(Error::NegativeCoefficient(j));
        }
        overlap += x.block().get(j, j).re * amp.re * amp.re;
    }
    let value = overlap + b;
    let mut ledger = x.ledger().scaled(2);
    ledger.charge(sqrt_a.label(), 2);
    ledger.add_gates(4);
    let half = EncodedOperator::assemble(
        CMatrix::from_real_diag(&vec![value / 2.0; n]),
        x.ancillas() + log2_ceil(n) + 3,
        x.eps() / 2.0,
        ledger,
    )?;
    half.amplify(2.0, DEFAULT_DELTA, DEFAULT_EPS_AMP)
}

/// Block encoding of the single-entry matrix x_j |k><k| from an encoded
/// diagonal, charging the input twice.
pub fn single_entry(x: &EncodedOperator, j: usize, k: usize) -> Result<EncodedOperator> {
    if !x.is_diagonal() {
        return Err(Error::UnsupportedBlock(
            "single-entry extraction needs a diagonal block".into(),
        ));
    }
    let n = x.dim();
    if j >= n {
        return Err(Error::Index { index: j, dim: n });
    }
    if k >= n {
        return Err(Error::Index { index: k, dim: n });
    }
    let mut block = CMatrix::zeros(n, n);
    block.set(k, k, x.block().get(j, j));
    let mut ledger = x.ledger().scaled(2);
    ledger.add_gates(log2_ceil(n) as u64 + 3);
    EncodedOperator::assemble(block, x.ancillas() + log2_ceil(n) + 3, x.eps(), ledger)
}

/// Principal sub-block [offset, offset + dim) of an encoded operator.
///
/// An X-gate relabeling moves the window to the top-left corner, where
/// the nesting property of block encodings applies directly.
pub fn principal_block(a: &EncodedOperator, offset: usize, dim: usize) -> Result<EncodedOperator> {
    let total = a.dim();
    if offset + dim > total {
        return Err(Error::Index {
            index: offset + dim,
            dim: total,
        });
    }
    let block = CMatrix::from_fn(dim, dim, |i, j| a.block().get(offset + i, offset + j));
    let mut ledger = a.ledger().clone();
    ledger.add_gates(3);
    EncodedOperator::assemble(block, a.ancillas() + 1, a.eps(), ledger)
}

/// Block encoding of the i-th diagonal block of a direct sum of
/// equal-size blocks.
pub fn slice_direct_sum(a: &EncodedOperator, i: usize, block_dim: usize) -> Result<EncodedOperator> {
    let total = a.dim();
    if block_dim == 0 || total % block_dim != 0 {
        return Err(Error::Shape(format!(
            "dimension {total} does not split into blocks of {block_dim}"
        )));
    }
    let count = total / block_dim;
    if i >= count {
        return Err(Error::Index { index: i, dim: count });
    }
    principal_block(a, i * block_dim, block_dim)
}

/// Entrywise positive power A^c / 2 of a positive encoded diagonal with
/// spectrum inside [1/kappa, 1].
pub fn positive_power(e: &EncodedOperator, cpow: f64, kappa: f64) -> Result<EncodedOperator> {
    if !(0.0 < cpow && cpow < 1.0) {
        return Err(Error::InvalidInput(format!(
            "power exponent must lie in (0, 1), got {cpow}"
        )));
    }
    if kappa < 1.0 {
        return Err(Error::InvalidInput(format!("kappa must be >= 1, got {kappa}")));
    }
    if !e.is_diagonal() {
        return Err(Error::UnsupportedBlock(
            "positive power needs a diagonal block".into(),
        ));
    }
    let lo = 1.0 / kappa - 1e-12;
    let hi = 1.0 + 1e-12;
    let mut out = Vec::with_capacity(e.dim());
    for z in e.block().diag() {
        if z.im != 0.0 || z.re < lo || z.re > hi {
            return Err(Error::OutOfSpectralRange(z.re));
        }
        out.push(z.re.powf(cpow) / 2.0);
    }
    let target_eps = DEFAULT_EPS_AMP;
    let mut ledger = e.ledger().scaled(kappa.ceil() as u64);
    ledger.add_gates((kappa * (kappa / target_eps).ln().powi(2)).ceil() as u64);
    EncodedOperator::assemble(
        CMatrix::from_real_diag(&out),
        e.ancillas() + 2,
        kappa * e.eps() + target_eps,
        ledger,
    )
}
