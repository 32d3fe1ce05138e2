//! Amplitude-encoding simulation, diagonal embedding of a prepared state,
//! and the product-form power state used by univariate fitting.

use crate::block_encoding::{log2_ceil, EncodedOperator, QueryLedger};
use crate::numerics::{c, next_power_of_two, C64, CVector};
use crate::{Error, Result};

/// Which amplitude-encoding route prepares the state. The routes differ
/// only in recorded cost, not numeric behavior, since the simulation is
/// at the amplitude level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepMode {
    /// Universal protocol: O(log n) circuit, O(s_a) ancillas, O(log n)
    /// classical preprocessing.
    General,
    /// Structured amplitudes: O(log n) circuit, O(1) ancillas, no
    /// preprocessing.
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepClass {
    General,
    Structured,
    ProductForm,
}

/// An amplitude vector with padding metadata, standing in for a
/// state-preparation unitary's first column.
#[derive(Clone, Debug)]
pub struct PreparedState {
    amplitudes: CVector,
    logical_dim: usize,
    padded_dim: usize,
    class: PrepClass,
    ancillas: u32,
    label: String,
}

impl PreparedState {
    pub(crate) fn from_parts(
        amplitudes: CVector,
        logical_dim: usize,
        class: PrepClass,
        ancillas: u32,
    ) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-9);
        let padded_dim = amplitudes.dim();
        debug_assert!(padded_dim.is_power_of_two());
        Self {
            amplitudes,
            logical_dim,
            padded_dim,
            class,
            ancillas,
            label: "state".into(),
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn logical_dim(&self) -> usize {
        self.logical_dim
    }

    pub fn padded_dim(&self) -> usize {
        self.padded_dim
    }

    pub fn class(&self) -> PrepClass {
        self.class
    }

    /// Ancilla count recorded for the preparation circuit (s_a for the
    /// general route, O(1) otherwise).
    pub fn prep_ancillas(&self) -> u32 {
        self.ancillas
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Exact block encoding of diag(amplitudes) over the padded dimension,
    /// with log2(padded) + 3 ancillas.
    pub fn embed_diagonal(&self) -> EncodedOperator {
        let entries: Vec<C64> = self.amplitudes.as_slice().to_vec();
        let block = crate::numerics::CMatrix::from_complex_diag(&entries);
        let logn = log2_ceil(self.padded_dim);
        let mut ledger = QueryLedger::new();
        ledger.charge(&self.label, 2);
        ledger.add_gates(logn as u64 + 3);
        if self.class == PrepClass::General {
            ledger.add_preprocessing(logn as u64);
        }
        EncodedOperator::assemble(block, logn + 3, 0.0, ledger)
            .expect("unit amplitudes always fit the norm budget")
    }
}

/// Normalize and zero-pad `coeffs` to a power of two.
pub fn prepare(coeffs: &CVector, mode: PrepMode) -> Result<PreparedState> {
    if !coeffs.all_finite() {
        return Err(Error::InvalidInput("non-finite coefficients".into()));
    }
    let norm = coeffs.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let logical = coeffs.dim();
    let padded = next_power_of_two(logical);
    let mut amps = vec![C64::new(0.0, 0.0); padded];
    for i in 0..logical {
        amps[i] = coeffs.get(i) / norm;
    }
    let nonzeros = coeffs.as_slice().iter().filter(|z| z.norm() > 0.0).count() as u32;
    let (class, ancillas) = match mode {
        PrepMode::General => (PrepClass::General, nonzeros),
        PrepMode::Structured => (PrepClass::Structured, 1),
    };
    Ok(PreparedState::from_parts(
        CVector::new(amps),
        logical,
        class,
        ancillas,
    ))
}

/// The product-form state proportional to (z, z^2, ..., z^n) with
/// z = sqrt(x), built by single-qubit rotations. Normalization is
/// computed numerically.
pub fn power_state(x: f64, n: usize) -> Result<PreparedState> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "power state needs x in (0, 1], got {x}"
        )));
    }
    if !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "power state dimension must be a power of two, got {n}"
        )));
    }
    let z = x.sqrt();
    let raw: Vec<f64> = (1..=n).map(|i| z.powi(i as i32)).collect();
    let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
    let amps: Vec<C64> = raw.iter().map(|&a| c(a / norm)).collect();
    Ok(PreparedState::from_parts(
        CVector::new(amps),
        n,
        PrepClass::ProductForm,
        1,
    ))
}

/// Squared normalization constant C^2 of [`power_state`]: the overlap
/// readouts of the fitting driver divide it back out.
pub fn power_state_c_squared(x: f64, n: usize) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "power state needs x in (0, 1], got {x}"
        )));
    }
    let z = x.sqrt();
    let sum: f64 = (1..=n).map(|i| z.powi(2 * i as i32)).sum();
    Ok(1.0 / sum)
}

/// State whose first n entries are sqrt(row_j), for the v2 inner-product
/// construction. Requires nonnegative entries with sum <= 1; the slack
/// goes to one padding amplitude past the logical window.
pub fn sqrt_row_state(row: &[f64]) -> Result<PreparedState> {
    for (j, &a) in row.iter().enumerate() {
        if a < 0.0 {
            return Err(Error::NegativeCoefficient(j));
        }
        if !a.is_finite() {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
    }
    let sum: f64 = row.iter().sum();
    if sum > 1.0 + 1e-12 {
        return Err(Error::InvalidInput(format!(
            "sqrt-row state needs sum of coefficients <= 1, got {sum}"
        )));
    }
    let logical = row.len();
    let padded = next_power_of_two(logical + 1);
    let mut amps = vec![C64::new(0.0, 0.0); padded];
    for (j, &a) in row.iter().enumerate() {
        amps[j] = c(a.sqrt());
    }
    amps[logical] = c((1.0 - sum).max(0.0).sqrt());
    Ok(PreparedState::from_parts(
        CVector::new(amps),
        logical,
        PrepClass::General,
        row.iter().filter(|&&a| a > 0.0).count() as u32 + 1,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::CMatrix;

    #[test]
    fn prepare_basis_state() {
        let s = prepare(&CVector::from_real(&[1.0, 0.0, 0.0, 0.0]), PrepMode::General).unwrap();
        assert_eq!(s.padded_dim(), 4);
        assert_eq!(s.prep_ancillas(), 1);
        assert!((s.amplitudes().get(0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepare_uniform() {
        let s = prepare(&CVector::from_real(&[1.0; 4]), PrepMode::General).unwrap();
        assert_eq!(s.prep_ancillas(), 4);
        for i in 0..4 {
            assert!((s.amplitudes().get(i).re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn prepare_three_four() {
        let s = prepare(&CVector::from_real(&[3.0, 4.0]), PrepMode::General).unwrap();
        assert!((s.amplitudes().get(0).re - 0.6).abs() < 1e-12);
        assert!((s.amplitudes().get(1).re - 0.8).abs() < 1e-12);
        assert_eq!(s.prep_ancillas(), 2);
    }

    #[test]
    fn prepare_rejects_zero() {
        assert!(matches!(
            prepare(&CVector::zeros(3), PrepMode::General),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn prepare_idempotent_under_renormalization() {
        let s = prepare(&CVector::from_real(&[0.2, -0.7, 0.1]), PrepMode::General).unwrap();
        let again = prepare(s.amplitudes(), PrepMode::General).unwrap();
        for i in 0..s.padded_dim() {
            assert!((s.amplitudes().get(i) - again.amplitudes().get(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn embed_diagonal_examples() {
        let s = prepare(&CVector::from_real(&[1.0, 0.0]), PrepMode::General).unwrap();
        let e = s.embed_diagonal();
        assert!(e.block().max_abs_diff(&CMatrix::from_real_diag(&[1.0, 0.0])) < 1e-12);
        assert_eq!(e.eps(), 0.0);
        assert_eq!(e.ancillas(), 1 + 3);

        let s = prepare(&CVector::from_real(&[1.0; 4]), PrepMode::General).unwrap();
        let e = s.embed_diagonal();
        assert!(e.block().max_abs_diff(&CMatrix::from_real_diag(&[0.5; 4])) < 1e-12);

        let s = prepare(&CVector::from_real(&[3.0, 4.0]), PrepMode::General).unwrap();
        let e = s.embed_diagonal();
        assert!(e.block().max_abs_diff(&CMatrix::from_real_diag(&[0.6, 0.8])) < 1e-12);
    }

    #[test]
    fn embed_reproduces_state_on_all_ones() {
        let v = CVector::from_real(&[0.3, -0.2, 0.6]);
        let s = prepare(&v, PrepMode::General).unwrap();
        let e = s.embed_diagonal();
        let ones = CVector::from_real(&[1.0; 4]);
        let out = e.block().apply(&ones);
        let norm = v.norm();
        for i in 0..3 {
            assert!((out.get(i) - v.get(i) / c(norm)).norm() < 1e-12);
        }
        assert!(out.get(3).norm() < 1e-12);
    }

    #[test]
    fn power_state_uniform_at_one() {
        let s = power_state(1.0, 4).unwrap();
        for i in 0..4 {
            assert!((s.amplitudes().get(i).re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn power_state_quarter() {
        let s = power_state(0.25, 2).unwrap();
        assert!((s.amplitudes().get(0).re - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((s.amplitudes().get(1).re - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn power_state_geometric_ratio() {
        let s = power_state(0.25, 4).unwrap();
        for i in 0..3 {
            let ratio = s.amplitudes().get(i + 1).re / s.amplitudes().get(i).re;
            assert!((ratio - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn power_state_rejects_bad_x() {
        assert!(power_state(0.0, 4).is_err());
        assert!(power_state(-0.5, 4).is_err());
    }

    #[test]
    fn sqrt_row_state_squares_back() {
        let row = [0.3, 0.0, 0.5];
        let s = sqrt_row_state(&row).unwrap();
        for (j, &a) in row.iter().enumerate() {
            let amp = s.amplitudes().get(j).re;
            assert!((amp * amp - a).abs() < 1e-12);
        }
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_row_state_rejects_negative() {
        assert!(matches!(
            sqrt_row_state(&[0.2, -0.1]),
            Err(Error::NegativeCoefficient(1))
        ));
    }
}
