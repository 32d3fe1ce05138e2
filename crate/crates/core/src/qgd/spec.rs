//! Objective families for the gradient-descent engines.
//!
//! The three families share one representation: a sum of per-coordinate
//! power rows plus a sum of weighted products of affine powers. Each pure
//! family uses one slice of it; application reductions may mix them.

use serde::Serialize;

use crate::numerics::next_power_of_two;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// f = sum_i sum_j a_ij x_j^{e_i}
    SumPowers,
    /// f = sum_i w_i (a_i . x + b_i)^{e_i}
    SumAffinePowers,
    /// f = w prod_i (a_i . x + b_i)^{e_i}
    ProdAffinePowers,
    /// Any combination of the above.
    Mixed,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SumPowers => "SUM_POWERS",
            Family::SumAffinePowers => "SUM_AFFINE_POWERS",
            Family::ProdAffinePowers => "PROD_AFFINE_POWERS",
            Family::Mixed => "MIXED",
        }
    }
}

/// One per-coordinate power row: weight * sum_j coeffs_j x_j^exponent.
#[derive(Clone, Debug, Serialize)]
pub struct PowerRow {
    pub coeffs: Vec<f64>,
    pub exponent: u32,
    pub weight: f64,
}

impl PowerRow {
    pub fn new(coeffs: Vec<f64>, exponent: u32) -> Self {
        Self {
            coeffs,
            exponent,
            weight: 1.0,
        }
    }

    pub fn weighted(coeffs: Vec<f64>, exponent: u32, weight: f64) -> Self {
        Self {
            coeffs,
            exponent,
            weight,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weight == 0.0 || self.coeffs.iter().all(|&a| a == 0.0)
    }
}

/// One affine factor (a . x + b)^exponent.
#[derive(Clone, Debug, Serialize)]
pub struct AffineFactor {
    pub coeffs: Vec<f64>,
    pub offset: f64,
    pub exponent: u32,
}

impl AffineFactor {
    pub fn new(coeffs: Vec<f64>, offset: f64, exponent: u32) -> Self {
        Self {
            coeffs,
            offset,
            exponent,
        }
    }
}

/// A weighted product of affine factors.
#[derive(Clone, Debug, Serialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub factors: Vec<AffineFactor>,
}

impl ProductTerm {
    pub fn new(weight: f64, factors: Vec<AffineFactor>) -> Self {
        Self { weight, factors }
    }

    /// A single affine power, the second-family building block.
    pub fn affine(weight: f64, coeffs: Vec<f64>, offset: f64, exponent: u32) -> Self {
        Self {
            weight,
            factors: vec![AffineFactor::new(coeffs, offset, exponent)],
        }
    }
}

/// An objective over the box [-1/2, 1/2]^n with a known gradient bound P.
///
/// Coordinates are padded to the next power of two; padded coordinates
/// carry zero coefficients everywhere and stay inert under descent.
#[derive(Clone, Debug, Serialize)]
pub struct ObjectiveSpec {
    n_logical: usize,
    n: usize,
    power_rows: Vec<PowerRow>,
    product_terms: Vec<ProductTerm>,
    grad_bound: f64,
}

impl ObjectiveSpec {
    pub fn new(
        n: usize,
        power_rows: Vec<PowerRow>,
        product_terms: Vec<ProductTerm>,
        grad_bound: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("objective needs n >= 1".into()));
        }
        if power_rows.is_empty() && product_terms.is_empty() {
            return Err(Error::InvalidInput("objective has no terms".into()));
        }
        if !(grad_bound > 0.0) || !grad_bound.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gradient bound must be positive, got {grad_bound}"
            )));
        }
        let padded = next_power_of_two(n);
        let mut rows = power_rows;
        for row in &mut rows {
            validate_coeffs(&row.coeffs, n)?;
            if row.exponent < 1 {
                return Err(Error::InvalidInput("exponents must be >= 1".into()));
            }
            if !row.weight.is_finite() {
                return Err(Error::InvalidInput("non-finite row weight".into()));
            }
            row.coeffs.resize(padded, 0.0);
        }
        let mut terms = product_terms;
        for term in &mut terms {
            if term.factors.is_empty() {
                return Err(Error::InvalidInput("product term has no factors".into()));
            }
            if !term.weight.is_finite() {
                return Err(Error::InvalidInput("non-finite term weight".into()));
            }
            for f in &mut term.factors {
                validate_coeffs(&f.coeffs, n)?;
                if f.exponent < 1 {
                    return Err(Error::InvalidInput("exponents must be >= 1".into()));
                }
                if !f.offset.is_finite() {
                    return Err(Error::InvalidInput("non-finite offset".into()));
                }
                f.coeffs.resize(padded, 0.0);
            }
        }
        Ok(Self {
            n_logical: n,
            n: padded,
            power_rows: rows,
            product_terms: terms,
            grad_bound,
        })
    }

    /// First family: rows of per-coordinate powers. Row exponents default
    /// to the 1-based row index.
    pub fn sum_powers(n: usize, rows: Vec<PowerRow>, grad_bound: f64) -> Result<Self> {
        Self::new(n, rows, Vec::new(), grad_bound)
    }

    /// Second family: a sum of weighted affine powers.
    pub fn sum_affine_powers(
        n: usize,
        terms: Vec<ProductTerm>,
        grad_bound: f64,
    ) -> Result<Self> {
        if terms.iter().any(|t| t.factors.len() != 1) {
            return Err(Error::InvalidInput(
                "second-family terms must have exactly one factor".into(),
            ));
        }
        Self::new(n, Vec::new(), terms, grad_bound)
    }

    /// Third family: a single product of affine powers.
    pub fn prod_affine_powers(
        n: usize,
        weight: f64,
        factors: Vec<AffineFactor>,
        grad_bound: f64,
    ) -> Result<Self> {
        Self::new(
            n,
            Vec::new(),
            vec![ProductTerm::new(weight, factors)],
            grad_bound,
        )
    }

    pub fn family(&self) -> Family {
        match (
            self.power_rows.is_empty(),
            self.product_terms.len(),
            self.product_terms.iter().all(|t| t.factors.len() == 1),
        ) {
            (false, 0, _) => Family::SumPowers,
            (true, _, true) => Family::SumAffinePowers,
            (true, 1, false) => Family::ProdAffinePowers,
            _ => Family::Mixed,
        }
    }

    /// Logical variable count before padding.
    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    /// Padded variable count the operators act on.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn power_rows(&self) -> &[PowerRow] {
        &self.power_rows
    }

    pub fn product_terms(&self) -> &[ProductTerm] {
        &self.product_terms
    }

    pub fn grad_bound(&self) -> f64 {
        self.grad_bound
    }

    pub fn with_grad_bound(mut self, grad_bound: f64) -> Result<Self> {
        if !(grad_bound > 0.0) || !grad_bound.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gradient bound must be positive, got {grad_bound}"
            )));
        }
        self.grad_bound = grad_bound;
        Ok(self)
    }

    /// Number of branches the gradient construction averages over: one
    /// per power row plus one per (term, factor) product-rule pair. This
    /// is the K of the 1/(KP) gradient normalization.
    pub fn term_count(&self) -> usize {
        self.power_rows.len()
            + self
                .product_terms
                .iter()
                .map(|t| t.factors.len())
                .sum::<usize>()
    }

    /// Sum of two objectives over the same variables.
    pub fn combined(&self, other: &ObjectiveSpec) -> Result<ObjectiveSpec> {
        if self.n_logical != other.n_logical {
            return Err(Error::Shape(format!(
                "combining objectives over {} and {} variables",
                self.n_logical, other.n_logical
            )));
        }
        let mut rows = self.power_rows.clone();
        rows.extend(other.power_rows.iter().cloned());
        let mut terms = self.product_terms.clone();
        terms.extend(other.product_terms.iter().cloned());
        let trim = |v: &mut Vec<f64>| v.truncate(self.n_logical);
        for r in &mut rows {
            trim(&mut r.coeffs);
        }
        for t in &mut terms {
            for f in &mut t.factors {
                trim(&mut f.coeffs);
            }
        }
        ObjectiveSpec::new(
            self.n_logical,
            rows,
            terms,
            self.grad_bound.max(other.grad_bound),
        )
    }
}

fn validate_coeffs(coeffs: &[f64], n: usize) -> Result<()> {
    if coeffs.len() != n {
        return Err(Error::Shape(format!(
            "coefficient row of length {} for n = {n}",
            coeffs.len()
        )));
    }
    for &a in coeffs {
        if !a.is_finite() {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        if a.abs() > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "coefficient magnitude {a} exceeds 1; fold the excess into the row weight"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_detection() {
        let t1 = ObjectiveSpec::sum_powers(2, vec![PowerRow::new(vec![1.0, 0.0], 2)], 1.0).unwrap();
        assert_eq!(t1.family(), Family::SumPowers);

        let t2 = ObjectiveSpec::sum_affine_powers(
            2,
            vec![ProductTerm::affine(1.0, vec![0.5, 0.5], 0.0, 2)],
            1.0,
        )
        .unwrap();
        assert_eq!(t2.family(), Family::SumAffinePowers);

        let t3 = ObjectiveSpec::prod_affine_powers(
            2,
            1.0,
            vec![
                AffineFactor::new(vec![1.0, 0.0], 0.0, 1),
                AffineFactor::new(vec![0.0, 1.0], 0.0, 1),
            ],
            1.0,
        )
        .unwrap();
        assert_eq!(t3.family(), Family::ProdAffinePowers);

        let mixed = t1.combined(&t2).unwrap();
        assert_eq!(mixed.family(), Family::Mixed);
    }

    #[test]
    fn padding_to_power_of_two() {
        let spec =
            ObjectiveSpec::sum_powers(3, vec![PowerRow::new(vec![0.5, 0.5, 0.5], 1)], 1.0).unwrap();
        assert_eq!(spec.n_logical(), 3);
        assert_eq!(spec.n(), 4);
        assert_eq!(spec.power_rows()[0].coeffs.len(), 4);
        assert_eq!(spec.power_rows()[0].coeffs[3], 0.0);
    }

    #[test]
    fn term_count_counts_branches() {
        let spec = ObjectiveSpec::new(
            2,
            vec![PowerRow::new(vec![1.0, 0.0], 2)],
            vec![ProductTerm::new(
                1.0,
                vec![
                    AffineFactor::new(vec![0.5, 0.0], 0.0, 1),
                    AffineFactor::new(vec![0.0, 0.5], 0.1, 2),
                ],
            )],
            1.0,
        )
        .unwrap();
        assert_eq!(spec.term_count(), 3);
    }

    #[test]
    fn rejects_oversized_coefficients() {
        assert!(ObjectiveSpec::sum_powers(1, vec![PowerRow::new(vec![1.5], 1)], 1.0).is_err());
    }

    #[test]
    fn rejects_zero_exponent() {
        assert!(ObjectiveSpec::sum_powers(1, vec![PowerRow::new(vec![0.5], 0)], 1.0).is_err());
    }
}
