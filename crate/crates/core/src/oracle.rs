//! Independent classical reference: analytic gradients, finite
//! differences, plain gradient descent, dense eigensolvers and gradient
//! bounds. Every number the encoded path produces is checked against this
//! module, which never touches the block-encoding machinery.

use crate::numerics::{hermitian_eig, CMatrix, CVector};
use crate::qgd::{DescentSchedule, ObjectiveSpec};
use crate::{Error, Result};

/// Summary record for app-level comparisons.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub minimizer: Option<Vec<f64>>,
    pub eigenpairs: Option<Vec<(f64, CVector)>>,
}

/// Exact objective value by direct summation and products.
pub fn eval_objective(spec: &ObjectiveSpec, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for row in spec.power_rows() {
        let mut acc = 0.0;
        for (j, &a) in row.coeffs.iter().enumerate() {
            if a != 0.0 {
                acc += a * x[j].powi(row.exponent as i32);
            }
        }
        total += row.weight * acc;
    }
    for term in spec.product_terms() {
        let mut prod = term.weight;
        for f in &term.factors {
            prod *= affine_value(&f.coeffs, f.offset, x).powi(f.exponent as i32);
        }
        total += prod;
    }
    total
}

/// Exact analytic gradient.
pub fn analytic_gradient(spec: &ObjectiveSpec, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut grad = vec![0.0; n];
    for row in spec.power_rows() {
        let e = row.exponent;
        for (j, &a) in row.coeffs.iter().enumerate() {
            if a != 0.0 {
                grad[j] += row.weight * a * e as f64 * x[j].powi(e as i32 - 1);
            }
        }
    }
    for term in spec.product_terms() {
        let values: Vec<f64> = term
            .factors
            .iter()
            .map(|f| affine_value(&f.coeffs, f.offset, x))
            .collect();
        for (h, f) in term.factors.iter().enumerate() {
            // d/dx_j of the h-th factor times the remaining factors.
            let mut outer = term.weight * f.exponent as f64;
            outer *= values[h].powi(f.exponent as i32 - 1);
            for (h2, f2) in term.factors.iter().enumerate() {
                if h2 != h {
                    outer *= values[h2].powi(f2.exponent as i32);
                }
            }
            if outer == 0.0 {
                continue;
            }
            for (j, &a) in f.coeffs.iter().enumerate() {
                if a != 0.0 {
                    grad[j] += outer * a;
                }
            }
        }
    }
    grad
}

fn affine_value(coeffs: &[f64], offset: f64, x: &[f64]) -> f64 {
    let mut acc = offset;
    for (j, &a) in coeffs.iter().enumerate() {
        if a != 0.0 {
            acc += a * x[j];
        }
    }
    acc
}

/// Central finite differences with step `h`.
pub fn fd_gradient(spec: &ObjectiveSpec, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let plus = eval_objective(spec, &probe);
        probe[j] = x[j] - h;
        let minus = eval_objective(spec, &probe);
        probe[j] = x[j];
        grad[j] = (plus - minus) / (2.0 * h);
    }
    grad
}

/// Plain gradient descent with the same eta, T and x0 as the encoded
/// path. Returns the iterate list including x0 (length T + 1).
pub fn classical_descent(spec: &ObjectiveSpec, schedule: &DescentSchedule) -> Result<Vec<Vec<f64>>> {
    let mut x = crate::qgd::initial_shadow(spec, schedule)?;
    let mut iterates = vec![x.clone()];
    for _ in 0..schedule.steps {
        let grad = analytic_gradient(spec, &x);
        for j in 0..x.len() {
            x[j] -= schedule.eta * grad[j];
        }
        iterates.push(x.clone());
    }
    Ok(iterates)
}

/// Full spectrum of a Hermitian matrix, ascending, with verified
/// residuals.
pub fn dense_eig(h: &CMatrix) -> Result<Vec<(f64, CVector)>> {
    if !h.is_hermitian(1e-9 * h.max_abs().max(1.0)) {
        return Err(Error::InvalidInput("dense_eig needs a Hermitian matrix".into()));
    }
    let (vals, vecs) = hermitian_eig(h)?;
    let n = h.dim();
    let scale = h.max_abs().max(1.0);
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let v = CVector::new((0..n).map(|i| vecs.get(i, k)).collect());
        let hv = h.apply(&v);
        let mut resid = 0.0f64;
        for i in 0..n {
            resid = resid.max((hv.get(i) - v.get(i) * crate::numerics::c(vals[k])).norm());
        }
        if resid > 1e-9 * scale {
            return Err(Error::InvalidInput(format!(
                "eigenpair residual {resid} exceeds tolerance"
            )));
        }
        pairs.push((vals[k], v));
    }
    Ok(pairs)
}

const GRID_CAP_N: usize = 12;
const GRID_SAFETY: f64 = 1.5;

/// Overestimate of max over the box of the gradient infinity norm.
///
/// Linear objectives are exact; separable first-family objectives use a
/// per-coordinate grid; anything else uses a 5^n grid up to n = 12. The
/// grid modes multiply by a 1.5 safety factor.
pub fn grad_bound(spec: &ObjectiveSpec) -> Result<f64> {
    if is_linear(spec) {
        let g = analytic_gradient(spec, &vec![0.0; spec.n()]);
        return Ok(g.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    if spec.product_terms().is_empty() {
        // Separable: coordinate j's gradient depends on x_j alone.
        let mut best = 0.0f64;
        let samples = 1001;
        for j in 0..spec.n() {
            for k in 0..samples {
                let xj = -0.5 + k as f64 / (samples - 1) as f64;
                let mut g = 0.0;
                for row in spec.power_rows() {
                    let a = row.coeffs[j];
                    if a != 0.0 {
                        g += row.weight * a * row.exponent as f64 * xj.powi(row.exponent as i32 - 1);
                    }
                }
                best = best.max(g.abs());
            }
        }
        return Ok(best * GRID_SAFETY);
    }
    let n = spec.n_logical();
    if n > GRID_CAP_N {
        return Err(Error::NeedExplicitBound(n));
    }
    let mut best = 0.0f64;
    let mut x = vec![0.0; spec.n()];
    let mut idx = vec![0usize; n];
    loop {
        for j in 0..n {
            x[j] = -0.5 + idx[j] as f64 * 0.25;
        }
        let g = analytic_gradient(spec, &x);
        best = best.max(g.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let mut carry = 0;
        loop {
            if carry == n {
                return Ok(best * GRID_SAFETY);
            }
            idx[carry] += 1;
            if idx[carry] < 5 {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
    }
}

/// Closed-form triangle-inequality bound on the gradient infinity norm,
/// valid for every n. Looser than [`grad_bound`] but never below the
/// true supremum.
pub fn grad_bound_upper(spec: &ObjectiveSpec) -> f64 {
    let n = spec.n();
    let mut per_coord = vec![0.0f64; n];
    for row in spec.power_rows() {
        let e = row.exponent;
        let x_pow = 0.5f64.powi(e as i32 - 1);
        for (j, &a) in row.coeffs.iter().enumerate() {
            per_coord[j] += row.weight.abs() * a.abs() * e as f64 * x_pow;
        }
    }
    for term in spec.product_terms() {
        let caps: Vec<f64> = term
            .factors
            .iter()
            .map(|f| f.coeffs.iter().map(|a| a.abs()).sum::<f64>() / 2.0 + f.offset.abs())
            .collect();
        for (h, f) in term.factors.iter().enumerate() {
            let mut outer = term.weight.abs() * f.exponent as f64;
            outer *= caps[h].powi(f.exponent as i32 - 1);
            for (h2, f2) in term.factors.iter().enumerate() {
                if h2 != h {
                    outer *= caps[h2].powi(f2.exponent as i32);
                }
            }
            for (j, &a) in f.coeffs.iter().enumerate() {
                per_coord[j] += outer * a.abs();
            }
        }
    }
    per_coord.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

fn is_linear(spec: &ObjectiveSpec) -> bool {
    spec.power_rows().iter().all(|r| r.exponent == 1)
        && spec
            .product_terms()
            .iter()
            .all(|t| t.factors.len() == 1 && t.factors[0].exponent == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qgd::{AffineFactor, PowerRow, ProductTerm};

    fn quad_1d() -> ObjectiveSpec {
        ObjectiveSpec::sum_powers(1, vec![PowerRow::new(vec![1.0], 2)], 1.0).unwrap()
    }

    #[test]
    fn eval_type1() {
        assert!((eval_objective(&quad_1d(), &[0.25]) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn eval_type2_square() {
        let spec = ObjectiveSpec::sum_affine_powers(
            2,
            vec![ProductTerm::affine(1.0, vec![0.5, 0.5], 0.1, 2)],
            1.0,
        )
        .unwrap();
        // a.x + b = 0.3 at x = (0.2, 0.2)
        assert!((eval_objective(&spec, &[0.2, 0.2, 0.0, 0.0]) - 0.09f64).abs() < 1e-15);
    }

    #[test]
    fn eval_type3_product() {
        // factor values 0.2 and 0.3 with exponents 1 and 2 -> 0.2 * 0.09
        let spec = ObjectiveSpec::prod_affine_powers(
            2,
            1.0,
            vec![
                AffineFactor::new(vec![1.0, 0.0], 0.0, 1),
                AffineFactor::new(vec![0.0, 1.0], 0.0, 2),
            ],
            1.0,
        )
        .unwrap();
        assert!((eval_objective(&spec, &[0.2, 0.3]) - 0.018).abs() < 1e-15);
    }

    #[test]
    fn gradient_type1() {
        let g = analytic_gradient(&quad_1d(), &[0.25]);
        assert!((g[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_type2_chain_rule() {
        let spec = ObjectiveSpec::sum_affine_powers(
            2,
            vec![ProductTerm::affine(1.0, vec![0.5, 0.0], 0.0, 2)],
            1.0,
        )
        .unwrap();
        let g = analytic_gradient(&spec, &[0.3, 0.1, 0.0, 0.0]);
        assert!((g[0] - 0.15).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
    }

    #[test]
    fn gradient_type3_product_rule() {
        let spec = ObjectiveSpec::prod_affine_powers(
            2,
            1.0,
            vec![
                AffineFactor::new(vec![1.0, 0.0], 0.0, 1),
                AffineFactor::new(vec![0.0, 1.0], 0.0, 1),
            ],
            1.0,
        )
        .unwrap();
        let g = analytic_gradient(&spec, &[0.2, 0.3]);
        assert!((g[0] - 0.3).abs() < 1e-15);
        assert!((g[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn fd_matches_analytic() {
        let spec = ObjectiveSpec::new(
            3,
            vec![PowerRow::new(vec![0.25, -0.1, 0.2], 2)],
            vec![ProductTerm::new(
                0.5,
                vec![
                    AffineFactor::new(vec![0.2, 0.1, 0.0], 0.1, 1),
                    AffineFactor::new(vec![0.0, 0.25, -0.2], -0.05, 2),
                ],
            )],
            1.0,
        )
        .unwrap();
        let x = [0.1, -0.2, 0.3, 0.0];
        let a = analytic_gradient(&spec, &x);
        let f = fd_gradient(&spec, &x, 1e-5);
        for j in 0..4 {
            assert!((a[j] - f[j]).abs() < 1e-6, "coord {j}: {} vs {}", a[j], f[j]);
        }
    }

    #[test]
    fn dense_eig_diagonal() {
        let pairs = dense_eig(&CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        assert!((pairs[0].0 + 1.0).abs() < 1e-12);
        assert!((pairs[1].0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_eig_trace_invariant() {
        let h = CMatrix::from_rows(&[
            vec![crate::numerics::c(1.0), crate::numerics::c(0.3)],
            vec![crate::numerics::c(0.3), crate::numerics::c(-0.5)],
        ])
        .unwrap();
        let pairs = dense_eig(&h).unwrap();
        let trace: f64 = pairs.iter().map(|(v, _)| v).sum();
        assert!((trace - 0.5).abs() < 1e-9);
    }

    #[test]
    fn grad_bound_quadratic_grid_mode() {
        // |2x| max is 1; grid mode applies the 1.5 safety factor.
        let p = grad_bound(&quad_1d()).unwrap();
        assert!((p - 1.5).abs() < 1e-6);
    }

    #[test]
    fn grad_bound_linear_exact() {
        let spec =
            ObjectiveSpec::sum_powers(3, vec![PowerRow::new(vec![0.3, -0.7, 0.1], 1)], 1.0).unwrap();
        let p = grad_bound(&spec).unwrap();
        assert!((p - 0.7).abs() < 1e-12);
    }

    #[test]
    fn grad_bound_dominates_samples() {
        let spec = ObjectiveSpec::sum_affine_powers(
            3,
            vec![
                ProductTerm::affine(1.0, vec![0.2, -0.3, 0.1], 0.05, 2),
                ProductTerm::affine(-0.5, vec![0.1, 0.2, 0.2], 0.0, 3),
            ],
            1.0,
        )
        .unwrap();
        let p = grad_bound(&spec).unwrap();
        let pu = grad_bound_upper(&spec);
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..1000 {
            let x: Vec<f64> = (0..4).map(|_| next()).collect();
            let g = analytic_gradient(&spec, &x);
            let ginf = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(p >= ginf);
            assert!(pu >= ginf);
        }
    }
}
