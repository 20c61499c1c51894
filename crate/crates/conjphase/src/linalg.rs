//! Dense least-squares smaller than the public surface: one SVD-backed
//! solver shared by the coefficient-fitting paths.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution bundle of a least-squares solve.
#[derive(Debug)]
pub(crate) struct LeastSquares {
    /// Minimizer of `‖A x − b‖₂`.
    pub solution: Vec<f64>,
    /// Residual norm `‖A x − b‖₂` at the minimizer.
    pub residual: f64,
    /// Smallest singular value of `A`.
    pub sigma_min: f64,
}

/// Minimizes `‖A x − b‖₂` by singular value decomposition, refusing systems
/// whose smallest singular value drops below `tol` times the largest.
pub(crate) fn solve_least_squares(
    a: &DMatrix<f64>,
    b: &[f64],
    tol: f64,
    context: &'static str,
) -> Result<LeastSquares> {
    assert_eq!(a.nrows(), b.len(), "system and right-hand side must agree");
    assert!(a.ncols() > 0, "least squares needs at least one unknown");
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |acc, &s| acc.max(s));
    let sigma_min = svd.singular_values.iter().fold(f64::INFINITY, |acc, &s| acc.min(s));
    let sigma_min = if sigma_min.is_finite() { sigma_min } else { 0.0 };
    if sigma_max == 0.0 || sigma_min <= tol * sigma_max {
        return Err(Error::IllConditioned { context, sigma_min, sigma_max });
    }
    let rhs = DVector::from_column_slice(b);
    let x = svd.solve(&rhs, 0.0).map_err(Error::invalid)?;
    let residual = (a * &x - &rhs).norm();
    Ok(LeastSquares { solution: x.iter().copied().collect(), residual, sigma_min })
}

/// One Gauss–Newton step `δ = −(JᵀJ)⁻¹ Jᵀ r` via Cholesky, or `None` when
/// the normal matrix is numerically singular (the caller then keeps its
/// current iterate).
pub(crate) fn gauss_newton_step(j: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    let jt = j.transpose();
    let normal = &jt * j;
    let gradient = &jt * r;
    normal.cholesky().map(|chol| -chol.solve(&gradient))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_and_overdetermined_systems() {
        // Square: x + y = 3, x − y = 1 → (2, 1).
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let out = solve_least_squares(&a, &[3.0, 1.0], 1e-12, "test").unwrap();
        assert!((out.solution[0] - 2.0).abs() < 1e-12);
        assert!((out.solution[1] - 1.0).abs() < 1e-12);
        assert!(out.residual < 1e-12);

        // Overdetermined consistent rows keep a zero residual; an extra
        // inconsistent row shows up in the residual instead of the solution
        // blowing up.
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let out = solve_least_squares(&a, &[1.0, 1.0, 4.0], 1e-12, "test").unwrap();
        assert!((out.solution[0] - 2.0).abs() < 1e-12);
        assert!((out.residual - f64::sqrt(6.0)).abs() < 1e-12);
    }

    #[test]
    fn refuses_singular_systems() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let err = solve_least_squares(&a, &[1.0, 2.0], 1e-12, "test").unwrap_err();
        assert!(matches!(err, Error::IllConditioned { context: "test", .. }));
    }
}
