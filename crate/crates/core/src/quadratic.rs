//! The quadratic `q(x) = ½ xᵀAx − bᵀx + c`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm};
use crate::operator::LinearOperator;
use crate::scalar::Real;

pub struct QuadraticModel<'a, T: Real> {
    op: &'a dyn LinearOperator<T>,
    b: Vec<T>,
    c: T,
}

impl<T: Real> Clone for QuadraticModel<'_, T> {
    fn clone(&self) -> Self {
        Self {
            op: self.op,
            b: self.b.clone(),
            c: self.c,
        }
    }
}

impl<'a, T: Real> QuadraticModel<'a, T> {
    pub fn new(op: &'a dyn LinearOperator<T>, b: Vec<T>, c: T) -> Result<Self> {
        check_dim(op.dim(), b.len())?;
        Ok(Self { op, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn operator(&self) -> &'a dyn LinearOperator<T> {
        self.op
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.op.apply(x)
    }

    /// `½ xᵀAx − bᵀx + c`, one operator application.
    pub fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x.len())?;
        let ax = self.op.apply(x);
        Ok(T::of(0.5) * dot(x, &ax) - dot(&self.b, x) + self.c)
    }

    /// Model value from a known gradient `g = Ax − b`, no operator application.
    pub fn value_from_gradient(&self, x: &[T], g: &[T]) -> T {
        // Ax = g + b  ⇒  q = ½ xᵀ(g + b) − bᵀx + c = ½ (xᵀg − bᵀx) + c
        T::of(0.5) * (dot(x, g) - dot(&self.b, x)) + self.c
    }

    /// `Ax − b`
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        let mut g = self.op.apply(x);
        for (gi, &bi) in g.iter_mut().zip(&self.b) {
            *gi = *gi - bi;
        }
        Ok(g)
    }

    /// Exact line-search step `α = −gᵀd / dᵀAd` along `d` from a point with gradient `g`.
    pub fn exact_linesearch(&self, g: &[T], d: &[T]) -> Result<T> {
        check_dim(self.dim(), g.len())?;
        check_dim(self.dim(), d.len())?;
        let ad = self.op.apply(d);
        exact_step(g, d, dot(d, &ad))
    }
}

/// `q_value` as a free function.
pub fn q_value<T: Real>(model: &QuadraticModel<'_, T>, x: &[T]) -> Result<T> {
    model.value(x)
}

/// `q_gradient` as a free function.
pub fn q_gradient<T: Real>(model: &QuadraticModel<'_, T>, x: &[T]) -> Result<Vec<T>> {
    model.gradient(x)
}

/// `exact_linesearch` as a free function.
pub fn exact_linesearch<T: Real>(model: &QuadraticModel<'_, T>, g: &[T], d: &[T]) -> Result<T> {
    model.exact_linesearch(g, d)
}

/// `ε_curv · ‖d‖²`, the zero-curvature threshold.
pub fn curvature_threshold<T: Real>(d: &[T]) -> T {
    let nd = norm(d);
    T::curvature_eps() * nd * nd
}

/// Step `−gᵀd / curvature` with the relative zero-curvature guard.
pub fn exact_step<T: Real>(g: &[T], d: &[T], curvature: T) -> Result<T> {
    let threshold = curvature_threshold(d);
    if curvature.abs() <= threshold {
        return Err(Error::ZeroCurvature {
            curvature: curvature.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    Ok(-dot(g, d) / curvature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::operator::{CountingOperator, DiagonalOperator, IdentityOperator};
    use proptest::prelude::*;

    #[test]
    fn value_identity() {
        let op = IdentityOperator::new(2);
        let m = QuadraticModel::new(&op, vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(q_value(&m, &[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn value_at_zero_is_constant() {
        let op = DenseMatrix::from_row_major(2, 2, vec![3.0, 1.0, 1.0, 7.0]).unwrap();
        let m = QuadraticModel::new(&op, vec![1.0, -2.0], 4.25).unwrap();
        assert_eq!(m.value(&[0.0, 0.0]).unwrap(), 4.25);
    }

    #[test]
    fn value_hand_example() {
        // ½(1·2·1) − (1·1 + 1·0) = 0
        let op = DiagonalOperator::new(vec![2.0, 4.0]);
        let m = QuadraticModel::new(&op, vec![1.0, 1.0], 0.0).unwrap();
        assert_eq!(m.value(&[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn value_uses_one_application() {
        let op = CountingOperator::new(DiagonalOperator::new(vec![2.0, 4.0]));
        let m = QuadraticModel::new(&op, vec![1.0, 1.0], 0.0).unwrap();
        m.value(&[0.3, 0.1]).unwrap();
        assert_eq!(op.count(), 1);
    }

    #[test]
    fn value_dimension_mismatch() {
        let op = IdentityOperator::new(2);
        let m = QuadraticModel::new(&op, vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            m.value(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(m.gradient(&[1.0, 2.0, 3.0]).is_err());
        assert!(QuadraticModel::new(&op, vec![0.0], 0.0).is_err());
    }

    #[test]
    fn gradient_examples() {
        let op = DiagonalOperator::new(vec![1.0, 2.0]);
        let m = QuadraticModel::new(&op, vec![1.0, 1.0], 0.0).unwrap();
        assert_eq!(m.gradient(&[0.0, 0.0]).unwrap(), vec![-1.0, -1.0]);
        assert_eq!(m.gradient(&[1.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        let id = IdentityOperator::new(3);
        let m = QuadraticModel::new(&id, vec![0.0; 3], 0.0).unwrap();
        assert_eq!(m.gradient(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
    }

    #[test]
    fn linesearch_examples() {
        let id = IdentityOperator::new(2);
        let m = QuadraticModel::<f64>::new(&id, vec![1.0, 2.0], 0.0).unwrap();
        let g = [0.5, -1.5];
        let d = [-0.5, 1.5];
        assert!((m.exact_linesearch(&g, &d).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(m.exact_linesearch(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);

        let op = DiagonalOperator::<f64>::new(vec![1.0, 4.0]);
        let m = QuadraticModel::new(&op, vec![0.0, 0.0], 0.0).unwrap();
        // −gᵀd / dᵀAd = 2 / 5
        let a = m.exact_linesearch(&[1.0, 1.0], &[-1.0, -1.0]).unwrap();
        assert!((a - 0.4).abs() < 1e-15);
    }

    #[test]
    fn linesearch_zero_curvature() {
        let op = DiagonalOperator::new(vec![1.0, -1.0]);
        let m = QuadraticModel::new(&op, vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            m.exact_linesearch(&[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::ZeroCurvature { .. })
        ));
    }

    proptest! {
        #[test]
        fn linesearch_is_stationary(
            d0 in 0.5f64..5.0, d1 in -5.0f64..-0.5, d2 in 0.5f64..5.0,
            x in proptest::collection::vec(-3.0f64..3.0, 3),
            dir in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            prop_assume!(crate::linalg::norm(&dir) > 0.1);
            let op = DiagonalOperator::new(vec![d0, d1, d2]);
            let m = QuadraticModel::new(&op, vec![1.0, -1.0, 0.5], 0.0).unwrap();
            let g = m.gradient(&x).unwrap();
            if let Ok(alpha) = m.exact_linesearch(&g, &dir) {
                let xa: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + alpha * b).collect();
                let ga = m.gradient(&xa).unwrap();
                let slope = crate::linalg::dot(&ga, &dir);
                prop_assert!(slope.abs() <= 1e-9 * (1.0 + crate::linalg::norm(&g) * crate::linalg::norm(&dir)));
            }
        }

        #[test]
        fn directional_derivative_matches_gradient(
            x in proptest::collection::vec(-3.0f64..3.0, 4),
            d in proptest::collection::vec(-3.0f64..3.0, 4),
        ) {
            prop_assume!(crate::linalg::norm(&d) > 0.1);
            let a = DenseMatrix::from_row_major(4, 4, vec![
                4.0, 1.0, 0.0, 0.5,
                1.0, 3.0, -1.0, 0.0,
                0.0, -1.0, 2.0, 0.3,
                0.5, 0.0, 0.3, -1.0,
            ]).unwrap();
            let m = QuadraticModel::new(&a, vec![1.0, 0.0, -2.0, 0.5], 0.7).unwrap();
            let eps = 1e-5 * (1.0 + crate::linalg::norm(&x)) / crate::linalg::norm(&d);
            let xp: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
            let xm: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - eps * b).collect();
            let fd = (m.value(&xp).unwrap() - m.value(&xm).unwrap()) / (2.0 * eps);
            let exact = crate::linalg::dot(&m.gradient(&x).unwrap(), &d);
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
        }
    }
}
