//! Small dense-vector kernels on slices.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

#[inline]
pub fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

/// `y <- y + a x`
#[inline]
pub fn axpy<T: Real>(a: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

/// `y <- a x + b y`
#[inline]
pub fn axpby<T: Real>(a: T, x: &[T], b: T, y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = a * xi + b * *yi;
    }
}

#[inline]
pub fn scale<T: Real>(a: T, x: &mut [T]) {
    for xi in x.iter_mut() {
        *xi = a * *xi;
    }
}

pub fn scaled<T: Real>(a: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&xi| a * xi).collect()
}

pub fn sub<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn add<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| a + b).collect()
}

pub fn neg<T: Real>(x: &[T]) -> Vec<T> {
    x.iter().map(|&a| -a).collect()
}

pub fn zeros<T: Real>(n: usize) -> Vec<T> {
    vec![T::zero(); n]
}

/// Unit vector `e_i` of length `n`.
pub fn unit<T: Real>(n: usize, i: usize) -> Vec<T> {
    let mut e = zeros(n);
    e[i] = T::one();
    e
}

/// `‖x - y‖ / max(‖y‖, tiny)`
pub fn rel_diff<T: Real>(x: &[T], y: &[T]) -> T {
    let d = norm(&sub(x, y));
    let s = norm(y);
    if s > T::min_positive_value() {
        d / s
    } else {
        d
    }
}

/// `argmin_γ ‖x − γ y‖ = xᵀy / yᵀy`
pub fn ls_ratio<T: Real>(x: &[T], y: &[T]) -> T {
    dot(x, y) / dot(y, y)
}

/// Angle between two nonzero vectors, in radians.
///
/// Computed from the perpendicular component so that tiny angles keep
/// their relative accuracy.
pub fn angle<T: Real>(x: &[T], y: &[T]) -> T {
    let proj = ls_ratio(x, y);
    let perp = norm(&sub(x, &scaled(proj, y)));
    let s = (perp / norm(x)).min(T::one()).asin();
    if proj >= T::zero() {
        s
    } else {
        T::of(std::f64::consts::PI) - s
    }
}
