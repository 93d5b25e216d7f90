use super::tape::{Tape, Var};
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cosine similarity of two equal-length vectors, clamped to `[-1, 1]`.
///
/// A zero vector on either side is a domain error.
pub fn cosine_similarity<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::Shape(format!("cosine of lengths {} and {}", u.len(), v.len())));
    }
    let dot: T = u.iter().zip(v).map(|(&a, &b)| a * b).sum();
    let nu = u.iter().map(|&a| a * a).sum::<T>().sqrt();
    let nv = v.iter().map(|&b| b * b).sum::<T>().sqrt();
    if nu == T::zero() || nv == T::zero() {
        return Err(Error::Domain("cosine similarity of a zero vector".into()));
    }
    Ok((dot / (nu * nv)).max(-T::one()).min(T::one()))
}

/// Compares the tape gradient of a scalar function against central
/// differences at `x`.
///
/// `f` receives a fresh tape and the variable holding `x`, and returns the
/// scalar output. The result is the maximum over coordinates of
/// `|analytic - numeric| / max(1, |analytic|)`.
pub fn finite_diff_check<T, F>(f: F, x: &Tensor<T>, eps: T) -> Result<T>
where
    T: Scalar,
    F: for<'t> Fn(&mut Tape<'t, T>, Var) -> Result<Var>,
{
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {eps}")));
    }
    let analytic = {
        let mut tape = Tape::new();
        let v = tape.leaf(x.clone(), true);
        let out = f(&mut tape, v)?;
        tape.backward(out)?;
        tape.grad(v).map(<[T]>::to_vec).unwrap_or_else(|| vec![T::zero(); x.numel()])
    };
    let eval = |point: Tensor<T>| -> Result<T> {
        let mut tape = Tape::new();
        let v = tape.leaf(point, false);
        let out = f(&mut tape, v)?;
        tape.value(out).item()
    };
    let two = T::of(2.0);
    let mut worst = T::zero();
    for (i, &a) in analytic.iter().enumerate() {
        let mut plus = x.clone();
        plus.data_mut()[i] += eps;
        let mut minus = x.clone();
        minus.data_mut()[i] -= eps;
        let numeric = (eval(plus)? - eval(minus)?) / (two * eps);
        let err = (a - numeric).abs() / a.abs().max(T::one());
        worst = worst.max(err);
    }
    Ok(worst)
}
