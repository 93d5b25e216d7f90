use crate::error::{Error, Result};
use crate::numkernel::{Tape, Tensor, Var};
use crate::scalar::Scalar;

fn check_labels<T: Scalar>(labels: &[T], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} scores", labels.len())));
    }
    if labels.iter().any(|&y| y < T::zero() || !y.is_finite()) {
        return Err(Error::Domain("relevance labels must be finite and nonnegative".into()));
    }
    if labels.iter().all(|&y| y == T::zero()) {
        return Err(Error::Domain("listwise loss needs at least one positive label".into()));
    }
    Ok(())
}

/// `-Σ_j y_j · log softmax(ŷ)_j` over a `1 × m` row of scores.
pub fn listwise_loss_on_tape<T: Scalar>(tape: &mut Tape<'_, T>, scores: Var, labels: &[T]) -> Result<Var> {
    let shape = tape.value(scores).shape().to_vec();
    check_labels(labels, tape.value(scores).numel())?;
    let logp = tape.log_softmax(scores);
    let y = tape.constant(Tensor::new(shape, labels.to_vec())?);
    let weighted = tape.mul(logp, y)?;
    let total = tape.sum(weighted);
    Ok(tape.scale(total, -T::one()))
}

pub fn listwise_loss<T: Scalar>(labels: &[T], scores: &[T]) -> Result<T> {
    let mut tape = Tape::new();
    let s = tape.constant(Tensor::vector(scores.to_vec()));
    let loss = listwise_loss_on_tape(&mut tape, s, labels)?;
    tape.value(loss).item()
}
