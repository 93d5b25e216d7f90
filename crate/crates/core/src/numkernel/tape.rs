//! Tape-based reverse-mode differentiation.
//!
//! Every operation appends a node to the tape, so node order is a
//! topological order of the computation. `backward` walks the tape once in
//! reverse. Parameters are registered by reference and never copied.

use super::tensor::{kernels, matmul_dims, Tensor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

enum Value<'a, T> {
    Owned(Tensor<T>),
    Borrowed(&'a Tensor<T>),
}

impl<T> Value<'_, T> {
    fn get(&self) -> &Tensor<T> {
        match self {
            Value::Owned(t) => t,
            Value::Borrowed(t) => t,
        }
    }
}

enum Op<T> {
    Leaf,
    MatMul(Var, Var),
    MatMulBt(Var, Var),
    Transpose(Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    AddRow(Var, Var),
    MulRow(Var, Var),
    Scale(Var, T),
    Tanh(Var),
    Sigmoid(Var),
    Exp(Var),
    Ln(Var),
    SoftmaxRows(Var),
    LogSoftmax(Var),
    LayerNormRows { x: Var, inv_std: Vec<T> },
    GatherRows { table: Var, indices: Vec<usize> },
    SliceCols { x: Var, start: usize },
    ConcatCols(Vec<Var>),
    Row { x: Var, index: usize },
    MeanRows(Var),
    Sum(Var),
    Reshape(Var),
}

struct Node<'a, T> {
    value: Value<'a, T>,
    op: Op<T>,
    requires_grad: bool,
}

/// Records operations for a single forward pass and differentiates them.
///
/// Calling [`Tape::backward`] a second time without [`Tape::reset_grads`]
/// is a contract error rather than a silent accumulation.
pub struct Tape<'a, T> {
    nodes: Vec<Node<'a, T>>,
    grads: Vec<Option<Vec<T>>>,
    backward_done: bool,
}

impl<T: Scalar> Default for Tape<'_, T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<'a, T: Scalar> Tape<'a, T> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new(), grads: Vec::new(), backward_done: false }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Value<'a, T>, op: Op<T>, requires_grad: bool) -> Var {
        self.nodes.push(Node { value, op, requires_grad });
        self.grads.push(None);
        Var(self.nodes.len() - 1)
    }

    fn record(&mut self, value: Tensor<T>, op: Op<T>, inputs: &[Var]) -> Var {
        let requires_grad = inputs.iter().any(|v| self.nodes[v.0].requires_grad);
        self.push(Value::Owned(value), op, requires_grad)
    }

    pub fn leaf(&mut self, value: Tensor<T>, requires_grad: bool) -> Var {
        self.push(Value::Owned(value), Op::Leaf, requires_grad)
    }

    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.leaf(value, false)
    }

    /// Registers a borrowed tensor (typically a model parameter).
    pub fn param(&mut self, value: &'a Tensor<T>, requires_grad: bool) -> Var {
        self.push(Value::Borrowed(value), Op::Leaf, requires_grad)
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        self.nodes[v.0].value.get()
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Gradient of the last `backward` loss with respect to `v`, if any flowed.
    pub fn grad(&self, v: Var) -> Option<&[T]> {
        self.grads[v.0].as_deref()
    }

    pub fn grad_tensor(&self, v: Var) -> Option<Tensor<T>> {
        let shape = self.value(v).shape().to_vec();
        self.grad(v).map(|g| Tensor::new(shape, g.to_vec()).expect("gradient matches value shape"))
    }

    pub fn reset_grads(&mut self) {
        self.grads.iter_mut().for_each(|g| *g = None);
        self.backward_done = false;
    }

    fn same_shape(&self, a: Var, b: Var, what: &str) -> Result<()> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa != sb {
            return Err(Error::Shape(format!("{what}: {sa:?} vs {sb:?}")));
        }
        Ok(())
    }

    fn unary(&mut self, a: Var, f: impl Fn(T) -> T, op: Op<T>) -> Var {
        let out = self.value(a).map(f);
        self.record(out, op, &[a])
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, p, q) = matmul_dims(self.value(a).shape(), self.value(b).shape())?;
        let data = kernels::matmul(self.value(a).data(), self.value(b).data(), m, p, q);
        let out = Tensor::new(vec![m, q], data)?;
        Ok(self.record(out, Op::MatMul(a, b), &[a, b]))
    }

    /// `a · bᵀ` for `a[m×p]`, `b[q×p]`.
    pub fn matmul_bt(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa.len() != 2 || sb.len() != 2 || sa[1] != sb[1] {
            return Err(Error::Shape(format!("matmul_bt: {sa:?} x {sb:?}ᵀ")));
        }
        let (m, p, q) = (sa[0], sa[1], sb[0]);
        let data = kernels::matmul_bt(self.value(a).data(), self.value(b).data(), m, p, q);
        let out = Tensor::new(vec![m, q], data)?;
        Ok(self.record(out, Op::MatMulBt(a, b), &[a, b]))
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).transpose()?;
        Ok(self.record(out, Op::Transpose(a), &[a]))
    }

    fn zip(&mut self, a: Var, b: Var, what: &str, f: impl Fn(T, T) -> T, op: Op<T>) -> Result<Var> {
        self.same_shape(a, b, what)?;
        let (ta, tb) = (self.value(a), self.value(b));
        let data = ta.data().iter().zip(tb.data()).map(|(&x, &y)| f(x, y)).collect();
        let out = Tensor::new(ta.shape().to_vec(), data)?;
        Ok(self.record(out, op, &[a, b]))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.zip(a, b, "add", |x, y| x + y, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.zip(a, b, "sub", |x, y| x - y, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.zip(a, b, "mul", |x, y| x * y, Op::Mul(a, b))
    }

    fn row_broadcast(&mut self, a: Var, r: Var, what: &str, f: impl Fn(T, T) -> T, op: Op<T>) -> Result<Var> {
        let (ta, tr) = (self.value(a), self.value(r));
        let c = ta.cols();
        if tr.numel() != c {
            return Err(Error::Shape(format!("{what}: row of {} for {:?}", tr.numel(), ta.shape())));
        }
        let row = tr.data();
        let data = ta.data().iter().enumerate().map(|(i, &x)| f(x, row[i % c])).collect();
        let out = Tensor::new(ta.shape().to_vec(), data)?;
        Ok(self.record(out, op, &[a, r]))
    }

    /// Adds a row vector to every row of `a` (leading-axis broadcast).
    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var> {
        self.row_broadcast(a, row, "add_row", |x, y| x + y, Op::AddRow(a, row))
    }

    /// Multiplies every row of `a` elementwise by a row vector.
    pub fn mul_row(&mut self, a: Var, row: Var) -> Result<Var> {
        self.row_broadcast(a, row, "mul_row", |x, y| x * y, Op::MulRow(a, row))
    }

    pub fn scale(&mut self, a: Var, c: T) -> Var {
        self.unary(a, |x| x * c, Op::Scale(a, c))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.unary(a, T::tanh, Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        self.unary(a, kernels::sigmoid, Op::Sigmoid(a))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        self.unary(a, T::exp, Op::Exp(a))
    }

    pub fn ln(&mut self, a: Var) -> Var {
        self.unary(a, T::ln, Op::Ln(a))
    }

    /// Row-wise softmax. With `causal`, entry `(i, j)` for `j > i` is forced to
    /// zero and the remaining entries of the row renormalize.
    pub fn softmax_rows(&mut self, a: Var, causal: bool) -> Result<Var> {
        let t = self.value(a);
        let (rows, cols) = (t.rows(), t.cols());
        if causal && rows != cols {
            return Err(Error::Shape(format!("causal softmax needs a square matrix, got {:?}", t.shape())));
        }
        let mut data = t.data().to_vec();
        for i in 0..rows {
            let row = &mut data[i * cols..(i + 1) * cols];
            if causal {
                kernels::softmax_in_place(&mut row[..=i]);
                row[i + 1..].iter_mut().for_each(|v| *v = T::zero());
            } else {
                kernels::softmax_in_place(row);
            }
        }
        let out = Tensor::new(t.shape().to_vec(), data)?;
        Ok(self.record(out, Op::SoftmaxRows(a), &[a]))
    }

    /// Log-softmax over all elements of `a`.
    pub fn log_softmax(&mut self, a: Var) -> Var {
        let t = self.value(a);
        let max = t.data().iter().copied().fold(T::neg_infinity(), T::max);
        let lse = max + t.data().iter().map(|&x| (x - max).exp()).sum::<T>().ln();
        let out = t.map(|x| x - lse);
        self.record(out, Op::LogSoftmax(a), &[a])
    }

    /// Normalizes each row to zero mean and unit variance (no affine part).
    pub fn layer_norm_rows(&mut self, a: Var, eps: T) -> Var {
        let t = self.value(a);
        let (rows, cols) = (t.rows(), t.cols());
        let n = T::of(cols as f64);
        let mut data = t.data().to_vec();
        let mut inv_std = Vec::with_capacity(rows);
        for i in 0..rows {
            let row = &mut data[i * cols..(i + 1) * cols];
            let mean = row.iter().copied().sum::<T>() / n;
            let var = row.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n;
            let r = T::one() / (var + eps).sqrt();
            row.iter_mut().for_each(|x| *x = (*x - mean) * r);
            inv_std.push(r);
        }
        let out = Tensor::new(t.shape().to_vec(), data).expect("same shape");
        self.record(out, Op::LayerNormRows { x: a, inv_std }, &[a])
    }

    /// Selects rows of a `[vocab × d]` table.
    pub fn gather_rows(&mut self, table: Var, indices: &[usize]) -> Result<Var> {
        let t = self.value(table);
        if t.shape().len() != 2 {
            return Err(Error::Shape(format!("gather_rows needs a matrix, got {:?}", t.shape())));
        }
        if indices.is_empty() {
            return Err(Error::Domain("gather_rows with no indices".into()));
        }
        let (rows, cols) = (t.shape()[0], t.shape()[1]);
        let mut data = Vec::with_capacity(indices.len() * cols);
        for &i in indices {
            if i >= rows {
                return Err(Error::Domain(format!("row index {i} out of range for {rows} rows")));
            }
            data.extend_from_slice(t.row(i));
        }
        let out = Tensor::new(vec![indices.len(), cols], data)?;
        Ok(self.record(out, Op::GatherRows { table, indices: indices.to_vec() }, &[table]))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Result<Var> {
        let t = self.value(a);
        let (rows, cols) = (t.rows(), t.cols());
        if len == 0 || start + len > cols {
            return Err(Error::Shape(format!("slice_cols {start}..{} of {cols} columns", start + len)));
        }
        let mut data = Vec::with_capacity(rows * len);
        for i in 0..rows {
            data.extend_from_slice(&t.row(i)[start..start + len]);
        }
        let out = Tensor::new(vec![rows, len], data)?;
        Ok(self.record(out, Op::SliceCols { x: a, start }, &[a]))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let first = parts.first().ok_or_else(|| Error::Domain("concat_cols of nothing".into()))?;
        let rows = self.value(*first).rows();
        if parts.iter().any(|&p| self.value(p).rows() != rows) {
            return Err(Error::Shape("concat_cols row counts differ".into()));
        }
        let total: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut data = Vec::with_capacity(rows * total);
        for i in 0..rows {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(i));
            }
        }
        let out = Tensor::new(vec![rows, total], data)?;
        Ok(self.record(out, Op::ConcatCols(parts.to_vec()), parts))
    }

    /// Row `index` of `a` as a `[1 × cols]` matrix.
    pub fn row(&mut self, a: Var, index: usize) -> Result<Var> {
        let t = self.value(a);
        if index >= t.rows() {
            return Err(Error::Shape(format!("row {index} of {} rows", t.rows())));
        }
        let out = Tensor::new(vec![1, t.cols()], t.row(index).to_vec())?;
        Ok(self.record(out, Op::Row { x: a, index }, &[a]))
    }

    pub fn mean_rows(&mut self, a: Var) -> Var {
        let t = self.value(a);
        let (rows, cols) = (t.rows(), t.cols());
        let n = T::of(rows as f64);
        let mut data = vec![T::zero(); cols];
        for i in 0..rows {
            for (d, &x) in data.iter_mut().zip(t.row(i)) {
                *d += x;
            }
        }
        data.iter_mut().for_each(|d| *d /= n);
        let out = Tensor::new(vec![1, cols], data).expect("row shape");
        self.record(out, Op::MeanRows(a), &[a])
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).data().iter().copied().sum::<T>();
        self.record(Tensor::scalar(s), Op::Sum(a), &[a])
    }

    pub fn reshape(&mut self, a: Var, shape: &[usize]) -> Result<Var> {
        let out = self.value(a).reshape(shape)?;
        Ok(self.record(out, Op::Reshape(a), &[a]))
    }

    /// Populates gradients of `loss` with respect to every node that requires one.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        if self.backward_done {
            return Err(Error::Contract("backward called again without reset_grads".into()));
        }
        if self.value(loss).numel() != 1 {
            return Err(Error::Contract(format!(
                "backward needs a scalar loss, got shape {:?}",
                self.value(loss).shape()
            )));
        }
        self.backward_done = true;
        if !self.nodes[loss.0].requires_grad {
            return Ok(());
        }
        self.grads[loss.0] = Some(vec![T::one()]);

        let Tape { nodes, grads, .. } = self;
        let nodes = &*nodes;
        for i in (0..=loss.0).rev() {
            if !nodes[i].requires_grad {
                continue;
            }
            let Some(g) = grads[i].take() else { continue };
            let out = nodes[i].value.get();
            propagate(nodes, grads, &nodes[i].op, out, &g);
            grads[i] = Some(g);
        }
        Ok(())
    }
}

/// Gradient buffer for `v`, or `None` when `v` does not need one.
fn buf<'g, T: Scalar>(nodes: &[Node<'_, T>], grads: &'g mut [Option<Vec<T>>], v: Var) -> Option<&'g mut Vec<T>> {
    if !nodes[v.0].requires_grad {
        return None;
    }
    let len = nodes[v.0].value.get().numel();
    Some(grads[v.0].get_or_insert_with(|| vec![T::zero(); len]))
}

fn propagate<T: Scalar>(nodes: &[Node<'_, T>], grads: &mut [Option<Vec<T>>], op: &Op<T>, out: &Tensor<T>, g: &[T]) {
    let val = |v: Var| nodes[v.0].value.get();
    match op {
        Op::Leaf => {}
        Op::MatMul(a, b) => {
            let (ta, tb) = (val(*a), val(*b));
            let (m, p, q) = (ta.shape()[0], ta.shape()[1], tb.shape()[1]);
            if let Some(ga) = buf(nodes, grads, *a) {
                kernels::add_matmul_bt(ga, g, tb.data(), m, q, p);
            }
            if let Some(gb) = buf(nodes, grads, *b) {
                kernels::add_matmul_at(gb, ta.data(), g, m, p, q);
            }
        }
        Op::MatMulBt(a, b) => {
            // c[m×q] = a[m×p] · b[q×p]ᵀ
            let (ta, tb) = (val(*a), val(*b));
            let (m, p, q) = (ta.shape()[0], ta.shape()[1], tb.shape()[0]);
            if let Some(ga) = buf(nodes, grads, *a) {
                kernels::add_matmul(ga, g, tb.data(), m, q, p);
            }
            if let Some(gb) = buf(nodes, grads, *b) {
                kernels::add_matmul_at(gb, g, ta.data(), m, q, p);
            }
        }
        Op::Transpose(a) => {
            let (m, n) = (out.shape()[0], out.shape()[1]);
            if let Some(ga) = buf(nodes, grads, *a) {
                let t = kernels::transpose(g, m, n);
                ga.iter_mut().zip(t).for_each(|(x, y)| *x += y);
            }
        }
        Op::Add(a, b) => {
            for v in [*a, *b] {
                if let Some(gv) = buf(nodes, grads, v) {
                    gv.iter_mut().zip(g).for_each(|(x, &y)| *x += y);
                }
            }
        }
        Op::Sub(a, b) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                ga.iter_mut().zip(g).for_each(|(x, &y)| *x += y);
            }
            if let Some(gb) = buf(nodes, grads, *b) {
                gb.iter_mut().zip(g).for_each(|(x, &y)| *x -= y);
            }
        }
        Op::Mul(a, b) => {
            let (ta, tb) = (val(*a), val(*b));
            if let Some(ga) = buf(nodes, grads, *a) {
                for ((x, &y), &o) in ga.iter_mut().zip(g).zip(tb.data()) {
                    *x += y * o;
                }
            }
            if let Some(gb) = buf(nodes, grads, *b) {
                for ((x, &y), &o) in gb.iter_mut().zip(g).zip(ta.data()) {
                    *x += y * o;
                }
            }
        }
        Op::AddRow(a, r) => {
            let c = out.cols();
            if let Some(ga) = buf(nodes, grads, *a) {
                ga.iter_mut().zip(g).for_each(|(x, &y)| *x += y);
            }
            if let Some(gr) = buf(nodes, grads, *r) {
                for (i, &y) in g.iter().enumerate() {
                    gr[i % c] += y;
                }
            }
        }
        Op::MulRow(a, r) => {
            let c = out.cols();
            let (ta, tr) = (val(*a), val(*r));
            if let Some(ga) = buf(nodes, grads, *a) {
                for (i, (x, &y)) in ga.iter_mut().zip(g).enumerate() {
                    *x += y * tr.data()[i % c];
                }
            }
            if let Some(gr) = buf(nodes, grads, *r) {
                for (i, (&y, &o)) in g.iter().zip(ta.data()).enumerate() {
                    gr[i % c] += y * o;
                }
            }
        }
        Op::Scale(a, c) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                ga.iter_mut().zip(g).for_each(|(x, &y)| *x += y * *c);
            }
        }
        Op::Tanh(a) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                for ((x, &y), &o) in ga.iter_mut().zip(g).zip(out.data()) {
                    *x += y * (T::one() - o * o);
                }
            }
        }
        Op::Sigmoid(a) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                for ((x, &y), &o) in ga.iter_mut().zip(g).zip(out.data()) {
                    *x += y * o * (T::one() - o);
                }
            }
        }
        Op::Exp(a) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                for ((x, &y), &o) in ga.iter_mut().zip(g).zip(out.data()) {
                    *x += y * o;
                }
            }
        }
        Op::Ln(a) => {
            let ta = val(*a);
            if let Some(ga) = buf(nodes, grads, *a) {
                for ((x, &y), &i) in ga.iter_mut().zip(g).zip(ta.data()) {
                    *x += y / i;
                }
            }
        }
        Op::SoftmaxRows(a) => {
            let c = out.cols();
            if let Some(ga) = buf(nodes, grads, *a) {
                for ((gin, gout), y) in ga.chunks_mut(c).zip(g.chunks(c)).zip(out.data().chunks(c)) {
                    let dot: T = gout.iter().zip(y).map(|(&d, &p)| d * p).sum();
                    for ((x, &d), &p) in gin.iter_mut().zip(gout).zip(y) {
                        *x += p * (d - dot);
                    }
                }
            }
        }
        Op::LogSoftmax(a) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                let total: T = g.iter().copied().sum();
                for ((x, &d), &o) in ga.iter_mut().zip(g).zip(out.data()) {
                    *x += d - o.exp() * total;
                }
            }
        }
        Op::LayerNormRows { x: a, inv_std } => {
            let c = out.cols();
            let n = T::of(c as f64);
            if let Some(ga) = buf(nodes, grads, *a) {
                for (((gin, gout), y), &r) in
                    ga.chunks_mut(c).zip(g.chunks(c)).zip(out.data().chunks(c)).zip(inv_std)
                {
                    let mean_g = gout.iter().copied().sum::<T>() / n;
                    let mean_gy = gout.iter().zip(y).map(|(&d, &v)| d * v).sum::<T>() / n;
                    for ((x, &d), &v) in gin.iter_mut().zip(gout).zip(y) {
                        *x += r * (d - mean_g - v * mean_gy);
                    }
                }
            }
        }
        Op::GatherRows { table, indices } => {
            let c = out.cols();
            if let Some(gt) = buf(nodes, grads, *table) {
                for (&row, gr) in indices.iter().zip(g.chunks(c)) {
                    for (x, &y) in gt[row * c..(row + 1) * c].iter_mut().zip(gr) {
                        *x += y;
                    }
                }
            }
        }
        Op::SliceCols { x: a, start } => {
            let len = out.cols();
            let c = val(*a).cols();
            if let Some(ga) = buf(nodes, grads, *a) {
                for (gin, gout) in ga.chunks_mut(c).zip(g.chunks(len)) {
                    for (x, &y) in gin[*start..*start + len].iter_mut().zip(gout) {
                        *x += y;
                    }
                }
            }
        }
        Op::ConcatCols(parts) => {
            let total = out.cols();
            let mut offset = 0;
            for &p in parts {
                let c = val(p).cols();
                if let Some(gp) = buf(nodes, grads, p) {
                    for (gin, gout) in gp.chunks_mut(c).zip(g.chunks(total)) {
                        for (x, &y) in gin.iter_mut().zip(&gout[offset..offset + c]) {
                            *x += y;
                        }
                    }
                }
                offset += c;
            }
        }
        Op::Row { x: a, index } => {
            let c = out.cols();
            if let Some(ga) = buf(nodes, grads, *a) {
                for (x, &y) in ga[index * c..(index + 1) * c].iter_mut().zip(g) {
                    *x += y;
                }
            }
        }
        Op::MeanRows(a) => {
            let c = out.cols();
            let n = T::of(val(*a).rows() as f64);
            if let Some(ga) = buf(nodes, grads, *a) {
                for gin in ga.chunks_mut(c) {
                    for (x, &y) in gin.iter_mut().zip(g) {
                        *x += y / n;
                    }
                }
            }
        }
        Op::Sum(a) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                ga.iter_mut().for_each(|x| *x += g[0]);
            }
        }
        Op::Reshape(a) => {
            if let Some(ga) = buf(nodes, grads, *a) {
                ga.iter_mut().zip(g).for_each(|(x, &y)| *x += y);
            }
        }
    }
}
