use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major n-dimensional array.
///
/// Shapes hold positive dimensions; the empty shape is a scalar with one
/// element. Two-dimensional helpers treat the last axis as columns and fold
/// every leading axis into rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::Shape(format!("dimensions must be positive, got {shape:?}")));
        }
        let numel: usize = shape.iter().product();
        if numel != data.len() {
            return Err(Error::Shape(format!(
                "shape {shape:?} needs {numel} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let numel = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![T::zero(); numel] }
    }

    pub fn full(shape: &[usize], value: T) -> Self {
        let numel = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![value; numel] }
    }

    pub fn scalar(value: T) -> Self {
        Tensor { shape: Vec::new(), data: vec![value] }
    }

    pub fn vector(data: Vec<T>) -> Self {
        Tensor { shape: vec![data.len()], data }
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(&[n, n]);
        for i in 0..n {
            t.data[i * n + i] = T::one();
        }
        t
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(usize) -> T) -> Self {
        let numel: usize = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: (0..numel).map(&mut f).collect() }
    }

    /// Builds a tensor from nested rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(vec![rows.len(), cols], rows.concat())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    /// Size of the last axis (1 for scalars).
    pub fn cols(&self) -> usize {
        self.shape.last().copied().unwrap_or(1)
    }

    /// Number of rows when every leading axis is folded together.
    pub fn rows(&self) -> usize {
        self.numel() / self.cols()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn get(&self, index: &[usize]) -> T {
        assert_eq!(index.len(), self.shape.len(), "index rank mismatch");
        let mut flat = 0;
        for (&i, &d) in index.iter().zip(&self.shape) {
            assert!(i < d, "index {i} out of bounds for axis of size {d}");
            flat = flat * d + i;
        }
        self.data[flat]
    }

    /// Value of a one-element tensor.
    pub fn item(&self) -> Result<T> {
        if self.numel() != 1 {
            return Err(Error::Shape(format!("expected one element, shape is {:?}", self.shape)));
        }
        Ok(self.data[0])
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<Self> {
        Self::new(shape.to_vec(), self.data.clone())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Tensor { shape: self.shape.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Result<Self> {
        if self.shape.len() != 2 {
            return Err(Error::Shape(format!("transpose needs a matrix, got {:?}", self.shape)));
        }
        let (m, n) = (self.shape[0], self.shape[1]);
        Ok(Tensor { shape: vec![n, m], data: kernels::transpose(&self.data, m, n) })
    }

    /// Plain matrix product without gradient recording.
    pub fn matmul(&self, other: &Tensor<T>) -> Result<Self> {
        let (m, p, q) = matmul_dims(&self.shape, &other.shape)?;
        Ok(Tensor { shape: vec![m, q], data: kernels::matmul(&self.data, &other.data, m, p, q) })
    }

    /// Softmax along `axis`; outputs are positive and sum to one along it.
    pub fn softmax(&self, axis: usize) -> Result<Self> {
        if axis >= self.shape.len().max(1) {
            return Err(Error::Shape(format!("axis {axis} out of range for {:?}", self.shape)));
        }
        let len = self.shape.get(axis).copied().unwrap_or(1);
        let inner: usize = self.shape.iter().skip(axis + 1).product();
        let outer = self.numel() / (len * inner);
        let mut out = self.data.clone();
        let mut buf = vec![T::zero(); len];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * len * inner + i;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = self.data[base + j * inner];
                }
                kernels::softmax_in_place(&mut buf);
                for (j, b) in buf.iter().enumerate() {
                    out[base + j * inner] = *b;
                }
            }
        }
        Ok(Tensor { shape: self.shape.clone(), data: out })
    }

    /// Converts element type, e.g. `f64` parameters to an `f32` copy.
    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor { shape: self.shape.clone(), data: self.data.iter().map(|v| U::of(v.as_f64())).collect() }
    }
}

pub(crate) fn matmul_dims(a: &[usize], b: &[usize]) -> Result<(usize, usize, usize)> {
    if a.len() != 2 || b.len() != 2 {
        return Err(Error::Shape(format!("matmul needs matrices, got {a:?} x {b:?}")));
    }
    if a[1] != b[0] {
        return Err(Error::Shape(format!("matmul inner dimensions differ: {a:?} x {b:?}")));
    }
    Ok((a[0], a[1], b[1]))
}

/// Raw row-major kernels shared by the tensor API and the tape.
pub(crate) mod kernels {
    use crate::scalar::Scalar;

    /// `a[m×p] · b[p×q]`
    pub fn matmul<T: Scalar>(a: &[T], b: &[T], m: usize, p: usize, q: usize) -> Vec<T> {
        let mut c = vec![T::zero(); m * q];
        for i in 0..m {
            let crow = &mut c[i * q..(i + 1) * q];
            for k in 0..p {
                let aik = a[i * p + k];
                if aik == T::zero() {
                    continue;
                }
                let brow = &b[k * q..(k + 1) * q];
                for (cv, &bv) in crow.iter_mut().zip(brow) {
                    *cv += aik * bv;
                }
            }
        }
        c
    }

    /// `a[m×p] · b[q×p]ᵀ`
    pub fn matmul_bt<T: Scalar>(a: &[T], b: &[T], m: usize, p: usize, q: usize) -> Vec<T> {
        let mut c = vec![T::zero(); m * q];
        for i in 0..m {
            let arow = &a[i * p..(i + 1) * p];
            for j in 0..q {
                let brow = &b[j * p..(j + 1) * p];
                let mut s = T::zero();
                for (&x, &y) in arow.iter().zip(brow) {
                    s += x * y;
                }
                c[i * q + j] = s;
            }
        }
        c
    }

    /// Accumulates `a[m×p]ᵀ · b[m×q]` into `out[p×q]`.
    pub fn add_matmul_at<T: Scalar>(out: &mut [T], a: &[T], b: &[T], m: usize, p: usize, q: usize) {
        for i in 0..m {
            let brow = &b[i * q..(i + 1) * q];
            for k in 0..p {
                let aik = a[i * p + k];
                if aik == T::zero() {
                    continue;
                }
                let orow = &mut out[k * q..(k + 1) * q];
                for (o, &bv) in orow.iter_mut().zip(brow) {
                    *o += aik * bv;
                }
            }
        }
    }

    /// Accumulates `a[m×q] · b[p×q]ᵀ` into `out[m×p]`.
    pub fn add_matmul_bt<T: Scalar>(out: &mut [T], a: &[T], b: &[T], m: usize, q: usize, p: usize) {
        for i in 0..m {
            let arow = &a[i * q..(i + 1) * q];
            for k in 0..p {
                let brow = &b[k * q..(k + 1) * q];
                let mut s = T::zero();
                for (&x, &y) in arow.iter().zip(brow) {
                    s += x * y;
                }
                out[i * p + k] += s;
            }
        }
    }

    /// Accumulates `a[m×p] · b[p×q]` into `out[m×q]`.
    pub fn add_matmul<T: Scalar>(out: &mut [T], a: &[T], b: &[T], m: usize, p: usize, q: usize) {
        for i in 0..m {
            let orow = &mut out[i * q..(i + 1) * q];
            for k in 0..p {
                let aik = a[i * p + k];
                if aik == T::zero() {
                    continue;
                }
                for (o, &bv) in orow.iter_mut().zip(&b[k * q..(k + 1) * q]) {
                    *o += aik * bv;
                }
            }
        }
    }

    pub fn transpose<T: Scalar>(a: &[T], m: usize, n: usize) -> Vec<T> {
        let mut out = vec![T::zero(); m * n];
        for i in 0..m {
            for j in 0..n {
                out[j * m + i] = a[i * n + j];
            }
        }
        out
    }

    /// Max-shifted softmax over one row.
    pub fn softmax_in_place<T: Scalar>(row: &mut [T]) {
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }

    pub fn sigmoid<T: Scalar>(x: T) -> T {
        if x >= T::zero() {
            T::one() / (T::one() + (-x).exp())
        } else {
            let e = x.exp();
            e / (T::one() + e)
        }
    }
}
