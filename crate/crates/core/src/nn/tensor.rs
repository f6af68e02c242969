//! Row-major f32 tensor, just enough for the desk-scale harness.

use super::NnError;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        Self { dims: dims.to_vec(), data: vec![0.0; len] }
    }

    pub fn from_vec(dims: &[usize], data: Vec<f32>) -> Result<Self, NnError> {
        let want: usize = dims.iter().product();
        if data.len() != want {
            return Err(NnError::ShapeMismatch(format!(
                "{} elements for dims {:?} (need {})",
                data.len(),
                dims,
                want
            )));
        }
        Ok(Self { dims: dims.to_vec(), data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Rows of a 2-D tensor.
    pub fn rows(&self) -> usize {
        assert_eq!(self.dims.len(), 2, "rows() needs a 2-D tensor");
        self.dims[0]
    }

    /// Columns of a 2-D tensor.
    pub fn cols(&self) -> usize {
        assert_eq!(self.dims.len(), 2, "cols() needs a 2-D tensor");
        self.dims[1]
    }

    pub fn at(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.cols() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f32) {
        let cols = self.cols();
        self.data[r * cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f32] {
        let cols = self.cols();
        &self.data[r * cols..(r + 1) * cols]
    }

    pub fn transpose2d(&self) -> Tensor {
        let (m, n) = (self.rows(), self.cols());
        let mut out = Tensor::zeros(&[n, m]);
        for r in 0..m {
            for c in 0..n {
                out.data[c * m + r] = self.data[r * n + c];
            }
        }
        out
    }

    pub fn reshape(&self, dims: &[usize]) -> Result<Tensor, NnError> {
        Tensor::from_vec(dims, self.data.clone())
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Tensor {
        Tensor { dims: self.dims.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_round_trip() {
        let t = Tensor::from_vec(&[2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let tt = t.transpose2d();
        assert_eq!(tt.dims(), &[3, 2]);
        assert_eq!(tt.at(0, 1), 4.0);
        assert_eq!(tt.transpose2d(), t);
    }

    #[test]
    fn from_vec_validates_length() {
        assert!(Tensor::from_vec(&[2, 2], vec![0.0; 3]).is_err());
    }
}
