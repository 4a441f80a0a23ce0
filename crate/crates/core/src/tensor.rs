//! Dense row-major f64 tensors.
//!
//! Everything in the numeric stack is 64-bit; desk-scale problem sizes make
//! the memory cost irrelevant and keep gradient checks clean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense tensor: a shape and a row-major buffer of f64 values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Checked constructor: shape product must match the buffer length and
    /// every entry must be finite.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::invalid("Tensor::new", format!("zero dimension in shape {shape:?}")));
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::shape(
                "Tensor::new",
                format!("{n} elements for shape {shape:?}"),
                format!("{} elements", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("Tensor::new at flat index {pos}"),
            });
        }
        Ok(Tensor { shape, data })
    }

    /// Constructor for internal use where finiteness is guaranteed by the caller.
    pub(crate) fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Tensor { shape, data }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor { shape, data: vec![0.0; n] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Validate the finiteness invariant, naming `context` on failure.
    pub fn check_finite(&self, context: &str) -> Result<()> {
        if let Some(pos) = self.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("{context} at flat index {pos}"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_checks_shape_product() {
        let err = Tensor::new(vec![2, 3], vec![0.0; 5]).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
        assert!(Tensor::new(vec![2, 3], vec![0.0; 6]).is_ok());
    }

    #[test]
    fn new_rejects_non_finite() {
        let err = Tensor::new(vec![2], vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
        let err = Tensor::new(vec![1], vec![f64::INFINITY]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn new_rejects_zero_dims() {
        assert!(Tensor::new(vec![0, 3], vec![]).is_err());
    }
}
