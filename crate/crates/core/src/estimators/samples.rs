use crate::error::{Error, Result};
use crate::linalg::{io, ComplexVector};

/// Vectors shorter than this are rejected as degenerate samples.
pub const MIN_SAMPLE_NORM: f64 = 1e-300;

/// `N >= 1` nonzero complex vectors sharing one dimension `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    dim: usize,
    vectors: Vec<ComplexVector>,
}

impl SampleSet {
    pub fn new(vectors: Vec<ComplexVector>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(ComplexVector::dim)
            .ok_or_else(|| Error::invalid("sample set must contain at least one vector"))?;
        for (n, v) in vectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.dim() });
            }
            if !(v.norm() >= MIN_SAMPLE_NORM) {
                return Err(Error::invalid(format!("sample {n} is (numerically) zero")));
            }
        }
        Ok(Self { dim, vectors })
    }

    /// `m`
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N`
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexVector> {
        self.vectors.iter()
    }

    /// Each `x_n` multiplied by `factors[n]`.
    pub fn rescaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: factors.len() });
        }
        Self::new(
            self.vectors
                .iter()
                .zip(factors)
                .map(|(v, &c)| v.scaled(c.into()))
                .collect(),
        )
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let picked = indices
            .iter()
            .map(|&i| {
                self.vectors
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("sample index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(picked)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::new(io::read_hps1(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        io::write_hps1(path, &self.vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_mixed_and_zero() {
        assert!(SampleSet::new(vec![]).is_err());
        let a = ComplexVector::basis(2, 0);
        let b = ComplexVector::basis(3, 0);
        assert!(matches!(
            SampleSet::new(vec![a.clone(), b]),
            Err(Error::DimensionMismatch { .. })
        ));
        let z = ComplexVector::from_real(&[0.0, 0.0]).unwrap();
        assert!(SampleSet::new(vec![a, z]).is_err());
        let tiny = ComplexVector::from_real(&[1e-301, 0.0]).unwrap();
        assert!(SampleSet::new(vec![tiny]).is_err());
    }
}
