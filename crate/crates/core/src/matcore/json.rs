//! The repo-wide matrix JSON record:
//! `{"p": 2, "case": "real", "entries": [[1.0, 0.0], [0.0, 1.0]]}`, with
//! complex entries written as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::Matrix;
use super::pd::PdMatrix;
use super::scalar::Scalar;
use super::MatrixError;
use crate::gammafn::Case;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub p: usize,
    pub case: Case,
    pub entries: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// Conversion between [`Entry`] and a concrete scalar type.
pub trait JsonScalar: Scalar {
    fn to_entry(self) -> Entry;
    fn from_entry(e: Entry) -> Option<Self>;
}

impl JsonScalar for f64 {
    fn to_entry(self) -> Entry {
        Entry::Real(self)
    }
    fn from_entry(e: Entry) -> Option<Self> {
        match e {
            Entry::Real(x) => Some(x),
            Entry::Complex(_) => None,
        }
    }
}

impl JsonScalar for Complex64 {
    fn to_entry(self) -> Entry {
        Entry::Complex([self.re, self.im])
    }
    fn from_entry(e: Entry) -> Option<Self> {
        match e {
            Entry::Complex([re, im]) => Some(Complex64::new(re, im)),
            // a bare number is accepted as a real-valued complex entry
            Entry::Real(x) => Some(Complex64::new(x, 0.0)),
        }
    }
}

impl MatrixRecord {
    pub fn from_matrix<T: JsonScalar>(m: &Matrix<T>) -> Self {
        MatrixRecord {
            p: m.rows(),
            case: T::CASE,
            entries: m.to_rows().into_iter().map(|r| r.into_iter().map(T::to_entry).collect()).collect(),
        }
    }

    pub fn to_matrix<T: JsonScalar>(&self) -> Result<Matrix<T>, MatrixError> {
        if self.case != T::CASE {
            return Err(MatrixError::CaseMismatch { expected: T::CASE, got: self.case });
        }
        if self.entries.len() != self.p {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.p, self.p),
                got: (self.entries.len(), self.entries.first().map_or(0, Vec::len)),
            });
        }
        let rows = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&e| T::from_entry(e).ok_or(MatrixError::CaseMismatch { expected: T::CASE, got: Case::Complex }))
                    .collect::<Result<Vec<T>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = Matrix::from_rows(&rows)?;
        if m.cols() != self.p {
            return Err(MatrixError::DimensionMismatch { expected: (self.p, self.p), got: (m.rows(), m.cols()) });
        }
        Ok(m)
    }

    pub fn to_pd<T: JsonScalar>(&self) -> Result<PdMatrix<T>, MatrixError> {
        PdMatrix::new(self.to_matrix()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_entries_are_pairs() {
        let c = Complex64::new;
        let m = Matrix::from_rows(&[[c(2.0, 0.0), c(1.0, -1.0)], [c(1.0, 1.0), c(3.0, 0.0)]]).unwrap();
        let rec = MatrixRecord::from_matrix(&m);
        let text = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            text,
            r#"{"p":2,"case":"complex","entries":[[[2.0,0.0],[1.0,-1.0]],[[1.0,1.0],[3.0,0.0]]]}"#
        );
        let back: MatrixRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix::<Complex64>().unwrap(), m);
    }

    #[test]
    fn case_mismatch_rejected() {
        let rec: MatrixRecord =
            serde_json::from_str(r#"{"p":1,"case":"real","entries":[[2.0]]}"#).unwrap();
        assert!(rec.to_matrix::<Complex64>().is_err());
        assert_eq!(rec.to_pd::<f64>().unwrap().dim(), 1);
        let wrong_p: MatrixRecord =
            serde_json::from_str(r#"{"p":2,"case":"real","entries":[[2.0]]}"#).unwrap();
        assert!(wrong_p.to_matrix::<f64>().is_err());
    }
}
