//! JSON encoding of complex matrices.
//!
//! A matrix is written row-major as a list of rows, each row a list of
//! `[re, im]` pairs. The `serde(with = ...)` adapters below are used by every
//! serializable type in the crate.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Wire form of a single matrix.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn from_json(rows: &MatrixJson) -> Result<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite matrix entry".into()));
    }
    Ok(CMat::from_fn(nrows, ncols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

/// Parses a matrix and checks that it is square of the given size.
pub fn square_from_json(rows: &MatrixJson, n: usize) -> Result<CMat> {
    let m = from_json(rows)?;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Parse(format!(
            "expected a {n}x{n} matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

/// `serde(with = "encoding::cmat")` adapter for a single matrix.
pub mod cmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMat, D::Error> {
        let rows = MatrixJson::deserialize(d)?;
        from_json(&rows).map_err(serde::de::Error::custom)
    }
}

/// `serde(with = "encoding::cmat_vec")` adapter for a list of matrices.
pub mod cmat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMat], s: S) -> std::result::Result<S::Ok, S::Error> {
        ms.iter().map(to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<CMat>, D::Error> {
        let raw = Vec::<MatrixJson>::deserialize(d)?;
        raw.iter().map(|r| from_json(r).map_err(serde::de::Error::custom)).collect()
    }
}
