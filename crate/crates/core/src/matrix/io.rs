//! JSON wire formats for matrices and block matrices.
//!
//! Matrices are `{"rows": R, "cols": C, "re": [...], "im": [...]}` in
//! row-major order; `im` may be omitted for real data. Block matrices are
//! `{"gridSize": N, "blockDim": d, "blocks": [[matrix, ...], ...]}`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::block::BlockMatrix;
use super::dense::{ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

impl TryFrom<MatrixWire> for ComplexMatrix {
    type Error = Error;

    fn try_from(w: MatrixWire) -> Result<Self> {
        let im = w.im.unwrap_or_else(|| vec![0.0; w.re.len()]);
        if im.len() != w.re.len() {
            return Err(Error::Parse(format!(
                "re has {} entries but im has {}",
                w.re.len(),
                im.len()
            )));
        }
        let data = w.re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect();
        ComplexMatrix::from_vec(w.rows, w.cols, data)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows(),
            cols: self.cols(),
            re: self.as_slice().iter().map(|z| z.re).collect(),
            im: Some(self.as_slice().iter().map(|z| z.im).collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        ComplexMatrix::try_from(w).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct BlockWire {
    grid_size: usize,
    block_dim: usize,
    blocks: Vec<Vec<ComplexMatrix>>,
}

impl Serialize for BlockMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.grid_size();
        BlockWire {
            grid_size: n,
            block_dim: self.block_dim(),
            blocks: (0..n)
                .map(|m| (0..n).map(|k| self.block(m, k).clone()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = BlockWire::deserialize(d)?;
        BlockMatrix::from_blocks(w.grid_size, w.block_dim, w.blocks).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::I;

    #[test]
    fn matrix_json_shape() {
        let m = ComplexMatrix::from_vec(1, 2, vec![C64::new(1.0, 0.0), I]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"re":[1.0,0.0],"im":[0.0,1.0]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn real_matrix_without_im() {
        let m: ComplexMatrix = serde_json::from_str(r#"{"rows":2,"cols":1,"re":[3,4]}"#).unwrap();
        assert_eq!(m.frobenius_norm(), 5.0);
    }

    #[test]
    fn rejects_inconsistent_lengths() {
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"re":[1,2,3]}"#).is_err());
        let bad = r#"{"gridSize":1,"blockDim":2,"blocks":[[{"rows":1,"cols":1,"re":[1]}]]}"#;
        assert!(serde_json::from_str::<BlockMatrix>(bad).is_err());
    }

    #[test]
    fn block_round_trip() {
        let b = BlockMatrix::identity(2, 2);
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.starts_with(r#"{"gridSize":2,"blockDim":2,"blocks":"#));
        assert_eq!(serde_json::from_str::<BlockMatrix>(&s).unwrap(), b);
    }
}
