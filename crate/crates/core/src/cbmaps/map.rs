use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{dim_err, Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Singular values below this fraction of the largest are dropped when
/// pairs are extracted from a Choi matrix.
pub const PAIR_CUTOFF: f64 = 1e-12;

/// A linear map `M_d → M_d'` held both as pairs `(A_i, B_i)` acting by
/// `X ↦ Σ A_i X B_i` and as its Choi matrix `Σ_{ij} E_ij ⊗ m(E_ij)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMatrixMap {
    in_dim: usize,
    out_dim: usize,
    pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
    choi: ComplexMatrix,
}

impl LinearMatrixMap {
    /// Builds the map `X ↦ Σ A_i X B_i`, with `A_i: d' x d` and `B_i: d x d'`.
    pub fn from_pairs(in_dim: usize, out_dim: usize, pairs: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        for (k, (a, b)) in pairs.iter().enumerate() {
            if a.shape() != (out_dim, in_dim) || b.shape() != (in_dim, out_dim) {
                return dim_err(format!(
                    "pair {k} has shapes {:?}, {:?} for a map M_{in_dim} -> M_{out_dim}",
                    a.shape(),
                    b.shape()
                ));
            }
        }
        let choi = choi_from_pairs(in_dim, out_dim, &pairs);
        Ok(Self {
            in_dim,
            out_dim,
            pairs,
            choi,
        })
    }

    /// Infers the dimensions from the first pair.
    pub fn from_pair_list(pairs: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let (out_dim, in_dim) = pairs
            .first()
            .map(|(a, _)| a.shape())
            .ok_or_else(|| Error::InvalidArgument("empty pair list; use LinearMatrixMap::zero".into()))?;
        Self::from_pairs(in_dim, out_dim, pairs)
    }

    /// Recovers pairs from a Choi matrix via the SVD of its realignment.
    pub fn from_choi(choi: &ComplexMatrix, in_dim: usize, out_dim: usize) -> Result<Self> {
        let n = in_dim * out_dim;
        if choi.shape() != (n, n) {
            return dim_err(format!(
                "Choi matrix {:?} for a map M_{in_dim} -> M_{out_dim}",
                choi.shape()
            ));
        }
        if n == 0 {
            return Self::from_pairs(in_dim, out_dim, Vec::new());
        }
        // W[(a,i),(j,b)] = C[(i,a),(j,b)] = Σ_k A_k[a,i] B_k[j,b]
        let w = ComplexMatrix::from_fn(n, n, |row, col| {
            let (a, i) = (row / in_dim, row % in_dim);
            let (j, b) = (col / out_dim, col % out_dim);
            choi[(i * out_dim + a, j * out_dim + b)]
        });
        let svd = w.svd();
        let top = svd.singular_values[0];
        let mut pairs = Vec::new();
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= PAIR_CUTOFF * top || s == 0.0 {
                break;
            }
            let r = s.sqrt();
            let a = ComplexMatrix::from_fn(out_dim, in_dim, |p, q| svd.u[(p * in_dim + q, k)] * r);
            let b = ComplexMatrix::from_fn(in_dim, out_dim, |p, q| svd.v[(p * out_dim + q, k)].conj() * r);
            pairs.push((a, b));
        }
        Ok(Self {
            in_dim,
            out_dim,
            pairs,
            choi: choi.clone(),
        })
    }

    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self::from_pairs(in_dim, out_dim, Vec::new()).expect("no pairs to check")
    }

    pub fn identity(d: usize) -> Self {
        Self::from_pairs(d, d, vec![(ComplexMatrix::identity(d), ComplexMatrix::identity(d))])
            .expect("square identity pair")
    }

    /// `X ↦ Xᵀ` on `M_n`, written as `Σ_{ij} E_ij X E_ij`.
    pub fn transpose(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = ComplexMatrix::unit(n, n, i, j);
                pairs.push((e.clone(), e));
            }
        }
        Self::from_pairs(n, n, pairs).expect("matrix units are n x n")
    }

    /// `X ↦ A X B`.
    pub fn sandwich(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let (out_dim, in_dim) = a.shape();
        Self::from_pairs(in_dim, out_dim, vec![(a, b)])
    }

    pub fn random<R: rand::Rng + ?Sized>(in_dim: usize, out_dim: usize, num_pairs: usize, rng: &mut R) -> Self {
        let pairs = (0..num_pairs)
            .map(|_| {
                (
                    ComplexMatrix::random(out_dim, in_dim, rng),
                    ComplexMatrix::random(in_dim, out_dim, rng),
                )
            })
            .collect();
        Self::from_pairs(in_dim, out_dim, pairs).expect("shapes drawn to match")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn pairs(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.pairs
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn is_zero(&self) -> bool {
        self.choi.as_slice().iter().all(|z| z.norm() == 0.0)
    }

    /// `Σ A_i X B_i`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.in_dim, self.in_dim) {
            return dim_err(format!("input {:?} for a map on M_{}", x.shape(), self.in_dim));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for (a, b) in &self.pairs {
            out += &(&(a * x) * b);
        }
        out
    }

    /// `id_{M_k} ⊗ m`, with pairs `(I_k ⊗ A_i, I_k ⊗ B_i)`.
    pub fn amplify(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("amplification level must be at least 1".into()));
        }
        let eye = ComplexMatrix::identity(k);
        let pairs = self.pairs.iter().map(|(a, b)| (eye.kron(a), eye.kron(b))).collect();
        Self::from_pairs(k * self.in_dim, k * self.out_dim, pairs)
    }

    /// Hilbert-Schmidt adjoint `Y ↦ Σ A_i* Y B_i*`.
    pub fn adjoint(&self) -> Self {
        let pairs = self.pairs.iter().map(|(a, b)| (a.adjoint(), b.adjoint())).collect();
        Self::from_pairs(self.out_dim, self.in_dim, pairs).expect("adjoint shapes")
    }

    pub fn scale(&self, c: C64) -> Self {
        let pairs = self.pairs.iter().map(|(a, b)| (a.scale(c), b.clone())).collect();
        Self::from_pairs(self.in_dim, self.out_dim, pairs).expect("same shapes")
    }

    /// Concatenated pair lists: the sum of two maps.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim) {
            return dim_err("sum of maps with different dimensions");
        }
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().cloned());
        Self::from_pairs(self.in_dim, self.out_dim, pairs)
    }

    /// Largest deviation between the actions of two maps on the matrix-unit
    /// basis of the input space.
    pub fn action_distance(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.in_dim, self.out_dim),
            (other.in_dim, other.out_dim),
            "maps with different dimensions"
        );
        let d = self.in_dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let e = ComplexMatrix::unit(d, d, i, j);
                worst = worst.max(self.apply_unchecked(&e).max_diff(&other.apply_unchecked(&e)));
            }
        }
        worst
    }

    /// Images of the matrix units, `out[i][j] = m(E_ij)`.
    pub fn basis_images(&self) -> Vec<Vec<ComplexMatrix>> {
        let d = self.in_dim;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.apply_unchecked(&ComplexMatrix::unit(d, d, i, j)))
                    .collect()
            })
            .collect()
    }

    /// Norm of the map on `M_d` with the Hilbert-Schmidt norm on both
    /// sides: the largest singular value of `Σ A_i ⊗ B_iᵀ`.
    pub fn hs_operator_norm(&self) -> f64 {
        let mut m = ComplexMatrix::zeros(self.out_dim * self.out_dim, self.in_dim * self.in_dim);
        for (a, b) in &self.pairs {
            m += &a.kron(&b.transpose());
        }
        m.norm()
    }

    /// If the map is `X ↦ c X`, returns `c`.
    pub fn as_scalar(&self, tol: f64) -> Option<C64> {
        if self.in_dim != self.out_dim {
            return None;
        }
        let d = self.in_dim;
        if d == 0 {
            return Some(C64::new(0.0, 0.0));
        }
        let c = self.apply_unchecked(&ComplexMatrix::unit(d, d, 0, 0))[(0, 0)];
        let reference = LinearMatrixMap::identity(d).scale(c);
        (self.choi.max_diff(&reference.choi) <= tol).then_some(c)
    }
}

fn choi_from_pairs(in_dim: usize, out_dim: usize, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> ComplexMatrix {
    // C[(i,a),(j,b)] = m(E_ij)[a,b] = Σ_k A_k[a,i] B_k[j,b]
    let n = in_dim * out_dim;
    let mut c = ComplexMatrix::zeros(n, n);
    for (a, b) in pairs {
        for i in 0..in_dim {
            for p in 0..out_dim {
                let aval = a[(p, i)];
                if aval.norm() == 0.0 {
                    continue;
                }
                for j in 0..in_dim {
                    for q in 0..out_dim {
                        c[(i * out_dim + p, j * out_dim + q)] += aval * b[(j, q)];
                    }
                }
            }
        }
    }
    c
}

#[derive(Serialize, Deserialize)]
struct PairWire {
    #[serde(rename = "A")]
    a: ComplexMatrix,
    #[serde(rename = "B")]
    b: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct MapWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    in_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<PairWire>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    choi: Option<ComplexMatrix>,
}

impl Serialize for LinearMatrixMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapWire {
            in_dim: Some(self.in_dim),
            out_dim: Some(self.out_dim),
            pairs: Some(
                self.pairs
                    .iter()
                    .map(|(a, b)| PairWire {
                        a: a.clone(),
                        b: b.clone(),
                    })
                    .collect(),
            ),
            choi: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearMatrixMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = MapWire::deserialize(d)?;
        match (w.pairs, w.choi) {
            (Some(pairs), None) => {
                let pairs: Vec<_> = pairs.into_iter().map(|p| (p.a, p.b)).collect();
                let (out_dim, in_dim) = match (w.in_dim, w.out_dim, pairs.first()) {
                    (Some(i), Some(o), _) => (o, i),
                    (_, _, Some((a, _))) => a.shape(),
                    _ => return Err(D::Error::custom("empty pair list needs inDim and outDim")),
                };
                LinearMatrixMap::from_pairs(in_dim, out_dim, pairs).map_err(D::Error::custom)
            }
            (None, Some(choi)) => {
                let (in_dim, out_dim) = match (w.in_dim, w.out_dim) {
                    (Some(i), Some(o)) => (i, o),
                    _ => {
                        let d = (choi.rows() as f64).sqrt().round() as usize;
                        if d * d != choi.rows() {
                            return Err(D::Error::custom("non-square Choi dimension needs inDim and outDim"));
                        }
                        (d, d)
                    }
                };
                LinearMatrixMap::from_choi(&choi, in_dim, out_dim).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom("a map needs exactly one of \"pairs\" or \"choi\"")),
        }
    }
}
