//! Branched cell complexes: boundary operators, switching rules, top
//! cycle spaces, and positive homology cones.
//!
//! A `BranchedComplex` of dimension `g` stores ordered, oriented cells in
//! every degree, integer boundary matrices, a region id per top cell, and
//! for every `(g-1)`-cell the two signed germ lists of incident top cells.
//! A top chain is a cycle iff its coefficients are constant on regions and
//! satisfy the switching rules: along each `(g-1)`-cell the germ weights
//! on one side sum to the germ weights on the other side.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{extreme_rays, primitive_integer, Rat, RatMat};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellInfo {
    pub label: String,
}

/// Signed incidence of a top cell along a codimension-1 cell.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Germ {
    /// Index of the incident g-cell.
    pub cell: usize,
}

/// The two germ lists of a `(g-1)`-cell. Germs on `pos` enter the boundary
/// matrix with sign `+1`, germs on `neg` with sign `-1`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct SidePair {
    pub pos: Vec<Germ>,
    pub neg: Vec<Germ>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BranchedComplex {
    /// Top dimension g.
    pub dim: usize,
    /// Cells per degree, `cells[i]` are the i-cells.
    pub cells: Vec<Vec<CellInfo>>,
    /// `boundary[i-1]` is the matrix of `∂_i : C_i -> C_{i-1}`,
    /// rows indexed by (i-1)-cells, columns by i-cells.
    /// Serialized as sparse (row, col, value) triples.
    #[serde(with = "sparse_boundary")]
    pub boundary: Vec<Vec<Vec<i64>>>,
    /// Region id per g-cell.
    pub regions: Vec<usize>,
    pub num_regions: usize,
    /// Germ side lists per (g-1)-cell.
    pub sides: Vec<SidePair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Top chain with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub coefficients: Vec<BigRational>,
}

/// Exact cycle space and positive cone of a branched complex.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomologyCone {
    /// Rational basis of the top cycle space Z_g.
    pub cycle_basis: Vec<Vec<BigRational>>,
    /// Extremal rays of Z_g intersected with the nonnegative orthant,
    /// as primitive integer vectors.
    pub extremal_rays: Vec<Vec<BigInt>>,
}

mod sparse_boundary {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct SparseMat {
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, i64)>,
    }

    pub fn serialize<S: Serializer>(
        boundary: &[Vec<Vec<i64>>],
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let sparse: Vec<SparseMat> = boundary
            .iter()
            .map(|m| SparseMat {
                rows: m.len(),
                cols: m.first().map_or(0, |r| r.len()),
                entries: m
                    .iter()
                    .enumerate()
                    .flat_map(|(r, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, &v)| v != 0)
                            .map(move |(c, &v)| (r, c, v))
                    })
                    .collect(),
            })
            .collect();
        sparse.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<Vec<Vec<Vec<i64>>>, D::Error> {
        let sparse = Vec::<SparseMat>::deserialize(de)?;
        let mut out = Vec::with_capacity(sparse.len());
        for m in sparse {
            let mut dense = vec![vec![0i64; m.cols]; m.rows];
            for (r, c, v) in m.entries {
                if r >= m.rows || c >= m.cols {
                    return Err(serde::de::Error::custom("sparse entry out of bounds"));
                }
                dense[r][c] = v;
            }
            out.push(dense);
        }
        Ok(out)
    }
}

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("chain has {got} coefficients, complex has {want} top cells")]
    SizeMismatch { got: usize, want: usize },
    #[error("invalid complex: {0}")]
    Invalid(String),
}

impl BranchedComplex {
    /// Graph complex (g = 1): one vertex list, edges as (label, from, to).
    /// Each edge is its own region.
    pub fn graph(num_vertices: usize, edges: &[(&str, usize, usize)]) -> Self {
        let vertices =
            (0..num_vertices).map(|i| CellInfo { label: format!("v{i}") }).collect();
        let edge_cells =
            edges.iter().map(|(l, _, _)| CellInfo { label: l.to_string() }).collect();
        let mut bnd = vec![vec![0i64; edges.len()]; num_vertices];
        let mut sides = vec![SidePair::default(); num_vertices];
        for (j, &(_, from, to)) in edges.iter().enumerate() {
            bnd[to][j] += 1;
            bnd[from][j] -= 1;
            sides[to].pos.push(Germ { cell: j });
            sides[from].neg.push(Germ { cell: j });
        }
        BranchedComplex {
            dim: 1,
            cells: vec![vertices, edge_cells],
            boundary: vec![bnd],
            regions: (0..edges.len()).collect(),
            num_regions: edges.len(),
            sides,
        }
    }

    pub fn top_cell_count(&self) -> usize {
        self.cells[self.dim].len()
    }

    fn codim1_count(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.cells[self.dim - 1].len()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Check boundary squares to zero, side lists match `∂_g` signs, and the
/// region map is well formed and surjective.
pub fn validate_complex(s: &BranchedComplex) -> ValidationReport {
    let mut violations = Vec::new();
    if s.cells.len() != s.dim + 1 {
        violations.push(format!("expected {} cell degrees, got {}", s.dim + 1, s.cells.len()));
        return ValidationReport { valid: false, violations };
    }
    if s.boundary.len() != s.dim {
        violations.push(format!("expected {} boundary matrices, got {}", s.dim, s.boundary.len()));
        return ValidationReport { valid: false, violations };
    }
    // shapes
    for i in 1..=s.dim {
        let m = &s.boundary[i - 1];
        if m.len() != s.cells[i - 1].len()
            || m.iter().any(|row| row.len() != s.cells[i].len())
        {
            violations.push(format!("boundary matrix for degree {i} has wrong shape"));
            return ValidationReport { valid: false, violations };
        }
    }
    // ∂_i ∘ ∂_{i+1} = 0
    for i in 1..s.dim {
        let a = &s.boundary[i - 1];
        let b = &s.boundary[i];
        for r in 0..s.cells[i - 1].len() {
            for c in 0..s.cells[i + 1].len() {
                let mut acc: i64 = 0;
                for k in 0..s.cells[i].len() {
                    acc += a[r][k] * b[k][c];
                }
                if acc != 0 {
                    violations.push(format!(
                        "boundary of boundary nonzero at degree {} cell {} from cell {}",
                        i - 1,
                        r,
                        c
                    ));
                }
            }
        }
    }
    // sides consistent with ∂_g
    if s.dim >= 1 {
        if s.sides.len() != s.codim1_count() {
            violations.push(format!(
                "expected {} side pairs, got {}",
                s.codim1_count(),
                s.sides.len()
            ));
        } else {
            let top = s.top_cell_count();
            for (e, pair) in s.sides.iter().enumerate() {
                let mut signed = vec![0i64; top];
                for g in &pair.pos {
                    signed[g.cell] += 1;
                }
                for g in &pair.neg {
                    signed[g.cell] -= 1;
                }
                for j in 0..top {
                    if signed[j] != s.boundary[s.dim - 1][e][j] {
                        violations.push(format!(
                            "side lists of cell {e} disagree with boundary signs at top cell {j}"
                        ));
                    }
                }
            }
        }
    }
    // region map
    if s.regions.len() != s.top_cell_count() {
        violations.push("region map does not cover all top cells".into());
    } else {
        let mut seen = vec![false; s.num_regions];
        for &r in &s.regions {
            if r >= s.num_regions {
                violations.push(format!("region id {r} out of range"));
            } else {
                seen[r] = true;
            }
        }
        if !seen.iter().all(|&x| x) {
            violations.push("region map not surjective onto declared regions".into());
        }
    }
    ValidationReport { valid: violations.is_empty(), violations }
}

/// Switching matrix: one row per `(g-1)`-cell (+1 on one side's germs, -1
/// on the other's), followed by rows forcing equal coefficients of top
/// cells in the same region. Its rational null space is the top cycle
/// space Z_g.
pub fn switching_matrix(s: &BranchedComplex) -> RatMat {
    let top = s.top_cell_count();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for pair in &s.sides {
        let mut row = vec![Rat::zero(); top];
        for g in &pair.pos {
            row[g.cell] += Rat::from_integer(BigInt::from(1));
        }
        for g in &pair.neg {
            row[g.cell] -= Rat::from_integer(BigInt::from(1));
        }
        rows.push(row);
    }
    // region-constancy: coefficient of each top cell equals that of the
    // first cell in its region
    let mut first_in_region: Vec<Option<usize>> = vec![None; s.num_regions];
    for (j, &r) in s.regions.iter().enumerate() {
        match first_in_region[r] {
            None => first_in_region[r] = Some(j),
            Some(k) => {
                let mut row = vec![Rat::zero(); top];
                row[k] += Rat::from_integer(BigInt::from(1));
                row[j] -= Rat::from_integer(BigInt::from(1));
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        RatMat::zero(0, top)
    } else {
        RatMat::from_rows(rows)
    }
}

/// Exact rational basis of Z_g (null space of the switching matrix).
pub fn top_cycle_space(s: &BranchedComplex) -> Vec<Vec<BigRational>> {
    switching_matrix(s).null_space()
}

/// Extremal rays of H_g^+ = Z_g ∩ (nonnegative orthant), as primitive
/// integer vectors.
pub fn positive_cone(s: &BranchedComplex) -> HomologyCone {
    let m = switching_matrix(s);
    HomologyCone { cycle_basis: m.null_space(), extremal_rays: extreme_rays(&m) }
}

/// True iff the chain satisfies all switching rules exactly.
pub fn validate_switching(s: &BranchedComplex, z: &Chain) -> Result<bool, ComplexError> {
    let top = s.top_cell_count();
    if z.coefficients.len() != top {
        return Err(ComplexError::SizeMismatch { got: z.coefficients.len(), want: top });
    }
    let m = switching_matrix(s);
    Ok(m.mul_vec(&z.coefficients).iter().all(|x| x.is_zero()))
}

impl HomologyCone {
    /// Rays as rational vectors (for pushing through matrices).
    pub fn rational_rays(&self) -> Vec<Vec<BigRational>> {
        self.extremal_rays
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect()
    }
}

/// Normalize a nonnegative rational vector to sum 1 (frequency convention);
/// returns `None` for the zero vector.
pub fn normalize_frequencies(v: &[BigRational]) -> Option<Vec<BigRational>> {
    let total: BigRational = v.iter().fold(BigRational::zero(), |s, x| s + x);
    if total.is_zero() {
        return None;
    }
    Some(v.iter().map(|x| x / &total).collect())
}

/// Primitive integer form of a rational ray.
pub fn primitive_ray(v: &[BigRational]) -> Vec<BigInt> {
    primitive_integer(v)
}
