//! Rectangular box decompositions, commensurable rescaling, torus
//! fibrations, and the lattice-Delone construction.
//!
//! Tile corners are stored combinatorially — as counts of each distinct
//! length per axis — so rescaling a length multiset to rational values
//! yields exact rational corner coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DeloneSet, Point, Window};
use crate::linalg::Rat;
use crate::substitution::{
    GeometricSubstitution2D, LatticeCell, LatticeKind, PlacedTile, Substitution1D,
    SubstitutionError,
};

#[derive(Debug, Error)]
pub enum RectifyError {
    #[error("tiling is not rectangle-based: {0}")]
    NonRectangular(String),
    #[error("tile {0} has a corner off the tau-grid after rescaling")]
    CornerOffGrid(String),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

/// Axis-aligned box tiling with combinatorial corners: corner coordinates
/// are integer combinations of the distinct per-axis lengths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RectTiling {
    pub dim: usize,
    /// Distinct lengths per axis, as produced by the generator.
    pub lengths: Vec<Vec<f64>>,
    pub tiles: Vec<RectTile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RectTile {
    pub label: String,
    /// Per axis: signed count of each length id summed to reach the
    /// tile's lower corner.
    pub corner: Vec<Vec<i64>>,
    /// Per axis: length id of the tile extent.
    pub extent: Vec<usize>,
}

/// Per-axis rational replacement for every length id, with the common
/// unit tau dividing all new lengths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RescaleMap {
    pub new_lengths: Vec<Vec<Rat>>,
    pub tau: Rat,
}

impl RectTiling {
    /// Interval tiling of the n-fold substitution word: one length id per
    /// letter, corner = letter counts to the left.
    pub fn from_word(
        sub: &Substitution1D,
        seed: u8,
        n: usize,
    ) -> Result<RectTiling, RectifyError> {
        let word = sub.iterate(seed, n)?;
        let k = sub.alphabet.len();
        let mut counts = vec![0i64; k];
        let mut tiles = Vec::with_capacity(word.len());
        for &a in &word {
            tiles.push(RectTile {
                label: sub.alphabet[a as usize].clone(),
                corner: vec![counts.clone()],
                extent: vec![a as usize],
            });
            counts[a as usize] += 1;
        }
        Ok(RectTiling { dim: 1, lengths: vec![sub.lengths.clone()], tiles })
    }

    /// Unit-square decomposition of a square-lattice patch: every lattice
    /// cell becomes one unit tile labeled by its tile type and position
    /// within the prototile.
    pub fn from_square_patch(
        sub: &GeometricSubstitution2D,
        patch: &[PlacedTile],
    ) -> Result<RectTiling, RectifyError> {
        if sub.kind != LatticeKind::Square {
            return Err(RectifyError::NonRectangular(format!(
                "substitution {} is not square-lattice based",
                sub.name
            )));
        }
        let mut tiles = Vec::new();
        for t in patch {
            for (k, cell) in sub.cells_of(t).iter().enumerate() {
                let LatticeCell::Square(x, y) = *cell else {
                    return Err(RectifyError::NonRectangular(sub.name.clone()));
                };
                tiles.push(RectTile {
                    label: format!("{}#{k}", sub.type_label(sub.type_of(t))),
                    corner: vec![vec![x], vec![y]],
                    extent: vec![0, 0],
                });
            }
        }
        Ok(RectTiling { dim: 2, lengths: vec![vec![1.0], vec![1.0]], tiles })
    }

    /// Rational lower corner of a tile under a rescale map.
    pub fn rescaled_corner(&self, map: &RescaleMap, tile: &RectTile) -> Vec<Rat> {
        (0..self.dim)
            .map(|axis| {
                tile.corner[axis]
                    .iter()
                    .zip(&map.new_lengths[axis])
                    .fold(Rat::zero(), |acc, (&c, l)| acc + l * Rat::from_integer(c.into()))
            })
            .collect()
    }
}

fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    // gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)
    let n = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rat::new(n.abs(), (a.denom() * b.denom()).clone())
}

/// Best rational approximation with bounded denominator, by continued
/// fractions; `None` if nothing within `tol`.
fn to_rational(x: f64, max_den: u64, tol: f64) -> Option<Rat> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let (p2, q2) = (ai * p0 + p1, ai * q0 + q1);
        if q2.unsigned_abs() > max_den {
            break;
        }
        (p1, q1, p0, q0) = (p0, q0, p2, q2);
        if (x - p0 as f64 / q0 as f64).abs() <= tol {
            return Some(Rat::new(BigInt::from(p0), BigInt::from(q0)));
        }
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q0 != 0 && (x - p0 as f64 / q0 as f64).abs() <= tol {
        return Some(Rat::new(BigInt::from(p0), BigInt::from(q0)));
    }
    None
}

/// Choose rational replacement lengths. If every length is already
/// rational the map is the identity with tau their gcd; otherwise all
/// lengths collapse to 1 (or, with `preserve_ratios`, to bounded-
/// denominator approximations of the originals).
pub fn commensurate_rescale(tiling: &RectTiling, preserve_ratios: bool) -> RescaleMap {
    // small denominators only: a float is "rational" when a modest
    // fraction reproduces it to 1e-9 (phi's convergents need 5 digits)
    let tol = 1e-9;
    let mut new_lengths: Vec<Vec<Rat>> = Vec::with_capacity(tiling.dim);
    for axis_lengths in &tiling.lengths {
        let rationals: Vec<Option<Rat>> =
            axis_lengths.iter().map(|&l| to_rational(l, 10_000, tol)).collect();
        if rationals.iter().all(|r| r.is_some()) {
            new_lengths.push(rationals.into_iter().map(|r| r.unwrap()).collect());
        } else if preserve_ratios {
            new_lengths.push(
                axis_lengths
                    .iter()
                    .map(|&l| to_rational(l, 100, 0.5).unwrap_or_else(Rat::one))
                    .collect(),
            );
        } else {
            new_lengths.push(vec![Rat::one(); axis_lengths.len()]);
        }
    }
    let mut tau = Rat::zero();
    for axis in &new_lengths {
        for l in axis {
            tau = rat_gcd(&tau, l);
        }
    }
    if tau.is_zero() {
        tau = Rat::one();
    }
    RescaleMap { new_lengths, tau }
}

/// The projection onto the d-torus (R/tau Z)^d and its exact commutation
/// check with translations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FibrationReport {
    pub tau: Rat,
    /// Distinct residues (mod tau, per axis) of tile corners.
    pub corner_residues: Vec<Vec<Rat>>,
    pub samples_checked: usize,
    pub commutes: bool,
}

fn mod_tau(x: &Rat, tau: &Rat) -> Rat {
    let q = (x / tau).floor();
    x - q * tau
}

/// Project all rescaled tile corners to the torus and verify, on sample
/// pairs in exact arithmetic, that the projection commutes with
/// translations. Errors if a corner misses the tau-grid.
pub fn torus_fibration(
    tiling: &RectTiling,
    map: &RescaleMap,
) -> Result<FibrationReport, RectifyError> {
    let tau = &map.tau;
    let mut residues: Vec<Vec<Rat>> = Vec::new();
    for tile in &tiling.tiles {
        let corner = tiling.rescaled_corner(map, tile);
        let res: Vec<Rat> = corner.iter().map(|x| mod_tau(x, tau)).collect();
        if res.iter().any(|r| !r.is_zero()) {
            return Err(RectifyError::CornerOffGrid(tile.label.clone()));
        }
        if !residues.contains(&res) {
            residues.push(res);
        }
    }
    // exact commutation pi(x + v) = pi(x) + v  (mod tau) on 10^3 samples
    let mut samples = 0usize;
    let mut commutes = true;
    let base: Vec<Vec<Rat>> = tiling
        .tiles
        .iter()
        .take(40)
        .map(|t| tiling.rescaled_corner(map, t))
        .collect();
    'outer: for k in 0..1000usize {
        let x = &base[k % base.len().max(1)];
        let v: Vec<Rat> = (0..tiling.dim)
            .map(|axis| {
                Rat::new(
                    BigInt::from((k * 7 + axis * 3) % 23 + 1),
                    BigInt::from(k % 11 + 2),
                ) * tau
            })
            .collect();
        for axis in 0..tiling.dim {
            let lhs = mod_tau(&(&x[axis] + &v[axis]), tau);
            let rhs = mod_tau(&(mod_tau(&x[axis], tau) + mod_tau(&v[axis], tau)), tau);
            if lhs != rhs {
                commutes = false;
                break 'outer;
            }
        }
        samples += 1;
    }
    Ok(FibrationReport {
        tau: tau.clone(),
        corner_residues: residues,
        samples_checked: samples,
        commutes,
    })
}

/// Label-preserving certificate for the lattice construction: the
/// combinatorial label data before and after the rescale, compared
/// exactly. Valid for the finite window only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeCertificate {
    pub dim: usize,
    pub labels_equal: bool,
    /// Global shift applied after rescaling (documented, e.g. the
    /// half-unit shift that takes unit-square barycenters to the grid).
    pub shift: Vec<Rat>,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct LatticeDelone {
    pub set: DeloneSet<f64>,
    pub fibration: FibrationReport,
    pub certificate: LatticeCertificate,
}

const WINDOW_NOTE: &str =
    "certifies combinatorial equivalence on the finite window only";

/// Collapse a substitution word to unit tiles: the control points become
/// 0, 1, 2, ... with the original label sequence.
pub fn to_lattice_delone_1d(
    sub: &Substitution1D,
    seed: u8,
    n: usize,
) -> Result<LatticeDelone, RectifyError> {
    let tiling = RectTiling::from_word(sub, seed, n)?;
    let map = commensurate_rescale(&tiling, false);
    let fibration = torus_fibration(&tiling, &map)?;
    let before: Vec<&str> = tiling.tiles.iter().map(|t| t.label.as_str()).collect();
    let mut placed: Vec<(Rat, &str)> = tiling
        .tiles
        .iter()
        .map(|t| (tiling.rescaled_corner(&map, t)[0].clone(), t.label.as_str()))
        .collect();
    placed.sort_by(|a, b| a.0.cmp(&b.0));
    let after: Vec<&str> = placed.iter().map(|(_, l)| *l).collect();
    let labels_equal = before == after;
    let points: Vec<Point<f64>> = placed
        .iter()
        .map(|(x, _)| Point::new(vec![x.to_f64().unwrap()]))
        .collect();
    let hi = placed.last().map(|(x, _)| x.to_f64().unwrap() + 1.0).unwrap_or(1.0);
    let set = DeloneSet::new(
        1,
        points,
        Some(after.iter().map(|s| s.to_string()).collect()),
        Window::new(vec![0.0], vec![hi]),
        0.5 * (1.0 - 1e-9),
        1.0 + 1e-9,
    )
    .map_err(|e| RectifyError::NonRectangular(e.to_string()))?;
    Ok(LatticeDelone {
        set,
        fibration,
        certificate: LatticeCertificate {
            dim: 1,
            labels_equal,
            shift: vec![Rat::zero()],
            note: WINDOW_NOTE.to_string(),
        },
    })
}

/// Unit-square barycenters of a square-lattice patch, shifted by
/// (-1/2, -1/2) onto the integer grid, with the labeled adjacency
/// relation compared before and after.
pub fn to_lattice_delone_2d(
    sub: &GeometricSubstitution2D,
    patch: &[PlacedTile],
) -> Result<LatticeDelone, RectifyError> {
    let tiling = RectTiling::from_square_patch(sub, patch)?;
    let map = commensurate_rescale(&tiling, false);
    let fibration = torus_fibration(&tiling, &map)?;
    // labeled adjacency multiset: (label_a, label_b, axis) for unit
    // neighbors, computed from the combinatorial corners (before) and
    // from the rescaled coordinates (after)
    let adjacency = |coords: &[(i64, i64, &str)]| -> Vec<(String, String, usize)> {
        let mut out = Vec::new();
        let index: std::collections::HashMap<(i64, i64), &str> =
            coords.iter().map(|&(x, y, l)| ((x, y), l)).collect();
        for &(x, y, l) in coords {
            for (axis, (dx, dy)) in [(1i64, 0i64), (0, 1)].iter().enumerate() {
                if let Some(&l2) = index.get(&(x + dx, y + dy)) {
                    out.push((l.to_string(), l2.to_string(), axis));
                }
            }
        }
        out.sort();
        out
    };
    let before: Vec<(i64, i64, &str)> = tiling
        .tiles
        .iter()
        .map(|t| (t.corner[0][0], t.corner[1][0], t.label.as_str()))
        .collect();
    let after: Vec<(i64, i64, &str)> = tiling
        .tiles
        .iter()
        .map(|t| {
            let c = tiling.rescaled_corner(&map, t);
            (
                c[0].to_integer().to_i64().unwrap(),
                c[1].to_integer().to_i64().unwrap(),
                t.label.as_str(),
            )
        })
        .collect();
    let labels_equal = adjacency(&before) == adjacency(&after);
    // barycenter of the unit square at corner (x, y) is (x, y) + (1/2, 1/2);
    // shift by the negative half-unit to land on Z^2
    let points: Vec<Point<f64>> = after
        .iter()
        .map(|&(x, y, _)| Point::new(vec![x as f64, y as f64]))
        .collect();
    let labels: Vec<String> = after.iter().map(|&(_, _, l)| l.to_string()).collect();
    let (mut min, mut max) = ([i64::MAX; 2], [i64::MIN; 2]);
    for &(x, y, _) in &after {
        min[0] = min[0].min(x);
        min[1] = min[1].min(y);
        max[0] = max[0].max(x);
        max[1] = max[1].max(y);
    }
    let set = DeloneSet::new(
        2,
        points,
        Some(labels),
        Window::new(
            vec![min[0] as f64 - 0.5, min[1] as f64 - 0.5],
            vec![max[0] as f64 + 0.5, max[1] as f64 + 0.5],
        ),
        0.5 * (1.0 - 1e-9),
        2f64.sqrt() * (1.0 + 1e-9),
    )
    .map_err(|e| RectifyError::NonRectangular(e.to_string()))?;
    let half = Rat::new(BigInt::from(-1), BigInt::from(2));
    Ok(LatticeDelone {
        set,
        fibration,
        certificate: LatticeCertificate {
            dim: 2,
            labels_equal,
            shift: vec![half.clone(), half],
            note: WINDOW_NOTE.to_string(),
        },
    })
}

/// SVG snapshot of a rescaled 2D box tiling.
pub fn rect_svg(tiling: &RectTiling, map: &RescaleMap) -> String {
    assert_eq!(tiling.dim, 2);
    let corners: Vec<[f64; 2]> = tiling
        .tiles
        .iter()
        .map(|t| {
            let c = tiling.rescaled_corner(map, t);
            [c[0].to_f64().unwrap(), c[1].to_f64().unwrap()]
        })
        .collect();
    let sizes: Vec<[f64; 2]> = tiling
        .tiles
        .iter()
        .map(|t| {
            [
                map.new_lengths[0][t.extent[0]].to_f64().unwrap(),
                map.new_lengths[1][t.extent[1]].to_f64().unwrap(),
            ]
        })
        .collect();
    let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (c, s) in corners.iter().zip(&sizes) {
        for k in 0..2 {
            min[k] = min[k].min(c[k]);
            max[k] = max[k].max(c[k] + s[k]);
        }
    }
    let scale = 512.0 / (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
        (max[0] - min[0]) * scale,
        (max[1] - min[1]) * scale
    );
    for (c, s) in corners.iter().zip(&sizes) {
        svg.push_str(&format!(
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>\n",
            (c[0] - min[0]) * scale,
            (max[1] - c[1] - s[1]) * scale,
            s[0] * scale,
            s[1] * scale
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
