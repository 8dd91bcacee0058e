//! Property tests for the cross-module invariants: Hilbert metric axioms,
//! Birkhoff contraction, patch classification, Voronoi measures, cone
//! nesting, and the transported switching relation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use solenoid::complex::{positive_cone, validate_switching, Chain};
use solenoid::geometry::{
    cell_measure, classify_patches, extract_patches, voronoi_diagram, DeloneSet, GroupMode,
    Point, Window,
};
use solenoid::linalg::IntMat;
use solenoid::substitution::{anderson_putnam, builtin, Builtin};
use solenoid::tower::{birkhoff_coefficient, hilbert_distance, induced_matrix, Tower};

proptest! {
    #[test]
    fn hilbert_metric_axioms(
        dim in 2..6usize,
        seed in any::<u64>(),
        lambda in 0.1..10.0f64,
        mu in 0.1..10.0f64,
    ) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        use rand::{Rng, SeedableRng};
        let mut v = || -> Vec<f64> { (0..dim).map(|_| rng.gen_range(0.01..100.0)).collect() };
        let (x, y, z) = (v(), v(), v());
        let dxy: f64 = hilbert_distance(&x, &y).unwrap();
        let dyx: f64 = hilbert_distance(&y, &x).unwrap();
        prop_assert!((dxy - dyx).abs() < 1e-12);
        // scale invariance: the ratio formula cancels lambda and mu exactly
        let sx: Vec<f64> = x.iter().map(|c| c * lambda).collect();
        let sy: Vec<f64> = y.iter().map(|c| c * mu).collect();
        let ds: f64 = hilbert_distance(&sx, &sy).unwrap();
        prop_assert!((ds - dxy).abs() < 1e-12);
        let dxz: f64 = hilbert_distance(&x, &z).unwrap();
        let dyz: f64 = hilbert_distance(&y, &z).unwrap();
        prop_assert!(dxz <= dxy + dyz + 1e-12);
    }

    #[test]
    fn birkhoff_contraction_on_random_matrices(
        dim in 2..5usize,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let entries: Vec<Vec<u64>> =
            (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(1..20u64)).collect()).collect();
        let a = IntMat::from_u64(&entries);
        let k: f64 = birkhoff_coefficient(&a).unwrap();
        prop_assert!(k < 1.0);
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.01..100.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.01..100.0)).collect();
        let apply = |v: &[f64]| -> Vec<f64> {
            entries
                .iter()
                .map(|row| row.iter().zip(v).map(|(&c, x)| c as f64 * x).sum())
                .collect()
        };
        let d: f64 = hilbert_distance(&x, &y).unwrap();
        let da: f64 = hilbert_distance(&apply(&x), &apply(&y)).unwrap();
        prop_assert!(da <= k * d + 1e-12);
    }

    #[test]
    fn patch_classes_partition_the_patches(
        labels in proptest::collection::vec(0..2u8, 49),
        radius in 1.1..2.6f64,
    ) {
        // 7x7 labeled grid
        let mut points = Vec::new();
        let mut names = Vec::new();
        for i in 0..7i64 {
            for j in 0..7i64 {
                points.push(Point::new(vec![i as f64, j as f64]));
                names.push(if labels[(7 * i + j) as usize] == 0 { "a" } else { "b" }.to_string());
            }
        }
        let set = DeloneSet::new(
            2,
            points,
            Some(names),
            Window::new(vec![-0.5, -0.5], vec![6.5, 6.5]),
            0.5,
            0.8,
        )
        .unwrap();
        let patches = extract_patches(&set, radius);
        let classes = classify_patches(&patches, GroupMode::Translations, 1e-9);
        let mut seen = vec![0usize; patches.len()];
        for class in &classes {
            prop_assert!(!class.is_empty());
            for &i in class {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1), "every patch in exactly one class");
    }

    #[test]
    fn voronoi_cells_tile_the_window(
        jitter in proptest::collection::vec(-0.3..0.3f64, 50),
    ) {
        // jittered 5x5 grid stays Delone and its cells partition the window
        let mut points = Vec::new();
        for i in 0..5i64 {
            for j in 0..5i64 {
                let k = (5 * i + j) as usize;
                points.push(Point::new(vec![
                    i as f64 + jitter[2 * k],
                    j as f64 + jitter[2 * k + 1],
                ]));
            }
        }
        let window = Window::new(vec![-0.5, -0.5], vec![4.5, 4.5]);
        let volume = window.volume();
        let set = DeloneSet::new(2, points, None, window, 0.2, 1.2).unwrap();
        let diagram = voronoi_diagram(&set).unwrap();
        let total: f64 = diagram.cells.iter().map(|c| cell_measure(c, 2)).sum();
        prop_assert!((total - volume).abs() < 1e-6, "cell areas sum to {total}, window {volume}");
    }
}

fn stationary(name: &str) -> (Tower, solenoid::complex::BranchedComplex, IntMat) {
    let (complex, cell_map_matrix) = match builtin(name).unwrap() {
        Builtin::OneD(s) => {
            let ap = anderson_putnam(&s, false).unwrap();
            let (subm, _) = ap.self_submersion();
            (ap.complex, induced_matrix(&subm).unwrap().a)
        }
        Builtin::TwoD(s) => {
            let ap = s.anderson_putnam().unwrap();
            let (subm, _) = ap.self_submersion();
            (ap.complex, induced_matrix(&subm).unwrap().a)
        }
    };
    let a = cell_map_matrix.0.clone();
    (Tower::Stationary { matrix: cell_map_matrix, complex: Some(complex.clone()) }, complex, a)
}

/// Exact conic-hull membership by support enumeration: consistent
/// nonnegative solution of (columns of gens restricted to a support)
/// c = target for some support.
fn conic_member(target: &[BigRational], gens: &[Vec<BigInt>]) -> bool {
    let dim = target.len();
    let m = gens.len();
    assert!(m <= 16);
    'mask: for mask in 1u32..(1 << m) {
        let support: Vec<usize> = (0..m).filter(|&j| mask & (1 << j) != 0).collect();
        // eliminate on the augmented system [G | target]
        let mut aug: Vec<Vec<BigRational>> = (0..dim)
            .map(|i| {
                let mut row: Vec<BigRational> = support
                    .iter()
                    .map(|&j| BigRational::from(gens[j][i].clone()))
                    .collect();
                row.push(target[i].clone());
                row
            })
            .collect();
        let cols = support.len();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..aug.len()).find(|&i| !aug[i][c].is_zero()) else {
                continue;
            };
            aug.swap(r, p);
            let inv = aug[r][c].clone();
            for x in aug[r].iter_mut() {
                *x = &*x / &inv;
            }
            for i in 0..aug.len() {
                if i != r && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    for j in 0..=cols {
                        let d = &f * &aug[r][j];
                        aug[i][j] = &aug[i][j] - d;
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        // inconsistent system: a zero row with nonzero rhs
        if aug.iter().skip(r).any(|row| !row[cols].is_zero()) {
            continue;
        }
        // unique solutions only: free columns get zero
        let mut c = vec![BigRational::zero(); cols];
        for &(row, col) in &pivots {
            c[col] = aug[row][cols].clone();
        }
        // verify (free columns may make the pivot solution wrong)
        for i in 0..dim {
            let lhs: BigRational = support
                .iter()
                .enumerate()
                .map(|(k, &j)| &c[k] * BigRational::from(gens[j][i].clone()))
                .sum();
            if lhs != target[i] {
                continue 'mask;
            }
        }
        if c.iter().all(|x| x >= &BigRational::zero()) {
            return true;
        }
    }
    false
}

/// A maps the level n+1 cone into the level n cone: the image of every
/// extremal ray stays inside the conic hull of the rays. Together with
/// linearity of the prefix products this is the nesting W_{n+1} <= W_n.
#[test]
fn pushed_cones_are_nested() {
    for name in ["fibonacci", "thue_morse", "chair", "half_hex"] {
        let (_, complex, a) = stationary(name);
        let rays = positive_cone(&complex).extremal_rays;
        for ray in &rays {
            let image: Vec<BigRational> = (0..a.rows)
                .map(|i| {
                    (0..a.cols)
                        .map(|j| BigRational::from(&a.data[i][j] * &ray[j]))
                        .sum()
                })
                .collect();
            assert!(
                conic_member(&image, &rays),
                "{name}: pushed ray {ray:?} escapes the cone"
            );
        }
    }
}

/// Transported weights keep switching: if w satisfies the switching rules
/// at level n+1 (a nonnegative combination of cone rays), then A w
/// satisfies them at level n. This is the map on homology being defined.
#[test]
fn transition_preserves_switching() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for name in ["fibonacci", "thue_morse", "chair", "half_hex"] {
        let (_, complex, a) = stationary(name);
        let rays = positive_cone(&complex).extremal_rays;
        for _ in 0..50 {
            let mut w = vec![BigRational::zero(); a.cols];
            for ray in &rays {
                let c = BigRational::from(BigInt::from(rng.gen_range(0..7u32)));
                for (j, x) in ray.iter().enumerate() {
                    w[j] += &c * BigRational::from(x.clone());
                }
            }
            assert!(validate_switching(&complex, &Chain { coefficients: w.clone() }).unwrap());
            let aw: Vec<BigRational> = (0..a.rows)
                .map(|i| {
                    (0..a.cols)
                        .map(|j| BigRational::from(a.data[i][j].clone()) * &w[j])
                        .sum()
                })
                .collect();
            assert!(
                validate_switching(&complex, &Chain { coefficients: aw }).unwrap(),
                "{name}: transported weights break switching"
            );
        }
    }
}

/// The k-fold self-composition of the substitution map induces A^k.
#[test]
fn functoriality_of_induced_matrices() {
    for name in ["fibonacci", "chair"] {
        let (subm, base) = match builtin(name).unwrap() {
            Builtin::OneD(s) => {
                let ap = anderson_putnam(&s, false).unwrap();
                (ap.self_submersion().0, induced_matrix(&ap.self_submersion().0).unwrap())
            }
            Builtin::TwoD(s) => {
                let ap = s.anderson_putnam().unwrap();
                (ap.self_submersion().0, induced_matrix(&ap.self_submersion().0).unwrap())
            }
        };
        for k in [2usize, 3] {
            // compose the cell map with itself k times
            let mut composed = subm.clone();
            for _ in 1..k {
                composed.cell_map = composed
                    .cell_map
                    .iter()
                    .map(|cells| {
                        cells.iter().flat_map(|&c| subm.cell_map[c].clone()).collect()
                    })
                    .collect();
            }
            let got = induced_matrix(&composed).unwrap();
            assert_eq!(got.a.0, base.a.0.pow(k), "{name}: A^{k} mismatch");
        }
    }
}
