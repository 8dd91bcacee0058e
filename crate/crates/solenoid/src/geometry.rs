//! Delone sets, patches, the matching metric, and Voronoi tilings in
//! dimension 1 and 2, generic over the floating scalar.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Point<S: Real> {
    pub coords: Vec<S>,
}

impl<S: Real> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dist(&self, other: &Point<S>) -> S {
        dist(&self.coords, &other.coords)
    }
}

pub fn dist<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).fold(S::zero(), |s, t| s + t).sqrt()
}

fn norm<S: Real>(a: &[S]) -> S {
    a.iter().map(|x| *x * *x).fold(S::zero(), |s, t| s + t).sqrt()
}

fn sub<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

fn add<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// Axis-aligned window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window<S> {
    pub min: Vec<S>,
    pub max: Vec<S>,
}

impl<S: Real> Window<S> {
    pub fn new(min: Vec<S>, max: Vec<S>) -> Self {
        Window { min, max }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, p: &[S], tol: S) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(x, (lo, hi))| *x >= *lo - tol && *x <= *hi + tol)
    }

    /// Distance from a point to the window boundary (positive inside).
    pub fn boundary_distance(&self, p: &[S]) -> S {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(x, (lo, hi))| (*x - *lo).min(*hi - *x))
            .fold(S::infinity(), |m, d| m.min(d))
    }

    pub fn eroded(&self, margin: S) -> Option<Window<S>> {
        let min: Vec<S> = self.min.iter().map(|x| *x + margin).collect();
        let max: Vec<S> = self.max.iter().map(|x| *x - margin).collect();
        if min.iter().zip(&max).any(|(lo, hi)| *lo > *hi) {
            None
        } else {
            Some(Window { min, max })
        }
    }

    pub fn volume(&self) -> S {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(lo, hi)| *hi - *lo)
            .fold(S::one(), |p, d| p * d)
    }
}

/// Finite window of a labeled point set with Delone parameters.
#[derive(Clone, Debug)]
pub struct DeloneSet<S: Real> {
    pub dim: usize,
    pub points: Vec<Point<S>>,
    pub labels: Option<Vec<String>>,
    pub window: Window<S>,
    pub r: S,
    pub big_r: S,
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension {0} is unsupported (only 1 and 2)")]
    UnsupportedDimension(usize),
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("delone parameters must be positive, got r={r}, R={big_r}")]
    BadParameters { r: f64, big_r: f64 },
    #[error("point sets have different dimensions")]
    DimensionMismatch,
    #[error("invalid JSON for Delone set: {0}")]
    BadJson(String),
}

impl<S: Real> DeloneSet<S> {
    pub fn new(
        dim: usize,
        points: Vec<Point<S>>,
        labels: Option<Vec<String>>,
        window: Window<S>,
        r: S,
        big_r: S,
    ) -> Result<Self, GeometryError> {
        if dim == 0 || dim > 2 {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        if r <= S::zero() || big_r <= S::zero() || r > big_r {
            return Err(GeometryError::BadParameters {
                r: r.to_f64().unwrap_or(f64::NAN),
                big_r: big_r.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(DeloneSet { dim, points, labels, window, r, big_r })
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }
}

impl DeloneSet<f64> {
    /// JSON form: `{dim, r, R, window: {min, max}, points: [[x, (y,) label], ...]}`.
    pub fn to_json(&self) -> String {
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut row: Vec<serde_json::Value> =
                    p.coords.iter().map(|&x| serde_json::json!(x)).collect();
                if let Some(l) = self.label(i) {
                    row.push(serde_json::json!(l));
                }
                serde_json::Value::Array(row)
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "dim": self.dim,
            "r": self.r,
            "R": self.big_r,
            "window": { "min": self.window.min, "max": self.window.max },
            "points": points,
        }))
        .expect("serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, GeometryError> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| GeometryError::BadJson(e.to_string()))?;
        let dim = v["dim"].as_u64().ok_or_else(|| GeometryError::BadJson("missing dim".into()))?
            as usize;
        let r = v["r"].as_f64().ok_or_else(|| GeometryError::BadJson("missing r".into()))?;
        let big_r =
            v["R"].as_f64().ok_or_else(|| GeometryError::BadJson("missing R".into()))?;
        let get_vec = |val: &serde_json::Value| -> Result<Vec<f64>, GeometryError> {
            val.as_array()
                .ok_or_else(|| GeometryError::BadJson("bad window".into()))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| GeometryError::BadJson("bad window".into())))
                .collect()
        };
        let window = Window::new(get_vec(&v["window"]["min"])?, get_vec(&v["window"]["max"])?);
        let rows =
            v["points"].as_array().ok_or_else(|| GeometryError::BadJson("missing points".into()))?;
        let mut points = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let mut any_label = false;
        for row in rows {
            let arr =
                row.as_array().ok_or_else(|| GeometryError::BadJson("bad point row".into()))?;
            let mut coords = Vec::new();
            let mut label = String::new();
            for item in arr {
                if let Some(x) = item.as_f64() {
                    coords.push(x);
                } else if let Some(s) = item.as_str() {
                    label = s.to_string();
                    any_label = true;
                }
            }
            if coords.len() != dim {
                return Err(GeometryError::BadJson("point has wrong dimension".into()));
            }
            points.push(Point::new(coords));
            labels.push(label);
        }
        DeloneSet::new(dim, points, any_label.then_some(labels), window, r, big_r)
    }
}

// ---------------------------------------------------------------------------
// verify_delone

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeloneReport {
    pub uniform_discrete: bool,
    pub relatively_dense: bool,
    /// Centers of violating balls.
    pub witnesses: Vec<Vec<f64>>,
}

/// Check uniform discreteness (no two points at distance < 2r) and
/// relative density (every point of the eroded window has a set point
/// within distance < R).
pub fn verify_delone<S: Real>(x: &DeloneSet<S>) -> DeloneReport {
    let tol = S::geom_tol();
    let mut witnesses: Vec<Vec<f64>> = Vec::new();

    // uniform discreteness via a bucket grid of size 2r
    let two_r = x.r + x.r;
    let mut uniform = true;
    let buckets = BucketGrid::new(&x.points, two_r);
    for i in 0..x.points.len() {
        for j in buckets.neighbors(&x.points[i].coords) {
            if j <= i {
                continue;
            }
            let d = x.points[i].dist(&x.points[j]);
            if d < two_r * (S::one() - tol) {
                uniform = false;
                let mid: Vec<f64> = x.points[i]
                    .coords
                    .iter()
                    .zip(&x.points[j].coords)
                    .map(|(a, b)| ((*a + *b) / S::from_f64(2.0).unwrap()).to_f64().unwrap())
                    .collect();
                witnesses.push(mid);
            }
        }
    }

    let dense = match x.window.eroded(x.big_r) {
        None => true, // nothing to certify: eroded region empty
        Some(eroded) => match farthest_point(&x.points, &eroded) {
            None => {
                witnesses.push(
                    eroded
                        .min
                        .iter()
                        .zip(&eroded.max)
                        .map(|(lo, hi)| ((*lo + *hi) / S::from_f64(2.0).unwrap()).to_f64().unwrap())
                        .collect(),
                );
                false
            }
            Some((spot, d)) => {
                if d < x.big_r * (S::one() - tol) {
                    true
                } else {
                    witnesses.push(spot.iter().map(|v| v.to_f64().unwrap()).collect());
                    false
                }
            }
        },
    };

    DeloneReport { uniform_discrete: uniform, relatively_dense: dense, witnesses }
}

/// Point of `region` farthest from the set, with its distance.
/// Exact in d=1 (gap midpoints); in d=2 the maximum is attained at a
/// Voronoi vertex of the clipped diagram.
fn farthest_point<S: Real>(points: &[Point<S>], region: &Window<S>) -> Option<(Vec<S>, S)> {
    if points.is_empty() {
        return None;
    }
    let nearest_dist = |c: &[S]| -> S {
        points.iter().map(|p| dist(&p.coords, c)).fold(S::infinity(), |m, d| m.min(d))
    };
    match region.dim() {
        1 => {
            let lo = region.min[0];
            let hi = region.max[0];
            let mut xs: Vec<S> = points.iter().map(|p| p.coords[0]).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut candidates = vec![lo, hi];
            for w in xs.windows(2) {
                let mid = (w[0] + w[1]) / S::from_f64(2.0).unwrap();
                candidates.push(mid.max(lo).min(hi));
            }
            candidates
                .into_iter()
                .map(|c| (vec![c], nearest_dist(&[c])))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        }
        2 => {
            let mut candidates: Vec<Vec<S>> = vec![
                vec![region.min[0], region.min[1]],
                vec![region.min[0], region.max[1]],
                vec![region.max[0], region.min[1]],
                vec![region.max[0], region.max[1]],
            ];
            // vertices of the Voronoi diagram clipped to the region
            let cells = voronoi_cells_2d(points, region);
            for cell in &cells {
                for v in &cell.vertices {
                    candidates.push(v.clone());
                }
            }
            candidates
                .into_iter()
                .map(|c| {
                    let d = nearest_dist(&c);
                    (c, d)
                })
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        }
        _ => None,
    }
}

struct BucketGrid<S: Real> {
    cell: S,
    map: std::collections::HashMap<(i64, i64), Vec<usize>>,
    dim: usize,
}

impl<S: Real> BucketGrid<S> {
    fn key(&self, p: &[S]) -> (i64, i64) {
        let k = |x: S| -> i64 { (x / self.cell).floor().to_i64().unwrap_or(0) };
        (k(p[0]), if self.dim > 1 { k(p[1]) } else { 0 })
    }

    fn new(points: &[Point<S>], cell: S) -> Self {
        let dim = points.first().map_or(1, |p| p.dim());
        let cell = if cell <= S::zero() { S::one() } else { cell };
        let mut grid =
            BucketGrid { cell, map: std::collections::HashMap::new(), dim };
        for (i, p) in points.iter().enumerate() {
            let k = grid.key(&p.coords);
            grid.map.entry(k).or_default().push(i);
        }
        grid
    }

    fn neighbors(&self, p: &[S]) -> Vec<usize> {
        let (kx, ky) = self.key(p);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.map.get(&(kx + dx, ky + dy)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// patches

/// Finite labeled constellation around an anchor point.
#[derive(Clone, Debug)]
pub struct Patch<S: Real> {
    pub anchor: Point<S>,
    /// Offsets from the anchor with labels; contains the zero offset.
    pub offsets: Vec<(Vec<S>, Option<String>)>,
    pub radius: S,
}

/// One patch per point at distance >= T from the window boundary,
/// containing exactly the points within distance T of the anchor.
pub fn extract_patches<S: Real>(x: &DeloneSet<S>, radius: S) -> Vec<Patch<S>> {
    let tol = S::geom_tol();
    let mut out = Vec::new();
    for (i, p) in x.points.iter().enumerate() {
        if x.window.boundary_distance(&p.coords) < radius - tol {
            continue;
        }
        let mut offsets: Vec<(Vec<S>, Option<String>)> = Vec::new();
        for (j, q) in x.points.iter().enumerate() {
            if p.dist(q) <= radius + tol {
                offsets.push((sub(&q.coords, &p.coords), x.label(j).map(String::from)));
            }
        }
        offsets.sort_by(|a, b| cmp_offsets(a, b));
        out.push(Patch { anchor: p.clone(), offsets, radius });
        let _ = i;
    }
    out
}

fn cmp_offsets<S: Real>(
    a: &(Vec<S>, Option<String>),
    b: &(Vec<S>, Option<String>),
) -> std::cmp::Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    a.1.cmp(&b.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupMode {
    Translations,
    PlanarDirectIsometries,
}

/// Partition patches into equivalence classes under the group action.
/// Returns index lists, each sorted, ordered by their lexicographically
/// smallest patch (deterministic representatives).
pub fn classify_patches<S: Real>(
    patches: &[Patch<S>],
    group: GroupMode,
    tol: S,
) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, p) in patches.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = &patches[class[0]];
            if patches_equivalent(rep, p, group, tol) {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    // deterministic order: by lexicographically smallest member patch
    classes.sort_by(|a, b| {
        let pa = &patches[*a.iter().min_by(|&&i, &&j| cmp_patches(&patches[i], &patches[j])).unwrap()];
        let pb = &patches[*b.iter().min_by(|&&i, &&j| cmp_patches(&patches[i], &patches[j])).unwrap()];
        cmp_patches(pa, pb)
    });
    classes
}

fn cmp_patches<S: Real>(a: &Patch<S>, b: &Patch<S>) -> std::cmp::Ordering {
    a.offsets
        .len()
        .cmp(&b.offsets.len())
        .then_with(|| {
            for (x, y) in a.offsets.iter().zip(&b.offsets) {
                match cmp_offsets(x, y) {
                    std::cmp::Ordering::Equal => {}
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        })
}

/// Equivalence: some group element matches offset sets and labels within
/// tolerance.
pub fn patches_equivalent<S: Real>(
    p1: &Patch<S>,
    p2: &Patch<S>,
    group: GroupMode,
    tol: S,
) -> bool {
    if p1.offsets.len() != p2.offsets.len() {
        return false;
    }
    let angles: Vec<S> = match group {
        GroupMode::Translations => vec![S::zero()],
        GroupMode::PlanarDirectIsometries => candidate_angles(p1, p2, tol),
    };
    for theta in angles {
        let rotated: Vec<(Vec<S>, Option<String>)> = p1
            .offsets
            .iter()
            .map(|(o, l)| (rotate(o, theta), l.clone()))
            .collect();
        // candidate shifts: image of the anchor lands on a point of p2
        for (shift, _) in &p2.offsets {
            let shifted: Vec<(Vec<S>, Option<String>)> =
                rotated.iter().map(|(o, l)| (add(o, shift), l.clone())).collect();
            if offset_sets_match(&shifted, &p2.offsets, tol) {
                return true;
            }
        }
    }
    false
}

fn rotate<S: Real>(o: &[S], theta: S) -> Vec<S> {
    if o.len() < 2 || theta == S::zero() {
        return o.to_vec();
    }
    let (s, c) = (theta.sin(), theta.cos());
    vec![c * o[0] - s * o[1], s * o[0] + c * o[1]]
}

fn candidate_angles<S: Real>(p1: &Patch<S>, p2: &Patch<S>, tol: S) -> Vec<S> {
    let mut angles = vec![S::zero()];
    // pick the smallest nonzero offset of p1 as the probe
    let probe = p1
        .offsets
        .iter()
        .filter(|(o, _)| norm(o) > tol)
        .min_by(|a, b| norm(&a.0).partial_cmp(&norm(&b.0)).unwrap());
    let Some((probe, probe_label)) = probe else {
        return angles;
    };
    let pn = norm(probe);
    for (o, l) in &p2.offsets {
        if l != probe_label {
            continue;
        }
        let on = norm(o);
        if (on - pn).abs() > tol + tol {
            continue;
        }
        if o.len() < 2 {
            continue;
        }
        let a1 = probe[1].atan2(probe[0]);
        let a2 = o[1].atan2(o[0]);
        angles.push(a2 - a1);
    }
    angles
}

fn offset_sets_match<S: Real>(
    a: &[(Vec<S>, Option<String>)],
    b: &[(Vec<S>, Option<String>)],
    tol: S,
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for (o, l) in a {
        let mut hit = false;
        for (j, (o2, l2)) in b.iter().enumerate() {
            if used[j] || l != l2 {
                continue;
            }
            if dist(o, o2) <= tol {
                used[j] = true;
                hit = true;
                break;
            }
        }
        if !hit {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// matching metric

/// Grid specification for the matching-metric search.
#[derive(Clone, Debug)]
pub struct SearchGrid<S> {
    /// Candidate epsilon values, tested in ascending order.
    pub epsilons: Vec<S>,
    /// Steps per axis for the relative-shift grid over `[-2eps, 2eps]`.
    pub shift_steps: usize,
    /// Steps for the relative-rotation grid (planar mode only).
    pub angle_steps: usize,
    pub group: GroupMode,
    /// Matching tolerance for point agreement.
    pub match_tol: S,
}

#[derive(Clone, Debug)]
pub struct MetricResult<S> {
    /// Smallest tested epsilon admitting a match; 1 if none.
    pub value: S,
    /// Epsilon values skipped because a window was too small for the ball
    /// of radius 1/eps.
    pub untestable: Vec<S>,
}

/// Grid-search upper bound for the matching metric: the smallest tested
/// epsilon for which group elements within epsilon of the identity make
/// the two sets agree on the ball of radius 1/epsilon around the origin.
pub fn delone_metric<S: Real>(
    x1: &DeloneSet<S>,
    x2: &DeloneSet<S>,
    grid: &SearchGrid<S>,
) -> Result<MetricResult<S>, GeometryError> {
    if x1.dim != x2.dim {
        return Err(GeometryError::DimensionMismatch);
    }
    let mut untestable = Vec::new();
    let mut eps_sorted = grid.epsilons.clone();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &eps in &eps_sorted {
        if eps <= S::zero() {
            continue;
        }
        let ball = S::one() / eps;
        let origin = vec![S::zero(); x1.dim];
        let fits = |x: &DeloneSet<S>| {
            x.window.contains(&origin, S::zero()) && x.window.boundary_distance(&origin) >= ball
        };
        if !fits(x1) || !fits(x2) {
            untestable.push(eps);
            continue;
        }
        if metric_match_at(x1, x2, eps, grid) {
            return Ok(MetricResult { value: eps, untestable });
        }
    }
    Ok(MetricResult { value: S::one(), untestable })
}

fn metric_match_at<S: Real>(
    x1: &DeloneSet<S>,
    x2: &DeloneSet<S>,
    eps: S,
    grid: &SearchGrid<S>,
) -> bool {
    let dim = x1.dim;
    let steps = grid.shift_steps.max(1);
    let two_eps = eps + eps;
    let mut axis: Vec<S> = Vec::new();
    for k in 0..=steps {
        let t = S::from_usize(k).unwrap() / S::from_usize(steps).unwrap();
        axis.push(-two_eps + (two_eps + two_eps) * t);
    }
    let shifts: Vec<Vec<S>> = if dim == 1 {
        axis.iter().map(|&s| vec![s]).collect()
    } else {
        axis.iter().flat_map(|&sx| axis.iter().map(move |&sy| vec![sx, sy])).collect()
    };
    let angles: Vec<S> = match grid.group {
        GroupMode::Translations => vec![S::zero()],
        GroupMode::PlanarDirectIsometries => {
            let n = grid.angle_steps.max(1);
            (0..=n)
                .map(|k| {
                    let t = S::from_usize(k).unwrap() / S::from_usize(n).unwrap();
                    -two_eps + (two_eps + two_eps) * t
                })
                .collect()
        }
    };
    let half = S::from_f64(0.5).unwrap();
    let ball = S::one() / eps;
    for delta in &shifts {
        for &theta in &angles {
            // split the relative motion evenly between the two sets
            let s1: Vec<S> = delta.iter().map(|&d| -d * half).collect();
            let s2: Vec<S> = delta.iter().map(|&d| d * half).collect();
            let a = collect_ball(x1, &s1, -theta * half, ball, grid.match_tol);
            let b = collect_ball(x2, &s2, theta * half, ball, grid.match_tol);
            if offset_sets_match(&a, &b, grid.match_tol) {
                return true;
            }
        }
    }
    false
}

fn collect_ball<S: Real>(
    x: &DeloneSet<S>,
    shift: &[S],
    theta: S,
    ball: S,
    tol: S,
) -> Vec<(Vec<S>, Option<String>)> {
    let mut out = Vec::new();
    for (i, p) in x.points.iter().enumerate() {
        let moved = add(&rotate(&p.coords, theta), shift);
        if norm(&moved) <= ball + tol {
            out.push((moved, x.label(i).map(String::from)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// repetitivity

/// Smallest radius rho such that every ball of radius rho centered in the
/// window eroded by rho contains a translated copy of the patch;
/// `None` when the window is exhausted first.
pub fn repetitivity_radius<S: Real>(
    x: &DeloneSet<S>,
    patch: &Patch<S>,
    tol: S,
) -> Option<S> {
    let occurrences = occurrence_anchors(x, patch, tol);
    // a patch seen only at its own anchor certifies nothing
    if occurrences.len() < 2 {
        return None;
    }
    let max_extent = x
        .window
        .min
        .iter()
        .zip(&x.window.max)
        .map(|(lo, hi)| *hi - *lo)
        .fold(S::zero(), |m, d| m.max(d));
    let satisfied = |rho: S| -> bool {
        let Some(eroded) = x.window.eroded(rho) else {
            return true; // no admissible center left: vacuous
        };
        match farthest_point(&occurrences, &eroded) {
            None => false,
            Some((_, d)) => d <= rho - patch.radius,
        }
    };
    // monotone in rho: binary search the threshold
    let mut lo = patch.radius;
    let mut hi = max_extent;
    if !satisfied(hi) {
        return None;
    }
    if satisfied(lo) {
        return Some(lo);
    }
    for _ in 0..80 {
        let mid = (lo + hi) / S::from_f64(2.0).unwrap();
        if satisfied(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Anchors of translated copies of `patch` inside the set (subset
/// semantics: all patch offsets present with matching labels).
fn occurrence_anchors<S: Real>(x: &DeloneSet<S>, patch: &Patch<S>, tol: S) -> Vec<Point<S>> {
    let mut out = Vec::new();
    for q in &x.points {
        if x.window.boundary_distance(&q.coords) < patch.radius - tol {
            continue;
        }
        let ok = patch.offsets.iter().all(|(o, l)| {
            let target = add(&q.coords, o);
            x.points.iter().enumerate().any(|(j, p)| {
                dist(&p.coords, &target) <= tol && x.label(j).map(String::from) == *l
            })
        });
        if ok {
            out.push(q.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Voronoi

#[derive(Clone, Debug)]
pub struct VoronoiCell<S: Real> {
    pub site: usize,
    /// d=1: two endpoints; d=2: CCW polygon vertices.
    pub vertices: Vec<Vec<S>>,
    /// True when the cell touches the window boundary.
    pub clipped: bool,
    /// Sites whose bisectors bound this cell.
    pub neighbors: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct VoronoiDiagram<S: Real> {
    pub dim: usize,
    pub cells: Vec<VoronoiCell<S>>,
    /// Shared-face relation between sites.
    pub adjacency: Vec<(usize, usize)>,
}

/// Voronoi tiling of the point set clipped to its window.
pub fn voronoi_diagram<S: Real>(x: &DeloneSet<S>) -> Result<VoronoiDiagram<S>, GeometryError> {
    if x.points.len() < 2 {
        return Err(GeometryError::TooFewPoints { need: 2, got: x.points.len() });
    }
    match x.dim {
        1 => Ok(voronoi_1d(x)),
        2 => {
            let cells = voronoi_cells_2d(&x.points, &x.window);
            let mut adjacency: Vec<(usize, usize)> = Vec::new();
            for cell in &cells {
                for &n in &cell.neighbors {
                    let pair = (cell.site.min(n), cell.site.max(n));
                    if !adjacency.contains(&pair) {
                        adjacency.push(pair);
                    }
                }
            }
            adjacency.sort_unstable();
            Ok(VoronoiDiagram { dim: 2, cells, adjacency })
        }
        d => Err(GeometryError::UnsupportedDimension(d)),
    }
}

fn voronoi_1d<S: Real>(x: &DeloneSet<S>) -> VoronoiDiagram<S> {
    let mut order: Vec<usize> = (0..x.points.len()).collect();
    order.sort_by(|&i, &j| x.points[i].coords[0].partial_cmp(&x.points[j].coords[0]).unwrap());
    let half = S::from_f64(0.5).unwrap();
    let lo = x.window.min[0];
    let hi = x.window.max[0];
    let mut cells = Vec::with_capacity(order.len());
    let mut adjacency = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let left = if k == 0 {
            lo
        } else {
            (x.points[order[k - 1]].coords[0] + x.points[i].coords[0]) * half
        };
        let right = if k + 1 == order.len() {
            hi
        } else {
            (x.points[i].coords[0] + x.points[order[k + 1]].coords[0]) * half
        };
        let mut neighbors = Vec::new();
        if k > 0 {
            neighbors.push(order[k - 1]);
            adjacency.push((order[k - 1].min(i), order[k - 1].max(i)));
        }
        if k + 1 < order.len() {
            neighbors.push(order[k + 1]);
        }
        cells.push(VoronoiCell {
            site: i,
            vertices: vec![vec![left], vec![right]],
            clipped: k == 0 || k + 1 == order.len(),
            neighbors,
        });
    }
    cells.sort_by_key(|c| c.site);
    adjacency.sort_unstable();
    adjacency.dedup();
    VoronoiDiagram { dim: 1, cells, adjacency }
}

/// Labeled polygon edge: which neighbor's bisector (or the window, `None`)
/// produced it.
type LabeledPoly<S> = Vec<(Vec<S>, Option<usize>)>;

fn voronoi_cells_2d<S: Real>(points: &[Point<S>], window: &Window<S>) -> Vec<VoronoiCell<S>> {
    let n = points.len();
    let mut cells = Vec::with_capacity(n);
    for i in 0..n {
        let site = &points[i].coords;
        // window rectangle, CCW, all edges labeled None
        let mut poly: LabeledPoly<S> = vec![
            (vec![window.min[0], window.min[1]], None),
            (vec![window.max[0], window.min[1]], None),
            (vec![window.max[0], window.max[1]], None),
            (vec![window.min[0], window.max[1]], None),
        ];
        // neighbors by distance, cut until the cell stabilizes
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| {
            points[a]
                .dist(&points[i])
                .partial_cmp(&points[b].dist(&points[i]))
                .unwrap()
                .then(a.cmp(&b))
        });
        for &j in &order {
            if poly.is_empty() {
                break;
            }
            let max_r = poly
                .iter()
                .map(|(v, _)| dist(v, site))
                .fold(S::zero(), |m, d| m.max(d));
            let dj = points[j].dist(&points[i]);
            if dj > (max_r + max_r) + S::geom_tol() {
                break; // bisector cannot reach the current cell
            }
            poly = clip_halfplane(&poly, site, &points[j].coords, j);
        }
        let clipped = poly.iter().any(|(_, label)| label.is_none());
        let mut neighbors: Vec<usize> =
            poly.iter().filter_map(|(_, label)| *label).collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        cells.push(VoronoiCell {
            site: i,
            vertices: poly.iter().map(|(v, _)| v.clone()).collect(),
            clipped,
            neighbors,
        });
    }
    cells
}

/// Clip a labeled polygon by the half-plane of points closer to `site`
/// than to `other`; new edges get label `Some(other_idx)`.
fn clip_halfplane<S: Real>(
    poly: &LabeledPoly<S>,
    site: &[S],
    other: &[S],
    other_idx: usize,
) -> LabeledPoly<S> {
    // half-plane: n . x <= c, with n = other - site, c = n . midpoint
    let nx = other[0] - site[0];
    let ny = other[1] - site[1];
    let half = S::from_f64(0.5).unwrap();
    let mx = (site[0] + other[0]) * half;
    let my = (site[1] + other[1]) * half;
    let c = nx * mx + ny * my;
    let val = |p: &[S]| nx * p[0] + ny * p[1] - c;
    let tol = S::geom_tol();
    let mut out: LabeledPoly<S> = Vec::new();
    let m = poly.len();
    for k in 0..m {
        let (ref p, label) = poly[k];
        let (ref q, _) = poly[(k + 1) % m];
        let vp = val(p);
        let vq = val(q);
        let inside_p = vp <= tol;
        let inside_q = vq <= tol;
        if inside_p {
            out.push((p.clone(), label));
        }
        if inside_p != inside_q && (vq - vp).abs() > S::zero() {
            let t = vp / (vp - vq);
            let ix = p[0] + (q[0] - p[0]) * t;
            let iy = p[1] + (q[1] - p[1]) * t;
            // entering edge keeps the old label; the cut edge starts at the
            // exit intersection and carries the bisector label
            let lab = if inside_p { Some(other_idx) } else { label };
            out.push((vec![ix, iy], lab));
        }
    }
    // drop degenerate duplicate vertices
    dedupe_poly(out)
}

fn dedupe_poly<S: Real>(poly: LabeledPoly<S>) -> LabeledPoly<S> {
    let tol = S::geom_tol();
    let mut out: LabeledPoly<S> = Vec::new();
    for (v, l) in poly {
        if let Some((last, _)) = out.last() {
            if dist(last, &v) <= tol {
                continue;
            }
        }
        out.push((v, l));
    }
    if out.len() >= 2 {
        let first = out[0].0.clone();
        if dist(&out.last().unwrap().0, &first) <= tol {
            out.pop();
        }
    }
    out
}

/// Area (d=2) or length (d=1) of a cell.
pub fn cell_measure<S: Real>(cell: &VoronoiCell<S>, dim: usize) -> S {
    match dim {
        1 => (cell.vertices[1][0] - cell.vertices[0][0]).abs(),
        2 => {
            let vs = &cell.vertices;
            let mut acc = S::zero();
            for k in 0..vs.len() {
                let (a, b) = (&vs[k], &vs[(k + 1) % vs.len()]);
                acc = acc + (a[0] * b[1] - b[0] * a[1]);
            }
            (acc / S::from_f64(2.0).unwrap()).abs()
        }
        _ => S::zero(),
    }
}

/// Group unclipped cells into translation classes (cells compared as
/// vertex sets relative to their site).
pub fn voronoi_translation_classes<S: Real>(
    diagram: &VoronoiDiagram<S>,
    points: &[Point<S>],
    tol: S,
) -> Vec<Vec<usize>> {
    let shape = |cell: &VoronoiCell<S>| -> Vec<(Vec<S>, Option<String>)> {
        let site = &points[cell.site].coords;
        let mut vs: Vec<(Vec<S>, Option<String>)> =
            cell.vertices.iter().map(|v| (sub(v, site), None)).collect();
        vs.sort_by(cmp_offsets);
        vs
    };
    let mut classes: Vec<(Vec<(Vec<S>, Option<String>)>, Vec<usize>)> = Vec::new();
    for (k, cell) in diagram.cells.iter().enumerate() {
        if cell.clipped {
            continue;
        }
        let sh = shape(cell);
        let mut placed = false;
        for (rep, members) in classes.iter_mut() {
            if offset_sets_match(rep, &sh, tol) {
                members.push(k);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((sh, vec![k]));
        }
    }
    classes.into_iter().map(|(_, m)| m).collect()
}

/// SVG snapshot of a 2D diagram.
pub fn voronoi_svg(diagram: &VoronoiDiagram<f64>, x: &DeloneSet<f64>) -> String {
    let w = x.window.max[0] - x.window.min[0];
    let h = x.window.max[1] - x.window.min[1];
    let scale = 512.0 / w.max(h);
    let tx = |v: f64| (v - x.window.min[0]) * scale;
    let ty = |v: f64| (x.window.max[1] - v) * scale;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n",
        w * scale,
        h * scale,
        w * scale,
        h * scale
    );
    for cell in &diagram.cells {
        let pts: Vec<String> = cell
            .vertices
            .iter()
            .map(|v| format!("{:.3},{:.3}", tx(v[0]), ty(v[1])))
            .collect();
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.6\"/>\n",
            pts.join(" ")
        ));
        let site = &x.points[cell.site].coords;
        svg.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.5\" fill=\"red\"/>\n",
            tx(site[0]),
            ty(site[1])
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
