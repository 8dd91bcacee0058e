//! Two-dimensional geometric substitutions on the square and triangular
//! lattices, with inflation factor 2. Prototiles are edge-to-edge unions
//! of lattice cells; rules place rotated copies that must tile the
//! inflated prototile exactly. The quotient cell complex is built by
//! gluing tile boundaries along coincidences observed in iterated patches.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::{BranchedComplex, CellInfo, Germ, SidePair};
use crate::geometry::{DeloneSet, Point, Window};
use crate::linalg::IntMat;
use crate::tower::{AdjacencyData, Submersion};

use super::{SubstitutionError, MAX_TILES};

/// Rounds of patch growth allowed while waiting for the gluing to
/// stabilize.
const GLUE_ITERATION_CAP: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    Square,
    Triangular,
}

impl LatticeKind {
    /// Order of the rotation group (90 or 60 degree steps).
    pub fn rotations(&self) -> usize {
        match self {
            LatticeKind::Square => 4,
            LatticeKind::Triangular => 6,
        }
    }

    /// Lattice basis in the plane.
    fn basis(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            LatticeKind::Square => ([1.0, 0.0], [0.0, 1.0]),
            LatticeKind::Triangular => ([1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]),
        }
    }

    fn to_plane(&self, v: (i64, i64)) -> [f64; 2] {
        let (e1, e2) = self.basis();
        [
            v.0 as f64 * e1[0] + v.1 as f64 * e2[0],
            v.0 as f64 * e1[1] + v.1 as f64 * e2[1],
        ]
    }

    /// One rotation step applied to a lattice vector.
    fn rot_vec(&self, v: (i64, i64)) -> (i64, i64) {
        match self {
            LatticeKind::Square => (-v.1, v.0),
            LatticeKind::Triangular => (-v.1, v.0 + v.1),
        }
    }

    fn rot_vec_k(&self, v: (i64, i64), k: usize) -> (i64, i64) {
        let mut out = v;
        for _ in 0..(k % self.rotations()) {
            out = self.rot_vec(out);
        }
        out
    }
}

/// A unit cell of the lattice: a unit square, or an upward/downward unit
/// triangle, anchored at lattice point (x, y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LatticeCell {
    Square(i64, i64),
    Up(i64, i64),
    Down(i64, i64),
}

impl LatticeCell {
    fn kind_matches(&self, kind: LatticeKind) -> bool {
        matches!(
            (self, kind),
            (LatticeCell::Square(_, _), LatticeKind::Square)
                | (LatticeCell::Up(_, _), LatticeKind::Triangular)
                | (LatticeCell::Down(_, _), LatticeKind::Triangular)
        )
    }

    fn translate(&self, v: (i64, i64)) -> LatticeCell {
        match *self {
            LatticeCell::Square(x, y) => LatticeCell::Square(x + v.0, y + v.1),
            LatticeCell::Up(x, y) => LatticeCell::Up(x + v.0, y + v.1),
            LatticeCell::Down(x, y) => LatticeCell::Down(x + v.0, y + v.1),
        }
    }

    /// One rotation step about the lattice origin.
    fn rot(&self) -> LatticeCell {
        match *self {
            LatticeCell::Square(x, y) => LatticeCell::Square(-y - 1, x),
            LatticeCell::Up(x, y) => LatticeCell::Down(-y - 1, x + y),
            LatticeCell::Down(x, y) => LatticeCell::Up(-y - 1, x + y + 1),
        }
    }

    fn rot_k(&self, kind: LatticeKind, k: usize) -> LatticeCell {
        let mut out = *self;
        for _ in 0..(k % kind.rotations()) {
            out = out.rot();
        }
        out
    }

    /// Image cells under doubling.
    fn scale2(&self) -> Vec<LatticeCell> {
        match *self {
            LatticeCell::Square(x, y) => vec![
                LatticeCell::Square(2 * x, 2 * y),
                LatticeCell::Square(2 * x + 1, 2 * y),
                LatticeCell::Square(2 * x, 2 * y + 1),
                LatticeCell::Square(2 * x + 1, 2 * y + 1),
            ],
            LatticeCell::Up(x, y) => vec![
                LatticeCell::Up(2 * x, 2 * y),
                LatticeCell::Up(2 * x + 1, 2 * y),
                LatticeCell::Down(2 * x, 2 * y),
                LatticeCell::Up(2 * x, 2 * y + 1),
            ],
            LatticeCell::Down(x, y) => vec![
                LatticeCell::Down(2 * x + 1, 2 * y),
                LatticeCell::Down(2 * x, 2 * y + 1),
                LatticeCell::Down(2 * x + 1, 2 * y + 1),
                LatticeCell::Up(2 * x + 1, 2 * y + 1),
            ],
        }
    }

    /// Counterclockwise vertex loop in lattice coordinates.
    fn vertices(&self) -> Vec<(i64, i64)> {
        match *self {
            LatticeCell::Square(x, y) => {
                vec![(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
            }
            LatticeCell::Up(x, y) => vec![(x, y), (x + 1, y), (x, y + 1)],
            LatticeCell::Down(x, y) => vec![(x + 1, y), (x + 1, y + 1), (x, y + 1)],
        }
    }

    fn centroid(&self, kind: LatticeKind) -> [f64; 2] {
        let vs = self.vertices();
        let mut c = [0.0, 0.0];
        for v in &vs {
            let p = kind.to_plane(*v);
            c[0] += p[0];
            c[1] += p[1];
        }
        [c[0] / vs.len() as f64, c[1] / vs.len() as f64]
    }
}

type Vertex = (i64, i64);
type DirEdge = (Vertex, Vertex);

fn translate_edge(e: DirEdge, v: (i64, i64)) -> DirEdge {
    (((e.0).0 + v.0, (e.0).1 + v.1), ((e.1).0 + v.0, (e.1).1 + v.1))
}

fn reverse_edge(e: DirEdge) -> DirEdge {
    (e.1, e.0)
}

/// Directed boundary edges of a cell union: edges of the CCW cell loops
/// whose reversal does not occur (interior edges cancel in pairs).
fn boundary_edges(cells: &[LatticeCell]) -> Vec<DirEdge> {
    let mut all: BTreeSet<DirEdge> = BTreeSet::new();
    for c in cells {
        let vs = c.vertices();
        for k in 0..vs.len() {
            all.insert((vs[k], vs[(k + 1) % vs.len()]));
        }
    }
    all.iter().filter(|e| !all.contains(&reverse_edge(**e))).copied().collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prototile {
    pub label: String,
    /// Cells in canonical position (orientation 0).
    pub cells: Vec<LatticeCell>,
}

/// A prototile copy: orientation `rot` (rotation steps about the origin)
/// followed by lattice translation `pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlacedTile {
    pub proto: usize,
    pub rot: usize,
    pub pos: (i64, i64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometricSubstitution2D {
    pub name: String,
    pub kind: LatticeKind,
    pub prototiles: Vec<Prototile>,
    /// Image of each prototile at orientation 0; rotated and translated
    /// copies follow by equivariance.
    pub rules: Vec<Vec<PlacedTile>>,
}

impl GeometricSubstitution2D {
    pub fn new(
        name: String,
        kind: LatticeKind,
        prototiles: Vec<Prototile>,
        rules: Vec<Vec<PlacedTile>>,
    ) -> Result<Self, SubstitutionError> {
        if prototiles.is_empty() || rules.len() != prototiles.len() {
            return Err(SubstitutionError::BadGeometricRule(
                "rule count must match prototile count".into(),
            ));
        }
        for p in &prototiles {
            if p.cells.is_empty() {
                return Err(SubstitutionError::EmptyRule(p.label.clone()));
            }
            if p.cells.iter().any(|c| !c.kind_matches(kind)) {
                return Err(SubstitutionError::BadGeometricRule(format!(
                    "prototile {} has cells of the wrong lattice kind",
                    p.label
                )));
            }
        }
        let sub = GeometricSubstitution2D { name, kind, prototiles, rules };
        // exact cover: the rule cells must equal the inflated prototile
        // cells as multisets
        for (p, proto) in sub.prototiles.iter().enumerate() {
            let mut want: Vec<LatticeCell> =
                proto.cells.iter().flat_map(|c| c.scale2()).collect();
            want.sort_unstable();
            let mut got: Vec<LatticeCell> = sub.rules[p]
                .iter()
                .flat_map(|t| sub.cells_of(t))
                .collect();
            got.sort_unstable();
            if want != got {
                return Err(SubstitutionError::BadGeometricRule(format!(
                    "images of prototile {} do not cover its inflation exactly",
                    proto.label
                )));
            }
        }
        Ok(sub)
    }

    pub fn rotations(&self) -> usize {
        self.kind.rotations()
    }

    /// Tile types are (prototile, orientation) pairs.
    pub fn num_types(&self) -> usize {
        self.prototiles.len() * self.rotations()
    }

    pub fn type_of(&self, t: &PlacedTile) -> usize {
        t.proto * self.rotations() + t.rot
    }

    pub fn type_label(&self, ty: usize) -> String {
        let r = self.rotations();
        format!("{}@{}", self.prototiles[ty / r].label, ty % r)
    }

    pub fn cells_of(&self, t: &PlacedTile) -> Vec<LatticeCell> {
        self.prototiles[t.proto]
            .cells
            .iter()
            .map(|c| c.rot_k(self.kind, t.rot).translate(t.pos))
            .collect()
    }

    /// Image of one placed tile under the inflation.
    pub fn substitute_tile(&self, t: &PlacedTile) -> Vec<PlacedTile> {
        let r = self.rotations();
        self.rules[t.proto]
            .iter()
            .map(|s| {
                let spun = self.kind.rot_vec_k(s.pos, t.rot);
                PlacedTile {
                    proto: s.proto,
                    rot: (s.rot + t.rot) % r,
                    pos: (spun.0 + 2 * t.pos.0, spun.1 + 2 * t.pos.1),
                }
            })
            .collect()
    }

    pub fn substitute(&self, patch: &[PlacedTile]) -> Result<Vec<PlacedTile>, SubstitutionError> {
        let mut out = Vec::new();
        for t in patch {
            let image = self.substitute_tile(t);
            if out.len() + image.len() > MAX_TILES {
                return Err(SubstitutionError::TooLarge(MAX_TILES));
            }
            out.extend(image);
        }
        Ok(out)
    }

    pub fn iterate(
        &self,
        seed: &[PlacedTile],
        n: usize,
    ) -> Result<Vec<PlacedTile>, SubstitutionError> {
        let mut patch = seed.to_vec();
        for _ in 0..n {
            patch = self.substitute(&patch)?;
        }
        Ok(patch)
    }

    pub fn initial_patch(&self, proto: usize) -> Vec<PlacedTile> {
        vec![PlacedTile { proto, rot: 0, pos: (0, 0) }]
    }

    /// Transition matrix over tile types: entry (i, j) counts type-i tiles
    /// in the image of a type-j tile.
    pub fn matrix(&self) -> IntMat {
        let n = self.num_types();
        let r = self.rotations();
        let mut m = vec![vec![0u64; n]; n];
        for p in 0..self.prototiles.len() {
            for rot in 0..r {
                let j = p * r + rot;
                for im in self.substitute_tile(&PlacedTile { proto: p, rot, pos: (0, 0) }) {
                    m[self.type_of(&im)][j] += 1;
                }
            }
        }
        IntMat::from_u64(&m)
    }

    pub fn is_primitive(&self) -> bool {
        let n = self.num_types();
        let bound = if n <= 1 { 1 } else { (n - 1) * (n - 1) + 1 };
        let m = self.matrix();
        let mut p = m.clone();
        for _ in 0..bound {
            if p.is_positive() {
                return true;
            }
            p = p.mul(&m);
        }
        false
    }

    /// Labeled Delone set of tile centroids; window is the bounding box
    /// of the covered cells, parameters measured from the patch.
    pub fn to_delone(&self, patch: &[PlacedTile]) -> Result<DeloneSet<f64>, SubstitutionError> {
        if patch.is_empty() {
            return Err(SubstitutionError::EmptyRule("empty patch".into()));
        }
        let mut points = Vec::with_capacity(patch.len());
        let mut labels = Vec::with_capacity(patch.len());
        let mut corners: Vec<[f64; 2]> = Vec::new();
        for t in patch {
            let cells = self.cells_of(t);
            let mut c = [0.0, 0.0];
            for cell in &cells {
                let cc = cell.centroid(self.kind);
                c[0] += cc[0];
                c[1] += cc[1];
                for v in cell.vertices() {
                    corners.push(self.kind.to_plane(v));
                }
            }
            points.push(Point::new(vec![
                c[0] / cells.len() as f64,
                c[1] / cells.len() as f64,
            ]));
            labels.push(self.type_label(self.type_of(t)));
        }
        let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &corners {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        // r from the closest centroid pair, R from the worst covered corner
        let grid = SpatialGrid::new(&points, 4.0);
        let mut min_gap = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            for j in grid.near(&p.coords) {
                if j > i {
                    min_gap = min_gap.min(p.dist(&points[j]));
                }
            }
        }
        let mut cover = 0.0f64;
        for c in &corners {
            cover = cover.max(grid.nearest_dist(&[c[0], c[1]], &points));
        }
        DeloneSet::new(
            2,
            points,
            Some(labels),
            Window::new(min.to_vec(), max.to_vec()),
            (min_gap / 2.0).max(1e-9),
            cover * (1.0 + 1e-9) + 1e-9,
        )
        .map_err(|e| SubstitutionError::BadGeometricRule(e.to_string()))
    }

    /// Quotient cell complex of the tiling space together with the
    /// substitution-induced self-map metadata.
    pub fn anderson_putnam(&self) -> Result<ApComplex2D, SubstitutionError> {
        ApComplex2D::build(self)
    }
}

struct SpatialGrid {
    h: f64,
    map: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialGrid {
    fn new(points: &[Point<f64>], h: f64) -> Self {
        let mut map: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let k = ((p.coords[0] / h).floor() as i64, (p.coords[1] / h).floor() as i64);
            map.entry(k).or_default().push(i);
        }
        SpatialGrid { h, map }
    }

    fn near(&self, p: &[f64]) -> Vec<usize> {
        let (kx, ky) = ((p[0] / self.h).floor() as i64, (p[1] / self.h).floor() as i64);
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

    fn nearest_dist(&self, p: &[f64; 2], points: &[Point<f64>]) -> f64 {
        let mut best = f64::INFINITY;
        for j in self.near(p) {
            let q = &points[j].coords;
            best = best.min(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
        best
    }
}

// ---------------------------------------------------------------------------
// the quotient complex

/// Quotient complex of a 2D substitution: 2-cells are tile types, 1-cells
/// are glued boundary-edge classes, 0-cells are glued corner classes.
#[derive(Clone, Debug)]
pub struct ApComplex2D {
    pub complex: BranchedComplex,
    pub sub: GeometricSubstitution2D,
    /// (prototile, orientation) of each 2-cell.
    pub types: Vec<(usize, usize)>,
    /// Per tile type: its boundary edges in local coordinates, addressed
    /// as (edge class, sign relative to the class representative).
    pub slots: Vec<Vec<(DirEdge, usize, i64)>>,
    /// Distinct glued slot pairs seen per edge class (for the border
    /// forcing signatures).
    glued_pairs: Vec<BTreeSet<(usize, usize)>>,
    /// Flat slot id -> (type, local edge).
    slot_info: Vec<(usize, DirEdge)>,
}

impl ApComplex2D {
    fn build(sub: &GeometricSubstitution2D) -> Result<ApComplex2D, SubstitutionError> {
        let r = sub.rotations();
        let num_types = sub.num_types();
        // local boundary edges and vertices per type, in sorted order
        let mut type_edges: Vec<Vec<DirEdge>> = Vec::with_capacity(num_types);
        let mut type_vertices: Vec<Vec<Vertex>> = Vec::with_capacity(num_types);
        for ty in 0..num_types {
            let t = PlacedTile { proto: ty / r, rot: ty % r, pos: (0, 0) };
            let mut edges = boundary_edges(&sub.cells_of(&t));
            edges.sort_unstable();
            let mut vs: BTreeSet<Vertex> = BTreeSet::new();
            for e in &edges {
                vs.insert(e.0);
                vs.insert(e.1);
            }
            type_edges.push(edges);
            type_vertices.push(vs.into_iter().collect());
        }
        // flat slot ids
        let mut edge_slot_base = vec![0usize; num_types + 1];
        let mut vertex_slot_base = vec![0usize; num_types + 1];
        for ty in 0..num_types {
            edge_slot_base[ty + 1] = edge_slot_base[ty] + type_edges[ty].len();
            vertex_slot_base[ty + 1] = vertex_slot_base[ty] + type_vertices[ty].len();
        }
        let total_edge_slots = edge_slot_base[num_types];
        let total_vertex_slots = vertex_slot_base[num_types];
        let edge_slot = |ty: usize, e: &DirEdge| -> usize {
            edge_slot_base[ty] + type_edges[ty].binary_search(e).expect("known edge")
        };
        let vertex_slot = |ty: usize, v: &Vertex| -> usize {
            vertex_slot_base[ty] + type_vertices[ty].binary_search(v).expect("known vertex")
        };
        let slot_info: Vec<(usize, DirEdge)> = (0..num_types)
            .flat_map(|ty| type_edges[ty].iter().map(move |e| (ty, *e)))
            .collect();

        let mut edge_uf = SignedUnionFind::new(total_edge_slots);
        let mut vertex_uf = SignedUnionFind::new(total_vertex_slots);
        let mut glued: BTreeSet<(usize, usize)> = BTreeSet::new();

        // grow patches until the gluing stabilizes over two rounds
        let mut stable_rounds = 0;
        let mut last_counts = (0usize, 0usize);
        let mut patches: Vec<Vec<PlacedTile>> =
            (0..sub.prototiles.len()).map(|p| sub.initial_patch(p)).collect();
        for _round in 0..GLUE_ITERATION_CAP {
            for patch in patches.iter_mut() {
                *patch = sub.substitute(patch)?;
            }
            for patch in &patches {
                // global directed edge -> owning tile index
                let mut owner: HashMap<DirEdge, usize> = HashMap::new();
                let mut corners: HashMap<Vertex, Vec<usize>> = HashMap::new();
                for (i, t) in patch.iter().enumerate() {
                    let ty = sub.type_of(t);
                    for e in &type_edges[ty] {
                        let global = translate_edge(*e, t.pos);
                        owner.insert(global, i);
                        for v in [global.0, global.1] {
                            let vs = vertex_slot(ty, &(v.0 - t.pos.0, v.1 - t.pos.1));
                            corners.entry(v).or_default().push(vs);
                        }
                    }
                }
                for (e, &i) in &owner {
                    if let Some(&j) = owner.get(&reverse_edge(*e)) {
                        let (ti, tj) = (&patch[i], &patch[j]);
                        let (tyi, tyj) = (sub.type_of(ti), sub.type_of(tj));
                        let local_i = translate_edge(*e, (-ti.pos.0, -ti.pos.1));
                        let local_j =
                            translate_edge(reverse_edge(*e), (-tj.pos.0, -tj.pos.1));
                        let (si, sj) = (edge_slot(tyi, &local_i), edge_slot(tyj, &local_j));
                        // opposite traversal directions across a shared edge
                        edge_uf
                            .union(si, sj, -1)
                            .map_err(|_| SubstitutionError::OrientationConflict)?;
                        glued.insert((si.min(sj), si.max(sj)));
                    }
                }
                for slots in corners.values() {
                    for w in slots.windows(2) {
                        vertex_uf
                            .union(w[0], w[1], 1)
                            .map_err(|_| SubstitutionError::OrientationConflict)?;
                    }
                }
            }
            let counts = (edge_uf.class_count(), vertex_uf.class_count());
            if counts == last_counts {
                stable_rounds += 1;
                if stable_rounds >= 2 {
                    break;
                }
            } else {
                stable_rounds = 0;
                last_counts = counts;
            }
        }
        if stable_rounds < 2 {
            return Err(SubstitutionError::FactorsUndecided(GLUE_ITERATION_CAP));
        }

        // identified edges force their endpoints together
        let mut edge_class_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut class_rep: Vec<usize> = Vec::new();
        let mut slot_class = vec![(0usize, 0i64); total_edge_slots];
        for s in 0..total_edge_slots {
            let (root, sign) = edge_uf.find(s);
            let next = class_rep.len();
            let class = *edge_class_of.entry(root).or_insert_with(|| {
                class_rep.push(s);
                next
            });
            slot_class[s] = (class, sign);
        }
        // normalize signs relative to the first slot of each class
        for s in 0..total_edge_slots {
            let (class, sign) = slot_class[s];
            let (_, rep_sign) = edge_uf.find(class_rep[class]);
            slot_class[s].1 = sign * rep_sign;
        }
        for s in 0..total_edge_slots {
            let (class, sign) = slot_class[s];
            let rep = class_rep[class];
            let (ty_s, e_s) = slot_info[s];
            let (ty_r, e_r) = slot_info[rep];
            let (rs, rt) = (vertex_slot(ty_r, &e_r.0), vertex_slot(ty_r, &e_r.1));
            let (ss, st) = (vertex_slot(ty_s, &e_s.0), vertex_slot(ty_s, &e_s.1));
            let (a, b) = if sign == 1 { (ss, st) } else { (st, ss) };
            vertex_uf.union(a, rs, 1).map_err(|_| SubstitutionError::OrientationConflict)?;
            vertex_uf.union(b, rt, 1).map_err(|_| SubstitutionError::OrientationConflict)?;
        }

        let mut vertex_class_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vclass = vec![0usize; total_vertex_slots];
        for s in 0..total_vertex_slots {
            let (root, _) = vertex_uf.find(s);
            let next = vertex_class_of.len();
            vclass[s] = *vertex_class_of.entry(root).or_insert(next);
        }
        let num_edges = class_rep.len();
        let num_vertices = vertex_class_of.len();

        // boundary matrices and germ sides
        let mut d1 = vec![vec![0i64; num_edges]; num_vertices];
        for (class, &rep) in class_rep.iter().enumerate() {
            let (ty, e) = slot_info[rep];
            let src = vclass[vertex_slot(ty, &e.0)];
            let tgt = vclass[vertex_slot(ty, &e.1)];
            d1[tgt][class] += 1;
            d1[src][class] -= 1;
        }
        let mut d2 = vec![vec![0i64; num_types]; num_edges];
        let mut sides = vec![SidePair::default(); num_edges];
        for s in 0..total_edge_slots {
            let (class, sign) = slot_class[s];
            let (ty, _) = slot_info[s];
            d2[class][ty] += sign;
            if sign == 1 {
                sides[class].pos.push(Germ { cell: ty });
            } else {
                sides[class].neg.push(Germ { cell: ty });
            }
        }

        let complex = BranchedComplex {
            dim: 2,
            cells: vec![
                (0..num_vertices).map(|i| CellInfo { label: format!("v{i}") }).collect(),
                (0..num_edges).map(|i| CellInfo { label: format!("e{i}") }).collect(),
                (0..num_types).map(|ty| CellInfo { label: sub.type_label(ty) }).collect(),
            ],
            boundary: vec![d1, d2],
            regions: (0..num_types).collect(),
            num_regions: num_types,
            sides,
        };

        let mut glued_pairs: Vec<BTreeSet<(usize, usize)>> =
            vec![BTreeSet::new(); num_edges];
        for &(a, b) in &glued {
            glued_pairs[slot_class[a].0].insert((a, b));
        }
        let slots: Vec<Vec<(DirEdge, usize, i64)>> = (0..num_types)
            .map(|ty| {
                type_edges[ty]
                    .iter()
                    .map(|e| {
                        let s = edge_slot(ty, e);
                        (*e, slot_class[s].0, slot_class[s].1)
                    })
                    .collect()
            })
            .collect();
        let types: Vec<(usize, usize)> = (0..num_types).map(|ty| (ty / r, ty % r)).collect();
        Ok(ApComplex2D {
            complex,
            sub: sub.clone(),
            types,
            slots,
            glued_pairs,
            slot_info,
        })
    }

    /// The inflation-induced self-map with the metadata for the
    /// zoomed-out conditions.
    pub fn self_submersion(&self) -> (Submersion, AdjacencyData) {
        let r = self.sub.rotations();
        let num_types = self.types.len();
        let mut cell_map = Vec::with_capacity(num_types);
        let mut interior = Vec::with_capacity(num_types);
        for ty in 0..num_types {
            let t = PlacedTile { proto: ty / r, rot: ty % r, pos: (0, 0) };
            let image = self.sub.substitute_tile(&t);
            cell_map.push(image.iter().map(|s| self.sub.type_of(s)).collect::<Vec<_>>());
            // a sub-tile is interior when none of its boundary edges lies
            // on the boundary of the inflated tile
            let big: BTreeSet<DirEdge> = {
                let cells: Vec<LatticeCell> =
                    self.sub.cells_of(&t).iter().flat_map(|c| c.scale2()).collect();
                boundary_edges(&cells).into_iter().collect()
            };
            let any_interior = image.iter().any(|s| {
                boundary_edges(&self.sub.cells_of(s)).iter().all(|e| {
                    !big.contains(e) && !big.contains(&reverse_edge(*e))
                })
            });
            interior.push(any_interior);
        }
        // border forcing: fingerprint the image adjacency of each glued
        // slot pair; a class with two distinct fingerprints is ambiguous
        let mut junction: Vec<Vec<(usize, usize)>> =
            vec![Vec::new(); self.complex.cells[1].len()];
        for (class, pairs) in self.glued_pairs.iter().enumerate() {
            for &(a, b) in pairs {
                let sig = self.pair_signature(a, b);
                let fp = fingerprint(&sig);
                if !junction[class].contains(&fp) {
                    junction[class].push(fp);
                }
            }
        }
        let submersion = Submersion {
            source: self.complex.clone(),
            target: self.complex.clone(),
            cell_map,
        };
        let adjacency = AdjacencyData {
            interior_cell: Some(interior),
            junction_image_pairs: Some(junction),
        };
        (submersion, adjacency)
    }

    /// Image adjacency along a glued edge, oriented by the class
    /// representative: per sub-edge, the tile types on either side.
    fn pair_signature(&self, slot_a: usize, slot_b: usize) -> Vec<(usize, usize)> {
        let r = self.sub.rotations();
        let (ty_a, e_a) = self.slot_info[slot_a];
        let (ty_b, e_b) = self.slot_info[slot_b];
        let t1 = PlacedTile { proto: ty_a / r, rot: ty_a % r, pos: (0, 0) };
        // translate the second tile so its edge coincides (reversed)
        let delta = ((e_a.0).0 - (e_b.1).0, (e_a.0).1 - (e_b.1).1);
        let t2 = PlacedTile { proto: ty_b / r, rot: ty_b % r, pos: delta };
        let image1 = self.sub.substitute_tile(&t1);
        let image2 = self.sub.substitute_tile(&t2);
        let find_owner = |tiles: &[PlacedTile], e: &DirEdge| -> usize {
            for t in tiles {
                let local = translate_edge(*e, (-t.pos.0, -t.pos.1));
                let ty = self.sub.type_of(t);
                if self.slots[ty].iter().any(|(le, _, _)| le == &local) {
                    return ty;
                }
            }
            usize::MAX
        };
        // the doubled edge splits at the midpoint lattice vertex
        let s = ((e_a.0).0 * 2, (e_a.0).1 * 2);
        let m = ((e_a.0).0 + (e_a.1).0, (e_a.0).1 + (e_a.1).1);
        let t = ((e_a.1).0 * 2, (e_a.1).1 * 2);
        let mut sig = Vec::with_capacity(2);
        for sub_edge in [(s, m), (m, t)] {
            let left = find_owner(&image1, &sub_edge);
            let right = find_owner(&image2, &reverse_edge(sub_edge));
            sig.push((left, right));
        }
        // orient along the class representative direction
        let (class, sign) = {
            let local = self.slots[ty_a].iter().find(|(le, _, _)| le == &e_a).unwrap();
            (local.1, local.2)
        };
        let _ = class;
        if sign == -1 {
            sig.reverse();
            for p in sig.iter_mut() {
                *p = (p.1, p.0);
            }
        }
        sig
    }
}

/// FNV-style fold of a signature into a pair of machine words.
fn fingerprint(sig: &[(usize, usize)]) -> (usize, usize) {
    let mut h1: u64 = 0xcbf29ce484222325;
    let mut h2: u64 = 0x9e3779b97f4a7c15;
    for &(a, b) in sig {
        for v in [a as u64, b as u64] {
            h1 = (h1 ^ v).wrapping_mul(0x100000001b3);
            h2 = h2.rotate_left(13).wrapping_add(v).wrapping_mul(0x2545f4914f6cdd1d);
        }
    }
    (h1 as usize, h2 as usize)
}

/// Union-find with a sign (Z/2 weight) on each element relative to its
/// root; unions carry a required relative sign and report conflicts.
struct SignedUnionFind {
    parent: Vec<usize>,
    sign: Vec<i64>,
}

struct SignConflict;

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind { parent: (0..n).collect(), sign: vec![1; n] }
    }

    fn find(&mut self, x: usize) -> (usize, i64) {
        if self.parent[x] == x {
            return (x, 1);
        }
        let (root, s) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.sign[x] *= s;
        (root, self.sign[x])
    }

    /// Enforce sign(a) * sign(b) = rel.
    fn union(&mut self, a: usize, b: usize, rel: i64) -> Result<(), SignConflict> {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            if sa * sb != rel {
                return Err(SignConflict);
            }
            return Ok(());
        }
        // attach rb under ra with the sign making the relation hold
        self.parent[rb] = ra;
        self.sign[rb] = sa * sb * rel;
        Ok(())
    }

    fn class_count(&mut self) -> usize {
        let n = self.parent.len();
        let mut roots = BTreeSet::new();
        for x in 0..n {
            let (r, _) = self.find(x);
            roots.insert(r);
        }
        roots.len()
    }
}
