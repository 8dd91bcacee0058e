//! One-dimensional symbolic substitutions: iteration, language factors,
//! cell complexes of the quotient space, collaring, and the induced
//! self-maps.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::complex::BranchedComplex;
use crate::geometry::{DeloneSet, Point, Window};
use crate::linalg::{IntMat, Rat};
use crate::tower::{AdjacencyData, Submersion};
use crate::words::{factors, Word};

use super::{SubstitutionError, FACTOR_ITERATION_CAP, MAX_TILES};

#[derive(Clone, Debug)]
pub struct Substitution1D {
    pub alphabet: Vec<String>,
    /// rules[a] is the image word of letter a.
    pub rules: Vec<Word>,
    /// Natural tile lengths (left Perron eigenvector, smallest entry 1).
    pub lengths: Vec<f64>,
    /// For collared substitutions: the underlying letter of each symbol.
    pub core_map: Option<Vec<usize>>,
}

impl Substitution1D {
    pub fn new(alphabet: Vec<String>, rules: Vec<Word>) -> Result<Self, SubstitutionError> {
        let n = alphabet.len();
        if n == 0 {
            return Err(SubstitutionError::EmptyRule("empty alphabet".into()));
        }
        for (a, w) in rules.iter().enumerate() {
            if w.is_empty() {
                return Err(SubstitutionError::EmptyRule(alphabet[a].clone()));
            }
            for &b in w {
                if b as usize >= n {
                    return Err(SubstitutionError::UnknownSymbol(format!("{b}")));
                }
            }
        }
        if rules.len() != n {
            return Err(SubstitutionError::EmptyRule("rule count != alphabet size".into()));
        }
        let mut sub = Substitution1D { alphabet, rules, lengths: vec![1.0; n], core_map: None };
        sub.lengths = sub.natural_lengths();
        Ok(sub)
    }

    pub fn with_lengths(mut self, lengths: Vec<f64>) -> Self {
        assert_eq!(lengths.len(), self.alphabet.len());
        self.lengths = lengths;
        self
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    /// Substitution matrix M with M[a][b] = occurrences of a in rules[b].
    pub fn matrix(&self) -> IntMat {
        let n = self.size();
        let mut m = vec![vec![0u64; n]; n];
        for (b, w) in self.rules.iter().enumerate() {
            for &a in w {
                m[a as usize][b] += 1;
            }
        }
        IntMat::from_u64(&m)
    }

    /// Primitivity: some power of the substitution matrix is positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
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

    /// Perron eigenvalue and the right eigenvector normalized to sum 1
    /// (letter frequencies), by power iteration.
    pub fn perron(&self) -> (f64, Vec<f64>) {
        let n = self.size();
        let m = self.matrix();
        let mf: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| big_to_f64(&m.data[i][j])).collect())
            .collect();
        power_iteration(&mf)
    }

    /// Left Perron eigenvector scaled so the smallest entry is 1.
    fn natural_lengths(&self) -> Vec<f64> {
        let n = self.size();
        let m = self.matrix();
        // transpose for the left eigenvector
        let mt: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| big_to_f64(&m.data[j][i])).collect())
            .collect();
        let (_, mut v) = power_iteration(&mt);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            for x in v.iter_mut() {
                *x /= min;
            }
        }
        v
    }

    pub fn apply(&self, w: &Word) -> Result<Word, SubstitutionError> {
        let mut out = Word::new();
        for &a in w {
            let image = &self.rules[a as usize];
            if out.len() + image.len() > MAX_TILES {
                return Err(SubstitutionError::TooLarge(MAX_TILES));
            }
            out.extend_from_slice(image);
        }
        Ok(out)
    }

    /// n-fold image of a single seed letter.
    pub fn iterate(&self, seed: u8, n: usize) -> Result<Word, SubstitutionError> {
        if seed as usize >= self.size() {
            return Err(SubstitutionError::UnknownSymbol(format!("{seed}")));
        }
        let mut w = vec![seed];
        for _ in 0..n {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// All length-`len` factors of the substitution language, found by
    /// iterating until the factor set stabilizes over two consecutive
    /// rounds.
    pub fn language_factors(&self, len: usize) -> Result<BTreeSet<Word>, SubstitutionError> {
        let mut prev: Option<BTreeSet<Word>> = None;
        let mut words: Vec<Word> = (0..self.size() as u8).map(|a| vec![a]).collect();
        for _ in 0..FACTOR_ITERATION_CAP {
            for w in words.iter_mut() {
                *w = self.apply(w)?;
            }
            let mut cur = BTreeSet::new();
            for w in &words {
                cur.extend(factors(w, len));
            }
            if prev.as_ref() == Some(&cur) {
                return Ok(cur);
            }
            prev = Some(cur);
        }
        Err(SubstitutionError::FactorsUndecided(FACTOR_ITERATION_CAP))
    }

    /// Labeled Delone set of tile left endpoints for sigma^n(seed), using
    /// the natural lengths, with window [0, total length].
    pub fn to_delone(&self, seed: u8, n: usize) -> Result<DeloneSet<f64>, SubstitutionError> {
        let w = self.iterate(seed, n)?;
        let mut points = Vec::with_capacity(w.len());
        let mut labels = Vec::with_capacity(w.len());
        let mut pos = 0.0f64;
        for &a in &w {
            points.push(Point::new(vec![pos]));
            labels.push(self.alphabet[a as usize].clone());
            pos += self.lengths[a as usize];
        }
        let min_len = self.lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_len = self.lengths.iter().cloned().fold(0.0f64, f64::max);
        DeloneSet::new(
            1,
            points,
            Some(labels),
            Window::new(vec![0.0], vec![pos]),
            min_len / 2.0,
            max_len,
        )
        .map_err(|e| SubstitutionError::EmptyRule(e.to_string()))
    }

    /// Collared substitution: letters are occurring triples
    /// (left neighbor, core, right neighbor); the image of a triple reads
    /// off local context inside sigma(left) sigma(core) sigma(right).
    pub fn collar(&self) -> Result<Substitution1D, SubstitutionError> {
        let triples: Vec<Word> = self.language_factors(3)?.into_iter().collect();
        let index: BTreeMap<Word, u8> = triples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u8))
            .collect();
        let mut rules: Vec<Word> = Vec::with_capacity(triples.len());
        for t in &triples {
            let (l, x, r) = (t[0], t[1], t[2]);
            let u = &self.rules[l as usize];
            let w = &self.rules[x as usize];
            let v = &self.rules[r as usize];
            let mut image = Word::new();
            for i in 0..w.len() {
                let left = if i == 0 { *u.last().unwrap() } else { w[i - 1] };
                let right = if i + 1 < w.len() { w[i + 1] } else { v[0] };
                let key = vec![left, w[i], right];
                let idx = index
                    .get(&key)
                    .ok_or_else(|| SubstitutionError::UnknownSymbol(format!("{key:?}")))?;
                image.push(*idx);
            }
            rules.push(image);
        }
        let alphabet: Vec<String> = triples
            .iter()
            .map(|t| {
                format!(
                    "{}.{}.{}",
                    self.alphabet[t[0] as usize],
                    self.alphabet[t[1] as usize],
                    self.alphabet[t[2] as usize]
                )
            })
            .collect();
        let core_map: Vec<usize> = triples.iter().map(|t| t[1] as usize).collect();
        let lengths: Vec<f64> = core_map.iter().map(|&c| self.lengths[c]).collect();
        let mut sub = Substitution1D::new(alphabet, rules)?;
        sub.lengths = lengths;
        sub.core_map = Some(core_map);
        Ok(sub)
    }

    /// Sum collared frequencies back to the underlying alphabet.
    pub fn project_to_core(&self, freqs: &[Rat], core_size: usize) -> Vec<Rat> {
        let Some(core) = &self.core_map else {
            return freqs.to_vec();
        };
        let mut out = vec![BigRational::from_integer(0.into()); core_size];
        for (i, f) in freqs.iter().enumerate() {
            out[core[i]] += f;
        }
        out
    }

    /// Occurring two-letter factors.
    pub fn adjacent_pairs(&self) -> Result<Vec<(u8, u8)>, SubstitutionError> {
        Ok(self
            .language_factors(2)?
            .into_iter()
            .map(|w| (w[0], w[1]))
            .collect())
    }
}

fn big_to_f64(x: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::MAX)
}

fn power_iteration(m: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 1.0;
    for _ in 0..500 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                w[i] += m[i][j] * v[j];
            }
        }
        let s: f64 = w.iter().sum();
        if s == 0.0 {
            return (0.0, v);
        }
        lambda = s;
        for x in w.iter_mut() {
            *x /= s;
        }
        v = w;
    }
    (lambda, v)
}

// ---------------------------------------------------------------------------
// the cell complex of the substitution

/// Cell complex whose edges are the letters (one loop or arc per letter)
/// and whose vertices are the letter junctions glued along occurring
/// two-letter factors.
#[derive(Clone, Debug)]
pub struct ApComplex1D {
    pub complex: BranchedComplex,
    /// The substitution whose letters index the edges (the collared one
    /// when built with collaring).
    pub sub: Substitution1D,
    /// Vertex class of each letter's initial point.
    pub initial_vertex: Vec<usize>,
    /// Vertex class of each letter's terminal point.
    pub terminal_vertex: Vec<usize>,
    /// Occurring two-letter factors (u, v): u may be followed by v.
    pub pairs: Vec<(u8, u8)>,
}

/// Build the complex for the substitution, optionally collaring first.
pub fn anderson_putnam(
    sub: &Substitution1D,
    collared: bool,
) -> Result<ApComplex1D, SubstitutionError> {
    let eff = if collared { sub.collar()? } else { sub.clone() };
    let n = eff.size();
    let pairs = eff.adjacent_pairs()?;
    // union-find over 2n endpoint slots: initial(a) = a, terminal(a) = n + a
    let mut uf = UnionFind::new(2 * n);
    for &(u, v) in &pairs {
        uf.union(n + u as usize, v as usize);
    }
    // compress to contiguous vertex ids in first-seen slot order
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut slot_vertex = vec![0usize; 2 * n];
    for slot in 0..2 * n {
        let root = uf.find(slot);
        let next = ids.len();
        let id = *ids.entry(root).or_insert(next);
        slot_vertex[slot] = id;
    }
    let initial_vertex: Vec<usize> = (0..n).map(|a| slot_vertex[a]).collect();
    let terminal_vertex: Vec<usize> = (0..n).map(|a| slot_vertex[n + a]).collect();
    let edges: Vec<(&str, usize, usize)> = (0..n)
        .map(|a| (eff.alphabet[a].as_str(), initial_vertex[a], terminal_vertex[a]))
        .collect();
    let complex = BranchedComplex::graph(ids.len(), &edges);
    Ok(ApComplex1D { complex, sub: eff, initial_vertex, terminal_vertex, pairs })
}

impl ApComplex1D {
    /// The substitution-induced self-map of the complex together with the
    /// adjacency metadata used by the tower conditions.
    pub fn self_submersion(&self) -> (Submersion, AdjacencyData) {
        let n = self.sub.size();
        let cell_map: Vec<Vec<usize>> = self
            .sub
            .rules
            .iter()
            .map(|w| w.iter().map(|&a| a as usize).collect())
            .collect();
        // images are interior when the edge path has length >= 3
        let interior: Vec<bool> = cell_map.iter().map(|w| w.len() >= 3).collect();
        // junction pairs grouped per vertex class: images of the adjacent
        // edges around each junction
        let num_vertices = self.complex.cells[0].len();
        let mut junction: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_vertices];
        for &(u, v) in &self.pairs {
            let vertex = self.terminal_vertex[u as usize];
            let last = *self.sub.rules[u as usize].last().unwrap() as usize;
            let first = self.sub.rules[v as usize][0] as usize;
            junction[vertex].push((last, first));
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
        let _ = n;
        (submersion, adjacency)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::registry::builtin;
    use crate::tower::{induced_matrix, zoomed_out_check, Condition};

    fn fib() -> Substitution1D {
        builtin("fibonacci").unwrap().into_1d().unwrap()
    }

    #[test]
    fn fibonacci_basics() {
        let s = fib();
        assert!(s.is_primitive());
        let w = s.iterate(0, 5).unwrap();
        assert_eq!(w.len(), 13);
        let (lambda, freq) = s.perron();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((lambda - phi).abs() < 1e-9);
        assert!((freq[0] - 1.0 / phi).abs() < 1e-9);
        assert!((freq[1] - 1.0 / (phi * phi)).abs() < 1e-9);
        assert!((s.lengths[0] - phi).abs() < 1e-9);
        assert!((s.lengths[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fibonacci_language() {
        let s = fib();
        let f2 = s.language_factors(2).unwrap();
        // aa, ab, ba occur; bb does not
        assert_eq!(f2.len(), 3);
        assert!(!f2.contains(&vec![1u8, 1u8]));
        let f3 = s.language_factors(3).unwrap();
        assert_eq!(f3.len(), 4);
    }

    #[test]
    fn fibonacci_uncollared_complex_is_wedge_of_circles() {
        let s = fib();
        let ap = anderson_putnam(&s, false).unwrap();
        assert_eq!(ap.complex.cells[0].len(), 1);
        assert_eq!(ap.complex.cells[1].len(), 2);
        // both edges are loops at the single vertex
        assert_eq!(ap.initial_vertex, vec![0, 0]);
        assert_eq!(ap.terminal_vertex, vec![0, 0]);
    }

    #[test]
    fn fibonacci_collared() {
        let s = fib();
        let c = s.collar().unwrap();
        assert_eq!(c.size(), 4);
        assert!(c.is_primitive());
        let (lambda, _) = c.perron();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((lambda - phi).abs() < 1e-9);
        // triples in lexicographic order
        assert_eq!(c.alphabet, vec!["a.a.b", "a.b.a", "b.a.a", "b.a.b"]);
        // sigma-hat images verified by hand from local contexts
        assert_eq!(c.rules[0], vec![3, 1]); // aab -> bab, aba
        assert_eq!(c.rules[1], vec![2]); // aba -> baa
        assert_eq!(c.rules[2], vec![0, 1]); // baa -> aab, aba
        assert_eq!(c.rules[3], vec![0, 1]); // bab -> aab, aba
        assert_eq!(c.core_map, Some(vec![0, 1, 0, 0]));
    }

    #[test]
    fn fibonacci_border_forcing_after_collaring() {
        let s = fib();
        let plain = anderson_putnam(&s, false).unwrap();
        let (sub_plain, adj_plain) = plain.self_submersion();
        let report = zoomed_out_check(&sub_plain, &adj_plain);
        assert_eq!(report.conditions[3], Condition::False);

        let collared = anderson_putnam(&s, true).unwrap();
        assert_eq!(collared.complex.cells[0].len(), 3);
        let (sub_c, adj_c) = collared.self_submersion();
        let rep = zoomed_out_check(&sub_c, &adj_c);
        assert_eq!(rep.conditions[0], Condition::True);
        assert_eq!(rep.conditions[1], Condition::True);
        assert_eq!(rep.conditions[3], Condition::True, "{:?}", rep.details);
    }

    #[test]
    fn induced_matrix_matches_substitution_matrix() {
        let s = fib();
        let ap = anderson_putnam(&s, false).unwrap();
        let (sub, _) = ap.self_submersion();
        let m = induced_matrix(&sub).unwrap();
        assert_eq!(m.a.0, s.matrix());
    }

    #[test]
    fn thue_morse_factors() {
        let s = builtin("thue_morse").unwrap().into_1d().unwrap();
        // the Thue-Morse word is cube-free: aaa and bbb never occur
        let f3 = s.language_factors(3).unwrap();
        assert!(!f3.contains(&vec![0u8, 0, 0]));
        assert!(!f3.contains(&vec![1u8, 1, 1]));
        assert_eq!(f3.len(), 6);
    }

    #[test]
    fn delone_output_is_geometric() {
        let s = fib();
        let x = s.to_delone(0, 8).unwrap();
        assert_eq!(x.points.len(), 55);
        let report = crate::geometry::verify_delone(&x);
        assert!(report.uniform_discrete);
        assert!(report.relatively_dense);
        // three translation classes of Voronoi cells, from the gap pairs
        let d = crate::geometry::voronoi_diagram(&x).unwrap();
        let classes = crate::geometry::voronoi_translation_classes(&d, &x.points, 1e-9);
        assert_eq!(classes.len(), 3);
    }

    #[test]
    fn bad_rule_rejected() {
        let err = Substitution1D::new(vec!["a".into()], vec![vec![1u8]]);
        assert!(matches!(err, Err(SubstitutionError::UnknownSymbol(_))));
        let err = Substitution1D::new(vec!["a".into()], vec![vec![]]);
        assert!(matches!(err, Err(SubstitutionError::EmptyRule(_))));
    }

    #[test]
    fn non_primitive_detected() {
        let s = Substitution1D::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 0], vec![1, 1]],
        )
        .unwrap();
        assert!(!s.is_primitive());
    }
}
