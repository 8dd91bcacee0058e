//! Finite-word utilities for symbolic substitutions: factor enumeration
//! with stabilization detection, occurrence scanning, letter statistics.

use std::collections::BTreeSet;

/// Word over symbol indices.
pub type Word = Vec<u8>;

/// All factors (contiguous subwords) of `w` of length `len`.
pub fn factors(w: &[u8], len: usize) -> BTreeSet<Word> {
    if len == 0 || w.len() < len {
        return BTreeSet::new();
    }
    w.windows(len).map(|f| f.to_vec()).collect()
}

/// Occurrence count of each symbol in `0..alphabet_size`.
pub fn letter_counts(w: &[u8], alphabet_size: usize) -> Vec<u64> {
    let mut counts = vec![0u64; alphabet_size];
    for &c in w {
        counts[c as usize] += 1;
    }
    counts
}

/// Start positions of every occurrence of `factor` in `w`.
pub fn occurrences(w: &[u8], factor: &[u8]) -> Vec<usize> {
    if factor.is_empty() || w.len() < factor.len() {
        return Vec::new();
    }
    (0..=w.len() - factor.len()).filter(|&i| &w[i..i + factor.len()] == factor).collect()
}

/// Smallest window length `L` such that every length-`L` window of `w`
/// contains an occurrence of `factor`; `None` if `factor` never occurs or
/// the word is too short to certify.
pub fn repetitivity_window(w: &[u8], factor: &[u8]) -> Option<usize> {
    let occ = occurrences(w, factor);
    if occ.is_empty() {
        return None;
    }
    // Largest gap between consecutive occurrence starts, counting the ends.
    let mut worst = occ[0] + factor.len();
    for pair in occ.windows(2) {
        worst = worst.max(pair[1] - pair[0] + factor.len() - 1);
    }
    worst = worst.max(w.len() - occ.last().unwrap());
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_enumeration() {
        // abaab
        let w = vec![0u8, 1, 0, 0, 1];
        let fs = factors(&w, 2);
        let expect: BTreeSet<Word> =
            [vec![0, 1], vec![1, 0], vec![0, 0]].into_iter().collect();
        assert_eq!(fs, expect);
    }

    #[test]
    fn occurrence_scan() {
        let w = vec![0u8, 1, 0, 0, 1, 0];
        assert_eq!(occurrences(&w, &[0, 1]), vec![0, 3]);
    }

    #[test]
    fn repetitivity_of_letter() {
        // every 3 consecutive letters of abaababa... contain b
        let w = vec![0u8, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1];
        assert_eq!(repetitivity_window(&w, &[1]), Some(3));
    }

    #[test]
    fn missing_factor() {
        assert_eq!(repetitivity_window(&[0, 0, 0], &[1]), None);
    }
}
