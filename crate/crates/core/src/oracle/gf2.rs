//! Bit-packed GF(2) rows and incremental Gaussian elimination.

use std::fmt;

const WORD: usize = 64;

/// Fixed-width bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    width: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(width: usize) -> Self {
        BitRow { width, words: vec![0; width.div_ceil(WORD)] }
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(width: usize, ones: I) -> Self {
        let mut row = Self::zeros(width);
        for i in ones {
            row.flip(i);
        }
        row
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        assert_eq!(self.width, other.width, "row widths differ");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Lowest set index.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(move |&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row basis kept in echelon form; each row remembers which inserted rows it
/// combines so membership queries can return a witness.
#[derive(Debug, Clone)]
pub struct Basis {
    width: usize,
    inserted: usize,
    rows: Vec<(usize, BitRow, Vec<usize>)>,
}

impl Basis {
    pub fn new(width: usize) -> Self {
        Basis { width, inserted: 0, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, row: &mut BitRow, combo: &mut Vec<usize>) {
        for (pivot, basis_row, basis_combo) in &self.rows {
            if row.get(*pivot) {
                row.xor_assign(basis_row);
                toggle_all(combo, basis_combo);
            }
        }
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn insert(&mut self, row: BitRow) -> bool {
        assert_eq!(row.width(), self.width);
        let mut row = row;
        let mut combo = vec![self.inserted];
        self.inserted += 1;
        self.reduce(&mut row, &mut combo);
        match row.first_one() {
            Some(pivot) => {
                self.rows.push((pivot, row, combo));
                true
            }
            None => false,
        }
    }

    /// Indices of inserted rows whose XOR equals `target`, if it lies in the span.
    pub fn express(&self, target: &BitRow) -> Option<Vec<usize>> {
        let mut row = target.clone();
        let mut combo = Vec::new();
        self.reduce(&mut row, &mut combo);
        if row.is_zero() {
            combo.sort_unstable();
            Some(combo)
        } else {
            None
        }
    }
}

fn toggle_all(acc: &mut Vec<usize>, items: &[usize]) {
    for &x in items {
        match acc.iter().position(|&y| y == x) {
            Some(p) => {
                acc.swap_remove(p);
            }
            None => acc.push(x),
        }
    }
}

/// Rows of equal width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    width: usize,
    rows: Vec<BitRow>,
}

impl Gf2Matrix {
    pub fn new(width: usize) -> Self {
        Gf2Matrix { width, rows: Vec::new() }
    }

    pub fn push(&mut self, row: BitRow) {
        assert_eq!(row.width(), self.width, "row widths differ");
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn basis(&self) -> Basis {
        let mut basis = Basis::new(self.width);
        for r in &self.rows {
            basis.insert(r.clone());
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.basis().rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_of_small_matrices() {
        let mut m = Gf2Matrix::new(3);
        m.push(BitRow::from_ones(3, [0, 1]));
        m.push(BitRow::from_ones(3, [1, 2]));
        m.push(BitRow::from_ones(3, [0, 2]));
        assert_eq!(m.rank(), 2);
        m.push(BitRow::from_ones(3, [0]));
        assert_eq!(m.rank(), 3);
        assert_eq!(Gf2Matrix::new(5).rank(), 0);
    }

    #[test]
    fn express_returns_witness() {
        let mut b = Basis::new(70);
        b.insert(BitRow::from_ones(70, [0, 65]));
        b.insert(BitRow::from_ones(70, [65, 69]));
        b.insert(BitRow::from_ones(70, [3]));
        assert_eq!(b.express(&BitRow::from_ones(70, [0, 69])), Some(vec![0, 1]));
        assert_eq!(b.express(&BitRow::from_ones(70, [0])), None);
        assert_eq!(b.express(&BitRow::zeros(70)), Some(vec![]));
    }

    #[test]
    fn bit_operations() {
        let mut r = BitRow::zeros(130);
        r.set(129, true);
        r.set(64, true);
        assert_eq!(r.first_one(), Some(64));
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![64, 129]);
        r.set(64, false);
        assert_eq!(r.count_ones(), 1);
    }

    fn rows_strategy() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
        (1usize..80).prop_flat_map(|w| (Just(w), prop::collection::vec(prop::collection::vec(0..w, 0..6), 0..12)))
    }

    proptest! {
        #[test]
        fn rank_is_invariant_under_row_shuffle((w, rows) in rows_strategy(), seed in any::<u64>()) {
            let mut m = Gf2Matrix::new(w);
            for r in &rows { m.push(BitRow::from_ones(w, r.iter().copied())); }
            let mut shuffled: Vec<BitRow> = m.rows().to_vec();
            // deterministic Fisher-Yates from the seed
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut m2 = Gf2Matrix::new(w);
            for r in shuffled { m2.push(r); }
            prop_assert_eq!(m.rank(), m2.rank());
        }

        #[test]
        fn witnesses_reproduce_target((w, rows) in rows_strategy(), pick in prop::collection::vec(any::<bool>(), 12)) {
            let rows: Vec<BitRow> = rows.iter().map(|r| BitRow::from_ones(w, r.iter().copied())).collect();
            let mut target = BitRow::zeros(w);
            for (r, &p) in rows.iter().zip(&pick) { if p { target.xor_assign(r); } }
            let mut basis = Basis::new(w);
            for r in &rows { basis.insert(r.clone()); }
            let combo = basis.express(&target).expect("target is in the span by construction");
            let mut acc = BitRow::zeros(w);
            for k in combo { acc.xor_assign(&rows[k]); }
            prop_assert_eq!(acc, target);
        }
    }
}
