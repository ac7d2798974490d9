//! Dense bit-packed matrices over Z/2.
//!
//! The column reduction wants fast column additions and per-column pivot
//! lookups, the row reduction the transposed analogue, so there is one type
//! per orientation. Both keep their full size; deletions in the reduction
//! algorithms are masks maintained by the caller.

/// Bit-packed square matrix over Z/2, stored column-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2Cols {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl Mod2Cols {
    pub fn zero(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Mod2Cols {
            n,
            words,
            data: vec![0; words * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.toggle(i, i);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn col(&self, j: usize) -> &[u64] {
        &self.data[j * self.words..(j + 1) * self.words]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.col(j)[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        self.data[j * self.words + i / 64] ^= 1 << (i % 64);
    }

    /// Adds column `src` into column `dst` (mod 2).
    pub fn add_col(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let w = self.words;
        let (s, d) = (src * w, dst * w);
        if s < d {
            let (lo, hi) = self.data.split_at_mut(d);
            for (x, y) in hi[..w].iter_mut().zip(&lo[s..s + w]) {
                *x ^= y;
            }
        } else {
            let (lo, hi) = self.data.split_at_mut(s);
            for (x, y) in lo[d..d + w].iter_mut().zip(&hi[..w]) {
                *x ^= y;
            }
        }
    }

    /// Highest set row index of column `j`, if any.
    pub fn col_low(&self, j: usize) -> Option<usize> {
        let col = self.col(j);
        for w in (0..self.words).rev() {
            if col[w] != 0 {
                return Some(w * 64 + 63 - col[w].leading_zeros() as usize);
            }
        }
        None
    }

    pub fn col_is_zero(&self, j: usize) -> bool {
        self.col(j).iter().all(|&w| w == 0)
    }

    /// Row indices of the set bits in column `j`, ascending.
    pub fn col_ones(&self, j: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.col(j).iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                out.push(w * 64 + b);
                word &= word - 1;
            }
        }
        out
    }

    /// Column indices with a set bit in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `self * other`, both column-major.
    pub fn multiply(&self, other: &Mod2Cols) -> Mod2Cols {
        assert_eq!(self.n, other.n);
        let mut out = Mod2Cols::zero(self.n);
        for j in 0..self.n {
            for k in other.col_ones(j) {
                for w in 0..self.words {
                    out.data[j * self.words + w] ^= self.col(k)[w];
                }
            }
        }
        out
    }
}

/// Bit-packed square matrix over Z/2, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2Rows {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl Mod2Rows {
    pub fn zero(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Mod2Rows {
            n,
            words,
            data: vec![0; words * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.toggle(i, i);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] ^= 1 << (j % 64);
    }

    /// Adds row `src` into row `dst` (mod 2).
    pub fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let w = self.words;
        let (s, d) = (src * w, dst * w);
        if s < d {
            let (lo, hi) = self.data.split_at_mut(d);
            for (x, y) in hi[..w].iter_mut().zip(&lo[s..s + w]) {
                *x ^= y;
            }
        } else {
            let (lo, hi) = self.data.split_at_mut(s);
            for (x, y) in lo[d..d + w].iter_mut().zip(&hi[..w]) {
                *x ^= y;
            }
        }
    }

    /// Lowest set column index of row `i`, if any.
    pub fn row_first(&self, i: usize) -> Option<usize> {
        for (w, &word) in self.row(i).iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&w| w == 0)
    }

    /// Column indices of the set bits in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.row(i).iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                out.push(w * 64 + b);
                word &= word - 1;
            }
        }
        out
    }

    /// Row indices with a set bit in column `j`, ascending.
    pub fn col_ones(&self, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `self * other`, both row-major.
    pub fn multiply(&self, other: &Mod2Rows) -> Mod2Rows {
        assert_eq!(self.n, other.n);
        let mut out = Mod2Rows::zero(self.n);
        for i in 0..self.n {
            for k in self.row_ones(i) {
                for w in 0..self.words {
                    out.data[i * self.words + w] ^= other.row(k)[w];
                }
            }
        }
        out
    }

    pub fn to_cols(&self) -> Mod2Cols {
        let mut out = Mod2Cols::zero(self.n);
        for i in 0..self.n {
            for j in self.row_ones(i) {
                out.toggle(i, j);
            }
        }
        out
    }
}

impl Mod2Cols {
    pub fn to_rows(&self) -> Mod2Rows {
        let mut out = Mod2Rows::zero(self.n);
        for j in 0..self.n {
            for i in self.col_ones(j) {
                out.toggle(i, j);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_col_is_involutive() {
        let mut m = Mod2Cols::zero(130);
        m.toggle(0, 3);
        m.toggle(128, 3);
        m.toggle(65, 7);
        let before = m.clone();
        m.add_col(3, 7);
        assert!(m.get(0, 7) && m.get(128, 7) && m.get(65, 7));
        m.add_col(3, 7);
        assert_eq!(m, before);
    }

    #[test]
    fn add_row_is_involutive() {
        let mut m = Mod2Rows::zero(130);
        m.toggle(3, 0);
        m.toggle(3, 128);
        m.toggle(7, 65);
        let before = m.clone();
        m.add_row(3, 7);
        m.add_row(3, 7);
        assert_eq!(m, before);
        m.add_row(7, 3);
        assert!(m.get(3, 65));
        m.add_row(7, 3);
        assert_eq!(m, before);
    }

    #[test]
    fn lows_and_firsts() {
        let mut c = Mod2Cols::zero(70);
        assert_eq!(c.col_low(0), None);
        c.toggle(2, 0);
        c.toggle(69, 0);
        assert_eq!(c.col_low(0), Some(69));
        assert_eq!(c.col_ones(0), vec![2, 69]);

        let mut r = Mod2Rows::zero(70);
        assert_eq!(r.row_first(1), None);
        r.toggle(1, 68);
        r.toggle(1, 5);
        assert_eq!(r.row_first(1), Some(5));
        assert_eq!(r.row_ones(1), vec![5, 68]);
    }

    #[test]
    fn multiply_identity() {
        let mut m = Mod2Cols::zero(9);
        m.toggle(1, 2);
        m.toggle(8, 5);
        let id = Mod2Cols::identity(9);
        assert_eq!(m.multiply(&id), m);
        assert_eq!(id.multiply(&m), m);

        let r = m.to_rows();
        let idr = Mod2Rows::identity(9);
        assert_eq!(r.multiply(&idr), r);
        assert_eq!(idr.multiply(&r), r);
        assert_eq!(r.to_cols(), m);
    }
}
