//! Bit-packed GF(2) vectors, matrices, and the systematic-form reduction
//! used by reliability-ordered decoding.
//!
//! Matrices are stored row-major as `u64` words; all bits past the logical
//! column count are kept at zero so word-level equality and popcounts are
//! meaningful. Positions are 0-based in the API and rendered 1-based in
//! error messages.

use std::fmt;
use thiserror::Error;

/// Errors from GF(2) matrix/permutation operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    /// Operand shapes do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Matrix does not have full row rank; the 1-based pivot row that failed.
    #[error("matrix is rank deficient: no independent column available for pivot row {pivot}")]
    RankDeficient { pivot: usize },
    /// An index map that is not a bijection.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of a `len`-bit row.
fn tail_mask(len: usize) -> u64 {
    let rem = len % WORD_BITS;
    if rem == 0 {
        u64::MAX
    } else {
        (1u64 << rem) - 1
    }
}

/// A packed binary vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from boolean entries.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self, Gf2Error> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Gf2Error::Dimension(format!(
                        "invalid bit character '{other}' at position {}",
                        i + 1
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / WORD_BITS];
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XORs `other` into `self`.
    pub fn xor_assign(&mut self, other: &BinaryVector) {
        assert_eq!(self.len, other.len, "xor of different-length vectors");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Indices of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD_BITS + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Truncated copy keeping positions `0..new_len`.
    pub fn truncated(&self, new_len: usize) -> BinaryVector {
        assert!(new_len <= self.len);
        let mut v = BinaryVector::zeros(new_len);
        for w in 0..v.words.len() {
            v.words[w] = self.words[w];
        }
        if let Some(last) = v.words.last_mut() {
            *last &= tail_mask(new_len);
        }
        v
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        Self { len, words }
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A packed binary matrix over GF(2), row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        let wpr = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row: wpr,
            data: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows given as `0`/`1` strings (test helper and
    /// file loader back end).
    pub fn from_rows(rows: &[&str]) -> Result<Self, Gf2Error> {
        if rows.is_empty() {
            return Err(Gf2Error::Dimension("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Gf2Error::Dimension(format!(
                    "row {} has {} columns, expected {}",
                    i + 1,
                    r.len(),
                    cols
                )));
            }
            let v = BinaryVector::parse(r)?;
            m.set_row(i, &v);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words_per_row + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Packed words of row `r`.
    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Copies row `r` out as a vector.
    pub fn row(&self, r: usize) -> BinaryVector {
        BinaryVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn set_row(&mut self, r: usize, v: &BinaryVector) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        let start = r * self.words_per_row;
        self.data[start..start + self.words_per_row].copy_from_slice(v.words());
    }

    /// XORs row `src` into row `dst`.
    #[inline]
    pub fn row_xor_assign(&mut self, dst: usize, src: usize) {
        debug_assert!(dst != src);
        let wpr = self.words_per_row;
        let (d, s) = (dst * wpr, src * wpr);
        for i in 0..wpr {
            let v = self.data[s + i];
            self.data[d + i] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let wpr = self.words_per_row;
        for i in 0..wpr {
            self.data.swap(a * wpr + i, b * wpr + i);
        }
    }

    /// New matrix whose column `j` is column `p(j)` of `self`.
    pub fn permute_columns(&self, p: &Permutation) -> Result<BinaryMatrix, Gf2Error> {
        if p.len() != self.cols {
            return Err(Gf2Error::Dimension(format!(
                "permutation length {} does not match column count {}",
                p.len(),
                self.cols
            )));
        }
        let mut out = BinaryMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (j, &src) in p.map().iter().enumerate() {
                if self.get(r, src) {
                    out.set(r, j, true);
                }
            }
        }
        Ok(out)
    }

    /// GF(2) vector-matrix product `v * self`.
    ///
    /// For a systematic generator the first `rows` output bits equal `v`.
    pub fn encode(&self, v: &BinaryVector) -> Result<BinaryVector, Gf2Error> {
        if v.len() != self.rows {
            return Err(Gf2Error::Dimension(format!(
                "message length {} does not match matrix rows {}",
                v.len(),
                self.rows
            )));
        }
        let mut out = BinaryVector::zeros(self.cols);
        for i in 0..self.rows {
            if v.get(i) {
                let row = self.row_words(i);
                for (o, &w) in out.words_mut().iter_mut().zip(row) {
                    *o ^= w;
                }
            }
        }
        Ok(out)
    }

    /// Row rank by Gaussian elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            if let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) {
                m.swap_rows(rank, pivot);
                for r in 0..m.rows {
                    if r != rank && m.get(r, col) {
                        m.row_xor_assign(r, rank);
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// Reduces to systematic form `[I_K | P]`, moving dependent columns out
    /// of the leading block.
    ///
    /// The pivot for each row is the leftmost column independent of the
    /// pivots chosen so far, so when the natural pivot position is dependent
    /// the nearest independent column to its right takes its place. The
    /// returned permutation `p` is the stable compaction realizing that
    /// choice: pivot columns first (in order), then the remaining columns in
    /// their original relative order. Column `j` of the result is column
    /// `p(j)` of the row-reduced input, hence
    /// `row_space_equal(m.permute_columns(&p), &gt)` holds.
    ///
    /// Fails with [`Gf2Error::RankDeficient`] if fewer than `rows` pivots
    /// exist, naming the 1-based pivot row that could not be completed.
    pub fn systematic_form(&self) -> Result<(BinaryMatrix, Permutation), Gf2Error> {
        let k = self.rows;
        let n = self.cols;
        let mut m = self.clone();
        let mut pivot_cols: Vec<usize> = Vec::with_capacity(k);
        let mut row = 0;
        for col in 0..n {
            if row == k {
                break;
            }
            if let Some(pivot) = (row..k).find(|&r| m.get(r, col)) {
                m.swap_rows(row, pivot);
                for r in 0..k {
                    if r != row && m.get(r, col) {
                        m.row_xor_assign(r, row);
                    }
                }
                pivot_cols.push(col);
                row += 1;
            }
        }
        if row < k {
            return Err(Gf2Error::RankDeficient { pivot: row + 1 });
        }
        let mut map = pivot_cols.clone();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; n];
            for &c in &pivot_cols {
                s[c] = true;
            }
            s
        };
        map.extend((0..n).filter(|&c| !pivot_set[c]));
        let p = Permutation::from_map(map)?;
        let gt = m.permute_columns(&p)?;
        Ok((gt, p))
    }

    /// True when the left `rows x rows` block is the identity.
    pub fn is_systematic(&self) -> bool {
        if self.cols < self.rows {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.rows {
                if self.get(i, j) != (i == j) {
                    return false;
                }
            }
        }
        true
    }

    /// Stacks `self` on top of `other`.
    pub fn stack(&self, other: &BinaryMatrix) -> Result<BinaryMatrix, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::Dimension(format!(
                "cannot stack {}-column matrix on {}-column matrix",
                other.cols, self.cols
            )));
        }
        let mut out = BinaryMatrix::zeros(self.rows + other.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        Ok(out)
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "{}", self.row(r))?;
        }
        Ok(())
    }
}

/// True iff `a` and `b` span the same row space.
pub fn row_space_equal(a: &BinaryMatrix, b: &BinaryMatrix) -> Result<bool, Gf2Error> {
    if a.cols() != b.cols() {
        return Err(Gf2Error::Dimension(format!(
            "row spaces live in different ambient dimensions ({} vs {})",
            a.cols(),
            b.cols()
        )));
    }
    let ra = a.rank();
    let rb = b.rank();
    if ra != rb {
        return Ok(false);
    }
    Ok(a.stack(b)?.rank() == ra)
}

/// A bijection on `0..n`, applied as `apply(x)[j] = x[map[j]]`.
#[derive(Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Validates that `map` is a bijection on `0..map.len()`.
    pub fn from_map(map: Vec<usize>) -> Result<Self, Gf2Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n {
                return Err(Gf2Error::InvalidPermutation(format!(
                    "entry {} out of range 1..{n}",
                    i + 1
                )));
            }
            if seen[i] {
                return Err(Gf2Error::InvalidPermutation(format!(
                    "entry {} appears twice",
                    i + 1
                )));
            }
            seen[i] = true;
        }
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { map: inv }
    }

    /// Composition applying `self` first, then `after`:
    /// `apply(after, apply(self, x)) = apply(self.then(after), x)`.
    pub fn then(&self, after: &Permutation) -> Permutation {
        assert_eq!(self.len(), after.len(), "composing different-size permutations");
        let map = after.map.iter().map(|&j| self.map[j]).collect();
        Permutation { map }
    }

    /// Applies to a slice of copyable values: `out[j] = x[map[j]]`.
    pub fn apply_slice<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.map.len(), "permutation length mismatch");
        self.map.iter().map(|&i| x[i]).collect()
    }

    /// Applies to a packed binary vector.
    pub fn apply_bits(&self, x: &BinaryVector) -> BinaryVector {
        assert_eq!(x.len(), self.map.len(), "permutation length mismatch");
        let mut out = BinaryVector::zeros(x.len());
        for (j, &i) in self.map.iter().enumerate() {
            if x.get(i) {
                out.set(j, true);
            }
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, matching the convention used in documentation.
        write!(f, "(")?;
        for (j, &i) in self.map.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, ")")
    }
}
