//! Construction of extended BCH generator matrices, generator-matrix file
//! I/O, and brute-force distance oracles for small codes.
//!
//! The matrix file format is line-oriented text: optional `#` comment lines,
//! one `K N` header line, then `K` rows of `N` characters in `{0,1}`.

use crate::gf2::BinaryMatrix;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Errors from code construction and matrix file I/O.
#[derive(Debug, Error)]
pub enum CodeError {
    #[error("n = {0} is not of the form 2^m with 3 <= m <= 7")]
    UnsupportedLength(usize),
    #[error("no BCH design parameter reaches k = {requested} for parent length {parent}; attainable dimensions: {attainable:?}")]
    UnattainableDimension {
        requested: usize,
        parent: usize,
        attainable: Vec<usize>,
    },
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("enumeration refused: k = {k} exceeds the brute-force bound k <= {bound}")]
    EnumerationTooLarge { k: usize, bound: usize },
    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Which construction a generator matrix comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeFamily {
    /// Extended (even-parity-augmented) narrow-sense binary BCH code.
    Ebch,
    /// Arbitrary linear code loaded from a generator-matrix file.
    File(String),
}

/// Parameters identifying a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    /// Known minimum distance, when available.
    pub d: Option<usize>,
    pub family: CodeFamily,
}

impl CodeSpec {
    pub fn ebch(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            d: None,
            family: CodeFamily::Ebch,
        }
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.family, self.d) {
            (CodeFamily::Ebch, Some(d)) => write!(f, "ebch({},{},{})", self.n, self.k, d),
            (CodeFamily::Ebch, None) => write!(f, "ebch({},{})", self.n, self.k),
            (CodeFamily::File(_), _) => write!(f, "file({},{})", self.n, self.k),
        }
    }
}

/// A polynomial over GF(2), packed LSB-first (bit `i` is the coefficient of
/// `x^i`). The zero polynomial has an empty word vector.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Polynomial {
    words: Vec<u64>,
}

impl Gf2Polynomial {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self { words: vec![1] }
    }

    pub fn from_coeff_indices(indices: &[usize]) -> Self {
        let mut p = Self::zero();
        for &i in indices {
            p.set_coeff(i);
        }
        p
    }

    fn set_coeff(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1u64 << (i % 64);
    }

    pub fn coeff(&self, i: usize) -> bool {
        let w = i / 64;
        w < self.words.len() && (self.words[w] >> (i % 64)) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Degree of the polynomial; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        for (w, &word) in self.words.iter().enumerate().rev() {
            if word != 0 {
                return w * 64 + 63 - word.leading_zeros() as usize;
            }
        }
        0
    }

    /// Carry-less product over GF(2)[x].
    pub fn mul(&self, other: &Gf2Polynomial) -> Gf2Polynomial {
        if self.is_zero() || other.is_zero() {
            return Gf2Polynomial::zero();
        }
        let mut out = Gf2Polynomial::zero();
        for i in 0..=self.degree() {
            if self.coeff(i) {
                for j in 0..=other.degree() {
                    if other.coeff(j) {
                        out.set_coeff(i + j);
                    }
                }
            }
        }
        out
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for Gf2Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..=self.degree()).rev() {
            if self.coeff(i) {
                if !first {
                    write!(f, " + ")?;
                }
                match i {
                    0 => write!(f, "1")?,
                    1 => write!(f, "x")?,
                    _ => write!(f, "x^{i}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

/// Primitive polynomials used for GF(2^m), m = 2..7, from the standard
/// tables; packed LSB-first. Fixing these makes generated matrices
/// bit-reproducible across implementations.
const PRIMITIVE_POLY: [(usize, u16); 6] = [
    (2, 0b111),        // x^2 + x + 1
    (3, 0b1011),       // x^3 + x + 1
    (4, 0b10011),      // x^4 + x + 1
    (5, 0b100101),     // x^5 + x^2 + 1
    (6, 0b1000011),    // x^6 + x + 1
    (7, 0b10001001),   // x^7 + x^3 + 1
];

/// Primitive polynomial for GF(2^m) as a human-readable string (used in
/// generator file headers).
pub fn primitive_poly_string(m: usize) -> Option<String> {
    let (_, poly) = PRIMITIVE_POLY.iter().find(|&&(deg, _)| deg == m)?;
    let mut terms = Vec::new();
    for i in (0..=m).rev() {
        if (poly >> i) & 1 == 1 {
            match i {
                0 => terms.push("1".to_string()),
                1 => terms.push("x".to_string()),
                _ => terms.push(format!("x^{i}")),
            }
        }
    }
    Some(terms.join("+"))
}

/// GF(2^m) arithmetic via exp/log tables over a fixed primitive polynomial.
struct Gf2mField {
    m: usize,
    /// exp[i] = alpha^i for i in 0..2^m-1 (and wrapped duplicate for mul).
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl Gf2mField {
    fn new(m: usize) -> Option<Self> {
        let &(_, poly) = PRIMITIVE_POLY.iter().find(|&&(deg, _)| deg == m)?;
        let size = 1usize << m;
        let mut exp = vec![0u16; 2 * (size - 1)];
        let mut log = vec![0u16; size];
        let mut x: u16 = 1;
        for (i, e) in exp.iter_mut().take(size - 1).enumerate() {
            *e = x;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        // Wrapped copy so products of two logs index directly.
        for i in size - 1..2 * (size - 1) {
            exp[i] = exp[i - (size - 1)];
        }
        Some(Self { m, exp, log })
    }

    fn order(&self) -> usize {
        (1usize << self.m) - 1
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.order()]
    }
}

/// Cyclotomic coset of `i` modulo `n` (exponent orbit under squaring).
fn cyclotomic_coset(i: usize, n: usize) -> Vec<usize> {
    let mut coset = vec![i % n];
    let mut next = (i * 2) % n;
    while next != i % n {
        coset.push(next);
        next = (next * 2) % n;
    }
    coset
}

/// Minimal polynomial of `alpha^i` over GF(2): the product of `(x + alpha^s)`
/// over the cyclotomic coset of `i`. All coefficients collapse into {0,1}.
fn minimal_polynomial(field: &Gf2mField, i: usize) -> Gf2Polynomial {
    let coset = cyclotomic_coset(i, field.order());
    // Coefficients in GF(2^m), lowest degree first; start from constant 1.
    let mut coeffs: Vec<u16> = vec![1];
    for &s in &coset {
        let root = field.alpha_pow(s);
        let mut next = vec![0u16; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] ^= c; // times x
            next[d] ^= field.mul(c, root); // times the root
        }
        coeffs = next;
    }
    let mut poly = Gf2Polynomial::zero();
    for (d, &c) in coeffs.iter().enumerate() {
        debug_assert!(c <= 1, "minimal polynomial coefficient outside GF(2)");
        if c == 1 {
            poly.set_coeff(d);
        }
    }
    poly
}

/// Generator polynomial of the narrow-sense binary BCH code of length
/// `2^m_ext - 1` correcting `t` errors: the LCM of the minimal polynomials
/// of `alpha^1 .. alpha^{2t}`. `t = 0` yields the rate-1 code with g(x) = 1.
pub fn bch_generator_poly(m_ext: usize, t: usize) -> Result<Gf2Polynomial, CodeError> {
    let field = Gf2mField::new(m_ext).ok_or(CodeError::UnsupportedLength(1usize << m_ext))?;
    let n = field.order();
    if 2 * t >= n {
        return Err(CodeError::InvalidParams(format!(
            "t = {t} leaves no information bits for parent length {n}"
        )));
    }
    let mut g = Gf2Polynomial::one();
    let mut covered = vec![false; n];
    for e in 1..=2 * t {
        let rep = e % n;
        if covered[rep] {
            continue;
        }
        for &s in &cyclotomic_coset(rep, n) {
            covered[s] = true;
        }
        g = g.mul(&minimal_polynomial(&field, rep));
    }
    Ok(g)
}

/// Dimensions attainable by narrow-sense BCH codes of parent length
/// `2^m_ext - 1`, largest first.
pub fn attainable_bch_dimensions(m_ext: usize) -> Result<Vec<usize>, CodeError> {
    let n = (1usize << m_ext) - 1;
    let mut dims = Vec::new();
    let mut t = 0;
    loop {
        let g = bch_generator_poly(m_ext, t);
        let Ok(g) = g else { break };
        let k = n - g.degree();
        if dims.last() != Some(&k) {
            dims.push(k);
        }
        if k == 0 {
            break;
        }
        t += 1;
    }
    Ok(dims)
}

/// Builds the K x N generator of an extended BCH code: cyclic shifts of the
/// parent generator polynomial, each row augmented with an overall
/// even-parity bit.
pub fn ebch_generator(spec: &CodeSpec) -> Result<BinaryMatrix, CodeError> {
    if spec.family != CodeFamily::Ebch {
        return Err(CodeError::InvalidParams(format!(
            "ebch_generator called for family {:?}",
            spec.family
        )));
    }
    let n = spec.n;
    let k = spec.k;
    if !n.is_power_of_two() {
        return Err(CodeError::UnsupportedLength(n));
    }
    let m_ext = n.trailing_zeros() as usize;
    if !(3..=7).contains(&m_ext) {
        return Err(CodeError::UnsupportedLength(n));
    }
    let parent = n - 1;
    if k == 0 || k >= n {
        return Err(CodeError::InvalidParams(format!(
            "k = {k} out of range for n = {n}"
        )));
    }
    // Search the error-correcting parameter giving the requested dimension.
    let target_deg = parent - k;
    let mut g = None;
    for t in 0..=parent / 2 {
        match bch_generator_poly(m_ext, t) {
            Ok(p) => {
                let deg = p.degree();
                if deg == target_deg {
                    g = Some(p);
                    break;
                }
                if deg > target_deg {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    let g = g.ok_or_else(|| CodeError::UnattainableDimension {
        requested: k,
        parent,
        attainable: attainable_bch_dimensions(m_ext).unwrap_or_default(),
    })?;
    let mut gen = BinaryMatrix::zeros(k, n);
    let parity = g.weight() % 2 == 1;
    for row in 0..k {
        for d in 0..=g.degree() {
            if g.coeff(d) {
                gen.set(row, row + d, true);
            }
        }
        gen.set(row, n - 1, parity);
    }
    Ok(gen)
}

/// Exact minimum distance by enumerating all `2^K - 1` nonzero codewords in
/// Gray-code order. Refuses dimensions above 20.
pub fn min_distance_bruteforce(g: &BinaryMatrix) -> Result<usize, CodeError> {
    const BOUND: usize = 20;
    let k = g.rows();
    if k > BOUND {
        return Err(CodeError::EnumerationTooLarge { k, bound: BOUND });
    }
    let mut word = crate::gf2::BinaryVector::zeros(g.cols());
    let mut best = usize::MAX;
    let mut prev_gray: usize = 0;
    for i in 1usize..(1 << k) {
        let gray = i ^ (i >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        word.xor_assign(&g.row(flipped));
        let w = word.weight();
        if w > 0 && w < best {
            best = w;
        }
    }
    Ok(best)
}

/// Writes a generator matrix in the text format, with optional leading
/// comment lines (each written as `# ...`).
pub fn save_generator(path: &Path, g: &BinaryMatrix, comments: &[String]) -> Result<(), CodeError> {
    let io_err = |source| CodeError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("{} {}\n", g.rows(), g.cols()));
    for r in 0..g.rows() {
        out.push_str(&g.row(r).to_string());
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(out.as_bytes()).map_err(io_err)?;
    Ok(())
}

/// Reads a generator matrix saved by [`save_generator`]. Reports malformed
/// content with its 1-based line number.
pub fn load_generator(path: &Path) -> Result<BinaryMatrix, CodeError> {
    let text = fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_generator(&text, &path.display().to_string())
}

fn parse_generator(text: &str, path: &str) -> Result<BinaryMatrix, CodeError> {
    let err = |line: usize, msg: String| CodeError::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing 'K N' header line".into()))?;
    let mut parts = header.split_whitespace();
    let k: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(hline, format!("expected 'K N' header, got '{header}'")))?;
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(hline, format!("expected 'K N' header, got '{header}'")))?;
    if parts.next().is_some() {
        return Err(err(hline, format!("trailing tokens after 'K N' header: '{header}'")));
    }
    if k == 0 || n == 0 || k > n {
        return Err(err(hline, format!("invalid dimensions K={k} N={n}")));
    }
    let mut g = BinaryMatrix::zeros(k, n);
    let mut row = 0;
    for (lno, line) in lines {
        if row == k {
            return Err(err(lno, format!("unexpected extra row (matrix has K={k} rows)")));
        }
        if line.len() != n {
            return Err(err(
                lno,
                format!("row has {} characters, expected N={n}", line.len()),
            ));
        }
        for (c, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => g.set(row, c, true),
                other => {
                    return Err(err(lno, format!("invalid character '{other}' in row")));
                }
            }
        }
        row += 1;
    }
    if row < k {
        return Err(err(
            text.lines().count().max(1),
            format!("got {row} rows, expected K={k}"),
        ));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_generator_poly() {
        // Narrow-sense single-error BCH of length 7 is the (7,4) Hamming
        // code with g(x) = x^3 + x + 1.
        let g = bch_generator_poly(3, 1).unwrap();
        assert_eq!(g, Gf2Polynomial::from_coeff_indices(&[3, 1, 0]));
    }

    #[test]
    fn rate_one_generator_poly() {
        let g = bch_generator_poly(5, 0).unwrap();
        assert_eq!(g, Gf2Polynomial::one());
        assert_eq!(g.degree(), 0);
    }

    #[test]
    fn parent_63_16_degree_by_coset_accounting() {
        // Independent oracle: deg(g) is the union size of the cyclotomic
        // cosets of 1..=2t.
        let t = 11;
        let n = 63;
        let mut covered = std::collections::BTreeSet::new();
        for e in 1..=2 * t {
            for s in cyclotomic_coset(e, n) {
                covered.insert(s);
            }
        }
        assert_eq!(covered.len(), 47);
        let g = bch_generator_poly(6, t).unwrap();
        assert_eq!(g.degree(), 47);
        // Parent (63,16) extends to the (64,16) code.
        let gen = ebch_generator(&CodeSpec::ebch(64, 16)).unwrap();
        assert_eq!((gen.rows(), gen.cols()), (16, 64));
    }

    #[test]
    fn ebch_8_4_is_extended_hamming() {
        let gen = ebch_generator(&CodeSpec::ebch(8, 4)).unwrap();
        assert_eq!(gen.rank(), 4);
        assert_eq!(min_distance_bruteforce(&gen).unwrap(), 4);
    }

    #[test]
    fn ebch_rows_have_even_weight() {
        for (n, k) in [(8usize, 4usize), (16, 7), (32, 16), (64, 16)] {
            let gen = ebch_generator(&CodeSpec::ebch(n, k)).unwrap();
            for r in 0..gen.rows() {
                assert_eq!(gen.row(r).weight() % 2, 0, "odd row in ({n},{k})");
            }
        }
    }

    #[test]
    fn ebch_all_codewords_have_even_weight() {
        let gen = ebch_generator(&CodeSpec::ebch(8, 4)).unwrap();
        for m in 0..16u32 {
            let mut msg = crate::gf2::BinaryVector::zeros(4);
            for b in 0..4 {
                if (m >> b) & 1 == 1 {
                    msg.set(b, true);
                }
            }
            assert_eq!(gen.encode(&msg).unwrap().weight() % 2, 0);
        }
    }

    #[test]
    fn unattainable_dimension_lists_options() {
        let err = ebch_generator(&CodeSpec::ebch(64, 20)).unwrap_err();
        match err {
            CodeError::UnattainableDimension {
                requested,
                parent,
                attainable,
            } => {
                assert_eq!(requested, 20);
                assert_eq!(parent, 63);
                assert!(attainable.contains(&16));
                assert!(attainable.contains(&18));
                assert!(!attainable.contains(&20));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn min_distance_of_identity() {
        let g = BinaryMatrix::identity(5);
        assert_eq!(min_distance_bruteforce(&g).unwrap(), 1);
    }

    #[test]
    fn min_distance_refuses_large_k() {
        let g = BinaryMatrix::zeros(21, 32);
        assert!(matches!(
            min_distance_bruteforce(&g),
            Err(CodeError::EnumerationTooLarge { k: 21, bound: 20 })
        ));
    }

    #[test]
    fn save_load_roundtrip() {
        let gen = ebch_generator(&CodeSpec::ebch(16, 7)).unwrap();
        let dir = std::env::temp_dir();
        let path = dir.join(format!("osdkit_codes_test_{}.txt", std::process::id()));
        save_generator(&path, &gen, &["ebch n=16 k=7".into()]).unwrap();
        let back = load_generator(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(back, gen);
    }

    #[test]
    fn parse_reports_offending_line() {
        let text = "# comment\n2 4\n1010\n10\n";
        let err = parse_generator(text, "test.txt").unwrap_err();
        match err {
            CodeError::Parse { line, msg, .. } => {
                assert_eq!(line, 4);
                assert!(msg.contains("expected N=4"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_bad_header_and_extra_rows() {
        assert!(matches!(
            parse_generator("x y\n", "t"),
            Err(CodeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_generator("1 2\n10\n01\n", "t"),
            Err(CodeError::Parse { line: 3, .. })
        ));
    }
}
