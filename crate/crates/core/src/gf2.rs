//! Bit-packed linear algebra over F2 and finite-field arithmetic GF(2^m).
//!
//! Everything downstream (Lie brackets, loop tables, the beta/phi machinery)
//! runs on these two representations: coordinate vectors packed into `u64`
//! words, and row-major packed matrices with word-level xor as the row
//! operation. Field elements of GF(2^m) are nonnegative integers below 2^m,
//! bits read as polynomial coefficients.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix is singular")]
    Singular,
    #[error("{d} does not divide extension degree {m}")]
    NonDivisor { d: u32, m: u32 },
    #[error("unsupported extension degree {0} (supported: 1..=16)")]
    UnsupportedDegree(u32),
    #[error("no built-in modulus for degree {0} (table covers 1..=12)")]
    NoBuiltinModulus(u32),
    #[error("modulus {0:#x} is not irreducible over F2")]
    ReducibleModulus(u64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Coordinate vector over F2; coordinate k lives at bit k. Bits beyond
/// `dim` stay zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    dim: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(dim: usize) -> Self {
        BitVector {
            dim,
            words: vec![0; words_for(dim)],
        }
    }

    pub fn from_indices(dim: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(dim);
        for &k in ones {
            v.set(k, true);
        }
        v
    }

    /// Low 64 coordinates from a mask; requires dim <= 64.
    pub fn from_bits(dim: usize, bits: u64) -> Self {
        assert!(dim <= 64, "from_bits requires dim <= 64");
        let mask = if dim == 64 { !0 } else { (1u64 << dim) - 1 };
        BitVector {
            dim,
            words: vec![bits & mask],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.dim);
        (self.words[k / WORD_BITS] >> (k % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, k: usize, value: bool) {
        assert!(k < self.dim);
        let (w, b) = (k / WORD_BITS, k % WORD_BITS);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn xor_with(&mut self, other: &BitVector) {
        assert_eq!(self.dim, other.dim);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Dot product over F2.
    pub fn parity_and(&self, other: &BitVector) -> bool {
        assert_eq!(self.dim, other.dim);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&k| self.get(k))
    }

    /// First word; the whole vector when dim <= 64.
    pub fn low_bits(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    /// Index of the lowest set coordinate.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector[")?;
        for k in 0..self.dim {
            write!(f, "{}", self.get(k) as u8)?;
        }
        write!(f, "]")
    }
}

/// Row-major packed matrix over F2. Row i acts on a vector by
/// `y_i = parity(row_i & x)`, so columns index the input coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BitMatrix {
            rows,
            cols,
            wpr,
            words: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVector>) -> Self {
        let cols = rows.first().map_or(0, |r| r.dim());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.set_row(i, r);
        }
        m
    }

    pub fn from_cols(cols: Vec<BitVector>) -> Self {
        let rows = cols.first().map_or(0, |c| c.dim());
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.words[i * self.wpr + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = i * self.wpr + j / WORD_BITS;
        let b = j % WORD_BITS;
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector {
            dim: self.cols,
            words: self.words[i * self.wpr..(i + 1) * self.wpr].to_vec(),
        }
    }

    pub fn set_row(&mut self, i: usize, v: &BitVector) {
        assert_eq!(v.dim(), self.cols);
        self.words[i * self.wpr..(i + 1) * self.wpr].copy_from_slice(&v.words);
    }

    pub fn col(&self, j: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Matrix-vector product y = M x.
    pub fn apply(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.dim(), self.cols);
        let mut y = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self.words[i * self.wpr..(i + 1) * self.wpr]
                .iter()
                .zip(&x.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                y.set(i, true);
            }
        }
        y
    }

    /// Matrix product self * rhs: row i of the result is the xor of the
    /// rhs rows selected by row i of self.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u64; rhs.wpr];
            for k in 0..self.cols {
                if self.get(i, k) {
                    for (a, w) in acc.iter_mut().zip(&rhs.words[k * rhs.wpr..(k + 1) * rhs.wpr]) {
                        *a ^= w;
                    }
                }
            }
            out.words[i * out.wpr..(i + 1) * out.wpr].copy_from_slice(&acc);
        }
        out
    }

    pub fn add(&self, rhs: &BitMatrix) -> BitMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&rhs.words) {
            *w ^= o;
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> BitMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = BitMatrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn stack_rows(mats: &[&BitMatrix]) -> BitMatrix {
        let cols = mats.first().map_or(0, |m| m.cols);
        let rows = mats.iter().map(|m| m.rows).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let mut at = 0;
        for m in mats {
            assert_eq!(m.cols, cols);
            for i in 0..m.rows {
                out.set_row(at, &m.row(i));
                at += 1;
            }
        }
        out
    }

    /// Row rank by Gauss elimination on packed rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| self.words[i * self.wpr..(i + 1) * self.wpr].to_vec())
            .collect();
        let mut rank = 0;
        for j in 0..self.cols {
            let (w, b) = (j / WORD_BITS, j % WORD_BITS);
            let Some(p) = (rank..rows.len()).find(|&i| (rows[i][w] >> b) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && (row[w] >> b) & 1 == 1 {
                    for (r, p) in row.iter_mut().zip(&pivot) {
                        *r ^= p;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Inverse by Gauss-Jordan on [M | I]; `Singular` when rank < n.
    pub fn invert(&self) -> Result<BitMatrix, Gf2Error> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut left: Vec<Vec<u64>> = (0..n)
            .map(|i| self.words[i * self.wpr..(i + 1) * self.wpr].to_vec())
            .collect();
        let id = BitMatrix::identity(n);
        let mut right: Vec<Vec<u64>> = (0..n)
            .map(|i| id.words[i * id.wpr..(i + 1) * id.wpr].to_vec())
            .collect();
        let mut rank = 0;
        for j in 0..n {
            let (w, b) = (j / WORD_BITS, j % WORD_BITS);
            let Some(p) = (rank..n).find(|&i| (left[i][w] >> b) & 1 == 1) else {
                return Err(Gf2Error::Singular);
            };
            left.swap(rank, p);
            right.swap(rank, p);
            let (pl, pr) = (left[rank].clone(), right[rank].clone());
            for i in 0..n {
                if i != rank && (left[i][w] >> b) & 1 == 1 {
                    for (r, p) in left[i].iter_mut().zip(&pl) {
                        *r ^= p;
                    }
                    for (r, p) in right[i].iter_mut().zip(&pr) {
                        *r ^= p;
                    }
                }
            }
            rank += 1;
        }
        let mut out = BitMatrix::zeros(n, n);
        for (i, row) in right.into_iter().enumerate() {
            out.words[i * out.wpr..(i + 1) * out.wpr].copy_from_slice(&row);
        }
        Ok(out)
    }

    /// Basis of the right nullspace {x : Mx = 0}.
    pub fn nullspace(&self) -> Vec<BitVector> {
        // Reduce to RREF tracking pivot columns; free columns parameterize
        // the kernel.
        let mut rows: Vec<BitVector> = (0..self.rows).map(|i| self.row(i)).collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for j in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(j)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row.get(j) {
                    row.xor_with(&pivot);
                }
            }
            pivots.push(j);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = BitVector::zeros(self.cols);
            v.set(free, true);
            for (r, &pj) in pivots.iter().enumerate() {
                if rows[r].get(free) {
                    v.set(pj, true);
                }
            }
            basis.push(v);
        }
        basis
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Fixed irreducible moduli for GF(2^m), m = 1..=12, bit k = coefficient
/// of x^k. Each is re-validated by brute-force divisor search at
/// construction time.
const MODULI: [u64; 12] = [
    0b11,            // x + 1
    0b111,           // x^2 + x + 1
    0b1011,          // x^3 + x + 1
    0b10011,         // x^4 + x + 1
    0b100101,        // x^5 + x^2 + 1
    0b1000011,       // x^6 + x + 1
    0b10000011,      // x^7 + x + 1
    0b100011011,     // x^8 + x^4 + x^3 + x + 1
    0b1000010001,    // x^9 + x^4 + 1
    0b10000001001,   // x^10 + x^3 + 1
    0b100000000101,  // x^11 + x^2 + 1
    0b1000001010011, // x^12 + x^6 + x^4 + x + 1
];

fn poly_degree(f: u64) -> i32 {
    63 - f.leading_zeros() as i32
}

fn poly_rem(mut f: u64, g: u64) -> u64 {
    let dg = poly_degree(g);
    while poly_degree(f) >= dg {
        f ^= g << (poly_degree(f) - dg);
    }
    f
}

fn poly_is_irreducible(f: u64, m: u32) -> bool {
    if poly_degree(f) != m as i32 {
        return false;
    }
    if m == 1 {
        return true;
    }
    // Exhaustive trial division by every polynomial of degree 1..=m/2.
    for g in 2u64..(1 << (m / 2 + 1)) {
        if poly_degree(g) >= 1 && poly_rem(f, g) == 0 {
            return false;
        }
    }
    true
}

/// GF(2^m) with a fixed irreducible modulus. Elements are integers < 2^m,
/// bits as polynomial coefficients; canonical order = integer order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldF2m {
    m: u32,
    modulus: u64,
}

impl FieldF2m {
    /// Field with the built-in modulus for degree m (1..=12).
    pub fn new(m: u32) -> Result<Self, Gf2Error> {
        let modulus = *MODULI
            .get(m.wrapping_sub(1) as usize)
            .ok_or(Gf2Error::NoBuiltinModulus(m))?;
        Self::with_modulus(m, modulus)
    }

    pub fn with_modulus(m: u32, modulus: u64) -> Result<Self, Gf2Error> {
        if m == 0 || m > 16 {
            return Err(Gf2Error::UnsupportedDegree(m));
        }
        if !poly_is_irreducible(modulus, m) {
            return Err(Gf2Error::ReducibleModulus(modulus));
        }
        Ok(FieldF2m { m, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        1 << self.m
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.order() && b < self.order());
        let mut acc: u64 = 0;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            a <<= 1;
            if a >> self.m & 1 == 1 {
                a ^= self.modulus;
            }
            b >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    /// a^(2^d), the d-fold Frobenius.
    pub fn frobenius_pow(&self, a: u64, d: u32) -> u64 {
        let mut x = a;
        for _ in 0..d {
            x = self.mul(x, x);
        }
        x
    }

    /// The 2^d solutions of a^(2^d) = a: kernel of the F2-linear map
    /// a -> a^(2^d) + a. Sorted by canonical integer order.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<u64>, Gf2Error> {
        if d == 0 || self.m % d != 0 {
            return Err(Gf2Error::NonDivisor { d, m: self.m });
        }
        let n = self.m as usize;
        let mut mat = BitMatrix::zeros(n, n);
        for k in 0..n {
            let img = self.frobenius_pow(1 << k, d) ^ (1 << k);
            for i in 0..n {
                if (img >> i) & 1 == 1 {
                    mat.set(i, k, true);
                }
            }
        }
        let basis = mat.nullspace();
        let mut out: Vec<u64> = (0..1u64 << basis.len())
            .map(|combo| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| (combo >> l) & 1 == 1)
                    .fold(0u64, |acc, (_, v)| acc ^ v.low_bits())
            })
            .collect();
        out.sort_unstable();
        debug_assert_eq!(out.len(), 1 << d);
        Ok(out)
    }

    /// Multiplication by c as an m x m matrix in the basis {1, x, ..., x^(m-1)}:
    /// column k = c * x^k.
    pub fn mul_endomorphism(&self, c: u64) -> BitMatrix {
        let n = self.m as usize;
        let mut mat = BitMatrix::zeros(n, n);
        for k in 0..n {
            let img = self.mul(c, 1 << k);
            for i in 0..n {
                if (img >> i) & 1 == 1 {
                    mat.set(i, k, true);
                }
            }
        }
        mat
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_identity_allones_zero() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        let mut ones = BitMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                ones.set(i, j, true);
            }
        }
        assert_eq!(ones.rank(), 1);
        assert_eq!(BitMatrix::zeros(2, 2).rank(), 0);
    }

    #[test]
    fn invert_examples() {
        let id = BitMatrix::identity(4);
        assert_eq!(id.invert().unwrap(), id);

        let mut swap = BitMatrix::zeros(2, 2);
        swap.set(0, 1, true);
        swap.set(1, 0, true);
        let inv = swap.invert().unwrap();
        assert_eq!(inv, swap);
        assert_eq!(swap.mul(&inv), BitMatrix::identity(2));

        let mut ones = BitMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                ones.set(i, j, true);
            }
        }
        assert_eq!(ones.invert(), Err(Gf2Error::Singular));
    }

    #[test]
    fn invert_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 50 {
            let n = rng.gen_range(1..=8);
            let mut m = BitMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, rng.gen());
                }
            }
            if let Ok(inv) = m.invert() {
                assert_eq!(m.mul(&inv), BitMatrix::identity(n));
                assert_eq!(inv.mul(&m), BitMatrix::identity(n));
                found += 1;
            } else {
                assert!(m.rank() < n);
            }
        }
    }

    #[test]
    fn nullspace_matches_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = rng.gen_range(1..=6);
            let c = rng.gen_range(1..=6);
            let mut m = BitMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, rng.gen());
                }
            }
            let ns = m.nullspace();
            assert_eq!(ns.len(), c - m.rank());
            for v in &ns {
                assert!(m.apply(v).is_zero());
            }
        }
    }

    #[test]
    fn field_mul_examples() {
        let gf4 = FieldF2m::new(2).unwrap();
        // omega = x = 2; omega^2 = omega + 1 = 3
        assert_eq!(gf4.mul(2, 2), 3);
        let gf8 = FieldF2m::new(3).unwrap();
        // x * x^2 = x^3 = x + 1 under x^3 + x + 1
        assert_eq!(gf8.mul(2, 4), 3);
        for m in 1..=12 {
            let f = FieldF2m::new(m).unwrap();
            for a in f.elements().take(64) {
                assert_eq!(f.mul(1, a), a);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for m in 1..=4 {
            let f = FieldF2m::new(m).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn field_inverses_m_up_to_8() {
        for m in 1..=8 {
            let f = FieldF2m::new(m).unwrap();
            for a in 1..f.order() {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1, "GF(2^{m}): {a} * {inv} != 1");
            }
        }
    }

    #[test]
    fn subfield_examples() {
        let gf4 = FieldF2m::new(2).unwrap();
        assert_eq!(gf4.subfield_elements(1).unwrap(), vec![0, 1]);
        let gf16 = FieldF2m::new(4).unwrap();
        assert_eq!(gf16.subfield_elements(2).unwrap().len(), 4);
        assert_eq!(gf16.subfield_elements(4).unwrap().len(), 16);
        assert_eq!(
            gf16.subfield_elements(3),
            Err(Gf2Error::NonDivisor { d: 3, m: 4 })
        );
    }

    #[test]
    fn subfield_closed_under_ops() {
        for m in [2u32, 4, 6, 8] {
            let f = FieldF2m::new(m).unwrap();
            for d in 1..=m {
                if m % d != 0 {
                    continue;
                }
                let sub = f.subfield_elements(d).unwrap();
                let set: std::collections::HashSet<u64> = sub.iter().copied().collect();
                for &a in &sub {
                    for &b in &sub {
                        assert!(set.contains(&(a ^ b)));
                        assert!(set.contains(&f.mul(a, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn mul_endomorphism_examples() {
        let gf4 = FieldF2m::new(2).unwrap();
        assert_eq!(gf4.mul_endomorphism(1), BitMatrix::identity(2));
        assert!(gf4.mul_endomorphism(0).is_zero());
        // c = omega: 1 -> omega (col 0 = 0b10), omega -> omega + 1 (col 1 = 0b11)
        let e = gf4.mul_endomorphism(2);
        assert_eq!(e.col(0), BitVector::from_bits(2, 0b10));
        assert_eq!(e.col(1), BitVector::from_bits(2, 0b11));
    }

    #[test]
    fn mul_endomorphism_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=12 {
            let f = FieldF2m::new(m).unwrap();
            for _ in 0..100 {
                let a = rng.gen_range(0..f.order());
                let b = rng.gen_range(0..f.order());
                assert_eq!(
                    f.mul_endomorphism(a).mul(&f.mul_endomorphism(b)),
                    f.mul_endomorphism(f.mul(a, b))
                );
            }
        }
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for m in 1..=12 {
            FieldF2m::new(m).unwrap();
        }
        // x^4 + 1 = (x + 1)^4
        assert_eq!(
            FieldF2m::with_modulus(4, 0b10001),
            Err(Gf2Error::ReducibleModulus(0b10001))
        );
        assert_eq!(FieldF2m::new(13), Err(Gf2Error::NoBuiltinModulus(13)));
    }

    #[test]
    fn apply_matches_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let r = rng.gen_range(1..=7);
            let c = rng.gen_range(1..=7);
            let mut m = BitMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, rng.gen());
                }
            }
            for j in 0..c {
                let mut e = BitVector::zeros(c);
                e.set(j, true);
                assert_eq!(m.apply(&e), m.col(j));
            }
        }
    }
}
