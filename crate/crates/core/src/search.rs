//! Desk-scale surveys over nilpotent Lie algebras on F2 and the loops
//! they induce.
//!
//! Every nilpotent algebra admits a basis refined from the lower central
//! series in which [e_i, e_j] lies in span(e_{j+1}, .., e_{n-1}); see
//! `flag_adapt` for the constructive version. Enumerating structure
//! constants of that shape therefore covers all nilpotent isomorphism
//! classes while keeping the pattern space small: sum over pairs i < j of
//! n-1-j free bits, so 1 bit at dim 3, 4 at dim 4, 10 at dim 5, 20 at
//! dim 6, and 84 at dim 9 (sampling only).
//!
//! Scans partition the pattern space into fixed contiguous chunks that
//! workers process independently; merging is an in-order fold, so reports
//! are byte-identical for any worker count.

use crate::construct::{lie_to_loop, ConstructError};
use crate::formats::{loop_to_cayley, LieRecord};
use crate::gf2::{BitMatrix, BitVector};
use crate::lie::{LieAlgebraF2, W2PlusMethod};
use crate::loops::{AutomorphicMethod, SplitOutcome, SplitTranscript, DEFAULT_CLOSURE_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exhaustive flag enumeration stops here: 2^20 patterns at dim 6.
pub const MAX_EXHAUSTIVE_DIM: usize = 6;
/// Sampling stops here: 84 pattern bits at dim 9.
pub const MAX_SAMPLED_DIM: usize = 9;
/// Nonsplit scans build every loop up front, so they stop at order 64.
pub const MAX_NONSPLIT_DIM: usize = 6;
/// Largest loop the W2- branch of `classify_lie` will build by default.
pub const DEFAULT_BUDGET_ORDER: usize = 1 << 13;

const CHUNK: u128 = 1 << 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("dim {dim} exceeds the cap {max} for this operation")]
    DimTooLarge { dim: usize, max: usize },
    #[error("W2- check needs a loop of order {order}, over the budget {cap}")]
    BudgetExceeded { order: usize, cap: usize },
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// Outcome of the classification decision tree for one algebra: test W2
/// first; if it holds, test W2+; otherwise build the loop and test W2-
/// (the automorphic property). A counterexample of kind A is an algebra
/// where W2- holds without W2, of kind B one where W2 holds without W2+.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyVerdict {
    pub w2: bool,
    pub w2plus: Option<bool>,
    pub w2minus: Option<bool>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    CounterexampleA,
    CounterexampleB,
}

pub fn classify_lie(
    l: &LieAlgebraF2,
    budget_order: usize,
) -> Result<ClassifyVerdict, SearchError> {
    if l.check_w2() {
        let direct = l.check_w2plus(W2PlusMethod::Direct);
        let derived = l.check_w2plus(W2PlusMethod::DerivedSeries);
        assert_eq!(direct, derived, "W2+ implementations disagree on {l:?}");
        let verdict = if direct {
            Verdict::Consistent
        } else {
            Verdict::CounterexampleB
        };
        return Ok(ClassifyVerdict {
            w2: true,
            w2plus: Some(direct),
            w2minus: None,
            verdict,
        });
    }
    let order = 1usize << l.dim();
    if order > budget_order {
        return Err(SearchError::BudgetExceeded {
            order,
            cap: budget_order,
        });
    }
    let q = lie_to_loop(l, budget_order)?;
    let w2minus = q.is_automorphic(AutomorphicMethod::Direct);
    let verdict = if w2minus {
        Verdict::CounterexampleA
    } else {
        Verdict::Consistent
    };
    Ok(ClassifyVerdict {
        w2: false,
        w2plus: None,
        w2minus: Some(w2minus),
        verdict,
    })
}

// --- compact bracket tables -------------------------------------------
//
// A table is a flat n*n array of masks: m[i*n + j] = [e_i, e_j] as bits.
// Char 2 makes it symmetric with zero diagonal.

/// [x, e_k] for x given as a mask.
fn table_bracket(n: usize, m: &[u32], x: u32, k: usize) -> u32 {
    let mut acc = 0;
    let mut rest = x;
    while rest != 0 {
        let t = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc ^= m[t * n + k];
    }
    acc
}

/// Jacobi over basis triples, on the compact table.
pub fn table_jacobi_ok(n: usize, m: &[u32]) -> bool {
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let t = table_bracket(n, m, m[i * n + j], k)
                    ^ table_bracket(n, m, m[j * n + k], i)
                    ^ table_bracket(n, m, m[k * n + i], j);
                if t != 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn mask_span_insert(basis: &mut Vec<u32>, mut v: u32) {
    for b in basis.iter() {
        let pivot = 1 << (31 - b.leading_zeros());
        if v & pivot != 0 {
            v ^= b;
        }
    }
    if v != 0 {
        basis.push(v);
        basis.sort_unstable_by_key(|b| std::cmp::Reverse(*b));
    }
}

/// Lower central series on the compact table reaches zero.
pub fn table_nilpotent(n: usize, m: &[u32]) -> bool {
    let mut gamma: Vec<u32> = (0..n).map(|k| 1 << k).collect();
    loop {
        let mut next = Vec::new();
        for &g in &gamma {
            for k in 0..n {
                mask_span_insert(&mut next, table_bracket(n, m, g, k));
            }
        }
        if next.is_empty() {
            return true;
        }
        if next.len() == gamma.len() {
            return false;
        }
        gamma = next;
    }
}

pub fn table_to_algebra(n: usize, m: &[u32]) -> LieAlgebraF2 {
    let mut entries = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if m[i * n + j] != 0 {
                entries.push(((i, j), BitVector::from_bits(n, m[i * n + j] as u64)));
            }
        }
    }
    LieAlgebraF2::new(n, entries).expect("compact table is well formed")
}

/// Unrestricted dense pattern: n bits per pair (i, j), i < j, in
/// lexicographic pair order. Used by the coverage sweep at dim <= 4.
pub fn dense_table_from_pattern(n: usize, pattern: u64) -> Vec<u32> {
    assert!(n * n * (n - 1) / 2 <= 64, "dense patterns need dim <= 4");
    let mut m = vec![0u32; n * n];
    let mut bit = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let mask = ((pattern >> bit) & ((1 << n) - 1)) as u32;
            bit += n;
            m[i * n + j] = mask;
            m[j * n + i] = mask;
        }
    }
    m
}

// --- flag-adapted patterns --------------------------------------------

#[derive(Clone, Debug)]
struct FlagShape {
    n: usize,
    // (i, j, first pattern bit); the slot spans n-1-j bits mapping to
    // basis indices j+1 .. n-1.
    slots: Vec<(usize, usize, u32)>,
    bits: u32,
}

fn flag_shape(n: usize) -> FlagShape {
    let mut slots = Vec::new();
    let mut bits = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let width = (n - 1 - j) as u32;
            if width > 0 {
                slots.push((i, j, bits));
                bits += width;
            }
        }
    }
    FlagShape { n, slots, bits }
}

impl FlagShape {
    fn decode_into(&self, pattern: u128, m: &mut [u32]) {
        let n = self.n;
        m.fill(0);
        for &(i, j, first) in &self.slots {
            let width = n - 1 - j;
            let field = ((pattern >> first) & ((1u128 << width) - 1)) as u32;
            let mask = field << (j + 1);
            m[i * n + j] = mask;
            m[j * n + i] = mask;
        }
    }
}

/// Number of free pattern bits at dim n.
pub fn flag_pattern_bits(n: usize) -> u32 {
    flag_shape(n).bits
}

/// All flag-adapted structure constant tables at dim n that satisfy
/// Jacobi, in ascending pattern order. Strictly triangular adjoints make
/// every emitted algebra nilpotent.
pub struct FlagEnumeration {
    shape: FlagShape,
    scratch: Vec<u32>,
    next: u128,
}

impl Iterator for FlagEnumeration {
    type Item = LieAlgebraF2;

    fn next(&mut self) -> Option<LieAlgebraF2> {
        let n = self.shape.n;
        while self.next < (1u128 << self.shape.bits) {
            self.shape.decode_into(self.next, &mut self.scratch);
            self.next += 1;
            if table_jacobi_ok(n, &self.scratch) {
                return Some(table_to_algebra(n, &self.scratch));
            }
        }
        None
    }
}

pub fn enumerate_flag_nilpotent(n: usize) -> Result<FlagEnumeration, SearchError> {
    assert!(n >= 1, "dim must be positive");
    if n > MAX_EXHAUSTIVE_DIM {
        return Err(SearchError::DimTooLarge {
            dim: n,
            max: MAX_EXHAUSTIVE_DIM,
        });
    }
    let shape = flag_shape(n);
    let scratch = vec![0u32; n * n];
    Ok(FlagEnumeration {
        shape,
        scratch,
        next: 0,
    })
}

/// `count` seeded draws over flag patterns, Jacobi-filtered, so the
/// result holds at most `count` algebras. Deterministic for fixed seed.
pub fn sample_flag_nilpotent(
    n: usize,
    count: u64,
    seed: u64,
) -> Result<Vec<LieAlgebraF2>, SearchError> {
    assert!(n >= 1, "dim must be positive");
    if n > MAX_SAMPLED_DIM {
        return Err(SearchError::DimTooLarge {
            dim: n,
            max: MAX_SAMPLED_DIM,
        });
    }
    let shape = flag_shape(n);
    let mask = (1u128 << shape.bits) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = vec![0u32; n * n];
    let mut out = Vec::new();
    for _ in 0..count {
        let pattern = rng.gen::<u128>() & mask;
        shape.decode_into(pattern, &mut scratch);
        if table_jacobi_ok(n, &scratch) {
            out.push(table_to_algebra(n, &scratch));
        }
    }
    Ok(out)
}

// --- scans --------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

impl ScanMode {
    fn label(&self) -> String {
        match self {
            ScanMode::Exhaustive => "exhaustive".to_string(),
            ScanMode::Sampled { .. } => "sampled".to_string(),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            ScanMode::Exhaustive => None,
            ScanMode::Sampled { seed, .. } => Some(*seed),
        }
    }
}

/// Patterns to visit for one scan: the whole space or seeded draws.
fn scan_patterns(shape: &FlagShape, mode: ScanMode) -> Vec<u128> {
    match mode {
        ScanMode::Exhaustive => (0..1u128 << shape.bits).collect(),
        ScanMode::Sampled { count, seed } => {
            let mask = (1u128 << shape.bits) - 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| rng.gen::<u128>() & mask).collect()
        }
    }
}

/// Chunked deterministic parallel map: fixed chunk boundaries, in-order
/// merge, so the fold result does not depend on the worker count.
fn par_chunk_fold<T, F>(patterns: &[u128], per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[u128]) -> T + Sync + Send,
{
    patterns
        .par_chunks(CHUNK as usize)
        .map(per_chunk)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub dim: usize,
    pub mode: String,
    pub seed: Option<u64>,
    pub candidates: u64,
    pub jacobi_passed: u64,
    pub consistent: u64,
    pub w2_true: u64,
    pub w2_false: u64,
    pub counterexamples: Vec<LieRecord>,
    pub skipped_budget: u64,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

#[derive(Default)]
struct Problem1Partial {
    jacobi: u64,
    consistent: u64,
    w2_true: u64,
    w2_false: u64,
    skipped: u64,
    counterexamples: Vec<(u128, LieRecord)>,
}

/// Classify every candidate at dim n; counterexample certificates are
/// collected in ascending pattern order. Budget misses are counted as
/// skipped, not fatal.
pub fn scan_problem1(
    n: usize,
    mode: ScanMode,
    budget_order: usize,
) -> Result<ScanReport, SearchError> {
    assert!(n >= 1, "dim must be positive");
    let cap = match mode {
        ScanMode::Exhaustive => MAX_EXHAUSTIVE_DIM,
        ScanMode::Sampled { .. } => MAX_SAMPLED_DIM,
    };
    if n > cap {
        return Err(SearchError::DimTooLarge { dim: n, max: cap });
    }
    let shape = flag_shape(n);
    let patterns = scan_patterns(&shape, mode);

    let partials = par_chunk_fold(&patterns, |chunk| {
        let mut part = Problem1Partial::default();
        let mut scratch = vec![0u32; n * n];
        for &pattern in chunk {
            shape.decode_into(pattern, &mut scratch);
            if !table_jacobi_ok(n, &scratch) {
                continue;
            }
            part.jacobi += 1;
            let l = table_to_algebra(n, &scratch);
            match classify_lie(&l, budget_order) {
                Ok(v) => {
                    if v.w2 {
                        part.w2_true += 1;
                    } else {
                        part.w2_false += 1;
                    }
                    if v.verdict == Verdict::Consistent {
                        part.consistent += 1;
                    } else {
                        part.counterexamples
                            .push((pattern, LieRecord::from_algebra(&l)));
                    }
                }
                Err(SearchError::BudgetExceeded { .. }) => part.skipped += 1,
                Err(e) => panic!("unexpected scan failure: {e}"),
            }
        }
        part
    });

    let mut report = ScanReport {
        dim: n,
        mode: mode.label(),
        seed: mode.seed(),
        candidates: patterns.len() as u64,
        jacobi_passed: 0,
        consistent: 0,
        w2_true: 0,
        w2_false: 0,
        counterexamples: Vec::new(),
        skipped_budget: 0,
    };
    let mut certs = Vec::new();
    for p in partials {
        report.jacobi_passed += p.jacobi;
        report.consistent += p.consistent;
        report.w2_true += p.w2_true;
        report.w2_false += p.w2_false;
        report.skipped_budget += p.skipped;
        certs.extend(p.counterexamples);
    }
    certs.sort_by_key(|(pattern, _)| *pattern);
    report.counterexamples = certs.into_iter().map(|(_, rec)| rec).collect();
    Ok(report)
}

/// One loop failing the split search, with enough context to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsplitWitness {
    pub algebra: LieRecord,
    pub cayley: String,
    pub transcript: SplitTranscript,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsplitReport {
    pub dim: usize,
    pub mode: String,
    pub seed: Option<u64>,
    pub candidates: u64,
    pub jacobi_passed: u64,
    /// Loops passing the automorphic filter.
    pub automorphic: u64,
    /// Loops passing the filter with [Q : N_mu] = 4.
    pub index4: u64,
    pub witnesses: Vec<NonsplitWitness>,
}

impl NonsplitReport {
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

#[derive(Default)]
struct NonsplitPartial {
    jacobi: u64,
    automorphic: u64,
    index4: u64,
    witnesses: Vec<(u128, NonsplitWitness)>,
}

/// Hunt for loops that are commutative automorphic of exponent 2, have
/// middle nucleus of index exactly 4, and do not split nuclearly.
pub fn scan_nonsplit(n: usize, mode: ScanMode) -> Result<NonsplitReport, SearchError> {
    assert!(n >= 1, "dim must be positive");
    let cap = match mode {
        ScanMode::Exhaustive => 5,
        ScanMode::Sampled { .. } => MAX_NONSPLIT_DIM,
    };
    if n > cap {
        return Err(SearchError::DimTooLarge { dim: n, max: cap });
    }
    let shape = flag_shape(n);
    let patterns = scan_patterns(&shape, mode);
    let order = 1usize << n;

    let partials = par_chunk_fold(&patterns, |chunk| {
        let mut part = NonsplitPartial::default();
        let mut scratch = vec![0u32; n * n];
        for &pattern in chunk {
            shape.decode_into(pattern, &mut scratch);
            if !table_jacobi_ok(n, &scratch) {
                continue;
            }
            part.jacobi += 1;
            let l = table_to_algebra(n, &scratch);
            let q = lie_to_loop(&l, order).expect("nilpotent algebra within cap");
            if !q.is_automorphic(AutomorphicMethod::Direct) {
                continue;
            }
            part.automorphic += 1;
            if q.middle_nucleus().len() * 4 != order {
                continue;
            }
            part.index4 += 1;
            match q
                .nuclear_split(DEFAULT_CLOSURE_BUDGET)
                .expect("split search within budget at order <= 64")
            {
                SplitOutcome::Witness(_) => {}
                SplitOutcome::NonSplit(transcript) => {
                    part.witnesses.push((
                        pattern,
                        NonsplitWitness {
                            algebra: LieRecord::from_algebra(&l),
                            cayley: loop_to_cayley(&q),
                            transcript,
                        },
                    ));
                }
            }
        }
        part
    });

    let mut report = NonsplitReport {
        dim: n,
        mode: mode.label(),
        seed: mode.seed(),
        candidates: patterns.len() as u64,
        jacobi_passed: 0,
        automorphic: 0,
        index4: 0,
        witnesses: Vec::new(),
    };
    let mut witnesses = Vec::new();
    for p in partials {
        report.jacobi_passed += p.jacobi;
        report.automorphic += p.automorphic;
        report.index4 += p.index4;
        witnesses.extend(p.witnesses);
    }
    witnesses.sort_by_key(|(pattern, _)| *pattern);
    report.witnesses = witnesses.into_iter().map(|(_, w)| w).collect();
    Ok(report)
}

/// A dim-7 nilpotent algebra that violates W2: with u = [e0, e1] and
/// w = [e2, e1], the bracket [u, w] = e6 is nonzero. Low-dimensional
/// exhaustive scans never leave the W2-true branch, so tests use this to
/// reach the loop-building branch of `classify_lie`.
pub fn w2_negative_witness() -> LieAlgebraF2 {
    let e = |k: usize| BitVector::from_indices(7, &[k]);
    LieAlgebraF2::new(
        7,
        vec![
            ((0, 1), e(3)),
            ((1, 2), e(4)),
            ((0, 4), e(5)),
            ((2, 3), e(5)),
            ((1, 5), e(6)),
            ((3, 4), e(6)),
        ],
    )
    .expect("witness table is well formed")
}

// --- isomorphism and basis adaptation -----------------------------------

/// Brute force isomorphism test: some invertible P with
/// P [e_i, e_j]_a = [P e_i, P e_j]_b for all pairs. Series dims are a
/// fast negative filter. |GL(4, 2)| = 20160 keeps this comfortable.
pub fn lie_isomorphic(a: &LieAlgebraF2, b: &LieAlgebraF2) -> Result<bool, SearchError> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    let n = a.dim();
    if n > 4 {
        return Err(SearchError::DimTooLarge { dim: n, max: 4 });
    }
    if n == 0 {
        return Ok(true);
    }
    let sa = a.series();
    let sb = b.series();
    if sa.lower_central_dims != sb.lower_central_dims || sa.derived_dims != sb.derived_dims {
        return Ok(false);
    }
    let row_mask = (1u64 << n) - 1;
    'mats: for bits in 0..1u64 << (n * n) {
        let rows: Vec<BitVector> = (0..n)
            .map(|i| BitVector::from_bits(n, (bits >> (i * n)) & row_mask))
            .collect();
        let p = BitMatrix::from_rows(rows);
        if p.rank() < n {
            continue;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = p.apply(&a.bracket_basis(i, j));
                let rhs = b.bracket(&p.col(i), &p.col(j));
                if lhs != rhs {
                    continue 'mats;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

fn span_insert(basis: &mut Vec<BitVector>, mut v: BitVector) {
    for b in basis.iter() {
        if let Some(k) = b.first_one() {
            if v.get(k) {
                v.xor_with(b);
            }
        }
    }
    if !v.is_zero() {
        basis.push(v);
        basis.sort_by_key(|b| b.first_one());
    }
}

fn in_span(basis: &[BitVector], v: &BitVector) -> bool {
    let mut r = v.clone();
    for b in basis {
        if let Some(k) = b.first_one() {
            if r.get(k) {
                r.xor_with(b);
            }
        }
    }
    r.is_zero()
}

/// Change of basis making the structure constants flag-adapted: basis
/// vectors are ordered shallow to deep in the lower central series, so
/// [e_i, e_j] lands in span(e_{j+1}, .., e_{n-1}). None when the algebra
/// is not nilpotent.
pub fn flag_adapt(l: &LieAlgebraF2) -> Option<LieAlgebraF2> {
    let n = l.dim();
    let full: Vec<BitVector> = (0..n)
        .map(|k| BitVector::from_indices(n, &[k]))
        .collect();

    // Reduced bases of gamma_1 > gamma_2 > ... > gamma_c (nonzero terms).
    let mut chain: Vec<Vec<BitVector>> = vec![full.clone()];
    loop {
        let cur = chain.last().unwrap();
        let mut next = Vec::new();
        for e in &full {
            for g in cur {
                span_insert(&mut next, l.bracket(e, g));
            }
        }
        if next.len() == cur.len() {
            return None;
        }
        if next.is_empty() {
            break;
        }
        chain.push(next);
    }

    // Deepest layers first, each extending the span of everything deeper;
    // reversing puts the basis in shallow-to-deep order.
    let mut picked: Vec<BitVector> = Vec::new();
    let mut cols: Vec<BitVector> = Vec::new();
    for layer in chain.iter().rev() {
        for v in layer {
            if !in_span(&picked, v) {
                span_insert(&mut picked, v.clone());
                cols.push(v.clone());
            }
        }
    }
    cols.reverse();
    let p = BitMatrix::from_cols(cols);
    let adapted = l.change_basis(&p).expect("flag basis is invertible");
    for ((_, j), v) in adapted.entries() {
        debug_assert!(
            v.ones().all(|t| t > j),
            "flag adaptation produced a non-flag entry"
        );
    }
    Some(adapted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Catalog;

    fn catalog(kind: Catalog) -> LieAlgebraF2 {
        LieAlgebraF2::catalog_make(kind).unwrap()
    }

    #[test]
    fn pattern_bits_by_dim() {
        let bits: Vec<u32> = (2..=9).map(flag_pattern_bits).collect();
        assert_eq!(bits, vec![0, 1, 4, 10, 20, 35, 56, 84]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_flag_nilpotent(2).unwrap().count(), 1);
        assert_eq!(enumerate_flag_nilpotent(3).unwrap().count(), 2);
        assert_eq!(enumerate_flag_nilpotent(4).unwrap().count(), 16);
        assert_eq!(enumerate_flag_nilpotent(5).unwrap().count(), 448);
        assert!(matches!(
            enumerate_flag_nilpotent(7),
            Err(SearchError::DimTooLarge { dim: 7, max: 6 })
        ));
    }

    #[test]
    fn enumerated_algebras_validate_and_are_nilpotent() {
        for l in enumerate_flag_nilpotent(4).unwrap() {
            l.validate().unwrap();
            assert!(l.series().nilpotent);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_flag_nilpotent(5, 100, 1).unwrap();
        let b = sample_flag_nilpotent(5, 100, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.len() <= 100);
        assert!(matches!(
            sample_flag_nilpotent(10, 1, 0),
            Err(SearchError::DimTooLarge { dim: 10, max: 9 })
        ));
    }

    #[test]
    fn sampling_dim3_hits_only_the_two_tables() {
        let zero = catalog(Catalog::Abelian(3));
        let heis = catalog(Catalog::Heisenberg);
        let draws = sample_flag_nilpotent(3, 10_000, 3).unwrap();
        assert_eq!(draws.len(), 10_000);
        assert!(draws.iter().all(|l| *l == zero || *l == heis));
        assert!(draws.iter().any(|l| *l == zero));
        assert!(draws.iter().any(|l| *l == heis));
    }

    #[test]
    fn sampled_high_dims_validate() {
        // Jacobi cuts hard above dim 6: about 7 draws in 10^4 survive at
        // dim 7 and none are expected at dim 9 with this few draws.
        let draws = sample_flag_nilpotent(7, 20_000, 0).unwrap();
        assert!(!draws.is_empty());
        for l in &draws {
            l.validate().unwrap();
            assert!(l.series().nilpotent);
        }
        let rare = sample_flag_nilpotent(9, 100, 7).unwrap();
        assert!(rare.len() <= 100);
        for l in &rare {
            l.validate().unwrap();
        }
    }

    #[test]
    fn classify_catalog() {
        let zero = classify_lie(&catalog(Catalog::Abelian(4)), DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(zero.verdict, Verdict::Consistent);
        assert!(zero.w2 && zero.w2plus == Some(true));

        let heis = classify_lie(&catalog(Catalog::Heisenberg), DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(heis.verdict, Verdict::Consistent);
        assert!(heis.w2 && heis.w2plus == Some(true));

        let free23 = catalog(Catalog::FreeNilpotent { gens: 2, class: 3 });
        let v = classify_lie(&free23, DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(v.verdict, Verdict::Consistent);
        assert!(v.w2 && v.w2plus == Some(true));
    }

    #[test]
    fn classify_w2_negative_witness_and_budget() {
        let l = w2_negative_witness();
        l.validate().unwrap();
        assert!(l.series().nilpotent);
        assert!(!l.check_w2());
        assert!(matches!(
            classify_lie(&l, 64),
            Err(SearchError::BudgetExceeded {
                order: 128,
                cap: 64
            })
        ));
        let v = classify_lie(&l, DEFAULT_BUDGET_ORDER).unwrap();
        assert!(!v.w2);
        assert_eq!(v.w2plus, None);
        assert_eq!(v.w2minus, Some(false));
        assert_eq!(v.verdict, Verdict::Consistent);
    }

    #[test]
    fn scan_problem1_small_dims() {
        let r3 = scan_problem1(3, ScanMode::Exhaustive, DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(
            (r3.candidates, r3.jacobi_passed, r3.consistent),
            (2, 2, 2)
        );
        assert!(r3.counterexamples.is_empty());
        assert_eq!(r3.skipped_budget, 0);

        let r4 = scan_problem1(4, ScanMode::Exhaustive, DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(
            (r4.candidates, r4.jacobi_passed, r4.consistent),
            (16, 16, 16)
        );
        assert_eq!(r4.w2_true + r4.w2_false, 16);
    }

    #[test]
    fn scan_problem1_dim5() {
        let r = scan_problem1(5, ScanMode::Exhaustive, DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(r.candidates, 1024);
        assert_eq!(r.jacobi_passed, 448);
        assert_eq!(r.consistent, 448);
        assert!(r.counterexamples.is_empty());
        // Every Jacobi survivor at dim 5 happens to satisfy W2; the W2-
        // branch first fires at dim 6 (and on w2_negative_witness).
        assert_eq!((r.w2_true, r.w2_false), (448, 0));
    }

    #[test]
    fn scan_problem1_sampled_dim7_covers_both_branches() {
        let mode = ScanMode::Sampled {
            count: 20_000,
            seed: 2,
        };
        let r = scan_problem1(7, mode, DEFAULT_BUDGET_ORDER).unwrap();
        assert_eq!(r.candidates, 20_000);
        assert_eq!(r.jacobi_passed, 9);
        assert_eq!((r.w2_true, r.w2_false), (8, 1));
        assert_eq!(r.consistent, 9);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn scan_reports_identical_across_worker_counts() {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    scan_problem1(5, ScanMode::Exhaustive, DEFAULT_BUDGET_ORDER)
                        .unwrap()
                        .to_json()
                })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn scan_problem1_sampled_reports_budget_skips() {
        let mode = ScanMode::Sampled {
            count: 20_000,
            seed: 2,
        };
        // Order 128 loops against a cap of 64: every W2-false draw skips.
        let r = scan_problem1(7, mode, 64).unwrap();
        assert_eq!(r.mode, "sampled");
        assert_eq!(r.seed, Some(2));
        assert_eq!(r.skipped_budget, 1);
        assert_eq!(r.w2_false, 0, "skipped draws are not branch-counted");
        assert_eq!(r.consistent + r.skipped_budget, r.jacobi_passed);
    }

    #[test]
    fn scan_nonsplit_small_dims_are_empty() {
        let r2 = scan_nonsplit(2, ScanMode::Exhaustive).unwrap();
        assert!(r2.witnesses.is_empty());
        let r3 = scan_nonsplit(3, ScanMode::Exhaustive).unwrap();
        assert_eq!(r3.jacobi_passed, 2);
        assert!(r3.witnesses.is_empty());
        assert!(matches!(
            scan_nonsplit(6, ScanMode::Exhaustive),
            Err(SearchError::DimTooLarge { dim: 6, max: 5 })
        ));
    }

    #[test]
    fn iso_examples() {
        let zero3 = catalog(Catalog::Abelian(3));
        let heis = catalog(Catalog::Heisenberg);
        assert!(lie_isomorphic(&zero3, &zero3).unwrap());
        assert!(!lie_isomorphic(&heis, &zero3).unwrap());

        let a = LieAlgebraF2::new(4, vec![((0, 1), BitVector::from_indices(4, &[2]))])
            .unwrap();
        let b = LieAlgebraF2::new(4, vec![((0, 1), BitVector::from_indices(4, &[3]))])
            .unwrap();
        assert!(lie_isomorphic(&a, &b).unwrap());

        let dim5 = catalog(Catalog::Abelian(5));
        assert!(matches!(
            lie_isomorphic(&dim5, &dim5),
            Err(SearchError::DimTooLarge { dim: 5, max: 4 })
        ));
        assert!(!lie_isomorphic(&zero3, &catalog(Catalog::Abelian(4))).unwrap());
    }

    #[test]
    fn flag_adapt_scrambled_heisenberg() {
        // [e0, e2] = e1: not flag adapted (target 1 < j = 2).
        let l = LieAlgebraF2::new(3, vec![((0, 2), BitVector::from_indices(3, &[1]))])
            .unwrap();
        let adapted = flag_adapt(&l).expect("nilpotent");
        for ((_, j), v) in adapted.entries() {
            assert!(v.ones().all(|t| t > j));
        }
        assert!(lie_isomorphic(&l, &adapted).unwrap());
        assert!(lie_isomorphic(&adapted, &catalog(Catalog::Heisenberg)).unwrap());
    }

    #[test]
    fn flag_adapt_rejects_non_nilpotent() {
        // [e0, e1] = e1 is solvable but not nilpotent.
        let l = LieAlgebraF2::new(2, vec![((0, 1), BitVector::from_indices(2, &[1]))])
            .unwrap();
        assert!(flag_adapt(&l).is_none());
    }

    #[test]
    fn dense_pattern_roundtrip() {
        // Heisenberg in dense packing: pair (0,1) -> e2 is bit 2.
        let m = dense_table_from_pattern(3, 0b100);
        assert!(table_jacobi_ok(3, &m));
        assert!(table_nilpotent(3, &m));
        assert_eq!(table_to_algebra(3, &m), catalog(Catalog::Heisenberg));
        // [e0, e1] = e1 is not nilpotent.
        let bad = dense_table_from_pattern(3, 0b010);
        assert!(!table_nilpotent(3, &bad));
    }
}
