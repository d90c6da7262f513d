//! Finite loops as Cayley tables: axioms, divisions, inner mappings, the
//! automorphic property, nuclei and center, subloops, normality, and the
//! nuclear-splitting search.
//!
//! Elements are indices 0..n with the identity fixed at 0. Rows are left
//! factors: table[x][y] = x * y.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoopError {
    #[error("table is empty")]
    Empty,
    #[error("row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entry at ({row},{col}) out of range")]
    EntryOutOfRange { row: usize, col: usize },
    #[error("row {0} is not a permutation")]
    RowNotPermutation(usize),
    #[error("column {0} is not a permutation")]
    ColNotPermutation(usize),
    #[error("element 0 is not a two-sided identity (first failure at {0})")]
    NotIdentity(usize),
    #[error("closure budget exhausted after {0} closures")]
    SizeLimit(usize),
    #[error("subset is not closed under the loop operations")]
    NotASubloop,
}

/// Bijection of 0..n as an image array.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation(pub Vec<u16>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u16).collect())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u16;
        }
        Permutation(inv)
    }

    /// self after other: (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// Standard inner mapping generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerGen {
    /// L_{x,y} = L_{xy}^-1 L_x L_y
    L(u16, u16),
    /// R_{x,y} = R_{xy}^-1 R_y R_x
    R(u16, u16),
    /// T_x = L_x^-1 R_x
    T(u16),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutomorphicMethod {
    /// Every inner generator is a homomorphism on all pairs.
    Direct,
    /// The right section R = {R_y} satisfies s^-1 R s = R for every
    /// inner generator s.
    SectionConjugation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivisionSide {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub commutative: bool,
    pub exponent2: bool,
    pub associative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nuclei {
    pub commutant: Vec<u16>,
    pub left: Vec<u16>,
    pub middle: Vec<u16>,
    pub right: Vec<u16>,
    pub center: Vec<u16>,
}

/// Phi family read off a split witness, as permutations of the K part:
/// maps[i * h + j] sends the K-index of a to the K-index of phi_{i,j}(a).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructedPhi {
    pub k_elems: Vec<u16>,
    pub h_elems: Vec<u16>,
    pub maps: Vec<Vec<u16>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub k: Vec<u16>,
    pub h: Vec<u16>,
    pub phi: ReconstructedPhi,
}

/// Exhaustive-search transcript backing a nonsplit verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitTranscript {
    pub k_candidates: usize,
    pub h_candidates: usize,
    pub pairs_examined: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitOutcome {
    Witness(SplitWitness),
    NonSplit(SplitTranscript),
}

pub const DEFAULT_CLOSURE_BUDGET: usize = 1_000_000;

/// max_generators default for general subloop listings: ceil(log2 n) + 1.
pub fn default_max_generators(n: usize) -> usize {
    (n.max(1)).next_power_of_two().trailing_zeros() as usize + 1
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLoop {
    n: usize,
    table: Vec<u16>,
    commutative: bool,
}

impl FiniteLoop {
    /// Validate a square table: Latin rows/columns, identity at index 0.
    pub fn from_table(rows: &[Vec<u16>]) -> Result<Self, LoopError> {
        let n = rows.len();
        if n == 0 {
            return Err(LoopError::Empty);
        }
        if n > u16::MAX as usize {
            return Err(LoopError::NotSquare { row: 0, len: n, n: u16::MAX as usize });
        }
        let mut table = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LoopError::NotSquare { row: r, len: row.len(), n });
            }
            for (c, &v) in row.iter().enumerate() {
                if v as usize >= n {
                    return Err(LoopError::EntryOutOfRange { row: r, col: c });
                }
                table.push(v);
            }
        }
        for r in 0..n {
            let mut seen = vec![false; n];
            for c in 0..n {
                let v = table[r * n + c] as usize;
                if seen[v] {
                    return Err(LoopError::RowNotPermutation(r));
                }
                seen[v] = true;
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for r in 0..n {
                let v = table[r * n + c] as usize;
                if seen[v] {
                    return Err(LoopError::ColNotPermutation(c));
                }
                seen[v] = true;
            }
        }
        for x in 0..n {
            if table[x] as usize != x {
                return Err(LoopError::NotIdentity(x));
            }
            if table[x * n] as usize != x {
                return Err(LoopError::NotIdentity(x));
            }
        }
        let commutative =
            (0..n).all(|x| (x..n).all(|y| table[x * n + y] == table[y * n + x]));
        Ok(FiniteLoop { n, table, commutative })
    }

    /// Build and validate from a product function.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self, LoopError> {
        let rows: Vec<Vec<u16>> = (0..n)
            .map(|x| (0..n).map(|y| f(x, y) as u16).collect())
            .collect();
        Self::from_table(&rows)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    pub fn rows(&self) -> Vec<Vec<u16>> {
        (0..self.n)
            .map(|x| self.table[x * self.n..(x + 1) * self.n].to_vec())
            .collect()
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// a \ b (left) or b / a (right).
    pub fn divide(&self, side: DivisionSide, a: usize, b: usize) -> usize {
        match side {
            DivisionSide::Left => (0..self.n)
                .find(|&y| self.mul(a, y) == b)
                .expect("Latin row"),
            DivisionSide::Right => (0..self.n)
                .find(|&x| self.mul(x, a) == b)
                .expect("Latin column"),
        }
    }

    fn left_div_table(&self) -> Vec<u16> {
        let n = self.n;
        let mut ld = vec![0u16; n * n];
        for a in 0..n {
            for y in 0..n {
                ld[a * n + self.mul(a, y)] = y as u16;
            }
        }
        ld
    }

    fn right_div_table(&self) -> Vec<u16> {
        let n = self.n;
        let mut rd = vec![0u16; n * n];
        for x in 0..n {
            for a in 0..n {
                // rd[b][a] = x where x * a = b
                rd[self.mul(x, a) * n + a] = x as u16;
            }
        }
        rd
    }

    pub fn predicates(&self) -> Predicates {
        let n = self.n;
        let exponent2 = (0..n).all(|x| self.mul(x, x) == 0);
        let associative = 'assoc: {
            for x in 0..n {
                for y in 0..n {
                    let xy = self.mul(x, y);
                    for z in 0..n {
                        if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                            break 'assoc false;
                        }
                    }
                }
            }
            true
        };
        Predicates {
            commutative: self.commutative,
            exponent2,
            associative,
        }
    }

    /// Drive `f` over the inner generating set, stopping early when it
    /// returns false. The full set {L_{x,y}, R_{x,y}, T_x} in general; for
    /// a loop verified commutative only the n^2 maps {L_{x,y}} (then
    /// R_{x,y} = L_{y,x} and T_x = id).
    fn for_each_inner_gen(&self, mut f: impl FnMut(InnerGen, &[u16]) -> bool) -> bool {
        let n = self.n;
        // Inverse of each left translation row; rows are Latin.
        let mut inv_l = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                inv_l[x * n + self.mul(x, y)] = y as u16;
            }
        }
        let mut buf = vec![0u16; n];
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                let inv = &inv_l[xy * n..(xy + 1) * n];
                for (z, b) in buf.iter_mut().enumerate() {
                    *b = inv[self.mul(x, self.mul(y, z))];
                }
                if !f(InnerGen::L(x as u16, y as u16), &buf) {
                    return false;
                }
            }
        }
        if self.commutative {
            return true;
        }
        let mut inv_r = vec![0u16; n * n];
        for x in 0..n {
            for y in 0..n {
                inv_r[y * n + self.mul(x, y)] = x as u16;
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                let inv = &inv_r[xy * n..(xy + 1) * n];
                for (z, b) in buf.iter_mut().enumerate() {
                    *b = inv[self.mul(self.mul(z, x), y)];
                }
                if !f(InnerGen::R(x as u16, y as u16), &buf) {
                    return false;
                }
            }
        }
        for x in 0..n {
            let inv = &inv_l[x * n..(x + 1) * n];
            for (z, b) in buf.iter_mut().enumerate() {
                *b = inv[self.mul(z, x)];
            }
            if !f(InnerGen::T(x as u16), &buf) {
                return false;
            }
        }
        true
    }

    /// The inner mapping generators; 2n^2 + n maps in general, n^2 for a
    /// verified-commutative loop.
    pub fn inner_generators(&self) -> Vec<Permutation> {
        self.inner_generators_labeled()
            .into_iter()
            .map(|(_, p)| p)
            .collect()
    }

    pub fn inner_generators_labeled(&self) -> Vec<(InnerGen, Permutation)> {
        let mut out = Vec::new();
        self.for_each_inner_gen(|label, perm| {
            out.push((label, Permutation(perm.to_vec())));
            true
        });
        out
    }

    pub fn is_automorphic(&self, method: AutomorphicMethod) -> bool {
        self.automorphic_failure(method).is_none()
    }

    /// First inner generator that fails the test, if any.
    pub fn automorphic_failure(&self, method: AutomorphicMethod) -> Option<InnerGen> {
        let n = self.n;
        let mut failed = None;
        match method {
            AutomorphicMethod::Direct => {
                self.for_each_inner_gen(|label, g| {
                    for a in 0..n {
                        let ga = g[a] as usize;
                        for b in 0..n {
                            if g[self.mul(a, b)] as usize != self.mul(ga, g[b] as usize) {
                                failed = Some(label);
                                return false;
                            }
                        }
                    }
                    true
                });
            }
            AutomorphicMethod::SectionConjugation => {
                let sections: HashSet<Vec<u16>> = (0..n)
                    .map(|y| (0..n).map(|z| self.mul(z, y) as u16).collect())
                    .collect();
                let mut inv = vec![0u16; n];
                let mut conj = vec![0u16; n];
                self.for_each_inner_gen(|label, s| {
                    for (z, &v) in s.iter().enumerate() {
                        inv[v as usize] = z as u16;
                    }
                    for y in 0..n {
                        for z in 0..n {
                            conj[z] = inv[self.mul(s[z] as usize, y)];
                        }
                        if !sections.contains(&conj) {
                            failed = Some(label);
                            return false;
                        }
                    }
                    true
                });
            }
        }
        failed
    }

    fn commutant(&self) -> Vec<u16> {
        (0..self.n)
            .filter(|&a| (0..self.n).all(|x| self.mul(a, x) == self.mul(x, a)))
            .map(|a| a as u16)
            .collect()
    }

    fn nucleus_part(&self, which: DivisionSide, middle: bool) -> Vec<u16> {
        let n = self.n;
        (0..n)
            .filter(|&a| {
                (0..n).all(|x| {
                    (0..n).all(|y| {
                        if middle {
                            self.mul(self.mul(x, a), y) == self.mul(x, self.mul(a, y))
                        } else {
                            match which {
                                DivisionSide::Left => {
                                    self.mul(self.mul(a, x), y) == self.mul(a, self.mul(x, y))
                                }
                                DivisionSide::Right => {
                                    self.mul(self.mul(x, y), a) == self.mul(x, self.mul(y, a))
                                }
                            }
                        }
                    })
                })
            })
            .map(|a| a as u16)
            .collect()
    }

    /// Middle nucleus only; cheaper than `nuclei_and_center` when the
    /// other parts are not needed.
    pub fn middle_nucleus(&self) -> Vec<u16> {
        self.nucleus_part(DivisionSide::Left, true)
    }

    /// Brute-force commutant, three nuclei, and center
    /// Z = C  intersect  N_lambda  intersect  N_mu  intersect  N_rho.
    pub fn nuclei_and_center(&self) -> Nuclei {
        let commutant = self.commutant();
        let left = self.nucleus_part(DivisionSide::Left, false);
        let middle = self.nucleus_part(DivisionSide::Left, true);
        let right = self.nucleus_part(DivisionSide::Right, false);
        let all: HashSet<u16> = left
            .iter()
            .filter(|a| middle.contains(a) && right.contains(a))
            .copied()
            .collect();
        let center = commutant
            .iter()
            .filter(|a| all.contains(a))
            .copied()
            .collect();
        Nuclei {
            commutant,
            left,
            middle,
            right,
            center,
        }
    }

    /// Closure of `seed` under *, \, /; counts against `budget` closures
    /// via `counter`. Elements tracked in a bool mask plus worklist.
    fn closure(
        &self,
        seed: &[u16],
        ld: &[u16],
        rd: &[u16],
        counter: &mut usize,
        budget: usize,
    ) -> Result<Vec<u16>, LoopError> {
        *counter += 1;
        if *counter > budget {
            return Err(LoopError::SizeLimit(budget));
        }
        let n = self.n;
        let mut inside = vec![false; n];
        let mut elems: Vec<u16> = Vec::new();
        let mut queue: Vec<u16> = Vec::new();
        let push = |e: u16, inside: &mut Vec<bool>, elems: &mut Vec<u16>, queue: &mut Vec<u16>| {
            if !inside[e as usize] {
                inside[e as usize] = true;
                elems.push(e);
                queue.push(e);
            }
        };
        push(0, &mut inside, &mut elems, &mut queue);
        for &s in seed {
            push(s, &mut inside, &mut elems, &mut queue);
        }
        while let Some(g) = queue.pop() {
            let g = g as usize;
            // Pair g against everything currently inside, both orders.
            let mut i = 0;
            while i < elems.len() {
                let x = elems[i] as usize;
                for (a, b) in [(g, x), (x, g)] {
                    for v in [
                        self.table[a * n + b],
                        ld[a * n + b],
                        rd[a * n + b],
                    ] {
                        push(v, &mut inside, &mut elems, &mut queue);
                    }
                }
                i += 1;
            }
        }
        elems.sort_unstable();
        Ok(elems)
    }

    /// All distinct subloop closures reachable from at most `max_gens`
    /// generators, canonically sorted (size, then elements).
    pub fn subloops(&self, max_gens: usize, budget: usize) -> Result<Vec<Vec<u16>>, LoopError> {
        self.subloops_restricted(max_gens, budget, None)
    }

    /// Same, but generators drawn only from `allowed` when given.
    fn subloops_restricted(
        &self,
        max_gens: usize,
        budget: usize,
        allowed: Option<&[u16]>,
    ) -> Result<Vec<Vec<u16>>, LoopError> {
        let ld = self.left_div_table();
        let rd = self.right_div_table();
        let mut counter = 0usize;
        let pool: Vec<u16> = match allowed {
            Some(a) => a.to_vec(),
            None => (0..self.n as u16).collect(),
        };
        let trivial = self.closure(&[], &ld, &rd, &mut counter, budget)?;
        let mut found: HashSet<Vec<u16>> = HashSet::new();
        found.insert(trivial.clone());
        let mut frontier = vec![trivial];
        for _ in 0..max_gens {
            let mut next = Vec::new();
            for s in &frontier {
                for &g in &pool {
                    if s.binary_search(&g).is_ok() {
                        continue;
                    }
                    let mut seed = s.clone();
                    seed.push(g);
                    let c = self.closure(&seed, &ld, &rd, &mut counter, budget)?;
                    if found.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let mut out: Vec<Vec<u16>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    fn is_closed_subset(&self, elems: &[u16]) -> bool {
        if elems.binary_search(&0).is_err() {
            return false;
        }
        let inside: HashSet<u16> = elems.iter().copied().collect();
        for &a in elems {
            for &b in elems {
                let p = self.mul(a as usize, b as usize) as u16;
                let l = self.divide(DivisionSide::Left, a as usize, b as usize) as u16;
                let r = self.divide(DivisionSide::Right, a as usize, b as usize) as u16;
                if !inside.contains(&p) || !inside.contains(&l) || !inside.contains(&r) {
                    return false;
                }
            }
        }
        true
    }

    /// K is normal iff every inner generator maps it onto itself.
    pub fn is_normal(&self, k: &[u16]) -> Result<bool, LoopError> {
        let mut sorted = k.to_vec();
        sorted.sort_unstable();
        if !self.is_closed_subset(&sorted) {
            return Err(LoopError::NotASubloop);
        }
        let mut normal = true;
        self.for_each_inner_gen(|_, g| {
            if sorted
                .iter()
                .all(|&a| sorted.binary_search(&g[a as usize]).is_ok())
            {
                true
            } else {
                normal = false;
                false
            }
        });
        Ok(normal)
    }

    fn is_associative_on(&self, elems: &[u16]) -> bool {
        elems.iter().all(|&x| {
            elems.iter().all(|&y| {
                let xy = self.mul(x as usize, y as usize);
                elems.iter().all(|&z| {
                    self.mul(xy, z as usize)
                        == self.mul(x as usize, self.mul(y as usize, z as usize))
                })
            })
        })
    }

    /// Search for subgroups H, K with K normal, K <= N_mu(Q), H
    /// associative, Q = HK, H  intersect  K = {0}. K candidates run over
    /// subloops of N_mu largest-first; H ascending. On success the family
    /// phi_{i,j} is read back off coset-representative products.
    pub fn nuclear_split(&self, budget: usize) -> Result<SplitOutcome, LoopError> {
        let n = self.n;
        let max_gens = (n.max(1)).next_power_of_two().trailing_zeros() as usize;
        if self.predicates().associative {
            let k: Vec<u16> = (0..n as u16).collect();
            let h = vec![0u16];
            let phi = self
                .reconstruct_phi(&k, &h)
                .expect("trivial decomposition of a group");
            return Ok(SplitOutcome::Witness(SplitWitness { k, h, phi }));
        }
        let nmu = self.nucleus_part(DivisionSide::Left, true);
        let mut k_cands: Vec<Vec<u16>> = self
            .subloops_restricted(max_gens.min(nmu.len()), budget, Some(&nmu))?
            .into_iter()
            .filter(|k| n % k.len() == 0)
            .collect();
        k_cands.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        // Normality via the inner generators, computed once.
        let gens = self.inner_generators();
        let is_norm = |k: &Vec<u16>| {
            gens.iter().all(|g| {
                k.iter()
                    .all(|&a| k.binary_search(&(g.0[a as usize])).is_ok())
            })
        };
        k_cands.retain(is_norm);
        let h_cands = self.subloops(max_gens, budget)?;

        let mut transcript = SplitTranscript {
            k_candidates: k_cands.len(),
            h_candidates: h_cands.len(),
            pairs_examined: 0,
        };
        let mut covered = vec![false; n];
        for k in &k_cands {
            for h in &h_cands {
                if k.len() * h.len() != n {
                    continue;
                }
                transcript.pairs_examined += 1;
                let disjoint = h.iter().all(|&e| e == 0 || k.binary_search(&e).is_err());
                if !disjoint || !self.is_associative_on(h) {
                    continue;
                }
                covered.iter_mut().for_each(|c| *c = false);
                let mut count = 0;
                for &hh in h {
                    for &kk in k {
                        let p = self.mul(hh as usize, kk as usize);
                        if !covered[p] {
                            covered[p] = true;
                            count += 1;
                        }
                    }
                }
                if count == n {
                    let phi = self
                        .reconstruct_phi(k, h)
                        .expect("witness satisfies the decomposition conditions");
                    return Ok(SplitOutcome::Witness(SplitWitness {
                        k: k.clone(),
                        h: h.clone(),
                        phi,
                    }));
                }
            }
        }
        Ok(SplitOutcome::NonSplit(transcript))
    }

    /// phi_{i,j}(a) = K-part of (h_i k_a) h_j, with parts matched through
    /// the bijection q = h_i * k_a.
    fn reconstruct_phi(&self, k: &[u16], h: &[u16]) -> Option<ReconstructedPhi> {
        let n = self.n;
        let (kl, hl) = (k.len(), h.len());
        if kl * hl != n {
            return None;
        }
        // decomp[q] = (h index, k index)
        let mut decomp = vec![None; n];
        for (i, &hh) in h.iter().enumerate() {
            for (a, &kk) in k.iter().enumerate() {
                let q = self.mul(hh as usize, kk as usize);
                if decomp[q].is_some() {
                    return None;
                }
                decomp[q] = Some((i, a));
            }
        }
        if decomp.iter().any(|d| d.is_none()) {
            return None;
        }
        let mut maps = Vec::with_capacity(hl * hl);
        for &hi in h.iter() {
            for &hj in h.iter() {
                let mut m = vec![0u16; kl];
                for (a, &ka) in k.iter().enumerate() {
                    let q = self.mul(self.mul(hi as usize, ka as usize), hj as usize);
                    let (_, d) = decomp[q]?;
                    m[a] = d as u16;
                }
                maps.push(m);
            }
        }
        Some(ReconstructedPhi {
            k_elems: k.to_vec(),
            h_elems: h.to_vec(),
            maps,
        })
    }

    /// Rebuild the table from a split witness and compare: checks that
    /// (h_i k_a)(h_j k_b) = h_{i#j} k_{phi_{i,j}(a+b)} everywhere, where
    /// # is the H product and + the K product.
    pub fn verify_split_reconstruction(&self, w: &SplitWitness) -> bool {
        let (k, h, phi) = (&w.k, &w.h, &w.phi);
        let (kl, hl) = (k.len(), h.len());
        if kl * hl != self.n {
            return false;
        }
        let kpos = |e: usize| k.binary_search(&(e as u16)).ok();
        let hpos = |e: usize| h.iter().position(|&x| x as usize == e);
        for (i, &hi) in h.iter().enumerate() {
            for (j, &hj) in h.iter().enumerate() {
                let Some(ij) = hpos(self.mul(hi as usize, hj as usize)) else {
                    return false;
                };
                let m = &phi.maps[i * hl + j];
                for &ka in k.iter() {
                    for &kb in k.iter() {
                        let Some(ab) = kpos(self.mul(ka as usize, kb as usize)) else {
                            return false;
                        };
                        let lhs = self.mul(
                            self.mul(hi as usize, ka as usize),
                            self.mul(hj as usize, kb as usize),
                        );
                        let rhs = self.mul(
                            h[ij] as usize,
                            k[m[ab] as usize] as usize,
                        );
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl std::fmt::Debug for FiniteLoop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FiniteLoop order {}", self.n)?;
        for x in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|y| self.mul(x, y).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Order-5 negative control: valid Latin square with identity, but
    // nonassociative and not automorphic.
    pub fn t5() -> FiniteLoop {
        FiniteLoop::from_table(&[
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 3, 4, 0, 1],
            vec![3, 4, 1, 2, 0],
            vec![4, 2, 0, 1, 3],
        ])
        .unwrap()
    }

    fn elementary_abelian(k: usize) -> FiniteLoop {
        FiniteLoop::from_fn(1 << k, |x, y| x ^ y).unwrap()
    }

    fn klein() -> FiniteLoop {
        elementary_abelian(2)
    }

    #[test]
    fn validate_examples() {
        assert!(klein().order() == 4);
        assert!(t5().order() == 5);
        let dup = FiniteLoop::from_table(&[vec![0, 1], vec![1, 1]]);
        assert_eq!(dup, Err(LoopError::RowNotPermutation(1)));
        let no_id = FiniteLoop::from_table(&[vec![1, 0], vec![0, 1]]);
        assert!(no_id.is_err());
    }

    #[test]
    fn divide_examples() {
        let q = t5();
        for b in 0..5 {
            assert_eq!(q.divide(DivisionSide::Left, 0, b), b);
        }
        assert_eq!(q.divide(DivisionSide::Left, 1, 0), 1);
        let e = elementary_abelian(3);
        for a in 0..8 {
            assert_eq!(e.divide(DivisionSide::Left, a, 0), a);
        }
        // Defining identities, exhaustively.
        for q in [klein(), t5()] {
            let n = q.order();
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(q.mul(a, q.divide(DivisionSide::Left, a, b)), b);
                    assert_eq!(q.mul(q.divide(DivisionSide::Right, a, b), a), b);
                }
            }
        }
    }

    #[test]
    fn predicates_examples() {
        let p = elementary_abelian(3).predicates();
        assert!(p.commutative && p.exponent2 && p.associative);

        let q = t5();
        let p = q.predicates();
        assert!(!p.associative);
        // (1*1)*2 = 2 but 1*(1*2) = 4.
        assert_eq!(q.mul(q.mul(1, 1), 2), 2);
        assert_eq!(q.mul(1, q.mul(1, 2)), 4);
        assert!(!p.commutative);
        assert!(!p.exponent2);
    }

    #[test]
    fn inner_generator_counts() {
        let q = t5();
        let n = q.order();
        assert_eq!(q.inner_generators().len(), 2 * n * n + n);
        let e = elementary_abelian(2);
        assert_eq!(e.inner_generators().len(), 4 * 4);
        assert!(e.inner_generators().iter().all(|g| g.is_identity()));
    }

    #[test]
    fn t5_l11_is_l1_squared() {
        // 1*1 = 0 so L_{1,1} = L_0^-1 L_1 L_1 = L_1^2; the composite is
        // the 3-cycle (2 4 3), which happens to be an automorphism of T5
        // even though T5 itself is not automorphic.
        let q = t5();
        let gens = q.inner_generators_labeled();
        let (_, l11) = gens
            .iter()
            .find(|(l, _)| *l == InnerGen::L(1, 1))
            .unwrap();
        let l1 = Permutation((0..5).map(|z| q.mul(1, z) as u16).collect());
        assert_eq!(*l11, l1.compose(&l1));
        assert_eq!(l11.0, vec![0, 1, 4, 2, 3]);
        let auto = (0..5).all(|a| {
            (0..5).all(|b| {
                l11.apply(q.mul(a, b)) == q.mul(l11.apply(a), l11.apply(b))
            })
        });
        assert!(auto);
    }

    #[test]
    fn automorphic_examples() {
        assert!(elementary_abelian(3).is_automorphic(AutomorphicMethod::Direct));
        assert!(elementary_abelian(3).is_automorphic(AutomorphicMethod::SectionConjugation));
        let q = t5();
        assert!(!q.is_automorphic(AutomorphicMethod::Direct));
        assert!(!q.is_automorphic(AutomorphicMethod::SectionConjugation));
        assert_eq!(
            q.automorphic_failure(AutomorphicMethod::Direct),
            Some(InnerGen::L(1, 2))
        );
    }

    #[test]
    fn nuclei_examples() {
        let e = elementary_abelian(3);
        let nu = e.nuclei_and_center();
        let all: Vec<u16> = (0..8).collect();
        assert_eq!(nu.left, all);
        assert_eq!(nu.middle, all);
        assert_eq!(nu.right, all);
        assert_eq!(nu.center, all);

        let nu = t5().nuclei_and_center();
        assert_eq!(nu.center, vec![0]);
    }

    #[test]
    fn subloops_examples() {
        let k = klein();
        let subs = k.subloops(2, DEFAULT_CLOSURE_BUDGET).unwrap();
        assert_eq!(subs.len(), 5);
        assert_eq!(subs[0], vec![0]);
        assert_eq!(subs[4], vec![0, 1, 2, 3]);

        let q = t5();
        let subs = q.subloops(1, DEFAULT_CLOSURE_BUDGET).unwrap();
        assert!(subs.contains(&vec![0, 1]));
    }

    #[test]
    fn subloop_budget_respected() {
        let e = elementary_abelian(4);
        assert_eq!(
            e.subloops(4, 3),
            Err(LoopError::SizeLimit(3))
        );
    }

    #[test]
    fn normality_examples() {
        let e = elementary_abelian(3);
        for s in e.subloops(4, DEFAULT_CLOSURE_BUDGET).unwrap() {
            assert_eq!(e.is_normal(&s), Ok(true));
        }
        assert_eq!(e.is_normal(&[0, 1, 2]), Err(LoopError::NotASubloop));
    }

    #[test]
    fn group_splits_trivially() {
        let e = elementary_abelian(3);
        match e.nuclear_split(DEFAULT_CLOSURE_BUDGET).unwrap() {
            SplitOutcome::Witness(w) => {
                assert_eq!(w.k, (0..8).collect::<Vec<u16>>());
                assert_eq!(w.h, vec![0]);
                assert!(e.verify_split_reconstruction(&w));
            }
            SplitOutcome::NonSplit(_) => panic!("groups split"),
        }
    }

    #[test]
    fn inner_gens_fix_identity() {
        for q in [klein(), t5(), elementary_abelian(3)] {
            for g in q.inner_generators() {
                assert_eq!(g.apply(0), 0);
            }
        }
    }

    #[test]
    fn permutation_algebra() {
        let p = Permutation(vec![1, 2, 0]);
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(3));
        assert_eq!(p.inverse().compose(&p), Permutation::identity(3));
        assert_eq!(p.compose(&p).0, vec![2, 0, 1]);
    }
}
