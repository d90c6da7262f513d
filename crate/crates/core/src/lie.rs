//! Lie algebras over F2 presented by structure constants, with the series
//! and bracket-vanishing properties that control when the derived loop
//! `x * y = x + y + [x, y]` exists and is automorphic.
//!
//! The table stores [e_i, e_j] only for i < j; alternation gives the rest
//! ([x, x] = 0, and [y, x] = [x, y] in characteristic 2).

use crate::gf2::{BitMatrix, BitVector};
use crate::hall;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("bracket pair ({i},{j}) out of range or not upper triangular")]
    BadPair { i: usize, j: usize },
    #[error("duplicate bracket pair ({i},{j})")]
    DuplicatePair { i: usize, j: usize },
    #[error("bracket value has dim {got}, algebra has dim {want}")]
    BadValueDim { got: usize, want: usize },
    #[error("Jacobi identity fails on basis triple ({i},{j},{k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("unsupported catalog parameters: {0}")]
    UnsupportedParams(String),
}

/// Lie algebra over F2 with structure constants [e_i, e_j] for i < j.
/// Construction checks the table shape; `validate` checks Jacobi.
#[derive(Clone, PartialEq, Eq)]
pub struct LieAlgebraF2 {
    dim: usize,
    // Triangular, indexed by pair_index(i, j) for i < j.
    table: Vec<BitVector>,
}

fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    i * (2 * dim - i - 1) / 2 + (j - i - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesReport {
    /// Dims of the lower central series, from gamma_1 = Q down to the
    /// first stable term (0 exactly when nilpotent).
    pub lower_central_dims: Vec<usize>,
    /// Dims of the derived series Q, Q', Q'', ...
    pub derived_dims: Vec<usize>,
    pub nilpotent: bool,
}

/// Which implementation of the W2+ test to run; both must agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum W2PlusMethod {
    /// Quantifier over basis quadruples.
    Direct,
    /// Q'' = 0, i.e. derived series length at most 3.
    DerivedSeries,
}

/// Catalog of built-in algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    Abelian(usize),
    Heisenberg,
    FreeNilpotent { gens: usize, class: usize },
}

impl LieAlgebraF2 {
    /// Build from sparse entries ((i, j), [e_i, e_j]); omitted pairs are 0.
    pub fn new(
        dim: usize,
        entries: Vec<((usize, usize), BitVector)>,
    ) -> Result<Self, LieError> {
        let pairs = dim * dim.saturating_sub(1) / 2;
        let mut table = vec![BitVector::zeros(dim); pairs];
        let mut seen = vec![false; pairs];
        for ((i, j), out) in entries {
            if i >= j || j >= dim {
                return Err(LieError::BadPair { i, j });
            }
            if out.dim() != dim {
                return Err(LieError::BadValueDim {
                    got: out.dim(),
                    want: dim,
                });
            }
            let p = pair_index(dim, i, j);
            if seen[p] {
                return Err(LieError::DuplicatePair { i, j });
            }
            seen[p] = true;
            table[p] = out;
        }
        Ok(LieAlgebraF2 { dim, table })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// [e_i, e_j] for any i, j (alternating extension of the table).
    pub fn bracket_basis(&self, i: usize, j: usize) -> BitVector {
        if i == j {
            return BitVector::zeros(self.dim);
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.table[pair_index(self.dim, a, b)].clone()
    }

    /// Nonzero entries in canonical (i, j) order, for serialization.
    pub fn entries(&self) -> Vec<((usize, usize), BitVector)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let v = &self.table[pair_index(self.dim, i, j)];
                if !v.is_zero() {
                    out.push(((i, j), v.clone()));
                }
            }
        }
        out
    }

    /// Jacobi on all basis triples; bilinearity extends it to all elements.
    pub fn validate(&self) -> Result<(), LieError> {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in (j + 1)..self.dim {
                    let mut acc = self.bracket_vec_basis(&self.bracket_basis(i, j), k);
                    acc.xor_with(&self.bracket_vec_basis(&self.bracket_basis(j, k), i));
                    acc.xor_with(&self.bracket_vec_basis(&self.bracket_basis(k, i), j));
                    if !acc.is_zero() {
                        return Err(LieError::Jacobi { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    fn bracket_vec_basis(&self, x: &BitVector, k: usize) -> BitVector {
        let mut acc = BitVector::zeros(self.dim);
        for i in x.ones() {
            acc.xor_with(&self.bracket_basis(i, k));
        }
        acc
    }

    /// Bilinear, alternating extension of the table.
    pub fn bracket(&self, x: &BitVector, y: &BitVector) -> BitVector {
        assert_eq!(x.dim(), self.dim);
        assert_eq!(y.dim(), self.dim);
        let mut acc = BitVector::zeros(self.dim);
        for k in y.ones() {
            acc.xor_with(&self.bracket_vec_basis(x, k));
        }
        acc
    }

    /// ad_x as a matrix: column k = [x, e_k].
    pub fn ad_matrix(&self, x: &BitVector) -> BitMatrix {
        let cols = (0..self.dim)
            .map(|k| self.bracket_vec_basis(x, k))
            .collect();
        BitMatrix::from_cols(cols)
    }

    /// Reduced basis of span(vecs).
    fn subspace_basis(&self, vecs: &[BitVector]) -> Vec<BitVector> {
        let mut basis: Vec<BitVector> = Vec::new();
        for v in vecs {
            let mut r = v.clone();
            for b in &basis {
                if let Some(k) = b.first_one() {
                    if r.get(k) {
                        r.xor_with(b);
                    }
                }
            }
            if !r.is_zero() {
                basis.push(r);
                basis.sort_by_key(|b| b.first_one());
            }
        }
        basis
    }

    /// [span(a), span(b)] as a reduced basis.
    fn bracket_spans(&self, a: &[BitVector], b: &[BitVector]) -> Vec<BitVector> {
        let mut prods = Vec::new();
        for x in a {
            for y in b {
                let v = self.bracket(x, y);
                if !v.is_zero() {
                    prods.push(v);
                }
            }
        }
        self.subspace_basis(&prods)
    }

    /// Lower central and derived series dims, until stabilization.
    pub fn series(&self) -> SeriesReport {
        let full: Vec<BitVector> = (0..self.dim)
            .map(|k| BitVector::from_indices(self.dim, &[k]))
            .collect();

        let mut lower_central_dims = vec![self.dim];
        let mut gamma = full.clone();
        loop {
            let next = self.bracket_spans(&full, &gamma);
            let d = next.len();
            if d == *lower_central_dims.last().unwrap() {
                break;
            }
            lower_central_dims.push(d);
            gamma = next;
            if d == 0 {
                break;
            }
        }

        let mut derived_dims = vec![self.dim];
        let mut q = full;
        loop {
            let next = self.bracket_spans(&q, &q);
            let d = next.len();
            if d == *derived_dims.last().unwrap() {
                break;
            }
            derived_dims.push(d);
            q = next;
            if d == 0 {
                break;
            }
        }

        let nilpotent = *lower_central_dims.last().unwrap() == 0;
        SeriesReport {
            lower_central_dims,
            derived_dims,
            nilpotent,
        }
    }

    /// (W1): id + ad_x invertible for every x. Automatic for nilpotent
    /// algebras (ad_x is nilpotent, so id + ad_x is unipotent).
    pub fn check_w1(&self) -> bool {
        if self.series().nilpotent {
            return true;
        }
        if self.dim > 20 {
            // 2^dim adjoints is out of reach; non-nilpotent inputs this
            // large are rejected upstream by the construction budget.
            panic!("check_w1 on non-nilpotent algebra of dim {} > 20", self.dim);
        }
        let id = BitMatrix::identity(self.dim);
        (0..1u64 << self.dim).all(|bits| {
            let x = BitVector::from_bits(self.dim, bits);
            id.add(&self.ad_matrix(&x)).rank() == self.dim
        })
    }

    /// First x with id + ad_x singular, scanning bit patterns upward.
    /// None for nilpotent algebras without scanning.
    pub fn w1_violation(&self) -> Option<BitVector> {
        if self.series().nilpotent {
            return None;
        }
        assert!(self.dim <= 20, "w1_violation scan capped at dim 20");
        let id = BitMatrix::identity(self.dim);
        (1..1u64 << self.dim)
            .map(|bits| BitVector::from_bits(self.dim, bits))
            .find(|x| id.add(&self.ad_matrix(x)).rank() < self.dim)
    }

    /// (W2): [[x, y], [z, y]] = 0 for all elements. Reduced to basis
    /// tuples by polarization: with x, z, l, m running over the basis,
    ///   (A) [[x, e_l], [z, e_l]] = 0, and
    ///   (B) [[x, e_l], [z, e_m]] = [[x, e_m], [z, e_l]].
    /// Expanding y = sum e_l in [[x,y],[z,y]] gives exactly the diagonal
    /// terms (A) and the symmetrized cross terms (B); conversely (A)+(B)
    /// make every element-quantified instance vanish.
    pub fn check_w2(&self) -> bool {
        let n = self.dim;
        for x in 0..n {
            for z in 0..n {
                for l in 0..n {
                    let xl = self.bracket_basis(x, l);
                    let zl = self.bracket_basis(z, l);
                    if !self.bracket(&xl, &zl).is_zero() {
                        return false;
                    }
                    for m in (l + 1)..n {
                        let zm = self.bracket_basis(z, m);
                        let xm = self.bracket_basis(x, m);
                        let mut diff = self.bracket(&xl, &zm);
                        diff.xor_with(&self.bracket(&xm, &zl));
                        if !diff.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Slow reference for (W2): quantifies [[x, y], [z, y]] = 0 over all
    /// element triples. Exists to certify the basis reduction in
    /// `check_w2`; use that one everywhere else.
    pub fn check_w2_elements(&self) -> bool {
        assert!(self.dim <= 10, "element-quantified W2 capped at dim 10");
        let elems: Vec<BitVector> = (0..1u64 << self.dim)
            .map(|bits| BitVector::from_bits(self.dim, bits))
            .collect();
        for x in &elems {
            for y in &elems {
                let xy = self.bracket(x, y);
                if xy.is_zero() {
                    continue;
                }
                for z in &elems {
                    let zy = self.bracket(z, y);
                    if !self.bracket(&xy, &zy).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// (W2+): [[x, y], [z, w]] = 0 for all elements; multilinear, so basis
    /// quadruples suffice directly.
    pub fn check_w2plus(&self, method: W2PlusMethod) -> bool {
        match method {
            W2PlusMethod::Direct => {
                let n = self.dim;
                for x in 0..n {
                    for y in (x + 1)..n {
                        let xy = self.bracket_basis(x, y);
                        if xy.is_zero() {
                            continue;
                        }
                        for z in 0..n {
                            for w in (z + 1)..n {
                                let zw = self.bracket_basis(z, w);
                                if !self.bracket(&xy, &zw).is_zero() {
                                    return false;
                                }
                            }
                        }
                    }
                }
                true
            }
            W2PlusMethod::DerivedSeries => {
                let s = self.series();
                // dim Q'': the stored series stops at stabilization, so a
                // missing third entry means the series already went stable
                // at its last recorded value.
                let d2 = if s.derived_dims.len() >= 3 {
                    s.derived_dims[2]
                } else {
                    *s.derived_dims.last().unwrap()
                };
                d2 == 0
            }
        }
    }

    /// {a : [[x, y], a] = 0 for all basis x, y}, encoded as masks.
    /// Under (W1) this is exactly the middle nucleus of the derived loop.
    pub fn bracket_annihilator(&self) -> Vec<u64> {
        assert!(self.dim <= 20, "annihilator enumeration capped at dim 20");
        let values: Vec<BitVector> = self
            .entries()
            .into_iter()
            .map(|(_, v)| v)
            .collect();
        (0..1u64 << self.dim)
            .filter(|&bits| {
                let a = BitVector::from_bits(self.dim, bits);
                values.iter().all(|v| self.bracket(v, &a).is_zero())
            })
            .collect()
    }

    pub fn catalog_make(kind: Catalog) -> Result<Self, LieError> {
        match kind {
            Catalog::Abelian(n) => LieAlgebraF2::new(n, Vec::new()),
            Catalog::Heisenberg => LieAlgebraF2::new(
                3,
                vec![((0, 1), BitVector::from_indices(3, &[2]))],
            ),
            Catalog::FreeNilpotent { gens, class } => {
                if !(2..=3).contains(&gens) || !(2..=4).contains(&class) {
                    return Err(LieError::UnsupportedParams(format!(
                        "free nilpotent requires gens in 2..=3 and class in 2..=4, got ({gens},{class})"
                    )));
                }
                let (dim, entries) = hall::free_nilpotent_table(gens, class);
                if dim > 32 {
                    return Err(LieError::UnsupportedParams(format!(
                        "free nilpotent ({gens},{class}) has dim {dim} > 32"
                    )));
                }
                let alg = LieAlgebraF2::new(dim, entries)?;
                alg.validate()?;
                Ok(alg)
            }
        }
    }

    /// Basis change: bracket'(x, y) = P^-1 [P x, P y]. P must be invertible.
    pub fn change_basis(&self, p: &BitMatrix) -> Result<LieAlgebraF2, crate::gf2::Gf2Error> {
        assert_eq!(p.rows(), self.dim);
        let pinv = p.invert()?;
        let mut entries = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let pi = p.col(i);
                let pj = p.col(j);
                let v = pinv.apply(&self.bracket(&pi, &pj));
                if !v.is_zero() {
                    entries.push(((i, j), v));
                }
            }
        }
        Ok(LieAlgebraF2::new(self.dim, entries).expect("shape preserved"))
    }
}

impl std::fmt::Debug for LieAlgebraF2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieAlgebraF2(dim {}, ", self.dim)?;
        let entries = self.entries();
        if entries.is_empty() {
            write!(f, "abelian)")?;
            return Ok(());
        }
        for ((i, j), v) in entries {
            let outs: Vec<String> = v.ones().map(|k| format!("e{k}")).collect();
            write!(f, "[e{i},e{j}]={} ", outs.join("+"))?;
        }
        write!(f, ")")
    }
}
