//! Loop constructions: the Lie ring loop x∘y = x+y+[x,y], nuclear
//! semidirect products driven by a Phi family, the beta construction on
//! K⊕H with its predicted center, two explicit field-based examples, and
//! the X²=0 fixed-point construction.
//!
//! Product loops encode elements as K bits low, H bits high.

use crate::gf2::{BitMatrix, BitVector, FieldF2m, Gf2Error};
use crate::lie::{LieAlgebraF2, LieError};
use crate::loops::{AutomorphicMethod, FiniteLoop, LoopError};
use rand::Rng;
use thiserror::Error;

/// Largest loop `lie_to_loop` will materialize by default; the
/// automorphic check is Theta(n^4)-lookup-bounded, so bigger orders are
/// opt-in.
pub const DEFAULT_ORDER_CAP: usize = 1 << 13;

/// Product constructions verify their flags by brute force, so the
/// total dimension k_dim + h_dim stays desk-sized.
pub const MAX_PRODUCT_DIM: usize = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("W1 fails: id + ad_x is singular for x with bit pattern {x:#b}")]
    W1Violation { x: u64 },
    #[error("loop order {order} exceeds the cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("basis images beta(e_{i}) and beta(e_{j}) do not commute")]
    NonCommutingBeta { i: usize, j: usize },
    #[error("id + beta(i) is singular at i with bit pattern {i:#b}")]
    SingularIdPlusBeta { i: u64 },
    #[error("delta is not injective")]
    NotInjective,
    #[error("1 lies in the image of delta")]
    UnitInImage,
    #[error("GF(2^{d}) is not a proper subfield of GF(2^{m})")]
    BadSubfield { m: u32, d: u32 },
    #[error("x_{p} * x_{q} is nonzero, violating X^2 = 0")]
    XSquareNonzero { p: usize, q: usize },
    #[error("X contains no nonzero endomorphism")]
    DegenerateX,
    #[error("u fails the homomorphism test at pair ({x}, {y})")]
    Mismatch { x: usize, y: usize },
    #[error("{0}")]
    BadDims(String),
    #[error(transparent)]
    Phi(#[from] PhiConditionError),
    #[error(transparent)]
    Field(#[from] Gf2Error),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// x∘y = x + y + [x,y] on bit-encoded vectors. W1 guarantees the Latin
/// property: left division solves to y = (id+ad_x)^-1(z+x).
pub fn lie_to_loop(l: &LieAlgebraF2, max_order: usize) -> Result<FiniteLoop, ConstructError> {
    let dim = l.dim();
    if dim > 16 || 1usize << dim > max_order {
        return Err(ConstructError::OrderCap {
            order: 1usize.checked_shl(dim as u32).unwrap_or(usize::MAX),
            cap: max_order,
        });
    }
    if let Some(x) = l.w1_violation() {
        return Err(ConstructError::W1Violation { x: x.low_bits() });
    }
    let n = 1usize << dim;
    // pb[i][j] = [e_i, e_j] as bits; symmetric since char 2.
    let mut pb = vec![0u64; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                pb[i * dim + j] = l.bracket_basis(i, j).low_bits();
            }
        }
    }
    let mut rows: Vec<Vec<u16>> = vec![vec![0u16; n]; n];
    let mut adx = vec![0u64; dim];
    for (x, row) in rows.iter_mut().enumerate() {
        for (j, a) in adx.iter_mut().enumerate() {
            let mut acc = 0u64;
            for i in 0..dim {
                if (x >> i) & 1 == 1 {
                    acc ^= pb[i * dim + j];
                }
            }
            *a = acc;
        }
        // Walk y in Gray-code order so [x, y] updates in O(1) per step.
        let mut br = 0u64;
        for t in 0..n {
            let y = t ^ (t >> 1);
            if t > 0 {
                br ^= adx[t.trailing_zeros() as usize];
            }
            row[y] = (x as u64 ^ y as u64 ^ br) as u16;
        }
    }
    Ok(FiniteLoop::from_table(&rows)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiCondition {
    Invertible,
    Symmetry,
    Unit,
    Commute,
    Composition,
    Sum,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("phi family violates {condition:?} at index tuple {tuple:?}")]
pub struct PhiConditionError {
    pub condition: PhiCondition,
    pub tuple: Vec<u64>,
}

/// Family of K-automorphisms indexed by H x H, H = F2^{h_dim}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiFamily {
    k_dim: usize,
    h_dim: usize,
    maps: Vec<BitMatrix>,
}

impl PhiFamily {
    pub fn from_fn(
        k_dim: usize,
        h_dim: usize,
        mut f: impl FnMut(u64, u64) -> BitMatrix,
    ) -> Self {
        let h_ord = 1usize << h_dim;
        let mut maps = Vec::with_capacity(h_ord * h_ord);
        for i in 0..h_ord as u64 {
            for j in 0..h_ord as u64 {
                maps.push(f(i, j));
            }
        }
        PhiFamily { k_dim, h_dim, maps }
    }

    pub fn identity(k_dim: usize, h_dim: usize) -> Self {
        Self::from_fn(k_dim, h_dim, |_, _| BitMatrix::identity(k_dim))
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn h_order(&self) -> usize {
        1 << self.h_dim
    }

    pub fn map(&self, i: u64, j: u64) -> &BitMatrix {
        &self.maps[i as usize * self.h_order() + j as usize]
    }
}

/// The five family conditions in their characteristic-2 form: symmetry,
/// unit, pairwise commuting, the composition law
/// φ_{i,j+k}∘φ_{j,k} = φ_{k,i+j}∘φ_{i,j}, and the three-term sum
/// φ_{i,j+k} + φ_{j,i+k} + φ_{k,i+j} = id (the doubled term drops out).
/// Invertibility of every member is checked first.
pub fn validate_phi_family(phi: &PhiFamily) -> Result<(), PhiConditionError> {
    let h = phi.h_order() as u64;
    let k = phi.k_dim;
    let fail = |condition, tuple: &[u64]| PhiConditionError {
        condition,
        tuple: tuple.to_vec(),
    };
    for i in 0..h {
        for j in 0..h {
            let m = phi.map(i, j);
            if m.rows() != k || m.cols() != k {
                return Err(fail(PhiCondition::Invertible, &[i, j]));
            }
            if m.invert().is_err() {
                return Err(fail(PhiCondition::Invertible, &[i, j]));
            }
        }
    }
    for i in 0..h {
        for j in i..h {
            if phi.map(i, j) != phi.map(j, i) {
                return Err(fail(PhiCondition::Symmetry, &[i, j]));
            }
        }
    }
    let id = BitMatrix::identity(k);
    for i in 0..h {
        if *phi.map(0, i) != id {
            return Err(fail(PhiCondition::Unit, &[i]));
        }
    }
    for a in 0..h * h {
        for b in a + 1..h * h {
            let (p, q) = (phi.map(a / h, a % h), phi.map(b / h, b % h));
            if p.mul(q) != q.mul(p) {
                return Err(fail(PhiCondition::Commute, &[a / h, a % h, b / h, b % h]));
            }
        }
    }
    for i in 0..h {
        for j in 0..h {
            for l in 0..h {
                let lhs = phi.map(i, j ^ l).mul(phi.map(j, l));
                let rhs = phi.map(l, i ^ j).mul(phi.map(i, j));
                if lhs != rhs {
                    return Err(fail(PhiCondition::Composition, &[i, j, l]));
                }
                let sum = phi
                    .map(i, j ^ l)
                    .add(phi.map(j, i ^ l))
                    .add(phi.map(l, i ^ j));
                if sum != id {
                    return Err(fail(PhiCondition::Sum, &[i, j, l]));
                }
            }
        }
    }
    Ok(())
}

fn check_product_dims(k_dim: usize, h_dim: usize) -> Result<(), ConstructError> {
    if k_dim + h_dim > MAX_PRODUCT_DIM {
        return Err(ConstructError::BadDims(format!(
            "k_dim {k_dim} + h_dim {h_dim} exceeds the supported total {MAX_PRODUCT_DIM}"
        )));
    }
    Ok(())
}

/// (a,i) ⋆ (b,j) = (φ_{i,j}(a+b), i+j). Validates the family, builds the
/// order-2^{k+h} table, and re-derives (rather than assumes) that the
/// K part is a normal subloop inside the middle nucleus.
pub fn nuclear_semidirect(phi: &PhiFamily) -> Result<FiniteLoop, ConstructError> {
    validate_phi_family(phi)?;
    let (k, h) = (phi.k_dim, phi.h_dim);
    check_product_dims(k, h)?;
    let (k_ord, h_ord) = (1usize << k, 1usize << h);
    // phiap[(i, j)][v] = φ_{i,j}(v) as bits.
    let mut phiap = Vec::with_capacity(h_ord * h_ord);
    for i in 0..h_ord {
        for j in 0..h_ord {
            let m = phi.map(i as u64, j as u64);
            let tab: Vec<u16> = (0..k_ord)
                .map(|v| m.apply(&BitVector::from_bits(k, v as u64)).low_bits() as u16)
                .collect();
            phiap.push(tab);
        }
    }
    let n = k_ord * h_ord;
    let kmask = k_ord - 1;
    let q = FiniteLoop::from_fn(n, |x, y| {
        let (a, i) = (x & kmask, x >> k);
        let (b, j) = (y & kmask, y >> k);
        let low = phiap[i * h_ord + j][a ^ b] as usize;
        low | ((i ^ j) << k)
    })?;
    let kpart: Vec<u16> = (0..k_ord as u16).collect();
    let nmu = q.middle_nucleus();
    assert!(
        kpart.iter().all(|e| nmu.binary_search(e).is_ok()),
        "K part escapes the middle nucleus"
    );
    assert_eq!(q.is_normal(&kpart), Ok(true), "K part is not normal");
    Ok(q)
}

/// Linear map H -> End(K) given by its images on the H basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaMap {
    k_dim: usize,
    h_dim: usize,
    mats: Vec<BitMatrix>,
}

impl BetaMap {
    pub fn new(k_dim: usize, h_dim: usize, mats: Vec<BitMatrix>) -> Result<Self, ConstructError> {
        if mats.len() != h_dim {
            return Err(ConstructError::BadDims(format!(
                "expected {h_dim} basis matrices, got {}",
                mats.len()
            )));
        }
        if mats
            .iter()
            .any(|m| m.rows() != k_dim || m.cols() != k_dim)
        {
            return Err(ConstructError::BadDims(format!(
                "beta matrices must be {k_dim} x {k_dim}"
            )));
        }
        Ok(BetaMap { k_dim, h_dim, mats })
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn basis_images(&self) -> &[BitMatrix] {
        &self.mats
    }

    /// β(i) by linear extension over the bits of i.
    pub fn beta(&self, i: u64) -> BitMatrix {
        let mut acc = BitMatrix::zeros(self.k_dim, self.k_dim);
        for (l, m) in self.mats.iter().enumerate() {
            if (i >> l) & 1 == 1 {
                acc = acc.add(m);
            }
        }
        acc
    }

    /// Condition (i): basis images commute pairwise (linearity extends
    /// this to all of H). Condition (ii): id + β(i) invertible for every
    /// i in F2^{h_dim} — checked over all 2^{h_dim} elements because
    /// invertibility does not propagate linearly.
    pub fn validate(&self) -> Result<(), ConstructError> {
        for i in 0..self.h_dim {
            for j in i + 1..self.h_dim {
                if self.mats[i].mul(&self.mats[j]) != self.mats[j].mul(&self.mats[i]) {
                    return Err(ConstructError::NonCommutingBeta { i, j });
                }
            }
        }
        let id = BitMatrix::identity(self.k_dim);
        for i in 0..1u64 << self.h_dim {
            if id.add(&self.beta(i)).invert().is_err() {
                return Err(ConstructError::SingularIdPlusBeta { i });
            }
        }
        Ok(())
    }
}

/// The underlying bracket [a⊕i, b⊕j] = (β(j)a + β(i)b) ⊕ 0 on K⊕H. It
/// passes Lie validation exactly when the basis images commute.
pub fn beta_bracket_algebra(b: &BetaMap) -> Result<LieAlgebraF2, LieError> {
    let (k, h) = (b.k_dim, b.h_dim);
    let dim = k + h;
    let mut entries = Vec::new();
    // Basis vectors 0..k span K, the rest span H; only mixed pairs
    // bracket nontrivially: [e_i ⊕ 0, 0 ⊕ e_l] = β(e_l) e_i ⊕ 0.
    for i in 0..k {
        for l in 0..h {
            let bits = b.mats[l]
                .apply(&BitVector::from_bits(k, 1 << i))
                .low_bits();
            if bits != 0 {
                entries.push(((i, k + l), BitVector::from_bits(dim, bits)));
            }
        }
    }
    LieAlgebraF2::new(dim, entries)
}

/// (a⊕i) * (b⊕j) = (a + b + β(j)a + β(i)b) ⊕ (i+j). The commutative,
/// exponent-2, and automorphic flags are re-checked on the finished
/// table, never taken on faith from the construction.
pub fn beta_loop(b: &BetaMap) -> Result<FiniteLoop, ConstructError> {
    b.validate()?;
    let (k, h) = (b.k_dim, b.h_dim);
    check_product_dims(k, h)?;
    let (k_ord, h_ord) = (1usize << k, 1usize << h);
    // bap[i][a] = β(i) a as bits.
    let bap: Vec<Vec<u16>> = (0..h_ord as u64)
        .map(|i| {
            let m = b.beta(i);
            (0..k_ord)
                .map(|a| m.apply(&BitVector::from_bits(k, a as u64)).low_bits() as u16)
                .collect()
        })
        .collect();
    let kmask = k_ord - 1;
    let q = FiniteLoop::from_fn(k_ord * h_ord, |x, y| {
        let (a, i) = (x & kmask, x >> k);
        let (bb, j) = (y & kmask, y >> k);
        let low = a ^ bb ^ bap[j][a] as usize ^ bap[i][bb] as usize;
        low | ((i ^ j) << k)
    })?;
    let p = q.predicates();
    assert!(p.commutative, "beta loop must be commutative");
    assert!(p.exponent2, "beta loop must have exponent 2");
    assert!(
        q.is_automorphic(AutomorphicMethod::Direct),
        "beta loop must be automorphic"
    );
    Ok(q)
}

/// Predicted center of a beta loop. (a,i) is central iff every φ_{j,k}
/// fixes a and every φ_{i,j} is the identity, which in terms of β reads
/// β(j)β(k)a = 0 and β(i)β(j) = 0. Bilinearity reduces both to basis
/// images, so the K part is the common kernel of the pairwise products
/// β(e_p)β(e_q), the H part collects i with β(i)β(e_l) = 0 for all l,
/// and the center is their direct sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedCenter {
    pub k_basis: Vec<BitVector>,
    pub h_part: Vec<u64>,
}

impl PredictedCenter {
    /// Element indices in the K-low/H-high encoding, sorted.
    pub fn elements(&self, k_dim: usize) -> Vec<u16> {
        let mut out = Vec::new();
        for combo in 0..1u64 << self.k_basis.len() {
            let mut a = 0u64;
            for (t, v) in self.k_basis.iter().enumerate() {
                if (combo >> t) & 1 == 1 {
                    a ^= v.low_bits();
                }
            }
            for &i in &self.h_part {
                out.push((a | (i << k_dim)) as u16);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn predicted_center(b: &BetaMap) -> PredictedCenter {
    let k = b.k_dim;
    let mut products = Vec::new();
    for (p, bp) in b.mats.iter().enumerate() {
        for bq in &b.mats[p..] {
            products.push(bp.mul(bq));
        }
    }
    let refs: Vec<&BitMatrix> = products.iter().collect();
    let k_basis = if refs.is_empty() {
        BitMatrix::zeros(0, k).nullspace()
    } else {
        BitMatrix::stack_rows(&refs).nullspace()
    };
    let zero = BitMatrix::zeros(k, k);
    let h_part = (0..1u64 << b.h_dim)
        .filter(|&i| {
            let bi = b.beta(i);
            b.mats.iter().all(|bl| bi.mul(bl) == zero)
        })
        .collect();
    PredictedCenter { k_basis, h_part }
}

/// φ_{i,j} = (id + β(i+j))^-1 (id + β(i)) (id + β(j)).
pub fn phi_from_beta(b: &BetaMap) -> Result<PhiFamily, ConstructError> {
    b.validate()?;
    let id = BitMatrix::identity(b.k_dim);
    Ok(PhiFamily::from_fn(b.k_dim, b.h_dim, |i, j| {
        let inv = id
            .add(&b.beta(i ^ j))
            .invert()
            .expect("id + beta(i) invertible after validate");
        inv.mul(&id.add(&b.beta(i))).mul(&id.add(&b.beta(j)))
    }))
}

/// u(a⊕i) = (id + β(i))a ⊕ i carries the nuclear semidirect product of
/// the derived Phi family onto the beta loop. Checks bijectivity and
/// the homomorphism identity over all pairs.
pub fn u_isomorphism_check(b: &BetaMap) -> Result<(), ConstructError> {
    let phi = phi_from_beta(b)?;
    validate_phi_family(&phi)?;
    let star = nuclear_semidirect(&phi)?;
    let bloop = beta_loop(b)?;
    let (k, h) = (b.k_dim, b.h_dim);
    let (k_ord, n) = (1usize << k, 1usize << (k + h));
    let id = BitMatrix::identity(k);
    let mut u = vec![0usize; n];
    let mut seen = vec![false; n];
    for i in 0..1usize << h {
        let m = id.add(&b.beta(i as u64));
        for a in 0..k_ord {
            let ua = m.apply(&BitVector::from_bits(k, a as u64)).low_bits() as usize;
            let x = a | (i << k);
            u[x] = ua | (i << k);
            assert!(!seen[u[x]], "u must be injective: id + beta(i) invertible");
            seen[u[x]] = true;
        }
    }
    for x in 0..n {
        for y in 0..n {
            if u[star.mul(x, y)] != bloop.mul(u[x], u[y]) {
                return Err(ConstructError::Mismatch { x, y });
            }
        }
    }
    Ok(())
}

/// β(i) = multiplication by δ(i) on a field K of characteristic 2, with
/// δ injective and 1 outside its image; both conditions are what make
/// id + β(i) invertible for every i.
pub fn example1_loop(
    f: &FieldF2m,
    delta_images: &[u64],
) -> Result<(FiniteLoop, BetaMap), ConstructError> {
    let m = f.degree() as usize;
    let h = delta_images.len();
    check_product_dims(m, h)?;
    // Injectivity of the linear extension = independence of the images.
    if h > 0 {
        let cols: Vec<BitVector> = delta_images
            .iter()
            .map(|&c| BitVector::from_bits(m, c))
            .collect();
        if BitMatrix::from_cols(cols).rank() < h {
            return Err(ConstructError::NotInjective);
        }
    }
    for combo in 1..1u64 << h {
        let mut img = 0u64;
        for (l, &c) in delta_images.iter().enumerate() {
            if (combo >> l) & 1 == 1 {
                img ^= c;
            }
        }
        if img == 1 {
            return Err(ConstructError::UnitInImage);
        }
    }
    let mats: Vec<BitMatrix> = delta_images
        .iter()
        .map(|&c| f.mul_endomorphism(c))
        .collect();
    let beta = BetaMap::new(m, h, mats)?;
    let q = beta_loop(&beta)?;
    if h > 0 {
        let z = q.nuclei_and_center().center;
        assert_eq!(z, vec![0], "example 1 loops are centerless");
    }
    Ok((q, beta))
}

/// Deterministic δ images for the CLI: the smallest field elements, in
/// integer order, that stay independent and keep 1 out of the span.
pub fn canonical_delta(f: &FieldF2m, h_dim: usize) -> Result<Vec<u64>, ConstructError> {
    let m = f.degree() as usize;
    if h_dim >= m {
        return Err(ConstructError::BadDims(format!(
            "h_dim {h_dim} admits no 1-avoiding subspace of GF(2^{m})"
        )));
    }
    let mut images: Vec<u64> = Vec::new();
    let mut span: Vec<u64> = vec![0];
    for c in 2..f.order() {
        if images.len() == h_dim {
            break;
        }
        if span.contains(&c) {
            continue;
        }
        if span.iter().any(|&s| (s ^ c) == 1) {
            continue;
        }
        span = span.iter().flat_map(|&s| [s, s ^ c]).collect();
        images.push(c);
    }
    if images.len() < h_dim {
        return Err(ConstructError::NotInjective);
    }
    Ok(images)
}

/// Seeded injective δ avoiding 1, by rejection.
pub fn random_delta(f: &FieldF2m, h_dim: usize, rng: &mut impl Rng) -> Vec<u64> {
    let m = f.degree() as usize;
    assert!(h_dim < m, "h_dim must leave room to avoid 1");
    loop {
        let images: Vec<u64> = (0..h_dim).map(|_| rng.gen_range(2..f.order())).collect();
        let cols: Vec<BitVector> = images.iter().map(|&c| BitVector::from_bits(m, c)).collect();
        if h_dim > 0 && BitMatrix::from_cols(cols).rank() < h_dim {
            continue;
        }
        let span_hits_one = (1..1u64 << h_dim).any(|combo| {
            let mut img = 0u64;
            for (l, &c) in images.iter().enumerate() {
                if (combo >> l) & 1 == 1 {
                    img ^= c;
                }
            }
            img == 1
        });
        if !span_hits_one {
            return images;
        }
    }
}

/// K = GF(2^m), H = the subfield GF(2^d), σ the least element outside
/// the subfield, β(i) = multiplication by σ·i.
pub fn example2_loop(m: u32, d: u32) -> Result<(FiniteLoop, BetaMap), ConstructError> {
    if d == 0 || d >= m || m % d != 0 {
        return Err(ConstructError::BadSubfield { m, d });
    }
    let f = FieldF2m::new(m)?;
    check_product_dims(m as usize, d as usize)?;
    let sub = f.subfield_elements(d)?;
    let sigma = (0..f.order())
        .find(|c| sub.binary_search(c).is_err())
        .expect("proper subfield misses some element");
    // F2-basis of the subfield, greedily in integer order.
    let mut basis: Vec<u64> = Vec::new();
    let mut span: Vec<u64> = vec![0];
    for &e in &sub {
        if e != 0 && !span.contains(&e) {
            span = span.iter().flat_map(|&s| [s, s ^ e]).collect();
            basis.push(e);
        }
    }
    assert_eq!(basis.len(), d as usize);
    let mats: Vec<BitMatrix> = basis
        .iter()
        .map(|&b| f.mul_endomorphism(f.mul(sigma, b)))
        .collect();
    let beta = BetaMap::new(m as usize, d as usize, mats)?;
    let q = beta_loop(&beta)?;
    let z = q.nuclei_and_center().center;
    assert_eq!(z, vec![0], "example 2 loops are centerless");
    Ok((q, beta))
}

/// φ_{i,j} = id + m(i,j) for a symmetric bilinear m into span(X), where
/// X ⊆ End(K) has all products (squares included) zero. The family
/// conditions then hold automatically, but are still validated. Returns
/// the loop and a nonzero common fixed vector a with (a, 0) central.
pub fn hora_jed_witness(
    x: &[BitMatrix],
    m_coeffs: &[Vec<u32>],
) -> Result<(FiniteLoop, BitVector), ConstructError> {
    if x.is_empty() || x.iter().all(|m| m.is_zero()) {
        return Err(ConstructError::DegenerateX);
    }
    let k = x[0].rows();
    if k == 0 || x.iter().any(|m| m.rows() != k || m.cols() != k) {
        return Err(ConstructError::BadDims(
            "X must be square matrices of equal positive size".into(),
        ));
    }
    for (p, xp) in x.iter().enumerate() {
        for (q, xq) in x.iter().enumerate() {
            if !xp.mul(xq).is_zero() {
                return Err(ConstructError::XSquareNonzero { p, q });
            }
        }
    }
    let h = m_coeffs.len();
    check_product_dims(k, h)?;
    for p in 0..h {
        if m_coeffs[p].len() != h {
            return Err(ConstructError::BadDims("bilinear table must be square".into()));
        }
        for q in 0..h {
            if m_coeffs[p][q] != m_coeffs[q][p] {
                return Err(ConstructError::BadDims(
                    "bilinear table must be symmetric".into(),
                ));
            }
            if m_coeffs[p][q] >> x.len() != 0 {
                return Err(ConstructError::BadDims(
                    "coefficient mask selects outside X".into(),
                ));
            }
        }
    }
    let zero = BitMatrix::zeros(k, k);
    let mix = |mask: u32| {
        let mut acc = zero.clone();
        for (t, xt) in x.iter().enumerate() {
            if (mask >> t) & 1 == 1 {
                acc = acc.add(xt);
            }
        }
        acc
    };
    let id = BitMatrix::identity(k);
    let phi = PhiFamily::from_fn(k, h, |i, j| {
        let mut acc = zero.clone();
        for p in 0..h {
            for q in 0..h {
                if (i >> p) & 1 == 1 && (j >> q) & 1 == 1 {
                    acc = acc.add(&mix(m_coeffs[p][q]));
                }
            }
        }
        id.add(&acc)
    });
    validate_phi_family(&phi)?;
    let q = nuclear_semidirect(&phi)?;
    let refs: Vec<&BitMatrix> = x.iter().collect();
    let fixed = BitMatrix::stack_rows(&refs).nullspace();
    let a = fixed
        .into_iter()
        .find(|v| !v.is_zero())
        .expect("commuting nilpotents share a nonzero kernel vector");
    let elem = a.low_bits() as u16;
    let z = q.nuclei_and_center().center;
    assert!(
        z.binary_search(&elem).is_ok(),
        "common fixed vector must land in the center"
    );
    Ok((q, a))
}

/// Seeded valid BetaMap: basis images are polynomials in one random
/// matrix (so they commute); rejection handles condition (ii).
pub fn random_beta_map(k_dim: usize, h_dim: usize, rng: &mut impl Rng) -> BetaMap {
    loop {
        let mut m = BitMatrix::zeros(k_dim, k_dim);
        for i in 0..k_dim {
            for j in 0..k_dim {
                m.set(i, j, rng.gen());
            }
        }
        let mats: Vec<BitMatrix> = (0..h_dim)
            .map(|_| {
                let mask: u32 = rng.gen_range(0..1u32 << k_dim.min(8));
                let mut acc = BitMatrix::zeros(k_dim, k_dim);
                for t in 0..k_dim.min(8) {
                    if (mask >> t) & 1 == 1 {
                        acc = acc.add(&m.pow(t as u32));
                    }
                }
                acc
            })
            .collect();
        let Ok(beta) = BetaMap::new(k_dim, h_dim, mats) else {
            continue;
        };
        if beta.validate().is_ok() {
            return beta;
        }
    }
}

/// Seeded (X, bilinear table) pair for the fixed-point construction:
/// block-strict matrices [0 C; 0 0] conjugated by a random change of
/// basis, so all products vanish.
pub fn random_hora_jed(
    k_dim: usize,
    h_dim: usize,
    rng: &mut impl Rng,
) -> (Vec<BitMatrix>, Vec<Vec<u32>>) {
    assert!(k_dim >= 2 && h_dim >= 1);
    let r = rng.gen_range(1..k_dim);
    let p = loop {
        let mut cand = BitMatrix::zeros(k_dim, k_dim);
        for i in 0..k_dim {
            for j in 0..k_dim {
                cand.set(i, j, rng.gen());
            }
        }
        if cand.invert().is_ok() {
            break cand;
        }
    };
    let pinv = p.invert().expect("sampled invertible");
    let nx = rng.gen_range(1..=2usize);
    let x: Vec<BitMatrix> = (0..nx)
        .map(|t| loop {
            let mut c = BitMatrix::zeros(k_dim, k_dim);
            for i in 0..r {
                for j in r..k_dim {
                    c.set(i, j, rng.gen());
                }
            }
            // The first matrix keeps X away from {0}.
            if t > 0 || !c.is_zero() {
                break pinv.mul(&c).mul(&p);
            }
        })
        .collect();
    let mut coeffs = vec![vec![0u32; h_dim]; h_dim];
    for i in 0..h_dim {
        for j in i..h_dim {
            let mask = rng.gen_range(0..1u32 << nx);
            coeffs[i][j] = mask;
            coeffs[j][i] = mask;
        }
    }
    (x, coeffs)
}
