//! Hall basis for free nilpotent Lie algebras over F2.
//!
//! The classic Hall family: generators first, then brackets [u, v] with
//! u > v where u, when composite [a, b], must satisfy b <= v. Basis order
//! is weight-major, then construction order within a weight. Brackets of
//! basis elements are expanded back into the basis by the char-2 Jacobi
//! rewrite [[a,b],v] = [[a,v],b] + [[b,v],a], memoized on index pairs.

use crate::gf2::BitVector;
use std::collections::HashMap;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Node {
    Gen(usize),
    // Indices into the Hall list; left > right.
    Br(usize, usize),
}

struct HallSet {
    nodes: Vec<Node>,
    weights: Vec<usize>,
    class: usize,
    memo: HashMap<(usize, usize), BitVector>,
}

/// Witt dimension of the weight-w component of the free Lie algebra on g
/// generators: (1/w) * sum_{d | w} mu(d) g^(w/d).
pub fn witt_dimension(g: usize, w: usize) -> usize {
    fn mobius(mut n: usize) -> i64 {
        let mut m = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }
    let mut total = 0i64;
    for d in 1..=w {
        if w % d == 0 {
            total += mobius(d) * (g as i64).pow((w / d) as u32);
        }
    }
    (total / w as i64) as usize
}

impl HallSet {
    fn build(gens: usize, class: usize) -> Self {
        let mut nodes: Vec<Node> = (0..gens).map(Node::Gen).collect();
        let mut weights: Vec<usize> = vec![1; gens];
        for w in 2..=class {
            // Construction order: ascending left index, then right index.
            let mut layer = Vec::new();
            for u in 0..nodes.len() {
                for v in 0..u {
                    if weights[u] + weights[v] != w {
                        continue;
                    }
                    let ok = match nodes[u] {
                        Node::Gen(_) => true,
                        Node::Br(_, b) => b <= v,
                    };
                    if ok {
                        layer.push((u, v));
                    }
                }
            }
            layer.sort_unstable();
            for (u, v) in layer {
                nodes.push(Node::Br(u, v));
                weights.push(w);
            }
        }
        let memo = HashMap::new();
        HallSet {
            nodes,
            weights,
            class,
            memo,
        }
    }

    fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// [x_u, x_v] as a basis combination; truncated past the class.
    fn bracket_basis(&mut self, u: usize, v: usize) -> BitVector {
        let dim = self.dim();
        if u == v {
            return BitVector::zeros(dim);
        }
        if u < v {
            // Char 2: [x, y] = [y, x].
            return self.bracket_basis(v, u);
        }
        if self.weights[u] + self.weights[v] > self.class {
            return BitVector::zeros(dim);
        }
        if let Some(hit) = self.memo.get(&(u, v)) {
            return hit.clone();
        }
        let result = match self.nodes[u] {
            Node::Gen(_) => {
                // u > v are both generators: [g_u, g_v] is Hall.
                self.find_hall(u, v)
            }
            Node::Br(a, b) => {
                if b <= v {
                    self.find_hall(u, v)
                } else {
                    // [[a,b],v] = [[a,v],b] + [[b,v],a]
                    let av = self.bracket_basis(a, v);
                    let mut acc = self.bracket_vec_basis(&av, b);
                    let bv = self.bracket_basis(b, v);
                    acc.xor_with(&self.bracket_vec_basis(&bv, a));
                    acc
                }
            }
        };
        self.memo.insert((u, v), result.clone());
        result
    }

    /// [x, x_b] for a basis combination x.
    fn bracket_vec_basis(&mut self, x: &BitVector, b: usize) -> BitVector {
        let mut acc = BitVector::zeros(self.dim());
        for u in x.ones().collect::<Vec<_>>() {
            acc.xor_with(&self.bracket_basis(u, b));
        }
        acc
    }

    fn find_hall(&self, u: usize, v: usize) -> BitVector {
        let mut out = BitVector::zeros(self.dim());
        let idx = self
            .nodes
            .iter()
            .position(|n| *n == Node::Br(u, v))
            .expect("Hall element missing from the constructed family");
        out.set(idx, true);
        out
    }
}

/// Structure constants of the free nilpotent Lie algebra on `gens`
/// generators of class `class`: for each pair i < j of basis indices, the
/// expansion of [e_i, e_j]. Basis ordered by weight then construction.
pub fn free_nilpotent_table(gens: usize, class: usize) -> (usize, Vec<((usize, usize), BitVector)>) {
    let mut hall = HallSet::build(gens, class);
    let dim = hall.dim();
    debug_assert_eq!(
        dim,
        (1..=class).map(|w| witt_dimension(gens, w)).sum::<usize>(),
        "Hall set size must match the Witt formula"
    );
    let mut entries = Vec::new();
    for j in 1..dim {
        for i in 0..j {
            let out = hall.bracket_basis(j, i);
            if !out.is_zero() {
                entries.push(((i, j), out));
            }
        }
    }
    (dim, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witt_dimensions() {
        assert_eq!(witt_dimension(2, 1), 2);
        assert_eq!(witt_dimension(2, 2), 1);
        assert_eq!(witt_dimension(2, 3), 2);
        assert_eq!(witt_dimension(2, 4), 3);
        assert_eq!(witt_dimension(3, 1), 3);
        assert_eq!(witt_dimension(3, 2), 3);
        assert_eq!(witt_dimension(3, 3), 8);
        assert_eq!(witt_dimension(3, 4), 18);
    }

    #[test]
    fn free_2_3_table() {
        let (dim, entries) = free_nilpotent_table(2, 3);
        assert_eq!(dim, 5);
        let expect = vec![
            ((0, 1), BitVector::from_indices(5, &[2])),
            ((0, 2), BitVector::from_indices(5, &[3])),
            ((1, 2), BitVector::from_indices(5, &[4])),
        ];
        assert_eq!(entries, expect);
    }

    #[test]
    fn free_dims_match_witt() {
        for (g, c) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)] {
            let (dim, _) = free_nilpotent_table(g, c);
            let expect: usize = (1..=c).map(|w| witt_dimension(g, w)).sum();
            assert_eq!(dim, expect, "free({g},{c})");
        }
    }
}
