//! File formats and report types.
//!
//! Three on-disk formats, all versioned by an explicit tag:
//! `lief2-v1` (JSON structure constants of a Lie algebra over F2),
//! `cayley-v1` (plain-text multiplication table), and `beta-v1`
//! (JSON beta map as 0/1 matrices). Parsers are strict: unknown fields,
//! duplicate pairs, and out-of-range indices are errors, so
//! serialize-then-parse is the identity on canonical forms.

use crate::construct::{BetaMap, ConstructError};
use crate::gf2::{BitMatrix, BitVector};
use crate::lie::{LieAlgebraF2, LieError};
use crate::loops::{AutomorphicMethod, FiniteLoop, LoopError, SplitOutcome};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const LIE_FORMAT: &str = "lief2-v1";
pub const BETA_FORMAT: &str = "beta-v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("format tag is {got:?}, expected {want:?}")]
    BadTag { got: String, want: &'static str },
    #[error("bracket ({i},{j}) target {target} out of range for dim {dim}")]
    TargetOutOfRange {
        i: usize,
        j: usize,
        target: usize,
        dim: usize,
    },
    #[error("bracket ({i},{j}) lists target {target} twice")]
    DuplicateTarget { i: usize, j: usize, target: usize },
    #[error("line {line}: {msg}")]
    Cayley { line: usize, msg: String },
    #[error("matrix {index} must be {dim} x {dim} rows of 0/1 entries")]
    BadMatrix { index: usize, dim: usize },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// lief2-v1 payload. `brackets` lists [e_i, e_j] for i < j only; omitted
/// pairs are zero and `out` holds the basis indices with coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieRecord {
    pub format: String,
    pub dim: usize,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub out: Vec<usize>,
}

impl LieRecord {
    pub fn from_algebra(l: &LieAlgebraF2) -> LieRecord {
        let brackets = l
            .entries()
            .into_iter()
            .map(|((i, j), v)| BracketEntry {
                i,
                j,
                out: v.ones().collect(),
            })
            .collect();
        LieRecord {
            format: LIE_FORMAT.to_string(),
            dim: l.dim(),
            brackets,
        }
    }

    pub fn to_algebra(&self) -> Result<LieAlgebraF2, FormatError> {
        if self.format != LIE_FORMAT {
            return Err(FormatError::BadTag {
                got: self.format.clone(),
                want: LIE_FORMAT,
            });
        }
        let mut entries = Vec::with_capacity(self.brackets.len());
        for e in &self.brackets {
            let mut v = BitVector::zeros(self.dim);
            for &t in &e.out {
                if t >= self.dim {
                    return Err(FormatError::TargetOutOfRange {
                        i: e.i,
                        j: e.j,
                        target: t,
                        dim: self.dim,
                    });
                }
                if v.get(t) {
                    return Err(FormatError::DuplicateTarget {
                        i: e.i,
                        j: e.j,
                        target: t,
                    });
                }
                v.set(t, true);
            }
            entries.push(((e.i, e.j), v));
        }
        // new() rejects i >= j, out-of-range j, and duplicate pairs.
        Ok(LieAlgebraF2::new(self.dim, entries)?)
    }
}

pub fn lie_to_json(l: &LieAlgebraF2) -> String {
    let mut s = serde_json::to_string_pretty(&LieRecord::from_algebra(l))
        .expect("record serialization cannot fail");
    s.push('\n');
    s
}

pub fn lie_from_json(s: &str) -> Result<LieAlgebraF2, FormatError> {
    let rec: LieRecord = serde_json::from_str(s)?;
    rec.to_algebra()
}

/// cayley-v1 writer: first line is the order, then one row per line.
pub fn loop_to_cayley(q: &FiniteLoop) -> String {
    let mut s = format!("{}\n", q.order());
    for row in q.rows() {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

/// cayley-v1 parser. Strict: exactly n rows of n entries after the header
/// line; trailing whitespace and trailing blank lines are tolerated.
/// Loop axioms (Latin property, identity at 0) are checked on the result.
pub fn loop_from_cayley(s: &str) -> Result<FiniteLoop, FormatError> {
    let bad = |line: usize, msg: String| FormatError::Cayley { line, msg };
    let mut lines = s.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| bad(1, "empty file".to_string()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| bad(1, format!("expected the order, got {header:?}")))?;
    if n == 0 {
        return Err(bad(1, "order must be positive".to_string()));
    }
    let mut table: Vec<Vec<u16>> = Vec::with_capacity(n);
    for (idx, raw) in &mut lines {
        let line = idx + 1;
        if table.len() == n {
            if !raw.trim().is_empty() {
                return Err(bad(line, "content after the last row".to_string()));
            }
            continue;
        }
        if raw.trim().is_empty() {
            return Err(bad(line, "blank line inside the table".to_string()));
        }
        let mut row = Vec::with_capacity(n);
        for tok in raw.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| bad(line, format!("bad entry {tok:?}")))?;
            if v >= n {
                return Err(bad(line, format!("entry {v} out of range for order {n}")));
            }
            row.push(v as u16);
        }
        if row.len() != n {
            return Err(bad(
                line,
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
        table.push(row);
    }
    if table.len() != n {
        return Err(bad(
            s.lines().count().max(1),
            format!("found {} rows, expected {n}", table.len()),
        ));
    }
    Ok(FiniteLoop::from_table(&table)?)
}

/// beta-v1 payload: h_dim matrices of k_dim x k_dim bits in H-basis order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaRecord {
    pub format: String,
    pub k_dim: usize,
    pub h_dim: usize,
    pub matrices: Vec<Vec<Vec<u8>>>,
}

impl BetaRecord {
    pub fn from_beta(b: &BetaMap) -> BetaRecord {
        let k = b.k_dim();
        let matrices = b
            .basis_images()
            .iter()
            .map(|m| {
                (0..k)
                    .map(|i| (0..k).map(|j| m.get(i, j) as u8).collect())
                    .collect()
            })
            .collect();
        BetaRecord {
            format: BETA_FORMAT.to_string(),
            k_dim: k,
            h_dim: b.h_dim(),
            matrices,
        }
    }

    pub fn to_beta(&self) -> Result<BetaMap, FormatError> {
        if self.format != BETA_FORMAT {
            return Err(FormatError::BadTag {
                got: self.format.clone(),
                want: BETA_FORMAT,
            });
        }
        let k = self.k_dim;
        let mut mats = Vec::with_capacity(self.matrices.len());
        for (index, rows) in self.matrices.iter().enumerate() {
            let shape_ok = rows.len() == k
                && rows
                    .iter()
                    .all(|r| r.len() == k && r.iter().all(|&b| b <= 1));
            if !shape_ok {
                return Err(FormatError::BadMatrix { index, dim: k });
            }
            let mut m = BitMatrix::zeros(k, k);
            for (i, r) in rows.iter().enumerate() {
                for (j, &b) in r.iter().enumerate() {
                    m.set(i, j, b == 1);
                }
            }
            mats.push(m);
        }
        // new() checks the matrix count against h_dim.
        Ok(BetaMap::new(self.k_dim, self.h_dim, mats)?)
    }
}

pub fn beta_to_json(b: &BetaMap) -> String {
    let mut s = serde_json::to_string_pretty(&BetaRecord::from_beta(b))
        .expect("record serialization cannot fail");
    s.push('\n');
    s
}

pub fn beta_from_json(s: &str) -> Result<BetaMap, FormatError> {
    let rec: BetaRecord = serde_json::from_str(s)?;
    rec.to_beta()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPart {
    #[serde(rename = "K")]
    pub k: Vec<u16>,
    #[serde(rename = "H")]
    pub h: Vec<u16>,
}

/// Everything `loop analyze` reports about one table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopReport {
    pub order: usize,
    pub commutative: bool,
    pub exponent2: bool,
    pub associative: bool,
    pub automorphic: bool,
    pub center: Vec<u16>,
    pub nucleus_left: Vec<u16>,
    pub nucleus_middle: Vec<u16>,
    pub nucleus_right: Vec<u16>,
    pub split: Option<SplitPart>,
}

impl LoopReport {
    pub fn analyze(q: &FiniteLoop, split_budget: usize) -> Result<LoopReport, LoopError> {
        let p = q.predicates();
        let nuclei = q.nuclei_and_center();
        let split = match q.nuclear_split(split_budget)? {
            SplitOutcome::Witness(w) => Some(SplitPart { k: w.k, h: w.h }),
            SplitOutcome::NonSplit(_) => None,
        };
        Ok(LoopReport {
            order: q.order(),
            commutative: p.commutative,
            exponent2: p.exponent2,
            associative: p.associative,
            automorphic: q.is_automorphic(AutomorphicMethod::Direct),
            center: nuclei.center,
            nucleus_left: nuclei.left,
            nucleus_middle: nuclei.middle,
            nucleus_right: nuclei.right,
            split,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::example2_loop;
    use crate::lie::Catalog;

    #[test]
    fn lie_roundtrip_heisenberg() {
        let l = LieAlgebraF2::catalog_make(Catalog::Heisenberg).unwrap();
        let json = lie_to_json(&l);
        let back = lie_from_json(&json).unwrap();
        assert_eq!(back, l);
        // Canonical text survives a second trip byte for byte.
        assert_eq!(lie_to_json(&back), json);
    }

    #[test]
    fn lie_roundtrip_free23() {
        let l = LieAlgebraF2::catalog_make(Catalog::FreeNilpotent { gens: 2, class: 3 })
            .unwrap();
        assert_eq!(lie_from_json(&lie_to_json(&l)).unwrap(), l);
    }

    #[test]
    fn lie_parser_rejections() {
        let bad_tag = r#"{"format":"lief2-v2","dim":2,"brackets":[]}"#;
        assert!(matches!(
            lie_from_json(bad_tag),
            Err(FormatError::BadTag { .. })
        ));
        let swapped = r#"{"format":"lief2-v1","dim":3,"brackets":[{"i":1,"j":0,"out":[2]}]}"#;
        assert!(matches!(
            lie_from_json(swapped),
            Err(FormatError::Lie(LieError::BadPair { i: 1, j: 0 }))
        ));
        let dup = r#"{"format":"lief2-v1","dim":3,
            "brackets":[{"i":0,"j":1,"out":[2]},{"i":0,"j":1,"out":[]}]}"#;
        assert!(matches!(
            lie_from_json(dup),
            Err(FormatError::Lie(LieError::DuplicatePair { i: 0, j: 1 }))
        ));
        let oob = r#"{"format":"lief2-v1","dim":3,"brackets":[{"i":0,"j":1,"out":[3]}]}"#;
        assert!(matches!(
            lie_from_json(oob),
            Err(FormatError::TargetOutOfRange { target: 3, .. })
        ));
        let twice = r#"{"format":"lief2-v1","dim":3,"brackets":[{"i":0,"j":1,"out":[2,2]}]}"#;
        assert!(matches!(
            lie_from_json(twice),
            Err(FormatError::DuplicateTarget { target: 2, .. })
        ));
        let unknown = r#"{"format":"lief2-v1","dim":2,"brackets":[],"extra":1}"#;
        assert!(matches!(lie_from_json(unknown), Err(FormatError::Json(_))));
    }

    #[test]
    fn cayley_roundtrip_example2() {
        let (q, _) = example2_loop(2, 1).unwrap();
        let text = loop_to_cayley(&q);
        let back = loop_from_cayley(&text).unwrap();
        assert_eq!(back.rows(), q.rows());
        assert_eq!(loop_to_cayley(&back), text);
    }

    #[test]
    fn cayley_tolerates_trailing_whitespace() {
        let text = "2\n0 1 \n1 0\n\n  \n";
        let q = loop_from_cayley(text).unwrap();
        assert_eq!(q.order(), 2);
    }

    #[test]
    fn cayley_rejections() {
        assert!(matches!(
            loop_from_cayley(""),
            Err(FormatError::Cayley { line: 1, .. })
        ));
        assert!(matches!(
            loop_from_cayley("x\n"),
            Err(FormatError::Cayley { line: 1, .. })
        ));
        // Truncated: claims order 3, supplies 2 rows.
        assert!(matches!(
            loop_from_cayley("3\n0 1 2\n1 2 0\n"),
            Err(FormatError::Cayley { .. })
        ));
        assert!(matches!(
            loop_from_cayley("2\n0 1\n1 0 0\n"),
            Err(FormatError::Cayley { line: 3, .. })
        ));
        assert!(matches!(
            loop_from_cayley("2\n0 2\n1 0\n"),
            Err(FormatError::Cayley { line: 2, .. })
        ));
        assert!(matches!(
            loop_from_cayley("2\n0 1\n1 0\n1 0\n"),
            Err(FormatError::Cayley { line: 4, .. })
        ));
        // Valid shape, broken axioms: row 1 repeats an element.
        assert!(matches!(
            loop_from_cayley("2\n0 0\n1 0\n"),
            Err(FormatError::Loop(_))
        ));
    }

    #[test]
    fn beta_roundtrip() {
        let (_, beta) = example2_loop(2, 1).unwrap();
        let json = beta_to_json(&beta);
        let back = beta_from_json(&json).unwrap();
        assert_eq!(back.basis_images(), beta.basis_images());
        assert_eq!(beta_to_json(&back), json);
    }

    #[test]
    fn beta_rejections() {
        let bad_bit =
            r#"{"format":"beta-v1","k_dim":1,"h_dim":1,"matrices":[[[2]]]}"#;
        assert!(matches!(
            beta_from_json(bad_bit),
            Err(FormatError::BadMatrix { index: 0, dim: 1 })
        ));
        let bad_shape =
            r#"{"format":"beta-v1","k_dim":2,"h_dim":1,"matrices":[[[0,0],[0]]]}"#;
        assert!(matches!(
            beta_from_json(bad_shape),
            Err(FormatError::BadMatrix { .. })
        ));
        let wrong_count =
            r#"{"format":"beta-v1","k_dim":1,"h_dim":2,"matrices":[[[0]]]}"#;
        assert!(matches!(
            beta_from_json(wrong_count),
            Err(FormatError::Construct(_))
        ));
    }

    #[test]
    fn loop_report_example2() {
        let (q, _) = example2_loop(2, 1).unwrap();
        let r = LoopReport::analyze(&q, 1_000_000).unwrap();
        assert_eq!(r.order, 8);
        assert!(r.commutative && r.exponent2 && r.automorphic);
        assert!(!r.associative);
        assert_eq!(r.center, vec![0]);
        assert_eq!(r.nucleus_middle, vec![0, 1, 2, 3]);
        let split = r.split.as_ref().expect("example splits");
        assert_eq!(split.k, vec![0, 1, 2, 3]);
        assert_eq!(split.h, vec![0, 4]);
        let json = r.to_json();
        let back: LoopReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(json.contains("\"K\""));
    }
}
