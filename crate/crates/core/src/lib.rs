//! caloop: a workbench for finite commutative automorphic loops of
//! exponent 2.
//!
//! The crate constructs loops from two sources: Lie algebras over F2 via
//! `x * y = x + y + [x, y]`, and nuclear semidirect products `K x H` driven
//! by a family of automorphisms of K (or the linear map beta that induces
//! one). On top of that sit the verification kernels (loop axioms, inner
//! mappings, the automorphic property, nuclei, centers, nuclear splitting)
//! and desk-scale exhaustive searches over nilpotent bracket tables.
//!
//! Module map:
//! - [`gf2`]: bit-packed F2 linear algebra and GF(2^m) arithmetic.
//! - [`lie`]: structure-constant Lie algebras, series, the W-properties.
//! - [`loops`]: Cayley-table loops and all loop-theoretic analysis.
//! - [`construct`]: the loop constructions and their predicted invariants.
//! - [`search`]: flag-adapted enumeration, classification scans.
//! - [`formats`]: the on-disk formats (`lief2-v1`, `cayley-v1`, `beta-v1`)
//!   and JSON reports.
//! - [`cli`]: the `caloop` command-line front end.

pub mod cli;
pub mod construct;
pub mod formats;
pub mod gf2;
mod hall;
pub mod lie;
pub mod loops;
pub mod search;
