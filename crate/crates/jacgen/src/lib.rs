//! # jacgen
//!
//! Computes independent generators of the `m`-torsion subgroup of the
//! Jacobian of a genus-2 hyperelliptic curve `y^2 = f(x)` over a prime
//! field `F_p`, where `m` is the largest divisor of the group order all
//! of whose prime factors divide `p - 1`.
//!
//! The construction works prime by prime: inside each Sylow-`l` subgroup,
//! candidate elements are diagonalized against probe elements with
//! respect to the tame Tate pairing. A diagonal pairing matrix with
//! non-trivial diagonal certifies that the candidates generate a direct
//! sum; a product-of-orders check upgrades independence to full
//! generation of the Sylow subgroup.
//!
//! Everything the algorithm rests on is provided here as well:
//!
//! - [`field`]: arithmetic in `F_p`, roots of unity, square roots;
//! - [`poly`]: univariate polynomials over `F_p`, gcds and resultants;
//! - [`jacobian`]: Mumford representation and Cantor's algorithm,
//!   element orders, and random sampling in the divisor class group;
//! - [`pairing`]: the tame Tate pairing via Miller's algorithm, with
//!   the final exponentiation into the roots of unity `mu_lambda`;
//! - [`dlp`]: Pohlig-Hellman discrete logarithms in `F_p^x` subgroups;
//! - [`structure`]: the diagonalization itself and the per-prime
//!   assembly of `m`-torsion generators, with certificates;
//! - [`oracle`]: brute-force enumeration of the whole group for tiny
//!   primes, used as ground truth by the test suite and `verify`;
//! - [`curvefile`] / [`report`] / [`cli`]: the file formats and the
//!   command-line front end.
//!
//! Start with the runnable examples (`cargo run --example ...`); each
//! one demonstrates a single capability on a small curve.

pub mod arith;
pub mod cli;
pub mod curvefile;
pub mod dlp;
pub mod field;
pub mod jacobian;
pub mod oracle;
pub mod pairing;
pub mod poly;
pub mod report;
pub mod structure;

pub use field::{Field, FieldElement};
pub use jacobian::{CurveParams, GroupContext, MumfordDivisor};
pub use pairing::{tame_tate, PairingValue};
pub use poly::Poly;
pub use structure::{m_torsion_generators, sylow_generators, StructureResult};
