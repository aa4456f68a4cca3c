//! Discrete logarithm computations in multiplicative groups of
//! small-characteristic finite fields and in Jacobians of curves over
//! finite fields.
//!
//! The crate is organised in layers:
//!
//! * [`ff`] and [`poly`] provide the arithmetic substrate: prime and binary
//!   fields, residue rings, univariate polynomials and their factorisation.
//! * [`dlp`] implements the generic square-root algorithms (exhaustive
//!   search, baby-step giant-step, Pollard rho, parallel collision search
//!   with distinguished points, Pohlig-Hellman) over an abstract group
//!   contract, registered by name and selectable at runtime.
//! * [`field_ic`] is classical index calculus in `F_2^m`, [`curve`] is
//!   Mumford/Cantor arithmetic in hyperelliptic Jacobians with zeta-function
//!   point counting, and [`curve_ic`] runs index calculus in Jacobians with
//!   full, reduced, single- and double-large-prime factor bases.
//! * [`cab`] holds the plane-model relation machinery for C_{a,b} curves:
//!   principal divisors of functions r(X) + s(X)Y, two-point line relations,
//!   smoothness-parameter planning and special-q descent.
//! * [`linalg`] supplies sparse Wiedemann solving modulo a prime together
//!   with dense Hermite and Smith normal forms over the integers.
//! * [`analysis`] evaluates the subexponential function L_N(alpha, c), the
//!   Dickman-de Bruijn rho function, smoothness probabilities and the
//!   per-strategy complexity exponents used to pick algorithms.

pub mod analysis;
pub mod cab;
pub mod curve;
pub mod curve_ic;
pub mod dlp;
pub mod ff;
pub mod field_ic;
pub mod linalg;
pub mod numbers;
pub mod poly;
