//! Arithmetic in prime fields `F_p` (p < 2^62), binary fields `F_2^m`
//! (m <= 63, represented as `F_2[X]/(modulus)`) and residue rings `Z/NZ`
//! with arbitrary-precision moduli.
//!
//! Field elements are canonical single-word values: the integer in `[0, p)`
//! for prime fields and the bit vector of the reduced polynomial for binary
//! fields (bit i is the coefficient of X^i). Canonicity makes equality and
//! hashing meaningful, which the collision-search algorithms rely on.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::numbers;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("bad field spec: {0}")]
    ParseError(String),
}

/// Polynomial arithmetic on bit vectors over F_2. Bit i is the coefficient
/// of X^i; the zero polynomial is 0.
pub mod bits {
    /// Degree, with deg 0 = -1 encoded as `None`.
    pub fn degree(a: u64) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(63 - a.leading_zeros())
        }
    }

    /// Carry-less product of two bit polynomials.
    pub fn clmul(a: u64, mut b: u64) -> u128 {
        let mut r = 0u128;
        while b != 0 {
            let i = b.trailing_zeros();
            r ^= (a as u128) << i;
            b &= b - 1;
        }
        r
    }

    /// Remainder of a 128-bit product modulo `m` (deg m <= 63).
    pub fn rem128(mut a: u128, m: u64) -> u64 {
        let dm = degree(m).expect("zero modulus") as u32;
        while a >> dm != 0 {
            let d = 127 - a.leading_zeros();
            a ^= (m as u128) << (d - dm);
        }
        a as u64
    }

    pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
        rem128(clmul(a, b), m)
    }

    pub fn rem(a: u64, m: u64) -> u64 {
        rem128(a as u128, m)
    }

    /// Quotient and remainder of bit polynomials.
    pub fn divrem(a: u64, b: u64) -> (u64, u64) {
        let db = degree(b).expect("division by zero polynomial");
        let mut r = a;
        let mut q = 0u64;
        while let Some(dr) = degree(r) {
            if dr < db {
                break;
            }
            q ^= 1 << (dr - db);
            r ^= b << (dr - db);
        }
        (q, r)
    }

    pub fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let (_, r) = divrem(a, b);
            a = b;
            b = r;
        }
        a
    }

    /// Extended gcd; returns `(g, s, t)` with `s*a + t*b = g`. Degrees of the
    /// Bezout coefficients stay below `deg a + deg b`, which fits a word for
    /// the sizes used here.
    pub fn xgcd(a: u64, b: u64) -> (u64, u64, u64) {
        let (mut r0, mut r1) = (a, b);
        let (mut s0, mut s1) = (1u64, 0u64);
        let (mut t0, mut t1) = (0u64, 1u64);
        while r1 != 0 {
            let (q, r) = divrem(r0, r1);
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s0 ^ clmul(q, s1) as u64);
            (t0, t1) = (t1, t0 ^ clmul(q, t1) as u64);
        }
        (r0, s0, t0)
    }

    pub fn sqmod(a: u64, m: u64) -> u64 {
        rem128(clmul(a, a), m)
    }

    pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
        let mut r = rem(1, m);
        a = rem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a, m);
            }
            a = mulmod(a, a, m);
            e >>= 1;
        }
        r
    }

    /// Inverse of `a` modulo the irreducible `m`.
    pub fn invmod(a: u64, m: u64) -> Option<u64> {
        if rem(a, m) == 0 {
            return None;
        }
        // plain extended Euclid on bit polynomials
        let (mut r0, mut r1) = (m, rem(a, m));
        let (mut t0, mut t1) = (0u64, 1u64);
        while r1 != 0 {
            let (q, r) = divrem(r0, r1);
            (r0, r1) = (r1, r);
            let qt = clmul(q, t1) as u64; // degrees stay below deg m
            (t0, t1) = (t1, t0 ^ qt);
        }
        debug_assert_eq!(r0, 1, "modulus not irreducible");
        Some(rem(t0, m))
    }

    /// Rabin irreducibility test for a bit polynomial of degree >= 1.
    pub fn is_irreducible(f: u64) -> bool {
        let n = match degree(f) {
            None | Some(0) => return false,
            Some(d) => d,
        };
        if n == 1 {
            return true;
        }
        // x^(2^n) == x mod f, and gcd(x^(2^(n/l)) - x, f) == 1 for prime l | n
        let mut x = 2u64; // the polynomial X
        let mut powers = vec![rem(2, f)];
        for _ in 0..n {
            x = sqmod(x, f);
            powers.push(x);
        }
        if powers[n as usize] != rem(2, f) {
            return false;
        }
        for (p, _) in crate::numbers::factor_u64(n as u64) {
            let k = n as u64 / p;
            if gcd(powers[k as usize] ^ rem(2, f), f) != 1 {
                return false;
            }
        }
        true
    }

    /// Smallest (as an integer) irreducible bit polynomial of degree `m`.
    pub fn least_irreducible(m: u32) -> u64 {
        assert!((1..=63).contains(&m));
        let base = 1u64 << m;
        for low in 0..base {
            let f = base | low;
            if is_irreducible(f) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

/// Description of a supported finite field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// The prime field F_p, p < 2^62.
    Prime { p: u64 },
    /// F_2[X]/(modulus), deg modulus = m <= 63. Bit i of `modulus` is the
    /// coefficient of X^i.
    Binary { m: u32, modulus: u64 },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        assert!(p < 1 << 62, "prime fields are limited to p < 2^62");
        assert!(numbers::is_prime(p), "{p} is not prime");
        FieldSpec::Prime { p }
    }

    /// Binary field with the default modulus: the least irreducible of
    /// degree m, so that specs are reproducible across runs.
    pub fn binary(m: u32) -> Self {
        FieldSpec::Binary {
            m,
            modulus: bits::least_irreducible(m),
        }
    }

    pub fn binary_with_modulus(m: u32, modulus: u64) -> Result<Self, FieldError> {
        if bits::degree(modulus) != Some(m) || !bits::is_irreducible(modulus) {
            return Err(FieldError::ParseError(format!(
                "modulus {modulus:#x} is not irreducible of degree {m}"
            )));
        }
        Ok(FieldSpec::Binary { m, modulus })
    }

    /// Number of field elements.
    pub fn order(&self) -> BigUint {
        match self {
            FieldSpec::Prime { p } => BigUint::from(*p),
            FieldSpec::Binary { m, .. } => BigUint::one() << (*m as usize),
        }
    }

    /// Field size as a word; all supported fields fit.
    pub fn order_u64(&self) -> u64 {
        match self {
            FieldSpec::Prime { p } => *p,
            FieldSpec::Binary { m, .. } => 1u64 << m,
        }
    }

    /// Order of the multiplicative group.
    pub fn unit_order(&self) -> u64 {
        self.order_u64() - 1
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime { p } => *p,
            FieldSpec::Binary { .. } => 2,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            spec: *self,
            value: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            spec: *self,
            value: 1,
        }
    }

    /// Element from a canonical integer representative (reduced for prime
    /// fields, masked-in-range for binary fields).
    pub fn element(&self, value: u64) -> FieldElement {
        let v = match self {
            FieldSpec::Prime { p } => value % p,
            FieldSpec::Binary { modulus, .. } => bits::rem(value, *modulus),
        };
        FieldElement {
            spec: *self,
            value: v,
        }
    }

    /// Uniform random element, reproducible from the caller's rng.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> FieldElement {
        let v = match self {
            FieldSpec::Prime { p } => rng.gen_range(0..*p),
            FieldSpec::Binary { m, .. } => rng.gen::<u64>() & ((1u64 << m) - 1).max(1),
        };
        FieldElement {
            spec: *self,
            value: v,
        }
    }

    pub fn random_nonzero<R: Rng>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = self.random_element(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order_u64()).map(move |v| FieldElement {
            spec: *self,
            value: v,
        })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "prime:{p}"),
            FieldSpec::Binary { m, modulus } => write!(f, "binary:{m}:{modulus:#x}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    /// Text form `prime:7` or `binary:31:0x80000009` (hex modulus optional;
    /// without it the default modulus of that degree is used).
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || FieldError::ParseError(s.to_string());
        match parts.as_slice() {
            ["prime", p] => {
                let p: u64 = p.parse().map_err(|_| bad())?;
                if p >= 1 << 62 || !numbers::is_prime(p) {
                    return Err(bad());
                }
                Ok(FieldSpec::Prime { p })
            }
            ["binary", m] => {
                let m: u32 = m.parse().map_err(|_| bad())?;
                if !(1..=63).contains(&m) {
                    return Err(bad());
                }
                Ok(FieldSpec::binary(m))
            }
            ["binary", m, modulus] => {
                let m: u32 = m.parse().map_err(|_| bad())?;
                let modulus = if let Some(hex) = modulus.strip_prefix("0x") {
                    u64::from_str_radix(hex, 16).map_err(|_| bad())?
                } else {
                    modulus.parse().map_err(|_| bad())?
                };
                FieldSpec::binary_with_modulus(m, modulus)
            }
            _ => Err(bad()),
        }
    }
}

/// An element of a [`FieldSpec`] field in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub spec: FieldSpec,
    pub value: u64,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.spec != other.spec {
            Err(FieldError::SpecMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check(other).expect("spec mismatch");
        let value = match self.spec {
            FieldSpec::Prime { p } => {
                let s = self.value + other.value;
                if s >= p {
                    s - p
                } else {
                    s
                }
            }
            FieldSpec::Binary { .. } => self.value ^ other.value,
        };
        FieldElement {
            spec: self.spec,
            value,
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldElement {
        let value = match self.spec {
            FieldSpec::Prime { p } => {
                if self.value == 0 {
                    0
                } else {
                    p - self.value
                }
            }
            FieldSpec::Binary { .. } => self.value,
        };
        FieldElement {
            spec: self.spec,
            value,
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check(other).expect("spec mismatch");
        let value = match self.spec {
            FieldSpec::Prime { p } => numbers::mulmod(self.value, other.value, p),
            FieldSpec::Binary { modulus, .. } => bits::mulmod(self.value, other.value, modulus),
        };
        FieldElement {
            spec: self.spec,
            value,
        }
    }

    pub fn square(&self) -> FieldElement {
        self.mul(self)
    }

    /// Inverse by extended Euclid.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let value = match self.spec {
            FieldSpec::Prime { p } => numbers::invmod(self.value, p).unwrap(),
            FieldSpec::Binary { modulus, .. } => bits::invmod(self.value, modulus).unwrap(),
        };
        Ok(FieldElement {
            spec: self.spec,
            value,
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = *self;
        let mut r = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        r
    }

    /// `a^e` for big exponents, reducing via the multiplicative order.
    pub fn pow_big(&self, e: &BigUint) -> FieldElement {
        if self.is_zero() {
            return if e.is_zero() {
                self.spec.one()
            } else {
                self.spec.zero()
            };
        }
        let n = BigUint::from(self.spec.unit_order());
        let e = (e % &n).to_u64_digits().first().copied().unwrap_or(0);
        self.pow(e)
    }

    /// Multiplicative order, given the factorisation of the unit group order.
    pub fn mult_order(&self, unit_factors: &[(u64, u32)]) -> u64 {
        assert!(!self.is_zero());
        let mut order = self.spec.unit_order();
        for &(p, e) in unit_factors {
            for _ in 0..e {
                if self.pow(order / p).is_one() {
                    order /= p;
                } else {
                    break;
                }
            }
        }
        order
    }

    /// Canonical byte encoding: 8 bytes little-endian. Injective per field.
    pub fn canonical_bytes(&self) -> [u8; 8] {
        self.value.to_le_bytes()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A residue `value mod modulus` with arbitrary-precision modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residue {
    pub value: BigUint,
    pub modulus: BigUint,
}

impl Residue {
    pub fn new(value: BigUint, modulus: BigUint) -> Self {
        assert!(!modulus.is_zero());
        Residue {
            value: value % &modulus,
            modulus,
        }
    }

    pub fn from_u64(value: u64, modulus: u64) -> Self {
        Self::new(BigUint::from(value), BigUint::from(modulus))
    }

    pub fn add(&self, other: &Residue) -> Residue {
        assert_eq!(self.modulus, other.modulus);
        Residue::new(&self.value + &other.value, self.modulus.clone())
    }

    pub fn sub(&self, other: &Residue) -> Residue {
        assert_eq!(self.modulus, other.modulus);
        Residue::new(
            &self.value + &self.modulus - &other.value,
            self.modulus.clone(),
        )
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        assert_eq!(self.modulus, other.modulus);
        Residue::new(&self.value * &other.value, self.modulus.clone())
    }

    pub fn inv(&self) -> Option<Residue> {
        numbers::biguint_invmod(&self.value, &self.modulus)
            .map(|v| Residue::new(v, self.modulus.clone()))
    }
}

/// Chinese remainder combination of residues with pairwise coprime moduli.
///
/// The result satisfies every input congruence and has the product modulus.
pub fn crt_combine(residues: &[Residue]) -> Result<Residue, FieldError> {
    let mut acc = match residues.first() {
        Some(r) => r.clone(),
        None => return Err(FieldError::NonCoprimeModuli),
    };
    for r in &residues[1..] {
        // solve x = acc.value (mod acc.modulus), x = r.value (mod r.modulus)
        let m1 = &acc.modulus;
        let m2 = &r.modulus;
        let inv = numbers::biguint_invmod(m1, m2).ok_or(FieldError::NonCoprimeModuli)?;
        let diff = (&r.value + m2 - (&acc.value % m2)) % m2;
        let t = (diff * inv) % m2;
        let value = &acc.value + m1 * t;
        acc = Residue {
            value,
            modulus: m1 * m2,
        };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_in_f7() {
        let f7 = FieldSpec::prime(7);
        // brute force oracle: 3 * x = 1 mod 7
        let oracle = (1..7).find(|&x| 3 * x % 7 == 1).unwrap();
        assert_eq!(oracle, 5);
        assert_eq!(f7.element(3).inv().unwrap(), f7.element(5));
        assert_eq!(f7.zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn f4_multiplication() {
        // F_4 = F_2[X]/(X^2+X+1): x * x = x + 1
        let f4 = FieldSpec::binary_with_modulus(2, 0b111).unwrap();
        let x = f4.element(0b10);
        assert_eq!(x.mul(&x).value, 0b11);
        let a = f4.element(0b11);
        assert_eq!(a.mul(&f4.one()), a);
    }

    #[test]
    fn field_axioms_random() {
        let specs = [
            FieldSpec::prime(7),
            FieldSpec::prime(10007),
            FieldSpec::binary(8),
            FieldSpec::binary(17),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in specs {
            for _ in 0..1000 {
                let a = spec.random_element(&mut rng);
                let b = spec.random_element(&mut rng);
                let c = spec.random_element(&mut rng);
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                if !a.is_zero() {
                    assert!(a.mul(&a.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_field() {
        let spec = FieldSpec::binary(11);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = spec.random_element(&mut rng);
            let mut b = a;
            for _ in 0..11 {
                b = b.square();
            }
            assert_eq!(a, b);
        }
    }

    #[test]
    fn canonical_bytes_injective() {
        let spec = FieldSpec::prime(101);
        for a in spec.elements() {
            for b in spec.elements() {
                assert_eq!(a.canonical_bytes() == b.canonical_bytes(), a == b);
            }
        }
    }

    #[test]
    fn random_element_deterministic_and_uniform() {
        let spec = FieldSpec::prime(7);
        let xs: Vec<u64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..50).map(|_| spec.random_element(&mut rng).value).collect()
        };
        let ys: Vec<u64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..50).map(|_| spec.random_element(&mut rng).value).collect()
        };
        assert_eq!(xs, ys);

        // frequency of each value over 10^4 draws within 5 sigma of 1/7
        let mut counts = [0u32; 7];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10_000;
        for _ in 0..n {
            counts[spec.random_element(&mut rng).value as usize] += 1;
        }
        let p = 1.0 / 7.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * p).abs() < 5.0 * sigma);
        }

        // draws in F_2 stay in range
        let f2 = FieldSpec::prime(2);
        for _ in 0..20 {
            assert!(f2.random_element(&mut rng).value < 2);
        }
    }

    #[test]
    fn crt_examples() {
        // exhaustive oracle over 0..11
        let oracle = (0..12u64).find(|&x| x % 4 == 3 && x % 3 == 1).unwrap();
        assert_eq!(oracle, 7);
        let r = crt_combine(&[Residue::from_u64(3, 4), Residue::from_u64(1, 3)]).unwrap();
        assert_eq!(r.value, BigUint::from(7u32));
        assert_eq!(r.modulus, BigUint::from(12u32));

        let single = crt_combine(&[Residue::from_u64(0, 5)]).unwrap();
        assert_eq!(single.value, BigUint::zero());

        let oracle = (0..30u64)
            .find(|&x| x % 2 == 1 && x % 3 == 2 && x % 5 == 3)
            .unwrap();
        assert_eq!(oracle, 23);
        let r = crt_combine(&[
            Residue::from_u64(1, 2),
            Residue::from_u64(2, 3),
            Residue::from_u64(3, 5),
        ])
        .unwrap();
        assert_eq!(r.value, BigUint::from(23u32));

        assert_eq!(
            crt_combine(&[Residue::from_u64(1, 4), Residue::from_u64(2, 6)]),
            Err(FieldError::NonCoprimeModuli)
        );
    }

    #[test]
    fn spec_text_roundtrip() {
        let s: FieldSpec = "prime:7".parse().unwrap();
        assert_eq!(s, FieldSpec::prime(7));
        let s: FieldSpec = "binary:31:0x80000009".parse().unwrap();
        assert_eq!(format!("{s}"), "binary:31:0x80000009");
        // default modulus for degree 4 is X^4+X+1 = 0x13
        assert_eq!(FieldSpec::binary(4), FieldSpec::Binary { m: 4, modulus: 0x13 });
        assert!("binary:4:0x11".parse::<FieldSpec>().is_err()); // (X+1)^4
    }

    #[test]
    fn least_irreducible_table() {
        assert_eq!(bits::least_irreducible(1), 0b10); // X
        assert_eq!(bits::least_irreducible(2), 0b111); // X^2+X+1
        assert_eq!(bits::least_irreducible(3), 0b1011); // X^3+X+1
        assert_eq!(bits::least_irreducible(4), 0b10011); // X^4+X+1
    }
}
