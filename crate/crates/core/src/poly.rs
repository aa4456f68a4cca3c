//! Univariate polynomials over the fields of [`crate::ff`]: ring arithmetic,
//! complete factorisation, irreducibility testing, enumeration of monic
//! irreducibles, and B-smoothness testing with an early abort.
//!
//! Factorisation follows the classical pipeline: squarefree decomposition,
//! then distinct-degree splitting, then randomised equal-degree splitting
//! (Cantor-Zassenhaus for odd characteristic, the trace construction in
//! characteristic 2). Distinct-degree splitting doubles as the cheap
//! smoothness filter used by the relation collectors, which spend most of
//! their time rejecting non-smooth candidates.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ff::{FieldElement, FieldSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("zero polynomial has no factorisation")]
    ZeroPolynomial,
    #[error("irreducible enumeration would exceed the memory cap")]
    BoundTooLarge,
    #[error("bad polynomial text: {0}")]
    ParseError(String),
}

/// Dense univariate polynomial; `coeffs[i]` is the canonical value of the
/// coefficient of X^i, with no trailing zeros (zero = empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    pub spec: FieldSpec,
    pub coeffs: Vec<u64>,
}

impl Polynomial {
    pub fn new(spec: FieldSpec, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c = spec.element(*c).value;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { spec, coeffs }
    }

    pub fn zero(spec: FieldSpec) -> Self {
        Polynomial {
            spec,
            coeffs: vec![],
        }
    }

    pub fn one(spec: FieldSpec) -> Self {
        Polynomial {
            spec,
            coeffs: vec![1],
        }
    }

    pub fn constant(spec: FieldSpec, c: u64) -> Self {
        Self::new(spec, vec![c])
    }

    /// The monomial X.
    pub fn x(spec: FieldSpec) -> Self {
        Polynomial {
            spec,
            coeffs: vec![0, 1],
        }
    }

    pub fn monomial(spec: FieldSpec, c: u64, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::new(spec, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as usize with deg 0 for the zero polynomial (convenient in
    /// bounds arithmetic where zero never occurs).
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading_coeff(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == 1
    }

    fn check(&self, other: &Polynomial) {
        assert_eq!(self.spec, other.spec, "polynomial spec mismatch");
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.check(other);
        let spec = self.spec;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = spec.element(self.coeff(i));
            let b = spec.element(other.coeff(i));
            coeffs.push(a.add(&b).value);
        }
        Polynomial::new(spec, coeffs)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let spec = self.spec;
        Polynomial {
            spec,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| spec.element(c).neg().value)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.spec);
        }
        let spec = self.spec;
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ea = spec.element(a);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let prod = ea.mul(&spec.element(b));
                let cur = spec.element(coeffs[i + j]);
                coeffs[i + j] = cur.add(&prod).value;
            }
        }
        Polynomial::new(spec, coeffs)
    }

    pub fn scale(&self, c: FieldElement) -> Polynomial {
        assert_eq!(c.spec, self.spec);
        Polynomial::new(
            self.spec,
            self.coeffs
                .iter()
                .map(|&a| self.spec.element(a).mul(&c).value)
                .collect(),
        )
    }

    /// Quotient and remainder; exact ring semantics.
    pub fn divrem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        self.check(divisor);
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let spec = self.spec;
        let dd = divisor.deg();
        if self.deg() < dd || self.is_zero() {
            return Ok((Polynomial::zero(spec), self.clone()));
        }
        let lc_inv = spec.element(divisor.leading_coeff()).inv().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = spec.element(c).mul(&lc_inv);
            quot[i - dd] = q.value;
            for (j, &dcoef) in divisor.coeffs.iter().enumerate() {
                let sub = q.mul(&spec.element(dcoef));
                rem[i - dd + j] = spec.element(rem[i - dd + j]).sub(&sub).value;
            }
        }
        rem.truncate(dd);
        Ok((Polynomial::new(spec, quot), Polynomial::new(spec, rem)))
    }

    pub fn rem(&self, divisor: &Polynomial) -> Polynomial {
        self.divrem(divisor).expect("division by zero").1
    }

    /// Exact division; panics if the division is not exact (internal misuse).
    pub fn div_exact(&self, divisor: &Polynomial) -> Polynomial {
        let (q, r) = self.divrem(divisor).expect("division by zero");
        assert!(r.is_zero(), "division was not exact");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        self.check(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` monic g with `s*a + t*b = g`.
    pub fn xgcd(&self, other: &Polynomial) -> (Polynomial, Polynomial, Polynomial) {
        self.check(other);
        let spec = self.spec;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Polynomial::one(spec), Polynomial::zero(spec));
        let (mut t0, mut t1) = (Polynomial::zero(spec), Polynomial::one(spec));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            (r0, r1) = (r1, r);
            let ns1 = s0.sub(&q.mul(&s1));
            (s0, s1) = (s1, ns1);
            let nt1 = t0.sub(&q.mul(&t1));
            (t0, t1) = (t1, nt1);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lc_inv = spec.element(r0.leading_coeff()).inv().unwrap();
        (r0.scale(lc_inv), s0.scale(lc_inv), t0.scale(lc_inv))
    }

    pub fn monic(&self) -> Polynomial {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.spec.element(self.leading_coeff()).inv().unwrap())
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        assert_eq!(x.spec, self.spec);
        let mut acc = self.spec.zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&x).add(&self.spec.element(c));
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        let spec = self.spec;
        let p = spec.characteristic();
        let coeffs: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| {
                let k = (i as u64) % p;
                spec.element(c).mul(&spec.element(k)).value
            })
            .collect();
        Polynomial::new(spec, coeffs)
    }

    /// kth power by repeated squaring (small k).
    pub fn pow(&self, mut k: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.spec);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiply by X^k.
    pub fn shift(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u64; k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial {
            spec: self.spec,
            coeffs,
        }
    }

    /// Text form: comma-separated coefficient values, constant term first,
    /// e.g. `1,1,0,1` for 1 + X + X^3.
    pub fn parse(spec: FieldSpec, s: &str) -> Result<Polynomial, PolyError> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Polynomial::zero(spec));
        }
        let coeffs: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse::<u64>()).collect();
        match coeffs {
            Ok(c) => Ok(Polynomial::new(spec, c)),
            Err(_) => Err(PolyError::ParseError(s.to_string())),
        }
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "X")?,
                1 => write!(f, "{c}*X")?,
                _ if c == 1 => write!(f, "X^{i}")?,
                _ => write!(f, "{c}*X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Unit times a product of distinct monic irreducibles with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElement,
    pub factors: Vec<(Polynomial, u32)>,
}

impl Factorization {
    /// Multiply the factorisation back out.
    pub fn expand(&self) -> Polynomial {
        let mut acc = Polynomial::constant(self.unit.spec, self.unit.value);
        for (p, e) in &self.factors {
            acc = acc.mul(&p.pow(*e as u64));
        }
        acc
    }

    pub fn max_factor_degree(&self) -> usize {
        self.factors.iter().map(|(p, _)| p.deg()).max().unwrap_or(0)
    }

    /// Total number of irreducible factors counted with multiplicity.
    pub fn total_multiplicity(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }
}

/// Arithmetic in the residue ring `F_q[X]/(modulus)`; when the modulus is
/// irreducible of degree d this is the field with q^d elements.
pub struct PolyMod<'a> {
    pub modulus: &'a Polynomial,
}

impl<'a> PolyMod<'a> {
    pub fn new(modulus: &'a Polynomial) -> Self {
        assert!(modulus.deg() >= 1, "modulus must have positive degree");
        PolyMod { modulus }
    }

    pub fn spec(&self) -> FieldSpec {
        self.modulus.spec
    }

    pub fn reduce(&self, a: &Polynomial) -> Polynomial {
        a.rem(self.modulus)
    }

    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.mul(b).rem(self.modulus)
    }

    pub fn square(&self, a: &Polynomial) -> Polynomial {
        self.mul(a, a)
    }

    pub fn pow_u64(&self, a: &Polynomial, mut e: u64) -> Polynomial {
        let mut base = self.reduce(a);
        let mut acc = Polynomial::one(a.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &Polynomial, e: &BigUint) -> Polynomial {
        let mut base = self.reduce(a);
        let mut acc = Polynomial::one(a.spec);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = self.mul(&acc, &base);
            }
            if i + 1 < e.bits() {
                base = self.square(&base);
            }
        }
        acc
    }

    /// Inverse modulo the modulus when it exists (gcd = 1).
    pub fn inv(&self, a: &Polynomial) -> Option<Polynomial> {
        let (g, s, _) = a.xgcd(self.modulus);
        if g.is_one() {
            Some(self.reduce(&s))
        } else {
            None
        }
    }

    /// Number of elements of the residue field, q^deg.
    pub fn field_order(&self) -> BigUint {
        self.spec().order().pow(self.modulus.deg() as u32)
    }

    /// Absolute trace to F_2 of an element of a characteristic-2 residue
    /// field: the sum of all 2-power conjugates. Returns 0 or 1.
    pub fn abs_trace_char2(&self, a: &Polynomial) -> u64 {
        assert_eq!(self.spec().characteristic(), 2);
        let m = match self.spec() {
            FieldSpec::Binary { m, .. } => m as usize,
            FieldSpec::Prime { .. } => 1,
        };
        let dim = m * self.modulus.deg();
        let mut acc = Polynomial::zero(self.spec());
        let mut cur = self.reduce(a);
        for _ in 0..dim {
            acc = acc.add(&cur);
            cur = self.square(&cur);
        }
        assert!(acc.is_constant());
        acc.coeff(0)
    }

    /// Solve w^2 + w = c in a characteristic-2 residue field, if a solution
    /// exists (absolute trace zero). Half-trace for odd dimension, a GF(2)
    /// linear solve otherwise.
    pub fn solve_artin_schreier(&self, c: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.spec().characteristic(), 2);
        if self.abs_trace_char2(c) != 0 {
            return None;
        }
        let m = match self.spec() {
            FieldSpec::Binary { m, .. } => m as usize,
            FieldSpec::Prime { .. } => 1,
        };
        let dim = m * self.modulus.deg();
        if dim % 2 == 1 {
            // half trace: sum of c^(4^i)
            let mut acc = Polynomial::zero(self.spec());
            let mut cur = self.reduce(c);
            for _ in 0..=(dim - 1) / 2 {
                acc = acc.add(&cur);
                cur = self.square(&self.square(&cur));
            }
            debug_assert_eq!(self.square(&acc).add(&acc), self.reduce(c));
            return Some(acc);
        }
        // even dimension: solve the F_2-linear system (w^2 + w) = c by
        // Gaussian elimination over the bit coordinates
        assert!(dim <= 63, "residue field dimension too large");
        let d = self.modulus.deg();
        let to_bits = |p: &Polynomial| -> u64 {
            let mut bits = 0u64;
            for j in 0..d {
                bits |= p.coeff(j) << (j * m);
            }
            bits
        };
        let from_bits = |bits: u64| -> Polynomial {
            let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
            let coeffs: Vec<u64> = (0..d).map(|j| (bits >> (j * m)) & mask).collect();
            Polynomial::new(self.spec(), coeffs)
        };
        // columns of the map L(w) = w^2 + w on the basis
        let mut cols = Vec::with_capacity(dim);
        for i in 0..dim {
            let basis = from_bits(1u64 << i);
            let img = self.square(&basis).add(&basis);
            cols.push(to_bits(&img));
        }
        // solve sum_i x_i cols[i] = c over GF(2)
        let mut rows: Vec<(u64, u64)> = Vec::new(); // (row of images, row of coordinates)
        let target = to_bits(&self.reduce(c));
        let mut rhs = target;
        let mut solution = 0u64;
        // build an echelon basis of the column space with coordinate tracking
        for (i, &col) in cols.iter().enumerate() {
            let mut v = col;
            let mut coord = 1u64 << i;
            for &(rv, rc) in &rows {
                let lead = 63 - rv.leading_zeros();
                if v >> lead & 1 == 1 {
                    v ^= rv;
                    coord ^= rc;
                }
            }
            if v != 0 {
                rows.push((v, coord));
                rows.sort_by_key(|&(rv, _)| std::cmp::Reverse(rv));
            }
        }
        for &(rv, rc) in &rows {
            let lead = 63 - rv.leading_zeros();
            if rhs >> lead & 1 == 1 {
                rhs ^= rv;
                solution ^= rc;
            }
        }
        if rhs != 0 {
            return None;
        }
        let w = from_bits(solution);
        debug_assert_eq!(self.square(&w).add(&w), self.reduce(c));
        Some(w)
    }

    /// Square root in an odd-characteristic residue field (Tonelli-Shanks),
    /// if the element is a square.
    pub fn sqrt_odd(&self, a: &Polynomial, rng: &mut ChaCha8Rng) -> Option<Polynomial> {
        assert_ne!(self.spec().characteristic(), 2);
        let a = self.reduce(a);
        if a.is_zero() {
            return Some(a);
        }
        let order = self.field_order();
        let order_minus_1 = &order - BigUint::one();
        let half = &order_minus_1 >> 1;
        let euler = self.pow_big(&a, &half);
        if !euler.is_one() {
            return None; // non-square (or modulus not irreducible)
        }
        // order - 1 = 2^s * t with t odd
        let mut t = order_minus_1.clone();
        let mut s = 0u64;
        while t.is_even() {
            t >>= 1;
            s += 1;
        }
        if s == 1 {
            // order = 3 mod 4
            let e = (&order + BigUint::one()) >> 2;
            let r = self.pow_big(&a, &e);
            debug_assert_eq!(self.square(&r), a);
            return Some(r);
        }
        // find a non-square
        let nonsquare = loop {
            let mut coeffs = Vec::with_capacity(self.modulus.deg());
            for _ in 0..self.modulus.deg() {
                coeffs.push(self.spec().random_element(rng).value);
            }
            let z = Polynomial::new(self.spec(), coeffs);
            if z.is_zero() {
                continue;
            }
            let e = self.pow_big(&z, &half);
            if !e.is_one() {
                break z;
            }
        };
        let mut m_exp = s;
        let mut c = self.pow_big(&nonsquare, &t);
        let mut u = self.pow_big(&a, &t);
        let mut r = self.pow_big(&a, &((&t + BigUint::one()) >> 1));
        while !u.is_one() {
            // find least i with u^(2^i) = 1
            let mut i = 0u64;
            let mut probe = u.clone();
            while !probe.is_one() {
                probe = self.square(&probe);
                i += 1;
                if i == m_exp {
                    return None;
                }
            }
            let mut b = c.clone();
            for _ in 0..m_exp - i - 1 {
                b = self.square(&b);
            }
            m_exp = i;
            c = self.square(&b);
            u = self.mul(&u, &c);
            r = self.mul(&r, &b);
        }
        debug_assert_eq!(self.square(&r), a);
        Some(r)
    }
}

/// Squarefree decomposition: f = unit * prod g_i^i with each g_i squarefree,
/// pairwise coprime. Handles inseparable parts (f' = 0) by p-th roots.
pub fn squarefree_decomposition(f: &Polynomial) -> (FieldElement, Vec<(Polynomial, u32)>) {
    let spec = f.spec;
    assert!(!f.is_zero());
    let unit = spec.element(f.leading_coeff());
    let f = f.monic();
    let mut out: Vec<(Polynomial, u32)> = Vec::new();
    sqf_rec(&f, 1, &mut out);
    (unit, out)
}

fn pth_root(f: &Polynomial) -> Polynomial {
    // f is a p-th power: take the root coefficientwise
    let spec = f.spec;
    let p = spec.characteristic() as usize;
    let root_exp = match spec {
        FieldSpec::Prime { .. } => 1u64, // Frobenius is identity on F_p
        FieldSpec::Binary { m, .. } => 1u64 << (m - 1), // c^(2^(m-1)) = sqrt(c)
    };
    let mut coeffs = Vec::with_capacity(f.coeffs.len() / p + 1);
    for (i, &c) in f.coeffs.iter().enumerate() {
        if i % p == 0 {
            coeffs.push(spec.element(c).pow(root_exp).value);
        } else {
            debug_assert_eq!(c, 0, "polynomial is not a p-th power");
        }
    }
    Polynomial::new(spec, coeffs)
}

fn sqf_rec(f: &Polynomial, mult: u32, out: &mut Vec<(Polynomial, u32)>) {
    if f.is_one() {
        return;
    }
    let p = f.spec.characteristic() as u32;
    let fd = f.derivative();
    if fd.is_zero() {
        sqf_rec(&pth_root(f), mult * p, out);
        return;
    }
    let mut c = f.gcd(&fd);
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if !z.is_one() {
            out.push((z, mult * i));
        }
        c = c.div_exact(&y);
        w = y;
        i += 1;
    }
    if !c.is_one() {
        sqf_rec(&pth_root(&c), mult * p, out);
    }
}

/// Distinct-degree splitting of a monic squarefree polynomial: returns
/// `(product of irreducibles of degree d, d)` pairs in increasing d.
pub fn distinct_degree_split(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    let spec = f.spec;
    let q = spec.order_u64();
    let mut v = f.monic();
    let mut parts = Vec::new();
    let mut h = Polynomial::x(spec).rem(&v);
    let mut d = 0usize;
    while v.deg() >= 2 * (d + 1) {
        d += 1;
        let ctx = PolyMod::new(&v);
        h = ctx.pow_u64(&h, q);
        let g = h.sub(&Polynomial::x(spec)).gcd(&v);
        if !g.is_one() {
            parts.push((g.clone(), d));
            v = v.div_exact(&g);
            if v.is_one() {
                return parts;
            }
            h = h.rem(&v);
        }
    }
    if !v.is_one() {
        let d = v.deg();
        parts.push((v, d));
    }
    parts
}

/// Equal-degree splitting: factor a monic product of distinct irreducibles,
/// all of degree d, into the irreducibles (randomised).
fn equal_degree_split(f: &Polynomial, d: usize, rng: &mut ChaCha8Rng) -> Vec<Polynomial> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let spec = f.spec;
    let split = loop {
        let mut coeffs = Vec::with_capacity(f.deg());
        for _ in 0..f.deg() {
            coeffs.push(spec.random_element(rng).value);
        }
        let a = Polynomial::new(spec, coeffs);
        if a.is_constant() {
            continue;
        }
        let g0 = a.gcd(f);
        if !g0.is_one() && g0.deg() < f.deg() {
            break g0;
        }
        let ctx = PolyMod::new(f);
        let candidate = if spec.characteristic() == 2 {
            // trace map over F_2: sum of a^(2^i) for i < m*d
            let m = match spec {
                FieldSpec::Binary { m, .. } => m as usize,
                FieldSpec::Prime { .. } => 1,
            };
            let mut acc = Polynomial::zero(spec);
            let mut cur = ctx.reduce(&a);
            for _ in 0..m * d {
                acc = acc.add(&cur);
                cur = ctx.square(&cur);
            }
            acc
        } else {
            // a^((q^d - 1)/2) - 1
            let e = (spec.order().pow(d as u32) - BigUint::one()) >> 1;
            let b = ctx.pow_big(&a, &e);
            b.sub(&Polynomial::one(spec))
        };
        let g = candidate.gcd(f);
        if !g.is_one() && g.deg() < f.deg() {
            break g;
        }
    };
    let other = f.div_exact(&split);
    let mut out = equal_degree_split(&split, d, rng);
    out.extend(equal_degree_split(&other, d, rng));
    out
}

/// Complete factorisation into monic irreducibles. Deterministic for a given
/// input: the randomised splitting is seeded from the polynomial itself.
pub fn factor(f: &Polynomial) -> Result<Factorization, PolyError> {
    let mut hasher = 0xcbf29ce484222325u64;
    for &c in &f.coeffs {
        hasher = (hasher ^ c).wrapping_mul(0x100000001b3);
    }
    factor_seeded(f, hasher)
}

pub fn factor_seeded(f: &Polynomial, seed: u64) -> Result<Factorization, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (unit, sqf) = squarefree_decomposition(f);
    let mut factors: Vec<(Polynomial, u32)> = Vec::new();
    for (g, mult) in sqf {
        for (part, d) in distinct_degree_split(&g) {
            for irr in equal_degree_split(&part, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| (a.0.deg(), &a.0.coeffs).cmp(&(b.0.deg(), &b.0.coeffs)));
    Ok(Factorization { unit, factors })
}

/// Rabin irreducibility test.
pub fn is_irreducible(f: &Polynomial) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let spec = f.spec;
    let q = spec.order_u64();
    let ctx = PolyMod::new(f);
    let x = Polynomial::x(spec).rem(f);
    // cache x^(q^k) for k = 1..n
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(x.clone());
    let mut cur = x.clone();
    for _ in 0..n {
        cur = ctx.pow_u64(&cur, q);
        frob.push(cur.clone());
    }
    if frob[n] != x {
        return false;
    }
    for (p, _) in crate::numbers::factor_u64(n as u64) {
        let k = n / p as usize;
        let g = frob[k].sub(&x).gcd(f);
        if !g.is_one() {
            return false;
        }
    }
    true
}

const ENUM_CAP: u64 = 1 << 24;

/// All monic irreducibles of degree <= bound, sorted by (degree, lexicographic
/// coefficients with the constant term most significant). The order is fixed
/// so factor-base column indices are stable across runs.
pub fn enumerate_irreducibles(spec: FieldSpec, bound: usize) -> Result<Vec<Polynomial>, PolyError> {
    assert!(bound >= 1);
    let q = spec.order_u64();
    let mut total: u64 = 0;
    for d in 1..=bound {
        total = total.saturating_add(q.saturating_pow(d as u32));
        if total > ENUM_CAP {
            return Err(PolyError::BoundTooLarge);
        }
    }
    let mut out = Vec::new();
    for d in 1..=bound {
        let count = q.pow(d as u32);
        for n in 0..count {
            // decode digits with c_0 most significant
            let mut coeffs = vec![0u64; d + 1];
            coeffs[d] = 1;
            let mut rest = n;
            for i in (0..d).rev() {
                coeffs[i] = rest % q;
                rest /= q;
            }
            // interpret digit as canonical element value
            let f = Polynomial::new(spec, coeffs);
            if is_irreducible(&f) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// B-smooth part test: `Some(factorisation)` when every irreducible factor of
/// f has degree <= bound, `None` otherwise. A gcd ladder against X^(q^i) - X
/// rejects non-smooth inputs before any full factorisation work.
pub fn smooth_part(f: &Polynomial, bound: usize) -> Option<Factorization> {
    if f.is_zero() {
        return None;
    }
    let spec = f.spec;
    if f.is_constant() {
        return Some(Factorization {
            unit: spec.element(f.coeff(0)),
            factors: vec![],
        });
    }
    let q = spec.order_u64();
    // fast rejection: strip factors of degree <= bound, smooth iff nothing left
    let mut g = f.monic();
    let mut h = Polynomial::x(spec).rem(&g);
    for _ in 1..=bound {
        if g.is_constant() {
            break;
        }
        let ctx = PolyMod::new(&g);
        h = ctx.pow_u64(&h, q);
        let mut d = h.sub(&Polynomial::x(spec)).gcd(&g);
        while !d.is_constant() {
            g = g.div_exact(&d);
            if g.is_constant() {
                break;
            }
            d = d.gcd(&g);
        }
        if g.is_constant() {
            break;
        }
        h = h.rem(&g);
    }
    if !g.is_constant() {
        return None;
    }
    let fact = factor(f).expect("nonzero");
    debug_assert!(fact.max_factor_degree() <= bound);
    Some(fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2)
    }

    fn poly(spec: FieldSpec, coeffs: &[u64]) -> Polynomial {
        Polynomial::new(spec, coeffs.to_vec())
    }

    #[test]
    fn gcd_example_f7() {
        let f7 = FieldSpec::prime(7);
        // gcd(X^2 - 1, X - 1) = X - 1, monic; by-hand Euclid gives X + 6
        let a = poly(f7, &[6, 0, 1]);
        let b = poly(f7, &[6, 1]);
        assert_eq!(a.gcd(&b), poly(f7, &[6, 1]));
    }

    #[test]
    fn mul_identity_and_exact_division() {
        let f5 = FieldSpec::prime(5);
        let f = poly(f5, &[2, 0, 3, 1]);
        assert_eq!(f.mul(&Polynomial::one(f5)), f);
        // X^3 / X^2 = (X, 0)
        let (q, r) = poly(f5, &[0, 0, 0, 1]).divrem(&poly(f5, &[0, 0, 1])).unwrap();
        assert_eq!(q, poly(f5, &[0, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn factor_examples_f2() {
        // X^2 + X = X(X+1); oracle: both roots 0,1 exist
        let f = poly(f2(), &[0, 1, 1]);
        let fact = factor(&f).unwrap();
        assert_eq!(fact.factors.len(), 2);
        assert_eq!(fact.expand(), f);

        // X^2 + X + 1 irreducible: no roots in F_2 and degree 2
        let f = poly(f2(), &[1, 1, 1]);
        assert!(f.eval(f2().element(0)).value != 0);
        assert!(f.eval(f2().element(1)).value != 0);
        let fact = factor(&f).unwrap();
        assert_eq!(fact.factors, vec![(f.clone(), 1)]);
        assert!(is_irreducible(&f));

        // X^4 + X = X (X+1) (X^2+X+1); verify by multiplying back
        let f = poly(f2(), &[0, 1, 0, 0, 1]);
        let fact = factor(&f).unwrap();
        assert_eq!(fact.factors.len(), 3);
        assert_eq!(fact.expand(), f);

        // X^2 + 1 = (X+1)^2 over F_2
        let f = poly(f2(), &[1, 0, 1]);
        assert!(!is_irreducible(&f));
        let fact = factor(&f).unwrap();
        assert_eq!(fact.factors, vec![(poly(f2(), &[1, 1]), 2)]);
    }

    #[test]
    fn degree_one_is_irreducible() {
        let f7 = FieldSpec::prime(7);
        assert!(is_irreducible(&Polynomial::x(f7)));
    }

    #[test]
    fn enumerate_counts() {
        let irr = enumerate_irreducibles(f2(), 2).unwrap();
        assert_eq!(
            irr,
            vec![
                poly(f2(), &[0, 1]),
                poly(f2(), &[1, 1]),
                poly(f2(), &[1, 1, 1])
            ]
        );
        assert_eq!(enumerate_irreducibles(f2(), 4).unwrap().len(), 8);
        let f3 = FieldSpec::prime(3);
        let lin = enumerate_irreducibles(f3, 1).unwrap();
        assert_eq!(
            lin,
            vec![poly(f3, &[0, 1]), poly(f3, &[1, 1]), poly(f3, &[2, 1])]
        );
    }

    #[test]
    fn necklace_formula_oracle() {
        // number of monic irreducibles of degree k over F_q equals
        // (1/k) sum_{d | k} mu(k/d) q^d
        for q in [2u64, 3, 5] {
            let spec = FieldSpec::prime(q);
            let irr = enumerate_irreducibles(spec, 8).unwrap();
            for k in 1..=8usize {
                let count = irr.iter().filter(|f| f.deg() == k).count() as i64;
                let mut expect = 0i64;
                for d in 1..=k {
                    if k % d == 0 {
                        expect += numbers::moebius((k / d) as u64) * (q as i64).pow(d as u32);
                    }
                }
                expect /= k as i64;
                assert_eq!(count, expect, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn smooth_part_examples() {
        // (X^2+X, B=1) over F_2 -> smooth
        let f = poly(f2(), &[0, 1, 1]);
        let s = smooth_part(&f, 1).unwrap();
        assert_eq!(s.expand(), f);
        // (X^2+X+1, B=1) -> not smooth
        assert!(smooth_part(&poly(f2(), &[1, 1, 1]), 1).is_none());
        // the constant 1 is vacuously smooth
        let s = smooth_part(&Polynomial::one(f2()), 1).unwrap();
        assert!(s.factors.is_empty());
        assert!(s.unit.is_one());
    }

    #[test]
    fn factor_roundtrip_random() {
        use rand::Rng;
        let specs = [FieldSpec::prime(2), FieldSpec::prime(3), FieldSpec::binary(8)];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for spec in specs {
            for _ in 0..333 {
                let deg = rng.gen_range(1..=40);
                let mut coeffs: Vec<u64> = (0..=deg)
                    .map(|_| spec.random_element(&mut rng).value)
                    .collect();
                if coeffs[deg] == 0 {
                    coeffs[deg] = 1;
                }
                let f = Polynomial::new(spec, coeffs);
                let fact = factor(&f).unwrap();
                assert_eq!(fact.expand(), f);
                for (p, _) in &fact.factors {
                    assert!(is_irreducible(p), "non-irreducible factor {p}");
                }
                // smooth_part agrees with the full factorisation
                let bound = rng.gen_range(1..=8usize);
                let smooth = smooth_part(&f, bound);
                assert_eq!(smooth.is_some(), fact.max_factor_degree() <= bound);
            }
        }
    }

    #[test]
    fn squarefree_handles_pth_powers() {
        let f3 = FieldSpec::prime(3);
        // (X+1)^3 has zero derivative
        let f = poly(f3, &[1, 1]).pow(3);
        let fact = factor(&f).unwrap();
        assert_eq!(fact.factors, vec![(poly(f3, &[1, 1]), 3)]);
        // mixed: X^2 (X+1)^3 over F_2
        let f = poly(f2(), &[0, 0, 1]).mul(&poly(f2(), &[1, 1]).pow(3));
        let fact = factor(&f).unwrap();
        assert_eq!(fact.expand(), f);
        assert_eq!(fact.factors.len(), 2);
    }

    #[test]
    fn sqrt_odd_char() {
        let f7 = FieldSpec::prime(7);
        let modulus = poly(f7, &[1, 0, 1]); // X^2 + 1, irreducible over F_7? 7 = 3 mod 4, yes
        assert!(is_irreducible(&modulus));
        let ctx = PolyMod::new(&modulus);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for v in 0..30u64 {
            let a = poly(f7, &[v % 7, (v / 7) % 7]);
            if a.is_zero() {
                continue;
            }
            let sq = ctx.square(&a);
            let r = ctx.sqrt_odd(&sq, &mut rng).expect("square has a root");
            assert_eq!(ctx.square(&r), sq);
        }
    }

    #[test]
    fn artin_schreier_solutions() {
        // odd dimension (F_2^5) and even dimension (F_2^4) both via PolyMod
        for m in [5u32, 4] {
            let spec = FieldSpec::binary(m);
            let modulus = Polynomial::new(spec, vec![spec.element(3).value, 1]); // X + 3
            let ctx = PolyMod::new(&modulus);
            let mut solvable = 0;
            for v in 0..(1u64 << m) {
                let c = Polynomial::constant(spec, v);
                match ctx.solve_artin_schreier(&c) {
                    Some(w) => {
                        assert_eq!(ctx.square(&w).add(&w), ctx.reduce(&c));
                        solvable += 1;
                    }
                    None => {}
                }
            }
            // exactly half the elements have trace zero
            assert_eq!(solvable, 1 << (m - 1));
        }
    }

    #[test]
    fn parse_and_print() {
        let f7 = FieldSpec::prime(7);
        let f = Polynomial::parse(f7, "1,1,0,1").unwrap();
        assert_eq!(f, poly(f7, &[1, 1, 0, 1]));
        assert_eq!(f.to_text(), "1,1,0,1");
        assert_eq!(Polynomial::parse(f7, "0").unwrap(), Polynomial::zero(f7));
    }
}
