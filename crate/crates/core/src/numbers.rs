//! Integer utilities shared across the crate: modular arithmetic on words,
//! deterministic Miller-Rabin, Pollard-Brent factorisation and a few
//! elementary number-theoretic functions.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `a * b mod n` without overflow for any `u64` inputs.
pub fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `a^e mod n` by square-and-multiply.
pub fn powmod(mut a: u64, mut e: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut r = 1u64;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, n);
        }
        a = mulmod(a, a, n);
        e >>= 1;
    }
    r
}

/// Modular inverse of `a` mod `n`, if it exists.
pub fn invmod(a: u64, n: u64) -> Option<u64> {
    let (g, x, _) = xgcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    let n = n as i128;
    Some((((x % n) + n) % n) as u64)
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Deterministic Miller-Rabin for `u64` (the 12-base set is exact below 3.3e24).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho: one nontrivial factor of composite `n`.
fn brent_factor(n: u64, seed: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = seed % n;
    loop {
        c = c.wrapping_add(1) % n;
        if c == 0 {
            c = 1;
        }
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut ys);
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                if g == 1 {
                    k += m;
                    continue;
                }
                if g == n {
                    // backtrack step by step
                    g = 1;
                    let mut z = ys;
                    while g == 1 {
                        z = f(z);
                        g = x.abs_diff(z).gcd(&n);
                    }
                }
                k += m;
            }
            r *= 2;
        }
        if g != n {
            return g;
        }
    }
}

/// Full factorisation of `n` as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    };
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = vec![n];
    let mut seed = 1u64;
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        // small trial division first, rho for what remains
        let mut m = m;
        let mut p = 49u64;
        while p * p <= m && p < 1 << 16 {
            if m % p == 0 {
                push(p, &mut out);
                m /= p;
                if is_prime(m) {
                    push(m, &mut out);
                    m = 1;
                    break;
                }
                continue;
            }
            p += 2;
        }
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        seed += 1;
        let d = brent_factor(m, seed);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// Euler totient from a factorisation.
pub fn totient(factors: &[(u64, u32)]) -> u64 {
    factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Moebius function for small arguments.
pub fn moebius(n: u64) -> i64 {
    if n == 1 {
        return 1;
    }
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Inverse of `a` modulo `n` over big integers.
pub fn biguint_invmod(a: &BigUint, n: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let n = BigInt::from(n.clone());
    let e = a.extended_gcd(&n);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &n;
    if x.is_negative() {
        x += &n;
    }
    Some(x.to_biguint().unwrap())
}

/// Factorisation of a `BigUint` that is assumed to fit the word-sized
/// machinery after removing small primes. Group orders in this crate stay
/// below 2^64, so this simply converts.
pub fn factor_biguint(n: &BigUint) -> Option<Vec<(u64, u32)>> {
    let digits = n.to_u64_digits();
    match digits.len() {
        0 => Some(vec![]),
        1 => Some(factor_u64(digits[0])),
        _ => None,
    }
}

/// `floor(sqrt(n))` for big integers.
pub fn isqrt_big(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let mut x: BigUint = BigUint::one() << (n.bits().div_ceil(2) as usize);
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}
