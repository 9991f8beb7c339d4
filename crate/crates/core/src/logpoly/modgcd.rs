//! Square-free part of an integer polynomial via modular gcd computations.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, in descending order.
fn primes() -> impl Iterator<Item = u64> {
    let mut c = (1u64 << 62) + 1;
    std::iter::from_fn(move || loop {
        c -= 2;
        if is_prime(c) {
            return Some(c);
        }
    })
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Monic gcd over GF(p); empty vector for the zero polynomial.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let f = mul_mod(*a.last().unwrap(), inv, p);
            for (i, bi) in b.iter().enumerate() {
                let t = mul_mod(f, *bi, p);
                a[i + shift] = (a[i + shift] + p - t) % p;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&lc) = a.last() {
        let inv = pow_mod(lc, p - 2, p);
        for v in a.iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
    }
    a
}

/// Rational `a/b` congruent to `r` mod `m` with `|a|, b <= sqrt(m/2)`.
fn rational_reconstruct(r: &BigUint, m: &BigUint) -> Option<(BigInt, BigInt)> {
    let bound = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (BigInt::from(m.clone()), BigInt::from(r.clone()));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while BigInt::from(bound.clone()) < r1 {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > BigInt::from(bound) {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Exact quotient `a / b` over the integers, or `None` if `b` does not divide `a`.
fn exact_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return if a.iter().all(|c| c.is_zero()) { Some(vec![BigInt::zero()]) } else { None };
    }
    let lc = &b[db];
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let (q, r) = rem[i + db].div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &q * bj;
            }
        }
        quot[i] = q;
    }
    if rem.iter().take(db).all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

fn to_uint(v: Vec<BigInt>) -> Option<Vec<BigUint>> {
    v.into_iter().map(|c| c.to_biguint()).collect()
}

/// Square-free part `S = Q / gcd(Q, Q')` and the degree of the gcd.
///
/// Coefficients are expected to be nonnegative.
pub fn squarefree(q: &[BigUint]) -> Result<(Vec<BigUint>, usize)> {
    let d = q.len() - 1;
    if d <= 1 {
        return Ok((q.to_vec(), 0));
    }
    let dq: Vec<BigUint> = (1..=d).map(|k| &q[k] * k as u64).collect();
    let lc = &q[d];
    let qi: Vec<BigInt> = q.iter().map(|c| BigInt::from(c.clone())).collect();
    let dqi: Vec<BigInt> = dq.iter().map(|c| BigInt::from(c.clone())).collect();

    let mut best = usize::MAX;
    let mut modulus = BigUint::one();
    let mut residues: Vec<BigUint> = Vec::new();
    let mut used = 0usize;
    let mut previous: Option<Vec<BigInt>> = None;
    for p in primes() {
        used += 1;
        if used > 200_000 {
            break;
        }
        if (lc * d as u64 % p).is_zero() {
            continue;
        }
        let qm: Vec<u64> = q.iter().map(|c| (c % p).to_u64().unwrap()).collect();
        let dm: Vec<u64> = dq.iter().map(|c| (c % p).to_u64().unwrap()).collect();
        let g = gcd_mod(qm, dm, p);
        let deg = g.len() - 1;
        if deg == 0 {
            return Ok((q.to_vec(), 0));
        }
        if deg > best {
            continue;
        }
        if deg < best {
            best = deg;
            modulus = BigUint::one();
            residues = vec![BigUint::zero(); deg + 1];
            previous = None;
        }
        // incremental CRT
        let pb = BigUint::from(p);
        let m_mod_p = (&modulus % p).to_u64().unwrap();
        let inv = pow_mod(m_mod_p, p - 2, p);
        for (r, &gp) in residues.iter_mut().zip(g.iter()) {
            let r_mod_p = (&*r % p).to_u64().unwrap();
            let diff = (gp + p - r_mod_p) % p;
            let t = mul_mod(diff, inv, p);
            *r += &modulus * t;
        }
        modulus *= pb;

        let recon: Option<Vec<(BigInt, BigInt)>> = residues.iter().map(|r| rational_reconstruct(r, &modulus)).collect();
        let Some(recon) = recon else { continue };
        let den = recon.iter().fold(BigInt::one(), |acc, (_, b)| acc.lcm(b));
        let mut gz: Vec<BigInt> = recon.iter().map(|(a, b)| a * (&den / b)).collect();
        let content = gz.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        for c in gz.iter_mut() {
            *c /= &content;
        }
        if gz[best].sign() == Sign::Minus {
            for c in gz.iter_mut() {
                *c = -c.clone();
            }
        }
        if previous.as_ref() != Some(&gz) {
            previous = Some(gz);
            continue;
        }
        if let (Some(s), Some(_)) = (exact_div(&qi, &gz), exact_div(&dqi, &gz)) {
            if let Some(s) = to_uint(s) {
                return Ok((s, best));
            }
        }
    }
    Err(Error::RootIsolation {
        stage: "squarefree",
        lo: f64::NAN,
        hi: f64::NAN,
        detail: format!("gcd reconstruction did not stabilize after {used} primes"),
    })
}
