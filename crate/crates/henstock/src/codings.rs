//! Pairing functions, codes for integers/rationals/bit strings, and the
//! Stern-Brocot enumeration of the rationals.
//!
//! Everything here is arbitrary precision. The Cantor pair `(m+n)(m+n+1)/2 + m`
//! is the bijective pairing used for scan orders; `(m+n)^2 + m` is the injective
//! (not surjective) pairing used by the integer and rational codes.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

pub type Nat = BigUint;
pub type Rat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodingError {
    ZeroDenominator,
    BadRational(String),
    BadBitString(String),
    OutOfRange(String),
}

impl fmt::Display for CodingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodingError::ZeroDenominator => write!(f, "denominator is zero"),
            CodingError::BadRational(s) => write!(f, "cannot parse rational from {:?}", s),
            CodingError::BadBitString(s) => write!(f, "cannot parse bit string from {:?}", s),
            CodingError::OutOfRange(s) => write!(f, "{}", s),
        }
    }
}

impl std::error::Error for CodingError {}

/// 2^k as an exact rational; k may be negative.
pub fn pow2(k: i64) -> Rat {
    let mag = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

pub fn nat(n: u64) -> Nat {
    BigUint::from(n)
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// Pairing functions

/// Bijective pairing (m+n)(m+n+1)/2 + m. Enumerates antidiagonals; within the
/// antidiagonal m+n = d the codes run (0,d), (1,d-1), ..., (d,0).
pub fn pair_cantor(m: &Nat, n: &Nat) -> Nat {
    let s = m + n;
    &s * (&s + 1u32) / 2u32 + m
}

pub fn unpair_cantor(c: &Nat) -> (Nat, Nat) {
    // w = floor((sqrt(8c+1)-1)/2); floor isqrt guarantees m <= w below.
    let s = (c * 8u32 + 1u32).sqrt();
    let w = (&s - 1u32) / 2u32;
    let t = &w * (&w + 1u32) / 2u32;
    let m = c - t;
    let n = &w - &m;
    (m, n)
}

/// pair3(m, n, k) = pairCantor(m, pairCantor(n, k)).
pub fn pair3(m: &Nat, n: &Nat, k: &Nat) -> Nat {
    pair_cantor(m, &pair_cantor(n, k))
}

pub fn unpair3(c: &Nat) -> (Nat, Nat, Nat) {
    let (m, rest) = unpair_cantor(c);
    let (n, k) = unpair_cantor(&rest);
    (m, n, k)
}

/// Right-nested Cantor pairing of a fixed-arity tuple. Arity 0 codes to 0.
pub fn pair_tuple(values: &[Nat]) -> Nat {
    match values.len() {
        0 => Nat::zero(),
        1 => values[0].clone(),
        _ => pair_cantor(&values[0], &pair_tuple(&values[1..])),
    }
}

pub fn unpair_tuple(c: &Nat, arity: usize) -> Vec<Nat> {
    match arity {
        0 => Vec::new(),
        1 => vec![c.clone()],
        _ => {
            let (head, rest) = unpair_cantor(c);
            let mut out = vec![head];
            out.extend(unpair_tuple(&rest, arity - 1));
            out
        }
    }
}

/// Injective pairing (m+n)^2 + m. Not surjective: codes with
/// c - isqrt(c)^2 > isqrt(c) decode to nothing.
pub fn pair_square(m: &Nat, n: &Nat) -> Nat {
    let s = m + n;
    &s * &s + m
}

pub fn unpair_square(c: &Nat) -> Option<(Nat, Nat)> {
    let a = c.sqrt();
    let m = c - &a * &a;
    if m <= a {
        let n = &a - &m;
        Some((m, n))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Integer and rational codes

/// Minimal pair code of an integer: z >= 0 codes as (z, 0), z < 0 as (0, -z).
pub fn int_code(z: &BigInt) -> Nat {
    let mag = z.magnitude().clone();
    if z.is_negative() {
        pair_square(&Nat::zero(), &mag)
    } else {
        pair_square(&mag, &Nat::zero())
    }
}

/// Reads any pair code by its class value m - n; None if not a pair code.
pub fn int_decode_class(c: &Nat) -> Option<BigInt> {
    let (m, n) = unpair_square(c)?;
    Some(BigInt::from(m) - BigInt::from(n))
}

/// Code of a rational in lowest terms: pairSquare(intCode(num), intCode(den)).
pub fn rat_code(q: &Rat) -> Nat {
    pair_square(&int_code(q.numer()), &int_code(q.denom()))
}

/// Total interpretation of a natural number as a rational. Failed unpairings
/// and non-positive denominators fall back to 0/1; integer components are read
/// by class value. Used to read machine outputs as approximations.
pub fn rat_decode_total(c: &Nat) -> Rat {
    let Some((a_code, b_code)) = unpair_square(c) else {
        return Rat::zero();
    };
    let (Some(a), Some(b)) = (int_decode_class(&a_code), int_decode_class(&b_code)) else {
        return Rat::zero();
    };
    if b.is_positive() {
        Rat::new(a, b)
    } else {
        Rat::zero()
    }
}

/// Reduces a/b to lowest terms with positive denominator; rejects b = 0.
pub fn canon_rational(a: &BigInt, b: &BigInt) -> Result<Rat, CodingError> {
    if b.is_zero() {
        return Err(CodingError::ZeroDenominator);
    }
    Ok(Rat::new(a.clone(), b.clone()))
}

/// "num/den" in lowest terms, denominator always written: "0/1", "-3/4".
pub fn fmt_rat(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts "p/q" or a bare integer "p".
pub fn parse_rat(s: &str) -> Result<Rat, CodingError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let a = BigInt::from_str(num).map_err(|_| CodingError::BadRational(s.to_string()))?;
    let b = BigInt::from_str(den).map_err(|_| CodingError::BadRational(s.to_string()))?;
    canon_rational(&a, &b)
}

// ---------------------------------------------------------------------------
// Bit strings

/// A finite binary string. Codes biject with the naturals by writing n+1 in
/// binary and dropping the leading 1: the empty string codes to 0, "1" to 2,
/// "0110" to 21.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut v = self.0.clone();
        v.push(bit);
        BitString(v)
    }

    pub fn prefix(&self, len: usize) -> Self {
        BitString(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = CodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => v.push(false),
                '1' => v.push(true),
                _ => return Err(CodingError::BadBitString(s.to_string())),
            }
        }
        Ok(BitString(v))
    }
}

pub fn string_code(s: &BitString) -> Nat {
    let mut acc = Nat::one();
    for &b in &s.0 {
        acc = &acc * 2u32 + if b { 1u32 } else { 0u32 };
    }
    acc - 1u32
}

pub fn string_decode(n: &Nat) -> BitString {
    let m = n + 1u32;
    let mut bits: Vec<bool> = Vec::new();
    let total = m.bits();
    // Skip the leading 1; remaining bits MSB-first.
    for i in (0..total.saturating_sub(1)).rev() {
        bits.push(m.bit(i));
    }
    BitString(bits)
}

// ---------------------------------------------------------------------------
// Stern-Brocot enumerations

fn mediant(lo: &(BigInt, BigInt), hi: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&lo.0 + &hi.0, &lo.1 + &hi.1)
}

fn frac(p: &(BigInt, BigInt)) -> Rat {
    Rat::new(p.0.clone(), p.1.clone())
}

/// m-th element of the enumeration of Q in [0,1]: 0, 1, then the mediant
/// subtree between them in breadth-first order (1/2; 1/3, 2/3; 1/4, 2/5, ...).
pub fn sb01_rational(m: &Nat) -> Rat {
    if m.is_zero() {
        return Rat::zero();
    }
    if m.is_one() {
        return Rat::one();
    }
    let j = m - 2u32;
    // Level d holds 2^d nodes; levels 0..d hold 2^d - 1 nodes before it.
    let depth = (&j + 1u32).bits() - 1;
    let offset = &j + 1u32 - (Nat::one() << depth);
    let mut lo = (BigInt::zero(), BigInt::one());
    let mut hi = (BigInt::one(), BigInt::one());
    let mut node = mediant(&lo, &hi);
    for i in (0..depth).rev() {
        if offset.bit(i) {
            lo = node;
        } else {
            hi = node;
        }
        node = mediant(&lo, &hi);
    }
    frac(&node)
}

/// Index of a rational in [0,1] under `sb01_rational`. Errors outside [0,1].
pub fn sb01_index(q: &Rat) -> Result<Nat, CodingError> {
    if q.is_negative() || q > &Rat::one() {
        return Err(CodingError::OutOfRange(format!(
            "{} is outside [0,1]",
            fmt_rat(q)
        )));
    }
    if q.is_zero() {
        return Ok(Nat::zero());
    }
    if q.is_one() {
        return Ok(Nat::one());
    }
    let mut lo = (BigInt::zero(), BigInt::one());
    let mut hi = (BigInt::one(), BigInt::one());
    let mut node = mediant(&lo, &hi);
    let mut bits: Vec<bool> = Vec::new();
    loop {
        let nv = frac(&node);
        if *q == nv {
            let depth = bits.len();
            let mut offset = Nat::zero();
            for &b in &bits {
                offset = &offset * 2u32 + if b { 1u32 } else { 0u32 };
            }
            return Ok(nat(2) + (Nat::one() << depth) - 1u32 + offset);
        }
        if *q < nv {
            bits.push(false);
            hi = node;
        } else {
            bits.push(true);
            lo = node;
        }
        node = mediant(&lo, &hi);
    }
}

/// k-th positive rational: breadth-first order of the full mediant tree
/// rooted at 1/1 (between 0/1 and the formal 1/0).
pub fn sb_positive(k: u64) -> Rat {
    let j = k + 1;
    let depth = 63 - j.leading_zeros() as u64;
    let offset = j - (1u64 << depth);
    let mut lo = (BigInt::zero(), BigInt::one());
    let mut hi = (BigInt::one(), BigInt::zero());
    let mut node = mediant(&lo, &hi);
    for i in (0..depth).rev() {
        if offset & (1 << i) != 0 {
            lo = node;
        } else {
            hi = node;
        }
        node = mediant(&lo, &hi);
    }
    frac(&node)
}

/// i-th rational in a fixed enumeration of all of Q: 0, then positives and
/// negatives interleaved from the full Stern-Brocot tree.
pub fn enum_rational(i: u64) -> Rat {
    if i == 0 {
        return Rat::zero();
    }
    let k = (i - 1) / 2;
    let q = sb_positive(k);
    if i % 2 == 1 {
        q
    } else {
        -q
    }
}
