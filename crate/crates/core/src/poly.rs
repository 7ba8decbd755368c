//! Polynomials over GF(2).
//!
//! Coefficients are packed 64 per word, lowest degree first. The packing is
//! always normalized: no trailing zero words, so the zero polynomial has an
//! empty word vector.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("operation requires a polynomial of degree at least 1")]
    ConstantPolynomial,
    #[error("polynomial is divisible by x")]
    DivisibleByX,
    #[error("polynomial is not square-free")]
    NotSquareFree,
    #[error("invalid coefficient string {0:?}")]
    Parse(String),
}

/// Degree of a polynomial. The zero polynomial has degree `MinusInfinity`,
/// which compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinPoly {
    words: Vec<u64>,
}

impl BinPoly {
    pub fn zero() -> Self {
        BinPoly { words: Vec::new() }
    }

    pub fn one() -> Self {
        BinPoly { words: vec![1] }
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut words = vec![0u64; k / 64 + 1];
        words[k / 64] = 1 << (k % 64);
        BinPoly { words }
    }

    /// Builds a polynomial from the low bits of `bits` (bit `i` is the
    /// coefficient of `x^i`).
    pub fn from_u64(bits: u64) -> Self {
        Self::from_words(vec![bits])
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        BinPoly { words }
    }

    pub fn from_coeffs(coeffs: &[bool]) -> Self {
        let mut words = vec![0u64; coeffs.len().div_ceil(64)];
        for (i, &c) in coeffs.iter().enumerate() {
            if c {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_words(words)
    }

    /// `1 + x + ... + x^(b-1)`.
    pub fn all_ones(b: usize) -> Self {
        let mut p = BinPoly::zero();
        for i in 0..b {
            p.set_coeff(i, true);
        }
        p
    }

    /// Low 64 coefficients, or `None` if the degree is 64 or more.
    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn degree(&self) -> Degree {
        match self.words.last() {
            None => Degree::MinusInfinity,
            Some(&w) => {
                Degree::Finite((self.words.len() - 1) * 64 + 63 - w.leading_zeros() as usize)
            }
        }
    }

    /// Degree as an integer; callers must have ruled out the zero polynomial.
    fn deg(&self) -> usize {
        self.degree().finite().expect("degree of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, value: bool) {
        if value {
            if self.words.len() <= i / 64 {
                self.words.resize(i / 64 + 1, 0);
            }
            self.words[i / 64] |= 1 << (i % 64);
        } else if i / 64 < self.words.len() {
            self.words[i / 64] &= !(1 << (i % 64));
            self.normalize();
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Constant term `f(0)`.
    pub fn constant_term(&self) -> bool {
        self.coeff(0)
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn add(&self, other: &BinPoly) -> BinPoly {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        BinPoly::from_words(words)
    }

    fn xor_shifted(&mut self, other: &BinPoly, shift: usize) {
        let ws = shift / 64;
        let bs = shift % 64;
        let need = other.words.len() + ws + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + ws] ^= w << bs;
            if bs != 0 {
                self.words[i + ws + 1] ^= w >> (64 - bs);
            }
        }
    }

    pub fn shl(&self, k: usize) -> BinPoly {
        let mut out = BinPoly::zero();
        out.xor_shifted(self, k);
        out.normalize();
        out
    }

    pub fn mul(&self, other: &BinPoly) -> BinPoly {
        let mut out = BinPoly::zero();
        let Some(d) = other.degree().finite() else {
            return out;
        };
        for i in 0..=d {
            if other.coeff(i) {
                out.xor_shifted(self, i);
            }
        }
        out.normalize();
        out
    }

    /// Quotient and remainder. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &BinPoly) -> (BinPoly, BinPoly) {
        let dd = divisor.deg();
        let mut rem = self.clone();
        let mut quot = BinPoly::zero();
        while let Degree::Finite(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            rem.xor_shifted(divisor, shift);
            rem.normalize();
            quot.set_coeff(shift, true);
        }
        (quot, rem)
    }

    pub fn rem(&self, divisor: &BinPoly) -> BinPoly {
        if let (Some(a), Some(m)) = (self.to_u64(), divisor.to_u64()) {
            return BinPoly::from_u64(rem_u64(a, m));
        }
        self.div_rem(divisor).1
    }

    pub fn divides(&self, other: &BinPoly) -> bool {
        other.rem(self).is_zero()
    }

    pub fn mul_mod(&self, other: &BinPoly, modulus: &BinPoly) -> BinPoly {
        self.mul(other).rem(modulus)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut e: u128, modulus: &BinPoly) -> BinPoly {
        let mut base = self.rem(modulus);
        let mut acc = BinPoly::one().rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            base = base.mul_mod(&base, modulus);
            e >>= 1;
        }
        acc
    }

    /// Formal derivative; over GF(2) only odd-degree terms survive.
    pub fn derivative(&self) -> BinPoly {
        let mut out = BinPoly::zero();
        if let Degree::Finite(d) = self.degree() {
            for i in (1..=d).step_by(2) {
                if self.coeff(i) {
                    out.set_coeff(i - 1, true);
                }
            }
        }
        out
    }

    /// Integer value of the coefficient bits with `x^i` at bit `i`; only
    /// meaningful for degree < 128. Used for tie-breaking orders.
    pub fn as_u128(&self) -> Option<u128> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0] as u128),
            2 => Some(self.words[0] as u128 | (self.words[1] as u128) << 64),
            _ => None,
        }
    }

    /// Value at `x = 1`, i.e. the parity of the weight.
    pub fn eval_one(&self) -> bool {
        self.weight() % 2 == 1
    }
}

fn rem_u64(mut a: u64, m: u64) -> u64 {
    let dm = 63 - m.leading_zeros();
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// Integer order on coefficient bits: lower degree first, then by the
/// highest differing coefficient.
impl Ord for BinPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BinPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// ASCII coefficient string, lowest degree first: `"1101"` is `1 + x + x^3`.
/// The zero polynomial is written `"0"`.
impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree() {
            Degree::MinusInfinity => f.write_str("0"),
            Degree::Finite(d) => {
                for i in 0..=d {
                    f.write_str(if self.coeff(i) { "1" } else { "0" })?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly({self})")
    }
}

impl FromStr for BinPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PolyError::Parse(s.to_string()));
        }
        let mut coeffs = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => coeffs.push(false),
                '1' => coeffs.push(true),
                _ => return Err(PolyError::Parse(s.to_string())),
            }
        }
        Ok(BinPoly::from_coeffs(&coeffs))
    }
}

/// Monic greatest common divisor; `gcd(a, 0) = a`.
pub fn poly_gcd(a: &BinPoly, b: &BinPoly) -> BinPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    // Every nonzero polynomial over GF(2) is already monic.
    a
}

pub fn is_square_free(f: &BinPoly) -> Result<bool, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let g = poly_gcd(f, &f.derivative());
    Ok(g.degree() == Degree::Finite(0))
}

/// Trial division by every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(f: &BinPoly) -> Result<bool, PolyError> {
    let d = match f.degree() {
        Degree::MinusInfinity => return Err(PolyError::ZeroPolynomial),
        Degree::Finite(0) => return Err(PolyError::ConstantPolynomial),
        Degree::Finite(d) => d,
    };
    if d == 1 {
        return Ok(true);
    }
    for dd in 1..=d / 2 {
        assert!(
            dd < 63,
            "trial division limited to divisors below degree 63"
        );
        for low in 0u64..(1 << dd) {
            let candidate = BinPoly::from_u64((1 << dd) | low);
            if candidate.divides(f) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Least `h >= 1` with `f | x^h - 1`.
pub fn period(f: &BinPoly) -> Result<u128, PolyError> {
    let d = match f.degree() {
        Degree::MinusInfinity => return Err(PolyError::ZeroPolynomial),
        Degree::Finite(d) => d,
    };
    if !f.constant_term() {
        return Err(PolyError::DivisibleByX);
    }
    if d == 0 {
        return Ok(1);
    }
    let x = BinPoly::monomial(1);
    if d <= 40 && is_irreducible(f)? {
        // The order of x divides 2^d - 1; take the least divisor that works.
        let n = (1u128 << d) - 1;
        let mut best = n;
        for q in prime_factors(n) {
            while best.is_multiple_of(q) && x.pow_mod(best / q, f).is_one() {
                best /= q;
            }
        }
        return Ok(best);
    }
    let mut cur = x.rem(f);
    let mut h: u128 = 1;
    while !cur.is_one() {
        cur = cur.shl(1).rem(f);
        h += 1;
    }
    Ok(h)
}

/// Irreducible of degree `m` with period `2^m - 1`.
pub fn is_primitive(f: &BinPoly) -> bool {
    match f.degree() {
        Degree::Finite(m) if (1..=40).contains(&m) && f.constant_term() => {
            matches!(is_irreducible(f), Ok(true)) && period(f) == Ok((1u128 << m) - 1)
        }
        _ => false,
    }
}

/// Least common multiple of the degrees of the irreducible factors of a
/// square-free `f` with `f(0) != 0`.
///
/// Uses distinct-degree factorization: the factors of degree `k` divide
/// `x^(2^k) - x`.
pub fn splitting_field_degree(f: &BinPoly) -> Result<usize, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if !f.constant_term() {
        return Err(PolyError::DivisibleByX);
    }
    if !is_square_free(f)? {
        return Err(PolyError::NotSquareFree);
    }
    let mut rest = f.clone();
    let x = BinPoly::monomial(1);
    let mut xp = x.clone();
    let mut lcm = 1usize;
    let mut k = 0;
    while rest.degree() > Degree::Finite(0) {
        k += 1;
        xp = xp.mul_mod(&xp, f);
        let g = poly_gcd(&rest, &xp.add(&x));
        if g.degree() > Degree::Finite(0) {
            lcm = lcm_usize(lcm, k);
            rest = rest.div_rem(&g).0;
        }
    }
    Ok(lcm)
}

/// `deg(e) = b - 1`, `e(0) != 0` and `e` square-free. Over GF(2) the
/// remaining coprimality conditions against `q - 1 = 1` are vacuous.
pub fn is_b_polynomial(e: &BinPoly, b: usize) -> bool {
    b >= 1
        && e.degree() == Degree::Finite(b - 1)
        && e.constant_term()
        && is_square_free(e).unwrap_or(false)
}

/// All b-polynomials of degree `b - 1` in increasing integer order.
pub fn b_polynomials(b: usize) -> impl Iterator<Item = BinPoly> {
    assert!(
        (1..64).contains(&b),
        "b-polynomial enumeration limited to b < 64"
    );
    let top = 1u64 << (b - 1);
    (0..top.max(1))
        .map(move |low| BinPoly::from_u64(top | low))
        .filter(move |e| is_b_polynomial(e, b))
}

/// Primitive polynomials of degree `m` in increasing integer order.
pub fn primitive_polynomials(m: usize) -> impl Iterator<Item = BinPoly> {
    assert!(
        (1..64).contains(&m),
        "primitive enumeration limited to m < 64"
    );
    let top = 1u64 << m;
    (0..top)
        .filter(|low| low & 1 == 1)
        .map(move |low| BinPoly::from_u64(top | low))
        .filter(is_primitive)
}

pub(crate) fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn lcm_usize(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BinPoly {
        s.parse().unwrap()
    }

    /// Independent factorization by trial division, returning the
    /// multiset of irreducible factors.
    fn factor(f: &BinPoly) -> Vec<BinPoly> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let mut d = 1;
        while rest.degree() > Degree::Finite(0) {
            let mut found = false;
            for low in 0u64..(1 << d) {
                let c = BinPoly::from_u64((1 << d) | low);
                if c.divides(&rest) {
                    rest = rest.div_rem(&c).0;
                    out.push(c);
                    found = true;
                    break;
                }
            }
            if !found {
                d += 1;
            }
        }
        out
    }

    #[test]
    fn string_form_is_lowest_degree_first() {
        let f = p("1101");
        assert_eq!(f.degree(), Degree::Finite(3));
        assert!(f.coeff(0) && f.coeff(1) && !f.coeff(2) && f.coeff(3));
        assert_eq!(f.to_string(), "1101");
        assert_eq!(BinPoly::zero().to_string(), "0");
        assert_eq!(p("0110").to_string(), "011");
        assert!("12".parse::<BinPoly>().is_err());
    }

    #[test]
    fn zero_degree_is_below_every_integer() {
        assert!(BinPoly::zero().degree() < Degree::Finite(0));
        assert_eq!(BinPoly::one().degree(), Degree::Finite(0));
    }

    #[test]
    fn gcd_examples() {
        let f = p("1101");
        assert_eq!(poly_gcd(&f, &BinPoly::zero()), f);
        assert_eq!(poly_gcd(&p("101"), &p("11")), p("11"));
        assert_eq!(poly_gcd(&p("1101"), &p("111")), BinPoly::one());
    }

    #[test]
    fn square_free_examples() {
        assert!(is_square_free(&p("111")).unwrap());
        assert!(!is_square_free(&p("101")).unwrap());
        assert!(!is_square_free(&p("0001")).unwrap());
        assert_eq!(
            is_square_free(&BinPoly::zero()),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn irreducible_examples() {
        assert!(is_irreducible(&p("1101")).unwrap());
        assert!(!is_irreducible(&p("101")).unwrap());
        assert!(is_irreducible(&p("01")).unwrap());
        assert_eq!(
            is_irreducible(&BinPoly::one()),
            Err(PolyError::ConstantPolynomial)
        );
    }

    #[test]
    fn period_examples() {
        assert_eq!(period(&p("11")).unwrap(), 1);
        assert_eq!(period(&p("1101")).unwrap(), 7);
        assert_eq!(period(&p("111")).unwrap(), 3);
        assert_eq!(period(&p("011")), Err(PolyError::DivisibleByX));
    }

    #[test]
    fn splitting_degree_examples() {
        assert_eq!(splitting_field_degree(&p("11")).unwrap(), 1);
        assert_eq!(splitting_field_degree(&p("111")).unwrap(), 2);
        let f = p("11").mul(&p("1101"));
        assert_eq!(splitting_field_degree(&f).unwrap(), 3);
        assert_eq!(
            splitting_field_degree(&p("101")),
            Err(PolyError::NotSquareFree)
        );
    }

    #[test]
    fn b_polynomial_examples() {
        assert!(is_b_polynomial(&p("111"), 3));
        assert!(!is_b_polynomial(&p("1111"), 4));
        assert!(!is_b_polynomial(&p("001"), 3));
        assert!(is_b_polynomial(&BinPoly::one(), 1));
        assert!(is_b_polynomial(&p("11"), 2));
    }

    #[test]
    fn all_ones_is_b_polynomial_exactly_for_odd_b() {
        // b = 2 is the one even exception: x^2 - 1 = (x + 1)^2, so e = 1 + x.
        for b in 1..=15 {
            assert_eq!(
                is_b_polynomial(&BinPoly::all_ones(b), b),
                b % 2 == 1 || b == 2,
                "b = {b}"
            );
        }
    }

    #[test]
    fn period_is_least_exponent_for_all_small_polynomials() {
        // Exhaustive over f(0) != 0, deg f <= 10.
        for bits in 1u64..(1 << 11) {
            if bits & 1 == 0 {
                continue;
            }
            let f = BinPoly::from_u64(bits);
            let h = period(&f).unwrap() as usize;
            let xh1 = BinPoly::monomial(h).add(&BinPoly::one());
            assert!(f.divides(&xh1), "{f} does not divide x^{h}-1");
            for k in 1..h {
                let xk1 = BinPoly::monomial(k).add(&BinPoly::one());
                assert!(!f.divides(&xk1), "{f} divides x^{k}-1 below its period {h}");
            }
        }
    }

    #[test]
    fn square_free_agrees_with_factorization() {
        for bits in 1u64..(1 << 9) {
            let f = BinPoly::from_u64(bits);
            let mut factors = factor(&f);
            factors.sort();
            let repeated = factors.windows(2).any(|w| w[0] == w[1]);
            assert_eq!(is_square_free(&f).unwrap(), !repeated, "{f}");
        }
    }

    #[test]
    fn irreducible_agrees_with_factorization() {
        for bits in 2u64..(1 << 9) {
            let f = BinPoly::from_u64(bits);
            if f.degree() == Degree::Finite(0) {
                continue;
            }
            assert_eq!(is_irreducible(&f).unwrap(), factor(&f).len() == 1, "{f}");
        }
    }

    #[test]
    fn primitive_counts_match_totient() {
        // phi(2^m - 1) / m primitive polynomials of degree m.
        for (m, count) in [(2, 1), (3, 2), (4, 2), (5, 6), (6, 6), (7, 18), (8, 16)] {
            assert_eq!(primitive_polynomials(m).count(), count, "m = {m}");
        }
        assert_eq!(primitive_polynomials(3).next().unwrap(), p("1101"));
    }

    #[test]
    fn division_identity() {
        for a in 0u64..200 {
            for b in 1u64..40 {
                let (pa, pb) = (BinPoly::from_u64(a), BinPoly::from_u64(b));
                let (q, r) = pa.div_rem(&pb);
                assert!(r.degree() < pb.degree());
                assert_eq!(q.mul(&pb).add(&r), pa);
                assert_eq!(pa.rem(&pb), r);
            }
        }
    }

    #[test]
    fn wide_polynomials_cross_word_boundaries() {
        let a = BinPoly::monomial(70).add(&BinPoly::one());
        let b = BinPoly::monomial(65).add(&BinPoly::monomial(3));
        let prod = a.mul(&b);
        assert_eq!(prod.degree(), Degree::Finite(135));
        let (q, r) = prod.div_rem(&b);
        assert_eq!(q, a);
        assert!(r.is_zero());
    }
}
