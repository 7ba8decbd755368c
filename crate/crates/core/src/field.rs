//! Extension fields GF(2^s) and polynomials over them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poly::{is_irreducible, BinPoly, Degree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} outside the supported range 1..=16")]
    UnsupportedDegree(usize),
    #[error("modulus {0} is not irreducible")]
    ReducibleModulus(BinPoly),
    #[error("element {value} does not belong to GF(2^{degree})")]
    ForeignElement { value: u32, degree: usize },
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("cannot parse field description {0:?}")]
    Parse(String),
}

/// Conventional primitive moduli, indexed by extension degree.
const DEFAULT_MODULI: [u32; 17] = [
    0, 0b11, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

/// An element of GF(2^s), stored as its polynomial-basis coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// GF(2^s) with log/antilog tables built at construction.
#[derive(Clone)]
pub struct ExtField {
    degree: usize,
    modulus: BinPoly,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl ExtField {
    /// Field with the built-in modulus for degree `s`.
    pub fn new(s: usize) -> Result<Self, FieldError> {
        if !(1..=16).contains(&s) {
            return Err(FieldError::UnsupportedDegree(s));
        }
        Self::with_modulus(BinPoly::from_u64(DEFAULT_MODULI[s] as u64))
    }

    pub fn with_modulus(modulus: BinPoly) -> Result<Self, FieldError> {
        let s = match modulus.degree() {
            Degree::Finite(s) if (1..=16).contains(&s) => s,
            Degree::Finite(s) => return Err(FieldError::UnsupportedDegree(s)),
            Degree::MinusInfinity => return Err(FieldError::UnsupportedDegree(0)),
        };
        if !is_irreducible(&modulus).unwrap_or(false) {
            return Err(FieldError::ReducibleModulus(modulus));
        }
        let bits = modulus.to_u64().expect("degree <= 16") as u32;
        let size = 1usize << s;
        let order = size - 1;
        let mul_raw = |a: u32, b: u32| -> u32 {
            let mut acc = 0u32;
            let mut a = a;
            let mut b = b;
            while b != 0 {
                if b & 1 == 1 {
                    acc ^= a;
                }
                b >>= 1;
                a <<= 1;
                if a & (1 << s) != 0 {
                    a ^= bits;
                }
            }
            acc
        };
        // A non-primitive modulus still yields a cyclic multiplicative
        // group; find a generator for the tables.
        let generator = (2..size as u32)
            .chain(std::iter::once(1))
            .find(|&g| {
                let mut x = g;
                for k in 1..=order {
                    if x == 1 {
                        return k == order;
                    }
                    x = mul_raw(x, g);
                }
                false
            })
            .expect("GF(2^s)* is cyclic");
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![0u32; size];
        let mut x = 1u32;
        for k in 0..order {
            exp[k] = x;
            exp[k + order] = x;
            log[x as usize] = k as u32;
            x = mul_raw(x, generator);
        }
        Ok(ExtField {
            degree: s,
            modulus,
            exp,
            log,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &BinPoly {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        1 << self.degree
    }

    fn order(&self) -> usize {
        self.size() - 1
    }

    pub fn elem(&self, value: u32) -> Result<FieldElem, FieldError> {
        if (value as usize) < self.size() {
            Ok(FieldElem(value))
        } else {
            Err(FieldError::ForeignElement {
                value,
                degree: self.degree,
            })
        }
    }

    /// The class of `x`, written α.
    pub fn alpha(&self) -> FieldElem {
        if self.degree == 1 {
            // x ≡ 1 mod (x + 1).
            FieldElem(1)
        } else {
            FieldElem(2)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.size() as u32).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        let k = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElem(self.exp[k])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::InverseOfZero);
        }
        let k = (self.order() - self.log[a.0 as usize] as usize) % self.order();
        Ok(FieldElem(self.exp[k]))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let k = (self.log[a.0 as usize] as u64 * (e % self.order() as u64)) % self.order() as u64;
        FieldElem(self.exp[k as usize])
    }

    /// Coordinates of `a` as `s` bits, lowest first.
    pub fn bits(&self, a: FieldElem) -> Vec<bool> {
        (0..self.degree).map(|i| (a.0 >> i) & 1 == 1).collect()
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

impl Eq for ExtField {}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtField({self})")
    }
}

/// `GF(2^s)/<modulus bits>`.
impl fmt::Display for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})/{}", self.degree, self.modulus)
    }
}

impl FromStr for ExtField {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FieldError::Parse(s.to_string());
        let rest = s.trim().strip_prefix("GF(2^").ok_or_else(err)?;
        let (deg, modulus) = rest.split_once(")/").ok_or_else(err)?;
        let deg: usize = deg.parse().map_err(|_| err())?;
        let modulus: BinPoly = modulus.parse().map_err(|_| err())?;
        if modulus.degree() != Degree::Finite(deg) {
            return Err(err());
        }
        ExtField::with_modulus(modulus)
    }
}

/// Polynomial over GF(2^s), lowest degree first, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExtPoly {
    coeffs: Vec<FieldElem>,
}

impl ExtPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ExtPoly { coeffs }
    }

    pub fn one() -> Self {
        ExtPoly {
            coeffs: vec![FieldElem::ONE],
        }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::MinusInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn add(&self, other: &ExtPoly, field: &ExtField) -> ExtPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &ExtPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO);
        ExtPoly::new(
            (0..n)
                .map(|i| field.add(get(self, i), get(other, i)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &ExtPoly, field: &ExtField) -> ExtPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return ExtPoly::default();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        ExtPoly::new(out)
    }

    pub fn eval(&self, x: FieldElem, field: &ExtField) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    /// The same polynomial viewed over GF(2), if every coefficient is 0 or 1.
    pub fn to_binary(&self) -> Option<BinPoly> {
        let mut bits = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            match c.0 {
                0 => bits.push(false),
                1 => bits.push(true),
                _ => return None,
            }
        }
        Some(BinPoly::from_coeffs(&bits))
    }
}

/// Minimal polynomial over GF(2) of `beta`: the product of `x - beta^(2^k)`
/// over the conjugates of `beta`.
pub fn minimal_polynomial(beta: FieldElem, field: &ExtField) -> BinPoly {
    let mut conjugates = vec![beta];
    let mut c = field.mul(beta, beta);
    while c != beta {
        conjugates.push(c);
        c = field.mul(c, c);
    }
    let product = conjugates.iter().fold(ExtPoly::one(), |acc, &r| {
        acc.mul(&ExtPoly::new(vec![r, FieldElem::ONE]), field)
    });
    product
        .to_binary()
        .expect("minimal polynomial has binary coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::is_primitive;

    #[test]
    fn builtin_moduli_are_primitive() {
        for s in 2..=16 {
            let f = ExtField::new(s).unwrap();
            assert!(is_primitive(f.modulus()), "s = {s}");
        }
        assert!(ExtField::new(0).is_err());
        assert!(ExtField::new(17).is_err());
    }

    #[test]
    fn gf4_alpha_squared() {
        let f = ExtField::with_modulus("111".parse().unwrap()).unwrap();
        let a = f.alpha();
        assert_eq!(f.mul(a, a), FieldElem(0b11));
        assert_eq!(f.add(a, a), FieldElem::ZERO);
        assert_eq!(f.mul(a, FieldElem::ONE), a);
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = ExtField::new(4).unwrap();
        assert_eq!(f.inv(FieldElem::ZERO), Err(FieldError::InverseOfZero));
        for a in f.elements().skip(1) {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_degrees() {
        for s in 1..=4 {
            let f = ExtField::new(s).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn non_primitive_modulus_still_gives_field() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible with period 5.
        let f = ExtField::with_modulus("11111".parse().unwrap()).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(f.pow(a, 15), FieldElem::ONE);
            assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
        }
        assert!(ExtField::with_modulus("101".parse().unwrap()).is_err());
    }

    #[test]
    fn display_round_trip() {
        let f = ExtField::new(3).unwrap();
        assert_eq!(f.to_string(), "GF(2^3)/1101");
        assert_eq!("GF(2^3)/1101".parse::<ExtField>().unwrap(), f);
        assert!("GF(2^4)/1101".parse::<ExtField>().is_err());
    }

    #[test]
    fn minimal_polynomials_in_gf8() {
        let f = ExtField::new(3).unwrap();
        let a = f.alpha();
        assert_eq!(minimal_polynomial(a, &f).to_string(), "1101");
        assert_eq!(minimal_polynomial(f.pow(a, 3), &f).to_string(), "1011");
        assert_eq!(minimal_polynomial(FieldElem::ONE, &f).to_string(), "11");
    }
}
