//! Packed bit vectors and the small amount of GF(2) linear algebra the codec needs.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    /// Bits as a hex string, first bit as the most significant bit of the
    /// first digit. Trailing padding bits are zero.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u8;
            for k in 0..4 {
                let i = chunk * 4 + k;
                if i < self.len && self.get(i) {
                    nibble |= 8 >> k;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).expect("nibble"));
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Option<Self> {
        if hex.len() != len.div_ceil(4) {
            return None;
        }
        let mut v = BitVec::zeros(len);
        for (chunk, c) in hex.chars().enumerate() {
            let nibble = c.to_digit(16)?;
            for k in 0..4 {
                if nibble & (8 >> k) != 0 {
                    let i = chunk * 4 + k;
                    if i >= len {
                        return None;
                    }
                    v.set(i, true);
                }
            }
        }
        Some(v)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

/// Inverse of a square GF(2) matrix given by rows, or `None` if singular.
pub fn invert(rows: &[BitVec]) -> Option<Vec<BitVec>> {
    let n = rows.len();
    let mut a: Vec<BitVec> = rows.to_vec();
    let mut inv: Vec<BitVec> = (0..n)
        .map(|i| {
            let mut v = BitVec::zeros(n);
            v.set(i, true);
            v
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r].get(col))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r].get(col) {
                let (pa, pi) = (a[col].clone(), inv[col].clone());
                a[r].xor_assign(&pa);
                inv[r].xor_assign(&pi);
            }
        }
    }
    Some(inv)
}

/// Rank of a set of GF(2) vectors.
pub fn rank(vectors: &[BitVec]) -> usize {
    let mut basis = EchelonBasis::default();
    vectors.iter().filter(|v| basis.insert(v)).count()
}

/// Incrementally built echelon basis, used to test whether a vector extends
/// the span of those already accepted.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, BitVec)>,
}

impl EchelonBasis {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let v = self.reduce(v);
        match v.first_one() {
            None => false,
            Some(pivot) => {
                for (_, row) in self.rows.iter_mut() {
                    if row.get(pivot) {
                        row.xor_assign(&v);
                    }
                }
                self.rows.push((pivot, v));
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let v = BitVec::from_bools(&[true, false, false, true, true]);
        assert_eq!(v.to_hex(), "98");
        assert_eq!(BitVec::from_hex("98", 5), Some(v));
        assert_eq!(BitVec::from_hex("9c", 5), None);
    }

    #[test]
    fn ones_iterates_set_bits() {
        let mut v = BitVec::zeros(130);
        for i in [0, 63, 64, 129] {
            v.set(i, true);
        }
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.count_ones(), 4);
    }

    #[test]
    fn inverse_of_small_matrix() {
        let rows = vec![
            BitVec::from_bools(&[true, true, false]),
            BitVec::from_bools(&[false, true, true]),
            BitVec::from_bools(&[false, false, true]),
        ];
        let inv = invert(&rows).unwrap();
        for (i, row) in rows.iter().enumerate() {
            for j in 0..3 {
                let col: Vec<bool> = inv.iter().map(|r| r.get(j)).collect();
                assert_eq!(row.dot(&BitVec::from_bools(&col)), i == j);
            }
        }
        let singular = vec![rows[0].clone(), rows[0].clone(), rows[2].clone()];
        assert!(invert(&singular).is_none());
        assert_eq!(rank(&singular), 2);
    }
}
