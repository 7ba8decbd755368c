//! One-dimensional component codes: burst correctors, burst locators,
//! t-error-correcting codes and the limited-weight concatenation.
//!
//! Every code is certified by exhaustive enumeration when it is built.
//! Columns are stored as `u128`, so a component has at most 127 check bits.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::field::{minimal_polynomial, ExtField};
use crate::poly::{b_polynomials, is_b_polynomial, is_primitive, BinPoly, Degree};

pub const MAX_CHECK_BITS: usize = 127;

/// Upper limit on enumerated cases for a single certification.
pub const CERTIFICATION_BUDGET: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentError {
    #[error("b = {b}: the canonical e(x) = 1 + x + ... + x^(b-1) is not square-free for even b; supply another b-polynomial")]
    EvenBurstLength { b: usize },
    #[error("{0} is not a b-polynomial for b = {1}")]
    NotBPolynomial(BinPoly, usize),
    #[error("no certified code for b = {b} with m in {m_min}..={m_max}")]
    NotFoundInRange {
        b: usize,
        m_min: usize,
        m_max: usize,
    },
    #[error(
        "certification would enumerate {cases} cases, above the budget of {CERTIFICATION_BUDGET}"
    )]
    BudgetExceeded { cases: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("syndrome matches no correctable error")]
    Undecodable,
    #[error("no admissible start matches the syndrome")]
    NoMatch,
    #[error("several admissible starts match the syndrome")]
    Ambiguous,
}

/// Parity-check matrix stored by columns; bit `i` of a column is row `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityCheck {
    rows: usize,
    cols: Vec<u128>,
}

impl ParityCheck {
    pub fn new(rows: usize, cols: Vec<u128>) -> Result<Self, ComponentError> {
        if rows > MAX_CHECK_BITS {
            return Err(ComponentError::InvalidParameters(format!(
                "{rows} rows exceed {MAX_CHECK_BITS}"
            )));
        }
        let mask = row_mask(rows);
        if cols.iter().any(|&c| c & !mask != 0) {
            return Err(ComponentError::InvalidParameters(
                "column has bits beyond the row count".into(),
            ));
        }
        Ok(ParityCheck { rows, cols })
    }

    pub fn identity(n: usize) -> Self {
        ParityCheck {
            rows: n,
            cols: (0..n).map(|j| 1u128 << j).collect(),
        }
    }

    /// Columns `x^j mod g` for `j < length`: the shortened cyclic code generated by `g`.
    pub fn cyclic(g: &BinPoly, length: usize) -> Result<Self, ComponentError> {
        let r = match g.degree() {
            Degree::Finite(r) if r <= MAX_CHECK_BITS => r,
            _ => {
                return Err(ComponentError::InvalidParameters(format!(
                    "generator {g} has unsupported degree"
                )))
            }
        };
        let gbits = g.as_u128().expect("degree checked");
        let mut cols = Vec::with_capacity(length);
        let mut c: u128 = if r == 0 { 0 } else { 1 };
        for _ in 0..length {
            cols.push(c);
            if r > 0 {
                c <<= 1;
                if (c >> r) & 1 == 1 {
                    c ^= gbits;
                }
            }
        }
        Ok(ParityCheck { rows: r, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn column(&self, j: usize) -> u128 {
        self.cols[j]
    }

    pub fn columns(&self) -> &[u128] {
        &self.cols
    }

    pub fn bit(&self, i: usize, j: usize) -> bool {
        (self.cols[j] >> i) & 1 == 1
    }

    pub fn syndrome<I: IntoIterator<Item = usize>>(&self, positions: I) -> u128 {
        positions.into_iter().fold(0, |acc, j| acc ^ self.cols[j])
    }

    pub fn rank(&self) -> usize {
        let mut basis: Vec<u128> = Vec::new();
        for &c in &self.cols {
            let mut v = c;
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len()
    }

    /// Equivalent matrix whose rows are a basis of the original row space.
    pub fn row_reduced(&self) -> ParityCheck {
        let n = self.cols.len();
        let rows: Vec<Vec<bool>> = (0..self.rows)
            .map(|i| (0..n).map(|j| self.bit(i, j)).collect())
            .collect();
        let mut basis: Vec<Vec<bool>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for mut row in rows {
            for (b, &p) in basis.iter().zip(&pivots) {
                if row[p] {
                    for (x, y) in row.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
            }
            if let Some(p) = row.iter().position(|&x| x) {
                basis.push(row);
                pivots.push(p);
            }
        }
        let cols = (0..n)
            .map(|j| {
                basis
                    .iter()
                    .enumerate()
                    .fold(0u128, |acc, (i, row)| acc | ((row[j] as u128) << i))
            })
            .collect();
        ParityCheck {
            rows: basis.len(),
            cols,
        }
    }
}

fn row_mask(rows: usize) -> u128 {
    if rows >= 128 {
        u128::MAX
    } else {
        (1u128 << rows) - 1
    }
}

/// A burst: `pattern` bit `i` marks position `start + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Burst {
    pub start: usize,
    pub pattern: u64,
}

impl Burst {
    pub fn offsets(&self) -> impl Iterator<Item = usize> {
        let p = self.pattern;
        (0..64).filter(move |i| (p >> i) & 1 == 1)
    }

    pub fn weight(&self) -> usize {
        self.pattern.count_ones() as usize
    }

    /// Positions in a code of length `n`, wrapping cyclically if `cyclic`.
    pub fn positions(&self, n: usize, cyclic: bool) -> Vec<usize> {
        self.offsets()
            .map(|i| {
                if cyclic {
                    (self.start + i) % n
                } else {
                    self.start + i
                }
            })
            .collect()
    }
}

/// Number of enumerated cases and an order-independent digest of their syndromes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Certificate {
    pub cases: u64,
    pub digest: u64,
}

impl Certificate {
    fn record(&mut self, syndrome: u128) {
        self.cases += 1;
        self.digest = self.digest.wrapping_add(fnv1a(&syndrome.to_le_bytes()));
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:016x}", self.cases, self.digest)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Optimum cyclic burst-correcting code generated by `g = e * p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCodeSpec {
    pub n: usize,
    pub g: BinPoly,
    pub e: BinPoly,
    pub p: BinPoly,
    pub b: usize,
    pub r: usize,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Corrector {
        b: usize,
    },
    CorrectorWeightLimited {
        b: usize,
        t: usize,
    },
    /// Locates bursts known up to rotation within windows of `window`
    /// consecutive positions; `max_weight` limits the certified patterns.
    Locator {
        window: usize,
        max_weight: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// Columns `x^j mod e*p`; `e` is one for locators.
    Cyclic { e: BinPoly, p: BinPoly },
    /// Column `j` is `[h1 column (j mod window); locator column j]`.
    Concatenated {
        window: usize,
        h1: ParityCheck,
        h1_t: usize,
        p: BinPoly,
    },
}

#[derive(Debug, Clone)]
pub struct ComponentCode {
    h: ParityCheck,
    role: Role,
    origin: Origin,
    cyclic: bool,
    certificate: Certificate,
    table: Option<FxHashMap<u128, Burst>>,
    fold_table: Option<FxHashMap<u128, u64>>,
}

impl PartialEq for ComponentCode {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h
            && self.role == other.role
            && self.origin == other.origin
            && self.cyclic == other.cyclic
            && self.certificate == other.certificate
    }
}

impl ComponentCode {
    pub fn parity_check(&self) -> &ParityCheck {
        &self.h
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn redundancy(&self) -> usize {
        self.h.rows()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn column(&self, j: usize) -> u128 {
        self.h.column(j)
    }

    pub fn syndrome<I: IntoIterator<Item = usize>>(&self, positions: I) -> u128 {
        self.h.syndrome(positions)
    }

    /// Generator polynomial for cyclic-origin codes.
    pub fn generator(&self) -> Option<BinPoly> {
        match &self.origin {
            Origin::Cyclic { e, p } => Some(e.mul(p)),
            Origin::Concatenated { .. } => None,
        }
    }

    /// Exhaustive syndrome table of a corrector, keyed by syndrome.
    pub fn syndrome_table(&self) -> Option<&FxHashMap<u128, Burst>> {
        self.table.as_ref()
    }
}

// ---------------------------------------------------------------------------
// Correctors

fn check_budget(cases: u64) -> Result<(), ComponentError> {
    if cases > CERTIFICATION_BUDGET {
        Err(ComponentError::BudgetExceeded { cases })
    } else {
        Ok(())
    }
}

/// Bursts of length at most `b` whose first bit is set; positions wrap
/// modulo `n` when `cyclic`, otherwise they must stay below `n`.
fn for_each_burst(
    n: usize,
    b: usize,
    max_weight: Option<usize>,
    cyclic: bool,
    mut f: impl FnMut(Burst) -> bool,
) -> bool {
    let b = b.min(n.max(1));
    for start in 0..n {
        let span = if cyclic { b } else { b.min(n - start) };
        for rest in 0..(1u64 << (span - 1)) {
            let pattern = 1 | (rest << 1);
            if max_weight.is_some_and(|t| pattern.count_ones() as usize > t) {
                continue;
            }
            if !f(Burst { start, pattern }) {
                return false;
            }
        }
    }
    true
}

/// Builds the exhaustive burst table, or `None` if two bursts share a
/// syndrome or one has syndrome zero.
fn burst_table(
    h: &ParityCheck,
    b: usize,
    max_weight: Option<usize>,
    cyclic: bool,
) -> Option<(FxHashMap<u128, Burst>, Certificate)> {
    let n = h.len();
    let mut table = FxHashMap::default();
    let mut cert = Certificate::default();
    let ok = for_each_burst(n, b, max_weight, cyclic, |burst| {
        let s = h.syndrome(burst.positions(n, cyclic));
        cert.record(s);
        s != 0 && table.insert(s, burst).is_none()
    });
    ok.then_some((table, cert))
}

fn burst_cases(n: usize, b: usize) -> u64 {
    (n as u64).saturating_mul(
        1u64.checked_shl(b.saturating_sub(1) as u32)
            .unwrap_or(u64::MAX),
    )
}

fn corrector_from(
    e: &BinPoly,
    p: &BinPoly,
    b: usize,
    length: usize,
    cyclic: bool,
) -> Option<ComponentCode> {
    let g = e.mul(p);
    let h = ParityCheck::cyclic(&g, length).ok()?;
    let (table, certificate) = burst_table(&h, b, None, cyclic)?;
    Some(ComponentCode {
        h,
        role: Role::Corrector { b },
        origin: Origin::Cyclic {
            e: e.clone(),
            p: p.clone(),
        },
        cyclic,
        certificate,
        table: Some(table),
        fold_table: None,
    })
}

fn canonical_e(b: usize) -> Result<BinPoly, ComponentError> {
    let e = BinPoly::all_ones(b);
    if is_b_polynomial(&e, b) {
        Ok(e)
    } else {
        Err(ComponentError::EvenBurstLength { b })
    }
}

/// Visits odd polynomials of degree `m` in integer order, in parallel
/// chunks, returning the first for which `f` succeeds.
fn first_primitive<T: Send>(m: usize, f: impl Fn(&BinPoly) -> Option<T> + Sync) -> Option<T> {
    if m == 0 || m > 62 {
        return None;
    }
    let top = 1u64 << m;
    let count = 1u64 << (m - 1);
    const CHUNK: u64 = 512;
    let mut lo = 0;
    while lo < count {
        let hi = (lo + CHUNK).min(count);
        let found = (lo..hi).into_par_iter().find_map_first(|k| {
            let p = BinPoly::from_u64(top | (2 * k + 1));
            if is_primitive(&p) {
                f(&p)
            } else {
                None
            }
        });
        if found.is_some() {
            return found;
        }
        lo = hi;
    }
    None
}

/// Searches for a full-length optimum cyclic b-burst-correcting code with
/// generator `e * p`, `p` primitive of degree `m`. Smallest `m` first, then
/// `p` in integer order.
pub fn search_optimum_burst_code(
    b: usize,
    m_range: RangeInclusive<usize>,
    e: Option<&BinPoly>,
) -> Result<CyclicCodeSpec, ComponentError> {
    if b == 0 || b > 63 {
        return Err(ComponentError::InvalidParameters(format!(
            "burst length {b} outside 1..=63"
        )));
    }
    let e = match e {
        Some(e) if is_b_polynomial(e, b) => e.clone(),
        Some(e) => return Err(ComponentError::NotBPolynomial(e.clone(), b)),
        None => canonical_e(b)?,
    };
    for m in m_range.clone() {
        if m == 0 || b - 1 + m > MAX_CHECK_BITS || m > 30 {
            continue;
        }
        let n = (1usize << m) - 1;
        check_budget(burst_cases(n, b))?;
        if let Some(code) = first_primitive(m, |p| corrector_from(&e, p, b, n, true)) {
            let Origin::Cyclic { e, p } = code.origin.clone() else {
                unreachable!()
            };
            return Ok(CyclicCodeSpec {
                n,
                g: e.mul(&p),
                e,
                p,
                b,
                r: b - 1 + m,
                certificate: code.certificate,
            });
        }
    }
    Err(ComponentError::NotFoundInRange {
        b,
        m_min: *m_range.start(),
        m_max: *m_range.end(),
    })
}

/// The certified cyclic corrector described by `spec`.
pub fn corrector_from_spec(spec: &CyclicCodeSpec) -> Result<ComponentCode, ComponentError> {
    corrector_from(&spec.e, &spec.p, spec.b, spec.n, true).ok_or_else(|| {
        ComponentError::CertificationFailed(format!(
            "g = {} does not correct {}-bursts",
            spec.g, spec.b
        ))
    })
}

/// Shortened b-burst corrector of the given length with generator `e * p`.
///
/// Even `b` uses the b-polynomials of degree `b - 1` in integer order in
/// place of the canonical one.
pub fn search_corrector(
    b: usize,
    length: usize,
    m_range: RangeInclusive<usize>,
) -> Result<ComponentCode, ComponentError> {
    if b == 0 || b > 63 || length == 0 {
        return Err(ComponentError::InvalidParameters(format!(
            "burst length {b}, code length {length}"
        )));
    }
    check_budget(burst_cases(length, b))?;
    let es: Vec<BinPoly> = match canonical_e(b) {
        Ok(e) => vec![e],
        Err(_) => b_polynomials(b).collect(),
    };
    // Reiger: r = b - 1 + m >= 2b whenever two disjoint b-windows fit.
    let reiger = if length >= 2 * b { b + 1 } else { 1 };
    for m in m_range.clone() {
        if m < reiger || m > 62 || b - 1 + m > MAX_CHECK_BITS {
            continue;
        }
        for e in &es {
            if let Some(code) = first_primitive(m, |p| corrector_from(e, p, b, length, false)) {
                return Ok(code);
            }
        }
    }
    Err(ComponentError::NotFoundInRange {
        b,
        m_min: *m_range.start(),
        m_max: *m_range.end(),
    })
}

/// Looks up the burst with syndrome `s` in a corrector's table.
pub fn burst_decode(code: &ComponentCode, s: u128) -> Result<Option<Burst>, ComponentError> {
    if s == 0 {
        return Ok(None);
    }
    match (&code.role, &code.table) {
        (Role::Corrector { .. }, Some(table)) => table
            .get(&s)
            .copied()
            .map(Some)
            .ok_or(ComponentError::Undecodable),
        (Role::CorrectorWeightLimited { .. }, _) => limited_weight_decode(code, s),
        _ => Err(ComponentError::InvalidParameters(
            "burst_decode needs a corrector".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Locators

/// Visits every residue pattern (a nonzero subset of `Z_window`, given as a
/// bit mask) with at most `max_weight` elements.
fn residue_patterns(window: usize, max_weight: Option<usize>) -> impl Iterator<Item = u64> {
    (1u64..(1u64 << window))
        .filter(move |e| max_weight.is_none_or(|t| e.count_ones() as usize <= t))
}

/// The word with residue set `residues` whose first position is `first`.
///
/// Requires `residues` to contain `first mod window`.
pub fn residue_word(residues: u64, first: usize, window: usize) -> Burst {
    let mut pattern = 0u64;
    for rho in 0..window {
        if (residues >> rho) & 1 == 1 {
            let offset = (rho + window - first % window) % window;
            pattern |= 1 << offset;
        }
    }
    Burst {
        start: first,
        pattern,
    }
}

/// Rotates a residue set so that residue `first` becomes offset 0.
pub fn rotated_pattern(residues: u64, first: usize, window: usize) -> u64 {
    residue_word(residues, first, window).pattern
}

fn locator_certificate(
    h: &ParityCheck,
    window: usize,
    max_weight: Option<usize>,
) -> Option<Certificate> {
    let n = h.len();
    let patterns: Vec<u64> = residue_patterns(window, max_weight).collect();
    let certs: Option<Vec<Certificate>> = patterns
        .par_iter()
        .map(|&residues| {
            let mut cert = Certificate::default();
            let mut seen = FxHashSet::default();
            for first in 0..n {
                if (residues >> (first % window)) & 1 == 0 {
                    continue;
                }
                let word = residue_word(residues, first, window);
                let positions = word.positions(n, false);
                if positions.iter().any(|&q| q >= n) {
                    continue;
                }
                let s = h.syndrome(positions);
                cert.record(s);
                if !seen.insert(s) {
                    return None;
                }
            }
            Some(cert)
        })
        .collect();
    certs.map(|cs| {
        cs.iter()
            .fold(Certificate::default(), |acc, c| Certificate {
                cases: acc.cases + c.cases,
                digest: acc.digest.wrapping_add(c.digest),
            })
    })
}

fn locator_cases(n: usize, window: usize, max_weight: Option<usize>) -> u64 {
    let patterns: u64 = match max_weight {
        None => (1u64 << window) - 1,
        Some(t) => (1..=t.min(window))
            .map(|k| binomial(window as u64, k as u64))
            .sum(),
    };
    patterns.saturating_mul(n as u64)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn locator_from(
    p: &BinPoly,
    window: usize,
    length: usize,
    max_weight: Option<usize>,
) -> Option<ComponentCode> {
    let h = ParityCheck::cyclic(p, length).ok()?;
    let certificate = locator_certificate(&h, window, max_weight)?;
    Some(ComponentCode {
        h,
        role: Role::Locator { window, max_weight },
        origin: Origin::Cyclic {
            e: BinPoly::one(),
            p: p.clone(),
        },
        cyclic: false,
        certificate,
        table: None,
        fold_table: None,
    })
}

/// The locator generated by `p` alone, at the full length `2^m - 1` of `spec`.
///
/// Certified by checking, for every residue pattern in `Z_b_eff`, that the
/// words with that pattern have pairwise distinct syndromes over all
/// admissible first positions.
pub fn make_locator(b_eff: usize, spec: &CyclicCodeSpec) -> Result<ComponentCode, ComponentError> {
    if b_eff == 0 || b_eff > 63 {
        return Err(ComponentError::InvalidParameters(format!("window {b_eff}")));
    }
    check_budget(locator_cases(spec.n, b_eff, None))?;
    locator_from(&spec.p, b_eff, spec.n, None).ok_or_else(|| {
        ComponentError::CertificationFailed(format!(
            "p = {} does not locate {b_eff}-bursts",
            spec.p
        ))
    })
}

/// Shortened locator with primitive `p`. `length = None` means the full
/// length `2^m - 1` for each candidate `m`.
pub fn search_locator(
    window: usize,
    length: Option<usize>,
    max_weight: Option<usize>,
    m_range: RangeInclusive<usize>,
) -> Result<ComponentCode, ComponentError> {
    if window == 0 || window > 30 {
        return Err(ComponentError::InvalidParameters(format!(
            "locator window {window} outside 1..=30"
        )));
    }
    for m in m_range.clone() {
        if m == 0 || m > MAX_CHECK_BITS.min(40) {
            continue;
        }
        let n = match length {
            Some(n) => n,
            None if m <= 24 => (1usize << m) - 1,
            None => continue,
        };
        if n == 0 {
            return Err(ComponentError::InvalidParameters("empty locator".into()));
        }
        check_budget(locator_cases(n, window, max_weight))?;
        if let Some(code) = first_primitive(m, |p| locator_from(p, window, n, max_weight)) {
            return Ok(code);
        }
    }
    Err(ComponentError::NotFoundInRange {
        b: window,
        m_min: *m_range.start(),
        m_max: *m_range.end(),
    })
}

/// Unique start `f` congruent to `residue` modulo the window such that
/// `pattern` placed at `f` has syndrome `s`.
pub fn locate_burst(
    code: &ComponentCode,
    s: u128,
    pattern: u64,
    residue: usize,
) -> Result<usize, ComponentError> {
    let window = match code.role {
        Role::Locator { window, .. } => window,
        _ => {
            return Err(ComponentError::InvalidParameters(
                "locate_burst needs a locator".into(),
            ))
        }
    };
    if pattern == 0 || pattern >> window != 0 {
        return Err(ComponentError::InvalidParameters(
            "pattern must be nonzero and fit the window".into(),
        ));
    }
    let n = code.len();
    let top = 63 - pattern.leading_zeros() as usize;
    let mut found = None;
    let mut f = residue % window;
    while f + top < n {
        let burst = Burst { start: f, pattern };
        if code.syndrome(burst.positions(n, false)) == s {
            if found.is_some() {
                return Err(ComponentError::Ambiguous);
            }
            found = Some(f);
        }
        f += window;
    }
    found.ok_or(ComponentError::NoMatch)
}

// ---------------------------------------------------------------------------
// t-error-correcting codes

fn for_each_small_word(n: usize, t: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        n: usize,
        t: usize,
        from: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if !cur.is_empty() && !f(cur) {
            return false;
        }
        if cur.len() == t {
            return true;
        }
        for j in from..n {
            cur.push(j);
            let ok = rec(n, t, j + 1, cur, f);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    rec(n, t, 0, &mut Vec::new(), &mut f)
}

/// True iff all words of weight at most `t` have distinct, nonzero syndromes.
pub fn corrects_t_errors(h: &ParityCheck, t: usize) -> bool {
    let mut seen = FxHashSet::default();
    for_each_small_word(h.len(), t, |w| {
        let s = h.syndrome(w.iter().copied());
        s != 0 && seen.insert(s)
    })
}

/// Shortened binary BCH code of the given length correcting `t` errors,
/// with rows reduced to a basis.
pub fn build_bch(length: usize, t: usize) -> Result<ParityCheck, ComponentError> {
    if length == 0 || 2 * t >= length {
        return Err(ComponentError::InvalidParameters(format!(
            "BCH needs 1 <= length and 2t < length (length {length}, t {t})"
        )));
    }
    if t == 0 {
        return Ok(ParityCheck {
            rows: 0,
            cols: vec![0; length],
        });
    }
    let ell = (1..=16)
        .find(|&l| length < (1usize << l))
        .ok_or_else(|| ComponentError::InvalidParameters(format!("length {length} too large")))?;
    let field = ExtField::new(ell).expect("degree in range");
    let alpha = field.alpha();
    let mut g = BinPoly::one();
    for i in 0..t {
        let m = minimal_polynomial(field.pow(alpha, (2 * i + 1) as u64), &field);
        if !m.divides(&g) {
            g = g.mul(&m);
        }
    }
    let h = ParityCheck::cyclic(&g, length)?.row_reduced();
    if !corrects_t_errors(&h, t) {
        return Err(ComponentError::CertificationFailed(format!(
            "BCH({length}, t = {t})"
        )));
    }
    Ok(h)
}

/// A t-error-correcting parity check of the given length: BCH when
/// `2t < length`, otherwise the identity.
pub fn t_error_corrector(length: usize, t: usize) -> Result<ParityCheck, ComponentError> {
    if t == 0 {
        return Ok(ParityCheck {
            rows: 0,
            cols: vec![0; length],
        });
    }
    if 2 * t >= length {
        return Ok(ParityCheck::identity(length));
    }
    build_bch(length, t)
}

// ---------------------------------------------------------------------------
// Limited-weight codes

/// Window of the locator and of `H1` for bursts of length `b`: `b` when odd,
/// `b + 1` when even.
pub fn limited_weight_window(b: usize) -> usize {
    if b % 2 == 1 {
        b
    } else {
        b + 1
    }
}

/// Concatenates `h1` (indexed by position modulo the window) over a locator.
pub fn build_limited_weight(
    b: usize,
    t: usize,
    locator: &ComponentCode,
    h1: &ParityCheck,
) -> Result<ComponentCode, ComponentError> {
    let window = limited_weight_window(b);
    match locator.role {
        Role::Locator {
            window: w,
            max_weight,
        } if w == window && max_weight.is_none_or(|m| m >= t) => {}
        _ => {
            return Err(ComponentError::InvalidParameters(format!(
                "locator must have window {window} and cover weight {t}"
            )))
        }
    }
    if h1.len() != window {
        return Err(ComponentError::InvalidParameters(format!(
            "H1 must have length {window}"
        )));
    }
    if !corrects_t_errors(h1, t) {
        return Err(ComponentError::CertificationFailed(
            "H1 does not correct t errors".into(),
        ));
    }
    let r1 = h1.rows();
    let rows = r1 + locator.redundancy();
    if rows > MAX_CHECK_BITS {
        return Err(ComponentError::InvalidParameters(format!(
            "{rows} check bits"
        )));
    }
    let n = locator.len();
    let cols = (0..n)
        .map(|j| h1.column(j % window) | (locator.column(j) << r1))
        .collect();
    let h = ParityCheck { rows, cols };
    check_budget(burst_cases(n, b))?;
    let (table, certificate) = burst_table(&h, b, Some(t), false).ok_or_else(|| {
        ComponentError::CertificationFailed(format!("limited-weight code b = {b}, t = {t}"))
    })?;
    let mut fold_table = FxHashMap::default();
    for_each_small_word(window, t, |w| {
        let z = w.iter().fold(0u64, |acc, &j| acc | (1 << j));
        fold_table.insert(h1.syndrome(w.iter().copied()), z);
        true
    });
    let Origin::Cyclic { p, .. } = locator.origin.clone() else {
        return Err(ComponentError::InvalidParameters(
            "locator must be cyclic".into(),
        ));
    };
    Ok(ComponentCode {
        h,
        role: Role::CorrectorWeightLimited { b, t },
        origin: Origin::Concatenated {
            window,
            h1: h1.clone(),
            h1_t: t,
            p,
        },
        cyclic: false,
        certificate,
        table: Some(table),
        fold_table: Some(fold_table),
    })
}

/// Limited-weight code for bursts of length `b` and weight at most `t`.
/// `length = None` gives the full locator length `2^m - 1`.
pub fn search_limited_weight(
    b: usize,
    t: usize,
    length: Option<usize>,
    m_range: RangeInclusive<usize>,
) -> Result<ComponentCode, ComponentError> {
    if b == 0 || t == 0 {
        return Err(ComponentError::InvalidParameters(
            "b and t must be positive".into(),
        ));
    }
    let window = limited_weight_window(b);
    let h1 = t_error_corrector(window, t)?;
    let locator = search_locator(window, length, Some(t), m_range)?;
    build_limited_weight(b, t, &locator, &h1)
}

/// Structured decoding: fold the error onto the window, decode the fold
/// with `H1`, then find the first position with the locator part. Falls
/// back to the exhaustive table if that is not conclusive.
pub fn limited_weight_decode(
    code: &ComponentCode,
    s: u128,
) -> Result<Option<Burst>, ComponentError> {
    let (b, window, r1, fold_table, table) =
        match (&code.role, &code.origin, &code.fold_table, &code.table) {
            (
                Role::CorrectorWeightLimited { b, .. },
                Origin::Concatenated { window, h1, .. },
                Some(f),
                Some(t),
            ) => (*b, *window, h1.rows(), f, t),
            _ => {
                return Err(ComponentError::InvalidParameters(
                    "limited_weight_decode needs a limited-weight code".into(),
                ))
            }
        };
    if s == 0 {
        return Ok(None);
    }
    let fallback = || {
        table
            .get(&s)
            .copied()
            .map(Some)
            .ok_or(ComponentError::Undecodable)
    };
    let Some(&z) = fold_table.get(&(s & row_mask(r1))) else {
        return fallback();
    };
    let n = code.len();
    let mut found = None;
    for first in (0..window).filter(|rho| (z >> rho) & 1 == 1) {
        let pattern = rotated_pattern(z, first, window);
        let top = 63 - pattern.leading_zeros() as usize;
        if top >= b {
            continue;
        }
        let mut f = first;
        while f + top < n {
            let burst = Burst { start: f, pattern };
            if code.syndrome(burst.positions(n, false)) == s {
                if found.is_some() {
                    return fallback();
                }
                found = Some(burst);
            }
            f += window;
        }
    }
    match found {
        Some(burst) => Ok(Some(burst)),
        None => fallback(),
    }
}

/// Decoding by table lookup alone, for comparison with the structured decoder.
pub fn table_decode(code: &ComponentCode, s: u128) -> Result<Option<Burst>, ComponentError> {
    if s == 0 {
        return Ok(None);
    }
    code.table
        .as_ref()
        .ok_or_else(|| ComponentError::InvalidParameters("code has no table".into()))?
        .get(&s)
        .copied()
        .map(Some)
        .ok_or(ComponentError::Undecodable)
}

// ---------------------------------------------------------------------------
// Text form

impl ComponentCode {
    /// One `key=value` field per item, in a fixed order.
    fn spec_fields(&self) -> Vec<(&'static str, String)> {
        let (kind, b, t, window) = match self.role {
            Role::Corrector { b } => ("corrector", b.to_string(), "-".to_string(), "-".to_string()),
            Role::CorrectorWeightLimited { b, t } => (
                "corrector-weight-limited",
                b.to_string(),
                t.to_string(),
                limited_weight_window(b).to_string(),
            ),
            Role::Locator { window, max_weight } => (
                "locator",
                window.to_string(),
                max_weight.map_or("-".into(), |t| t.to_string()),
                window.to_string(),
            ),
        };
        let (e, p) = match &self.origin {
            Origin::Cyclic { e, p } => (e.to_string(), p.to_string()),
            Origin::Concatenated { p, .. } => ("-".to_string(), p.to_string()),
        };
        vec![
            ("kind", kind.to_string()),
            ("b", b),
            ("t", t),
            ("window", window),
            ("n", self.len().to_string()),
            ("cyclic", if self.cyclic { "yes" } else { "no" }.to_string()),
            ("r", self.redundancy().to_string()),
            ("e", e),
            ("p", p),
            ("cert", self.certificate.to_string()),
        ]
    }

    /// Single-line form, used inside assembly files.
    pub fn spec_line(&self) -> String {
        self.spec_fields()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Multi-line `key: value` form, used for standalone spec files.
    pub fn spec_text(&self) -> String {
        self.spec_fields()
            .iter()
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect()
    }

    /// Rebuilds and re-certifies a code from its text form (either form).
    pub fn from_spec_text(text: &str) -> Result<ComponentCode, ComponentError> {
        let bad = |what: &str| ComponentError::InvalidParameters(format!("component spec: {what}"));
        let mut fields: FxHashMap<&str, &str> = FxHashMap::default();
        for item in text.split(['\n', ' ']).filter(|s| !s.trim().is_empty()) {
            if let Some((k, v)) = item.split_once('=') {
                fields.insert(k.trim(), v.trim());
            } else if let Some(k) = item.strip_suffix(':') {
                fields.insert(k.trim(), "");
            }
        }
        for line in text.lines() {
            if let Some((k, v)) = line.split_once(": ") {
                fields.insert(k.trim(), v.trim());
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .filter(|v| !v.is_empty())
                .ok_or_else(|| bad(&format!("missing {k}")))
        };
        let num =
            |k: &str| -> Result<usize, ComponentError> { get(k)?.parse().map_err(|_| bad(k)) };
        let opt = |k: &str| -> Result<Option<usize>, ComponentError> {
            match get(k)? {
                "-" => Ok(None),
                v => v.parse().map(Some).map_err(|_| bad(k)),
            }
        };
        let poly =
            |k: &str| -> Result<BinPoly, ComponentError> { get(k)?.parse().map_err(|_| bad(k)) };
        let n = num("n")?;
        let cyclic = get("cyclic")? == "yes";
        let code = match get("kind")? {
            "corrector" => {
                let b = num("b")?;
                corrector_from(&poly("e")?, &poly("p")?, b, n, cyclic)
                    .ok_or_else(|| ComponentError::CertificationFailed("corrector".into()))?
            }
            "locator" => {
                let window = num("b")?;
                locator_from(&poly("p")?, window, n, opt("t")?)
                    .ok_or_else(|| ComponentError::CertificationFailed("locator".into()))?
            }
            "corrector-weight-limited" => {
                let (b, t) = (num("b")?, num("t")?);
                let window = limited_weight_window(b);
                let locator = locator_from(&poly("p")?, window, n, Some(t))
                    .ok_or_else(|| ComponentError::CertificationFailed("locator".into()))?;
                build_limited_weight(b, t, &locator, &t_error_corrector(window, t)?)?
            }
            other => return Err(bad(&format!("unknown kind {other}"))),
        };
        if code.certificate.to_string() != get("cert")? || code.redundancy() != num("r")? {
            return Err(ComponentError::CertificationFailed(
                "rebuilt code does not match the recorded certificate".into(),
            ));
        }
        Ok(code)
    }
}
