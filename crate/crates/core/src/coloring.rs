//! Colorings of D-dimensional arrays and the properties p.1, p.2, p.3
//! that the decoder relies on.
//!
//! p.1: inside one placement of the shape, coloring `s` uses distinct
//! colors spanning at most `B + delta_s - 1`.
//! p.2: the tuple of all colors determines the position.
//! p.3: positions with equal first color have `s`-colors that differ by a
//! multiple of `B + delta_s`.

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::lee::{inverse_transform_nd, transform_nd};
use crate::report::{join, CheckReport};
use crate::shape::{flat_if_inside, grid, ShapeSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("box volume {0} is even; the folded coloring needs an odd volume")]
    EvenVolume(usize),
    #[error("invalid coloring parameters: {0}")]
    InvalidParameters(String),
    #[error("cannot parse coloring set: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("coloring matrix is singular")]
    Singular,
    #[error("color tuple has no integral solution")]
    NonIntegral,
    #[error("solution lies outside the array")]
    OutOfArray,
    #[error("color tuple has the wrong length")]
    DimensionMismatch,
}

/// `weight * (i[axis] mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FoldTerm {
    pub axis: usize,
    pub modulus: i64,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ColoringForm {
    /// `sum_j coeffs[j] * i_j`.
    Linear { coeffs: Vec<i64> },
    /// `outer * i[axis] + sum of fold terms`; the fold terms lie in `[0, outer)`.
    Folded {
        axis: usize,
        outer: i64,
        terms: Vec<FoldTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    pub form: ColoringForm,
    /// Evaluate the form on `T(i)` rather than on `i`.
    pub transformed: bool,
    pub offset: i64,
}

impl Coloring {
    pub fn linear(coeffs: Vec<i64>) -> Self {
        Coloring {
            form: ColoringForm::Linear { coeffs },
            transformed: false,
            offset: 0,
        }
    }

    pub fn raw(&self, i: &[i64]) -> i64 {
        let t;
        let i = if self.transformed {
            t = transform_nd(i);
            &t[..]
        } else {
            i
        };
        match &self.form {
            ColoringForm::Linear { coeffs } => coeffs.iter().zip(i).map(|(a, x)| a * x).sum(),
            ColoringForm::Folded { axis, outer, terms } => {
                outer * i[*axis]
                    + terms
                        .iter()
                        .map(|t| t.weight * i[t.axis].rem_euclid(t.modulus))
                        .sum::<i64>()
            }
        }
    }

    pub fn color(&self, i: &[i64]) -> i64 {
        self.raw(i) + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    OddBox,
    EvenBox,
    LeeTiling,
    LeeRadiusOne,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::OddBox => "odd-box",
            Family::EvenBox => "even-box",
            Family::LeeTiling => "lee-tiling",
            Family::LeeRadiusOne => "lee-radius-one",
        }
    }

    fn parse(s: &str) -> Option<Family> {
        [
            Family::OddBox,
            Family::EvenBox,
            Family::LeeTiling,
            Family::LeeRadiusOne,
        ]
        .into_iter()
        .find(|f| f.name() == s)
    }
}

/// Outcome of one property for one coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringCheck {
    /// 1-based coloring index.
    pub s: usize,
    pub pass: bool,
    pub cases: u64,
    /// p.1: largest span seen; p.2: determinant (0 if not linear); p.3: gcd
    /// of all observed differences.
    pub observed: i128,
    /// p.1: span limit; p.3: required modulus.
    pub required: i64,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: &'static str,
    pub window: Vec<usize>,
    pub entries: Vec<ColoringCheck>,
}

impl PropertyReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, s: usize) -> Option<&ColoringCheck> {
        self.entries.iter().find(|e| e.s == s)
    }

    pub fn checks(&self) -> Vec<CheckReport> {
        self.entries
            .iter()
            .map(|e| {
                let detail = match self.property {
                    "p1" => format!("span={},limit={}", e.observed, e.required),
                    "p2" if e.observed == 0 => "injective".to_string(),
                    "p2" => format!("det={}", e.observed),
                    _ => format!("gcd={},modulus={}", e.observed, e.required),
                };
                let witness = match &e.witness {
                    Some(w) => format!("{detail},{w}"),
                    None => detail,
                };
                CheckReport::new(format!("{}.s{}", self.property, e.s), e.pass, e.cases)
                    .with_witness(witness)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringSet {
    pub dim: usize,
    pub family: Family,
    pub colorings: Vec<Coloring>,
    pub shape: ShapeSpec,
    /// The `B` of the windows: the box volume, or `2R^2 + 2R + 1`, or `2D + 1`.
    pub base: usize,
    pub deltas: Vec<usize>,
    /// Colorings that failed p.3 and therefore get a corrector.
    pub needs_corrector: Vec<bool>,
}

fn pos_str(p: &[i64]) -> String {
    join(p, ",")
}

/// Folded coloring for a box of odd volume: coloring `s` is
/// `(prod_{j != s} b_j) * i_s` plus the mixed-radix value of
/// `(i_j mod b_j)_{j != s}` with weights increasing in `j`.
pub fn box_coloring_odd(b: &[usize]) -> Result<ColoringSet, ColoringError> {
    validate_sides(b)?;
    let volume: usize = b.iter().product();
    if volume.is_multiple_of(2) {
        return Err(ColoringError::EvenVolume(volume));
    }
    let d = b.len();
    let colorings = (0..d)
        .map(|s| {
            let mut weight = 1i64;
            let mut terms = Vec::new();
            for (j, &bj) in b.iter().enumerate() {
                if j != s {
                    terms.push(FoldTerm {
                        axis: j,
                        modulus: bj as i64,
                        weight,
                    });
                    weight *= bj as i64;
                }
            }
            Coloring {
                form: ColoringForm::Folded {
                    axis: s,
                    outer: weight,
                    terms,
                },
                transformed: false,
                offset: 0,
            }
        })
        .collect();
    Ok(ColoringSet {
        dim: d,
        family: Family::OddBox,
        colorings,
        shape: ShapeSpec::Box { sides: b.to_vec() },
        base: volume,
        deltas: vec![0; d],
        needs_corrector: vec![false; d],
    })
}

fn validate_sides(b: &[usize]) -> Result<(), ColoringError> {
    if b.is_empty() || b.contains(&0) {
        return Err(ColoringError::InvalidParameters(format!("box sides {b:?}")));
    }
    Ok(())
}

/// Linear colorings for any box, used for even volume.
///
/// With `B_j = b_1 ... b_j`, the coefficient of `i_j` in coloring `s` is
/// `-B_{j-1} B_D / B_{s-1}` for `j < s` and `B_{j-1} / B_{s-1}` for `j >= s`.
pub fn box_coloring_even(b: &[usize]) -> Result<ColoringSet, ColoringError> {
    validate_sides(b)?;
    let d = b.len();
    let mut prefix = vec![1i64; d + 1];
    for j in 0..d {
        prefix[j + 1] = prefix[j] * b[j] as i64;
    }
    let colorings = (0..d)
        .map(|s| {
            let coeffs = (0..d)
                .map(|j| {
                    if j < s {
                        -prefix[j] * prefix[d] / prefix[s]
                    } else {
                        prefix[j] / prefix[s]
                    }
                })
                .collect();
            Coloring::linear(coeffs)
        })
        .collect();
    let mut deltas = vec![1; d];
    deltas[0] = 0;
    Ok(ColoringSet {
        dim: d,
        family: Family::EvenBox,
        colorings,
        shape: ShapeSpec::Box { sides: b.to_vec() },
        base: prefix[d] as usize,
        deltas,
        needs_corrector: vec![false; d],
    })
}

/// `Psi_1 = (R+1) i_1 + R i_2`, `Psi_2 = -R i_1 + (R+1) i_2`.
pub fn lee_colorings(radius: usize) -> Result<ColoringSet, ColoringError> {
    if radius == 0 {
        return Err(ColoringError::InvalidParameters(
            "Lee tiling colorings need R >= 1".into(),
        ));
    }
    let r = radius as i64;
    Ok(ColoringSet {
        dim: 2,
        family: Family::LeeTiling,
        colorings: vec![
            Coloring::linear(vec![r + 1, r]),
            Coloring::linear(vec![-r, r + 1]),
        ],
        shape: ShapeSpec::LeeSphere { dim: 2, radius },
        base: (2 * r * r + 2 * r + 1) as usize,
        deltas: vec![0, 0],
        needs_corrector: vec![false, false],
    })
}

/// Coloring `s` gives `i_j` the coefficient `((j - s) mod D) + 1`.
/// Colorings that fail p.3 on the default window are tagged.
pub fn lee_radius1_colorings(dim: usize) -> Result<ColoringSet, ColoringError> {
    if dim < 2 {
        return Err(ColoringError::InvalidParameters(
            "radius-one colorings need D >= 2".into(),
        ));
    }
    let colorings = (0..dim)
        .map(|s| Coloring::linear((0..dim).map(|j| ((j + dim - s) % dim) as i64 + 1).collect()))
        .collect();
    let mut set = ColoringSet {
        dim,
        family: Family::LeeRadiusOne,
        colorings,
        shape: ShapeSpec::LeeSphere { dim, radius: 1 },
        base: 2 * dim + 1,
        deltas: vec![0; dim],
        needs_corrector: vec![false; dim],
    };
    let p3 = check_p3(&set, &set.default_window());
    for e in &p3.entries {
        set.needs_corrector[e.s - 1] = !e.pass;
    }
    Ok(set)
}

/// Applies a box coloring set to `T(i)`; `box_set` must be built for
/// [`crate::lee::transformed_box`] of the same dimension and radius.
pub fn transformed_colorings(
    dim: usize,
    radius: usize,
    box_set: ColoringSet,
) -> Result<ColoringSet, ColoringError> {
    if box_set.dim != dim
        || box_set.shape.box_sides() != Some(&crate::lee::transformed_box(dim, radius)[..])
    {
        return Err(ColoringError::InvalidParameters(
            "box coloring does not match the transformed sphere".into(),
        ));
    }
    let mut set = box_set;
    for c in &mut set.colorings {
        c.transformed = true;
    }
    set.shape = ShapeSpec::LeeSphere { dim, radius };
    Ok(set)
}

impl ColoringSet {
    pub fn with_shape(mut self, shape: ShapeSpec) -> Self {
        self.shape = shape;
        self
    }

    pub fn is_transformed(&self) -> bool {
        self.colorings.first().is_some_and(|c| c.transformed)
    }

    /// Locator window / p.3 modulus for coloring `s` (0-based): `B + delta_s`.
    pub fn modulus(&self, s: usize) -> usize {
        self.base + self.deltas[s]
    }

    pub fn colors(&self, i: &[i64]) -> Vec<i64> {
        self.colorings.iter().map(|c| c.color(i)).collect()
    }

    /// Coloring matrix when every coloring is linear (rows are colorings).
    pub fn matrix(&self) -> Option<Vec<Vec<i64>>> {
        self.colorings
            .iter()
            .map(|c| match &c.form {
                ColoringForm::Linear { coeffs } => Some(coeffs.clone()),
                ColoringForm::Folded { .. } => None,
            })
            .collect()
    }

    /// Sets offsets so the smallest color on the array is 0 and returns
    /// the number of colors used by each coloring.
    pub fn normalize(&mut self, dims: &[usize]) -> Vec<usize> {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for idx in grid(dims) {
            let idx: Vec<i64> = idx.iter().map(|&x| x as i64).collect();
            for (s, c) in self.colorings.iter().enumerate() {
                let v = c.raw(&idx);
                lo[s] = lo[s].min(v);
                hi[s] = hi[s].max(v);
            }
        }
        for (s, c) in self.colorings.iter_mut().enumerate() {
            c.offset = -lo[s];
        }
        (0..self.dim)
            .map(|s| (hi[s] - lo[s] + 1) as usize)
            .collect()
    }

    /// The array position with the given (offset) colors.
    pub fn locate(&self, colors: &[i64], dims: &[usize]) -> Result<Vec<usize>, SolveError> {
        if colors.len() != self.dim || dims.len() != self.dim {
            return Err(SolveError::DimensionMismatch);
        }
        let raw: Vec<i64> = colors
            .iter()
            .zip(&self.colorings)
            .map(|(c, col)| c - col.offset)
            .collect();
        let t = match self.matrix() {
            Some(a) => solve_position(&a, &raw)?,
            None => {
                let mut t = vec![0i64; self.dim];
                for (col, &v) in self.colorings.iter().zip(&raw) {
                    match &col.form {
                        ColoringForm::Folded { axis, outer, .. } => t[*axis] = v.div_euclid(*outer),
                        ColoringForm::Linear { .. } => return Err(SolveError::Singular),
                    }
                }
                t
            }
        };
        let i = if self.is_transformed() {
            inverse_transform_nd(&t)
        } else {
            t
        };
        if self.colors(&i) != colors {
            return Err(SolveError::NonIntegral);
        }
        if flat_if_inside(&i, dims).is_none() {
            return Err(SolveError::OutOfArray);
        }
        Ok(i.iter().map(|&x| x as usize).collect())
    }

    /// Per-axis `2 * extent + 2`, where `extent` is the largest extent of the
    /// shape along any axis.
    pub fn default_window(&self) -> Vec<usize> {
        let cells = self.shape.base().cells();
        let extent = (0..self.dim)
            .map(|k| {
                let lo = cells.iter().map(|c| c[k]).min().unwrap_or(0);
                let hi = cells.iter().map(|c| c[k]).max().unwrap_or(0);
                (hi - lo + 1) as usize
            })
            .max()
            .unwrap_or(1);
        vec![2 * extent + 2; self.dim]
    }

    /// Anchors of all placements of the shape inside the window.
    fn placements(&self, window: &[usize]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let cells = self.shape.base().cells();
        let lo: Vec<i64> = (0..self.dim)
            .map(|k| cells.iter().map(|c| c[k]).min().unwrap_or(0))
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|k| cells.iter().map(|c| c[k]).max().unwrap_or(0))
            .collect();
        let ranges: Vec<usize> = (0..self.dim)
            .map(|k| (window[k] as i64 - (hi[k] - lo[k])).max(0) as usize)
            .collect();
        let anchors = grid(&ranges)
            .map(|a| a.iter().zip(&lo).map(|(&x, &l)| x as i64 - l).collect())
            .collect();
        (anchors, cells)
    }
}

/// p.1 on every placement of the shape inside `window`.
pub fn check_p1(cs: &ColoringSet, window: &[usize]) -> PropertyReport {
    let (anchors, cells) = cs.placements(window);
    let entries = (0..cs.dim)
        .map(|s| {
            let limit = (cs.modulus(s) - 1) as i64;
            let coloring = &cs.colorings[s];
            let spans: Vec<(i64, bool)> = anchors
                .par_iter()
                .map(|a| {
                    let mut colors: Vec<i64> = cells
                        .iter()
                        .map(|c| {
                            coloring.color(&c.iter().zip(a).map(|(x, y)| x + y).collect::<Vec<_>>())
                        })
                        .collect();
                    colors.sort_unstable();
                    let distinct = colors.windows(2).all(|w| w[0] != w[1]);
                    let span =
                        colors.last().copied().unwrap_or(0) - colors.first().copied().unwrap_or(0);
                    (span, distinct && span <= limit)
                })
                .collect();
            let bad = spans.iter().position(|&(_, ok)| !ok);
            ColoringCheck {
                s: s + 1,
                pass: bad.is_none(),
                cases: anchors.len() as u64,
                observed: spans.iter().map(|&(sp, _)| sp as i128).max().unwrap_or(0),
                required: limit,
                witness: bad.map(|k| format!("anchor={}", pos_str(&anchors[k]))),
            }
        })
        .collect();
    PropertyReport {
        property: "p1",
        window: window.to_vec(),
        entries,
    }
}

/// p.2: the color tuple is injective on `window`; for linear sets the
/// coloring matrix must also be nonsingular.
pub fn check_p2(cs: &ColoringSet, window: &[usize]) -> PropertyReport {
    let mut seen: FxHashMap<Vec<i64>, Vec<i64>> = FxHashMap::default();
    let mut witness = None;
    let mut cases = 0u64;
    for idx in grid(window) {
        let idx: Vec<i64> = idx.iter().map(|&x| x as i64).collect();
        cases += 1;
        if let Some(prev) = seen.insert(cs.colors(&idx), idx.clone()) {
            if witness.is_none() {
                witness = Some(format!("pair={};{}", pos_str(&prev), pos_str(&idx)));
            }
        }
    }
    let det = cs.matrix().map(|a| determinant(&a)).unwrap_or(0);
    let pass = witness.is_none() && (cs.matrix().is_none() || det != 0);
    PropertyReport {
        property: "p2",
        window: window.to_vec(),
        entries: vec![ColoringCheck {
            s: 1,
            pass,
            cases,
            observed: det,
            required: 0,
            witness,
        }],
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// p.3 for every coloring `s >= 2`: reports the gcd of all `s`-color
/// differences between window positions of equal first color.
pub fn check_p3(cs: &ColoringSet, window: &[usize]) -> PropertyReport {
    let mut first: FxHashMap<i64, Vec<i64>> = FxHashMap::default();
    let mut g = vec![0i128; cs.dim];
    let mut witness: Vec<Option<String>> = vec![None; cs.dim];
    let mut cases = 0u64;
    for idx in grid(window) {
        let idx: Vec<i64> = idx.iter().map(|&x| x as i64).collect();
        let colors = cs.colors(&idx);
        cases += 1;
        match first.get(&colors[0]) {
            None => {
                first.insert(colors[0], colors);
            }
            Some(reference) => {
                for s in 1..cs.dim {
                    let diff = (colors[s] - reference[s]) as i128;
                    g[s] = gcd(g[s], diff);
                    if diff % cs.modulus(s) as i128 != 0 && witness[s].is_none() {
                        witness[s] = Some(format!("position={}", pos_str(&idx)));
                    }
                }
            }
        }
    }
    let entries = (1..cs.dim)
        .map(|s| ColoringCheck {
            s: s + 1,
            pass: witness[s].is_none(),
            cases,
            observed: g[s],
            required: cs.modulus(s) as i64,
            witness: witness[s].clone(),
        })
        .collect();
    PropertyReport {
        property: "p3",
        window: window.to_vec(),
        entries,
    }
}

/// Determinant by fraction-free elimination.
pub fn determinant(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Integer solution of `A i = colors` by Cramer's rule.
pub fn solve_position(a: &[Vec<i64>], colors: &[i64]) -> Result<Vec<i64>, SolveError> {
    let n = a.len();
    if colors.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(SolveError::DimensionMismatch);
    }
    let det = determinant(a);
    if det == 0 {
        return Err(SolveError::Singular);
    }
    (0..n)
        .map(|k| {
            let replaced: Vec<Vec<i64>> = a
                .iter()
                .zip(colors)
                .map(|(row, &c)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &x)| if j == k { c } else { x })
                        .collect()
                })
                .collect();
            let num = determinant(&replaced);
            if num % det != 0 {
                return Err(SolveError::NonIntegral);
            }
            i64::try_from(num / det).map_err(|_| SolveError::OutOfArray)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Text form

impl fmt::Display for ColoringForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringForm::Linear { coeffs } => write!(f, "linear {}", join(coeffs, ",")),
            ColoringForm::Folded { axis, outer, terms } => {
                let terms: Vec<String> = terms
                    .iter()
                    .map(|t| format!("{}/{}/{}", t.axis + 1, t.modulus, t.weight))
                    .collect();
                write!(
                    f,
                    "folded axis={} outer={outer} terms={}",
                    axis + 1,
                    if terms.is_empty() {
                        "-".into()
                    } else {
                        terms.join(",")
                    }
                )
            }
        }
    }
}

impl ColoringSet {
    /// Text form; `window` adds a certificate line with the property results.
    pub fn to_text(&self, window: Option<&[usize]>) -> String {
        let mut out = String::new();
        out.push_str(&format!("dim: {}\n", self.dim));
        out.push_str(&format!("shape: {}\n", self.shape));
        out.push_str(&format!("family: {}\n", self.family.name()));
        out.push_str(&format!(
            "transformed: {}\n",
            if self.is_transformed() { "yes" } else { "no" }
        ));
        out.push_str(&format!("base: {}\n", self.base));
        out.push_str(&format!("deltas: {}\n", join(&self.deltas, " ")));
        for (s, c) in self.colorings.iter().enumerate() {
            out.push_str(&format!(
                "coloring {}: {} offset={} needs-corrector={}\n",
                s + 1,
                c.form,
                c.offset,
                if self.needs_corrector[s] { "yes" } else { "no" }
            ));
        }
        if let Some(w) = window {
            let mut items = vec![format!("window={}", join(w, "x"))];
            let reports = [check_p1(self, w), check_p2(self, w), check_p3(self, w)];
            for rep in &reports {
                for e in &rep.entries {
                    items.push(format!(
                        "{}.s{}={}",
                        rep.property,
                        e.s,
                        if e.pass { "pass" } else { "fail" }
                    ));
                }
            }
            out.push_str(&format!("certificate: {}\n", items.join(" ")));
        }
        out
    }

    /// Parses [`ColoringSet::to_text`]; returns the set and the certificate
    /// window, if recorded.
    pub fn from_text(text: &str) -> Result<(ColoringSet, Option<Vec<usize>>), ColoringError> {
        let err = |m: &str| ColoringError::Parse(m.to_string());
        let mut fields: FxHashMap<String, String> = FxHashMap::default();
        let mut colorings: Vec<(Coloring, bool)> = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (key, value) = line.split_once(':').ok_or_else(|| err(line))?;
            let value = value.trim();
            if let Some(k) = key.strip_prefix("coloring ") {
                let k: usize = k.trim().parse().map_err(|_| err(line))?;
                if k != colorings.len() + 1 {
                    return Err(err("colorings out of order"));
                }
                colorings.push(parse_coloring(value).ok_or_else(|| err(line))?);
            } else {
                fields.insert(key.trim().to_string(), value.to_string());
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .map(|s| s.as_str())
                .ok_or_else(|| err(&format!("missing {k}")))
        };
        let dim: usize = get("dim")?.parse().map_err(|_| err("dim"))?;
        let shape = ShapeSpec::parse(get("shape")?, Some(dim)).map_err(|_| err("shape"))?;
        let family = Family::parse(get("family")?).ok_or_else(|| err("family"))?;
        let transformed = get("transformed")? == "yes";
        let base: usize = get("base")?.parse().map_err(|_| err("base"))?;
        let deltas: Vec<usize> = get("deltas")?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| err("deltas")))
            .collect::<Result<_, _>>()?;
        if colorings.len() != dim || deltas.len() != dim {
            return Err(err("coloring count does not match dim"));
        }
        let needs_corrector = colorings.iter().map(|(_, n)| *n).collect();
        let colorings = colorings
            .into_iter()
            .map(|(mut c, _)| {
                c.transformed = transformed;
                c
            })
            .collect();
        let window = match fields.get("certificate") {
            None => None,
            Some(cert) => {
                let w = cert
                    .split_whitespace()
                    .find_map(|item| item.strip_prefix("window="))
                    .ok_or_else(|| err("certificate window"))?;
                Some(
                    w.split('x')
                        .map(|x| x.parse().map_err(|_| err("window")))
                        .collect::<Result<Vec<usize>, _>>()?,
                )
            }
        };
        Ok((
            ColoringSet {
                dim,
                family,
                colorings,
                shape,
                base,
                deltas,
                needs_corrector,
            },
            window,
        ))
    }
}

fn parse_coloring(s: &str) -> Option<(Coloring, bool)> {
    let mut words = s.split_whitespace();
    let kind = words.next()?;
    let mut kv: FxHashMap<&str, &str> = FxHashMap::default();
    let mut coeffs = None;
    for w in words {
        match w.split_once('=') {
            Some((k, v)) => {
                kv.insert(k, v);
            }
            None => coeffs = Some(w),
        }
    }
    let form = match kind {
        "linear" => ColoringForm::Linear {
            coeffs: coeffs?
                .split(',')
                .map(|x| x.parse().ok())
                .collect::<Option<_>>()?,
        },
        "folded" => {
            let axis: usize = kv.get("axis")?.parse().ok()?;
            let terms = match *kv.get("terms")? {
                "-" => Vec::new(),
                t => t
                    .split(',')
                    .map(|item| {
                        let mut it = item.split('/');
                        let axis: usize = it.next()?.parse().ok()?;
                        Some(FoldTerm {
                            axis: axis.checked_sub(1)?,
                            modulus: it.next()?.parse().ok()?,
                            weight: it.next()?.parse().ok()?,
                        })
                    })
                    .collect::<Option<_>>()?,
            };
            ColoringForm::Folded {
                axis: axis.checked_sub(1)?,
                outer: kv.get("outer")?.parse().ok()?,
                terms,
            }
        }
        _ => return None,
    };
    let offset = kv.get("offset")?.parse().ok()?;
    let needs = *kv.get("needs-corrector")? == "yes";
    Some((
        Coloring {
            form,
            transformed: false,
            offset,
        },
        needs,
    ))
}
