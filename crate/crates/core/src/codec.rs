//! Assembly of multidimensional codes from colorings and component codes,
//! with systematic encoding, structured decoding and redundancy bounds.
//!
//! The parity-check column of an array position is the concatenation, over
//! the colorings, of the component column indexed by that position's color.

use std::fmt;
use std::ops::RangeInclusive;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::bits::{invert, BitVec, EchelonBasis};
use crate::coloring::{
    box_coloring_even, box_coloring_odd, check_p1, check_p2, check_p3, lee_colorings,
    lee_radius1_colorings, transformed_colorings, ColoringError, ColoringSet,
};
use crate::component::{
    burst_decode, locate_burst, rotated_pattern, search_corrector, search_limited_weight,
    search_locator, ComponentCode, ComponentError,
};
use crate::lee::transformed_box;
use crate::report::join;
use crate::shape::{flat_if_inside, flatten, grid, unflatten, ShapeSpec};

pub const MAX_DIM: usize = 4;
pub const MAX_POSITIONS: usize = 1 << 20;

/// Bits of redundancy the greedy seating may add above a theorem ceiling.
pub const CEILING_SLACK: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("shape unsupported: {0}")]
    ShapeUnsupported(String),
    #[error("no component code: {0}")]
    NoComponentCode(#[from] ComponentError),
    #[error("redundancy positions reach rank {rank} of {r}")]
    RankDeficient { rank: usize, r: usize },
    #[error("coloring property {0} failed")]
    ColoringCheckFailed(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("array too large: {0}")]
    TooLarge(String),
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("undecodable: the error is outside the correctable class")]
    Undecodable,
    #[error("format error: {0}")]
    Format(String),
    #[error("assembly file does not match its reconstruction: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    OddBox,
    EvenBox,
    LeeTiling,
    LeeRadiusOne,
    LeeTransform,
}

impl Route {
    pub const ALL: [Route; 5] = [
        Route::OddBox,
        Route::EvenBox,
        Route::LeeTiling,
        Route::LeeRadiusOne,
        Route::LeeTransform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::OddBox => "odd-box",
            Route::EvenBox => "even-box",
            Route::LeeTiling => "lee-tiling",
            Route::LeeRadiusOne => "lee-radius-one",
            Route::LeeTransform => "lee-transform",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Route {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| CodecError::Format(format!("unknown route {s}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssembleOptions {
    pub corrector_m: RangeInclusive<usize>,
    pub locator_m: RangeInclusive<usize>,
    /// Overrides the default route for the shape.
    pub route: Option<Route>,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            corrector_m: 1..=30,
            locator_m: 1..=24,
            route: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentUse {
    Corrector,
    Locator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdWord {
    pub dims: Vec<usize>,
    pub bits: BitVec,
}

impl NdWord {
    pub fn zeros(dims: &[usize]) -> Self {
        NdWord {
            dims: dims.to_vec(),
            bits: BitVec::zeros(dims.iter().product()),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn flip_all(&mut self, positions: &[usize]) {
        for &p in positions {
            self.bits.flip(p);
        }
    }

    /// `dims: n1 ... nD` followed by the bits in row-major order, one line
    /// per run of `n_D` bits.
    pub fn to_text(&self) -> String {
        let mut out = format!("dims: {}\n", join(&self.dims, " "));
        let row = *self.dims.last().unwrap_or(&1);
        let mut line = String::with_capacity(row);
        for (k, b) in self.bits.iter().enumerate() {
            line.push(if b { '1' } else { '0' });
            if (k + 1) % row == 0 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<NdWord, CodecError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CodecError::Format("empty array file".into()))?;
        let dims: Vec<usize> = header
            .strip_prefix("dims:")
            .ok_or_else(|| CodecError::Format("missing dims header".into()))?
            .split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| CodecError::Format(format!("bad dimension {x}")))
            })
            .collect::<Result<_, _>>()?;
        if dims.is_empty() || dims.contains(&0) {
            return Err(CodecError::Format("dimensions must be positive".into()));
        }
        let bits = parse_bits(lines)?;
        let n: usize = dims.iter().product();
        if bits.len() != n {
            return Err(CodecError::LengthMismatch {
                expected: n,
                got: bits.len(),
            });
        }
        Ok(NdWord {
            dims,
            bits: BitVec::from_bools(&bits),
        })
    }
}

fn parse_bits<'a>(lines: impl Iterator<Item = &'a str>) -> Result<Vec<bool>, CodecError> {
    let mut bits = Vec::new();
    for line in lines {
        for c in line.trim().chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(CodecError::Format(format!(
                        "unexpected character {other:?}"
                    )))
                }
            }
        }
    }
    Ok(bits)
}

/// `info: K` followed by the bits, 64 per line.
pub fn info_to_text(info: &BitVec) -> String {
    let mut out = format!("info: {}\n", info.len());
    let bits: Vec<char> = info.iter().map(|b| if b { '1' } else { '0' }).collect();
    for chunk in bits.chunks(64) {
        out.extend(chunk);
        out.push('\n');
    }
    out
}

pub fn info_from_text(text: &str) -> Result<BitVec, CodecError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CodecError::Format("empty info file".into()))?;
    let k: usize = header
        .strip_prefix("info:")
        .and_then(|x| x.trim().parse().ok())
        .ok_or_else(|| CodecError::Format("missing info header".into()))?;
    let bits = parse_bits(lines)?;
    if bits.len() != k {
        return Err(CodecError::LengthMismatch {
            expected: k,
            got: bits.len(),
        });
    }
    Ok(BitVec::from_bools(&bits))
}

/// Per-component syndromes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub parts: Vec<u128>,
}

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|&p| p == 0)
    }
}

/// A set of erroneous positions and the shape it is claimed to fit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub positions: Vec<Vec<usize>>,
    pub shape: ShapeSpec,
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .positions
            .iter()
            .map(|p| format!("({})", join(p, ",")))
            .collect();
        write!(f, "{}", items.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub word: NdWord,
    pub cluster: Option<Cluster>,
}

#[derive(Debug, Clone)]
pub struct CodeAssembly {
    dims: Vec<usize>,
    shape: ShapeSpec,
    route: Route,
    options: AssembleOptions,
    colorings: ColoringSet,
    lengths: Vec<usize>,
    components: Vec<ComponentCode>,
    uses: Vec<ComponentUse>,
    /// `residues[s][k]`: residue modulo `B + delta_s` of the `s`-color of
    /// every position whose first color is `k`.
    residues: Vec<Option<Vec<u32>>>,
    /// `colors[s][flat]`.
    colors: Vec<Vec<u32>>,
    row_offsets: Vec<usize>,
    r: usize,
    redundancy_positions: Vec<usize>,
    info_positions: Vec<usize>,
    inverse: Vec<BitVec>,
}

/// Default route for a shape.
pub fn default_route(shape: &ShapeSpec) -> Route {
    match shape {
        ShapeSpec::Box { sides } | ShapeSpec::BoxWeightLimited { sides, .. } => {
            if sides.iter().product::<usize>() % 2 == 1 {
                Route::OddBox
            } else {
                Route::EvenBox
            }
        }
        ShapeSpec::LeeSphere { dim, radius }
        | ShapeSpec::LeeSphereWeightLimited { dim, radius, .. } => match (*dim, *radius) {
            (1, _) | (_, 0) => Route::OddBox,
            (2, _) => Route::LeeTiling,
            (_, 1) => Route::LeeRadiusOne,
            _ => Route::LeeTransform,
        },
    }
}

fn colorings_for(shape: &ShapeSpec, route: Route) -> Result<ColoringSet, CodecError> {
    let unsupported =
        || CodecError::ShapeUnsupported(format!("route {route} cannot handle {shape}"));
    let d = shape.dim();
    let set = match (route, shape.box_sides(), shape.lee_radius()) {
        (Route::OddBox, Some(sides), _) => box_coloring_odd(sides).map_err(|_| unsupported())?,
        (Route::EvenBox, Some(sides), _) => box_coloring_even(sides)?,
        // A one-dimensional sphere is an interval; a radius-0 sphere is a cell.
        (Route::OddBox, None, Some(r)) if d == 1 => box_coloring_odd(&[2 * r + 1])?,
        (Route::OddBox, None, Some(0)) => box_coloring_odd(&vec![1; d])?,
        (Route::LeeTiling, None, Some(r)) if d == 2 && r >= 1 => lee_colorings(r)?,
        (Route::LeeRadiusOne, None, Some(1)) if d >= 2 => lee_radius1_colorings(d)?,
        (Route::LeeTransform, None, Some(r)) if d >= 2 => {
            let sides = transformed_box(d, r);
            let inner = if sides.iter().product::<usize>() % 2 == 1 {
                box_coloring_odd(&sides)?
            } else {
                box_coloring_even(&sides)?
            };
            transformed_colorings(d, r, inner)?
        }
        _ => return Err(unsupported()),
    };
    Ok(set.with_shape(shape.clone()))
}

/// The coloring set a route uses for `shape`, before it is fitted to an array.
pub fn route_colorings(shape: &ShapeSpec, route: Route) -> Result<ColoringSet, CodecError> {
    colorings_for(shape, route)
}

impl CodeAssembly {
    pub fn assemble(
        dims: &[usize],
        shape: &ShapeSpec,
        options: &AssembleOptions,
    ) -> Result<CodeAssembly, CodecError> {
        let d = dims.len();
        if d == 0 || d > MAX_DIM || dims.contains(&0) {
            return Err(CodecError::ShapeUnsupported(format!(
                "array dimensions {dims:?} (need 1..={MAX_DIM} positive sides)"
            )));
        }
        if shape.dim() != d {
            return Err(CodecError::ShapeUnsupported(format!(
                "shape {shape} has dimension {}, array has {d}",
                shape.dim()
            )));
        }
        let n = dims
            .iter()
            .try_fold(1usize, |acc, &x| acc.checked_mul(x))
            .filter(|&n| n <= MAX_POSITIONS);
        let n = n.ok_or_else(|| {
            CodecError::TooLarge(format!("{dims:?} exceeds {MAX_POSITIONS} positions"))
        })?;
        let route = options.route.unwrap_or_else(|| default_route(shape));
        let mut colorings = colorings_for(shape, route)?;

        let window = colorings.default_window();
        if !check_p1(&colorings, &window).pass() {
            return Err(CodecError::ColoringCheckFailed("p1".into()));
        }
        if !check_p2(&colorings, &window).pass() {
            return Err(CodecError::ColoringCheckFailed("p2".into()));
        }
        for e in check_p3(&colorings, &window).entries {
            if !e.pass {
                colorings.needs_corrector[e.s - 1] = true;
            }
        }
        let lengths = colorings.normalize(dims);

        let mut colors = vec![vec![0u32; n]; d];
        for (flat, idx) in grid(dims).enumerate() {
            let idx: Vec<i64> = idx.iter().map(|&x| x as i64).collect();
            for (s, c) in colors.iter_mut().enumerate() {
                c[flat] = colorings.colorings[s].color(&idx) as u32;
            }
        }

        let mut residues = vec![None; d];
        for s in 1..d {
            if colorings.needs_corrector[s] {
                continue;
            }
            let m = colorings.modulus(s) as u32;
            let mut table = vec![u32::MAX; lengths[0]];
            let mut consistent = true;
            for (&k, &c) in colors[0].iter().zip(&colors[s]) {
                let (k, rho) = (k as usize, c % m);
                if table[k] == u32::MAX {
                    table[k] = rho;
                } else if table[k] != rho {
                    consistent = false;
                    break;
                }
            }
            if consistent {
                residues[s] = Some(table);
            } else {
                colorings.needs_corrector[s] = true;
            }
        }

        let t = shape.max_weight();
        let mut components = Vec::with_capacity(d);
        let mut uses = Vec::with_capacity(d);
        for (s, &length) in lengths.iter().enumerate() {
            let window = colorings.modulus(s);
            let weight = t.filter(|&t| t < window);
            if s == 0 || colorings.needs_corrector[s] {
                let code = match weight {
                    Some(t) => {
                        search_limited_weight(window, t, Some(length), options.corrector_m.clone())?
                    }
                    None => search_corrector(window, length, options.corrector_m.clone())?,
                };
                components.push(code);
                uses.push(ComponentUse::Corrector);
            } else {
                components.push(search_locator(
                    window,
                    Some(length),
                    weight,
                    options.locator_m.clone(),
                )?);
                uses.push(ComponentUse::Locator);
            }
        }

        let mut row_offsets = Vec::with_capacity(d);
        let mut r = 0;
        for c in &components {
            row_offsets.push(r);
            r += c.redundancy();
        }

        let mut asm = CodeAssembly {
            dims: dims.to_vec(),
            shape: shape.clone(),
            route,
            options: options.clone(),
            colorings,
            lengths,
            components,
            uses,
            residues,
            colors,
            row_offsets,
            r,
            redundancy_positions: Vec::new(),
            info_positions: Vec::new(),
            inverse: Vec::new(),
        };
        asm.seat_redundancy()?;
        Ok(asm)
    }

    /// Picks redundancy positions greedily in color-lexicographic order and
    /// inverts the parity-check submatrix on them.
    fn seat_redundancy(&mut self) -> Result<(), CodecError> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (self.colors.iter().map(|c| c[p]).collect::<Vec<_>>(), p));
        let mut basis = EchelonBasis::default();
        let mut chosen = Vec::with_capacity(self.r);
        for p in order {
            if basis.len() == self.r {
                break;
            }
            if basis.insert(&self.h_column(p)) {
                chosen.push(p);
            }
        }
        if chosen.len() < self.r {
            return Err(CodecError::RankDeficient {
                rank: chosen.len(),
                r: self.r,
            });
        }
        let cols: Vec<BitVec> = chosen.iter().map(|&p| self.h_column(p)).collect();
        let rows: Vec<BitVec> = (0..self.r)
            .map(|i| BitVec::from_bools(&cols.iter().map(|c| c.get(i)).collect::<Vec<_>>()))
            .collect();
        self.inverse = invert(&rows).ok_or(CodecError::RankDeficient {
            rank: chosen.len(),
            r: self.r,
        })?;
        let mut is_red = vec![false; n];
        for &p in &chosen {
            is_red[p] = true;
        }
        self.info_positions = (0..n).filter(|&p| !is_red[p]).collect();
        self.redundancy_positions = chosen;
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn options(&self) -> &AssembleOptions {
        &self.options
    }

    pub fn colorings(&self) -> &ColoringSet {
        &self.colorings
    }

    pub fn components(&self) -> &[ComponentCode] {
        &self.components
    }

    pub fn component_uses(&self) -> &[ComponentUse] {
        &self.uses
    }

    /// Number of colors used by each coloring on the array.
    pub fn color_counts(&self) -> &[usize] {
        &self.lengths
    }

    /// Total redundancy `r`.
    pub fn redundancy(&self) -> usize {
        self.r
    }

    /// Number of array positions `N`.
    pub fn len(&self) -> usize {
        self.colors[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn info_len(&self) -> usize {
        self.info_positions.len()
    }

    pub fn redundancy_positions(&self) -> &[usize] {
        &self.redundancy_positions
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn color(&self, s: usize, flat: usize) -> usize {
        self.colors[s][flat] as usize
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        flatten(index, &self.dims)
    }

    pub fn index(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, &self.dims)
    }

    /// Column of `H` at a flat position.
    pub fn h_column(&self, flat: usize) -> BitVec {
        let mut v = BitVec::zeros(self.r);
        for (s, comp) in self.components.iter().enumerate() {
            let col = comp.column(self.colors[s][flat] as usize);
            for i in 0..comp.redundancy() {
                if (col >> i) & 1 == 1 {
                    v.set(self.row_offsets[s] + i, true);
                }
            }
        }
        v
    }

    /// Rows of `H`, each of length `N`.
    pub fn h_rows(&self) -> Vec<BitVec> {
        let mut rows = vec![BitVec::zeros(self.len()); self.r];
        for p in 0..self.len() {
            for i in self.h_column(p).ones() {
                rows[i].set(p, true);
            }
        }
        rows
    }

    /// Syndrome of the error set `positions`.
    pub fn syndrome_of(&self, positions: &[usize]) -> Syndrome {
        let parts = self
            .components
            .iter()
            .enumerate()
            .map(|(s, comp)| {
                positions.iter().fold(0u128, |acc, &p| {
                    acc ^ comp.column(self.colors[s][p] as usize)
                })
            })
            .collect();
        Syndrome { parts }
    }

    /// `s_s[k]` is the parity of the word bits of color `k` in coloring `s`.
    pub fn syndrome(&self, word: &NdWord) -> Syndrome {
        self.syndrome_of(&word.bits.ones().collect::<Vec<_>>())
    }

    pub fn syndrome_bits(&self, syndrome: &Syndrome) -> BitVec {
        let mut v = BitVec::zeros(self.r);
        for (s, comp) in self.components.iter().enumerate() {
            for i in 0..comp.redundancy() {
                if (syndrome.parts[s] >> i) & 1 == 1 {
                    v.set(self.row_offsets[s] + i, true);
                }
            }
        }
        v
    }

    pub fn encode(&self, info: &BitVec) -> Result<NdWord, CodecError> {
        if info.len() != self.info_len() {
            return Err(CodecError::LengthMismatch {
                expected: self.info_len(),
                got: info.len(),
            });
        }
        let mut word = NdWord::zeros(&self.dims);
        for (k, &p) in self.info_positions.iter().enumerate() {
            if info.get(k) {
                word.bits.set(p, true);
            }
        }
        let sigma = self.syndrome_bits(&self.syndrome(&word));
        for (k, &p) in self.redundancy_positions.iter().enumerate() {
            if self.inverse[k].dot(&sigma) {
                word.bits.set(p, true);
            }
        }
        debug_assert!(self.syndrome(&word).is_zero());
        Ok(word)
    }

    /// Information bits of a codeword.
    pub fn extract_info(&self, word: &NdWord) -> BitVec {
        BitVec::from_bools(
            &self
                .info_positions
                .iter()
                .map(|&p| word.bits.get(p))
                .collect::<Vec<_>>(),
        )
    }

    pub fn decode(&self, word: &NdWord) -> Result<Decoded, CodecError> {
        if word.dims != self.dims {
            return Err(CodecError::LengthMismatch {
                expected: self.len(),
                got: word.len(),
            });
        }
        match self.decode_syndrome(&self.syndrome(word))? {
            None => Ok(Decoded {
                word: word.clone(),
                cluster: None,
            }),
            Some(positions) => {
                let mut fixed = word.clone();
                fixed.flip_all(&positions);
                if !self.syndrome(&fixed).is_zero() {
                    return Err(CodecError::Undecodable);
                }
                let cluster = Cluster {
                    positions: positions.iter().map(|&p| self.index(p)).collect(),
                    shape: self.shape.clone(),
                };
                Ok(Decoded {
                    word: fixed,
                    cluster: Some(cluster),
                })
            }
        }
    }

    /// Structured decoding of a syndrome into sorted flat error positions.
    pub fn decode_syndrome(&self, syndrome: &Syndrome) -> Result<Option<Vec<usize>>, CodecError> {
        if syndrome.is_zero() {
            return Ok(None);
        }
        let d = self.dims.len();
        let first = burst_decode(&self.components[0], syndrome.parts[0])
            .map_err(|_| CodecError::Undecodable)?
            .ok_or(CodecError::Undecodable)?;
        let k_colors: Vec<usize> = first.positions(self.lengths[0], false);
        if k_colors.iter().any(|&k| k >= self.lengths[0]) {
            return Err(CodecError::Undecodable);
        }
        // fixed[s][e]: s-color of error e, when determined without search.
        let mut fixed: Vec<Option<Vec<usize>>> = vec![None; d];
        let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); d];
        fixed[0] = Some(k_colors.clone());
        for s in 1..d {
            match self.uses[s] {
                ComponentUse::Locator => {
                    fixed[s] = Some(self.locate_colors(s, &k_colors, syndrome.parts[s])?)
                }
                ComponentUse::Corrector => {
                    let burst = burst_decode(&self.components[s], syndrome.parts[s])
                        .map_err(|_| CodecError::Undecodable)?
                        .ok_or(CodecError::Undecodable)?;
                    let colors = burst.positions(self.lengths[s], false);
                    if colors.len() != k_colors.len() {
                        return Err(CodecError::Undecodable);
                    }
                    candidates[s] = colors;
                }
            }
        }
        let mut used: Vec<Vec<bool>> = candidates.iter().map(|c| vec![false; c.len()]).collect();
        let mut positions = Vec::with_capacity(k_colors.len());
        if self.pair_errors(0, &fixed, &candidates, &mut used, &mut positions, syndrome) {
            positions.sort_unstable();
            Ok(Some(positions))
        } else {
            Err(CodecError::Undecodable)
        }
    }

    /// Colors in coloring `s` of the errors whose first colors are `k_colors`.
    fn locate_colors(
        &self,
        s: usize,
        k_colors: &[usize],
        part: u128,
    ) -> Result<Vec<usize>, CodecError> {
        let table = self.residues[s].as_ref().ok_or(CodecError::Undecodable)?;
        let m = self.colorings.modulus(s);
        let mut res_set = 0u64;
        let mut rho = Vec::with_capacity(k_colors.len());
        for &k in k_colors {
            let r = table[k];
            if r == u32::MAX || (res_set >> r) & 1 == 1 {
                return Err(CodecError::Undecodable);
            }
            res_set |= 1 << r;
            rho.push(r as usize);
        }
        let code = &self.components[s];
        let mut start = None;
        for first in rho.iter().copied() {
            match locate_burst(code, part, rotated_pattern(res_set, first, m), first) {
                Ok(f) if start.is_none() => start = Some(f),
                Ok(_) | Err(ComponentError::Ambiguous) => return Err(CodecError::Undecodable),
                Err(_) => {}
            }
        }
        let f = start.ok_or(CodecError::Undecodable)?;
        Ok(rho.iter().map(|&r| f + (r + m - f % m) % m).collect())
    }

    /// Assigns colors from corrector-decoded colorings to the errors, in
    /// order, until every error has a position and the syndrome matches.
    fn pair_errors(
        &self,
        e: usize,
        fixed: &[Option<Vec<usize>>],
        candidates: &[Vec<usize>],
        used: &mut [Vec<bool>],
        positions: &mut Vec<usize>,
        syndrome: &Syndrome,
    ) -> bool {
        let count = fixed[0].as_ref().map_or(0, |k| k.len());
        if e == count {
            return self.syndrome_of(positions) == *syndrome;
        }
        let d = self.dims.len();
        let open: Vec<usize> = (0..d).filter(|&s| fixed[s].is_none()).collect();
        let mut tuple = vec![0i64; d];
        for s in 0..d {
            if let Some(c) = &fixed[s] {
                tuple[s] = c[e] as i64;
            }
        }
        self.assign_open(
            e, 0, &open, &mut tuple, fixed, candidates, used, positions, syndrome,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_open(
        &self,
        e: usize,
        k: usize,
        open: &[usize],
        tuple: &mut Vec<i64>,
        fixed: &[Option<Vec<usize>>],
        candidates: &[Vec<usize>],
        used: &mut [Vec<bool>],
        positions: &mut Vec<usize>,
        syndrome: &Syndrome,
    ) -> bool {
        if k == open.len() {
            let Ok(idx) = self.colorings.locate(tuple, &self.dims) else {
                return false;
            };
            let flat = self.flat(&idx);
            if positions.contains(&flat) {
                return false;
            }
            positions.push(flat);
            if self.pair_errors(e + 1, fixed, candidates, used, positions, syndrome) {
                return true;
            }
            positions.pop();
            return false;
        }
        let s = open[k];
        for j in 0..candidates[s].len() {
            if used[s][j] {
                continue;
            }
            used[s][j] = true;
            tuple[s] = candidates[s][j] as i64;
            if self.assign_open(
                e,
                k + 1,
                open,
                tuple,
                fixed,
                candidates,
                used,
                positions,
                syndrome,
            ) {
                return true;
            }
            used[s][j] = false;
        }
        false
    }
}

/// True if the positions form a cluster of the given shape: they fit one
/// placement, and respect the weight limit.
pub fn fits_shape(positions: &[Vec<usize>], shape: &ShapeSpec) -> bool {
    if positions.is_empty() || shape.max_weight().is_some_and(|t| positions.len() > t) {
        return positions.is_empty();
    }
    let d = shape.dim();
    if positions.iter().any(|p| p.len() != d) {
        return false;
    }
    match shape.base() {
        ShapeSpec::Box { sides } => (0..d).all(|k| {
            let lo = positions.iter().map(|p| p[k]).min().unwrap_or(0);
            let hi = positions.iter().map(|p| p[k]).max().unwrap_or(0);
            hi - lo < sides[k]
        }),
        ShapeSpec::LeeSphere { radius, .. } => {
            let p0: Vec<i64> = positions[0].iter().map(|&x| x as i64).collect();
            crate::lee::lee_sphere_positions(d, radius, &p0)
                .iter()
                .any(|c| {
                    positions.iter().all(|p| {
                        let p: Vec<i64> = p.iter().map(|&x| x as i64).collect();
                        crate::lee::lee_distance(&p, c) <= radius as i64
                    })
                })
        }
        _ => unreachable!("base shapes are boxes or spheres"),
    }
}

// ---------------------------------------------------------------------------
// Bounds

#[derive(Debug, Clone, PartialEq)]
pub struct Ceiling {
    pub name: &'static str,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub r: u64,
    pub n: u64,
    pub log2_n: u64,
    pub excess: i64,
    pub volume: u64,
    pub reiger_floor: u64,
    pub ceilings: Vec<Ceiling>,
    pub lower_excess: Option<f64>,
    pub component_redundancy: Vec<usize>,
}

/// Smallest `k` with `2^k >= x`.
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Lower bound on the excess redundancy of codes for arbitrary clusters of size `b`.
pub fn arbitrary_lower_excess(b: usize) -> f64 {
    b as f64 * 3.981037f64.log2()
}

impl BoundsReport {
    pub fn reiger_pass(&self) -> bool {
        self.r >= self.reiger_floor
    }

    pub fn ceiling_pass(&self, c: &Ceiling) -> bool {
        self.r <= c.value + CEILING_SLACK
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("r = {}", self.r),
            format!("N = {}", self.n),
            format!("ceil(log2 N) = {}", self.log2_n),
            format!("excess = {}", self.excess),
            format!("components = {}", join(&self.component_redundancy, " + ")),
            format!(
                "reiger floor 2B = {} ({})",
                self.reiger_floor,
                if self.reiger_pass() { "pass" } else { "fail" }
            ),
        ];
        if self.ceilings.is_empty() {
            out.push("ceiling: none for this route".into());
        }
        for c in &self.ceilings {
            out.push(format!(
                "ceiling {} = {} (slack {}: {})",
                c.name,
                c.value,
                CEILING_SLACK,
                if self.ceiling_pass(c) { "pass" } else { "fail" }
            ));
        }
        if let Some(l) = self.lower_excess {
            out.push(format!("lower excess b*log2(3.981037) = {l:.6}"));
        }
        out
    }
}

impl CodeAssembly {
    pub fn bounds_report(&self) -> BoundsReport {
        let n = self.len() as u64;
        let r = self.r as u64;
        let log2_n = ceil_log2(n);
        let volume = self.shape.volume() as u64;
        let d = self.dims.len();
        let mut ceilings = Vec::new();
        let mut lower_excess = None;
        match (&self.shape, self.route) {
            (ShapeSpec::Box { sides }, Route::OddBox) if d >= 2 => {
                let b1 = sides[0] as u64;
                if d == 2 {
                    ceilings.push(Ceiling {
                        name: "odd-box-2d",
                        value: log2_n + volume + ceil_log2(b1),
                    });
                }
                let power = volume
                    .checked_pow(d as u32 - 2)
                    .and_then(|p| p.checked_mul(b1));
                if let Some(x) = power {
                    ceilings.push(Ceiling {
                        name: "odd-box-d-dim",
                        value: log2_n + volume + ceil_log2(x) + 1,
                    });
                }
            }
            (ShapeSpec::LeeSphere { radius, .. }, Route::LeeTiling) => {
                let side = 2 * *radius as u64 + 1;
                ceilings.push(Ceiling {
                    name: "lee-tiling",
                    value: log2_n + volume + ceil_log2(side * side) + 2,
                });
            }
            (ShapeSpec::BoxWeightLimited { sides, max_weight }, _) if d == 2 => {
                let _ = sides;
                ceilings.push(Ceiling {
                    name: "box-limited-2d",
                    value: log2_n + (*max_weight as u64 + 1) * ceil_log2(volume) + 3,
                });
            }
            (ShapeSpec::BoxWeightLimited { sides, max_weight }, _) if d == 1 => {
                let w = crate::component::limited_weight_window(sides[0]) as u64;
                ceilings.push(Ceiling {
                    name: "limited-weight-1d",
                    value: ceil_log2(n + 1) + *max_weight as u64 * ceil_log2(w),
                });
            }
            _ => {}
        }
        if let Some(b) = self.shape.arbitrary_size() {
            let b = b as u64;
            ceilings.push(Ceiling {
                name: "arbitrary-upper",
                value: log2_n + (b + 1) * ceil_log2(b * b) + 3,
            });
            lower_excess = Some(arbitrary_lower_excess(b as usize));
        }
        BoundsReport {
            r,
            n,
            log2_n,
            excess: r as i64 - log2_n as i64,
            volume,
            reiger_floor: 2 * volume,
            ceilings,
            lower_excess,
            component_redundancy: self.components.iter().map(|c| c.redundancy()).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Assembly file

fn range_text(r: &RangeInclusive<usize>) -> String {
    format!("{}..{}", r.start(), r.end())
}

fn parse_range(s: &str) -> Option<RangeInclusive<usize>> {
    let (a, b) = s.split_once("..")?;
    Some(a.parse().ok()?..=b.parse().ok()?)
}

impl CodeAssembly {
    pub fn to_text(&self) -> String {
        let mut out = String::from("cluster-codes assembly\n");
        out.push_str(&format!("dims: {}\n", join(&self.dims, " ")));
        out.push_str(&format!("shape: {}\n", self.shape));
        out.push_str(&format!("route: {}\n", self.route));
        out.push_str(&format!(
            "options: corrector-m={} locator-m={} route={}\n",
            range_text(&self.options.corrector_m),
            range_text(&self.options.locator_m),
            self.options.route.map_or("auto", |r| r.name())
        ));
        out.push_str(&format!("r: {}\n", self.r));
        out.push_str(&format!("N: {}\n", self.len()));
        for line in self.colorings.to_text(None).lines() {
            out.push_str(&format!("colorings.{line}\n"));
        }
        for (s, c) in self.components.iter().enumerate() {
            let usage = match self.uses[s] {
                ComponentUse::Corrector => "corrector",
                ComponentUse::Locator => "locator",
            };
            out.push_str(&format!(
                "component {}: use={usage} {}\n",
                s + 1,
                c.spec_line()
            ));
        }
        out.push_str(&format!(
            "redundancy: {}\n",
            join(&self.redundancy_positions, " ")
        ));
        out.push_str("H:\n");
        for row in self.h_rows() {
            out.push_str(&row.to_hex());
            out.push('\n');
        }
        out
    }

    /// Rebuilds the assembly from the recorded parameters and checks that it
    /// reproduces the file exactly.
    pub fn from_text(text: &str) -> Result<CodeAssembly, CodecError> {
        let fmt_err = |m: &str| CodecError::Format(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some("cluster-codes assembly") {
            return Err(fmt_err("missing assembly header"));
        }
        let mut fields: FxHashMap<&str, &str> = FxHashMap::default();
        for line in lines.take_while(|l| *l != "H:") {
            if let Some((k, v)) = line.split_once(": ") {
                fields.entry(k).or_insert(v);
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| fmt_err(&format!("missing {k}")))
        };
        let dims: Vec<usize> = get("dims")?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| fmt_err("dims")))
            .collect::<Result<_, _>>()?;
        let shape = ShapeSpec::parse(get("shape")?, Some(dims.len()))
            .map_err(|e| fmt_err(&e.to_string()))?;
        let mut options = AssembleOptions::default();
        for item in get("options")?.split_whitespace() {
            let (k, v) = item.split_once('=').ok_or_else(|| fmt_err("options"))?;
            match k {
                "corrector-m" => {
                    options.corrector_m = parse_range(v).ok_or_else(|| fmt_err("corrector-m"))?
                }
                "locator-m" => {
                    options.locator_m = parse_range(v).ok_or_else(|| fmt_err("locator-m"))?
                }
                "route" if v == "auto" => options.route = None,
                "route" => options.route = Some(v.parse()?),
                _ => return Err(fmt_err(&format!("unknown option {k}"))),
            }
        }
        let rebuilt = CodeAssembly::assemble(&dims, &shape, &options)?;
        let expected = rebuilt.to_text();
        if let Some((k, (a, b))) = expected
            .lines()
            .zip(text.lines())
            .enumerate()
            .find(|(_, (a, b))| a != b)
        {
            return Err(CodecError::Mismatch(format!(
                "line {}: expected {a:?}, found {b:?}",
                k + 1
            )));
        }
        if expected.lines().count() != text.lines().count() {
            return Err(CodecError::Mismatch("line count differs".into()));
        }
        Ok(rebuilt)
    }
}

/// Flat positions of a signed index list, or `None` if any lies outside.
pub fn flat_positions(indices: &[Vec<i64>], dims: &[usize]) -> Option<Vec<usize>> {
    indices.iter().map(|i| flat_if_inside(i, dims)).collect()
}
