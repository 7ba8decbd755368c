//! Brute-force verification: cluster enumeration, syndrome distinctness,
//! decode round trips, decoder equivalence and polyomino counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::bits::BitVec;
use crate::codec::{CodeAssembly, NdWord};
use crate::lee::lee_distance;
use crate::report::CheckReport;
use crate::shape::{flat_if_inside, unflatten, ShapeSpec};

/// Largest number of clusters an enumeration may produce.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration of about {estimate} clusters exceeds the budget")]
    BudgetExceeded { estimate: u128 },
    #[error("shape dimension {shape} does not match array dimension {array}")]
    DimensionMismatch { shape: usize, array: usize },
    #[error("polyomino size {0} is out of range")]
    PolyominoSize(usize),
}

/// Every admissible cluster of a shape on an array, each exactly once.
///
/// A box cluster is emitted from the placement whose anchor in axis `j` is
/// `min(min_j S, n_j - b_j)`. A sphere cluster is emitted from the
/// lexicographically smallest center whose sphere covers it.
#[derive(Debug, Clone)]
pub struct ClusterEnumeration {
    shape: ShapeSpec,
    dims: Vec<usize>,
    max_weight: usize,
    anchors: Vec<Vec<i64>>,
    offsets: Vec<Vec<i64>>,
}

fn binomial_sum(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for j in 1..=k.min(n) {
        c = c * (n - j + 1) as u128 / j as u128;
        total += c;
    }
    total
}

impl ClusterEnumeration {
    pub fn new(shape: &ShapeSpec, dims: &[usize]) -> Result<Self, OracleError> {
        if shape.dim() != dims.len() {
            return Err(OracleError::DimensionMismatch {
                shape: shape.dim(),
                array: dims.len(),
            });
        }
        let offsets = shape.cells();
        let anchor_ranges: Vec<(i64, i64)> = match shape.lee_radius() {
            Some(r) => dims
                .iter()
                .map(|&n| (-(r as i64), (n + r) as i64))
                .collect(),
            None => dims
                .iter()
                .zip(shape.box_sides().unwrap())
                .map(|(&n, &b)| (0, n.saturating_sub(b) as i64 + 1))
                .collect(),
        };
        let mut anchors = vec![vec![]];
        for &(lo, hi) in &anchor_ranges {
            anchors = anchors
                .into_iter()
                .flat_map(|a: Vec<i64>| (lo..hi).map(move |x| [a.clone(), vec![x]].concat()))
                .collect();
        }
        let max_weight = shape.cluster_weight_bound();
        let estimate = anchors.len() as u128 * binomial_sum(offsets.len(), max_weight);
        if estimate > ENUMERATION_BUDGET {
            return Err(OracleError::BudgetExceeded { estimate });
        }
        Ok(ClusterEnumeration {
            shape: shape.clone(),
            dims: dims.to_vec(),
            max_weight,
            anchors,
            offsets,
        })
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn placements(&self) -> usize {
        self.anchors.len()
    }

    /// Calls `f` with each cluster of placement `k`, as sorted flat positions.
    pub fn for_each_in_placement(&self, k: usize, mut f: impl FnMut(&[usize])) {
        let anchor = &self.anchors[k];
        let cells: Vec<(usize, Vec<i64>)> = self
            .offsets
            .iter()
            .filter_map(|o| {
                let p: Vec<i64> = o.iter().zip(anchor).map(|(a, b)| a + b).collect();
                flat_if_inside(&p, &self.dims).map(|flat| (flat, p))
            })
            .collect();
        let mut chosen: Vec<usize> = Vec::with_capacity(self.max_weight);
        self.subsets(anchor, &cells, 0, &mut chosen, &mut f);
    }

    fn subsets(
        &self,
        anchor: &[i64],
        cells: &[(usize, Vec<i64>)],
        from: usize,
        chosen: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        for j in from..cells.len() {
            chosen.push(j);
            if self.is_canonical(anchor, cells, chosen) {
                let flats: Vec<usize> = chosen.iter().map(|&c| cells[c].0).collect();
                f(&flats);
            }
            if chosen.len() < self.max_weight {
                self.subsets(anchor, cells, j + 1, chosen, f);
            }
            chosen.pop();
        }
    }

    fn is_canonical(&self, anchor: &[i64], cells: &[(usize, Vec<i64>)], chosen: &[usize]) -> bool {
        match (self.shape.box_sides(), self.shape.lee_radius()) {
            (Some(sides), _) => (0..self.dims.len()).all(|j| {
                let lo = chosen.iter().map(|&c| cells[c].1[j]).min().unwrap();
                let last = self.dims[j].saturating_sub(sides[j]) as i64;
                anchor[j] == lo.min(last)
            }),
            (None, Some(r)) => {
                let r = r as i64;
                let first = &cells[chosen[0]].1;
                // Any smaller covering center lies within r of the first cell.
                let covers = |c: &[i64]| chosen.iter().all(|&k| lee_distance(&cells[k].1, c) <= r);
                !crate::lee::lee_sphere_positions(first.len(), r as usize, first)
                    .iter()
                    .any(|c| c.as_slice() < anchor && covers(c))
            }
            _ => unreachable!(),
        }
    }

    /// Calls `f` with every cluster, in placement order.
    pub fn for_each(&self, mut f: impl FnMut(&[usize])) {
        for k in 0..self.placements() {
            self.for_each_in_placement(k, &mut f);
        }
    }

    pub fn count(&self) -> u64 {
        (0..self.placements())
            .into_par_iter()
            .map(|k| {
                let mut n = 0u64;
                self.for_each_in_placement(k, |_| n += 1);
                n
            })
            .sum()
    }

    /// Maps each placement's clusters in parallel and returns the results in
    /// placement order.
    pub fn par_map<T: Send>(&self, f: impl Fn(&[usize]) -> T + Sync) -> Vec<Vec<T>> {
        (0..self.placements())
            .into_par_iter()
            .map(|k| {
                let mut out = Vec::new();
                self.for_each_in_placement(k, |c| out.push(f(c)));
                out
            })
            .collect()
    }
}

/// All nonempty position sets of the array that are admissible clusters,
/// found by testing every subset. Only for tiny arrays.
pub fn brute_force_clusters(shape: &ShapeSpec, dims: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = dims.iter().product();
    assert!(n <= 20, "brute force is limited to 20 positions");
    (1u32..1 << n)
        .filter_map(|mask| {
            let set: Vec<usize> = (0..n).filter(|&p| (mask >> p) & 1 == 1).collect();
            let idx: Vec<Vec<usize>> = set.iter().map(|&p| unflatten(p, dims)).collect();
            crate::codec::fits_shape(&idx, shape).then_some(set)
        })
        .collect()
}

fn witness(cluster: &[usize], dims: &[usize]) -> String {
    cluster
        .iter()
        .map(|&p| {
            unflatten(p, dims)
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Syndrome of a set of columns of `H`.
fn column_sum(columns: &[BitVec], cluster: &[usize]) -> BitVec {
    let mut s = BitVec::zeros(columns.first().map_or(0, |c| c.len()));
    for &p in cluster {
        s.xor_assign(&columns[p]);
    }
    s
}

/// Checks that every enumerated cluster has a distinct nonzero syndrome
/// under the parity-check matrix given by its columns.
pub fn verify_distinct_syndromes(
    name: &str,
    columns: &[BitVec],
    clusters: &ClusterEnumeration,
) -> CheckReport {
    let per_placement = clusters.par_map(|c| (column_sum(columns, c).words().to_vec(), c.to_vec()));
    let mut seen: FxHashMap<Vec<u64>, Vec<usize>> = FxHashMap::default();
    let mut cases = 0u64;
    for (syn, cluster) in per_placement.into_iter().flatten() {
        cases += 1;
        if syn.iter().all(|&w| w == 0) {
            return CheckReport::new(name, false, cases)
                .with_witness(format!("zero:{}", witness(&cluster, clusters.dims())));
        }
        if let Some(other) = seen.get(&syn) {
            let w = format!(
                "{}|{}",
                witness(other, clusters.dims()),
                witness(&cluster, clusters.dims())
            );
            return CheckReport::new(name, false, cases).with_witness(w);
        }
        seen.insert(syn, cluster);
    }
    CheckReport::new(name, true, cases)
}

/// Test codewords: the zero word and one random codeword.
pub fn test_codewords(a: &CodeAssembly, seed: u64) -> Vec<NdWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let info = BitVec::from_bools(
        &(0..a.info_len())
            .map(|_| rng.gen::<bool>())
            .collect::<Vec<_>>(),
    );
    vec![
        NdWord::zeros(a.dims()),
        a.encode(&info).expect("info length matches"),
    ]
}

/// Decodes every test codeword plus every enumerated cluster and checks that
/// the codeword and the cluster come back.
pub fn verify_roundtrip(
    name: &str,
    a: &CodeAssembly,
    clusters: &ClusterEnumeration,
    seed: u64,
) -> CheckReport {
    let words = test_codewords(a, seed);
    let results = clusters.par_map(|cluster| {
        let expected: Vec<Vec<usize>> = cluster.iter().map(|&p| a.index(p)).collect();
        words.iter().all(|c| {
            let mut w = c.clone();
            w.flip_all(cluster);
            match a.decode(&w) {
                Ok(d) => d.word == *c && d.cluster.is_some_and(|k| k.positions == expected),
                Err(_) => false,
            }
        })
    });
    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut first = None;
    for (k, per) in results.iter().enumerate() {
        for (j, ok) in per.iter().enumerate() {
            cases += words.len() as u64;
            if !ok {
                failures += 1;
                first.get_or_insert((k, j));
            }
        }
    }
    let mut rep = CheckReport::new(name, failures == 0, cases);
    if let Some((k, j)) = first {
        let mut w = None;
        let mut i = 0;
        clusters.for_each_in_placement(k, |c| {
            if i == j {
                w = Some(witness(c, clusters.dims()));
            }
            i += 1;
        });
        rep = rep.with_witness(format!(
            "failures={failures},first={}",
            w.unwrap_or_default()
        ));
    }
    rep
}

/// Syndrome table built from the enumeration: syndrome bits to cluster.
pub fn syndrome_table(
    a: &CodeAssembly,
    clusters: &ClusterEnumeration,
) -> FxHashMap<BitVec, Vec<usize>> {
    let columns: Vec<BitVec> = (0..a.len()).map(|p| a.h_column(p)).collect();
    let mut table = FxHashMap::default();
    clusters.for_each(|c| {
        table
            .entry(column_sum(&columns, c))
            .or_insert_with(|| c.to_vec());
    });
    table
}

/// Checks that structured decoding agrees with table lookup on every
/// syndrome of the table.
pub fn verify_decoder_equivalence(
    name: &str,
    a: &CodeAssembly,
    clusters: &ClusterEnumeration,
) -> CheckReport {
    let table = syndrome_table(a, clusters);
    let entries: Vec<(&BitVec, &Vec<usize>)> = table.iter().collect();
    let mismatches: Vec<&Vec<usize>> = entries
        .par_iter()
        .filter(|(_, cluster)| {
            let syndrome = a.syndrome_of(cluster);
            a.decode_syndrome(&syndrome).ok().flatten().as_ref() != Some(*cluster)
        })
        .map(|(_, c)| *c)
        .collect();
    let mut rep = CheckReport::new(name, mismatches.is_empty(), entries.len() as u64);
    if let Some(c) = mismatches.iter().min() {
        rep = rep.with_witness(format!(
            "mismatches={},first={}",
            mismatches.len(),
            witness(c, clusters.dims())
        ));
    }
    rep
}

/// Randomly linear-combines pairs of random codewords and checks that the
/// sum is a codeword.
pub fn verify_linearity(name: &str, a: &CodeAssembly, pairs: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_info = || {
        BitVec::from_bools(
            &(0..a.info_len())
                .map(|_| rng.gen::<bool>())
                .collect::<Vec<_>>(),
        )
    };
    let mut failures = 0;
    for _ in 0..pairs {
        let mut c = a.encode(&random_info()).unwrap();
        let d = a.encode(&random_info()).unwrap();
        c.bits.xor_assign(&d.bits);
        if !a.syndrome(&c).is_zero() {
            failures += 1;
        }
    }
    CheckReport::new(name, failures == 0, pairs as u64)
}

/// A random admissible cluster: a random placement and a random nonempty
/// subset of its in-array cells within the weight limit.
pub fn random_cluster(shape: &ShapeSpec, dims: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let offsets = shape.cells();
    let anchor: Vec<i64> = match shape.box_sides() {
        Some(sides) => dims
            .iter()
            .zip(sides)
            .map(|(&n, &b)| rng.gen_range(0..=n.saturating_sub(b)) as i64)
            .collect(),
        None => dims.iter().map(|&n| rng.gen_range(0..n) as i64).collect(),
    };
    let mut cells: Vec<usize> = offsets
        .iter()
        .filter_map(|o| {
            flat_if_inside(
                &o.iter()
                    .zip(&anchor)
                    .map(|(a, b)| a + b)
                    .collect::<Vec<_>>(),
                dims,
            )
        })
        .collect();
    let weight = rng.gen_range(1..=shape.cluster_weight_bound().min(cells.len()));
    let mut out = Vec::with_capacity(weight);
    for _ in 0..weight {
        out.push(cells.swap_remove(rng.gen_range(0..cells.len())));
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// Polyominoes

/// Fixed polyominoes with `b` cells, by Redelmeier's untried-set recursion.
pub fn count_fixed_polyominoes(b: usize) -> Result<u64, OracleError> {
    if b == 0 || b > 12 {
        return Err(OracleError::PolyominoSize(b));
    }
    // Cells (x, y) with y > 0, or y == 0 and x >= 0, so the origin is the
    // lowest-then-leftmost cell.
    fn allowed(c: (i32, i32)) -> bool {
        c.1 > 0 || (c.1 == 0 && c.0 >= 0)
    }
    fn neighbors(c: (i32, i32)) -> [(i32, i32); 4] {
        [
            (c.0 + 1, c.1),
            (c.0 - 1, c.1),
            (c.0, c.1 + 1),
            (c.0, c.1 - 1),
        ]
    }
    fn rec(
        b: usize,
        size: usize,
        untried: &mut Vec<(i32, i32)>,
        seen: &mut FxHashSet<(i32, i32)>,
        poly: &mut Vec<(i32, i32)>,
        count: &mut u64,
    ) {
        while let Some(cell) = untried.pop() {
            poly.push(cell);
            *count += (size + 1 == b) as u64;
            if size + 1 < b {
                let mut next = untried.clone();
                let mut added = Vec::new();
                for nb in neighbors(cell) {
                    let adjacent_to_poly = poly[..poly.len() - 1]
                        .iter()
                        .any(|&p| neighbors(p).contains(&nb));
                    if allowed(nb)
                        && !seen.contains(&nb)
                        && !adjacent_to_poly
                        && !poly.contains(&nb)
                    {
                        seen.insert(nb);
                        added.push(nb);
                        next.push(nb);
                    }
                }
                rec(b, size + 1, &mut next, seen, poly, count);
                for nb in added {
                    seen.remove(&nb);
                }
            }
            poly.pop();
        }
    }
    let mut seen = FxHashSet::default();
    seen.insert((0, 0));
    let mut count = 0;
    rec(
        b,
        0,
        &mut vec![(0, 0)],
        &mut seen,
        &mut Vec::new(),
        &mut count,
    );
    Ok(count)
}

fn normalize(cells: &mut [(i32, i32)]) {
    let mx = cells.iter().map(|c| c.0).min().unwrap();
    let my = cells.iter().map(|c| c.1).min().unwrap();
    for c in cells.iter_mut() {
        *c = (c.0 - mx, c.1 - my);
    }
    cells.sort_unstable();
}

/// Fixed polyominoes counted by growing every translation class one cell at
/// a time and deduplicating.
pub fn count_fixed_polyominoes_by_growth(b: usize) -> u64 {
    let mut level: FxHashSet<Vec<(i32, i32)>> = FxHashSet::default();
    level.insert(vec![(0, 0)]);
    for _ in 1..b {
        let mut next = FxHashSet::default();
        for poly in &level {
            for &(x, y) in poly {
                for nb in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                    if !poly.contains(&nb) {
                        let mut grown = poly.clone();
                        grown.push(nb);
                        normalize(&mut grown);
                        next.insert(grown);
                    }
                }
            }
        }
        level = next;
    }
    level.len() as u64
}

/// Translation classes of sets of exactly `b` cells of Z^2 that fit in a Lee
/// sphere of radius `floor(b/2)`: the patterns admitted as arbitrary
/// clusters of size `b`, connected or not.
pub fn count_adopted_patterns(b: usize) -> Result<u64, OracleError> {
    let r = (b / 2) as i64;
    let sphere: Vec<(i32, i32)> = crate::lee::lee_sphere_offsets(2, r as usize)
        .iter()
        .map(|o| (o[0] as i32, o[1] as i32))
        .collect();
    let estimate = binomial_sum(sphere.len(), b);
    if b == 0 || estimate > ENUMERATION_BUDGET / 10 {
        return Err(OracleError::PolyominoSize(b));
    }
    let mut classes = FxHashSet::default();
    let mut chosen = Vec::with_capacity(b);
    fn rec(
        sphere: &[(i32, i32)],
        from: usize,
        b: usize,
        chosen: &mut Vec<(i32, i32)>,
        classes: &mut FxHashSet<Vec<(i32, i32)>>,
    ) {
        if chosen.len() == b {
            let mut c = chosen.clone();
            normalize(&mut c);
            classes.insert(c);
            return;
        }
        for j in from..sphere.len() {
            chosen.push(sphere[j]);
            rec(sphere, j + 1, b, chosen, classes);
            chosen.pop();
        }
    }
    rec(&sphere, 0, b, &mut chosen, &mut classes);
    Ok(classes.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_enumeration_matches_brute_force() {
        for (shape, dims) in [
            (ShapeSpec::Box { sides: vec![2, 2] }, vec![4, 4]),
            (ShapeSpec::Box { sides: vec![3, 2] }, vec![4, 4]),
            (
                ShapeSpec::BoxWeightLimited {
                    sides: vec![2, 3],
                    max_weight: 2,
                },
                vec![4, 4],
            ),
            (ShapeSpec::LeeSphere { dim: 2, radius: 1 }, vec![4, 4]),
            (ShapeSpec::arbitrary(2, 3), vec![4, 4]),
            (ShapeSpec::Box { sides: vec![5] }, vec![3]),
        ] {
            let e = ClusterEnumeration::new(&shape, &dims).unwrap();
            let mut got = Vec::new();
            e.for_each(|c| got.push(c.to_vec()));
            let mut expected = brute_force_clusters(&shape, &dims);
            got.sort();
            expected.sort();
            assert_eq!(got, expected, "{shape} on {dims:?}");
            assert_eq!(e.count(), got.len() as u64);
        }
    }

    #[test]
    fn weight_one_bursts() {
        let e = ClusterEnumeration::new(
            &ShapeSpec::BoxWeightLimited {
                sides: vec![3],
                max_weight: 1,
            },
            &[8],
        )
        .unwrap();
        assert_eq!(e.count(), 8);
    }

    #[test]
    fn budget() {
        let e = ClusterEnumeration::new(&ShapeSpec::Box { sides: vec![6, 6] }, &[100, 100]);
        assert!(matches!(e, Err(OracleError::BudgetExceeded { .. })));
    }

    #[test]
    fn polyomino_counts() {
        let known = [1u64, 2, 6, 19, 63, 216, 760, 2725];
        for (b, &k) in (1..).zip(&known) {
            assert_eq!(count_fixed_polyominoes(b).unwrap(), k);
            assert_eq!(count_fixed_polyominoes_by_growth(b), k);
        }
    }

    #[test]
    fn adopted_patterns_small() {
        assert_eq!(count_adopted_patterns(1).unwrap(), 1);
        // Differences (0,1), (1,0), (1,1), (1,-1), (0,2), (2,0).
        assert_eq!(count_adopted_patterns(2).unwrap(), 6);
    }

    #[test]
    fn zero_column_fails() {
        let cols = vec![
            BitVec::from_bools(&[true, false]),
            BitVec::zeros(2),
            BitVec::from_bools(&[false, true]),
        ];
        let e = ClusterEnumeration::new(
            &ShapeSpec::BoxWeightLimited {
                sides: vec![1],
                max_weight: 1,
            },
            &[3],
        )
        .unwrap();
        let rep = verify_distinct_syndromes("z", &cols, &e);
        assert!(!rep.pass);
        assert!(rep.witness.unwrap().starts_with("zero"));
    }
}
