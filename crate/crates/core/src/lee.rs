//! Lee spheres and the transformation that maps them into small boxes.

use crate::report::CheckReport;

/// `sum_{j=0}^{min(D,R)} 2^j C(D,j) C(R,j)`.
pub fn lee_sphere_size(dim: usize, radius: usize) -> u64 {
    let c = |n: usize, k: usize| crate::component::binomial(n as u64, k as u64);
    (0..=dim.min(radius))
        .map(|j| (1u64 << j) * c(dim, j) * c(radius, j))
        .sum()
}

/// Offsets `t` with `sum |t_l| <= R`, in lexicographic order.
pub fn lee_sphere_offsets(dim: usize, radius: usize) -> Vec<Vec<i64>> {
    fn rec(dim: usize, budget: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for x in -budget..=budget {
            cur.push(x);
            rec(dim, budget - x.abs(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, radius as i64, &mut Vec::with_capacity(dim), &mut out);
    out
}

pub fn lee_sphere_positions(dim: usize, radius: usize, center: &[i64]) -> Vec<Vec<i64>> {
    assert_eq!(center.len(), dim);
    lee_sphere_offsets(dim, radius)
        .into_iter()
        .map(|o| o.iter().zip(center).map(|(a, b)| a + b).collect())
        .collect()
}

pub fn lee_distance(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn ceil_half(x: i64) -> i64 {
    x.div_euclid(2) + x.rem_euclid(2)
}

/// `T(i1, i2) = (ceil((i1 + i2) / 2), i2 - i1)`.
pub fn transform_2d(i1: i64, i2: i64) -> (i64, i64) {
    (ceil_half(i1 + i2), i2 - i1)
}

/// Closed form of the D-dimensional transformation.
///
/// With alternating sums `S_j = i_j - S_{j-1}`, coordinate `j < D` is
/// `ceil((S_j + i_{j+1}) / 2)` and the last is `S_D`.
pub fn transform_nd(i: &[i64]) -> Vec<i64> {
    let d = i.len();
    assert!(d >= 1);
    let mut s = Vec::with_capacity(d);
    let mut prev = 0;
    for &x in i {
        prev = x - prev;
        s.push(prev);
    }
    let mut out: Vec<i64> = (0..d - 1).map(|j| ceil_half(s[j] + i[j + 1])).collect();
    out.push(s[d - 1]);
    out
}

/// Applies the two-dimensional map to coordinates (1,2), then (2,3), and so on.
pub fn transform_nd_iterative(i: &[i64]) -> Vec<i64> {
    let mut x = i.to_vec();
    for j in 0..x.len().saturating_sub(1) {
        let (a, b) = transform_2d(x[j], x[j + 1]);
        x[j] = a;
        x[j + 1] = b;
    }
    x
}

/// Inverse of [`transform_nd`]; the transformation is a bijection of Z^D.
///
/// Coordinate `j < D` equals `S_j + ceil(S_{j+1} / 2)`, so the alternating
/// sums can be recovered from the last coordinate downwards.
pub fn inverse_transform_nd(t: &[i64]) -> Vec<i64> {
    let d = t.len();
    let mut s = vec![0i64; d];
    s[d - 1] = t[d - 1];
    for j in (0..d - 1).rev() {
        s[j] = t[j] - ceil_half(s[j + 1]);
    }
    let mut i = vec![0i64; d];
    i[0] = s[0];
    for j in 1..d {
        i[j] = s[j] + s[j - 1];
    }
    i
}

/// Side lengths of the box that holds a transformed sphere:
/// `(R+1)` in the first `D-1` coordinates and `2R+1` in the last.
pub fn transformed_box(dim: usize, radius: usize) -> Vec<usize> {
    let mut sides = vec![radius + 1; dim.saturating_sub(1)];
    sides.push(2 * radius + 1);
    sides
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundingBoxReport {
    pub dim: usize,
    pub radius: usize,
    pub expected: Vec<usize>,
    pub max_extents: Vec<usize>,
    pub centers: u64,
    pub injective: bool,
    pub violation: Option<Vec<i64>>,
}

impl BoundingBoxReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none() && self.injective && self.max_extents == self.expected
    }

    pub fn checks(&self) -> Vec<CheckReport> {
        let dims = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("x")
        };
        let mut fit = CheckReport::new(
            format!("lee-transform.fit.d{}.r{}", self.dim, self.radius),
            self.violation.is_none() && self.max_extents == self.expected,
            self.centers,
        );
        fit.witness = Some(match &self.violation {
            Some(c) => format!(
                "center={}",
                c.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            None => format!(
                "extents={},expected={}",
                dims(&self.max_extents),
                dims(&self.expected)
            ),
        });
        let inj = CheckReport::new(
            format!("lee-transform.injective.d{}.r{}", self.dim, self.radius),
            self.injective,
            self.centers,
        );
        vec![fit, inj]
    }
}

/// For every center in `[0, side)^D`, checks that the transformed sphere
/// fits the expected box, and that the transformation is injective on the
/// window.
pub fn bounding_box_check(dim: usize, radius: usize, side: usize) -> BoundingBoxReport {
    let expected = transformed_box(dim, radius);
    let offsets = lee_sphere_offsets(dim, radius);
    let mut max_extents = vec![0usize; dim];
    let mut violation = None;
    let mut centers = 0u64;
    let mut seen = rustc_hash::FxHashSet::default();
    let mut injective = true;
    for center in crate::shape::grid(&vec![side; dim]) {
        let center: Vec<i64> = center.iter().map(|&x| x as i64).collect();
        centers += 1;
        if !seen.insert(transform_nd(&center)) {
            injective = false;
        }
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for o in &offsets {
            let p: Vec<i64> = o.iter().zip(&center).map(|(a, b)| a + b).collect();
            for (k, v) in transform_nd(&p).into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        for k in 0..dim {
            let extent = (hi[k] - lo[k] + 1) as usize;
            max_extents[k] = max_extents[k].max(extent);
            if extent > expected[k] && violation.is_none() {
                violation = Some(center.clone());
            }
        }
    }
    BoundingBoxReport {
        dim,
        radius,
        expected,
        max_extents,
        centers,
        injective,
        violation,
    }
}
