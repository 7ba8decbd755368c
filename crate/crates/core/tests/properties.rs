use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cluster_codes::bits::BitVec;
use cluster_codes::codec::{AssembleOptions, CodeAssembly, NdWord};
use cluster_codes::coloring::{
    box_coloring_even, box_coloring_odd, lee_colorings, lee_radius1_colorings, ColoringSet,
};
use cluster_codes::component::{
    burst_decode, locate_burst, residue_word, search_corrector, search_locator, Burst,
    ComponentCode,
};
use cluster_codes::field::ExtField;
use cluster_codes::lee::{inverse_transform_nd, transform_nd, transform_nd_iterative};
use cluster_codes::oracle::{random_cluster, verify_linearity, ClusterEnumeration};
use cluster_codes::poly::{is_irreducible, is_square_free, period, primitive_polynomials, BinPoly};
use cluster_codes::shape::ShapeSpec;

fn box_assembly() -> &'static CodeAssembly {
    static A: OnceLock<CodeAssembly> = OnceLock::new();
    A.get_or_init(|| {
        CodeAssembly::assemble(
            &[10, 10],
            &ShapeSpec::Box { sides: vec![3, 3] },
            &AssembleOptions::default(),
        )
        .unwrap()
    })
}

fn lee_assembly() -> &'static CodeAssembly {
    static A: OnceLock<CodeAssembly> = OnceLock::new();
    A.get_or_init(|| {
        CodeAssembly::assemble(
            &[12, 12],
            &ShapeSpec::LeeSphere { dim: 2, radius: 1 },
            &AssembleOptions::default(),
        )
        .unwrap()
    })
}

fn corrector() -> &'static ComponentCode {
    static C: OnceLock<ComponentCode> = OnceLock::new();
    C.get_or_init(|| search_corrector(5, 40, 1..=20).unwrap())
}

fn locator() -> &'static ComponentCode {
    static C: OnceLock<ComponentCode> = OnceLock::new();
    C.get_or_init(|| search_locator(5, Some(40), None, 1..=20).unwrap())
}

/// Smallest `k >= 1` with `f | x^k + 1`, by stepping `x^k mod f`.
fn period_by_stepping(f: &BinPoly) -> u128 {
    let x = BinPoly::monomial(1);
    let mut acc = x.rem(f);
    let mut k = 1;
    while !acc.is_one() {
        acc = acc.mul_mod(&x, f);
        k += 1;
    }
    k
}

fn poly_strategy(max_degree: usize) -> impl Strategy<Value = BinPoly> {
    (1u64..(1u64 << (max_degree + 1))).prop_map(BinPoly::from_u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn period_matches_stepping(f in poly_strategy(12)) {
        prop_assume!(f.constant_term() && f.degree().finite().unwrap() >= 1);
        prop_assert_eq!(period(&f).unwrap(), period_by_stepping(&f));
    }

    #[test]
    fn square_free_matches_divisor_search(f in poly_strategy(12)) {
        prop_assume!(f.degree().finite().unwrap() >= 1);
        let has_square = (2u64..64).map(BinPoly::from_u64).any(|g| g.mul(&g).divides(&f));
        prop_assert_eq!(is_square_free(&f).unwrap(), !has_square);
    }

    #[test]
    fn irreducible_has_no_small_factor(f in poly_strategy(12)) {
        prop_assume!(f.degree().finite().unwrap() >= 1);
        let deg = f.degree().finite().unwrap();
        let has_factor = (2u64..(1u64 << (deg / 2 + 1))).map(BinPoly::from_u64).any(|g| {
            let d = g.degree().finite().unwrap();
            d >= 1 && d <= deg / 2 && g.divides(&f)
        });
        prop_assert_eq!(is_irreducible(&f).unwrap(), !has_factor);
    }

    #[test]
    fn product_degree_and_division(a in poly_strategy(40), b in poly_strategy(20)) {
        let p = a.mul(&b);
        prop_assert_eq!(p.degree().finite().unwrap(), a.degree().finite().unwrap() + b.degree().finite().unwrap());
        let (q, r) = p.add(&BinPoly::one()).div_rem(&b);
        prop_assert_eq!(q.mul(&b).add(&r), p.add(&BinPoly::one()));
    }

    #[test]
    fn field_axioms(s in 1usize..=10, x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
        let f = ExtField::new(s).unwrap();
        let size = f.size() as u32;
        let (a, b, c) = (f.elem(x % size).unwrap(), f.elem(y % size).unwrap(), f.elem(z % size).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.elem(1).unwrap());
            prop_assert_eq!(f.pow(a, size as u64 - 1), f.elem(1).unwrap());
        }
    }

    #[test]
    fn burst_decode_recovers(start in 0usize..40, pattern in 1u64..32) {
        let code = corrector();
        let pattern = pattern >> pattern.trailing_zeros();
        let burst = Burst { start, pattern };
        let positions = burst.positions(code.len(), false);
        prop_assume!(positions.iter().all(|&p| p < code.len()));
        let decoded = burst_decode(code, code.syndrome(positions.clone())).unwrap().unwrap();
        prop_assert_eq!(decoded.positions(code.len(), false), positions);
    }

    #[test]
    fn locator_finds_start(residues in 1u64..32, first in 0usize..40) {
        let code = locator();
        prop_assume!((residues >> (first % 5)) & 1 == 1);
        let word = residue_word(residues, first, 5);
        let positions = word.positions(code.len(), false);
        prop_assume!(positions.iter().all(|&p| p < code.len()));
        let s = code.syndrome(positions);
        prop_assert_eq!(locate_burst(code, s, word.pattern, first % 5).unwrap(), first);
    }

    #[test]
    fn transform_inverts(p in prop::collection::vec(-50i64..50, 2..=4)) {
        let t = transform_nd(&p);
        prop_assert_eq!(&t, &transform_nd_iterative(&p));
        prop_assert_eq!(inverse_transform_nd(&t), p);
    }

    #[test]
    fn locate_inverts_colors(kind in 0usize..5, x in 0usize..9, y in 0usize..9, z in 0usize..9) {
        let (mut set, dims): (ColoringSet, Vec<usize>) = match kind {
            0 => (box_coloring_odd(&[3, 3]).unwrap(), vec![9, 9]),
            1 => (box_coloring_even(&[2, 2]).unwrap(), vec![9, 9]),
            2 => (lee_colorings(2).unwrap(), vec![9, 9]),
            3 => (lee_radius1_colorings(3).unwrap(), vec![9, 9, 9]),
            _ => (box_coloring_odd(&[3, 1, 3]).unwrap(), vec![9, 9, 9]),
        };
        set.normalize(&dims);
        let idx: Vec<usize> = [x, y, z][..dims.len()].to_vec();
        let colors = set.colors(&idx.iter().map(|&v| v as i64).collect::<Vec<_>>());
        prop_assert_eq!(set.locate(&colors, &dims).unwrap(), idx);
    }

    #[test]
    fn syndrome_is_linear(seed in any::<u64>()) {
        let a = box_assembly();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_cluster(a.shape(), a.dims(), &mut rng);
        let mut w = NdWord::zeros(a.dims());
        w.flip_all(&e);
        let mut sum = BitVec::zeros(a.redundancy());
        for &p in &e {
            sum.xor_assign(&a.h_column(p));
        }
        prop_assert_eq!(a.syndrome_bits(&a.syndrome(&w)), sum);
    }

    #[test]
    fn random_cluster_on_random_codeword(seed in any::<u64>(), lee in any::<bool>()) {
        let a = if lee { lee_assembly() } else { box_assembly() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info = BitVec::from_bools(&(0..a.info_len()).map(|_| rand::Rng::gen::<bool>(&mut rng)).collect::<Vec<_>>());
        let c = a.encode(&info).unwrap();
        prop_assert!(a.syndrome(&c).is_zero());
        prop_assert_eq!(&a.encode(&info).unwrap(), &c);
        let e = random_cluster(a.shape(), a.dims(), &mut rng);
        let mut w = c.clone();
        w.flip_all(&e);
        let out = a.decode(&w).unwrap();
        prop_assert_eq!(&out.word, &c);
        let got: Vec<usize> = out.cluster.unwrap().positions.iter().map(|p| a.flat(p)).collect();
        prop_assert_eq!(got, e);
        prop_assert_eq!(a.extract_info(&out.word), info);
    }

    #[test]
    fn array_text_round_trip(dims in prop::collection::vec(1usize..6, 1..=3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n: usize = dims.iter().product();
        let bits: Vec<bool> = (0..n).map(|_| rand::Rng::gen(&mut rng)).collect();
        let w = NdWord { dims, bits: BitVec::from_bools(&bits) };
        prop_assert_eq!(NdWord::from_text(&w.to_text()).unwrap(), w);
    }
}

#[test]
fn primitive_periods() {
    for m in 2..=10 {
        for p in primitive_polynomials(m).take(3) {
            assert_eq!(period_by_stepping(&p), (1u128 << m) - 1, "{p}");
        }
    }
}

#[test]
fn linearity_on_test_assemblies() {
    for a in [box_assembly(), lee_assembly()] {
        assert!(verify_linearity("linearity", a, 1000, 11).pass);
    }
}

/// Bursts of span at most `b` and weight at most `t` on a line of `n`,
/// counted by their first position.
fn limited_weight_count(n: usize, b: usize, t: usize) -> u64 {
    let c = |n: usize, k: usize| -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
    };
    (0..n)
        .map(|i| {
            (0..t)
                .filter(|&k| k <= (b - 1).min(n - 1 - i))
                .map(|k| c((b - 1).min(n - 1 - i), k))
                .sum::<u64>()
        })
        .sum()
}

#[test]
fn enumeration_counts_two_ways() {
    for (n, b, t) in [(8, 3, 1), (20, 5, 2), (30, 7, 3), (4, 6, 6)] {
        let e = ClusterEnumeration::new(
            &ShapeSpec::BoxWeightLimited {
                sides: vec![b],
                max_weight: t,
            },
            &[n],
        )
        .unwrap();
        assert_eq!(
            e.count(),
            limited_weight_count(n, b, t),
            "n={n} b={b} t={t}"
        );
    }
    // Interior box placements: each cluster is fixed by its bounding corner,
    // so count sets touching the leading faces of some placement.
    let e = ClusterEnumeration::new(&ShapeSpec::Box { sides: vec![2, 2] }, &[4, 4]).unwrap();
    // Corner cells, pairs in a row or column, diagonals, triples and the full
    // box, placed by their bounding rectangle.
    let by_extent = [(1, 1, 1u64), (1, 2, 1), (2, 1, 1), (2, 2, 2 + 4 + 1)];
    let expected: u64 = by_extent
        .iter()
        .map(|&(h, w, k)| ((4 - h + 1) * (4 - w + 1)) as u64 * k)
        .sum();
    assert_eq!(e.count(), expected);
}
