//! Properties of the verdict that must not depend on presentation: the
//! choice of basis, the order of the monomials and the working precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use x0_weierstrass::basis_io::{bundled_basis, required_precision};
use x0_weierstrass::echelon::{build_matrix, reduce};
use x0_weierstrass::monomials::compute_monomials;
use x0_weierstrass::wronskian::weierstrass_by_wronskian;
use x0_weierstrass::{decide, BasisSet, BasisSource, DecideOptions, Method, QSeries};

const LEVELS: [u64; 6] = [34, 38, 43, 45, 55, 64];

/// Elementary operations on a basis: `(kind, i, j, c)`.
fn ops() -> impl Strategy<Value = Vec<(u8, usize, usize, i64)>> {
    prop::collection::vec((0u8..3, 0usize..8, 0usize..8, -4i64..=4), 1..12)
}

fn apply(basis: &BasisSet, ops: &[(u8, usize, usize, i64)]) -> BasisSet {
    let g = basis.genus();
    let mut forms: Vec<QSeries> = basis.series();
    for &(kind, i, j, c) in ops {
        let (i, j) = (i % g, j % g);
        match kind {
            0 if i != j => {
                let add = forms[j].scale(&BigRational::from_integer(BigInt::from(c)));
                forms[i] = &forms[i] + &add;
            }
            1 => forms.swap(i, j),
            _ => forms[i] = -&forms[i],
        }
    }
    BasisSet::from_series(basis.level, &forms, false).unwrap()
}

fn bundled(level: u64) -> BasisSet {
    bundled_basis(level).unwrap().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unimodular_change_of_basis(
        level in prop::sample::select(LEVELS.to_vec()),
        m in prop::sample::select(vec![2u32, 4, 6]),
        ops in ops(),
    ) {
        let reference = decide(level, m, &DecideOptions::default()).unwrap();
        let opts = DecideOptions {
            source: BasisSource::Provided(apply(&bundled(level), &ops)),
            ..DecideOptions::default()
        };
        let v = decide(level, m, &opts).unwrap();
        prop_assert_eq!(v.pivots, reference.pivots);
        prop_assert_eq!(v.verdict, reference.verdict);
    }

    #[test]
    fn monomial_order_is_irrelevant(
        level in prop::sample::select(LEVELS.to_vec()),
        m in prop::sample::select(vec![4u32, 6]),
        seed in any::<u64>(),
    ) {
        let basis = bundled(level);
        let g = basis.genus();
        let prec = required_precision(g, m, Method::Both);
        let basis = basis.truncate(prec);
        let monomials = compute_monomials(&basis, m, prec + m as usize / 2 - 1).unwrap();
        let mut order: Vec<usize> = (0..monomials.len()).collect();
        // Fisher-Yates driven by a splitmix sequence, so the shrinker only
        // has to deal with one integer.
        let mut state = seed;
        for i in (1..order.len()).rev() {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            order.swap(i, (z ^ (z >> 31)) as usize % (i + 1));
        }
        let shuffled: Vec<_> = order.iter().map(|&k| monomials[k].clone()).collect();

        let a = reduce(&build_matrix(&monomials, g, m).unwrap(), &monomials).unwrap();
        let b = reduce(&build_matrix(&shuffled, g, m).unwrap(), &shuffled).unwrap();
        prop_assert_eq!(&a.pivots, &b.pivots);
        let wa = weierstrass_by_wronskian(&a, g, m).unwrap();
        let wb = weierstrass_by_wronskian(&b, g, m).unwrap();
        prop_assert_eq!(wa, wb);
    }

    #[test]
    fn extra_precision_changes_nothing(
        level in prop::sample::select(LEVELS.to_vec()),
        m in prop::sample::select(vec![2u32, 4, 6]),
        extra in 0usize..30,
    ) {
        let reference = decide(level, m, &DecideOptions::default()).unwrap();
        let g = reference.genus.unwrap();
        let opts = DecideOptions {
            precision: Some(required_precision(g, m, Method::Both) + extra),
            ..DecideOptions::default()
        };
        let v = decide(level, m, &opts).unwrap();
        prop_assert_eq!(v.pivots, reference.pivots);
        prop_assert_eq!(v.verdict, reference.verdict);
        prop_assert_eq!(v.wronskian_order, reference.wronskian_order);
    }
}

#[test]
fn reduced_rows_span_the_monomials() {
    // Every monomial is a rational combination of the reduced rows through
    // the matrix columns: eliminating it against them leaves zero.
    for level in LEVELS {
        let basis = bundled(level);
        let g = basis.genus();
        let m = 4;
        let prec = required_precision(g, m, Method::Both);
        let basis = basis.truncate(prec);
        let monomials = compute_monomials(&basis, m, prec + 1).unwrap();
        let matrix = build_matrix(&monomials, g, m).unwrap();
        let result = reduce(&matrix, &monomials).unwrap();
        for row in &matrix.rows {
            let mut r = row.clone();
            for (reduced, &pivot) in result.reduced_matrix.iter().zip(&result.pivots) {
                let c = &r[pivot - 1] / BigRational::from_integer(reduced[pivot - 1].clone());
                for (x, y) in r.iter_mut().zip(reduced) {
                    *x -= &c * BigRational::from_integer(y.clone());
                }
            }
            assert!(
                r.iter().all(|x| *x == BigRational::from_integer(0.into())),
                "level {level}"
            );
        }
    }
}
