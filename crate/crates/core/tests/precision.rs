//! The computed weight-2 precision against a perturbation oracle: the
//! smallest precision `p` such that changing any coefficient of `q^n`,
//! `n >= p`, in the basis leaves the monomial matrix unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use x0_weierstrass::basis_io::{bundled_basis, column_bound, required_precision, PRECISION_GUARD};
use x0_weierstrass::monomials::enumerate_exponents;
use x0_weierstrass::{decide, BasisSource, DecideOptions, Method};

/// Plain integer product truncated to `len` coefficients.
fn mul(a: &[i128], b: &[i128], len: usize) -> Vec<i128> {
    let mut out = vec![0i128; len];
    for (i, x) in a.iter().enumerate().take(len) {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `q^1 .. q^columns` of every degree-`m/2` monomial.
fn matrix(forms: &[Vec<i128>], m: u32, columns: usize) -> Vec<Vec<i128>> {
    enumerate_exponents(forms.len(), m / 2)
        .iter()
        .map(|alpha| {
            let mut acc: Option<Vec<i128>> = None;
            for (f, &a) in forms.iter().zip(alpha.as_slice()) {
                for _ in 0..a {
                    acc = Some(match acc {
                        None => f.clone(),
                        Some(p) => mul(&p, f, columns + 1),
                    });
                }
            }
            acc.unwrap()[1..=columns].to_vec()
        })
        .collect()
}

fn integer_forms(level: u64, len: usize) -> Vec<Vec<i128>> {
    let basis = bundled_basis(level).unwrap().unwrap();
    basis
        .series()
        .iter()
        .map(|s| {
            (0..len)
                .map(|n| i128::try_from(s.coefficient(n).unwrap().to_integer()).unwrap())
                .collect()
        })
        .collect()
}

/// Smallest `p` for which random perturbations at `q^p` and beyond never
/// change the matrix.
fn oracle_min_precision(level: u64, m: u32, rng: &mut ChaCha8Rng) -> usize {
    let forms = integer_forms(level, 100);
    let g = forms.len();
    let columns = column_bound(g, m);
    let reference = matrix(&forms, m, columns);
    let determined = |p: usize, rng: &mut ChaCha8Rng| {
        (0..8).all(|_| {
            let perturbed: Vec<Vec<i128>> = forms
                .iter()
                .map(|f| {
                    f.iter()
                        .enumerate()
                        .map(|(n, &c)| if n >= p { c + rng.gen_range(1..=5) } else { c })
                        .collect()
                })
                .collect();
            matrix(&perturbed, m, columns) == reference
        })
    };
    (2..=columns + 1)
        .find(|&p| determined(p, rng))
        .expect("full precision determines the matrix")
}

#[test]
fn required_precision_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // genus 5 at weight 4, plus neighbours in genus and weight
    for (level, m) in [(55, 4), (55, 6), (34, 4), (34, 8), (43, 2), (64, 4)] {
        let g = bundled_basis(level).unwrap().unwrap().genus();
        let oracle = oracle_min_precision(level, m, &mut rng);
        for method in [Method::Echelon, Method::Wronskian, Method::Both] {
            assert_eq!(
                required_precision(g, m, method),
                oracle + PRECISION_GUARD,
                "level {level}, m = {m}, {method}"
            );
        }
    }
}

#[test]
fn the_guard_is_not_needed_for_correctness() {
    // At the oracle's minimum the verdict is already the full-precision one.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (level, m) in [(55, 4), (34, 4), (64, 6)] {
        let p = oracle_min_precision(level, m, &mut rng);
        let exact = DecideOptions {
            precision: Some(p),
            source: BasisSource::Bundled,
            ..DecideOptions::default()
        };
        let full = DecideOptions {
            precision: Some(100),
            source: BasisSource::Bundled,
            ..DecideOptions::default()
        };
        let a = decide(level, m, &exact).unwrap();
        let b = decide(level, m, &full).unwrap();
        assert_eq!(
            (a.verdict, a.pivots),
            (b.verdict, b.pivots),
            "level {level}, m = {m}"
        );
    }
}

#[test]
fn below_the_minimum_is_refused() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = oracle_min_precision(55, 4, &mut rng);
    let opts = DecideOptions {
        precision: Some(p - 1),
        source: BasisSource::Bundled,
        ..DecideOptions::default()
    };
    assert!(matches!(
        decide(55, 4, &opts),
        Err(x0_weierstrass::Error::PrecisionExceeded { .. })
    ));
}
