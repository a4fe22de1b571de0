//! Wronskians of q-series and the Wronskian form of the Weierstrass test.
//!
//! Row `j` of the Wronskian matrix is `theta^j` applied to each form, with
//! `theta = q d/dq`. This differs from the `d/dz` normalization by the
//! constant `(2 pi i)^(t(t-1)/2)`, which changes neither the valuation nor
//! whether the leading coefficient vanishes.
//!
//! The determinant is computed without cofactor expansion. Form `u` has
//! valuation `v_u`; every entry in its column is divisible by `q^(v_u)`, so
//! `W = q^(sum v_u) * D` where `D` is the determinant of the shifted
//! entries. `D` is only needed modulo `q^k`, `k = min_u (prec_u - v_u)`
//! (each shifted entry is known to that precision and has valuation >= 0,
//! so no term of the Leibniz expansion is known better). It is evaluated in
//! `Q[q]/(q^k)` by elimination with full pivoting on the entry of least
//! valuation: with pivot `p = q^v * unit`, every other entry of the pivot row
//! has valuation `>= v`, so `e/p` (known modulo `q^(k-v)`) times the pivot
//! row is known modulo `q^k` and the Schur complement loses no precision.

use num_traits::{One, Zero};

use crate::curve_tables::dim_smh;
use crate::echelon::EchelonResult;
use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QSeries};

/// Most coefficients kept past the largest pivot when testing an echelon
/// basis.
pub const WRONSKIAN_SLACK: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WronskianSeries {
    pub series: QSeries,
    /// Number of input forms.
    pub t: usize,
}

impl WronskianSeries {
    /// Weight `t(m + t - 1)` of the Wronskian of `t` forms of weight `m`.
    pub fn weight(&self, m: u32) -> usize {
        self.t * (m as usize + self.t - 1)
    }
}

pub fn wronskian(forms: &[QSeries]) -> Result<WronskianSeries> {
    let t = forms.len();
    if t == 0 {
        return Err(Error::InvalidArgument("wronskian of an empty list".into()));
    }
    let shifts: Vec<usize> = forms.iter().map(QSeries::valuation_bound).collect();
    let total_shift: usize = shifts.iter().sum();

    if forms.iter().any(QSeries::is_zero) {
        // A column is zero to its precision, so D is known modulo q^0.
        return Ok(WronskianSeries {
            series: QSeries::zero(total_shift.max(1)),
            t,
        });
    }

    let k = forms
        .iter()
        .zip(&shifts)
        .map(|(f, v)| f.prec() - v)
        .min()
        .expect("t >= 1");
    // entries[j][u] = q^(-v_u) theta^j f_u mod q^k; only the coefficients
    // of q^(v_u) .. q^(v_u + k - 1) matter, so truncate before differentiating.
    let mut entries: Vec<Vec<QSeries>> = vec![Vec::with_capacity(t); t];
    for (f, &v) in forms.iter().zip(&shifts) {
        let mut cur = f.truncate(v + k);
        for row in entries.iter_mut() {
            row.push(cur.shift_down(v)?.truncate(k));
            cur = cur.theta();
        }
    }

    let det = local_determinant(&mut entries, k);
    Ok(WronskianSeries {
        series: det.shift_up(total_shift),
        t,
    })
}

/// Determinant of a square matrix over `Q[q]/(q^k)`; entries must have
/// precision `k`. Destroys the input.
fn local_determinant(mat: &mut [Vec<QSeries>], k: usize) -> QSeries {
    let n = mat.len();
    let mut det = QSeries::monomial(Coefficient::one(), 0, k);
    let mut negate = false;
    for col in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for r in col..n {
            for c in col..n {
                if let Some(v) = mat[r][c].valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, r, c)) = best else {
            return QSeries::zero(k);
        };
        if r != col {
            mat.swap(r, col);
            negate = !negate;
        }
        if c != col {
            for row in mat.iter_mut() {
                row.swap(c, col);
            }
            negate = !negate;
        }
        let pivot = mat[col][col].clone();
        det = (&det * &pivot).truncate(k);
        if v >= k {
            return QSeries::zero(k);
        }
        let unit = pivot.shift_down(v).expect("pivot has valuation v");
        let inv = inverse_unit(&unit, k - v);
        let (upper, lower) = mat.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = (&row[col].shift_down(v).expect("pivot valuation is minimal") * &inv)
                .truncate(k - v);
            for cc in col + 1..n {
                let delta = (&factor * &pivot_row[cc]).truncate(k);
                row[cc] = (&row[cc] - &delta).truncate(k);
            }
            row[col] = QSeries::zero(k);
        }
    }
    if negate {
        -det
    } else {
        det
    }
}

/// Inverse of a series with nonzero constant term, modulo `q^n`.
fn inverse_unit(s: &QSeries, n: usize) -> QSeries {
    let a0 = s.coefficient(0).expect("unit has a known constant term");
    debug_assert!(!a0.is_zero());
    let inv_a0 = Coefficient::one() / &a0;
    let a: Vec<Coefficient> = (0..n)
        .map(|i| s.coefficient(i).unwrap_or_else(|_| Coefficient::zero()))
        .collect();
    let mut b: Vec<Coefficient> = Vec::with_capacity(n);
    b.push(inv_a0.clone());
    for i in 1..n {
        let mut acc = Coefficient::zero();
        for j in 1..=i {
            if !a[j].is_zero() {
                acc += &a[j] * &b[i - j];
            }
        }
        b.push(-(&acc * &inv_a0));
    }
    QSeries::from_coeffs(b, n.min(s.prec()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WronskianVerdict {
    pub is_weierstrass: bool,
    /// `ord_q W`.
    pub order: usize,
    /// Least `ord_q W` at which the cusp is a Weierstrass point:
    /// `t(m + t - 1)/2 + 1`.
    pub threshold: usize,
    pub t: usize,
}

/// `t(m + t - 1)/2 + 1`.
pub fn order_threshold(t: usize, m: u32) -> usize {
    t * (m as usize + t - 1) / 2 + 1
}

/// Decides the criterion `ord_q W - 1 >= t(m-1+t)/2` on an echelon basis of
/// the weight-`m` space (`t = dim_smh(g, m)` rows).
///
/// Also checks that `ord_q W` equals the sum of the pivots, which must hold
/// because the leading coefficient is a Vandermonde determinant of distinct
/// integers times the product of the leading coefficients.
pub fn weierstrass_by_wronskian(
    rows: &EchelonResult,
    genus: usize,
    m: u32,
) -> Result<WronskianVerdict> {
    if genus <= 1 {
        return Err(Error::InvalidArgument(format!(
            "genus {genus}: curves of genus <= 1 have no Weierstrass points"
        )));
    }
    let t = dim_smh(genus, m);
    if rows.rank != t {
        return Err(Error::DataIntegrity(format!(
            "echelon rank {} differs from dim S^H_{m} = {t}",
            rows.rank
        )));
    }
    let max_pivot = *rows.pivots.last().expect("rank >= 1");
    let pivot_sum: usize = rows.pivots.iter().sum();
    let threshold = order_threshold(t, m);
    // Distinct pivots make the constant term of the shifted determinant a
    // nonzero Vandermonde product, so one coefficient past the last pivot
    // normally decides. Wider windows are only tried if it vanishes.
    let mut order = None;
    let mut known = 0;
    for slack in 1..=WRONSKIAN_SLACK {
        let forms: Vec<QSeries> = rows
            .reduced_rows
            .iter()
            .map(|r| r.truncate(max_pivot + slack))
            .collect();
        let w = wronskian(&forms)?;
        known = w.series.prec();
        order = w.series.valuation();
        if order.is_some() {
            break;
        }
    }
    let order = order.ok_or_else(|| Error::precision(pivot_sum + 1, known))?;
    if order != pivot_sum {
        return Err(Error::DataIntegrity(format!(
            "ord_q W = {order} but the pivots sum to {pivot_sum}"
        )));
    }
    Ok(WronskianVerdict {
        is_weierstrass: order >= threshold,
        order,
        threshold,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_io::bundled_basis;
    use crate::echelon::{build_matrix, reduce};
    use crate::monomials::compute_monomials;
    use proptest::prelude::*;

    fn q(c: &[i64], prec: usize) -> QSeries {
        QSeries::from_integers(c.iter().copied(), prec)
    }

    /// Cofactor-expansion determinant over truncated series: the independent
    /// oracle for small `t`.
    fn cofactor_det(m: &[Vec<QSeries>]) -> QSeries {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc: Option<QSeries> = None;
        for c in 0..n {
            let minor: Vec<Vec<QSeries>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != c)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][c] * &cofactor_det(&minor);
            let term = if c % 2 == 1 { -term } else { term };
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        acc.unwrap()
    }

    fn naive_wronskian(forms: &[QSeries]) -> QSeries {
        let m: Vec<Vec<QSeries>> = (0..forms.len())
            .map(|j| forms.iter().map(|f| f.theta_pow(j as u32)).collect())
            .collect();
        cofactor_det(&m)
    }

    #[test]
    fn single_form_is_itself() {
        let f = q(&[0, 0, 3, 1, -1], 7);
        assert_eq!(wronskian(std::slice::from_ref(&f)).unwrap().series, f);
    }

    #[test]
    fn two_monomials() {
        let w = wronskian(&[q(&[0, 0, 1], 10), q(&[0, 0, 0, 1], 10)]).unwrap();
        assert_eq!(w.series.valuation(), Some(5));
        assert_eq!(w.series.coefficient(5).unwrap(), Coefficient::one());
        assert_eq!(w.weight(4), 2 * 5);
    }

    #[test]
    fn agrees_with_cofactor_expansion() {
        let forms = [
            q(&[0, 1, 2, -1, 0, 3, 1, 1, -2, 4], 10),
            q(&[0, 1, 0, 5, -1, 2, 0, 1, 1, 1], 10),
            q(&[0, 0, 2, 1, 1, -3, 2, 0, 1, 1], 10),
        ];
        let w = wronskian(&forms).unwrap().series;
        let oracle = naive_wronskian(&forms);
        let p = w.prec().min(oracle.prec());
        assert!(p >= 3);
        assert_eq!(w.truncate(p), oracle.truncate(p));
    }

    #[test]
    fn dependent_forms_vanish() {
        let f = q(&[0, 1, 2, 3, 4, 5], 8);
        let g = f.scale(&Coefficient::from_integer(3.into()));
        let w = wronskian(&[f, g]).unwrap().series;
        assert!(w.is_zero());
    }

    #[test]
    fn level_34_valuation_is_pivot_sum() {
        let b = bundled_basis(34).unwrap().unwrap().truncate(12);
        let mons = compute_monomials(&b, 4, 13).unwrap();
        let res = reduce(&build_matrix(&mons, 3, 4).unwrap(), &mons).unwrap();
        let w = wronskian(&res.reduced_rows).unwrap();
        assert_eq!(w.series.valuation(), Some(27));
        let v = weierstrass_by_wronskian(&res, 3, 4).unwrap();
        assert_eq!((v.order, v.threshold, v.is_weierstrass), (27, 28, false));
    }

    #[test]
    fn level_55_crosses_threshold() {
        let b = bundled_basis(55).unwrap().unwrap().truncate(20);
        let mons = compute_monomials(&b, 4, 21).unwrap();
        let res = reduce(&build_matrix(&mons, 5, 4).unwrap(), &mons).unwrap();
        let v = weierstrass_by_wronskian(&res, 5, 4).unwrap();
        assert_eq!((v.order, v.threshold, v.is_weierstrass), (93, 91, true));
    }

    #[test]
    fn genus_one_is_refused() {
        let b = bundled_basis(34).unwrap().unwrap();
        let mons = compute_monomials(&b, 4, 13).unwrap();
        let res = reduce(&build_matrix(&mons, 3, 4).unwrap(), &mons).unwrap();
        assert!(matches!(
            weierstrass_by_wronskian(&res, 1, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unit_inverse() {
        let s = q(&[2, 1, -1, 3], 6);
        let inv = inverse_unit(&s, 6);
        let prod = (&s * &inv).truncate(4);
        assert_eq!(prod, q(&[1], 4));
    }

    fn arb_forms(t: usize) -> impl Strategy<Value = Vec<QSeries>> {
        prop::collection::vec(prop::collection::vec(-3i64..=3, 7), t)
            .prop_map(|rows| rows.into_iter().map(|c| q(&c, 7)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn matches_cofactor_oracle(forms in arb_forms(3)) {
            let w = wronskian(&forms).unwrap().series;
            let oracle = naive_wronskian(&forms);
            let p = w.prec().min(oracle.prec());
            prop_assert_eq!(w.truncate(p), oracle.truncate(p));
        }

        #[test]
        fn scaling_and_swapping(forms in arb_forms(3), k in 1i64..5) {
            let w = wronskian(&forms).unwrap().series;
            let c = Coefficient::from_integer(k.into());
            let mut scaled = forms.clone();
            scaled[1] = scaled[1].scale(&c);
            let ws = wronskian(&scaled).unwrap().series;
            let p = w.prec().min(ws.prec());
            prop_assert_eq!(ws.truncate(p), w.scale(&c).truncate(p));

            let mut swapped = forms.clone();
            swapped.swap(0, 2);
            let wsw = wronskian(&swapped).unwrap().series;
            let p = w.prec().min(wsw.prec());
            prop_assert_eq!(wsw.truncate(p), (-&w).truncate(p));
        }

        #[test]
        fn distinct_leading_exponents_give_sum(
            exps in prop::sample::subsequence((1usize..12).collect::<Vec<_>>(), 4).prop_shuffle(),
            tails in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 4),
            leads in prop::collection::vec(prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]), 4),
        ) {
            let forms: Vec<QSeries> = exps.iter().zip(&tails).zip(&leads).map(|((&e, tail), &lead)| {
                let mut c = vec![0i64; e];
                c.push(lead);
                c.extend(tail);
                q(&c, 20)
            }).collect();
            let w = wronskian(&forms).unwrap().series;
            prop_assert_eq!(w.valuation(), Some(exps.iter().sum::<usize>()));
        }
    }
}
