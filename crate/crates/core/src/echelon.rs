//! Integral row reduction of the monomial coefficient matrix.
//!
//! Rows are kept as primitive integer vectors. The reduction repeatedly
//! stable-sorts the rows by leading-zero count and, inside every run of rows
//! sharing a leading position, cancels each later row against the first one
//! by cross-multiplication (no division), then strips the row content. The
//! same operations are applied to a transformation matrix that starts as the
//! identity, so every reduced row stays expressed as a combination of the
//! input monomials.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::basis_io::column_bound;
use crate::error::{Error, Result};
use crate::monomials::{ExponentVector, MonomialProduct};
use crate::qseries::{Coefficient, QSeries};

/// Coefficients of `q^1 .. q^B` of every monomial, `B = m/2 + m(g-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffMatrix {
    /// `rows[r][e - 1]` is the coefficient of `q^e` in monomial `r`.
    pub rows: Vec<Vec<Coefficient>>,
    pub columns: usize,
    pub row_labels: Vec<ExponentVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonResult {
    /// Leading exponents `i_1 < ... < i_r` of the reduced rows.
    pub pivots: Vec<usize>,
    /// Reduced rows as q-series at the working precision of the monomials.
    pub reduced_rows: Vec<QSeries>,
    /// `reduced_rows[u] = sum_k transform[u][k] * monomial_k`.
    pub transform: Vec<Vec<Coefficient>>,
    /// Primitive integral matrix rows (columns `q^1 .. q^B`), leading entry
    /// positive.
    pub reduced_matrix: Vec<Vec<BigInt>>,
    /// Labels of the monomials indexing the columns of `transform`.
    pub monomial_labels: Vec<ExponentVector>,
    pub rank: usize,
    pub columns: usize,
}

impl EchelonResult {
    /// Human-readable rendering of row `u` as a combination of monomials, e.g.
    /// `-f1^2 + f0f2 + 2f1f2`. Terms are ordered by the highest-index
    /// generator first (`f1f2, f2^2, f0f3, f2f3, ...`).
    pub fn combination(&self, u: usize) -> String {
        let mut terms: Vec<(&ExponentVector, &Coefficient)> = self
            .monomial_labels
            .iter()
            .zip(&self.transform[u])
            .filter(|(_, c)| !c.is_zero())
            .collect();
        terms.sort_by(|a, b| reversed_cmp(a.0, b.0));
        let mut out = String::new();
        for (k, (alpha, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !abs.is_one() {
                if abs.is_integer() {
                    let _ = write!(out, "{abs}");
                } else {
                    let _ = write!(out, "({abs})");
                }
            }
            let _ = write!(out, "{alpha}");
        }
        out
    }
}

fn reversed_cmp(a: &ExponentVector, b: &ExponentVector) -> Ordering {
    a.as_slice().iter().rev().cmp(b.as_slice().iter().rev())
}

pub fn build_matrix(monomials: &[MonomialProduct], genus: usize, m: u32) -> Result<CoeffMatrix> {
    let columns = column_bound(genus, m);
    let rows = monomials
        .iter()
        .map(|mp| {
            if mp.series.prec() <= columns {
                return Err(Error::precision(columns + 1, mp.series.prec()));
            }
            (1..=columns).map(|e| mp.series.coefficient(e)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoeffMatrix {
        rows,
        columns,
        row_labels: monomials.iter().map(|mp| mp.alpha.clone()).collect(),
    })
}

struct Slot {
    /// Position of the monomial this row started from; breaks sort ties.
    origin: usize,
    row: Vec<BigInt>,
    /// `den * row = sum_k transform[k] * scaled_k`, where `scaled_k` is
    /// input row `k` cleared of denominators. `den > 0`.
    transform: Vec<BigInt>,
    den: BigInt,
}

impl Slot {
    fn lead(&self) -> Option<usize> {
        self.row.iter().position(|a| !a.is_zero())
    }

    fn sort_key(&self) -> (usize, usize) {
        (self.lead().unwrap_or(usize::MAX), self.origin)
    }

    /// Divides the row by its content, then cancels the common factor of
    /// the transform and the denominator.
    fn strip_content(&mut self) {
        let content = self.row.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
        if !content.is_zero() && !content.is_one() {
            for a in &mut self.row {
                *a = &*a / &content;
            }
            self.den *= &content;
        }
        let common = self
            .transform
            .iter()
            .fold(self.den.clone(), |acc, t| acc.gcd(t));
        if !common.is_one() {
            for t in &mut self.transform {
                *t = &*t / &common;
            }
            self.den = &self.den / &common;
        }
    }

    /// `self := (a/g) * self - (b/g) * pivot` with `a`, `b` the two leading
    /// entries, so the leading entry of `self` cancels.
    fn cancel_against(&mut self, pivot: &Slot, col: usize) {
        let a = &pivot.row[col];
        let b = &self.row[col];
        let g = a.gcd(b);
        let (sa, sb) = (a / &g, b / &g);
        for (x, p) in self.row.iter_mut().zip(&pivot.row) {
            *x = &sa * &*x - &sb * p;
        }
        let den = self.den.lcm(&pivot.den);
        let ta = &sa * (&den / &self.den);
        let tb = &sb * (&den / &pivot.den);
        for (x, p) in self.transform.iter_mut().zip(&pivot.transform) {
            if x.is_zero() && p.is_zero() {
                continue;
            }
            *x = &ta * &*x - &tb * p;
        }
        self.den = den;
        self.strip_content();
    }
}

/// Sort-and-cancel reduction of `matrix`; `monomials` supply the full
/// q-series used to rebuild each reduced row past the matrix columns.
pub fn reduce(matrix: &CoeffMatrix, monomials: &[MonomialProduct]) -> Result<EchelonResult> {
    let n = matrix.rows.len();
    if monomials.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} matrix rows but {} monomials",
            n,
            monomials.len()
        )));
    }
    // scales[k] clears the denominators of input row k.
    let mut scales = Vec::with_capacity(n);
    let mut slots: Vec<Slot> = matrix
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != matrix.columns {
                return Err(Error::InvalidArgument(format!(
                    "row {r} has {} entries, expected {}",
                    row.len(),
                    matrix.columns
                )));
            }
            let lcm = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let mut transform = vec![BigInt::zero(); n];
            transform[r] = BigInt::one();
            let mut slot = Slot {
                origin: r,
                row: row.iter().map(|c| (c * &lcm).to_integer()).collect(),
                transform,
                den: BigInt::one(),
            };
            scales.push(lcm);
            slot.strip_content();
            Ok(slot)
        })
        .collect::<Result<_>>()?;

    loop {
        slots.sort_by_key(Slot::sort_key);
        let mut changed = false;
        let mut start = 0;
        while start < slots.len() {
            let Some(lead) = slots[start].lead() else {
                break;
            };
            let mut end = start + 1;
            while end < slots.len() && slots[end].lead() == Some(lead) {
                end += 1;
            }
            if end - start > 1 {
                let (head, tail) = slots.split_at_mut(start + 1);
                let pivot = &head[start];
                for slot in &mut tail[..end - start - 1] {
                    slot.cancel_against(pivot, lead);
                }
                changed = true;
            }
            start = end;
        }
        if !changed {
            break;
        }
    }

    slots.retain(|s| s.lead().is_some());
    if slots.is_empty() {
        return Err(Error::Degenerate(
            "every monomial vanishes through the matrix columns".into(),
        ));
    }

    let prec = monomials.iter().map(|m| m.series.prec()).min().unwrap_or(1);
    // Integer coefficient vectors of the scaled monomials, when available;
    // the rebuild below then avoids rational arithmetic.
    let scaled: Option<Vec<Vec<BigInt>>> = monomials
        .iter()
        .zip(&scales)
        .map(|(mp, s)| {
            mp.series
                .truncate(prec)
                .scale(&Coefficient::from_integer(s.clone()))
                .to_integers()
        })
        .collect();

    let mut pivots = Vec::with_capacity(slots.len());
    let mut reduced_rows = Vec::with_capacity(slots.len());
    let mut transform = Vec::with_capacity(slots.len());
    let mut reduced_matrix = Vec::with_capacity(slots.len());
    for mut slot in slots {
        let lead = slot.lead().expect("zero rows removed");
        if slot.row[lead].is_negative() {
            for a in &mut slot.row {
                *a = -&*a;
            }
            for t in &mut slot.transform {
                *t = -&*t;
            }
        }
        let den = Coefficient::from_integer(slot.den.clone());
        let coeffs: Vec<Coefficient> = slot
            .transform
            .iter()
            .zip(&scales)
            .map(|(t, s)| Coefficient::new(t * s, slot.den.clone()))
            .collect();
        let series = match &scaled {
            Some(ints) => {
                let mut acc = vec![BigInt::zero(); prec];
                for (t, mono) in slot.transform.iter().zip(ints) {
                    if t.is_zero() {
                        continue;
                    }
                    for (a, c) in acc.iter_mut().zip(mono) {
                        if !c.is_zero() {
                            *a += t * c;
                        }
                    }
                }
                QSeries::from_coeffs(
                    acc.into_iter()
                        .map(|a| Coefficient::from_integer(a) / &den)
                        .collect(),
                    prec,
                )
            }
            None => combine(&coeffs, monomials),
        };
        // The rebuilt series must agree with the reduced matrix row.
        for (col, a) in slot.row.iter().enumerate() {
            if series.coefficient(col + 1)? != Coefficient::from_integer(a.clone()) {
                return Err(Error::DataIntegrity(format!(
                    "transform does not reproduce reduced row at q^{}",
                    col + 1
                )));
            }
        }
        pivots.push(lead + 1);
        reduced_rows.push(series);
        transform.push(coeffs);
        reduced_matrix.push(slot.row);
    }
    Ok(EchelonResult {
        rank: pivots.len(),
        pivots,
        reduced_rows,
        transform,
        reduced_matrix,
        monomial_labels: matrix.row_labels.clone(),
        columns: matrix.columns,
    })
}

/// `sum_k coeffs[k] * monomials[k]` at the common working precision.
pub fn combine(coeffs: &[Coefficient], monomials: &[MonomialProduct]) -> QSeries {
    let prec = monomials.iter().map(|m| m.series.prec()).min().unwrap_or(1);
    coeffs
        .iter()
        .zip(monomials)
        .filter(|(c, _)| !c.is_zero())
        .fold(QSeries::zero(prec), |acc, (c, mp)| {
            &acc + &mp.series.scale(c)
        })
}

/// `m/2 <= i_1` and `i_r <= m/2 + m(g-1)`.
pub fn check_pivot_bounds(pivots: &[usize], genus: usize, m: u32) -> Result<()> {
    let low = m as usize / 2;
    let high = column_bound(genus, m);
    match (pivots.first(), pivots.last()) {
        (Some(&first), Some(&last)) if first >= low && last <= high => Ok(()),
        (Some(&first), Some(&last)) => Err(Error::DataIntegrity(format!(
            "pivots {first}..{last} outside the admissible range [{low}, {high}]"
        ))),
        _ => Err(Error::DataIntegrity("no pivots".into())),
    }
}
