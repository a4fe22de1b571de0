//! Degree-`m/2` monomials `f_0^a_0 ... f_{g-1}^a_{g-1}` in a weight-2 basis.

use std::collections::HashMap;
use std::fmt;

use crate::basis_io::BasisSet;
use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QSeries};

use num_traits::One;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(alpha: Vec<u32>) -> Self {
        ExponentVector(alpha)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// Renders as `f0^2`, `f0f2`, `f1f2^3`.
impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (i, &a) in self.0.iter().enumerate() {
            match a {
                0 => continue,
                1 => write!(f, "f{i}")?,
                _ => write!(f, "f{i}^{a}")?,
            }
            any = true;
        }
        if !any {
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialProduct {
    pub alpha: ExponentVector,
    pub series: QSeries,
}

/// All exponent vectors of length `g` and total degree `d`, in descending
/// lexicographic order, so `f_0` is heaviest first:
/// `(2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2)`.
pub fn enumerate_exponents(g: usize, d: u32) -> Vec<ExponentVector> {
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(ExponentVector(cur.clone()));
            cur[pos] = 0;
            return;
        }
        for a in (0..=left).rev() {
            cur[pos] = a;
            rec(pos + 1, left - a, cur, out);
        }
        cur[pos] = 0;
    }
    assert!(g >= 1, "need at least one generator");
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; g], &mut out);
    out
}

/// Monomials of degree `m/2` in the basis forms, each truncated to `prec`.
///
/// Fails with `PrecisionExceeded` when some product is not known through
/// `q^(prec-1)`.
pub fn compute_monomials(basis: &BasisSet, m: u32, prec: usize) -> Result<Vec<MonomialProduct>> {
    monomials_of(&basis.series(), m, prec)
}

/// Same as [`compute_monomials`] on raw series. Products are built from a
/// cache of lower-degree subproducts: `f^a = f^(a - e_i) * f_i` with `i` the
/// last nonzero position.
pub fn monomials_of(forms: &[QSeries], m: u32, prec: usize) -> Result<Vec<MonomialProduct>> {
    check_weight(m)?;
    let d = m / 2;
    let mut cache: HashMap<Vec<u32>, QSeries> = HashMap::new();
    enumerate_exponents(forms.len(), d)
        .into_iter()
        .map(|alpha| {
            let series = cached_product(forms, alpha.as_slice(), &mut cache);
            finish(alpha, series, d, prec)
        })
        .collect()
}

/// Reference path: every monomial as a left fold of `qs_mul`, no sharing.
pub fn monomials_naive(forms: &[QSeries], m: u32, prec: usize) -> Result<Vec<MonomialProduct>> {
    check_weight(m)?;
    let d = m / 2;
    enumerate_exponents(forms.len(), d)
        .into_iter()
        .map(|alpha| {
            let mut acc: Option<QSeries> = None;
            for (f, &a) in forms.iter().zip(alpha.as_slice()) {
                for _ in 0..a {
                    acc = Some(match acc {
                        None => f.clone(),
                        Some(p) => &p * f,
                    });
                }
            }
            let series =
                acc.unwrap_or_else(|| QSeries::monomial(Coefficient::one(), 0, prec.max(1)));
            finish(alpha, series, d, prec)
        })
        .collect()
}

fn check_weight(m: u32) -> Result<()> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "weight must be even and at least 2, got {m}"
        )));
    }
    Ok(())
}

fn cached_product(
    forms: &[QSeries],
    alpha: &[u32],
    cache: &mut HashMap<Vec<u32>, QSeries>,
) -> QSeries {
    let Some(last) = alpha.iter().rposition(|&a| a > 0) else {
        unreachable!("degree-0 monomials are never requested");
    };
    if alpha.iter().sum::<u32>() == 1 {
        return forms[last].clone();
    }
    if let Some(s) = cache.get(alpha) {
        return s.clone();
    }
    let mut rest = alpha.to_vec();
    rest[last] -= 1;
    let sub = cached_product(forms, &rest, cache);
    let product = &sub * &forms[last];
    cache.insert(alpha.to_vec(), product.clone());
    product
}

fn finish(alpha: ExponentVector, series: QSeries, d: u32, prec: usize) -> Result<MonomialProduct> {
    if series.prec() < prec {
        return Err(Error::precision(prec, series.prec()));
    }
    let series = series.truncate(prec);
    // Product of d cusp forms vanishes to order at least d.
    if series.valuation_bound() < d as usize {
        return Err(Error::DataIntegrity(format!(
            "monomial {alpha} has valuation {} < {d}; basis forms are not cusp forms",
            series.valuation_bound()
        )));
    }
    Ok(MonomialProduct { alpha, series })
}
