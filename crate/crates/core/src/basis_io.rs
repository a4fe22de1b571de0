//! Weight-2 cusp form bases for Gamma0(N): the plain-text basis format,
//! validation, bundled fixtures and the precision each method needs.
//!
//! File format (UTF-8):
//!
//! ```text
//! level=34 weight=2 genus=3 prec=121 echelon=true
//! form 0: 1,0,0,-2,-2,0,4,...
//! form 1: 0,1,0,-1,0,...
//! ```
//!
//! Each form line lists `a_1, ..., a_{prec-1}` as exact decimal integers.
//! `echelon=true` is optional; when present, the loader also checks that the
//! leading exponents are pairwise distinct.

pub mod fetch;

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::curve_tables::{classify, GenusBand};
use crate::decision::Method;
use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QSeries};

/// Extra coefficients kept beyond the bare minimum each method needs.
pub const PRECISION_GUARD: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormRecord {
    pub label: String,
    /// `a_1, ..., a_{prec-1}`; `a_0 = 0` is implicit.
    pub coefficients: Vec<BigInt>,
    pub prec: usize,
}

impl FormRecord {
    pub fn series(&self) -> QSeries {
        let coeffs = std::iter::once(Coefficient::zero())
            .chain(
                self.coefficients
                    .iter()
                    .map(|a| Coefficient::from_integer(a.clone())),
            )
            .collect();
        QSeries::from_coeffs(coeffs, self.prec)
    }

    /// Leading exponent, `None` for a form that vanishes to its precision.
    pub fn leading_exponent(&self) -> Option<usize> {
        self.coefficients
            .iter()
            .position(|a| !a.is_zero())
            .map(|i| i + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSet {
    pub level: u64,
    pub forms: Vec<FormRecord>,
    /// Common precision of all forms.
    pub prec: usize,
    /// The source asserts the forms are in echelon form.
    pub echelon: bool,
}

impl BasisSet {
    pub const WEIGHT: u32 = 2;

    /// Builds an (unvalidated) basis from integral cusp-form q-expansions.
    pub fn from_series(level: u64, series: &[QSeries], echelon: bool) -> Result<Self> {
        let prec = series.iter().map(QSeries::prec).min().unwrap_or(2);
        let mut forms = Vec::with_capacity(series.len());
        for (i, s) in series.iter().enumerate() {
            let ints = s.truncate(prec).to_integers().ok_or_else(|| {
                Error::Validation(format!("form {i} has non-integral coefficients"))
            })?;
            if !ints[0].is_zero() {
                return Err(Error::Validation(format!(
                    "form {i} has nonzero constant term (not a cusp form)"
                )));
            }
            forms.push(FormRecord {
                label: format!("f{i}"),
                coefficients: ints[1..].to_vec(),
                prec,
            });
        }
        Ok(BasisSet {
            level,
            forms,
            prec,
            echelon,
        })
    }

    pub fn genus(&self) -> usize {
        self.forms.len()
    }

    pub fn series(&self) -> Vec<QSeries> {
        self.forms.iter().map(FormRecord::series).collect()
    }

    /// Keeps only the first `prec` terms of every form (never extends).
    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec).max(2);
        BasisSet {
            level: self.level,
            forms: self
                .forms
                .iter()
                .map(|f| FormRecord {
                    label: f.label.clone(),
                    coefficients: f.coefficients[..prec - 1].to_vec(),
                    prec,
                })
                .collect(),
            prec,
            echelon: self.echelon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.prec < 2 {
            return Err(Error::Validation(format!("precision {} < 2", self.prec)));
        }
        for (i, f) in self.forms.iter().enumerate() {
            if f.prec != self.prec || f.coefficients.len() != self.prec - 1 {
                return Err(Error::Validation(format!(
                    "form {i} does not carry exactly {} coefficients",
                    self.prec - 1
                )));
            }
        }
        for i in 0..self.forms.len() {
            for j in 0..i {
                if self.forms[i].coefficients == self.forms[j].coefficients {
                    return Err(Error::Validation(format!(
                        "forms {j} and {i} are identical"
                    )));
                }
            }
        }
        let genus = self.genus();
        match classify(self.level).genus_band {
            GenusBand::Zero if genus != 0 => {
                return Err(Error::Validation(format!(
                    "X0({}) has genus 0 but the basis has {genus} forms",
                    self.level
                )))
            }
            GenusBand::One if genus != 1 => {
                return Err(Error::Validation(format!(
                    "X0({}) has genus 1 but the basis has {genus} forms",
                    self.level
                )))
            }
            GenusBand::AtLeastTwo if genus < 2 => {
                return Err(Error::Validation(format!(
                    "X0({}) has genus at least 2 but the basis has {genus} forms",
                    self.level
                )))
            }
            _ => {}
        }
        let class = classify(self.level);
        if class.nonhyperelliptic && genus < 3 {
            return Err(Error::Validation(format!(
                "X0({}) is non-hyperelliptic, so its genus is at least 3; basis has {genus} forms",
                self.level
            )));
        }
        if self.echelon {
            let mut leads = Vec::with_capacity(genus);
            for (i, f) in self.forms.iter().enumerate() {
                let lead = f.leading_exponent().ok_or_else(|| {
                    Error::Validation(format!("form {i} vanishes to precision {}", self.prec))
                })?;
                if leads.contains(&lead) {
                    return Err(Error::Validation(format!(
                        "echelon basis has repeated leading exponent {lead}"
                    )));
                }
                leads.push(lead);
            }
        }
        let rank = rational_rank(
            self.forms
                .iter()
                .map(|f| {
                    f.coefficients
                        .iter()
                        .map(|a| BigRational::from_integer(a.clone()))
                        .collect()
                })
                .collect(),
        );
        if rank != genus {
            return Err(Error::Validation(format!(
                "forms are linearly dependent up to q^{} (rank {rank} < {genus})",
                self.prec - 1
            )));
        }
        Ok(())
    }
}

/// Rank over Q by plain Gaussian elimination.
fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, sel);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &pivot;
            for c in col..ncols {
                let delta = &factor * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Reduced row echelon form over Q, rescaled so each row is a primitive
/// integer vector with positive leading entry. Zero rows are dropped.
pub(crate) fn primitive_echelon(mut rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, sel);
        let inv = BigRational::one() / &rows[rank][col];
        for c in col..ncols {
            rows[rank][c] = &rows[rank][c] * &inv;
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..ncols {
                let delta = &factor * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows.into_iter()
        .map(|r| primitive_integer_row(&r))
        .collect()
}

fn primitive_integer_row(row: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = row.iter().map(|c| (c * &lcm).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
    if content.is_zero() {
        return ints;
    }
    let sign = ints
        .iter()
        .find(|a| !a.is_zero())
        .map_or(BigInt::one(), |a| {
            if a < &BigInt::zero() {
                -BigInt::one()
            } else {
                BigInt::one()
            }
        });
    let d = content * sign;
    ints.into_iter().map(|a| a / &d).collect()
}

pub fn parse_basis(text: &str) -> Result<BasisSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header line".into(),
    })?;
    let perr = |line: usize, message: String| Error::Parse { line, message };

    let (mut level, mut weight, mut genus, mut prec, mut echelon) = (None, None, None, None, false);
    for token in header.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| perr(hline, format!("expected key=value, found {token:?}")))?;
        let num = || {
            value.parse::<u64>().map_err(|_| {
                perr(
                    hline,
                    format!("{key}: not a non-negative integer: {value:?}"),
                )
            })
        };
        match key {
            "level" => level = Some(num()?),
            "weight" => weight = Some(num()?),
            "genus" => genus = Some(num()? as usize),
            "prec" => prec = Some(num()? as usize),
            "echelon" => {
                echelon = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => {
                        return Err(perr(
                            hline,
                            format!("echelon: expected a boolean, found {value:?}"),
                        ))
                    }
                }
            }
            _ => return Err(perr(hline, format!("unknown header key {key:?}"))),
        }
    }
    let missing = |k: &str| perr(hline, format!("header lacks {k}="));
    let level = level.ok_or_else(|| missing("level"))?;
    let weight = weight.ok_or_else(|| missing("weight"))?;
    let genus = genus.ok_or_else(|| missing("genus"))?;
    let prec = prec.ok_or_else(|| missing("prec"))?;
    if level == 0 {
        return Err(perr(hline, "level must be positive".into()));
    }
    if weight != u64::from(BasisSet::WEIGHT) {
        return Err(Error::Validation(format!("weight {weight} is not 2")));
    }
    if prec < 2 {
        return Err(Error::Validation(format!("precision {prec} < 2")));
    }

    let mut forms = Vec::with_capacity(genus);
    for (lineno, line) in lines {
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| perr(lineno, "expected `form <index>: a1,a2,...`".into()))?;
        let index = head
            .trim()
            .strip_prefix("form")
            .map(str::trim)
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| perr(lineno, format!("bad form label {head:?}")))?;
        if index != forms.len() {
            return Err(perr(
                lineno,
                format!("expected form {}, found form {index}", forms.len()),
            ));
        }
        let coefficients = body
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<BigInt>()
                    .map_err(|_| perr(lineno, format!("not an integer: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coefficients.len() != prec - 1 {
            return Err(perr(
                lineno,
                format!(
                    "form {index} has {} coefficients, header prec={prec} requires {}",
                    coefficients.len(),
                    prec - 1
                ),
            ));
        }
        forms.push(FormRecord {
            label: format!("f{index}"),
            coefficients,
            prec,
        });
    }
    if forms.len() != genus {
        return Err(Error::Validation(format!(
            "header declares genus {genus} but {} forms are listed",
            forms.len()
        )));
    }
    let basis = BasisSet {
        level,
        forms,
        prec,
        echelon,
    };
    basis.validate()?;
    Ok(basis)
}

pub fn format_basis(basis: &BasisSet) -> String {
    let mut out = format!(
        "level={} weight=2 genus={} prec={}",
        basis.level,
        basis.genus(),
        basis.prec
    );
    if basis.echelon {
        out.push_str(" echelon=true");
    }
    out.push('\n');
    for (i, f) in basis.forms.iter().enumerate() {
        let _ = write!(out, "form {i}: ");
        for (k, a) in f.coefficients.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{a}");
        }
        out.push('\n');
    }
    out
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<BasisSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_basis(&text)
}

pub fn write_basis(path: impl AsRef<Path>, basis: &BasisSet) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, format_basis(basis)).map_err(|e| Error::io(path, e))
}

include!(concat!(env!("OUT_DIR"), "/bundled_fixtures.rs"));

/// Levels with a basis compiled into the library, ascending.
pub fn bundled_levels() -> Vec<u64> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// The bundled basis for `level`, if one ships with the library.
pub fn bundled_basis(level: u64) -> Option<Result<BasisSet>> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == level)
        .map(|(_, text)| parse_basis(text))
}

/// Number of columns of the monomial matrix: `m/2 + m(g-1)`.
pub fn column_bound(genus: usize, m: u32) -> usize {
    let half = m as usize / 2;
    half + m as usize * genus.saturating_sub(1)
}

/// Minimal weight-2 precision (plus [`PRECISION_GUARD`]) for which every
/// coefficient read downstream succeeds.
///
/// Echelon: the matrix reads monomial coefficients through `q^B`,
/// `B = m/2 + m(g-1)`, so each degree-`m/2` monomial needs precision `B + 1`.
/// A product of `d = m/2` forms of precision `P` and valuation `>= 1` is
/// known modulo `q^(P + d - 1)` (each extra factor adds its valuation), hence
/// `P >= B + 2 - d`.
///
/// Wronskian: `W` is built from the reduced rows `F_u`, each known modulo
/// `q^(P + d - 1)`, with pivots `i_u <= B`. Factoring `q^(i_u)` out of row
/// `u` leaves entries known modulo `q^(P + d - 1 - i_u)`, so `W` is known
/// modulo `q^(sum i_u + P + d - 1 - max i_u)`. Its valuation `sum i_u` is
/// decidable (and hence comparable with `t(m+t-1)/2 + 1`) exactly when
/// `P + d - 1 > max i_u`, which `P >= B + 2 - d` guarantees.
pub fn required_precision(genus: usize, m: u32, method: Method) -> usize {
    assert!(m >= 2 && m.is_multiple_of(2), "weight must be even and at least 2");
    assert!(genus >= 1, "required precision is defined for genus >= 1");
    let half = m as usize / 2;
    let bound = column_bound(genus, m);
    let echelon = bound + 2 - half + PRECISION_GUARD;
    let wronskian = bound + 2 - half + PRECISION_GUARD;
    match method {
        Method::Echelon => echelon,
        Method::Wronskian => wronskian,
        Method::Both => echelon.max(wronskian),
    }
}
