//! Truncated q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] is a power series `sum a_n q^n` known modulo `O(q^prec)`.
//! Every operation computes the rigorous precision of its result, and reading
//! a coefficient at or beyond that precision is an error rather than a silent
//! zero.
//!
//! Multiplication uses the valuation-aware precision rule. Write
//! `a = A + O(q^pa)` and `b = B + O(q^pb)` where `A`, `B` are the known parts
//! with valuations `va`, `vb` (or `va = pa` when `a` is zero to its precision).
//! Then `ab = AB + A*O(q^pb) + B*O(q^pa) + O(q^(pa+pb))`, so the product is
//! known modulo `q^min(pa + vb, pb + va)`; the `pa + pb` term never binds
//! because `va <= pa`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact coefficient of a q-expansion. `BigRational` keeps itself in lowest
/// terms with a positive denominator.
pub type Coefficient = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    // Dense coefficients a_0, a_1, ...; trailing zeros are never stored, so
    // `len() <= prec` and two equal series compare equal structurally.
    coeffs: Vec<Coefficient>,
    prec: usize,
}

impl QSeries {
    /// The zero series known modulo `O(q^prec)`.
    pub fn zero(prec: usize) -> Self {
        assert!(prec >= 1, "q-series precision must be at least 1");
        QSeries {
            coeffs: Vec::new(),
            prec,
        }
    }

    /// `c * q^n + O(q^prec)`.
    pub fn monomial(c: Coefficient, n: usize, prec: usize) -> Self {
        let mut coeffs = vec![Coefficient::zero(); n + 1];
        coeffs[n] = c;
        Self::from_coeffs(coeffs, prec)
    }

    /// Builds a series from `a_0, a_1, ...`; entries at or beyond `prec` are
    /// dropped.
    pub fn from_coeffs(mut coeffs: Vec<Coefficient>, prec: usize) -> Self {
        assert!(prec >= 1, "q-series precision must be at least 1");
        coeffs.truncate(prec);
        let mut s = QSeries { coeffs, prec };
        s.normalize();
        s
    }

    pub fn from_integers<I, T>(coeffs: I, prec: usize) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::from_coeffs(
            coeffs
                .into_iter()
                .map(|c| Coefficient::from_integer(c.into()))
                .collect(),
            prec,
        )
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent with a nonzero coefficient. `None` means the series is
    /// zero to its known precision, i.e. the valuation is at least `prec`.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// The valuation when known, otherwise `prec`. Always a valid lower bound.
    pub fn valuation_bound(&self) -> usize {
        self.valuation().unwrap_or(self.prec)
    }

    /// Coefficient of `q^n`; fails with `PrecisionExceeded` when `n >= prec`.
    pub fn coefficient(&self, n: usize) -> Result<Coefficient> {
        if n >= self.prec {
            return Err(Error::precision(n + 1, self.prec));
        }
        Ok(self
            .coeffs
            .get(n)
            .cloned()
            .unwrap_or_else(Coefficient::zero))
    }

    /// Leading coefficient, if the series is nonzero to its precision.
    pub fn leading_coefficient(&self) -> Option<&Coefficient> {
        self.valuation().map(|v| &self.coeffs[v])
    }

    /// Nonzero terms `(n, a_n)` in increasing order of `n`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Coefficient)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Reduces the known precision to `min(prec, self.prec)`.
    pub fn truncate(&self, prec: usize) -> Self {
        let p = prec.min(self.prec);
        Self::from_coeffs(self.coeffs.iter().take(p).cloned().collect(), p)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            prec: self.prec,
        }
    }

    /// `theta = q d/dq`: the coefficient of `q^n` becomes `n * a_n`.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * Coefficient::from_integer(BigInt::from(n)))
            .collect();
        Self::from_coeffs(coeffs, self.prec)
    }

    /// Applies `theta` `k` times.
    pub fn theta_pow(&self, k: u32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * Coefficient::from_integer(BigInt::from(n).pow(k)))
            .collect();
        Self::from_coeffs(coeffs, self.prec)
    }

    /// `q^-shift * self`. Requires that the series is divisible by `q^shift`
    /// and that something remains known afterwards (`shift < prec`).
    pub fn shift_down(&self, shift: usize) -> Result<Self> {
        if shift >= self.prec {
            return Err(Error::precision(shift + 1, self.prec));
        }
        if self.coeffs.iter().take(shift).any(|c| !c.is_zero()) {
            return Err(Error::InvalidArgument(format!(
                "series is not divisible by q^{shift}"
            )));
        }
        Ok(QSeries {
            coeffs: self.coeffs.iter().skip(shift).cloned().collect(),
            prec: self.prec - shift,
        })
    }

    /// `q^shift * self`, known modulo `q^(prec + shift)`.
    pub fn shift_up(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero(self.prec + shift);
        }
        let mut coeffs = vec![Coefficient::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        QSeries {
            coeffs,
            prec: self.prec + shift,
        }
    }

    /// `f(q^e)`; known modulo `q^(prec * e)`.
    pub fn substitute_power(&self, e: usize) -> Self {
        assert!(e >= 1, "substitution exponent must be positive");
        let mut coeffs = vec![Coefficient::zero(); self.coeffs.len().saturating_sub(1) * e + 1];
        for (n, a) in self.terms() {
            coeffs[n * e] = a.clone();
        }
        Self::from_coeffs(coeffs, self.prec * e)
    }

    /// Product precision under the valuation-aware rule (see module docs).
    pub fn product_precision(&self, other: &QSeries) -> usize {
        (self.prec + other.valuation_bound()).min(other.prec + self.valuation_bound())
    }

    /// True when all stored coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients `a_0 .. a_{prec-1}`; `None` if some coefficient
    /// is not integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        (0..self.prec)
            .map(|n| {
                let c = self
                    .coeffs
                    .get(n)
                    .cloned()
                    .unwrap_or_else(Coefficient::zero);
                c.is_integer().then(|| c.to_integer())
            })
            .collect()
    }
}

impl Add for &QSeries {
    type Output = QSeries;

    fn add(self, rhs: &QSeries) -> QSeries {
        let prec = self.prec.min(rhs.prec);
        let len = self.coeffs.len().max(rhs.coeffs.len()).min(prec);
        let coeffs = (0..len)
            .map(|n| match (self.coeffs.get(n), rhs.coeffs.get(n)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Coefficient::zero(),
            })
            .collect();
        QSeries::from_coeffs(coeffs, prec)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            prec: self.prec,
        }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;

    fn mul(self, rhs: &QSeries) -> QSeries {
        let prec = self.product_precision(rhs);
        let mut coeffs = vec![Coefficient::zero(); prec];
        for (i, a) in self.terms() {
            if i >= prec {
                break;
            }
            for (j, b) in rhs.terms() {
                if i + j >= prec {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        QSeries::from_coeffs(coeffs, prec)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                (&self).$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        -&self
    }
}

/// Conventional rendering: `q^2 - 4q^5 + 12q^8 + O(q^11)`.
impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = abs.is_one();
            match n {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !unit {
                        if abs.is_integer() {
                            write!(f, "{abs}")?;
                        } else {
                            write!(f, "({abs})")?;
                        }
                    }
                    if n == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{n}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.prec)
    }
}
