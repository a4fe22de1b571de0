//! Exact test of whether the cusp at infinity of a modular curve `X0(N)` is
//! an `m/2`-Weierstrass point.
//!
//! Starting from an echelon basis of weight-2 cusp forms as q-expansions,
//! all degree-`m/2` monomials are formed, reduced to echelon form over Z, and
//! the pivot exponents compared against `m/2, ..., m/2 + t - 1` where
//! `t = dim S_m^H`. A Wronskian order computation gives an independent check.
//!
//! ```
//! use x0_weierstrass::{decide, DecideOptions, Verdict};
//!
//! let v = decide(34, 4, &DecideOptions::default()).unwrap();
//! assert_eq!(v.verdict, Verdict::NotWeierstrass);
//! assert_eq!(v.pivots, vec![2, 3, 4, 5, 6, 7]);
//! ```

pub mod basis_io;
pub mod curve_tables;
pub mod decision;
pub mod echelon;
pub mod error;
pub mod monomials;
pub mod qseries;
pub mod records;
pub mod wronskian;

pub use basis_io::fetch::{fetch_basis, FetchConfig};
pub use basis_io::{bundled_basis, load_basis, required_precision, BasisSet, FormRecord};
pub use curve_tables::{classify, dim_smh, monomial_count, CurveClass, GenusBand};
pub use decision::{
    decide, decide_batch, decide_detailed, BasisSource, BatchSummary, DecideOptions, Decision,
    Method, NotApplicableReason, Verdict, VerdictSink, WeierstrassVerdict,
};
pub use echelon::{CoeffMatrix, EchelonResult};
pub use error::{Error, Result};
pub use qseries::{Coefficient, QSeries};
pub use records::{RecordFormat, ResultsFile, ScanRecord};
pub use wronskian::{wronskian, WronskianSeries, WronskianVerdict};
