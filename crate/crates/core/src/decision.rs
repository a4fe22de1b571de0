//! End-to-end verdict for a level `N` and even weight `m`: guards, basis
//! acquisition, the echelon pivot test and the Wronskian cross-check.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis_io::fetch::{fetch_basis, FetchConfig};
use crate::basis_io::{bundled_basis, load_basis, required_precision, BasisSet};
use crate::curve_tables::{classify, dim_smh, GenusBand};
use crate::echelon::{build_matrix, check_pivot_bounds, reduce, EchelonResult};
use crate::error::{Error, Result};
use crate::monomials::compute_monomials;
use crate::records::ScanRecord;
use crate::wronskian::{weierstrass_by_wronskian, WronskianVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Echelon,
    Wronskian,
    Both,
}

impl Method {
    fn runs_echelon(self) -> bool {
        matches!(self, Method::Echelon | Method::Both)
    }

    fn runs_wronskian(self) -> bool {
        matches!(self, Method::Wronskian | Method::Both)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Echelon => "echelon",
            Method::Wronskian => "wronskian",
            Method::Both => "both",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "echelon" => Ok(Method::Echelon),
            "wronskian" => Ok(Method::Wronskian),
            "both" => Ok(Method::Both),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotApplicableReason {
    /// Genus 0 or 1: there are no Weierstrass points.
    GenusAtMostOne,
    /// The monomial method needs a non-hyperelliptic curve.
    Hyperelliptic,
}

impl fmt::Display for NotApplicableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotApplicableReason::GenusAtMostOne => "genus <= 1, no Weierstrass points",
            NotApplicableReason::Hyperelliptic => "hyperelliptic, monomial method invalid",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason")]
pub enum Verdict {
    IsWeierstrass,
    NotWeierstrass,
    NotApplicable(NotApplicableReason),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::IsWeierstrass => f.write_str("IsWeierstrass"),
            Verdict::NotWeierstrass => f.write_str("NotWeierstrass"),
            Verdict::NotApplicable(_) => f.write_str("NotApplicable"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassVerdict {
    pub level: u64,
    pub weight: u32,
    /// `None` when the run was refused before a basis was needed.
    pub genus: Option<usize>,
    /// `dim S^H_m`, when the genus is known.
    pub t: Option<usize>,
    pub pivots: Vec<usize>,
    pub verdict: Verdict,
    pub methods_run: Vec<Method>,
    pub agreement: bool,
    pub precision_used: Option<usize>,
    /// `ord_q W` when the Wronskian ran.
    pub wronskian_order: Option<usize>,
    /// Derived check: does the last pivot exceed `m/2 + t - 1`?
    pub last_pivot_exceeds: Option<bool>,
}

impl WeierstrassVerdict {
    fn not_applicable(
        level: u64,
        weight: u32,
        genus: Option<usize>,
        reason: NotApplicableReason,
    ) -> Self {
        WeierstrassVerdict {
            level,
            weight,
            genus,
            t: genus.map(|g| dim_smh(g, weight)),
            pivots: Vec::new(),
            verdict: Verdict::NotApplicable(reason),
            methods_run: Vec::new(),
            agreement: true,
            precision_used: None,
            wronskian_order: None,
            last_pivot_exceeds: None,
        }
    }

    /// `"NOT a 2-Weierstrass point"` style summary line.
    pub fn headline(&self) -> String {
        let order = self.weight / 2;
        match self.verdict {
            Verdict::IsWeierstrass => {
                format!(
                    "the cusp at infinity of X0({}) IS a {order}-Weierstrass point",
                    self.level
                )
            }
            Verdict::NotWeierstrass => {
                format!(
                    "the cusp at infinity of X0({}) is NOT a {order}-Weierstrass point",
                    self.level
                )
            }
            Verdict::NotApplicable(reason) => format!("not applicable: {reason}"),
        }
    }
}

/// Where the weight-2 basis comes from.
#[derive(Clone, Debug, Default)]
pub enum BasisSource {
    /// Bundled fixture if present, otherwise the cache / upstream fetch.
    #[default]
    Auto,
    Bundled,
    File(PathBuf),
    Fetch,
    Provided(BasisSet),
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub method: Method,
    /// Overrides the computed weight-2 precision.
    pub precision: Option<usize>,
    pub source: BasisSource,
    pub allow_hyperelliptic_g2_m4: bool,
    pub fetch: FetchConfig,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            method: Method::Both,
            precision: None,
            source: BasisSource::Auto,
            allow_hyperelliptic_g2_m4: false,
            fetch: FetchConfig::from_env(),
        }
    }
}

/// A verdict together with the echelon data behind it.
#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: WeierstrassVerdict,
    pub echelon: Option<EchelonResult>,
    pub wronskian: Option<WronskianVerdict>,
}

pub fn decide(level: u64, m: u32, opts: &DecideOptions) -> Result<WeierstrassVerdict> {
    decide_detailed(level, m, opts).map(|d| d.verdict)
}

pub fn decide_detailed(level: u64, m: u32, opts: &DecideOptions) -> Result<Decision> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "weight must be even and at least 2, got {m}"
        )));
    }
    let class = classify(level);
    let refused = |genus, reason| Decision {
        verdict: WeierstrassVerdict::not_applicable(level, m, genus, reason),
        echelon: None,
        wronskian: None,
    };
    match class.genus_band {
        GenusBand::Zero => return Ok(refused(Some(0), NotApplicableReason::GenusAtMostOne)),
        GenusBand::One => return Ok(refused(Some(1), NotApplicableReason::GenusAtMostOne)),
        GenusBand::AtLeastTwo => {}
    }
    // Weight 2 needs no monomials, so hyperelliptic curves are fine there.
    let hyperelliptic_guard = class.is_hyperelliptic() && m >= 4;
    if hyperelliptic_guard && !(opts.allow_hyperelliptic_g2_m4 && m == 4) {
        return Ok(refused(None, NotApplicableReason::Hyperelliptic));
    }

    let basis = acquire_basis(level, opts)?;
    if basis.level != level {
        return Err(Error::Validation(format!(
            "basis is for level {}, requested {level}",
            basis.level
        )));
    }
    let genus = basis.genus();
    if hyperelliptic_guard && genus != 2 {
        return Ok(refused(Some(genus), NotApplicableReason::Hyperelliptic));
    }

    let t = dim_smh(genus, m);
    let recommended = required_precision(genus, m, opts.method);
    let prec = opts.precision.unwrap_or(recommended);
    if basis.prec < prec {
        return Err(Error::precision(prec, basis.prec));
    }
    let basis = basis.truncate(prec);
    let half = m as usize / 2;
    let echelon = run_echelon(&basis, m).map_err(|e| match e {
        Error::PrecisionExceeded { .. } => Error::precision(recommended.max(prec + 1), prec),
        other => other,
    })?;

    if echelon.rank != t {
        return Err(Error::DataIntegrity(format!(
            "monomials span {} dimensions but dim S^H_{m} = {t} for genus {genus}",
            echelon.rank
        )));
    }
    check_pivot_bounds(&echelon.pivots, genus, m)?;

    let consecutive: Vec<usize> = (half..half + t).collect();
    let echelon_is = echelon.pivots != consecutive;
    let last_pivot_exceeds = *echelon.pivots.last().expect("rank >= 1") > half + t - 1;
    if last_pivot_exceeds != echelon_is {
        return Err(Error::DataIntegrity(
            "last-pivot diagnostic disagrees with the pivot test".into(),
        ));
    }

    let mut methods_run = Vec::new();
    if opts.method.runs_echelon() {
        methods_run.push(Method::Echelon);
    }
    let wronskian = if opts.method.runs_wronskian() {
        methods_run.push(Method::Wronskian);
        Some(
            weierstrass_by_wronskian(&echelon, genus, m).map_err(|e| match e {
                Error::PrecisionExceeded { .. } => {
                    Error::precision(recommended.max(prec + 1), prec)
                }
                other => other,
            })?,
        )
    } else {
        None
    };

    let is_weierstrass = match (opts.method, &wronskian) {
        (Method::Echelon, _) => echelon_is,
        (_, Some(w)) if opts.method == Method::Wronskian => w.is_weierstrass,
        (_, Some(w)) => {
            if w.is_weierstrass != echelon_is {
                return Err(Error::MethodDisagreement { level, weight: m });
            }
            echelon_is
        }
        (_, None) => unreachable!("wronskian requested"),
    };

    let verdict = WeierstrassVerdict {
        level,
        weight: m,
        genus: Some(genus),
        t: Some(t),
        pivots: echelon.pivots.clone(),
        verdict: if is_weierstrass {
            Verdict::IsWeierstrass
        } else {
            Verdict::NotWeierstrass
        },
        methods_run,
        agreement: true,
        precision_used: Some(prec),
        wronskian_order: wronskian.as_ref().map(|w| w.order),
        last_pivot_exceeds: Some(last_pivot_exceeds),
    };
    Ok(Decision {
        verdict,
        echelon: Some(echelon),
        wronskian,
    })
}

/// Monomials, matrix and reduction for an already truncated basis.
pub fn run_echelon(basis: &BasisSet, m: u32) -> Result<EchelonResult> {
    let genus = basis.genus();
    let monomial_prec = basis.prec + m as usize / 2 - 1;
    let monomials = compute_monomials(basis, m, monomial_prec)?;
    let matrix = build_matrix(&monomials, genus, m)?;
    reduce(&matrix, &monomials)
}

fn acquire_basis(level: u64, opts: &DecideOptions) -> Result<BasisSet> {
    let min_prec = opts.precision.unwrap_or(0);
    match &opts.source {
        BasisSource::Provided(b) => {
            b.validate()?;
            Ok(b.clone())
        }
        BasisSource::File(path) => load_basis(path),
        BasisSource::Bundled => bundled_basis(level).unwrap_or_else(|| {
            Err(Error::NoBasis {
                level,
                reason: "no bundled fixture".into(),
            })
        }),
        BasisSource::Fetch => fetch_basis(level, min_prec, &opts.fetch),
        BasisSource::Auto => match bundled_basis(level) {
            Some(b) => b,
            None => fetch_basis(level, min_prec, &opts.fetch).map_err(|e| match e {
                Error::Network(msg) => Error::NoBasis { level, reason: msg },
                other => other,
            }),
        },
    }
}

/// Receives one record per grid cell; implementations serialize appends.
pub trait VerdictSink: Sync {
    fn record(&self, record: &ScanRecord) -> Result<()>;
}

/// Collects records in memory.
#[derive(Default)]
pub struct MemorySink(pub Mutex<Vec<ScanRecord>>);

impl VerdictSink for MemorySink {
    fn record(&self, record: &ScanRecord) -> Result<()> {
        self.0.lock().expect("sink poisoned").push(record.clone());
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub is_weierstrass: usize,
    pub not_weierstrass: usize,
    pub not_applicable: usize,
    pub failures: usize,
    pub skipped: usize,
}

impl BatchSummary {
    pub fn total(&self) -> usize {
        self.is_weierstrass + self.not_weierstrass + self.not_applicable + self.failures
    }
}

/// Runs [`decide`] over `levels x weights` on `jobs` worker threads
/// (0 = rayon default). Cells for which `skip` returns true are not run.
/// Failures are recorded and counted; the batch always completes.
pub fn decide_batch(
    levels: &[u64],
    weights: &[u32],
    opts: &DecideOptions,
    sink: &dyn VerdictSink,
    jobs: usize,
    skip: &(dyn Fn(u64, u32) -> bool + Sync),
) -> Result<BatchSummary> {
    let cells: Vec<(u64, u32)> = levels
        .iter()
        .flat_map(|&n| weights.iter().map(move |&m| (n, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let summary = Mutex::new(BatchSummary::default());
    let sink_error: Mutex<Option<Error>> = Mutex::new(None);
    pool.install(|| {
        cells.par_iter().for_each(|&(level, m)| {
            if skip(level, m) {
                summary.lock().expect("summary poisoned").skipped += 1;
                return;
            }
            let outcome = decide(level, m, opts);
            let record = match &outcome {
                Ok(v) => ScanRecord::from_verdict(v),
                Err(e) => ScanRecord::failure(level, m, e),
            };
            {
                let mut s = summary.lock().expect("summary poisoned");
                match &outcome {
                    Ok(v) => match v.verdict {
                        Verdict::IsWeierstrass => s.is_weierstrass += 1,
                        Verdict::NotWeierstrass => s.not_weierstrass += 1,
                        Verdict::NotApplicable(_) => s.not_applicable += 1,
                    },
                    Err(_) => s.failures += 1,
                }
            }
            if let Err(e) = sink.record(&record) {
                sink_error
                    .lock()
                    .expect("sink error poisoned")
                    .get_or_insert(e);
            }
        });
    });
    if let Some(e) = sink_error.into_inner().expect("sink error poisoned") {
        return Err(e);
    }
    Ok(summary.into_inner().expect("summary poisoned"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> DecideOptions {
        DecideOptions {
            fetch: FetchConfig {
                offline: true,
                cache_dir: std::env::temp_dir().join("x0wp-decision-unit"),
                ..FetchConfig::default()
            },
            ..DecideOptions::default()
        }
    }

    #[test]
    fn level_34_is_not_weierstrass() {
        let v = decide(34, 4, &opts()).unwrap();
        assert_eq!(v.verdict, Verdict::NotWeierstrass);
        assert_eq!(v.pivots, vec![2, 3, 4, 5, 6, 7]);
        assert_eq!((v.genus, v.t), (Some(3), Some(6)));
        assert_eq!(v.methods_run, vec![Method::Echelon, Method::Wronskian]);
        assert_eq!(v.wronskian_order, Some(27));
        assert!(v.headline().contains("NOT a 2-Weierstrass point"));
    }

    #[test]
    fn level_55_is_weierstrass() {
        let v = decide(55, 4, &opts()).unwrap();
        assert_eq!(v.verdict, Verdict::IsWeierstrass);
        assert_eq!(v.pivots.last(), Some(&14));
        assert_eq!(v.t, Some(12));
        assert_eq!(v.last_pivot_exceeds, Some(true));
    }

    #[test]
    fn guards() {
        let v = decide(25, 6, &opts()).unwrap();
        assert_eq!(
            v.verdict,
            Verdict::NotApplicable(NotApplicableReason::GenusAtMostOne)
        );
        let v = decide(40, 4, &opts()).unwrap();
        assert_eq!(
            v.verdict,
            Verdict::NotApplicable(NotApplicableReason::Hyperelliptic)
        );
        // Weight 2 is allowed on hyperelliptic curves.
        let v = decide(40, 2, &opts()).unwrap();
        assert_eq!(v.t, Some(3));
    }

    #[test]
    fn hyperelliptic_override_only_for_genus_two() {
        let mut o = opts();
        o.allow_hyperelliptic_g2_m4 = true;
        let v = decide(23, 4, &o).unwrap();
        assert_eq!(v.genus, Some(2));
        assert_eq!(v.t, Some(3));
        assert!(matches!(
            v.verdict,
            Verdict::IsWeierstrass | Verdict::NotWeierstrass
        ));
        let v = decide(40, 4, &o).unwrap();
        assert_eq!(
            v.verdict,
            Verdict::NotApplicable(NotApplicableReason::Hyperelliptic)
        );
        let v = decide(23, 6, &o).unwrap();
        assert_eq!(
            v.verdict,
            Verdict::NotApplicable(NotApplicableReason::Hyperelliptic)
        );
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(
            decide(34, 3, &opts()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            decide(0, 4, &opts()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn too_little_precision_recommends_more() {
        let mut o = opts();
        o.precision = Some(9);
        match decide(34, 4, &o) {
            Err(Error::PrecisionExceeded {
                required,
                available,
            }) => {
                assert_eq!(available, 9);
                assert_eq!(required, required_precision(3, 4, Method::Both));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_basis_offline() {
        let v = decide(101, 4, &opts());
        assert!(matches!(v, Err(Error::NoBasis { level: 101, .. })), "{v:?}");
    }

    #[test]
    fn batch_counts() {
        let sink = MemorySink::default();
        let s = decide_batch(&[25, 34, 40, 55], &[4], &opts(), &sink, 2, &|_, _| false).unwrap();
        assert_eq!(
            (
                s.is_weierstrass,
                s.not_weierstrass,
                s.not_applicable,
                s.failures
            ),
            (1, 1, 2, 0)
        );
        assert_eq!(sink.0.lock().unwrap().len(), 4);
        let s = decide_batch(&[], &[4], &opts(), &sink, 1, &|_, _| false).unwrap();
        assert_eq!(s, BatchSummary::default());
    }

    #[test]
    fn verdict_json_round_trip() {
        let v = decide(55, 4, &opts()).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let back: WeierstrassVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        let na = decide(40, 4, &opts()).unwrap();
        let back: WeierstrassVerdict =
            serde_json::from_str(&serde_json::to_string(&na).unwrap()).unwrap();
        assert_eq!(back, na);
    }
}
