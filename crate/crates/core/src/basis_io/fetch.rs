//! Client for an LMFDB-style REST API, with an on-disk cache in the native
//! basis format.
//!
//! The upstream serves newforms, not echelon bases of S2(Gamma0(N)), so the
//! basis is assembled locally: for every divisor `M` of `N` the newforms of
//! level `M` are listed (`mf_newforms`), their Fourier coefficients are read
//! as coordinate vectors in a Q-basis of the Hecke field (`mf_hecke_nf`,
//! field `an`), each coordinate series `g` contributes the oldforms `g(q^e)`
//! for `e | N/M`, and the span is brought to echelon form with primitive
//! integral rows.

use std::cell::Cell;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use super::{load_basis, primitive_echelon, write_basis, BasisSet, FormRecord};
use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QSeries};

pub const BASE_URL_ENV: &str = "X0WP_BASE_URL";
pub const CACHE_DIR_ENV: &str = "X0WP_CACHE_DIR";
pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org/api";

#[derive(Clone, Debug)]
pub struct FetchConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    /// Disables every network request; only the cache is consulted.
    pub offline: bool,
    /// Minimum spacing between consecutive requests.
    pub request_delay: Duration,
    pub timeout: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: default_cache_dir(),
            offline: false,
            request_delay: Duration::from_millis(250),
            timeout: Duration::from_secs(30),
        }
    }
}

impl FetchConfig {
    /// Defaults overridden by `X0WP_BASE_URL` and `X0WP_CACHE_DIR`.
    pub fn from_env() -> Self {
        let mut cfg = FetchConfig::default();
        if let Ok(url) = std::env::var(BASE_URL_ENV) {
            if !url.is_empty() {
                cfg.base_url = url;
            }
        }
        if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
            if !dir.is_empty() {
                cfg.cache_dir = PathBuf::from(dir);
            }
        }
        cfg
    }

    pub fn cache_path(&self, level: u64) -> PathBuf {
        self.cache_dir.join(format!("gamma0_{level:03}.basis"))
    }
}

fn default_cache_dir() -> PathBuf {
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME").filter(|s| !s.is_empty()) {
        return PathBuf::from(xdg).join("x0wp");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|s| !s.is_empty()) {
        return PathBuf::from(home).join(".cache").join("x0wp");
    }
    PathBuf::from(".x0wp-cache")
}

/// Returns the cached basis for `level` if it has at least `min_prec`
/// precision, otherwise downloads, validates and caches it.
pub fn fetch_basis(level: u64, min_prec: usize, config: &FetchConfig) -> Result<BasisSet> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    let cache = config.cache_path(level);
    if cache.exists() {
        let cached = load_basis(&cache)?;
        if cached.level != level {
            return Err(Error::Validation(format!(
                "cache file {} holds level {}",
                cache.display(),
                cached.level
            )));
        }
        if cached.genus() == 0 || cached.prec >= min_prec {
            return Ok(cached);
        }
    }
    if config.offline {
        return Err(Error::Network(format!(
            "offline mode: no cached basis for level {level} with precision >= {min_prec}"
        )));
    }
    let basis = Client::new(config).download_basis(level)?;
    basis.validate()?;
    write_basis(&cache, &basis)?;
    if basis.genus() > 0 && basis.prec < min_prec {
        return Err(Error::precision(min_prec, basis.prec));
    }
    Ok(basis)
}

struct Client<'a> {
    agent: ureq::Agent,
    config: &'a FetchConfig,
    last_request: Cell<Option<Instant>>,
}

impl<'a> Client<'a> {
    fn new(config: &'a FetchConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Client {
            agent,
            config,
            last_request: Cell::new(None),
        }
    }

    fn get_json(&self, path: &str, query: &[(&str, String)]) -> Result<Value> {
        if let Some(prev) = self.last_request.get() {
            let elapsed = prev.elapsed();
            if elapsed < self.config.request_delay {
                std::thread::sleep(self.config.request_delay - elapsed);
            }
        }
        self.last_request.set(Some(Instant::now()));

        let url = format!("{}/{path}/", self.config.base_url.trim_end_matches('/'));
        let mut req = self.agent.get(&url);
        for (k, v) in query {
            req = req.query(k, v);
        }
        let mut resp = req
            .call()
            .map_err(|e| Error::Network(format!("GET {url}: {e}")))?;
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Network(format!("reading {url}: {e}")))?;
        serde_json::from_str(&body).map_err(|e| Error::UpstreamFormat(format!("{url}: {e}")))
    }

    fn data_array(value: &Value, what: &str) -> Result<Vec<Value>> {
        value
            .get("data")
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| Error::UpstreamFormat(format!("{what}: missing `data` array")))
    }

    fn newforms(&self, level: u64) -> Result<Vec<(String, usize)>> {
        let resp = self.get_json(
            "mf_newforms",
            &[
                ("level", level.to_string()),
                ("weight", "2".into()),
                ("char_order", "1".into()),
                ("_format", "json".into()),
                ("_fields", "label,dim".into()),
            ],
        )?;
        Self::data_array(&resp, "mf_newforms")?
            .iter()
            .map(|rec| {
                let label = rec.get("label").and_then(Value::as_str);
                let dim = rec.get("dim").and_then(Value::as_u64);
                match (label, dim) {
                    (Some(l), Some(d)) if d >= 1 => Ok((l.to_string(), d as usize)),
                    _ => Err(Error::UpstreamFormat(format!(
                        "mf_newforms record lacks label/dim: {rec}"
                    ))),
                }
            })
            .collect()
    }

    /// The `dim` coordinate series of a newform, each `sum_n c_{n,k} q^n`.
    fn coordinate_series(&self, label: &str, dim: usize) -> Result<Vec<QSeries>> {
        let resp = self.get_json(
            "mf_hecke_nf",
            &[
                ("label", label.to_string()),
                ("_format", "json".into()),
                ("_fields", "label,an".into()),
            ],
        )?;
        let records = Self::data_array(&resp, "mf_hecke_nf")?;
        let an = records
            .first()
            .and_then(|r| r.get("an"))
            .and_then(Value::as_array)
            .ok_or_else(|| Error::UpstreamFormat(format!("{label}: no `an` coefficients")))?;
        if an.is_empty() {
            return Err(Error::UpstreamFormat(format!("{label}: empty `an`")));
        }
        let mut columns = vec![vec![Coefficient::from_integer(0.into())]; dim];
        for (n, entry) in an.iter().enumerate() {
            let coords: Vec<BigInt> = match entry {
                Value::Array(items) => items.iter().map(json_integer).collect::<Result<_>>()?,
                other => vec![json_integer(other)?],
            };
            if coords.len() != dim {
                return Err(Error::UpstreamFormat(format!(
                    "{label}: a_{} has {} coordinates, expected {dim}",
                    n + 1,
                    coords.len()
                )));
            }
            for (col, c) in columns.iter_mut().zip(coords) {
                col.push(BigRational::from_integer(c));
            }
        }
        let prec = an.len() + 1;
        Ok(columns
            .into_iter()
            .map(|c| QSeries::from_coeffs(c, prec))
            .collect())
    }

    fn download_basis(&self, level: u64) -> Result<BasisSet> {
        let mut spanning: Vec<QSeries> = Vec::new();
        for m in divisors(level) {
            for (label, dim) in self.newforms(m)? {
                for g in self.coordinate_series(&label, dim)? {
                    for e in divisors(level / m) {
                        spanning.push(g.substitute_power(e as usize));
                    }
                }
            }
        }
        if spanning.is_empty() {
            return Ok(BasisSet {
                level,
                forms: Vec::new(),
                prec: 2,
                echelon: true,
            });
        }
        let prec = spanning.iter().map(QSeries::prec).min().unwrap_or(2);
        let rows: Vec<Vec<BigRational>> = spanning
            .iter()
            .map(|s| (1..prec).map(|n| s.coefficient(n)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let echelon = primitive_echelon(rows);
        if echelon.len() != spanning.len() {
            return Err(Error::UpstreamFormat(format!(
                "newform data for level {level} spans {} dimensions from {} forms",
                echelon.len(),
                spanning.len()
            )));
        }
        Ok(BasisSet {
            level,
            forms: echelon
                .into_iter()
                .enumerate()
                .map(|(i, coefficients)| FormRecord {
                    label: format!("f{i}"),
                    coefficients,
                    prec,
                })
                .collect(),
            prec,
            echelon: true,
        })
    }
}

fn json_integer(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| Error::UpstreamFormat(format!("non-integer coefficient {n}"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::UpstreamFormat(format!("non-integer coefficient {s:?}"))),
        other => Err(Error::UpstreamFormat(format!(
            "unexpected coefficient {other}"
        ))),
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}
