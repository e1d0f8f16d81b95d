//! Dataset ingestion, the seeded synthetic generator, and atomic file
//! output.
//!
//! The interchange format is a CSV with the exact header
//! `date,alpha,nu,rho,spot,rate_dom,rate_for`; dates are ISO-8601 and only
//! their order matters to the maths. Maturity is not part of the file and
//! is supplied when loading (one-month quotes default to 1/12).

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::arma_garch::{self, presets, ArmaGarchParams, ArmaGarchSpec};
use crate::error::{Error, Result};
use crate::market::MarketSnapshot;
use crate::sabr::SabrParams;
use crate::transform::{from_unconstrained, to_unconstrained, TransformedParams};

pub const DATASET_HEADER: &str = "date,alpha,nu,rho,spot,rate_dom,rate_for";

/// Year fraction of the standard one-month tenor.
pub const ONE_MONTH: f64 = 1.0 / 12.0;

/// A daily history of SABR parameters and the market state, the input to
/// backtests and trading simulations.
#[derive(Debug, Clone)]
pub struct Dataset {
    dates: Vec<NaiveDate>,
    params: Vec<SabrParams>,
    snapshots: Vec<MarketSnapshot>,
}

impl Dataset {
    /// Assemble and validate: equal lengths, strictly increasing dates.
    pub fn new(
        dates: Vec<NaiveDate>,
        params: Vec<SabrParams>,
        snapshots: Vec<MarketSnapshot>,
    ) -> Result<Self> {
        if dates.len() != params.len() || dates.len() != snapshots.len() {
            return Err(Error::invalid_input(format!(
                "length mismatch: {} dates, {} parameter rows, {} snapshots",
                dates.len(),
                params.len(),
                snapshots.len()
            )));
        }
        for (i, w) in dates.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::invalid_input(format!(
                    "dates must be strictly increasing: {} follows {} at row {}",
                    w[1],
                    w[0],
                    i + 2
                )));
            }
        }
        Ok(Self {
            dates,
            params,
            snapshots,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn params(&self) -> &[SabrParams] {
        &self.params
    }

    pub fn snapshots(&self) -> &[MarketSnapshot] {
        &self.snapshots
    }

    /// The three transformed parameter series (a, n, r) as level paths.
    pub fn transformed_levels(&self) -> [Vec<f64>; 3] {
        let mut a = Vec::with_capacity(self.len());
        let mut n = Vec::with_capacity(self.len());
        let mut r = Vec::with_capacity(self.len());
        for p in &self.params {
            let t = to_unconstrained(*p);
            a.push(t.a);
            n.push(t.n);
            r.push(t.r);
        }
        [a, n, r]
    }
}

fn parse_field(raw: &str, field: &'static str, line: usize) -> Result<f64> {
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {field} from {raw:?}"),
    })
}

/// Load a dataset CSV, validating the header, every row's invariants and the
/// date ordering. `maturity` applies to all rows (the quotes are
/// constant-tenor).
pub fn load_dataset(path: impl AsRef<Path>, maturity: f64) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())?;
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != DATASET_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{DATASET_HEADER}`, found `{header}`"),
        });
    }

    let mut dates = Vec::new();
    let mut params = Vec::new();
    let mut snapshots = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::Parse {
            line: row + 1,
            message: e.to_string(),
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(row + 1);
        if record.len() != 7 {
            return Err(Error::Parse {
                line,
                message: format!("expected 7 fields, found {}", record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d").map_err(|_| {
            Error::Parse {
                line,
                message: format!("cannot parse ISO date from {:?}", &record[0]),
            }
        })?;
        let alpha = parse_field(&record[1], "alpha", line)?;
        let nu = parse_field(&record[2], "nu", line)?;
        let rho = parse_field(&record[3], "rho", line)?;
        let spot = parse_field(&record[4], "spot", line)?;
        let rate_dom = parse_field(&record[5], "rate_dom", line)?;
        let rate_for = parse_field(&record[6], "rate_for", line)?;

        let sabr = SabrParams::new(alpha, nu, rho).map_err(|e| Error::InvariantViolation {
            row,
            field: "alpha/nu/rho",
            message: e.to_string(),
        })?;
        let snap = MarketSnapshot::new(spot, rate_dom, rate_for, maturity).map_err(|e| {
            Error::InvariantViolation {
                row,
                field: "spot/rates",
                message: e.to_string(),
            }
        })?;
        dates.push(date);
        params.push(sabr);
        snapshots.push(snap);
    }
    Dataset::new(dates, params, snapshots)
}

/// Write a dataset with full round-trip precision (shortest representation
/// that parses back to the identical float).
pub fn write_dataset(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let mut out = String::with_capacity(64 * (data.len() + 1));
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for i in 0..data.len() {
        let p = &data.params()[i];
        let s = &data.snapshots()[i];
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            data.dates()[i].format("%Y-%m-%d"),
            p.alpha(),
            p.nu(),
            p.rho(),
            s.spot(),
            s.rate_dom(),
            s.rate_for()
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Write via a temp file in the target directory followed by a rename, so
/// readers never observe a half-written file.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
        None => std::path::PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
    };
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Round to 10 significant digits, the precision contract for report files.
pub fn fmt_sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.9e}")
}

/// One series model of the synthetic generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesModel {
    pub spec: ArmaGarchSpec,
    pub params: ArmaGarchParams,
}

/// Specification of the synthetic dataset that stands in for a desk's
/// parameter history: the three difference-series models, initial levels,
/// and a driftless geometric random walk for spot.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_days: usize,
    pub alpha_model: SeriesModel,
    pub nu_model: SeriesModel,
    pub rho_model: SeriesModel,
    pub initial_alpha: f64,
    pub initial_nu: f64,
    pub initial_rho: f64,
    pub spot0: f64,
    /// Annualised log-vol of the spot random walk (252 trading days/year).
    pub spot_annual_vol: f64,
    pub rate_dom: f64,
    pub rate_for: f64,
    pub maturity: f64,
    pub start_date: NaiveDate,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        let (alpha_spec, alpha_params) = presets::alpha_model();
        let (nu_spec, nu_params) = presets::nu_model();
        let (rho_spec, rho_params) = presets::rho_model();
        Self {
            // long enough for the default 1000/360 backtest with 3-day
            // horizons
            n_days: 1363,
            alpha_model: SeriesModel {
                spec: alpha_spec,
                params: alpha_params,
            },
            nu_model: SeriesModel {
                spec: nu_spec,
                params: nu_params,
            },
            rho_model: SeriesModel {
                spec: rho_spec,
                params: rho_params,
            },
            initial_alpha: 1.0,
            initial_nu: 0.6,
            initial_rho: -0.2,
            spot0: 100.0,
            spot_annual_vol: 0.10,
            rate_dom: 0.02,
            rate_for: 0.005,
            maturity: ONE_MONTH,
            start_date: NaiveDate::from_ymd_opt(2015, 1, 1).unwrap(),
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_days < 2 {
            return Err(Error::invalid_input("n_days must be at least 2"));
        }
        self.alpha_model.params.validate(&self.alpha_model.spec)?;
        self.nu_model.params.validate(&self.nu_model.spec)?;
        self.rho_model.params.validate(&self.rho_model.spec)?;
        SabrParams::new(self.initial_alpha, self.initial_nu, self.initial_rho)?;
        MarketSnapshot::new(self.spot0, self.rate_dom, self.rate_for, self.maturity)?;
        if !self.spot_annual_vol.is_finite() || self.spot_annual_vol < 0.0 {
            return Err(Error::invalid_input("spot_annual_vol must be non-negative"));
        }
        Ok(())
    }
}

const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Generate a synthetic dataset: simulate the three transformed difference
/// series, integrate to levels, map back to SABR parameters day by day, and
/// drive spot with a geometric random walk. Deterministic per seed (the
/// four component simulations use sub-seeds `seed..seed+3`).
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_days;
    let initial = SabrParams::new(spec.initial_alpha, spec.initial_nu, spec.initial_rho)?;
    let t0 = to_unconstrained(initial);

    let steps = n - 1;
    let mut levels: Vec<TransformedParams> = Vec::with_capacity(n);
    levels.push(t0);
    if steps > 0 {
        let da = arma_garch::simulate(&spec.alpha_model.spec, &spec.alpha_model.params, steps, seed)?;
        let dn = arma_garch::simulate(&spec.nu_model.spec, &spec.nu_model.params, steps, seed.wrapping_add(1))?;
        let dr = arma_garch::simulate(&spec.rho_model.spec, &spec.rho_model.params, steps, seed.wrapping_add(2))?;
        let a = arma_garch::integrate_forecast(t0.a, &da);
        let nn = arma_garch::integrate_forecast(t0.n, &dn);
        let r = arma_garch::integrate_forecast(t0.r, &dr);
        for i in 0..steps {
            levels.push(TransformedParams {
                a: a[i],
                n: nn[i],
                r: r[i],
            });
        }
    }
    let params: Vec<SabrParams> = levels.into_iter().map(from_unconstrained).collect();

    // driftless geometric random walk for spot
    use rand::SeedableRng;
    use rand_distr::Distribution;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let normal = rand_distr::StandardNormal;
    let daily_vol = spec.spot_annual_vol / TRADING_DAYS_PER_YEAR.sqrt();
    let mut spot = spec.spot0;
    let mut snapshots = Vec::with_capacity(n);
    let mut dates = Vec::with_capacity(n);
    for t in 0..n {
        snapshots.push(MarketSnapshot::new(
            spot,
            spec.rate_dom,
            spec.rate_for,
            spec.maturity,
        )?);
        dates.push(
            spec.start_date
                .checked_add_days(chrono::Days::new(t as u64))
                .ok_or_else(|| Error::invalid_input("date overflow"))?,
        );
        let z: f64 = normal.sample(&mut rng);
        spot *= (daily_vol * z).exp();
    }

    Dataset::new(dates, params, snapshots)
}
