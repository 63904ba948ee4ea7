//! Scenario sets: finite joint distributions of asset outcomes, and the
//! generators that build them from historical returns.
//!
//! Rows are scenarios, columns are assets. Files are read oldest-first, so
//! recency is counted back from the last row.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result, SamplerError};
use crate::spectral::validate_weights;

/// Units of the outcome matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    /// Simple returns per period (0.01 = 1%).
    Returns,
    /// Discounted P&L in currency.
    Pnl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    outcomes: DMatrix<f64>,
    weights: Vec<f64>,
    labels: Vec<String>,
    index: Option<usize>,
    units: Units,
    period: Option<f64>,
}

impl ScenarioSet {
    pub fn new(outcomes: DMatrix<f64>, weights: Vec<f64>, labels: Vec<String>, units: Units) -> Result<Self> {
        if outcomes.nrows() == 0 || outcomes.ncols() == 0 {
            return Err(Error::InvalidInput(
                "scenario set needs at least one row and one column".into(),
            ));
        }
        if weights.len() != outcomes.nrows() {
            return Err(Error::LengthMismatch {
                expected: outcomes.nrows(),
                found: weights.len(),
            });
        }
        if labels.len() != outcomes.ncols() {
            return Err(Error::LengthMismatch {
                expected: outcomes.ncols(),
                found: labels.len(),
            });
        }
        if outcomes.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("scenario outcomes must be finite".into()));
        }
        validate_weights(&weights)?;
        Ok(Self {
            outcomes,
            weights,
            labels,
            index: None,
            units,
            period: None,
        })
    }

    /// Equally weighted scenarios.
    pub fn uniform(outcomes: DMatrix<f64>, labels: Vec<String>, units: Units) -> Result<Self> {
        let t = outcomes.nrows().max(1);
        Self::new(outcomes, vec![1.0 / t as f64; t], labels, units)
    }

    /// Designates the index (market proxy) column by label.
    pub fn with_index(mut self, label: &str) -> Result<Self> {
        let pos = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("no asset labelled '{label}'")))?;
        self.index = Some(pos);
        Ok(self)
    }

    pub fn with_index_col(mut self, col: usize) -> Result<Self> {
        if col >= self.ncols() {
            return Err(Error::InvalidInput(format!("index column {col} out of range")));
        }
        self.index = Some(col);
        Ok(self)
    }

    /// Attaches the period length as metadata (in whatever time unit the
    /// caller uses); no computation depends on it.
    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn outcomes(&self) -> &DMatrix<f64> {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index(&self) -> Option<usize> {
        self.index
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// Number of scenarios `T`.
    pub fn nrows(&self) -> usize {
        self.outcomes.nrows()
    }

    /// Number of assets `d`.
    pub fn ncols(&self) -> usize {
        self.outcomes.ncols()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.outcomes.column(i).iter().copied().collect()
    }

    pub fn label_position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same outcomes, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.nrows(),
                found: weights.len(),
            });
        }
        validate_weights(&weights)?;
        let mut out = self.clone();
        out.weights = weights;
        Ok(out)
    }

    /// Weighted mean of each column.
    pub fn mean(&self) -> DVector<f64> {
        let w = DVector::from_column_slice(&self.weights);
        self.outcomes.tr_mul(&w)
    }
}

/// Ingestion options for [`load_returns`].
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Label of the index column, if any.
    pub index: Option<String>,
}

/// Reads a return CSV: header `date,<label1>,...,<labeld>`, then one row per
/// period with an ISO-8601 date and `d` decimal returns.
pub fn load_returns(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<ScenarioSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    parse_returns(file, &path.display().to_string(), opts)
}

/// As [`load_returns`], reading from any byte source. `source` names the
/// input in error messages.
pub fn parse_returns<R: Read>(reader: R, source: &str, opts: &IngestOptions) -> Result<ScenarioSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            column: headers.len(),
            message: "header needs a date column and at least one asset".into(),
        });
    }
    if !headers[0].trim().eq_ignore_ascii_case("date") {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("first header field must be 'date', found '{}'", &headers[0]),
        });
    }
    let labels: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let d = labels.len();

    let mut data = Vec::new();
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let date = record[0].trim();
        NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|e| Error::Parse {
            line,
            column: 1,
            message: format!("bad date '{date}': {e}"),
        })?;
        for (k, cell) in record.iter().enumerate().skip(1) {
            let cell = cell.trim();
            if cell.is_empty() {
                return Err(Error::Parse {
                    line,
                    column: k + 1,
                    message: "missing value".into(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                column: k + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { line, column: k + 1 });
            }
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyData(source.to_string()));
    }
    let outcomes = DMatrix::from_row_slice(rows, d, &data);
    let set = ScenarioSet::uniform(outcomes, labels, Units::Returns)?;
    match &opts.index {
        Some(label) => set.with_index(label),
        None => Ok(set),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            column: (*len as usize).min(*expected_len as usize) + 1,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Io(_) => Error::Io(std::io::Error::other(e.to_string())),
        _ => Error::Parse {
            line,
            column: 0,
            message: e.to_string(),
        },
    }
}

fn geometric_weights(t: usize, lambda: f64) -> Vec<f64> {
    // Row t (oldest first) gets λ^(T-1-t); the last row is the most recent.
    let raw: Vec<f64> = (0..t).map(|k| lambda.powi((t - 1 - k) as i32)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn check_recency(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("recency parameter {lambda} is outside (0, 1)")))
    }
}

/// Weighted historical simulation: the `k`-th most recent row gets weight
/// proportional to `λ^(k-1)`. Geometric mass beyond the first row is
/// truncated and the weights renormalized.
pub fn weight_geometric(s: &ScenarioSet, lambda: f64) -> Result<ScenarioSet> {
    check_recency(lambda)?;
    s.with_weights(geometric_weights(s.nrows(), lambda))
}

/// Bootstrapped historical simulation.
///
/// Each output scenario compounds `n` source rows drawn with replacement,
/// `x = Π(1 + r_k) - 1` per asset, drawing whole rows so cross-asset
/// dependence is kept. With `recency_lambda` the draws favour recent rows
/// geometrically; output weights are uniform either way.
pub fn bootstrap(
    s: &ScenarioSet,
    n: usize,
    t_out: usize,
    seed: u64,
    recency_lambda: Option<f64>,
) -> Result<ScenarioSet> {
    if s.units() != Units::Returns {
        return Err(Error::ModeMismatch(
            "bootstrap compounds returns, got P&L scenarios".into(),
        ));
    }
    if n == 0 || t_out == 0 {
        return Err(Error::Domain(
            "bootstrap needs n >= 1 and at least one output scenario".into(),
        ));
    }
    let t = s.nrows();
    let draw_weights = match recency_lambda {
        Some(l) => {
            check_recency(l)?;
            geometric_weights(t, l)
        }
        None => vec![1.0; t],
    };
    let picker =
        WeightedIndex::new(&draw_weights).map_err(|e| Error::InvalidInput(format!("bootstrap source weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = s.ncols();
    let src = s.outcomes();
    let mut out = DMatrix::zeros(t_out, d);
    let mut growth = vec![1.0; d];
    for row in 0..t_out {
        growth.iter_mut().for_each(|g| *g = 1.0);
        for _ in 0..n {
            let k = picker.sample(&mut rng);
            for (i, g) in growth.iter_mut().enumerate() {
                *g *= 1.0 + src[(k, i)];
            }
        }
        for (i, g) in growth.iter().enumerate() {
            out[(row, i)] = g - 1.0;
        }
    }
    let mut set = ScenarioSet::uniform(out, s.labels().to_vec(), Units::Returns)?;
    set.index = s.index;
    set.period = s.period.map(|p| p * n as f64);
    Ok(set)
}

/// Source of joint return vectors for Monte Carlo simulation.
pub trait ReturnSampler {
    fn dim(&self) -> usize;
    fn sample(&mut self, rng: &mut dyn RngCore, out: &mut [f64]) -> Result<(), SamplerError>;
}

/// Monte Carlo simulation: `t_out` independent draws from `hook`, uniform
/// weights.
pub fn monte_carlo(hook: &mut dyn ReturnSampler, labels: Vec<String>, t_out: usize, seed: u64) -> Result<ScenarioSet> {
    if t_out == 0 {
        return Err(Error::Domain("monte carlo needs at least one scenario".into()));
    }
    let d = hook.dim();
    if labels.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0; t_out * d];
    for (t, row) in data.chunks_exact_mut(d).enumerate() {
        hook.sample(&mut rng, row).map_err(|source| Error::Sampler {
            context: format!("drawing scenario {t}"),
            source,
        })?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Sampler {
                context: format!("drawing scenario {t}"),
                source: SamplerError::new("sampler produced a non-finite value"),
            });
        }
    }
    ScenarioSet::uniform(DMatrix::from_row_slice(t_out, d, &data), labels, Units::Returns)
}

/// Multivariate normal sampler `mean + L z` with `L Lᵀ = cov`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mean: DVector<f64>,
    factor: DMatrix<f64>,
    z: DVector<f64>,
}

impl GaussianSampler {
    /// The covariance must be symmetric positive semidefinite; a symmetric
    /// square root is used so singular covariances are accepted.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                found: cov.nrows(),
            });
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-10 * (1.0 + cov.amax()) {
            return Err(Error::InvalidInput("covariance matrix is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(cov.clone());
        let tol = -1e-10 * (1.0 + cov.amax());
        if eig.eigenvalues.iter().any(|&l| l < tol) {
            return Err(Error::InvalidInput(
                "covariance matrix is not positive semidefinite".into(),
            ));
        }
        let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        let factor = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals);
        Ok(Self {
            mean,
            factor,
            z: DVector::zeros(d),
        })
    }

    /// Fits the weighted mean and covariance of a scenario set.
    pub fn fit(s: &ScenarioSet) -> Result<Self> {
        let mean = s.mean();
        let centered = DMatrix::from_fn(s.nrows(), s.ncols(), |t, i| s.outcomes()[(t, i)] - mean[i]);
        let w = DVector::from_column_slice(s.weights());
        let weighted = DMatrix::from_fn(s.nrows(), s.ncols(), |t, i| centered[(t, i)] * w[t]);
        let cov = centered.tr_mul(&weighted);
        let cov = (&cov + cov.transpose()) * 0.5;
        Self::new(mean, cov)
    }
}

impl ReturnSampler for GaussianSampler {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn sample(&mut self, rng: &mut dyn RngCore, out: &mut [f64]) -> Result<(), SamplerError> {
        for z in self.z.iter_mut() {
            *z = StandardNormal.sample(rng);
        }
        let x = &self.mean + &self.factor * &self.z;
        out.copy_from_slice(x.as_slice());
        Ok(())
    }
}

/// A market: scenarios, the per-period risk-free rate, and spot prices.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel {
    scenarios: ScenarioSet,
    rf: f64,
    s0: Vec<f64>,
}

impl MarketModel {
    pub fn new(scenarios: ScenarioSet, rf: f64, s0: Vec<f64>) -> Result<Self> {
        if !(rf.is_finite() && rf > -1.0) {
            return Err(Error::Domain(format!("risk-free rate {rf} must exceed -1")));
        }
        if s0.len() != scenarios.ncols() {
            return Err(Error::LengthMismatch {
                expected: scenarios.ncols(),
                found: s0.len(),
            });
        }
        if s0.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::Domain("spot prices must be positive".into()));
        }
        Ok(Self { scenarios, rf, s0 })
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    pub fn rf(&self) -> f64 {
        self.rf
    }

    pub fn s0(&self) -> &[f64] {
        &self.s0
    }

    pub fn ncols(&self) -> usize {
        self.scenarios.ncols()
    }

    /// Discounted increments `ΔS` whatever the units of the scenarios.
    pub fn pnl(&self) -> DMatrix<f64> {
        match self.scenarios.units() {
            Units::Pnl => self.scenarios.outcomes().clone(),
            Units::Returns => discount_returns(self.scenarios.outcomes(), self.rf, &self.s0),
        }
    }

    /// Weighted mean of the discounted increments, `E_P ΔS`.
    pub fn expected_pnl(&self) -> DVector<f64> {
        self.pnl().tr_mul(&DVector::from_column_slice(self.scenarios.weights()))
    }
}

fn discount_returns(r: &DMatrix<f64>, rf: f64, s0: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(r.nrows(), r.ncols(), |t, i| s0[i] / (1.0 + rf) * (r[(t, i)] - rf))
}

/// Discounted P&L per scenario and asset: `s0_i / (1 + r_f) * (r_ti - r_f)`.
pub fn pnl_from_returns(m: &MarketModel) -> Result<DMatrix<f64>> {
    if m.scenarios.units() != Units::Returns {
        return Err(Error::ModeMismatch("scenarios are already discounted P&L".into()));
    }
    Ok(discount_returns(m.scenarios.outcomes(), m.rf, &m.s0))
}
