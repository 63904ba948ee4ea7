//! Pricing of contingent claims under the contact measure.
//!
//! Payoff functions map the terminal underlier value `S₁ = S₀(1 + r)` to a
//! discounted payoff; discounting is the caller's responsibility.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::capm::{contact_measure, ContactKernel};
use crate::error::{Error, Result};
use crate::extreme::{extreme_measure, order_statistic_mean, McEstimate, PairSampler};
use crate::scenario::{ScenarioSet, Units};
use crate::spectral::{dot, Sample, WeightingMeasure};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Piecewise-linear payoff through strictly increasing knots, flat outside.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    s: Vec<f64>,
    f: Vec<f64>,
}

impl PayoffTable {
    pub fn new(s: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if s.len() != f.len() {
            return Err(Error::LengthMismatch {
                expected: s.len(),
                found: f.len(),
            });
        }
        if s.is_empty() {
            return Err(Error::InvalidInput("payoff table is empty".into()));
        }
        if s.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("payoff table values must be finite".into()));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "payoff table must be strictly increasing in S1".into(),
            ));
        }
        Ok(Self { s, f })
    }

    /// Reads a two-column `S1,F` CSV; a non-numeric first line is a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        let mut s = Vec::new();
        let mut f = Vec::new();
        for (n, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                column: 0,
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(n as u64 + 1, |p| p.line());
            if rec.len() != 2 {
                return Err(Error::Parse {
                    line,
                    column: rec.len(),
                    message: "payoff table rows need exactly two fields".into(),
                });
            }
            let parsed: Vec<Option<f64>> = rec.iter().map(|c| c.trim().parse().ok()).collect();
            match (parsed[0], parsed[1]) {
                (Some(a), Some(b)) => {
                    s.push(a);
                    f.push(b);
                }
                _ if n == 0 => continue,
                _ => {
                    return Err(Error::Parse {
                        line,
                        column: if parsed[0].is_none() { 1 } else { 2 },
                        message: "payoff table value is not a number".into(),
                    })
                }
            }
        }
        if s.is_empty() {
            return Err(Error::EmptyData(path.display().to_string()));
        }
        Self::new(s, f)
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x <= self.s[0] {
            return self.f[0];
        }
        if x >= self.s[n - 1] {
            return self.f[n - 1];
        }
        let j = self.s.partition_point(|v| *v <= x) - 1;
        let t = (x - self.s[j]) / (self.s[j + 1] - self.s[j]);
        self.f[j] + t * (self.f[j + 1] - self.f[j])
    }

    /// Right derivative, and whether `x` sits on a knot where the slope
    /// changes.
    fn right_derivative(&self, x: f64) -> (f64, bool) {
        let n = self.s.len();
        let slope = |j: usize| (self.f[j + 1] - self.f[j]) / (self.s[j + 1] - self.s[j]);
        let right = if x < self.s[0] || x >= self.s[n - 1] {
            0.0
        } else {
            slope(self.s.partition_point(|v| *v <= x) - 1)
        };
        let kink = match self.s.binary_search_by(|v| v.total_cmp(&(x + 0.0))) {
            Ok(j) => {
                let left = if j == 0 { 0.0 } else { slope(j - 1) };
                left != right
            }
            Err(_) => false,
        };
        (right, kink)
    }
}

#[derive(Clone)]
pub enum Payoff {
    /// `max(S₁ - K, 0)`.
    Call {
        strike: f64,
    },
    /// `max(K - S₁, 0)`.
    Put {
        strike: f64,
    },
    Tabulated(PayoffTable),
    /// A payoff and its derivative.
    Custom {
        f: ScalarFn,
        df: ScalarFn,
    },
}

impl fmt::Debug for Payoff {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::Call { strike } => write!(fmt, "Call {{ strike: {strike} }}"),
            Payoff::Put { strike } => write!(fmt, "Put {{ strike: {strike} }}"),
            Payoff::Tabulated(t) => fmt.debug_tuple("Tabulated").field(t).finish(),
            Payoff::Custom { .. } => write!(fmt, "Custom"),
        }
    }
}

impl Payoff {
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Payoff::Custom {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::custom(move |_| c, |_| 0.0)
    }

    pub fn linear() -> Self {
        Self::custom(|x| x, |_| 1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Payoff::Call { strike } => (x - strike).max(0.0),
            Payoff::Put { strike } => (strike - x).max(0.0),
            Payoff::Tabulated(t) => t.eval(x),
            Payoff::Custom { f, .. } => f(x),
        }
    }

    /// Right derivative at `x` and whether `x` is a kink.
    pub fn derivative(&self, x: f64) -> (f64, bool) {
        match self {
            Payoff::Call { strike } => (if x >= *strike { 1.0 } else { 0.0 }, x == *strike),
            Payoff::Put { strike } => (if x >= *strike { 0.0 } else { -1.0 }, x == *strike),
            Payoff::Tabulated(t) => t.right_derivative(x),
            Payoff::Custom { df, .. } => (df(x), false),
        }
    }
}

/// A single-underlier claim with discounted payoff `F = f(S₁)`.
#[derive(Debug, Clone)]
pub struct ClaimSpec {
    pub payoff: Payoff,
    /// Column of the underlier in the scenario set.
    pub underlier: usize,
    /// Spot `S₀` of the underlier.
    pub s0: f64,
}

impl ClaimSpec {
    pub fn new(payoff: Payoff, underlier: usize, s0: f64) -> Result<Self> {
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(Error::Domain(format!("spot {s0} must be positive")));
        }
        match &payoff {
            Payoff::Call { strike } | Payoff::Put { strike } if !strike.is_finite() => {
                return Err(Error::Domain("strike must be finite".into()))
            }
            _ => {}
        }
        Ok(Self { payoff, underlier, s0 })
    }

    fn payoffs(&self, returns: &[f64], s0: f64) -> Result<Vec<f64>> {
        returns
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let v = self.payoff.eval(s0 * (1.0 + r));
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::InvalidInput(format!("payoff is not finite in scenario {t}")))
                }
            })
            .collect()
    }

    fn underlier_returns(&self, scenarios: &ScenarioSet, ck: &ContactKernel) -> Result<Vec<f64>> {
        if scenarios.units() != Units::Returns {
            return Err(Error::ModeMismatch("claims are priced on return scenarios".into()));
        }
        if self.underlier >= scenarios.ncols() {
            return Err(Error::InvalidInput(format!(
                "underlier column {} out of range",
                self.underlier
            )));
        }
        if ck.r().len() != scenarios.nrows() {
            return Err(Error::LengthMismatch {
                expected: scenarios.nrows(),
                found: ck.r().len(),
            });
        }
        Ok(scenarios.column(self.underlier))
    }
}

fn mixture_weights(r_star: f64) -> (f64, f64) {
    let a = 1.0 / (1.0 + r_star);
    (a, 1.0 - a)
}

/// NBC price `V = E_P f/(1+R*) + R* E_Q f/(1+R*)`.
pub fn nbc_price(claim: &ClaimSpec, ck: &ContactKernel, scenarios: &ScenarioSet) -> Result<f64> {
    let x = claim.underlier_returns(scenarios, ck)?;
    let f = claim.payoffs(&x, claim.s0)?;
    let (a, b) = ck.mixture_weights();
    Ok(a * dot(scenarios.weights(), &f) + b * dot(ck.q().q(), &f))
}

/// Spot sensitivity with the number of scenarios that hit a kink, where the
/// right derivative was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub value: f64,
    pub kinks: usize,
}

/// `∂V/∂S₀ = E_P (1+r) f'/(1+R*) + R* E_Q (1+r) f'/(1+R*)`.
pub fn nbc_sensitivity(claim: &ClaimSpec, ck: &ContactKernel, scenarios: &ScenarioSet) -> Result<Sensitivity> {
    let x = claim.underlier_returns(scenarios, ck)?;
    let mut kinks = 0;
    let mut g = Vec::with_capacity(x.len());
    for r in &x {
        let (d, kink) = claim.payoff.derivative(claim.s0 * (1.0 + r));
        kinks += usize::from(kink);
        g.push((1.0 + r) * d);
    }
    let (a, b) = ck.mixture_weights();
    Ok(Sensitivity {
        value: a * dot(scenarios.weights(), &g) + b * dot(ck.q().q(), &g),
        kinks,
    })
}

/// Data behind an empirical price.
pub enum PriceSource<'a> {
    /// Scenario pairs of underlier and index returns with weights.
    Pairs {
        underlier: &'a [f64],
        index: &'a [f64],
        weights: &'a [f64],
    },
    /// Independent draws of (underlier return, index return), used in
    /// groups of `α` by the order-statistic estimators.
    Draws {
        sampler: &'a mut dyn PairSampler,
        groups: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEstimate {
    pub value: f64,
    /// Standard error for Monte Carlo estimates.
    pub std_err: Option<f64>,
}

/// Empirical NBC price from data.
///
/// Pairs are reweighted exactly: the index column's Psi-differences give
/// `Q`. Draws need an order-statistic measure (integer Alpha or Beta V@R):
/// each group of `α` draws contributes the plain mean of `f` and the mean
/// of `f` over the `β` draws with the lowest index return (the argmin when
/// `β = 1`).
pub fn empirical_price(
    claim: &ClaimSpec,
    mu: &WeightingMeasure,
    r_star: f64,
    source: PriceSource<'_>,
    seed: u64,
) -> Result<PriceEstimate> {
    if !(r_star.is_finite() && r_star >= 0.0) {
        return Err(Error::Domain(format!("reward/risk ratio {r_star} must be nonnegative")));
    }
    match source {
        PriceSource::Pairs {
            underlier,
            index,
            weights,
        } => {
            if underlier.len() != index.len() {
                return Err(Error::LengthMismatch {
                    expected: index.len(),
                    found: underlier.len(),
                });
            }
            let q = extreme_measure(&Sample::new(index.to_vec(), weights.to_vec())?, mu);
            let ck = contact_measure(weights, &q, r_star)?;
            let f = claim.payoffs(underlier, claim.s0)?;
            let (a, b) = ck.mixture_weights();
            Ok(PriceEstimate {
                value: a * dot(weights, &f) + b * dot(q.q(), &f),
                std_err: None,
            })
        }
        PriceSource::Draws { sampler, groups } => {
            let (alpha, beta) = mu
                .order_statistic_params()
                .ok_or_else(|| Error::InvalidInput("draw sources need an integer Alpha or Beta V@R measure".into()))?;
            if groups == 0 {
                return Err(Error::Domain("need at least one group".into()));
            }
            let (a, b) = mixture_weights(r_star);
            let n = alpha as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut fs = vec![0.0; n];
            let mut ys = vec![0.0; n];
            let mut values = Vec::with_capacity(groups);
            for g in 0..groups {
                for l in 0..n {
                    let (x, y) = sampler.draw(&mut rng).map_err(|source| Error::Sampler {
                        context: format!("drawing group {g}"),
                        source,
                    })?;
                    fs[l] = claim.payoff.eval(claim.s0 * (1.0 + x));
                    ys[l] = y;
                }
                if fs.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput(format!("payoff is not finite in group {g}")));
                }
                let plain = fs.iter().sum::<f64>() / n as f64;
                let tail = order_statistic_mean(&fs, &ys, beta as usize);
                values.push(a * plain + b * tail);
            }
            let est = McEstimate::from_groups(&values);
            Ok(PriceEstimate {
                value: est.value,
                std_err: Some(est.std_err),
            })
        }
    }
}

/// Risk adjustment `V - E_P f` and its first-order form
/// `R*·E_P[(φ - 1) f]` with `φ = dQ/dP`; the two differ by
/// `R*²/(1+R*)·E_P[(φ - 1) f]`.
pub fn risk_adjustment(claim: &ClaimSpec, ck: &ContactKernel, scenarios: &ScenarioSet) -> Result<(f64, f64)> {
    let x = claim.underlier_returns(scenarios, ck)?;
    let f = claim.payoffs(&x, claim.s0)?;
    let nu = scenarios.weights();
    let phi = ck.q().density(nu)?;
    let ep = dot(nu, &f);
    let (a, b) = ck.mixture_weights();
    let v = a * ep + b * dot(ck.q().q(), &f);
    let first: f64 = nu.iter().zip(&phi).zip(&f).map(|((n, p), fv)| n * (p - 1.0) * fv).sum();
    Ok((v - ep, ck.r_star() * first))
}
