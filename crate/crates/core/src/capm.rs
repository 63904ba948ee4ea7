//! Security market line, contact measure and the equilibrium reward/risk
//! ratio.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::extreme::ExtremeWeights;
use crate::frontier::{FrontierResult, Strategy};
use crate::scenario::MarketModel;
use crate::spectral::{dot, spectral_risk, validate_weights, Sample, WeightingMeasure};

fn q_expectations(m: &MarketModel, q: &ExtremeWeights) -> Result<Vec<f64>> {
    if q.len() != m.scenarios().nrows() {
        return Err(Error::LengthMismatch {
            expected: m.scenarios().nrows(),
            found: q.len(),
        });
    }
    let pnl = m.pnl();
    Ok(pnl.column_iter().map(|c| dot(q.q(), c.as_slice())).collect())
}

fn check_dims(m: &MarketModel, res: &FrontierResult) -> Result<()> {
    if res.d() != m.ncols() {
        return Err(Error::LengthMismatch {
            expected: m.ncols(),
            found: res.d(),
        });
    }
    Ok(())
}

/// `E_Q (r_* - r_f)` up to the common factor `1 + r_f`, where `r_*` is the
/// return of `h*`.
fn market_excess(m: &MarketModel, res: &FrontierResult, eq: &[f64]) -> Result<f64> {
    let h = res.h_star.as_slice();
    let value = dot(h, m.s0());
    if value == 0.0 {
        return Err(Error::ZeroDenominator(
            "the optimal portfolio has zero initial value".into(),
        ));
    }
    let excess = dot(h, eq) / value;
    if excess == 0.0 {
        return Err(Error::ZeroDenominator(
            "the optimal portfolio has zero excess return under Q".into(),
        ));
    }
    Ok(excess)
}

/// Betas `β^i = E_Q(r^i - r_f) / E_Q(r_* - r_f)` against the optimal
/// portfolio, with `Q` the certifying extreme measure of the result.
pub fn sml_betas(m: &MarketModel, res: &FrontierResult) -> Result<Vec<f64>> {
    check_dims(m, res)?;
    let eq = q_expectations(m, &res.certificate)?;
    let denom = market_excess(m, res, &eq)?;
    // `+ 0.0` turns the -0.0 of a riskless column into 0.0
    Ok(eq.iter().zip(m.s0()).map(|(e, s)| e / s / denom + 0.0).collect())
}

/// Beta of a portfolio `h`: the value-weighted combination of asset betas.
pub fn portfolio_beta(m: &MarketModel, res: &FrontierResult, h: &Strategy) -> Result<f64> {
    check_dims(m, res)?;
    if h.len() != m.ncols() {
        return Err(Error::LengthMismatch {
            expected: m.ncols(),
            found: h.len(),
        });
    }
    let eq = q_expectations(m, &res.certificate)?;
    let denom = market_excess(m, res, &eq)?;
    let value = dot(h.as_slice(), m.s0());
    if value == 0.0 {
        return Err(Error::ZeroDenominator("portfolio has zero initial value".into()));
    }
    Ok(dot(h.as_slice(), &eq) / value / denom)
}

/// Beta of an arbitrary per-scenario return series.
pub fn beta_of_returns(m: &MarketModel, res: &FrontierResult, returns: &[f64]) -> Result<f64> {
    check_dims(m, res)?;
    let eq = q_expectations(m, &res.certificate)?;
    let denom = market_excess(m, res, &eq)?;
    let excess: Vec<f64> = returns.iter().map(|r| r - m.rf()).collect();
    // E_Q(r - r_f) / (1 + r_f) against the same scaling as `denom`
    Ok(res.certificate.expectation(&excess)? / (1.0 + m.rf()) / denom + 0.0)
}

/// Residuals `E_P ΔS^i + R*·E_Q ΔS^i`; zero at an exact optimum.
pub fn sml_residuals(m: &MarketModel, res: &FrontierResult) -> Result<Vec<f64>> {
    check_dims(m, res)?;
    let eq = q_expectations(m, &res.certificate)?;
    let ep = m.expected_pnl();
    Ok(ep.iter().zip(&eq).map(|(p, q)| p + res.r_star * q).collect())
}

/// The contact measure `R = P/(1+R*) + Q·R*/(1+R*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactKernel {
    r_star: f64,
    q: ExtremeWeights,
    r: Vec<f64>,
    worst: Option<f64>,
}

impl ContactKernel {
    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    pub fn q(&self) -> &ExtremeWeights {
        &self.q
    }

    /// Per-scenario contact probabilities.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// `(1/(1+R*), R*/(1+R*))`, summing to one exactly.
    pub fn mixture_weights(&self) -> (f64, f64) {
        mixture(self.r_star)
    }

    /// Worst `|E_R ΔS^i|` recorded by [`ContactKernel::check_risk_neutral`].
    pub fn worst_violation(&self) -> Option<f64> {
        self.worst
    }

    /// `E_R X`.
    pub fn expectation(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.r.len() {
            return Err(Error::LengthMismatch {
                expected: self.r.len(),
                found: x.len(),
            });
        }
        Ok(dot(&self.r, x))
    }

    /// Checks `E_R ΔS^i = 0` for every asset, records and returns the worst
    /// violation.
    pub fn check_risk_neutral(&mut self, m: &MarketModel, tolerance: f64) -> Result<f64> {
        let pnl = m.pnl();
        if pnl.nrows() != self.r.len() {
            return Err(Error::LengthMismatch {
                expected: self.r.len(),
                found: pnl.nrows(),
            });
        }
        let worst = pnl
            .column_iter()
            .map(|c| dot(&self.r, c.as_slice()).abs())
            .fold(0.0, f64::max);
        self.worst = Some(worst);
        if worst > tolerance {
            return Err(Error::RiskNeutrality { worst, tolerance });
        }
        Ok(worst)
    }
}

fn mixture(r_star: f64) -> (f64, f64) {
    let a = 1.0 / (1.0 + r_star);
    (a, 1.0 - a)
}

/// Mixes the real-world weights `nu` with the extreme measure `q`.
pub fn contact_measure(nu: &[f64], q: &ExtremeWeights, r_star: f64) -> Result<ContactKernel> {
    if !(r_star.is_finite() && r_star >= 0.0) {
        return Err(Error::Domain(format!("reward/risk ratio {r_star} must be nonnegative")));
    }
    if nu.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: q.len(),
            found: nu.len(),
        });
    }
    validate_weights(nu)?;
    let (a, b) = mixture(r_star);
    let r = nu.iter().zip(q.q()).map(|(n, qq)| a * n + b * qq).collect();
    Ok(ContactKernel {
        r_star,
        q: q.clone(),
        r,
        worst: None,
    })
}

/// Contact measure of an optimum, checked for risk-neutrality against the
/// market's discounted P&L within `tolerance`.
pub fn contact_kernel(m: &MarketModel, res: &FrontierResult, tolerance: f64) -> Result<ContactKernel> {
    let mut ck = contact_measure(m.scenarios().weights(), &res.certificate, res.r_star)?;
    ck.check_risk_neutral(m, tolerance)?;
    Ok(ck)
}

/// Agents with endowments `W_n` and risk aversions `a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    endowments: Vec<f64>,
    aversions: Vec<f64>,
}

#[derive(Deserialize)]
struct AgentRow {
    endowment: f64,
    aversion: f64,
}

impl Economy {
    pub fn new(endowments: Vec<f64>, aversions: Vec<f64>) -> Result<Self> {
        if endowments.len() != aversions.len() {
            return Err(Error::LengthMismatch {
                expected: endowments.len(),
                found: aversions.len(),
            });
        }
        if endowments.is_empty() {
            return Err(Error::InvalidInput("economy needs at least one agent".into()));
        }
        if endowments
            .iter()
            .chain(&aversions)
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::Domain("endowments and aversions must be positive".into()));
        }
        Ok(Self { endowments, aversions })
    }

    /// Reads a CSV with header `endowment,aversion`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Config(format!("{other:?}")),
        })?;
        let mut w = Vec::new();
        let mut a = Vec::new();
        for row in rdr.deserialize::<AgentRow>() {
            let row = row.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                column: 0,
                message: e.to_string(),
            })?;
            w.push(row.endowment);
            a.push(row.aversion);
        }
        if w.is_empty() {
            return Err(Error::EmptyData(path.display().to_string()));
        }
        Self::new(w, a)
    }

    pub fn endowments(&self) -> &[f64] {
        &self.endowments
    }

    pub fn aversions(&self) -> &[f64] {
        &self.aversions
    }

    pub fn len(&self) -> usize {
        self.endowments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endowments.is_empty()
    }

    /// `Σ W_n / a_n`.
    pub fn tolerance_sum(&self) -> f64 {
        self.endowments.iter().zip(&self.aversions).map(|(w, a)| w / a).sum()
    }
}

/// Positive root of `R² + R - k = 0` with
/// `k = (ΣW/a)⁻¹ [E_P⟨H*,S₁⟩ + ρ(⟨H*,S₁⟩)]`.
pub fn equilibrium_rstar(e: &Economy, market_value: f64, risk_value: f64) -> Result<f64> {
    let bracket = market_value + risk_value;
    if !bracket.is_finite() || bracket < 0.0 {
        return Err(Error::Domain(format!(
            "E_P + ρ of the market portfolio must be nonnegative, got {bracket}"
        )));
    }
    let k = bracket / e.tolerance_sum();
    // 2k / (1 + √(1+4k)) avoids cancellation for small k
    let mut r = 2.0 * k / (1.0 + (1.0 + 4.0 * k).sqrt());
    if r > 0.0 {
        let f = r * r + r - k;
        r -= f / (2.0 * r + 1.0);
    }
    Ok(r)
}

/// Equilibrium quantities for a given market portfolio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub r_star: f64,
    /// `E_P⟨H*,S₁⟩`.
    pub market_value: f64,
    /// `ρ(⟨H*,S₁⟩)`.
    pub risk_value: f64,
}

/// Evaluates the market portfolio's terminal value `⟨H*,S₁⟩` on the
/// scenarios and solves for `R*`.
pub fn equilibrium(e: &Economy, m: &MarketModel, mu: &WeightingMeasure, market: &Strategy) -> Result<Equilibrium> {
    if market.len() != m.ncols() {
        return Err(Error::LengthMismatch {
            expected: m.ncols(),
            found: market.len(),
        });
    }
    let pnl = m.pnl();
    let growth = 1.0 + m.rf();
    let h = market.as_slice();
    // S₁ = (S₀ + ΔS)(1 + r_f)
    let values: Vec<f64> = pnl
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(m.s0())
                .zip(h)
                .map(|((ds, s0), hi)| hi * (s0 + ds) * growth)
                .sum()
        })
        .collect();
    let sample = Sample::new(values, m.scenarios().weights().to_vec())?;
    let market_value = sample.mean();
    let risk_value = spectral_risk(&sample, mu);
    let r_star = equilibrium_rstar(e, market_value, risk_value)?;
    Ok(Equilibrium {
        r_star,
        market_value,
        risk_value,
    })
}

/// Splits the market portfolio in proportion to `W_n / a_n`; the last agent
/// takes the remainder so the allocations sum to `H*`.
pub fn agent_allocations(e: &Economy, market: &Strategy) -> Vec<Strategy> {
    let total = e.tolerance_sum();
    let n = e.len();
    let mut out: Vec<Strategy> = Vec::with_capacity(n);
    let mut used = vec![0.0; market.len()];
    for (k, (w, a)) in e.endowments.iter().zip(&e.aversions).enumerate() {
        let h: Vec<f64> = if k + 1 == n {
            market.as_slice().iter().zip(&used).map(|(h, u)| h - u).collect()
        } else {
            let share = (w / a) / total;
            market.as_slice().iter().map(|h| h * share).collect()
        };
        for (u, v) in used.iter_mut().zip(&h) {
            *u += v;
        }
        out.push(Strategy::new(h).expect("finite allocations"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::{optimize, SolverOptions, Strategy};
    use crate::scenario::{ScenarioSet, Units};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Returns market: an index-like asset, two risky assets and cash.
    fn returns_market(t: usize, seed: u64, rf: f64, s0: Vec<f64>) -> MarketModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::new();
        for _ in 0..t {
            let common: f64 = rng.sample(StandardNormal);
            for i in 0..3 {
                let z: f64 = rng.sample(StandardNormal);
                data.push(rf + 0.01 * (i + 1) as f64 + 0.08 * z + 0.05 * common);
            }
            data.push(rf);
        }
        let labels = ["a", "b", "c", "cash"].map(String::from).to_vec();
        let s = ScenarioSet::uniform(DMatrix::from_row_slice(t, 4, &data), labels, Units::Returns).unwrap();
        MarketModel::new(s, rf, s0).unwrap()
    }

    fn risky_only(m: &MarketModel) -> MarketModel {
        let s = m.scenarios();
        let out = s.outcomes().columns(0, 3).into_owned();
        let set = ScenarioSet::uniform(out, s.labels()[..3].to_vec(), Units::Returns).unwrap();
        MarketModel::new(set, m.rf(), m.s0()[..3].to_vec()).unwrap()
    }

    #[test]
    fn betas_and_residuals() {
        let full = returns_market(200, 4, 0.01, vec![100.0, 50.0, 20.0, 1.0]);
        let m = risky_only(&full);
        let mu = WeightingMeasure::tail(0.1).unwrap();
        let res = optimize(&m, &mu, &SolverOptions::default()).unwrap();
        let betas = sml_betas(&m, &res).unwrap();
        let market_beta = portfolio_beta(&m, &res, &res.h_star).unwrap();
        assert_abs_diff_eq!(market_beta, 1.0, epsilon = 1e-12);

        // SML: E_P(r^i - r_f) = β^i E_P(r_* - r_f)
        let ep = m.expected_pnl();
        let h = res.h_star.as_slice();
        let market_excess_p = dot(h, ep.as_slice()) / dot(h, m.s0());
        for i in 0..3 {
            assert_abs_diff_eq!(ep[i] / m.s0()[i], betas[i] * market_excess_p, epsilon = 1e-9);
        }
        let worst = sml_residuals(&m, &res)
            .unwrap()
            .iter()
            .fold(0.0f64, |a, r| a.max(r.abs()));
        assert!(worst <= 1e-6 * ep.amax());

        let cash = vec![0.01; 200];
        assert_eq!(beta_of_returns(&m, &res, &cash).unwrap(), 0.0);
        let rm: Vec<f64> = (0..200)
            .map(|t| {
                let v1: f64 = (0..3)
                    .map(|i| h[i] * m.s0()[i] * (1.0 + m.scenarios().outcomes()[(t, i)]))
                    .sum();
                v1 / dot(h, m.s0()) - 1.0
            })
            .collect();
        assert_abs_diff_eq!(beta_of_returns(&m, &res, &rm).unwrap(), 1.0, epsilon = 1e-9);
        let doubled: Vec<f64> = rm.iter().map(|r| 2.0 * (r - 0.01) + 0.01).collect();
        assert_abs_diff_eq!(beta_of_returns(&m, &res, &doubled).unwrap(), 2.0, epsilon = 1e-9);

        // portfolio beta is the value-weighted asset beta
        let hp = Strategy::new(vec![1.0, -2.0, 3.0]).unwrap();
        let value = dot(hp.as_slice(), m.s0());
        let combo: f64 = (0..3).map(|i| hp.as_slice()[i] * m.s0()[i] * betas[i]).sum::<f64>() / value;
        assert_abs_diff_eq!(portfolio_beta(&m, &res, &hp).unwrap(), combo, epsilon = 1e-12);
    }

    #[test]
    fn residuals_scale_with_spot() {
        let full = returns_market(100, 5, 0.0, vec![10.0, 20.0, 30.0, 1.0]);
        let m = risky_only(&full);
        let mu = WeightingMeasure::beta_family(5.0, 1.0).unwrap();
        let mut res = optimize(&m, &mu, &SolverOptions::default()).unwrap();
        res.r_star *= 1.3; // off-optimum so residuals are not rounding noise
        let base = sml_residuals(&m, &res).unwrap();
        let c = 2.5;
        let scaled = MarketModel::new(m.scenarios().clone(), 0.0, m.s0().iter().map(|s| s * c).collect()).unwrap();
        let r = sml_residuals(&scaled, &res).unwrap();
        for (a, b) in base.iter().zip(&r) {
            assert_abs_diff_eq!(c * a, *b, epsilon = 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn single_asset_residual_is_zero() {
        let full = returns_market(50, 6, 0.0, vec![10.0, 20.0, 30.0, 1.0]);
        let s = full.scenarios();
        let one = ScenarioSet::uniform(
            s.outcomes().columns(2, 1).into_owned(),
            vec!["c".into()],
            Units::Returns,
        )
        .unwrap();
        let m = MarketModel::new(one, 0.0, vec![30.0]).unwrap();
        let res = optimize(&m, &WeightingMeasure::tail(0.2).unwrap(), &SolverOptions::default()).unwrap();
        let r = sml_residuals(&m, &res).unwrap();
        assert!(r[0].abs() < 1e-14);
    }

    #[test]
    fn contact_measure_examples() {
        let nu = [0.2, 0.3, 0.5];
        let q = ExtremeWeights::new(vec![0.6, 0.4, 0.0]).unwrap();
        let ck = contact_measure(&nu, &q, 0.0).unwrap();
        assert_eq!(ck.r(), nu);
        let same = ExtremeWeights::new(nu.to_vec()).unwrap();
        let ck = contact_measure(&nu, &same, 0.7).unwrap();
        for (a, b) in ck.r().iter().zip(nu) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        for r_star in [0.0, 0.01, 0.3, 1.0, 7.5, 1e6] {
            let (a, b) = contact_measure(&nu, &q, r_star).unwrap().mixture_weights();
            assert_eq!(a + b, 1.0);
        }
        assert!(contact_measure(&nu, &q, -0.1).is_err());
    }

    #[test]
    fn contact_kernel_is_risk_neutral_and_matches_sml() {
        let full = returns_market(300, 8, 0.005, vec![10.0, 20.0, 30.0, 1.0]);
        let m = risky_only(&full);
        let res = optimize(&m, &WeightingMeasure::tail(0.1).unwrap(), &SolverOptions::default()).unwrap();
        let ep = m.expected_pnl();
        let tol = 10.0 * 1e-6 * ep.amax();
        let ck = contact_kernel(&m, &res, tol).unwrap();
        assert!(ck.worst_violation().unwrap() <= tol);
        let total: f64 = ck.r().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let residuals = sml_residuals(&m, &res).unwrap();
        let pnl = m.pnl();
        for (i, r) in residuals.iter().enumerate() {
            let er = ck.expectation(pnl.column(i).as_slice()).unwrap();
            assert_abs_diff_eq!(er, r / (1.0 + res.r_star), epsilon = 1e-12);
        }
        // a perturbed R* breaks risk-neutrality
        let mut off = res.clone();
        off.r_star *= 2.0;
        assert!(matches!(
            contact_kernel(&m, &off, tol),
            Err(Error::RiskNeutrality { .. })
        ));
    }

    #[test]
    fn equilibrium_examples() {
        let e = Economy::new(vec![2.0], vec![1.0]).unwrap();
        assert_abs_diff_eq!(equilibrium_rstar(&e, 3.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(equilibrium_rstar(&e, 0.0, 0.0).unwrap(), 0.0);
        assert!(equilibrium_rstar(&e, -2.0, 1.0).is_err());

        let many = Economy::new(vec![3.0; 4], vec![1.5; 4]).unwrap();
        let one = Economy::new(vec![8.0], vec![1.0]).unwrap();
        assert_eq!(
            equilibrium_rstar(&many, 2.0, 5.0).unwrap(),
            equilibrium_rstar(&one, 2.0, 5.0).unwrap()
        );
        assert!(Economy::new(vec![1.0], vec![0.0]).is_err());
        assert!(Economy::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn equilibrium_wrapper_and_csv() {
        let full = returns_market(100, 9, 0.01, vec![10.0, 20.0, 30.0, 1.0]);
        let e = Economy::new(vec![100.0, 50.0], vec![2.0, 1.0]).unwrap();
        let h = Strategy::new(vec![1.0, 1.0, 1.0, 5.0]).unwrap();
        let mu = WeightingMeasure::tail(0.1).unwrap();
        let eq = equilibrium(&e, &full, &mu, &h).unwrap();
        assert!(eq.market_value + eq.risk_value >= 0.0);
        let k = (eq.market_value + eq.risk_value) / e.tolerance_sum();
        assert!((eq.r_star * eq.r_star + eq.r_star - k).abs() < 1e-12);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("economy.csv");
        std::fs::write(&path, "endowment,aversion\n100,2\n50,1\n").unwrap();
        assert_eq!(Economy::from_csv(&path).unwrap(), e);
        std::fs::write(&path, "endowment,aversion\n100,x\n").unwrap();
        assert!(matches!(Economy::from_csv(&path), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn allocation_examples() {
        let h = Strategy::new(vec![3.0, -1.5, 0.25]).unwrap();
        let one = Economy::new(vec![5.0], vec![2.0]).unwrap();
        assert_eq!(agent_allocations(&one, &h), vec![h.clone()]);
        let two = Economy::new(vec![4.0, 2.0], vec![2.0, 1.0]).unwrap();
        let halves = agent_allocations(&two, &h);
        assert_eq!(halves[0], h.scaled(0.5));
        assert_eq!(halves[1], h.scaled(0.5));
        let doubled = Economy::new(vec![4.0, 2.0], vec![4.0, 2.0]).unwrap();
        assert_eq!(agent_allocations(&doubled, &h), halves);
    }

    proptest! {
        #[test]
        fn allocations_clear_the_market(
            agents in prop::collection::vec((0.1..1e3f64, 0.1..10.0f64), 1..12),
            h in prop::collection::vec(-100.0..100.0f64, 1..6),
        ) {
            let (w, a): (Vec<f64>, Vec<f64>) = agents.into_iter().unzip();
            let e = Economy::new(w, a).unwrap();
            let market = Strategy::new(h).unwrap();
            let alloc = agent_allocations(&e, &market);
            for i in 0..market.len() {
                let mut total = 0.0;
                for s in &alloc {
                    total += s.as_slice()[i];
                }
                prop_assert!((total - market.as_slice()[i]).abs() <= 1e-13 * (1.0 + market.as_slice()[i].abs()));
            }
        }

        #[test]
        fn rstar_solves_the_quadratic(w in 0.1..100.0f64, a in 0.1..10.0f64, mv in 0.0..50.0f64, rv in 0.0..50.0f64) {
            let e = Economy::new(vec![w], vec![a]).unwrap();
            let r = equilibrium_rstar(&e, mv, rv).unwrap();
            let k = (mv + rv) / (w / a);
            prop_assert!(r >= 0.0);
            prop_assert!((r * r + r - k).abs() < 1e-12 * (1.0 + k));
        }
    }
}
