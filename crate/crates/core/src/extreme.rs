//! Extreme measures of discrete P&Ls, risk contributions, and the
//! order-statistic Monte Carlo estimators of contributions.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, SamplerError};
use crate::scenario::MarketModel;
use crate::spectral::{dot, extreme_masses, validate_weights, Sample, WeightingMeasure};

/// Per-scenario masses of the extreme measure `Q(W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeWeights {
    q: Vec<f64>,
    ties: bool,
}

impl ExtremeWeights {
    /// Wraps an arbitrary probability vector.
    pub fn new(q: Vec<f64>) -> Result<Self> {
        validate_weights(&q)?;
        Ok(Self { q, ties: false })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Whether `W` had tied values, in which case the extreme measure is
    /// not unique and these masses are one member of the extreme set.
    pub fn has_ties(&self) -> bool {
        self.ties
    }

    /// `E_Q X` for scenario-aligned `x`.
    pub fn expectation(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.q.len() {
            return Err(Error::LengthMismatch {
                expected: self.q.len(),
                found: x.len(),
            });
        }
        Ok(dot(&self.q, x))
    }

    /// Radon-Nikodym density `φ_t = q_t / ν_t`.
    pub fn density(&self, nu: &[f64]) -> Result<Vec<f64>> {
        if nu.len() != self.q.len() {
            return Err(Error::LengthMismatch {
                expected: self.q.len(),
                found: nu.len(),
            });
        }
        self.q
            .iter()
            .zip(nu)
            .enumerate()
            .map(|(t, (&q, &n))| {
                if n > 0.0 {
                    Ok(q / n)
                } else if q > 0.0 {
                    Err(Error::AbsoluteContinuity { scenario: t })
                } else {
                    Ok(0.0)
                }
            })
            .collect()
    }
}

/// Extreme measure of `w`: sorted increasingly with cumulative weights `z_t`,
/// the `t`-th smallest scenario gets `Psi(z_t) - Psi(z_{t-1})`.
pub fn extreme_measure(w: &Sample, mu: &WeightingMeasure) -> ExtremeWeights {
    let (q, ties) = extreme_masses(w.values(), w.weights(), mu);
    ExtremeWeights { q, ties }
}

/// Risk contribution `ρ^c(X; W) = -E_{Q(W)} X`.
pub fn risk_contribution(x: &[f64], w: &Sample, mu: &WeightingMeasure) -> Result<f64> {
    if x.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: x.len(),
        });
    }
    Ok(-extreme_measure(w, mu).expectation(x)?)
}

/// Source of independent `(x, y)` draws: `x` is the contributing P&L, `y`
/// the portfolio P&L it is measured against.
pub trait PairSampler {
    fn draw(&mut self, rng: &mut dyn RngCore) -> Result<(f64, f64), SamplerError>;
}

/// Draws scenario pairs from a finite weighted table.
#[derive(Debug, Clone)]
pub struct DiscretePairs {
    x: Vec<f64>,
    y: Vec<f64>,
    picker: WeightedIndex<f64>,
}

impl DiscretePairs {
    pub fn new(x: Vec<f64>, y: Vec<f64>, weights: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: if x.len() != y.len() { y.len() } else { weights.len() },
            });
        }
        validate_weights(weights)?;
        let picker = WeightedIndex::new(weights).map_err(|e| Error::InvalidInput(format!("pair weights: {e}")))?;
        Ok(Self { x, y, picker })
    }

    pub fn uniform(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len().max(1);
        Self::new(x, y, &vec![1.0 / n as f64; n])
    }
}

impl PairSampler for DiscretePairs {
    fn draw(&mut self, rng: &mut dyn RngCore) -> Result<(f64, f64), SamplerError> {
        let t = self.picker.sample(rng);
        Ok((self.x[t], self.y[t]))
    }
}

/// A Monte Carlo estimate with the standard error of its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub groups: usize,
}

impl McEstimate {
    /// Mean and standard error of per-group values.
    pub fn from_groups(values: &[f64]) -> Self {
        let k = values.len();
        let mean = values.iter().sum::<f64>() / k as f64;
        let var = if k > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64
        } else {
            0.0
        };
        Self {
            value: mean,
            std_err: (var / k as f64).sqrt(),
            groups: k,
        }
    }
}

/// Mean of the `x` values at the `beta` smallest `y` values of one group of
/// draws. Equal `y` values are broken by draw order.
pub fn order_statistic_mean(x: &[f64], y: &[f64], beta: usize) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    debug_assert!(beta >= 1 && beta <= x.len());
    if beta == 1 {
        return x[argmin(y)];
    }
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| (y[a] + 0.0).total_cmp(&(y[b] + 0.0)).then(a.cmp(&b)));
    idx[..beta].iter().map(|&i| x[i]).sum::<f64>() / beta as f64
}

fn argmin(y: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in y.iter().enumerate().skip(1) {
        if (v + 0.0).total_cmp(&(y[best] + 0.0)).is_lt() {
            best = i;
        }
    }
    best
}

fn check_groups(alpha: u32, beta: u32, k: usize) -> Result<()> {
    if alpha == 0 || beta == 0 || beta > alpha {
        return Err(Error::Domain(format!(
            "order-statistic estimator needs 1 <= beta <= alpha, got alpha={alpha}, beta={beta}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("need at least one group".into()));
    }
    Ok(())
}

fn run_groups(source: &mut dyn PairSampler, alpha: u32, beta: u32, k: usize, seed: u64) -> Result<McEstimate> {
    let a = alpha as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = vec![0.0; a];
    let mut ys = vec![0.0; a];
    let mut values = Vec::with_capacity(k);
    for g in 0..k {
        for i in 0..a {
            let (x, y) = source.draw(&mut rng).map_err(|source| Error::Sampler {
                context: format!("drawing group {g}"),
                source,
            })?;
            xs[i] = x;
            ys[i] = y;
        }
        values.push(-order_statistic_mean(&xs, &ys, beta as usize));
    }
    Ok(McEstimate::from_groups(&values))
}

/// Beta V@R contribution estimate: `K` groups of `α` draws, averaging `-x`
/// over the `β` draws with the smallest `y` in each group.
pub fn mc_contribution_beta(
    source: &mut dyn PairSampler,
    alpha: u32,
    beta: u32,
    k: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_groups(alpha, beta, k)?;
    run_groups(source, alpha, beta, k, seed)
}

/// Alpha V@R contribution estimate: `-x` at the argmin of `y` in each group
/// of `α` draws.
pub fn mc_contribution_alpha(source: &mut dyn PairSampler, alpha: u32, k: usize, seed: u64) -> Result<McEstimate> {
    check_groups(alpha, 1, k)?;
    run_groups(source, alpha, 1, k, seed)
}

/// Extreme measure of the index's discounted P&L.
pub fn index_extreme_measure(m: &MarketModel, mu: &WeightingMeasure) -> Result<ExtremeWeights> {
    let index = m.scenarios().index().ok_or(Error::MissingIndex)?;
    let pnl = m.pnl();
    let w = Sample::new(
        pnl.column(index).iter().copied().collect(),
        m.scenarios().weights().to_vec(),
    )?;
    Ok(extreme_measure(&w, mu))
}

/// `E_Q ΔS^i` with `Q` the extreme measure of the index.
///
/// Discounted P&L is a positive affine map of returns, so `Q` is the same
/// whether it is built from index returns or index P&L, and
/// `E_Q ΔS^i = -S_0^i/(1+r_f) ρ^c(r^i; r_I) - S_0^i r_f/(1+r_f)`.
pub fn reward_estimate(m: &MarketModel, mu: &WeightingMeasure, asset: usize) -> Result<f64> {
    if asset >= m.ncols() {
        return Err(Error::InvalidInput(format!("asset {asset} out of range")));
    }
    let q = index_extreme_measure(m, mu)?;
    let pnl = m.pnl();
    let col: Vec<f64> = pnl.column(asset).iter().copied().collect();
    q.expectation(&col)
}

/// [`reward_estimate`] for every asset.
pub fn reward_estimates(m: &MarketModel, mu: &WeightingMeasure) -> Result<Vec<f64>> {
    let q = index_extreme_measure(m, mu)?;
    let pnl = m.pnl();
    Ok(pnl.column_iter().map(|c| dot(q.q(), c.as_slice())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ScenarioSet, Units};
    use crate::spectral::spectral_risk;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn uniform(values: &[f64]) -> Sample {
        Sample::uniform(values.to_vec()).unwrap()
    }

    #[test]
    fn dirac_one_gives_back_p() {
        let w = Sample::new(vec![3.0, -1.0, 2.0], vec![0.2, 0.5, 0.3]).unwrap();
        let q = extreme_measure(&w, &WeightingMeasure::dirac(1.0).unwrap());
        for (a, b) in q.q().iter().zip(w.weights()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn half_tail_example() {
        let w = uniform(&[4.0, 1.0, 3.0, 2.0]);
        let mu = WeightingMeasure::tail(0.5).unwrap();
        let q = extreme_measure(&w, &mu);
        let expected = [0.0, 0.5, 0.0, 0.5];
        for (a, b) in q.q().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let c = risk_contribution(&[10.0, 20.0, 30.0, 40.0], &w, &mu).unwrap();
        assert_abs_diff_eq!(c, -30.0, epsilon = 1e-12);
        assert_abs_diff_eq!(risk_contribution(&[7.0; 4], &w, &mu).unwrap(), -7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            risk_contribution(w.values(), &w, &mu).unwrap(),
            spectral_risk(&w, &mu),
            epsilon = 1e-12
        );
        assert!(risk_contribution(&[1.0], &w, &mu).is_err());
    }

    #[test]
    fn density_and_absolute_continuity() {
        let q = ExtremeWeights::new(vec![0.5, 0.5, 0.0]).unwrap();
        let phi = q.density(&[0.25, 0.25, 0.5]).unwrap();
        assert_eq!(phi, vec![2.0, 2.0, 0.0]);
        assert!(matches!(
            q.density(&[0.0, 0.5, 0.5]),
            Err(Error::AbsoluteContinuity { scenario: 0 })
        ));
    }

    #[test]
    fn reward_estimate_examples() {
        let r = DMatrix::from_row_slice(3, 3, &[-0.02, -0.03, 0.01, 0.01, 0.02, 0.01, 0.03, 0.01, 0.01]);
        let labels = vec!["idx".to_string(), "a".to_string(), "cash".to_string()];
        let s = ScenarioSet::uniform(r.clone(), labels.clone(), Units::Returns)
            .unwrap()
            .with_index("idx")
            .unwrap();
        let mu = WeightingMeasure::tail(1.0 / 3.0).unwrap();
        let m = MarketModel::new(s.clone(), 0.0, vec![100.0; 3]).unwrap();
        assert_abs_diff_eq!(reward_estimate(&m, &mu, 1).unwrap(), -3.0, epsilon = 1e-12);

        let m = MarketModel::new(s, 0.01, vec![100.0; 3]).unwrap();
        assert_eq!(reward_estimate(&m, &mu, 2).unwrap(), 0.0);
        let all = reward_estimates(&m, &mu).unwrap();
        assert_eq!(all[2], 0.0);

        // affine form against the return contribution
        let w = Sample::uniform(r.column(0).iter().copied().collect()).unwrap();
        let rc = risk_contribution(&r.column(1).iter().copied().collect::<Vec<_>>(), &w, &mu).unwrap();
        let affine = -100.0 / 1.01 * rc - 100.0 * 0.01 / 1.01;
        assert_abs_diff_eq!(all[1], affine, epsilon = 1e-12);

        let no_index = ScenarioSet::uniform(r, labels, Units::Returns).unwrap();
        let m = MarketModel::new(no_index, 0.0, vec![100.0; 3]).unwrap();
        assert!(matches!(reward_estimate(&m, &mu, 0), Err(Error::MissingIndex)));
    }

    #[test]
    fn mc_alpha_one_is_sample_mean() {
        let mut src = DiscretePairs::uniform(vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0]).unwrap();
        let est = mc_contribution_alpha(&mut src, 1, 20_000, 5).unwrap();
        assert!((est.value + 2.0).abs() < 4.0 * est.std_err);
        let mut constant = DiscretePairs::uniform(vec![4.0; 3], vec![0.0, 1.0, 2.0]).unwrap();
        let est = mc_contribution_beta(&mut constant, 3, 2, 17, 1).unwrap();
        assert_eq!(est.value, -4.0);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn mc_alpha_comonotone_two_point() {
        let mut src = DiscretePairs::uniform(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let a = mc_contribution_alpha(&mut src, 2, 20_000, 9).unwrap();
        assert!((a.value + 0.25).abs() < 3.0 * a.std_err);
        let b = mc_contribution_alpha(&mut src, 2, 20_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_rejects_bad_parameters() {
        let mut src = DiscretePairs::uniform(vec![0.0], vec![0.0]).unwrap();
        assert!(mc_contribution_beta(&mut src, 2, 3, 10, 0).is_err());
        assert!(mc_contribution_beta(&mut src, 2, 0, 10, 0).is_err());
        assert!(mc_contribution_alpha(&mut src, 0, 10, 0).is_err());
        assert!(mc_contribution_alpha(&mut src, 2, 0, 0).is_err());
    }

    /// Exact expectation of the group statistic by enumerating all `T^α`
    /// ordered draws.
    fn enumerate_groups(x: &[f64], y: &[f64], nu: &[f64], alpha: usize, beta: usize) -> f64 {
        let t = x.len();
        let mut total = 0.0;
        let mut idx = vec![0usize; alpha];
        loop {
            let p: f64 = idx.iter().map(|&i| nu[i]).product();
            let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            total += p * -order_statistic_mean(&xs, &ys, beta);
            let mut k = 0;
            loop {
                if k == alpha {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < t {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn signed_zeros_tie_in_draw_order() {
        assert_eq!(order_statistic_mean(&[1.0, 2.0], &[0.0, -0.0], 1), 1.0);
        assert_eq!(order_statistic_mean(&[1.0, 2.0, 3.0], &[0.0, -0.0, 5.0], 2), 1.5);
        assert_eq!(order_statistic_mean(&[1.0, 2.0, 3.0], &[0.0, 1.0, -0.0], 1), 1.0);
    }

    #[test]
    fn mc_beta_converges_to_enumeration() {
        let x = [0.3, -1.0, 2.0, 0.5];
        let y = [1.0, -2.0, 0.5, 3.0];
        let mut src = DiscretePairs::uniform(x.to_vec(), y.to_vec()).unwrap();
        let exact = enumerate_groups(&x, &y, &[0.25; 4], 2, 1);
        let est = mc_contribution_beta(&mut src, 2, 1, 20_000, 3).unwrap();
        assert!((est.value - exact).abs() < 3.0 * est.std_err, "{est:?} vs {exact}");
    }

    #[test]
    fn enumeration_matches_exact_contribution() {
        let x = [0.3, -1.0, 2.0, 0.5, 1.1];
        let y = [1.0, -2.0, 0.5, 3.0, 0.1];
        let nu = [0.1, 0.3, 0.2, 0.25, 0.15];
        let w = Sample::new(y.to_vec(), nu.to_vec()).unwrap();
        for (alpha, beta) in [(1, 1), (2, 1), (3, 1), (3, 2)] {
            let mu = if beta == 1 {
                WeightingMeasure::alpha_var(alpha).unwrap()
            } else {
                WeightingMeasure::beta_var(alpha, beta).unwrap()
            };
            let exact = risk_contribution(&x, &w, &mu).unwrap();
            let by_enum = enumerate_groups(&x, &y, &nu, alpha as usize, beta as usize);
            assert_abs_diff_eq!(exact, by_enum, epsilon = 1e-12);
        }
    }

    fn distinct_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (2usize..24).prop_flat_map(|n| {
            (
                prop::collection::vec(-10.0..10.0f64, n),
                prop::collection::vec(-10.0..10.0f64, n),
                prop::collection::vec(0.05..1.0f64, n),
            )
        })
    }

    fn normalize(raw: &[f64]) -> Vec<f64> {
        let s: f64 = raw.iter().sum();
        raw.iter().map(|r| r / s).collect()
    }

    fn min_gap(v: &[f64]) -> f64 {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #[test]
        fn directional_derivative((w, x, raw) in distinct_pair(), lambda in 0.05..1.0f64) {
            prop_assume!(min_gap(&w) > 1e-3);
            let nu = normalize(&raw);
            let mu = WeightingMeasure::tail(lambda).unwrap();
            let ws = Sample::new(w.clone(), nu.clone()).unwrap();
            let base = spectral_risk(&ws, &mu);
            let contribution = risk_contribution(&x, &ws, &mu).unwrap();
            let eps = 1e-5;
            let bumped: Vec<f64> = w.iter().zip(&x).map(|(a, b)| a + eps * b).collect();
            let fd = (spectral_risk(&ws.with_values(bumped).unwrap(), &mu) - base) / eps;
            prop_assert!((fd - contribution).abs() <= 1e-3 * contribution.abs().max(1.0));
        }

        #[test]
        fn scale_invariance_and_linearity((w, x, raw) in distinct_pair(), c in 0.01..100.0f64, a in -3.0..3.0f64) {
            prop_assume!(min_gap(&w) > 1e-9);
            let nu = normalize(&raw);
            let mu = WeightingMeasure::beta_family(4.0, 1.5).unwrap();
            let ws = Sample::new(w.clone(), nu.clone()).unwrap();
            let scaled = ws.with_values(w.iter().map(|v| v * c).collect()).unwrap();
            let (q1, q2) = (extreme_measure(&ws, &mu), extreme_measure(&scaled, &mu));
            prop_assert_eq!(q1.q(), q2.q());
            let combo: Vec<f64> = x.iter().zip(&w).map(|(xi, wi)| a * xi + 2.0 * wi).collect();
            let lhs = risk_contribution(&combo, &ws, &mu).unwrap();
            let rhs = a * risk_contribution(&x, &ws, &mu).unwrap() + 2.0 * risk_contribution(&w, &ws, &mu).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }

        #[test]
        fn subgradient_bound((w, x, raw) in distinct_pair(), lambda in 0.05..1.0f64) {
            let nu = normalize(&raw);
            let mu = WeightingMeasure::atomic([(lambda, 0.6), (1.0, 0.4)]).unwrap();
            let ws = Sample::new(w.clone(), nu).unwrap();
            let q = extreme_measure(&ws, &mu);
            let sum: Vec<f64> = w.iter().zip(&x).map(|(a, b)| a + b).collect();
            let lhs = spectral_risk(&ws.with_values(sum).unwrap(), &mu) - spectral_risk(&ws, &mu);
            prop_assert!(lhs >= -q.expectation(&x).unwrap() - 1e-9);
            let total: f64 = q.q().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            prop_assert!((q.expectation(&w).unwrap() + spectral_risk(&ws, &mu)).abs() < 1e-9);
        }
    }
}
