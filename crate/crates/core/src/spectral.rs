//! Weighting measures on `(0, 1]` and the spectral (Weighted V@R) risk of a
//! discrete sample.
//!
//! A weighting measure `mu` induces the distortion density
//! `psi(x) = ∫_[x,1] λ⁻¹ mu(dλ)` and its primitive `Psi(z) = ∫_0^z psi`.
//! On a finite sample sorted increasingly with cumulative weights `z_t`, the
//! risk is `-Σ x_(t) (Psi(z_t) - Psi(z_{t-1}))`. The same Psi-differences are
//! the masses of the extreme measure, so both live here.

use crate::error::{Error, Result};
use crate::special;

const MASS_TOL: f64 = 1e-12;

/// One atom of an atomic weighting measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Tail level `λ ∈ (0, 1]`.
    pub level: f64,
    /// Probability mass carried by the atom.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    /// Point mass at `λ`: Tail V@R of order `λ`.
    Dirac(f64),
    /// Finite mixture of Tail V@Rs.
    Atomic(Vec<Atom>),
    /// Density `B(β+1, α-β)⁻¹ x^β (1-x)^(α-β-1)` on `[0, 1]`.
    BetaFamily { alpha: f64, beta: f64 },
}

/// A probability measure on `(0, 1]` defining a Weighted V@R.
///
/// Construction validates the variant, so every value of this type has
/// total mass one and support inside `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightingMeasure {
    kind: MeasureKind,
}

fn check_level(level: f64) -> Result<()> {
    if level.is_finite() && level > 0.0 && level <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("tail level {level} is outside (0, 1]")))
    }
}

impl WeightingMeasure {
    pub fn dirac(level: f64) -> Result<Self> {
        check_level(level)?;
        Ok(Self {
            kind: MeasureKind::Dirac(level),
        })
    }

    /// Mixture of point masses given as `(level, weight)` pairs.
    pub fn atomic<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(level, weight)| Atom { level, weight })
            .collect();
        if atoms.is_empty() {
            return Err(Error::Domain("atomic measure needs at least one atom".into()));
        }
        let mut total = 0.0;
        for a in &atoms {
            check_level(a.level)?;
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(Error::Domain(format!(
                    "atom weight {} is negative or non-finite",
                    a.weight
                )));
            }
            total += a.weight;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Domain(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self {
            kind: MeasureKind::Atomic(atoms),
        })
    }

    /// Beta-family density with real parameters `α > -1`, `-1 < β < α`.
    pub fn beta_family(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > -1.0 && beta > -1.0 && beta < alpha) {
            return Err(Error::Domain(format!(
                "beta-family parameters need -1 < beta < alpha, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self {
            kind: MeasureKind::BetaFamily { alpha, beta },
        })
    }

    /// Tail V@R (expected shortfall) of order `λ`.
    pub fn tail(lambda: f64) -> Result<Self> {
        Self::dirac(lambda)
    }

    /// Alpha V@R: minus the expected minimum of `alpha` independent copies.
    ///
    /// `alpha = 1` is the expectation itself, represented by the point mass
    /// at 1 (the Beta density degenerates there).
    pub fn alpha_var(alpha: u32) -> Result<Self> {
        match alpha {
            0 => Err(Error::Domain("alpha must be at least 1".into())),
            1 => Self::dirac(1.0),
            a => Self::beta_family(f64::from(a), 1.0),
        }
    }

    /// Beta V@R with integer parameters `1 <= beta < alpha`.
    pub fn beta_var(alpha: u32, beta: u32) -> Result<Self> {
        if beta == 0 || beta >= alpha {
            return Err(Error::Domain(format!(
                "beta V@R needs integers 1 <= beta < alpha, got alpha={alpha}, beta={beta}"
            )));
        }
        Self::beta_family(f64::from(alpha), f64::from(beta))
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// `(α, β)` when the risk has the order-statistic form
    /// `-E[(1/β) Σ_{i<=β} X_(i)]` over `α` independent copies.
    pub fn order_statistic_params(&self) -> Option<(u32, u32)> {
        match &self.kind {
            MeasureKind::Dirac(l) if *l == 1.0 => Some((1, 1)),
            MeasureKind::BetaFamily { alpha, beta } => {
                let int = |v: f64| (v >= 1.0 && v.fract() == 0.0 && v < 1e6).then_some(v as u32);
                Some((int(*alpha)?, int(*beta)?))
            }
            _ => None,
        }
    }

    /// `psi(x) = ∫_[x,1] λ⁻¹ mu(dλ)`; atoms at `x` are included.
    ///
    /// For the Beta family with `β <= 0` the density is unbounded at zero
    /// and `psi(0)` is `+∞`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("psi argument {x} is outside [0, 1]")));
        }
        Ok(self.psi_unchecked(x))
    }

    fn psi_unchecked(&self, x: f64) -> f64 {
        match &self.kind {
            MeasureKind::Dirac(l) => {
                if x <= *l {
                    1.0 / l
                } else {
                    0.0
                }
            }
            MeasureKind::Atomic(atoms) => atoms.iter().filter(|a| x <= a.level).map(|a| a.weight / a.level).sum(),
            MeasureKind::BetaFamily { alpha, beta } => beta_psi(*alpha, *beta, x),
        }
    }

    /// `Psi(z) = ∫_0^z psi(x) dx`, concave and nondecreasing with
    /// `Psi(0) = 0` and `Psi(1) = 1`.
    pub fn cumulative_psi(&self, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Domain(format!("cumulative psi argument {z} is outside [0, 1]")));
        }
        Ok(self.cumulative_psi_unchecked(z))
    }

    pub(crate) fn cumulative_psi_unchecked(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z >= 1.0 {
            return 1.0;
        }
        match &self.kind {
            MeasureKind::Dirac(l) => z.min(*l) / l,
            MeasureKind::Atomic(atoms) => atoms.iter().map(|a| a.weight * z.min(a.level) / a.level).sum(),
            // Psi(z) = mu((0, z]) + z ∫_(z,1] λ⁻¹ mu(dλ)
            MeasureKind::BetaFamily { alpha, beta } => {
                let below = special::beta_reg(beta + 1.0, alpha - beta, z);
                (below + z * beta_psi(*alpha, *beta, z)).min(1.0)
            }
        }
    }
}

/// Tail V@R of order `λ`.
pub fn make_tail(lambda: f64) -> Result<WeightingMeasure> {
    WeightingMeasure::tail(lambda)
}

/// Alpha V@R with an integer number of copies.
pub fn make_alpha(alpha: u32) -> Result<WeightingMeasure> {
    WeightingMeasure::alpha_var(alpha)
}

/// Beta V@R with integer parameters.
pub fn make_beta(alpha: u32, beta: u32) -> Result<WeightingMeasure> {
    WeightingMeasure::beta_var(alpha, beta)
}

fn beta_psi(alpha: f64, beta: f64, x: f64) -> f64 {
    let b = alpha - beta;
    if x >= 1.0 {
        return 0.0;
    }
    if beta > 0.0 {
        // B(β, b) / B(β+1, b) = α / β
        return alpha / beta * (1.0 - special::beta_reg(beta, b, x));
    }
    if x <= 0.0 {
        return f64::INFINITY;
    }
    // β <= 0: split λ^(β-1)(1-λ)^(b-1) = λ^(β-1)(1-λ)^b + λ^β(1-λ)^(b-1).
    // The second piece is an incomplete beta with positive parameters; the
    // first is smooth on [x, 1] after substituting λ = e^u.
    let head = 1.0 - special::beta_reg(beta + 1.0, b, x);
    let integrand = |u: f64| (u * beta + b * (-u.exp()).ln_1p()).exp();
    let tail = special::adaptive_simpson(&integrand, x.ln(), 0.0, 1e-13);
    head + tail * (-special::ln_beta(beta + 1.0, b)).exp()
}

/// A finite sample: values (discounted P&L per scenario) with probability
/// weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    weights: Vec<f64>,
}

pub(crate) fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("sample is empty".into()));
    }
    let mut total = 0.0;
    for &w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidInput(format!("weight {w} is negative or non-finite")));
        }
        total += w;
    }
    // summation error grows with the number of terms
    let tol = MASS_TOL + 4.0 * f64::EPSILON * weights.len() as f64;
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

impl Sample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                found: weights.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample value {v} is not finite")));
        }
        validate_weights(&weights)?;
        Ok(Self { values, weights })
    }

    /// Equally weighted sample.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidInput("sample is empty".into()));
        }
        Self::new(values, vec![1.0 / n as f64; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same weights, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(values, self.weights.clone())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Spectral risk `rho_mu` of a sample.
pub fn spectral_risk(sample: &Sample, mu: &WeightingMeasure) -> f64 {
    let mut weigher = Weigher::new(mu, sample.weights());
    let mut q = vec![0.0; sample.len()];
    weigher.masses(sample.values(), &mut q);
    -dot(&q, sample.values())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Computes Psi-difference masses for repeated evaluations against a fixed
/// weight vector. Uniform weights use a precomputed Psi grid.
pub(crate) struct Weigher<'a> {
    mu: &'a WeightingMeasure,
    weights: &'a [f64],
    grid: Option<Vec<f64>>,
    order: Vec<usize>,
}

impl<'a> Weigher<'a> {
    pub(crate) fn new(mu: &'a WeightingMeasure, weights: &'a [f64]) -> Self {
        let n = weights.len();
        let uniform = n > 0 && weights.iter().all(|w| *w == weights[0]);
        let grid = uniform.then(|| {
            (0..=n)
                .map(|k| {
                    if k == n {
                        1.0
                    } else {
                        mu.cumulative_psi_unchecked(k as f64 / n as f64)
                    }
                })
                .collect()
        });
        Self {
            mu,
            weights,
            grid,
            order: Vec::with_capacity(n),
        }
    }

    /// Writes the extreme-measure masses of `values` into `out`. Tied values
    /// share their block's mass in proportion to the weights. Returns whether
    /// any tie was found.
    pub(crate) fn masses(&mut self, values: &[f64], out: &mut [f64]) -> bool {
        let n = values.len();
        debug_assert_eq!(n, self.weights.len());
        debug_assert_eq!(n, out.len());
        self.order.clear();
        self.order.extend(0..n);
        self.order
            .sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

        let mut ties = false;
        let mut start = 0;
        let mut z = 0.0;
        let mut psi_prev = 0.0;
        while start < n {
            let v = values[self.order[start]];
            let mut end = start + 1;
            while end < n && values[self.order[end]] == v {
                end += 1;
            }
            ties |= end - start > 1;
            let block = &self.order[start..end];
            let block_weight: f64 = block.iter().map(|&i| self.weights[i]).sum();
            let psi_next = match &self.grid {
                Some(grid) => grid[end],
                None => {
                    z += block_weight;
                    if end == n {
                        1.0
                    } else {
                        self.mu.cumulative_psi_unchecked(z.min(1.0))
                    }
                }
            };
            let mass = (psi_next - psi_prev).max(0.0);
            if block.len() == 1 {
                out[block[0]] = mass;
            } else if block_weight > 0.0 {
                for &i in block {
                    out[i] = mass * self.weights[i] / block_weight;
                }
            } else {
                for &i in block {
                    out[i] = 0.0;
                }
            }
            psi_prev = psi_next;
            start = end;
        }
        ties
    }
}

/// Extreme-measure masses of `values` under weights `weights`, and whether
/// the values contain ties.
pub(crate) fn extreme_masses(values: &[f64], weights: &[f64], mu: &WeightingMeasure) -> (Vec<f64>, bool) {
    let mut q = vec![0.0; values.len()];
    let ties = Weigher::new(mu, weights).masses(values, &mut q);
    (q, ties)
}
