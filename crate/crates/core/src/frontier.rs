//! The coherent Markowitz problem: maximize `E_P⟨h,ΔS⟩` subject to
//! `ρ(⟨h,ΔS⟩) <= c`, solved in the equivalent form
//! `min ρ(⟨h,ΔS⟩)` subject to `E_P⟨h,ΔS⟩ = 1`.
//!
//! `h ↦ ρ(⟨h,ΔS⟩)` is convex, positively homogeneous and, on a finite
//! scenario set, piecewise linear. Every evaluation at `h_k` yields the
//! generator point `g_k = E_{Q_k} ΔS` and the global minorant
//! `ρ(⟨h,ΔS⟩) >= -⟨g_k, h⟩`. The solver runs projected subgradient steps,
//! then a trust-region cutting-plane phase, and stops once the LP dual of
//! the cutting-plane model certifies the relative gap.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::extreme::ExtremeWeights;
use crate::scenario::MarketModel;
use crate::spectral::{dot, Weigher, WeightingMeasure};

/// Asset holdings in units of shares.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    h: Vec<f64>,
}

impl Strategy {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("strategy holdings must be finite".into()));
        }
        Ok(Self { h })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.h
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|v| *v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Strategy {
        Strategy {
            h: self.h.iter().map(|v| v * c).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative optimality gap at which the solver stops.
    pub tol: f64,
    /// Cap on risk evaluations.
    pub max_iter: usize,
    /// Accepted subgradient steps before switching to cutting planes.
    pub subgradient_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50_000,
            subgradient_steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverDiagnostics {
    /// Risk evaluations performed.
    pub iterations: usize,
    /// Norm of the certifying generator point projected off the reward
    /// direction; zero at an exact optimum.
    pub gradient_norm: f64,
    /// Certified relative gap `(ρ - lower bound) / ρ` on the reward slice.
    pub gap: f64,
    /// Objective after each accepted step; nonincreasing.
    pub objective_history: Vec<f64>,
    /// Largest `|E_P⟨h,ΔS⟩ - 1|` over evaluated iterates.
    pub max_infeasibility: f64,
    /// Number of linear minorants collected.
    pub cuts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierResult {
    /// Optimal strategy scaled so that `ρ(⟨h*,ΔS⟩) = 1`.
    pub h_star: Strategy,
    /// Reward/risk ratio: slope of the efficient frontier.
    pub r_star: f64,
    /// `ρ(⟨h*,ΔS⟩)`, one up to rounding.
    pub risk_at_opt: f64,
    /// Extreme measure of `⟨h*,ΔS⟩` with tied blocks split in proportion
    /// to the scenario weights.
    pub extreme: ExtremeWeights,
    /// Extreme measure of `⟨h*,ΔS⟩` certifying optimality: a mixture of
    /// extreme measures at nearby iterates with `E_Q ΔS` parallel to
    /// `E_P ΔS`. Equals `extreme` when the optimum is a smooth point.
    pub certificate: ExtremeWeights,
    pub diagnostics: SolverDiagnostics,
}

impl FrontierResult {
    pub fn d(&self) -> usize {
        self.h_star.len()
    }
}

/// Evaluates `ρ(⟨h,X⟩)` and its generator point for a fixed scenario matrix.
pub(crate) struct RiskOracle<'a> {
    rows: Vec<f64>,
    d: usize,
    weigher: Weigher<'a>,
    w: Vec<f64>,
    q: Vec<f64>,
}

impl<'a> RiskOracle<'a> {
    /// `x` is `T × d`; `col_scale` divides each column.
    pub(crate) fn new(x: &DMatrix<f64>, col_scale: &[f64], weights: &'a [f64], mu: &'a WeightingMeasure) -> Self {
        let (t, d) = x.shape();
        let mut rows = Vec::with_capacity(t * d);
        for r in 0..t {
            for c in 0..d {
                rows.push(x[(r, c)] / col_scale[c]);
            }
        }
        Self {
            rows,
            d,
            weigher: Weigher::new(mu, weights),
            w: vec![0.0; t],
            q: vec![0.0; t],
        }
    }

    /// Returns `(ρ, g)` with `g = E_Q X` for the extreme measure `Q` at `h`.
    pub(crate) fn eval(&mut self, h: &[f64]) -> (f64, Vec<f64>) {
        let d = self.d;
        for (w, row) in self.w.iter_mut().zip(self.rows.chunks_exact(d)) {
            *w = dot(row, h);
        }
        self.weigher.masses(&self.w, &mut self.q);
        let risk = -dot(&self.q, &self.w);
        let mut g = vec![0.0; d];
        for (q, row) in self.q.iter().zip(self.rows.chunks_exact(d)) {
            if *q != 0.0 {
                for (gi, xi) in g.iter_mut().zip(row) {
                    *gi += q * xi;
                }
            }
        }
        (risk, g)
    }

    pub(crate) fn masses(&self) -> &[f64] {
        &self.q
    }
}

struct Cut {
    h: Vec<f64>,
    g: Vec<f64>,
}

struct Certificate {
    lower: f64,
    pi: Vec<(usize, f64)>,
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Puts `u` back on `{⟨m,u⟩ = 1}`.
fn project_slice(u: &mut [f64], m: &[f64], m2: f64) {
    let err = 1.0 - dot(m, u);
    for (ui, mi) in u.iter_mut().zip(m) {
        *ui += err * mi / m2;
    }
}

/// Projection onto `{⟨m,v⟩ = 0}`.
fn project_tangent(v: &[f64], m: &[f64], m2: f64) -> Vec<f64> {
    let a = dot(v, m) / m2;
    v.iter().zip(m).map(|(vi, mi)| vi - a * mi).collect()
}

/// Lower bound on `min ρ` over the slice from the cuts: the LP
/// `max s` subject to `Σ π_k g_k + s m = 0`, `Σ π_k = 1`, `π >= 0`.
fn dual_bound(cuts: &[Cut], m: &[f64]) -> Option<Certificate> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let pis: Vec<_> = cuts.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let s = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for (i, &mi) in m.iter().enumerate() {
        let mut row: Vec<_> = pis.iter().zip(cuts).map(|(&p, c)| (p, c.g[i])).collect();
        row.push((s, mi));
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
    }
    let simplex: Vec<_> = pis.iter().map(|&p| (p, 1.0)).collect();
    lp.add_constraint(simplex.as_slice(), ComparisonOp::Eq, 1.0);
    let sol = lp.solve().ok()?;
    let mut pi: Vec<(usize, f64)> = pis
        .iter()
        .enumerate()
        .map(|(k, &p)| (k, sol[p].max(0.0)))
        .filter(|(_, v)| *v > 1e-14)
        .collect();
    let total: f64 = pi.iter().map(|(_, v)| v).sum();
    if total <= 0.0 {
        return None;
    }
    for (_, v) in pi.iter_mut() {
        *v /= total;
    }
    Some(polish(cuts, m, pi, sol[s]))
}

/// Re-solves the certificate on the LP's support by least squares, which is
/// more accurate than the simplex output; kept only if it stays in the
/// simplex and lowers the residual.
fn polish(cuts: &[Cut], m: &[f64], pi: Vec<(usize, f64)>, s_lp: f64) -> Certificate {
    let d = m.len();
    let residual = |pi: &[(usize, f64)], s: f64| -> f64 {
        (0..d)
            .map(|i| (pi.iter().map(|(k, p)| p * cuts[*k].g[i]).sum::<f64>() + s * m[i]).abs())
            .fold(0.0, f64::max)
    };
    let n = pi.len();
    let mut a = DMatrix::zeros(d + 1, n + 1);
    let mut b = DVector::zeros(d + 1);
    for (j, (k, _)) in pi.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = cuts[*k].g[i];
        }
        a[(d, j)] = 1.0;
    }
    for i in 0..d {
        a[(i, n)] = m[i];
    }
    b[d] = 1.0;
    let lp_cert = Certificate { lower: s_lp, pi };
    let Ok(x) = a.svd(true, true).solve(&b, 1e-14) else {
        return lp_cert;
    };
    if x.iter().take(n).any(|v| *v < -1e-12 || !v.is_finite()) {
        return lp_cert;
    }
    let new_pi: Vec<(usize, f64)> = lp_cert
        .pi
        .iter()
        .zip(x.iter())
        .map(|((k, _), v)| (*k, v.max(0.0)))
        .collect();
    let total: f64 = new_pi.iter().map(|(_, v)| v).sum();
    let new_pi: Vec<(usize, f64)> = new_pi.into_iter().map(|(k, v)| (k, v / total)).collect();
    // The best s for fixed π is the least-squares fit along m.
    let gbar: Vec<f64> = (0..d)
        .map(|i| new_pi.iter().map(|(k, p)| p * cuts[*k].g[i]).sum())
        .collect();
    let s_new = -dot(&gbar, m) / dot(m, m);
    if residual(&new_pi, s_new) < residual(&lp_cert.pi, lp_cert.lower) {
        Certificate {
            lower: s_new,
            pi: new_pi,
        }
    } else {
        lp_cert
    }
}

/// Cutting-plane model minimized over the slice intersected with the box
/// `|u - c|_∞ <= delta`. Returns the minimizer and model value.
fn master(cuts: &[Cut], m: &[f64], c: &[f64], delta: f64) -> Option<(Vec<f64>, f64)> {
    let d = m.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let u: Vec<_> = (0..d).map(|i| lp.add_var(0.0, (c[i] - delta, c[i] + delta))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let slice: Vec<_> = u.iter().zip(m).map(|(&v, &mi)| (v, mi)).collect();
    lp.add_constraint(slice.as_slice(), ComparisonOp::Eq, 1.0);
    for cut in cuts {
        // t + <g, u> >= 0
        let mut row: Vec<_> = u.iter().zip(&cut.g).map(|(&v, &gi)| (v, gi)).collect();
        row.push((t, 1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().ok()?;
    Some((u.iter().map(|&v| sol[v]).collect(), sol[t]))
}

struct Solver<'a> {
    oracle: RiskOracle<'a>,
    m: Vec<f64>,
    cuts: Vec<Cut>,
    evals: usize,
    max_infeasibility: f64,
    opts: SolverOptions,
}

impl Solver<'_> {
    fn eval(&mut self, u: &[f64]) -> Result<f64> {
        if self.evals >= self.opts.max_iter {
            return Err(Error::NonConvergence {
                iterations: self.evals,
                gap: f64::NAN,
            });
        }
        self.evals += 1;
        self.max_infeasibility = self.max_infeasibility.max((dot(&self.m, u) - 1.0).abs());
        let (f, g) = self.oracle.eval(u);
        if f <= 0.0 {
            return Err(Error::Unbounded(format!(
                "strategy with unit expected reward has risk {f:.6e}"
            )));
        }
        self.cuts.push(Cut { h: u.to_vec(), g });
        Ok(f)
    }

    fn last_g(&self) -> &[f64] {
        &self.cuts.last().expect("at least one evaluation").g
    }
}

/// Column scales that make the LP coefficients comparable across assets.
fn column_scales(x: &DMatrix<f64>, weights: &[f64]) -> Vec<f64> {
    x.column_iter()
        .map(|c| {
            let s = c.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
            if s > 0.0 && s.is_finite() {
                s
            } else {
                1.0
            }
        })
        .collect()
}

/// Solves `min ρ(⟨h,ΔS⟩)` subject to `E_P⟨h,ΔS⟩ = 1` and rescales to the
/// unit-risk optimum `h*`, with `R* = 1 / min`.
pub fn optimize(m: &MarketModel, mu: &WeightingMeasure, opts: &SolverOptions) -> Result<FrontierResult> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) || opts.max_iter == 0 {
        return Err(Error::Domain("solver needs tol > 0 and max_iter >= 1".into()));
    }
    let x = m.pnl();
    let weights = m.scenarios().weights();
    let reward = m.expected_pnl();
    if reward.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateReward);
    }
    let d = x.ncols();
    let scale = column_scales(&x, weights);
    let ms: Vec<f64> = reward.iter().zip(&scale).map(|(r, s)| r / s).collect();
    let m2 = dot(&ms, &ms);

    let mut solver = Solver {
        oracle: RiskOracle::new(&x, &scale, weights, mu),
        m: ms.clone(),
        cuts: Vec::new(),
        evals: 0,
        max_infeasibility: 0.0,
        opts: *opts,
    };
    // E_P is always in the determining set, so -<m,u> is a valid minorant;
    // it keeps the dual LP feasible from the start.
    solver.cuts.push(Cut {
        h: vec![0.0; d],
        g: ms.clone(),
    });

    let mut c: Vec<f64> = ms.iter().map(|v| v / m2).collect();
    let mut f_c = solver.eval(&c)?;
    let mut history = vec![f_c];

    // Phase 1: projected subgradient descent with backtracking.
    let mut step = 0.1 * norm(&c);
    let mut accepted = 0;
    while accepted < opts.subgradient_steps && d > 1 {
        let dir = project_tangent(solver.last_g(), &ms, m2);
        let len = norm(&dir);
        if len <= 1e-14 * norm(solver.last_g()).max(1e-300) {
            break;
        }
        let mut t = 2.0 * step;
        let mut improved = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = c.iter().zip(&dir).map(|(ci, di)| ci + t * di / len).collect();
            project_slice(&mut trial, &ms, m2);
            let f = solver.eval(&trial)?;
            if f < f_c {
                improved = Some((trial, f));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, f)) = improved else { break };
        // The accepted point must be the newest cut for the next direction.
        c = trial;
        f_c = f;
        step = t;
        history.push(f_c);
        accepted += 1;
    }
    // Re-evaluate at the centre so its generator point is the newest cut.
    if solver.cuts.last().map(|k| k.h.as_slice()) != Some(c.as_slice()) {
        f_c = solver.eval(&c)?;
    }

    // Phase 2: trust-region cutting planes.
    let mut delta = 2.0 * norm(&c).max(step);
    let delta_min = 1e-13 * norm(&c);
    let mut cert = None;
    loop {
        if let Some(cr) = dual_bound(&solver.cuts, &ms) {
            let gap = (f_c - cr.lower) / f_c;
            if gap <= opts.tol {
                cert = Some(cr);
                break;
            }
            cert = Some(cr);
        }
        if !(delta.is_finite() && delta < 1e15 * (1.0 + norm(&c))) {
            return Err(Error::Unbounded(
                "risk decreases without bound along the reward slice".into(),
            ));
        }
        let Some((mut u, model)) = master(&solver.cuts, &ms, &c, delta) else {
            delta *= 0.5;
            if delta < delta_min {
                break;
            }
            continue;
        };
        project_slice(&mut u, &ms, m2);
        let pred = f_c - model;
        if pred <= opts.tol * 1e-3 * f_c && delta <= delta_min {
            break;
        }
        let f = match solver.eval(&u) {
            Ok(f) => f,
            Err(Error::NonConvergence { iterations, .. }) => {
                let gap = cert
                    .as_ref()
                    .map_or(f64::INFINITY, |cr: &Certificate| (f_c - cr.lower) / f_c);
                return Err(Error::NonConvergence { iterations, gap });
            }
            Err(e) => return Err(e),
        };
        let on_boundary = u.iter().zip(&c).any(|(a, b)| (a - b).abs() >= 0.999 * delta);
        if f < f_c - 0.1 * pred.max(0.0) && f < f_c {
            c = u;
            f_c = f;
            history.push(f_c);
            if on_boundary {
                delta *= 2.0;
            }
        } else if f > f_c {
            delta = (0.5 * delta).max(delta_min);
        } else {
            delta = (0.75 * delta).max(delta_min);
        }
    }

    let cert = cert.ok_or(Error::NonConvergence {
        iterations: solver.evals,
        gap: f64::INFINITY,
    })?;
    let gap = (f_c - cert.lower) / f_c;
    if gap > opts.tol {
        return Err(Error::NonConvergence {
            iterations: solver.evals,
            gap,
        });
    }

    // Certifying measure: the π-mixture of the extreme measures at the
    // supporting iterates. Cut 0 is E_P itself.
    let t_len = weights.len();
    let mut qbar = vec![0.0; t_len];
    for &(k, p) in &cert.pi {
        if k == 0 {
            for (qb, w) in qbar.iter_mut().zip(weights) {
                *qb += p * w;
            }
        } else {
            let h = solver.cuts[k].h.clone();
            solver.oracle.eval(&h);
            for (qb, q) in qbar.iter_mut().zip(solver.oracle.masses()) {
                *qb += p * q;
            }
        }
    }
    let total: f64 = qbar.iter().sum();
    qbar.iter_mut().for_each(|v| *v /= total);

    let (risk_c, _) = solver.oracle.eval(&c);
    let proportional = solver.oracle.masses().to_vec();
    let r_star = 1.0 / risk_c;
    let h_star: Vec<f64> = c.iter().zip(&scale).map(|(u, s)| u / s * r_star).collect();

    let gbar: Vec<f64> = (0..d)
        .map(|i| cert.pi.iter().map(|(k, p)| p * solver.cuts[*k].g[i] * scale[i]).sum())
        .collect();
    let reward_vec: Vec<f64> = reward.iter().copied().collect();
    let gradient_norm = norm(&project_tangent(&gbar, &reward_vec, dot(&reward_vec, &reward_vec)));
    let h_star = Strategy::new(h_star)?;
    let risk_at_opt = risk_c * r_star;
    let cuts = solver.cuts.len();
    Ok(FrontierResult {
        h_star,
        r_star,
        risk_at_opt,
        extreme: ExtremeWeights::new(proportional)?,
        certificate: ExtremeWeights::new(qbar)?,
        diagnostics: SolverDiagnostics {
            iterations: solver.evals,
            gradient_norm,
            gap,
            objective_history: history,
            max_infeasibility: solver.max_infeasibility,
            cuts,
        },
    })
}

/// Points `(risk, reward) = (c, R*·c)` on the efficient frontier; the
/// strategy at level `c` is `c·h*`.
pub fn frontier(res: &FrontierResult, c_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    c_values
        .iter()
        .map(|&c| {
            if c.is_finite() && c >= 0.0 {
                Ok((c, res.r_star * c))
            } else {
                Err(Error::Domain(format!("risk level {c} must be nonnegative")))
            }
        })
        .collect()
}

/// `ρ(⟨h,ΔS⟩)` and the generator point `E_Q ΔS` attaining
/// `ρ = -min_{x∈G} ⟨h,x⟩`.
pub fn support_probe(m: &MarketModel, mu: &WeightingMeasure, h: &Strategy) -> Result<(f64, Vec<f64>)> {
    if h.len() != m.ncols() {
        return Err(Error::LengthMismatch {
            expected: m.ncols(),
            found: h.len(),
        });
    }
    if h.is_zero() {
        return Err(Error::InvalidInput("support probe needs a nonzero strategy".into()));
    }
    let x = m.pnl();
    let ones = vec![1.0; x.ncols()];
    let mut oracle = RiskOracle::new(&x, &ones, m.scenarios().weights(), mu);
    Ok(oracle.eval(h.as_slice()))
}
