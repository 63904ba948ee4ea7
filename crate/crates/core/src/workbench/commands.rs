use std::path::Path;

use super::config::{parse_gen, parse_list, parse_measure, FileConfig, GenMethod, ListValue, RunConfig};
use super::report::{Cell, Report, Table};
use super::{Cli, Command, CommonArgs, SolveArgs};
use crate::capm::{agent_allocations, contact_measure, equilibrium, portfolio_beta, sml_betas, sml_residuals, Economy};
use crate::error::{Error, Result};
use crate::extreme::{
    index_extreme_measure, mc_contribution_beta, reward_estimates, risk_contribution, DiscretePairs, ExtremeWeights,
};
use crate::frontier::{frontier, optimize, FrontierResult, SolverOptions, Strategy};
use crate::pricing::{
    empirical_price, nbc_price, nbc_sensitivity, risk_adjustment, ClaimSpec, Payoff, PayoffTable, PriceSource,
};
use crate::scenario::{
    bootstrap, load_returns, monte_carlo, weight_geometric, GaussianSampler, IngestOptions, MarketModel, ScenarioSet,
};
use crate::spectral::{dot, spectral_risk, Sample, WeightingMeasure};

const DEFAULT_MEASURE: &str = "tail:0.05";
const DEFAULT_GROUPS: usize = 20_000;
/// SML residual bound relative to `‖E_P ΔS‖∞`.
const SML_REL_TOL: f64 = 1e-5;

struct Ctx {
    cfg: RunConfig,
    file: FileConfig,
    measure_spec: String,
    gen_spec: String,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn list_opt(flag: &Option<String>, file: &Option<ListValue>, what: &str) -> Result<Option<Vec<f64>>> {
    match (flag, file) {
        (Some(s), _) => parse_list(s, what).map(Some),
        (None, Some(v)) => v.to_vec(what).map(Some),
        (None, None) => Ok(None),
    }
}

fn resolve(c: &CommonArgs) -> Result<Ctx> {
    let file = match &c.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let measure_spec = c
        .measure
        .clone()
        .or_else(|| file.measure.clone())
        .unwrap_or_else(|| DEFAULT_MEASURE.to_string());
    let gen_spec = c
        .gen
        .clone()
        .or_else(|| file.gen.clone())
        .unwrap_or_else(|| "hist".to_string());
    let data = c
        .data
        .clone()
        .or_else(|| file.data.clone())
        .ok_or_else(|| config_err("no return data: pass --data <csv>"))?;
    let cfg = RunConfig {
        measure: parse_measure(&measure_spec)?,
        data,
        index: c.index.clone().or_else(|| file.index.clone()),
        rf: c.rf.or(file.rf).unwrap_or(0.0),
        spot: list_opt(&c.spot, &file.spot, "spot")?.unwrap_or_default(),
        gen: parse_gen(&gen_spec)?,
        seed: c.seed.or(file.seed).unwrap_or(0),
        csv: c.csv || file.csv.unwrap_or(false),
        out: c.out.clone().or_else(|| file.out.clone()),
    };
    Ok(Ctx {
        cfg,
        file,
        measure_spec,
        gen_spec,
    })
}

fn scenarios(cfg: &RunConfig) -> Result<ScenarioSet> {
    let raw = load_returns(
        &cfg.data,
        &IngestOptions {
            index: cfg.index.clone(),
        },
    )?;
    let generated = match &cfg.gen {
        GenMethod::Hist => raw,
        GenMethod::WeightedHist { lambda } => weight_geometric(&raw, *lambda)?,
        GenMethod::Bootstrap { n, t_out, recency } => bootstrap(&raw, *n, *t_out, cfg.seed, *recency)?,
        GenMethod::MonteCarlo { t_out } => {
            let mut g = GaussianSampler::fit(&raw)?;
            monte_carlo(&mut g, raw.labels().to_vec(), t_out.unwrap_or(raw.nrows()), cfg.seed)?
        }
    };
    match (&cfg.index, generated.index()) {
        (Some(label), None) => generated.with_index(label),
        _ => Ok(generated),
    }
}

fn market(cfg: &RunConfig, s: ScenarioSet) -> Result<MarketModel> {
    let d = s.ncols();
    let spot = match cfg.spot.len() {
        0 => vec![1.0; d],
        1 => vec![cfg.spot[0]; d],
        _ => cfg.spot.clone(),
    };
    MarketModel::new(s, cfg.rf, spot)
}

fn solver_options(a: &SolveArgs, file: &FileConfig) -> SolverOptions {
    let mut o = SolverOptions::default();
    if let Some(t) = a.tol.or(file.tol) {
        o.tol = t;
    }
    if let Some(n) = a.max_iter.or(file.max_iter) {
        o.max_iter = n;
    }
    o
}

fn run_table(ctx: &Ctx, s: &ScenarioSet) -> Table {
    let mut t = Table::new("run", &["quantity", "value"]);
    t.kv("measure", ctx.measure_spec.as_str());
    t.kv("generation", ctx.gen_spec.as_str());
    t.kv("seed", ctx.cfg.seed.to_string());
    t.kv("scenarios", s.nrows());
    t.kv("assets", s.ncols());
    t.kv("index", s.index().map_or("none".to_string(), |i| s.labels()[i].clone()));
    t.kv("rf", ctx.cfg.rf);
    t
}

/// Runs the parsed command; returns the resolved options with the report.
pub fn execute(cli: &Cli) -> Result<(RunConfig, Report)> {
    let ctx = resolve(&cli.common)?;
    let s = scenarios(&ctx.cfg)?;
    let mut report = Report::default();
    report.push(run_table(&ctx, &s));
    match &cli.command {
        Command::Risk(a) => {
            let portfolio = list_opt(&a.portfolio, &ctx.file.portfolio, "portfolio")?;
            cmd_risk(&ctx, &s, portfolio, &mut report)?
        }
        Command::Contrib(a) => {
            let groups = a.groups.or(ctx.file.groups).unwrap_or(DEFAULT_GROUPS);
            cmd_contrib(&ctx, s, groups, &mut report)?
        }
        Command::Optimize(a) => {
            let levels = list_opt(&a.levels, &ctx.file.levels, "levels")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
            let m = market(&ctx.cfg, s)?;
            let res = optimize(&m, &ctx.cfg.measure, &solver_options(&a.solve, &ctx.file))?;
            optimum_tables(&m, &res, &mut report)?;
            let mut t = Table::new("frontier", &["risk", "reward"]);
            for (r, e) in frontier(&res, &levels)? {
                t.push(vec![r.into(), e.into()]);
            }
            report.push(t);
        }
        Command::Sml(a) => {
            let m = market(&ctx.cfg, s)?;
            let res = optimize(&m, &ctx.cfg.measure, &solver_options(a, &ctx.file))?;
            cmd_sml(&m, &res, &mut report)?
        }
        Command::Equilibrium(a) => {
            let path = a
                .economy
                .clone()
                .or_else(|| ctx.file.economy.clone())
                .ok_or_else(|| config_err("equilibrium needs --economy <csv>"))?;
            let e = Economy::from_csv(path)?;
            let m = market(&ctx.cfg, s)?;
            let holdings = match list_opt(&a.market, &ctx.file.market, "market")? {
                Some(h) => Strategy::new(h)?,
                None => optimize(&m, &ctx.cfg.measure, &solver_options(&a.solve, &ctx.file))?.h_star,
            };
            cmd_equilibrium(&e, &m, &ctx.cfg.measure, &holdings, &mut report)?
        }
        Command::Price(a) => {
            let spec = a
                .payoff
                .clone()
                .or_else(|| ctx.file.payoff.clone())
                .ok_or_else(|| config_err("price needs --payoff"))?;
            let payoff = parse_payoff(&spec)?;
            let underlier = a.underlier.clone().or_else(|| ctx.file.underlier.clone());
            let rstar = a.rstar.or(ctx.file.rstar);
            let groups = a.groups.or(ctx.file.groups).unwrap_or(DEFAULT_GROUPS);
            let opts = solver_options(&a.solve, &ctx.file);
            let m = market(&ctx.cfg, s)?;
            cmd_price(
                &ctx,
                &m,
                payoff,
                underlier.as_deref(),
                rstar,
                groups,
                &opts,
                &mut report,
            )?
        }
    }
    Ok((ctx.cfg, report))
}

fn cmd_risk(ctx: &Ctx, s: &ScenarioSet, portfolio: Option<Vec<f64>>, report: &mut Report) -> Result<()> {
    let mu = &ctx.cfg.measure;
    let w = s.weights().to_vec();
    let mut t = Table::new("risk", &["asset", "rho", "mean"]);
    for (i, label) in s.labels().iter().enumerate() {
        let sample = Sample::new(s.column(i), w.clone())?;
        t.push(vec![
            label.as_str().into(),
            spectral_risk(&sample, mu).into(),
            sample.mean().into(),
        ]);
    }
    if let Some(h) = portfolio {
        if h.len() != s.ncols() {
            return Err(Error::LengthMismatch {
                expected: s.ncols(),
                found: h.len(),
            });
        }
        let values: Vec<f64> = s
            .outcomes()
            .row_iter()
            .map(|r| dot(r.transpose().as_slice(), &h))
            .collect();
        let sample = Sample::new(values, w)?;
        t.push(vec![
            "portfolio".into(),
            spectral_risk(&sample, mu).into(),
            sample.mean().into(),
        ]);
    }
    report.push(t);
    Ok(())
}

fn cmd_contrib(ctx: &Ctx, s: ScenarioSet, groups: usize, report: &mut Report) -> Result<()> {
    let mu = &ctx.cfg.measure;
    let idx = s.index().ok_or(Error::MissingIndex)?;
    let w = s.weights().to_vec();
    let index_col = s.column(idx);
    let index_sample = Sample::new(index_col.clone(), w.clone())?;
    let os = mu.order_statistic_params();
    let labels = s.labels().to_vec();
    let cols: Vec<Vec<f64>> = (0..s.ncols()).map(|i| s.column(i)).collect();
    let m = market(&ctx.cfg, s)?;
    let rewards = reward_estimates(&m, mu)?;

    let mut t = Table::new(
        "contributions",
        &["asset", "rho_c", "mc_rho_c", "mc_std_err", "reward_eq_ds"],
    );
    for (i, label) in labels.iter().enumerate() {
        let exact = risk_contribution(&cols[i], &index_sample, mu)?;
        let (mc, se) = match os {
            Some((a, b)) => {
                let mut src = DiscretePairs::new(cols[i].clone(), index_col.clone(), &w)?;
                let est = mc_contribution_beta(&mut src, a, b, groups, ctx.cfg.seed)?;
                (Some(est.value), Some(est.std_err))
            }
            None => (None, None),
        };
        t.push(vec![
            label.as_str().into(),
            exact.into(),
            mc.into(),
            se.into(),
            rewards[i].into(),
        ]);
    }
    report.push(t);
    Ok(())
}

fn q_expectations(m: &MarketModel, q: &ExtremeWeights) -> Result<Vec<f64>> {
    m.pnl().column_iter().map(|c| q.expectation(c.as_slice())).collect()
}

fn sml_tolerance(m: &MarketModel) -> f64 {
    SML_REL_TOL * m.expected_pnl().amax()
}

fn optimum_tables(m: &MarketModel, res: &FrontierResult, report: &mut Report) -> Result<()> {
    let resid = sml_residuals(m, res)?;
    let max_resid = resid.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
    let mut t = Table::new("optimum", &["quantity", "value"]);
    t.kv("r_star", res.r_star);
    t.kv("risk_at_opt", res.risk_at_opt);
    t.kv("iterations", res.diagnostics.iterations);
    t.kv("relative_gap", res.diagnostics.gap);
    t.kv("max_sml_residual", max_resid);
    t.kv("sml_tolerance", sml_tolerance(m));
    report.push(t);

    let ep = m.expected_pnl();
    let eq = q_expectations(m, &res.certificate)?;
    let mut t = Table::new("strategy", &["asset", "h_star", "ep_ds", "eq_ds", "sml_residual"]);
    for (i, label) in m.scenarios().labels().iter().enumerate() {
        t.push(vec![
            label.as_str().into(),
            res.h_star.as_slice()[i].into(),
            ep[i].into(),
            eq[i].into(),
            resid[i].into(),
        ]);
    }
    report.push(t);
    Ok(())
}

fn cmd_sml(m: &MarketModel, res: &FrontierResult, report: &mut Report) -> Result<()> {
    let betas = sml_betas(m, res)?;
    let resid = sml_residuals(m, res)?;
    let mut ck = contact_measure(m.scenarios().weights(), &res.certificate, res.r_star)?;
    let tol = sml_tolerance(m);
    let worst = ck.check_risk_neutral(m, tol)?;
    let (a, b) = ck.mixture_weights();

    let mut t = Table::new("sml", &["quantity", "value"]);
    t.kv("r_star", res.r_star);
    t.kv("market_beta", portfolio_beta(m, res, &res.h_star)?);
    t.kv("mixture_p", a);
    t.kv("mixture_q", b);
    t.kv("worst_er_ds", worst);
    t.kv("tolerance", tol);
    report.push(t);

    let mut t = Table::new("betas", &["asset", "beta", "sml_residual", "er_ds"]);
    let pnl = m.pnl();
    for (i, label) in m.scenarios().labels().iter().enumerate() {
        let er = ck.expectation(pnl.column(i).as_slice())?;
        t.push(vec![label.as_str().into(), betas[i].into(), resid[i].into(), er.into()]);
    }
    report.push(t);
    Ok(())
}

fn cmd_equilibrium(
    e: &Economy,
    m: &MarketModel,
    mu: &WeightingMeasure,
    holdings: &Strategy,
    report: &mut Report,
) -> Result<()> {
    let eq = equilibrium(e, m, mu, holdings)?;
    let mut t = Table::new("equilibrium", &["quantity", "value"]);
    t.kv("r_star", eq.r_star);
    t.kv("market_value", eq.market_value);
    t.kv("market_risk", eq.risk_value);
    t.kv("tolerance_sum", e.tolerance_sum());
    report.push(t);

    let mut headers = vec!["agent".to_string(), "endowment".into(), "aversion".into()];
    headers.extend(m.scenarios().labels().iter().cloned());
    let mut t = Table::with_headers("allocations", headers);
    for (n, h) in agent_allocations(e, holdings).iter().enumerate() {
        let mut row: Vec<Cell> = vec![(n + 1).into(), e.endowments()[n].into(), e.aversions()[n].into()];
        row.extend(h.as_slice().iter().map(|&v| Cell::from(v)));
        t.push(row);
    }
    report.push(t);
    Ok(())
}

/// `call:<K>`, `put:<K>`, `const:<c>`, `linear` or `table:<csv>`.
pub(crate) fn parse_payoff(spec: &str) -> Result<Payoff> {
    let (kind, param) = match spec.split_once(':') {
        Some((k, p)) => (k.trim(), Some(p.trim())),
        None => (spec.trim(), None),
    };
    let value = |p: Option<&str>| -> Result<f64> {
        p.and_then(|v| v.parse().ok())
            .ok_or_else(|| config_err(format!("payoff '{spec}' needs a numeric parameter")))
    };
    match kind.to_ascii_lowercase().as_str() {
        "call" => Ok(Payoff::Call { strike: value(param)? }),
        "put" => Ok(Payoff::Put { strike: value(param)? }),
        "const" => Ok(Payoff::constant(value(param)?)),
        "linear" if param.is_none() => Ok(Payoff::linear()),
        "table" => {
            let path = param.ok_or_else(|| config_err("payoff table needs a path"))?;
            Ok(Payoff::Tabulated(PayoffTable::from_csv(Path::new(path))?))
        }
        _ => Err(config_err(format!("unknown payoff '{spec}'"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_price(
    ctx: &Ctx,
    m: &MarketModel,
    payoff: Payoff,
    underlier: Option<&str>,
    rstar: Option<f64>,
    groups: usize,
    opts: &SolverOptions,
    report: &mut Report,
) -> Result<()> {
    let mu = &ctx.cfg.measure;
    let s = m.scenarios();
    let u = match underlier {
        Some(label) => s
            .label_position(label)
            .ok_or_else(|| config_err(format!("unknown underlier '{label}'")))?,
        None => 0,
    };
    let claim = ClaimSpec::new(payoff, u, m.s0()[u])?;

    // Q from the index when designated, otherwise from the optimum.
    let mut solved: Option<FrontierResult> = None;
    let q = match s.index() {
        Some(_) => index_extreme_measure(m, mu)?,
        None if rstar == Some(0.0) => ExtremeWeights::new(s.weights().to_vec())?,
        None => solved.insert(optimize(m, mu, opts)?).certificate.clone(),
    };
    let r_star = match rstar {
        Some(r) => r,
        None => match &solved {
            Some(res) => res.r_star,
            None => optimize(m, mu, opts)?.r_star,
        },
    };
    let ck = contact_measure(s.weights(), &q, r_star)?;
    let price = nbc_price(&claim, &ck, s)?;
    let sens = nbc_sensitivity(&claim, &ck, s)?;
    let (exact, first) = risk_adjustment(&claim, &ck, s)?;

    let mut t = Table::new("price", &["quantity", "value"]);
    t.kv("underlier", s.labels()[u].as_str());
    t.kv("spot", claim.s0);
    t.kv("r_star", r_star);
    let q_source = match (s.index(), &solved) {
        (Some(_), _) => "index",
        (None, Some(_)) => "optimum",
        (None, None) => "unused",
    };
    t.kv("q_source", q_source);
    t.kv("nbc_price", price);
    t.kv("p_mean", price - exact);
    t.kv("sensitivity", sens.value);
    t.kv("kink_scenarios", sens.kinks);
    t.kv("risk_adjustment", exact);
    t.kv("first_order_adjustment", first);
    if let (Some(idx), Some(_)) = (s.index(), mu.order_statistic_params()) {
        let mut src = DiscretePairs::new(s.column(u), s.column(idx), s.weights())?;
        let est = empirical_price(
            &claim,
            mu,
            r_star,
            PriceSource::Draws {
                sampler: &mut src,
                groups,
            },
            ctx.cfg.seed,
        )?;
        t.kv("mc_price", est.value);
        t.kv("mc_std_err", est.std_err);
    }
    report.push(t);
    Ok(())
}
