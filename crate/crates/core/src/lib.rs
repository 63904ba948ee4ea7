pub mod capm;
pub mod error;
pub mod extreme;
pub mod frontier;
pub mod pricing;
pub mod scenario;
pub mod special;
pub mod spectral;
pub mod workbench;

pub use capm::{
    agent_allocations, beta_of_returns, contact_kernel, contact_measure, equilibrium, equilibrium_rstar,
    portfolio_beta, sml_betas, sml_residuals, ContactKernel, Economy, Equilibrium,
};
pub use error::{Error, Result, SamplerError};
pub use extreme::{
    extreme_measure, index_extreme_measure, mc_contribution_alpha, mc_contribution_beta, order_statistic_mean,
    reward_estimate, reward_estimates, risk_contribution, DiscretePairs, ExtremeWeights, McEstimate, PairSampler,
};
pub use frontier::{frontier, optimize, support_probe, FrontierResult, SolverDiagnostics, SolverOptions, Strategy};
pub use pricing::{
    empirical_price, nbc_price, nbc_sensitivity, risk_adjustment, ClaimSpec, Payoff, PayoffTable, PriceEstimate,
    PriceSource, Sensitivity,
};
pub use scenario::{
    bootstrap, load_returns, monte_carlo, parse_returns, pnl_from_returns, weight_geometric, GaussianSampler,
    IngestOptions, MarketModel, ReturnSampler, ScenarioSet, Units,
};
pub use spectral::{make_alpha, make_beta, make_tail, spectral_risk, MeasureKind, Sample, WeightingMeasure};
