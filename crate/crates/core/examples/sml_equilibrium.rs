//! Security market line at the optimum, the contact measure, and the
//! equilibrium reward/risk ratio for a small economy.

use coherent_capm::{
    agent_allocations, contact_kernel, equilibrium, load_returns, make_beta, optimize, sml_betas, sml_residuals,
    Economy, IngestOptions, MarketModel, SolverOptions,
};

fn main() -> coherent_capm::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/demo_returns.csv");
    let s = load_returns(path, &IngestOptions::default())?;
    let labels = s.labels().to_vec();
    let m = MarketModel::new(s, 0.0001, vec![100.0; labels.len()])?;
    let mu = make_beta(10, 3)?;

    let res = optimize(&m, &mu, &SolverOptions::default())?;
    let betas = sml_betas(&m, &res)?;
    let resid = sml_residuals(&m, &res)?;
    println!("R* = {:.6}", res.r_star);
    for ((l, b), r) in labels.iter().zip(&betas).zip(&resid) {
        println!("{l:<8} beta {b:>9.5}  residual {r:>10.2e}");
    }

    let tol = 1e-5 * m.expected_pnl().amax();
    let ck = contact_kernel(&m, &res, tol)?;
    println!(
        "contact measure: weights {:?}, worst |E_R dS| {:.2e}",
        ck.mixture_weights(),
        ck.worst_violation().unwrap_or(0.0)
    );

    let economy = Economy::new(vec![50.0, 20.0, 80.0], vec![2.0, 1.0, 4.0])?;
    let eq = equilibrium(&economy, &m, &mu, &res.h_star)?;
    println!("equilibrium R* = {:.6}", eq.r_star);
    for (n, h) in agent_allocations(&economy, &res.h_star).iter().enumerate() {
        println!("agent {}: {:?}", n + 1, h.as_slice());
    }
    Ok(())
}
