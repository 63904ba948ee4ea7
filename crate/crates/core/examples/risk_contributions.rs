//! Risk contributions of each asset against the index, exact and by
//! order-statistic Monte Carlo, plus the extreme-measure reward estimates.

use coherent_capm::{
    load_returns, make_beta, mc_contribution_beta, reward_estimates, risk_contribution, spectral_risk, DiscretePairs,
    IngestOptions, MarketModel, Sample,
};

fn main() -> coherent_capm::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/demo_returns.csv");
    let s = load_returns(
        path,
        &IngestOptions {
            index: Some("index".into()),
        },
    )?;
    let mu = make_beta(5, 2)?;
    let idx = s.index().expect("index designated");
    let index = Sample::new(s.column(idx), s.weights().to_vec())?;
    println!("index risk {:.6}", spectral_risk(&index, &mu));

    let labels = s.labels().to_vec();
    let m = MarketModel::new(s.clone(), 0.0001, vec![100.0; s.ncols()])?;
    let rewards = reward_estimates(&m, &mu)?;
    println!(
        "{:<8} {:>12} {:>12} {:>10} {:>12}",
        "asset", "exact", "mc", "std err", "E_Q dS"
    );
    for (i, label) in labels.iter().enumerate() {
        let x = s.column(i);
        let exact = risk_contribution(&x, &index, &mu)?;
        let mut pairs = DiscretePairs::uniform(x, s.column(idx))?;
        let mc = mc_contribution_beta(&mut pairs, 5, 2, 50_000, 7)?;
        println!(
            "{label:<8} {exact:>12.6} {:>12.6} {:>10.2e} {:>12.6}",
            mc.value, mc.std_err, rewards[i]
        );
    }
    Ok(())
}
