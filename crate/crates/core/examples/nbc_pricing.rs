//! Contact-measure prices of calls on one asset, checked against the
//! empirical and Monte Carlo estimators.

use coherent_capm::{
    contact_measure, empirical_price, index_extreme_measure, load_returns, make_alpha, nbc_price, nbc_sensitivity,
    reward_estimates, risk_adjustment, ClaimSpec, DiscretePairs, IngestOptions, MarketModel, Payoff, PriceSource,
};

fn main() -> coherent_capm::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/demo_returns.csv");
    let s = load_returns(
        path,
        &IngestOptions {
            index: Some("index".into()),
        },
    )?;
    let m = MarketModel::new(s.clone(), 0.0001, vec![100.0; s.ncols()])?;
    let mu = make_alpha(3)?;
    let idx = s.index().expect("index designated");
    let tech = s.label_position("tech").expect("tech column");

    // R* from the index's own SML relation E_P dS = -R* E_Q dS
    let r_star = -m.expected_pnl()[idx] / reward_estimates(&m, &mu)?[idx];
    let q = index_extreme_measure(&m, &mu)?;
    let ck = contact_measure(s.weights(), &q, r_star)?;
    println!("R* = {r_star:.6}");

    let (x, y) = (s.column(tech), s.column(idx));
    for strike in [98.0, 100.0, 102.0] {
        let claim = ClaimSpec::new(Payoff::Call { strike }, tech, 100.0)?;
        let v = nbc_price(&claim, &ck, &s)?;
        let delta = nbc_sensitivity(&claim, &ck, &s)?;
        let (adj, first) = risk_adjustment(&claim, &ck, &s)?;
        let exact = empirical_price(
            &claim,
            &mu,
            r_star,
            PriceSource::Pairs {
                underlier: &x,
                index: &y,
                weights: s.weights(),
            },
            0,
        )?;
        let mut pairs = DiscretePairs::uniform(x.clone(), y.clone())?;
        let mc = empirical_price(
            &claim,
            &mu,
            r_star,
            PriceSource::Draws {
                sampler: &mut pairs,
                groups: 50_000,
            },
            3,
        )?;
        println!(
            "K={strike:>5}: V={v:.5} delta={:.4} adj={adj:+.5} (first order {first:+.5}) pairs={:.5} mc={:.5}±{:.5}",
            delta.value,
            exact.value,
            mc.value,
            mc.std_err.unwrap_or(0.0)
        );
    }
    Ok(())
}
