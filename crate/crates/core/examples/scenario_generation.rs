//! Historical, weighted-historical, bootstrapped and Monte Carlo scenario sets
//! built from the demo return file.

use coherent_capm::{
    bootstrap, load_returns, monte_carlo, weight_geometric, GaussianSampler, IngestOptions, ScenarioSet,
};

fn summary(name: &str, s: &ScenarioSet) {
    let mean = s.mean();
    let means: Vec<String> = s
        .labels()
        .iter()
        .zip(mean.iter())
        .map(|(l, m)| format!("{l}={m:+.5}"))
        .collect();
    println!("{name:<10} T={:<5} {}", s.nrows(), means.join(" "));
}

fn main() -> coherent_capm::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/demo_returns.csv");
    let hist = load_returns(
        path,
        &IngestOptions {
            index: Some("index".into()),
        },
    )?;
    summary("hist", &hist);
    summary("whist", &weight_geometric(&hist, 0.99)?);
    // weekly horizon: five daily rows compounded per scenario
    summary("boot 5", &bootstrap(&hist, 5, 2000, 42, None)?);
    let mut gauss = GaussianSampler::fit(&hist)?;
    summary("mc", &monte_carlo(&mut gauss, hist.labels().to_vec(), 5000, 42)?);
    Ok(())
}
