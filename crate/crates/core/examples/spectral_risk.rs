//! Spectral risk of a small P&L sample under several weighting measures.

use coherent_capm::{make_alpha, make_beta, make_tail, spectral_risk, Sample, WeightingMeasure};

fn main() -> coherent_capm::Result<()> {
    let pnl = Sample::uniform(vec![-4.0, -1.5, 0.5, 1.0, 2.0, 3.5, -0.5, 1.5])?;
    let measures = [
        ("tail 0.25", make_tail(0.25)?),
        ("tail 1 (minus mean)", make_tail(1.0)?),
        ("alpha 3", make_alpha(3)?),
        ("beta 5,2", make_beta(5, 2)?),
        ("0.1/0.5 mixture", WeightingMeasure::atomic([(0.1, 0.5), (0.5, 0.5)])?),
    ];
    println!("mean P&L {:.4}", pnl.mean());
    for (name, mu) in &measures {
        println!("{name:>20}: rho = {:.6}", spectral_risk(&pnl, mu));
    }

    // weighted scenarios: the worst outcome twice as likely
    let w = Sample::new(vec![-4.0, 1.0, 2.0], vec![0.5, 0.25, 0.25])?;
    println!("weighted tail 0.5: {:.6}", spectral_risk(&w, &make_tail(0.5)?));
    Ok(())
}
