//! Optimal strategy and efficient frontier for Gaussian scenarios, compared
//! with the mean-variance direction `C⁻¹m`.

use coherent_capm::{frontier, make_tail, monte_carlo, optimize, GaussianSampler, MarketModel, SolverOptions};
use nalgebra::{DMatrix, DVector};

fn main() -> coherent_capm::Result<()> {
    let mean = DVector::from_vec(vec![0.04, 0.06, 0.03, 0.08]);
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.04, 0.01, 0.00, 0.02, //
            0.01, 0.09, 0.01, 0.03, //
            0.00, 0.01, 0.02, 0.00, //
            0.02, 0.03, 0.00, 0.16,
        ],
    );
    let mut g = GaussianSampler::new(mean.clone(), cov.clone())?;
    let labels = ["a", "b", "c", "d"].map(String::from).to_vec();
    let s = monte_carlo(&mut g, labels, 20_000, 1)?;
    let m = MarketModel::new(s, 0.0, vec![1.0; 4])?;

    let res = optimize(&m, &make_tail(0.05)?, &SolverOptions::default())?;
    println!(
        "R* = {:.6} after {} evaluations, gap {:.1e}",
        res.r_star, res.diagnostics.iterations, res.diagnostics.gap
    );

    let h = DVector::from_column_slice(res.h_star.as_slice());
    let mv = cov.lu().solve(&m.expected_pnl()).expect("covariance is invertible");
    println!("h*      {:?}", h.as_slice());
    println!("cosine with C^-1 m: {:.5}", h.dot(&mv) / (h.norm() * mv.norm()));
    for (risk, reward) in frontier(&res, &[0.5, 1.0, 2.0])? {
        println!("risk {risk:.2} -> reward {reward:.6}");
    }
    Ok(())
}
