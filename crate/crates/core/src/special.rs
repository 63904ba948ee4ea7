//! Incomplete beta function and one-dimensional quadrature used by the
//! Beta-family weighting measures.

/// Largest `a + b - 1` for which the binomial tail sum is used instead of
/// the continued fraction.
const BINOMIAL_LIMIT: u32 = 200;

const MAX_DEPTH: u32 = 40;

fn as_positive_int(v: f64) -> Option<u32> {
    if v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
        Some(v as u32)
    } else {
        None
    }
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`.
///
/// Integer parameters go through the binomial identity
/// `I_x(a, b) = P[Bin(a + b - 1, x) >= a]`, which is exact up to rounding.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    match (as_positive_int(a), as_positive_int(b)) {
        (Some(ia), Some(ib)) if ia + ib - 1 <= BINOMIAL_LIMIT => binomial_upper_tail(ia + ib - 1, ia, x),
        _ => statrs::function::beta::beta_reg(a, b, x),
    }
}

/// `P[Bin(n, x) >= k]`, summing whichever tail is shorter.
fn binomial_upper_tail(n: u32, k: u32, x: f64) -> f64 {
    let pmf = |j: u32| -> f64 {
        let ln_c = statrs::function::factorial::ln_binomial(u64::from(n), u64::from(j));
        (ln_c + f64::from(j) * x.ln() + f64::from(n - j) * (-x).ln_1p()).exp()
    };
    if k > n {
        return 0.0;
    }
    if k == 0 {
        return 1.0;
    }
    // Summing from the far end keeps small terms first.
    if (n - k) < k {
        (k..=n).rev().map(pmf).sum::<f64>().min(1.0)
    } else {
        (1.0 - (0..k).rev().map(pmf).sum::<f64>()).clamp(0.0, 1.0)
    }
}

/// Natural log of the beta function.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    statrs::function::beta::ln_beta(a, b)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol.max(1e-15 * (left + right).abs()) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integer_path_matches_continued_fraction() {
        for &(a, b) in &[(1.0, 1.0), (2.0, 1.0), (3.0, 7.0), (4.0, 6.0), (11.0, 7.0)] {
            for i in 1..20 {
                let x = i as f64 / 20.0;
                let exact = beta_reg(a, b, x);
                let cf = statrs::function::beta::beta_reg(a, b, x);
                assert_abs_diff_eq!(exact, cf, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn uniform_case_is_identity() {
        assert_abs_diff_eq!(beta_reg(1.0, 1.0, 0.37), 0.37, epsilon = 1e-15);
    }

    #[test]
    fn simpson_integrates_polynomial_and_exponential() {
        let v = adaptive_simpson(&|x: f64| x * x, 0.0, 3.0, 1e-12);
        assert_abs_diff_eq!(v, 9.0, epsilon = 1e-11);
        let e = adaptive_simpson(&|x: f64| x.exp(), -5.0, 0.0, 1e-13);
        assert_abs_diff_eq!(e, 1.0 - (-5.0f64).exp(), epsilon = 1e-11);
    }
}
