//! Special functions used by the hyperparameter updates and the oracles.

/// Digamma function for `x > 0`.
///
/// Shifts the argument above 10 with the recurrence `ψ(x) = ψ(x+1) − 1/x` and
/// then uses the asymptotic expansion.
pub fn digamma(mut x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_2k / (2k x^2k), k = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 * inv - series
}

/// `ψ(x + n) − ψ(x)` for a nonnegative integer `n`.
///
/// Small counts use the exact telescoping sum, larger ones fall back to two
/// digamma evaluations.
pub fn digamma_diff(x: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 16 {
        (0..n).map(|j| 1.0 / (x + j as f64)).sum()
    } else {
        digamma(x + n as f64) - digamma(x)
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}
