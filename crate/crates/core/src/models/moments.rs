//! Sample moment summaries.

/// `(mean, variance, skewness, kurtosis)`.
///
/// Variance uses the `n - 1` denominator; skewness is `m3 / m2^1.5` and
/// kurtosis `m4 / m2^2` with biased central moments `m_k`. A sample with
/// zero spread reports skewness and kurtosis as 0.
pub fn four_moments(x: &[f64]) -> [f64; 4] {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let c = v - mean;
        let c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    let var = if x.len() > 1 { m2 / (n - 1.0) } else { 0.0 };
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 > 0.0 {
        [mean, var, m3 / m2.powf(1.5), m4 / (m2 * m2)]
    } else {
        [mean, var, 0.0, 0.0]
    }
}
