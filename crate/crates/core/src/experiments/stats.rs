//! Small descriptive statistics.

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two
/// values.
pub fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Standard error of the mean.
pub fn stderr(v: &[f64]) -> f64 {
    sample_sd(v) / (v.len() as f64).sqrt()
}

/// `sqrt(se_a^2 + se_b^2)`.
pub fn pooled_stderr(se_a: f64, se_b: f64) -> f64 {
    se_a.hypot(se_b)
}

/// Adjusted Fisher-Pearson sample skewness `G1`. Zero for constant data or
/// fewer than three values.
pub fn skewness(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 3 {
        return 0.0;
    }
    let m = mean(v);
    let m2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        return 0.0;
    }
    let g1 = m3 / m2.powf(1.5);
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v), 2.5);
        assert!((sample_sd(&v) - 1.2909944487358056).abs() < 1e-15);
        assert!((stderr(&v) - 0.6454972243679028).abs() < 1e-15);
        assert_eq!(pooled_stderr(3.0, 4.0), 5.0);
    }

    #[test]
    fn skewness_matches_reference() {
        // scipy.stats.skew([1, 2, 3, 10], bias=False)
        let s = skewness(&[1.0, 2.0, 3.0, 10.0]);
        assert!((s - 1.763632614803888).abs() < 1e-12, "{s}");
        assert_eq!(skewness(&[2.0, 2.0, 2.0]), 0.0);
        assert_eq!(skewness(&[1.0, 2.0, 3.0]), 0.0);
    }
}
