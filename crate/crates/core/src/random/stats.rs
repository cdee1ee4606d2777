//! Goodness-of-fit and resampling helpers for the Monte Carlo checks.

/// Asymptotic Kolmogorov tail `P(K > λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d),
    }
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_tail((en + 0.12 + 0.11 / en) * d),
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Delete-one-group jackknife for a smooth function of event frequencies.
///
/// `counts[g][e]` is how often event `e` happened among the `sizes[g]` paths of
/// group `g`. Returns `(f(p̂), standard error)`.
pub fn grouped_jackknife(
    counts: &[Vec<u64>],
    sizes: &[u64],
    f: impl Fn(&[f64]) -> f64,
) -> (f64, f64) {
    let events = counts.first().map_or(0, Vec::len);
    let total: u64 = sizes.iter().sum();
    let sums: Vec<u64> = (0..events).map(|e| counts.iter().map(|c| c[e]).sum()).collect();
    let freq = |drop: Option<usize>| -> Vec<f64> {
        let denom = total - drop.map_or(0, |g| sizes[g]);
        (0..events)
            .map(|e| (sums[e] - drop.map_or(0, |g| counts[g][e])) as f64 / denom as f64)
            .collect()
    };
    let full = f(&freq(None));
    let groups: Vec<usize> = (0..counts.len()).filter(|&g| sizes[g] > 0).collect();
    if groups.len() < 2 {
        return (full, 0.0);
    }
    let loo: Vec<f64> = groups.iter().map(|&g| f(&freq(Some(g)))).collect();
    let k = loo.len() as f64;
    let mean = loo.iter().sum::<f64>() / k;
    let var = (k - 1.0) / k * loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    (full, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kolmogorov_tail_reference_values() {
        // Critical values of the limiting distribution.
        assert!((kolmogorov_tail(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_tail(1.6276) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_tail(0.0), 1.0);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shifted() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random()).collect();
        assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).p_value > 0.01);
        let shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        assert!(ks_one_sample(&shifted, |x| x.clamp(0.0, 1.0)).p_value < 0.01);
        let ys: Vec<f64> = (0..5000).map(|_| rng.random()).collect();
        assert!(ks_two_sample(&xs, &ys).p_value > 0.01);
        assert!(ks_two_sample(&shifted, &ys).p_value < 0.01);
    }

    #[test]
    fn jackknife_of_a_mean_is_the_binomial_se() {
        let counts: Vec<Vec<u64>> = (0..50).map(|g| vec![(g % 5) as u64 * 2]).collect();
        let sizes = vec![20u64; 50];
        let (p, se) = grouped_jackknife(&counts, &sizes, |q| q[0]);
        assert!((p - 0.2).abs() < 1e-12);
        assert!(se > 0.0 && se < 0.05);
        let (_, zero) = grouped_jackknife(&[vec![3], vec![3]], &[3, 3], |q| q[0]);
        assert_eq!(zero, 0.0);
    }
}
