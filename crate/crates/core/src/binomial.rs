//! Binomial tail probabilities, summed term by term in log space.

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `P[X = k]` for `k = 0..=n`, `X ~ Bin(n, p)`.
pub fn pmf_table(n: usize, p: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    if p == 0.0 || p == 1.0 {
        let mut out = vec![0.0; n + 1];
        out[if p == 0.0 { 0 } else { n }] = 1.0;
        return out;
    }
    let lf = ln_factorials(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (0..=n)
        .map(|k| (lf[n] - lf[k] - lf[n - k] + k as f64 * lp + (n - k) as f64 * lq).exp())
        .collect()
}

/// `P[X >= t]`.
pub fn tail_at_least(n: usize, p: f64, t: usize) -> f64 {
    if t == 0 {
        return 1.0;
    }
    if t > n {
        return 0.0;
    }
    pmf_table(n, p)[t..].iter().sum::<f64>().min(1.0)
}

/// `P[X <= t]`.
pub fn tail_at_most(n: usize, p: f64, t: usize) -> f64 {
    if t >= n {
        return 1.0;
    }
    pmf_table(n, p)[..=t].iter().sum::<f64>().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Brute force over all `2^n` outcome strings.
    fn brute_at_least(n: usize, p: f64, t: usize) -> f64 {
        (0u32..1 << n)
            .filter(|s| s.count_ones() as usize >= t)
            .map(|s| {
                let k = s.count_ones() as i32;
                p.powi(k) * (1.0 - p).powi(n as i32 - k)
            })
            .sum()
    }

    #[test]
    fn tails_match_enumeration() {
        for n in 1..=12 {
            for &p in &[0.0, 0.1, 0.5, 0.73, 1.0] {
                for t in 0..=n + 1 {
                    assert_abs_diff_eq!(tail_at_least(n, p, t), brute_at_least(n, p, t), epsilon = 1e-12);
                    if t <= n {
                        let complement = 1.0 - brute_at_least(n, p, t + 1);
                        assert_abs_diff_eq!(tail_at_most(n, p, t), complement, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn fair_coin_nine_flips() {
        assert_abs_diff_eq!(tail_at_least(9, 0.5, 7), 46.0 / 512.0, epsilon = 1e-15);
    }

    #[test]
    fn pmf_sums_to_one_for_large_n() {
        let total: f64 = pmf_table(5000, 0.37).iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }
}
