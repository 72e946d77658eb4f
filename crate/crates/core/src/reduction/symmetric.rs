/// Elementary symmetric functions `σ_1..σ_m` from power sums `S_1..S_m` by
/// Newton's identities: `k σ_k = Σ_{i=1}^k (-1)^{i-1} σ_{k-i} S_i`.
pub fn elementary_from_traces(power_sums: &[f64]) -> Vec<f64> {
    let m = power_sums.len();
    let mut sigma = vec![1.0];
    for k in 1..=m {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * sigma[k - i] * power_sums[i - 1];
        }
        sigma.push(acc / k as f64);
    }
    sigma.split_off(1)
}

/// `σ_1..σ_m` of the given roots, by expanding `Π (1 + λ_i t)`.
pub fn elementary_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        coeffs.push(0.0);
        for k in (1..coeffs.len()).rev() {
            coeffs[k] += r * coeffs[k - 1];
        }
    }
    coeffs.split_off(1)
}

pub fn power_sums(roots: &[f64], count: usize) -> Vec<f64> {
    (1..=count).map(|k| roots.iter().map(|r| r.powi(k as i32)).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_examples() {
        assert_eq!(elementary_from_traces(&[0.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(elementary_from_traces(&[6.0, 14.0, 36.0]), vec![6.0, 11.0, 6.0]);
        assert_eq!(elementary_from_roots(&[1.0, 2.0, 3.0]), vec![6.0, 11.0, 6.0]);
        assert_eq!(power_sums(&[1.0, 2.0, 3.0], 3), vec![6.0, 14.0, 36.0]);
    }

    #[test]
    fn five_roots() {
        let roots = [0.5, -1.25, 2.0, 3.5, -0.75];
        let from_traces = elementary_from_traces(&power_sums(&roots, 5));
        let direct = elementary_from_roots(&roots);
        for (a, b) in from_traces.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }
}
