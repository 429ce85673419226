use statrs::function::gamma::gamma;

/// `e^z Γ(a, z)` for `a > 0`, `z >= 0`: the upper incomplete gamma function
/// scaled so that it stays representable for large `z`.
pub fn scaled_upper_gamma(a: f64, z: f64) -> f64 {
    debug_assert!(a > 0.0 && z >= 0.0);
    if z < a + 1.0 {
        // series for the lower function: γ(a,z) = e^{-z} z^a Σ z^n / (a(a+1)…(a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= z / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        z.exp() * gamma(a) - (a * z.ln()).exp() * sum
    } else {
        // continued fraction, modified Lentz
        const TINY: f64 = 1e-300;
        let mut b = z + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (a * z.ln()).exp() * h
    }
}

/// `ln Σ exp(terms)` without overflow.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma_ur;

    #[test]
    fn matches_regularized_gamma_where_representable() {
        for &a in &[0.5, 1.0, 1.5, 3.0] {
            for &z in &[0.1f64, 0.9, 1.4, 2.0, 5.0, 20.0, 60.0] {
                let expected = z.exp() * gamma(a) * gamma_ur(a, z);
                let got = scaled_upper_gamma(a, z);
                assert!(
                    ((got - expected) / expected).abs() < 1e-10,
                    "a={a} z={z} got={got} expected={expected}"
                );
            }
            assert!((scaled_upper_gamma(a, 0.0) - gamma(a)).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_case_is_one() {
        // Γ(1, z) = e^{-z}
        for &z in &[0.0, 0.5, 3.0, 100.0, 5000.0] {
            assert!((scaled_upper_gamma(1.0, z) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        // e^z Γ(a,z) ~ z^{a-1} (1 + (a-1)/z)
        let z: f64 = 2000.0;
        let got = scaled_upper_gamma(0.5, z);
        let approx = z.powf(-0.5) * (1.0 - 0.5 / z + 0.75 / (z * z));
        assert!(((got - approx) / approx).abs() < 1e-9);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
