//! Statistical helpers for the Monte Carlo cross-checks: regularized
//! incomplete gamma, chi-square survival function, and Gauss-Laguerre nodes.

use alloc::vec::Vec;

#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7, n = 9.
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = core::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * core::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma function P(a, x).
pub fn reg_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
pub fn reg_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    // Lentz's continued fraction for Q(a, x).
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Survival function of the chi-square distribution with `dof` degrees of
/// freedom: P(X > x).
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    reg_gamma_q(dof as f64 / 2.0, x / 2.0)
}

/// Nodes and weights of the n-point Gauss-Laguerre rule for
/// `int_0^inf f(x) e^{-x} dx ~= sum w_i f(x_i)`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z = 0.0f64;
    for i in 0..n {
        // Stroud-Secrest initial guesses, then Newton on L_n.
        z = if i == 0 {
            3.0 / (1.0 + 2.4 * n as f64)
        } else if i == 1 {
            z + 15.0 / (1.0 + 2.5 * n as f64)
        } else {
            let ai = i as f64 - 1.0;
            z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // Recurrence for Laguerre polynomials L_k(z).
            let mut p1 = 1.0f64;
            let mut p2 = 0.0f64;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0 - z) * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (p1 - p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes.push(z);
        // w_i = -1 / (n * L_{n-1}(x_i) * L_n'(x_i)); with the recurrence
        // values this reduces to the usual closed form.
        let mut p1 = 1.0f64;
        let mut p2 = 0.0f64;
        for j in 0..n {
            let p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j as f64 + 1.0 - z) * p2 - j as f64 * p3) / (j as f64 + 1.0);
        }
        let _ = p1;
        weights.push(-1.0 / (pp * n as f64 * p2));
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        for k in 1..10u32 {
            let mut fact = 1.0f64;
            for j in 2..=k {
                fact *= j as f64;
            }
            assert!((ln_gamma(k as f64 + 1.0) - fact.ln()).abs() < 1e-12);
        }
        assert!((ln_gamma(0.5) - core::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn chi_square_known_values() {
        // Chi-square with 2 dof is Exp(1/2): sf(x) = exp(-x/2).
        for &x in &[0.5, 1.0, 3.0, 10.0] {
            assert!((chi_square_sf(x, 2) - (-x / 2.0f64).exp()).abs() < 1e-12);
        }
        // 1% critical value for 5 dof is about 15.086.
        assert!((chi_square_sf(15.086, 5) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn gamma_p_q_complementary() {
        for &a in &[0.5, 1.0, 2.5, 7.0] {
            for &x in &[0.1, 1.0, 4.0, 20.0] {
                let p = reg_gamma_p(a, x);
                let q = reg_gamma_q(a, x);
                assert!((p + q - 1.0).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn gauss_laguerre_integrates_polynomials() {
        let (x, w) = gauss_laguerre(8);
        // int x^k e^{-x} = k!; an 8-point rule is exact through degree 15.
        let mut fact = 1.0f64;
        for k in 0..12u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let approx: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xi, &wi)| wi * xi.powi(k as i32))
                .sum();
            assert!(
                (approx - fact).abs() < 1e-9 * fact.max(1.0),
                "k={k} approx={approx} exact={fact}"
            );
        }
    }
}
