//! Gauss–Legendre rules on the reference interval `[0, 1]`.

/// `n`-point Gauss–Legendre nodes and weights on `[0, 1]` (exact for degree `2n − 1`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a quadrature rule needs at least one point");
    let mut pts = vec![0.0; n];
    let mut wts = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        // map from [-1, 1] to [0, 1]
        pts[n - 1 - i] = 0.5 * (x + 1.0);
        wts[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (pts, wts)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]` with `n` Gauss points on each of `cells` equal subintervals.
pub fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize, n: usize) -> f64 {
    let (p, w) = gauss_legendre(n);
    let h = (b - a) / cells as f64;
    let mut s = 0.0;
    for c in 0..cells {
        let x0 = a + c as f64 * h;
        for (pi, wi) in p.iter().zip(&w) {
            s += wi * h * f(x0 + pi * h);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_monomials() {
        for n in 1..=10 {
            let (p, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            for k in 0..2 * n {
                let q: f64 = p.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert_relative_eq!(q, 1.0 / (k as f64 + 1.0), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_inside() {
        let (p, _) = gauss_legendre(7);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert!(p[0] > 0.0 && p[6] < 1.0);
    }

    #[test]
    fn composite_integrates_sine() {
        let v = composite(|x| (std::f64::consts::PI * x).sin().powi(2), 0.0, 1.0, 8, 5);
        assert_relative_eq!(v, 0.5, epsilon = 1e-12);
    }
}
