//! Gauss-Legendre quadrature over piecewise-smooth integrands.
//!
//! Cutoff chains and reparametrised gluings are smooth between knots but not
//! across them; every integral here is taken per segment, never across a
//! knot, with adaptive bisection inside each segment.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fixed-order Gauss-Legendre on `[a, b]`.
pub fn integrate_gl(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive Gauss-Legendre on one smooth segment: bisect until the two-half
/// refinement agrees with the whole-segment value.
pub fn integrate_adaptive(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> f64 {
    fn go(
        f: &mut dyn FnMut(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = integrate_gl(f, a, m, 8);
        let right = integrate_gl(f, m, b, 8);
        if depth == 0 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        go(f, a, m, left, tol * 0.5, depth - 1) + go(f, m, b, right, tol * 0.5, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let whole = integrate_gl(f, a, b, 8);
    go(f, a, b, whole, tol, max_depth)
}

/// Integral of `f` over `[t0, t1]` split at the given knots; each piece is
/// integrated adaptively and never across a knot.
pub fn integrate_piecewise(
    f: &mut dyn FnMut(f64) -> f64,
    t0: f64,
    t1: f64,
    knots: &[f64],
    tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = vec![t0];
    for &k in knots {
        if k > t0 && k < t1 {
            cuts.push(k);
        }
    }
    cuts.push(t1);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        acc += integrate_adaptive(f, w[0], w[1], tol, 24);
    }
    acc
}
