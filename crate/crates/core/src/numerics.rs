//! Scalar search and quadrature helpers shared by the analysis modules.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximise `f` on `[lo, hi]` by golden-section search. Assumes `f` is
/// unimodal on the bracket; returns the best point seen.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        for cand in [(c, fc), (d, fd)] {
            if cand.1 > best.1 {
                best = cand;
            }
        }
    }
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Supremum of `f` over `[lo, hi]`: dense sampling at `n` points, then
/// golden-section refinement around every sampled local maximum.
pub fn sup_on_interval(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let n = n.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = (xs[0], ys[0]);
    for i in 0..n {
        if ys[i] > best.1 {
            best = (xs[i], ys[i]);
        }
    }
    for i in 1..n - 1 {
        if ys[i] >= ys[i - 1] && ys[i] >= ys[i + 1] {
            let cand = golden_max(&f, xs[i - 1], xs[i + 1], 1e-13 * (1.0 + xs[i].abs()));
            if cand.1 > best.1 {
                best = cand;
            }
        }
    }
    best
}

/// Root of `f` on a sign-changing bracket: bisection followed by
/// Illinois-safeguarded secant steps. Stops once `|f| < ftol` or after
/// `max_iter` evaluations. Returns `(x, f(x), iterations)`.
pub fn bracketed_root(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    ftol: f64,
    max_iter: usize,
) -> (f64, f64, usize) {
    debug_assert!(fa * fb <= 0.0);
    if fa.abs() < ftol || fa == 0.0 {
        return (a, fa, 0);
    }
    if fb.abs() < ftol || fb == 0.0 {
        return (b, fb, 0);
    }
    let bisections = max_iter.min(8);
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for it in 0..max_iter {
        let x = if it < bisections {
            0.5 * (a + b)
        } else {
            let s = (a * fb - b * fa) / (fb - fa);
            if s > a.min(b) && s < a.max(b) {
                s
            } else {
                0.5 * (a + b)
            }
        };
        let fx = f(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() < ftol || fx == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return (x, fx, it + 1);
        }
        if fx * fb < 0.0 {
            a = b;
            fa = fb;
            b = x;
            fb = fx;
            side = 0;
        } else {
            b = x;
            fb = fx;
            if it >= bisections {
                // Illinois: halve the stale endpoint's weight when it survives twice.
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
    }
    (best.0, best.1, max_iter)
}

/// Five-point Gauss-Legendre rule on [-1, 1].
pub const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

pub fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GAUSS5.iter().map(|&(x, w)| w * f(m + r * x)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-12);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!(fx, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sup_includes_endpoints_and_interior() {
        let (x, v) = sup_on_interval(|x: f64| (2.0 * x).abs(), -3.0, 3.0, 101);
        assert_eq!(v, 6.0);
        assert_eq!(x.abs(), 3.0);
        let (x, v) = sup_on_interval(|x: f64| (x * 7.0).sin(), 0.0, 1.0, 50);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x, std::f64::consts::FRAC_PI_2 / 7.0, epsilon = 1e-6);
    }

    #[test]
    fn bracketed_root_reaches_tolerance() {
        let f = |x: f64| x * x * x - 2.0;
        let (x, fx, _) = bracketed_root(f, 0.0, 2.0, f(0.0), f(2.0), 1e-14, 80);
        assert!(fx.abs() < 1e-14);
        assert_abs_diff_eq!(x, 2f64.cbrt(), epsilon = 1e-13);
    }

    #[test]
    fn gauss5_is_exact_for_degree_nine() {
        let v = gauss5(|x| x.powi(9) + x.powi(8), 0.0, 2.0);
        assert_abs_diff_eq!(v, 2f64.powi(10) / 10.0 + 2f64.powi(9) / 9.0, epsilon = 1e-11);
    }
}
