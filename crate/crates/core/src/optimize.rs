//! Small 1-D search helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `n` points spaced evenly in `ln x` between `lo` and `hi` inclusive.
pub(crate) fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`, stopping
/// once the bracket is narrower than `tol`. Returns `(x, f(x), bracket)`.
pub(crate) fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64, (f64, f64))
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1, (lo, hi))
    } else {
        (x2, f2, (lo, hi))
    }
}

/// Bisection for a sign change of `g` on `[lo, hi]`. The caller guarantees
/// `g(lo)` and `g(hi)` differ in sign. Returns `(root, iterations, bracket)`.
pub(crate) fn bisect<G>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> (f64, usize, (f64, f64))
where
    G: Fn(f64) -> f64,
{
    let lo_positive = g(lo) > 0.0;
    let mut iterations = 0;
    while hi - lo > tol && iterations < 400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if (g(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), iterations, (lo, hi))
}
