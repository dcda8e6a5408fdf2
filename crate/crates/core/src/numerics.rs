//! Small one-dimensional search helpers shared by the oracle modules.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`; the endpoints are considered as well.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
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
    }
    let mid = 0.5 * (a + b);
    [(lo, f(lo)), (hi, f(hi)), (mid, f(mid))]
        .into_iter()
        .fold((c, fc), |best, cand| if cand.1 > best.1 { cand } else { best })
}

pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), lo, hi, tol);
    (x, -v)
}

/// Bisection for a sign change of `g` on `[lo, hi]`; assumes `g(lo)·g(hi) ≤ 0`.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn golden_prefers_endpoint_for_monotone() {
        let (x, v) = golden_min(|x| x, 0.2, 0.9, 1e-10);
        assert_eq!(x, 0.2);
        assert_eq!(v, 0.2);
    }

    #[test]
    fn bisect_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
