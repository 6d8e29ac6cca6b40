//! One-dimensional search primitives and log-domain arithmetic.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Result of a one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
}

/// Maximizes a unimodal function on `[lo, hi]` by golden-section search.
///
/// The endpoints are evaluated as well, so a maximum sitting on the boundary
/// of the interval is returned exactly.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    debug_assert!(lo <= hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a) > tol && iter < 300 {
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
        iter += 1;
    }
    let mut best = if fc >= fd {
        Maximum { arg: c, value: fc }
    } else {
        Maximum { arg: d, value: fd }
    };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.value {
            best = Maximum { arg: x, value: fx };
        }
    }
    best
}

/// Scans `steps + 1` equispaced points of `[lo, hi]`, then refines around the
/// best grid point with golden-section search.
///
/// Suited to smooth objectives that are unimodal but may be flat or peaked
/// near an endpoint.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
) -> Maximum {
    let h = (hi - lo) / steps as f64;
    let mut best = Maximum {
        arg: lo,
        value: f(lo),
    };
    let mut best_k = 0;
    for k in 1..=steps {
        let x = if k == steps { hi } else { lo + h * k as f64 };
        let fx = f(x);
        if fx > best.value {
            best = Maximum { arg: x, value: fx };
            best_k = k;
        }
    }
    let a = lo + h * best_k.saturating_sub(1) as f64;
    let b = (lo + h * (best_k + 1) as f64).min(hi);
    let refined = golden_max(&mut f, a, b, tol);
    if refined.value > best.value {
        refined
    } else {
        best
    }
}

/// Finds the sign change of a function that is positive at `lo` and
/// non-positive at `hi`. Returns the midpoint of the final bracket.
pub fn bisect_decreasing<F: FnMut(f64) -> f64>(mut g: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut iter = 0;
    while (b - a) > tol && iter < 200 {
        let m = 0.5 * (a + b);
        if g(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        iter += 1;
    }
    0.5 * (a + b)
}

/// log(e^a + e^b) without overflow; `-inf` operands are neutral.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log Σ e^{x_i}; returns `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}
