//! Bessel functions of the first kind and integer order.
//!
//! All orders `J_0(x) ..= J_n(x)` are produced together by Miller's backward
//! recurrence, normalized with `J_0 + 2 Σ_k J_2k = 1`. The downward direction
//! is the stable one for every order, including `n > |x|` where upward
//! recurrence loses all digits.

const RESCALE_ABOVE: f64 = 1e200;

/// `[J_0(x), J_1(x), ..., J_n_max(x)]`.
pub fn bessel_j_orders(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if !x.is_finite() {
        out.fill(f64::NAN);
        return out;
    }

    let ax = x.abs();
    let reach = (n_max as f64).max(ax);
    let mut start = (reach + 30.0 + (40.0 * reach).sqrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let two_over_x = 2.0 / ax;
    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k, unnormalized
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        // `current` now holds J_{k-1}.
        let order = k - 1;
        if order <= n_max {
            out[order] = current;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            current /= RESCALE_ABOVE;
            above /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            for v in out.iter_mut().skip(order) {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    norm += current;

    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_orders(n, x)[n]
}
