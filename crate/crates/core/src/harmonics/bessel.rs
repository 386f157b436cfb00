//! Spherical Bessel functions of the first kind.

/// `j_l(t)` for `l = 0..=lmax`.
///
/// Upward recurrence is used when `lmax <= t` (where it is stable), Miller's
/// downward recurrence otherwise, and the power series for tiny arguments.
pub fn bessel_j_all(lmax: usize, t: f64) -> Vec<f64> {
    assert!(t >= 0.0 && t.is_finite(), "bessel_j needs a finite t >= 0");
    let mut out = vec![0.0; lmax + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if t < 1e-2 {
        for (l, o) in out.iter_mut().enumerate() {
            *o = series(l, t);
        }
        return out;
    }
    let (s, c) = t.sin_cos();
    let j0 = s / t;
    if (lmax as f64) <= t {
        out[0] = j0;
        if lmax >= 1 {
            out[1] = s / (t * t) - c / t;
        }
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / t * out[l] - out[l - 1];
        }
        return out;
    }
    let start = lmax.max(t as usize) + 20 + (t.sqrt() * 4.0) as usize;
    let mut next = 0.0_f64;
    let mut cur = 1e-300_f64;
    let mut buf = vec![0.0; lmax + 1];
    for l in (1..=start).rev() {
        // cur = j_l, next = j_{l+1}
        let prev = (2 * l + 1) as f64 / t * cur - next;
        next = cur;
        cur = prev;
        if l - 1 <= lmax {
            buf[l - 1] = cur;
        }
        if l <= lmax {
            buf[l] = next;
        }
        if cur.abs() > 1e250 {
            let scale = 1.0 / cur.abs();
            cur *= scale;
            next *= scale;
            for b in buf.iter_mut() {
                *b *= scale;
            }
        }
    }
    // Normalize against whichever of j0, j1 is better conditioned.
    let j1 = s / (t * t) - c / t;
    let factor = if j0.abs() >= j1.abs() || lmax == 0 { j0 / buf[0] } else { j1 / buf[1] };
    for (o, b) in out.iter_mut().zip(&buf) {
        *o = b * factor;
    }
    out
}

pub fn bessel_j(l: usize, t: f64) -> f64 {
    bessel_j_all(l, t)[l]
}

fn series(l: usize, t: f64) -> f64 {
    let mut df = 1.0;
    for k in 0..=l {
        df *= (2 * k + 1) as f64;
    }
    let lead = t.powi(l as i32) / df;
    let x = -0.5 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..20 {
        term *= x / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    lead * sum
}
