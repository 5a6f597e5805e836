//! Bracketing root finder for monotone scalar problems.

use crate::error::{DqdError, Result};

pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Brent's method on [lo, hi]. Requires f(lo) and f(hi) of opposite sign (or
/// one of them zero). Stops once the bracket is narrower than `x_tol` or
/// |f| ≤ `f_tol`.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa.abs() <= f_tol || fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb.abs() <= f_tol || fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(DqdError::invalid("bracket", lo, "f has the same sign at both ends"));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= f_tol {
            return Ok(Root { x: b, fx: fb, iterations: iter });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(DqdError::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: fb.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cubic() {
        let r = brent(|x| Ok(x * x * x - 2.0), 0.0, 3.0, 1e-15, 0.0).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-14);
        assert!(r.iterations < 60);
    }

    #[test]
    fn endpoint_root() {
        let r = brent(|x| Ok(x - 1.0), 1.0, 2.0, 1e-12, 0.0).unwrap();
        assert_eq!(r.x, 1.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn unbracketed_rejected() {
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn errors_propagate() {
        let e = brent(|_| Err(DqdError::InfiniteQuality), 0.0, 1.0, 1e-12, 0.0);
        assert_eq!(e.unwrap_err(), DqdError::InfiniteQuality);
    }

    #[test]
    fn flat_tail_converges() {
        let r = brent(|x| Ok((x - 0.3).powi(3) * 1e-6), -1.0, 1.0, 1e-13, 0.0).unwrap();
        assert!((r.x - 0.3).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn monotone_exponentials(shift in -5.0f64..5.0, rate in 0.1f64..10.0) {
            let f = |x: f64| Ok((rate * (x - shift)).exp() - 1.0);
            let r = brent(f, -10.0, 10.0, 1e-14, 0.0).unwrap();
            prop_assert!((r.x - shift).abs() < 1e-12);
        }
    }
}
