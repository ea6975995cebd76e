//! Tanh-sinh (double exponential) quadrature on a finite interval.
//!
//! Nodes carry their exact distances to both endpoints so that integrands
//! with `|x - endpoint|^{±1/2}` factors can be evaluated without
//! cancellation right next to the ends.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// A quadrature node on `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    /// `x - lo`, computed without cancellation.
    pub from_lo: f64,
    /// `hi - x`, computed without cancellation.
    pub from_hi: f64,
}

/// Convergence controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Stop once successive levels agree to `tol · max(1, |S|)`.
    pub tol: f64,
    /// Largest acceptable level difference after `max_level`.
    pub fail_tol: f64,
    pub min_level: u32,
    pub max_level: u32,
    /// Half-width of the truncated `t` range.
    pub t_max: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: 1e-11, fail_tol: 1e-9, min_level: 3, max_level: 12, t_max: 6.0 }
    }
}

/// `(node, weight)` for parameter `t`, or `None` when the node collapses
/// onto an endpoint in floating point.
fn node_at(t: f64, lo: f64, hi: f64) -> Option<(Node, f64)> {
    let half = 0.5 * (hi - lo);
    let v = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * v.abs()).exp();
    // 1 - |tanh v| and 1 + |tanh v|.
    let near = 2.0 * e / (1.0 + e);
    let far = 2.0 / (1.0 + e);
    let w = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e)) * half;
    let (from_lo, from_hi) = if v >= 0.0 {
        (half * far, half * near)
    } else {
        (half * near, half * far)
    };
    if from_lo <= 0.0 || from_hi <= 0.0 || w == 0.0 {
        return None;
    }
    let x = if v >= 0.0 { hi - from_hi } else { lo + from_lo };
    Some((Node { x, from_lo, from_hi }, w))
}

/// Integrates the vector-valued `f` over `(lo, hi)`; `f` writes its
/// `dim` components into the provided buffer.
pub fn tanh_sinh_vec<F>(f: F, lo: f64, hi: f64, dim: usize, opts: &QuadOptions) -> Result<Vec<f64>>
where
    F: Fn(Node, &mut [f64]),
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad interval ({}, {})", lo, hi)));
    }
    let mut buf = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    let mut add = |t: f64, sum: &mut [f64]| {
        if let Some((node, w)) = node_at(t, lo, hi) {
            buf.iter_mut().for_each(|b| *b = 0.0);
            f(node, &mut buf);
            for (s, b) in sum.iter_mut().zip(&buf) {
                if b.is_finite() {
                    *s += w * b;
                }
            }
        }
    };

    // Level 0: integer t.
    let k_max = opts.t_max.floor() as i64;
    for k in -k_max..=k_max {
        add(k as f64, &mut sum);
    }
    let mut h = 1.0;
    let mut prev: Vec<f64> = sum.iter().map(|s| s * h).collect();
    let mut diff = f64::INFINITY;
    for level in 1..=opts.max_level {
        h *= 0.5;
        // New nodes are the odd multiples of h.
        let m = (opts.t_max / h).floor() as i64;
        let mut k = -m;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= m {
            add(k as f64 * h, &mut sum);
            k += 2;
        }
        let cur: Vec<f64> = sum.iter().map(|s| s * h).collect();
        diff = cur.iter().zip(&prev).map(|(c, p)| (c - p).abs()).fold(0.0, f64::max);
        let scale = cur.iter().map(|c| c.abs()).fold(1.0, f64::max);
        prev = cur;
        if level >= opts.min_level && diff < opts.tol * scale {
            return Ok(prev);
        }
    }
    let scale = prev.iter().map(|c| c.abs()).fold(1.0, f64::max);
    if diff > opts.fail_tol * scale {
        return Err(Error::NonConvergence { difference: diff });
    }
    Ok(prev)
}

/// Scalar tanh-sinh integral over `(lo, hi)` with default options.
pub fn tanh_sinh<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(Node) -> f64,
{
    let v = tanh_sinh_vec(|n, out| out[0] = f(n), lo, hi, 1, &QuadOptions::default())?;
    Ok(v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn semicircle_has_unit_mass() {
        let v = tanh_sinh(|n| 2.0 / PI * (n.from_lo * n.from_hi).sqrt(), -1.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let v = tanh_sinh(|n| 2.0 / PI * (n.from_lo * n.from_hi).sqrt() * n.x, -1.0, 1.0).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn inverse_square_root_endpoints() {
        // ∫ dx / √((x-a)(b-x)) = π on any (a, b).
        let v = tanh_sinh(|n| 1.0 / (n.from_lo * n.from_hi).sqrt(), 0.3, 1.7).unwrap();
        assert!((v - PI).abs() < 1e-11);
        // One-sided singularity: ∫_0^1 x^{-1/2} = 2.
        let v = tanh_sinh(|n| 1.0 / n.from_lo.sqrt(), 0.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn smooth_polynomial_and_vector_form() {
        let opts = QuadOptions::default();
        let v = tanh_sinh_vec(
            |n, out| {
                out[0] = n.x * n.x;
                out[1] = n.x.exp();
            },
            -2.0,
            1.0,
            2,
            &opts,
        )
        .unwrap();
        assert!((v[0] - 3.0).abs() < 1e-13);
        assert!((v[1] - (1f64.exp() - (-2f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn endpoint_distances_are_consistent() {
        for &t in &[-5.5, -1.0, 0.0, 0.3, 4.0] {
            let (n, w) = node_at(t, -1.0, 3.0).unwrap();
            assert!(w > 0.0);
            assert!((n.from_lo + n.from_hi - 4.0).abs() < 1e-15);
            assert!(n.x >= -1.0 && n.x <= 3.0 && n.from_hi > 0.0 && n.from_lo > 0.0);
        }
    }

    #[test]
    fn rejects_bad_interval_and_reports_nonconvergence() {
        assert!(tanh_sinh(|_| 1.0, 1.0, 1.0).is_err());
        let opts = QuadOptions { max_level: 2, min_level: 3, tol: 1e-30, fail_tol: 1e-30, t_max: 6.0 };
        let r = tanh_sinh_vec(|n, out| out[0] = (40.0 * n.x).sin(), 0.0, 1.0, 1, &opts);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
