//! Small dense-vector helpers shared across the crate.
//!
//! All reductions run in fixed index order so repeated runs produce
//! bit-identical results.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc.sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

/// `‖v‖_p` for `p ∈ [1, ∞]`. For general `p` the largest entry is factored
/// out first so `|v_i|^p` never overflows, even at large `p`.
pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p == f64::INFINITY {
        return max_abs(v);
    }
    if p == 2.0 {
        return l2_norm(v);
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    let m = max_abs(v);
    if m == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for &x in v {
        acc += (x.abs() / m).powf(p);
    }
    m * acc.powf(1.0 / p)
}

pub fn lp_dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    lp_norm(&sub(a, b), p)
}

/// Dual exponent `p/(p−1)`, with the conventions `1 ↔ ∞`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p == f64::INFINITY {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_norm_basics() {
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0), 5.0);
        assert_eq!(lp_norm(&[1.0, -2.0], 1.0), 3.0);
        assert_eq!(lp_norm(&[1.0, -2.0], f64::INFINITY), 2.0);
        assert!((lp_norm(&[1.0, -2.0], 3.0) - 9f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn lp_norm_large_p_no_overflow() {
        // 1e300^p overflows immediately without max factoring.
        let v = [1e300, -5e299];
        let n = lp_norm(&v, 50.0);
        assert!(n.is_finite() && n >= 1e300);
    }

    #[test]
    fn dual_exponent_conventions() {
        assert_eq!(dual_exponent(1.0), f64::INFINITY);
        assert_eq!(dual_exponent(f64::INFINITY), 1.0);
        assert_eq!(dual_exponent(2.0), 2.0);
        assert!((dual_exponent(1.5) - 3.0).abs() < 1e-15);
    }
}
