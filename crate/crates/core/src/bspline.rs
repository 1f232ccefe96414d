//! Single B-splines defined through divided differences of truncated powers.

use crate::divdiff::{divided_difference, lagrange_weighted_sum, KnotSequence, Polynomial};
use crate::error::{Error, Result};
use crate::numeric::{binomial, Scalar};

/// B-spline of degree `d` on `d + 2` strictly increasing knots,
/// `B(x) = (t_last − t_first) · ∂(t) (· − x)_+^d`.
///
/// Normalized so that the B-splines of a knot sequence sum to one; the
/// integral is therefore `(t_last − t_first) / (d + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BSpline<S> {
    degree: usize,
    knots: KnotSequence<S>,
}

impl<S: Scalar> BSpline<S> {
    pub fn new(degree: usize, knots: KnotSequence<S>) -> Result<Self> {
        if knots.len() != degree + 2 {
            return Err(Error::WrongKnotCount {
                degree,
                expected: degree + 2,
                found: knots.len(),
            });
        }
        knots.require_strictly_increasing()?;
        Ok(BSpline { degree, knots })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &KnotSequence<S> {
        &self.knots
    }

    /// Half-open support `[t_first, t_last)`.
    pub fn support(&self) -> (&S, &S) {
        (self.knots.first(), self.knots.last())
    }

    /// `(t_last − t_first) / (d + 1)`, the integral of the spline and the
    /// factor separating the true monomial moment from the bare divided difference.
    pub fn peano_factor(&self) -> S {
        (self.knots.last().clone() - self.knots.first().clone())
            / S::from_i64(self.degree as i64 + 1)
    }

    pub fn integral(&self) -> S {
        self.peano_factor()
    }

    /// Evaluates the defining divided difference of the truncated power via the
    /// Lagrange expansion. Right-continuous: a knot equal to `x` contributes 0.
    pub fn eval_via_divdiff(&self, x: &S) -> S {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return S::zero();
        }
        let t = self.knots.as_slice();
        let d = self.degree as u32;
        let right = t.iter().filter(|&tl| tl > x).count();
        let left = t.iter().filter(|&tl| tl < x).count();
        let span = hi.clone() - lo.clone();
        // (t−x)_+^d and (−1)^{d+1}(x−t)_+^d have the same divided difference for
        // d ≥ 1, since their difference is a degree-d polynomial. Use the side with
        // fewer nonzero terms.
        if d == 0 || right <= left {
            let values: Vec<S> = t
                .iter()
                .map(|tl| {
                    if tl > x {
                        (tl.clone() - x.clone()).powi(d)
                    } else {
                        S::zero()
                    }
                })
                .collect();
            span * lagrange_weighted_sum(t, &values)
        } else {
            let values: Vec<S> = t
                .iter()
                .map(|tl| {
                    if tl < x {
                        (x.clone() - tl.clone()).powi(d)
                    } else {
                        S::zero()
                    }
                })
                .collect();
            let v = span * lagrange_weighted_sum(t, &values);
            if d.is_multiple_of(2) {
                -v
            } else {
                v
            }
        }
    }

    /// Classical two-term degree-raising recurrence, used as an independent check.
    pub fn eval_via_recurrence(&self, x: &S) -> S {
        let t = self.knots.as_slice();
        let d = self.degree;
        let mut n: Vec<S> = (0..=d)
            .map(|i| {
                if &t[i] <= x && x < &t[i + 1] {
                    S::one()
                } else {
                    S::zero()
                }
            })
            .collect();
        for p in 1..=d {
            for i in 0..=d - p {
                let left =
                    (x.clone() - t[i].clone()) / (t[i + p].clone() - t[i].clone()) * n[i].clone();
                let right = (t[i + p + 1].clone() - x.clone())
                    / (t[i + p + 1].clone() - t[i + 1].clone())
                    * n[i + 1].clone();
                n[i] = left + right;
            }
        }
        n.swap_remove(0)
    }

    /// `∫ B(t) (t − x)^δ dt`, in closed form through the Peano kernel identity:
    /// `s · C(k+δ, k)⁻¹ · ∂(t_{0:k}) (t − x)^{k+δ}` with `k = d + 1`.
    pub fn monomial_moment(&self, delta: usize, x: &S) -> S {
        let k = self.degree + 1;
        let power = Polynomial::shifted_power(k + delta, x.clone());
        let dd = divided_difference(&self.knots, &power)
            .expect("distinct knots are valid for any polynomial");
        self.peano_factor() * dd / S::from_i64(binomial((k + delta) as u32, k as u32))
    }
}
