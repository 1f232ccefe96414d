//! Divided differences of polynomials over (possibly confluent) knot sequences.

use crate::error::{Error, Result};
use crate::numeric::{binomial, Scalar};

/// A finite non-decreasing sequence of knots.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSequence<S> {
    knots: Vec<S>,
}

impl<S: Scalar> KnotSequence<S> {
    pub fn new(knots: Vec<S>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::EmptyKnots);
        }
        if let Some(i) = knots.windows(2).position(|w| {
            matches!(
                w[0].partial_cmp(&w[1]),
                None | Some(std::cmp::Ordering::Greater)
            )
        }) {
            return Err(Error::NotNonDecreasing { index: i + 1 });
        }
        Ok(KnotSequence { knots })
    }

    /// Like [`KnotSequence::new`] but additionally rejects repeated knots.
    pub fn strictly_increasing(knots: Vec<S>) -> Result<Self> {
        let seq = Self::new(knots)?;
        seq.require_strictly_increasing()?;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.knots
    }

    pub fn into_vec(self) -> Vec<S> {
        self.knots
    }

    pub fn first(&self) -> &S {
        &self.knots[0]
    }

    pub fn last(&self) -> &S {
        &self.knots[self.knots.len() - 1]
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[0] < w[1])
    }

    pub fn require_strictly_increasing(&self) -> Result<()> {
        match self.knots.windows(2).position(|w| w[0] == w[1]) {
            Some(i) => Err(Error::NotStrictlyIncreasing { index: i + 1 }),
            None => Ok(()),
        }
    }

    /// Largest number of equal consecutive knots.
    pub fn max_multiplicity(&self) -> usize {
        let mut best = 1;
        let mut run = 1;
        for w in self.knots.windows(2) {
            run = if w[0] == w[1] { run + 1 } else { 1 };
            best = best.max(run);
        }
        best
    }

    /// The `len` consecutive knots starting at `start`.
    pub fn window(&self, start: usize, len: usize) -> KnotSequence<S> {
        KnotSequence {
            knots: self.knots[start..start + len].to_vec(),
        }
    }

    /// Applies a monotone increasing map to every knot.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<KnotSequence<T>> {
        KnotSequence::new(self.knots.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> KnotSequence<f64> {
        KnotSequence {
            knots: self.knots.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// Univariate polynomial `Σ coefficients[ℓ] · (t − shift)^ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S> {
    coefficients: Vec<S>,
    shift: S,
}

impl<S: Scalar> Polynomial<S> {
    /// Power-basis polynomial; `coefficients[ℓ]` multiplies `t^ℓ`.
    pub fn new(coefficients: Vec<S>) -> Self {
        Self::with_shift(coefficients, S::zero())
    }

    pub fn with_shift(coefficients: Vec<S>, shift: S) -> Self {
        Polynomial {
            coefficients,
            shift,
        }
    }

    /// `t^power`
    pub fn monomial(power: usize) -> Self {
        Self::shifted_power(power, S::zero())
    }

    /// `(t − shift)^power`
    pub fn shifted_power(power: usize, shift: S) -> Self {
        let mut coefficients = vec![S::zero(); power + 1];
        coefficients[power] = S::one();
        Polynomial {
            coefficients,
            shift,
        }
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coefficients
    }

    pub fn shift(&self) -> &S {
        &self.shift
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, t: &S) -> S {
        let u = t.clone() - self.shift.clone();
        self.coefficients
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * u.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(l, c)| S::from_i64(l as i64) * c.clone())
            .collect();
        Polynomial {
            coefficients,
            shift: self.shift.clone(),
        }
    }

    /// `h^{(order)}(t) / order!`, exactly, without forming factorials.
    pub fn taylor_coefficient(&self, order: usize, t: &S) -> S {
        let u = t.clone() - self.shift.clone();
        let mut acc = S::zero();
        for l in (order..self.coefficients.len()).rev() {
            let c = S::from_i64(binomial(l as u32, order as u32)) * self.coefficients[l].clone();
            acc = acc * u.clone() + c;
        }
        acc
    }
}

/// Divided difference `∂(t_{0:n}) h` by the recursive definition, evaluated as a
/// triangular Newton table. Coincident knot runs use the Taylor-coefficient branch.
pub fn divided_difference<S: Scalar>(knots: &KnotSequence<S>, h: &Polynomial<S>) -> Result<S> {
    let allowed = h.degree().unwrap_or(0) + 1;
    let multiplicity = knots.max_multiplicity();
    if multiplicity > allowed {
        return Err(Error::ExcessiveMultiplicity {
            multiplicity,
            allowed,
        });
    }
    let t = knots.as_slice();
    let mut column: Vec<S> = t.iter().map(|ti| h.eval(ti)).collect();
    for order in 1..t.len() {
        for i in 0..t.len() - order {
            let (lo, hi) = (&t[i], &t[i + order]);
            column[i] = if lo == hi {
                h.taylor_coefficient(order, lo)
            } else {
                (column[i + 1].clone() - column[i].clone()) / (hi.clone() - lo.clone())
            };
        }
        column.truncate(t.len() - order);
    }
    Ok(column.swap_remove(0))
}

/// Divided difference over distinct knots from function values, via the
/// expansion `Σ_ℓ values[ℓ] / Π_{j≠ℓ}(t_ℓ − t_j)`.
pub fn divided_difference_expansion<S: Scalar>(knots: &KnotSequence<S>, values: &[S]) -> Result<S> {
    knots.require_strictly_increasing()?;
    if values.len() != knots.len() {
        return Err(Error::LengthMismatch {
            expected: knots.len(),
            found: values.len(),
        });
    }
    Ok(lagrange_weighted_sum(knots.as_slice(), values))
}

pub(crate) fn lagrange_weighted_sum<S: Scalar>(t: &[S], values: &[S]) -> S {
    t.iter()
        .zip(values)
        .enumerate()
        .filter(|(_, (_, v))| !v.is_zero())
        .map(|(l, (tl, v))| {
            let denom = t
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != l)
                .fold(S::one(), |acc, (_, tj)| acc * (tl.clone() - tj.clone()));
            v.clone() / denom
        })
        .sum()
}
