//! Optimal SIAC kernels: constraint matrix construction, the coefficient
//! solve, and the assembled kernel `K(x) = Σ_γ c′_γ B(x | t_{γ:γ+d+1})`.
//!
//! Knots are indexed `t_{-d} .. t_{2d+1}` (3d + 2 values); column `γ` of the
//! constraint matrix uses the `d + 2` consecutive knots starting at `t_γ`.
//! In code columns are numbered `0..=2d`, i.e. `γ = column − d`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::bspline::BSpline;
use crate::divdiff::{divided_difference, divided_difference_expansion, KnotSequence, Polynomial};
use crate::error::{Error, Result};
use crate::numeric::{binomial, factorial, Rational, Scalar};

/// Number of knots a degree-`d` kernel needs.
pub fn kernel_knot_count(degree: usize) -> usize {
    3 * degree + 2
}

/// Unit-spaced knots symmetric about zero: `t_{-d} = −d − σ`, `σ = (d + 1)/2`,
/// running to `t_{2d+1} = 2d + 1 − σ`.
pub fn symmetric_knots<S: Scalar>(degree: usize) -> KnotSequence<S> {
    let d = degree as i64;
    let knots = (0..kernel_knot_count(degree) as i64)
        .map(|i| S::from_ratio(2 * i - 3 * d - 1, 2))
        .collect();
    KnotSequence::new(knots).expect("symmetric knots are increasing")
}

/// Column start knots `τ = [−d − σ : d − σ]` of the symmetric construction.
pub fn symmetric_column_starts<S: Scalar>(degree: usize) -> Vec<S> {
    let mut knots = symmetric_knots::<S>(degree).into_vec();
    knots.truncate(2 * degree + 1);
    knots
}

fn validate_kernel_knots<S: Scalar>(knots: &KnotSequence<S>, degree: usize) -> Result<()> {
    let expected = kernel_knot_count(degree);
    if knots.len() != expected {
        return Err(Error::WrongKnotCount {
            degree,
            expected,
            found: knots.len(),
        });
    }
    knots.require_strictly_increasing()
}

/// The `(2d+1) × (2d+1)` matrix `M₀`; row `δ ∈ 0..=2d`, column `γ + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix<S> {
    degree: usize,
    entries: Vec<Vec<S>>,
}

impl<S: Scalar> ConstraintMatrix<S> {
    pub fn from_rows(degree: usize, entries: Vec<Vec<S>>) -> Result<Self> {
        let n = 2 * degree + 1;
        if entries.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: entries.len(),
            });
        }
        if let Some(row) = entries.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                found: row.len(),
            });
        }
        Ok(ConstraintMatrix { degree, entries })
    }

    fn from_fn(degree: usize, mut f: impl FnMut(usize, usize) -> Result<S>) -> Result<Self> {
        let n = 2 * degree + 1;
        let entries = (0..n)
            .map(|delta| (0..n).map(|col| f(delta, col)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstraintMatrix { degree, entries })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, delta: usize, column: usize) -> &S {
        &self.entries[delta][column]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.entries
    }

    pub fn scaled(&self, factor: &S) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|v| v.clone() * factor.clone()).collect())
            .collect();
        ConstraintMatrix {
            degree: self.degree,
            entries,
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a.clone() * b.clone()).sum())
            .collect()
    }

    pub fn determinant(&self) -> S {
        let mut a = self.entries.clone();
        let n = a.len();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = select_pivot(&a, col) else {
                return S::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            det = det * a[col][col].clone();
            eliminate_below(&mut a, col);
        }
        det
    }
}

/// `M₀[δ][γ] = ∂(t_{γ:γ+d+1}) t^{d+1+δ}` through the recursive divided difference.
pub fn build_matrix_divdiff<S: Scalar>(
    knots: &KnotSequence<S>,
    degree: usize,
) -> Result<ConstraintMatrix<S>> {
    validate_kernel_knots(knots, degree)?;
    let columns: Vec<_> = (0..=2 * degree)
        .map(|c| knots.window(c, degree + 2))
        .collect();
    ConstraintMatrix::from_fn(degree, |delta, col| {
        centered_power_divdiff(&columns[col], degree + 1 + delta, |u, j| {
            divided_difference(u, &Polynomial::monomial(j))
        })
    })
}

/// `∂(t) t^n` as `Σ_j C(n, j) m^{n−j} ∂(t − m) (t − m)^j` with `m` the window midpoint.
/// Only `j ≥ len − 1` contribute. Keeps the summands near the size of the result.
fn centered_power_divdiff<S: Scalar>(
    window: &KnotSequence<S>,
    n: usize,
    mut dd: impl FnMut(&KnotSequence<S>, usize) -> Result<S>,
) -> Result<S> {
    let m = (window.first().clone() + window.last().clone()) / S::from_i64(2);
    let shifted = window.map(|t| t.clone() - m.clone())?;
    let mut sum = S::zero();
    for j in (window.len() - 1..=n).rev() {
        let weight = S::from_i64(binomial(n as u32, j as u32)) * m.powi((n - j) as u32);
        sum = sum + weight * dd(&shifted, j)?;
    }
    Ok(sum)
}

/// The closed form for unit-spaced knots with column starts `γ ∈ τ`:
/// `(1/(d+1)!) Σ_ℓ (−1)^ℓ C(d+1, ℓ) (γ + ℓ)^{d+1+δ}`.
///
/// Reproduced verbatim; it equals `(−1)^{d+1}` times [`build_matrix_divdiff`]
/// on [`symmetric_knots`], because the forward difference carries `(−1)^{d+1−ℓ}`.
pub fn build_matrix_uniform<S: Scalar>(degree: usize) -> ConstraintMatrix<S> {
    let k = degree as u32 + 1;
    let starts = symmetric_column_starts::<S>(degree);
    let scale = S::from_i64(factorial(k));
    ConstraintMatrix::from_fn(degree, |delta, col| {
        let power = k + delta as u32;
        let sum: S = (0..=k)
            .map(|l| {
                let sign = if l % 2 == 0 { 1 } else { -1 };
                let node = starts[col].clone() + S::from_i64(l as i64);
                S::from_i64(sign * binomial(k, l)) * node.powi(power)
            })
            .sum();
        Ok(sum / scale.clone())
    })
    .expect("closed form is infallible")
}

/// Same contract as [`build_matrix_divdiff`], computed from the explicit
/// expansion `Σ_ℓ v_ℓ / Π_{j≠ℓ}(t_ℓ − t_j)` over each column's knots
/// (after the same midpoint recentring).
pub fn build_matrix_single_knots<S: Scalar>(
    knots: &KnotSequence<S>,
    degree: usize,
) -> Result<ConstraintMatrix<S>> {
    validate_kernel_knots(knots, degree)?;
    let columns: Vec<_> = (0..=2 * degree)
        .map(|c| knots.window(c, degree + 2))
        .collect();
    ConstraintMatrix::from_fn(degree, |delta, col| {
        centered_power_divdiff(&columns[col], degree + 1 + delta, |u, j| {
            let values: Vec<S> = u.as_slice().iter().map(|t| t.powi(j as u32)).collect();
            divided_difference_expansion(u, &values)
        })
    })
}

fn select_pivot<S: Scalar>(a: &[Vec<S>], col: usize) -> Option<usize> {
    let candidates = (col..a.len()).filter(|&r| !a[r][col].is_zero());
    if S::EXACT {
        candidates.into_iter().next()
    } else {
        candidates.max_by(|&i, &j| {
            a[i][col]
                .to_f64()
                .abs()
                .partial_cmp(&a[j][col].to_f64().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

fn eliminate_below<S: Scalar>(a: &mut [Vec<S>], col: usize) {
    let (top, rest) = a.split_at_mut(col + 1);
    let pivot_row = &top[col];
    for row in rest {
        if row[col].is_zero() {
            continue;
        }
        let factor = row[col].clone() / pivot_row[col].clone();
        row[col] = S::zero();
        for c in col + 1..pivot_row.len() {
            row[c] = row[c].clone() - factor.clone() * pivot_row[c].clone();
        }
    }
}

/// Solves `M x = rhs` by Gaussian elimination: first-nonzero pivoting when the
/// field is exact, row-equilibrated partial pivoting otherwise.
pub fn solve_system<S: Scalar>(m: &ConstraintMatrix<S>, rhs: &[S]) -> Result<Vec<S>> {
    let n = m.size();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    let mut a: Vec<Vec<S>> = m
        .rows()
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    if !S::EXACT {
        // power-of-two row scaling is exact in binary floating point
        for row in a.iter_mut() {
            let max = row[..n]
                .iter()
                .map(|v| v.to_f64().abs())
                .fold(0.0, f64::max);
            if max > 0.0 && max.is_finite() {
                let scale = S::from_f64((-max.log2().round()).exp2()).unwrap_or_else(S::one);
                for v in row.iter_mut() {
                    *v = v.clone() * scale.clone();
                }
            }
        }
    }
    for col in 0..n {
        let p = select_pivot(&a, col).ok_or(Error::SingularMatrix)?;
        a.swap(p, col);
        eliminate_below(&mut a, col);
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let tail: S = (i + 1..n).map(|j| a[i][j].clone() * x[j].clone()).sum();
        x[i] = (a[i][n].clone() - tail) / a[i][i].clone();
    }
    if !S::EXACT && x.iter().any(|v| !v.to_f64().is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(x)
}

fn unit_vector<S: Scalar>(n: usize) -> Vec<S> {
    let mut e = vec![S::zero(); n];
    e[0] = S::one();
    e
}

/// `c = M₀⁻¹ e₁`.
pub fn solve_coefficients<S: Scalar>(m: &ConstraintMatrix<S>) -> Result<Vec<S>> {
    solve_system(m, &unit_vector(m.size()))
}

/// `c = M₀⁻¹ e₁` by Cramer's rule: `c_i = det(M₀ with column i replaced by e₁) / det M₀`.
pub fn solve_coefficients_cramer<S: Scalar>(m: &ConstraintMatrix<S>) -> Result<Vec<S>> {
    let det = m.determinant();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let e = unit_vector::<S>(m.size());
    (0..m.size())
        .map(|i| {
            let mut rows = m.rows().to_vec();
            for (row, ej) in rows.iter_mut().zip(&e) {
                row[i] = ej.clone();
            }
            Ok(ConstraintMatrix {
                degree: m.degree,
                entries: rows,
            }
            .determinant()
                / det.clone())
        })
        .collect()
}

/// Per-column Peano factors `s_γ = (t_{γ+d+1} − t_γ) / (d + 1)`.
pub fn peano_factors<S: Scalar>(knots: &KnotSequence<S>, degree: usize) -> Vec<S> {
    let t = knots.as_slice();
    let k = S::from_i64(degree as i64 + 1);
    (0..=2 * degree)
        .map(|c| (t[c + degree + 1].clone() - t[c].clone()) / k.clone())
        .collect()
}

/// `c′_γ = c_γ / s_γ`, turning the divided-difference solution into B-spline
/// weights whose kernel reproduces monomials on arbitrary knots.
pub fn normalize_coefficients<S: Scalar>(
    knots: &KnotSequence<S>,
    degree: usize,
    raw: &[S],
) -> Result<Vec<S>> {
    validate_kernel_knots(knots, degree)?;
    if raw.len() != 2 * degree + 1 {
        return Err(Error::LengthMismatch {
            expected: 2 * degree + 1,
            found: raw.len(),
        });
    }
    Ok(raw
        .iter()
        .zip(peano_factors(knots, degree))
        .map(|(c, s)| c.clone() / s)
        .collect())
}

/// A SIAC kernel of degree `d`: `2d + 1` B-splines on `3d + 2` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct SiacKernel<S> {
    degree: usize,
    knots: KnotSequence<S>,
    raw: Vec<S>,
    normalized: Vec<S>,
}

impl<S: Scalar> SiacKernel<S> {
    /// Assembles a kernel from stored values without re-solving.
    pub fn from_parts(
        degree: usize,
        knots: KnotSequence<S>,
        raw: Vec<S>,
        normalized: Vec<S>,
    ) -> Result<Self> {
        validate_kernel_knots(&knots, degree)?;
        for v in [&raw, &normalized] {
            if v.len() != 2 * degree + 1 {
                return Err(Error::LengthMismatch {
                    expected: 2 * degree + 1,
                    found: v.len(),
                });
            }
        }
        Ok(SiacKernel {
            degree,
            knots,
            raw,
            normalized,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &KnotSequence<S> {
        &self.knots
    }

    pub fn raw_coefficients(&self) -> &[S] {
        &self.raw
    }

    pub fn normalized_coefficients(&self) -> &[S] {
        &self.normalized
    }

    /// The B-spline of column `column` (`γ = column − d`).
    pub fn basis(&self, column: usize) -> BSpline<S> {
        BSpline::new(self.degree, self.knots.window(column, self.degree + 2))
            .expect("kernel knots validated on construction")
    }

    pub fn bases(&self) -> Vec<BSpline<S>> {
        (0..=2 * self.degree).map(|c| self.basis(c)).collect()
    }

    pub fn support(&self) -> (S, S) {
        (self.knots.first().clone(), self.knots.last().clone())
    }

    pub fn eval(&self, x: &S) -> S {
        self.bases()
            .iter()
            .zip(&self.normalized)
            .map(|(b, c)| c.clone() * b.eval_via_divdiff(x))
            .sum()
    }

    /// `∫ K = Σ c′_γ s_γ`.
    pub fn integral(&self) -> S {
        self.normalized
            .iter()
            .zip(peano_factors(&self.knots, self.degree))
            .map(|(c, s)| c.clone() * s)
            .sum()
    }

    pub fn to_f64(&self) -> SiacKernel<f64> {
        SiacKernel {
            degree: self.degree,
            knots: self.knots.to_f64(),
            raw: self.raw.iter().map(Scalar::to_f64).collect(),
            normalized: self.normalized.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// Builds the optimal kernel on `knots`.
///
/// On an inexact field the system is first rewritten for the affinely mapped
/// knots `u = (t − m)/a` (zero mean, unit average spacing). Raw coefficients are
/// not translation invariant, so the right-hand side becomes
/// `C(d+1+δ, d+1) (−m/a)^δ` instead of `e₁`; the solution is the same vector `c`.
pub fn build_kernel<S: Scalar>(knots: &KnotSequence<S>, degree: usize) -> Result<SiacKernel<S>> {
    validate_kernel_knots(knots, degree)?;
    let raw = if S::EXACT {
        solve_coefficients(&build_matrix_divdiff(knots, degree)?)?
    } else {
        let n = knots.len();
        let mean = knots.as_slice().iter().cloned().sum::<S>() / S::from_i64(n as i64);
        let spacing = (knots.last().clone() - knots.first().clone()) / S::from_i64(n as i64 - 1);
        // distinct knots can collapse after rounding
        let mapped = knots
            .map(|t| (t.clone() - mean.clone()) / spacing.clone())
            .ok()
            .filter(KnotSequence::is_strictly_increasing)
            .ok_or(Error::SingularMatrix)?;
        let shift = -(mean / spacing);
        let k = degree as u32 + 1;
        let rhs: Vec<S> = (0..=2 * degree as u32)
            .map(|delta| S::from_i64(binomial(k + delta, k)) * shift.powi(delta))
            .collect();
        solve_system(&build_matrix_divdiff(&mapped, degree)?, &rhs)?
    };
    let normalized = normalize_coefficients(knots, degree, &raw)?;
    Ok(SiacKernel {
        degree,
        knots: knots.clone(),
        raw,
        normalized,
    })
}

/// Which constraint matrix a coefficient table is solved from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// The uniform closed form exactly as printed (sign `(−1)^{d+1}` relative
    /// to the divided-difference matrix).
    PaperVerbatim,
    /// The divided-difference matrix; coefficients always sum to one.
    SignCorrected,
}

/// Symmetric-kernel coefficients over their least common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    pub numerators: Vec<BigInt>,
    pub denominator: BigInt,
}

impl CoefficientTable {
    pub fn from_rationals(values: &[Rational]) -> Self {
        let denominator = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numerators = values
            .iter()
            .map(|v| v.numer() * (&denominator / v.denom()))
            .collect();
        CoefficientTable {
            numerators,
            denominator,
        }
    }
}

impl fmt::Display for CoefficientTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.numerators.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]/{}", items.join(", "), self.denominator)
    }
}

/// Exact coefficients of the symmetric unit-spaced kernel of degree `d`.
pub fn coefficient_table(degree: usize, mode: TableMode) -> Result<CoefficientTable> {
    let m = match mode {
        TableMode::PaperVerbatim => build_matrix_uniform::<Rational>(degree),
        TableMode::SignCorrected => {
            build_matrix_divdiff(&symmetric_knots::<Rational>(degree), degree)?
        }
    };
    Ok(CoefficientTable::from_rationals(&solve_coefficients(&m)?))
}
