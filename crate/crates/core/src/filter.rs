//! Convolution of SIAC kernels with monomials and with piecewise-polynomial data.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::SiacKernel;
use crate::numeric::Scalar;
use crate::quadrature::{legendre_series, GaussLegendre};

/// Per-cell polynomials on strictly increasing breakpoints. Each cell stores
/// Legendre modal coefficients on the cell mapped affinely to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseField {
    breakpoints: Vec<f64>,
    cells: Vec<Vec<f64>>,
}

impl PiecewiseField {
    pub fn new(breakpoints: Vec<f64>, cells: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidField("need at least two breakpoints".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidField(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if cells.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidField(format!(
                "{} breakpoints need {} cells, found {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                cells.len()
            )));
        }
        if cells.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidField("non-finite coefficient".into()));
        }
        Ok(PiecewiseField { breakpoints, cells })
    }

    /// L2 projection of `f` onto degree-`degree` polynomials on every cell.
    /// Exact when `f` is itself a polynomial of at most that degree.
    pub fn project(breakpoints: Vec<f64>, degree: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let rule = GaussLegendre::new(degree + 1);
        let cells = breakpoints
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                (0..=degree)
                    .map(|n| {
                        let mut coeffs = vec![0.0; n + 1];
                        coeffs[n] = 1.0;
                        let integral = rule.integrate(-1.0, 1.0, |xi| {
                            f(a + 0.5 * (xi + 1.0) * (b - a)) * legendre_series(&coeffs, xi)
                        });
                        0.5 * (2.0 * n as f64 + 1.0) * integral
                    })
                    .collect()
            })
            .collect();
        PiecewiseField::new(breakpoints, cells)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    /// Maximum local polynomial degree.
    pub fn cell_degree(&self) -> usize {
        self.cells
            .iter()
            .map(|c| c.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn domain(&self) -> (f64, f64) {
        (
            self.breakpoints[0],
            self.breakpoints[self.breakpoints.len() - 1],
        )
    }

    /// Cell containing `x`, using the right cell at interior breakpoints. The
    /// right end of the domain belongs to the last cell.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return None;
        }
        let i = self.breakpoints.partition_point(|&b| b <= x);
        Some(i.saturating_sub(1).min(self.cells.len() - 1))
    }

    pub fn eval_in_cell(&self, cell: usize, x: f64) -> f64 {
        let (a, b) = (self.breakpoints[cell], self.breakpoints[cell + 1]);
        legendre_series(&self.cells[cell], 2.0 * (x - a) / (b - a) - 1.0)
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        self.locate(x).map(|c| self.eval_in_cell(c, x))
    }

    /// `α·self + β·other` on identical breakpoints.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &PiecewiseField,
        beta: f64,
    ) -> Result<Self> {
        if self.breakpoints != other.breakpoints {
            return Err(Error::InvalidField("breakpoints differ".into()));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| {
                (0..a.len().max(b.len()))
                    .map(|i| {
                        alpha * a.get(i).copied().unwrap_or(0.0)
                            + beta * b.get(i).copied().unwrap_or(0.0)
                    })
                    .collect()
            })
            .collect();
        PiecewiseField::new(self.breakpoints.clone(), cells)
    }

    pub fn mean_cell_width(&self) -> f64 {
        let (lo, hi) = self.domain();
        (hi - lo) / self.cells.len() as f64
    }
}

/// `K_h(x) = K(x/h) / h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledKernel {
    base: SiacKernel<f64>,
    scale: f64,
}

impl ScaledKernel {
    pub fn new(base: SiacKernel<f64>, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidScale(scale));
        }
        Ok(ScaledKernel { base, scale })
    }

    pub fn base(&self) -> &SiacKernel<f64> {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base.eval(&(x / self.scale)) / self.scale
    }

    pub fn support(&self) -> (f64, f64) {
        let (a, b) = self.base.support();
        (a * self.scale, b * self.scale)
    }

    pub fn knot_images(&self) -> impl Iterator<Item = f64> + '_ {
        self.base
            .knots()
            .as_slice()
            .iter()
            .map(move |t| t * self.scale)
    }
}

/// `(K ⋆ (·)^δ)(x) = ∫ K(t) (x − t)^δ dt` in closed form from the B-spline moments.
pub fn convolve_monomial<S: Scalar>(kernel: &SiacKernel<S>, delta: usize, x: &S) -> S {
    let sum: S = kernel
        .bases()
        .iter()
        .zip(kernel.normalized_coefficients())
        .map(|(b, c)| c.clone() * b.monomial_moment(delta, x))
        .sum();
    if delta.is_multiple_of(2) {
        sum
    } else {
        -sum
    }
}

/// `entry[δ][i] = (K ⋆ (·)^δ)(xs[i]) − xs[i]^δ` for `δ = 0..=delta_max`.
pub fn reproduction_residuals<S: Scalar>(
    kernel: &SiacKernel<S>,
    delta_max: usize,
    xs: &[S],
) -> Vec<Vec<S>> {
    (0..=delta_max)
        .map(|delta| {
            xs.iter()
                .map(|x| convolve_monomial(kernel, delta, x) - x.powi(delta as u32))
                .collect()
        })
        .collect()
}

/// `|residual| / max(1, |x|^δ)`.
pub fn relative_reproduction_residuals(
    kernel: &SiacKernel<f64>,
    delta_max: usize,
    xs: &[f64],
) -> Vec<Vec<f64>> {
    reproduction_residuals(kernel, delta_max, xs)
        .into_iter()
        .enumerate()
        .map(|(delta, row)| {
            row.into_iter()
                .zip(xs)
                .map(|(r, &x)| r.abs() / x.abs().powi(delta as i32).max(1.0))
                .collect()
        })
        .collect()
}

/// `∫ K` by Gauss–Legendre quadrature over the kernel's knot intervals.
pub fn integrate_kernel(kernel: &SiacKernel<f64>) -> f64 {
    GaussLegendre::new(kernel.degree() + 1)
        .integrate_piecewise(kernel.knots().as_slice(), |x| kernel.eval(&x))
}

fn quadrature_nodes(kernel_degree: usize, field_degree: usize) -> usize {
    (2 * kernel_degree + 2).max((field_degree + kernel_degree + 2).div_ceil(2))
}

/// `∫ f(t) K_h(x − t) dt` at a single point, or `None` when the kernel support
/// leaves the field domain.
pub fn convolve_field_at(
    kernel: &ScaledKernel,
    field: &PiecewiseField,
    rule: &GaussLegendre,
    x: f64,
) -> Option<f64> {
    let (lo, hi) = field.domain();
    let width = hi - lo;
    let (ka, kb) = kernel.support();
    let (a, b) = (x - kb, x - ka);
    let slack = 1e-12 * width;
    if !(a >= lo - slack && b <= hi + slack) {
        return None;
    }
    let mut cuts: Vec<f64> = kernel.knot_images().map(|t| x - t).collect();
    cuts.extend(
        field
            .breakpoints()
            .iter()
            .copied()
            .filter(|&p| p > a && p < b),
    );
    cuts.sort_by(f64::total_cmp);
    let min_piece = 1e-14 * width;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (w[0].max(lo), w[1].min(hi));
        if q - p <= min_piece {
            continue;
        }
        let cell = field.locate(0.5 * (p + q))?;
        total += rule.integrate(p, q, |t| field.eval_in_cell(cell, t) * kernel.eval(x - t));
    }
    Some(total)
}

/// Filters `field` at every point of `xs`. Points are evaluated in parallel;
/// each result depends only on its own point, so output matches a sequential run bit for bit.
pub fn convolve_field(
    kernel: &ScaledKernel,
    field: &PiecewiseField,
    xs: &[f64],
) -> Result<Vec<f64>> {
    let rule = GaussLegendre::new(quadrature_nodes(
        kernel.base().degree(),
        field.cell_degree(),
    ));
    let results: Vec<Option<f64>> = xs
        .par_iter()
        .map(|&x| convolve_field_at(kernel, field, &rule, x))
        .collect();
    let offending: Vec<f64> = xs
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.is_none())
        .map(|(&x, _)| x)
        .collect();
    if !offending.is_empty() {
        return Err(Error::BoundaryUnsupported { points: offending });
    }
    Ok(results.into_iter().map(|r| r.unwrap_or(f64::NAN)).collect())
}

/// Discrete error norms of `values − reference`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// Root mean square.
    pub l2: f64,
    pub linf: f64,
}

pub fn error_norms(values: &[f64], reference: &[f64]) -> Result<ErrorNorms> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            found: reference.len(),
        });
    }
    let (sq, linf) = values
        .iter()
        .zip(reference)
        .fold((0.0, 0.0f64), |(sq, m), (v, r)| {
            let e = (v - r).abs();
            (sq + e * e, m.max(e))
        });
    Ok(ErrorNorms {
        l2: (sq / values.len() as f64).sqrt(),
        linf,
    })
}
