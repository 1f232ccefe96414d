use std::fmt::Write as _;
use std::fs;

use siac_core::document::{knot_list_json, parse_knot_list};
use siac_core::filter::{convolve_field, reproduction_residuals, ScaledKernel};
use siac_core::{
    build_kernel, coefficient_table, symmetric_knots, AnyKernel, Error, FieldDocument, FieldTag,
    KernelDocument, KnotSequence, Rational, Scalar, TableMode,
};

use crate::points::parse_points;

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SINGULAR: u8 = 3;
pub const EXIT_BOUNDARY: u8 = 4;

const DEFAULT_TOLERANCE: f64 = 1e-8;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularMatrix => EXIT_SINGULAR,
            Error::BoundaryUnsupported { .. } => EXIT_BOUNDARY,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, CliError>;

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {path}: {e}")))
}

fn read_kernel(path: &str) -> Result<AnyKernel, CliError> {
    Ok(KernelDocument::from_json(&read(path)?)?.to_kernel()?)
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("SIAC_PRECISION") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0)
            .ok_or_else(|| {
                CliError::input(format!("SIAC_PRECISION={s:?} is not a positive decimal"))
            }),
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

pub fn table(degree: usize, paper_verbatim: bool) -> CmdResult {
    let mode = if paper_verbatim {
        TableMode::PaperVerbatim
    } else {
        TableMode::SignCorrected
    };
    println!("{}", coefficient_table(degree, mode)?);
    Ok(0)
}

pub fn knots(degree: usize, exact: bool) -> CmdResult {
    let field = if exact {
        FieldTag::Exact
    } else {
        FieldTag::Float
    };
    println!(
        "{}",
        knot_list_json(&symmetric_knots::<Rational>(degree), field)?
    );
    Ok(0)
}

pub fn coeffs(degree: usize, knots: Option<&str>, exact: bool, out: Option<&str>) -> CmdResult {
    let (knots, source) = match knots {
        None => (symmetric_knots::<Rational>(degree), "uniform"),
        Some(arg) => {
            // an argument that is not a readable file may be an inline JSON array
            let text = match fs::read_to_string(arg) {
                Ok(text) => text,
                Err(_) if arg.trim_start().starts_with('[') => arg.to_string(),
                Err(e) => return Err(CliError::input(format!("cannot read {arg}: {e}"))),
            };
            (KnotSequence::new(parse_knot_list(&text)?)?, "knot-file")
        }
    };
    let kernel = if exact {
        AnyKernel::Exact(build_kernel(&knots, degree)?)
    } else {
        AnyKernel::Float(build_kernel(&knots.to_f64(), degree)?)
    };
    let doc = KernelDocument::from_kernel(&kernel, &format!("divided-difference/{source}"))?;
    let json = doc.to_json();
    match out {
        Some(path) => fs::write(path, json + "\n")
            .map_err(|e| CliError::input(format!("cannot write {path}: {e}")))?,
        None => println!("{json}"),
    }
    Ok(0)
}

pub fn verify(
    path: &str,
    delta_max: Option<usize>,
    samples: usize,
    range: Option<&[f64]>,
) -> CmdResult {
    let kernel = read_kernel(path)?;
    let tol = tolerance()?;
    let d = kernel.degree();
    let delta_max = delta_max.unwrap_or(2 * d);
    let (a, b) = match range {
        Some([a, b]) if a.is_finite() && b.is_finite() && a <= b => (*a, *b),
        Some(_) => return Err(CliError::input("--range needs two finite values A <= B")),
        None => {
            let (lo, hi) = kernel.to_f64().support();
            (lo, hi)
        }
    };
    if samples == 0 {
        return Err(CliError::input("--samples must be positive"));
    }
    let xs: Vec<f64> = if samples == 1 {
        vec![a]
    } else {
        (0..samples)
            .map(|i| a + (b - a) * i as f64 / (samples - 1) as f64)
            .collect()
    };
    let residuals: Vec<Vec<f64>> = match &kernel {
        AnyKernel::Exact(k) => {
            let exact_xs: Vec<Rational> = xs
                .iter()
                .map(|&x| Rational::from_f64(x).expect("finite"))
                .collect();
            reproduction_residuals(k, delta_max, &exact_xs)
                .into_iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect()
        }
        AnyKernel::Float(k) => reproduction_residuals(k, delta_max, &xs),
    };
    let mut report = String::new();
    let field = match kernel.field() {
        FieldTag::Exact => "exact",
        FieldTag::Float => "float",
    };
    let _ = writeln!(
        report,
        "degree {d}, field {field}, {samples} samples on [{a}, {b}], tolerance {tol:e}"
    );
    let _ = writeln!(report, "delta,max_abs_residual,max_rel_residual,gated");
    let mut ok = true;
    for (delta, row) in residuals.iter().enumerate() {
        let max_abs = row.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let max_rel = row.iter().zip(&xs).fold(0.0f64, |m, (r, x)| {
            m.max(r.abs() / x.abs().powi(delta as i32).max(1.0))
        });
        let gated = delta <= 2 * d;
        if gated && (max_rel.is_nan() || max_rel >= tol) {
            ok = false;
        }
        let _ = writeln!(
            report,
            "{delta},{max_abs:e},{max_rel:e},{}",
            if gated { "yes" } else { "no" }
        );
    }
    let _ = writeln!(report, "{}", if ok { "PASS" } else { "FAIL" });
    print!("{report}");
    Ok(if ok { 0 } else { EXIT_VERIFY_FAILED })
}

pub fn kernel_eval(path: &str, points: &str) -> CmdResult {
    let kernel = read_kernel(path)?;
    let xs = parse_points(points).map_err(CliError::input)?;
    let mut out = String::from("x,value\n");
    for x in xs {
        let v = match &kernel {
            AnyKernel::Exact(k) => k.eval(&Rational::from_f64(x).expect("finite")).to_f64(),
            AnyKernel::Float(k) => k.eval(&x),
        };
        let _ = writeln!(out, "{x},{v}");
    }
    print!("{out}");
    Ok(0)
}

pub fn filter(kernel_path: &str, field_path: &str, points: &str, scale: Option<f64>) -> CmdResult {
    let kernel = read_kernel(kernel_path)?;
    let field = FieldDocument::from_json(&read(field_path)?)?.to_field()?;
    let xs = parse_points(points).map_err(CliError::input)?;
    let h = scale.unwrap_or_else(|| field.mean_cell_width());
    let scaled = ScaledKernel::new(kernel.to_f64(), h)?;
    let values = convolve_field(&scaled, &field, &xs)?;
    let mut out = String::from("x,value\n");
    for (x, v) in xs.iter().zip(values) {
        let _ = writeln!(out, "{x},{v}");
    }
    print!("{out}");
    Ok(0)
}
