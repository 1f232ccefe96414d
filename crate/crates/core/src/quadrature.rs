//! Gauss–Legendre rules and Legendre polynomial evaluation on [-1, 1].

use std::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on [-1, 1], exact for degree `2n - 1`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f, summed in node order.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Sums the rule over consecutive intervals of `breaks`.
    pub fn integrate_piecewise(&self, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

/// `(P_n(x), P_n'(x))` via the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = if (1.0 - x * x).abs() > 0.0 {
        n * (x * p1 - p0) / (x * x - 1.0)
    } else {
        // P_n'(±1) = (±1)^{n-1} n(n+1)/2
        let s = if x > 0.0 || n as usize % 2 == 1 {
            1.0
        } else {
            -1.0
        };
        s * n * (n + 1.0) / 2.0
    };
    (p1, d)
}

/// Evaluates `Σ coefficients[n] · P_n(x)`.
pub fn legendre_series(coefficients: &[f64], x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    let mut acc = 0.0;
    for (n, c) in coefficients.iter().enumerate() {
        let pn = match n {
            0 => 1.0,
            1 => x,
            _ => {
                let k = n as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
                p2
            }
        };
        acc += c * pn;
    }
    acc
}
