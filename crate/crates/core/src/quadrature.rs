//! Gauss–Legendre rules: fixed order, composite, adaptive 1-D, and a polar
//! rule for disks.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` points, nodes found by Newton iteration on `P_n`.
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::invalid("order", "must be at least 1"));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels of `[a, b]`, each with `rule`.
pub fn composite(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let lo = a + p as f64 * h;
            rule.mapped(lo, lo + h).collect::<Vec<_>>()
        })
        .collect()
}

/// Recursive bisection with a Gauss–Legendre rule; the estimate on each
/// panel is compared against the sum over its two halves.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let rule = GaussLegendre::new(10)?;
    let whole = rule.integrate(a, b, &f);
    adaptive_step(&rule, &f, a, b, whole, tol, 0)
}

const MAX_DEPTH: u32 = 40;

fn adaptive_step<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let err = (left + right - whole).abs();
    if err <= tol {
        return Ok(left + right);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure {
            estimate: err,
            subdivisions: depth,
        });
    }
    Ok(adaptive_step(rule, f, a, mid, left, 0.5 * tol, depth + 1)?
        + adaptive_step(rule, f, mid, b, right, 0.5 * tol, depth + 1)?)
}

/// Polar rule on the disk of radius `radius`: Gauss–Legendre in `ρ` (with
/// the `ρ` Jacobian folded into the weights) times the trapezoid rule in
/// angle. Returns `(x, y, weight)`.
pub fn disk(radius: f64, radial: &GaussLegendre, radial_panels: usize, angular: usize) -> Vec<(f64, f64, f64)> {
    let angular = angular.max(1);
    let dtheta = 2.0 * PI / angular as f64;
    let rho = composite(radial, 0.0, radius, radial_panels);
    let mut out = Vec::with_capacity(rho.len() * angular);
    for &(r, wr) in &rho {
        for j in 0..angular {
            let t = (j as f64 + 0.5) * dtheta;
            out.push((r * t.cos(), r * t.sin(), wr * r * dtheta));
        }
    }
    out
}
