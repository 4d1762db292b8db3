//! Independent reference formulas for the integration tests.
//!
//! Nothing here calls into the gauge or map code of the crate: vectors are
//! plain dense arrays over the first `DIM` coordinates (or grid cells) and
//! each gauge and gradient is written out from its defining sum.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nonopen::sampling::Sampler;
use nonopen::{GaugeKind, GaugeSpec, GridFunction, MapSpec, SparseVector, Vector};

pub const DIM: usize = 16;

/// Gauge `G` on a dense vector. Grid vectors carry one value per cell.
pub fn gauge(kind: GaugeKind, x: &[f64]) -> f64 {
    match kind {
        GaugeKind::WeightedL2 => x
            .iter()
            .enumerate()
            .map(|(i, v)| v * v / (i + 1) as f64)
            .sum(),
        GaugeKind::Dyadic => x
            .iter()
            .enumerate()
            .map(|(i, v)| v * v * 0.5f64.powi(i as i32 + 1))
            .sum(),
        GaugeKind::LqEven { q } => x.iter().map(|v| v.powi(q as i32)).sum(),
        GaugeKind::L5Odd => x.iter().map(|v| v.abs().powi(5)).sum(),
        GaugeKind::GridSquare => x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64,
        GaugeKind::WeakSepDyadic { family } => half_or_coordinate(family, x)
            .iter()
            .enumerate()
            .map(|(i, l)| l * l * 0.5f64.powi(i as i32 + 1))
            .sum(),
    }
}

/// `l_k(x)` for `k = 1..=len`, with `x_{len+1} = 0`.
fn half_or_coordinate(family: nonopen::FamilyId, x: &[f64]) -> Vec<f64> {
    match family {
        nonopen::FamilyId::Coordinate => x.to_vec(),
        nonopen::FamilyId::HalfDifference => (0..x.len())
            .map(|i| (x[i] - x.get(i + 1).copied().unwrap_or(0.0)) / 2.0)
            .collect(),
    }
}

/// Partial derivatives `∂G/∂x_j`. For grids this is the derivative with
/// respect to the cell values, so `J_G(x)h = Σ_j grad_j h_j`.
pub fn gradient(kind: GaugeKind, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    match kind {
        GaugeKind::WeightedL2 => (0..n).map(|i| 2.0 * x[i] / (i + 1) as f64).collect(),
        GaugeKind::Dyadic => (0..n)
            .map(|i| 2.0 * x[i] * 0.5f64.powi(i as i32 + 1))
            .collect(),
        GaugeKind::LqEven { q } => x
            .iter()
            .map(|v| f64::from(q) * v.powi(q as i32 - 1))
            .collect(),
        GaugeKind::L5Odd => x.iter().map(|v| 5.0 * v.abs() * v.powi(3)).collect(),
        GaugeKind::GridSquare => x.iter().map(|v| 2.0 * v / n as f64).collect(),
        GaugeKind::WeakSepDyadic { family } => {
            let l = half_or_coordinate(family, x);
            let w = |i: usize| 0.5f64.powi(i as i32 + 1);
            match family {
                nonopen::FamilyId::Coordinate => (0..n).map(|i| 2.0 * l[i] * w(i)).collect(),
                // l_k depends on x_k with weight 1/2 and on x_{k+1} with -1/2
                nonopen::FamilyId::HalfDifference => (0..n)
                    .map(|j| {
                        let own = l[j] * w(j);
                        let prev = if j > 0 { l[j - 1] * w(j - 1) } else { 0.0 };
                        own - prev
                    })
                    .collect(),
            }
        }
    }
}

/// Dense Jacobian `σ I + w x ∇(G^m)ᵀ` of `F(x) = e^{-1/G^m} x`.
pub fn jacobian(kind: GaugeKind, power: u32, x: &[f64]) -> DMatrix<f64> {
    let g = gauge(kind, x);
    let gm = g.powi(power as i32);
    let sigma = (-1.0 / gm).exp();
    let w = sigma / (gm * gm);
    let outer = f64::from(power) * g.powi(power as i32 - 1);
    let grad = DVector::from_vec(gradient(kind, x)) * outer;
    let xv = DVector::from_column_slice(x);
    DMatrix::identity(x.len(), x.len()) * sigma + xv * grad.transpose() * w
}

/// Solves `J x = y` by dense LU.
pub fn dense_solve(kind: GaugeKind, power: u32, x: &[f64], y: &[f64]) -> Vec<f64> {
    let j = jacobian(kind, power, x);
    j.lu()
        .solve(&DVector::from_column_slice(y))
        .expect("nonsingular Jacobian")
        .as_slice()
        .to_vec()
}

pub fn sparse(values: &[f64]) -> Vector {
    let entries = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i as u64 + 1, *v));
    Vector::Sparse(SparseVector::from_entries(entries).unwrap())
}

/// Dense values as a vector of the representation `m` uses.
pub fn to_vector(m: &MapSpec, values: &[f64]) -> Vector {
    if m.model.is_grid() {
        Vector::Grid(GridFunction::new(values.to_vec()).unwrap())
    } else {
        sparse(values)
    }
}

/// The first `len` coordinates (or all cells) of `v`.
pub fn dense(v: &Vector, len: usize) -> Vec<f64> {
    match v {
        Vector::Sparse(s) => (1..=len as u64).map(|k| s.get(k)).collect(),
        Vector::Grid(f) => f.values().to_vec(),
    }
}

/// A dense point whose gauge `G^power` is log-uniform in `[0.05, 2]`.
pub fn random_point(kind: GaugeKind, power: u32, sampler: &mut Sampler) -> Vec<f64> {
    let raw: Vec<f64> = (0..DIM).map(|_| sampler.uniform(-1.0, 1.0)).collect();
    let s = f64::from(power) * f64::from(GaugeSpec::of(kind).degree());
    let target = sampler.log_uniform(0.05, 2.0);
    let t = (target / gauge(kind, &raw).powi(power as i32)).powf(1.0 / s);
    raw.iter().map(|v| v * t).collect()
}

/// `max|a - b| / max|b|`.
pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    max_abs(&diff) / max_abs(b)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Root of `10 γ = exp(100 / γ²)` by plain bisection of
/// `ln(10γ) - 100/γ²`, which increases on `(0, ∞)`.
pub fn gamma_ten() -> f64 {
    let f = |g: f64| (10.0 * g).ln() - 100.0 / (g * g);
    let (mut lo, mut hi) = (1.0, 100.0);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
