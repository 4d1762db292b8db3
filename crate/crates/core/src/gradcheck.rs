//! Central-difference checks of the analytic derivatives.
//!
//! Each sample reports the relative error at the working step
//! `ε = step · max(1, ‖x‖)` and the ratio of errors at the two window
//! steps. A second-order scheme gives a ratio near 100.

use serde::Serialize;

use crate::error::Result;
use crate::gauges::{gauge_eval, gauge_grad_apply, gauge_gradient};
use crate::map_f::{f_eval, jf_apply, MapSpec};
use crate::sampling::{scale_to_gauge, Sampler, MAX_SUPPORT};
use crate::space_models::dual_norm;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdPolicy {
    pub step: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
    pub tolerance: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

impl Default for FdPolicy {
    fn default() -> Self {
        Self {
            step: 1e-6,
            coarse_step: 1e-4,
            fine_step: 1e-5,
            tolerance: 1e-6,
            ratio_min: 50.0,
            ratio_max: 200.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSample {
    pub index: usize,
    pub rel_error: f64,
    pub coarse_error: f64,
    pub fine_error: f64,
    /// `coarse_error / fine_error`, or `None` when the check is skipped.
    pub ratio: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSuite {
    pub target: &'static str,
    pub model: &'static str,
    pub gauge: &'static str,
    pub max_rel_error: f64,
    pub ratio_checks: usize,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub failures: usize,
    pub samples: Vec<FdSample>,
}

impl FdSuite {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn assemble(target: &'static str, m: &MapSpec, samples: Vec<FdSample>) -> Self {
        let ratios: Vec<f64> = samples.iter().filter_map(|s| s.ratio).collect();
        Self {
            target,
            model: m.model.id(),
            gauge: m.gauge.id(),
            max_rel_error: samples.iter().map(|s| s.rel_error).fold(0.0, f64::max),
            ratio_checks: ratios.len(),
            min_ratio: ratios.iter().copied().reduce(f64::min),
            max_ratio: ratios.iter().copied().reduce(f64::max),
            failures: samples.iter().filter(|s| !s.passed).count(),
            samples,
        }
    }
}

/// Range of `G(x)` at sampled points.
pub const GAUGE_RANGE: (f64, f64) = (0.05, 0.25);

/// Random points with `G(x)` log-uniform in [`GAUGE_RANGE`] and unit
/// directions on the same support, anchored at the lowest index.
///
/// Third derivatives of `e^{-1/G}` grow like `G^{-6}`, so in this range the
/// truncation error at the fine window step stays well above rounding.
pub fn sample_pairs(
    m: &MapSpec,
    sampler: &mut Sampler,
    count: usize,
) -> Result<Vec<(Vector, Vector)>> {
    (0..count)
        .map(|_| {
            let raw = sampler.anchored_vector(&m.model, MAX_SUPPORT);
            let target = sampler.log_uniform(GAUGE_RANGE.0, GAUGE_RANGE.1);
            let x = scale_to_gauge(&m.gauge, &m.model, &raw, target)?;
            let h = sampler.anchored_direction_like(&m.model, &x)?;
            Ok((x, h))
        })
        .collect()
}

/// Norm range of points in [`gauge_sample_pairs`].
pub const GAUGE_NORM_RANGE: (f64, f64) = (0.02, 0.2);

/// Points with strong norm log-uniform in [`GAUGE_NORM_RANGE`] and anchored
/// unit directions on the same support.
///
/// For a homogeneous polynomial gauge the relative truncation error at a
/// fixed step falls like `‖x‖^{-2}` while rounding grows like `‖x‖`, so
/// small points keep the convergence window above the rounding floor.
pub fn gauge_sample_pairs(
    m: &MapSpec,
    sampler: &mut Sampler,
    count: usize,
) -> Result<Vec<(Vector, Vector)>> {
    (0..count)
        .map(|_| {
            let raw = sampler.anchored_vector(&m.model, MAX_SUPPORT);
            let r = sampler.log_uniform(GAUGE_NORM_RANGE.0, GAUGE_NORM_RANGE.1);
            let x = raw.scale(r / m.norm(&raw)?);
            let h = sampler.anchored_direction_like(&m.model, &x)?;
            Ok((x, h))
        })
        .collect()
}

fn finish(
    policy: &FdPolicy,
    index: usize,
    rel_error: f64,
    coarse: f64,
    fine: f64,
    check_ratio: bool,
) -> FdSample {
    let ratio = check_ratio.then(|| if fine > 0.0 { coarse / fine } else { f64::MAX });
    let ratio_ok = ratio.is_none_or(|r| r >= policy.ratio_min && r <= policy.ratio_max);
    FdSample {
        index,
        rel_error,
        coarse_error: coarse,
        fine_error: fine,
        ratio,
        passed: rel_error <= policy.tolerance && ratio_ok,
    }
}

fn gauge_fd(m: &MapSpec, x: &Vector, h: &Vector, eps: f64) -> Result<f64> {
    let plus = gauge_eval(&m.gauge, &m.model, &x.axpy(eps, h)?)?;
    let minus = gauge_eval(&m.gauge, &m.model, &x.axpy(-eps, h)?)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// Checks `gauge_grad_apply` against central differences of `gauge_eval`.
///
/// Errors are measured against `max(|J_G(x)h|, ‖∇G(x)‖_* ‖h‖)`, so a
/// direction nearly orthogonal to the gradient is not penalized. The
/// convergence ratio is skipped for plain quadratic gauges, whose central
/// difference is exact up to rounding.
pub fn check_gauge(m: &MapSpec, pairs: &[(Vector, Vector)], policy: &FdPolicy) -> Result<FdSuite> {
    let check_ratio = !m.gauge.is_quadratic();
    let samples = pairs
        .iter()
        .enumerate()
        .map(|(i, (x, h))| {
            let exact = gauge_grad_apply(&m.gauge, &m.model, x, h)?;
            let grad = dual_norm(&m.model, &gauge_gradient(&m.gauge, &m.model, x)?)?;
            let scale = exact.abs().max(grad * m.norm(h)?);
            let size = m.norm(x)?.max(1.0);
            let err = |step: f64| -> Result<f64> {
                Ok((gauge_fd(m, x, h, step * size)? - exact).abs() / scale)
            };
            Ok(finish(
                policy,
                i,
                err(policy.step)?,
                err(policy.coarse_step)?,
                err(policy.fine_step)?,
                check_ratio,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdSuite::assemble("gauge", m, samples))
}

fn map_fd(m: &MapSpec, x: &Vector, h: &Vector, eps: f64) -> Result<Vector> {
    let plus = f_eval(m, &x.axpy(eps, h)?)?;
    let minus = f_eval(m, &x.axpy(-eps, h)?)?;
    Ok(plus.sub(&minus)?.scale(0.5 / eps))
}

/// Checks `jf_apply` against central differences of `f_eval`, with errors
/// relative to `‖J_F(x)h‖`.
pub fn check_map(m: &MapSpec, pairs: &[(Vector, Vector)], policy: &FdPolicy) -> Result<FdSuite> {
    let samples = pairs
        .iter()
        .enumerate()
        .map(|(i, (x, h))| {
            let exact = jf_apply(m, x, h)?;
            let scale = m.norm(&exact)?;
            let size = m.norm(x)?.max(1.0);
            let err = |step: f64| -> Result<f64> {
                let fd = map_fd(m, x, h, step * size)?;
                Ok(m.norm(&fd.sub(&exact)?)? / scale)
            };
            Ok(finish(
                policy,
                i,
                err(policy.step)?,
                err(policy.coarse_step)?,
                err(policy.fine_step)?,
                true,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdSuite::assemble("map", m, samples))
}
