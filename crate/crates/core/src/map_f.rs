//! The map `F(x) = exp(-1/G(x)) · x`, its derivative and inverses.
//!
//! `F(0) = 0` by the convention `exp(-1/0) = 0`. Away from the origin the
//! derivative is identity-plus-rank-one,
//!
//! ```text
//! J_F(x)h = σ(G) h + w(G) · J_G(x)h · x,   σ(G) = e^{-1/G},  w(G) = e^{-1/G} / G²
//! ```
//!
//! and is inverted in closed form. Both scalar weights extend continuously
//! by 0 at `G = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauges::{gauge_eval, gauge_grad_apply, gauge_gradient, GaugeSpec};
use crate::roots::{bisect_increasing, bracket_upward, Bisection};
use crate::space_models::{dual_norm, strong_norm, SpaceModel};
use crate::vector::Vector;

/// `1/G` above which `e^{1/G}` is reported through [`SolveResult::log_scale`].
pub const LOG_SCALE_THRESHOLD: f64 = 700.0;

/// Bracket doublings allowed in [`f_invert_radial`].
pub const MAX_DOUBLINGS: u32 = 1024;

/// Cap on re-projection passes in the rank-one solve.
const MAX_PROJECTIONS: usize = 16;

/// `σ(G) = exp(-1/G)`, with `σ(0) = 0`.
pub fn sigma(g: f64) -> f64 {
    if g > 0.0 {
        (-1.0 / g).exp()
    } else {
        0.0
    }
}

/// `w(G) = exp(-1/G) / G²`, with `w(0) = 0`.
pub fn rank_one_weight(g: f64) -> f64 {
    if g > 0.0 {
        (-1.0 / g - 2.0 * g.ln()).exp()
    } else {
        0.0
    }
}

/// A counterexample map over a compatible (model, gauge) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSpec {
    pub model: SpaceModel,
    pub gauge: GaugeSpec,
}

impl MapSpec {
    pub fn new(model: SpaceModel, gauge: GaugeSpec) -> Result<Self> {
        gauge.check_compatible(&model)?;
        Ok(Self { model, gauge })
    }

    pub fn gauge_at(&self, x: &Vector) -> Result<f64> {
        gauge_eval(&self.gauge, &self.model, x)
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        strong_norm(&self.model, x)
    }

    /// Effective exponent `s` of the weak norm inside the exponential.
    pub fn s(&self) -> f64 {
        self.gauge.effective_s()
    }
}

/// Solution of `J_F(x) h = y`.
///
/// When `log_scale` is 0 the solution is `h` itself and `residual` is
/// `‖J_F(x)h - y‖`. Otherwise `h = exp(log_scale) · solution` with
/// `solution` of unit norm, and `residual` is the normwise relative
/// backward error of the rescaled system `(I + x ⊗ J_G(x)/G²) · solution =
/// e^{-log_scale + 1/G} y`, since `J_F(x)` itself underflows there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub solution: Vector,
    pub residual: f64,
    pub log_scale: f64,
}

impl SolveResult {
    pub fn is_log_scaled(&self) -> bool {
        self.log_scale != 0.0
    }
}

/// `F(x)`.
pub fn f_eval(m: &MapSpec, x: &Vector) -> Result<Vector> {
    let g = m.gauge_at(x)?;
    Ok(x.scale(sigma(g)))
}

/// `J_F(x) h`; zero at the origin.
pub fn jf_apply(m: &MapSpec, x: &Vector, h: &Vector) -> Result<Vector> {
    let g = m.gauge_at(x)?;
    m.model.check(h)?;
    if x.is_zero() {
        return Ok(h.zero_like());
    }
    let coeff = rank_one_weight(g) * gauge_grad_apply(&m.gauge, &m.model, x, h)?;
    h.scale(sigma(g)).axpy(coeff, x)
}

/// `y - (J_G(x)y / G²) / (1 + J_G(x)x / G²) · x`, evaluated as
/// `r + α/(1+a) · x` where `y = αx + r`, `a = J_G(x)x / G²` and
/// `J_G(x) r = 0`. The split keeps full relative accuracy when `y` is
/// nearly parallel to `x` and `a` is huge.
fn rank_one_bracket(m: &MapSpec, x: &Vector, y: &Vector, g: f64) -> Result<Vector> {
    let pair =
        |v: &Vector| -> Result<f64> { Ok(gauge_grad_apply(&m.gauge, &m.model, x, v)? / g / g) };
    let a = pair(x)?;
    let x_norm = m.norm(x)?;
    let mut alpha = pair(y)? / a;
    let mut rest = y.axpy(-alpha, x)?;
    // Re-project until the x-component left by rounding in `rest` is below
    // rounding relative to the result. For y parallel to x the true result
    // is O(1/a) and each pass only gains a factor of ε.
    for _ in 0..MAX_PROJECTIONS {
        let correction = pair(&rest)? / a;
        if correction == 0.0 {
            break;
        }
        rest = rest.axpy(-correction, x)?;
        alpha += correction;
        let size = m.norm(&rest.axpy(alpha / (1.0 + a), x)?)?;
        if correction.abs() * x_norm <= f64::EPSILON * size {
            break;
        }
    }
    rest.axpy(alpha / (1.0 + a), x)
}

/// Solves `J_F(x) h = y` for `x ≠ 0`:
///
/// `h = e^{1/G} [ y - (J_G(x)y / G²) / (1 + J_G(x)x / G²) · x ]`.
pub fn jf_solve(m: &MapSpec, x: &Vector, y: &Vector) -> Result<SolveResult> {
    let g = m.gauge_at(x)?;
    m.model.check(y)?;
    if x.is_zero() || g <= 0.0 {
        return Err(Error::NotInvertible);
    }
    if y.is_zero() {
        return Ok(SolveResult {
            solution: y.clone(),
            residual: 0.0,
            log_scale: 0.0,
        });
    }
    let bracket = rank_one_bracket(m, x, y, g)?;

    let inv_g = 1.0 / g;
    if inv_g <= LOG_SCALE_THRESHOLD {
        let h = bracket.scale(inv_g.exp());
        let residual = m.norm(&jf_apply(m, x, &h)?.sub(y)?)?;
        return Ok(SolveResult {
            solution: h,
            residual,
            log_scale: 0.0,
        });
    }

    let size = m.norm(&bracket)?;
    let direction = bracket.scale(1.0 / size);
    let target = y.scale(1.0 / size);
    // (I + x ⊗ J_G(x)/G²) d
    let coupling = gauge_grad_apply(&m.gauge, &m.model, x, &direction)? / g / g;
    let image = direction.axpy(coupling, x)?;
    let grad_norm = dual_norm(&m.model, &gauge_gradient(&m.gauge, &m.model, x)?)?;
    let op_norm = 1.0 + m.norm(x)? * grad_norm / g / g;
    let residual = m.norm(&image.sub(&target)?)? / (op_norm + m.norm(&target)?);
    Ok(SolveResult {
        solution: direction,
        residual,
        log_scale: inv_g + size.ln(),
    })
}

/// The unique `x = t·y`, `t > 0`, with `F(x) = y`.
///
/// Solves `ln t - 1/G(t ŷ) = ln ‖y‖` for `ŷ = y/‖y‖` by bisection. The left
/// side is increasing in `t` and negative at `t = ‖y‖`, so the bracket is
/// grown by doubling from there.
pub fn f_invert_radial(m: &MapSpec, y: &Vector) -> Result<Vector> {
    m.gauge_at(y)?;
    if y.is_zero() {
        return Ok(y.clone());
    }
    let size = m.norm(y)?;
    let unit = y.scale(1.0 / size);
    let target = size.ln();
    let profile = |t: f64| -> f64 {
        let g = gauge_eval(&m.gauge, &m.model, &unit.scale(t)).expect("checked representation");
        t.ln() - 1.0 / g - target
    };
    let (lo, hi) = bracket_upward(&profile, size, MAX_DOUBLINGS)?;
    let t = bisect_increasing(&profile, lo, hi, Bisection::default());
    Ok(unit.scale(t))
}
