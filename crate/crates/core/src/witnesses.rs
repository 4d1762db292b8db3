//! Certificates of non-openness, inverse blow-up and regularity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauges::{gauge_eval, weak_norm, FunctionalFamily, GaugeKind, GaugeSpec};
use crate::map_f::{f_eval, f_invert_radial, jf_solve, MapSpec};
use crate::roots::{bisect_increasing, bracket, Bisection};
use crate::sampling::Sampler;
use crate::space_models::{abs_pow, seq_lp_norm, ModelKind, SpaceModel};
use crate::vector::{GridFunction, SparseVector, Vector};

/// Residual tolerance for constructive solves in [`classify_point`].
pub const SOLVE_TOLERANCE: f64 = 1e-9;

/// Unit-norm tolerance on the direction passed to [`certify_no_preimage`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

pub const WITNESS_SCHEMA: &str = "witness/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaRecord {
    pub n: u64,
    pub s: f64,
    pub gamma: f64,
    pub sqrt_n: f64,
    pub satisfied: bool,
    /// `ln n + ln γ - (n/γ)^s` at the returned root.
    pub residual: f64,
}

fn gamma_equation(n: f64, s: f64, gamma: f64) -> f64 {
    n.ln() + gamma.ln() - (n / gamma).powf(s)
}

/// Root `γ` of `n γ = exp(n^s / γ^s)` for each `n`, found by bisection on
/// the increasing function `ln n + ln γ - (n/γ)^s`.
pub fn gamma_sequence(s: f64, n_list: &[u64]) -> Result<Vec<GammaRecord>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!(
            "exponent s must be positive, got {s}"
        )));
    }
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Parameter("n must be a positive integer".into()));
            }
            let nf = n as f64;
            let f = |g: f64| gamma_equation(nf, s, g);
            let (lo, hi) = bracket(&f, nf.sqrt(), 2048)?;
            let gamma = bisect_increasing(&f, lo, hi, Bisection::default());
            let sqrt_n = nf.sqrt();
            Ok(GammaRecord {
                n,
                s,
                gamma,
                sqrt_n,
                satisfied: gamma >= sqrt_n,
                residual: f(gamma).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoPreimageCertificate {
    pub delta: f64,
    pub s: f64,
    pub threshold: f64,
    pub weak_norm_y: f64,
    pub certified: bool,
}

/// `(1 / ln(2/δ))^{1/s}`.
pub fn no_preimage_threshold(delta: f64, s: f64) -> f64 {
    (1.0 / (2.0 / delta).ln()).powf(1.0 / s)
}

/// Tests whether `(δ/2)·y` provably has no preimage in the open unit ball.
///
/// `certified = false` carries no information.
pub fn certify_no_preimage(m: &MapSpec, delta: f64, y: &Vector) -> Result<NoPreimageCertificate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let size = m.norm(y)?;
    if (size - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization(format!(
            "direction must have unit norm, got {size}"
        )));
    }
    let s = m.s();
    let threshold = no_preimage_threshold(delta, s);
    let weak = weak_norm(&m.gauge, &m.model, y)?;
    Ok(NoPreimageCertificate {
        delta,
        s,
        threshold,
        weak_norm_y: weak,
        certified: weak < threshold,
    })
}

/// A certificate together with the norm of the radial preimage of `(δ/2)·y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckedCertificate {
    pub certificate: NoPreimageCertificate,
    pub preimage_norm: f64,
    /// False only if the certificate claims no preimage in the unit ball
    /// while the radial inverse lands inside it.
    pub consistent: bool,
}

pub fn certify_and_invert(m: &MapSpec, delta: f64, y: &Vector) -> Result<CheckedCertificate> {
    let certificate = certify_no_preimage(m, delta, y)?;
    let x = f_invert_radial(m, &y.scale(delta / 2.0))?;
    let preimage_norm = m.norm(&x)?;
    Ok(CheckedCertificate {
        certificate,
        preimage_norm,
        consistent: !certificate.certified || preimage_norm >= 1.0,
    })
}

/// A random unit `y` and a `δ` for which the certificate holds.
///
/// Certification needs `δ > 2 exp(-|||y|||^{-s})`; `δ` is drawn uniformly
/// above that bound.
pub fn sample_certified_case(m: &MapSpec, sampler: &mut Sampler) -> Result<(f64, Vector)> {
    loop {
        let y = sampler.unit_vector(&m.model, crate::sampling::MAX_SUPPORT)?;
        let w = weak_norm(&m.gauge, &m.model, &y)?;
        let lower = 2.0 * (-w.powf(-m.s())).exp();
        if lower >= 1.0 {
            continue;
        }
        let delta = sampler.uniform(lower, 1.0);
        if delta > lower && delta > 0.0 {
            return Ok((delta, y));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PointClass {
    Critical,
    Regular {
        probes: usize,
        max_residual: f64,
        log_scaled: bool,
        verified: bool,
    },
}

impl PointClass {
    pub fn is_critical(&self) -> bool {
        matches!(self, PointClass::Critical)
    }
}

fn probe_targets(m: &MapSpec, x: &Vector) -> Result<Vec<Vector>> {
    let mut probes = Vec::new();
    match x {
        Vector::Sparse(s) => {
            for k in s.indices() {
                probes.push(Vector::Sparse(SparseVector::unit(k)?));
            }
            let outside = s.max_index().unwrap_or(0) + 1;
            probes.push(Vector::Sparse(SparseVector::unit(outside)?));
        }
        Vector::Grid(f) => {
            for i in 0..f.cells() {
                let mut values = vec![0.0; f.cells()];
                values[i] = 1.0;
                let cell = Vector::Grid(GridFunction::new(values)?);
                let n = m.norm(&cell)?;
                probes.push(cell.scale(1.0 / n));
            }
        }
    }
    let n = m.norm(x)?;
    probes.push(x.scale(1.0 / n));
    Ok(probes)
}

/// [`classify_point_with`] at the default solve tolerance.
pub fn classify_point(m: &MapSpec, x: &Vector) -> Result<PointClass> {
    classify_point_with(m, x, SOLVE_TOLERANCE)
}

/// Critical exactly at the origin. Elsewhere `J_F(x)h = y` is solved for
/// unit probes `y` (coordinate or cell directions on the support, one
/// coordinate off it, and `x/‖x‖`) and every residual is checked.
pub fn classify_point_with(m: &MapSpec, x: &Vector, tol: f64) -> Result<PointClass> {
    m.gauge_at(x)?;
    if x.is_zero() {
        return Ok(PointClass::Critical);
    }
    let probes = probe_targets(m, x)?;
    let mut max_residual = 0.0f64;
    let mut log_scaled = false;
    for y in &probes {
        let r = jf_solve(m, x, y)?;
        max_residual = max_residual.max(r.residual);
        log_scaled |= r.is_log_scaled();
    }
    Ok(PointClass::Regular {
        probes: probes.len(),
        max_residual,
        log_scaled,
        verified: max_residual <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub n: u64,
    pub gamma: f64,
    pub sqrt_n: f64,
    pub z_norm: f64,
    pub inv_norm: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceSummary {
    pub rows: usize,
    pub all_satisfied: bool,
    /// Smallest tested `n` from which `γ_n ≥ √n` holds for every later row.
    pub first_satisfied: Option<u64>,
    pub z_norm_decreasing: bool,
    pub inv_norm_increasing: bool,
    /// Largest relative gap between `γ_n` and `‖F⁻¹(z_n)‖`, when the two
    /// coincide by construction.
    pub gamma_agreement: Option<f64>,
    pub max_gamma_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub schema: &'static str,
    pub model: &'static str,
    pub gauge: &'static str,
    pub s: f64,
    pub construction: &'static str,
    pub rows: Vec<DivergenceRow>,
    pub summary: DivergenceSummary,
}

impl WitnessReport {
    /// Rows as CSV with columns `n,gamma,sqrt_n,z_norm,inv_norm,satisfied`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)
                .map_err(|e| Error::Representation(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Representation(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Representation(e.to_string()))
    }
}

/// Unit vectors `y_n` with weak norm shrinking in `n`.
fn divergence_direction(m: &MapSpec, n: u64) -> Result<Vector> {
    match (&m.model.kind, &m.gauge.kind) {
        (ModelKind::L2Weighted, _) => Ok(Vector::Sparse(SparseVector::unit(n * n)?)),
        (ModelKind::LInfDyadic | ModelKind::C0Dyadic | ModelKind::WeakSep { .. }, _) => Ok(
            Vector::Sparse(SparseVector::unit(first_coordinate_below(m, n)?)?),
        ),
        (ModelKind::LpSeq { p }, GaugeKind::LqEven { q }) if (*q as f64) > *p => {
            shortest_spread_below(m, *p, *q as f64, n)
        }
        (ModelKind::LpSeq { p }, GaugeKind::L5Odd) if *p < 5.0 => {
            shortest_spread_below(m, *p, 5.0, n)
        }
        _ => Err(Error::Configuration(format!(
            "no weak-norm-shrinking unit sequence for model {} with gauge {}",
            m.model.id(),
            m.gauge.id()
        ))),
    }
}

/// Smallest `k` with `|||e_k||| ≤ 1/n`; the weak norm of `e_k` is
/// non-increasing in `k` for the dyadic models.
fn first_coordinate_below(m: &MapSpec, n: u64) -> Result<u64> {
    let target = 1.0 / n as f64;
    let below = |k: u64| -> Result<bool> {
        let e = Vector::Sparse(SparseVector::unit(k)?);
        Ok(weak_norm(&m.gauge, &m.model, &e)? <= target)
    };
    let mut hi = 1u64;
    while !below(hi)? {
        if hi > 1 << 16 {
            return Err(Error::NumericalRange(format!(
                "no coordinate with weak norm below 1/{n}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(hi);
    }
    // below(lo) is false, below(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Longest flat vector accepted by [`shortest_spread_below`].
pub const MAX_SPREAD: u64 = 1 << 20;

/// `len^{-1/p} (e_1 + ... + e_len)`, of unit `ℓ^p` norm and `ℓ^q` norm
/// `len^{1/q - 1/p}`.
fn spread_vector(p: f64, len: u64) -> Vector {
    let c = (len as f64).powf(-1.0 / p);
    let entries: Vec<(u64, f64)> = (1..=len).map(|k| (k, c)).collect();
    Vector::Sparse(SparseVector::from_entries(entries).expect("valid indices"))
}

/// The shortest flat unit vector with weak norm at most `1/n`.
fn shortest_spread_below(m: &MapSpec, p: f64, q: f64, n: u64) -> Result<Vector> {
    let guess = (n as f64).powf(p * q / (q - p)) * (1.0 - 1e-9);
    if guess.is_nan() || guess >= MAX_SPREAD as f64 {
        return Err(Error::Configuration(format!(
            "n = {n} needs a flat vector longer than {MAX_SPREAD} entries"
        )));
    }
    let mut len = (guess.ceil() as u64).max(1);
    loop {
        let y = spread_vector(p, len);
        if weak_norm(&m.gauge, &m.model, &y)? <= 1.0 / n as f64 {
            return Ok(y);
        }
        len += 1;
        if len > MAX_SPREAD {
            return Err(Error::Configuration(format!(
                "n = {n} needs a flat vector longer than {MAX_SPREAD} entries"
            )));
        }
    }
}

fn construction_name(m: &MapSpec) -> &'static str {
    match m.model.kind {
        ModelKind::L2Weighted => "y_n = e_{n^2}",
        ModelKind::LpSeq { .. } => {
            "y_n = L^{-1/p} (e_1 + ... + e_L), L minimal with |||y_n||| <= 1/n"
        }
        _ => "y_n = e_k, k minimal with |||e_k||| <= 1/n",
    }
}

/// `z_n = y_n / n` for unit `y_n` of shrinking weak norm, together with
/// `‖F⁻¹(z_n)‖` and the scalar sequence `γ_n`.
///
/// In the weighted `ℓ²` model `|||y_n||| = 1/n` exactly, so the radial
/// preimage has norm `γ_n` and the two are compared.
pub fn divergence_report(m: &MapSpec, n_list: &[u64]) -> Result<WitnessReport> {
    if n_list.is_empty() {
        return Err(Error::Configuration("empty range of n".into()));
    }
    let s = m.s();
    let gammas = gamma_sequence(s, n_list)?;
    let exact = matches!(m.model.kind, ModelKind::L2Weighted);
    let mut rows = Vec::with_capacity(n_list.len());
    let mut agreement = 0.0f64;
    for rec in &gammas {
        let y = divergence_direction(m, rec.n)?;
        let z = y.scale(1.0 / rec.n as f64);
        let z_norm = m.norm(&z)?;
        let inv_norm = m.norm(&f_invert_radial(m, &z)?)?;
        if exact {
            agreement = agreement.max((inv_norm - rec.gamma).abs() / rec.gamma);
        }
        rows.push(DivergenceRow {
            n: rec.n,
            gamma: rec.gamma,
            sqrt_n: rec.sqrt_n,
            z_norm,
            inv_norm,
            satisfied: rec.satisfied,
        });
    }
    let first_satisfied = rows
        .iter()
        .rposition(|r| !r.satisfied)
        .map_or(Some(0), |i| Some(i + 1))
        .and_then(|i| rows.get(i).map(|r| r.n));
    let summary = DivergenceSummary {
        rows: rows.len(),
        all_satisfied: rows.iter().all(|r| r.satisfied),
        first_satisfied,
        z_norm_decreasing: rows.windows(2).all(|w| w[1].z_norm < w[0].z_norm),
        inv_norm_increasing: rows.windows(2).all(|w| w[1].inv_norm > w[0].inv_norm),
        gamma_agreement: exact.then_some(agreement),
        max_gamma_residual: gammas.iter().map(|g| g.residual).fold(0.0, f64::max),
    };
    Ok(WitnessReport {
        schema: WITNESS_SCHEMA,
        model: m.model.id(),
        gauge: m.gauge.id(),
        s,
        construction: construction_name(m),
        rows,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeaksepWitness {
    pub q: u64,
    pub vector: SparseVector,
    pub weak_norm: f64,
    pub bound: f64,
}

/// A unit vector annihilated by `l_1, ..., l_q`, its weak norm, and the
/// bound `‖x_q‖ / 2^{q/2}`.
pub fn weaksep_witness(fam: &FunctionalFamily, q: u64) -> Result<WeaksepWitness> {
    if q == 0 {
        return Err(Error::Parameter("q must be a positive integer".into()));
    }
    let x = fam.annihilated_vector(q);
    let model = SpaceModel::weaksep(fam.id);
    let gauge = GaugeSpec::weaksep(fam.id);
    let v = Vector::Sparse(x.clone());
    let w = weak_norm(&gauge, &model, &v)?;
    let size = crate::space_models::strong_norm(&model, &v)?;
    Ok(WeaksepWitness {
        q,
        vector: x,
        weak_norm: w,
        bound: size * (-(q as f64) / 2.0).exp2(),
    })
}

/// Split of `‖x+h‖₅⁵ - ‖x‖₅⁵` into its linear part and two remainders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Q5Remainders {
    /// `Σ 5|x_k| x_k³ h_k`.
    pub main: f64,
    pub a: f64,
    pub b: f64,
    pub bound_a: f64,
    pub bound_b: f64,
    /// `‖x+h‖₅⁵ - ‖x‖₅⁵` summed coordinatewise.
    pub increment: f64,
}

impl Q5Remainders {
    pub fn bounds_hold(&self) -> bool {
        self.a.abs() <= self.bound_a && self.b.abs() <= self.bound_b
    }

    /// `|main + A + B - increment|` relative to `‖x+h‖₅⁵ + ‖x‖₅⁵`.
    pub fn reconstruction_error(&self, scale: f64) -> f64 {
        let gap = (self.main + self.a + self.b - self.increment).abs();
        if scale == 0.0 {
            gap
        } else {
            gap / scale
        }
    }
}

/// `5 ∫ (σu - |a|) u³ du` between `u0` and `u1` on a piece of constant sign `σ`.
fn b_piece(a_abs: f64, sign: f64, u0: f64, u1: f64) -> f64 {
    let prim = |u: f64| sign * u.powi(5) - 1.25 * a_abs * u.powi(4);
    prim(u1) - prim(u0)
}

/// With `u = x_k + t h_k`, `d/dt |u|⁵ = 5|x_k| u³ h_k + 5(|u| - |x_k|) u³ h_k`.
/// Integrating over `t ∈ [0, 1]`, the first part gives the main term plus
/// `A`; the second gives `B`, split where `u` changes sign.
pub fn remainder_bounds_q5(x: &SparseVector, h: &SparseVector) -> Q5Remainders {
    let (mut main, mut a_sum, mut b_sum, mut inc) = (0.0, 0.0, 0.0, 0.0);
    for k in x.support_union(h) {
        let (a, b) = (x.get(k), h.get(k));
        let aa = a.abs();
        main += 5.0 * aa * a.powi(3) * b;
        a_sum += 5.0 * aa * (1.5 * a * a * b * b + a * b.powi(3) + 0.25 * b.powi(4));
        let end = a + b;
        b_sum += if a * end < 0.0 {
            b_piece(aa, a.signum(), a, 0.0) + b_piece(aa, end.signum(), 0.0, end)
        } else {
            let sign = if a != 0.0 { a.signum() } else { end.signum() };
            b_piece(aa, sign, a, end)
        };
        inc += abs_pow(end, 5.0) - abs_pow(a, 5.0);
    }
    let nx = seq_lp_norm(x, 5.0);
    let nh = seq_lp_norm(h, 5.0);
    Q5Remainders {
        main,
        a: a_sum,
        b: b_sum,
        bound_a: 5.0
            * (3.0 * nx.powi(3) * nh.powi(2) + 3.0 * nx.powi(2) * nh.powi(3) + nx * nh.powi(4)),
        bound_b: 5.0 * (nx + nh).powi(3) * nh.powi(2),
        increment: inc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub radius: f64,
    /// `‖F(h)‖ / ‖h‖` as computed; underflows to 0 for small radii.
    pub ratio: f64,
    /// `-1/G(h)`, the logarithm of the ratio.
    pub log_ratio: f64,
    /// `-1/(C r)^s`.
    pub log_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
    pub all_hold: bool,
    /// Log ratio strictly decreasing and computed ratio non-increasing as
    /// the radius shrinks.
    pub monotone: bool,
}

/// Relative rounding allowance in [`origin_decay_profile`].
pub const DECAY_SLACK: f64 = 64.0 * f64::EPSILON;

/// Radii `10^{-1}, ..., 10^{-6}`.
pub fn decay_radii() -> Vec<f64> {
    (1..=6).map(|i| 10f64.powi(-i)).collect()
}

/// `‖F(h)‖/‖h‖` against `exp(-1/(C‖h‖)^s)` along `h = r·dir`, radii in
/// decreasing order.
pub fn origin_decay_profile(
    m: &MapSpec,
    direction: &Vector,
    radii: &[f64],
) -> Result<DecayProfile> {
    let size = m.norm(direction)?;
    if size == 0.0 {
        return Err(Error::Precondition("direction must be nonzero".into()));
    }
    let unit = direction.scale(1.0 / size);
    let c = m.model.comparison_constant;
    let s = m.s();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let h = unit.scale(r);
        let hn = m.norm(&h)?;
        let ratio = m.norm(&f_eval(m, &h)?)? / hn;
        let log_ratio = -1.0 / gauge_eval(&m.gauge, &m.model, &h)?;
        let log_bound = -1.0 / (c * hn).powf(s);
        // equality holds when the weak norm of h equals its norm
        let slack = DECAY_SLACK * log_bound.abs();
        rows.push(DecayRow {
            radius: r,
            ratio,
            log_ratio,
            log_bound,
            holds: log_ratio <= log_bound + slack
                && ratio <= (log_bound + slack).exp() * (1.0 + DECAY_SLACK),
        });
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].log_ratio < w[0].log_ratio && w[1].ratio <= w[0].ratio);
    Ok(DecayProfile {
        all_hold: rows.iter().all(|r| r.holds),
        monotone,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::FamilyId;

    fn e(k: u64) -> Vector {
        Vector::Sparse(SparseVector::unit(k).unwrap())
    }

    fn l2() -> MapSpec {
        MapSpec::new(SpaceModel::l2_weighted(), GaugeSpec::weighted_l2()).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let r = gamma_sequence(2.0, &[1, 2, 10]).unwrap();
        assert!((r[0].gamma - 1.53).abs() < 0.005);
        assert!((r[1].gamma - 1.78).abs() < 0.005);
        assert!((r[2].gamma - 5.05).abs() < 0.005);
        assert!((r[2].sqrt_n - 10f64.sqrt()).abs() < 1e-15);
        assert!(r.iter().all(|g| g.satisfied && g.residual <= 1e-9));
    }

    #[test]
    fn gamma_rejects_bad_input() {
        assert!(matches!(
            gamma_sequence(0.0, &[1]),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            gamma_sequence(2.0, &[0]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn certificate_examples() {
        let m = l2();
        let c = certify_no_preimage(&m, 2.0 / std::f64::consts::E, &e(1)).unwrap();
        assert!((c.threshold - 1.0).abs() < 1e-15);
        assert!(!c.certified);

        let c = certify_no_preimage(&m, 0.2, &e(100)).unwrap();
        assert!((c.threshold - 0.6591).abs() < 1e-4);
        assert!((c.weak_norm_y - 0.1).abs() < 1e-15);
        assert!(c.certified);

        assert!(!certify_no_preimage(&m, 0.2, &e(1)).unwrap().certified);
        assert!(matches!(
            certify_no_preimage(&m, 1.5, &e(1)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            certify_no_preimage(&m, 0.2, &e(1).scale(2.0)),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn certified_case_has_no_preimage_in_ball() {
        let c = certify_and_invert(&l2(), 0.2, &e(100)).unwrap();
        assert!(c.preimage_norm >= 1.0 && c.consistent);
    }

    #[test]
    fn classification_examples() {
        let m = l2();
        assert!(classify_point(&m, &Vector::Sparse(SparseVector::zero()))
            .unwrap()
            .is_critical());
        match classify_point(&m, &e(1)).unwrap() {
            PointClass::Regular {
                verified,
                log_scaled,
                ..
            } => assert!(verified && !log_scaled),
            PointClass::Critical => panic!("e1 is regular"),
        }
        match classify_point(&m, &e(1).scale(1e-8)).unwrap() {
            PointClass::Regular {
                verified,
                log_scaled,
                ..
            } => assert!(verified && log_scaled),
            PointClass::Critical => panic!("nonzero point"),
        }
    }

    #[test]
    fn divergence_examples() {
        let r = divergence_report(&l2(), &[1, 10, 100]).unwrap();
        assert_eq!(r.schema, "witness/1");
        assert!((r.rows[0].z_norm - 1.0).abs() < 1e-15);
        assert!((r.rows[0].inv_norm - 1.53).abs() < 0.005);
        assert!((r.rows[1].z_norm - 0.1).abs() < 1e-15);
        assert!((r.rows[1].inv_norm - 5.05).abs() < 0.005);
        assert!(r.summary.gamma_agreement.unwrap() <= 1e-8);
        assert!(r.summary.z_norm_decreasing && r.summary.inv_norm_increasing);
        assert_eq!(r.summary.first_satisfied, Some(1));
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("n,gamma,sqrt_n,z_norm,inv_norm,satisfied\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn divergence_other_models() {
        let d = MapSpec::new(SpaceModel::c0_dyadic(), GaugeSpec::dyadic()).unwrap();
        let r = divergence_report(&d, &[1, 2, 5, 20]).unwrap();
        // |||y_n||| <= 1/n, so the preimage is at least as far out as γ_n
        assert!(r.summary.z_norm_decreasing && r.summary.gamma_agreement.is_none());
        assert!(r
            .rows
            .iter()
            .all(|row| row.inv_norm >= row.gamma * (1.0 - 1e-12)));
        let q = MapSpec::new(
            SpaceModel::lp_seq(2.0).unwrap(),
            GaugeSpec::lq_even(4).unwrap(),
        )
        .unwrap();
        let r = divergence_report(&q, &[1, 2, 5, 20]).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.inv_norm >= row.gamma * (1.0 - 1e-12)));
        assert!(matches!(
            divergence_report(&q, &[40]),
            Err(Error::Configuration(_))
        ));
        let g = MapSpec::new(
            SpaceModel::lp_grid(2.0, 8).unwrap(),
            GaugeSpec::grid_square(),
        )
        .unwrap();
        assert!(matches!(
            divergence_report(&g, &[1]),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            divergence_report(&l2(), &[]),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn weaksep_witness_examples() {
        let fam = FunctionalFamily::coordinate();
        let w = weaksep_witness(&fam, 3).unwrap();
        assert_eq!(w.vector, SparseVector::unit(4).unwrap());
        assert_eq!(w.weak_norm, 0.25);
        assert!((w.bound - 0.3536).abs() < 1e-4);
        let w = weaksep_witness(&fam, 1).unwrap();
        assert_eq!(w.weak_norm, 0.5);
        assert!((w.bound - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let w = weaksep_witness(&fam, 50).unwrap();
        assert!(w.weak_norm <= w.bound);
        let w = weaksep_witness(&FunctionalFamily::new(FamilyId::HalfDifference), 7).unwrap();
        assert!(w.weak_norm <= w.bound);
    }

    #[test]
    fn q5_examples() {
        let z = SparseVector::zero();
        let x = SparseVector::unit(1).unwrap();
        let r = remainder_bounds_q5(&x, &z);
        assert_eq!((r.a, r.b, r.bound_a, r.bound_b), (0.0, 0.0, 0.0, 0.0));

        let r = remainder_bounds_q5(&x, &SparseVector::unit(2).unwrap());
        assert_eq!(r.a, 0.0);
        assert_eq!(r.b, 1.0);
        assert!(r.bound_a > 0.0 && r.bound_b > 0.0 && r.bounds_hold());

        let h = x.scale(0.1);
        let r = remainder_bounds_q5(&x, &h);
        // (1.1)^5 - 1 = 0.5 + 0.1 + 0.01 + 0.0005 + 0.00001
        assert!((r.increment - 0.61051).abs() < 1e-14);
        assert!((r.main - 0.5).abs() < 1e-15);
        assert!(r.bounds_hold());
        assert!(r.reconstruction_error(1.0) < 1e-14);
    }

    #[test]
    fn q5_sign_change() {
        let x = SparseVector::from_entries([(1, 0.3), (2, -0.7)]).unwrap();
        let h = SparseVector::from_entries([(1, -0.9), (2, 0.2), (3, 0.5)]).unwrap();
        let r = remainder_bounds_q5(&x, &h);
        assert!(r.reconstruction_error(1.0) < 1e-14);
        assert!(r.bounds_hold());
    }

    #[test]
    fn decay_profile_at_equality() {
        // a single coordinate has |||h||| = ‖h‖ in lp with the lq gauge
        let m = MapSpec::new(
            SpaceModel::lp_seq(2.0).unwrap(),
            GaugeSpec::lq_even(4).unwrap(),
        )
        .unwrap();
        let p = origin_decay_profile(&m, &e(5), &decay_radii()).unwrap();
        assert!(p.all_hold && p.monotone);
    }

    #[test]
    fn decay_profile_l2() {
        let p = origin_decay_profile(&l2(), &e(3), &decay_radii()).unwrap();
        assert!(p.all_hold && p.monotone);
        assert_eq!(p.rows.len(), 6);
    }
}
