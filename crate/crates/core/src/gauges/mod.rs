//! Gauge functionals `G` and their derivatives.
//!
//! A gauge is the already-exponentiated weak norm that feeds the map
//! `F(x) = exp(-1/G(x)) x`: `|||x|||²` for the weighted quadratic gauges,
//! `‖x‖_q^q` for the power gauges. An optional integer `power` `m` turns `G`
//! into `G^m`, so the effective exponent of the weak norm is
//! `s = degree · m`.

pub mod family;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space_models::{grid_lp_norm, ipow, seq_lp_norm, strong_norm, ModelKind, SpaceModel};
use crate::vector::{GridFunction, SparseVector, Vector};

pub use family::{FamilyId, FunctionalFamily, NormCertificate};

/// `2^{-k}` for a 1-based index; underflows to 0 past `k ≈ 1074`.
fn dyadic(k: u64) -> f64 {
    (-(k as f64)).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gauge", rename_all = "snake_case")]
pub enum GaugeKind {
    /// `Σ x_k² / k` on `ℓ²`.
    WeightedL2,
    /// `Σ x_k² / 2^k` on `ℓ^∞` or `c_0`.
    Dyadic,
    /// `Σ x_k^q` for even `q` on `ℓ^p`, `p ≤ q`.
    LqEven { q: u32 },
    /// `Σ |x_k|^5` on `ℓ^p`, `p ≤ 5`.
    L5Odd,
    /// `∫ f² dP` on grid `L^p`, `p ≥ 2`.
    GridSquare,
    /// `Σ l_k(x)² / 2^k` for a separating family.
    #[serde(rename = "weaksep")]
    WeakSepDyadic { family: FamilyId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeSpec {
    #[serde(flatten)]
    pub kind: GaugeKind,
    #[serde(default = "unit_power")]
    pub power: u32,
}

fn unit_power() -> u32 {
    1
}

impl GaugeSpec {
    pub fn new(kind: GaugeKind, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(Error::Configuration("gauge power must be ≥ 1".into()));
        }
        if let GaugeKind::LqEven { q } = kind {
            if q < 2 || q % 2 != 0 {
                return Err(Error::Configuration(format!(
                    "lq_even needs an even q ≥ 2, got {q}"
                )));
            }
        }
        Ok(Self { kind, power })
    }

    pub fn of(kind: GaugeKind) -> Self {
        Self::new(kind, 1).expect("power 1 with a valid kind")
    }

    pub fn weighted_l2() -> Self {
        Self::of(GaugeKind::WeightedL2)
    }

    pub fn dyadic() -> Self {
        Self::of(GaugeKind::Dyadic)
    }

    pub fn lq_even(q: u32) -> Result<Self> {
        Self::new(GaugeKind::LqEven { q }, 1)
    }

    pub fn l5_odd() -> Self {
        Self::of(GaugeKind::L5Odd)
    }

    pub fn grid_square() -> Self {
        Self::of(GaugeKind::GridSquare)
    }

    pub fn weaksep(family: FamilyId) -> Self {
        Self::of(GaugeKind::WeakSepDyadic { family })
    }

    pub fn with_power(self, power: u32) -> Result<Self> {
        Self::new(self.kind, power)
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            GaugeKind::WeightedL2 => "weighted_l2",
            GaugeKind::Dyadic => "dyadic",
            GaugeKind::LqEven { .. } => "lq_even",
            GaugeKind::L5Odd => "l5_odd",
            GaugeKind::GridSquare => "grid_square",
            GaugeKind::WeakSepDyadic { .. } => "weaksep",
        }
    }

    /// Homogeneity degree of the base gauge: `G(tx) = |t|^degree G(x)`.
    pub fn degree(&self) -> u32 {
        match self.kind {
            GaugeKind::LqEven { q } => q,
            GaugeKind::L5Odd => 5,
            _ => 2,
        }
    }

    /// Exponent `s` with `G^power = |||·|||^s`.
    pub fn effective_s(&self) -> f64 {
        f64::from(self.degree() * self.power)
    }

    /// Quadratic gauges have `J_G(x)h = 2⟨x, h⟩` for a weighted pairing.
    pub fn is_quadratic(&self) -> bool {
        self.degree() == 2 && self.power == 1
    }

    pub fn family(&self) -> Option<FunctionalFamily> {
        match self.kind {
            GaugeKind::WeakSepDyadic { family } => Some(FunctionalFamily::new(family)),
            GaugeKind::Dyadic => Some(FunctionalFamily::coordinate()),
            _ => None,
        }
    }

    /// Rejects gauge/model pairs outside the supported matrix.
    pub fn check_compatible(&self, model: &SpaceModel) -> Result<()> {
        let ok = match (self.kind, model.kind) {
            (GaugeKind::WeightedL2, ModelKind::L2Weighted) => true,
            (GaugeKind::Dyadic, ModelKind::LInfDyadic | ModelKind::C0Dyadic) => true,
            (GaugeKind::LqEven { q }, ModelKind::LpSeq { p }) => {
                if f64::from(q) < p {
                    return Err(Error::Configuration(format!(
                        "lq_even needs q ≥ p, got q = {q}, p = {p}"
                    )));
                }
                true
            }
            (GaugeKind::L5Odd, ModelKind::LpSeq { p }) => {
                if p > 5.0 {
                    return Err(Error::Configuration(format!(
                        "l5_odd needs p ≤ 5, got p = {p}"
                    )));
                }
                true
            }
            (GaugeKind::GridSquare, ModelKind::LpGrid { p, .. }) => {
                if p < 2.0 {
                    return Err(Error::Configuration(format!(
                        "grid_square needs p ≥ 2, got p = {p}"
                    )));
                }
                true
            }
            (GaugeKind::WeakSepDyadic { family }, ModelKind::WeakSep { family: f }) => family == f,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration(format!(
                "gauge {} is not defined on model {}",
                self.id(),
                model.id()
            )))
        }
    }

    fn check(&self, model: &SpaceModel, x: &Vector) -> Result<()> {
        self.check_compatible(model)?;
        model.check(x)
    }
}

/// Sum of `w(k) a_k b_k` over the common support, in increasing index order.
fn weighted_pairing(a: &SparseVector, b: &SparseVector, weight: impl Fn(u64) -> f64) -> f64 {
    let (a, b) = (a.entries(), b.entries());
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += (a[i].1 * b[j].1) * weight(a[i].0);
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

fn base_eval(g: &GaugeSpec, x: &Vector) -> f64 {
    match (g.kind, x) {
        (GaugeKind::GridSquare, Vector::Grid(f)) => {
            f.cell_mass() * f.values().iter().map(|v| v * v).sum::<f64>()
        }
        (kind, Vector::Sparse(x)) => match kind {
            GaugeKind::WeightedL2 => x.iter().map(|(k, v)| v * v / k as f64).sum(),
            GaugeKind::Dyadic => x.iter().map(|(k, v)| v * v * dyadic(k)).sum(),
            GaugeKind::LqEven { q } => x.iter().map(|(_, v)| ipow(v, q)).sum(),
            GaugeKind::L5Odd => x.iter().map(|(_, v)| ipow(v.abs(), 5)).sum(),
            GaugeKind::WeakSepDyadic { family } => FunctionalFamily::new(family)
                .apply(x)
                .iter()
                .map(|(k, l)| l * l * dyadic(k))
                .sum(),
            GaugeKind::GridSquare => unreachable!("checked representation"),
        },
        _ => unreachable!("checked representation"),
    }
}

fn base_grad_apply(g: &GaugeSpec, x: &Vector, h: &Vector) -> f64 {
    match (g.kind, x, h) {
        (GaugeKind::GridSquare, Vector::Grid(f), Vector::Grid(h)) => {
            let dot: f64 = f.values().iter().zip(h.values()).map(|(a, b)| a * b).sum();
            2.0 * f.cell_mass() * dot
        }
        (kind, Vector::Sparse(x), Vector::Sparse(h)) => match kind {
            GaugeKind::WeightedL2 => weighted_pairing(x, h, |k| 2.0 / k as f64),
            GaugeKind::Dyadic => weighted_pairing(x, h, |k| 2.0 * dyadic(k)),
            GaugeKind::LqEven { q } => {
                let powered = SparseVector::from_sorted_unchecked(
                    x.iter().map(|(k, v)| (k, ipow(v, q - 1))).collect(),
                );
                f64::from(q) * weighted_pairing(&powered, h, |_| 1.0)
            }
            GaugeKind::L5Odd => {
                // d/dt |t|^5 = 5|t|t³
                let powered = SparseVector::from_sorted_unchecked(
                    x.iter().map(|(k, v)| (k, v.abs() * ipow(v, 3))).collect(),
                );
                5.0 * weighted_pairing(&powered, h, |_| 1.0)
            }
            GaugeKind::WeakSepDyadic { family } => {
                let fam = FunctionalFamily::new(family);
                weighted_pairing(&fam.apply(x), &fam.apply(h), |k| 2.0 * dyadic(k))
            }
            GaugeKind::GridSquare => unreachable!("checked representation"),
        },
        _ => unreachable!("checked representation"),
    }
}

/// Coefficient vector `c` of `J_G(x)`, paired with `h` as in
/// [`crate::space_models::dual_norm`].
fn base_gradient(g: &GaugeSpec, x: &Vector) -> Vector {
    match (g.kind, x) {
        (GaugeKind::GridSquare, Vector::Grid(f)) => Vector::Grid(f.scale(2.0)),
        (kind, Vector::Sparse(x)) => {
            let coeff = |f: &dyn Fn(u64, f64) -> f64| {
                SparseVector::from_sorted_unchecked(x.iter().map(|(k, v)| (k, f(k, v))).collect())
            };
            Vector::Sparse(match kind {
                GaugeKind::WeightedL2 => coeff(&|k, v| 2.0 * v / k as f64),
                GaugeKind::Dyadic => coeff(&|k, v| 2.0 * v * dyadic(k)),
                GaugeKind::LqEven { q } => coeff(&|_, v| f64::from(q) * ipow(v, q - 1)),
                GaugeKind::L5Odd => coeff(&|_, v| 5.0 * v.abs() * ipow(v, 3)),
                GaugeKind::WeakSepDyadic { family } => {
                    let fam = FunctionalFamily::new(family);
                    let weighted = SparseVector::from_sorted_unchecked(
                        fam.apply(x)
                            .iter()
                            .map(|(k, l)| (k, 2.0 * l * dyadic(k)))
                            .collect(),
                    );
                    fam.adjoint(&weighted)
                }
                GaugeKind::GridSquare => unreachable!("checked representation"),
            })
        }
        _ => unreachable!("checked representation"),
    }
}

/// `G(x)^power`, exact on finite support.
pub fn gauge_eval(g: &GaugeSpec, model: &SpaceModel, x: &Vector) -> Result<f64> {
    g.check(model, x)?;
    Ok(ipow(base_eval(g, x), g.power))
}

/// The weak norm `|||x||| = G_base(x)^{1/degree}`.
pub fn weak_norm(g: &GaugeSpec, model: &SpaceModel, x: &Vector) -> Result<f64> {
    g.check(model, x)?;
    let base = base_eval(g, x);
    Ok(match g.degree() {
        2 => base.sqrt(),
        d => base.powf(1.0 / f64::from(d)),
    })
}

/// Directional derivative of [`gauge_eval`] at `x` along `h`.
pub fn gauge_grad_apply(g: &GaugeSpec, model: &SpaceModel, x: &Vector, h: &Vector) -> Result<f64> {
    g.check(model, x)?;
    model.check(h)?;
    let jg = base_grad_apply(g, x, h);
    Ok(match g.power {
        1 => jg,
        m => f64::from(m) * ipow(base_eval(g, x), m - 1) * jg,
    })
}

/// Coefficient representation of the derivative of [`gauge_eval`] at `x`.
pub fn gauge_gradient(g: &GaugeSpec, model: &SpaceModel, x: &Vector) -> Result<Vector> {
    g.check(model, x)?;
    let grad = base_gradient(g, x);
    Ok(match g.power {
        1 => grad,
        m => grad.scale(f64::from(m) * ipow(base_eval(g, x), m - 1)),
    })
}

/// A probed lower estimate of `‖J_G(x+z) - J_G(x)‖` and the analytic upper
/// bound it must stay under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub estimate: f64,
    pub bound: f64,
}

impl LipschitzCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.estimate <= self.bound + slack
    }
}

const LIPSCHITZ_PROBE_SEED: u64 = 0x5eed_0f1c_0ffe;
const RANDOM_PROBES: usize = 32;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Analytic bound on `‖J_G(x+z) - J_G(x)‖` in the model's dual norm, for the
/// base gauge (power 1).
pub fn lipschitz_bound(g: &GaugeSpec, model: &SpaceModel, x: &Vector, z: &Vector) -> Result<f64> {
    g.check(model, x)?;
    model.check(z)?;
    Ok(match g.kind {
        GaugeKind::LqEven { q } => {
            let zn = strong_norm(model, z)?;
            let xn = strong_norm(model, x)?;
            let head = f64::from(q) * ipow(zn, q - 1);
            let tail: f64 = (1..=q - 2)
                .map(|i| binomial(q - 1, i) * ipow(zn, i) * ipow(xn, q - 1 - i))
                .sum();
            head + f64::from(q) * tail
        }
        GaugeKind::L5Odd => {
            // With a = x + z and b = x:
            // 5‖a-b‖₅‖a‖₅³ + 5‖a-b‖₅(‖a‖₅² + ‖a‖₅‖b‖₅ + ‖b‖₅²)‖b‖₅
            let (xs, zs) = (x.as_sparse()?, z.as_sparse()?);
            let a = seq_lp_norm(&xs.add(zs), 5.0);
            let b = seq_lp_norm(xs, 5.0);
            let d = seq_lp_norm(zs, 5.0);
            5.0 * d * ipow(a, 3) + 5.0 * d * (a * a + a * b + b * b) * b
        }
        _ => 2.0 * strong_norm(model, z)?,
    })
}

fn unit_probes<R: Rng>(
    model: &SpaceModel,
    g: &GaugeSpec,
    x: &Vector,
    z: &Vector,
    rng: &mut R,
) -> Result<Vec<Vector>> {
    let mut probes = Vec::new();
    match (x, z) {
        (Vector::Grid(f), _) => {
            let cells = f.cells();
            let height = 1.0 / grid_lp_norm(&unit_cell(cells, 0)?, model.exponent());
            for i in 0..cells {
                probes.push(Vector::Grid(unit_cell(cells, i)?.scale(height)));
            }
            for _ in 0..RANDOM_PROBES {
                let v: Vec<f64> = (0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let v = Vector::Grid(GridFunction::new(v)?);
                let n = strong_norm(model, &v)?;
                if n > 0.0 {
                    probes.push(v.scale(1.0 / n));
                }
            }
        }
        (Vector::Sparse(xs), Vector::Sparse(zs)) => {
            let mut support = xs.support_union(zs);
            if matches!(
                g.kind,
                GaugeKind::WeakSepDyadic {
                    family: FamilyId::HalfDifference
                }
            ) {
                let shifted: Vec<u64> = support.iter().map(|k| k + 1).collect();
                support.extend(shifted);
                support.sort_unstable();
                support.dedup();
            }
            for &k in &support {
                probes.push(Vector::Sparse(SparseVector::unit(k)?));
            }
            if !support.is_empty() {
                for _ in 0..RANDOM_PROBES {
                    let v = SparseVector::from_entries(
                        support.iter().map(|&k| (k, rng.gen_range(-1.0..1.0))),
                    )?;
                    let v = Vector::Sparse(v);
                    let n = strong_norm(model, &v)?;
                    if n > 0.0 {
                        probes.push(v.scale(1.0 / n));
                    }
                }
            }
        }
        _ => return Err(Error::Representation("mixed vector kinds".into())),
    }
    Ok(probes)
}

fn unit_cell(cells: usize, i: usize) -> Result<GridFunction> {
    let mut v = vec![0.0; cells];
    v[i] = 1.0;
    GridFunction::new(v)
}

/// Probes `‖J_G(x+z) - J_G(x)‖` with unit vectors (coordinate directions on
/// the joint support plus random directions) and pairs it with the analytic
/// bound. The estimate is a lower bound on the true operator norm.
pub fn gauge_grad_lipschitz_bound_with<R: Rng>(
    g: &GaugeSpec,
    model: &SpaceModel,
    x: &Vector,
    z: &Vector,
    rng: &mut R,
) -> Result<LipschitzCheck> {
    let bound = lipschitz_bound(g, model, x, z)?;
    let base = GaugeSpec { power: 1, ..*g };
    let shifted = x.add(z)?;
    let mut estimate = 0.0_f64;
    for h in unit_probes(model, g, x, z, rng)? {
        let diff = base_grad_apply(&base, &shifted, &h) - base_grad_apply(&base, x, &h);
        estimate = estimate.max(diff.abs());
    }
    Ok(LipschitzCheck { estimate, bound })
}

/// [`gauge_grad_lipschitz_bound_with`] using a fixed probe seed.
pub fn gauge_grad_lipschitz_bound(
    g: &GaugeSpec,
    model: &SpaceModel,
    x: &Vector,
    z: &Vector,
) -> Result<LipschitzCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(LIPSCHITZ_PROBE_SEED);
    gauge_grad_lipschitz_bound_with(g, model, x, z, &mut rng)
}

/// Whether some `l_k` with `k` up to the last support index of `x` is
/// nonzero at `x`.
pub fn family_separation_check(fam: &FunctionalFamily, x: &SparseVector) -> Result<bool> {
    let last = fam
        .last_relevant_index(x)
        .ok_or_else(|| Error::Precondition("separation is checked on nonzero vectors".into()))?;
    Ok(fam.apply(x).iter().any(|(k, l)| k <= last && l != 0.0))
}
