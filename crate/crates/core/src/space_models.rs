//! Banach-space models and their strong norms.
//!
//! Each model fixes a representation (sparse sequence or grid function) and
//! the norm `‖·‖` the counterexample map is studied under. Every built-in
//! model has comparison constant `C = 1` against the weak norm of its
//! compatible gauges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::family::FamilyId;
use crate::vector::{GridFunction, SparseVector, Vector};

/// `t^n` by repeated squaring; exact whenever the intermediate products are.
pub fn ipow(t: f64, n: u32) -> f64 {
    let (mut base, mut exp, mut acc) = (t, n, 1.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// `|t|^p`, with integer exponents taken by multiplication and the rest via
/// `exp(p ln|t|)`.
pub fn abs_pow(t: f64, p: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        return 0.0;
    }
    if p.fract() == 0.0 && p > 0.0 && p <= u32::MAX as f64 {
        ipow(a, p as u32)
    } else {
        (p * a.ln()).exp()
    }
}

fn root(t: f64, p: f64) -> f64 {
    if p == 1.0 {
        t
    } else if p == 2.0 {
        t.sqrt()
    } else {
        t.powf(1.0 / p)
    }
}

/// Conjugate exponent `p' = p/(p-1)`; infinite for `p = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `(Σ w_i |x_i|^p)^{1/p}` over finitely many values, scaled by the largest
/// magnitude to keep intermediate powers in range. `p = ∞` gives the max.
fn weighted_lp<I>(values: I, weight: f64, p: f64) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let max = values.clone().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    if p == 1.0 {
        return weight * values.map(f64::abs).sum::<f64>();
    }
    let sum: f64 = values.map(|v| abs_pow(v / max, p)).sum();
    max * root(weight * sum, p)
}

/// `‖x‖_p` of a sparse sequence; `p = ∞` is the sup norm.
pub fn seq_lp_norm(x: &SparseVector, p: f64) -> f64 {
    weighted_lp(x.entries().iter().map(|&(_, v)| v), 1.0, p)
}

/// `‖f‖_p = (∫|f|^p dP)^{1/p}` of a grid function under the uniform
/// probability measure; `p = ∞` is the max.
pub fn grid_lp_norm(f: &GridFunction, p: f64) -> f64 {
    weighted_lp(f.values().iter().copied(), f.cell_mass(), p)
}

/// The model families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `ℓ²` with the Euclidean norm.
    L2Weighted,
    /// `ℓ^p`, `1 ≤ p < ∞`.
    LpSeq { p: f64 },
    /// `ℓ^∞` with the uniform norm.
    LInfDyadic,
    /// `c_0` with the induced uniform norm.
    C0Dyadic,
    /// `L^p([0,1])` on a uniform grid of `cells` cells.
    LpGrid { p: f64, cells: usize },
    /// `c_0` carrying a separating family of unit-norm functionals.
    WeakSep { family: FamilyId },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceModel {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub comparison_constant: f64,
}

impl SpaceModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        match kind {
            ModelKind::LpSeq { p } | ModelKind::LpGrid { p, .. }
                if !(p >= 1.0 && p.is_finite()) =>
            {
                return Err(Error::Configuration(format!(
                    "exponent p = {p} outside [1, ∞)"
                )));
            }
            ModelKind::LpGrid { cells: 0, .. } => {
                return Err(Error::Configuration("grid needs at least one cell".into()));
            }
            _ => {}
        }
        Ok(Self {
            kind,
            comparison_constant: 1.0,
        })
    }

    pub fn l2_weighted() -> Self {
        Self::new(ModelKind::L2Weighted).expect("valid")
    }

    pub fn lp_seq(p: f64) -> Result<Self> {
        Self::new(ModelKind::LpSeq { p })
    }

    pub fn linf_dyadic() -> Self {
        Self::new(ModelKind::LInfDyadic).expect("valid")
    }

    pub fn c0_dyadic() -> Self {
        Self::new(ModelKind::C0Dyadic).expect("valid")
    }

    pub fn lp_grid(p: f64, cells: usize) -> Result<Self> {
        Self::new(ModelKind::LpGrid { p, cells })
    }

    pub fn weaksep(family: FamilyId) -> Self {
        Self::new(ModelKind::WeakSep { family }).expect("valid")
    }

    /// Stable identifier used on the command line and in reports.
    pub fn id(&self) -> &'static str {
        match self.kind {
            ModelKind::L2Weighted => "l2_weighted",
            ModelKind::LpSeq { .. } => "lp_seq",
            ModelKind::LInfDyadic => "linf_dyadic",
            ModelKind::C0Dyadic => "c0_dyadic",
            ModelKind::LpGrid { .. } => "lp_grid",
            ModelKind::WeakSep { .. } => "weaksep",
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.kind, ModelKind::LpGrid { .. })
    }

    /// Exponent of the strong norm (`∞` for the uniform norms).
    pub fn exponent(&self) -> f64 {
        match self.kind {
            ModelKind::L2Weighted => 2.0,
            ModelKind::LpSeq { p } | ModelKind::LpGrid { p, .. } => p,
            ModelKind::LInfDyadic | ModelKind::C0Dyadic | ModelKind::WeakSep { .. } => {
                f64::INFINITY
            }
        }
    }

    /// Checks that `x` uses this model's representation.
    pub fn check(&self, x: &Vector) -> Result<()> {
        match (self.kind, x) {
            (ModelKind::LpGrid { cells, .. }, Vector::Grid(f)) => {
                if f.cells() == cells {
                    Ok(())
                } else {
                    Err(Error::Representation(format!(
                        "model expects {cells} grid cells, vector has {}",
                        f.cells()
                    )))
                }
            }
            (ModelKind::LpGrid { .. }, Vector::Sparse(_)) => Err(Error::Representation(
                "grid model given a sparse sequence".into(),
            )),
            (_, Vector::Grid(_)) => Err(Error::Representation(format!(
                "sequence model {} given a grid function",
                self.id()
            ))),
            _ => Ok(()),
        }
    }
}

/// The model's strong norm `‖x‖`.
pub fn strong_norm(model: &SpaceModel, x: &Vector) -> Result<f64> {
    model.check(x)?;
    Ok(match x {
        Vector::Sparse(v) => seq_lp_norm(v, model.exponent()),
        Vector::Grid(f) => grid_lp_norm(f, model.exponent()),
    })
}

/// Operator norm of the functional `h ↦ ⟨c, h⟩` on the model, where the
/// pairing is `Σ c_k h_k` for sequences and `∫ c h dP` for grid functions.
pub fn dual_norm(model: &SpaceModel, coeffs: &Vector) -> Result<f64> {
    model.check(coeffs)?;
    let q = conjugate_exponent(model.exponent());
    Ok(match coeffs {
        Vector::Sparse(c) => {
            if model.exponent().is_infinite() {
                seq_lp_norm(c, 1.0)
            } else {
                seq_lp_norm(c, q)
            }
        }
        Vector::Grid(c) => grid_lp_norm(c, q),
    })
}

/// The two sides of a norm comparison inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

// Single-entry vectors make both sides equal up to the rounding of one root.
const COMPARISON_SLACK: f64 = 4.0 * f64::EPSILON;

/// Compares `‖·‖_{p1}` and `‖·‖_{p2}` for `1 ≤ p1 < p2`.
///
/// Sequences satisfy `‖x‖_{p2} ≤ ‖x‖_{p1}`; functions under a probability
/// measure satisfy the reverse, `‖f‖_{p1} ≤ ‖f‖_{p2}`.
pub fn norm_comparison_check(p1: f64, p2: f64, x: &Vector) -> Result<NormComparison> {
    if !(p1 >= 1.0 && p1 < p2) {
        return Err(Error::Parameter(format!(
            "need 1 ≤ p1 < p2, got p1 = {p1}, p2 = {p2}"
        )));
    }
    let (lhs, rhs) = match x {
        Vector::Sparse(v) => (seq_lp_norm(v, p2), seq_lp_norm(v, p1)),
        Vector::Grid(f) => (grid_lp_norm(f, p1), grid_lp_norm(f, p2)),
    };
    Ok(NormComparison {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + COMPARISON_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(entries: &[(u64, f64)]) -> Vector {
        Vector::Sparse(SparseVector::from_entries(entries.iter().copied()).unwrap())
    }

    #[test]
    fn strong_norm_examples() {
        assert_eq!(
            strong_norm(&SpaceModel::l2_weighted(), &sv(&[])).unwrap(),
            0.0
        );
        let l5 = SpaceModel::lp_seq(5.0).unwrap();
        assert_eq!(strong_norm(&l5, &sv(&[(1, 1.0)])).unwrap(), 1.0);
        let l1 = SpaceModel::lp_seq(1.0).unwrap();
        // |3| + |-4| summed directly.
        assert_eq!(strong_norm(&l1, &sv(&[(1, 3.0), (4, -4.0)])).unwrap(), 7.0);
        assert_eq!(
            strong_norm(&SpaceModel::linf_dyadic(), &sv(&[(2, -3.0), (9, 2.0)])).unwrap(),
            3.0
        );
    }

    #[test]
    fn grid_norm_is_cell_average() {
        let m = SpaceModel::lp_grid(2.0, 4).unwrap();
        let f = Vector::Grid(GridFunction::new(vec![2.0, 0.0, 0.0, 0.0]).unwrap());
        // (4/4)^(1/2)
        assert_eq!(strong_norm(&m, &f).unwrap(), 1.0);
    }

    #[test]
    fn representation_mismatch() {
        let grid = SpaceModel::lp_grid(2.0, 2).unwrap();
        assert!(matches!(
            strong_norm(&grid, &sv(&[(1, 1.0)])),
            Err(Error::Representation(_))
        ));
        let f = Vector::Grid(GridFunction::zeros(3).unwrap());
        assert!(strong_norm(&grid, &f).is_err());
        assert!(strong_norm(&SpaceModel::l2_weighted(), &f).is_err());
    }

    #[test]
    fn bad_exponents_rejected() {
        assert!(SpaceModel::lp_seq(0.5).is_err());
        assert!(SpaceModel::lp_seq(f64::INFINITY).is_err());
        assert!(SpaceModel::lp_grid(2.0, 0).is_err());
    }

    #[test]
    fn comparison_examples() {
        let c = norm_comparison_check(2.0, 4.0, &sv(&[(7, 1.0)])).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (1.0, 1.0, true));

        let c = norm_comparison_check(1.0, 2.0, &sv(&[(1, 1.0), (2, 1.0)])).unwrap();
        assert_eq!(c.lhs, 2f64.sqrt());
        assert_eq!(c.rhs, 2.0);
        assert!(c.holds);

        let f = Vector::Grid(GridFunction::new(vec![1.0, 0.0]).unwrap());
        let c = norm_comparison_check(1.0, 2.0, &f).unwrap();
        assert_eq!(c.lhs, 0.5);
        assert!((c.rhs - 0.5f64.sqrt()).abs() < 1e-16);
        assert!(c.holds);

        assert!(matches!(
            norm_comparison_check(2.0, 2.0, &f),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn dual_norms() {
        let c = sv(&[(1, 3.0), (2, -4.0)]);
        assert_eq!(dual_norm(&SpaceModel::l2_weighted(), &c).unwrap(), 5.0);
        assert_eq!(dual_norm(&SpaceModel::c0_dyadic(), &c).unwrap(), 7.0);
        assert_eq!(
            dual_norm(&SpaceModel::lp_seq(1.0).unwrap(), &c).unwrap(),
            4.0
        );
    }

    #[test]
    fn integer_powers_are_products() {
        assert_eq!(ipow(3.0, 4), 81.0);
        assert_eq!(ipow(-2.0, 5), -32.0);
        assert_eq!(ipow(7.0, 0), 1.0);
        assert_eq!(abs_pow(-2.0, 3.0), 8.0);
        assert!((abs_pow(2.0, 0.5) - 2f64.sqrt()).abs() < 1e-15);
    }
}
