//! Countable separating families of unit-norm functionals on `c_0`.
//!
//! A family `{l_k}` separates points when `l_k(x) = 0` for every `k` forces
//! `x = 0`. Both families here only involve coordinates `k` and `k + 1`, so
//! on a finitely supported `x` every `l_k` with `k` above the largest
//! support index vanishes and all sums over `k` are finite and exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    /// `l_k(x) = x_k`.
    Coordinate,
    /// `l_k(x) = (x_k - x_{k+1}) / 2`. Separating on `c_0` because a
    /// sequence with all differences zero is constant, hence zero.
    HalfDifference,
}

impl FamilyId {
    pub fn id(self) -> &'static str {
        match self {
            FamilyId::Coordinate => "coordinate",
            FamilyId::HalfDifference => "half_difference",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "coordinate" => Ok(FamilyId::Coordinate),
            "half_difference" => Ok(FamilyId::HalfDifference),
            other => Err(Error::Configuration(format!(
                "unknown functional family {other:?}"
            ))),
        }
    }
}

/// Evidence that `‖l_k‖ = 1` in the uniform norm: a unit vector on which
/// `l_k` attains 1, next to the analytic upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCertificate {
    pub k: u64,
    pub extremal: SparseVector,
    pub attained: f64,
    pub upper_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalFamily {
    pub id: FamilyId,
}

impl FunctionalFamily {
    pub fn new(id: FamilyId) -> Self {
        Self { id }
    }

    pub fn coordinate() -> Self {
        Self::new(FamilyId::Coordinate)
    }

    pub fn half_difference() -> Self {
        Self::new(FamilyId::HalfDifference)
    }

    /// `l_k(x)` for a single `k ≥ 1`.
    pub fn eval(&self, k: u64, x: &SparseVector) -> f64 {
        match self.id {
            FamilyId::Coordinate => x.get(k),
            FamilyId::HalfDifference => (x.get(k) - x.get(k + 1)) / 2.0,
        }
    }

    /// The sequence `(l_k(x))_k`, nonzero terms only.
    pub fn apply(&self, x: &SparseVector) -> SparseVector {
        match self.id {
            FamilyId::Coordinate => x.clone(),
            FamilyId::HalfDifference => {
                let mut ks: Vec<u64> = x
                    .indices()
                    .flat_map(|i| [i - 1, i])
                    .filter(|&k| k >= 1)
                    .collect();
                ks.sort_unstable();
                ks.dedup();
                SparseVector::from_sorted_unchecked(
                    ks.into_iter().map(|k| (k, self.eval(k, x))).collect(),
                )
            }
        }
    }

    /// Coefficient vector of `Σ_k c_k l_k`, i.e. the `a` with
    /// `Σ_k a_k h_k = Σ_k c_k l_k(h)` for all `h`.
    pub fn adjoint(&self, coeffs: &SparseVector) -> SparseVector {
        match self.id {
            FamilyId::Coordinate => coeffs.clone(),
            FamilyId::HalfDifference => {
                let terms = coeffs
                    .iter()
                    .flat_map(|(k, c)| [(k, c / 2.0), (k + 1, -c / 2.0)]);
                SparseVector::from_entries(terms).expect("indices stay 1-based and finite")
            }
        }
    }

    /// Largest `k` for which `l_k(x)` can be nonzero.
    pub fn last_relevant_index(&self, x: &SparseVector) -> Option<u64> {
        x.max_index()
    }

    pub fn norm_certificate(&self, k: u64) -> Result<NormCertificate> {
        let extremal = match self.id {
            FamilyId::Coordinate => SparseVector::unit(k)?,
            FamilyId::HalfDifference => SparseVector::from_entries([(k, 1.0), (k + 1, -1.0)])?,
        };
        let attained = self.eval(k, &extremal);
        Ok(NormCertificate {
            k,
            extremal,
            attained,
            upper_bound: 1.0,
        })
    }

    /// A nonzero vector annihilated by `l_1, ..., l_q`.
    pub fn annihilated_vector(&self, q: u64) -> SparseVector {
        match self.id {
            FamilyId::Coordinate => SparseVector::unit(q + 1).expect("q + 1 ≥ 1"),
            FamilyId::HalfDifference => {
                SparseVector::from_entries((1..=q + 1).map(|k| (k, 1.0))).expect("valid")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(entries: &[(u64, f64)]) -> SparseVector {
        SparseVector::from_entries(entries.iter().copied()).unwrap()
    }

    #[test]
    fn half_difference_apply_matches_pointwise() {
        let fam = FunctionalFamily::half_difference();
        let x = sv(&[(1, 2.0), (2, 2.0), (5, -1.0)]);
        let l = fam.apply(&x);
        for k in 1..=8 {
            assert_eq!(l.get(k), fam.eval(k, &x), "k = {k}");
        }
        assert_eq!(l.get(1), 0.0);
        assert_eq!(l.get(2), 1.0);
        assert_eq!(l.get(4), 0.5);
        assert_eq!(l.get(5), -0.5);
    }

    #[test]
    fn adjoint_pairs_with_apply() {
        let fam = FunctionalFamily::half_difference();
        let c = sv(&[(1, 1.0), (3, -2.0)]);
        let h = sv(&[(1, 0.5), (2, 3.0), (3, 1.0), (4, -1.0)]);
        let a = fam.adjoint(&c);
        let lhs: f64 = a.iter().map(|(k, v)| v * h.get(k)).sum();
        let rhs: f64 = c.iter().map(|(k, v)| v * fam.eval(k, &h)).sum();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn norm_certificates_attain_one() {
        for fam in [
            FunctionalFamily::coordinate(),
            FunctionalFamily::half_difference(),
        ] {
            for k in [1, 7, 1000] {
                let cert = fam.norm_certificate(k).unwrap();
                assert_eq!(cert.attained, 1.0);
                assert_eq!(
                    cert.extremal
                        .iter()
                        .map(|(_, v)| v.abs())
                        .fold(0.0, f64::max),
                    1.0
                );
            }
        }
    }

    #[test]
    fn annihilated_vectors() {
        for fam in [
            FunctionalFamily::coordinate(),
            FunctionalFamily::half_difference(),
        ] {
            for q in 1..=10 {
                let x = fam.annihilated_vector(q);
                assert!(!x.is_zero());
                assert!((1..=q).all(|k| fam.eval(k, &x) == 0.0));
            }
        }
    }
}
