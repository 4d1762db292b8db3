//! Exact vector representations.
//!
//! Sequence spaces use [`SparseVector`]: a finitely supported sequence with
//! 1-based, unbounded indices. Function spaces on `[0, 1]` use
//! [`GridFunction`], a piecewise-constant function on `M` equal cells.
//! [`Vector`] is the tagged union the rest of the crate passes around.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported real sequence `x = (x_1, x_2, ...)`.
///
/// Entries are kept sorted by strictly increasing index and never store an
/// exact `0.0`, so the empty entry list is the zero vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u64, f64)>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The coordinate vector `e_k`.
    pub fn unit(index: u64) -> Result<Self> {
        Self::from_entries([(index, 1.0)])
    }

    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Repeated indices are summed. Entries that end up exactly `0.0` are
    /// dropped.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut raw: Vec<(u64, f64)> = entries.into_iter().collect();
        for &(index, value) in &raw {
            if index == 0 {
                return Err(Error::Representation("sequence indices are 1-based".into()));
            }
            if !value.is_finite() {
                return Err(Error::Representation(format!(
                    "non-finite value {value} at index {index}"
                )));
            }
        }
        raw.sort_by_key(|&(index, _)| index);
        let mut out: Vec<(u64, f64)> = Vec::with_capacity(raw.len());
        for (index, value) in raw {
            match out.last_mut() {
                Some(last) if last.0 == index => last.1 += value,
                _ => out.push((index, value)),
            }
        }
        out.retain(|&(_, v)| v != 0.0);
        Ok(Self { entries: out })
    }

    /// Wraps entries that are already canonical. Only used internally where
    /// the invariant is maintained by construction.
    pub(crate) fn from_sorted_unchecked(mut entries: Vec<(u64, f64)>) -> Self {
        entries.retain(|&(_, v)| v != 0.0);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { entries }
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(k, _)| k)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.last().map(|&(k, _)| k)
    }

    pub fn get(&self, index: u64) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(k, _)| k)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self::from_sorted_unchecked(self.iter().map(|(k, v)| (k, alpha * v)).collect())
    }

    /// Returns `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, alpha * b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + alpha * b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        Self::from_sorted_unchecked(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// Sorted union of both supports.
    pub fn support_union(&self, other: &Self) -> Vec<u64> {
        let mut out: Vec<u64> = self.indices().chain(other.indices()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A piecewise-constant function on `[0, 1]` with `M` equal cells, under
/// the Lebesgue probability measure. Cell `i` carries mass `1/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Representation("grid needs at least one cell".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Representation(format!("non-finite grid value {v}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(cells: usize) -> Result<Self> {
        Self::new(vec![0.0; cells])
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass of a single cell.
    pub fn cell_mass(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        if self.cells() != other.cells() {
            return Err(Error::Representation(format!(
                "grid sizes differ: {} vs {}",
                self.cells(),
                other.cells()
            )));
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        })
    }
}

/// Any vector the space models understand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector", into = "RawVector")]
pub enum Vector {
    Sparse(SparseVector),
    Grid(GridFunction),
}

impl Vector {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Vector::Sparse(_) => "sparse",
            Vector::Grid(_) => "grid",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Vector::Sparse(v) => v.is_zero(),
            Vector::Grid(f) => f.is_zero(),
        }
    }

    /// A zero vector of the same representation (and grid size).
    pub fn zero_like(&self) -> Self {
        match self {
            Vector::Sparse(_) => Vector::Sparse(SparseVector::zero()),
            Vector::Grid(f) => Vector::Grid(GridFunction {
                values: vec![0.0; f.cells()],
            }),
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        match self {
            Vector::Sparse(v) => Vector::Sparse(v.scale(alpha)),
            Vector::Grid(f) => Vector::Grid(f.scale(alpha)),
        }
    }

    /// Returns `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        match (self, other) {
            (Vector::Sparse(a), Vector::Sparse(b)) => Ok(Vector::Sparse(a.axpy(alpha, b))),
            (Vector::Grid(a), Vector::Grid(b)) => Ok(Vector::Grid(a.axpy(alpha, b)?)),
            _ => Err(Error::Representation(format!(
                "cannot combine {} and {} vectors",
                self.kind_name(),
                other.kind_name()
            ))),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn as_sparse(&self) -> Result<&SparseVector> {
        match self {
            Vector::Sparse(v) => Ok(v),
            Vector::Grid(_) => Err(Error::Representation(
                "expected a sparse sequence, got a grid function".into(),
            )),
        }
    }

    pub fn as_grid(&self) -> Result<&GridFunction> {
        match self {
            Vector::Grid(f) => Ok(f),
            Vector::Sparse(_) => Err(Error::Representation(
                "expected a grid function, got a sparse sequence".into(),
            )),
        }
    }
}

impl Serialize for SparseVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        Vector::Sparse(self.clone()).serialize(serializer)
    }
}

impl From<SparseVector> for Vector {
    fn from(v: SparseVector) -> Self {
        Vector::Sparse(v)
    }
}

impl From<GridFunction> for Vector {
    fn from(f: GridFunction) -> Self {
        Vector::Grid(f)
    }
}

/// On-disk shape of a vector.
///
/// `{"kind": "sparse", "entries": [[index, value], ...]}` or
/// `{"kind": "grid", "M": cells, "values": [...]}`. A grid may also be given
/// by 1-based cell `entries` together with `M`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawVector {
    kind: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<(u64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

impl TryFrom<RawVector> for Vector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        match raw.kind.as_str() {
            "sparse" => {
                if raw.values.is_some() {
                    return Err(Error::Representation(
                        "sparse vectors take \"entries\", not \"values\"".into(),
                    ));
                }
                Ok(Vector::Sparse(SparseVector::from_entries(
                    raw.entries.unwrap_or_default(),
                )?))
            }
            "grid" => match (raw.cells, raw.values, raw.entries) {
                (cells, Some(values), None) => {
                    if cells.is_some_and(|m| m != values.len()) {
                        return Err(Error::Representation(
                            "\"M\" does not match the number of values".into(),
                        ));
                    }
                    Ok(Vector::Grid(GridFunction::new(values)?))
                }
                (Some(cells), None, entries) => {
                    let mut values = vec![0.0; cells];
                    for (index, value) in entries.unwrap_or_default() {
                        if index == 0 || index as usize > cells {
                            return Err(Error::Representation(format!(
                                "grid cell {index} outside 1..={cells}"
                            )));
                        }
                        values[index as usize - 1] += value;
                    }
                    Ok(Vector::Grid(GridFunction::new(values)?))
                }
                _ => Err(Error::Representation(
                    "grid vectors need \"M\" with \"values\" or \"entries\"".into(),
                )),
            },
            other => Err(Error::Representation(format!(
                "unknown vector kind {other:?}"
            ))),
        }
    }
}

impl From<Vector> for RawVector {
    fn from(v: Vector) -> Self {
        match v {
            Vector::Sparse(s) => RawVector {
                kind: "sparse".into(),
                cells: None,
                entries: Some(s.entries),
                values: None,
            },
            Vector::Grid(f) => RawVector {
                kind: "grid".into(),
                cells: Some(f.values.len()),
                entries: None,
                values: Some(f.values),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let v = SparseVector::from_entries([(9, 1.0), (3, -2.0), (3, 2.0), (4, 0.0)]).unwrap();
        assert_eq!(v.entries(), &[(9, 1.0)]);
        assert!(SparseVector::from_entries([(0, 1.0)]).is_err());
        assert!(SparseVector::from_entries([(1, f64::NAN)]).is_err());
    }

    #[test]
    fn axpy_merges_and_cancels() {
        let a = SparseVector::from_entries([(1, 1.0), (5, 2.0)]).unwrap();
        let b = SparseVector::from_entries([(2, 1.0), (5, 1.0)]).unwrap();
        assert_eq!(a.axpy(-2.0, &b).entries(), &[(1, 1.0), (2, -2.0)]);
        assert!(a.sub(&a).is_zero());
        assert!(a.scale(0.0).is_zero());
    }

    #[test]
    fn huge_indices_cost_one_entry() {
        let v = SparseVector::unit(1_000_000).unwrap();
        assert_eq!(v.nnz(), 1);
        assert_eq!(v.get(1_000_000), 1.0);
        assert_eq!(v.get(999_999), 0.0);
    }

    #[test]
    fn grid_size_mismatch() {
        let a = Vector::Grid(GridFunction::zeros(2).unwrap());
        let b = Vector::Grid(GridFunction::zeros(3).unwrap());
        assert!(matches!(a.add(&b), Err(Error::Representation(_))));
        let s = Vector::Sparse(SparseVector::zero());
        assert!(a.add(&s).is_err());
        assert!(GridFunction::new(vec![]).is_err());
    }

    #[test]
    fn json_shapes() {
        let v: Vector =
            serde_json::from_str(r#"{"kind":"sparse","entries":[[4,-4.0],[1,3.0]]}"#).unwrap();
        assert_eq!(
            v,
            Vector::Sparse(SparseVector::from_entries([(1, 3.0), (4, -4.0)]).unwrap())
        );
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"kind":"sparse","entries":[[1,3.0],[4,-4.0]]}"#
        );

        let g: Vector =
            serde_json::from_str(r#"{"kind":"grid","M":2,"values":[1.0,0.0]}"#).unwrap();
        assert_eq!(g, Vector::Grid(GridFunction::new(vec![1.0, 0.0]).unwrap()));
        let g2: Vector =
            serde_json::from_str(r#"{"kind":"grid","M":2,"entries":[[1,1.0]]}"#).unwrap();
        assert_eq!(g, g2);
        assert!(serde_json::from_str::<Vector>(r#"{"kind":"grid","M":3,"values":[1.0]}"#).is_err());
        assert!(serde_json::from_str::<Vector>(r#"{"kind":"dense","values":[1.0]}"#).is_err());
    }
}
