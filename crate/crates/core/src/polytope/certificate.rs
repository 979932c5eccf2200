//! Facet certificates: validity on every vertex plus a saturating set of
//! full affine rank.

use std::fmt;

use num_bigint::BigInt;

use crate::arith::{affine_rank_int, Rat};
use crate::error::{Error, Result};
use crate::inequality::BellInequality;
use crate::scenario::{DeterministicStrategy, Scenario};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetCertificate {
    pub inequality: BellInequality,
    pub saturating_vertices: Vec<DeterministicStrategy>,
    /// Indices into `saturating_vertices` of `dimension` affinely
    /// independent points.
    pub affine_rank_witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotFacet {
    ScenarioMismatch,
    ViolatedByVertex { vertex: DeterministicStrategy, value: i64 },
    InsufficientRank { rank: usize, required: usize },
}

impl fmt::Display for NotFacet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotFacet::ScenarioMismatch => write!(f, "inequality belongs to another scenario"),
            NotFacet::ViolatedByVertex { vertex, value } => write!(f, "violated by vertex {:?} (value {value})", vertex.choices),
            NotFacet::InsufficientRank { rank, required } => {
                write!(f, "saturating vertices have affine rank {rank}, need {required}")
            }
        }
    }
}

/// Greedy selection of affinely independent points, kept as a reduced
/// echelon basis of difference vectors.
pub(crate) struct Independent {
    origin: Option<Vec<i64>>,
    basis: Vec<(usize, Vec<Rat>)>,
}

impl Independent {
    pub(crate) fn new() -> Self {
        Independent { origin: None, basis: Vec::new() }
    }

    /// Adds `p` if it increases the affine rank.
    pub(crate) fn push(&mut self, p: &[i64]) -> bool {
        let Some(origin) = &self.origin else {
            self.origin = Some(p.to_vec());
            return true;
        };
        let mut v: Vec<Rat> = p
            .iter()
            .zip(origin)
            .map(|(&a, &b)| a.checked_sub(b).map_or_else(|| Rat::from_bigint(BigInt::from(a) - b), Rat::from_int))
            .collect();
        for (pivot, row) in &self.basis {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (vj, rj) in v.iter_mut().zip(row) {
                if !rj.is_zero() {
                    *vj -= &f * rj;
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        v.iter_mut().for_each(|x| *x *= &inv);
        for (_, row) in self.basis.iter_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let f = row[pivot].clone();
            for (rj, vj) in row.iter_mut().zip(&v) {
                if !vj.is_zero() {
                    *rj -= &f * vj;
                }
            }
        }
        self.basis.push((pivot, v));
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.origin.as_ref().map_or(0, |_| 1 + self.basis.len())
    }
}

fn witness(s: &Scenario, points: &[DeterministicStrategy]) -> Vec<usize> {
    let need = s.dimension();
    let mut ind = Independent::new();
    let mut out = Vec::new();
    for (k, p) in points.iter().enumerate() {
        if ind.push(&p.cg_vector(s)) {
            out.push(k);
            if ind.rank() == need {
                break;
            }
        }
    }
    out
}

/// Checks validity on every vertex of `s`, then looks for `dimension(s)`
/// affinely independent saturating vertices.
pub fn check_facet(s: &Scenario, i: &BellInequality) -> std::result::Result<FacetCertificate, NotFacet> {
    if i.scenario() != s {
        return Err(NotFacet::ScenarioMismatch);
    }
    let mut saturating = Vec::new();
    for v in DeterministicStrategy::enumerate(s) {
        let value = i.evaluate_strategy(&v);
        if value > i.bound() {
            return Err(NotFacet::ViolatedByVertex { vertex: v, value });
        }
        if value == i.bound() {
            saturating.push(v);
        }
    }
    let w = witness(s, &saturating);
    if w.len() < s.dimension() {
        return Err(NotFacet::InsufficientRank { rank: w.len(), required: s.dimension() });
    }
    Ok(FacetCertificate { inequality: i.clone(), saturating_vertices: saturating, affine_rank_witness: w })
}

impl FacetCertificate {
    /// Builds a certificate from a given saturating set; validity is checked
    /// on every vertex.
    pub fn from_points(i: &BellInequality, points: Vec<DeterministicStrategy>) -> Result<Self> {
        let s = i.scenario();
        if let Some(v) = DeterministicStrategy::enumerate(s).into_iter().find(|v| i.evaluate_strategy(v) > i.bound()) {
            return Err(Error::Internal(format!("inequality violated at vertex {:?}", v.choices)));
        }
        if let Some(v) = points.iter().find(|v| !v.is_valid_for(s) || i.evaluate_strategy(v) != i.bound()) {
            return Err(Error::Internal(format!("point {:?} does not saturate the inequality", v.choices)));
        }
        let w = witness(s, &points);
        if w.len() < s.dimension() {
            return Err(Error::Internal(format!("saturating points have affine rank {}, need {}", w.len(), s.dimension())));
        }
        Ok(FacetCertificate { inequality: i.clone(), saturating_vertices: points, affine_rank_witness: w })
    }

    /// Re-checks every claim from scratch.
    pub fn verify(&self) -> bool {
        let i = &self.inequality;
        let s = i.scenario();
        let valid = DeterministicStrategy::enumerate(s).iter().all(|v| i.evaluate_strategy(v) <= i.bound());
        let tight = self.saturating_vertices.iter().all(|v| v.is_valid_for(s) && i.evaluate_strategy(v) == i.bound());
        if !valid || !tight || self.affine_rank_witness.len() != s.dimension() {
            return false;
        }
        let Some(rows) = self
            .affine_rank_witness
            .iter()
            .map(|&k| self.saturating_vertices.get(k).map(|v| v.cg_vector(s)))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        affine_rank_int(&rows).is_ok_and(|r| r == s.dimension())
    }

    pub fn affine_rank(&self) -> usize {
        self.affine_rank_witness.len()
    }
}
