//! Bell inequalities in CG coordinates.
//!
//! An inequality reads `offset + coeffs · cg(P) <= bound`. The offset only
//! records the constant term of the expression as originally written (for
//! instance `Σ ±P(ab|xy) <= 2` has a nonzero constant once rewritten in CG
//! coordinates), so that [`BellInequality::evaluate`] returns the value of
//! that expression. Comparisons between inequalities always go through
//! [`BellInequality::normal_form`], which folds the offset into the bound and
//! divides by the gcd.

mod classify;
mod lift;
mod relabel;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{primitive_integer_vector, Rat};
use crate::error::{Error, Result};
use crate::scenario::{Behavior, DeterministicStrategy, Scenario};

pub use classify::{canonicalize, canonicalize_with, classify, ClassId, Classifier, InequalityClass, Label, DEFAULT_GROUP_CAP};
pub use lift::{lift, LiftMap, PartyLift};
pub use relabel::{apply_relabeling, Relabeling, SymmetryGroup};

/// `offset + coeffs · x <= bound` over CG coordinates `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BellInequality {
    scenario: Scenario,
    coeffs: Vec<i64>,
    offset: i64,
    bound: i64,
}

/// gcd-normalized `coeffs · x <= bound`, ordered by `(bound, coeffs)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub bound: i64,
    pub coeffs: Vec<i64>,
}

impl Ord for NormalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.bound, &self.coeffs).cmp(&(other.bound, &other.coeffs))
    }
}

impl PartialOrd for NormalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl NormalForm {
    /// Divides by the gcd of all coefficients and the bound. The zero
    /// functional keeps only the sign of its bound.
    pub fn new(mut coeffs: Vec<i64>, mut bound: i64) -> Self {
        let g = coeffs.iter().fold(bound.unsigned_abs(), |g, c| g.gcd(&c.unsigned_abs()));
        if g > 1 {
            let g = g as i64;
            coeffs.iter_mut().for_each(|c| *c /= g);
            bound /= g;
        }
        NormalForm { bound, coeffs }
    }
}

/// Serialized form: `{"scenario": …, "cg_coeffs": […], "bound": b}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityJson {
    pub scenario: Scenario,
    pub cg_coeffs: Vec<i64>,
    pub bound: i64,
}

fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or(Error::Overflow("inequality coefficients"))
}

impl BellInequality {
    pub fn new(scenario: Scenario, coeffs: Vec<i64>, bound: i64) -> Result<Self> {
        Self::with_offset(scenario, coeffs, 0, bound)
    }

    pub fn with_offset(scenario: Scenario, coeffs: Vec<i64>, offset: i64, bound: i64) -> Result<Self> {
        if coeffs.len() != scenario.cg_len() {
            return Err(Error::Shape(format!(
                "{} CG coefficients for a scenario of dimension {}",
                coeffs.len(),
                scenario.cg_len()
            )));
        }
        Ok(BellInequality { scenario, coeffs, offset, bound })
    }

    /// `Σ_e full[e] · P(e) <= bound` in full coordinates.
    pub fn from_full(scenario: &Scenario, full: &[i64], bound: i64) -> Result<Self> {
        let (coeffs, constant) = full_to_cg(scenario, full)?;
        Ok(BellInequality { scenario: scenario.clone(), coeffs, offset: constant, bound })
    }

    /// `Σ_e full[e] · P(e) >= rhs`, stored as `−Σ full · P <= −rhs`.
    pub fn from_full_ge(scenario: &Scenario, full: &[i64], rhs: i64) -> Result<Self> {
        let neg: Vec<i64> = full.iter().map(|v| -v).collect();
        Self::from_full(scenario, &neg, -rhs)
    }

    /// `coeffs · x >= rhs` given over CG coordinates with rational entries,
    /// scaled to a primitive integer inequality `<=`.
    pub fn from_rational_ge(scenario: &Scenario, coeffs: &[Rat], rhs: &Rat) -> Result<Self> {
        let mut all: Vec<Rat> = coeffs.iter().map(|c| -c).collect();
        all.push(-rhs);
        let ints = primitive_integer_vector(&all);
        let bound = to_i64(ints.last().unwrap())?;
        let coeffs = ints[..ints.len() - 1].iter().map(to_i64).collect::<Result<Vec<_>>>()?;
        Self::new(scenario.clone(), coeffs, bound)
    }

    pub fn from_json(j: InequalityJson) -> Result<Self> {
        Self::new(j.scenario, j.cg_coeffs, j.bound)
    }

    pub fn to_json(&self) -> InequalityJson {
        let nf = self.normal_form();
        InequalityJson { scenario: self.scenario.clone(), cg_coeffs: nf.coeffs, bound: nf.bound }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn normal_form(&self) -> NormalForm {
        NormalForm::new(self.coeffs.clone(), self.bound - self.offset)
    }

    /// The same inequality with offset folded in and gcd 1.
    pub fn normalized(&self) -> BellInequality {
        let nf = self.normal_form();
        BellInequality { scenario: self.scenario.clone(), coeffs: nf.coeffs, offset: 0, bound: nf.bound }
    }

    pub fn from_normal_form(scenario: &Scenario, nf: &NormalForm) -> BellInequality {
        BellInequality { scenario: scenario.clone(), coeffs: nf.coeffs.clone(), offset: 0, bound: nf.bound }
    }

    /// Same inequality as a set of points (normal forms agree).
    pub fn same_as(&self, other: &BellInequality) -> bool {
        self.scenario == other.scenario && self.normal_form() == other.normal_form()
    }

    /// Value of the expression `offset + coeffs · cg(b)`.
    pub fn evaluate(&self, b: &Behavior) -> Result<Rat> {
        if *b.scenario() != self.scenario {
            return Err(Error::ScenarioMismatch(format!("{} vs {}", b.scenario(), self.scenario)));
        }
        Ok(self.evaluate_cg(b.to_cg().coords()))
    }

    pub fn evaluate_cg(&self, cg: &[Rat]) -> Rat {
        let mut v = Rat::from_int(self.offset);
        for (c, x) in self.coeffs.iter().zip(cg) {
            if *c != 0 && !x.is_zero() {
                v += &Rat::from_int(*c) * x;
            }
        }
        v
    }

    /// Value at a vertex given by its 0/1 CG vector.
    pub fn evaluate_vertex(&self, cg: &[i64]) -> i64 {
        self.offset + self.coeffs.iter().zip(cg).map(|(c, x)| c * x).sum::<i64>()
    }

    pub fn evaluate_strategy(&self, st: &DeterministicStrategy) -> i64 {
        self.evaluate_vertex(&st.cg_vector(&self.scenario))
    }

    /// Maximum of the expression over all local deterministic points.
    pub fn local_max(&self) -> i64 {
        local_extreme(self, true)
    }

    /// Minimum of the expression over all local deterministic points.
    pub fn local_min(&self) -> i64 {
        local_extreme(self, false)
    }

    /// Every local vertex satisfies the inequality.
    pub fn is_valid(&self) -> bool {
        self.local_max() <= self.bound
    }

    /// A full-coordinate functional with the same value as `coeffs · cg`
    /// on every no-signalling behavior (marginals are read at the first
    /// setting of each unmeasured party).
    pub fn to_full(&self) -> Vec<i64> {
        cg_to_full(&self.scenario, &self.coeffs)
    }

    /// Renders the inequality in `P(ab|xy)` notation with 1-based labels.
    pub fn render(&self) -> String {
        let l = self.scenario.layout();
        let mut out = String::new();
        if self.offset != 0 {
            out.push_str(&self.offset.to_string());
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let label = l.cg_label(i);
            let sign = if c < 0 { "-" } else { "+" };
            let mag = c.unsigned_abs();
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if mag != 1 {
                out.push_str(&format!("{mag} "));
            }
            out.push_str(&label);
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} <= {}", self.bound)
    }
}

impl fmt::Display for BellInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn local_extreme(i: &BellInequality, max: bool) -> i64 {
    let vals = DeterministicStrategy::enumerate(&i.scenario).into_iter().map(|st| i.evaluate_strategy(&st));
    if max {
        vals.max().expect("at least one vertex")
    } else {
        vals.min().expect("at least one vertex")
    }
}

/// Maximum of `offset + coeffs · x` over local vertices.
pub fn local_bound(i: &BellInequality) -> i64 {
    i.local_max()
}

/// Converts `Σ full[e] P(e)` to `constant + Σ coeffs[i] cg[i]`.
pub fn full_to_cg(scenario: &Scenario, full: &[i64]) -> Result<(Vec<i64>, i64)> {
    let l = scenario.layout();
    if full.len() != l.full_len() {
        return Err(Error::Shape(format!("{} full coefficients for {} entries", full.len(), l.full_len())));
    }
    let mut coeffs = vec![0i64; l.cg_len()];
    let mut constant = 0i64;
    for (e, &f) in full.iter().enumerate() {
        if f == 0 {
            continue;
        }
        for &(idx, c) in l.expansion(e) {
            match idx {
                None => constant += f * c,
                Some(i) => coeffs[i] += f * c,
            }
        }
    }
    Ok((coeffs, constant))
}

pub fn cg_to_full(scenario: &Scenario, coeffs: &[i64]) -> Vec<i64> {
    let l = scenario.layout();
    let mut full = vec![0i64; l.full_len()];
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for &e in l.cg_support(i) {
            full[e] += c;
        }
    }
    full
}

/// Full-coordinate functional of the probability of a product event: each
/// party is either unmeasured (`None`) or measured at a setting with its
/// outcome in a subset. Unmeasured parties are summed at their first setting.
pub fn event_functional(scenario: &Scenario, event: &[Option<(usize, Vec<usize>)>]) -> Vec<i64> {
    let l = scenario.layout();
    let mut full = vec![0i64; l.full_len()];
    for (e, slot) in full.iter_mut().enumerate() {
        let (xs, as_) = l.entry(e);
        let hit = event.iter().enumerate().all(|(p, ev)| match ev {
            None => xs[p] == 0,
            Some((x, subset)) => xs[p] == *x && subset.contains(&as_[p]),
        });
        if hit {
            *slot = 1;
        }
    }
    full
}
