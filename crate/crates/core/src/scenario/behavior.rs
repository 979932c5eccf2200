use serde::{Deserialize, Serialize};

use super::{for_each_tuple, Scenario};
use crate::arith::Rat;
use crate::error::{Error, Result};

/// One chosen outcome per party and setting (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub choices: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(choices: Vec<Vec<usize>>) -> Self {
        DeterministicStrategy { choices }
    }

    pub fn is_valid_for(&self, s: &Scenario) -> bool {
        self.choices.len() == s.num_parties()
            && self.choices.iter().enumerate().all(|(p, c)| {
                c.len() == s.num_settings(p) && c.iter().enumerate().all(|(x, &a)| a < s.outcomes(p, x))
            })
    }

    /// All strategies of `s` in lexicographic order (party 1 setting 1 is the
    /// most significant digit).
    pub fn enumerate(s: &Scenario) -> Vec<DeterministicStrategy> {
        let radices: Vec<usize> = s.parties().iter().flatten().copied().collect();
        let mut out = Vec::with_capacity(s.num_vertices());
        for_each_tuple(&radices, |flat| {
            let mut it = flat.iter().copied();
            let choices = s.parties().iter().map(|p| it.by_ref().take(p.len()).collect()).collect();
            out.push(DeterministicStrategy { choices });
        });
        out
    }

    /// Position of this strategy in [`DeterministicStrategy::enumerate`].
    pub fn index(&self, s: &Scenario) -> usize {
        self.choices
            .iter()
            .flatten()
            .zip(s.parties().iter().flatten())
            .fold(0, |acc, (&a, &r)| acc * r + a)
    }

    /// The vertex in CG coordinates; every coordinate is 0 or 1.
    pub fn cg_vector(&self, s: &Scenario) -> Vec<i64> {
        let l = s.layout();
        (0..l.cg_len())
            .map(|i| {
                let hit = l.cg_term(i).iter().enumerate().all(|(p, t)| match t {
                    None => true,
                    Some((x, a)) => self.choices[p][*x] == *a,
                });
                hit as i64
            })
            .collect()
    }
}

/// A point `P(a … | x …)` in full coordinates.
///
/// Constructors that take arbitrary tables validate positivity,
/// normalization and no-signalling; [`CgVector::to_behavior`] does not check
/// positivity because CG coordinates describe the whole no-signalling affine
/// space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<Rat>,
}

/// JSON entry of a behavior file (1-based labels).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorEntry {
    pub settings: Vec<usize>,
    pub outcomes: Vec<usize>,
    pub p: Rat,
}

impl Behavior {
    pub fn new(scenario: Scenario, table: Vec<Rat>) -> Result<Self> {
        let b = Behavior::unchecked(scenario, table)?;
        b.validate()?;
        Ok(b)
    }

    fn unchecked(scenario: Scenario, table: Vec<Rat>) -> Result<Self> {
        if table.len() != scenario.full_len() {
            return Err(Error::Shape(format!(
                "behavior table of length {} for a scenario with {} entries",
                table.len(),
                scenario.full_len()
            )));
        }
        Ok(Behavior { scenario, table })
    }

    pub fn deterministic(scenario: &Scenario, strategy: &DeterministicStrategy) -> Self {
        let l = scenario.layout();
        let table = (0..l.full_len())
            .map(|e| {
                let (xs, as_) = l.entry(e);
                let hit = xs.iter().zip(as_).enumerate().all(|(p, (&x, &a))| strategy.choices[p][x] == a);
                if hit {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        Behavior { scenario: scenario.clone(), table }
    }

    /// Every outcome tuple equally likely for every joint setting.
    pub fn uniform(scenario: &Scenario) -> Self {
        let l = scenario.layout();
        let table = (0..l.full_len())
            .map(|e| {
                let (xs, _) = l.entry(e);
                let n: usize = xs.iter().enumerate().map(|(p, &x)| scenario.outcomes(p, x)).product();
                Rat::new(1, n as i64)
            })
            .collect();
        Behavior { scenario: scenario.clone(), table }
    }

    /// Convex combination `Σ w_i b_i`; weights are not checked.
    pub fn mixture(scenario: &Scenario, parts: &[(Rat, Behavior)]) -> Result<Self> {
        let mut table = vec![Rat::zero(); scenario.full_len()];
        for (w, b) in parts {
            if b.scenario != *scenario {
                return Err(Error::ScenarioMismatch(format!("{} vs {}", b.scenario, scenario)));
            }
            for (t, v) in table.iter_mut().zip(&b.table) {
                if !v.is_zero() {
                    *t += w * v;
                }
            }
        }
        Ok(Behavior { scenario: scenario.clone(), table })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self) -> &[Rat] {
        &self.table
    }

    pub fn get(&self, settings: &[usize], outcomes: &[usize]) -> &Rat {
        &self.table[self.scenario.layout().full_index(settings, outcomes)]
    }

    /// Checks positivity, normalization and no-signalling exactly.
    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.table.iter().position(Rat::is_negative) {
            return Err(Error::InvalidBehavior(format!(
                "negative entry {}",
                self.scenario.layout().full_label(e)
            )));
        }
        for (xs, range) in self.scenario.layout().setting_blocks() {
            let total: Rat = self.table[range].iter().sum();
            if total != Rat::one() {
                return Err(Error::InvalidBehavior(format!("settings {xs:?} sum to {total}")));
            }
        }
        if let Some(msg) = self.signalling_violation() {
            return Err(Error::InvalidBehavior(msg));
        }
        Ok(())
    }

    /// Describes the first no-signalling violation, if any: some party's
    /// choice of setting changes the marginal of the others.
    pub fn signalling_violation(&self) -> Option<String> {
        let s = &self.scenario;
        let l = s.layout();
        for (xs, _) in l.setting_blocks() {
            for p in 0..s.num_parties() {
                if xs[p] != 0 {
                    continue;
                }
                for alt in 1..s.num_settings(p) {
                    let mut ys = xs.clone();
                    ys[p] = alt;
                    let radices: Vec<usize> = (0..s.num_parties())
                        .map(|q| if q == p { 1 } else { s.outcomes(q, xs[q]) })
                        .collect();
                    let mut bad = None;
                    for_each_tuple(&radices, |rest| {
                        if bad.is_some() {
                            return;
                        }
                        let marginal = |settings: &[usize]| -> Rat {
                            (0..s.outcomes(p, settings[p]))
                                .map(|a| {
                                    let mut outs = rest.to_vec();
                                    outs[p] = a;
                                    self.table[l.full_index(settings, &outs)].clone()
                                })
                                .sum()
                        };
                        if marginal(&xs) != marginal(&ys) {
                            bad = Some(format!(
                                "party {} switching setting {} -> {} changes the others' marginal",
                                p + 1,
                                xs[p] + 1,
                                alt + 1
                            ));
                        }
                    });
                    if bad.is_some() {
                        return bad;
                    }
                }
            }
        }
        None
    }

    /// CG coordinates: marginals with unmeasured parties summed out at their
    /// first setting.
    pub fn to_cg(&self) -> CgVector {
        let l = self.scenario.layout();
        let coords = (0..l.cg_len()).map(|i| l.cg_support(i).iter().map(|&e| &self.table[e]).sum()).collect();
        CgVector { scenario: self.scenario.clone(), coords }
    }

    pub fn to_json_entries(&self) -> Vec<BehaviorEntry> {
        let l = self.scenario.layout();
        (0..l.full_len())
            .map(|e| {
                let (xs, as_) = l.entry(e);
                BehaviorEntry {
                    settings: xs.iter().map(|x| x + 1).collect(),
                    outcomes: as_.iter().map(|a| a + 1).collect(),
                    p: self.table[e].clone(),
                }
            })
            .collect()
    }

    /// Parses the flat entry list; absent entries are zero. Validates the result.
    pub fn from_json_entries(scenario: &Scenario, entries: &[BehaviorEntry]) -> Result<Self> {
        let l = scenario.layout();
        let mut table = vec![Rat::zero(); l.full_len()];
        let mut seen = vec![false; l.full_len()];
        let n = scenario.num_parties();
        for entry in entries {
            let ok = entry.settings.len() == n
                && entry.outcomes.len() == n
                && (0..n).all(|p| {
                    let x = entry.settings[p];
                    x >= 1
                        && x <= scenario.num_settings(p)
                        && entry.outcomes[p] >= 1
                        && entry.outcomes[p] <= scenario.outcomes(p, x - 1)
                });
            if !ok {
                return Err(Error::InvalidBehavior(format!(
                    "entry settings {:?} outcomes {:?} is out of range",
                    entry.settings, entry.outcomes
                )));
            }
            let xs: Vec<usize> = entry.settings.iter().map(|x| x - 1).collect();
            let as_: Vec<usize> = entry.outcomes.iter().map(|a| a - 1).collect();
            let e = l.full_index(&xs, &as_);
            if seen[e] {
                return Err(Error::InvalidBehavior(format!("duplicate entry {}", l.full_label(e))));
            }
            seen[e] = true;
            table[e] = entry.p.clone();
        }
        Behavior::new(scenario.clone(), table)
    }
}

/// A behavior in CG coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CgVector {
    scenario: Scenario,
    coords: Vec<Rat>,
}

impl CgVector {
    pub fn new(scenario: Scenario, coords: Vec<Rat>) -> Result<Self> {
        if coords.len() != scenario.cg_len() {
            return Err(Error::Shape(format!(
                "{} CG coordinates for a scenario of dimension {}",
                coords.len(),
                scenario.cg_len()
            )));
        }
        Ok(CgVector { scenario, coords })
    }

    pub fn from_ints(scenario: Scenario, coords: &[i64]) -> Result<Self> {
        Self::new(scenario, coords.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    /// Reconstructs the full table by inclusion–exclusion over last outcomes.
    /// The result is normalized and no-signalling by construction but may
    /// have negative entries.
    pub fn to_behavior(&self) -> Behavior {
        let l = self.scenario.layout();
        let table = (0..l.full_len())
            .map(|e| {
                let mut v = Rat::zero();
                for &(idx, coef) in l.expansion(e) {
                    let c = Rat::from_int(coef);
                    match idx {
                        None => v += c,
                        Some(i) => v += &c * &self.coords[i],
                    }
                }
                v
            })
            .collect();
        Behavior { scenario: self.scenario.clone(), table }
    }
}
