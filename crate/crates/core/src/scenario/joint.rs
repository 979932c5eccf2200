//! Joint distributions over deterministic strategies and the reconstruction
//! of a joint from per-setting distributions of the second party.

use super::behavior::{Behavior, DeterministicStrategy};
use super::Scenario;
use crate::arith::Rat;
use crate::error::{Error, Result};

/// A probability for every full assignment of outcomes to all settings of
/// all parties, indexed like [`DeterministicStrategy::enumerate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    scenario: Scenario,
    probs: Vec<Rat>,
}

/// `P(a_1 … a_m b | y)` for one setting `y` of the second party, indexed by
/// `alice_index * outcomes(y) + b` where `alice_index` enumerates the first
/// party's full assignments lexicographically.
pub type PerSettingTable = Vec<Rat>;

impl JointDistribution {
    /// Validates positivity and normalization.
    pub fn new(scenario: Scenario, probs: Vec<Rat>) -> Result<Self> {
        let d = Self::unchecked(scenario, probs)?;
        if d.probs.iter().any(Rat::is_negative) {
            return Err(Error::InvalidBehavior("joint distribution has a negative entry".into()));
        }
        if !d.is_normalized() {
            return Err(Error::InvalidBehavior("joint distribution does not sum to 1".into()));
        }
        Ok(d)
    }

    fn unchecked(scenario: Scenario, probs: Vec<Rat>) -> Result<Self> {
        if probs.len() != scenario.num_vertices() {
            return Err(Error::Shape(format!(
                "{} joint probabilities for {} assignments",
                probs.len(),
                scenario.num_vertices()
            )));
        }
        Ok(JointDistribution { scenario, probs })
    }

    pub fn point_mass(scenario: &Scenario, strategy: &DeterministicStrategy) -> Self {
        let mut probs = vec![Rat::zero(); scenario.num_vertices()];
        probs[strategy.index(scenario)] = Rat::one();
        JointDistribution { scenario: scenario.clone(), probs }
    }

    pub fn uniform(scenario: &Scenario) -> Self {
        let n = scenario.num_vertices();
        JointDistribution { scenario: scenario.clone(), probs: vec![Rat::new(1, n as i64); n] }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    pub fn is_normalized(&self) -> bool {
        self.probs.iter().sum::<Rat>() == Rat::one()
    }

    /// `P(a…|x…) = Σ_λ d(λ) Π_p [λ_p(x_p) = a_p]`.
    pub fn to_behavior(&self) -> Behavior {
        let s = &self.scenario;
        let l = s.layout();
        let blocks = l.setting_blocks();
        let mut table = vec![Rat::zero(); l.full_len()];
        for (strategy, w) in DeterministicStrategy::enumerate(s).iter().zip(&self.probs) {
            if w.is_zero() {
                continue;
            }
            for (xs, _) in &blocks {
                let outs: Vec<usize> = xs.iter().enumerate().map(|(p, &x)| strategy.choices[p][x]).collect();
                table[l.full_index(xs, &outs)] += w;
            }
        }
        Behavior::new(s.clone(), table).expect("marginals of a joint distribution form a valid behavior")
    }
}

fn require_bipartite(s: &Scenario) -> Result<()> {
    if s.num_parties() != 2 {
        return Err(Error::InvalidScenario(format!("{s} is not bipartite")));
    }
    Ok(())
}

fn alice_count(s: &Scenario) -> usize {
    s.parties()[0].iter().product()
}

fn alice_index(s: &Scenario, strategy: &DeterministicStrategy) -> usize {
    strategy.choices[0].iter().zip(&s.parties()[0]).fold(0, |acc, (&a, &r)| acc * r + a)
}

/// The per-setting distributions `P(a_1 … a_m b | y)` of a bipartite joint.
pub fn per_setting_marginals(d: &JointDistribution) -> Result<Vec<PerSettingTable>> {
    let s = &d.scenario;
    require_bipartite(s)?;
    let n_alice = alice_count(s);
    let bob = &s.parties()[1];
    let mut tables: Vec<PerSettingTable> = bob.iter().map(|&w| vec![Rat::zero(); n_alice * w]).collect();
    for (strategy, w) in DeterministicStrategy::enumerate(s).iter().zip(&d.probs) {
        if w.is_zero() {
            continue;
        }
        let a = alice_index(s, strategy);
        for (y, table) in tables.iter_mut().enumerate() {
            table[a * bob[y] + strategy.choices[1][y]] += w;
        }
    }
    Ok(tables)
}

/// Rebuilds a joint distribution `P(a_1 … a_m b_1 … b_n)` from per-setting
/// tables that share one first-party marginal `P(a_1 … a_m)`:
///
/// `P(a, b_1 … b_n) = Π_y P(a b_y | y) / P(a)^(n−1)`, and `0` where `P(a) = 0`.
///
/// Fails when the tables are not distributions or their first-party
/// marginals differ.
pub fn reconstruct_joint(tables: &[PerSettingTable], s: &Scenario) -> Result<JointDistribution> {
    require_bipartite(s)?;
    let exponent = (s.num_settings(1) - 1) as u32;
    let d = reconstruct_joint_with_exponent(tables, s, exponent)?;
    if !d.is_normalized() {
        return Err(Error::Internal("reconstructed joint is not normalized".into()));
    }
    Ok(d)
}

/// Same construction with the power of `P(a)` in the denominator chosen by
/// the caller. Only `n − 1` (with `n` the number of second-party settings)
/// yields a normalized result in general; the output is returned unchecked
/// so that other exponents can be inspected.
pub fn reconstruct_joint_with_exponent(
    tables: &[PerSettingTable],
    s: &Scenario,
    exponent: u32,
) -> Result<JointDistribution> {
    require_bipartite(s)?;
    let bob = &s.parties()[1];
    let n_alice = alice_count(s);
    if tables.len() != bob.len() {
        return Err(Error::Shape(format!("{} tables for {} settings", tables.len(), bob.len())));
    }
    let mut marginal: Option<Vec<Rat>> = None;
    for (y, table) in tables.iter().enumerate() {
        let w = bob[y];
        if table.len() != n_alice * w {
            return Err(Error::Shape(format!("table {} has {} entries, expected {}", y + 1, table.len(), n_alice * w)));
        }
        if table.iter().any(Rat::is_negative) || table.iter().sum::<Rat>() != Rat::one() {
            return Err(Error::InvalidBehavior(format!("table {} is not a probability distribution", y + 1)));
        }
        let m: Vec<Rat> = (0..n_alice).map(|a| table[a * w..(a + 1) * w].iter().sum()).collect();
        match &marginal {
            None => marginal = Some(m),
            Some(first) if *first != m => return Err(Error::MarginalMismatch { setting: y }),
            Some(_) => {}
        }
    }
    let marginal = marginal.expect("at least one setting");

    let probs = DeterministicStrategy::enumerate(s)
        .iter()
        .map(|strategy| {
            let a = alice_index(s, strategy);
            let pa = &marginal[a];
            if pa.is_zero() {
                return Rat::zero();
            }
            let mut v = Rat::one();
            for (y, table) in tables.iter().enumerate() {
                v *= &table[a * bob[y] + strategy.choices[1][y]];
                if v.is_zero() {
                    return v;
                }
            }
            &v / &pa.pow(exponent)
        })
        .collect();
    JointDistribution::unchecked(s.clone(), probs)
}
