//! Liftings of inequalities to scenarios with more settings, outcomes or
//! parties.

use serde::{Deserialize, Serialize};

use super::{event_functional, BellInequality};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// How one party of the target scenario is obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartyLift {
    /// A party of the source scenario (same position). Source setting `x`
    /// is placed at target setting `settings[x]`; target outcome `b` of that
    /// setting counts as source outcome `outcomes[x][b]`. Target settings
    /// outside the image get zero coefficients.
    Existing { settings: Vec<usize>, outcomes: Vec<Vec<usize>> },
    /// A new party; the inequality is imposed conditionally on this party
    /// obtaining `outcome` for `setting`.
    Conditioned { setting: usize, outcome: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftMap {
    pub source: Scenario,
    pub target: Scenario,
    pub parties: Vec<PartyLift>,
}

impl LiftMap {
    /// Identity on existing labels; extra outcomes merge into the last
    /// source outcome and extra parties condition on their first outcome of
    /// their first setting.
    pub fn embedding(source: &Scenario, target: &Scenario) -> Result<Self> {
        let parties = (0..target.num_parties())
            .map(|p| {
                if p >= source.num_parties() {
                    return PartyLift::Conditioned { setting: 0, outcome: 0 };
                }
                let k = source.num_settings(p);
                PartyLift::Existing {
                    settings: (0..k).collect(),
                    outcomes: (0..k)
                        .map(|x| {
                            let o = source.outcomes(p, x);
                            let w = if x < target.num_settings(p) { target.outcomes(p, x) } else { 0 };
                            (0..w).map(|b| b.min(o - 1)).collect()
                        })
                        .collect(),
                }
            })
            .collect();
        let map = LiftMap { source: source.clone(), target: target.clone(), parties };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidLift(m));
        let (s, t) = (&self.source, &self.target);
        if self.parties.len() != t.num_parties() {
            return bad(format!("{} party maps for {} target parties", self.parties.len(), t.num_parties()));
        }
        if t.num_parties() < s.num_parties() {
            return bad("target has fewer parties than source".into());
        }
        for (p, pl) in self.parties.iter().enumerate() {
            match pl {
                PartyLift::Existing { settings, outcomes } => {
                    if p >= s.num_parties() {
                        return bad(format!("party {} does not exist in the source", p + 1));
                    }
                    if settings.len() != s.num_settings(p) || outcomes.len() != settings.len() {
                        return bad(format!("party {} needs one target setting per source setting", p + 1));
                    }
                    let mut used = vec![false; t.num_settings(p)];
                    for (x, &y) in settings.iter().enumerate() {
                        if y >= used.len() || std::mem::replace(&mut used[y], true) {
                            return bad(format!("party {} setting map is not injective", p + 1));
                        }
                        let o = s.outcomes(p, x);
                        let group = &outcomes[x];
                        if group.len() != t.outcomes(p, y) {
                            return bad(format!("party {} setting {}: outcome map has wrong length", p + 1, x + 1));
                        }
                        let mut hit = vec![false; o];
                        for &a in group {
                            if a >= o {
                                return bad(format!("party {} setting {}: outcome out of range", p + 1, x + 1));
                            }
                            hit[a] = true;
                        }
                        if !hit.iter().all(|&h| h) {
                            return bad(format!("party {} setting {}: outcome map is not onto", p + 1, x + 1));
                        }
                    }
                }
                PartyLift::Conditioned { setting, outcome } => {
                    if p < s.num_parties() {
                        return bad(format!("party {} of the source must be mapped, not conditioned", p + 1));
                    }
                    if *setting >= t.num_settings(p) || *outcome >= t.outcomes(p, *setting) {
                        return bad(format!("party {} conditioning label out of range", p + 1));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Lifts `i` along `map`. Without new parties the bound is unchanged;
/// with new parties the inequality becomes `I(P(· c|· s)) <= bound · P(c|s)`.
pub fn lift(i: &BellInequality, map: &LiftMap) -> Result<BellInequality> {
    map.validate()?;
    if *i.scenario() != map.source {
        return Err(Error::ScenarioMismatch(format!("{} vs {}", i.scenario(), map.source)));
    }
    let (s, t) = (&map.source, &map.target);
    let mut src = i.to_full();
    // the constant term lives on the block where every party uses setting 0
    if i.offset() != 0 {
        for (xs, range) in s.layout().setting_blocks() {
            if xs.iter().all(|&x| x == 0) {
                range.for_each(|e| src[e] += i.offset());
            }
        }
    }
    let sl = s.layout();
    let tl = t.layout();
    let m = s.num_parties();
    let mut full = vec![0i64; tl.full_len()];
    let mut xs_src = vec![0; m];
    let mut as_src = vec![0; m];
    'entries: for (e, slot) in full.iter_mut().enumerate() {
        let (xs, as_) = tl.entry(e);
        for (p, pl) in map.parties.iter().enumerate() {
            match pl {
                PartyLift::Existing { settings, outcomes } => match settings.iter().position(|&y| y == xs[p]) {
                    Some(x) => {
                        xs_src[p] = x;
                        as_src[p] = outcomes[x][as_[p]];
                    }
                    None => continue 'entries,
                },
                PartyLift::Conditioned { setting, outcome } => {
                    if xs[p] != *setting || as_[p] != *outcome {
                        continue 'entries;
                    }
                }
            }
        }
        *slot = src[sl.full_index(&xs_src, &as_src)];
    }
    let extra = t.num_parties() > m;
    if extra && i.bound() != 0 {
        let event: Vec<Option<(usize, Vec<usize>)>> = map
            .parties
            .iter()
            .map(|pl| match pl {
                PartyLift::Existing { .. } => None,
                PartyLift::Conditioned { setting, outcome } => Some((*setting, vec![*outcome])),
            })
            .collect();
        for (f, g) in full.iter_mut().zip(event_functional(t, &event)) {
            *f -= i.bound() * g;
        }
    }
    BellInequality::from_full(t, &full, if extra { 0 } else { i.bound() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DeterministicStrategy;

    fn ch() -> BellInequality {
        BellInequality::new(Scenario::bipartite(&[2, 2], &[2, 2]), vec![-1, 0, -1, 0, 1, 1, 1, -1], 0).unwrap()
    }

    #[test]
    fn lifting_preserves_local_bound() {
        let i = ch();
        for t in [
            Scenario::bipartite(&[2, 2], &[2, 2, 2]),
            Scenario::bipartite(&[3, 2], &[2, 3]),
            Scenario::from_slices(&[&[2, 2], &[2, 2], &[2, 2]]),
        ] {
            let map = LiftMap::embedding(i.scenario(), &t).unwrap();
            let l = lift(&i, &map).unwrap();
            assert_eq!(l.local_max(), 0, "{t}");
            assert!(l.is_valid());
        }
    }

    #[test]
    fn outcome_lift_agrees_with_coarse_graining() {
        let i = BellInequality::new(Scenario::bipartite(&[2, 2], &[2, 2]), vec![1, -2, 0, 3, 1, 1, -1, 2], 1).unwrap();
        let t = Scenario::bipartite(&[3, 2], &[2, 3]);
        let l = lift(&i, &LiftMap::embedding(i.scenario(), &t).unwrap()).unwrap();
        for st in DeterministicStrategy::enumerate(&t) {
            let coarse = DeterministicStrategy::new(
                st.choices.iter().map(|c| c.iter().take(2).map(|&a| a.min(1)).collect()).collect(),
            );
            assert_eq!(l.evaluate_strategy(&st), i.evaluate_strategy(&coarse));
        }
    }

    #[test]
    fn party_lift_with_nonzero_bound() {
        let chsh = BellInequality::with_offset(Scenario::bipartite(&[2, 2], &[2, 2]), vec![-4, 0, -4, 0, 4, 4, 4, -4], 2, 2)
            .unwrap();
        let t = Scenario::from_slices(&[&[2, 2], &[2, 2], &[2, 2]]);
        let l = lift(&chsh, &LiftMap::embedding(chsh.scenario(), &t).unwrap()).unwrap();
        assert!(l.is_valid());
        assert_eq!(l.local_max(), 0);
        // vertices where the new party misses the conditioning outcome sit on the lift
        let v = DeterministicStrategy::new(vec![vec![0, 1], vec![1, 1], vec![1, 0]]);
        assert_eq!(l.evaluate_strategy(&v), 0);
    }

    #[test]
    fn invalid_maps_are_rejected() {
        let s = Scenario::bipartite(&[2, 2], &[2, 2]);
        let t = Scenario::bipartite(&[3, 2], &[2, 2]);
        let mut map = LiftMap::embedding(&s, &t).unwrap();
        map.parties[0] = PartyLift::Existing { settings: vec![0, 0], outcomes: vec![vec![0, 1, 1], vec![0, 1]] };
        assert!(map.validate().is_err());
        map.parties[0] = PartyLift::Existing { settings: vec![0, 1], outcomes: vec![vec![0, 0, 0], vec![0, 1]] };
        assert!(map.validate().is_err());
        map.parties[0] = PartyLift::Conditioned { setting: 0, outcome: 0 };
        assert!(map.validate().is_err());
        assert!(LiftMap::embedding(&t, &s).is_err());
    }
}
