//! Relabelings of parties, settings and outcomes.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{full_to_cg, BellInequality, NormalForm};
use crate::error::{Error, Result};
use crate::scenario::{Behavior, Scenario};

/// Sends label `(p, x, a)` to `(parties[p], settings[p][x], outcomes[p][x][a])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relabeling {
    pub parties: Vec<usize>,
    pub settings: Vec<Vec<usize>>,
    pub outcomes: Vec<Vec<Vec<usize>>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

impl Relabeling {
    pub fn identity(s: &Scenario) -> Self {
        Relabeling {
            parties: (0..s.num_parties()).collect(),
            settings: s.parties().iter().map(|p| (0..p.len()).collect()).collect(),
            outcomes: s.parties().iter().map(|p| p.iter().map(|&o| (0..o).collect()).collect()).collect(),
        }
    }

    /// Checks that every map is a bijection and outcome counts are preserved.
    pub fn validate(&self, s: &Scenario) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRelabeling(m));
        let n = s.num_parties();
        if self.parties.len() != n || !is_permutation(&self.parties) {
            return bad("party map is not a permutation".into());
        }
        if self.settings.len() != n || self.outcomes.len() != n {
            return bad("wrong number of parties in setting or outcome maps".into());
        }
        for p in 0..n {
            let q = self.parties[p];
            let sp = &self.settings[p];
            if sp.len() != s.num_settings(p) || s.num_settings(q) != s.num_settings(p) || !is_permutation(sp) {
                return bad(format!("setting map of party {} is not a bijection onto party {}", p + 1, q + 1));
            }
            if self.outcomes[p].len() != sp.len() {
                return bad(format!("party {} needs one outcome map per setting", p + 1));
            }
            for (x, &y) in sp.iter().enumerate() {
                let o = s.outcomes(p, x);
                if s.outcomes(q, y) != o {
                    return bad(format!(
                        "setting {} of party {} ({o} outcomes) cannot map to setting {} of party {}",
                        x + 1,
                        p + 1,
                        y + 1,
                        q + 1
                    ));
                }
                let op = &self.outcomes[p][x];
                if op.len() != o || !is_permutation(op) {
                    return bad(format!("outcome map of party {} setting {} is not a permutation", p + 1, x + 1));
                }
            }
        }
        Ok(())
    }

    /// Full-coordinate entry `e` goes to entry `map[e]`.
    pub fn entry_map(&self, s: &Scenario) -> Vec<usize> {
        let l = s.layout();
        let n = s.num_parties();
        let mut xs2 = vec![0; n];
        let mut as2 = vec![0; n];
        (0..l.full_len())
            .map(|e| {
                let (xs, as_) = l.entry(e);
                for p in 0..n {
                    let q = self.parties[p];
                    xs2[q] = self.settings[p][xs[p]];
                    as2[q] = self.outcomes[p][xs[p]][as_[p]];
                }
                l.full_index(&xs2, &as2)
            })
            .collect()
    }

    pub fn inverse(&self) -> Relabeling {
        let n = self.parties.len();
        let mut parties = vec![0; n];
        let mut settings = vec![Vec::new(); n];
        let mut outcomes = vec![Vec::new(); n];
        for p in 0..n {
            let q = self.parties[p];
            parties[q] = p;
            let k = self.settings[p].len();
            let mut sinv = vec![0; k];
            let mut oinv = vec![Vec::new(); k];
            for x in 0..k {
                let y = self.settings[p][x];
                sinv[y] = x;
                let op = &self.outcomes[p][x];
                let mut inv = vec![0; op.len()];
                for (a, &b) in op.iter().enumerate() {
                    inv[b] = a;
                }
                oinv[y] = inv;
            }
            settings[q] = sinv;
            outcomes[q] = oinv;
        }
        Relabeling { parties, settings, outcomes }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Relabeling) -> Relabeling {
        let n = self.parties.len();
        let mut parties = vec![0; n];
        let mut settings = vec![Vec::new(); n];
        let mut outcomes = vec![Vec::new(); n];
        for p in 0..n {
            let q = self.parties[p];
            parties[p] = next.parties[q];
            settings[p] = self.settings[p].iter().map(|&y| next.settings[q][y]).collect();
            outcomes[p] = self.outcomes[p]
                .iter()
                .enumerate()
                .map(|(x, op)| {
                    let y = self.settings[p][x];
                    op.iter().map(|&b| next.outcomes[q][y][b]).collect()
                })
                .collect();
        }
        Relabeling { parties, settings, outcomes }
    }

    /// `(r·b)(r(e)) = b(e)`.
    pub fn apply_behavior(&self, b: &Behavior) -> Result<Behavior> {
        let s = b.scenario();
        self.validate(s)?;
        let map = self.entry_map(s);
        let mut table = b.table().to_vec();
        for (e, v) in b.table().iter().enumerate() {
            table[map[e]] = v.clone();
        }
        Behavior::new(s.clone(), table)
    }
}

impl BellInequality {
    /// The relabeled inequality `i'` with `i'(r·b) = i(b)` for every behavior `b`.
    pub fn relabeled(&self, r: &Relabeling) -> Result<BellInequality> {
        let s = self.scenario();
        r.validate(s)?;
        let map = r.entry_map(s);
        let full = self.to_full();
        let mut moved = vec![0i64; full.len()];
        for (e, &f) in full.iter().enumerate() {
            moved[map[e]] = f;
        }
        let (coeffs, constant) = full_to_cg(s, &moved)?;
        BellInequality::with_offset(s.clone(), coeffs, self.offset() + constant, self.bound())
    }
}

/// Convenience wrapper matching the free-function style of the other operations.
pub fn apply_relabeling(i: &BellInequality, r: &Relabeling) -> Result<BellInequality> {
    i.relabeled(r)
}

/// The full relabeling group of a scenario, addressable by index.
///
/// Element `k` is decoded in mixed radix: the party permutation is the most
/// significant digit, followed by one setting bijection per party and one
/// outcome permutation per (party, setting).
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    scenario: Scenario,
    party_perms: Vec<Vec<usize>>,
    /// `setting_maps[p][q]`: count-preserving bijections from the settings of
    /// `p` to those of `q` (empty when the profiles differ).
    setting_maps: Vec<Vec<Vec<Vec<usize>>>>,
    /// `perms[o]`: all permutations of `0..o`.
    perms: Vec<Vec<Vec<usize>>>,
    inner_size: usize,
    size: usize,
}

impl SymmetryGroup {
    /// Enumerates the group structure; fails if the order exceeds `cap`.
    pub fn new(s: &Scenario, cap: usize) -> Result<Self> {
        let n = s.num_parties();
        let profile = |p: usize| {
            let mut v = s.parties()[p].clone();
            v.sort_unstable();
            v
        };
        let party_perms: Vec<Vec<usize>> =
            (0..n).permutations(n).filter(|perm| (0..n).all(|p| profile(p) == profile(perm[p]))).collect();
        let setting_maps: Vec<Vec<Vec<Vec<usize>>>> = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        if profile(p) != profile(q) {
                            return Vec::new();
                        }
                        let k = s.num_settings(p);
                        (0..k)
                            .permutations(k)
                            .filter(|m| (0..k).all(|x| s.outcomes(p, x) == s.outcomes(q, m[x])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let max_o = s.parties().iter().flatten().copied().max().unwrap_or(1);
        if max_o > 8 {
            return Err(Error::CapExceeded { what: "outcomes per setting for symmetry enumeration", count: max_o, cap: 8 });
        }
        let perms: Vec<Vec<Vec<usize>>> = (0..=max_o).map(|o| (0..o).permutations(o).collect()).collect();

        let too_big = |count: usize| Error::CapExceeded { what: "relabeling group order", count, cap };
        let mut inner: usize = 1;
        for p in 0..n {
            inner = inner.checked_mul(setting_maps[p][p].len()).ok_or(too_big(usize::MAX))?;
            for &o in &s.parties()[p] {
                inner = inner.checked_mul(perms[o].len()).ok_or(too_big(usize::MAX))?;
            }
        }
        let size = inner.checked_mul(party_perms.len()).ok_or(too_big(usize::MAX))?;
        if size > cap {
            return Err(too_big(size));
        }
        Ok(SymmetryGroup { scenario: s.clone(), party_perms, setting_maps, perms, inner_size: inner, size })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn element(&self, k: usize) -> Relabeling {
        assert!(k < self.size, "group element out of range");
        let s = &self.scenario;
        let n = s.num_parties();
        let perm = &self.party_perms[k / self.inner_size];
        let mut rest = k % self.inner_size;
        let mut settings = vec![Vec::new(); n];
        let mut outcomes = vec![Vec::new(); n];
        // least significant digits last: decode from the back
        for p in (0..n).rev() {
            let q = perm[p];
            let mut op = Vec::with_capacity(s.num_settings(p));
            for &o in s.parties()[p].iter().rev() {
                let r = self.perms[o].len();
                op.push(self.perms[o][rest % r].clone());
                rest /= r;
            }
            op.reverse();
            let maps = &self.setting_maps[p][q];
            settings[p] = maps[rest % maps.len()].clone();
            rest /= maps.len();
            outcomes[p] = op;
        }
        Relabeling { parties: perm.clone(), settings, outcomes }
    }

    /// Normal form of the image of `full · P <= bound` under element `k`.
    pub(crate) fn image(&self, k: usize, full: &[(usize, i64)], bound: i64) -> NormalForm {
        let s = &self.scenario;
        let r = self.element(k);
        let l = s.layout();
        let n = s.num_parties();
        let mut xs2 = vec![0; n];
        let mut as2 = vec![0; n];
        let mut moved = vec![0i64; l.full_len()];
        for &(e, f) in full {
            let (xs, as_) = l.entry(e);
            for p in 0..n {
                let q = r.parties[p];
                xs2[q] = r.settings[p][xs[p]];
                as2[q] = r.outcomes[p][xs[p]][as_[p]];
            }
            moved[l.full_index(&xs2, &as2)] = f;
        }
        let (coeffs, constant) = full_to_cg(s, &moved).expect("matching length");
        NormalForm::new(coeffs, bound - constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;
    use crate::scenario::DeterministicStrategy;

    #[test]
    fn group_orders() {
        let cap = usize::MAX;
        assert_eq!(SymmetryGroup::new(&Scenario::bipartite(&[2, 2], &[2, 2]), cap).unwrap().size(), 2 * 8 * 8);
        assert_eq!(SymmetryGroup::new(&Scenario::bipartite(&[3, 3], &[3, 3]), cap).unwrap().size(), 10368);
        assert_eq!(SymmetryGroup::new(&Scenario::from_slices(&[&[2, 2], &[2, 2], &[2, 2]]), cap).unwrap().size(), 6 * 512);
        // settings with different outcome counts cannot be swapped
        assert_eq!(SymmetryGroup::new(&Scenario::bipartite(&[2, 3], &[2, 2]), cap).unwrap().size(), 12 * 8);
        assert!(SymmetryGroup::new(&Scenario::bipartite(&[3, 3], &[3, 3]), 100).is_err());
    }

    #[test]
    fn elements_are_valid_and_distinct() {
        let s = Scenario::bipartite(&[2, 3], &[3, 2]);
        let g = SymmetryGroup::new(&s, usize::MAX).unwrap();
        let mut seen = std::collections::HashSet::new();
        for k in 0..g.size() {
            let r = g.element(k);
            r.validate(&s).unwrap();
            assert!(seen.insert(r));
        }
    }

    #[test]
    fn inverse_and_composition() {
        let s = Scenario::bipartite(&[2, 3], &[3, 2]);
        let g = SymmetryGroup::new(&s, usize::MAX).unwrap();
        let id = Relabeling::identity(&s);
        for k in (0..g.size()).step_by(7) {
            let r = g.element(k);
            assert_eq!(r.then(&r.inverse()), id);
            assert_eq!(r.inverse().then(&r), id);
            let r2 = g.element((k * 13 + 5) % g.size());
            let composed = r.then(&r2).entry_map(&s);
            let m1 = r.entry_map(&s);
            let m2 = r2.entry_map(&s);
            assert!((0..m1.len()).all(|e| composed[e] == m2[m1[e]]));
        }
    }

    #[test]
    fn invalid_relabelings_are_rejected() {
        let s = Scenario::bipartite(&[2, 3], &[2, 2]);
        let mut r = Relabeling::identity(&s);
        r.parties = vec![1, 0];
        assert!(r.validate(&s).is_err());
        let mut r = Relabeling::identity(&s);
        r.settings[0] = vec![1, 0];
        assert!(r.validate(&s).is_err());
        let mut r = Relabeling::identity(&s);
        r.outcomes[0][1] = vec![0, 0, 1];
        assert!(r.validate(&s).is_err());
    }

    #[test]
    fn relabeled_inequality_tracks_relabeled_behavior() {
        let s = Scenario::bipartite(&[2, 3], &[3, 2]);
        let g = SymmetryGroup::new(&s, usize::MAX).unwrap();
        let coeffs: Vec<i64> = (0..s.cg_len() as i64).map(|i| (i * 5 % 7) - 3).collect();
        let ineq = BellInequality::new(s.clone(), coeffs, 4).unwrap();
        let weights: Vec<Rat> = (1..=s.num_vertices() as i64).map(Rat::from_int).collect();
        let total: Rat = weights.iter().sum();
        let parts: Vec<(Rat, Behavior)> = DeterministicStrategy::enumerate(&s)
            .iter()
            .zip(&weights)
            .map(|(st, w)| (w / &total, Behavior::deterministic(&s, st)))
            .collect();
        let b = Behavior::mixture(&s, &parts).unwrap();
        for k in (0..g.size()).step_by(11) {
            let r = g.element(k);
            let moved = ineq.relabeled(&r).unwrap();
            assert_eq!(moved.evaluate(&r.apply_behavior(&b).unwrap()).unwrap(), ineq.evaluate(&b).unwrap());
            assert!(moved.relabeled(&r.inverse()).unwrap().same_as(&ineq));
        }
        assert!(ineq.relabeled(&Relabeling::identity(&s)).unwrap().same_as(&ineq));
    }
}
