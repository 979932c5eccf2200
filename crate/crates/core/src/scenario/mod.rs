//! Bell scenarios and their coordinate systems.
//!
//! A scenario lists, for each party, the number of outcomes of each of its
//! settings. Two coordinate systems are used throughout:
//!
//! * **full coordinates**: one entry `P(a_1 … a_k | x_1 … x_k)` per joint
//!   setting and joint outcome, ordered lexicographically by settings and
//!   then outcomes;
//! * **Collins–Gisin (CG) coordinates**: one entry per way of assigning to
//!   each party either "not measured" or a pair `(setting, outcome)` with the
//!   outcome different from the last one, excluding the all-unmeasured
//!   constant. The local polytope is full-dimensional in CG coordinates.
//!
//! CG coordinates are ordered by the number of measured parties, then by the
//! measured party list, the settings tuple and the outcomes tuple.
//!
//! All indices in the Rust API are 0-based; text and JSON renderings are
//! 1-based.

mod behavior;
mod joint;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use behavior::{Behavior, BehaviorEntry, CgVector, DeterministicStrategy};
pub use joint::{
    per_setting_marginals, reconstruct_joint, reconstruct_joint_with_exponent, JointDistribution, PerSettingTable,
};

/// Party/setting/outcome structure of a Bell experiment.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    parties: Vec<Vec<usize>>,
    layout: OnceLock<Arc<Layout>>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    parties: Vec<Vec<usize>>,
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;
    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.parties)
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        ScenarioRepr { parties: s.parties }
    }
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.parties == other.parties
    }
}

impl Eq for Scenario {}

impl Hash for Scenario {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parties.hash(state);
    }
}

impl PartialOrd for Scenario {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scenario {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.parties.cmp(&other.parties)
    }
}

impl Scenario {
    /// `parties[p][x]` is the number of outcomes of setting `x` of party `p`.
    pub fn new(parties: Vec<Vec<usize>>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidScenario("a scenario needs at least one party".into()));
        }
        for (p, settings) in parties.iter().enumerate() {
            if settings.is_empty() {
                return Err(Error::InvalidScenario(format!("party {} has no settings", p + 1)));
            }
            if let Some(x) = settings.iter().position(|&o| o == 0) {
                return Err(Error::InvalidScenario(format!("party {} setting {} has no outcomes", p + 1, x + 1)));
            }
        }
        Ok(Scenario { parties, layout: OnceLock::new() })
    }

    /// Shorthand for tests and fixtures; panics on an invalid scenario.
    pub fn from_slices(parties: &[&[usize]]) -> Self {
        Self::new(parties.iter().map(|p| p.to_vec()).collect()).expect("valid scenario")
    }

    /// Bipartite shorthand `[(alice),(bob)]`.
    pub fn bipartite(alice: &[usize], bob: &[usize]) -> Self {
        Self::from_slices(&[alice, bob])
    }

    pub fn parties(&self) -> &[Vec<usize>] {
        &self.parties
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn num_settings(&self, party: usize) -> usize {
        self.parties[party].len()
    }

    pub fn outcomes(&self, party: usize, setting: usize) -> usize {
        self.parties[party][setting]
    }

    /// At least two parties, each with at least two settings, each with at
    /// least two outcomes.
    pub fn is_nontrivial(&self) -> bool {
        self.parties.len() >= 2 && self.parties.iter().all(|p| p.len() >= 2 && p.iter().all(|&o| o >= 2))
    }

    /// Number of deterministic strategies, i.e. of local vertices.
    pub fn num_vertices(&self) -> usize {
        self.parties.iter().flatten().product()
    }

    /// `Π_parties (1 + Σ_settings (outcomes − 1)) − 1`.
    pub fn dimension(&self) -> usize {
        self.parties.iter().map(|p| 1 + p.iter().map(|o| o - 1).sum::<usize>()).product::<usize>() - 1
    }

    pub fn cg_len(&self) -> usize {
        self.dimension()
    }

    pub fn full_len(&self) -> usize {
        self.layout().full_len()
    }

    pub fn layout(&self) -> &Layout {
        self.layout.get_or_init(|| Arc::new(Layout::new(&self.parties)))
    }

    /// A stable content key, used for cache file names.
    pub fn key(&self) -> String {
        self.parties
            .iter()
            .map(|p| p.iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
            .collect::<Vec<_>>()
            .join("_")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parties
            .iter()
            .map(|p| format!("({})", p.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")))
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Parses the bracket notation used by [`fmt::Display`], e.g. `[(2 2),(2 3)]`.
impl FromStr for Scenario {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidScenario(format!("cannot parse {text:?}; expected e.g. [(2 2),(2 3)]"));
        let inner = text.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let mut parties = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = open.find(')').ok_or_else(bad)?;
            let outcomes = open[..close]
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            parties.push(outcomes);
            rest = open[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(bad());
                }
            } else if !rest.is_empty() {
                return Err(bad());
            }
        }
        Scenario::new(parties)
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scenario{self}")
    }
}

/// One party's slot in a CG term: unmeasured, or a (setting, outcome) pair
/// whose outcome is not the setting's last.
pub type LocalTerm = Option<(usize, usize)>;

/// Precomputed indexing for a scenario.
#[derive(Debug)]
pub struct Layout {
    parties: Vec<Vec<usize>>,
    /// `locals[p]` lists party `p`'s local terms; index 0 is "unmeasured".
    locals: Vec<Vec<LocalTerm>>,
    /// Full entry index of the first entry of each joint-setting block,
    /// addressed by the mixed-radix code of the settings tuple.
    block_offset: Vec<usize>,
    entries: Vec<(Vec<usize>, Vec<usize>)>,
    /// CG terms as local-index tuples, in CG order.
    cg_terms: Vec<Vec<usize>>,
    /// CG position of each local-index tuple (mixed-radix code); `None` for
    /// the constant term.
    cg_position: Vec<Option<usize>>,
    /// Full entries summed to obtain each CG coordinate.
    cg_support: Vec<Vec<usize>>,
    /// Expansion of each full entry in CG coordinates; `None` is the constant.
    expansion: Vec<Vec<(Option<usize>, i64)>>,
}

fn mixed_radix(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (d, r)| acc * r + d)
}

/// Lexicographic iteration over all tuples with `tuple[i] < radices[i]`.
pub(crate) fn for_each_tuple(radices: &[usize], mut f: impl FnMut(&[usize])) {
    if radices.iter().any(|&r| r == 0) {
        return;
    }
    let mut t = vec![0; radices.len()];
    loop {
        f(&t);
        let mut i = radices.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < radices[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

impl Layout {
    fn new(parties: &[Vec<usize>]) -> Self {
        let n = parties.len();
        let setting_radices: Vec<usize> = parties.iter().map(Vec::len).collect();

        let mut block_offset = Vec::new();
        let mut entries = Vec::new();
        for_each_tuple(&setting_radices, |xs| {
            block_offset.push(entries.len());
            let outcome_radices: Vec<usize> = xs.iter().enumerate().map(|(p, &x)| parties[p][x]).collect();
            for_each_tuple(&outcome_radices, |as_| entries.push((xs.to_vec(), as_.to_vec())));
        });

        let locals: Vec<Vec<LocalTerm>> = parties
            .iter()
            .map(|settings| {
                let mut l = vec![None];
                for (x, &o) in settings.iter().enumerate() {
                    for a in 0..o - 1 {
                        l.push(Some((x, a)));
                    }
                }
                l
            })
            .collect();
        let local_radices: Vec<usize> = locals.iter().map(Vec::len).collect();

        let mut cg_terms = Vec::new();
        for_each_tuple(&local_radices, |t| {
            if t.iter().any(|&i| i != 0) {
                cg_terms.push(t.to_vec());
            }
        });
        cg_terms.sort_by_key(|t| {
            let measured: Vec<usize> = (0..n).filter(|&p| t[p] != 0).collect();
            let settings: Vec<usize> = measured.iter().map(|&p| locals[p][t[p]].unwrap().0).collect();
            let outcomes: Vec<usize> = measured.iter().map(|&p| locals[p][t[p]].unwrap().1).collect();
            (measured.len(), measured, settings, outcomes)
        });
        let mut cg_position = vec![None; local_radices.iter().product()];
        for (i, t) in cg_terms.iter().enumerate() {
            cg_position[mixed_radix(t, &local_radices)] = Some(i);
        }

        let mut layout = Layout {
            parties: parties.to_vec(),
            locals,
            block_offset,
            entries,
            cg_terms,
            cg_position,
            cg_support: Vec::new(),
            expansion: Vec::new(),
        };

        layout.cg_support = (0..layout.cg_terms.len())
            .map(|i| {
                let term = &layout.cg_terms[i];
                let mut xs = vec![0; n];
                let mut radices = vec![1; n];
                for p in 0..n {
                    match layout.locals[p][term[p]] {
                        Some((x, _)) => xs[p] = x,
                        None => radices[p] = parties[p][0],
                    }
                }
                let mut support = Vec::new();
                for_each_tuple(&radices, |free| {
                    let outcomes: Vec<usize> = (0..n)
                        .map(|p| match layout.locals[p][term[p]] {
                            Some((_, a)) => a,
                            None => free[p],
                        })
                        .collect();
                    support.push(layout.full_index(&xs, &outcomes));
                });
                support
            })
            .collect();

        layout.expansion = (0..layout.entries.len())
            .map(|e| {
                let (xs, as_) = &layout.entries[e];
                // per party: [a_p = a] at setting x_p as a combination of local terms
                let per_party: Vec<Vec<(usize, i64)>> = (0..n)
                    .map(|p| {
                        let last = parties[p][xs[p]] - 1;
                        if as_[p] < last {
                            vec![(layout.local_index(p, xs[p], as_[p]).unwrap(), 1)]
                        } else {
                            let mut v = vec![(0, 1)];
                            for a in 0..last {
                                v.push((layout.local_index(p, xs[p], a).unwrap(), -1));
                            }
                            v
                        }
                    })
                    .collect();
                let radices: Vec<usize> = per_party.iter().map(Vec::len).collect();
                let mut out = Vec::new();
                for_each_tuple(&radices, |choice| {
                    let locals: Vec<usize> = (0..n).map(|p| per_party[p][choice[p]].0).collect();
                    let coef: i64 = (0..n).map(|p| per_party[p][choice[p]].1).product();
                    out.push((layout.cg_position[mixed_radix(&locals, &local_radices)], coef));
                });
                out
            })
            .collect();
        layout
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn full_len(&self) -> usize {
        self.entries.len()
    }

    pub fn cg_len(&self) -> usize {
        self.cg_terms.len()
    }

    /// `(settings, outcomes)` of a full entry.
    pub fn entry(&self, e: usize) -> (&[usize], &[usize]) {
        let (x, a) = &self.entries[e];
        (x, a)
    }

    pub fn full_index(&self, settings: &[usize], outcomes: &[usize]) -> usize {
        let setting_radices: Vec<usize> = self.parties.iter().map(Vec::len).collect();
        let block = self.block_offset[mixed_radix(settings, &setting_radices)];
        let outcome_radices: Vec<usize> =
            settings.iter().enumerate().map(|(p, &x)| self.parties[p][x]).collect();
        block + mixed_radix(outcomes, &outcome_radices)
    }

    /// Full entries sharing a joint setting, as `(settings, entry range)`.
    pub fn setting_blocks(&self) -> Vec<(Vec<usize>, std::ops::Range<usize>)> {
        let mut out = Vec::with_capacity(self.block_offset.len());
        for (i, &start) in self.block_offset.iter().enumerate() {
            let end = self.block_offset.get(i + 1).copied().unwrap_or(self.entries.len());
            out.push((self.entries[start].0.clone(), start..end));
        }
        out
    }

    pub fn local_terms(&self, party: usize) -> &[LocalTerm] {
        &self.locals[party]
    }

    pub fn local_index(&self, party: usize, setting: usize, outcome: usize) -> Option<usize> {
        self.locals[party].iter().position(|t| *t == Some((setting, outcome)))
    }

    /// The CG term at position `i`, as one local term per party.
    pub fn cg_term(&self, i: usize) -> Vec<LocalTerm> {
        self.cg_terms[i].iter().enumerate().map(|(p, &l)| self.locals[p][l]).collect()
    }

    /// Position of the CG coordinate with the given per-party terms; `None`
    /// for the all-unmeasured constant or an invalid term.
    pub fn cg_index(&self, term: &[LocalTerm]) -> Option<usize> {
        let locals: Option<Vec<usize>> = term
            .iter()
            .enumerate()
            .map(|(p, t)| match t {
                None => Some(0),
                Some((x, a)) => self.local_index(p, *x, *a),
            })
            .collect();
        let radices: Vec<usize> = self.locals.iter().map(Vec::len).collect();
        self.cg_position[mixed_radix(&locals?, &radices)]
    }

    pub fn cg_support(&self, i: usize) -> &[usize] {
        &self.cg_support[i]
    }

    /// `P(entry)` written as `constant + Σ coef · cg[i]` over a no-signalling
    /// behavior; the constant carries index `None`.
    pub fn expansion(&self, e: usize) -> &[(Option<usize>, i64)] {
        &self.expansion[e]
    }

    /// Renders a CG coordinate in `P(ab|xy)` notation (1-based labels).
    pub fn cg_label(&self, i: usize) -> String {
        let term = self.cg_term(i);
        let measured: Vec<(usize, (usize, usize))> =
            term.iter().enumerate().filter_map(|(p, t)| t.map(|xa| (p, xa))).collect();
        let outs: String = measured.iter().map(|(_, (_, a))| (a + 1).to_string()).collect::<Vec<_>>().join("");
        let sets: String = measured.iter().map(|(_, (x, _))| (x + 1).to_string()).collect::<Vec<_>>().join("");
        if measured.len() == 1 && self.parties.len() > 1 {
            let party = party_name(measured[0].0);
            format!("P_{party}({outs}|{sets})")
        } else if measured.len() < self.parties.len() {
            let who: String = measured.iter().map(|(p, _)| party_name(*p)).collect();
            format!("P_{who}({outs}|{sets})")
        } else {
            format!("P({outs}|{sets})")
        }
    }

    pub fn full_label(&self, e: usize) -> String {
        let (xs, as_) = self.entry(e);
        let outs: String = as_.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join("");
        let sets: String = xs.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join("");
        format!("P({outs}|{sets})")
    }
}

pub(crate) fn party_name(p: usize) -> String {
    if p < 26 {
        ((b'A' + p as u8) as char).to_string()
    } else {
        format!("#{}", p + 1)
    }
}
