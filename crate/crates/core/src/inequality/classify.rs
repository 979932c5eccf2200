//! Equivalence classes of inequalities under relabeling.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::relabel::SymmetryGroup;
use super::{BellInequality, NormalForm};
use crate::error::{Error, Result};
use crate::families::{chsh_lift_family, named_references, positivity_family};
use crate::scenario::Scenario;

/// Largest relabeling group a [`Classifier`] enumerates by default.
pub const DEFAULT_GROUP_CAP: usize = 500_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positivity,
    Chsh,
    Other,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positivity => "positivity",
            Label::Chsh => "chsh",
            Label::Other => "other",
        })
    }
}

pub type ClassId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityClass {
    /// Lexicographically smallest normal form in the orbit.
    pub canonical: BellInequality,
    pub label: Label,
    pub name: Option<String>,
    pub orbit_size: usize,
}

fn sparse_full(i: &BellInequality) -> (Vec<(usize, i64)>, i64) {
    let full = i.to_full();
    let sparse = full.into_iter().enumerate().filter(|(_, f)| *f != 0).collect();
    (sparse, i.bound() - i.offset())
}

fn orbit_of(group: &SymmetryGroup, i: &BellInequality) -> Vec<NormalForm> {
    let (full, bound) = sparse_full(i);
    let mut forms: Vec<NormalForm> = (0..group.size()).into_par_iter().map(|k| group.image(k, &full, bound)).collect();
    forms.par_sort_unstable();
    forms.dedup();
    forms
}

fn check_scenario(group: &SymmetryGroup, i: &BellInequality) -> Result<()> {
    if i.scenario() != group.scenario() {
        return Err(Error::ScenarioMismatch(format!("{} vs {}", i.scenario(), group.scenario())));
    }
    Ok(())
}

/// The canonical representative of the orbit of `i`: the image with the
/// smallest `(bound, coeffs)` in normal form.
pub fn canonicalize(i: &BellInequality) -> Result<BellInequality> {
    let group = SymmetryGroup::new(i.scenario(), DEFAULT_GROUP_CAP)?;
    canonicalize_with(&group, i)
}

pub fn canonicalize_with(group: &SymmetryGroup, i: &BellInequality) -> Result<BellInequality> {
    check_scenario(group, i)?;
    let (full, bound) = sparse_full(i);
    let nf = (0..group.size()).into_par_iter().map(|k| group.image(k, &full, bound)).min().expect("nonempty group");
    Ok(BellInequality::from_normal_form(i.scenario(), &nf))
}

/// Classifies a single inequality against the positivity and CHSH-lift
/// families of its scenario.
pub fn classify(i: &BellInequality) -> Result<InequalityClass> {
    let mut c = Classifier::new(i.scenario())?;
    let id = c.classify(i)?;
    Ok(c.class(id).clone())
}

/// Memoizing classifier. Every orbit it has seen is stored in full, so
/// classifying any member of a known orbit is a single lookup.
pub struct Classifier {
    group: SymmetryGroup,
    memo: HashMap<NormalForm, ClassId>,
    classes: Vec<InequalityClass>,
}

impl Classifier {
    /// A classifier preloaded with the positivity and CHSH-lift classes.
    pub fn new(s: &Scenario) -> Result<Self> {
        Self::with_cap(s, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(s: &Scenario, cap: usize) -> Result<Self> {
        let mut c = Self::empty(s, cap)?;
        for i in positivity_family(s) {
            c.register(&i, Label::Positivity, None)?;
        }
        for i in chsh_lift_family(s)? {
            c.register(&i, Label::Chsh, None)?;
        }
        Ok(c)
    }

    /// [`Classifier::new`] plus the named reference inequalities that live
    /// on `s`.
    pub fn standard(s: &Scenario) -> Result<Self> {
        let mut c = Self::new(s)?;
        for (name, i) in named_references(s)? {
            c.register(&i, Label::Other, Some(&name))?;
        }
        Ok(c)
    }

    /// A classifier with no known classes.
    pub fn empty(s: &Scenario, cap: usize) -> Result<Self> {
        Ok(Classifier { group: SymmetryGroup::new(s, cap)?, memo: HashMap::new(), classes: Vec::new() })
    }

    pub fn scenario(&self) -> &Scenario {
        self.group.scenario()
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn lookup(&self, i: &BellInequality) -> Option<ClassId> {
        self.memo.get(&i.normal_form()).copied()
    }

    /// Adds the orbit of `i` with the given label. If the orbit is already
    /// known its id is returned and a missing name is filled in.
    pub fn register(&mut self, i: &BellInequality, label: Label, name: Option<&str>) -> Result<ClassId> {
        check_scenario(&self.group, i)?;
        if let Some(id) = self.lookup(i) {
            let class = &mut self.classes[id];
            if class.name.is_none() {
                class.name = name.map(str::to_owned);
            }
            return Ok(id);
        }
        let orbit = orbit_of(&self.group, i);
        let id = self.classes.len();
        self.classes.push(InequalityClass {
            canonical: BellInequality::from_normal_form(i.scenario(), &orbit[0]),
            label,
            name: name.map(str::to_owned),
            orbit_size: orbit.len(),
        });
        for nf in orbit {
            self.memo.insert(nf, id);
        }
        Ok(id)
    }

    /// Class of `i`, adding a new `Other` class on first sight.
    pub fn classify(&mut self, i: &BellInequality) -> Result<ClassId> {
        self.register(i, Label::Other, None)
    }

    pub fn class(&self, id: ClassId) -> &InequalityClass {
        &self.classes[id]
    }

    pub fn classes(&self) -> &[InequalityClass] {
        &self.classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::Relabeling;

    fn chsh_s() -> Scenario {
        Scenario::bipartite(&[2, 2], &[2, 2])
    }

    #[test]
    fn chsh_scenario_has_one_class_of_each() {
        let c = Classifier::new(&chsh_s()).unwrap();
        assert_eq!(c.classes().len(), 2);
        assert_eq!(c.class(0).label, Label::Positivity);
        assert_eq!(c.class(0).orbit_size, 16);
        assert_eq!(c.class(1).label, Label::Chsh);
        assert_eq!(c.class(1).orbit_size, 8);
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        let s = chsh_s();
        let ch = BellInequality::new(s.clone(), vec![-1, 0, -1, 0, 1, 1, 1, -1], 0).unwrap();
        let canon = canonicalize(&ch).unwrap();
        let g = SymmetryGroup::new(&s, usize::MAX).unwrap();
        for k in 0..g.size() {
            let moved = ch.relabeled(&g.element(k)).unwrap();
            assert!(canonicalize(&moved).unwrap().same_as(&canon));
        }
        assert!(canonicalize(&ch.relabeled(&Relabeling::identity(&s)).unwrap()).unwrap().same_as(&canon));
    }

    #[test]
    fn unknown_orbits_get_new_classes() {
        let s = chsh_s();
        let mut c = Classifier::new(&s).unwrap();
        // a valid but non-facet inequality: P_A(1|1) <= 1
        let i = BellInequality::new(s.clone(), vec![1, 0, 0, 0, 0, 0, 0, 0], 1).unwrap();
        let id = c.classify(&i).unwrap();
        assert_eq!(c.class(id).label, Label::Other);
        assert_eq!(c.classify(&i).unwrap(), id);
        let named = c.register(&i, Label::Other, Some("marginal")).unwrap();
        assert_eq!(named, id);
        assert_eq!(c.class(id).name.as_deref(), Some("marginal"));
    }
}
