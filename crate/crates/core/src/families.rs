//! Named inequalities and the generated families used for classification.
//!
//! Labels in [`FamilyId`] parameters are 1-based, matching the usual
//! `P(ab|xy)` notation; everything else in the crate is 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::affine_rank_int;
use crate::error::{Error, Result};
use crate::inequality::{event_functional, BellInequality};
use crate::polytope::FacetCertificate;
use crate::scenario::{DeterministicStrategy, LocalTerm, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Cglmp,
    Froissart,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyId {
    /// `Σ (−1)^(a+b+xy) P(ab|xy) <= 2` on `[(2 2),(2 2)]`.
    Chsh,
    /// `P_A(1|1) + P_B(1|1) − P(11|11) − P(11|12) − P(11|21) + P(11|22) >= 0`.
    Ch,
    /// A lifted CH inequality on `[(2 2),(w_1 … w_n)]`: for `a = 1`
    /// `P_A(1|1) + P_B(G|y) − P(1G|1y) − P(1G|2y) − P(1G'|1y') + P(1G'|2y') >= 0`,
    /// and for `a = 2` the same with the roles of the two first-party
    /// settings swapped on the `y'` terms. `G` and `G'` are nonempty subsets
    /// of `{1, …, w_y − 1}` and `{1, …, w_y' − 1}`.
    ChshLift { bob: Vec<usize>, y: usize, y2: usize, g: Vec<usize>, g2: Vec<usize>, a: usize },
    /// The non-CHSH facet of `[(2 3),(2 2 2)]`.
    NewIneq3,
    /// The family on `[(2 n),(2 … 2)]` that reduces to CH at `n = 2`.
    Ineq2 { n: usize },
    /// Stored data for well-known classes.
    Reference { name: Reference },
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Chsh => write!(f, "chsh"),
            FamilyId::Ch => write!(f, "ch"),
            FamilyId::ChshLift { bob, y, y2, g, g2, a } => {
                write!(f, "chsh_lift(w={bob:?}, y={y}, y'={y2}, G={g:?}, G'={g2:?}, a={a})")
            }
            FamilyId::NewIneq3 => write!(f, "newineq3"),
            FamilyId::Ineq2 { n } => write!(f, "ineq2({n})"),
            FamilyId::Reference { name: Reference::Cglmp } => write!(f, "cglmp"),
            FamilyId::Reference { name: Reference::Froissart } => write!(f, "froissart"),
        }
    }
}

/// One example of each family, for listings.
pub fn registry() -> Vec<FamilyId> {
    vec![
        FamilyId::Chsh,
        FamilyId::Ch,
        FamilyId::ChshLift { bob: vec![3, 3], y: 1, y2: 2, g: vec![1, 2], g2: vec![1], a: 1 },
        FamilyId::NewIneq3,
        FamilyId::Ineq2 { n: 4 },
        FamilyId::Reference { name: Reference::Cglmp },
        FamilyId::Reference { name: Reference::Froissart },
    ]
}

/// Named inequalities whose scenario is `s`.
pub fn named_references(s: &Scenario) -> Result<Vec<(String, BellInequality)>> {
    let mut ids = vec![
        FamilyId::NewIneq3,
        FamilyId::Reference { name: Reference::Cglmp },
        FamilyId::Reference { name: Reference::Froissart },
    ];
    if s.num_parties() == 2 && s.parties()[0].len() == 2 && s.parties()[0][0] == 2 {
        let n = s.num_settings(1);
        if n >= 4 && *s == ln_scenario(n) {
            ids.push(FamilyId::Ineq2 { n });
        }
    }
    let mut out = Vec::new();
    for id in ids {
        let i = make(&id)?;
        if i.scenario() == s {
            out.push((id.to_string(), i));
        }
    }
    Ok(out)
}

/// `Σ coef · P(term)` collected over bipartite CG coordinates, written
/// `>= 0`.
struct Builder {
    s: Scenario,
    coeffs: Vec<i64>,
}

impl Builder {
    fn new(s: Scenario) -> Self {
        let coeffs = vec![0; s.cg_len()];
        Builder { s, coeffs }
    }

    fn add(&mut self, c: i64, term: &[LocalTerm]) -> Result<()> {
        let i = self.s.layout().cg_index(term).ok_or_else(|| Error::InvalidFamily(format!("no CG term {term:?}")))?;
        self.coeffs[i] += c;
        Ok(())
    }

    /// `P_A(a|x)` with 1-based labels.
    fn pa(&mut self, c: i64, a: usize, x: usize) -> Result<()> {
        self.add(c, &[Some((x - 1, a - 1)), None])
    }

    fn pb(&mut self, c: i64, b: usize, y: usize) -> Result<()> {
        self.add(c, &[None, Some((y - 1, b - 1))])
    }

    fn pab(&mut self, c: i64, a: usize, b: usize, x: usize, y: usize) -> Result<()> {
        self.add(c, &[Some((x - 1, a - 1)), Some((y - 1, b - 1))])
    }

    /// Finishes `expr >= 0`.
    fn ge_zero(self) -> Result<BellInequality> {
        BellInequality::new(self.s, self.coeffs.iter().map(|c| -c).collect(), 0)
    }
}

pub fn make(f: &FamilyId) -> Result<BellInequality> {
    match f {
        FamilyId::Chsh => {
            let s = Scenario::bipartite(&[2, 2], &[2, 2]);
            let l = s.layout();
            let full: Vec<i64> = (0..l.full_len())
                .map(|e| {
                    let (xs, as_) = l.entry(e);
                    if (as_[0] + as_[1] + xs[0] * xs[1]) % 2 == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            BellInequality::from_full(&s, &full, 2)
        }
        FamilyId::Ch => make(&FamilyId::Ineq2 { n: 2 }),
        FamilyId::ChshLift { bob, y, y2, g, g2, a } => make_chsh_lift(bob, *y, *y2, g, g2, *a),
        FamilyId::NewIneq3 => {
            let mut b = Builder::new(Scenario::bipartite(&[2, 3], &[2, 2, 2]));
            b.pa(1, 1, 1)?;
            b.pb(1, 1, 1)?;
            b.pb(1, 1, 2)?;
            b.pab(-1, 1, 1, 1, 1)?;
            b.pab(-1, 1, 1, 1, 2)?;
            b.pab(-1, 1, 1, 2, 1)?;
            b.pab(-1, 2, 1, 2, 2)?;
            b.pab(-1, 1, 1, 1, 3)?;
            b.pab(1, 1, 1, 2, 3)?;
            b.pab(1, 2, 1, 2, 3)?;
            b.ge_zero()
        }
        FamilyId::Ineq2 { n } => {
            let n = *n;
            if n < 2 {
                return Err(Error::InvalidFamily(format!("ineq2 needs n >= 2, got {n}")));
            }
            let mut b = Builder::new(ln_scenario(n));
            b.pa(1, 1, 1)?;
            for k in 1..n {
                b.pb(1, 1, k)?;
            }
            for k in 1..=n {
                b.pab(-1, 1, 1, 1, k)?;
            }
            for k in 1..n {
                b.pab(-1, k, 1, 2, k)?;
                b.pab(1, k, 1, 2, n)?;
            }
            b.ge_zero()
        }
        FamilyId::Reference { name: Reference::Cglmp } => Ok(cglmp3()),
        FamilyId::Reference { name: Reference::Froissart } => Ok(i3322()),
    }
}

fn make_chsh_lift(bob: &[usize], y: usize, y2: usize, g: &[usize], g2: &[usize], a: usize) -> Result<BellInequality> {
    let bad = |m: String| Err(Error::InvalidFamily(m));
    let s = Scenario::new(vec![vec![2, 2], bob.to_vec()])?;
    let n = bob.len();
    if !(1..=n).contains(&y) || !(1..=n).contains(&y2) || y == y2 {
        return bad(format!("settings y={y}, y'={y2} must be distinct and in 1..={n}"));
    }
    if a != 1 && a != 2 {
        return bad(format!("a must be 1 or 2, got {a}"));
    }
    for (set, w) in [(g, bob[y - 1]), (g2, bob[y2 - 1])] {
        if set.is_empty() || set.iter().any(|&b| b == 0 || b >= w) {
            return bad(format!("outcome subset {set:?} must be nonempty within 1..{w}"));
        }
    }
    let zero_based = |set: &[usize]| set.iter().map(|b| b - 1).collect::<Vec<_>>();
    let (g, g2) = (zero_based(g), zero_based(g2));
    let (y, y2) = (y - 1, y2 - 1);
    let ev = |ax: Option<usize>, by: Option<(usize, &Vec<usize>)>| {
        event_functional(&s, &[ax.map(|x| (x, vec![0])), by.map(|(y, set)| (y, set.clone()))])
    };
    let (sign1, sign2) = if a == 1 { (-1, 1) } else { (1, -1) };
    let terms = [
        (1, ev(Some(a - 1), None)),
        (1, ev(None, Some((y, &g)))),
        (-1, ev(Some(0), Some((y, &g)))),
        (-1, ev(Some(1), Some((y, &g)))),
        (sign1, ev(Some(0), Some((y2, &g2)))),
        (sign2, ev(Some(1), Some((y2, &g2)))),
    ];
    let mut full = vec![0i64; s.full_len()];
    for (c, f) in terms {
        full.iter_mut().zip(f).for_each(|(t, v)| *t += c * v);
    }
    BellInequality::from_full_ge(&s, &full, 0)
}

/// `[(2 n),(2 … 2)]` with `n` binary settings for the second party.
pub fn ln_scenario(n: usize) -> Scenario {
    Scenario::new(vec![vec![2, n], vec![2; n]]).expect("valid scenario")
}

/// The mod-3 CGLMP expression on `[(3 3),(3 3)]`, bound 2.
fn cglmp3() -> BellInequality {
    let s = Scenario::bipartite(&[3, 3], &[3, 3]);
    let l = s.layout();
    // (x, y, k): P(A_x = B_y + k mod 3)
    let plus = [(0, 0, 0), (1, 0, 2), (1, 1, 0), (0, 1, 0)];
    let minus = [(0, 0, 2), (1, 0, 0), (1, 1, 2), (0, 1, 1)];
    let full: Vec<i64> = (0..l.full_len())
        .map(|e| {
            let (xs, as_) = l.entry(e);
            let diff = (as_[0] + 3 - as_[1]) % 3;
            let hit = |t: &[(usize, usize, usize)]| t.iter().filter(|&&(x, y, k)| xs[0] == x && xs[1] == y && diff == k).count() as i64;
            hit(&plus) - hit(&minus)
        })
        .collect();
    BellInequality::from_full(&s, &full, 2).expect("matching length")
}

/// The three-setting binary inequality in its CG table form:
/// second-party marginals `(-1, 0, 0)`, first-party marginals `(-2, -1, 0)`
/// and correlator rows `(1 1 1), (1 1 -1), (1 -1 0)`, bound 0.
fn i3322() -> BellInequality {
    let s = Scenario::bipartite(&[2, 2, 2], &[2, 2, 2]);
    let mut b = Builder::new(s);
    let ma = [-2, -1, 0];
    let mb = [-1, 0, 0];
    let corr = [[1, 1, 1], [1, 1, -1], [1, -1, 0]];
    for x in 0..3 {
        // Builder collects `>= 0` terms, so store the negated `<= 0` table
        b.pa(-ma[x], 1, x + 1).unwrap();
        b.pb(-mb[x], 1, x + 1).unwrap();
        for y in 0..3 {
            b.pab(-corr[x][y], 1, 1, x + 1, y + 1).unwrap();
        }
    }
    b.ge_zero().unwrap()
}

/// Positivity `P(e) >= 0` for every full-coordinate entry.
pub fn positivity_family(s: &Scenario) -> Vec<BellInequality> {
    (0..s.full_len())
        .map(|e| {
            let mut full = vec![0; s.full_len()];
            full[e] = 1;
            BellInequality::from_full_ge(s, &full, 0).expect("matching length")
        })
        .collect()
}

fn nonempty_proper_subsets(o: usize) -> Vec<Vec<usize>> {
    (1..(1u32 << o) - 1).map(|m| (0..o).filter(|&a| m >> a & 1 == 1).collect()).collect()
}

/// Every lift of CH to `s`: choose two parties `i < j`, an ordered pair of
/// settings for each, a nonempty proper outcome subset per chosen setting
/// (the effective first outcome), and for every other party a setting and
/// a nonempty proper outcome subset to condition on.
///
/// Each member is `0 <= P_i(G_x0) + P_j(H_y0) − P(G_x0 H_y0) − P(G_x0 H_y1)
/// − P(G_x1 H_y0) + P(G_x1 H_y1)`, with conditioning events appended to
/// every term.
pub fn chsh_lift_family(s: &Scenario) -> Result<Vec<BellInequality>> {
    let n = s.num_parties();
    let mut out = Vec::new();
    if n < 2 {
        return Ok(out);
    }
    let setting_pairs = |p: usize| {
        let k = s.num_settings(p);
        (0..k).flat_map(move |x0| (0..k).filter(move |&x1| x1 != x0).map(move |x1| (x0, x1))).collect::<Vec<_>>()
    };
    for i in 0..n {
        for j in i + 1..n {
            let others: Vec<usize> = (0..n).filter(|&p| p != i && p != j).collect();
            let cond_choices: Vec<Vec<(usize, Vec<usize>)>> = others
                .iter()
                .map(|&p| {
                    (0..s.num_settings(p))
                        .flat_map(|x| nonempty_proper_subsets(s.outcomes(p, x)).into_iter().map(move |g| (x, g)))
                        .collect()
                })
                .collect();
            let radices: Vec<usize> = cond_choices.iter().map(Vec::len).collect();
            let mut conds: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
            crate::scenario::for_each_tuple(&radices, |idx| {
                conds.push(idx.iter().enumerate().map(|(k, &c)| cond_choices[k][c].clone()).collect());
            });
            for (x0, x1) in setting_pairs(i) {
                for (y0, y1) in setting_pairs(j) {
                    for gx0 in nonempty_proper_subsets(s.outcomes(i, x0)) {
                        for gx1 in nonempty_proper_subsets(s.outcomes(i, x1)) {
                            for hy0 in nonempty_proper_subsets(s.outcomes(j, y0)) {
                                for hy1 in nonempty_proper_subsets(s.outcomes(j, y1)) {
                                    for cond in &conds {
                                        let mut event = vec![None; n];
                                        for (k, &p) in others.iter().enumerate() {
                                            event[p] = Some(cond[k].clone());
                                        }
                                        let mut term = |a: Option<(usize, &Vec<usize>)>, b: Option<(usize, &Vec<usize>)>| {
                                            event[i] = a.map(|(x, g)| (x, g.clone()));
                                            event[j] = b.map(|(y, h)| (y, h.clone()));
                                            event_functional(s, &event)
                                        };
                                        let parts = [
                                            (1, term(Some((x0, &gx0)), None)),
                                            (1, term(None, Some((y0, &hy0)))),
                                            (-1, term(Some((x0, &gx0)), Some((y0, &hy0)))),
                                            (-1, term(Some((x0, &gx0)), Some((y1, &hy1)))),
                                            (-1, term(Some((x1, &gx1)), Some((y0, &hy0)))),
                                            (1, term(Some((x1, &gx1)), Some((y1, &hy1)))),
                                        ];
                                        let mut full = vec![0i64; s.full_len()];
                                        for (c, f) in parts {
                                            full.iter_mut().zip(f).for_each(|(t, v)| *t += c * v);
                                        }
                                        out.push(BellInequality::from_full_ge(s, &full, 0)?);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The lifted CH inequalities on `[(2 2),(w_1 … w_n)]` in the closed form
/// produced by eliminating the joint-distribution variables.
pub fn theorem1_family(bob: &[usize]) -> Result<Vec<(FamilyId, BellInequality)>> {
    let n = bob.len();
    let mut out = Vec::new();
    for y in 1..=n {
        for y2 in (1..=n).filter(|&v| v != y) {
            for g in nonempty_subsets_1based(bob[y - 1] - 1) {
                for g2 in nonempty_subsets_1based(bob[y2 - 1] - 1) {
                    for a in 1..=2 {
                        let id = FamilyId::ChshLift { bob: bob.to_vec(), y, y2, g: g.clone(), g2: g2.clone(), a };
                        let i = make(&id)?;
                        out.push((id, i));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn nonempty_subsets_1based(m: usize) -> Vec<Vec<usize>> {
    (1..1u32 << m).map(|mask| (0..m).filter(|&b| mask >> b & 1 == 1).map(|b| b + 1).collect()).collect()
}

/// The saturating points of `ineq2(n)` in four groups (labels 1-based in
/// the description, 0-based in the strategies):
/// 1. `α1 = 1, α2 = k`, all `β = 1`;
/// 2. `α1 = 1, α2 = k`, `β_l = 2` and all other `β = 1`, for `k ≠ l`;
/// 3. `α1 = 2, α2 = k`, all `β = 2`;
/// 4. `α1 = 2, α2 = k`, `β_k = 1` and all other `β = 2`.
pub fn saturating_family(n: usize) -> Result<Vec<DeterministicStrategy>> {
    saturating_groups(n).map(|g| g.into_iter().flatten().collect())
}

pub fn saturating_groups(n: usize) -> Result<[Vec<DeterministicStrategy>; 4]> {
    if n < 2 {
        return Err(Error::InvalidFamily(format!("ineq2 needs n >= 2, got {n}")));
    }
    let point = |a1: usize, a2: usize, betas: Vec<usize>| DeterministicStrategy::new(vec![vec![a1, a2], betas]);
    let g1 = (0..n).map(|k| point(0, k, vec![0; n])).collect();
    let g2 = (0..n)
        .flat_map(|k| {
            (0..n).filter(move |&l| l != k).map(move |l| {
                let mut b = vec![0; n];
                b[l] = 1;
                point(0, k, b)
            })
        })
        .collect();
    let g3 = (0..n).map(|k| point(1, k, vec![1; n])).collect();
    let g4 = (0..n)
        .map(|k| {
            let mut b = vec![1; n];
            b[k] = 0;
            point(1, k, b)
        })
        .collect();
    Ok([g1, g2, g3, g4])
}

/// Checks that `ineq2(n)` holds on every vertex of `[(2 n),(2 … 2)]` and
/// that the four saturating groups form a full-rank saturating set.
pub fn verify_theorem4(n: usize) -> Result<FacetCertificate> {
    let i = make(&FamilyId::Ineq2 { n })?;
    let s = i.scenario().clone();
    if let Some(v) = DeterministicStrategy::enumerate(&s).into_iter().find(|v| i.evaluate_strategy(v) > i.bound()) {
        return Err(Error::Internal(format!("ineq2({n}) violated at {v:?}")));
    }
    let points = saturating_family(n)?;
    if let Some(v) = points.iter().find(|v| i.evaluate_strategy(v) != i.bound()) {
        return Err(Error::Internal(format!("ineq2({n}) not saturated at {v:?}")));
    }
    let rows: Vec<Vec<i64>> = points.iter().map(|v| v.cg_vector(&s)).collect();
    let rank = affine_rank_int(&rows)?;
    if rank != s.dimension() {
        return Err(Error::Internal(format!("ineq2({n}) saturating rank {rank}, need {}", s.dimension())));
    }
    FacetCertificate::from_points(&i, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{canonicalize, classify, Label};

    #[test]
    fn chsh_and_ch_coincide() {
        let chsh = make(&FamilyId::Chsh).unwrap();
        assert_eq!(chsh.local_max(), 2);
        assert_eq!(chsh.bound(), 2);
        assert!(chsh.same_as(&make(&FamilyId::Ch).unwrap()));
        assert_eq!(classify(&chsh).unwrap().label, Label::Chsh);
    }

    #[test]
    fn ineq2_three_is_newineq3() {
        let a = make(&FamilyId::Ineq2 { n: 3 }).unwrap();
        let b = make(&FamilyId::NewIneq3).unwrap();
        assert!(a.same_as(&b));
        assert!(canonicalize(&a).unwrap().same_as(&canonicalize(&b).unwrap()));
        assert_eq!(classify(&b).unwrap().label, Label::Other);
        assert!(make(&FamilyId::Ineq2 { n: 1 }).is_err());
    }

    #[test]
    fn two_setting_members_are_chsh_lifts() {
        for (id, i) in theorem1_family(&[3, 2]).unwrap() {
            assert!(i.is_valid(), "{id}");
            assert_eq!(i.local_max(), 0, "{id}");
            assert_eq!(classify(&i).unwrap().label, Label::Chsh, "{id}");
        }
    }

    #[test]
    fn chsh_lift_parameters_are_checked() {
        let mk = |y, y2, g: Vec<usize>, a| make(&FamilyId::ChshLift { bob: vec![3, 3], y, y2, g, g2: vec![1], a });
        assert!(mk(1, 2, vec![1, 2], 1).is_ok());
        assert!(mk(1, 1, vec![1], 1).is_err());
        assert!(mk(1, 2, vec![], 1).is_err());
        assert!(mk(1, 2, vec![3], 1).is_err());
        assert!(mk(1, 2, vec![1], 3).is_err());
    }

    #[test]
    fn saturating_family_sizes() {
        for n in 2..=6 {
            let g = saturating_groups(n).unwrap();
            assert_eq!(g[0].len(), n);
            assert_eq!(g[1].len(), n * (n - 1));
            assert_eq!(g[2].len(), n);
            assert_eq!(g[3].len(), n);
            assert_eq!(saturating_family(n).unwrap().len(), n * (n + 2));
        }
        assert!(saturating_family(1).is_err());
    }

    #[test]
    fn reference_fixtures_are_valid_and_tight() {
        let c = make(&FamilyId::Reference { name: Reference::Cglmp }).unwrap();
        assert_eq!(c.local_max(), 2);
        let f = make(&FamilyId::Reference { name: Reference::Froissart }).unwrap();
        assert_eq!(f.local_max(), 0);
        assert_eq!(classify(&c).unwrap().label, Label::Other);
        assert_eq!(classify(&f).unwrap().label, Label::Other);
    }

    #[test]
    fn family_ids_serialize() {
        let text = serde_json::to_string(&FamilyId::Ineq2 { n: 4 }).unwrap();
        assert_eq!(text, r#"{"family":"ineq2","n":4}"#);
        for id in registry() {
            let back: FamilyId = serde_json::from_str(&serde_json::to_string(&id).unwrap()).unwrap();
            assert_eq!(back, id);
            assert!(make(&id).unwrap().is_valid(), "{id}");
        }
    }
}
