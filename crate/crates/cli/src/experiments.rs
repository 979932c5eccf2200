//! The named experiments and the facet pipeline they share.

use std::collections::BTreeMap;
use std::time::Instant;

use bellpoly_core::arith::Rat;
use bellpoly_core::families::{ln_scenario, make, verify_theorem4, FamilyId};
use bellpoly_core::inequality::{canonicalize, BellInequality, Label};
use bellpoly_core::polytope::{check_facet, classify_facets, fine_facets, local_facets, DEFAULT_MAX_VERTICES};
use bellpoly_core::scenario::{per_setting_marginals, reconstruct_joint, JointDistribution, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cache::{Cache, Method};
use crate::error::CliResult;
use crate::report::{CertificateReport, CheckReport, ClassReport, ExperimentReport, ScenarioReport};

/// Second-party outcome profiles swept by `theorem1` by default.
pub const THEOREM1_GRID: [&[usize]; 6] = [&[2, 3], &[3, 3], &[3, 4], &[4, 4], &[2, 2, 2], &[2, 2, 3]];

/// `(v2, w1, w2)` for `[(2 v2),(w1 w2)]`.
pub const CONJECTURE2_GRID: [(usize, usize, usize); 4] = [(3, 2, 2), (3, 2, 3), (3, 3, 3), (4, 2, 2)];

/// Non-CHSH classes of the tripartite binary scenario.
pub const TRIPARTITE_OTHER_CLASSES: usize = 44;

const MAX_DETAILS: usize = 5;

/// All `(v2, w1, w2)` with entries in `2..=max` and `w1 <= w2`.
pub fn conjecture2_grid(max: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for v2 in 2..=max {
        for w1 in 2..=max {
            for w2 in w1..=max {
                out.push((v2, w1, w2));
            }
        }
    }
    out
}

pub fn conjecture2_scenario((v2, w1, w2): (usize, usize, usize)) -> Scenario {
    Scenario::bipartite(&[2, v2], &[w1, w2])
}

pub fn tripartite() -> Scenario {
    Scenario::from_slices(&[&[2, 2], &[2, 2], &[2, 2]])
}

/// The four smallest scenarios whose facets go beyond CHSH, with the
/// non-positivity class tags each must show. The tripartite one is only
/// checked by count.
fn observation3_targets(long: bool) -> Vec<(Scenario, Option<[&'static str; 2]>)> {
    let mut v = vec![
        (Scenario::bipartite(&[3, 3], &[3, 3]), Some(["chsh", "cglmp"])),
        (Scenario::bipartite(&[2, 2, 2], &[2, 2, 2]), Some(["chsh", "froissart"])),
        (Scenario::bipartite(&[2, 3], &[2, 2, 2]), Some(["chsh", "newineq3"])),
    ];
    if long {
        v.push((tripartite(), None));
    }
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

/// Runs experiments against a cache with a vertex cap.
#[derive(Clone, Debug)]
pub struct Runner {
    pub cache: Cache,
    pub force: bool,
    pub max_vertices: usize,
}

impl Runner {
    pub fn new(cache: Cache) -> Self {
        Runner { cache, force: false, max_vertices: DEFAULT_MAX_VERTICES }
    }

    fn check_cap(&self, s: &Scenario) -> CliResult<()> {
        let n = s.num_vertices();
        if n > self.max_vertices {
            return Err(bellpoly_core::Error::CapExceeded { what: "local vertices", count: n, cap: self.max_vertices }.into());
        }
        Ok(())
    }

    /// Facets of `s` by `method`, through the cache.
    pub fn facets(&self, s: &Scenario, method: Method) -> CliResult<(Vec<BellInequality>, crate::CacheStatus)> {
        self.check_cap(s)?;
        self.cache.facets(s, method, self.force, || {
            Ok(match method {
                Method::Dd => local_facets(s, self.max_vertices)?,
                Method::Fine => fine_facets(s)?,
            })
        })
    }

    /// Enumerates, classifies and certifies the class representatives.
    pub fn scenario_report(&self, s: &Scenario, method: Method) -> CliResult<(ScenarioReport, Vec<BellInequality>)> {
        let (facets, cache) = self.facets(s, method)?;
        let classes = classify_facets(s, &facets)?;
        let classes: Vec<ClassReport> =
            classes.iter().map(|c| ClassReport::from_count(c, check_facet(s, &c.class.canonical).is_ok())).collect();
        let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
        for c in &classes {
            *counts.entry(c.label).or_default() += c.multiplicity;
        }
        let consistent = counts.values().sum::<usize>() == facets.len();
        let passed = consistent && classes.iter().all(|c| c.certified);
        let report = ScenarioReport {
            scenario: s.clone(),
            method,
            vertices: s.num_vertices(),
            facets: facets.len(),
            counts,
            classes,
            cache,
            expected: None,
            passed,
        };
        Ok((report, facets))
    }

    pub fn cmd_facets(&self, s: &Scenario) -> CliResult<ExperimentReport> {
        let t = Instant::now();
        let mut r = ExperimentReport::new("facets");
        r.scenarios.push(self.scenario_report(s, Method::Dd)?.0);
        Ok(r.finish(elapsed_ms(t)))
    }

    /// `[(2 2),(w_1 … w_n)]` for every profile: only CHSH non-trivial
    /// classes, by both enumeration paths, with identical facet lists.
    pub fn theorem1(&self, profiles: &[Vec<usize>]) -> CliResult<ExperimentReport> {
        let t = Instant::now();
        let mut r = ExperimentReport::new("theorem1");
        let mut scenarios: Vec<Scenario> =
            profiles.iter().map(|w| Scenario::new(vec![vec![2, 2], w.clone()])).collect::<Result<_, _>>()?;
        scenarios.sort();
        for s in &scenarios {
            self.check_cap(s)?;
        }
        for s in scenarios {
            let mut lists = Vec::new();
            for method in [Method::Dd, Method::Fine] {
                let (mut rep, facets) = self.scenario_report(&s, method)?;
                rep.expected = Some("non-trivial classes: chsh only".into());
                rep.passed &= rep.nontrivial_tags().iter().all(|t| t == "chsh");
                r.scenarios.push(rep);
                lists.push(facets);
            }
            let agree = lists[0] == lists[1];
            r.checks.push(CheckReport {
                name: format!("dd and elimination agree on {s}"),
                cases: 1,
                failures: usize::from(!agree),
                details: if agree { vec![] } else { vec![format!("{} vs {} facets", lists[0].len(), lists[1].len())] },
                passed: agree,
            });
        }
        Ok(r.finish(elapsed_ms(t)))
    }

    /// `[(2 v2),(w1 w2)]`: only CHSH non-trivial classes.
    pub fn conjecture2(&self, grid: &[(usize, usize, usize)]) -> CliResult<ExperimentReport> {
        let t = Instant::now();
        let mut r = ExperimentReport::new("conjecture2");
        let mut scenarios: Vec<Scenario> = grid.iter().map(|&g| conjecture2_scenario(g)).collect();
        scenarios.sort();
        scenarios.dedup();
        for s in &scenarios {
            self.check_cap(s)?;
        }
        for s in scenarios {
            let (mut rep, _) = self.scenario_report(&s, Method::Dd)?;
            rep.expected = Some("non-trivial classes: chsh only".into());
            rep.passed &= rep.nontrivial_tags().iter().all(|t| t == "chsh");
            r.scenarios.push(rep);
        }
        Ok(r.finish(elapsed_ms(t)))
    }

    pub fn observation3(&self, long: bool) -> CliResult<ExperimentReport> {
        let t = Instant::now();
        let mut r = ExperimentReport::new("observation3");
        let targets = observation3_targets(long);
        for (s, _) in &targets {
            self.check_cap(s)?;
        }
        for (s, expected) in targets {
            let (mut rep, _) = self.scenario_report(&s, Method::Dd)?;
            let tags = rep.nontrivial_tags();
            let mut distinct = tags.clone();
            distinct.dedup();
            match expected {
                Some(want) => {
                    rep.expected = Some(format!("non-trivial classes: {}", want.join(", ")));
                    let mut want_sorted: Vec<String> = want.iter().map(|w| w.to_string()).collect();
                    want_sorted.sort();
                    rep.passed &= distinct == want_sorted;
                }
                None => {
                    let others = tags.iter().filter(|t| *t != "chsh").count();
                    // tags of unnamed classes repeat, so count classes rather than distinct tags
                    rep.expected = Some(format!("chsh plus {TRIPARTITE_OTHER_CLASSES} further non-trivial classes"));
                    rep.passed &= others == TRIPARTITE_OTHER_CLASSES && tags.iter().any(|t| t == "chsh");
                }
            }
            r.scenarios.push(rep);
        }
        // the new class is the orbit of the explicit inequality
        let new3 = canonicalize(&make(&FamilyId::NewIneq3)?)?;
        let found = r
            .scenarios
            .iter()
            .flat_map(|s| &s.classes)
            .find(|c| c.name.as_deref() == Some("newineq3"))
            .map(|c| BellInequality::from_json(c.canonical.clone()))
            .transpose()?;
        let matches = found.as_ref().is_some_and(|f| f.same_as(&new3));
        r.checks.push(CheckReport {
            name: "newineq3 class representative".into(),
            cases: 1,
            failures: usize::from(!matches),
            details: if matches { vec![] } else { vec![format!("expected {}", new3.render())] },
            passed: matches,
        });
        Ok(r.finish(elapsed_ms(t)))
    }

    pub fn theorem4(&self, ns: &[usize]) -> CliResult<ExperimentReport> {
        let t = Instant::now();
        let mut r = ExperimentReport::new("theorem4");
        for &n in ns {
            let i = make(&FamilyId::Ineq2 { n })?;
            let s = ln_scenario(n);
            let dim = n * (n + 2);
            let report = match verify_theorem4(n) {
                Ok(cert) => CertificateReport {
                    name: format!("ineq2({n})"),
                    inequality: i.to_json(),
                    vertices_checked: s.num_vertices(),
                    saturating_points: cert.saturating_vertices.len(),
                    affine_rank: cert.affine_rank(),
                    dimension: s.dimension(),
                    passed: cert.verify()
                        && s.dimension() == dim
                        && cert.saturating_vertices.len() == dim
                        && cert.affine_rank() == dim,
                },
                Err(_) => CertificateReport {
                    name: format!("ineq2({n})"),
                    inequality: i.to_json(),
                    vertices_checked: s.num_vertices(),
                    saturating_points: 0,
                    affine_rank: 0,
                    dimension: s.dimension(),
                    passed: false,
                },
            };
            r.certificates.push(report);
        }
        Ok(r.finish(elapsed_ms(t)))
    }

    /// Marginalizes random joints to per-setting tables, reconstructs and
    /// compares exactly.
    pub fn fine_lemma(&self, scenarios: &[Scenario], cases: usize, seed: u64) -> CliResult<ExperimentReport> {
        let t = Instant::now();
        let mut r = ExperimentReport::new("fine-lemma");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in scenarios {
            let mut details = Vec::new();
            let mut failures = 0;
            for case in 0..cases {
                if let Err(e) = fine_lemma_case(&mut rng, s) {
                    failures += 1;
                    if details.len() < MAX_DETAILS {
                        details.push(format!("case {case}: {e}"));
                    }
                }
            }
            r.checks.push(CheckReport {
                name: format!("reconstruction on {s}"),
                cases,
                failures,
                details,
                passed: failures == 0,
            });
        }
        Ok(r.finish(elapsed_ms(t)))
    }
}

/// Random joint with about a third of the entries zero, so that vanishing
/// first-party marginals occur.
pub fn random_joint<R: Rng>(rng: &mut R, s: &Scenario) -> CliResult<JointDistribution> {
    let n = s.num_vertices();
    let mut w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.35) { 0 } else { rng.gen_range(1..=9) }).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    Ok(JointDistribution::new(s.clone(), w.iter().map(|&v| Rat::new(v, total)).collect())?)
}

fn fine_lemma_case<R: Rng>(rng: &mut R, s: &Scenario) -> Result<(), String> {
    let d = random_joint(rng, s).map_err(|e| e.to_string())?;
    let tables = per_setting_marginals(&d).map_err(|e| e.to_string())?;
    let rebuilt = reconstruct_joint(&tables, s).map_err(|e| e.to_string())?;
    if per_setting_marginals(&rebuilt).map_err(|e| e.to_string())? != tables {
        return Err("per-setting marginals differ".into());
    }
    if rebuilt.to_behavior() != d.to_behavior() {
        return Err("recovered behavior differs".into());
    }
    Ok(())
}
