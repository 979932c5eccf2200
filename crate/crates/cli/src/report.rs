//! Machine-readable experiment reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bellpoly_core::inequality::{InequalityJson, Label};
use bellpoly_core::polytope::ClassCount;
use bellpoly_core::scenario::Scenario;
use serde::{Deserialize, Serialize};

use crate::cache::{CacheStatus, Method};

/// Version of the report layout.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub experiment: String,
    pub passed: bool,
    pub scenarios: Vec<ScenarioReport>,
    pub certificates: Vec<CertificateReport>,
    pub checks: Vec<CheckReport>,
    /// Not part of the reproducible content.
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub method: Method,
    pub vertices: usize,
    pub facets: usize,
    pub counts: BTreeMap<Label, usize>,
    pub classes: Vec<ClassReport>,
    pub cache: CacheStatus,
    /// What the experiment asserted about this scenario, if anything.
    pub expected: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub label: Label,
    pub name: Option<String>,
    pub multiplicity: usize,
    pub orbit_size: usize,
    pub canonical: InequalityJson,
    pub text: String,
    /// The representative passed the facet check.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub name: String,
    pub inequality: InequalityJson,
    pub vertices_checked: usize,
    pub saturating_points: usize,
    pub affine_rank: usize,
    pub dimension: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First few failure descriptions.
    pub details: Vec<String>,
    pub passed: bool,
}

impl ClassReport {
    pub fn from_count(c: &ClassCount, certified: bool) -> Self {
        ClassReport {
            label: c.class.label,
            name: c.class.name.clone(),
            multiplicity: c.multiplicity,
            orbit_size: c.class.orbit_size,
            canonical: c.class.canonical.to_json(),
            text: c.class.canonical.render(),
            certified,
        }
    }

    /// `chsh`, `positivity`, the reference name, or `other`.
    pub fn tag(&self) -> String {
        match (&self.label, &self.name) {
            (Label::Other, Some(n)) => n.clone(),
            (l, _) => l.to_string(),
        }
    }
}

impl ScenarioReport {
    /// Tags of the non-positivity classes, sorted, one per class.
    pub fn nontrivial_tags(&self) -> Vec<String> {
        let mut tags: Vec<String> =
            self.classes.iter().filter(|c| c.label != Label::Positivity).map(ClassReport::tag).collect();
        tags.sort();
        tags
    }
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport {
            schema: SCHEMA,
            experiment: experiment.to_owned(),
            passed: true,
            scenarios: Vec::new(),
            certificates: Vec::new(),
            checks: Vec::new(),
            wall_time_ms: 0,
        }
    }

    /// Recomputes `passed` from the parts.
    pub fn finish(mut self, wall_time_ms: u64) -> Self {
        self.passed = self.scenarios.iter().all(|s| s.passed)
            && self.certificates.iter().all(|c| c.passed)
            && self.checks.iter().all(|c| c.passed);
        self.wall_time_ms = wall_time_ms;
        self
    }

    /// The report with timing and cache status cleared, for comparing runs.
    pub fn reproducible(&self) -> Self {
        let mut r = self.clone();
        r.wall_time_ms = 0;
        for s in &mut r.scenarios {
            s.cache = CacheStatus::Disabled;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable summary.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {verdict} ({} ms)", self.experiment, self.wall_time_ms);
        for s in &self.scenarios {
            let counts: Vec<String> = s.counts.iter().map(|(l, n)| format!("{l}={n}")).collect();
            let _ = writeln!(
                out,
                "  {:<24} {:<4} vertices={:<4} facets={:<6} {} [{}] {}",
                s.scenario.to_string(),
                s.method,
                s.vertices,
                s.facets,
                counts.join(" "),
                s.cache,
                if s.passed { "ok" } else { "FAIL" }
            );
            for c in s.classes.iter().filter(|c| c.label != Label::Positivity) {
                let _ = writeln!(out, "      {:<12} x{:<5} {}", c.tag(), c.multiplicity, c.text);
            }
            if let Some(e) = &s.expected {
                let _ = writeln!(out, "      expected: {e}");
            }
        }
        for c in &self.certificates {
            let _ = writeln!(
                out,
                "  {:<12} saturating={:<3} rank={}/{} vertices={} {}",
                c.name,
                c.saturating_points,
                c.affine_rank,
                c.dimension,
                c.vertices_checked,
                if c.passed { "ok" } else { "FAIL" }
            );
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  {:<32} cases={:<5} failures={} {}",
                c.name,
                c.cases,
                c.failures,
                if c.passed { "ok" } else { "FAIL" }
            );
            for d in &c.details {
                let _ = writeln!(out, "      {d}");
            }
        }
        out
    }
}
