//! On-disk cache of facet enumerations, one JSON file per scenario and
//! method, named by a SHA-256 of the scenario.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use bellpoly_core::inequality::{BellInequality, InequalityJson};
use bellpoly_core::scenario::Scenario;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const DEFAULT_DIR: &str = "bellpoly-cache";
pub const ENV_VAR: &str = "BELLPOLY_CACHE";
const FORMAT: u32 = 1;

/// How a facet list was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Double description on the deterministic vertices.
    Dd,
    /// Elimination of the joint-distribution system.
    Fine,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dd => "dd",
            Method::Fine => "fine",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheStatus {
    Hit,
    Miss,
    /// Recomputed because of `--force`.
    Refreshed,
    Disabled,
}

impl fmt::Display for CacheStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheStatus::Hit => "hit",
            CacheStatus::Miss => "miss",
            CacheStatus::Refreshed => "refreshed",
            CacheStatus::Disabled => "disabled",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    format: u32,
    method: Method,
    scenario: Scenario,
    facets: Vec<InequalityJson>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: Some(dir.into()) }
    }

    /// Never reads or writes.
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(s: &Scenario, method: Method) -> String {
        let mut h = Sha256::new();
        h.update(format!("bellpoly/{FORMAT}/{method}/{s}"));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path(&self, s: &Scenario, method: Method) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", Self::key(s, method))))
    }

    fn load(path: &Path, s: &Scenario, method: Method) -> CliResult<Vec<BellInequality>> {
        let text = fs::read_to_string(path)?;
        let entry: Entry = serde_json::from_str(&text).map_err(|e| CliError::Cache(path.to_owned(), e.to_string()))?;
        if entry.format != FORMAT || entry.method != method || entry.scenario != *s {
            return Err(CliError::Cache(path.to_owned(), "entry belongs to another scenario or format".into()));
        }
        Ok(entry.facets.into_iter().map(BellInequality::from_json).collect::<Result<_, _>>()?)
    }

    fn store(path: &Path, s: &Scenario, method: Method, facets: &[BellInequality]) -> CliResult<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let entry = Entry { format: FORMAT, method, scenario: s.clone(), facets: facets.iter().map(|f| f.to_json()).collect() };
        // write then rename so an interrupted run leaves no partial entry
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string(&entry).expect("entries serialize"))?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Cached facets of `s`, computing and storing them on a miss or when
    /// `force` is set.
    pub fn facets(
        &self,
        s: &Scenario,
        method: Method,
        force: bool,
        compute: impl FnOnce() -> CliResult<Vec<BellInequality>>,
    ) -> CliResult<(Vec<BellInequality>, CacheStatus)> {
        let Some(path) = self.path(s, method) else { return Ok((compute()?, CacheStatus::Disabled)) };
        if !force && path.exists() {
            return Ok((Self::load(&path, s, method)?, CacheStatus::Hit));
        }
        let facets = compute()?;
        Self::store(&path, s, method, &facets)?;
        Ok((facets, if force { CacheStatus::Refreshed } else { CacheStatus::Miss }))
    }
}
