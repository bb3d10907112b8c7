//! Persistence of the `T̂_j` table across runs, at the path named by
//! `CMC_LADDER_CACHE`.
//!
//! Entries are checked against the defining recursion before they are
//! preloaded, so a stale or edited file can never change a result; it is
//! ignored instead.

use std::path::{Path, PathBuf};

use cmc_ladder::jetring::{self, gamma_pow, r_pow, z, JetPoly, Rules};
use cmc_ladder::Gq;
use serde_json::{json, Map, Value};

use crate::codec;
use crate::error::{CliError, CliResult};
use crate::report::SCHEMA;

pub const ENV: &str = "CMC_LADDER_CACHE";

pub fn path_from_env() -> Option<PathBuf> {
    std::env::var_os(ENV).filter(|s| !s.is_empty()).map(PathBuf::from)
}

fn recursion_holds(j: u32, prev: Option<&JetPoly>, p: &JetPoly) -> bool {
    let gr = &gamma_pow(2) - &r_pow(2);
    if j == 3 {
        return *p == gr;
    }
    let Some(prev) = prev else { return false };
    let k = (j - 1) as i64;
    let Ok(d) = Rules::with_cap(j).d_omega(prev) else { return false };
    let want = d + (&z(3) * prev).scale(&Gq::ratio(k - 1, 2)) + (&gr * &z(j - 1)).scale(&Gq::ratio(k, 2));
    want == *p
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadOutcome {
    pub loaded: usize,
    /// First index whose entry failed the recursion; later entries are
    /// skipped.
    pub rejected_at: Option<u32>,
}

/// Reads the table and preloads every verified entry. A missing file is
/// an empty cache.
pub fn load(path: &Path) -> CliResult<LoadOutcome> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(LoadOutcome::default()),
        Err(source) => return Err(CliError::Io { path: path.to_path_buf(), source }),
    };
    let v: Value = serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    if v.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        return Err(CliError::Input(format!("{}: unknown cache schema", path.display())));
    }
    let table = v.get("that").and_then(Value::as_object).cloned().unwrap_or_default();
    let mut entries: Vec<(u32, JetPoly)> = Vec::new();
    for (k, p) in &table {
        let j: u32 = k.parse().map_err(|_| CliError::Input(format!("cache key {:?} is not an index", k)))?;
        entries.push((j, codec::parse_jet_poly(p)?));
    }
    entries.sort_by_key(|(j, _)| *j);
    let mut out = LoadOutcome::default();
    let mut prev: Option<(u32, JetPoly)> = None;
    for (j, p) in entries {
        let chained = prev.as_ref().filter(|(i, _)| *i + 1 == j).map(|(_, q)| q);
        if !recursion_holds(j, chained, &p) || !jetring::preload_that(j, p.clone()) {
            out.rejected_at = Some(j);
            break;
        }
        out.loaded += 1;
        prev = Some((j, p));
    }
    Ok(out)
}

pub fn store(path: &Path) -> CliResult<usize> {
    let snap = jetring::that_cache_snapshot();
    let mut table = Map::new();
    for (j, p) in &snap {
        table.insert(j.to_string(), codec::poly(p));
    }
    let v = json!({ "schema": SCHEMA, "that": Value::Object(table) });
    let text = serde_json::to_string(&v).expect("cache table serializes");
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(snap.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_accepts_the_real_table_only() {
        let t3 = jetring::that(3).unwrap();
        let t4 = jetring::that(4).unwrap();
        let t5 = jetring::that(5).unwrap();
        assert!(recursion_holds(3, None, &t3));
        assert!(recursion_holds(4, Some(&t3), &t4));
        assert!(recursion_holds(5, Some(&t4), &t5));
        assert!(!recursion_holds(5, Some(&t4), &t5.scale(&Gq::int(2))));
        assert!(!recursion_holds(5, None, &t5));
    }
}
