use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use newton_lab::oracle::{LPolynomial, LaurentCoeffVector};
use newton_lab::polygons::LowerPolygon;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CacheLine {
    p: u64,
    b: usize,
    d: u32,
    e: u32,
    a: Value,
    #[serde(rename = "L")]
    l: Value,
    np: Value,
}

type CacheKey = (u64, usize, u32, u32, String);

fn key_of(f: &LaurentCoeffVector) -> CacheKey {
    let s = f.shape();
    (f.p(), f.b(), s.d(), s.e(), f.to_json().to_string())
}

/// Append-only JSON-lines store of exact L-polynomials and their polygons.
#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<CacheKey, CacheLine>,
    pending: BTreeMap<CacheKey, CacheLine>,
}

impl Cache {
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(path).map_err(CliError::io(path))?;
            for (n, line) in text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
            {
                let entry: CacheLine = serde_json::from_str(line).map_err(|e| CliError::Cache {
                    path: path.into(),
                    detail: format!("line {}: {e}", n + 1),
                })?;
                let key = (entry.p, entry.b, entry.d, entry.e, entry.a.to_string());
                entries.insert(key, entry);
            }
        }
        Ok(Cache {
            path: path.into(),
            entries,
            pending: BTreeMap::new(),
        })
    }

    fn corrupt(&self, detail: String) -> CliError {
        CliError::Cache {
            path: self.path.clone(),
            detail,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len() + self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, f: &LaurentCoeffVector) -> Result<Option<(LPolynomial, LowerPolygon)>> {
        let key = key_of(f);
        let Some(entry) = self.entries.get(&key).or_else(|| self.pending.get(&key)) else {
            return Ok(None);
        };
        let l = LPolynomial::from_json(f.p() as u32, f.b(), f.shape(), &entry.l)
            .map_err(|e| self.corrupt(format!("entry {f}: {e}")))?;
        let np = LowerPolygon::from_json(&entry.np)
            .map_err(|e| self.corrupt(format!("entry {f}: {e}")))?;
        Ok(Some((l, np)))
    }

    /// Records a freshly computed entry; existing entries are kept.
    pub fn insert(&mut self, f: &LaurentCoeffVector, l: &LPolynomial, np: &LowerPolygon) {
        let key = key_of(f);
        if self.entries.contains_key(&key) {
            return;
        }
        let s = f.shape();
        let line = CacheLine {
            p: f.p(),
            b: f.b(),
            d: s.d(),
            e: s.e(),
            a: f.to_json(),
            l: l.to_json(),
            np: np.to_json(),
        };
        self.pending.insert(key, line);
    }

    /// Appends pending entries in key order.
    pub fn flush(&mut self) -> Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        }
        let mut out = String::new();
        for line in self.pending.values() {
            out.push_str(&serde_json::to_string(line).expect("cache lines serialize"));
            out.push('\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(CliError::io(&self.path))?;
        file.write_all(out.as_bytes())
            .map_err(CliError::io(&self.path))?;
        self.entries.append(&mut self.pending);
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub(crate) fn mismatch(&self, f: &LaurentCoeffVector) -> CliError {
        self.corrupt(format!("cached result for {f} differs from recomputation"))
    }
}
