use std::fs;
use std::path::Path;

use newton_lab::oracle::InstanceChecks;
use newton_lab::polygons::LowerPolygon;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// NP below Hodge or with a different endpoint.
    HodgeBound,
    /// `NP = arithmetic` disagrees with `H(a) != 0`.
    GenericMatch,
    /// `p = 1 mod D` but `NP != Hodge`.
    Stickelberger,
    /// NP below the arithmetic polygon where that polygon is generic.
    BelowArithmetic,
    /// Dwork and oracle disagree.
    DworkMismatch,
    /// Dwork polygon moves under `K -> 2K` or `M -> M + 2`.
    Unstable,
    /// A splitting coefficient misses its predicted leading term.
    LeadingTerm,
    /// A splitting coefficient lies below its valuation floor.
    CoefficientFloor,
    /// A characteristic-series coefficient lies below the row-floor bound.
    RowFloor,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub a: String,
    pub kind: CounterexampleKind,
    pub detail: String,
}

/// Polygon ordinates as exact strings, e.g. `["0", "0", "1/2", "3/2"]`.
pub fn polygon_strings(poly: &LowerPolygon) -> Vec<String> {
    poly.ordinates().iter().map(ToString::to_string).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DworkComparison {
    pub np: Vec<String>,
    /// `None` when the oracle was not run.
    pub polygon_match: Option<bool>,
    pub coefficients_match: Option<bool>,
    pub k: i64,
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceRecord {
    pub a: Value,
    /// `H(a)` as coordinates over `F_p`; absent for `e = 0`.
    pub hasse: Option<Vec<u32>>,
    pub hasse_nonzero: Option<bool>,
    pub np: Vec<String>,
    pub checks: InstanceChecks,
    pub dwork: Option<DworkComparison>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Aggregates {
    pub instances: usize,
    pub hasse_zero: usize,
    pub hasse_nonzero: usize,
    pub hasse_undefined: usize,
    pub np_equals_arithmetic: usize,
    pub np_differs_from_arithmetic: usize,
    pub hodge_bound_failures: usize,
    pub generic_match_checked: usize,
    pub generic_match_failures: usize,
    pub stickelberger_checked: usize,
    pub stickelberger_failures: usize,
    pub below_arithmetic: usize,
    pub dwork_compared: usize,
    pub dwork_mismatches: usize,
}

impl Aggregates {
    pub fn from_records(records: &[InstanceRecord]) -> Self {
        let mut a = Aggregates {
            instances: records.len(),
            ..Default::default()
        };
        for r in records {
            match r.hasse_nonzero {
                Some(true) => a.hasse_nonzero += 1,
                Some(false) => a.hasse_zero += 1,
                None => a.hasse_undefined += 1,
            }
            if r.checks.np_equals_arithmetic {
                a.np_equals_arithmetic += 1;
            } else {
                a.np_differs_from_arithmetic += 1;
            }
            a.hodge_bound_failures += usize::from(!r.checks.hodge_bound_ok);
            if let Some(ok) = r.checks.generic_match {
                a.generic_match_checked += 1;
                a.generic_match_failures += usize::from(!ok);
            }
            if let Some(ok) = r.checks.stickelberger_ok {
                a.stickelberger_checked += 1;
                a.stickelberger_failures += usize::from(!ok);
            }
            a.below_arithmetic += usize::from(!r.checks.above_arithmetic);
            if let Some(d) = &r.dwork {
                if let Some(m) = d.polygon_match {
                    a.dwork_compared += 1;
                    a.dwork_mismatches += usize::from(!m || d.coefficients_match == Some(false));
                }
            }
        }
        a
    }
}

/// Result of a verification campaign; sorted and free of timing data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignReport {
    pub config: Value,
    pub threshold_met: bool,
    pub arithmetic: Vec<String>,
    pub hodge: Vec<String>,
    pub aggregates: Aggregates,
    pub counterexamples: Vec<Counterexample>,
    pub instances: Vec<InstanceRecord>,
}

/// Wall-clock and cache statistics, kept out of the report.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub instances: usize,
    pub wall_seconds: f64,
    pub mean_instance_ms: f64,
    pub cache_hits: usize,
    pub cache_spot_checks: usize,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.into(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, text).map_err(CliError::io(path))
}

fn opt(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    }
}

impl CampaignReport {
    /// One row per instance for plotting.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("a,hasse_nonzero,np_equals_arithmetic,hodge_bound_ok,generic_match,np\n");
        for r in &self.instances {
            out.push_str(&format!(
                "\"{}\",{},{},{},{},\"{}\"\n",
                r.a,
                opt(r.hasse_nonzero),
                u8::from(r.checks.np_equals_arithmetic),
                u8::from(r.checks.hodge_bound_ok),
                opt(r.checks.generic_match),
                r.np.join(" ")
            ));
        }
        out
    }

    /// `report.json`, `instances.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("report.json"), self)?;
        write_text(&dir.join("instances.csv"), &self.to_csv())
    }

    pub fn summary(&self) -> String {
        let a = &self.aggregates;
        let mut s = format!(
            "instances: {}\nH(a) != 0: {}  H(a) = 0: {}\nNP = arithmetic: {}  NP != arithmetic: {}\n",
            a.instances, a.hasse_nonzero, a.hasse_zero, a.np_equals_arithmetic, a.np_differs_from_arithmetic
        );
        if !self.threshold_met {
            s.push_str("threshold p >= 3D not met: genericity clause skipped\n");
        }
        if a.dwork_compared > 0 {
            s.push_str(&format!(
                "dwork compared: {}  mismatches: {}\n",
                a.dwork_compared, a.dwork_mismatches
            ));
        }
        s.push_str(&format!(
            "counterexamples: {}\n",
            self.counterexamples.len()
        ));
        s
    }
}
