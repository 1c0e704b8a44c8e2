use std::path::Path;

use newton_lab::dwork::DworkBudget;
use newton_lab::hasse::{hasse_report, HasseReport};
use newton_lab::oracle::{l_polynomial_with, newton_polygon, LOptions, LPolynomial};
use newton_lab::polygons::{
    analyze_arithmetic_polygon, arithmetic_polygon, convexity_report, hodge_polygon,
    ArithmeticAnalysis, IntervalShape, LowerPolygon, Threshold,
};
use serde_json::json;

use crate::campaign::dump_diagnostics;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{polygon_strings, write_json, write_text};

/// Output of the `polygon` subcommand.
#[derive(Clone, Debug)]
pub struct PolygonOutput {
    pub hodge: LowerPolygon,
    pub arithmetic: LowerPolygon,
    /// Convexity and vertex analysis; `e > 0` only.
    pub analysis: Option<ArithmeticAnalysis>,
    pub text: String,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn cmd_polygon(p: u64, shape: IntervalShape, out: Option<&Path>) -> Result<PolygonOutput> {
    shape.check_prime(p)?;
    let hodge = hodge_polygon(&shape);
    let arithmetic = arithmetic_polygon(p, &shape)?;
    let analysis = shape
        .is_laurent()
        .then(|| analyze_arithmetic_polygon(p, &shape))
        .transpose()?;
    let mut text = format!("hodge:      {hodge}\narithmetic: {arithmetic}\n");
    let differ: Vec<usize> = (0..=hodge.len())
        .filter(|&k| hodge.ordinate(k) != arithmetic.ordinate(k))
        .collect();
    if differ.is_empty() {
        text.push_str("arithmetic = hodge\n");
    } else {
        for k in &differ {
            text.push_str(&format!(
                "differ at k={k}: arithmetic {} vs hodge {}\n",
                arithmetic.ordinate(*k),
                hodge.ordinate(*k)
            ));
        }
    }
    let convexity = analysis
        .as_ref()
        .map(|a| a.convexity.clone())
        .unwrap_or_else(|| convexity_report(&arithmetic));
    text.push_str(&format!(
        "vertices: {:?}\nconvex: {}\n",
        convexity.vertex_abscissae,
        yes_no(convexity.is_convex)
    ));
    if let Some(a) = &analysis {
        text.push_str(&format!(
            "vertex criterion (|V_k| = 1): {}\nlocal relations hold: {}\n",
            yes_no(a.vertex_criterion_holds),
            yes_no(a.local_relations.iter().all(|r| r.holds))
        ));
        if !a.threshold_met {
            text.push_str(&format!(
                "warning: p = {p} <= 3D = {}; convexity is not guaranteed\n",
                3 * shape.big_d()
            ));
        }
    }
    if let Some(dir) = out {
        write_json(&dir.join("hodge.json"), &hodge.to_json())?;
        write_text(&dir.join("hodge.csv"), &hodge.to_csv())?;
        write_json(&dir.join("arithmetic.json"), &arithmetic.to_json())?;
        write_text(&dir.join("arithmetic.csv"), &arithmetic.to_csv())?;
        if let Some(a) = &analysis {
            let value = json!({
                "convex": a.convexity.is_convex,
                "vertices": a.convexity.vertex_abscissae,
                "singleton_abscissae": a.singleton_abscissae,
                "vertex_criterion_holds": a.vertex_criterion_holds,
                "local_relations": a.local_relations,
                "threshold_met": a.threshold_met,
            });
            write_json(&dir.join("convexity.json"), &value)?;
        }
    }
    Ok(PolygonOutput {
        hodge,
        arithmetic,
        analysis,
        text,
    })
}

/// Output of the `hasse` subcommand.
#[derive(Clone, Debug)]
pub struct HasseOutput {
    pub report: HasseReport,
    pub text: String,
}

pub fn cmd_hasse(p: u64, shape: IntervalShape, out: Option<&Path>) -> Result<HasseOutput> {
    let report = hasse_report(p, &shape)?;
    let mut text = String::new();
    if report.threshold_warning {
        text.push_str(&format!(
            "warning: p = {p} < 3D = {}; H(a) need not characterize genericity\n",
            3 * shape.big_d()
        ));
    }
    text.push_str(&format!("H = {}\n", report.polynomial));
    for c in &report.components {
        text.push_str(&format!(
            "k={} (m,n)=({},{}) |S_k|={} H_k = {}\n",
            c.k,
            c.pair.m,
            c.pair.n,
            c.permutations.len(),
            c.polynomial
        ));
    }
    if let Some(dir) = out {
        let components: Vec<_> = report
            .components
            .iter()
            .map(|c| {
                json!({
                    "k": c.k,
                    "m": c.pair.m,
                    "n": c.pair.n,
                    "s_k": c.permutations.len(),
                    "polynomial": c.polynomial.to_json(),
                    "display": c.polynomial.to_string(),
                })
            })
            .collect();
        let value = json!({
            "p": p,
            "d": shape.d(),
            "e": shape.e(),
            "H": report.polynomial.to_json(),
            "display": report.polynomial.to_string(),
            "components": components,
            "threshold_warning": report.threshold_warning,
        });
        write_json(&dir.join("hasse.json"), &value)?;
    }
    Ok(HasseOutput { report, text })
}

/// Output of the `oracle` subcommand.
#[derive(Clone, Debug)]
pub struct OracleOutput {
    pub l: LPolynomial,
    pub newton: LowerPolygon,
    pub text: String,
}

/// Exact L-polynomial of one vector; with the Dwork engine enabled, also
/// its diagnostic dump.
pub fn cmd_oracle(config: &ExperimentConfig) -> Result<OracleOutput> {
    let f = config.single()?;
    let l = l_polynomial_with(
        &f,
        &LOptions {
            guard: config.guard,
            ..LOptions::default()
        },
    )?;
    let newton = newton_polygon(&l, f.b())?;
    let mut text = format!("a = {f}\n");
    for (j, c) in l.coeffs().iter().enumerate() {
        text.push_str(&format!("c_{j} = {c}\n"));
    }
    text.push_str(&format!("NP: {newton}\n"));
    text.push_str(&format!(
        "threshold p >= 3D: {}\n",
        yes_no(Threshold::AtLeast3D.met(config.p, &config.shape))
    ));
    if let Some(dir) = &config.out {
        let value = json!({
            "a": f.to_json(),
            "L": l.to_json(),
            "np": polygon_strings(&newton),
        });
        write_json(&dir.join("oracle.json"), &value)?;
        if config.engines.uses_dwork() {
            let budget = DworkBudget::for_shape(&config.shape);
            text.push_str(&format!(
                "dwork budget: K = {}, M = {}\n",
                budget.k, budget.precision
            ));
            dump_diagnostics(&f, &dir.join("diagnostics"))?;
        }
    }
    Ok(OracleOutput { l, newton, text })
}
