use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use marcwt_core::discrete::{
    check_degraded, theorem1_pentagon, theorem2_region, theorem3_region, theorem41_outer, DmFactorization, Theorem,
};
use marcwt_core::format::round_sig;
use marcwt_core::geometry::{hull_union, max_support_deficit, quadrant_directions};
use marcwt_core::RateRegion;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Preset, ScenarioConfig, Strategy};
use crate::output::{ensure_dir, svg_overlay, write_atomic};
use crate::report::{evaluate, num, pentagon_caps, Report, StrategyOutput};
use crate::CliError;

/// Number of first-quadrant directions used by `compare`.
pub const COMPARE_DIRECTIONS: usize = 181;

/// Containment tolerances reported by `compare`, with their JSON keys.
pub const COMPARE_TOLERANCES: [(&str, f64); 3] = [("0", 0.0), ("1e-9", 1e-9), ("1e-2", 1e-2)];

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes())
}

fn write_outputs(dir: &Path, outputs: &[StrategyOutput]) -> Result<(), CliError> {
    for o in outputs {
        let name = o.strategy.name();
        write_text(&dir.join(format!("{name}.csv")), &o.region.to_csv())?;
        write_text(&dir.join(format!("{name}.json")), &o.report.to_json())?;
    }
    Ok(())
}

fn region_of(outputs: &[StrategyOutput], s: Strategy) -> Option<&RateRegion> {
    outputs.iter().find(|o| o.strategy == s).map(|o| &o.region)
}

/// Area of the convex hull of every inner bound in `outputs`.
fn inner_hull_area(outputs: &[StrategyOutput]) -> f64 {
    hull_union(
        outputs
            .iter()
            .filter(|o| o.strategy != Strategy::Outer)
            .map(|o| &o.region),
    )
    .area()
}

fn summary(config: &ScenarioConfig, outputs: &[StrategyOutput]) -> Value {
    let areas: BTreeMap<&str, f64> = outputs
        .iter()
        .map(|o| (o.strategy.name(), o.report.area_bits2))
        .collect();
    let inner = inner_hull_area(outputs);
    let gap = region_of(outputs, Strategy::Outer).map(|outer| outer.area() - inner);
    json!({
        "scenario": {
            "p1": num(config.scenario.p1),
            "p2": num(config.scenario.p2),
            "pr": num(config.scenario.pr),
            "nr": num(config.scenario.nr),
            "n1": num(config.scenario.n1),
            "n2": num(config.scenario.n2),
        },
        "q": config.q.map_or(Value::Null, num),
        "grids": config.grids,
        "areas_bits2": areas,
        "inner_hull_area_bits2": num(inner),
        "outer_gap_bits2": gap.map_or(Value::Null, num),
    })
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn evaluate_all(config: &ScenarioConfig) -> Result<Vec<StrategyOutput>, CliError> {
    config.validate()?;
    config
        .strategy
        .expand()
        .into_iter()
        .map(|s| evaluate(config, s))
        .collect()
}

/// `marcwt gauss`: writes `<strategy>.csv` and `<strategy>.json` for each
/// requested strategy, plus `summary.json` for `all`. Nothing is written
/// unless every strategy evaluates.
pub fn cmd_gauss(config: &ScenarioConfig, out: &Path) -> Result<Vec<StrategyOutput>, CliError> {
    let outputs = evaluate_all(config)?;
    ensure_dir(out)?;
    write_outputs(out, &outputs)?;
    if config.strategy == Strategy::All {
        write_text(&out.join("summary.json"), &to_pretty(&summary(config, &outputs)))?;
    }
    Ok(outputs)
}

#[derive(Debug, Clone)]
pub struct FigureRun {
    pub preset: Preset,
    pub outputs: Vec<StrategyOutput>,
    pub svg_path: PathBuf,
}

impl FigureRun {
    pub fn region(&self, s: Strategy) -> &RateRegion {
        region_of(&self.outputs, s).expect("figures evaluate every strategy")
    }

    pub fn area(&self, s: Strategy) -> f64 {
        self.region(s).area()
    }

    /// `area(outer) − area(hull of the inner bounds)`.
    pub fn outer_gap(&self) -> f64 {
        self.area(Strategy::Outer) - inner_hull_area(&self.outputs)
    }
}

/// `marcwt figure`: the preset's five regions, `summary.json`, and an SVG
/// overlay named `figure<id>.svg`.
pub fn cmd_figure(id: u8, out: &Path) -> Result<FigureRun, CliError> {
    let preset = Preset::from_id(id)
        .ok_or_else(|| CliError::Invalid(format!("--id must be one of 2, 3, 4, 5, got {id}")))?;
    let config = preset.config(Strategy::All);
    let outputs = cmd_gauss(&config, out)?;
    let regions: Vec<(&str, &RateRegion)> =
        outputs.iter().map(|o| (o.strategy.name(), &o.region)).collect();
    let frame = region_of(&outputs, Strategy::Outer).expect("all includes outer");
    let title = format!("Secrecy rate regions, Nr = {}", preset.nr());
    let svg_path = out.join(format!("figure{id}.svg"));
    write_text(&svg_path, &svg_overlay(&title, &regions, frame))?;
    Ok(FigureRun {
        preset,
        outputs,
        svg_path,
    })
}

fn dm_report(f: &DmFactorization) -> Result<(Report, RateRegion), CliError> {
    let theorem = format!("{:?}", f.theorem());
    let (pentagon, branch, feasible, region, extra) = match f.theorem() {
        Theorem::T1 => {
            let p = theorem1_pentagon(f)?;
            (p, None, true, p.vertices(), json!({}))
        }
        Theorem::T2 => {
            let o = theorem2_region(f)?;
            let extra = json!({
                "rr_bits": num(o.rr),
                "i_xr_y_bits": num(o.i_xr_y),
                "i_xr_z_bits": num(o.i_xr_z),
            });
            (o.pentagon, Some(o.branch), true, o.pentagon.vertices(), extra)
        }
        Theorem::T3 => {
            let o = theorem3_region(f)?;
            let extra = json!({
                "r_star_bits": num(o.r_star),
                "r_star_r1_bits": num(o.r_star_r1),
                "r_star_max_bits": num(o.r_star_max()),
                "compression_rate_bits": num(o.compression_rate),
                "i_xr_y_bits": num(o.i_xr_y),
                "i_xr_z_bits": num(o.i_xr_z),
            });
            (o.caps, Some(o.branch), o.feasible, o.region(), extra)
        }
        Theorem::T41 => {
            let p = theorem41_outer(f)?;
            let extra = json!({ "degraded_tv": num(check_degraded(f.joint())?) });
            (p, None, true, p.vertices(), extra)
        }
    };
    let mut params = json!({ "theorem": theorem });
    if let (Value::Object(base), Value::Object(more)) = (&mut params, extra) {
        base.extend(more);
    }
    let region = region.rounded();
    let report = Report {
        strategy: "dm".to_string(),
        branch: branch.map(|b| format!("{b:?}")),
        feasible,
        caps_bits: Some(pentagon_caps(&pentagon)),
        area_bits2: round_sig(region.area()),
        params,
    };
    Ok((report, region))
}

/// `marcwt dm`: evaluates the theorem named in the factorization file and
/// writes `dm.csv` and `dm.json`.
pub fn cmd_dm(spec: &Path, out: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::io(spec, e))?;
    let f = DmFactorization::from_json(&text)?;
    let (report, region) = dm_report(&f)?;
    ensure_dir(out)?;
    write_text(&out.join("dm.csv"), &region.to_csv())?;
    write_text(&out.join("dm.json"), &report.to_json())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub a: String,
    pub b: String,
    pub area_a_bits2: f64,
    pub area_b_bits2: f64,
    /// Whether `a ⊆ b`, keyed by tolerance.
    pub a_in_b: BTreeMap<String, bool>,
    /// Whether `b ⊆ a`, keyed by tolerance.
    pub b_in_a: BTreeMap<String, bool>,
    pub directions: usize,
    /// `max_d h_a(d) − h_b(d)`: how far `a` reaches beyond `b`.
    pub a_beyond_b_bits: f64,
    /// `max_d h_b(d) − h_a(d)`.
    pub b_beyond_a_bits: f64,
    /// The larger of the two, floored at zero.
    pub max_support_deficit_bits: f64,
}

impl CompareReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn read_region(path: &Path) -> Result<RateRegion, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    RateRegion::from_csv(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Compares two regions by direct containment and by support functions over
/// the first quadrant.
pub fn compare_regions(a: &RateRegion, b: &RateRegion) -> (BTreeMap<String, bool>, BTreeMap<String, bool>, f64, f64) {
    let contain = |outer: &RateRegion, inner: &RateRegion| {
        COMPARE_TOLERANCES
            .iter()
            .map(|&(k, tol)| (k.to_string(), outer.contains(inner, tol)))
            .collect()
    };
    let dirs = quadrant_directions(COMPARE_DIRECTIONS);
    (
        contain(b, a),
        contain(a, b),
        max_support_deficit(b, a, &dirs),
        max_support_deficit(a, b, &dirs),
    )
}

/// `marcwt compare`.
pub fn cmd_compare(a_path: &Path, b_path: &Path) -> Result<CompareReport, CliError> {
    let a = read_region(a_path)?;
    let b = read_region(b_path)?;
    let (a_in_b, b_in_a, a_beyond, b_beyond) = compare_regions(&a, &b);
    Ok(CompareReport {
        a: a_path.display().to_string(),
        b: b_path.display().to_string(),
        area_a_bits2: round_sig(a.area()),
        area_b_bits2: round_sig(b.area()),
        a_in_b,
        b_in_a,
        directions: COMPARE_DIRECTIONS,
        a_beyond_b_bits: round_sig(a_beyond),
        b_beyond_a_bits: round_sig(b_beyond),
        max_support_deficit_bits: round_sig(a_beyond.max(b_beyond).max(0.0)),
    })
}
