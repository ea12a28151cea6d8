//! Per-strategy region evaluation and the JSON report written next to each
//! region CSV.
//!
//! `caps_bits` holds the pentagon's own `[r1, r2, sum]` constraints for
//! strategies that yield a single pentagon (`nf`, `baseline`, `cf` on its
//! `G4` branch, and every `dm` theorem). Strategies that take a hull over a
//! parameter sweep (`df`, `outer`, `cf` on `G3`) report the hull's extents
//! `[max R1, max R2, max R1+R2]` instead. Caps below zero are kept as computed;
//! the CSV then holds the (possibly empty) region they describe.

use marcwt_core::format::round_sig;
use marcwt_core::gaussian_regions::{
    baseline_region, cf_region, df_region, nf_region, outer_region, CfBranch,
};
use marcwt_core::{RatePentagon, RateRegion};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ScenarioConfig, Strategy};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub strategy: String,
    pub branch: Option<String>,
    pub feasible: bool,
    pub caps_bits: Option<[f64; 3]>,
    pub area_bits2: f64,
    pub params: Value,
}

impl Report {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// A region together with its report. The region is already rounded to the
/// precision the CSV export prints, so writing and re-reading it is lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutput {
    pub strategy: Strategy,
    pub region: RateRegion,
    pub report: Report,
}

pub(crate) fn round3(v: [f64; 3]) -> [f64; 3] {
    v.map(round_sig)
}

/// JSON number rounded to 9 significant digits; non-finite values become null.
pub(crate) fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::Null
    }
}

pub(crate) fn pentagon_caps(p: &RatePentagon) -> [f64; 3] {
    round3(p.caps())
}

fn extents(region: &RateRegion) -> Option<[f64; 3]> {
    (!region.is_empty()).then(|| round3(region.extents()))
}

fn scenario_params(c: &ScenarioConfig) -> Value {
    let s = c.scenario;
    json!({
        "p1": num(s.p1),
        "p2": num(s.p2),
        "pr": num(s.pr),
        "nr": num(s.nr),
        "n1": num(s.n1),
        "n2": num(s.n2),
    })
}

fn with_scenario(c: &ScenarioConfig, extra: Value) -> Value {
    let mut params = scenario_params(c);
    if let (Value::Object(base), Value::Object(more)) = (&mut params, extra) {
        base.extend(more);
    }
    params
}

/// Evaluates one strategy (not [`Strategy::All`]) on a validated config.
pub fn evaluate(c: &ScenarioConfig, strategy: Strategy) -> Result<StrategyOutput, CliError> {
    let s = &c.scenario;
    let (region, branch, feasible, caps, params) = match strategy {
        Strategy::Df => {
            let df = df_region(s, c.grids.gamma_steps)?;
            let params = with_scenario(
                c,
                json!({
                    "gamma_steps": c.grids.gamma_steps,
                    "alpha": 1,
                    "beta": 1,
                    "raw_union_area_bits2": num(df.raw_union.area),
                }),
            );
            let caps = extents(&df.region);
            (df.region, None, true, caps, params)
        }
        Strategy::Nf => {
            let nf = nf_region(s)?;
            let params = with_scenario(c, json!({ "rr_bits": num(nf.rr) }));
            (
                nf.pentagon.vertices(),
                Some(format!("{:?}", nf.branch)),
                true,
                Some(pentagon_caps(&nf.pentagon)),
                params,
            )
        }
        Strategy::Cf => {
            let q = c.q.ok_or_else(|| CliError::Invalid("--q is required for strategy cf".into()))?;
            let cf = cf_region(s, q, c.grids.r_star_steps)?;
            let params = with_scenario(
                c,
                json!({
                    "q": num(q),
                    "r_star_steps": c.grids.r_star_steps,
                    "r_star_max_bits": cf.r_star_max.map_or(Value::Null, num),
                }),
            );
            let caps = match cf.branch {
                CfBranch::G3 => extents(&cf.region),
                CfBranch::G4 => cf.pentagons.first().map(pentagon_caps),
            };
            (cf.region, Some(format!("{:?}", cf.branch)), cf.feasible, caps, params)
        }
        Strategy::Outer => {
            let region = outer_region(s, c.grids.outer_steps)?;
            let params = with_scenario(c, json!({ "outer_steps": c.grids.outer_steps }));
            let caps = extents(&region);
            (region, None, true, caps, params)
        }
        Strategy::Baseline => {
            let p = baseline_region(s)?;
            (p.vertices(), None, true, Some(pentagon_caps(&p)), scenario_params(c))
        }
        Strategy::All => {
            return Err(CliError::Invalid("`all` is not a single strategy".into()));
        }
    };
    let region = region.rounded();
    Ok(StrategyOutput {
        strategy,
        report: Report {
            strategy: strategy.name().to_string(),
            branch,
            feasible,
            caps_bits: caps,
            area_bits2: round_sig(region.area()),
            params,
        },
        region,
    })
}
