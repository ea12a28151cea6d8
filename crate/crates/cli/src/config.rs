use marcwt_core::gaussian_regions::{DEFAULT_GAMMA_STEPS, DEFAULT_OUTER_STEPS, DEFAULT_R_STAR_STEPS};
use marcwt_core::GaussianScenario;
use serde::Serialize;

use crate::CliError;

pub const MAX_GAMMA_STEPS: usize = 10_000;
pub const MAX_OUTER_STEPS: usize = 21;
pub const MAX_R_STAR_STEPS: usize = 10_000;

/// Compression noise variance used by every figure preset.
pub const PRESET_Q: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Df,
    Nf,
    Cf,
    Outer,
    Baseline,
    All,
}

impl Strategy {
    /// The individual strategies, in file and legend order.
    pub const EACH: [Strategy; 5] = [
        Strategy::Df,
        Strategy::Nf,
        Strategy::Cf,
        Strategy::Outer,
        Strategy::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Df => "df",
            Strategy::Nf => "nf",
            Strategy::Cf => "cf",
            Strategy::Outer => "outer",
            Strategy::Baseline => "baseline",
            Strategy::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Strategy> {
        match self {
            Strategy::All => Strategy::EACH.to_vec(),
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grids {
    pub gamma_steps: usize,
    pub outer_steps: usize,
    pub r_star_steps: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            gamma_steps: DEFAULT_GAMMA_STEPS,
            outer_steps: DEFAULT_OUTER_STEPS,
            r_star_steps: DEFAULT_R_STAR_STEPS,
        }
    }
}

impl Grids {
    pub fn validate(&self) -> Result<(), CliError> {
        let checks = [
            ("gamma-steps", self.gamma_steps, 2, MAX_GAMMA_STEPS),
            ("outer-steps", self.outer_steps, 2, MAX_OUTER_STEPS),
            ("rstar-steps", self.r_star_steps, 1, MAX_R_STAR_STEPS),
        ];
        for (name, v, lo, hi) in checks {
            if !(lo..=hi).contains(&v) {
                return Err(CliError::Invalid(format!(
                    "--{name} must be in {lo}..={hi}, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One run of `marcwt gauss`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: GaussianScenario,
    pub strategy: Strategy,
    /// Compression noise variance; required by `cf` and `all`.
    pub q: Option<f64>,
    pub grids: Grids,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.scenario.validate()?;
        self.grids.validate()?;
        let needs_q = matches!(self.strategy, Strategy::Cf | Strategy::All);
        match self.q {
            None if needs_q => Err(CliError::Invalid(format!(
                "--q is required for strategy {}",
                self.strategy.name()
            ))),
            Some(q) if !(q.is_finite() && q > 0.0) => {
                Err(CliError::Invalid(format!("--q must be finite and > 0, got {q}")))
            }
            _ => Ok(()),
        }
    }
}

/// The four figure scenarios, which differ only in the relay's noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5];

    pub fn from_id(id: u8) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.id() == id)
    }

    pub fn id(self) -> u8 {
        match self {
            Preset::Fig2 => 2,
            Preset::Fig3 => 3,
            Preset::Fig4 => 4,
            Preset::Fig5 => 5,
        }
    }

    pub fn nr(self) -> f64 {
        match self {
            Preset::Fig2 => 5.0,
            Preset::Fig3 => 2.3,
            Preset::Fig4 => 1.6,
            Preset::Fig5 => 0.0,
        }
    }

    pub fn scenario(self) -> GaussianScenario {
        GaussianScenario {
            p1: 5.0,
            p2: 6.0,
            pr: 20.0,
            nr: self.nr(),
            n1: 2.0,
            n2: 14.0,
        }
    }

    pub fn config(self, strategy: Strategy) -> ScenarioConfig {
        ScenarioConfig {
            scenario: self.scenario(),
            strategy,
            q: Some(PRESET_Q),
            grids: Grids::default(),
        }
    }
}
