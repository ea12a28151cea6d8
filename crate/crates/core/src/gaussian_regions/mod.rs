//! Closed-form secrecy rate regions of the Gaussian channel.
//!
//! Each evaluator returns the constraint triple of a [`RatePentagon`] or the
//! convex closure of a family of them. Logarithms are base 2 and every
//! capacity-style term is written `C(x) = ½ log₂(1 + x)`.
//!
//! Terms that involve the transmitter-to-relay link divide by `nr`; on a
//! noiseless link (`nr = 0`) they are `+∞`, so every `min` containing one
//! resolves to its destination term.
//!
//! The [`oracle`] submodule recomputes the same caps from covariance
//! log-determinants; it is the cross-check for everything here.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gaussian::GaussianScenario;
use crate::geometry::{hull_of_pentagons, union_envelope, RatePentagon, RateRegion, UnionEnvelope};

pub mod oracle;

pub const DEFAULT_GAMMA_STEPS: usize = 101;
pub const DEFAULT_OUTER_STEPS: usize = 11;
pub const DEFAULT_R_STAR_STEPS: usize = 21;

/// Slack on feasibility inequalities, so exact ties are feasible.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

/// `C(x) = ½ log₂(1 + x)`.
fn cap(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// `½ log₂(1 + x / nr)`; infinite over a noiseless link unless nothing is sent.
fn relay_link(x: f64, nr: f64) -> f64 {
    if nr > 0.0 {
        cap(x / nr)
    } else if x > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        domain(format!("{name} must lie in [0, 1], got {v}"))
    }
}

/// Uniform grid of `steps` points on `[0, hi]`, endpoints included.
/// A single step yields `[hi]`.
fn grid(steps: usize, hi: f64) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![hi],
        n => (0..n)
            .map(|k| if k == n - 1 { hi } else { hi * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Decode-forward

/// Decode-forward pentagon for the relay power split `gamma` (the share of
/// `P_r` spent on user 1's superposition component).
pub fn df_pentagon(s: &GaussianScenario, gamma: f64) -> Result<RatePentagon> {
    s.validate()?;
    check_fraction("gamma", gamma)?;
    let GaussianScenario { p1, p2, pr, nr, n1, n2 } = *s;
    let total_z = p1 + p2 + pr + n2;
    let r1 = relay_link(p1, nr).min(cap((p1 + gamma * pr) / n1))
        - half_log2(total_z / (p2 + pr + n2));
    let r2 = relay_link(p2, nr).min(cap((p2 + (1.0 - gamma) * pr) / n1))
        - half_log2(total_z / (p1 + pr + n2));
    let sum = relay_link(p1 + p2, nr).min(cap((p1 + p2 + pr) / n1))
        - half_log2(total_z / (pr + n2));
    Ok(RatePentagon::new(r1, r2, sum))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfRegion {
    pub gammas: Vec<f64>,
    pub pentagons: Vec<RatePentagon>,
    /// Convex closure over the γ grid.
    pub region: RateRegion,
    /// The union over the γ grid before convexification.
    pub raw_union: UnionEnvelope,
}

pub fn df_region(s: &GaussianScenario, gamma_steps: usize) -> Result<DfRegion> {
    if gamma_steps < 2 {
        return domain(format!("gamma_steps must be >= 2, got {gamma_steps}"));
    }
    let gammas = grid(gamma_steps, 1.0);
    let pentagons = gammas
        .iter()
        .map(|&g| df_pentagon(s, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(DfRegion {
        region: hull_of_pentagons(&pentagons),
        raw_union: union_envelope(&pentagons),
        gammas,
        pentagons,
    })
}

// ---------------------------------------------------------------------------
// Noise-forward

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NfBranch {
    /// The relay's signal helps the receiver at least as much as the wiretapper.
    G1,
    G2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NfRegion {
    pub branch: NfBranch,
    pub pentagon: RatePentagon,
    /// Relay noise rate on `G1`; `I(X_r; Y)` on `G2`.
    pub rr: f64,
}

/// `min{C(P_r/(P₁+P₂+N₁)), C(P_r/(P₂+N₂)), C(P_r/(P₁+N₂))}`.
fn relay_noise_rate(s: &GaussianScenario) -> f64 {
    cap(s.pr / (s.p1 + s.p2 + s.n1))
        .min(cap(s.pr / (s.p2 + s.n2)))
        .min(cap(s.pr / (s.p1 + s.n2)))
}

pub fn nf_region(s: &GaussianScenario) -> Result<NfRegion> {
    s.validate()?;
    let GaussianScenario { p1, p2, pr, n1, n2, .. } = *s;
    if n1 <= n2 {
        let rr = relay_noise_rate(s);
        Ok(NfRegion {
            branch: NfBranch::G1,
            pentagon: RatePentagon::new(
                cap(p1 / n1) - cap((p1 + pr) / (p2 + n2)) + rr,
                cap(p2 / n1) - cap((p2 + pr) / (p1 + n2)) + rr,
                cap((p1 + p2) / n1) - cap((p1 + p2 + pr) / n2) + rr,
            ),
            rr,
        })
    } else {
        Ok(NfRegion {
            branch: NfBranch::G2,
            pentagon: RatePentagon::new(
                cap(p1 / n1) - cap(p1 / (p2 + n2)),
                cap(p2 / n1) - cap(p2 / (p1 + n2)),
                cap((p1 + p2) / n1) - cap((p1 + p2) / n2),
            ),
            rr: cap(pr / (p1 + p2 + n1)),
        })
    }
}

// ---------------------------------------------------------------------------
// Compress-forward

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CfBranch {
    G3,
    G4,
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        domain(format!("compression noise q must be finite and > 0, got {q}"))
    }
}

/// SNR multiplier from combining `Y` with the compressed relay observation.
fn compression_gain(s: &GaussianScenario, q: f64) -> f64 {
    (q + s.n1 + s.nr) / (s.n1 * (s.nr + q))
}

/// Rate spent describing the compressed observation, `C((P₁+P₂+N_r)/Q)`.
fn compression_rate(s: &GaussianScenario, q: f64) -> f64 {
    cap((s.p1 + s.p2 + s.nr) / q)
}

/// Largest admissible relay noise rate `R*` on `G3`; negative when `Q` is too
/// small for the compression to fit.
pub fn cf_r_star_max(s: &GaussianScenario, q: f64) -> Result<f64> {
    s.validate()?;
    check_q(q)?;
    Ok(relay_noise_rate(s) - compression_rate(s, q))
}

/// Compress-forward caps for a given relay noise rate. `r_star` only enters
/// on `G3`; feasibility is not checked here.
pub fn cf_caps(s: &GaussianScenario, q: f64, r_star: f64) -> Result<(CfBranch, RatePentagon)> {
    s.validate()?;
    check_q(q)?;
    if !(r_star.is_finite() && r_star >= 0.0) {
        return domain(format!("r_star must be finite and >= 0, got {r_star}"));
    }
    let GaussianScenario { p1, p2, pr, n1, n2, .. } = *s;
    let g = compression_gain(s, q);
    let (r1, r2, sum) = (cap(p1 * g), cap(p2 * g), cap((p1 + p2) * g));
    if n1 <= n2 {
        Ok((
            CfBranch::G3,
            RatePentagon::new(
                r1 - cap((p1 + pr) / (p2 + n2)) + r_star,
                r2 - cap((p2 + pr) / (p1 + n2)) + r_star,
                sum - cap((p1 + p2 + pr) / n2) + r_star,
            ),
        ))
    } else {
        Ok((
            CfBranch::G4,
            RatePentagon::new(
                r1 - cap(p1 / (p2 + n2)),
                r2 - cap(p2 / (p1 + n2)),
                sum - cap((p1 + p2) / n2),
            ),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfRegion {
    pub branch: CfBranch,
    pub feasible: bool,
    /// `G3` only.
    pub r_star_max: Option<f64>,
    /// The `R*` values swept (empty on `G4` and when infeasible).
    pub r_stars: Vec<f64>,
    pub pentagons: Vec<RatePentagon>,
    pub region: RateRegion,
}

/// Compress-forward region at compression noise `q`. On `G3` the region is
/// the hull over `r_star_steps` values of `R*` in `[0, R*max]`; on `G4` it is
/// a single pentagon. An infeasible `q` gives the empty region.
pub fn cf_region(s: &GaussianScenario, q: f64, r_star_steps: usize) -> Result<CfRegion> {
    s.validate()?;
    check_q(q)?;
    if r_star_steps == 0 {
        return domain("r_star_steps must be >= 1");
    }
    if s.n1 <= s.n2 {
        let max = cf_r_star_max(s, q)?;
        if max < -FEASIBILITY_SLACK {
            return Ok(CfRegion {
                branch: CfBranch::G3,
                feasible: false,
                r_star_max: Some(max),
                r_stars: Vec::new(),
                pentagons: Vec::new(),
                region: RateRegion::empty(),
            });
        }
        let r_stars = grid(r_star_steps, max.max(0.0));
        let pentagons = r_stars
            .iter()
            .map(|&r| cf_caps(s, q, r).map(|(_, p)| p))
            .collect::<Result<Vec<_>>>()?;
        Ok(CfRegion {
            branch: CfBranch::G3,
            feasible: true,
            r_star_max: Some(max),
            region: hull_of_pentagons(&pentagons),
            r_stars,
            pentagons,
        })
    } else {
        let feasible =
            cap(s.pr / (s.p1 + s.p2 + s.n1)) >= compression_rate(s, q) - FEASIBILITY_SLACK;
        let (branch, pentagon) = cf_caps(s, q, 0.0)?;
        let pentagons = if feasible { vec![pentagon] } else { Vec::new() };
        Ok(CfRegion {
            branch,
            feasible,
            r_star_max: None,
            r_stars: Vec::new(),
            region: hull_of_pentagons(&pentagons),
            pentagons,
        })
    }
}

/// Smallest `Q` that makes the `G4` branch feasible.
pub fn cf_g4_q_threshold(s: &GaussianScenario) -> f64 {
    let p = s.p1 + s.p2;
    (p * p + p * (s.nr + s.n1) + s.nr * s.n1) / s.pr
}

// ---------------------------------------------------------------------------
// Outer bound

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterParams {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
}

impl OuterParams {
    pub fn new(alpha: f64, beta1: f64, beta2: f64, gamma: f64) -> Result<Self> {
        let p = OuterParams {
            alpha,
            beta1,
            beta2,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction("alpha", self.alpha)?;
        check_fraction("beta1", self.beta1)?;
        check_fraction("beta2", self.beta2)?;
        check_fraction("gamma", self.gamma)
    }
}

fn require_degraded(s: &GaussianScenario) -> Result<()> {
    if s.is_degraded() {
        Ok(())
    } else {
        Err(Error::NotApplicable(format!(
            "outer bound not applicable (non-degraded): n2 = {} < n1 = {}",
            s.n2, s.n1
        )))
    }
}

/// One pentagon of the degraded outer bound.
pub fn outer_pentagon(s: &GaussianScenario, p: &OuterParams) -> Result<RatePentagon> {
    s.validate()?;
    p.validate()?;
    require_degraded(s)?;
    Ok(outer_caps(s, p))
}

fn outer_caps(s: &GaussianScenario, p: &OuterParams) -> RatePentagon {
    let GaussianScenario { p1, p2, pr, n1, n2, .. } = *s;
    let OuterParams {
        alpha,
        beta1,
        beta2,
        gamma,
    } = *p;
    let sig1 = pr * (alpha + beta1 - alpha * beta1) + beta1 * p2;
    let sig2 = pr * (alpha + beta2 - alpha * beta2) + beta2 * p1;
    let a = n2 + sig1;
    let b = n2 + sig2;
    let c = a.max(b);
    let d = c + gamma * (p1 + p2 + pr + n2 - c);
    RatePentagon::new(
        cap(sig2 / n1) - half_log2(d / a),
        cap(sig1 / n1) - half_log2(d / b),
        half_log2((c + gamma * (p1 + p2 + pr + n1 - c)) / n1) - half_log2(d / (n2 + alpha * pr)),
    )
}

/// Grid points `(α, β₁, β₂, γ)` in lexicographic order.
pub fn outer_grid(steps_per_axis: usize) -> Vec<OuterParams> {
    let axis = grid(steps_per_axis, 1.0);
    let mut out = Vec::with_capacity(axis.len().pow(4));
    for &alpha in &axis {
        for &beta1 in &axis {
            for &beta2 in &axis {
                for &gamma in &axis {
                    out.push(OuterParams {
                        alpha,
                        beta1,
                        beta2,
                        gamma,
                    });
                }
            }
        }
    }
    out
}

/// Convex closure of the outer bound over a uniform 4-D parameter grid.
/// The grid under-approximates the union over the continuous parameters.
pub fn outer_region(s: &GaussianScenario, steps_per_axis: usize) -> Result<RateRegion> {
    s.validate()?;
    require_degraded(s)?;
    if steps_per_axis < 2 {
        return domain(format!("steps_per_axis must be >= 2, got {steps_per_axis}"));
    }
    let pentagons: Vec<RatePentagon> = outer_grid(steps_per_axis)
        .par_iter()
        .map(|p| outer_caps(s, p))
        .collect();
    Ok(hull_of_pentagons(&pentagons))
}

// ---------------------------------------------------------------------------
// Baseline

/// Multiple-access wiretap region without a relay; `pr` and `nr` are ignored.
pub fn baseline_region(s: &GaussianScenario) -> Result<RatePentagon> {
    s.validate()?;
    let GaussianScenario { p1, p2, n1, n2, .. } = *s;
    Ok(RatePentagon::new(
        cap(p1 / n1) - cap(p1 / (n2 + p2)),
        cap(p2 / n1) - cap(p2 / (n2 + p1)),
        cap((p1 + p2) / n1) - cap((p1 + p2) / n2),
    ))
}
