//! The Gaussian region caps recomputed as differences of conditional mutual
//! information terms on the assembled covariance.
//!
//! These functions mirror the discrete-memoryless bounds term by term and
//! never touch the closed-form algebra of the parent module, so agreement
//! between the two is a meaningful check.

use crate::error::{Error, Result};
use crate::gaussian::{assemble_covariance, Covariance, GaussVar, GaussianScenario, InputStructure};
use crate::geometry::RatePentagon;

use super::{CfBranch, NfBranch, NfRegion};
use GaussVar::*;

fn term(cov: &Covariance, a: &[GaussVar], b: &[GaussVar], c: &[GaussVar]) -> Result<f64> {
    cov.cond_mi(a, b, c)
}

/// A term observed through the transmitter-to-relay link, which is infinite
/// when that link is noiseless.
fn relay_term(cov: &Covariance, a: &[GaussVar], b: &[GaussVar], c: &[GaussVar]) -> Result<f64> {
    match cov.cond_mi(a, b, c) {
        Err(Error::InfiniteInformation(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Decode-forward caps with private-only transmitter inputs (α = β = 1).
pub fn df_caps(s: &GaussianScenario, gamma: f64) -> Result<RatePentagon> {
    let cov = assemble_covariance(
        s,
        &InputStructure::DecodeForward {
            gamma,
            alpha: 1.0,
            beta: 1.0,
        },
    )?;
    let r1 = relay_term(&cov, &[X1], &[Yr], &[Xr, X2, V1, V2])?
        .min(term(&cov, &[X1, Xr], &[Y], &[X2, V2])?)
        - term(&cov, &[X1], &[Z], &[])?;
    let r2 = relay_term(&cov, &[X2], &[Yr], &[Xr, X1, V1, V2])?
        .min(term(&cov, &[X2, Xr], &[Y], &[X1, V1])?)
        - term(&cov, &[X2], &[Z], &[])?;
    let sum = relay_term(&cov, &[X1, X2], &[Yr], &[Xr, V1, V2])?
        .min(term(&cov, &[X1, X2, Xr], &[Y], &[])?)
        - term(&cov, &[X1, X2], &[Z], &[])?;
    Ok(RatePentagon::new(r1, r2, sum))
}

/// Whether the relay input tells the receiver at least as much as the wiretapper.
fn relay_favours_receiver(cov: &Covariance) -> Result<bool> {
    Ok(term(cov, &[Xr], &[Y], &[])? >= term(cov, &[Xr], &[Z], &[])?)
}

fn relay_rate(cov: &Covariance) -> Result<f64> {
    Ok(term(cov, &[Xr], &[Y], &[])?
        .min(term(cov, &[Xr], &[Z], &[X1])?)
        .min(term(cov, &[Xr], &[Z], &[X2])?))
}

/// Noise-forward caps, branch chosen from the information comparison.
pub fn nf(s: &GaussianScenario) -> Result<NfRegion> {
    let cov = assemble_covariance(s, &InputStructure::IndependentFullPower)?;
    let r1 = term(&cov, &[X1], &[Y], &[X2, Xr])?;
    let r2 = term(&cov, &[X2], &[Y], &[X1, Xr])?;
    let sum = term(&cov, &[X1, X2], &[Y], &[Xr])?;
    if relay_favours_receiver(&cov)? {
        let rr = relay_rate(&cov)?;
        Ok(NfRegion {
            branch: NfBranch::G1,
            pentagon: RatePentagon::new(
                r1 - term(&cov, &[X1, Xr], &[Z], &[])? + rr,
                r2 - term(&cov, &[X2, Xr], &[Z], &[])? + rr,
                sum - term(&cov, &[X1, X2, Xr], &[Z], &[])? + rr,
            ),
            rr,
        })
    } else {
        Ok(NfRegion {
            branch: NfBranch::G2,
            pentagon: RatePentagon::new(
                r1 - term(&cov, &[X1], &[Z], &[Xr])?,
                r2 - term(&cov, &[X2], &[Z], &[Xr])?,
                sum - term(&cov, &[X1, X2], &[Z], &[Xr])?,
            ),
            rr: term(&cov, &[Xr], &[Y], &[])?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfOracle {
    pub branch: CfBranch,
    pub pentagon: RatePentagon,
    /// `G3`: the largest admissible `R*`. `G4`: `I(X_r;Y) − I(Y_r;Ŷ_r|X_r)`.
    /// Either way the configuration is feasible iff this is nonnegative.
    pub margin: f64,
}

/// Compress-forward caps at relay noise rate `r_star`.
pub fn cf(s: &GaussianScenario, q: f64, r_star: f64) -> Result<CfOracle> {
    let cov = assemble_covariance(s, &InputStructure::IndependentWithCompression { q })?;
    let r1 = term(&cov, &[X1], &[Y, YrHat], &[X2, Xr])?;
    let r2 = term(&cov, &[X2], &[Y, YrHat], &[X1, Xr])?;
    let sum = term(&cov, &[X1, X2], &[Y, YrHat], &[Xr])?;
    let description = relay_term(&cov, &[Yr], &[YrHat], &[Xr])?;
    if relay_favours_receiver(&cov)? {
        Ok(CfOracle {
            branch: CfBranch::G3,
            pentagon: RatePentagon::new(
                r1 - term(&cov, &[X1, Xr], &[Z], &[])? + r_star,
                r2 - term(&cov, &[X2, Xr], &[Z], &[])? + r_star,
                sum - term(&cov, &[X1, X2, Xr], &[Z], &[])? + r_star,
            ),
            margin: relay_rate(&cov)? - description,
        })
    } else {
        Ok(CfOracle {
            branch: CfBranch::G4,
            pentagon: RatePentagon::new(
                r1 - term(&cov, &[X1], &[Z], &[Xr])?,
                r2 - term(&cov, &[X2], &[Z], &[Xr])?,
                sum - term(&cov, &[X1, X2], &[Z], &[Xr])?,
            ),
            margin: term(&cov, &[Xr], &[Y], &[])? - description,
        })
    }
}

/// Multiple-access wiretap caps with the relay removed.
pub fn baseline(s: &GaussianScenario) -> Result<RatePentagon> {
    let silent = GaussianScenario { pr: 0.0, ..*s };
    let cov = assemble_covariance(&silent, &InputStructure::IndependentFullPower)?;
    Ok(RatePentagon::new(
        term(&cov, &[X1], &[Y], &[X2])? - term(&cov, &[X1], &[Z], &[])?,
        term(&cov, &[X2], &[Y], &[X1])? - term(&cov, &[X2], &[Z], &[])?,
        term(&cov, &[X1, X2], &[Y], &[])? - term(&cov, &[X1, X2], &[Z], &[])?,
    ))
}
