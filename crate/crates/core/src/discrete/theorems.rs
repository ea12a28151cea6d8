use serde::Serialize;

use super::{DmFactorization, Theorem, U, V1, V2, X1, X2, XR, Y, YHAT, YR, Z};
use crate::error::{Error, Result};
use crate::geometry::{RatePentagon, RateRegion};
use crate::gaussian_regions::FEASIBILITY_SLACK;
use crate::info::JointPmf;

/// Largest total variation between `P(x, yr, y, z)` and
/// `P(x, yr, y) P(z | y)` accepted as a degraded channel.
pub const DEGRADED_TV_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DmBranch {
    L1,
    L2,
    L3,
    L4,
}

fn mi(p: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    p.cond_mutual_info(a, b, c)
}

/// Decode-forward pentagon; the caps may be negative.
pub fn theorem1_pentagon(f: &DmFactorization) -> Result<RatePentagon> {
    f.expect(Theorem::T1)?;
    theorem1_at(f.joint())
}

pub(super) fn theorem1_at(p: &JointPmf) -> Result<RatePentagon> {
    let r1 = mi(p, &[X1], &[YR], &[XR, X2, V1, V2])?.min(mi(p, &[X1, XR], &[Y], &[X2, V2])?)
        - mi(p, &[X1], &[Z], &[])?;
    let r2 = mi(p, &[X2], &[YR], &[XR, X1, V1, V2])?.min(mi(p, &[X2, XR], &[Y], &[X1, V1])?)
        - mi(p, &[X2], &[Z], &[])?;
    let sum = mi(p, &[X1, X2], &[YR], &[XR, V1, V2])?.min(mi(p, &[X1, X2, XR], &[Y], &[])?)
        - mi(p, &[X1, X2], &[Z], &[])?;
    Ok(RatePentagon::new(r1, r2, sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NfOutcome {
    pub branch: DmBranch,
    pub pentagon: RatePentagon,
    /// Relay noise rate on `L1`; `I(X_r; Y)` on `L2`.
    pub rr: f64,
    pub i_xr_y: f64,
    pub i_xr_z: f64,
}

/// `min{I(X_r;Y), I(X_r;Z|X₁), I(X_r;Z|X₂)}`.
fn relay_rate(p: &JointPmf) -> Result<f64> {
    Ok(mi(p, &[XR], &[Y], &[])?
        .min(mi(p, &[XR], &[Z], &[X1])?)
        .min(mi(p, &[XR], &[Z], &[X2])?))
}

/// Receiver terms with the receiver observing `obs`, given the relay input.
fn receiver_terms(p: &JointPmf, obs: &[&str]) -> Result<[f64; 3]> {
    Ok([
        mi(p, &[X1], obs, &[X2, XR])?,
        mi(p, &[X2], obs, &[X1, XR])?,
        mi(p, &[X1, X2], obs, &[XR])?,
    ])
}

/// Wiretapper terms when the relay codeword is undecodable noise to it.
fn wiretap_terms_noise(p: &JointPmf) -> Result<[f64; 3]> {
    Ok([
        mi(p, &[X1, XR], &[Z], &[])?,
        mi(p, &[X2, XR], &[Z], &[])?,
        mi(p, &[X1, X2, XR], &[Z], &[])?,
    ])
}

/// Wiretapper terms when it decodes the relay codeword.
fn wiretap_terms_decoded(p: &JointPmf) -> Result<[f64; 3]> {
    Ok([
        mi(p, &[X1], &[Z], &[XR])?,
        mi(p, &[X2], &[Z], &[XR])?,
        mi(p, &[X1, X2], &[Z], &[XR])?,
    ])
}

fn pentagon(rx: [f64; 3], wt: [f64; 3], bonus: f64) -> RatePentagon {
    RatePentagon::new(rx[0] - wt[0] + bonus, rx[1] - wt[1] + bonus, rx[2] - wt[2] + bonus)
}

/// Noise-forward caps on a chosen branch, regardless of which branch the
/// distribution actually satisfies.
pub fn theorem2_branch_caps(f: &DmFactorization, branch: DmBranch) -> Result<RatePentagon> {
    f.expect(Theorem::T2)?;
    branch_caps(f.joint(), branch)
}

fn branch_caps(p: &JointPmf, branch: DmBranch) -> Result<RatePentagon> {
    let rx = receiver_terms(p, &[Y])?;
    match branch {
        DmBranch::L1 => Ok(pentagon(rx, wiretap_terms_noise(p)?, relay_rate(p)?)),
        DmBranch::L2 => Ok(pentagon(rx, wiretap_terms_decoded(p)?, 0.0)),
        other => Err(Error::Domain(format!("{other:?} is not a noise-forward branch"))),
    }
}

/// Noise-forward pentagon. The branch is `L1` iff `I(X_r;Y) ≥ I(X_r;Z)`.
pub fn theorem2_region(f: &DmFactorization) -> Result<NfOutcome> {
    f.expect(Theorem::T2)?;
    theorem2_at(f.joint())
}

pub(super) fn theorem2_at(p: &JointPmf) -> Result<NfOutcome> {
    let i_xr_y = mi(p, &[XR], &[Y], &[])?;
    let i_xr_z = mi(p, &[XR], &[Z], &[])?;
    let (branch, rr) = if i_xr_y >= i_xr_z {
        (DmBranch::L1, relay_rate(p)?)
    } else {
        (DmBranch::L2, i_xr_y)
    };
    Ok(NfOutcome {
        branch,
        pentagon: branch_caps(p, branch)?,
        rr,
        i_xr_y,
        i_xr_z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfOutcome {
    pub branch: DmBranch,
    /// Caps from the branch display; only meaningful when `feasible`.
    pub caps: RatePentagon,
    pub feasible: bool,
    /// The `R*` used (zero on `L4`, where it plays no role).
    pub r_star: f64,
    /// `min{I(X_r;Z|X₁), I(X_r;Z|X₂), I(X_r;Y)}`.
    pub r_star_r1: f64,
    /// `I(Y_r; Ŷ_r | X_r)`, the rate needed to describe the compression.
    pub compression_rate: f64,
    pub i_xr_y: f64,
    pub i_xr_z: f64,
}

impl CfOutcome {
    /// The pentagon, or the empty region when the constraints fail.
    pub fn region(&self) -> RateRegion {
        if self.feasible {
            self.caps.vertices()
        } else {
            RateRegion::empty()
        }
    }

    /// Largest `R*` that keeps `L3` feasible (negative if none does).
    pub fn r_star_max(&self) -> f64 {
        self.r_star_r1 - self.compression_rate
    }
}

/// Compress-forward pentagon at the factorization's `R*`.
pub fn theorem3_region(f: &DmFactorization) -> Result<CfOutcome> {
    f.expect(Theorem::T3)?;
    let r_star = f.r_star().expect("T3 factorizations carry r_star");
    theorem3_at(f.joint(), r_star)
}

pub(super) fn theorem3_at(p: &JointPmf, r_star: f64) -> Result<CfOutcome> {
    let i_xr_y = mi(p, &[XR], &[Y], &[])?;
    let i_xr_z = mi(p, &[XR], &[Z], &[])?;
    let r_star_r1 = relay_rate(p)?;
    let compression_rate = mi(p, &[YR], &[YHAT], &[XR])?;
    let rx = receiver_terms(p, &[Y, YHAT])?;
    let (branch, caps, feasible, r_star) = if i_xr_y >= i_xr_z {
        (
            DmBranch::L3,
            pentagon(rx, wiretap_terms_noise(p)?, r_star),
            r_star_r1 - r_star >= compression_rate - FEASIBILITY_SLACK,
            r_star,
        )
    } else {
        (
            DmBranch::L4,
            pentagon(rx, wiretap_terms_decoded(p)?, 0.0),
            i_xr_y >= compression_rate - FEASIBILITY_SLACK,
            0.0,
        )
    };
    Ok(CfOutcome {
        branch,
        caps,
        feasible,
        r_star,
        r_star_r1,
        compression_rate,
        i_xr_y,
        i_xr_z,
    })
}

/// Total variation between `P(a, y, z)` and `P(a, y) P(z | y)`, where `a`
/// collects every variable other than `U`, `Y` and `Z` that the channel
/// produces or consumes.
pub fn check_degraded(p: &JointPmf) -> Result<f64> {
    let rest: Vec<&str> = [X1, X2, XR, YR]
        .into_iter()
        .filter(|n| p.index_of(n).is_some())
        .collect();
    let mut keep = rest;
    keep.extend([Y, Z]);
    let m = p.marginalize(&keep)?;
    let ny = m.size_of(Y).expect("kept");
    let nz = m.size_of(Z).expect("kept");
    let na: usize = m.probs().len() / (ny * nz);
    let pos_y = m.index_of(Y).expect("kept");
    let pos_z = m.index_of(Z).expect("kept");
    let sizes: Vec<usize> = m.variables().iter().map(|v| v.size).collect();

    let mut p_ayz = vec![0.0; na * ny * nz];
    let mut digits = vec![0usize; sizes.len()];
    for &pr in m.probs() {
        let mut a = 0usize;
        for (i, &d) in digits.iter().enumerate() {
            if i != pos_y && i != pos_z {
                a = a * sizes[i] + d;
            }
        }
        p_ayz[(a * ny + digits[pos_y]) * nz + digits[pos_z]] += pr;
        let mut i = sizes.len();
        while i > 0 {
            i -= 1;
            digits[i] += 1;
            if digits[i] < sizes[i] {
                break;
            }
            digits[i] = 0;
        }
    }
    let mut p_yz = vec![0.0; ny * nz];
    let mut p_ay = vec![0.0; na * ny];
    for a in 0..na {
        for y in 0..ny {
            for z in 0..nz {
                let v = p_ayz[(a * ny + y) * nz + z];
                p_yz[y * nz + z] += v;
                p_ay[a * ny + y] += v;
            }
        }
    }
    let p_y: Vec<f64> = (0..ny).map(|y| p_yz[y * nz..(y + 1) * nz].iter().sum()).collect();
    let mut tv = 0.0;
    for a in 0..na {
        for y in 0..ny {
            for z in 0..nz {
                let markov = if p_y[y] > 0.0 {
                    p_ay[a * ny + y] * p_yz[y * nz + z] / p_y[y]
                } else {
                    0.0
                };
                tv += (p_ayz[(a * ny + y) * nz + z] - markov).abs();
            }
        }
    }
    Ok(0.5 * tv)
}

/// Outer-bound pentagon for the supplied joint of `U` and the inputs. The
/// channel must be degraded.
pub fn theorem41_outer(f: &DmFactorization) -> Result<RatePentagon> {
    f.expect(Theorem::T41)?;
    theorem41_at(f.joint())
}

pub(super) fn theorem41_at(p: &JointPmf) -> Result<RatePentagon> {
    let tv = check_degraded(p)?;
    if tv > DEGRADED_TV_TOL {
        return Err(Error::NotApplicable(format!(
            "channel is not degraded: P(Z | X1,X2,Xr,Yr,Y) differs from P(Z | Y) \
             by total variation {tv:.3e} (tolerance {DEGRADED_TV_TOL:e})"
        )));
    }
    Ok(RatePentagon::new(
        mi(p, &[X1, XR], &[Y], &[X2, U])? - mi(p, &[X1], &[Z], &[U])?,
        mi(p, &[X2, XR], &[Y], &[X1, U])? - mi(p, &[X2], &[Z], &[U])?,
        mi(p, &[X1, X2, XR], &[Y], &[U])? - mi(p, &[X1, X2], &[Z], &[U])?,
    ))
}
