//! Exhaustive grid sweeps over small input alphabets.
//!
//! Every grid point yields one pentagon, and the reported region is the
//! convex hull of all of them. Grid points are independent, so they are
//! evaluated in parallel and reduced with the (order-insensitive) hull.

use rayon::prelude::*;

use super::theorems::{theorem1_at, theorem2_at, theorem3_at, theorem41_at, DmBranch};
use super::{compose, DmFactorization, Factor, Theorem, U, V1, V2, X1, X2, XR};
use crate::error::{domain, Error, Result};
use crate::gaussian_regions::{DEFAULT_R_STAR_STEPS, FEASIBILITY_SLACK};
use crate::geometry::{hull_of_pentagons, RatePentagon, RateRegion};
use crate::info::{JointPmf, Variable};

/// Largest auxiliary alphabet tried by [`theorem41_u_sweep`]. No cardinality
/// bound is known for the outer bound, so the sweep is a lower approximation.
pub const MAX_U: usize = 4;

/// Finest grid accepted by [`sweep_best_region`], per free parameter.
pub const MAX_RESOLUTION: usize = 21;

/// Upper limit on grid points × joint entries × `R*` points for one sweep.
pub const SWEEP_WORK_BUDGET: f64 = 2e8;

fn var(name: &str) -> Variable {
    Variable::new(name, 2)
}

fn bern(label: &str, name: &str, p: f64) -> Result<Factor> {
    Factor::new(label, vec![var(name)], vec![], vec![1.0 - p, p])
}

/// A binary kernel `P(name | given)`, one Bernoulli parameter per assignment
/// of `given` in lexicographic order.
fn binary_kernel(label: &str, name: &str, given: &[&str], ps: &[f64]) -> Result<Factor> {
    let mut vars: Vec<Variable> = given.iter().map(|g| var(g)).collect();
    vars.push(var(name));
    let probs = ps.iter().flat_map(|&p| [1.0 - p, p]).collect();
    Factor::new(label, vars, given.iter().map(|g| g.to_string()).collect(), probs)
}

fn free_parameters(theorem: Theorem) -> usize {
    match theorem {
        Theorem::T1 => 10,
        _ => 3,
    }
}

/// Input factors for one parameter vector.
fn input_factors(theorem: Theorem, a: &[f64]) -> Result<Vec<Factor>> {
    match theorem {
        Theorem::T1 => Ok(vec![
            bern("sweep/V1", V1, a[0])?,
            bern("sweep/V2", V2, a[1])?,
            binary_kernel("sweep/X1", X1, &[V1], &a[2..4])?,
            binary_kernel("sweep/X2", X2, &[V2], &a[4..6])?,
            binary_kernel("sweep/Xr", XR, &[V1, V2], &a[6..10])?,
        ]),
        _ => Ok(vec![
            bern("sweep/X1", X1, a[0])?,
            bern("sweep/X2", X2, a[1])?,
            bern("sweep/Xr", XR, a[2])?,
        ]),
    }
}

/// The parameter vector at flat grid index `k`.
fn grid_point(mut k: usize, dims: usize, resolution: usize) -> Vec<f64> {
    let step = 1.0 / (resolution - 1) as f64;
    let mut a = vec![0.0; dims];
    for slot in a.iter_mut().rev() {
        *slot = (k % resolution) as f64 * step;
        k /= resolution;
    }
    a
}

fn pentagons_at(theorem: Theorem, p: &JointPmf) -> Result<Vec<RatePentagon>> {
    match theorem {
        Theorem::T1 => Ok(vec![theorem1_at(p)?]),
        Theorem::T2 => Ok(vec![theorem2_at(p)?.pentagon]),
        Theorem::T3 => {
            let o = theorem3_at(p, 0.0)?;
            match o.branch {
                DmBranch::L3 => {
                    let max = o.r_star_max();
                    if max < -FEASIBILITY_SLACK {
                        return Ok(Vec::new());
                    }
                    let max = max.max(0.0);
                    let [c1, c2, cs] = o.caps.caps();
                    let n = DEFAULT_R_STAR_STEPS - 1;
                    Ok((0..=n)
                        .map(|i| {
                            let r = max * i as f64 / n as f64;
                            RatePentagon::new(c1 + r, c2 + r, cs + r)
                        })
                        .collect())
                }
                _ if o.feasible => Ok(vec![o.caps]),
                _ => Ok(Vec::new()),
            }
        }
        Theorem::T41 => Err(Error::Internal("T41 is swept over U, not inputs".into())),
    }
}

/// Hull of the pentagons of `theorem` over a uniform grid of binary input
/// distributions. `channel` holds the channel factors, plus the test channel
/// `P(Yhat|Yr,Xr)` for `T3`, whose `R*` is swept over its feasible interval.
pub fn sweep_best_region(channel: &[Factor], theorem: Theorem, resolution: usize) -> Result<RateRegion> {
    if theorem == Theorem::T41 {
        return domain("T41 is swept over the auxiliary U; use theorem41_u_sweep");
    }
    if !(2..=MAX_RESOLUTION).contains(&resolution) {
        return domain(format!(
            "grid resolution must be in 2..={MAX_RESOLUTION}, got {resolution}"
        ));
    }
    for name in [X1, X2, XR] {
        for f in channel {
            if let Some(n) = f.size_of(name).filter(|&n| n != 2) {
                return Err(Error::Capability(format!(
                    "exhaustive sweeps need binary inputs, but `{}` gives {name} {n} symbols",
                    f.label()
                )));
            }
        }
    }

    let dims = free_parameters(theorem);
    let points = resolution.pow(dims as u32);
    let r_star = (theorem == Theorem::T3).then_some(0.0);
    let build = |k: usize| -> Result<Vec<Factor>> {
        let mut factors = input_factors(theorem, &grid_point(k, dims, resolution))?;
        factors.extend_from_slice(channel);
        Ok(factors)
    };
    let first = DmFactorization::new(theorem, build(0)?, r_star)?;
    let r_points = if theorem == Theorem::T3 { DEFAULT_R_STAR_STEPS } else { 1 };
    let work = points as f64 * first.joint().probs().len() as f64 * r_points as f64;
    if work > SWEEP_WORK_BUDGET {
        return Err(Error::Capability(format!(
            "a {theorem:?} sweep at resolution {resolution} needs about {work:.2e} \
             evaluations, above the budget of {SWEEP_WORK_BUDGET:e}"
        )));
    }

    let pentagons = (0..points)
        .into_par_iter()
        .map(|k| pentagons_at(theorem, &compose(&build(k)?)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(hull_of_pentagons(pentagons.iter().flatten()))
}

/// Number of set partitions of `n` items into at most `k` blocks.
fn partition_count(n: usize, k: usize) -> f64 {
    // s[j] holds the Stirling number S(i, j) for the current i.
    let mut s = vec![0.0f64; k + 1];
    s[0] = 1.0;
    for _ in 0..n {
        for j in (1..=k).rev() {
            s[j] = j as f64 * s[j] + s[j - 1];
        }
        s[0] = 0.0;
    }
    s.iter().sum()
}

/// Restricted growth strings of length `n` using at most `k` labels. Each is
/// a canonical labelling of one partition of `n` items.
fn restricted_growth_strings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, k: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for label in 0..(used + 1).min(k) {
            cur.push(label);
            go(n, k, used.max(label + 1), cur, out);
            cur.pop();
        }
    }
    go(n, k, 0, &mut cur, &mut out);
    out
}

/// Hull of the outer-bound pentagons over every deterministic map from the
/// input triple to an auxiliary `U` with at most `u_max` symbols.
///
/// `inputs` is the joint distribution of `(X1, X2, Xr)`; `channel` completes
/// it as in a `T41` factorization and must be degraded.
pub fn theorem41_u_sweep(inputs: &JointPmf, channel: &[Factor], u_max: usize) -> Result<RateRegion> {
    if !(1..=MAX_U).contains(&u_max) {
        return domain(format!("|U| must be in 1..={MAX_U}, got {u_max}"));
    }
    let mut names: Vec<&str> = inputs.variables().iter().map(|v| v.name.as_str()).collect();
    names.sort_unstable();
    if names != [X1, X2, XR] {
        return domain(format!(
            "inputs must be a distribution over X1, X2, Xr, got {names:?}"
        ));
    }
    let tuples = inputs.probs().len();
    let maps = partition_count(tuples, u_max);

    let mut vars = vec![Variable::new(U, u_max)];
    vars.extend_from_slice(inputs.variables());
    let build = |labels: &[usize]| -> Result<Vec<Factor>> {
        let mut probs = vec![0.0; u_max * tuples];
        for (t, (&p, &u)) in inputs.probs().iter().zip(labels).enumerate() {
            probs[u * tuples + t] = p;
        }
        let mut factors = vec![Factor::new("sweep/U,X", vars.clone(), vec![], probs)?];
        factors.extend_from_slice(channel);
        Ok(factors)
    };
    let first = DmFactorization::new(Theorem::T41, build(&vec![0; tuples])?, None)?;
    let work = maps * first.joint().probs().len() as f64;
    if work > SWEEP_WORK_BUDGET {
        return Err(Error::Capability(format!(
            "{maps:.3e} maps from {tuples} input tuples to |U| = {u_max} exceed the sweep budget"
        )));
    }
    // Degradedness does not depend on U, so one check covers every map.
    theorem41_at(first.joint())?;

    let pentagons = restricted_growth_strings(tuples, u_max)
        .into_par_iter()
        .map(|labels| theorem41_at(&compose(&build(&labels)?)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(hull_of_pentagons(&pentagons))
}
