//! Jointly Gaussian channel model and a covariance log-determinant oracle.
//!
//! Every channel variable is written as a linear combination of independent
//! Gaussian sources, so the joint covariance is `A · diag(var) · Aᵀ`. The
//! oracle [`gaussian_cond_mi`] then evaluates any conditional mutual
//! information term from principal-submatrix determinants. It shares no code
//! with the closed-form evaluators in [`crate::gaussian_regions`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative pivot size below which a principal submatrix counts as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Parameters of the Gaussian channel.
///
/// `Y_r = X₁ + X₂ + Z_r`, `Y = X₁ + X₂ + X_r + Z₁`, `Z = X₁ + X₂ + X_r + Z₂`
/// with `Z_r ~ N(0, nr)`, `Z₁ ~ N(0, n1)`, `Z₂ ~ N(0, n2)`. `nr = 0` is a
/// noiseless transmitter-to-relay link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianScenario {
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
    pub nr: f64,
    pub n1: f64,
    pub n2: f64,
}

impl GaussianScenario {
    pub fn new(p1: f64, p2: f64, pr: f64, nr: f64, n1: f64, n2: f64) -> Result<Self> {
        let s = GaussianScenario {
            p1,
            p2,
            pr,
            nr,
            n1,
            n2,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p1", self.p1),
            ("p2", self.p2),
            ("pr", self.pr),
            ("nr", self.nr),
            ("n1", self.n1),
            ("n2", self.n2),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return domain(format!("{name} must be finite, got {v}"));
            }
        }
        for (name, v) in &fields[..4] {
            if *v < 0.0 {
                return domain(format!("{name} must be >= 0, got {v}"));
            }
        }
        for (name, v) in &fields[4..] {
            if *v <= 0.0 {
                return domain(format!("{name} must be > 0, got {v}"));
            }
        }
        Ok(())
    }

    /// The wiretapper is no less noisy than the legitimate receiver.
    pub fn is_degraded(&self) -> bool {
        self.n2 >= self.n1
    }
}

/// How the channel inputs are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputStructure {
    /// Relay superposition `X_r = V₁ + V₂`, `V₁ ~ N(0, γP_r)`,
    /// `V₂ ~ N(0, (1−γ)P_r)`; transmitter `t` puts a fraction (α for X₁,
    /// β for X₂) of its power into a private component and the rest into a
    /// scaled copy of its relay component.
    DecodeForward { gamma: f64, alpha: f64, beta: f64 },
    /// Independent inputs at full power.
    IndependentFullPower,
    /// Independent inputs plus the relay's compressed observation
    /// `Ŷ_r = Y_r + Z_Q`, `Z_Q ~ N(0, q)`.
    IndependentWithCompression { q: f64 },
}

impl InputStructure {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InputStructure::DecodeForward { gamma, alpha, beta } => {
                for (name, v) in [("gamma", gamma), ("alpha", alpha), ("beta", beta)] {
                    if !(0.0..=1.0).contains(&v) {
                        return domain(format!("{name} must lie in [0, 1], got {v}"));
                    }
                }
                Ok(())
            }
            InputStructure::IndependentFullPower => Ok(()),
            InputStructure::IndependentWithCompression { q } => {
                if q.is_finite() && q > 0.0 {
                    Ok(())
                } else {
                    domain(format!("compression noise q must be finite and > 0, got {q}"))
                }
            }
        }
    }
}

/// Labels of the variables a covariance matrix may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GaussVar {
    X1,
    X2,
    Xr,
    Yr,
    Y,
    Z,
    /// Relay superposition component for user 1 (decode-forward only).
    V1,
    /// Relay superposition component for user 2 (decode-forward only).
    V2,
    /// Compressed relay observation (compression structure only).
    YrHat,
}

/// A labeled covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    vars: Vec<GaussVar>,
    matrix: DMatrix<f64>,
}

impl Covariance {
    pub fn variables(&self) -> &[GaussVar] {
        &self.vars
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn index(&self, v: GaussVar) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    /// Covariance entry for two labeled variables.
    pub fn get(&self, a: GaussVar, b: GaussVar) -> Option<f64> {
        Some(self.matrix[(self.index(a)?, self.index(b)?)])
    }

    fn indices(&self, set: &[GaussVar]) -> Result<Vec<usize>> {
        set.iter()
            .map(|&v| {
                self.index(v)
                    .ok_or_else(|| Error::Domain(format!("{v:?} is not part of this covariance")))
            })
            .collect()
    }

    /// I(a; b | c) in bits for labeled variable sets.
    pub fn cond_mi(&self, a: &[GaussVar], b: &[GaussVar], c: &[GaussVar]) -> Result<f64> {
        gaussian_cond_mi(
            &self.matrix,
            &self.indices(a)?,
            &self.indices(b)?,
            &self.indices(c)?,
        )
    }
}

// Independent sources. V1/V2 are unit-variance so that the γ ∈ {0, 1}
// endpoints keep a finite transmitter coefficient.
const SRC_V1: usize = 0;
const SRC_V2: usize = 1;
const SRC_X1: usize = 2;
const SRC_X2: usize = 3;
const SRC_XR: usize = 4;
const SRC_ZR: usize = 5;
const SRC_Z1: usize = 6;
const SRC_Z2: usize = 7;
const SRC_ZQ: usize = 8;
const N_SOURCES: usize = 9;

/// Joint covariance of the channel variables under the given input structure.
///
/// Variable order is `X₁, X₂, X_r, Y_r, Y, Z`, followed by `V₁, V₂` for the
/// decode-forward structure or `Ŷ_r` for the compression structure.
pub fn assemble_covariance(
    scenario: &GaussianScenario,
    structure: &InputStructure,
) -> Result<Covariance> {
    scenario.validate()?;
    structure.validate()?;
    let s = scenario;

    let mut var = [0.0; N_SOURCES];
    var[SRC_V1] = 1.0;
    var[SRC_V2] = 1.0;
    var[SRC_ZR] = s.nr;
    var[SRC_Z1] = s.n1;
    var[SRC_Z2] = s.n2;

    let mut x1 = [0.0; N_SOURCES];
    let mut x2 = [0.0; N_SOURCES];
    let mut xr = [0.0; N_SOURCES];
    let mut extra: Vec<(GaussVar, [f64; N_SOURCES])> = Vec::new();

    match *structure {
        InputStructure::DecodeForward { gamma, alpha, beta } => {
            // X₁ = √((1−α)P₁/(γP_r))·V₁ + X₁₀ written over the unit source
            // Ṽ₁ = V₁/√(γP_r); at γP_r = 0 the Ṽ₁ part is simply uncorrelated
            // with the vanished V₁.
            var[SRC_X1] = alpha * s.p1;
            var[SRC_X2] = beta * s.p2;
            x1[SRC_V1] = ((1.0 - alpha) * s.p1).sqrt();
            x1[SRC_X1] = 1.0;
            x2[SRC_V2] = ((1.0 - beta) * s.p2).sqrt();
            x2[SRC_X2] = 1.0;
            let mut v1 = [0.0; N_SOURCES];
            let mut v2 = [0.0; N_SOURCES];
            v1[SRC_V1] = (gamma * s.pr).sqrt();
            v2[SRC_V2] = ((1.0 - gamma) * s.pr).sqrt();
            for k in 0..N_SOURCES {
                xr[k] = v1[k] + v2[k];
            }
            extra.push((GaussVar::V1, v1));
            extra.push((GaussVar::V2, v2));
        }
        InputStructure::IndependentFullPower | InputStructure::IndependentWithCompression { .. } => {
            var[SRC_X1] = s.p1;
            var[SRC_X2] = s.p2;
            var[SRC_XR] = s.pr;
            x1[SRC_X1] = 1.0;
            x2[SRC_X2] = 1.0;
            xr[SRC_XR] = 1.0;
        }
    }

    let mut yr = [0.0; N_SOURCES];
    let mut y = [0.0; N_SOURCES];
    let mut z = [0.0; N_SOURCES];
    for k in 0..N_SOURCES {
        yr[k] = x1[k] + x2[k];
        y[k] = x1[k] + x2[k] + xr[k];
        z[k] = y[k];
    }
    yr[SRC_ZR] = 1.0;
    y[SRC_Z1] = 1.0;
    z[SRC_Z2] = 1.0;

    if let InputStructure::IndependentWithCompression { q } = *structure {
        var[SRC_ZQ] = q;
        let mut yhat = yr;
        yhat[SRC_ZQ] = 1.0;
        extra.push((GaussVar::YrHat, yhat));
    }

    let mut rows = vec![
        (GaussVar::X1, x1),
        (GaussVar::X2, x2),
        (GaussVar::Xr, xr),
        (GaussVar::Yr, yr),
        (GaussVar::Y, y),
        (GaussVar::Z, z),
    ];
    rows.extend(extra);

    let n = rows.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        (0..N_SOURCES)
            .map(|k| rows[i].1[k] * rows[j].1[k] * var[k])
            .sum()
    });
    for i in 0..n {
        if matrix[(i, i)] < 0.0 {
            return Err(Error::Internal(format!(
                "negative variance {} for {:?}",
                matrix[(i, i)],
                rows[i].0
            )));
        }
    }
    Ok(Covariance {
        vars: rows.into_iter().map(|(v, _)| v).collect(),
        matrix,
    })
}

/// log₂ det of the principal submatrix on `idx`, or `None` when a Cholesky
/// pivot falls below [`PIVOT_TOL`] relative to its diagonal entry.
fn log2_det(m: &DMatrix<f64>, idx: &[usize]) -> Option<f64> {
    let k = idx.len();
    let mut l = DMatrix::<f64>::zeros(k, k);
    let mut acc = 0.0;
    for j in 0..k {
        let ajj = m[(idx[j], idx[j])];
        let d = ajj - (0..j).map(|p| l[(j, p)] * l[(j, p)]).sum::<f64>();
        if d <= PIVOT_TOL * ajj.abs() || d <= 0.0 {
            return None;
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        acc += d.log2();
        for i in j + 1..k {
            let aij = m[(idx[i], idx[j])];
            let s: f64 = (0..j).map(|p| l[(i, p)] * l[(j, p)]).sum();
            l[(i, j)] = (aij - s) / root;
        }
    }
    Some(acc)
}

/// Members of `set`, in order, that keep `base` plus the members already kept
/// nonsingular.
fn reduce(cov: &DMatrix<f64>, base: &[usize], set: &[usize]) -> Vec<usize> {
    let mut idx = base.to_vec();
    let mut kept = Vec::with_capacity(set.len());
    for &i in set {
        idx.push(i);
        if log2_det(cov, &idx).is_some() {
            kept.push(i);
        } else {
            idx.pop();
        }
    }
    kept
}

/// Conditional mutual information I(A; B | C) in bits between jointly
/// Gaussian index sets of `cov`:
///
/// ½ log₂( det Σ_{A∪C} · det Σ_{B∪C} / (det Σ_C · det Σ_{A∪B∪C}) ), det Σ_∅ = 1.
///
/// Variables that are (numerically) affine functions of the conditioning set,
/// including constants, carry no information: they are dropped from `C`
/// against earlier members of `C`, and from `A` and `B` against `C` and
/// earlier members of the same set. If `A` or `B` becomes empty the result is
/// zero. A singular `A∪B∪C` block after that means the information is
/// infinite and yields [`Error::InfiniteInformation`].
pub fn gaussian_cond_mi(
    cov: &DMatrix<f64>,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    if !cov.is_square() {
        return domain("covariance must be square");
    }
    if a.is_empty() || b.is_empty() {
        return domain("mutual information needs two non-empty index sets");
    }
    let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    if let Some(&i) = all.iter().find(|&&i| i >= cov.nrows()) {
        return domain(format!("index {i} out of range"));
    }
    for (i, x) in all.iter().enumerate() {
        if all[..i].contains(x) {
            return domain(format!("index {x} repeated across or within sets"));
        }
    }

    let basis = reduce(cov, &[], c);
    let a = reduce(cov, &basis, a);
    let b = reduce(cov, &basis, b);
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }

    let ld = |idx: Vec<usize>, what: &str| {
        log2_det(cov, &idx).ok_or_else(|| {
            Error::InfiniteInformation(format!("singular covariance block for {what} {idx:?}"))
        })
    };
    let ac: Vec<usize> = basis.iter().chain(&a).copied().collect();
    let bc: Vec<usize> = basis.iter().chain(&b).copied().collect();
    let abc: Vec<usize> = basis.iter().chain(&a).chain(&b).copied().collect();
    let l_c = if basis.is_empty() {
        0.0
    } else {
        ld(basis.clone(), "C")?
    };
    let l_ac = ld(ac, "A∪C")?;
    let l_bc = ld(bc, "B∪C")?;
    let l_abc = ld(abc, "A∪B∪C")?;
    Ok(0.5 * (l_ac + l_bc - l_c - l_abc))
}
