//! Discrete memoryless channels: factorized input distributions, channel
//! kernels, and the secrecy-rate bounds evaluated on their composition.
//!
//! A [`DmFactorization`] is a set of [`Factor`]s (marginals or conditional
//! kernels) whose product is the joint distribution a bound is evaluated on.
//! Factors are recognised by the variables they generate and condition on;
//! the keys used for them in a JSON document are only labels.
//!
//! Variable names are fixed: `V1`, `V2` (decode-forward auxiliaries), `X1`,
//! `X2`, `Xr` (inputs), `Y` (receiver), `Yr` (relay), `Z` (wiretapper),
//! `Yhat` (compressed relay observation), `U` (outer-bound auxiliary).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::info::{check_entries, check_shape, JointPmf, PmfDocument, Variable, MAX_ENTRIES, SUM_TOL};

mod sweep;
mod theorems;

pub use sweep::{sweep_best_region, theorem41_u_sweep, MAX_U, SWEEP_WORK_BUDGET};
pub use theorems::{
    check_degraded, theorem1_pentagon, theorem2_branch_caps, theorem2_region, theorem3_region,
    theorem41_outer, CfOutcome, DmBranch, NfOutcome, DEGRADED_TV_TOL,
};

pub const U: &str = "U";
pub const V1: &str = "V1";
pub const V2: &str = "V2";
pub const X1: &str = "X1";
pub const X2: &str = "X2";
pub const XR: &str = "Xr";
pub const Y: &str = "Y";
pub const YR: &str = "Yr";
pub const Z: &str = "Z";
pub const YHAT: &str = "Yhat";

/// Order of variables in every composed joint distribution.
const CANONICAL_ORDER: [&str; 10] = [U, V1, V2, X1, X2, XR, Y, YR, Z, YHAT];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Decode-forward inner bound.
    T1,
    /// Noise-forward inner bound.
    T2,
    /// Compress-forward inner bound.
    T3,
    /// Outer bound for the degraded channel.
    T41,
}

/// A probability table over `vars`: a marginal when `given` is empty,
/// otherwise a kernel whose slices at each assignment of `given` sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    label: String,
    vars: Vec<Variable>,
    given: Vec<String>,
    probs: Vec<f64>,
}

impl Factor {
    /// Validates the table. Slices summing to one within the tolerance are
    /// rescaled to sum to one to rounding precision.
    pub fn new(
        label: impl Into<String>,
        vars: Vec<Variable>,
        given: Vec<String>,
        mut probs: Vec<f64>,
    ) -> Result<Factor> {
        let label = label.into();
        let invalid = |reason: String| Error::InvalidPmf {
            name: label.clone(),
            reason,
        };
        check_shape(&vars, probs.len()).map_err(invalid)?;
        check_entries(&probs).map_err(invalid)?;
        for (i, g) in given.iter().enumerate() {
            if !vars.iter().any(|v| &v.name == g) {
                return Err(invalid(format!("given variable `{g}` is not in the table")));
            }
            if given[..i].contains(g) {
                return Err(invalid(format!("given variable `{g}` listed twice")));
            }
        }
        if given.len() == vars.len() {
            return Err(invalid("a kernel must generate at least one variable".into()));
        }

        let mask: Vec<bool> = vars.iter().map(|v| given.contains(&v.name)).collect();
        let slot = slice_slots(&vars, &mask);
        let n_slices = slot.iter().copied().max().map_or(1, |m| m + 1);
        let mut sums = vec![0.0; n_slices];
        for (p, &s) in probs.iter().zip(&slot) {
            sums[s] += p;
        }
        if let Some((s, total)) = sums
            .iter()
            .enumerate()
            .find(|(_, t)| (*t - 1.0).abs() > SUM_TOL)
        {
            let reason = if given.is_empty() {
                format!("probabilities sum to {total}, expected 1")
            } else {
                format!("slice {s} of the kernel sums to {total}, expected 1")
            };
            return Err(invalid(reason));
        }
        for (p, &s) in probs.iter_mut().zip(&slot) {
            *p /= sums[s];
        }
        Ok(Factor {
            label,
            vars,
            given,
            probs,
        })
    }

    pub fn from_document(label: impl Into<String>, doc: &PmfDocument) -> Result<Factor> {
        Factor::new(label, doc.variables.clone(), doc.given.clone(), doc.probs.clone())
    }

    pub fn from_joint(label: impl Into<String>, pmf: &JointPmf) -> Result<Factor> {
        Factor::new(label, pmf.variables().to_vec(), Vec::new(), pmf.probs().to_vec())
    }

    pub fn to_document(&self) -> PmfDocument {
        PmfDocument {
            variables: self.vars.clone(),
            probs: self.probs.clone(),
            given: self.given.clone(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn given(&self) -> &[String] {
        &self.given
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn generated(&self) -> impl Iterator<Item = &Variable> {
        self.vars.iter().filter(|v| !self.given.contains(&v.name))
    }

    pub fn size_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().find(|v| v.name == name).map(|v| v.size)
    }

    fn signature(&self) -> (BTreeSet<&str>, BTreeSet<&str>) {
        (
            self.generated().map(|v| v.name.as_str()).collect(),
            self.given.iter().map(String::as_str).collect(),
        )
    }
}

/// For each flat entry of a table, the index of its slice (the assignment of
/// the masked variables, lexicographic).
fn slice_slots(vars: &[Variable], mask: &[bool]) -> Vec<usize> {
    let mut stride = vec![0usize; vars.len()];
    let mut s = 1;
    for i in (0..vars.len()).rev() {
        if mask[i] {
            stride[i] = s;
            s *= vars[i].size;
        }
    }
    let len: usize = vars.iter().map(|v| v.size).product();
    let mut out = Vec::with_capacity(len);
    let mut digits = vec![0usize; vars.len()];
    let mut slot = 0usize;
    for _ in 0..len {
        out.push(slot);
        let mut i = vars.len();
        while i > 0 {
            i -= 1;
            digits[i] += 1;
            slot += stride[i];
            if digits[i] < vars[i].size {
                break;
            }
            slot -= stride[i] * vars[i].size;
            digits[i] = 0;
        }
    }
    out
}

fn canonical_rank(name: &str) -> (usize, &str) {
    match CANONICAL_ORDER.iter().position(|&c| c == name) {
        Some(i) => (i, ""),
        None => (CANONICAL_ORDER.len(), name),
    }
}

/// Product of the factors as one joint distribution, with variables in
/// canonical order (unknown names last, alphabetically).
///
/// Every variable must be generated by exactly one factor, every conditioning
/// variable must be generated somewhere, and the conditioning structure must
/// be acyclic.
pub fn compose(factors: &[Factor]) -> Result<JointPmf> {
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    let mut producer: BTreeMap<&str, usize> = BTreeMap::new();
    for (fi, f) in factors.iter().enumerate() {
        for v in &f.vars {
            match sizes.insert(&v.name, v.size) {
                Some(s) if s != v.size => {
                    return domain(format!(
                        "variable `{}` has alphabet size {} in `{}` but {} elsewhere",
                        v.name, v.size, f.label, s
                    ))
                }
                _ => {}
            }
        }
        for v in f.generated() {
            if let Some(other) = producer.insert(&v.name, fi) {
                return domain(format!(
                    "variable `{}` is generated by both `{}` and `{}`",
                    v.name, factors[other].label, f.label
                ));
            }
        }
    }
    for f in factors {
        for g in &f.given {
            if !producer.contains_key(g.as_str()) {
                return domain(format!(
                    "`{}` conditions on `{g}`, which no factor generates",
                    f.label
                ));
            }
        }
    }
    // Kahn's algorithm over factors: a factor is ready once all of its
    // conditioning variables have been generated.
    let mut done = vec![false; factors.len()];
    let mut generated: BTreeSet<&str> = BTreeSet::new();
    for _ in 0..factors.len() {
        let ready = (0..factors.len()).find(|&i| {
            !done[i]
                && factors[i]
                    .given
                    .iter()
                    .all(|g| generated.contains(g.as_str()))
        });
        match ready {
            Some(i) => {
                done[i] = true;
                generated.extend(factors[i].generated().map(|v| v.name.as_str()));
            }
            None => return domain("the factors condition on each other cyclically"),
        }
    }

    let mut names: Vec<&str> = sizes.keys().copied().collect();
    names.sort_by_key(|n| canonical_rank(n));
    let vars: Vec<Variable> = names.iter().map(|&n| Variable::new(n, sizes[n])).collect();
    let len = vars
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.size).filter(|&n| n <= MAX_ENTRIES))
        .ok_or_else(|| {
            Error::Capability(format!(
                "composed distribution exceeds the {MAX_ENTRIES}-entry cap"
            ))
        })?;

    // steps[i] lists (factor, stride) pairs advanced when variable i ticks.
    let mut steps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vars.len()];
    for (fi, f) in factors.iter().enumerate() {
        let mut stride = 1;
        for v in f.vars.iter().rev() {
            let pos = names.iter().position(|&n| n == v.name).expect("collected above");
            steps[pos].push((fi, stride));
            stride *= v.size;
        }
    }
    let mut idx = vec![0usize; factors.len()];
    let mut digits = vec![0usize; vars.len()];
    let mut probs = Vec::with_capacity(len);
    for _ in 0..len {
        probs.push(
            factors
                .iter()
                .zip(&idx)
                .map(|(f, &k)| f.probs[k])
                .product::<f64>(),
        );
        let mut i = vars.len();
        while i > 0 {
            i -= 1;
            digits[i] += 1;
            for &(fi, st) in &steps[i] {
                idx[fi] += st;
            }
            if digits[i] < vars[i].size {
                break;
            }
            for &(fi, st) in &steps[i] {
                idx[fi] -= st * vars[i].size;
            }
            digits[i] = 0;
        }
    }
    JointPmf::new(vars, probs).map_err(|e| Error::Internal(format!("composition: {e}")))
}

/// What a factor contributes, recognised from its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    V1,
    V2,
    X1,
    X2,
    Xr,
    X1GivenV1,
    X2GivenV2,
    XrGivenV,
    InputsWithU,
    /// `P(Y, Z[, Yr] | X1, X2, Xr)`.
    Channel,
    /// `P(Y[, Yr] | X1, X2, Xr)`, completed by a `P(Z | Y)` factor.
    MainChannel,
    WiretapGivenY,
    TestChannel,
}

fn role_of(f: &Factor) -> Option<Role> {
    let (gen, given) = f.signature();
    let set = |names: &[&'static str]| names.iter().copied().collect::<BTreeSet<&str>>();
    let inputs = set(&[X1, X2, XR]);
    let role = if given.is_empty() {
        match gen {
            g if g == set(&[V1]) => Role::V1,
            g if g == set(&[V2]) => Role::V2,
            g if g == set(&[X1]) => Role::X1,
            g if g == set(&[X2]) => Role::X2,
            g if g == set(&[XR]) => Role::Xr,
            g if g == set(&[U, X1, X2, XR]) => Role::InputsWithU,
            _ => return None,
        }
    } else if given == inputs {
        match gen {
            g if g == set(&[Y, Z]) || g == set(&[Y, Z, YR]) => Role::Channel,
            g if g == set(&[Y]) || g == set(&[Y, YR]) => Role::MainChannel,
            _ => return None,
        }
    } else {
        match (gen, given) {
            (g, c) if g == set(&[X1]) && c == set(&[V1]) => Role::X1GivenV1,
            (g, c) if g == set(&[X2]) && c == set(&[V2]) => Role::X2GivenV2,
            (g, c) if g == set(&[XR]) && c == set(&[V1, V2]) => Role::XrGivenV,
            (g, c) if g == set(&[Z]) && c == set(&[Y]) => Role::WiretapGivenY,
            (g, c) if g == set(&[YHAT]) && c == set(&[YR, XR]) => Role::TestChannel,
            _ => return None,
        }
    };
    Some(role)
}

fn describe_signature(f: &Factor) -> String {
    let (gen, given) = f.signature();
    let gen: Vec<&str> = gen.into_iter().collect();
    if given.is_empty() {
        format!("P({})", gen.join(","))
    } else {
        let given: Vec<&str> = given.into_iter().collect();
        format!("P({}|{})", gen.join(","), given.join(","))
    }
}

/// Checks that `factors` are exactly what `theorem` needs.
fn check_roles(theorem: Theorem, factors: &[Factor]) -> Result<()> {
    let mut seen: BTreeMap<Role, &str> = BTreeMap::new();
    for f in factors {
        let role = role_of(f).ok_or_else(|| {
            Error::Domain(format!(
                "`{}`: {} is not a factor of any supported theorem",
                f.label,
                describe_signature(f)
            ))
        })?;
        if let Some(prev) = seen.insert(role, &f.label) {
            return domain(format!("`{}` and `{prev}` play the same role", f.label));
        }
    }
    let has = |r: Role| seen.contains_key(&r);
    let channel_ok = match (has(Role::Channel), has(Role::MainChannel), has(Role::WiretapGivenY)) {
        (true, false, false) | (false, true, true) => true,
        _ => false,
    };
    if !channel_ok {
        return domain(
            "expected a channel P(Y,Z[,Yr]|X1,X2,Xr), or P(Y[,Yr]|X1,X2,Xr) together with P(Z|Y)",
        );
    }
    let relay = factors
        .iter()
        .any(|f| f.generated().any(|v| v.name == YR) && !f.given.iter().any(|g| g == YR));

    let (inputs, needs_relay): (&[Role], bool) = match theorem {
        Theorem::T1 => (
            &[Role::V1, Role::V2, Role::X1GivenV1, Role::X2GivenV2, Role::XrGivenV],
            true,
        ),
        Theorem::T2 => (&[Role::X1, Role::X2, Role::Xr], false),
        Theorem::T3 => (&[Role::X1, Role::X2, Role::Xr, Role::TestChannel], true),
        Theorem::T41 => (&[Role::InputsWithU], false),
    };
    for r in inputs {
        if !has(*r) {
            return domain(format!("{theorem:?} needs a factor {}", role_name(*r)));
        }
    }
    let allowed = |r: &Role| {
        inputs.contains(r)
            || matches!(r, Role::Channel | Role::MainChannel | Role::WiretapGivenY)
    };
    if let Some((r, label)) = seen.iter().find(|(r, _)| !allowed(r)) {
        return domain(format!(
            "`{label}`: {} is not part of a {theorem:?} factorization",
            role_name(*r)
        ));
    }
    if needs_relay && !relay {
        return domain(format!("{theorem:?} needs the relay output Yr in the channel"));
    }
    Ok(())
}

fn role_name(r: Role) -> &'static str {
    match r {
        Role::V1 => "P(V1)",
        Role::V2 => "P(V2)",
        Role::X1 => "P(X1)",
        Role::X2 => "P(X2)",
        Role::Xr => "P(Xr)",
        Role::X1GivenV1 => "P(X1|V1)",
        Role::X2GivenV2 => "P(X2|V2)",
        Role::XrGivenV => "P(Xr|V1,V2)",
        Role::InputsWithU => "P(U,X1,X2,Xr)",
        Role::Channel => "P(Y,Z,Yr|X1,X2,Xr)",
        Role::MainChannel => "P(Y,Yr|X1,X2,Xr)",
        Role::WiretapGivenY => "P(Z|Y)",
        Role::TestChannel => "P(Yhat|Yr,Xr)",
    }
}

/// A validated factorization together with its composed joint distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DmFactorization {
    theorem: Theorem,
    factors: Vec<Factor>,
    joint: JointPmf,
    r_star: Option<f64>,
}

impl DmFactorization {
    /// `r_star` is required for `T3` and rejected otherwise.
    pub fn new(theorem: Theorem, factors: Vec<Factor>, r_star: Option<f64>) -> Result<Self> {
        match (theorem, r_star) {
            (Theorem::T3, None) => return domain("/r_star: T3 needs a relay noise rate r_star"),
            (Theorem::T3, Some(r)) if !(r.is_finite() && r >= 0.0) => {
                return domain(format!("/r_star: must be finite and >= 0, got {r}"))
            }
            (Theorem::T3, Some(_)) => {}
            (t, Some(_)) => return domain(format!("/r_star: only applies to T3, not {t:?}")),
            (_, None) => {}
        }
        check_roles(theorem, &factors)?;
        let joint = compose(&factors)?;
        Ok(DmFactorization {
            theorem,
            factors,
            joint,
            r_star,
        })
    }

    /// Parses and validates a JSON factorization document. Schema errors are
    /// reported with the JSON pointer of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec = DmSpec::from_json(text)?;
        spec.into_factorization()
    }

    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn r_star(&self) -> Option<f64> {
        self.r_star
    }

    fn expect(&self, theorem: Theorem) -> Result<()> {
        if self.theorem == theorem {
            Ok(())
        } else {
            domain(format!(
                "factorization is for {:?}, not {theorem:?}",
                self.theorem
            ))
        }
    }
}

/// On-disk form of a [`DmFactorization`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmSpec {
    pub theorem: Theorem,
    pub factors: BTreeMap<String, PmfDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
}

impl DmSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            let at = if pointer.is_empty() {
                "document root".to_string()
            } else {
                pointer
            };
            Error::Domain(format!("{at}: {}", e.inner()))
        })
    }

    pub fn into_factorization(self) -> Result<DmFactorization> {
        let factors = self
            .factors
            .iter()
            .map(|(key, doc)| Factor::from_document(format!("/factors/{}", escape_pointer(key)), doc))
            .collect::<Result<Vec<_>>>()?;
        DmFactorization::new(self.theorem, factors, self.r_star)
    }

    pub fn from_factorization(f: &DmFactorization) -> DmSpec {
        let factors = f
            .factors
            .iter()
            .map(|fac| {
                let key = fac.label.rsplit('/').next().unwrap_or(&fac.label).to_string();
                (key, fac.to_document())
            })
            .collect();
        DmSpec {
            theorem: f.theorem,
            factors,
            r_star: f.r_star,
        }
    }
}

fn escape_pointer(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    path.iter()
        .map(|seg| match seg {
            Segment::Seq { index } => format!("/{index}"),
            Segment::Map { key } => format!("/{}", escape_pointer(key)),
            Segment::Enum { variant } => format!("/{}", escape_pointer(variant)),
            Segment::Unknown => "/?".to_string(),
        })
        .collect()
}
