//! Exact information measures over finite joint distributions.
//!
//! A [`JointPmf`] is a dense probability tensor over named discrete variables,
//! indexed lexicographically with the last variable varying fastest. Every
//! measure is computed by exact summation over the tensor; all logarithms are
//! base 2, so results are in bits.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest tensor (product of alphabet sizes) accepted by [`JointPmf`].
pub const MAX_ENTRIES: usize = 10_000_000;

/// Total-mass tolerance for a valid distribution.
pub const SUM_TOL: f64 = 1e-12;

/// Probabilities below this are treated as exact zeros inside logarithms.
pub const ZERO_PROB: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub size: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Variable {
            name: name.into(),
            size,
        }
    }
}

/// On-disk form of a probability table.
///
/// `given` is empty for a joint distribution. When it names some of the
/// variables, the table is a conditional kernel: every slice obtained by
/// fixing the `given` variables must sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfDocument {
    pub variables: Vec<Variable>,
    pub probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub given: Vec<String>,
}

/// A finite joint probability mass function over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    vars: Vec<Variable>,
    probs: Vec<f64>,
}

/// Checks names, sizes and tensor length; returns the tensor length.
pub(crate) fn check_shape(vars: &[Variable], len: usize) -> std::result::Result<usize, String> {
    let mut expected: usize = 1;
    for (i, v) in vars.iter().enumerate() {
        if v.name.is_empty() {
            return Err("variable names must be non-empty".into());
        }
        if vars[..i].iter().any(|w| w.name == v.name) {
            return Err(format!("variable `{}` appears twice", v.name));
        }
        if v.size == 0 {
            return Err(format!("variable `{}` has an empty alphabet", v.name));
        }
        expected = expected
            .checked_mul(v.size)
            .filter(|&n| n <= MAX_ENTRIES)
            .ok_or_else(|| {
                format!("alphabet-size product exceeds the {MAX_ENTRIES}-entry cap")
            })?;
    }
    if expected != len {
        return Err(format!(
            "tensor has {len} entries but the alphabet sizes require {expected}"
        ));
    }
    Ok(expected)
}

pub(crate) fn check_entries(probs: &[f64]) -> std::result::Result<(), String> {
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(format!("entry {i} is {p}, expected a finite value >= 0"));
    }
    Ok(())
}

impl JointPmf {
    pub fn new(vars: Vec<Variable>, probs: Vec<f64>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPmf {
            name: describe(&vars),
            reason,
        };
        check_shape(&vars, probs.len()).map_err(invalid)?;
        check_entries(&probs).map_err(invalid)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(invalid(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(JointPmf { vars, probs })
    }

    /// Convenience constructor from `(name, size)` pairs.
    pub fn from_table(vars: &[(&str, usize)], probs: Vec<f64>) -> Result<Self> {
        let vars = vars.iter().map(|&(n, s)| Variable::new(n, s)).collect();
        JointPmf::new(vars, probs)
    }

    /// Builds a point mass with every variable at the given symbol.
    pub fn point_mass(vars: &[(&str, usize)], at: &[usize]) -> Result<Self> {
        if at.len() != vars.len() {
            return domain("point mass needs one symbol per variable");
        }
        let len: usize = vars.iter().map(|v| v.1).product();
        let mut probs = vec![0.0; len];
        let mut idx = 0;
        for (&(name, size), &s) in vars.iter().zip(at) {
            if s >= size {
                return domain(format!("symbol {s} out of range for `{name}`"));
            }
            idx = idx * size + s;
        }
        probs[idx] = 1.0;
        JointPmf::from_table(vars, probs)
    }

    pub fn from_document(doc: &PmfDocument) -> Result<Self> {
        if !doc.given.is_empty() {
            return domain("a conditional kernel is not a joint distribution");
        }
        JointPmf::new(doc.variables.clone(), doc.probs.clone())
    }

    pub fn to_document(&self) -> PmfDocument {
        PmfDocument {
            variables: self.vars.clone(),
            probs: self.probs.clone(),
            given: Vec::new(),
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn size_of(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.vars[i].size)
    }

    /// Probability at one assignment, symbols in variable order.
    pub fn prob(&self, symbols: &[usize]) -> f64 {
        let idx = symbols
            .iter()
            .zip(&self.vars)
            .fold(0, |acc, (&s, v)| acc * v.size + s);
        self.probs[idx]
    }

    fn mask(&self, names: &[&str]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.vars.len()];
        for name in names {
            match self.index_of(name) {
                Some(i) => mask[i] = true,
                None => return domain(format!("unknown variable `{name}`")),
            }
        }
        Ok(mask)
    }

    /// Sums out every variable not selected by `keep`; kept variables retain
    /// their original relative order.
    pub(crate) fn project(&self, keep: &[bool]) -> JointPmf {
        let n = self.vars.len();
        let mut out_stride = vec![0usize; n];
        let mut stride = 1;
        for i in (0..n).rev() {
            if keep[i] {
                out_stride[i] = stride;
                stride *= self.vars[i].size;
            }
        }
        let mut out = vec![0.0; stride];
        let mut digits = vec![0usize; n];
        let mut o = 0usize;
        for &p in &self.probs {
            out[o] += p;
            let mut i = n;
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                o += out_stride[i];
                if digits[i] < self.vars[i].size {
                    break;
                }
                o -= out_stride[i] * self.vars[i].size;
                digits[i] = 0;
            }
        }
        let vars = self
            .vars
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.clone())
            .collect();
        JointPmf { vars, probs: out }
    }

    /// Marginal distribution of the named variables.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return domain("marginalize needs at least one variable to keep");
        }
        let mask = self.mask(keep)?;
        Ok(self.project(&mask))
    }

    fn entropy_of(&self, mask: &[bool]) -> f64 {
        if !mask.iter().any(|&m| m) {
            return 0.0;
        }
        let marginal = if mask.iter().all(|&m| m) {
            None
        } else {
            Some(self.project(mask))
        };
        let probs = marginal.as_ref().map_or(&self.probs[..], |m| &m.probs[..]);
        probs
            .iter()
            .filter(|&&p| p >= ZERO_PROB)
            .map(|&p| -p * p.log2())
            .sum::<f64>()
            .max(0.0)
    }

    /// Joint Shannon entropy H(vars) in bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return domain("entropy of an empty variable set");
        }
        Ok(self.entropy_of(&self.mask(vars)?))
    }

    /// Conditional entropy H(a | c) in bits.
    pub fn cond_entropy(&self, a: &[&str], c: &[&str]) -> Result<f64> {
        if a.is_empty() {
            return domain("conditional entropy of an empty variable set");
        }
        let ma = self.mask(a)?;
        let mc = self.mask(c)?;
        if ma.iter().zip(&mc).any(|(x, y)| *x && *y) {
            return domain("conditioned and conditioning sets overlap");
        }
        let mac: Vec<bool> = ma.iter().zip(&mc).map(|(x, y)| *x || *y).collect();
        Ok(self.entropy_of(&mac) - self.entropy_of(&mc))
    }

    /// I(a; b | c) in bits, as H(a,c) + H(b,c) − H(c) − H(a,b,c).
    ///
    /// `a` and `b` must be non-empty; `c` may be empty. The three sets must be
    /// pairwise disjoint.
    pub fn cond_mutual_info(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return domain("mutual information needs two non-empty variable sets");
        }
        let ma = self.mask(a)?;
        let mb = self.mask(b)?;
        let mc = self.mask(c)?;
        for i in 0..self.vars.len() {
            if (ma[i] as u8 + mb[i] as u8 + mc[i] as u8) > 1 {
                return domain(format!(
                    "variable `{}` appears in more than one argument set",
                    self.vars[i].name
                ));
            }
        }
        // Work on the smaller marginal over a ∪ b ∪ c.
        let union: Vec<bool> = (0..self.vars.len())
            .map(|i| ma[i] || mb[i] || mc[i])
            .collect();
        let sub = self.project(&union);
        let pick = |m: &[bool]| -> Vec<bool> {
            m.iter()
                .zip(&union)
                .filter(|(_, &u)| u)
                .map(|(&x, _)| x)
                .collect()
        };
        let (sa, sb, sc) = (pick(&ma), pick(&mb), pick(&mc));
        let ac: Vec<bool> = sa.iter().zip(&sc).map(|(x, y)| *x || *y).collect();
        let bc: Vec<bool> = sb.iter().zip(&sc).map(|(x, y)| *x || *y).collect();
        let h_abc = sub.entropy_of(&vec![true; sub.vars.len()]);
        Ok(sub.entropy_of(&ac) + sub.entropy_of(&bc) - sub.entropy_of(&sc) - h_abc)
    }

    /// I(a; b) in bits.
    pub fn mutual_info(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cond_mutual_info(a, b, &[])
    }
}

fn describe(vars: &[Variable]) -> String {
    let names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    format!("P({})", names.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bsc(p: f64) -> [f64; 4] {
        [1.0 - p, p, p, 1.0 - p]
    }

    /// X uniform -> BSC(p) -> Y -> BSC(q) -> Z.
    fn markov_chain(p: f64, q: f64) -> JointPmf {
        let (c1, c2) = (bsc(p), bsc(q));
        let mut probs = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    probs.push(0.5 * c1[x * 2 + y] * c2[y * 2 + z]);
                }
            }
        }
        JointPmf::from_table(&[("X", 2), ("Y", 2), ("Z", 2)], probs).unwrap()
    }

    #[test]
    fn marginal_of_uniform_square() {
        let p = JointPmf::from_table(&[("X", 2), ("Y", 2)], vec![0.25; 4]).unwrap();
        let m = p.marginalize(&["X"]).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
        assert_eq!(m.variables(), &[Variable::new("X", 2)]);
    }

    #[test]
    fn marginal_over_everything_is_identity() {
        let p = markov_chain(0.1, 0.3);
        assert_eq!(p.marginalize(&["Z", "X", "Y"]).unwrap(), p);
    }

    #[test]
    fn marginal_of_perfectly_correlated_pair() {
        let p = JointPmf::from_table(&[("X", 2), ("Y", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(p.marginalize(&["Y"]).unwrap().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn marginalize_rejects_unknown_and_empty() {
        let p = markov_chain(0.1, 0.1);
        assert!(matches!(p.marginalize(&["W"]), Err(Error::Domain(_))));
        assert!(matches!(p.marginalize(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn entropy_reference_values() {
        let u = JointPmf::from_table(&[("X", 2)], vec![0.5, 0.5]).unwrap();
        assert_eq!(u.entropy(&["X"]).unwrap(), 1.0);
        let d = JointPmf::point_mass(&[("X", 3)], &[1]).unwrap();
        assert_eq!(d.entropy(&["X"]).unwrap(), 0.0);
        let b = JointPmf::from_table(&[("X", 2)], vec![0.11, 0.89]).unwrap();
        // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated to 30 digits offline.
        assert!((b.entropy(&["X"]).unwrap() - 0.499_915_958_164_528).abs() < 1e-12);
        assert!(matches!(b.entropy(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn mutual_information_reference_values() {
        let indep = JointPmf::from_table(&[("X", 2), ("Y", 2)], vec![0.06, 0.14, 0.24, 0.56])
            .unwrap();
        assert!(indep.mutual_info(&["X"], &["Y"]).unwrap().abs() < 1e-12);

        let chain = markov_chain(0.11, 0.2);
        assert!(chain.cond_mutual_info(&["X"], &["Z"], &["Y"]).unwrap().abs() < 1e-12);

        let bsc = markov_chain(0.11, 0.0);
        let i = bsc.mutual_info(&["X"], &["Y"]).unwrap();
        assert!((i - 0.500_084_041_835_472).abs() < 1e-12, "{i}");
    }

    #[test]
    fn overlapping_sets_are_rejected() {
        let p = markov_chain(0.1, 0.2);
        assert!(matches!(
            p.cond_mutual_info(&["X"], &["X", "Y"], &[]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            p.cond_mutual_info(&["X"], &["Y"], &["Y"]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let bad_sum = JointPmf::from_table(&[("X", 2)], vec![0.5, 0.4]);
        assert!(matches!(bad_sum, Err(Error::InvalidPmf { .. })));
        let negative = JointPmf::from_table(&[("X", 2)], vec![1.5, -0.5]);
        assert!(matches!(negative, Err(Error::InvalidPmf { .. })));
        let dup = JointPmf::from_table(&[("X", 2), ("X", 1)], vec![0.5, 0.5]);
        assert!(matches!(dup, Err(Error::InvalidPmf { .. })));
        let short = JointPmf::from_table(&[("X", 3)], vec![0.5, 0.5]);
        assert!(matches!(short, Err(Error::InvalidPmf { .. })));
        let huge = JointPmf::new(
            vec![Variable::new("A", 10_000), Variable::new("B", 10_000)],
            vec![],
        );
        assert!(matches!(huge, Err(Error::InvalidPmf { .. })));
    }

    #[test]
    fn document_round_trip() {
        let p = markov_chain(0.25, 0.125);
        let json = serde_json::to_string(&p.to_document()).unwrap();
        let doc: PmfDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(JointPmf::from_document(&doc).unwrap(), p);
    }

    fn random_pmf() -> impl Strategy<Value = JointPmf> {
        prop::collection::vec(1usize..=3, 4).prop_flat_map(|sizes| {
            let len: usize = sizes.iter().product();
            prop::collection::vec(0.0f64..1.0, len).prop_map(move |w| {
                let total: f64 = w.iter().sum::<f64>() + 1e-9;
                let probs = w.iter().map(|x| (x + 1e-9 / len as f64) / total).collect();
                let names = ["A", "B", "C", "D"];
                let vars = names
                    .iter()
                    .zip(&sizes)
                    .map(|(n, &s)| Variable::new(*n, s))
                    .collect();
                JointPmf::new(vars, probs).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cmi_is_nonnegative_and_symmetric(p in random_pmf()) {
            let ab = p.cond_mutual_info(&["A"], &["B"], &["C"]).unwrap();
            let ba = p.cond_mutual_info(&["B"], &["A"], &["C"]).unwrap();
            prop_assert!(ab >= -1e-12);
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn chain_rule_holds(p in random_pmf()) {
            let joint = p.cond_mutual_info(&["A"], &["B", "D"], &["C"]).unwrap();
            let first = p.cond_mutual_info(&["A"], &["B"], &["C"]).unwrap();
            let second = p.cond_mutual_info(&["A"], &["D"], &["B", "C"]).unwrap();
            prop_assert!((joint - first - second).abs() < 1e-10);
        }

        #[test]
        fn entropy_is_bounded_by_alphabet(p in random_pmf()) {
            let h = p.entropy(&["A", "C"]).unwrap();
            let cap = ((p.size_of("A").unwrap() * p.size_of("C").unwrap()) as f64).log2();
            prop_assert!(h >= 0.0 && h <= cap + 1e-12);
        }

        #[test]
        fn data_processing(p in 0.0f64..0.5, q in 0.0f64..0.5) {
            let chain = markov_chain(p, q);
            let xy = chain.mutual_info(&["X"], &["Y"]).unwrap();
            let xz = chain.mutual_info(&["X"], &["Z"]).unwrap();
            prop_assert!(xz <= xy + 1e-10);
        }
    }
}
