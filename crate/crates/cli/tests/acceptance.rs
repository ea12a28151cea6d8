//! Acceptance suite: one PASS/FAIL line per check, exit status 1 if any fail.
//!
//! Every check states its measured value next to the pinned tolerance so a
//! failure can be read straight off the log.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use marcwt::{cmd_figure, FigureRun, Preset, Strategy};
use marcwt_core::discrete::{
    theorem1_pentagon, theorem41_u_sweep, DmFactorization, Factor, Theorem, MAX_U, V1, V2, X1, X2, XR, Y, YR, Z,
};
use marcwt_core::gaussian_regions::{
    baseline_region, cf_caps, cf_region, df_pentagon, df_region, nf_region, oracle, outer_region,
    DEFAULT_GAMMA_STEPS, DEFAULT_R_STAR_STEPS,
};
use marcwt_core::geometry::{hull_union, max_support_deficit, quadrant_directions};
use marcwt_core::info::Variable;
use marcwt_core::{GaussianScenario, JointPmf, RatePentagon, RateRegion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Suite {
    failed: usize,
    total: usize,
}

impl Suite {
    fn check(&mut self, id: &str, what: &str, pass: bool, detail: String) {
        self.total += 1;
        if !pass {
            self.failed += 1;
        }
        println!("{} [{id}] {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn max_abs_diff(a: &RatePentagon, b: &RatePentagon) -> f64 {
    a.caps()
        .iter()
        .zip(b.caps())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_scenario(rng: &mut ChaCha8Rng) -> GaussianScenario {
    GaussianScenario::new(
        rng.gen_range(0.1..=50.0),
        rng.gen_range(0.1..=50.0),
        rng.gen_range(0.1..=50.0),
        rng.gen_range(0.1..=20.0),
        rng.gen_range(0.1..=20.0),
        rng.gen_range(0.1..=20.0),
    )
    .unwrap()
}

fn fig(nr: f64) -> GaussianScenario {
    GaussianScenario::new(5.0, 6.0, 20.0, nr, 2.0, 14.0).unwrap()
}

fn criterion_1(s: &mut Suite) {
    const TOL: f64 = 1e-9;
    const N: usize = 100;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut df, mut nf, mut cf, mut base) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut branch_mismatch = 0;
    for _ in 0..N {
        let sc = random_scenario(&mut rng);
        let gamma = rng.gen_range(0.0..=1.0);
        df = df.max(max_abs_diff(&df_pentagon(&sc, gamma).unwrap(), &oracle::df_caps(&sc, gamma).unwrap()));

        let (a, b) = (nf_region(&sc).unwrap(), oracle::nf(&sc).unwrap());
        branch_mismatch += usize::from(a.branch != b.branch);
        nf = nf.max(max_abs_diff(&a.pentagon, &b.pentagon));

        let q = rng.gen_range(1.0..=500.0);
        let margin = oracle::cf(&sc, q, 0.0).unwrap().margin;
        let r_star = margin.max(0.0) * rng.gen_range(0.0..=1.0);
        let (branch, p) = cf_caps(&sc, q, r_star).unwrap();
        let o = oracle::cf(&sc, q, r_star).unwrap();
        branch_mismatch += usize::from(branch != o.branch);
        cf = cf.max(max_abs_diff(&p, &o.pentagon));

        base = base.max(max_abs_diff(&baseline_region(&sc).unwrap(), &oracle::baseline(&sc).unwrap()));
    }
    let elapsed = start.elapsed();
    for (name, err) in [("DF", df), ("NF", nf), ("CF", cf), ("baseline", base)] {
        s.check(
            "1",
            &format!("{name} caps match the log-det oracle on {N} random scenarios"),
            err <= TOL,
            format!("max |diff| = {err:.3e} bits (tol {TOL:e})"),
        );
    }
    s.check(
        "1",
        "NF/CF branch choice agrees with the oracle",
        branch_mismatch == 0,
        format!("{branch_mismatch} mismatches"),
    );
    s.check(
        "1",
        "oracle comparison runtime",
        elapsed < Duration::from_secs(5),
        format!("{:.3} s (limit 5 s)", elapsed.as_secs_f64()),
    );
}

fn criterion_2(s: &mut Suite) {
    const TOL: f64 = 1e-5;
    const CONTAIN_TOL: f64 = 1e-9;
    let sc = fig(5.0);
    let base = baseline_region(&sc).unwrap();
    let nf = nf_region(&sc).unwrap().pentagon;
    let df = df_region(&sc, DEFAULT_GAMMA_STEPS).unwrap();
    let cf = cf_region(&sc, 200.0, DEFAULT_R_STAR_STEPS).unwrap();
    // Independently recomputed: ½log₂6.5 − ½log₂(25/14).
    for (name, got, want) in [
        ("baseline sum cap", base.caps()[2], 0.931969),
        ("NF sum cap", nf.caps()[2], 1.007972),
        ("DF sum cap", df.region.extents()[2], 0.636841),
    ] {
        s.check(
            "2",
            &format!("Figure 2 {name}"),
            (got - want).abs() <= TOL,
            format!("{got:.7} vs {want} (tol {TOL:e})"),
        );
    }
    let (base_r, nf_r) = (base.vertices(), nf.vertices());
    for (name, outer, inner) in [
        ("baseline ⊆ NF", &nf_r, &base_r),
        ("baseline ⊆ CF", &cf.region, &base_r),
        ("CF ⊆ NF", &nf_r, &cf.region),
    ] {
        s.check(
            "2",
            &format!("Figure 2 {name}"),
            outer.contains(inner, CONTAIN_TOL),
            format!("tol {CONTAIN_TOL:e}"),
        );
    }
    let (a_df, a_base) = (df.region.area(), base_r.area());
    s.check(
        "2",
        "Figure 2 area(DF) < area(baseline)",
        a_df < a_base,
        format!("{a_df:.6} < {a_base:.6}"),
    );
}

fn areas(nr: f64) -> (f64, f64, f64, f64) {
    let sc = fig(nr);
    (
        df_region(&sc, DEFAULT_GAMMA_STEPS).unwrap().region.area(),
        nf_region(&sc).unwrap().pentagon.vertices().area(),
        cf_region(&sc, 200.0, DEFAULT_R_STAR_STEPS).unwrap().region.area(),
        baseline_region(&sc).unwrap().vertices().area(),
    )
}

fn criterion_3(s: &mut Suite) {
    for (label, nr) in [("Figure 4", 1.6), ("Figure 5", 0.0)] {
        let (df, nf, cf, _) = areas(nr);
        s.check(
            "3",
            &format!("{label} area(DF) > area(NF) >= area(CF)"),
            df > nf && nf >= cf,
            format!("{df:.6} > {nf:.6} >= {cf:.6}"),
        );
    }
    let (df, nf, _, base) = areas(2.3);
    s.check(
        "3",
        "Figure 3 area(baseline) < area(DF)",
        base < df,
        format!("{base:.6} < {df:.6}"),
    );
    s.check(
        "3",
        "Figure 3 area(DF) < area(NF)",
        df < nf,
        format!("{df:.6} < {nf:.6}"),
    );
}

fn criterion_4(s: &mut Suite) {
    const TOL: f64 = 1e-3;
    let sc = fig(5.0);
    let dirs = quadrant_directions(181);
    let cf = cf_region(&sc, 1e6, DEFAULT_R_STAR_STEPS).unwrap().region;
    let nf = nf_region(&sc).unwrap().pentagon.vertices();
    let deficit = max_support_deficit(&cf, &nf, &dirs).max(max_support_deficit(&nf, &cf, &dirs));
    s.check(
        "4",
        "CF at Q = 1e6 matches NF on Figure 2",
        deficit < TOL,
        format!("max support deficit {deficit:.3e} bits over 181 directions (tol {TOL:e})"),
    );
}

fn criterion_5(s: &mut Suite) {
    const TOL: f64 = 1e-2;
    let dirs = quadrant_directions(181);
    let mut gaps = Vec::new();
    for p in Preset::ALL {
        let sc = p.scenario();
        let outer = outer_region(&sc, 11).unwrap();
        let inners: Vec<(&str, RateRegion)> = vec![
            ("DF", df_region(&sc, DEFAULT_GAMMA_STEPS).unwrap().region),
            ("NF", nf_region(&sc).unwrap().pentagon.vertices()),
            ("CF", cf_region(&sc, 200.0, DEFAULT_R_STAR_STEPS).unwrap().region),
            ("baseline", baseline_region(&sc).unwrap().vertices()),
        ];
        let worst = inners
            .iter()
            .map(|(_, r)| max_support_deficit(&outer, r, &dirs))
            .fold(f64::NEG_INFINITY, f64::max);
        s.check(
            "5",
            &format!("outer bound contains DF, NF, CF, baseline at Nr = {}", p.nr()),
            worst <= TOL,
            format!("max support deficit {worst:.3e} bits (tol {TOL:e})"),
        );
        let hull = hull_union(inners.iter().map(|(_, r)| r));
        gaps.push(outer.area() - hull.area());
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = gaps.iter().map(|g| format!("{g:.6}")).collect();
    s.check(
        "5",
        "gap area(outer) - area(hull of inners) strictly decreases over Nr = 5, 2.3, 1.6, 0",
        decreasing,
        shown.join(" > "),
    );
}

fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0f64).powi(2) + 1e-3).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

/// Random `P(gen | given)` with `given` listed first.
fn kernel(rng: &mut ChaCha8Rng, label: &str, gen: &[(&str, usize)], given: &[(&str, usize)]) -> Factor {
    let vars: Vec<Variable> = given.iter().chain(gen).map(|&(n, k)| Variable::new(n, k)).collect();
    let slices: usize = given.iter().map(|g| g.1).product();
    let width: usize = gen.iter().map(|g| g.1).product();
    let probs = (0..slices).flat_map(|_| random_pmf(rng, width)).collect();
    Factor::new(label, vars, given.iter().map(|g| g.0.to_string()).collect(), probs).unwrap()
}

/// `P(name | given) = 1{name = 0}`.
fn constant(label: &str, name: &str, size: usize, given: &[(&str, usize)]) -> Factor {
    let vars: Vec<Variable> = given.iter().chain(&[(name, size)]).map(|&(n, k)| Variable::new(n, k)).collect();
    let slices: usize = given.iter().map(|g| g.1).product();
    let probs = (0..slices).flat_map(|_| (0..size).map(|s| if s == 0 { 1.0 } else { 0.0 })).collect();
    Factor::new(label, vars, given.iter().map(|g| g.0.to_string()).collect(), probs).unwrap()
}

const INPUTS: [(&str, usize); 3] = [(X1, 2), (X2, 2), (XR, 2)];

fn t1_inputs(rng: &mut ChaCha8Rng) -> Vec<Factor> {
    vec![
        kernel(rng, "v1", &[(V1, 2)], &[]),
        kernel(rng, "v2", &[(V2, 2)], &[]),
        kernel(rng, "x1", &[(X1, 2)], &[(V1, 2)]),
        kernel(rng, "x2", &[(X2, 2)], &[(V2, 2)]),
        kernel(rng, "xr", &[(XR, 2)], &[(V1, 2), (V2, 2)]),
    ]
}

fn cap_error(p: &RatePentagon, want: [f64; 3]) -> f64 {
    p.caps().iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn mi(p: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> f64 {
    p.cond_mutual_info(a, b, c).unwrap()
}

fn criterion_6(s: &mut Suite) {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut factors = t1_inputs(&mut rng);
        factors.push(kernel(&mut rng, "ch", &[(Y, 3), (YR, 2), (Z, 1)], &INPUTS));
        let f = DmFactorization::new(Theorem::T1, factors, None).unwrap();
        let p = f.joint();
        let marc = [
            mi(p, &[X1], &[YR], &[XR, X2, V1, V2]).min(mi(p, &[X1, XR], &[Y], &[X2, V2])),
            mi(p, &[X2], &[YR], &[XR, X1, V1, V2]).min(mi(p, &[X2, XR], &[Y], &[X1, V1])),
            mi(p, &[X1, X2], &[YR], &[XR, V1, V2]).min(mi(p, &[X1, X2, XR], &[Y], &[])),
        ];
        worst = worst.max(cap_error(&theorem1_pentagon(&f).unwrap(), marc));
    }
    s.check(
        "6",
        "T1 with constant Z equals the relay-channel decode-forward caps (50 trials)",
        worst <= TOL,
        format!("max |diff| = {worst:.3e} bits (tol {TOL:e})"),
    );

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let main = kernel(&mut rng, "main", &[(Y, 3)], &INPUTS);
        // Yr = Y: spread each P(Y | x) slice onto the diagonal of (Y, Yr).
        let probs: Vec<f64> = main
            .probs()
            .chunks(3)
            .flat_map(|slice| {
                let mut out = vec![0.0; 9];
                for (y, &q) in slice.iter().enumerate() {
                    out[y * 3 + y] = q;
                }
                out
            })
            .collect();
        let vars = INPUTS.iter().chain(&[(Y, 3), (YR, 3)]).map(|&(n, k)| Variable::new(n, k)).collect();
        let main = Factor::new("main", vars, vec![X1.into(), X2.into(), XR.into()], probs).unwrap();
        let factors = vec![
            constant("v1", V1, 2, &[]),
            constant("v2", V2, 2, &[]),
            kernel(&mut rng, "x1", &[(X1, 2)], &[(V1, 2)]),
            kernel(&mut rng, "x2", &[(X2, 2)], &[(V2, 2)]),
            constant("xr", XR, 2, &[(V1, 2), (V2, 2)]),
            main,
            kernel(&mut rng, "wiretap", &[(Z, 2)], &[(Y, 3)]),
        ];
        let f = DmFactorization::new(Theorem::T1, factors, None).unwrap();
        let p = f.joint();
        let mac_wt = [
            mi(p, &[X1], &[Y], &[X2]) - mi(p, &[X1], &[Z], &[]),
            mi(p, &[X2], &[Y], &[X1]) - mi(p, &[X2], &[Z], &[]),
            mi(p, &[X1, X2], &[Y], &[]) - mi(p, &[X1, X2], &[Z], &[]),
        ];
        worst = worst.max(cap_error(&theorem1_pentagon(&f).unwrap(), mac_wt));
    }
    s.check(
        "6",
        "T1 with Yr = Y and a silent relay equals the wiretap MAC caps (50 trials)",
        worst <= TOL,
        format!("max |diff| = {worst:.3e} bits (tol {TOL:e})"),
    );
}

fn criterion_7(s: &mut Suite) {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut violations = [0usize; 4];
    for _ in 0..1000 {
        let sizes = [rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3)];
        let n = sizes.iter().product();
        let p = JointPmf::from_table(&[("A", sizes[0]), ("B", sizes[1]), ("C", sizes[2])], random_pmf(&mut rng, n)).unwrap();
        let chain = mi(&p, &["A"], &["B", "C"], &[]) - mi(&p, &["A"], &["B"], &[]) - mi(&p, &["A"], &["C"], &["B"]);
        violations[0] += usize::from(chain.abs() > TOL);
        let sym = mi(&p, &["A"], &["B"], &["C"]) - mi(&p, &["B"], &["A"], &["C"]);
        violations[1] += usize::from(sym.abs() > TOL);
        violations[2] += usize::from(mi(&p, &["A"], &["B"], &["C"]) < -TOL);

        // A -> B -> C built explicitly as p(a) p(b|a) p(c|b).
        let pa = random_pmf(&mut rng, sizes[0]);
        let pba: Vec<Vec<f64>> = (0..sizes[0]).map(|_| random_pmf(&mut rng, sizes[1])).collect();
        let pcb: Vec<Vec<f64>> = (0..sizes[1]).map(|_| random_pmf(&mut rng, sizes[2])).collect();
        let mut probs = Vec::with_capacity(n);
        for a in 0..sizes[0] {
            for b in 0..sizes[1] {
                for c in 0..sizes[2] {
                    probs.push(pa[a] * pba[a][b] * pcb[b][c]);
                }
            }
        }
        let m = JointPmf::from_table(&[("A", sizes[0]), ("B", sizes[1]), ("C", sizes[2])], probs).unwrap();
        violations[3] += usize::from(mi(&m, &["A"], &["C"], &[]) > mi(&m, &["A"], &["B"], &[]) + TOL);
    }
    for (name, v) in ["chain rule", "symmetry", "nonnegativity", "data processing"].iter().zip(violations) {
        s.check(
            "7",
            &format!("information measures: {name} over 1000 random distributions"),
            v == 0,
            format!("{v} violations (tol {TOL:e})"),
        );
    }

    // Pentagon inequalities against polygon membership on a 1e-3 grid.
    let (mut agree, mut total) = (0u64, 0u64);
    for _ in 0..20 {
        let a = rng.gen_range(0.0..1.0);
        let b = rng.gen_range(0.0..1.0);
        let c = rng.gen_range(0.0..(a + b) * 1.2);
        let pent = RatePentagon::new(a, b, c);
        let poly = pent.vertices();
        for i in 0..=1000 {
            for j in 0..=1000 {
                let pt = marcwt_core::Point::new(i as f64 * 1e-3, j as f64 * 1e-3);
                let inside_poly = !poly.is_empty() && poly.distance_to(pt) == 0.0;
                agree += u64::from(pent.admits(pt, 0.0) == inside_poly);
                total += 1;
            }
        }
    }
    let rate = agree as f64 / total as f64;
    s.check(
        "7",
        "geometry: pentagon inequalities agree with polygon membership on a 1e-3 grid",
        rate >= 0.9999,
        format!("{:.6}% of {total} points (threshold 99.99%)", 100.0 * rate),
    );

    const OUTER_TOL: f64 = 1e-9;
    let dirs = quadrant_directions(181);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let channel = vec![
            kernel(&mut rng, "main", &[(Y, 2), (YR, 2)], &INPUTS),
            kernel(&mut rng, "wiretap", &[(Z, 2)], &[(Y, 2)]),
        ];
        let inputs = t1_inputs(&mut rng);
        let mut factors = inputs.clone();
        factors.extend(channel.iter().cloned());
        let f = DmFactorization::new(Theorem::T1, factors, None).unwrap();
        let inner = theorem1_pentagon(&f).unwrap().vertices();
        let x = f.joint().marginalize(&[X1, X2, XR]).unwrap();
        let outer = theorem41_u_sweep(&x, &channel, MAX_U).unwrap();
        worst = worst.max(max_support_deficit(&outer, &inner, &dirs));
    }
    s.check(
        "7",
        "outer bound (|U| <= 4) contains the T1 pentagon on 50 random degraded channels",
        worst <= OUTER_TOL,
        format!("max support deficit {worst:.3e} bits (tol {OUTER_TOL:e})"),
    );
}

fn run_figure(id: u8, out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_marcwt"))
        .args(["figure", "--id", &id.to_string(), "--out", out.to_str().unwrap()])
        .output()
        .expect("marcwt runs")
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut n = 0;
    for entry in std::fs::read_dir(a).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let (x, y) = (std::fs::read(a.join(&name)), std::fs::read(b.join(&name)));
        match (x, y) {
            (Ok(x), Ok(y)) if x == y => n += 1,
            _ => return Err(format!("{name:?} differs")),
        }
    }
    Ok(n)
}

fn criterion_8(s: &mut Suite) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ok = run_figure(2, a.path()).status.success() && run_figure(2, b.path()).status.success();
    let outcome = if ok { same_tree(a.path(), b.path()) } else { Err("marcwt figure failed".into()) };
    s.check(
        "8",
        "`marcwt figure --id 2` twice gives byte-identical files",
        matches!(outcome, Ok(n) if n >= 11),
        match outcome {
            Ok(n) => format!("{n} files identical"),
            Err(e) => e,
        },
    );
    for p in Preset::ALL {
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let run: Result<FigureRun, _> = cmd_figure(p.id(), dir.path());
        let elapsed = start.elapsed();
        let complete = run.map(|r| r.outputs.len() == Strategy::EACH.len()).unwrap_or(false);
        s.check(
            "8",
            &format!("figure {} preset completes", p.id()),
            complete && elapsed < Duration::from_secs(10),
            format!("{:.3} s (limit 10 s)", elapsed.as_secs_f64()),
        );
    }
}

fn main() -> ExitCode {
    let mut suite = Suite { failed: 0, total: 0 };
    criterion_1(&mut suite);
    criterion_2(&mut suite);
    criterion_3(&mut suite);
    criterion_4(&mut suite);
    criterion_5(&mut suite);
    criterion_6(&mut suite);
    criterion_7(&mut suite);
    criterion_8(&mut suite);
    println!("acceptance: {} of {} checks passed", suite.total - suite.failed, suite.total);
    if suite.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
