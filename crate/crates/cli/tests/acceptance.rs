//! One line per acceptance criterion, written straight to stderr so that it
//! shows up even when the harness captures test output.

use std::io::Write;
use std::time::{Duration, Instant};

use gklo_cli::report::{OptionsInfo, ReportDocument};
use gklo_cli::runner::{self, RunConfig};
use gklo_cli::spec_file::{self, QuiverSpec};
use gklo_core::gklo::{GkloFamily, Perturbation};
use gklo_core::monopole::{self, Coweight, Dressing, PINNED_CONVENTION};
use gklo_core::quiver::{DimensionData, FramedQuiver, QuiverWithInvolution};
use gklo_core::series::laurent_coeff;
use gklo_core::symbolic::{rf_equal, LinearForm, RationalFunction, Variable};
use gklo_core::verify::{self, RelationCheck, Status, Suite, VerifyOptions};

fn line(n: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "acceptance criterion {n}: {verdict}  {detail}").unwrap();
}

fn spec(n: u32, v: &[u32], w: &[u32]) -> QuiverSpec {
    let quiver = QuiverWithInvolution::aiii(n).unwrap();
    let dims = DimensionData::from_lists(&quiver.vertices, v, w);
    QuiverSpec { quiver, dims }
}

fn family(s: &QuiverSpec) -> GkloFamily {
    GkloFamily::new(FramedQuiver::new(s.quiver.clone(), s.dims.clone()).unwrap()).unwrap()
}

fn criterion1_configs() -> Vec<QuiverSpec> {
    let mut out = Vec::new();
    for v in 1..=3 {
        for w in [[0, 0], [1, 1], [2, 1]] {
            out.push(spec(1, &[v, v], &w));
        }
    }
    out
}

/// Every tau-symmetric `v <= (2,2,2,2)` with every `w <= (1,1,1,1)`.
fn criterion2_configs() -> Vec<QuiverSpec> {
    let mut out = Vec::new();
    for a in 0..=2 {
        for b in 0..=2 {
            for mask in 0u32..16 {
                let w: Vec<u32> = (0..4).map(|k| (mask >> k) & 1).collect();
                out.push(spec(2, &[a, b, b, a], &w));
            }
        }
    }
    out
}

fn describe(s: &QuiverSpec) -> String {
    let q = &s.quiver;
    let v: Vec<String> = q.vertices.iter().map(|i| s.dims.v[i].to_string()).collect();
    let w: Vec<String> = q.vertices.iter().map(|i| s.dims.w[i].to_string()).collect();
    format!("v=({}) w=({})", v.join(","), w.join(","))
}

fn bad(checks: &[RelationCheck]) -> Vec<String> {
    checks.iter().filter(|c| c.status != Status::Pass && !matches!(c.status, Status::Skipped(_))).map(|c| c.label()).collect()
}

fn run_suites(s: &QuiverSpec, suites: &[Suite], parallel: usize) -> (GkloFamily, Vec<RelationCheck>) {
    let cfg = RunConfig { suites: suites.to_vec(), parallel, ..RunConfig::default() };
    let fam = runner::family(s, &cfg).unwrap();
    let kinds = verify::plan(&fam, &cfg.suites, &cfg.options);
    let checks = runner::run_checks(&fam, &kinds, &cfg).unwrap();
    (fam, checks)
}

fn json(s: &QuiverSpec, fam: &GkloFamily, suites: &[Suite], checks: &[RelationCheck]) -> String {
    let text = spec_file::render(s);
    let opts = OptionsInfo::new(suites, VerifyOptions::default().max_mode, None, false, None);
    ReportDocument::new(text.as_bytes(), fam.quiver(), opts, checks, false).to_json()
}

const CRITERION1_SUITES: [Suite; 6] = [Suite::Hh, Suite::Hb, Suite::Bb, Suite::Serre0, Suite::Iserre, Suite::Lemmas];

#[test]
fn criterion_1_and_8_aiii1_full_suite_and_determinism() {
    let mut failures = Vec::new();
    let mut slowest = (Duration::ZERO, String::new());
    let mut total = 0;
    let mut nondeterministic = Vec::new();
    for s in criterion1_configs() {
        let start = Instant::now();
        let (fam, checks) = run_suites(&s, &CRITERION1_SUITES, 1);
        let took = start.elapsed();
        total += checks.len();
        if took > slowest.0 {
            slowest = (took, describe(&s));
        }
        failures.extend(bad(&checks).into_iter().map(|l| format!("{} {l}", describe(&s))));
        if took >= Duration::from_secs(60) {
            failures.push(format!("{} took {:.1}s", describe(&s), took.as_secs_f64()));
        }
        // determinism: a second run, on several workers, must give the same bytes
        let first = json(&s, &fam, &CRITERION1_SUITES, &checks);
        let (fam2, checks2) = run_suites(&s, &CRITERION1_SUITES, 4);
        if json(&s, &fam2, &CRITERION1_SUITES, &checks2) != first {
            nondeterministic.push(describe(&s));
        }
    }
    let ok1 = failures.is_empty();
    line(
        1,
        ok1,
        &format!("9 configurations, {total} checks, slowest {} at {:.1}s; failures: {:?}", slowest.1, slowest.0.as_secs_f64(), failures),
    );
    let ok8 = nondeterministic.is_empty();
    line(8, ok8, &format!("JSON identical for --parallel 1 and 4 on 9 configurations; differing: {nondeterministic:?}"));
    assert!(ok1 && ok8);
}

#[test]
fn criterion_2_aiii2_full_grid() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut total = 0;
    let configs = criterion2_configs();
    for s in &configs {
        let (_, checks) = run_suites(s, &Suite::ALL, 1);
        total += checks.len();
        failures.extend(bad(&checks).into_iter().map(|l| format!("{} {l}", describe(s))));
    }
    let took = start.elapsed();
    let ok = failures.is_empty() && took < Duration::from_secs(600);
    line(
        2,
        ok,
        &format!("{} configurations, {total} checks in {:.1}s; failures: {:?}", configs.len(), took.as_secs_f64(), failures),
    );
    assert!(ok);
}

#[test]
fn criterion_3_lemma_suite_on_both_quivers() {
    let configs = [
        spec(1, &[3, 3], &[1, 1]),
        spec(1, &[2, 2], &[2, 1]),
        spec(2, &[2, 2, 2, 2], &[1, 1, 1, 1]),
        spec(2, &[1, 3, 3, 1], &[1, 0, 1, 0]),
    ];
    let mut failures = Vec::new();
    let mut by_name = std::collections::BTreeMap::<String, usize>::new();
    for s in &configs {
        let (_, checks) = run_suites(s, &[Suite::Lemmas], 1);
        failures.extend(bad(&checks).into_iter().map(|l| format!("{} {l}", describe(s))));
        for c in checks.iter().filter(|c| c.passed()) {
            *by_name.entry(c.name.clone()).or_default() += 1;
        }
    }
    let required = [
        "c-conjugation",
        "c-table",
        "d-conjugation",
        "d-table",
        "h-residue-lower",
        "h-residue-upper",
        "h-truncation",
        "h-special",
        "y-serre-distinct",
        "y-serre-repeated",
    ];
    let missing: Vec<&str> = required.iter().copied().filter(|n| !by_name.contains_key(*n)).collect();
    let ok = failures.is_empty() && missing.is_empty();
    line(3, ok, &format!("passed per lemma {by_name:?}; failures: {failures:?}; never exercised: {missing:?}"));
    assert!(ok);
}

/// Exchanges two variables through a scratch variable.
fn swap(f: &RationalFunction, a: Variable, b: Variable) -> RationalFunction {
    let tmp = Variable::X { vertex: u32::MAX, slot: 1 };
    let f = f.substitute_var(a, &LinearForm::var(tmp)).unwrap();
    let f = f.substitute_var(b, &LinearForm::var(a)).unwrap();
    f.substitute_var(tmp, &LinearForm::var(b)).unwrap()
}

/// Variables that must be interchangeable in every mode of `H`: the slots
/// of each positive vertex and the framing slots of each vertex.
fn permutation_blocks(fq: &FramedQuiver) -> Vec<Vec<Variable>> {
    let mut out = Vec::new();
    for i in fq.positive_vertices() {
        out.push((1..=fq.v(i)).map(|slot| Variable::X { vertex: i, slot }).collect());
    }
    for &i in fq.vertices() {
        out.push((1..=fq.w(i)).map(|slot| Variable::W { vertex: i, slot }).collect());
    }
    out
}

#[test]
fn criterion_4_h_degree_and_boundary() {
    let mut configs = criterion1_configs();
    configs.extend(criterion2_configs());
    let mut failures = Vec::new();
    let mut modes = 0;
    for s in &configs {
        let fam = family(s);
        let fq = fam.quiver();
        let blocks = permutation_blocks(fq);
        for &i in fq.vertices() {
            let h = fam.h(i).unwrap();
            let mu = fq.mu_pairing(i).unwrap();
            let lowest = -mu - 1;
            // H_{i,r} is the coefficient of u^{-r-1}; r < lowest means a power above mu
            for r in lowest - 3..lowest {
                if !laurent_coeff(h, Variable::U, -r - 1).is_zero() {
                    failures.push(format!("{} H[{i},{r}] nonzero below the boundary", describe(s)));
                }
            }
            let zeta = RationalFunction::constant(fq.zeta(i).unwrap().value());
            if !fam.h_mode(i, lowest).unwrap().equals(&zeta) {
                failures.push(format!("{} H[{i},{lowest}] is not hbar*zeta", describe(s)));
            }
            for r in lowest..=(mu + 5).max(lowest + 5) {
                let c = laurent_coeff(h, Variable::U, -r - 1);
                modes += 1;
                if c.has_denominator() {
                    failures.push(format!("{} H[{i},{r}] is not a polynomial", describe(s)));
                    continue;
                }
                for block in &blocks {
                    for pair in block.windows(2) {
                        if !rf_equal(&swap(&c, pair[0], pair[1]), &c) {
                            failures.push(format!("{} H[{i},{r}] not symmetric in {:?}", describe(s), pair));
                        }
                    }
                }
            }
        }
    }
    let ok = failures.is_empty();
    line(4, ok, &format!("{} configurations, {modes} modes checked; failures: {failures:?}", configs.len()));
    assert!(ok);
}

#[test]
fn criterion_5_monopole_reproduces_b_modes() {
    let mut configs = criterion1_configs();
    configs.extend(criterion2_configs());
    let mut failures = Vec::new();
    let mut compared = 0;
    for s in &configs {
        let fam = family(s);
        for &i in fam.quiver().vertices() {
            for m in 0..=3 {
                compared += 1;
                let predicted = monopole::monopole_b_mode(&fam, i, m).unwrap();
                if !predicted.equals(&fam.b_mode(i, m).unwrap()) {
                    failures.push(format!("{} i={i} m={m}", describe(s)));
                }
            }
        }
    }
    let ok = failures.is_empty();
    line(5, ok, &format!("{compared} (vertex, mode) pairs over {} configurations; failures: {failures:?}", configs.len()));
    assert!(ok);
}

#[test]
fn criterion_6_euler_oracle() {
    let pin_instance = spec(1, &[2, 2], &[1, 1]);
    let pinned = monopole::pin(&family(&pin_instance));
    let mut failures = Vec::new();
    let mut compared = 0;
    if pinned != Ok(PINNED_CONVENTION) {
        failures.push(format!("pinning gave {pinned:?}"));
    }
    let mut configs: Vec<QuiverSpec> = criterion1_configs().into_iter().filter(|s| s.dims != pin_instance.dims).collect();
    configs.extend(criterion2_configs());
    let dressings: Vec<Dressing> =
        (0..=2).flat_map(|m| [Dressing::plus_mode(m), Dressing::minus_mode(m)]).collect();
    for s in &configs {
        let fam = family(s);
        for i in fam.quiver().positive_vertices() {
            for cw in [Coweight::Plus(i), Coweight::Minus(i)] {
                for f in &dressings {
                    compared += 1;
                    let oracle = monopole::euler_oracle(&fam, cw, f, PINNED_CONVENTION).unwrap();
                    if !oracle.equals(&monopole::closed_form(&fam, cw, f).unwrap()) {
                        failures.push(format!("{} {cw:?}", describe(s)));
                    }
                }
            }
        }
    }
    let ok = failures.is_empty();
    line(
        6,
        ok,
        &format!("pinned on AIII n=1 v=(2,2) w=(1,1) (excluded); {compared} comparisons over {} configurations; failures: {failures:?}", configs.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_7_negative_controls() {
    let s = spec(1, &[1, 1], &[1, 1]);
    let mut undetected = Vec::new();
    let mut detail = Vec::new();
    for p in Perturbation::ALL {
        let cfg = RunConfig { perturbation: Some(p), ..RunConfig::default() };
        let fam = runner::family(&s, &cfg).unwrap();
        let kinds = verify::plan(&fam, &Suite::ALL, &cfg.options);
        let checks = runner::run_checks(&fam, &kinds, &cfg).unwrap();
        let failed: Vec<String> = checks.iter().filter(|c| c.failed()).map(|c| c.label()).collect();
        detail.push(format!("{}: {} failing, first {:?}", p.name(), failed.len(), failed.first()));
        if failed.is_empty() {
            undetected.push(p.name());
        }
    }
    let ok = undetected.is_empty();
    line(7, ok, &format!("{}; undetected: {undetected:?}", detail.join("; ")));
    assert!(ok);
}
