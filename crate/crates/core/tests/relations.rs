mod common;

use gklo_core::gklo::{GkloFamily, Perturbation};
use gklo_core::verify::{self, CheckKind, RelationCheck, Status, Suite, VerifyOptions};

fn run(fam: &GkloFamily, kind: CheckKind) -> RelationCheck {
    verify::run(fam, kind, &VerifyOptions::default())
}

fn assert_pass(fam: &GkloFamily, kind: CheckKind) {
    let c = run(fam, kind);
    assert_eq!(c.status, Status::Pass, "{} note={:?}", c.label(), c.note);
    assert!(c.residual.is_none());
}

fn assert_skipped(fam: &GkloFamily, kind: CheckKind, reason: &str) {
    match run(fam, kind).status {
        Status::Skipped(why) => assert!(why.contains(reason), "{why}"),
        other => panic!("{kind:?}: expected a skip, got {other:?}"),
    }
}

#[test]
fn hh_on_the_smallest_quiver() {
    let fam = common::family(1, &[1, 1], &[1, 1]);
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        assert_pass(&fam, CheckKind::Hh { i, j });
    }
    assert_pass(&fam, CheckKind::HhModes { i: 1 });
}

#[test]
fn hb_examples() {
    let fam = common::family(1, &[1, 1], &[1, 1]);
    assert_pass(&fam, CheckKind::Hb { i: 1, j: 2 });
    assert_pass(&fam, CheckKind::Hb { i: 2, j: 1 });
    let fam = common::family(2, &[1, 2, 2, 1], &[1, 0, 0, 1]);
    assert_eq!(fam.quiver().cartan(2, 3), -1);
    assert_pass(&fam, CheckKind::Hb { i: 2, j: 3 });
    assert_pass(&fam, CheckKind::HbModes { i: 2, j: 3 });
    let empty = common::family(2, &[0, 1, 1, 0], &[1, 0, 0, 1]);
    assert_pass(&empty, CheckKind::Hb { i: 2, j: 1 });
}

#[test]
fn bb_examples() {
    let fam = common::family(1, &[1, 1], &[1, 1]);
    assert_pass(&fam, CheckKind::Bb { i: 1, j: 2 });
    assert_pass(&fam, CheckKind::Bb { i: 1, j: 1 });
    let fam = common::family(2, &[2, 1, 1, 2], &[0, 1, 1, 0]);
    assert_pass(&fam, CheckKind::Bb { i: 2, j: 2 });
    assert_pass(&fam, CheckKind::Bb { i: 1, j: 3 });
    assert_pass(&fam, CheckKind::Bb { i: 1, j: 4 });
    assert_pass(&fam, CheckKind::BbModes { i: 2, j: 3 });
}

#[test]
fn commuting_serre_examples() {
    let fam = common::family(2, &[1, 1, 1, 1], &[1, 0, 0, 1]);
    assert_pass(&fam, CheckKind::CommSerre { i: 1, j: 3 });
    assert_pass(&fam, CheckKind::CommSerre { i: 1, j: 4 });
    assert_pass(&fam, CheckKind::CommSerreModes { i: 1, j: 4 });
    let small = common::family(1, &[1, 1], &[1, 1]);
    assert_skipped(&small, CheckKind::CommSerre { i: 1, j: 2 }, "WrongCartanCase");
}

#[test]
fn usual_serre_examples() {
    let fam = common::family(2, &[1, 1, 1, 1], &[1, 0, 0, 1]);
    assert_pass(&fam, CheckKind::UsualSerre { i: 1, j: 2 });
    assert_pass(&fam, CheckKind::UsualSerre { i: 2, j: 1 });
    assert_skipped(&fam, CheckKind::UsualSerre { i: 1, j: 3 }, "WrongCartanCase");
    // c_{2,3} = -1 but 3 = tau 2
    assert_skipped(&fam, CheckKind::UsualSerre { i: 2, j: 3 }, "");
}

#[test]
fn iserre_examples() {
    let fam = common::family(1, &[1, 1], &[1, 1]);
    assert_pass(&fam, CheckKind::IserreZero { i: 1 });
    assert_pass(&fam, CheckKind::IserreModes { i: 1 });
    let fam = common::family(2, &[1, 2, 2, 1], &[0, 1, 0, 0]);
    assert_pass(&fam, CheckKind::IserreZero { i: 2 });
    assert_skipped(&fam, CheckKind::IserreZero { i: 1 }, "WrongCartanCase");
}

#[test]
fn lemma_suite_on_aiii_two() {
    let fam = common::family(2, &[1, 2, 2, 1], &[1, 0, 1, 0]);
    let opts = VerifyOptions::default();
    let kinds = verify::plan(&fam, &[Suite::Lemmas], &opts);
    let results = verify::run_all(&fam, &kinds, &opts, false);
    let s = verify::summarize(&results);
    assert!(s.passed > 0);
    assert_eq!(s.failed, 0, "{:?}", results.iter().filter(|c| c.failed()).map(|c| c.label()).collect::<Vec<_>>());
    for name in ["c-conjugation", "d-conjugation", "h-residue-lower", "h-residue-upper", "h-special", "y-serre-repeated"] {
        assert!(results.iter().any(|c| c.name == name && c.passed()), "{name}");
    }
}

#[test]
fn perturbations_break_some_relation() {
    let opts = VerifyOptions::default();
    for p in Perturbation::ALL {
        let fam = GkloFamily::with_perturbation(common::framed(1, &[1, 1], &[1, 1]), p).unwrap();
        let kinds = verify::plan(&fam, &[Suite::Hh, Suite::Hb, Suite::Bb, Suite::Iserre, Suite::Lemmas], &opts);
        let results = verify::run_all(&fam, &kinds, &opts, true);
        let failed = results.last().filter(|c| c.failed());
        assert!(failed.is_some(), "{} was not detected", p.name());
        let c = failed.unwrap();
        assert!(c.residual.is_some() || c.note.is_some(), "{}", c.label());
    }
}

#[test]
fn pass_means_zero_residual() {
    let fam = common::family(1, &[2, 2], &[1, 0]);
    let opts = VerifyOptions { max_mode: 2, seed: Some(7) };
    let kinds = verify::plan(&fam, &[Suite::Hb, Suite::Serre0, Suite::Serre1], &opts);
    for c in verify::run_all(&fam, &kinds, &opts, false) {
        assert_eq!(c.passed(), c.residual.is_none() && !matches!(c.status, Status::Skipped(_)), "{}", c.label());
        assert!(!c.failed(), "{}", c.label());
    }
}
