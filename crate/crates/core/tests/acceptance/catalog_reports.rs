use hec_core::catalog::{find, verify_case, StepStatus, VerifyConfig};

fn quick() -> VerifyConfig {
    VerifyConfig { family_members: 3, samples: 60, search_starts: 4, ..VerifyConfig::default() }
}

#[test]
fn explicit_formula_rows_match() {
    for name in ["Sl2R", "Sl2C/U1", "SU21/SU2"] {
        let rep = verify_case(name, &[], &quick()).unwrap();
        assert_eq!(rep.status, StepStatus::Match, "{name}: {}", rep.to_markdown());
        assert!(rep.steps.iter().all(|s| s.status == StepStatus::Match));
    }
}

#[test]
fn family_member_matches() {
    let rep = verify_case("Sl2RxSl2R/Dpq", &[1, 2], &quick()).unwrap();
    assert_eq!(rep.status, StepStatus::Match);
    assert_eq!(rep.params, vec![1, 2]);
}

#[test]
fn cited_and_metadata_rows_are_not_checked() {
    assert_eq!(verify_case("SO41/SO3", &[], &quick()).unwrap().status, StepStatus::Cited);
    let meta = verify_case("G2/SU3", &[], &quick()).unwrap();
    assert_eq!(meta.status, StepStatus::Metadata);
    assert!(meta.steps.is_empty() || meta.steps.iter().all(|s| s.status == StepStatus::Metadata));
}

#[test]
fn open_lie_groups_stay_open() {
    let rep = verify_case("Sl2C", &[], &quick()).unwrap();
    assert_eq!(rep.status, StepStatus::Open);
}

#[test]
fn su21_diagonal_sign_step_fails_but_search_agrees() {
    let rep = verify_case("SU21/Dpq", &[0, 1], &quick()).unwrap();
    assert_eq!(rep.status, StepStatus::Mismatch);
    let sign = rep.steps.iter().find(|s| s.step == "ricci_sign").unwrap();
    assert_eq!(sign.status, StepStatus::Mismatch);
    let search = rep.steps.iter().find(|s| s.step == "einstein_search").unwrap();
    assert_eq!(search.status, StepStatus::Match);
}

#[test]
fn reports_serialize_with_case_fields() {
    let rep = verify_case("Sl2C/U1", &[], &quick()).unwrap();
    let v = rep.to_json();
    assert_eq!(v["case"], "Sl2C/U1");
    assert_eq!(v["status"], "match");
    assert!(v["steps"].as_array().unwrap().iter().any(|s| s["operation"] == "sl2c-u1-offdiag-entry"));
    assert!(find("Sl2C/U1").unwrap().verdicts.len() == 1);
}
