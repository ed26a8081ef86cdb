use fermigauss::cp::check_generator_cp;
use fermigauss_web::api::{self, InitialState, SingleMode};
use proptest::prelude::*;
use serde_json::Value;

fn parse(r: Result<String, String>) -> Value {
    serde_json::from_str(&r.expect("operation succeeds")).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn mode(a_na: f64, a_x: f64, a_z: f64, a_op: f64, c: f64) -> SingleMode {
    SingleMode { a_na, a_x, a_z, a_op, c }
}

#[test]
fn single_mode_purifying_threshold() {
    // CP iff 2r ≥ |c|; ν(∞) = c/2r.
    let v = parse(api::explore_single_mode(&mode(0.5, 0.0, 0.0, 0.3, 0.8), 1.0, 11));
    assert_eq!(v["is_cp"], true);
    assert!((v["steady_nu"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    let mut rates: Vec<f64> = v["channels"].as_array().unwrap().iter().map(|c| c["rate"].as_f64().unwrap()).collect();
    rates.sort_by(f64::total_cmp);
    assert!((rates[0] - 0.2).abs() < 1e-12 && (rates[1] - 1.8).abs() < 1e-12, "{rates:?}");

    let v = parse(api::explore_single_mode(&mode(0.5, 0.0, 0.0, 0.0, 1.2), 1.0, 11));
    assert_eq!(v["is_cp"], false);
    assert!((v["noise_deficit"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!(v["channels"].as_array().unwrap().is_empty());
}

#[test]
fn single_mode_region_matches_generic_check() {
    let (a_na, a_z, extent, grid) = (0.7, 0.2, 1.5, 7);
    let v = parse(api::explore_single_mode(&mode(a_na, 0.0, a_z, 0.0, 0.0), extent, grid));
    let region = floats(&v["region"]["min_eig"]);
    assert_eq!(region.len(), grid * grid);
    let step = 2.0 * extent / (grid - 1) as f64;
    for row in 0..grid {
        for col in 0..grid {
            let m = mode(a_na, -extent + col as f64 * step, a_z, 0.0, -extent + row as f64 * step);
            let want = check_generator_cp(&m.generator()).min_eigenvalue;
            assert!((region[row * grid + col] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn single_mode_without_damping_has_no_fixed_point() {
    let v = parse(api::explore_single_mode(&mode(0.0, 0.0, 0.0, 1.0, 0.0), 1.0, 3));
    assert!(v["steady_nu"].is_null());
    assert_eq!(v["classes"], serde_json::json!(["Free Evolution"]));
}

#[test]
fn noise_trajectory_decays_mode_one() {
    let p = api::params(1.0, 0.5, 0.5);
    let init = InitialState { nu1: 0.6, nu2: -0.4, mix: 0.0 };
    let v = parse(api::catalog_trajectory("noise", &p, &init, 2.0, 21));
    let t = floats(&v["times"]);
    let nu1 = floats(&v["series"][0]["values"]);
    let nu2 = floats(&v["series"][1]["values"]);
    for k in 0..t.len() {
        assert!((nu1[k] - 0.6 * (-2.0 * t[k]).exp()).abs() < 1e-12);
        assert!((nu2[k] + 0.4).abs() < 1e-12);
    }
    assert_eq!(v["closed_form"], true);
}

#[test]
fn correlating_trajectory_limit() {
    let p = api::params(1.0, 0.5, 0.5);
    let init = InitialState { nu1: 0.3, nu2: 0.1, mix: 0.4 };
    let v = parse(api::catalog_trajectory("correlating", &p, &init, 40.0, 3));
    let series = v["series"].as_array().unwrap();
    for (k, s) in series.iter().enumerate() {
        let last = *floats(&s["values"]).last().unwrap();
        let want = if k < 2 { 0.0 } else { 0.25 };
        assert!((last - want).abs() < 1e-12, "{}", s["label"]);
    }
}

#[test]
fn excitation_follows_nu() {
    let p = api::params(1.0, 0.5, 0.5);
    let init = InitialState { nu1: 0.9, nu2: -0.2, mix: 0.7 };
    for key in ["purifying", "active-shielding", "rotation"] {
        let v = parse(api::catalog_trajectory(key, &p, &init, 3.0, 31));
        let nu1 = floats(&v["series"][0]["values"]);
        let nu2 = floats(&v["series"][1]["values"]);
        let n = floats(&v["excitation"]);
        for k in 0..n.len() {
            assert!((n[k] - (2.0 - nu1[k] - nu2[k]) / 2.0).abs() < 1e-12, "{key}");
        }
    }
}

#[test]
fn shielding_at_threshold_conserves() {
    let p = api::params(1.0, 1.0, 0.5);
    let init = InitialState { nu1: 0.5, nu2: 0.2, mix: 0.6 };
    let v = parse(api::catalog_trajectory("passive-shielding", &p, &init, 10.0, 11));
    let conserved = v["conserved"].as_array().unwrap();
    assert!(!conserved.is_empty());
    for s in conserved {
        let vals = floats(&s["values"]);
        assert!(vals.iter().all(|x| (x - vals[0]).abs() < 1e-10), "{}", s["label"]);
    }
}

#[test]
fn sweep_matches_closed_form_rates() {
    let p = api::params(1.0, 0.5, 0.5);
    let v = parse(api::rate_sweep("active-shielding", &p, "b", 0.0, 2.0, 9));
    let predicted = v["predicted"].as_array().unwrap();
    for (k, eigs) in v["eigenvalues"].as_array().unwrap().iter().enumerate() {
        let mut re: Vec<f64> = eigs.as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
        let mut want = floats(&predicted[k]);
        re.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in re.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "step {k}: {re:?} vs {want:?}");
        }
    }

    let v = parse(api::rate_sweep("rotation", &p, "b", 0.0, 1.0, 3));
    assert!(v["predicted"].is_null());
    // Purely oscillatory: real parts vanish, |imaginary parts| are 0 or 2b.
    for z in v["eigenvalues"][2].as_array().unwrap() {
        assert!(z[0].as_f64().unwrap().abs() < 1e-12);
        let im = z[1].as_f64().unwrap().abs();
        assert!(im < 1e-12 || (im - 2.0).abs() < 1e-12, "{im}");
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let p = api::params(1.0, 0.5, 0.5);
    let init = InitialState { nu1: 0.0, nu2: 0.0, mix: 0.0 };
    assert!(api::catalog_trajectory("nope", &p, &init, 1.0, 5).is_err());
    assert!(api::catalog_trajectory("noise", &p, &init, 0.0, 5).is_err());
    assert!(api::catalog_trajectory("noise", &p, &init, 1.0, 1).is_err());
    assert!(api::catalog_trajectory("noise", &api::params(f64::NAN, 0.5, 0.5), &init, 1.0, 5).is_err());
    let bad = InitialState { nu1: 1.5, nu2: 0.0, mix: 0.0 };
    assert!(api::catalog_trajectory("noise", &p, &bad, 1.0, 5).is_err());
    assert!(api::rate_sweep("noise", &p, "e1", 0.0, 1.0, 5).is_err());
    assert!(api::rate_sweep("noise", &p, "r", 0.0, f64::INFINITY, 5).is_err());
    assert!(api::explore_single_mode(&mode(0.5, 0.0, 0.0, 0.0, 0.0), -1.0, 5).is_err());
    assert!(api::explore_single_mode(&mode(0.5, 0.0, 0.0, 0.0, 0.0), 1.0, 1).is_err());
}

#[test]
fn scenario_list() {
    let v: Value = serde_json::from_str(&api::scenarios()).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 10);
    assert!(list.iter().any(|s| s["key"] == "shielding-x"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cp_trajectories_stay_physical(
        idx in 0usize..10,
        r in 0.1f64..2.0,
        b_frac in -1.0f64..1.0,
        c_frac in -1.0f64..1.0,
        nu1 in -1.0f64..1.0,
        nu2 in -1.0f64..1.0,
        mix in -3.0f64..3.0,
    ) {
        // |b| ≤ r and |c| ≤ r keep every scenario completely positive.
        let key = fermigauss::two_mode::Scenario::ALL[idx].key();
        let p = api::params(r, b_frac * r, c_frac * r);
        let v = parse(api::catalog_trajectory(key, &p, &InitialState { nu1, nu2, mix }, 5.0, 11));
        prop_assert_eq!(&v["is_cp"], &Value::Bool(true));
        prop_assert!(v["max_violation"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn single_mode_verdict_matches_region_formula(
        a_na in -1.0f64..2.0,
        a_x in -1.0f64..1.0,
        a_z in -1.0f64..1.0,
        a_op in -1.0f64..1.0,
        c in -2.0f64..2.0,
    ) {
        let v = parse(api::explore_single_mode(&mode(a_na, a_x, a_z, a_op, c), 1.0, 2));
        let root = (4.0 * a_x * a_x + 4.0 * a_z * a_z + c * c).sqrt();
        prop_assert!((v["min_eig"].as_f64().unwrap() - (2.0 * a_na - root)).abs() < 1e-12);
        prop_assert_eq!(v["is_cp"].as_bool().unwrap(), 2.0 * a_na - root >= -1e-10);
    }
}
