use proptest::prelude::*;
use rbfode::bench::{
    problem, read_convergence_csv, read_stability_csv, run_convergence, run_sweep,
    write_convergence_csv, write_convergence_json, write_stability_csv, ConvergenceRow,
    CONVERGENCE_HEADER, PROBLEM_IDS,
};
use rbfode::stability::{PolyMode, RegionScan, Window};
use rbfode::{MethodId, SolveOptions};

fn row() -> impl Strategy<Value = ConvergenceRow> {
    (
        0..MethodId::ALL.len(),
        prop::sample::select(PROBLEM_IDS.to_vec()),
        1usize..100_000,
        prop_oneof![
            (-300.0f64..1.0).prop_map(|e| 10f64.powf(e)),
            Just(0.0),
            Just(f64::NAN)
        ],
        prop_oneof![
            Just(None),
            Just(Some(f64::NAN)),
            (-10.0f64..10.0).prop_map(Some)
        ],
        any::<u32>(),
        0usize..10_000,
    )
        .prop_map(|(m, p, n, e, o, fe, fb)| ConvergenceRow {
            method: MethodId::ALL[m],
            problem: p.to_string(),
            n,
            global_error: e,
            observed_order: o,
            fe_count: fe as u64,
            fallback_count: fb,
            failure: None,
        })
}

fn to_csv(rows: &[ConvergenceRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_convergence_csv(rows, &mut buf).unwrap();
    buf
}

fn same_float(a: f64, b: f64, rel: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn convergence_csv_round_trip(rows in prop::collection::vec(row(), 1..20)) {
        let bytes = to_csv(&rows);
        let back = read_convergence_csv(&bytes[..]).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(a.method, b.method);
            prop_assert_eq!(&a.problem, &b.problem);
            prop_assert_eq!(a.n, b.n);
            // 15 significant digits: half an ulp of the 15th digit
            prop_assert!(same_float(a.global_error, b.global_error, 5e-15), "{} vs {}", a.global_error, b.global_error);
            match (a.observed_order, b.observed_order) {
                (None, None) => {}
                (Some(x), Some(y)) => prop_assert!(same_float(x, y, 0.0)),
                other => prop_assert!(false, "order mismatch {:?}", other),
            }
            prop_assert_eq!(a.fe_count, b.fe_count);
            prop_assert_eq!(a.fallback_count, b.fallback_count);
        }
        // a second pass is byte-identical
        prop_assert_eq!(to_csv(&back), bytes);
    }
}

#[test]
fn header_and_empty_order_field() {
    let p = problem("ex1").unwrap();
    let rows = run_convergence(
        &p,
        MethodId::AB2,
        &[10, 20, 40, 80, 160, 320],
        &SolveOptions::default(),
    )
    .unwrap();
    let text = String::from_utf8(to_csv(&rows)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CONVERGENCE_HEADER.join(","));
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[1], "AB2,ex1,10,3.03421329305187e-03,,11,0");
    let last: Vec<&str> = lines[6].split(',').collect();
    assert_eq!(last[2], "320");
    let order: f64 = last[4].parse().unwrap();
    assert!((order - 1.9991).abs() < 1e-4);
}

#[test]
fn sweeps_are_deterministic() {
    let p = problem("ex2").unwrap();
    let methods = [MethodId::IMQ_AB3, MethodId::IQ_AM2, MethodId::RK3];
    let a = to_csv(&run_sweep(&p, &methods, &[10, 20, 40], &SolveOptions::default()).unwrap());
    let b = to_csv(&run_sweep(&p, &methods, &[10, 20, 40], &SolveOptions::default()).unwrap());
    assert_eq!(a, b);
}

#[test]
fn json_mirrors_csv_fields() {
    let p = problem("ex4").unwrap();
    let rows = run_convergence(&p, MethodId::IQ_AB2, &[10, 20], &SolveOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_convergence_json(&rows, &mut buf).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    let obj = v[0].as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let mut want = CONVERGENCE_HEADER.to_vec();
    keys.sort_unstable();
    want.sort_unstable();
    assert_eq!(keys, want);
    assert!(v[0]["observed_order"].is_null());
    assert_eq!(v[1]["method"], "IQ_AB2");
    let back: Vec<ConvergenceRow> = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn registry_exact_solutions_satisfy_their_equations() {
    for id in PROBLEM_IDS {
        let p = problem(id).unwrap();
        let (a, b) = (p.t_start(), p.t_end());
        for k in 1..=100 {
            let t = a + (b - a) * k as f64 / 101.0;
            let d = 1e-6;
            let u = |t| p.exact(t).unwrap();
            let deriv = (u(t + d) - u(t - d)) / (2.0 * d);
            let resid = (deriv - p.rhs(t, u(t))).abs();
            assert!(resid <= 1e-8, "{id} at t = {t}: {resid:e}");
        }
    }
}

fn tiny_scan(mask: Vec<bool>) -> RegionScan {
    RegionScan {
        method: MethodId::AB2,
        mode: PolyMode::Derived,
        window: Window::default(),
        resolution: 2,
        mask,
        failures: 0,
    }
}

#[test]
fn stability_csv_layout() {
    let scan = tiny_scan(vec![true, false, false, true]);
    let mut buf = Vec::new();
    write_stability_csv(&scan, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text, "re,im,stable\n-2,-1,1\n0,-1,0\n-2,1,0\n0,1,1\n");
    let cells = read_stability_csv(&buf[..]).unwrap();
    assert_eq!(cells.len(), 4);
    assert_eq!(
        cells.iter().map(|c| c.stable).collect::<Vec<_>>(),
        scan.mask
    );
}

#[test]
fn rejects_malformed_csv() {
    assert!(read_convergence_csv(&b"method,problem\nAB2,ex1\n"[..]).is_err());
    let bad = format!("{}\nAB9,ex1,10,1e-3,,11,0\n", CONVERGENCE_HEADER.join(","));
    assert!(read_convergence_csv(bad.as_bytes()).is_err());
    assert!(read_stability_csv(&b"re,im,stable\n0,0,2\n"[..]).is_err());
}
