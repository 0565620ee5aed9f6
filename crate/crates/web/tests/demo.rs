use agdplus_web::{compare_on_hard_instance, project_point, strongly_convex_rate};

#[test]
fn comparison_has_one_series_per_variant() {
    let c = compare_on_hard_instance(20, 200, 0.0, 1, &["gd", "agd", "axgd", "agdp", "agdp+rsd"]).unwrap();
    assert_eq!(c.series.len(), 5);
    for s in &c.series {
        assert_eq!(s.gaps.len(), 200);
        assert!(s.gaps.iter().all(|g| *g > -1e-9), "{}", s.label);
    }
    let final_gap = |label: &str| c.series.iter().find(|s| s.label == label).unwrap().gaps[199];
    assert!(final_gap("agdp") < final_gap("gd"));
    assert_eq!(c.series[2].queries, 400);
}

#[test]
fn noisy_comparison_is_seeded() {
    let a = compare_on_hard_instance(20, 100, 0.1, 7, &["agdp+rsd2_chain"]).unwrap();
    let b = compare_on_hard_instance(20, 100, 0.1, 7, &["agdp+rsd2_chain"]).unwrap();
    assert_eq!(a.series[0].gaps, b.series[0].gaps);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(compare_on_hard_instance(20, 10, 0.0, 0, &["nope"]).is_err());
    assert!(compare_on_hard_instance(2, 10, 0.0, 0, &["gd"]).is_err());
    assert!(compare_on_hard_instance(20, 0, 0.0, 0, &["gd"]).is_err());
    assert!(project_point(0.0, 0.0, "cube", 1.0).is_err());
    assert!(project_point(0.0, 0.0, "l1", -1.0).is_err());
}

#[test]
fn exact_strongly_convex_trace_stays_under_bound() {
    let r = strongly_convex_rate(10, 1.0, 25.0, 150, 0.0, 0).unwrap();
    assert_eq!(r.gaps.len(), r.bound.len());
    for (g, b) in r.gaps.iter().zip(&r.bound) {
        assert!(*g <= b * (1.0 + 1e-9) + 1e-14);
    }
}

#[test]
fn projections_match_brute_force() {
    for (x, y) in [(0.3, 0.9), (-2.0, 0.5), (2.0, 2.0), (0.1, 0.2)] {
        for (set, radius) in [("simplex", 1.0), ("l1", 1.5)] {
            let p = project_point(x, y, set, radius).unwrap().projected;
            let mut best = (f64::INFINITY, [0.0, 0.0]);
            let steps = 600;
            for i in 0..=steps {
                for j in 0..=steps {
                    let u = [
                        -2.0 + 4.0 * i as f64 / steps as f64,
                        -2.0 + 4.0 * j as f64 / steps as f64,
                    ];
                    let inside = match set {
                        "simplex" => u[0] >= 0.0 && u[1] >= 0.0 && (u[0] + u[1] - 1.0).abs() < 1e-9,
                        _ => u[0].abs() + u[1].abs() <= radius + 1e-12,
                    };
                    let d = (u[0] - x).powi(2) + (u[1] - y).powi(2);
                    if inside && d < best.0 {
                        best = (d, u);
                    }
                }
            }
            let d = (p[0] - x).powi(2) + (p[1] - y).powi(2);
            assert!(d <= best.0 + 1e-12, "{set} ({x}, {y})");
            assert!((p[0] - best.1[0]).abs() < 0.02 && (p[1] - best.1[1]).abs() < 0.02);
        }
    }
}
