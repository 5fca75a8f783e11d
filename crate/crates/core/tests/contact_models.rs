use contact_forge::algebra::Expr;
use contact_forge::contact::{
    build_family, characteristic_field, charfol_report, check_characteristic, disk_model, proof_coefficient,
    proportionality, verify_anosov, verify_family, Boundary, CharFolConfig, DiskModel, FamilyConfig, Tangency,
};
use contact_forge::forms::DiffForm;
use contact_forge::report::Verdict;
use contact_forge::sl2::{a_mk, IntMatrix2};

#[test]
fn disk5d_has_single_positive_elliptic_point() {
    let (beta, nu, n) = disk_model(DiskModel::Disk5d).unwrap();
    let x = characteristic_field(&beta, &nu, n).unwrap();
    let cfg = CharFolConfig { boundary: Boundary::Sphere { radius: 1.0 }, ..CharFolConfig::default() };
    let r = charfol_report(&x, &cfg).unwrap();
    assert_eq!(r.seeds, 32usize.pow(4));
    assert_eq!(r.singular_points.len(), 1);
    let p = &r.singular_points[0];
    assert!(p.location.iter().all(|v| v.abs() < 1e-12));
    assert_eq!((p.sign, p.index, p.method.as_str()), (Tangency::Positive, 1, "jacobian"));
    assert!((p.divergence - 8.0).abs() < 1e-12);
    assert_eq!((r.negative_index_sum, r.positive_index_sum), (0, 1));
    assert!(r.tb_holds);
    assert_eq!(r.boundary_verdict, Verdict::Pass);
}

#[test]
fn characteristic_field_ignores_positive_volume_rescaling() {
    for model in [DiskModel::Disk3d, DiskModel::Disk5d] {
        let (beta, nu, n) = disk_model(model).unwrap();
        let samples = beta.chart().random_samples(300, 11);
        let x1 = characteristic_field(&beta, &nu, n).unwrap();
        let first = Expr::var(beta.chart().name(0));
        let nu2 = nu.scale(&(Expr::constant(2.0) + (first.clone() * first).sin()));
        let x2 = characteristic_field(&beta, &nu2, n).unwrap();
        let (cross, dot) = proportionality(&x1, &x2, &samples).unwrap();
        assert!(cross < 1e-9 && dot >= 0.0, "{model:?}: {cross} {dot}");
        for (x, v) in [(&x1, &nu), (&x2, &nu2)] {
            assert!(check_characteristic(x, &beta, v, n, &samples).unwrap().passed());
        }
    }
}

#[test]
fn perturbed_disk_keeps_flow_identities() {
    // β = x dy − y dx + x² dx on the unit square: a non-radial positive focus
    let (beta, nu, n) = disk_model(DiskModel::Disk3d).unwrap();
    let chart = beta.chart().clone();
    let beta = beta.add(&DiffForm::monomial(&chart, Expr::var("x").powi(2), &["x"]).unwrap()).unwrap();
    let x = characteristic_field(&beta, &nu, n).unwrap();
    assert!(check_characteristic(&x, &beta, &nu, n, &chart.random_samples(200, 5)).unwrap().passed());
    let r = charfol_report(&x, &CharFolConfig::default()).unwrap();
    assert!(r.singular_points.iter().any(|p| p.location.iter().all(|v| v.abs() < 1e-10) && p.index == 1));
}

#[test]
fn family_over_the_default_t_list() {
    let cfg = FamilyConfig::default();
    let r = verify_family(&cfg, &[0.0, 0.25, 0.5, 0.75, 0.99, 1.0]).unwrap();
    assert!(r.passed(), "{:#?}", r.checks());
    for s in &r.steps[..5] {
        assert!(s.proof_residual.unwrap() < 1e-9);
    }
}

#[test]
fn family_top_coefficient_against_closed_form_at_random_points() {
    let cfg = FamilyConfig { m: 3, t: 0.5, ..FamilyConfig::default() };
    let alpha = build_family(&cfg).unwrap();
    let chart = alpha.chart().clone();
    let d = alpha.exterior_derivative().unwrap();
    let top = alpha.wedge(&d.wedge(&d).unwrap()).unwrap().top_coefficient().unwrap();
    let names = chart.names();
    let (a, b) = (top.compile(&names).unwrap(), proof_coefficient(&cfg).unwrap().compile(&names).unwrap());
    for p in chart.random_samples(200, 42) {
        assert!((a.eval(&p).unwrap() - b.eval(&p).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn anosov_for_binding_matrices() {
    for (m, k) in [(1usize, vec![1u32]), (1, vec![3]), (2, vec![1, 1]), (2, vec![2, 0])] {
        let a = a_mk(m, &k).unwrap();
        let r = verify_anosov(&a, 4).unwrap();
        assert!(r.passed(), "{m} {k:?}: {:#?}", r.checks());
    }
    assert!(verify_anosov(&IntMatrix2::new(1, 0, 0, 1), 4).is_err());
}
