use contact_forge::sl2::{a_mk, eigen_data, normal_form, verify_normal_form, IntMatrix2};
use proptest::prelude::*;

fn all_mk(max_m: usize, max_sum: u32) -> Vec<(usize, Vec<u32>)> {
    let mut out = Vec::new();
    fn rec(m: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(m, left - x, cur, out);
            cur.pop();
        }
    }
    for m in 1..=max_m {
        let mut ks = Vec::new();
        rec(m, max_sum, &mut Vec::new(), &mut ks);
        out.extend(ks.into_iter().filter(|k| k.iter().sum::<u32>() > 0).map(|k| (m, k)));
    }
    out
}

fn rotations(k: &[u32]) -> Vec<Vec<u32>> {
    (0..k.len())
        .map(|i| {
            let mut r = k.to_vec();
            r.rotate_left(i);
            r
        })
        .collect()
}

#[test]
fn normal_form_recovers_rotation_exhaustive() {
    for (m, k) in all_mk(3, 4) {
        let a = a_mk(m, &k).unwrap();
        assert!(a.trace() > 2);
        assert_eq!(a.det(), 1);
        let nf = normal_form(&a).unwrap();
        assert_eq!(nf.m, m);
        assert!(rotations(&k).contains(&nf.k), "{k:?} -> {:?}", nf.k);
        assert!(verify_normal_form(&a, &nf).unwrap());
    }
}

#[test]
fn inverse_class_is_hyperbolic() {
    for (m, k) in all_mk(3, 4) {
        let a = a_mk(m, &k).unwrap();
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(inv.trace(), a.trace());
        let nf = normal_form(&inv).unwrap();
        assert!(verify_normal_form(&inv, &nf).unwrap());
    }
}

fn sl2_word() -> impl Strategy<Value = IntMatrix2> {
    let gens = [
        IntMatrix2::new(1, 1, 0, 1),
        IntMatrix2::new(1, -1, 0, 1),
        IntMatrix2::new(1, 0, 1, 1),
        IntMatrix2::new(1, 0, -1, 1),
    ];
    prop::collection::vec(0usize..4, 0..10)
        .prop_map(move |idx| idx.iter().fold(IntMatrix2::IDENTITY, |acc, &i| acc * gens[i]))
}

proptest! {
    #[test]
    fn witness_identity_under_random_conjugation(mk in prop::sample::select(all_mk(3, 4)), c in sl2_word()) {
        let (m, k) = mk;
        let a = c * a_mk(m, &k).unwrap() * c.unimodular_inverse().unwrap();
        let nf = normal_form(&a).unwrap();
        prop_assert!(verify_normal_form(&a, &nf).unwrap());
        prop_assert!(rotations(&k).contains(&nf.k));
    }

    #[test]
    fn eigen_residuals(mk in prop::sample::select(all_mk(3, 4)), c in sl2_word()) {
        let (m, k) = mk;
        let a = c * a_mk(m, &k).unwrap() * c.unimodular_inverse().unwrap();
        let e = eigen_data(&a).unwrap();
        prop_assert!(e.a > 1.0);
        let apply = |v: [f64; 2]| [a.a as f64 * v[0] + a.b as f64 * v[1], a.c as f64 * v[0] + a.d as f64 * v[1]];
        let scale = (a.a.abs() + a.b.abs() + a.c.abs() + a.d.abs()) as f64;
        let (p, q) = (apply(e.v_plus), apply(e.v_minus));
        prop_assert!((p[0] - e.a * e.v_plus[0]).abs() < 1e-12 * scale);
        prop_assert!((p[1] - e.a * e.v_plus[1]).abs() < 1e-12 * scale);
        prop_assert!((q[0] - e.v_minus[0] / e.a).abs() < 1e-12 * scale);
        prop_assert!((q[1] - e.v_minus[1] / e.a).abs() < 1e-12 * scale);
        prop_assert!(e.v_plus[0] * e.v_minus[1] - e.v_plus[1] * e.v_minus[0] > 0.0);
    }
}
