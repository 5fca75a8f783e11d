use contact_forge::milnor::{count_critical, verify_m1_discriminant, verify_m2_identity};
use contact_forge::monodromy::expected_word;
use contact_forge::sl2::chi_filling;
use contact_forge::words::braid_stats;

fn suite() -> Vec<(usize, Vec<u32>)> {
    let mut out = vec![(1, vec![1]), (1, vec![2]), (1, vec![3])];
    for k1 in 0..=3u32 {
        for k2 in 0..=3 - k1 {
            if k1 + k2 > 0 {
                out.push((2, vec![k1, k2]));
            }
        }
    }
    out
}

#[test]
fn counts_stable_in_delta() {
    for (m, k) in suite() {
        let expected = 12 + k.iter().sum::<u32>() as usize;
        for delta in [1e-7, 1e-8, 1e-9] {
            let r = count_critical(m, &k, delta, 0.5).unwrap();
            assert_eq!(r.count, expected, "{m} {k:?} δ={delta}");
            assert!(r.min_side_margin > 1e-12, "{m} {k:?} δ={delta}: {}", r.min_side_margin);
        }
    }
}

#[test]
fn count_matches_monodromy_exponent_sum() {
    for (m, k) in suite() {
        let r = count_critical(m, &k, 1e-8, 0.5).unwrap();
        let e = braid_stats(&expected_word(m, &k).unwrap()).exponent_sum;
        assert_eq!(r.count as i64, e, "{m} {k:?}");
    }
}

#[test]
fn page_euler_characteristic_against_filling() {
    for (m, k) in suite() {
        let r = count_critical(m, &k, 1e-8, 0.5).unwrap();
        let sum: u32 = k.iter().sum();
        let page = if m == 1 { 11 + k[0] as i64 } else { 10 + sum as i64 };
        assert_eq!(r.chi, page);
        let filling = chi_filling(m, &k).unwrap();
        if m == 1 {
            // both displayed formulas read 11 + k1 here
            assert_eq!(r.chi, filling);
        } else {
            assert_ne!(r.chi, filling, "{m} {k:?}");
        }
    }
}

#[test]
fn exact_identities() {
    for k1 in 1..=3 {
        let c = verify_m1_discriminant(k1).unwrap();
        assert!(c.holds && c.difference.is_none(), "{c:?}");
    }
    for (k1, k2) in [(1, 1), (2, 1), (1, 0)] {
        let r = verify_m2_identity(k1, k2, 1e-8, 0.5).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.eliminant.holds);
    }
}
