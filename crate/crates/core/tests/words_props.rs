use contact_forge::words::{artin, braid_equal, braid_stats, BraidWord, FreeAut, Word};
use proptest::prelude::*;

fn product_word(n: usize) -> Word {
    Word::from_letters(&(1..=n as i32).collect::<Vec<_>>()).unwrap()
}

fn letters(n: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    let g = (n - 1) as i32;
    prop::collection::vec((1..=g, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..=max_len)
}

#[test]
fn braid_relations_exhaustive_up_to_five_strands() {
    for n in 2..=5usize {
        for i in 1..n as i32 {
            for j in 1..n as i32 {
                let a = BraidWord::new(n, vec![i, j]).unwrap();
                let b = BraidWord::new(n, vec![j, i]).unwrap();
                if (i - j).abs() >= 2 {
                    assert!(braid_equal(&a, &b).unwrap(), "far commutation {i} {j} in B{n}");
                } else if i != j {
                    assert!(!braid_equal(&a, &b).unwrap());
                }
            }
            if i + 1 < n as i32 {
                let a = BraidWord::new(n, vec![i, i + 1, i]).unwrap();
                let b = BraidWord::new(n, vec![i + 1, i, i + 1]).unwrap();
                assert!(braid_equal(&a, &b).unwrap(), "braid relation {i} in B{n}");
            }
        }
    }
}

#[test]
fn full_twist_is_central_in_b4() {
    let delta2 = BraidWord::parse("(s1 s2 s3)^4", 4).unwrap();
    for g in 1..=3 {
        let s = BraidWord::new(4, vec![g]).unwrap();
        assert!(braid_equal(&delta2.concat(&s).unwrap(), &s.concat(&delta2).unwrap()).unwrap());
    }
    let conj = FreeAut::conjugation(4, &product_word(4)).unwrap();
    assert_eq!(artin(&delta2).unwrap(), conj);
}

proptest! {
    #[test]
    fn reduction_idempotent(raw in prop::collection::vec((1i32..4, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..40),
                            other in prop::collection::vec((1i32..4, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..40)) {
        let w = Word::from_letters(&raw).unwrap();
        prop_assert_eq!(Word::from_letters(w.letters()).unwrap(), w.clone());
        for pair in w.letters().windows(2) {
            prop_assert!(pair[0] != -pair[1]);
        }
        let u = Word::from_letters(&other).unwrap();
        prop_assert!(w.mul(&u).unwrap().len() <= w.len() + u.len());
    }

    #[test]
    fn artin_fixes_boundary_product(n in 2usize..6, seed in letters(6, 20)) {
        let ls: Vec<i32> = seed.into_iter().filter(|l| (l.unsigned_abs() as usize) < n).collect();
        let b = BraidWord::new(n, ls).unwrap();
        let p = product_word(n);
        prop_assert_eq!(artin(&b).unwrap().apply(&p).unwrap(), p);
    }

    #[test]
    fn artin_is_homomorphism(a in letters(4, 12), b in letters(4, 12)) {
        let a = BraidWord::new(4, a).unwrap();
        let b = BraidWord::new(4, b).unwrap();
        let lhs = artin(&a.concat(&b).unwrap()).unwrap();
        let rhs = artin(&a).unwrap().compose(&artin(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn equal_braids_have_equal_stats(a in letters(4, 30), k in 0usize..30) {
        let a = BraidWord::new(4, a).unwrap();
        // conjugate-free rewrite: insert a cancelling pair and apply a far commutation
        let mut ls = a.letters().to_vec();
        let pos = k % (ls.len() + 1);
        ls.splice(pos..pos, [2, -2]);
        let b = BraidWord::new(4, ls).unwrap();
        prop_assert!(braid_equal(&a, &b).unwrap());
        prop_assert!(braid_equal(&b, &a).unwrap());
        prop_assert!(braid_equal(&a, &a).unwrap());
        prop_assert_eq!(braid_stats(&a), braid_stats(&b));
    }

    #[test]
    fn braid_inverse_cancels(a in letters(5, 20)) {
        let a = BraidWord::new(5, a).unwrap();
        let id = BraidWord::identity(5);
        prop_assert!(braid_equal(&a.concat(&a.inverse()).unwrap(), &id).unwrap());
    }

    #[test]
    fn parse_display_round_trip(a in letters(5, 20)) {
        let a = BraidWord::new(5, a).unwrap();
        prop_assert_eq!(BraidWord::parse(&a.to_string(), 5).unwrap(), a);
    }
}
