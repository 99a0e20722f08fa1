use belyi::exactnf::{ascending, poly_discriminant, resultant, NumberField, F_L};
use belyi::lattice::{check_lll, default_delta, lll_reduce, IntegerLattice};
use belyi::perm::{compose, cycle_type, Permutation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rug::{Integer, Rational};

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn three_perms() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1usize..12).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

proptest! {
    #[test]
    fn composition_is_associative((a, b, c) in three_perms()) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_cancels((a, _, _) in three_perms()) {
        prop_assert!(compose(&a, &a.inverse()).unwrap().is_identity());
        prop_assert_eq!(cycle_type(&a), cycle_type(&a.inverse()));
    }

    #[test]
    fn conjugation_keeps_cycle_type((a, b, _) in three_perms()) {
        let c = compose(&compose(&b, &a).unwrap(), &b.inverse()).unwrap();
        prop_assert_eq!(cycle_type(&c), cycle_type(&a));
        prop_assert_eq!(cycle_type(&a).degree(), a.degree());
    }

    #[test]
    fn field_axioms_in_cubic_field(
        x in prop::collection::vec(-20i64..20, 3),
        y in prop::collection::vec(-20i64..20, 3),
        z in prop::collection::vec(-20i64..20, 3),
    ) {
        let k = NumberField::new(ascending(&[1, 0, -3, 1])).unwrap();
        let el = |v: &[i64]| k.element(&v.iter().map(|&c| Rational::from((c, 3))).collect::<Vec<_>>()).unwrap();
        let (a, b, c) = (el(&x), el(&y), el(&z));
        prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
        if !a.is_zero() {
            prop_assert_eq!(k.mul(&k.inv(&a).unwrap(), &a), k.one());
        }
    }

    #[test]
    fn discriminant_of_product(
        f in prop::collection::vec(-6i64..6, 2..5),
        g in prop::collection::vec(-6i64..6, 2..5),
    ) {
        let mut f: Vec<Integer> = f.into_iter().map(Integer::from).collect();
        let mut g: Vec<Integer> = g.into_iter().map(Integer::from).collect();
        *f.last_mut().unwrap() = Integer::from(1);
        *g.last_mut().unwrap() = Integer::from(1);
        let mut fg = vec![Integer::new(); f.len() + g.len() - 1];
        for (i, a) in f.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                fg[i + j] += Integer::from(a * b);
            }
        }
        let r = resultant(&f, &g);
        prop_assert_eq!(poly_discriminant(&fg), poly_discriminant(&f) * poly_discriminant(&g) * r.square());
    }

    #[test]
    fn lll_output_passes_exact_checks(rows in prop::collection::vec(prop::collection::vec(-1000i64..1000, 5), 5)) {
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let l = IntegerLattice::from_i64(&refs).unwrap();
        if let Ok(out) = lll_reduce(&l, &default_delta()) {
            prop_assert!(check_lll(&out.lattice.basis, &default_delta()).is_ok());
        }
    }
}

#[test]
fn inverses_in_degree_36_field() {
    let l = NumberField::new(ascending(&F_L)).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(36);
    for _ in 0..100 {
        let coords: Vec<Rational> =
            (0..36).map(|_| Rational::from((rng.gen_range(-50i64..=50), rng.gen_range(1i64..=9)))).collect();
        let a = l.element(&coords).unwrap();
        if a.is_zero() {
            continue;
        }
        assert_eq!(l.mul(&l.inv(&a).unwrap(), &a), l.one());
    }
}
