use belyi::ansatz::build_ansatz;
use belyi::exactnf::{certify_map, poly_discriminant, CertifiedBelyiMap, CertifyConfig};
use belyi::perm::{gamma0_triple, Permutation};
use belyi::solve::{multistart_search, MultistartConfig, PrecisionConfig};
use belyi::triple::{profile, PermutationTriple};
use rug::{Integer, Rational};

fn solve(t: &PermutationTriple, starts: usize) -> Vec<belyi::solve::NumericSolution> {
    let a = build_ansatz(&profile(t).unwrap()).unwrap();
    let cfg = MultistartConfig { starts, precision: PrecisionConfig::with_target(256), ..Default::default() };
    multistart_search(&a, &cfg)
}

fn rational_poly(p: &[belyi::exactnf::FieldElement]) -> Vec<Rational> {
    p.iter().map(|c| c.as_rational().unwrap()).collect()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&c| Rational::from(c)).collect()
}

#[test]
fn gamma0_2_over_q() {
    let sols = solve(&gamma0_triple(2), 64);
    let m = certify_map(&sols[0], &CertifyConfig::default()).unwrap();
    assert_eq!(m.field.degree(), 1);
    assert!(m.all_passed());
    // (x+232)³, (x+40)(x−536)², (x−24)²
    assert_eq!(rational_poly(&m.p3), ints(&[12487168, 161472, 696, 1]));
    assert_eq!(rational_poly(&m.p2), ints(&[11491840, 244416, -1032, 1]));
    assert_eq!(rational_poly(&m.pc), ints(&[576, -48, 1]));
}

#[test]
fn index_one_is_j_plus_744() {
    let t = PermutationTriple::from_pair(Permutation::identity(1), Permutation::identity(1)).unwrap();
    let sols = solve(&t, 16);
    let m = certify_map(&sols[0], &CertifyConfig::default()).unwrap();
    assert_eq!(rational_poly(&m.p3), ints(&[744, 1]));
    assert_eq!(rational_poly(&m.pc), ints(&[1]));
}

#[test]
fn file_round_trip_is_bit_exact_and_reverifies() {
    let sols = solve(&gamma0_triple(3), 200);
    let m = certify_map(&sols[0], &CertifyConfig::default()).unwrap();
    let text = m.to_text();
    let back = CertifiedBelyiMap::from_text(&text).unwrap();
    assert_eq!(back.to_text(), text);
    assert!(back.verify().iter().all(|p| p.passed));
}

#[test]
fn tampered_file_fails_identity() {
    let sols = solve(&gamma0_triple(2), 64);
    let text = certify_map(&sols[0], &CertifyConfig::default()).unwrap().to_text();
    let bad = text.replacen("\n-24/1\n", "\n-23/1\n", 1);
    assert_ne!(bad, text);
    let m = CertifiedBelyiMap::from_text(&bad).unwrap();
    let failed: Vec<String> = m.verify().into_iter().filter(|p| !p.passed).map(|p| p.name).collect();
    assert!(!failed.is_empty());
}

#[test]
fn degree_seven_over_quadratic_field() {
    let s0 = Permutation::from_cycles(7, &[&[1, 2], &[3, 4]]).unwrap();
    let s1 = Permutation::from_images(&[1, 3, 5, 6, 2, 7, 4]).unwrap();
    let t = PermutationTriple::from_pair(s0, s1).unwrap();
    let sols = solve(&t, 4000);
    assert_eq!(sols.len(), 2);
    for s in &sols {
        let m = certify_map(s, &CertifyConfig::default()).unwrap();
        assert_eq!(m.field.degree(), 2);
        let mut d = poly_discriminant(m.field.poly());
        for p in 2u32.. {
            let sq = Integer::from(p * p);
            while d.is_divisible(&sq) {
                d /= &sq;
            }
            if sq > d.clone().abs() {
                break;
            }
        }
        assert_eq!(d, -7);
    }
}
