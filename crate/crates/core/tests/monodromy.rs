use std::time::Duration;

use belyi::ansatz::build_ansatz;
use belyi::exactnf::{certify_map, CertifyConfig};
use belyi::monodromy::*;
use belyi::numeric::{BigComplex, Scalar};
use belyi::perm::{cycle_type, gamma0_triple, group_order, simultaneously_conjugate, CycleType, Permutation};
use belyi::solve::{multistart_search, MultistartConfig, NumericSolution, PrecisionConfig};
use belyi::triple::{profile, PermutationTriple};

fn solve(t: &PermutationTriple, starts: usize) -> Vec<NumericSolution> {
    let a = build_ansatz(&profile(t).unwrap()).unwrap();
    let cfg = MultistartConfig { starts, precision: PrecisionConfig::with_target(256), ..Default::default() };
    multistart_search(&a, &cfg)
}

fn ints(v: &[i64]) -> Vec<BigComplex> {
    v.iter().map(|&c| BigComplex::from_i64(c, 128)).collect()
}

fn degree_seven() -> PermutationTriple {
    let s0 = Permutation::from_cycles(7, &[&[1, 2], &[3, 4]]).unwrap();
    let s1 = Permutation::from_images(&[1, 3, 5, 6, 2, 7, 4]).unwrap();
    PermutationTriple::from_pair(s0, s1).unwrap()
}

#[test]
fn index_one_map() {
    let m = NumericMap::new(ints(&[744, 1]), ints(&[1])).unwrap();
    let fs = fiber_at(&m, &BigComplex::zero(128), 128).unwrap();
    assert_eq!(fs.roots.len(), 1);
    assert!(fs.roots[0].sub(&BigComplex::from_i64(-744, 128)).log2_abs() < -100.0);
    let t = monodromy_triple(&m, &MonodromyConfig::default()).unwrap();
    assert!(t.s0().is_identity() && t.s1().is_identity() && t.sinf().is_identity());
}

#[test]
fn gamma0_2_fiber_and_loops() {
    // (x+232)³ / (x−24)²
    let p3 = ints(&[12487168, 161472, 696, 1]);
    let pc = ints(&[576, -48, 1]);
    let m = NumericMap::new(p3, pc).unwrap();
    let fs = fiber_at(&m, &BigComplex::from_i64(-1000, 128), 128).unwrap();
    assert_eq!(fs.roots.len(), 3);
    assert!(fiber_residual_log2(&m, &fs) < -64.0);
    let s1 = track_loop(&m, &fs, Loop::AroundZero).unwrap();
    assert_eq!(cycle_type(&s1), CycleType::from_lengths([3]));
    let s0 = track_loop(&m, &fs, Loop::Around1728).unwrap();
    let sinf = track_loop(&m, &fs, Loop::AroundInfinity).unwrap();
    let t = PermutationTriple::new(s0, s1, sinf).unwrap();
    assert!(simultaneously_conjugate(&t, &gamma0_triple(2), Duration::from_secs(5)).unwrap().is_some());
}

#[test]
fn critical_base_point_is_clustered() {
    let m = NumericMap::new(ints(&[12487168, 161472, 696, 1]), ints(&[576, -48, 1])).unwrap();
    let err = fiber_at(&m, &BigComplex::zero(128), 128).unwrap_err();
    assert!(matches!(err, MonodromyError::Clustered { .. }), "{err:?}");
}

#[test]
fn congruence_round_trips() {
    for n in 2..=5 {
        let t = gamma0_triple(n);
        let sols = solve(&t, 4000);
        let map = certify_map(&sols[0], &CertifyConfig::default()).unwrap();
        let m = NumericMap::from_certified(&map, 128).unwrap();
        let back = monodromy_triple(&m, &MonodromyConfig::default()).unwrap();
        assert!(simultaneously_conjugate(&back, &t, Duration::from_secs(5)).unwrap().is_some(), "N = {n}");
    }
}

#[test]
fn base_point_does_not_matter() {
    let t = gamma0_triple(5);
    let sols = solve(&t, 2000);
    let m = NumericMap::from_solution(&sols[0], 128).unwrap();
    let a = monodromy_triple(&m, &MonodromyConfig::default()).unwrap();
    let b = monodromy_triple(&m, &MonodromyConfig { base_point: -300, ..Default::default() }).unwrap();
    assert!(simultaneously_conjugate(&a, &b, Duration::from_secs(5)).unwrap().is_some());
}

#[test]
fn degree_seven_classes() {
    let t = degree_seven();
    let sols = solve(&t, 4000);
    let mut matches = 0;
    for s in &sols {
        let m = NumericMap::from_solution(s, 128).unwrap();
        let back = monodromy_triple(&m, &MonodromyConfig::default()).unwrap();
        assert_eq!(back.cycle_types(), t.cycle_types());
        assert_eq!(group_order(&[back.s0().clone(), back.s1().clone()]).unwrap(), 168);
        if simultaneously_conjugate(&back, &t, Duration::from_secs(5)).unwrap().is_some() {
            matches += 1;
        }
    }
    assert_eq!(matches, 1);
}

#[test]
fn degree_limit() {
    let m = NumericMap::new(ints(&[12487168, 161472, 696, 1]), ints(&[576, -48, 1])).unwrap();
    let cfg = MonodromyConfig { max_degree: 2, ..Default::default() };
    assert_eq!(monodromy_triple(&m, &cfg).unwrap_err(), MonodromyError::DegreeLimit { degree: 3, limit: 2 });
}
