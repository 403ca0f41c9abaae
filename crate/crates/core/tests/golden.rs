//! Hand-checked values for small profiles.

use mudra::efficiency::{
    decompose_lottery, enumerate_discrete, find_sd_dominator, is_discrete_sd_efficient, is_ex_post_efficient,
    is_sd_efficient, sd_efficient_discrete, EfficiencyCertificate,
};
use mudra::fairness::is_sd_envy_free;
use mudra::order::{dl_compare, DlVerdict, SdVerdict};
use mudra::rules::{mps_trace, ops, random_priority, serial_dictator, DEFAULT_RP_AGENT_CAP};
use mudra::strategy::{find_dl_manipulation, find_group_manipulation, find_sd_manipulation, find_weak_sd_manipulation};
use mudra::{
    rat, sd_compare, AssignmentRule, DiscreteAssignment, Error, Guards, Instance, Permutation, PreferenceProfile,
    RandomAssignment, Rational, Rule,
};

fn fr(rows: &[&[&str]]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn prof(objects: &[&str], quota: usize, orders: &[&[&str]]) -> PreferenceProfile {
    PreferenceProfile::from_names(objects, quota, orders).unwrap()
}

const O: [&str; 4] = ["o1", "o2", "o3", "o4"];
const L: [&str; 4] = ["a", "b", "c", "d"];

fn figure1() -> PreferenceProfile {
    prof(&O, 2, &[&["o1", "o2", "o3", "o4"], &["o3", "o2", "o4", "o1"]])
}

fn contested() -> PreferenceProfile {
    prof(&L, 2, &[&["a", "b", "c", "d"], &["b", "c", "a", "d"]])
}

#[test]
fn mps_figure1_assignment_and_breakpoints() {
    let t = mps_trace(&figure1()).unwrap();
    assert_eq!(
        t.assignment.rows(),
        fr(&[&["7/8", "1/2", "1/4", "3/8"], &["1/8", "1/2", "3/4", "5/8"]]).as_slice()
    );
    assert_eq!(t.breakpoints(), vec![rat(1, 2), rat(3, 4), rat(7, 8), rat(9, 8)]);
    assert_eq!(t.end_time(), rat(9, 8));
}

#[test]
fn mps_mirrored_profile_is_uniform() {
    let p = prof(&O, 2, &[&["o1", "o2", "o3", "o4"], &["o2", "o1", "o4", "o3"]]);
    let a = Rule::Mps.assign(&p).unwrap();
    assert!(a.rows().iter().flatten().all(|x| *x == rat(1, 2)));
    let terms = decompose_lottery(&a).unwrap();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().all(|(w, d)| *w == rat(1, 2) && d.is_balanced()));
    // The two published terms are each SD-dominated.
    let two = vec![rat(2, 1); 2];
    for m in [
        fr(&[&["1", "0", "0", "1"], &["0", "1", "1", "0"]]),
        fr(&[&["0", "1", "1", "0"], &["1", "0", "0", "1"]]),
    ] {
        assert!(find_sd_dominator(&m, &two, &p).unwrap().is_some());
    }
    assert!(!is_sd_efficient(&a, &p).unwrap().holds);
}

#[test]
fn ops_contested_profile() {
    let p = contested();
    assert_eq!(
        ops(&p).unwrap().rows(),
        fr(&[&["1", "0", "1/2", "1/2"], &["0", "1", "1/2", "1/2"]]).as_slice()
    );
    let misreport = vec![1, 0, 2, 3];
    assert_eq!(
        ops(&p.with_order(0, misreport.clone()).unwrap()).unwrap().rows(),
        fr(&[&["1", "1/2", "0", "1/2"], &["0", "1/2", "1", "1/2"]]).as_slice()
    );
    assert_eq!(
        ops(&p.with_order(1, misreport).unwrap()).unwrap().rows(),
        fr(&[&["1", "0", "1/2", "1/2"], &["0", "1", "1/2", "1/2"]]).as_slice()
    );
}

#[test]
fn ops_first_manipulation_swaps_top_two() {
    let p = contested();
    let m = find_weak_sd_manipulation(&Rule::Ops, &p, 0).unwrap().unwrap();
    assert_eq!(m.misreports(), vec![&[1usize, 0, 2, 3][..]]);
    assert_eq!(m.truthful_outcome.row(0), fr(&[&["1", "0", "1/2", "1/2"]])[0].as_slice());
    assert_eq!(m.manipulated_outcome.row(0), fr(&[&["1", "1/2", "0", "1/2"]])[0].as_slice());
    assert!(m.verify(&Rule::Ops).unwrap());
    // A strict SD gain is also a DL gain.
    assert!(find_dl_manipulation(&Rule::Ops, &p, 0).unwrap().is_some());
}

#[test]
fn mps_contested_profile() {
    let p = contested();
    let a = Rule::Mps.assign(&p).unwrap();
    assert_eq!(a.row(0), fr(&[&["3/4", "1/2", "1/4", "1/2"]])[0].as_slice());
    for agent in 0..2 {
        assert!(find_weak_sd_manipulation(&Rule::Mps, &p, agent).unwrap().is_none());
    }
    let m = find_sd_manipulation(&Rule::Mps, &p, 0).unwrap().unwrap();
    assert_eq!(
        sd_compare(m.truthful_outcome.row(0), m.manipulated_outcome.row(0), p.order(0)),
        SdVerdict::Incomparable
    );
}

#[test]
fn mps_admits_dl_improving_misreport() {
    // Agent 1 drops o3 below o4 and avoids competing for o3 at t = 1/2,
    // which lets it finish o2 before agent 2 turns to it.
    let p = prof(&O, 2, &[&["o1", "o2", "o3", "o4"], &["o1", "o3", "o4", "o2"]]);
    let truthful = Rule::Mps.assign(&p).unwrap();
    assert_eq!(truthful.row(0), fr(&[&["1/2", "7/8", "1/4", "3/8"]])[0].as_slice());
    let reported = Rule::Mps.assign(&p.with_order(0, vec![0, 1, 3, 2]).unwrap()).unwrap();
    assert_eq!(reported.row(0), fr(&[&["1/2", "1", "0", "1/2"]])[0].as_slice());
    assert_eq!(dl_compare(reported.row(0), truthful.row(0), p.order(0)), DlVerdict::First);
    assert_eq!(
        sd_compare(reported.row(0), truthful.row(0), p.order(0)),
        SdVerdict::Incomparable
    );
    let found = find_dl_manipulation(&Rule::Mps, &p, 0).unwrap().unwrap();
    assert!(found.verify(&Rule::Mps).unwrap());
}

#[test]
fn ps_group_manipulation_four_agents() {
    let (x, y): (&[&str], &[&str]) = (&["a", "b", "c", "d"], &["b", "c", "a", "d"]);
    let p = prof(&L, 1, &[x, x, y, y]);
    let t = ["1/2", "0", "1/4", "1/4"];
    let u = ["0", "1/2", "1/4", "1/4"];
    assert_eq!(Rule::Mps.assign(&p).unwrap().rows(), fr(&[&t, &t, &u, &u]).as_slice());
    let m = find_group_manipulation(&Rule::Mps, &p, &[0, 1], &Guards::default())
        .unwrap()
        .unwrap();
    assert_eq!(m.misreports(), vec![&[1usize, 0, 2, 3][..], &[1, 0, 2, 3]]);
    let v = ["1/2", "1/4", "0", "1/4"];
    let w = ["0", "1/4", "1/2", "1/4"];
    assert_eq!(m.manipulated_outcome.rows(), fr(&[&v, &v, &w, &w]).as_slice());
    assert!(m.verify(&Rule::Mps).unwrap());
    // Each member's prefix sums go from (1/2,1/2,3/4,1) to (1/2,3/4,3/4,1).
    assert_eq!(
        sd_compare(m.manipulated_outcome.row(0), m.truthful_outcome.row(0), p.order(0)),
        SdVerdict::FirstStrictlyDominates
    );
    // A singleton coalition is an individual weak-SD search.
    assert_eq!(
        find_group_manipulation(&Rule::Mps, &p, &[2], &Guards::default())
            .unwrap()
            .map(|m| m.misreports().iter().map(|o| o.to_vec()).collect::<Vec<_>>()),
        find_weak_sd_manipulation(&Rule::Mps, &p, 2)
            .unwrap()
            .map(|m| m.misreports().iter().map(|o| o.to_vec()).collect::<Vec<_>>())
    );
}

#[test]
fn serial_dictator_and_random_priority() {
    let p = contested();
    let first = serial_dictator(&p, &Permutation::identity(2)).unwrap();
    assert_eq!(first.bundle(0), vec![0, 1]);
    assert_eq!(first.bundle(1), vec![2, 3]);
    let second = serial_dictator(&p, &Permutation::new(vec![1, 0]).unwrap()).unwrap();
    assert_eq!(second.bundle(1), vec![1, 2]);
    assert_eq!(second.bundle(0), vec![0, 3]);
    let rp = random_priority(&p, DEFAULT_RP_AGENT_CAP).unwrap();
    assert_eq!(rp.rows(), fr(&[&["1", "1/2", "0", "1/2"], &["0", "1/2", "1", "1/2"]]).as_slice());
    let nine = Instance::with_sizes(9, 1).unwrap();
    let big = PreferenceProfile::new(nine, vec![(0..9).collect(); 9]).unwrap();
    assert!(matches!(
        random_priority(&big, DEFAULT_RP_AGENT_CAP),
        Err(Error::RandomPriorityInfeasible { agents: 9, .. })
    ));
}

#[test]
fn rp_is_not_sd_efficient_with_two_agents() {
    let p = prof(&L, 2, &[&["a", "b", "c", "d"], &["b", "a", "d", "c"]]);
    let rp = Rule::random_priority().assign(&p).unwrap();
    assert!(rp.rows().iter().flatten().all(|x| *x == rat(1, 2)));
    let v = is_sd_efficient(&rp, &p).unwrap();
    assert!(!v.holds);
}

#[test]
fn ex_post_fails_in_balanced_mode() {
    let p = figure1();
    let a = Rule::Mps.assign(&p).unwrap();
    let v = is_ex_post_efficient(&a, &p, false, &Guards::default()).unwrap();
    assert!(!v.holds);
    assert!(matches!(v.certificate, Some(EfficiencyCertificate::OutsideHull { .. })));
}

#[test]
fn ex_post_unbalanced_lottery_exists() {
    // With unbalanced deterministic assignments allowed, the outcome is a
    // lottery over SD-efficient ones; the (3,1) split giving agent 2 only
    // its top object is the one the hand enumeration misses.
    let p = figure1();
    let a = Rule::Mps.assign(&p).unwrap();
    let inst = p.instance().clone();
    let lottery = [
        (rat(1, 8), vec![vec![0, 3], vec![1, 2]]),
        (rat(1, 4), vec![vec![0], vec![1, 2, 3]]),
        (rat(1, 4), vec![vec![0, 1, 2], vec![3]]),
        (rat(1, 4), vec![vec![0, 1, 3], vec![2]]),
        (rat(1, 8), vec![vec![], vec![0, 1, 2, 3]]),
    ];
    let mut sum = vec![vec![Rational::zero(); 4]; 2];
    for (w, bundles) in &lottery {
        let d = DiscreteAssignment::from_bundles(inst.clone(), bundles).unwrap();
        assert!(is_discrete_sd_efficient(&d, &p).unwrap());
        for (i, row) in d.to_matrix().iter().enumerate() {
            for (o, x) in row.iter().enumerate() {
                sum[i][o] += w * x;
            }
        }
    }
    assert_eq!(sum, a.rows());
    let efficient = sd_efficient_discrete(&p, true, 1000).unwrap();
    assert_eq!(efficient.len(), 7);
    let v = is_ex_post_efficient(&a, &p, true, &Guards::default()).unwrap();
    assert!(v.holds);
}

#[test]
fn envy_examples() {
    let p = figure1();
    assert!(is_sd_envy_free(&Rule::Mps.assign(&p).unwrap(), &p).unwrap().holds);
    let q = prof(&O, 2, &[&["o1", "o2", "o3", "o4"], &["o2", "o1", "o3", "o4"]]);
    let swapped = RandomAssignment::new(
        q.instance().clone(),
        fr(&[&["0", "1", "1/2", "1/2"], &["1", "0", "1/2", "1/2"]]),
    )
    .unwrap();
    assert!(!mudra::fairness::is_weak_sd_envy_free(&swapped, &q).unwrap().holds);
    let solo = prof(&["x", "y"], 2, &[&["y", "x"]]);
    assert!(is_sd_envy_free(&Rule::Mps.assign(&solo).unwrap(), &solo).unwrap().holds);
}

#[test]
fn discrete_enumeration_guard() {
    let inst = Instance::with_sizes(2, 2).unwrap();
    assert_eq!(enumerate_discrete(&inst, true, 6).unwrap().len(), 6);
    assert!(enumerate_discrete(&inst, true, 5).unwrap_err().is_guard());
}
