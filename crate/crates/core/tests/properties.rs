use mudra::efficiency::{decompose_lottery, is_sd_efficient, rows_sd_dominate};
use mudra::fairness::{check_anonymity, check_neutrality, is_sd_envy_free, is_weak_sd_envy_free};
use mudra::model::Relabel;
use mudra::order::{sd_weakly_prefers, upper_contour_sum};
use mudra::ratlp::{solve, LinearProgram, LpOutcome, Relation, Sense};
use mudra::rules::{mps_trace, ops, ops_trace};
use mudra::strategy::ManipulationKind;
use mudra::{
    dl_compare, rat, sd_compare, validate_assignment, AssignmentRule, DlVerdict, Instance, Permutation,
    PreferenceProfile, RandomAssignment, Rational, Rule, SdVerdict,
};
use proptest::prelude::*;

fn order(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<_>>()).prop_shuffle()
}

fn perm(len: usize) -> impl Strategy<Value = Permutation> {
    order(len).prop_map(|v| Permutation::new(v).unwrap())
}

fn profile_with(n: usize, quota: usize) -> impl Strategy<Value = PreferenceProfile> {
    prop::collection::vec(order(n * quota), n)
        .prop_map(move |orders| PreferenceProfile::new(Instance::with_sizes(n, quota).unwrap(), orders).unwrap())
}

fn profile() -> impl Strategy<Value = PreferenceProfile> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(n, c)| profile_with(n, c))
}

fn relaxed_profile() -> impl Strategy<Value = PreferenceProfile> {
    (2usize..=3, 2usize..=5)
        .prop_filter("m not a multiple of n", |(n, m)| m % n != 0)
        .prop_flat_map(|(n, m)| {
            prop::collection::vec(order(m), n).prop_map(move |orders| {
                let agents = (1..=n).map(|i| format!("agent{i}")).collect();
                let objects = (1..=m).map(|o| format!("o{o}")).collect();
                PreferenceProfile::new(Instance::relaxed(agents, objects).unwrap(), orders).unwrap()
            })
        })
}

fn small_row(m: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..=4).prop_map(|k| rat(k, 4)), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rule_outputs_are_valid(p in profile()) {
        for rule in Rule::all() {
            let a = rule.assign(&p).unwrap();
            prop_assert!(validate_assignment(p.instance(), a.rows()).unwrap().is_valid(), "{}", rule.key());
        }
    }

    #[test]
    fn eating_rules_are_valid_in_relaxed_mode(p in relaxed_profile()) {
        for rule in [Rule::Mps, Rule::Ops, Rule::Uniform] {
            let a = rule.assign(&p).unwrap();
            prop_assert!(validate_assignment(p.instance(), a.rows()).unwrap().is_valid());
            for row in a.rows() {
                prop_assert_eq!(row.iter().cloned().sum::<Rational>(), p.instance().row_target());
            }
        }
    }

    #[test]
    fn rules_commute_with_relabeling((p, pi, sigma) in profile().prop_flat_map(|p| {
        let (n, m) = (p.n(), p.m());
        (Just(p), perm(n), perm(m))
    })) {
        for rule in [Rule::Uniform, Rule::random_priority(), Rule::Ops, Rule::Mps] {
            prop_assert!(check_anonymity(&rule, &p, &pi).unwrap().holds, "{}", rule.key());
            prop_assert!(check_neutrality(&rule, &p, &sigma).unwrap().holds, "{}", rule.key());
        }
    }

    #[test]
    fn mps_rows_sd_dominate_uniform(p in profile()) {
        let a = Rule::Mps.assign(&p).unwrap();
        let u = RandomAssignment::uniform(p.instance());
        for i in 0..p.n() {
            prop_assert!(sd_weakly_prefers(a.row(i), u.row(i), p.order(i)));
        }
    }

    #[test]
    fn mps_is_sd_envy_free(p in profile()) {
        let a = Rule::Mps.assign(&p).unwrap();
        prop_assert!(is_sd_envy_free(&a, &p).unwrap().holds);
    }

    #[test]
    fn envy_freeness_implies_weak(p in profile()) {
        for rule in Rule::all() {
            let a = rule.assign(&p).unwrap();
            if is_sd_envy_free(&a, &p).unwrap().holds {
                prop_assert!(is_weak_sd_envy_free(&a, &p).unwrap().holds);
            }
        }
    }

    #[test]
    fn agents_eat_in_step(p in profile()) {
        for trace in [mps_trace(&p).unwrap(), ops_trace(&p).unwrap()] {
            let mut eaten = vec![Rational::zero(); p.n()];
            for phase in &trace.phases {
                prop_assert!(phase.end > phase.start);
                let len = &phase.end - &phase.start;
                for (total, set) in eaten.iter_mut().zip(&phase.eating) {
                    *total += Rational::from(set.len()) * &len;
                }
                prop_assert!(eaten.iter().all(|e| *e == eaten[0]));
            }
            let c = Rational::from(p.instance().quota());
            prop_assert!(trace.assignment.rows().iter().all(|r| r.iter().cloned().sum::<Rational>() == c));
        }
    }

    #[test]
    fn whole_objects_come_from_the_first_eating_set(p in profile()) {
        let t = mps_trace(&p).unwrap();
        for i in 0..p.n() {
            for o in 0..p.m() {
                if t.assignment.get(i, o).is_one() && p.n() > 1 {
                    prop_assert!(t.phases[0].eating[i].contains(&o));
                }
            }
        }
    }

    #[test]
    fn single_unit_mps_is_ops(p in (1usize..=5).prop_flat_map(|n| profile_with(n, 1))) {
        prop_assert_eq!(Rule::Mps.assign(&p).unwrap(), ops(&p).unwrap());
    }

    #[test]
    fn permutation_group_laws(a in perm(5), b in perm(5), c in perm(5)) {
        let id = Permutation::identity(5);
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert_eq!(a.compose(&a.inverse()), id.clone());
        prop_assert_eq!(a.inverse().compose(&a), id.clone());
        prop_assert_eq!(a.compose(&id), a.clone());
        for x in 0..5 {
            prop_assert_eq!(a.compose(&b).apply(x), a.apply(b.apply(x)));
        }
    }

    #[test]
    fn relabeling_is_a_group_action((p, a, b, s, t) in profile_with(3, 2).prop_flat_map(|p| {
        (Just(p), perm(3), perm(3), perm(6), perm(6))
    })) {
        let twice = p.permute_agents(&a).unwrap().permute_agents(&b).unwrap();
        prop_assert_eq!(twice, p.permute_agents(&b.compose(&a)).unwrap());
        prop_assert_eq!(p.permute_agents(&a).unwrap().permute_agents(&a.inverse()).unwrap(), p.clone());
        let twice = p.permute_objects(&s).unwrap().permute_objects(&t).unwrap();
        prop_assert_eq!(twice, p.permute_objects(&t.compose(&s)).unwrap());
        prop_assert_eq!(p.permute_objects(&s).unwrap().permute_objects(&s.inverse()).unwrap(), p.clone());
        let x = Rule::Mps.assign(&p).unwrap();
        prop_assert_eq!(x.permute_objects(&s).unwrap().permute_objects(&s.inverse()).unwrap(), x);
    }

    #[test]
    fn lotteries_resum_to_their_input(p in (1usize..=3, 1usize..=2).prop_flat_map(|(n, c)| profile_with(n, c))) {
        for rule in [Rule::Mps, Rule::Ops, Rule::random_priority()] {
            let a = rule.assign(&p).unwrap();
            let terms = decompose_lottery(&a).unwrap();
            let mut sum = vec![vec![Rational::zero(); p.m()]; p.n()];
            let mut weight = Rational::zero();
            for (w, d) in &terms {
                prop_assert!(w.is_positive());
                prop_assert!(d.is_balanced());
                weight += w;
                for (i, row) in d.to_matrix().iter().enumerate() {
                    for (o, x) in row.iter().enumerate() {
                        if x.is_one() {
                            prop_assert!(a.get(i, o).is_positive());
                        }
                        sum[i][o] += w * x;
                    }
                }
            }
            prop_assert_eq!(weight, Rational::one());
            prop_assert_eq!(sum.as_slice(), a.rows());
            prop_assert!(validate_assignment(p.instance(), &terms[0].1.to_matrix()).unwrap().is_valid());
        }
    }

    #[test]
    fn discrete_assignments_validate(p in profile()) {
        let terms = decompose_lottery(&Rule::Mps.assign(&p).unwrap()).unwrap();
        for (_, d) in terms {
            prop_assert!(d.to_random().is_ok());
        }
    }

    #[test]
    fn sd_dominance_implies_dl(a in small_row(5), b in small_row(5), ord in order(5)) {
        let sd = sd_compare(&a, &b, &ord);
        if sd == SdVerdict::FirstStrictlyDominates {
            prop_assert_eq!(dl_compare(&a, &b, &ord), DlVerdict::First);
        }
        prop_assert_eq!(sd_compare(&b, &a, &ord), sd.mirror());
        let total: Rational = a.iter().cloned().sum();
        prop_assert_eq!(upper_contour_sum(&a, &ord, ord[4]).unwrap(), total);
    }

    #[test]
    fn dl_is_a_total_order(rows in prop::collection::vec(small_row(4), 2..8), ord in order(4)) {
        let mut sorted = rows.clone();
        sorted.sort_by(|a, b| match dl_compare(a, b, &ord) {
            DlVerdict::First => std::cmp::Ordering::Greater,
            DlVerdict::Second => std::cmp::Ordering::Less,
            DlVerdict::Equal => std::cmp::Ordering::Equal,
        });
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                prop_assert_ne!(dl_compare(&sorted[i], &sorted[j], &ord), DlVerdict::First);
            }
        }
    }

    #[test]
    fn truthful_report_never_gains(p in profile()) {
        let kinds = [
            ManipulationKind::SdStrategyproofness,
            ManipulationKind::WeakSdStrategyproofness,
            ManipulationKind::DlStrategyproofness,
            ManipulationKind::WeakSdGroupStrategyproofness,
        ];
        for rule in Rule::all() {
            let a = rule.assign(&p).unwrap();
            for i in 0..p.n() {
                for kind in kinds {
                    prop_assert!(!kind.gains(a.row(i), a.row(i), p.order(i)));
                }
            }
        }
    }

    #[test]
    fn sd_dominators_strictly_improve(p in profile_with(2, 2)) {
        let a = Rule::random_priority().assign(&p).unwrap();
        let v = is_sd_efficient(&a, &p).unwrap();
        if let Some(mudra::efficiency::EfficiencyCertificate::Dominator { matrix }) = v.certificate {
            prop_assert!(rows_sd_dominate(&matrix, a.rows(), &p));
        }
    }

    #[test]
    fn rationals_round_trip_through_json(num in -50i64..50, den in 1i64..50) {
        let x = rat(num, den);
        let s = serde_json::to_string(&x).unwrap();
        prop_assert!(s.starts_with('"'));
        let back: Rational = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, x);
    }
}

/// `max c·x, Ax ≤ b, x ≥ 0` with positive `A` and `b`, so the program is
/// feasible and bounded and so is its dual `min b·y, Aᵀy ≥ c, y ≥ 0`.
fn primal_and_dual(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> (LinearProgram, LinearProgram) {
    let (rows, cols) = (a.len(), c.len());
    let mut primal = LinearProgram::with_vars(cols, Sense::Maximize);
    primal.set_objective(c.iter().map(|&x| rat(x, 1)).collect());
    for (row, &rhs) in a.iter().zip(b) {
        primal.add_constraint(row.iter().map(|&x| rat(x, 1)).collect(), Relation::Le, rat(rhs, 1));
    }
    let mut dual = LinearProgram::with_vars(rows, Sense::Minimize);
    dual.set_objective(b.iter().map(|&x| rat(x, 1)).collect());
    for (j, &cj) in c.iter().enumerate() {
        dual.add_constraint((0..rows).map(|i| rat(a[i][j], 1)).collect(), Relation::Ge, rat(cj, 1));
    }
    (primal, dual)
}

proptest! {
    #[test]
    fn lp_strong_duality((a, b, c) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, k)| (
        prop::collection::vec(prop::collection::vec(1i64..=5, k), r),
        prop::collection::vec(1i64..=9, r),
        prop::collection::vec(-3i64..=6, k),
    ))) {
        let (primal, dual) = primal_and_dual(&a, &b, &c);
        let (pv, px) = match solve(&primal).unwrap() {
            LpOutcome::Optimal { value, point } => (value, point),
            other => return Err(TestCaseError::fail(format!("{other:?}"))),
        };
        let dv = match solve(&dual).unwrap() {
            LpOutcome::Optimal { value, .. } => value,
            other => return Err(TestCaseError::fail(format!("{other:?}"))),
        };
        prop_assert_eq!(&pv, &dv);
        prop_assert!(primal.is_feasible_point(&px));
        prop_assert_eq!(primal.objective_value(&px), pv);
        prop_assert_eq!(solve(&primal).unwrap(), solve(&primal).unwrap());
    }
}

#[test]
fn mps_envy_free_on_every_two_agent_profile() {
    let orders = mudra::strategy::lexicographic_permutations(4);
    for x in &orders {
        for y in &orders {
            let p = PreferenceProfile::new(Instance::with_sizes(2, 2).unwrap(), vec![x.clone(), y.clone()]).unwrap();
            let a = Rule::Mps.assign(&p).unwrap();
            assert!(is_sd_envy_free(&a, &p).unwrap().holds, "{x:?} {y:?}");
        }
    }
}

#[test]
fn single_unit_mps_is_ops_exhaustively() {
    for n in 1..=4 {
        let orders = mudra::strategy::lexicographic_permutations(n);
        let total = orders.len().pow(n as u32);
        for mut k in 0..total {
            let mut chosen = Vec::new();
            for _ in 0..n {
                chosen.push(orders[k % orders.len()].clone());
                k /= orders.len();
            }
            let p = PreferenceProfile::new(Instance::with_sizes(n, 1).unwrap(), chosen).unwrap();
            assert_eq!(Rule::Mps.assign(&p).unwrap(), ops(&p).unwrap());
        }
    }
}
