//! The efficiency hierarchy: perfection ⇒ SD-efficiency ⇒ ex-post
//! efficiency ⇒ unanimity (the last as a property of rule outputs).
//!
//! SD-efficiency is decided by one LP over all fractional assignments `q`
//! with the same row sums as `p`: require every prefix sum of every agent's
//! row to be at least `p`'s and maximize the total prefix surplus. `p` is
//! SD-efficient iff the optimum surplus is zero; otherwise the optimal `q`
//! dominates `p` and is returned as the certificate.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::guards::Guards;
use crate::model::{DiscreteAssignment, Instance, PreferenceProfile, RandomAssignment};
use crate::order::{prefix_sums, sd_compare, SdVerdict};
use crate::ratlp::{convex_membership, FarkasCertificate, LinearProgram, LpOutcome, Membership, Relation, Sense};
use crate::rational::Rational;
use crate::rules::AssignmentRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EfficiencyProperty {
    Perfect,
    SdEfficiency,
    ExPostEfficiency,
    Unanimity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EfficiencyCertificate {
    /// An assignment that SD-dominates the one checked.
    Dominator { matrix: Vec<Vec<Rational>> },
    /// A lottery over SD-efficient discrete assignments reproducing `p`.
    Lottery { terms: Vec<(Rational, DiscreteAssignment)> },
    /// `p` is outside the hull of `generators`; `farkas` proves it.
    OutsideHull {
        generators: Vec<DiscreteAssignment>,
        farkas: FarkasCertificate,
    },
    /// A perfect assignment exists and differs from what was returned.
    NotPerfect {
        perfect: DiscreteAssignment,
        returned: RandomAssignment,
    },
    /// A perfect assignment exists and is exactly what was returned.
    Perfect { perfect: DiscreteAssignment },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfficiencyVerdict {
    pub property: EfficiencyProperty,
    pub holds: bool,
    pub certificate: Option<EfficiencyCertificate>,
}

impl EfficiencyVerdict {
    fn new(property: EfficiencyProperty, holds: bool, certificate: Option<EfficiencyCertificate>) -> Self {
        EfficiencyVerdict {
            property,
            holds,
            certificate,
        }
    }
}

/// The assignment giving every agent its top `c` objects, when those sets
/// are pairwise disjoint.
pub fn perfect_assignment(profile: &PreferenceProfile) -> Option<DiscreteAssignment> {
    let instance = profile.instance();
    if instance.is_relaxed() {
        return None;
    }
    let bundles: Vec<Vec<usize>> = (0..profile.n())
        .map(|i| profile.top(i, instance.quota()).to_vec())
        .collect();
    DiscreteAssignment::from_bundles(instance.clone(), &bundles).ok()
}

pub fn is_perfect(p: &RandomAssignment, profile: &PreferenceProfile) -> Result<EfficiencyVerdict> {
    check_same_instance(p, profile)?;
    let verdict = match perfect_assignment(profile) {
        Some(perfect) => {
            let holds = perfect.to_matrix() == p.rows();
            let cert = if holds {
                EfficiencyCertificate::Perfect { perfect }
            } else {
                EfficiencyCertificate::NotPerfect {
                    perfect,
                    returned: p.clone(),
                }
            };
            EfficiencyVerdict::new(EfficiencyProperty::Perfect, holds, Some(cert))
        }
        None => EfficiencyVerdict::new(EfficiencyProperty::Perfect, false, None),
    };
    Ok(verdict)
}

/// Every row of `q` weakly SD-dominates the matching row of `p` under its
/// agent's order, and at least one strictly.
pub fn rows_sd_dominate(q: &[Vec<Rational>], p: &[Vec<Rational>], profile: &PreferenceProfile) -> bool {
    let mut strict = false;
    for (i, (qi, pi)) in q.iter().zip(p).enumerate() {
        match sd_compare(qi, pi, profile.order(i)) {
            SdVerdict::Equal => {}
            SdVerdict::FirstStrictlyDominates => strict = true,
            _ => return false,
        }
    }
    strict
}

pub fn sd_dominates(q: &RandomAssignment, p: &RandomAssignment, profile: &PreferenceProfile) -> bool {
    rows_sd_dominate(q.rows(), p.rows(), profile)
}

/// The dominance-search LP for `rows` (whose row sums are `row_sums`).
/// Variable `i*m + o` is `q(i)(o)`. The objective is the sum of all prefix
/// sums of `q`; subtract [`prefix_total`] of `p` to get the surplus.
pub fn sd_improvement_program(rows: &[Vec<Rational>], row_sums: &[Rational], profile: &PreferenceProfile) -> LinearProgram {
    let (n, m) = (profile.n(), profile.m());
    let var = |i: usize, o: usize| i * m + o;
    let mut lp = LinearProgram::new(
        (0..n)
            .flat_map(|i| (0..m).map(move |o| format!("q{i}_{o}")))
            .collect(),
        Sense::Maximize,
    );
    for o in 0..m {
        let mut coeffs = vec![Rational::zero(); n * m];
        for i in 0..n {
            coeffs[var(i, o)] = Rational::one();
        }
        lp.add_constraint(coeffs, Relation::Eq, Rational::one());
    }
    for (i, target) in row_sums.iter().enumerate() {
        let mut coeffs = vec![Rational::zero(); n * m];
        for o in 0..m {
            coeffs[var(i, o)] = Rational::one();
        }
        lp.add_constraint(coeffs, Relation::Eq, target.clone());
    }
    let mut objective = vec![Rational::zero(); n * m];
    for (i, row) in rows.iter().enumerate() {
        let order = profile.order(i);
        let prefixes = prefix_sums(row, order);
        // The full prefix is fixed by the row-sum constraint.
        for k in 0..m.saturating_sub(1) {
            let mut coeffs = vec![Rational::zero(); n * m];
            for &o in &order[..=k] {
                coeffs[var(i, o)] = Rational::one();
            }
            lp.add_constraint(coeffs, Relation::Ge, prefixes[k].clone());
        }
        for (pos, &o) in order.iter().enumerate() {
            objective[var(i, o)] = Rational::from(m - pos);
        }
    }
    lp.set_objective(objective);
    lp
}

pub fn prefix_total(rows: &[Vec<Rational>], profile: &PreferenceProfile) -> Rational {
    rows.iter()
        .enumerate()
        .flat_map(|(i, row)| prefix_sums(row, profile.order(i)))
        .sum()
}

/// Searches for an assignment with the given row sums that SD-dominates
/// `rows`. Returns the dominator, re-verified, or `None` when `rows` is
/// SD-efficient.
pub fn find_sd_dominator(
    rows: &[Vec<Rational>],
    row_sums: &[Rational],
    profile: &PreferenceProfile,
) -> Result<Option<Vec<Vec<Rational>>>> {
    let (n, m) = (profile.n(), profile.m());
    if rows.len() != n || rows.iter().any(|r| r.len() != m) || row_sums.len() != n {
        return Err(Error::Dimension(format!(
            "dominance search needs a {n}x{m} matrix and {n} row sums"
        )));
    }
    let lp = sd_improvement_program(rows, row_sums, profile);
    match lp.solve()? {
        LpOutcome::Optimal { value, point } => {
            let surplus = value - prefix_total(rows, profile);
            if surplus.is_negative() {
                return Err(Error::Internal("negative dominance surplus".into()));
            }
            if surplus.is_zero() {
                return Ok(None);
            }
            let q: Vec<Vec<Rational>> = point.chunks(m).map(<[Rational]>::to_vec).collect();
            if !rows_sd_dominate(&q, rows, profile) {
                return Err(Error::Internal("LP dominator does not re-verify".into()));
            }
            Ok(Some(q))
        }
        // p itself is feasible, so this can only be a bug.
        LpOutcome::Infeasible(_) => Err(Error::Internal("dominance LP infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Internal("dominance LP unbounded".into())),
    }
}

pub fn is_sd_efficient(p: &RandomAssignment, profile: &PreferenceProfile) -> Result<EfficiencyVerdict> {
    check_same_instance(p, profile)?;
    p.instance().require_balanced("SD-efficiency")?;
    let row_sums = vec![p.instance().row_target(); profile.n()];
    Ok(match find_sd_dominator(p.rows(), &row_sums, profile)? {
        None => EfficiencyVerdict::new(EfficiencyProperty::SdEfficiency, true, None),
        Some(matrix) => EfficiencyVerdict::new(
            EfficiencyProperty::SdEfficiency,
            false,
            Some(EfficiencyCertificate::Dominator { matrix }),
        ),
    })
}

/// SD-efficiency of a discrete assignment among assignments with its own
/// bundle sizes (balanced or not).
pub fn is_discrete_sd_efficient(d: &DiscreteAssignment, profile: &PreferenceProfile) -> Result<bool> {
    let sizes: Vec<Rational> = d.bundle_sizes().into_iter().map(Rational::from).collect();
    Ok(find_sd_dominator(&d.to_matrix(), &sizes, profile)?.is_none())
}

/// Number of balanced (`m!/(c!)^n`) or unrestricted (`n^m`) discrete
/// assignments.
pub fn count_discrete(instance: &Instance, balanced: bool) -> BigUint {
    let (n, m, c) = (instance.n(), instance.m(), instance.quota());
    if balanced {
        let fact = |k: usize| (1..=k).fold(BigUint::from(1u32), |acc, x| acc * BigUint::from(x));
        fact(m) / fact(c).pow(n as u32)
    } else {
        BigUint::from(n).pow(m as u32)
    }
}

/// All discrete assignments in lexicographic order of owner vectors.
/// Refuses (rather than truncates) when the count exceeds `cap`.
pub fn enumerate_discrete(instance: &Instance, balanced: bool, cap: u64) -> Result<Vec<DiscreteAssignment>> {
    if balanced {
        instance.require_balanced("balanced enumeration")?;
    }
    let count = count_discrete(instance, balanced);
    if count.to_u64().is_none_or(|k| k > cap) {
        return Err(Error::GuardExceeded {
            what: "discrete assignment enumeration",
            needed: count.to_string(),
            guard: cap,
        });
    }
    let (n, m) = (instance.n(), instance.m());
    let capacity = if balanced { instance.quota() } else { m };
    let mut out = Vec::new();
    let mut owner = Vec::with_capacity(m);
    let mut load = vec![0usize; n];

    fn rec(
        instance: &Instance,
        capacity: usize,
        owner: &mut Vec<usize>,
        load: &mut [usize],
        out: &mut Vec<DiscreteAssignment>,
    ) {
        if owner.len() == instance.m() {
            out.push(DiscreteAssignment::new(instance.clone(), owner.clone()).expect("valid owner map"));
            return;
        }
        for a in 0..instance.n() {
            if load[a] < capacity {
                load[a] += 1;
                owner.push(a);
                rec(instance, capacity, owner, load, out);
                owner.pop();
                load[a] -= 1;
            }
        }
    }

    rec(instance, capacity, &mut owner, &mut load, &mut out);
    Ok(out)
}

/// The SD-efficient discrete assignments: balanced only, or every owner map
/// when `allow_unbalanced` (each judged against its own bundle sizes).
pub fn sd_efficient_discrete(
    profile: &PreferenceProfile,
    allow_unbalanced: bool,
    cap: u64,
) -> Result<Vec<DiscreteAssignment>> {
    profile.instance().require_balanced("ex-post efficiency")?;
    let candidates = enumerate_discrete(profile.instance(), !allow_unbalanced, cap)?;
    let flags = candidates
        .par_iter()
        .map(|d| is_discrete_sd_efficient(d, profile))
        .collect::<Result<Vec<bool>>>()?;
    Ok(candidates
        .into_iter()
        .zip(flags)
        .filter_map(|(d, keep)| keep.then_some(d))
        .collect())
}

/// Ex-post efficiency of `p` against a precomputed set of SD-efficient
/// discrete assignments.
pub fn ex_post_against(p: &RandomAssignment, efficient: &[DiscreteAssignment]) -> Result<EfficiencyVerdict> {
    let generators: Vec<Vec<Rational>> = efficient
        .iter()
        .map(|d| d.to_matrix().into_iter().flatten().collect())
        .collect();
    Ok(match convex_membership(&p.flatten(), &generators)? {
        Membership::InHull(weights) => {
            let terms = weights
                .into_iter()
                .zip(efficient)
                .filter(|(w, _)| w.is_positive())
                .map(|(w, d)| (w, d.clone()))
                .collect();
            EfficiencyVerdict::new(
                EfficiencyProperty::ExPostEfficiency,
                true,
                Some(EfficiencyCertificate::Lottery { terms }),
            )
        }
        Membership::NotInHull(farkas) => EfficiencyVerdict::new(
            EfficiencyProperty::ExPostEfficiency,
            false,
            Some(EfficiencyCertificate::OutsideHull {
                generators: efficient.to_vec(),
                farkas,
            }),
        ),
    })
}

pub fn is_ex_post_efficient(
    p: &RandomAssignment,
    profile: &PreferenceProfile,
    allow_unbalanced: bool,
    guards: &Guards,
) -> Result<EfficiencyVerdict> {
    check_same_instance(p, profile)?;
    let efficient = sd_efficient_discrete(profile, allow_unbalanced, guards.discrete)?;
    ex_post_against(p, &efficient)
}

/// Writes `p` as a lottery over balanced discrete assignments supported on
/// `p`'s positive entries.
///
/// Each round finds a perfect capacitated matching on the support (every
/// agent takes `c` objects), removes it with the largest weight that keeps
/// the residual nonnegative, and repeats. Each round zeroes at least one
/// entry, so there are at most `n*m` terms.
pub fn decompose_lottery(p: &RandomAssignment) -> Result<Vec<(Rational, DiscreteAssignment)>> {
    let instance = p.instance();
    instance.require_balanced("lottery decomposition")?;
    let (n, m, c) = (instance.n(), instance.m(), instance.quota());
    let mut residual = p.rows().to_vec();
    let mut mass = Rational::one();
    let mut terms = Vec::new();
    while mass.is_positive() {
        let support: Vec<Vec<bool>> = residual
            .iter()
            .map(|row| row.iter().map(Rational::is_positive).collect())
            .collect();
        let owner = capacitated_matching(&support, n, m, c)
            .ok_or_else(|| Error::Internal("no balanced assignment on the residual support".into()))?;
        let weight = owner
            .iter()
            .enumerate()
            .map(|(o, &a)| residual[a][o].clone())
            .min()
            .ok_or_else(|| Error::Internal("empty assignment".into()))?;
        for (o, &a) in owner.iter().enumerate() {
            residual[a][o] -= &weight;
        }
        mass -= &weight;
        terms.push((weight, DiscreteAssignment::new(instance.clone(), owner)?));
    }
    if residual.iter().flatten().any(|x| !x.is_zero()) {
        return Err(Error::Internal("lottery residual not exhausted".into()));
    }
    Ok(terms)
}

/// Assigns every object to an agent with `support[agent][object]`, each
/// agent receiving exactly `c` objects (`m = n*c`). Kuhn-style augmenting
/// paths over agent slots.
fn capacitated_matching(support: &[Vec<bool>], n: usize, m: usize, c: usize) -> Option<Vec<usize>> {
    fn augment(
        o: usize,
        support: &[Vec<bool>],
        c: usize,
        held: &mut [Vec<usize>],
        owner: &mut [usize],
        visited: &mut [bool],
    ) -> bool {
        for a in 0..held.len() {
            if !support[a][o] || visited[a] {
                continue;
            }
            visited[a] = true;
            if held[a].len() < c {
                held[a].push(o);
                owner[o] = a;
                return true;
            }
            for k in 0..held[a].len() {
                let other = held[a][k];
                if augment(other, support, c, held, owner, visited) {
                    held[a][k] = o;
                    owner[o] = a;
                    return true;
                }
            }
        }
        false
    }

    let mut held = vec![Vec::with_capacity(c); n];
    let mut owner = vec![usize::MAX; m];
    for o in 0..m {
        let mut visited = vec![false; n];
        if !augment(o, support, c, &mut held, &mut owner, &mut visited) {
            return None;
        }
    }
    Some(owner)
}

/// If a perfect assignment exists, the rule must return it; otherwise the
/// property holds vacuously.
pub fn check_unanimity(rule: &(impl AssignmentRule + ?Sized), profile: &PreferenceProfile) -> Result<EfficiencyVerdict> {
    profile.instance().require_balanced("unanimity")?;
    let p = rule.assign(profile)?;
    unanimity_of(&p, profile)
}

/// Unanimity judged on an already computed outcome `p` of `profile`.
pub fn unanimity_of(p: &RandomAssignment, profile: &PreferenceProfile) -> Result<EfficiencyVerdict> {
    check_same_instance(p, profile)?;
    Ok(match perfect_assignment(profile) {
        None => EfficiencyVerdict::new(EfficiencyProperty::Unanimity, true, None),
        Some(perfect) => {
            let holds = perfect.to_matrix() == p.rows();
            let cert = if holds {
                EfficiencyCertificate::Perfect { perfect }
            } else {
                EfficiencyCertificate::NotPerfect {
                    perfect,
                    returned: p.clone(),
                }
            };
            EfficiencyVerdict::new(EfficiencyProperty::Unanimity, holds, Some(cert))
        }
    })
}

fn check_same_instance(p: &RandomAssignment, profile: &PreferenceProfile) -> Result<()> {
    if p.instance() != profile.instance() {
        return Err(Error::Dimension(
            "assignment and profile are over different instances".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn profile(orders: &[&[&str]]) -> PreferenceProfile {
        PreferenceProfile::from_names(&["o1", "o2", "o3", "o4"], 2, orders).unwrap()
    }

    fn assignment(p: &PreferenceProfile, rows: &[[(i64, i64); 4]]) -> RandomAssignment {
        RandomAssignment::new(
            p.instance().clone(),
            rows.iter()
                .map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn perfect_assignment_cases() {
        let disjoint = profile(&[&["o1", "o2", "o3", "o4"], &["o3", "o4", "o1", "o2"]]);
        let d = perfect_assignment(&disjoint).unwrap();
        assert_eq!(d.bundle(0), vec![0, 1]);
        assert_eq!(d.bundle(1), vec![2, 3]);
        let clash = profile(&[&["o1", "o2", "o3", "o4"], &["o2", "o1", "o3", "o4"]]);
        assert!(perfect_assignment(&clash).is_none());
        let solo = PreferenceProfile::from_names(&["x", "y"], 2, &[&["y", "x"]]).unwrap();
        assert_eq!(perfect_assignment(&solo).unwrap().bundle(0), vec![0, 1]);
    }

    #[test]
    fn enumeration_counts() {
        let inst = Instance::with_sizes(2, 2).unwrap();
        assert_eq!(enumerate_discrete(&inst, true, 1000).unwrap().len(), 6);
        assert_eq!(enumerate_discrete(&inst, false, 1000).unwrap().len(), 16);
        let one = Instance::with_sizes(1, 3).unwrap();
        assert_eq!(enumerate_discrete(&one, true, 1000).unwrap().len(), 1);
        assert!(matches!(
            enumerate_discrete(&inst, false, 15),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_is_sorted_and_balanced() {
        let inst = Instance::with_sizes(3, 2).unwrap();
        let all = enumerate_discrete(&inst, true, 1000).unwrap();
        assert_eq!(all.len(), 90);
        assert!(all.windows(2).all(|w| w[0].owners() < w[1].owners()));
        assert!(all.iter().all(DiscreteAssignment::is_balanced));
    }

    #[test]
    fn dominance_between_proof_matrices() {
        let p = profile(&[&["o1", "o2", "o3", "o4"], &["o3", "o2", "o4", "o1"]]);
        let q = assignment(&p, &[[(1, 1), (1, 1), (0, 1), (0, 1)], [(0, 1), (0, 1), (1, 1), (1, 1)]]);
        let r = assignment(&p, &[[(1, 1), (0, 1), (1, 1), (0, 1)], [(0, 1), (1, 1), (0, 1), (1, 1)]]);
        assert!(sd_dominates(&q, &r, &p));
        assert!(!sd_dominates(&r, &q, &p));
        assert!(!sd_dominates(&q, &q, &p));
    }

    #[test]
    fn capacitated_matching_respects_support() {
        let support = vec![vec![true, true, false, false], vec![true, true, true, true]];
        let owner = capacitated_matching(&support, 2, 4, 2).unwrap();
        assert_eq!(owner, vec![0, 0, 1, 1]);
        let impossible = vec![vec![true, false, false, false], vec![true, true, true, true]];
        assert!(capacitated_matching(&impossible, 2, 4, 2).is_none());
    }

    #[test]
    fn relaxed_instances_are_rejected() {
        let inst = Instance::relaxed(vec!["1".into(), "2".into()], vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let p = PreferenceProfile::new(inst.clone(), vec![vec![0, 1, 2], vec![2, 1, 0]]).unwrap();
        let u = RandomAssignment::uniform(&inst);
        assert!(matches!(is_sd_efficient(&u, &p), Err(Error::RelaxedUnsupported(_))));
        assert!(decompose_lottery(&u).is_err());
    }
}
