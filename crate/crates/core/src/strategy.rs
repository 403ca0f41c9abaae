//! Exhaustive manipulation search.
//!
//! Misreports are scanned in lexicographic order of object-index sequences
//! and coalitions by size, then lexicographically, so the first witness is
//! the same on every run and for every worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::guards::Guards;
use crate::model::{PreferenceProfile, RandomAssignment};
use crate::order::{dl_compare, sd_strictly_prefers, sd_weakly_prefers, DlVerdict};
use crate::rules::AssignmentRule;

/// What a misreport must achieve to count as a manipulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManipulationKind {
    /// The truthful outcome fails to weakly SD-dominate the misreport's
    /// (violates SD-strategyproofness).
    SdStrategyproofness,
    /// The misreport's outcome strictly SD-dominates the truthful one
    /// (violates weak SD-strategyproofness).
    WeakSdStrategyproofness,
    /// The misreport's outcome is DL-better (violates DL-strategyproofness).
    DlStrategyproofness,
    /// Every coalition member's outcome strictly SD-dominates its truthful
    /// one (violates weak SD-group-strategyproofness).
    WeakSdGroupStrategyproofness,
}

impl ManipulationKind {
    /// Whether moving from `truthful` to `reported` is a gain of this kind
    /// under the agent's true `order`.
    pub fn gains(self, truthful: &[crate::Rational], reported: &[crate::Rational], order: &[usize]) -> bool {
        match self {
            ManipulationKind::SdStrategyproofness => !sd_weakly_prefers(truthful, reported, order),
            ManipulationKind::WeakSdStrategyproofness | ManipulationKind::WeakSdGroupStrategyproofness => {
                sd_strictly_prefers(reported, truthful, order)
            }
            ManipulationKind::DlStrategyproofness => dl_compare(reported, truthful, order) == DlVerdict::First,
        }
    }
}

/// A verified manipulation: the coalition reports `reported` instead of
/// `truthful` and each member gains in the sense of `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Manipulation {
    pub kind: ManipulationKind,
    pub rule: String,
    pub coalition: Vec<usize>,
    pub truthful: PreferenceProfile,
    pub reported: PreferenceProfile,
    pub truthful_outcome: RandomAssignment,
    pub manipulated_outcome: RandomAssignment,
}

impl Manipulation {
    /// The misreported orders, one per coalition member.
    pub fn misreports(&self) -> Vec<&[usize]> {
        self.coalition.iter().map(|&i| self.reported.order(i)).collect()
    }

    /// Recomputes both outcomes with `rule` and re-checks the gain for
    /// every coalition member.
    pub fn verify(&self, rule: &(impl AssignmentRule + ?Sized)) -> Result<bool> {
        let truthful = rule.assign(&self.truthful)?;
        let manipulated = rule.assign(&self.reported)?;
        if truthful != self.truthful_outcome || manipulated != self.manipulated_outcome {
            return Ok(false);
        }
        let untouched = (0..self.truthful.n())
            .filter(|i| !self.coalition.contains(i))
            .all(|i| self.truthful.order(i) == self.reported.order(i));
        Ok(untouched
            && !self.coalition.is_empty()
            && self.coalition.iter().all(|&i| {
                self.kind
                    .gains(truthful.row(i), manipulated.row(i), self.truthful.order(i))
            }))
    }
}

/// All permutations of `0..len` in lexicographic order.
pub fn lexicographic_permutations(len: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..len).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Every strict order over `m` objects, refusing when `m > max_objects`.
pub fn all_strict_orders(m: usize, max_objects: usize) -> Result<Vec<Vec<usize>>> {
    if m > max_objects {
        return Err(Error::GuardExceeded {
            what: "misreport enumeration",
            needed: format!("{m}! orders"),
            guard: max_objects as u64,
        });
    }
    Ok(lexicographic_permutations(m))
}

pub fn find_sd_manipulation(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    agent: usize,
) -> Result<Option<Manipulation>> {
    find_manipulation(rule, profile, agent, ManipulationKind::SdStrategyproofness, &Guards::default())
}

pub fn find_weak_sd_manipulation(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    agent: usize,
) -> Result<Option<Manipulation>> {
    find_manipulation(rule, profile, agent, ManipulationKind::WeakSdStrategyproofness, &Guards::default())
}

pub fn find_dl_manipulation(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    agent: usize,
) -> Result<Option<Manipulation>> {
    find_manipulation(rule, profile, agent, ManipulationKind::DlStrategyproofness, &Guards::default())
}

/// The first misreport (lexicographically) by `agent` that gains in the
/// sense of `kind`. Group kinds are treated as a singleton coalition.
pub fn find_manipulation(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    agent: usize,
    kind: ManipulationKind,
    guards: &Guards,
) -> Result<Option<Manipulation>> {
    check_agent(profile, agent)?;
    let truthful = rule.assign(profile)?;
    find_manipulation_from(rule, profile, &truthful, agent, kind, guards)
}

/// As [`find_manipulation`] with the truthful outcome already computed.
pub fn find_manipulation_from(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    truthful: &RandomAssignment,
    agent: usize,
    kind: ManipulationKind,
    guards: &Guards,
) -> Result<Option<Manipulation>> {
    check_agent(profile, agent)?;
    let orders = all_strict_orders(profile.m(), guards.order_objects)?;
    let true_order = profile.order(agent);
    orders
        .par_iter()
        .find_map_first(|order| {
            let attempt = || -> Result<Option<Manipulation>> {
                let reported = profile.with_order(agent, order.clone())?;
                let outcome = rule.assign(&reported)?;
                if !kind.gains(truthful.row(agent), outcome.row(agent), true_order) {
                    return Ok(None);
                }
                Ok(Some(Manipulation {
                    kind,
                    rule: rule.name(),
                    coalition: vec![agent],
                    truthful: profile.clone(),
                    reported,
                    truthful_outcome: truthful.clone(),
                    manipulated_outcome: outcome,
                }))
            };
            attempt().transpose()
        })
        .transpose()
}

/// The first joint misreport by `coalition` after which every member's
/// outcome strictly SD-dominates its truthful one. Joint misreports are
/// ordered lexicographically by the members' orders, lowest index first.
pub fn find_group_manipulation(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    coalition: &[usize],
    guards: &Guards,
) -> Result<Option<Manipulation>> {
    let truthful = rule.assign(profile)?;
    find_group_manipulation_from(rule, profile, &truthful, coalition, guards)
}

pub fn find_group_manipulation_from(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    truthful: &RandomAssignment,
    coalition: &[usize],
    guards: &Guards,
) -> Result<Option<Manipulation>> {
    let mut members = coalition.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() || members.len() != coalition.len() {
        return Err(Error::InvalidProfile(format!(
            "coalition {coalition:?} must be nonempty without repeats"
        )));
    }
    for &i in &members {
        check_agent(profile, i)?;
    }
    let orders = all_strict_orders(profile.m(), guards.order_objects)?;
    let k = orders.len() as u64;
    let total = (0..members.len()).try_fold(1u64, |acc, _| acc.checked_mul(k));
    let total = match total {
        Some(t) if t <= guards.joint => t,
        _ => {
            return Err(Error::GuardExceeded {
                what: "joint misreport enumeration",
                needed: format!("{k}^{}", members.len()),
                guard: guards.joint,
            })
        }
    };
    let kind = ManipulationKind::WeakSdGroupStrategyproofness;
    (0..total)
        .into_par_iter()
        .find_map_first(|index| {
            let attempt = || -> Result<Option<Manipulation>> {
                // Mixed radix, first member most significant.
                let mut digits = vec![0usize; members.len()];
                let mut rest = index;
                for d in digits.iter_mut().rev() {
                    *d = (rest % k) as usize;
                    rest /= k;
                }
                let mut reported = profile.clone();
                for (&i, &d) in members.iter().zip(&digits) {
                    reported = reported.with_order(i, orders[d].clone())?;
                }
                let outcome = rule.assign(&reported)?;
                let all_gain = members
                    .iter()
                    .all(|&i| kind.gains(truthful.row(i), outcome.row(i), profile.order(i)));
                if !all_gain {
                    return Ok(None);
                }
                Ok(Some(Manipulation {
                    kind,
                    rule: rule.name(),
                    coalition: members.clone(),
                    truthful: profile.clone(),
                    reported,
                    truthful_outcome: truthful.clone(),
                    manipulated_outcome: outcome,
                }))
            };
            attempt().transpose()
        })
        .transpose()
}

/// Coalitions of `0..n` with sizes in `sizes`, by size then
/// lexicographically.
pub fn coalitions(n: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, size, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    for size in sizes.filter(|&s| s >= 1 && s <= n) {
        rec(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Searches every coalition of at least two agents, smallest first.
pub fn find_any_group_manipulation(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    guards: &Guards,
) -> Result<Option<Manipulation>> {
    let truthful = rule.assign(profile)?;
    for coalition in coalitions(profile.n(), 2..=profile.n()) {
        if let Some(found) = find_group_manipulation_from(rule, profile, &truthful, &coalition, guards)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn check_agent(profile: &PreferenceProfile, agent: usize) -> Result<()> {
    if agent >= profile.n() {
        return Err(Error::Dimension(format!(
            "agent index {agent} out of range for {} agents",
            profile.n()
        )));
    }
    Ok(())
}
