//! Assignment rules: uniform, priority (serial dictatorship), random
//! priority, and the two simultaneous-eating rules OPS and MPS.
//!
//! Both eating rules share [`simulate_eating`]. Every agent eats each object
//! in its current eating set at speed 1, so an agent eating `k` objects
//! consumes `k` units per unit of time. The set is chosen by a
//! [`DemandPolicy`]; OPS uses `TopK(1)` and MPS uses `TopK(c)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{DiscreteAssignment, Instance, Permutation, PreferenceProfile, RandomAssignment};
use crate::rational::Rational;

/// Default cap on the number of agents for exact random priority (`n!`
/// serial dictatorships are enumerated).
pub const DEFAULT_RP_AGENT_CAP: usize = 8;

/// Chooses which objects an agent eats, given its order and which objects
/// still have a positive remaining amount.
pub trait DemandPolicy: Sync {
    fn select(&self, order: &[usize], available: &[bool], rem: usize) -> Vec<usize>;
}

/// Eat the `min(k, rem)` most preferred available objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopK(pub usize);

impl DemandPolicy for TopK {
    fn select(&self, order: &[usize], available: &[bool], rem: usize) -> Vec<usize> {
        order
            .iter()
            .copied()
            .filter(|&o| available[o])
            .take(self.0.min(rem))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    pub start: Rational,
    pub end: Rational,
    /// `eating[i]` is the set agent `i` eats during the phase, in its
    /// preference order.
    pub eating: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EatingTrace {
    pub phases: Vec<Phase>,
    pub assignment: RandomAssignment,
}

impl EatingTrace {
    /// Phase end times (the breakpoints), strictly increasing.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.phases.iter().map(|p| p.end.clone()).collect()
    }

    pub fn end_time(&self) -> Rational {
        self.phases.last().map(|p| p.end.clone()).unwrap_or_default()
    }
}

/// Runs simultaneous eating to completion in exact arithmetic.
///
/// Each phase lasts until the first eaten object runs out: the minimum over
/// eaten objects of remaining amount divided by number of eaters. Eating
/// sets are recomputed once per breakpoint, so several objects exhausted at
/// the same instant produce a single breakpoint and no zero-length phase.
pub fn simulate_eating(profile: &PreferenceProfile, policy: &dyn DemandPolicy) -> Result<EatingTrace> {
    let instance = profile.instance();
    let (n, m) = (instance.n(), instance.m());
    let mut remaining = vec![Rational::one(); m];
    let mut rows = vec![vec![Rational::zero(); m]; n];
    let mut phases = Vec::new();
    let mut now = Rational::zero();

    loop {
        let available: Vec<bool> = remaining.iter().map(Rational::is_positive).collect();
        let rem = available.iter().filter(|&&a| a).count();
        if rem == 0 {
            break;
        }
        let eating: Vec<Vec<usize>> = (0..n)
            .map(|i| policy.select(profile.order(i), &available, rem))
            .collect();
        let mut eaters = vec![0usize; m];
        for &o in eating.iter().flatten() {
            if !available[o] {
                return Err(Error::Internal(format!("policy chose exhausted object {o}")));
            }
            eaters[o] += 1;
        }
        let duration = (0..m)
            .filter(|&o| eaters[o] > 0)
            .map(|o| &remaining[o] / Rational::from(eaters[o]))
            .min()
            .ok_or_else(|| Error::Internal("no object is being eaten".into()))?;

        for (row, set) in rows.iter_mut().zip(&eating) {
            for &o in set {
                row[o] += &duration;
            }
        }
        for o in (0..m).filter(|&o| eaters[o] > 0) {
            remaining[o] -= Rational::from(eaters[o]) * &duration;
        }
        let end = &now + &duration;
        phases.push(Phase {
            start: std::mem::replace(&mut now, end.clone()),
            end,
            eating,
        });
    }

    let assignment = RandomAssignment::new(instance.clone(), rows)?;
    Ok(EatingTrace { phases, assignment })
}

/// Multi-unit-eating PS: every agent eats its `min(c, rem)` most preferred
/// available objects at once.
pub fn mps(profile: &PreferenceProfile) -> Result<RandomAssignment> {
    Ok(mps_trace(profile)?.assignment)
}

pub fn mps_trace(profile: &PreferenceProfile) -> Result<EatingTrace> {
    simulate_eating(profile, &TopK(profile.instance().quota()))
}

/// One-at-a-time PS: every agent eats its single most preferred available
/// object until all objects are gone.
pub fn ops(profile: &PreferenceProfile) -> Result<RandomAssignment> {
    Ok(ops_trace(profile)?.assignment)
}

pub fn ops_trace(profile: &PreferenceProfile) -> Result<EatingTrace> {
    simulate_eating(profile, &TopK(1))
}

pub fn uniform(instance: &Instance) -> RandomAssignment {
    RandomAssignment::uniform(instance)
}

/// Agents pick in `picking_order` (a sequence of agent indices), each taking
/// its `c` most preferred remaining objects.
pub fn serial_dictator(profile: &PreferenceProfile, picking_order: &Permutation) -> Result<DiscreteAssignment> {
    let instance = profile.instance();
    instance.require_balanced("serial dictatorship")?;
    if picking_order.len() != instance.n() {
        return Err(Error::NotBijection(format!(
            "picking order over {} agents for {} agents",
            picking_order.len(),
            instance.n()
        )));
    }
    let mut owner = vec![usize::MAX; instance.m()];
    for &agent in picking_order.as_slice() {
        let picks: Vec<usize> = profile
            .order(agent)
            .iter()
            .copied()
            .filter(|&o| owner[o] == usize::MAX)
            .take(instance.quota())
            .collect();
        for o in picks {
            owner[o] = agent;
        }
    }
    DiscreteAssignment::new(instance.clone(), owner)
}

/// Exact random priority: the average of all `n!` serial dictatorships.
pub fn random_priority(profile: &PreferenceProfile, agent_cap: usize) -> Result<RandomAssignment> {
    let instance = profile.instance();
    instance.require_balanced("random priority")?;
    let n = instance.n();
    if n > agent_cap || n > 20 {
        return Err(Error::RandomPriorityInfeasible {
            agents: n,
            cap: agent_cap.min(20),
        });
    }
    let mut counts = vec![vec![0u64; instance.m()]; n];
    let mut total = 0u64;
    for order in Permutation::all(n) {
        let d = serial_dictator(profile, &order)?;
        for (o, &a) in d.owners().iter().enumerate() {
            counts[a][o] += 1;
        }
        total += 1;
    }
    let total = Rational::from_bigint(BigInt::from(total));
    let rows = counts
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|k| Rational::from_bigint(BigInt::from(k)) / &total)
                .collect()
        })
        .collect();
    RandomAssignment::new(instance.clone(), rows)
}

/// Anything mapping a preference profile to a random assignment.
pub trait AssignmentRule: Sync {
    fn name(&self) -> String;
    fn assign(&self, profile: &PreferenceProfile) -> Result<RandomAssignment>;
}

/// The five rules compared throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Uniform,
    /// Serial dictatorship with a fixed picking order; `None` means agents
    /// pick in index order `1, …, n`.
    Priority(Option<Permutation>),
    RandomPriority { agent_cap: usize },
    Ops,
    Mps,
}

impl Rule {
    pub fn random_priority() -> Self {
        Rule::RandomPriority {
            agent_cap: DEFAULT_RP_AGENT_CAP,
        }
    }

    /// The rules in table order: uniform, priority, RP, OPS, MPS.
    pub fn all() -> Vec<Rule> {
        vec![
            Rule::Uniform,
            Rule::Priority(None),
            Rule::random_priority(),
            Rule::Ops,
            Rule::Mps,
        ]
    }

    pub fn key(&self) -> &'static str {
        match self {
            Rule::Uniform => "uniform",
            Rule::Priority(_) => "priority",
            Rule::RandomPriority { .. } => "rp",
            Rule::Ops => "ops",
            Rule::Mps => "mps",
        }
    }

    pub fn is_eating_rule(&self) -> bool {
        matches!(self, Rule::Ops | Rule::Mps)
    }

    /// The eating trace, for the eating rules only.
    pub fn trace(&self, profile: &PreferenceProfile) -> Option<Result<EatingTrace>> {
        match self {
            Rule::Ops => Some(ops_trace(profile)),
            Rule::Mps => Some(mps_trace(profile)),
            _ => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Rule::Uniform),
            "priority" | "sd" | "serial-dictator" => Ok(Rule::Priority(None)),
            "rp" | "random-priority" => Ok(Rule::random_priority()),
            "ops" => Ok(Rule::Ops),
            "mps" | "ps" => Ok(Rule::Mps),
            other => Err(format!(
                "unknown rule {other:?} (expected uniform, priority, rp, ops or mps)"
            )),
        }
    }
}

impl AssignmentRule for Rule {
    fn name(&self) -> String {
        self.key().to_string()
    }

    fn assign(&self, profile: &PreferenceProfile) -> Result<RandomAssignment> {
        match self {
            Rule::Uniform => Ok(uniform(profile.instance())),
            Rule::Priority(order) => {
                let order = order
                    .clone()
                    .unwrap_or_else(|| Permutation::identity(profile.n()));
                serial_dictator(profile, &order)?.to_random()
            }
            Rule::RandomPriority { agent_cap } => random_priority(profile, *agent_cap),
            Rule::Ops => ops(profile),
            Rule::Mps => mps(profile),
        }
    }
}

impl<R: AssignmentRule + ?Sized> AssignmentRule for &R {
    fn name(&self) -> String {
        (**self).name()
    }

    fn assign(&self, profile: &PreferenceProfile) -> Result<RandomAssignment> {
        (**self).assign(profile)
    }
}

impl Serialize for EatingTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let instance = self.assignment.instance();

        struct Sets<'a>(&'a Instance, &'a [Vec<usize>]);
        impl Serialize for Sets<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.1.len()))?;
                for (agent, set) in self.0.agents().iter().zip(self.1) {
                    let names: Vec<&str> =
                        set.iter().map(|&o| self.0.objects()[o].as_str()).collect();
                    map.serialize_entry(agent, &names)?;
                }
                map.end()
            }
        }

        struct PhaseOut<'a>(&'a Instance, &'a Phase);
        impl Serialize for PhaseOut<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut st = s.serialize_struct("Phase", 3)?;
                st.serialize_field("start", &self.1.start)?;
                st.serialize_field("end", &self.1.end)?;
                st.serialize_field("eating", &Sets(self.0, &self.1.eating))?;
                st.end()
            }
        }

        let phases: Vec<PhaseOut> = self.phases.iter().map(|p| PhaseOut(instance, p)).collect();
        let mut st = serializer.serialize_struct("EatingTrace", 2)?;
        st.serialize_field("phases", &phases)?;
        st.serialize_field("breakpoints", &self.breakpoints())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn figure1() -> PreferenceProfile {
        PreferenceProfile::from_names(
            &["o1", "o2", "o3", "o4"],
            2,
            &[&["o1", "o2", "o3", "o4"], &["o3", "o2", "o4", "o1"]],
        )
        .unwrap()
    }

    fn matrix(rows: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect())
            .collect()
    }

    #[test]
    fn top_k_takes_best_available() {
        let available = [true, false, true, true];
        assert_eq!(TopK(2).select(&[1, 0, 2, 3], &available, 3), vec![0, 2]);
        assert_eq!(TopK(2).select(&[3, 1, 0, 2], &[false, false, false, true], 1), vec![3]);
    }

    #[test]
    fn mps_figure1_trace() {
        let trace = mps_trace(&figure1()).unwrap();
        assert_eq!(
            trace.breakpoints(),
            vec![rat(1, 2), rat(3, 4), rat(7, 8), rat(9, 8)]
        );
        assert_eq!(trace.phases[0].eating, vec![vec![0, 1], vec![2, 1]]);
        assert_eq!(trace.phases[1].eating, vec![vec![0, 2], vec![2, 3]]);
        assert_eq!(trace.phases[2].eating, vec![vec![0, 3], vec![3, 0]]);
        assert_eq!(trace.phases[3].eating, vec![vec![3], vec![3]]);
        assert_eq!(
            trace.assignment.rows(),
            matrix(&[
                &[(7, 8), (4, 8), (2, 8), (3, 8)],
                &[(1, 8), (4, 8), (6, 8), (5, 8)]
            ])
        );
    }

    #[test]
    fn serial_dictator_both_orders() {
        let p = figure1();
        let d = serial_dictator(&p, &Permutation::identity(2)).unwrap();
        assert_eq!(d.bundle(0), vec![0, 1]);
        assert_eq!(d.bundle(1), vec![2, 3]);
        let d = serial_dictator(&p, &Permutation::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(d.bundle(1), vec![1, 2]);
        assert_eq!(d.bundle(0), vec![0, 3]);
    }

    #[test]
    fn random_priority_respects_cap() {
        let p = figure1();
        let err = random_priority(&p, 1).unwrap_err();
        assert!(matches!(err, Error::RandomPriorityInfeasible { agents: 2, cap: 1 }));
    }

    #[test]
    fn relaxed_instance_eats_ceil_quota() {
        let instance = Instance::relaxed(
            vec!["1".into(), "2".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        assert_eq!(instance.quota(), 2);
        let p = PreferenceProfile::new(instance, vec![vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        let trace = mps_trace(&p).unwrap();
        for row in trace.assignment.rows() {
            assert_eq!(row.iter().sum::<Rational>(), rat(3, 2));
        }
        assert!(serial_dictator(&p, &Permutation::identity(2)).is_err());
    }

    #[test]
    fn rule_names_parse() {
        for rule in Rule::all() {
            assert_eq!(rule.key().parse::<Rule>().unwrap(), rule);
        }
        assert!("nope".parse::<Rule>().is_err());
    }
}
