//! The rule-by-property comparison table, reproduced by exhaustive sweeps.
//!
//! Every '+' cell must survive the full primary sweep; every '−' cell must
//! produce a concrete, re-verified counterexample. When the primary domain
//! holds no counterexample for a '−' cell, the secondary domain (single-unit
//! demand) is searched in canonical order until the first one. Anything else
//! is reported as a discrepancy.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use mudra::efficiency::{
    ex_post_against, is_sd_efficient, perfect_assignment, rows_sd_dominate, sd_efficient_discrete, unanimity_of,
    EfficiencyCertificate, EfficiencyVerdict,
};
use mudra::error::{Error, Result};
use mudra::fairness::{check_anonymity, check_neutrality, is_sd_envy_free, is_weak_sd_envy_free, AxiomVerdict, FairnessVerdict};
use mudra::ratlp::membership_program;
use mudra::strategy::{all_strict_orders, find_manipulation_from, Manipulation, ManipulationKind};
use mudra::{AssignmentRule, Guards, Permutation, PreferenceProfile, RandomAssignment, Relabel, Rule};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{DomainSpec, ProfileSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    SdEfficiency,
    ExPost,
    Unanimity,
    SdEf,
    WeakSdEf,
    Anonymity,
    Neutrality,
    SdSp,
    DlSp,
    WeakSdSp,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::SdEfficiency,
        Property::ExPost,
        Property::Unanimity,
        Property::SdEf,
        Property::WeakSdEf,
        Property::Anonymity,
        Property::Neutrality,
        Property::SdSp,
        Property::DlSp,
        Property::WeakSdSp,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Property::SdEfficiency => "sd-efficiency",
            Property::ExPost => "ex-post",
            Property::Unanimity => "unanimity",
            Property::SdEf => "sd-ef",
            Property::WeakSdEf => "weak-sd-ef",
            Property::Anonymity => "anonymity",
            Property::Neutrality => "neutrality",
            Property::SdSp => "sd-sp",
            Property::DlSp => "dl-sp",
            Property::WeakSdSp => "weak-sd-sp",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn manipulation_kind(self) -> Option<ManipulationKind> {
        match self {
            Property::SdSp => Some(ManipulationKind::SdStrategyproofness),
            Property::DlSp => Some(ManipulationKind::DlStrategyproofness),
            Property::WeakSdSp => Some(ManipulationKind::WeakSdStrategyproofness),
            _ => None,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The published sign for `rule` and `property`.
pub fn expected_sign(rule: &Rule, property: Property) -> Sign {
    use Sign::{Minus as M, Plus as P};
    // Columns: uniform, priority, rp, ops, mps.
    let row = match property {
        Property::SdEfficiency => [M, P, M, P, M],
        Property::ExPost => [M, P, P, P, M],
        Property::Unanimity => [M, P, P, P, P],
        Property::SdEf => [P, M, M, P, P],
        Property::WeakSdEf => [P, M, P, P, P],
        Property::Anonymity => [P, M, P, P, P],
        Property::Neutrality => [P, P, P, P, P],
        Property::SdSp => [P, P, P, M, M],
        Property::DlSp => [P, P, P, M, P],
        Property::WeakSdSp => [P, P, P, M, P],
    };
    let col = match rule {
        Rule::Uniform => 0,
        Rule::Priority(_) => 1,
        Rule::RandomPriority { .. } => 2,
        Rule::Ops => 3,
        Rule::Mps => 4,
    };
    row[col]
}

/// Why a rule fails a property at one profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Efficiency(EfficiencyVerdict),
    Envy(FairnessVerdict),
    Equivariance { axiom: Property, verdict: AxiomVerdict },
    Manipulation(Box<Manipulation>),
}

impl Evidence {
    /// Replays the evidence against freshly computed values.
    pub fn verify(&self, rule: &Rule, profile: &PreferenceProfile, guards: &Guards) -> Result<bool> {
        let outcome = rule.assign(profile)?;
        Ok(match self {
            Evidence::Efficiency(v) => match &v.certificate {
                Some(EfficiencyCertificate::Dominator { matrix }) => {
                    RandomAssignment::new(profile.instance().clone(), matrix.clone()).is_ok()
                        && rows_sd_dominate(matrix, outcome.rows(), profile)
                }
                Some(EfficiencyCertificate::OutsideHull { generators, farkas }) => {
                    let efficient = sd_efficient_discrete(profile, false, guards.discrete)?;
                    let flat: Vec<_> = generators
                        .iter()
                        .map(|d| d.to_matrix().into_iter().flatten().collect())
                        .collect();
                    *generators == efficient && farkas.verifies(&membership_program(&outcome.flatten(), &flat)?)
                }
                Some(EfficiencyCertificate::NotPerfect { perfect, returned }) => {
                    perfect_assignment(profile).as_ref() == Some(perfect)
                        && *returned == outcome
                        && perfect.to_matrix() != outcome.rows()
                }
                _ => false,
            },
            Evidence::Envy(v) => match &v.certificate {
                Some(cert) => cert.verifies(v.property, &outcome, profile),
                None => false,
            },
            Evidence::Equivariance { axiom, verdict } => {
                let again = match axiom {
                    Property::Anonymity => check_anonymity(rule, profile, &verdict.permutation)?,
                    Property::Neutrality => check_neutrality(rule, profile, &verdict.permutation)?,
                    _ => return Ok(false),
                };
                !again.holds && again == *verdict
            }
            Evidence::Manipulation(m) => m.truthful == *profile && m.verify(rule)?,
        })
    }
}

/// The first failure of `property` by `rule` at `profile`, if any.
pub fn find_evidence(rule: &Rule, property: Property, profile: &PreferenceProfile, guards: &Guards) -> Result<Option<Evidence>> {
    let outcome = rule.assign(profile)?;
    Ok(match property {
        Property::SdEfficiency => {
            let v = is_sd_efficient(&outcome, profile)?;
            (!v.holds).then_some(Evidence::Efficiency(v))
        }
        Property::ExPost => {
            let efficient = sd_efficient_discrete(profile, false, guards.discrete)?;
            let v = ex_post_against(&outcome, &efficient)?;
            (!v.holds).then_some(Evidence::Efficiency(v))
        }
        Property::Unanimity => {
            let v = unanimity_of(&outcome, profile)?;
            (!v.holds).then_some(Evidence::Efficiency(v))
        }
        Property::SdEf => {
            let v = is_sd_envy_free(&outcome, profile)?;
            (!v.holds).then_some(Evidence::Envy(v))
        }
        Property::WeakSdEf => {
            let v = is_weak_sd_envy_free(&outcome, profile)?;
            (!v.holds).then_some(Evidence::Envy(v))
        }
        Property::Anonymity => {
            let mut found = None;
            for pi in Permutation::all(profile.n()) {
                let v = check_anonymity(rule, profile, &pi)?;
                if !v.holds {
                    found = Some(Evidence::Equivariance {
                        axiom: Property::Anonymity,
                        verdict: v,
                    });
                    break;
                }
            }
            found
        }
        Property::Neutrality => {
            let mut found = None;
            for sigma in Permutation::all(profile.m()) {
                let v = check_neutrality(rule, profile, &sigma)?;
                if !v.holds {
                    found = Some(Evidence::Equivariance {
                        axiom: Property::Neutrality,
                        verdict: v,
                    });
                    break;
                }
            }
            found
        }
        Property::SdSp | Property::DlSp | Property::WeakSdSp => {
            let kind = property.manipulation_kind().expect("strategy property");
            let mut found = None;
            for agent in 0..profile.n() {
                if let Some(m) = find_manipulation_from(rule, profile, &outcome, agent, kind, guards)? {
                    found = Some(Evidence::Manipulation(Box::new(m)));
                    break;
                }
            }
            found
        }
    })
}

/// Per-profile facts for one rule: which properties fail, and for each agent
/// which manipulation kinds exist (sd, dl, weak-sd).
#[derive(Clone, Debug)]
struct RuleFacts {
    fails: [bool; 10],
    agents: Vec<[bool; 3]>,
}

fn rule_facts(
    rule: &Rule,
    profile: &PreferenceProfile,
    efficient: &[mudra::DiscreteAssignment],
    orders: &[Vec<usize>],
    elapsed: &AtomicU64,
) -> Result<RuleFacts> {
    let start = Instant::now();
    let outcome = rule.assign(profile)?;
    elapsed.fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);

    let mut fails = [false; 10];
    fails[Property::SdEfficiency.index()] = !is_sd_efficient(&outcome, profile)?.holds;
    fails[Property::ExPost.index()] = !ex_post_against(&outcome, efficient)?.holds;
    fails[Property::Unanimity.index()] = !unanimity_of(&outcome, profile)?.holds;
    fails[Property::SdEf.index()] = !is_sd_envy_free(&outcome, profile)?.holds;
    fails[Property::WeakSdEf.index()] = !is_weak_sd_envy_free(&outcome, profile)?.holds;

    let mut anonymous = true;
    for pi in Permutation::all(profile.n()).iter().filter(|p| !p.is_identity()) {
        if rule.assign(&profile.permute_agents(pi)?)? != outcome.permute_agents(pi)? {
            anonymous = false;
            break;
        }
    }
    fails[Property::Anonymity.index()] = !anonymous;
    let mut neutral = true;
    for sigma in Permutation::all(profile.m()).iter().filter(|p| !p.is_identity()) {
        if rule.assign(&profile.permute_objects(sigma)?)? != outcome.permute_objects(sigma)? {
            neutral = false;
            break;
        }
    }
    fails[Property::Neutrality.index()] = !neutral;

    let kinds = [
        ManipulationKind::SdStrategyproofness,
        ManipulationKind::DlStrategyproofness,
        ManipulationKind::WeakSdStrategyproofness,
    ];
    let mut agents = Vec::with_capacity(profile.n());
    for agent in 0..profile.n() {
        let mut found = [false; 3];
        let true_order = profile.order(agent);
        for order in orders {
            if found.iter().all(|&f| f) {
                break;
            }
            let reported = rule.assign(&profile.with_order(agent, order.clone())?)?;
            for (slot, kind) in found.iter_mut().zip(kinds) {
                *slot = *slot || kind.gains(outcome.row(agent), reported.row(agent), true_order);
            }
        }
        agents.push(found);
    }
    for (k, property) in [Property::SdSp, Property::DlSp, Property::WeakSdSp].into_iter().enumerate() {
        fails[property.index()] = agents.iter().any(|a| a[k]);
    }
    Ok(RuleFacts { fails, agents })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observed {
    SupportedBySweep,
    CounterexampleFound,
    /// A '−' cell with no counterexample in any searched domain.
    NoCounterexample,
    Refused,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub domain: DomainSpec,
    pub profile_index: u64,
    pub profile: PreferenceProfile,
    pub outcome: RandomAssignment,
    pub evidence: Evidence,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableCell {
    pub rule: String,
    pub property: Property,
    pub expected: Sign,
    pub observed: Observed,
    pub discrepancy: bool,
    /// Profiles of the primary domain on which the property held.
    pub profiles_passed: u64,
    pub profiles_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyViolation {
    pub rule: String,
    pub profile_index: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    pub premise: Property,
    pub conclusion: Property,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HierarchyReport {
    pub checks: u64,
    pub violations: Vec<HierarchyViolation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleTiming {
    pub rule: String,
    /// Total time spent computing truthful outcomes over the primary domain.
    pub micros: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Report {
    pub primary: DomainSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<DomainSpec>,
    pub cells: Vec<TableCell>,
    pub hierarchy: HierarchyReport,
    pub timing: Vec<RuleTiming>,
    /// Rules with no primary-domain counterexample to any of ex-post
    /// efficiency, weak SD-strategyproofness and SD envy-freeness.
    pub jointly_unrefuted: Vec<String>,
    pub notes: Vec<String>,
}

impl Table1Report {
    pub fn discrepancies(&self) -> usize {
        self.cells.iter().filter(|c| c.discrepancy).count() + self.hierarchy.violations.len()
    }

    pub fn refusals(&self) -> usize {
        self.cells.iter().filter(|c| c.observed == Observed::Refused).count()
    }

    pub fn cell(&self, rule: &str, property: Property) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.rule == rule && c.property == property)
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub primary: (usize, usize),
    /// `(n, m)` searched for '−' cells the primary domain cannot refute.
    pub secondary: Option<(usize, usize)>,
    pub guards: Guards,
    pub rules: Vec<Rule>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            primary: (2, 4),
            secondary: Some((4, 4)),
            guards: Guards::default(),
            rules: Rule::all(),
        }
    }
}

pub fn table1_sweep(config: &SweepConfig) -> Result<Table1Report> {
    let guards = &config.guards;
    let space = crate::enumerate::enumerate_profiles(config.primary.0, config.primary.1, guards.profiles)?;
    let orders = all_strict_orders(space.instance().m(), guards.order_objects)?;
    let timers: Vec<AtomicU64> = config.rules.iter().map(|_| AtomicU64::new(0)).collect();

    let facts: Vec<Vec<RuleFacts>> = (0..space.len())
        .into_par_iter()
        .map(|index| {
            let profile = space.get(index);
            let efficient = sd_efficient_discrete(&profile, false, guards.discrete)?;
            config
                .rules
                .iter()
                .zip(&timers)
                .map(|(rule, timer)| rule_facts(rule, &profile, &efficient, &orders, timer))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let hierarchy = check_hierarchy(&config.rules, &facts);

    let secondary = config
        .secondary
        .map(|(n, m)| crate::enumerate::enumerate_profiles(n, m, guards.profiles));
    let mut cells = Vec::new();
    for (r, rule) in config.rules.iter().enumerate() {
        for property in Property::ALL {
            cells.push(build_cell(rule, r, property, &space, &facts, secondary.as_ref(), guards)?);
        }
    }

    let jointly_unrefuted = config
        .rules
        .iter()
        .filter(|rule| {
            [Property::ExPost, Property::WeakSdSp, Property::SdEf].iter().all(|&property| {
                cells
                    .iter()
                    .find(|c| c.rule == rule.key() && c.property == property)
                    .is_some_and(|c| c.observed == Observed::SupportedBySweep)
            })
        })
        .map(|rule| rule.key().to_string())
        .collect();

    Ok(Table1Report {
        primary: space.spec(),
        secondary: secondary.and_then(|s| s.ok()).map(|s| s.spec()),
        cells,
        hierarchy,
        timing: config
            .rules
            .iter()
            .zip(&timers)
            .map(|(rule, t)| RuleTiming {
                rule: rule.key().to_string(),
                micros: t.load(Ordering::Relaxed) / 1000,
            })
            .collect(),
        jointly_unrefuted,
        notes: vec![
            "'+' cells are supported by an exhaustive sweep of the primary domain: evidence at desk scale, not proof".into(),
            "the polynomial-time row is a complexity claim and is not swept; timing is informational".into(),
            "priority uses the fixed picking order 1, ..., n".into(),
            "hierarchy implications are checked on every (rule, profile) of the primary sweep".into(),
        ],
    })
}

fn build_cell(
    rule: &Rule,
    r: usize,
    property: Property,
    space: &ProfileSpace,
    facts: &[Vec<RuleFacts>],
    secondary: Option<&Result<ProfileSpace>>,
    guards: &Guards,
) -> Result<TableCell> {
    let expected = expected_sign(rule, property);
    let first_fail = facts.iter().position(|f| f[r].fails[property.index()]);
    let passed = facts.iter().filter(|f| !f[r].fails[property.index()]).count() as u64;
    let mut cell = TableCell {
        rule: rule.key().to_string(),
        property,
        expected,
        observed: Observed::SupportedBySweep,
        discrepancy: false,
        profiles_passed: passed,
        profiles_checked: space.len(),
        counterexample: None,
        refusal: None,
    };

    if let Some(index) = first_fail {
        let index = index as u64;
        let profile = space.get(index);
        let evidence = find_evidence(rule, property, &profile, guards)?
            .ok_or_else(|| Error::Internal(format!("{rule} {property}: sweep and evidence search disagree")))?;
        cell.counterexample = Some(counterexample(rule, space, index, profile, evidence, guards)?);
        cell.observed = Observed::CounterexampleFound;
    } else if expected == Sign::Minus {
        match secondary {
            Some(Ok(space2)) => match search(rule, property, space2, guards) {
                Ok(Some((index, profile, evidence))) => {
                    cell.counterexample = Some(counterexample(rule, space2, index, profile, evidence, guards)?);
                    cell.observed = Observed::CounterexampleFound;
                }
                Ok(None) => cell.observed = Observed::NoCounterexample,
                Err(e) if e.is_guard() || matches!(e, Error::RelaxedUnsupported(_)) => {
                    cell.observed = Observed::Refused;
                    cell.refusal = Some(e.to_string());
                }
                Err(e) => return Err(e),
            },
            Some(Err(e)) => {
                cell.observed = Observed::Refused;
                cell.refusal = Some(e.to_string());
            }
            None => cell.observed = Observed::NoCounterexample,
        }
    }
    cell.discrepancy = match (expected, cell.observed) {
        (Sign::Plus, Observed::CounterexampleFound) => true,
        (Sign::Minus, Observed::NoCounterexample | Observed::SupportedBySweep) => true,
        (_, Observed::CounterexampleFound) => !cell.counterexample.as_ref().is_some_and(|c| c.verified),
        _ => false,
    };
    Ok(cell)
}

fn counterexample(
    rule: &Rule,
    space: &ProfileSpace,
    index: u64,
    profile: PreferenceProfile,
    evidence: Evidence,
    guards: &Guards,
) -> Result<Counterexample> {
    let verified = evidence.verify(rule, &profile, guards)?;
    Ok(Counterexample {
        domain: space.spec(),
        profile_index: index,
        outcome: rule.assign(&profile)?,
        profile,
        evidence,
        verified,
    })
}

/// The first profile of `space` (canonical order) where the property fails.
fn search(
    rule: &Rule,
    property: Property,
    space: &ProfileSpace,
    guards: &Guards,
) -> Result<Option<(u64, PreferenceProfile, Evidence)>> {
    (0..space.len())
        .into_par_iter()
        .find_map_first(|index| {
            let profile = space.get(index);
            match find_evidence(rule, property, &profile, guards) {
                Ok(Some(e)) => Some(Ok((index, profile, e))),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .transpose()
}

fn check_hierarchy(rules: &[Rule], facts: &[Vec<RuleFacts>]) -> HierarchyReport {
    let mut report = HierarchyReport::default();
    let implications = [
        (Property::SdEfficiency, Property::ExPost),
        (Property::ExPost, Property::Unanimity),
        (Property::SdEf, Property::WeakSdEf),
    ];
    for (index, per_rule) in facts.iter().enumerate() {
        for (rule, f) in rules.iter().zip(per_rule) {
            for (premise, conclusion) in implications {
                report.checks += 1;
                if !f.fails[premise.index()] && f.fails[conclusion.index()] {
                    report.violations.push(HierarchyViolation {
                        rule: rule.key().to_string(),
                        profile_index: index as u64,
                        agent: None,
                        premise,
                        conclusion,
                    });
                }
            }
            for (agent, [sd, dl, weak]) in f.agents.iter().enumerate() {
                for (premise, broken) in [(Property::SdSp, sd), (Property::DlSp, dl)] {
                    report.checks += 1;
                    if !broken && *weak {
                        report.violations.push(HierarchyViolation {
                            rule: rule.key().to_string(),
                            profile_index: index as u64,
                            agent: Some(agent),
                            premise,
                            conclusion: Property::WeakSdSp,
                        });
                    }
                }
            }
        }
    }
    report
}
