//! Envy-freeness under SD and weak SD, and the anonymity and neutrality
//! axioms checked as equivariance under relabeling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Permutation, PreferenceProfile, RandomAssignment, Relabel};
use crate::order::{prefix_sums, sd_compare, SdVerdict};
use crate::rational::Rational;
use crate::rules::AssignmentRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FairnessProperty {
    SdEnvyFree,
    WeakSdEnvyFree,
}

/// Agent `envious` prefers agent `envied`'s row to its own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvyCertificate {
    pub envious: usize,
    pub envied: usize,
    pub verdict: SdVerdict,
    /// The first object (in the envious agent's order) where the envied
    /// row's upper-contour sum exceeds the envious agent's own.
    pub witness_object: usize,
    pub own_prefix: Rational,
    pub other_prefix: Rational,
}

impl EnvyCertificate {
    /// Re-derives the certificate's claim from `p` and `profile`.
    pub fn verifies(&self, property: FairnessProperty, p: &RandomAssignment, profile: &PreferenceProfile) -> bool {
        let (i, j) = (self.envious, self.envied);
        if i == j || i >= profile.n() || j >= profile.n() {
            return false;
        }
        let order = profile.order(i);
        let verdict = sd_compare(p.row(j), p.row(i), order);
        let envy = match property {
            FairnessProperty::SdEnvyFree => !verdict.second_weakly_dominates(),
            FairnessProperty::WeakSdEnvyFree => verdict == SdVerdict::FirstStrictlyDominates,
        };
        let Some(pos) = order.iter().position(|&o| o == self.witness_object) else {
            return false;
        };
        let own = prefix_sums(p.row(i), order);
        let other = prefix_sums(p.row(j), order);
        envy && verdict == self.verdict && other[pos] > own[pos] && own[pos] == self.own_prefix && other[pos] == self.other_prefix
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FairnessVerdict {
    pub property: FairnessProperty,
    pub holds: bool,
    pub certificate: Option<EnvyCertificate>,
}

/// Every agent's own row weakly SD-dominates every other row under its
/// own order.
pub fn is_sd_envy_free(p: &RandomAssignment, profile: &PreferenceProfile) -> Result<FairnessVerdict> {
    envy_check(FairnessProperty::SdEnvyFree, p, profile)
}

/// No agent finds another's row strictly SD-better than its own.
pub fn is_weak_sd_envy_free(p: &RandomAssignment, profile: &PreferenceProfile) -> Result<FairnessVerdict> {
    envy_check(FairnessProperty::WeakSdEnvyFree, p, profile)
}

fn envy_check(property: FairnessProperty, p: &RandomAssignment, profile: &PreferenceProfile) -> Result<FairnessVerdict> {
    if p.instance() != profile.instance() {
        return Err(Error::Dimension(
            "assignment and profile are over different instances".into(),
        ));
    }
    let n = profile.n();
    for i in 0..n {
        let order = profile.order(i);
        for j in (0..n).filter(|&j| j != i) {
            // Compare the other row against the agent's own.
            let verdict = sd_compare(p.row(j), p.row(i), order);
            let envy = match property {
                FairnessProperty::SdEnvyFree => !verdict.second_weakly_dominates(),
                FairnessProperty::WeakSdEnvyFree => verdict == SdVerdict::FirstStrictlyDominates,
            };
            if envy {
                let own = prefix_sums(p.row(i), order);
                let other = prefix_sums(p.row(j), order);
                let pos = (0..order.len())
                    .find(|&k| other[k] > own[k])
                    .ok_or_else(|| Error::Internal("envy without a witnessing prefix".into()))?;
                return Ok(FairnessVerdict {
                    property,
                    holds: false,
                    certificate: Some(EnvyCertificate {
                        envious: i,
                        envied: j,
                        verdict,
                        witness_object: order[pos],
                        own_prefix: own[pos].clone(),
                        other_prefix: other[pos].clone(),
                    }),
                });
            }
        }
    }
    Ok(FairnessVerdict {
        property,
        holds: true,
        certificate: None,
    })
}

/// The outcome of an equivariance check: `expected` is the relabeled
/// original outcome, `actual` the outcome on the relabeled profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomVerdict {
    pub holds: bool,
    pub permutation: Permutation,
    pub expected: RandomAssignment,
    pub actual: RandomAssignment,
}

/// `rule(pi · R) == pi · rule(R)`.
pub fn check_anonymity(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    pi: &Permutation,
) -> Result<AxiomVerdict> {
    let expected = rule.assign(profile)?.permute_agents(pi)?;
    let actual = rule.assign(&profile.permute_agents(pi)?)?;
    Ok(AxiomVerdict {
        holds: expected == actual,
        permutation: pi.clone(),
        expected,
        actual,
    })
}

/// `rule(sigma · R) == sigma · rule(R)`.
pub fn check_neutrality(
    rule: &(impl AssignmentRule + ?Sized),
    profile: &PreferenceProfile,
    sigma: &Permutation,
) -> Result<AxiomVerdict> {
    let expected = rule.assign(profile)?.permute_objects(sigma)?;
    let actual = rule.assign(&profile.permute_objects(sigma)?)?;
    Ok(AxiomVerdict {
        holds: expected == actual,
        permutation: sigma.clone(),
        expected,
        actual,
    })
}
