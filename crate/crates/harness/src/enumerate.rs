//! Exhaustive profile domains.

use mudra::error::{Error, Result};
use mudra::strategy::lexicographic_permutations;
use mudra::{Instance, PreferenceProfile};
use serde::Serialize;

/// Every profile over an instance, indexed in canonical order: agent 1's
/// order is the most significant digit, orders ranked lexicographically.
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    instance: Instance,
    orders: Vec<Vec<usize>>,
    count: u64,
}

/// The shape of a domain, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DomainSpec {
    pub agents: usize,
    pub objects: usize,
    pub quota: usize,
    pub profiles: u64,
}

impl ProfileSpace {
    pub fn new(instance: Instance, guard: u64) -> Result<Self> {
        let (n, m) = (instance.n(), instance.m());
        let orders_count = (1..=m as u64).try_fold(1u64, |acc, k| acc.checked_mul(k));
        let count = orders_count.and_then(|k| (0..n).try_fold(1u64, |acc, _| acc.checked_mul(k)));
        match count {
            Some(count) if count <= guard => Ok(ProfileSpace {
                orders: lexicographic_permutations(m),
                instance,
                count,
            }),
            _ => Err(Error::GuardExceeded {
                what: "profile enumeration",
                needed: format!("({m}!)^{n}"),
                guard,
            }),
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn spec(&self) -> DomainSpec {
        DomainSpec {
            agents: self.instance.n(),
            objects: self.instance.m(),
            quota: self.instance.quota(),
            profiles: self.count,
        }
    }

    pub fn get(&self, index: u64) -> PreferenceProfile {
        assert!(index < self.count, "profile index {index} out of range");
        let k = self.orders.len() as u64;
        let n = self.instance.n();
        let mut digits = vec![0usize; n];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % k) as usize;
            rest /= k;
        }
        let orders = digits.into_iter().map(|d| self.orders[d].clone()).collect();
        PreferenceProfile::new(self.instance.clone(), orders).expect("enumerated orders are valid")
    }

    pub fn iter(&self) -> impl Iterator<Item = PreferenceProfile> + '_ {
        (0..self.count).map(|i| self.get(i))
    }
}

/// Agents `1..n`, objects `o1..om`; relaxed when `n` does not divide `m`.
pub fn domain_instance(n: usize, m: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidInstance("at least one agent is required".into()));
    }
    if m.is_multiple_of(n) && m > 0 {
        Instance::with_sizes(n, m / n)
    } else {
        Instance::relaxed(
            (1..=n).map(|i| i.to_string()).collect(),
            (1..=m).map(|o| format!("o{o}")).collect(),
        )
    }
}

pub fn enumerate_profiles(n: usize, m: usize, guard: u64) -> Result<ProfileSpace> {
    ProfileSpace::new(domain_instance(n, m)?, guard)
}
