//! Core domain types.
//!
//! Agents and objects are identified by opaque string ids but every internal
//! computation is positional: agent `i` is the `i`-th entry of
//! [`Instance::agents`], object `o` the `o`-th entry of [`Instance::objects`].
//! Preference orders are lists of object indices, most preferred first.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    agents: Arc<[String]>,
    objects: Arc<[String]>,
    quota: usize,
    relaxed: bool,
}

impl Instance {
    /// A balanced instance: `objects.len() == agents.len() * quota`.
    pub fn new(agents: Vec<String>, objects: Vec<String>, quota: usize) -> Result<Self> {
        check_ids("agent", &agents)?;
        check_ids("object", &objects)?;
        if quota == 0 {
            return Err(Error::InvalidInstance("quota must be positive".into()));
        }
        if objects.len() != agents.len() * quota {
            return Err(Error::InvalidInstance(format!(
                "{} objects is not {} agents times quota {}",
                objects.len(),
                agents.len(),
                quota
            )));
        }
        Ok(Instance {
            agents: agents.into(),
            objects: objects.into(),
            quota,
            relaxed: false,
        })
    }

    /// An instance where `m` need not be a multiple of `n`. Only the eating
    /// rules accept these; every agent then eats up to `ceil(m/n)` objects at
    /// a time and ends with `m/n` units.
    pub fn relaxed(agents: Vec<String>, objects: Vec<String>) -> Result<Self> {
        check_ids("agent", &agents)?;
        check_ids("object", &objects)?;
        let quota = objects.len().div_ceil(agents.len());
        Ok(Instance {
            agents: agents.into(),
            objects: objects.into(),
            quota,
            relaxed: true,
        })
    }

    /// Agents `"1".."n"` and objects `"o1".."o{n*c}"`.
    pub fn with_sizes(n: usize, quota: usize) -> Result<Self> {
        let agents = (1..=n).map(|i| i.to_string()).collect();
        let objects = (1..=n * quota).map(|o| format!("o{o}")).collect();
        Instance::new(agents, objects, quota)
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.objects.len()
    }

    /// Units each agent receives (balanced), or the per-phase eating cap
    /// `ceil(m/n)` (relaxed).
    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn agent_index(&self, id: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == id)
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == id)
    }

    /// Required row sum of a random assignment: `c`, or `m/n` when relaxed.
    pub fn row_target(&self) -> Rational {
        if self.relaxed {
            Rational::from(self.m()) / Rational::from(self.n())
        } else {
            Rational::from(self.quota)
        }
    }

    pub(crate) fn require_balanced(&self, what: &'static str) -> Result<()> {
        if self.relaxed {
            Err(Error::RelaxedUnsupported(what))
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("agents", &self.agents)
            .field("objects", &self.objects)
            .field("quota", &self.quota)
            .field("relaxed", &self.relaxed)
            .finish()
    }
}

fn check_ids(kind: &str, ids: &[String]) -> Result<()> {
    if ids.is_empty() {
        return Err(Error::InvalidInstance(format!("need at least one {kind}")));
    }
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidInstance(format!("duplicate {kind} id {id:?}")));
        }
    }
    Ok(())
}

/// A bijection on `0..len`, stored as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &x in &image {
            if x >= image.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotBijection(format!("{image:?}")));
            }
        }
        Ok(Permutation(image))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    /// Swaps `a` and `b`.
    pub fn transposition(len: usize, a: usize, b: usize) -> Self {
        let mut image: Vec<usize> = (0..len).collect();
        image.swap(a, b);
        Permutation(image)
    }

    /// All permutations of `0..len` in lexicographic order.
    pub fn all(len: usize) -> Vec<Permutation> {
        crate::strategy::lexicographic_permutations(len)
            .into_iter()
            .map(Permutation)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreferenceProfile {
    instance: Instance,
    orders: Vec<Vec<usize>>,
}

impl PreferenceProfile {
    pub fn new(instance: Instance, orders: Vec<Vec<usize>>) -> Result<Self> {
        if orders.len() != instance.n() {
            return Err(Error::Dimension(format!(
                "{} preference orders for {} agents",
                orders.len(),
                instance.n()
            )));
        }
        for (i, order) in orders.iter().enumerate() {
            check_order(&instance, order).map_err(|msg| {
                Error::InvalidProfile(format!("agent {}: {msg}", instance.agents()[i]))
            })?;
        }
        Ok(PreferenceProfile { instance, orders })
    }

    /// Builds a profile from object names; agents are named `"1".."n"`.
    ///
    /// ```
    /// use mudra::PreferenceProfile;
    /// let p = PreferenceProfile::from_names(
    ///     &["a", "b", "c", "d"], 2, &[&["a", "b", "c", "d"], &["b", "c", "a", "d"]],
    /// ).unwrap();
    /// assert_eq!(p.order(1), &[1, 2, 0, 3]);
    /// ```
    pub fn from_names(objects: &[&str], quota: usize, orders: &[&[&str]]) -> Result<Self> {
        let agents = (1..=orders.len()).map(|i| i.to_string()).collect();
        let instance = Instance::new(agents, objects.iter().map(|o| o.to_string()).collect(), quota)?;
        let orders = orders
            .iter()
            .map(|order| {
                order
                    .iter()
                    .map(|name| {
                        instance
                            .object_index(name)
                            .ok_or_else(|| Error::UnknownObject(name.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PreferenceProfile::new(instance, orders)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn m(&self) -> usize {
        self.instance.m()
    }

    /// Agent `i`'s order as object indices, most preferred first.
    pub fn order(&self, i: usize) -> &[usize] {
        &self.orders[i]
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.orders
    }

    /// The profile with agent `i`'s report replaced.
    pub fn with_order(&self, i: usize, order: Vec<usize>) -> Result<Self> {
        check_order(&self.instance, &order).map_err(Error::InvalidProfile)?;
        let mut orders = self.orders.clone();
        orders[i] = order;
        Ok(PreferenceProfile {
            instance: self.instance.clone(),
            orders,
        })
    }

    /// Agent `i`'s `k` most preferred objects.
    pub fn top(&self, i: usize, k: usize) -> &[usize] {
        &self.orders[i][..k.min(self.m())]
    }

    pub fn order_names(&self, i: usize) -> Vec<&str> {
        self.orders[i]
            .iter()
            .map(|&o| self.instance.objects()[o].as_str())
            .collect()
    }
}

fn check_order(instance: &Instance, order: &[usize]) -> std::result::Result<(), String> {
    if order.len() != instance.m() {
        return Err(format!(
            "order lists {} objects, expected {}",
            order.len(),
            instance.m()
        ));
    }
    let mut seen = vec![false; instance.m()];
    for &o in order {
        if o >= instance.m() {
            return Err(format!("object index {o} out of range"));
        }
        if std::mem::replace(&mut seen[o], true) {
            return Err(format!("object {:?} listed twice", instance.objects()[o]));
        }
    }
    Ok(())
}

/// The first constraint a candidate random assignment breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    Entry {
        agent: usize,
        object: usize,
        value: Rational,
    },
    Column {
        object: usize,
        sum: Rational,
    },
    Row {
        agent: usize,
        sum: Rational,
        expected: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Entry {
                agent,
                object,
                value,
            } => write!(f, "entry ({agent},{object}) = {value} is outside [0,1]"),
            Violation::Column { object, sum } => {
                write!(f, "column {object} sums to {sum}, not 1")
            }
            Violation::Row {
                agent,
                sum,
                expected,
            } => write!(f, "row {agent} sums to {sum}, not {expected}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(Violation),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Checks the three random-assignment constraints in order: entries in
/// `[0,1]`, column sums 1, row sums equal to [`Instance::row_target`].
///
/// A shape mismatch is an `Err`; a well-shaped but infeasible matrix is
/// `Ok(Validity::Invalid(..))`.
pub fn validate_assignment(instance: &Instance, rows: &[Vec<Rational>]) -> Result<Validity> {
    check_shape(instance, rows)?;
    let one = Rational::one();
    for (agent, row) in rows.iter().enumerate() {
        for (object, value) in row.iter().enumerate() {
            if value.is_negative() || *value > one {
                return Ok(Validity::Invalid(Violation::Entry {
                    agent,
                    object,
                    value: value.clone(),
                }));
            }
        }
    }
    for object in 0..instance.m() {
        let sum: Rational = rows.iter().map(|row| &row[object]).sum();
        if !sum.is_one() {
            return Ok(Validity::Invalid(Violation::Column { object, sum }));
        }
    }
    let expected = instance.row_target();
    for (agent, row) in rows.iter().enumerate() {
        let sum: Rational = row.iter().sum();
        if sum != expected {
            return Ok(Validity::Invalid(Violation::Row {
                agent,
                sum,
                expected,
            }));
        }
    }
    Ok(Validity::Valid)
}

fn check_shape(instance: &Instance, rows: &[Vec<Rational>]) -> Result<()> {
    if rows.len() != instance.n() {
        return Err(Error::Dimension(format!(
            "{} rows for {} agents",
            rows.len(),
            instance.n()
        )));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != instance.m()) {
        return Err(Error::Dimension(format!(
            "row {i} has {} entries for {} objects",
            row.len(),
            instance.m()
        )));
    }
    Ok(())
}

/// An `n × m` matrix of allocation probabilities, indexed `[agent][object]`.
/// Construction validates feasibility, so every value of this type is a
/// feasible random assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RandomAssignment {
    instance: Instance,
    rows: Vec<Vec<Rational>>,
}

impl RandomAssignment {
    pub fn new(instance: Instance, rows: Vec<Vec<Rational>>) -> Result<Self> {
        match validate_assignment(&instance, &rows)? {
            Validity::Valid => Ok(RandomAssignment { instance, rows }),
            Validity::Invalid(v) => Err(Error::Infeasible(Box::new(v))),
        }
    }

    /// Every agent gets `1/n` of every object.
    pub fn uniform(instance: &Instance) -> Self {
        let share = Rational::one() / Rational::from(instance.n());
        RandomAssignment {
            rows: vec![vec![share; instance.m()]; instance.n()],
            instance: instance.clone(),
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn get(&self, agent: usize, object: usize) -> &Rational {
        &self.rows[agent][object]
    }

    pub fn into_rows(self) -> Vec<Vec<Rational>> {
        self.rows
    }

    pub fn is_discrete(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|x| x.is_zero() || x.is_one())
    }

    /// Row-major flattening, used for convex-hull tests.
    pub fn flatten(&self) -> Vec<Rational> {
        self.rows.iter().flatten().cloned().collect()
    }
}

/// A 0/1 assignment: `owner[o]` is the agent holding object `o`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscreteAssignment {
    instance: Instance,
    owner: Vec<usize>,
}

impl PartialOrd for Instance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Instance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.agents, &self.objects, self.quota, self.relaxed).cmp(&(
            &other.agents,
            &other.objects,
            other.quota,
            other.relaxed,
        ))
    }
}

impl DiscreteAssignment {
    /// Any owner map (balanced or not).
    pub fn new(instance: Instance, owner: Vec<usize>) -> Result<Self> {
        if owner.len() != instance.m() {
            return Err(Error::Dimension(format!(
                "owner map covers {} objects, expected {}",
                owner.len(),
                instance.m()
            )));
        }
        if let Some(&a) = owner.iter().find(|&&a| a >= instance.n()) {
            return Err(Error::Dimension(format!("agent index {a} out of range")));
        }
        Ok(DiscreteAssignment { instance, owner })
    }

    /// From per-agent bundles of object indices; each object must appear in
    /// exactly one bundle.
    pub fn from_bundles(instance: Instance, bundles: &[Vec<usize>]) -> Result<Self> {
        if bundles.len() != instance.n() {
            return Err(Error::Dimension(format!(
                "{} bundles for {} agents",
                bundles.len(),
                instance.n()
            )));
        }
        let mut owner = vec![None; instance.m()];
        for (agent, bundle) in bundles.iter().enumerate() {
            for &o in bundle {
                let slot = owner
                    .get_mut(o)
                    .ok_or_else(|| Error::Dimension(format!("object index {o} out of range")))?;
                if slot.replace(agent).is_some() {
                    return Err(Error::InvalidProfile(format!(
                        "object {:?} owned twice",
                        instance.objects()[o]
                    )));
                }
            }
        }
        let owner = owner
            .into_iter()
            .enumerate()
            .map(|(o, a)| {
                a.ok_or_else(|| {
                    Error::InvalidProfile(format!("object {:?} unowned", instance.objects()[o]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscreteAssignment { instance, owner })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn owner(&self, object: usize) -> usize {
        self.owner[object]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    /// Objects held by `agent`, in index order.
    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        (0..self.owner.len())
            .filter(|&o| self.owner[o] == agent)
            .collect()
    }

    pub fn bundle_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.instance.n()];
        for &a in &self.owner {
            sizes[a] += 1;
        }
        sizes
    }

    pub fn is_balanced(&self) -> bool {
        !self.instance.is_relaxed()
            && self
                .bundle_sizes()
                .iter()
                .all(|&s| s == self.instance.quota())
    }

    /// The 0/1 matrix, whatever the bundle sizes.
    pub fn to_matrix(&self) -> Vec<Vec<Rational>> {
        let mut rows = vec![vec![Rational::zero(); self.instance.m()]; self.instance.n()];
        for (o, &a) in self.owner.iter().enumerate() {
            rows[a][o] = Rational::one();
        }
        rows
    }

    /// The discrete assignment as a random assignment; fails when unbalanced.
    pub fn to_random(&self) -> Result<RandomAssignment> {
        if !self.is_balanced() {
            return Err(Error::Unbalanced(self.bundle_sizes()));
        }
        RandomAssignment::new(self.instance.clone(), self.to_matrix())
    }
}

/// Relabeling of agents or objects, the group actions behind anonymity and
/// neutrality. Agent `i`'s data moves to position `pi(i)`; object `o` is
/// renamed `sigma(o)`.
pub trait Relabel: Sized {
    fn permute_agents(&self, pi: &Permutation) -> Result<Self>;
    fn permute_objects(&self, sigma: &Permutation) -> Result<Self>;
}

fn check_perm_len(p: &Permutation, len: usize, what: &str) -> Result<()> {
    if p.len() != len {
        return Err(Error::NotBijection(format!(
            "permutation of length {} applied to {len} {what}",
            p.len()
        )));
    }
    Ok(())
}

fn move_rows<T: Clone>(rows: &[T], pi: &Permutation) -> Vec<T> {
    let mut out = rows.to_vec();
    for (i, row) in rows.iter().enumerate() {
        out[pi.apply(i)] = row.clone();
    }
    out
}

impl Relabel for PreferenceProfile {
    fn permute_agents(&self, pi: &Permutation) -> Result<Self> {
        check_perm_len(pi, self.n(), "agents")?;
        Ok(PreferenceProfile {
            instance: self.instance.clone(),
            orders: move_rows(&self.orders, pi),
        })
    }

    fn permute_objects(&self, sigma: &Permutation) -> Result<Self> {
        check_perm_len(sigma, self.m(), "objects")?;
        Ok(PreferenceProfile {
            instance: self.instance.clone(),
            orders: self
                .orders
                .iter()
                .map(|order| order.iter().map(|&o| sigma.apply(o)).collect())
                .collect(),
        })
    }
}

impl Relabel for RandomAssignment {
    fn permute_agents(&self, pi: &Permutation) -> Result<Self> {
        check_perm_len(pi, self.instance.n(), "agents")?;
        Ok(RandomAssignment {
            instance: self.instance.clone(),
            rows: move_rows(&self.rows, pi),
        })
    }

    fn permute_objects(&self, sigma: &Permutation) -> Result<Self> {
        check_perm_len(sigma, self.instance.m(), "objects")?;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = row.clone();
                for (o, x) in row.iter().enumerate() {
                    out[sigma.apply(o)] = x.clone();
                }
                out
            })
            .collect();
        Ok(RandomAssignment {
            instance: self.instance.clone(),
            rows,
        })
    }
}

impl Relabel for DiscreteAssignment {
    fn permute_agents(&self, pi: &Permutation) -> Result<Self> {
        check_perm_len(pi, self.instance.n(), "agents")?;
        Ok(DiscreteAssignment {
            instance: self.instance.clone(),
            owner: self.owner.iter().map(|&a| pi.apply(a)).collect(),
        })
    }

    fn permute_objects(&self, sigma: &Permutation) -> Result<Self> {
        check_perm_len(sigma, self.instance.m(), "objects")?;
        let mut owner = self.owner.clone();
        for (o, &a) in self.owner.iter().enumerate() {
            owner[sigma.apply(o)] = a;
        }
        Ok(DiscreteAssignment {
            instance: self.instance.clone(),
            owner,
        })
    }
}

// JSON shapes:
//   profile:    {"objects": [..], "quota": c, "preferences": {"agent": [..]}}
//   assignment: {"matrix": {"agent": {"object": "p/q"}}}
//   discrete:   {"bundles": {"agent": [..]}}

struct Preferences<'a>(&'a PreferenceProfile);

impl Serialize for Preferences<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let p = self.0;
        let mut map = serializer.serialize_map(Some(p.n()))?;
        for (i, agent) in p.instance.agents().iter().enumerate() {
            map.serialize_entry(agent, &p.order_names(i))?;
        }
        map.end()
    }
}

impl Serialize for PreferenceProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let relaxed = self.instance.is_relaxed();
        let mut st = serializer.serialize_struct("PreferenceProfile", 3 + relaxed as usize)?;
        st.serialize_field("objects", &*self.instance.objects)?;
        st.serialize_field("quota", &self.instance.quota)?;
        if relaxed {
            st.serialize_field("relaxed", &true)?;
        }
        st.serialize_field("preferences", &Preferences(self))?;
        st.end()
    }
}

/// A matrix keyed by agent and object ids.
pub struct NamedMatrix<'a> {
    pub instance: &'a Instance,
    pub rows: &'a [Vec<Rational>],
}

impl Serialize for NamedMatrix<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Row<'a>(&'a Instance, &'a [Rational]);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.1.len()))?;
                for (obj, x) in self.0.objects().iter().zip(self.1) {
                    map.serialize_entry(obj, x)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(self.rows.len()))?;
        for (agent, row) in self.instance.agents().iter().zip(self.rows) {
            map.serialize_entry(agent, &Row(self.instance, row))?;
        }
        map.end()
    }
}

impl Serialize for RandomAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RandomAssignment", 1)?;
        st.serialize_field(
            "matrix",
            &NamedMatrix {
                instance: &self.instance,
                rows: &self.rows,
            },
        )?;
        st.end()
    }
}

impl Serialize for DiscreteAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Bundles<'a>(&'a DiscreteAssignment);
        impl Serialize for Bundles<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let d = self.0;
                let mut map = s.serialize_map(Some(d.instance.n()))?;
                for (i, agent) in d.instance.agents().iter().enumerate() {
                    let names: Vec<&str> = d
                        .bundle(i)
                        .into_iter()
                        .map(|o| d.instance.objects()[o].as_str())
                        .collect();
                    map.serialize_entry(agent, &names)?;
                }
                map.end()
            }
        }
        let mut st = serializer.serialize_struct("DiscreteAssignment", 1)?;
        st.serialize_field("bundles", &Bundles(self))?;
        st.end()
    }
}
