//! Exact linear programming over the rationals.
//!
//! A dense two-phase simplex with Bland's rule. Problems here have at most a
//! few hundred variables, so there is no sparse machinery. All variables are
//! nonnegative; other bounds are ordinary constraints.
//!
//! Every outcome carries a certificate that can be checked independently:
//! optimal points are re-substituted into all constraints, and infeasible
//! programs come with Farkas multipliers (see [`FarkasCertificate`]).

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
    objective: Vec<Rational>,
    sense: Sense,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible(FarkasCertificate),
    Unbounded,
}

/// Multipliers `y`, one per constraint, proving that no `x ≥ 0` satisfies
/// the constraints: `y ≤ 0` on `≤` rows, `y ≥ 0` on `≥` rows, `yᵀA ≤ 0`
/// componentwise, and `yᵀb > 0`. Any feasible `x` would give
/// `0 ≥ yᵀAx ≥ yᵀb > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verifies(&self, lp: &LinearProgram) -> bool {
        if self.multipliers.len() != lp.constraints.len() {
            return false;
        }
        let signs_ok = self
            .multipliers
            .iter()
            .zip(&lp.constraints)
            .all(|(y, c)| match c.relation {
                Relation::Le => !y.is_positive(),
                Relation::Ge => !y.is_negative(),
                Relation::Eq => true,
            });
        let columns_ok = (0..lp.num_vars()).all(|j| {
            let s: Rational = self
                .multipliers
                .iter()
                .zip(&lp.constraints)
                .map(|(y, c)| y * &c.coeffs[j])
                .sum();
            !s.is_positive()
        });
        let rhs: Rational = self
            .multipliers
            .iter()
            .zip(&lp.constraints)
            .map(|(y, c)| y * &c.rhs)
            .sum();
        signs_ok && columns_ok && rhs.is_positive()
    }
}

impl LinearProgram {
    /// A program over nonnegative variables with a zero objective.
    pub fn new(variables: Vec<String>, sense: Sense) -> Self {
        let objective = vec![Rational::zero(); variables.len()];
        LinearProgram {
            variables,
            constraints: Vec::new(),
            objective,
            sense,
        }
    }

    /// Variables named `x0, x1, …`.
    pub fn with_vars(count: usize, sense: Sense) -> Self {
        LinearProgram::new((0..count).map(|j| format!("x{j}")).collect(), sense)
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rational>) {
        self.objective = coeffs;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// `x ≥ 0` and every constraint holds exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds_at(x))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(Error::MalformedLp(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.len()
            )));
        }
        if let Some((i, c)) = self
            .constraints
            .iter()
            .enumerate()
            .find(|(_, c)| c.coeffs.len() != n)
        {
            return Err(Error::MalformedLp(format!(
                "constraint {i} has {} coefficients for {n} variables",
                c.coeffs.len()
            )));
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        solve(self)
    }
}

struct Tableau {
    /// `rows[r]` has one entry per column plus the right-hand side last.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &p;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[Rational], c: usize) -> Rational {
        let mut z = cost[c].clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !row[c].is_zero() && !cost[b].is_zero() {
                z -= &cost[b] * &row[c];
            }
        }
        z
    }

    /// Maximizes `cost` over the current basis using Bland's rule; only
    /// columns `< enter_limit` may enter. Returns `false` when unbounded.
    fn maximize(&mut self, cost: &[Rational], enter_limit: usize) -> bool {
        loop {
            let entering = (0..enter_limit)
                .filter(|c| !self.basis.contains(c))
                .find(|&c| self.reduced_cost(cost, c).is_positive());
            let Some(c) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leaving {
                    None => true,
                    Some((best_r, best)) => match ratio.cmp(best) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[r] < self.basis[*best_r],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Solves `lp` exactly. Ties are broken by index throughout, so identical
/// input always yields the identical certificate.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.check_shape()?;
    let nv = lp.num_vars();
    let nrows = lp.constraints.len();

    // Normalize to nonnegative right-hand sides; `flip[r]` records a sign
    // change, which also swaps ≤ and ≥.
    let mut flip = vec![false; nrows];
    let mut relations = Vec::with_capacity(nrows);
    for (r, c) in lp.constraints.iter().enumerate() {
        flip[r] = c.rhs.is_negative();
        relations.push(match (c.relation, flip[r]) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (rel, _) => rel,
        });
    }
    let slack_rows: Vec<usize> = (0..nrows)
        .filter(|&r| relations[r] != Relation::Eq)
        .collect();
    let ns = slack_rows.len();
    let art0 = nv + ns;
    let cols = art0 + nrows;

    let mut rows = Vec::with_capacity(nrows);
    for (r, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = if flip[r] { -a } else { a.clone() };
        }
        if let Some(s) = slack_rows.iter().position(|&sr| sr == r) {
            row[nv + s] = match relations[r] {
                Relation::Le => Rational::one(),
                _ => -Rational::one(),
            };
        }
        row[art0 + r] = Rational::one();
        row[cols] = if flip[r] { -&c.rhs } else { c.rhs.clone() };
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (art0..cols).collect(),
        cols,
    };

    // Phase 1: maximize minus the sum of artificials.
    let mut phase1 = vec![Rational::zero(); cols];
    for c in phase1.iter_mut().skip(art0) {
        *c = -Rational::one();
    }
    if !t.maximize(&phase1, cols) {
        return Err(Error::Internal("phase 1 reported unbounded".into()));
    }
    let infeasibility: Rational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art0)
        .map(|(r, _)| t.rhs(r).clone())
        .sum();
    if infeasibility.is_positive() {
        let cert = farkas_from_phase1(&t, art0, nrows, &flip);
        if !cert.verifies(lp) {
            return Err(Error::Internal("Farkas certificate failed to verify".into()));
        }
        return Ok(LpOutcome::Infeasible(cert));
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            match (0..art0).find(|&c| !t.rows[r][c].is_zero()) {
                Some(c) => t.pivot(r, c),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2 on the original objective, artificials barred from entering.
    let mut phase2 = vec![Rational::zero(); cols];
    for (j, a) in lp.objective.iter().enumerate() {
        phase2[j] = match lp.sense {
            Sense::Maximize => a.clone(),
            Sense::Minimize => -a,
        };
    }
    if !t.maximize(&phase2, art0) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut point = vec![Rational::zero(); nv];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < nv {
            point[b] = t.rhs(r).clone();
        }
    }
    if !lp.is_feasible_point(&point) {
        return Err(Error::Internal("simplex point violates a constraint".into()));
    }
    let value = lp.objective_value(&point);
    Ok(LpOutcome::Optimal { value, point })
}

/// Duals of the phase-1 problem `min Σa` read off the artificial columns,
/// which hold `B⁻¹`.
fn farkas_from_phase1(t: &Tableau, art0: usize, nrows: usize, flip: &[bool]) -> FarkasCertificate {
    let multipliers = (0..nrows)
        .map(|k| {
            let y: Rational = t
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= art0)
                .map(|(r, _)| t.rows[r][art0 + k].clone())
                .sum();
            if flip[k] {
                -y
            } else {
                y
            }
        })
        .collect();
    FarkasCertificate { multipliers }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Convex weights, one per generator, reproducing the target exactly.
    InHull(Vec<Rational>),
    NotInHull(FarkasCertificate),
}

impl Membership {
    pub fn is_in_hull(&self) -> bool {
        matches!(self, Membership::InHull(_))
    }
}

/// The feasibility program behind [`convex_membership`]: weights `λ ≥ 0`
/// with `Σλ = 1` (first row) and `Σ λ_k g_k = target` (one row per
/// coordinate).
pub fn membership_program(target: &[Rational], generators: &[Vec<Rational>]) -> Result<LinearProgram> {
    if let Some(g) = generators.iter().find(|g| g.len() != target.len()) {
        return Err(Error::Dimension(format!(
            "generator of length {} for a target of length {}",
            g.len(),
            target.len()
        )));
    }
    let mut lp = LinearProgram::new(
        (0..generators.len()).map(|k| format!("w{k}")).collect(),
        Sense::Maximize,
    );
    lp.add_constraint(vec![Rational::one(); generators.len()], Relation::Eq, Rational::one());
    for (d, x) in target.iter().enumerate() {
        lp.add_constraint(
            generators.iter().map(|g| g[d].clone()).collect(),
            Relation::Eq,
            x.clone(),
        );
    }
    Ok(lp)
}

/// Is `target` a convex combination of `generators`?
pub fn convex_membership(target: &[Rational], generators: &[Vec<Rational>]) -> Result<Membership> {
    let lp = membership_program(target, generators)?;
    match solve(&lp)? {
        LpOutcome::Optimal { point, .. } => Ok(Membership::InHull(point)),
        LpOutcome::Infeasible(cert) => Ok(Membership::NotInHull(cert)),
        LpOutcome::Unbounded => Err(Error::Internal("feasibility program unbounded".into())),
    }
}
