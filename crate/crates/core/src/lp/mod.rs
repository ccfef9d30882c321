//! Exact rational linear programming: feasibility and optimization,
//! irreducible infeasible subsystems, and feasibility of systems mixing
//! strict and weak inequalities.

mod simplex;

use std::fmt;

use num::{One, Signed, Zero};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::rational::Rational;
use simplex::{minimize, vertex_farkas, SimplexResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

/// Where a constraint came from, kept so that certificates can be reported
/// in terms of coalitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintTag {
    Coalition(Coalition),
    Efficiency,
    Custom(String),
}

/// `coeffs · x  (≥ | ≤ | =)  rhs`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
    pub tag: ConstraintTag,
}

impl LinConstraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational, tag: ConstraintTag) -> Self {
        LinConstraint {
            coeffs,
            relation,
            rhs,
            tag,
        }
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational, tag: ConstraintTag) -> Self {
        Self::new(coeffs, Relation::Ge, rhs, tag)
    }

    pub fn le(coeffs: Vec<Rational>, rhs: Rational, tag: ConstraintTag) -> Self {
        Self::new(coeffs, Relation::Le, rhs, tag)
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational, tag: ConstraintTag) -> Self {
        Self::new(coeffs, Relation::Eq, rhs, tag)
    }

    /// `Σ_{k∈S} x_k (rel) rhs` over `dim` variables.
    pub fn over_coalition(dim: usize, s: Coalition, relation: Relation, rhs: Rational, tag: ConstraintTag) -> Self {
        let coeffs = (0..dim)
            .map(|k| if s.contains(k) { Rational::one() } else { Rational::zero() })
            .collect();
        Self::new(coeffs, relation, rhs, tag)
    }

    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .filter(|(a, _)| !a.is_zero())
            .fold(Rational::zero(), |acc, (a, x)| acc + a * x)
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// Strict version of the inequality; equalities are never strictly met.
    pub fn strictly_satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Ge => lhs > self.rhs,
            Relation::Le => lhs < self.rhs,
            Relation::Eq => false,
        }
    }

    fn halves(&self) -> Vec<LinConstraint> {
        match self.relation {
            Relation::Eq => vec![
                LinConstraint {
                    relation: Relation::Ge,
                    ..self.clone()
                },
                LinConstraint {
                    relation: Relation::Le,
                    ..self.clone()
                },
            ],
            _ => vec![self.clone()],
        }
    }
}

impl fmt::Debug for LinConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| format!("{a}·x{k}"))
            .collect();
        let rel = match self.relation {
            Relation::Ge => "≥",
            Relation::Le => "≤",
            Relation::Eq => "=",
        };
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{lhs} {rel} {} [{:?}]", self.rhs, self.tag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinSystem {
    pub dim: usize,
    pub constraints: Vec<LinConstraint>,
}

impl LinSystem {
    pub fn new(dim: usize) -> Self {
        LinSystem {
            dim,
            constraints: Vec::new(),
        }
    }

    pub fn from_constraints(dim: usize, constraints: Vec<LinConstraint>) -> Result<Self> {
        let mut sys = LinSystem::new(dim);
        for c in constraints {
            sys.try_push(c)?;
        }
        Ok(sys)
    }

    pub fn try_push(&mut self, c: LinConstraint) -> Result<()> {
        if c.coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: c.coeffs.len(),
            });
        }
        self.constraints.push(c);
        Ok(())
    }

    /// # Panics
    /// If the constraint has the wrong number of coefficients.
    pub fn push(&mut self, c: LinConstraint) {
        self.try_push(c).expect("constraint dimension");
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.dim && self.constraints.iter().all(|c| c.satisfied_by(point))
    }

    pub fn subsystem(&self, indices: &[usize]) -> LinSystem {
        LinSystem {
            dim: self.dim,
            constraints: indices.iter().map(|&i| self.constraints[i].clone()).collect(),
        }
    }

    pub fn tags(&self) -> impl Iterator<Item = &ConstraintTag> {
        self.constraints.iter().map(|c| &c.tag)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// A feasible point; with an objective it is an optimal vertex and
    /// `value` holds the optimum.
    Feasible { point: Vec<Rational>, value: Option<Rational> },
    Infeasible,
    /// `point + t·direction` is feasible for every `t ≥ 0` and improves the
    /// objective without bound.
    Unbounded { point: Vec<Rational>, direction: Vec<Rational> },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Solves `sys`, optionally optimizing `objective` in the given sense.
///
/// # Panics
/// If `objective` does not have `sys.dim` entries.
pub fn solve(sys: &LinSystem, objective: Option<(&[Rational], Sense)>) -> LpOutcome {
    let cost: Option<Vec<Rational>> = objective.map(|(c, sense)| {
        assert_eq!(c.len(), sys.dim, "objective dimension");
        match sense {
            Sense::Min => c.to_vec(),
            Sense::Max => c.iter().map(|v| -v).collect(),
        }
    });
    match minimize(sys.dim, &sys.constraints, cost.as_deref()) {
        SimplexResult::Infeasible { farkas } => {
            debug_assert!(is_farkas_certificate(sys, &farkas));
            LpOutcome::Infeasible
        }
        SimplexResult::Optimal { point } => {
            assert!(sys.satisfied_by(&point), "simplex returned an infeasible point");
            let value = objective.map(|(c, _)| dot(c, &point));
            LpOutcome::Feasible { point, value }
        }
        SimplexResult::Unbounded { point, direction } => {
            assert!(sys.satisfied_by(&point), "simplex returned an infeasible point");
            LpOutcome::Unbounded { point, direction }
        }
    }
}

pub fn is_feasible(sys: &LinSystem) -> bool {
    solve(sys, None).is_feasible()
}

/// Multipliers `λ` with `λ_i ≥ 0` on `≥` rows, `λ_i ≤ 0` on `≤` rows,
/// `Σ λ_i a_i = 0` and `Σ λ_i b_i > 0`, or `None` when `sys` is feasible.
pub fn farkas_certificate(sys: &LinSystem) -> Option<Vec<Rational>> {
    match minimize(sys.dim, &sys.constraints, None) {
        SimplexResult::Infeasible { farkas } => Some(farkas),
        _ => None,
    }
}

pub fn is_farkas_certificate(sys: &LinSystem, lambda: &[Rational]) -> bool {
    if lambda.len() != sys.len() {
        return false;
    }
    let signs_ok = sys.constraints.iter().zip(lambda).all(|(c, l)| match c.relation {
        Relation::Ge => !l.is_negative(),
        Relation::Le => !l.is_positive(),
        Relation::Eq => true,
    });
    let combined_zero = (0..sys.dim).all(|k| {
        sys.constraints
            .iter()
            .zip(lambda)
            .fold(Rational::zero(), |acc, (c, l)| acc + l * &c.coeffs[k])
            .is_zero()
    });
    let rhs = sys
        .constraints
        .iter()
        .zip(lambda)
        .fold(Rational::zero(), |acc, (c, l)| acc + l * &c.rhs);
    signs_ok && combined_zero && rhs.is_positive()
}

/// Deletion filter for an infeasible system. Returns the indices (into
/// `sys.constraints`) of an inclusion-minimal infeasible subsystem that
/// contains every constraint for which `is_protected` holds.
pub fn extract_iis_indices(sys: &LinSystem, is_protected: impl Fn(&LinConstraint) -> bool) -> Result<Vec<usize>> {
    // equalities are split into two halves; `owner` maps halves back
    let mut halves = Vec::new();
    let mut owner = Vec::new();
    for (idx, c) in sys.constraints.iter().enumerate() {
        for h in c.halves() {
            halves.push(h);
            owner.push(idx);
        }
    }
    let as_ge: Vec<(Vec<Rational>, Rational)> = halves
        .iter()
        .map(|h| match h.relation {
            Relation::Le => (h.coeffs.iter().map(|a| -a).collect(), -&h.rhs),
            _ => (h.coeffs.clone(), h.rhs.clone()),
        })
        .collect();
    let lambda = vertex_farkas(sys.dim, &as_ge).ok_or(Error::NotInfeasible)?;
    let protected: Vec<bool> = owner.iter().map(|&o| is_protected(&sys.constraints[o])).collect();
    // the vertex support is already irreducible; the filter below only
    // matters once protected constraints are added back
    let mut keep: Vec<usize> = (0..halves.len())
        .filter(|&h| protected[h] || !lambda[h].is_zero())
        .collect();

    let infeasible = |set: &[usize]| {
        let rows: Vec<LinConstraint> = set.iter().map(|&h| halves[h].clone()).collect();
        matches!(minimize(sys.dim, &rows, None), SimplexResult::Infeasible { .. })
    };
    debug_assert!(infeasible(&keep));
    let mut pos = 0;
    while pos < keep.len() {
        let h = keep[pos];
        if protected[h] {
            pos += 1;
            continue;
        }
        let trial: Vec<usize> = keep.iter().copied().filter(|&k| k != h).collect();
        if infeasible(&trial) {
            keep = trial;
        } else {
            pos += 1;
        }
    }

    let unprotected = keep.iter().filter(|&&h| !protected[h]).count();
    assert!(
        unprotected <= sys.dim + 1,
        "minimal infeasible family exceeds the Helly bound"
    );
    let mut out: Vec<usize> = keep.iter().map(|&h| owner[h]).collect();
    out.dedup();
    Ok(out)
}

/// Inclusion-minimal infeasible subsystem keeping every constraint whose tag
/// is listed in `protected`.
///
/// When exactly one constraint is protected and the rest of the system is
/// feasible on its own, at most `dim` unprotected constraints remain.
pub fn extract_iis(sys: &LinSystem, protected: &[ConstraintTag]) -> Result<LinSystem> {
    let indices = extract_iis_indices(sys, |c| protected.contains(&c.tag))?;
    Ok(sys.subsystem(&indices))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpenOutcome {
    Empty,
    /// A point satisfying the strict constraints strictly, each with margin
    /// at least `slack`.
    Witness { point: Vec<Rational>, slack: Rational },
}

impl OpenOutcome {
    pub fn is_empty(&self) -> bool {
        matches!(self, OpenOutcome::Empty)
    }
}

fn tightened(sys: &LinSystem, strict: &[bool]) -> LinSystem {
    let dim = sys.dim + 1;
    let constraints = sys
        .constraints
        .iter()
        .zip(strict)
        .map(|(c, &s)| {
            let mut coeffs = c.coeffs.clone();
            coeffs.push(match (s, c.relation) {
                (false, _) => Rational::zero(),
                (true, Relation::Ge) => -Rational::one(),
                (true, _) => Rational::one(),
            });
            LinConstraint { coeffs, ..c.clone() }
        })
        .collect();
    LinSystem { dim, constraints }
}

fn strict_mask(sys: &LinSystem, strict: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; sys.len()];
    for &i in strict {
        let c = sys
            .constraints
            .get(i)
            .ok_or_else(|| Error::InvalidSystem(format!("strict index {i} out of range")))?;
        if c.relation == Relation::Eq {
            return Err(Error::InvalidSystem(format!("constraint {i} is an equality and cannot be strict")));
        }
        mask[i] = true;
    }
    Ok(mask)
}

fn open_feasible_masked(sys: &LinSystem, strict: &[bool]) -> OpenOutcome {
    let mut t = tightened(sys, strict);
    let mut objective = vec![Rational::zero(); t.dim];
    objective[sys.dim] = Rational::one();
    let outcome = match solve(&t, Some((&objective, Sense::Max))) {
        LpOutcome::Unbounded { .. } => {
            let mut cap = vec![Rational::zero(); t.dim];
            cap[sys.dim] = Rational::one();
            t.push(LinConstraint::le(cap, Rational::one(), ConstraintTag::Custom("slack cap".into())));
            solve(&t, Some((&objective, Sense::Max)))
        }
        other => other,
    };
    match outcome {
        LpOutcome::Feasible { mut point, value } => {
            let slack = value.expect("objective was given");
            if !slack.is_positive() {
                return OpenOutcome::Empty;
            }
            point.truncate(sys.dim);
            debug_assert!(sys
                .constraints
                .iter()
                .zip(strict)
                .all(|(c, &s)| if s { c.strictly_satisfied_by(&point) } else { c.satisfied_by(&point) }));
            OpenOutcome::Witness { point, slack }
        }
        LpOutcome::Infeasible => OpenOutcome::Empty,
        LpOutcome::Unbounded { .. } => unreachable!("slack is capped"),
    }
}

/// Decides whether the constraints indexed by `strict` can all hold strictly
/// while the others hold weakly, by maximizing a common margin `δ`.
pub fn open_feasible(sys: &LinSystem, strict: &[usize]) -> Result<OpenOutcome> {
    let mask = strict_mask(sys, strict)?;
    Ok(open_feasible_masked(sys, &mask))
}

/// Deletion filter for an empty mixed strict/weak system: indices of an
/// inclusion-minimal subsystem that is still empty and contains every index
/// for which `is_protected` holds.
pub fn open_iis_indices(sys: &LinSystem, strict: &[usize], is_protected: impl Fn(usize) -> bool) -> Result<Vec<usize>> {
    let mask = strict_mask(sys, strict)?;
    if !open_feasible_masked(sys, &mask).is_empty() {
        return Err(Error::NotInfeasible);
    }
    let empty = |set: &[usize]| {
        let sub = sys.subsystem(set);
        let sub_mask: Vec<bool> = set.iter().map(|&i| mask[i]).collect();
        open_feasible_masked(&sub, &sub_mask).is_empty()
    };
    let mut keep: Vec<usize> = (0..sys.len()).collect();
    let mut pos = 0;
    while pos < keep.len() {
        let i = keep[pos];
        if is_protected(i) {
            pos += 1;
            continue;
        }
        let trial: Vec<usize> = keep.iter().copied().filter(|&k| k != i).collect();
        if empty(&trial) {
            keep = trial;
        } else {
            pos += 1;
        }
    }
    Ok(keep)
}
