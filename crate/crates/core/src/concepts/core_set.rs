use num::Signed;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::engine::{Engine, Maximizer};
use crate::error::Result;
use crate::game::{check_enumerable, PayoffVector, WorthOracle};
use crate::lp::{extract_iis_indices, is_feasible, solve, ConstraintTag, LinConstraint, LinSystem, LpOutcome, Relation};
use crate::rational::Rational;
use crate::repr::Game;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreVerdict {
    pub member: bool,
    /// A coalition of maximum excess when that excess is positive, with the
    /// deficit `v(S) − x(S)`.
    pub blocking: Option<(Coalition, Rational)>,
    /// `x(N) − v(N)` when `x` distributes more than the grand coalition has.
    pub overpaid: Option<Rational>,
}

/// `x ∈ C(G)` iff `x(N) = v(N)` and no coalition has positive excess.
pub fn core_check(game: &Game, x: &PayoffVector, engine: Engine) -> Result<CoreVerdict> {
    let max = Maximizer::new(game, engine)?;
    core_check_with(&max, x)
}

pub fn core_check_with(max: &Maximizer<'_>, x: &PayoffVector) -> Result<CoreVerdict> {
    let game = max.game();
    let n = game.players().len();
    x.check_dimension(n)?;
    let over = x.total() - game.worth(Coalition::grand(n));
    let overpaid = over.is_positive().then_some(over);
    let (value, s) = max
        .max_excess(x, Coalition::EMPTY, Coalition::EMPTY)?
        .expect("the family of all coalitions is non-empty");
    let blocking = value.is_positive().then_some((s, value));
    Ok(CoreVerdict {
        member: blocking.is_none() && overpaid.is_none(),
        blocking,
        overpaid,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreMode {
    /// One constraint per non-empty coalition.
    FullLp,
    /// Separation by maximum excess, starting from individual rationality.
    #[default]
    ConstraintGeneration,
}

/// At most `n` coalitions whose constraints `x(S) ≥ v(S)`, together with
/// `x(N) ≤ v(N)`, admit no solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptinessCertificate {
    pub coalitions: Vec<(Coalition, Rational)>,
    pub grand_worth: Rational,
}

impl EmptinessCertificate {
    pub fn system(&self, n: usize) -> LinSystem {
        let mut sys = LinSystem::new(n);
        for (s, w) in &self.coalitions {
            sys.push(LinConstraint::over_coalition(n, *s, Relation::Ge, w.clone(), ConstraintTag::Coalition(*s)));
        }
        sys.push(efficiency(n, self.grand_worth.clone()));
        sys
    }

    /// Re-checks size and infeasibility from scratch.
    pub fn verify<G: WorthOracle + ?Sized>(&self, game: &G) -> bool {
        let n = game.player_count();
        self.coalitions.len() <= n
            && self.grand_worth == game.worth(Coalition::grand(n))
            && self.coalitions.iter().all(|(s, w)| !s.is_empty() && *w == game.worth(*s))
            && !is_feasible(&self.system(n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreNonEmptiness {
    NonEmpty(PayoffVector),
    Empty(EmptinessCertificate),
}

fn efficiency(n: usize, grand: Rational) -> LinConstraint {
    LinConstraint::over_coalition(n, Coalition::grand(n), Relation::Le, grand, ConstraintTag::Efficiency)
}

fn coalition_constraint(game: &Game, n: usize, s: Coalition) -> LinConstraint {
    LinConstraint::over_coalition(n, s, Relation::Ge, game.worth(s), ConstraintTag::Coalition(s))
}

fn certificate(game: &Game, sys: &LinSystem) -> Result<EmptinessCertificate> {
    let n = game.players().len();
    let iis = extract_iis_indices(sys, |c| c.tag == ConstraintTag::Efficiency)?;
    let mut coalitions: Vec<(Coalition, Rational)> = iis
        .iter()
        .filter_map(|&k| match sys.constraints[k].tag {
            ConstraintTag::Coalition(s) => Some((s, sys.constraints[k].rhs.clone())),
            _ => None,
        })
        .collect();
    coalitions.sort_by(|a, b| a.0.cmp(&b.0));
    let cert = EmptinessCertificate {
        coalitions,
        grand_worth: game.worth(Coalition::grand(n)),
    };
    assert!(cert.verify(game), "emptiness certificate failed re-verification");
    Ok(cert)
}

fn nonempty(max: &Maximizer<'_>, point: Vec<Rational>) -> Result<CoreNonEmptiness> {
    let x = PayoffVector::new(point);
    let verdict = core_check_with(max, &x)?;
    assert!(verdict.member, "core point failed re-verification");
    Ok(CoreNonEmptiness::NonEmpty(x))
}

/// Decides `C(G) ≠ ∅`, returning a core point or a certificate of at most
/// `n` coalitions.
pub fn core_nonempty(game: &Game, mode: CoreMode, engine: Engine) -> Result<CoreNonEmptiness> {
    let n = game.players().len();
    let max = Maximizer::new(game, engine)?;
    match mode {
        CoreMode::FullLp => {
            check_enumerable(n)?;
            let mut sys = LinSystem::new(n);
            for s in Coalition::grand(n).subsets().skip(1) {
                sys.push(coalition_constraint(game, n, s));
            }
            sys.push(efficiency(n, game.worth(Coalition::grand(n))));
            match solve(&sys, None) {
                LpOutcome::Infeasible => Ok(CoreNonEmptiness::Empty(certificate(game, &sys)?)),
                LpOutcome::Feasible { point, .. } | LpOutcome::Unbounded { point, .. } => nonempty(&max, point),
            }
        }
        CoreMode::ConstraintGeneration => {
            let mut sys = LinSystem::new(n);
            for i in 0..n {
                sys.push(coalition_constraint(game, n, Coalition::singleton(i)));
            }
            if n > 1 {
                sys.push(coalition_constraint(game, n, Coalition::grand(n)));
            }
            sys.push(efficiency(n, game.worth(Coalition::grand(n))));
            loop {
                let point = match solve(&sys, None) {
                    LpOutcome::Infeasible => return Ok(CoreNonEmptiness::Empty(certificate(game, &sys)?)),
                    LpOutcome::Feasible { point, .. } | LpOutcome::Unbounded { point, .. } => point,
                };
                let x = PayoffVector::new(point);
                let (value, s) = max
                    .max_excess(&x, Coalition::EMPTY, Coalition::EMPTY)?
                    .expect("non-empty family");
                if !value.is_positive() {
                    return nonempty(&max, x.values().to_vec());
                }
                debug_assert!(!sys.tags().any(|t| *t == ConstraintTag::Coalition(s)));
                sys.push(coalition_constraint(game, n, s));
            }
        }
    }
}
