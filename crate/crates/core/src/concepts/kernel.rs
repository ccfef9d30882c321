use rayon::prelude::*;

use crate::coalition::Coalition;
use crate::engine::{Engine, Maximizer};
use crate::error::{Error, Result};
use crate::game::{check_imputation, PayoffVector, WorthOracle};
use crate::rational::Rational;
use crate::repr::Game;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelVerdict {
    Member,
    /// `s_{i,j}(x) > s_{j,i}(x)` although `x_j > v({j})`.
    Violated {
        i: usize,
        j: usize,
        s_ij: Rational,
        s_ji: Rational,
    },
}

impl KernelVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, KernelVerdict::Member)
    }
}

pub(crate) fn require_imputation(game: &Game, x: &PayoffVector) -> Result<()> {
    let report = check_imputation(game, x)?;
    if report.is_imputation() {
        Ok(())
    } else {
        Err(Error::NotAnImputation(report.describe(Some(game.players()))))
    }
}

/// Kernel membership by exact surplus maximization. The first violated
/// ordered pair in lexicographic order is reported.
pub fn kernel_check(game: &Game, x: &PayoffVector, engine: Engine) -> Result<KernelVerdict> {
    let max = Maximizer::new(game, engine)?;
    kernel_check_with(&max, x)
}

pub fn kernel_check_with(max: &Maximizer<'_>, x: &PayoffVector) -> Result<KernelVerdict> {
    let game = max.game();
    require_imputation(game, x)?;
    let n = game.players().len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let surpluses: Vec<Rational> = pairs
        .par_iter()
        .map(|&(i, j)| max.surplus(i, j, x))
        .collect::<Result<_>>()?;
    let s = |i: usize, j: usize| {
        let k = i * (n - 1) + if j > i { j - 1 } else { j };
        &surpluses[k]
    };
    for &(i, j) in &pairs {
        if *x.get(j) > game.worth(Coalition::singleton(j)) && s(i, j) > s(j, i) {
            return Ok(KernelVerdict::Violated {
                i,
                j,
                s_ij: s(i, j).clone(),
                s_ji: s(j, i).clone(),
            });
        }
    }
    Ok(KernelVerdict::Member)
}
