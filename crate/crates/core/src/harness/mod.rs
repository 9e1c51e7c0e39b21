//! Scenario files, the exact evaluation of the inequalities, reports and
//! the seeded self-test.

pub mod report;
pub mod scenario;
pub mod selftest;
pub mod theorem;

use crate::error::Result;
use crate::valfield::{PadicRationals, TadicFunctionField, ValuedFieldConfig};

use scenario::{Problem, Scenario};

/// A problem over whichever field the scenario names.
#[derive(Clone, Debug)]
pub enum AnyProblem {
    Padic(Problem<PadicRationals>),
    Tadic(Problem<TadicFunctionField>),
}

impl AnyProblem {
    pub fn build(sc: &Scenario) -> Result<Self> {
        Ok(match sc.field {
            ValuedFieldConfig::Padic { p } => AnyProblem::Padic(Problem::build(sc, PadicRationals::new(p)?)?),
            ValuedFieldConfig::Tadic { p } => AnyProblem::Tadic(Problem::build(sc, TadicFunctionField::new(p)?)?),
        })
    }
}

/// Runs `$body` with `$pb` bound to the concrete problem.
#[macro_export]
macro_rules! with_problem {
    ($any:expr, $pb:ident => $body:expr) => {
        match $any {
            $crate::harness::AnyProblem::Padic($pb) => $body,
            $crate::harness::AnyProblem::Tadic($pb) => $body,
        }
    };
}
