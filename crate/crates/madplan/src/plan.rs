//! Bounded plan search over pointed structures.
//!
//! Both planners explore sequences of ground action instances in
//! lexicographic order (action name first, then arguments) and stop at a
//! caller-supplied length bound. Successor states come from
//! [`succ`](crate::transition::succ); a sequence whose next step is
//! undefined is pruned rather than reported as an error.
//!
//! The two strategies differ in which plan they commit to:
//!
//! * [`depth_plan`] tests the goal on every successor of a node as the
//!   successors are generated, before descending into any of them, and
//!   returns the first hit. The plan it finds is not necessarily a
//!   shortest one.
//! * [`breadth_plan`] enumerates sequences by increasing length and
//!   returns a shortest plan, lexicographically first among plans of that
//!   length.
//!
//! Neither planner prunes revisited states: updates rename states on
//! every layered step, so structural repeats are routine and the length
//! bound is the sole termination guard.

use crate::lang::{ActionInstance, Domain, LangError, Query};
use crate::model::{Formula, PointedStructure};
use crate::transition::{succ, succ_seq, SuccessorResult, TransitionError, UndefinedReason};
use std::fmt;
use thiserror::Error;

/// Search discipline for [`plan`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Depth-first search with the goal tested as successors are generated.
    Dfs,
    /// Iterative lengthening; finds a shortest plan.
    Bfs,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Dfs => "dfs",
            Strategy::Bfs => "bfs",
        })
    }
}

/// A planning problem: reach `goal` from `initial` in at most `max_len`
/// steps, drawing actions from the ground instances of `domain`.
#[derive(Clone, Debug)]
pub struct PlanRequest<'a> {
    pub initial: PointedStructure,
    pub domain: &'a Domain,
    pub goal: Formula,
    pub max_len: usize,
    pub strategy: Strategy,
}

/// Outcome of a bounded search.
#[derive(Clone, PartialEq, Debug)]
pub enum PlanResult {
    /// A sequence of at most `max_len` actions whose final state satisfies
    /// the goal. Replaying `plan` through the successor function from the
    /// initial state yields `final_state`.
    Found {
        plan: Vec<ActionInstance>,
        final_state: PointedStructure,
    },
    /// No sequence within the bound reaches the goal.
    NotFoundWithinBound,
}

/// Truth status of a query's goal after its action sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QueryVerdict {
    /// The sequence is defined and the goal holds at the resulting point.
    Holds,
    /// The sequence is defined but the goal fails at the resulting point.
    Fails,
    /// Some step of the sequence is undefined.
    Undefined(UndefinedReason),
}

impl fmt::Display for QueryVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryVerdict::Holds => f.write_str("holds"),
            QueryVerdict::Fails => f.write_str("fails"),
            QueryVerdict::Undefined(reason) => write!(f, "undefined ({reason})"),
        }
    }
}

/// An argument to the planners was malformed.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}

/// Evaluates a query against an initial pointed structure.
///
/// The query's actions are applied left to right; if every step is
/// defined, the goal is evaluated at the resulting point.
pub fn holds_after(initial: &PointedStructure, q: &Query) -> Result<QueryVerdict, TransitionError> {
    match succ_seq(initial, &q.actions)? {
        SuccessorResult::Defined(p) => Ok(if p.entails(&q.goal)? {
            QueryVerdict::Holds
        } else {
            QueryVerdict::Fails
        }),
        SuccessorResult::Undefined(reason) => Ok(QueryVerdict::Undefined(reason)),
    }
}

/// Runs the search selected by `r.strategy`.
pub fn plan(r: &PlanRequest) -> Result<PlanResult, PlanError> {
    match r.strategy {
        Strategy::Dfs => depth_plan(r),
        Strategy::Bfs => breadth_plan(r),
    }
}

/// Depth-first bounded search.
///
/// At each node the goal is tested on every defined successor, in action
/// order, before the search descends into any of them; the first
/// satisfying successor ends the search. An empty plan is returned when
/// the initial state already satisfies the goal.
pub fn depth_plan(r: &PlanRequest) -> Result<PlanResult, PlanError> {
    let actions = r.domain.instances()?;
    let search = Search {
        actions: &actions,
        goal: &r.goal,
    };
    if search.satisfies(&r.initial)? {
        return Ok(PlanResult::Found {
            plan: Vec::new(),
            final_state: r.initial.clone(),
        });
    }
    Ok(match search.dfs(&r.initial, r.max_len)? {
        Some((plan, final_state)) => PlanResult::Found { plan, final_state },
        None => PlanResult::NotFoundWithinBound,
    })
}

/// Iterative-lengthening bounded search.
///
/// Sequences are enumerated by length, 0 up to the bound, each length in
/// lexicographic action order, so the returned plan is a shortest one and
/// lexicographically first among plans of that length.
pub fn breadth_plan(r: &PlanRequest) -> Result<PlanResult, PlanError> {
    let actions = r.domain.instances()?;
    let search = Search {
        actions: &actions,
        goal: &r.goal,
    };
    for len in 0..=r.max_len {
        if let Some((plan, final_state)) = search.exact_length(&r.initial, len)? {
            return Ok(PlanResult::Found { plan, final_state });
        }
    }
    Ok(PlanResult::NotFoundWithinBound)
}

struct Search<'a> {
    actions: &'a [ActionInstance],
    goal: &'a Formula,
}

type Hit = Option<(Vec<ActionInstance>, PointedStructure)>;

impl Search<'_> {
    fn satisfies(&self, p: &PointedStructure) -> Result<bool, PlanError> {
        Ok(p.entails(self.goal).map_err(TransitionError::from)?)
    }

    /// Expands `p`, testing the goal on each defined successor before
    /// recursing into any of them.
    fn dfs(&self, p: &PointedStructure, depth_left: usize) -> Result<Hit, PlanError> {
        if depth_left == 0 {
            return Ok(None);
        }
        let mut frontier = Vec::new();
        for a in self.actions {
            let Some(next) = succ(p, a)?.defined() else {
                continue;
            };
            if self.satisfies(&next)? {
                return Ok(Some((vec![a.clone()], next)));
            }
            frontier.push((a, next));
        }
        for (a, next) in frontier {
            if let Some((mut plan, final_state)) = self.dfs(&next, depth_left - 1)? {
                plan.insert(0, a.clone());
                return Ok(Some((plan, final_state)));
            }
        }
        Ok(None)
    }

    /// Finds the lexicographically first defined sequence of exactly
    /// `remaining` actions whose end point satisfies the goal.
    fn exact_length(&self, p: &PointedStructure, remaining: usize) -> Result<Hit, PlanError> {
        if remaining == 0 {
            return Ok(if self.satisfies(p)? {
                Some((Vec::new(), p.clone()))
            } else {
                None
            });
        }
        for a in self.actions {
            let Some(next) = succ(p, a)?.defined() else {
                continue;
            };
            if let Some((mut plan, final_state)) = self.exact_length(&next, remaining - 1)? {
                plan.insert(0, a.clone());
                return Ok(Some((plan, final_state)));
            }
        }
        Ok(None)
    }
}
