//! The classical query game: an oracle reveals `pi^x(y)` for chosen
//! exponents `x`, and the player must name the order of `y` under `pi`.
//!
//! Since `pi^12` is the identity for every permutation of four elements,
//! exponents `1..=12` cover every possible observation.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::exec::{self, Execution};
use crate::lp::{LinearProgram, LpScalar, Relation};
use crate::perm::{Permutation, ELEMENTS};

/// Largest exponent that needs to be considered.
pub const MAX_EXPONENT: u32 = 12;
/// Possible orders.
pub const ORDERS: usize = 4;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

/// What the oracle reports for a list of exponents.
pub fn observe(pi: &Permutation, y: usize, queries: &[u32]) -> Vec<usize> {
    queries
        .iter()
        .map(|&x| pi.power(x as u64).apply(y))
        .collect()
}

fn order(pi: &Permutation, y: usize) -> usize {
    pi.order_of(y).expect("y is validated by callers")
}

/// A fixed list of exponents with a guess distribution for every
/// observation history.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    pub weight: Q,
    pub queries: Vec<u32>,
    /// Observation history -> probabilities of guessing `r = 1..=4`.
    pub guess: BTreeMap<Vec<usize>, [Q; ORDERS]>,
}

/// A randomized mixture of non-adaptive query plans.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryStrategy {
    pub plans: Vec<QueryPlan>,
}

impl QueryStrategy {
    pub fn deterministic(
        queries: Vec<u32>,
        table: impl IntoIterator<Item = (Vec<usize>, usize)>,
    ) -> Self {
        let guess = table
            .into_iter()
            .map(|(obs, r)| {
                let row = std::array::from_fn(|k| if k + 1 == r { Q::one() } else { Q::zero() });
                (obs, row)
            })
            .collect();
        Self {
            plans: vec![QueryPlan {
                weight: Q::one(),
                queries,
                guess,
            }],
        }
    }

    /// Largest number of queries any plan makes.
    pub fn depth(&self) -> usize {
        self.plans
            .iter()
            .map(|p| p.queries.len())
            .max()
            .unwrap_or(0)
    }

    /// Probability of naming the order of `y` under `pi`.
    pub fn success(&self, pi: &Permutation, y: usize) -> Q {
        let r = order(pi, y);
        self.plans.iter().fold(Q::zero(), |acc, plan| {
            let obs = observe(pi, y, &plan.queries);
            match plan.guess.get(&obs) {
                Some(row) => acc + &plan.weight * &row[r - 1],
                None => acc,
            }
        })
    }

    /// Worst case over all 24 permutations for a fixed `y`.
    pub fn min_success(&self, y: usize) -> Q {
        Permutation::all()
            .iter()
            .map(|pi| self.success(pi, y))
            .min()
            .expect("24 permutations")
    }
}

/// The single-query strategy that asks for `pi^3(y)`: a fixed point means
/// order 1 or 3, anything else order 2 or 4, each guessed with
/// probability 1/2.
pub fn cube_query_strategy(y: usize) -> QueryStrategy {
    let guess = (0..ELEMENTS)
        .map(|z| {
            let row = if z == y {
                [q(1, 2), q(0, 1), q(1, 2), q(0, 1)]
            } else {
                [q(0, 1), q(1, 2), q(0, 1), q(1, 2)]
            };
            (vec![z], row)
        })
        .collect();
    QueryStrategy {
        plans: vec![QueryPlan {
            weight: Q::one(),
            queries: vec![3],
            guess,
        }],
    }
}

/// Queries `pi^2(y)` and `pi^3(y)` and reads off the order from which of
/// them return to `y`.
pub fn two_query_witness(y: usize) -> QueryStrategy {
    let mut table = Vec::new();
    for z2 in 0..ELEMENTS {
        for z3 in 0..ELEMENTS {
            let r = match (z2 == y, z3 == y) {
                (true, true) => 1,
                (true, false) => 2,
                (false, true) => 3,
                (false, false) => 4,
            };
            table.push((vec![z2, z3], r));
        }
    }
    QueryStrategy::deterministic(vec![2, 3], table)
}

/// Result of the one-query game for one starting element.
#[derive(Debug, Clone)]
pub struct OneQueryGame {
    pub y: usize,
    pub value: Q,
    pub strategy: QueryStrategy,
    /// Least favourable prior over the 24 permutations, from the dual.
    pub hardest_prior: Vec<Q>,
    pub dual_value: Q,
}

/// The `(x, z, r)` triples that some permutation produces: querying
/// exponent `x` returns `z` while the true order is `r`. Guess variables
/// outside this set can never score, so the programs below omit them.
fn reachable_triples(y: usize) -> Vec<(usize, usize, usize)> {
    let mut triples: Vec<(usize, usize, usize)> = Permutation::all()
        .iter()
        .flat_map(|pi| {
            let r = order(pi, y);
            (0..MAX_EXPONENT as usize).map(move |x| (x, pi.power(x as u64 + 1).apply(y), r))
        })
        .collect();
    triples.sort_unstable();
    triples.dedup();
    triples
}

/// Exact value of the best randomized single query against a worst-case
/// permutation, with `guesses` restricting which orders may be named.
pub fn one_query_value_restricted(y: usize, guesses: &[usize]) -> Result<(Q, QueryStrategy)> {
    crate::perm::check_element(y)?;
    let exponents = MAX_EXPONENT as usize;
    let triples: Vec<(usize, usize, usize)> = reachable_triples(y)
        .into_iter()
        .filter(|(_, _, r)| guesses.contains(r))
        .collect();
    let index: BTreeMap<(usize, usize, usize), usize> = triples
        .iter()
        .enumerate()
        .map(|(k, t)| (*t, exponents + k))
        .collect();
    let value_var = exponents + triples.len();
    // variables: p_x, then w[x][z][r] for reachable triples, then the value
    let mut lp = LinearProgram::<Q>::new(value_var + 1);
    lp.objective[value_var] = Q::one();
    for pi in &Permutation::all() {
        let r = order(pi, y);
        let mut terms = vec![(value_var, -Q::one())];
        for x in 0..exponents {
            let z = pi.power(x as u64 + 1).apply(y);
            if let Some(&k) = index.get(&(x, z, r)) {
                terms.push((k, Q::one()));
            }
        }
        lp.constrain(&terms, Relation::Ge, Q::zero());
    }
    for x in 0..exponents {
        for z in 0..ELEMENTS {
            let mut terms: Vec<(usize, Q)> = (1..=ORDERS)
                .filter_map(|r| index.get(&(x, z, r)).map(|&k| (k, Q::one())))
                .collect();
            if !terms.is_empty() {
                terms.push((x, -Q::one()));
                lp.constrain(&terms, Relation::Le, Q::zero());
            }
        }
    }
    let all: Vec<(usize, Q)> = (0..exponents).map(|x| (x, Q::one())).collect();
    lp.constrain(&all, Relation::Eq, Q::one());
    let sol = lp.maximize()?;

    let fallback = guesses.iter().copied().min().unwrap_or(1);
    let plans = (0..exponents)
        .filter(|&x| !sol.x[x].is_zero())
        .map(|x| {
            let p = &sol.x[x];
            let guess = (0..ELEMENTS)
                .map(|z| {
                    let mut row: [Q; ORDERS] = std::array::from_fn(|r| {
                        index
                            .get(&(x, z, r + 1))
                            .map_or_else(Q::zero, |&k| &sol.x[k] / p)
                    });
                    let used = row.iter().fold(Q::zero(), |acc, v| acc + v);
                    row[fallback - 1] += Q::one() - used;
                    (vec![z], row)
                })
                .collect();
            QueryPlan {
                weight: p.clone(),
                queries: vec![x as u32 + 1],
                guess,
            }
        })
        .collect();
    Ok((sol.value, QueryStrategy { plans }))
}

/// The adversary's side of the one-query game: a prior over permutations
/// minimizing the best achievable average success.
pub fn one_query_hardest_prior(y: usize) -> Result<(Vec<Q>, Q)> {
    crate::perm::check_element(y)?;
    let perms = Permutation::all();
    let n = perms.len();
    let exponents = MAX_EXPONENT as usize;
    // variables: q_pi (n), t[x][z] (48), u
    let t = |x: usize, z: usize| n + x * ELEMENTS + z;
    let u = n + exponents * ELEMENTS;
    let mut lp = LinearProgram::<Q>::new(u + 1);
    lp.objective[u] = -Q::one();
    for (x, z, r) in reachable_triples(y) {
        let mut terms = vec![(t(x, z), Q::one())];
        for (k, pi) in perms.iter().enumerate() {
            if order(pi, y) == r && pi.power(x as u64 + 1).apply(y) == z {
                terms.push((k, -Q::one()));
            }
        }
        lp.constrain(&terms, Relation::Ge, Q::zero());
    }
    for x in 0..exponents {
        let mut terms: Vec<(usize, Q)> = (0..ELEMENTS).map(|z| (t(x, z), -Q::one())).collect();
        terms.push((u, Q::one()));
        lp.constrain(&terms, Relation::Ge, Q::zero());
    }
    let all: Vec<(usize, Q)> = (0..n).map(|k| (k, Q::one())).collect();
    lp.constrain(&all, Relation::Eq, Q::one());
    let sol = lp.maximize()?;
    Ok((sol.x[..n].to_vec(), -sol.value))
}

/// Solves the one-query game for starting element `y`.
pub fn one_query_game(y: usize) -> Result<OneQueryGame> {
    let (value, strategy) = one_query_value_restricted(y, &[1, 2, 3, 4])?;
    let (hardest_prior, dual_value) = one_query_hardest_prior(y)?;
    Ok(OneQueryGame {
        y,
        value,
        strategy,
        hardest_prior,
        dual_value,
    })
}

/// The one-query game for all four starting elements.
pub fn one_query_games(exec: Execution) -> Result<Vec<OneQueryGame>> {
    let ys: Vec<usize> = (0..ELEMENTS).collect();
    exec::map(exec, &ys, |&y| one_query_game(y))
        .into_iter()
        .collect()
}

/// Exact game value with `y = 0` and an optimal strategy.
pub fn one_query_value() -> Result<(Q, QueryStrategy)> {
    let game = one_query_game(0)?;
    Ok((game.value, game.strategy))
}

/// Whether the exponents in `queries` determine the order for every
/// permutation: no two permutations with different orders may produce the
/// same observations.
pub fn queries_determine_order(queries: &[u32], y: usize) -> bool {
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    Permutation::all().iter().all(|pi| {
        let r = order(pi, y);
        *seen.entry(observe(pi, y, queries)).or_insert(r) == r
    })
}

/// Outcome of exhaustively checking every deterministic single-query
/// strategy: an exponent and a guess for each of the four observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SingleQueryCertificate {
    pub strategies_checked: usize,
    pub strategies_certain: usize,
}

/// Enumerates all `12 * 4^4` deterministic single-query strategies for each
/// `y` and counts those that always name the correct order.
pub fn single_query_certificate(exec: Execution) -> SingleQueryCertificate {
    let perms = Permutation::all();
    let cases: Vec<(usize, u32)> = (0..ELEMENTS)
        .flat_map(|y| (1..=MAX_EXPONENT).map(move |x| (y, x)))
        .collect();
    let counts = exec::map(exec, &cases, |&(y, x)| {
        let facts: Vec<(usize, usize)> = perms
            .iter()
            .map(|pi| (pi.power(x as u64).apply(y), order(pi, y)))
            .collect();
        (0..256usize)
            .filter(|code| facts.iter().all(|&(z, r)| (code >> (2 * z)) & 3 == r - 1))
            .count()
    });
    SingleQueryCertificate {
        strategies_checked: cases.len() * 256,
        strategies_certain: counts.into_iter().sum(),
    }
}

/// Checks a strategy against all 96 `(pi, y)` cases and returns how many it
/// gets right with certainty.
pub fn certain_cases(strategy: impl Fn(usize) -> QueryStrategy) -> usize {
    (0..ELEMENTS)
        .map(|y| {
            let s = strategy(y);
            Permutation::all()
                .iter()
                .filter(|pi| s.success(pi, y).is_one())
                .count()
        })
        .sum()
}

/// Summary of the classical analysis, ready for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub one_query_value: String,
    pub one_query_value_by_y: Vec<String>,
    pub dual_value_by_y: Vec<String>,
    pub hardest_prior_y0: BTreeMap<String, String>,
    pub optimal_strategy_y0: Vec<PlanReport>,
    pub cube_query_min_success_by_y: Vec<String>,
    pub restricted_guess_value: String,
    pub two_query_queries: Vec<u32>,
    pub two_query_certain_cases: usize,
    pub two_query_total_cases: usize,
    pub single_query: SingleQueryCertificate,
    pub queries_4_8_certain: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanReport {
    pub weight: String,
    pub queries: Vec<u32>,
    pub guess: BTreeMap<String, [String; ORDERS]>,
}

fn plan_report(plan: &QueryPlan) -> PlanReport {
    PlanReport {
        weight: plan.weight.to_string(),
        queries: plan.queries.clone(),
        guess: plan
            .guess
            .iter()
            .map(|(obs, row)| {
                let key = obs
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                (key, row.clone().map(|v| v.to_string()))
            })
            .collect(),
    }
}

/// Runs every classical check.
pub fn classical_report(exec: Execution) -> Result<ClassicalReport> {
    let games = one_query_games(exec)?;
    let half = q(1, 2);
    let (restricted, _) = one_query_value_restricted(0, &[1])?;
    let cube: Vec<Q> = (0..ELEMENTS)
        .map(|y| cube_query_strategy(y).min_success(y))
        .collect();
    let two_certain = certain_cases(two_query_witness);
    let single = single_query_certificate(exec);
    let certain_4_8 = (0..ELEMENTS).all(|y| queries_determine_order(&[4, 8], y));
    let perms = Permutation::all();
    let passed = games
        .iter()
        .all(|g| g.value == half && g.dual_value == half)
        && cube.iter().all(|v| *v == half)
        && restricted.is_zero()
        && two_certain == 96
        && single.strategies_certain == 0
        && !certain_4_8;
    Ok(ClassicalReport {
        one_query_value: games[0].value.to_string(),
        one_query_value_by_y: games.iter().map(|g| g.value.to_string()).collect(),
        dual_value_by_y: games.iter().map(|g| g.dual_value.to_string()).collect(),
        hardest_prior_y0: perms
            .iter()
            .zip(&games[0].hardest_prior)
            .filter(|(_, w)| !w.is_zero())
            .map(|(pi, w)| (pi.to_string(), w.to_string()))
            .collect(),
        optimal_strategy_y0: games[0].strategy.plans.iter().map(plan_report).collect(),
        cube_query_min_success_by_y: cube.iter().map(Q::to_string).collect(),
        restricted_guess_value: restricted.to_string(),
        two_query_queries: vec![2, 3],
        two_query_certain_cases: two_certain,
        two_query_total_cases: 96,
        single_query: single,
        queries_4_8_certain: certain_4_8,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_twelve_is_identity() {
        for pi in Permutation::all() {
            assert_eq!(pi.power(12), Permutation::IDENTITY);
            for x in 1..=MAX_EXPONENT {
                assert_eq!(pi.power(x as u64), pi.power(x as u64 + 12));
            }
        }
    }

    #[test]
    fn cube_query_achieves_one_half() {
        for y in 0..ELEMENTS {
            assert_eq!(cube_query_strategy(y).min_success(y), q(1, 2));
        }
    }

    #[test]
    fn two_queries_suffice_but_four_and_eight_do_not() {
        assert_eq!(certain_cases(two_query_witness), 96);
        assert_eq!(two_query_witness(0).depth(), 2);
        for y in 0..ELEMENTS {
            assert!(queries_determine_order(&[2, 3], y));
            assert!(!queries_determine_order(&[4, 8], y));
            assert!((1..=MAX_EXPONENT).all(|x| !queries_determine_order(&[x], y)));
        }
    }

    #[test]
    fn no_single_query_strategy_is_certain() {
        let c = single_query_certificate(Execution::Sequential);
        assert_eq!(c.strategies_checked, 4 * 12 * 256);
        assert_eq!(c.strategies_certain, 0);
    }

    #[test]
    fn restricted_guess_has_value_zero() {
        let (v, _) = one_query_value_restricted(0, &[1]).unwrap();
        assert!(v.is_zero());
    }
}
