//! Outcome distributions of the exponent register, ensemble observables,
//! and the optimal probabilistic guess of the order.

use num_rational::BigRational;

use crate::circuits::final_state;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use num_traits::Zero;

use crate::lp::{LinearProgram, LpScalar, QSqrt2, Relation};
use crate::perm::OracleSpec;
use crate::sim::{QuantumState, QUBITS};

/// Number of register outcomes `m`.
pub const OUTCOMES: usize = 8;
/// Possible orders `r`.
pub const ORDERS: usize = 4;
/// Tolerance on distribution and strategy normalization.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Probabilities of each register outcome `m = 0..8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    probs: [f64; OUTCOMES],
}

impl OutcomeDistribution {
    pub fn new(probs: [f64; OUTCOMES]) -> Result<Self> {
        if let Some(m) = probs
            .iter()
            .position(|p| !p.is_finite() || *p < -NORMALIZATION_TOLERANCE)
        {
            return Err(Error::InfeasibleInput(format!(
                "probability for m={m} is {}",
                probs[m]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InfeasibleInput(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64; OUTCOMES] {
        &self.probs
    }

    pub fn prob(&self, m: usize) -> f64 {
        self.probs[m]
    }

    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..OUTCOMES).filter(|&m| self.probs[m] > tol).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `g[m][r - 1]` is the probability of guessing `r` after seeing `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessStrategy {
    g: [[f64; ORDERS]; OUTCOMES],
}

impl GuessStrategy {
    pub fn new(g: [[f64; ORDERS]; OUTCOMES]) -> Result<Self> {
        for (m, row) in g.iter().enumerate() {
            let total: f64 = row.iter().sum();
            if row
                .iter()
                .any(|p| !p.is_finite() || *p < -NORMALIZATION_TOLERANCE)
                || (total - 1.0).abs() > NORMALIZATION_TOLERANCE
            {
                return Err(Error::InfeasibleInput(format!(
                    "guess row for m={m} is not a probability vector"
                )));
            }
        }
        Ok(Self { g })
    }

    /// Always guesses `r` regardless of the outcome.
    pub fn constant(r: usize) -> Result<Self> {
        check_order(r)?;
        let mut g = [[0.0; ORDERS]; OUTCOMES];
        for row in g.iter_mut() {
            row[r - 1] = 1.0;
        }
        Ok(Self { g })
    }

    pub fn uniform() -> Self {
        Self {
            g: [[1.0 / ORDERS as f64; ORDERS]; OUTCOMES],
        }
    }

    pub fn rows(&self) -> &[[f64; ORDERS]; OUTCOMES] {
        &self.g
    }

    pub fn prob(&self, m: usize, r: usize) -> f64 {
        self.g[m][r - 1]
    }
}

/// The ensemble averages `O_i = 2 Tr(rho I_zi)` for spins 1..=5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    o: [f64; QUBITS],
}

impl Observables {
    pub fn new(o: [f64; QUBITS]) -> Result<Self> {
        if let Some(i) = o
            .iter()
            .position(|v| !v.is_finite() || v.abs() > 1.0 + NORMALIZATION_TOLERANCE)
        {
            return Err(Error::InfeasibleInput(format!(
                "observable O_{} = {} lies outside [-1, 1]",
                i + 1,
                o[i]
            )));
        }
        Ok(Self { o })
    }

    pub fn of_state(spec: &OracleSpec) -> Self {
        Self {
            o: final_state(spec).density().observables(),
        }
    }

    pub fn values(&self) -> &[f64; QUBITS] {
        &self.o
    }

    /// `O_i` for spin `i` in `1..=5`.
    pub fn spin(&self, i: usize) -> f64 {
        self.o[i - 1]
    }

    pub fn register(&self) -> [f64; 3] {
        [self.o[0], self.o[1], self.o[2]]
    }
}

fn check_order(r: usize) -> Result<()> {
    if (1..=ORDERS).contains(&r) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange(r))
    }
}

/// `cos(2 pi j / 8)` as an exact element of `Q(sqrt 2)`.
fn cos_eighth(j: i64) -> QSqrt2 {
    match j.rem_euclid(8) {
        0 => QSqrt2::from_ints(1, 0, 1),
        1 | 7 => QSqrt2::from_ints(0, 1, 2),
        2 | 6 => QSqrt2::from_ints(0, 0, 1),
        3 | 5 => QSqrt2::from_ints(0, -1, 2),
        _ => QSqrt2::from_ints(-1, 0, 1),
    }
}

/// Exact outcome probabilities for an order-`r` periodic function on the
/// eight exponent values.
///
/// Measuring the target register leaves a coset `{s, s + r, ...}`; its
/// Fourier transform contributes `|sum_k w^{m k r}|^2 / 64` to `P(m)`, and
/// the offset phase `w^{m s}` drops out of the modulus.
pub fn analytic_distribution_exact(r: usize) -> Result<[QSqrt2; OUTCOMES]> {
    check_order(r)?;
    let mut probs: [QSqrt2; OUTCOMES] = std::array::from_fn(|_| QSqrt2::zero());
    for (m, p) in probs.iter_mut().enumerate() {
        let mut total = QSqrt2::zero();
        for s in 0..r {
            let coset = (s..OUTCOMES).step_by(r).count() as i64;
            for k in 0..coset {
                for l in 0..coset {
                    total = total + cos_eighth((m * r) as i64 * (k - l));
                }
            }
        }
        *p = total * QSqrt2::from_ints(1, 0, 64);
    }
    Ok(probs)
}

/// Outcome distribution for order `r`, evaluated from the exact form.
pub fn analytic_distribution(r: usize) -> Result<OutcomeDistribution> {
    let exact = analytic_distribution_exact(r)?;
    OutcomeDistribution::new(exact.map(|p| p.approx_f64()))
}

/// Maps a register basis index (spin 1 most significant) to the outcome
/// `m = 4 m3 + 2 m2 + m1`.
pub fn outcome_of_register(x: usize) -> usize {
    ((x & 1) << 2) | (x & 2) | (x >> 2)
}

/// Distribution of `m` after tracing out the target register.
pub fn register_distribution(state: &QuantumState) -> OutcomeDistribution {
    let mut probs = [0.0; OUTCOMES];
    for (index, p) in state.probabilities().into_iter().enumerate() {
        probs[outcome_of_register(index >> 2)] += p;
    }
    OutcomeDistribution::new(probs).expect("unitary evolution preserves normalization")
}

/// Runs the full circuit and reads the exponent-register distribution.
pub fn simulated_distribution(spec: &OracleSpec) -> OutcomeDistribution {
    register_distribution(&final_state(spec))
}

/// `(O_1, O_2, O_3)` implied by a distribution, with `m_1` the least
/// significant bit of `m`.
pub fn observables_from_distribution(d: &OutcomeDistribution) -> [f64; 3] {
    std::array::from_fn(|i| {
        let ones: f64 = (0..OUTCOMES)
            .filter(|m| (m >> i) & 1 == 1)
            .map(|m| d.prob(m))
            .sum();
        1.0 - 2.0 * ones
    })
}

/// The order whose ideal register observables lie closest to `o`, if any
/// lies within `tol` in every component.
pub fn infer_order(o: [f64; 3], tol: f64) -> Option<usize> {
    (1..=ORDERS)
        .map(|r| {
            let ideal =
                observables_from_distribution(&analytic_distribution(r).expect("valid order"));
            let dist = ideal
                .iter()
                .zip(&o)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            (r, dist)
        })
        .filter(|(_, d)| *d <= tol)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(r, _)| r)
}

/// An optimal guessing strategy over an arbitrary scalar field.
#[derive(Debug, Clone)]
pub struct GuessSolution<T> {
    pub g: Vec<[T; ORDERS]>,
    pub value: T,
}

/// Maximizes the worst-case probability of guessing `r` correctly, where
/// `p[r - 1][m]` is the probability of outcome `m` given order `r`.
pub fn solve_guess<T: LpScalar>(p: &[[T; OUTCOMES]; ORDERS]) -> Result<GuessSolution<T>> {
    let var = |m: usize, r: usize| m * ORDERS + r;
    let value_var = OUTCOMES * ORDERS;
    let mut lp = LinearProgram::<T>::new(value_var + 1);
    lp.objective[value_var] = T::one();
    for r in 0..ORDERS {
        let mut terms: Vec<(usize, T)> = (0..OUTCOMES)
            .map(|m| (var(m, r), p[r][m].clone()))
            .collect();
        terms.push((value_var, -T::one()));
        lp.constrain(&terms, Relation::Ge, T::zero());
    }
    for m in 0..OUTCOMES {
        let terms: Vec<(usize, T)> = (0..ORDERS).map(|r| (var(m, r), T::one())).collect();
        lp.constrain(&terms, Relation::Eq, T::one());
    }
    let sol = lp.maximize()?;
    let g = (0..OUTCOMES)
        .map(|m| std::array::from_fn(|r| sol.x[var(m, r)].clone()))
        .collect();
    Ok(GuessSolution {
        g,
        value: sol.value,
    })
}

/// The least favourable prior over orders: minimizes the best achievable
/// average success `sum_m max_r q_r P(m|r)`. By duality its value equals
/// the maximin value of [`solve_guess`].
pub fn hardest_prior<T: LpScalar>(p: &[[T; OUTCOMES]; ORDERS]) -> Result<([T; ORDERS], T)> {
    // variables: q_1..q_4, u_0..u_7; maximize -sum u
    let mut lp = LinearProgram::<T>::new(ORDERS + OUTCOMES);
    for m in 0..OUTCOMES {
        lp.objective[ORDERS + m] = -T::one();
        for r in 0..ORDERS {
            lp.constrain(
                &[(ORDERS + m, T::one()), (r, -p[r][m].clone())],
                Relation::Ge,
                T::zero(),
            );
        }
    }
    let all: Vec<(usize, T)> = (0..ORDERS).map(|r| (r, T::one())).collect();
    lp.constrain(&all, Relation::Eq, T::one());
    let sol = lp.maximize()?;
    Ok((std::array::from_fn(|r| sol.x[r].clone()), -sol.value))
}

fn exact_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite probability")
}

/// Optimal worst-case guessing strategy for four outcome distributions,
/// `dists[r - 1]` being the distribution for order `r`.
///
/// The inputs are converted exactly to rationals and the program is solved
/// in exact arithmetic.
pub fn optimal_guess_strategy(
    dists: &[OutcomeDistribution; ORDERS],
) -> Result<(GuessStrategy, f64)> {
    for d in dists {
        OutcomeDistribution::new(d.probs)?;
    }
    let p: [[BigRational; OUTCOMES]; ORDERS] =
        std::array::from_fn(|r| std::array::from_fn(|m| exact_rational(dists[r].prob(m))));
    let sol = solve_guess(&p)?;
    let mut g = [[0.0; ORDERS]; OUTCOMES];
    for (row, exact) in g.iter_mut().zip(&sol.g) {
        for (v, e) in row.iter_mut().zip(exact) {
            *v = e.approx_f64();
        }
        // pin each row to an exact probability vector after rounding
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    Ok((GuessStrategy::new(g)?, sol.value.approx_f64()))
}

/// The four ideal order-finding distributions in exact form.
pub fn order_finding_distributions_exact() -> [[QSqrt2; OUTCOMES]; ORDERS] {
    std::array::from_fn(|r| analytic_distribution_exact(r + 1).expect("valid order"))
}

/// The four ideal order-finding distributions.
pub fn order_finding_distributions() -> [OutcomeDistribution; ORDERS] {
    std::array::from_fn(|r| analytic_distribution(r + 1).expect("valid order"))
}

/// Exact optimal guessing strategy and value for the ideal distributions.
pub fn exact_order_finding_guess() -> Result<GuessSolution<QSqrt2>> {
    solve_guess(&order_finding_distributions_exact())
}

/// `Pr[r' = r | r]` for each `r` under strategy `g`.
pub fn guess_success_per_r(
    g: &GuessStrategy,
    dists: &[OutcomeDistribution; ORDERS],
) -> [f64; ORDERS] {
    std::array::from_fn(|r| (0..OUTCOMES).map(|m| dists[r].prob(m) * g.g[m][r]).sum())
}

/// One row of the exhaustive `(pi, y)` sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub spec: OracleSpec,
    pub order: usize,
    pub simulated: OutcomeDistribution,
    pub observables: Observables,
    /// Largest deviation of the simulated distribution from the ideal one.
    pub deviation: f64,
    /// Largest deviation of the distribution-implied register observables
    /// from the density-operator expectation values.
    pub observable_mismatch: f64,
    pub inferred_order: Option<usize>,
}

/// Tolerance for simulated against analytic distributions.
pub const SWEEP_TOLERANCE: f64 = 1e-10;

fn sweep_row(spec: &OracleSpec) -> SweepRow {
    let order = spec.order();
    let state = final_state(spec);
    let simulated = register_distribution(&state);
    let observables = Observables {
        o: state.density().observables(),
    };
    let ideal = analytic_distribution(order).expect("valid order");
    let implied = observables_from_distribution(&simulated);
    let observable_mismatch = implied
        .iter()
        .zip(observables.register())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    SweepRow {
        spec: *spec,
        order,
        simulated,
        observables,
        deviation: simulated.max_abs_diff(&ideal),
        observable_mismatch,
        inferred_order: infer_order(implied, 1e-6),
    }
}

/// Simulates all 96 `(pi, y)` instances.
pub fn sweep(exec: Execution) -> Vec<SweepRow> {
    exec::map(exec, &OracleSpec::all(), sweep_row)
}

/// Same as [`sweep`] restricted to the given instances.
pub fn sweep_specs(specs: &[OracleSpec], exec: Execution) -> Vec<SweepRow> {
    exec::map(exec, specs, sweep_row)
}

/// True when every row matches the ideal distribution and observables.
pub fn sweep_passes(rows: &[SweepRow]) -> bool {
    rows.iter().all(|row| {
        row.deviation <= SWEEP_TOLERANCE
            && row.observable_mismatch <= SWEEP_TOLERANCE
            && row.inferred_order == Some(row.order)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn closed_forms() {
        let r1 = analytic_distribution(1).unwrap();
        assert_eq!(r1.support(1e-15), vec![0]);
        let r2 = analytic_distribution(2).unwrap();
        assert_eq!(r2.support(1e-15), vec![0, 4]);
        let r4 = analytic_distribution(4).unwrap();
        assert_eq!(r4.support(1e-15), vec![0, 2, 4, 6]);
        assert!(r4.support(1e-15).iter().all(|&m| close(r4.prob(m), 0.25)));
    }

    #[test]
    fn order_three_is_exactly_the_surd_table() {
        let table = [
            (22, 0),
            (8, -5),
            (4, 0),
            (8, 5),
            (2, 0),
            (8, 5),
            (4, 0),
            (8, -5),
        ];
        let exact = analytic_distribution_exact(3).unwrap();
        for (m, (a, b)) in table.into_iter().enumerate() {
            assert_eq!(exact[m], QSqrt2::from_ints(a, b, 64), "m={m}");
        }
    }

    #[test]
    fn register_observables_for_each_order() {
        let expect = [
            [1.0, 1.0, 1.0],
            [1.0, 1.0, 0.0],
            [0.0, 0.25, 0.3125],
            [1.0, 0.0, 0.0],
        ];
        for (r, want) in (1..=4).zip(expect) {
            let o = observables_from_distribution(&analytic_distribution(r).unwrap());
            for i in 0..3 {
                assert!(close(o[i], want[i]), "r={r} O_{} = {}", i + 1, o[i]);
            }
            assert_eq!(infer_order(o, 1e-9), Some(r));
        }
    }

    #[test]
    fn outcome_mapping_reverses_register_bits() {
        assert_eq!(outcome_of_register(0b100), 0b001);
        assert_eq!(outcome_of_register(0b001), 0b100);
        assert_eq!(outcome_of_register(0b010), 0b010);
        assert_eq!(outcome_of_register(0b110), 0b011);
    }

    #[test]
    fn simulated_matches_analytic_for_pair_swap() {
        let pi: Permutation = "(0 1)(2 3)".parse().unwrap();
        let d = simulated_distribution(&OracleSpec::new(pi, 0).unwrap());
        assert!(d.max_abs_diff(&analytic_distribution(2).unwrap()) < 1e-12);
        let id = simulated_distribution(&OracleSpec::new(Permutation::IDENTITY, 0).unwrap());
        assert!(close(id.prob(0), 1.0));
    }

    #[test]
    fn full_observables_for_order_one_and_two() {
        let o1 = Observables::of_state(&OracleSpec::new(Permutation::IDENTITY, 0).unwrap());
        assert!(o1.values().iter().all(|v| close(*v, 1.0)));
        let pi: Permutation = "(0 1)(2 3)".parse().unwrap();
        let o2 = Observables::of_state(&OracleSpec::new(pi, 0).unwrap());
        for (got, want) in o2.values().iter().zip([1.0, 1.0, 0.0, 1.0, 0.0]) {
            assert!(close(*got, want), "{:?}", o2.values());
        }
    }

    #[test]
    fn guess_value_trivial_cases() {
        let same = [analytic_distribution(3).unwrap(); 4];
        let (_, v) = optimal_guess_strategy(&same).unwrap();
        assert!(close(v, 0.25));

        let disjoint: [OutcomeDistribution; 4] = std::array::from_fn(|r| {
            let mut p = [0.0; 8];
            p[2 * r] = 0.5;
            p[2 * r + 1] = 0.5;
            OutcomeDistribution::new(p).unwrap()
        });
        let (g, v) = optimal_guess_strategy(&disjoint).unwrap();
        assert!(close(v, 1.0));
        assert!(guess_success_per_r(&g, &disjoint)
            .iter()
            .all(|s| close(*s, 1.0)));
    }

    #[test]
    fn constant_and_uniform_strategies() {
        let dists = order_finding_distributions();
        let always_one = guess_success_per_r(&GuessStrategy::constant(1).unwrap(), &dists);
        for (got, want) in always_one.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!(close(*got, want));
        }
        let uniform = guess_success_per_r(&GuessStrategy::uniform(), &dists);
        assert!(uniform.iter().all(|s| close(*s, 0.25)));
    }

    #[test]
    fn exact_guess_value_matches_floating_point() {
        let exact = exact_order_finding_guess().unwrap();
        let v = exact.value.approx_f64();
        assert!((0.545..0.56).contains(&v), "value {v}");
        let float: [[f64; 8]; 4] =
            std::array::from_fn(|r| *order_finding_distributions()[r].probs());
        let approx = solve_guess(&float).unwrap();
        assert!((approx.value - v).abs() < 1e-9);
        let (_, dual) = hardest_prior(&order_finding_distributions_exact()).unwrap();
        assert_eq!(dual, exact.value);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(OutcomeDistribution::new([0.5; 8]).is_err());
        assert!(analytic_distribution(5).is_err());
        assert!(GuessStrategy::new([[0.5; 4]; 8]).is_err());
        assert!(Observables::new([1.5, 0.0, 0.0, 0.0, 0.0]).is_err());
    }
}
