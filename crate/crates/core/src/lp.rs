//! A small dense two-phase simplex solver, generic over the scalar field.
//!
//! Scalars implement [`LpScalar`]: `f64` (with a fixed tolerance),
//! [`BigRational`] for exact rational programs, and [`QSqrt2`] for exact
//! programs with coefficients in `Q(sqrt 2)`. Bland's rule is used for
//! both entering and leaving variables, so the solver terminates on
//! degenerate programs.

use std::cmp::Ordering;
use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait LpScalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(numer: i64, denom: i64) -> Self;
    /// Sign, treating values within the scalar's tolerance as zero.
    fn sign(&self) -> Ordering;
    fn approx_f64(&self) -> f64;

    fn cmp_value(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign()
    }

    /// `self - a * b`.
    fn sub_mul(&self, a: &Self, b: &Self) -> Self {
        self.clone() - a.clone() * b.clone()
    }

    /// `self / d`.
    fn div_by(&self, d: &Self) -> Self {
        self.clone() / d.clone()
    }
}

/// Tolerance used by the `f64` implementation.
pub const F64_TOLERANCE: f64 = 1e-11;

impl LpScalar for f64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
    fn sign(&self) -> Ordering {
        if self.abs() <= F64_TOLERANCE {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }
    fn cmp_value(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn sub_mul(&self, a: &Self, b: &Self) -> Self {
        self - a * b
    }
    fn div_by(&self, d: &Self) -> Self {
        self / d
    }
    fn sign(&self) -> Ordering {
        self.cmp(&Self::zero())
    }
    fn approx_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact element `a + b sqrt(2)` of the field `Q(sqrt 2)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub rational: BigRational,
    pub surd: BigRational,
}

impl QSqrt2 {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Self { rational, surd }
    }

    /// `(a + b sqrt 2) / d` from integers.
    pub fn from_ints(a: i64, b: i64, d: i64) -> Self {
        Self::new(
            <BigRational as LpScalar>::from_ratio(a, d),
            <BigRational as LpScalar>::from_ratio(b, d),
        )
    }

    pub fn sqrt2() -> Self {
        Self::new(Zero::zero(), One::one())
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.surd)
    }

    fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -self.surd.clone())
    }

    /// `a^2 - 2 b^2`, the field norm.
    fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - BigRational::from_integer(2.into()) * &self.surd * &self.surd
    }
}

impl Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (Zero::is_zero(&self.rational), Zero::is_zero(&self.surd)) {
            (_, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "({})*sqrt(2)", self.surd),
            (false, false) => write!(f, "{} + ({})*sqrt(2)", self.rational, self.surd),
        }
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.rational + o.rational, self.surd + o.surd)
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.rational - o.rational, self.surd - o.surd)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = BigRational::from_integer(2.into());
        Self::new(
            &self.rational * &o.rational + two * &self.surd * &o.surd,
            &self.rational * &o.surd + &self.surd * &o.rational,
        )
    }
}

impl Div for QSqrt2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let n = o.norm();
        assert!(!Zero::is_zero(&n), "division by zero in Q(sqrt 2)");
        let num = self * o.conjugate();
        Self::new(num.rational / &n, num.surd / n)
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.surd)
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        Self::new(Zero::zero(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        Self::new(One::one(), Zero::zero())
    }
}

impl LpScalar for QSqrt2 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_ints(numer, 0, denom)
    }
    fn sign(&self) -> Ordering {
        let (a, b) = (&self.rational, &self.surd);
        let sa = a.cmp(&Zero::zero());
        let sb = b.cmp(&Zero::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with 2 b^2
        let two = BigRational::from_integer(2.into());
        match (a * a).cmp(&(two * b * b)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }
    fn approx_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.rational).unwrap_or(f64::NAN)
            + ToPrimitive::to_f64(&self.surd).unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub x: Vec<T>,
    pub value: T,
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(vars: usize) -> Self {
        Self {
            objective: vec![T::zero(); vars],
            constraints: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `sum coeffs[k].1 * x[coeffs[k].0] (rel) rhs`.
    pub fn constrain(&mut self, terms: &[(usize, T)], relation: Relation, rhs: T) {
        let mut coeffs = vec![T::zero(); self.vars()];
        for (k, c) in terms {
            coeffs[*k] = coeffs[*k].clone() + c.clone();
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn maximize(&self) -> Result<Solution<T>> {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    structural: usize,
    /// First artificial column; artificials occupy `artificial..width`.
    artificial: usize,
    width: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.vars();
        let normalized: Vec<(Vec<T>, Relation, T)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.sign().is_lt() {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (
                        c.coeffs.iter().map(|v| -v.clone()).collect(),
                        flipped,
                        -c.rhs.clone(),
                    )
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let slacks = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let artificials = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let artificial = n + slacks;
        let width = artificial + artificials;
        let (mut next_slack, mut next_art) = (n, artificial);
        let mut rows = Vec::with_capacity(normalized.len());
        let mut rhs = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        for (coeffs, relation, b) in normalized {
            let mut row = coeffs;
            row.resize(width, T::zero());
            match relation {
                Relation::Le => {
                    row[next_slack] = T::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -T::one();
                    next_slack += 1;
                    row[next_art] = T::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = T::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        Self {
            rows,
            rhs,
            basis,
            structural: n,
            artificial,
            width,
        }
    }

    fn objective_value(&self, cost: &[T]) -> T {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(T::zero(), |acc, (&b, v)| acc + cost[b].clone() * v.clone())
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            if !v.sign().is_eq() {
                *v = v.div_by(&p);
            }
        }
        self.rhs[row] = self.rhs[row].div_by(&p);
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.sign().is_eq() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !pv.sign().is_eq() {
                    *v = v.sub_mul(&factor, pv);
                }
            }
            self.rhs[r] = self.rhs[r].sub_mul(&factor, &pivot_rhs);
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations maximizing `cost . x` over columns `< limit`.
    fn optimize(&mut self, cost: &[T], limit: usize) -> Result<()> {
        loop {
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced =
                    self.basis
                        .iter()
                        .zip(&self.rows)
                        .fold(cost[j].clone(), |acc, (&b, row)| {
                            if cost[b].sign().is_eq() {
                                acc
                            } else {
                                acc.sub_mul(&cost[b], &row[j])
                            }
                        });
                reduced.sign().is_gt()
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.sign().is_gt() {
                    continue;
                }
                let ratio = self.rhs[r].div_by(a);
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => match ratio.cmp_value(best) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[r] < self.basis[*lr],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::LpFailure("unbounded"));
            };
            self.pivot(row, col);
        }
    }

    fn solve(mut self, objective: &[T]) -> Result<Solution<T>> {
        if self.artificial < self.width {
            let phase_one: Vec<T> = (0..self.width)
                .map(|j| {
                    if j >= self.artificial {
                        -T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            self.optimize(&phase_one, self.width)?;
            if self.objective_value(&phase_one).sign().is_lt() {
                return Err(Error::LpFailure("infeasible"));
            }
            // drive zero-level artificials out of the basis where possible
            for r in 0..self.rows.len() {
                if self.basis[r] >= self.artificial {
                    if let Some(col) = (0..self.artificial)
                        .find(|&j| !self.rows[r][j].sign().is_eq() && !self.basis.contains(&j))
                    {
                        self.pivot(r, col);
                    }
                }
            }
        }
        let mut cost: Vec<T> = objective.to_vec();
        cost.resize(self.width, T::zero());
        self.optimize(&cost, self.artificial)?;
        let mut x = vec![T::zero(); self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                x[b] = self.rhs[r].clone();
            }
        }
        let value = self.objective_value(&cost);
        Ok(Solution { x, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        <BigRational as LpScalar>::from_ratio(n, d)
    }

    #[test]
    fn textbook_program() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.objective = vec![q(3, 1), q(5, 1)];
        lp.constrain(&[(0, q(1, 1))], Relation::Le, q(4, 1));
        lp.constrain(&[(1, q(2, 1))], Relation::Le, q(12, 1));
        lp.constrain(&[(0, q(3, 1)), (1, q(2, 1))], Relation::Le, q(18, 1));
        let s = lp.maximize().unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y, x + y = 1, x >= 1/3 -> -1
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.objective = vec![q(-1, 1), q(-1, 1)];
        lp.constrain(&[(0, q(1, 1)), (1, q(1, 1))], Relation::Eq, q(1, 1));
        lp.constrain(&[(0, q(1, 1))], Relation::Ge, q(1, 3));
        let s = lp.maximize().unwrap();
        assert_eq!(s.value, q(-1, 1));
        assert!(s.x[0] >= q(1, 3));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.constrain(&[(0, 1.0)], Relation::Ge, 2.0);
        lp.constrain(&[(0, 1.0)], Relation::Le, 1.0);
        assert!(matches!(lp.maximize(), Err(Error::LpFailure("infeasible"))));

        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective = vec![1.0];
        lp.constrain(&[(0, 1.0)], Relation::Ge, 0.0);
        assert!(matches!(lp.maximize(), Err(Error::LpFailure("unbounded"))));
    }

    #[test]
    fn rock_paper_scissors_value_is_zero() {
        // shift payoffs by +1 so the value is positive: value 1 <=> 0 unshifted
        let payoff = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]];
        let mut lp = LinearProgram::<BigRational>::new(4);
        lp.objective[3] = q(1, 1);
        for col in 0..3 {
            let mut terms: Vec<(usize, BigRational)> = (0..3)
                .map(|row| (row, q(payoff[row][col] + 1, 1)))
                .collect();
            terms.push((3, q(-1, 1)));
            lp.constrain(&terms, Relation::Ge, q(0, 1));
        }
        lp.constrain(
            &[(0, q(1, 1)), (1, q(1, 1)), (2, q(1, 1))],
            Relation::Eq,
            q(1, 1),
        );
        let s = lp.maximize().unwrap();
        assert_eq!(s.value, q(1, 1));
        assert_eq!(s.x[..3], [q(1, 3), q(1, 3), q(1, 3)]);
    }

    #[test]
    fn qsqrt2_arithmetic_and_sign() {
        let a = QSqrt2::from_ints(3, -2, 1); // 3 - 2.828 > 0
        assert_eq!(a.sign(), Ordering::Greater);
        let b = QSqrt2::from_ints(-3, 2, 1);
        assert_eq!(b.sign(), Ordering::Less);
        let c = QSqrt2::from_ints(1, -1, 1); // 1 - 1.414 < 0
        assert_eq!(c.sign(), Ordering::Less);
        let prod = a.clone() * b.clone();
        assert!((prod.approx_f64() - a.approx_f64() * b.approx_f64()).abs() < 1e-12);
        let quot = a.clone() / c.clone();
        assert!((quot.approx_f64() - a.approx_f64() / c.approx_f64()).abs() < 1e-12);
        assert_eq!((quot * c).sign(), a.sign());
        assert_eq!(
            QSqrt2::sqrt2() * QSqrt2::sqrt2(),
            QSqrt2::from_ints(2, 0, 1)
        );
    }
}
