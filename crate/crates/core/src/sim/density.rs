use super::{check_qubit, qubit_value, Operator, C64, DIM};
use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// Unit trace.
    Normalized,
    /// Traceless deviation part, arbitrary scale.
    Deviation,
}

/// A 32x32 Hermitian density operator or deviation operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    m: Operator,
    kind: DensityKind,
}

impl DensityOperator {
    pub fn new(m: Operator, kind: DensityKind) -> Result<Self> {
        if m.nrows() != DIM || m.ncols() != DIM {
            return Err(Error::InfeasibleInput(format!(
                "density operator must be {DIM}x{DIM}"
            )));
        }
        let herm = super::max_abs_diff(&m, &m.adjoint());
        if herm > TOLERANCE {
            return Err(Error::InfeasibleInput(format!(
                "operator is not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = m.trace();
        let expected = match kind {
            DensityKind::Normalized => 1.0,
            DensityKind::Deviation => 0.0,
        };
        if (trace - C64::new(expected, 0.0)).norm() > TOLERANCE {
            return Err(Error::InfeasibleInput(format!(
                "trace {trace} does not match {kind:?}"
            )));
        }
        Ok(Self { m, kind })
    }

    pub(crate) fn new_unchecked(m: Operator, kind: DensityKind) -> Self {
        Self { m, kind }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Operator::identity(DIM, DIM) / C64::new(DIM as f64, 0.0),
            kind: DensityKind::Normalized,
        }
    }

    pub fn matrix(&self) -> &Operator {
        &self.m
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &Operator) -> Self {
        Self {
            m: u * &self.m * u.adjoint(),
            kind: self.kind,
        }
    }

    /// `O_i = 2 Tr(rho I_zi)` with `I_z |0> = +1/2 |0>`.
    ///
    /// For a deviation operator the result is in the operator's own
    /// (arbitrary) units.
    pub fn expectation_iz(&self, qubit: usize) -> Result<f64> {
        check_qubit(qubit)?;
        Ok((0..DIM)
            .map(|b| {
                let sign = if qubit_value(b, qubit) == 0 {
                    1.0
                } else {
                    -1.0
                };
                sign * self.m[(b, b)].re
            })
            .sum())
    }

    /// `O_1 .. O_5`.
    pub fn observables(&self) -> [f64; 5] {
        std::array::from_fn(|k| self.expectation_iz(k + 1).expect("qubit in range"))
    }

    /// Linear combination `a * self + b * other` (kinds must agree).
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            m: &self.m * C64::new(a, 0.0) + &other.m * C64::new(b, 0.0),
            kind: self.kind,
        }
    }
}

/// Free-function form of [`DensityOperator::expectation_iz`].
pub fn expectation_iz(rho: &DensityOperator, qubit: usize) -> Result<f64> {
    rho.expectation_iz(qubit)
}
