use std::fmt;

use nalgebra::DMatrix;

use super::{check_qubit, qubit_value, Operator, QuantumState, C64, DIM, QUBITS};
use crate::error::{Error, Result};

/// Unitary check tolerance for embedded blocks.
const BLOCK_TOLERANCE: f64 = 1e-12;

/// One gate on the five-spin register. Qubit indices are 1-based.
///
/// Phase conventions: `ZRotation` applies `diag(1, e^{i theta})`;
/// `ConditionalZRotation` applies `e^{i theta}` to the `|11>` component of
/// the control/target pair and is therefore symmetric in the two qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Hadamard(usize),
    Not(usize),
    ZRotation {
        qubit: usize,
        degrees: f64,
    },
    ConditionalZRotation {
        control: usize,
        target: usize,
        degrees: f64,
        dagger: bool,
    },
    ControlledNot {
        control: usize,
        target: usize,
    },
    /// A 4x4 unitary on `targets` (first listed = more significant bit),
    /// applied when `control` is `|1>`.
    ControlledTargetUnitary {
        control: usize,
        targets: [usize; 2],
        block: [[C64; 4]; 4],
    },
}

impl GateOp {
    /// The qubits the gate touches, most significant first in its local basis.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Hadamard(q) | GateOp::Not(q) => vec![q],
            GateOp::ZRotation { qubit, .. } => vec![qubit],
            GateOp::ConditionalZRotation {
                control, target, ..
            }
            | GateOp::ControlledNot { control, target } => vec![control, target],
            GateOp::ControlledTargetUnitary {
                control, targets, ..
            } => vec![control, targets[0], targets[1]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let qs = self.qubits();
        for (k, &q) in qs.iter().enumerate() {
            check_qubit(q)?;
            if qs[..k].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        if let GateOp::ControlledTargetUnitary { block, .. } = self {
            let m = DMatrix::from_fn(4, 4, |r, c| block[r][c]);
            let defect = super::unitarity_defect(&m);
            if defect > BLOCK_TOLERANCE {
                return Err(Error::NotUnitary(defect));
            }
        }
        Ok(())
    }

    /// The gate's matrix on its own qubits, in the order of [`GateOp::qubits`].
    fn local_matrix(&self) -> DMatrix<C64> {
        let one = C64::new(1.0, 0.0);
        match *self {
            GateOp::Hadamard(_) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                DMatrix::from_row_slice(2, 2, &[one * s, one * s, one * s, -one * s])
            }
            GateOp::Not(_) => {
                let z = C64::new(0.0, 0.0);
                DMatrix::from_row_slice(2, 2, &[z, one, one, z])
            }
            GateOp::ZRotation { degrees, .. } => {
                let mut m = DMatrix::identity(2, 2);
                m[(1, 1)] = C64::from_polar(1.0, degrees.to_radians());
                m
            }
            GateOp::ConditionalZRotation {
                degrees, dagger, ..
            } => {
                let angle = if dagger { -degrees } else { degrees };
                let mut m = DMatrix::identity(4, 4);
                m[(3, 3)] = C64::from_polar(1.0, angle.to_radians());
                m
            }
            GateOp::ControlledNot { .. } => {
                let mut m = DMatrix::zeros(4, 4);
                m[(0, 0)] = one;
                m[(1, 1)] = one;
                m[(2, 3)] = one;
                m[(3, 2)] = one;
                m
            }
            GateOp::ControlledTargetUnitary { ref block, .. } => {
                let mut m = DMatrix::identity(8, 8);
                for r in 0..4 {
                    for c in 0..4 {
                        m[(4 + r, 4 + c)] = block[r][c];
                    }
                }
                m
            }
        }
    }

    /// Full 32x32 matrix of the gate, embedded entry-wise from its local matrix.
    pub fn matrix(&self) -> Result<Operator> {
        self.validate()?;
        let qs = self.qubits();
        let local = self.local_matrix();
        let touched: usize = qs.iter().map(|&q| 1 << super::bit_position(q)).sum();
        let local_index = |i: usize| {
            qs.iter()
                .fold(0usize, |acc, &q| (acc << 1) | qubit_value(i, q))
        };
        Ok(Operator::from_fn(DIM, DIM, |r, c| {
            if (r & !touched) != (c & !touched) {
                C64::new(0.0, 0.0)
            } else {
                local[(local_index(r), local_index(c))]
            }
        }))
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Hadamard(q) => write!(f, "H{q}"),
            GateOp::Not(q) => write!(f, "N{q}"),
            GateOp::ZRotation { qubit, degrees } => write!(f, "Z{qubit}({degrees})"),
            GateOp::ConditionalZRotation {
                control,
                target,
                degrees,
                dagger,
            } => write!(
                f,
                "CZ{control}{target}({degrees}){}",
                if *dagger { "'" } else { "" }
            ),
            GateOp::ControlledNot { control, target } => write!(f, "C{control}{target}"),
            GateOp::ControlledTargetUnitary {
                control, targets, ..
            } => write!(f, "CU{control}[{}{}]", targets[0], targets[1]),
        }
    }
}

/// An ordered gate list over the five-spin register; the first op acts first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    ops: Vec<GateOp>,
}

impl Circuit {
    pub const QUBIT_COUNT: usize = QUBITS;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ops(ops: Vec<GateOp>) -> Result<Self> {
        ops.iter().try_for_each(GateOp::validate)?;
        Ok(Self { ops })
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate()?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        self.ops.extend(other.ops.iter().cloned());
        self
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Product of the gate matrices in time order (`U_n ... U_1`).
    pub fn unitary(&self) -> Result<Operator> {
        self.ops
            .iter()
            .try_fold(super::identity(), |acc, op| Ok(op.matrix()? * acc))
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        state.evolve(&self.ops)
    }
}

/// Free-function form of [`Circuit::unitary`].
pub fn circuit_unitary(c: &Circuit) -> Result<Operator> {
    c.unitary()
}
