use super::{check_qubit, DensityKind, DensityOperator, GateOp, Operator, C64, DIM};
use crate::error::{Error, Result};

/// Pure state of the five-spin register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<C64>,
}

impl QuantumState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    /// Computational basis state with the given index.
    pub fn basis(index: usize) -> Self {
        assert!(index < DIM, "basis index {index} out of range");
        let mut amps = vec![C64::new(0.0, 0.0); DIM];
        amps[index] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// Basis state from a label such as `"00011"` (qubit 1 first).
    pub fn from_label(label: &str) -> Result<Self> {
        super::basis_index(label).map(Self::basis)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if amps.len() != DIM {
            return Err(Error::InfeasibleInput(format!(
                "expected {DIM} amplitudes, got {}",
                amps.len()
            )));
        }
        let state = Self { amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InfeasibleInput(format!("state norm^2 {norm} != 1")));
        }
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies one gate, returning the new state.
    pub fn apply(&self, op: &GateOp) -> Result<Self> {
        op.validate()?;
        let mut amps = self.amps.clone();
        match *op {
            GateOp::Hadamard(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for_pairs(q, |i0, i1| {
                    let (a, b) = (amps[i0], amps[i1]);
                    amps[i0] = (a + b) * s;
                    amps[i1] = (a - b) * s;
                });
            }
            GateOp::Not(q) => for_pairs(q, |i0, i1| amps.swap(i0, i1)),
            GateOp::ZRotation { qubit, degrees } => {
                let phase = C64::from_polar(1.0, degrees.to_radians());
                for_pairs(qubit, |_, i1| amps[i1] *= phase);
            }
            GateOp::ConditionalZRotation {
                control,
                target,
                degrees,
                dagger,
            } => {
                let angle = if dagger { -degrees } else { degrees };
                let phase = C64::from_polar(1.0, angle.to_radians());
                let mask = bit(control) | bit(target);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= phase;
                    }
                }
            }
            GateOp::ControlledNot { control, target } => {
                let c = bit(control);
                for_pairs(target, |i0, i1| {
                    if i0 & c != 0 {
                        amps.swap(i0, i1);
                    }
                });
            }
            GateOp::ControlledTargetUnitary {
                control,
                targets: [hi, lo],
                ref block,
            } => {
                let (c, bh, bl) = (bit(control), bit(hi), bit(lo));
                for base in 0..DIM {
                    if base & c == 0 || base & (bh | bl) != 0 {
                        continue;
                    }
                    let idx = [base, base | bl, base | bh, base | bh | bl];
                    let old = idx.map(|i| amps[i]);
                    for (row, &i) in idx.iter().enumerate() {
                        amps[i] = (0..4).map(|col| block[row][col] * old[col]).sum();
                    }
                }
            }
        }
        Ok(Self { amps })
    }

    /// Applies a sequence of gates in time order.
    pub fn evolve<'a>(&self, ops: impl IntoIterator<Item = &'a GateOp>) -> Result<Self> {
        ops.into_iter().try_fold(self.clone(), |s, op| s.apply(op))
    }

    pub fn apply_operator(&self, u: &Operator) -> Self {
        let amps = (0..DIM)
            .map(|r| (0..DIM).map(|c| u[(r, c)] * self.amps[c]).sum())
            .collect();
        Self { amps }
    }

    /// `|psi><psi|` as a normalized density operator.
    pub fn density(&self) -> DensityOperator {
        let m = Operator::from_fn(DIM, DIM, |r, c| self.amps[r] * self.amps[c].conj());
        DensityOperator::new_unchecked(m, DensityKind::Normalized)
    }
}

/// Applies `gate` to `state`; free-function form of [`QuantumState::apply`].
pub fn apply_gate(state: &QuantumState, op: &GateOp) -> Result<QuantumState> {
    state.apply(op)
}

#[inline]
fn bit(q: usize) -> usize {
    1 << super::bit_position(q)
}

/// Calls `f(i0, i1)` for every index pair differing only in qubit `q`
/// (`i0` has the qubit at 0).
fn for_pairs(q: usize, mut f: impl FnMut(usize, usize)) {
    debug_assert!(check_qubit(q).is_ok());
    let b = bit(q);
    for i0 in (0..DIM).filter(|i| i & b == 0) {
        f(i0, i0 | b);
    }
}
