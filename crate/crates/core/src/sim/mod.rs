//! Dense simulation of the five-spin register.
//!
//! Basis states are labelled `b1 b2 b3 b4 b5` with qubit 1 as the most
//! significant bit, so basis index `i` holds qubit `q` in bit `5 - q`.
//! Qubits 1..=3 form the exponent register, qubits 4..=5 the target register.

mod density;
mod gate;
mod state;

pub use density::{expectation_iz, DensityKind, DensityOperator};
pub use gate::{circuit_unitary, Circuit, GateOp};
pub use state::{apply_gate, QuantumState};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of spins in the register.
pub const QUBITS: usize = 5;
/// Hilbert-space dimension of the register.
pub const DIM: usize = 1 << QUBITS;

pub type C64 = Complex64;
/// A dense 32x32 operator on the register.
pub type Operator = DMatrix<C64>;

/// Bit position of 1-based qubit `q` inside a basis index.
#[inline]
pub fn bit_position(q: usize) -> usize {
    QUBITS - q
}

/// Value (0 or 1) of qubit `q` in basis state `index`.
#[inline]
pub fn qubit_value(index: usize, q: usize) -> usize {
    (index >> bit_position(q)) & 1
}

/// Parses a basis label such as `"00011"` into its index.
pub fn basis_index(label: &str) -> Result<usize> {
    if label.len() != QUBITS || !label.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidToken {
            token: label.to_string(),
            position: 0,
        });
    }
    Ok(usize::from_str_radix(label, 2).expect("validated binary label"))
}

pub(crate) fn check_qubit(q: usize) -> Result<()> {
    if (1..=QUBITS).contains(&q) {
        Ok(())
    } else {
        Err(Error::QubitOutOfRange(q))
    }
}

pub fn identity() -> Operator {
    Operator::identity(DIM, DIM)
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Distance of `u * u^dagger` from the identity, entry-wise.
pub fn unitarity_defect(u: &Operator) -> f64 {
    let prod = u * u.adjoint();
    max_abs_diff(&prod, &Operator::identity(u.nrows(), u.ncols()))
}

/// The 8-point discrete Fourier transform `w^{jk} / sqrt(8)`, `w = e^{2 pi i / 8}`.
pub fn dft8() -> DMatrix<C64> {
    let norm = 1.0 / 8f64.sqrt();
    DMatrix::from_fn(8, 8, |k, j| {
        C64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / 8.0)
    })
}

/// Kronecker product, first factor on the more significant bits.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}
