//! The three-qubit QFT, the order-finding circuit, and native pulse-level
//! oracle sequences.
//!
//! Native sequences are written as whitespace-separated tokens: `C35`
//! (controlled-NOT, control 3, target 5), `P54` (90 degree conditional
//! z-rotation of spin 4 when spin 5 is `|1>`), `P54'` (its inverse) and
//! `N3` (NOT on spin 3). Tokens are listed in time order: the first token
//! acts first.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::perm::{self, OracleSpec, Permutation};
use crate::sim::{self, Circuit, GateOp, Operator, QuantumState, C64};

/// One native operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NativeOp {
    /// `C_ij`: flips spin `target` iff spin `control` is `|1>`.
    Cnot { control: usize, target: usize },
    /// `P_ij`: rotates spin `target` by 90 degrees about z iff spin
    /// `control` is `|1>`; `dagger` gives the inverse rotation.
    Phase {
        control: usize,
        target: usize,
        dagger: bool,
    },
    /// `N_i`.
    Not(usize),
}

impl NativeOp {
    pub fn gate(&self) -> GateOp {
        match *self {
            NativeOp::Cnot { control, target } => GateOp::ControlledNot { control, target },
            NativeOp::Phase {
                control,
                target,
                dagger,
            } => GateOp::ConditionalZRotation {
                control,
                target,
                degrees: 90.0,
                dagger,
            },
            NativeOp::Not(q) => GateOp::Not(q),
        }
    }

    fn parse_token(token: &str, position: usize) -> Result<Self> {
        let bad = || Error::InvalidToken {
            token: token.to_string(),
            position,
        };
        let (body, dagger) = match token
            .strip_suffix('\'')
            .or_else(|| token.strip_suffix('\u{2020}'))
        {
            Some(b) => (b, true),
            None => (token, false),
        };
        let mut chars = body.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let digits: Vec<usize> = chars
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect::<Result<_>>()?;
        let op = match (kind.to_ascii_uppercase(), digits.as_slice(), dagger) {
            ('C', &[i, j], false) => NativeOp::Cnot {
                control: i,
                target: j,
            },
            ('P', &[i, j], _) => NativeOp::Phase {
                control: i,
                target: j,
                dagger,
            },
            ('N', &[i], false) => NativeOp::Not(i),
            _ => return Err(bad()),
        };
        op.gate().validate().map_err(|_| bad())?;
        Ok(op)
    }
}

impl fmt::Display for NativeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NativeOp::Cnot { control, target } => write!(f, "C{control}{target}"),
            NativeOp::Phase {
                control,
                target,
                dagger,
            } => write!(f, "P{control}{target}{}", if dagger { "'" } else { "" }),
            NativeOp::Not(q) => write!(f, "N{q}"),
        }
    }
}

/// How a written list of native tokens maps onto time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeOrder {
    /// The leftmost token is applied first.
    #[default]
    LeftFirst,
    /// Operator-product notation: the rightmost token is applied first.
    RightFirst,
}

impl FromStr for TimeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left-first" | "time" => Ok(TimeOrder::LeftFirst),
            "right-first" | "product" => Ok(TimeOrder::RightFirst),
            other => Err(Error::Config(format!(
                "unknown time order '{other}' (expected left-first or right-first)"
            ))),
        }
    }
}

/// An ordered list of native operations, first element acting first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NativeSequence {
    ops: Vec<NativeOp>,
}

impl NativeSequence {
    pub fn new(ops: Vec<NativeOp>) -> Result<Self> {
        for (position, op) in ops.iter().enumerate() {
            op.gate().validate().map_err(|_| Error::InvalidToken {
                token: op.to_string(),
                position,
            })?;
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[NativeOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Parses whitespace-separated tokens written in the given order.
    pub fn parse_ordered(s: &str, order: TimeOrder) -> Result<Self> {
        let seq: Self = s.parse()?;
        Ok(match order {
            TimeOrder::LeftFirst => seq,
            TimeOrder::RightFirst => seq.reversed(),
        })
    }

    /// The same tokens read in the opposite time order.
    pub fn reversed(&self) -> Self {
        Self {
            ops: self.ops.iter().rev().copied().collect(),
        }
    }

    pub fn circuit(&self) -> Circuit {
        Circuit::from_ops(self.ops.iter().map(NativeOp::gate).collect())
            .expect("native ops are validated on construction")
    }

    /// Product of the native-gate unitaries in time order.
    pub fn unitary(&self) -> Operator {
        self.circuit().unitary().expect("validated")
    }
}

impl FromStr for NativeSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .split_whitespace()
            .enumerate()
            .map(|(i, t)| NativeOp::parse_token(t, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ops })
    }
}

impl fmt::Display for NativeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.ops.iter().map(NativeOp::to_string).collect();
        f.write_str(&tokens.join(" "))
    }
}

/// Free-function form of [`NativeSequence::unitary`].
pub fn native_sequence_unitary(seq: &NativeSequence) -> Operator {
    seq.unitary()
}

/// The oracle sequences used for the four experimental instances, keyed
/// by the order they were run for. The strings are written in
/// operator-product notation, so they are read right to left.
pub fn experimental_oracle_sequences() -> [(usize, NativeSequence); 4] {
    [
        (1, "P54 C35 P54' C35 P34"),
        (2, "C35"),
        (
            3,
            "C32 C25 C32 C21 P14 C51 P14' C51 P54 C21 P15 C41 P15' C41 P45",
        ),
        (4, "C24 P34 P54 C35 P54"),
    ]
    .map(|(r, s)| {
        let seq = NativeSequence::parse_ordered(s, TimeOrder::RightFirst)
            .expect("static sequence parses");
        (r, seq)
    })
}

/// Three-qubit QFT on qubits 1..=3.
///
/// Without the final swap, qubit 1 ends up holding the least significant
/// bit of the output; with it, the unitary is the textbook 8-point DFT.
pub fn build_qft3(include_final_swap: bool) -> Circuit {
    let cz = |control, target, degrees| GateOp::ConditionalZRotation {
        control,
        target,
        degrees,
        dagger: false,
    };
    let mut ops = vec![
        GateOp::Hadamard(1),
        cz(2, 1, 90.0),
        cz(3, 1, 45.0),
        GateOp::Hadamard(2),
        cz(3, 2, 90.0),
        GateOp::Hadamard(3),
    ];
    if include_final_swap {
        let cx = |control, target| GateOp::ControlledNot { control, target };
        ops.extend([cx(1, 3), cx(3, 1), cx(1, 3)]);
    }
    Circuit::from_ops(ops).expect("static circuit")
}

/// The 8-point DFT with output bits reversed, as produced by the QFT
/// without its final swap.
pub fn bit_reversed_dft8() -> sim::Operator {
    let f = sim::dft8();
    sim::Operator::from_fn(8, 8, |row, col| f[(reverse3(row), col)])
}

fn reverse3(x: usize) -> usize {
    ((x & 1) << 2) | (x & 2) | (x >> 2)
}

/// Largest entry-wise deviation of [`build_qft3`] from its ideal 8-point
/// transform, acting as the identity on the target register.
pub fn qft_deviation(include_final_swap: bool) -> f64 {
    let ideal = if include_final_swap {
        sim::dft8()
    } else {
        bit_reversed_dft8()
    };
    let expected = sim::kron(&ideal, &sim::Operator::identity(4, 4));
    let actual = build_qft3(include_final_swap)
        .unitary()
        .expect("static circuit");
    sim::max_abs_diff(&actual, &expected)
}

/// Tolerance for the QFT comparison.
pub const QFT_TOLERANCE: f64 = 1e-12;

/// Hadamards on the exponent register, the three controlled powers of `pi`,
/// then the swap-free QFT. The input `|000>|y>` is supplied separately.
pub fn build_orderfinding(spec: &OracleSpec) -> Circuit {
    let mut ops: Vec<GateOp> = (1..=3).map(GateOp::Hadamard).collect();
    ops.extend(perm::oracle_stages(&spec.pi));
    let mut c = Circuit::from_ops(ops).expect("static circuit");
    c.extend(&build_qft3(false));
    c
}

/// State after running the order-finding circuit on `|000>|y>`.
pub fn final_state(spec: &OracleSpec) -> QuantumState {
    build_orderfinding(spec)
        .apply(&QuantumState::basis(spec.initial_index()))
        .expect("validated circuit")
}

/// `(H (x) H (x) H |000>) (x) |y>`.
pub fn uniform_input(y: usize) -> QuantumState {
    let amp = C64::new(1.0 / 8f64.sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); sim::DIM];
    for x in 0..8 {
        amps[(x << 2) | y] = amp;
    }
    QuantumState::from_amplitudes(amps).expect("normalized")
}

/// `(1/sqrt 8) sum_x |x>|pi^x(y)>`.
pub fn ideal_oracle_output(pi: &Permutation, y: usize) -> QuantumState {
    let amp = C64::new(1.0 / 8f64.sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); sim::DIM];
    for x in 0..8u64 {
        amps[((x as usize) << 2) | pi.power(x).apply(y)] = amp;
    }
    QuantumState::from_amplitudes(amps).expect("normalized")
}

/// Per-amplitude tolerance of [`verify_oracle_sequence`].
pub const SEQUENCE_TOLERANCE: f64 = 1e-9;

/// True iff `a` equals `b` up to one global phase, amplitude by amplitude.
pub fn equal_up_to_phase(a: &QuantumState, b: &QuantumState, tol: f64) -> bool {
    let overlap = b.inner(a);
    if overlap.norm() < 1e-6 {
        return false;
    }
    let phase = overlap / overlap.norm();
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .all(|(x, y)| (x - phase * y).norm() <= tol)
}

/// Checks that `seq` realizes `|x>|y> -> |x>|pi^x(y)>` on the uniform
/// exponent-register input for this particular `y`.
pub fn verify_oracle_sequence(seq: &NativeSequence, pi: &Permutation, y: usize) -> bool {
    if perm::check_element(y).is_err() {
        return false;
    }
    let out = seq
        .circuit()
        .apply(&uniform_input(y))
        .expect("validated sequence");
    equal_up_to_phase(&out, &ideal_oracle_output(pi, y), SEQUENCE_TOLERANCE)
}

/// Every `(pi, y)` instance for which `seq` verifies, in [`OracleSpec::all`] order.
pub fn search_oracle_sequence(seq: &NativeSequence, exec: Execution) -> Vec<OracleSpec> {
    let circuit = seq.circuit();
    let outputs: Vec<QuantumState> = (0..perm::ELEMENTS)
        .map(|y| circuit.apply(&uniform_input(y)).expect("validated"))
        .collect();
    exec::filter_map(exec, &OracleSpec::all(), |spec| {
        equal_up_to_phase(
            &outputs[spec.y],
            &ideal_oracle_output(&spec.pi, spec.y),
            SEQUENCE_TOLERANCE,
        )
        .then_some(*spec)
    })
}
