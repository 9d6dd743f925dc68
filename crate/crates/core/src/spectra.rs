//! Readout spectra of a weakly coupled five-spin molecule.
//!
//! After an ideal 90 degree pulse on one spin, each of its 16 single-quantum
//! coherences gives one line. The line is labelled by the configuration of
//! the other four spins, and its position is shifted by `+-J/2` per
//! neighbour.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::sim::{self, DensityOperator, C64, DIM, QUBITS};

/// Number of lines per spin.
pub const LINES_PER_SPIN: usize = 1 << (QUBITS - 1);
/// Amplitudes below this magnitude are reported as exactly zero.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

const SYNTHETIC: &str = include_str!("../data/synthetic_molecule.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMolecule {
    shifts: Vec<f64>,
    #[serde(rename = "J")]
    couplings: Vec<Vec<f64>>,
    linewidth_hz: f64,
    #[serde(default = "default_reference")]
    reference_spin: usize,
}

fn default_reference() -> usize {
    1
}

/// Chemical shifts, scalar couplings and linewidth, all in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeParams {
    shifts: [f64; QUBITS],
    couplings: [[f64; QUBITS]; QUBITS],
    linewidth: f64,
    reference_spin: usize,
}

impl MoleculeParams {
    pub fn new(
        shifts: [f64; QUBITS],
        couplings: [[f64; QUBITS]; QUBITS],
        linewidth: f64,
        reference_spin: usize,
    ) -> Result<Self> {
        if !(linewidth > 0.0 && linewidth.is_finite()) {
            return Err(Error::Config(format!(
                "linewidth_hz must be positive, got {linewidth}"
            )));
        }
        if !(1..=QUBITS).contains(&reference_spin) {
            return Err(Error::Config(format!(
                "reference_spin must be in 1..={QUBITS}, got {reference_spin}"
            )));
        }
        if shifts
            .iter()
            .chain(couplings.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config("shifts and couplings must be finite".into()));
        }
        for i in 0..QUBITS {
            if couplings[i][i] != 0.0 {
                return Err(Error::Config(format!("J[{i}][{i}] must be zero")));
            }
            for j in 0..i {
                if couplings[i][j] != couplings[j][i] {
                    return Err(Error::Config(format!(
                        "J is not symmetric: J[{i}][{j}] = {} but J[{j}][{i}] = {}",
                        couplings[i][j], couplings[j][i]
                    )));
                }
            }
        }
        Ok(Self {
            shifts,
            couplings,
            linewidth,
            reference_spin,
        })
    }

    /// The bundled synthetic molecule.
    pub fn synthetic() -> Self {
        Self::from_toml(SYNTHETIC).expect("bundled molecule is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawMolecule = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let shifts: [f64; QUBITS] = raw.shifts.as_slice().try_into().map_err(|_| {
            Error::Config(format!(
                "shifts must have {QUBITS} entries, got {}",
                raw.shifts.len()
            ))
        })?;
        if raw.couplings.len() != QUBITS || raw.couplings.iter().any(|row| row.len() != QUBITS) {
            return Err(Error::Config(format!(
                "J must be a {QUBITS}x{QUBITS} array"
            )));
        }
        let couplings = std::array::from_fn(|i| std::array::from_fn(|j| raw.couplings[i][j]));
        Self::new(shifts, couplings, raw.linewidth_hz, raw.reference_spin)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Shift of spin `i` (1-based).
    pub fn shift(&self, i: usize) -> f64 {
        self.shifts[i - 1]
    }

    /// Coupling between spins `i` and `j` (1-based).
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i - 1][j - 1]
    }

    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    pub fn reference_spin(&self) -> usize {
        self.reference_spin
    }
}

/// Configuration of the four spins other than the observed one, listed in
/// ascending spin order; the first character belongs to the lowest spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineLabel(u8);

impl LineLabel {
    pub fn all() -> impl Iterator<Item = LineLabel> {
        (0..LINES_PER_SPIN as u8).map(LineLabel)
    }

    /// Bits of the other spins, most significant first.
    pub fn bits(&self) -> u8 {
        self.0
    }

    /// The state of each other spin, paired with its spin number.
    pub fn neighbours(&self, spin: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let others: Vec<usize> = (1..=QUBITS).filter(|&j| j != spin).collect();
        others
            .into_iter()
            .enumerate()
            .map(move |(k, j)| (j, ((self.0 >> (QUBITS - 2 - k)) & 1) as usize))
    }

    /// Basis index with `spin` set to `value` and the others from the label.
    fn basis_index(&self, spin: usize, value: usize) -> usize {
        let mut index = value << sim::bit_position(spin);
        for (j, bit) in self.neighbours(spin) {
            index |= bit << sim::bit_position(j);
        }
        index
    }
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl FromStr for LineLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != QUBITS - 1 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Config(format!(
                "line label must be four binary digits, got '{s}'"
            )));
        }
        Ok(LineLabel(u8::from_str_radix(s, 2).expect("validated")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub spin: usize,
    pub label: LineLabel,
    pub frequency: f64,
    pub amplitude: C64,
}

/// Position of the line of `spin` whose neighbours are in `label`: each
/// neighbour in `|0>` lowers it by `J/2`, each in `|1>` raises it by `J/2`.
pub fn line_frequency(spin: usize, label: LineLabel, params: &MoleculeParams) -> Result<f64> {
    sim::check_qubit(spin)?;
    Ok(label
        .neighbours(spin)
        .fold(params.shift(spin), |f, (j, bit)| {
            let s = if bit == 1 { 1.0 } else { -1.0 };
            f + s * params.coupling(spin, j) / 2.0
        }))
}

/// Rotation by 90 degrees about y on one spin, taking `|0>` to
/// `(|0> + |1>)/sqrt 2`.
fn readout_rotation(spin: usize) -> Result<sim::Operator> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = sim::Operator::zeros(DIM, DIM);
    for col in 0..DIM {
        let bit = sim::qubit_value(col, spin);
        let flipped = col ^ (1 << sim::bit_position(spin));
        u[(col, col)] = C64::new(h, 0.0);
        u[(flipped, col)] = C64::new(if bit == 0 { h } else { -h }, 0.0);
    }
    Ok(u)
}

/// Lines of `spin` after an ideal 90 degree readout pulse.
///
/// Each amplitude is twice the `<0 L| rho' |1 L>` coherence of the rotated
/// state, which for a state diagonal in the computational basis equals the
/// population difference of `spin` within configuration `L`. The lines of
/// such a state therefore sum to `O_spin`.
pub fn readout_lines(
    rho: &DensityOperator,
    spin: usize,
    params: &MoleculeParams,
) -> Result<Vec<SpectralLine>> {
    sim::check_qubit(spin)?;
    let u = readout_rotation(spin)?;
    let rotated = rho.conjugate(&u);
    let m = rotated.matrix();
    LineLabel::all()
        .map(|label| {
            let mut amplitude = m[(label.basis_index(spin, 0), label.basis_index(spin, 1))] * 2.0;
            if amplitude.norm() < AMPLITUDE_FLOOR {
                amplitude = C64::new(0.0, 0.0);
            }
            Ok(SpectralLine {
                spin,
                label,
                frequency: line_frequency(spin, label, params)?,
                amplitude,
            })
        })
        .collect()
}

/// Sum of the absorptive parts of the line amplitudes.
pub fn net_area(lines: &[SpectralLine]) -> f64 {
    lines.iter().map(|l| l.amplitude.re).sum()
}

/// A uniform frequency grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

impl FrequencyGrid {
    pub fn new(f_min: f64, f_max: f64, points: usize) -> Result<Self> {
        if !(f_min.is_finite() && f_max.is_finite() && f_min < f_max) {
            return Err(Error::InvalidGrid(format!(
                "need f_min < f_max, got {f_min} and {f_max}"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {points}"
            )));
        }
        Ok(Self {
            f_min,
            f_max,
            points,
        })
    }

    /// A grid spanning the lines of one spin with a margin of ten linewidths.
    pub fn around(lines: &[SpectralLine], params: &MoleculeParams, points: usize) -> Result<Self> {
        let margin = 10.0 * params.linewidth();
        let lo = lines
            .iter()
            .map(|l| l.frequency)
            .fold(f64::INFINITY, f64::min);
        let hi = lines
            .iter()
            .map(|l| l.frequency)
            .fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo - margin, hi + margin, points)
    }

    pub fn step(&self) -> f64 {
        (self.f_max - self.f_min) / (self.points - 1) as f64
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.f_min + k as f64 * self.step()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.frequency(k))
    }
}

impl FromStr for FrequencyGrid {
    type Err = Error;

    /// Parses `fmin,fmax,points`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(Error::InvalidGrid(format!(
                "expected fmin,fmax,points, got '{s}'"
            )));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("'{t}' is not a number")))
        };
        let points = n
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid(format!("'{n}' is not a point count")))?;
        Self::new(num(lo)?, num(hi)?, points)
    }
}

/// Complex Lorentzian of unit integrated absorption centred on `center`.
pub fn lorentzian(f: f64, center: f64, linewidth: f64) -> C64 {
    let hwhm = linewidth / 2.0;
    C64::new(1.0 / std::f64::consts::PI, 0.0) / C64::new(hwhm, -(f - center))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub lines: Vec<SpectralLine>,
    pub trace: Option<Vec<(f64, C64)>>,
}

/// Renders the lines as a superposition of Lorentzians on `grid`.
pub fn render_spectrum(
    lines: &[SpectralLine],
    params: &MoleculeParams,
    grid: &FrequencyGrid,
) -> Spectrum {
    let trace = grid
        .frequencies()
        .map(|f| {
            let value = lines
                .iter()
                .map(|l| l.amplitude * lorentzian(f, l.frequency, params.linewidth()))
                .sum();
            (f, value)
        })
        .collect();
    Spectrum {
        lines: lines.to_vec(),
        trace: Some(trace),
    }
}
