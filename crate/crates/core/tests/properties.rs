use num_rational::BigRational;
use orderfind::circuits::NativeOp;
use orderfind::lp::{LinearProgram, LpScalar, QSqrt2, Relation};
use orderfind::measurement::{solve_guess, sweep, OUTCOMES};
use orderfind::perm::Permutation;
use orderfind::prodops::{apply_prep, dense_prep_image, equilibrium_zsum, PrepSequence};
use orderfind::sim::{
    self, Circuit, DensityKind, DensityOperator, GateOp, QuantumState, C64, DIM, QUBITS,
};
use orderfind::spectra::{line_frequency, net_area, readout_lines, LineLabel, MoleculeParams};
use orderfind::Execution;
use proptest::prelude::*;

fn qubit() -> impl Strategy<Value = usize> {
    1..=QUBITS
}

fn qubit_pair() -> impl Strategy<Value = (usize, usize)> {
    (qubit(), qubit()).prop_filter("distinct qubits", |(a, b)| a != b)
}

fn permutation() -> impl Strategy<Value = Permutation> {
    (0..24usize).prop_map(|k| Permutation::all()[k])
}

fn gate() -> impl Strategy<Value = GateOp> {
    prop_oneof![
        qubit().prop_map(GateOp::Hadamard),
        qubit().prop_map(GateOp::Not),
        (qubit(), -360.0..360.0f64)
            .prop_map(|(qubit, degrees)| GateOp::ZRotation { qubit, degrees }),
        (qubit_pair(), -360.0..360.0f64, any::<bool>()).prop_map(
            |((control, target), degrees, dagger)| {
                GateOp::ConditionalZRotation {
                    control,
                    target,
                    degrees,
                    dagger,
                }
            }
        ),
        qubit_pair().prop_map(|(control, target)| GateOp::ControlledNot { control, target }),
        (qubit(), qubit(), qubit(), permutation())
            .prop_filter("distinct qubits", |(c, a, b, _)| c != a && c != b && a != b)
            .prop_map(|(control, a, b, pi)| GateOp::ControlledTargetUnitary {
                control,
                targets: [a, b],
                block: pi.block(),
            }),
    ]
}

fn circuit(max: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate(), 0..=max)
        .prop_map(|ops| Circuit::from_ops(ops).expect("valid gates"))
}

fn random_state() -> impl Strategy<Value = QuantumState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), DIM)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            let amps = v
                .iter()
                .map(|(a, b)| C64::new(a / norm, b / norm))
                .collect();
            QuantumState::from_amplitudes(amps).expect("normalized")
        })
}

fn native_prep_op() -> impl Strategy<Value = NativeOp> {
    prop_oneof![
        qubit_pair().prop_map(|(control, target)| NativeOp::Cnot { control, target }),
        qubit().prop_map(NativeOp::Not),
    ]
}

fn molecule() -> impl Strategy<Value = MoleculeParams> {
    (
        prop::array::uniform5(-5000.0..5000.0f64),
        prop::array::uniform10(-100.0..100.0f64),
        0.1..5.0f64,
    )
        .prop_map(|(shifts, upper, lw)| {
            let mut j = [[0.0; QUBITS]; QUBITS];
            let mut k = 0;
            for a in 0..QUBITS {
                for b in a + 1..QUBITS {
                    j[a][b] = upper[k];
                    j[b][a] = upper[k];
                    k += 1;
                }
            }
            MoleculeParams::new(shifts, j, lw, 1).expect("valid parameters")
        })
}

/// Eigenvalue of the weak-coupling Hamiltonian `-sum shift_i I_zi +
/// sum_{i<j} J_ij I_zi I_zj` (in Hz) on a computational basis state.
fn energy(params: &MoleculeParams, index: usize) -> f64 {
    let iz = |q: usize| {
        if sim::qubit_value(index, q) == 0 {
            0.5
        } else {
            -0.5
        }
    };
    let mut e = 0.0;
    for i in 1..=QUBITS {
        e -= params.shift(i) * iz(i);
        for j in i + 1..=QUBITS {
            e += params.coupling(i, j) * iz(i) * iz(j);
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circuits_preserve_norm(c in circuit(100), psi in random_state()) {
        let out = c.apply(&psi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gate_application_matches_unitary(c in circuit(30), psi in random_state()) {
        let direct = c.apply(&psi).unwrap();
        let via_matrix = psi.apply_operator(&c.unitary().unwrap());
        let diff = direct
            .amplitudes()
            .iter()
            .zip(via_matrix.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
    }

    #[test]
    fn permutation_powers_add(pi in permutation(), a in 0u64..40, b in 0u64..40) {
        prop_assert_eq!(pi.power(a + b), pi.power(a).compose(&pi.power(b)));
        prop_assert_eq!(pi.compose(&pi.inverse()), Permutation::IDENTITY);
        for y in 0..4 {
            let r = pi.order_of(y).unwrap() as u64;
            prop_assert_eq!(pi.power(r).apply(y), y);
            prop_assert!((1..r).all(|k| pi.power(k).apply(y) != y));
        }
    }

    #[test]
    fn prep_conjugation_matches_dense(ops in prop::collection::vec(native_prep_op(), 0..12)) {
        let seq = PrepSequence::new(ops).unwrap();
        let symbolic = apply_prep(&seq, &equilibrium_zsum()).unwrap();
        prop_assert_eq!(symbolic, dense_prep_image(&seq).unwrap());
    }

    #[test]
    fn readout_is_linear(
        a in random_state(),
        b in random_state(),
        alpha in 0.0..1.0f64,
        spin in qubit(),
    ) {
        let params = MoleculeParams::synthetic();
        let (ra, rb) = (a.density(), b.density());
        let mixed = ra.combine(alpha, &rb, 1.0 - alpha);
        let la = readout_lines(&ra, spin, &params).unwrap();
        let lb = readout_lines(&rb, spin, &params).unwrap();
        let lm = readout_lines(&mixed, spin, &params).unwrap();
        prop_assert_eq!(lm.len(), 16);
        for ((x, y), m) in la.iter().zip(&lb).zip(&lm) {
            let expected = x.amplitude * alpha + y.amplitude * (1.0 - alpha);
            prop_assert!((m.amplitude - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn line_frequencies_match_energy_differences(params in molecule(), spin in qubit()) {
        for label in LineLabel::all() {
            let f = line_frequency(spin, label, &params).unwrap();
            let lower = label
                .neighbours(spin)
                .fold(0usize, |acc, (j, bit)| acc | bit << sim::bit_position(j));
            let upper = lower | 1 << sim::bit_position(spin);
            let gap = energy(&params, upper) - energy(&params, lower);
            prop_assert!((f - gap).abs() < 1e-9, "{} vs {}", f, gap);
        }
    }

    #[test]
    fn qsqrt2_matches_floating_point(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
        let x = QSqrt2::from_ints(a, b, 7);
        let y = QSqrt2::from_ints(c, d, 3);
        let (xf, yf) = (x.approx_f64(), y.approx_f64());
        prop_assert!(((x.clone() * y.clone()).approx_f64() - xf * yf).abs() < 1e-9);
        prop_assert!(((x.clone() - y.clone()).approx_f64() - (xf - yf)).abs() < 1e-9);
        prop_assert_eq!(x.sign(), xf.partial_cmp(&0.0).unwrap());
        if c != 0 || d != 0 {
            prop_assert!(((x / y).approx_f64() - xf / yf).abs() < 1e-6 * (1.0 + (xf / yf).abs()));
        }
    }

    #[test]
    fn exact_and_float_simplex_agree(
        c in prop::array::uniform3(0i64..10),
        rows in prop::array::uniform3(prop::array::uniform3(1i64..8)),
        rhs in prop::array::uniform3(1i64..30),
    ) {
        let mut exact = LinearProgram::<BigRational>::new(3);
        let mut float = LinearProgram::<f64>::new(3);
        exact.objective = c.iter().map(|&v| BigRational::from_ratio(v, 1)).collect();
        float.objective = c.iter().map(|&v| v as f64).collect();
        for (row, b) in rows.iter().zip(rhs) {
            let terms_q: Vec<(usize, BigRational)> =
                row.iter().enumerate().map(|(k, &v)| (k, BigRational::from_ratio(v, 1))).collect();
            let terms_f: Vec<(usize, f64)> = row.iter().enumerate().map(|(k, &v)| (k, v as f64)).collect();
            exact.constrain(&terms_q, Relation::Le, BigRational::from_ratio(b, 1));
            float.constrain(&terms_f, Relation::Le, b as f64);
        }
        let e = exact.maximize().unwrap();
        let f = float.maximize().unwrap();
        prop_assert!((e.value.approx_f64() - f.value).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn circuit_unitaries_are_unitary(c in circuit(100)) {
        prop_assert!(sim::unitarity_defect(&c.unitary().unwrap()) < 1e-10);
    }

    #[test]
    fn guess_value_ignores_relabelling(
        raw in prop::array::uniform4(prop::array::uniform8(0u32..20)),
        relabel in permutation(),
    ) {
        let dists: [[BigRational; OUTCOMES]; 4] = std::array::from_fn(|r| {
            let total: u32 = raw[r].iter().sum::<u32>().max(1);
            std::array::from_fn(|m| {
                let v = if raw[r].iter().all(|x| *x == 0) { u32::from(m == 0) } else { raw[r][m] };
                BigRational::from_ratio(v as i64, total as i64)
            })
        });
        let shuffled: [[BigRational; OUTCOMES]; 4] =
            std::array::from_fn(|r| dists[relabel.apply(r)].clone());
        let a = solve_guess(&dists).unwrap();
        let b = solve_guess(&shuffled).unwrap();
        prop_assert_eq!(a.value.clone(), b.value);
        let approx = solve_guess(&dists.clone().map(|row| row.map(|v| v.approx_f64()))).unwrap();
        prop_assert!((approx.value - a.value.approx_f64()).abs() < 1e-9);
    }
}

#[test]
fn net_area_tracks_spin_observables_over_the_sweep() {
    let params = MoleculeParams::synthetic();
    for row in sweep(Execution::Sequential) {
        let rho = orderfind::circuits::final_state(&row.spec).density();
        for spin in 1..=3 {
            let area = net_area(&readout_lines(&rho, spin, &params).unwrap());
            let o = rho.expectation_iz(spin).unwrap();
            assert!(
                (area - o).abs() < 1e-10,
                "{} y={} spin {spin}",
                row.spec.pi,
                row.spec.y
            );
        }
    }
}

#[test]
fn deviation_operators_are_accepted_by_readout() {
    let m = equilibrium_zsum().dense();
    let rho = DensityOperator::new(m, DensityKind::Deviation).unwrap();
    let lines = readout_lines(&rho, 2, &MoleculeParams::synthetic()).unwrap();
    assert!(lines
        .iter()
        .all(|l| (l.amplitude - lines[0].amplitude).norm() < 1e-12));
}
