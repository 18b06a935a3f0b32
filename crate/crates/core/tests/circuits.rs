mod common;

use oblique_kit::circuits::{
    reduce_netlist, solve_current_driven, solve_voltage_driven, DriveMode, DriveVector, Netlist, ReducedCircuit,
};
use oblique_kit::{fixtures, random, Error};
use proptest::prelude::*;

fn solve(circuit: &ReducedCircuit, mode: DriveMode) -> (Vec<f64>, f64) {
    let drive = DriveVector::from_sources(circuit, mode).unwrap();
    let sol = match mode {
        DriveMode::Current => solve_current_driven(circuit, &drive),
        DriveMode::Voltage => solve_voltage_driven(circuit, &drive),
    }
    .unwrap();
    (sol.edge_values, sol.report.power)
}

fn assert_matches_nodal(net: &Netlist, tol: f64) {
    let circuit = reduce_netlist(net).unwrap();
    for mode in [DriveMode::Current, DriveMode::Voltage] {
        let (values, power) = solve(&circuit, mode);
        let (expected, expected_power) = common::nodal_solve(net, mode);
        let scale = expected.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for (k, (x, y)) in values.iter().zip(&expected).enumerate() {
            assert!((x - y).abs() <= tol * scale, "{mode} resistor {k}: {x} vs {y}");
        }
        assert!(
            (power - expected_power).abs() <= tol * expected_power.max(1.0),
            "{mode} power {power} vs {expected_power}"
        );
    }
}

#[test]
fn bridge_matches_nodal_analysis() {
    assert_matches_nodal(&fixtures::bridge_netlist(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 1e-12);
    assert_matches_nodal(&fixtures::bridge_netlist(&[0.3, 7.0, 1.1, 2.5, 0.2, 9.0]), 1e-12);
}

#[test]
fn bridge_current_drive_follows_source_directions() {
    // I1 runs TM → TL, so R1 (BL → TL) carries it against its orientation.
    let net = fixtures::bridge_netlist(&[1.0; 6]);
    let (currents, _) = common::nodal_solve(&net, DriveMode::Current);
    assert!((currents[0] + 1.0).abs() < 1e-12);
    assert!((currents[1] + 1.0).abs() < 1e-12);
    assert!((currents[2] - 1.0).abs() < 1e-12);
}

#[test]
fn source_on_chord_with_open_carrier_is_rejected() {
    let mut net = fixtures::bridge_netlist(&[1.0; 6]);
    // a second resistor at the series node leaves the source without a unique carrier
    net.resistors.push(oblique_kit::circuits::ResistorSpec { from: 6, to: 4, ohms: 1.0 });
    assert!(matches!(reduce_netlist(&net), Err(Error::InvalidSource(_)) | Err(Error::ShortCircuit(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_netlists_match_nodal_analysis(seed in any::<u64>()) {
        let net = random::random_netlist(&mut random::rng(seed), 7, 12);
        assert_matches_nodal(&net, 1e-9);
    }

    #[test]
    fn power_is_quadratic_in_drive(seed in any::<u64>(), scale in -3.0f64..3.0) {
        let net = random::random_netlist(&mut random::rng(seed), 6, 10);
        let circuit = reduce_netlist(&net).unwrap();
        for mode in [DriveMode::Current, DriveMode::Voltage] {
            let base = DriveVector::from_sources(&circuit, mode).unwrap();
            let scaled = DriveVector::new(&circuit, mode, base.values.iter().map(|v| v * scale).collect()).unwrap();
            let power = |d: &DriveVector| match mode {
                DriveMode::Current => solve_current_driven(&circuit, d),
                DriveMode::Voltage => solve_voltage_driven(&circuit, d),
            }.unwrap().report.power;
            let (p1, p2) = (power(&base), power(&scaled));
            prop_assert!(p1 >= 0.0);
            prop_assert!((p2 - scale * scale * p1).abs() <= 1e-9 * p2.abs().max(1.0));
        }
    }
}
