// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! OpenQASM 2.0 export.

use std::fmt::Write as _;
use std::path::Path;

use crate::circuit::{lower_to_native, Circuit, Gate};
use crate::error::Result;

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped.
pub fn format_angle(x: f64) -> String {
    const SIG: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIG - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn gate_line(g: &Gate) -> String {
    match *g {
        Gate::Rx { qubit, theta } => format!("rx({}) q[{qubit}];", format_angle(theta)),
        Gate::Ry { qubit, theta } => format!("ry({}) q[{qubit}];", format_angle(theta)),
        Gate::Rz { qubit, theta } => format!("rz({}) q[{qubit}];", format_angle(theta)),
        Gate::X { qubit } => format!("x q[{qubit}];"),
        Gate::Cx { control, target } => format!("cx q[{control}],q[{target}];"),
        _ => unreachable!("macro gates are lowered before export"),
    }
}

pub fn to_qasm(circuit: &Circuit) -> String {
    let md = &circuit.metadata;
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if let Some(p) = md.protocol {
        let _ = writeln!(out, "// protocol: {}", p.as_str());
    }
    if let Some(h) = md.handedness {
        let _ = writeln!(out, "// enantiomer: {}", h.as_str());
    }
    let _ = writeln!(out, "// trotter_steps: {} (q_steps: {})", md.n_steps, md.k);
    let _ = writeln!(out, "// delta_t_us: {}", format_angle(md.delta_t));
    out.push_str("// bit order: q[0] is the left character of every bitstring label\n");
    out.push_str("qreg q[2];\ncreg c[2];\n");
    for g in lower_to_native(&circuit.gates) {
        out.push_str(&gate_line(&g));
        out.push('\n');
    }
    out.push_str("measure q[0] -> c[0];\nmeasure q[1] -> c[1];\n");
    out
}

pub fn write_qasm(circuit: &Circuit, path: &Path) -> Result<()> {
    std::fs::write(path, to_qasm(circuit))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compile_protocol, gates_unitary, CompileOptions};
    use crate::linalg::unitary_distance;
    use crate::pulse::{discretize, Discretization, Handedness, Protocol, Schedule, StirapParams, StirapSchedule};

    // Minimal reader for the subset of OpenQASM 2.0 this module writes.
    fn parse(text: &str) -> Vec<Gate> {
        let qubit = |s: &str| -> usize {
            s.trim().trim_start_matches("q[").trim_end_matches(']').parse().unwrap()
        };
        let mut gates = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            let body = line.strip_suffix(';').unwrap();
            let (head, args) = body.split_once(' ').unwrap();
            if let Some((name, angle)) = head.split_once('(') {
                let theta: f64 = angle.trim_end_matches(')').parse().unwrap();
                let q = qubit(args);
                gates.push(match name {
                    "rx" => Gate::Rx { qubit: q, theta },
                    "ry" => Gate::Ry { qubit: q, theta },
                    "rz" => Gate::Rz { qubit: q, theta },
                    other => panic!("unexpected gate {other}"),
                });
            } else {
                match head {
                    "x" => gates.push(Gate::X { qubit: qubit(args) }),
                    "cx" => {
                        let (c, t) = args.split_once(',').unwrap();
                        gates.push(Gate::Cx { control: qubit(c), target: qubit(t) });
                    }
                    "OPENQASM" | "include" | "qreg" | "creg" | "measure" => {}
                    other => panic!("unexpected statement {other}"),
                }
            }
        }
        gates
    }

    fn compiled(hand: Handedness) -> Circuit {
        let s = Schedule::Stirap(StirapSchedule::new(&StirapParams::default()).unwrap());
        let d = discretize(&s, 20, Discretization::AreaPreserving).unwrap();
        compile_protocol(&d, hand, Protocol::Stirap, &CompileOptions::default())
    }

    #[test]
    fn angle_format_is_twelve_significant_digits() {
        assert_eq!(format_angle(0.0), "0");
        assert_eq!(format_angle(-0.0), "0");
        assert_eq!(format_angle(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_angle(-0.5), "-0.5");
        assert_eq!(format_angle(1.0 / 3.0 * 1e-6), "3.33333333333e-07");
        assert_eq!(format_angle(123456.0), "123456");
        assert_eq!(format_angle(2e12), "2e+12");
    }

    #[test]
    fn empty_circuit_has_only_frame() {
        let text = to_qasm(&Circuit::empty());
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with("//")).collect();
        assert_eq!(
            body,
            [
                "OPENQASM 2.0;",
                "include \"qelib1.inc\";",
                "qreg q[2];",
                "creg c[2];",
                "measure q[0] -> c[0];",
                "measure q[1] -> c[1];"
            ]
        );
    }

    #[test]
    fn round_trip_reproduces_native_gates() {
        let c = compiled(Handedness::L);
        let back = parse(&to_qasm(&c));
        let native = lower_to_native(&c.gates);
        assert_eq!(back.len(), native.len());
        for (a, b) in back.iter().zip(&native) {
            match (a, b) {
                (Gate::Rx { qubit: qa, theta: ta }, Gate::Rx { qubit: qb, theta: tb })
                | (Gate::Ry { qubit: qa, theta: ta }, Gate::Ry { qubit: qb, theta: tb })
                | (Gate::Rz { qubit: qa, theta: ta }, Gate::Rz { qubit: qb, theta: tb }) => {
                    assert_eq!(qa, qb);
                    assert!((ta - tb).abs() <= 1e-11 * tb.abs().max(1e-300));
                }
                _ => assert_eq!(a, b),
            }
        }
        assert!(unitary_distance(&gates_unitary(&back), &gates_unitary(&c.gates)) < 1e-9);
    }

    #[test]
    fn enantiomer_files_differ_only_in_q_angle_signs() {
        let (l, r) = (to_qasm(&compiled(Handedness::L)), to_qasm(&compiled(Handedness::R)));
        let (ll, rl): (Vec<&str>, Vec<&str>) = (l.lines().collect(), r.lines().collect());
        assert_eq!(ll.len(), rl.len());
        let mut differing = 0;
        for (a, b) in ll.iter().zip(&rl) {
            if a == b || a.starts_with("// enantiomer") {
                continue;
            }
            differing += 1;
            assert!(a.starts_with("ry(") && b.starts_with("ry("), "{a} vs {b}");
            let flip = |s: &str| {
                if let Some(rest) = s.strip_prefix("ry(-") {
                    format!("ry({rest}")
                } else {
                    s.replacen("ry(", "ry(-", 1)
                }
            };
            assert_eq!(flip(a), *b);
        }
        assert!(differing > 0);
    }

    #[test]
    fn export_is_deterministic() {
        assert_eq!(to_qasm(&compiled(Handedness::R)), to_qasm(&compiled(Handedness::R)));
    }
}
