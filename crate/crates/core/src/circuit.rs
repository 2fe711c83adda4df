// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-level circuits for the Trotterized protocols.
//!
//! Compiled circuits keep controlled rotations and the XX/YY rotations as
//! macro gates and run them exactly; [`lower_to_native`] expands them into
//! {rx, ry, rz, x, cx} for export.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix4c, Statevector, BASIS_LABELS, C64, ONE, ZERO};
use crate::propagator::PopulationTrace;
use crate::pulse::{DiscretizedSchedule, Handedness, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Ry { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    X { qubit: usize },
    Cx { control: usize, target: usize },
    /// exp(−iθ/2 (cos β X + sin β Y)) on `target` when `control` reads
    /// `control_value`.
    CRot {
        control: usize,
        target: usize,
        control_value: bool,
        axis: f64,
        theta: f64,
    },
    /// exp(−iθ/2 X⊗X)
    Rxx { theta: f64 },
    /// exp(−iθ/2 Y⊗Y)
    Ryy { theta: f64 },
}

type M2 = [[C64; 2]; 2];

fn rot(theta: f64, nx: f64, ny: f64, nz: f64) -> M2 {
    let (s, c) = (0.5 * theta).sin_cos();
    let mi = C64::new(0.0, -s);
    [
        [C64::from(c) + mi * nz, mi * C64::new(nx, -ny)],
        [mi * C64::new(nx, ny), C64::from(c) - mi * nz],
    ]
}

fn on_qubit(u: &M2, qubit: usize) -> Matrix4c {
    // index = 2*q0 + q1
    Matrix4c::from_fn(|r, c| {
        let (r0, r1, c0, c1) = (r >> 1, r & 1, c >> 1, c & 1);
        if qubit == 0 {
            if r1 == c1 {
                u[r0][c0]
            } else {
                ZERO
            }
        } else if r0 == c0 {
            u[r1][c1]
        } else {
            ZERO
        }
    })
}

fn bit(index: usize, qubit: usize) -> usize {
    if qubit == 0 {
        index >> 1
    } else {
        index & 1
    }
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } | Gate::X { qubit } => {
                vec![qubit]
            }
            Gate::Cx { control, target } | Gate::CRot { control, target, .. } => vec![control, target],
            Gate::Rxx { .. } | Gate::Ryy { .. } => vec![0, 1],
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(
            self,
            Gate::Rx { .. } | Gate::Ry { .. } | Gate::Rz { .. } | Gate::X { .. } | Gate::Cx { .. }
        )
    }

    pub fn matrix(&self) -> Matrix4c {
        match *self {
            Gate::Rx { qubit, theta } => on_qubit(&rot(theta, 1.0, 0.0, 0.0), qubit),
            Gate::Ry { qubit, theta } => on_qubit(&rot(theta, 0.0, 1.0, 0.0), qubit),
            Gate::Rz { qubit, theta } => on_qubit(&rot(theta, 0.0, 0.0, 1.0), qubit),
            Gate::X { qubit } => on_qubit(&[[ZERO, ONE], [ONE, ZERO]], qubit),
            Gate::Cx { control, target } => Matrix4c::from_fn(|r, c| {
                let flipped = if bit(c, control) == 1 { c ^ (if target == 0 { 2 } else { 1 }) } else { c };
                if r == flipped {
                    ONE
                } else {
                    ZERO
                }
            }),
            Gate::CRot {
                control,
                target,
                control_value,
                axis,
                theta,
            } => {
                let u = rot(theta, axis.cos(), axis.sin(), 0.0);
                let want = usize::from(control_value);
                Matrix4c::from_fn(|r, c| {
                    if bit(r, control) != bit(c, control) {
                        return ZERO;
                    }
                    if bit(c, control) != want {
                        return if r == c { ONE } else { ZERO };
                    }
                    u[bit(r, target)][bit(c, target)]
                })
            }
            Gate::Rxx { theta } => two_qubit_rotation(theta, false),
            Gate::Ryy { theta } => two_qubit_rotation(theta, true),
        }
    }
}

fn two_qubit_rotation(theta: f64, yy: bool) -> Matrix4c {
    // X⊗X swaps 00<->11 and 01<->10; Y⊗Y does the same with a −1 on 00<->11
    let (s, c) = (0.5 * theta).sin_cos();
    let mut m = Matrix4c::identity() * C64::from(c);
    let mi = C64::new(0.0, -s);
    let outer = if yy { -mi } else { mi };
    m[(0, 3)] = outer;
    m[(3, 0)] = outer;
    m[(1, 2)] = mi;
    m[(2, 1)] = mi;
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SplitOrder {
    /// Pump sub-step, then Stokes.
    #[default]
    Ps,
    Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SGateMode {
    /// Rotation on q1 conditioned on q0 = 1, i.e. the |11> <-> |10> coupling.
    #[default]
    Faithful,
    /// XX + YY construction, which couples |01> <-> |10> instead.
    Erratum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct CompileOptions {
    pub split_order: SplitOrder,
    pub s_gate: SGateMode,
    pub phi_p: f64,
    pub phi_s: f64,
}

/// exp(−iΩ_Q δt H_Q/Ω_Q): rotation of q0 about (cos φ_Q, −sin φ_Q) while q1 = 0.
pub fn compile_q_step(theta: f64, handedness: Handedness) -> Vec<Gate> {
    if theta == 0.0 {
        return Vec::new();
    }
    vec![Gate::CRot {
        control: 1,
        target: 0,
        control_value: false,
        axis: -handedness.phi_q(),
        theta,
    }]
}

pub fn compile_p_step(theta: f64) -> Vec<Gate> {
    compile_p_step_with_phase(theta, 0.0)
}

/// CX maps |11> onto |10>, the pair is rotated as a Q-like step, CX undoes it.
pub fn compile_p_step_with_phase(theta: f64, phi_p: f64) -> Vec<Gate> {
    if theta == 0.0 {
        return Vec::new();
    }
    vec![
        Gate::Cx { control: 0, target: 1 },
        Gate::CRot {
            control: 1,
            target: 0,
            control_value: false,
            axis: -phi_p,
            theta,
        },
        Gate::Cx { control: 0, target: 1 },
    ]
}

pub fn compile_s_step(theta: f64, mode: SGateMode) -> Vec<Gate> {
    compile_s_step_with_phase(theta, 0.0, mode)
}

pub fn compile_s_step_with_phase(theta: f64, phi_s: f64, mode: SGateMode) -> Vec<Gate> {
    if theta == 0.0 {
        return Vec::new();
    }
    match mode {
        SGateMode::Faithful => vec![Gate::CRot {
            control: 0,
            target: 1,
            control_value: true,
            axis: phi_s,
            theta,
        }],
        SGateMode::Erratum => vec![Gate::Rxx { theta: 0.5 * theta }, Gate::Ryy { theta: 0.5 * theta }],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitMetadata {
    pub protocol: Option<Protocol>,
    pub handedness: Option<Handedness>,
    pub n_steps: usize,
    pub delta_t: f64,
    pub k: usize,
    pub split_order: SplitOrder,
    pub s_gate: SGateMode,
    pub macro_gate_count: usize,
    pub native_gate_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    /// `gates[..step_ends[i]]` is the circuit after Trotter step i.
    pub step_ends: Vec<usize>,
    pub step_times: Vec<f64>,
    pub metadata: CircuitMetadata,
}

impl Circuit {
    pub fn empty() -> Self {
        Circuit {
            gates: Vec::new(),
            step_ends: Vec::new(),
            step_times: Vec::new(),
            metadata: CircuitMetadata {
                protocol: None,
                handedness: None,
                n_steps: 0,
                delta_t: 0.0,
                k: 0,
                split_order: SplitOrder::Ps,
                s_gate: SGateMode::Faithful,
                macro_gate_count: 0,
                native_gate_count: 0,
            },
        }
    }

    /// Raw gate list as a single step of unit length.
    pub fn from_gates(gates: Vec<Gate>) -> Self {
        let mut c = Circuit::empty();
        c.metadata.n_steps = 1;
        c.metadata.delta_t = 1.0;
        c.metadata.macro_gate_count = gates.len();
        c.metadata.native_gate_count = lower_to_native(&gates).len();
        c.step_ends.push(gates.len());
        c.step_times.push(1.0);
        c.gates = gates;
        c
    }

    /// Gates of Trotter step `i`.
    pub fn step(&self, i: usize) -> &[Gate] {
        let start = if i == 0 { 0 } else { self.step_ends[i - 1] };
        &self.gates[start..self.step_ends[i]]
    }
}

/// First-order Trotter circuit: per slice a Q step, then the P and S
/// sub-steps in the configured order.
pub fn compile_protocol(
    discretized: &DiscretizedSchedule,
    handedness: Handedness,
    protocol: Protocol,
    options: &CompileOptions,
) -> Circuit {
    let dt = discretized.delta_t;
    let mut gates = Vec::new();
    let mut step_ends = Vec::with_capacity(discretized.m);
    let mut step_times = Vec::with_capacity(discretized.m);
    for (i, amp) in discretized.samples.iter().enumerate() {
        gates.extend(compile_q_step(amp.q * dt, handedness));
        let p = compile_p_step_with_phase(amp.p * dt, options.phi_p);
        let s = compile_s_step_with_phase(amp.s * dt, options.phi_s, options.s_gate);
        match options.split_order {
            SplitOrder::Ps => {
                gates.extend(p);
                gates.extend(s);
            }
            SplitOrder::Sp => {
                gates.extend(s);
                gates.extend(p);
            }
        }
        step_ends.push(gates.len());
        step_times.push(discretized.slice_bounds(i).1);
    }
    let native_gate_count = lower_to_native(&gates).len();
    Circuit {
        metadata: CircuitMetadata {
            protocol: Some(protocol),
            handedness: Some(handedness),
            n_steps: discretized.m,
            delta_t: dt,
            k: discretized.k,
            split_order: options.split_order,
            s_gate: options.s_gate,
            macro_gate_count: gates.len(),
            native_gate_count,
        },
        gates,
        step_ends,
        step_times,
    }
}

/// Exact statevector run, recording populations at t = 0 and after every step.
pub fn run_statevector(circuit: &Circuit, psi0: &Statevector) -> (PopulationTrace, Statevector) {
    let mut trace = PopulationTrace::new(circuit.metadata.handedness);
    let mut psi = *psi0;
    trace.push(0.0, &psi);
    let mut next = 0;
    for (end, t) in circuit.step_ends.iter().zip(&circuit.step_times) {
        for g in &circuit.gates[next..*end] {
            psi = psi.apply(&g.matrix());
        }
        next = *end;
        trace.push(*t, &psi);
    }
    for g in &circuit.gates[next..] {
        psi = psi.apply(&g.matrix());
    }
    (trace, psi)
}

pub fn gates_unitary(gates: &[Gate]) -> Matrix4c {
    gates.iter().fold(Matrix4c::identity(), |acc, g| g.matrix() * acc)
}

pub fn circuit_unitary(circuit: &Circuit) -> Matrix4c {
    gates_unitary(&circuit.gates)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurementRecord {
    pub shots: u64,
    /// Bitstring (q0 first) to count; only outcomes that occurred.
    pub counts: BTreeMap<String, u64>,
    pub seed: u64,
}

/// Multinomial draw of `shots` outcomes from the Born probabilities.
pub fn sample_measurements(state: &Statevector, shots: u64, seed: u64) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::config("shots", "must be >= 1"));
    }
    let probs = state.populations();
    let dist = WeightedIndex::new(probs).map_err(|e| Error::config("state", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = [0u64; 4];
    for _ in 0..shots {
        tally[dist.sample(&mut rng)] += 1;
    }
    let counts = tally
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(i, &n)| (BASIS_LABELS[i].to_string(), n))
        .collect();
    Ok(MeasurementRecord { shots, counts, seed })
}

/// Map β to (−π/2, π/2], using R_{β+π}(θ) = R_β(−θ).
fn canonical_axis(axis: f64, theta: f64) -> (f64, f64) {
    let mut b = axis.rem_euclid(2.0 * PI);
    if b > PI {
        b -= 2.0 * PI;
    }
    let mut th = theta;
    if b > FRAC_PI_2 {
        b -= PI;
        th = -th;
    } else if b <= -FRAC_PI_2 {
        b += PI;
        th = -th;
    }
    (b, th)
}

/// Expand macro gates into {rx, ry, rz, x, cx}. Zero-angle rotations from the
/// axis alignment are dropped.
pub fn lower_to_native(gates: &[Gate]) -> Vec<Gate> {
    let mut out = Vec::with_capacity(gates.len() * 6);
    for g in gates {
        match *g {
            Gate::CRot {
                control,
                target,
                control_value,
                axis,
                theta,
            } => {
                let (beta, th) = canonical_axis(axis, theta);
                let gamma = beta - FRAC_PI_2;
                let gamma = if gamma.abs() < 1e-15 { 0.0 } else { gamma };
                if !control_value {
                    out.push(Gate::X { qubit: control });
                }
                if gamma != 0.0 {
                    out.push(Gate::Rz { qubit: target, theta: -gamma });
                }
                out.push(Gate::Cx { control, target });
                out.push(Gate::Ry { qubit: target, theta: -0.5 * th });
                out.push(Gate::Cx { control, target });
                out.push(Gate::Ry { qubit: target, theta: 0.5 * th });
                if gamma != 0.0 {
                    out.push(Gate::Rz { qubit: target, theta: gamma });
                }
                if !control_value {
                    out.push(Gate::X { qubit: control });
                }
            }
            Gate::Rxx { theta } => {
                out.extend([0, 1].map(|q| Gate::Ry { qubit: q, theta: -FRAC_PI_2 }));
                out.push(Gate::Cx { control: 0, target: 1 });
                out.push(Gate::Rz { qubit: 1, theta });
                out.push(Gate::Cx { control: 0, target: 1 });
                out.extend([0, 1].map(|q| Gate::Ry { qubit: q, theta: FRAC_PI_2 }));
            }
            Gate::Ryy { theta } => {
                out.extend([0, 1].map(|q| Gate::Rx { qubit: q, theta: FRAC_PI_2 }));
                out.push(Gate::Cx { control: 0, target: 1 });
                out.push(Gate::Rz { qubit: 1, theta });
                out.push(Gate::Cx { control: 0, target: 1 });
                out.extend([0, 1].map(|q| Gate::Rx { qubit: q, theta: -FRAC_PI_2 }));
            }
            native => out.push(native),
        }
    }
    out
}
