// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference time evolution on the four-dimensional space.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{schedule_hamiltonian, HamiltonianMatrix};
use crate::linalg::{expm_hermitian, Statevector, C64};
use crate::pulse::{Handedness, PulseProgram, Schedule};

pub use crate::linalg::populations;

const HERMITIAN_TOL: f64 = 1e-12;
const RK4_DRIFT_LIMIT: f64 = 1e-4;

/// Hamiltonian source for one integration step `[a, b]`.
pub trait Generator {
    fn hamiltonian(&self, t: f64, step: (f64, f64)) -> Result<HamiltonianMatrix>;
}

impl<F: Fn(f64) -> HamiltonianMatrix> Generator for F {
    fn hamiltonian(&self, t: f64, _step: (f64, f64)) -> Result<HamiltonianMatrix> {
        Ok(self(t).at(t))
    }
}

/// A schedule driving one enantiomer. The stage (Q or P/S) is fixed per step
/// by the step midpoint, so steps must not straddle the end of the Q stage.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolDrive<'a> {
    pub schedule: &'a Schedule,
    pub handedness: Handedness,
}

impl Generator for ProtocolDrive<'_> {
    fn hamiltonian(&self, t: f64, step: (f64, f64)) -> Result<HamiltonianMatrix> {
        let in_q = 0.5 * (step.0 + step.1) < self.schedule.q_end();
        schedule_hamiltonian(self.schedule, self.handedness, t, in_q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    /// (P00, P01, P10, P11) per time.
    pub populations: Vec<[f64; 4]>,
    pub handedness: Option<Handedness>,
}

pub const TRACE_CSV_HEADER: &str = "t_us,p00,p01,p10,p11,handedness";

impl PopulationTrace {
    pub fn new(handedness: Option<Handedness>) -> Self {
        PopulationTrace {
            times: Vec::new(),
            populations: Vec::new(),
            handedness,
        }
    }

    pub fn push(&mut self, t: f64, psi: &Statevector) {
        self.times.push(t);
        self.populations.push(psi.populations());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<[f64; 4]> {
        self.populations.last().copied()
    }

    /// Populations at the recorded time closest to `t`.
    pub fn at(&self, t: f64) -> Option<(f64, [f64; 4])> {
        if self.times.is_empty() {
            return None;
        }
        let j = self.times.partition_point(|&x| x < t);
        let i = match j {
            0 => 0,
            j if j == self.times.len() => j - 1,
            j if t - self.times[j - 1] <= self.times[j] - t => j - 1,
            j => j,
        };
        Some((self.times[i], self.populations[i]))
    }

    /// Linear interpolation of the populations at `t`.
    pub fn interpolate(&self, t: f64) -> Option<[f64; 4]> {
        let n = self.times.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] {
            return None;
        }
        let j = self.times.partition_point(|&x| x < t);
        if j == 0 || self.times[j] == t {
            return Some(self.populations[j]);
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (self.populations[j - 1], self.populations[j]);
        Some([0, 1, 2, 3].map(|k| a[k] + w * (b[k] - a[k])))
    }

    pub fn to_csv(&self) -> String {
        let tag = self.handedness.map_or("", |h| h.as_str());
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for (t, p) in self.times.iter().zip(&self.populations) {
            let _ = writeln!(
                out,
                "{t:.9},{:.12},{:.12},{:.12},{:.12},{tag}",
                p[0], p[1], p[2], p[3]
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub trace: PopulationTrace,
    pub final_state: Statevector,
    /// Largest |‖ψ‖ − 1| seen along the run.
    pub max_norm_error: f64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config("grid", "must contain at least one time"));
    }
    if grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::config("grid", "times must be strictly increasing"));
    }
    Ok(())
}

/// How a step's Hamiltonian is frozen before exponentiating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    /// H at the step midpoint; second order.
    Midpoint,
    /// Two-point Gauss Magnus generator (H₁+H₂)/2 + i(√3/12)δt[H₁,H₂];
    /// fourth order, still one exact exponential per step.
    #[default]
    Magnus4,
}

/// Exact exponential of the midpoint Hamiltonian on every grid step.
pub fn evolve_piecewise_exact<G: Generator + ?Sized>(
    generator: &G,
    grid: &[f64],
    psi0: &Statevector,
    handedness: Option<Handedness>,
) -> Result<Evolution> {
    evolve_piecewise_exact_with(generator, grid, psi0, handedness, Stepper::Midpoint)
}

pub fn evolve_piecewise_exact_with<G: Generator + ?Sized>(
    generator: &G,
    grid: &[f64],
    psi0: &Statevector,
    handedness: Option<Handedness>,
    stepper: Stepper,
) -> Result<Evolution> {
    check_grid(grid)?;
    let mut trace = PopulationTrace::new(handedness);
    let mut psi = *psi0;
    let mut max_norm_error = (psi.norm() - 1.0).abs();
    trace.push(grid[0], &psi);
    let offset = 3f64.sqrt() / 6.0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dt = b - a;
        let mid = 0.5 * (a + b);
        let frozen = match stepper {
            Stepper::Midpoint => {
                let h = generator.hamiltonian(mid, (a, b))?.at(mid);
                h.check_hermitian(HERMITIAN_TOL)?;
                h.entries
            }
            Stepper::Magnus4 => {
                let t1 = mid - offset * dt;
                let t2 = mid + offset * dt;
                let h1 = generator.hamiltonian(t1, (a, b))?.at(t1);
                h1.check_hermitian(HERMITIAN_TOL)?;
                let h2 = generator.hamiltonian(t2, (a, b))?.at(t2);
                h2.check_hermitian(HERMITIAN_TOL)?;
                let (h1, h2) = (h1.entries, h2.entries);
                let comm = h1 * h2 - h2 * h1;
                (h1 + h2) * C64::from(0.5) + comm * C64::new(0.0, 3f64.sqrt() / 12.0 * dt)
            }
        };
        psi = psi.apply(&expm_hermitian(&frozen, dt));
        max_norm_error = max_norm_error.max((psi.norm() - 1.0).abs());
        trace.push(b, &psi);
    }
    Ok(Evolution {
        trace,
        final_state: psi,
        max_norm_error,
    })
}

/// Classical fourth-order Runge-Kutta for i dψ/dt = H ψ, without
/// renormalization.
pub fn evolve_rk4<G: Generator + ?Sized>(
    generator: &G,
    grid: &[f64],
    psi0: &Statevector,
    handedness: Option<Handedness>,
) -> Result<Evolution> {
    check_grid(grid)?;
    let minus_i = C64::new(0.0, -1.0);
    let mut trace = PopulationTrace::new(handedness);
    let mut psi = *psi0.as_vector();
    let norm0 = psi.norm();
    let mut max_norm_error = (norm0 - 1.0).abs();
    trace.push(grid[0], psi0);
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dt = b - a;
        let rhs = |t: f64, v: &crate::linalg::Vector4c| -> Result<crate::linalg::Vector4c> {
            let h = generator.hamiltonian(t, (a, b))?.at(t);
            h.check_hermitian(HERMITIAN_TOL)?;
            Ok(h.entries * v * minus_i)
        };
        let half = C64::from(0.5 * dt);
        let full = C64::from(dt);
        let k1 = rhs(a, &psi)?;
        let k2 = rhs(a + 0.5 * dt, &(psi + k1 * half))?;
        let k3 = rhs(a + 0.5 * dt, &(psi + k2 * half))?;
        let k4 = rhs(b, &(psi + k3 * full))?;
        psi += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0);
        let drift = (psi.norm() - norm0).abs();
        if drift > RK4_DRIFT_LIMIT {
            return Err(Error::StepSize { t: b, drift });
        }
        max_norm_error = max_norm_error.max((psi.norm() - 1.0).abs());
        trace.push(b, &Statevector::from_vector(psi));
    }
    Ok(Evolution {
        trace,
        final_state: Statevector::from_vector(psi),
        max_norm_error,
    })
}

/// Grid over `[nodes[0], nodes[last]]` that contains every node and spreads
/// about `total_steps` steps in proportion to segment length.
pub fn time_grid(nodes: &[f64], total_steps: usize) -> Result<Vec<f64>> {
    let mut nodes: Vec<f64> = nodes.to_vec();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if nodes.len() < 2 {
        return Err(Error::config("grid", "need at least two distinct nodes"));
    }
    let span = nodes[nodes.len() - 1] - nodes[0];
    let mut grid = vec![nodes[0]];
    for w in nodes.windows(2) {
        let n = ((total_steps as f64 * (w[1] - w[0]) / span).round() as usize).max(1);
        let h = (w[1] - w[0]) / n as f64;
        for i in 1..n {
            grid.push(w[0] + i as f64 * h);
        }
        grid.push(w[1]);
    }
    Ok(grid)
}

/// Default oracle grid for a schedule: `steps` steps with the Q/PS boundary
/// and any extra `nodes` inside [0, duration] pinned as grid points.
pub fn schedule_grid(schedule: &Schedule, steps: usize, nodes: &[f64]) -> Result<Vec<f64>> {
    let end = schedule.duration();
    let mut all = vec![0.0, schedule.q_end(), end];
    all.extend(nodes.iter().copied().filter(|&t| t > 0.0 && t < end));
    time_grid(&all, steps)
}

/// Oracle run of one enantiomer from |00>.
pub fn evolve_schedule(
    schedule: &Schedule,
    handedness: Handedness,
    steps: usize,
    nodes: &[f64],
) -> Result<Evolution> {
    let grid = schedule_grid(schedule, steps, nodes)?;
    let drive = ProtocolDrive {
        schedule,
        handedness,
    };
    evolve_piecewise_exact_with(
        &drive,
        &grid,
        &Statevector::ground(),
        Some(handedness),
        Stepper::default(),
    )
}
