// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Embedded 4x4 Hamiltonians, adiabatic and dressed frames, and the analytic
//! final-state prediction for the R enantiomer.
//!
//! Three-level map: |1> = |00>, |2> = |11>, |3> = |10>. |01> is the leakage
//! level and is never coupled. All couplings carry the factor 1/2.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    max_hermitian_defect, Matrix4c, Statevector, C64, IDX_00, IDX_01, IDX_10, IDX_11, ONE, ZERO,
};
use crate::pulse::{
    stap_corrected_pulses, total_rabi, Handedness, PulseProgram, Schedule, StapAnglePath,
};
use crate::quad;

pub type Matrix3c = Matrix3<C64>;

/// Logical level to basis index, in the order (|1>, |2>, |3>).
pub const LOGICAL_INDICES: [usize; 3] = [IDX_00, IDX_11, IDX_10];
pub const LEAKAGE_INDEX: usize = IDX_01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: Matrix4c,
    pub time: f64,
}

impl HamiltonianMatrix {
    pub fn zero() -> Self {
        HamiltonianMatrix {
            entries: Matrix4c::zeros(),
            time: 0.0,
        }
    }

    pub fn at(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn hermitian_defect(&self) -> f64 {
        max_hermitian_defect(&self.entries)
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > tol || !defect.is_finite() {
            return Err(Error::NonHermitian {
                t: self.time,
                defect,
            });
        }
        Ok(())
    }

    pub fn apply(&self, psi: &Statevector) -> Statevector {
        psi.apply(&self.entries)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.entries + self.entries.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// Restriction to the logical levels in the order (|1>, |2>, |3>).
    pub fn logical_block(&self) -> Matrix3c {
        Matrix3c::from_fn(|r, c| self.entries[(LOGICAL_INDICES[r], LOGICAL_INDICES[c])])
    }
}

fn couple(m: &mut Matrix4c, a: usize, b: usize, v: C64) {
    m[(a, b)] += v;
    m[(b, a)] += v.conj();
}

/// Q drive on |00> <-> |10> with phase φ_Q = ±π/2.
pub fn build_h_q(omega_q: f64, handedness: Handedness) -> HamiltonianMatrix {
    let mut m = Matrix4c::zeros();
    if omega_q != 0.0 {
        couple(&mut m, IDX_00, IDX_10, C64::from_polar(0.5 * omega_q, handedness.phi_q()));
    }
    // cos(±π/2) is 6e-17, not 0; pin the real part so L and R are exact mirrors
    m[(IDX_00, IDX_10)].re = 0.0;
    m[(IDX_10, IDX_00)].re = 0.0;
    HamiltonianMatrix {
        entries: m,
        time: 0.0,
    }
}

/// Pump on |00> <-> |11> and Stokes on |11> <-> |10>.
pub fn build_h_ps(omega_p: f64, omega_s: f64, phi_p: f64, phi_s: f64) -> HamiltonianMatrix {
    let mut m = Matrix4c::zeros();
    if omega_p != 0.0 {
        couple(&mut m, IDX_00, IDX_11, C64::from_polar(0.5 * omega_p, phi_p));
    }
    if omega_s != 0.0 {
        couple(&mut m, IDX_11, IDX_10, C64::from_polar(0.5 * omega_s, phi_s));
    }
    HamiltonianMatrix {
        entries: m,
        time: 0.0,
    }
}

/// Same coupling pattern as [`build_h_ps`], fed with the corrected totals.
pub fn build_h_stap(effective: (f64, f64), phi_p: f64, phi_s: f64) -> HamiltonianMatrix {
    build_h_ps(effective.0, effective.1, phi_p, phi_s)
}

fn embed(v: [C64; 3]) -> Statevector {
    let mut a = [ZERO; 4];
    for (k, &idx) in LOGICAL_INDICES.iter().enumerate() {
        a[idx] = v[k];
    }
    Statevector::from_amplitudes(a)
}

/// cos α₁ |00> − sin α₁ |10>
pub fn dark_state(alpha1: f64) -> Statevector {
    dark_state_with_phases(alpha1, 0.0, 0.0)
}

pub fn dark_state_with_phases(alpha1: f64, phi_p: f64, phi_s: f64) -> Statevector {
    let (s, c) = alpha1.sin_cos();
    embed([C64::from(c), ZERO, -C64::from_polar(s, -(phi_p + phi_s))])
}

/// Normalized (γ₊, γ₋) with eigenvalues ±Ω/2.
pub fn bright_states(alpha1: f64, phi_p: f64, phi_s: f64) -> (Statevector, Statevector) {
    let (s, c) = alpha1.sin_cos();
    let r = FRAC_1_SQRT_2;
    let a00 = C64::from_polar(r * s, phi_p);
    let a10 = C64::from_polar(r * c, -phi_s);
    (
        embed([a00, C64::from(r), a10]),
        embed([a00, C64::from(-r), a10]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticEigenframe {
    pub dark: Statevector,
    pub bright_plus: Statevector,
    pub bright_minus: Statevector,
    /// (0, +Ω/2, −Ω/2)
    pub eigenvalues: [f64; 3],
}

impl AdiabaticEigenframe {
    pub fn new(omega_p: f64, omega_s: f64, phi_p: f64, phi_s: f64) -> Result<Self> {
        let alpha1 = crate::pulse::mixing_angle(omega_p, omega_s)?;
        let omega = total_rabi(omega_p, omega_s);
        let (bright_plus, bright_minus) = bright_states(alpha1, phi_p, phi_s);
        Ok(AdiabaticEigenframe {
            dark: dark_state_with_phases(alpha1, phi_p, phi_s),
            bright_plus,
            bright_minus,
            eigenvalues: [0.0, 0.5 * omega, -0.5 * omega],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    pub phi0: Statevector,
    pub phi_plus: Statevector,
    pub phi_minus: Statevector,
}

impl DressedFrame {
    pub fn states(&self) -> [Statevector; 3] {
        [self.phi0, self.phi_plus, self.phi_minus]
    }
}

/// Dressed basis steered by (α₁, α₂). φ₀ carries e^{iφ} sin α₂ on |11>;
/// at α₂ = 0 it is the dark state and φ± are the bright states.
pub fn dressed_states(alpha1: f64, alpha2: f64, phi: f64) -> DressedFrame {
    let (s1, c1) = alpha1.sin_cos();
    let (s2, c2) = alpha2.sin_cos();
    let e = C64::from_polar(1.0, phi);
    let phi0 = [C64::from(c2 * c1), e * s2, C64::from(-c2 * s1)];
    let u = [C64::from(s1), ZERO, C64::from(c1)];
    let v = [-e.conj() * (s2 * c1), C64::from(c2), e.conj() * (s2 * s1)];
    let r = C64::from(FRAC_1_SQRT_2);
    let plus = [0, 1, 2].map(|k| (u[k] + v[k]) * r);
    let minus = [0, 1, 2].map(|k| (u[k] - v[k]) * r);
    let frame = DressedFrame {
        phi0: embed(phi0),
        phi_plus: embed(plus),
        phi_minus: embed(minus),
    };
    let st = frame.states();
    for a in 0..3 {
        for b in 0..3 {
            let want = if a == b { ONE } else { ZERO };
            assert!(
                (st[a].inner(&st[b]) - want).norm() < 1e-10,
                "dressed basis lost orthonormality at α₁={alpha1}, α₂={alpha2}"
            );
        }
    }
    frame
}

/// Values and rates of the two STAP control angles at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleState {
    pub alpha1: f64,
    pub alpha1_dot: f64,
    pub alpha2: f64,
    pub alpha2_dot: f64,
}

impl AngleState {
    pub fn on_path(path: &StapAnglePath, t: f64) -> Self {
        let (alpha1, alpha1_dot) = path.alpha1(t);
        let (alpha2, alpha2_dot) = path.alpha2(t);
        AngleState {
            alpha1,
            alpha1_dot,
            alpha2,
            alpha2_dot,
        }
    }
}

/// Residual couplings λ± out of φ₀ for real drives (P, S) along the given
/// angles. Both vanish when (P, S) are the corrected pulses.
pub fn lambda_pm(a: &AngleState, omega_p: f64, omega_s: f64) -> (C64, C64) {
    let (s1, c1) = a.alpha1.sin_cos();
    let (s2, c2) = a.alpha2.sin_cos();
    let along = c2 * a.alpha1_dot + 0.5 * s2 * (omega_p * s1 + omega_s * c1);
    let across = 0.5 * (omega_p * c1 - omega_s * s1) + a.alpha2_dot;
    (C64::new(across, along), C64::new(-across, along))
}

/// λ± on a STAP path with its own corrected pulses.
pub fn lambda_pm_on_path(path: &StapAnglePath, t: f64) -> Result<(C64, C64)> {
    let (p, s) = stap_corrected_pulses(path, t)?;
    Ok(lambda_pm(&AngleState::on_path(path, t), p, s))
}

/// Splitting Υ between φ₊ and φ₋ for real drives; equals Ω when α₂ = 0.
pub fn upsilon(a: &AngleState, omega_p: f64, omega_s: f64) -> f64 {
    let (s1, c1) = a.alpha1.sin_cos();
    let (s2, c2) = a.alpha2.sin_cos();
    c2 * (omega_p * s1 + omega_s * c1) - 2.0 * a.alpha1_dot * s2
}

/// Final R-enantiomer state cos ρ |00> − i sin ρ |11>, ρ = ½∫Υ dt over the
/// P/S stage (Υ = Ω for STIRAP).
pub fn predict_r_final(schedule: &Schedule) -> Result<Statevector> {
    let (t_i, t_f) = (schedule.q_end(), schedule.duration());
    let mut err = None;
    let integral = match schedule {
        Schedule::Stirap(_) => quad::integrate(
            |t| match schedule.eval_ps(t) {
                Ok((p, s)) => total_rabi(p, s),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            t_i,
            t_f,
            1e-12,
        ),
        Schedule::Stap(st) => quad::integrate(
            |t| match stap_corrected_pulses(&st.path, t) {
                Ok((p, s)) => upsilon(&AngleState::on_path(&st.path, t), p, s),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            t_i,
            t_f,
            1e-12,
        ),
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(r_final_from_area(integral))
}

/// cos ρ |00> − i sin ρ |11> with ρ = area / 2.
pub fn r_final_from_area(area: f64) -> Statevector {
    let rho = 0.5 * area;
    let mut a = [ZERO; 4];
    a[IDX_00] = C64::from(rho.cos());
    a[IDX_11] = C64::new(0.0, -rho.sin());
    Statevector::from_amplitudes(a)
}

/// Generator of one schedule for one enantiomer: Q coupling inside the Q
/// stage and Raman couplings after it.
pub fn schedule_hamiltonian(
    schedule: &Schedule,
    handedness: Handedness,
    t: f64,
    in_q_stage: bool,
) -> Result<HamiltonianMatrix> {
    let h = if in_q_stage {
        build_h_q(schedule.eval_q(t.min(schedule.q_end()))?, handedness)
    } else {
        let (p, s) = schedule.eval_ps(t.max(schedule.q_end()))?;
        let (phi_p, phi_s) = schedule.phases();
        build_h_stap((p, s), phi_p, phi_s)
    };
    Ok(h.at(t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCouplings {
    /// Separation between the bright and dark diagonal entries (Ω/2).
    pub gap: f64,
    /// Element <γ₊|H_I|γ₀>.
    pub coupling_plus: C64,
    /// Element <γ₋|H_I|γ₀>.
    pub coupling_minus: C64,
    /// H_I in the order (γ₀, γ₊, γ₋).
    pub frame_hamiltonian: Matrix3c,
}

/// Numerically sorted eigenbasis of the logical Raman block: columns
/// (γ₀, γ₊, γ₋) and their eigenvalues.
fn raman_eigenbasis(schedule: &Schedule, t: f64) -> Result<(Matrix3c, [f64; 3])> {
    let block = schedule_hamiltonian(schedule, Handedness::L, t, false)?.logical_block();
    let eig = ((block + block.adjoint()) * C64::from(0.5)).symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // ascending: (−Ω/2, 0, +Ω/2) -> (γ₀, γ₊, γ₋)
    let pick = [order[1], order[2], order[0]];
    let vecs = Matrix3c::from_columns(&pick.map(|k| eig.eigenvectors.column(k).into_owned()));
    Ok((vecs, pick.map(|k| eig.eigenvalues[k])))
}

/// Re-order and re-phase the columns of `next` to follow `prev`.
fn track(prev: &Matrix3c, next: &Matrix3c, t: f64) -> Result<Matrix3c> {
    let mut out = Matrix3c::zeros();
    for c in 0..3 {
        let p: Vector3<C64> = prev.column(c).into_owned();
        let (mut best, mut best_ov) = (0, ZERO);
        for k in 0..3 {
            let ov = p.dotc(&next.column(k));
            if ov.norm() > best_ov.norm() {
                best = k;
                best_ov = ov;
            }
        }
        if best_ov.norm() < 0.9 {
            return Err(Error::FrameTracking {
                t,
                overlap: best_ov.norm(),
            });
        }
        let phase = best_ov.conj() / best_ov.norm();
        out.set_column(c, &(next.column(best) * phase));
    }
    Ok(out)
}

/// H_I = U₀ H U₀† − i U₀ dU₀†/dt in the instantaneous adiabatic frame, with
/// the frame derivative from a central difference of step 1e-5·duration.
pub fn adiabatic_frame_couplings(schedule: &Schedule, t: f64) -> Result<FrameCouplings> {
    let (p, s) = schedule.eval_ps(t)?;
    if total_rabi(p, s) == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    let h = 1e-5 * schedule.duration();
    let lo = (t - h).max(schedule.q_end());
    let hi = (t + h).min(schedule.duration());
    let (v, vals) = raman_eigenbasis(schedule, t)?;
    let v_lo = track(&v, &raman_eigenbasis(schedule, lo)?.0, lo)?;
    let v_hi = track(&v, &raman_eigenbasis(schedule, hi)?.0, hi)?;
    let dv = (v_hi - v_lo) / C64::from(hi - lo);
    let mut hi_frame = v.adjoint() * dv * C64::new(0.0, -1.0);
    for k in 0..3 {
        hi_frame[(k, k)] += C64::from(vals[k]);
    }
    Ok(FrameCouplings {
        gap: vals[1] - vals[0],
        coupling_plus: hi_frame[(1, 0)],
        coupling_minus: hi_frame[(2, 0)],
        frame_hamiltonian: hi_frame,
    })
}
