// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse envelopes, control angles and time slicing.
//!
//! Amplitudes are angular frequencies in rad/µs and times are in µs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Stirap,
    Stap,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Stirap => "stirap",
            Protocol::Stap => "stap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Handedness {
    L,
    R,
}

impl Handedness {
    pub const BOTH: [Handedness; 2] = [Handedness::L, Handedness::R];

    pub fn sign(&self) -> f64 {
        match self {
            Handedness::L => 1.0,
            Handedness::R => -1.0,
        }
    }

    /// Phase of the chirality-signed Q coupling.
    pub fn phi_q(&self) -> f64 {
        self.sign() * FRAC_PI_2
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Handedness::L => "L",
            Handedness::R => "R",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    pub peak_amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl GaussianPulse {
    pub fn new(peak_amplitude: f64, center: f64, width: f64) -> Result<Self> {
        if !(peak_amplitude >= 0.0 && peak_amplitude.is_finite()) {
            return Err(Error::config("peak_amplitude", "must be finite and >= 0"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::config("width", "must be finite and > 0"));
        }
        if !center.is_finite() {
            return Err(Error::config("center", "must be finite"));
        }
        Ok(GaussianPulse {
            peak_amplitude,
            center,
            width,
        })
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.peak_amplitude * (-x * x).exp()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        -2.0 * (t - self.center) / (self.width * self.width) * self.value(t)
    }

    /// Exact integral over [a, b].
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let xa = (a - self.center) / self.width;
        let xb = (b - self.center) / self.width;
        0.5 * SQRT_PI * self.width * self.peak_amplitude * (libm::erf(xb) - libm::erf(xa))
    }

    /// Peak amplitude that gives a unit-peak shape of this center/width the
    /// requested area over [a, b].
    fn scaled_to_area(center: f64, width: f64, area: f64, a: f64, b: f64) -> Result<Self> {
        let unit = GaussianPulse::new(1.0, center, width)?;
        let norm = unit.integral(a, b);
        if norm <= 0.0 {
            return Err(Error::config("q_width", "Q pulse has no area inside its stage"));
        }
        GaussianPulse::new(area / norm, center, width)
    }
}

/// Euclidean norm of the two Raman drives.
pub fn total_rabi(omega_p: f64, omega_s: f64) -> f64 {
    omega_p.hypot(omega_s)
}

/// atan(Ω_P / Ω_S), in [0, π/2] for nonnegative inputs.
pub fn mixing_angle(omega_p: f64, omega_s: f64) -> Result<f64> {
    if omega_p == 0.0 && omega_s == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok(omega_p.atan2(omega_s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StirapParams {
    pub t1: f64,
    pub t_f: f64,
    pub q_width: f64,
    /// Defaults to the middle of the Q stage.
    pub q_center: Option<f64>,
    pub q_area: f64,
    pub ps_amplitude: f64,
    pub ps_width: f64,
    pub tau: f64,
    pub phi_p: f64,
    pub phi_s: f64,
}

impl Default for StirapParams {
    fn default() -> Self {
        StirapParams {
            t1: 2.53,
            t_f: 10.0,
            q_width: 0.6,
            q_center: None,
            q_area: FRAC_PI_2,
            ps_amplitude: 0.4,
            ps_width: 2.4,
            tau: 2.5,
            phi_p: 0.0,
            phi_s: 0.0,
        }
    }
}

impl StirapParams {
    /// Same amplitudes, every time parameter multiplied by `factor`.
    pub fn time_scaled(&self, factor: f64) -> Self {
        StirapParams {
            t1: self.t1 * factor,
            t_f: self.t_f * factor,
            q_width: self.q_width * factor,
            q_center: self.q_center.map(|c| c * factor),
            ps_width: self.ps_width * factor,
            tau: self.tau * factor,
            ..*self
        }
    }
}

/// Q pulse, then a double-Gaussian pump and a single-Gaussian Stokes pulse.
///
/// The Stokes pulse coincides with the earlier pump Gaussian, so the mixing
/// angle starts at π/4 and rises to π/2 as the later pump Gaussian takes over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StirapSchedule {
    pub q: GaussianPulse,
    pub p_first: GaussianPulse,
    pub p_second: GaussianPulse,
    pub s: GaussianPulse,
    pub tau: f64,
    pub t1: f64,
    pub t_f: f64,
    pub phi_p: f64,
    pub phi_s: f64,
}

impl StirapSchedule {
    pub fn new(p: &StirapParams) -> Result<Self> {
        if !(p.t1 >= 0.0 && p.t1 < p.t_f && p.t_f.is_finite()) {
            return Err(Error::config("stirap.t1", "need 0 <= t1 < t_f"));
        }
        if p.tau.is_nan() || p.tau < 0.0 {
            return Err(Error::config("stirap.tau", "must be >= 0"));
        }
        if !(p.q_area >= 0.0 && p.q_area.is_finite()) {
            return Err(Error::config("stirap.q_area", "must be finite and >= 0"));
        }
        let q_center = p.q_center.unwrap_or(0.5 * p.t1);
        let q = GaussianPulse::scaled_to_area(q_center, p.q_width, p.q_area, 0.0, p.t1)
            .map_err(|e| rename(e, "stirap"))?;
        let span = p.t_f - p.t1;
        let p_first = GaussianPulse::new(p.ps_amplitude, p.t1 + 0.5 * (span - p.tau), p.ps_width)
            .map_err(|e| rename(e, "stirap"))?;
        let p_second = GaussianPulse::new(p.ps_amplitude, p.t1 + 0.5 * (span + p.tau), p.ps_width)
            .map_err(|e| rename(e, "stirap"))?;
        Ok(StirapSchedule {
            q,
            p_first,
            p_second,
            s: p_first,
            tau: p.tau,
            t1: p.t1,
            t_f: p.t_f,
            phi_p: p.phi_p,
            phi_s: p.phi_s,
        })
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_f).contains(&t) {
            return Err(Error::Domain {
                t,
                start: 0.0,
                end: self.t_f,
            });
        }
        Ok(())
    }

    /// Q envelope; zero once the P/S stage has begun.
    pub fn eval_q(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(if t <= self.t1 { self.q.value(t) } else { 0.0 })
    }

    pub fn eval_ps(&self, t: f64) -> Result<(f64, f64)> {
        self.check_domain(t)?;
        if t < self.t1 {
            return Ok((0.0, 0.0));
        }
        Ok((self.p_first.value(t) + self.p_second.value(t), self.s.value(t)))
    }

    /// Analytic dα₁/dt inside the P/S stage.
    pub fn mixing_angle_rate(&self, t: f64) -> f64 {
        let p = self.p_first.value(t) + self.p_second.value(t);
        let s = self.s.value(t);
        let dp = self.p_first.derivative(t) + self.p_second.derivative(t);
        let ds = self.s.derivative(t);
        (dp * s - p * ds) / (p * p + s * s)
    }
}

fn rename(e: Error, section: &str) -> Error {
    match e {
        Error::Config { field, message } => Error::Config {
            field: format!("{section}.{field}"),
            message,
        },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha1Profile {
    /// Normalized error-function ramp whose rate is a Gaussian of width
    /// T_α₂/√2, so α̇₁ decays like α₂² and α̇₁·cot α₂ vanishes at the edges.
    ErfRamp,
    /// π/4 + (π/4)·sin²(π(t−t_i)/(2(t_f−t_i))).
    SinSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StapAnglePath {
    pub alpha_m: f64,
    pub t_i: f64,
    pub t_f: f64,
    pub t_alpha2: f64,
    pub alpha1_profile: Alpha1Profile,
}

impl StapAnglePath {
    pub fn new(
        alpha_m: f64,
        t_i: f64,
        t_f: f64,
        t_alpha2: Option<f64>,
        alpha1_profile: Alpha1Profile,
    ) -> Result<Self> {
        if !(t_i < t_f && t_i.is_finite() && t_f.is_finite()) {
            return Err(Error::config("stap.t1", "need t_i < t_f"));
        }
        if !(alpha_m > 0.0 && alpha_m < FRAC_PI_2) {
            return Err(Error::config("stap.alpha_m", "must lie in (0, π/2)"));
        }
        let t_alpha2 = t_alpha2.unwrap_or((t_f - t_i) / 6.0);
        if !(t_alpha2 > 0.0 && t_alpha2.is_finite()) {
            return Err(Error::config("stap.t_alpha2", "must be finite and > 0"));
        }
        Ok(StapAnglePath {
            alpha_m,
            t_i,
            t_f,
            t_alpha2,
            alpha1_profile,
        })
    }

    fn center(&self) -> f64 {
        0.5 * (self.t_i + self.t_f)
    }

    /// (α₁, α̇₁)
    pub fn alpha1(&self, t: f64) -> (f64, f64) {
        let span = self.t_f - self.t_i;
        match self.alpha1_profile {
            Alpha1Profile::ErfRamp => {
                let w = self.t_alpha2 / std::f64::consts::SQRT_2;
                let edge = libm::erf(0.5 * span / w);
                let x = (t - self.center()) / w;
                let a = FRAC_PI_4 + FRAC_PI_4 * (libm::erf(x) + edge) / (2.0 * edge);
                let da = FRAC_PI_4 * (2.0 / SQRT_PI) * (-x * x).exp() / (w * 2.0 * edge);
                (a, da)
            }
            Alpha1Profile::SinSquared => {
                let u = PI * (t - self.t_i) / (2.0 * span);
                let a = FRAC_PI_4 + FRAC_PI_4 * u.sin().powi(2);
                let da = FRAC_PI_4 * (2.0 * u).sin() * PI / (2.0 * span);
                (a, da)
            }
        }
    }

    /// (α₂, α̇₂)
    pub fn alpha2(&self, t: f64) -> (f64, f64) {
        let x = (t - self.center()) / self.t_alpha2;
        let a = self.alpha_m * (-x * x).exp();
        (a, -2.0 * x / self.t_alpha2 * a)
    }
}

pub fn stap_alpha2(path: &StapAnglePath, t: f64) -> f64 {
    path.alpha2(t).0
}

/// Total pump and Stokes amplitudes that cancel every nonadiabatic coupling
/// out of the dressed state φ₀ along `path`. May be negative.
pub fn stap_corrected_pulses(path: &StapAnglePath, t: f64) -> Result<(f64, f64)> {
    let (a1, d1) = path.alpha1(t);
    let (a2, d2) = path.alpha2(t);
    let (s1, c1) = a1.sin_cos();
    let sin2 = a2.sin();
    let cot_term = if d1 == 0.0 {
        0.0
    } else if sin2 == 0.0 {
        return Err(Error::SingularSchedule {
            t,
            reason: "α₂ vanishes while α₁ is still moving".into(),
        });
    } else {
        d1 * a2.cos() / sin2
    };
    let p = -2.0 * (cot_term * s1 + d2 * c1);
    let s = -2.0 * (cot_term * c1 - d2 * s1);
    if !(p.is_finite() && s.is_finite()) {
        return Err(Error::SingularSchedule {
            t,
            reason: "α̇₁·cot α₂ overflows".into(),
        });
    }
    Ok((p, s))
}

/// Counteradiabatic parts (Ω′_P, Ω′_S) added on top of reference pulses.
pub fn stap_corrections(path: &StapAnglePath, base: (f64, f64), t: f64) -> Result<(f64, f64)> {
    let (p, s) = stap_corrected_pulses(path, t)?;
    Ok((p - base.0, s - base.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StapParams {
    pub t1: f64,
    pub t_f: f64,
    pub q_width: f64,
    pub q_center: Option<f64>,
    pub q_area: f64,
    pub alpha_m: f64,
    pub t_alpha2: Option<f64>,
    pub alpha1_profile: Alpha1Profile,
}

impl Default for StapParams {
    fn default() -> Self {
        StapParams {
            t1: 1.25,
            t_f: 2.5,
            q_width: 0.3,
            q_center: None,
            q_area: FRAC_PI_2,
            alpha_m: 0.5,
            t_alpha2: None,
            alpha1_profile: Alpha1Profile::ErfRamp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StapSchedule {
    pub q: GaussianPulse,
    pub path: StapAnglePath,
}

impl StapSchedule {
    pub fn new(p: &StapParams) -> Result<Self> {
        if !(p.t1 > 0.0 && p.t1 < p.t_f) {
            return Err(Error::config("stap.t1", "need 0 < t1 < t_f"));
        }
        if !(p.q_area >= 0.0 && p.q_area.is_finite()) {
            return Err(Error::config("stap.q_area", "must be finite and >= 0"));
        }
        let q_center = p.q_center.unwrap_or(0.5 * p.t1);
        let q = GaussianPulse::scaled_to_area(q_center, p.q_width, p.q_area, 0.0, p.t1)
            .map_err(|e| rename(e, "stap"))?;
        let path = StapAnglePath::new(p.alpha_m, p.t1, p.t_f, p.t_alpha2, p.alpha1_profile)?;
        Ok(StapSchedule { q, path })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Schedule {
    Stirap(StirapSchedule),
    Stap(StapSchedule),
}

/// Anything that can be sliced into Q and P/S drive amplitudes.
pub trait PulseProgram {
    fn duration(&self) -> f64;
    /// End of the Q stage and start of the P/S stage.
    fn q_end(&self) -> f64;
    fn q_at(&self, t: f64) -> Result<f64>;
    fn ps_at(&self, t: f64) -> Result<(f64, f64)>;

    fn q_area(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = (a.max(0.0), b.min(self.q_end()));
        if b <= a {
            return Ok(0.0);
        }
        let mut err = None;
        let v = quad::integrate(
            |t| self.q_at(t).unwrap_or_else(|e| {
                err.get_or_insert(e);
                0.0
            }),
            a,
            b,
            QUAD_TOL,
        );
        err.map_or(Ok(v), Err)
    }

    fn ps_area(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let (a, b) = (a.max(self.q_end()), b.min(self.duration()));
        if b <= a {
            return Ok((0.0, 0.0));
        }
        let mut out = [0.0; 2];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut err = None;
            *slot = quad::integrate(
                |t| match self.ps_at(t) {
                    Ok(v) => [v.0, v.1][k],
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                a,
                b,
                QUAD_TOL,
            );
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok((out[0], out[1]))
    }
}

impl Schedule {
    pub fn protocol(&self) -> Protocol {
        match self {
            Schedule::Stirap(_) => Protocol::Stirap,
            Schedule::Stap(_) => Protocol::Stap,
        }
    }

    pub fn q_pulse(&self) -> &GaussianPulse {
        match self {
            Schedule::Stirap(s) => &s.q,
            Schedule::Stap(s) => &s.q,
        }
    }

    pub fn phases(&self) -> (f64, f64) {
        match self {
            Schedule::Stirap(s) => (s.phi_p, s.phi_s),
            Schedule::Stap(_) => (0.0, 0.0),
        }
    }

    pub fn eval_q(&self, t: f64) -> Result<f64> {
        match self {
            Schedule::Stirap(s) => s.eval_q(t),
            Schedule::Stap(s) => {
                let end = s.path.t_f;
                if !(0.0..=end).contains(&t) {
                    return Err(Error::Domain { t, start: 0.0, end });
                }
                Ok(if t <= s.path.t_i { s.q.value(t) } else { 0.0 })
            }
        }
    }

    /// Pump and Stokes amplitudes; for STAP these are the corrected totals.
    pub fn eval_ps(&self, t: f64) -> Result<(f64, f64)> {
        match self {
            Schedule::Stirap(s) => s.eval_ps(t),
            Schedule::Stap(s) => {
                let end = s.path.t_f;
                if !(0.0..=end).contains(&t) {
                    return Err(Error::Domain { t, start: 0.0, end });
                }
                if t < s.path.t_i {
                    return Ok((0.0, 0.0));
                }
                stap_corrected_pulses(&s.path, t)
            }
        }
    }

    /// (α₁, α₂) at t. For STIRAP α₁ is the mixing angle (NaN while both
    /// Raman pulses are off) and α₂ is zero.
    pub fn angles(&self, t: f64) -> Result<(f64, f64)> {
        match self {
            Schedule::Stirap(_) => {
                let (p, s) = self.eval_ps(t)?;
                Ok((mixing_angle(p, s).unwrap_or(f64::NAN), 0.0))
            }
            Schedule::Stap(s) => {
                if t < s.path.t_i {
                    return Ok((f64::NAN, 0.0));
                }
                Ok((s.path.alpha1(t).0, s.path.alpha2(t).0))
            }
        }
    }
}

impl PulseProgram for Schedule {
    fn duration(&self) -> f64 {
        match self {
            Schedule::Stirap(s) => s.t_f,
            Schedule::Stap(s) => s.path.t_f,
        }
    }

    fn q_end(&self) -> f64 {
        match self {
            Schedule::Stirap(s) => s.t1,
            Schedule::Stap(s) => s.path.t_i,
        }
    }

    fn q_at(&self, t: f64) -> Result<f64> {
        self.eval_q(t)
    }

    fn ps_at(&self, t: f64) -> Result<(f64, f64)> {
        self.eval_ps(t)
    }

    fn q_area(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = (a.max(0.0), b.min(self.q_end()));
        Ok(if b <= a { 0.0 } else { self.q_pulse().integral(a, b) })
    }

    fn ps_area(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (a.max(self.q_end()), b.min(self.duration()));
        if hi <= lo {
            return Ok((0.0, 0.0));
        }
        match self {
            Schedule::Stirap(s) => Ok((
                s.p_first.integral(lo, hi) + s.p_second.integral(lo, hi),
                s.s.integral(lo, hi),
            )),
            Schedule::Stap(s) => {
                let mut out = [0.0; 2];
                for (k, slot) in out.iter_mut().enumerate() {
                    let mut err = None;
                    *slot = quad::integrate(
                        |t| match stap_corrected_pulses(&s.path, t) {
                            Ok(v) => [v.0, v.1][k],
                            Err(e) => {
                                err.get_or_insert(e);
                                0.0
                            }
                        },
                        lo,
                        hi,
                        QUAD_TOL,
                    );
                    if let Some(e) = err {
                        return Err(e);
                    }
                }
                Ok((out[0], out[1]))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticityRatio {
    pub value: f64,
    /// Set when Ω(t) = 0 and `value` is the infinity sentinel.
    pub degenerate: bool,
}

/// |α̇₁| / Ω(t), with α̇₁ from a central difference of step 1e-4·duration.
pub fn adiabaticity_ratio(schedule: &Schedule, t: f64) -> Result<AdiabaticityRatio> {
    let (p, s) = schedule.eval_ps(t)?;
    let omega = total_rabi(p, s);
    if omega == 0.0 {
        return Ok(AdiabaticityRatio {
            value: f64::INFINITY,
            degenerate: true,
        });
    }
    let h = 1e-4 * schedule.duration();
    let lo = (t - h).max(schedule.q_end());
    let hi = (t + h).min(schedule.duration());
    let angle = |x: f64| -> Result<f64> {
        match schedule {
            Schedule::Stirap(_) => {
                let (p, s) = schedule.eval_ps(x)?;
                mixing_angle(p, s)
            }
            Schedule::Stap(st) => Ok(st.path.alpha1(x).0),
        }
    };
    let rate = (angle(hi)? - angle(lo)?) / (hi - lo);
    Ok(AdiabaticityRatio {
        value: rate.abs() / omega,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    #[default]
    AreaPreserving,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceAmplitudes {
    pub q: f64,
    pub p: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedSchedule {
    pub delta_t: f64,
    pub samples: Vec<SliceAmplitudes>,
    /// Slices starting before the end of the Q stage.
    pub k: usize,
    pub m: usize,
    pub duration: f64,
    pub q_end: f64,
    pub mode: Discretization,
}

impl DiscretizedSchedule {
    pub fn slice_bounds(&self, i: usize) -> (f64, f64) {
        let a = i as f64 * self.delta_t;
        let b = if i + 1 == self.m {
            self.duration
        } else {
            (i + 1) as f64 * self.delta_t
        };
        (a, b)
    }

    /// Σ amplitude·δt for (Q, P, S).
    pub fn total_areas(&self) -> (f64, f64, f64) {
        self.samples.iter().fold((0.0, 0.0, 0.0), |acc, s| {
            (
                acc.0 + s.q * self.delta_t,
                acc.1 + s.p * self.delta_t,
                acc.2 + s.s * self.delta_t,
            )
        })
    }
}

/// Cut `program` into `n_steps` equal slices; each slice carries a Q, P and S
/// amplitude. Q is active on the part of the slice before `q_end`, P and S on
/// the part after it.
pub fn discretize<P: PulseProgram + ?Sized>(
    program: &P,
    n_steps: usize,
    mode: Discretization,
) -> Result<DiscretizedSchedule> {
    if n_steps < 2 {
        return Err(Error::config("n_steps", "must be >= 2"));
    }
    let duration = program.duration();
    let q_end = program.q_end();
    let dt = duration / n_steps as f64;
    let mut samples = Vec::with_capacity(n_steps);
    let mut k = 0;
    for i in 0..n_steps {
        let a = i as f64 * dt;
        let b = if i + 1 == n_steps { duration } else { (i + 1) as f64 * dt };
        if a < q_end {
            k += 1;
        }
        let amp = match mode {
            Discretization::AreaPreserving => {
                let q = program.q_area(a, b)? / dt;
                let (p, s) = program.ps_area(a, b)?;
                SliceAmplitudes { q, p: p / dt, s: s / dt }
            }
            Discretization::Midpoint => {
                let (qa, qb) = (a, b.min(q_end));
                let q = if qb > qa {
                    program.q_at(0.5 * (qa + qb))? * (qb - qa) / dt
                } else {
                    0.0
                };
                let (pa, pb) = (a.max(q_end), b);
                let (p, s) = if pb > pa {
                    let (p, s) = program.ps_at(0.5 * (pa + pb))?;
                    let frac = (pb - pa) / dt;
                    (p * frac, s * frac)
                } else {
                    (0.0, 0.0)
                };
                SliceAmplitudes { q, p, s }
            }
        };
        samples.push(amp);
    }
    Ok(DiscretizedSchedule {
        delta_t: dt,
        samples,
        k,
        m: n_steps,
        duration,
        q_end,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stirap() -> Schedule {
        Schedule::Stirap(StirapSchedule::new(&StirapParams::default()).unwrap())
    }

    fn stap() -> Schedule {
        Schedule::Stap(StapSchedule::new(&StapParams::default()).unwrap())
    }

    // Composite Simpson on a fine grid, independent of the erf closed form.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn gaussian_peak_and_width() {
        let g = GaussianPulse::new(2.0, 1.0, 0.5).unwrap();
        assert_eq!(g.value(1.0), 2.0);
        assert!((g.value(1.5) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((g.value(0.5) - g.value(1.5)).abs() < 1e-15);
        assert!(GaussianPulse::new(-1.0, 0.0, 1.0).is_err());
        assert!(GaussianPulse::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn q_area_is_quarter_turn() {
        let s = stirap();
        let Schedule::Stirap(st) = s else { unreachable!() };
        let area = simpson(|t| st.eval_q(t).unwrap(), 0.0, st.t1, 20_000);
        assert!((area - FRAC_PI_2).abs() < 1e-10);
        let unit = simpson(|t| (-((t - st.q.center) / st.q.width).powi(2)).exp(), 0.0, st.t1, 20_000);
        assert!((st.q.peak_amplitude - FRAC_PI_2 / unit).abs() < 1e-9);
    }

    #[test]
    fn eval_domain_and_stage_windows() {
        let s = stirap();
        assert!(matches!(s.eval_q(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(s.eval_q(10.1), Err(Error::Domain { .. })));
        assert_eq!(s.eval_ps(1.0).unwrap(), (0.0, 0.0));
        assert_eq!(s.eval_q(3.0).unwrap(), 0.0);
        let g = GaussianPulse::new(1.0, 5.0, 1.0).unwrap();
        let st = StirapSchedule {
            p_first: g,
            p_second: g,
            s: g,
            ..match s {
                Schedule::Stirap(x) => x,
                _ => unreachable!(),
            }
        };
        let (p, sv) = st.eval_ps(5.0).unwrap();
        assert_eq!(p, 2.0 * sv);
    }

    #[test]
    fn stokes_dominated_region_has_equal_pulses() {
        // The Stokes pulse equals the first pump Gaussian, so early in the P/S
        // stage the two drives agree and α₁ sits at π/4.
        let Schedule::Stirap(st) = stirap() else { unreachable!() };
        let (p, s) = st.eval_ps(st.t1).unwrap();
        assert!((p - s).abs() / s < 0.05);
        let (p, s) = st.eval_ps(0.5 * st.t_f).unwrap();
        assert!(p >= s);
    }

    #[test]
    fn total_rabi_and_mixing_angle_examples() {
        assert_eq!(total_rabi(3.0, 4.0), 5.0);
        assert!((total_rabi(0.7, 0.7) - std::f64::consts::SQRT_2 * 0.7).abs() < 1e-15);
        assert_eq!(total_rabi(0.3, 0.0), 0.3);
        assert_eq!(mixing_angle(0.0, 2.0).unwrap(), 0.0);
        assert!((mixing_angle(1.5, 1.5).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(mixing_angle(2.0, 0.0).unwrap(), FRAC_PI_2);
        assert!(matches!(mixing_angle(0.0, 0.0), Err(Error::UndefinedAngle)));
    }

    #[test]
    fn adiabaticity_examples() {
        let s = stirap();
        let mut worst: f64 = 0.0;
        for i in 0..=2000 {
            let t = 2.53 + (10.0 - 2.53) * i as f64 / 2000.0;
            let r = adiabaticity_ratio(&s, t).unwrap();
            assert!(!r.degenerate);
            worst = worst.max(r.value);
        }
        assert!(worst < 0.3, "max ratio {worst}");
        let r = adiabaticity_ratio(&s, 1.0).unwrap();
        assert!(r.degenerate && r.value.is_infinite());

        let g = GaussianPulse::new(1.0, 0.0, 1e12).unwrap();
        let flat = Schedule::Stirap(StirapSchedule {
            p_first: g,
            p_second: g,
            s: g,
            ..match s {
                Schedule::Stirap(x) => x,
                _ => unreachable!(),
            }
        });
        assert!(adiabaticity_ratio(&flat, 5.0).unwrap().value < 1e-12);
    }

    #[test]
    fn stap_ratio_is_finite_everywhere() {
        let s = stap();
        for i in 1..200 {
            let t = 1.25 + 1.25 * i as f64 / 200.0;
            assert!(adiabaticity_ratio(&s, t).unwrap().value.is_finite());
        }
    }

    #[test]
    fn alpha2_boundaries() {
        let Schedule::Stap(s) = stap() else { unreachable!() };
        let p = s.path;
        assert_eq!(stap_alpha2(&p, 0.5 * (p.t_i + p.t_f)), p.alpha_m);
        let edge = p.alpha_m * (-9.0f64).exp();
        assert!((stap_alpha2(&p, p.t_i) - edge).abs() < 1e-15);
        assert!((stap_alpha2(&p, p.t_f) - edge).abs() < 1e-15);
        assert!((0.25f64.sin().powi(2) - 0.0612).abs() < 1e-3);
    }

    #[test]
    fn alpha1_boundaries_and_rate() {
        for profile in [Alpha1Profile::ErfRamp, Alpha1Profile::SinSquared] {
            let p = StapAnglePath::new(0.5, 1.0, 3.0, None, profile).unwrap();
            assert!((p.alpha1(1.0).0 - FRAC_PI_4).abs() < 1e-14);
            assert!((p.alpha1(3.0).0 - FRAC_PI_2).abs() < 1e-14);
            for i in 1..100 {
                let t = 1.0 + 2.0 * i as f64 / 100.0;
                let h = 1e-6;
                let fd = (p.alpha1(t + h).0 - p.alpha1(t - h).0) / (2.0 * h);
                assert!((fd - p.alpha1(t).1).abs() < 1e-7);
                let fd2 = (p.alpha2(t + h).0 - p.alpha2(t - h).0) / (2.0 * h);
                assert!((fd2 - p.alpha2(t).1).abs() < 1e-7);
                assert!(p.alpha1(t).1 >= 0.0);
            }
        }
    }

    #[test]
    fn corrected_pulses_identities() {
        let Schedule::Stap(s) = stap() else { unreachable!() };
        let p = s.path;
        for i in 1..50 {
            let t = p.t_i + (p.t_f - p.t_i) * i as f64 / 50.0;
            let (a1, d1) = p.alpha1(t);
            let (a2, d2) = p.alpha2(t);
            let (pe, se) = stap_corrected_pulses(&p, t).unwrap();
            // projections onto the dark and bright directions of the Raman pair
            let along = pe * a1.sin() + se * a1.cos();
            let across = pe * a1.cos() - se * a1.sin();
            assert!((along + 2.0 * d1 / a2.tan()).abs() < 1e-10 * (1.0 + along.abs()));
            assert!((across + 2.0 * d2).abs() < 1e-10 * (1.0 + across.abs()));
        }
        let frozen = StapAnglePath {
            alpha1_profile: Alpha1Profile::ErfRamp,
            t_alpha2: 1e12,
            t_i: -1e12,
            t_f: 1e12,
            alpha_m: 0.3,
        };
        let (pe, se) = stap_corrected_pulses(&frozen, 0.0).unwrap();
        assert!(pe.abs() < 1e-9 && se.abs() < 1e-9);
    }

    #[test]
    fn corrected_pulses_have_finite_edge_limits() {
        let Schedule::Stap(s) = stap() else { unreachable!() };
        let p = s.path;
        for edge in [p.t_i, p.t_f] {
            let dir = if edge == p.t_i { 1.0 } else { -1.0 };
            let mut last = stap_corrected_pulses(&p, edge + dir * 1e-2).unwrap();
            for e in [1e-3, 1e-4, 1e-5, 1e-6] {
                let v = stap_corrected_pulses(&p, edge + dir * e).unwrap();
                assert!((v.0 - last.0).abs() < 1e-2 && (v.1 - last.1).abs() < 1e-2);
                last = v;
            }
            let at = stap_corrected_pulses(&p, edge).unwrap();
            assert!(at.0.abs() < 1e-2 && at.1.abs() < 1e-2);
        }
    }

    #[test]
    fn singular_path_is_reported() {
        let mut p = StapAnglePath::new(0.5, 0.0, 1.0, Some(1e-3), Alpha1Profile::SinSquared).unwrap();
        p.alpha_m = 0.5;
        let err = stap_corrected_pulses(&p, 0.2).unwrap_err();
        assert!(matches!(err, Error::SingularSchedule { t, .. } if t == 0.2));
    }

    struct Flat(f64);

    impl PulseProgram for Flat {
        fn duration(&self) -> f64 {
            3.0
        }
        fn q_end(&self) -> f64 {
            1.1
        }
        fn q_at(&self, _: f64) -> Result<f64> {
            Ok(self.0)
        }
        fn ps_at(&self, _: f64) -> Result<(f64, f64)> {
            Ok((self.0, self.0))
        }
    }

    #[test]
    fn constant_pulse_slices_are_constant() {
        for n in [2, 3, 7, 30] {
            for mode in [Discretization::AreaPreserving, Discretization::Midpoint] {
                let d = discretize(&Flat(0.8), n, mode).unwrap();
                for (i, s) in d.samples.iter().enumerate() {
                    let (a, b) = d.slice_bounds(i);
                    if b <= 1.1 {
                        assert!((s.q - 0.8).abs() < 1e-12);
                    }
                    if a >= 1.1 {
                        assert!((s.p - 0.8).abs() < 1e-12 && (s.s - 0.8).abs() < 1e-12);
                    }
                    assert!((s.q + s.p - 0.8).abs() < 1e-12);
                }
            }
        }
        assert!(discretize(&Flat(1.0), 1, Discretization::Midpoint).is_err());
    }

    #[test]
    fn area_mode_matches_quadrature_oracle() {
        let s = stirap();
        let Schedule::Stirap(st) = s else { unreachable!() };
        let d = discretize(&s, 20, Discretization::AreaPreserving).unwrap();
        assert_eq!(d.m, 20);
        assert!((d.m as f64 * d.delta_t - 10.0).abs() < 1e-12);
        let (q, p, sa) = d.total_areas();
        let oq = simpson(|t| st.q.value(t), 0.0, st.t1, 20_000);
        let op = simpson(|t| st.eval_ps(t).unwrap().0, st.t1, st.t_f, 20_000);
        let os = simpson(|t| st.eval_ps(t).unwrap().1, st.t1, st.t_f, 20_000);
        assert!((q - oq).abs() < 1e-8 && (p - op).abs() < 1e-8 && (sa - os).abs() < 1e-8);
        for i in 0..d.m {
            let (a, b) = d.slice_bounds(i);
            let lo = a.max(st.t1);
            if b > lo {
                let want = simpson(|t| st.eval_ps(t).unwrap().0, lo, b, 2000);
                assert!((d.samples[i].p * d.delta_t - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn stap_area_mode_matches_simpson() {
        let s = stap();
        let d = discretize(&s, 16, Discretization::AreaPreserving).unwrap();
        let (_, p, sa) = d.total_areas();
        let op = simpson(|t| s.eval_ps(t).unwrap().0, 1.25, 2.5, 40_000);
        let os = simpson(|t| s.eval_ps(t).unwrap().1, 1.25, 2.5, 40_000);
        assert!((p - op).abs() < 1e-8 * op.abs().max(1.0));
        assert!((sa - os).abs() < 1e-8 * os.abs().max(1.0));
    }

    #[test]
    fn midpoint_area_error_is_second_order() {
        let s = stirap();
        let exact = discretize(&s, 40, Discretization::AreaPreserving).unwrap().total_areas().1;
        let err = |n| (discretize(&s, n, Discretization::Midpoint).unwrap().total_areas().1 - exact).abs();
        let (e1, e2, e4) = (err(40), err(80), err(160));
        let (r1, r2) = (e1 / e2, e2 / e4);
        assert!((3.0..5.0).contains(&r1), "{r1}");
        assert!((3.0..5.0).contains(&r2), "{r2}");
    }

    proptest! {
        #[test]
        fn mixing_angle_round_trip(alpha in 0.0..=FRAC_PI_2, omega in 1e-3f64..1e3) {
            let got = mixing_angle(omega * alpha.sin(), omega * alpha.cos()).unwrap();
            prop_assert!((got - alpha).abs() < 1e-12);
        }

        #[test]
        fn stirap_pulses_nonnegative(t in 0.0f64..=10.0) {
            let (p, s) = stirap().eval_ps(t).unwrap();
            prop_assert!(p >= 0.0 && s >= 0.0);
        }

        #[test]
        fn stap_pulses_finite(u in 0.0f64..=1.0) {
            let (p, s) = stap().eval_ps(1.25 + 1.25 * u).unwrap();
            prop_assert!(p.is_finite() && s.is_finite());
        }

        #[test]
        fn area_mode_conserves_total(n in 4usize..200) {
            let s = stirap();
            let d = discretize(&s, n, Discretization::AreaPreserving).unwrap();
            let reference = discretize(&s, 2, Discretization::AreaPreserving).unwrap();
            let (q, p, sa) = d.total_areas();
            let (rq, rp, rs) = reference.total_areas();
            prop_assert!((q - rq).abs() <= 1e-8 * rq);
            prop_assert!((p - rp).abs() <= 1e-8 * rp);
            prop_assert!((sa - rs).abs() <= 1e-8 * rs);
        }
    }
}
