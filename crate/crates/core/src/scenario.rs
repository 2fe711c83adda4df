// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files and the end-to-end runs built on them: oracle and circuit
//! evolution for both enantiomers, discrimination reports, Trotter sweeps,
//! QASM export and pulse dumps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{compile_protocol, run_statevector, sample_measurements, Circuit, CompileOptions, MeasurementRecord, SGateMode, SplitOrder};
use crate::counts::CountsFile;
use crate::error::{Error, Result};
use crate::hamiltonian::predict_r_final;
use crate::linalg::{Statevector, IDX_10};
use crate::molecule::{self, ConsistencyReport, FieldConfig, J1Energies, MoleculeSpec, TransitionTable};
use crate::propagator::{evolve_schedule, Evolution, PopulationTrace};
use crate::pulse::{discretize, Discretization, Handedness, Protocol, PulseProgram, Schedule, StapParams, StapSchedule, StirapParams, StirapSchedule};
use crate::qasm::to_qasm;

pub const D_DEFINITION: &str = "D(t) = |P_L,10(t) - P_R,10(t)|";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MoleculeChoice {
    Builtin(String),
    Inline(MoleculeSpec),
}

impl Default for MoleculeChoice {
    fn default() -> Self {
        MoleculeChoice::Builtin(molecule::CORRECTED_NAME.into())
    }
}

impl MoleculeChoice {
    pub fn resolve(&self) -> Result<MoleculeSpec> {
        let spec = match self {
            MoleculeChoice::Builtin(name) => molecule::builtin(name).ok_or_else(|| {
                Error::config(
                    "molecule",
                    format!("unknown built-in `{name}`; use `{}` or `{}`", molecule::PRINTED_NAME, molecule::CORRECTED_NAME),
                )
            })?,
            MoleculeChoice::Inline(spec) => spec.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub protocol: Protocol,
    pub molecule: MoleculeChoice,
    pub field: Option<FieldConfig>,
    pub n_steps: usize,
    pub shots: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub checkpoints_us: Vec<f64>,
    pub erratum_s_gate: bool,
    pub split_order: SplitOrder,
    pub discretization: Discretization,
    pub oracle_steps: usize,
    pub stirap: StirapParams,
    pub stap: StapParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            protocol: Protocol::Stap,
            molecule: MoleculeChoice::default(),
            field: None,
            n_steps: 20,
            shots: 5000,
            seed: 7,
            output_dir: PathBuf::from("out"),
            checkpoints_us: vec![0.61, 1.24, 2.53],
            erratum_s_gate: false,
            split_order: SplitOrder::Ps,
            discretization: Discretization::AreaPreserving,
            oracle_steps: 2000,
            stirap: StirapParams::default(),
            stap: StapParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[s].trim().trim_matches('"').to_string())
                .filter(|s| !s.is_empty() && s.len() <= 40 && !s.contains('\n'))
                .unwrap_or_else(|| "config".into());
            Error::config(field, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(Error::config("n_steps", "must be >= 2"));
        }
        if self.shots == 0 {
            return Err(Error::config("shots", "must be >= 1"));
        }
        if self.oracle_steps < 10 {
            return Err(Error::config("oracle_steps", "must be >= 10"));
        }
        if let Some(t) = self.checkpoints_us.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::config("checkpoints_us", format!("{t} is not a finite time >= 0")));
        }
        self.molecule.resolve()?;
        if let Some(f) = &self.field {
            f.validate()?;
        }
        self.schedule()?;
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Ok(match self.protocol {
            Protocol::Stirap => Schedule::Stirap(StirapSchedule::new(&self.stirap)?),
            Protocol::Stap => Schedule::Stap(StapSchedule::new(&self.stap)?),
        })
    }

    pub fn compile_options(&self, schedule: &Schedule) -> CompileOptions {
        let (phi_p, phi_s) = schedule.phases();
        CompileOptions {
            split_order: self.split_order,
            s_gate: if self.erratum_s_gate { SGateMode::Erratum } else { SGateMode::Faithful },
            phi_p,
            phi_s,
        }
    }

    pub fn compile(&self, schedule: &Schedule, n_steps: usize, hand: Handedness) -> Result<Circuit> {
        let d = discretize(schedule, n_steps, self.discretization)?;
        Ok(compile_protocol(&d, hand, schedule.protocol(), &self.compile_options(schedule)))
    }
}

/// Everything computed for one enantiomer.
#[derive(Debug, Clone)]
pub struct EnantiomerRun {
    pub handedness: Handedness,
    pub oracle: Evolution,
    pub circuit: Circuit,
    pub circuit_trace: PopulationTrace,
    pub circuit_final: Statevector,
    pub counts: MeasurementRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub label: String,
    pub time_us: f64,
    pub populations_l: [f64; 4],
    pub populations_r: [f64; 4],
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fidelities {
    /// |<10|ψ_L>|², target −|10>.
    pub l: f64,
    /// Overlap with the predicted R final state.
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrotterRow {
    pub n_steps: usize,
    pub delta_t: f64,
    pub deviation_l: f64,
    pub deviation_r: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrotterTable {
    pub protocol: Protocol,
    pub rows: Vec<TrotterRow>,
    /// Least-squares slope of ln ε against ln N.
    pub slope: Option<f64>,
}

impl TrotterTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("protocol {}\n   N   delta_t_us   dev_L        dev_R        max\n", self.protocol.as_str());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4}   {:<10.6} {:<12.4e} {:<12.4e} {:.4e}",
                r.n_steps, r.delta_t, r.deviation_l, r.deviation_r, r.max_deviation
            );
        }
        match self.slope {
            Some(s) => {
                let _ = writeln!(out, "fitted slope of log eps vs log N: {s:.3}");
            }
            None => out.push_str("fitted slope: n/a\n"),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrimination {
    pub times: Vec<f64>,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub protocol: Protocol,
    pub definition: &'static str,
    pub duration_us: f64,
    pub q_end_us: f64,
    pub n_steps: usize,
    pub s_gate: SGateMode,
    pub times: Vec<f64>,
    pub d: Vec<f64>,
    pub d_final: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub oracle_fidelities: Fidelities,
    pub circuit_fidelities: Fidelities,
    pub trotter: Vec<TrotterRow>,
    pub max_norm_error: f64,
    pub molecule: String,
    pub peak_rabi_mhz: [f64; 3],
    pub warnings: Vec<String>,
}

impl DiscriminationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "protocol {} | duration {} us | N = {}\n{D_DEFINITION}\nD(t_f) = {:.6}\n",
            self.protocol.as_str(),
            self.duration_us,
            self.n_steps,
            self.d_final
        );
        let _ = writeln!(
            out,
            "final fidelity (oracle): L {:.6}  R {:.6}\nfinal fidelity (circuit): L {:.6}  R {:.6}",
            self.oracle_fidelities.l, self.oracle_fidelities.r, self.circuit_fidelities.l, self.circuit_fidelities.r
        );
        out.push_str("checkpoint       t_us     P00_L    P10_L    P00_R    P10_R    D\n");
        for c in &self.checkpoints {
            let _ = writeln!(
                out,
                "{:<14} {:>7.3}   {:.4}   {:.4}   {:.4}   {:.4}   {:.4}",
                c.label, c.time_us, c.populations_l[0], c.populations_l[2], c.populations_r[0], c.populations_r[2], c.d
            );
        }
        for r in &self.trotter {
            let _ = writeln!(out, "circuit vs oracle max deviation at N = {}: {:.3e}", r.n_steps, r.max_deviation);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

/// D(t) on a shared time grid.
pub fn report_discrimination(l: &PopulationTrace, r: &PopulationTrace) -> Result<Discrimination> {
    if l.times.len() != r.times.len() || l.times.iter().zip(&r.times).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::GridMismatch);
    }
    let d = l
        .populations
        .iter()
        .zip(&r.populations)
        .map(|(a, b)| (a[IDX_10] - b[IDX_10]).abs())
        .collect();
    Ok(Discrimination { times: l.times.clone(), d })
}

pub fn fidelities(schedule: &Schedule, l: &Statevector, r: &Statevector) -> Result<Fidelities> {
    let target_r = predict_r_final(schedule)?;
    Ok(Fidelities {
        l: l.amplitude(IDX_10).norm_sqr(),
        r: target_r.inner(r).norm_sqr(),
    })
}

/// Largest population difference over the circuit's step times; the oracle
/// trace must contain those times.
pub fn trotter_deviation(circuit: &PopulationTrace, oracle: &PopulationTrace) -> f64 {
    circuit
        .times
        .iter()
        .zip(&circuit.populations)
        .map(|(&t, pc)| {
            let (_, po) = oracle.at(t).expect("oracle trace is nonempty");
            pc.iter().zip(&po).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn oracle_nodes(config: &ScenarioConfig, circuit: &Circuit) -> Vec<f64> {
    let mut nodes = circuit.step_times.clone();
    nodes.extend(&config.checkpoints_us);
    nodes
}

fn run_enantiomer(config: &ScenarioConfig, schedule: &Schedule, n_steps: usize, hand: Handedness, extra: &[f64]) -> Result<EnantiomerRun> {
    let circuit = config.compile(schedule, n_steps, hand)?;
    let mut nodes = oracle_nodes(config, &circuit);
    nodes.extend(extra);
    let oracle = evolve_schedule(schedule, hand, config.oracle_steps, &nodes)?;
    let (circuit_trace, circuit_final) = run_statevector(&circuit, &Statevector::ground());
    let seed = config.seed.wrapping_add(match hand {
        Handedness::L => 0,
        Handedness::R => 1,
    });
    let counts = sample_measurements(&circuit_final, config.shots, seed)?;
    Ok(EnantiomerRun {
        handedness: hand,
        oracle,
        circuit,
        circuit_trace,
        circuit_final,
        counts,
    })
}

fn peak_rabi(schedule: &Schedule) -> Result<[f64; 3]> {
    let n = 1000;
    let t_f = schedule.duration();
    let mut peak = [0.0f64; 3];
    for i in 0..=n {
        let t = t_f * i as f64 / n as f64;
        let q = schedule.eval_q(t)?;
        let (p, s) = schedule.eval_ps(t)?;
        for (slot, v) in peak.iter_mut().zip([q, p, s]) {
            *slot = slot.max(v.abs());
        }
    }
    Ok(peak)
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub config: ScenarioConfig,
    pub report: DiscriminationReport,
    pub l: EnantiomerRun,
    pub r: EnantiomerRun,
}

impl ScenarioOutput {
    pub fn run(&self, hand: Handedness) -> &EnantiomerRun {
        match hand {
            Handedness::L => &self.l,
            Handedness::R => &self.r,
        }
    }

    /// Write traces, circuits and counts for the selected enantiomers plus
    /// `report.json`; returns the written paths in order.
    pub fn write_artifacts(&self, dir: &Path, which: &[Handedness]) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for &h in which {
            let run = self.run(h);
            let tag = h.as_str();
            let files = [
                (format!("oracle_{tag}.csv"), run.oracle.trace.to_csv()),
                (format!("circuit_{tag}.csv"), run.circuit_trace.to_csv()),
                (format!("circuit_{tag}.qasm"), to_qasm(&run.circuit)),
                (format!("counts_{tag}.json"), CountsFile::from(&run.counts).to_json()),
            ];
            for (name, body) in files {
                let path = dir.join(name);
                std::fs::write(&path, body)?;
                written.push(path);
            }
        }
        let path = dir.join("report.json");
        std::fs::write(&path, self.report.to_json())?;
        written.push(path);
        Ok(written)
    }
}

/// Oracle and circuit runs of both enantiomers from |00>.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    let schedule = config.schedule()?;
    let mol = config.molecule.resolve()?;
    let duration = schedule.duration();
    let q_end = schedule.q_end();
    let structural = [0.5 * q_end, q_end];
    let l = run_enantiomer(config, &schedule, config.n_steps, Handedness::L, &structural)?;
    let r = run_enantiomer(config, &schedule, config.n_steps, Handedness::R, &structural)?;

    let disc = report_discrimination(&l.oracle.trace, &r.oracle.trace)?;
    let mut warnings = Vec::new();
    let mut checkpoints = Vec::new();
    let mut labelled: Vec<(String, f64)> = vec![("q_mid".into(), 0.5 * q_end), ("q_end".into(), q_end)];
    for &t in &config.checkpoints_us {
        if t > duration + 1e-12 {
            warnings.push(format!("checkpoint {t} us lies beyond the {duration} us schedule and was skipped"));
        } else {
            labelled.push((format!("config_{t}"), t));
        }
    }
    labelled.push(("final".into(), duration));
    for (label, t) in labelled {
        let (tl, pl) = l.oracle.trace.at(t).expect("nonempty trace");
        let (_, pr) = r.oracle.trace.at(t).expect("nonempty trace");
        checkpoints.push(Checkpoint {
            label,
            time_us: tl,
            populations_l: pl,
            populations_r: pr,
            d: (pl[IDX_10] - pr[IDX_10]).abs(),
        });
    }

    let peak = peak_rabi(&schedule)?;
    warnings.extend(molecule::rwa_warnings(&mol.table, peak[1], peak[2], peak[0]));
    let deviation_l = trotter_deviation(&l.circuit_trace, &l.oracle.trace);
    let deviation_r = trotter_deviation(&r.circuit_trace, &r.oracle.trace);
    let report = DiscriminationReport {
        protocol: config.protocol,
        definition: D_DEFINITION,
        duration_us: duration,
        q_end_us: q_end,
        n_steps: config.n_steps,
        s_gate: config.compile_options(&schedule).s_gate,
        d_final: *disc.d.last().expect("nonempty"),
        times: disc.times,
        d: disc.d,
        checkpoints,
        oracle_fidelities: fidelities(&schedule, &l.oracle.final_state, &r.oracle.final_state)?,
        circuit_fidelities: fidelities(&schedule, &l.circuit_final, &r.circuit_final)?,
        trotter: vec![TrotterRow {
            n_steps: config.n_steps,
            delta_t: l.circuit.metadata.delta_t,
            deviation_l,
            deviation_r,
            max_deviation: deviation_l.max(deviation_r),
        }],
        max_norm_error: l.oracle.max_norm_error.max(r.oracle.max_norm_error),
        molecule: mol.name,
        peak_rabi_mhz: peak.map(molecule::rad_per_us_to_mhz),
        warnings,
    };
    Ok(ScenarioOutput {
        config: config.clone(),
        report,
        l,
        r,
    })
}

/// Least-squares slope of ln y against ln x over the positive points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn sweep_trotter(config: &ScenarioConfig, steps_list: &[usize]) -> Result<TrotterTable> {
    if steps_list.is_empty() {
        return Err(Error::config("steps", "need at least one step count"));
    }
    if let Some(n) = steps_list.iter().find(|&&n| n < 2) {
        return Err(Error::config("steps", format!("{n} is below the minimum of 2")));
    }
    config.validate()?;
    let schedule = config.schedule()?;
    let mut rows = Vec::with_capacity(steps_list.len());
    for &n in steps_list {
        let mut dev = [0.0; 2];
        let mut delta_t = 0.0;
        for (slot, hand) in dev.iter_mut().zip(Handedness::BOTH) {
            let circuit = config.compile(&schedule, n, hand)?;
            delta_t = circuit.metadata.delta_t;
            let oracle = evolve_schedule(&schedule, hand, config.oracle_steps, &circuit.step_times)?;
            let (trace, _) = run_statevector(&circuit, &Statevector::ground());
            *slot = trotter_deviation(&trace, &oracle.trace);
        }
        rows.push(TrotterRow {
            n_steps: n,
            delta_t,
            deviation_l: dev[0],
            deviation_r: dev[1],
            max_deviation: dev[0].max(dev[1]),
        });
    }
    let slope = log_log_slope(&rows.iter().map(|r| (r.n_steps as f64, r.max_deviation)).collect::<Vec<_>>());
    Ok(TrotterTable {
        protocol: config.protocol,
        rows,
        slope,
    })
}

/// Compiled circuits as QASM files, one per enantiomer.
pub fn export_qasm(config: &ScenarioConfig, dir: &Path, which: &[Handedness]) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let schedule = config.schedule()?;
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for &h in which {
        let path = dir.join(format!("circuit_{}.qasm", h.as_str()));
        std::fs::write(&path, to_qasm(&config.compile(&schedule, config.n_steps, h)?))?;
        out.push(path);
    }
    Ok(out)
}

/// Oracle trace of one enantiomer with `t` pinned on the grid.
pub fn reference_trace(config: &ScenarioConfig, hand: Handedness, t: f64) -> Result<PopulationTrace> {
    config.validate()?;
    let schedule = config.schedule()?;
    if !(0.0..=schedule.duration()).contains(&t) {
        return Err(Error::config(
            "time",
            format!("{t} us lies outside the schedule [0, {}] us", schedule.duration()),
        ));
    }
    Ok(evolve_schedule(&schedule, hand, config.oracle_steps, &[t])?.trace)
}

pub const PULSE_CSV_HEADER: &str = "t_us,omega_q,omega_p,omega_s,alpha1,alpha2";

/// Drive amplitudes (rad/µs) and angles on `samples + 1` uniform points.
/// Undefined angles are left empty.
pub fn dump_pulses(config: &ScenarioConfig, samples: usize) -> Result<String> {
    config.validate()?;
    let schedule = config.schedule()?;
    let samples = samples.max(1);
    let t_f = schedule.duration();
    let mut out = String::from(PULSE_CSV_HEADER);
    out.push('\n');
    let cell = |x: f64| if x.is_finite() { format!("{x:.12}") } else { String::new() };
    for i in 0..=samples {
        let t = t_f * i as f64 / samples as f64;
        let q = schedule.eval_q(t)?;
        let (p, s) = schedule.eval_ps(t)?;
        let (a1, a2) = schedule.angles(t)?;
        let _ = writeln!(out, "{t:.9},{q:.12},{p:.12},{s:.12},{},{}", cell(a1), cell(a2));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoleculeCheck {
    pub molecule: MoleculeSpec,
    pub energies: J1Energies,
    pub implied: TransitionTable,
    pub consistency: ConsistencyReport,
    /// (Ω_P, Ω_S, Ω_Q)/2π in MHz for the configured field, if any.
    pub field_rabi_mhz: Option<(f64, f64, f64)>,
}

impl MoleculeCheck {
    pub fn to_text(&self) -> String {
        let m = &self.molecule;
        let mut out = format!(
            "molecule {}\nA = {} MHz, B = {} MHz, C = {} MHz\nE(1_01) = {:.2}  E(1_11) = {:.2}  E(1_10) = {:.2} MHz\n",
            m.name, m.constants.a, m.constants.b, m.constants.c, self.energies.e_1_01, self.energies.e_1_11, self.energies.e_1_10
        );
        out.push_str("transition  type  table_MHz  implied_MHz\n");
        for (t, i) in m.table.entries().iter().zip(self.implied.entries()) {
            let _ = writeln!(
                out,
                "{}-{}       {:?}     {:<10} {:.2}",
                t.lower, t.upper, t.dipole, t.frequency_mhz, i.frequency_mhz
            );
        }
        let _ = writeln!(
            out,
            "loop closure residual {:.3} MHz ({})",
            self.consistency.loop_closure_mhz,
            if self.consistency.loop_closes { "ok" } else { "FAILS" }
        );
        if self.consistency.flags.is_empty() {
            out.push_str("rotor constants consistent with the transition table\n");
        }
        for f in &self.consistency.flags {
            let _ = writeln!(
                out,
                "FLAG {}: table {} MHz vs rotor-implied {:.2} MHz (delta {:.2})",
                f.transition, f.table_mhz, f.implied_mhz, f.delta_mhz
            );
        }
        if let Some((p, s, q)) = self.field_rabi_mhz {
            let _ = writeln!(out, "Rabi/2pi at configured field: P {p:.4}  S {s:.4}  Q {q:.4} MHz");
        }
        out
    }
}

pub fn molecule_check(spec: &MoleculeSpec, field: Option<&FieldConfig>) -> MoleculeCheck {
    MoleculeCheck {
        molecule: spec.clone(),
        energies: molecule::j1_energies(&spec.constants),
        implied: molecule::implied_table(&spec.constants),
        consistency: molecule::consistency_check(&spec.constants, &spec.table),
        field_rabi_mhz: field.map(|f| f.rabi_mhz(&spec.dipoles)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(ScenarioConfig::from_toml_str("").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        match ScenarioConfig::from_toml_str("n_stepz = 3\n") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n_stepz"),
            other => panic!("{other:?}"),
        }
        match ScenarioConfig::from_toml_str("[stap]\nalpha_mm = 0.3\n") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "alpha_mm"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_values_name_their_field() {
        let field = |s: &str| match ScenarioConfig::from_toml_str(s) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field("n_steps = 1"), "n_steps");
        assert_eq!(field("shots = 0"), "shots");
        assert_eq!(field("molecule = \"water\""), "molecule");
        assert_eq!(field("checkpoints_us = [-1.0]"), "checkpoints_us");
        assert!(field("protocol = \"stirap\"\n[stirap]\nt1 = 20.0").starts_with("stirap"));
    }

    #[test]
    fn inline_molecule() {
        let text = r#"
            [molecule]
            name = "custom"
            constants = { a = 3.0, b = 2.0, c = 1.0 }
            dipoles = { mu_a = 1.0, mu_b = 1.0, mu_c = 1.0 }
            table = { omega_00_11 = 4.0, omega_00_10 = 5.0, omega_11_10 = 1.0 }
        "#;
        let cfg = ScenarioConfig::from_toml_str(text).unwrap();
        let m = cfg.molecule.resolve().unwrap();
        assert_eq!(m.name, "custom");
        assert!(molecule_check(&m, None).consistency.is_consistent());
    }

    #[test]
    fn identical_traces_have_zero_discrimination() {
        let mut a = PopulationTrace::new(Some(Handedness::L));
        a.push(0.0, &Statevector::ground());
        a.push(1.0, &Statevector::basis(IDX_10));
        let d = report_discrimination(&a, &a).unwrap();
        assert!(d.d.iter().all(|&x| x == 0.0));
        let mut b = a.clone();
        b.times[1] = 2.0;
        assert!(matches!(report_discrimination(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&n: &f64| (n, 3.0 / n)).collect();
        assert!((log_log_slope(&pts).unwrap() + 1.0).abs() < 1e-12);
        assert!(log_log_slope(&pts[..1]).is_none());
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let cfg = ScenarioConfig::default();
        assert!(sweep_trotter(&cfg, &[]).is_err());
        assert!(sweep_trotter(&cfg, &[10, 1]).is_err());
    }

    #[test]
    fn pulse_dump_shape() {
        let cfg = ScenarioConfig {
            protocol: Protocol::Stirap,
            ..Default::default()
        };
        let csv = dump_pulses(&cfg, 10).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], PULSE_CSV_HEADER);
        assert_eq!(lines.len(), 12);
        assert!(lines[1].ends_with(",,0.000000000000") || lines[1].ends_with(",,"));
    }
}
