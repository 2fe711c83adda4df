// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Rigid-rotor data for 1,2-propanediol and field-to-Rabi conversion.
//!
//! Frequencies at this boundary are ordinary frequencies in MHz; the
//! simulation works in rad/µs (see [`mhz_to_rad_per_us`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Debye in C·m (1e-21 / c).
pub const DEBYE_C_M: f64 = 3.335_640_951_981_52e-30;
/// Planck constant in J·s (exact SI value).
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;
/// μ·ε/h in MHz for μ = 1 D and ε = 1 V/cm.
pub const MHZ_PER_DEBYE_V_PER_CM: f64 = DEBYE_C_M * 100.0 / PLANCK_J_S / 1e6;

/// Ratio Ω/ω above which the rotating-wave approximation is reported as doubtful.
pub const RWA_RATIO_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotorConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RotorConstants {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let r = RotorConstants { a, b, c };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= self.b && self.b >= self.c && self.c > 0.0 && self.a.is_finite()) {
            return Err(Error::config("molecule.constants", "need A >= B >= C > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleComponents {
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_c: f64,
}

impl DipoleComponents {
    pub fn validate(&self) -> Result<()> {
        if ![self.mu_a, self.mu_b, self.mu_c].iter().all(|m| *m >= 0.0 && m.is_finite()) {
            return Err(Error::config("molecule.dipoles", "components must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DipoleType {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub lower: &'static str,
    pub upper: &'static str,
    pub dipole: DipoleType,
    pub frequency_mhz: f64,
}

/// The three drive frequencies in MHz. Pump |00>-|11> is b-type, Q
/// |00>-|10> is c-type and Stokes |11>-|10> is a-type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionTable {
    pub omega_00_11: f64,
    pub omega_00_10: f64,
    pub omega_11_10: f64,
}

impl TransitionTable {
    pub fn entries(&self) -> [Transition; 3] {
        [
            Transition {
                lower: "00",
                upper: "11",
                dipole: DipoleType::B,
                frequency_mhz: self.omega_00_11,
            },
            Transition {
                lower: "00",
                upper: "10",
                dipole: DipoleType::C,
                frequency_mhz: self.omega_00_10,
            },
            Transition {
                lower: "11",
                upper: "10",
                dipole: DipoleType::A,
                frequency_mhz: self.omega_11_10,
            },
        ]
    }

    /// ω(00,10) − ω(00,11) − ω(11,10)
    pub fn loop_closure_error(&self) -> f64 {
        self.omega_00_10 - self.omega_00_11 - self.omega_11_10
    }
}

/// J = 1 levels relative to 0_00, in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct J1Energies {
    pub e_1_01: f64,
    pub e_1_11: f64,
    pub e_1_10: f64,
}

pub fn j1_energies(k: &RotorConstants) -> J1Energies {
    J1Energies {
        e_1_01: k.b + k.c,
        e_1_11: k.a + k.c,
        e_1_10: k.a + k.b,
    }
}

/// Drive frequencies implied by the rotor constants: |00> = 0_00,
/// |11> = 1_11 and |10> = 1_10.
pub fn implied_table(k: &RotorConstants) -> TransitionTable {
    let e = j1_energies(k);
    TransitionTable {
        omega_00_11: e.e_1_11,
        omega_00_10: e.e_1_10,
        omega_11_10: e.e_1_10 - e.e_1_11,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyFlag {
    pub transition: String,
    pub table_mhz: f64,
    pub implied_mhz: f64,
    pub delta_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub flags: Vec<ConsistencyFlag>,
    pub loop_closure_mhz: f64,
    pub loop_closes: bool,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.flags.is_empty() && self.loop_closes
    }
}

/// Compare the table against the rotor-implied frequencies (1 MHz
/// tolerance) and check loop closure (0.5 MHz).
pub fn consistency_check(constants: &RotorConstants, table: &TransitionTable) -> ConsistencyReport {
    let implied = implied_table(constants);
    let flags = table
        .entries()
        .iter()
        .zip(implied.entries())
        .filter_map(|(t, i)| {
            let delta = t.frequency_mhz - i.frequency_mhz;
            (delta.abs() > 1.0).then(|| ConsistencyFlag {
                transition: format!("{}-{}", t.lower, t.upper),
                table_mhz: t.frequency_mhz,
                implied_mhz: i.frequency_mhz,
                delta_mhz: delta,
            })
        })
        .collect();
    let closure = table.loop_closure_error();
    ConsistencyReport {
        flags,
        loop_closure_mhz: closure,
        loop_closes: closure.abs() <= 0.5,
    }
}

/// Ω/2π = μ·ε/h in MHz for μ in Debye and ε in V/cm.
pub fn rabi_frequency(mu_debye: f64, field_v_per_cm: f64) -> f64 {
    mu_debye * field_v_per_cm * MHZ_PER_DEBYE_V_PER_CM
}

pub fn mhz_to_rad_per_us(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz
}

pub fn rad_per_us_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeSpec {
    pub name: String,
    pub constants: RotorConstants,
    pub dipoles: DipoleComponents,
    pub table: TransitionTable,
}

impl MoleculeSpec {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.dipoles.validate()?;
        let t = &self.table;
        if ![t.omega_00_11, t.omega_00_10, t.omega_11_10].iter().all(|w| *w > 0.0 && w.is_finite()) {
            return Err(Error::config("molecule.table", "frequencies must be finite and > 0"));
        }
        Ok(())
    }
}

pub const PRINTED_NAME: &str = "propanediol-printed";
pub const CORRECTED_NAME: &str = "propanediol-corrected";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropanediolData {
    /// Constants, dipoles and table exactly as printed.
    pub printed: MoleculeSpec,
    /// A = 8572.05 MHz, which reproduces the printed table.
    pub corrected: MoleculeSpec,
}

pub fn builtin_propanediol() -> PropanediolData {
    let dipoles = DipoleComponents {
        mu_a: 1.201,
        mu_b: 1.916,
        mu_c: 0.365,
    };
    let table = TransitionTable {
        omega_00_11: 11363.0,
        omega_00_10: 12212.0,
        omega_11_10: 849.0,
    };
    let printed = MoleculeSpec {
        name: PRINTED_NAME.into(),
        constants: RotorConstants {
            a: 5872.06,
            b: 3640.11,
            c: 2790.97,
        },
        dipoles,
        table,
    };
    let corrected = MoleculeSpec {
        name: CORRECTED_NAME.into(),
        constants: RotorConstants {
            a: 8572.05,
            ..printed.constants
        },
        dipoles,
        table,
    };
    PropanediolData { printed, corrected }
}

pub fn builtin(name: &str) -> Option<MoleculeSpec> {
    let d = builtin_propanediol();
    match name {
        PRINTED_NAME => Some(d.printed),
        CORRECTED_NAME => Some(d.corrected),
        _ => None,
    }
}

/// Field amplitudes in V/cm for the three drives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: f64,
    pub s: f64,
    pub q: f64,
    #[serde(default = "FieldConfig::default_max")]
    pub max: f64,
}

impl FieldConfig {
    fn default_max() -> f64 {
        2.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("s", self.s), ("q", self.q)] {
            if !(v >= 0.0 && v <= self.max) {
                return Err(Error::config(
                    format!("field.{name}"),
                    format!("{v} V/cm is outside [0, {}]", self.max),
                ));
            }
        }
        Ok(())
    }

    /// (Ω_P, Ω_S, Ω_Q) in MHz from the b-, a- and c-type dipoles.
    pub fn rabi_mhz(&self, d: &DipoleComponents) -> (f64, f64, f64) {
        (
            rabi_frequency(d.mu_b, self.p),
            rabi_frequency(d.mu_a, self.s),
            rabi_frequency(d.mu_c, self.q),
        )
    }
}

/// Warnings for drives whose peak Rabi frequency (rad/µs) is not small
/// against the transition frequency.
pub fn rwa_warnings(table: &TransitionTable, peak_p: f64, peak_s: f64, peak_q: f64) -> Vec<String> {
    [
        ("P", peak_p, table.omega_00_11),
        ("S", peak_s, table.omega_11_10),
        ("Q", peak_q, table.omega_00_10),
    ]
    .iter()
    .filter_map(|&(name, omega, freq)| {
        let ratio = rad_per_us_to_mhz(omega.abs()) / freq;
        (ratio >= RWA_RATIO_LIMIT).then(|| {
            format!("{name} drive: peak Rabi/transition ratio {ratio:.3e} >= {RWA_RATIO_LIMIT:e}; rotating-wave approximation is doubtful")
        })
    })
    .collect()
}
