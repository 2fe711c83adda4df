// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chiral_core::counts::{ingest_counts, parse_counts};
use chiral_core::molecule;
use chiral_core::scenario::{self, ScenarioConfig};
use chiral_core::{Error, Handedness, Protocol, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chiral", version, about = "Enantiomer discrimination by STIRAP and STAP on two qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Oracle and circuit runs for both enantiomers, with report and artifacts.
    Run(Common),
    /// Circuit-vs-oracle deviation over several Trotter step counts.
    SweepTrotter {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        sweep: Vec<usize>,
    },
    /// Write the compiled circuits as OpenQASM 2.0.
    ExportQasm(Common),
    /// Compare measured counts against the oracle populations at one time.
    IngestCounts {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        counts: PathBuf,
        /// Checkpoint time in µs.
        #[arg(long)]
        time: f64,
    },
    /// Drive amplitudes and control angles as CSV.
    DumpPulses {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Rotor-constant and transition-table consistency.
    MoleculeCheck {
        #[command(flatten)]
        common: Common,
        /// Built-in molecule name; overrides the config.
        #[arg(long)]
        molecule: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Stirap,
    Stap,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EnantiomerArg {
    #[value(name = "L")]
    L,
    #[value(name = "R")]
    R,
    Both,
}

impl EnantiomerArg {
    fn hands(self) -> Vec<Handedness> {
        match self {
            EnantiomerArg::L => vec![Handedness::L],
            EnantiomerArg::R => vec![Handedness::R],
            EnantiomerArg::Both => Handedness::BOTH.to_vec(),
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    #[arg(long, value_enum, default_value = "both")]
    enantiomer: EnantiomerArg,
    /// Use the XX+YY Stokes construction instead of the controlled rotation.
    #[arg(long)]
    erratum_s_gate: bool,
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.steps {
            cfg.n_steps = n;
        }
        if let Some(p) = self.protocol {
            cfg.protocol = match p {
                ProtocolArg::Stirap => Protocol::Stirap,
                ProtocolArg::Stap => Protocol::Stap,
            };
        }
        if self.erratum_s_gate {
            cfg.erratum_s_gate = true;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.config()?;
            let out = scenario::run_scenario(&cfg)?;
            let files = out.write_artifacts(&cfg.output_dir, &c.enantiomer.hands())?;
            print!("{}", out.report.summary());
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::SweepTrotter { common, sweep } => {
            let cfg = common.config()?;
            let table = scenario::sweep_trotter(&cfg, &sweep)?;
            print!("{}", table.to_text());
            if common.out.is_some() {
                let path = cfg.output_dir.join("trotter.json");
                write(&path, &table.to_json())?;
                println!("wrote {}", path.display());
            }
        }
        Command::ExportQasm(c) => {
            let cfg = c.config()?;
            for f in scenario::export_qasm(&cfg, &cfg.output_dir, &c.enantiomer.hands())? {
                println!("wrote {}", f.display());
            }
        }
        Command::IngestCounts { common, counts, time } => {
            let cfg = common.config()?;
            let file = parse_counts(&std::fs::read_to_string(&counts)?)?;
            for hand in common.enantiomer.hands() {
                let trace = scenario::reference_trace(&cfg, hand, time)?;
                let cmp = ingest_counts(&file, &trace, time)?;
                println!("enantiomer {} ({} oracle)", hand.as_str(), cfg.protocol.as_str());
                print!("{}", cmp.to_table());
            }
        }
        Command::DumpPulses { common, samples } => {
            let cfg = common.config()?;
            let csv = scenario::dump_pulses(&cfg, samples)?;
            if common.out.is_some() {
                let path = cfg.output_dir.join(format!("pulses_{}.csv", cfg.protocol.as_str()));
                write(&path, &csv)?;
                println!("wrote {}", path.display());
            } else {
                print!("{csv}");
            }
        }
        Command::MoleculeCheck { common, molecule: name } => {
            let cfg = common.config()?;
            let spec = match name {
                Some(n) => molecule::builtin(&n).ok_or_else(|| {
                    Error::config(
                        "molecule",
                        format!("unknown built-in `{n}`; use `{}` or `{}`", molecule::PRINTED_NAME, molecule::CORRECTED_NAME),
                    )
                })?,
                None => cfg.molecule.resolve()?,
            };
            print!("{}", scenario::molecule_check(&spec, cfg.field.as_ref()).to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
