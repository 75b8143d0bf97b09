use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wcop_core::classify::{self, ClassifyConfig, CriterionVerdict};
use wcop_core::spectra::{self, SpectrumConfig};
use wcop_core::tol;

use crate::io::{self, MatrixDto, ReportDto, SpectrumDto};
use crate::unit_square;
use crate::verify::{self, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wcop",
    version,
    about = "Weighted conditional expectation operators M_w E M_u"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify an instance: criterion and oracle verdict for every class.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = tol::COMPARE)]
        tol: f64,
        /// Exponent grid, comma separated.
        #[arg(long = "p", value_delimiter = ',', default_values_t = ClassifyConfig::default().p_grid)]
        p: Vec<f64>,
        #[arg(long, default_value_t = tol::MAX_POWER)]
        max_power: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Spectrum, point spectra, spectral radius and iterated Aluthge norms.
    Spectrum {
        file: PathBuf,
        #[arg(long, default_value_t = tol::COMPARE)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write the assembled operator matrix.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Seeded campaign checking every closed form and criterion.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 12)]
        max_points: usize,
        #[arg(long, default_value_t = 4)]
        max_atoms: usize,
        #[arg(long, default_value_t = tol::COMPARE)]
        tol: f64,
        /// Random instances only.
        #[arg(long)]
        no_structured: bool,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Strip statistics of the unit-square example against closed forms.
    #[command(name = "example311")]
    UnitSquare {
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn finish(text: String, json: Option<(PathBuf, String)>, code: u8) -> ExitCode {
    print!("{text}");
    if let Some((path, body)) = json {
        if let Err(e) = std::fs::write(&path, body) {
            return fail(
                EXIT_INVALID,
                format!("cannot write {}: {e}", path.display()),
            );
        }
    }
    ExitCode::from(code)
}

pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Classify {
            file,
            tol,
            p,
            max_power,
            json,
        } => cmd_classify(
            file,
            ClassifyConfig {
                tol,
                p_grid: p,
                max_power,
            },
            json,
        ),
        Command::Spectrum {
            file,
            tol,
            json,
            matrix,
        } => cmd_spectrum(file, tol, json, matrix),
        Command::Verify {
            seed,
            instances,
            max_points,
            max_atoms,
            tol,
            no_structured,
            json,
            inject_fault,
        } => {
            let cfg = RunConfig {
                tol,
                seed,
                instance_count: instances,
                max_points,
                max_atoms,
                structured: !no_structured,
                inject_fault,
                ..RunConfig::default()
            };
            cmd_verify(&cfg, json)
        }
        Command::UnitSquare { grid, json } => cmd_unit_square(grid, json),
    }
}

fn verdict_word(c: CriterionVerdict) -> &'static str {
    match c {
        CriterionVerdict::Holds => "holds",
        CriterionVerdict::Fails => "fails",
        CriterionVerdict::NotApplicable => "n/a",
    }
}

fn cmd_classify(file: PathBuf, cfg: ClassifyConfig, json: Option<PathBuf>) -> ExitCode {
    let op = match io::read_instance(&file) {
        Ok(op) => op,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let report = match classify::classify_all(&op, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "instance {:016x}  n={} atoms={}",
        report.fingerprint,
        op.len(),
        op.num_atoms()
    );
    let _ = writeln!(
        out,
        "{:<28} {:<11} {:>6} {:>9} {:>12}  consistent",
        "class", "kind", "oracle", "criterion", "margin"
    );
    for v in &report.verdicts {
        let class = match v.class.exponent() {
            Some(p) => format!("{}(p={p})", v.class.label()),
            None => v.class.label().to_string(),
        };
        let _ = writeln!(
            out,
            "{:<28} {:<11} {:>6} {:>9} {:>12.3e}  {}",
            class,
            v.kind.label(),
            v.oracle,
            verdict_word(v.criterion),
            v.margin,
            if v.is_consistent() { "yes" } else { "NO" }
        );
    }
    for f in &report.findings {
        let _ = writeln!(out, "{:?} {}: {}", f.kind, f.check, f.detail);
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let code = if report.is_consistent() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    finish(
        out,
        json.map(|p| (p, io::to_json(&ReportDto::from(&report)))),
        code,
    )
}

fn cmd_spectrum(
    file: PathBuf,
    tol: f64,
    json: Option<PathBuf>,
    matrix: Option<PathBuf>,
) -> ExitCode {
    let op = match io::read_instance(&file) {
        Ok(op) => op,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let cfg = SpectrumConfig {
        tol,
        ..SpectrumConfig::default()
    };
    let report = match spectra::spectrum(&op, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    if let Some(path) = matrix {
        if let Err(e) = io::write_json(&path, &MatrixDto::from_matrix(&op.assemble_matrix())) {
            return fail(EXIT_INVALID, e);
        }
    }
    let mut out = String::new();
    let fmt = |z: &wcop_core::Complex64| format!("{:.6}{:+.6}i", z.re, z.im);
    let list = |v: &[wcop_core::Complex64]| v.iter().map(fmt).collect::<Vec<_>>().join(", ");
    let _ = writeln!(out, "eigenvalues: {}", list(&report.eigenvalues));
    let _ = writeln!(out, "ess range E(uw): {}", list(&report.ess_range));
    for e in &report.point_spectrum {
        let _ = writeln!(
            out,
            "point spectrum {} on atoms {:?} (mass {:.6}, eigenvector {})",
            fmt(&e.lambda),
            e.atoms,
            e.mass,
            if e.verified { "found" } else { "missing" }
        );
    }
    let _ = writeln!(
        out,
        "joint point spectrum: {}",
        list(&report.joint_point_spectrum)
    );
    let _ = writeln!(
        out,
        "spectral radius {:.9}  norm {:.9}",
        report.spectral_radius, report.norm
    );
    let _ = writeln!(out, "aluthge norms: {:?}", report.aluthge_norms);
    let _ = writeln!(out, "note: {}", spectra::APPROXIMATE_POINT_NOTE);
    let consistent = report.multiset_match
        && (!report.must_be_singular || report.zero_in_spectrum)
        && report.joint_equality != Some(false);
    if !consistent {
        let _ = writeln!(out, "nonzero spectrum and E(uw) disagree");
    }
    let code = if consistent { EXIT_OK } else { EXIT_VIOLATION };
    finish(
        out,
        json.map(|p| (p, io::to_json(&SpectrumDto::from(&report)))),
        code,
    )
}

fn cmd_verify(cfg: &RunConfig, json: Option<PathBuf>) -> ExitCode {
    let outcome = match verify::cmd_verify(cfg) {
        Ok(o) => o,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} instances ({} structured), seed {}, fixed-point hypotheses met on {}",
        outcome.trials,
        cfg.structured_count(),
        cfg.seed,
        outcome.fixed_point_asserted
    );
    for (name, s) in &outcome.summary {
        let _ = writeln!(
            out,
            "{:<6} {:<48} {:>5}/{:<5} worst {:.3e}",
            if s.failed == 0 { "ok" } else { "FAIL" },
            name,
            s.checked - s.failed,
            s.checked,
            s.worst
        );
    }
    let _ = writeln!(out, "{} violations", outcome.violations.len());
    let code = if outcome.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    finish(out, json.map(|p| (p, io::to_json(&outcome))), code)
}

fn cmd_unit_square(grid: usize, json: Option<PathBuf>) -> ExitCode {
    let report = match unit_square::cmd_unit_square(grid) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let mut out = String::new();
    let d = &report.max_deviation;
    let _ = writeln!(out, "grid {grid}: {} strips", report.strips.len());
    let _ = writeln!(
        out,
        "max deviation from closed forms: E(|u|^2) {:.3e}  E(|w|^2) {:.3e}  |E(uw)|^2 {:.3e}",
        d.eu2, d.ew2, d.euw_sq
    );
    let _ = writeln!(
        out,
        "|E(uw)|^2 - E(|u|^2)E(|w|^2) < 0 on {}/{} strips",
        report.negative_strips,
        report.strips.len()
    );
    let _ = writeln!(out, "claimed: {}", report.claimed_direction);
    let _ = writeln!(
        out,
        "claim reproduced: {}  ({})",
        report.claim_reproduced, report.holder_note
    );
    let _ = writeln!(
        out,
        "spectral radius {:.6} (closed form {:.6}), norm {:.6}",
        report.radius, report.radius_closed, report.norm_formula
    );
    for c in &report.criteria {
        let holds = match c.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "n/a",
        };
        let _ = writeln!(out, "criterion {:<18} {:<11} {}", c.class, c.kind, holds);
    }
    let _ = writeln!(
        out,
        "coarse grid {}: oracle verdicts {}",
        report.coarse_grid,
        report
            .coarse_report
            .verdicts
            .iter()
            .filter(|v| v.kind != "necessary")
            .map(|v| format!("{}={}", v.class, v.oracle))
            .collect::<Vec<_>>()
            .join(" ")
    );
    finish(out, json.map(|p| (p, io::to_json(&report))), EXIT_OK)
}
