//! The `fusewave` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 I/O or parse error,
//! 3 mathematical precondition violation (with a diagnostic JSON on stdout).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::{
    complement_by_projection, frame_bounds, fuse, fusable, minimal_complement, canonical_tight,
    FrameDiagnostics, GeneratorSet,
};
use crate::io::{
    generators_to_json, load_generators, load_mra, sets_csv, spectrum_csv, time_samples_csv,
    write_csv, write_json,
};
use crate::mra::{Mra, DEFAULT_DEPTH};
use crate::spectral::{CircleGrid, DEFAULT_GRID, DEFAULT_PERIODS};
use crate::wavelet::{build_wavelet, BuildParams, Tolerances, WaveletBuildResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fusewave", version, about = "Wavelets by multiplier fusion and frames of integer translates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Built-in analysis (haar, db2, db4, shannon) or file:PATH to a filter JSON.
    #[arg(long, default_value = "haar")]
    pub filter: String,
    /// Number of grid points on [0, 1); a power of two.
    #[arg(long = "grid-n", default_value_t = DEFAULT_GRID)]
    pub grid_n: usize,
    /// Integer shifts kept on each side when summing over the line.
    #[arg(long, default_value_t = DEFAULT_PERIODS)]
    pub periods: usize,
    /// Factors in the cascade product.
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    /// Either one tolerance for grid residuals, or three comma-separated
    /// values: coefficient, grid, quadrature.
    #[arg(long, value_delimiter = ',', num_args = 1..=3)]
    pub tol: Vec<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the wavelet of an analysis and write spectrum, sets and report.
    Build {
        #[command(flatten)]
        common: Common,
        /// Also write time-domain samples of the wavelet.
        #[arg(long)]
        emit_time_samples: bool,
    },
    /// Build and verify, printing the report without writing files.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Frame bounds and multiplicity of a generator set.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// Generator JSON file.
        generators: PathBuf,
        /// Write the canonical normalized tight generators to OUT/tightened.json.
        #[arg(long)]
        tighten: bool,
    },
    /// Fuse two generators and compare frame bounds before and after. With
    /// --out, the fused set is written to OUT/fused.json.
    FuseDemo {
        #[command(flatten)]
        common: Common,
        generators: PathBuf,
        i: usize,
        j: usize,
    },
    /// Complementary collection for a subspace generated by SUBSPACE inside
    /// the space generated by GENERATORS. With --out, the complement is
    /// written to OUT/complement.json.
    Complement {
        #[command(flatten)]
        common: Common,
        generators: PathBuf,
        /// Generator file for the subspace; omitted means the zero subspace.
        #[arg(long)]
        subspace: Option<PathBuf>,
        /// Use the least-size normalized tight complement instead of projecting.
        #[arg(long)]
        minimal: bool,
    },
}

/// Validated settings shared by all commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub filter_source: String,
    pub grid: CircleGrid,
    pub periods: usize,
    pub depth: usize,
    pub tolerances: Tolerances,
    /// Output directory; commands that always write default to `.`.
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_common(c: &Common) -> Result<Self> {
        let grid = CircleGrid::new(c.grid_n)?;
        if c.periods == 0 {
            return Err(Error::InvalidPeriods);
        }
        if c.depth == 0 {
            return Err(Error::Parse("depth must be at least 1".into()));
        }
        let defaults = Tolerances::default();
        let tolerances = match c.tol.as_slice() {
            [] => defaults,
            [grid] => Tolerances { grid: *grid, ..defaults },
            [coef, grid, quad] => Tolerances {
                coef: *coef,
                grid: *grid,
                quad: *quad,
            },
            _ => return Err(Error::Parse("--tol takes one or three values".into())),
        };
        tolerances.validate()?;
        Ok(Self {
            filter_source: c.filter.clone(),
            grid,
            periods: c.periods,
            depth: c.depth,
            tolerances,
            output_dir: c.out.clone(),
        })
    }

    fn mra(&self) -> Result<Mra> {
        load_mra(&self.filter_source, self.depth)
    }

    fn ensure_out(&self) -> Result<&Path> {
        let dir = self.output_dir.as_deref().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        Ok(dir)
    }
}

/// Outcome of a command: exit status and the JSON printed to stdout.
pub struct Outcome {
    pub code: i32,
    pub output: Value,
}

pub fn diagnostics_json(d: &FrameDiagnostics) -> Value {
    let hist: BTreeMap<String, usize> = d
        .multiplicity_histogram()
        .into_iter()
        .map(|(m, c)| (m.to_string(), c))
        .collect();
    json!({
        "A": d.lower_bound,
        "B": d.upper_bound,
        "is_tight": d.is_tight,
        "is_normalized_tight": d.is_normalized_tight,
        "multiplicity_histogram": hist,
        "fiberized_extension": d.fiberized_extension,
    })
}

pub fn report_json(r: &WaveletBuildResult, cfg: &RunConfig) -> Value {
    let v = &r.verification;
    let e_and_f = r.e.intersection(&r.f_set);
    let e_or_f = r.e.union(&r.f_set);
    json!({
        "filter": r.name,
        "grid_n": cfg.grid.len(),
        "periods": cfg.periods,
        "depth": cfg.depth,
        "tolerances": cfg.tolerances,
        "periodization_residual": v.periodization_residual,
        "v0_orthogonality_residual": v.v0_orthogonality_residual,
        "v1_membership_residual": v.v1_membership_residual,
        "translate_gram_residual": v.translate_gram_residual,
        "used_half_shift_shortcut": r.used_half_shift_shortcut,
        "shortcut_discrepancy": r.shortcut_discrepancy,
        "premise_residual": r.premise_residual,
        "tie_count": r.tie_count,
        "coefficient_verification": r.coefficient_verification,
        "psi_coefficients": r.psi_coefficients.as_ref().map(|c| json!({
            "offset": c.0.offset(),
            "coeffs": c.0.values().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        })),
        "sets": {
            "E_measure": r.e.measure(),
            "F_measure": r.f_set.measure(),
            "intersection_measure": e_and_f.measure(),
            "union_measure": e_or_f.measure(),
        },
        "frame_diagnostics": {
            "psi": diagnostics_json(&r.psi_diagnostics),
            "detail_pair": diagnostics_json(&r.detail_diagnostics),
        },
        "passed": r.passed(&cfg.tolerances),
    })
}

fn cmd_build(cfg: &RunConfig, emit_time_samples: bool, write: bool) -> Result<Outcome> {
    let mra = cfg.mra()?;
    let params = BuildParams {
        grid: cfg.grid,
        periods: cfg.periods,
        tolerances: cfg.tolerances,
        time_samples: emit_time_samples,
    };
    let result = build_wavelet(&mra, &params)?;
    let report = report_json(&result, cfg);
    if write {
        let out = cfg.ensure_out()?;
        write_csv(&out.join("spectrum.csv"), &spectrum_csv(&result, cfg.grid)?)?;
        write_csv(&out.join("sets.csv"), &sets_csv(&result))?;
        if let Some(samples) = &result.psi_samples {
            write_csv(&out.join("time_samples.csv"), &time_samples_csv(samples))?;
        }
        write_json(&out.join("report.json"), &report)?;
    }
    let code = if result.passed(&cfg.tolerances) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    };
    Ok(Outcome { code, output: report })
}

fn load(cfg: &RunConfig, path: &Path) -> Result<GeneratorSet> {
    let mra = cfg.mra()?;
    load_generators(path, &mra, cfg.grid, cfg.periods)
}

fn cmd_diagnose(cfg: &RunConfig, path: &Path, tighten: bool) -> Result<Outcome> {
    let gens = load(cfg, path)?;
    let diag = frame_bounds(&gens, cfg.tolerances.grid)?;
    let mut output = diagnostics_json(&diag);
    if tighten {
        let tight = canonical_tight(&gens)?;
        let after = frame_bounds(&tight, cfg.tolerances.grid)?;
        let target = cfg.ensure_out()?.join("tightened.json");
        fs::write(&target, generators_to_json(&tight)?)?;
        output["tightened"] = json!({
            "path": target.display().to_string(),
            "diagnostics": diagnostics_json(&after),
        });
    }
    Ok(Outcome {
        code: EXIT_OK,
        output,
    })
}

fn cmd_fuse_demo(cfg: &RunConfig, path: &Path, i: usize, j: usize) -> Result<Outcome> {
    let gens = load(cfg, path)?;
    let tol = cfg.tolerances.grid;
    let before = frame_bounds(&gens, tol)?;
    let check = fusable(&gens, i, j)?;
    let fused = fuse(&gens, i, j)?;
    let after = frame_bounds(&fused.generators, tol)?;
    let (a, b) = (before.lower_bound, before.upper_bound);
    let verdict = after.lower_bound >= a / 2.0 - tol && after.upper_bound <= 2.0 * b + tol;
    if cfg.output_dir.is_some() {
        let out = cfg.ensure_out()?;
        fs::write(out.join("fused.json"), generators_to_json(&fused.generators)?)?;
    }
    Ok(Outcome {
        code: EXIT_OK,
        output: json!({
            "fusable": check.fusable,
            "violating_measure": check.violating_measure,
            "pair": [i, j],
            "fused_index": fused.fused_index,
            "first_set_measure": fused.first_set.measure(),
            "before": diagnostics_json(&before),
            "after": diagnostics_json(&after),
            "sandwich": [a / 2.0, 2.0 * b],
            "within [A/2, 2B]": verdict,
        }),
    })
}

fn cmd_complement(
    cfg: &RunConfig,
    path: &Path,
    subspace: Option<&Path>,
    minimal: bool,
) -> Result<Outcome> {
    let w = load(cfg, path)?;
    let y = match subspace {
        Some(p) => load(cfg, p)?,
        None => GeneratorSet::empty(cfg.grid, cfg.periods),
    };
    let tol = cfg.tolerances.grid;
    let mut output = json!({ "method": if minimal { "minimal" } else { "projection" } });
    let x = if minimal {
        let m = minimal_complement(&w, &y)?;
        output["k"] = json!(m.k);
        output["support_measures"] = json!(m.supports.iter().map(|s| s.measure()).collect::<Vec<_>>());
        m.generators
    } else {
        let c = complement_by_projection(&w, &y)?;
        output["inconsistent_measure"] = json!(c.inconsistent_measure);
        c.generators
    };
    output["count"] = json!(x.len());
    output["diagnostics"] = match frame_bounds(&x, tol) {
        Ok(d) => diagnostics_json(&d),
        Err(Error::EmptySpan) => Value::Null,
        Err(e) => return Err(e),
    };
    if !x.is_empty() && cfg.output_dir.is_some() {
        let out = cfg.ensure_out()?;
        fs::write(out.join("complement.json"), generators_to_json(&x)?)?;
    }
    Ok(Outcome {
        code: EXIT_OK,
        output,
    })
}

fn error_outcome(e: &Error) -> Outcome {
    if e.is_precondition() {
        let mut output = json!({
            "status": "precondition_violation",
            "error": e.to_string(),
        });
        match e {
            Error::NotFusable { i, j, measure } => {
                output["pair"] = json!([i, j]);
                output["violating_measure"] = json!(measure);
            }
            Error::IllConditioned { lower, eps } => {
                output["lower_bound"] = json!(lower);
                output["threshold"] = json!(eps);
            }
            _ => {}
        }
        Outcome {
            code: EXIT_PRECONDITION,
            output,
        }
    } else {
        Outcome {
            code: EXIT_INPUT,
            output: json!({ "status": "input_error", "error": e.to_string() }),
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = (|| -> Result<Outcome> {
        match &cli.command {
            Command::Build {
                common,
                emit_time_samples,
            } => cmd_build(&RunConfig::from_common(common)?, *emit_time_samples, true),
            Command::Verify { common } => cmd_build(&RunConfig::from_common(common)?, false, false),
            Command::Diagnose {
                common,
                generators,
                tighten,
            } => cmd_diagnose(&RunConfig::from_common(common)?, generators, *tighten),
            Command::FuseDemo {
                common,
                generators,
                i,
                j,
            } => cmd_fuse_demo(&RunConfig::from_common(common)?, generators, *i, *j),
            Command::Complement {
                common,
                generators,
                subspace,
                minimal,
            } => cmd_complement(
                &RunConfig::from_common(common)?,
                generators,
                subspace.as_deref(),
                *minimal,
            ),
        }
    })();
    result.unwrap_or_else(|e| error_outcome(&e))
}

/// Parses arguments, runs the command, prints its JSON and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let outcome = execute(&cli);
    let text = serde_json::to_string_pretty(&outcome.output).unwrap_or_default();
    if outcome.code == EXIT_INPUT {
        let _ = writeln!(stderr, "{text}");
    } else {
        let _ = writeln!(stdout, "{text}");
    }
    outcome.code
}
