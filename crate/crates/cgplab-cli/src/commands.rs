//! Subcommand dispatch and result serialization.
//!
//! Every scalar command prints one JSON result document on stdout with
//! sorted keys and shortest-round-trip floats, so identical invocations
//! produce byte-identical output. `susceptibility` prints CSV instead.
//! Exit codes: 0 success, 2 input validation failure (with a
//! machine-readable error object on stdout), 1 internal error, 64 usage
//! errors (usage text on stderr).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use cgplab_core::cgp::{cgp_unital, cgp_unitary, estimate_cgp, fourier_unitary, haar_unitary};
use cgplab_core::grassmann::{
    dfs_distance, masa_distance, masa_distance_commutator, masa_distance_superop, overlap_matrix,
    phi_measure,
};
use cgplab_core::linalg::{ComplexMatrix, Tolerance};
use cgplab_core::mori::Mori;
use cgplab_core::qubit::{qubit_cgp, qubit_dfs, qubit_distance, BlochVector};
use cgplab_core::{coherence, sweep, Error as CoreError, KrausChannel};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::io::{digest, ChannelDocument, MatrixDocument, PathDocument};

#[derive(Parser)]
#[command(
    name = "cgplab",
    version,
    about = "Coherence generating power and MASA geometry toolkit"
)]
struct Cli {
    /// Tolerance for structural validators (unitarity, hermiticity)
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_structural: f64,
    /// Tolerance for value comparisons
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_equality: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence generating power of a unitary or Kraus channel
    #[command(group = ArgGroup::new("map").required(true).multiple(false))]
    Cgp {
        /// JSON matrix file with the unitary
        #[arg(long, group = "map")]
        unitary: Option<PathBuf>,
        /// JSON channel file with a Kraus operator list
        #[arg(long, group = "map")]
        channel: Option<PathBuf>,
        /// JSON matrix file with the reference frame (unitary columns)
        #[arg(long)]
        basis: PathBuf,
    },
    /// Monte-Carlo estimate of the coherence generating power
    #[command(group = ArgGroup::new("map").required(true).multiple(false))]
    EstimateCgp {
        #[arg(long, group = "map")]
        unitary: Option<PathBuf>,
        #[arg(long, group = "map")]
        channel: Option<PathBuf>,
        #[arg(long)]
        basis: PathBuf,
        /// Number of sampled incoherent states (>= 2)
        #[arg(long)]
        samples: usize,
        /// RNG seed; falls back to CGPLAB_SEED, then 0
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; the result depends only on (seed, workers)
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Coherence of a state with respect to a basis
    Coherence {
        /// JSON matrix file with the density matrix
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        basis: PathBuf,
    },
    /// Distance between the MASAs of two bases
    Distance {
        #[arg(long)]
        basis_a: PathBuf,
        #[arg(long)]
        basis_b: PathBuf,
        /// Evaluation route; all three agree within 1e-10
        #[arg(long, value_enum, default_value_t = DistanceMethod::Closed)]
        method: DistanceMethod,
    },
    /// Overlap matrix of squared frame overlaps between two bases
    Overlap {
        #[arg(long)]
        basis_a: PathBuf,
        #[arg(long)]
        basis_b: PathBuf,
    },
    /// Projective pull-back distance between the MASAs of two bases
    Dfs {
        #[arg(long)]
        basis_a: PathBuf,
        #[arg(long)]
        basis_b: PathBuf,
    },
    /// Additive generating-power measure of a unitary
    Phi {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        basis: PathBuf,
    },
    /// Susceptibility sweep along a Hamiltonian path (CSV on stdout)
    Susceptibility {
        /// JSON path file: {"dim", "nodes": [{"t", "H"}...], "h", "step"}
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Closed-form qubit quantities
    Qubit {
        #[command(subcommand)]
        verb: QubitVerb,
    },
    /// Sample a Haar-random unitary
    Haar {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The discrete Fourier unitary
    Fourier {
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Subcommand)]
enum QubitVerb {
    /// MASA distance between two Bloch vectors
    Distance {
        /// Unit Bloch vector as x,y,z
        #[arg(long)]
        n: String,
        /// Second unit Bloch vector as x,y,z
        #[arg(long = "n-tilde")]
        n_tilde: String,
    },
    /// Generating power of the polar rotation by theta
    Cgp {
        #[arg(long)]
        theta: f64,
    },
    /// Pull-back distance for Bloch angle psi in [0, pi]
    Dfs {
        #[arg(long)]
        psi: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceMethod {
    Closed,
    Superop,
    Commutator,
}

/// A command failure carrying the exit code and a machine-readable kind.
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn validation(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: kind.into(),
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let (kind, code) = match &e {
            CoreError::NonConvergence { .. } => ("non_convergence", 1),
            CoreError::NotSquare { .. } => ("not_square", 2),
            CoreError::ShapeMismatch { .. } => ("shape_mismatch", 2),
            CoreError::DimMismatch { .. } => ("dim_mismatch", 2),
            CoreError::BadEntryCount { .. } => ("bad_entry_count", 2),
            CoreError::NonFinite { .. } => ("non_finite", 2),
            CoreError::NotUnitary { .. } => ("not_unitary", 2),
            CoreError::NotHermitian { .. } => ("not_hermitian", 2),
            CoreError::NotDensity { .. } => ("not_density", 2),
            CoreError::DegenerateSpectrum { .. } => ("degenerate_spectrum", 2),
            CoreError::DimOverCap { .. } => ("dim_over_cap", 2),
            CoreError::InvalidTolerance { .. } => ("invalid_tolerance", 2),
            CoreError::NonUnitBloch { .. } => ("non_unit_bloch", 2),
            CoreError::OutOfRange { .. } => ("out_of_range", 2),
            CoreError::InvalidPath { .. } => ("invalid_path", 2),
            CoreError::OutOfDomain { .. } => ("out_of_domain", 2),
            CoreError::LevelTrackingAmbiguous { .. } => ("level_tracking_ambiguous", 2),
            CoreError::InvalidChannel { .. } => ("invalid_channel", 2),
            CoreError::DetAboveOne { .. } => ("det_above_one", 1),
            CoreError::TooFewSamples { .. } => ("too_few_samples", 2),
        };
        Failure {
            code,
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

/// Parse and execute `argv` (including the program name); returns the
/// process exit code after printing results or errors.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    64
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(failure) => {
            let doc = json!({
                "error": {
                    "kind": failure.kind,
                    "message": failure.message,
                }
            });
            println!("{doc}");
            failure.code
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let tol = Tolerance::new(cli.tol_structural, cli.tol_equality).map_err(Failure::from)?;
    match cli.command {
        Command::Cgp {
            unitary,
            channel,
            basis,
        } => {
            let (basis_mori, basis_digest) = load_basis(&basis, &tol)?;
            let mut inputs = Map::new();
            inputs.insert("basis".into(), Value::String(basis_digest));
            let value = match (unitary, channel) {
                (Some(file), None) => {
                    let (u, dig) = load_matrix(&file)?;
                    inputs.insert("unitary".into(), Value::String(dig));
                    cgp_unitary(&u, &basis_mori, &tol).map_err(Failure::from)?
                }
                (None, Some(file)) => {
                    let (t, dig) = load_channel(&file)?;
                    inputs.insert("channel".into(), Value::String(dig));
                    warn_if_not_unital(&t, &tol);
                    cgp_unital(&t, &basis_mori).map_err(Failure::from)?
                }
                _ => unreachable!("clap enforces the map group"),
            };
            emit("cgp", inputs, number(value), None, None, &tol);
            Ok(())
        }
        Command::EstimateCgp {
            unitary,
            channel,
            basis,
            samples,
            seed,
            workers,
        } => {
            let (basis_mori, basis_digest) = load_basis(&basis, &tol)?;
            let seed = resolve_seed(seed)?;
            let mut inputs = Map::new();
            inputs.insert("basis".into(), Value::String(basis_digest));
            inputs.insert("samples".into(), Value::from(samples));
            inputs.insert("workers".into(), Value::from(workers));
            let t = match (unitary, channel) {
                (Some(file), None) => {
                    let (u, dig) = load_matrix(&file)?;
                    inputs.insert("unitary".into(), Value::String(dig));
                    KrausChannel::unitary(&u, &tol).map_err(Failure::from)?
                }
                (None, Some(file)) => {
                    let (t, dig) = load_channel(&file)?;
                    inputs.insert("channel".into(), Value::String(dig));
                    warn_if_not_unital(&t, &tol);
                    t
                }
                _ => unreachable!("clap enforces the map group"),
            };
            let est =
                estimate_cgp(&t, &basis_mori, samples, seed, workers).map_err(Failure::from)?;
            emit(
                "estimate-cgp",
                inputs,
                number(est.mean),
                Some(est.stderr),
                Some(est.seed),
                &tol,
            );
            Ok(())
        }
        Command::Coherence { state, basis } => {
            let (basis_mori, basis_digest) = load_basis(&basis, &tol)?;
            let (rho, state_digest) = load_matrix(&state)?;
            let value = coherence(&rho, &basis_mori, &tol).map_err(Failure::from)?;
            let mut inputs = Map::new();
            inputs.insert("basis".into(), Value::String(basis_digest));
            inputs.insert("state".into(), Value::String(state_digest));
            emit("coherence", inputs, number(value), None, None, &tol);
            Ok(())
        }
        Command::Distance {
            basis_a,
            basis_b,
            method,
        } => {
            let (a, dig_a) = load_basis(&basis_a, &tol)?;
            let (b, dig_b) = load_basis(&basis_b, &tol)?;
            let value = match method {
                DistanceMethod::Closed => masa_distance(&a, &b),
                DistanceMethod::Superop => masa_distance_superop(&a, &b),
                DistanceMethod::Commutator => masa_distance_commutator(&a, &b),
            }
            .map_err(Failure::from)?;
            let mut inputs = Map::new();
            inputs.insert("basis-a".into(), Value::String(dig_a));
            inputs.insert("basis-b".into(), Value::String(dig_b));
            inputs.insert(
                "method".into(),
                Value::String(
                    match method {
                        DistanceMethod::Closed => "closed",
                        DistanceMethod::Superop => "superop",
                        DistanceMethod::Commutator => "commutator",
                    }
                    .into(),
                ),
            );
            emit("distance", inputs, number(value), None, None, &tol);
            Ok(())
        }
        Command::Overlap { basis_a, basis_b } => {
            let (a, dig_a) = load_basis(&basis_a, &tol)?;
            let (b, dig_b) = load_basis(&basis_b, &tol)?;
            let overlap = overlap_matrix(&a, &b).map_err(Failure::from)?;
            let doc = MatrixDocument::from_matrix(&overlap.to_complex());
            let mut inputs = Map::new();
            inputs.insert("basis-a".into(), Value::String(dig_a));
            inputs.insert("basis-b".into(), Value::String(dig_b));
            let value = serde_json::to_value(doc).expect("matrix document serializes");
            emit("overlap", inputs, value, None, None, &tol);
            Ok(())
        }
        Command::Dfs { basis_a, basis_b } => {
            let (a, dig_a) = load_basis(&basis_a, &tol)?;
            let (b, dig_b) = load_basis(&basis_b, &tol)?;
            let value = dfs_distance(&a, &b).map_err(Failure::from)?;
            let mut inputs = Map::new();
            inputs.insert("basis-a".into(), Value::String(dig_a));
            inputs.insert("basis-b".into(), Value::String(dig_b));
            emit("dfs", inputs, number(value), None, None, &tol);
            Ok(())
        }
        Command::Phi { unitary, basis } => {
            let (basis_mori, basis_digest) = load_basis(&basis, &tol)?;
            let (u, dig) = load_matrix(&unitary)?;
            let value = phi_measure(&u, &basis_mori, &tol).map_err(Failure::from)?;
            let mut inputs = Map::new();
            inputs.insert("basis".into(), Value::String(basis_digest));
            inputs.insert("unitary".into(), Value::String(dig));
            emit("phi", inputs, number(value), None, None, &tol);
            Ok(())
        }
        Command::Susceptibility { path, workers } => {
            let bytes = read_file(&path)?;
            let doc: PathDocument = serde_json::from_slice(&bytes)
                .map_err(|e| Failure::validation("parse", format!("{}: {e}", path.display())))?;
            let ham_path = doc
                .to_path(&tol)
                .map_err(|msg| Failure::validation("invalid_path", msg))?;
            let samples = sweep(&ham_path, doc.h, doc.step, workers).map_err(Failure::from)?;
            let mut header = String::from("t");
            for i in 0..doc.dim {
                header.push_str(&format!(",chi_{i}"));
            }
            header.push_str(",speed,fs_speed");
            println!("{header}");
            for sample in samples {
                let mut line = format!("{}", sample.t);
                for chi in &sample.chi {
                    line.push_str(&format!(",{chi}"));
                }
                line.push_str(&format!(",{},{}", sample.speed, sample.fs_speed));
                println!("{line}");
            }
            Ok(())
        }
        Command::Qubit { verb } => {
            match verb {
                QubitVerb::Distance { n, n_tilde } => {
                    let a = parse_bloch(&n)?;
                    let b = parse_bloch(&n_tilde)?;
                    let mut inputs = Map::new();
                    inputs.insert("n".into(), bloch_value(&a));
                    inputs.insert("n-tilde".into(), bloch_value(&b));
                    emit(
                        "qubit distance",
                        inputs,
                        number(qubit_distance(&a, &b)),
                        None,
                        None,
                        &tol,
                    );
                }
                QubitVerb::Cgp { theta } => {
                    if !theta.is_finite() {
                        return Err(Failure::validation(
                            "out_of_range",
                            format!("theta must be finite, got {theta}"),
                        ));
                    }
                    let mut inputs = Map::new();
                    inputs.insert("theta".into(), number(theta));
                    emit(
                        "qubit cgp",
                        inputs,
                        number(qubit_cgp(theta)),
                        None,
                        None,
                        &tol,
                    );
                }
                QubitVerb::Dfs { psi } => {
                    let value = qubit_dfs(psi).map_err(Failure::from)?;
                    let mut inputs = Map::new();
                    inputs.insert("psi".into(), number(psi));
                    emit("qubit dfs", inputs, number(value), None, None, &tol);
                }
            }
            Ok(())
        }
        Command::Haar { dim, seed } => {
            if dim == 0 {
                return Err(Failure::validation("out_of_range", "dim must be >= 1"));
            }
            let seed = resolve_seed(seed)?;
            let u = haar_unitary(dim, seed);
            let mut inputs = Map::new();
            inputs.insert("dim".into(), Value::from(dim));
            let value =
                serde_json::to_value(MatrixDocument::from_matrix(&u)).expect("matrix serializes");
            emit("haar", inputs, value, None, Some(seed), &tol);
            Ok(())
        }
        Command::Fourier { dim } => {
            if dim == 0 {
                return Err(Failure::validation("out_of_range", "dim must be >= 1"));
            }
            let u = fourier_unitary(dim);
            let mut inputs = Map::new();
            inputs.insert("dim".into(), Value::from(dim));
            let value =
                serde_json::to_value(MatrixDocument::from_matrix(&u)).expect("matrix serializes");
            emit("fourier", inputs, value, None, None, &tol);
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::validation("io", format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<(ComplexMatrix, String), Failure> {
    let bytes = read_file(path)?;
    let doc: MatrixDocument = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::validation("parse", format!("{}: {e}", path.display())))?;
    let matrix = doc
        .to_matrix()
        .map_err(|msg| Failure::validation("bad_matrix", format!("{}: {msg}", path.display())))?;
    Ok((matrix, digest(&bytes)))
}

fn load_basis(path: &Path, tol: &Tolerance) -> Result<(Mori, String), Failure> {
    let (frame, dig) = load_matrix(path)?;
    let basis = Mori::from_frame(frame, tol).map_err(Failure::from)?;
    Ok((basis, dig))
}

fn load_channel(path: &Path) -> Result<(KrausChannel, String), Failure> {
    let bytes = read_file(path)?;
    let doc: ChannelDocument = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::validation("parse", format!("{}: {e}", path.display())))?;
    let channel = doc.to_channel().map_err(|msg| {
        Failure::validation("invalid_channel", format!("{}: {msg}", path.display()))
    })?;
    Ok((channel, digest(&bytes)))
}

fn warn_if_not_unital(channel: &KrausChannel, tol: &Tolerance) {
    if !channel.is_unital(tol) {
        eprintln!(
            "warning: channel is not unital; the generating-power formula assumes unitality \
             and the value is best-effort"
        );
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("CGPLAB_SEED") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            Failure::validation(
                "invalid_seed",
                format!("CGPLAB_SEED is not a u64: {text:?}"),
            )
        }),
        Err(_) => Ok(0),
    }
}

fn parse_bloch(text: &str) -> Result<BlochVector, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::validation(
            "bad_bloch",
            format!("expected x,y,z, got {text:?}"),
        ));
    }
    let mut coords = [0.0f64; 3];
    for (slot, part) in coords.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| Failure::validation("bad_bloch", format!("not a number: {part:?}")))?;
    }
    BlochVector::new(coords[0], coords[1], coords[2]).map_err(Failure::from)
}

fn bloch_value(v: &BlochVector) -> Value {
    Value::Array(vec![number(v.x), number(v.y), number(v.z)])
}

/// Finite floats become JSON numbers; the one legitimately infinite value
/// (the additive measure on singular overlaps) becomes the string "inf".
fn number(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String("inf".into()),
    }
}

fn emit(
    command: &str,
    inputs: Map<String, Value>,
    value: Value,
    stderr: Option<f64>,
    seed: Option<u64>,
    tol: &Tolerance,
) {
    let mut doc = Map::new();
    doc.insert("command".into(), Value::String(command.into()));
    doc.insert("inputs".into(), Value::Object(inputs));
    doc.insert("value".into(), value);
    if let Some(se) = stderr {
        doc.insert("stderr".into(), number(se));
    }
    if let Some(seed) = seed {
        doc.insert("seed".into(), Value::from(seed));
    }
    doc.insert(
        "tolerances".into(),
        json!({
            "structural": tol.structural,
            "equality": tol.equality,
        }),
    );
    println!("{}", Value::Object(doc));
}
