//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure (or I/O error), 2 usage error.
//! Data files are byte-stable for identical flags; the sidecar
//! `<out>.manifest.json` carries the timestamp and the output checksum.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::format::{float, texture_csv};
use crate::gauge::{gauge_check, GaugeCheckReport};
use crate::params::{derive_natural, ConfigFile, NaturalParams, PhysicalConfig};
use crate::spectrum::{energy, lll_energy, Branch};
use crate::suite::{run_suite, SuiteOptions};
use crate::texture::{spin_density, superpose, GridSpec, SpinTexture};

pub const THREADS_ENV: &str = "RASHBA_LANDAU_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rashba-landau",
    version,
    about = "Landau levels with Rashba and Zeeman coupling in the symmetric gauge"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spin-split Landau spectrum table.
    Spectrum(SpectrumArgs),
    /// Spin-density texture on a square grid.
    Texture(TextureArgs),
    /// Symmetric vs Landau gauge comparison for s = 1.
    GaugeCheck(GaugeArgs),
    /// Run the oracle suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Physical parameters: natural units first, SI as an optional layer.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamArgs {
    /// LLL energy xi_tilde = 1/2 - g_tilde.
    #[arg(long, conflicts_with = "g_tilde", allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Zeeman ratio g mu B / (hbar omega) [default: 0.1].
    #[arg(long, allow_hyphen_values = true)]
    pub g_tilde: Option<f64>,
    /// Rashba strength alpha / (r hbar omega) [default: 0.3].
    #[arg(long, allow_hyphen_values = true)]
    pub a_tilde: Option<f64>,
    /// Flux density in tesla (SI block).
    #[arg(long)]
    pub b_tesla: Option<f64>,
    /// Effective mass over free-electron mass (SI block).
    #[arg(long)]
    pub mass_ratio: Option<f64>,
    /// Landé g factor (SI block).
    #[arg(long, allow_hyphen_values = true)]
    pub g_factor: Option<f64>,
    /// Rashba coefficient in eV nm (SI block).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_ev_nm: Option<f64>,
    /// Flat key-value file with b_z_tesla, mass_ratio, g_factor, alpha_ev_nm.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub const DEFAULT_G_TILDE: f64 = 0.1;
pub const DEFAULT_A_TILDE: f64 = 0.3;

impl ParamArgs {
    fn si_flags(&self) -> bool {
        self.b_tesla.is_some()
            || self.mass_ratio.is_some()
            || self.g_factor.is_some()
            || self.alpha_ev_nm.is_some()
    }

    /// Resolves the parameter set. `--xi`/`--g-tilde` may override the SI
    /// Zeeman ratio; `--a-tilde` cannot be combined with SI input.
    pub fn resolve(&self) -> Result<NaturalParams> {
        let g_override = self.g_tilde.or(self.xi.map(|xi| 0.5 - xi));
        let si = self.si_flags();
        if si && self.config.is_some() {
            return Err(Error::Usage(
                "give either --config or the SI flags, not both".into(),
            ));
        }
        let cfg =
            if let Some(path) = &self.config {
                Some(ConfigFile::load(path)?.to_config()?)
            } else if si {
                match (
                    self.b_tesla,
                    self.mass_ratio,
                    self.g_factor,
                    self.alpha_ev_nm,
                ) {
                    (Some(b), Some(m), Some(g), Some(a)) => {
                        Some(PhysicalConfig::from_ev_nm(b, m, g, a)?)
                    }
                    _ => return Err(Error::Usage(
                        "the SI block needs all of --b-tesla --mass-ratio --g-factor --alpha-ev-nm"
                            .into(),
                    )),
                }
            } else {
                None
            };
        match cfg {
            Some(cfg) => {
                if self.a_tilde.is_some() {
                    return Err(Error::Usage(
                        "--a-tilde conflicts with SI parameters".into(),
                    ));
                }
                let cfg = match g_override {
                    Some(g) => cfg.with_g_tilde(g),
                    None => cfg,
                };
                derive_natural(&cfg)
            }
            None => Ok(NaturalParams::new(
                g_override.unwrap_or(DEFAULT_G_TILDE),
                self.a_tilde.unwrap_or(DEFAULT_A_TILDE),
            )),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 10)]
    pub s_max: usize,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
    Lll,
}

#[derive(Debug, Clone, Args)]
pub struct TextureArgs {
    /// Landau index [default: 1, or 0 with --branch lll].
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 1, conflicts_with = "weight")]
    pub m: usize,
    /// Superposition weight `m:re:im`; repeatable.
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    pub weight: Vec<(usize, Complex64)>,
    #[arg(long, value_enum, default_value = "plus")]
    pub branch: BranchArg,
    #[arg(long, default_value_t = 6.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// Emit s_i / rho instead of the spin density.
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaugeBranch {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct GaugeArgs {
    #[arg(long, default_value_t = 4.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    /// Series terms K.
    #[arg(long, default_value_t = 40)]
    pub terms: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value = "both")]
    pub branch: GaugeBranch,
    #[command(flatten)]
    pub params: ParamArgs,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Reduced grids (default).
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Acceptance-size grids.
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Negative-control hook: multiply kappa by this factor.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub inject_kappa_scale: f64,
}

fn parse_weight(s: &str) -> std::result::Result<(usize, Complex64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected m:re:im, got `{s}`");
    match parts.as_slice() {
        [m, re, im] => Ok((
            m.parse().map_err(|_| bad())?,
            Complex64::new(
                re.parse().map_err(|_| bad())?,
                im.parse().map_err(|_| bad())?,
            ),
        )),
        [m, re] => Ok((
            m.parse().map_err(|_| bad())?,
            Complex64::new(re.parse().map_err(|_| bad())?, 0.0),
        )),
        _ => Err(bad()),
    }
}

/// Accompanies every output file as `<out>.manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub params: NaturalParams,
    /// SI scale, when the run was given one.
    pub magnetic_length_m: Option<f64>,
    pub cyclotron_energy_mev: Option<f64>,
    pub tool_version: String,
    pub output_file: String,
    pub output_sha256: String,
    pub created_unix_s: u64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(OsString::from).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

struct Emitter<'a> {
    command: &'a str,
    args: &'a [String],
    params: NaturalParams,
}

impl Emitter<'_> {
    fn emit(&self, out: Option<&Path>, data: &str) -> Result<()> {
        match out {
            None => {
                print!("{data}");
                Ok(())
            }
            Some(path) => {
                std::fs::write(path, data)?;
                let manifest = RunManifest {
                    command: self.command.into(),
                    arguments: self.args.to_vec(),
                    params: self.params,
                    magnetic_length_m: self.params.length_to_si(1.0),
                    cyclotron_energy_mev: self.params.energy_to_mev(1.0),
                    tool_version: env!("CARGO_PKG_VERSION").into(),
                    output_file: path
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    output_sha256: sha256_hex(data.as_bytes()),
                    created_unix_s: SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                };
                std::fs::write(
                    manifest_path(path),
                    serde_json::to_string_pretty(&manifest)? + "\n",
                )?;
                Ok(())
            }
        }
    }
}

/// JSON with every float rendered at 17 significant digits.
fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_json(&v, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_json(v: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => out.push_str(&i.to_string()),
            (_, Some(u), _) => out.push_str(&u.to_string()),
            (_, _, Some(f)) => out.push_str(&float(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("string key"));
                out.push(':');
                write_json(item, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub s: usize,
    pub branch: String,
    pub e_hbar_omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_mev: Option<f64>,
}

pub fn spectrum_rows(s_max: usize, p: &NaturalParams) -> Result<Vec<SpectrumRow>> {
    let mut rows = vec![SpectrumRow {
        s: 0,
        branch: "lll".into(),
        e_hbar_omega: lll_energy(p),
        e_mev: p.energy_to_mev(lll_energy(p)),
    }];
    for s in 1..=s_max {
        for b in [Branch::Minus, Branch::Plus] {
            let e = energy(s, b, p)?;
            rows.push(SpectrumRow {
                s,
                branch: match b {
                    Branch::Plus => "plus".into(),
                    Branch::Minus => "minus".into(),
                },
                e_hbar_omega: e,
                e_mev: p.energy_to_mev(e),
            });
        }
    }
    Ok(rows)
}

fn cmd_spectrum(a: &SpectrumArgs, argv: &[String]) -> Result<i32> {
    let p = a.params.resolve()?;
    let rows = spectrum_rows(a.s_max, &p)?;
    let data = match a.output.format {
        Format::Csv => {
            let si = p.has_si_scale();
            let mut out = String::from(if si {
                "s,branch,E_hbar_omega,E_meV\n"
            } else {
                "s,branch,E_hbar_omega\n"
            });
            for r in &rows {
                out.push_str(&format!("{},{},{}", r.s, r.branch, float(r.e_hbar_omega)));
                if let Some(e) = r.e_mev {
                    out.push_str(&format!(",{}", float(e)));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                params: NaturalParams,
                rows: &'a [SpectrumRow],
            }
            to_json(&Doc {
                params: p,
                rows: &rows,
            })?
        }
    };
    Emitter {
        command: "spectrum",
        args: argv,
        params: p,
    }
    .emit(a.output.out.as_deref(), &data)?;
    Ok(EXIT_OK)
}

pub fn texture_from_args(a: &TextureArgs) -> Result<(NaturalParams, SpinTexture)> {
    let p = a.params.resolve()?;
    let (s, branch) = match a.branch {
        BranchArg::Lll => match a.s {
            None | Some(0) => (0, None),
            Some(s) => {
                return Err(Error::Usage(format!(
                    "--branch lll requires --s 0, got --s {s}"
                )))
            }
        },
        BranchArg::Plus | BranchArg::Minus => {
            let s = a.s.unwrap_or(1);
            if s == 0 {
                return Err(Error::Usage("--s 0 is the LLL; use --branch lll".into()));
            }
            (
                s,
                Some(if a.branch == BranchArg::Plus {
                    Branch::Plus
                } else {
                    Branch::Minus
                }),
            )
        }
    };
    let grid = GridSpec::new(a.extent, a.resolution).map_err(|e| Error::Usage(e.to_string()))?;
    let weights = if a.weight.is_empty() {
        vec![(a.m, Complex64::new(1.0, 0.0))]
    } else {
        a.weight.clone()
    };
    let state = superpose(&weights, s, branch, &p).map_err(|e| Error::Usage(e.to_string()))?;
    let t = spin_density(&state, grid)?;
    Ok((p, if a.normalized { t.normalized() } else { t }))
}

fn cmd_texture(a: &TextureArgs, argv: &[String]) -> Result<i32> {
    let (p, t) = texture_from_args(a)?;
    let data = match a.output.format {
        Format::Csv => texture_csv(&t),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                params: NaturalParams,
                grid: GridSpec,
                normalized: bool,
                x: Vec<f64>,
                y: Vec<f64>,
                rho: &'a [f64],
                sx: &'a [f64],
                sy: &'a [f64],
                sz: &'a [f64],
            }
            let pts = t.grid.points();
            to_json(&Doc {
                params: p,
                grid: t.grid,
                normalized: t.normalized,
                x: pts.iter().map(|q| q.0).collect(),
                y: pts.iter().map(|q| q.1).collect(),
                rho: &t.rho,
                sx: &t.sx,
                sy: &t.sy,
                sz: &t.sz,
            })?
        }
    };
    Emitter {
        command: "texture",
        args: argv,
        params: p,
    }
    .emit(a.output.out.as_deref(), &data)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeOutput {
    pub params: NaturalParams,
    pub reports: Vec<GaugeCheckReport>,
    pub passed: bool,
}

fn cmd_gauge_check(a: &GaugeArgs, argv: &[String]) -> Result<i32> {
    let p = a.params.resolve()?;
    let region = GridSpec::new(a.extent, a.resolution).map_err(|e| Error::Usage(e.to_string()))?;
    let branches = match a.branch {
        GaugeBranch::Plus => vec![Branch::Plus],
        GaugeBranch::Minus => vec![Branch::Minus],
        GaugeBranch::Both => vec![Branch::Plus, Branch::Minus],
    };
    let reports = branches
        .into_iter()
        .map(|b| gauge_check(b, &p, region, a.terms, a.tolerance))
        .collect::<Result<Vec<_>>>()?;
    for r in &reports {
        eprintln!("{}", r.summary());
    }
    let passed = reports.iter().all(|r| r.passed);
    let doc = GaugeOutput {
        params: p,
        reports,
        passed,
    };
    Emitter {
        command: "gauge-check",
        args: argv,
        params: p,
    }
    .emit(a.out.as_deref(), &to_json(&doc)?)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_verify(a: &VerifyArgs, argv: &[String]) -> Result<i32> {
    let p = a.params.resolve()?;
    let opts = SuiteOptions {
        quick: !a.full,
        kappa_scale: a.inject_kappa_scale,
        params: p,
    };
    let report = run_suite(&opts)?;
    for c in &report.checks {
        eprintln!(
            "{:<28} {}  value {:.3e}  tol {:.1e}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.value,
            c.tolerance,
            c.detail
        );
    }
    Emitter {
        command: "verify",
        args: argv,
        params: p,
    }
    .emit(a.out.as_deref(), &to_json(&report)?)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Fails only if a pool already exists, which then stays in use.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    init_threads();
    let argv: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, &argv),
        Command::Texture(a) => cmd_texture(a, &argv),
        Command::GaugeCheck(a) => cmd_gauge_check(a, &argv),
        Command::Verify(a) => cmd_verify(a, &argv),
    };
    match result {
        Ok(code) => code,
        Err(
            e
            @ (Error::Usage(_) | Error::InvalidConfig(_) | Error::InvalidGrid(_) | Error::Toml(_)),
        ) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(args: &[&str]) -> Result<NaturalParams> {
        let mut full = vec!["rashba-landau", "spectrum"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Spectrum(a) => a.params.resolve(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn natural_flags_and_defaults() {
        let p = params(&[]).unwrap();
        assert_eq!((p.g_tilde, p.a_tilde), (0.1, 0.3));
        let p = params(&["--xi", "-0.2", "--a-tilde", "0.5"]).unwrap();
        assert!((p.g_tilde - 0.7).abs() < 1e-15);
        assert!(!p.has_si_scale());
    }

    #[test]
    fn si_block_and_conflicts() {
        let si = [
            "--b-tesla",
            "1",
            "--mass-ratio",
            "0.05",
            "--g-factor",
            "-4",
            "--alpha-ev-nm",
            "0.02",
        ];
        let p = params(&si).unwrap();
        assert!(p.has_si_scale());
        assert!((p.g_tilde - (-4.0 * 0.05 / 2.0)).abs() < 1e-15);
        let mut with_a = si.to_vec();
        with_a.extend(["--a-tilde", "0.3"]);
        assert!(matches!(params(&with_a), Err(Error::Usage(_))));
        let mut with_g = si.to_vec();
        with_g.extend(["--g-tilde", "0.25"]);
        assert_eq!(params(&with_g).unwrap().g_tilde, 0.25);
        assert!(matches!(params(&["--b-tesla", "1"]), Err(Error::Usage(_))));
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(
            parse_weight("2:0.5:-1").unwrap(),
            (2, Complex64::new(0.5, -1.0))
        );
        assert_eq!(parse_weight("0:1").unwrap(), (0, Complex64::new(1.0, 0.0)));
        assert!(parse_weight("x:1:2").is_err());
        assert!(parse_weight("1:2:3:4").is_err());
    }

    #[test]
    fn spectrum_rows_small() {
        let rows = spectrum_rows(1, &NaturalParams::new(0.1, 0.0)).unwrap();
        let e: Vec<f64> = rows.iter().map(|r| r.e_hbar_omega).collect();
        assert_eq!(rows.len(), 3);
        assert!(
            (e[0] - 0.4).abs() < 1e-15 && (e[1] - 0.6).abs() < 1e-15 && (e[2] - 1.4).abs() < 1e-15
        );
        assert_eq!(rows[1].branch, "minus");
    }

    #[test]
    fn json_floats_use_fixed_digits() {
        let s = to_json(&serde_json::json!({"a": 0.1, "b": [1, 2.5], "c": null})).unwrap();
        assert_eq!(
            s,
            "{\"a\":1.0000000000000001e-1,\"b\":[1,2.5000000000000000e0],\"c\":null}\n"
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("/tmp/out/tex.csv")),
            PathBuf::from("/tmp/out/tex.csv.manifest.json")
        );
    }
}
