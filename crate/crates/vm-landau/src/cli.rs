//! Command dispatch, configuration ingestion, and CSV/JSON emission.
//!
//! Outputs are deterministic: numbers are printed with 17 significant digits
//! and no timestamps, so re-running a command with the same configuration
//! yields byte-identical files.

use crate::dispersion::Dispersion;
use crate::equilibrium::{build_equilibrium, Equilibrium, EquilibriumSpec, Kind};
use crate::green::{self, DecayScaling, TimeGrid};
use crate::kernels::KernelTable;
use crate::report;
use crate::solver::{self, ModeInitialData, ProfileKind};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "vm-landau",
    about = "Spectral analysis of the linearized relativistic Vlasov-Maxwell system",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump the reduced kernels kappa(u), q(u) on the quadrature nodes.
    Kernels {
        #[arg(long)]
        equilibrium: PathBuf,
        #[arg(long)]
        dump: PathBuf,
    },
    /// Dispersion curves tau_*, nu_*, lambda_+ and residues over a k-grid.
    Dispersion {
        #[arg(long)]
        equilibrium: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        kmax: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Continuation width past kappa0, as a fraction of kappa0.
        #[arg(long = "delta-frac", default_value_t = 0.1)]
        delta_frac: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Temporal Green functions with the oscillatory/regular split.
    Green {
        #[arg(long)]
        equilibrium: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 200.0)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
        #[arg(long)]
        out: PathBuf,
        /// Also emit a JSON report of fitted decay slopes.
        #[arg(long)]
        report: bool,
    },
    /// Per-mode solve with the kinetic oracle comparison.
    Simulate {
        #[arg(long)]
        equilibrium: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, value_enum, default_value_t = ProfileArg::Kappa)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 100.0)]
        tmax: f64,
        #[arg(long, default_value_t = 5e-4)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = Channel::Both)]
        channel: Channel,
        #[arg(long, default_value_t = 512)]
        n_u: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance suite and emit its JSON report.
    Report {
        #[arg(long)]
        equilibrium: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    G,
    H,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Elec,
    Mag,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileArg {
    Kappa,
    Q,
    Bump,
}

impl From<ProfileArg> for ProfileKind {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Kappa => ProfileKind::Kappa,
            ProfileArg::Q => ProfileKind::Q,
            ProfileArg::Bump => ProfileKind::Bump,
        }
    }
}

/// On-disk configuration: equilibrium plus optional parallelism degree.
#[derive(Debug, Deserialize)]
struct FileConfig {
    kind: String,
    n0: f64,
    #[serde(rename = "M", default)]
    m: Option<f64>,
    #[serde(default)]
    table_path: Option<PathBuf>,
    #[serde(default)]
    threads: Option<usize>,
}

pub fn load_equilibrium(path: &Path) -> Result<(EquilibriumSpec, Option<usize>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: FileConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
    let kind = match cfg.kind.as_str() {
        "maxwellian" => Kind::Maxwellian,
        "powerlaw" => Kind::Powerlaw,
        "tabulated" => Kind::Tabulated,
        other => {
            return Err(Error::Config(format!(
                "unknown equilibrium kind '{other}' (expected maxwellian | powerlaw | tabulated)"
            )))
        }
    };
    let table = match (&cfg.table_path, kind) {
        (Some(p), Kind::Tabulated) => {
            let base = path.parent().unwrap_or(Path::new("."));
            Some(read_table_csv(&base.join(p))?)
        }
        (None, Kind::Tabulated) => {
            return Err(Error::Config("tabulated equilibrium needs table_path".into()))
        }
        _ => None,
    };
    Ok((
        EquilibriumSpec {
            kind,
            n0: cfg.n0,
            m: cfg.m,
            table,
        },
        cfg.threads,
    ))
}

fn read_table_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read table {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let a = parts.next().unwrap_or("").trim();
        let b = parts.next().unwrap_or("").trim();
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(s), Ok(phi)) => rows.push((s, phi)),
            _ if i == 0 => continue, // header row
            _ => {
                return Err(Error::Config(format!(
                    "table {} line {}: expected 's,phi'",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn init_threads(config: Option<usize>) {
    #[cfg(feature = "parallel")]
    {
        let n = std::env::var("VM_LANDAU_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .or(config);
        if let Some(n) = n.filter(|&n| n > 0) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = config;
}

#[derive(Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
    equilibrium_sha256: String,
    tolerances: &'static str,
}

fn metadata(spec: &EquilibriumSpec) -> Metadata {
    let canonical = serde_json::to_string(spec).unwrap_or_default();
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    Metadata {
        tool: "vm-landau",
        version: env!("CARGO_PKG_VERSION"),
        equilibrium_sha256: format!("{:x}", hasher.finalize()),
        tolerances: "root residuals 1e-10/1e-12; kernel identities 1e-8; oracle sup-norm 1e-3",
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Entry point used by the binary. Returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("vm-landau: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Kernels { equilibrium, dump } => {
            let (spec, threads) = load_equilibrium(&equilibrium)?;
            init_threads(threads);
            let eq = build_and_warn(&spec)?;
            let table = KernelTable::build(&eq)?;
            let mut out = String::from("u,kappa,q\n");
            for i in 0..table.nodes.len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt(table.nodes[i]),
                    fmt(table.kappa_vals[i]),
                    fmt(table.q_vals[i])
                ));
            }
            write_file(&dump, &out)
        }
        Command::Dispersion {
            equilibrium,
            kmax,
            n,
            delta_frac,
            out,
        } => {
            let (spec, threads) = load_equilibrium(&equilibrium)?;
            init_threads(threads);
            let eq = build_and_warn(&spec)?;
            let table = KernelTable::build(&eq)?;
            let disp = Dispersion::new(&table);
            let delta = delta_frac * table.kappa0();
            let curves = disp.mode_curves(kmax, n, Some(delta))?;
            let mut body = String::from("k,tau_star,nu_star,re_lambda,im_lambda,re_a,im_a,re_b,im_b\n");
            for i in 0..curves.k_grid.len() {
                body.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    fmt(curves.k_grid[i]),
                    fmt(curves.tau_star[i]),
                    fmt(curves.nu_star[i]),
                    fmt(curves.lambda_elec[i].re),
                    fmt(curves.lambda_elec[i].im),
                    fmt(curves.a_plus[i].re),
                    fmt(curves.a_plus[i].im),
                    fmt(curves.b_plus[i].re),
                    fmt(curves.b_plus[i].im)
                ));
            }
            write_file(&out, &body)?;
            let sidecar = serde_json::json!({
                "kappa0": table.kappa0(),
                "tau0_sq": table.constants.tau0_sq,
                "tau1_sq": table.constants.tau1_sq,
                "q0_sq": table.constants.q0_sq,
                "delta": delta,
                "metadata": metadata(&spec),
            });
            write_file(
                &out.with_extension("json"),
                &serde_json::to_string_pretty(&sidecar).unwrap(),
            )
        }
        Command::Green {
            equilibrium,
            k,
            tmax,
            dt,
            which,
            out,
            report: want_report,
        } => {
            let (spec, threads) = load_equilibrium(&equilibrium)?;
            init_threads(threads);
            let eq = build_and_warn(&spec)?;
            let table = KernelTable::build(&eq)?;
            let disp = Dispersion::new(&table);
            let nu = disp.nu_star(k)?;
            let grid = TimeGrid::for_mode(dt, tmax, k, nu)?;
            let ts = grid.times();
            let want_g = which != Which::H;
            let want_h = which != Which::G;
            let gt = if want_g {
                let mut t = green::resolvent_g(&table, k, grid)?;
                green::decompose(&mut t);
                Some(t)
            } else {
                None
            };
            let ht = if want_h {
                let mut t = green::greens_h(&table, k, grid)?;
                green::decompose(&mut t);
                Some(t)
            } else {
                None
            };
            let mut body =
                String::from("t,re_G,re_G_osc,re_G_reg,re_H,re_H_osc,re_H_reg\n");
            for i in 0..ts.len() {
                let g = gt.as_ref();
                let h = ht.as_ref();
                let pick = |o: Option<&green::GreenTrace>, sel: usize| -> f64 {
                    o.map(|tr| match sel {
                        0 => tr.values[i].re,
                        1 => tr.osc_part[i].re,
                        _ => tr.regular_part[i].re,
                    })
                    .unwrap_or(0.0)
                };
                body.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt(ts[i]),
                    fmt(pick(g, 0)),
                    fmt(pick(g, 1)),
                    fmt(pick(g, 2)),
                    fmt(pick(h, 0)),
                    fmt(pick(h, 1)),
                    fmt(pick(h, 2))
                ));
            }
            write_file(&out, &body)?;
            if want_report {
                let mut fits = serde_json::Map::new();
                if let Some(tr) = &gt {
                    let fit = green::fit_decay(
                        &tr.regular_part,
                        &ts,
                        k,
                        DecayScaling::Kt,
                        (tmax / 4.0, tmax),
                        1e-12,
                    );
                    if let Ok(f) = fit {
                        fits.insert(
                            "electric".into(),
                            serde_json::json!({"slope": f.slope, "constant": f.constant, "r2": f.r2, "partial": f.partial}),
                        );
                    }
                }
                if let Some(tr) = &ht {
                    let fit = green::fit_decay(
                        &tr.regular_part,
                        &ts,
                        k,
                        DecayScaling::K3t,
                        (tmax / 4.0, tmax),
                        1e-12,
                    );
                    if let Ok(f) = fit {
                        fits.insert(
                            "magnetic".into(),
                            serde_json::json!({"slope": f.slope, "constant": f.constant, "r2": f.r2, "partial": f.partial}),
                        );
                    }
                }
                let doc = serde_json::json!({"fits": fits, "metadata": metadata(&spec)});
                write_file(
                    &out.with_extension("json"),
                    &serde_json::to_string_pretty(&doc).unwrap(),
                )?;
            }
            Ok(())
        }
        Command::Simulate {
            equilibrium,
            k,
            profile,
            tmax,
            dt,
            channel,
            n_u,
            out,
        } => {
            let (spec, threads) = load_equilibrium(&equilibrium)?;
            init_threads(threads);
            let eq = build_and_warn(&spec)?;
            let table = KernelTable::build(&eq)?;
            let disp = Dispersion::new(&table);
            let nu = disp.nu_star(k)?;
            let grid = TimeGrid::for_mode(dt, tmax, k, nu)?;
            let data = ModeInitialData::from_profile(&table, k, profile.into());
            let elec = channel != Channel::Mag;
            let mag = channel != Channel::Elec;
            let sol = solver::simulate_mode(&table, &data, grid, n_u, elec, mag)?;
            let zero = num_complex::Complex64::new(0.0, 0.0);
            let mut body =
                String::from("t,re_S,re_rho,re_rho_oracle,abs_discrepancy,re_A,re_A_oracle\n");
            for i in 0..sol.times.len() {
                let s = sol.s.get(i).copied().unwrap_or(zero);
                let rho = sol.rho.get(i).copied().unwrap_or(zero);
                let orho = sol.oracle_rho.get(i).copied().unwrap_or(zero);
                let a = sol.a.get(i).copied().unwrap_or(zero);
                let oa = sol.oracle_a.get(i).copied().unwrap_or(zero);
                let disc = (rho - orho).norm().max((a - oa).norm());
                body.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt(sol.times[i]),
                    fmt(s.re),
                    fmt(rho.re),
                    fmt(orho.re),
                    fmt(disc),
                    fmt(a.re),
                    fmt(oa.re)
                ));
            }
            write_file(&out, &body)?;
            if let Some(rec) = sol.recurrence {
                eprintln!(
                    "predicted velocity-grid recurrence time: {:.3e}{}",
                    rec.t_predicted,
                    rec.t_detected
                        .map(|t| format!(" (detected at {t:.3e})"))
                        .unwrap_or_default()
                );
            }
            Ok(())
        }
        Command::Report { equilibrium, out } => {
            let (spec, threads) = load_equilibrium(&equilibrium)?;
            init_threads(threads);
            let rep = report::run_all(&spec)?;
            report::print_report(&rep);
            let doc = report_document(&spec, &rep);
            let text = serde_json::to_string_pretty(&doc).unwrap();
            match out {
                Some(p) => write_file(&p, &text)?,
                None => println!("{text}"),
            }
            if rep.all_pass {
                Ok(())
            } else {
                Err(Error::Convergence("acceptance criteria failed".into()))
            }
        }
    }
}

/// The report JSON document (shape pinned by schema/report.schema.json).
pub fn report_document(spec: &EquilibriumSpec, rep: &report::Report) -> serde_json::Value {
    serde_json::json!({
        "criteria": rep.criteria,
        "all_pass": rep.all_pass,
        "metadata": metadata(spec),
    })
}

fn build_and_warn(spec: &EquilibriumSpec) -> Result<Equilibrium> {
    let eq = build_equilibrium(spec)?;
    if eq.monotone_warning {
        eprintln!("warning: tabulated profile is not monotonically decreasing");
    }
    Ok(eq)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(content.as_bytes())?;
    Ok(())
}
