//! `siclab`: command-line front end. Every command prints a JSON certificate
//! to stdout (or `--out`) and a short table to stderr unless `--quiet`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! or input errors.

mod cert;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use cert::Certificate;
use siclab::clifford::{check_conjugation, metaplectic_unitary, projective_order, sym_order, zauner_matrix};
use siclab::quadfield::class_number;
use siclab::rayclass::{quotient_certificate, ray_class_order};
use siclab::sic::{
    appendix19_certificate, centralizer_order, normalized_overlaps, overlap_table, search_fiducial, stabilizer_search,
    verify_sic, ENUMERATION_BOUND, STABILIZER_TOLERANCE,
};
use siclab::towers::{dims_for_radicand, radicand_for_dim, unit_order_law};
use siclab::weyl::check_heisenberg;
use siclab::{d_prime, Error, Fiducial, QuadField, RayModulus, SearchOptions, Symmetry, ZaunerKind};

#[derive(Parser)]
#[command(name = "siclab", version, about = "Quadratic-field towers, ray class orders and SIC fiducials")]
struct Cli {
    /// Suppress the human-readable table on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions d_1..d_r sharing the field Q(sqrt D).
    Tower {
        #[arg(long = "D")]
        radicand: u64,
        #[arg(long, default_value_t = 4)]
        max_r: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Square-free radicand D for a dimension d.
    #[command(name = "dim2D")]
    Dim2D {
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Order of u_D modulo d_r' against 3r d_r'/d_r.
    UnitOrder {
        #[arg(long = "D")]
        radicand: u64,
        #[arg(long, default_value_t = 6)]
        max_r: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Ray class orders for d' with each set of real places.
    Rayclass {
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive displacement-operator identities.
    Heisenberg {
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Zauner matrix, its orders and the metaplectic conjugation law.
    Clifford {
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value_t = Kind::Fz)]
        kind: Kind,
        #[command(flatten)]
        output: Output,
    },
    /// SIC fiducial search and checks.
    Sic {
        #[command(subcommand)]
        command: SicCommand,
    },
    /// Exact reciprocity and a high-precision root check for the d = 19 units.
    Appendix19 {
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum SicCommand {
    /// Search for a fiducial; the certificate goes to stdout.
    Search {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-24)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = SymArg::Fz)]
        symmetry: SymArg,
        /// Eigenvalue index k (omega^k); default is the largest eigenspace.
        #[arg(long)]
        eigenspace: Option<u32>,
        /// Write the fiducial file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the equiangularity residual of a fiducial file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Overlap table invariants, optionally with the stabilizer.
    Overlaps {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        stabilizer: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fz,
    Fa,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymArg {
    Fz,
    Fa,
    None,
}

impl From<SymArg> for Symmetry {
    fn from(s: SymArg) -> Self {
        match s {
            SymArg::Fz => Symmetry::Fz,
            SymArg::Fa => Symmetry::Fa,
            SymArg::None => Symmetry::None,
        }
    }
}

/// A run either yields a certificate or fails before producing one.
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = std::result::Result<(Certificate, Option<PathBuf>), Failure>;

fn table(quiet: bool, lines: &[String]) {
    if !quiet {
        for l in lines {
            eprintln!("{l}");
        }
    }
}

fn tower(radicand: u64, max_r: usize, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let t = dims_for_radicand(radicand, max_r)?;
    let mut c = Certificate::new("tower").input("D", radicand).input("max_r", max_r);
    let dims: Vec<String> = t.dims().iter().map(|d| d.to_string()).collect();
    c.results(json!({ "D": radicand, "unit": t.unit().to_string(), "dims": dims }));
    let mut mismatched = Vec::new();
    let mut checked = 0;
    for d in t.dims() {
        if d.bits() > 40 {
            continue;
        }
        checked += 1;
        let d = d.to_biguint().expect("dimensions are positive");
        if radicand_for_dim(&d)? != radicand {
            mismatched.push(d.to_string());
        }
    }
    c.check(
        "dims map back to D",
        mismatched.is_empty(),
        format!("{checked} of {} dims checked, mismatches {mismatched:?}", dims.len()),
    );
    let mut lines = vec![format!("D = {radicand}, u_D = {}", t.unit())];
    lines.extend(dims.iter().enumerate().map(|(i, d)| format!("  r = {:>3}  d_r = {d}", i + 1)));
    table(quiet, &lines);
    Ok(c)
}

fn dim2d(d: u64, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let radicand = radicand_for_dim(&BigUint::from(d))?;
    let t = dims_for_radicand(radicand, 64)?;
    let r = t.index_of(&d.into());
    let mut c = Certificate::new("dim2D").input("d", d);
    c.results(json!({ "d": d, "D": radicand, "r": r }));
    c.check("d lies on the tower of D", r.is_some(), format!("r = {r:?}"));
    table(quiet, &[format!("d = {d}  D = {radicand}  r = {}", r.map_or("-".into(), |r| r.to_string()))]);
    Ok(c)
}

fn unit_order(radicand: u64, max_r: usize, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let report = unit_order_law(radicand, max_r)?;
    let mut c = Certificate::new("unit-order").input("D", radicand).input("max_r", max_r);
    c.results(&report);
    c.check(
        "order of u_D mod d_r' = 3r d_r'/d_r",
        report.passed(),
        format!("{} entries, mismatches {:?}", report.entries.len(), report.mismatches()),
    );
    let mut lines = vec![format!("{:>4} {:>12} {:>12} {:>8} {:>9}", "r", "d_r", "d_r'", "order", "3r d'/d")];
    lines.extend(
        report
            .entries
            .iter()
            .map(|e| format!("{:>4} {:>12} {:>12} {:>8} {:>9}", e.r, e.d_r, e.modulus, e.order, e.predicted)),
    );
    table(quiet, &lines);
    Ok(c)
}

fn rayclass(d: u64, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let r = quotient_certificate(d)?;
    let h = r.orders();
    let mut c = Certificate::new("rayclass").input("d", d);
    c.results(&r);
    c.check("ratios 1:2:2:4", r.ratios_ok, format!("h = {h:?}"));
    c.check("h(d' inf1) = h(d' inf2)", r.places_symmetric, format!("{} vs {}", h[1], h[2]));
    c.check(
        "u_f^t = 1 mod d' is totally positive",
        r.first_unit_totally_positive,
        format!("t = {}", r.unit_order),
    );
    c.check("no -u_D^r = 1 mod d'", r.totally_negative_hit.is_none(), format!("{:?}", r.totally_negative_hit));
    let mut lines = vec![format!("d = {d}, d' = {}, D = {}", r.d_prime, r.radicand)];
    for cert in &r.certs {
        lines.push(format!(
            "  {:<16} h_K {:>3}  Phi0 {:>8}  Phi_inf {}  index {:>6}  h_m {}",
            cert.modulus.label(),
            cert.h_k,
            cert.phi0,
            cert.phi_inf,
            cert.unit_index,
            cert.h_m
        ));
    }
    table(quiet, &lines);
    Ok(c)
}

fn heisenberg(d: u64, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let r = check_heisenberg(d)?;
    let mut c = Certificate::new("heisenberg").input("d", d);
    c.results(&r);
    c.check(
        "D_j D_k = c(j,k) D_(j+k)",
        r.max_deviation <= r.tolerance,
        format!("{} pairs, max deviation {:.3e}, tolerance {:.1e}", r.pairs_checked, r.max_deviation, r.tolerance),
    );
    c.check("unitarity", r.max_unitarity_defect <= r.tolerance, format!("{:.3e}", r.max_unitarity_defect));
    c.check(
        "index periodicity mod d'",
        r.periodicity_deviation <= r.tolerance,
        format!("{:.3e}", r.periodicity_deviation),
    );
    table(quiet, &[format!("d = {d}: {} pairs, max deviation {:.3e}", r.pairs_checked, r.max_deviation)]);
    Ok(c)
}

fn clifford(d: u64, kind: Kind, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let kind = match kind {
        Kind::Fz => ZaunerKind::Fz,
        Kind::Fa => ZaunerKind::Fa,
    };
    let f = zauner_matrix(d, kind)?;
    let (order_d, proj_order) = sym_order(&f, d);
    let u = metaplectic_unitary(&f, d)?;
    let report = check_conjugation(&u, &f, d, 1e-10);
    let u_order = projective_order(&u, 12, 1e-10);
    let mut c = Certificate::new("clifford").input("d", d).input("kind", kind);
    c.results(json!({
        "matrix": f,
        "order_mod_d": order_d,
        "projective_order_mod_d_prime": proj_order,
        "conjugation": report,
        "unitary_projective_order": u_order,
    }));
    c.check("F has order 3 mod d", order_d == 3, format!("{order_d}"));
    c.check(
        "U F-conjugation law",
        report.passed(),
        format!("max deviation {:.3e}, tolerance {:.1e}", report.max_deviation, report.tolerance),
    );
    c.check("U has projective order 3", u_order == Some(3), format!("{u_order:?}"));
    table(
        quiet,
        &[
            format!("{kind} = {:?} mod {}", f.entries(), f.modulus),
            format!("order mod d {order_d}, projective order mod d' {proj_order}"),
            format!("U_F: deviation {:.3e}, projective order {u_order:?}", report.max_deviation),
        ],
    );
    Ok(c)
}

fn fiducial_json(f: &Fiducial) -> serde_json::Value {
    serde_json::from_str(&f.to_json()).expect("fiducial json parses")
}

#[allow(clippy::too_many_arguments)]
fn sic_search(
    d: u64,
    restarts: usize,
    tol: f64,
    seed: u64,
    max_iter: usize,
    symmetry: SymArg,
    eigenspace: Option<u32>,
    out: Option<PathBuf>,
    quiet: bool,
) -> std::result::Result<Certificate, Failure> {
    let opts = SearchOptions { restarts, max_iter, tol, seed, symmetry: symmetry.into(), eigenspace };
    let mut c = Certificate::new("sic search")
        .input("d", d)
        .input("restarts", restarts)
        .input("tol", tol)
        .input("max_iter", max_iter)
        .input("symmetry", Symmetry::from(symmetry))
        .input("eigenspace", eigenspace);
    c.seed = Some(seed);
    match search_fiducial(d, &opts) {
        Ok(f) => {
            let fp = f.frame_potential();
            if let Some(path) = &out {
                f.save(path)?;
            }
            c.results(json!({ "fiducial": fiducial_json(&f), "frame_potential": fp }));
            c.check("frame potential below tol", fp < tol, format!("{fp:.3e} < {tol:.1e}"));
            table(quiet, &[format!("d = {d}: frame potential {fp:.3e}, residual {:.3e}", f.residual)]);
        }
        Err(Error::NotFound { restarts, best }) => {
            c.results(json!({ "best_frame_potential": best }));
            c.check("frame potential below tol", false, format!("best {best:.3e} after {restarts} restarts"));
            table(quiet, &[format!("d = {d}: not found, best {best:.3e}")]);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(c)
}

fn sic_verify(input: PathBuf, tol: f64, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let f = Fiducial::load(&input)?;
    let r = verify_sic(&f, tol);
    let mut c = Certificate::new("sic verify").input("in", input.display().to_string()).input("tol", tol);
    c.seed = Some(f.seed);
    c.results(&r);
    c.check(
        "equiangular",
        r.passed(),
        format!("max deviation {:.3e} at {:?}, tolerance {tol:.1e}", r.max_deviation, r.worst_index),
    );
    let drift = (r.max_deviation - f.residual).abs();
    c.check("stored residual reproduced", drift <= 1e-14, format!("stored {:.3e}, drift {drift:.1e}", f.residual));
    table(
        quiet,
        &[format!("d = {}: max deviation {:.3e}, frame potential {:.3e}", f.d, r.max_deviation, r.frame_potential)],
    );
    Ok(c)
}

fn sic_overlaps(input: PathBuf, stabilizer: bool, tol: f64, quiet: bool) -> std::result::Result<Certificate, Failure> {
    let f = Fiducial::load(&input)?;
    let t = overlap_table(&f.v);
    let mut c = Certificate::new("sic overlaps")
        .input("in", input.display().to_string())
        .input("stabilizer", stabilizer)
        .input("tol", tol);
    c.seed = Some(f.seed);
    let sum_dev = (t.squared_sum() - f.d as f64).abs();
    let conj_dev = t.conjugation_defect();
    c.check("sum |f|^2 = d", sum_dev <= 1e-10, format!("deviation {sum_dev:.3e}"));
    c.check("f(-j) = conj f(j)", conj_dev <= 1e-12, format!("deviation {conj_dev:.3e}"));
    let mut lines = vec![format!("d = {}: sum dev {sum_dev:.2e}, conjugation dev {conj_dev:.2e}", f.d)];
    let normalized = match normalized_overlaps(&t, tol) {
        Ok(n) => {
            c.check("normalized overlaps on the unit circle", n.modulus_defect <= tol, format!("{:.3e}", n.modulus_defect));
            lines.push(format!("normalized moduli within {:.2e} of 1", n.modulus_defect));
            Some(n)
        }
        Err(e) => {
            c.check("normalized overlaps on the unit circle", false, e.to_string());
            None
        }
    };
    let mut stab_json = serde_json::Value::Null;
    if stabilizer {
        let dp = d_prime(f.d);
        if dp > ENUMERATION_BOUND {
            return Err(Failure::Usage(format!("d' = {dp} exceeds the enumeration bound {ENUMERATION_BOUND}")));
        }
        let s = stabilizer_search(&t, STABILIZER_TOLERANCE)?;
        let cent = centralizer_order(&s.elements, dp)?;
        c.check("stabilizer is a group", s.is_group, format!("order {}", s.order));
        c.check("no near misses", !s.is_ambiguous(), format!("{} within 10x tolerance", s.near_misses));
        let mut comparison = serde_json::Value::Null;
        if f.d >= 4 {
            let field = QuadField::new(radicand_for_dim(&BigUint::from(f.d))?)?;
            let h_k = class_number(field)?;
            let h_m = ray_class_order(&RayModulus::new(field, dp, true, false)?)?.h_m;
            let holds = cent * h_k == s.order as u64 * h_m;
            c.check(
                "|C(S)|/|S| = h(d' inf1)/h_K",
                holds,
                format!("|C| = {cent}, |S| = {}, h = {h_m}, h_K = {h_k}", s.order),
            );
            comparison = json!({ "h_m": h_m, "h_k": h_k, "holds": holds });
        }
        lines.push(format!("stabilizer order {}, centralizer order {cent}", s.order));
        stab_json = json!({ "report": s, "centralizer_order": cent, "ray_class": comparison });
    }
    let values: Vec<[f64; 2]> = t.values.iter().map(|z| [z.re, z.im]).collect();
    c.results(json!({
        "d": f.d,
        "overlaps": values,
        "normalized": normalized.map(|n| json!({
            "modulus_defect": n.modulus_defect,
            "inverse_pair_defect": n.inverse_pair_defect,
        })),
        "stabilizer": stab_json,
    }));
    table(quiet, &lines);
    Ok(c)
}

fn appendix(quiet: bool) -> Certificate {
    let r = appendix19_certificate();
    let mut c = Certificate::new("appendix19");
    c.results(&r);
    c.check("f2 reciprocal", r.f2_reciprocal, "exact comparison in Z[(1+sqrt 5)/2]");
    c.check("f3 reciprocal", r.f3_reciprocal && r.f3_monic, "exact comparison in Z[(1+sqrt 5)/2]");
    c.check(
        "f3(u) = 0",
        r.relative_residual < r.residual_tolerance,
        format!("relative {:.3e} < {:.0e}, {} digits", r.relative_residual, r.residual_tolerance, r.decimal_digits),
    );
    c.check(
        "|u| = 1",
        r.modulus_defect < r.modulus_tolerance,
        format!("{:.3e} < {:.0e}", r.modulus_defect, r.modulus_tolerance),
    );
    table(
        quiet,
        &[
            format!("u = {:.15} + {:.15} i", r.root_re, r.root_im),
            format!("|f3(u)|/max|c| = {:.3e}, ||u| - 1| = {:.3e}", r.relative_residual, r.modulus_defect),
        ],
    );
    c
}

fn dispatch(cli: Cli) -> Run {
    let q = cli.quiet;
    match cli.command {
        Command::Tower { radicand, max_r, output } => Ok((tower(radicand, max_r, q)?, output.out)),
        Command::Dim2D { d, output } => Ok((dim2d(d, q)?, output.out)),
        Command::UnitOrder { radicand, max_r, output } => Ok((unit_order(radicand, max_r, q)?, output.out)),
        Command::Rayclass { d, output } => Ok((rayclass(d, q)?, output.out)),
        Command::Heisenberg { d, output } => Ok((heisenberg(d, q)?, output.out)),
        Command::Clifford { d, kind, output } => Ok((clifford(d, kind, q)?, output.out)),
        Command::Appendix19 { output } => Ok((appendix(q), output.out)),
        Command::Sic { command } => match command {
            SicCommand::Search { d, restarts, tol, seed, max_iter, symmetry, eigenspace, out } => {
                Ok((sic_search(d, restarts, tol, seed, max_iter, symmetry, eigenspace, out, q)?, None))
            }
            SicCommand::Verify { input, tol, output } => Ok((sic_verify(input, tol, q)?, output.out)),
            SicCommand::Overlaps { input, stabilizer, tol, output } => {
                Ok((sic_overlaps(input, stabilizer, tol, q)?, output.out))
            }
        },
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("SICLAB_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("SICLAB_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("SICLAB_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match dispatch(cli) {
        Ok((cert, out)) => {
            let text = cert.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => {
                    // a closed pipe (e.g. `| head`) is not an error worth a panic
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                }
            }
            if cert.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
