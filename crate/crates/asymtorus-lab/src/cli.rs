//! The `asymtorus` command-line interface: symbolic dumps, reference-table
//! verification, curvature assembly, spectral runs, and randomized oracles.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on usage
//! or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use asymtorus_core::classical::{
    commutative_scalar_curvature, has_uniform_weight, integrate_momenta, CPoly,
};
use asymtorus_core::curvature::{
    assemble, connection_terms, kernel_identity_holds, trace_reduce_chiral, trace_reduce_plain,
    two_bein_terms, Channel, OperandTag,
};
use asymtorus_core::goldens;
use asymtorus_core::scalar::Gauss;
use asymtorus_core::symbol::{dirac_square_symbols, parametrix, Letter, SymbolError, SymbolExpr};

use crate::config::RunConfig;
use crate::dirac::{
    is_axis_profile, kernel_dimension, signed_from_squares, BlockDirac, DiracOperator, ModeWeight,
};
use crate::gns::GnsBasis;
use crate::heat::{
    fit_expansion, log_spaced, sample_heat, sample_heat_restricted, zeta_at_zero, HeatSample,
    SpectralFit,
};
use crate::modular::{
    evaluate_functional, random_matrix, random_positive_matrix, trace_identity_gap, ModularFrame,
    PolyWeight,
};
use crate::quadrature::{descriptor_quadrature, descriptor_shapes};
use crate::report::{self, fit_json, float_value, fmt_float, Sink};
use crate::{LabError, Sampler};

/// Curvature toolkit for a conformally dressed noncommutative torus.
#[derive(Debug, Parser)]
#[command(name = "asymtorus", version)]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Global options: a configuration file plus per-field overrides.
#[derive(Debug, Args)]
pub struct Overrides {
    /// JSON configuration file; the flags below override its fields
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Deformation angle of the torus algebra
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Spectral cutoff: modes with max(|m|, |n|) <= N are kept
    #[arg(long = "N", global = true, value_name = "N")]
    pub cutoff: Option<usize>,
    /// Conformal factor shorthand: `flat` or `c=..,eps=..,floor=..`
    #[arg(long = "k-profile", global = true, value_name = "SPEC")]
    pub k_profile: Option<String>,
    /// Seed of every randomized check
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for JSON/CSV reports (stdout only when unset)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Absolute heat-fit window `tmin,tmax`
    #[arg(long, global = true, value_name = "TMIN,TMAX")]
    pub window: Option<String>,
}

impl Overrides {
    /// The effective configuration: file values first, flags on top.
    pub fn resolve(&self) -> Result<RunConfig, LabError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(theta) = self.theta {
            cfg.theta = theta;
        }
        if let Some(n) = self.cutoff {
            cfg.cutoff = n;
        }
        if let Some(spec) = &self.k_profile {
            cfg.k_profile.parse_overrides(spec)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = Some(out.clone());
        }
        if let Some(w) = &self.window {
            cfg.window.parse_overrides(w)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the operator symbols and parametrix word lists with their even
    /// and spin-projected parts
    Symbols,
    /// Check the subleading parametrix words against the reference lists
    VerifyB2 {
        /// Alternative reference list for the spin-scalar part
        #[arg(long, value_name = "FILE")]
        golden: Option<PathBuf>,
        /// Alternative reference list for the chiral part
        #[arg(long = "golden-chiral", value_name = "FILE")]
        golden_chiral: Option<PathBuf>,
    },
    /// Assemble the closed-form curvature functions and check them against
    /// the reference table under one shared normalization
    Curvature {
        /// Work on the chiral projection instead of the spin-scalar one
        #[arg(long)]
        chiral: bool,
    },
    /// Reduce the curvature trace to its one-variable kernel and check the
    /// vanishing identities behind the total-curvature statement
    GaussBonnet,
    /// Collapse the commutative limit and check the classical curvature chain
    Classical,
    /// Eigenvalues of the truncated Dirac operator
    Spectrum,
    /// Heat-trace samples over the fit window and the small-time expansion
    Heat,
    /// The zeta value at the origin from the heat fit and kernel dimension
    Zeta,
    /// Numerically evaluate the algebraic functionals of the conformal
    /// factor (dense eigensolve: cost grows quickly with N; 12 or less is
    /// comfortable)
    Functionals,
    /// Randomized cross-checks: every closed-form integral against adaptive
    /// quadrature, and the rearrangement trace identity on random matrices
    Oracle {
        /// Evaluation points per descriptor shape
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Trials of the matrix trace identity
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

/// Entry point used by the binary.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool, LabError> {
    let cfg = cli.overrides.resolve()?;
    let sink = Sink::new(cfg.out_dir.clone());
    match &cli.command {
        Command::Symbols => cmd_symbols(&sink),
        Command::VerifyB2 {
            golden,
            golden_chiral,
        } => cmd_verify_b2(golden.as_deref(), golden_chiral.as_deref(), &sink),
        Command::Curvature { chiral } => cmd_curvature(*chiral, &sink),
        Command::GaussBonnet => cmd_gauss_bonnet(&sink),
        Command::Classical => cmd_classical(&sink),
        Command::Spectrum => cmd_spectrum(&cfg, &sink),
        Command::Heat => cmd_heat(&cfg, &sink),
        Command::Zeta => cmd_zeta(&cfg, &sink),
        Command::Functionals => cmd_functionals(&cfg, &sink),
        Command::Oracle { points, trials } => cmd_oracle(&cfg, *points, *trials, &sink),
    }
}

/// Collects named pass/fail checks, printing each as it lands.
struct Verdicts {
    ok: bool,
    map: serde_json::Map<String, Value>,
}

impl Verdicts {
    fn new() -> Verdicts {
        Verdicts {
            ok: true,
            map: serde_json::Map::new(),
        }
    }

    fn check(&mut self, name: &str, good: bool) {
        println!("{}: {}", name, if good { "ok" } else { "FAILED" });
        self.map
            .insert(name.to_string(), json!(if good { "ok" } else { "failed" }));
        self.ok &= good;
    }
}

// ---------------------------------------------------------------------------
// Symbolic commands
// ---------------------------------------------------------------------------

fn print_expr(name: &str, e: &SymbolExpr) {
    println!("{} ({} words):", name, e.len());
    for line in e.to_lines() {
        println!("  {}", line);
    }
}

fn cmd_symbols(sink: &Sink) -> Result<bool, LabError> {
    let (a2, a1, a0) = dirac_square_symbols();
    let (b0, b1, b2) = parametrix()?;
    let even = b2.even_part();
    let plain = even.spin_plain_part();
    let chiral = even.spin_chiral_part();
    let listing: [(&str, &SymbolExpr); 8] = [
        ("a2", &a2),
        ("a1", &a1),
        ("a0", &a0),
        ("b0", &b0),
        ("b1", &b1),
        ("b2", &b2),
        ("b2 even, spin-scalar", &plain),
        ("b2 even, chiral", &chiral),
    ];
    let mut counts = serde_json::Map::new();
    let mut lists = serde_json::Map::new();
    for (name, e) in listing {
        print_expr(name, e);
        counts.insert(name.to_string(), json!(e.len()));
        lists.insert(name.to_string(), e.to_json()?);
    }
    sink.emit_json(
        "symbols.json",
        &json!({ "counts": counts, "words": lists }),
    )?;
    Ok(true)
}

fn load_reference(
    path: Option<&Path>,
    fallback: fn() -> Result<SymbolExpr, SymbolError>,
) -> Result<SymbolExpr, LabError> {
    match path {
        Some(p) => Ok(SymbolExpr::parse(&std::fs::read_to_string(p)?)?),
        None => Ok(fallback()?),
    }
}

/// The first word line on which two expressions disagree, in canonical
/// word order.
fn first_difference(computed: &SymbolExpr, reference: &SymbolExpr) -> Option<String> {
    let a = computed.to_lines();
    let b = reference.to_lines();
    for i in 0..a.len().max(b.len()) {
        match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) if x == y => continue,
            (Some(x), Some(y)) => {
                return Some(format!("computed `{}` vs reference `{}`", x, y))
            }
            (Some(x), None) => return Some(format!("computed has extra word `{}`", x)),
            (None, Some(y)) => return Some(format!("reference has extra word `{}`", y)),
            (None, None) => unreachable!("index below both lengths"),
        }
    }
    None
}

fn cmd_verify_b2(
    golden: Option<&Path>,
    golden_chiral: Option<&Path>,
    sink: &Sink,
) -> Result<bool, LabError> {
    let (_, _, b2) = parametrix()?;
    let even = b2.even_part();
    let checks = [
        (
            "spin-scalar",
            even.spin_plain_part(),
            load_reference(golden, goldens::b2_even_plain)?,
        ),
        (
            "chiral",
            even.spin_chiral_part(),
            load_reference(golden_chiral, goldens::b2_even_chiral)?,
        ),
    ];
    let mut ok = true;
    let mut out = serde_json::Map::new();
    for (name, computed, reference) in checks {
        match first_difference(&computed, &reference) {
            None => {
                println!(
                    "{}: {} words, matches the reference list",
                    name,
                    computed.len()
                );
                out.insert(name.to_string(), json!("ok"));
            }
            Some(diff) => {
                println!("{}: first differing word: {}", name, diff);
                out.insert(name.to_string(), json!(diff));
                ok = false;
            }
        }
    }
    sink.emit_json("verify_b2.json", &Value::Object(out))?;
    Ok(ok)
}

fn cmd_curvature(chiral: bool, sink: &Sink) -> Result<bool, LabError> {
    let (channel, table, anchor, name) = if chiral {
        (
            Channel::Chiral,
            goldens::curvature_chiral()?,
            OperandTag::Single(Letter::D12),
            "chiral",
        )
    } else {
        (
            Channel::Plain,
            goldens::curvature_plain()?,
            OperandTag::Single(Letter::D11),
            "spin-scalar",
        )
    };
    let pkg = assemble(channel)?;
    let (c, checks) = pkg.verify_against(&table, &anchor)?;
    println!("{} channel, shared normalization {}", name, c);
    let scaled = pkg.scaled(&c)?;
    let mut ok = true;
    let mut entries = serde_json::Map::new();
    for (tag, good) in &checks {
        println!(
            "  {} = {}  [{}]",
            tag,
            scaled.entry(tag).pretty_unicode(),
            if *good {
                "matches the reference table"
            } else {
                "MISMATCH"
            }
        );
        entries.insert(
            format!("{}", tag),
            json!({
                "function": scaled.entry(tag).pretty_unicode(),
                "status": if *good { "ok" } else { "mismatch" },
            }),
        );
        ok &= *good;
    }
    let file = if chiral {
        "curvature_chiral.json"
    } else {
        "curvature_plain.json"
    };
    sink.emit_json(
        file,
        &json!({
            "channel": name,
            "normalization": format!("{}", c),
            "entries": entries,
        }),
    )?;
    Ok(ok)
}

fn cmd_gauss_bonnet(sink: &Sink) -> Result<bool, LabError> {
    let pkg = assemble(Channel::Plain)?;
    let (h, sector2) = trace_reduce_plain(&pkg)?;
    println!("H(s) = {}", h.pretty_unicode());
    let mut v = Verdicts::new();
    v.check(
        "kernel matches the reference",
        h.eq_value(&goldens::trace_h()?),
    );
    v.check("second-direction sector vanishes", sector2.is_zero());
    v.check(
        "s\u{00B3}H(s) + H(1/s) = 0 and H(1) = 0",
        kernel_identity_holds(&h)?,
    );
    let subs = trace_reduce_chiral(&assemble(Channel::Chiral)?)?;
    v.check(
        "chiral substitutions vanish",
        subs.iter().all(|f| f.is_zero()),
    );
    sink.emit_json(
        "gauss_bonnet.json",
        &json!({
            "kernel": h.pretty_unicode(),
            "checks": v.map,
        }),
    )?;
    Ok(v.ok)
}

fn cmd_classical(sink: &Sink) -> Result<bool, LabError> {
    let (_, _, b2) = parametrix()?;
    let even = b2.even_part();
    let plain = CPoly::collapse(&even.spin_plain_part())?;
    let chiral = CPoly::collapse(&even.spin_chiral_part())?;
    let plain_ref = goldens::classical_plain()?;
    let chiral_ref = goldens::classical_chiral()?;
    let mut v = Verdicts::new();
    v.check(
        &format!(
            "spin-scalar collapse matches the reference ({} terms)",
            plain_ref.to_lines().len()
        ),
        plain == plain_ref,
    );
    v.check(
        &format!(
            "chiral collapse matches the reference ({} terms)",
            chiral_ref.to_lines().len()
        ),
        chiral == chiral_ref,
    );

    let d11_key = (-2i64, [0u32, 0, 1, 0, 0]);
    let d1sq_key = (-3i64, [2u32, 0, 0, 0, 0]);
    let integral = integrate_momenta(&plain)?;
    let integral_ok = integral.pi_power == 1
        && integral.terms.len() == 2
        && integral.terms.get(&d11_key) == Some(&Gauss::from_ratio(1, 6))
        && integral.terms.get(&d1sq_key) == Some(&Gauss::from_ratio(-1, 3));
    v.check(
        "momentum integral is \u{03C0}(k\u{207B}\u{00B2}\u{03B4}\u{2081}\u{2081}(k)/6 \u{2212} k\u{207B}\u{00B3}\u{03B4}\u{2081}(k)\u{00B2}/3)",
        integral_ok,
    );
    println!("  integral = {}", integral);

    let chiral_integral = integrate_momenta(&chiral)?;
    v.check("chiral momentum integral vanishes", chiral_integral.is_zero());

    let r = commutative_scalar_curvature()?;
    let r_ok = r.pi_power == 0
        && r.terms.len() == 2
        && r.terms.get(&d11_key) == Some(&Gauss::from_int(2))
        && r.terms.get(&d1sq_key) == Some(&Gauss::from_int(-4))
        && has_uniform_weight(&r, -1);
    v.check(
        "scalar curvature is 2k\u{207B}\u{00B2}\u{03B4}\u{2081}\u{2081}(k) \u{2212} 4k\u{207B}\u{00B3}\u{03B4}\u{2081}(k)\u{00B2}",
        r_ok,
    );
    println!("  curvature = {}", r);

    sink.emit_json(
        "classical.json",
        &json!({
            "integral": format!("{}", integral),
            "curvature": format!("{}", r),
            "checks": v.map,
        }),
    )?;
    Ok(v.ok)
}

// ---------------------------------------------------------------------------
// Spectral commands
// ---------------------------------------------------------------------------

struct SpectralData {
    spectrum: Vec<f64>,
    squares: Vec<f64>,
    weights: Vec<ModeWeight>,
    dim_ker: usize,
    path: &'static str,
}

/// Builds the Dirac operator of the configured run and extracts its
/// spectrum, taking the per-line block path when the profile allows it.
fn spectral_data(cfg: &RunConfig) -> Result<SpectralData, LabError> {
    let k = cfg.k_element()?;
    let basis = GnsBasis::new(cfg.cutoff);
    let (squares, weights, path) = if is_axis_profile(&k) {
        let d = BlockDirac::build(&k, &basis)?;
        (d.squared_eigenvalues(), d.weighted_eigenvalues(2), "block")
    } else {
        let d = DiracOperator::build(&k, &basis)?;
        (d.squared_eigenvalues(), d.weighted_eigenvalues(2), "dense")
    };
    let spectrum = signed_from_squares(&squares);
    let dim_ker = kernel_dimension(&spectrum, cfg.kernel_tol());
    Ok(SpectralData {
        spectrum,
        squares,
        weights,
        dim_ker,
        path,
    })
}

fn cmd_spectrum(cfg: &RunConfig, sink: &Sink) -> Result<bool, LabError> {
    let data = spectral_data(cfg)?;
    let lo = data.spectrum.first().copied().unwrap_or(0.0);
    let hi = data.spectrum.last().copied().unwrap_or(0.0);
    println!(
        "{} eigenvalues on the doubled space ({} path, N = {}, theta = {})",
        data.spectrum.len(),
        data.path,
        cfg.cutoff,
        cfg.theta
    );
    println!("lambda_min = {}", fmt_float(lo));
    println!("lambda_max = {}", fmt_float(hi));
    println!("dim ker = {}", data.dim_ker);
    sink.emit_csv(
        "spectrum.csv",
        "index,eigenvalue",
        &report::spectrum_rows(&data.spectrum),
    )?;
    sink.emit_json(
        "spectrum.json",
        &json!({
            "count": data.spectrum.len(),
            "dim_ker": data.dim_ker,
            "lambda_min": float_value(lo),
            "lambda_max": float_value(hi),
            "path": data.path,
        }),
    )?;
    Ok(true)
}

fn heat_fit_data(
    cfg: &RunConfig,
) -> Result<(SpectralData, Vec<HeatSample>, SpectralFit), LabError> {
    let data = spectral_data(cfg)?;
    let window = cfg.window.resolve(cfg.cutoff);
    let times = log_spaced(window.0, window.1, cfg.window.samples);
    let samples = sample_heat(&data.squares, &times);
    let fit = fit_expansion(&samples, window)?;
    Ok((data, samples, fit))
}

fn cmd_heat(cfg: &RunConfig, sink: &Sink) -> Result<bool, LabError> {
    let (data, samples, fit) = heat_fit_data(cfg)?;
    let window = fit.window;
    println!(
        "heat trace over t in [{}, {}], {} samples ({} path, N = {})",
        fmt_float(window.0),
        fmt_float(window.1),
        samples.len(),
        data.path,
        cfg.cutoff
    );
    println!("c_minus1 = {}", fmt_float(fit.c_minus1));
    println!("c0 = {}", fmt_float(fit.c0));
    println!("c1 = {}", fmt_float(fit.c1));
    println!(
        "residual = {}, condition = {}",
        fmt_float(fit.residual),
        fmt_float(fit.condition)
    );
    println!("dim ker = {}", data.dim_ker);

    // Diagnostic fit with near-cutoff modes removed.
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let restricted_samples = sample_heat_restricted(&data.weights, &times, 0.5);
    let restricted = fit_expansion(&restricted_samples, window)?;
    println!(
        "interior-only fit: c_minus1 = {}, c0 = {}",
        fmt_float(restricted.c_minus1),
        fmt_float(restricted.c0)
    );

    let mut v = Verdicts::new();
    v.check(
        &format!("|c0| within {}", cfg.tolerances.c0_bound),
        fit.c0.abs() <= cfg.tolerances.c0_bound,
    );

    sink.emit_csv("heat_samples.csv", "t,value", &report::heat_rows(&samples))?;
    sink.emit_csv(
        "fit_overlay.csv",
        "t,model",
        &report::overlay_rows(&fit, &samples),
    )?;
    sink.emit_json(
        "heat_fit.json",
        &json!({
            "fit": fit_json(&fit, data.dim_ker),
            "condition": float_value(fit.condition),
            "restricted_fit": fit_json(&restricted, data.dim_ker),
            "path": data.path,
            "checks": v.map,
        }),
    )?;
    Ok(v.ok)
}

fn cmd_zeta(cfg: &RunConfig, sink: &Sink) -> Result<bool, LabError> {
    let (data, _, fit) = heat_fit_data(cfg)?;
    let zeta0 = zeta_at_zero(&fit, data.dim_ker);
    println!("zeta(0) = {}", fmt_float(zeta0));
    println!(
        "c0 = {}, dim ker = {}, window = [{}, {}]",
        fmt_float(fit.c0),
        data.dim_ker,
        fmt_float(fit.window.0),
        fmt_float(fit.window.1)
    );
    sink.emit_json(
        "zeta.json",
        &json!({
            "zeta0": float_value(zeta0),
            "c0": float_value(fit.c0),
            "dim_ker": data.dim_ker,
            "window": [float_value(fit.window.0), float_value(fit.window.1)],
        }),
    )?;
    Ok(true)
}

fn cmd_functionals(cfg: &RunConfig, sink: &Sink) -> Result<bool, LabError> {
    let k = cfg.k_element()?;
    let basis = GnsBasis::new(cfg.cutoff);
    let (tb, tb_scale) = evaluate_functional(&two_bein_terms(), &k, &basis)?;
    let (cn, cn_scale) = evaluate_functional(&connection_terms(), &k, &basis)?;
    println!(
        "two-bein functional   = {} (term scale {})",
        fmt_float(tb),
        fmt_float(tb_scale)
    );
    println!(
        "connection functional = {} (term scale {})",
        fmt_float(cn),
        fmt_float(cn_scale)
    );
    if tb_scale == 0.0 {
        println!("note: the profile is flat, so both functionals vanish trivially");
    }
    let mut v = Verdicts::new();
    v.check(
        "two-bein functional vanishes",
        tb.abs() <= 1e-9 * tb_scale.max(1.0),
    );
    sink.emit_json(
        "functionals.json",
        &json!({
            "two_bein": float_value(tb),
            "two_bein_scale": float_value(tb_scale),
            "connection": float_value(cn),
            "connection_scale": float_value(cn_scale),
            "checks": v.map,
        }),
    )?;
    Ok(v.ok)
}

fn cmd_oracle(
    cfg: &RunConfig,
    points: usize,
    trials: usize,
    sink: &Sink,
) -> Result<bool, LabError> {
    let mut sampler = Sampler::new(cfg.seed);

    // Closed forms against adaptive quadrature, shape by shape.
    let shapes = descriptor_shapes()?;
    let mut worst_rel = 0.0f64;
    let mut worst_shape = String::new();
    let mut quad_failures = 0usize;
    for d in &shapes {
        let closed = d.eval_closed_unit()?;
        for _ in 0..points {
            let s = sampler.range(0.2, 5.0);
            let t = sampler.range(0.2, 5.0);
            let (reference, _) = closed.eval_f64(1.0, s, t);
            match descriptor_quadrature(d, s, t, 1e-10) {
                Ok(q) => {
                    let rel = (reference - q).abs() / reference.abs().max(q.abs()).max(1e-12);
                    if rel > worst_rel {
                        worst_rel = rel;
                        worst_shape =
                            format!("n={:?} m={:?} k1={} k2={}", d.n, d.m, d.k1, d.k2);
                    }
                    if rel > cfg.tolerances.quadrature {
                        quad_failures += 1;
                    }
                }
                Err(e) => {
                    println!(
                        "quadrature failed on n={:?} m={:?} at ({:.3}, {:.3}): {}",
                        d.n, d.m, s, t, e
                    );
                    quad_failures += 1;
                }
            }
        }
    }
    println!(
        "descriptor shapes: {} shapes at {} points each, worst relative deviation {}",
        shapes.len(),
        points,
        fmt_float(worst_rel)
    );
    if !worst_shape.is_empty() {
        println!("  worst shape: {}", worst_shape);
    }

    // The rearrangement trace identity on random weights and matrices.
    let dim = 8;
    let mut worst_gap = 0.0f64;
    for _ in 0..trials {
        let kmat = random_positive_matrix(&mut sampler, dim);
        let frame = ModularFrame::new(&kmat)?;
        let x = random_matrix(&mut sampler, dim);
        let y = random_matrix(&mut sampler, dim);
        let poly = PolyWeight::random(&mut sampler, 4);
        worst_gap = worst_gap.max(trace_identity_gap(&poly, &x, &y, &frame));
    }
    println!(
        "trace identity: {} trials at dimension {}, worst relative gap {}",
        trials,
        dim,
        fmt_float(worst_gap)
    );

    let mut v = Verdicts::new();
    v.check(
        &format!("closed forms match quadrature within {:e}", cfg.tolerances.quadrature),
        quad_failures == 0,
    );
    v.check(
        &format!("trace identity holds within {:e}", cfg.tolerances.oracle),
        worst_gap <= cfg.tolerances.oracle,
    );
    sink.emit_json(
        "oracle.json",
        &json!({
            "descriptor_shapes": shapes.len(),
            "points_per_shape": points,
            "worst_rel_error": float_value(worst_rel),
            "trials": trials,
            "worst_trace_gap": float_value(worst_gap),
            "checks": v.map,
        }),
    )?;
    Ok(v.ok)
}
