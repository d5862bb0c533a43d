//! Command-line surface: figure reproduction, Gram/corridor analysis,
//! half-plane scans, expansion, dual inversion and the invariant suite.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 numerical tolerance
//! failure. Worker count comes from DILBASIS_WORKERS (default: all cores);
//! all outputs are byte-identical across worker counts.

use std::f64::consts::PI;
use std::fs;
use std::io::Write as IoWrite;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use dilbasis::{
    analyze, biorthogonality_check, dilation_generator_check, dirichlet_convolve,
    dirichlet_inverse, fmt17, gram_matrix, halfplane_scan, make_generator, mobius_sieve,
    riesz_corridor, sine_coefficients, zeta, CoeffVector, DilatedSystem, Error, FamilyConfig,
    Generator, QuadConfig, Region, SineVector, Thresholds,
};

#[derive(Parser)]
#[command(name = "dilbasis", version, about = "Dilation-generated biorthogonal systems on (0,1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Generator family selection; exactly one of the three.
#[derive(Args, Clone)]
struct Family {
    /// Polylog family a_n = n^-k.
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Coefficient CSV (n,re,im) defining a custom family.
    #[arg(long, global = true)]
    coeffs: Option<PathBuf>,
    /// The orthonormal delta family (phi_n = e_n).
    #[arg(long, global = true, default_value_t = false)]
    delta: bool,
}

impl Family {
    fn resolve(&self, default_k: Option<f64>) -> Result<Box<dyn Generator>, CmdError> {
        let picked =
            self.k.is_some() as u8 + self.coeffs.is_some() as u8 + self.delta as u8;
        if picked > 1 {
            return Err(CmdError::usage("select exactly one of --k, --coeffs, --delta"));
        }
        let (name, cfg) = if self.delta {
            ("delta", FamilyConfig::default())
        } else if let Some(path) = &self.coeffs {
            (
                "coeffs",
                FamilyConfig {
                    coeff_path: Some(path.clone()),
                    ..Default::default()
                },
            )
        } else if let Some(k) = self.k.or(default_k) {
            (
                "polylog",
                FamilyConfig {
                    k: Some(k),
                    ..Default::default()
                },
            )
        } else {
            return Err(CmdError::usage("no family selected: pass --k, --coeffs or --delta"));
        };
        make_generator(name, &cfg).map_err(CmdError::from)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Plot phi_1..phi_5 on a 512-point grid (CSV + SVG).
    Figure {
        #[command(flatten)]
        family: Family,
        /// Coefficient truncation for the synthesis.
        #[arg(long, default_value_t = 1 << 21)]
        trunc: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// csv, svg, or both when omitted.
        #[arg(long)]
        format: Option<String>,
    },
    /// Gram matrix spectrum summary.
    Gram {
        #[command(flatten)]
        family: Family,
        #[arg(long = "gram-size", default_value_t = 8)]
        gram_size: usize,
        #[arg(long, default_value_t = 1 << 16)]
        trunc: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// csv additionally dumps the entries.
        #[arg(long)]
        format: Option<String>,
    },
    /// Half-plane boundedness scan of |L_a(s)|.
    Scan {
        #[command(flatten)]
        family: Family,
        #[arg(long = "re-min", default_value_t = 0.01)]
        re_min: f64,
        #[arg(long = "re-max", default_value_t = 4.0)]
        re_max: f64,
        #[arg(long = "im-max", default_value_t = 50.0)]
        im_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1e3)]
        hi: f64,
        #[arg(long, default_value_t = 1e-3)]
        lo: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Expand a target function in the dilated system.
    Expand {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 256)]
        modes: usize,
        /// e<N>, parabola, or file:<path> with sine coefficients.
        #[arg(long, default_value = "parabola")]
        target: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Dual (Dirichlet-inverse) coefficients as CSV.
    Inverse {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 16)]
        trunc: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the invariant suite and print a pass/fail table.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: msg.into(),
        }
    }

    fn numerical(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    if let Ok(w) = std::env::var("DILBASIS_WORKERS") {
        match w.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: DILBASIS_WORKERS must be a positive integer");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{}", e);
                return ExitCode::from(1);
            }
            // --help / --version
            print!("{}", e);
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Figure {
            family,
            trunc,
            out,
            format,
        } => cmd_figure(&family, trunc, &out, format.as_deref()),
        Command::Gram {
            family,
            gram_size,
            trunc,
            out,
            format,
        } => cmd_gram(&family, gram_size, trunc, &out, format.as_deref()),
        Command::Scan {
            family,
            re_min,
            re_max,
            im_max,
            step,
            hi,
            lo,
            out,
        } => cmd_scan(&family, re_min, re_max, im_max, step, hi, lo, &out),
        Command::Expand {
            family,
            modes,
            target,
            out,
        } => cmd_expand(&family, modes, &target, &out),
        Command::Inverse { family, trunc, out } => cmd_inverse(&family, trunc, &out),
        Command::Check { seed, out } => cmd_check(seed, &out),
    }
}

const FIGURE_POINTS: usize = 512;
const FIGURE_CURVES: usize = 5;
const FIGURE_TOL: f64 = 1e-8;

fn cmd_figure(
    family: &Family,
    trunc: usize,
    out: &Path,
    format: Option<&str>,
) -> Result<(), CmdError> {
    let gen = family.resolve(Some(2.0))?;
    if trunc < FIGURE_CURVES {
        return Err(CmdError::usage("--trunc must be at least 5"));
    }
    let sys = DilatedSystem::from_generator(gen.as_ref(), trunc)?;
    let mut curves: Vec<Vec<f64>> = Vec::with_capacity(FIGURE_CURVES);
    for n in 1..=FIGURE_CURVES {
        let phi = sys.phi_coefficients(n, trunc)?;
        let grid = phi.eval_grid(FIGURE_POINTS)?;
        let vals: Vec<f64> = grid.iter().map(|z| z.re).collect();
        if let Some(worst) = cross_check(gen.as_ref(), n, &vals)? {
            if worst > FIGURE_TOL {
                return Err(CmdError::numerical(format!(
                    "phi_{} deviates from its closed form by {} (tolerance {})",
                    n, worst, FIGURE_TOL
                )));
            }
        }
        curves.push(vals);
    }

    fs::create_dir_all(out)?;
    let want = |f: &str| format.map_or(true, |g| g == f);
    if want("csv") {
        let path = out.join("figure.csv");
        let mut w = std::io::BufWriter::new(fs::File::create(&path)?);
        writeln!(w, "x,phi_1,phi_2,phi_3,phi_4,phi_5")?;
        for i in 0..FIGURE_POINTS {
            let x = i as f64 / FIGURE_POINTS as f64;
            let row: Vec<String> = curves.iter().map(|c| fmt17(c[i])).collect();
            writeln!(w, "{},{}", fmt17(x), row.join(","))?;
        }
        println!("wrote {}", path.display());
    }
    if want("svg") {
        let path = out.join("figure.svg");
        fs::write(&path, figure_svg(&curves))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Worst absolute deviation from the family's closed form, if it has one.
fn cross_check(gen: &dyn Generator, n: usize, vals: &[f64]) -> Result<Option<f64>, CmdError> {
    let mut worst: f64 = 0.0;
    for (i, &v) in vals.iter().enumerate() {
        let x = i as f64 / vals.len() as f64;
        match gen.phi_closed_form(n, x) {
            None => return Ok(None),
            Some(r) => worst = worst.max((v - r?).abs()),
        }
    }
    Ok(Some(worst))
}

fn figure_svg(curves: &[Vec<f64>]) -> String {
    let (w, h, ml, mr, mt, mb) = (800.0, 500.0, 50.0, 20.0, 20.0, 40.0);
    let ymax = curves
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1e-12);
    let sx = |x: f64| ml + x * (w - ml - mr);
    let sy = |y: f64| mt + (1.0 - (y / ymax + 1.0) / 2.0) * (h - mt - mb);
    let colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        w, h, w, h
    );
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(0.0)
    ));
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\"/>\n",
        sx(0.0),
        sy(-ymax),
        sx(0.0),
        sy(ymax)
    ));
    for (c, curve) in curves.iter().enumerate() {
        let pts: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", sx(i as f64 / curve.len() as f64), sy(v)))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            colors[c % colors.len()],
            pts.join(" ")
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn cmd_gram(
    family: &Family,
    gram_size: usize,
    trunc: usize,
    out: &Path,
    format: Option<&str>,
) -> Result<(), CmdError> {
    let gen = family.resolve(None)?;
    let sys = DilatedSystem::from_generator(gen.as_ref(), trunc)?;
    let g = gram_matrix(&sys, gram_size, trunc)?;
    let json = g.to_json();
    println!("{}", json);
    fs::create_dir_all(out)?;
    fs::write(out.join("gram.json"), format!("{}\n", json))?;
    if format == Some("csv") {
        let f = fs::File::create(out.join("gram.csv"))?;
        g.write_entries_csv(std::io::BufWriter::new(f))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    family: &Family,
    re_min: f64,
    re_max: f64,
    im_max: f64,
    step: f64,
    hi: f64,
    lo: f64,
    out: &Path,
) -> Result<(), CmdError> {
    let gen = family.resolve(None)?;
    let report = halfplane_scan(
        gen.as_ref(),
        Region::symmetric(re_min, re_max, im_max),
        step,
        Thresholds { hi, lo },
    )?;
    let json = report.to_json();
    println!("{}", json);
    fs::create_dir_all(out)?;
    fs::write(out.join("scan.json"), format!("{}\n", json))?;
    Ok(())
}

fn cmd_expand(family: &Family, modes: usize, target: &str, out: &Path) -> Result<(), CmdError> {
    let gen = family.resolve(None)?;
    let sys = DilatedSystem::from_generator(gen.as_ref(), modes)?;
    let psi = if let Some(rest) = target.strip_prefix('e') {
        if let Ok(n) = rest.parse::<usize>() {
            SineVector::basis(n, modes)?
        } else {
            return Err(CmdError::usage(format!("bad target `{}`", target)));
        }
    } else if target == "parabola" {
        sine_coefficients(&|x| x * (1.0 - x), modes, &QuadConfig::default())?
    } else if let Some(path) = target.strip_prefix("file:") {
        SineVector::new(CoeffVector::load_csv(path)?)
    } else {
        return Err(CmdError::usage(format!(
            "bad target `{}` (want e<N>, parabola, or file:<path>)",
            target
        )));
    };
    let result = analyze(&sys, &psi)?;
    let json = result.to_json();
    println!("{}", json);
    fs::create_dir_all(out)?;
    fs::write(out.join("expand.json"), format!("{}\n", json))?;
    let f = fs::File::create(out.join("expand_coeffs.csv"))?;
    result.write_coeffs_csv(std::io::BufWriter::new(f))?;
    Ok(())
}

fn cmd_inverse(family: &Family, trunc: usize, out: &Path) -> Result<(), CmdError> {
    let gen = family.resolve(None)?;
    let sys = DilatedSystem::from_generator(gen.as_ref(), trunc)?;
    let dual = sys.dual(trunc)?;
    fs::create_dir_all(out)?;
    let path = out.join("inverse.csv");
    dual.coefficients().save_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// invariant suite

struct CheckLine {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn cmd_check(seed: u64, out: &Path) -> Result<(), CmdError> {
    let mut lines = Vec::new();
    lines.push(check_convolution(seed)?);
    lines.push(check_biorthogonality()?);
    lines.push(check_round_trip(seed)?);
    lines.push(check_zeta_anchors()?);
    lines.push(check_corridor()?);
    lines.push(check_conditioning_growth()?);
    lines.push(check_dilation_generator()?);

    let mut table = String::new();
    for l in &lines {
        table.push_str(&format!(
            "{} {} ({})\n",
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            l.detail
        ));
    }
    print!("{}", table);
    fs::create_dir_all(out)?;
    fs::write(out.join("check.txt"), &table)?;
    if lines.iter().all(|l| l.pass) {
        Ok(())
    } else {
        Err(CmdError::numerical("invariant suite has failures"))
    }
}

fn seeded_coeffs(seed: u64, n: usize) -> CoeffVector {
    // Cheap splitmix-style stream; only used to vary the check inputs.
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut vals = vec![Complex64::new(1.0, 0.0)];
    for i in 2..=n {
        let bound = (i as f64).powf(-1.1);
        vals.push(Complex64::new(next() * bound, next() * bound));
    }
    CoeffVector::new(vals).unwrap()
}

fn check_convolution(seed: u64) -> Result<CheckLine, CmdError> {
    let n = 256;
    let mut worst: f64 = 0.0;
    for trial in 0..10u64 {
        let a = seeded_coeffs(seed.wrapping_add(trial), n);
        let b = dirichlet_inverse(&a, n)?;
        let conv = dirichlet_convolve(&a, &b, n)?;
        for i in 1..=n {
            let expect = if i == 1 { 1.0 } else { 0.0 };
            worst = worst.max((conv.get(i) - Complex64::new(expect, 0.0)).norm());
        }
    }
    // Moebius closed form for the completely multiplicative n^-2
    let a = CoeffVector::from_real(&(1..=n).map(|i| (i as f64).powi(-2)).collect::<Vec<_>>())
        .unwrap();
    let b = dirichlet_inverse(&a, n)?;
    let mu = mobius_sieve(n);
    for i in 1..=n {
        let closed = mu[i - 1] as f64 * (i as f64).powi(-2);
        worst = worst.max((b.get(i).re - closed).abs());
    }
    Ok(CheckLine {
        name: "convolution_inverse",
        pass: worst <= 1e-13,
        detail: format!("max residual {}", fmt17(worst)),
    })
}

fn check_biorthogonality() -> Result<CheckLine, CmdError> {
    let gen = make_generator(
        "polylog",
        &FamilyConfig {
            k: Some(2.0),
            ..Default::default()
        },
    )?;
    let sys = DilatedSystem::from_generator(gen.as_ref(), 64)?;
    let dual = sys.dual(64)?;
    let worst = biorthogonality_check(&sys, &dual, 64)?;
    Ok(CheckLine {
        name: "biorthogonality",
        pass: worst <= 1e-12,
        detail: format!("max pairing residual {}", fmt17(worst)),
    })
}

fn check_round_trip(seed: u64) -> Result<CheckLine, CmdError> {
    let n = 1024;
    let a = seeded_coeffs(seed.wrapping_add(99), n);
    let sys = DilatedSystem::new(a, "seeded")?;
    let psi = SineVector::new(seeded_coeffs(seed.wrapping_add(7), n));
    let r = analyze(&sys, &psi)?;
    let back = dilbasis::synthesize(&sys, &r.c)?;
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        worst = worst.max((back.get(k) - psi.get(k)).norm());
    }
    Ok(CheckLine {
        name: "round_trip",
        pass: worst <= 1e-12,
        detail: format!("max entry deviation {}", fmt17(worst)),
    })
}

fn check_zeta_anchors() -> Result<CheckLine, CmdError> {
    let z2 = zeta(Complex64::new(2.0, 0.0), 1e-12)?.value;
    let z4 = zeta(Complex64::new(4.0, 0.0), 1e-12)?.value;
    let e2 = (z2 - Complex64::new(PI * PI / 6.0, 0.0)).norm();
    let e4 = (z4 - Complex64::new(PI.powi(4) / 90.0, 0.0)).norm();
    Ok(CheckLine {
        name: "zeta_anchors",
        pass: e2 <= 1e-10 && e4 <= 1e-10,
        detail: format!("|zeta(2)| err {}, |zeta(4)| err {}", fmt17(e2), fmt17(e4)),
    })
}

fn check_corridor() -> Result<CheckLine, CmdError> {
    let gen = make_generator(
        "polylog",
        &FamilyConfig {
            k: Some(2.0),
            ..Default::default()
        },
    )?;
    let (lo, hi) = riesz_corridor(gen.as_ref(), 30.0, 0.25)?;
    // zeta(2.5)^2 at t = 0 and the classical floor (zeta(5)/zeta(2.5))^2
    let floor = 0.5974807193209307;
    let ceil = 1.7995880613665885;
    let pass = lo >= floor - 1e-9 && hi <= ceil + 1e-9 && (hi - ceil).abs() < 1e-8;
    Ok(CheckLine {
        name: "corridor_containment",
        pass,
        detail: format!("corridor [{}, {}]", fmt17(lo), fmt17(hi)),
    })
}

fn check_conditioning_growth() -> Result<CheckLine, CmdError> {
    let gen = make_generator(
        "polylog",
        &FamilyConfig {
            k: Some(0.6),
            ..Default::default()
        },
    )?;
    let trunc = 1 << 16;
    let sys = DilatedSystem::from_generator(gen.as_ref(), trunc)?;
    let mut conds = Vec::new();
    for m in [8usize, 16, 32] {
        conds.push(gram_matrix(&sys, m, trunc)?.cond);
    }
    let pass = conds.windows(2).all(|w| w[1] > w[0]);
    Ok(CheckLine {
        name: "conditioning_growth",
        pass,
        detail: format!(
            "cond(G) = {}, {}, {} for M = 8, 16, 32",
            fmt17(conds[0]),
            fmt17(conds[1]),
            fmt17(conds[2])
        ),
    })
}

fn check_dilation_generator() -> Result<CheckLine, CmdError> {
    let f = |x: f64| (PI * x).sin() + 0.3 * (2.0 * PI * x).sin();
    let mut worst: f64 = 0.0;
    for i in 1..=10 {
        let x = i as f64 / 12.0;
        let c = dilation_generator_check(&f, x, 0.05, 1e-6)?;
        worst = worst.max(c.generator_rel_err);
    }
    Ok(CheckLine {
        name: "dilation_generator",
        pass: worst < 1e-6,
        detail: format!("max relative error {}", fmt17(worst)),
    })
}
