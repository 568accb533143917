//! `snc`: checkers, constructions and sweeps over small digraphs.
//!
//! Exit codes: 0 success, 1 input error, 2 a requested conjecture fails,
//! 3 a cross-check or self-verification violation. Only machine-readable
//! payload goes to stdout.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use snc_core::conjecture::{
    check, check_c5_matrix_lp, consistency_check, instance_label, ConjectureId, Status, Verdict,
};
use snc_core::digraph::Digraph;
use snc_core::farkas::{solve_standard, verify_outcome, FeasibilityOutcome, StandardSystem};
use snc_core::linalg::{
    parse_rational, second_neighborhood_matrix, Inversion, RatMatrix, RatVector,
};
use snc_core::search::{sweep_from, Checkpoint, EnumSpec, Mode};

const EXIT_INPUT: u8 = 1;
const EXIT_FAILS: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "snc",
    version,
    about = "Exact checkers for the second-neighborhood conjecture and its matrix forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check conjectures on a digraph file (`-` reads stdin).
    Check {
        file: PathBuf,
        /// c1..c6 or all.
        #[arg(long, default_value = "all")]
        conjecture: String,
        /// Also run the cross-check harness and print its report.
        #[arg(long)]
        cross_check: bool,
        /// Decide C5 a second time by linear programming and compare.
        #[arg(long)]
        c5_lp: bool,
    },
    /// Print the second-neighborhood matrix.
    Matrix {
        file: PathBuf,
        /// Print the inverse instead, or SINGULAR and a null vector.
        #[arg(long)]
        inverse: bool,
    },
    /// Replace each vertex by an independent class of the given size.
    Blowup {
        file: PathBuf,
        /// Comma-separated positive class sizes, one per vertex.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
    },
    /// Run the cross-check harness over a stream of digraphs.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of samples in random mode.
        #[arg(long, default_value_t = 100)]
        samples: u64,
        /// Probability of `i -> j` for each pair `i < j` (random mode).
        #[arg(long, default_value = "1/3")]
        p_forward: String,
        /// Probability of `j -> i` for each pair `i < j` (random mode).
        #[arg(long, default_value = "1/3")]
        p_backward: String,
        /// Keep one digraph per isomorphism class.
        #[arg(long)]
        dedup: bool,
        /// Skip digraphs with minimum out-degree below 7.
        #[arg(long)]
        prune: bool,
        /// Checkpoint file; resumed from if it exists, updated as the sweep runs.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Lift the size caps.
        #[arg(long)]
        allow_oversize: bool,
    },
    /// Decide `M x = b, x >= 0` or produce a Farkas certificate.
    Farkas {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    All,
    Tournaments,
    Random,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::All => Mode::All,
            ModeArg::Tournaments => Mode::Tournaments,
            ModeArg::Random => Mode::Random,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let mut out = io::stdout().lock();
    let code = match cli.command {
        Command::Check {
            file,
            conjecture,
            cross_check,
            c5_lp,
        } => cmd_check(&mut out, &file, &conjecture, cross_check, c5_lp)?,
        Command::Matrix { file, inverse } => cmd_matrix(&mut out, &file, inverse)?,
        Command::Blowup { file, weights } => cmd_blowup(&mut out, &file, &weights)?,
        Command::Sweep {
            n,
            mode,
            seed,
            samples,
            p_forward,
            p_backward,
            dedup,
            prune,
            resume,
            allow_oversize,
        } => {
            let mut spec = EnumSpec::new(n, mode.into());
            spec.seed = seed;
            spec.samples = samples;
            spec.p_forward = parse_rational(&p_forward)
                .ok_or_else(|| anyhow!("bad --p-forward `{p_forward}`"))?;
            spec.p_backward = parse_rational(&p_backward)
                .ok_or_else(|| anyhow!("bad --p-backward `{p_backward}`"))?;
            spec.dedup = dedup;
            spec.prune = prune;
            spec.allow_oversize = allow_oversize;
            cmd_sweep(&mut out, &spec, resume.as_deref())?
        }
        Command::Farkas { matrix, rhs } => cmd_farkas(&mut out, &matrix, &rhs)?,
    };
    out.flush()?;
    Ok(code)
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_digraph(path: &Path) -> Result<Digraph> {
    let text = read_input(path)?;
    Digraph::parse(&text).with_context(|| format!("{}", path.display()))
}

fn write_lines(out: &mut impl Write, lines: &[Value]) -> Result<()> {
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn parse_selection(s: &str) -> Result<Vec<ConjectureId>> {
    if s.eq_ignore_ascii_case("all") {
        Ok(ConjectureId::ALL.to_vec())
    } else {
        Ok(vec![s
            .parse::<ConjectureId>()
            .map_err(|e| anyhow!("{e}"))?])
    }
}

fn summarize(v: &Verdict) {
    eprintln!(
        "{}: {} ({})",
        v.conjecture,
        v.status.as_str(),
        v.evidence.describe()
    );
}

fn cmd_check(
    out: &mut impl Write,
    file: &Path,
    selection: &str,
    cross_check: bool,
    c5_lp: bool,
) -> Result<u8> {
    let selected = parse_selection(selection)?;
    let d = read_digraph(file)?;
    if d.vertex_count() == 0 {
        bail!("{}: checkers need at least one vertex", file.display());
    }
    let s = second_neighborhood_matrix(&d);
    let label = instance_label(&d);
    let mut any_fails = false;
    let mut any_violation = false;

    let mut lines = Vec::new();
    let (verdicts, report) = if cross_check {
        let report = consistency_check(&d)?;
        let verdicts: Vec<Verdict> = selected
            .iter()
            .map(|&c| report.verdict(c).clone())
            .collect();
        (verdicts, Some(report))
    } else {
        let verdicts = selected
            .iter()
            .map(|&c| check(c, &d))
            .collect::<Result<Vec<_>, _>>()?;
        (verdicts, None)
    };
    for v in &verdicts {
        summarize(v);
        any_fails |= v.status == Status::Fails;
        let mut violations = Vec::new();
        if !v.verify(&d, &s) {
            violations.push(format!("verified_{}", v.conjecture));
        }
        if let Some(r) = &report {
            let tag = v.conjecture.as_str();
            violations.extend(r.violations.iter().filter(|x| x.contains(tag)).cloned());
        }
        any_violation |= !violations.is_empty();
        lines.push(v.to_json(&label, &violations));
    }
    if c5_lp {
        let lp = check_c5_matrix_lp(&s)?;
        let primary = check(ConjectureId::C5, &d)?;
        let mut violations = Vec::new();
        if lp.status != primary.status {
            violations.push("c5_lp_agrees".to_string());
        }
        if lp.verify_matrix(&s) != Some(true) {
            violations.push("verified_c5_lp".to_string());
        }
        eprintln!(
            "c5 (lp): {} ({})",
            lp.status.as_str(),
            lp.evidence.describe()
        );
        any_violation |= !violations.is_empty();
        lines.push(lp.to_json(&label, &violations));
    }
    if let Some(r) = &report {
        let summary = r.to_json_lines().pop().expect("summary line");
        lines.push(summary);
        any_violation |= !r.passed();
        if !r.passed() {
            eprintln!("cross-check violations: {}", r.violations.join(", "));
        }
    }
    write_lines(out, &lines)?;
    Ok(if any_violation {
        EXIT_VIOLATION
    } else if any_fails {
        EXIT_FAILS
    } else {
        0
    })
}

fn cmd_matrix(out: &mut impl Write, file: &Path, inverse: bool) -> Result<u8> {
    let d = read_digraph(file)?;
    let s = second_neighborhood_matrix(&d);
    if !inverse {
        write!(out, "{}", s.to_text())?;
        return Ok(0);
    }
    match s.invert()? {
        Inversion::Inverse(inv) => {
            if !s.mat_mul(&inv)?.is_identity() {
                eprintln!("internal error: inverse failed verification");
                return Ok(EXIT_VIOLATION);
            }
            write!(out, "{}", inv.to_text())?;
        }
        Inversion::Singular { null_vector } => {
            if !s.mat_vec(&null_vector)?.is_zero() || null_vector.is_zero() {
                eprintln!("internal error: null vector failed verification");
                return Ok(EXIT_VIOLATION);
            }
            writeln!(out, "SINGULAR")?;
            write!(out, "{}", null_vector.to_text())?;
        }
    }
    Ok(0)
}

fn cmd_blowup(out: &mut impl Write, file: &Path, weights: &[u64]) -> Result<u8> {
    let d = read_digraph(file)?;
    let (big, class_of) = d.blow_up(weights)?;
    let sums = second_neighborhood_matrix(&big).mat_vec(&RatVector::ones(big.vertex_count()))?;
    let expected =
        snc_core::conjecture::weighted_row_sums(&second_neighborhood_matrix(&d), weights);
    let pass = big
        .vertices()
        .all(|x| sums[x - 1] == expected[class_of[x] - 1]);

    write!(out, "{}", big.to_text())?;
    for i in d.vertices() {
        let members: Vec<String> = big
            .vertices()
            .filter(|&x| class_of[x] == i)
            .map(|x| x.to_string())
            .collect();
        writeln!(out, "# class V{i}: {}", members.join(" "))?;
    }
    writeln!(
        out,
        "# identity check: {}",
        if pass { "PASS" } else { "FAIL" }
    )?;
    Ok(if pass { 0 } else { EXIT_VIOLATION })
}

fn cmd_sweep(out: &mut impl Write, spec: &EnumSpec, checkpoint: Option<&Path>) -> Result<u8> {
    if spec.allow_oversize {
        eprintln!("warning: size caps lifted; this run may take a very long time");
    }
    let total = spec.instance_count()?;
    let threads = match std::env::var("SNC_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| anyhow!("SNC_THREADS must be a positive integer, got `{v}`"))?,
        ),
        Err(_) => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build()?;

    let resume = match checkpoint {
        Some(path) if path.exists() => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cp = Checkpoint::parse(&text)?;
            eprintln!("resuming at index {} of {total}", cp.next_index);
            Some(cp)
        }
        _ => None,
    };

    let mut last_percent = u64::MAX;
    let mut write_error = None;
    let report = pool.install(|| {
        sweep_from(spec, resume.as_ref(), |cp| {
            let percent = cp.next_index * 100 / total.max(1);
            if percent != last_percent {
                last_percent = percent;
                eprintln!("progress: {}/{total} ({percent}%)", cp.next_index);
            }
            if let Some(path) = checkpoint {
                if let Err(e) = fs::write(path, cp.to_text()) {
                    write_error.get_or_insert(e);
                }
            }
        })
    })?;
    if let Some(e) = write_error {
        return Err(anyhow!(e).context("writing checkpoint"));
    }
    eprintln!(
        "examined {} instances in {:.2?}; {} counterexamples, {} violations",
        report.examined,
        report.wall_time,
        report.counterexample_total(),
        report.violations
    );
    write_lines(out, &report.to_json_lines())?;
    Ok(if report.violations > 0 {
        EXIT_VIOLATION
    } else if report.counterexample_total() > 0 {
        EXIT_FAILS
    } else {
        0
    })
}

fn cmd_farkas(out: &mut impl Write, matrix: &Path, rhs: &Path) -> Result<u8> {
    let m =
        RatMatrix::parse(&read_input(matrix)?).with_context(|| format!("{}", matrix.display()))?;
    let b = RatVector::parse(&read_input(rhs)?).with_context(|| format!("{}", rhs.display()))?;
    let sys = StandardSystem::new(m, b)?;
    let outcome = solve_standard(&sys);
    if !verify_outcome(&sys, &outcome)? {
        eprintln!("internal error: outcome failed verification");
        return Ok(EXIT_VIOLATION);
    }
    match outcome {
        FeasibilityOutcome::Solution(x) => {
            writeln!(out, "SOLUTION")?;
            write!(out, "{}", x.to_text())?;
        }
        FeasibilityOutcome::Certificate(y) => {
            writeln!(out, "CERTIFICATE")?;
            write!(out, "{}", y.to_text())?;
        }
    }
    Ok(0)
}
