//! Command-line front end: parses one subcommand, runs the corresponding
//! library routine, and emits a JSON or CSV artifact with the invoking
//! configuration echoed into it. Exit codes: 0 on success, 2 on a violated
//! precondition (with a diagnostic naming it), 64 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use mallestat_core::count::{loglog_fit, omega_histograms, weighted_sum_exact};
use mallestat_core::cubic::{DEFAULT_ENUM_CAP, MAX_ENUM_BOUND};
use mallestat_core::cyclic::enumerate_cyclic;
use mallestat_core::fields::{
    count_pairs, ingest_field_table_path, write_field_table_with_config, CubicCorpus,
    PAIR_X_CAP,
};
use mallestat_core::group::{parse_group_spec, CayleyGroup};
use mallestat_core::kp::{shell_count, shell_count_multiple, uniformity_ratio, ShellConfig};
use mallestat_core::malle::{
    admissible_order, delta_margin, index_gap_violations, invariants_from_perm_group,
    invariants_regular, product_invariants, MalleInvariants, SigmaTable,
};
use mallestat_core::perm::{generate_group, symmetric_gens};

#[derive(Parser)]
#[command(
    name = "mallestat",
    version,
    about = "Counting harness for products of symmetric and nilpotent groups",
    disable_help_subcommand = true
)]
struct Cli {
    /// Worker threads for shardable commands (results are identical for any
    /// worker count)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Malle invariants (a, b) of a group given by spec
    Invariants {
        /// Group spec: C-atoms like C3xC9, @path to a Cayley table, or a
        /// product like S3xC5 (bare S3..S6 allowed)
        #[arg(long)]
        group: String,
    },
    /// Exhaustive checks over admissible group orders
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Convergence margin of the minimal-index error terms
    Delta {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        group: String,
    },
    /// Enumerate field corpora
    Enum {
        #[command(subcommand)]
        what: EnumCmd,
    },
    /// Count composite objects
    Count {
        #[command(subcommand)]
        what: CountCmd,
    },
    /// Non-cyclic cubic fields totally ramified at every prime dividing q
    M3q {
        #[arg(long)]
        q: u64,
        #[arg(long = "max-X", alias = "max-x", value_parser = parse_u64_mag)]
        max_x: u64,
        /// Raise the enumeration cap (default 10^7, hard limit 10^8)
        #[arg(long, value_parser = parse_u64_mag)]
        cap: Option<u64>,
    },
    /// Shell-vector counting
    Kp {
        #[command(subcommand)]
        what: KpCmd,
    },
    /// Weighted squarefree counts z^omega with the stabilized normalization
    Az {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        z: u64,
        #[arg(long = "max-x", alias = "max-X", value_parser = parse_u64_mag)]
        max_x: u64,
    },
    /// Log-log power-law fit of an X,count table
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Validate an external field table and summarize it
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Sweep the index-gap inequalities over all admissible orders
    Index {
        #[arg(long)]
        n: u32,
        #[arg(long = "max-order", value_parser = parse_u64_mag)]
        max_order: u64,
    },
}

#[derive(Subcommand)]
enum EnumCmd {
    /// Non-cyclic and cyclic cubic fields by |disc|, written as a field table
    Cubic {
        #[arg(long = "max-disc", value_parser = parse_u64_mag)]
        max_disc: u64,
        #[arg(long)]
        out: PathBuf,
        /// Raise the enumeration cap (default 10^7, hard limit 10^8)
        #[arg(long, value_parser = parse_u64_mag)]
        cap: Option<u64>,
    },
    /// Cyclic degree-ell fields by discriminant, printed as CSV
    Cyclic {
        #[arg(long)]
        ell: u64,
        #[arg(long = "max-disc", value_parser = parse_u128_mag)]
        max_disc: u128,
    },
}

#[derive(Subcommand)]
enum CountCmd {
    /// Bracketed counts of (non-cyclic cubic, cyclic-ell) pairs by
    /// compositum discriminant
    Pairs {
        #[arg(long)]
        ell: u64,
        #[arg(long = "max-X", alias = "max-x", value_parser = parse_u128_mag)]
        max_x: u128,
        /// Number of decade-spaced sample bounds ending at max-X
        #[arg(long, default_value_t = 4)]
        samples: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum KpCmd {
    /// Shell vectors of size at most X divisible by q, with the uniformity
    /// ratio, per decade
    Count {
        #[arg(long)]
        group: String,
        #[arg(long)]
        q: u64,
        #[arg(long = "max-X", alias = "max-x", value_parser = parse_u64_mag)]
        max_x: u64,
        #[arg(long, default_value_t = 0)]
        t: u32,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
}

/// Runs the CLI on the given argv (program name first) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind::*;
            return match err.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    print!("{err}");
                    0
                }
                InvalidValue | ValueValidation => {
                    eprint!("{err}");
                    2
                }
                _ => {
                    eprint!("{err}");
                    64
                }
            };
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            let broken_pipe = err.chain().any(|cause| {
                cause
                    .downcast_ref::<std::io::Error>()
                    .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            });
            if broken_pipe {
                return 0;
            }
            eprintln!("mallestat: {err:#}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Invariants { group } => cmd_invariants(&group),
        Command::Verify { what: VerifyCmd::Index { n, max_order } } => {
            cmd_verify_index(n, max_order)
        }
        Command::Delta { n, group } => cmd_delta(n, &group),
        Command::Enum { what: EnumCmd::Cubic { max_disc, out, cap } } => {
            cmd_enum_cubic(max_disc, &out, cap)
        }
        Command::Enum { what: EnumCmd::Cyclic { ell, max_disc } } => {
            cmd_enum_cyclic(ell, max_disc)
        }
        Command::Count { what: CountCmd::Pairs { ell, max_x, samples, out } } => {
            cmd_count_pairs(ell, max_x, samples, &out)
        }
        Command::M3q { q, max_x, cap } => cmd_m3q(q, max_x, cap),
        Command::Kp { what: KpCmd::Count { group, q, max_x, t, epsilon } } => {
            cmd_kp_count(&group, q, max_x, t, epsilon)
        }
        Command::Az { ell, z, max_x } => cmd_az(ell, z, max_x),
        Command::Fit { input } => cmd_fit(&input),
        Command::Ingest { input } => cmd_ingest(&input),
    }
}

fn parse_u128_mag(s: &str) -> Result<u128, String> {
    let t = s.trim();
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => {
            (m, e.parse::<u32>().map_err(|_| format!("bad exponent in {t:?}"))?)
        }
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(format!("{t:?} is not a nonnegative integer or <digits>e<exp>"));
    }
    let frac_len = frac_part.len() as u32;
    if frac_len > exp {
        return Err(format!("{t:?} is not an integer"));
    }
    let digits: String = [int_part, frac_part].concat();
    let base: u128 = digits.parse().map_err(|_| format!("{t:?} is out of range"))?;
    let scale = 10u128
        .checked_pow(exp - frac_len)
        .ok_or_else(|| format!("{t:?} is out of range"))?;
    base.checked_mul(scale).ok_or_else(|| format!("{t:?} is out of range"))
}

fn parse_u64_mag(s: &str) -> Result<u64, String> {
    parse_u128_mag(s)?.try_into().map_err(|_| format!("{s:?} is out of range"))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json values serialize"))?;
    Ok(())
}

fn decade_ladder_u64(max_x: u64) -> Vec<u64> {
    let mut xs = Vec::new();
    let mut v = 10u64;
    while v < max_x {
        xs.push(v);
        v = v.saturating_mul(10);
    }
    xs.push(max_x);
    xs
}

fn invariants_for_spec(spec: &str) -> Result<(MalleInvariants, Option<bool>)> {
    if let Some(rest) = spec.strip_prefix('S') {
        let (n_text, tail) = rest.split_once('x').map_or((rest, None), |(a, b)| (a, Some(b)));
        let n: u32 = n_text
            .parse()
            .map_err(|_| anyhow!("bad symmetric degree in group spec {spec:?}"))?;
        if !(3..=6).contains(&n) {
            bail!("symmetric degree must be between 3 and 6, got {n}");
        }
        return match tail {
            None => {
                let sn = generate_group(&symmetric_gens(n as usize), 1000)
                    .map_err(|e| anyhow!("{e}"))?;
                Ok((invariants_from_perm_group(&sn), None))
            }
            Some(cayley) => {
                let g = parse_group_spec(cayley)?;
                let admissible = admissible_order(n, g.order() as u64);
                Ok((product_invariants(n, &g), Some(admissible)))
            }
        };
    }
    let g = parse_group_spec(spec)?;
    Ok((invariants_regular(&g), None))
}

fn cmd_invariants(spec: &str) -> Result<()> {
    let (inv, admissible) = invariants_for_spec(spec)?;
    let mut value = json!({
        "a": inv.a.to_string(),
        "b": inv.b,
        "min_index": inv.min_index,
        "minimal_classes": inv.minimal_classes,
        "config": {"command": "invariants", "group": spec},
    });
    if let Some(adm) = admissible {
        value["admissible"] = json!(adm);
    }
    print_json(&value)?;
    Ok(())
}

fn cmd_verify_index(n: u32, max_order: u64) -> Result<()> {
    if !(3..=5).contains(&n) {
        bail!("the index-gap inequalities are stated for n in {{3, 4, 5}}, got {n}");
    }
    let violations = index_gap_violations(n, max_order);
    let orders_checked =
        (1..=max_order).filter(|&o| admissible_order(n, o)).count() as u64;
    let rows: Vec<serde_json::Value> = violations
        .iter()
        .map(|v| {
            json!({
                "order": v.order,
                "elem_order": v.elem_order,
                "sigma": v.sigma.to_compact_string(),
                "lhs": v.lhs,
                "rhs": v.rhs,
                "strict": v.strict,
            })
        })
        .collect();
    print_json(&json!({
        "n": n,
        "max_order": max_order,
        "orders_checked": orders_checked,
        "violations": rows,
        "ok": violations.is_empty(),
        "config": {"command": "verify index", "n": n, "max_order": max_order},
    }))?;
    Ok(())
}

fn load_cayley(spec: &str) -> Result<CayleyGroup> {
    parse_group_spec(spec).with_context(|| format!("group spec {spec:?}"))
}

fn cmd_delta(n: u32, spec: &str) -> Result<()> {
    if !(3..=5).contains(&n) {
        bail!("the sigma exponent table is stated for n in {{3, 4, 5}}, got {n}");
    }
    let group = load_cayley(spec)?;
    let report = delta_margin(n, &group, &SigmaTable::standard(n));
    print_json(&json!({
        "n": n,
        "group": spec,
        "delta": report.delta.to_string(),
        "passes": report.passes(),
        "binding_sigma": report.binding_sigma.to_compact_string(),
        "binding_elem_order": report.binding_elem_order,
        "admissible": report.admissible,
        "config": {"command": "delta", "n": n, "group": spec},
    }))?;
    Ok(())
}

fn corpus_cache_path(bound: u64) -> Option<PathBuf> {
    std::env::var_os("MALLESTAT_CACHE")
        .map(|dir| PathBuf::from(dir).join(format!("cubic-{bound}.v1.csv")))
}

fn load_cubic_corpus(bound: u64, cap: Option<u64>) -> Result<CubicCorpus> {
    let cap = cap.unwrap_or(DEFAULT_ENUM_CAP);
    if cap > MAX_ENUM_BOUND {
        bail!("cap {cap} exceeds the hard enumeration limit {MAX_ENUM_BOUND}");
    }
    if let Some(path) = corpus_cache_path(bound) {
        if path.is_file() {
            let cached = ingest_field_table_path(&path)
                .with_context(|| format!("cached corpus {}", path.display()))?;
            // The file name encodes the bound the table was enumerated to,
            // which can exceed the largest |disc| present in it.
            return Ok(CubicCorpus::from_records(cached.records().to_vec(), bound));
        }
    }
    let opts = mallestat_core::cubic::EnumOptions { cap, ..Default::default() };
    let corpus = CubicCorpus::enumerate(bound, &opts)?;
    if let Some(path) = corpus_cache_path(bound) {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cache directory {}", parent.display()))?;
        }
        let mut file = std::fs::File::create(&path)
            .with_context(|| format!("cache file {}", path.display()))?;
        write_field_table_with_config(&mut file, &corpus, None)?;
    }
    Ok(corpus)
}

fn cmd_enum_cubic(max_disc: u64, out: &PathBuf, cap: Option<u64>) -> Result<()> {
    let corpus = load_cubic_corpus(max_disc, cap)?;
    let config = json!({
        "command": "enum cubic",
        "max_disc": max_disc,
        "cap": cap.unwrap_or(DEFAULT_ENUM_CAP),
    });
    let mut file = std::fs::File::create(out)
        .with_context(|| format!("output file {}", out.display()))?;
    write_field_table_with_config(&mut file, &corpus, Some(&config.to_string()))?;
    Ok(())
}

fn cmd_enum_cyclic(ell: u64, max_disc: u128) -> Result<()> {
    let fields = enumerate_cyclic(ell, max_disc)?;
    let config =
        json!({"command": "enum cyclic", "ell": ell, "max_disc": max_disc.to_string()});
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "# mallestat-cyclic-fields v1")?;
    writeln!(out, "# config: {config}")?;
    writeln!(out, "ell,conductor,character_index,disc,ram")?;
    for f in &fields {
        writeln!(out, "{},{},{},{},{}", f.ell, f.conductor, f.character_index, f.disc, f.ram)?;
    }
    Ok(())
}

fn cmd_count_pairs(ell: u64, max_x: u128, samples: u32, out: &PathBuf) -> Result<()> {
    if samples == 0 || samples > 24 {
        bail!("samples must be between 1 and 24, got {samples}");
    }
    if max_x > PAIR_X_CAP {
        bail!("max-X {max_x} exceeds the pairing cap {PAIR_X_CAP}");
    }
    let xs: Vec<u128> = (0..samples)
        .rev()
        .map(|back| max_x / 10u128.pow(back))
        .filter(|&x| x > 0)
        .collect();
    let rows = count_pairs(ell, &xs, None)?;
    let config = json!({
        "command": "count pairs",
        "ell": ell,
        "max_X": max_x.to_string(),
        "samples": samples,
    });
    let mut file = std::fs::File::create(out)
        .with_context(|| format!("output file {}", out.display()))?;
    writeln!(file, "# mallestat-pair-counts v1")?;
    writeln!(file, "# config: {config}")?;
    writeln!(file, "X,lower_count,upper_count,gap,relative_gap")?;
    for r in &rows {
        writeln!(
            file,
            "{},{},{},{},{:.6}",
            r.x,
            r.lower_count,
            r.upper_count,
            r.gap(),
            r.relative_gap()
        )?;
    }
    Ok(())
}

fn cmd_m3q(q: u64, max_x: u64, cap: Option<u64>) -> Result<()> {
    let corpus = load_cubic_corpus(max_x, cap)?;
    let count = corpus.m3q(q, max_x)?;
    print_json(&json!({
        "q": q,
        "max_X": max_x,
        "count": count,
        "config": {"command": "m3q", "q": q, "max_X": max_x},
    }))?;
    Ok(())
}

fn cmd_kp_count(spec: &str, q: u64, max_x: u64, t: u32, epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        bail!("epsilon must lie in [0, 1), got {epsilon}");
    }
    if q != 1 && !mallestat_core::arith::is_prime(q) {
        bail!("q must be 1 or a prime, got {q}");
    }
    let group = load_cayley(spec)?;
    let cfg = ShellConfig::new(group).with_t(t);
    let config = json!({
        "command": "kp count",
        "group": spec,
        "q": q,
        "max_X": max_x,
        "t": t,
        "epsilon": epsilon,
    });
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "# mallestat-kp-counts v1")?;
    writeln!(out, "# config: {config}")?;
    writeln!(out, "X,q,count,ratio")?;
    for x in decade_ladder_u64(max_x) {
        let (count, ratio) = if q == 1 {
            let count = shell_count(&cfg, x);
            (count, normalized_shell_ratio(&cfg, x, count))
        } else {
            (shell_count_multiple(&cfg, x, q), uniformity_ratio(&cfg, x, q, epsilon))
        };
        writeln!(out, "{x},{q},{count},{ratio:.9}")?;
    }
    Ok(())
}

fn normalized_shell_ratio(cfg: &ShellConfig, x: u64, count: u64) -> f64 {
    let a_ratio = cfg.group().a_regular();
    let a = *a_ratio.numer() as f64 / *a_ratio.denom() as f64;
    let i = cfg.group().min_order_orbit_count() as f64;
    let xf = x as f64;
    count as f64 / (xf.powf(a) * xf.ln().powf(i - 1.0))
}

fn cmd_az(ell: u64, z: u64, max_x: u64) -> Result<()> {
    if ![3, 5, 7].contains(&ell) {
        bail!("ell must be one of 3, 5, 7, got {ell}");
    }
    if z == 0 || z > 16 {
        bail!("z must be between 1 and 16, got {z}");
    }
    let xs = decade_ladder_u64(max_x);
    let hists = omega_histograms(&xs, ell, &[]);
    let config = json!({"command": "az", "ell": ell, "z": z, "max_x": max_x});
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "# mallestat-az v1")?;
    writeln!(out, "# config: {config}")?;
    writeln!(out, "x,count,normalized")?;
    for (x, hist) in xs.iter().zip(&hists) {
        let count = weighted_sum_exact(hist, z);
        let xf = *x as f64;
        let normalized = count as f64 / (xf * xf.ln().powf(z as f64 / 2.0 - 1.0));
        writeln!(out, "{x},{count},{normalized:.9}")?;
    }
    Ok(())
}

fn cmd_fit(input: &PathBuf) -> Result<()> {
    let file = std::fs::File::open(input)
        .with_context(|| format!("input file {}", input.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.with_context(|| format!("reading {}", input.display()))?;
        if record.len() < 2 {
            continue;
        }
        let x: f64 = record[0].parse().context("bad X value")?;
        let count: f64 = record[1].parse().context("bad count value")?;
        if x > 0.0 && count > 0.0 {
            samples.push((x, count));
        }
    }
    if samples.len() < 3 {
        bail!("≥ 3 samples required, {} has {}", input.display(), samples.len());
    }
    let fit = loglog_fit(&samples);
    print_json(&json!({
        "samples": samples.len(),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "max_residual": fit.max_residual,
        "config": {"command": "fit", "in": input.display().to_string()},
    }))?;
    Ok(())
}

fn cmd_ingest(input: &std::path::Path) -> Result<()> {
    let corpus = ingest_field_table_path(input)?;
    let noncyclic = corpus.records().iter().filter(|r| !r.cyclic).count() as u64;
    let cyclic = corpus.records().len() as u64 - noncyclic;
    print_json(&json!({
        "rows": corpus.records().len() as u64,
        "bound": corpus.bound(),
        "noncyclic": noncyclic,
        "cyclic": cyclic,
        "config": {"command": "ingest", "in": input.display().to_string()},
    }))?;
    Ok(())
}
