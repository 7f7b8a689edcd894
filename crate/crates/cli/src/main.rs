mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info, warn};

use chocobar::chocolate::{display_axis_names, ChocGame, ChocPosition};
use chocobar::exec::Execution;
use chocobar::fdsl::{FunctionSpec, MonotoneFn};
use chocobar::grundy::{grundy, GrundyTable};
use chocobar::nimpass::{verify_isomorphism, verify_pass_theorem, DEFAULT_SEED};
use chocobar::nsprop::check_ns;
use chocobar::verify::{
    biconditional, sweep_grundy_vs_nimsum, verify_necessity, verify_sufficiency, Verdict, VerificationReport,
};
use chocobar::Error;

use report::{csv_table, GrundyTablePayload, NsPayload, PassSummary, Payload, ReportEnvelope};

const ISOMORPHISM_SAMPLES: usize = 256;

/// Sprague-Grundy solver for chocolate-bar games and Nim with a pass.
///
/// Exit codes: 0 success or theorem-consistent, 1 counterexample or
/// inconclusive, 2 usage or parse error, 3 invalid position.
#[derive(Debug, Parser)]
#[command(name = "choco", version)]
struct Cli {
    /// Seed for randomized spot checks and traversal order.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads for sweeps. Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grundy value of one position.
    Grundy(PositionArgs),
    /// Options of a position with their Grundy values.
    Moves(PositionArgs),
    /// Bounded NS check of a unary function.
    CheckNs(CheckNsArgs),
    /// Compare Grundy values with nim-sums.
    Verify(VerifyArgs),
    /// Nim with a pass: verdict and value table.
    NimPass(NimPassArgs),
    /// Draw the bar of a position.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct GameArgs {
    /// Shape function, e.g. "max(x1/2, x2/2)".
    #[arg(long = "fn")]
    func: String,

    /// Number of base axes; inferred from the coordinates when omitted.
    #[arg(long)]
    arity: Option<usize>,
}

#[derive(Debug, Args)]
struct PositionArgs {
    #[command(flatten)]
    game: GameArgs,

    /// Coordinates: y,z for one base axis, x,y,z for two, x1,..,xs,y otherwise.
    #[arg(long, value_delimiter = ',', required = true)]
    pos: Vec<u32>,

    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CheckNsArgs {
    /// Unary function of x1.
    #[arg(long = "fn")]
    func: String,

    #[arg(long, default_value_t = 64)]
    bound: u32,

    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Sweep,
    Sufficiency,
    Necessity,
    Biconditional,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long = "fn", required_unless_present_any = ["enum_d", "enum_v"])]
    func: Option<String>,

    #[arg(long)]
    arity: Option<usize>,

    /// Per-axis bounds on the base coordinates.
    #[arg(long, value_delimiter = ',')]
    bounds: Vec<u32>,

    #[arg(long, value_enum, default_value_t = Mode::Sweep)]
    mode: Mode,

    /// Domain 0..=D of enumerated tables (biconditional mode).
    #[arg(long)]
    enum_d: Option<u32>,

    /// Largest table value (biconditional mode).
    #[arg(long)]
    enum_v: Option<u32>,

    /// Upper limit on y in addition to y <= F.
    #[arg(long)]
    y_cap: Option<u32>,

    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct NimPassArgs {
    /// Number of piles (2 or 3).
    #[arg(long)]
    piles: usize,

    /// Pass threshold: passing needs some pile above t.
    #[arg(long)]
    t: u32,

    /// Largest pile size; one value, or one per pile (all equal).
    #[arg(long, value_delimiter = ',', required = true)]
    bounds: Vec<u32>,

    #[arg(long, conflicts_with = "csv")]
    json: bool,

    #[arg(long)]
    csv: bool,

    /// Restrict the table to P-positions.
    #[arg(long)]
    p_only: bool,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    position: PositionArgs,

    /// Column heights as CSV instead of a picture.
    #[arg(long)]
    csv: bool,
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidPosition(_) => 3,
        _ => 2,
    }
}

fn execution(jobs: Option<usize>) -> Execution {
    if jobs == Some(1) {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn game_for(args: &GameArgs, coords: &[u32]) -> Result<(ChocGame, ChocPosition), Error> {
    let arity = args.arity.unwrap_or(coords.len().saturating_sub(1).max(1));
    let p = ChocPosition::from_display_coords(arity, coords)?;
    let game = ChocGame::from_expr(&args.func, arity, &p.base)?;
    debug!("game {} at {p}", game.describe());
    Ok((game, p))
}

fn table_columns(axes: Vec<String>) -> Vec<String> {
    let mut cols = axes;
    cols.push("grundy".into());
    cols
}

fn row(mut coords: Vec<u32>, g: u32) -> Vec<u32> {
    coords.push(g);
    coords
}

fn cmd_grundy(args: &PositionArgs, seed: u64) -> Result<Output, Error> {
    let (game, p) = game_for(&args.game, &args.pos)?;
    let g = grundy(&game, &p, &mut GrundyTable::new().with_traversal_seed(seed))?;
    if !args.json {
        return Ok(Output::ok(format!("{g}\n")));
    }
    let payload = GrundyTablePayload {
        game: game.describe(),
        columns: table_columns(display_axis_names(game.dimension())),
        rows: vec![row(p.display_coords(), g)],
        pass_theorem: None,
    };
    Ok(Output::ok(ReportEnvelope::new(seed, Payload::GrundyTable(payload)).to_json()))
}

fn cmd_moves(args: &PositionArgs, seed: u64) -> Result<Output, Error> {
    let (game, p) = game_for(&args.game, &args.pos)?;
    let mut memo = GrundyTable::new().with_traversal_seed(seed);
    let mut rows = Vec::new();
    for q in game.moves_multi(&p)? {
        let g = grundy(&game, &q, &mut memo)?;
        rows.push(row(q.display_coords(), g));
    }
    let columns = table_columns(display_axis_names(game.dimension()));
    if !args.json {
        return Ok(Output::ok(csv_table(&columns, &rows)));
    }
    let payload = GrundyTablePayload {
        game: game.describe(),
        columns,
        rows,
        pass_theorem: None,
    };
    Ok(Output::ok(ReportEnvelope::new(seed, Payload::GrundyTable(payload)).to_json()))
}

fn cmd_check_ns(args: &CheckNsArgs, seed: u64) -> Result<Output, Error> {
    let f = FunctionSpec::parse(&args.func)?;
    if f.arity() != 1 {
        return Err(Error::Precondition(format!(
            "arity must be 1 for check-ns, `{}` uses {} variables",
            args.func,
            f.arity()
        )));
    }
    let report = check_ns(|z| f.value(&[z]), args.bound)?;
    let verdict = report.verdict_label();
    if args.json {
        let payload = NsPayload {
            function: f.to_string(),
            verdict,
            report,
        };
        return Ok(Output::ok(ReportEnvelope::new(seed, Payload::Ns(payload)).to_json()));
    }
    let text = match report.witness {
        Some(w) => format!("{verdict}: witness ({},{},{})\n", w.z, w.z_prime, w.i),
        None => format!("{verdict}\n"),
    };
    Ok(Output::ok(text))
}

fn summarize(r: &VerificationReport) -> String {
    let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
    let mut text = format!(
        "{}: {}\nverdict: {}\npositions checked: {}, mismatches: {}\n",
        r.mode,
        r.game,
        verdict.as_str().unwrap_or_default(),
        r.positions_checked,
        r.mismatch_count
    );
    if let Some(m) = r.mismatches.first() {
        let coords: Vec<String> = m.position.iter().map(u32::to_string).collect();
        text.push_str(&format!(
            "witness: ({}) grundy {} nim-sum {}",
            coords.join(","),
            m.grundy,
            m.nim_sum
        ));
        if let Some(ok) = r.witness_reverified {
            text.push_str(if ok { ", reverified" } else { ", NOT reverified" });
        }
        text.push('\n');
    }
    let failing = r.ns_summary.iter().filter(|s| !s.report.holds_on_bound).count();
    if !r.ns_summary.is_empty() {
        text.push_str(&format!("slices: {}, failing NS: {failing}\n", r.ns_summary.len()));
    }
    for note in &r.notes {
        text.push_str(&format!("note: {note}\n"));
    }
    text
}

fn cmd_verify(args: &VerifyArgs, seed: u64, exec: Execution) -> Result<Output, Error> {
    let mut report = match args.mode {
        Mode::Biconditional => biconditional(args.enum_d.unwrap_or(10), args.enum_v.unwrap_or(3), exec)?,
        mode => {
            let text = args
                .func
                .as_deref()
                .ok_or_else(|| Error::Precondition("--fn is required for this mode".into()))?;
            if args.bounds.is_empty() {
                return Err(Error::Precondition("--bounds is required for this mode".into()));
            }
            let arity = args.arity.unwrap_or(args.bounds.len());
            if arity != args.bounds.len() {
                return Err(Error::Arity {
                    expected: arity,
                    got: args.bounds.len(),
                });
            }
            let f = FunctionSpec::parse_with_arity(text, arity)?;
            match mode {
                Mode::Sweep => sweep_grundy_vs_nimsum(&ChocGame::new(f, &args.bounds)?, args.y_cap)?,
                Mode::Sufficiency => verify_sufficiency(f, &args.bounds, args.y_cap, exec)?,
                _ => verify_necessity(f, &args.bounds, args.y_cap, exec)?,
            }
        }
    };
    report.seed = Some(seed);
    info!("{} positions checked", report.positions_checked);
    let code = if report.is_consistent() { 0 } else { 1 };
    let text = if args.json {
        ReportEnvelope::new(seed, Payload::Verification(report)).to_json()
    } else {
        summarize(&report)
    };
    Ok(Output { text, code })
}

fn cmd_nim_pass(args: &NimPassArgs, seed: u64) -> Result<Output, Error> {
    let bound = args.bounds[0];
    if args.bounds.len() != 1 && (args.bounds.len() != args.piles || args.bounds.iter().any(|&b| b != bound)) {
        return Err(Error::Precondition(
            "pass-Nim bounds must be a single value or equal on every pile".into(),
        ));
    }
    let r = verify_pass_theorem(args.t, args.piles, bound)?;
    let iso = verify_isomorphism(args.t, args.piles, bound, seed, ISOMORPHISM_SAMPLES)?;
    if !iso.is_clean() {
        warn!("chocolate encoding disagrees with direct play: {:?}", iso.discrepancies.first());
    }
    let code = if r.verdict == Verdict::ConsistentWithTheorem && iso.is_clean() { 0 } else { 1 };

    let mut columns: Vec<String> = ["x", "y", "z"][..args.piles].iter().map(|s| s.to_string()).collect();
    columns.push("p".into());
    let columns = table_columns(columns);
    let rows: Vec<Vec<u32>> = r
        .table
        .iter()
        .filter(|(_, g)| !args.p_only || *g == 0)
        .map(|(c, g)| row(c.clone(), *g))
        .collect();

    let text = if args.json {
        let payload = GrundyTablePayload {
            game: format!("pass-Nim, {} piles, t = {}, piles <= {bound}", args.piles, args.t),
            columns,
            rows,
            pass_theorem: Some(PassSummary::new(&r, iso)),
        };
        ReportEnvelope::new(seed, Payload::GrundyTable(payload)).to_json()
    } else if args.csv {
        csv_table(&columns, &rows)
    } else {
        let mut text = format!("{}\n", r.summary);
        let p_count = r.table.iter().filter(|(_, g)| *g == 0).count();
        text.push_str(&format!("states: {}, P-positions: {p_count}\n", r.states_checked));
        if let Some(w) = &r.witness {
            let coords: Vec<String> = w.position.iter().map(u32::to_string).collect();
            text.push_str(&format!(
                "witness: ({}) grundy {} nim-sum {}\n",
                coords.join(","),
                w.grundy,
                w.nim_sum
            ));
        }
        text.push_str(&format!(
            "encoding: {} states agree, {} move sets sampled (seed {seed})\n",
            iso.states_checked - iso.discrepancies.len() as u64,
            iso.move_sets_checked
        ));
        text.push_str("P-positions:\n");
        for (c, _) in r.table.iter().filter(|(_, g)| *g == 0) {
            let coords: Vec<String> = c.iter().map(u32::to_string).collect();
            text.push_str(&format!("({})\n", coords.join(",")));
        }
        text
    };
    Ok(Output { text, code })
}

fn cmd_render(args: &RenderArgs) -> Result<Output, Error> {
    let (game, p) = game_for(&args.position.game, &args.position.pos)?;
    let heights = game.column_heights(&p)?;
    Ok(Output::ok(if args.csv {
        heights.to_csv()
    } else {
        heights.render_ascii()
    }))
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let exec = execution(cli.jobs);
    match &cli.command {
        Command::Grundy(a) => cmd_grundy(a, cli.seed),
        Command::Moves(a) => cmd_moves(a, cli.seed),
        Command::CheckNs(a) => cmd_check_ns(a, cli.seed),
        Command::Verify(a) => cmd_verify(a, cli.seed, exec),
        Command::NimPass(a) => cmd_nim_pass(a, cli.seed),
        Command::Render(a) => cmd_render(a),
    }
}

#[cfg(feature = "parallel")]
fn run_with_jobs(cli: &Cli) -> Result<Output, Error> {
    match cli.jobs {
        Some(n) if n > 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => {
                warn!("could not start {n} workers: {e}");
                run(cli)
            }
        },
        _ => run(cli),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_jobs(cli: &Cli) -> Result<Output, Error> {
    if cli.jobs.is_some_and(|n| n > 1) {
        warn!("built without the parallel feature; --jobs ignored");
    }
    run(cli)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CHOC_LOG", "warn")).init();
    let cli = Cli::parse();
    match run_with_jobs(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
