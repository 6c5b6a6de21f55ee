//! `udvalue` command-line tool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use udvalue::axioms;
use udvalue::experiments::{self, OnUnsupported, Reference, ED_RANGE, PAIRWISE_RANGE};
use udvalue::gamefile;
use udvalue::plot::{self, PlotKind};
use udvalue::report::{self, format_float, Header};
use udvalue::scalar::Scalar;
use udvalue::setsys::EXHAUSTIVE_LIMIT;
use udvalue::values::{self, UdSystem};
use udvalue::{ExactIncomplete, GameError, Rational, ValueKind};

#[derive(Parser, Debug)]
#[command(name = "udvalue", version, about = "Values of incomplete cooperative games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the R-, IC- or UD-value of a game file.
    Value {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        game: PathBuf,
        /// Print exact fractions instead of decimals.
        #[arg(long)]
        exact: bool,
    },
    /// Decide whether the UD-value is unique on a set system.
    Uniqueness {
        #[arg(long)]
        players: usize,
        /// Decimal membership mask of the set system.
        #[arg(long)]
        system: String,
    },
    /// Check the axioms on a game file and emit one CSV line per check.
    Audit {
        #[arg(long)]
        game: PathBuf,
        /// Value to audit; every value when omitted.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count intersection-closed and uniquely valued set systems.
    Census {
        #[arg(long)]
        players: usize,
        /// Sample this many systems instead of enumerating.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the values on random games.
    Experiment(ExperimentArgs),
    /// Render a CSV report as SVG.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKindArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    mode: Mode,
    #[arg(long)]
    players: usize,
    /// Use every intersection-closed system (at most four players).
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Number of sampled intersection-closed systems.
    #[arg(long)]
    samples: Option<usize>,
    /// Random games per system.
    #[arg(long, default_value_t = 100)]
    games: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the rank-frequency table here.
    #[arg(long)]
    ranks: Option<PathBuf>,
    /// Also write the histogram of per-system means here.
    #[arg(long)]
    hist: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Ud,
    R,
    Ic,
}

impl From<Kind> for ValueKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ud => ValueKind::Ud,
            Kind::R => ValueKind::R,
            Kind::Ic => ValueKind::Ic,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Diff,
    Ed,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PlotKindArg {
    Lines,
    Ranks,
    Hist,
}

impl From<PlotKindArg> for PlotKind {
    fn from(k: PlotKindArg) -> Self {
        match k {
            PlotKindArg::Lines => PlotKind::Lines,
            PlotKindArg::Ranks => PlotKind::Ranks,
            PlotKindArg::Hist => PlotKind::Hist,
        }
    }
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn emit(text: &str, out: Option<&PathBuf>) -> udvalue::Result<()> {
    match out {
        Some(path) => report::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_value(kind: Kind, game: &PathBuf, exact: bool) -> udvalue::Result<()> {
    let g: ExactIncomplete = gamefile::read_game(game)?;
    let payoffs = values::value(&g, kind.into())?;
    let fields: Vec<String> = payoffs
        .payoffs()
        .iter()
        .map(|x| if exact { x.to_string() } else { format_float(Scalar::to_f64(x)) })
        .collect();
    println!("{}", fields.join(" "));
    Ok(())
}

fn run_uniqueness(players: usize, mask: &str) -> udvalue::Result<()> {
    let system = gamefile::parse_system(players, mask)?;
    let ud = UdSystem::build(&system);
    let ranks = ud.ranks();
    let unique = values::is_ud_unique(&system);
    let note = if !system.has_grand_coalition() {
        " (grand coalition unknown)"
    } else if system.is_intersection_closed() {
        " (intersection-closed)"
    } else {
        ""
    };
    println!("{}{note}", if unique { "unique" } else { "non-unique" });
    println!(
        "rank_A={} rank_stacked={} columns={}",
        ranks.rank_coefficients, ranks.rank_stacked, ranks.columns
    );
    Ok(())
}

fn run_audit(game: &PathBuf, kind: Option<Kind>, out: Option<&PathBuf>) -> udvalue::Result<()> {
    let g: ExactIncomplete = gamefile::read_game(game)?;
    let kinds: Vec<ValueKind> = match kind {
        Some(k) => vec![k.into()],
        None => ValueKind::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    for k in kinds {
        reports.extend(axioms::audit::<Rational>(&g, k)?);
    }
    let text = report::audit_csv(&reports, &game.display().to_string(), &Header::new(command_line(), None));
    emit(&text, out)
}

fn run_census(players: usize, samples: Option<u64>, seed: u64, out: Option<&PathBuf>) -> udvalue::Result<()> {
    let census = match samples {
        Some(m) => experiments::census_sampled(players, m, seed)?,
        None if players <= EXHAUSTIVE_LIMIT => experiments::census_exhaustive(players)?,
        None => {
            return Err(GameError::Input(format!(
                "exhaustive census is limited to {EXHAUSTIVE_LIMIT} players; pass --samples"
            )))
        }
    };
    let header = Header::new(command_line(), census.row.seed);
    let mut text = report::census_csv(std::slice::from_ref(&census.row), &header);
    if census.row.samples.is_some() {
        let (se_ic, se_unique) = census.row.standard_errors();
        text.push_str(&format!(
            "# standard errors: ic_prop {}, unique_nonic_prop {}\n",
            format_float(se_ic),
            format_float(se_unique)
        ));
    }
    emit(&text, out)
}

fn run_experiment(args: &ExperimentArgs) -> udvalue::Result<()> {
    let reference = match args.mode {
        Mode::Diff => Reference::Pairwise,
        Mode::Ed => Reference::EqualDivision,
    };
    let systems = match (args.exhaustive, args.samples) {
        (_, Some(m)) => experiments::sample_ic_systems(args.players, m, args.seed)?,
        (true, None) => experiments::intersection_closed_systems(args.players)?,
        (false, None) if args.players <= EXHAUSTIVE_LIMIT => experiments::intersection_closed_systems(args.players)?,
        (false, None) => {
            let m = experiments::pilot_sample_size(args.players, args.games, args.seed, reference, 1.96, 0.01)?;
            eprintln!("pilot sizing: {m} systems");
            experiments::sample_ic_systems(args.players, m as usize, args.seed)?
        }
    };
    let report = experiments::difference_experiment(&systems, args.games, args.seed, reference, OnUnsupported::Skip)?;
    let header = Header::new(command_line(), Some(args.seed));
    report::write_text(&args.out, &report::difference_csv(&report, &header))?;
    if let Some(path) = &args.ranks {
        let ranks = experiments::rank_frequency(&report)?;
        report::write_text(path, &report::rank_csv(&ranks, &header))?;
    }
    if let Some(path) = &args.hist {
        let (low, high) = match reference {
            Reference::Pairwise => PAIRWISE_RANGE,
            Reference::EqualDivision => ED_RANGE,
        };
        let hist = experiments::histogram(&report, 0.1, low, high)?;
        report::write_text(path, &report::histogram_csv(&hist, &header))?;
    }
    println!("{} systems written to {}", report.rows.len(), args.out.display());
    Ok(())
}

fn run(cli: Cli) -> udvalue::Result<()> {
    match cli.command {
        Command::Value { kind, game, exact } => run_value(kind, &game, exact),
        Command::Uniqueness { players, system } => run_uniqueness(players, &system),
        Command::Audit { game, kind, out } => run_audit(&game, kind, out.as_ref()),
        Command::Census {
            players,
            samples,
            seed,
            out,
        } => run_census(players, samples, seed, out.as_ref()),
        Command::Experiment(args) => run_experiment(&args),
        Command::Plot { input, kind, out } => {
            let summary = plot::emit_plot(&input, kind.into(), &out)?;
            println!(
                "{} series over {} positions written to {}",
                summary.series.len(),
                summary.positions,
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
