//! `colog`: evaluate collaboration strategies and run the operational
//! pipeline on scenario files.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "colog", version, about = "Collaborative city-logistics planner", args_conflicts_with_subcommands = true)]
struct Cli {
    /// `list` the bundled fixtures or `run <name>` one of them.
    #[arg(long, num_args = 1..=2, value_names = ["ACTION", "NAME"])]
    fixtures: Option<Vec<String>>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Collaboration intents from the sign-assigned blocks.
    #[command(subcommand)]
    Macro(MacroCommand),
    /// Truck filter, trip assignment, routing and emissions.
    #[command(subcommand)]
    Micro(MicroCommand),
    /// Uncertainty effectors, trio classification and the spider network.
    #[command(subcommand)]
    Complexity(ComplexityCommand),
}

#[derive(Debug, Subcommand)]
enum MacroCommand {
    /// Evaluate one case, the scenario's signs, or every declared case.
    Eval {
        file: String,
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rank all binary sign cases of the scenario's blocks.
    Enumerate {
        file: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, default_value = "both")]
        target: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
enum MicroCommand {
    Filter(MicroArgs),
    Assign(MicroArgs),
    Route(MicroArgs),
    Emissions(MicroArgs),
    /// Every stage table.
    Plan(MicroArgs),
}

#[derive(Debug, Args)]
struct MicroArgs {
    file: String,
    /// Compliance intents as `S,E,En` percentages.
    #[arg(long, conflicts_with = "from_macro")]
    intents: Option<String>,
    /// Take intents from a declared case id, `signs`, or `best`.
    #[arg(long)]
    from_macro: Option<String>,
    /// Accept trucks whose emission multiplier is at most the En intent.
    #[arg(long)]
    c3_inverted: bool,
    /// Charge emissions per unit distance instead of per trip.
    #[arg(long)]
    per_distance: bool,
    /// Distance units per minute; overrides the scenario.
    #[arg(long)]
    speed: Option<String>,
    /// Record failing coalitions and continue.
    #[arg(long)]
    keep_going: bool,
    /// Use the SN vector as intents. Experimental.
    #[arg(long)]
    experimental_sn: bool,
    /// Scalarization weights, e.g. `E1=1,E2=2`.
    #[arg(long)]
    weights: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Treat lenient-mode warnings as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
enum ComplexityCommand {
    /// Uncertainty value from effectors given inline or in a scenario.
    Effectors {
        file: Option<String>,
        /// `Condition:+|-:n`, repeatable.
        #[arg(long = "effector")]
        effectors: Vec<String>,
        /// Union of complexity deltas: `max` or `sum`.
        #[arg(long, default_value = "max")]
        union: String,
    },
    /// Classify a complexity/uncertainty/agglomeration triple.
    Trio {
        #[arg(long)]
        complexity: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        da: String,
        #[arg(long)]
        de: String,
        #[arg(long)]
        eps: Option<String>,
    },
    /// The canonical octagon and the class of each node.
    Spider,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    if let Some(args) = cli.fixtures {
        return commands::fixtures(&args);
    }
    match cli.command {
        None => Err(CliError::Usage("expected a subcommand or --fixtures; see --help".into())),
        Some(Command::Macro(MacroCommand::Eval { file, case, out })) => {
            commands::macro_eval(&file, case.as_deref(), out.strict, out.format == Format::Csv)
        }
        Some(Command::Macro(MacroCommand::Enumerate { file, top, target, out })) => {
            commands::macro_enumerate(&file, top, &target, out.strict, out.format == Format::Csv)
        }
        Some(Command::Micro(cmd)) => {
            let (stage, args) = match cmd {
                MicroCommand::Filter(a) => (commands::Stage::Filter, a),
                MicroCommand::Assign(a) => (commands::Stage::Assign, a),
                MicroCommand::Route(a) => (commands::Stage::Route, a),
                MicroCommand::Emissions(a) => (commands::Stage::Emissions, a),
                MicroCommand::Plan(a) => (commands::Stage::Plan, a),
            };
            let opts = commands::MicroOptions {
                intents: args.intents,
                from_macro: args.from_macro,
                c3_inverted: args.c3_inverted,
                per_distance: args.per_distance,
                speed: args.speed,
                keep_going: args.keep_going,
                experimental_sn: args.experimental_sn,
                weights: args.weights,
                strict: args.out.strict,
                csv: args.out.format == Format::Csv,
            };
            commands::micro(&args.file, stage, &opts)
        }
        Some(Command::Complexity(ComplexityCommand::Effectors { file, effectors, union })) => {
            commands::effectors(file.as_deref(), &effectors, &union)
        }
        Some(Command::Complexity(ComplexityCommand::Trio { complexity, k, da, de, eps })) => {
            commands::trio(&complexity, &k, &da, &de, eps.as_deref())
        }
        Some(Command::Complexity(ComplexityCommand::Spider)) => Ok(commands::spider()),
    }
}
