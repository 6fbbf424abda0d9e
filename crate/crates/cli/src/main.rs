use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use retarget::analyzer::{analyze_meta, analyze_meta_abstract};
use retarget::domain::{parse_abs_value, Domain};
use retarget::met::{parse_met, EvalBudget, EvalError, DEFAULT_FUEL};
use retarget::pe::{residual_stats, PeConfig};
use retarget::retarget::{
    analyze_meta_tgt_abstract, bench_steps, check_theorem, retarget, run_specialized, run_specialized_abstract,
    Report,
};
use retarget::src_lang::{parse_src, parse_src_value};
use retarget::tgt::{eval_tgt, interpreter_fixture, parse_tgt, Target};
use retarget::{AbsValue, BigInt, Int, RetargetedAnalyzer, TgtProgram};
use serde_json::json;

#[derive(Parser)]
#[command(name = "retargeter", version, about = "Retarget an abstract interpreter by partial evaluation")]
struct Cli {
    /// Evaluation step budget for analyses.
    #[arg(long, global = true, env = "RETARGETER_FUEL", default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TGT program concretely.
    Run {
        program: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        input: BigInt,
    },
    /// Analyze a TGT program (or a `.src` program) with the abstract SRC interpreter.
    Analyze {
        program: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "interval")]
        domain: Domain,
    },
    /// Specialize the abstract interpreter to a TGT interpreter.
    Retarget {
        #[arg(long, default_value = "single")]
        target: Target,
        #[arg(long, default_value = "interval")]
        domain: Domain,
        /// Where to write the residual program.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Analyze a TGT program with a residual produced by `retarget`.
    AnalyzeSpecialized {
        residual: PathBuf,
        program: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "interval")]
        domain: Domain,
    },
    /// Check soundness and equivalence of the retargeted analyzer on random trials.
    Check(TrialArgs),
    /// Compare evaluation steps of meta-level and retargeted analysis.
    Bench(TrialArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Concrete input.
    #[arg(long, allow_hyphen_values = true)]
    input: Option<String>,
    /// Abstract input such as `[0,10]` or `{-,0}`.
    #[arg(long, allow_hyphen_values = true)]
    abs_input: Option<String>,
}

#[derive(Args)]
struct TrialArgs {
    /// Defaults to every target.
    #[arg(long)]
    target: Option<Target>,
    /// Defaults to every domain.
    #[arg(long)]
    domain: Option<Domain>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// An error with its process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_PROPERTY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_FUEL: u8 = 3;
const EXIT_PE: u8 = 4;

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |error| Failure { code, error }
}

fn parse_err<E: std::error::Error + Send + Sync + 'static>(path: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure { code: EXIT_PARSE, error: anyhow!(e).context(format!("cannot parse {}", path.display())) }
}

fn eval_err(e: EvalError) -> Failure {
    let code = match e {
        EvalError::FuelExhausted { .. } => EXIT_FUEL,
        EvalError::Stuck(_) => EXIT_PROPERTY,
    };
    Failure { code, error: e.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(fail(EXIT_PARSE))
}

fn read_tgt(path: &Path) -> Result<TgtProgram, Failure> {
    parse_tgt(&read(path)?).map_err(parse_err(path))
}

fn target_of(p: &TgtProgram) -> Target {
    match p {
        TgtProgram::Single(_) => Target::Single,
        TgtProgram::Seq2(..) => Target::Seq2,
    }
}

enum Input {
    Concrete(String),
    Abstract(AbsValue),
}

impl InputArgs {
    fn get(&self) -> Result<Input, Failure> {
        match (&self.input, &self.abs_input) {
            (Some(i), _) => Ok(Input::Concrete(i.clone())),
            (None, Some(a)) => parse_abs_value(a)
                .map(Input::Abstract)
                .map_err(|e| Failure { code: EXIT_PARSE, error: anyhow!(e).context("invalid abstract input") }),
            (None, None) => Err(fail(EXIT_PARSE)(anyhow!("an input is required"))),
        }
    }
}

fn int(text: &str) -> Result<Int, Failure> {
    text.trim()
        .parse()
        .map_err(|_| fail(EXIT_PARSE)(anyhow!("`{text}` is not an integer")))
}

fn print(output: Output, text: impl std::fmt::Display, json: serde_json::Value) {
    match output {
        Output::Text => println!("{text}"),
        Output::Json => println!("{json}"),
    }
}

fn analyze(program: &Path, input: Input, domain: Domain, fuel: u64) -> Result<AbsValue, Failure> {
    let mut budget = EvalBudget::new(fuel);
    if program.extension().is_some_and(|e| e == "src") {
        let e = parse_src(&read(program)?).map_err(parse_err(program))?;
        return match input {
            Input::Concrete(v) => {
                let v = parse_src_value(&v).map_err(|e| fail(EXIT_PARSE)(anyhow!(e).context("invalid input")))?;
                analyze_meta(domain, &e, &v, &mut budget)
            }
            Input::Abstract(a) => analyze_meta_abstract(domain, &e, &a, &mut budget),
        }
        .map_err(eval_err);
    }
    let p = read_tgt(program)?;
    let target = target_of(&p);
    match input {
        Input::Concrete(i) => {
            let i = int(&i)?;
            let encoded = retarget::tgt::encode_input(&p, &i);
            analyze_meta(domain, &interpreter_fixture(target), &encoded, &mut budget)
        }
        Input::Abstract(a) => analyze_meta_tgt_abstract(domain, target, &p, &a, &mut budget),
    }
    .map_err(eval_err)
}

fn reports(args: &TrialArgs, run: fn(Domain, Target, usize, u64) -> Report) -> Vec<Report> {
    let domains = args.domain.map_or(Domain::ALL.to_vec(), |d| vec![d]);
    let targets = args.target.map_or(Target::ALL.to_vec(), |t| vec![t]);
    let mut out = Vec::new();
    for &d in &domains {
        for &t in &targets {
            out.push(run(d, t, args.trials, args.seed));
        }
    }
    out
}

fn show_reports(output: Output, reports: &[Report]) -> Result<(), Failure> {
    match output {
        Output::Text => {
            let texts: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
            println!("{}", texts.join("\n\n"));
        }
        Output::Json => println!("{}", serde_json::to_string(reports).expect("reports serialize")),
    }
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    if failures > 0 {
        return Err(fail(EXIT_PROPERTY)(anyhow!("{failures} failing trial(s)")));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let output = cli.output;
    match cli.command {
        Command::Run { program, input } => {
            let p = read_tgt(&program)?;
            let v = eval_tgt(&p, &input);
            print(output, &v, json!({ "result": v.to_string() }));
        }
        Command::Analyze { program, input, domain } => {
            let r = analyze(&program, input.get()?, domain, cli.fuel)?;
            print(output, &r, json!({ "result": r.to_string() }));
        }
        Command::Retarget { target, domain, emit } => {
            let a: RetargetedAnalyzer = retarget(target, domain, &PeConfig::default())
                .map_err(|e| fail(EXIT_PE)(e.into()))?;
            let text = retarget::met::print_met(&a.residual);
            let stats = residual_stats(&a.residual);
            match &emit {
                Some(path) => fs::write(path, format!("{text}\n"))
                    .with_context(|| format!("cannot write {}", path.display()))
                    .map_err(fail(EXIT_PROPERTY))?,
                None if output == Output::Text => println!("{text}\n"),
                None => {}
            }
            let json = json!({
                "target": target,
                "domain": domain,
                "emit": emit.as_ref().map(|p| p.display().to_string()),
                "residual": text,
                "stats": stats,
            });
            print(output, &stats, json);
        }
        Command::AnalyzeSpecialized { residual, program, input, domain } => {
            let text = read(&residual)?;
            let residual_expr = parse_met(&text).map_err(parse_err(&residual))?;
            let free = residual_expr.free_vars();
            if !free.is_empty() {
                return Err(fail(EXIT_PARSE)(anyhow!(
                    "{} is not closed: unbound {}",
                    residual.display(),
                    free.join(", ")
                )));
            }
            let p = read_tgt(&program)?;
            let a = RetargetedAnalyzer {
                residual: residual_expr,
                domain,
                target: target_of(&p),
                config: PeConfig::default(),
            };
            let mut budget = EvalBudget::new(cli.fuel);
            let r = match input.get()? {
                Input::Concrete(i) => run_specialized(&a, &p, &int(&i)?, &mut budget),
                Input::Abstract(v) => run_specialized_abstract(&a, &p, &v, &mut budget),
            }
            .map_err(eval_err)?;
            print(output, &r, json!({ "result": r.to_string() }));
        }
        Command::Check(args) => show_reports(output, &reports(&args, check_theorem::<Int>))?,
        Command::Bench(args) => show_reports(output, &reports(&args, bench_steps::<Int>))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
