use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use typoscope::classify::scan;
use typoscope::damerau_levenshtein;
use typoscope::defense::{
    export_blacklist, export_domains, rank_and_plan, BlacklistFormat, ModelWeights,
};
use typoscope::domain::{content_lines, parse_domain_with, Domain, Suffix, SuffixList};
use typoscope::generation::{
    generate_all, parse_model_set, Alphabet, Candidate, GenerationConfig, TypoModel,
};
use typoscope::probe::{
    active_fraction, probe_batch_with_clock, system_clock, FixtureResolver, Resolver,
    DEFAULT_MAX_IN_FLIGHT,
};
use typoscope::resources::{ConfusableMap, HomophoneDictionary, KeyboardLayout};
use typoscope::traffic::{
    extract_pairs, flag_typos, format_verdict, parse_log, Ranking, DEFAULT_MIN_SUPPORT,
    DEFAULT_THRESHOLD, DEFAULT_WINDOW_SECS,
};

/// Generate, attribute, detect and block typosquatting domains.
#[derive(Parser)]
#[command(name = "typoscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate typo candidates for one or more domains.
    Generate(GenerateArgs),
    /// Attribute suspect domains to the models that produce them from a target.
    Classify(ClassifyArgs),
    /// Print the Damerau-Levenshtein distance between two strings.
    Distance { a: String, b: String },
    /// Flag typo domains from a visit log.
    Detect(DetectArgs),
    /// Check which candidates resolve.
    Probe(ProbeArgs),
    /// Rank candidates for defensive registration under a budget.
    Plan(PlanArgs),
    /// Turn a domain list into a hosts or RPZ blocklist.
    Export(ExportArgs),
}

#[derive(Args)]
struct Input {
    /// Domain to process; repeatable.
    #[arg(long = "domain", value_name = "DOMAIN")]
    domains: Vec<String>,
    /// File with one domain per line (first CSV field), or - for stdin.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Multi-label public suffixes, one per line.
    #[arg(long, value_name = "FILE")]
    suffixes: Option<PathBuf>,
}

#[derive(Args)]
struct ModelOptions {
    /// Comma-separated models or groups (keyboard, charmod, advanced, kmod, single, all).
    #[arg(long)]
    models: Option<String>,
    /// Keyboard adjacency file: key, tab, neighbours.
    #[arg(long, value_name = "FILE")]
    layout: Option<PathBuf>,
    /// Homophone groups, tab-separated, one group per line.
    #[arg(long, value_name = "FILE")]
    homophones: Option<PathBuf>,
    /// Confusable rules: source, tab, replacement.
    #[arg(long, value_name = "FILE")]
    confusables: Option<PathBuf>,
    /// Characters used by the 1-mod and k-mod models.
    #[arg(long)]
    alphabet: Option<String>,
    /// Comma-separated TLDs for tld swapping.
    #[arg(long)]
    tlds: Option<String>,
}

#[derive(Args)]
struct Output {
    /// Write data here instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Hosts,
    Rpz,
}

impl Format {
    fn blacklist(self) -> Option<BlacklistFormat> {
        match self {
            Format::Csv => None,
            Format::Hosts => Some(BlacklistFormat::Hosts),
            Format::Rpz => Some(BlacklistFormat::Rpz),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    models: ModelOptions,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Print per-model counters to stderr.
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Suspect domains.
    #[command(flatten)]
    input: Input,
    /// Target domain; repeatable.
    #[arg(long = "target", value_name = "DOMAIN")]
    targets: Vec<String>,
    /// File of target domains.
    #[arg(long, value_name = "FILE")]
    targets_file: Option<PathBuf>,
    #[command(flatten)]
    models: ModelOptions,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DetectArgs {
    /// Visit log (ts,client,domain,kind), or - for stdin.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Popularity ranks: domain,rank.
    #[arg(long, value_name = "FILE")]
    rank: PathBuf,
    #[arg(long, value_name = "SECONDS", default_value_t = DEFAULT_WINDOW_SECS)]
    window: f64,
    #[arg(long, value_name = "P", default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MIN_SUPPORT)]
    min_support: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    input: Input,
    /// Offline answers: domain,addr1;addr2.
    #[arg(long, value_name = "FILE", conflicts_with = "live")]
    fixture: Option<PathBuf>,
    /// Query DNS.
    #[arg(long)]
    live: bool,
    /// Resolver to query instead of the system configuration.
    #[arg(long, value_name = "ADDR:PORT", requires = "live")]
    server: Option<SocketAddr>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_IN_FLIGHT)]
    max_in_flight: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PlanArgs {
    /// Brand domain to protect.
    #[arg(long, value_name = "DOMAIN")]
    domain: Option<String>,
    #[arg(long, value_name = "FILE")]
    suffixes: Option<PathBuf>,
    #[command(flatten)]
    models: ModelOptions,
    /// Per-model weights: model,weight.
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    budget: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "hosts")]
    format: Format,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Usage(&'static str, String),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(sub, msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let sub = cmd.find_subcommand_mut(sub).expect("known subcommand");
            sub.error(ErrorKind::MissingRequiredArgument, msg).exit()
        }
        Err(Failure::Input(e)) => {
            eprintln!("typoscope: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Classify(args) => classify(args),
        Command::Distance { a, b } => {
            println!("{}", damerau_levenshtein(&a, &b));
            Ok(())
        }
        Command::Detect(args) => detect(args).map_err(Failure::from),
        Command::Probe(args) => probe(args),
        Command::Plan(args) => plan(args),
        Command::Export(args) => export(args),
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("reading stdin")?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn open_output(output: &Output) -> Result<Box<dyn Write>> {
    Ok(match &output.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_suffixes(path: Option<&Path>) -> Result<Option<SuffixList>> {
    path.map(|p| {
        let text = read_text(p)?;
        SuffixList::parse(&text).with_context(|| format!("in {}", p.display()))
    })
    .transpose()
}

fn parse_list(text: &str, origin: &str, suffixes: Option<&SuffixList>) -> Result<Vec<Domain>> {
    content_lines(text)
        .map(|(line, row)| {
            let field = row.split(',').next().unwrap_or(row);
            parse_domain_with(field, suffixes).with_context(|| format!("{origin} line {line}"))
        })
        .collect()
}

impl Input {
    fn domains(&self) -> Result<Vec<Domain>> {
        let suffixes = load_suffixes(self.suffixes.as_deref())?;
        let mut out = Vec::new();
        for raw in &self.domains {
            out.push(
                parse_domain_with(raw, suffixes.as_ref())
                    .with_context(|| format!("domain {raw:?}"))?,
            );
        }
        if let Some(path) = &self.input {
            let text = read_text(path)?;
            out.extend(parse_list(
                &text,
                &path.display().to_string(),
                suffixes.as_ref(),
            )?);
        }
        Ok(out)
    }

    fn given(&self) -> bool {
        !self.domains.is_empty() || self.input.is_some()
    }
}

impl ModelOptions {
    fn config(&self, default_models: &str) -> Result<GenerationConfig> {
        let mut config = GenerationConfig::default();
        let models = self.models.as_deref().unwrap_or(default_models);
        config.models = parse_model_set(models)?;
        if config.models.is_empty() {
            return Err(anyhow!("no models selected"));
        }
        if let Some(path) = &self.layout {
            config.layout = KeyboardLayout::parse(&read_text(path)?)
                .with_context(|| format!("in {}", path.display()))?;
        }
        if let Some(path) = &self.homophones {
            config.homophones = HomophoneDictionary::parse(&read_text(path)?)
                .with_context(|| format!("in {}", path.display()))?;
        }
        if let Some(path) = &self.confusables {
            config.confusables = ConfusableMap::parse(&read_text(path)?)
                .with_context(|| format!("in {}", path.display()))?;
        }
        if let Some(chars) = &self.alphabet {
            config.alphabet = Alphabet::new(chars)?;
        }
        if let Some(tlds) = &self.tlds {
            config.tlds = tlds
                .split(',')
                .map(|t| Suffix::new(t.trim()).with_context(|| format!("tld {t:?}")))
                .collect::<Result<_>>()?;
        }
        Ok(config)
    }
}

fn write_candidates(out: &mut dyn Write, candidates: &[Candidate]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for c in candidates {
        w.write_record([
            c.domain.to_string(),
            c.model.to_string(),
            c.source.to_string(),
            c.edit_description.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    if !args.input.given() {
        return Err(Failure::Usage(
            "generate",
            "a domain is required (--domain or --input)".into(),
        ));
    }
    let domains = args.input.domains()?;
    let config = args.models.config("single")?;
    let mut all = Vec::new();
    for d in &domains {
        let (candidates, report) = generate_all(d, &config).map_err(anyhow::Error::from)?;
        if args.report {
            for m in &report.models {
                let model = m.model.map(|m| m.to_string()).unwrap_or_default();
                eprintln!(
                    "{d} {model}: raw {} identical {} invalid {} shortcut {} duplicate {} emitted {} overlap {}",
                    m.raw, m.identical, m.invalid, m.shortcut, m.duplicate, m.emitted, m.overlap
                );
            }
        }
        all.extend(candidates);
    }
    let mut out = open_output(&args.output)?;
    match args.format.blacklist() {
        None => write_candidates(&mut out, &all)?,
        Some(fmt) => out
            .write_all(export_blacklist(&all, fmt).as_bytes())
            .map_err(anyhow::Error::from)?,
    }
    out.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<(), Failure> {
    if !args.input.given() {
        return Err(Failure::Usage(
            "classify",
            "suspects are required (--domain or --input)".into(),
        ));
    }
    if args.targets.is_empty() && args.targets_file.is_none() {
        return Err(Failure::Usage(
            "classify",
            "a target is required (--target or --targets-file)".into(),
        ));
    }
    let suspects = args.input.domains()?;
    let suffixes = load_suffixes(args.input.suffixes.as_deref())?;
    let mut targets = Vec::new();
    for raw in &args.targets {
        targets.push(
            parse_domain_with(raw, suffixes.as_ref()).with_context(|| format!("target {raw:?}"))?,
        );
    }
    if let Some(path) = &args.targets_file {
        targets.extend(parse_list(
            &read_text(path)?,
            &path.display().to_string(),
            suffixes.as_ref(),
        )?);
    }
    let config = args.models.config("all")?;
    let mut out = open_output(&args.output)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(&mut out);
    for a in scan(&suspects, &targets, &config) {
        let models: Vec<String> = a.models.iter().map(TypoModel::to_string).collect();
        w.write_record([
            a.suspect.to_string(),
            a.target.to_string(),
            models.join("|"),
            a.distance.to_string(),
        ])
        .map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn detect(args: DetectArgs) -> Result<()> {
    let log = parse_log(&read_text(&args.input)?)
        .with_context(|| format!("in {}", args.input.display()))?;
    for skipped in &log.skipped {
        eprintln!(
            "typoscope: skipped line {}: {}",
            skipped.line, skipped.reason
        );
    }
    let ranking = Ranking::parse(&read_text(&args.rank)?)
        .with_context(|| format!("in {}", args.rank.display()))?;
    let stats = extract_pairs(&log.events, args.window, &ranking);
    let mut out = open_output(&args.output)?;
    for verdict in flag_typos(&stats, args.threshold, args.min_support) {
        writeln!(out, "{}", format_verdict(&verdict))?;
    }
    out.flush()?;
    Ok(())
}

fn probe(args: ProbeArgs) -> Result<(), Failure> {
    if !args.input.given() {
        return Err(Failure::Usage(
            "probe",
            "candidates are required (--domain or --input)".into(),
        ));
    }
    let candidates = args.input.domains()?;
    let results = if args.live {
        live_probe(&candidates, args.server, args.max_in_flight)?
    } else {
        let Some(path) = &args.fixture else {
            return Err(Failure::Usage(
                "probe",
                "offline probing needs --fixture; pass --live to query DNS".into(),
            ));
        };
        let fixture = FixtureResolver::parse(&read_text(path)?)
            .with_context(|| format!("in {}", path.display()))?;
        // A frozen clock keeps offline output reproducible.
        probe_batch_with_clock(&candidates, &fixture, args.max_in_flight, &|| 0.0)
    };
    let mut out = open_output(&args.output)?;
    for r in &results {
        writeln!(out, "{}", r.to_line()).map_err(anyhow::Error::from)?;
        if let Some(e) = &r.error {
            eprintln!("typoscope: {}: {e}", r.candidate);
        }
    }
    out.flush().map_err(anyhow::Error::from)?;
    if let Ok(fraction) = active_fraction(&results) {
        eprintln!("active fraction {fraction:.4}");
    }
    Ok(())
}

fn live_probe(
    candidates: &[Domain],
    server: Option<SocketAddr>,
    max_in_flight: usize,
) -> Result<Vec<typoscope::probe::ProbeResult>> {
    let resolver = typoscope::probe::LiveResolver::new(server)?;
    let resolver: &dyn Resolver = &resolver;
    Ok(probe_batch_with_clock(
        candidates,
        resolver,
        max_in_flight,
        &system_clock,
    ))
}

fn plan(args: PlanArgs) -> Result<(), Failure> {
    let Some(raw) = &args.domain else {
        return Err(Failure::Usage(
            "plan",
            "a target is required (--domain)".into(),
        ));
    };
    let suffixes = load_suffixes(args.suffixes.as_deref())?;
    let target =
        parse_domain_with(raw, suffixes.as_ref()).with_context(|| format!("domain {raw:?}"))?;
    let config = args.models.config("single")?;
    let weights = match &args.weights {
        Some(path) => ModelWeights::parse(&read_text(path)?)
            .with_context(|| format!("in {}", path.display()))?,
        None => ModelWeights::default(),
    };
    let (candidates, _) = generate_all(&target, &config).map_err(anyhow::Error::from)?;
    let plan = rank_and_plan(&target, &candidates, &weights, args.budget);
    let mut out = open_output(&args.output)?;
    match args.format.blacklist() {
        None => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut out);
            for pick in &plan.picks {
                w.write_record([
                    pick.candidate.domain.to_string(),
                    pick.candidate.model.to_string(),
                    pick.score.to_string(),
                ])
                .map_err(anyhow::Error::from)?;
            }
            w.flush().map_err(anyhow::Error::from)?;
        }
        Some(fmt) => {
            let picked: Vec<Candidate> = plan.picks.into_iter().map(|p| p.candidate).collect();
            out.write_all(export_blacklist(&picked, fmt).as_bytes())
                .map_err(anyhow::Error::from)?;
        }
    }
    out.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn export(args: ExportArgs) -> Result<(), Failure> {
    if !args.input.given() {
        return Err(Failure::Usage(
            "export",
            "domains are required (--domain or --input)".into(),
        ));
    }
    let Some(fmt) = args.format.blacklist() else {
        return Err(Failure::Usage(
            "export",
            "export writes hosts or rpz".into(),
        ));
    };
    let domains = args.input.domains()?;
    let mut out = open_output(&args.output)?;
    out.write_all(export_domains(&domains, fmt).as_bytes())
        .map_err(anyhow::Error::from)?;
    out.flush().map_err(anyhow::Error::from)?;
    Ok(())
}
