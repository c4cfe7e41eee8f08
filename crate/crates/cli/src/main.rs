use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ends_core::ends::{metric_corpus, FreeGroupEnd};
use ends_core::experiments as ex;
use ends_core::group::{parse_group_file, Letter, MarkedGroup, DEFAULT_MAX_ELEMENTS};
use ends_core::report::Report;
use ends_core::subset::verify::Status;
use ends_core::subset::Side;
use ends_core::tree::BassSerreTree;
use ends_core::Error;

#[derive(Parser)]
#[command(name = "endsctl", version, about = "Ends of groups at desk scale")]
struct Cli {
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress the human-readable table on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on the number of elements in any ball or table.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ELEMENTS)]
    max_elements: usize,
    /// Record wall-clock time in the report (makes the JSON run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Top,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Top {
    /// End counts and the end space of free groups.
    #[command(subcommand)]
    Ends(EndsCmd),
    /// Property checks with verdicts.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
struct GroupArg {
    /// Group spec, e.g. `free_product([cyclic(2), free(1)])`.
    #[arg(long, conflicts_with = "group_file")]
    group: Option<String>,
    /// TOML file with `group = "..."` and optional `symmetric`, `max_elements`.
    #[arg(long)]
    group_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EndsCmd {
    /// Annulus component counts and an end-count verdict.
    Estimate {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 6)]
        rmax: u32,
        #[arg(long, default_value_t = 2)]
        window: u32,
    },
    /// Common-suffix depth against brute-force separation in a free group.
    Metric {
        #[command(flatten)]
        group: GroupArg,
        /// File of end pairs, one `tail|period tail|period` pair per line.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Size of the built-in corpus used when no file is given.
        #[arg(long, default_value_t = 50)]
        corpus: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
        #[arg(long, default_value_t = 8)]
        ball_radius: u32,
        #[arg(long, default_value_t = 7)]
        approximant: usize,
        #[arg(long, default_value_t = 1000)]
        triples: usize,
    },
    /// Depth ratios between the end metrics of two free bases.
    Holder {
        #[command(flatten)]
        group: GroupArg,
        /// Comma-separated basis words in the standard generators.
        #[arg(long)]
        genset1: String,
        #[arg(long)]
        genset2: String,
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        sample: usize,
    },
    /// Cone splitting in a free group.
    Split {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
}

#[derive(Args)]
struct FactorsArg {
    #[arg(long, conflicts_with_all = ["group_file", "factors"])]
    group: Option<String>,
    #[arg(long)]
    group_file: Option<PathBuf>,
    /// Factor specs of a free product, e.g. `--factors cyclic(2) cyclic(3)`.
    #[arg(long, num_args = 2..)]
    factors: Vec<String>,
}

#[derive(Args)]
struct PairArg {
    #[arg(long, conflicts_with_all = ["group_file", "h"])]
    group: Option<String>,
    #[arg(long)]
    group_file: Option<PathBuf>,
    /// First factor of `H * L`.
    #[arg(long = "H", requires = "l")]
    h: Option<String>,
    /// Second factor of `H * L`.
    #[arg(long = "L", requires = "h")]
    l: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
    Both,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Last-letter type under left multiplication by a syllable.
    Coupme {
        #[command(flatten)]
        group: FactorsArg,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 8)]
        radius: u32,
    },
    /// The suffix lift of a commensurated subset of a factor.
    FreeproInj {
        #[command(flatten)]
        group: PairArg,
        /// 1-based factor index (with `--H/--L` the factor is H).
        #[arg(long, default_value_t = 1)]
        factor: usize,
        /// Set expression in the factor.
        #[arg(long = "M")]
        m: String,
        /// Comma-separated factor elements; defaults to s, s⁻¹, s², s⁻² per generator.
        #[arg(long)]
        translators: Option<String>,
        #[arg(long, default_value_t = 6)]
        radius: u32,
    },
    /// Bi-invariance of the level function of an ascending chain.
    Notame {
        #[arg(long, conflicts_with_all = ["chain", "n"])]
        group: Option<String>,
        #[arg(long, value_parser = ["sum_z2", "sym_chain"], requires = "n")]
        chain: Option<String>,
        #[arg(long = "N")]
        n: Option<usize>,
        /// Check one element instead of all of them.
        #[arg(long)]
        g: Option<String>,
        #[arg(long, default_value_t = 4)]
        radius: u32,
    },
    /// Boundary encoding round trips for random commensurated sets.
    Cardbool {
        #[arg(long, num_args = 1.., default_values_t = ["free_abelian(1)".to_string(), "free(2)".to_string()])]
        groups: Vec<String>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        radius: u32,
    },
    /// Disjoint translates of the tree half-space in `H * L`.
    TreeDisjoint {
        #[command(flatten)]
        group: PairArg,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, default_value_t = 5)]
        radius: u32,
        /// Write the truncated tree in DOT format.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Bi-commensuration of a subset.
    Biends {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 6)]
        radius: u32,
    },
    /// Left, right or two-sided commensuration of a subset.
    Commensurated {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long, default_value_t = 6)]
        radius: u32,
    },
}

struct Ctx {
    seed: u64,
    max_elements: usize,
}

impl Ctx {
    fn capped(&self, g: Arc<MarkedGroup>) -> ends_core::Result<Arc<MarkedGroup>> {
        if self.max_elements == DEFAULT_MAX_ELEMENTS || g.max_elements() == self.max_elements {
            Ok(g)
        } else {
            g.with_options(g.is_symmetric(), self.max_elements)
        }
    }

    fn parse(&self, spec: &str) -> ends_core::Result<Arc<MarkedGroup>> {
        self.capped(MarkedGroup::parse(spec)?)
    }

    fn resolve(&self, spec: Option<&str>, file: Option<&Path>) -> Result<Arc<MarkedGroup>, Failure> {
        match (spec, file) {
            (Some(s), _) => Ok(self.parse(s)?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                Ok(self.capped(parse_group_file(&text)?)?)
            }
            (None, None) => Err(Failure::Usage("a group is required (--group or --group-file)".into())),
        }
    }

    fn group(&self, a: &GroupArg) -> Result<Arc<MarkedGroup>, Failure> {
        self.resolve(a.group.as_deref(), a.group_file.as_deref())
    }

    fn pair(&self, a: &PairArg) -> Result<Arc<MarkedGroup>, Failure> {
        match (&a.h, &a.l) {
            (Some(h), Some(l)) => Ok(self.parse(&format!("free_product([{h}, {l}])"))?),
            _ => self.resolve(a.group.as_deref(), a.group_file.as_deref()),
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read_pairs(g: &MarkedGroup, path: &Path) -> Result<Vec<(FreeGroupEnd, FreeGroupEnd)>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [x, y] = parts[..] else {
            return Err(Failure::Usage(format!("{}:{}: expected two end literals", path.display(), n + 1)));
        };
        out.push((FreeGroupEnd::parse(g, x)?, FreeGroupEnd::parse(g, y)?));
    }
    Ok(out)
}

fn free_rank(g: &MarkedGroup) -> Result<usize, Failure> {
    g.free_rank().ok_or_else(|| Failure::Usage(format!("{} is not a free group", g.spec())))
}

fn words(g: &MarkedGroup, list: &str) -> Result<Vec<Vec<Letter>>, Failure> {
    list.split(',').map(|w| Ok(g.word_of(&g.parse_element(w)?))).collect()
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let ctx = Ctx { seed: cli.seed, max_elements: cli.max_elements };
    let report = match &cli.command {
        Top::Ends(cmd) => match cmd {
            EndsCmd::Estimate { group, rmax, window } => ex::ends_estimate(&ctx.group(group)?, *rmax, *window)?,
            EndsCmd::Metric { group, pairs, corpus, max_depth, ball_radius, approximant, triples } => {
                let g = ctx.group(group)?;
                let rank = free_rank(&g)?;
                let pairs = match pairs {
                    Some(p) => read_pairs(&g, p)?,
                    None => metric_corpus(rank, *corpus, *max_depth),
                };
                ex::ends_metric(&g, &pairs, *ball_radius, *approximant, *triples, ctx.seed)?
            }
            EndsCmd::Holder { group, genset1, genset2, pairs, sample } => {
                let g = ctx.group(group)?;
                let rank = free_rank(&g)?;
                let pairs = match pairs {
                    Some(p) => read_pairs(&g, p)?,
                    None => metric_corpus(rank, *sample, 6),
                };
                ex::ends_holder(&g, &words(&g, genset1)?, &words(&g, genset2)?, &pairs)?
            }
            EndsCmd::Split { group, depth } => ex::cone_splitting(&ctx.group(group)?, *depth)?,
        },
        Top::Verify(cmd) => match cmd {
            VerifyCmd::Coupme { group, pairs, radius } => {
                let g = if group.factors.is_empty() {
                    ctx.resolve(group.group.as_deref(), group.group_file.as_deref())?
                } else {
                    ctx.parse(&format!("free_product([{}])", group.factors.join(", ")))?
                };
                ex::verify_coupme(&g, *pairs, *radius, ctx.seed)?
            }
            VerifyCmd::FreeproInj { group, factor, m, translators, radius } => {
                let g = ctx.pair(group)?;
                let index = if group.h.is_some() { 0 } else { factor.checked_sub(1).ok_or_else(|| Failure::Usage("--factor is 1-based".into()))? };
                let h = g.factor(index)?;
                let translators: Vec<String> = match translators {
                    Some(t) => t.split(',').map(|s| s.trim().to_string()).collect(),
                    None => h
                        .steps()
                        .iter()
                        .flat_map(|s| {
                            let s = h.format(s);
                            [s.clone(), format!("{s}^2")]
                        })
                        .collect(),
                };
                ex::verify_freepro_inj(&g, index, m, &translators, *radius)?
            }
            VerifyCmd::Notame { group, chain, n, g, radius } => {
                let spec = match (group, chain, n) {
                    (Some(s), _, _) => s.clone(),
                    (None, Some(c), Some(n)) => format!("{c}({n})"),
                    _ => return Err(Failure::Usage("give --group or --chain with --N".into())),
                };
                ex::verify_notame(&ctx.parse(&spec)?, g.as_deref(), *radius)?
            }
            VerifyCmd::Cardbool { groups, count, radius } => {
                let gs = groups.iter().map(|s| ctx.parse(s)).collect::<ends_core::Result<Vec<_>>>()?;
                ex::verify_cardbool(&gs, *count, *radius, ctx.seed)?
            }
            VerifyCmd::TreeDisjoint { group, depth, radius, export } => {
                let g = ctx.pair(group)?;
                if let Some(path) = export {
                    let dot = BassSerreTree::from_free_product(&g, *depth)?.to_dot();
                    std::fs::write(path, dot).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                }
                ex::verify_tree_disjoint(&g, *depth, *radius)?
            }
            VerifyCmd::Biends { group, set, radius } => ex::verify_biends(&ctx.group(group)?, set, *radius)?,
            VerifyCmd::Commensurated { group, set, side, radius } => {
                let sides: &[Side] = match side {
                    SideArg::Left => &[Side::Left],
                    SideArg::Right => &[Side::Right],
                    SideArg::Both => &[Side::Left, Side::Right],
                };
                ex::verify_commensurated(&ctx.group(group)?, set, sides, *radius)?
            }
        },
    };
    Ok(report)
}

fn table(r: &Report) -> String {
    let mut out = String::new();
    if let Some(g) = &r.group {
        out.push_str(&format!("group: {g}\n"));
    }
    if let Some(counts) = r.results.get("counts").and_then(|c| c.as_array()) {
        out.push_str("  r  components\n");
        for c in counts {
            out.push_str(&format!("{:>3}  {}\n", c[0].as_u64().unwrap_or(0), c[1]));
        }
        out.push_str(&format!("verdict: {}\n", r.results["verdict"].as_str().unwrap_or("?")));
    }
    for c in &r.checks {
        let status = match &c.verdict.status {
            Status::VerifiedExact => "verified (exact)".to_string(),
            Status::VerifiedToRadius { radius } => format!("verified to radius {radius}"),
            Status::Refuted => "REFUTED".to_string(),
        };
        out.push_str(&format!("{status:<22} {}\n", c.name));
        if let Some(w) = &c.verdict.witness {
            let parts: Vec<&str> = [w.translator.as_deref(), w.element.as_deref()].into_iter().flatten().collect();
            out.push_str(&format!("{:<22}   witness {}: {}\n", "", parts.join(", "), w.detail));
        }
    }
    out
}

fn csv(r: &Report) -> String {
    match r.results.get("counts").and_then(|c| c.as_array()) {
        Some(counts) => {
            let mut out = String::from("r,components\n");
            for c in counts {
                out.push_str(&format!("{},{}\n", c[0], c[1]));
            }
            out.push_str(&format!("verdict,{}\n", r.results["verdict"].as_str().unwrap_or("")));
            out
        }
        None => r.to_csv(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    report.command = std::env::args().skip(1).collect();
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
    }
    match cli.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", csv(&report)),
    }
    if !cli.quiet {
        eprint!("{}", table(&report));
    }
    if report.any_refuted() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
