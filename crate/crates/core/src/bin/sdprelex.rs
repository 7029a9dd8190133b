use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use sdprelex::corpus::{generate_candidates, load_corpus, read_candidates, write_candidates, Candidate};
use sdprelex::harness::{
    crossval, generate_synthetic_corpus, paired_t_test, prf1, write_confusion, write_report,
    Confusion, FoldPlan, ReportFormat, SynthSpec,
};
use sdprelex::parser::{evaluate_uas_las, train_parser, ParserHyper, ParserModel};
use sdprelex::relex::{load_word_vectors, train_relex, RelexHyper, RelexModel, VectorFormat, WordVectors};
use sdprelex::sdp::{extract, read_instances};
use sdprelex::treebank::{read_conllu, read_conllu_with, write_conllu, ReadMode, Treebank};
use sdprelex::{Error, Result};

#[derive(Parser)]
#[command(name = "sdprelex", version, about = "Shortest-dependency-path relation extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a CoNLL-U file and drop non-projective sentences.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Keep non-projective sentences.
        #[arg(long)]
        keep_nonprojective: bool,
    },
    /// Train the transition parser on gold trees.
    TrainParser {
        train: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        hidden: Option<usize>,
    },
    /// Parse tagged CoNLL-U; existing heads are ignored.
    Parse {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// UAS and LAS of a parser on gold trees.
    EvalParser {
        gold: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Write one path instance per candidate pair.
    ExtractSdp {
        /// Parsed CoNLL-U with `sent_id = doc:line` comments.
        parsed: PathBuf,
        /// i2b2 directory; candidates are generated from it.
        #[arg(long, conflicts_with = "candidates", required_unless_present = "candidates")]
        corpus: Option<PathBuf>,
        /// Candidate file instead of an i2b2 directory.
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the candidate file.
        #[arg(long)]
        write_candidates: Option<PathBuf>,
    },
    /// Train the relation classifier on path instances.
    TrainRe {
        train: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        relex: RelexArgs,
    },
    /// Label path instances; prints metrics when gold labels are present.
    PredictRe {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArg,
    },
    /// k-fold cross-validation of the full pipeline.
    Crossval {
        /// i2b2 directory.
        corpus: PathBuf,
        /// Tagged CoNLL-U with `sent_id = doc:line` comments.
        #[arg(long)]
        tagged: PathBuf,
        /// Trained parser.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        relex: RelexArgs,
        #[command(flatten)]
        report: ReportArg,
        /// Also write the pooled confusion matrix.
        #[arg(long)]
        confusion: Option<PathBuf>,
    },
    /// One-sided paired t-test on two comma-separated score lists.
    Ttest {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Generate a synthetic i2b2 corpus with a gold treebank.
    Synth {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 20)]
        documents: usize,
        #[arg(long, default_value_t = 10)]
        sentences: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Args)]
struct RelexArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long, value_parser = dropout_rate)]
    dropout: Option<f64>,
    /// Pretrained word vectors.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ReportArg {
    #[arg(long, value_enum, default_value_t = Report::Tsv)]
    report: Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Binary,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Report {
    Tsv,
    Json,
}

impl From<Report> for ReportFormat {
    fn from(r: Report) -> Self {
        match r {
            Report::Tsv => ReportFormat::Tsv,
            Report::Json => ReportFormat::Json,
        }
    }
}

impl RelexArgs {
    fn hyper(&self) -> RelexHyper {
        let d = RelexHyper::default();
        RelexHyper {
            seed: self.seed.unwrap_or(d.seed),
            epochs: self.epochs.unwrap_or(d.epochs),
            hidden: self.hidden.unwrap_or(d.hidden),
            dropout: self.dropout.unwrap_or(d.dropout),
            ..d
        }
    }

    fn vectors(&self) -> Result<Option<WordVectors>> {
        let Some(path) = &self.embeddings else {
            return Ok(None);
        };
        let format = match self.format {
            Format::Text => VectorFormat::Text,
            Format::Binary => VectorFormat::Binary,
        };
        let v = load_word_vectors(BufReader::new(File::open(path)?), format)?;
        info!("loaded {} vectors of dimension {}", v.len(), v.dim());
        Ok(Some(v))
    }
}

fn dropout_rate(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{}' is not a number", s))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err("dropout must be in [0, 1)".into())
    }
}

fn open_conllu(path: &Path) -> Result<Treebank> {
    read_conllu(BufReader::new(File::open(path)?))
}

fn open_tagged(path: &Path) -> Result<Treebank> {
    read_conllu_with(BufReader::new(File::open(path)?), ReadMode::TokensOnly)
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_parser(path: &Path) -> Result<ParserModel> {
    ParserModel::load(BufReader::new(File::open(path)?))
}

fn parse_scores(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("'{}' is not a number", x.trim())))
        })
        .collect()
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Convert {
            input,
            output,
            keep_nonprojective,
        } => {
            let tb = open_conllu(&input)?;
            for (i, s) in tb.sentences.iter().enumerate() {
                s.validate(&s.describe(i + 1))?;
            }
            let (kept, dropped) = if keep_nonprojective {
                (tb, 0)
            } else {
                sdprelex::parser::filter_projective(&tb)
            };
            eprintln!("{} sentences written, {} non-projective dropped", kept.len(), dropped);
            write_conllu(&kept, BufWriter::new(File::create(output)?))
        }
        Command::TrainParser {
            train,
            model,
            seed,
            epochs,
            hidden,
        } => {
            let d = ParserHyper::default();
            let hyper = ParserHyper {
                seed: seed.unwrap_or(d.seed),
                epochs: epochs.unwrap_or(d.epochs),
                hidden: hidden.unwrap_or(d.hidden),
                ..d
            };
            let trained = train_parser(&open_conllu(&train)?, &hyper)?;
            if let Some(last) = trained.log.last() {
                eprintln!(
                    "epoch {}: loss {:.4}, transition accuracy {:.4}; {} non-projective excluded",
                    last.epoch, last.loss, last.accuracy, trained.excluded
                );
            }
            trained.model.save(BufWriter::new(File::create(model)?))
        }
        Command::Parse { input, model, output } => {
            let parser = load_parser(&model)?;
            let parsed = parser.parse_treebank(&open_tagged(&input)?);
            write_conllu(&parsed, sink(&output)?)
        }
        Command::EvalParser { gold, model, report } => {
            let gold = open_conllu(&gold)?;
            let parsed = load_parser(&model)?.parse_treebank(&gold);
            let s = evaluate_uas_las(&gold, &parsed)?;
            let mut out = io::stdout().lock();
            match report.report {
                Report::Tsv => writeln!(out, "uas\tlas\ttokens\n{:.4}\t{:.4}\t{}", s.uas, s.las, s.tokens)?,
                Report::Json => writeln!(out, "{}", serde_json::to_string(&s).expect("serializable"))?,
            }
            Ok(())
        }
        Command::ExtractSdp {
            parsed,
            corpus,
            candidates,
            output,
            write_candidates: cand_out,
        } => {
            let cands: Vec<Candidate> = match (&corpus, &candidates) {
                (Some(dir), _) => load_corpus(dir)?
                    .iter()
                    .flat_map(|d| generate_candidates(d).records)
                    .map(|r| Candidate::from_record(&r))
                    .collect(),
                (None, Some(path)) => read_candidates(&fs::read_to_string(path)?)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            if let Some(p) = cand_out {
                write_candidates(&cands, BufWriter::new(File::create(p)?))?;
            }
            let tb = open_conllu(&parsed)?;
            let by_id: std::collections::HashMap<&str, _> =
                tb.sentences.iter().filter_map(|s| s.sent_id().map(|id| (id, s))).collect();
            let mut out = sink(&output)?;
            for c in &cands {
                let s = by_id
                    .get(c.sent_id().as_str())
                    .ok_or_else(|| Error::Invalid(format!("no parsed sentence {}", c.sent_id())))?;
                let (a, b) = c.spans();
                writeln!(out, "{}", extract(s, &a, &b, c.label)?)?;
            }
            Ok(())
        }
        Command::TrainRe { train, model, relex } => {
            let data = read_instances(&fs::read_to_string(train)?)?;
            let trained = train_relex(&data, &relex.hyper(), relex.vectors()?.as_ref())?;
            if let Some(last) = trained.log.last() {
                eprintln!("epoch {}: loss {:.4}, accuracy {:.4}", last.epoch, last.loss, last.accuracy);
            }
            trained.model.save(BufWriter::new(File::create(model)?))
        }
        Command::PredictRe {
            input,
            model,
            output,
            report,
        } => {
            let model = RelexModel::load(BufReader::new(File::open(model)?))?;
            let data = read_instances(&fs::read_to_string(input)?)?;
            let mut out = sink(&output)?;
            let mut confusion = Confusion::new();
            for inst in &data {
                let label = model.predict(inst)?;
                confusion.add(inst.label, label);
                writeln!(out, "{}", label)?;
            }
            out.flush()?;
            let m = prf1(&confusion);
            match report.report {
                Report::Json => eprintln!("{}", serde_json::to_string(&m).expect("serializable")),
                Report::Tsv => eprintln!(
                    "micro_f1\t{:.4}\nmicro_f1_excluding_none\t{:.4}\nmacro_f1\t{:.4}",
                    m.micro.f1, m.micro_excluding_none.f1, m.macro_avg.f1
                ),
            }
            Ok(())
        }
        Command::Crossval {
            corpus,
            tagged,
            model,
            folds,
            relex,
            report,
            confusion,
        } => {
            let docs = load_corpus(&corpus)?;
            let ids: Vec<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
            let hyper = relex.hyper();
            let plan = FoldPlan::new(&ids, folds, hyper.seed)?;
            let parser = load_parser(&model)?;
            let sentences = open_tagged(&tagged)?;
            let r = crossval(&docs, &sentences, &plan, &parser, &hyper, relex.vectors()?.as_ref())?;
            if let Some(p) = confusion {
                write_confusion(&r.confusion, BufWriter::new(File::create(p)?))?;
            }
            write_report(&r, report.report.into(), io::stdout().lock())
        }
        Command::Ttest { a, b, report } => {
            let r = paired_t_test(&parse_scores(&a)?, &parse_scores(&b)?)?;
            match report.report {
                Report::Tsv => println!("t\tdf\tp\n{:.6}\t{}\t{:.6e}", r.t, r.df, r.p),
                Report::Json => println!("{}", serde_json::to_string(&r).expect("serializable")),
            }
            Ok(())
        }
        Command::Synth {
            output,
            documents,
            sentences,
            seed,
        } => {
            let c = generate_synthetic_corpus(&SynthSpec {
                documents,
                sentences_per_document: sentences,
                seed,
            })?;
            c.write(&output)?;
            let cands: usize = c.documents.iter().map(|d| generate_candidates(d).records.len()).sum();
            eprintln!(
                "{} documents, {} sentences, {} candidates in {}",
                c.documents.len(),
                c.treebank.len(),
                cands,
                output.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
