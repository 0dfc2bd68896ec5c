use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crossplat::embedding::{load_model, save_model, EmbeddingModel, Trainer, TrainingConfig};
use crossplat::evaluation::{accuracy_at_k, cohen_kappa, MetricReport};
use crossplat::ingest::{
    load_binary_labels, load_labeled_comments, load_sentences, load_tweets, preprocess_document, DocumentKind,
    DumpKind, DumpReader, Source,
};
use crossplat::ranking::{rank, select_instances, Aggregation, RankedList};
use crossplat::svm::{
    cross_validate, normalized_tf_features, train_smo, CvConfig, Features, KernelSpec, NtfVocabulary, SvmConfig,
};
use crossplat::tfidf::{rank_tfidf, TfidfModel};
use crossplat::vectorize::{OovPolicy, Vectorizer};
use crossplat::{Error, Real};

use crate::config::{sibling, Cmd, RunConfig};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cfg: &RunConfig) -> Result<()> {
    match cfg.cmd() {
        Cmd::Ingest => ingest(cfg),
        Cmd::Kappa => kappa(cfg),
        cmd => match cfg.str("precision")? {
            "f64" => with_precision::<f64>(cmd, cfg),
            "f32" => with_precision::<f32>(cmd, cfg),
            other => Err(CliError::Usage(format!("precision must be f32 or f64, got {other:?}"))),
        },
    }
}

fn with_precision<T: Real>(cmd: Cmd, cfg: &RunConfig) -> Result<()> {
    match cmd {
        Cmd::Train => train::<T>(cfg),
        Cmd::Rank => rank_cmd::<T>(cfg),
        Cmd::Classify => classify::<T>(cfg),
        Cmd::Neighbors => neighbors::<T>(cfg),
        Cmd::Ingest | Cmd::Kappa => unreachable!("dispatched without a scalar type"),
    }
}

fn path(cfg: &RunConfig, key: &str) -> Result<PathBuf> {
    Ok(PathBuf::from(cfg.str(key)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e).into())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e).into())
}

fn parse_enum<V: std::str::FromStr>(cfg: &RunConfig, key: &str) -> Result<V> {
    let raw = cfg.str(key)?;
    raw.parse()
        .map_err(|_| CliError::Usage(format!("invalid value {raw:?} for {key}")))
}

// ---------------------------------------------------------------------------------- ingest

fn dump_kind(setting: &str, file: &Path) -> Result<DumpKind> {
    match setting {
        "posts" => Ok(DumpKind::Posts),
        "comments" => Ok(DumpKind::Comments),
        "auto" => {
            let name = file.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
            Ok(if name.contains("comments") { DumpKind::Comments } else { DumpKind::Posts })
        }
        other => Err(CliError::Usage(format!("dump_kind must be posts, comments or auto, got {other:?}"))),
    }
}

fn ingest(cfg: &RunConfig) -> Result<()> {
    let inputs: Vec<String> = cfg.list("input")?;
    if inputs.is_empty() {
        return Err(CliError::Usage("no --input dump given".into()));
    }
    let output = path(cfg, "output")?;
    let platform = match cfg.str("platform")? {
        "se" => Source::StackExchangeSE,
        "so" => Source::StackOverflow,
        "other" => Source::Other,
        other => return Err(CliError::Usage(format!("platform must be se, so or other, got {other:?}"))),
    };
    let titles: bool = cfg.get("titles")?;
    let mut out = create(&output)?;
    let mut block = String::new();
    let mut total_docs = 0usize;
    let mut total_sentences = 0usize;
    for input in &inputs {
        let file = Path::new(input);
        let kind = dump_kind(cfg.str("dump_kind")?, file)?;
        let stream = BufReader::new(File::open(file).map_err(|e| Error::io(file, e))?);
        let mut reader = DumpReader::new(stream, kind).with_source(platform);
        let (mut docs, mut sentences) = (0usize, 0usize);
        for doc in reader.by_ref() {
            let doc = doc?;
            if doc.kind == DocumentKind::Title && !titles {
                continue;
            }
            docs += 1;
            for s in preprocess_document(&doc.body, &doc.id) {
                writeln!(out, "{}", s.text).map_err(|e| Error::io(&output, e))?;
                sentences += 1;
            }
        }
        let stats = reader.stats();
        let _ = writeln!(
            block,
            "[{input}]\nrows = {}\nbodies = {}\ntitles = {}\nskipped = {}\ndocuments = {docs}\nsentences = {sentences}\n",
            stats.rows, stats.bodies, stats.titles, stats.skipped
        );
        total_docs += docs;
        total_sentences += sentences;
    }
    out.flush().map_err(|e| Error::io(&output, e))?;
    if total_sentences == 0 {
        return Err(Error::Data("the dump yielded no sentences".into()).into());
    }
    let _ = writeln!(block, "[total]\ndocuments = {total_docs}\nsentences = {total_sentences}");
    write_file(&sibling(&output, "stats.txt"), &block)?;
    cfg.write_sidecar(&output)?;
    print!("{block}");
    Ok(())
}

// ----------------------------------------------------------------------------------- train

fn training_config(cfg: &RunConfig) -> Result<TrainingConfig> {
    let subsample = match cfg.str("subsample")? {
        "none" => None,
        _ => Some(cfg.get("subsample")?),
    };
    Ok(TrainingConfig {
        window: cfg.get("window")?,
        dim: cfg.get("dim")?,
        negatives: cfg.get("negatives")?,
        min_count: cfg.get("min_count")?,
        epochs: cfg.get("epochs")?,
        chunk_size: cfg.get("chunk_size")?,
        initial_lr: cfg.get("initial_lr")?,
        seed: cfg.get("seed")?,
        workers: cfg.get("workers")?,
        subsample,
    })
}

fn train<T: Real>(cfg: &RunConfig) -> Result<()> {
    let config = training_config(cfg)?;
    let output = path(cfg, "output")?;
    let sentences = load_sentences(path(cfg, "input")?)?;
    let mut trainer = Trainer::<T>::new(&sentences, config.clone())?;
    log::info!(
        "{} sentences, {} trainable, vocabulary {}",
        sentences.len(),
        trainer.trainable_sentences(),
        trainer.vocab().len()
    );
    for epoch in 0..config.epochs {
        trainer.run_epoch()?;
        log::info!("epoch {} of {} done", epoch + 1, config.epochs);
    }
    let model = trainer.into_model()?;
    save_model(&model, &output)?;
    cfg.write_sidecar(&output)?;
    println!("sentences = {}", sentences.len());
    println!("vocabulary size = {}", model.len());
    println!("dim = {}", model.dim());
    Ok(())
}

// ------------------------------------------------------------------------------------ rank

fn raw_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e).into())
}

fn rank_cmd<T: Real>(cfg: &RunConfig) -> Result<()> {
    let output = path(cfg, "output")?;
    let tweets_path = path(cfg, "tweets")?;
    let tweets = load_tweets(&tweets_path)?;
    let texts = raw_lines(&tweets_path)?;
    let source = load_sentences(path(cfg, "source")?)?;
    let aggregation: Aggregation = parse_enum(cfg, "aggregation")?;
    let query = select_instances(
        source.iter().cloned(),
        cfg.get("max_chars")?,
        cfg.get("sample_size")?,
        cfg.get("seed")?,
    )?;
    log::info!("{} of {} source sentences eligible, {} sampled", query.eligible, source.len(), query.len());

    let method = cfg.str("method")?;
    let scored: Scored<T> = match method {
        "embedding" => {
            let model: EmbeddingModel<T> = load_model(path(cfg, "model")?)?;
            let policy: OovPolicy = parse_enum(cfg, "oov")?;
            Scored::Embedding(rank(&tweets, &query, &model, policy, aggregation)?)
        }
        "tfidf" => {
            let model = TfidfModel::fit(&source)?;
            Scored::Tfidf(rank_tfidf(&tweets, &query, &model, aggregation)?)
        }
        other => return Err(CliError::Usage(format!("method must be embedding or tfidf, got {other:?}"))),
    };

    let mut out = create(&output)?;
    match &scored {
        Scored::Embedding(r) => r.write_tsv(&mut out, |i| texts[i].as_str())?,
        Scored::Tfidf(r) => r.write_tsv(&mut out, |i| texts[i].as_str())?,
    }
    cfg.write_sidecar(&output)?;
    println!("ranked {} texts against {} query sentences ({method}, {})", tweets.len(), query.len(), aggregation.as_str());

    if let Some(labels_path) = cfg.opt("labels") {
        let labels = load_binary_labels(labels_path)?;
        if labels.len() != tweets.len() {
            return Err(Error::Data(format!("{} labels for {} texts", labels.len(), tweets.len())).into());
        }
        let by_id: HashMap<String, bool> = tweets.iter().map(|t| t.origin_id.clone()).zip(labels).collect();
        let mut acc = std::collections::BTreeMap::new();
        for k in cfg.list::<usize>("k")? {
            if k > tweets.len() {
                log::warn!("skipping accuracy@{k}: only {} texts ranked", tweets.len());
                continue;
            }
            let value = match &scored {
                Scored::Embedding(r) => accuracy_at_k(r, &by_id, k)?,
                Scored::Tfidf(r) => accuracy_at_k(r, &by_id, k)?,
            };
            acc.insert(k, value);
        }
        let report = MetricReport { accuracy_at_k: Some(acc), ..MetricReport::default() };
        write_reports(&sibling(&output, "metrics"), &report)?;
        print!("{}", report.to_key_value());
    }
    Ok(())
}

enum Scored<T> {
    Embedding(RankedList<T>),
    Tfidf(RankedList<f64>),
}

/// `<base>.txt` and `<base>.json`
fn write_reports(base: &Path, report: &MetricReport) -> Result<()> {
    write_file(&sibling(base, "txt"), &report.to_key_value())?;
    write_file(&sibling(base, "json"), &report.to_json())
}

// -------------------------------------------------------------------------------- classify

fn kernel<T: Real>(cfg: &RunConfig) -> Result<KernelSpec<T>> {
    let k = match cfg.str("kernel")? {
        "linear" => KernelSpec::Linear,
        "rbf" => KernelSpec::Rbf { gamma: cfg.get("gamma")? },
        "puk" => KernelSpec::Puk { omega: cfg.get("omega")?, sigma: cfg.get("sigma")? },
        other => return Err(CliError::Usage(format!("kernel must be linear, rbf or puk, got {other:?}"))),
    };
    k.validate()?;
    Ok(k)
}

fn classify<T: Real>(cfg: &RunConfig) -> Result<()> {
    let output = path(cfg, "output")?;
    let data = load_labeled_comments(path(cfg, "comments")?)?;
    let labels: Vec<_> = data.iter().map(|(_, l)| *l).collect();
    let tokens: Vec<Vec<String>> = data.iter().map(|(s, _)| s.tokens.clone()).collect();
    let svm = SvmConfig {
        c: cfg.get("c")?,
        kernel: kernel::<T>(cfg)?,
        tol: cfg.get("tol")?,
        max_iter: 0,
        seed: cfg.get("seed")?,
    };
    let cv = CvConfig { k: cfg.get("folds")?, seed: cfg.get("seed")?, svm: svm.clone(), workers: cfg.get("workers")? };

    let feature_kind = cfg.str("features")?;
    let dense: Vec<Vec<T>>;
    let features = match feature_kind {
        "embedding" => {
            let model: EmbeddingModel<T> = load_model(path(cfg, "model")?)?;
            let vectorizer = Vectorizer::new(&model, parse_enum(cfg, "oov")?);
            dense = tokens.iter().map(|t| vectorizer.vectorize(t).values).collect();
            Features::Dense(&dense)
        }
        "ntf" => Features::NormalizedTf(&tokens),
        other => return Err(CliError::Usage(format!("features must be embedding or ntf, got {other:?}"))),
    };
    let report = cross_validate(features, &labels, &cv)?;

    let mut text = report.report.to_key_value();
    for f in &report.folds {
        let r = &f.report;
        let _ = writeln!(
            text,
            "fold.{}.f_measure = {}  # validation {}, support vectors {}",
            f.fold,
            r.f_measure.unwrap_or(0.0),
            f.validation_size,
            f.n_support_vectors
        );
    }
    write_file(&output, &text)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Invariant(e.to_string()))? + "\n";
    write_file(&sibling(&output, "json"), &json)?;
    cfg.write_sidecar(&output)?;
    println!(
        "{} comments ({} informative), {}-fold cross-validation on {feature_kind} features",
        labels.len(),
        labels.iter().filter(|l| l.is_positive()).count(),
        cv.k
    );
    print!("{}", report.report.to_key_value());

    if let Some(model_path) = cfg.opt("svm_model") {
        let model_path = PathBuf::from(model_path);
        let y: Vec<i8> = labels.iter().map(|l| l.sign()).collect();
        let x: Vec<Vec<T>> = match features {
            Features::Dense(d) => d.to_vec(),
            Features::NormalizedTf(docs) => {
                let refs: Vec<&[String]> = docs.iter().map(Vec::as_slice).collect();
                let vocab = NtfVocabulary::build(&refs);
                write_file(&sibling(&model_path, "vocab"), &(vocab.words().join("\n") + "\n"))?;
                docs.iter().map(|d| normalized_tf_features(d, &vocab)).collect()
            }
        };
        let model = train_smo(&x, &y, &svm)?;
        let mut out = create(&model_path)?;
        model.write(&mut out)?;
        println!("saved SVM with {} support vectors", model.support_vectors.len());
    }
    Ok(())
}

// ----------------------------------------------------------------------- kappa, neighbors

fn kappa(cfg: &RunConfig) -> Result<()> {
    let (a, b) = (path(cfg, "a")?, path(cfg, "b")?);
    let (a, b) = (load_binary_labels(a)?, load_binary_labels(b)?);
    let k = cohen_kappa(&a, &b)?;
    if let Some(out) = cfg.opt("output") {
        let out = PathBuf::from(out);
        let report = MetricReport { kappa: Some(k), ..MetricReport::default() };
        write_reports(&out, &report)?;
        cfg.write_sidecar(&out)?;
    }
    println!("kappa = {k}");
    Ok(())
}

fn neighbors<T: Real>(cfg: &RunConfig) -> Result<()> {
    let model: EmbeddingModel<T> = load_model(path(cfg, "model")?)?;
    for (word, cos) in model.nearest_neighbors(cfg.str("word")?, cfg.get("top")?)? {
        println!("{word}\t{cos:.6}");
    }
    Ok(())
}
