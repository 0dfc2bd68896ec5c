//! Flat run configuration: built-in defaults, then an optional `key = value` file, then
//! command-line flags. Every command writes the resolved set next to its primary output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmd {
    Ingest,
    Train,
    Rank,
    Classify,
    Kappa,
    Neighbors,
}

impl Cmd {
    pub const ALL: [Cmd; 6] = [Cmd::Ingest, Cmd::Train, Cmd::Rank, Cmd::Classify, Cmd::Kappa, Cmd::Neighbors];

    pub fn name(self) -> &'static str {
        match self {
            Cmd::Ingest => "ingest",
            Cmd::Train => "train",
            Cmd::Rank => "rank",
            Cmd::Classify => "classify",
            Cmd::Kappa => "kappa",
            Cmd::Neighbors => "neighbors",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Cmd::Ingest => "Extract cleaned sentences from Stack Exchange dump XML",
            Cmd::Train => "Train skip-gram embeddings on a sentence file",
            Cmd::Rank => "Rank short texts by similarity to sampled source sentences",
            Cmd::Classify => "Cross-validate an SVM on labeled comments",
            Cmd::Kappa => "Cohen's kappa between two label files",
            Cmd::Neighbors => "Nearest neighbors of a word in an embedding model",
        }
    }

    pub fn from_name(name: &str) -> Option<Cmd> {
        Cmd::ALL.into_iter().find(|c| c.name() == name)
    }
}

pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
    pub commands: &'static [Cmd],
}

use Cmd::*;

const EMBED: &[Cmd] = &[Train, Rank, Classify, Neighbors];

pub const KEYS: &[Key] = &[
    // paths
    Key { name: "input", default: None, help: "dump XML file(s), comma-separated (ingest) or sentence file (train)", commands: &[Ingest, Train] },
    Key { name: "output", default: None, help: "primary output path", commands: &[Ingest, Train, Rank, Classify, Kappa] },
    Key { name: "model", default: None, help: "word2vec text model", commands: &[Rank, Classify, Neighbors] },
    Key { name: "tweets", default: None, help: "texts to rank, one per line", commands: &[Rank] },
    Key { name: "source", default: None, help: "source-platform sentence file", commands: &[Rank] },
    Key { name: "labels", default: None, help: "0/1 relevance per text line", commands: &[Rank] },
    Key { name: "comments", default: None, help: "labeled comments, label<TAB>text", commands: &[Classify] },
    Key { name: "svm_model", default: None, help: "also train on all comments and save the SVM here", commands: &[Classify] },
    Key { name: "a", default: None, help: "first rater's label file", commands: &[Kappa] },
    Key { name: "b", default: None, help: "second rater's label file", commands: &[Kappa] },
    // ingest
    Key { name: "dump_kind", default: Some("auto"), help: "posts | comments | auto (from file name)", commands: &[Ingest] },
    Key { name: "platform", default: Some("other"), help: "se | so | other", commands: &[Ingest] },
    Key { name: "titles", default: Some("true"), help: "emit post titles as documents", commands: &[Ingest] },
    // training
    Key { name: "window", default: Some("5"), help: "context window radius", commands: &[Train] },
    Key { name: "dim", default: Some("300"), help: "embedding dimension", commands: &[Train] },
    Key { name: "negatives", default: Some("10"), help: "negative samples per pair", commands: &[Train] },
    Key { name: "min_count", default: Some("5"), help: "minimum word frequency", commands: &[Train] },
    Key { name: "epochs", default: Some("5"), help: "passes over the corpus", commands: &[Train] },
    Key { name: "chunk_size", default: Some("50"), help: "sentences per work unit", commands: &[Train] },
    Key { name: "initial_lr", default: Some("0.025"), help: "starting learning rate", commands: &[Train] },
    Key { name: "workers", default: Some("1"), help: "threads (training: >1 is nondeterministic)", commands: &[Train, Classify] },
    Key { name: "subsample", default: Some("none"), help: "frequent-word subsampling threshold or none", commands: &[Train] },
    Key { name: "seed", default: Some("1"), help: "random seed", commands: &[Train, Rank, Classify] },
    Key { name: "precision", default: Some("f64"), help: "f32 | f64", commands: EMBED },
    // ranking
    Key { name: "method", default: Some("embedding"), help: "embedding | tfidf", commands: &[Rank] },
    Key { name: "aggregation", default: Some("max"), help: "max | mean", commands: &[Rank] },
    Key { name: "oov", default: Some("ignore"), help: "ignore | zero | lowfreq", commands: &[Rank, Classify] },
    Key { name: "max_chars", default: Some("140"), help: "longest eligible source sentence", commands: &[Rank] },
    Key { name: "sample_size", default: Some("1000"), help: "query sentences sampled", commands: &[Rank] },
    Key { name: "k", default: Some("10,50,100,150,200"), help: "accuracy@K cutoffs, comma-separated", commands: &[Rank] },
    // classification
    Key { name: "features", default: Some("embedding"), help: "embedding | ntf", commands: &[Classify] },
    Key { name: "kernel", default: Some("puk"), help: "linear | rbf | puk", commands: &[Classify] },
    Key { name: "gamma", default: Some("1"), help: "rbf width", commands: &[Classify] },
    Key { name: "omega", default: Some("1"), help: "puk shape", commands: &[Classify] },
    Key { name: "sigma", default: Some("1"), help: "puk width", commands: &[Classify] },
    Key { name: "c", default: Some("1"), help: "SVM box constraint", commands: &[Classify] },
    Key { name: "tol", default: Some("0.001"), help: "SMO KKT tolerance", commands: &[Classify] },
    Key { name: "folds", default: Some("10"), help: "cross-validation folds", commands: &[Classify] },
    // neighbors
    Key { name: "word", default: None, help: "query word", commands: &[Neighbors] },
    Key { name: "top", default: Some("10"), help: "neighbors to list", commands: &[Neighbors] },
];

pub fn keys_for(cmd: Cmd) -> impl Iterator<Item = &'static Key> {
    KEYS.iter().filter(move |k| k.commands.contains(&cmd))
}

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config_file(text: &str, cmd: Cmd) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        if !keys_for(cmd).any(|k| k.name == key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key {key:?} for {}",
                i + 1,
                cmd.name()
            )));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    cmd: Cmd,
    values: BTreeMap<&'static str, String>,
}

impl RunConfig {
    pub fn resolve(
        cmd: Cmd,
        file: Option<&Path>,
        flags: impl IntoIterator<Item = (&'static str, String)>,
    ) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for key in keys_for(cmd) {
            if let Some(d) = key.default {
                values.insert(key.name, d.to_string());
            }
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            for (k, v) in parse_config_file(&text, cmd)? {
                let key = keys_for(cmd).find(|x| x.name == k).expect("validated").name;
                values.insert(key, v);
            }
        }
        for (k, v) in flags {
            values.insert(k, v);
        }
        Ok(RunConfig { cmd, values })
    }

    pub fn cmd(&self) -> Cmd {
        self.cmd
    }

    pub fn opt(&self, key: &str) -> Option<&str> {
        debug_assert!(keys_for(self.cmd).any(|k| k.name == key), "{key} not declared for {:?}", self.cmd);
        self.values.get(key).map(String::as_str)
    }

    pub fn str(&self, key: &str) -> Result<&str, CliError> {
        self.opt(key)
            .ok_or_else(|| CliError::Usage(format!("missing required --{}", flag_name(key))))
    }

    pub fn get<V: FromStr>(&self, key: &str) -> Result<V, CliError> {
        let raw = self.str(key)?;
        raw.parse()
            .map_err(|_| CliError::Usage(format!("invalid value {raw:?} for {key}")))
    }

    pub fn list<V: FromStr>(&self, key: &str) -> Result<Vec<V>, CliError> {
        self.str(key)?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| CliError::Usage(format!("invalid entry {s:?} in {key}"))))
            .collect()
    }

    /// `key = value` lines in declaration order; loading this file replays the run.
    pub fn render(&self) -> String {
        let mut out = format!("# crossplat {} resolved configuration\n", self.cmd.name());
        for key in keys_for(self.cmd) {
            if let Some(v) = self.values.get(key.name) {
                let _ = writeln!(out, "{} = {v}", key.name);
            }
        }
        out
    }

    pub fn write_sidecar(&self, primary: &Path) -> Result<(), CliError> {
        let path = sibling(primary, "config");
        std::fs::write(&path, self.render()).map_err(|e| CliError::Core(crossplat::Error::io(&path, e)))
    }
}

/// `out.tsv` + `metrics.json` → `out.tsv.metrics.json`
pub fn sibling(primary: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    s.into()
}
