//! Library results checked against brute-force recomputation.

mod common;

use std::collections::{BTreeMap, HashMap};

use crossplat::embedding::{sgns_pair_loss, train, EmbeddingModel, Trainer, TrainingConfig, Vocabulary};
use crossplat::ingest::{normalize, parse_dump, CommentLabel, DumpKind};
use crossplat::ranking::select_instances;
use crossplat::svm::{
    cross_validate, normalized_tf_features, solve_smo, solve_smo_weighted, train_smo, CvConfig, Features,
    KernelSpec, NtfVocabulary, SvmConfig, SvmModel,
};
use crossplat::Error;
use nalgebra::DVector;
use rand::Rng;

use common::*;

#[test]
fn vocabulary_matches_counting() {
    let corpus = planted_corpus(21, 200);
    let vocab = Vocabulary::build(&corpus, 5).unwrap();
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in &corpus {
        for t in &s.tokens {
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut expected: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= 5).collect();
    expected.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    assert_eq!(vocab.len(), expected.len());
    for (i, (w, c)) in expected.iter().enumerate() {
        assert_eq!(vocab.word(i), *w);
        assert_eq!(vocab.count(i), Some(*c));
    }
    assert_eq!(vocab.total_tokens(), corpus.iter().map(|s| s.tokens.len() as u64).sum::<u64>());
}

#[test]
fn min_count_above_every_frequency_is_corpus_too_small() {
    let corpus = planted_corpus(22, 10);
    let err = train::<f64>(&corpus, &TrainingConfig { min_count: 100_000, ..TrainingConfig::default() }).unwrap_err();
    assert!(matches!(err, Error::CorpusTooSmall { .. }));
    assert!(err.to_string().contains("corpus too small"));
}

#[test]
fn neighbors_match_brute_force() {
    let model: EmbeddingModel<f64> = train(&planted_corpus(23, 300), &TrainingConfig { dim: 16, ..TrainingConfig::default() }).unwrap();
    for word in ["sw0x", "ot0y", "the"] {
        let q = model.get(word).unwrap();
        let mut all: Vec<(usize, f64)> = (0..model.len())
            .filter(|&i| model.vocab().word(i) != word)
            .map(|i| {
                let v = model.vector_at(i);
                let dot: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
                let n = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
                (i, dot / (n(q) * n(v)))
            })
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let got = model.nearest_neighbors(word, 5).unwrap();
        for ((w, c), (i, e)) in got.iter().zip(&all) {
            assert_eq!(w, model.vocab().word(*i));
            assert!((c - e).abs() < 1e-12);
        }
    }
}

#[test]
fn planted_topics_cluster() {
    let model: EmbeddingModel<f64> = train(&planted_corpus(24, 1000), &TrainingConfig { dim: 32, ..TrainingConfig::default() }).unwrap();
    for (word, prefix) in [("sw1x", "sw"), ("ot1y", "ot")] {
        let nn = model.nearest_neighbors(word, 5).unwrap();
        let same = nn.iter().filter(|(w, _)| w.starts_with(prefix)).count();
        assert!(same >= 4, "{word}: {nn:?}");
    }
}

#[test]
fn training_lowers_held_out_pair_loss() {
    let corpus = planted_corpus(25, 300);
    let config = TrainingConfig { dim: 20, ..TrainingConfig::default() };
    let mut trainer = Trainer::<f64>::new(&corpus, config).unwrap();
    let vocab = trainer.vocab().clone();
    let mut r = rng(26);
    let mut grid = Vec::new();
    for s in corpus.iter().take(200) {
        let ids: Vec<usize> = s.tokens.iter().filter_map(|t| vocab.get(t)).collect();
        if ids.len() >= 2 {
            let negs: Vec<usize> = (0..5).map(|_| r.random_range(0..vocab.len())).collect();
            grid.push((ids[0], ids[1], negs));
        }
    }
    let mean = |t: &Trainer<f64>| {
        grid.iter().map(|(c, x, n)| sgns_pair_loss(*c, *x, n, t.weights()).unwrap()).sum::<f64>() / grid.len() as f64
    };
    let before = mean(&trainer);
    trainer.run().unwrap();
    let after = mean(&trainer);
    assert!(after < before, "{after} >= {before}");
}

#[test]
fn parallel_training_uses_same_vocabulary() {
    let corpus = planted_corpus(27, 300);
    let base = TrainingConfig { dim: 16, ..TrainingConfig::default() };
    let seq: EmbeddingModel<f64> = train(&corpus, &base).unwrap();
    let par: EmbeddingModel<f64> = train(&corpus, &TrainingConfig { workers: 4, ..base }).unwrap();
    assert_eq!(seq.vocab().words(), par.vocab().words());
    assert!(par.vectors().as_slice().iter().all(|x| x.is_finite()));
}

#[test]
fn reservoir_is_uniform() {
    let population: Vec<_> = (0..10).map(|i| normalize(&format!("word{i}"))).collect();
    let trials = 100_000;
    let mut hits = BTreeMap::new();
    for seed in 0..trials {
        let q = select_instances(population.clone(), 140, 3, seed).unwrap();
        assert_eq!(q.len(), 3);
        for s in q.sentences {
            *hits.entry(s.text).or_insert(0u32) += 1;
        }
    }
    assert_eq!(hits.len(), 10);
    for (word, h) in hits {
        let p = h as f64 / trials as f64;
        assert!((p - 0.3).abs() < 0.01, "{word}: {p}");
    }
}

// ------------------------------------------------------------------------------------ ingest

const THREE_POSTS: &str = r#"<?xml version="1.0" encoding="utf-8"?>
<posts>
  <row Id="1" PostTypeId="1" Title="How do I free memory?" Body="&lt;p&gt;I call malloc. Then what?&lt;/p&gt;" />
  <row Id="2" PostTypeId="2" Body="&lt;p&gt;Use &lt;code&gt;free(ptr)&lt;/code&gt; once. Do not free twice!&lt;/p&gt;" />
  <row Id="3" PostTypeId="2" Body="&lt;p&gt;See the manual, e.g. man 3 free.&lt;/p&gt;" />
</posts>
"#;

#[test]
fn three_post_fixture_sentence_count() {
    let docs: Vec<_> = parse_dump(THREE_POSTS.as_bytes(), DumpKind::Posts).collect::<Result<_, _>>().unwrap();
    assert_eq!(docs.len(), 4);
    let sentences: Vec<_> = docs
        .iter()
        .flat_map(|d| crossplat::ingest::preprocess_document(&d.body, &d.id))
        .collect();
    // body 1: 2, title 1: 1, body 2: 2, body 3: 1 ("e.g." does not end a sentence)
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    assert_eq!(
        texts,
        [
            "i call malloc",
            "then what",
            "how do i free memory",
            "use free ptr once",
            "do not free twice",
            "see the manual e g man free"
        ]
    );
}

#[test]
fn malformed_row_reports_its_offset() {
    let xml = "<posts>\n<row Id=\"1\" Body=\"a\"/>\n<row Id=\"2\" Body=b/>\n<row Id=\"3\" Body=\"c\"/>\n</posts>";
    let bad = xml.find("<row Id=\"2\"").unwrap() as u64;
    let mut docs = parse_dump(xml.as_bytes(), DumpKind::Posts);
    assert_eq!(docs.next().unwrap().unwrap().id, "1");
    match docs.next().unwrap() {
        Err(Error::Xml { offset, .. }) => assert_eq!(offset, bad),
        other => panic!("expected an XML error, got {other:?}"),
    }
    assert!(docs.next().is_none());
}

#[test]
fn truncated_document_is_error() {
    let xml = "<posts>\n<row Id=\"1\" Body=\"a\"/>\n<row Id=\"2\" Bo";
    let results: Vec<_> = parse_dump(xml.as_bytes(), DumpKind::Posts).collect();
    assert!(results.last().unwrap().is_err());
}

// --------------------------------------------------------------------------------------- svm

#[test]
fn two_points_linear() {
    let x: Vec<Vec<f64>> = vec![vec![2.0, 1.0], vec![-1.0, 0.0]];
    let model = train_smo(&x, &[1, -1], &SvmConfig { kernel: KernelSpec::Linear, ..SvmConfig::default() }).unwrap();
    assert!(model.decision_value(&x[0]).unwrap() > 0.0);
    assert!(model.decision_value(&x[1]).unwrap() < 0.0);
    // the boundary passes through the midpoint
    assert!(model.decision_value(&[0.5, 0.5]).unwrap().abs() < 1e-3);
}

#[test]
fn single_class_is_error() {
    let x = vec![vec![1.0], vec![2.0]];
    assert!(train_smo(&x, &[1, 1], &SvmConfig::<f64>::default()).is_err());
}

#[test]
fn six_point_predictions_match_oracle_model() {
    let mut r = rng(31);
    for t in 0..10 {
        let points = random_points(&mut r, 6, 2);
        let labels = random_labels(&mut r, 6);
        let kernel = KernelSpec::Rbf { gamma: 0.5 + t as f64 * 0.1 };
        let c = 2.0;
        let config = SvmConfig { c, kernel, tol: 1e-6, ..SvmConfig::default() };
        let model = train_smo(&points, &labels, &config).unwrap();
        let (_, alpha) = exhaustive_dual(&points, &labels, c, &kernel);
        let oracle = oracle_model(&points, &labels, &alpha, c, kernel);
        for _ in 0..50 {
            let x = vec![r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
            let a = model.decision_value(&x).unwrap();
            let b = oracle.decision_value(&x).unwrap();
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
            if b.abs() > 1e-3 {
                assert_eq!(model.predict(&x).unwrap().label, oracle.predict(&x).unwrap().label);
            }
        }
    }
}

/// Bias from the KKT conditions of an exact dual solution.
fn oracle_model(points: &[Vec<f64>], labels: &[i8], alpha: &DVector<f64>, c: f64, kernel: KernelSpec<f64>) -> SvmModel<f64> {
    let k = gram(points, &kernel);
    let f = |i: usize| (0..points.len()).map(|j| alpha[j] * labels[j] as f64 * k[(i, j)]).sum::<f64>();
    let free: Vec<usize> = (0..points.len()).filter(|&i| alpha[i] > 1e-9 && alpha[i] < c - 1e-9).collect();
    let bias = if free.is_empty() {
        // any value in the feasible interval; take its midpoint
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..points.len() {
            let y = labels[i] as f64;
            let b = y - f(i);
            let at_upper = alpha[i] >= c - 1e-9;
            if (y > 0.0) != at_upper { lo = lo.max(b) } else { hi = hi.min(b) }
        }
        (lo + hi) / 2.0
    } else {
        free.iter().map(|&i| labels[i] as f64 - f(i)).sum::<f64>() / free.len() as f64
    };
    SvmModel {
        support_vectors: points.to_vec(),
        dual_coefs: (0..points.len()).map(|i| alpha[i] * labels[i] as f64).collect(),
        bias,
        kernel,
        c,
    }
}

#[test]
fn duplicated_point_with_doubled_bound_keeps_predictions() {
    let mut r = rng(32);
    for t in 0..10 {
        let points = random_points(&mut r, 12, 2);
        let labels = random_labels(&mut r, 12);
        let config = SvmConfig { c: 1.0, tol: 1e-6, seed: t, ..SvmConfig::default() };
        // two copies of a point, each with bound C, act like one point with bound 2C
        let dup = r.random_range(0..12);
        let mut p2 = points.clone();
        let mut y2 = labels.clone();
        p2.push(points[dup].clone());
        y2.push(labels[dup]);
        let dup_model = solve_smo(&p2, &y2, &config).unwrap().into_model(&p2, &config);
        let mut upper = vec![1.0; 12];
        upper[dup] = 2.0;
        let weighted = solve_smo_weighted(&points, &labels, &upper, &config).unwrap().into_model(&points, &config);

        for _ in 0..100 {
            let x = vec![r.random_range(-2.5..2.5), r.random_range(-2.5..2.5)];
            let a = dup_model.decision_value(&x).unwrap();
            let b = weighted.decision_value(&x).unwrap();
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }
}

#[test]
fn ntf_vocabulary_matches_df_filter() {
    let comments: Vec<Vec<String>> = [
        "good video thanks",
        "good good explanation",
        "first",
        "thanks for the video",
        "the explanation of pointers was good",
    ]
    .iter()
    .map(|c| normalize(c).tokens)
    .collect();
    let refs: Vec<&[String]> = comments.iter().map(Vec::as_slice).collect();
    let vocab = NtfVocabulary::build(&refs);
    assert_eq!(vocab.words(), df_filter(&comments, 2).as_slice());
    let f: Vec<f64> = normalized_tf_features(&comments[1], &vocab);
    let good = vocab.words().iter().position(|w| w == "good").unwrap();
    assert_eq!(f[good], 2.0 / 3.0);
}

fn separable_comments(n: usize, seed: u64) -> (Vec<Vec<String>>, Vec<CommentLabel>) {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let informative = i % 3 == 0;
            let topic = if informative { Topic::Software } else { Topic::OffTopic };
            let words: Vec<String> = (0..8).map(|_| topic.word(r.random_range(0..6))).collect();
            let label = if informative { CommentLabel::Informative } else { CommentLabel::NonInformative };
            (words, label)
        })
        .unzip()
}

#[test]
fn ntf_cross_validation_on_separable_comments() {
    let (docs, labels) = separable_comments(60, 33);
    let config = CvConfig { svm: SvmConfig { kernel: KernelSpec::Linear, c: 10.0, ..SvmConfig::default() }, ..CvConfig::default() };
    let report = cross_validate(Features::<f64>::NormalizedTf(&docs), &labels, &config).unwrap();
    assert_eq!(report.report.f_measure, Some(1.0));
    let again = cross_validate(Features::<f64>::NormalizedTf(&docs), &labels, &config).unwrap();
    assert_eq!(report, again);
    let mut validated: Vec<usize> = (0..10).flat_map(|f| report.assignment.validation_indices(f)).collect();
    validated.sort_unstable();
    assert_eq!(validated, (0..60).collect::<Vec<_>>());
}
