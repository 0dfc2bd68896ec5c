mod common;

use std::collections::HashMap;

use crossplat::embedding::{sgns_step, EmbeddingModel, Matrix, SgnsWeights, Vocabulary};
use crossplat::evaluation::{accuracy_at_k, cohen_kappa, prf_in, ConfusionCounts};
use crossplat::ingest::{is_valid_token, normalize, parse_dump, split_sentences, strip_html, DumpKind, normalize_with_origin};
use crossplat::ranking::{rank, score, select_instances, Aggregation, RankedList};
use crossplat::svm::{FoldAssignment, KernelSpec};
use crossplat::tfidf::{smooth_idf, SparseVector, TfidfModel};
use crossplat::vectorize::{cosine_slices, OovPolicy, Vectorizer};
use proptest::collection::vec;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    -1e3..1e3f64
}

fn model_strategy() -> impl Strategy<Value = EmbeddingModel<f64>> {
    (2usize..12, 1usize..6).prop_flat_map(|(v, d)| {
        vec(finite(), v * d).prop_map(move |data| {
            let words = (0..v).map(|i| format!("w{i}")).collect();
            EmbeddingModel::new(Vocabulary::from_words(words).unwrap(), Matrix::from_vec(v, d, data)).unwrap()
        })
    })
}

proptest! {
    // ---------------------------------------------------------------- preprocessing

    #[test]
    fn normalize_is_idempotent(s in "\\PC{0,60}") {
        let once = normalize(&s);
        let twice = normalize(&once.text);
        prop_assert_eq!(&twice.tokens, &once.tokens);
        prop_assert_eq!(&twice.text, &once.text);
    }

    #[test]
    fn tokens_obey_grammar(s in "\\PC{0,60}") {
        let c = normalize(&s);
        for t in &c.tokens {
            prop_assert!(is_valid_token(t), "{:?}", t);
        }
        prop_assert_eq!(c.text.split_whitespace().collect::<Vec<_>>(), c.tokens.iter().map(String::as_str).collect::<Vec<_>>());
        prop_assert_eq!(c.char_len, c.text.chars().count());
    }

    #[test]
    fn well_formed_tags_leave_no_angle_bracket(
        parts in vec(("[a-zA-Z0-9 .,&;]{0,8}", "[a-z]{1,6}", proptest::option::of("[a-z]{1,5}")), 0..8)
    ) {
        let mut html = String::new();
        for (text, tag, attr) in &parts {
            html.push_str(text);
            match attr {
                Some(a) => html.push_str(&format!("<{tag} {a}=\"v\">")),
                None => html.push_str(&format!("<{tag}>")),
            }
            html.push_str(&format!("</{tag}>"));
        }
        prop_assert!(!strip_html(&html).contains('<'));
    }

    #[test]
    fn splitter_reassembles(s in "[A-Za-z0-9 .!?,]{0,80}") {
        let pieces = split_sentences(&s);
        let squash = |x: &str| x.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        prop_assert_eq!(squash(&pieces.concat()), squash(&s));
    }

    #[test]
    fn dump_yields_bodies_plus_titles(rows in vec((any::<bool>(), any::<bool>(), "[a-z ]{1,10}"), 0..20)) {
        let mut xml = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n");
        let mut expected = 0;
        for (i, (body, title, text)) in rows.iter().enumerate() {
            xml.push_str(&format!("  <row Id=\"{i}\" PostTypeId=\"1\""));
            if *body {
                xml.push_str(&format!(" Body=\"&lt;p&gt;x{text}&lt;/p&gt;\""));
                expected += 1;
            }
            if *title {
                xml.push_str(&format!(" Title=\"t{text}\""));
                expected += 1;
            }
            xml.push_str(" />\n");
        }
        xml.push_str("</posts>\n");
        let docs: Vec<_> = parse_dump(xml.as_bytes(), DumpKind::Posts).collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(docs.len(), expected);
    }

    // ---------------------------------------------------------------- embeddings

    #[test]
    fn step_touches_only_its_rows(
        vocab in 3usize..20,
        dim in 1usize..8,
        seed in any::<u64>(),
        lr in 0.001..0.5f64,
    ) {
        let mut r = common::rng(seed);
        use rand::Rng;
        let mut w = SgnsWeights::<f64>::zeros(vocab, dim);
        for x in w.input.as_mut_slice().iter_mut().chain(w.output.as_mut_slice()) {
            *x = r.random_range(-1.0..1.0);
        }
        let center = r.random_range(0..vocab);
        let context = r.random_range(0..vocab);
        let negs: Vec<usize> = (0..3).map(|_| r.random_range(0..vocab)).collect();
        let before = w.clone();
        sgns_step(center, context, &negs, &mut w, lr).unwrap();
        for row in 0..vocab {
            if row != center {
                prop_assert_eq!(w.input.row(row), before.input.row(row));
            }
            if row != context && !negs.contains(&row) {
                prop_assert_eq!(w.output.row(row), before.output.row(row));
            }
        }
    }

    // ---------------------------------------------------------------- vectors

    #[test]
    fn cosine_is_scale_invariant(
        pair in (1usize..10).prop_flat_map(|d| (vec(finite(), d), vec(finite(), d))),
        alpha in 1e-3..1e3f64,
        beta in 1e-3..1e3f64,
    ) {
        let (a, b) = pair;
        let scaled_a: Vec<f64> = a.iter().map(|x| x * alpha).collect();
        let scaled_b: Vec<f64> = b.iter().map(|x| x * beta).collect();
        let base = cosine_slices(&a, &b).unwrap();
        let scaled = cosine_slices(&scaled_a, &scaled_b).unwrap();
        // vectors whose norm crosses the zero threshold under scaling are exempt
        let tiny = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-9;
        prop_assume!(!tiny(&a) && !tiny(&b));
        prop_assert!((base - scaled).abs() <= 1e-9, "{} vs {}", base, scaled);
        prop_assert!(base.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn vectorize_ignores_token_order(
        model in model_strategy(),
        picks in vec(0usize..16, 1..12),
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let tokens: Vec<String> = picks.iter().map(|&i| format!("w{i}")).collect();
        let mut shuffled = tokens.clone();
        shuffled.shuffle(&mut common::rng(shuffle_seed));
        for policy in [OovPolicy::Ignore, OovPolicy::ZeroVector, OovPolicy::LowFreqAverage] {
            let v = Vectorizer::new(&model, policy);
            prop_assert_eq!(v.vectorize(&tokens), v.vectorize(&shuffled));
        }
    }

    #[test]
    fn policies_agree_without_oov(model in model_strategy(), picks in vec(0usize..64, 1..12)) {
        let tokens: Vec<String> = picks.iter().map(|&i| format!("w{}", i % model.len())).collect();
        let a = Vectorizer::new(&model, OovPolicy::Ignore).vectorize(&tokens);
        let b = Vectorizer::new(&model, OovPolicy::ZeroVector).vectorize(&tokens);
        let c = Vectorizer::new(&model, OovPolicy::LowFreqAverage).vectorize(&tokens);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
    }

    // ---------------------------------------------------------------- ranking

    #[test]
    fn ranking_order_survives_positive_rescaling(
        model in model_strategy(),
        texts in vec(vec(0usize..14, 0..6), 1..15),
        alpha in 0.01..100.0f64,
    ) {
        let sentences: Vec<_> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| normalize_with_origin(&t.iter().map(|w| format!("w{w}")).collect::<Vec<_>>().join(" "), format!("t{i}")))
            .collect();
        let Ok(query) = select_instances(sentences.clone(), 140, 4, 1) else { return Ok(()) };
        let scaled = model.map_vectors(|x| x * alpha);
        let a = rank(&sentences, &query, &model, OovPolicy::Ignore, Aggregation::Max).unwrap();
        let b = rank(&sentences, &query, &scaled, OovPolicy::Ignore, Aggregation::Max).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((x.score - y.score).abs() <= 1e-9);
            // order may differ only inside groups whose scores tie within rounding
            if x.index != y.index {
                let other = a.entries.iter().find(|e| e.index == y.index).unwrap();
                prop_assert!((other.score - x.score).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn extra_query_never_lowers_max(
        model in model_strategy(),
        tweet in vec(0usize..14, 1..6),
        queries in vec(vec(0usize..14, 1..6), 1..6),
        extra in vec(0usize..14, 1..6),
    ) {
        let v = Vectorizer::new(&model, OovPolicy::Ignore);
        let vec_of = |t: &Vec<usize>| v.vectorize(&t.iter().map(|w| format!("w{w}")).collect::<Vec<_>>());
        let tv = vec_of(&tweet);
        let mut qs: Vec<_> = queries.iter().map(vec_of).collect();
        let before = score(&tv, &qs, Aggregation::Max).unwrap();
        qs.push(vec_of(&extra));
        let after = score(&tv, &qs, Aggregation::Max).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn permuting_input_keeps_ranked_scores(scores in vec(proptest::option::of(0..5i32), 1..30), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let items: Vec<(String, Option<f64>)> = scores.iter().enumerate().map(|(i, s)| (format!("x{i}"), s.map(f64::from))).collect();
        let mut shuffled = items.clone();
        shuffled.shuffle(&mut common::rng(seed));
        let a = RankedList::from_scores(items, Aggregation::Max);
        let b = RankedList::from_scores(shuffled, Aggregation::Max);
        let sa: Vec<_> = a.entries.iter().map(|e| (e.score, e.degenerate)).collect();
        let sb: Vec<_> = b.entries.iter().map(|e| (e.score, e.degenerate)).collect();
        prop_assert_eq!(sa, sb);
    }

    // ---------------------------------------------------------------- tf-idf

    #[test]
    fn sparse_cosine_matches_dense(
        a in vec((0usize..30, -10.0..10.0f64), 0..12),
        b in vec((0usize..30, -10.0..10.0f64), 0..12),
    ) {
        let sa = SparseVector::from_pairs(a);
        let sb = SparseVector::from_pairs(b);
        let dense = common::dense_cosine(&sa.to_dense(30), &sb.to_dense(30));
        prop_assert!((sa.cosine(&sb) - dense).abs() <= 1e-12);
    }

    #[test]
    fn idf_decreases_with_df(n in 1usize..1000, a in 0u64..1000, b in 0u64..1000) {
        prop_assume!(a < b);
        prop_assert!(smooth_idf(n, a) > smooth_idf(n, b));
    }

    #[test]
    fn duplicated_document_keeps_direction(docs in vec(vec(0usize..10, 1..8), 1..6)) {
        let words = ["compile", "error", "java", "python", "runs", "debug", "install", "linux", "code", "test"];
        let sentences: Vec<_> = docs.iter().map(|d| normalize(&d.iter().map(|&i| words[i]).collect::<Vec<_>>().join(" "))).collect();
        let model = TfidfModel::fit(&sentences).unwrap();
        for s in &sentences {
            let doubled: Vec<String> = s.tokens.iter().chain(&s.tokens).cloned().collect();
            let (x, y) = (model.transform(&s.tokens), model.transform(&doubled));
            for ((i, a), (j, b)) in x.entries().iter().zip(y.entries()) {
                prop_assert_eq!(i, j);
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    // ---------------------------------------------------------------- svm

    #[test]
    fn kernels_are_symmetric(
        pair in (1usize..6).prop_flat_map(|d| (vec(-5.0..5.0f64, d), vec(-5.0..5.0f64, d))),
        gamma in 0.01..5.0f64,
        omega in 0.1..5.0f64,
        sigma in 0.1..5.0f64,
    ) {
        let (x, y) = pair;
        for k in [KernelSpec::Linear, KernelSpec::Rbf { gamma }, KernelSpec::Puk { omega, sigma }] {
            prop_assert!((k.eval(&x, &y).unwrap() - k.eval(&y, &x).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn folds_partition_the_dataset(n in 2usize..200, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(n >= k);
        let a = FoldAssignment::new(n, k, seed).unwrap();
        let mut all: Vec<usize> = (0..k).flat_map(|f| a.validation_indices(f)).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = (0..k).map(|f| a.validation_indices(f).len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    // ---------------------------------------------------------------- metrics

    #[test]
    fn f_measure_identity(tp in 0u64..1000, fp in 0u64..1000, fn_ in 0u64..1000, tn in 0u64..1000) {
        let p = prf_in::<f64>(&ConfusionCounts { tp, fp, fn_, tn });
        prop_assert!((p.f_measure * (p.precision + p.recall) - 2.0 * p.precision * p.recall).abs() <= 1e-12);
    }

    #[test]
    fn accuracy_ignores_order_below_k(labels in vec(any::<bool>(), 2..40), k_frac in 0.0..1.0f64, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let n = labels.len();
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let list = RankedList::from_scores((0..n).map(|i| (format!("i{i}"), Some(-(i as f64)))), Aggregation::Max);
        let map: HashMap<String, bool> = (0..n).map(|i| (format!("i{i}"), labels[i])).collect();
        let mut permuted = list.clone();
        permuted.entries[k..].shuffle(&mut common::rng(seed));
        prop_assert_eq!(accuracy_at_k(&list, &map, k).unwrap(), accuracy_at_k(&permuted, &map, k).unwrap());
    }

    #[test]
    fn kappa_symmetric_and_self_one(a in vec(0u8..3, 1..40), b_seed in any::<u64>()) {
        use rand::Rng;
        let mut r = common::rng(b_seed);
        let b: Vec<u8> = a.iter().map(|_| r.random_range(0..3)).collect();
        let ab = cohen_kappa(&a, &b).unwrap();
        let ba = cohen_kappa(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        if a.iter().any(|&x| x != a[0]) {
            prop_assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
        }
    }
}
