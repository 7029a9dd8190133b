mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdprelex::concept::{BioTag, ConceptSpan, ConceptType, RelationLabel};
use sdprelex::corpus::{expected_candidates, generate_candidates, Document};
use sdprelex::harness::{paired_t_test, prf1, Confusion, FoldPlan};
use sdprelex::nn::Matrix;
use sdprelex::relex::{load_word_vectors, VectorFormat, WordVectors};
use sdprelex::sdp::{build_undirected_graph, make_instance, shortest_path, SdpInstance};
use sdprelex::transition::{oracle_sequence, Configuration, Transition, TransitionKind};
use sdprelex::treebank::{read_conllu_str, write_conllu_string, DepSentence, Treebank};
use sdprelex::vocab::Vocab;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn oracle_replay_rebuilds_projective_trees(n in 1usize..=15, seed: u64) {
        let mut r = rng(seed);
        let s = sentence(&projective_heads(n, &mut r), &mut r);
        let seq = oracle_sequence(&s).unwrap();
        prop_assert_eq!(seq.len(), 2 * n);
        let mut c = Configuration::initial(&s).unwrap();
        for t in &seq {
            prop_assert!(c.legal().allows(t.kind()));
            c.apply_mut(t).unwrap();
            prop_assert!(c.check_conservation());
        }
        prop_assert!(c.is_terminal());
        prop_assert_eq!(c.to_sentence(&s), s);
    }

    #[test]
    fn projectivity_matches_crossing_arcs(n in 1usize..=9, seed: u64) {
        let mut r = rng(seed);
        let heads = any_heads(n, &mut r);
        let s = sentence(&heads, &mut r);
        prop_assert_eq!(s.is_projective(), no_crossing_arcs(&heads));
        prop_assert_eq!(oracle_sequence(&s).is_ok(), s.is_projective());
    }

    #[test]
    fn legal_walks_end_in_single_rooted_trees(n in 1usize..=12, seed: u64, picks in prop::collection::vec(any::<u8>(), 24)) {
        let mut r = rng(seed);
        let s = sentence(&projective_heads(n, &mut r), &mut r);
        let mut c = Configuration::initial(&s).unwrap();
        let mut steps = 0;
        while !c.is_terminal() {
            let kinds = c.legal().kinds();
            prop_assert!(!kinds.is_empty());
            let t = match kinds[picks[steps % picks.len()] as usize % kinds.len()] {
                TransitionKind::Shift => Transition::Shift,
                TransitionKind::LeftArc => Transition::LeftArc("x".into()),
                TransitionKind::RightArc => Transition::RightArc("x".into()),
            };
            c.apply_mut(&t).unwrap();
            steps += 1;
        }
        prop_assert_eq!(steps, 2 * n);
        let out = c.to_sentence(&s);
        prop_assert!(out.validate("walk").is_ok());
        prop_assert!(out.is_projective());
    }

    #[test]
    fn tree_paths_match_bfs(n in 1usize..=10, seed: u64) {
        let mut r = rng(seed);
        let heads = any_heads(n, &mut r);
        let s = sentence(&heads, &mut r);
        let g = build_undirected_graph(&s).unwrap();
        prop_assert_eq!(g.edge_count(), n);
        for u in 0..=n {
            for v in 0..=n {
                prop_assert_eq!(g.path(u, v), bfs_path(&heads, u, v));
            }
        }
    }

    #[test]
    fn single_token_instances_follow_the_path(n in 2usize..=10, seed: u64, a in 0usize..10, b in 0usize..10) {
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let mut r = rng(seed);
        let heads = any_heads(n, &mut r);
        let s = sentence(&heads, &mut r);
        let c1 = ConceptSpan::new(1, a, a, ConceptType::Treatment, "x");
        let c2 = ConceptSpan::new(1, b, b, ConceptType::Problem, "y");
        let g = build_undirected_graph(&s).unwrap();
        let path = shortest_path(&g, &c1, &c2, &s).unwrap();
        prop_assert_eq!(&path, &bfs_path(&heads, a + 1, b + 1));
        let inst = make_instance(&path, &s, &c1, &c2, RelationLabel::TrAP).unwrap();
        let interior = path.iter().filter(|&&i| i != 0).count();
        prop_assert_eq!(inst.len(), interior);
        prop_assert!(inst.is_aligned());
        prop_assert_eq!(inst.concepts[0], BioTag::Begin(ConceptType::Treatment));
        prop_assert_eq!(*inst.concepts.last().unwrap(), BioTag::Begin(ConceptType::Problem));
        prop_assert!(inst.concepts[1..inst.len() - 1].iter().all(|t| *t == BioTag::Outside));
    }

    #[test]
    fn conllu_round_trips(
        n in 1usize..=8,
        seed: u64,
        forms in prop::collection::vec("[A-Za-z0-9.,'-]{1,8}", 8),
        tags in prop::collection::vec("[A-Z]{1,4}", 8),
    ) {
        let mut r = rng(seed);
        let heads = projective_heads(n, &mut r);
        let mut s = sentence(&heads, &mut r);
        for (i, t) in s.tokens.iter_mut().enumerate() {
            t.form = forms[i].clone();
            t.pos = tags[i].clone();
        }
        s.comments.push(format!("# sent_id = {}", seed));
        let tb = Treebank::new(vec![s.clone(), s]);
        let text = write_conllu_string(&tb).unwrap();
        let back = read_conllu_str(&text).unwrap();
        prop_assert_eq!(&back.sentences, &tb.sentences);
        prop_assert_eq!(write_conllu_string(&back).unwrap(), text);
    }

    #[test]
    fn sdp_lines_round_trip(items in prop::collection::vec(("\\PC*", "[a-z|\\\\\t]{0,5}", "[A-Z\n]{1,3}"), 1..6), label in 0usize..9) {
        let n = items.len();
        let inst = SdpInstance {
            words: items.iter().map(|t| t.0.clone()).collect(),
            concepts: (0..n).map(|i| if i == 0 { BioTag::Begin(ConceptType::Test) } else { BioTag::Outside }).collect(),
            deprels: items.iter().map(|t| t.1.clone()).collect(),
            pos: items.iter().map(|t| t.2.clone()).collect(),
            label: RelationLabel::from_index(label),
        };
        let line = inst.to_string();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(line.split('\t').count(), 5);
        prop_assert_eq!(line.parse::<SdpInstance>().unwrap(), inst);
    }

    #[test]
    fn prf1_matches_a_recount(counts in prop::collection::vec(0u64..6, 81)) {
        let mut c = Confusion::new();
        let mut pairs = Vec::new();
        for g in 0..9 {
            for p in 0..9 {
                for _ in 0..counts[g * 9 + p] {
                    c.add(RelationLabel::from_index(g), RelationLabel::from_index(p));
                    pairs.push((g, p));
                }
            }
        }
        let m = prf1(&c);
        for k in 0..9 {
            let tp = pairs.iter().filter(|&&(g, p)| g == k && p == k).count() as f64;
            let pred = pairs.iter().filter(|&&(_, p)| p == k).count() as f64;
            let gold = pairs.iter().filter(|&&(g, _)| g == k).count() as f64;
            let s = &m.classes[k];
            let precision = if pred > 0.0 { 100.0 * tp / pred } else { 0.0 };
            let recall = if gold > 0.0 { 100.0 * tp / gold } else { 0.0 };
            prop_assert!((s.precision - precision).abs() < 1e-9);
            prop_assert!((s.recall - recall).abs() < 1e-9);
            prop_assert_eq!(s.support, gold as u64);
            prop_assert_eq!(s.undefined, pred == 0.0 && gold == 0.0);
            if s.precision + s.recall > 0.0 {
                prop_assert!((s.f1 - 2.0 * s.precision * s.recall / (s.precision + s.recall)).abs() < 1e-9);
            } else {
                prop_assert_eq!(s.f1, 0.0);
            }
        }
        let correct = pairs.iter().filter(|&&(g, p)| g == p).count() as f64;
        let acc = if pairs.is_empty() { 0.0 } else { 100.0 * correct / pairs.len() as f64 };
        prop_assert!((m.micro.f1 - acc).abs() < 1e-9);
    }

    #[test]
    fn t_test_symmetry_and_shift(
        a in prop::collection::vec(50.0f64..100.0, 2..8),
        noise in prop::collection::vec(-5.0f64..5.0, 8),
        shift in -20.0f64..20.0,
    ) {
        let b: Vec<f64> = a.iter().zip(&noise).map(|(x, e)| x + e).collect();
        let ab = paired_t_test(&a, &b);
        prop_assume!(ab.is_ok());
        let ab = ab.unwrap();
        let ba = paired_t_test(&b, &a).unwrap();
        prop_assert!((ab.t + ba.t).abs() <= 1e-9 * ab.t.abs().max(1.0));
        prop_assert!((ab.p - ba.p).abs() < 1e-12);
        prop_assert!(ab.p > 0.0 && ab.p <= 0.5);
        prop_assert_eq!(ab.df, a.len() - 1);
        let a2: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let b2: Vec<f64> = b.iter().map(|x| x + shift).collect();
        let shifted = paired_t_test(&a2, &b2).unwrap();
        prop_assert!((shifted.t - ab.t).abs() <= 1e-6 * ab.t.abs().max(1.0));
        prop_assert!((shifted.p - ab.p).abs() <= 1e-6 * ab.p.max(1e-12));
    }

    #[test]
    fn folds_partition_documents(docs in 2usize..40, k in 2usize..8, seed: u64) {
        prop_assume!(k <= docs);
        let ids: Vec<String> = (0..docs).map(|i| format!("d{}", i)).collect();
        let plan = FoldPlan::new(&ids, k, seed).unwrap();
        let mut seen: Vec<&str> = Vec::new();
        let mut sizes = Vec::new();
        for f in 0..k {
            let t = plan.test_documents(f);
            sizes.push(t.len());
            seen.extend(t);
        }
        seen.sort();
        let mut expected: Vec<&str> = ids.iter().map(String::as_str).collect();
        expected.sort();
        prop_assert_eq!(seen, expected);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn candidate_count_formula(kinds in prop::collection::vec(0u8..3, 0..12)) {
        let n = kinds.len().max(1);
        let text = vec!["w"; n].join(" ");
        let con: String = kinds
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let t = ["problem", "treatment", "test"][*k as usize];
                format!("c=\"w\" 1:{} 1:{}||t=\"{}\"\n", i, i, t)
            })
            .collect();
        let doc = Document::from_strs("d", &text, &con, "").unwrap();
        let count = |k: u8| kinds.iter().filter(|&&x| x == k).count();
        let c = generate_candidates(&doc);
        prop_assert_eq!(c.records.len(), expected_candidates(count(0), count(1), count(2)));
        for r in &c.records {
            prop_assert!(r.first.kind != ConceptType::Problem || r.second.kind == ConceptType::Problem);
            prop_assert_eq!(r.second.kind, ConceptType::Problem);
            if r.first.kind == ConceptType::Problem {
                prop_assert!(r.first.start < r.second.start);
            }
        }
    }

    #[test]
    fn word_vectors_round_trip(rows in prop::collection::vec(prop::collection::vec(-1.0f32..1.0, 3), 1..6)) {
        let words: Vec<String> = (0..rows.len()).map(|i| format!("w{}", i)).collect();
        let data: Vec<f64> = rows.iter().flatten().map(|&x| x as f64).collect();
        let v = WordVectors {
            vocab: Vocab::from_items(words),
            vectors: Matrix::from_vec(rows.len(), 3, data),
            duplicates: 0,
        };
        let mut bin = Vec::new();
        v.write_binary(&mut bin).unwrap();
        let back = load_word_vectors(&bin[..], VectorFormat::Binary).unwrap();
        prop_assert_eq!(&back.vectors, &v.vectors);
        let mut text = Vec::new();
        v.write_text(&mut text).unwrap();
        let back = load_word_vectors(&text[..], VectorFormat::Text).unwrap();
        for (x, y) in back.vectors.data.iter().zip(&v.vectors.data) {
            prop_assert!((x - y).abs() < 1e-6);
        }
    }
}

#[test]
fn crossing_arc_oracle_sanity() {
    assert!(no_crossing_arcs(&[2, 0, 2]));
    assert!(!no_crossing_arcs(&[3, 4, 0, 3]));
    // crossing the root arc
    assert!(!no_crossing_arcs(&[3, 0, 1]));
    let s = DepSentence::from_columns(&["a", "b", "c"], &["X"; 3], &[3, 0, 1], &["x", "root", "y"]);
    assert!(!s.is_projective());
}
