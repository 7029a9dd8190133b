//! Template-generated clinical-style corpus with gold trees.
//!
//! Every related pair is the subject and object of a marker verb, and the
//! verb alone decides the label. Unrelated pairs come from a trailing
//! `while <problem> persisted` clause or from coordinations such as
//! `fever and lasix were noted`.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concept::{ConceptSpan, ConceptType, RelationLabel};
use crate::corpus::{sent_id, Document, RelationMention, SpanRef};
use crate::error::{Error, Result};
use crate::treebank::{write_conllu, DepSentence, Token, Treebank};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthSpec {
    pub documents: usize,
    pub sentences_per_document: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            documents: 20,
            sentences_per_document: 10,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub documents: Vec<Document>,
    /// One sentence per document line, with `sent_id = doc:line`.
    pub treebank: Treebank,
}

const TREATMENTS: &[&[&str]] = &[
    &["aspirin"],
    &["iv", "fluids"],
    &["a", "amiodarone", "gtt"],
    &["metoprolol"],
    &["insulin"],
    &["oral", "antibiotics"],
    &["lasix"],
    &["heparin", "drip"],
];

const PROBLEMS: &[&[&str]] = &[
    &["headache"],
    &["chest", "pain"],
    &["atrial", "fibrillation"],
    &["pneumonia"],
    &["hypoxic", "brain", "injury"],
    &["lesions"],
    &["a", "hematoma"],
    &["acute", "renal", "failure"],
    &["fever"],
    &["hypotension"],
];

const TESTS: &[&[&str]] = &[
    &["mri", "head"],
    &["chest", "x-ray"],
    &["a", "biopsy"],
    &["blood", "cultures"],
    &["ct", "scan"],
    &["echocardiogram"],
    &["cbc"],
];

const ADJECTIVES: &[&str] = &["oral", "atrial", "acute", "renal", "hypoxic", "iv"];

/// Two verbs per label.
const MARKERS: &[(RelationLabel, [&str; 2])] = &[
    (RelationLabel::TrIP, ["improved", "relieved"]),
    (RelationLabel::TrWP, ["worsened", "aggravated"]),
    (RelationLabel::TrCP, ["caused", "induced"]),
    (RelationLabel::TrAP, ["treated", "controlled"]),
    (RelationLabel::TrNAP, ["avoided", "spared"]),
    (RelationLabel::TeRP, ["revealed", "showed"]),
    (RelationLabel::TeCP, ["investigated", "evaluated"]),
    (RelationLabel::PIP, ["accompanied", "complicated"]),
];

pub fn marker_verbs(label: RelationLabel) -> &'static [&'static str] {
    MARKERS
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, v)| &v[..])
        .unwrap_or(&[])
}

fn phrases(kind: ConceptType) -> &'static [&'static [&'static str]] {
    match kind {
        ConceptType::Treatment => TREATMENTS,
        ConceptType::Problem => PROBLEMS,
        ConceptType::Test => TESTS,
    }
}

struct Builder {
    /// form, pos, head (0-based token index or `None` for root), deprel
    tokens: Vec<(String, &'static str, Option<usize>, &'static str)>,
    concepts: Vec<(usize, usize, ConceptType, String)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            tokens: Vec::new(),
            concepts: Vec::new(),
        }
    }

    fn word(&mut self, form: &str, pos: &'static str) -> usize {
        self.tokens.push((form.to_string(), pos, None, ""));
        self.tokens.len() - 1
    }

    fn attach(&mut self, dep: usize, head: Option<usize>, deprel: &'static str) {
        self.tokens[dep].2 = head;
        self.tokens[dep].3 = deprel;
    }

    /// Appends a concept phrase; modifiers attach to its last word. Returns
    /// the index of the phrase head.
    fn concept<R: Rng>(&mut self, kind: ConceptType, rng: &mut R) -> usize {
        let words = phrases(kind).choose(rng).expect("non-empty list");
        let start = self.tokens.len();
        for w in words.iter() {
            self.word(w, "NN");
        }
        let head = self.tokens.len() - 1;
        for i in start..head {
            let (pos, rel) = if self.tokens[i].0 == "a" {
                ("DT", "det")
            } else if ADJECTIVES.contains(&self.tokens[i].0.as_str()) {
                ("JJ", "amod")
            } else {
                ("NN", "compound")
            };
            self.tokens[i].1 = pos;
            self.attach(i, Some(head), rel);
        }
        self.concepts.push((start, head, kind, words.join(" ")));
        head
    }

    fn sentence(&self, id: &str) -> DepSentence {
        let tokens = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, (form, pos, head, rel))| {
                let h = head.map_or(0, |h| h + 1);
                Token::new(i + 1, form.clone(), *pos, h, if head.is_some() { *rel } else { "root" })
            })
            .collect();
        let mut s = DepSentence::new(tokens);
        s.comments.push(format!("# sent_id = {}", id));
        s
    }

    fn text(&self) -> String {
        self.tokens.iter().map(|t| t.0.as_str()).collect::<Vec<_>>().join(" ")
    }
}

struct Sentence {
    builder: Builder,
    /// Indices into `builder.concepts` with the gold label.
    relations: Vec<(usize, usize, RelationLabel)>,
}

fn argument_types<R: Rng>(rng: &mut R) -> (RelationLabel, ConceptType, ConceptType) {
    let (label, _) = MARKERS.choose(rng).expect("non-empty");
    let (a, b) = label.argument_types().expect("marker labels relate concepts");
    (*label, a, b)
}

fn related<R: Rng>(rng: &mut R) -> Sentence {
    let mut b = Builder::new();
    let (label, t1, t2) = argument_types(rng);
    let lead = rng.gen_bool(0.3).then(|| b.word("today", "RB"));
    let c1 = b.concept(t1, rng);
    let verb = b.word(marker_verbs(label).choose(rng).expect("two verbs"), "VBD");
    let c2 = b.concept(t2, rng);
    b.attach(c1, Some(verb), "nsubj");
    b.attach(c2, Some(verb), "obj");
    if let Some(l) = lead {
        b.attach(l, Some(verb), "advmod");
    }
    if rng.gen_bool(0.4) {
        let mark = b.word("while", "IN");
        let c3 = b.concept(ConceptType::Problem, rng);
        let v2 = b.word(["persisted", "resolved"].choose(rng).expect("two verbs"), "VBD");
        b.attach(mark, Some(v2), "mark");
        b.attach(c3, Some(v2), "nsubj");
        b.attach(v2, Some(verb), "advcl");
    }
    let stop = b.word(".", ".");
    b.attach(stop, Some(verb), "punct");
    Sentence {
        builder: b,
        relations: vec![(0, 1, label)],
    }
}

fn coordinated<R: Rng>(rng: &mut R) -> Sentence {
    let mut b = Builder::new();
    let (_, t1, t2) = argument_types(rng);
    let (t1, t2) = if rng.gen_bool(0.5) { (t1, t2) } else { (t2, t1) };
    let c1 = b.concept(t1, rng);
    let cc = b.word("and", "CC");
    let c2 = b.concept(t2, rng);
    let aux = b.word("were", "VBD");
    let verb = b.word("noted", "VBN");
    let stop = b.word(".", ".");
    b.attach(c1, Some(verb), "nsubj");
    b.attach(cc, Some(c2), "cc");
    b.attach(c2, Some(c1), "conj");
    b.attach(aux, Some(verb), "aux");
    b.attach(stop, Some(verb), "punct");
    Sentence {
        builder: b,
        relations: Vec::new(),
    }
}

fn filler<R: Rng>(rng: &mut R) -> Sentence {
    let mut b = Builder::new();
    let det = b.word("the", "DT");
    let subj = b.word("patient", "NN");
    let cop = b.word("was", "VBD");
    let adj = b.word(["stable", "comfortable", "afebrile"].choose(rng).expect("three"), "JJ");
    let stop = b.word(".", ".");
    b.attach(det, Some(subj), "det");
    b.attach(subj, Some(adj), "nsubj");
    b.attach(cop, Some(adj), "cop");
    b.attach(stop, Some(adj), "punct");
    Sentence {
        builder: b,
        relations: Vec::new(),
    }
}

pub fn generate_synthetic_corpus(spec: &SynthSpec) -> Result<SyntheticCorpus> {
    if spec.documents == 0 || spec.sentences_per_document == 0 {
        return Err(Error::invalid("synthetic corpus sizes must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut documents = Vec::with_capacity(spec.documents);
    let mut sentences = Vec::new();
    for d in 0..spec.documents {
        let doc_id = format!("doc{:03}", d + 1);
        let mut lines = Vec::new();
        let mut concepts = Vec::new();
        let mut mentions = Vec::new();
        for line in 1..=spec.sentences_per_document {
            let roll: f64 = rng.gen();
            let s = if roll < 0.65 {
                related(&mut rng)
            } else if roll < 0.85 {
                coordinated(&mut rng)
            } else {
                filler(&mut rng)
            };
            let spans: Vec<ConceptSpan> = s
                .builder
                .concepts
                .iter()
                .map(|(start, end, kind, text)| ConceptSpan::new(line, *start, *end, *kind, text.clone()))
                .collect();
            for &(i, j, label) in &s.relations {
                let r = |c: &ConceptSpan| SpanRef {
                    text: c.text.clone(),
                    line,
                    start: c.start,
                    end: c.end,
                };
                mentions.push(RelationMention {
                    first: r(&spans[i]),
                    label,
                    second: r(&spans[j]),
                });
            }
            concepts.extend(spans);
            lines.push(s.builder.text());
            sentences.push(s.builder.sentence(&sent_id(&doc_id, line)));
        }
        documents.push(Document::new(&doc_id, lines, concepts, mentions)?);
    }
    Ok(SyntheticCorpus {
        documents,
        treebank: Treebank::new(sentences),
    })
}

impl SyntheticCorpus {
    /// Writes `<id>.txt/.con/.rel` for each document and `treebank.conllu`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for d in &self.documents {
            d.save(dir)?;
        }
        let file = fs::File::create(dir.join("treebank.conllu"))?;
        write_conllu(&self.treebank, std::io::BufWriter::new(file))
    }
}
