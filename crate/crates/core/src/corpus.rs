//! i2b2-2010 annotations: concept and relation files, and candidate pairs.
//!
//! A document is three files sharing a stem:
//!
//! ```text
//! 17.txt   one whitespace-tokenised sentence per line
//! 17.con   c="burst of atrial fibrillation" 75:3 75:6||t="problem"
//! 17.rel   c="a amiodarone gtt" 75:11 75:13||r="TrAP"||c="burst of atrial fibrillation" 75:3 75:6
//! ```
//!
//! Lines are 1-based, token offsets 0-based and inclusive.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::concept::{ConceptSpan, ConceptType, RelationLabel};
use crate::error::{Error, Result};

fn concept_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"^c="(.*)" (\d+):(\d+) (\d+):(\d+)\|\|t="([^"]*)"$"#).expect("valid regex")
    })
}

fn relation_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(concat!(
            r#"^c="(.*)" (\d+):(\d+) (\d+):(\d+)\|\|r="([^"]*)"\|\|"#,
            r#"c="(.*)" (\d+):(\d+) (\d+):(\d+)$"#
        ))
        .expect("valid regex")
    })
}

/// A concept position as written in a relation line, before its type is known.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpanRef {
    pub text: String,
    pub line: usize,
    pub start: usize,
    pub end: usize,
}

impl SpanRef {
    pub fn key(&self) -> (usize, usize, usize) {
        (self.line, self.start, self.end)
    }
}

/// An unresolved line of a `.rel` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationMention {
    pub first: SpanRef,
    pub label: RelationLabel,
    pub second: SpanRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub doc_id: String,
    pub first: ConceptSpan,
    pub second: ConceptSpan,
    pub label: RelationLabel,
}

fn number(s: &str, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::invalid(format!("{} '{}' is out of range", what, s)))
}

fn span_ref(caps: &regex::Captures, base: usize) -> Result<SpanRef> {
    let line = number(&caps[base + 1], "line number")?;
    let start = number(&caps[base + 2], "token offset")?;
    let end_line = number(&caps[base + 3], "line number")?;
    let end = number(&caps[base + 4], "token offset")?;
    if line != end_line {
        return Err(Error::invalid(format!(
            "concept spans lines {} and {}",
            line, end_line
        )));
    }
    if start > end {
        return Err(Error::invalid(format!("start offset {} after end {}", start, end)));
    }
    if line == 0 {
        return Err(Error::invalid("line numbers start at 1"));
    }
    Ok(SpanRef {
        text: caps[base].to_string(),
        line,
        start,
        end,
    })
}

pub fn parse_concept_line(line: &str) -> Result<ConceptSpan> {
    let line = line.trim_end_matches(['\r', '\n']);
    let caps = concept_re()
        .captures(line)
        .ok_or_else(|| Error::invalid(format!("not a concept line: {}", line)))?;
    let r = span_ref(&caps, 1)?;
    let kind: ConceptType = caps[6].parse()?;
    Ok(ConceptSpan::new(r.line, r.start, r.end, kind, r.text))
}

pub fn parse_relation_line(line: &str) -> Result<RelationMention> {
    let line = line.trim_end_matches(['\r', '\n']);
    let caps = relation_re()
        .captures(line)
        .ok_or_else(|| Error::invalid(format!("not a relation line: {}", line)))?;
    let first = span_ref(&caps, 1)?;
    let label: RelationLabel = caps[6].parse()?;
    if label == RelationLabel::None {
        return Err(Error::invalid("NONE is not an annotation label"));
    }
    let second = span_ref(&caps, 7)?;
    if first.line != second.line {
        return Err(Error::invalid(format!(
            "relation endpoints on lines {} and {}",
            first.line, second.line
        )));
    }
    Ok(RelationMention { first, label, second })
}

pub fn format_concept_line(c: &ConceptSpan) -> String {
    format!(
        "c=\"{}\" {}:{} {}:{}||t=\"{}\"",
        c.text, c.line, c.start, c.line, c.end, c.kind
    )
}

pub fn format_relation_line(r: &RelationRecord) -> String {
    let (a, b) = (&r.first, &r.second);
    format!(
        "c=\"{}\" {}:{} {}:{}||r=\"{}\"||c=\"{}\" {}:{} {}:{}",
        a.text, a.line, a.start, a.line, a.end, r.label, b.text, b.line, b.start, b.line, b.end
    )
}

fn parse_lines<T>(text: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse(l).map_err(|e| match e {
                Error::Invalid(m) => Error::parse(i + 1, m),
                other => other,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub doc_id: String,
    /// Raw text lines; line `i` is `lines[i - 1]`.
    pub lines: Vec<String>,
    pub concepts: Vec<ConceptSpan>,
    pub relations: Vec<RelationRecord>,
}

impl Document {
    /// Builds a document from file contents and checks its invariants.
    pub fn from_strs(doc_id: &str, text: &str, con: &str, rel: &str) -> Result<Self> {
        let concepts = parse_lines(con, parse_concept_line)?;
        let mentions = parse_lines(rel, parse_relation_line)?;
        Document::new(doc_id, text.lines().map(str::to_string).collect(), concepts, mentions)
    }

    pub fn new(
        doc_id: &str,
        lines: Vec<String>,
        concepts: Vec<ConceptSpan>,
        mentions: Vec<RelationMention>,
    ) -> Result<Self> {
        let ctx = |m: String| Error::invalid(format!("{}: {}", doc_id, m));
        let mut by_key: HashMap<(usize, usize, usize), &ConceptSpan> = HashMap::new();
        for c in &concepts {
            let tokens = lines
                .get(c.line.wrapping_sub(1))
                .map(|l| l.split_whitespace().count())
                .ok_or_else(|| ctx(format!("concept \"{}\" on missing line {}", c.text, c.line)))?;
            if c.end >= tokens {
                return Err(ctx(format!(
                    "concept \"{}\" ends at token {} but line {} has {} tokens",
                    c.text, c.end, c.line, tokens
                )));
            }
            if let Some(prev) = by_key.insert(c.key(), c) {
                if prev.kind != c.kind {
                    return Err(ctx(format!("span {:?} annotated with two types", c.key())));
                }
            }
        }

        let mut relations = Vec::with_capacity(mentions.len());
        let mut seen: HashMap<PairKey, RelationLabel> = HashMap::new();
        for m in mentions {
            let resolve = |r: &SpanRef| {
                by_key
                    .get(&r.key())
                    .map(|c| (*c).clone())
                    .ok_or_else(|| ctx(format!("relation endpoint \"{}\" {:?} is not a concept", r.text, r.key())))
            };
            let first = resolve(&m.first)?;
            let second = resolve(&m.second)?;
            if !admits(m.label, first.kind, second.kind) {
                return Err(ctx(format!(
                    "{} cannot relate {} and {}",
                    m.label, first.kind, second.kind
                )));
            }
            let key = pair_key(&first, &second);
            match seen.get(&key) {
                Some(&l) if l != m.label => {
                    return Err(ctx(format!(
                        "pair \"{}\" / \"{}\" labelled both {} and {}",
                        first.text, second.text, l, m.label
                    )));
                }
                Some(_) => continue,
                None => {
                    seen.insert(key, m.label);
                }
            }
            relations.push(RelationRecord {
                doc_id: doc_id.to_string(),
                first,
                second,
                label: m.label,
            });
        }
        Ok(Document {
            doc_id: doc_id.to_string(),
            lines,
            concepts,
            relations,
        })
    }

    /// Reads `<dir>/<id>.txt`, `.con` and `.rel`. A missing `.rel` means no relations.
    pub fn load(dir: &Path, doc_id: &str) -> Result<Self> {
        let path = |ext: &str| dir.join(format!("{}.{}", doc_id, ext));
        let text = fs::read_to_string(path("txt"))?;
        let con = fs::read_to_string(path("con"))?;
        let rel_path = path("rel");
        let rel = if rel_path.exists() {
            fs::read_to_string(rel_path)?
        } else {
            String::new()
        };
        Document::from_strs(doc_id, &text, &con, &rel)
    }

    pub fn tokens(&self, line: usize) -> Vec<&str> {
        self.lines[line - 1].split_whitespace().collect()
    }

    pub fn text_string(&self) -> String {
        self.lines.iter().map(|l| format!("{}\n", l)).collect()
    }

    pub fn con_string(&self) -> String {
        self.concepts.iter().map(|c| format_concept_line(c) + "\n").collect()
    }

    pub fn rel_string(&self) -> String {
        self.relations.iter().map(|r| format_relation_line(r) + "\n").collect()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let path = |ext: &str| dir.join(format!("{}.{}", self.doc_id, ext));
        fs::write(path("txt"), self.text_string())?;
        fs::write(path("con"), self.con_string())?;
        fs::write(path("rel"), self.rel_string())?;
        Ok(())
    }
}

/// Loads every document with a `.txt` file in `dir`, in id order.
pub fn load_corpus(dir: &Path) -> Result<Vec<Document>> {
    let mut ids: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    ids.sort();
    if ids.is_empty() {
        return Err(Error::invalid(format!("no .txt files in {}", dir.display())));
    }
    ids.iter().map(|id| Document::load(dir, id)).collect()
}

type PairKey = ((usize, usize, usize), (usize, usize, usize));

fn pair_key(a: &ConceptSpan, b: &ConceptSpan) -> PairKey {
    if a.key() <= b.key() {
        (a.key(), b.key())
    } else {
        (b.key(), a.key())
    }
}

fn admits(label: RelationLabel, a: ConceptType, b: ConceptType) -> bool {
    match label.argument_types() {
        Some((x, y)) => (a, b) == (x, y) || (a, b) == (y, x),
        None => true,
    }
}

/// Orders an admissible pair so the treatment or test comes first, or the
/// earlier problem for two problems. `None` if the types cannot be related.
pub fn normalize_pair<'a>(a: &'a ConceptSpan, b: &'a ConceptSpan) -> Option<(&'a ConceptSpan, &'a ConceptSpan)> {
    use ConceptType::*;
    match (a.kind, b.kind) {
        (Treatment | Test, Problem) => Some((a, b)),
        (Problem, Treatment | Test) => Some((b, a)),
        (Problem, Problem) => Some(if a.key() <= b.key() { (a, b) } else { (b, a) }),
        _ => None,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateSet {
    pub records: Vec<RelationRecord>,
    /// Co-sentential pairs whose types no label admits.
    pub inadmissible: usize,
}

impl CandidateSet {
    pub fn labelled(&self) -> usize {
        self.records.iter().filter(|r| r.label != RelationLabel::None).count()
    }
}

/// All admissible same-line concept pairs, gold-labelled or NONE, sorted by
/// position.
pub fn generate_candidates(doc: &Document) -> CandidateSet {
    let gold: HashMap<PairKey, RelationLabel> = doc
        .relations
        .iter()
        .map(|r| (pair_key(&r.first, &r.second), r.label))
        .collect();

    let mut by_line: BTreeMap<usize, Vec<&ConceptSpan>> = BTreeMap::new();
    for c in &doc.concepts {
        by_line.entry(c.line).or_default().push(c);
    }

    let mut out = CandidateSet::default();
    for concepts in by_line.values_mut() {
        concepts.sort();
        concepts.dedup_by(|a, b| a.key() == b.key());
        for i in 0..concepts.len() {
            for j in i + 1..concepts.len() {
                let Some((a, b)) = normalize_pair(concepts[i], concepts[j]) else {
                    out.inadmissible += 1;
                    continue;
                };
                let label = gold.get(&pair_key(a, b)).copied().unwrap_or(RelationLabel::None);
                out.records.push(RelationRecord {
                    doc_id: doc.doc_id.clone(),
                    first: a.clone(),
                    second: b.clone(),
                    label,
                });
            }
        }
    }
    out.records
        .sort_by_key(|r| (r.first.key(), r.second.key()));
    out
}

/// p·t + p·e + p(p−1)/2 for a sentence with `p` problems, `t` treatments and
/// `e` tests.
pub fn expected_candidates(p: usize, t: usize, e: usize) -> usize {
    p * t + p * e + p * p.saturating_sub(1) / 2
}

/// One line of the candidate file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub doc_id: String,
    pub line: usize,
    pub first: (usize, usize),
    pub first_kind: ConceptType,
    pub second: (usize, usize),
    pub second_kind: ConceptType,
    pub label: RelationLabel,
}

impl Candidate {
    pub fn from_record(r: &RelationRecord) -> Self {
        Candidate {
            doc_id: r.doc_id.clone(),
            line: r.first.line,
            first: (r.first.start, r.first.end),
            first_kind: r.first.kind,
            second: (r.second.start, r.second.end),
            second_kind: r.second.kind,
            label: r.label,
        }
    }

    pub fn spans(&self) -> (ConceptSpan, ConceptSpan) {
        (
            ConceptSpan::new(self.line, self.first.0, self.first.1, self.first_kind, ""),
            ConceptSpan::new(self.line, self.second.0, self.second.1, self.second_kind, ""),
        )
    }

    /// Sentence id used in CoNLL-U output, `doc:line`.
    pub fn sent_id(&self) -> String {
        sent_id(&self.doc_id, self.line)
    }
}

pub fn sent_id(doc_id: &str, line: usize) -> String {
    format!("{}:{}", doc_id, line)
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}:{}\t{}\t{}:{}\t{}\t{}",
            self.doc_id,
            self.line,
            self.first.0,
            self.first.1,
            self.first_kind,
            self.second.0,
            self.second.1,
            self.second_kind,
            self.label
        )
    }
}

fn parse_offsets(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("span '{}' is not start:end", s)))?;
    let (a, b) = (number(a, "token offset")?, number(b, "token offset")?);
    if a > b {
        return Err(Error::invalid(format!("span '{}' has start after end", s)));
    }
    Ok((a, b))
}

impl FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let f: Vec<&str> = s.trim_end_matches(['\r', '\n']).split('\t').collect();
        if f.len() != 7 {
            return Err(Error::invalid(format!("expected 7 fields, found {}", f.len())));
        }
        Ok(Candidate {
            doc_id: f[0].to_string(),
            line: number(f[1], "line number")?,
            first: parse_offsets(f[2])?,
            first_kind: f[3].parse()?,
            second: parse_offsets(f[4])?,
            second_kind: f[5].parse()?,
            label: f[6].parse()?,
        })
    }
}

pub fn write_candidates<W: Write>(cands: &[Candidate], mut out: W) -> Result<()> {
    for c in cands {
        writeln!(out, "{}", c)?;
    }
    Ok(())
}

pub fn read_candidates(text: &str) -> Result<Vec<Candidate>> {
    parse_lines(text, str::parse)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT_75: &str = "He did have burst of atrial fibrillation and was started on a Amiodarone gtt .";
    const CON_75: &str = r#"c="burst of atrial fibrillation" 75:3 75:6||t="problem""#;
    const CON_75B: &str = r#"c="a amiodarone gtt" 75:11 75:13||t="treatment""#;
    const REL_75: &str = r#"c="a amiodarone gtt" 75:11 75:13||r="TrAP"||c="burst of atrial fibrillation" 75:3 75:6"#;

    #[test]
    fn concept_line() {
        let c = parse_concept_line(CON_75).unwrap();
        assert_eq!((c.line, c.start, c.end), (75, 3, 6));
        assert_eq!(c.kind, ConceptType::Problem);
        assert_eq!(c.text, "burst of atrial fibrillation");
        assert_eq!(format_concept_line(&c), CON_75);

        let x = parse_concept_line(r#"c="x" 1:0 1:0||t="test""#).unwrap();
        assert_eq!((x.start, x.end, x.kind), (0, 0, ConceptType::Test));
    }

    #[test]
    fn bad_concept_lines() {
        for line in [
            r#"c="x" 75:3 76:6||t="problem""#,
            r#"c="x" 75:6 75:3||t="problem""#,
            r#"c="x" 75:3 75:6||t="drug""#,
            r#"c="x" 75:3||t="problem""#,
        ] {
            assert!(parse_concept_line(line).is_err(), "{}", line);
        }
    }

    #[test]
    fn relation_line() {
        let r = parse_relation_line(REL_75).unwrap();
        assert_eq!(r.label, RelationLabel::TrAP);
        assert_eq!(r.first.key(), (75, 11, 13));
        assert_eq!(r.second.key(), (75, 3, 6));
        assert_eq!(r.second.text, "burst of atrial fibrillation");
    }

    #[test]
    fn bad_relation_lines() {
        assert!(parse_relation_line(&REL_75.replace("TrAP", "XYZ")).is_err());
        assert!(parse_relation_line(&REL_75.replace("TrAP", "NONE")).is_err());
        assert!(parse_relation_line(&REL_75.replace("75:3 75:6", "76:3 76:6")).is_err());
    }

    fn doc_75() -> Document {
        let mut text = "x\n".repeat(74);
        text.push_str(TEXT_75);
        text.push('\n');
        Document::from_strs("d", &text, &format!("{}\n{}\n", CON_75, CON_75B), REL_75).unwrap()
    }

    #[test]
    fn document_resolves_types() {
        let d = doc_75();
        assert_eq!(d.relations.len(), 1);
        assert_eq!(d.relations[0].first.kind, ConceptType::Treatment);
        assert_eq!(d.tokens(75)[3..=6], ["burst", "of", "atrial", "fibrillation"]);
        let c = generate_candidates(&d);
        assert_eq!(c.records.len(), 1);
        assert_eq!(c.records[0].label, RelationLabel::TrAP);
    }

    #[test]
    fn line_errors_carry_line_numbers() {
        let err = Document::from_strs("d", "a b\n", "\nnot a concept\n", "").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{:?}", err);
    }

    #[test]
    fn document_errors() {
        let text = "a b c\n";
        let con = "c=\"a\" 1:0 1:0||t=\"treatment\"\nc=\"b\" 1:1 1:1||t=\"problem\"\n";
        // offset past end of line
        assert!(Document::from_strs("d", text, "c=\"z\" 1:3 1:3||t=\"test\"", "").is_err());
        // missing line
        assert!(Document::from_strs("d", text, "c=\"z\" 2:0 2:0||t=\"test\"", "").is_err());
        // endpoint not a concept
        let rel = "c=\"a\" 1:0 1:0||r=\"TrAP\"||c=\"c\" 1:2 1:2";
        assert!(Document::from_strs("d", text, con, rel).is_err());
        // label incompatible with types
        let rel = "c=\"a\" 1:0 1:0||r=\"TeRP\"||c=\"b\" 1:1 1:1";
        assert!(Document::from_strs("d", text, con, rel).is_err());
        // conflicting labels
        let rel = "c=\"a\" 1:0 1:0||r=\"TrAP\"||c=\"b\" 1:1 1:1\nc=\"a\" 1:0 1:0||r=\"TrIP\"||c=\"b\" 1:1 1:1";
        assert!(Document::from_strs("d", text, con, rel).is_err());
        // duplicate with the same label is kept once
        let rel = "c=\"a\" 1:0 1:0||r=\"TrAP\"||c=\"b\" 1:1 1:1\nc=\"b\" 1:1 1:1||r=\"TrAP\"||c=\"a\" 1:0 1:0";
        assert_eq!(Document::from_strs("d", text, con, rel).unwrap().relations.len(), 1);
    }

    const NEURO: &str = "# Neurologic - The patient was seen by the Neurology consult service and underwent MRI head which revealed lesions suspicious for metastases , possible hemorrhages , and findings consistent with hypoxic brain injury .";

    fn neuro_doc() -> Document {
        let con = [
            r#"c="mri head" 1:14 1:15||t="test""#,
            r#"c="lesions" 1:18 1:18||t="problem""#,
            r#"c="metastases" 1:21 1:21||t="problem""#,
            r#"c="hemorrhages" 1:24 1:24||t="problem""#,
            r#"c="hypoxic brain injury" 1:30 1:32||t="problem""#,
        ]
        .join("\n");
        let rel = [
            r#"c="lesions" 1:18 1:18||r="PIP"||c="metastases" 1:21 1:21"#,
            r#"c="mri head" 1:14 1:15||r="TeRP"||c="lesions" 1:18 1:18"#,
            r#"c="mri head" 1:14 1:15||r="TeRP"||c="metastases" 1:21 1:21"#,
            r#"c="mri head" 1:14 1:15||r="TeRP"||c="hemorrhages" 1:24 1:24"#,
            r#"c="mri head" 1:14 1:15||r="TeRP"||c="hypoxic brain injury" 1:30 1:32"#,
        ]
        .join("\n");
        Document::from_strs("neuro", NEURO, &con, &rel).unwrap()
    }

    #[test]
    fn neurologic_sentence_candidates() {
        let d = neuro_doc();
        assert_eq!(d.tokens(1)[14..=15], ["MRI", "head"]);
        assert_eq!(d.tokens(1)[30..=32], ["hypoxic", "brain", "injury"]);
        let c = generate_candidates(&d);
        assert_eq!(c.records.len(), 10);
        assert_eq!(c.labelled(), 5);
        assert_eq!(c.inadmissible, 0);
        for r in &c.records {
            match r.first.kind {
                ConceptType::Test => assert_eq!(r.label, RelationLabel::TeRP),
                _ => assert!(r.first.start < r.second.start),
            }
        }
    }

    #[test]
    fn candidates_ignore_line_order() {
        let d = neuro_doc();
        let mut shuffled = d.clone();
        shuffled.concepts.reverse();
        shuffled.relations.reverse();
        assert_eq!(generate_candidates(&d), generate_candidates(&shuffled));
    }

    #[test]
    fn filters() {
        let one = Document::from_strs("d", "a b\n", "c=\"a\" 1:0 1:0||t=\"problem\"", "").unwrap();
        assert!(generate_candidates(&one).records.is_empty());
        let two = Document::from_strs(
            "d",
            "a b\n",
            "c=\"a\" 1:0 1:0||t=\"treatment\"\nc=\"b\" 1:1 1:1||t=\"treatment\"",
            "",
        )
        .unwrap();
        let c = generate_candidates(&two);
        assert!(c.records.is_empty());
        assert_eq!(c.inadmissible, 1);
    }

    #[test]
    fn concepts_on_different_lines_never_pair() {
        let d = Document::from_strs(
            "d",
            "a\nb\n",
            "c=\"a\" 1:0 1:0||t=\"treatment\"\nc=\"b\" 2:0 2:0||t=\"problem\"",
            "",
        )
        .unwrap();
        assert!(generate_candidates(&d).records.is_empty());
    }

    #[test]
    fn count_formula() {
        assert_eq!(expected_candidates(4, 0, 1), 10);
        assert_eq!(expected_candidates(1, 0, 0), 0);
        assert_eq!(expected_candidates(0, 2, 0), 0);
        assert_eq!(expected_candidates(3, 2, 1), 6 + 3 + 3);
    }

    #[test]
    fn candidate_file_round_trip() {
        let cands: Vec<Candidate> = generate_candidates(&neuro_doc())
            .records
            .iter()
            .map(Candidate::from_record)
            .collect();
        let mut buf = Vec::new();
        write_candidates(&cands, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("neuro\t1\t14:15\ttest\t18:18\tproblem\tTeRP\n"));
        assert_eq!(read_candidates(&text).unwrap(), cands);
        assert!(read_candidates("a\t1\t0:1\ttest").is_err());
        assert!(read_candidates("a\t1\t2:1\ttest\t0:0\tproblem\tTeRP").is_err());
    }

    #[test]
    fn document_strings_round_trip() {
        let d = neuro_doc();
        let again = Document::from_strs("neuro", &d.text_string(), &d.con_string(), &d.rel_string()).unwrap();
        assert_eq!(again, d);
    }
}
