//! Cross-validation, metrics, significance testing and synthetic data.

mod metrics;
mod synth;
mod ttest;

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::concept::RelationLabel;
use crate::corpus::{generate_candidates, sent_id, Document};
use crate::error::{Error, Result};
use crate::parser::ParserModel;
use crate::relex::{train_relex, RelexHyper, WordVectors};
use crate::sdp::{extract, SdpInstance};
use crate::treebank::{DepSentence, Treebank};

pub use metrics::{prf1, Averages, ClassScores, Confusion, Metrics};
pub use synth::{generate_synthetic_corpus, marker_verbs, SynthSpec, SyntheticCorpus};
pub use ttest::{ln_gamma, paired_t_test, regularized_incomplete_beta, student_t_upper_tail, TTest};

/// Document-level fold assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    /// Shuffles the ids with `seed` and deals them round-robin, so fold sizes
    /// differ by at most one.
    pub fn new<S: AsRef<str>>(doc_ids: &[S], k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("need at least 2 folds, got {}", k)));
        }
        let mut ids: Vec<&str> = doc_ids.iter().map(AsRef::as_ref).collect();
        ids.sort_unstable();
        let before = ids.len();
        ids.dedup();
        if ids.len() != before {
            return Err(Error::invalid("document ids must be unique"));
        }
        if ids.len() < k {
            return Err(Error::invalid(format!(
                "{} folds requested but only {} documents",
                k,
                ids.len()
            )));
        }
        ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let assignment = ids.iter().enumerate().map(|(i, id)| (id.to_string(), i % k)).collect();
        Ok(FoldPlan { k, seed, assignment })
    }

    pub fn fold_of(&self, doc_id: &str) -> Option<usize> {
        self.assignment.get(doc_id).copied()
    }

    pub fn test_documents(&self, fold: usize) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_documents: Vec<String>,
    pub train_instances: usize,
    pub test_instances: usize,
    pub confusion: Confusion,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub folds: Vec<FoldResult>,
    /// Unweighted mean of the fold micro-F1 scores.
    pub average_micro_f1: f64,
    pub average_micro_f1_excluding_none: f64,
    /// Pooled over all test folds.
    pub confusion: Confusion,
    pub metrics: Metrics,
    /// Candidates whose path could not be extracted.
    pub skipped: usize,
    /// Co-sentential pairs with no admissible label.
    pub inadmissible: usize,
}

impl EvalReport {
    pub fn fold_micro_f1(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.metrics.micro.f1).collect()
    }
}

/// Candidate instances of one document.
#[derive(Clone, Debug)]
pub struct DocumentInstances {
    pub doc_id: String,
    pub instances: Vec<SdpInstance>,
}

/// Parses the sentences that carry candidates and extracts one path per
/// candidate. Returns the instances and the number of skipped candidates.
pub fn build_instances(
    docs: &[Document],
    sentences: &Treebank,
    parser: &ParserModel,
) -> Result<(Vec<DocumentInstances>, usize, usize)> {
    let by_id: HashMap<&str, &DepSentence> = sentences
        .sentences
        .iter()
        .filter_map(|s| s.sent_id().map(|id| (id, s)))
        .collect();

    let mut skipped = 0;
    let mut inadmissible = 0;
    let mut out = Vec::with_capacity(docs.len());
    for doc in docs {
        let cands = generate_candidates(doc);
        inadmissible += cands.inadmissible;
        let mut parsed: BTreeMap<usize, DepSentence> = BTreeMap::new();
        let mut instances = Vec::with_capacity(cands.records.len());
        for r in &cands.records {
            let line = r.first.line;
            if !parsed.contains_key(&line) {
                let id = sent_id(&doc.doc_id, line);
                let s = by_id
                    .get(id.as_str())
                    .ok_or_else(|| Error::invalid(format!("no tagged sentence with sent_id {}", id)))?;
                let tokens = doc.tokens(line);
                if s.len() != tokens.len() {
                    return Err(Error::invalid(format!(
                        "sentence {} has {} tokens but the text line has {}",
                        id,
                        s.len(),
                        tokens.len()
                    )));
                }
                parsed.insert(line, parser.parse(s));
            }
            match extract(&parsed[&line], &r.first, &r.second, r.label) {
                Ok(inst) => instances.push(inst),
                Err(e) => {
                    warn!("{} line {}: skipping candidate: {}", doc.doc_id, line, e);
                    skipped += 1;
                }
            }
        }
        out.push(DocumentInstances {
            doc_id: doc.doc_id.clone(),
            instances,
        });
    }
    Ok((out, skipped, inadmissible))
}

/// Seed for the relation model of `fold`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_add((fold as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Trains and evaluates on each fold. Folds run in parallel; results do not
/// depend on scheduling.
pub fn crossval_instances(
    docs: &[DocumentInstances],
    plan: &FoldPlan,
    hyper: &RelexHyper,
    pretrained: Option<&WordVectors>,
) -> Result<Vec<FoldResult>> {
    for d in docs {
        if plan.fold_of(&d.doc_id).is_none() {
            return Err(Error::invalid(format!("document {} has no fold", d.doc_id)));
        }
    }
    (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let (test, train): (Vec<&DocumentInstances>, Vec<&DocumentInstances>) =
                docs.iter().partition(|d| plan.fold_of(&d.doc_id) == Some(fold));
            let train: Vec<SdpInstance> = train.iter().flat_map(|d| d.instances.iter().cloned()).collect();
            if train.is_empty() {
                return Err(Error::invalid(format!("fold {} has no training candidates", fold + 1)));
            }
            let h = RelexHyper {
                seed: fold_seed(hyper.seed, fold),
                ..hyper.clone()
            };
            let model = train_relex(&train, &h, pretrained)?.model;
            let mut confusion = Confusion::new();
            let mut test_instances = 0;
            for inst in test.iter().flat_map(|d| d.instances.iter()) {
                confusion.add(inst.label, model.predict(inst)?);
                test_instances += 1;
            }
            let metrics = prf1(&confusion);
            info!(
                "fold {}: {} train, {} test, micro F1 {:.2}",
                fold + 1,
                train.len(),
                test_instances,
                metrics.micro.f1
            );
            Ok(FoldResult {
                fold,
                test_documents: test.iter().map(|d| d.doc_id.clone()).collect(),
                train_instances: train.len(),
                test_instances,
                confusion,
                metrics,
            })
        })
        .collect()
}

/// Full pipeline: parse, extract paths, then cross-validate the relation model.
pub fn crossval(
    docs: &[Document],
    sentences: &Treebank,
    plan: &FoldPlan,
    parser: &ParserModel,
    hyper: &RelexHyper,
    pretrained: Option<&WordVectors>,
) -> Result<EvalReport> {
    let (instances, skipped, inadmissible) = build_instances(docs, sentences, parser)?;
    let folds = crossval_instances(&instances, plan, hyper, pretrained)?;
    Ok(summarize(folds, skipped, inadmissible))
}

pub fn summarize(folds: Vec<FoldResult>, skipped: usize, inadmissible: usize) -> EvalReport {
    let mut confusion = Confusion::new();
    for f in &folds {
        confusion.merge(&f.confusion);
    }
    let k = folds.len().max(1) as f64;
    EvalReport {
        average_micro_f1: folds.iter().map(|f| f.metrics.micro.f1).sum::<f64>() / k,
        average_micro_f1_excluding_none: folds.iter().map(|f| f.metrics.micro_excluding_none.f1).sum::<f64>()
            / k,
        metrics: prf1(&confusion),
        confusion,
        folds,
        skipped,
        inadmissible,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::invalid(format!("unknown report format '{}'", s))),
        }
    }
}

fn write_metrics_tsv<W: Write>(out: &mut W, scope: &str, m: &Metrics) -> Result<()> {
    for c in &m.classes {
        writeln!(
            out,
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}",
            scope, c.label, c.precision, c.recall, c.f1, c.support, c.undefined
        )?;
    }
    for (name, a) in [
        ("micro", &m.micro),
        ("micro_excluding_none", &m.micro_excluding_none),
        ("macro", &m.macro_avg),
    ] {
        writeln!(out, "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t\t", scope, name, a.precision, a.recall, a.f1)?;
    }
    Ok(())
}

/// TSV columns: scope, class, precision, recall, f1, support, undefined.
/// Scopes are `fold<N>` and `pooled`, followed by `average` rows.
pub fn write_report<W: Write>(report: &EvalReport, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        ReportFormat::Tsv => {
            writeln!(out, "scope\tclass\tprecision\trecall\tf1\tsupport\tundefined")?;
            for f in &report.folds {
                write_metrics_tsv(&mut out, &format!("fold{}", f.fold + 1), &f.metrics)?;
            }
            write_metrics_tsv(&mut out, "pooled", &report.metrics)?;
            writeln!(out, "average\tmicro\t\t\t{:.4}\t\t", report.average_micro_f1)?;
            writeln!(
                out,
                "average\tmicro_excluding_none\t\t\t{:.4}\t\t",
                report.average_micro_f1_excluding_none
            )?;
        }
    }
    Ok(())
}

/// Confusion matrix as TSV, gold labels down the rows.
pub fn write_confusion<W: Write>(c: &Confusion, mut out: W) -> Result<()> {
    let header: Vec<&str> = RelationLabel::ALL.iter().map(|l| l.as_str()).collect();
    writeln!(out, "gold\\predicted\t{}", header.join("\t"))?;
    for (g, row) in c.counts.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(out, "{}\t{}", RelationLabel::from_index(g), cells.join("\t"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_partitions_documents() {
        let ids: Vec<String> = (0..23).map(|i| format!("d{}", i)).collect();
        let plan = FoldPlan::new(&ids, 5, 3).unwrap();
        let mut all: Vec<&str> = (0..5).flat_map(|f| plan.test_documents(f)).collect();
        let sizes: Vec<usize> = (0..5).map(|f| plan.test_documents(f).len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        all.sort();
        let mut expected: Vec<&str> = ids.iter().map(String::as_str).collect();
        expected.sort();
        assert_eq!(all, expected);
        assert_eq!(plan, FoldPlan::new(&ids, 5, 3).unwrap());
    }

    #[test]
    fn plan_errors() {
        assert!(FoldPlan::new(&["a", "b"], 3, 0).is_err());
        assert!(FoldPlan::new(&["a", "b"], 1, 0).is_err());
        assert!(FoldPlan::new(&["a", "a", "b"], 2, 0).is_err());
        let plan = FoldPlan::new(&["a", "b"], 2, 0).unwrap();
        assert_eq!(plan.test_documents(0).len(), 1);
        assert_eq!(plan.test_documents(1).len(), 1);
    }

    #[test]
    fn fold_without_training_data_is_an_error() {
        let docs = vec![
            DocumentInstances {
                doc_id: "a".into(),
                instances: vec![],
            },
            DocumentInstances {
                doc_id: "b".into(),
                instances: vec![],
            },
        ];
        let plan = FoldPlan::new(&["a", "b"], 2, 0).unwrap();
        assert!(crossval_instances(&docs, &plan, &RelexHyper::default(), None).is_err());
    }

    #[test]
    fn report_formats() {
        let mut c = Confusion::new();
        c.add(RelationLabel::PIP, RelationLabel::PIP);
        let fold = FoldResult {
            fold: 0,
            test_documents: vec!["a".into()],
            train_instances: 3,
            test_instances: 1,
            metrics: prf1(&c),
            confusion: c,
        };
        let report = summarize(vec![fold], 0, 0);
        assert_eq!(report.average_micro_f1, 100.0);
        let mut tsv = Vec::new();
        write_report(&report, ReportFormat::Tsv, &mut tsv).unwrap();
        let tsv = String::from_utf8(tsv).unwrap();
        assert!(tsv.starts_with("scope\tclass\tprecision"));
        assert!(tsv.contains("fold1\tPIP\t100.0000\t100.0000\t100.0000\t1\tfalse"));
        let mut json = Vec::new();
        write_report(&report, ReportFormat::Json, &mut json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["average_micro_f1"], 100.0);
        assert_eq!(v["folds"][0]["metrics"]["classes"][7]["label"], "PIP");
    }
}
