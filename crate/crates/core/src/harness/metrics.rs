//! Precision, recall and F1 over the nine relation classes.

use serde::Serialize;

use crate::concept::RelationLabel;

const K: usize = RelationLabel::COUNT;

/// Rows are gold labels, columns predictions, both in [`RelationLabel::ALL`] order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub counts: [[u64; K]; K],
}

impl Confusion {
    pub fn new() -> Self {
        Confusion::default()
    }

    pub fn from_counts(counts: [[u64; K]; K]) -> Self {
        Confusion { counts }
    }

    pub fn add(&mut self, gold: RelationLabel, predicted: RelationLabel) {
        self.counts[gold.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &Confusion) {
        for g in 0..K {
            for p in 0..K {
                self.counts[g][p] += other.counts[g][p];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn predicted(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassScores {
    pub label: RelationLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// No gold and no predicted instances; scores are reported as 0.
    pub undefined: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// All scores are percentages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub classes: Vec<ClassScores>,
    pub micro: Averages,
    pub micro_excluding_none: Averages,
    /// Unweighted mean over classes that are not undefined.
    pub macro_avg: Averages,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn pooled(c: &Confusion, classes: &[usize]) -> Averages {
    let tp: u64 = classes.iter().map(|&k| c.counts[k][k]).sum();
    let predicted: u64 = classes.iter().map(|&k| c.predicted(k)).sum();
    let actual: u64 = classes.iter().map(|&k| c.support(k)).sum();
    let precision = ratio(tp, predicted);
    let recall = ratio(tp, actual);
    Averages {
        precision,
        recall,
        f1: harmonic(precision, recall),
    }
}

pub fn prf1(c: &Confusion) -> Metrics {
    let classes: Vec<ClassScores> = (0..K)
        .map(|k| {
            let tp = c.counts[k][k];
            let predicted = c.predicted(k);
            let support = c.support(k);
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            ClassScores {
                label: RelationLabel::from_index(k),
                precision,
                recall,
                f1: harmonic(precision, recall),
                support,
                undefined: predicted == 0 && support == 0,
            }
        })
        .collect();

    let defined: Vec<&ClassScores> = classes.iter().filter(|s| !s.undefined).collect();
    let mean = |f: fn(&ClassScores) -> f64| {
        if defined.is_empty() {
            0.0
        } else {
            defined.iter().map(|s| f(s)).sum::<f64>() / defined.len() as f64
        }
    };
    let macro_avg = Averages {
        precision: mean(|s| s.precision),
        recall: mean(|s| s.recall),
        f1: mean(|s| s.f1),
    };

    let all: Vec<usize> = (0..K).collect();
    let relations: Vec<usize> = (0..K).filter(|&k| k != RelationLabel::None.index()).collect();
    Metrics {
        micro: pooled(c, &all),
        micro_excluding_none: pooled(c, &relations),
        macro_avg,
        classes,
    }
}
