//! Concept and relation vocabularies shared by the corpus reader, the path
//! extractor and the classifier.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptType {
    Problem,
    Treatment,
    Test,
}

impl ConceptType {
    pub const ALL: [ConceptType; 3] = [ConceptType::Problem, ConceptType::Treatment, ConceptType::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            ConceptType::Problem => "problem",
            ConceptType::Treatment => "treatment",
            ConceptType::Test => "test",
        }
    }

    fn tag_name(self) -> &'static str {
        match self {
            ConceptType::Problem => "Problem",
            ConceptType::Treatment => "Treatment",
            ConceptType::Test => "Test",
        }
    }
}

impl fmt::Display for ConceptType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConceptType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "problem" => Ok(ConceptType::Problem),
            "treatment" => Ok(ConceptType::Treatment),
            "test" => Ok(ConceptType::Test),
            _ => Err(Error::invalid(format!("unknown concept type '{}'", s))),
        }
    }
}

/// A concept mention: 1-based line, 0-based inclusive token offsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConceptSpan {
    pub line: usize,
    pub start: usize,
    pub end: usize,
    pub kind: ConceptType,
    pub text: String,
}

impl ConceptSpan {
    pub fn new(line: usize, start: usize, end: usize, kind: ConceptType, text: impl Into<String>) -> Self {
        ConceptSpan {
            line,
            start,
            end,
            kind,
            text: text.into(),
        }
    }

    /// Position key, ignoring type and text.
    pub fn key(&self) -> (usize, usize, usize) {
        (self.line, self.start, self.end)
    }

    pub fn overlaps(&self, other: &ConceptSpan) -> bool {
        self.line == other.line && self.start <= other.end && other.start <= self.end
    }

    /// 1-based sentence token indices covered by the span.
    pub fn token_indices(&self) -> std::ops::RangeInclusive<usize> {
        self.start + 1..=self.end + 1
    }
}

/// Concept tag of a path token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BioTag {
    Begin(ConceptType),
    Inside(ConceptType),
    Outside,
}

impl BioTag {
    /// All seven tags, in a fixed order.
    pub fn all() -> Vec<BioTag> {
        let mut v = Vec::with_capacity(7);
        for t in ConceptType::ALL {
            v.push(BioTag::Begin(t));
            v.push(BioTag::Inside(t));
        }
        v.push(BioTag::Outside);
        v
    }

    pub fn is_concept(self) -> bool {
        self != BioTag::Outside
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioTag::Begin(t) => write!(f, "B_{}", t.tag_name()),
            BioTag::Inside(t) => write!(f, "I_{}", t.tag_name()),
            BioTag::Outside => f.write_str("O"),
        }
    }
}

impl FromStr for BioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(BioTag::Outside);
        }
        let bad = || Error::invalid(format!("unknown concept tag '{}'", s));
        let (prefix, kind) = s.split_once('_').ok_or_else(bad)?;
        let kind: ConceptType = kind.parse().map_err(|_| bad())?;
        match prefix {
            "B" => Ok(BioTag::Begin(kind)),
            "I" => Ok(BioTag::Inside(kind)),
            _ => Err(bad()),
        }
    }
}

/// The eight i2b2-2010 relation types plus NONE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationLabel {
    TrIP,
    TrWP,
    TrCP,
    TrAP,
    TrNAP,
    TeRP,
    TeCP,
    PIP,
    #[serde(rename = "NONE")]
    None,
}

impl RelationLabel {
    /// Class order used by the classifier output and the confusion matrix.
    pub const ALL: [RelationLabel; 9] = [
        RelationLabel::TrIP,
        RelationLabel::TrWP,
        RelationLabel::TrCP,
        RelationLabel::TrAP,
        RelationLabel::TrNAP,
        RelationLabel::TeRP,
        RelationLabel::TeCP,
        RelationLabel::PIP,
        RelationLabel::None,
    ];

    pub const COUNT: usize = 9;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> RelationLabel {
        Self::ALL[i]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationLabel::TrIP => "TrIP",
            RelationLabel::TrWP => "TrWP",
            RelationLabel::TrCP => "TrCP",
            RelationLabel::TrAP => "TrAP",
            RelationLabel::TrNAP => "TrNAP",
            RelationLabel::TeRP => "TeRP",
            RelationLabel::TeCP => "TeCP",
            RelationLabel::PIP => "PIP",
            RelationLabel::None => "NONE",
        }
    }

    /// Argument types `(first, second)` the label requires; `None` for NONE.
    pub fn argument_types(self) -> Option<(ConceptType, ConceptType)> {
        use ConceptType::*;
        match self {
            RelationLabel::TrIP
            | RelationLabel::TrWP
            | RelationLabel::TrCP
            | RelationLabel::TrAP
            | RelationLabel::TrNAP => Some((Treatment, Problem)),
            RelationLabel::TeRP | RelationLabel::TeCP => Some((Test, Problem)),
            RelationLabel::PIP => Some((Problem, Problem)),
            RelationLabel::None => None,
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown relation label '{}'", s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_text_and_index() {
        for (i, l) in RelationLabel::ALL.iter().enumerate() {
            assert_eq!(l.index(), i);
            assert_eq!(l.as_str().parse::<RelationLabel>().unwrap(), *l);
        }
        assert!("XYZ".parse::<RelationLabel>().is_err());
        assert_eq!(serde_json::to_string(&RelationLabel::None).unwrap(), "\"NONE\"");
    }

    #[test]
    fn bio_tags() {
        let all = BioTag::all();
        assert_eq!(all.len(), 7);
        for t in all {
            assert_eq!(t.to_string().parse::<BioTag>().unwrap(), t);
        }
        assert_eq!(BioTag::Begin(ConceptType::Test).to_string(), "B_Test");
        assert!("B_Drug".parse::<BioTag>().is_err());
    }

    #[test]
    fn overlap() {
        let a = ConceptSpan::new(1, 0, 2, ConceptType::Test, "a");
        assert!(a.overlaps(&ConceptSpan::new(1, 2, 3, ConceptType::Problem, "b")));
        assert!(!a.overlaps(&ConceptSpan::new(1, 3, 3, ConceptType::Problem, "b")));
        assert!(!a.overlaps(&ConceptSpan::new(2, 0, 2, ConceptType::Problem, "b")));
    }
}
