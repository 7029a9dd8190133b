//! Arc-standard transition system and its static oracle.
//!
//! A configuration is a stack (bottom is the artificial root, index 0), a
//! buffer of unread tokens, and the arcs built so far. Three transitions:
//!
//! * `LEFT_ARC(L)`:  `S|i,j; B; A  =>  S|j; B; A + (j -L-> i)`
//! * `RIGHT_ARC(L)`: `S|i,j; B; A  =>  S|i; B; A + (i -L-> j)`
//! * `SHIFT`:        `S; j|B; A    =>  S|j; B; A`

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::treebank::DepSentence;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transition {
    Shift,
    LeftArc(String),
    RightArc(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    Shift,
    LeftArc,
    RightArc,
}

impl Transition {
    pub fn kind(&self) -> TransitionKind {
        match self {
            Transition::Shift => TransitionKind::Shift,
            Transition::LeftArc(_) => TransitionKind::LeftArc,
            Transition::RightArc(_) => TransitionKind::RightArc,
        }
    }

    /// Dependency label, empty for `SHIFT`.
    pub fn label(&self) -> &str {
        match self {
            Transition::Shift => "",
            Transition::LeftArc(l) | Transition::RightArc(l) => l,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Shift => write!(f, "SHIFT"),
            Transition::LeftArc(l) => write!(f, "LEFT_ARC:{}", l),
            Transition::RightArc(l) => write!(f, "RIGHT_ARC:{}", l),
        }
    }
}

impl FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("not a transition: '{}'", s));
        if s == "SHIFT" {
            return Ok(Transition::Shift);
        }
        let (kind, label) = s.split_once(':').ok_or_else(bad)?;
        if label.is_empty() {
            return Err(bad());
        }
        match kind {
            "LEFT_ARC" => Ok(Transition::LeftArc(label.to_owned())),
            "RIGHT_ARC" => Ok(Transition::RightArc(label.to_owned())),
            _ => Err(bad()),
        }
    }
}

/// One transition per line.
pub fn format_sequence(seq: &[Transition]) -> String {
    seq.iter().map(|t| format!("{}\n", t)).collect()
}

pub fn parse_sequence(text: &str) -> Result<Vec<Transition>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse())
        .collect()
}

/// The set of legal transition kinds in a configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Legal {
    pub shift: bool,
    pub left_arc: bool,
    pub right_arc: bool,
}

impl Legal {
    pub fn allows(&self, kind: TransitionKind) -> bool {
        match kind {
            TransitionKind::Shift => self.shift,
            TransitionKind::LeftArc => self.left_arc,
            TransitionKind::RightArc => self.right_arc,
        }
    }

    pub fn kinds(&self) -> Vec<TransitionKind> {
        let mut v = Vec::new();
        if self.left_arc {
            v.push(TransitionKind::LeftArc);
        }
        if self.right_arc {
            v.push(TransitionKind::RightArc);
        }
        if self.shift {
            v.push(TransitionKind::Shift);
        }
        v
    }
}

/// Parser state over a sentence of `n` tokens.
///
/// The buffer always holds a contiguous suffix `next..=n` of the sentence,
/// so it is stored as a cursor. Arcs are stored per dependent, which makes
/// a second head for the same dependent unrepresentable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    stack: Vec<usize>,
    next: usize,
    n: usize,
    heads: Vec<Option<usize>>,
    labels: Vec<String>,
}

impl Configuration {
    pub fn initial(sentence: &DepSentence) -> Result<Self> {
        Self::for_length(sentence.len())
    }

    pub fn for_length(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cannot build a configuration for an empty sentence"));
        }
        Ok(Configuration {
            stack: vec![0],
            next: 1,
            n,
            heads: vec![None; n + 1],
            labels: vec![String::new(); n + 1],
        })
    }

    pub fn sentence_len(&self) -> usize {
        self.n
    }

    pub fn stack(&self) -> &[usize] {
        &self.stack
    }

    /// Remaining buffer in sentence order.
    pub fn buffer(&self) -> Vec<usize> {
        (self.next..=self.n).collect()
    }

    pub fn buffer_len(&self) -> usize {
        self.n + 1 - self.next
    }

    /// The `i`-th buffer item from the front, 0-based.
    pub fn buffer_item(&self, i: usize) -> Option<usize> {
        let idx = self.next + i;
        (idx <= self.n).then_some(idx)
    }

    /// The `i`-th stack item from the top, 0-based.
    pub fn stack_item(&self, i: usize) -> Option<usize> {
        self.stack.len().checked_sub(i + 1).map(|p| self.stack[p])
    }

    pub fn head_of(&self, dependent: usize) -> Option<usize> {
        self.heads[dependent]
    }

    pub fn label_of(&self, dependent: usize) -> Option<&str> {
        self.heads[dependent].map(|_| self.labels[dependent].as_str())
    }

    /// Arcs as `(head, label, dependent)` in dependent order.
    pub fn arcs(&self) -> Vec<(usize, String, usize)> {
        (1..=self.n)
            .filter_map(|d| self.heads[d].map(|h| (h, self.labels[d].clone(), d)))
            .collect()
    }

    /// Attached dependents of `head`, ascending.
    pub fn dependents(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n).filter(move |&d| self.heads[d] == Some(head))
    }

    /// Leftmost attached dependent to the left of `head`.
    pub fn leftmost_modifier(&self, head: usize) -> Option<usize> {
        (1..head.min(self.n + 1)).find(|&d| self.heads[d] == Some(head))
    }

    /// Rightmost attached dependent to the right of `head`.
    pub fn rightmost_modifier(&self, head: usize) -> Option<usize> {
        (head + 1..=self.n).rev().find(|&d| self.heads[d] == Some(head))
    }

    pub fn legal(&self) -> Legal {
        let height = self.stack.len();
        let buffer_empty = self.next > self.n;
        let second = if height >= 2 { Some(self.stack[height - 2]) } else { None };
        Legal {
            shift: !buffer_empty,
            left_arc: matches!(second, Some(s) if s != 0),
            // Attaching to the root is the final step: it needs [0, j] and an
            // empty buffer, which forces a single root.
            right_arc: match second {
                Some(0) => buffer_empty,
                Some(_) => true,
                None => false,
            },
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.next > self.n && self.stack.len() == 1
    }

    /// Applies `t` in place.
    pub fn apply_mut(&mut self, t: &Transition) -> Result<()> {
        let legal = self.legal();
        if !legal.allows(t.kind()) {
            return Err(Error::IllegalTransition {
                transition: t.to_string(),
                reason: self.violation(t.kind()),
            });
        }
        let height = self.stack.len();
        match t {
            Transition::Shift => {
                self.stack.push(self.next);
                self.next += 1;
            }
            Transition::LeftArc(label) => {
                let top = self.stack[height - 1];
                let second = self.stack.remove(height - 2);
                self.heads[second] = Some(top);
                self.labels[second] = label.clone();
            }
            Transition::RightArc(label) => {
                let top = self.stack.pop().expect("height checked");
                let second = self.stack[height - 2];
                self.heads[top] = Some(second);
                self.labels[top] = label.clone();
            }
        }
        Ok(())
    }

    /// Returns the configuration after `t`.
    pub fn apply(&self, t: &Transition) -> Result<Self> {
        let mut next = self.clone();
        next.apply_mut(t)?;
        Ok(next)
    }

    fn violation(&self, kind: TransitionKind) -> String {
        match kind {
            TransitionKind::Shift => "buffer is empty".to_owned(),
            TransitionKind::LeftArc if self.stack.len() < 2 => {
                "stack holds fewer than two items".to_owned()
            }
            TransitionKind::LeftArc => "the root cannot become a dependent".to_owned(),
            TransitionKind::RightArc if self.stack.len() < 2 => {
                "stack holds fewer than two items".to_owned()
            }
            TransitionKind::RightArc => {
                "attaching to the root requires an empty buffer".to_owned()
            }
        }
    }

    /// Every token appears in exactly one of stack, buffer, attached
    /// dependents; the root is never a dependent.
    pub fn check_conservation(&self) -> bool {
        let mut seen = vec![0u8; self.n + 1];
        for &s in &self.stack {
            seen[s] += 1;
        }
        for b in self.next..=self.n {
            seen[b] += 1;
        }
        for d in 1..=self.n {
            if self.heads[d].is_some() {
                seen[d] += 1;
            }
        }
        self.heads[0].is_none()
            && self.stack.first() == Some(&0)
            && seen[0] == 1
            && seen[1..].iter().all(|&c| c == 1)
    }

    /// Writes the arcs into a copy of `sentence`. Only valid once terminal.
    pub fn to_sentence(&self, sentence: &DepSentence) -> DepSentence {
        let mut out = sentence.clone();
        for tok in &mut out.tokens {
            tok.head = self.heads[tok.index].unwrap_or(0);
            tok.deprel = self.labels[tok.index].clone();
        }
        out
    }
}

/// Static oracle: the transition sequence deriving a projective gold tree.
pub fn oracle_sequence(sentence: &DepSentence) -> Result<Vec<Transition>> {
    sentence.validate(&sentence.describe(1))?;
    if !sentence.is_projective() {
        return Err(Error::invalid(
            "oracle requires a projective tree; filter non-projective sentences first",
        ));
    }
    let n = sentence.len();
    let mut pending = vec![0usize; n + 1];
    for tok in &sentence.tokens {
        pending[tok.head] += 1;
    }

    let mut config = Configuration::initial(sentence)?;
    let mut seq = Vec::with_capacity(2 * n);
    while !config.is_terminal() {
        let t = next_oracle_transition(&config, sentence, &pending);
        if let Transition::LeftArc(_) | Transition::RightArc(_) = t {
            let top = config.stack_item(0).unwrap();
            let second = config.stack_item(1).unwrap();
            let head = if t.kind() == TransitionKind::LeftArc { top } else { second };
            pending[head] -= 1;
        }
        config.apply_mut(&t)?;
        seq.push(t);
    }
    debug_assert_eq!(seq.len(), 2 * n);
    Ok(seq)
}

fn next_oracle_transition(
    config: &Configuration,
    gold: &DepSentence,
    pending: &[usize],
) -> Transition {
    if let (Some(top), Some(second)) = (config.stack_item(0), config.stack_item(1)) {
        if second != 0 && gold.head(second) == top {
            return Transition::LeftArc(gold.token(second).deprel.clone());
        }
        if gold.head(top) == second && pending[top] == 0 {
            return Transition::RightArc(gold.token(top).deprel.clone());
        }
    }
    Transition::Shift
}
