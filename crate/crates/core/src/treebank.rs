//! Tokens, dependency sentences, and CoNLL-U input/output.
//!
//! Only the columns the pipeline needs are kept: ID, FORM, UPOS (falling back
//! to XPOS when UPOS is `_`), HEAD and DEPREL. Everything else is written back
//! as `_`. Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A single token. `head == 0` attaches the token to the artificial root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub pos: String,
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn new(
        index: usize,
        form: impl Into<String>,
        pos: impl Into<String>,
        head: usize,
        deprel: impl Into<String>,
    ) -> Self {
        Token {
            index,
            form: form.into(),
            pos: pos.into(),
            head,
            deprel: deprel.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepSentence {
    pub tokens: Vec<Token>,
    /// Raw comment lines, including the leading `#`.
    pub comments: Vec<String>,
}

impl DepSentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        DepSentence {
            tokens,
            comments: Vec::new(),
        }
    }

    /// Builds a sentence from parallel columns. Indices are assigned 1..=n.
    pub fn from_columns<S: AsRef<str>>(
        forms: &[S],
        pos: &[S],
        heads: &[usize],
        deprels: &[S],
    ) -> Self {
        assert!(forms.len() == pos.len() && pos.len() == heads.len() && heads.len() == deprels.len());
        let tokens = (0..forms.len())
            .map(|i| {
                Token::new(
                    i + 1,
                    forms[i].as_ref(),
                    pos[i].as_ref(),
                    heads[i],
                    deprels[i].as_ref(),
                )
            })
            .collect();
        DepSentence::new(tokens)
    }

    /// Sentence with forms and tags only; heads are zeroed and labels set to `_`.
    pub fn unparsed<S: AsRef<str>>(forms: &[S], pos: &[S]) -> Self {
        let heads = vec![0; forms.len()];
        let deprels = vec!["_"; forms.len()];
        let forms: Vec<&str> = forms.iter().map(AsRef::as_ref).collect();
        let pos: Vec<&str> = pos.iter().map(AsRef::as_ref).collect();
        DepSentence::from_columns(&forms, &pos, &heads, &deprels)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token with the given 1-based index.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn head(&self, index: usize) -> usize {
        self.tokens[index - 1].head
    }

    pub fn heads(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.head).collect()
    }

    /// Value of a `# sent_id = ...` comment, if present.
    pub fn sent_id(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let rest = c.strip_prefix('#')?.trim_start();
            let rest = rest.strip_prefix("sent_id")?.trim_start();
            Some(rest.strip_prefix('=')?.trim())
        })
    }

    /// Name used in error messages.
    pub fn describe(&self, ordinal: usize) -> String {
        match self.sent_id() {
            Some(id) => format!("{} ({})", ordinal, id),
            None => ordinal.to_string(),
        }
    }

    /// Checks token and tree invariants: consecutive indices, non-empty form
    /// and tag, heads in range, no self loops, a single root, no cycles.
    pub fn validate(&self, name: &str) -> Result<()> {
        let n = self.tokens.len();
        let mut roots = 0;
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.index != i + 1 {
                return Err(Error::structure(
                    name,
                    format!("token {} has index {}", i + 1, tok.index),
                ));
            }
            if tok.form.is_empty() || tok.pos.is_empty() {
                return Err(Error::structure(
                    name,
                    format!("token {} has an empty form or tag", tok.index),
                ));
            }
            if tok.head > n {
                return Err(Error::structure(
                    name,
                    format!(
                        "token {} has head {} outside 0..={}",
                        tok.index, tok.head, n
                    ),
                ));
            }
            if tok.head == tok.index {
                return Err(Error::structure(
                    name,
                    format!("token {} is its own head", tok.index),
                ));
            }
            if tok.head == 0 {
                roots += 1;
            }
        }
        if n > 0 && roots != 1 {
            return Err(Error::structure(
                name,
                format!("expected exactly one root, found {}", roots),
            ));
        }

        // 0 = unvisited, 1 = on current walk, 2 = reaches root
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        for start in 1..=n {
            let mut walk = Vec::new();
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                walk.push(cur);
                cur = self.tokens[cur - 1].head;
            }
            if state[cur] == 1 {
                return Err(Error::structure(
                    name,
                    format!("head cycle through token {}", cur),
                ));
            }
            for w in walk {
                state[w] = 2;
            }
        }
        Ok(())
    }

    /// True iff `ancestor` dominates `node` (reflexively).
    pub fn dominates(&self, ancestor: usize, node: usize) -> bool {
        let mut cur = node;
        let mut steps = 0;
        loop {
            if cur == ancestor {
                return true;
            }
            if cur == 0 || steps > self.tokens.len() {
                return false;
            }
            cur = self.tokens[cur - 1].head;
            steps += 1;
        }
    }

    /// True iff every arc's span contains only tokens its head dominates.
    /// Assumes the sentence is a valid tree.
    pub fn is_projective(&self) -> bool {
        for tok in &self.tokens {
            let (lo, hi) = if tok.head < tok.index {
                (tok.head, tok.index)
            } else {
                (tok.index, tok.head)
            };
            for between in lo + 1..hi {
                if !self.dominates(tok.head, between) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for DepSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comments {
            writeln!(f, "{}", c)?;
        }
        for t in &self.tokens {
            writeln!(
                f,
                "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\t_",
                t.index, t.form, t.pos, t.head, t.deprel
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Treebank {
    pub sentences: Vec<DepSentence>,
    pub source: String,
}

/// Whether HEAD and DEPREL must be present and form a valid tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadMode {
    Trees,
    /// Heads and labels are ignored (read as `0` / `_`); for parser input.
    TokensOnly,
}

impl Treebank {
    pub fn new(sentences: Vec<DepSentence>) -> Self {
        Treebank {
            sentences,
            source: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(DepSentence::len).sum()
    }
}

/// Reads a CoNLL-U stream whose sentences must be complete dependency trees.
pub fn read_conllu<R: BufRead>(input: R) -> Result<Treebank> {
    read_conllu_with(input, ReadMode::Trees)
}

pub fn read_conllu_with<R: BufRead>(input: R, mode: ReadMode) -> Result<Treebank> {
    let mut sentences = Vec::new();
    let mut current = DepSentence::default();

    let finish = |current: &mut DepSentence, sentences: &mut Vec<DepSentence>| -> Result<()> {
        let sent = std::mem::take(current);
        if sent.tokens.is_empty() {
            return Ok(());
        }
        if mode == ReadMode::Trees {
            sent.validate(&sent.describe(sentences.len() + 1))?;
        }
        sentences.push(sent);
        Ok(())
    };

    for (lineno, line) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            finish(&mut current, &mut sentences)?;
            continue;
        }
        if line.starts_with('#') {
            current.comments.push(line.to_owned());
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                lineno,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid ID '{}'", cols[0])))?;
        if index != current.tokens.len() + 1 {
            return Err(Error::parse(
                lineno,
                format!(
                    "token ID {} out of sequence (expected {})",
                    index,
                    current.tokens.len() + 1
                ),
            ));
        }
        let pos = if cols[3] != "_" { cols[3] } else { cols[4] };
        let (head, deprel) = match mode {
            ReadMode::Trees => {
                let head: usize = cols[6].parse().map_err(|_| {
                    Error::parse(lineno, format!("HEAD '{}' is not a non-negative integer", cols[6]))
                })?;
                (head, cols[7].to_owned())
            }
            ReadMode::TokensOnly => (0, "_".to_owned()),
        };
        current
            .tokens
            .push(Token::new(index, cols[1], pos, head, deprel));
    }
    finish(&mut current, &mut sentences)?;

    Ok(Treebank::new(sentences))
}

pub fn read_conllu_str(text: &str) -> Result<Treebank> {
    read_conllu(text.as_bytes())
}

/// Writes a treebank as CoNLL-U. Refuses to write sentences that are not
/// valid trees.
pub fn write_conllu<W: Write>(tb: &Treebank, mut out: W) -> Result<()> {
    for (i, sent) in tb.sentences.iter().enumerate() {
        sent.validate(&sent.describe(i + 1))?;
    }
    for sent in &tb.sentences {
        write!(out, "{}", sent)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_conllu_string(tb: &Treebank) -> Result<String> {
    let mut buf = Vec::new();
    write_conllu(tb, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CoNLL-U output is UTF-8"))
}
