//! Lookup tables for the four input channels, and word2vec file IO.

use std::io::{BufRead, Write};

use log::warn;
use rand::Rng;

use crate::concept::BioTag;
use crate::error::{Error, Result};
use crate::nn::Matrix;
use crate::sdp::SdpInstance;
use crate::vocab::Vocab;

/// Id 0 of every channel vocabulary.
pub const UNK: usize = 0;
const UNK_TOKEN: &str = "<unk>";

/// One table per channel. Row 0 of each is the UNK vector.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTables {
    pub words: Vocab,
    pub word: Matrix,
    pub concepts: Vocab,
    pub concept: Matrix,
    pub deprels: Vocab,
    pub deprel: Matrix,
    pub tags: Vocab,
    pub pos: Matrix,
}

/// Channel ids of one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedInstance {
    pub words: Vec<usize>,
    pub concepts: Vec<usize>,
    pub deprels: Vec<usize>,
    pub tags: Vec<usize>,
}

impl EncodedInstance {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn word_key(word: &str) -> String {
    word.to_lowercase()
}

/// Concept vocabulary: UNK followed by the seven BIO tags.
pub fn concept_vocab() -> Vocab {
    let mut v = Vocab::with_reserved(&[UNK_TOKEN]);
    for t in BioTag::all() {
        v.insert(&t.to_string());
    }
    v
}

impl EmbeddingTables {
    /// Builds vocabularies from `data`. Word rows come from `pretrained` when
    /// the word is there; other rows are uniform in `[-word_scale, word_scale]`.
    pub fn build<R: Rng>(
        data: &[SdpInstance],
        embed_dim: usize,
        pretrained: Option<&WordVectors>,
        word_scale: f64,
        rng: &mut R,
    ) -> Self {
        let mut words = Vocab::with_reserved(&[UNK_TOKEN]);
        let mut deprels = Vocab::with_reserved(&[UNK_TOKEN]);
        let mut tags = Vocab::with_reserved(&[UNK_TOKEN]);
        for inst in data {
            for w in &inst.words {
                words.insert(&word_key(w));
            }
            for d in &inst.deprels {
                deprels.insert(d);
            }
            for p in &inst.pos {
                tags.insert(p);
            }
        }
        let concepts = concept_vocab();

        let word_dim = pretrained.map_or(embed_dim, |p| p.dim());
        let mut word = Matrix::uniform(words.len(), word_dim, word_scale, rng);
        if let Some(pre) = pretrained {
            let mut hits = 0;
            for (id, w) in words.items().iter().enumerate().skip(1) {
                if let Some(row) = pre.get(w) {
                    word.row_mut(id).copy_from_slice(row);
                    hits += 1;
                }
            }
            log::info!("{} of {} words initialised from pretrained vectors", hits, words.len() - 1);
        }
        EmbeddingTables {
            concept: Matrix::uniform(concepts.len(), embed_dim, word_scale, rng),
            deprel: Matrix::uniform(deprels.len(), embed_dim, word_scale, rng),
            pos: Matrix::uniform(tags.len(), embed_dim, word_scale, rng),
            words,
            word,
            concepts,
            deprels,
            tags,
        }
    }

    pub fn word_dim(&self) -> usize {
        self.word.cols
    }

    /// Dimension of one concatenated input vector.
    pub fn input_dim(&self) -> usize {
        self.word.cols + self.concept.cols + self.deprel.cols + self.pos.cols
    }

    pub fn encode(&self, inst: &SdpInstance) -> EncodedInstance {
        EncodedInstance {
            words: inst.words.iter().map(|w| self.words.id_or(&word_key(w), UNK)).collect(),
            concepts: inst
                .concepts
                .iter()
                .map(|c| self.concepts.id_or(&c.to_string(), UNK))
                .collect(),
            deprels: inst.deprels.iter().map(|d| self.deprels.id_or(d, UNK)).collect(),
            tags: inst.pos.iter().map(|p| self.tags.id_or(p, UNK)).collect(),
        }
    }

    /// `x_t = word ⊕ concept ⊕ deprel ⊕ pos` for every position.
    pub fn embed(&self, enc: &EncodedInstance) -> Vec<Vec<f64>> {
        (0..enc.len())
            .map(|t| {
                let mut x = Vec::with_capacity(self.input_dim());
                x.extend_from_slice(self.word.row(enc.words[t]));
                x.extend_from_slice(self.concept.row(enc.concepts[t]));
                x.extend_from_slice(self.deprel.row(enc.deprels[t]));
                x.extend_from_slice(self.pos.row(enc.tags[t]));
                x
            })
            .collect()
    }

    /// Channel offsets within `x_t`: word, concept, deprel, pos, end.
    pub fn offsets(&self) -> [usize; 5] {
        let a = self.word.cols;
        let b = a + self.concept.cols;
        let c = b + self.deprel.cols;
        [0, a, b, c, c + self.pos.cols]
    }

    pub fn tables_mut(&mut self) -> [&mut Matrix; 4] {
        [&mut self.word, &mut self.concept, &mut self.deprel, &mut self.pos]
    }

    pub fn tables(&self) -> [&Matrix; 4] {
        [&self.word, &self.concept, &self.deprel, &self.pos]
    }
}

/// Looks up the four embeddings of `inst` and concatenates them per position.
pub fn embed_input(tables: &EmbeddingTables, inst: &SdpInstance) -> Vec<Vec<f64>> {
    tables.embed(&tables.encode(inst))
}

/// Pretrained word vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVectors {
    pub vocab: Vocab,
    pub vectors: Matrix,
    /// Entries dropped because the word was already present.
    pub duplicates: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorFormat {
    Text,
    Binary,
}

impl std::str::FromStr for VectorFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(VectorFormat::Text),
            "binary" => Ok(VectorFormat::Binary),
            _ => Err(Error::invalid(format!("unknown vector format '{}'", s))),
        }
    }
}

impl WordVectors {
    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vocab.get(word).map(|i| self.vectors.row(i))
    }

    fn from_entries(entries: Vec<(String, Vec<f64>)>, dim: usize) -> Self {
        let mut vocab = Vocab::default();
        let mut data = Vec::with_capacity(entries.len() * dim);
        let mut duplicates = 0;
        for (word, v) in entries {
            if vocab.get(&word).is_some() {
                duplicates += 1;
                continue;
            }
            vocab.insert(&word);
            data.extend(v);
        }
        if duplicates > 0 {
            warn!("{} duplicate words in vector file; kept first occurrences", duplicates);
        }
        let rows = vocab.len();
        WordVectors {
            vocab,
            vectors: Matrix::from_vec(rows, dim, data),
            duplicates,
        }
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim())?;
        for (i, w) in self.vocab.items().iter().enumerate() {
            write!(out, "{}", w)?;
            for v in self.vectors.row(i) {
                write!(out, " {}", v)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// word2vec binary layout: values stored as little-endian `f32`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim())?;
        for (i, w) in self.vocab.items().iter().enumerate() {
            out.write_all(w.as_bytes())?;
            out.write_all(b" ")?;
            for &v in self.vectors.row(i) {
                out.write_all(&(v as f32).to_le_bytes())?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || Error::parse(1, format!("expected '<count> <dim>' header, got '{}'", line.trim()));
    let mut parts = line.split_whitespace();
    let count = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let dim: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if parts.next().is_some() || dim == 0 {
        return Err(bad());
    }
    Ok((count, dim))
}

pub fn load_word_vectors<R: BufRead>(input: R, format: VectorFormat) -> Result<WordVectors> {
    match format {
        VectorFormat::Text => load_text(input),
        VectorFormat::Binary => load_binary(input),
    }
}

fn load_text<R: BufRead>(input: R) -> Result<WordVectors> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty vector file"))??;
    let (count, dim) = parse_header(&header)?;
    let mut entries = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if entries.len() == count {
            return Err(Error::parse(lineno, format!("more entries than the declared {}", count)));
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-empty line").to_owned();
        let values = parts
            .map(|v| v.parse::<f64>().map_err(|_| Error::parse(lineno, format!("bad value '{}'", v))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != dim {
            return Err(Error::parse(
                lineno,
                format!("'{}' has {} values, header declares {}", word, values.len(), dim),
            ));
        }
        entries.push((word, values));
    }
    if entries.len() != count {
        return Err(Error::invalid(format!(
            "header declares {} entries, file has {}",
            count,
            entries.len()
        )));
    }
    Ok(WordVectors::from_entries(entries, dim))
}

fn load_binary<R: BufRead>(mut input: R) -> Result<WordVectors> {
    let mut header = Vec::new();
    input.read_until(b'\n', &mut header)?;
    let header = String::from_utf8(header).map_err(|_| Error::parse(1, "header is not UTF-8"))?;
    let (count, dim) = parse_header(&header)?;

    let mut entries = Vec::with_capacity(count);
    let mut buf = vec![0u8; 4 * dim];
    for k in 0..count {
        let word = read_word(&mut input)?
            .ok_or_else(|| Error::invalid(format!("header declares {} entries, file has {}", count, k)))?;
        input.read_exact(&mut buf).map_err(|_| {
            Error::invalid(format!("entry '{}' is truncated: expected {} floats", word, dim))
        })?;
        let v = buf
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .collect();
        entries.push((word, v));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if rest.iter().any(|b| !b.is_ascii_whitespace()) {
        return Err(Error::invalid(format!(
            "trailing data after the declared {} entries",
            count
        )));
    }
    Ok(WordVectors::from_entries(entries, dim))
}

/// Reads a space-terminated word, skipping leading whitespace.
/// `None` at end of input.
fn read_word<R: BufRead>(input: &mut R) -> Result<Option<String>> {
    let mut bytes = Vec::new();
    loop {
        let mut b = [0u8; 1];
        if input.read(&mut b)? == 0 {
            if bytes.is_empty() {
                return Ok(None);
            }
            return Err(Error::invalid("vector file ends inside a word"));
        }
        match b[0] {
            b' ' if !bytes.is_empty() => break,
            b' ' | b'\n' | b'\r' | b'\t' if bytes.is_empty() => continue,
            c => bytes.push(c),
        }
    }
    String::from_utf8(bytes)
        .map(Some)
        .map_err(|_| Error::invalid("word is not UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{ConceptType, RelationLabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn text_literal() {
        let wv = load_word_vectors("2 3\na 1 0 0\nb 0 1 0".as_bytes(), VectorFormat::Text).unwrap();
        assert_eq!((wv.len(), wv.dim()), (2, 3));
        assert_eq!(wv.get("b").unwrap(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn text_errors() {
        assert!(load_word_vectors("3 2\na 1 0\nb 0 1".as_bytes(), VectorFormat::Text).is_err());
        assert!(load_word_vectors("1 2\na 1 0\nb 0 1".as_bytes(), VectorFormat::Text).is_err());
        assert!(matches!(
            load_word_vectors("2 2\na 1 0\nb 0 1 5".as_bytes(), VectorFormat::Text),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(load_word_vectors("x y\n".as_bytes(), VectorFormat::Text).is_err());
    }

    #[test]
    fn duplicates_keep_first() {
        let wv = load_word_vectors("3 1\na 1\nb 2\na 3\n".as_bytes(), VectorFormat::Text).unwrap();
        assert_eq!(wv.len(), 2);
        assert_eq!(wv.duplicates, 1);
        assert_eq!(wv.get("a").unwrap(), &[1.0]);
    }

    #[test]
    fn text_and_binary_round_trip() {
        let wv = load_word_vectors("2 3\nfoo 0.5 -1.25 3\nbär 0 1e-3 7\n".as_bytes(), VectorFormat::Text).unwrap();
        let mut text = Vec::new();
        wv.write_text(&mut text).unwrap();
        assert_eq!(load_word_vectors(&text[..], VectorFormat::Text).unwrap(), wv);

        let mut bin = Vec::new();
        wv.write_binary(&mut bin).unwrap();
        let back = load_word_vectors(&bin[..], VectorFormat::Binary).unwrap();
        assert_eq!(back.vocab, wv.vocab);
        for (a, b) in back.vectors.data.iter().zip(&wv.vectors.data) {
            assert_eq!(*a, *b as f32 as f64);
        }
    }

    #[test]
    fn binary_wrong_float_count() {
        let mut bin = b"1 3\nw ".to_vec();
        bin.extend_from_slice(&1.0f32.to_le_bytes());
        bin.extend_from_slice(&2.0f32.to_le_bytes());
        assert!(load_word_vectors(&bin[..], VectorFormat::Binary).is_err());

        // declared one entry, two present
        let mut bin = b"1 1\nw ".to_vec();
        bin.extend_from_slice(&1.0f32.to_le_bytes());
        bin.extend_from_slice(b"\nv ");
        bin.extend_from_slice(&1.0f32.to_le_bytes());
        assert!(load_word_vectors(&bin[..], VectorFormat::Binary).is_err());
    }

    fn instance(words: &[&str]) -> SdpInstance {
        let n = words.len();
        SdpInstance {
            words: words.iter().map(|w| w.to_string()).collect(),
            concepts: vec![BioTag::Begin(ConceptType::Problem); n],
            deprels: vec!["dep".into(); n],
            pos: vec!["NN".into(); n],
            label: RelationLabel::None,
        }
    }

    #[test]
    fn unk_rows_and_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tables = EmbeddingTables::build(&[instance(&["a", "b"])], 4, None, 0.05, &mut rng);
        assert_eq!(tables.concepts.len(), 8);
        assert_eq!(tables.input_dim(), 16);

        let mut unk = instance(&["zz", "yy", "xx"]);
        unk.deprels = vec!["?".into(); 3];
        unk.pos = vec!["?".into(); 3];
        let xs = embed_input(&tables, &unk);
        assert_eq!(xs.len(), 3);
        assert!(xs.iter().all(|x| x == &xs[0] && x.len() == 16));
    }

    #[test]
    fn pretrained_rows_are_copied() {
        let wv = load_word_vectors("1 2\nb 0.25 0.5\n".as_bytes(), VectorFormat::Text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tables = EmbeddingTables::build(&[instance(&["a", "B"])], 4, Some(&wv), 0.05, &mut rng);
        assert_eq!(tables.word_dim(), 2);
        assert_eq!(tables.word.row(tables.words.get("b").unwrap()), &[0.25, 0.5]);
        assert_eq!(tables.input_dim(), 2 + 12);
    }
}
