//! Shortest dependency paths between concept pairs.
//!
//! The dependency tree is read as an undirected graph over nodes `0..=n`
//! (node 0 is the artificial root). Because it is a tree, the shortest path
//! between two tokens is the unique simple path; it is found by walking
//! both endpoints up to their lowest common ancestor.
//!
//! Conventions for turning a path into an [`SdpInstance`]:
//!
//! * A multi-token concept is represented on the path by its head token,
//!   the single span token whose head lies outside the span (falling back
//!   to the last token of the span when there is not exactly one).
//! * The remaining tokens of each concept are spliced in around the
//!   endpoint so the concept appears whole, in surface order.
//! * A path token's dependency label is the label of the edge to the
//!   previous path token; the first path token and spliced tokens use their
//!   own label to their head.

use std::fmt;
use std::str::FromStr;

use crate::concept::{BioTag, ConceptSpan, RelationLabel};
use crate::error::{Error, Result};
use crate::treebank::DepSentence;

/// Undirected view of a dependency tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    adjacency: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    labels: Vec<String>,
}

impl DependencyGraph {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Label of the edge `{u, v}`: the dependent's relation to its head.
    pub fn edge_label(&self, u: usize, v: usize) -> Option<&str> {
        if self.parent[v] == Some(u) {
            Some(&self.labels[v])
        } else if self.parent[u] == Some(v) {
            Some(&self.labels[u])
        } else {
            None
        }
    }

    /// The unique simple path from `from` to `to`, both included.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut up = vec![from];
        let mut down = vec![to];
        let (mut a, mut b) = (from, to);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has a parent");
            up.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent");
            down.push(b);
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent");
            b = self.parent[b].expect("non-root has a parent");
            up.push(a);
            down.push(b);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        up
    }
}

/// Builds the undirected graph of a valid dependency tree.
pub fn build_undirected_graph(s: &DepSentence) -> Result<DependencyGraph> {
    s.validate(&s.describe(1))?;
    let n = s.len();
    let mut adjacency = vec![Vec::new(); n + 1];
    let mut parent = vec![None; n + 1];
    let mut labels = vec![String::new(); n + 1];
    for tok in &s.tokens {
        adjacency[tok.head].push(tok.index);
        adjacency[tok.index].push(tok.head);
        parent[tok.index] = Some(tok.head);
        labels[tok.index] = tok.deprel.clone();
    }
    let mut depth = vec![usize::MAX; n + 1];
    depth[0] = 0;
    fn fill(i: usize, parent: &[Option<usize>], depth: &mut [usize]) -> usize {
        if depth[i] == usize::MAX {
            let p = parent[i].expect("validated tree");
            depth[i] = fill(p, parent, depth) + 1;
        }
        depth[i]
    }
    for i in 1..=n {
        fill(i, &parent, &mut depth);
    }
    Ok(DependencyGraph {
        adjacency,
        parent,
        depth,
        labels,
    })
}

/// The head token (1-based) representing a concept span on the path.
pub fn span_head(span: &ConceptSpan, s: &DepSentence) -> usize {
    let inside = |i: usize| span.token_indices().contains(&i);
    let heads: Vec<usize> = span
        .token_indices()
        .filter(|&i| !inside(s.head(i)))
        .collect();
    match heads.as_slice() {
        [only] => *only,
        _ => span.end + 1,
    }
}

fn check_spans(c1: &ConceptSpan, c2: &ConceptSpan, s: &DepSentence) -> Result<()> {
    for c in [c1, c2] {
        if c.start > c.end || c.end >= s.len() {
            return Err(Error::invalid(format!(
                "concept '{}' at {}:{}-{} lies outside a {}-token sentence",
                c.text,
                c.line,
                c.start,
                c.end,
                s.len()
            )));
        }
    }
    if c1.line != c2.line {
        return Err(Error::invalid(format!(
            "concepts on different lines ({} and {})",
            c1.line, c2.line
        )));
    }
    if c1.overlaps(c2) {
        return Err(Error::invalid(format!(
            "concepts '{}' and '{}' overlap",
            c1.text, c2.text
        )));
    }
    Ok(())
}

/// Path of 1-based token indices from `c1`'s head token to `c2`'s.
pub fn shortest_path(
    g: &DependencyGraph,
    c1: &ConceptSpan,
    c2: &ConceptSpan,
    s: &DepSentence,
) -> Result<Vec<usize>> {
    check_spans(c1, c2, s)?;
    if g.node_count() != s.len() + 1 {
        return Err(Error::invalid("graph does not belong to this sentence"));
    }
    Ok(g.path(span_head(c1, s), span_head(c2, s)))
}

/// Aligned sequences along a shortest dependency path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdpInstance {
    pub words: Vec<String>,
    pub concepts: Vec<BioTag>,
    pub deprels: Vec<String>,
    pub pos: Vec<String>,
    pub label: RelationLabel,
}

impl SdpInstance {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_aligned(&self) -> bool {
        let n = self.words.len();
        self.concepts.len() == n && self.deprels.len() == n && self.pos.len() == n
    }
}

/// Builds the four aligned channels for a path produced by [`shortest_path`].
pub fn make_instance(
    path: &[usize],
    s: &DepSentence,
    c1: &ConceptSpan,
    c2: &ConceptSpan,
    label: RelationLabel,
) -> Result<SdpInstance> {
    check_spans(c1, c2, s)?;
    let g = build_undirected_graph(s)?;
    if path.is_empty() || path.iter().any(|&i| i == 0 || i > s.len()) {
        return Err(Error::invalid("path must be non-empty and contain only sentence tokens"));
    }

    let in1 = |i: usize| c1.token_indices().contains(&i);
    let in2 = |i: usize| c2.token_indices().contains(&i);

    let mut order: Vec<usize> = c1.token_indices().collect();
    order.extend(path.iter().copied().filter(|&i| !in1(i) && !in2(i)));
    order.extend(c2.token_indices());

    let mut inst = SdpInstance {
        words: Vec::with_capacity(order.len()),
        concepts: Vec::with_capacity(order.len()),
        deprels: Vec::with_capacity(order.len()),
        pos: Vec::with_capacity(order.len()),
        label,
    };
    for &i in &order {
        let tok = s.token(i);
        inst.words.push(tok.form.clone());
        inst.pos.push(tok.pos.clone());
        inst.concepts.push(if in1(i) {
            tag_for(c1, i)
        } else if in2(i) {
            tag_for(c2, i)
        } else {
            BioTag::Outside
        });
        let deprel = match path.iter().position(|&p| p == i) {
            Some(k) if k > 0 => g
                .edge_label(path[k - 1], i)
                .ok_or_else(|| Error::invalid("path steps must follow tree edges"))?
                .to_owned(),
            _ => tok.deprel.clone(),
        };
        inst.deprels.push(deprel);
    }
    Ok(inst)
}

fn tag_for(span: &ConceptSpan, i: usize) -> BioTag {
    if i == span.start + 1 {
        BioTag::Begin(span.kind)
    } else {
        BioTag::Inside(span.kind)
    }
}

/// Convenience: graph, path, and instance in one call.
pub fn extract(
    s: &DepSentence,
    c1: &ConceptSpan,
    c2: &ConceptSpan,
    label: RelationLabel,
) -> Result<SdpInstance> {
    let g = build_undirected_graph(s)?;
    let path = shortest_path(&g, c1, c2, s)?;
    make_instance(&path, s, c1, c2, label)
}

fn escape(item: &str) -> String {
    let mut out = String::with_capacity(item.len());
    for ch in item.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '|' => out.push_str("\\p"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(item: &str) -> Result<String> {
    let mut out = String::with_capacity(item.len());
    let mut chars = item.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('p') => out.push('|'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            _ => return Err(Error::invalid(format!("bad escape in '{}'", item))),
        }
    }
    Ok(out)
}

fn join<T: AsRef<str>>(items: &[T]) -> String {
    items
        .iter()
        .map(|s| escape(s.as_ref()))
        .collect::<Vec<_>>()
        .join("|")
}

fn split(field: &str) -> Result<Vec<String>> {
    field.split('|').map(unescape).collect()
}

/// One line: words, concept tags, labels, tags (each `|`-joined) and the
/// relation label, separated by tabs.
impl fmt::Display for SdpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<String> = self.concepts.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            join(&self.words),
            join(&tags),
            join(&self.deprels),
            join(&self.pos),
            self.label
        )
    }
}

impl FromStr for SdpInstance {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::invalid(format!(
                "SDP line needs 5 tab-separated fields, found {}",
                cols.len()
            )));
        }
        let inst = SdpInstance {
            words: split(cols[0])?,
            concepts: split(cols[1])?
                .iter()
                .map(|t| t.parse())
                .collect::<Result<_>>()?,
            deprels: split(cols[2])?,
            pos: split(cols[3])?,
            label: cols[4].parse()?,
        };
        if !inst.is_aligned() {
            return Err(Error::invalid("SDP channels have different lengths"));
        }
        Ok(inst)
    }
}

pub fn read_instances(text: &str) -> Result<Vec<SdpInstance>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.parse().map_err(|e: Error| Error::parse(i + 1, e.to_string()))
        })
        .collect()
}
