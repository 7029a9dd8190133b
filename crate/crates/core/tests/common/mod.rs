#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;

use sdprelex::treebank::DepSentence;

pub const LABELS: [&str; 5] = ["nsubj", "obj", "amod", "prep", "punct"];

/// Random projective tree over `n` tokens. Every projective tree has
/// non-zero probability: each interval is cut into consecutive subtrees.
pub fn projective_heads<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    fn fill<R: Rng>(lo: usize, hi: usize, parent: usize, single: bool, heads: &mut [usize], rng: &mut R) {
        let mut lo = lo;
        while lo <= hi {
            let end = if single { hi } else { rng.gen_range(lo..=hi) };
            let h = rng.gen_range(lo..=end);
            heads[h] = parent;
            if h > lo {
                fill(lo, h - 1, h, false, heads, rng);
            }
            if h < end {
                fill(h + 1, end, h, false, heads, rng);
            }
            lo = end + 1;
        }
    }
    let mut heads = vec![0; n + 1];
    fill(1, n, 0, true, &mut heads, rng);
    heads[1..].to_vec()
}

/// Random single-rooted tree, projective or not.
pub fn any_heads<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut heads = vec![0; n + 1];
    for k in 1..n {
        heads[order[k]] = order[rng.gen_range(0..k)];
    }
    heads[1..].to_vec()
}

pub fn sentence<R: Rng>(heads: &[usize], rng: &mut R) -> DepSentence {
    let n = heads.len();
    let forms: Vec<String> = (1..=n).map(|i| format!("w{}", i)).collect();
    let pos: Vec<String> = (1..=n).map(|i| format!("T{}", i % 3)).collect();
    let labels: Vec<String> = heads
        .iter()
        .map(|&h| if h == 0 { "root".to_string() } else { LABELS[rng.gen_range(0..LABELS.len())].to_string() })
        .collect();
    DepSentence::from_columns(&forms, &pos, heads, &labels)
}

/// Projective iff no two arcs cross, counting the arc from position 0 to the root.
pub fn no_crossing_arcs(heads: &[usize]) -> bool {
    let arcs: Vec<(usize, usize)> = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| (h.min(i + 1), h.max(i + 1)))
        .collect();
    for &(a, b) in &arcs {
        for &(c, d) in &arcs {
            if a < c && c < b && b < d {
                return false;
            }
        }
    }
    true
}

/// Breadth-first path in the undirected tree given by `heads` (node 0 is the root).
pub fn bfs_path(heads: &[usize], from: usize, to: usize) -> Vec<usize> {
    let n = heads.len() + 1;
    let mut adj = vec![Vec::new(); n];
    for (i, &h) in heads.iter().enumerate() {
        adj[i + 1].push(h);
        adj[h].push(i + 1);
    }
    let mut prev = vec![usize::MAX; n];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &v in &adj[u] {
            if prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    path
}
