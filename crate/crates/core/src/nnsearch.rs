//! Exact cosine nearest-neighbor search.
//!
//! Dot products accumulate in `f64` strictly in coordinate order, one running
//! sum per (query, corpus row) pair, so every similarity is bit-identical to
//! the plain double loop regardless of blocking, SIMD width or worker count.
//! Equal similarities resolve to the lexicographically smallest corpus id.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataio::{EmbeddingMatrix, Manifest};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("query dimension {queries} differs from corpus dimension {corpus}")]
    DimMismatch { queries: usize, corpus: usize },
    #[error("no admissible corpus row for query {0:?}")]
    EmptyFilteredCorpus(String),
    #[error("zero vector{}", .0.as_ref().map(|id| format!(" for id {id:?}")).unwrap_or_default())]
    ZeroVector(Option<String>),
    #[error("id {0:?} is missing from the manifest")]
    UnknownId(String),
    #[error("unknown match field {0:?} (expected specialty or image_type)")]
    UnknownField(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("thread pool: {0}")]
    Pool(String),
}

/// A query and the corpus row it matched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborPair {
    pub query_id: String,
    pub neighbor_id: String,
    pub cosine: f64,
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    let mut s = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        s += *x as f64 * *y as f64;
    }
    s
}

fn sq_norm(a: &[f32]) -> f64 {
    dot(a, a)
}

/// Taking one root of the product makes a vector's cosine with itself
/// exactly 1.
#[inline]
fn cosine_from_parts(dot: f64, sq_a: f64, sq_b: f64) -> f64 {
    (dot / (sq_a * sq_b).sqrt()).clamp(-1.0, 1.0)
}

/// `v1·v2 / (‖v1‖‖v2‖)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(v1: &[f32], v2: &[f32]) -> Result<f64, SearchError> {
    if v1.len() != v2.len() {
        return Err(SearchError::DimMismatch {
            queries: v1.len(),
            corpus: v2.len(),
        });
    }
    let (n1, n2) = (sq_norm(v1), sq_norm(v2));
    if n1 == 0.0 || n2 == 0.0 {
        return Err(SearchError::ZeroVector(None));
    }
    Ok(cosine_from_parts(dot(v1, v2), n1, n2))
}

/// Decides which corpus rows a query may match.
pub trait CorpusFilter: Sync {
    fn admits(&self, query: usize, corpus: usize) -> bool;

    /// Group labels for queries and corpus rows when admissibility is
    /// "same group". Lets the search partition instead of testing each pair.
    fn groups(&self) -> Option<(&[u32], &[u32])> {
        None
    }
}

/// Admits every corpus row.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllowAll;

impl CorpusFilter for AllowAll {
    fn admits(&self, _: usize, _: usize) -> bool {
        true
    }
}

impl<F: Fn(usize, usize) -> bool + Sync> CorpusFilter for F {
    fn admits(&self, query: usize, corpus: usize) -> bool {
        self(query, corpus)
    }
}

/// Admits corpus rows carrying the same group key as the query.
#[derive(Debug, Clone)]
pub struct GroupFilter {
    query: Vec<u32>,
    corpus: Vec<u32>,
}

impl GroupFilter {
    pub fn from_keys<K: Ord + Clone>(query_keys: &[K], corpus_keys: &[K]) -> Self {
        let mut table: BTreeMap<K, u32> = BTreeMap::new();
        let mut intern = |k: &K| {
            let next = table.len() as u32;
            *table.entry(k.clone()).or_insert(next)
        };
        GroupFilter {
            query: query_keys.iter().map(&mut intern).collect(),
            corpus: corpus_keys.iter().map(&mut intern).collect(),
        }
    }
}

impl CorpusFilter for GroupFilter {
    fn admits(&self, query: usize, corpus: usize) -> bool {
        self.query[query] == self.corpus[corpus]
    }

    fn groups(&self) -> Option<(&[u32], &[u32])> {
        Some((&self.query, &self.corpus))
    }
}

/// Record field that must agree between a query and its neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchField {
    Specialty,
    ImageType,
}

impl FromStr for MatchField {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "specialty" => Ok(MatchField::Specialty),
            "image_type" => Ok(MatchField::ImageType),
            other => Err(SearchError::UnknownField(other.to_string())),
        }
    }
}

/// Looks up each id in the manifest and renders the selected fields as one key.
pub fn metadata_keys(
    manifest: &Manifest,
    ids: &[String],
    fields: &[MatchField],
) -> Result<Vec<String>, SearchError> {
    let index = manifest.index();
    ids.iter()
        .map(|id| {
            let r = index
                .get(id.as_str())
                .ok_or_else(|| SearchError::UnknownId(id.clone()))?;
            Ok(fields
                .iter()
                .map(|f| match f {
                    MatchField::Specialty => r.specialty.as_str(),
                    MatchField::ImageType => r.image_type.as_str(),
                })
                .collect::<Vec<_>>()
                .join("/"))
        })
        .collect()
}

const LANES: usize = 8;
const QUERY_TILE: usize = 64;
const CORPUS_TILE_BLOCKS: usize = 32;

/// Corpus rows regrouped into column-interleaved blocks of `LANES` rows.
struct PreparedCorpus {
    dim: usize,
    /// Original corpus index of each packed row.
    rows: Vec<usize>,
    sq_norms: Vec<f64>,
    blocks: Vec<f32>,
}

impl PreparedCorpus {
    fn new(corpus: &EmbeddingMatrix, rows: Vec<usize>) -> Self {
        let dim = corpus.dim();
        let nblocks = rows.len().div_ceil(LANES);
        let mut blocks = vec![0f32; nblocks * dim * LANES];
        for (packed, &orig) in rows.iter().enumerate() {
            let (b, lane) = (packed / LANES, packed % LANES);
            let base = b * dim * LANES;
            for (k, v) in corpus.row(orig).iter().enumerate() {
                blocks[base + k * LANES + lane] = *v;
            }
        }
        let sq_norms = rows.iter().map(|&r| sq_norm(corpus.row(r))).collect();
        PreparedCorpus {
            dim,
            rows,
            sq_norms,
            blocks,
        }
    }

    fn nblocks(&self) -> usize {
        self.rows.len().div_ceil(LANES)
    }

    fn block(&self, b: usize) -> &[f32] {
        &self.blocks[b * self.dim * LANES..(b + 1) * self.dim * LANES]
    }
}

/// Dot products of two queries against one block, lane by lane.
#[inline(always)]
fn block_dot2(q0: &[f64], q1: &[f64], block: &[f32]) -> ([f64; LANES], [f64; LANES]) {
    let mut a0 = [0f64; LANES];
    let mut a1 = [0f64; LANES];
    for ((c, &x0), &x1) in block.chunks_exact(LANES).zip(q0).zip(q1) {
        for l in 0..LANES {
            let v = c[l] as f64;
            a0[l] += x0 * v;
            a1[l] += x1 * v;
        }
    }
    (a0, a1)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn block_dot2_avx2(q0: &[f64], q1: &[f64], block: &[f32]) -> ([f64; LANES], [f64; LANES]) {
    block_dot2(q0, q1, block)
}

fn block_dot2_dispatch(q0: &[f64], q1: &[f64], block: &[f32]) -> ([f64; LANES], [f64; LANES]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the CPU supports AVX2, checked just above.
            return unsafe { block_dot2_avx2(q0, q1, block) };
        }
    }
    block_dot2(q0, q1, block)
}

/// Best-first candidate list of bounded length.
struct TopK {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn better(a: (f64, usize), b: (f64, usize), ids: &[String]) -> bool {
        a.0 > b.0 || (a.0 == b.0 && ids[a.1] < ids[b.1])
    }

    #[inline]
    fn offer(&mut self, cand: (f64, usize), ids: &[String]) {
        if self.items.len() == self.k {
            let worst = self.items[self.k - 1];
            if !Self::better(cand, worst, ids) {
                return;
            }
            self.items.pop();
        }
        let pos = self
            .items
            .iter()
            .position(|&it| Self::better(cand, it, ids))
            .unwrap_or(self.items.len());
        self.items.insert(pos, cand);
    }
}

/// Searches `query_rows` against `prepared`, returning the top `k` corpus
/// indices per query (in `query_rows` order).
fn search_block(
    queries: &EmbeddingMatrix,
    query_rows: &[usize],
    prepared: &PreparedCorpus,
    corpus_ids: &[String],
    filter: Option<&dyn CorpusFilter>,
    k: usize,
) -> Vec<Vec<(f64, usize)>> {
    let qvals: Vec<Vec<f64>> = query_rows
        .iter()
        .map(|&q| queries.row(q).iter().map(|&v| v as f64).collect())
        .collect();
    let q_sq_norms: Vec<f64> = query_rows.iter().map(|&q| sq_norm(queries.row(q))).collect();
    let mut best: Vec<TopK> = query_rows.iter().map(|_| TopK::new(k)).collect();
    let zero = vec![0f64; prepared.dim];

    let nblocks = prepared.nblocks();
    for tile_start in (0..nblocks).step_by(CORPUS_TILE_BLOCKS) {
        let tile_end = (tile_start + CORPUS_TILE_BLOCKS).min(nblocks);
        for qi in (0..query_rows.len()).step_by(2) {
            let has_second = qi + 1 < query_rows.len();
            let q1 = if has_second { &qvals[qi + 1] } else { &zero };
            for b in tile_start..tile_end {
                let (d0, d1) = block_dot2_dispatch(&qvals[qi], q1, prepared.block(b));
                let lanes = LANES.min(prepared.rows.len() - b * LANES);
                for l in 0..lanes {
                    let packed = b * LANES + l;
                    let orig = prepared.rows[packed];
                    let cn = prepared.sq_norms[packed];
                    for (slot, d) in [(qi, d0[l]), (qi + 1, d1[l])] {
                        if slot == qi + 1 && !has_second {
                            continue;
                        }
                        if filter.is_some_and(|f| !f.admits(query_rows[slot], orig)) {
                            continue;
                        }
                        let c = cosine_from_parts(d, q_sq_norms[slot], cn);
                        best[slot].offer((c, orig), corpus_ids);
                    }
                }
            }
        }
    }
    best.into_iter().map(|t| t.items).collect()
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, SearchError> {
    crate::pool::install(workers, f).map_err(|e| SearchError::Pool(e.to_string()))
}

/// Top-`k` admissible neighbors of every query, best first.
///
/// `workers = 0` uses the global rayon pool; any other value runs on a
/// dedicated pool of that size. The output never depends on it.
pub fn nearest_k(
    queries: &EmbeddingMatrix,
    corpus: &EmbeddingMatrix,
    filter: &dyn CorpusFilter,
    k: usize,
    workers: usize,
) -> Result<Vec<Vec<NeighborPair>>, SearchError> {
    if k == 0 {
        return Err(SearchError::InvalidK);
    }
    if queries.dim() != corpus.dim() {
        return Err(SearchError::DimMismatch {
            queries: queries.dim(),
            corpus: corpus.dim(),
        });
    }
    if let Some(i) = (0..queries.len()).find(|&i| sq_norm(queries.row(i)) == 0.0) {
        return Err(SearchError::ZeroVector(Some(queries.ids()[i].clone())));
    }
    if let Some(i) = (0..corpus.len()).find(|&i| sq_norm(corpus.row(i)) == 0.0) {
        return Err(SearchError::ZeroVector(Some(corpus.ids()[i].clone())));
    }

    // Each job is (query indices, packed corpus slot, whether pairs need checking).
    let mut prepared: Vec<PreparedCorpus> = Vec::new();
    let mut jobs: Vec<(Vec<usize>, usize, bool)> = Vec::new();
    match filter.groups() {
        Some((qg, cg)) => {
            let mut by_group: BTreeMap<u32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
            for (q, g) in qg.iter().enumerate() {
                by_group.entry(*g).or_default().0.push(q);
            }
            for (c, g) in cg.iter().enumerate() {
                if let Some(entry) = by_group.get_mut(g) {
                    entry.1.push(c);
                }
            }
            for (_, (qs, cs)) in by_group {
                if qs.is_empty() {
                    continue;
                }
                prepared.push(PreparedCorpus::new(corpus, cs));
                for chunk in qs.chunks(QUERY_TILE) {
                    jobs.push((chunk.to_vec(), prepared.len() - 1, false));
                }
            }
        }
        None => {
            prepared.push(PreparedCorpus::new(corpus, (0..corpus.len()).collect()));
            let all: Vec<usize> = (0..queries.len()).collect();
            for chunk in all.chunks(QUERY_TILE) {
                jobs.push((chunk.to_vec(), 0, true));
            }
        }
    }

    let results = run_in_pool(workers, || {
        jobs.par_iter()
            .map(|(qs, slot, check)| {
                let f = if *check { Some(filter) } else { None };
                let found = search_block(queries, qs, &prepared[*slot], corpus.ids(), f, k);
                qs.iter().copied().zip(found).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    })?;

    let mut per_query: Vec<Option<Vec<(f64, usize)>>> = vec![None; queries.len()];
    for (q, found) in results.into_iter().flatten() {
        per_query[q] = Some(found);
    }
    per_query
        .into_iter()
        .enumerate()
        .map(|(q, found)| {
            let found = found.unwrap_or_default();
            if found.is_empty() {
                return Err(SearchError::EmptyFilteredCorpus(queries.ids()[q].clone()));
            }
            Ok(found
                .into_iter()
                .map(|(cosine, c)| NeighborPair {
                    query_id: queries.ids()[q].clone(),
                    neighbor_id: corpus.ids()[c].clone(),
                    cosine,
                })
                .collect())
        })
        .collect()
}

/// The single best admissible neighbor of every query.
pub fn nearest_neighbor(
    queries: &EmbeddingMatrix,
    corpus: &EmbeddingMatrix,
    filter: &dyn CorpusFilter,
    workers: usize,
) -> Result<Vec<NeighborPair>, SearchError> {
    Ok(nearest_k(queries, corpus, filter, 1, workers)?
        .into_iter()
        .map(|mut v| v.swap_remove(0))
        .collect())
}
