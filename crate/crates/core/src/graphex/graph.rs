use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::Scalar;

/// Simple undirected graph with no isolated nodes.
///
/// Graphs sampled from a graphex carry the retained latent parameters in
/// ascending order (node `i` has the `i`-th smallest latent) and the stopping
/// time `ν`. Ingested graphs have `ν = 0`, no latents, and keep the original
/// node labels of the source file.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGraph<T> {
    adjacency: Vec<Vec<usize>>,
    num_edges: usize,
    latents: Option<Vec<T>>,
    labels: Option<Vec<String>>,
    nu: T,
}

impl<T: Scalar> SampledGraph<T> {
    /// Builds a graph over `num_candidates` candidate nodes from an edge list.
    ///
    /// Self-loops and duplicate edges (in either direction) are dropped, then
    /// isolated candidates are removed. Surviving nodes keep their relative
    /// order, and `latents`/`labels`, when given, are filtered alongside.
    pub fn from_edges(
        num_candidates: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        latents: Option<Vec<T>>,
        labels: Option<Vec<String>>,
        nu: T,
    ) -> Result<Self> {
        if latents.as_ref().is_some_and(|l| l.len() != num_candidates)
            || labels.as_ref().is_some_and(|l| l.len() != num_candidates)
        {
            return Err(domain("latents/labels length differs from candidate count"));
        }
        let mut adjacency = vec![Vec::new(); num_candidates];
        for (u, v) in edges {
            if u >= num_candidates || v >= num_candidates {
                return Err(domain(format!("edge ({u}, {v}) out of range {num_candidates}")));
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
            nb.dedup();
        }

        let mut remap = vec![usize::MAX; num_candidates];
        let mut kept = 0;
        for (i, nb) in adjacency.iter().enumerate() {
            if !nb.is_empty() {
                remap[i] = kept;
                kept += 1;
            }
        }
        let adjacency: Vec<Vec<usize>> = adjacency
            .into_iter()
            .filter(|nb| !nb.is_empty())
            .map(|nb| nb.into_iter().map(|j| remap[j]).collect())
            .collect();
        let latents = latents.map(|v| retain_kept(v, &remap));
        let labels = labels.map(|v| retain_kept(v, &remap));
        let num_edges = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Self {
            adjacency,
            num_edges,
            latents,
            labels,
            nu,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Sorted neighbor indices.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn latents(&self) -> Option<&[T]> {
        self.latents.as_deref()
    }

    /// Stopping time; zero for ingested graphs.
    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn is_sampled(&self) -> bool {
        self.latents.is_some()
    }

    /// Source label of a node, or its index when the graph was sampled.
    pub fn label(&self, node: usize) -> String {
        match &self.labels {
            Some(l) => l[node].clone(),
            None => node.to_string(),
        }
    }

    /// Degree → node count.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for d in self.degrees() {
            *hist.entry(d).or_insert(0) += 1;
        }
        hist
    }
}

fn retain_kept<X>(values: Vec<X>, remap: &[usize]) -> Vec<X> {
    values
        .into_iter()
        .zip(remap)
        .filter(|(_, &r)| r != usize::MAX)
        .map(|(v, _)| v)
        .collect()
}
