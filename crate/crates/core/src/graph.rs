//! Bounded-degree site graphs: distances, balls, greedy sphere packing and
//! disjoint-layer partitioning.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::Operator;

/// Undirected simple graph on sites `0..n_sites`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteGraph {
    adjacency: Vec<Vec<usize>>,
    max_degree: usize,
}

impl SiteGraph {
    /// Builds a graph from an edge list. Duplicate edges are merged; self
    /// loops and out-of-range endpoints are rejected.
    pub fn from_edge_list(n_sites: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n_sites];
        for &(i, j) in edges {
            if i >= n_sites || j >= n_sites {
                return Err(Error::SiteOutOfGraph {
                    site: i.max(j),
                    n_sites,
                });
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self loop on site {i}")));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            adjacency,
            max_degree,
        })
    }

    pub fn chain(n_sites: usize, periodic: bool) -> Self {
        let mut edges: Vec<(usize, usize)> = (0..n_sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if periodic && n_sites > 2 {
            edges.push((n_sites - 1, 0));
        }
        Self::from_edge_list(n_sites, &edges).expect("chain edges are valid")
    }

    /// `lx × ly` square grid; site `(x, y)` has index `x + lx·y`.
    pub fn square_grid(lx: usize, ly: usize, periodic: bool) -> Self {
        let idx = |x: usize, y: usize| x + lx * y;
        let mut edges = Vec::new();
        for y in 0..ly {
            for x in 0..lx {
                if x + 1 < lx {
                    edges.push((idx(x, y), idx(x + 1, y)));
                } else if periodic && lx > 1 {
                    edges.push((idx(x, y), idx(0, y)));
                }
                if y + 1 < ly {
                    edges.push((idx(x, y), idx(x, y + 1)));
                } else if periodic && ly > 1 {
                    edges.push((idx(x, y), idx(x, 0)));
                }
            }
        }
        Self::from_edge_list(lx * ly, &edges).expect("grid edges are valid")
    }

    pub fn n_sites(&self) -> usize {
        self.adjacency.len()
    }

    /// Δ, the largest vertex degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    fn check_site(&self, i: usize) -> Result<()> {
        if i >= self.n_sites() {
            Err(Error::SiteOutOfGraph {
                site: i,
                n_sites: self.n_sites(),
            })
        } else {
            Ok(())
        }
    }

    /// BFS distances from `source`, truncated at `limit` when given.
    pub fn distances_from(&self, source: usize, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_sites()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            if limit.is_some_and(|l| dv >= l) {
                continue;
            }
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs BFS distances; `None` marks disconnected pairs.
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.n_sites())
            .map(|i| self.distances_from(i, None))
            .collect()
    }

    /// Graph distance, or `None` when `i` and `j` lie in different components.
    pub fn distance(&self, i: usize, j: usize) -> Result<Option<usize>> {
        self.check_site(i)?;
        self.check_site(j)?;
        Ok(self.distances_from(i, None)[j])
    }

    /// Sites within graph distance `r` of `center`, ascending.
    pub fn ball(&self, center: usize, r: usize) -> Result<Vec<usize>> {
        self.check_site(center)?;
        Ok(self
            .distances_from(center, Some(r))
            .iter()
            .enumerate()
            .filter_map(|(j, d)| d.map(|_| j))
            .collect())
    }

    /// `1 + max pairwise distance`; 0 for the empty set.
    pub fn diameter_of(&self, sites: &[usize]) -> Result<usize> {
        if sites.is_empty() {
            return Ok(0);
        }
        for &s in sites {
            self.check_site(s)?;
        }
        let mut worst = 0;
        for (a, &i) in sites.iter().enumerate() {
            let dist = self.distances_from(i, None);
            for &j in &sites[a + 1..] {
                match dist[j] {
                    Some(d) => worst = worst.max(d),
                    None => return Err(Error::DisconnectedSupport(i, j)),
                }
            }
        }
        Ok(worst + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.n_sites() == 0 || self.distances_from(0, None).iter().all(Option::is_some)
    }

    /// Minimum eccentricity over all sites; `None` for disconnected graphs.
    pub fn radius(&self) -> Option<usize> {
        (0..self.n_sites())
            .map(|i| {
                self.distances_from(i, None)
                    .into_iter()
                    .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
            })
            .collect::<Option<Vec<_>>>()
            .and_then(|ecc| ecc.into_iter().min())
    }

    /// BFS spanning tree from `root`: returns `(order, parent)` where `order`
    /// lists sites in BFS order and `parent[root] == None`.
    pub fn bfs_tree(&self, root: usize) -> Result<(Vec<usize>, Vec<Option<usize>>)> {
        self.check_site(root)?;
        let mut parent = vec![None; self.n_sites()];
        let mut seen = vec![false; self.n_sites()];
        let mut order = Vec::with_capacity(self.n_sites());
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if order.len() != self.n_sites() {
            return Err(Error::DisconnectedGraph);
        }
        Ok((order, parent))
    }

    /// Greedy selection of sites with pairwise distance `≥ min_separation`:
    /// repeatedly take the smallest-index remaining site and delete its ball of
    /// radius `min_separation − 1`.
    pub fn separated_sites(&self, min_separation: usize) -> Vec<usize> {
        if min_separation == 0 {
            return (0..self.n_sites()).collect();
        }
        let mut deleted = vec![false; self.n_sites()];
        let mut picked = Vec::new();
        for v in 0..self.n_sites() {
            if deleted[v] {
                continue;
            }
            picked.push(v);
            for (j, d) in self.distances_from(v, Some(min_separation - 1)).iter().enumerate() {
                if d.is_some() {
                    deleted[j] = true;
                }
            }
        }
        picked
    }

    /// Centers of pairwise-disjoint balls of radius `r` (pairwise distance
    /// `> 2r`), found by greedy deletion of radius-`2r` balls.
    pub fn pack_spheres(&self, r: usize) -> Vec<usize> {
        self.separated_sites(2 * r + 1)
    }

    /// Partitions all sites into layers whose members are pairwise more than
    /// `2r` apart, by greedy smallest-color proper coloring of the
    /// distance-`≤ 2r` conflict graph.
    pub fn disjoint_layers(&self, r: usize) -> Vec<Vec<usize>> {
        let n = self.n_sites();
        let mut color: Vec<Option<usize>> = vec![None; n];
        let mut n_colors = 0;
        for v in 0..n {
            let mut used = Vec::new();
            if r > 0 {
                for (j, d) in self.distances_from(v, Some(2 * r)).iter().enumerate() {
                    if j != v && d.is_some() {
                        if let Some(c) = color[j] {
                            used.push(c);
                        }
                    }
                }
            }
            used.sort_unstable();
            used.dedup();
            let c = (0..).find(|c| used.binary_search(c).is_err()).unwrap();
            color[v] = Some(c);
            n_colors = n_colors.max(c + 1);
        }
        let mut layers = vec![Vec::new(); n_colors];
        for (v, c) in color.into_iter().enumerate() {
            layers[c.unwrap()].push(v);
        }
        layers
    }

    /// Graph with an edge between every pair of sites that share a monomial.
    pub fn induced_from_hamiltonian(h: &Operator, n_sites: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for (m, _) in h.terms() {
            let support = m.support();
            for (a, &i) in support.iter().enumerate() {
                for &j in &support[a + 1..] {
                    edges.push((i, j));
                }
            }
        }
        if let Some(&bad) = h.support().iter().find(|&&s| s >= n_sites) {
            return Err(Error::SiteOutOfGraph { site: bad, n_sites });
        }
        Self::from_edge_list(n_sites, &edges)
    }
}

/// `Δ^e + 1`, saturating.
pub fn ball_bound(max_degree: usize, exponent: usize) -> u128 {
    (max_degree as u128)
        .checked_pow(exponent as u32)
        .map_or(u128::MAX, |v| v.saturating_add(1))
}

/// Checks that every pair of centers is more than `2r` apart.
pub fn verify_packing(g: &SiteGraph, r: usize, centers: &[usize]) -> Result<bool> {
    verify_separation(g, centers, 2 * r + 1)
}

/// Checks that layers cover every site exactly once with members more than
/// `2r` apart.
pub fn verify_layers(g: &SiteGraph, r: usize, layers: &[Vec<usize>]) -> Result<bool> {
    let mut seen = vec![false; g.n_sites()];
    for layer in layers {
        for &s in layer {
            g.check_site(s)?;
            if std::mem::replace(&mut seen[s], true) {
                return Ok(false);
            }
        }
        if !verify_separation(g, layer, 2 * r + 1)? {
            return Ok(false);
        }
    }
    Ok(seen.into_iter().all(|b| b))
}

fn verify_separation(g: &SiteGraph, sites: &[usize], min_separation: usize) -> Result<bool> {
    for (a, &i) in sites.iter().enumerate() {
        g.check_site(i)?;
        let dist = g.distances_from(i, None);
        for &j in &sites[a + 1..] {
            g.check_site(j)?;
            if i == j || dist[j].is_some_and(|d| d < min_separation) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n_sites: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&SiteGraph> for GraphJson {
    fn from(g: &SiteGraph) -> Self {
        Self {
            n_sites: g.n_sites(),
            edges: g.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for SiteGraph {
    type Error = Error;
    fn try_from(raw: GraphJson) -> Result<Self> {
        let edges: Vec<(usize, usize)> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        SiteGraph::from_edge_list(raw.n_sites, &edges)
    }
}

impl Serialize for SiteGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SiteGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        SiteGraph::try_from(GraphJson::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingCertificate {
    pub radius: usize,
    pub centers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeringCertificate {
    pub radius: usize,
    pub layers: Vec<Vec<usize>>,
}
