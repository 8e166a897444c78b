//! Quasiparticle creation operators `Q† = Σ_Y a_Y Π_{j∈Y} s†_j` and the
//! structural checks that place a tower in the classes with enforced equal
//! spacing.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball_bound, SiteGraph};
use crate::ops::{mask_of, sites_of, Monomial, Operator, PRUNE_THRESHOLD};

/// Named constructions with first-class support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerPreset {
    /// `S† = Σ_i s†_i`
    Dicke,
    /// `S†₍₂₎ = Σ_{⟨ij⟩} s†_i s†_j` over graph edges
    S2,
    /// `Σ_i Π_{j∈B_i(1)} s†_j`
    Nn,
}

impl std::str::FromStr for TowerPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dicke" => Ok(Self::Dicke),
            "s2" => Ok(Self::S2),
            "nn" => Ok(Self::Nn),
            other => Err(Error::InvalidInput(format!("unknown tower preset {other:?}"))),
        }
    }
}

/// A pure-creation quasiparticle operator.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerSpec {
    n_sites: usize,
    /// (support mask, coefficient), in insertion order with duplicates merged.
    terms: Vec<(u64, Complex64)>,
    preset: Option<TowerPreset>,
}

impl TowerSpec {
    pub fn new<I, S>(n_sites: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Complex64)>,
        S: AsRef<[usize]>,
    {
        let mut merged: Vec<(u64, Complex64)> = Vec::new();
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        for (sites, coeff) in terms {
            let sites = sites.as_ref();
            if sites.is_empty() {
                return Err(Error::InvalidInput("tower term with empty support".into()));
            }
            if let Some(&bad) = sites.iter().find(|&&s| s >= n_sites) {
                return Err(Error::SiteOutOfGraph { site: bad, n_sites });
            }
            let mask = mask_of(sites)?;
            if mask.count_ones() as usize != sites.len() {
                return Err(Error::InvalidInput(format!("repeated site in tower term {sites:?}")));
            }
            match index.get(&mask) {
                Some(&k) => merged[k].1 += coeff,
                None => {
                    index.insert(mask, merged.len());
                    merged.push((mask, coeff));
                }
            }
        }
        merged.retain(|(_, c)| c.norm() >= PRUNE_THRESHOLD);
        Ok(Self {
            n_sites,
            terms: merged,
            preset: None,
        })
    }

    pub fn dicke(n_sites: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut spec = Self::new(n_sites, (0..n_sites).map(|i| ([i], one))).expect("valid sites");
        spec.preset = Some(TowerPreset::Dicke);
        spec
    }

    /// `Σ_i s†_i s†_{i+1}` on a chain; term `i` is `{i, i+1 mod n}`.
    pub fn pair_chain(n_sites: usize, periodic: bool) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let count = if periodic && n_sites > 2 { n_sites } else { n_sites.saturating_sub(1) };
        let terms = (0..count).map(|i| {
            let mut pair = [i, (i + 1) % n_sites];
            pair.sort_unstable();
            (pair, one)
        });
        let mut spec = Self::new(n_sites, terms).expect("valid sites");
        spec.preset = Some(TowerPreset::S2);
        spec
    }

    /// One pair term per graph edge.
    pub fn pair_graph(g: &SiteGraph) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut spec =
            Self::new(g.n_sites(), g.edges().into_iter().map(|(i, j)| ([i, j], one))).expect("valid edges");
        spec.preset = Some(TowerPreset::S2);
        spec
    }

    /// One term per site: the product over its radius-1 ball.
    pub fn nearest_neighbor(g: &SiteGraph) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let terms = (0..g.n_sites()).map(|i| (g.ball(i, 1).expect("site in graph"), one));
        let mut spec = Self::new(g.n_sites(), terms).expect("valid balls");
        spec.preset = Some(TowerPreset::Nn);
        spec
    }

    pub fn from_preset(preset: TowerPreset, g: &SiteGraph) -> Self {
        match preset {
            TowerPreset::Dicke => Self::dicke(g.n_sites()),
            TowerPreset::S2 => Self::pair_graph(g),
            TowerPreset::Nn => Self::nearest_neighbor(g),
        }
    }

    /// Same supports with coefficients replaced, term by term.
    pub fn with_coefficients(&self, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != self.terms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} terms",
                coeffs.len(),
                self.terms.len()
            )));
        }
        if coeffs.iter().any(|c| c.norm() < PRUNE_THRESHOLD) {
            return Err(Error::InvalidInput("tower coefficients must be nonzero".into()));
        }
        Ok(Self {
            n_sites: self.n_sites,
            terms: self.terms.iter().zip(coeffs).map(|(&(m, _), &c)| (m, c)).collect(),
            preset: None,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn preset(&self) -> Option<TowerPreset> {
        self.preset
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(support, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.terms.iter().map(|&(m, c)| (sites_of(m), c))
    }

    pub(crate) fn term_masks(&self) -> &[(u64, Complex64)] {
        &self.terms
    }

    pub fn is_dicke(&self) -> bool {
        self.terms.len() == self.n_sites
            && self.terms.iter().all(|&(m, c)| m.count_ones() == 1 && (c - 1.0).norm() < 1e-14)
    }

    pub fn to_operator(&self) -> Operator {
        Operator::from_terms(self.terms.iter().map(|&(m, c)| (Monomial::from_masks(m, 0), c)))
    }

    /// Common term size `c`, i.e. `[Σn, Q†] = c Q†`; `None` if sizes differ.
    pub fn charge(&self) -> Option<usize> {
        let mut sizes = self.terms.iter().map(|(m, _)| m.count_ones() as usize);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }
}

/// Charge of the tower operator under `Σ_i n_i`.
pub fn charge_of(q: &TowerSpec) -> Option<usize> {
    q.charge()
}

#[derive(Serialize, Deserialize)]
struct TowerTermJson {
    sites: Vec<usize>,
    coeff: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct TowerJson {
    n_sites: usize,
    terms: Vec<TowerTermJson>,
    #[serde(default)]
    preset: Option<TowerPreset>,
}

impl Serialize for TowerSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TowerJson {
            n_sites: self.n_sites,
            terms: self
                .terms()
                .map(|(sites, c)| TowerTermJson {
                    sites,
                    coeff: [c.re, c.im],
                })
                .collect(),
            preset: self.preset,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TowerSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = TowerJson::deserialize(deserializer)?;
        let mut spec = TowerSpec::new(
            raw.n_sites,
            raw.terms
                .into_iter()
                .map(|t| (t.sites, Complex64::new(t.coeff[0], t.coeff[1]))),
        )
        .map_err(serde::de::Error::custom)?;
        spec.preset = raw.preset;
        Ok(spec)
    }
}

/// Verdict for the locality-preserving-map class: every site `i` is assigned
/// a distinct term `I_i` of size `c > 1` lying within distance `d` of `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingClass {
    pub satisfied: bool,
    pub c: Option<usize>,
    pub d: Option<usize>,
    /// `assignment[i]` is the index of the term anchored at site `i`.
    pub assignment: Option<Vec<usize>>,
    pub reason: Option<String>,
}

/// Verdict for the finite-fraction class: terms of size `c` and diameter at
/// most `d1`, with every site within `d2` of some term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageClass {
    pub satisfied: bool,
    pub c: Option<usize>,
    pub d1: Option<usize>,
    pub d2: Option<usize>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerClassReport {
    pub q1: MappingClass,
    pub q2: CoverageClass,
    /// Pure-creation towers always have nilpotent iterated commutators.
    pub q3: bool,
    pub charge: Option<usize>,
    pub max_degree: usize,
    /// `8d(Δ^{4d}+1)`, when the mapping class holds.
    pub delta_bound: Option<u128>,
    /// The decomposition argument needs `H|0̄⟩ = E₀|0̄⟩` on top of `H|Q⟩ = E₁|Q⟩`;
    /// callers must verify it separately.
    pub vacuum_eigenstate_required: bool,
}

impl TowerClassReport {
    /// `α(R) ≤ 2R + 3δ`
    pub fn alpha(&self, range: usize) -> Option<u128> {
        self.delta_bound
            .map(|delta| (2 * range as u128).saturating_add(delta.saturating_mul(3)))
    }

    /// `β(R_max) ≤ Δ^{2(d1−1) + 2d2 + R_max} + 1`
    pub fn beta(&self, r_max: usize) -> Option<u128> {
        let (d1, d2) = (self.q2.d1?, self.q2.d2?);
        Some(ball_bound(
            self.max_degree,
            2 * d1.saturating_sub(1) + 2 * d2 + r_max,
        ))
    }

    /// `γ(k) = 2k + 1`
    pub fn gamma(k: usize) -> usize {
        2 * k + 1
    }
}

/// Augmenting-path bipartite matching of sites to candidate terms. A free
/// candidate is taken before any reassignment; lists are tried in order.
fn perfect_matching(candidates: &[Vec<usize>], n_terms: usize) -> Option<Vec<usize>> {
    fn augment(
        site: usize,
        candidates: &[Vec<usize>],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        if let Some(&t) = candidates[site].iter().find(|&&t| owner[t].is_none()) {
            owner[t] = Some(site);
            return true;
        }
        for &t in &candidates[site] {
            if seen[t] {
                continue;
            }
            seen[t] = true;
            if owner[t].is_none() || augment(owner[t].unwrap(), candidates, owner, seen) {
                owner[t] = Some(site);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; n_terms];
    for site in 0..candidates.len() {
        let mut seen = vec![false; n_terms];
        if !augment(site, candidates, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut assignment = vec![0; candidates.len()];
    for (t, o) in owner.iter().enumerate() {
        if let Some(site) = o {
            assignment[*site] = t;
        }
    }
    Some(assignment)
}

/// Smallest anchoring distance `d` admitting a site→term bijection, with the
/// corresponding assignment.
pub(crate) fn anchor_terms(q: &TowerSpec, dist: &[Vec<Option<usize>>]) -> Option<(usize, Vec<usize>)> {
    let n = q.n_sites();
    if q.len() != n {
        return None;
    }
    // reach[i][t] = max distance from site i to the sites of term t
    let reach: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| {
            q.term_masks()
                .iter()
                .map(|&(m, _)| {
                    sites_of(m)
                        .into_iter()
                        .try_fold(0, |acc, j| dist[i][j].map(|d| acc.max(d)))
                })
                .collect()
        })
        .collect();
    let mut levels: Vec<usize> = reach.iter().flatten().flatten().copied().collect();
    levels.sort_unstable();
    levels.dedup();
    for d in levels {
        let candidates: Vec<Vec<usize>> = reach
            .iter()
            .map(|row| {
                let mut c: Vec<usize> = (0..row.len()).filter(|&t| row[t].is_some_and(|r| r <= d)).collect();
                c.sort_by_key(|&t| (row[t], t));
                c
            })
            .collect();
        if let Some(assignment) = perfect_matching(&candidates, q.len()) {
            return Some((d, assignment));
        }
    }
    None
}

/// Evaluates the three tower classes with the smallest valid constants.
pub fn check_classes(q: &TowerSpec, g: &SiteGraph) -> Result<TowerClassReport> {
    if q.n_sites() != g.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "tower on {} sites, graph on {}",
            q.n_sites(),
            g.n_sites()
        )));
    }
    let dist = g.distance_matrix();
    let charge = q.charge();

    let q1 = match (charge, anchor_terms(q, &dist)) {
        (None, _) => MappingClass {
            satisfied: false,
            c: None,
            d: None,
            assignment: None,
            reason: Some("terms have different sizes".into()),
        },
        (Some(c), None) => MappingClass {
            satisfied: false,
            c: Some(c),
            d: None,
            assignment: None,
            reason: Some("no bijection between sites and terms".into()),
        },
        (Some(c), Some((d, assignment))) => MappingClass {
            satisfied: c > 1,
            c: Some(c),
            d: Some(d),
            assignment: Some(assignment),
            reason: (c <= 1).then(|| "term size must exceed 1".to_string()),
        },
    };

    let mut d1 = Some(0usize);
    for &(m, _) in q.term_masks() {
        d1 = match (d1, g.diameter_of(&sites_of(m))) {
            (Some(acc), Ok(d)) => Some(acc.max(d)),
            _ => None,
        };
    }
    let mut d2 = Some(0usize);
    for row in &dist {
        let nearest = q
            .term_masks()
            .iter()
            .flat_map(|&(m, _)| sites_of(m).into_iter().filter_map(|j| row[j]))
            .min();
        d2 = match (d2, nearest) {
            (Some(acc), Some(n)) => Some(acc.max(n)),
            _ => None,
        };
    }
    let radius = g.radius();
    let q2 = {
        let reason = if charge.is_none() {
            Some("terms have different sizes".to_string())
        } else if q.is_empty() {
            Some("no terms".to_string())
        } else if d1.is_none() {
            Some("a term spans disconnected sites".to_string())
        } else {
            match (d2, radius) {
                (Some(d2), Some(r)) if d2 < r => None,
                (Some(d2), Some(r)) => Some(format!(
                    "coverage distance {d2} is not below the graph radius {r}"
                )),
                _ => Some("some site is not reachable from any term".to_string()),
            }
        };
        CoverageClass {
            satisfied: reason.is_none(),
            c: charge,
            d1,
            d2,
            reason,
        }
    };

    let delta_bound = if q1.satisfied {
        q1.d.map(|d| {
            (8 * d as u128).saturating_mul(ball_bound(g.max_degree(), 4 * d))
        })
    } else {
        None
    };
    Ok(TowerClassReport {
        q1,
        q2,
        q3: q.to_operator().is_pure_creation(),
        charge,
        max_degree: g.max_degree(),
        delta_bound,
        vacuum_eigenstate_required: true,
    })
}
