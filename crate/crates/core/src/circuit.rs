//! Layered circuits of dense local gates, the locality-preserving map sending
//! `|W⟩` to `|Q⟩`, and conjugation of operators by such circuits.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::SparseState;
use crate::graph::{ball_bound, SiteGraph};
use crate::ops::{mask_of, sites_of, Monomial, Operator, DEFAULT_DENSE_CAP, PRUNE_THRESHOLD};
use crate::tower::{anchor_terms, check_classes, TowerSpec};

/// Largest gate support stored densely.
pub const GATE_SITE_CAP: usize = 10;
/// Largest light cone conjugated during locality measurements.
pub const DEFAULT_CONE_CAP: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn extract(bits: u64, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &p)| acc | (((bits >> p) & 1) as usize) << t)
}

fn deposit(local: usize, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &p)| acc | (((local >> t) & 1) as u64) << p)
}

fn nonzero_columns(m: &DMatrix<Complex64>) -> Vec<Vec<(usize, Complex64)>> {
    (0..m.ncols())
        .map(|c| (0..m.nrows()).filter(|&r| m[(r, c)] != ZERO).map(|r| (r, m[(r, c)])).collect())
        .collect()
}

fn nonzero_rows(m: &DMatrix<Complex64>) -> Vec<Vec<(usize, Complex64)>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).filter(|&c| m[(r, c)] != ZERO).map(|c| (c, m[(r, c)])).collect())
        .collect()
}

/// `a·b = I` within `tol`, exploiting sparsity of both factors.
fn is_identity_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    let b_rows = nonzero_rows(b);
    let mut row = vec![ZERO; b.ncols()];
    for (r, a_row) in nonzero_rows(a).iter().enumerate() {
        row.fill(ZERO);
        for &(k, av) in a_row {
            for &(c, bv) in &b_rows[k] {
                row[c] += av * bv;
            }
        }
        row[r] -= ONE;
        if row.iter().any(|z| z.norm() > tol) {
            return false;
        }
    }
    true
}

/// A dense gate on a sorted site set; local bit `t` is the occupation of
/// `support[t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    support: Vec<usize>,
    matrix: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
}

impl Gate {
    pub fn new(support: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput(format!("gate on {support:?} is not invertible")))?;
        Self::with_inverse(support, matrix, inverse)
    }

    pub fn with_inverse(
        support: Vec<usize>,
        matrix: DMatrix<Complex64>,
        inverse: DMatrix<Complex64>,
    ) -> Result<Self> {
        if support.len() > GATE_SITE_CAP {
            return Err(Error::DimensionCapExceeded {
                n_sites: support.len(),
                cap: GATE_SITE_CAP,
            });
        }
        if support.is_empty() || support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "gate support {support:?} must be nonempty, sorted and distinct"
            )));
        }
        let dim = 1usize << support.len();
        for (name, m) in [("matrix", &matrix), ("inverse", &inverse)] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "gate {name} is {}x{}, support needs {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let scale = 1.0 + matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !is_identity_product(&matrix, &inverse, 1e-10 * scale) {
            return Err(Error::InvalidInput(format!(
                "gate on {support:?} does not match its inverse"
            )));
        }
        Ok(Self {
            support,
            matrix,
            inverse,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<Complex64> {
        &self.inverse
    }

    fn apply_to_state(&self, psi: &SparseState, inverse: bool) -> SparseState {
        let m = if inverse { &self.inverse } else { &self.matrix };
        let columns = nonzero_columns(m);
        let mask = self.support.iter().fold(0u64, |acc, &s| acc | 1 << s);
        let mut out = SparseState::zero(psi.n_sites());
        for (bits, amp) in psi.amplitudes() {
            let base = bits & !mask;
            for &(row, g) in &columns[extract(bits, &self.support)] {
                out.add_amplitude(base | deposit(row, &self.support), g * amp);
            }
        }
        out
    }
}

/// Ordered layers of gates; gates within a layer have disjoint supports.
/// Layer 0 acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct GateCircuit {
    n_sites: usize,
    layers: Vec<Vec<Gate>>,
}

impl GateCircuit {
    pub fn new(n_sites: usize, layers: Vec<Vec<Gate>>) -> Result<Self> {
        for layer in &layers {
            let mut used = 0u64;
            for gate in layer {
                if let Some(&bad) = gate.support.iter().find(|&&s| s >= n_sites) {
                    return Err(Error::SiteOutOfGraph { site: bad, n_sites });
                }
                let mask = mask_of(&gate.support)?;
                if used & mask != 0 {
                    return Err(Error::InvalidInput(format!(
                        "overlapping gate supports within a layer at sites {:?}",
                        sites_of(used & mask)
                    )));
                }
                used |= mask;
            }
        }
        Ok(Self { n_sites, layers })
    }

    pub fn identity(n_sites: usize) -> Self {
        Self {
            n_sites,
            layers: Vec::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn n_gates(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    support: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverse: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    n_sites: usize,
    layers: Vec<Vec<GateJson>>,
}

fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> std::result::Result<DMatrix<Complex64>, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err("gate matrix must be square".into());
    }
    Ok(DMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
}

impl Serialize for GateCircuit {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitJson {
            n_sites: self.n_sites,
            layers: self
                .layers
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .map(|g| GateJson {
                            support: g.support.clone(),
                            matrix: matrix_to_rows(&g.matrix),
                            inverse: Some(matrix_to_rows(&g.inverse)),
                        })
                        .collect()
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GateCircuit {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CircuitJson::deserialize(deserializer)?;
        let mut layers = Vec::with_capacity(raw.layers.len());
        for layer in raw.layers {
            let mut gates = Vec::with_capacity(layer.len());
            for g in layer {
                let matrix = rows_to_matrix(&g.matrix).map_err(D::Error::custom)?;
                let gate = match g.inverse {
                    Some(inv) => {
                        Gate::with_inverse(g.support, matrix, rows_to_matrix(&inv).map_err(D::Error::custom)?)
                    }
                    None => Gate::new(g.support, matrix),
                }
                .map_err(D::Error::custom)?;
                gates.push(gate);
            }
            layers.push(gates);
        }
        GateCircuit::new(raw.n_sites, layers).map_err(D::Error::custom)
    }
}

/// Gate geometry for the mapping circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitMode {
    /// Gates on balls `B_i(2d)`, layered by greedy coloring.
    Balls,
    /// Pair tower on a periodic chain: 5-site gates, five layers.
    Chain5,
    /// Pair tower on a periodic chain: 3-site gates, three layers.
    Chain3,
}

impl std::str::FromStr for CircuitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balls" => Ok(Self::Balls),
            "chain5" => Ok(Self::Chain5),
            "chain3" => Ok(Self::Chain3),
            other => Err(Error::InvalidInput(format!("unknown circuit mode {other:?}"))),
        }
    }
}

/// `M_i = (I − P_i) + a|Q_i⟩⟨i| + a⁻¹|i⟩⟨Q_i|` on `support`; when `Q_i = {i}`
/// the gate is `I + (a − 1)|i⟩⟨i|`.
fn mapping_gate(support: Vec<usize>, site: usize, term: u64, a: Complex64) -> Result<Gate> {
    let dim = 1usize << support.len();
    let local = |s: usize| support.iter().position(|&x| x == s);
    let li = 1usize << local(site).ok_or_else(|| Error::InvalidInput("anchor outside gate".into()))?;
    let mut lq = 0usize;
    for s in sites_of(term) {
        lq |= 1 << local(s).ok_or_else(|| Error::InvalidInput("term outside gate".into()))?;
    }
    let mut m = DMatrix::<Complex64>::identity(dim, dim);
    if lq == li {
        let mut inv = m.clone();
        m[(li, li)] = a;
        inv[(li, li)] = ONE / a;
        return Gate::with_inverse(support, m, inv);
    }
    m[(li, li)] = ZERO;
    m[(lq, lq)] = ZERO;
    m[(lq, li)] = a;
    m[(li, lq)] = ONE / a;
    let inv = m.clone();
    Gate::with_inverse(support, m, inv)
}

fn chain_window(n: usize, center: usize, half: usize) -> Vec<usize> {
    let mut w: Vec<usize> = (0..=2 * half).map(|t| (center + n - half + t) % n).collect();
    w.sort_unstable();
    w.dedup();
    w
}

/// Builds `M = L_K ⋯ L_1` with `M|W⟩ = Q†|0̄⟩/√N` and `M|0̄⟩ = |0̄⟩`.
pub fn build_mapping_circuit(q: &TowerSpec, g: &SiteGraph, mode: CircuitMode) -> Result<GateCircuit> {
    let n = g.n_sites();
    let report = check_classes(q, g)?;
    match mode {
        CircuitMode::Balls => {
            let (d, assignment) = if report.q1.satisfied {
                (report.q1.d.unwrap_or(0), report.q1.assignment.clone().unwrap_or_default())
            } else {
                // single-site terms anchored on their own site give a diagonal map
                match anchor_terms(q, &g.distance_matrix()) {
                    Some((0, assignment)) if report.charge == Some(1) => (0, assignment),
                    _ => {
                        return Err(Error::ClassConditionViolated(
                            report.q1.reason.unwrap_or_else(|| "mapping class not satisfied".into()),
                        ))
                    }
                }
            };
            let terms = q.term_masks();
            let mut gates: Vec<Option<Gate>> = Vec::with_capacity(n);
            for (i, &t) in assignment.iter().enumerate() {
                let (mask, a) = terms[t];
                gates.push(Some(mapping_gate(g.ball(i, 2 * d)?, i, mask, a)?));
            }
            let layers = g
                .disjoint_layers(2 * d)
                .into_iter()
                .map(|layer| layer.into_iter().filter_map(|i| gates[i].take()).collect())
                .collect();
            GateCircuit::new(n, layers)
        }
        CircuitMode::Chain5 | CircuitMode::Chain3 => {
            let (period, half) = if mode == CircuitMode::Chain5 { (5, 2) } else { (3, 1) };
            if n < period || !n.is_multiple_of(period) {
                return Err(Error::ClassConditionViolated(format!(
                    "chain mode needs a multiple of {period} sites, got {n}"
                )));
            }
            if *g != SiteGraph::chain(n, true) {
                return Err(Error::ClassConditionViolated("chain mode needs a periodic chain".into()));
            }
            let coeffs: BTreeMap<u64, Complex64> = q.term_masks().iter().copied().collect();
            if coeffs.len() != n {
                return Err(Error::ClassConditionViolated(
                    "chain mode needs exactly one pair term per site".into(),
                ));
            }
            let mut gates = Vec::with_capacity(n);
            for i in 0..n {
                let mask = (1u64 << i) | (1u64 << ((i + 1) % n));
                let a = *coeffs.get(&mask).ok_or_else(|| {
                    Error::ClassConditionViolated(format!("missing pair term at site {i}"))
                })?;
                gates.push(Some(mapping_gate(chain_window(n, i, half), i, mask, a)?));
            }
            let layers = (0..period)
                .map(|j| (j..n).step_by(period).filter_map(|i| gates[i].take()).collect())
                .collect();
            GateCircuit::new(n, layers)
        }
    }
}

/// `Δ^{4d} + 1`
pub fn layer_count_bound(max_degree: usize, d: usize) -> u128 {
    ball_bound(max_degree, 4 * d)
}

/// Applies `M` (or `M⁻¹` when `inverse`) exactly.
pub fn apply_circuit(m: &GateCircuit, psi: &SparseState, inverse: bool) -> Result<SparseState> {
    if psi.n_sites() != m.n_sites {
        return Err(Error::DimensionMismatch(format!(
            "state on {} sites, circuit on {}",
            psi.n_sites(),
            m.n_sites
        )));
    }
    let mut out = psi.clone();
    let layers: Box<dyn Iterator<Item = &Vec<Gate>>> = if inverse {
        Box::new(m.layers.iter().rev())
    } else {
        Box::new(m.layers.iter())
    };
    for layer in layers {
        for gate in layer {
            out = gate.apply_to_state(&out, inverse);
        }
    }
    let scale = out.norm().max(psi.norm());
    Ok(out.prune(PRUNE_THRESHOLD * scale))
}

/// Sparse matrix of an operator on a sorted register of sites.
#[derive(Clone, Debug)]
struct RegisterOperator {
    sites: Vec<usize>,
    entries: BTreeMap<(u64, u64), Complex64>,
}

impl RegisterOperator {
    fn from_operator(op: &Operator, sites: Vec<usize>) -> Result<Self> {
        let register = mask_of(&sites)?;
        if op.support_mask() & !register != 0 {
            return Err(Error::InvalidInput("operator support leaves the register".into()));
        }
        let mut entries = BTreeMap::new();
        for col in 0..1usize << sites.len() {
            let global = deposit(col, &sites);
            for (out, c) in op.act_on_basis(global) {
                let row = extract(out, &sites) as u64;
                *entries.entry((row, col as u64)).or_insert(ZERO) += c;
            }
        }
        let mut this = Self { sites, entries };
        this.prune();
        Ok(this)
    }

    fn max_abs(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn prune(&mut self) {
        let cut = PRUNE_THRESHOLD * self.max_abs();
        self.entries.retain(|_, v| v.norm() > cut);
    }

    fn positions(&self, support: &[usize]) -> Vec<usize> {
        support
            .iter()
            .map(|s| self.sites.binary_search(s).expect("gate inside register"))
            .collect()
    }

    /// `O ← G O G⁻¹`
    fn conjugate(&mut self, support: &[usize], g: &DMatrix<Complex64>, ginv: &DMatrix<Complex64>) {
        let pos = self.positions(support);
        let mask = deposit((1 << pos.len()) - 1, &pos);
        let cols = nonzero_columns(g);
        let mut left: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (&(r, c), &v) in &self.entries {
            for &(l, gv) in &cols[extract(r, &pos)] {
                *left.entry(((r & !mask) | deposit(l, &pos), c)).or_insert(ZERO) += gv * v;
            }
        }
        let rows = nonzero_rows(ginv);
        let mut right: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (&(r, c), &v) in &left {
            for &(l, wv) in &rows[extract(c, &pos)] {
                *right.entry((r, (c & !mask) | deposit(l, &pos))).or_insert(ZERO) += v * wv;
            }
        }
        self.entries = right;
        self.prune();
    }

    /// Sites on which the operator differs from the identity factor.
    fn nontrivial_sites(&self, tol: f64) -> Vec<usize> {
        let cut = tol * self.max_abs().max(1.0);
        let mut out = Vec::new();
        for (t, &site) in self.sites.iter().enumerate() {
            let bit = 1u64 << t;
            let nontrivial = self.entries.iter().any(|(&(r, c), &v)| {
                if (r ^ c) & bit != 0 {
                    return v.norm() > cut;
                }
                let partner = self.entries.get(&(r ^ bit, c ^ bit)).copied().unwrap_or(ZERO);
                (v - partner).norm() > cut
            });
            if nontrivial {
                out.push(site);
            }
        }
        out
    }

    /// Expansion in normal-ordered monomials; `|0⟩⟨0| = 1 − n`, `|1⟩⟨1| = n`.
    fn to_operator(&self) -> Operator {
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        let full = (1u64 << self.sites.len()) - 1;
        for (&(r, c), &v) in &self.entries {
            let off = r ^ c;
            let creates = r & off;
            let annihilates = c & off;
            let ones = r & c;
            let zeros = full & !(r | c);
            // iterate over all subsets of the empty sites
            let mut subset = 0u64;
            loop {
                let sign = if subset.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                let cr = deposit((creates | ones | subset) as usize, &self.sites);
                let an = deposit((annihilates | ones | subset) as usize, &self.sites);
                *acc.entry(Monomial::from_masks(cr, an)).or_insert(ZERO) += v * sign;
                if subset == zeros {
                    break;
                }
                subset = (subset.wrapping_sub(zeros)) & zeros;
            }
        }
        Operator::from_terms(acc)
    }
}

/// Gates of `layers` (in the given order) inside the growing light cone of
/// `seed`, with the final cone.
fn light_cone<'a, I>(seed: &[usize], layers: I, cap: usize) -> Result<(Vec<usize>, Vec<&'a Gate>)>
where
    I: Iterator<Item = &'a Vec<Gate>>,
{
    let mut cone: BTreeSet<usize> = seed.iter().copied().collect();
    let mut gates = Vec::new();
    for layer in layers {
        let touched: Vec<&Gate> = layer
            .iter()
            .filter(|g| g.support.iter().any(|s| cone.contains(s)))
            .collect();
        for g in &touched {
            cone.extend(g.support.iter().copied());
        }
        gates.extend(touched);
        if cone.len() > cap {
            return Err(Error::ConeTooLarge {
                size: cone.len(),
                cap,
            });
        }
    }
    Ok((cone.into_iter().collect(), gates))
}

/// Observed range growth of `n_j` under `M · M⁻¹` and `M⁻¹ · M`, maximized
/// over probe sites.
pub fn measure_locality_growth(m: &GateCircuit, g: &SiteGraph, probe_sites: &[usize]) -> Result<usize> {
    measure_locality_growth_with_cap(m, g, probe_sites, DEFAULT_CONE_CAP)
}

pub fn measure_locality_growth_with_cap(
    m: &GateCircuit,
    g: &SiteGraph,
    probe_sites: &[usize],
    cap: usize,
) -> Result<usize> {
    if g.n_sites() != m.n_sites {
        return Err(Error::DimensionMismatch(format!(
            "graph on {} sites, circuit on {}",
            g.n_sites(),
            m.n_sites
        )));
    }
    let mut worst = 0;
    for &j in probe_sites {
        if j >= m.n_sites {
            return Err(Error::SiteOutOfGraph {
                site: j,
                n_sites: m.n_sites,
            });
        }
        for inverse in [false, true] {
            let (cone, gates) = if inverse {
                light_cone(&[j], m.layers.iter().rev(), cap)?
            } else {
                light_cone(&[j], m.layers.iter(), cap)?
            };
            let mut op = RegisterOperator::from_operator(&Operator::number(j), cone)?;
            for gate in gates {
                if inverse {
                    op.conjugate(&gate.support, &gate.inverse, &gate.matrix);
                } else {
                    op.conjugate(&gate.support, &gate.matrix, &gate.inverse);
                }
            }
            let support = op.nontrivial_sites(1e-12);
            let range = g.diameter_of(&support)?;
            worst = worst.max(range.saturating_sub(1));
        }
    }
    Ok(worst)
}

/// `M H M⁻¹` expanded back into monomials.
pub fn conjugate_hamiltonian(m: &GateCircuit, h: &Operator, n_sites: usize) -> Result<Operator> {
    if n_sites > DEFAULT_DENSE_CAP {
        return Err(Error::DimensionCapExceeded {
            n_sites,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    if n_sites != m.n_sites {
        return Err(Error::DimensionMismatch(format!(
            "{n_sites} sites requested, circuit on {}",
            m.n_sites
        )));
    }
    let mut op = RegisterOperator::from_operator(h, (0..n_sites).collect())?;
    for layer in &m.layers {
        for gate in layer {
            op.conjugate(&gate.support, &gate.matrix, &gate.inverse);
        }
    }
    let scale = h.max_abs_coeff().max(1.0);
    Ok(op.to_operator().prune(PRUNE_THRESHOLD * scale * 100.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply, dicke_state, eigen_check, tower_state};
    use crate::ops::to_matrix;

    fn q_state(q: &TowerSpec) -> SparseState {
        let n = q.n_sites();
        let raw = apply(&q.to_operator(), &SparseState::vacuum(n)).unwrap();
        raw.scale(Complex64::new(1.0 / (n as f64).sqrt(), 0.0))
    }

    #[test]
    fn five_layer_pair_circuit() {
        let g = SiteGraph::chain(10, true);
        let q = TowerSpec::pair_chain(10, true);
        for mode in [CircuitMode::Balls, CircuitMode::Chain5] {
            let m = build_mapping_circuit(&q, &g, mode).unwrap();
            assert_eq!(m.n_layers(), 5);
            let w = dicke_state(10, 1).unwrap();
            let mw = apply_circuit(&m, &w, false).unwrap();
            assert!(mw.distance(&tower_state(&q, 1, 10).unwrap()) < 1e-12);
            let back = apply_circuit(&m, &mw, true).unwrap();
            assert!(back.distance(&w) < 1e-12);
            let vac = SparseState::vacuum(10);
            assert!(apply_circuit(&m, &vac, false).unwrap().distance(&vac) < 1e-12);
        }
    }

    #[test]
    fn compact_circuit_growth() {
        let g = SiteGraph::chain(9, true);
        let q = TowerSpec::pair_chain(9, true);
        let m = build_mapping_circuit(&q, &g, CircuitMode::Chain3).unwrap();
        assert_eq!(m.n_layers(), 3);
        let w = dicke_state(9, 1).unwrap();
        assert!(apply_circuit(&m, &w, false).unwrap().distance(&q_state(&q)) < 1e-12);
        let delta = measure_locality_growth(&m, &g, &[5]).unwrap();
        assert!(delta <= 18, "{delta}");
    }

    #[test]
    fn dicke_circuit_is_trivial() {
        let g = SiteGraph::chain(6, true);
        let m = build_mapping_circuit(&TowerSpec::dicke(6), &g, CircuitMode::Balls).unwrap();
        let w = dicke_state(6, 1).unwrap();
        assert!(apply_circuit(&m, &w, false).unwrap().distance(&w) < 1e-12);
        assert_eq!(measure_locality_growth(&m, &g, &[0, 3]).unwrap(), 0);
    }

    #[test]
    fn identity_circuit() {
        let g = SiteGraph::chain(8, true);
        let m = GateCircuit::identity(8);
        let psi = dicke_state(8, 3).unwrap();
        assert_eq!(apply_circuit(&m, &psi, false).unwrap(), psi);
        assert_eq!(measure_locality_growth(&m, &g, &[2]).unwrap(), 0);
        let h = Operator::total_number(8) + Operator::tau(0, 1);
        assert!(conjugate_hamiltonian(&m, &h, 8).unwrap().approx_eq(&h, 1e-12));
    }

    #[test]
    fn weighted_grid_circuit() {
        let g = SiteGraph::square_grid(3, 3, true);
        let base = TowerSpec::nearest_neighbor(&g);
        let coeffs: Vec<Complex64> = (0..9).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3)).collect();
        let q = base.with_coefficients(&coeffs).unwrap();
        let m = build_mapping_circuit(&q, &g, CircuitMode::Balls).unwrap();
        assert!(m.n_layers() as u128 <= layer_count_bound(g.max_degree(), 1));
        let w = dicke_state(9, 1).unwrap();
        assert!(apply_circuit(&m, &w, false).unwrap().distance(&q_state(&q)) < 1e-12);
    }

    #[test]
    fn conjugated_number_operator() {
        let n = 10;
        let g = SiteGraph::chain(n, true);
        let q = TowerSpec::pair_chain(n, true);
        let m = build_mapping_circuit(&q, &g, CircuitMode::Chain5).unwrap();
        let h = conjugate_hamiltonian(&m, &Operator::total_number(n), n).unwrap();
        for p in 0..=3 {
            let qp = tower_state(&q, p, n).unwrap();
            let mqp = apply_circuit(&m, &qp, false).unwrap();
            let check = eigen_check(&h, &mqp).unwrap();
            assert!(check.residual < 1e-10);
            assert!((check.eigenvalue - 2.0 * p as f64).norm() < 1e-10);
        }
        let check = eigen_check(&h, &tower_state(&q, 1, n).unwrap()).unwrap();
        assert!((check.eigenvalue - 1.0).norm() < 1e-10 && check.residual < 1e-10);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let n = 5;
        let g = SiteGraph::chain(n, true);
        let q = TowerSpec::pair_chain(n, true);
        let m = build_mapping_circuit(&q, &g, CircuitMode::Chain5).unwrap();
        let h = Operator::total_number(n) + adjoint_pair(0, 2) * 0.5 + adjoint_pair(1, 3);
        let conj = conjugate_hamiltonian(&m, &h, n).unwrap();
        // unit weights make every gate a permutation, so the conjugate stays Hermitian
        let dense = to_matrix(&conj, n).unwrap();
        assert!((&dense - dense.adjoint()).iter().all(|z| z.norm() < 1e-12));
        let spectrum = |mat: DMatrix<Complex64>| {
            let mut v: Vec<f64> = mat.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (a, b) = (spectrum(to_matrix(&h, n).unwrap()), spectrum(dense.clone()));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));

        // dense oracle for M H M^-1, built column by column
        let dim = 1usize << n;
        let column = |bits: u64, inverse: bool| {
            let out = apply_circuit(&m, &SparseState::basis(n, bits), inverse).unwrap();
            (0..dim).map(move |r| out.amplitude(r as u64)).collect::<Vec<_>>()
        };
        let mut md = DMatrix::zeros(dim, dim);
        let mut mi = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            for (r, z) in column(c as u64, false).into_iter().enumerate() {
                md[(r, c)] = z;
            }
            for (r, z) in column(c as u64, true).into_iter().enumerate() {
                mi[(r, c)] = z;
            }
        }
        let oracle = &md * to_matrix(&h, n).unwrap() * &mi;
        assert!((oracle - dense).iter().all(|z| z.norm() < 1e-12));
    }

    fn adjoint_pair(i: usize, j: usize) -> Operator {
        let hop = &Operator::create(i) * &Operator::annihilate(j);
        hop.clone() + crate::ops::adjoint(&hop)
    }

    #[test]
    fn json_roundtrip() {
        let g = SiteGraph::chain(6, true);
        let m = build_mapping_circuit(&TowerSpec::pair_chain(6, true), &g, CircuitMode::Chain3).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: GateCircuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
