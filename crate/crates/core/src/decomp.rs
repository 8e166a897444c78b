//! Term classification against the W-eigenstate conditions, decomposition of
//! parent Hamiltonians into `Ω·I + ω·Σn + Σ h_X`, random annihilators and
//! parents, and witness configurations.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{apply, SparseState};
use crate::graph::{ball_bound, SiteGraph};
use crate::ops::{adjoint, locality_metrics, mask_of, sites_of, Monomial, Operator, EQ_TOLERANCE};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest register on which the whole-system check runs.
pub const DEFAULT_GLOBAL_CHECK_CAP: usize = 12;
/// Residual tolerance for certified annihilation.
pub const ANNIHILATION_TOLERANCE: f64 = 1e-12;

/// The five families of non-identity monomials `s†_J s_K`, keyed by
/// `(n, m) = (|J|, |K|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermRow {
    /// `n ≥ 1, m = 0`: coefficients must vanish.
    CreationOnly,
    /// `m ≥ 2`: no condition.
    MultiAnnihilation,
    /// `n ≥ 2, m = 1`: `Σ_k c^J_k = 0` for every creation set `J`.
    MultiCreation,
    /// `n = 0, m = 1`: `Σ_k c_k = 0`.
    SingleAnnihilation,
    /// `n = 1, m = 1`: `Σ_k c^j_k = λ` with `λ` common to every site.
    Hopping,
}

impl TermRow {
    pub const ALL: [TermRow; 5] = [
        TermRow::CreationOnly,
        TermRow::MultiAnnihilation,
        TermRow::MultiCreation,
        TermRow::SingleAnnihilation,
        TermRow::Hopping,
    ];

    pub fn of(m: &Monomial) -> Option<TermRow> {
        match m.degree() {
            (0, 0) => None,
            (_, 0) => Some(TermRow::CreationOnly),
            (_, k) if k >= 2 => Some(TermRow::MultiAnnihilation),
            (0, 1) => Some(TermRow::SingleAnnihilation),
            (1, 1) => Some(TermRow::Hopping),
            _ => Some(TermRow::MultiCreation),
        }
    }

    /// `(n, m)` label as printed in reports.
    pub fn label(self) -> &'static str {
        match self {
            TermRow::CreationOnly => "(n>=1, m=0)",
            TermRow::MultiAnnihilation => "(n>=0, m>=2)",
            TermRow::MultiCreation => "(n>=2, m=1)",
            TermRow::SingleAnnihilation => "(n=0, m=1)",
            TermRow::Hopping => "(n=1, m=1)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Empty,
    NoCondition,
    Satisfied,
    Violated { details: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowBucket {
    pub row: TermRow,
    pub terms: Operator,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub n_sites: usize,
    pub identity: [f64; 2],
    /// Common hopping row sum, when the hopping condition holds.
    pub lambda: Option<[f64; 2]>,
    pub rows: Vec<RowBucket>,
}

impl Classification {
    pub fn row(&self, row: TermRow) -> &RowBucket {
        self.rows.iter().find(|b| b.row == row).expect("all rows present")
    }

    pub fn violated_rows(&self) -> Vec<TermRow> {
        self.rows
            .iter()
            .filter(|b| matches!(b.status, RowStatus::Violated { .. }))
            .map(|b| b.row)
            .collect()
    }

    pub fn is_parent_of_w(&self) -> bool {
        self.violated_rows().is_empty()
    }

    pub fn eigenvalue(&self) -> Option<Complex64> {
        self.is_parent_of_w().then(|| {
            let id = Complex64::new(self.identity[0], self.identity[1]);
            id + self.lambda.map_or(ZERO, |l| Complex64::new(l[0], l[1]))
        })
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn is_small(z: Complex64, scale: f64) -> bool {
    z.norm() <= EQ_TOLERANCE * scale.max(1.0)
}

/// Sorts every monomial of `h` into its row and evaluates the row conditions
/// on a register of `n_sites` sites.
pub fn classify_terms(h: &Operator, n_sites: usize) -> Result<Classification> {
    if let Some(&bad) = h.support().iter().find(|&&s| s >= n_sites) {
        return Err(Error::SiteOutOfGraph { site: bad, n_sites });
    }
    let scale = h.max_abs_coeff();
    let mut buckets: BTreeMap<TermRow, Vec<(Monomial, Complex64)>> =
        TermRow::ALL.iter().map(|&r| (r, Vec::new())).collect();
    for (m, &c) in h.terms() {
        if let Some(row) = TermRow::of(m) {
            buckets.get_mut(&row).expect("row").push((*m, c));
        }
    }
    let identity = h.coeff(&Monomial::IDENTITY);
    let mut lambda = None;
    let mut rows = Vec::with_capacity(5);
    for (&row, terms) in &buckets {
        let status = if terms.is_empty() {
            if row == TermRow::Hopping {
                lambda = Some(pair(ZERO));
            }
            RowStatus::Empty
        } else {
            match row {
                TermRow::CreationOnly => RowStatus::Violated {
                    details: terms.iter().map(|(m, c)| format!("{m} has coefficient {c}")).collect(),
                },
                TermRow::MultiAnnihilation => RowStatus::NoCondition,
                TermRow::MultiCreation => {
                    let mut sums: BTreeMap<u64, Complex64> = BTreeMap::new();
                    for (m, c) in terms {
                        *sums.entry(m.creates_mask()).or_insert(ZERO) += c;
                    }
                    let details: Vec<String> = sums
                        .iter()
                        .filter(|(_, s)| !is_small(**s, scale))
                        .map(|(&j, s)| format!("creation set {:?} sums to {s}", sites_of(j)))
                        .collect();
                    if details.is_empty() {
                        RowStatus::Satisfied
                    } else {
                        RowStatus::Violated { details }
                    }
                }
                TermRow::SingleAnnihilation => {
                    let sum: Complex64 = terms.iter().map(|(_, c)| c).sum();
                    if is_small(sum, scale) {
                        RowStatus::Satisfied
                    } else {
                        RowStatus::Violated {
                            details: vec![format!("coefficients sum to {sum}")],
                        }
                    }
                }
                TermRow::Hopping => {
                    let mut sums = vec![ZERO; n_sites];
                    for (m, c) in terms {
                        sums[m.creates()[0]] += c;
                    }
                    let common = sums.first().copied().unwrap_or(ZERO);
                    let details: Vec<String> = sums
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| !is_small(**s - common, scale))
                        .map(|(j, s)| format!("site {j} row sums to {s}, site 0 to {common}"))
                        .collect();
                    if details.is_empty() {
                        lambda = Some(pair(common));
                        RowStatus::Satisfied
                    } else {
                        RowStatus::Violated { details }
                    }
                }
            }
        };
        rows.push(RowBucket {
            row,
            terms: Operator::from_terms(terms.iter().copied()),
            status,
        });
    }
    Ok(Classification {
        n_sites,
        identity: pair(identity),
        lambda,
        rows,
    })
}

/// A local annihilator of `|W⟩` and `|0̄⟩` with its support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annihilator {
    pub support: Vec<usize>,
    pub operator: Operator,
}

/// `H = Ω·I + ω·Σn + Σ_X h_X`, with each `h_X` verified to kill `|W⟩` and `|0̄⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionCertificate {
    pub n_sites: usize,
    pub omega0: Complex64,
    pub omega: Complex64,
    pub range: usize,
    pub eigenvalue: Complex64,
    pub annihilators: Vec<Annihilator>,
    pub verified_at_n_sites: usize,
    pub warnings: Vec<String>,
}

impl DecompositionCertificate {
    pub fn reconstruct(&self) -> Operator {
        let mut out = Operator::identity() * self.omega0 + Operator::total_number(self.n_sites) * self.omega;
        for a in &self.annihilators {
            out += a.operator.clone();
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    n_sites: usize,
    omega0: [f64; 2],
    omega: [f64; 2],
    #[serde(rename = "R")]
    range: usize,
    eigenvalue: [f64; 2],
    annihilators: Vec<Annihilator>,
    verified_at_n_sites: usize,
    #[serde(default)]
    warnings: Vec<String>,
}

impl Serialize for DecompositionCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateJson {
            n_sites: self.n_sites,
            omega0: pair(self.omega0),
            omega: pair(self.omega),
            range: self.range,
            eigenvalue: pair(self.eigenvalue),
            annihilators: self.annihilators.clone(),
            verified_at_n_sites: self.verified_at_n_sites,
            warnings: self.warnings.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DecompositionCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CertificateJson::deserialize(deserializer)?;
        let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        Ok(Self {
            n_sites: raw.n_sites,
            omega0: c(raw.omega0),
            omega: c(raw.omega),
            range: raw.range,
            eigenvalue: c(raw.eigenvalue),
            annihilators: raw.annihilators,
            verified_at_n_sites: raw.verified_at_n_sites,
            warnings: raw.warnings,
        })
    }
}

/// Outcome of re-checking a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub reconstruction_error: Option<f64>,
    pub max_residual_w: f64,
    pub max_residual_vacuum: f64,
    pub max_diameter: usize,
    pub diameter_bound: usize,
    pub valid: bool,
    pub failures: Vec<String>,
}

/// `Σ_{j∈X} |j⟩`, unnormalized, on the full register.
fn local_w(n_sites: usize, support: &[usize]) -> SparseState {
    SparseState::from_amplitudes(n_sites, support.iter().map(|&j| (1u64 << j, ONE)))
}

/// Residuals `(‖h W_X‖/√|X|, ‖h 0̄‖)`. Killing the local W state and the
/// vacuum is equivalent to killing `|W⟩` on any register containing `X`.
pub fn annihilation_residuals(h: &Operator, support: &[usize], n_sites: usize) -> Result<(f64, f64)> {
    let w = local_w(n_sites, support);
    let rw = apply(h, &w)?.norm() / (support.len().max(1) as f64).sqrt();
    let rv = apply(h, &SparseState::vacuum(n_sites))?.norm();
    Ok((rw, rv))
}

/// Re-validates a certificate; `h` enables the reconstruction check.
pub fn verify_certificate(
    cert: &DecompositionCertificate,
    h: Option<&Operator>,
    g: &SiteGraph,
) -> Result<CertificateCheck> {
    if g.n_sites() != cert.n_sites {
        return Err(Error::DimensionMismatch(format!(
            "certificate on {} sites, graph on {}",
            cert.n_sites,
            g.n_sites()
        )));
    }
    let mut failures = Vec::new();
    let reconstruction_error = h.map(|h| h.max_abs_diff(&cert.reconstruct()));
    if let (Some(err), Some(h)) = (reconstruction_error, h) {
        if err > EQ_TOLERANCE * h.max_abs_coeff().max(1.0) {
            failures.push(format!("reconstruction differs by {err:e}"));
        }
    }
    if let Some(h) = h {
        let range = locality_metrics(h, g)?.range;
        if range != cert.range {
            failures.push(format!("certificate range {} but operator range {range}", cert.range));
        }
    }
    let (mut rw_max, mut rv_max, mut diam_max) = (0.0f64, 0.0f64, 0usize);
    for (idx, a) in cert.annihilators.iter().enumerate() {
        let actual = a.operator.support();
        if actual.iter().any(|s| a.support.binary_search(s).is_err()) {
            failures.push(format!("annihilator {idx} acts outside its declared support"));
        }
        let diam = g.diameter_of(&a.support)?;
        diam_max = diam_max.max(diam);
        if diam > 2 * cert.range {
            failures.push(format!("annihilator {idx} has diameter {diam} > {}", 2 * cert.range));
        }
        let (rw, rv) = annihilation_residuals(&a.operator, &a.support, cert.n_sites)?;
        let tol = ANNIHILATION_TOLERANCE * a.operator.max_abs_coeff().max(1.0);
        if rw > tol || rv > tol {
            failures.push(format!("annihilator {idx} residuals {rw:e} on W, {rv:e} on vacuum"));
        }
        rw_max = rw_max.max(rw);
        rv_max = rv_max.max(rv);
    }
    if (cert.eigenvalue - (cert.omega0 + cert.omega)).norm() > EQ_TOLERANCE * cert.eigenvalue.norm().max(1.0) {
        failures.push("eigenvalue differs from Ω + ω".into());
    }
    Ok(CertificateCheck {
        reconstruction_error,
        max_residual_w: rw_max,
        max_residual_vacuum: rv_max,
        max_diameter: diam_max,
        diameter_bound: 2 * cert.range,
        valid: failures.is_empty(),
        failures,
    })
}

/// Whether the graph has three sites pairwise farther than `R` apart and two
/// sites farther than `2R` apart.
pub fn separation_precondition(g: &SiteGraph, range: usize) -> bool {
    if (g.n_sites() as u128) > ball_bound(g.max_degree(), 4 * range) {
        return true;
    }
    let dist = g.distance_matrix();
    let far = |i: usize, j: usize, r: usize| dist[i][j].is_none_or(|d| d > r);
    let n = g.n_sites();
    let pair = (0..n).any(|i| (i + 1..n).any(|j| far(i, j, 2 * range)));
    let triple = (0..n).any(|i| {
        (i + 1..n).any(|j| far(i, j, range) && (j + 1..n).any(|k| far(i, k, range) && far(j, k, range)))
    });
    pair && triple
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Registers up to this size are also checked on the full `|W⟩`.
    pub global_check_cap: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            global_check_cap: DEFAULT_GLOBAL_CHECK_CAP,
        }
    }
}

pub fn decompose(h: &Operator, g: &SiteGraph) -> Result<DecompositionCertificate> {
    decompose_with(h, g, DecomposeOptions::default())
}

pub fn decompose_with(h: &Operator, g: &SiteGraph, opts: DecomposeOptions) -> Result<DecompositionCertificate> {
    let n = g.n_sites();
    let class = classify_terms(h, n)?;
    let violated = class.violated_rows();
    if !violated.is_empty() {
        let msg = class
            .rows
            .iter()
            .filter_map(|b| match &b.status {
                RowStatus::Violated { details } => Some(format!("row {}: {}", b.row.label(), details.join("; "))),
                _ => None,
            })
            .collect::<Vec<_>>()
            .join(" | ");
        return Err(Error::NotParentOfW(msg));
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let range = locality_metrics(h, g)?.range;
    let omega0 = h.coeff(&Monomial::IDENTITY);
    let omega = class.lambda.map_or(ZERO, |l| Complex64::new(l[0], l[1]));
    let mut warnings = Vec::new();
    if !separation_precondition(g, range) {
        warnings.push(format!(
            "graph lacks the site separations assumed for range {range}; certificate is numerical only"
        ));
    }

    let mut annihilators: Vec<Annihilator> = Vec::new();
    let mut push = |op: Operator| {
        if !op.is_empty() {
            annihilators.push(Annihilator {
                support: op.support(),
                operator: op,
            });
        }
    };
    let mut groups: BTreeMap<u64, Operator> = BTreeMap::new();
    let mut single = vec![ZERO; n];
    for (m, &c) in h.terms() {
        match TermRow::of(m) {
            Some(TermRow::MultiAnnihilation) => push(Operator::from_term(*m, c)),
            Some(TermRow::MultiCreation) => groups.entry(m.creates_mask()).or_default().add_term(*m, c),
            Some(TermRow::SingleAnnihilation) => single[m.annihilates()[0]] += c,
            Some(TermRow::Hopping) if m.creates_mask() != m.annihilates_mask() => {
                let j = m.creates()[0];
                push(Operator::from_term(*m, c) - Operator::number(j) * c);
            }
            _ => {}
        }
    }
    for (_, op) in groups {
        push(op);
    }
    // single annihilations: eliminate leaves of a BFS tree towards the root
    let (order, parent) = g.bfs_tree(0)?;
    for &v in order.iter().rev() {
        let Some(p) = parent[v] else { continue };
        let c = single[v];
        if c != ZERO {
            push(Operator::tau(v, p) * c);
            single[p] += c;
            single[v] = ZERO;
        }
    }

    let cert = DecompositionCertificate {
        n_sites: n,
        omega0,
        omega,
        range,
        eigenvalue: omega0 + omega,
        annihilators,
        verified_at_n_sites: n,
        warnings,
    };
    let check = verify_certificate(&cert, Some(h), g)?;
    if !check.valid {
        return Err(Error::NotParentOfW(check.failures.join("; ")));
    }
    if n <= opts.global_check_cap {
        let w = crate::fock::dicke_state(n, 1)?;
        let scale = h.l1_norm().max(1.0);
        let residual = apply(h, &w)?.add_scaled(&w, -cert.eigenvalue).norm();
        if residual > ANNIHILATION_TOLERANCE * scale {
            return Err(Error::NotParentOfW(format!("whole-system residual {residual:e}")));
        }
    }
    Ok(cert)
}

/// Kinds of random annihilators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFlavor {
    /// Any of the four annihilating families, non-Hermitian.
    Generic,
    /// Hermitian pieces that still kill `|W⟩`.
    Hermitian,
    /// `A (P_jk − 1)`, killing every Dicke state.
    DickePreserving,
    /// `(P_jk − 1) B (P_jk − 1)` with Hermitian `B`.
    HermitianDickePreserving,
}

impl std::str::FromStr for SampleFlavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Self::Generic),
            "hermitian" => Ok(Self::Hermitian),
            "dicke" | "dicke_preserving" => Ok(Self::DickePreserving),
            "hermitian_dicke" | "hermitian_dicke_preserving" => Ok(Self::HermitianDickePreserving),
            other => Err(Error::InvalidInput(format!("unknown sample flavor {other:?}"))),
        }
    }
}

/// `P_jk − 1 = s†_j s_k + s†_k s_j + 2 n_j n_k − n_j − n_k`
pub fn swap_minus_identity(j: usize, k: usize) -> Operator {
    let hop = &Operator::create(j) * &Operator::annihilate(k);
    let nn = &Operator::number(j) * &Operator::number(k);
    hop.clone() + adjoint(&hop) + nn * 2.0 - Operator::number(j) - Operator::number(k)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random site set of 2 to 4 sites with pairwise distance below `r_max`.
fn sample_region(dist: &[Vec<Option<usize>>], r_max: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = dist.len();
    let anchor = rng.random_range(0..n);
    let target = rng.random_range(2..=4);
    let close = |a: usize, b: usize| dist[a][b].is_some_and(|d| d < r_max);
    let mut candidates: Vec<usize> = (0..n).filter(|&j| j != anchor && close(anchor, j)).collect();
    candidates.shuffle(rng);
    let mut region = vec![anchor];
    for j in candidates {
        if region.len() >= target {
            break;
        }
        if region.iter().all(|&r| close(r, j)) {
            region.push(j);
        }
    }
    region.sort_unstable();
    region
}

/// Random subset of `region` with at least `min` elements.
fn random_subset(region: &[usize], min: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let s: Vec<usize> = region.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if s.len() >= min {
            return s;
        }
    }
}

fn random_monomial(region: &[usize], rng: &mut ChaCha8Rng) -> Monomial {
    let c = random_subset(region, 0, rng);
    let a = random_subset(region, 0, rng);
    Monomial::new(&c, &a).expect("sites below 64")
}

fn two_distinct(region: &[usize], rng: &mut ChaCha8Rng) -> (usize, usize) {
    let mut picks = region.to_vec();
    picks.shuffle(rng);
    (picks[0], picks[1])
}

/// `Σ_k c_k s†_J s_k` with `Σ_k c_k = 0`.
fn zero_sum_group(region: &[usize], rng: &mut ChaCha8Rng) -> Operator {
    let j = random_subset(region, 2, rng);
    let mut op = Operator::zero();
    let mut total = ZERO;
    for (idx, &k) in region.iter().enumerate() {
        let c = if idx + 1 == region.len() { -total } else { random_complex(rng) };
        total += c;
        op.add_term(Monomial::new(&j, &[k]).expect("sites below 64"), c);
    }
    op
}

fn sample_piece(region: &[usize], flavor: SampleFlavor, rng: &mut ChaCha8Rng) -> Operator {
    match flavor {
        SampleFlavor::Generic => match rng.random_range(0..4) {
            0 => {
                let cr = random_subset(region, 0, rng);
                let an = random_subset(region, 2, rng);
                Operator::from_term(Monomial::new(&cr, &an).expect("sites below 64"), random_complex(rng))
            }
            1 => zero_sum_group(region, rng),
            2 => {
                let (i, j) = two_distinct(region, rng);
                Operator::tau(i, j) * random_complex(rng)
            }
            _ => {
                let (j, k) = two_distinct(region, rng);
                let c = random_complex(rng);
                (&Operator::create(j) * &Operator::annihilate(k) - Operator::number(j)) * c
            }
        },
        SampleFlavor::Hermitian => match rng.random_range(0..3) {
            0 => {
                let cr = random_subset(region, 2, rng);
                let an = random_subset(region, 2, rng);
                let op = Operator::from_term(Monomial::new(&cr, &an).expect("sites below 64"), random_complex(rng));
                op.clone() + adjoint(&op)
            }
            1 => {
                let op = zero_sum_group(region, rng);
                op.clone() + adjoint(&op)
            }
            _ => {
                let (j, k) = two_distinct(region, rng);
                let hop = &Operator::create(j) * &Operator::annihilate(k);
                let t: f64 = rng.random_range(-1.0..1.0);
                (hop.clone() + adjoint(&hop) - Operator::number(j) - Operator::number(k)) * t
            }
        },
        SampleFlavor::DickePreserving => {
            let (j, k) = two_distinct(region, rng);
            let mut a = Operator::identity() * random_complex(rng);
            for _ in 0..rng.random_range(1..=2) {
                a.add_term(random_monomial(region, rng), random_complex(rng));
            }
            &a * &swap_minus_identity(j, k)
        }
        SampleFlavor::HermitianDickePreserving => {
            let (j, k) = two_distinct(region, rng);
            let m = Operator::from_term(random_monomial(region, rng), random_complex(rng));
            let b = m.clone() + adjoint(&m);
            let p = swap_minus_identity(j, k);
            &(&p * &b) * &p
        }
    }
}

fn check_sampling_inputs(g: &SiteGraph, r_max: usize) -> Result<()> {
    if r_max < 2 {
        return Err(Error::InvalidInput(format!("r_max must be at least 2, got {r_max}")));
    }
    if g.n_sites() < 2 || !g.is_connected() {
        return Err(Error::InvalidGraph("sampling needs a connected graph of at least two sites".into()));
    }
    Ok(())
}

/// A random operator of diameter at most `r_max` killing `|W⟩` and `|0̄⟩`.
pub fn sample_annihilator(g: &SiteGraph, r_max: usize, rng_seed: u64) -> Result<Operator> {
    sample_annihilator_with(g, r_max, rng_seed, SampleFlavor::Generic)
}

pub fn sample_annihilator_with(g: &SiteGraph, r_max: usize, rng_seed: u64, flavor: SampleFlavor) -> Result<Operator> {
    check_sampling_inputs(g, r_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let dist = g.distance_matrix();
    let region = sample_region(&dist, r_max, &mut rng);
    Ok(sample_piece(&region, flavor, &mut rng))
}

/// `Ω·I + ω·Σn + Σ` of `n_terms` random annihilators.
pub fn sample_parent(
    g: &SiteGraph,
    r_max: usize,
    n_terms: usize,
    omega0: Complex64,
    omega: Complex64,
    rng_seed: u64,
) -> Result<Operator> {
    sample_parent_with(g, r_max, n_terms, omega0, omega, rng_seed, SampleFlavor::Generic)
}

pub fn sample_parent_with(
    g: &SiteGraph,
    r_max: usize,
    n_terms: usize,
    omega0: Complex64,
    omega: Complex64,
    rng_seed: u64,
    flavor: SampleFlavor,
) -> Result<Operator> {
    check_sampling_inputs(g, r_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let dist = g.distance_matrix();
    let mut h = Operator::identity() * omega0 + Operator::total_number(g.n_sites()) * omega;
    for _ in 0..n_terms {
        let region = sample_region(&dist, r_max, &mut rng);
        h += sample_piece(&region, flavor, &mut rng);
    }
    Ok(h)
}

/// `p` particles pairwise at distance `≥ r_max`, placed greedily.
pub fn witness_state(g: &SiteGraph, r_max: usize, p: usize) -> Result<u64> {
    if p == 0 {
        return Ok(0);
    }
    let centers = g.separated_sites(r_max);
    if centers.len() < p {
        return Err(Error::PackingInsufficient {
            requested: p,
            achieved: centers.len(),
        });
    }
    mask_of(&centers[..p])
}
