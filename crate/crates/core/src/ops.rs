//! Hard-core boson operators in the normal-ordered monomial basis.
//!
//! A [`Monomial`] is a string `s†_{j1} … s†_{jn} s_{k1} … s_{km}` with all
//! creation operators to the left. Both index sets are stored as 64-bit masks;
//! a site present in both carries the number operator `n = s†s`. Distinct sites
//! commute, so a monomial is a tensor product of one-site factors drawn from
//! `{I, s†, s, n}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SiteGraph;

/// Coefficients smaller than this are dropped after every algebraic operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;
/// Relative tolerance used by [`Operator::approx_eq`].
pub const EQ_TOLERANCE: f64 = 1e-12;
/// Largest register converted to a dense matrix unless a caller overrides it.
pub const DEFAULT_DENSE_CAP: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn mask_of(sites: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    for &s in sites {
        if s >= 64 {
            return Err(Error::SiteIndexTooLarge(s));
        }
        mask |= 1u64 << s;
    }
    Ok(mask)
}

pub(crate) fn sites_of(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Normal-ordered product of creation operators on `creates` and annihilation
/// operators on `annihilates`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    creates: u64,
    annihilates: u64,
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial {
        creates: 0,
        annihilates: 0,
    };

    pub fn new(creates: &[usize], annihilates: &[usize]) -> Result<Self> {
        Ok(Self::from_masks(mask_of(creates)?, mask_of(annihilates)?))
    }

    pub const fn from_masks(creates: u64, annihilates: u64) -> Self {
        Self {
            creates,
            annihilates,
        }
    }

    pub fn creates_mask(&self) -> u64 {
        self.creates
    }

    pub fn annihilates_mask(&self) -> u64 {
        self.annihilates
    }

    pub fn creates(&self) -> Vec<usize> {
        sites_of(self.creates)
    }

    pub fn annihilates(&self) -> Vec<usize> {
        sites_of(self.annihilates)
    }

    pub fn support_mask(&self) -> u64 {
        self.creates | self.annihilates
    }

    pub fn support(&self) -> Vec<usize> {
        sites_of(self.support_mask())
    }

    /// Number of sites the monomial acts on nontrivially.
    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.creates == 0 && self.annihilates == 0
    }

    /// `(n, m)`: number of creation and annihilation factors.
    pub fn degree(&self) -> (usize, usize) {
        (
            self.creates.count_ones() as usize,
            self.annihilates.count_ones() as usize,
        )
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial::from_masks(self.annihilates, self.creates)
    }

    /// Action on an occupation basis state: `Some(new_bits)` or `None` when the
    /// monomial annihilates it.
    #[inline]
    pub fn act(&self, bits: u64) -> Option<u64> {
        if bits & self.annihilates != self.annihilates {
            return None;
        }
        let emptied = bits & !self.annihilates;
        if emptied & self.creates != 0 {
            return None;
        }
        Some(emptied | self.creates)
    }

    /// Product `self · other` expanded back into canonical monomials.
    ///
    /// Per-site rules: `s†s† = ss = s†n = ns = 0`, `s†s = n`, `sn = s`,
    /// `ns† = s†`, `nn = n`, and `ss† = I − n` (the only branching case).
    pub fn product(&self, other: &Monomial) -> Vec<(Monomial, f64)> {
        let (lc, la) = (self.creates, self.annihilates);
        let (rc, ra) = (other.creates, other.annihilates);
        let left = lc | la;
        let right = rc | ra;
        // Sites touched by only one side keep their factor.
        let mut base_c = (lc & !right) | (rc & !left);
        let mut base_a = (la & !right) | (ra & !left);
        let mut branch = 0u64;
        let mut overlap = left & right;
        while overlap != 0 {
            let bit = overlap & overlap.wrapping_neg();
            overlap &= overlap - 1;
            let l = ((lc & bit != 0) as u8) << 1 | (la & bit != 0) as u8;
            let r = ((rc & bit != 0) as u8) << 1 | (ra & bit != 0) as u8;
            // encoding: 0b10 = s†, 0b01 = s, 0b11 = n
            match (l, r) {
                (0b10, 0b01) | (0b11, 0b11) => {
                    base_c |= bit;
                    base_a |= bit;
                }
                (0b01, 0b10) => branch |= bit,
                (0b01, 0b11) => base_a |= bit,
                (0b11, 0b10) => base_c |= bit,
                _ => return Vec::new(),
            }
        }
        if branch == 0 {
            return vec![(Monomial::from_masks(base_c, base_a), 1.0)];
        }
        // Each branching site contributes (I − n); expand over subsets.
        let branch_sites = sites_of(branch);
        let count = branch_sites.len();
        let mut out = Vec::with_capacity(1 << count);
        for subset in 0u64..(1u64 << count) {
            let mut nmask = 0u64;
            for (t, &s) in branch_sites.iter().enumerate() {
                if subset >> t & 1 == 1 {
                    nmask |= 1u64 << s;
                }
            }
            let sign = if subset.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out.push((Monomial::from_masks(base_c | nmask, base_a | nmask), sign));
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for s in sites_of(self.support_mask()) {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let bit = 1u64 << s;
            match (self.creates & bit != 0, self.annihilates & bit != 0) {
                (true, true) => write!(f, "n{s}")?,
                (true, false) => write!(f, "s†{s}")?,
                _ => write!(f, "s{s}")?,
            }
        }
        Ok(())
    }
}

/// Finite linear combination of monomials with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Operator {
    terms: BTreeMap<Monomial, Complex64>,
}

impl Operator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_term(Monomial::IDENTITY, ONE)
    }

    pub fn from_term(m: Monomial, coeff: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_term(m, coeff);
        op
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Complex64)>>(terms: I) -> Self {
        let mut op = Self::zero();
        for (m, c) in terms {
            op.add_term(m, c);
        }
        op
    }

    /// `s†_i`
    pub fn create(site: usize) -> Self {
        Self::from_term(Monomial::from_masks(1u64 << site, 0), ONE)
    }

    /// `s_i`
    pub fn annihilate(site: usize) -> Self {
        Self::from_term(Monomial::from_masks(0, 1u64 << site), ONE)
    }

    /// `n_i = s†_i s_i`
    pub fn number(site: usize) -> Self {
        let b = 1u64 << site;
        Self::from_term(Monomial::from_masks(b, b), ONE)
    }

    /// `s^z_i = ½[s†_i, s_i] = n_i − ½`
    pub fn sz(site: usize) -> Self {
        Self::number(site) - Self::identity().scale(Complex64::new(0.5, 0.0))
    }

    /// Uniform raising operator `S† = Σ_i s†_i` over `0..n_sites`.
    pub fn raising(n_sites: usize) -> Self {
        Self::from_terms((0..n_sites).map(|i| (Monomial::from_masks(1u64 << i, 0), ONE)))
    }

    /// Total particle number `Σ_i n_i` over `0..n_sites`.
    pub fn total_number(n_sites: usize) -> Self {
        Self::from_terms((0..n_sites).map(|i| {
            let b = 1u64 << i;
            (Monomial::from_masks(b, b), ONE)
        }))
    }

    /// `τ_{ij} = s_i − s_j`
    pub fn tau(i: usize, j: usize) -> Self {
        Self::annihilate(i) - Self::annihilate(j)
    }

    pub fn add_term(&mut self, m: Monomial, coeff: Complex64) {
        let entry = self.terms.entry(m).or_insert(ZERO);
        *entry += coeff;
        if entry.norm() < PRUNE_THRESHOLD {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c * factor)))
    }

    /// Drops coefficients whose magnitude is below `threshold`.
    pub fn prune(mut self, threshold: f64) -> Self {
        self.terms.retain(|_, c| c.norm() >= threshold);
        self
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc + c.norm())
    }

    pub fn support_mask(&self) -> u64 {
        self.terms.keys().fold(0, |acc, m| acc | m.support_mask())
    }

    pub fn support(&self) -> Vec<usize> {
        sites_of(self.support_mask())
    }

    /// Largest monomial weight.
    pub fn k_local(&self) -> usize {
        self.terms.keys().map(Monomial::weight).max().unwrap_or(0)
    }

    /// True when every monomial is a pure product of creation operators.
    pub fn is_pure_creation(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.annihilates_mask() == 0 && m.creates_mask() != 0)
    }

    /// Coefficient-wise equality within `tol` relative to the largest
    /// coefficient magnitude of either operand.
    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        self.max_abs_diff(other) <= tol * scale
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, c) in &self.terms {
            worst = worst.max((c - other.coeff(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Sparse action on one occupation basis state.
    pub fn act_on_basis(&self, bits: u64) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.terms
            .iter()
            .filter_map(move |(m, c)| m.act(bits).map(|b| (b, *c)))
    }
}

/// Canonical product `a · b`.
pub fn multiply(a: &Operator, b: &Operator) -> Operator {
    let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let c = ca * cb;
            for (m, sign) in ma.product(mb) {
                *acc.entry(m).or_insert(ZERO) += c * sign;
            }
        }
    }
    acc.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    Operator { terms: acc }
}

/// `[a, b] = ab − ba`
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    multiply(a, b) - multiply(b, a)
}

/// `[[[o, q], q], …, q]` with `depth` nested commutators.
pub fn iterated_commutator(o: &Operator, q: &Operator, depth: usize) -> Operator {
    let mut current = o.clone();
    for _ in 0..depth {
        if current.is_empty() {
            break;
        }
        current = commutator(&current, q);
    }
    current
}

/// Outcome of [`nilpotency_depth`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nilpotency {
    Depth(usize),
    Exceeded,
}

/// Smallest `d ≤ max_depth` for which the `d`-fold iterated commutator of `o`
/// with `qdag` vanishes.
///
/// Vanishing is judged against the scale `‖o‖₁ (2‖q‖₁)^d`, which bounds every
/// coefficient the nested commutator can produce.
pub fn nilpotency_depth(o: &Operator, qdag: &Operator, max_depth: usize) -> Nilpotency {
    let q_scale = 2.0 * qdag.l1_norm();
    let mut scale = o.l1_norm();
    let mut current = o.clone();
    for d in 0..=max_depth {
        if current.max_abs_coeff() <= EQ_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Nilpotency::Depth(d);
        }
        if d == max_depth {
            break;
        }
        current = commutator(&current, qdag);
        scale *= q_scale.max(1.0);
    }
    Nilpotency::Exceeded
}

/// Hermitian conjugate: swaps the index sets and conjugates coefficients.
pub fn adjoint(a: &Operator) -> Operator {
    Operator::from_terms(a.terms.iter().map(|(m, c)| (m.adjoint(), c.conj())))
}

/// Locality summary of an operator relative to a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityMetrics {
    /// 1 + largest pairwise graph distance inside any single monomial.
    pub range: usize,
    /// Largest number of sites touched by a single monomial.
    pub k_local: usize,
    pub support: Vec<usize>,
}

pub fn locality_metrics(a: &Operator, g: &SiteGraph) -> Result<LocalityMetrics> {
    let support = a.support();
    if let Some(&bad) = support.iter().find(|&&s| s >= g.n_sites()) {
        return Err(Error::SiteOutOfGraph {
            site: bad,
            n_sites: g.n_sites(),
        });
    }
    let mut range = if a.is_empty() { 0 } else { 1 };
    for m in a.terms.keys() {
        if m.weight() > 1 {
            range = range.max(g.diameter_of(&m.support())?);
        }
    }
    Ok(LocalityMetrics {
        range,
        k_local: a.k_local(),
        support,
    })
}

/// Dense matrix in the occupation basis (bit `i` of the basis index is the
/// occupation of site `i`), capped at [`DEFAULT_DENSE_CAP`] sites.
pub fn to_matrix(a: &Operator, n_sites: usize) -> Result<DMatrix<Complex64>> {
    to_matrix_with_cap(a, n_sites, DEFAULT_DENSE_CAP)
}

pub fn to_matrix_with_cap(a: &Operator, n_sites: usize, cap: usize) -> Result<DMatrix<Complex64>> {
    if n_sites > cap {
        return Err(Error::DimensionCapExceeded { n_sites, cap });
    }
    if let Some(&bad) = a.support().iter().find(|&&s| s >= n_sites) {
        return Err(Error::SiteOutOfGraph {
            site: bad,
            n_sites,
        });
    }
    let dim = 1usize << n_sites;
    let mut mat = DMatrix::from_element(dim, dim, ZERO);
    for col in 0..dim as u64 {
        for (row, c) in a.act_on_basis(col) {
            mat[(row as usize, col as usize)] += c;
        }
    }
    Ok(mat)
}

impl Add for Operator {
    type Output = Operator;
    fn add(mut self, rhs: Operator) -> Operator {
        self += rhs;
        self
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.clone() + rhs.clone()
    }
}

impl AddAssign for Operator {
    fn add_assign(&mut self, rhs: Operator) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        self + (-rhs)
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.clone() - rhs.clone()
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(mut self) -> Operator {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        multiply(self, rhs)
    }
}

impl Mul<Complex64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: Complex64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)·{}", c.re, c.im, m)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    creates: Vec<usize>,
    annihilates: Vec<usize>,
    coeff: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    terms: Vec<TermJson>,
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    creates: m.creates(),
                    annihilates: m.annihilates(),
                    coeff: [c.re, c.im],
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(deserializer)?;
        let mut op = Operator::zero();
        for t in raw.terms {
            for list in [&t.creates, &t.annihilates] {
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(serde::de::Error::custom(
                        "index arrays must be strictly ascending",
                    ));
                }
            }
            let m = Monomial::new(&t.creates, &t.annihilates).map_err(serde::de::Error::custom)?;
            op.add_term(m, Complex64::new(t.coeff[0], t.coeff[1]));
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn creation_then_annihilation_is_number() {
        let prod = multiply(&Operator::create(1), &Operator::annihilate(1));
        assert_eq!(prod, Operator::number(1));
    }

    #[test]
    fn annihilation_then_creation_is_hole() {
        let prod = multiply(&Operator::annihilate(1), &Operator::create(1));
        let expected = Operator::identity() - Operator::number(1);
        assert_eq!(prod, expected);
        // 2×2 oracle
        let m = to_matrix(&prod, 2).unwrap();
        let s = to_matrix(&Operator::annihilate(1), 2).unwrap();
        let sd = to_matrix(&Operator::create(1), 2).unwrap();
        assert!((m - s * sd).norm() < 1e-14);
    }

    #[test]
    fn double_creation_vanishes() {
        assert!(multiply(&Operator::create(1), &Operator::create(1)).is_empty());
        assert!(multiply(&Operator::annihilate(3), &Operator::annihilate(3)).is_empty());
    }

    #[test]
    fn single_site_table_matches_matrices() {
        let basis = [
            Operator::identity(),
            Operator::create(0),
            Operator::annihilate(0),
            Operator::number(0),
        ];
        for a in &basis {
            for b in &basis {
                let sym = to_matrix(&multiply(a, b), 1).unwrap();
                let dense = to_matrix(a, 1).unwrap() * to_matrix(b, 1).unwrap();
                assert!((sym - dense).norm() < 1e-14, "{a} * {b}");
            }
        }
    }

    #[test]
    fn commutator_of_raising_and_lowering_is_twice_sz() {
        let comm = commutator(&Operator::create(1), &Operator::annihilate(1));
        let expected = Operator::number(1) * 2.0 - Operator::identity();
        assert_eq!(comm, expected);
        assert!(comm.approx_eq(&(Operator::sz(1) * 2.0), EQ_TOLERANCE));
    }

    #[test]
    fn creation_operators_commute() {
        assert!(commutator(&Operator::create(1), &Operator::create(2)).is_empty());
    }

    #[test]
    fn pair_raising_commutator_with_lowering() {
        // [S†(2), s_j] = 2 s†_{j-1} s^z_j + 2 s^z_j s†_{j+1}, open chain of 7, j = 3
        let s2 = Operator::from_terms(
            (0..6).map(|i| (Monomial::from_masks(0b11 << i, 0), ONE)),
        );
        let lhs = commutator(&s2, &Operator::annihilate(3));
        let rhs = multiply(&Operator::create(2), &Operator::sz(3)) * 2.0
            + multiply(&Operator::sz(3), &Operator::create(4)) * 2.0;
        assert!(lhs.approx_eq(&rhs, EQ_TOLERANCE), "{lhs}\nvs\n{rhs}");
    }

    #[test]
    fn iterated_commutator_examples() {
        let sdag = Operator::raising(6);
        assert!(iterated_commutator(&Operator::annihilate(3), &sdag, 3).is_empty());
        let second = iterated_commutator(&Operator::annihilate(3), &sdag, 2);
        assert_eq!(second.len(), 1);
        assert!(second.coeff(&Monomial::from_masks(1 << 3, 0)).norm() > 0.5);
        assert!(iterated_commutator(&Operator::number(3), &sdag, 2).is_empty());
        assert_eq!(
            iterated_commutator(&Operator::number(3), &sdag, 0),
            Operator::number(3)
        );
    }

    #[test]
    fn nilpotency_examples() {
        let sdag = Operator::raising(8);
        let o = multiply(&Operator::annihilate(2), &Operator::annihilate(5));
        assert_eq!(nilpotency_depth(&o, &sdag, 6), Nilpotency::Depth(5));
        assert_eq!(nilpotency_depth(&o, &sdag, 4), Nilpotency::Exceeded);

        let s2 = Operator::from_terms(
            (0..7).map(|i| (Monomial::from_masks(0b11 << i, 0), ONE)),
        );
        assert_eq!(
            nilpotency_depth(&Operator::annihilate(3), &s2, 4),
            Nilpotency::Depth(3)
        );
        assert_eq!(
            nilpotency_depth(&Operator::identity(), &s2, 1),
            Nilpotency::Depth(1)
        );
    }

    #[test]
    fn adjoint_examples() {
        let hop = Operator::from_term(Monomial::new(&[1], &[2]).unwrap(), ONE);
        let expected = Operator::from_term(Monomial::new(&[2], &[1]).unwrap(), ONE);
        assert_eq!(adjoint(&hop), expected);
        assert_eq!(
            adjoint(&Operator::create(1).scale(c(1.0, 1.0))),
            Operator::annihilate(1).scale(c(1.0, -1.0))
        );
        assert_eq!(adjoint(&Operator::number(1)), Operator::number(1));
    }

    #[test]
    fn locality_examples() {
        let chain = SiteGraph::chain(12, false);
        let pair = Operator::from_term(Monomial::new(&[1, 2], &[]).unwrap(), ONE);
        let far = Operator::from_term(Monomial::new(&[1, 10], &[]).unwrap(), ONE);
        let m = locality_metrics(&pair, &chain).unwrap();
        assert_eq!((m.range, m.k_local), (2, 2));
        let m = locality_metrics(&far, &chain).unwrap();
        assert_eq!((m.range, m.k_local), (10, 2));
        let m = locality_metrics(&Operator::number(5), &chain).unwrap();
        assert_eq!((m.range, m.k_local), (1, 1));
        assert_eq!(
            locality_metrics(&Operator::number(20), &chain),
            Err(Error::SiteOutOfGraph {
                site: 20,
                n_sites: 12
            })
        );
    }

    #[test]
    fn matrix_examples() {
        let id = to_matrix(&Operator::identity(), 2).unwrap();
        assert_eq!(id, DMatrix::identity(4, 4));
        let sd = to_matrix(&Operator::create(0), 1).unwrap();
        assert_eq!(sd[(1, 0)], ONE);
        assert_eq!(sd[(0, 0)] + sd[(0, 1)] + sd[(1, 1)], ZERO);
        let n = to_matrix(&Operator::number(0), 1).unwrap();
        assert_eq!(n, DMatrix::from_diagonal(&nalgebra::dvector![ZERO, ONE]));
        assert!(matches!(
            to_matrix(&Operator::identity(), 15),
            Err(Error::DimensionCapExceeded { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let op = Operator::from_term(Monomial::new(&[0, 3], &[3]).unwrap(), c(0.5, -2.0));
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(
            text,
            r#"{"terms":[{"creates":[0,3],"annihilates":[3],"coeff":[0.5,-2.0]}]}"#
        );
        let back: Operator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
        assert!(serde_json::from_str::<Operator>(
            r#"{"terms":[{"creates":[3,0],"annihilates":[],"coeff":[1,0]}]}"#
        )
        .is_err());
    }
}
