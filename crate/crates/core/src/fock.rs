//! Sparse states over occupation bitstrings, Dicke and quasiparticle tower
//! states, Schmidt coefficients and entanglement entropies.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{Operator, PRUNE_THRESHOLD};
use crate::tower::TowerSpec;

/// Largest bitstring register.
pub const MAX_SITES: usize = 63;
/// Largest subsystem for reduced density matrices.
pub const DEFAULT_SUBSET_CAP: usize = 12;
/// Residual below which a state counts as an eigenstate.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// State vector stored as a map from occupation bitstring (bit `i` is the
/// occupation of site `i`) to amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    n_sites: usize,
    amplitudes: BTreeMap<u64, Complex64>,
}

impl SparseState {
    pub fn zero(n_sites: usize) -> Self {
        assert!(n_sites <= MAX_SITES, "register of {n_sites} sites exceeds {MAX_SITES}");
        Self {
            n_sites,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn basis(n_sites: usize, bits: u64) -> Self {
        let mut s = Self::zero(n_sites);
        s.add_amplitude(bits, Complex64::new(1.0, 0.0));
        s
    }

    /// `|0̄⟩`
    pub fn vacuum(n_sites: usize) -> Self {
        Self::basis(n_sites, 0)
    }

    pub fn from_amplitudes<I: IntoIterator<Item = (u64, Complex64)>>(n_sites: usize, amps: I) -> Self {
        let mut s = Self::zero(n_sites);
        for (b, a) in amps {
            s.add_amplitude(b, a);
        }
        s
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn add_amplitude(&mut self, bits: u64, amp: Complex64) {
        debug_assert!(self.n_sites == 64 || bits >> self.n_sites == 0);
        let entry = self.amplitudes.entry(bits).or_insert(ZERO);
        *entry += amp;
        if *entry == ZERO {
            self.amplitudes.remove(&bits);
        }
    }

    pub fn amplitude(&self, bits: u64) -> Complex64 {
        self.amplitudes.get(&bits).copied().unwrap_or(ZERO)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amplitudes.iter().map(|(b, a)| (*b, *a))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.values().fold(0.0, |acc, a| acc + a.norm_sqr()).sqrt()
    }

    /// Unit-norm copy; the zero state is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_amplitudes(self.n_sites, self.amplitudes().map(|(b, a)| (b, a * factor)))
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &SparseState) -> Complex64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ZERO;
        for (b, a) in small.amplitudes() {
            let bamp = large.amplitude(b);
            acc += if flip { bamp.conj() * a } else { a.conj() * bamp };
        }
        acc
    }

    /// `self + factor · other`
    pub fn add_scaled(&self, other: &SparseState, factor: Complex64) -> Self {
        let mut out = self.clone();
        for (b, a) in other.amplitudes() {
            out.add_amplitude(b, a * factor);
        }
        out
    }

    /// `‖self − other‖`
    pub fn distance(&self, other: &SparseState) -> f64 {
        self.add_scaled(other, Complex64::new(-1.0, 0.0)).norm()
    }

    /// Removes amplitudes with magnitude below `threshold`.
    pub fn prune(mut self, threshold: f64) -> Self {
        self.amplitudes.retain(|_, a| a.norm() >= threshold);
        self
    }
}

/// Exact sparse action of `a` on `psi`.
pub fn apply(a: &Operator, psi: &SparseState) -> Result<SparseState> {
    let n = psi.n_sites();
    if let Some(&bad) = a.support().iter().find(|&&s| s >= n) {
        return Err(Error::SiteOutOfGraph { site: bad, n_sites: n });
    }
    let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
    for (bits, amp) in psi.amplitudes() {
        for (out, c) in a.act_on_basis(bits) {
            *acc.entry(out).or_insert(ZERO) += c * amp;
        }
    }
    let scale = psi.norm() * a.max_abs_coeff();
    acc.retain(|_, v| v.norm() > PRUNE_THRESHOLD * scale);
    Ok(SparseState {
        n_sites: n,
        amplitudes: acc,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `n`-bit strings of Hamming weight `p`, ascending.
pub(crate) fn weight_strings(n: usize, p: usize) -> Vec<u64> {
    if p > n {
        return Vec::new();
    }
    if p == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(n, p) as usize);
    let mut v: u64 = (1u64 << p) - 1;
    let limit: u64 = if n == 64 { u64::MAX } else { 1u64 << n };
    while v < limit {
        out.push(v);
        // next permutation of bits
        let t = v | (v - 1);
        let next = (t.wrapping_add(1)) | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1));
        if next <= v {
            break;
        }
        v = next;
    }
    out
}

/// Normalized Dicke state `|W^p⟩` on `n_sites` sites.
pub fn dicke_state(n_sites: usize, p: usize) -> Result<SparseState> {
    if p > n_sites || n_sites > MAX_SITES {
        return Err(Error::InvalidParticleNumber { p, n_sites });
    }
    let strings = weight_strings(n_sites, p);
    let amp = Complex64::new(1.0 / (strings.len() as f64).sqrt(), 0.0);
    Ok(SparseState::from_amplitudes(
        n_sites,
        strings.into_iter().map(|b| (b, amp)),
    ))
}

/// Normalized `(Q†)^p |0̄⟩`, renormalized after each application.
pub fn tower_state(q: &TowerSpec, p: usize, n_sites: usize) -> Result<SparseState> {
    let qdag = q.to_operator();
    let mut psi = SparseState::vacuum(n_sites);
    for step in 1..=p {
        psi = apply(&qdag, &psi)?;
        let norm = psi.norm();
        if psi.is_empty() || norm < 1e-300 {
            return Err(Error::TowerTruncated {
                requested: p,
                max_p: step - 1,
            });
        }
        psi = psi.scale(Complex64::new(1.0 / norm, 0.0));
    }
    Ok(psi)
}

/// Largest `p` with `(Q†)^p |0̄⟩ ≠ 0`.
pub fn tower_length(q: &TowerSpec, n_sites: usize) -> Result<usize> {
    match tower_state(q, n_sites + 1, n_sites) {
        Err(Error::TowerTruncated { max_p, .. }) => Ok(max_p),
        Err(e) => Err(e),
        Ok(_) => Ok(n_sites + 1),
    }
}

/// Schmidt coefficient `f_l = √(C(|X|,l) C(N−|X|,p−l) / C(N,p))` of `|W^p⟩`
/// across a cut with `x_size` sites on one side.
pub fn schmidt_coeff(n_sites: usize, x_size: usize, p: usize, l: usize) -> Result<f64> {
    if x_size > n_sites || p > n_sites || l > x_size.min(p) || p - l > n_sites - x_size {
        return Err(Error::InvalidParticleNumber { p, n_sites });
    }
    let num = binomial(x_size, l) as f64 * binomial(n_sites - x_size, p - l) as f64;
    Ok((num / binomial(n_sites, p) as f64).sqrt())
}

fn extract_bits(bits: u64, sites: &[usize]) -> usize {
    sites
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &s)| acc | (((bits >> s) & 1) as usize) << t)
}

/// Reduced density matrix on `subset`, indexed by the subset-local bitstring.
pub fn reduced_density(psi: &SparseState, subset: &[usize]) -> Result<DMatrix<Complex64>> {
    if subset.len() > DEFAULT_SUBSET_CAP {
        return Err(Error::SubsetTooLarge {
            size: subset.len(),
            cap: DEFAULT_SUBSET_CAP,
        });
    }
    if let Some(&bad) = subset.iter().find(|&&s| s >= psi.n_sites()) {
        return Err(Error::SiteOutOfGraph {
            site: bad,
            n_sites: psi.n_sites(),
        });
    }
    let mask = subset.iter().fold(0u64, |m, &s| m | 1u64 << s);
    let mut groups: BTreeMap<u64, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (bits, amp) in psi.amplitudes() {
        groups
            .entry(bits & !mask)
            .or_default()
            .push((extract_bits(bits, subset), amp));
    }
    let dim = 1usize << subset.len();
    let mut rho = DMatrix::from_element(dim, dim, ZERO);
    for entries in groups.values() {
        for &(a, va) in entries {
            for &(b, vb) in entries {
                rho[(a, b)] += va * vb.conj();
            }
        }
    }
    Ok(rho)
}

/// Eigenvalues of the reduced density matrix, descending.
pub fn reduced_spectrum(psi: &SparseState, subset: &[usize]) -> Result<Vec<f64>> {
    let rho = reduced_density(psi, subset)?;
    let mut vals: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Von Neumann entropy (nats) of `psi` restricted to `subset`.
pub fn reduced_entropy(psi: &SparseState, subset: &[usize]) -> Result<f64> {
    Ok(reduced_spectrum(psi, subset)?
        .into_iter()
        .filter(|&l| l > 1e-14)
        .fold(0.0, |acc, l| acc - l * l.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    pub eigenvalue: Complex64,
    pub residual: f64,
}

impl EigenCheck {
    pub fn is_eigenstate(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

/// Rayleigh quotient `⟨ψ|H|ψ⟩/⟨ψ|ψ⟩` and the residual `‖Hψ − Eψ‖`.
pub fn eigen_check(h: &Operator, psi: &SparseState) -> Result<EigenCheck> {
    let hpsi = apply(h, psi)?;
    let norm_sqr = psi.inner(psi).re;
    let eigenvalue = if norm_sqr > 0.0 {
        psi.inner(&hpsi) / norm_sqr
    } else {
        ZERO
    };
    let residual = hpsi.add_scaled(psi, -eigenvalue).norm();
    Ok(EigenCheck {
        eigenvalue,
        residual,
    })
}

#[derive(Serialize, Deserialize)]
struct AmplitudeJson {
    bits: String,
    coeff: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n_sites: usize,
    amplitudes: Vec<AmplitudeJson>,
}

pub fn bits_to_string(bits: u64, n_sites: usize) -> String {
    (0..n_sites)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn bits_from_string(s: &str) -> Result<u64> {
    let mut bits = 0u64;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' if i < 64 => bits |= 1u64 << i,
            _ => return Err(Error::InvalidInput(format!("bad occupation string {s:?}"))),
        }
    }
    Ok(bits)
}

impl Serialize for SparseState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            n_sites: self.n_sites,
            amplitudes: self
                .amplitudes()
                .map(|(b, a)| AmplitudeJson {
                    bits: bits_to_string(b, self.n_sites),
                    coeff: [a.re, a.im],
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = StateJson::deserialize(deserializer)?;
        if raw.n_sites > MAX_SITES {
            return Err(serde::de::Error::custom("register exceeds 63 sites"));
        }
        let mut s = SparseState::zero(raw.n_sites);
        for a in raw.amplitudes {
            if a.bits.len() != raw.n_sites {
                return Err(serde::de::Error::custom("bitstring length differs from n_sites"));
            }
            let bits = bits_from_string(&a.bits).map_err(serde::de::Error::custom)?;
            s.add_amplitude(bits, Complex64::new(a.coeff[0], a.coeff[1]));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{to_matrix, Monomial};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn apply_examples() {
        let out = apply(&Operator::create(0), &SparseState::vacuum(3)).unwrap();
        assert_eq!(out, SparseState::basis(3, 0b001));
        let out = apply(&Operator::create(0), &SparseState::basis(3, 0b001)).unwrap();
        assert!(out.is_empty());
        let w2 = dicke_state(5, 2).unwrap();
        let out = apply(&Operator::total_number(5), &w2).unwrap();
        assert!(out.distance(&w2.scale(c(2.0))) < 1e-14);
        assert!(apply(&Operator::number(4), &SparseState::vacuum(3)).is_err());
    }

    #[test]
    fn apply_agrees_with_dense() {
        let op = Operator::from_terms([
            (Monomial::new(&[0, 2], &[1]).unwrap(), Complex64::new(0.3, -1.0)),
            (Monomial::new(&[1], &[1, 2]).unwrap(), c(2.0)),
            (Monomial::new(&[], &[0]).unwrap(), Complex64::new(0.0, 1.5)),
        ]);
        let psi = SparseState::from_amplitudes(
            3,
            (0..8u64).map(|b| (b, Complex64::new(b as f64 * 0.1, 1.0 - b as f64 * 0.05))),
        );
        let sparse = apply(&op, &psi).unwrap();
        let m = to_matrix(&op, 3).unwrap();
        for row in 0..8u64 {
            let dense: Complex64 = (0..8u64).map(|col| m[(row as usize, col as usize)] * psi.amplitude(col)).sum();
            assert!((dense - sparse.amplitude(row)).norm() < 1e-12);
        }
    }

    #[test]
    fn dicke_examples() {
        let w = dicke_state(3, 1).unwrap();
        let amp = 1.0 / 3f64.sqrt();
        for b in [0b001, 0b010, 0b100] {
            assert!((w.amplitude(b).re - amp).abs() < 1e-15);
        }
        assert_eq!(w.len(), 3);
        assert_eq!(dicke_state(2, 2).unwrap(), SparseState::basis(2, 0b11));
        let w42 = dicke_state(4, 2).unwrap();
        assert_eq!(w42.len(), 6);
        // oracle: (S†)² |0̄⟩ normalized
        let sdag = Operator::raising(4);
        let raw = apply(&sdag, &apply(&sdag, &SparseState::vacuum(4)).unwrap()).unwrap();
        assert!(raw.normalized().distance(&w42) < 1e-14);
        assert!(dicke_state(3, 4).is_err());
    }

    #[test]
    fn weight_strings_enumerate_binomially() {
        for n in 0..10 {
            for p in 0..=n {
                let s = weight_strings(n, p);
                assert_eq!(s.len() as u128, binomial(n, p));
                assert!(s.iter().all(|b| b.count_ones() as usize == p && b >> n == 0));
                assert!(s.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn schmidt_examples() {
        assert!((schmidt_coeff(4, 2, 2, 1).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((schmidt_coeff(4, 2, 2, 0).unwrap() - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        for (n, x, p) in [(10, 3, 4), (7, 7, 2), (9, 1, 0)] {
            let total: f64 = (0..=x.min(p))
                .filter(|&l| p - l <= n - x)
                .map(|l| schmidt_coeff(n, x, p, l).unwrap().powi(2))
                .sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
        assert!(schmidt_coeff(4, 2, 2, 3).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!(reduced_entropy(&SparseState::vacuum(6), &[0, 1, 2]).unwrap().abs() < 1e-14);
        let w = dicke_state(4, 1).unwrap();
        assert!((reduced_entropy(&w, &[0, 1]).unwrap() - 2f64.ln()).abs() < 1e-12);
        let bell = SparseState::from_amplitudes(2, [(0b00, c(0.5f64.sqrt())), (0b11, c(0.5f64.sqrt()))]);
        assert!((reduced_entropy(&bell, &[0]).unwrap() - 2f64.ln()).abs() < 1e-12);
        let big: Vec<usize> = (0..13).collect();
        assert!(matches!(
            reduced_entropy(&SparseState::vacuum(14), &big),
            Err(Error::SubsetTooLarge { .. })
        ));
    }

    #[test]
    fn eigen_examples() {
        let n = 6;
        let w3 = dicke_state(n, 3).unwrap();
        let chk = eigen_check(&Operator::total_number(n), &w3).unwrap();
        assert!((chk.eigenvalue - c(3.0)).norm() < 1e-14 && chk.residual < 1e-14);

        let mut hop = Operator::zero();
        for i in 0..n {
            let j = (i + 1) % n;
            hop += Operator::from_term(Monomial::new(&[i], &[j]).unwrap(), c(1.0));
            hop += Operator::from_term(Monomial::new(&[j], &[i]).unwrap(), c(1.0));
        }
        let chk = eigen_check(&hop, &dicke_state(n, 1).unwrap()).unwrap();
        assert!((chk.eigenvalue - c(2.0)).norm() < 1e-12 && chk.residual < 1e-12);
        let chk = eigen_check(&hop, &dicke_state(n, 2).unwrap()).unwrap();
        assert!(chk.residual > 1e-3);
    }

    #[test]
    fn json_roundtrip() {
        let w = dicke_state(3, 1).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains(r#""bits":"100""#));
        let back: SparseState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }
}
