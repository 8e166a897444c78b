//! Numerical checks of tower spectra: equal spacing, annihilation induction,
//! finite-fraction annihilation, entanglement freezing and system-size
//! hypotheses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::witness_state;
use crate::error::{Error, Result};
use crate::fock::{apply, eigen_check, reduced_entropy, tower_length, tower_state, SparseState, EIGEN_TOLERANCE};
use crate::graph::{ball_bound, SiteGraph};
use crate::ops::{locality_metrics, mask_of, sites_of, Operator};
use crate::tower::{check_classes, TowerClassReport, TowerSpec};

/// Default bound on `max_p |E_p − (Ω + ωp)|`.
pub const SPACING_TOLERANCE: f64 = 1e-9;
/// Bound on eigenvalues and overlaps that must vanish.
pub const ZERO_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerLevel {
    pub p: usize,
    pub energy: Complex64,
    pub residual: f64,
    pub is_eigenstate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpacingVerdict {
    EquallySpaced,
    NotEigenstates { ps: Vec<usize> },
    Unequal { deviation: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    pub levels: Vec<TowerLevel>,
    /// `E_0`
    pub omega0: Complex64,
    /// `E_1 − E_0`
    pub omega: Complex64,
    pub max_deviation: f64,
    pub eigen_tolerance: f64,
    pub spacing_tolerance: f64,
    pub verdict: SpacingVerdict,
}

impl SpacingReport {
    fn from_levels(levels: Vec<TowerLevel>, eigen_tolerance: f64, spacing_tolerance: f64) -> Self {
        let omega0 = levels.first().map_or(ZERO, |l| l.energy);
        let omega = levels.get(1).map_or(ZERO, |l| l.energy - omega0);
        let max_deviation = levels
            .iter()
            .map(|l| (l.energy - (omega0 + omega * l.p as f64)).norm())
            .fold(0.0, f64::max);
        let failing: Vec<usize> = levels.iter().filter(|l| !l.is_eigenstate).map(|l| l.p).collect();
        let verdict = if !failing.is_empty() {
            SpacingVerdict::NotEigenstates { ps: failing }
        } else if max_deviation >= spacing_tolerance {
            SpacingVerdict::Unequal {
                deviation: max_deviation,
            }
        } else {
            SpacingVerdict::EquallySpaced
        };
        Self {
            levels,
            omega0,
            omega,
            max_deviation,
            eigen_tolerance,
            spacing_tolerance,
            verdict,
        }
    }

    pub fn all_eigenstates(&self) -> bool {
        self.levels.iter().all(|l| l.is_eigenstate)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpacingError {
    #[error("{source}")]
    Truncated {
        source: Error,
        partial: Box<SpacingReport>,
    },
    #[error(transparent)]
    Other(#[from] Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacingOptions {
    pub eigen_tolerance: f64,
    pub spacing_tolerance: f64,
}

impl Default for SpacingOptions {
    fn default() -> Self {
        Self {
            eigen_tolerance: EIGEN_TOLERANCE,
            spacing_tolerance: SPACING_TOLERANCE,
        }
    }
}

pub fn tower_energies(h: &Operator, q: &TowerSpec, p_max: usize) -> std::result::Result<SpacingReport, SpacingError> {
    tower_energies_with(h, q, p_max, SpacingOptions::default())
}

/// Energies of `|Q^p⟩` for `p = 0..=p_max` with the equal-spacing verdict.
pub fn tower_energies_with(
    h: &Operator,
    q: &TowerSpec,
    p_max: usize,
    opts: SpacingOptions,
) -> std::result::Result<SpacingReport, SpacingError> {
    if opts.eigen_tolerance <= 0.0 || opts.spacing_tolerance <= 0.0 {
        return Err(Error::InvalidInput("tolerances must be positive".into()).into());
    }
    let n = q.n_sites();
    let qdag = q.to_operator();
    let mut psi = SparseState::vacuum(n);
    let mut levels = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        if p > 0 {
            psi = apply(&qdag, &psi)?;
            let norm = psi.norm();
            if psi.is_empty() || norm < 1e-300 {
                let partial = SpacingReport::from_levels(levels, opts.eigen_tolerance, opts.spacing_tolerance);
                return Err(SpacingError::Truncated {
                    source: Error::TowerTruncated {
                        requested: p_max,
                        max_p: p - 1,
                    },
                    partial: Box::new(partial),
                });
            }
            psi = psi.scale(Complex64::new(1.0 / norm, 0.0));
        }
        let check = eigen_check(h, &psi)?;
        levels.push(TowerLevel {
            p,
            energy: check.eigenvalue,
            residual: check.residual,
            is_eigenstate: check.is_eigenstate(opts.eigen_tolerance),
        });
    }
    Ok(SpacingReport::from_levels(levels, opts.eigen_tolerance, opts.spacing_tolerance))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelResidual {
    pub p: usize,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InductionVerdict {
    /// Hypothesis and conclusion both hold.
    Confirmed,
    /// Some low level is not annihilated; nothing is claimed.
    HypothesisFailed,
    /// Hypothesis holds but a higher level is not annihilated.
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductionReport {
    pub k: usize,
    pub k_local: usize,
    /// Levels `p ≤ hypothesis_depth` form the hypothesis.
    pub hypothesis_depth: usize,
    pub tower_length: usize,
    pub tolerance: f64,
    pub hypothesis: Vec<LevelResidual>,
    pub conclusion: Vec<LevelResidual>,
    pub failed_hypothesis: Vec<usize>,
    pub failed_conclusion: Vec<usize>,
    pub verdict: InductionVerdict,
}

/// Checks `H|Q^p⟩ = 0` for `p ≤ 2k` (`2k+1` for towers other than Dicke)
/// and then for every `p` up to the end of the tower.
pub fn annihilation_induction_check(h: &Operator, q: &TowerSpec, k: usize) -> Result<InductionReport> {
    let k_local = h.k_local();
    if k_local > k {
        return Err(Error::NotKLocal {
            expected: k,
            actual: k_local,
        });
    }
    let n = q.n_sites();
    let hypothesis_depth = if q.is_dicke() { 2 * k } else { 2 * k + 1 };
    let length = tower_length(q, n)?.min(n);
    let mut hypothesis = Vec::new();
    let mut conclusion = Vec::new();
    for p in 0..=length {
        let psi = tower_state(q, p, n)?;
        let residual = apply(h, &psi)?.norm();
        let entry = LevelResidual { p, residual };
        if p <= hypothesis_depth {
            hypothesis.push(entry);
        }
        conclusion.push(entry);
    }
    let failed = |v: &[LevelResidual]| -> Vec<usize> {
        v.iter().filter(|l| l.residual >= ZERO_TOLERANCE).map(|l| l.p).collect()
    };
    let failed_hypothesis = failed(&hypothesis);
    let failed_conclusion = failed(&conclusion);
    let verdict = if !failed_hypothesis.is_empty() {
        InductionVerdict::HypothesisFailed
    } else if failed_conclusion.is_empty() {
        InductionVerdict::Confirmed
    } else {
        InductionVerdict::Violation
    };
    Ok(InductionReport {
        k,
        k_local,
        hypothesis_depth,
        tower_length: length,
        tolerance: ZERO_TOLERANCE,
        hypothesis,
        conclusion,
        failed_hypothesis,
        failed_conclusion,
        verdict,
    })
}

/// Largest `p` guaranteed by the finite-fraction bounds: `N/R_max` on rings
/// and open chains, `N/(Δ^{2R_max}+1)` for the Dicke tower on other graphs,
/// `N/β(R_max)` for towers in the coverage class.
pub fn finite_fraction_bound(q: &TowerSpec, g: &SiteGraph, r_max: usize) -> Result<usize> {
    let n = g.n_sites();
    if r_max == 0 {
        return Ok(0);
    }
    if q.is_dicke() {
        let chain_like = g.max_degree() <= 2 && g.is_connected() && g.edges().len() + 1 >= n;
        if chain_like {
            return Ok(n / r_max);
        }
        return Ok((n as u128 / ball_bound(g.max_degree(), 2 * r_max)) as usize);
    }
    let report = check_classes(q, g)?;
    if !report.q2.satisfied {
        return Ok(0);
    }
    Ok(report.beta(r_max).map_or(0, |beta| (n as u128 / beta) as usize))
}

/// `p` tower terms whose sites are pairwise at graph distance
/// `≥ r_max + d1 − 1`, chosen greedily in term order; Dicke towers use
/// [`witness_state`].
pub fn tower_witness(q: &TowerSpec, g: &SiteGraph, r_max: usize, p: usize) -> Result<u64> {
    if q.is_dicke() {
        return witness_state(g, r_max, p);
    }
    if p == 0 {
        return Ok(0);
    }
    let dist = g.distance_matrix();
    let mut d1 = 1;
    for (sites, _) in q.terms() {
        d1 = d1.max(g.diameter_of(&sites)?);
    }
    let sep = r_max + d1 - 1;
    let mut picked: Vec<Vec<usize>> = Vec::new();
    for (sites, _) in q.terms() {
        let far = picked.iter().all(|other| {
            sites
                .iter()
                .all(|&a| other.iter().all(|&b| dist[a][b].is_none_or(|d| d >= sep)))
        });
        if far {
            picked.push(sites);
            if picked.len() == p {
                break;
            }
        }
    }
    if picked.len() < p {
        return Err(Error::PackingInsufficient {
            requested: p,
            achieved: picked.len(),
        });
    }
    mask_of(&picked.concat())
}

/// Number of witness placements available.
fn witness_capacity(q: &TowerSpec, g: &SiteGraph, r_max: usize) -> usize {
    let mut p = 0;
    while p < g.n_sites() && tower_witness(q, g, r_max, p + 1).is_ok() {
        p += 1;
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteFractionLevel {
    pub p: usize,
    pub witness: String,
    pub witness_overlap: Complex64,
    pub witness_norm_overlap: Complex64,
    pub eigenvalue: Complex64,
    pub residual: f64,
    pub is_eigenstate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteFractionReport {
    pub r_max: usize,
    pub theorem_bound: usize,
    pub checked_up_to: usize,
    pub precondition_holds: bool,
    pub precondition_failures: Vec<String>,
    pub levels: Vec<FiniteFractionLevel>,
    /// Eigenstate levels with nonzero eigenvalue or nonvanishing witness
    /// overlap.
    pub violations: Vec<usize>,
    pub passed: bool,
}

/// For an annihilator sum `H′`, checks `E′_p = 0` on every eigenstate level
/// `p` admitting a witness configuration, and that the witness overlap
/// `⟨w|H′|Q^p⟩` vanishes.
pub fn finite_fraction_check(
    annihilator_sum: &Operator,
    q: &TowerSpec,
    g: &SiteGraph,
    r_max: usize,
) -> Result<FiniteFractionReport> {
    let n = g.n_sites();
    if q.n_sites() != n {
        return Err(Error::DimensionMismatch(format!("tower on {} sites, graph on {n}", q.n_sites())));
    }
    let mut precondition_failures = Vec::new();
    let range = locality_metrics(annihilator_sum, g)?.range;
    if range > r_max {
        precondition_failures.push(format!("operator range {range} exceeds {r_max}"));
    }
    let scale = annihilator_sum.l1_norm().max(1.0);
    for (label, state) in [("vacuum", SparseState::vacuum(n)), ("one quasiparticle", tower_state(q, 1, n)?)] {
        let r = apply(annihilator_sum, &state)?.norm();
        if r >= ZERO_TOLERANCE * scale {
            precondition_failures.push(format!("{label} residual {r:e}"));
        }
    }
    let theorem_bound = finite_fraction_bound(q, g, r_max)?;
    let length = tower_length(q, n)?.min(n);
    let checked_up_to = theorem_bound.max(witness_capacity(q, g, r_max)).min(length);
    let mut levels = Vec::new();
    let mut violations = Vec::new();
    for p in 0..=checked_up_to {
        let psi = tower_state(q, p, n)?;
        let w = tower_witness(q, g, r_max, p)?;
        let hpsi = apply(annihilator_sum, &psi)?;
        let check = eigen_check(annihilator_sum, &psi)?;
        let overlap = hpsi.amplitude(w);
        let is_eigenstate = check.residual < EIGEN_TOLERANCE * scale;
        if overlap.norm() >= ZERO_TOLERANCE * scale || (is_eigenstate && check.eigenvalue.norm() >= ZERO_TOLERANCE * scale) {
            violations.push(p);
        }
        levels.push(FiniteFractionLevel {
            p,
            witness: crate::fock::bits_to_string(w, n),
            witness_overlap: overlap,
            witness_norm_overlap: psi.amplitude(w),
            eigenvalue: check.eigenvalue,
            residual: check.residual,
            is_eigenstate,
        });
    }
    let precondition_holds = precondition_failures.is_empty();
    Ok(FiniteFractionReport {
        r_max,
        theorem_bound,
        checked_up_to,
        precondition_holds,
        precondition_failures,
        passed: precondition_holds && violations.is_empty(),
        levels,
        violations,
    })
}

/// Largest deviation of the entanglement entropy of `cut` from its initial
/// value under `Σ_p c_p e^{−iE_p t}|Q^p⟩`.
pub fn freeze_check(
    q: &TowerSpec,
    energies: &[Complex64],
    amplitudes: &[Complex64],
    cut: &[usize],
    times: &[f64],
) -> Result<f64> {
    if energies.len() != amplitudes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} energies for {} amplitudes",
            energies.len(),
            amplitudes.len()
        )));
    }
    if let Some((index, e)) = energies.iter().enumerate().find(|(_, e)| e.im.abs() > 1e-12) {
        return Err(Error::NonRealEnergies { index, imag: e.im });
    }
    let n = q.n_sites();
    let mut states = Vec::new();
    for (p, &c) in amplitudes.iter().enumerate() {
        if c.norm() > 0.0 {
            states.push((tower_state(q, p, n)?, c, energies[p].re));
        }
    }
    let entropy_at = |t: f64| -> Result<f64> {
        let mut psi = SparseState::zero(n);
        for (state, c, e) in &states {
            psi = psi.add_scaled(state, c * Complex64::from_polar(1.0, -e * t));
        }
        reduced_entropy(&psi.normalized(), cut)
    };
    let s0 = entropy_at(0.0)?;
    let mut worst = 0.0f64;
    for &t in times {
        worst = worst.max((entropy_at(t)? - s0).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeCondition {
    pub applicable: bool,
    /// `N` must exceed this value.
    pub threshold: Option<u128>,
    pub satisfied: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreconditionReport {
    pub n_sites: usize,
    pub k: usize,
    pub range: usize,
    pub max_degree: usize,
    /// One-dimensional: `N > 4kR`.
    pub one_dimensional: SizeCondition,
    /// Bounded degree: `N > 2k(Δ^{4R}+1)`.
    pub bounded_degree: SizeCondition,
    /// General towers: `N > β(α(R)) γ(k)`.
    pub general_tower: SizeCondition,
    pub classes: TowerClassReport,
}

/// `4kR`
pub fn one_dimensional_threshold(k: usize, range: usize) -> u128 {
    4 * k as u128 * range as u128
}

/// `2k(Δ^{4R}+1)`
pub fn bounded_degree_threshold(k: usize, range: usize, max_degree: usize) -> u128 {
    (2 * k as u128).saturating_mul(ball_bound(max_degree, 4 * range))
}

pub fn theorem_precondition_check(h: &Operator, g: &SiteGraph, q: &TowerSpec) -> Result<PreconditionReport> {
    let metrics = locality_metrics(h, g)?;
    let (k, range, delta) = (metrics.k_local, metrics.range, g.max_degree());
    let n = g.n_sites() as u128;
    let classes = check_classes(q, g)?;
    let dicke = q.is_dicke();
    let condition = |applicable: bool, threshold: Option<u128>, note: Option<String>| SizeCondition {
        applicable,
        satisfied: applicable && threshold.is_some_and(|t| n > t),
        threshold,
        note,
    };
    let t1 = one_dimensional_threshold(k, range);
    let one_dimensional = condition(
        dicke && delta <= 2,
        Some(t1),
        (!dicke || delta > 2).then(|| "needs the Dicke tower on a chain".to_string()),
    );
    let t2 = bounded_degree_threshold(k, range, delta);
    let bounded_degree = condition(dicke, Some(t2), (!dicke).then(|| "needs the Dicke tower".to_string()));
    let t3 = classes.alpha(range).and_then(|alpha| {
        let alpha = usize::try_from(alpha).unwrap_or(usize::MAX);
        let (d1, d2) = (classes.q2.d1?, classes.q2.d2?);
        let exponent = (2 * d1.saturating_sub(1) + 2 * d2).saturating_add(alpha);
        Some(ball_bound(delta, exponent).saturating_mul(TowerClassReport::gamma(k) as u128))
    });
    let general_applicable = classes.q1.satisfied && classes.q2.satisfied && classes.q3;
    let general_tower = condition(
        general_applicable,
        t3,
        (!general_applicable).then(|| "tower is outside the mapping and coverage classes".to_string()),
    );
    Ok(PreconditionReport {
        n_sites: g.n_sites(),
        k,
        range,
        max_degree: delta,
        one_dimensional,
        bounded_degree,
        general_tower,
        classes,
    })
}

/// Sites of `bits`, for reports.
pub fn occupied_sites(bits: u64) -> Vec<usize> {
    sites_of(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{sample_parent_with, SampleFlavor};
    use crate::models::{heisenberg_field, heisenberg_field_energy, hopping};

    #[test]
    fn heisenberg_field_spacing() {
        for n in [8, 10] {
            let g = SiteGraph::chain(n, true);
            let h = heisenberg_field(&g, 1.0);
            let report = tower_energies(&h, &TowerSpec::dicke(n), n).unwrap();
            assert_eq!(report.verdict, SpacingVerdict::EquallySpaced);
            for l in &report.levels {
                assert!((l.energy - heisenberg_field_energy(&g, 1.0, l.p)).norm() < 1e-10);
            }
        }
        let g = SiteGraph::chain(8, true);
        let report = tower_energies(&heisenberg_field(&g, 1.0), &TowerSpec::dicke(8), 8).unwrap();
        assert!((report.omega0 - 6.0).norm() < 1e-10 && (report.omega + 1.0).norm() < 1e-10);
    }

    #[test]
    fn number_operator_tower() {
        let q = TowerSpec::pair_chain(8, true);
        let h = Operator::identity() * 1.5 + Operator::total_number(8) * 0.5;
        let report = tower_energies(&h, &q, 4).unwrap();
        assert_eq!(report.verdict, SpacingVerdict::EquallySpaced);
        assert!((report.omega - 1.0).norm() < 1e-12);
    }

    #[test]
    fn truncation_keeps_partial_report() {
        let q = TowerSpec::pair_chain(6, true);
        match tower_energies(&Operator::total_number(6), &q, 5) {
            Err(SpacingError::Truncated { source, partial }) => {
                assert_eq!(source, Error::TowerTruncated { requested: 5, max_p: 3 });
                assert_eq!(partial.levels.len(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn raising_is_not_parent() {
        let report = tower_energies(&Operator::raising(6), &TowerSpec::dicke(6), 6).unwrap();
        assert!(matches!(report.verdict, SpacingVerdict::NotEigenstates { .. }));
    }

    #[test]
    fn induction_examples() {
        let q = TowerSpec::dicke(10);
        let zero = annihilation_induction_check(&Operator::zero(), &q, 2).unwrap();
        assert_eq!(zero.verdict, InductionVerdict::Confirmed);
        let h = Operator::total_number(10) - Operator::identity() * 3.0;
        let r = annihilation_induction_check(&h, &q, 1).unwrap();
        assert_eq!(r.verdict, InductionVerdict::HypothesisFailed);
        assert_eq!(r.failed_hypothesis, vec![0, 1, 2]);
        assert!(matches!(
            annihilation_induction_check(&Operator::tau(0, 1), &q, 0),
            Err(Error::NotKLocal { .. })
        ));
    }

    #[test]
    fn finite_fraction_on_chain() {
        let n = 12;
        let g = SiteGraph::chain(n, true);
        let q = TowerSpec::dicke(n);
        let h = hopping(&g) - Operator::total_number(n) * 2.0;
        let report = finite_fraction_check(&h, &q, &g, 2).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.theorem_bound, 6);
        let empty = finite_fraction_check(&Operator::zero(), &q, &g, 3).unwrap();
        assert!(empty.passed);
        assert_eq!(empty.theorem_bound, 4);
        assert!(empty.checked_up_to >= 4);
        let sampled = sample_parent_with(&g, 3, 6, ZERO, ZERO, 5, SampleFlavor::Generic).unwrap();
        assert!(finite_fraction_check(&sampled, &q, &g, 3).unwrap().passed);
    }

    #[test]
    fn freezing() {
        let n = 8;
        let q = TowerSpec::dicke(n);
        let c = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        let energies: Vec<Complex64> = (0..3).map(|p| Complex64::new(6.0 - p as f64, 0.0)).collect();
        let times: Vec<f64> = (0..50).map(|i| 0.4 * i as f64).collect();
        let cut: Vec<usize> = (0..n / 2).collect();
        let dev = freeze_check(&q, &energies, &[c, c, c], &cut, &times).unwrap();
        assert!(dev < 1e-10);
        let single = freeze_check(&q, &energies, &[ZERO, Complex64::new(1.0, 0.0), ZERO], &cut, &times).unwrap();
        assert!(single < 1e-12);
        let bad = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0)];
        assert!(matches!(freeze_check(&q, &bad, &[c, c, c], &cut, &times), Err(Error::NonRealEnergies { index: 1, .. })));
    }

    #[test]
    fn preconditions() {
        let q = TowerSpec::dicke(20);
        let g = SiteGraph::chain(20, true);
        // 2-local, range 2
        let h = &Operator::create(0) * &Operator::annihilate(1) - Operator::number(0);
        let r = theorem_precondition_check(&h, &g, &q).unwrap();
        assert_eq!((r.k, r.range), (2, 2));
        assert_eq!(r.one_dimensional.threshold, Some(16));
        assert!(r.one_dimensional.satisfied);
        assert_eq!(bounded_degree_threshold(2, 1, 2), 68);
        assert!(20 <= bounded_degree_threshold(2, 1, 2));
        assert_eq!(one_dimensional_threshold(1, 1), 4);
        assert!(r.bounded_degree.threshold.unwrap() >= 20 && !r.bounded_degree.satisfied);
    }
}
