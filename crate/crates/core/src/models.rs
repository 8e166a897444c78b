//! Reference Hamiltonians over the edges of a graph.

use crate::graph::SiteGraph;
use crate::ops::{adjoint, Operator};

/// `Σ_{⟨ij⟩} (s†_i s_j + s†_j s_i)`
pub fn hopping(g: &SiteGraph) -> Operator {
    let mut h = Operator::zero();
    for (i, j) in g.edges() {
        let hop = &Operator::create(i) * &Operator::annihilate(j);
        h += hop.clone() + adjoint(&hop);
    }
    h
}

/// `Σ_{⟨ij⟩} S_i·S_j + field Σ_i S^z_i` written with hard-core bosons:
/// `½(s†_i s_j + h.c.) + (n_i − ½)(n_j − ½)` per edge and `½ − n_i` per site.
pub fn heisenberg_field(g: &SiteGraph, field: f64) -> Operator {
    let mut h = Operator::zero();
    let shifted = |i: usize| Operator::number(i) - Operator::identity() * 0.5;
    for (i, j) in g.edges() {
        let hop = &Operator::create(i) * &Operator::annihilate(j);
        h += (hop.clone() + adjoint(&hop)) * 0.5;
        h += &shifted(i) * &shifted(j);
    }
    for i in 0..g.n_sites() {
        h += (Operator::identity() * 0.5 - Operator::number(i)) * field;
    }
    h
}

/// `E_p = N_b/4 + field (N/2 − p)` on Dicke states, with `N_b` the number of edges.
pub fn heisenberg_field_energy(g: &SiteGraph, field: f64, p: usize) -> f64 {
    g.edges().len() as f64 / 4.0 + field * (g.n_sites() as f64 / 2.0 - p as f64)
}
