use num_complex::Complex64;
use proptest::prelude::*;

use scartower::graph::{ball_bound, verify_layers, verify_packing};
use scartower::ops::Monomial;
use scartower::{Operator, SiteGraph};

fn bounded_graph() -> impl Strategy<Value = SiteGraph> {
    (4usize..40, 1usize..=4, prop::collection::vec((0usize..40, 0usize..40), 0..120)).prop_map(|(n, cap, pairs)| {
        let mut degree = vec![0; n];
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (i, j) in pairs {
            let (i, j) = (i % n, j % n);
            let e = (i.min(j), i.max(j));
            if i != j && degree[i] < cap && degree[j] < cap && !edges.contains(&e) {
                degree[i] += 1;
                degree[j] += 1;
                edges.push(e);
            }
        }
        SiteGraph::from_edge_list(n, &edges).unwrap()
    })
}

proptest! {
    #[test]
    fn balls_respect_size_bound(g in bounded_graph(), r in 0usize..4) {
        let bound = ball_bound(g.max_degree(), r);
        for i in 0..g.n_sites() {
            prop_assert!(g.ball(i, r).unwrap().len() as u128 <= bound);
        }
    }

    #[test]
    fn packing_meets_lower_bound(g in bounded_graph(), r in 0usize..3) {
        let centers = g.pack_spheres(r);
        prop_assert!(verify_packing(&g, r, &centers).unwrap());
        let need = (g.n_sites() as u128).div_ceil(ball_bound(g.max_degree(), 2 * r));
        prop_assert!(centers.len() as u128 >= need);
    }

    #[test]
    fn layering_meets_upper_bound(g in bounded_graph(), r in 0usize..3) {
        let layers = g.disjoint_layers(r);
        prop_assert!(verify_layers(&g, r, &layers).unwrap());
        prop_assert!(layers.len() as u128 <= ball_bound(g.max_degree(), 2 * r));
    }
}

#[test]
fn chain_distances() {
    let g = SiteGraph::chain(10, true);
    assert_eq!(g.distance(0, 4).unwrap(), Some(4));
    assert_eq!(g.distance(0, 7).unwrap(), Some(3));
    assert_eq!(g.distance(6, 6).unwrap(), Some(0));
}

#[test]
fn balls() {
    let g = SiteGraph::chain(10, true);
    let mut b = g.ball(0, 1).unwrap();
    b.sort_unstable();
    assert_eq!(b, vec![0, 1, 9]);
    assert_eq!(g.ball(0, 0).unwrap(), vec![0]);
    assert_eq!(SiteGraph::square_grid(4, 4, true).ball(0, 1).unwrap().len(), 5);
}

#[test]
fn diameters() {
    assert_eq!(SiteGraph::chain(10, true).diameter_of(&[3]).unwrap(), 1);
    assert_eq!(SiteGraph::chain(10, false).diameter_of(&[2, 5]).unwrap(), 4);
    assert_eq!(SiteGraph::chain(8, true).diameter_of(&[0, 4]).unwrap(), 5);
    let split = SiteGraph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
    assert!(split.diameter_of(&[0, 3]).is_err());
}

#[test]
fn greedy_packings() {
    let g = SiteGraph::chain(12, true);
    let centers = g.pack_spheres(1);
    assert!(centers.len() >= 3);
    assert!(verify_packing(&g, 1, &centers).unwrap());
    assert_eq!(SiteGraph::chain(10, true).pack_spheres(1), vec![0, 3, 6]);
    assert_eq!(SiteGraph::square_grid(3, 3, false).pack_spheres(0).len(), 9);
}

#[test]
fn greedy_layerings() {
    let layers = SiteGraph::chain(6, true).disjoint_layers(1);
    assert_eq!(layers, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
    let all = SiteGraph::square_grid(3, 3, true).disjoint_layers(0);
    assert_eq!(all.len(), 1);
    let g = SiteGraph::chain(10, true);
    let layers = g.disjoint_layers(2);
    assert!(layers.len() <= 17);
    assert!(verify_layers(&g, 2, &layers).unwrap());
}

#[test]
fn graphs_induced_by_hamiltonians() {
    let hop = |i: usize, j: usize| Operator::from_term(Monomial::new(&[i], &[j]).unwrap(), Complex64::new(1.0, 0.0));
    let h = (0..4).fold(Operator::zero(), |acc, i| acc + hop(i, i + 1));
    assert_eq!(SiteGraph::induced_from_hamiltonian(&h, 5).unwrap().edges(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
    let h = Operator::number(0) + Operator::number(3);
    assert!(SiteGraph::induced_from_hamiltonian(&h, 4).unwrap().edges().is_empty());
    let h = Operator::from_term(Monomial::new(&[0, 2], &[4]).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(SiteGraph::induced_from_hamiltonian(&h, 5).unwrap().edges(), vec![(0, 2), (0, 4), (2, 4)]);
}
