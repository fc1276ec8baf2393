//! Property tests for graphs, initial value problem classification and equations.

mod common;

use common::*;
use proptest::prelude::*;
use quadivp::cauchy::{classify_ivp, hypercube_immersion, InitialSubgraph, Verdict};
use quadivp::equations::{Corner, EquationDef};
use quadivp::graph::lattice::{homogeneous_lattice, lattice_path};
use quadivp::graph::zd::{gen_zd_subcomplex, Selector};
use quadivp::graph::QuadGraph;
use quadivp::scalar::{rat, Rational};
use std::collections::BTreeSet;

fn edge_sets(g: &QuadGraph) -> BTreeSet<BTreeSet<[usize; 2]>> {
    g.strips()
        .iter()
        .map(|s| s.transversal.iter().map(|&e| g.edge(e)).map(|[a, b]| [a.min(b), a.max(b)]).collect())
        .collect()
}

fn assert_edge_partition(g: &QuadGraph) -> Result<(), TestCaseError> {
    let mut seen = vec![0usize; g.edge_count()];
    for s in g.strips() {
        let distinct: BTreeSet<_> = s.transversal.iter().copied().collect();
        for e in distinct {
            seen[e] += 1;
            prop_assert_eq!(g.strip_of_edge(e), s.id);
        }
    }
    prop_assert!(seen.iter().all(|&c| c == 1), "edges covered {:?}", seen);
    Ok(())
}

fn plane_section() -> impl Strategy<Value = QuadGraph> {
    (prop::collection::vec(0.2f64..3.0, 3), 1i64..=5, -0.5f64..0.5).prop_filter_map("degenerate section", |(normal, radius, offset)| {
        gen_zd_subcomplex(3, &Selector::Plane { normal, radius, offset: Some(offset) })
            .ok()
            .map(|s| s.graph)
            .filter(|g| g.face_count() > 0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn square_lattice_strips(w in 1usize..=12, h in 1usize..=12) {
        let g = homogeneous_lattice(w, h, rat(3), rat(1)).unwrap();
        prop_assert_eq!(g.strips().len(), w + h);
        prop_assert!(g.strips().iter().all(|s| !s.closed && !s.self_crossing));
        assert_edge_partition(&g)?;
        let b = g.vertex_balance().unwrap();
        prop_assert_eq!(2 * b.faces + b.boundary_vertices + 2, 2 * b.vertices);
    }

    #[test]
    fn sections_are_disks_with_a_strip_partition(g in plane_section()) {
        assert_edge_partition(&g)?;
        prop_assert!(g.faces().iter().all(|f| BTreeSet::from(*f).len() == 4));
        let b = g.vertex_balance().unwrap();
        prop_assert_eq!(2 * b.faces + b.boundary_vertices + 2, 2 * b.vertices);
    }

    #[test]
    fn retracing_strips_is_idempotent(g in plane_section()) {
        let faces = g.faces().iter().map(|f| f.to_vec()).collect();
        let again = QuadGraph::build(g.vertices().to_vec(), faces).unwrap();
        prop_assert_eq!(edge_sets(&again), edge_sets(&g));
    }

    #[test]
    fn staircases_are_correct_and_short_ones_are_not(w in 1usize..=6, h in 1usize..=6, m in moves(6, 6)) {
        let g = homogeneous_lattice(w, h, rat(3), rat(1)).unwrap();
        // keep the first w left moves and h up moves
        let (mut l, mut u) = (0, 0);
        let kept: Vec<bool> = m.into_iter().filter(|&up| if up { u += 1; u <= h } else { l += 1; l <= w }).collect();
        let full = lattice_path(&g, &staircase([w as i64, 0], -1, &kept)).unwrap();
        let verdict = |path: &[usize]| classify_ivp(&g, &InitialSubgraph::from_path(&g, path).unwrap()).unwrap().verdict;
        prop_assert_eq!(verdict(&full), Verdict::Correct);
        let l_path = lattice_path(&g, &axes(w, h)).unwrap();
        prop_assert_eq!(verdict(&l_path), Verdict::Correct);
        // drop the last up step: the top row of faces is never crossed
        let last_up = kept.iter().rposition(|&up| up).unwrap();
        let short = lattice_path(&g, &staircase([w as i64, 0], -1, &kept[..last_up])).unwrap();
        prop_assert_ne!(verdict(&short), Verdict::Correct);
    }

    #[test]
    fn classification_ignores_labels_and_direction(
        w in 1usize..=5,
        h in 1usize..=5,
        m in moves(5, 5),
        cut in 0usize..10,
        perm_seed in prop::collection::vec(any::<u32>(), 36),
    ) {
        let g = homogeneous_lattice(w, h, rat(3), rat(1)).unwrap();
        let (mut l, mut u) = (0, 0);
        let kept: Vec<bool> = m.into_iter().filter(|&up| if up { u += 1; u <= h } else { l += 1; l <= w }).collect();
        let kept = &kept[..cut.min(kept.len()).max(1)];
        let path = lattice_path(&g, &staircase([w as i64, 0], -1, kept)).unwrap();
        let c = classify_ivp(&g, &InitialSubgraph::from_path(&g, &path).unwrap()).unwrap();

        let reversed: Vec<usize> = path.iter().rev().copied().collect();
        let r = classify_ivp(&g, &InitialSubgraph::from_path(&g, &reversed).unwrap()).unwrap();
        prop_assert_eq!(r.verdict, c.verdict);

        let n = g.vertex_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| perm_seed[v % perm_seed.len()].wrapping_mul(v as u32 + 1));
        let mut new_id = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = new;
        }
        let vertices = order.iter().map(|&old| g.vertex(old).clone()).collect();
        let faces = g.faces().iter().map(|f| f.iter().map(|&v| new_id[v]).collect()).collect();
        let relabelled = QuadGraph::build(vertices, faces).unwrap();
        let moved: Vec<usize> = path.iter().map(|&v| new_id[v]).collect();
        let p = classify_ivp(&relabelled, &InitialSubgraph::from_path(&relabelled, &moved).unwrap()).unwrap();
        prop_assert_eq!(p.verdict, c.verdict);
        prop_assert_eq!(p.over_witnesses.len(), c.over_witnesses.len());
        prop_assert_eq!(p.under_witnesses.len(), c.under_witnesses.len());
    }

    #[test]
    fn closed_walks_cross_every_strip_evenly(
        w in 1usize..=6,
        h in 1usize..=6,
        start in any::<prop::sample::Index>(),
        choices in prop::collection::vec(any::<usize>(), 1..20),
    ) {
        let g = homogeneous_lattice(w, h, rat(3), rat(1)).unwrap();
        let walk = closed_walk(&g, start.index(g.vertex_count()), &choices);
        let mut counts = vec![0usize; g.strips().len()];
        for s in walk.windows(2) {
            counts[g.strip_of_edge(g.edge_between(s[0], s[1]).unwrap())] += 1;
        }
        prop_assert!(counts.iter().all(|c| c % 2 == 0), "{:?}", counts);
    }

    #[test]
    fn immersion_flips_one_strip_coordinate_per_edge(w in 1usize..=6, h in 1usize..=6, m in moves(6, 6)) {
        let g = homogeneous_lattice(w, h, rat(3), rat(1)).unwrap();
        let (mut l, mut u) = (0, 0);
        let kept: Vec<bool> = m.into_iter().filter(|&up| if up { u += 1; u <= h } else { l += 1; l <= w }).collect();
        let path = lattice_path(&g, &staircase([w as i64, 0], -1, &kept)).unwrap();
        let imm = hypercube_immersion(&g, &InitialSubgraph::from_path(&g, &path).unwrap()).unwrap();
        for (e, &[a, b]) in g.edges().iter().enumerate() {
            prop_assert_eq!(imm.coord(a).difference(imm.coord(b)), vec![imm.strip_index(g.strip_of_edge(e))]);
        }
        for f in 0..g.face_count() {
            let (s, t) = g.face_strips(f);
            prop_assert_ne!(imm.strip_index(s), imm.strip_index(t));
        }
    }

    #[test]
    fn corner_solvers_invert_the_equation(x in rationals(4), a1 in rational(), a2 in rational()) {
        for eq in [EquationDef::dkdv(), EquationDef::wave()] {
            for corner in Corner::ALL {
                let c = [&x[0], &x[1], &x[2], &x[3]];
                let Ok(solved) = eq.solve_corner(corner, c, &a1, &a2) else { continue };
                let mut y = x.clone();
                y[corner as usize] = solved;
                prop_assert_eq!(eq.eval([&y[0], &y[1], &y[2], &y[3]], &a1, &a2), rat(0));
            }
        }
    }

    #[test]
    fn dkdv_factorizes_at_equal_parameters(x in rationals(4), a in rational()) {
        let q: Rational = EquationDef::dkdv().eval([&x[0], &x[1], &x[2], &x[3]], &a, &a);
        prop_assert_eq!(q, (x[3].clone() - x[0].clone()) * (x[1].clone() - x[2].clone()));
    }
}
