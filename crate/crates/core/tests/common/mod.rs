#![allow(dead_code)]

use proptest::prelude::*;
use quadivp::cauchy::InitialSubgraph;
use quadivp::equations::EquationDef;
use quadivp::field::FieldSolution;
use quadivp::graph::lattice::{gen_square_lattice, lattice_path};
use quadivp::graph::{QuadGraph, VertexId};
use quadivp::scalar::{rat, ratio, Rational};
use quadivp::solver::{path_data, propagate, SolveError, SolveOptions};
use std::collections::VecDeque;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
}

pub fn rationals(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), n)
}

/// `w` column and `h` row parameters, all distinct: odd columns, even rows.
pub fn distinct_params(w: usize, h: usize) -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    let pool: Vec<i64> = (1..30).collect();
    (
        prop::sample::subsequence(pool.clone(), w).prop_shuffle(),
        prop::sample::subsequence(pool, h).prop_shuffle(),
    )
        .prop_map(|(a, b)| (a.iter().map(|x| rat(2 * x + 1)).collect(), b.iter().map(|x| rat(2 * x)).collect()))
}

pub fn lattice(alphas: &[Rational], betas: &[Rational]) -> QuadGraph {
    gen_square_lattice(alphas.len(), betas.len(), alphas, betas).unwrap()
}

/// Corners of the path along the bottom row (right to left) and up the left column.
pub fn axes(w: usize, h: usize) -> Vec<[i64; 2]> {
    vec![[w as i64, 0], [0, 0], [0, h as i64]]
}

/// A monotone lattice path from `start` taking `moves` (false: along the
/// first axis by `dx`, true: up by one), listing every point.
pub fn staircase(start: [i64; 2], dx: i64, moves: &[bool]) -> Vec<[i64; 2]> {
    let mut p = start;
    let mut pts = vec![p];
    for &up in moves {
        if up {
            p[1] += 1;
        } else {
            p[0] += dx;
        }
        pts.push(p);
    }
    pts
}

/// `w` false and `h` true entries in random order.
pub fn moves(w: usize, h: usize) -> impl Strategy<Value = Vec<bool>> {
    let mut v = vec![false; w];
    v.extend(vec![true; h]);
    Just(v).prop_shuffle()
}

/// Solves dKdV from data on the axes; `None` when the data hit a singular face.
pub fn solve_axes(g: &QuadGraph, w: usize, h: usize, values: &[Rational]) -> Option<FieldSolution<Rational>> {
    let path = lattice_path(g, &axes(w, h)).unwrap();
    let p = InitialSubgraph::from_path(g, &path).unwrap();
    let data = path_data(g, &path, &values[..path.len()]).unwrap();
    match propagate(g, &EquationDef::dkdv(), &p, &data, &SolveOptions::default()) {
        Ok(r) => Some(r.solution),
        Err(SolveError::Singular(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

/// A walk following `choices` (taken modulo the degree), closed by a shortest path back.
pub fn closed_walk(g: &QuadGraph, start: VertexId, choices: &[usize]) -> Vec<VertexId> {
    let adj = g.adjacency();
    let mut walk = vec![start];
    for &c in choices {
        let here = *walk.last().unwrap();
        walk.push(adj[here][c % adj[here].len()]);
    }
    let mut parent = vec![usize::MAX; g.vertex_count()];
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                queue.push_back(u);
            }
        }
    }
    let mut v = *walk.last().unwrap();
    while v != start {
        v = parent[v];
        walk.push(v);
    }
    walk
}

/// An open walk following `choices`.
pub fn open_walk(g: &QuadGraph, start: VertexId, choices: &[usize]) -> Vec<VertexId> {
    let adj = g.adjacency();
    let mut walk = vec![start];
    for &c in choices {
        let here = *walk.last().unwrap();
        walk.push(adj[here][c % adj[here].len()]);
    }
    walk
}
