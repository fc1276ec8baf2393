//! Named end-to-end examples, each rebuilt from scratch and checked.

use super::commands::build_defect;
use super::{CliError, DefectArgs, DefectName, EXIT_USAGE};
use crate::cauchy::{classify_ivp, split_self_intersecting_strips, CauchyError, DiagonalChoice, InitialSubgraph, Verdict};
use crate::equations::EquationDef;
use crate::field::FieldSolution;
use crate::fixtures;
use crate::graph::lattice::gen_square_lattice;
use crate::graph::zd::{gen_zd_subcomplex, Quadrant, Selector};
use crate::graph::QuadGraph;
use crate::lax::weak_defect_lax_check;
use crate::scalar::{random_rational, Rational};
use crate::solitons::{assign_kink_params, sample_field, verify_field, KinkSpec, TwoKinkSpec};
use crate::solver::{check_solution, defect_experiment, path_data, propagate, wave_affected_region, SolveOptions};
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;

type Outcome = Result<(bool, String), CliError>;

pub struct Example {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(u64) -> Outcome,
}

pub const EXAMPLES: &[Example] = &[
    Example { name: "l-path-and-staircase", about: "an L-shaped and a staircase path both pose correct problems", run: l_path_and_staircase },
    Example { name: "diagonal-defect", about: "a square cut along its diagonal is not a weak defect", run: diagonal_defect },
    Example { name: "transparent-defect", about: "a rhombus inside a square is invisible to the solution", run: |s| weak_defect(DefectName::Transparent, s) },
    Example { name: "swapping-defect", about: "a block that swaps two columns is invisible to the solution", run: |s| weak_defect(DefectName::Swapping, s) },
    Example { name: "sheared-defect", about: "a sheared block is invisible to the solution", run: |s| weak_defect(DefectName::Sheared, s) },
    Example { name: "corner-bend", about: "paths around a bent corner: over-, under- and correctly determined", run: corner_bend },
    Example { name: "returning-strips", about: "strips that come back to the data line make it both over- and underdetermined", run: returning_strips },
    Example { name: "self-crossing-split", about: "a self-crossing strip is removed by splitting its crossing face", run: self_crossing_split },
    Example { name: "closed-strips", about: "a hexagonal patch has one closed strip per interior hexagon", run: closed_strips },
    Example { name: "wave-interactions", about: "for the wave equation a defect only changes values on its own strips", run: wave_interactions },
    Example { name: "kink", about: "the kink on a 50×50 lattice", run: kink },
    Example { name: "bended-kink", about: "a kink with position-dependent velocity on a 30×30 lattice", run: bended_kink },
    Example { name: "rhombic-kink", about: "a kink on the section of ℤ³ normal to (1, 1, 1)", run: |_| section_kink(&[1.0, 1.0, 1.0]) },
    Example { name: "quasiperiodic-kink", about: "a kink on the section of ℤ³ normal to (1, √2, √3)", run: |_| section_kink(&[1.0, 2f64.sqrt(), 3f64.sqrt()]) },
    Example { name: "three-quadrant-kink", about: "a kink on the three positive coordinate quadrants of ℤ³", run: |_| quadrant_kink(Quadrant::positive_octant(), -3.0) },
    Example { name: "six-quadrant-kink", about: "a kink on the six mixed-sign coordinate quadrants of ℤ³", run: |_| quadrant_kink(Quadrant::mixed_signs(), 0.0) },
    Example { name: "two-kink", about: "two interacting kinks on a 20×20 lattice", run: two_kink },
];

/// Runs one example, or all of them for `"all"`; lists them with `list`.
pub fn run_repro(name: Option<&str>, list: bool, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    if list {
        for e in EXAMPLES {
            writeln!(out, "{:<22} {}", e.name, e.about)?;
        }
        return Ok(0);
    }
    let name = name.ok_or_else(|| CliError::Usage("name an example, `all`, or use --list".into()))?;
    let selected: Vec<&Example> = if name == "all" {
        EXAMPLES.iter().collect()
    } else {
        let e = EXAMPLES
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| CliError::Usage(format!("unknown example {name:?}; see --list")))?;
        vec![e]
    };
    let mut failed = 0;
    for e in selected {
        let (pass, detail) = (e.run)(seed)?;
        writeln!(out, "{} {}: {detail}", if pass { "PASS" } else { "FAIL" }, e.name)?;
        failed += usize::from(!pass);
    }
    Ok(if failed == 0 { 0 } else { EXIT_USAGE })
}

fn random_values(len: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| random_rational(&mut rng, 20)).collect()
}

fn defect_args(defect: DefectName) -> DefectArgs {
    DefectArgs { defect, w: None, h: None, alpha: "3".into(), beta: "1".into() }
}

fn verdict(f: &fixtures::PathFixture, path: &str) -> Result<Verdict, CliError> {
    let p = InitialSubgraph::from_path(&f.graph, f.path(path))?;
    Ok(classify_ivp(&f.graph, &p)?.verdict)
}

fn l_path_and_staircase(seed: u64) -> Outcome {
    let f = fixtures::lattice_with_l_and_staircase();
    let eq = EquationDef::dkdv();
    let mut ok = true;
    for name in ["l-path", "staircase"] {
        ok &= verdict(&f, name)? == Verdict::Correct;
        let path = f.path(name);
        let p = InitialSubgraph::from_path(&f.graph, path)?;
        let data = path_data(&f.graph, path, &random_values(path.len(), seed))?;
        let sol = propagate(&f.graph, &eq, &p, &data, &SolveOptions::default())?.solution;
        ok &= sol.is_total() && check_solution(&f.graph, &eq, &sol, 0.0).is_ok();
    }
    Ok((ok, format!("both paths correct, {} vertices solved exactly from each", f.graph.vertex_count())))
}

fn diagonal_defect(_: u64) -> Outcome {
    let (d, _) = build_defect(&defect_args(DefectName::Diagonal))?;
    let w = d.weakness();
    let detail = match w.witness {
        Some(s) => format!("strip {s} turns inside the defect"),
        None => "every strip crosses straight".into(),
    };
    Ok((!w.weak, detail))
}

fn weak_defect(name: DefectName, seed: u64) -> Outcome {
    let (d, plain) = build_defect(&defect_args(name))?;
    let corners = [[d.w as i64, 0], [0, 0], [0, d.h as i64]];
    let values = random_values(d.w + d.h + 1, seed);
    let r = defect_experiment(&d, &plain, &EquationDef::dkdv(), &corners, &values, &SolveOptions::default())?;
    let lax = weak_defect_lax_check(&d, &r.defected)?.matches();
    let ok = d.weakness().weak && r.differing.is_empty() && r.compared > 0 && lax;
    Ok((
        ok,
        format!(
            "{} of {} outside points differ; far sides recovered from transition matrices: {lax}",
            r.differing.len(),
            r.compared
        ),
    ))
}

fn corner_bend(_: u64) -> Outcome {
    let f = fixtures::bent_corner_lattice();
    let got = [verdict(&f, "left-bottom")?, verdict(&f, "right-top")?, verdict(&f, "bottom-right")?];
    let want = [Verdict::Overdetermined, Verdict::Underdetermined, Verdict::Correct];
    let names: Vec<&str> = got.iter().map(|v| v.as_str()).collect();
    Ok((got == want, format!("left-bottom, right-top, bottom-right: {}", names.join(", "))))
}

fn returning_strips(_: u64) -> Outcome {
    let f = fixtures::returning_strips_lattice();
    let p = InitialSubgraph::from_path(&f.graph, f.path("bottom"))?;
    let c = classify_ivp(&f.graph, &p)?;
    let ok = c.verdict == Verdict::Both && !c.over_witnesses.is_empty() && !c.under_witnesses.is_empty();
    Ok((
        ok,
        format!(
            "{}: {} strips crossed twice, {} not crossed",
            c.verdict.as_str(),
            c.over_witnesses.len(),
            c.under_witnesses.len()
        ),
    ))
}

fn self_crossing_split(_: u64) -> Outcome {
    let f = fixtures::self_crossing_graph();
    let p = InitialSubgraph::from_path(&f.graph, f.path("data"))?;
    let refused = matches!(classify_ivp(&f.graph, &p), Err(CauchyError::SelfIntersectingStrip(_)));
    let r = split_self_intersecting_strips(&f.graph, &EquationDef::dkdv(), DiagonalChoice::Default)?;
    let clean = r.graph.strips_with_self_crossing().is_empty();
    let wave_refused = matches!(
        split_self_intersecting_strips(&f.graph, &EquationDef::wave(), DiagonalChoice::Default),
        Err(CauchyError::NoSplittingProperty)
    );
    Ok((
        refused && clean && wave_refused,
        format!("{} face removed, no self-crossing left; the wave equation cannot be split", r.splits),
    ))
}

fn closed_strips(_: u64) -> Outcome {
    let mut ok = true;
    let mut counts = Vec::new();
    for n in 1..=4 {
        let g = fixtures::closed_strip_lattice(n);
        let closed = g.strips().iter().filter(|s| s.closed).count();
        ok &= closed == fixtures::interior_hexagons(n);
        counts.push(closed.to_string());
    }
    Ok((ok, format!("closed strips for sizes 1 to 4: {}", counts.join(", "))))
}

fn wave_interactions(_: u64) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in [DefectName::Transparent, DefectName::Swapping, DefectName::Sheared] {
        let (d, plain) = build_defect(&defect_args(name))?;
        let corners = [[d.w as i64, 0], [0, 0], [0, d.h as i64]];
        let mut touched = 0;
        for k in 0..d.w + d.h + 1 {
            let r = wave_affected_region(&d, &plain, &corners, k)?;
            ok &= r.within_cross;
            touched += usize::from(!r.affected.is_empty());
        }
        // the transparent defect leaves every strip straight and is invisible
        ok &= (touched == 0) == (name == DefectName::Transparent);
        parts.push(format!("{name:?}: {touched} data positions reach past the defect").to_lowercase());
    }
    Ok((ok, parts.join("; ")))
}

fn lattice(w: usize, h: usize) -> Result<QuadGraph, CliError> {
    Ok(gen_square_lattice(w, h, &vec![Rational::one(); w], &vec![Rational::one(); h])?)
}

fn kink_outcome(g: QuadGraph, spec: &KinkSpec, tol: f64) -> Outcome {
    let g = assign_kink_params(g, |axis, n| spec.axis_param(axis, n))?;
    let v: FieldSolution<f64> = sample_field(&g, |s| spec.kink_value(s))?;
    let c = verify_field(&g, &EquationDef::dkdv(), &v);
    Ok((c.faces > 0 && c.max_relative <= tol, format!("{} faces, max relative residual {:.2e}", c.faces, c.max_relative)))
}

fn kink(_: u64) -> Outcome {
    kink_outcome(lattice(50, 50)?, &KinkSpec::constant(1.0, 2.0, 0.3)?.with_xi(-7.5), 1e-10)
}

fn bended_kink(_: u64) -> Outcome {
    kink_outcome(lattice(30, 30)?, &KinkSpec::bended(30, 30, 0.3)?.with_xi(-3.0), 1e-9)
}

fn section_kink(normal: &[f64]) -> Outcome {
    let sel = Selector::Plane { normal: normal.to_vec(), radius: 4, offset: None };
    kink_outcome(gen_zd_subcomplex(3, &sel)?.graph, &KinkSpec::linear(&[0.5, 2.5, 3.0], 0.3)?, 1e-9)
}

fn quadrant_kink(quadrants: Vec<Quadrant>, xi: f64) -> Outcome {
    let g = gen_zd_subcomplex(3, &Selector::Quadrants { quadrants, radius: 5 })?.graph;
    kink_outcome(g, &KinkSpec::linear(&[1.0, 1.5, 2.0], 0.3)?.with_xi(xi), 1e-9)
}

fn two_kink(_: u64) -> Outcome {
    let spec = TwoKinkSpec::constant(1.0, 2.0, 0.2, 0.5)?.with_xi(-2.0, 3.0);
    let g = assign_kink_params(lattice(20, 20)?, |axis, n| spec.axis_param(axis, n))?;
    let v = sample_field(&g, |s| spec.two_kink_value(s))?;
    let c = verify_field(&g, &EquationDef::dkdv(), &v);
    Ok((c.max_relative <= 1e-9, format!("{} faces, max relative residual {:.2e}", c.faces, c.max_relative)))
}
