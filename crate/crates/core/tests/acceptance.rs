//! One PASS/FAIL line per acceptance criterion. Exits nonzero only when an outcome
//! differs from the expected one; the known discrepancy at depth (4,1) is printed as FAIL.

use std::sync::Arc;
use std::time::{Duration, Instant};

use qpi_core::canonical::*;
use qpi_core::checks::{polarization_properties, GrandLoop};
use qpi_core::crystal::Crystal;
use qpi_core::export::{self, PiMode};
use qpi_core::golden::{odd_rank_one_tensor, osp14_depth_41, rank_one_strings, Check};
use qpi_core::graded::{Depth, Graded, Kashiwara};
use qpi_core::linalg::scalar_ranks;
use qpi_core::module::HighestWeightModule;
use qpi_core::tensor::*;
use qpi_core::{CartanDatum, Result, Scalar};

const KNOWN_FAILURES: [&str; 4] = [
    "canonical element at f~1^3 f~2 f~1 1 is F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2",
    "F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2 is bar-invariant",
    "(F1^(4)F2, F1^(4)F2) = (pi q)^6 / [4]! with positive exponent",
    "(F1^(3)(F2F1 - q^2F1F2), same) = (pi q)^3 (1 - q^4) / [3]! with positive exponent",
];

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn from_checks(checks: &[Check]) -> Self {
        let notes: Vec<String> = checks.iter().filter(|c| !c.ok).map(|c| c.label.clone()).collect();
        Outcome { ok: notes.is_empty(), notes }
    }

    fn from_failures(fails: Vec<String>) -> Self {
        Outcome { ok: fails.is_empty(), notes: fails }
    }
}

struct Runner {
    unexpected: usize,
    passed: usize,
    total: usize,
}

impl Runner {
    fn run(&mut self, tag: usize, name: &str, limit: Duration, expect_ok: bool, f: impl FnOnce() -> Result<Outcome>) -> Vec<String> {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let (ok, notes) = match res {
            Ok(o) => (o.ok && took <= limit, o.notes),
            Err(e) => (false, vec![format!("error: {e}")]),
        };
        let slow = took > limit;
        println!(
            "{} [{tag}] {name} ({:.2} s, limit {} s){}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            if slow { " over time" } else { "" }
        );
        for n in notes.iter().take(10) {
            println!("       {n}");
        }
        self.total += 1;
        self.passed += ok as usize;
        if ok != expect_ok {
            self.unexpected += 1;
        }
        notes
    }
}

fn binf_and_canonical(g: &GrandLoop) -> Result<std::collections::BTreeMap<Depth, Vec<CanonicalElement>>> {
    canonical_basis(&g.binf, MonomialOrder::Lex)
}

fn canonical_failures<M: Graded>(
    c: &Crystal<M>,
    g: &std::collections::BTreeMap<Depth, Vec<CanonicalElement>>,
    what: &str,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (n, elems) in g {
        for f in check_slice(c, elems)? {
            out.push(format!("{what} at {n:?}: {f}"));
        }
        for e in elems {
            if !is_bar_invariant(&e.coords) {
                out.push(format!("{what} node {}: not bar-invariant", e.node));
            }
            if !is_integral(e) {
                out.push(format!("{what} node {}: not integral", e.node));
            }
        }
    }
    Ok(out)
}

fn tensor_rule_failures(name: &str, l: &[i64], m: &[i64]) -> Result<Vec<String>> {
    let d = CartanDatum::builtin(name)?;
    let a = Arc::new(HighestWeightModule::new(&d, l)?);
    let b = Arc::new(HighestWeightModule::new(&d, m)?);
    let ca = Crystal::build(Arc::new(Kashiwara::new(a.clone())), a.depth_height())?;
    let cb = Crystal::build(Arc::new(Kashiwara::new(b.clone())), b.depth_height())?;
    let t = Arc::new(TensorModule::new(a, b, Coproduct::Delta)?);
    let kash = Kashiwara::new(t.clone());
    let rep = check_tensor_rule(&TensorLattice::new(&t, &ca, &cb), &kash)?;
    Ok(rep.mismatches.into_iter().map(|s| format!("{name} {l:?} (x) {m:?}: {s}")).collect())
}

fn even_string_failures(name: &str, l: &[i64]) -> Result<Vec<String>> {
    let d = CartanDatum::builtin(name)?;
    let v = Arc::new(HighestWeightModule::new(&d, l)?);
    let c = Crystal::build(Arc::new(Kashiwara::new(v.clone())), v.depth_height())?;
    let mut out = Vec::new();
    for i in (0..d.rank()).filter(|&i| !d.is_odd(i)) {
        for b in 0..c.nodes.len() {
            if c.nodes[b].eps[i] != 0 {
                continue;
            }
            let len = v.pairing(&c.nodes[b].depth, i);
            let mut cur = b;
            let mut steps = 0;
            while let Some((t, _)) = c.f_next[cur][i] {
                cur = t;
                steps += 1;
            }
            if steps != len {
                out.push(format!("{name} {l:?}: string of node {b} along {} has length {steps}, not {len}", i + 1));
            }
        }
        let g = export::crystal_json(&c, PiMode::Plus, false);
        if g["edges"].as_array().into_iter().flatten().any(|e| e["sign"] != 1) {
            out.push(format!("{name} {l:?}: a sign survives at pi = 1"));
        }
    }
    Ok(out)
}

fn main() {
    let mut r = Runner { unexpected: 0, passed: 0, total: 0 };
    let secs = Duration::from_secs;

    let depth41 = r.run(1, "exact elements and pairings at depth (4,1) of osp(1|4)", secs(10), false, || {
        Ok(Outcome::from_checks(&osp14_depth_41()?.checks))
    });
    if depth41 != KNOWN_FAILURES {
        println!("       unexpected set of failing statements");
        r.unexpected += 1;
    }

    r.run(2, "osp(1|2) V(n), n <= 8: dimension, strings, relations", secs(5), true, || {
        Ok(Outcome::from_checks(&rank_one_strings(8)?))
    });

    r.run(3, "osp(1|2) V(n) (x) V(1), n <= 6: singular vectors and congruences", secs(10), true, || {
        let mut all = Vec::new();
        for n in 1..=6 {
            all.extend(odd_rank_one_tensor(n)?);
        }
        Ok(Outcome::from_checks(&all))
    });

    r.run(4, "tensor product rule for osp(1|2) n, m <= 5 and osp(1|4) w1, w2", secs(60), true, || {
        let mut fails = Vec::new();
        for n in 0..=5 {
            for m in 0..=5 {
                fails.extend(tensor_rule_failures("osp12", &[n], &[m])?);
            }
        }
        for l in [[1, 0], [0, 1]] {
            for m in [[1, 0], [0, 1]] {
                fails.extend(tensor_rule_failures("osp14", &l, &m)?);
            }
        }
        Ok(Outcome::from_failures(fails))
    });

    let osp14 = CartanDatum::builtin("osp14").unwrap();
    let rank2 = CartanDatum::builtin("rank2").unwrap();
    let mut loops: Vec<GrandLoop> = Vec::new();
    r.run(5, "grand-loop statements 1-14 for osp(1|4) to height 6 and rank 2 to height 5", secs(300), true, || {
        let mut fails = Vec::new();
        for (d, h) in [(&osp14, 6), (&rank2, 5)] {
            let lambdas = vec![d.fundamental(0), d.fundamental(1)];
            let g = GrandLoop::new(d, h, &lambdas)?;
            for (k, rep) in g.run(&lambdas)? {
                if rep.checked == 0 {
                    fails.push(format!("{} statement {k}: nothing checked", d.name));
                }
                fails.extend(rep.failures.into_iter().map(|f| format!("{} statement {k}: {f}", d.name)));
            }
            loops.push(g);
        }
        Ok(Outcome::from_failures(fails))
    });

    r.run(6, "canonical basis properties and module compatibility for w1, w2, w1 + w2", secs(300), true, || {
        let mut fails = Vec::new();
        for g in &loops {
            let gu = binf_and_canonical(g)?;
            fails.extend(canonical_failures(&g.binf, &gu, &format!("{} U^-", g.datum.name))?);
            let sum: Vec<i64> = g.datum.fundamental(0).iter().zip(g.datum.fundamental(1)).map(|(a, b)| a + b).collect();
            for l in [g.datum.fundamental(0), g.datum.fundamental(1), sum] {
                let (_, _, bla, proj) = g.modules.iter().find(|m| m.0 == l).expect("module was built");
                let gv = canonical_basis(bla, MonomialOrder::Lex)?;
                fails.extend(canonical_failures(bla, &gv, &format!("{} V({l:?})", g.datum.name))?);
                for f in check_module_compatibility(proj, &g.binf, &gu, bla, &gv)? {
                    fails.push(format!("{} V({l:?}): {f}", g.datum.name));
                }
            }
        }
        Ok(Outcome::from_failures(fails))
    });

    r.run(7, "almost orthonormality of the pi-basis and the negative control", secs(300), true, || {
        let mut fails = Vec::new();
        for g in &loops {
            fails.extend(polarization_properties(&g.binf)?.failures);
            for (l, _, bla, _) in &g.modules {
                fails.extend(polarization_properties(bla)?.failures.into_iter().map(|f| format!("V({l:?}): {f}")));
            }
        }
        let c = &loops.first().expect("osp(1|4) loop").binf;
        let n = [4u32, 1];
        let cands: Vec<(usize, Vec<Scalar>)> =
            c.slice(&n).map(|s| s.nodes.iter().map(|&b| (b, c.lift(b))).collect()).unwrap_or_default();
        match negative_control(c, &n, &cands)? {
            Some(nc) if nc.pairing_in_a && !nc.in_lattice => {}
            other => fails.push(format!("negative control at (4,1): {:?}", other.map(|x| (x.pairing_in_a, x.in_lattice)))),
        }
        Ok(Outcome::from_failures(fails))
    });

    r.run(8, "characters agree at pi = 1 and pi = -1; even strings are classical", secs(300), true, || {
        let mut fails = Vec::new();
        for g in &loops {
            for (l, v, _, p) in &g.modules {
                for n in g.half.depths() {
                    let (plus, minus) = scalar_ranks(&p.pulled_back_form(&n)?);
                    if plus != minus || plus != v.dim_at(&n) {
                        fails.push(format!("{} V({l:?}) at {n:?}: ranks {plus}, {minus}, dim {}", g.datum.name, v.dim_at(&n)));
                    }
                }
            }
        }
        for l in [[1, 0], [0, 1], [1, 1], [1, 2]] {
            fails.extend(even_string_failures("osp14", &l)?);
        }
        fails.extend(even_string_failures("osp16", &[0, 1, 1])?);
        Ok(Outcome::from_failures(fails))
    });

    println!(
        "{} of {} criteria pass; {} outcome(s) differ from the recorded analysis",
        r.passed, r.total, r.unexpected
    );
    if r.unexpected > 0 {
        std::process::exit(1);
    }
}
