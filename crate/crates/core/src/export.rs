//! Rendering of crystals, canonical bases and modules as JSON, DOT, TeX and text.
//!
//! Scalars are always stored with a formal `pi`. A [`PiMode`] only chooses how they are
//! printed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::canonical::CanonicalElement;
use crate::crystal::Crystal;
use crate::error::Result;
use crate::graded::{Depth, Graded};
use crate::linalg::Matrix;
use crate::module::HighestWeightModule;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PiMode {
    Formal,
    Plus,
    Minus,
}

impl PiMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "formal" => Some(PiMode::Formal),
            "+1" | "1" => Some(PiMode::Plus),
            "-1" => Some(PiMode::Minus),
            _ => None,
        }
    }

    /// The value of `pi` under this mode, if specialized.
    pub fn sign(&self) -> Option<i8> {
        match self {
            PiMode::Formal => None,
            PiMode::Plus => Some(1),
            PiMode::Minus => Some(-1),
        }
    }
}

pub fn scalar_text(s: &Scalar, pi: PiMode) -> String {
    match pi.sign() {
        None => s.to_string(),
        Some(e) => s.specialize(e).to_string(),
    }
}

/// `q^(-1)` becomes `q^{-1}`, `pi` becomes `\pi`, `*` is dropped.
pub fn scalar_tex(s: &Scalar, pi: PiMode) -> String {
    let text = scalar_text(s, pi);
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '^' => {
                out.push_str("^{");
                if chars.peek() == Some(&'(') {
                    chars.next();
                    for d in chars.by_ref() {
                        if d == ')' {
                            break;
                        }
                        out.push(d);
                    }
                } else {
                    while let Some(&d) = chars.peek() {
                        if d.is_ascii_digit() || d == '-' {
                            out.push(d);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                }
                out.push('}');
            }
            '*' => {}
            'p' if chars.peek() == Some(&'i') => {
                chars.next();
                out.push_str("\\pi ");
            }
            _ => out.push(c),
        }
    }
    out.trim_end().to_string()
}

/// The sign `pi^k` rendered for a node class: `1` when `k` is even.
fn pi_sign(sign: i8, pi: PiMode) -> i64 {
    match pi.sign() {
        None => sign as i64,
        Some(e) => (if sign < 0 { e } else { 1 }) as i64,
    }
}

/// A node of the crystal, in the maximal variant possibly multiplied by `pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Vertex {
    node: usize,
    flipped: bool,
}

fn vertices<M>(c: &Crystal<M>, maximal: bool) -> Vec<Vertex> {
    let n = c.nodes.len();
    let mut out: Vec<Vertex> = (0..n).map(|node| Vertex { node, flipped: false }).collect();
    if maximal {
        out.extend((0..n).map(|node| Vertex { node, flipped: true }));
    }
    out
}

fn vertex_id(n: usize, v: Vertex) -> usize {
    v.node + if v.flipped { n } else { 0 }
}

/// Edges as `(src, dst, i, sign)` with ids as in [`vertices`].
fn signed_edges<M>(c: &Crystal<M>, maximal: bool) -> Vec<(usize, usize, usize, i8)> {
    let n = c.nodes.len();
    let mut out = Vec::new();
    for e in &c.edges {
        if maximal {
            for flipped in [false, true] {
                let src = Vertex { node: e.src, flipped };
                let dst = Vertex {
                    node: e.dst,
                    flipped: flipped ^ (e.sign < 0),
                };
                out.push((vertex_id(n, src), vertex_id(n, dst), e.i, 1));
            }
        } else {
            out.push((e.src, e.dst, e.i, e.sign));
        }
    }
    out.sort();
    out
}

/// `{nodes: [{id, weight, eps, phi, parity}], edges: [{src, dst, i, sign}]}`.
///
/// `weight` is the vector of pairings with the simple coroots. Indices `i` are 1-based.
pub fn crystal_json<M: Graded>(c: &Crystal<M>, pi: PiMode, maximal: bool) -> Value {
    let m = c.module();
    let n = c.nodes.len();
    let nodes: Vec<Value> = vertices(c, maximal)
        .into_iter()
        .map(|v| {
            let b = &c.nodes[v.node];
            let weight: Vec<i64> = (0..m.datum().rank()).map(|i| m.pairing(&b.depth, i)).collect();
            let mut o = json!({
                "id": vertex_id(n, v),
                "weight": weight,
                "depth": b.depth,
                "eps": b.eps,
                "phi": b.phi,
                "parity": b.parity,
                "path": b.path.iter().map(|i| i + 1).collect::<Vec<_>>(),
            });
            if maximal {
                o["pi"] = json!(pi_sign(if v.flipped { -1 } else { 1 }, pi));
            }
            o
        })
        .collect();
    let edges: Vec<Value> = signed_edges(c, maximal)
        .into_iter()
        .map(|(src, dst, i, sign)| json!({"src": src, "dst": dst, "i": i + 1, "sign": pi_sign(sign, pi)}))
        .collect();
    json!({"nodes": nodes, "edges": edges})
}

fn node_label<M>(c: &Crystal<M>, v: Vertex, pi: PiMode) -> String {
    let b = &c.nodes[v.node];
    let path: String = if b.path.is_empty() {
        "1".to_string()
    } else {
        b.path.iter().map(|i| format!("f{}", i + 1)).collect::<Vec<_>>().join(" ")
    };
    if v.flipped {
        match pi {
            PiMode::Formal => format!("pi {path}"),
            PiMode::Plus => path,
            PiMode::Minus => format!("-{path}"),
        }
    } else {
        path
    }
}

/// DOT graph with edge label `i` and a `sign` attribute.
pub fn crystal_dot<M: Graded>(c: &Crystal<M>, pi: PiMode, maximal: bool) -> String {
    let n = c.nodes.len();
    let mut s = String::from("digraph crystal {\n  rankdir=TB;\n");
    for v in vertices(c, maximal) {
        let b = &c.nodes[v.node];
        let depth: Vec<String> = b.depth.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(
            s,
            "  n{} [label=\"{}\", depth=\"{}\", parity={}];",
            vertex_id(n, v),
            node_label(c, v, pi),
            depth.join(","),
            b.parity
        );
    }
    for (src, dst, i, sign) in signed_edges(c, maximal) {
        let sg = pi_sign(sign, pi);
        let style = if sg < 0 { ", style=dashed" } else { "" };
        let _ = writeln!(s, "  n{src} -> n{dst} [label=\"{}\", sign={sg}{style}];", i + 1);
    }
    s.push_str("}\n");
    s
}

pub fn crystal_text<M: Graded>(c: &Crystal<M>, pi: PiMode, maximal: bool) -> String {
    let n = c.nodes.len();
    let mut s = format!("{} nodes, {} edges\n", n, c.edges.len());
    for v in vertices(c, maximal) {
        let b = &c.nodes[v.node];
        let _ = writeln!(
            s,
            "node {:>3}  depth {:?}  parity {}  eps {:?}  phi {:?}  {}",
            vertex_id(n, v),
            b.depth,
            b.parity,
            b.eps,
            b.phi,
            node_label(c, v, pi)
        );
    }
    for (src, dst, i, sign) in signed_edges(c, maximal) {
        let sg = pi_sign(sign, pi);
        let _ = writeln!(s, "f~_{} : {src} -> {}{dst}", i + 1, if sg < 0 { "-" } else { "" });
    }
    s
}

fn monomial_text(m: &[(usize, u32)]) -> String {
    m.iter()
        .map(|&(i, a)| if a == 1 { format!("F{}", i + 1) } else { format!("F{}^({a})", i + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn monomial_tex(m: &[(usize, u32)]) -> String {
    m.iter()
        .map(|&(i, a)| if a == 1 { format!("F_{{{}}}", i + 1) } else { format!("F_{{{}}}^{{({a})}}", i + 1) })
        .collect::<String>()
}

/// Coefficients of the element and, in the maximal variant, of `pi G(b)` as well.
fn variants(e: &CanonicalElement, maximal: bool) -> Vec<(bool, Vec<(&[(usize, u32)], Scalar)>)> {
    let base: Vec<(&[(usize, u32)], Scalar)> = e.expansion.iter().map(|(m, c)| (m.as_slice(), c.clone())).collect();
    let mut out = vec![(false, base.clone())];
    if maximal {
        let pi = Scalar::pi();
        out.push((true, base.into_iter().map(|(m, c)| (m, &pi * &c)).collect()));
    }
    out
}

fn element_name<M>(c: &Crystal<M>, e: &CanonicalElement, flipped: bool) -> String {
    let b = &c.nodes[e.node];
    let path: String = b.path.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
    format!("{}G({path})", if flipped { "pi " } else { "" })
}

pub fn canonical_json<M: Graded>(
    c: &Crystal<M>,
    basis: &BTreeMap<Depth, Vec<CanonicalElement>>,
    pi: PiMode,
    maximal: bool,
) -> Value {
    let mut out = Vec::new();
    for (n, elems) in basis {
        for e in elems {
            for (flipped, terms) in variants(e, maximal) {
                let terms: Vec<Value> = terms
                    .iter()
                    .map(|(m, s)| {
                        json!({
                            "monomial": m.iter().map(|&(i, a)| json!([i + 1, a])).collect::<Vec<_>>(),
                            "coeff": scalar_text(s, pi),
                        })
                    })
                    .collect();
                out.push(json!({
                    "node": e.node,
                    "pi": flipped,
                    "depth": n,
                    "path": c.nodes[e.node].path.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "terms": terms,
                }));
            }
        }
    }
    Value::Array(out)
}

fn join_terms(parts: Vec<(String, String)>) -> String {
    let mut s = String::new();
    for (k, (coeff, mono)) in parts.into_iter().enumerate() {
        let neg = coeff.starts_with('-') && !coeff.contains(' ');
        let coeff = if neg { coeff[1..].to_string() } else { coeff };
        let body = match coeff.as_str() {
            c if mono.is_empty() => c.to_string(),
            "1" => mono,
            c if c.contains(' ') => format!("({c}) {mono}"),
            c => format!("{c} {mono}"),
        };
        if k == 0 {
            s.push_str(if neg { "-" } else { "" });
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}

pub fn canonical_tex<M: Graded>(
    c: &Crystal<M>,
    basis: &BTreeMap<Depth, Vec<CanonicalElement>>,
    pi: PiMode,
    maximal: bool,
) -> String {
    let mut s = String::from("\\begin{align*}\n");
    let mut lines = Vec::new();
    for elems in basis.values() {
        for e in elems {
            for (flipped, terms) in variants(e, maximal) {
                let name = element_name(c, e, flipped).replace("pi ", "\\pi ");
                let rhs = join_terms(terms.iter().map(|(m, x)| (scalar_tex(x, pi), monomial_tex(m))).collect());
                lines.push(format!("  {name} &= {rhs}"));
            }
        }
    }
    s.push_str(&lines.join(" \\\\\n"));
    s.push_str("\n\\end{align*}\n");
    s
}

pub fn canonical_text<M: Graded>(
    c: &Crystal<M>,
    basis: &BTreeMap<Depth, Vec<CanonicalElement>>,
    pi: PiMode,
    maximal: bool,
) -> String {
    let mut s = String::new();
    for (n, elems) in basis {
        let _ = writeln!(s, "depth {n:?}");
        for e in elems {
            for (flipped, terms) in variants(e, maximal) {
                let rhs = join_terms(terms.iter().map(|(m, x)| (scalar_text(x, pi), monomial_text(m))).collect());
                let _ = writeln!(s, "  {} = {rhs}", element_name(c, e, flipped));
            }
        }
    }
    s
}

pub fn matrix_json(m: &Matrix<Scalar>, pi: PiMode) -> Value {
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| scalar_text(x, pi)).collect())
        .collect();
    json!(rows)
}

pub fn matrix_text(m: &Matrix<Scalar>, pi: PiMode) -> String {
    let mut s = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| scalar_text(x, pi)).collect();
        let _ = writeln!(s, "[ {} ]", row.join(" , "));
    }
    s
}

pub fn matrix_tex(m: &Matrix<Scalar>, pi: PiMode) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| scalar_tex(x, pi)).collect::<Vec<_>>().join(" & "))
        .collect();
    format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}\n", rows.join(" \\\\\n"))
}

/// Weight-space dimensions, action matrices and Gram matrices of a module.
pub fn module_json(v: &HighestWeightModule, pi: PiMode) -> Result<Value> {
    let rank = v.datum().rank();
    let mut spaces = Vec::new();
    for n in v.depths() {
        let mut e = Vec::new();
        let mut f = Vec::new();
        for i in 0..rank {
            let above = crate::half::shifted(&n, i, false);
            let below = crate::half::shifted(&n, i, true);
            e.push(match above {
                Some(m) if v.dim_at(&m) > 0 => matrix_json(&v.e_matrix(i, &n), pi),
                _ => Value::Null,
            });
            f.push(match below {
                Some(m) if v.dim_at(&m) > 0 => matrix_json(&v.f_matrix(i, &n), pi),
                _ => Value::Null,
            });
        }
        spaces.push(json!({
            "depth": n,
            "dim": v.dim_at(&n),
            "basis": (0..v.dim_at(&n)).map(|k| v.basis_word(&n, k).iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "E": e,
            "F": f,
            "gram": matrix_json(&v.gram(&n)?, pi),
        }));
    }
    Ok(json!({
        "lambda": v.lambda(),
        "complete": v.is_complete(),
        "dim": v.total_dim(),
        "spaces": spaces,
    }))
}
