//! Defining relations of U as matrix identities on the weight spaces of a module.
//!
//! The module's raising operator must be the action of `E_i`.

use crate::error::Result;
use crate::graded::{Depth, Graded};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    E(usize),
    F(usize),
}

#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Matrix of `g_k ... g_1` (first generator applied first) from depth `n`,
/// or `None` when the image lies outside the module.
pub fn apply_word<M: Graded + ?Sized>(m: &M, seq: &[Gen], n: &[u32]) -> Result<Option<(Depth, Matrix<Scalar>)>> {
    let mut depth = n.to_vec();
    let mut mat = Matrix::identity(m.dim(n)?);
    for g in seq {
        match *g {
            Gen::E(i) => {
                if depth[i] == 0 {
                    return Ok(None);
                }
                mat = m.raise(i, &depth)?.mul(&mat);
                depth[i] -= 1;
            }
            Gen::F(i) => {
                mat = m.lower(i, &depth)?.mul(&mat);
                depth[i] += 1;
            }
        }
        if mat.rows() == 0 {
            return Ok(None);
        }
    }
    Ok(Some((depth, mat)))
}

fn add_to(acc: &mut Option<Matrix<Scalar>>, term: Option<Matrix<Scalar>>, c: &Scalar) {
    if let Some(t) = term {
        let t = t.scale(c);
        *acc = Some(match acc.take() {
            Some(a) => a.add(&t),
            None => t,
        });
    }
}

fn binom2(s: i64) -> i64 {
    s * (s - 1) / 2
}

/// Check relations on every weight space listed by the module.
pub fn check_relations<M: Graded + ?Sized>(m: &M) -> Result<RelationReport> {
    let datum = m.datum().clone();
    let r = datum.rank();
    let mut rep = RelationReport::default();
    for n in m.depths() {
        let d = m.dim(&n)?;
        if d == 0 {
            continue;
        }
        // how many F steps stay inside the computed range
        let room = m.max_height().saturating_sub(crate::half::height(&n)) as i64;
        let k = |i: usize, n: &[u32]| Scalar::q_pow(m.pairing(n, i));
        let j = |i: usize, n: &[u32]| Scalar::pi_pow(m.pairing(n, i));

        // Cartan part: K and J act by q^a and pi^a, with J_{2 alpha_i^vee} = 1
        for i in 0..r {
            for l in 0..r {
                let a = m.pairing(&n, i);
                let b = m.pairing(&n, l);
                rep.record(&(&k(i, &n) * &k(l, &n)) == &Scalar::q_pow(a + b), || {
                    format!("K_mu K_nu = K_mu+nu at {n:?}")
                });
                rep.record((&j(i, &n) * &j(l, &n)) == Scalar::pi_pow(a + b), || {
                    format!("J_mu J_nu = J_mu+nu at {n:?}")
                });
                rep.record((&j(i, &n) * &k(l, &n)) == (&k(l, &n) * &j(i, &n)), || {
                    format!("J K = K J at {n:?}")
                });
            }
            rep.record(Scalar::pi_pow(2 * m.pairing(&n, i)).is_one(), || {
                format!("J_2mu = 1 at {n:?}")
            });
        }

        for i in 0..r {
            for jj in 0..r {
                // K_i E_j = q^{a_ij} E_j K_i, J_i E_j = pi^{a_ij} E_j J_i, and the F versions
                let a = datum.a(i, jj);
                if let Some((t, e)) = apply_word(m, &[Gen::E(jj)], &n)? {
                    let lhs = e.scale(&k(i, &t));
                    let rhs = e.scale(&(&Scalar::q_pow(a) * &k(i, &n)));
                    rep.record(lhs == rhs, || format!("K_{} E_{} at {n:?}", i + 1, jj + 1));
                    let lhs = e.scale(&j(i, &t));
                    let rhs = e.scale(&(&Scalar::pi_pow(a) * &j(i, &n)));
                    rep.record(lhs == rhs, || format!("J_{} E_{} at {n:?}", i + 1, jj + 1));
                }
                let f_word = if room >= 1 { apply_word(m, &[Gen::F(jj)], &n)? } else { None };
                if let Some((t, f)) = f_word {
                    let lhs = f.scale(&k(i, &t));
                    let rhs = f.scale(&(&Scalar::q_pow(-a) * &k(i, &n)));
                    rep.record(lhs == rhs, || format!("K_{} F_{} at {n:?}", i + 1, jj + 1));
                    let lhs = f.scale(&j(i, &t));
                    let rhs = f.scale(&(&Scalar::pi_pow(-a) * &j(i, &n)));
                    rep.record(lhs == rhs, || format!("J_{} F_{} at {n:?}", i + 1, jj + 1));
                }

                // E_i F_j - pi^{p(i)p(j)} F_j E_i = delta_ij (J~K~ - K~^-1)/(pi_i q_i - q_i^-1)
                let mut target = n.clone();
                target[jj] += 1;
                let ok = if target[i] == 0 || room < 1 {
                    true
                } else {
                    let ef = apply_word(m, &[Gen::F(jj), Gen::E(i)], &n)?;
                    let fe = apply_word(m, &[Gen::E(i), Gen::F(jj)], &n)?;
                    target[i] -= 1;
                    let dt = m.dim(&target)?;
                    let mut lhs = Matrix::zeros(dt, d);
                    if let Some((_, x)) = ef {
                        lhs = lhs.add(&x);
                    }
                    if let Some((_, x)) = fe {
                        lhs = lhs.sub(&x.scale(&Scalar::pi_pow(datum.p(i) * datum.p(jj))));
                    }
                    let rhs = if i == jj {
                        Matrix::<Scalar>::identity(d).scale(&datum.qint(i, m.pairing(&n, i)))
                    } else {
                        Matrix::zeros(dt, d)
                    };
                    lhs == rhs
                };
                rep.record(ok, || format!("E_{} F_{} commutator at {n:?}", i + 1, jj + 1));

                if i == jj {
                    continue;
                }
                // quantum Serre relations
                let top = 1 - datum.a(i, jj);
                for up in [false, true] {
                    if up && room < top + 1 {
                        continue;
                    }
                    let g = |x: usize| if up { Gen::F(x) } else { Gen::E(x) };
                    let mut acc: Option<Matrix<Scalar>> = None;
                    for s in 0..=top {
                        let t = top - s;
                        let mut seq = vec![g(i); s as usize];
                        seq.push(g(jj));
                        seq.extend(std::iter::repeat(g(i)).take(t as usize));
                        let sign = if s % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                        let c = &(&sign * &datum.pi_q(i, s * datum.p(jj) + binom2(s), 0))
                            * &datum.qbinom(i, top, s as u32);
                        add_to(&mut acc, apply_word(m, &seq, &n)?.map(|(_, x)| x), &c);
                    }
                    let ok = acc.map_or(true, |x| x.is_zero());
                    let name = if up { "F" } else { "E" };
                    rep.record(ok, || format!("{name} Serre relation ({}, {}) at {n:?}", i + 1, jj + 1));
                }
            }
        }
    }
    Ok(rep)
}
