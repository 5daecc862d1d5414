//! Super generalized Cartan matrices of anisotropic type.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{QpiError, Result};
use crate::scalar::{qpi_binomial, qpi_factorial, qpi_integer, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanDatum {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub parity: Vec<u8>,
    pub d: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationReport(pub Vec<ConditionCheck>);

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|c| c.ok)
    }

    pub fn violated(&self) -> Vec<&str> {
        self.0.iter().filter(|c| !c.ok).map(|c| c.condition.as_str()).collect()
    }
}

/// Element of the root lattice, `sum coords[j] alpha_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVec(pub Vec<i64>);

impl RootVec {
    pub fn zero(rank: usize) -> Self {
        RootVec(vec![0; rank])
    }

    pub fn height(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).sum()
    }

    /// `-zeta` as a depth vector; requires `zeta` in the negative cone.
    pub fn depth(&self) -> Option<Vec<u32>> {
        self.0.iter().map(|&x| u32::try_from(-x).ok()).collect()
    }

    pub fn from_depth(n: &[u32]) -> Self {
        RootVec(n.iter().map(|&x| -(x as i64)).collect())
    }
}

/// `lambda + zeta` with `lambda` recorded through its pairings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub base: Vec<i64>,
    pub shift: RootVec,
}

impl Weight {
    pub fn dominant(base: Vec<i64>) -> Self {
        let n = base.len();
        Weight {
            base,
            shift: RootVec::zero(n),
        }
    }

    pub fn is_dominant(&self) -> bool {
        self.shift.0.iter().all(|&x| x == 0) && self.base.iter().all(|&x| x >= 0)
    }
}

fn check(condition: &str, ok: bool, detail: String) -> ConditionCheck {
    ConditionCheck {
        condition: condition.to_string(),
        ok,
        detail: if ok { "ok".to_string() } else { detail },
    }
}

impl CartanDatum {
    /// Build and validate.
    pub fn new(name: &str, a: Vec<Vec<i64>>, parity: Vec<u8>, d: Vec<u32>) -> Result<Self> {
        let datum = CartanDatum {
            name: name.to_string(),
            a,
            parity,
            d,
        };
        let report = datum.validate();
        if !report.is_valid() {
            return Err(QpiError::InvalidDatum(report.violated().join(", ")));
        }
        Ok(datum)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CartanDatum =
            serde_json::from_str(text).map_err(|e| QpiError::Parse(e.to_string()))?;
        let name = if raw.name.is_empty() { "custom".to_string() } else { raw.name };
        Self::new(&name, raw.a, raw.parity, raw.d)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let osp = |n: usize| -> Result<Self> {
            let mut a = vec![vec![0i64; n]; n];
            for i in 0..n {
                a[i][i] = 2;
                if i + 1 < n {
                    a[i][i + 1] = if i == 0 { -2 } else { -1 };
                    a[i + 1][i] = -1;
                }
            }
            let mut parity = vec![0u8; n];
            parity[0] = 1;
            let mut d = vec![2u32; n];
            d[0] = 1;
            Self::new(&format!("osp1{}", 2 * n), a, parity, d)
        };
        match name {
            "osp12" | "osp(1|2)" => osp(1),
            "osp14" | "osp(1|4)" => osp(2),
            "osp16" | "osp(1|6)" => osp(3),
            "rank2" => Self::new("rank2", vec![vec![2, -2], vec![-2, 2]], vec![1, 1], vec![1, 1]),
            "oddpair" => Self::new("oddpair", vec![vec![2, 0], vec![0, 2]], vec![1, 1], vec![1, 1]),
            _ => Err(QpiError::InvalidDatum(format!("unknown builtin datum {name:?}"))),
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["osp12", "osp14", "osp16", "rank2", "oddpair"]
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.parity[i] == 1
    }

    pub fn p(&self, i: usize) -> i64 {
        self.parity[i] as i64
    }

    pub fn d(&self, i: usize) -> u32 {
        self.d[i]
    }

    pub fn max_d(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(1)
    }

    /// Conditions (a)-(f) and the existence of an odd index.
    pub fn validate(&self) -> ValidationReport {
        let n = self.a.len();
        let mut out = Vec::new();
        let shape = self.a.iter().all(|r| r.len() == n) && self.parity.len() == n && self.d.len() == n;
        out.push(check(
            "shape",
            shape && n > 0,
            format!("matrix must be square and match parity/d lengths (rank {n})"),
        ));
        if !shape || n == 0 {
            return ValidationReport(out);
        }
        let bad: Vec<String> = (0..n).filter(|&i| self.a[i][i] != 2).map(|i| format!("a_{i}{i}")).collect();
        out.push(check("(a)", bad.is_empty(), format!("diagonal entries not 2: {}", bad.join(" "))));
        let mut bad = Vec::new();
        let mut bad_c = Vec::new();
        let mut bad_d = Vec::new();
        let mut bad_e = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.a[i][j] > 0 {
                    bad.push(format!("a_{i}{j}={}", self.a[i][j]));
                }
                if (self.a[i][j] == 0) != (self.a[j][i] == 0) {
                    bad_c.push(format!("({i},{j})"));
                }
                if self.parity[i] == 1 && self.a[i][j] % 2 != 0 {
                    bad_d.push(format!("a_{i}{j}={}", self.a[i][j]));
                }
                if self.d[i] as i64 * self.a[i][j] != self.d[j] as i64 * self.a[j][i] {
                    bad_e.push(format!("({i},{j})"));
                }
            }
        }
        out.push(check("(b)", bad.is_empty(), format!("positive off-diagonal entries: {}", bad.join(" "))));
        out.push(check("(c)", bad_c.is_empty(), format!("zero pattern not symmetric at {}", bad_c.join(" "))));
        out.push(check("(d)", bad_d.is_empty(), format!("odd rows with odd entries: {}", bad_d.join(" "))));
        let g = self.d.iter().fold(0u32, |g, &x| g.gcd(&x));
        let pos = self.d.iter().all(|&x| x > 0);
        out.push(check(
            "(e)",
            bad_e.is_empty() && g == 1 && pos,
            format!(
                "DA not symmetric at {}; gcd(d) = {g}; positive = {pos}",
                bad_e.join(" ")
            ),
        ));
        let bad_p = self.parity.iter().any(|&p| p > 1);
        let bad: Vec<String> = (0..n)
            .filter(|&i| self.parity[i] as u32 % 2 != self.d[i] % 2)
            .map(|i| format!("p({i})={} d_{i}={}", self.parity[i], self.d[i]))
            .collect();
        out.push(check(
            "(f)",
            bad.is_empty() && !bad_p,
            format!("parity not congruent to d mod 2: {}", bad.join(" ")),
        ));
        out.push(check(
            "odd index",
            self.parity.contains(&1),
            "no odd simple root".to_string(),
        ));
        ValidationReport(out)
    }

    /// `<alpha_i^vee, lambda + zeta>`.
    pub fn pairing(&self, w: &Weight, i: usize) -> Result<i64> {
        if i >= self.rank() {
            return Err(QpiError::IndexOutOfRange(i));
        }
        let s: i64 = (0..self.rank()).map(|j| self.a[i][j] * w.shift.0[j]).sum();
        Ok(w.base[i] + s)
    }

    /// Pairing of `lambda - sum n_j alpha_j` with `alpha_i^vee`, `lambda` given by `top`.
    pub fn pairing_at_depth(&self, top: &[i64], n: &[u32], i: usize) -> i64 {
        top[i] - (0..self.rank()).map(|j| self.a[i][j] * n[j] as i64).sum::<i64>()
    }

    /// Parity of the weight space at depth `n`.
    pub fn depth_parity(&self, n: &[u32]) -> u8 {
        (n.iter().zip(&self.parity).map(|(&k, &p)| k as u64 * p as u64).sum::<u64>() % 2) as u8
    }

    pub fn fundamental(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }

    /// `pi_i^pe q_i^qe`.
    pub fn pi_q(&self, i: usize, pe: i64, qe: i64) -> Scalar {
        Scalar::pi_q(self.p(i) * pe, self.d(i) as i64 * qe)
    }

    pub fn qint(&self, i: usize, n: i64) -> Scalar {
        qpi_integer(n, self.d(i), self.is_odd(i))
    }

    pub fn qfact(&self, i: usize, n: u32) -> Scalar {
        qpi_factorial(n, self.d(i), self.is_odd(i))
    }

    pub fn qbinom(&self, i: usize, n: i64, a: u32) -> Scalar {
        qpi_binomial(n, a, self.d(i), self.is_odd(i))
    }

    /// `pi_i q_i - q_i^{-1}`.
    pub fn qdiff(&self, i: usize) -> Scalar {
        &self.pi_q(i, 1, 1) - &self.pi_q(i, 0, -1)
    }
}
