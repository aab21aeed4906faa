//! Coefficient-level checks of the string, dilaton, TRR, open KdV and
//! genus-0 Virasoro identities, and of the binomial identities behind
//! the genus-0 evaluation.
//!
//! Open brackets come from [`OpenSolver::constraints_only`], so every check
//! compares the constraint solver against an identity it was not built from.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::closed::genus_of_closed;
use crate::error::{Error, Result};
use crate::multiset::{self, splittings};
use crate::open::{genus_of_open, OpenSolver};
use crate::operator::DiffOperator;
use crate::rational::{binomial, factorial, frac, int, multinomial, zero, ExactRational};
use crate::series::{FormalSeries, Monomial};

fn as_text<S: Serializer>(x: &ExactRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// One evaluated identity instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params: String,
    #[serde(serialize_with = "as_text")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "as_text")]
    pub rhs: ExactRational,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(identity: &str, params: String, lhs: ExactRational, rhs: ExactRational) -> Self {
        let pass = lhs == rhs;
        VerificationReport {
            identity: identity.to_string(),
            params,
            lhs,
            rhs,
            pass,
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} = {} {}",
            self.identity,
            self.params,
            self.lhs,
            self.rhs,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// CSV with header `identity,params,lhs,rhs,pass`.
pub fn write_csv<W: std::io::Write>(reports: &[VerificationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

fn list(a: &[u32]) -> String {
    let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Which of the two genus-0 topological recursion relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trr {
    /// `⟨⟨τ_n σ⟩⟩ = ⟨⟨τ_{n-1}τ_0⟩⟩^c ⟨⟨τ_0σ⟩⟩ + ⟨⟨τ_{n-1}⟩⟩ ⟨⟨σ²⟩⟩`
    I,
    /// `⟨⟨τ_n τ_m⟩⟩ = ⟨⟨τ_{n-1}τ_0⟩⟩^c ⟨⟨τ_0τ_m⟩⟩ + ⟨⟨τ_{n-1}⟩⟩ ⟨⟨τ_m σ⟩⟩`
    II,
}

/// Bracket evaluation shared by the coefficient checks.
#[derive(Debug, Clone)]
pub struct Verifier {
    open: OpenSolver,
}

impl Default for Verifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Verifier {
    pub fn new() -> Self {
        Verifier {
            open: OpenSolver::constraints_only(),
        }
    }

    fn open_at(&mut self, g: u32, a: &[u32], k: u32) -> ExactRational {
        self.open.bracket(g, a, k)
    }

    fn open0(&mut self, a: &[u32], k: u32) -> ExactRational {
        self.open.bracket(0, a, k)
    }

    fn closed0(&mut self, a: &[u32]) -> ExactRational {
        if genus_of_closed(a) != Some(0) {
            return zero();
        }
        self.open.closed().bracket(0, a)
    }

    /// `⟨τ_0 Πτ_{a_i} σ^k⟩_g = Σ_j ⟨τ_{a_j-1} Π_{i≠j} τ_{a_i} σ^k⟩_g`, with
    /// `a` the full left-hand key.
    pub fn string(&mut self, a: &[u32], k: u32) -> Result<VerificationReport> {
        let rest = multiset::without(a, 0).ok_or_else(|| Error::Domain("string key needs a τ_0".into()))?;
        let g = forced_open_genus(a, k)?;
        stable_rest(g, k, rest.len())?;
        let lhs = self.open_at(g, a, k);
        let mut rhs = zero();
        for (x, m) in multiset::grouped(&rest) {
            if x == 0 {
                continue;
            }
            let b = multiset::with(&multiset::without(&rest, x).unwrap(), x - 1);
            rhs += int(m as i64) * self.open_at(g, &b, k);
        }
        Ok(VerificationReport::new(
            "open-string",
            format!("a={} k={} g={}", list(a), k, g),
            lhs,
            rhs,
        ))
    }

    /// `⟨τ_1 Πτ_{a_i} σ^k⟩_g = (g-1+k+l) ⟨Πτ_{a_i} σ^k⟩_g`, with `a` the
    /// full left-hand key.
    pub fn dilaton(&mut self, a: &[u32], k: u32) -> Result<VerificationReport> {
        let rest = multiset::without(a, 1).ok_or_else(|| Error::Domain("dilaton key needs a τ_1".into()))?;
        let g = forced_open_genus(a, k)?;
        stable_rest(g, k, rest.len())?;
        let lhs = self.open_at(g, a, k);
        let factor = g as i64 - 1 + k as i64 + rest.len() as i64;
        let rhs = int(factor) * self.open_at(g, &rest, k);
        Ok(VerificationReport::new(
            "open-dilaton",
            format!("a={} k={} g={}", list(a), k, g),
            lhs,
            rhs,
        ))
    }

    /// Genus-0 TRR at the coefficient of `Πt_{a_i} s^k` (TRR II) or
    /// `Πt_{a_i} s^{k-1}` (TRR I, whose left side is `⟨τ_n τ_a σ^k⟩`).
    pub fn trr(&mut self, variant: Trr, n: u32, m: Option<u32>, a: &[u32], k: u32) -> Result<VerificationReport> {
        let (lhs, rhs) = self.trr_sides(variant, n, m, a, k)?;
        let (name, params) = match variant {
            Trr::I => ("trr1", format!("n={} a={} k={}", n, list(a), k)),
            Trr::II => ("trr2", format!("n={} m={} a={} k={}", n, m.unwrap_or(0), list(a), k)),
        };
        Ok(VerificationReport::new(name, params, lhs, rhs))
    }

    fn trr_sides(&mut self, variant: Trr, n: u32, m: Option<u32>, a: &[u32], k: u32) -> Result<(ExactRational, ExactRational)> {
        if n == 0 {
            return Err(Error::Domain("TRR needs n ≥ 1".into()));
        }
        let a = multiset::sorted(a);
        let mut rhs = zero();
        let lhs = match variant {
            Trr::I => {
                if m.is_some() {
                    return Err(Error::Domain("TRR I takes no m".into()));
                }
                if k == 0 {
                    return Err(Error::Domain("TRR I needs k ≥ 1".into()));
                }
                for (b, c, w) in splittings(&a) {
                    let w = int(w as i64);
                    let cl = self.closed0(&multiset::with(&multiset::with(&b, n - 1), 0));
                    if !cl.is_zero() {
                        rhs += &w * cl * self.open0(&multiset::with(&c, 0), k);
                    }
                    let left_key = multiset::with(&b, n - 1);
                    for j in 0..k {
                        let left = self.open0(&left_key, j);
                        if left.is_zero() {
                            continue;
                        }
                        rhs += &w * binomial(k as i64 - 1, j as i64) * left * self.open0(&c, k - j + 1);
                    }
                }
                self.open0(&multiset::with(&a, n), k)
            }
            Trr::II => {
                let m = m.ok_or_else(|| Error::Domain("TRR II needs m".into()))?;
                for (b, c, w) in splittings(&a) {
                    let w = int(w as i64);
                    let cl = self.closed0(&multiset::with(&multiset::with(&b, n - 1), 0));
                    if !cl.is_zero() {
                        rhs += &w * cl * self.open0(&multiset::with(&multiset::with(&c, 0), m), k);
                    }
                    let left_key = multiset::with(&b, n - 1);
                    let right_key = multiset::with(&c, m);
                    for j in 0..=k {
                        let left = self.open0(&left_key, j);
                        if left.is_zero() {
                            continue;
                        }
                        rhs += &w * binomial(k as i64, j as i64) * left * self.open0(&right_key, k - j + 1);
                    }
                }
                self.open0(&multiset::with(&multiset::with(&a, n), m), k)
            }
        };
        Ok((lhs, rhs))
    }

    /// `(2n-1)⟨τ_n τ_a σ^k⟩ = 2 Σ ⟨τ_{n-1} τ_S σ^{k_S}⟩ C(k-1, k_S-1) ⟨τ_T σ^{k-k_S+1}⟩`
    /// with `k = 2n+2A-2l+1`, `k_S = 2n+2A_S-2l_S-1` and every `a_i ≥ 1`.
    pub fn open_kdv_coeff(&mut self, n: u32, a: &[u32]) -> Result<VerificationReport> {
        if n == 0 || a.contains(&0) {
            return Err(Error::Domain("open KdV coefficient form needs n ≥ 1 and a_i ≥ 1".into()));
        }
        let a = multiset::sorted(a);
        let sum = |x: &[u32]| x.iter().map(|&v| v as i64).sum::<i64>();
        let k = 2 * n as i64 + 2 * sum(&a) - 2 * a.len() as i64 + 1;
        let lhs = int(2 * n as i64 - 1) * self.open0(&multiset::with(&a, n), k as u32);
        let mut total = zero();
        for (b, c, w) in splittings(&a) {
            let ks = 2 * n as i64 + 2 * sum(&b) - 2 * b.len() as i64 - 1;
            let left = self.open0(&multiset::with(&b, n - 1), ks as u32);
            let right = self.open0(&c, (k - ks + 1) as u32);
            total += int(w as i64) * binomial(k - 1, ks - 1) * left * right;
        }
        Ok(VerificationReport::new(
            "open-kdv",
            format!("n={} a={} k={}", n, list(&a), k),
            lhs,
            int(2) * total,
        ))
    }
}

fn forced_open_genus(a: &[u32], k: u32) -> Result<u32> {
    genus_of_open(a, k).ok_or_else(|| Error::Domain(format!("no genus fits a={} k={}", list(a), k)))
}

fn stable_rest(g: u32, k: u32, l: usize) -> Result<()> {
    if 2 * g as i64 - 2 + k as i64 + 2 * l as i64 > 0 {
        Ok(())
    } else {
        Err(Error::Domain("identity needs 2g-2+k+2l > 0 for the remaining insertions".into()))
    }
}

/// Sorted multisets of `len` entries, each at least `min`, summing to `sum`.
pub fn fixed_sum_multisets(len: usize, sum: u32, min: u32) -> Vec<Vec<u32>> {
    fn go(len: usize, sum: u32, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            if sum == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let mut x = min;
        while x as u64 * len as u64 <= sum as u64 {
            prefix.push(x);
            go(len - 1, sum - x, x, prefix, out);
            prefix.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    go(len, sum, min, &mut Vec::new(), &mut out);
    out
}

/// `F^c_0` and `F^o_0` (no powers of `u`) from the genus-0 closed forms.
pub fn genus0_potentials(degree_cap: u32, descendent_cap: u32) -> (FormalSeries, FormalSeries) {
    let mut fc = FormalSeries::zero(degree_cap, descendent_cap);
    let mut fo = FormalSeries::zero(degree_cap, descendent_cap);
    for l in 3..=degree_cap as usize {
        for a in fixed_sum_multisets(l, l as u32 - 3, 0) {
            if a.last().is_some_and(|&x| x > descendent_cap) {
                continue;
            }
            let m = Monomial::from_indices(&a, 0, 0);
            let w = m.factorial_weight();
            fc.add_term(m, crate::closed::closed_genus0(&a) / w);
        }
    }
    for l in 0..=degree_cap as usize {
        for k in 0..=(degree_cap as usize - l) {
            let twice = k as i64 + 2 * l as i64 - 3;
            if twice < 0 || twice % 2 != 0 {
                continue;
            }
            for a in fixed_sum_multisets(l, (twice / 2) as u32, 0) {
                if a.last().is_some_and(|&x| x > descendent_cap) {
                    continue;
                }
                let v = crate::open::open_genus0_bracket(&a, k as u32);
                if v.is_zero() {
                    continue;
                }
                let m = Monomial::from_indices(&a, k as u32, 0);
                let w = m.factorial_weight();
                fo.add_term(m, v / w);
            }
        }
    }
    (fc, fo)
}

/// Derivative slot of an operator term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Slot {
    T(u32),
    S,
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// `Coeff_{u^{-1}} e^{-W} 𝓛_n e^{W}` for `W = u^{-2}F^c_0 + u^{-1}F^o_0`,
/// restricted to monomials of degree at most `degree_cap` in
/// `t_0..t_{descendent_cap}, s`. The conjugated operator is a sum over set
/// partitions of each term's derivatives of products of derivatives of `W`.
pub fn virasoro_genus0_residual(n: i32, degree_cap: u32, descendent_cap: u32) -> Result<FormalSeries> {
    let wide_cap = descendent_cap + n.max(0) as u32 + 1;
    let order = DiffOperator::open(n, wide_cap)?
        .terms()
        .iter()
        .map(|t| t.t_derivs.len() as u32 + t.s_deriv)
        .max()
        .unwrap_or(0);
    let (fc, fo) = genus0_potentials(degree_cap + order, wide_cap);
    virasoro_genus0_residual_of(n, degree_cap, descendent_cap, &fc, &fo)
}

/// Same residual for arbitrary genus-0 potentials. They need degree cap at
/// least `degree_cap` plus the operator's derivative order, and descendent cap at least
/// `descendent_cap + max(n, 0) + 1`.
pub fn virasoro_genus0_residual_of(
    n: i32,
    degree_cap: u32,
    descendent_cap: u32,
    fc: &FormalSeries,
    fo: &FormalSeries,
) -> Result<FormalSeries> {
    let wide_cap = descendent_cap + n.max(0) as u32 + 1;
    let op = DiffOperator::open(n, wide_cap)?;
    let fc = fc.retruncate(fc.degree_cap(), wide_cap);
    let fo = fo.retruncate(fc.degree_cap(), wide_cap);
    let w = fc.mul_u(-2).add(&fo.mul_u(-1))?;
    let mut derivs: HashMap<Vec<Slot>, FormalSeries> = HashMap::new();
    let mut out = FormalSeries::zero(degree_cap, wide_cap);
    for term in op.terms() {
        let slots: Vec<Slot> = term
            .t_derivs
            .iter()
            .map(|&i| Slot::T(i))
            .chain((0..term.s_deriv).map(|_| Slot::S))
            .collect();
        let mult = Monomial::new(
            &multiset::grouped(&term.t_mult).iter().map(|&(i, m)| (i, m)).collect::<Vec<_>>(),
            term.s_mult,
            term.u_power,
        );
        for partition in set_partitions(slots.len()) {
            // each block contributes u^{-1} (open) or, without s, also u^{-2}
            let blocks: Vec<Vec<Slot>> = partition
                .iter()
                .map(|b| {
                    let mut v: Vec<Slot> = b.iter().map(|&i| slots[i]).collect();
                    v.sort();
                    v
                })
                .collect();
            let lowest = term.u_power
                - blocks
                    .iter()
                    .map(|b| if b.contains(&Slot::S) { 1 } else { 2 })
                    .sum::<i32>();
            let highest = term.u_power - blocks.len() as i32;
            if !(lowest..=highest).contains(&-1) {
                continue;
            }
            let mut product = FormalSeries::monomial(degree_cap, wide_cap, Monomial::one(), int(1));
            for b in &blocks {
                if !derivs.contains_key(b) {
                    let mut d = w.clone();
                    for s in b {
                        d = match s {
                            Slot::T(i) => d.d_t(*i)?,
                            Slot::S => d.d_s(),
                        };
                    }
                    derivs.insert(b.clone(), d.retruncate(degree_cap, wide_cap));
                }
                product = product.mul(&derivs[b])?;
                if product.is_zero() {
                    break;
                }
            }
            let shifted = FormalSeries::monomial(degree_cap, wide_cap, mult.clone(), term.coeff.clone());
            out = out.add(&shifted.mul(&product)?)?;
        }
    }
    Ok(out
        .filter(|m| m.u_exp() == -1 && m.max_index().is_none_or(|i| i <= descendent_cap))
        .retruncate(degree_cap, descendent_cap))
}

/// Passes when every `u^{-1}` coefficient vanishes; the report shows the
/// first nonzero coefficient otherwise.
pub fn verify_virasoro_genus0(n: i32, degree_cap: u32, descendent_cap: u32) -> Result<VerificationReport> {
    let residual = virasoro_genus0_residual(n, degree_cap, descendent_cap)?;
    let (params, lhs) = match residual.terms().next() {
        None => (format!("n={} D={} N={}", n, degree_cap, descendent_cap), zero()),
        Some((m, c)) => (format!("n={} D={} N={} at {}", n, degree_cap, descendent_cap, m), c.clone()),
    };
    Ok(VerificationReport::new("virasoro-genus0", params, lhs, zero()))
}

/// The binomial identities equivalent to the genus-0 evaluation satisfying
/// TRR, open KdV, and the `𝓛_1`, `𝓛_2` constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinomialIdentity {
    Xxz,
    Xxzz,
    Vxxz2,
    Xz2,
}

impl BinomialIdentity {
    pub const ALL: [BinomialIdentity; 4] = [
        BinomialIdentity::Xxz,
        BinomialIdentity::Xxzz,
        BinomialIdentity::Vxxz2,
        BinomialIdentity::Xz2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinomialIdentity::Xxz => "xxz",
            BinomialIdentity::Xxzz => "xxzz",
            BinomialIdentity::Vxxz2 => "vxxz2",
            BinomialIdentity::Xz2 => "xz2",
        }
    }

    pub fn takes_n(self) -> bool {
        matches!(self, BinomialIdentity::Xxz | BinomialIdentity::Xxzz)
    }
}

impl FromStr for BinomialIdentity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinomialIdentity::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown binomial identity {}", s)))
    }
}

/// Ordered assignments of the indices `0..l` to `parts` blocks.
fn labeled_splits(l: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..l {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..parts).map(move |b| {
                    let mut q = p.clone();
                    q.push(b);
                    q
                })
            })
            .collect();
    }
    out
}

/// `(A_X, l_X)` for every block of an assignment.
fn block_sums(a: &[u32], assign: &[usize], parts: usize) -> Vec<(i64, i64)> {
    let mut out = vec![(0i64, 0i64); parts];
    for (x, &b) in a.iter().zip(assign) {
        out[b].0 += *x as i64;
        out[b].1 += 1;
    }
    out
}

pub fn verify_binomial(id: BinomialIdentity, n: Option<u32>, a: &[u32]) -> Result<VerificationReport> {
    if a.contains(&0) {
        return Err(Error::Domain("binomial identities need every a_i ≥ 1".into()));
    }
    let n = match (id.takes_n(), n) {
        (true, Some(n)) if n >= 1 => n as i64,
        (true, _) => return Err(Error::Domain(format!("{} needs n ≥ 1", id.name()))),
        (false, None) => 0,
        (false, Some(_)) => return Err(Error::Domain(format!("{} takes no n", id.name()))),
    };
    let big_a: i64 = a.iter().map(|&x| x as i64).sum();
    let l = a.len() as i64;
    let fact = |x: i64| factorial(x as u64);
    let (lhs, rhs) = match id {
        BinomialIdentity::Xxz | BinomialIdentity::Xxzz => {
            let lhs = match id {
                BinomialIdentity::Xxz => frac(2 * n + 2 * big_a - l, 2 * n - 1),
                _ => int(2 * n + 2 * big_a - l),
            };
            let shift = if id == BinomialIdentity::Xxz { 1 } else { 2 };
            let mut rhs = zero();
            for assign in labeled_splits(a.len(), 2) {
                let (a_s, l_s) = block_sums(a, &assign, 2)[0];
                let top = binomial(2 * n + 2 * big_a - 2 * l, 2 * n + 2 * a_s - 2 * l_s - shift);
                let bottom = binomial(2 * n + 2 * big_a - l - 1, 2 * n + 2 * a_s - l_s - 2);
                rhs += top / bottom;
            }
            if id == BinomialIdentity::Xxzz {
                rhs *= int(2);
            }
            (lhs, rhs)
        }
        BinomialIdentity::Vxxz2 => {
            let lhs = frac(20 + 8 * big_a - 8 * l, 4) * fact(3 + 2 * big_a - l);
            let mut rhs = zero();
            for assign in labeled_splits(a.len(), 2) {
                let sums = block_sums(a, &assign, 2);
                let (a_s, l_s) = sums[0];
                let (a_t, l_t) = sums[1];
                rhs += int(5 + 2 * big_a - 2 * l)
                    * binomial(4 + 2 * big_a - 2 * l, 2 + 2 * a_s - 2 * l_s)
                    * fact(1 + 2 * a_s - l_s)
                    * fact(1 + 2 * a_t - l_t);
            }
            (lhs, rhs)
        }
        BinomialIdentity::Xz2 => {
            let lhs = frac(42 + 12 * big_a - 12 * l, 8) * fact(5 + 2 * big_a - l);
            let mut rhs = zero();
            for assign in labeled_splits(a.len(), 3) {
                let sums = block_sums(a, &assign, 3);
                let parts: Vec<i64> = sums.iter().map(|&(x, y)| 2 + 2 * x - 2 * y).collect();
                let mut term = int(7 + 2 * big_a - 2 * l) * multinomial(6 + 2 * big_a - 2 * l, &parts);
                for &(x, y) in &sums {
                    term *= fact(1 + 2 * x - y);
                }
                rhs += term;
            }
            (lhs, rhs)
        }
    };
    let params = if id.takes_n() {
        format!("n={} a={}", n, list(a))
    } else {
        format!("a={}", list(a))
    };
    Ok(VerificationReport::new(id.name(), params, lhs, rhs))
}

/// Every identity family the sweeps know about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    OpenString,
    OpenDilaton,
    TrrI,
    TrrII,
    OpenKdv,
    VirasoroGenus0,
    Binomial(BinomialIdentity),
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::OpenString,
        Identity::OpenDilaton,
        Identity::TrrI,
        Identity::TrrII,
        Identity::OpenKdv,
        Identity::VirasoroGenus0,
        Identity::Binomial(BinomialIdentity::Xxz),
        Identity::Binomial(BinomialIdentity::Xxzz),
        Identity::Binomial(BinomialIdentity::Vxxz2),
        Identity::Binomial(BinomialIdentity::Xz2),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::OpenString => "open-string",
            Identity::OpenDilaton => "open-dilaton",
            Identity::TrrI => "trr1",
            Identity::TrrII => "trr2",
            Identity::OpenKdv => "open-kdv",
            Identity::VirasoroGenus0 => "virasoro-genus0",
            Identity::Binomial(b) => b.name(),
        }
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown identity {}", s)))
    }
}

/// Ranges of a sweep. Bracket identities cover every left-hand key with at
/// most `degree` insertions (`l + k`); string and dilaton go up to genus
/// `max_genus`, the rest are genus 0. Virasoro uses `operators` at degree
/// cap `degree` and descendent cap `descendent_cap`. Binomial identities
/// use `a_i ≥ 1` with `A ≤ max_a`, `l ≤ max_l`, `1 ≤ n ≤ max_n`.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub degree: u32,
    pub max_genus: u32,
    pub operators: Vec<i32>,
    pub descendent_cap: Option<u32>,
    pub max_a: u32,
    pub max_l: u32,
    pub max_n: u32,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            degree: 10,
            max_genus: 2,
            operators: (-1..=4).collect(),
            descendent_cap: None,
            max_a: 6,
            max_l: 4,
            max_n: 4,
        }
    }
}

/// Left-hand keys `(b, k)` of genus `g` with `|b| = l` fixed and
/// `l + k ≤ degree`.
fn keys_of_genus(g: u32, l: usize, degree: u32) -> Vec<(Vec<u32>, u32)> {
    let mut out = Vec::new();
    if l as u32 > degree {
        return out;
    }
    for k in 0..=(degree - l as u32) {
        let twice = 3 * g as i64 - 3 + k as i64 + 2 * l as i64;
        if twice < 0 || twice % 2 != 0 {
            continue;
        }
        for b in fixed_sum_multisets(l, (twice / 2) as u32, 0) {
            out.push((b, k));
        }
    }
    out
}

fn distinct(b: &[u32]) -> Vec<u32> {
    let mut v = b.to_vec();
    v.dedup();
    v
}

pub fn sweep(identity: Identity, opts: &SweepOptions) -> Result<Vec<VerificationReport>> {
    let mut v = Verifier::new();
    let mut out = Vec::new();
    let d = opts.degree;
    match identity {
        Identity::OpenString | Identity::OpenDilaton => {
            let marker = if identity == Identity::OpenString { 0 } else { 1 };
            for g in 0..=opts.max_genus {
                for l in 1..=d as usize {
                    for (b, k) in keys_of_genus(g, l, d) {
                        if !b.contains(&marker) || 2 * g as i64 - 2 + k as i64 + 2 * (l as i64 - 1) <= 0 {
                            continue;
                        }
                        out.push(if marker == 0 { v.string(&b, k)? } else { v.dilaton(&b, k)? });
                    }
                }
            }
        }
        Identity::TrrI => {
            for l in 1..=d as usize {
                for (b, k) in keys_of_genus(0, l, d) {
                    if k == 0 {
                        continue;
                    }
                    for n in distinct(&b).into_iter().filter(|&x| x >= 1) {
                        let a = multiset::without(&b, n).unwrap();
                        out.push(v.trr(Trr::I, n, None, &a, k)?);
                    }
                }
            }
        }
        Identity::TrrII => {
            for l in 2..=d as usize {
                for (b, k) in keys_of_genus(0, l, d) {
                    for n in distinct(&b).into_iter().filter(|&x| x >= 1) {
                        let rest = multiset::without(&b, n).unwrap();
                        for m in distinct(&rest) {
                            let a = multiset::without(&rest, m).unwrap();
                            out.push(v.trr(Trr::II, n, Some(m), &a, k)?);
                        }
                    }
                }
            }
        }
        Identity::OpenKdv => {
            // 1 + l + k ≤ d with k = 2n + 2A - 2l + 1
            for l in 0..d as usize {
                let mut n = 1u32;
                loop {
                    let min_k = 2 * n as i64 + 1;
                    if 1 + l as i64 + min_k > d as i64 {
                        break;
                    }
                    let mut extra = 0u32;
                    loop {
                        let k = min_k + 2 * extra as i64;
                        if 1 + l as i64 + k > d as i64 {
                            break;
                        }
                        for a in fixed_sum_multisets(l, l as u32 + extra, 1) {
                            out.push(v.open_kdv_coeff(n, &a)?);
                        }
                        extra += 1;
                    }
                    n += 1;
                }
            }
        }
        Identity::VirasoroGenus0 => {
            let cap = opts.descendent_cap.unwrap_or(d);
            for &n in &opts.operators {
                out.push(verify_virasoro_genus0(n, d, cap)?);
            }
        }
        Identity::Binomial(b) => {
            let ns: Vec<Option<u32>> = if b.takes_n() {
                (1..=opts.max_n).map(Some).collect()
            } else {
                vec![None]
            };
            for l in 0..=opts.max_l as usize {
                for total in l as u32..=opts.max_a {
                    for a in fixed_sum_multisets(l, total, 1) {
                        for &n in &ns {
                            out.push(verify_binomial(b, n, &a)?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Both sides of a TRR as series: for TRR I, `∂_n∂_s F^o_0` and
/// `∂_{n-1}∂_0F^c_0·∂_0∂_sF^o_0 + ∂_{n-1}F^o_0·∂_s²F^o_0`; for TRR II
/// the same with `∂_m` in place of `∂_s` on the left factors. Exact up to
/// degree `degree_cap - 2`.
pub fn trr_double_bracket(
    variant: Trr,
    n: u32,
    m: Option<u32>,
    degree_cap: u32,
    descendent_cap: u32,
) -> Result<(FormalSeries, FormalSeries)> {
    if n == 0 {
        return Err(Error::Domain("TRR needs n ≥ 1".into()));
    }
    let (fc, fo) = genus0_potentials(degree_cap, descendent_cap);
    let second = |f: &FormalSeries| -> Result<FormalSeries> {
        match variant {
            Trr::I => Ok(f.d_s()),
            Trr::II => f.d_t(m.ok_or_else(|| Error::Domain("TRR II needs m".into()))?),
        }
    };
    let lhs = second(&fo.d_t(n)?)?;
    let rhs = fc
        .d_t(n - 1)?
        .d_t(0)?
        .mul(&second(&fo.d_t(0)?)?)?
        .add(&fo.d_t(n - 1)?.mul(&second(&fo.d_s())?)?)?;
    let window = degree_cap.saturating_sub(2);
    Ok((lhs.filter(|x| x.degree() <= window), rhs.filter(|x| x.degree() <= window)))
}
