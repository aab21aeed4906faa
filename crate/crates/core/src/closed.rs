//! Closed descendent integrals `⟨τ_{a_1}···τ_{a_l}⟩_g`.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::{self, splittings};
use crate::operator::{leading_coefficient, second_derivative_coefficient, shift_coefficient};
use crate::rational::{factorial, frac, int, zero, ExactRational};
use crate::series::{FormalSeries, Monomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Closed,
    Open,
}

/// Index of one intersection number, stored canonically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BracketKey {
    pub sector: Sector,
    pub genus: u32,
    pub descendents: Vec<u32>,
    pub boundary: u32,
}

impl BracketKey {
    pub fn closed(genus: u32, a: &[u32]) -> Self {
        BracketKey {
            sector: Sector::Closed,
            genus,
            descendents: multiset::sorted(a),
            boundary: 0,
        }
    }

    pub fn open(genus: u32, a: &[u32], k: u32) -> Self {
        BracketKey {
            sector: Sector::Open,
            genus,
            descendents: multiset::sorted(a),
            boundary: k,
        }
    }

    pub fn new(sector: Sector, genus: u32, a: &[u32], k: u32) -> Result<Self> {
        match sector {
            Sector::Closed if k != 0 => Err(Error::Domain("closed brackets carry no boundary points".into())),
            Sector::Closed => Ok(Self::closed(genus, a)),
            Sector::Open => Ok(Self::open(genus, a, k)),
        }
    }
}

impl std::fmt::Display for BracketKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "⟨")?;
        for a in &self.descendents {
            write!(f, "τ_{}", a)?;
        }
        if self.boundary > 0 {
            write!(f, "σ^{}", self.boundary)?;
        }
        let tag = match self.sector {
            Sector::Closed => "c",
            Sector::Open => "o",
        };
        write!(f, "⟩_{}^{}", self.genus, tag)
    }
}

/// The genus forced by `Σa = 3g-3+l`, if any.
pub fn genus_of_closed(a: &[u32]) -> Option<u32> {
    let num = a.iter().map(|&x| x as i64).sum::<i64>() - a.len() as i64 + 3;
    if num < 0 || num % 3 != 0 {
        return None;
    }
    Some((num / 3) as u32)
}

fn closed_stable(g: u32, l: usize) -> bool {
    2 * g as i64 - 2 + l as i64 > 0
}

/// `(l-3)! / Π a_i!` when `Σa = l-3`, else zero.
pub fn closed_genus0(a: &[u32]) -> ExactRational {
    let l = a.len() as i64;
    if l < 3 || a.iter().map(|&x| x as i64).sum::<i64>() != l - 3 {
        return zero();
    }
    let mut v = factorial((l - 3) as u64);
    for &x in a {
        v /= factorial(x as u64);
    }
    v
}

/// Memoized solver for closed brackets from the Virasoro constraints.
#[derive(Debug, Default, Clone)]
pub struct ClosedSolver {
    memo: HashMap<Vec<u32>, ExactRational>,
}

impl ClosedSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// `⟨τ_A⟩_g`; zero when `g` is not the forced genus.
    pub fn bracket(&mut self, g: u32, a: &[u32]) -> ExactRational {
        let a = multiset::sorted(a);
        if genus_of_closed(&a) != Some(g) {
            return zero();
        }
        self.value(&a)
    }

    /// Value at the forced genus of a sorted multiset.
    pub(crate) fn value(&mut self, a: &[u32]) -> ExactRational {
        let g = match genus_of_closed(a) {
            Some(g) => g,
            None => return zero(),
        };
        if !closed_stable(g, a.len()) {
            return zero();
        }
        if let Some(v) = self.memo.get(a) {
            return v.clone();
        }
        let v = self.solve(a, g);
        self.memo.insert(a.to_vec(), v.clone());
        v
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Isolates `τ_{n+1}` (the largest index) from the `L_n` constraint.
    fn solve(&mut self, a: &[u32], g: u32) -> ExactRational {
        let top = *a.last().expect("stable bracket is nonempty");
        if top == 0 {
            // only ⟨τ_0³⟩_0 survives among all-zero brackets
            return if g == 0 && a.len() == 3 { int(1) } else { zero() };
        }
        // L_{-1} and L_0 first: they strip τ_0 and τ_1 without adding insertions
        let rest = &a[1..];
        if a[0] == 0 && closed_stable(g, rest.len()) {
            let mut acc = zero();
            for (x, m) in multiset::grouped(rest) {
                if x > 0 {
                    let r = multiset::with(&multiset::without(rest, x).unwrap(), x - 1);
                    acc += int(m as i64) * self.value(&r);
                }
            }
            return acc;
        }
        if a[0] == 1 && closed_stable(g, rest.len()) {
            return int(2 * g as i64 - 2 + rest.len() as i64) * self.value(rest);
        }
        let n = top as i32 - 1;
        let rest = multiset::without(a, top).unwrap();
        let mut acc = zero();
        for (x, m) in multiset::grouped(&rest) {
            let reduced = multiset::with(&multiset::without(&rest, x).unwrap(), x + n as u32);
            let v = self.value(&reduced);
            if !v.is_zero() {
                acc += shift_coefficient(n, x) * int(m as i64) * v;
            }
        }
        for i in 0..n.max(0) as u32 {
            let j = n as u32 - 1 - i;
            let e = second_derivative_coefficient(n, i) * frac(1, 2);
            let mut inner = self.value(&multiset::with(&multiset::with(&rest, i), j));
            for (b, c, w) in splittings(&rest) {
                let left = self.value(&multiset::with(&b, i));
                if left.is_zero() {
                    continue;
                }
                let right = self.value(&multiset::with(&c, j));
                inner += left * right * int(w as i64);
            }
            acc += e * inner;
        }
        if n == 0 && rest.is_empty() {
            acc += frac(1, 16);
        }
        acc / leading_coefficient(n)
    }
}

/// Truncated `F^c = Σ u^{2g-2} ⟨τ_A⟩_g t^A / A!`.
pub fn build_fc(solver: &mut ClosedSolver, degree_cap: u32, descendent_cap: u32) -> FormalSeries {
    let mut f = FormalSeries::zero(degree_cap, descendent_cap);
    for a in multiset::all_multisets(degree_cap as usize, descendent_cap) {
        let g = match genus_of_closed(&a) {
            Some(g) => g,
            None => continue,
        };
        let v = solver.value(&a);
        if v.is_zero() {
            continue;
        }
        let m = Monomial::from_indices(&a, 0, 2 * g as i32 - 2);
        let w = m.factorial_weight();
        f.add_term(m, v / w);
    }
    f
}

/// Checks
/// `(2n+1) u^{-2} ∂_n∂_0²F = ∂_{n-1}∂_0F·∂_0³F + 2∂_{n-1}∂_0²F·∂_0²F + ¼∂_{n-1}∂_0⁴F`
/// on `F^c` built at the given caps, over the degrees where every term is
/// exact (`≤ D-5`).
pub fn check_closed_kdv(solver: &mut ClosedSolver, n: u32, degree_cap: u32, descendent_cap: u32) -> Result<bool> {
    Ok(closed_kdv_residual(solver, n, degree_cap, descendent_cap)?.is_zero())
}

pub fn closed_kdv_residual(
    solver: &mut ClosedSolver,
    n: u32,
    degree_cap: u32,
    descendent_cap: u32,
) -> Result<FormalSeries> {
    if n == 0 {
        return Err(Error::Domain("closed KdV needs n ≥ 1".into()));
    }
    if n > descendent_cap {
        return Err(Error::DescendentCap {
            index: n,
            cap: descendent_cap,
        });
    }
    let f = build_fc(solver, degree_cap, descendent_cap);
    let d = |s: &FormalSeries, idx: &[u32]| -> Result<FormalSeries> {
        let mut out = s.clone();
        for &i in idx {
            out = out.d_t(i)?;
        }
        Ok(out)
    };
    let lhs = d(&f, &[n, 0, 0])?.mul_u(-2).scale(&int(2 * n as i64 + 1));
    let rhs = d(&f, &[n - 1, 0])?
        .mul(&d(&f, &[0, 0, 0])?)?
        .add(&d(&f, &[n - 1, 0, 0])?.mul(&d(&f, &[0, 0])?)?.scale(&int(2)))?
        .add(&d(&f, &[n - 1, 0, 0, 0, 0])?.scale(&frac(1, 4)))?;
    let window = degree_cap.saturating_sub(5);
    let exact = degree_cap >= 5;
    Ok(lhs.sub(&rhs)?.filter(|m| exact && m.degree() <= window))
}
