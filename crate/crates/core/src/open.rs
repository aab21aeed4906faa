//! Open descendent integrals `⟨τ_{a_1}···τ_{a_l}σ^k⟩_g`.
//!
//! Two independent all-genus solvers: [`OpenSolver`] propagates the open
//! Virasoro constraints, [`OpenKdvSolver`] the open KdV equations with the
//! open string equation. Both start from `⟨σ³⟩_0 = 1` and the closed theory.

use std::collections::{HashMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::closed::{genus_of_closed, BracketKey, ClosedSolver, Sector};
use crate::error::{Error, Result};
use crate::multiset::{self, splittings};
use crate::operator::{leading_coefficient, second_derivative_coefficient, shift_coefficient};
use crate::rational::{binomial, factorial, frac, int, odd_double_factorial, zero, ExactRational};
use crate::series::{FormalSeries, Monomial};

/// The genus forced by `2Σa = 3g-3+k+2l`, if any.
pub fn genus_of_open(a: &[u32], k: u32) -> Option<u32> {
    let num = 2 * a.iter().map(|&x| x as i64).sum::<i64>() - k as i64 - 2 * a.len() as i64 + 3;
    if num < 0 || num % 3 != 0 {
        return None;
    }
    Some((num / 3) as u32)
}

fn open_stable(g: u32, k: u32, l: usize) -> bool {
    2 * g as i64 - 2 + k as i64 + 2 * l as i64 > 0
}

/// `(Σ2a_i - l + 1)! / Π(2a_i - 1)!!` for `a_i ≥ 1`; this is the genus-0
/// bracket with `k = 2Σa_i + 3 - 2l`.
pub fn open_genus0_closed_form(a: &[u32]) -> Result<ExactRational> {
    if a.contains(&0) {
        return Err(Error::Domain("closed form needs every a_i ≥ 1".into()));
    }
    let top = 2 * a.iter().map(|&x| x as i64).sum::<i64>() - a.len() as i64 + 1;
    let mut v = factorial(top as u64);
    for &x in a {
        v /= odd_double_factorial(x as u64);
    }
    Ok(v)
}

/// Genus-0 open bracket via the string equation and the closed form.
pub fn open_genus0_bracket(a: &[u32], k: u32) -> ExactRational {
    let a = multiset::sorted(a);
    if genus_of_open(&a, k) != Some(0) || !open_stable(0, k, a.len()) {
        return zero();
    }
    match multiset::without(&a, 0) {
        None => open_genus0_closed_form(&a).expect("no zero indices"),
        Some(rest) => {
            if rest.is_empty() {
                return if k == 1 { int(1) } else { zero() };
            }
            let mut acc = zero();
            for (x, m) in multiset::grouped(&rest) {
                if x == 0 {
                    continue;
                }
                let r = multiset::with(&multiset::without(&rest, x).unwrap(), x - 1);
                acc += int(m as i64) * open_genus0_bracket(&r, k);
            }
            acc
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Proved,
    Conjectural,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Proved => write!(f, "proved"),
            Provenance::Conjectural => write!(f, "conjectural"),
        }
    }
}

/// Closed values and open genus-0 values are theorems; `⟨τ_1⟩_1 = 1/2` is
/// computed directly. Everything else in the open sector rests on the open
/// Virasoro/KdV conjectures.
pub fn provenance(key: &BracketKey) -> Provenance {
    match key.sector {
        Sector::Closed => Provenance::Proved,
        Sector::Open if key.genus == 0 => Provenance::Proved,
        Sector::Open if key.genus == 1 && key.descendents == [1] && key.boundary == 0 => Provenance::Proved,
        Sector::Open => Provenance::Conjectural,
    }
}

type OpenKey = (Vec<u32>, u32);

/// Shared state of both open solvers: the closed solver and a memo with a
/// guard against cyclic dependencies.
#[derive(Debug, Default, Clone)]
struct Memo {
    values: HashMap<OpenKey, ExactRational>,
    active: HashSet<OpenKey>,
}

impl Memo {
    fn enter(&mut self, key: &OpenKey) {
        if !self.active.insert(key.clone()) {
            panic!("cyclic dependency at {:?}", key);
        }
    }

    fn leave(&mut self, key: OpenKey, v: &ExactRational) {
        self.active.remove(&key);
        self.values.insert(key, v.clone());
    }
}

/// Open brackets from the constraints `𝓛_n exp(F^c + F^o) = 0`.
#[derive(Debug, Clone)]
pub struct OpenSolver {
    closed: ClosedSolver,
    memo: Memo,
    y_memo: HashMap<(u32, Vec<u32>, u32), ExactRational>,
    genus0_shortcut: bool,
}

impl Default for OpenSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl OpenSolver {
    /// Genus-0 values come from [`open_genus0_bracket`]; higher genus from
    /// the constraints.
    pub fn new() -> Self {
        OpenSolver {
            closed: ClosedSolver::new(),
            memo: Memo::default(),
            y_memo: HashMap::new(),
            genus0_shortcut: true,
        }
    }

    /// Every genus, genus 0 included, from the constraints alone.
    pub fn constraints_only() -> Self {
        OpenSolver {
            genus0_shortcut: false,
            ..Self::new()
        }
    }

    pub fn closed(&mut self) -> &mut ClosedSolver {
        &mut self.closed
    }

    pub fn bracket(&mut self, g: u32, a: &[u32], k: u32) -> ExactRational {
        let a = multiset::sorted(a);
        if genus_of_open(&a, k) != Some(g) {
            return zero();
        }
        self.value(&a, k)
    }

    pub(crate) fn value(&mut self, a: &[u32], k: u32) -> ExactRational {
        let g = match genus_of_open(a, k) {
            Some(g) => g,
            None => return zero(),
        };
        if !open_stable(g, k, a.len()) {
            return zero();
        }
        if g == 0 && self.genus0_shortcut {
            return open_genus0_bracket(a, k);
        }
        let key = (a.to_vec(), k);
        if let Some(v) = self.memo.values.get(&key) {
            return v.clone();
        }
        self.memo.enter(&key);
        let v = self.solve(a, k);
        self.memo.leave(key, &v);
        v
    }

    fn closed_value(&mut self, a: &[u32]) -> ExactRational {
        if genus_of_closed(a).is_none() {
            return zero();
        }
        self.closed.value(a)
    }

    /// Coefficient of `t^A s^k / (A! k!)` in `e^{-F^o} ∂_s^m e^{F^o}`.
    fn y(&mut self, m: u32, a: &[u32], k: u32) -> ExactRational {
        if m == 0 {
            return if a.is_empty() && k == 0 { int(1) } else { zero() };
        }
        let key = (m, a.to_vec(), k);
        if let Some(v) = self.y_memo.get(&key) {
            return v.clone();
        }
        let mut acc = self.y(m - 1, a, k + 1);
        for (b, c, w) in splittings(a) {
            for k1 in 0..=k {
                let left = self.value(&b, k1 + 1);
                if left.is_zero() {
                    continue;
                }
                let right = self.y(m - 1, &c, k - k1);
                if right.is_zero() {
                    continue;
                }
                acc += left * right * binomial(k as i64, k1 as i64) * int(w as i64);
            }
        }
        self.y_memo.insert(key, acc.clone());
        acc
    }

    /// Isolates `τ_{n+1}` (the largest index) from the `𝓛_n` constraint.
    fn solve(&mut self, a: &[u32], k: u32) -> ExactRational {
        let top = match a.last() {
            Some(&t) => t,
            None => return if k == 3 { int(1) } else { zero() },
        };
        let n = top as i32 - 1;
        let rest = multiset::without(a, top).unwrap();
        let mut acc = zero();
        for (x, m) in multiset::grouped(&rest) {
            if x as i32 + n < 0 {
                continue;
            }
            let r = multiset::with(&multiset::without(&rest, x).unwrap(), (x as i32 + n) as u32);
            let v = self.value(&r, k);
            if !v.is_zero() {
                acc += shift_coefficient(n, x) * int(m as i64) * v;
            }
        }
        for i in 0..n.max(0) as u32 {
            let j = n as u32 - 1 - i;
            let e = second_derivative_coefficient(n, i) * frac(1, 2);
            let mut inner = self.value(&multiset::with(&multiset::with(&rest, i), j), k);
            for (b, c, w) in splittings(&rest) {
                let w = int(w as i64);
                let bi = multiset::with(&b, i);
                let cj = multiset::with(&c, j);
                let cl = self.closed_value(&bi);
                if !cl.is_zero() {
                    inner += &cl * self.value(&cj, k) * &w;
                }
                let cr = self.closed_value(&cj);
                if !cr.is_zero() {
                    inner += &cr * self.value(&bi, k) * &w;
                }
                for k1 in 0..=k {
                    let left = self.value(&bi, k1);
                    if left.is_zero() {
                        continue;
                    }
                    let right = self.value(&cj, k - k1);
                    inner += left * right * binomial(k as i64, k1 as i64) * &w;
                }
            }
            acc += e * inner;
        }
        if k >= 1 {
            acc += int(k as i64) * self.y((n + 1) as u32, &rest, k - 1);
        }
        if n >= 0 {
            acc += frac(3 * n as i64 + 3, 4) * self.y(n as u32, &rest, k);
        }
        acc / leading_coefficient(n)
    }

    pub fn build_fo(&mut self, degree_cap: u32, descendent_cap: u32) -> FormalSeries {
        build_open_series(degree_cap, descendent_cap, |a, k| self.value(a, k))
    }
}

/// Open brackets from the open KdV equations, with `τ_0` removed by the
/// open string equation.
#[derive(Debug, Default, Clone)]
pub struct OpenKdvSolver {
    closed: ClosedSolver,
    memo: Memo,
}

impl OpenKdvSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bracket(&mut self, g: u32, a: &[u32], k: u32) -> ExactRational {
        let a = multiset::sorted(a);
        if genus_of_open(&a, k) != Some(g) {
            return zero();
        }
        self.value(&a, k)
    }

    fn closed_value(&mut self, a: &[u32]) -> ExactRational {
        if genus_of_closed(a).is_none() {
            return zero();
        }
        self.closed.value(a)
    }

    pub(crate) fn value(&mut self, a: &[u32], k: u32) -> ExactRational {
        let g = match genus_of_open(a, k) {
            Some(g) => g,
            None => return zero(),
        };
        if !open_stable(g, k, a.len()) {
            return zero();
        }
        let key = (a.to_vec(), k);
        if let Some(v) = self.memo.values.get(&key) {
            return v.clone();
        }
        self.memo.enter(&key);
        let v = self.solve(a, k);
        self.memo.leave(key, &v);
        v
    }

    fn solve(&mut self, a: &[u32], k: u32) -> ExactRational {
        if a.is_empty() {
            return if k == 3 { int(1) } else { zero() };
        }
        if let Some(rest) = multiset::without(a, 0) {
            let mut acc = if rest.is_empty() && k == 1 { int(1) } else { zero() };
            for (x, m) in multiset::grouped(&rest) {
                if x == 0 {
                    continue;
                }
                let r = multiset::with(&multiset::without(&rest, x).unwrap(), x - 1);
                acc += int(m as i64) * self.value(&r, k);
            }
            return acc;
        }
        let n = *a.last().unwrap();
        let rest = multiset::without(a, n).unwrap();
        let mut acc = zero();
        for (b, c, w) in splittings(&rest) {
            let w = int(w as i64);
            let cl = self.closed_value(&multiset::with(&multiset::with(&b, n - 1), 0));
            if !cl.is_zero() {
                acc += cl * self.value(&multiset::with(&c, 0), k) * &w;
            }
            let bn = multiset::with(&b, n - 1);
            for k1 in 0..=k {
                let left = self.value(&bn, k1);
                if left.is_zero() {
                    continue;
                }
                let right = self.value(&c, k - k1 + 1);
                acc += int(2) * left * right * binomial(k as i64, k1 as i64) * &w;
            }
        }
        acc += int(2) * self.value(&multiset::with(&rest, n - 1), k + 1);
        if k == 0 {
            let c = multiset::with(&multiset::with(&multiset::with(&rest, n - 1), 0), 0);
            acc -= frac(1, 2) * self.closed_value(&c);
        }
        acc / int(2 * n as i64 + 1)
    }

    pub fn build_fo(&mut self, degree_cap: u32, descendent_cap: u32) -> FormalSeries {
        build_open_series(degree_cap, descendent_cap, |a, k| self.value(a, k))
    }
}

fn build_open_series<F>(degree_cap: u32, descendent_cap: u32, mut value: F) -> FormalSeries
where
    F: FnMut(&[u32], u32) -> ExactRational,
{
    let mut f = FormalSeries::zero(degree_cap, descendent_cap);
    for a in multiset::all_multisets(degree_cap as usize, descendent_cap) {
        for k in 0..=(degree_cap - a.len() as u32) {
            let g = match genus_of_open(&a, k) {
                Some(g) => g,
                None => continue,
            };
            let v = value(&a, k);
            if v.is_zero() {
                continue;
            }
            let m = Monomial::from_indices(&a, k, g as i32 - 1);
            let w = m.factorial_weight();
            f.add_term(m, v / w);
        }
    }
    f
}

/// Truncated `F^o` from the open Virasoro constraints.
pub fn build_fo(degree_cap: u32, descendent_cap: u32) -> FormalSeries {
    OpenSolver::new().build_fo(degree_cap, descendent_cap)
}

/// Truncated `F^o` from the open KdV equations.
pub fn build_fo_via_kdv(degree_cap: u32, descendent_cap: u32) -> FormalSeries {
    OpenKdvSolver::new().build_fo(degree_cap, descendent_cap)
}
