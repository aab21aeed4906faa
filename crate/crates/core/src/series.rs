//! Truncated series in `t_0..t_N`, `s` and a Laurent variable `u`.
//!
//! Truncation is by total `(t,s)`-degree; `u` is never truncated.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, ExactRational};

/// Monomial `u^e t^A s^k`. Exponents of `t` are stored densely with no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    t: Vec<u32>,
    s: u32,
    u: i32,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(t: &[(u32, u32)], s: u32, u: i32) -> Self {
        let mut m = Monomial { t: Vec::new(), s, u };
        for &(i, n) in t {
            m.add_t(i, n);
        }
        m
    }

    /// `t_{a_1} ... t_{a_l} s^k u^e` from a multiset of indices.
    pub fn from_indices(a: &[u32], s: u32, u: i32) -> Self {
        let mut m = Monomial { t: Vec::new(), s, u };
        for &i in a {
            m.add_t(i, 1);
        }
        m
    }

    pub fn t(i: u32) -> Self {
        Self::new(&[(i, 1)], 0, 0)
    }

    pub fn s() -> Self {
        Self::new(&[], 1, 0)
    }

    fn add_t(&mut self, i: u32, n: u32) {
        let i = i as usize;
        if n == 0 {
            return;
        }
        if self.t.len() <= i {
            self.t.resize(i + 1, 0);
        }
        self.t[i] += n;
    }

    fn trim(&mut self) {
        while self.t.last() == Some(&0) {
            self.t.pop();
        }
    }

    pub fn t_exp(&self, i: u32) -> u32 {
        self.t.get(i as usize).copied().unwrap_or(0)
    }

    pub fn s_exp(&self) -> u32 {
        self.s
    }

    pub fn u_exp(&self) -> i32 {
        self.u
    }

    /// Pairs `(i, n)` with `n > 0`.
    pub fn t_exps(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.t
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (i as u32, n))
    }

    /// Indices with multiplicity, sorted.
    pub fn t_indices(&self) -> Vec<u32> {
        let mut v = Vec::new();
        for (i, n) in self.t_exps() {
            for _ in 0..n {
                v.push(i);
            }
        }
        v
    }

    pub fn degree(&self) -> u32 {
        self.t.iter().sum::<u32>() + self.s
    }

    pub fn max_index(&self) -> Option<u32> {
        if self.t.is_empty() {
            None
        } else {
            Some(self.t.len() as u32 - 1)
        }
    }

    /// `t!` times `s!`, the normalization of a bracket coefficient.
    pub fn factorial_weight(&self) -> ExactRational {
        let mut acc = crate::rational::factorial(self.s as u64);
        for &n in &self.t {
            acc *= crate::rational::factorial(n as u64);
        }
        acc
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.t.len() >= other.t.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut t = long.t.clone();
        for (i, &n) in short.t.iter().enumerate() {
            t[i] += n;
        }
        Monomial {
            t,
            s: self.s + other.s,
            u: self.u + other.u,
        }
    }

    pub fn with_u(mut self, u: i32) -> Self {
        self.u = u;
        self
    }

    pub(crate) fn shift(&self, t_mult: &[u32], s_mult: u32, u: i32) -> Monomial {
        let mut m = self.clone();
        for &i in t_mult {
            m.add_t(i, 1);
        }
        m.s += s_mult;
        m.u += u;
        m
    }

    /// Applies `prod ∂_{t_i}` and `∂_s^k`; returns the falling-factorial
    /// factor and the new monomial, or `None` if it is annihilated.
    pub(crate) fn differentiate(&self, t_derivs: &[u32], s_order: u32) -> Option<(u64, Monomial)> {
        let mut m = self.clone();
        let mut factor = 1u64;
        for &i in t_derivs {
            let e = m.t.get(i as usize).copied().unwrap_or(0);
            if e == 0 {
                return None;
            }
            factor *= e as u64;
            m.t[i as usize] -= 1;
        }
        if m.s < s_order {
            return None;
        }
        for j in 0..s_order {
            factor *= (m.s - j) as u64;
        }
        m.s -= s_order;
        m.trim();
        Some((factor, m))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.s.cmp(&other.s))
            .then_with(|| {
                let n = self.t.len().max(other.t.len());
                for i in 0..n {
                    let a = self.t.get(i).copied().unwrap_or(0);
                    let b = other.t.get(i).copied().unwrap_or(0);
                    match a.cmp(&b) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
            .then(self.u.cmp(&other.u))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.u != 0 {
            parts.push(format!("u^{}", self.u));
        }
        for (i, n) in self.t_exps() {
            parts.push(format!("t{}^{}", i, n));
        }
        if self.s > 0 {
            parts.push(format!("s^{}", self.s));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// The actions of [`FormalSeries::calculus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesAction {
    DT(u32),
    DS,
    MulT(u32),
    MulS,
    MulU(i32),
}

/// Series truncated at total degree `degree_cap` in variables `t_0..t_N, s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    degree_cap: u32,
    descendent_cap: u32,
    coeffs: BTreeMap<Monomial, ExactRational>,
}

impl FormalSeries {
    pub fn zero(degree_cap: u32, descendent_cap: u32) -> Self {
        FormalSeries {
            degree_cap,
            descendent_cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(degree_cap: u32, descendent_cap: u32) -> Self {
        Self::monomial(degree_cap, descendent_cap, Monomial::one(), int(1))
    }

    /// Single term; dropped if it lies outside the caps.
    pub fn monomial(degree_cap: u32, descendent_cap: u32, m: Monomial, c: ExactRational) -> Self {
        let mut f = Self::zero(degree_cap, descendent_cap);
        f.add_term(m, c);
        f
    }

    pub fn from_terms<I>(degree_cap: u32, descendent_cap: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, ExactRational)>,
    {
        let mut f = Self::zero(degree_cap, descendent_cap);
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn descendent_cap(&self) -> u32 {
        self.descendent_cap
    }

    pub fn fits(&self, m: &Monomial) -> bool {
        m.degree() <= self.degree_cap && m.max_index().is_none_or(|i| i <= self.descendent_cap)
    }

    /// Adds `c·m`, keeping the no-zero invariant; out-of-cap terms vanish.
    pub fn add_term(&mut self, m: Monomial, c: ExactRational) {
        if c.is_zero() || !self.fits(&m) {
            return;
        }
        match self.coeffs.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, m: &Monomial) -> ExactRational {
        self.coeffs.get(m).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactRational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_caps(&self, other: &FormalSeries) -> Result<()> {
        if self.degree_cap != other.degree_cap || self.descendent_cap != other.descendent_cap {
            return Err(Error::CapMismatch(
                self.degree_cap,
                self.descendent_cap,
                other.degree_cap,
                other.descendent_cap,
            ));
        }
        Ok(())
    }

    fn from_map(degree_cap: u32, descendent_cap: u32, map: HashMap<Monomial, ExactRational>) -> Self {
        let mut f = Self::zero(degree_cap, descendent_cap);
        f.coeffs = map
            .into_iter()
            .filter(|(m, c)| !c.is_zero() && m.degree() <= degree_cap)
            .collect();
        f
    }

    pub fn add(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.check_caps(other)?;
        let mut f = self.clone();
        for (m, c) in &other.coeffs {
            f.add_term(m.clone(), c.clone());
        }
        Ok(f)
    }

    pub fn sub(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &ExactRational) -> FormalSeries {
        let mut f = Self::zero(self.degree_cap, self.descendent_cap);
        if c.is_zero() {
            return f;
        }
        f.coeffs = self.coeffs.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        f
    }

    fn by_degree(&self) -> Vec<Vec<(&Monomial, &ExactRational)>> {
        let mut groups = vec![Vec::new(); self.degree_cap as usize + 1];
        for (m, c) in &self.coeffs {
            groups[m.degree() as usize].push((m, c));
        }
        groups
    }

    pub fn mul(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.check_caps(other)?;
        let a = self.by_degree();
        let b = other.by_degree();
        let cap = self.degree_cap as usize;
        let mut acc: HashMap<Monomial, ExactRational> = HashMap::new();
        for (da, ga) in a.iter().enumerate() {
            for gb in b.iter().take(cap - da + 1) {
                for (ma, ca) in ga {
                    for (mb, cb) in gb {
                        let m = ma.mul(mb);
                        let c = *ca * *cb;
                        match acc.get_mut(&m) {
                            Some(x) => *x += c,
                            None => {
                                acc.insert(m, c);
                            }
                        }
                    }
                }
            }
        }
        Ok(Self::from_map(self.degree_cap, self.descendent_cap, acc))
    }

    /// Partial derivative or multiplication by a variable.
    pub fn calculus(&self, action: SeriesAction) -> Result<FormalSeries> {
        let check = |i: u32| {
            if i > self.descendent_cap {
                Err(Error::DescendentCap {
                    index: i,
                    cap: self.descendent_cap,
                })
            } else {
                Ok(())
            }
        };
        let mut f = Self::zero(self.degree_cap, self.descendent_cap);
        match action {
            SeriesAction::DT(i) => {
                check(i)?;
                for (m, c) in &self.coeffs {
                    if let Some((k, m2)) = m.differentiate(&[i], 0) {
                        f.add_term(m2, c * int(k as i64));
                    }
                }
            }
            SeriesAction::DS => {
                for (m, c) in &self.coeffs {
                    if let Some((k, m2)) = m.differentiate(&[], 1) {
                        f.add_term(m2, c * int(k as i64));
                    }
                }
            }
            SeriesAction::MulT(i) => {
                check(i)?;
                for (m, c) in &self.coeffs {
                    f.add_term(m.shift(&[i], 0, 0), c.clone());
                }
            }
            SeriesAction::MulS => {
                for (m, c) in &self.coeffs {
                    f.add_term(m.shift(&[], 1, 0), c.clone());
                }
            }
            SeriesAction::MulU(e) => {
                for (m, c) in &self.coeffs {
                    f.add_term(m.shift(&[], 0, e), c.clone());
                }
            }
        }
        Ok(f)
    }

    pub fn d_t(&self, i: u32) -> Result<FormalSeries> {
        self.calculus(SeriesAction::DT(i))
    }

    pub fn d_s(&self) -> FormalSeries {
        self.calculus(SeriesAction::DS).expect("d_s has no cap precondition")
    }

    pub fn mul_u(&self, e: i32) -> FormalSeries {
        self.calculus(SeriesAction::MulU(e)).expect("u has no cap")
    }

    /// Truncated exponential. Uses `Θ e^f = (Θ f) e^f` for the Euler
    /// grading `Θ`, which gives the same terms as `Σ f^m/m!`.
    pub fn exp(&self) -> Result<FormalSeries> {
        if self.coeffs.keys().any(|m| m.degree() == 0) {
            return Err(Error::ConstantTerm);
        }
        let cap = self.degree_cap as usize;
        let f = self.by_degree();
        let mut e: Vec<HashMap<Monomial, ExactRational>> = vec![HashMap::new(); cap + 1];
        e[0].insert(Monomial::one(), ExactRational::one());
        for d in 1..=cap {
            let mut acc: HashMap<Monomial, ExactRational> = HashMap::new();
            for j in 1..=d {
                let weight = int(j as i64);
                for (mf, cf) in &f[j] {
                    let cw = *cf * &weight;
                    for (me, ce) in &e[d - j] {
                        let m = mf.mul(me);
                        let c = &cw * ce;
                        match acc.get_mut(&m) {
                            Some(x) => *x += c,
                            None => {
                                acc.insert(m, c);
                            }
                        }
                    }
                }
            }
            let inv = int(d as i64);
            e[d] = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, c / &inv))
                .collect();
        }
        let mut out = Self::zero(self.degree_cap, self.descendent_cap);
        for part in e {
            out.coeffs.extend(part);
        }
        Ok(out)
    }

    /// Same series with new caps; terms outside the new caps are dropped.
    pub fn retruncate(&self, degree_cap: u32, descendent_cap: u32) -> FormalSeries {
        let mut f = Self::zero(degree_cap, descendent_cap);
        for (m, c) in &self.coeffs {
            f.add_term(m.clone(), c.clone());
        }
        f
    }

    /// Terms whose monomial satisfies `keep`.
    pub fn filter<P: Fn(&Monomial) -> bool>(&self, keep: P) -> FormalSeries {
        let mut f = Self::zero(self.degree_cap, self.descendent_cap);
        f.coeffs = self
            .coeffs
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        f
    }

    /// Canonical text dump, one line per monomial.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return writeln!(f, "0");
        }
        for (m, c) in &self.coeffs {
            writeln!(f, "{} : {}", m, c)?;
        }
        Ok(())
    }
}
