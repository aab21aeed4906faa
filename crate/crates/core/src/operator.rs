//! Differential operators `L_n` and their open extensions acting on
//! truncated series.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{frac, int, one, ExactRational};
use crate::series::{FormalSeries, Monomial};

/// `coeff · u^u_power · prod t_mult · s^s_mult · prod ∂_{t_i} · ∂_s^s_deriv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorTerm {
    pub coeff: ExactRational,
    pub u_power: i32,
    pub t_mult: Vec<u32>,
    pub s_mult: u32,
    pub t_derivs: Vec<u32>,
    pub s_deriv: u32,
}

impl OperatorTerm {
    fn new(coeff: ExactRational, u_power: i32, t_mult: &[u32], s_mult: u32, t_derivs: &[u32], s_deriv: u32) -> Self {
        let mut t_mult = t_mult.to_vec();
        t_mult.sort_unstable();
        let mut t_derivs = t_derivs.to_vec();
        t_derivs.sort_unstable();
        OperatorTerm {
            coeff,
            u_power,
            t_mult,
            s_mult,
            t_derivs,
            s_deriv,
        }
    }

    fn max_index(&self) -> Option<u32> {
        self.t_mult.iter().chain(&self.t_derivs).copied().max()
    }

    fn apply_monomial(&self, m: &Monomial) -> Option<(ExactRational, Monomial)> {
        let (factor, d) = m.differentiate(&self.t_derivs, self.s_deriv)?;
        let out = d.shift(&self.t_mult, self.s_mult, self.u_power);
        Some((&self.coeff * int(factor as i64), out))
    }
}

impl fmt::Display for OperatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.u_power != 0 {
            write!(f, " u^{}", self.u_power)?;
        }
        for i in &self.t_mult {
            write!(f, " t_{}", i)?;
        }
        match self.s_mult {
            0 => {}
            1 => write!(f, " s")?,
            k => write!(f, " s^{}", k)?,
        }
        for i in &self.t_derivs {
            write!(f, " ∂/∂t_{}", i)?;
        }
        match self.s_deriv {
            0 => {}
            1 => write!(f, " ∂/∂s")?,
            k => write!(f, " ∂^{}/∂s^{}", k, k)?,
        }
        Ok(())
    }
}

/// Finite sum of [`OperatorTerm`]s instantiated against a descendent cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOperator {
    descendent_cap: u32,
    terms: Vec<OperatorTerm>,
}

/// `3·5···(2n+3) / 2^(n+1)`.
pub fn leading_coefficient(n: i32) -> ExactRational {
    let mut acc = one();
    let mut j = 3;
    while j <= 2 * n + 3 {
        acc *= int(j as i64);
        j += 2;
    }
    acc / pow2(n + 1)
}

/// `(2i+1)(2i+3)···(2i+2n+1) / 2^(n+1)`.
pub fn shift_coefficient(n: i32, i: u32) -> ExactRational {
    let mut acc = one();
    for j in 0..=n {
        acc *= int(2 * i as i64 + 1 + 2 * j as i64);
    }
    acc / pow2(n + 1)
}

/// `(-1)^(i+1) (-2i-1)(-2i+1)···(-2i+2n-1) / 2^(n+1)`.
pub fn second_derivative_coefficient(n: i32, i: u32) -> ExactRational {
    let mut acc = if i.is_multiple_of(2) { int(-1) } else { one() };
    for j in 0..=n {
        acc *= int(-2 * i as i64 - 1 + 2 * j as i64);
    }
    acc / pow2(n + 1)
}

fn pow2(e: i32) -> ExactRational {
    let mut acc = one();
    for _ in 0..e {
        acc *= int(2);
    }
    acc
}

impl DiffOperator {
    pub fn new(descendent_cap: u32, terms: Vec<OperatorTerm>) -> Self {
        let terms = terms.into_iter().filter(|t| !t.coeff.is_zero()).collect();
        DiffOperator {
            descendent_cap,
            terms,
        }
    }

    /// `L_n`, keeping only terms whose indices are at most `cap`.
    pub fn closed(n: i32, cap: u32) -> Result<Self> {
        if n < -1 {
            return Err(Error::OperatorIndex(n));
        }
        let mut terms = Vec::new();
        terms.push(OperatorTerm::new(-leading_coefficient(n), 0, &[], 0, &[(n + 1) as u32], 0));
        let first = if n < 0 { 1 } else { 0 };
        for i in first..=cap {
            let target = i as i32 + n;
            terms.push(OperatorTerm::new(shift_coefficient(n, i), 0, &[i], 0, &[target as u32], 0));
        }
        for i in 0..n.max(0) as u32 {
            let j = n as u32 - 1 - i;
            let c = second_derivative_coefficient(n, i) * frac(1, 2);
            terms.push(OperatorTerm::new(c, 2, &[], 0, &[i, j], 0));
        }
        if n == -1 {
            terms.push(OperatorTerm::new(frac(1, 2), -2, &[0, 0], 0, &[], 0));
        }
        if n == 0 {
            terms.push(OperatorTerm::new(frac(1, 16), 0, &[], 0, &[], 0));
        }
        terms.retain(|t| t.max_index().is_none_or(|i| i <= cap));
        Ok(DiffOperator::new(cap, terms))
    }

    /// `L_n + u^n s ∂_s^(n+1) + (3n+3)/4 u^n ∂_s^n`.
    pub fn open(n: i32, cap: u32) -> Result<Self> {
        let mut op = Self::closed(n, cap)?;
        op.terms.push(OperatorTerm::new(one(), n, &[], 1, &[], (n + 1) as u32));
        if n >= 0 {
            op.terms.push(OperatorTerm::new(frac(3 * n as i64 + 3, 4), n, &[], 0, &[], n as u32));
        }
        Ok(op)
    }

    pub fn descendent_cap(&self) -> u32 {
        self.descendent_cap
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    /// Sum of the constant (multiplication-only, `u^0`) terms.
    pub fn constant_part(&self) -> ExactRational {
        self.terms
            .iter()
            .filter(|t| t.u_power == 0 && t.t_mult.is_empty() && t.s_mult == 0 && t.t_derivs.is_empty() && t.s_deriv == 0)
            .fold(ExactRational::zero(), |acc, t| acc + &t.coeff)
    }

    /// Coefficient of the pure `∂_{t_i}` term.
    pub fn derivative_coefficient(&self, i: u32) -> ExactRational {
        self.terms
            .iter()
            .filter(|t| t.u_power == 0 && t.t_mult.is_empty() && t.s_mult == 0 && t.t_derivs == [i] && t.s_deriv == 0)
            .fold(ExactRational::zero(), |acc, t| acc + &t.coeff)
    }

    pub fn apply(&self, f: &FormalSeries) -> Result<FormalSeries> {
        if let Some(i) = self.terms.iter().filter_map(|t| t.max_index()).max() {
            if i > f.descendent_cap() {
                return Err(Error::DescendentCap {
                    index: i,
                    cap: f.descendent_cap(),
                });
            }
        }
        let mut out = FormalSeries::zero(f.degree_cap(), f.descendent_cap());
        for (m, c) in f.terms() {
            for term in &self.terms {
                if let Some((k, m2)) = term.apply_monomial(m) {
                    out.add_term(m2, k * c);
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &ExactRational) -> DiffOperator {
        let terms = self
            .terms
            .iter()
            .map(|t| OperatorTerm {
                coeff: &t.coeff * c,
                ..t.clone()
            })
            .collect();
        DiffOperator::new(self.descendent_cap, terms)
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{}", t)?;
        }
        Ok(())
    }
}

/// `u^0` monomials in `t_0..t_max_index, s` of degree at most `max_degree`.
pub fn basis_monomials(max_index: i64, max_degree: i64) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    if max_degree < 0 {
        return Vec::new();
    }
    let vars = (max_index + 1).max(0) as u32;
    let mut frontier = vec![(Monomial::one(), 0u32)];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for v in *start..=vars {
                let n = if v == vars {
                    m.shift(&[], 1, 0)
                } else {
                    m.shift(&[v], 0, 0)
                };
                next.push((n, v));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        frontier = next;
    }
    out
}

/// First basis monomial (if any) in the safe window on which
/// `[𝓛_n, 𝓛_m] - (n-m) 𝓛_{n+m}` does not vanish, with the residual.
pub fn commutator_residual(n: i32, m: i32, cap: u32, degree_cap: u32) -> Result<Option<(Monomial, FormalSeries)>> {
    let ln = DiffOperator::open(n, cap)?;
    let lm = DiffOperator::open(m, cap)?;
    let lnm = if n + m >= -1 {
        Some(DiffOperator::open(n + m, cap)?.scaled(&int((n - m) as i64)))
    } else {
        None
    };
    for b in basis_monomials(cap as i64 - 2, degree_cap as i64 - 4) {
        let x = FormalSeries::monomial(degree_cap, cap, b.clone(), one());
        let mut r = ln.apply(&lm.apply(&x)?)?.sub(&lm.apply(&ln.apply(&x)?)?)?;
        if let Some(op) = &lnm {
            r = r.sub(&op.apply(&x)?)?;
        }
        if !r.is_zero() {
            return Ok(Some((b, r)));
        }
    }
    Ok(None)
}

/// Whether the Virasoro relation holds on every basis monomial of the safe
/// window (indices at most `N-2`, degree at most `D-4`).
pub fn commutator_check(n: i32, m: i32, cap: u32, degree_cap: u32) -> bool {
    matches!(commutator_residual(n, m, cap, degree_cap), Ok(None))
}
