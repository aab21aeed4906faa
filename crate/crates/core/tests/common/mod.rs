//! Oracles shared by the integration tests, written from the definitions
//! without going through the library.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn dfact(n: i64) -> Q {
    // n!! for odd n ≥ -1
    let mut acc = q(1);
    let mut x = n;
    while x > 1 {
        acc *= q(x);
        x -= 2;
    }
    acc
}

/// Closed brackets from the DVV recursion, written against the textbook
/// normalization `⟨τ_0³⟩_0 = 1`, `⟨τ_1⟩_1 = 1/24`, plus string/dilaton for
/// keys without any index ≥ 2.
pub struct Dvv {
    memo: HashMap<Vec<u32>, Q>,
}

impl Dvv {
    pub fn new() -> Self {
        Dvv { memo: HashMap::new() }
    }

    fn genus(a: &[u32]) -> Option<i64> {
        let s: i64 = a.iter().map(|&x| x as i64).sum();
        let num = s - a.len() as i64 + 3;
        if num < 0 || num % 3 != 0 {
            None
        } else {
            Some(num / 3)
        }
    }

    pub fn get(&mut self, a: &[u32]) -> Q {
        let mut a = a.to_vec();
        a.sort_unstable();
        let g = match Self::genus(&a) {
            Some(g) => g,
            None => return Q::zero(),
        };
        if 2 * g - 2 + a.len() as i64 <= 0 {
            return Q::zero();
        }
        if let Some(v) = self.memo.get(&a) {
            return v.clone();
        }
        let v = self.compute(&a, g);
        self.memo.insert(a, v.clone());
        v
    }

    fn compute(&mut self, a: &[u32], g: i64) -> Q {
        if a == [0, 0, 0] {
            return q(1);
        }
        if a == [1] {
            return Q::new(BigInt::one(), BigInt::from(24));
        }
        let top = *a.last().unwrap();
        if top == 0 {
            return Q::zero();
        }
        let k = top as i64 - 1;
        let rest = &a[..a.len() - 1];
        let mut acc = Q::zero();
        for j in 0..rest.len() {
            let aj = rest[j] as i64;
            let mut b: Vec<u32> = rest.to_vec();
            b[j] = (aj + k) as u32;
            acc += dfact(2 * k + 2 * aj + 1) / dfact(2 * aj - 1) * self.get(&b);
        }
        for r in 0..k {
            let s = k - 1 - r;
            let c = dfact(2 * r + 1) * dfact(2 * s + 1) / q(2);
            let mut b = rest.to_vec();
            b.push(r as u32);
            b.push(s as u32);
            let mut inner = self.get(&b);
            let n = rest.len();
            for mask in 0..(1u32 << n) {
                let mut i_part = vec![r as u32];
                let mut j_part = vec![s as u32];
                for (idx, &x) in rest.iter().enumerate() {
                    if mask >> idx & 1 == 1 {
                        i_part.push(x);
                    } else {
                        j_part.push(x);
                    }
                }
                let (Some(g1), Some(g2)) = (Self::genus(&i_part), Self::genus(&j_part)) else {
                    continue;
                };
                if g1 + g2 != g {
                    continue;
                }
                inner += self.get(&i_part) * self.get(&j_part);
            }
            acc += c * inner;
        }
        acc / dfact(2 * k + 3)
    }
}

/// `(Σ2a_i - l + 1)! / Π(2a_i - 1)!!`
pub fn evaluation(a: &[u32]) -> Q {
    let top: i64 = a.iter().map(|&x| 2 * x as i64).sum::<i64>() - a.len() as i64 + 1;
    let mut v = q(1);
    for i in 2..=top {
        v *= q(i);
    }
    for &x in a {
        v /= dfact(2 * x as i64 - 1);
    }
    v
}

// ---- stable graph enumeration ----

/// Validity of an assignment of atoms and kinds to the vertices of a tree,
/// checked from the definitions without the library.
pub fn oracle_valid(owner: &[usize], boundary: &[bool], open: &[bool], edges: &[(usize, usize)]) -> bool {
    let m = open.len();
    for (a, &v) in owner.iter().enumerate() {
        if boundary[a] && !open[v] {
            return false;
        }
    }
    // open vertices connected through open vertices
    let opens: Vec<usize> = (0..m).filter(|&v| open[v]).collect();
    if let Some(&start) = opens.first() {
        let mut seen = vec![false; m];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &(a, c) in edges {
                for (p, q) in [(a, c), (c, a)] {
                    if p == x && open[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        if opens.iter().any(|&v| !seen[v]) {
            return false;
        }
    }
    for v in 0..m {
        let mut k = 0;
        let mut l = 0;
        for (a, &w) in owner.iter().enumerate() {
            if w == v {
                if boundary[a] {
                    k += 1;
                } else {
                    l += 1;
                }
            }
        }
        for &(a, c) in edges {
            if a == v || c == v {
                if open[a] && open[c] {
                    k += 1;
                } else {
                    l += 1;
                }
            }
        }
        let stable = if open[v] { k + 2 * l >= 3 } else { l >= 3 };
        if !stable {
            return false;
        }
    }
    true
}

pub fn atoms(k: u32, l: u32) -> Vec<bool> {
    (0..k).map(|_| true).chain((0..l).map(|_| false)).collect()
}

/// Labelled trees on `m` vertices from Prüfer sequences.
pub fn labelled_trees(m: usize) -> Vec<Vec<(usize, usize)>> {
    if m == 1 {
        return vec![vec![]];
    }
    if m == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let total = m.pow(m as u32 - 2);
    for code in 0..total {
        let mut seq = Vec::new();
        let mut c = code;
        for _ in 0..m - 2 {
            seq.push(c % m);
            c /= m;
        }
        let mut degree = vec![1usize; m];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut edges = Vec::new();
        for &x in &seq {
            let leaf = (0..m).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, x));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Number of strata with `m - 1` edges, by brute force over labelled
/// trees, atom placements and vertex kinds (every stratum is rigid, so
/// each is met `m!` times).
pub fn brute_count(k: u32, l: u32, m: usize) -> usize {
    let boundary = atoms(k, l);
    let n = boundary.len();
    let trees = labelled_trees(m);
    let mut count = 0;
    let mut owner = vec![0usize; n];
    for code in 0..m.pow(n as u32) {
        let mut c = code;
        for o in owner.iter_mut() {
            *o = c % m;
            c /= m;
        }
        for kinds in 0..(1usize << m) {
            let open: Vec<bool> = (0..m).map(|v| kinds >> v & 1 == 1).collect();
            // a family of an open vertex keeps at least one disk
            if !open.iter().any(|&x| x) {
                continue;
            }
            for edges in &trees {
                if oracle_valid(&owner, &boundary, &open, edges) {
                    count += 1;
                }
            }
        }
    }
    count / factorial(m)
}

/// Strata with one or two edges from label partitions: a pair of parts,
/// or a path of three parts.
pub fn partition_counts(k: u32, l: u32) -> (usize, usize) {
    (brute_count(k, l, 2), brute_count(k, l, 3))
}

/// A000311: series-reduced rooted trees with `n` labelled leaves, from
/// total partitions. Strata of `Γ_{0,k,0}`, the smooth one included, are
/// counted by `a(k - 1)`.
pub fn schroeder(k: usize) -> u64 {
    let n = k - 1;
    let mut a = vec![0u64; n + 1];
    a[1] = 1;
    for m in 2..=n {
        // ways[j][x]: x labelled leaves split into j blocks, each block a tree
        let mut ways = vec![vec![0u64; m + 1]; m + 1];
        ways[0][0] = 1;
        for j in 1..=m {
            for x in 1..=m {
                ways[j][x] = (1..=x)
                    .filter(|&s| s < m)
                    .map(|s| binom(x as u64 - 1, s as u64 - 1) * a[s] * ways[j - 1][x - s])
                    .sum();
            }
        }
        a[m] = (2..=m).map(|j| ways[j][m]).sum();
    }
    a[n]
}

pub fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

