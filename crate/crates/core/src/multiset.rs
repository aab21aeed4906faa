//! Sorted multisets of descendent indices and their labeled splittings.

/// Sorted copy of `a`.
pub fn sorted(a: &[u32]) -> Vec<u32> {
    let mut v = a.to_vec();
    v.sort_unstable();
    v
}

/// `a` (sorted) with `x` inserted in order.
pub fn with(a: &[u32], x: u32) -> Vec<u32> {
    let pos = a.partition_point(|&y| y < x);
    let mut v = Vec::with_capacity(a.len() + 1);
    v.extend_from_slice(&a[..pos]);
    v.push(x);
    v.extend_from_slice(&a[pos..]);
    v
}

/// `a` (sorted) with one copy of `x` removed; `None` if absent.
pub fn without(a: &[u32], x: u32) -> Option<Vec<u32>> {
    let pos = a.iter().position(|&y| y == x)?;
    let mut v = a.to_vec();
    v.remove(pos);
    Some(v)
}

/// Distinct values of a sorted multiset with their multiplicities.
pub fn grouped(a: &[u32]) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for &x in a {
        match out.last_mut() {
            Some((v, m)) if *v == x => *m += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Every way of writing a labeled set with index multiset `a` as `B ⊔ C`,
/// collected by the multisets `(B, C)` with the number of labeled splittings
/// giving them.
pub fn splittings(a: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, u64)> {
    let groups = grouped(a);
    let mut counts = vec![0u32; groups.len()];
    let mut out = Vec::new();
    loop {
        let mut b = Vec::new();
        let mut c = Vec::new();
        let mut weight = 1u64;
        for (j, &(v, m)) in groups.iter().enumerate() {
            for _ in 0..counts[j] {
                b.push(v);
            }
            for _ in counts[j]..m {
                c.push(v);
            }
            weight *= crate::rational::binomial_u64(m, counts[j]);
        }
        out.push((b, c, weight));
        let mut j = 0;
        loop {
            if j == groups.len() {
                return out;
            }
            if counts[j] < groups[j].1 {
                counts[j] += 1;
                break;
            }
            counts[j] = 0;
            j += 1;
        }
    }
}

/// Every multiset of size at most `max_len` with entries in `0..=max_index`,
/// in sorted form.
pub fn all_multisets(max_len: usize, max_index: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for x in start..=max_index {
                let mut v: Vec<u32> = m.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
