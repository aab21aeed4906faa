//! One PASS/FAIL line per acceptance criterion, then a summary. Exits
//! nonzero on a failure only with `ACCEPTANCE_STRICT=1`, so the rest of a
//! workspace run still executes and reports.

mod common;

use common::{evaluation, partition_counts, Dvv};
use opendesc::closed::{check_closed_kdv, closed_kdv_residual, genus_of_closed, ClosedSolver};
use opendesc::graphs::strata::{AtomSet, Family};
use opendesc::graphs::suite::{check_family, SuiteOptions};
use opendesc::graphs::{enumerate_boundary, has_boundary_edge};
use opendesc::identities::{
    fixed_sum_multisets, sweep, verify_virasoro_genus0, BinomialIdentity, Identity, SweepOptions,
};
use opendesc::multiset::all_multisets;
use opendesc::open::{build_fo, build_fo_via_kdv, OpenKdvSolver, OpenSolver};
use opendesc::operator::commutator_residual;
use opendesc::rational::{frac, int};
use opendesc::series::Monomial;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn closed_values() -> Outcome {
    let mut s = ClosedSolver::new();
    check(s.bracket(0, &[0, 0, 0]) == int(1), || "⟨τ_0³⟩_0".into())?;
    check(s.bracket(1, &[1]) == frac(1, 24), || "⟨τ_1⟩_1".into())?;
    let mut dvv = Dvv::new();
    let v = s.bracket(2, &[4]);
    check(v == dvv.get(&[4]), || format!("⟨τ_4⟩_2 = {}", v))?;
    let mut n = 0;
    for a in all_multisets(5, 10) {
        if genus_of_closed(&a).is_some_and(|g| g <= 3) {
            let g = genus_of_closed(&a).unwrap();
            check(s.bracket(g, &a) == dvv.get(&a), || format!("{:?}", a))?;
            n += 1;
        }
    }
    Ok(format!("⟨τ_4⟩_2 = {}, {} brackets against the DVV oracle", v, n))
}

fn open_values() -> Outcome {
    for (name, mut s) in [("default", OpenSolver::new()), ("constraints", OpenSolver::constraints_only())] {
        check(s.bracket(0, &[], 3) == int(1), || format!("{}: ⟨σ³⟩_0", name))?;
        check(s.bracket(0, &[0], 1) == int(1), || format!("{}: ⟨τ_0σ⟩_0", name))?;
        check(s.bracket(1, &[1], 0) == frac(1, 2), || format!("{}: ⟨τ_1⟩_1", name))?;
    }
    let mut kdv = OpenKdvSolver::new();
    check(kdv.bracket(1, &[1], 0) == frac(1, 2), || "open KdV route: ⟨τ_1⟩_1".into())?;
    Ok("⟨σ³⟩_0 = 1, ⟨τ_0σ⟩_0 = 1, ⟨τ_1⟩_1 = 1/2".into())
}

fn evaluation_theorem() -> Outcome {
    let mut s = OpenSolver::constraints_only();
    let mut n = 0;
    for l in 0..=12usize {
        for sum in l as u32..=12 {
            let k = 2 * sum as i64 - 2 * l as i64 + 3;
            if l as i64 + k > 12 {
                continue;
            }
            for a in fixed_sum_multisets(l, sum, 1) {
                let v = s.bracket(0, &a, k as u32);
                check(v == evaluation(&a), || format!("a={:?} k={}: {}", a, k, v))?;
                n += 1;
            }
        }
    }
    Ok(format!("{} keys", n))
}

fn virasoro() -> Outcome {
    for n in -1..=4 {
        let r = verify_virasoro_genus0(n, 10, 10).map_err(|e| e.to_string())?;
        check(r.pass, || r.to_string())?;
    }
    Ok("n = -1..4, degree cap 10".into())
}

fn routes() -> Outcome {
    let a = build_fo(8, 3);
    let b = build_fo_via_kdv(8, 3);
    check(a.dump() == b.dump(), || "series differ".into())?;
    Ok(format!("{} coefficients to degree 8 over t_0..t_3, s", a.len()))
}

fn commutators() -> Outcome {
    for n in -1..=3 {
        for m in -1..=3 {
            if let Some((mono, _)) = commutator_residual(n, m, 6, 8).map_err(|e| e.to_string())? {
                return Err(format!("[L_{}, L_{}] on {}", n, m, mono));
            }
        }
    }
    Ok("n, m = -1..3, including [L_-1, L_1] = -2L_0 and [L_-1, L_2] = -3L_1".into())
}

fn closed_kdv() -> Outcome {
    let mut s = ClosedSolver::new();
    for n in 1..=4 {
        let ok = check_closed_kdv(&mut s, n, 8, 4).map_err(|e| e.to_string())?;
        check(ok, || format!("n={}", n))?;
    }
    let r = closed_kdv_residual(&mut s, 3, 8, 4).map_err(|e| e.to_string())?;
    check(r.coeff(&Monomial::one().with_u(-2)) == int(0), || "n=3 constant term".into())?;
    // 7x = x⟨τ_0³⟩_0 + ¼⟨τ_2τ_0⁴⟩_0
    let x = frac(1, 4) * s.bracket(0, &[2, 0, 0, 0, 0]) / (int(7) - s.bracket(0, &[0, 0, 0]));
    check(x == frac(1, 24), || format!("n=3 gives ⟨τ_1⟩_1 = {}", x))?;
    Ok("n = 1..4 at degree cap 8; n=3 gives ⟨τ_1⟩_1 = 1/24".into())
}

fn run_sweeps(ids: &[Identity]) -> Outcome {
    let opts = SweepOptions::default();
    let mut parts = Vec::new();
    for &id in ids {
        let reports = sweep(id, &opts).map_err(|e| e.to_string())?;
        if let Some(r) = reports.iter().find(|r| !r.pass) {
            return Err(r.to_string());
        }
        parts.push(format!("{} {}", id.name(), reports.len()));
    }
    Ok(parts.join(", "))
}

fn graph_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut families = 0;
    for n in 3..=9u32 {
        for l in 0..=n / 2 {
            let k = n - 2 * l;
            if k % 2 == 0 {
                continue;
            }
            families += 1;
            let family = Family::generate(true, AtomSet::new(k, l));
            let (c1, c2) = partition_counts(k, l);
            let got = |c: usize| family.levels.get(c).map_or(0, |x| x.len());
            if (got(1), got(2)) != (c1, c2) {
                failures.push(format!("({},{}) counts {:?} vs oracle {:?}", k, l, (got(1), got(2)), (c1, c2)));
            }
            let report = check_family(k, l, SuiteOptions::for_family(k, l));
            for (name, t) in report.tallies() {
                if !t.passed() {
                    failures.push(format!("({},{}) {} {}/{}", k, l, name, t.failed, t.checked));
                }
            }
        }
    }
    let edges = enumerate_boundary(5, 1, Some(1)).into_iter().filter(has_boundary_edge).count();
    if edges != 26 {
        failures.push(format!("(5,1) has {} codimension-1 boundary-edge strata", edges));
    }
    if failures.is_empty() {
        Ok(format!("{} families, (5,1) has 26 codimension-1 boundary-edge strata", families))
    } else {
        Err(failures.join("; "))
    }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("closed values", closed_values),
        ("open values", open_values),
        ("evaluation theorem", evaluation_theorem),
        ("Virasoro genus 0", virasoro),
        ("route agreement", routes),
        ("commutators", commutators),
        ("closed KdV", closed_kdv),
        ("identity sweeps", || {
            run_sweeps(&[
                Identity::OpenString,
                Identity::OpenDilaton,
                Identity::TrrI,
                Identity::TrrII,
                Identity::OpenKdv,
            ])
        }),
        ("binomial identities", || {
            let ids: Vec<Identity> = BinomialIdentity::ALL.into_iter().map(Identity::Binomial).collect();
            run_sweeps(&ids)
        }),
        ("graph property suite", graph_suite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {} ({})", i + 1, name, detail),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {} ({})", i + 1, name, detail);
            }
        }
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
