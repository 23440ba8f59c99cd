//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every comparison is exact equality of integers or polynomials.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rooted_forests::algebra::{binomial, MPoly, Vars};
use rooted_forests::closed_forms::{
    n_m_closed, q_closed, q_from_qtilde, qtilde_closed, qtilde_expansion, ExpansionMode,
};
use rooted_forests::forest::{
    oracle_constructive_count, oracle_filter_census, oracle_filter_count, search_census,
    CensusPolynomial, Rules, SearchOptions, VertexFamily, A, LAMBDA,
};
use rooted_forests::identity::{
    lhs_eq1, random_points, verify_claim, verify_claim0, verify_eq1, verify_eq1_numeric,
    verify_multinomial_variant, IdentityInstance, Verdict,
};
use rooted_forests::report::{
    census_grid, count_grid, expansion_grid, run_compare, run_verify_identity, Grid, IdentityMode,
    IdentityOptions, OracleOptions,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn family(sizes: &[usize], n: usize) -> VertexFamily {
    VertexFamily::new(sizes.to_vec(), n).expect("valid family")
}

fn label(sizes: &[usize], n: usize) -> String {
    format!("sizes={sizes:?} n={n}")
}

fn identity_grid() -> Check {
    let grid = IdentityInstance::grid(8);
    for &inst in &grid {
        if !verify_eq1(inst).is_equal() {
            return Err(format!("symbolic m={} p={}", inst.m(), inst.p()));
        }
    }
    for m in 1..=12 {
        let points = random_points(m, 100, 7);
        for (i, v) in verify_eq1_numeric(m, &points).iter().enumerate() {
            if !v.is_equal() {
                return Err(format!("numeric m={m} p={}", i + 1));
            }
        }
    }
    Ok(format!(
        "{} symbolic instances, m<=12 at 100 points",
        grid.len()
    ))
}

fn proof_identities() -> Check {
    let mut count = 0;
    for m in 1..=6 {
        for p in 2..=m + 1 {
            if !verify_claim0(m, p).map_err(|e| e.to_string())?.is_equal() {
                return Err(format!("claim0 m={m} p={p}"));
            }
            count += 1;
        }
        for p in 1..=m {
            for n in 1..=m + 1 - p {
                if !verify_claim(m, p, n).map_err(|e| e.to_string())?.is_equal() {
                    return Err(format!("claim m={m} p={p} n={n}"));
                }
                count += 1;
            }
        }
    }
    for p in 1..=4 {
        for m in 2..=6 {
            if !verify_multinomial_variant(p, m)
                .map_err(|e| e.to_string())?
                .is_equal()
            {
                return Err(format!("multinomial p={p} m={m}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} instances"))
}

fn forest_counts() -> Check {
    let grid = count_grid();
    for sizes in &grid {
        let fam = family(sizes, 0);
        let filter = oracle_filter_count(&fam, opts()).map_err(|e| e.to_string())?;
        let constructive = oracle_constructive_count(&fam).map_err(|e| e.to_string())?;
        let closed = n_m_closed(&fam).map_err(|e| e.to_string())?;
        if filter != constructive || constructive != closed {
            return Err(format!(
                "{sizes:?}: filter {filter}, constructive {constructive}, closed {closed}"
            ));
        }
        // Independent anchors: two sets give s(2^t - 1); singletons give Cayley.
        if let [s, t] = sizes[..] {
            if closed != BigInt::from(s) * ((BigInt::from(1) << t) - 1) {
                return Err(format!("{sizes:?}: two-set count {closed}"));
            }
        }
        if sizes.iter().all(|&s| s == 1) && sizes.len() >= 2 {
            let m = sizes.len();
            if closed != BigInt::from(m).pow(m as u32 - 2) {
                return Err(format!("{sizes:?}: singleton count {closed}"));
            }
        }
    }
    Ok(format!("{} sizes vectors", grid.len()))
}

/// `lambda |V_1| (lambda |V_1| + n a)^(n-1)`, built directly.
fn single_set_census(s: usize, n: usize) -> MPoly {
    let vars = Vars::census();
    let lam = vars.var(LAMBDA);
    let a = vars.var(A);
    let inner = lam.scale(&BigInt::from(s)) + a.scale(&BigInt::from(n));
    lam.scale(&BigInt::from(s)) * inner.pow(n as u32 - 1)
}

fn census_equivalence() -> Check {
    let grid = census_grid();
    let mut anchored = 0;
    for (sizes, n) in &grid {
        let fam = family(sizes, *n);
        let oracle = oracle_filter_census(&fam, false, opts()).map_err(|e| e.to_string())?;
        if oracle != q_closed(&fam) {
            return Err(format!(
                "{}: oracle {} vs closed {}",
                label(sizes, *n),
                oracle.render(),
                q_closed(&fam).render()
            ));
        }
        if *n >= 1 {
            let restricted = oracle_filter_census(&fam, true, opts()).map_err(|e| e.to_string())?;
            let closed = qtilde_closed(&fam).map_err(|e| e.to_string())?;
            if restricted != closed {
                return Err(format!(
                    "{}: restricted oracle {} vs {}",
                    label(sizes, *n),
                    restricted.render(),
                    closed.render()
                ));
            }
            if sizes.len() == 1 {
                if oracle.poly() != &single_set_census(sizes[0], *n) {
                    return Err(format!(
                        "{}: single-set census {}",
                        label(sizes, *n),
                        oracle.render()
                    ));
                }
                anchored += 1;
            }
        }
    }
    Ok(format!(
        "{} instances, {anchored} single-set anchors",
        grid.len()
    ))
}

fn expansion() -> Check {
    let grid = expansion_grid();
    for (sizes, n) in &grid {
        let fam = family(sizes, *n);
        let closed = qtilde_closed(&fam).map_err(|e| e.to_string())?;
        let memo = qtilde_expansion(&fam, ExpansionMode::Memoized).map_err(|e| e.to_string())?;
        if memo != closed {
            return Err(format!("{}: memoized {}", label(sizes, *n), memo.render()));
        }
        if *n <= 3 {
            let literal =
                qtilde_expansion(&fam, ExpansionMode::Literal).map_err(|e| e.to_string())?;
            if literal != closed {
                return Err(format!(
                    "{}: literal {}",
                    label(sizes, *n),
                    literal.render()
                ));
            }
        }
    }
    Ok(format!("{} instances", grid.len()))
}

fn recombination() -> Check {
    let mut checked = 0;
    for (sizes, n) in census_grid() {
        if n == 0 {
            // No extra vertices to recombine through.
            continue;
        }
        let fam = family(&sizes, n);
        let recombined = q_from_qtilde(&fam).map_err(|e| e.to_string())?;
        if recombined != q_closed(&fam) {
            return Err(format!("{}: {}", label(&sizes, n), recombined.render()));
        }
        checked += 1;
    }
    Ok(format!("{checked} instances with n >= 1"))
}

fn determinism() -> Check {
    let at = |workers| {
        let grid = run_compare(
            Grid::All,
            OracleOptions {
                workers,
                ..OracleOptions::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let identity = run_verify_identity(IdentityOptions {
            max_m: 12,
            mode: IdentityMode::Numeric,
            seed: 7,
            claims: true,
            workers,
            ..IdentityOptions::default()
        })
        .map_err(|e| e.to_string())?;
        Ok::<_, String>((grid.without_timings(), identity.without_timings()))
    };
    let one = at(1)?;
    let four = at(4)?;
    if one != four {
        return Err("reports differ between 1 and 4 workers".into());
    }
    let parallel = SearchOptions {
        workers: 4,
        ..opts()
    };
    for sizes in count_grid() {
        let fam = family(&sizes, 0);
        if search_census(&fam, Rules::standard(), opts())
            != search_census(&fam, Rules::standard(), parallel)
        {
            return Err(format!("{sizes:?}: oracle depends on workers"));
        }
    }
    Ok(format!(
        "{} verdicts identical",
        one.0.verdicts.len() + one.1.verdicts.len()
    ))
}

fn negative_controls() -> Check {
    let mutated_hits = IdentityInstance::grid(8)
        .into_iter()
        .filter(|&inst| {
            let (m, p) = (inst.m(), inst.p());
            let wrong = Vars::indexed(m)
                .sum_all()
                .pow((m - p) as u32)
                .scale(&binomial(m as u64 - 1, p as u64));
            !Verdict::compare(&lhs_eq1(inst), &wrong).is_equal()
        })
        .count();
    if mutated_hits == 0 {
        return Err("mutated binomial passes the whole identity grid".into());
    }
    let loose = Rules {
        root_constraint: false,
        ..Rules::standard()
    };
    let mut root_hits = 0;
    for (sizes, n) in census_grid() {
        let fam = family(&sizes, n);
        let census: CensusPolynomial =
            search_census(&fam, loose, opts()).map_err(|e| e.to_string())?;
        if census != q_closed(&fam) {
            root_hits += 1;
        }
    }
    if root_hits == 0 {
        return Err("dropping the root constraint changes no census".into());
    }
    Ok(format!(
        "mutated binomial fails {mutated_hits} instances, no root constraint fails {root_hits}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("identity grid", identity_grid),
        ("proof identities", proof_identities),
        ("forest counts", forest_counts),
        ("weighted census", census_equivalence),
        ("nested expansion", expansion),
        ("recombination", recombination),
        ("worker determinism", determinism),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
