//! Acceptance run: one line per criterion, exit status 1 if any fails.
//! Every threshold used below is a named constant.

use std::time::{Duration, Instant};

use zastava_core::character::{molien_weyl_character, pbw_comparison, sl2_closed_form_oracle};
use zastava_core::lie::{BasisMode, ChainsawLie};
use zastava_core::par;
use zastava_core::poisson::{etale_sampled, examples_check, spectral_pair_generic, verify_poisson_relations};
use zastava_core::quiver::{
    self, dimension_bound_batch, interval_criterion_as_printed, interval_stability, interval_stability_brute_force,
    wall_membership, ChainsawRep, Stability, StabilityParam, Variant, WallMode,
};
use zastava_core::report::{Report, Status};
use zastava_core::uea::{d1_oracle, verify_quantum_relations, UElem};
use zastava_core::yangian::{reconstruct_a, verify_yangian_relations, GeneratorBase, OffsetRule, Phi, YangianMode};
use zastava_core::{BasisIndex, Fp, Q};

const LIMIT_JACOBI: Duration = Duration::from_secs(60);
const LIMIT_CLASSICAL: Duration = Duration::from_secs(600);
const LIMIT_QUANTUM: Duration = Duration::from_secs(1800);
const LIMIT_QUIVER: Duration = Duration::from_secs(300);
const JACOBI_MAX_N: usize = 4;
const JACOBI_MAX_TOTAL: i64 = 4;
const CLASSICAL_MAX_INDEX: usize = 4;
const SL2_MAX_D: i64 = 3;
const SL2_MAX_INDEX: usize = 5;
const QUANTUM_MAX_INDEX: usize = 2;
const PBW_DEGREE: usize = 4;
const MW_DEGREE: usize = 6;
const ETALE_POINTS: usize = 20;
const YANGIAN_ORDER: usize = 6;
const KERNEL_EXTRA: i64 = 3;
const AFFINE_LOWEST_POWER: i64 = -4;
const F2_MAX_TOTAL: usize = 3;
const F2_SAMPLES_PER_SHAPE: usize = 300;
const INTERVAL_MAX_N: usize = 5;
const WILSON_MAX_N: usize = 4;
const F2_MAX_N: usize = 4;
const WILSON_MAX_D: usize = 4;
const SPECTRAL_MAX_D: usize = 3;

struct Line {
    ok: bool,
    detail: String,
}

fn line(ok: bool, detail: impl Into<String>) -> Line {
    Line { ok, detail: detail.into() }
}

/// Exact pass: every entry is Pass or Skipped (no Sampled, no Fail).
fn exact(rep: &Report) -> bool {
    rep.entries.iter().all(|e| matches!(e.status, Status::Pass | Status::Skipped))
}

fn first_failure(rep: &Report) -> String {
    rep.entries
        .iter()
        .find(|e| !matches!(e.status, Status::Pass | Status::Skipped))
        .map(|e| format!("{} [{}]", e.relation, e.instance))
        .unwrap_or_default()
}

fn zeros(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

/// Every d with n entries, each at most `each`, total at most `total`.
fn shapes(n: usize, each: i64, total: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=each).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().sum::<i64>() <= total);
    out
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= limit, format!("{:.1} s of {} s", e.as_secs_f64(), limit.as_secs()))
}

fn c1() -> Line {
    let t = Instant::now();
    let mut count = 0;
    for n in 1..=JACOBI_MAX_N {
        for d in shapes(n, JACOBI_MAX_TOTAL, JACOBI_MAX_TOTAL) {
            let alg = match ChainsawLie::build(n, &d, BasisMode::Eprime) {
                Ok(a) => a,
                Err(e) => return line(false, format!("build n={n} d={d:?}: {e}")),
            };
            let out = alg.jacobi_check();
            if !out.passed() {
                return line(false, format!("n={n} d={d:?}: {out:?}"));
            }
            count += 1;
        }
    }
    let (ok, time) = within(t, LIMIT_JACOBI);
    line(ok, format!("{count} algebras, antisymmetry and Jacobi exact; {time}"))
}

fn c2() -> Line {
    let t = Instant::now();
    let mut count = 0;
    for n in 2..=4 {
        for d in shapes(n, 2, 4) {
            if d.iter().all(|&x| x == 0) {
                continue;
            }
            let rep = match verify_poisson_relations(n, &d, &zeros(n), CLASSICAL_MAX_INDEX) {
                Ok(r) => r,
                Err(e) => return line(false, format!("n={n} d={d:?}: {e}")),
            };
            if !exact(&rep) {
                return line(false, format!("n={n} d={d:?}: {}", first_failure(&rep)));
            }
            count += rep.entries.len();
        }
    }
    for k in 1..=SL2_MAX_D {
        let rep = verify_poisson_relations(2, &[0, k], &zeros(2), SL2_MAX_INDEX).unwrap();
        if !rep.entries.iter().all(|e| e.status == Status::Pass) {
            return line(false, format!("sl2 d={k}: {}", first_failure(&rep)));
        }
        count += rep.entries.len();
    }
    let (ok, time) = within(t, LIMIT_CLASSICAL);
    line(ok, format!("{count} relation instances exact; {time}"))
}

fn c3() -> Line {
    let t = Instant::now();
    let cases: Vec<(usize, Vec<i64>, Vec<Q>)> = vec![
        (2, vec![0, 1], zeros(2)),
        (2, vec![0, 2], zeros(2)),
        (3, vec![0, 1, 1], zeros(3)),
        (2, vec![1, 1], zeros(2)),
        (2, vec![1, 1], vec![Q::one(), Q::zero()]),
    ];
    let mut bad = Vec::new();
    let mut total = 0;
    for (n, d, mu) in cases {
        let rep = match verify_quantum_relations(n, &d, &mu, QUANTUM_MAX_INDEX) {
            Ok(r) => r,
            Err(e) => return line(false, format!("d={d:?}: {e}")),
        };
        total += rep.entries.len();
        let fails: Vec<&str> = rep.failures().iter().map(|e| e.relation.as_str()).collect();
        if !exact(&rep) {
            let mut fam: Vec<&str> = fails.clone();
            fam.dedup();
            bad.push(format!("d={d:?} mu={mu:?}: {} failing ({})", fails.len(), fam.join("; ")));
        }
    }
    let (in_time, time) = within(t, LIMIT_QUANTUM);
    if bad.is_empty() {
        line(in_time, format!("{total} instances exact; {time}"))
    } else {
        line(false, format!("{}; {time}", bad.join(" | ")))
    }
}

fn c4() -> Line {
    let rep = d1_oracle().unwrap();
    line(exact(&rep) && rep.entries.len() == 2, "memoized product and naive word expansion agree")
}

fn c5() -> Line {
    let rep = examples_check();
    let sl3 = rep.entries.iter().any(|e| e.relation.contains("SL(3)") && e.status == Status::Pass);
    let printed: Vec<_> = rep.entries.iter().filter(|e| e.relation.contains("affine SL(2)")).collect();
    let reading = printed.iter().find(|e| e.status == Status::Pass && e.instance.contains("reading"));
    let summary: Vec<String> = rep.entries.iter().map(|e| format!("{} [{}] {:?}", e.relation, e.instance, e.status)).collect();
    match reading {
        Some(r) => line(sl3, format!("validated reading: {}", r.instance)),
        None => line(false, format!("no printed reading clears: {}", summary.join("; "))),
    }
}

fn c6() -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, d) in [(2usize, vec![0i64, 1]), (3, vec![0, 1, 1]), (2, vec![1, 1])] {
        let rep = pbw_comparison(n, &d, PBW_DEGREE).unwrap();
        ok &= exact(&rep);
        parts.push(format!("{d:?} {}", if exact(&rep) { "equal" } else { "differ" }));
    }
    line(ok, format!("{} through degree {PBW_DEGREE}", parts.join(", ")))
}

fn c7() -> Line {
    let mut ok = true;
    for k in 1..=2 {
        let mw = molien_weyl_character(2, &[0, k], MW_DEGREE).unwrap();
        let cf = sl2_closed_form_oracle(2, &[0, k], MW_DEGREE).unwrap();
        ok &= mw == cf && mw.constant_term() == 1 && mw.all_nonnegative();
    }
    line(ok, format!("d = 1, 2 through degree {MW_DEGREE}; constant term 1; coefficients nonnegative"))
}

fn c8() -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, d) in [(2usize, vec![0i64, 2]), (2, vec![0, 3]), (3, vec![0, 1, 1])] {
        let rep = etale_sampled::<Q>(n, &d, ETALE_POINTS, 7).unwrap();
        let good = exact(&rep);
        ok &= good;
        if good {
            parts.push(format!("{d:?} ok"));
        } else {
            let mut fam: Vec<String> = rep.failures().iter().map(|e| e.relation.clone()).collect();
            fam.dedup();
            parts.push(format!("{d:?} fails: {}", fam.join("; ")));
        }
    }
    line(ok, format!("{ETALE_POINTS} points per shape: {}", parts.join(", ")))
}

fn c9() -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, d) in [(2usize, vec![0i64, 1]), (2, vec![0, 2]), (3, vec![0, 1, 1])] {
        let rep = verify_yangian_relations(n, &d, &zeros(n), YANGIAN_ORDER, YangianMode::Finite, None).unwrap();
        let good = exact(&rep);
        // kernel rows for d_k < r <= d_k + 3
        let kernel = (1..=KERNEL_EXTRA).all(|x| {
            d.iter().enumerate().filter(|(_, &k)| k > 0).all(|(_, &k)| {
                rep.entries
                    .iter()
                    .any(|e| e.relation.starts_with("A_{k,r}=0") && e.instance.contains(&format!("r={}", k + x)) && e.status == Status::Pass)
            })
        });
        ok &= good && kernel;
        parts.push(format!("{d:?} {}/{}{}", rep.count(Status::Pass), rep.entries.len(), if kernel { "" } else { " kernel rows missing" }));
        if !good {
            parts.push(first_failure(&rep));
        }
    }
    let phi = Phi::new(2, &[0, 1], &zeros(2), OffsetRule::D, GeneratorBase::Deformed, 8).unwrap();
    let big = reconstruct_a(phi.a_series(1).unwrap(), 1, 6).unwrap();
    let e = phi.uea().letter(BasisIndex::E(1, 1, 1)).unwrap();
    let monic = big.coeff(1).unwrap().elem() == &UElem::one();
    let constant = big.coeff(0).unwrap().elem() == &e.neg().sub(&UElem::scalar(Q::frac(1, 2)));
    let tail = (1..5).all(|r| big.coeff(-r).unwrap().elem().is_zero());
    ok &= monic && constant && tail;
    line(ok, format!("to bidegree ({YANGIAN_ORDER},{YANGIAN_ORDER}): {}; reconstruct at d=1 is u-e-1/2: {}", parts.join(", "), monic && constant && tail))
}

fn c10() -> Line {
    let mu = vec![Q::one(), Q::zero()];
    let rep = verify_yangian_relations(2, &[1, 1], &mu, 2, YangianMode::Affine, None).unwrap();
    let Some(rule) = rep.entries.iter().find(|e| e.relation == "affine offset rule") else {
        return line(false, "no offset rule row");
    };
    if rule.status != Status::Pass {
        return line(false, rule.detail.clone().unwrap_or_default());
    }
    let detail = rule.detail.clone().unwrap_or_default();
    let label = detail.trim_start_matches("validated: ").split(" (shift").next().unwrap_or("").to_string();
    let rows: Vec<_> = rep
        .entries
        .iter()
        .filter(|e| e.relation == "A_{k+n}(u)=A_k(u+beta)" && e.instance.starts_with(&label))
        .collect();
    let deepest = rows.iter().any(|e| e.instance.ends_with(&format!("u^{AFFINE_LOWEST_POWER}")));
    let ok = deepest && rows.iter().all(|e| e.status == Status::Pass) && rule.instance == "beta=3";
    line(ok, format!("{} ({} coefficients to u^{AFFINE_LOWEST_POWER})", detail, rows.len()))
}

fn random_fp_rep(n: usize, d: &[usize], rng: &mut impl FnMut() -> u64) -> ChainsawRep<Fp<2>> {
    let mut rep = ChainsawRep::<Fp<2>>::zero(n, d, Variant::Cyclic).unwrap();
    let mut draw = || Fp::<2>(rng() % 2);
    for l in 0..n {
        for i in 0..d[l] {
            for j in 0..d[l] {
                rep.a[l][i][j] = draw();
            }
            rep.p[l][i] = draw();
            rep.q[l][i] = draw();
        }
    }
    for (e, (s, t)) in rep.edges().into_iter().enumerate() {
        for i in 0..d[t] {
            for j in 0..d[s] {
                rep.b[e][i][j] = draw();
            }
        }
    }
    rep
}

fn c11() -> Line {
    let t = Instant::now();
    let mut notes = Vec::new();
    // the singular point
    let ex = ChainsawRep::singular_example();
    let coker = ex.moment_cokernel().unwrap();
    let zeta = StabilityParam::new(vec![Q::zero(), Q::int(-1), Q::int(2)]);
    let example_ok = ex.moment_vanishes()
        && coker.len() == 1
        && coker[0][2] == vec![vec![Q::one()]]
        && wall_membership(&zeta, WallMode::Finite).is_empty()
        && ex.stable_costable() == (false, false);
    notes.push(format!("example {}", if example_ok { "ok" } else { "FAILED" }));
    // Krylov against exhaustive F_2 search
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut rng = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut compared = 0;
    let mut krylov_ok = true;
    for n in 1..=F2_MAX_N {
        for d in shapes(n, F2_MAX_TOTAL as i64, F2_MAX_TOTAL as i64) {
            let du: Vec<usize> = d.iter().map(|&x| x as usize).collect();
            for _ in 0..F2_SAMPLES_PER_SHAPE {
                let rep = random_fp_rep(n, &du, &mut rng);
                if rep.stable_costable() != rep.stable_costable_brute_force().unwrap() {
                    krylov_ok = false;
                }
                compared += 1;
            }
        }
    }
    notes.push(format!("{compared} F_2 reps agree: {krylov_ok}"));
    // intervals
    let mut interval_ok = true;
    let mut printed_differs = 0;
    let mut intervals = 0;
    for n in 1..=INTERVAL_MAX_N {
        for z in shapes(n, 4, 4 * n as i64) {
            let zeta: Vec<Q> = z.iter().map(|&x| Q::int(x - 2)).collect();
            for start in 0..n {
                for len in 1..=n {
                    let a = interval_stability(&zeta, start, len).unwrap();
                    let b = interval_stability_brute_force(&zeta, start, len).unwrap();
                    interval_ok &= a == b;
                    if interval_criterion_as_printed(&zeta, start, len).unwrap() != (a == Stability::Stable) {
                        printed_differs += 1;
                        interval_ok &= a == Stability::StrictlySemistable;
                    }
                    intervals += 1;
                }
            }
        }
    }
    notes.push(format!(
        "{intervals} interval cases agree with brute force: {interval_ok} (printed >= reading differs in {printed_differs}, each strictly semistable)"
    ));
    // partition bound
    let mut bound_ok = true;
    let mut tuples = 0;
    for n in 1..=WILSON_MAX_N {
        for d in shapes(n, WILSON_MAX_D as i64, (WILSON_MAX_D * n) as i64) {
            let du: Vec<usize> = d.iter().map(|&x| x as usize).collect();
            for b in dimension_bound_batch(&du).unwrap() {
                bound_ok &= b.holds;
                tuples += 1;
            }
        }
    }
    notes.push(format!("{tuples} partition tuples bounded: {bound_ok}"));
    let (in_time, time) = within(t, LIMIT_QUIVER);
    line(example_ok && krylov_ok && interval_ok && bound_ok && in_time, format!("{}; {time}", notes.join("; ")))
}

fn c12() -> Line {
    let ok = (1..=SPECTRAL_MAX_D).all(|d| spectral_pair_generic(d).map(|s| s.expansion_matches()).unwrap_or(false));
    line(ok, format!("Q/P reproduces b_0..b_(2d-1) for d = 1..{SPECTRAL_MAX_D}"))
}

fn snapshot() -> Vec<String> {
    let j = |v: serde_json::Value| v.to_string();
    let z2 = zeros(2);
    vec![
        verify_poisson_relations(3, &[0, 1, 1], &zeros(3), 2).unwrap().to_json(),
        verify_quantum_relations(2, &[0, 1], &z2, 2).unwrap().to_json(),
        verify_yangian_relations(2, &[0, 1], &z2, 3, YangianMode::Finite, None).unwrap().to_json(),
        ChainsawLie::build(2, &[1, 1], BasisMode::Eprime).unwrap().jacobi_check().to_report("x").to_json(),
        j(molien_weyl_character(3, &[0, 1, 1], 4).unwrap().to_json()),
        pbw_comparison(2, &[0, 1], 3).unwrap().to_json(),
        etale_sampled::<Q>(2, &[0, 2], 3, 5).unwrap().to_json(),
        j(serde_json::to_value(ChainsawRep::singular_example().moment_cokernel().unwrap()).unwrap()),
        j(serde_json::to_value(quiver::strata_enumerate(3, &[1, 1, 2]).unwrap()).unwrap()),
        j(serde_json::to_value(dimension_bound_batch(&[2, 3, 1]).unwrap()).unwrap()),
        j(serde_json::to_value(quiver::sample_moment_point(3, &[1, 2, 1], 3).unwrap().to_json()).unwrap()),
        j(serde_json::to_value(ChainsawRep::singular_example().collapse_to_single_node().unwrap()).unwrap()),
        format!("{:?}", spectral_pair_generic(2).unwrap().expansion),
    ]
}

fn c13() -> Line {
    let one = par::with_jobs(1, snapshot);
    let two = par::with_jobs(2, snapshot);
    let four = par::with_jobs(4, snapshot);
    let ok = one == two && one == four;
    line(ok, format!("{} outputs identical at 1, 2 and 4 workers (parallel build: {})", one.len(), par::is_parallel()))
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Line)> = vec![
        (1, "Lie algebra antisymmetry and Jacobi", c1),
        (2, "classical relations", c2),
        (3, "quantum relations", c3),
        (4, "d=1 oracle", c4),
        (5, "reduction examples", c5),
        (6, "PBW dimensions equal Molien-Weyl", c6),
        (7, "Molien-Weyl closed form", c7),
        (8, "etale brackets", c8),
        (9, "Yangian relations", c9),
        (10, "affine shift", c10),
        (11, "quiver geometry", c11),
        (12, "spectral pair", c12),
        (13, "reproducibility", c13),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (id, name, f) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let t = Instant::now();
        let r = f();
        if !r.ok {
            failed += 1;
        }
        println!(
            "criterion {id:2} {} {name}: {} ({:.1} s)",
            if r.ok { "PASS" } else { "FAIL" },
            r.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
