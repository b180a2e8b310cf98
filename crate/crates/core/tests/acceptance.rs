//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use fenchel_core::mcg::{
    chain_membership, dr_membership, matsuzaki_classify, support_class, trichotomy, ChainLevel, DrIndex,
    Generator, MappingClass, Membership, MultiTwist, QcVerdict, SubspaceDesc, SupportClass, Trichotomy,
};
use fenchel_core::pantsgraph::{extract_flute, maximal_tree, truncate, DualGraph, FiniteGraph};
use fenchel_core::paths::{nonconvexity_experiment, zigzag_eval};
use fenchel_core::{
    finite_difference, fn_distance, orthodistance, orthodistance_bounds, pentagon_split, Coord, CoordSeq,
    PantsGeom, RateFn, RateSum,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn sample_pants(rng: &mut ChaCha8Rng, cusp: bool) -> PantsGeom {
    let mut u = || rng.gen_range(0.01..20.0);
    let (l1, l2) = (u(), u());
    let lp = if cusp { 0.0 } else { u() };
    PantsGeom::new(l1, l2, lp).unwrap()
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let p = sample_pants(&mut rng, false);
        let d = orthodistance(&p).map_err(|e| e.to_string())?;
        let b = orthodistance_bounds(&p).map_err(|e| e.to_string())?;
        worst = worst.max(b.lower - d).max(d - b.upper);
        check(b.lower - 1e-9 <= d && d <= b.upper + 1e-9, format!("sandwich fails at {p:?}"))?;
    }
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!("10^4 samples, worst violation {worst:.3e}, {t:?}"))
}

/// Minimizes `d1 + d2` over splits of `c` by golden-section search.
fn golden_split(a: f64, b: f64, c: f64) -> f64 {
    let f = |c1: f64| {
        (c1.cosh() / a.sinh()).asinh() + ((c - c1).cosh() / b.sinh()).asinh()
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, c);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.5 * (lo + hi)).min(f(0.0)).min(f(c))
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let cusp = i % 10 == 0;
        let p = sample_pants(&mut rng, cusp);
        let (a, b, c) = p.halves();
        let d = orthodistance(&p).map_err(|e| e.to_string())?;
        let split = pentagon_split(&p).map_err(|e| e.to_string())?;
        let golden = golden_split(a, b, c);
        worst = worst.max((split.total() - d).abs()).max((golden - d).abs());
        check((split.total() - d).abs() <= 1e-9, format!("split disagrees at {p:?}"))?;
        check((golden - d).abs() <= 1e-9, format!("golden-section oracle disagrees at {p:?}"))?;
        if cusp {
            let closed = ((1.0 + a.cosh() * b.cosh()) / (a.sinh() * b.sinh())).acosh();
            worst = worst.max((closed - d).abs());
            check((closed - d).abs() <= 1e-9, format!("cusp closed form disagrees at {p:?}"))?;
        }
    }
    let t = within(Duration::from_secs(5), start)?;
    Ok(format!("10^3 samples (10^2 cusps), worst gap {worst:.3e}, {t:?}"))
}

fn asymptotics() -> Outcome {
    let ratio = |n: u64| {
        let l = |m: u64| 4.0 * ((m + 1) as f64).ln();
        let d = orthodistance(&PantsGeom::new(l(n), l(n + 1), 0.0).unwrap()).unwrap();
        let x = n as f64;
        d / (2.0 * (1.0 / (x * x) + 1.0 / ((x + 1.0) * (x + 1.0))))
    };
    let (r100, r1000) = (ratio(100), ratio(1000));
    check((r100 - 1.0).abs() <= 0.10, format!("ratio at 100 is {r100}"))?;
    check((r1000 - 1.0).abs() <= 0.02, format!("ratio at 1000 is {r1000}"))?;
    Ok(format!("ratio {r100:.6} at n = 100, {r1000:.6} at n = 1000"))
}

fn random_seq(rng: &mut ChaCha8Rng) -> CoordSeq {
    let lengths = match rng.gen_range(0..3) {
        0 => RateFn::constant(rng.gen_range(0.1..5.0)),
        1 => RateFn::log(rng.gen_range(0.5..6.0)),
        _ => RateFn::power_log(rng.gen_range(0.1..3.0), rng.gen_range(-1.0..1.0), 0.0),
    }
    .unwrap();
    let mut s = CoordSeq::new(lengths)
        .unwrap()
        .with_twists(RateFn::constant(rng.gen_range(0.1..2.0)).unwrap())
        .unwrap();
    for _ in 0..rng.gen_range(0..5) {
        let c = Coord {
            length: rng.gen_range(0.05..10.0),
            twist: rng.gen_range(-3.0..3.0),
        };
        s = s.with_override(rng.gen_range(1..30), c).unwrap();
    }
    s
}

fn metric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_triangle = f64::NEG_INFINITY;
    for _ in 0..100 {
        let (z, w, v) = (random_seq(&mut rng), random_seq(&mut rng), random_seq(&mut rng));
        for n in [5u64, 10, 20] {
            let a = fn_distance(&z, &w, n).unwrap().value;
            let b = fn_distance(&z, &w, 2 * n).unwrap().value;
            let gap = b - a;
            check(
                (0.0..=0.5f64.powi(n as i32 - 1)).contains(&gap),
                format!("truncation gap {gap} at N = {n}"),
            )?;
            check(a == fn_distance(&w, &z, n).unwrap().value, "asymmetric distance")?;
        }
        let zw = fn_distance(&z, &w, 20).unwrap().value;
        let zv = fn_distance(&z, &v, 20).unwrap().value;
        let vw = fn_distance(&v, &w, 20).unwrap().value;
        worst_triangle = worst_triangle.max(zw - zv - vw);
        check(zw <= zv + vw + 1e-12, "triangle inequality fails")?;
    }
    Ok(format!("100 pairs x N in {{5, 10, 20}}, 100 triples, worst triangle excess {worst_triangle:.3e}"))
}

fn zigzag() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut samples = 0;
    for _ in 0..20 {
        let (z, w) = (random_seq(&mut rng), random_seq(&mut rng));
        let mut ts: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..1.0)).collect();
        ts.extend((1..20).map(|k| 1.0 - 0.5f64.powi(k)));
        ts.sort_by(f64::total_cmp);
        let mut last = f64::INFINITY;
        for &t in &ts {
            let l = zigzag_eval(&z, &w, t).unwrap();
            let d = fn_distance(&l, &w, 60).unwrap().value;
            check(d <= last + 1e-15, format!("distance increases at t = {t}"))?;
            last = d;
            let diff = finite_difference(&z, &l).unwrap();
            check(diff.is_some(), format!("sample at t = {t} differs from z symbolically"))?;
            samples += 1;
        }
        for k in 1..20 {
            let l = zigzag_eval(&z, &w, 1.0 - 0.5f64.powi(k)).unwrap();
            let d = fn_distance(&l, &w, 60).unwrap().value;
            check(d <= 0.5f64.powi(k - 1), format!("endpoint bound fails at k = {k}"))?;
        }
        check(zigzag_eval(&z, &w, 1.0).unwrap() == w, "t = 1 does not return w")?;
    }
    Ok(format!("20 pairs, {samples} samples, endpoint bounds for k = 1..19"))
}

fn nonconvexity() -> Outcome {
    let start = Instant::now();
    let r = nonconvexity_experiment(1000).map_err(|e| e.to_string())?;
    let t = within(Duration::from_secs(5), start)?;
    check(r.shows_nonconvexity(), format!("verdicts {:?} / {:?}", r.endpoints[0].status, r.midpoint.status))?;
    check(r.upper_tail < 0.05, format!("tail bound {} not < 0.05", r.upper_tail))?;
    let hi = r.partial_sum + r.upper_tail;
    check(hi.is_finite() && r.lower_tail == 0.0, "limit not bracketed")?;
    Ok(format!(
        "endpoints CITED_COMPLETE, midpoint INCOMPLETE_BY_CONVERGENCE, limit in [{:.12}, {:.12}], {t:?}",
        r.partial_sum, hi
    ))
}

fn flute(lengths: RateFn) -> CoordSeq {
    CoordSeq::new(lengths).unwrap()
}

fn dr(r: u32) -> SubspaceDesc {
    SubspaceDesc::Dr {
        r: DrIndex::Natural(r),
        transverse_upper: None,
    }
}

fn relative_trichotomy() -> Outcome {
    for n in 1u32..=3 {
        let e = 1.0 / f64::from(n);
        let mc = MappingClass::multi_twist(RateFn::power_log(1.0, -e, 0.0).unwrap()).unwrap();
        let small = flute(RateFn::power_log(1.0, e, 0.0).unwrap());
        let unit = flute(RateFn::constant(1.0).unwrap());
        check(matsuzaki_classify(&mc, &small).unwrap().verdict == QcVerdict::Qc, format!("n = {n}: not QC on m^(-1/n)"))?;
        check(matsuzaki_classify(&mc, &unit).unwrap().verdict == QcVerdict::NotQc, format!("n = {n}: QC on constant"))?;
        let v = trichotomy(&mc, &dr(n)).unwrap();
        check(v.kind == Trichotomy::Sometimes, format!("n = {n}: {:?} vs D_n", v.kind))?;
        let w = v.witnesses.ok_or("missing witnesses")?;
        let reload = |x: &CoordSeq| -> CoordSeq {
            serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap()
        };
        let (qc, not_qc) = (reload(&w.qc), reload(&w.not_qc));
        check(qc == w.qc && not_qc == w.not_qc, "witness round trip differs")?;
        check(matsuzaki_classify(&mc, &qc).unwrap().verdict == QcVerdict::Qc, "qc witness fails")?;
        check(matsuzaki_classify(&mc, &not_qc).unwrap().verdict == QcVerdict::NotQc, "non-qc witness fails")?;
        for x in [&qc, &not_qc] {
            check(dr(n).contains(x).unwrap() == Some(true), "witness outside D_n")?;
        }
        let next = trichotomy(&mc, &dr(n + 1)).unwrap();
        check(next.kind == Trichotomy::Never, format!("n = {n}: {:?} vs D_(n+1)", next.kind))?;
    }
    Ok("n = 1, 2, 3: QC/NOT_QC, SOMETIMES vs D_n with reloaded witnesses, NEVER vs D_(n+1)".into())
}

fn chain() -> Outcome {
    let mut levels = vec![ChainLevel::Complete, ChainLevel::Dr(DrIndex::Zero)];
    levels.extend((2..=5).rev().map(|n| ChainLevel::Dr(DrIndex::Reciprocal(n))));
    levels.extend((1..=5).map(|n| ChainLevel::Dr(DrIndex::Natural(n))));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut families: Vec<RateSum> = vec![
        RateFn::power_log(1.0, 0.5, 0.0).unwrap().into(),
        RateFn::constant(1.0).unwrap().into(),
        RateFn::log(4.0).unwrap().into(),
        RateFn::geometric(1.0, 0.5).unwrap().into(),
        RateFn::power_log(1.0, 2.0, 0.0).unwrap().into(),
        RateFn::power_log(1.0, 1.0, 1.0).unwrap().into(),
        RateFn::power_log(1.0, 1.0, -1.0).unwrap().into(),
    ];
    while families.len() < 20 {
        let p = rng.gen_range(-0.5..3.0);
        let q = rng.gen_range(-2.0..2.0);
        families.push(RateFn::power_log(rng.gen_range(0.1..3.0), p, q).unwrap().into());
    }
    for f in &families {
        let m: Vec<Membership> = levels.iter().map(|&l| chain_membership(f, l)).collect();
        for i in 1..m.len() {
            if m[i] == Membership::Member {
                check(m[i - 1] == Membership::Member, format!("chain not downward closed for {f:?}"))?;
            }
        }
    }
    let half = &families[0];
    check(dr_membership(half, DrIndex::Natural(2)) == Membership::Member, "m^(-1/2) not in D_2")?;
    check(dr_membership(half, DrIndex::Natural(3)) == Membership::NotMember, "m^(-1/2) in D_3")?;
    Ok(format!("{} families on {} levels; m^(-1/2) in D_2, not in D_3", families.len(), levels.len()))
}

fn random_finite(rng: &mut ChaCha8Rng) -> MappingClass {
    let mut gens = Vec::new();
    for _ in 0..rng.gen_range(1..4) {
        if rng.gen_bool(0.5) {
            gens.push(Generator::MultiTwist(MultiTwist::Finite {
                twists: vec![(rng.gen_range(1..20), rng.gen_range(-3..4))],
            }));
        } else {
            let a = rng.gen_range(1..20u64);
            let b = a + rng.gen_range(1..5u64);
            gens.push(Generator::FinitePerm { pairs: vec![(a, b), (b, a)] });
        }
    }
    MappingClass::new(gens).unwrap()
}

fn axioms() -> Outcome {
    let sys = SubspaceDesc::SystoleBounded { epsilon: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let g = random_finite(&mut rng);
        check(support_class(&g).unwrap() == SupportClass::Finite, "finite class reported infinite")?;
        check(trichotomy(&g, &sys).unwrap().kind == Trichotomy::Always, "finite class not ALWAYS")?;
    }
    let bounded = MappingClass::multi_twist(RateFn::constant(1.0).unwrap()).unwrap();
    let unbounded = MappingClass::multi_twist(RateFn::power_log(1.0, -0.5, 0.0).unwrap()).unwrap();
    check(trichotomy(&bounded, &sys).unwrap().kind == Trichotomy::Sometimes, "bounded not SOMETIMES")?;
    check(trichotomy(&unbounded, &sys).unwrap().kind == Trichotomy::Never, "unbounded not NEVER")?;
    let subs = [SubspaceDesc::FullH, sys, dr(2), dr(3), SubspaceDesc::MetrComplete];
    for _ in 0..20 {
        let g = random_finite(&mut rng);
        let mc = if rng.gen_bool(0.5) {
            MappingClass::multi_twist(RateFn::power_log(1.0, -rng.gen_range(0.1..1.5), 0.0).unwrap()).unwrap()
        } else {
            MappingClass::multi_twist(RateFn::constant(rng.gen_range(0.5..4.0)).unwrap()).unwrap()
        };
        let conj = g.compose(&mc).compose(&g.inverse());
        for sub in &subs {
            let (a, b) = (trichotomy(&mc, sub).unwrap().kind, trichotomy(&conj, sub).unwrap().kind);
            check(a == b, format!("conjugation changes {a:?} to {b:?} for {sub:?}"))?;
        }
    }
    Ok("finite -> ALWAYS, bounded -> SOMETIMES, unbounded -> NEVER vs systole >= 1; 20 conjugations".into())
}

fn flute_shape(tree: &FiniteGraph, graph: &FiniteGraph, spine: &[u64], rungs: &[(u64, u64)]) -> bool {
    let edges: BTreeSet<(u64, u64)> = graph.edges.iter().copied().collect();
    let distinct: BTreeSet<u64> = spine.iter().copied().collect();
    distinct.len() == spine.len()
        && rungs.len() + 1 == spine.len()
        && rungs
            .iter()
            .all(|&(a, b)| edges.contains(&(a.min(b), a.max(b))) && tree.edges.contains(&(a.min(b), a.max(b))))
}

fn extraction() -> Outcome {
    let cantor = truncate(DualGraph::CantorTree, 10);
    let tree = maximal_tree(&cantor).unwrap();
    let d = extract_flute(&tree, 0).unwrap();
    check(d.spine_length() == 10, format!("cantor spine length {}", d.spine_length()))?;
    check(flute_shape(&tree, &cantor, &d.spine, &d.rungs), "cantor descriptor is not a flute")?;
    let f = truncate(DualGraph::Flute, 10);
    let ft = maximal_tree(&f).unwrap();
    let fd = extract_flute(&ft, 0).unwrap();
    let covered: BTreeSet<u64> = fd.spine.iter().copied().collect();
    check(covered == f.vertices, "flute descriptor misses vertices")?;
    check(flute_shape(&ft, &f, &fd.spine, &fd.rungs), "flute descriptor is not a flute")?;
    for g in [DualGraph::Flute, DualGraph::BiinfiniteFlute, DualGraph::LochNess, DualGraph::CantorTree] {
        for k in 1..=10 {
            check(
                truncate(g, k).is_induced_subgraph_of(&truncate(g, k + 1)),
                format!("{g:?} incoherent at k = {k}"),
            )?;
        }
    }
    Ok("cantor spine length 10, flute covered, coherence k = 1..10 on 4 families".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("collar sandwich", sandwich),
        ("oracle equivalence", oracle),
        ("term asymptotics", asymptotics),
        ("metric truncation", metric),
        ("zig-zag contract", zigzag),
        ("non-convexity", nonconvexity),
        ("relative trichotomy", relative_trichotomy),
        ("D_r chain", chain),
        ("trichotomy axioms", axioms),
        ("flute extraction", extraction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
