//! Acceptance suite: one PASS/FAIL line per criterion, all checks exact.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cantor_core::algebra::{approx_algebra_iso, boolean_distance, caratheodory_tower, interval_realize, IntervalSet};
use cantor_core::cert::verify;
use cantor_core::cli::{run_command, DemoReport};
use cantor_core::good::{
    approx_measure_homeo, clopen_values, default_budget, group_like_check, is_measure_preserving, measure_clopen_iso,
    GroupLike, MeasureIso,
};
use cantor_core::homeo::approx_homeo;
use cantor_core::maps::{
    injectivity_certificate, sup_distance, surjectivity_decide, verify_collision, Distance, Injectivity, Surjectivity,
    DEFAULT_BUFFER_BOUND,
};
use cantor_core::measure::{check_preserves, delta_for_epsilon, Preservation};
use cantor_core::rational::{dyadic, ratio};
use cantor_core::{BoolOp, ClopenSet, CylinderMeasure, PrefixExchange, Rational, TransducerMap, Word};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn set(words: &[&str]) -> ClopenSet {
    ClopenSet::canonicalize(words.iter().map(|s| w(s)))
}

fn bern(n: i64, d: i64) -> CylinderMeasure {
    CylinderMeasure::bernoulli(ratio(n, d)).unwrap()
}

/// Bernoulli weight of `[u]` computed from scratch.
fn bern_weight(p: &Rational, u: &Word) -> Rational {
    u.bits().iter().fold(Rational::one(), |acc, &b| acc * if b { Rational::one() - p } else { p.clone() })
}

fn bern_measure(p: &Rational, a: &ClopenSet) -> Rational {
    a.words().iter().map(|u| bern_weight(p, u)).sum()
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_bits((0..len).map(|_| rng.gen()).collect())
}

/// A random complete prefix code with `leaves` words.
fn random_code(rng: &mut ChaCha8Rng, leaves: usize) -> Vec<Word> {
    let mut code = vec![Word::empty()];
    while code.len() < leaves {
        let u = code.swap_remove(rng.gen_range(0..code.len()));
        code.push(u.child(false));
        code.push(u.child(true));
    }
    code
}

fn random_exchange(rng: &mut ChaCha8Rng) -> PrefixExchange {
    let k = rng.gen_range(1..=6);
    let sources = random_code(rng, k);
    let mut targets = random_code(rng, k);
    targets.shuffle(rng);
    PrefixExchange::new(sources.into_iter().zip(targets).collect()).unwrap()
}

/// fold, identity, first-bit flip, then 20 compositions `e2 ∘ base ∘ e1`.
fn map_corpus() -> Vec<(String, TransducerMap)> {
    let bases = [
        ("fold", TransducerMap::fold()),
        ("identity", TransducerMap::identity()),
        ("flip", TransducerMap::flip_first()),
    ];
    let mut out: Vec<(String, TransducerMap)> = bases.iter().map(|(n, f)| (n.to_string(), f.clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..20 {
        let (name, base) = &bases[i % 3];
        let e1 = random_exchange(&mut rng).to_transducer().unwrap();
        let e2 = random_exchange(&mut rng).to_transducer().unwrap();
        out.push((format!("mix{i}({name})"), e1.then(base).then(&e2)));
    }
    out
}

fn is_bijective(g: &TransducerMap) -> bool {
    surjectivity_decide(g) == Surjectivity::Surjective
        && matches!(injectivity_certificate(g, DEFAULT_BUFFER_BOUND), Injectivity::Injective { .. })
}

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn clopen_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<Word> = Word::all_of_length(8).collect();
    let member = |raw: &[Word], x: &Word| raw.iter().any(|u| u.is_prefix_of(x));
    for _ in 0..1000 {
        let ra: Vec<Word> = (0..rng.gen_range(0..6)).map(|_| random_word(&mut rng, 8)).collect();
        let rb: Vec<Word> = (0..rng.gen_range(0..6)).map(|_| random_word(&mut rng, 8)).collect();
        let (a, b) = (ClopenSet::canonicalize(ra.clone()), ClopenSet::canonicalize(rb.clone()));
        for op in [BoolOp::Union, BoolOp::Intersection, BoolOp::Difference, BoolOp::BooleanSum, BoolOp::Complement] {
            let r = if op == BoolOp::Complement { a.boolean_op(op, None) } else { a.boolean_op(op, Some(&b)) };
            for x in &points {
                let (ia, ib) = (member(&ra, x), member(&rb, x));
                let want = match op {
                    BoolOp::Union => ia || ib,
                    BoolOp::Intersection => ia && ib,
                    BoolOp::Difference => ia && !ib,
                    BoolOp::BooleanSum => ia != ib,
                    BoolOp::Complement => !ia,
                };
                ensure!(r.contains_point_prefix(x) == Some(want), "{op:?} of {a} and {b} wrong at {x}");
            }
        }
    }
    Ok("1000 pairs x 5 operations x 256 points".into())
}

fn preimage_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tails = [w(&"0".repeat(24)), w(&"1".repeat(24)), w(&"01".repeat(12))];
    let corpus = map_corpus();
    for (name, f) in &corpus {
        let raw: Vec<Word> = (0..rng.gen_range(1..5)).map(|_| random_word(&mut rng, 4)).collect();
        let a = ClopenSet::canonicalize(raw);
        let pre = f.preimage(&a);
        for x in Word::all_of_length(12) {
            for t in &tails {
                let point = x.concat(t);
                let image = f.evaluate(&point);
                let want = a.contains_point_prefix(&image);
                ensure!(want.is_some(), "{name}: output of {point} too short");
                ensure!(pre.contains_point_prefix(&point) == want, "{name}: preimage of {a} wrong at {point}");
            }
        }
    }
    Ok(format!("{} maps x 4096 words x 3 tails", corpus.len()))
}

fn density_witness() -> Check {
    let g = approx_homeo(&TransducerMap::fold(), 1).map_err(|e| e.to_string())?;
    let want = vec![(w("00"), w("00")), (w("01"), w("10")), (w("10"), w("11")), (w("11"), w("01"))];
    ensure!(g.sorted_rules() == want, "fold at n = 1 gave {:?}", g.sorted_rules());
    let d = sup_distance(&TransducerMap::fold(), &g.to_transducer().unwrap(), 5);
    ensure!(matches!(&d, Distance::Exact { value, .. } if *value == ratio(1, 2)), "fold at n = 1 distance {d:?}");

    let mut checked = 0;
    for (name, f) in map_corpus() {
        ensure!(surjectivity_decide(&f) == Surjectivity::Surjective, "{name} is not surjective");
        for n in 1..=8 {
            let g = approx_homeo(&f, n).map_err(|e| format!("{name}, n = {n}: {e}"))?;
            ensure!(g.is_self_map_of_whole(), "{name}, n = {n}: not a self-map");
            let gt = g.to_transducer().unwrap();
            ensure!(is_bijective(&gt), "{name}, n = {n}: not bijective");
            let d = sup_distance(&f, &gt, n + 4);
            ensure!(*d.value() <= dyadic(n), "{name}, n = {n}: distance {}", d.value());
            checked += 1;
        }
    }
    Ok(format!("{checked} approximations, fold/1 anchor exact"))
}

fn bijectivity_certificates() -> Check {
    let fold = TransducerMap::fold();
    ensure!(surjectivity_decide(&fold) == Surjectivity::Surjective, "fold not surjective");
    match injectivity_certificate(&fold, DEFAULT_BUFFER_BOUND) {
        Injectivity::NotInjective { witness } => ensure!(verify_collision(&fold, &witness), "bad witness {witness:?}"),
        other => return Err(format!("fold injectivity {other:?}")),
    }
    let constant = TransducerMap::constant(false);
    let s = surjectivity_decide(&constant);
    ensure!(s == Surjectivity::NotSurjective { witness: w("1") }, "constant emitter gave {s:?}");
    Ok("fold surjective, collision verified, constant misses [1]".into())
}

fn preservation() -> Check {
    let fold = TransducerMap::fold();
    let r = check_preserves(&fold, &bern(1, 2), &bern(1, 2), 12);
    ensure!(matches!(r, Preservation::Preserved { .. }), "fair coin: {r:?}");
    let r = check_preserves(&fold, &bern(1, 3), &bern(1, 3), 1);
    let want = Preservation::Violated { witness: w("0"), lhs: ratio(5, 9), rhs: ratio(1, 3) };
    ensure!(r == want, "triadic coin: {r:?}");
    // independent recount of the witness
    let p = ratio(1, 3);
    ensure!(bern_measure(&p, &fold.preimage(&set(&["0"]))) == ratio(5, 9), "oracle disagrees on 5/9");
    Ok("Preserved at 12; Violated(0, 5/9, 1/3)".into())
}

fn union_of(cells: &[(ClopenSet, IntervalSet)], mut pick: impl FnMut(usize) -> bool) -> (ClopenSet, IntervalSet) {
    let mut a = ClopenSet::empty();
    let mut s = IntervalSet::empty();
    for (i, (c, iv)) in cells.iter().enumerate() {
        if pick(i) {
            a = a.union(c);
            s = s.union(iv);
        }
    }
    (a, s)
}

fn realization() -> Check {
    let p = ratio(1, 3);
    let m = bern(1, 3);
    let t = caratheodory_tower(&m, &[], 6).map_err(|e| e.to_string())?;
    ensure!(t.levels.len() == 6, "tower has {} levels", t.levels.len());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (i, level) in t.levels.iter().enumerate() {
        let cells: Vec<(ClopenSet, IntervalSet)> =
            level.cells.iter().map(|c| (c.set.clone(), c.interval.clone())).collect();
        for (c, iv) in &cells {
            ensure!(iv.length() == bern_measure(&p, c), "level {}: λ(S({c})) != μ({c})", i + 1);
        }
        let mesh = cells.iter().map(|(c, _)| bern_measure(&p, c)).max().unwrap();
        ensure!(mesh == t.mesh(i + 1) && mesh <= ratio(1, i as i64 + 1), "level {}: mesh {mesh}", i + 1);

        let parents: Vec<(ClopenSet, IntervalSet)> = if i == 0 {
            vec![(ClopenSet::whole(), IntervalSet::interval(Rational::zero(), Rational::one()))]
        } else {
            t.levels[i - 1].cells.iter().map(|c| (c.set.clone(), c.interval.clone())).collect()
        };
        for (pi, (ps, piv)) in parents.iter().enumerate() {
            let kids: Vec<&(ClopenSet, IntervalSet)> =
                level.cells.iter().zip(&cells).filter(|(c, _)| c.parent.unwrap_or(0) == pi).map(|(_, k)| k).collect();
            let mut us = ClopenSet::empty();
            let mut ui = IntervalSet::empty();
            for (k, kiv) in &kids {
                ensure!(us.is_disjoint(k) && ui.is_disjoint(kiv), "level {}: overlapping children", i + 1);
                us = us.union(k);
                ui = ui.union(kiv);
            }
            ensure!(us == *ps && ui == *piv, "level {}: children do not partition parent {pi}", i + 1);
        }

        let exhaustive = cells.len() <= 12;
        let trials = if exhaustive { 1usize << cells.len() } else { 400 };
        for trial in 0..trials {
            let bits: u64 = if exhaustive { trial as u64 } else { rng.gen() };
            let (a, s) = union_of(&cells, |j| if exhaustive { bits >> j & 1 == 1 } else { rng.gen() });
            ensure!(s.length() == bern_measure(&p, &a), "level {}: λ(S(A)) != μ(A)", i + 1);
            let r = interval_realize(&t, &a).map_err(|e| e.to_string())?;
            ensure!(r == s, "level {}: realization of {a} is {r}, expected {s}", i + 1);
        }
    }

    let last: Vec<(ClopenSet, IntervalSet)> =
        t.levels[5].cells.iter().map(|c| (c.set.clone(), c.interval.clone())).collect();
    for _ in 0..200 {
        let (a, sa) = union_of(&last, |_| rng.gen());
        let (b, sb) = union_of(&last, |_| rng.gen());
        let lhs = boolean_distance(&m, &a, &b);
        ensure!(lhs == bern_measure(&p, &a.boolean_sum(&b)), "distance disagrees with the oracle");
        ensure!(lhs == sa.boolean_sum(&sb).length(), "isometry fails for {a} and {b}");
    }

    let s0 = interval_realize(&t, &set(&["0"])).map_err(|e| e.to_string())?;
    let s11 = interval_realize(&t, &set(&["11"])).map_err(|e| e.to_string())?;
    ensure!(s0 == IntervalSet::interval(Rational::zero(), ratio(1, 3)), "S([0]) = {s0}");
    ensure!(s11 == IntervalSet::interval(ratio(5, 9), Rational::one()), "S([11]) = {s11}");
    Ok("6 levels, 200 isometry pairs, S([0]) = [0,1/3], S([11]) = [5/9,1]".into())
}

fn algebra_agreement() -> Check {
    let fold = TransducerMap::fold();
    let (mu, nu) = (bern(1, 2), bern(1, 2));
    let p = ratio(1, 2);
    let cylinders: Vec<ClopenSet> = Word::all_up_to(3).filter(|u| !u.is_empty()).map(ClopenSet::cylinder).collect();
    let mut pairs = 0usize;
    for n in 1..=5 {
        let t = approx_algebra_iso(&fold, &mu, &nu, &cylinders, n, 3, None).map_err(|e| format!("n = {n}: {e}"))?;
        t.check().map_err(|e| format!("n = {n}: {e}"))?;
        for (l, level) in t.levels.iter().enumerate() {
            for e in &cylinders[..n] {
                let image = t.image(l, e).map_err(|err| format!("n = {n}, level {l}: {err}"))?;
                ensure!(image == fold.preimage(e), "n = {n}, level {l}: T({e}) = {image}");
            }
            for c in &level.cells {
                ensure!(
                    bern_measure(&p, &c.x) == bern_measure(&p, &c.y),
                    "n = {n}, level {l}: cell {} not matched",
                    c.y
                );
            }
            for (i, c1) in level.cells.iter().enumerate() {
                for c2 in &level.cells[i + 1..] {
                    let dx = bern_measure(&p, &c1.x.boolean_sum(&c2.x));
                    let dy = bern_measure(&p, &c1.y.boolean_sum(&c2.y));
                    ensure!(dx == dy, "n = {n}, level {l}: not isometric on {} and {}", c1.y, c2.y);
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("n = 1..5, {pairs} cell pairs isometric"))
}

/// Every subset sum of the depth-`d` cylinder weights.
fn brute_values(p: &Rational, d: usize) -> Vec<Rational> {
    let weights: Vec<Rational> = Word::all_of_length(d).map(|u| bern_weight(p, &u)).collect();
    let mut sums = std::collections::BTreeSet::from([Rational::zero()]);
    for wgt in &weights {
        let next: Vec<Rational> = sums.iter().map(|s| s + wgt).collect();
        sums.extend(next);
    }
    sums.into_iter().collect()
}

fn value_sets() -> Check {
    let v = clopen_values(&bern(1, 2), 2).map_err(|e| e.to_string())?.values;
    ensure!(v == (0..=4).map(|k| ratio(k, 4)).collect::<Vec<_>>(), "fair coin depth 2: {v:?}");
    let v = clopen_values(&bern(1, 3), 2).map_err(|e| e.to_string())?.values;
    ensure!(v == (0..=9).map(|k| ratio(k, 9)).collect::<Vec<_>>(), "triadic coin depth 2: {v:?}");

    for (pn, pd) in [(1, 2), (1, 3)] {
        let (p, m) = (ratio(pn, pd), bern(pn, pd));
        for d in 1..=10 {
            let s = clopen_values(&m, d).map_err(|e| e.to_string())?;
            if d <= 6 {
                ensure!(s.values == brute_values(&p, d), "B({p}) depth {d}: values differ from subset sums");
            }
            ensure!(
                s.values.first() == Some(&Rational::zero()) && s.values.last() == Some(&Rational::one()),
                "endpoints"
            );
            let cap = Word::all_of_length(d).map(|u| bern_weight(&p, &u)).max().unwrap();
            ensure!(s.max_gap() <= cap, "B({p}) depth {d}: gap {} above {cap}", s.max_gap());
            if d <= 8 {
                let g = group_like_check(&s.values, &s.total).map_err(|e| e.to_string())?;
                ensure!(g == GroupLike::GroupLike, "B({p}) depth {d}: {g:?}");
            }
        }
        for l in 2..=6 {
            let eps = ratio(1, l);
            let k = delta_for_epsilon(&m, &eps).map_err(|e| e.to_string())?.depth;
            let s = clopen_values(&m, k).map_err(|e| e.to_string())?;
            ensure!(s.max_gap() < eps, "B({p}): gap at the depth for 1/{l} is {}", s.max_gap());
        }
    }
    Ok("anchors exact, group-like to depth 8, gap bound to depth 10".into())
}

fn measure_witness() -> Check {
    let fold = TransducerMap::fold();
    let (mu, p) = (bern(1, 2), ratio(1, 2));
    for n in 1..=8 {
        let a = approx_measure_homeo(&fold, &mu, &mu, n, None).map_err(|e| format!("n = {n}: {e}"))?;
        let g = &a.exchange;
        let gt = g.to_transducer().unwrap();
        ensure!(g.is_self_map_of_whole() && is_bijective(&gt), "n = {n}: not bijective");
        for (u, v) in g.rules() {
            ensure!(bern_weight(&p, u) == bern_weight(&p, v), "n = {n}: rule {u} -> {v} unequal");
        }
        ensure!(is_measure_preserving(g, &mu, &mu), "n = {n}: not measure-preserving");
        let pres = check_preserves(&gt, &mu, &mu, g.max_depth() + 2);
        ensure!(matches!(pres, Preservation::Preserved { .. }), "n = {n}: {pres:?}");
        let d = sup_distance(&fold, &gt, n + 4);
        ensure!(*d.value() <= dyadic(n), "n = {n}: distance {}", d.value());
    }
    let whole = ClopenSet::whole();
    let budget = default_budget(0);
    let r = measure_clopen_iso(&bern(1, 2), &bern(1, 3), &whole, &whole, budget).map_err(|e| e.to_string())?;
    ensure!(matches!(&r, MeasureIso::FailedAtBudget { budget: b, .. } if *b == budget), "cross-measure gave {r:?}");
    let e = approx_measure_homeo(&fold, &bern(1, 2), &bern(1, 3), 1, None);
    ensure!(e.is_err(), "fold cannot carry B(1/2) to B(1/3)");
    Ok(format!("n = 1..8 preserving; B(1/2) vs B(1/3) FailedAtBudget({budget})"))
}

fn certificate_round_trip() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut total = 0;
    for mode in ["topological", "measure"] {
        let out = run_command(["cantor", "demo-generic", "--map", "fold", "--mode", mode, "--n-max", "6"]);
        ensure!(out.code == 0, "{mode} demo exited {}: {}", out.code, out.stderr);
        let report: DemoReport = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
        ensure!(report.rows.len() == 6, "{mode}: {} rows", report.rows.len());
        for row in &report.rows {
            let bad = verify(&row.certificate);
            ensure!(bad.is_empty(), "{mode}, n = {}: {bad:?}", row.n);
            ensure!(row.certificate.measure.is_some() == (mode == "measure"), "{mode}, n = {}: measure section", row.n);
            total += 1;
        }
        let path = dir.path().join(format!("{mode}.json"));
        std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
        let back = run_command(["cantor", "verify", "--certificate", path.to_str().unwrap()]);
        let v: serde_json::Value = serde_json::from_str(&back.stdout).map_err(|e| e.to_string())?;
        ensure!(back.code == 0 && v["discrepancies"] == serde_json::json!([]), "{mode}: verify said {}", back.stdout);
    }
    Ok(format!("{total} certificates, zero discrepancies"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("clopen algebra oracle", clopen_oracle, 5),
        ("preimage oracle", preimage_oracle, 10),
        ("homeomorphic density witness", density_witness, 30),
        ("bijectivity certificates", bijectivity_certificates, 1),
        ("measure preservation", preservation, 5),
        ("interval realization", realization, 10),
        ("algebra isomorphism agreement", algebra_agreement, 10),
        ("clopen value sets", value_sets, 20),
        ("measure-preserving witness", measure_witness, 30),
        ("certificate round-trip", certificate_round_trip, 60),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s, limit {limit}s", elapsed.as_secs_f64());
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({timing})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({timing})", i + 1);
            }
        }
        // time limits are release-build figures; debug builds are only reported
        if cfg!(not(debug_assertions)) && elapsed > Duration::from_secs(*limit) {
            failed += 1;
            println!("FAIL {:>2} {name}: over the time limit", i + 1);
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
