//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use bsscl::bs_words::{britton_cyclic_reduce, parse_chain, Chain, ChainTerm, GroupParams, Letter, Reduced, TightWord};
use bsscl::encoding::{enumerate_turns, turn_exists, winding_context};
use bsscl::extremal::{extremal_verdict, optimal_piece_solution, sufficient_extremal_check, ExtremalVerdict};
use bsscl::solver_block::{scl_block, verify_turn_costs, CostTable, SclResult, SclValue};
use bsscl::solver_pieces::{export_surface, reduce_degree, scl_pieces, PieceSolution};
use bsscl::sweep::{surgery_sweep, SweepOptions};
use bsscl::Rational;
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

static VERIFIED: Mutex<Vec<(String, bool)>> = Mutex::new(Vec::new());
static ALPHABETS: Mutex<Vec<(String, GroupParams)>> = Mutex::new(Vec::new());

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn group(m: i64, l: i64) -> GroupParams {
    GroupParams::new(m, l).unwrap()
}

fn chain(text: &str, p: &GroupParams) -> Chain {
    ALPHABETS.lock().unwrap().push((text.to_string(), *p));
    parse_chain(text, p).unwrap()
}

fn record(label: &str, r: &SclResult) {
    VERIFIED.lock().unwrap().push((label.to_string(), r.verified));
}

fn finite(r: &SclResult) -> Result<Rational, String> {
    r.value.finite().cloned().ok_or_else(|| "infinite".to_string())
}

fn block(text: &str, p: &GroupParams) -> Result<(Rational, Duration), String> {
    let c = chain(text, p);
    let t = Instant::now();
    let r = scl_block(&c, p).map_err(|e| format!("{text} in BS({},{}): {e}", p.big_m, p.big_l))?;
    record(text, &r);
    Ok((finite(&r)?, t.elapsed()))
}

fn pieces(text: &str, p: &GroupParams, max_turns: u32) -> Result<(PieceSolution, Duration), String> {
    let c = chain(text, p);
    let t = Instant::now();
    let sol = scl_pieces(&c, p, max_turns)
        .map_err(|e| format!("{text} in BS({},{}) at max_turns={max_turns}: {e}", p.big_m, p.big_l))?;
    record(text, &sol.result);
    Ok((sol, t.elapsed()))
}

fn within(label: &str, took: Duration, limit: Duration) -> Result<(), String> {
    if took <= limit {
        Ok(())
    } else {
        Err(format!("{label} took {took:.1?}, limit {limit:?}"))
    }
}

fn expect(label: &str, got: &Rational, want: &Rational) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want}"))
    }
}

const EG3: &str = "at^2At^-2";
const EG2: &str = "at^2At^-1 + T";
const PRODUCT_GROUPS: [(i64, i64); 4] = [(2, 3), (2, 5), (3, 4), (3, 5)];
const EG1_GROUPS: [(i64, i64); 4] = [(2, 2), (2, 4), (4, 6), (6, 9)];

fn product_value(m: i64, l: i64) -> Rational {
    (Rational::from_integer(1.into()) - q(1, m) - q(1, l)) / Rational::from_integer(2.into())
}

fn eg1_value(k: i64, p: &GroupParams) -> Rational {
    q(1, 2) - q(k.gcd(&p.d), 2 * p.d)
}

fn c1a() -> Check {
    let (sol, took) = pieces(EG3, &group(2, 3), 3)?;
    within("eg3 at max_turns=3", took, Duration::from_secs(120))?;
    expect("eg3 at max_turns=3", &finite(&sol.result)?, &q(5, 24))?;
    Ok(format!("5/24 at max_turns=3 in {took:.1?}"))
}

fn c1b() -> Check {
    let p = group(2, 3);
    let (mut sol, took) = pieces(EG3, &p, 4)?;
    within("eg3 at max_turns=4", took, Duration::from_secs(120))?;
    expect("eg3 at max_turns=4", &finite(&sol.result)?, &q(5, 24))?;
    expect("kappa", &sol.kappa, &(q(5, 4) + q(1, 3)))?;
    let c = parse_chain(EG3, &p).unwrap();
    reduce_degree(&c, &mut sol, 16).map_err(|e| e.to_string())?;
    let surface = export_surface(&sol, None).map_err(|e| e.to_string())?;
    if surface.degree != 36 || !surface.gluing_ok {
        return Err(format!("surface degree {} (gluing ok: {})", surface.degree, surface.gluing_ok));
    }
    expect("surface -chi/2n", &surface.scl, &q(5, 24))?;
    let costs = verify_turn_costs(&c, &p, &CostTable::commutator_t_squared(), 4).map_err(|e| e.to_string())?;
    if !costs.passes_bound || costs.scl_lower != Some(q(5, 24)) {
        return Err(format!("cost table: {}", costs.summary()));
    }
    Ok(format!("5/24 at max_turns=4 in {took:.1?}; degree 36, kappa 19/12; {}", costs.summary()))
}

fn c2() -> Check {
    let mut slowest = Duration::ZERO;
    for (m, l) in PRODUCT_GROUPS {
        let p = group(m, l);
        let (v, took) = block("atAT", &p)?;
        within(&format!("atAT in BS({m},{l})"), took, Duration::from_secs(30))?;
        expect(&format!("atAT in BS({m},{l})"), &v, &product_value(m, l))?;
        slowest = slowest.max(took);
    }
    Ok(format!("atAT on 4 groups, slowest {slowest:.1?}"))
}

fn c3() -> Check {
    let mut out = Vec::new();
    for (m, l) in [(2, 3), (3, 5)] {
        let p = group(m, l);
        let bound = m.min(l) as u32 + 2;
        let (sol, took) = pieces("ataTAtAT", &p, bound)?;
        within(&format!("BS({m},{l})"), took, Duration::from_secs(120))?;
        expect(&format!("ataTAtAT in BS({m},{l})"), &finite(&sol.result)?, &(q(1, 2) - q(1, m.min(l))))?;
        out.push(format!("BS({m},{l}) at max_turns={bound} in {took:.1?}"));
    }
    Ok(out.join(", "))
}

fn c4() -> Check {
    let mut slowest = Duration::ZERO;
    for (m, l) in EG1_GROUPS {
        let p = group(m, l);
        for k in 1..=6 {
            let text = format!("a^{k}t^2 + 2T");
            let (v, took) = block(&text, &p)?;
            within(&format!("{text} in BS({m},{l})"), took, Duration::from_secs(1))?;
            expect(&format!("{text} in BS({m},{l})"), &v, &eg1_value(k, &p))?;
            slowest = slowest.max(took);
        }
    }
    Ok(format!("24 instances, slowest {slowest:.1?}"))
}

fn c5() -> Check {
    let mut slowest = Duration::ZERO;
    for (m, l) in [(2, 2), (4, 6), (6, 9)] {
        let p = group(m, l);
        let (v, took) = block(EG2, &p)?;
        within(&format!("BS({m},{l})"), took, Duration::from_secs(300))?;
        expect(&format!("eg2 in BS({m},{l})"), &v, &(q(1, 2) - q(1, 4 * m) - q(1, 4 * l)))?;
        slowest = slowest.max(took);
    }
    let (v, took) = block(EG2, &group(2, 3))?;
    within("BS(2,3)", took, Duration::from_secs(300))?;
    if v < q(1, 4) || v > q(7, 24) {
        return Err(format!("eg2 in BS(2,3) = {v}, outside [1/4, 7/24]"));
    }
    Ok(format!("exact on 3 groups; BS(2,3) gives {v} in [1/4, 7/24]; slowest {:.1?}", slowest.max(took)))
}

fn c6() -> Check {
    let report = surgery_sweep(EG2, 2, 3, 2..=6, &SweepOptions::default()).map_err(|e| e.to_string())?;
    for row in &report.rows {
        let v = row.value.clone().ok_or_else(|| format!("d={}: {:?}", row.d, row.error))?;
        expect(&format!("d={}", row.d), &v, &(q(1, 2) - q(5, 24 * row.d)))?;
        if let Ok(p) = GroupParams::new(row.big_m, row.big_l) {
            ALPHABETS.lock().unwrap().push((EG2.to_string(), p));
        }
    }
    if !report.is_monotone() {
        return Err("values are not monotone".into());
    }
    let values: Vec<String> = report.rows.iter().filter_map(|r| r.value.as_ref().map(|v| v.to_string())).collect();
    Ok(format!("d=2..6: {}", values.join(", ")))
}

fn random_letters(rng: &mut StdRng, len: usize) -> Vec<Letter> {
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Letter::A(rng.gen_range(-4..=4))
            } else {
                Letter::T(if rng.gen_bool(0.5) { 1 } else { -1 })
            }
        })
        .collect()
}

fn random_tight(rng: &mut StdRng, p: &GroupParams, len: usize) -> TightWord {
    loop {
        if let Reduced::Tight(w) = britton_cyclic_reduce(&random_letters(rng, len), p) {
            return w;
        }
    }
}

fn c7a() -> Check {
    let p = group(2, 3);
    let mut rng = StdRng::seed_from_u64(7);
    let mut words: Vec<String> = Vec::new();
    while words.len() < 5 {
        let w = random_tight(&mut rng, &p, 8);
        if words.contains(&w.to_string()) {
            continue;
        }
        let c = Chain::new(vec![
            ChainTerm { coeff: Rational::from_integer(1.into()), word: w.clone() },
            ChainTerm { coeff: Rational::from_integer(1.into()), word: w.inverse() },
        ])
        .map_err(|e| e.to_string())?;
        let r = scl_block(&c, &p).map_err(|e| format!("{c}: {e}"))?;
        record("g + g^-1", &r);
        if r.value != SclValue::Finite(Rational::from_integer(0.into())) {
            return Err(format!("scl({c}) = {}", r.value));
        }
        words.push(w.to_string());
    }
    Ok(format!("5 seeded words in BS(2,3): {}", words.join(", ")))
}

fn c7b() -> Check {
    for (m, l) in PRODUCT_GROUPS {
        let p = group(m, l);
        let (one, _) = block("atAT", &p)?;
        let (two, _) = block("2 atAT", &p)?;
        expect(&format!("scl(2 atAT) in BS({m},{l})"), &two, &(one * Rational::from_integer(2.into())))?;
    }
    Ok("scl(2c) = 2 scl(c) on 4 groups".into())
}

fn c7c() -> Check {
    let seen = ALPHABETS.lock().unwrap().clone();
    let mut turns = 0;
    for (text, p) in &seen {
        let c = parse_chain(text, p).unwrap();
        let ctx = winding_context(&c, p).map_err(|e| e.to_string())?;
        let alpha = enumerate_turns(&c, &ctx);
        for t in 0..alpha.len() {
            let pt = alpha.pair(t);
            let (a, b) = (alpha.turns[t], alpha.turns[pt]);
            let ok = alpha.pair(pt) == t
                && turn_exists(&alpha.arcs, a.from, a.to)
                && b.from == alpha.pred(a.to)
                && b.to == alpha.succ(a.from)
                && (a.wclass + b.wclass) % ctx.we_mod == 0;
            if !ok {
                return Err(format!("{text} in BS({},{}): turn {t}", p.big_m, p.big_l));
            }
        }
        turns += alpha.len();
    }
    Ok(format!("{} alphabets, {turns} turns", seen.len()))
}

fn c7d() -> Check {
    let mut n = 0;
    let mut compare = |text: &str, p: &GroupParams, bound: u32| -> Result<(), String> {
        let (b, _) = block(text, p)?;
        let (sol, _) = pieces(text, p, bound)?;
        expect(&format!("pieces vs block, {text} in BS({},{})", p.big_m, p.big_l), &finite(&sol.result)?, &b)?;
        n += 1;
        Ok(())
    };
    // Smallest feasible bounds: max(M,L) for atAT, 2d for the eg1 grid.
    for (m, l) in PRODUCT_GROUPS {
        compare("atAT", &group(m, l), m.max(l) as u32)?;
    }
    for (m, l) in EG1_GROUPS {
        let p = group(m, l);
        for k in 1..=6 {
            compare(&format!("a^{k}t^2 + 2T"), &p, 2 * p.d as u32)?;
        }
    }
    Ok(format!("{n} instances agree"))
}

fn c7e() -> Check {
    let all = VERIFIED.lock().unwrap().clone();
    match all.iter().find(|(_, ok)| !ok) {
        Some((label, _)) => Err(format!("unverified solve: {label}")),
        None if all.is_empty() => Err("no solves recorded".into()),
        None => Ok(format!("{} solves verified", all.len())),
    }
}

fn c7f() -> Check {
    let mut rng = StdRng::seed_from_u64(100);
    let groups = [group(2, 3), group(3, 5), group(2, -4), group(4, 6)];
    for i in 0..100 {
        let p = &groups[i % groups.len()];
        let len = rng.gen_range(1..=14);
        let w = random_letters(&mut rng, len);
        let once = britton_cyclic_reduce(&w, p);
        let again = match &once {
            Reduced::Tight(t) => britton_cyclic_reduce(&t.to_letters(), p),
            Reduced::Elliptic(k) => britton_cyclic_reduce(&[Letter::A(*k)], p),
        };
        if once != again {
            return Err(format!("word {i}: {w:?}"));
        }
    }
    Ok("100 seeded words".into())
}

fn c8() -> Check {
    let p = group(4, 6);
    let c = chain(EG2, &p);
    if !sufficient_extremal_check(&c, &p).passed() {
        return Err("sufficient check fails on eg2".into());
    }
    let (sol, _) = optimal_piece_solution(&c, &p, 2, 8).map_err(|e| e.to_string())?;
    let v = extremal_verdict(&c, &p, &sol).map_err(|e| e.to_string())?;
    if v.status() != "exists" {
        return Err(format!("eg2 verdict {}", v.status()));
    }

    let p = group(2, 3);
    let c = chain("atAT", &p);
    if sufficient_extremal_check(&c, &p).passed() {
        return Err("sufficient check passes on [a,t]".into());
    }
    let (sol, _) = optimal_piece_solution(&c, &p, 2, 8).map_err(|e| e.to_string())?;
    let v = extremal_verdict(&c, &p, &sol).map_err(|e| e.to_string())?;
    if let ExtremalVerdict::Exists { .. } = v {
        let surface = export_surface(&sol, None).map_err(|e| e.to_string())?;
        expect("[a,t] exported surface", &surface.scl, &finite(&sol.result)?)?;
    }
    Ok(format!("eg2 in BS(4,6): exists; [a,t] in BS(2,3): inconclusive check, verdict {}", v.status()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("1a", c1a),
        ("1b", c1b),
        ("2", c2),
        ("3", c3),
        ("4", c4),
        ("5", c5),
        ("6", c6),
        ("7a", c7a),
        ("7b", c7b),
        ("7d", c7d),
        ("7f", c7f),
        ("8", c8),
        // These read what the earlier criteria recorded.
        ("7c", c7c),
        ("7e", c7e),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        match run() {
            Ok(note) => println!("PASS {id}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
