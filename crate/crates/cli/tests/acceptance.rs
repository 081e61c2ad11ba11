//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use choco::io::write_table_csv;
use choco_core::sequence::{
    self, classify_position, complete_yz, generate_sequence, inequality_class, BitTriple, FloorRelation,
};
use choco_core::verify::{self, OutcomeFilter};
use choco_core::{build_table, grundy, Bounds, GrundyMemo, Position, RuleSet, SeqType, StepFunction, StepSequence};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// P-positions printed for k = 2 over x, y, z <= 10.
const K2_P_POSITIONS: &str = "(0,0,0),(1,0,1),(1,1,2),(2,0,2),(2,1,1),(3,0,3),(3,1,4),\
(3,2,5),(3,3,6),(3,4,7),(3,5,8),(4,0,4),(4,1,3),(4,2,6),\
(4,3,5),(4,4,8),(4,5,7),(5,0,5),(5,1,6),(5,2,3),(5,3,4),\
(5,4,9),(5,5,10),(6,0,6),(6,1,5),(6,2,4),(6,3,3),(6,4,10),\
(6,5,9),(7,0,7),(7,1,8),(7,2,9),(7,3,10),(7,4,3),(7,5,4),\
(8,0,8),(8,1,7),(8,2,10),(8,3,9),(8,4,4),(8,5,3),(9,0,9),\
(9,1,10),(9,2,7),(9,3,8),(9,4,5),(9,5,6),(10,0,10),\
(10,1,9),(10,2,8),(10,3,7),(10,4,6),(10,5,5)";

fn parse_tuples(s: &str) -> Vec<Position> {
    s.split("),(")
        .map(|t| {
            let v: Vec<u64> = t.trim_matches(|c| c == '(' || c == ')').split(',').map(|n| n.parse().unwrap()).collect();
            Position::new(v[0], v[1], v[2])
        })
        .collect()
}

fn k3_characterization() -> Outcome {
    let start = Instant::now();
    let r = verify::verify_characterization(3, Bounds::uniform(20)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(r.passed, || format!("{} discrepancies: {:?}", r.discrepancies.len(), r.positions()))?;
    ensure(r.counts["positions"] == 3234, || format!("domain {}", r.counts["positions"]))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("0 discrepancies over 3234 positions in {elapsed:.2?}"))
}

fn k3_counts() -> Outcome {
    let t = build_table(RuleSet::Triangular(3), Bounds::uniform(20)).map_err(|e| e.to_string())?;
    let r = verify::compare_grundy_nimsum(&t, false);
    let (eq, ne, total) = (r.counts["equal"], r.counts["unequal"], r.counts["total"]);
    ensure((eq, ne, total) == (977, 2257, 3234), || format!("equal={eq} unequal={ne} total={total}"))?;
    Ok(format!("equal={eq} unequal={ne} total={total}"))
}

fn grundy_counterexample() -> Outcome {
    let mut memo = GrundyMemo::new();
    let expected = [
        ((0, 0, 0), 0),
        ((1, 0, 0), 1),
        ((0, 0, 1), 1),
        ((1, 0, 1), 0),
        ((0, 0, 2), 2),
        ((1, 0, 2), 3),
        ((1, 1, 2), 4),
    ];
    for (p, g) in expected {
        let got = grundy(RuleSet::Triangular(3), p.into(), &mut memo).map_err(|e| e.to_string())?;
        ensure(got == g, || format!("G{p:?} = {got}, expected {g}"))?;
    }
    Ok("G(1,1,2)=4 while 1^1^2=2; all seven values match".into())
}

fn k5_conjecture() -> Outcome {
    let r = verify::verify_conjecture_4m1(5, Bounds::new(20, 10, 20)).map_err(|e| e.to_string())?;
    let p_bad = r.with_reason(verify::Reason::PWithNonzeroNimSum);
    let n_bad = r.with_reason(verify::Reason::NWithZeroNimSum);
    ensure(p_bad.is_empty() && n_bad.is_empty(), || format!("P-list {p_bad:?}, N-list {n_bad:?}"))?;
    Ok(format!(
        "both lists empty over {} interior positions; {} boundary positions reported ({} P)",
        r.counts["positions"], r.counts["boundary_positions"], r.counts["boundary_p_positions"]
    ))
}

fn k2_enumeration() -> Outcome {
    let printed = parse_tuples(K2_P_POSITIONS);
    let t = build_table(RuleSet::Triangular(2), Bounds::uniform(10)).map_err(|e| e.to_string())?;
    let got = verify::enumerate_outcomes(&t, OutcomeFilter::P);
    for anchor in [(3, 1, 4), (5, 2, 3), (7, 4, 3), (10, 5, 5)] {
        ensure(got.contains(&anchor.into()), || format!("anchor {anchor:?} missing"))?;
    }
    ensure(!got.contains(&Position::new(1, 0, 0)), || "(1,0,0) present".into())?;
    let a: BTreeSet<_> = printed.iter().collect();
    let b: BTreeSet<_> = got.iter().collect();
    ensure(a == b, || {
        format!("missing {:?}, extra {:?}", a.difference(&b).collect::<Vec<_>>(), b.difference(&a).collect::<Vec<_>>())
    })?;
    Ok(format!("{} P-positions equal the printed list", got.len()))
}

fn rectangular_oracle() -> Outcome {
    let t = build_table(RuleSet::Rectangular, Bounds::uniform(10)).map_err(|e| e.to_string())?;
    let bad: Vec<_> = t.iter().filter(|&(p, g)| g as u64 != p.nim_sum()).collect();
    ensure(bad.is_empty(), || format!("{} mismatches, first {:?}", bad.len(), bad.first()))?;
    let r = verify::check_rectangular(&t).map_err(|e| e.to_string())?;
    ensure(r.passed, || "rectangular report failed".into())?;
    Ok(format!("G = x^y^z at all {} positions", t.len()))
}

fn move_closure() -> Outcome {
    let mut lines = Vec::new();
    for (k, b) in [(3, Bounds::uniform(20)), (7, Bounds::new(15, 4, 15))] {
        let r = verify::verify_move_closure(k, b).map_err(|e| e.to_string())?;
        ensure(r.passed, || format!("k={k}: violators {:?}", r.discrepancies))?;
        ensure(r.counts["witnesses"] == r.counts["b_positions"], || format!("k={k}: witness count"))?;
        lines.push(format!("k={k}: {} A, {} B, 0 violators", r.counts["a_positions"], r.counts["b_positions"]));
    }
    Ok(lines.join("; "))
}

fn random_steps(rng: &mut StdRng) -> Vec<StepFunction> {
    let len = rng.gen_range(0..40);
    (0..len).map(|_| StepFunction::ALL[rng.gen_range(0..3)]).collect()
}

fn scan_type(k: i64, terms: &[i64]) -> Option<SeqType> {
    let t = terms.iter().take_while(|&&b| (0..k).contains(&b)).count();
    if t == terms.len() {
        Some(SeqType::Type1)
    } else if t > 0 && terms[t..].iter().all(|&b| b >= k) {
        Some(SeqType::Type2)
    } else if t > 0 && terms[t..].iter().all(|&b| b < 0) {
        Some(SeqType::Type3)
    } else {
        None
    }
}

fn sequence_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);

    // Trichotomy and absorption on random step sequences.
    for i in 0..10_000 {
        let k = [3u64, 7, 11][i % 3];
        let steps = random_steps(&mut rng);
        let s = StepSequence::from_steps(k, &steps).map_err(|e| e.to_string())?;
        let ty = s.classify().map_err(|e| e.to_string())?;
        ensure(scan_type(k as i64, s.terms()) == Some(ty), || format!("trichotomy k={k} {:?}", s.terms()))?;
        let ki = k as i64;
        for w in s.terms().windows(2) {
            ensure(!(w[0] >= ki && w[1] < ki), || format!("escape from >= k: {:?}", s.terms()))?;
            ensure(!(w[0] < 0 && w[1] >= 0), || format!("escape from < 0: {:?}", s.terms()))?;
        }
    }

    // Window facts, exhaustive over even h < k.
    for k in [3i64, 7, 11, 15] {
        let m = (k - 3) / 4;
        for h in (0..k).step_by(2) {
            let [p1, p2, p3] = StepFunction::ALL.map(|f| sequence::apply_step(k as u64, f, h).unwrap());
            let ok =
                if h <= 2 * m { 0 <= p2 && p2 < p1 && p1 < k && p3 < 0 } else { 0 < p3 && p3 < k && k < p2 && p2 < p1 };
            ensure(ok, || format!("window k={k} h={h}"))?;
        }
    }

    // Recurrence vs closed form on random nim-sum-zero triples in frame.
    let mut checked = 0;
    while checked < 10_000 {
        let k = [3u64, 7, 11][checked % 3];
        let bits = rng.gen_range(1..40);
        let top = 1u64 << (bits - 1);
        let x = top | rng.gen_range(0..top);
        let z = top | rng.gen_range(0..top);
        let y = x ^ z;
        let bt = BitTriple::new(x, y, z).map_err(|e| e.to_string())?;
        let s = generate_sequence(k, &bt).map_err(|e| e.to_string())?;
        let t = s.terms();
        let n = bt.n();
        let closed = |j: u32| -> i128 {
            ((n - j)..=n)
                .map(|i| {
                    let (xi, yi, zi) = bt.bits(i);
                    (xi as i128 + zi as i128 - k as i128 * yi as i128) << (i + j - n)
                })
                .sum()
        };
        for j in 0..=n {
            ensure(t[j as usize] as i128 == closed(j), || format!("closed form ({x},{y},{z}) j={j}"))?;
            if j < n {
                let (xi, yi, zi) = bt.bits(n - j - 1);
                let next = 2 * t[j as usize] + xi as i64 + zi as i64 - k as i64 * yi as i64;
                ensure(t[j as usize + 1] == next, || format!("recurrence ({x},{y},{z}) j={j}"))?;
            }
        }
        ensure(t[0] == 2 && *t.last().unwrap() as i128 == x as i128 + z as i128 - k as i128 * y as i128, || {
            format!("endpoints ({x},{y},{z})")
        })?;
        checked += 1;
    }

    // Type 1 iff y = floor((x+z)/k), all nim-sum-zero triples with x, z < 2^8 in frame.
    let mut triples = 0;
    for k in [3u64, 7] {
        for x in 1..256u64 {
            for z in 1..256u64 {
                let y = x ^ z;
                if BitTriple::new(x, y, z).is_err() {
                    continue;
                }
                triples += 1;
                let ty = classify_position(k, x, y, z).map_err(|e| e.to_string())?;
                let at_floor = inequality_class(k, x, y, z) == FloorRelation::AtFloor;
                ensure((ty == SeqType::Type1) == at_floor, || format!("k={k} ({x},{y},{z})"))?;
                ensure(at_floor == (y == (x + z) / k), || format!("floor k={k} ({x},{y},{z})"))?;
            }
        }
    }

    // Unique completion vs brute force for 1 <= x < 2^12.
    for k in [3u64, 7] {
        for x in 1..(1u64 << 12) {
            let n = 63 - x.leading_zeros();
            let brute: Vec<(u64, u64)> =
                ((1u64 << n)..(1u64 << (n + 1))).map(|z| (x ^ z, z)).filter(|&(y, z)| y == (x + z) / k).collect();
            let got = complete_yz(k, x).map_err(|e| e.to_string())?;
            ensure(brute == [got], || format!("k={k} x={x}: brute {brute:?} vs {got:?}"))?;
        }
    }

    Ok(format!("10^4 random sequences, 10^4 random triples, {triples} frame triples, 2*4095 completions"))
}

fn determinism() -> Outcome {
    let rules = RuleSet::Triangular(3);
    let b = Bounds::uniform(20);
    let export = |threads| -> Result<Vec<u8>, String> {
        let t = choco::parallel::build_table(rules, b, threads).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        write_table_csv(&t, &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    let one = export(1)?;
    let auto = export(0)?;
    ensure(one == auto, || "CSV exports differ".into())?;
    Ok(format!("{} identical bytes", one.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 k=3 characterization", k3_characterization),
        ("2 k=3 Grundy vs nim-sum counts", k3_counts),
        ("3 Grundy counterexample", grundy_counterexample),
        ("4 k=5 shifted characterization", k5_conjecture),
        ("5 k=2 P-position enumeration", k2_enumeration),
        ("6 rectangular oracle", rectangular_oracle),
        ("7 move closure k=3, k=7", move_closure),
        ("8 sequence machinery", sequence_suite),
        ("9 build determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
