//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails or overruns its time budget.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use pfg_core::axioms::{basis_games, run_suite, GameSampler, SuiteConfig};
use pfg_core::marginality::{
    destination_fragment, huyang_weight, marginal_contribution, mc_vector, PartyGame,
};
use pfg_core::partitions::{
    count_extensions, enumerate_embedded, enumerate_partitions, reduces_to, reduces_to_by_deletion,
    transfer,
};
use pfg_core::rational::{int, ratio};
use pfg_core::values::{basis_value, decompose, value_extended, value_full_basis};
use pfg_core::{
    parse_game, ExtendedMethod, ParseMode, Rational, SchemeKind, Target, ValueVector, WeightScheme,
};

use common::{
    all_fragments, basis_value_by_deletion, bell_triangle, count_extensions_by_deletion,
    dense_solve, THREE_AGENTS,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn vector(values: &[(i64, i64)]) -> ValueVector {
    ValueVector(values.iter().map(|&(p, q)| ratio(p, q)).collect())
}

fn three_agent_regression() -> Outcome {
    let game = parse_game(THREE_AGENTS, ParseMode::Strict).map_err(|e| e.to_string())?;
    let free = value_extended(&game, ExtendedMethod::Free);
    let mcq = value_extended(&game, ExtendedMethod::McQuillin);
    let full = value_full_basis(&game);
    let want_free = vector(&[(26, 6), (14, 6), (20, 6)]);
    let want_mcq = vector(&[(25, 6), (13, 6), (22, 6)]);
    ensure(free == want_free, || format!("free value {free}"))?;
    ensure(mcq == want_mcq, || format!("McQuillin value {mcq}"))?;
    ensure(full == want_mcq, || {
        format!("basis-constructed value {full}")
    })?;
    Ok(format!(
        "free = ({free}), McQuillin = basis-constructed = ({mcq})"
    ))
}

fn mcquillin_equivalence() -> Outcome {
    let mut basis = 0;
    for n in 2..=4 {
        for (ec, game) in basis_games(n).map_err(|e| e.to_string())? {
            let full = value_full_basis(&game);
            let mcq = value_extended(&game, ExtendedMethod::McQuillin);
            ensure(full == mcq, || format!("basis game {ec}: {full} vs {mcq}"))?;
            basis += 1;
        }
    }
    let mut random = 0;
    for n in 3..=5 {
        let mut sampler = GameSampler::new(0x5eed + n as u64);
        for trial in 0..200 {
            let game = sampler.game(n).map_err(|e| e.to_string())?;
            let full = value_full_basis(&game);
            let mcq = value_extended(&game, ExtendedMethod::McQuillin);
            ensure(full == mcq, || {
                format!("n={n} trial {trial}: {full} vs {mcq}")
            })?;
            random += 1;
        }
    }
    Ok(format!("{basis} basis games, {random} random games"))
}

fn basis_soundness() -> Outcome {
    let mut sampler = GameSampler::new(404);
    for trial in 0..100 {
        let n = 1 + trial % 4;
        let game = sampler.game(n).map_err(|e| e.to_string())?;
        let back = decompose(&game).reconstruct();
        ensure(back == game, || {
            format!("round trip differs at n={n}, trial {trial}")
        })?;
    }

    let ecs = enumerate_embedded(3).map_err(|e| e.to_string())?;
    let matrix: Vec<Vec<Rational>> = ecs
        .iter()
        .map(|at| ecs.iter().map(|b| basis_value_by_deletion(b, at)).collect())
        .collect();
    for trial in 0..20 {
        let game = sampler.game(3).map_err(|e| e.to_string())?;
        let rhs = ecs.iter().map(|ec| game.get(ec)).collect();
        let oracle = dense_solve(matrix.clone(), rhs);
        let coeffs = decompose(&game);
        for (ec, alpha) in ecs.iter().zip(&oracle) {
            ensure(&coeffs.get(ec) == alpha, || {
                format!("trial {trial} at {ec}: {} vs dense {alpha}", coeffs.get(ec))
            })?;
        }
    }
    Ok("100 round trips, 20 dense solves".into())
}

fn null_player_structure() -> Outcome {
    let steady = WeightScheme::steady();
    let mut checked = 0;
    for n in 1..=4 {
        let ecs = enumerate_embedded(n).map_err(|e| e.to_string())?;
        for (basis, game) in basis_games(n).map_err(|e| e.to_string())? {
            let factor = int(basis.partition().size() as i64 - 1);
            for i in (0..n).filter(|&i| !basis.subject().contains(i)) {
                let mc = mc_vector(&game, i, &steady).map_err(|e| e.to_string())?;
                ensure(mc.is_zero(), || {
                    format!("agent {} not null in e^({basis})", i + 1)
                })?;

                for at in ecs.iter().filter(|at| at.subject().contains(i)) {
                    let x = basis_value(&basis, at);
                    if !x.is_positive() {
                        continue;
                    }
                    let p = at.partition();
                    // steady targets: the other blocks, or the split at the grand coalition
                    let targets: Vec<Target> = if p.is_grand() {
                        vec![Target::Alone]
                    } else {
                        p.blocks()
                            .iter()
                            .filter(|&&b| b != at.subject())
                            .map(|&b| Target::Existing(b))
                            .collect()
                    };
                    let mut hits = Vec::new();
                    for t in targets {
                        let moved = transfer(p, at.subject(), t, i).map_err(|e| e.to_string())?;
                        let y = game
                            .value(at.subject().without(i), &moved)
                            .map_err(|e| e.to_string())?;
                        if !y.is_zero() {
                            hits.push(y);
                        }
                    }
                    ensure(hits.len() == 1, || {
                        format!(
                            "e^({basis}) at {at}, agent {}: {} targets",
                            i + 1,
                            hits.len()
                        )
                    })?;
                    ensure(hits[0] == &factor * &x, || {
                        format!(
                            "e^({basis}) at {at}: destination {} vs {}",
                            hits[0],
                            &factor * &x
                        )
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} positive entries with a unique target"))
}

fn party_games() -> Outcome {
    let mut lines = Vec::new();
    for m in 2..=5i64 {
        for base in [
            vec![int(0); m as usize],
            (1..=m).map(|k| ratio(k, 2)).collect(),
        ] {
            let party = PartyGame::new(&vec![1; m as usize], &base).map_err(|e| e.to_string())?;
            let i = party.independent;
            let n = party.game.n();
            let expected = [
                (SchemeKind::Steady, int(m)),
                (SchemeKind::Free, int(m - 1)),
                (SchemeKind::Bolger, int(m) - ratio(1, m)),
            ];
            for j in 0..m as usize {
                let at = party.joined(j);
                let mc = |kind| {
                    let scheme = WeightScheme::named(kind)
                        .map_err(|e| e.to_string())?
                        .with_normalization(true);
                    marginal_contribution(&party.game, i, at.subject(), at.partition(), &scheme)
                        .map_err(|e| e.to_string())
                };
                for (kind, want) in &expected {
                    let got = mc(*kind)?;
                    ensure(&got == want, || {
                        format!("m={m}, party {j}: {kind} {got} vs {want}")
                    })?;
                }
                let bolger = mc(SchemeKind::Bolger)?;
                let huyang = mc(SchemeKind::HuYang)?;
                let r = huyang_weight(i, at.subject(), at.partition(), Target::Alone, n)
                    .map_err(|e| e.to_string())?
                    - int(1);
                if r.is_positive() {
                    ensure(huyang < bolger, || {
                        format!("m={m}: Hu-Yang {huyang} not below Bolger {bolger} with r={r}")
                    })?;
                }
                if j == 0 && base[0].is_zero() {
                    lines.push(format!("m={m} r={r} huyang={huyang}"));
                }
            }
        }
    }
    Ok(lines.join(", "))
}

fn extension_counts() -> Outcome {
    let mut fragments = 0;
    for n in 1..=5 {
        let mut by_shape: HashMap<(usize, usize), u64> = HashMap::new();
        for p in enumerate_partitions(n).map_err(|e| e.to_string())? {
            for &s in p.blocks() {
                for i in s.agents() {
                    let mut joined_counts = Vec::new();
                    for t in p.targets(s) {
                        let f = destination_fragment(&p, s, t, i).map_err(|e| e.to_string())?;
                        let count = count_extensions(&f, n).map_err(|e| e.to_string())?;
                        let oracle = count_extensions_by_deletion(&f, n);
                        ensure(count == oracle, || {
                            format!("{f}: {count} vs oracle {oracle}")
                        })?;
                        let key = (f.block_count(), f.covered().len());
                        let prev = *by_shape.entry(key).or_insert(count);
                        ensure(prev == count, || {
                            format!("n={n} shape {key:?}: {prev} vs {count}")
                        })?;
                        if let Target::Existing(_) = t {
                            joined_counts.push(count);
                        }
                        fragments += 1;
                    }
                    ensure(joined_counts.windows(2).all(|w| w[0] == w[1]), || {
                        format!("joined counts differ for agent {} in {s} of {p}", i + 1)
                    })?;
                    if !p.is_grand() {
                        let r = huyang_weight(i, s, &p, Target::Alone, n)
                            .map_err(|e| e.to_string())?
                            - int(1);
                        ensure(!r.is_negative(), || format!("r={r} for {s} in {p}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{fragments} destination fragments"))
}

fn axiom_suite() -> Outcome {
    let config = SuiteConfig {
        sizes: vec![1, 2, 3, 4],
        trials: 100,
        seed: 0,
        ..SuiteConfig::default()
    };
    let reports = run_suite(&config).map_err(|e| e.to_string())?;
    if let Some(bad) = reports.iter().find(|r| !r.passed()) {
        return Err(bad.to_string());
    }
    Ok(format!("{} checks passed", reports.len()))
}

fn combinatorics() -> Outcome {
    let bell = bell_triangle(8);
    for (n, &b) in bell.iter().enumerate().skip(1) {
        let count = enumerate_partitions(n).map_err(|e| e.to_string())?.len() as u64;
        ensure(count == b, || format!("n={n}: {count} partitions vs B={b}"))?;
    }
    let mut pairs = 0;
    for n in 1..=4 {
        let fragments = all_fragments(n);
        for r1 in &fragments {
            for r2 in &fragments {
                let fast = reduces_to(r1, r2);
                let slow = reduces_to_by_deletion(r1, r2);
                ensure(fast == slow, || format!("{r1} vs {r2}: {fast} / {slow}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "B(1..=8) = {:?}, {pairs} fragment pairs",
        &bell[1..]
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: 1,
        name: "three-agent regression",
        budget: Some(Duration::from_secs(1)),
        run: three_agent_regression,
    },
    Criterion {
        id: 2,
        name: "McQuillin equivalence",
        budget: Some(Duration::from_secs(60)),
        run: mcquillin_equivalence,
    },
    Criterion {
        id: 3,
        name: "basis soundness",
        budget: None,
        run: basis_soundness,
    },
    Criterion {
        id: 4,
        name: "null-player structure",
        budget: Some(Duration::from_secs(30)),
        run: null_player_structure,
    },
    Criterion {
        id: 5,
        name: "party-game marginality",
        budget: None,
        run: party_games,
    },
    Criterion {
        id: 6,
        name: "extension counts and r >= 0",
        budget: None,
        run: extension_counts,
    },
    Criterion {
        id: 7,
        name: "axiom suite",
        budget: None,
        run: axiom_suite,
    },
    Criterion {
        id: 8,
        name: "combinatorics oracle",
        budget: None,
        run: combinatorics,
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, budget {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!(
                "criterion {} {}: PASS [{elapsed:.2?}] {detail}",
                c.id, c.name
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {} {}: FAIL [{elapsed:.2?}] {why}", c.id, c.name);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        CRITERIA.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
