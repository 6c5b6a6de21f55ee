//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{load, q, two_point_oracle};
use rand::Rng as _;
use udvalue::axioms::{self, Axiom, Status};
use udvalue::experiments::{self, OnUnsupported, Reference};
use udvalue::games::random_game_with;
use udvalue::rng;
use udvalue::setsys::{enumerate_systems, sample_system_with, SamplingMode};
use udvalue::values::{self, UdSystem};
use udvalue::{Coalition, ExactIncomplete, IncompleteGame, SetSystem, ValueKind};

fn verdict(criterion: u32, pass: bool, detail: String) {
    println!("criterion {criterion}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

#[test]
fn criterion_01_census_three_players() {
    let start = Instant::now();
    let census = experiments::census_exhaustive(3).unwrap();
    let took = start.elapsed();
    let row = &census.row;
    let pass = row.total == 64
        && row.ic_count == 45
        && row.unique_nonic_count == 0
        && row.ic_prop() == 0.703125
        && took < Duration::from_secs(1);
    verdict(
        1,
        pass,
        format!(
            "total={} ic={} unique_nonic={} in {}",
            row.total,
            row.ic_count,
            row.unique_nonic_count,
            secs(took)
        ),
    );
}

fn witness_family(n: usize, nonempty: bool) -> BTreeSet<u128> {
    let base = SetSystem::from_coalitions(
        n,
        udvalue::setsys::all_coalitions(n).filter(|c| c.len() == 2 || c.is_empty() || c.len() == n),
    )
    .unwrap();
    let singles = 1u32 << n;
    (0..singles)
        .filter(|&sigma| sigma != 0 || !nonempty)
        .map(|sigma| {
            (0..n)
                .filter(|i| sigma >> i & 1 == 1)
                .fold(base, |k, i| k.with(Coalition::singleton(i)))
                .mask()
        })
        .collect()
}

#[test]
fn criterion_02_census_four_players() {
    let start = Instant::now();
    let census = experiments::census_exhaustive(4).unwrap();
    let took = start.elapsed();
    let row = &census.row;
    let found: BTreeSet<u128> = census.unique_nonic.iter().map(SetSystem::mask).collect();
    let literal = witness_family(4, true);
    let non_closed: BTreeSet<u128> = witness_family(4, false)
        .into_iter()
        .filter(|&m| !SetSystem::from_mask(4, m).unwrap().is_intersection_closed())
        .collect();
    println!(
        "criterion 2 (info): witnesses equal the non-closed members of the family with any singleton subset: {}",
        found == non_closed
    );
    let counts = row.total == 16_384 && row.ic_count == 2_271 && row.unique_nonic_count == 15;
    let pass = counts && found == literal && took < Duration::from_secs(300);
    verdict(
        2,
        pass,
        format!(
            "total={} ic={} unique_nonic={} family_match={} (family size {}, shared {}) in {}",
            row.total,
            row.ic_count,
            row.unique_nonic_count,
            found == literal,
            literal.len(),
            found.intersection(&literal).count(),
            secs(took)
        ),
    );
}

#[test]
fn criterion_03_census_five_players_sampled() {
    let start = Instant::now();
    let census = experiments::census_sampled(5, 20_000, 2024).unwrap();
    let took = start.elapsed();
    let prop = census.row.unique_nonic_prop();
    let pass = (prop - 0.229).abs() <= 0.015 && took < Duration::from_secs(600);
    verdict(
        3,
        pass,
        format!(
            "unique_nonic_prop={prop:.5} (count {}, ic {}) target 0.229±0.015 in {}",
            census.row.unique_nonic_count,
            census.row.ic_count,
            secs(took)
        ),
    );
}

#[test]
fn criterion_04_example_exactness() {
    let ex3 = load("example3.game");
    let ex2 = load("example2.game");
    let ud3 = values::value(&ex3, ValueKind::Ud).unwrap();
    let ud2 = values::value(&ex2, ValueKind::Ud).unwrap();
    let ex3_ok = ud3.payoffs() == [q(0, 1), q(1, 4), q(3, 4)];
    let ex2_ok = ud2[0] == q(3, 2) && ud2[2] == q(3, 2);
    let p = Coalition::from_mask(0b011);
    let partners = axioms::find_partner_coalitions(&ex3);
    let report = axioms::check_symmetric_partnership(ValueKind::Ud, &ex3, p).unwrap();
    let pass = ex3_ok && ex2_ok && partners.contains(&p) && report.status == Status::Violated;
    verdict(
        4,
        pass,
        format!(
            "example3 UD=({}) example2 UD=({}) partners={partners:?} partnership={}",
            ud3, ud2, report.status
        ),
    );
}

#[test]
fn criterion_05_expected_shapley_of_extensions() {
    let start = Instant::now();
    let systems = experiments::sample_ic_systems(4, 20, 55).unwrap();
    let mut worst: f64 = 0.0;
    for (k, system) in systems.iter().enumerate() {
        let mut r = rng::derived(5, &[k as u64]);
        let game: IncompleteGame<f64> = values::random_p_extendable_game(system, &mut r);
        assert!(values::is_p_extendable(&game).unwrap());
        let ud = values::value(&game, ValueKind::Ud).unwrap();
        let mc = values::expected_shapley_mc(&game, 200_000, 1000 + k as u64).unwrap();
        worst = worst.max(mc.max_abs_diff(&ud));
    }
    let took = start.elapsed();
    let pass = worst <= 0.02 && took < Duration::from_secs(300);
    verdict(5, pass, format!("max |MC - UD| = {worst:.5} over 20 games in {}", secs(took)));
}

#[test]
fn criterion_06_special_game_properties() {
    let systems = experiments::intersection_closed_systems(3).unwrap();
    let mut cases = 0;
    let mut failures = 0;
    for (k, system) in systems.iter().enumerate() {
        let mut r = rng::derived(6, &[k as u64]);
        for _ in 0..100 {
            let game: ExactIncomplete = values::random_p_extendable_game(system, &mut r);
            let rg = values::special_game(&game, ValueKind::R).unwrap().classify();
            let ud = values::special_game(&game, ValueKind::Ud).unwrap().classify();
            let ic = values::special_game(&game, ValueKind::Ic).unwrap().classify();
            cases += 1;
            if !(rg.positive && ud.positive && ic.monotone) {
                failures += 1;
            }
        }
    }
    verdict(6, failures == 0 && cases == 4500, format!("{failures} failures in {cases} exact cases"));
}

#[test]
fn criterion_07_pairwise_ordering() {
    let start = Instant::now();
    let systems = experiments::intersection_closed_systems(3).unwrap();
    let report = experiments::difference_experiment(&systems, 100, 7, Reference::Pairwise, OnUnsupported::Fail).unwrap();
    let ranks = experiments::rank_frequency(&report).unwrap();
    let smallest = ranks.count("R_UD", 0);
    let took = start.elapsed();
    let pass = smallest * 5 >= systems.len() * 4 && took < Duration::from_secs(120);
    verdict(
        7,
        pass,
        format!("R_UD smallest in {smallest}/{} systems in {}", systems.len(), secs(took)),
    );
}

#[test]
fn criterion_08_equal_division_ordering() {
    let systems = experiments::intersection_closed_systems(3).unwrap();
    let report =
        experiments::difference_experiment(&systems, 100, 8, Reference::EqualDivision, OnUnsupported::Fail).unwrap();
    let ranks = experiments::rank_frequency(&report).unwrap();
    let ic_closest = ranks.count("IC_ED", 0);
    let ud_furthest = ranks.count("UD_ED", 2);
    let m = systems.len();
    let pass = 2 * ic_closest > m && 2 * ud_furthest > m;
    verdict(
        8,
        pass,
        format!("IC closest to ED in {ic_closest}/{m}, UD furthest in {ud_furthest}/{m}"),
    );
}

/// Random integer worths keep exact arithmetic cheap.
fn integer_game(system: &SetSystem, r: &mut rng::Rng) -> ExactIncomplete {
    IncompleteGame::from_fn(*system, |c| {
        if c.is_empty() {
            q(0, 1)
        } else {
            q(r.random_range(0..=9), 1)
        }
    })
}

/// Counts UD balanced-contribution violations over seeded games.
fn search_balanced_contributions(systems: &[SetSystem], games: usize, seed: u64) -> (usize, usize, Option<ExactIncomplete>) {
    let mut applicable = 0;
    let mut violations = 0;
    let mut first = None;
    for (k, system) in systems.iter().enumerate() {
        let mut r = rng::derived(seed, &[k as u64]);
        let n = system.players();
        for _ in 0..games {
            let game = integer_game(system, &mut r);
            for i in 0..n {
                for j in i + 1..n {
                    let report = axioms::check_balanced_contributions(ValueKind::Ud, &game, i, j).unwrap();
                    match report.status {
                        Status::Inapplicable => {}
                        Status::Satisfied => applicable += 1,
                        Status::Violated => {
                            applicable += 1;
                            violations += 1;
                            first.get_or_insert_with(|| game.clone());
                        }
                    }
                }
            }
        }
    }
    (applicable, violations, first)
}

#[test]
fn criterion_09_axiom_suite() {
    let mut sweeps = 0;
    let mut sweep_violations = Vec::new();
    let mut tally = |axiom: Axiom, report: axioms::AxiomReport| {
        if report.status == Status::Inapplicable {
            return;
        }
        sweeps += 1;
        if report.witness.as_ref().is_some_and(|w| w.gap > 1e-9) {
            sweep_violations.push(format!("{axiom}: {:?}", report.witness));
        }
    };
    for n in 2..=4usize {
        let systems = if n <= 3 {
            experiments::intersection_closed_systems(n).unwrap()
        } else {
            experiments::sample_ic_systems(n, 200, 90).unwrap()
        };
        for (k, system) in systems.iter().enumerate() {
            let mut r = rng::derived(9, &[n as u64, k as u64]);
            for _ in 0..5 {
                let g: IncompleteGame<f64> = random_game_with(system, &mut r, 0.0, 1.0).unwrap();
                let h: IncompleteGame<f64> = random_game_with(system, &mut r, 0.0, 1.0).unwrap();
                let kind = ValueKind::Ud;
                tally(Axiom::Efficiency, axioms::check_basic(kind, Axiom::Efficiency, &g, None).unwrap());
                tally(Axiom::Additivity, axioms::check_basic(kind, Axiom::Additivity, &g, Some(&h)).unwrap());
                tally(Axiom::Equality, axioms::check_basic(kind, Axiom::Equality, &g, Some(&g.clone())).unwrap());
            }
        }
        let power = SetSystem::power_set(n).unwrap();
        let mut r = rng::derived(9, &[n as u64, 999]);
        for _ in 0..50 {
            let g: IncompleteGame<f64> = random_game_with(&power, &mut r, 0.0, 1.0).unwrap();
            tally(
                Axiom::PhiConsistency,
                axioms::check_basic(ValueKind::Ud, Axiom::PhiConsistency, &g, None).unwrap(),
            );
        }
    }

    let fairness = axioms::check_fairness(ValueKind::Ud, &load("example1.game"), Coalition::from_mask(0b011)).unwrap();
    let partnership =
        axioms::check_symmetric_partnership(ValueKind::Ud, &load("example3.game"), Coalition::from_mask(0b011)).unwrap();
    let example2 = axioms::check_balanced_contributions(ValueKind::Ud, &load("example2.game"), 0, 2).unwrap();
    println!("criterion 9 (info): example2.game balanced contributions for players 1 and 3: {}", example2.status);

    let ic3 = experiments::intersection_closed_systems(3).unwrap();
    let ic4 = experiments::sample_ic_systems(4, 100, 94).unwrap();
    let (app3, viol3, w3) = search_balanced_contributions(&ic3, 200, 93);
    let (app4, viol4, w4) = search_balanced_contributions(&ic4, 20, 94);
    let bc_witness = w3.or(w4);

    let pass = sweep_violations.is_empty()
        && sweeps > 0
        && fairness.is_violated()
        && partnership.is_violated()
        && bc_witness.is_some();
    verdict(
        9,
        pass,
        format!(
            "sweeps={sweeps} violations={} fairness(ex1)={} partnership(ex3)={} balanced_contributions witness={} ({} violations in {} applicable checks)",
            sweep_violations.len(),
            fairness.status,
            partnership.status,
            bc_witness.is_some(),
            viol3 + viol4,
            app3 + app4
        ),
    );
}

#[test]
fn criterion_10_oracle_equivalences() {
    let mut compared = 0;
    let mut mismatches = 0;
    for n in 1..=4usize {
        for (k, system) in enumerate_systems(n, true).unwrap().filter(SetSystem::is_intersection_closed).enumerate() {
            let mut r = rng::derived(10, &[n as u64, k as u64]);
            let game = integer_game(&system, &mut r);
            let direct = values::ud_dividends(&game).unwrap();
            let ud = UdSystem::build(&system);
            let solution = ud.solve(&game);
            let general = ud.broadcast(&solution.particular);
            compared += 1;
            if direct != general || !solution.nullspace.is_empty() {
                mismatches += 1;
            }
        }
    }

    let mut disagreements = Vec::new();
    let mut unique_nonic = 0;
    for k in 0..10_000u64 {
        let mut r = rng::derived(1010, &[k]);
        let n = r.random_range(2..=5usize);
        let system = sample_system_with(n, SamplingMode::Uniform, &mut r).unwrap();
        let oracle = two_point_oracle(&system, &mut r);
        let unique = values::is_ud_unique(&system);
        if unique && !system.is_intersection_closed() {
            unique_nonic += 1;
        }
        if unique != oracle.images_equal || unique == oracle.basis_witness {
            disagreements.push(system);
        }
    }
    let pass = mismatches == 0 && disagreements.is_empty();
    verdict(
        10,
        pass,
        format!(
            "ud_dividends vs affine solve: {mismatches} mismatches over {compared} IC systems; uniqueness oracle: {} disagreements over 10000 systems ({unique_nonic} unique non-IC)",
            disagreements.len()
        ),
    );
}
