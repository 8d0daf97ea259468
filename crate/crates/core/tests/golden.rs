//! Worked examples checked against hand-transcribed golden files.

use std::collections::BTreeSet;

use clcd_core::combinatorics::{
    assign_cycle_edges, hamiltonian_decomposition_with_pivot, OddGroundMatchings, Pairing,
};
use clcd_core::delivery_cl2::{build_delta_odd, build_schedule_with_sets, CrossSets};
use clcd_core::placement::build_placement_by_id;
use clcd_core::{DeliverySchedule, LibraryConfig, MulticastMessage, PlacementSpec, SubfileLabel};

fn golden(name: &str) -> Vec<String> {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{path}: {e}"))
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

/// `A26` style: file letter followed by the index digits.
fn short(l: &SubfileLabel) -> String {
    let letter = (b'A' + (l.file - 1) as u8) as char;
    let digits: String = l.index.iter().map(|u| u.to_string()).collect();
    format!("{letter}{digits}")
}

fn set(ls: &[SubfileLabel]) -> String {
    format!("{{{}}}", ls.iter().map(short).collect::<Vec<_>>().join(","))
}

fn sorted_set(ls: &[SubfileLabel]) -> String {
    let mut v = ls.to_vec();
    v.sort();
    set(&v)
}

fn msg(m: &MulticastMessage) -> String {
    m.parts.iter().map(short).collect::<Vec<_>>().join("+")
}

fn example(nh: usize, nr: usize) -> (PlacementSpec, DeliverySchedule, CrossSets) {
    let c = LibraryConfig::new(7, 7, 2, nh, nr).unwrap();
    let p = build_placement_by_id(&c).unwrap();
    let d = p.classify(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
    let (s, sets) = build_schedule_with_sets(&p, &d).unwrap();
    (p, s, sets.unwrap())
}

fn step_lines(s: &DeliverySchedule, steps: &[u8]) -> Vec<String> {
    s.messages.iter().filter(|m| steps.contains(&m.step)).map(msg).collect()
}

#[test]
fn placement_table() {
    let c = LibraryConfig::new(7, 7, 2, 5, 0).unwrap();
    let p = build_placement_by_id(&c).unwrap();
    let idx = |ls: Vec<SubfileLabel>, f: u32| {
        ls.iter().filter(|l| l.file == f).map(|l| l.index.to_string()).collect::<Vec<_>>().join(" ")
    };
    let got: Vec<String> = (1..=7)
        .map(|u| format!("{u} | {} | {}", idx(p.cache_of(u), 1), idx(p.cache_of(u), 7)))
        .collect();
    assert_eq!(got, golden("placement_seven_users.txt"));
}

#[test]
fn five_high_cross_sets() {
    let (_, s, sets) = example(5, 0);
    let got: Vec<String> = sets
        .cells
        .iter()
        .map(|(&(i, j), c)| {
            let msgs: Vec<String> = s
                .messages
                .iter()
                .filter(|m| m.step == 3 && m.targets == vec![i, j])
                .map(msg)
                .collect();
            format!(
                "({i},{j}) Omega={} Lambda={} Delta={} F={} H={} msgs={}",
                set(&c.omega),
                set(&c.lambda),
                sorted_set(&c.delta),
                set(&c.f),
                sorted_set(&c.h),
                msgs.join(",")
            )
        })
        .collect();
    assert_eq!(got, golden("five_high_cross_sets.txt"));
}

#[test]
fn five_high_first_steps_and_plans() {
    let (_, s, _) = example(5, 0);
    assert_eq!(step_lines(&s, &[1, 2]), golden("five_high_steps12.txt"));
    let c = LibraryConfig::new(7, 7, 2, 5, 0).unwrap();
    let d = build_placement_by_id(&c).unwrap().classify(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
    let dc = build_delta_odd(&d, &[(6, 1), (7, 2)].into()).unwrap();
    let render = |j: u32| {
        let ps: BTreeSet<Pairing> = dc.plans[&j].pairs().iter().copied().collect();
        format!("Q{j} = {}", ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
    };
    assert_eq!(vec![render(6), render(7)], golden("five_high_pairing_plans.txt"));
}

#[test]
fn degree_four_plan_on_seven_users() {
    let gm = OddGroundMatchings::new(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
    let q = gm.q_even(4).unwrap();
    let want: Vec<String> = golden("q4_seven_users.txt")[0].split(' ').map(str::to_string).collect();
    let got: Vec<String> = q.pairs().iter().map(ToString::to_string).collect();
    assert_eq!(got.len(), want.len());
    let mut at = 0;
    for block in [3, 3, 1, 3, 3, 1] {
        let g: BTreeSet<&String> = got[at..at + block].iter().collect();
        let w: BTreeSet<&String> = want[at..at + block].iter().collect();
        assert_eq!(g, w, "block starting at {at}");
        at += block;
    }
}

#[test]
fn four_high_steps() {
    let (_, s, _) = example(4, 1);
    assert_eq!(step_lines(&s, &[1, 2]), golden("four_high_steps12.txt"));
    assert_eq!(step_lines(&s, &[4]), golden("four_high_step4.txt"));
}

#[test]
fn four_high_cross_sets() {
    let (_, s, sets) = example(4, 1);
    let got: Vec<String> = sets
        .cells
        .iter()
        .map(|(&(i, j), c)| {
            format!(
                "({i},{j}) Omega={} Pi={} Lambda={} Delta={} F={} H={}",
                set(&c.omega),
                set(&c.pi),
                set(&c.lambda),
                sorted_set(&c.delta),
                sorted_set(&c.f),
                sorted_set(&c.h)
            )
        })
        .collect();
    assert_eq!(got, golden("four_high_cross_sets.txt"));
    // each step-3 message pairs one F member with one H member of its cell
    for m in s.messages.iter().filter(|m| m.step == 3) {
        let c = sets.cell(m.targets[0], m.targets[1]).unwrap();
        assert!(m.parts.iter().any(|p| c.f.contains(p)) && m.parts.iter().any(|p| c.h.contains(p)));
    }
}

#[test]
fn lambda_cycle_assignment() {
    let g: Vec<u32> = (1..=7).collect();
    let want: BTreeSet<Pairing> = [(1, 7), (5, 7), (3, 5), (2, 3), (2, 6), (4, 6), (1, 4)]
        .iter()
        .map(|&(a, b)| Pairing::new(a, b).unwrap())
        .collect();
    let cycles = hamiltonian_decomposition_with_pivot(&g, 5).unwrap();
    assert!(cycles.iter().any(|c| c.iter().copied().collect::<BTreeSet<_>>() == want));
    // listed in the same order as the worked example
    let listed: Vec<Pairing> = [(1, 7), (5, 7), (2, 6), (2, 3), (1, 4), (4, 6), (3, 5)]
        .iter()
        .map(|&(a, b)| Pairing::new(a, b).unwrap())
        .collect();
    let a = assign_cycle_edges(&listed).unwrap();
    let walk = [(1, 7), (5, 7), (3, 5), (2, 3), (2, 6), (4, 6), (1, 4)];
    let got: Vec<String> = walk
        .iter()
        .map(|&(x, y)| {
            let e = Pairing::new(x, y).unwrap();
            format!("{e} -> {}", a[&e])
        })
        .collect();
    assert_eq!(got, golden("lambda_cycle_seven.txt"));
}
