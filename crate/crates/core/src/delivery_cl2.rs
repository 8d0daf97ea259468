//! Constructive CL(2,1) / CL(2,1,0) delivery.
//!
//! Steps, in emission order:
//! 1. level-2 multicasts over 3-sets of high- and zero-level users,
//! 2. pairwise messages between low-level users,
//! 3. cross-level messages, each serving one high- and one low-level user,
//! 4. the remaining high-level pair messages (the set `B`),
//! 5. unicasts.

use std::collections::BTreeMap;

use num_rational::Rational64;

use crate::combinatorics::{build_q_even_ground, partition_lambda, OddGroundMatchings, Pairing, PairingPlan};
use crate::error::{Error, Result};
use crate::placement::{DemandClassification, PlacementSpec};
use crate::schedule::{DeliverySchedule, MulticastMessage};
use crate::sets::{binomial, k_subsets, SubfileLabel, UserId, UserSet};

/// Sets attached to one (high user `i`, low user `j`) pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossCell {
    /// Subfiles of `d_j` owned by `i`.
    pub h: Vec<SubfileLabel>,
    /// Subfiles of `d_i` whose index contains `j`.
    pub l: Vec<SubfileLabel>,
    /// Members of `l` whose index also contains another high-level user.
    pub omega: Vec<SubfileLabel>,
    /// Members of `l` whose index contains a zero-level user.
    pub z: Vec<SubfileLabel>,
    /// Members of `l` indexed by two low-level users assigned to `j`.
    pub lambda: Vec<SubfileLabel>,
    /// Members of `z` delivered by cross-level messages.
    pub pi: Vec<SubfileLabel>,
    /// Members of `omega` left to the high-level pair messages.
    pub delta: Vec<SubfileLabel>,
    /// `pi`, then `lambda`, then `omega \ delta`; matched in order with
    /// the sorted `h`.
    pub f: Vec<SubfileLabel>,
    pub sigma: usize,
    pub n: usize,
}

/// Cross-level bookkeeping for one demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossSets {
    pub high: Vec<UserId>,
    pub low: Vec<UserId>,
    pub zero: Vec<UserId>,
    /// Keyed by `(i, j)`.
    pub cells: BTreeMap<(UserId, UserId), CrossCell>,
    /// Low-user pairs assigned to each low user by the `Λ` partition.
    pub lambda_parts: BTreeMap<UserId, Vec<Pairing>>,
}

impl CrossSets {
    pub fn cell(&self, i: UserId, j: UserId) -> Option<&CrossCell> {
        self.cells.get(&(i, j))
    }

    /// `n_j`; identical for every high user.
    pub fn n_of(&self, j: UserId) -> usize {
        self.high.first().and_then(|&i| self.cells.get(&(i, j))).map_or(0, |c| c.n)
    }
}

fn check_level_two(placement: &PlacementSpec, class: &DemandClassification) -> Result<()> {
    let cfg = placement.config();
    if cfg.level() != 2 {
        return Err(Error::InvalidArgument(format!(
            "constructive delivery needs t = 2, placement has t = {}",
            cfg.level()
        )));
    }
    if class.users() != cfg.users() {
        return Err(Error::InvalidArgument("demand does not match placement".into()));
    }
    Ok(())
}

/// Build `H, L, Ω, Z, Λ, σ, n` for every (high, low) pair. `Δ`, `Π` and `F`
/// are filled in by [`build_schedule`].
pub fn derive_cross_sets(placement: &PlacementSpec, class: &DemandClassification) -> Result<CrossSets> {
    check_level_two(placement, class)?;
    if class.high.len() < 2 {
        return Err(Error::FallbackRequired);
    }
    let users = placement.config().users();
    let half = (users - 1) / 2;
    let own = placement.ownership();
    let high: UserSet = class.high.iter().copied().collect();
    let zero: UserSet = class.zero.iter().copied().collect();

    let low_pairs: Vec<Pairing> = class
        .low
        .iter()
        .enumerate()
        .flat_map(|(a, &x)| class.low[a + 1..].iter().map(move |&y| Pairing::new(x, y).expect("distinct")))
        .collect();
    let lambda_parts = partition_lambda(&low_pairs, &class.low)?;

    let mut cells = BTreeMap::new();
    for &i in &class.high {
        let fi = class.file_of(i);
        for &j in &class.low {
            let fj = class.file_of(j);
            let mut c = CrossCell {
                h: own.owned_by(i).iter().map(|&x| SubfileLabel::new(fj, x)).collect(),
                ..CrossCell::default()
            };
            for x in 1..=users as UserId {
                if x == i || x == j {
                    continue;
                }
                let label = SubfileLabel::new(fi, UserSet::of(&[j, x]));
                c.l.push(label);
                if high.contains(x) {
                    c.omega.push(label);
                } else if zero.contains(x) {
                    c.z.push(label);
                }
            }
            c.lambda = lambda_parts[&j]
                .iter()
                .map(|p| SubfileLabel::new(fi, UserSet::of(&[p.a(), p.b()])))
                .collect();
            c.l.sort();
            c.lambda.sort();
            let (hs, ls, zs) = (c.h.len(), c.lambda.len(), c.z.len());
            c.sigma = (ls + zs).saturating_sub(hs);
            let short = hs.saturating_sub(ls + zs);
            c.n = c.omega.len().checked_sub(short).ok_or_else(|| {
                Error::Construction(format!("cross-level sets infeasible for ({i},{j})"))
            })?;
            debug_assert_eq!(hs, half);
            cells.insert((i, j), c);
        }
    }
    Ok(CrossSets {
        high: class.high.clone(),
        low: class.low.clone(),
        zero: class.zero.clone(),
        cells,
        lambda_parts,
    })
}

/// `Δ` sets and the step-4 messages.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaConstruction {
    pub delta: BTreeMap<(UserId, UserId), Vec<SubfileLabel>>,
    pub messages: Vec<MulticastMessage>,
    /// The pairing plan used for each low user.
    pub plans: BTreeMap<UserId, PairingPlan>,
}

impl DeltaConstruction {
    fn add_plan(&mut self, class: &DemandClassification, j: UserId, plan: PairingPlan) {
        for p in plan.pairs() {
            let (i, k) = (p.a(), p.b());
            let wi = SubfileLabel::new(class.file_of(i), UserSet::of(&[k, j]));
            let wk = SubfileLabel::new(class.file_of(k), UserSet::of(&[i, j]));
            self.delta.entry((i, j)).or_default().push(wi);
            self.delta.entry((k, j)).or_default().push(wk);
            self.messages.push(MulticastMessage::new(4, vec![wi, wk], vec![i, k]));
        }
        self.plans.insert(j, plan);
    }
}

/// Even number of high-level users: low user `j` uses the first `n_j`
/// perfect matchings of the high-level users.
pub fn build_delta_even(
    class: &DemandClassification,
    n: &BTreeMap<UserId, usize>,
) -> Result<DeltaConstruction> {
    if class.high.len() % 2 == 1 || class.high.len() < 2 {
        return Err(Error::OddGround(class.high.len()));
    }
    let mut out = DeltaConstruction::default();
    for &j in &class.low {
        let nj = n.get(&j).copied().unwrap_or(0);
        let plan = build_q_even_ground(&class.high, nj)?;
        out.add_plan(class, j, plan);
    }
    Ok(out)
}

/// Odd number of high-level users. Low users with even `n_j` use the
/// degree-`n_j` plan built from near-perfect matchings. Low users with odd
/// `n_j` use the degree-`(n_j - 1)` plan plus one near-perfect matching
/// that leaves a single high-level user one subfile short; these short
/// subfiles are paired across consecutive odd-`n` low users, and a lone
/// leftover is unicast.
pub fn build_delta_odd(
    class: &DemandClassification,
    n: &BTreeMap<UserId, usize>,
) -> Result<DeltaConstruction> {
    if class.high.len().is_multiple_of(2) || class.high.len() < 3 {
        return Err(Error::EvenGround(class.high.len()));
    }
    let gm = OddGroundMatchings::new(&class.high)?;
    let mut out = DeltaConstruction::default();
    let nj = |j: &UserId| n.get(j).copied().unwrap_or(0);
    let odd_users: Vec<UserId> = class.low.iter().copied().filter(|j| nj(j) % 2 == 1).collect();
    let mut odd_values: Vec<usize> = odd_users.iter().map(nj).collect();
    odd_values.dedup();
    if odd_values.len() > 1 {
        return Err(Error::Construction(format!("several odd n values {odd_values:?}")));
    }
    for &j in &class.low {
        if nj(&j) % 2 == 0 {
            out.add_plan(class, j, gm.q_even(nj(&j))?);
        }
    }
    if let Some(&n_odd) = odd_values.first() {
        let base = gm.q_even(n_odd - 1)?;
        let pos = n_odd.div_ceil(2);
        let pivot = *gm
            .pivot_pairs()
            .get(pos - 1)
            .ok_or_else(|| Error::Construction(format!("n = {n_odd} too large")))?;
        let (i, k) = (pivot.a(), pivot.b());
        let mut pending: Option<(UserId, SubfileLabel)> = None;
        let mut extras = Vec::new();
        for (ind, &j) in odd_users.iter().enumerate() {
            let mut plan = base.clone();
            // 0-based ind: even positions leave i short, odd positions k
            let (short, other) = if ind % 2 == 0 { (i, k) } else { (k, i) };
            plan.extend(gm.omitting(short).pairs.iter().copied());
            out.add_plan(class, j, plan);
            let extra = SubfileLabel::new(class.file_of(short), UserSet::of(&[other, j]));
            out.delta.entry((short, j)).or_default().push(extra);
            match pending.take() {
                None => pending = Some((short, extra)),
                Some((prev_user, prev)) => extras.push(MulticastMessage::new(4, vec![prev, extra], vec![prev_user, short])),
            }
        }
        out.messages.extend(extras);
        if let Some((u, last)) = pending {
            out.messages.push(MulticastMessage::new(4, vec![last], vec![u]));
        }
    }
    Ok(out)
}

/// Full delivery schedule for a level-2 placement.
pub fn build_schedule(placement: &PlacementSpec, class: &DemandClassification) -> Result<DeliverySchedule> {
    Ok(build_schedule_with_sets(placement, class)?.0)
}

/// Schedule plus the cross-level sets (absent for the fallback).
pub fn build_schedule_with_sets(
    placement: &PlacementSpec,
    class: &DemandClassification,
) -> Result<(DeliverySchedule, Option<CrossSets>)> {
    check_level_two(placement, class)?;
    if class.high.len() < 2 {
        return Ok((fallback_schedule(placement, class), None));
    }
    let users = placement.config().users();
    let own = placement.ownership();
    let mut sets = derive_cross_sets(placement, class)?;
    let mut sched = DeliverySchedule::new(users, 2);

    // step 1
    let high: UserSet = class.high.iter().copied().collect();
    let mut hz: Vec<UserId> = class.high.iter().chain(&class.zero).copied().collect();
    hz.sort_unstable();
    for s in k_subsets(&hz, 3) {
        let hs = s.intersection(high);
        if hs.is_empty() {
            continue;
        }
        let parts = hs.iter().map(|i| SubfileLabel::new(class.file_of(i), s.without(i))).collect();
        sched.messages.push(MulticastMessage::new(1, parts, hs.to_vec()));
    }

    // step 2
    sched.messages.extend(low_pair_messages(placement, class, &class.low, 2));

    // step 4 construction decides Δ before step 3 can be emitted
    let n: BTreeMap<UserId, usize> = class.low.iter().map(|&j| (j, sets.n_of(j))).collect();
    let delta = if class.low.is_empty() {
        DeltaConstruction::default()
    } else if class.high.len().is_multiple_of(2) {
        build_delta_even(class, &n)?
    } else {
        build_delta_odd(class, &n)?
    };

    // step 3
    let mut leftovers = Vec::new();
    for (&(i, j), cell) in sets.cells.iter_mut() {
        cell.delta = delta.delta.get(&(i, j)).cloned().unwrap_or_default();
        cell.delta.sort();
        if cell.delta.len() != cell.n || !cell.delta.iter().all(|d| cell.omega.contains(d)) {
            return Err(Error::Construction(format!("Δ({i},{j}) has wrong size or content")));
        }
        cell.pi = cell.z[..cell.z.len() - cell.sigma].to_vec();
        leftovers.extend(cell.z[cell.z.len() - cell.sigma..].iter().map(|&l| (i, l)));
        let mut f: Vec<SubfileLabel> = cell.pi.iter().chain(&cell.lambda).copied().collect();
        f.extend(cell.omega.iter().filter(|o| !cell.delta.contains(o)));
        if f.len() != cell.h.len() {
            return Err(Error::Construction(format!(
                "|F({i},{j})| = {} but |H({i},{j})| = {}",
                f.len(),
                cell.h.len()
            )));
        }
        cell.f = f;
        let mut h = cell.h.clone();
        h.sort();
        for (&a, &b) in cell.f.iter().zip(&h) {
            sched.messages.push(MulticastMessage::new(3, vec![a, b], vec![i, j]));
        }
    }

    // step 4
    sched.messages.extend(delta.messages);

    // step 5
    for &j in &class.low {
        for &z in &class.zero {
            for &x in own.owned_by(z) {
                sched
                    .messages
                    .push(MulticastMessage::new(5, vec![SubfileLabel::new(class.file_of(j), x)], vec![j]));
            }
        }
    }
    for (i, l) in leftovers {
        sched.messages.push(MulticastMessage::new(5, vec![l], vec![i]));
    }
    for &z in &class.zero {
        sched.zero_level_unicasts.push((z, class.file_of(z)));
    }
    Ok((sched, Some(sets)))
}

/// Pairwise exchange between users of `group`: for `j < k`, the subfiles of
/// `d_j` owned by `k` are zipped with those of `d_k` owned by `j`. Targets
/// are the users that actually miss their part.
fn low_pair_messages(
    placement: &PlacementSpec,
    class: &DemandClassification,
    group: &[UserId],
    step: u8,
) -> Vec<MulticastMessage> {
    let own = placement.ownership();
    let mut out = Vec::new();
    for (a, &j) in group.iter().enumerate() {
        for &k in &group[a + 1..] {
            for (&x, &y) in own.owned_by(k).iter().zip(own.owned_by(j)) {
                let pj = SubfileLabel::new(class.file_of(j), x);
                let pk = SubfileLabel::new(class.file_of(k), y);
                let mut targets = Vec::new();
                if !placement.caches(j, pj) {
                    targets.push(j);
                }
                if !placement.caches(k, pk) {
                    targets.push(k);
                }
                out.push(MulticastMessage::new(step, vec![pj, pk], targets));
            }
        }
    }
    out
}

/// Fewer than two high-level users: every non-zero user is served as a
/// low-level user. Unicasts of subfiles the requester already caches are
/// skipped.
fn fallback_schedule(placement: &PlacementSpec, class: &DemandClassification) -> DeliverySchedule {
    let users = placement.config().users();
    let own = placement.ownership();
    let mut sched = DeliverySchedule::new(users, 2);
    sched.fallback = true;
    let mut nonzero: Vec<UserId> = class.high.iter().chain(&class.low).copied().collect();
    nonzero.sort_unstable();
    sched.messages.extend(low_pair_messages(placement, class, &nonzero, 2));
    for &j in &nonzero {
        for &z in &class.zero {
            for &x in own.owned_by(z) {
                let l = SubfileLabel::new(class.file_of(j), x);
                if !placement.caches(j, l) {
                    sched.messages.push(MulticastMessage::new(5, vec![l], vec![j]));
                }
            }
        }
    }
    for &z in &class.zero {
        sched.zero_level_unicasts.push((z, class.file_of(z)));
    }
    sched
}

/// Closed-form CL(2,1) rate for `k^h` high- and `k^l` low-level users
/// (`k^h + k^l = K`, `K` odd).
pub fn rate_formula_cl21(kh: usize, kl: usize, users: usize) -> Rational64 {
    let half = (users as i64 - 1) / 2;
    let pairs = binomial(users as u64, 2) as i64;
    if kh < 2 {
        return Rational64::from_integer(half);
    }
    let k = users as i64;
    let missing = half * (k * k - 2 * kh as i64 - kl as i64);
    let triples = binomial(kh as u64, 3) as i64;
    let rest = missing - 3 * triples;
    Rational64::new(triples + (rest + 1).div_euclid(2), pairs)
}

/// Result of [`count_messages_cl210`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cl210Count {
    pub messages: u64,
    pub rate: Rational64,
    /// Fewer than two high-level users; `messages` is then the count with
    /// every non-zero user served as low-level, which upper-bounds the
    /// schedule when zero-level users are present.
    pub fallback: bool,
}

/// Message count and rate of the CL(2,1,0) schedule as a function of
/// `k = [k^h, k^l, k^r]` (`K = k^h + k^l + k^r` odd).
pub fn count_messages_cl210(k: [usize; 3]) -> Cl210Count {
    let [kh, kl, kr] = k;
    let users = kh + kl + kr;
    let half = (users as u64 - 1) / 2;
    let pairs = binomial(users as u64, 2) as i64;
    let (kh, kl, kr) = (kh as u64, kl as u64, kr as u64);
    if kh < 2 {
        let kn = kh + kl;
        let m = half * (binomial(kn, 2) + kn * kr);
        return Cl210Count {
            messages: m,
            rate: Rational64::new(m as i64, pairs) + kr as i64,
            fallback: true,
        };
    }
    // Λ part sizes and how many low users get each
    let lambda_sizes: Vec<(u64, u64)> = if kl == 0 {
        Vec::new()
    } else if kl % 2 == 1 {
        vec![((kl - 1) / 2, kl)]
    } else {
        vec![(kl / 2 - 1, kl / 2), (kl / 2, kl / 2)]
    };
    let omega = kh - 1;
    let mut sum_n = 0;
    let mut sum_sigma = 0;
    for (lam, count) in lambda_sizes {
        let short = half.saturating_sub(lam + kr);
        sum_n += count * kh * (omega - short);
        sum_sigma += count * kh * (lam + kr).saturating_sub(half);
    }
    let m = binomial(kh + kr, 3) - binomial(kr, 3)
        + half * binomial(kl, 2)
        + half * kh * kl
        + sum_n.div_ceil(2)
        + kl * kr * half
        + sum_sigma;
    Cl210Count {
        messages: m,
        rate: Rational64::new(m as i64, pairs) + kr as i64,
        fallback: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::{build_placement_by_id, LibraryConfig};
    use std::collections::BTreeSet;

    fn lab(f: u32, a: u32, b: u32) -> SubfileLabel {
        SubfileLabel::new(f, UserSet::of(&[a, b]))
    }

    fn setup(nh: usize, nr: usize) -> (PlacementSpec, DemandClassification) {
        let c = LibraryConfig::new(7, 7, 2, nh, nr).unwrap();
        let p = build_placement_by_id(&c).unwrap();
        let d = p.classify(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
        (p, d)
    }

    #[test]
    fn five_high_sets() {
        let (p, d) = setup(5, 0);
        let (s, sets) = build_schedule_with_sets(&p, &d).unwrap();
        let sets = sets.unwrap();
        let c = sets.cell(1, 7).unwrap();
        assert_eq!(c.h, vec![lab(7, 1, 2), lab(7, 1, 3), lab(7, 1, 4)]);
        assert_eq!(c.lambda, vec![lab(1, 6, 7)]);
        assert_eq!(c.omega, vec![lab(1, 2, 7), lab(1, 3, 7), lab(1, 4, 7), lab(1, 5, 7)]);
        assert_eq!(c.delta, vec![lab(1, 2, 7), lab(1, 4, 7)]);
        assert_eq!(c.n, 2);
        assert_eq!(sets.cell(1, 6).unwrap().delta, vec![lab(1, 4, 6)]);
        assert_eq!(s.message_count(), 51);
        assert_eq!(s.rate(), Rational64::new(51, 21));
        let q6: BTreeSet<Pairing> = [Pairing::of(2, 5), Pairing::of(3, 4)].into();
        let q7: BTreeSet<Pairing> = [(1, 2), (1, 4), (2, 5), (3, 4), (3, 5)]
            .iter()
            .map(|&(a, b)| Pairing::of(a, b))
            .collect();
        let n: BTreeMap<UserId, usize> = [(6, 1), (7, 2)].into();
        let dc = build_delta_odd(&d, &n).unwrap();
        assert_eq!(dc.plans[&6].pairs().iter().copied().collect::<BTreeSet<_>>(), q6);
        assert_eq!(dc.plans[&7].pairs().iter().copied().collect::<BTreeSet<_>>(), q7);
        // 7 pair messages and one unicast
        assert_eq!(dc.messages.len(), 8);
        assert_eq!(dc.messages.last().unwrap().parts, vec![lab(1, 4, 6)]);
    }

    #[test]
    fn four_high_sets() {
        let (p, d) = setup(4, 1);
        let (s, sets) = build_schedule_with_sets(&p, &d).unwrap();
        let sets = sets.unwrap();
        let c = sets.cell(1, 6).unwrap();
        assert_eq!(c.pi, vec![lab(1, 6, 7)]);
        assert_eq!(c.lambda, vec![lab(1, 5, 6)]);
        assert_eq!(c.delta.len(), 2);
        assert_eq!(c.f.iter().copied().collect::<BTreeSet<_>>(), [lab(1, 6, 7), lab(1, 4, 6), lab(1, 5, 6)].into());
        assert_eq!(s.step_counts(), [10, 3, 24, 6, 6]);
        assert_eq!(s.message_count(), 49);
        assert_eq!(s.rate(), Rational64::new(70, 21));
        assert_eq!(s.zero_level_unicasts, vec![(7, 7)]);
        let b: BTreeSet<Vec<SubfileLabel>> = s.messages.iter().filter(|m| m.step == 4).map(|m| m.parts.clone()).collect();
        let want: BTreeSet<Vec<SubfileLabel>> = [
            [lab(1, 2, 5), lab(2, 1, 5)],
            [lab(3, 4, 5), lab(4, 3, 5)],
            [lab(1, 2, 6), lab(2, 1, 6)],
            [lab(3, 4, 6), lab(4, 3, 6)],
            [lab(1, 3, 6), lab(3, 1, 6)],
            [lab(2, 4, 6), lab(4, 2, 6)],
        ]
        .iter()
        .map(|m| m.to_vec())
        .collect();
        assert_eq!(b, want);
    }

    #[test]
    fn delta_even_examples() {
        let d = crate::delivery_general::canonical_classification([4, 3, 0]);
        let n: BTreeMap<UserId, usize> = [(5, 0), (6, 0), (7, 0)].into();
        let dc = build_delta_even(&d, &n).unwrap();
        assert!(dc.messages.is_empty());
        let n: BTreeMap<UserId, usize> = [(5, 3), (6, 0), (7, 0)].into();
        let dc = build_delta_even(&d, &n).unwrap();
        assert_eq!(dc.messages.len(), 6);
        for i in 1..=4 {
            assert_eq!(dc.delta[&(i, 5)].len(), 3);
        }
        let n: BTreeMap<UserId, usize> = [(5, 4)].into();
        assert!(build_delta_even(&d, &n).is_err());
        let d3 = crate::delivery_general::canonical_classification([3, 0, 0]);
        assert!(build_delta_odd(&d3, &BTreeMap::new()).unwrap().messages.is_empty());
    }

    #[test]
    fn cl21_formula_examples() {
        assert_eq!(rate_formula_cl21(5, 2, 7), Rational64::new(51, 21));
        assert_eq!(rate_formula_cl21(7, 0, 7), Rational64::new(5, 3));
        assert_eq!(rate_formula_cl21(1, 6, 7), Rational64::from_integer(3));
        assert_eq!(rate_formula_cl21(0, 7, 7), Rational64::from_integer(3));
    }

    #[test]
    fn cl210_formula_examples() {
        let c = count_messages_cl210([4, 2, 1]);
        assert_eq!((c.messages, c.rate), (49, Rational64::new(70, 21)));
        let c = count_messages_cl210([7, 0, 0]);
        assert_eq!((c.messages, c.rate), (35, Rational64::new(5, 3)));
        for kh in 2..=7 {
            assert_eq!(
                count_messages_cl210([kh, 7 - kh, 0]).rate,
                rate_formula_cl21(kh, 7 - kh, 7)
            );
        }
        assert!(count_messages_cl210([1, 3, 3]).fallback);
    }

    #[test]
    fn schedule_matches_formula_all_k7() {
        for kh in 0..=7usize {
            for kr in 0..=7 - kh {
                let (p, d) = setup(kh, kr);
                let kl = 7 - kh - kr;
                assert_eq!(d.counts(), [kh, kl, kr]);
                let s = build_schedule(&p, &d).unwrap();
                let f = count_messages_cl210([kh, kl, kr]);
                if kh >= 2 || kr == 0 {
                    assert_eq!(s.message_count() as u64, f.messages, "k = [{kh},{kl},{kr}]");
                    assert_eq!(s.rate(), f.rate);
                } else {
                    assert!((s.message_count() as u64) <= f.messages);
                }
            }
        }
    }

    #[test]
    fn cross_sets_need_two_high_users() {
        let (p, d) = setup(1, 0);
        assert_eq!(derive_cross_sets(&p, &d), Err(Error::FallbackRequired));
        let s = build_schedule(&p, &d).unwrap();
        assert!(s.fallback);
        assert_eq!(s.rate(), Rational64::from_integer(3));
    }

    #[test]
    fn rejects_other_levels() {
        let c = LibraryConfig::new(7, 7, 3, 2, 0).unwrap();
        let p = build_placement_by_id(&c).unwrap();
        let d = p.classify(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert!(build_schedule(&p, &d).is_err());
    }
}
