//! Byte-level decoding oracle.
//!
//! Every subfile of every requested file gets a random payload; each user
//! starts from its cache, hears every transmission, and peels messages with
//! a single unknown part until nothing changes. A schedule passes when every
//! user ends up with every subfile of its requested file.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::delivery_general::{assemble_schedule_general, DecompositionVars};
use crate::error::Result;
use crate::placement::{DemandClassification, PlacementSpec};
use crate::schedule::DeliverySchedule;
use crate::sets::{FileId, SubfileLabel, UserId};

/// Bytes per subfile unless overridden.
pub const DEFAULT_SUBFILE_BYTES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub seed: u64,
    pub subfile_bytes: usize,
}

impl OracleOptions {
    pub fn seeded(seed: u64) -> Self {
        OracleOptions { seed, subfile_bytes: DEFAULT_SUBFILE_BYTES }
    }
}

/// Why a user could not decode.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeFailure {
    #[error("user {user} cannot recover {missing}; messages carrying it: {}", fmt_trace(.trace))]
    Missing {
        user: UserId,
        missing: SubfileLabel,
        /// Dump lines of every message that contains the missing subfile.
        trace: Vec<String>,
    },
    #[error("user {user} recovered wrong bytes for {label} from message {message}")]
    Corrupt { user: UserId, label: SubfileLabel, message: usize },
}

fn fmt_trace(t: &[String]) -> String {
    if t.is_empty() {
        "none".into()
    } else {
        t.join("; ")
    }
}

/// Summary of a successful decode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeReport {
    pub users: usize,
    /// Subfiles recovered from transmissions, summed over users.
    pub recovered: usize,
    pub messages: usize,
    pub transmitted_bytes: usize,
}

/// Labels of every subfile of `file`.
fn file_labels(placement: &PlacementSpec, file: FileId) -> impl Iterator<Item = SubfileLabel> + '_ {
    placement.ownership().indices().iter().map(move |&i| SubfileLabel::new(file, i))
}

/// Random payloads for every subfile of the requested files plus anything
/// else the schedule mentions, generated in label order from `seed`.
pub fn payloads(
    placement: &PlacementSpec,
    class: &DemandClassification,
    schedule: &DeliverySchedule,
    opts: OracleOptions,
) -> HashMap<SubfileLabel, Vec<u8>> {
    let mut labels: BTreeSet<SubfileLabel> = BTreeSet::new();
    let files: BTreeSet<FileId> = class.demand.iter().copied().collect();
    for &f in &files {
        labels.extend(file_labels(placement, f));
    }
    for m in &schedule.messages {
        labels.extend(m.parts.iter().copied());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    labels
        .into_iter()
        .map(|l| {
            let mut b = vec![0u8; opts.subfile_bytes];
            rng.fill_bytes(&mut b);
            (l, b)
        })
        .collect()
}

fn xor_into(acc: &mut [u8], x: &[u8]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a ^= b;
    }
}

/// Run the decoder for every user.
pub fn simulate(
    placement: &PlacementSpec,
    class: &DemandClassification,
    schedule: &DeliverySchedule,
    opts: OracleOptions,
) -> std::result::Result<DecodeReport, DecodeFailure> {
    let truth = payloads(placement, class, schedule, opts);
    let wire: Vec<Vec<u8>> = schedule
        .messages
        .iter()
        .map(|m| {
            let mut acc = vec![0u8; opts.subfile_bytes];
            for p in &m.parts {
                xor_into(&mut acc, &truth[p]);
            }
            acc
        })
        .collect();
    let broadcast: Vec<SubfileLabel> = schedule
        .zero_level_unicasts
        .iter()
        .flat_map(|&(_, f)| file_labels(placement, f).collect::<Vec<_>>())
        .collect();

    let mut recovered = 0;
    for u in 1..=class.users() as UserId {
        let mut known: HashMap<SubfileLabel, Vec<u8>> = truth
            .iter()
            .filter(|(l, _)| placement.caches(u, **l))
            .map(|(l, b)| (*l, b.clone()))
            .collect();
        for l in &broadcast {
            known.entry(*l).or_insert_with(|| truth[l].clone());
        }
        let mut done = vec![false; wire.len()];
        loop {
            let mut progress = false;
            for (idx, m) in schedule.messages.iter().enumerate() {
                if done[idx] {
                    continue;
                }
                let mut unknown = m.parts.iter().filter(|p| !known.contains_key(p));
                let Some(&target) = unknown.next() else {
                    done[idx] = true;
                    continue;
                };
                if unknown.next().is_some() {
                    continue;
                }
                let mut acc = wire[idx].clone();
                for p in m.parts.iter().filter(|&&p| p != target) {
                    xor_into(&mut acc, &known[p]);
                }
                if acc != truth[&target] {
                    return Err(DecodeFailure::Corrupt { user: u, label: target, message: idx });
                }
                known.insert(target, acc);
                done[idx] = true;
                recovered += 1;
                progress = true;
            }
            if !progress {
                break;
            }
        }
        let want = class.file_of(u);
        for l in file_labels(placement, want) {
            if !known.contains_key(&l) {
                let trace = schedule
                    .messages
                    .iter()
                    .filter(|m| m.parts.contains(&l))
                    .map(|m| format!("{m:?}"))
                    .collect();
                return Err(DecodeFailure::Missing { user: u, missing: l, trace });
            }
        }
    }
    Ok(DecodeReport {
        users: class.users(),
        recovered,
        messages: schedule.messages.len(),
        transmitted_bytes: schedule.messages.len() * opts.subfile_bytes
            + broadcast.len() * opts.subfile_bytes,
    })
}

/// Structural problem found by [`audit_schedule`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditIssue {
    /// A target misses zero or several parts of a message.
    NotCacheDecodable { message: usize, user: UserId, missing: usize },
    /// A target's single missing part belongs to a file it did not request.
    WrongFile { message: usize, user: UserId },
    /// A needed subfile is delivered `count != 1` times to its requester.
    Coverage { user: UserId, label: SubfileLabel, count: usize },
    /// A zero-level user lacks exactly one whole-file unicast.
    ZeroLevel { user: UserId, count: usize },
}

impl fmt::Display for AuditIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditIssue::NotCacheDecodable { message, user, missing } => {
                write!(f, "message {message}: target {user} misses {missing} parts")
            }
            AuditIssue::WrongFile { message, user } => {
                write!(f, "message {message}: target {user} gets a file it did not request")
            }
            AuditIssue::Coverage { user, label, count } => {
                write!(f, "user {user} is sent {label} {count} times")
            }
            AuditIssue::ZeroLevel { user, count } => {
                write!(f, "zero-level user {user} gets {count} whole-file unicasts")
            }
        }
    }
}

/// Check that each target decodes its message from cache alone and that
/// every missing subfile reaches its requester exactly once.
pub fn audit_schedule(
    placement: &PlacementSpec,
    class: &DemandClassification,
    schedule: &DeliverySchedule,
) -> std::result::Result<(), AuditIssue> {
    let zero: BTreeSet<UserId> = class.zero.iter().copied().collect();
    let mut got: HashMap<(UserId, SubfileLabel), usize> = HashMap::new();
    for (idx, m) in schedule.messages.iter().enumerate() {
        for &u in &m.targets {
            let missing: Vec<_> = m.parts.iter().filter(|&&p| !placement.caches(u, p)).collect();
            if missing.len() != 1 {
                return Err(AuditIssue::NotCacheDecodable { message: idx, user: u, missing: missing.len() });
            }
            if missing[0].file != class.file_of(u) {
                return Err(AuditIssue::WrongFile { message: idx, user: u });
            }
            *got.entry((u, *missing[0])).or_default() += 1;
        }
    }
    for u in 1..=class.users() as UserId {
        if zero.contains(&u) {
            let count = schedule
                .zero_level_unicasts
                .iter()
                .filter(|&&(v, f)| v == u && f == class.file_of(u))
                .count();
            if count != 1 {
                return Err(AuditIssue::ZeroLevel { user: u, count });
            }
            continue;
        }
        for l in file_labels(placement, class.file_of(u)) {
            if placement.caches(u, l) {
                continue;
            }
            let count = got.get(&(u, l)).copied().unwrap_or(0);
            if count != 1 {
                return Err(AuditIssue::Coverage { user: u, label: l, count });
            }
        }
    }
    Ok(())
}

/// Subfiles (in subfile units) the users miss in total; zero-level users
/// miss their whole file.
pub fn count_missing(placement: &PlacementSpec, class: &DemandClassification) -> usize {
    (1..=class.users() as UserId)
        .map(|u| file_labels(placement, class.file_of(u)).filter(|&l| !placement.caches(u, l)).count())
        .sum()
}

/// Reference schedule without any decomposition.
pub fn conventional_schedule(placement: &PlacementSpec, class: &DemandClassification) -> Result<DeliverySchedule> {
    let cap = placement.config().owned_per_user() as usize;
    assemble_schedule_general(placement, class, &DecompositionVars::empty(cap))
}

/// Copy of `schedule` without message `index`.
pub fn without_message(schedule: &DeliverySchedule, index: usize) -> DeliverySchedule {
    let mut s = schedule.clone();
    s.messages.remove(index);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delivery_cl2::build_schedule;
    use crate::delivery_general::{build_schedule_general, Solver};
    use crate::placement::{build_placement_by_id, LibraryConfig};
    use crate::schedule::MulticastMessage;
    use crate::sets::UserSet;

    fn example(nh: usize, nr: usize) -> (PlacementSpec, DemandClassification) {
        let c = LibraryConfig::new(7, 7, 2, nh, nr).unwrap();
        let p = build_placement_by_id(&c).unwrap();
        let d = p.classify(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
        (p, d)
    }

    #[test]
    fn examples_decode() {
        for (nh, nr) in [(5, 0), (4, 1)] {
            let (p, d) = example(nh, nr);
            let s = build_schedule(&p, &d).unwrap();
            audit_schedule(&p, &d, &s).unwrap();
            let r = simulate(&p, &d, &s, OracleOptions::seeded(3)).unwrap();
            assert_eq!(r.messages, s.message_count());
        }
    }

    #[test]
    fn conventional_five_high() {
        let (p, d) = example(5, 0);
        let s = conventional_schedule(&p, &d).unwrap();
        assert_eq!(s.message_count(), 68);
        audit_schedule(&p, &d, &s).unwrap();
        simulate(&p, &d, &s, OracleOptions::seeded(0)).unwrap();
    }

    #[test]
    fn missing_subfile_is_reported() {
        let (p, d) = example(5, 0);
        let s = build_schedule(&p, &d).unwrap();
        let bad = without_message(&s, 0);
        let err = simulate(&p, &d, &bad, OracleOptions::seeded(1)).unwrap_err();
        let DecodeFailure::Missing { user, missing, .. } = err else { panic!("{err}") };
        assert_eq!(missing.file, d.file_of(user));
        assert!(err_text(&bad, &p, &d).contains("cannot recover"));
        assert!(audit_schedule(&p, &d, &bad).is_err());
    }

    fn err_text(s: &DeliverySchedule, p: &PlacementSpec, d: &DemandClassification) -> String {
        simulate(p, d, s, OracleOptions::seeded(1)).unwrap_err().to_string()
    }

    #[test]
    fn every_deletion_breaks_four_high() {
        let (p, d) = example(4, 1);
        let s = build_schedule(&p, &d).unwrap();
        for i in 0..s.message_count() {
            assert!(simulate(&p, &d, &without_message(&s, i), OracleOptions::seeded(i as u64)).is_err());
        }
    }

    #[test]
    fn audit_rejects_undecodable_target() {
        let (p, d) = example(5, 0);
        let mut s = build_schedule(&p, &d).unwrap();
        // user 6 caches neither part
        s.messages.push(MulticastMessage::new(
            2,
            vec![SubfileLabel::new(6, UserSet::of(&[1, 2])), SubfileLabel::new(7, UserSet::of(&[1, 3]))],
            vec![6],
        ));
        assert!(matches!(
            audit_schedule(&p, &d, &s),
            Err(AuditIssue::NotCacheDecodable { user: 6, missing: 2, .. })
        ));
    }

    #[test]
    fn general_level_three_decodes() {
        let c = LibraryConfig::new(7, 7, 3, 4, 1).unwrap();
        let p = build_placement_by_id(&c).unwrap();
        let d = p.classify(&[1, 2, 5, 3, 6, 7, 4]).unwrap();
        for solver in [Solver::Exact, Solver::Greedy, Solver::None] {
            let (s, _) = build_schedule_general(&p, &d, solver).unwrap();
            audit_schedule(&p, &d, &s).unwrap();
            simulate(&p, &d, &s, OracleOptions::seeded(9)).unwrap();
        }
    }

    #[test]
    fn missing_count_five_high() {
        let (p, d) = example(5, 0);
        // high users miss C(6,2) = 15 each, low users 21 - 3 = 18
        assert_eq!(count_missing(&p, &d), 5 * 15 + 2 * 18);
    }
}
