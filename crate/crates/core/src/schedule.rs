//! Multicast messages and delivery schedules.

use std::fmt;
use std::fmt::Write as _;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::sets::{binomial, FileId, SubfileLabel, UserId};

/// XOR of one or more subfiles sent in a single transmission of size
/// `1/C(K,t)` files.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MulticastMessage {
    pub parts: Vec<SubfileLabel>,
    pub step: u8,
    pub targets: Vec<UserId>,
}

impl MulticastMessage {
    pub fn new(step: u8, mut parts: Vec<SubfileLabel>, mut targets: Vec<UserId>) -> Self {
        parts.sort();
        targets.sort_unstable();
        targets.dedup();
        MulticastMessage { parts, step, targets }
    }

    pub fn is_unicast(&self) -> bool {
        self.parts.len() == 1
    }
}

impl fmt::Debug for MulticastMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", dump_line(self))
    }
}

/// Ordered delivery messages plus whole-file unicasts to zero-level users.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliverySchedule {
    users: usize,
    level: usize,
    pub messages: Vec<MulticastMessage>,
    /// `(user, file)` pairs served by sending the whole file.
    pub zero_level_unicasts: Vec<(UserId, FileId)>,
    /// Built by the fallback used when fewer than two users request
    /// high-level files.
    pub fallback: bool,
}

impl DeliverySchedule {
    pub fn new(users: usize, level: usize) -> Self {
        DeliverySchedule {
            users,
            level,
            messages: Vec::new(),
            zero_level_unicasts: Vec::new(),
            fallback: false,
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// `|messages| / C(K,t) + (number of whole-file unicasts)`.
    pub fn rate(&self) -> Rational64 {
        Rational64::new(
            self.messages.len() as i64,
            binomial(self.users as u64, self.level as u64) as i64,
        ) + Rational64::from_integer(self.zero_level_unicasts.len() as i64)
    }

    /// Number of messages per step 1..=5.
    pub fn step_counts(&self) -> [usize; 5] {
        let mut c = [0; 5];
        for m in &self.messages {
            c[(m.step as usize).clamp(1, 5) - 1] += 1;
        }
        c
    }

    /// One line per message: `step parts -> targets`; whole-file unicasts
    /// are written as `5 file:* -> user`.
    pub fn dump(&self) -> String {
        let mut s = format!("# K={} t={} messages={}\n", self.users, self.level, self.messages.len());
        for m in &self.messages {
            let _ = writeln!(s, "{}", dump_line(m));
        }
        for (u, f) in &self.zero_level_unicasts {
            let _ = writeln!(s, "5 {f}:* -> {u}");
        }
        s
    }

    /// Parse the output of [`DeliverySchedule::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "empty dump".into() })?;
        let field = |key: &str| -> Result<usize> {
            header
                .split_whitespace()
                .find_map(|w| w.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or(Error::Parse { line: 1, msg: format!("missing {key}") })
        };
        let mut sched = DeliverySchedule::new(field("K=")?, field("t=")?);
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: n + 1, msg: msg.to_string() };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("missing ->"))?;
            let (step, parts) = lhs.trim().split_once(' ').ok_or_else(|| err("missing step"))?;
            let step: u8 = step.parse().map_err(|_| err("bad step"))?;
            let targets: Vec<UserId> = rhs
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse().map_err(|_| err("bad target")))
                .collect::<Result<_>>()?;
            if let Some(f) = parts.trim().strip_suffix(":*") {
                let file = f.parse().map_err(|_| err("bad file"))?;
                let &[u] = targets.as_slice() else {
                    return Err(err("whole-file unicast needs one target"));
                };
                sched.zero_level_unicasts.push((u, file));
                continue;
            }
            let parts: Vec<SubfileLabel> = parts
                .split('+')
                .map(|p| SubfileLabel::parse(p).map_err(|e| err(&e.to_string())))
                .collect::<Result<_>>()?;
            sched.messages.push(MulticastMessage::new(step, parts, targets));
        }
        Ok(sched)
    }
}

fn dump_line(m: &MulticastMessage) -> String {
    let parts: Vec<String> = m.parts.iter().map(ToString::to_string).collect();
    let targets: Vec<String> = m.targets.iter().map(ToString::to_string).collect();
    format!("{} {} -> {}", m.step, parts.join(" + "), targets.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::UserSet;

    #[test]
    fn dump_roundtrip() {
        let mut s = DeliverySchedule::new(7, 2);
        s.messages.push(MulticastMessage::new(
            3,
            vec![
                SubfileLabel::new(7, UserSet::of(&[1, 2])),
                SubfileLabel::new(1, UserSet::of(&[6, 7])),
            ],
            vec![7, 1],
        ));
        s.messages.push(MulticastMessage::new(5, vec![SubfileLabel::new(6, UserSet::of(&[4, 6]))], vec![6]));
        s.zero_level_unicasts.push((7, 7));
        let text = s.dump();
        assert!(text.contains("3 1:6-7 + 7:1-2 -> 1,7"));
        let back = DeliverySchedule::parse_dump(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.rate(), Rational64::new(2, 21) + 1);
        assert_eq!(s.step_counts(), [0, 0, 1, 0, 1]);
        assert!(DeliverySchedule::parse_dump("# K=7 t=2\n1 x -> 1\n").is_err());
    }
}
