//! User sets, subfile indices and subfile labels.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub type UserId = u32;
pub type FileId = u32;

/// Largest user id representable in a [`UserSet`].
pub const MAX_USER: UserId = 63;

/// A set of user ids in `1..=63`, stored as a bitmask.
///
/// Ordering is lexicographic on the ascending member lists, so
/// `{1,2} < {1,2,3} < {1,3} < {2,3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct UserSet(u64);

/// Subfiles of a level-`t` file are indexed by the `t`-subset of users that
/// caches them.
pub type SubfileIndex = UserSet;

impl UserSet {
    pub const fn empty() -> Self {
        UserSet(0)
    }

    pub fn from_users<I: IntoIterator<Item = UserId>>(users: I) -> Result<Self> {
        let mut s = UserSet(0);
        for u in users {
            if u == 0 || u > MAX_USER {
                return Err(Error::InvalidArgument(format!(
                    "user id {u} outside 1..={MAX_USER}"
                )));
            }
            s.0 |= 1 << u;
        }
        Ok(s)
    }

    /// Panicking constructor for ids known to be valid.
    pub fn of(users: &[UserId]) -> Self {
        Self::from_users(users.iter().copied()).expect("valid user ids")
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, u: UserId) -> bool {
        (1..=MAX_USER).contains(&u) && self.0 & (1 << u) != 0
    }

    pub fn with(self, u: UserId) -> Self {
        debug_assert!((1..=MAX_USER).contains(&u));
        UserSet(self.0 | (1 << u))
    }

    pub fn without(self, u: UserId) -> Self {
        if u > MAX_USER {
            return self;
        }
        UserSet(self.0 & !(1 << u))
    }

    pub fn union(self, other: Self) -> Self {
        UserSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        UserSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        UserSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<UserId> {
        (self.0 != 0).then(|| self.0.trailing_zeros())
    }

    pub fn max(self) -> Option<UserId> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = UserId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let u = bits.trailing_zeros();
                bits &= bits - 1;
                Some(u)
            }
        })
    }

    pub fn to_vec(self) -> Vec<UserId> {
        self.iter().collect()
    }

    /// Parses `1-2-5` (the dump format) or `{1,2,5}`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().trim_start_matches('{').trim_end_matches('}');
        if t.is_empty() {
            return Ok(UserSet::empty());
        }
        let mut users = Vec::new();
        for tok in t.split(['-', ',']) {
            let u: UserId = tok.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad user id `{tok}` in `{text}`"))
            })?;
            users.push(u);
        }
        Self::from_users(users)
    }

    /// Dash separated member list, e.g. `1-2-5`.
    pub fn key(self) -> String {
        let v: Vec<String> = self.iter().map(|u| u.to_string()).collect();
        v.join("-")
    }
}

impl Ord for UserSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for UserSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.iter().map(|u| u.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

impl FromIterator<UserId> for UserSet {
    fn from_iter<I: IntoIterator<Item = UserId>>(iter: I) -> Self {
        let mut s = UserSet::empty();
        for u in iter {
            s = s.with(u);
        }
        s
    }
}

/// One subfile `W_{file, index}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubfileLabel {
    pub file: FileId,
    pub index: SubfileIndex,
}

impl SubfileLabel {
    pub fn new(file: FileId, index: SubfileIndex) -> Self {
        SubfileLabel { file, index }
    }

    /// Parses `file:1-2`.
    pub fn parse(text: &str) -> Result<Self> {
        let (f, idx) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("bad subfile label `{text}`")))?;
        let file = f
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad file id in `{text}`")))?;
        Ok(SubfileLabel { file, index: UserSet::parse(idx)? })
    }
}

impl fmt::Display for SubfileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.index.key())
    }
}

impl fmt::Debug for SubfileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}_{}", self.file, self.index)
    }
}

/// Binomial coefficient, 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// All `k`-subsets of `users` in lexicographic order.
pub fn k_subsets(users: &[UserId], k: usize) -> Vec<UserSet> {
    let mut sorted = users.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    if k > sorted.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| sorted[i]).collect());
        // advance to the next combination
        let n = sorted.len();
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Users `1..=k`.
pub fn user_range(k: usize) -> Vec<UserId> {
    (1..=k as UserId).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_lexicographic() {
        let a = UserSet::of(&[1, 2]);
        let b = UserSet::of(&[1, 2, 3]);
        let c = UserSet::of(&[1, 3]);
        let d = UserSet::of(&[2, 3]);
        assert!(a < b && b < c && c < d);
    }

    #[test]
    fn subsets_count_and_order() {
        let s = k_subsets(&user_range(5), 2);
        assert_eq!(s.len(), 10);
        assert_eq!(s[0], UserSet::of(&[1, 2]));
        assert_eq!(s[9], UserSet::of(&[4, 5]));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(k_subsets(&user_range(3), 0), vec![UserSet::empty()]);
        assert!(k_subsets(&user_range(3), 4).is_empty());
        assert_eq!(k_subsets(&user_range(4), 4).len(), 1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 2), 21);
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(62, 31), 465428353255261088);
    }

    #[test]
    fn label_roundtrip() {
        let l = SubfileLabel::new(3, UserSet::of(&[1, 4, 6]));
        assert_eq!(l.to_string(), "3:1-4-6");
        assert_eq!(SubfileLabel::parse("3:1-4-6").unwrap(), l);
        assert!(SubfileLabel::parse("x").is_err());
        assert!(UserSet::from_users([0]).is_err());
        assert!(UserSet::from_users([64]).is_err());
    }
}
