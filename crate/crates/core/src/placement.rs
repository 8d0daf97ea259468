//! Library grouping, sub-packetization and cache placement.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sets::{binomial, k_subsets, user_range, FileId, SubfileIndex, SubfileLabel, UserId};

/// Caching level of a file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    /// Cached at level `t`: each subfile stored by all `t` users of its index.
    High,
    /// Each subfile stored by exactly one user of its index.
    Low,
    /// Not cached.
    Zero,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::High => "high",
            Level::Low => "low",
            Level::Zero => "zero",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "high" => Ok(Level::High),
            "low" => Ok(Level::Low),
            "zero" => Ok(Level::Zero),
            other => Err(Error::InvalidArgument(format!("unknown level `{other}`"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// System parameters of one CL(t,1,0) placement.
#[derive(Clone, Debug, PartialEq)]
pub struct LibraryConfig {
    users: usize,
    files: usize,
    level: usize,
    high_files: usize,
    uncached_files: usize,
    cache: Rational64,
    slack: Rational64,
    gamma: f64,
}

impl LibraryConfig {
    /// Config with an explicit file split; the cache size follows exactly.
    pub fn new(
        users: usize,
        files: usize,
        level: usize,
        high_files: usize,
        uncached_files: usize,
    ) -> Result<Self> {
        check_users_level(users, level)?;
        if high_files + uncached_files > files {
            return Err(Error::InvalidConfig(format!(
                "N_h + N_r = {} exceeds N = {files}",
                high_files + uncached_files
            )));
        }
        let cache = required_cache(users, files, level, high_files, uncached_files);
        Ok(LibraryConfig {
            users,
            files,
            level,
            high_files,
            uncached_files,
            cache,
            slack: Rational64::zero(),
            gamma: 0.0,
        })
    }

    /// Config from a cache budget; the number of high-level files is the
    /// largest that fits and any leftover capacity is kept as slack.
    pub fn with_cache(
        users: usize,
        files: usize,
        level: usize,
        cache: Rational64,
        uncached_files: usize,
    ) -> Result<Self> {
        check_users_level(users, level)?;
        let g = group_library(files, cache, level, uncached_files, users)?;
        let mut c = Self::new(users, files, level, g.high_files, uncached_files)?;
        c.cache = cache;
        c.slack = g.slack;
        Ok(c)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn high_files(&self) -> usize {
        self.high_files
    }

    pub fn low_files(&self) -> usize {
        self.files - self.high_files - self.uncached_files
    }

    pub fn uncached_files(&self) -> usize {
        self.uncached_files
    }

    /// Cache budget `M` in file units.
    pub fn cache(&self) -> Rational64 {
        self.cache
    }

    /// Budget left unused because the high-level count was rounded down.
    pub fn slack(&self) -> Rational64 {
        self.slack
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn subfiles_per_file(&self) -> u64 {
        binomial(self.users as u64, self.level as u64)
    }

    /// Low-level subfile indices owned by each user, `C(K-1,t-1)/t`.
    pub fn owned_per_user(&self) -> u64 {
        binomial(self.users as u64 - 1, self.level as u64 - 1) / self.level as u64
    }
}

fn check_users_level(users: usize, level: usize) -> Result<()> {
    if users < 3 || users > crate::sets::MAX_USER as usize {
        return Err(Error::InvalidConfig(format!("K = {users} outside 3..=63")));
    }
    if level < 2 || level > users - 1 {
        return Err(Error::InvalidConfig(format!("t = {level} outside 2..={}", users - 1)));
    }
    if !binomial(users as u64, level as u64).is_multiple_of(users as u64) {
        return Err(Error::InvalidConfig(format!(
            "C({users},{level}) is not divisible by K = {users}"
        )));
    }
    Ok(())
}

/// `M = (N_h (t-1) + N - N_r) / K`.
pub fn required_cache(
    users: usize,
    files: usize,
    level: usize,
    high_files: usize,
    uncached_files: usize,
) -> Rational64 {
    Rational64::new(
        (high_files * (level - 1) + files - uncached_files) as i64,
        users as i64,
    )
}

/// Result of [`group_library`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    pub high_files: usize,
    pub low_files: usize,
    pub slack: Rational64,
}

/// Largest number of high-level files that fits in cache `M`, capped at
/// `N - N_r`.
pub fn group_library(
    files: usize,
    cache: Rational64,
    level: usize,
    uncached_files: usize,
    users: usize,
) -> Result<Grouping> {
    if level < 2 {
        return Err(Error::InvalidConfig(format!("t = {level} must be at least 2")));
    }
    if uncached_files > files {
        return Err(Error::InvalidConfig(format!("N_r = {uncached_files} exceeds N = {files}")));
    }
    let spare = cache * Rational64::from_integer(users as i64)
        - Rational64::from_integer((files - uncached_files) as i64);
    if spare < Rational64::zero() {
        return Err(Error::CacheTooSmall { level, uncached: uncached_files });
    }
    let fit = (spare / Rational64::from_integer(level as i64 - 1))
        .floor()
        .to_integer() as usize;
    let high_files = fit.min(files - uncached_files);
    let used = required_cache(users, files, level, high_files, uncached_files);
    Ok(Grouping {
        high_files,
        low_files: files - uncached_files - high_files,
        slack: cache - used,
    })
}

/// Owner of each level-`t` subfile index of a low-level file.
#[derive(Clone, Debug)]
pub struct OwnershipTable {
    users: usize,
    level: usize,
    indices: Vec<SubfileIndex>,
    owner: HashMap<SubfileIndex, UserId>,
    owned: Vec<Vec<SubfileIndex>>,
}

impl OwnershipTable {
    /// Balanced ownership: each user owns `C(K-1,t-1)/t` indices, all
    /// containing it. For `t = 2` with odd `K` the cyclic rule is used;
    /// otherwise indices are placed in lexicographic order with augmenting
    /// paths over members in ascending id.
    pub fn new(users: usize, level: usize) -> Result<Self> {
        check_users_level(users, level)?;
        let indices = k_subsets(&user_range(users), level);
        let quota = (binomial(users as u64 - 1, level as u64 - 1) / level as u64) as usize;
        let owner: HashMap<SubfileIndex, UserId> = if level == 2 && users % 2 == 1 {
            indices
                .iter()
                .map(|&i| (i, cyclic_owner(i, users)))
                .collect()
        } else {
            balanced_owners(&indices, users, quota)?
        };
        let mut owned = vec![Vec::new(); users + 1];
        for &i in &indices {
            owned[owner[&i] as usize].push(i);
        }
        if owned[1..].iter().any(|v| v.len() != quota) {
            return Err(Error::Construction("unbalanced low-level ownership".into()));
        }
        Ok(OwnershipTable { users, level, indices, owner, owned })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn owner(&self, index: SubfileIndex) -> Option<UserId> {
        self.owner.get(&index).copied()
    }

    /// Indices owned by `u`, in lexicographic order.
    pub fn owned_by(&self, u: UserId) -> &[SubfileIndex] {
        self.owned.get(u as usize).map_or(&[], Vec::as_slice)
    }

    /// All `t`-subsets of `[K]` in lexicographic order.
    pub fn indices(&self) -> &[SubfileIndex] {
        &self.indices
    }
}

fn cyclic_owner(index: SubfileIndex, users: usize) -> UserId {
    let u = index.min().expect("non-empty");
    let v = index.max().expect("non-empty");
    let k = users as UserId;
    if (v - u) % k <= (k - 1) / 2 {
        u
    } else {
        v
    }
}

fn balanced_owners(
    indices: &[SubfileIndex],
    users: usize,
    quota: usize,
) -> Result<HashMap<SubfileIndex, UserId>> {
    let mut owner = vec![0 as UserId; indices.len()];
    let mut holdings: Vec<Vec<usize>> = vec![Vec::new(); users + 1];
    for i in 0..indices.len() {
        let mut seen = vec![false; users + 1];
        if !augment(i, indices, quota, &mut owner, &mut holdings, &mut seen) {
            return Err(Error::Construction(format!(
                "no balanced owner for index {}",
                indices[i]
            )));
        }
    }
    Ok(indices.iter().copied().zip(owner).collect())
}

fn augment(
    i: usize,
    indices: &[SubfileIndex],
    quota: usize,
    owner: &mut [UserId],
    holdings: &mut [Vec<usize>],
    seen: &mut [bool],
) -> bool {
    for u in indices[i].iter() {
        if seen[u as usize] {
            continue;
        }
        seen[u as usize] = true;
        if holdings[u as usize].len() < quota {
            owner[i] = u;
            holdings[u as usize].push(i);
            return true;
        }
        for pos in 0..holdings[u as usize].len() {
            let j = holdings[u as usize][pos];
            let prev = owner[j];
            if augment_move(j, indices, quota, owner, holdings, seen) {
                let list = &mut holdings[prev as usize];
                let p = list.iter().position(|&x| x == j).expect("held");
                list[p] = i;
                owner[i] = u;
                return true;
            }
        }
    }
    false
}

/// Move index `j` away from its current owner to another member.
fn augment_move(
    j: usize,
    indices: &[SubfileIndex],
    quota: usize,
    owner: &mut [UserId],
    holdings: &mut [Vec<usize>],
    seen: &mut [bool],
) -> bool {
    for u in indices[j].iter() {
        if seen[u as usize] {
            continue;
        }
        seen[u as usize] = true;
        if holdings[u as usize].len() < quota {
            holdings[u as usize].push(j);
            owner[j] = u;
            return true;
        }
        for pos in 0..holdings[u as usize].len() {
            let k = holdings[u as usize][pos];
            if augment_move(k, indices, quota, owner, holdings, seen) {
                holdings[u as usize][pos] = j;
                owner[j] = u;
                return true;
            }
        }
    }
    false
}

/// Owner of a low-level subfile index for `K` users at level `t`.
pub fn low_level_owner(index: SubfileIndex, users: usize, level: usize) -> Result<UserId> {
    if index.len() != level || index.max().is_none_or(|m| m as usize > users) {
        return Err(Error::InvalidArgument(format!(
            "{index} is not a {level}-subset of 1..={users}"
        )));
    }
    if level == 2 && users % 2 == 1 {
        return Ok(cyclic_owner(index, users));
    }
    OwnershipTable::new(users, level)?
        .owner(index)
        .ok_or_else(|| Error::Construction("index missing from ownership table".into()))
}

/// Level assignment and cache contents of every user.
#[derive(Clone, Debug)]
pub struct PlacementSpec {
    config: LibraryConfig,
    levels: Vec<Level>,
    ownership: OwnershipTable,
}

/// Assign levels by popularity rank and build the caches. `ranking` lists
/// file ids from most to least popular.
pub fn build_placement(config: &LibraryConfig, ranking: &[FileId]) -> Result<PlacementSpec> {
    let n = config.files();
    if ranking.len() != n {
        return Err(Error::InvalidArgument(format!(
            "ranking has {} entries, expected {n}",
            ranking.len()
        )));
    }
    let mut levels = vec![None; n];
    for (rank, &f) in ranking.iter().enumerate() {
        if f == 0 || f as usize > n {
            return Err(Error::FileOutOfRange { file: f, files: n });
        }
        let slot = &mut levels[f as usize - 1];
        if slot.is_some() {
            return Err(Error::InvalidArgument(format!("file {f} ranked twice")));
        }
        *slot = Some(if rank < config.high_files() {
            Level::High
        } else if rank < n - config.uncached_files() {
            Level::Low
        } else {
            Level::Zero
        });
    }
    let levels = levels.into_iter().map(|l| l.expect("permutation")).collect();
    let ownership = OwnershipTable::new(config.users(), config.level())?;
    let spec = PlacementSpec { config: config.clone(), levels, ownership };
    for u in 1..=config.users() as UserId {
        if spec.occupancy(u) + config.slack() != config.cache() {
            return Err(Error::Construction(format!("user {u} cache occupancy mismatch")));
        }
    }
    Ok(spec)
}

/// Placement with files ranked by id (file 1 most popular).
pub fn build_placement_by_id(config: &LibraryConfig) -> Result<PlacementSpec> {
    let ranking: Vec<FileId> = (1..=config.files() as FileId).collect();
    build_placement(config, &ranking)
}

impl PlacementSpec {
    pub fn config(&self) -> &LibraryConfig {
        &self.config
    }

    pub fn ownership(&self) -> &OwnershipTable {
        &self.ownership
    }

    pub fn level(&self, file: FileId) -> Result<Level> {
        self.levels
            .get((file as usize).wrapping_sub(1))
            .copied()
            .ok_or(Error::FileOutOfRange { file, files: self.config.files() })
    }

    pub fn files_at(&self, level: Level) -> Vec<FileId> {
        (1..=self.config.files() as FileId)
            .filter(|&f| self.levels[f as usize - 1] == level)
            .collect()
    }

    /// Whether user `u` stores subfile `label`.
    pub fn caches(&self, u: UserId, label: SubfileLabel) -> bool {
        match self.level(label.file) {
            Ok(Level::High) => label.index.contains(u),
            Ok(Level::Low) => self.ownership.owner(label.index) == Some(u),
            _ => false,
        }
    }

    /// Full cache contents of `u`, ordered by file then index.
    pub fn cache_of(&self, u: UserId) -> Vec<SubfileLabel> {
        let mut out = Vec::new();
        for f in 1..=self.config.files() as FileId {
            match self.levels[f as usize - 1] {
                Level::High => out.extend(
                    self.ownership
                        .indices()
                        .iter()
                        .filter(|i| i.contains(u))
                        .map(|&i| SubfileLabel::new(f, i)),
                ),
                Level::Low => out.extend(
                    self.ownership.owned_by(u).iter().map(|&i| SubfileLabel::new(f, i)),
                ),
                Level::Zero => {}
            }
        }
        out
    }

    /// Cached amount of `u` in file units.
    pub fn occupancy(&self, u: UserId) -> Rational64 {
        let per_high = binomial(self.config.users() as u64 - 1, self.config.level() as u64 - 1);
        let per_low = self.ownership.owned_by(u).len() as u64;
        let count = per_high * self.config.high_files() as u64 + per_low * self.config.low_files() as u64;
        Rational64::new(count as i64, self.config.subfiles_per_file() as i64)
    }

    /// One line per cached `(user, file, index)`.
    pub fn export(&self) -> String {
        let mut s = String::from("user,file,index,level\n");
        for u in 1..=self.config.users() as UserId {
            for l in self.cache_of(u) {
                let lv = self.levels[l.file as usize - 1];
                let _ = writeln!(s, "{u},{},{},{lv}", l.file, l.index.key());
            }
        }
        s
    }

    pub fn classify(&self, demand: &[FileId]) -> Result<DemandClassification> {
        classify_demand(demand, self)
    }
}

/// One record of a placement export.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlacementRecord {
    pub user: UserId,
    pub label: SubfileLabel,
    pub level: Level,
}

/// Parse the output of [`PlacementSpec::export`].
pub fn import_placement(text: &str) -> Result<Vec<PlacementRecord>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (n == 0 && line.starts_with("user")) {
            continue;
        }
        let err = |msg: &str| Error::Parse { line: n + 1, msg: msg.to_string() };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(err("expected 4 columns"));
        }
        let user = cols[0].parse().map_err(|_| err("bad user"))?;
        let file = cols[1].parse().map_err(|_| err("bad file"))?;
        let index = SubfileIndex::parse(cols[2]).map_err(|e| err(&e.to_string()))?;
        let level = Level::parse(cols[3]).map_err(|e| err(&e.to_string()))?;
        out.push(PlacementRecord { user, label: SubfileLabel::new(file, index), level });
    }
    Ok(out)
}

/// Users split by the level of their requested file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandClassification {
    pub demand: Vec<FileId>,
    pub high: Vec<UserId>,
    pub low: Vec<UserId>,
    pub zero: Vec<UserId>,
}

impl DemandClassification {
    /// `[k^h, k^l, k^r]`.
    pub fn counts(&self) -> [usize; 3] {
        [self.high.len(), self.low.len(), self.zero.len()]
    }

    /// File requested by user `u`.
    pub fn file_of(&self, u: UserId) -> FileId {
        self.demand[u as usize - 1]
    }

    pub fn users(&self) -> usize {
        self.demand.len()
    }
}

/// Classify a demand vector (`demand[u-1]` is the file of user `u`).
pub fn classify_demand(demand: &[FileId], placement: &PlacementSpec) -> Result<DemandClassification> {
    let k = placement.config().users();
    if demand.len() != k {
        return Err(Error::InvalidArgument(format!(
            "demand has {} entries, expected K = {k}",
            demand.len()
        )));
    }
    let mut c = DemandClassification {
        demand: demand.to_vec(),
        high: Vec::new(),
        low: Vec::new(),
        zero: Vec::new(),
    };
    for (i, &f) in demand.iter().enumerate() {
        let u = i as UserId + 1;
        match placement.level(f)? {
            Level::High => c.high.push(u),
            Level::Low => c.low.push(u),
            Level::Zero => c.zero.push(u),
        }
    }
    Ok(c)
}

/// Parse a comma separated demand vector such as `1,2,3,4,5,6,7`.
pub fn parse_demand(text: &str) -> Result<Vec<FileId>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad file id `{}`", t.trim())))
        })
        .collect()
}

/// `M` as an `f64`, for reporting.
pub fn cache_as_f64(m: Rational64) -> f64 {
    m.to_f64().unwrap_or(f64::NAN)
}
