//! Average delivery rates, placement optimisation over the number of
//! uncached files, memory-sharing baselines and parameter sweeps.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::delivery_cl2::{count_messages_cl210, rate_formula_cl21};
use crate::delivery_general::{objective_for_counts, rate_general, Solver};
use crate::error::{Error, Result};
use crate::placement::group_library;
use crate::popularity::{profile_distribution, sample_profile, PopularityModel, ProfileDistribution};
use crate::sets::binomial;

/// Delivery schemes that can be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Constructive level-2 scheme without uncached files.
    Cl21,
    /// Constructive level-2 scheme with uncached files.
    Cl210,
    /// General level-`t` scheme, exact decomposition.
    ClTExact,
    /// General level-`t` scheme, greedy decomposition.
    ClTGreedy,
    /// Same placement, no cross-level messages.
    Conventional,
    /// Uniform memory sharing over all files.
    NaiveMs,
    /// Memory sharing over the most popular files, the rest unicast.
    NaiveMsRemoval,
    /// `ClTExact` minimised over `t = 2..=6`, each with its best `N_r`.
    ClcdBest,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Cl21,
        Scheme::Cl210,
        Scheme::ClTExact,
        Scheme::ClTGreedy,
        Scheme::Conventional,
        Scheme::NaiveMs,
        Scheme::NaiveMsRemoval,
        Scheme::ClcdBest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Cl21 => "cl21",
            Scheme::Cl210 => "cl210",
            Scheme::ClTExact => "cl_t_exact",
            Scheme::ClTGreedy => "cl_t_greedy",
            Scheme::Conventional => "conventional",
            Scheme::NaiveMs => "naive_ms",
            Scheme::NaiveMsRemoval => "naive_ms_removal",
            Scheme::ClcdBest => "clcd_best",
        }
    }

    /// Whether the scheme uses a CLCD placement with a free `N_r`.
    pub fn uses_placement(self) -> bool {
        matches!(
            self,
            Scheme::Cl21 | Scheme::Cl210 | Scheme::ClTExact | Scheme::ClTGreedy | Scheme::Conventional
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme {s:?}")))
    }
}

/// Parameters shared by every evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub users: usize,
    pub files: usize,
    pub level: usize,
    pub cache: Rational64,
    pub gamma: f64,
    /// Fixed `N_r`; `None` lets [`average_rate`] use 0 and
    /// [`optimize_nr`] scan.
    pub uncached: Option<usize>,
}

impl AnalysisConfig {
    pub fn new(users: usize, files: usize, level: usize, cache: Rational64, gamma: f64) -> Self {
        AnalysisConfig { users, files, level, cache, gamma, uncached: None }
    }

    pub fn with_uncached(mut self, n_r: usize) -> Self {
        self.uncached = Some(n_r);
        self
    }

    pub fn with_level(mut self, t: usize) -> Self {
        self.level = t;
        self
    }

    pub fn popularity(&self) -> Result<PopularityModel> {
        crate::popularity::zipf(self.files, self.gamma)
    }
}

/// Exact per-classification rates, memoised by `(scheme, K, t, k)`.
#[derive(Debug, Default)]
pub struct RateCache {
    table: HashMap<(Scheme, usize, usize, [usize; 3]), Rational64>,
}

impl RateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Rate of `scheme` for classification `k` of `K = k^h + k^l + k^r` users.
    pub fn rate(&mut self, scheme: Scheme, level: usize, k: [usize; 3]) -> Result<Rational64> {
        let users = k.iter().sum();
        let key = (scheme, users, level, k);
        if let Some(&r) = self.table.get(&key) {
            return Ok(r);
        }
        let r = per_k_rate(scheme, level, k)?;
        self.table.insert(key, r);
        Ok(r)
    }
}

/// Rate of a placement-based scheme for one classification.
pub fn per_k_rate(scheme: Scheme, level: usize, k: [usize; 3]) -> Result<Rational64> {
    let users: usize = k.iter().sum();
    let need_two = |name: &str| {
        if level == 2 && users % 2 == 1 {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{name} needs t = 2 and odd K")))
        }
    };
    match scheme {
        Scheme::Cl21 => {
            need_two("cl21")?;
            if k[2] != 0 {
                return Err(Error::Unsupported("cl21 has no zero-level users".into()));
            }
            Ok(rate_formula_cl21(k[0], k[1], users))
        }
        Scheme::Cl210 => {
            need_two("cl210")?;
            Ok(count_messages_cl210(k).rate)
        }
        Scheme::ClTExact | Scheme::ClTGreedy | Scheme::Conventional => {
            let solver = match scheme {
                Scheme::ClTExact => Solver::Exact,
                Scheme::ClTGreedy => Solver::Greedy,
                _ => Solver::None,
            };
            let vars = objective_for_counts(k, level, solver)?;
            Ok(rate_general(k, users, level, vars.objective()))
        }
        _ => Err(Error::Unsupported(format!("{scheme} has no per-classification rate"))),
    }
}

/// Rate of level-`t` delivery when `active` of the `K` users request
/// cached files (0 once `t >= K`).
pub fn naive_rate_integer(users: usize, level: usize, active: usize) -> Rational64 {
    if level >= users {
        return Rational64::zero();
    }
    let (k, t) = (users as u64, level as u64);
    Rational64::new(
        (binomial(k, t + 1) - binomial(k - active as u64, t + 1)) as i64,
        binomial(k, t) as i64,
    )
}

/// `(floor(t), alpha)` with `t = MK/N` and `alpha` the share of each file
/// cached at level `floor(t) + 1`.
pub fn naive_fragments(users: usize, files: usize, cache: Rational64) -> (usize, Rational64) {
    let t = cache * Rational64::from_integer(users as i64) / Rational64::from_integer(files as i64);
    let lo = t.floor();
    (lo.to_integer() as usize, t - lo)
}

/// Memory sharing over `files` files with `active` requesting users.
pub fn naive_ms_rate(users: usize, files: usize, cache: Rational64, active: usize) -> Rational64 {
    if files == 0 {
        return Rational64::zero();
    }
    let (lo, alpha) = naive_fragments(users, files, cache);
    if lo >= users {
        return Rational64::zero();
    }
    let r_lo = naive_rate_integer(users, lo, active);
    if alpha.is_zero() {
        return r_lo;
    }
    alpha * naive_rate_integer(users, lo + 1, active) + (Rational64::from_integer(1) - alpha) * r_lo
}

/// Memory sharing over all files with every user active.
pub fn naive_memory_sharing_rate(users: usize, files: usize, cache: Rational64) -> Rational64 {
    naive_ms_rate(users, files, cache, users)
}

/// Average rate when only the `cached` most popular files are memory
/// shared and requests for the others are served by whole-file unicasts.
pub fn naive_with_removal_rate(
    users: usize,
    cache: Rational64,
    model: &PopularityModel,
    cached: usize,
) -> f64 {
    // head and tail summed separately so keeping every file gives q = 0 exactly
    let (head, tail) = (model.head_mass(cached), model.tail_mass(model.files() - cached.min(model.files())));
    let (pc, q) = (head / (head + tail), tail / (head + tail));
    (0..=users)
        .map(|kc| {
            let w = binomial(users as u64, kc as u64) as f64 * pc.powi(kc as i32) * q.powi((users - kc) as i32);
            if w == 0.0 {
                return 0.0;
            }
            let r = naive_ms_rate(users, cached, cache, kc) + Rational64::from_integer((users - kc) as i64);
            w * r.to_f64().unwrap_or(f64::NAN)
        })
        .sum()
}

/// Best number of cached files for the removal baseline (full scan).
pub fn best_removal(users: usize, cache: Rational64, model: &PopularityModel) -> (usize, f64) {
    let mut best = (model.files(), f64::INFINITY);
    for n_c in 0..=model.files() {
        let r = naive_with_removal_rate(users, cache, model, n_c);
        if r < best.1 {
            best = (n_c, r);
        }
    }
    best
}

/// Rate of one classification in a report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KRate {
    pub k: [usize; 3],
    pub mass: f64,
    pub rate: Rational64,
}

/// One evaluated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub scheme: Scheme,
    pub users: usize,
    pub files: usize,
    pub level: Option<usize>,
    pub cache: Rational64,
    pub gamma: f64,
    pub uncached: Option<usize>,
    pub high_files: Option<usize>,
    pub average: f64,
    /// Set when the average is exact (point-mass profile or a
    /// demand-independent rate).
    pub exact: Option<Rational64>,
    pub per_k: Vec<KRate>,
    pub runtime_ms: f64,
}

pub const CSV_HEADER: &str = "scheme,K,N,t,M,gamma,N_r,avg_rate_num,avg_rate_den,avg_rate_float,runtime_ms";

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl RateReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.12},{:.3}",
            self.scheme,
            self.users,
            self.files,
            opt(self.level),
            self.cache,
            self.gamma,
            opt(self.uncached),
            opt(self.exact.map(|r| *r.numer())),
            opt(self.exact.map(|r| *r.denom())),
            self.average,
            self.runtime_ms
        )
    }
}

/// Reports as CSV text with header.
pub fn to_csv(reports: &[RateReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Average `Σ_k mass(k) R(k)` of a placement-based scheme over a profile.
pub fn average_over_profile(
    scheme: Scheme,
    level: usize,
    profile: &ProfileDistribution,
    cache: &mut RateCache,
) -> Result<(f64, Option<Rational64>, Vec<KRate>)> {
    let mut per_k = Vec::new();
    let mut avg = 0.0;
    for (k, mass) in profile.support() {
        let rate = cache.rate(scheme, level, k)?;
        avg += mass * rate.to_f64().unwrap_or(f64::NAN);
        per_k.push(KRate { k, mass, rate });
    }
    let exact = profile.point_mass().map(|k| per_k.iter().find(|r| r.k == k).expect("support").rate);
    Ok((avg, exact, per_k))
}

fn base_report(scheme: Scheme, cfg: &AnalysisConfig) -> RateReport {
    RateReport {
        scheme,
        users: cfg.users,
        files: cfg.files,
        level: Some(cfg.level),
        cache: cfg.cache,
        gamma: cfg.gamma,
        uncached: None,
        high_files: None,
        average: f64::NAN,
        exact: None,
        per_k: Vec::new(),
        runtime_ms: 0.0,
    }
}

/// Placement-based average at a fixed `N_r`.
fn average_at(
    scheme: Scheme,
    cfg: &AnalysisConfig,
    model: &PopularityModel,
    n_r: usize,
    cache: &mut RateCache,
) -> Result<RateReport> {
    if scheme == Scheme::Cl21 && n_r != 0 {
        return Err(Error::Unsupported("cl21 has no uncached files".into()));
    }
    let g = group_library(cfg.files, cfg.cache, cfg.level, n_r, cfg.users)?;
    let profile = profile_distribution(model, g.high_files, n_r, cfg.users)?;
    let (average, exact, per_k) = average_over_profile(scheme, cfg.level, &profile, cache)?;
    Ok(RateReport {
        uncached: Some(n_r),
        high_files: Some(g.high_files),
        average,
        exact,
        per_k,
        ..base_report(scheme, cfg)
    })
}

/// Average rate of `scheme` under Zipf(`cfg.gamma`) demand.
pub fn average_rate(scheme: Scheme, cfg: &AnalysisConfig, cache: &mut RateCache) -> Result<RateReport> {
    let start = Instant::now();
    let model = cfg.popularity()?;
    let mut report = average_rate_with(scheme, cfg, &model, cache)?;
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// [`average_rate`] with an explicit popularity model.
pub fn average_rate_with(
    scheme: Scheme,
    cfg: &AnalysisConfig,
    model: &PopularityModel,
    cache: &mut RateCache,
) -> Result<RateReport> {
    if model.files() != cfg.files {
        return Err(Error::InvalidArgument("popularity model does not match N".into()));
    }
    match scheme {
        Scheme::NaiveMs => {
            let r = naive_memory_sharing_rate(cfg.users, cfg.files, cfg.cache);
            Ok(RateReport {
                level: None,
                average: r.to_f64().unwrap_or(f64::NAN),
                exact: Some(r),
                ..base_report(scheme, cfg)
            })
        }
        Scheme::NaiveMsRemoval => {
            let (n_c, average) = best_removal(cfg.users, cfg.cache, model);
            Ok(RateReport {
                level: None,
                uncached: Some(cfg.files - n_c),
                average,
                ..base_report(scheme, cfg)
            })
        }
        Scheme::ClcdBest => clcd_best(cfg, model, cache),
        _ => average_at(scheme, cfg, model, cfg.uncached.unwrap_or(0), cache),
    }
}

/// Monte-Carlo estimate of the same average, for cross-checking.
pub fn monte_carlo_average<R: Rng + ?Sized>(
    scheme: Scheme,
    cfg: &AnalysisConfig,
    draws: usize,
    rng: &mut R,
    cache: &mut RateCache,
) -> Result<f64> {
    if !scheme.uses_placement() {
        return Err(Error::Unsupported(format!("{scheme} has no per-demand rate")));
    }
    let model = cfg.popularity()?;
    let n_r = cfg.uncached.unwrap_or(0);
    let g = group_library(cfg.files, cfg.cache, cfg.level, n_r, cfg.users)?;
    let counts = sample_profile(&model, g.high_files, n_r, cfg.users, draws, rng);
    let mut total = 0.0;
    for (k, n) in counts {
        total += n as f64 * cache.rate(scheme, cfg.level, k)?.to_f64().unwrap_or(f64::NAN);
    }
    Ok(total / draws as f64)
}

/// `[N_r^min, N_r^max]`: the smallest `N_r` that lets the remaining files
/// be cached at level 1, and the smallest that lets them all sit at level
/// `t`.
pub fn nr_range(users: usize, files: usize, cache: Rational64, level: usize) -> Result<(usize, usize)> {
    let mk = cache * Rational64::from_integer(users as i64);
    let n = Rational64::from_integer(files as i64);
    let clamp = |x: Rational64| (x.ceil().to_integer().max(0) as usize).min(files);
    let lo = clamp(n - mk);
    let hi = clamp(n - mk / Rational64::from_integer(level as i64));
    if lo > hi {
        return Err(Error::InvalidConfig(format!("empty N_r interval [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

/// Result of [`optimize_nr`].
#[derive(Clone, Debug, PartialEq)]
pub struct NrSearch {
    pub best: RateReport,
    /// `(N_r, average)` for every scanned value.
    pub scanned: Vec<(usize, f64)>,
}

/// Scan every `N_r` in [`nr_range`] and keep the lowest average (ties go to
/// the smaller `N_r`).
pub fn optimize_nr(scheme: Scheme, cfg: &AnalysisConfig, cache: &mut RateCache) -> Result<NrSearch> {
    let model = cfg.popularity()?;
    optimize_nr_with(scheme, cfg, &model, cache)
}

pub fn optimize_nr_with(
    scheme: Scheme,
    cfg: &AnalysisConfig,
    model: &PopularityModel,
    cache: &mut RateCache,
) -> Result<NrSearch> {
    if !scheme.uses_placement() {
        return Err(Error::Unsupported(format!("{scheme} does not place uncached files")));
    }
    let start = Instant::now();
    let (lo, hi) = if scheme == Scheme::Cl21 {
        (0, 0)
    } else {
        nr_range(cfg.users, cfg.files, cfg.cache, cfg.level)?
    };
    let mut best: Option<RateReport> = None;
    let mut scanned = Vec::with_capacity(hi - lo + 1);
    for n_r in lo..=hi {
        let r = average_at(scheme, cfg, model, n_r, cache)?;
        scanned.push((n_r, r.average));
        if best.as_ref().is_none_or(|b| r.average < b.average) {
            best = Some(r);
        }
    }
    let mut best = best.expect("non-empty range");
    best.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(NrSearch { best, scanned })
}

/// Levels tried by [`Scheme::ClcdBest`].
pub const BEST_LEVELS: std::ops::RangeInclusive<usize> = 2..=6;

fn clcd_best(cfg: &AnalysisConfig, model: &PopularityModel, cache: &mut RateCache) -> Result<RateReport> {
    let start = Instant::now();
    let mut best: Option<RateReport> = None;
    for t in BEST_LEVELS {
        if t >= cfg.users || !binomial(cfg.users as u64, t as u64).is_multiple_of(cfg.users as u64) {
            continue;
        }
        let c = cfg.clone().with_level(t);
        let r = optimize_nr_with(Scheme::ClTExact, &c, model, cache)?.best;
        if best.as_ref().is_none_or(|b| r.average < b.average) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or_else(|| Error::Unsupported(format!("no valid level for K = {}", cfg.users)))?;
    best.scheme = Scheme::ClcdBest;
    best.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(best)
}

/// Evaluate every `(scheme, gamma, M)` combination. Placement-based schemes
/// without a fixed `N_r` are optimised over it.
pub fn sweep(
    schemes: &[Scheme],
    base: &AnalysisConfig,
    gammas: &[f64],
    caches: &[Rational64],
    cache: &mut RateCache,
) -> Result<Vec<RateReport>> {
    let mut out = Vec::new();
    for &gamma in gammas {
        let model = crate::popularity::zipf(base.files, gamma)?;
        for &m in caches {
            let cfg = AnalysisConfig { gamma, cache: m, ..base.clone() };
            for &s in schemes {
                let start = Instant::now();
                let mut r = if s.uses_placement() && cfg.uncached.is_none() {
                    optimize_nr_with(s, &cfg, &model, cache)?.best
                } else {
                    average_rate_with(s, &cfg, &model, cache)?
                };
                r.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                out.push(r);
            }
        }
    }
    Ok(out)
}
