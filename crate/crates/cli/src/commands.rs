use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clcd_core::analysis::{
    average_rate, monte_carlo_average, optimize_nr, sweep, to_csv, RateCache, Scheme, CSV_HEADER,
};
use clcd_core::delivery_cl2;
use clcd_core::delivery_general::{build_schedule_general, Solver};
use clcd_core::oracle::{audit_schedule, conventional_schedule, simulate, OracleOptions};
use clcd_core::popularity::zipf;
use clcd_core::placement::build_placement_by_id;
use clcd_core::{DeliverySchedule, DemandClassification, LibraryConfig, PlacementSpec, Rational64};

use crate::config::Params;

/// Output of a command: text for stdout, notes for stderr, and whether a
/// verification failed.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub notes: String,
    pub failed: bool,
}

pub fn placement(p: &Params) -> Result<PlacementSpec> {
    let cfg = LibraryConfig::with_cache(p.users, p.files, p.level, p.cache, p.uncached.unwrap_or(0))?
        .with_gamma(p.gamma);
    Ok(build_placement_by_id(&cfg)?)
}

pub fn place(p: &Params) -> Result<Output> {
    let spec = placement(p)?;
    let c = spec.config();
    let notes = format!(
        "K={} N={} t={} M={} N_h={} N_l={} N_r={} slack={}\n",
        c.users(),
        c.files(),
        c.level(),
        c.cache(),
        c.high_files(),
        c.low_files(),
        c.uncached_files(),
        c.slack()
    );
    Ok(Output { stdout: spec.export(), notes, failed: false })
}

pub fn schedule_for(scheme: Scheme, spec: &PlacementSpec, class: &DemandClassification) -> Result<DeliverySchedule> {
    Ok(match scheme {
        Scheme::Cl21 => {
            if spec.config().uncached_files() != 0 {
                bail!("cl21 needs N_r = 0");
            }
            delivery_cl2::build_schedule(spec, class)?
        }
        Scheme::Cl210 => delivery_cl2::build_schedule(spec, class)?,
        Scheme::ClTExact => build_schedule_general(spec, class, Solver::Exact)?.0,
        Scheme::ClTGreedy => build_schedule_general(spec, class, Solver::Greedy)?.0,
        Scheme::Conventional => conventional_schedule(spec, class)?,
        other => bail!("{other} has no constructed schedule"),
    })
}

fn verify_one(spec: &PlacementSpec, class: &DemandClassification, sched: &DeliverySchedule, seed: u64) -> Option<String> {
    if let Err(e) = audit_schedule(spec, class, sched) {
        return Some(format!("audit: {e}"));
    }
    simulate(spec, class, sched, OracleOptions::seeded(seed)).err().map(|e| e.to_string())
}

pub fn deliver(p: &Params, demand: &[u32], check: bool) -> Result<Output> {
    let spec = placement(p)?;
    let class = spec.classify(demand)?;
    let scheme = p.delivery_scheme();
    let sched = schedule_for(scheme, &spec, &class)?;
    let steps = sched.step_counts();
    let mut notes = format!(
        "scheme={scheme} k=[{},{},{}] messages={} unicasts={} rate={} steps={steps:?}{}\n",
        class.high.len(),
        class.low.len(),
        class.zero.len(),
        sched.message_count(),
        sched.zero_level_unicasts.len(),
        sched.rate(),
        if sched.fallback { " fallback" } else { "" }
    );
    let mut failed = false;
    if check {
        match verify_one(&spec, &class, &sched, 0) {
            None => notes.push_str("verified: all users decode\n"),
            Some(e) => {
                failed = true;
                let _ = writeln!(notes, "verification failed: {e}");
            }
        }
    }
    Ok(Output { stdout: sched.dump(), notes, failed })
}

/// Random Zipf demands, one per seed; or a dumped schedule checked
/// against a given demand.
pub fn verify(p: &Params, seeds: std::ops::Range<u64>, schedule: Option<(&Path, &[u32])>) -> Result<Output> {
    let spec = placement(p)?;
    let scheme = p.delivery_scheme();
    let mut out = Output { stdout: "seed,demand,messages,rate,status\n".into(), ..Default::default() };
    let mut row = |seed: u64, demand: &[u32], sched: &DeliverySchedule, class: &DemandClassification| {
        let status = verify_one(&spec, class, sched, seed);
        out.failed |= status.is_some();
        let d: Vec<String> = demand.iter().map(u32::to_string).collect();
        let _ = writeln!(
            out.stdout,
            "{seed},{},{},{},{}",
            d.join(" "),
            sched.message_count(),
            sched.rate(),
            status.as_deref().map_or("ok".to_string(), |e| format!("FAIL: {}", e.replace(',', ";")))
        );
    };
    if let Some((path, demand)) = schedule {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let sched = DeliverySchedule::parse_dump(&text)?;
        let class = spec.classify(demand)?;
        for seed in seeds {
            row(seed, demand, &sched, &class);
        }
    } else {
        let model = zipf(p.files, p.gamma)?;
        for seed in seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let demand: Vec<u32> = (0..p.users).map(|_| model.sample(&mut rng)).collect();
            let class = spec.classify(&demand)?;
            let sched = schedule_for(scheme, &spec, &class)?;
            row(seed, &demand, &sched, &class);
        }
    }
    out.notes = if out.failed { "verification failed\n".into() } else { "all schedules verified\n".into() };
    Ok(out)
}

pub fn rate(p: &Params, monte_carlo: Option<usize>) -> Result<Output> {
    let scheme = p.scheme.unwrap_or(Scheme::ClcdBest);
    let cfg = p.analysis();
    let mut cache = RateCache::new();
    let report = average_rate(scheme, &cfg, &mut cache)?;
    let mut notes = String::new();
    for k in &report.per_k {
        let _ = writeln!(notes, "k=[{},{},{}] mass={:.6e} rate={}", k.k[0], k.k[1], k.k[2], k.mass, k.rate);
    }
    if let Some(draws) = monte_carlo {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mc = monte_carlo_average(scheme, &cfg, draws, &mut rng, &mut cache)?;
        let _ = writeln!(notes, "monte_carlo({draws})={mc:.6} analytic={:.6}", report.average);
    }
    Ok(Output { stdout: to_csv(&[report]), notes, failed: false })
}

pub fn sweep_cmd(p: &Params, schemes: &[Scheme], gammas: &[f64], caches: &[Rational64]) -> Result<Output> {
    let mut cache = RateCache::new();
    let reports = sweep(schemes, &p.analysis(), gammas, caches, &mut cache)?;
    Ok(Output { stdout: to_csv(&reports), ..Default::default() })
}

pub fn optimize(p: &Params) -> Result<Output> {
    let scheme = p.scheme.unwrap_or(p.delivery_scheme());
    let mut cfg = p.analysis();
    cfg.uncached = None;
    let mut cache = RateCache::new();
    let search = optimize_nr(scheme, &cfg, &mut cache)?;
    let mut notes = String::from("N_r,avg_rate\n");
    for (n, r) in &search.scanned {
        let _ = writeln!(notes, "{n},{r:.12}");
    }
    Ok(Output { stdout: format!("{CSV_HEADER}\n{}\n", search.best.csv_row()), notes, failed: false })
}
