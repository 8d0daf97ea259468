//! General CL(t,1,0) delivery.
//!
//! A level-`t` multicast message over a `(t+1)`-set `S` that contains both
//! high- and low-level users can be split into `μ_S = |K^h ∩ S|` two-part
//! messages, each pairing one high-level user's subfile with a subfile a
//! low-level user in `S` is missing and the high-level user owns. Choosing
//! which sets to split is the binary program solved here (exactly by
//! branch-and-bound or greedily); [`assemble_schedule_general`] turns a
//! solution into a schedule.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::placement::{DemandClassification, PlacementSpec};
use crate::schedule::{DeliverySchedule, MulticastMessage};
use crate::sets::{binomial, k_subsets, user_range, SubfileLabel, UserId, UserSet};

/// Default branch-and-bound node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

/// All `(t+1)`-subsets with at least one high- and one low-level user, in
/// lexicographic order.
pub fn enumerate_decomposable(class: &DemandClassification, level: usize) -> Vec<UserSet> {
    let high: UserSet = class.high.iter().copied().collect();
    let low: UserSet = class.low.iter().copied().collect();
    k_subsets(&user_range(class.users()), level + 1)
        .into_iter()
        .filter(|s| !s.intersection(high).is_empty() && !s.intersection(low).is_empty())
        .collect()
}

/// A solution of the decomposition program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionVars {
    /// Sets with `x_S = 1`, in lexicographic order.
    pub chosen: Vec<UserSet>,
    /// `(S, i, j)` with `x_(S,i,j) = 1`: high user `i` of `S` is paired
    /// with low user `j` of `S`.
    pub assignments: Vec<(UserSet, UserId, UserId)>,
    /// Per-(high, low) pair limit `C(K-1,t-1)/t`.
    pub capacity: usize,
    /// False when the exact search ran out of budget.
    pub optimal: bool,
    pub nodes: u64,
}

impl DecompositionVars {
    pub fn empty(capacity: usize) -> Self {
        DecompositionVars { chosen: Vec::new(), assignments: Vec::new(), capacity, optimal: true, nodes: 0 }
    }

    pub fn objective(&self) -> usize {
        self.chosen.len()
    }

    /// Check the program's constraints: at most one low partner per
    /// `(S, i)`, at most `capacity` uses per `(i, j)`, and exactly `μ_S`
    /// assignments for each chosen set (none for the others).
    pub fn audit(&self, candidates: &[UserSet], class: &DemandClassification) -> Result<()> {
        let fail = |m: String| Err(Error::Construction(format!("constraint audit: {m}")));
        let high: UserSet = class.high.iter().copied().collect();
        let low: UserSet = class.low.iter().copied().collect();
        let mut per_set: HashMap<UserSet, Vec<UserId>> = HashMap::new();
        let mut per_pair: HashMap<(UserId, UserId), usize> = HashMap::new();
        for &(s, i, j) in &self.assignments {
            if !self.chosen.contains(&s) {
                return fail(format!("assignment on unchosen set {s}"));
            }
            if !s.contains(i) || !high.contains(i) || !s.contains(j) || !low.contains(j) {
                return fail(format!("bad assignment ({s}, {i}, {j})"));
            }
            per_set.entry(s).or_default().push(i);
            *per_pair.entry((i, j)).or_default() += 1;
        }
        for s in &self.chosen {
            if !candidates.contains(s) {
                return fail(format!("{s} is not decomposable"));
            }
            let mut got = per_set.remove(s).unwrap_or_default();
            got.sort_unstable();
            let want = s.intersection(high).to_vec();
            if got != want {
                return fail(format!("set {s} covers high users {got:?}, expected {want:?}"));
            }
        }
        if let Some(((i, j), c)) = per_pair.iter().find(|(_, &c)| c > self.capacity) {
            return fail(format!("pair ({i},{j}) used {c} times, capacity {}", self.capacity));
        }
        Ok(())
    }
}

/// One branch-and-bound event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub node: u64,
    pub depth: usize,
    pub bound: usize,
    pub incumbent: usize,
}

/// Trace as `node,depth,bound,incumbent` lines.
pub fn export_trace(trace: &[TraceEvent]) -> String {
    let mut s = String::from("node,depth,bound,incumbent\n");
    for e in trace {
        let _ = writeln!(s, "{},{},{},{}", e.node, e.depth, e.bound, e.incumbent);
    }
    s
}

struct Candidate {
    set: UserSet,
    high: Vec<usize>,
    low: Vec<usize>,
    mu: usize,
}

/// The program in index form: high users `0..nh`, low users `0..nl`.
struct Instance {
    cands: Vec<Candidate>,
    high_ids: Vec<UserId>,
    low_ids: Vec<UserId>,
    cap: usize,
}

impl Instance {
    fn new(candidates: &[UserSet], class: &DemandClassification, cap: usize) -> Self {
        let hpos: BTreeMap<UserId, usize> = class.high.iter().enumerate().map(|(p, &u)| (u, p)).collect();
        let lpos: BTreeMap<UserId, usize> = class.low.iter().enumerate().map(|(p, &u)| (u, p)).collect();
        let cands = candidates
            .iter()
            .map(|&set| {
                let high: Vec<usize> = set.iter().filter_map(|u| hpos.get(&u).copied()).collect();
                let low: Vec<usize> = set.iter().filter_map(|u| lpos.get(&u).copied()).collect();
                Candidate { set, mu: high.len(), high, low }
            })
            .collect();
        Instance { cands, high_ids: class.high.clone(), low_ids: class.low.clone(), cap }
    }

    fn vars(&self, state: &AssignState, optimal: bool, nodes: u64) -> DecompositionVars {
        let mut chosen = Vec::new();
        let mut assignments = Vec::new();
        for (c, cand) in self.cands.iter().enumerate() {
            if !state.chosen[c] {
                continue;
            }
            chosen.push(cand.set);
            for &h in &cand.high {
                let j = state.partner[h][&c];
                assignments.push((cand.set, self.high_ids[h], self.low_ids[j]));
            }
        }
        chosen.sort();
        assignments.sort();
        DecompositionVars { chosen, assignments, capacity: self.cap, optimal, nodes }
    }
}

/// Per high user bipartite assignment of chosen candidates to low users.
#[derive(Clone)]
struct AssignState {
    chosen: Vec<bool>,
    /// `partner[h][candidate] = low index`.
    partner: Vec<HashMap<usize, usize>>,
    /// `holders[h][j]` = candidates of `h` currently paired with `j`.
    holders: Vec<Vec<Vec<usize>>>,
}


/// Per-high-user state saved before a tentative addition.
type Saved = (usize, HashMap<usize, usize>, Vec<Vec<usize>>);

impl AssignState {
    fn new(inst: &Instance) -> Self {
        let nh = inst.high_ids.len();
        let nl = inst.low_ids.len();
        AssignState {
            chosen: vec![false; inst.cands.len()],
            partner: vec![HashMap::new(); nh],
            holders: vec![vec![Vec::new(); nl]; nh],
        }
    }

    fn load(&self, h: usize) -> usize {
        self.partner[h].len()
    }

    /// Augmenting-path insertion of candidate `c` into high user `h`'s
    /// assignment.
    fn augment(&mut self, inst: &Instance, h: usize, c: usize, seen: &mut [bool]) -> bool {
        for &j in &inst.cands[c].low {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if self.holders[h][j].len() < inst.cap {
                self.holders[h][j].push(c);
                self.partner[h].insert(c, j);
                return true;
            }
            for pos in 0..self.holders[h][j].len() {
                let other = self.holders[h][j][pos];
                if self.augment(inst, h, other, seen) {
                    self.holders[h][j][pos] = c;
                    self.partner[h].insert(c, j);
                    return true;
                }
            }
        }
        false
    }

    /// Try to add candidate `c`; on failure the state is unchanged.
    fn try_add(&mut self, inst: &Instance, c: usize) -> bool {
        let nl = inst.low_ids.len();
        let saved: Vec<Saved> = inst.cands[c]
            .high
            .iter()
            .map(|&h| (h, self.partner[h].clone(), self.holders[h].clone()))
            .collect();
        for &h in &inst.cands[c].high {
            let mut seen = vec![false; nl];
            if !self.augment(inst, h, c, &mut seen) {
                for (h, p, hold) in saved {
                    self.partner[h] = p;
                    self.holders[h] = hold;
                }
                return false;
            }
        }
        self.chosen[c] = true;
        true
    }

    fn remove(&mut self, inst: &Instance, c: usize) {
        for &h in &inst.cands[c].high {
            if let Some(j) = self.partner[h].remove(&c) {
                self.holders[h][j].retain(|&x| x != c);
            }
        }
        self.chosen[c] = false;
    }
}

/// Greedy decomposition: candidates in descending `μ_S` (ties in
/// lexicographic order); a set is split when every high user in it can be
/// paired with a low user of the set with spare capacity, choosing the low
/// user with the most spare capacity (smallest id on ties).
pub fn solve_p1_greedy(
    candidates: &[UserSet],
    class: &DemandClassification,
    capacity: usize,
) -> DecompositionVars {
    let inst = Instance::new(candidates, class, capacity);
    let mut order: Vec<usize> = (0..inst.cands.len()).collect();
    order.sort_by(|&a, &b| {
        inst.cands[b].mu.cmp(&inst.cands[a].mu).then(inst.cands[a].set.cmp(&inst.cands[b].set))
    });
    greedy_in_order(&inst, &order)
}

fn greedy_in_order(inst: &Instance, order: &[usize]) -> DecompositionVars {
    let mut state = AssignState::new(inst);
    for &c in order {
        let picks: Option<Vec<(usize, usize)>> = inst.cands[c]
            .high
            .iter()
            .map(|&h| {
                inst.cands[c]
                    .low
                    .iter()
                    .map(|&j| (inst.cap - state.holders[h][j].len().min(inst.cap), j))
                    .filter(|&(r, _)| r > 0)
                    .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
                    .map(|(_, j)| (h, j))
            })
            .collect();
        if let Some(picks) = picks {
            for (h, j) in picks {
                state.holders[h][j].push(c);
                state.partner[h].insert(c, j);
            }
            state.chosen[c] = true;
        }
    }
    inst.vars(&state, false, 0)
}

/// Options for [`solve_p1_exact`].
#[derive(Clone, Copy, Debug)]
pub struct ExactOptions {
    pub node_budget: u64,
    pub trace: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { node_budget: DEFAULT_NODE_BUDGET, trace: false }
    }
}

/// Exact maximisation of the number of split sets.
pub fn solve_p1_exact(
    candidates: &[UserSet],
    class: &DemandClassification,
    capacity: usize,
) -> DecompositionVars {
    solve_p1_exact_with(candidates, class, capacity, ExactOptions::default()).0
}

/// Depth-first branch-and-bound over `x_S` (trying `x_S = 1` first).
///
/// Candidates are ordered by `μ_S` ascending, then by number of low users,
/// then lexicographically. Feasibility of a partial selection is kept by
/// per-high-user augmenting paths. The bound gives each high user `i` its
/// remaining capacity `R_i` and credits `1/μ_S` for each of the `R_i`
/// cheapest remaining sets containing `i`.
pub fn solve_p1_exact_with(
    candidates: &[UserSet],
    class: &DemandClassification,
    capacity: usize,
    opts: ExactOptions,
) -> (DecompositionVars, Vec<TraceEvent>) {
    let inst = Instance::new(candidates, class, capacity);
    let n = inst.cands.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&inst.cands[a], &inst.cands[b]);
        ca.mu.cmp(&cb.mu).then(ca.low.len().cmp(&cb.low.len())).then(ca.set.cmp(&cb.set))
    });

    let mut desc = order.clone();
    desc.sort_by(|&a, &b| {
        inst.cands[b].mu.cmp(&inst.cands[a].mu).then(inst.cands[a].set.cmp(&inst.cands[b].set))
    });
    let g1 = greedy_in_order(&inst, &desc);
    let g2 = greedy_in_order(&inst, &order);
    let mut best = if g2.objective() > g1.objective() { g2 } else { g1 };

    if capacity == 0 || n == 0 {
        best.optimal = true;
        return (best, Vec::new());
    }

    let nh = inst.high_ids.len();
    // positions (in `order`) of candidates containing each high user
    let mut by_high: Vec<Vec<usize>> = vec![Vec::new(); nh];
    for (pos, &c) in order.iter().enumerate() {
        for &h in &inst.cands[c].high {
            by_high[h].push(pos);
        }
    }
    let unit = (1..=nh.max(1)).fold(1usize, lcm);
    let mut search = Search {
        inst: &inst,
        order: &order,
        by_high: &by_high,
        unit,
        state: AssignState::new(&inst),
        count: 0,
        best_count: best.objective(),
        best_state: None,
        nodes: 0,
        budget: opts.node_budget,
        exhausted: false,
        trace: opts.trace.then(Vec::new),
    };
    search.dfs(0);
    let nodes = search.nodes;
    let optimal = !search.exhausted;
    let trace = search.trace.take().unwrap_or_default();
    if let Some(state) = search.best_state.take() {
        best = inst.vars(&state, optimal, nodes);
    } else {
        best.optimal = optimal;
        best.nodes = nodes;
    }
    (best, trace)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

struct Search<'a> {
    inst: &'a Instance,
    order: &'a [usize],
    by_high: &'a [Vec<usize>],
    unit: usize,
    state: AssignState,
    count: usize,
    best_count: usize,
    best_state: Option<AssignState>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    trace: Option<Vec<TraceEvent>>,
}

impl Search<'_> {
    fn bound(&self, pos: usize) -> usize {
        let remaining = self.order.len() - pos;
        let nl = self.inst.low_ids.len();
        let mut credit = 0usize;
        for (h, list) in self.by_high.iter().enumerate() {
            let spare = (self.inst.cap * nl).saturating_sub(self.state.load(h));
            let start = list.partition_point(|&p| p < pos);
            credit += list[start..]
                .iter()
                .take(spare)
                .map(|&p| self.unit / self.inst.cands[self.order[p]].mu)
                .sum::<usize>();
        }
        self.count + remaining.min(credit / self.unit)
    }

    fn dfs(&mut self, pos: usize) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if self.count > self.best_count {
            self.best_count = self.count;
            self.best_state = Some(self.state.clone());
        }
        if pos == self.order.len() {
            return;
        }
        let bound = self.bound(pos);
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEvent { node: self.nodes, depth: pos, bound, incumbent: self.best_count });
        }
        if bound <= self.best_count {
            return;
        }
        let c = self.order[pos];
        if self.state.try_add(self.inst, c) {
            self.count += 1;
            self.dfs(pos + 1);
            self.count -= 1;
            self.state.remove(self.inst, c);
        }
        self.dfs(pos + 1);
    }
}

/// Number of messages of the general scheme for split count `objective`.
pub fn message_count_general(k: [usize; 3], users: usize, level: usize, objective: usize) -> u64 {
    let [kh, kl, kr] = k;
    let (kk, t) = (users as u64, level as u64);
    let c = binomial(kk - 1, t - 1) / t;
    let (kh, kl, kr) = (kh as u64, kl as u64, kr as u64);
    binomial(kk, t + 1) - binomial(kr + kl, t + 1) - objective as u64
        + c * (kh * kl + kr * kl + binomial(kl, 2))
}

/// `N_T / C(K,t) + k^r`.
pub fn rate_general(k: [usize; 3], users: usize, level: usize, objective: usize) -> Rational64 {
    Rational64::new(
        message_count_general(k, users, level, objective) as i64,
        binomial(users as u64, level as u64) as i64,
    ) + Rational64::from_integer(k[2] as i64)
}

/// Build the schedule for a decomposition: undecomposed multicasts, split
/// cross-level pairs, low-low pairs, then unicasts of everything left.
pub fn assemble_schedule_general(
    placement: &PlacementSpec,
    class: &DemandClassification,
    vars: &DecompositionVars,
) -> Result<DeliverySchedule> {
    let cfg = placement.config();
    let (users, t) = (cfg.users(), cfg.level());
    if class.users() != users {
        return Err(Error::InvalidArgument("demand does not match placement".into()));
    }
    let own = placement.ownership();
    let high: UserSet = class.high.iter().copied().collect();
    let mut sched = DeliverySchedule::new(users, t);
    let split: BTreeMap<UserSet, Vec<(UserId, UserId)>> = vars.chosen.iter().map(|&s| (s, Vec::new())).collect();
    let mut split = split;
    for &(s, i, j) in &vars.assignments {
        split
            .get_mut(&s)
            .ok_or_else(|| Error::Construction(format!("assignment for unchosen set {s}")))?
            .push((i, j));
    }
    let wanted = |i: UserId, s: UserSet| SubfileLabel::new(class.file_of(i), s.without(i));

    for s in k_subsets(&user_range(users), t + 1) {
        let hs = s.intersection(high);
        if hs.is_empty() || split.contains_key(&s) {
            continue;
        }
        let parts = hs.iter().map(|i| wanted(i, s)).collect();
        sched.messages.push(MulticastMessage::new(1, parts, hs.to_vec()));
    }

    // pool of d_j subfiles owned by high user i
    let mut pools: HashMap<(UserId, UserId), VecDeque<SubfileLabel>> = HashMap::new();
    for &i in &class.high {
        for &j in &class.low {
            let f = class.file_of(j);
            pools.insert((i, j), own.owned_by(i).iter().map(|&x| SubfileLabel::new(f, x)).collect());
        }
    }
    for (s, pairs) in &split {
        let mut pairs = pairs.clone();
        pairs.sort_unstable();
        for (i, j) in pairs {
            let extra = pools
                .get_mut(&(i, j))
                .and_then(VecDeque::pop_front)
                .ok_or_else(|| Error::Construction(format!("pairing pool ({i},{j}) exhausted")))?;
            sched.messages.push(MulticastMessage::new(3, vec![wanted(i, *s), extra], vec![i, j]));
        }
    }

    for (a, &j) in class.low.iter().enumerate() {
        for &k in &class.low[a + 1..] {
            for (&x, &y) in own.owned_by(k).iter().zip(own.owned_by(j)) {
                let parts = vec![SubfileLabel::new(class.file_of(j), x), SubfileLabel::new(class.file_of(k), y)];
                sched.messages.push(MulticastMessage::new(2, parts, vec![j, k]));
            }
        }
    }

    for &j in &class.low {
        for &i in &class.high {
            for l in pools.remove(&(i, j)).unwrap_or_default() {
                sched.messages.push(MulticastMessage::new(5, vec![l], vec![j]));
            }
        }
        for &z in &class.zero {
            for &x in own.owned_by(z) {
                sched.messages.push(MulticastMessage::new(5, vec![SubfileLabel::new(class.file_of(j), x)], vec![j]));
            }
        }
    }
    for &z in &class.zero {
        sched.zero_level_unicasts.push((z, class.file_of(z)));
    }
    Ok(sched)
}

/// Which solver to use for the decomposition program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Exact,
    Greedy,
    /// No decomposition: plain level-`t` delivery.
    None,
}

/// Solve the decomposition program and assemble the schedule.
pub fn build_schedule_general(
    placement: &PlacementSpec,
    class: &DemandClassification,
    solver: Solver,
) -> Result<(DeliverySchedule, DecompositionVars)> {
    let t = placement.config().level();
    let cap = placement.config().owned_per_user() as usize;
    let cands = enumerate_decomposable(class, t);
    let vars = match solver {
        Solver::Exact => solve_p1_exact(&cands, class, cap),
        Solver::Greedy => solve_p1_greedy(&cands, class, cap),
        Solver::None => DecompositionVars::empty(cap),
    };
    vars.audit(&cands, class)?;
    let sched = assemble_schedule_general(placement, class, &vars)?;
    Ok((sched, vars))
}

/// Classification with users `1..=k^h` high, then low, then zero.
pub fn canonical_classification(k: [usize; 3]) -> DemandClassification {
    let [kh, kl, kr] = k;
    let ids = |a: usize, b: usize| (a as UserId + 1..=b as UserId).collect::<Vec<_>>();
    let users = kh + kl + kr;
    DemandClassification {
        demand: (1..=users as u32).collect(),
        high: ids(0, kh),
        low: ids(kh, kh + kl),
        zero: ids(kh + kl, users),
    }
}

/// Split count of the chosen solver for a canonical demand with counts `k`.
pub fn objective_for_counts(k: [usize; 3], level: usize, solver: Solver) -> Result<DecompositionVars> {
    let users = k.iter().sum::<usize>();
    if level < 1 || level >= users {
        return Err(Error::InvalidArgument(format!("t = {level} outside 1..{users}")));
    }
    let cap = (binomial(users as u64 - 1, level as u64 - 1) / level as u64) as usize;
    let class = canonical_classification(k);
    let cands = enumerate_decomposable(&class, level);
    let vars = match solver {
        Solver::Exact => solve_p1_exact(&cands, &class, cap),
        Solver::Greedy => solve_p1_greedy(&cands, &class, cap),
        Solver::None => DecompositionVars::empty(cap),
    };
    vars.audit(&cands, &class)?;
    Ok(vars)
}
