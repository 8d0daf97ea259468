//! Matchings, factorizations and cycle decompositions of complete graphs.
//!
//! All constructions work on arbitrary user-id sets: ids are mapped to
//! positions `0..n` by sorted order, the construction runs on positions and
//! the result is mapped back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::sets::UserId;

/// An unordered pair of distinct users, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pairing {
    a: UserId,
    b: UserId,
}

impl Pairing {
    pub fn new(x: UserId, y: UserId) -> Result<Self> {
        if x == y {
            return Err(Error::InvalidArgument(format!("degenerate pairing {{{x},{x}}}")));
        }
        Ok(Self::of(x, y))
    }

    pub(crate) fn of(x: UserId, y: UserId) -> Self {
        debug_assert_ne!(x, y);
        Pairing { a: x.min(y), b: x.max(y) }
    }

    pub fn a(&self) -> UserId {
        self.a
    }

    pub fn b(&self) -> UserId {
        self.b
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.a == u || self.b == u
    }

    /// The endpoint that is not `u`.
    pub fn other(&self, u: UserId) -> Option<UserId> {
        if u == self.a {
            Some(self.b)
        } else if u == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

impl fmt::Debug for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A (perfect or near-perfect) matching of a ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSet {
    pub pairs: Vec<Pairing>,
    pub ground: Vec<UserId>,
}

impl PartitionSet {
    /// Ground elements not covered by any pair.
    pub fn uncovered(&self) -> Vec<UserId> {
        self.ground
            .iter()
            .copied()
            .filter(|&u| !self.pairs.iter().any(|p| p.contains(u)))
            .collect()
    }

    pub fn is_perfect(&self) -> bool {
        2 * self.pairs.len() == self.ground.len()
    }

    /// Pairs as a sorted set, for order-insensitive comparisons.
    pub fn pair_set(&self) -> BTreeSet<Pairing> {
        self.pairs.iter().copied().collect()
    }
}

/// A multiset of pairings with per-user degrees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairingPlan {
    pairs: Vec<Pairing>,
}

impl PairingPlan {
    pub fn from_pairs(pairs: Vec<Pairing>) -> Self {
        PairingPlan { pairs }
    }

    pub fn pairs(&self) -> &[Pairing] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, p: Pairing) {
        self.pairs.push(p);
    }

    pub fn extend<I: IntoIterator<Item = Pairing>>(&mut self, it: I) {
        self.pairs.extend(it);
    }

    pub fn degree(&self, u: UserId) -> usize {
        self.pairs.iter().filter(|p| p.contains(u)).count()
    }

    pub fn degrees(&self) -> BTreeMap<UserId, usize> {
        let mut m = BTreeMap::new();
        for p in &self.pairs {
            *m.entry(p.a).or_insert(0) += 1;
            *m.entry(p.b).or_insert(0) += 1;
        }
        m
    }
}

fn sorted_ground(users: &[UserId]) -> Result<Vec<UserId>> {
    let mut g = users.to_vec();
    g.sort_unstable();
    let before = g.len();
    g.dedup();
    if g.len() != before {
        return Err(Error::InvalidArgument("duplicate user ids in ground set".into()));
    }
    Ok(g)
}

/// Above this size the lexicographic search is replaced by the circle method.
const LEXICOGRAPHIC_LIMIT: usize = 24;
const LEXICOGRAPHIC_BUDGET: usize = 200_000;

/// Partition the edges of the complete graph on `users` (even size) into
/// `|users| - 1` perfect matchings.
///
/// Up to 24 vertices each round takes the lexicographically first perfect
/// matching of the remaining edges, which reproduces the canonical small
/// factorizations (e.g. `{12,34},{13,24},{14,23}`); larger grounds use the
/// circle method.
pub fn one_factorization(users: &[UserId]) -> Result<Vec<PartitionSet>> {
    let ground = sorted_ground(users)?;
    let n = ground.len();
    if n % 2 == 1 {
        return Err(Error::OddGround(n));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("one_factorization needs at least 2 users".into()));
    }
    let rounds = (n <= LEXICOGRAPHIC_LIMIT)
        .then(|| lexicographic_rounds(n))
        .flatten()
        .unwrap_or_else(|| circle_rounds(n));
    Ok(rounds
        .into_iter()
        .map(|r| PartitionSet {
            pairs: r.into_iter().map(|(x, y)| Pairing::of(ground[x], ground[y])).collect(),
            ground: ground.clone(),
        })
        .collect())
}

fn circle_rounds(n: usize) -> Vec<Vec<(usize, usize)>> {
    let m = n - 1;
    (0..m)
        .map(|r| {
            let mut round = vec![(r, m)];
            for a in 1..=(m - 1) / 2 {
                round.push(((r + m - a) % m, (r + a) % m));
            }
            round.sort_by_key(|&(x, y)| x.min(y));
            round.into_iter().map(|(x, y)| (x.min(y), x.max(y))).collect()
        })
        .collect()
}

fn lexicographic_rounds(n: usize) -> Option<Vec<Vec<(usize, usize)>>> {
    let mut used = vec![vec![false; n]; n];
    let mut rounds = Vec::with_capacity(n - 1);
    for _ in 0..n - 1 {
        let mut matched = vec![false; n];
        let mut round = Vec::with_capacity(n / 2);
        let mut budget = LEXICOGRAPHIC_BUDGET;
        if !first_matching(&used, &mut matched, &mut round, &mut budget) {
            return None;
        }
        for &(x, y) in &round {
            used[x][y] = true;
            used[y][x] = true;
        }
        rounds.push(round);
    }
    Some(rounds)
}

fn first_matching(
    used: &[Vec<bool>],
    matched: &mut [bool],
    round: &mut Vec<(usize, usize)>,
    budget: &mut usize,
) -> bool {
    let Some(x) = matched.iter().position(|&m| !m) else {
        return true;
    };
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    matched[x] = true;
    for y in x + 1..matched.len() {
        if matched[y] || used[x][y] {
            continue;
        }
        matched[y] = true;
        round.push((x, y));
        if first_matching(used, matched, round, budget) {
            return true;
        }
        round.pop();
        matched[y] = false;
    }
    matched[x] = false;
    false
}

/// For each user `i` of an odd ground set, the maximum matching `M_(i)`
/// omitting `i`, built with the circle method. Pairs of `M_(i)` are listed in
/// order of their distance `a = 1..(n-1)/2` from `i`.
pub fn near_one_factorization(users: &[UserId]) -> Result<BTreeMap<UserId, PartitionSet>> {
    let ground = sorted_ground(users)?;
    let n = ground.len();
    if n % 2 == 0 || n < 3 {
        return Err(Error::EvenGround(n));
    }
    let mut out = BTreeMap::new();
    for p in 0..n {
        let pairs = (1..=(n - 1) / 2)
            .map(|a| Pairing::of(ground[(p + n - a) % n], ground[(p + a) % n]))
            .collect();
        out.insert(ground[p], PartitionSet { pairs, ground: ground.clone() });
    }
    Ok(out)
}

/// Union of the first `n` matchings of [`one_factorization`]; every user ends
/// up with degree `n`.
pub fn build_q_even_ground(users: &[UserId], n: usize) -> Result<PairingPlan> {
    if users.len() % 2 == 1 {
        return Err(Error::OddGround(users.len()));
    }
    if users.is_empty() {
        if n == 0 {
            return Ok(PairingPlan::default());
        }
        return Err(Error::InvalidArgument(format!("degree {n} on an empty ground set")));
    }
    if n > users.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "degree {n} exceeds {} on {} users",
            users.len() - 1,
            users.len()
        )));
    }
    let f = one_factorization(users)?;
    Ok(PairingPlan::from_pairs(f.into_iter().take(n).flat_map(|m| m.pairs).collect()))
}

/// Near-1-factorization of an odd ground set together with the pivot
/// matching used to combine pairs of near-perfect matchings.
///
/// The pivot is the largest id; its matching `M_(pivot)` is a perfect
/// matching of the remaining users, and for each of its pairs `{i,k}` the set
/// `M_(i) ∪ M_(k) ∪ {{i,k}}` gives every user degree 2.
#[derive(Clone, Debug)]
pub struct OddGroundMatchings {
    near: BTreeMap<UserId, PartitionSet>,
    pivot: UserId,
}

impl OddGroundMatchings {
    pub fn new(users: &[UserId]) -> Result<Self> {
        let near = near_one_factorization(users)?;
        let pivot = *near.keys().next_back().expect("non-empty");
        Ok(OddGroundMatchings { near, pivot })
    }

    pub fn pivot(&self) -> UserId {
        self.pivot
    }

    pub fn pivot_pairs(&self) -> &[Pairing] {
        &self.near[&self.pivot].pairs
    }

    /// `M_(u)`, the matching that omits `u`.
    pub fn omitting(&self, u: UserId) -> &PartitionSet {
        &self.near[&u]
    }

    pub fn ground(&self) -> &[UserId] {
        &self.near[&self.pivot].ground
    }

    /// Degree-`n_even` plan built from the first `n_even / 2` pivot pairs.
    pub fn q_even(&self, n_even: usize) -> Result<PairingPlan> {
        if n_even % 2 == 1 {
            return Err(Error::InvalidArgument(format!("n_even = {n_even} is odd")));
        }
        if n_even > self.ground().len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "n_even = {n_even} exceeds {}",
                self.ground().len() - 1
            )));
        }
        let mut plan = PairingPlan::default();
        for p in &self.pivot_pairs()[..n_even / 2] {
            plan.extend(self.near[&p.a].pairs.iter().copied());
            plan.extend(self.near[&p.b].pairs.iter().copied());
            plan.push(*p);
        }
        Ok(plan)
    }
}

/// Degree-`n_even` pairing plan over an odd ground set.
pub fn build_q_even_for_odd_ground(users: &[UserId], n_even: usize) -> Result<PairingPlan> {
    OddGroundMatchings::new(users)?.q_even(n_even)
}

/// Decompose the complete graph on an odd ground set into `(n-1)/2`
/// edge-disjoint Hamiltonian cycles.
///
/// Uses `M_(j) ∪ M_(k) ∪ {{j,k}}` over the pivot pairs of the largest id when
/// every such union is a single cycle (always the case when `n` is prime),
/// and Walecki's zigzag construction otherwise. Each cycle is returned as a
/// walk starting at its lowest id.
pub fn hamiltonian_decomposition(users: &[UserId]) -> Result<Vec<Vec<Pairing>>> {
    let ground = sorted_ground(users)?;
    let n = ground.len();
    if n % 2 == 0 || n < 3 {
        return Err(Error::EvenGround(n));
    }
    match hamiltonian_decomposition_with_pivot(&ground, ground[n - 1]) {
        Ok(c) => Ok(c),
        Err(Error::NotACycle(_)) => Ok(walecki(&ground)),
        Err(e) => Err(e),
    }
}

/// Hamiltonian decomposition from the near-1-factorization combined along
/// the pivot matching `M_(pivot)`. Fails with [`Error::NotACycle`] when some
/// union splits into several cycles.
pub fn hamiltonian_decomposition_with_pivot(
    users: &[UserId],
    pivot: UserId,
) -> Result<Vec<Vec<Pairing>>> {
    let near = near_one_factorization(users)?;
    let pivot_pairs = &near
        .get(&pivot)
        .ok_or_else(|| Error::InvalidArgument(format!("pivot {pivot} not in ground set")))?
        .pairs;
    pivot_pairs
        .iter()
        .map(|p| {
            let mut edges = near[&p.a].pairs.clone();
            edges.extend(near[&p.b].pairs.iter().copied());
            edges.push(*p);
            orient_cycle(&edges)
        })
        .collect()
}

fn walecki(ground: &[UserId]) -> Vec<Vec<Pairing>> {
    let n = ground.len();
    let m = (n - 1) / 2;
    let modulus = 2 * m;
    let inf = ground[n - 1];
    (0..m)
        .map(|r| {
            let mut seq = vec![r];
            for s in 1..modulus {
                let step = s.div_ceil(2);
                let v = if s % 2 == 1 { (r + step) % modulus } else { (r + modulus - step) % modulus };
                seq.push(v);
            }
            let mut edges = vec![Pairing::of(inf, ground[seq[0]])];
            edges.extend(seq.windows(2).map(|w| Pairing::of(ground[w[0]], ground[w[1]])));
            edges.push(Pairing::of(ground[seq[modulus - 1]], inf));
            orient_cycle(&edges).expect("Walecki cycles are Hamiltonian")
        })
        .collect()
}

/// Walk a 2-regular edge list from its lowest vertex along the first listed
/// incident edge. Returns the edges in walk order, each tagged with its
/// departure vertex. Handles several components by restarting at the lowest
/// unvisited vertex.
fn walk_components(edges: &[Pairing]) -> Result<Vec<Vec<(Pairing, UserId)>>> {
    let mut adj: BTreeMap<UserId, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        adj.entry(e.a).or_default().push(i);
        adj.entry(e.b).or_default().push(i);
    }
    if let Some((v, inc)) = adj.iter().find(|(_, inc)| inc.len() != 2) {
        return Err(Error::NotACycle(format!("vertex {v} has degree {}", inc.len())));
    }
    let distinct: BTreeSet<Pairing> = edges.iter().copied().collect();
    if distinct.len() != edges.len() {
        return Err(Error::NotACycle("repeated edge".into()));
    }
    let mut used = vec![false; edges.len()];
    let mut comps = Vec::new();
    while let Some(start) = adj
        .iter()
        .find(|(_, inc)| inc.iter().any(|&i| !used[i]))
        .map(|(&v, _)| v)
    {
        let mut comp = Vec::new();
        let mut cur = start;
        while let Some(&ei) = adj[&cur].iter().find(|&&i| !used[i]) {
            used[ei] = true;
            comp.push((edges[ei], cur));
            cur = edges[ei].other(cur).expect("incident");
        }
        comps.push(comp);
    }
    Ok(comps)
}

fn orient_cycle(edges: &[Pairing]) -> Result<Vec<Pairing>> {
    let comps = walk_components(edges)?;
    if comps.len() != 1 {
        return Err(Error::NotACycle(format!("{} components", comps.len())));
    }
    Ok(comps[0].iter().map(|&(e, _)| e).collect())
}

/// Assign each edge of a single cycle to one endpoint so that every vertex
/// receives exactly one edge: walk from the lowest id along the first listed
/// incident edge and give each edge to its departure vertex.
pub fn assign_cycle_edges(cycle: &[Pairing]) -> Result<BTreeMap<Pairing, UserId>> {
    if cycle.len() < 3 {
        return Err(Error::NotACycle(format!("{} edges", cycle.len())));
    }
    let comps = walk_components(cycle)?;
    if comps.len() != 1 {
        return Err(Error::NotACycle(format!("{} components", comps.len())));
    }
    Ok(comps[0].iter().copied().collect())
}

/// Split all pairs of `low_users` among the users so that each pair goes to
/// one of its endpoints and part sizes differ by at most one.
///
/// Odd ground: each Hamiltonian cycle gives one edge to every vertex, so all
/// parts have `(n-1)/2` pairs. Even ground: consecutive 1-factorization
/// matchings are merged into 2-factors whose cycles are walked the same way,
/// and the leftover perfect matching goes to the higher-id endpoint of each
/// edge.
pub fn partition_lambda(
    items: &[Pairing],
    low_users: &[UserId],
) -> Result<BTreeMap<UserId, Vec<Pairing>>> {
    let ground = sorted_ground(low_users)?;
    let expected: BTreeSet<Pairing> = ground
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| ground[i + 1..].iter().map(move |&y| Pairing::of(x, y)))
        .collect();
    let given: BTreeSet<Pairing> = items.iter().copied().collect();
    if given != expected || given.len() != items.len() {
        return Err(Error::InvalidArgument(
            "items must be exactly the pairs of the low users".into(),
        ));
    }
    let mut parts: BTreeMap<UserId, Vec<Pairing>> = ground.iter().map(|&u| (u, Vec::new())).collect();
    let n = ground.len();
    if n < 2 {
        return Ok(parts);
    }
    if n % 2 == 1 {
        for cycle in hamiltonian_decomposition(&ground)? {
            for (e, u) in assign_cycle_edges(&cycle)? {
                parts.get_mut(&u).expect("ground").push(e);
            }
        }
    } else {
        let f = one_factorization(&ground)?;
        for chunk in f[..n - 2].chunks(2) {
            let edges: Vec<Pairing> = chunk.iter().flat_map(|m| m.pairs.iter().copied()).collect();
            for comp in walk_components(&edges)? {
                for (e, u) in comp {
                    parts.get_mut(&u).expect("ground").push(e);
                }
            }
        }
        for e in &f[n - 2].pairs {
            parts.get_mut(&e.b).expect("ground").push(*e);
        }
    }
    for v in parts.values_mut() {
        v.sort();
    }
    Ok(parts)
}
