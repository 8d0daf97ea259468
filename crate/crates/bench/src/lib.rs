//! Fixtures shared by the benchmarks.

use clcd_core::placement::build_placement_by_id;
use clcd_core::{DemandClassification, LibraryConfig, PlacementSpec};

/// Placement with `K` users, `3K` files split evenly over the three levels.
pub fn three_level(users: usize, level: usize) -> PlacementSpec {
    let cfg = LibraryConfig::new(users, 3 * users, level, users, users).expect("valid config");
    build_placement_by_id(&cfg).expect("placement")
}

/// Demand where the first `k[0]` users ask for distinct high-level files,
/// the next `k[1]` for low-level ones and the rest for uncached ones.
pub fn demand(placement: &PlacementSpec, k: [usize; 3]) -> DemandClassification {
    let users = placement.config().users();
    assert_eq!(k.iter().sum::<usize>(), users);
    let d: Vec<u32> = (0..users)
        .map(|u| {
            let level = if u < k[0] { 0 } else if u < k[0] + k[1] { 1 } else { 2 };
            (level * users + u + 1) as u32
        })
        .collect();
    placement.classify(&d).expect("valid demand")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_counts() {
        let p = three_level(7, 2);
        let c = demand(&p, [4, 2, 1]);
        assert_eq!((c.high.len(), c.low.len(), c.zero.len()), (4, 2, 1));
    }
}
