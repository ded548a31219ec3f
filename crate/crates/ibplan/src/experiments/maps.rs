//! Deterministic map generators for experiments and verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::GridMap;

/// Seed of the bundled demo map: `synthetic_blob_map(7, DEMO_MAP_SEED)` is
/// the canonical 128x128 environment used by the sweep experiments.
pub const DEMO_MAP_SEED: u64 = 7;

/// Map with independent uniform occupancies in [0, 1).
pub fn random_map(side_exponent: u32, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 1usize << side_exponent;
    let occ: Vec<f64> = (0..side * side).map(|_| rng.random::<f64>()).collect();
    GridMap::new(side_exponent, occ).expect("generated values are in range")
}

/// Synthetic environment with graded obstacle blobs over a noisy free field.
///
/// Free cells sit at p in [0.01, 0.05]; blob cores rise to ~0.96 with a
/// smooth quadratic falloff, so the occupancy tolerance boundary cuts
/// through the blob fringes. Per-cell noise keeps every 2x2 block
/// heterogeneous, which makes the highest-beta tree the full tree; a final
/// fixup pass enforces that exactly, without moving any cell across the
/// 0.5 tolerance used by the experiments.
pub fn synthetic_blob_map(side_exponent: u32, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 1usize << side_exponent;
    let sidef = side as f64;

    struct Blob {
        x: f64,
        y: f64,
        radius: f64,
    }
    let blob_count = 4 + side / 16;
    let blobs: Vec<Blob> = (0..blob_count)
        .map(|_| Blob {
            x: rng.random::<f64>() * sidef,
            y: rng.random::<f64>() * sidef,
            radius: sidef / 16.0 + rng.random::<f64>() * sidef / 8.0,
        })
        .collect();

    let mut occ = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            let base = 0.01 + 0.04 * rng.random::<f64>();
            let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
            let mut factor: f64 = 0.0;
            for b in &blobs {
                let d2 = (cx - b.x).powi(2) + (cy - b.y).powi(2);
                let r2 = b.radius * b.radius;
                if d2 < r2 {
                    factor = factor.max(1.0 - d2 / r2);
                }
            }
            occ.push(base + (0.96 - base) * factor);
        }
    }

    // Break any exactly homogeneous 2x2 block, staying on the same side of
    // the 0.5 tolerance.
    for by in 0..side / 2 {
        for bx in 0..side / 2 {
            let idx = |dx: usize, dy: usize| (2 * by + dy) * side + 2 * bx + dx;
            let v = occ[idx(0, 0)];
            if occ[idx(1, 0)] == v && occ[idx(0, 1)] == v && occ[idx(1, 1)] == v {
                occ[idx(0, 0)] = if v < 0.5 { v + 1e-4 } else { v - 1e-4 };
            }
        }
    }

    GridMap::new(side_exponent, occ).expect("generated values are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_map(4, 9).cells(), random_map(4, 9).cells());
        assert_ne!(random_map(4, 9).cells(), random_map(4, 10).cells());
        assert_eq!(
            synthetic_blob_map(5, DEMO_MAP_SEED).cells(),
            synthetic_blob_map(5, DEMO_MAP_SEED).cells()
        );
    }

    #[test]
    fn blob_map_has_free_and_blocked_cells() {
        let map = synthetic_blob_map(6, DEMO_MAP_SEED);
        let free = map.cells().iter().filter(|&&p| p <= 0.5).count();
        let blocked = map.cells().len() - free;
        assert!(free > 0 && blocked > 0);
        // Mostly traversable.
        assert!(free as f64 / map.cells().len() as f64 > 0.5);
    }

    #[test]
    fn blob_map_blocks_are_heterogeneous() {
        let map = synthetic_blob_map(5, DEMO_MAP_SEED);
        let side = map.side();
        for by in 0..side / 2 {
            for bx in 0..side / 2 {
                let vals = [
                    map.occupancy(2 * bx, 2 * by),
                    map.occupancy(2 * bx + 1, 2 * by),
                    map.occupancy(2 * bx, 2 * by + 1),
                    map.occupancy(2 * bx + 1, 2 * by + 1),
                ];
                assert!(
                    vals.iter().any(|&v| v != vals[0]),
                    "homogeneous block at ({bx}, {by})"
                );
            }
        }
    }
}
