// SPDX-License-Identifier: Apache-2.0

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::SamplerSpec;
use crate::bist::{Fault, WiredBehavior};
use crate::bumpmap::{AdjacencyGraph, BumpId, BumpMap};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    StuckAt,
    IntraBridge,
    InterBridge,
}

pub type EdgeList = Vec<(BumpId, BumpId)>;

/// Graph edges split by whether both ends share a block: `(intra, inter)`.
pub fn split_edges(map: &BumpMap, graph: &AdjacencyGraph) -> Result<(EdgeList, EdgeList)> {
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for &(a, b) in graph.edges() {
        let (ba, bb) = match (map.block(a), map.block(b)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::param("bump map has not been partitioned")),
        };
        if ba == bb {
            intra.push((a, b));
        } else {
            inter.push((a, b));
        }
    }
    Ok((intra, inter))
}

/// Draws `n_faults` faults from a ChaCha8 stream seeded with `seed`.
///
/// Categories are drawn first for all faults, so a request that needs more
/// bridges than the graph has fails before any fault is produced. Stuck-at
/// faults pick a bump and a polarity uniformly; bridges are drawn without
/// replacement from the edges of their category.
pub fn sample_faults(spec: &SamplerSpec, map: &BumpMap, graph: &AdjacencyGraph) -> Result<Vec<Fault>> {
    if spec.n_faults == 0 {
        return Ok(Vec::new());
    }
    if map.is_empty() {
        return Err(Error::Validation("cannot sample faults on an empty map".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let kinds = WeightedIndex::new(spec.mix.weights())
        .map_err(|e| Error::Validation(format!("mix: {e}")))?;
    let categories: Vec<Category> = (0..spec.n_faults)
        .map(|_| match kinds.sample(&mut rng) {
            0 => Category::StuckAt,
            1 => Category::IntraBridge,
            _ => Category::InterBridge,
        })
        .collect();

    let (mut intra, mut inter) = split_edges(map, graph)?;
    for (cat, pool, name) in [
        (Category::IntraBridge, &intra, "intra-block"),
        (Category::InterBridge, &inter, "inter-block"),
    ] {
        let wanted = categories.iter().filter(|&&c| c == cat).count();
        if wanted > pool.len() {
            return Err(Error::Validation(format!(
                "requested {wanted} {name} bridges but only {} such edges exist",
                pool.len()
            )));
        }
    }
    let behaviors = if categories.iter().any(|&c| c != Category::StuckAt) {
        Some(
            WeightedIndex::new([spec.behavior_mix.wired_and, spec.behavior_mix.wired_or])
                .map_err(|e| Error::Validation(format!("behavior_mix: {e}")))?,
        )
    } else {
        None
    };

    let mut out = Vec::with_capacity(spec.n_faults);
    for cat in categories {
        let fault = match cat {
            Category::StuckAt => {
                let net = BumpId(rng.gen_range(0..map.len()));
                if rng.gen_bool(0.5) {
                    Fault::sa1(net)
                } else {
                    Fault::sa0(net)
                }
            }
            Category::IntraBridge | Category::InterBridge => {
                let pool = if cat == Category::IntraBridge {
                    &mut intra
                } else {
                    &mut inter
                };
                let (a, b) = pool.swap_remove(rng.gen_range(0..pool.len()));
                let behavior = WiredBehavior::BOTH[behaviors.as_ref().expect("set for bridges").sample(&mut rng)];
                Fault::bridge(a, b, behavior)
            }
        };
        out.push(fault);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bist::FaultKind;
    use crate::bumpmap::{build_test_map, Lattice, LatticeKind};
    use crate::campaign::config::{BehaviorMix, KindMix};
    use proptest::prelude::*;

    fn spec(n: usize, mix: KindMix, seed: u64) -> SamplerSpec {
        SamplerSpec {
            n_faults: n,
            mix,
            behavior_mix: BehaviorMix::default(),
            seed,
        }
    }

    fn hex(rows: usize, cols: usize, blocks: usize) -> (BumpMap, AdjacencyGraph) {
        let l = Lattice::new(LatticeKind::Hexagonal, rows, cols, 10.0).unwrap();
        build_test_map(l, 19.0, blocks).unwrap()
    }

    #[test]
    fn zero_faults_is_empty() {
        let (m, g) = hex(2, 2, 1);
        let s = spec(0, KindMix::default(), 1);
        assert!(sample_faults(&s, &m, &g).unwrap().is_empty());
    }

    #[test]
    fn stuck_at_only_on_quad() {
        let (m, g) = hex(2, 2, 1);
        let mix = KindMix { sa: 1.0, ..KindMix::default() };
        let faults = sample_faults(&spec(5, mix, 9), &m, &g).unwrap();
        assert_eq!(faults.len(), 5);
        for f in &faults {
            assert!(f.is_stuck_at());
            assert!(f.nets().iter().all(|&n| m.contains(n)));
        }
    }

    #[test]
    fn too_many_bridges_rejected() {
        let (m, g) = hex(2, 2, 1);
        let mix = KindMix { bridge: 1.0, ..KindMix::default() };
        assert!(matches!(
            sample_faults(&spec(7, mix, 1), &m, &g),
            Err(Error::Validation(_))
        ));
        let inter = KindMix { inter_block: 1.0, ..KindMix::default() };
        assert!(matches!(
            sample_faults(&spec(1, inter, 1), &m, &g),
            Err(Error::Validation(_))
        ));
        // all six quad edges can be drawn, each exactly once
        let faults = sample_faults(&spec(6, mix, 1), &m, &g).unwrap();
        let mut pairs: Vec<_> = faults.iter().map(|f| f.nets()).collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 6);
    }

    #[test]
    fn categories_respect_blocks() {
        let (m, g) = hex(8, 8, 4);
        let inter = KindMix { inter_block: 1.0, ..KindMix::default() };
        for f in sample_faults(&spec(20, inter, 5), &m, &g).unwrap() {
            let FaultKind::Bridge { a, b, .. } = f.kind else { panic!("{f}") };
            assert_ne!(m.block(a), m.block(b));
        }
        let intra = KindMix { bridge: 1.0, ..KindMix::default() };
        for f in sample_faults(&spec(20, intra, 5), &m, &g).unwrap() {
            let FaultKind::Bridge { a, b, .. } = f.kind else { panic!("{f}") };
            assert_eq!(m.block(a), m.block(b));
            assert!(g.contains(a, b));
        }
    }

    proptest! {
        #[test]
        fn deterministic_in_seed(seed in any::<u64>(), n in 0usize..40) {
            let (m, g) = hex(6, 6, 2);
            let mix = KindMix { sa: 1.0, bridge: 1.0, inter_block: 0.5 };
            let a = sample_faults(&spec(n, mix, seed), &m, &g).unwrap();
            let b = sample_faults(&spec(n, mix, seed), &m, &g).unwrap();
            prop_assert_eq!(a.len(), n);
            prop_assert_eq!(a, b);
        }
    }
}
