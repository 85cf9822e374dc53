//! Two-sided Eden growth between the marked 2-gons.
//!
//! A cluster grows from `x` for a uniform fraction of its full passage time
//! to `y`; then an independent cluster grows from `y` until its frontier
//! touches the first one. Comparing the law of the pair of step counts with
//! the roles of `x` and `y` swapped is a discrete look at the symmetry of
//! the two-sided meeting. Nothing here is expected to be exactly symmetric
//! on a fixed map; the numbers are reported, not asserted.

use std::collections::HashMap;

use lqgsim_core::rng::{SeedTree, StreamTag};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MapError, Result};
use crate::explore::{ExplorationTrace, Explorer};
use crate::generate::enumerate_triangulations;
use crate::map::{CombMap, FaceKind, MapClass};

/// Which marked 2-gon the first cluster grows from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Start,
    Target,
}

impl Mark {
    pub fn other(self) -> Mark {
        match self {
            Mark::Start => Mark::Target,
            Mark::Target => Mark::Start,
        }
    }
}

/// Root half-edge and face of a marked 2-gon.
fn endpoint(map: &CombMap, mark: Mark) -> (usize, usize) {
    let h = match mark {
        Mark::Start => 0,
        Mark::Target => map.half_edge_of_kind(FaceKind::Target).expect("map has a target 2-gon"),
    };
    (h, map.face(h))
}

fn explorer(map: &CombMap, from: Mark) -> Result<Explorer<'_>> {
    let (h, _) = endpoint(map, from);
    let (_, target) = endpoint(map, from.other());
    Explorer::between(map, h, target)
}

fn touches(ex: &Explorer<'_>, cluster: u64) -> bool {
    ex.frontier().iter().any(|&h| cluster >> ex.map().face(h) & 1 == 1)
}

#[derive(Debug, Clone)]
pub struct TwoSidedRecord {
    pub from: Mark,
    /// Steps the first cluster needs to reach the other 2-gon.
    pub passage_steps: usize,
    pub fraction: f64,
    /// Steps the first cluster actually grew, `floor(fraction * passage)`.
    pub first_steps: usize,
    pub first: ExplorationTrace,
    /// Steps the second cluster grew before its frontier touched the first.
    pub second_steps: usize,
    pub second: ExplorationTrace,
    pub met: bool,
}

/// Run the two-sided experiment once.
pub fn two_sided_eden_experiment(map: &CombMap, from: Mark, seed: u64) -> Result<TwoSidedRecord> {
    map.validate_sphere()?;
    if map.n_faces() > 64 {
        return Err(MapError::Unsupported("two-sided growth handles at most 64 faces".into()));
    }
    let tree = SeedTree::new(seed);
    let mut rng = tree.stream(StreamTag::Meeting, 0);
    let mut full = explorer(map, from)?;
    while !full.is_done() {
        let i = rng.random_range(0..full.frontier().len());
        full.step(i)?;
    }
    let passage = full.trace().steps.len();
    let fraction: f64 = rng.random();
    let first_steps = ((fraction * passage as f64) as usize).min(passage - 1);
    let mut first = explorer(map, from)?;
    for s in &full.trace().steps[..first_steps] {
        first.step(s.position)?;
    }
    let cluster = first.explored_mask();
    let mut rng = tree.stream(StreamTag::Meeting, 1);
    let mut second = explorer(map, from.other())?;
    let mut met = touches(&second, cluster);
    while !met && !second.is_done() {
        let i = rng.random_range(0..second.frontier().len());
        second.step(i)?;
        met = touches(&second, cluster);
    }
    if !met {
        return Err(MapError::Exploration("the two clusters never met".into()));
    }
    let second_steps = second.trace().steps.len();
    Ok(TwoSidedRecord {
        from,
        passage_steps: passage,
        fraction,
        first_steps,
        first: first.into_trace(),
        second_steps,
        second: second.into_trace(),
        met,
    })
}

type Law<K> = HashMap<K, BigRational>;

fn add<K: Eq + std::hash::Hash>(law: &mut Law<K>, k: K, w: BigRational) {
    *law.entry(k).or_insert_with(BigRational::zero) += w;
}

fn tv<K: Eq + std::hash::Hash>(a: &Law<K>, b: &Law<K>) -> BigRational {
    let zero = BigRational::zero();
    let mut s = BigRational::zero();
    for (k, x) in a {
        s += (x - b.get(k).unwrap_or(&zero)).abs();
    }
    for (k, y) in b {
        if !a.contains_key(k) {
            s += y.clone();
        }
    }
    s / BigInt::from(2)
}

fn ratio(num: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(num))
}

/// Exact law of the number of Eden steps from `from` to the other 2-gon.
pub fn passage_law(map: &CombMap, from: Mark) -> Result<Law<usize>> {
    fn go(ex: Explorer<'_>, w: BigRational, law: &mut Law<usize>) {
        if ex.is_done() {
            add(law, ex.trace().steps.len(), w);
            return;
        }
        let l = ex.frontier().len();
        for i in 0..l {
            let mut c = ex.clone();
            c.step(i).expect("peelable");
            go(c, &w * ratio(l as u64), law);
        }
    }
    let mut law = Law::new();
    go(explorer(map, from)?, BigRational::one(), &mut law);
    Ok(law)
}

/// Exact law of (first steps, second steps) for the two-sided experiment.
pub fn joint_law(map: &CombMap, from: Mark) -> Result<Law<(usize, usize)>> {
    let mut meet_cache: HashMap<u64, Law<usize>> = HashMap::new();
    let meet = |cluster: u64, cache: &mut HashMap<u64, Law<usize>>| -> Result<Law<usize>> {
        if let Some(l) = cache.get(&cluster) {
            return Ok(l.clone());
        }
        fn go(ex: Explorer<'_>, cluster: u64, w: BigRational, law: &mut Law<usize>) {
            if touches(&ex, cluster) || ex.is_done() {
                add(law, ex.trace().steps.len(), w);
                return;
            }
            let l = ex.frontier().len();
            for i in 0..l {
                let mut c = ex.clone();
                c.step(i).expect("peelable");
                go(c, cluster, &w * ratio(l as u64), law);
            }
        }
        let mut law = Law::new();
        go(explorer(map, from.other())?, cluster, BigRational::one(), &mut law);
        cache.insert(cluster, law.clone());
        Ok(law)
    };
    // first-cluster paths with the cluster after each step
    fn paths(ex: Explorer<'_>, w: BigRational, clusters: &mut Vec<u64>, out: &mut Vec<(BigRational, Vec<u64>)>) {
        if ex.is_done() {
            out.push((w, clusters.clone()));
            return;
        }
        let l = ex.frontier().len();
        for i in 0..l {
            let mut c = ex.clone();
            c.step(i).expect("peelable");
            clusters.push(c.explored_mask());
            paths(c, &w * ratio(l as u64), clusters, out);
            clusters.pop();
        }
    }
    let start = explorer(map, from)?;
    let mut all = Vec::new();
    let mut clusters = vec![start.explored_mask()];
    paths(start, BigRational::one(), &mut clusters, &mut all);
    let mut law = Law::new();
    for (w, clusters) in all {
        // clusters[k] is the cluster after k steps; k runs below the passage time
        let passage = clusters.len() - 1;
        let share = &w * ratio(passage as u64);
        for (k, &c) in clusters[..passage].iter().enumerate() {
            for (s, p) in meet(c, &mut meet_cache)? {
                add(&mut law, (k, s), &share * p);
            }
        }
    }
    Ok(law)
}

/// Swap diagnostics over one enumerated universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapSummary {
    pub class: MapClass,
    pub n: usize,
    pub maps: usize,
    /// Mean and maximum over maps of the distance between the passage-time
    /// laws in the two directions.
    pub passage_tv_mean: f64,
    pub passage_tv_max: f64,
    /// Same for the joint law of the two step counts.
    pub joint_tv_mean: f64,
    pub joint_tv_max: f64,
    /// Maps on which both distances vanish exactly.
    pub exactly_symmetric: usize,
}

pub fn swap_summary(n: usize, class: MapClass) -> Result<SwapSummary> {
    use num_traits::ToPrimitive;
    let maps = enumerate_triangulations(n, class)?;
    let (mut pm, mut px, mut jm, mut jx, mut exact) = (0.0, 0.0f64, 0.0, 0.0f64, 0);
    for e in &maps {
        let p = tv(&passage_law(&e.map, Mark::Start)?, &passage_law(&e.map, Mark::Target)?);
        let j = tv(&joint_law(&e.map, Mark::Start)?, &joint_law(&e.map, Mark::Target)?);
        if p.is_zero() && j.is_zero() {
            exact += 1;
        }
        let (p, j) = (p.to_f64().unwrap_or(f64::NAN), j.to_f64().unwrap_or(f64::NAN));
        pm += p;
        jm += j;
        px = px.max(p);
        jx = jx.max(j);
    }
    let k = maps.len().max(1) as f64;
    Ok(SwapSummary {
        class,
        n,
        maps: maps.len(),
        passage_tv_mean: pm / k,
        passage_tv_max: px,
        joint_tv_mean: jm / k,
        joint_tv_max: jx,
        exactly_symmetric: exact,
    })
}

/// Distance between the passage-time laws in the two directions on one map.
pub fn passage_swap_tv(map: &CombMap) -> Result<BigRational> {
    Ok(tv(&passage_law(map, Mark::Start)?, &passage_law(map, Mark::Target)?))
}
