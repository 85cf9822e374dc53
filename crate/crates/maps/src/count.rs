//! Exact counts of triangulated polygons from the root-edge peeling split.
//!
//! Peeling the root edge of a polygon with `p` boundary edges and `k`
//! interior vertices reveals a triangle whose third vertex is either interior
//! (leaving a polygon of perimeter `p + 1` and `k - 1` interior vertices) or
//! a boundary vertex (splitting into two polygons that share it).

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{MapError, Result};
use crate::map::MapClass;

#[derive(Debug, Default)]
pub struct DiskCounter {
    plain: HashMap<(usize, usize), BigUint>,
    marked: HashMap<(usize, usize), BigUint>,
    simple: HashMap<(usize, usize), BigInt>,
}

impl DiskCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loopless triangulated polygons with a simple boundary.
    pub fn multi(&mut self, p: usize, k: usize) -> BigUint {
        if let Some(v) = self.plain.get(&(p, k)) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        if p == 2 && k == 0 {
            total = BigUint::one();
        } else {
            if k > 0 {
                total += self.multi(p + 1, k - 1);
            }
            for i in 2..p {
                for k1 in 0..=k {
                    total += self.multi(i, k1) * self.multi(p - i + 1, k - k1);
                }
            }
        }
        self.plain.insert((p, k), total.clone());
        total
    }

    /// As [`DiskCounter::multi`] with one edge fattened into the target 2-gon.
    pub fn multi_marked(&mut self, p: usize, k: usize) -> BigUint {
        if let Some(v) = self.marked.get(&(p, k)) {
            return v.clone();
        }
        // the root edge itself may be the fattened one
        let mut total = self.multi(p, k);
        if k > 0 {
            total += self.multi_marked(p + 1, k - 1);
        }
        for i in 2..p {
            for k1 in 0..=k {
                let k2 = k - k1;
                total += self.multi_marked(i, k1) * self.multi(p - i + 1, k2);
                total += self.multi(i, k1) * self.multi_marked(p - i + 1, k2);
            }
        }
        self.marked.insert((p, k), total.clone());
        total
    }

    /// Triangulated polygons whose graph is simple.
    pub fn simple(&mut self, p: usize, k: usize) -> BigInt {
        if let Some(v) = self.simple.get(&(p, k)) {
            return v.clone();
        }
        let total = if p == 2 {
            if k == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        } else {
            let mut t = BigInt::zero();
            if k > 0 {
                t += self.simple(p + 1, k - 1);
                // remove polygons with a chord duplicating the root edge
                for j in 0..k {
                    t -= self.simple(3, j) * self.simple(p, k - 1 - j);
                }
            }
            for i in 2..p {
                for k1 in 0..=k {
                    t += self.simple(i, k1) * self.simple(p - i + 1, k - k1);
                }
            }
            t
        };
        self.simple.insert((p, k), total.clone());
        total
    }

    pub fn count(&mut self, p: usize, k: usize, class: MapClass) -> BigUint {
        match class {
            MapClass::MultiEdge => self.multi(p, k),
            MapClass::Simple => self.simple(p, k).to_biguint().expect("counts are non-negative"),
        }
    }
}

/// Number of triangulated polygons with perimeter `m` and `n` interior
/// vertices in the given class.
pub fn count_disk_triangulations(m: usize, n: usize, class: MapClass) -> Result<BigUint> {
    if m < 2 {
        return Err(MapError::OutOfRange {
            what: "perimeter",
            value: m,
            range: ">= 2",
        });
    }
    Ok(DiskCounter::new().count(m, n, class))
}

/// Number of loopless sphere triangulations with `n_vertices` vertices, the
/// root on the start 2-gon and one target 2-gon.
pub fn multi_edge_universe(n_vertices: usize) -> BigUint {
    DiskCounter::new().multi_marked(2, n_vertices.saturating_sub(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::brute_force_disk_count;

    #[test]
    fn small_values() {
        let mut c = DiskCounter::new();
        assert_eq!(c.multi(2, 0), BigUint::one());
        assert_eq!(c.multi(3, 0), BigUint::one());
        assert_eq!(c.multi(3, 1), BigUint::from(4u32));
        assert_eq!(c.simple(4, 0), BigInt::from(2));
        assert_eq!(c.simple(2, 1), BigInt::zero());
        assert_eq!(multi_edge_universe(4), BigUint::from(28u32));
    }

    #[test]
    fn marked_count_is_edges_times_plain() {
        let mut c = DiskCounter::new();
        for p in 2..=7 {
            for k in 0..=5 {
                let edges = 2 * p + 3 * k - 3;
                assert_eq!(c.multi_marked(p, k), c.multi(p, k) * edges as u32, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn recursion_matches_gluing() {
        let mut c = DiskCounter::new();
        for m in 2..=6 {
            for n in 0..=3 {
                for class in [MapClass::MultiEdge, MapClass::Simple] {
                    let brute = brute_force_disk_count(m, n, class, false).unwrap();
                    assert_eq!(c.count(m, n, class), BigUint::from(brute), "m={m} n={n} {class}");
                }
            }
        }
    }
}
