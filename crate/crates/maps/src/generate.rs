//! Exhaustive generation of rooted triangulations by face gluing.
//!
//! Faces are attached one at a time to the lowest-numbered open half-edge,
//! either as a fresh face or by closing it against another open half-edge of
//! the same boundary cycle. Every rooted map arises from exactly one sequence
//! of choices, so no isomorphism filtering is needed.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{MapError, Result};
use crate::map::{CombMap, FaceKind, MapClass};

/// Largest sphere size the exhaustive routines accept.
pub const MAX_ENUM_VERTICES: usize = 8;

const OPEN: usize = usize::MAX;

#[derive(Clone)]
struct Builder {
    next: Vec<usize>,
    twin: Vec<usize>,
    face: Vec<usize>,
    kinds: Vec<FaceKind>,
    corner: Vec<usize>,
    triangles_left: usize,
    target_left: bool,
}

impl Builder {
    fn with_face(kind: FaceKind, degree: usize, triangles: usize, target: bool) -> Self {
        let mut b = Builder {
            next: Vec::new(),
            twin: Vec::new(),
            face: Vec::new(),
            kinds: Vec::new(),
            corner: Vec::new(),
            triangles_left: triangles,
            target_left: target,
        };
        b.add_face(kind, degree);
        b
    }

    fn add_face(&mut self, kind: FaceKind, degree: usize) -> usize {
        let base = self.next.len();
        let f = self.kinds.len();
        self.kinds.push(kind);
        for k in 0..degree {
            self.next.push(base + (k + 1) % degree);
            self.twin.push(OPEN);
            self.face.push(f);
            self.corner.push(base + k);
        }
        base
    }

    fn find(&self, mut x: usize) -> usize {
        while self.corner[x] != x {
            x = self.corner[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.corner[ra.max(rb)] = ra.min(rb);
        }
    }

    fn glue(&mut self, a: usize, b: usize) {
        self.twin[a] = b;
        self.twin[b] = a;
        let (na, nb) = (self.next[a], self.next[b]);
        self.union(b, na);
        self.union(a, nb);
    }

    fn has_loop(&self) -> bool {
        (0..self.next.len()).any(|h| self.find(h) == self.find(self.next[h]))
    }

    fn lowest_open(&self) -> Option<usize> {
        self.twin.iter().position(|&t| t == OPEN)
    }

    /// Following open half-edge along the boundary cycle through `s`.
    fn boundary_next(&self, s: usize) -> usize {
        let mut cand = self.next[s];
        while self.twin[cand] != OPEN {
            cand = self.next[self.twin[cand]];
        }
        cand
    }

    fn finish(&self) -> CombMap {
        CombMap::new(self.next.clone(), self.twin.clone(), self.face.clone(), self.kinds.clone())
            .expect("closed gluing is a valid map")
    }
}

fn grow(b: Builder, visit: &mut dyn FnMut(CombMap)) {
    let Some(s) = b.lowest_open() else {
        if b.triangles_left == 0 && !b.target_left {
            visit(b.finish());
        }
        return;
    };
    let mut t = b.boundary_next(s);
    while t != s {
        let mut c = b.clone();
        c.glue(s, t);
        if !c.has_loop() {
            grow(c, visit);
        }
        t = b.boundary_next(t);
    }
    if b.triangles_left > 0 {
        let mut c = b.clone();
        let x = c.add_face(FaceKind::Triangle, 3);
        c.triangles_left -= 1;
        c.glue(s, x);
        if !c.has_loop() {
            grow(c, visit);
        }
    }
    if b.target_left {
        let mut c = b;
        let x = c.add_face(FaceKind::Target, 2);
        c.target_left = false;
        c.glue(s, x);
        if !c.has_loop() {
            grow(c, visit);
        }
    }
}

fn check_sphere_size(n_vertices: usize) -> Result<()> {
    if !(3..=MAX_ENUM_VERTICES).contains(&n_vertices) {
        return Err(MapError::OutOfRange {
            what: "n_vertices",
            value: n_vertices,
            range: "3..=8 (exhaustive enumeration bound)",
        });
    }
    Ok(())
}

/// Visit every rooted sphere triangulation on `n_vertices` vertices with the
/// root on the start 2-gon and one target 2-gon.
pub fn for_each_sphere(n_vertices: usize, class: MapClass, visit: &mut dyn FnMut(CombMap)) -> Result<()> {
    check_sphere_size(n_vertices)?;
    let b = Builder::with_face(FaceKind::Start, 2, 2 * n_vertices - 4, true);
    grow(b, &mut |m: CombMap| {
        if m.in_class(class) {
            visit(m)
        }
    });
    Ok(())
}

/// A rooted doubly marked triangulation together with the number of vertex
/// labelings it carries. Rooted maps have no nontrivial automorphisms, so
/// every labeling is distinct.
#[derive(Debug, Clone)]
pub struct EnumeratedMap {
    pub map: CombMap,
    pub labelings: BigUint,
}

/// All rooted triangulations of the sphere with `n_vertices` vertices and two
/// ordered marked edges, fattened into the start and target 2-gons.
pub fn enumerate_triangulations(n_vertices: usize, class: MapClass) -> Result<Vec<EnumeratedMap>> {
    let labelings: BigUint = (1..=n_vertices as u32).fold(BigUint::one(), |acc, k| acc * k);
    let mut out = Vec::new();
    for_each_sphere(n_vertices, class, &mut |map| {
        out.push(EnumeratedMap {
            map,
            labelings: labelings.clone(),
        })
    })?;
    Ok(out)
}

/// Visit every triangulated polygon with `perimeter` boundary edges and
/// `inner` interior vertices; the root is a half-edge of the outer face.
/// With `with_target`, one boundary-or-interior edge is fattened into the
/// target 2-gon.
pub fn for_each_disk(
    perimeter: usize,
    inner: usize,
    class: MapClass,
    with_target: bool,
    visit: &mut dyn FnMut(CombMap),
) -> Result<()> {
    if perimeter < 2 {
        return Err(MapError::OutOfRange {
            what: "perimeter",
            value: perimeter,
            range: ">= 2",
        });
    }
    let triangles = perimeter + 2 * inner - 2;
    let b = Builder::with_face(FaceKind::Outer, perimeter, triangles, with_target);
    grow(b, &mut |m: CombMap| {
        if m.has_simple_boundary() && m.in_class(class) {
            visit(m)
        }
    });
    Ok(())
}

/// Number of disks produced by [`for_each_disk`].
pub fn brute_force_disk_count(perimeter: usize, inner: usize, class: MapClass, with_target: bool) -> Result<u64> {
    let mut count = 0u64;
    for_each_disk(perimeter, inner, class, with_target, &mut |_| count += 1)?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn every_sphere_is_valid_and_distinct() {
        for class in [MapClass::MultiEdge, MapClass::Simple] {
            for n in 3..=5 {
                let maps = enumerate_triangulations(n, class).unwrap();
                let mut codes = HashSet::new();
                for e in &maps {
                    e.map.validate_sphere().unwrap();
                    assert_eq!(e.map.n_vertices(), n);
                    assert!(codes.insert(e.map.canonical_code()));
                }
            }
        }
    }

    #[test]
    fn small_universes() {
        assert!(enumerate_triangulations(3, MapClass::Simple).unwrap().is_empty());
        assert_eq!(enumerate_triangulations(4, MapClass::MultiEdge).unwrap().len(), 28);
        // the tetrahedron: one rooting, seven choices of the second edge
        assert_eq!(enumerate_triangulations(4, MapClass::Simple).unwrap().len(), 7);
        assert!(enumerate_triangulations(2, MapClass::Simple).is_err());
        assert!(enumerate_triangulations(9, MapClass::Simple).is_err());
    }

    #[test]
    fn disks_are_valid() {
        for_each_disk(4, 1, MapClass::MultiEdge, false, &mut |m| {
            m.validate_disk().unwrap();
            assert_eq!(m.perimeter(), 4);
            assert_eq!(m.n_vertices(), 5);
        })
        .unwrap();
        assert_eq!(brute_force_disk_count(2, 0, MapClass::MultiEdge, false).unwrap(), 1);
        assert_eq!(brute_force_disk_count(3, 0, MapClass::Simple, false).unwrap(), 1);
    }
}
