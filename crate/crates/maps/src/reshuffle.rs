//! Reassembling a map from its necklaces with chosen rotations.
//!
//! The rotation of necklace `k` against the previous one is the frontier
//! position peeled at step `k`. Gluing with the positions of an exploration
//! reproduces the explored map; gluing with independent uniform positions is
//! the slot-machine reshuffle.

use lqgsim_core::rng::{SeedTree, StreamTag};
use rand::Rng;

use crate::error::{MapError, Result};
use crate::explore::{replay, ExplorationTrace, Necklace, NecklaceKind, Side};
use crate::map::{CombMap, FaceKind};

const OPEN: usize = usize::MAX;

struct Assembly {
    next: Vec<usize>,
    twin: Vec<usize>,
    face: Vec<usize>,
    kinds: Vec<FaceKind>,
}

impl Assembly {
    fn add_face(&mut self, kind: FaceKind, degree: usize) -> usize {
        let base = self.next.len();
        let f = self.kinds.len();
        self.kinds.push(kind);
        for k in 0..degree {
            self.next.push(base + (k + 1) % degree);
            self.twin.push(OPEN);
            self.face.push(f);
        }
        base
    }

    fn glue(&mut self, a: usize, b: usize) -> Result<()> {
        if self.twin[a] != OPEN || self.twin[b] != OPEN || a == b {
            return Err(MapError::InvalidMap("gluing a closed half-edge".into()));
        }
        self.twin[a] = b;
        self.twin[b] = a;
        Ok(())
    }

    /// Glue a cut-off piece along `sides` (explored-side half-edges in
    /// frontier order, starting at the piece's root edge).
    fn attach(&mut self, sides: &[usize], piece: Option<&CombMap>) -> Result<()> {
        let Some(disk) = piece else {
            if sides.len() != 2 {
                return Err(MapError::InvalidMap("an empty piece must have perimeter 2".into()));
            }
            return self.glue(sides[0], sides[1]);
        };
        let p = disk.perimeter();
        if p != sides.len() || disk.kind_of(0) != FaceKind::Outer {
            return Err(MapError::InvalidMap("piece perimeter does not match its slot".into()));
        }
        let base = self.next.len();
        let face_base = self.kinds.len();
        let outer_face = disk.face(0);
        let mut local = vec![OPEN; disk.n_half_edges()];
        let mut count = 0;
        for h in 0..disk.n_half_edges() {
            if disk.face(h) != outer_face {
                local[h] = base + count;
                count += 1;
            }
        }
        let mut face_local = vec![OPEN; disk.n_faces()];
        let mut n_faces = 0;
        for f in 0..disk.n_faces() {
            if f != outer_face {
                face_local[f] = face_base + n_faces;
                n_faces += 1;
                self.kinds.push(disk.kind(f));
            }
        }
        for h in 0..disk.n_half_edges() {
            if local[h] == OPEN {
                continue;
            }
            self.next.push(local[disk.next(h)]);
            self.twin.push(OPEN);
            self.face.push(face_local[disk.face(h)]);
        }
        for h in 0..disk.n_half_edges() {
            let (a, t) = (local[h], disk.twin(h));
            if a != OPEN && local[t] != OPEN && a < local[t] {
                self.glue(a, local[t])?;
            }
        }
        // outer half-edges in the order o_0, o_1, ... with next(o_k) = o_{k-1}
        let cycle = disk.cycle_from(0);
        for (k, &side) in sides.iter().enumerate() {
            let o = cycle[(p - k) % p];
            self.glue(local[disk.twin(o)], side)?;
        }
        Ok(())
    }
}

fn rotate(list: &[usize], from: usize, len: usize) -> Vec<usize> {
    (0..len).map(|k| list[(from + k) % list.len()]).collect()
}

/// Glue the necklaces with the given peel positions.
pub fn rebuild(necklaces: &[Necklace], positions: &[usize]) -> Result<CombMap> {
    if necklaces.len() != positions.len() {
        return Err(MapError::InvalidMap("one position per necklace is needed".into()));
    }
    check_lengths(necklaces)?;
    let mut a = Assembly {
        next: Vec::new(),
        twin: Vec::new(),
        face: Vec::new(),
        kinds: Vec::new(),
    };
    a.add_face(FaceKind::Start, 2);
    let mut open = vec![0, 1];
    for (k, (nk, &i)) in necklaces.iter().zip(positions).enumerate() {
        let l = open.len();
        if nk.inner_length != l {
            return Err(MapError::LengthMismatch {
                index: k.saturating_sub(1),
                next: k,
                outer: l,
                inner: nk.inner_length,
            });
        }
        if i >= l {
            return Err(MapError::OutOfRange {
                what: "peel position",
                value: i,
                range: "below the necklace inner length",
            });
        }
        match nk.kind {
            NecklaceKind::Terminal => {
                let b = a.add_face(FaceKind::Target, 2);
                a.glue(b, open[i])?;
                let mut sides = vec![b + 1];
                sides.extend(rotate(&open, i + 1, l - 1));
                a.attach(&sides, nk.bubble.as_ref())?;
                open.clear();
            }
            NecklaceKind::Interior => {
                let x = a.add_face(FaceKind::Triangle, 3);
                a.glue(x, open[i])?;
                let mut next = vec![x + 2, x + 1];
                next.extend(rotate(&open, i + 1, l - 1));
                open = next;
            }
            NecklaceKind::Boundary { side } => {
                let x = a.add_face(FaceKind::Triangle, 3);
                a.glue(x, open[i])?;
                let (g, h) = (x + 1, x + 2);
                let q = nk.bubble_perimeter;
                if q < 2 || q >= l + 1 {
                    return Err(MapError::InvalidMap("bubble perimeter does not fit the frontier".into()));
                }
                let d = match side {
                    Side::Ahead => q,
                    Side::Behind => l + 1 - q,
                };
                let mut ahead = vec![g];
                ahead.extend(rotate(&open, i + 1, d - 1));
                let mut behind = vec![h];
                behind.extend(rotate(&open, i + d, l - d));
                let (piece, rest) = match side {
                    Side::Ahead => (ahead, behind),
                    Side::Behind => (behind, ahead),
                };
                a.attach(&piece, nk.bubble.as_ref())?;
                open = rest;
            }
        }
    }
    if !open.is_empty() || a.twin.contains(&OPEN) {
        return Err(MapError::InvalidMap("necklaces do not close up".into()));
    }
    let map = CombMap::new(a.next, a.twin, a.face, a.kinds)?;
    map.validate_sphere()?;
    Ok(map)
}

fn check_lengths(necklaces: &[Necklace]) -> Result<()> {
    for (k, w) in necklaces.windows(2).enumerate() {
        if w[0].outer_length != w[1].inner_length {
            return Err(MapError::LengthMismatch {
                index: k,
                next: k + 1,
                outer: w[0].outer_length,
                inner: w[1].inner_length,
            });
        }
    }
    Ok(())
}

/// Spin every necklace by an independent uniform rotation, reassemble, and
/// return the map with the exploration that the rotations induce.
pub fn reshuffle_necklaces(necklaces: &[Necklace], seed: u64) -> Result<(CombMap, ExplorationTrace)> {
    check_lengths(necklaces)?;
    let mut rng = SeedTree::new(seed).stream(StreamTag::Maps, 4);
    let positions: Vec<usize> = necklaces.iter().map(|n| rng.random_range(0..n.inner_length.max(1))).collect();
    let map = rebuild(necklaces, &positions)?;
    let trace = replay(&map, &positions)?;
    Ok((map, trace))
}
