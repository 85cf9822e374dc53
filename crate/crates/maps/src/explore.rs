//! Peeling explorations from the start 2-gon towards the target 2-gon.
//!
//! The frontier is the boundary of the unexplored region that contains the
//! target, stored as the half-edges on the unexplored side in cyclic order.
//! Peeling frontier entry `f_i` reveals the face behind it: the target
//! 2-gon ends the exploration, a triangle whose third vertex is new grows the
//! frontier by one, and a triangle whose third vertex already sits on the
//! frontier splits the region in two. The piece without the target is the
//! bubble and is never explored further.

use std::collections::VecDeque;

use lqgsim_core::rng::{SeedTree, StreamTag};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::count::DiskCounter;
use crate::error::{MapError, Result};
use crate::map::{CombMap, FaceKind, MapClass};

/// Which side of the peeled edge the bubble was cut off on, relative to the
/// frontier order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    /// Between the peeled edge and the third vertex going forwards.
    Ahead,
    /// Between the third vertex and the peeled edge going forwards.
    Behind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NecklaceKind {
    /// The third vertex was unseen.
    Interior,
    /// The third vertex was on the frontier.
    Boundary { side: Side },
    /// The target 2-gon was reached.
    Terminal,
}

/// What one peeling step added between the old and the new frontier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Necklace {
    pub inner_length: usize,
    /// Zero for the terminal step.
    pub outer_length: usize,
    /// Faces added this step: the peeled triangle plus the bubble's, or the
    /// remaining triangles on the terminal step.
    pub triangles: usize,
    pub kind: NecklaceKind,
    /// Perimeter of the piece cut off (bubble, or the rest at the terminal
    /// step); zero for interior steps.
    pub bubble_perimeter: usize,
    /// The cut-off piece as a triangulated polygon rooted at the edge it
    /// shares with the peeled face; `None` when it has no faces.
    pub bubble: Option<CombMap>,
}

impl Necklace {
    /// Interior vertices of the cut-off piece.
    pub fn bubble_inner_vertices(&self) -> usize {
        match &self.bubble {
            Some(b) => b.n_vertices() - b.perimeter(),
            None => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeelStep {
    /// Index of the peeled entry in the frontier.
    pub position: usize,
    pub frontier_len: usize,
    pub kind: NecklaceKind,
    /// Face revealed by the step.
    pub face: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplorationTrace {
    /// `(frontier length - 2, unseen vertices in the target region)` before
    /// each step.
    pub chain: Vec<(usize, usize)>,
    pub steps: Vec<PeelStep>,
    pub necklaces: Vec<Necklace>,
}

impl ExplorationTrace {
    /// Triangles revealed by peeling, bubbles excluded.
    pub fn triangles_explored(&self) -> usize {
        self.steps.iter().filter(|s| s.kind != NecklaceKind::Terminal).count()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.position).collect()
    }

    /// Check the chain transition rule and necklace length matching.
    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(MapError::Exploration(why));
        for w in self.chain.windows(2) {
            let ((m0, n0), (m1, n1)) = (w[0], w[1]);
            if n1 > n0 {
                return bad(format!("unseen count rose from {n0} to {n1}"));
            }
            if m1 > m0 && !(m1 == m0 + 1 && n1 + 1 == n0) {
                return bad(format!("({m0},{n0}) -> ({m1},{n1}) is not an allowed move"));
            }
        }
        for (k, w) in self.necklaces.windows(2).enumerate() {
            if w[0].outer_length != w[1].inner_length {
                return Err(MapError::LengthMismatch {
                    index: k,
                    next: k + 1,
                    outer: w[0].outer_length,
                    inner: w[1].inner_length,
                });
            }
        }
        match self.steps.last() {
            Some(s) if s.kind == NecklaceKind::Terminal => Ok(()),
            _ => bad("exploration did not reach the target".into()),
        }
    }
}

/// Result of a single peeling step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub necklace: Necklace,
    /// For triangle steps, the two other half-edges of the triangle
    /// (`next` and `next(next)` of the peeled one).
    pub revealed: Option<(usize, usize)>,
}

/// Exploration state; cloning it branches the exploration.
#[derive(Debug, Clone)]
pub struct Explorer<'a> {
    map: &'a CombMap,
    frontier: Vec<usize>,
    explored: Vec<bool>,
    unseen: usize,
    target: usize,
    done: bool,
    trace: ExplorationTrace,
}

impl<'a> Explorer<'a> {
    /// Explore from the start 2-gon (root side first) to the target 2-gon.
    pub fn new(map: &'a CombMap) -> Result<Self> {
        if map.kind_of(0) != FaceKind::Start || map.count_kind(FaceKind::Target) != 1 {
            return Err(MapError::InvalidMap("exploration needs a start and a target 2-gon".into()));
        }
        Self::between(map, 0, map.faces_of_kind(FaceKind::Target)[0])
    }

    /// Explore from the 2-gon holding half-edge `start` to face `target`.
    pub fn between(map: &'a CombMap, start: usize, target: usize) -> Result<Self> {
        let s = map.face(start);
        if map.cycle_from(start).len() != 2 || map.cycle_from(map.face_cycle(target)[0]).len() != 2 || s == target {
            return Err(MapError::InvalidMap("explorations run between two distinct 2-gons".into()));
        }
        let mut explored = vec![false; map.n_faces()];
        explored[s] = true;
        Ok(Explorer {
            map,
            frontier: vec![map.twin(start), map.twin(map.next(start))],
            explored,
            unseen: map.n_vertices() - 2,
            target,
            done: false,
            trace: ExplorationTrace::default(),
        })
    }

    /// Explored faces as a bit set (maps with at most 64 faces).
    pub fn explored_mask(&self) -> u64 {
        self.explored
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .fold(0, |m, (f, _)| m | 1u64 << f)
    }

    pub fn map(&self) -> &'a CombMap {
        self.map
    }

    pub fn frontier(&self) -> &[usize] {
        &self.frontier
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn state(&self) -> (usize, usize) {
        (self.frontier.len() - 2, self.unseen)
    }

    pub fn trace(&self) -> &ExplorationTrace {
        &self.trace
    }

    pub fn into_trace(self) -> ExplorationTrace {
        self.trace
    }

    pub fn is_explored(&self, face: usize) -> bool {
        self.explored[face]
    }

    fn rotated(&self, from: usize, len: usize) -> impl Iterator<Item = usize> + '_ {
        let l = self.frontier.len();
        (0..len).map(move |k| self.frontier[(from + k) % l])
    }

    /// Faces reachable from `start` without entering explored faces.
    fn region(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.map.n_faces()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(f) = queue.pop_front() {
            out.push(f);
            for h in self.map.face_cycle(f) {
                let g = self.map.face(self.map.twin(h));
                if !seen[g] && !self.explored[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
        out
    }

    /// Cut out the piece bounded by `boundary` (unexplored-side half-edges
    /// in cyclic order) as a rooted polygon and mark its faces explored.
    fn cut_piece(&mut self, boundary: &[usize]) -> CombMap {
        let map = self.map;
        let faces = self.region(map.face(boundary[0]));
        let p = boundary.len();
        let mut local = vec![usize::MAX; map.n_half_edges()];
        let mut members = Vec::new();
        let mut face_of = vec![usize::MAX; map.n_faces()];
        let mut kinds = vec![FaceKind::Outer];
        for &f in &faces {
            face_of[f] = kinds.len();
            kinds.push(map.kind(f));
            self.explored[f] = true;
            for h in map.face_cycle(f) {
                local[h] = p + members.len();
                members.push(h);
            }
        }
        let total = p + members.len();
        let mut next = vec![0; total];
        let mut twin = vec![0; total];
        let mut face = vec![0; total];
        for k in 0..p {
            next[k] = (k + p - 1) % p;
            twin[k] = local[boundary[k]];
            twin[local[boundary[k]]] = k;
        }
        for &h in &members {
            let x = local[h];
            next[x] = local[map.next(h)];
            face[x] = face_of[map.face(h)];
            if !boundary.contains(&h) {
                twin[x] = local[map.twin(h)];
            }
        }
        CombMap::new(next, twin, face, kinds)
            .expect("a cut piece is a valid map")
            .rerooted(0)
    }

    /// Peel the frontier entry at `position`.
    pub fn step(&mut self, position: usize) -> Result<StepOutcome> {
        if self.done {
            return Err(MapError::Exploration("exploration already reached the target".into()));
        }
        let l = self.frontier.len();
        if position >= l {
            return Err(MapError::OutOfRange {
                what: "peel position",
                value: position,
                range: "below the frontier length",
            });
        }
        let map = self.map;
        let f = self.frontier[position];
        let face = map.face(f);
        self.trace.chain.push(self.state());
        let kind = if face == self.target { FaceKind::Target } else { map.kind(face) };
        let outcome = match kind {
            FaceKind::Target => {
                self.explored[face] = true;
                let b = map.next(f);
                let degenerate = l == 2 && self.frontier[(position + 1) % l] == b;
                let bubble = if degenerate {
                    None
                } else {
                    let mut boundary = vec![map.twin(b)];
                    boundary.extend(self.rotated(position + 1, l - 1));
                    Some(self.cut_piece(&boundary))
                };
                self.done = true;
                StepOutcome {
                    necklace: Necklace {
                        inner_length: l,
                        outer_length: 0,
                        triangles: bubble.as_ref().map_or(0, |b| b.count_kind(FaceKind::Triangle)),
                        kind: NecklaceKind::Terminal,
                        bubble_perimeter: l,
                        bubble,
                    },
                    revealed: None,
                }
            }
            FaceKind::Triangle => {
                self.explored[face] = true;
                let g = map.next(f);
                let h = map.next(g);
                let w = map.origin(h);
                let hit = (0..l).find(|&k| map.origin(self.frontier[k]) == w);
                let necklace = match hit {
                    None => {
                        let mut nf = vec![map.twin(h), map.twin(g)];
                        nf.extend(self.rotated(position + 1, l - 1));
                        self.frontier = nf;
                        self.unseen -= 1;
                        Necklace {
                            inner_length: l,
                            outer_length: l + 1,
                            triangles: 1,
                            kind: NecklaceKind::Interior,
                            bubble_perimeter: 0,
                            bubble: None,
                        }
                    }
                    Some(j) => {
                        let d = (j + l - position) % l;
                        if d < 2 {
                            return Err(MapError::Exploration("peeled triangle carries a loop".into()));
                        }
                        let ahead_empty = g == self.frontier[(position + 1) % l];
                        let behind_empty = h == self.frontier[(position + l - 1) % l];
                        let target_ahead = if ahead_empty {
                            false
                        } else if behind_empty {
                            true
                        } else {
                            self.region(map.face(map.twin(g))).contains(&self.target)
                        };
                        let mut ahead = vec![map.twin(g)];
                        ahead.extend(self.rotated(position + 1, d - 1));
                        let mut behind = vec![map.twin(h)];
                        behind.extend(self.rotated(j, l - d));
                        let (side, piece, empty, rest) = if target_ahead {
                            (Side::Behind, behind, behind_empty, ahead)
                        } else {
                            (Side::Ahead, ahead, ahead_empty, behind)
                        };
                        let perimeter = piece.len();
                        let bubble = if empty { None } else { Some(self.cut_piece(&piece)) };
                        self.frontier = rest;
                        let necklace = Necklace {
                            inner_length: l,
                            outer_length: self.frontier.len(),
                            triangles: 1 + bubble.as_ref().map_or(0, |b| b.count_kind(FaceKind::Triangle)),
                            kind: NecklaceKind::Boundary { side },
                            bubble_perimeter: perimeter,
                            bubble,
                        };
                        self.unseen -= necklace.bubble_inner_vertices();
                        necklace
                    }
                };
                StepOutcome {
                    necklace,
                    revealed: Some((g, h)),
                }
            }
            other => {
                return Err(MapError::Exploration(format!("frontier faces a {other:?} face")));
            }
        };
        self.trace.steps.push(PeelStep {
            position,
            frontier_len: l,
            kind: outcome.necklace.kind,
            face,
        });
        self.trace.necklaces.push(outcome.necklace.clone());
        Ok(outcome)
    }
}

/// Vertex coloring for the percolation interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coloring {
    Explicit(Vec<bool>),
    Seeded(u64),
}

/// Which simple dual path from the start to the target is used as the
/// reference path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferencePath {
    Leftmost,
    Rightmost,
}

/// Edges (as half-edge ids, both orientations marked) crossed by a simple
/// dual path from the start 2-gon to the target 2-gon found by depth-first
/// search turning consistently to one side.
pub fn reference_path(map: &CombMap, rule: ReferencePath) -> Vec<bool> {
    let target = map.faces_of_kind(FaceKind::Target)[0];
    let start = map.face(0);
    let mut visited = vec![false; map.n_faces()];
    visited[start] = true;
    let mut crossed = vec![false; map.n_half_edges()];
    // (half-edge the face was entered through, exits to try, cursor)
    let order = |entry: usize| -> Vec<usize> {
        let mut c = map.cycle_from(entry);
        c.remove(0);
        if rule == ReferencePath::Rightmost {
            c.reverse();
        }
        c
    };
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, map.cycle_from(0), 0)];
    if rule == ReferencePath::Rightmost {
        stack[0].1.reverse();
    }
    while let Some(top) = stack.last_mut() {
        if top.2 == top.1.len() {
            let (entry, _, _) = stack.pop().expect("nonempty");
            crossed[entry] = false;
            crossed[map.twin(entry)] = false;
            continue;
        }
        let h = top.1[top.2];
        top.2 += 1;
        let g = map.face(map.twin(h));
        if visited[g] {
            continue;
        }
        visited[g] = true;
        crossed[h] = true;
        crossed[map.twin(h)] = true;
        if g == target {
            return crossed;
        }
        let entry = map.twin(h);
        stack.push((entry, order(entry), 0));
    }
    unreachable!("the dual of a connected map is connected")
}

/// Edges a percolation interface may cross: endpoints colored differently,
/// exclusive-or crossed by the reference path.
pub fn interface_edges(map: &CombMap, colors: &[bool], reference: &[bool]) -> Vec<bool> {
    (0..map.n_half_edges())
        .map(|h| (colors[map.origin(h)] != colors[map.target(h)]) ^ reference[h])
        .collect()
}

fn resolve_coloring(map: &CombMap, colors: &Coloring) -> Result<Vec<bool>> {
    match colors {
        Coloring::Explicit(c) => {
            if c.len() != map.n_vertices() {
                return Err(MapError::Coloring {
                    expected: map.n_vertices(),
                    found: c.len(),
                });
            }
            Ok(c.clone())
        }
        Coloring::Seeded(seed) => {
            let mut rng = SeedTree::new(*seed).stream(StreamTag::Maps, 1);
            Ok((0..map.n_vertices()).map(|_| rng.random::<bool>()).collect())
        }
    }
}

/// Explore along the percolation interface with the leftmost reference
/// path.
pub fn percolation_exploration(map: &CombMap, colors: &Coloring) -> Result<ExplorationTrace> {
    percolation_exploration_with(map, colors, ReferencePath::Leftmost)
}

pub fn percolation_exploration_with(map: &CombMap, colors: &Coloring, rule: ReferencePath) -> Result<ExplorationTrace> {
    let colors = resolve_coloring(map, colors)?;
    let valid = interface_edges(map, &colors, &reference_path(map, rule));
    let mut ex = Explorer::new(map)?;
    let mut position = (0..2)
        .find(|&k| valid[ex.frontier()[k]])
        .ok_or_else(|| MapError::Exploration("no interface edge leaves the start".into()))?;
    loop {
        let out = ex.step(position)?;
        if ex.is_done() {
            break;
        }
        let (g, h) = out.revealed.expect("triangle step");
        let exit = match (valid[g], valid[h]) {
            (true, false) => g,
            (false, true) => h,
            _ => return Err(MapError::Exploration("interface does not leave the triangle once".into())),
        };
        position = ex
            .frontier()
            .iter()
            .position(|&x| x == map.twin(exit))
            .ok_or_else(|| MapError::Exploration("interface left the target region".into()))?;
    }
    Ok(ex.into_trace())
}

/// Faces visited by the interface, traced directly in the dual graph.
pub fn trace_interface(map: &CombMap, colors: &[bool], rule: ReferencePath) -> Result<Vec<usize>> {
    if colors.len() != map.n_vertices() {
        return Err(MapError::Coloring {
            expected: map.n_vertices(),
            found: colors.len(),
        });
    }
    let valid = interface_edges(map, colors, &reference_path(map, rule));
    let mut h = [0, 1]
        .into_iter()
        .find(|&h| valid[h])
        .ok_or_else(|| MapError::Exploration("no interface edge leaves the start".into()))?;
    let mut faces = Vec::new();
    loop {
        let entry = map.twin(h);
        let f = map.face(entry);
        faces.push(f);
        if map.kind(f) == FaceKind::Target {
            return Ok(faces);
        }
        let exits: Vec<usize> = map.cycle_from(entry)[1..].iter().copied().filter(|&x| valid[x]).collect();
        if exits.len() != 1 || faces.len() > map.n_faces() {
            return Err(MapError::Exploration("interface is not a path".into()));
        }
        h = exits[0];
    }
}

/// Explore by peeling a uniformly chosen frontier edge at every step.
pub fn eden_exploration(map: &CombMap, seed: u64) -> Result<ExplorationTrace> {
    let mut rng = SeedTree::new(seed).stream(StreamTag::Maps, 2);
    let mut ex = Explorer::new(map)?;
    while !ex.is_done() {
        let i = rng.random_range(0..ex.frontier().len());
        ex.step(i)?;
    }
    Ok(ex.into_trace())
}

/// Replay an exploration with the given peel positions.
pub fn replay(map: &CombMap, positions: &[usize]) -> Result<ExplorationTrace> {
    let mut ex = Explorer::new(map)?;
    for &p in positions {
        ex.step(p)?;
    }
    if !ex.is_done() {
        return Err(MapError::Exploration("positions ended before the target".into()));
    }
    Ok(ex.into_trace())
}

/// One transition of the peeling chain on `(frontier length, unseen)` for
/// uniformly random loopless spheres, with its exact weight out of
/// `G(length, unseen)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMove {
    pub kind: NecklaceKind,
    /// Perimeter and interior vertices of the piece cut off (zero for
    /// interior moves).
    pub bubble: (usize, usize),
    /// State after the move; `None` when the target is reached.
    pub next: Option<(usize, usize)>,
    pub weight: num_bigint::BigUint,
}

/// All moves out of the state with frontier `length` and `unseen` vertices,
/// weighted by the number of unexplored regions realizing them. The weights
/// sum to the number of regions with that state.
pub fn chain_moves(counter: &mut DiskCounter, length: usize, unseen: usize) -> Vec<ChainMove> {
    let mut moves = vec![ChainMove {
        kind: NecklaceKind::Terminal,
        bubble: (length, unseen),
        next: None,
        weight: counter.multi(length, unseen),
    }];
    if unseen > 0 {
        moves.push(ChainMove {
            kind: NecklaceKind::Interior,
            bubble: (0, 0),
            next: Some((length + 1, unseen - 1)),
            weight: counter.multi_marked(length + 1, unseen - 1),
        });
    }
    for d in 2..length {
        let q = length - d + 1;
        for k in 0..=unseen {
            let ahead = counter.multi(d, k) * counter.multi_marked(q, unseen - k);
            if ahead > num_bigint::BigUint::ZERO {
                moves.push(ChainMove {
                    kind: NecklaceKind::Boundary { side: Side::Ahead },
                    bubble: (d, k),
                    next: Some((q, unseen - k)),
                    weight: ahead,
                });
            }
            let behind = counter.multi_marked(d, unseen - k) * counter.multi(q, k);
            if behind > num_bigint::BigUint::ZERO {
                moves.push(ChainMove {
                    kind: NecklaceKind::Boundary { side: Side::Behind },
                    bubble: (q, k),
                    next: Some((d, unseen - k)),
                    weight: behind,
                });
            }
        }
    }
    moves
}

/// Eden exploration of a uniformly random loopless sphere on `n_vertices`
/// vertices, sampling only the chain from exact count ratios.
pub fn eden_chain(n_vertices: usize, class: MapClass, seed: u64) -> Result<ExplorationTrace> {
    if class != MapClass::MultiEdge {
        return Err(MapError::Unsupported(
            "chain mode needs region counts that depend only on the frontier length; \
             this holds for MULTI_EDGE only"
                .into(),
        ));
    }
    if n_vertices < 3 {
        return Err(MapError::OutOfRange {
            what: "n_vertices",
            value: n_vertices,
            range: ">= 3",
        });
    }
    use num_traits::ToPrimitive;
    let mut counter = DiskCounter::new();
    let mut rng = SeedTree::new(seed).stream(StreamTag::Maps, 3);
    let mut state = (2, n_vertices - 2);
    let mut trace = ExplorationTrace::default();
    loop {
        trace.chain.push((state.0 - 2, state.1));
        let moves = chain_moves(&mut counter, state.0, state.1);
        let total = counter.multi_marked(state.0, state.1);
        let total_f = total.to_f64().expect("finite");
        let u: f64 = rng.random::<f64>() * total_f;
        let mut acc = 0.0;
        let mut chosen = moves.len() - 1;
        for (k, m) in moves.iter().enumerate() {
            acc += m.weight.to_f64().expect("finite");
            if u < acc {
                chosen = k;
                break;
            }
        }
        let m = &moves[chosen];
        let position = rng.random_range(0..state.0);
        trace.steps.push(PeelStep {
            position,
            frontier_len: state.0,
            kind: m.kind,
            face: usize::MAX,
        });
        trace.necklaces.push(Necklace {
            inner_length: state.0,
            outer_length: m.next.map_or(0, |s| s.0),
            triangles: match m.kind {
                NecklaceKind::Terminal => 2 * m.bubble.1 + m.bubble.0 - 2,
                NecklaceKind::Interior => 1,
                NecklaceKind::Boundary { .. } => 1 + 2 * m.bubble.1 + m.bubble.0 - 2,
            },
            kind: m.kind,
            bubble_perimeter: m.bubble.0,
            bubble: None,
        });
        match m.next {
            Some(s) => state = s,
            None => break,
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::enumerate_triangulations;

    fn all_colorings(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u32 << n).map(move |bits| (0..n).map(|v| bits >> v & 1 == 1).collect())
    }

    #[test]
    fn percolation_matches_the_direct_tracer() {
        for class in [MapClass::MultiEdge, MapClass::Simple] {
            for e in enumerate_triangulations(4, class).unwrap() {
                let m = &e.map;
                for c in all_colorings(m.n_vertices()) {
                    for rule in [ReferencePath::Leftmost, ReferencePath::Rightmost] {
                        let trace = percolation_exploration_with(m, &Coloring::Explicit(c.clone()), rule).unwrap();
                        trace.validate().unwrap();
                        let faces: Vec<usize> = trace.steps.iter().map(|s| s.face).collect();
                        assert_eq!(faces, trace_interface(m, &c, rule).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn triangles_are_conserved() {
        for e in enumerate_triangulations(5, MapClass::MultiEdge).unwrap() {
            for seed in 0..3 {
                let t = eden_exploration(&e.map, seed).unwrap();
                t.validate().unwrap();
                let total: usize = t.necklaces.iter().map(|n| n.triangles).sum();
                assert_eq!(total, e.map.count_kind(FaceKind::Triangle));
                for n in &t.necklaces {
                    if let Some(b) = &n.bubble {
                        b.validate_disk().unwrap();
                        assert_eq!(b.perimeter(), n.bubble_perimeter);
                    }
                }
                assert_eq!(replay(&e.map, &t.positions()).unwrap(), t);
            }
        }
    }

    #[test]
    fn coloring_size_is_checked() {
        let e = &enumerate_triangulations(4, MapClass::Simple).unwrap()[0];
        assert!(matches!(
            percolation_exploration(&e.map, &Coloring::Explicit(vec![true; 3])),
            Err(MapError::Coloring { expected: 4, found: 3 })
        ));
        assert!(percolation_exploration(&e.map, &Coloring::Seeded(4)).is_ok());
    }

    #[test]
    fn chain_moves_are_normalized() {
        use num_traits::ToPrimitive;
        let mut c = DiskCounter::new();
        for l in 2..=8 {
            for n in 0..=6 {
                let moves = chain_moves(&mut c, l, n);
                let total = c.multi_marked(l, n);
                let sum: num_bigint::BigUint = moves.iter().map(|m| m.weight.clone()).sum();
                assert_eq!(sum, total);
                let t = total.to_f64().unwrap();
                let p: f64 = moves.iter().map(|m| m.weight.to_f64().unwrap() / t).sum();
                assert!((p - 1.0).abs() <= 1e-15, "l={l} n={n} sum={p}");
            }
        }
    }

    #[test]
    fn chain_mode_rejects_simple() {
        assert!(matches!(eden_chain(5, MapClass::Simple, 1), Err(MapError::Unsupported(_))));
        let t = eden_chain(6, MapClass::MultiEdge, 1).unwrap();
        assert_eq!(t.necklaces.iter().map(|n| n.triangles).sum::<usize>(), 8);
    }
}
