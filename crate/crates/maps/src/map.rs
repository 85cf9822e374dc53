//! Rooted combinatorial maps stored as half-edge permutations.
//!
//! Half-edge `h` runs along the boundary of `face(h)` with the face on its
//! left; `next(h)` is the following half-edge of that face and `twin(h)` the
//! opposite half-edge of the same edge. The rotation at a vertex is
//! `h ↦ next(twin(h))`, which keeps the origin fixed. The root is half-edge 0.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{MapError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceKind {
    Triangle,
    /// The 2-gon the exploration starts from.
    Start,
    /// The 2-gon the exploration is looking for.
    Target,
    /// Outer face of a disk.
    Outer,
}

impl FaceKind {
    fn tag(self) -> u32 {
        match self {
            FaceKind::Triangle => 0,
            FaceKind::Start => 1,
            FaceKind::Target => 2,
            FaceKind::Outer => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FaceKind::Triangle => "triangle",
            FaceKind::Start => "start",
            FaceKind::Target => "target",
            FaceKind::Outer => "outer",
        }
    }
}

/// Which triangulations are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MapClass {
    /// Simple graph once each marked 2-gon is collapsed to one edge.
    Simple,
    /// Multiple edges allowed, loops forbidden.
    MultiEdge,
}

impl std::fmt::Display for MapClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MapClass::Simple => "SIMPLE",
            MapClass::MultiEdge => "MULTI_EDGE",
        })
    }
}

impl std::str::FromStr for MapClass {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "SIMPLE" => Ok(MapClass::Simple),
            "MULTI_EDGE" | "MULTI" => Ok(MapClass::MultiEdge),
            _ => Err(MapError::Unsupported(format!("unknown map class `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombMap {
    next: Vec<usize>,
    twin: Vec<usize>,
    face: Vec<usize>,
    kinds: Vec<FaceKind>,
    origin: Vec<usize>,
    first: Vec<usize>,
    n_vertices: usize,
}

fn vertex_orbits(next: &[usize], twin: &[usize]) -> (Vec<usize>, usize) {
    let mut origin = vec![usize::MAX; next.len()];
    let mut count = 0;
    for start in 0..next.len() {
        if origin[start] != usize::MAX {
            continue;
        }
        let mut h = start;
        loop {
            origin[h] = count;
            h = next[twin[h]];
            if h == start {
                break;
            }
        }
        count += 1;
    }
    (origin, count)
}

impl CombMap {
    /// Build from the face and edge permutations; `face[h]` indexes `kinds`.
    pub fn new(next: Vec<usize>, twin: Vec<usize>, face: Vec<usize>, kinds: Vec<FaceKind>) -> Result<Self> {
        let n = next.len();
        if n == 0 || twin.len() != n || face.len() != n {
            return Err(MapError::InvalidMap("permutation lengths differ or are empty".into()));
        }
        let mut seen = vec![false; n];
        for &x in &next {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(MapError::InvalidMap("next is not a permutation".into()));
            }
        }
        for h in 0..n {
            if twin[h] >= n || twin[h] == h || twin[twin[h]] != h {
                return Err(MapError::InvalidMap(format!("twin is not a fixed-point-free involution at {h}")));
            }
            if face[h] >= kinds.len() || face[next[h]] != face[h] {
                return Err(MapError::InvalidMap(format!("face labels disagree with next at {h}")));
            }
        }
        let (origin, n_vertices) = vertex_orbits(&next, &twin);
        let mut first = vec![usize::MAX; kinds.len()];
        for (h, &f) in face.iter().enumerate().rev() {
            first[f] = h;
        }
        if first.contains(&usize::MAX) {
            return Err(MapError::InvalidMap("a face has no half-edges".into()));
        }
        Ok(CombMap {
            next,
            twin,
            face,
            kinds,
            origin,
            first,
            n_vertices,
        })
    }

    pub fn n_half_edges(&self) -> usize {
        self.next.len()
    }

    pub fn n_edges(&self) -> usize {
        self.next.len() / 2
    }

    pub fn n_faces(&self) -> usize {
        self.kinds.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn next(&self, h: usize) -> usize {
        self.next[h]
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn face(&self, h: usize) -> usize {
        self.face[h]
    }

    pub fn kind(&self, f: usize) -> FaceKind {
        self.kinds[f]
    }

    pub fn kind_of(&self, h: usize) -> FaceKind {
        self.kinds[self.face[h]]
    }

    /// Next outgoing half-edge around the origin of `h`.
    pub fn rotate(&self, h: usize) -> usize {
        self.next[self.twin[h]]
    }

    /// Vertex id of the origin of `h`.
    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    pub fn target(&self, h: usize) -> usize {
        self.origin[self.next[h]]
    }

    /// Half-edges of face `f`, starting from its smallest half-edge.
    pub fn face_cycle(&self, f: usize) -> Vec<usize> {
        self.cycle_from(self.first[f])
    }

    pub fn cycle_from(&self, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut h = self.next[start];
        while h != start {
            out.push(h);
            h = self.next[h];
        }
        out
    }

    pub fn faces_of_kind(&self, kind: FaceKind) -> Vec<usize> {
        (0..self.n_faces()).filter(|&f| self.kinds[f] == kind).collect()
    }

    pub fn count_kind(&self, kind: FaceKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// A half-edge of the first face of the given kind.
    pub fn half_edge_of_kind(&self, kind: FaceKind) -> Option<usize> {
        (0..self.n_half_edges()).find(|&h| self.kind_of(h) == kind)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_half_edges()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(h) = stack.pop() {
            for x in [self.next[h], self.twin[h]] {
                if !seen[x] {
                    seen[x] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
        count == self.n_half_edges()
    }

    pub fn has_loop(&self) -> bool {
        (0..self.n_half_edges()).any(|h| self.origin(h) == self.target(h))
    }

    fn face_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_faces()];
        for &f in &self.face {
            deg[f] += 1;
        }
        deg
    }

    /// Sphere with triangles, one start 2-gon holding the root and one
    /// target 2-gon.
    pub fn validate_sphere(&self) -> Result<()> {
        let bad = |why: &str| Err(MapError::InvalidMap(why.to_string()));
        if !self.is_connected() {
            return bad("not connected");
        }
        if self.euler_characteristic() != 2 {
            return bad("Euler characteristic is not 2");
        }
        let deg = self.face_degrees();
        for (f, &k) in self.kinds.iter().enumerate() {
            let want = match k {
                FaceKind::Triangle => 3,
                FaceKind::Start | FaceKind::Target => 2,
                FaceKind::Outer => return bad("sphere has an outer face"),
            };
            if deg[f] != want {
                return bad("face has the wrong degree");
            }
        }
        if self.count_kind(FaceKind::Start) != 1 || self.count_kind(FaceKind::Target) != 1 {
            return bad("need exactly one start and one target 2-gon");
        }
        if self.kind_of(0) != FaceKind::Start {
            return bad("root is not on the start 2-gon");
        }
        Ok(())
    }

    /// Disk: root on the outer face, every other face a triangle (or the
    /// target 2-gon), boundary a simple cycle.
    pub fn validate_disk(&self) -> Result<()> {
        let bad = |why: &str| Err(MapError::InvalidMap(why.to_string()));
        if !self.is_connected() || self.euler_characteristic() != 2 {
            return bad("not a planar connected map");
        }
        if self.kind_of(0) != FaceKind::Outer || self.count_kind(FaceKind::Outer) != 1 {
            return bad("root must be on the unique outer face");
        }
        let deg = self.face_degrees();
        for (f, &k) in self.kinds.iter().enumerate() {
            let ok = match k {
                FaceKind::Triangle => deg[f] == 3,
                FaceKind::Target => deg[f] == 2,
                FaceKind::Outer => deg[f] >= 2,
                FaceKind::Start => false,
            };
            if !ok {
                return bad("face has the wrong degree or kind");
            }
        }
        if !self.has_simple_boundary() {
            return bad("boundary is not a simple cycle");
        }
        Ok(())
    }

    /// The outer face visits each of its vertices once.
    pub fn has_simple_boundary(&self) -> bool {
        let Some(h) = self.half_edge_of_kind(FaceKind::Outer) else {
            return true;
        };
        let cycle = self.cycle_from(h);
        let vs: HashSet<usize> = cycle.iter().map(|&x| self.origin(x)).collect();
        vs.len() == cycle.len()
    }

    /// Perimeter of the outer face.
    pub fn perimeter(&self) -> usize {
        self.half_edge_of_kind(FaceKind::Outer).map_or(0, |h| self.cycle_from(h).len())
    }

    /// Edge id of a half-edge: the smaller of the pair.
    pub fn edge(&self, h: usize) -> usize {
        h.min(self.twin[h])
    }

    /// Edge ids with the two sides of every start or target 2-gon merged.
    pub fn collapsed_edges(&self) -> Vec<usize> {
        let n = self.n_half_edges();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let up = p[y];
                p[y] = r;
                y = up;
            }
            r
        }
        for h in 0..n {
            if matches!(self.kind_of(h), FaceKind::Start | FaceKind::Target) {
                let (a, b) = (find(&mut parent, self.edge(h)), find(&mut parent, self.edge(self.next[h])));
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..n).map(|h| find(&mut parent, self.edge(h))).collect()
    }

    /// No loops; collapsing the marked 2-gons leaves a simple graph; no two
    /// triangles share their vertex set.
    pub fn is_simple(&self) -> bool {
        if self.has_loop() {
            return false;
        }
        let collapsed = self.collapsed_edges();
        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        for h in 0..self.n_half_edges() {
            let (u, v) = (self.origin(h), self.target(h));
            let key = (u.min(v), u.max(v));
            match pairs.get(&key) {
                Some(&e) if e != collapsed[h] => return false,
                Some(_) => {}
                None => {
                    pairs.insert(key, collapsed[h]);
                }
            }
        }
        let mut triples = HashSet::new();
        for f in self.faces_of_kind(FaceKind::Triangle) {
            let mut vs: Vec<usize> = self.face_cycle(f).iter().map(|&h| self.origin(h)).collect();
            vs.sort_unstable();
            if !triples.insert(vs) {
                return false;
            }
        }
        true
    }

    pub fn in_class(&self, class: MapClass) -> bool {
        match class {
            MapClass::Simple => self.is_simple(),
            MapClass::MultiEdge => !self.has_loop(),
        }
    }

    /// Breadth-first relabeling from `root`: `order[k]` is the half-edge that
    /// receives label `k`.
    fn bfs_order(&self, root: usize) -> Vec<usize> {
        let n = self.n_half_edges();
        let mut label = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        label[root] = 0;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let h = order[head];
            head += 1;
            for x in [self.next[h], self.twin[h]] {
                if label[x] == usize::MAX {
                    label[x] = order.len();
                    order.push(x);
                }
            }
        }
        order
    }

    /// Code that identifies the map rooted at `root` up to isomorphism.
    pub fn code_from(&self, root: usize) -> Vec<u32> {
        let order = self.bfs_order(root);
        let mut label = vec![0u32; order.len()];
        for (k, &h) in order.iter().enumerate() {
            label[h] = k as u32;
        }
        let mut code = Vec::with_capacity(3 * order.len());
        for &h in &order {
            code.push(label[self.next[h]]);
            code.push(label[self.twin[h]]);
            code.push(self.kind_of(h).tag());
        }
        code
    }

    pub fn canonical_code(&self) -> Vec<u32> {
        self.code_from(0)
    }

    /// The same map with half-edges renumbered so that `root` becomes 0.
    pub fn rerooted(&self, root: usize) -> CombMap {
        let order = self.bfs_order(root);
        let mut label = vec![0usize; order.len()];
        for (k, &h) in order.iter().enumerate() {
            label[h] = k;
        }
        let mut face_label = vec![usize::MAX; self.n_faces()];
        let mut kinds = Vec::with_capacity(self.n_faces());
        for &h in &order {
            let f = self.face[h];
            if face_label[f] == usize::MAX {
                face_label[f] = kinds.len();
                kinds.push(self.kinds[f]);
            }
        }
        let next = order.iter().map(|&h| label[self.next[h]]).collect();
        let twin = order.iter().map(|&h| label[self.twin[h]]).collect();
        let face = order.iter().map(|&h| face_label[self.face[h]]).collect();
        CombMap::new(next, twin, face, kinds).expect("relabeling preserves validity")
    }

    /// Swap the roles of the start and target 2-gons, rooting at the
    /// half-edge of the old target that follows `side` steps from its first.
    pub fn swapped_marks(&self, side: usize) -> CombMap {
        let mut m = self.clone();
        for k in &mut m.kinds {
            *k = match *k {
                FaceKind::Start => FaceKind::Target,
                FaceKind::Target => FaceKind::Start,
                other => other,
            };
        }
        let mut h = m.half_edge_of_kind(FaceKind::Start).expect("map has a target 2-gon");
        for _ in 0..side {
            h = m.next[h];
        }
        m.rerooted(h)
    }

    /// Vertex degrees after collapsing the marked 2-gons.
    pub fn collapsed_degrees(&self) -> Vec<usize> {
        let collapsed = self.collapsed_edges();
        let mut edges: HashSet<usize> = HashSet::new();
        let mut deg = vec![0; self.n_vertices];
        for h in 0..self.n_half_edges() {
            if edges.insert(collapsed[h]) {
                deg[self.origin(h)] += 1;
                deg[self.target(h)] += 1;
            }
        }
        deg
    }

    /// Plain-text exchange format; see [`CombMap::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("map v1\n");
        s.push_str(&format!(
            "counts {} {} {}\n",
            self.n_vertices,
            self.n_edges(),
            self.n_faces()
        ));
        let mut seen = vec![false; self.n_half_edges()];
        for h in 0..self.n_half_edges() {
            if !seen[h] {
                seen[h] = true;
                seen[self.twin[h]] = true;
                s.push_str(&format!("edge {} {} {} {}\n", h, self.twin[h], self.origin(h), self.target(h)));
            }
        }
        for v in 0..self.n_vertices {
            let start = (0..self.n_half_edges()).find(|&h| self.origin(h) == v).unwrap();
            let mut rot = vec![start];
            let mut h = self.rotate(start);
            while h != start {
                rot.push(h);
                h = self.rotate(h);
            }
            let list: Vec<String> = rot.iter().map(|h| h.to_string()).collect();
            s.push_str(&format!("rotation {} {}\n", v, list.join(" ")));
        }
        for f in 0..self.n_faces() {
            if self.kinds[f] != FaceKind::Triangle {
                let h = (0..self.n_half_edges()).find(|&h| self.face[h] == f).unwrap();
                s.push_str(&format!("face {} {}\n", self.kinds[f].name(), h));
            }
        }
        s
    }

    /// Parse the exchange format:
    ///
    /// ```text
    /// map v1
    /// counts <vertices> <edges> <faces>
    /// edge <h> <twin> <origin> <target>      one line per edge
    /// rotation <vertex> <h> <h> ...          outgoing half-edges in rotation order
    /// face <start|target|outer> <h>          faces that are not triangles
    /// ```
    ///
    /// Half-edge 0 is the root. Faces are the orbits of `next(h) =
    /// rotation(twin(h))`.
    pub fn from_text(text: &str) -> Result<CombMap> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, reason: &str| MapError::Parse {
            line,
            reason: reason.to_string(),
        };
        match lines.next() {
            Some((_, "map v1")) => {}
            Some((l, _)) => return Err(perr(l, "expected header `map v1`")),
            None => return Err(perr(0, "empty input")),
        }
        let mut twin: Vec<Option<usize>> = Vec::new();
        let mut rotation: Vec<Option<usize>> = Vec::new();
        let mut marked: Vec<(FaceKind, usize, usize)> = Vec::new();
        let mut counts = None;
        for (l, line) in lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            let nums = |from: usize| -> Result<Vec<usize>> {
                words[from..]
                    .iter()
                    .map(|w| w.parse::<usize>().map_err(|_| perr(l, "expected an integer")))
                    .collect()
            };
            match words[0] {
                "counts" => {
                    let c = nums(1)?;
                    if c.len() != 3 {
                        return Err(perr(l, "counts needs three integers"));
                    }
                    twin = vec![None; 2 * c[1]];
                    rotation = vec![None; 2 * c[1]];
                    counts = Some((c[0], c[1], c[2]));
                }
                "edge" => {
                    let e = nums(1)?;
                    if e.len() != 4 || e[0].max(e[1]) >= twin.len() || e[0] == e[1] {
                        return Err(perr(l, "bad edge line"));
                    }
                    twin[e[0]] = Some(e[1]);
                    twin[e[1]] = Some(e[0]);
                }
                "rotation" => {
                    let r = nums(1)?;
                    let hs = &r[1..];
                    if hs.is_empty() || hs.iter().any(|&h| h >= rotation.len()) {
                        return Err(perr(l, "bad rotation line"));
                    }
                    for (k, &h) in hs.iter().enumerate() {
                        rotation[h] = Some(hs[(k + 1) % hs.len()]);
                    }
                }
                "face" => {
                    let kind = match words.get(1) {
                        Some(&"start") => FaceKind::Start,
                        Some(&"target") => FaceKind::Target,
                        Some(&"outer") => FaceKind::Outer,
                        _ => return Err(perr(l, "unknown face kind")),
                    };
                    let h = nums(2)?;
                    if h.len() != 1 {
                        return Err(perr(l, "face line names one half-edge"));
                    }
                    marked.push((kind, h[0], l));
                }
                _ => return Err(perr(l, "unknown record")),
            }
        }
        let Some((nv, _, nf)) = counts else {
            return Err(perr(0, "missing counts line"));
        };
        let twin: Vec<usize> = twin
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| perr(0, "some half-edge has no twin"))?;
        let rotation: Vec<usize> = rotation
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| perr(0, "some half-edge is missing from the rotations"))?;
        let next: Vec<usize> = (0..twin.len()).map(|h| rotation[twin[h]]).collect();
        let mut face = vec![usize::MAX; next.len()];
        let mut kinds = Vec::new();
        for h in 0..next.len() {
            if face[h] == usize::MAX {
                let mut x = h;
                while face[x] == usize::MAX {
                    face[x] = kinds.len();
                    x = next[x];
                }
                kinds.push(FaceKind::Triangle);
            }
        }
        for (kind, h, l) in marked {
            if h >= face.len() {
                return Err(perr(l, "face half-edge out of range"));
            }
            kinds[face[h]] = kind;
        }
        let map = CombMap::new(next, twin, face, kinds)?;
        if map.n_vertices() != nv || map.n_faces() != nf {
            return Err(perr(0, "counts disagree with the rotation system"));
        }
        Ok(map)
    }
}
