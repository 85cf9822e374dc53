//! Exact laws of exploration statistics over an enumerated universe.
//!
//! Each map of the universe carries mass `1/|U|`. Eden paths carry the
//! product of `1/frontier length` over their steps, percolation traces
//! `2^-n` per coloring. Everything is scaled to integers over the common
//! denominator `|U| * Q` with `Q = lcm(1..=n)^(2n-3)`, which every path
//! weight divides.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::explore::{percolation_exploration, Coloring, ExplorationTrace, Explorer, Necklace, NecklaceKind};
use crate::generate::enumerate_triangulations;
use crate::map::{CombMap, MapClass};
use crate::reshuffle::rebuild;

/// Interns canonical codes of bubbles so keys stay small.
#[derive(Debug, Default)]
pub struct CodeBook {
    ids: HashMap<Vec<u32>, u32>,
}

impl CodeBook {
    pub fn id(&mut self, map: &CombMap) -> u32 {
        let n = self.ids.len() as u32;
        *self.ids.entry(map.canonical_code()).or_insert(n)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NecklaceKey {
    pub inner: usize,
    pub outer: usize,
    pub kind: NecklaceKind,
    pub perimeter: usize,
    pub bubble: Option<u32>,
}

impl NecklaceKey {
    pub fn of(n: &Necklace, book: &mut CodeBook) -> Self {
        NecklaceKey {
            inner: n.inner_length,
            outer: n.outer_length,
            kind: n.kind,
            perimeter: n.bubble_perimeter,
            bubble: n.bubble.as_ref().map(|b| book.id(b)),
        }
    }
}

/// Everything the comparisons look at; the chain and the triangle count
/// are functions of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceKey {
    pub chain: Vec<(usize, usize)>,
    pub necklaces: Vec<NecklaceKey>,
}

impl TraceKey {
    pub fn of(t: &ExplorationTrace, book: &mut CodeBook) -> Self {
        TraceKey {
            chain: t.chain.clone(),
            necklaces: t.necklaces.iter().map(|n| NecklaceKey::of(n, book)).collect(),
        }
    }

    pub fn triangles(&self) -> usize {
        self.necklaces.iter().filter(|n| n.kind != NecklaceKind::Terminal).count()
    }
}

/// Integer weights over a fixed common denominator.
#[derive(Debug, Clone)]
pub struct ExactLaw<K: Eq + Hash> {
    pub weights: HashMap<K, BigUint>,
    pub denominator: BigUint,
}

impl<K: Eq + Hash + Clone> ExactLaw<K> {
    pub fn new(denominator: BigUint) -> Self {
        ExactLaw {
            weights: HashMap::new(),
            denominator,
        }
    }

    pub fn add(&mut self, key: K, w: &BigUint) {
        *self.weights.entry(key).or_insert_with(BigUint::zero) += w;
    }

    pub fn total(&self) -> BigUint {
        self.weights.values().sum()
    }

    pub fn pushforward<J: Eq + Hash + Clone>(&self, f: impl Fn(&K) -> J) -> ExactLaw<J> {
        let mut out = ExactLaw::new(self.denominator.clone());
        for (k, w) in &self.weights {
            out.add(f(k), w);
        }
        out
    }

    pub fn probability(&self, key: &K) -> BigRational {
        let w = self.weights.get(key).cloned().unwrap_or_default();
        BigRational::new(w.into(), self.denominator.clone().into())
    }
}

/// Total variation distance between two laws with the same denominator.
pub fn total_variation<K: Eq + Hash + Clone>(a: &ExactLaw<K>, b: &ExactLaw<K>) -> BigRational {
    assert_eq!(a.denominator, b.denominator, "laws must share a denominator");
    let zero = BigUint::zero();
    let mut sum = BigUint::zero();
    for (k, wa) in &a.weights {
        let wb = b.weights.get(k).unwrap_or(&zero);
        sum += if wa >= wb { wa - wb } else { wb - wa };
    }
    for (k, wb) in &b.weights {
        if !a.weights.contains_key(k) {
            sum += wb;
        }
    }
    BigRational::new(sum.into(), (b.denominator.clone() * 2u32).into())
}

fn lcm_upto(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
}

/// Scale `Q` under which every path weight of an `n`-vertex exploration is
/// an integer.
pub fn path_scale(n_vertices: usize) -> BigUint {
    num_traits::pow(lcm_upto(n_vertices), 2 * n_vertices - 3)
}

fn eden_paths(ex: Explorer<'_>, product: u64, scale: &BigUint, visit: &mut dyn FnMut(&ExplorationTrace, BigUint)) {
    if ex.is_done() {
        visit(ex.trace(), scale / product);
        return;
    }
    let l = ex.frontier().len();
    for i in 0..l {
        let mut c = ex.clone();
        c.step(i).expect("every frontier position can be peeled");
        eden_paths(c, product * l as u64, scale, visit);
    }
}

/// Visit every Eden path on `map` with its weight `Q / prod(frontier lengths)`.
pub fn for_each_eden_path(map: &CombMap, scale: &BigUint, visit: &mut dyn FnMut(&ExplorationTrace, BigUint)) -> Result<()> {
    eden_paths(Explorer::new(map)?, 1, scale, visit);
    Ok(())
}

/// Exact Eden and percolation laws over one enumerated universe.
pub struct UniverseLaws {
    pub class: MapClass,
    pub n_vertices: usize,
    pub universe: usize,
    pub scale: BigUint,
    pub book: CodeBook,
    pub eden: ExactLaw<TraceKey>,
    pub percolation: ExactLaw<TraceKey>,
    /// Percolation law with traces grouped by necklace sequence, keeping the
    /// necklaces themselves for the reshuffle.
    pub percolation_necklaces: HashMap<Vec<NecklaceKey>, (Vec<Necklace>, BigUint)>,
}

/// Statistics compared between the two explorations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Chain,
    TriangleCount,
    NecklaceSequence,
    /// Reshuffled percolation against Eden, jointly over map and peel
    /// positions.
    Reshuffle,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::Chain,
        Statistic::TriangleCount,
        Statistic::NecklaceSequence,
        Statistic::Reshuffle,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub class: MapClass,
    pub n: usize,
    pub statistic: Statistic,
    /// Decimal strings; the values can exceed 64 bits.
    pub tv_distance_num: String,
    pub tv_distance_den: String,
}

impl LawReport {
    pub fn new(class: MapClass, n: usize, statistic: Statistic, tv: &BigRational) -> Self {
        LawReport {
            class,
            n,
            statistic,
            tv_distance_num: tv.numer().to_string(),
            tv_distance_den: tv.denom().to_string(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.tv_distance_num == "0"
    }
}

impl UniverseLaws {
    pub fn compute(n_vertices: usize, class: MapClass) -> Result<Self> {
        let maps = enumerate_triangulations(n_vertices, class)?;
        let scale = path_scale(n_vertices);
        let denominator = scale.clone() * maps.len();
        let mut book = CodeBook::default();
        let mut eden = ExactLaw::new(denominator.clone());
        let mut percolation = ExactLaw::new(denominator.clone());
        let mut percolation_necklaces: HashMap<Vec<NecklaceKey>, (Vec<Necklace>, BigUint)> = HashMap::new();
        let coloring_weight = &scale >> n_vertices;
        for e in &maps {
            let mut local: HashMap<TraceKey, BigUint> = HashMap::new();
            for_each_eden_path(&e.map, &scale, &mut |t, w| {
                *local.entry(TraceKey::of(t, &mut book)).or_default() += w;
            })?;
            for (k, w) in local {
                eden.add(k, &w);
            }
            for bits in 0..1u64 << n_vertices {
                let colors = (0..n_vertices).map(|v| bits >> v & 1 == 1).collect();
                let t = percolation_exploration(&e.map, &Coloring::Explicit(colors))?;
                let key = TraceKey::of(&t, &mut book);
                let entry = percolation_necklaces
                    .entry(key.necklaces.clone())
                    .or_insert_with(|| (t.necklaces.clone(), BigUint::zero()));
                entry.1 += &coloring_weight;
                percolation.add(key, &coloring_weight);
            }
        }
        Ok(UniverseLaws {
            class,
            n_vertices,
            universe: maps.len(),
            scale,
            book,
            eden,
            percolation,
            percolation_necklaces,
        })
    }

    pub fn tv(&self, statistic: Statistic) -> Result<BigRational> {
        Ok(match statistic {
            Statistic::Chain => {
                let f = |k: &TraceKey| k.chain.clone();
                total_variation(&self.eden.pushforward(f), &self.percolation.pushforward(f))
            }
            Statistic::TriangleCount => {
                let f = |k: &TraceKey| k.triangles();
                total_variation(&self.eden.pushforward(f), &self.percolation.pushforward(f))
            }
            Statistic::NecklaceSequence => {
                let f = |k: &TraceKey| k.necklaces.clone();
                total_variation(&self.eden.pushforward(f), &self.percolation.pushforward(f))
            }
            Statistic::Reshuffle => self.reshuffle_tv()?,
        })
    }

    pub fn report(&self, statistic: Statistic) -> Result<LawReport> {
        Ok(LawReport::new(self.class, self.n_vertices, statistic, &self.tv(statistic)?))
    }

    /// Distance between the reshuffled-percolation law and the Eden law of
    /// (map, peel positions).
    ///
    /// A necklace sequence `s` with percolation mass `w_s` and positions `p`
    /// puts mass `w_s / prod(L)` on the glued map. Eden puts `1/(|U| prod(L))`
    /// on every (map, positions) pair, and such a pair is hit by exactly one
    /// sequence, the one its exploration produces. So the distance is the
    /// mismatch on the glued pairs plus whatever Eden mass no percolation
    /// sequence reaches.
    fn reshuffle_tv(&self) -> Result<BigRational> {
        let q = &self.scale;
        let u = BigUint::from(self.universe);
        let mut mismatch = BigUint::zero();
        let mut covered = BigUint::zero();
        let mut book = CodeBook::default();
        for (necklaces, w) in self.percolation_necklaces.values() {
            let lengths: Vec<usize> = necklaces.iter().map(|n| n.inner_length).collect();
            let target_key: Vec<NecklaceKey> = necklaces.iter().map(|n| NecklaceKey::of(n, &mut book)).collect();
            let mut positions = vec![0usize; lengths.len()];
            loop {
                let product: u64 = lengths.iter().map(|&l| l as u64).product();
                let share = q / product;
                let hit = match rebuild(necklaces, &positions) {
                    Ok(m) if m.in_class(self.class) => {
                        let mut ex = Explorer::new(&m)?;
                        for &p in &positions {
                            ex.step(p)?;
                        }
                        let again: Vec<NecklaceKey> =
                            ex.trace().necklaces.iter().map(|n| NecklaceKey::of(n, &mut book)).collect();
                        again == target_key
                    }
                    _ => false,
                };
                let eden_side = if hit { q.clone() } else { BigUint::zero() };
                mismatch += if *w >= eden_side { w - &eden_side } else { &eden_side - w } * &share;
                if hit {
                    covered += q * &share;
                }
                // odometer over positions
                let mut k = 0;
                while k < positions.len() {
                    positions[k] += 1;
                    if positions[k] < lengths[k] {
                        break;
                    }
                    positions[k] = 0;
                    k += 1;
                }
                if k == positions.len() {
                    break;
                }
            }
        }
        let denominator = &u * q * q;
        let uncovered = &denominator - covered;
        Ok(BigRational::new((mismatch + uncovered).into(), (denominator * 2u32).into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_are_normalized() {
        let laws = UniverseLaws::compute(4, MapClass::Simple).unwrap();
        assert_eq!(laws.universe, 7);
        assert_eq!(laws.eden.total(), laws.eden.denominator);
        assert_eq!(laws.percolation.total(), laws.percolation.denominator);
        let w: BigUint = laws.percolation_necklaces.values().map(|v| v.1.clone()).sum();
        assert_eq!(w, laws.percolation.denominator);
    }

    #[test]
    fn total_variation_of_disjoint_laws_is_one() {
        let mut a = ExactLaw::new(BigUint::from(4u32));
        let mut b = ExactLaw::new(BigUint::from(4u32));
        a.add(1, &BigUint::from(4u32));
        b.add(2, &BigUint::from(1u32));
        b.add(3, &BigUint::from(3u32));
        assert_eq!(total_variation(&a, &b), BigRational::one());
        assert_eq!(total_variation(&a, &a), BigRational::zero());
    }

    #[test]
    fn multi_edge_four_vertices_agree_exactly() {
        let laws = UniverseLaws::compute(4, MapClass::MultiEdge).unwrap();
        for s in Statistic::ALL {
            assert!(laws.tv(s).unwrap().is_zero(), "{s:?}");
        }
    }
}
