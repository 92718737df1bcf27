//! Named example graphs and seeded random generators for property tests.
//!
//! Random hyperelliptic graphs are double covers of labeled trees. Each tree
//! vertex is either fixed (one vertex upstairs) or non-fixed (a swapped pair
//! `v{i}`, `v{i}'`), and tree edge `k` lifts to the swapped pair `e{k}`,
//! `e{k}'`. An edge between two non-fixed vertices can lift straight or
//! crossed, and a seeded coin decides which.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bogomolov::{BogomolovError, FiberConfiguration};
use crate::graph::{one_point_sum, Divisor, Edge, MetrizedGraph};
use crate::hyperelliptic::{EdgeKind, HyperellipticError, HyperellipticGraph, Involution};
use crate::rational::{int, rat, Rational};

/// Largest number of edge classes a random graph may have.
pub const MAX_RANDOM_CLASSES: usize = 16;

const ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TestkitError {
    #[error("size bounds {min}..={max} cannot be met")]
    InfeasibleBounds { min: usize, max: usize },
    #[error("tree vertex {0} is non-fixed but has fewer than three tree edges")]
    DegreeTooSmall(usize),
    #[error("tree edge {0} is out of range or a loop")]
    BadTreeEdge(usize),
    #[error(transparent)]
    Hyperelliptic(#[from] HyperellipticError),
    #[error(transparent)]
    Bogomolov(#[from] BogomolovError),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two vertices `P`, `Q` joined by the swapped pair `e1`, `e2` of length `l`.
pub fn simple_graph(l: Rational) -> HyperellipticGraph {
    let g = MetrizedGraph::new(
        ["P", "Q"],
        vec![Edge::new("e1", "P", "Q", l.clone()), Edge::new("e2", "P", "Q", l)],
    )
    .expect("valid graph");
    HyperellipticGraph::new(g, Involution::from_swaps([], [("e1", "e2")])).expect("hyperelliptic")
}

/// The elementary graph of size `n`: non-fixed `Q`, `Q'` and fixed
/// `P1..P{n+1}`, with `e{i}` from `Q` to `P{i}` and `e{i}'` from `Q'` to
/// `P{i}`. `lengths` gives one length per class.
pub fn elementary(n: usize, lengths: &[Rational]) -> HyperellipticGraph {
    assert!(n >= 2, "elementary graphs have size at least two");
    assert_eq!(lengths.len(), n + 1, "one length per edge class");
    let mut vertices = vec!["Q".to_string(), "Q'".to_string()];
    let mut edges = Vec::new();
    let mut swaps = Vec::new();
    for (i, l) in lengths.iter().enumerate() {
        let p = format!("P{}", i + 1);
        let e = format!("e{}", i + 1);
        let e2 = format!("{e}'");
        edges.push(Edge::new(e.clone(), "Q", p.clone(), l.clone()));
        edges.push(Edge::new(e2.clone(), "Q'", p.clone(), l.clone()));
        swaps.push((e, e2));
        vertices.push(p);
    }
    let g = MetrizedGraph::new(vertices, edges).expect("valid graph");
    let inv = Involution::from_swaps([("Q", "Q'")], swaps.iter().map(|(a, b)| (a.as_str(), b.as_str())));
    HyperellipticGraph::new(g, inv).expect("hyperelliptic")
}

/// A size-four irreducible graph mixing disjoint and one-jointed edges,
/// unit lengths.
///
/// Non-fixed `P1, P2, P3` (and primes) form a ladder with rungs
/// `e1 = P1P2`, `e2 = P2P3`; fixed `O, Q1..Q4` hang off it through `e0`
/// and `f1..f4`.
pub fn ladder() -> HyperellipticGraph {
    let spec = [
        ("e0", "O", "P1"),
        ("f1", "Q1", "P1"),
        ("e1", "P1", "P2"),
        ("e2", "P2", "P3"),
        ("f2", "P2", "Q2"),
        ("f3", "P3", "Q3"),
        ("f4", "P3", "Q4"),
    ];
    let prime = |v: &str| {
        if v.starts_with('P') {
            format!("{v}'")
        } else {
            v.to_string()
        }
    };
    let mut edges = Vec::new();
    let mut swaps = Vec::new();
    for (id, u, v) in spec {
        edges.push(Edge::new(id, u, v, int(1)));
        edges.push(Edge::new(format!("{id}'"), prime(u), prime(v), int(1)));
        swaps.push((id.to_string(), format!("{id}'")));
    }
    let vertices = ["O", "Q1", "Q2", "Q3", "Q4", "P1", "P2", "P3", "P1'", "P2'", "P3'"];
    let g = MetrizedGraph::new(vertices, edges).expect("valid graph");
    let inv = Involution::from_swaps(
        [("P1", "P1'"), ("P2", "P2'"), ("P3", "P3'")],
        swaps.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    );
    HyperellipticGraph::new(g, inv).expect("hyperelliptic")
}

/// One-point sum of two hyperelliptic graphs glued at fixed vertices. Ids of
/// `h2` get `prefix`, and the joint keeps the name `v1`.
pub fn wedge(
    h1: &HyperellipticGraph,
    v1: &str,
    h2: &HyperellipticGraph,
    v2: &str,
    prefix: &str,
) -> Result<HyperellipticGraph, TestkitError> {
    for (h, v) in [(h1, v1), (h2, v2)] {
        if !h.is_fixed(v) {
            return Err(HyperellipticError::NotHyperellipticConfiguration(format!("{v:?} is not fixed")).into());
        }
    }
    let g2 = h2.graph().with_prefix(prefix);
    let joint = format!("{prefix}{v2}");
    let g = one_point_sum(h1.graph(), v1, &g2, &joint).map_err(HyperellipticError::from)?;
    let tag = |m: &BTreeMap<String, String>| -> Vec<(String, String)> {
        m.iter()
            .map(|(a, b)| (format!("{prefix}{a}"), format!("{prefix}{b}")))
            .collect()
    };
    let mut vmap = h1.involution().vertex_map().clone();
    vmap.extend(tag(h2.involution().vertex_map()));
    let mut emap = h1.involution().edge_map().clone();
    emap.extend(tag(h2.involution().edge_map()));
    Ok(HyperellipticGraph::new(g, Involution::from_maps(vmap, emap))?)
}

/// Small hand-built graphs covering every edge kind, simple and composite
/// shapes, and non-unit lengths.
pub fn named_corpus() -> Vec<(&'static str, HyperellipticGraph)> {
    let g2 = elementary(2, &[int(1), rat(1, 2), int(2)]);
    let g3 = elementary(3, &[int(1), int(2), int(3), rat(1, 3)]);
    let g4 = elementary(4, &vec![int(1); 5]);
    let sg = simple_graph(rat(3, 2));
    let mut out = vec![
        ("sg", sg.clone()),
        ("g2", g2.clone()),
        ("g3", g3),
        ("g4", g4),
        ("ladder", ladder()),
    ];
    out.push(("g2+sg", wedge(&g2, "P1", &sg, "P", "b.").expect("fixed joint")));
    out.push((
        "ladder+g2",
        wedge(&ladder(), "O", &g2, "P2", "b.").expect("fixed joint"),
    ));
    let crossed = CoverSpec {
        non_fixed: vec![true, true, false, false, false, false, false],
        edges: vec![
            TreeEdge {
                a: 0,
                b: 1,
                length: int(2),
                crossed: true,
            },
            TreeEdge {
                a: 0,
                b: 2,
                length: int(1),
                crossed: false,
            },
            TreeEdge {
                a: 0,
                b: 3,
                length: rat(1, 2),
                crossed: false,
            },
            TreeEdge {
                a: 1,
                b: 4,
                length: int(1),
                crossed: false,
            },
            TreeEdge {
                a: 1,
                b: 5,
                length: int(3),
                crossed: false,
            },
            TreeEdge {
                a: 4,
                b: 6,
                length: int(1),
                crossed: false,
            },
        ],
    };
    out.push(("crossed", crossed.build().expect("valid cover")));
    out
}

/// An edge of the quotient tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub length: Rational,
    /// For two non-fixed ends: lift to `a-b'`, `a'-b` instead of `a-b`,
    /// `a'-b'`.
    pub crossed: bool,
}

/// A labeled quotient tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpec {
    /// `true` marks a non-fixed vertex.
    pub non_fixed: Vec<bool>,
    pub edges: Vec<TreeEdge>,
}

impl CoverSpec {
    fn degree(&self, x: usize) -> usize {
        self.edges.iter().filter(|e| e.a == x || e.b == x).count()
    }

    /// Builds the double cover.
    pub fn build(&self) -> Result<HyperellipticGraph, TestkitError> {
        let n = self.non_fixed.len();
        for (k, e) in self.edges.iter().enumerate() {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(TestkitError::BadTreeEdge(k));
            }
        }
        for x in 0..n {
            if self.non_fixed[x] && self.degree(x) < 3 {
                return Err(TestkitError::DegreeTooSmall(x));
            }
        }
        let name = |x: usize, upper: bool| {
            if upper && self.non_fixed[x] {
                format!("v{x}'")
            } else {
                format!("v{x}")
            }
        };
        let mut vertices = Vec::new();
        let mut vswaps = Vec::new();
        for x in 0..n {
            vertices.push(name(x, false));
            if self.non_fixed[x] {
                vertices.push(name(x, true));
                vswaps.push((name(x, false), name(x, true)));
            }
        }
        let mut edges = Vec::new();
        let mut eswaps = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            let (id, id2) = (format!("e{k}"), format!("e{k}'"));
            let cross = e.crossed && self.non_fixed[e.a] && self.non_fixed[e.b];
            edges.push(Edge::new(
                id.clone(),
                name(e.a, false),
                name(e.b, cross),
                e.length.clone(),
            ));
            edges.push(Edge::new(
                id2.clone(),
                name(e.a, true),
                name(e.b, !cross),
                e.length.clone(),
            ));
            eswaps.push((id, id2));
        }
        let g = MetrizedGraph::new(vertices, edges).map_err(HyperellipticError::from)?;
        let inv = Involution::from_swaps(
            vswaps.iter().map(|(a, b)| (a.as_str(), b.as_str())),
            eswaps.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        );
        Ok(HyperellipticGraph::new(g, inv)?)
    }

    /// A random labeled tree. Non-fixed vertices get extra fixed leaves
    /// until they have three tree edges.
    pub fn random(rng: &mut impl Rng, max_vertices: usize) -> CoverSpec {
        let n = rng.gen_range(2..=max_vertices.max(2));
        let mut spec = CoverSpec {
            non_fixed: (0..n).map(|_| rng.gen_bool(0.45)).collect(),
            edges: Vec::new(),
        };
        for x in 1..n {
            let parent = rng.gen_range(0..x);
            spec.edges.push(TreeEdge {
                a: parent,
                b: x,
                length: random_length(rng),
                crossed: rng.gen_bool(0.5),
            });
        }
        for x in 0..n {
            if !spec.non_fixed[x] {
                continue;
            }
            while spec.degree(x) < 3 {
                let leaf = spec.non_fixed.len();
                spec.non_fixed.push(false);
                spec.edges.push(TreeEdge {
                    a: x,
                    b: leaf,
                    length: random_length(rng),
                    crossed: false,
                });
            }
        }
        spec
    }
}

fn random_length(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(1..=4), rng.gen_range(1..=3))
}

/// Seeded random hyperelliptic graph whose size lies in `sizes`.
pub fn random_hyperelliptic(seed: u64, sizes: RangeInclusive<usize>) -> Result<HyperellipticGraph, TestkitError> {
    let (min, max) = (*sizes.start(), *sizes.end());
    if min == 0 || min > max || min > MAX_RANDOM_CLASSES {
        return Err(TestkitError::InfeasibleBounds { min, max });
    }
    let mut r = rng(seed);
    let max_vertices = (max + 2).min(MAX_RANDOM_CLASSES / 2);
    for _ in 0..ATTEMPTS {
        let spec = CoverSpec::random(&mut r, max_vertices);
        if spec.edges.len() > MAX_RANDOM_CLASSES {
            continue;
        }
        let h = spec.build()?;
        if sizes.contains(&h.size()) {
            return Ok(h);
        }
    }
    Err(TestkitError::InfeasibleBounds { min, max })
}

/// Redraws every class length from a small set of positive rationals.
pub fn random_lengths(h: &HyperellipticGraph, seed: u64) -> HyperellipticGraph {
    let mut r = rng(seed);
    let lengths: BTreeMap<String, Rational> = h
        .class_names()
        .into_iter()
        .map(|c| (c.to_string(), random_length(&mut r)))
        .collect();
    h.with_class_lengths(&lengths).expect("positive lengths")
}

/// Invariant divisor with `nu(v) - 2` at non-fixed vertices and coefficients
/// from `{-1, 0, 1, 2, 3}` at fixed ones, never of degree `-2`.
pub fn random_polarization(h: &HyperellipticGraph, seed: u64) -> Divisor {
    let mut r = rng(seed);
    let mut d = Divisor::zero();
    for v in h.non_fixed_vertices() {
        let nu = h.nu_counts(v).expect("non-fixed").nu as i64;
        d.set(v, int(nu - 2));
    }
    let fixed = h.fixed_vertices();
    loop {
        let mut candidate = d.clone();
        for v in &fixed {
            candidate.set(*v, int(r.gen_range(-1..=3)));
        }
        if candidate.degree() != int(-2) {
            return candidate;
        }
    }
}

/// Which edge kinds occur in `h`.
pub fn kinds_present(h: &HyperellipticGraph) -> [bool; 3] {
    let mut out = [false; 3];
    for k in h.classify_edges().values() {
        out[match k {
            EdgeKind::Disjoint => 0,
            EdgeKind::OneJointed => 1,
            EdgeKind::TwoJointed => 2,
        }] = true;
    }
    out
}

/// Seeded random dual graph of a hyperelliptic semistable fiber of genus at
/// least three, all node lengths one.
///
/// Starts from a random cover with genus-0 components, then folds genus-0
/// fixed vertices of valence two into involution-fixed nodes, adds fixed
/// self-nodes, and hangs positive-genus components off fixed vertices by
/// separating nodes.
pub fn random_fiber(seed: u64) -> Result<FiberConfiguration, TestkitError> {
    let mut r = rng(seed);
    for attempt in 0..ATTEMPTS as u64 {
        let h = random_hyperelliptic(seed.wrapping_mul(7919).wrapping_add(attempt), 1..=4)?;
        let unit: BTreeMap<String, Rational> = h
            .class_names()
            .into_iter()
            .map(|c| (c.to_string(), Rational::one()))
            .collect();
        let h = h.with_class_lengths(&unit)?;
        let inv = h.involution();
        let mut vertices: Vec<String> = h.graph().vertices().to_vec();
        let mut edges: Vec<Edge> = h.graph().edges().to_vec();
        let mut vmap: BTreeMap<String, String> = inv.vertex_map().clone();
        let mut emap: BTreeMap<String, String> = inv.edge_map().clone();
        let mut genera = BTreeMap::new();

        let fixed: Vec<String> = h.fixed_vertices().into_iter().map(String::from).collect();
        for p in &fixed {
            let at: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].touches(p)).collect();
            let foldable = at.len() == 2 && {
                let (x, y) = (&edges[at[0]], &edges[at[1]]);
                emap.get(&x.id) == Some(&y.id) && !x.is_loop() && {
                    let (ox, oy) = (other_end(x, p), other_end(y, p));
                    vmap.get(ox).is_some_and(|w| w == oy)
                }
            };
            if foldable && r.gen_bool(0.5) {
                let (x, y) = (edges[at[0]].clone(), edges[at[1]].clone());
                let id = format!("n{}", x.id);
                edges.retain(|e| e.id != x.id && e.id != y.id);
                emap.remove(&x.id);
                emap.remove(&y.id);
                edges.push(Edge::new(
                    id,
                    other_end(&x, p).to_string(),
                    other_end(&y, p).to_string(),
                    Rational::one(),
                ));
                vertices.retain(|v| v != p);
                continue;
            }
            let g: u32 = *[0, 0, 1, 2].choose(&mut r).expect("nonempty");
            if g > 0 {
                genera.insert(p.clone(), g);
            }
        }
        let alive: Vec<String> = fixed.iter().filter(|p| vertices.contains(p)).cloned().collect();
        for (i, p) in alive.iter().enumerate() {
            if r.gen_bool(0.25) {
                edges.push(Edge::new(format!("s{i}"), p.clone(), p.clone(), Rational::one()));
            }
            if r.gen_bool(0.25) {
                let t = format!("t{i}");
                vertices.push(t.clone());
                genera.insert(t.clone(), r.gen_range(1..=2));
                edges.push(Edge::new(format!("b{i}"), p.clone(), t, Rational::one()));
            }
        }
        vmap.retain(|k, _| vertices.contains(k));
        let graph = MetrizedGraph::new_with_loops(vertices, edges).map_err(HyperellipticError::from)?;
        let cfg = match FiberConfiguration::new(graph, genera, Some(Involution::from_maps(vmap, emap))) {
            Ok(c) => c,
            Err(BogomolovError::GenusOutOfRange(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        if cfg.genus() >= 3 {
            return Ok(cfg);
        }
    }
    Err(TestkitError::InfeasibleBounds { min: 3, max: 3 })
}

fn other_end<'a>(e: &'a Edge, x: &str) -> &'a str {
    if e.u == x {
        &e.v
    } else {
        &e.u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperelliptic::validate_hyperelliptic;

    #[test]
    fn single_fixed_edge_lifts_to_sg() {
        let spec = CoverSpec {
            non_fixed: vec![false, false],
            edges: vec![TreeEdge {
                a: 0,
                b: 1,
                length: int(1),
                crossed: false,
            }],
        };
        assert!(spec.build().unwrap().is_simple());
    }

    #[test]
    fn star_lifts_to_elementary() {
        let spec = CoverSpec {
            non_fixed: vec![true, false, false, false],
            edges: (1..4)
                .map(|b| TreeEdge {
                    a: 0,
                    b,
                    length: int(1),
                    crossed: false,
                })
                .collect(),
        };
        let h = spec.build().unwrap();
        assert!(h.is_irreducible());
        assert_eq!(h.size(), 2);
        assert!(h.classify_edges().values().all(|k| *k == EdgeKind::OneJointed));
    }

    #[test]
    fn low_degree_non_fixed_rejected() {
        let spec = CoverSpec {
            non_fixed: vec![true, false],
            edges: vec![TreeEdge {
                a: 0,
                b: 1,
                length: int(1),
                crossed: false,
            }],
        };
        assert_eq!(spec.build(), Err(TestkitError::DegreeTooSmall(0)));
    }

    #[test]
    fn crossing_changes_the_cover() {
        let mut spec = CoverSpec {
            non_fixed: vec![true, true, false, false, false, false],
            edges: vec![
                TreeEdge {
                    a: 0,
                    b: 1,
                    length: int(1),
                    crossed: false,
                },
                TreeEdge {
                    a: 0,
                    b: 2,
                    length: int(1),
                    crossed: false,
                },
                TreeEdge {
                    a: 0,
                    b: 3,
                    length: int(1),
                    crossed: false,
                },
                TreeEdge {
                    a: 1,
                    b: 4,
                    length: int(1),
                    crossed: false,
                },
                TreeEdge {
                    a: 1,
                    b: 5,
                    length: int(1),
                    crossed: false,
                },
            ],
        };
        let straight = spec.build().unwrap();
        spec.edges[0].crossed = true;
        let crossed = spec.build().unwrap();
        assert_ne!(straight.graph(), crossed.graph());
        assert_eq!(crossed.graph().edge("e0").unwrap().v, "v1'");
    }

    #[test]
    fn determinism() {
        for seed in 0..20 {
            assert_eq!(random_hyperelliptic(seed, 1..=5), random_hyperelliptic(seed, 1..=5));
            assert_eq!(random_fiber(seed), random_fiber(seed));
        }
    }

    #[test]
    fn infeasible_bounds() {
        assert!(random_hyperelliptic(0, 0..=3).is_err());
        assert!(random_hyperelliptic(0, 4..=2).is_err());
    }

    #[test]
    fn draws_are_valid_and_cover_sizes_and_kinds() {
        let mut sizes = [false; 6];
        let mut kinds = [false; 3];
        for seed in 0..2000 {
            let h = random_hyperelliptic(seed, 1..=5).unwrap();
            validate_hyperelliptic(h.graph(), h.involution()).unwrap();
            sizes[h.size()] = true;
            for (k, present) in kinds_present(&h).iter().enumerate() {
                kinds[k] |= present;
            }
        }
        assert_eq!(&sizes[1..], &[true; 5]);
        assert_eq!(kinds, [true; 3]);
    }

    #[test]
    fn polarization_shape() {
        for seed in 0..50 {
            let h = random_hyperelliptic(seed, 1..=4).unwrap();
            let d = random_polarization(&h, seed);
            assert!(h.has_polarization_shape(&d));
            assert_ne!(d.degree(), int(-2));
        }
        let d = random_polarization(&elementary(2, &[int(1), int(1), int(1)]), 3);
        assert_eq!(d.coefficient("Q"), int(1));
        assert_eq!(d.coefficient("Q'"), int(1));
    }

    #[test]
    fn fibers_have_genus_three_or_more() {
        for seed in 0..50 {
            let f = random_fiber(seed).unwrap();
            assert!(f.genus() >= 3);
            assert!(f.involution().is_some());
        }
    }

    #[test]
    fn named_corpus_is_valid() {
        let corpus = named_corpus();
        assert_eq!(corpus.len(), 8);
        let sum = &corpus[5].1;
        assert!(!sum.is_irreducible());
        assert_eq!(sum.size(), 3);
        assert_eq!(corpus[6].1.size(), 6);
        assert!(kinds_present(&corpus[7].1).iter().all(|k| *k));
        assert!(wedge(&ladder(), "P1", &simple_graph(int(1)), "P", "x.").is_err());
    }

    #[test]
    fn ladder_shape() {
        let h = ladder();
        assert_eq!(h.size(), 4);
        assert_eq!(h.kind("e1"), Some(EdgeKind::Disjoint));
        assert_eq!(h.kind("e0"), Some(EdgeKind::OneJointed));
        let nu = h.nu_counts("P2").unwrap();
        assert_eq!((nu.nu0, nu.nu1, nu.nu), (2, 1, 3));
    }
}
