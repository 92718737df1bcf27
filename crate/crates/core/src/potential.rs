//! Effective resistance, canonical and admissible measures, Green's functions
//! and the admissible constant, all over exact rationals.
//!
//! Sign conventions: on an edge parameterized by arc length `s`, the Green's
//! function is `alpha s^2 + beta s + gamma` with `g'' = density` of the
//! admissible measure, and at each vertex the outgoing slopes sum to
//! `mass(p) - [p = source]`. Together with `integral g dmu = 0` these pin the
//! function down uniquely, and [`PiecewisePotential::check_properties`]
//! re-verifies all of them after every solve.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::graph::{Divisor, GraphError, MetrizedGraph};
use crate::linalg::Matrix;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PotentialError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("polarization has degree -2")]
    DegreeMinusTwo,
    #[error("self-loop {0:?} is not allowed in potential computations")]
    SelfLoop(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("g(D,y) + g(y,y) differs between vertices {first:?} and {second:?}")]
    ConstancyViolation { first: String, second: String },
    #[error("computed Green's function violates: {0}")]
    PropertyViolation(&'static str),
    #[error("singular linear system")]
    SingularSystem,
}

/// A rational or positive infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendedRational {
    Finite(Rational),
    Infinity,
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            ExtendedRational::Infinity => None,
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::Finite(r) => write!(f, "{r}"),
            ExtendedRational::Infinity => write!(f, "infinity"),
        }
    }
}

/// Point masses on vertices plus a uniform density on each edge.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Measure {
    pub vertex_masses: BTreeMap<String, Rational>,
    pub edge_densities: BTreeMap<String, Rational>,
}

impl Measure {
    pub fn mass(&self, v: &str) -> Rational {
        self.vertex_masses.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn density(&self, e: &str) -> Rational {
        self.edge_densities.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_mass(&self, g: &MetrizedGraph) -> Rational {
        let atoms: Rational = self.vertex_masses.values().sum();
        let spread: Rational = g.edges().iter().map(|e| self.density(&e.id) * &e.length).sum();
        atoms + spread
    }
}

/// Kirchhoff network with vertex 0 grounded; stores the inverse of the
/// reduced Laplacian.
#[derive(Clone, Debug)]
struct Network {
    n: usize,
    inv: Matrix,
}

impl Network {
    fn new(n: usize, edges: &[(usize, usize, Rational)]) -> Result<Self, PotentialError> {
        let mut lap = Matrix::zeros(n.saturating_sub(1), n.saturating_sub(1));
        for (a, b, len) in edges {
            let c = len.recip();
            for (x, y) in [(*a, *b), (*b, *a)] {
                if x > 0 {
                    lap[(x - 1, x - 1)] += &c;
                    if y > 0 {
                        lap[(x - 1, y - 1)] -= &c;
                    }
                }
            }
        }
        let inv = lap.inverse().ok_or(PotentialError::Disconnected)?;
        Ok(Network { n, inv })
    }

    fn from_graph(g: &MetrizedGraph) -> Result<Self, PotentialError> {
        if let Some(l) = g.loops().next() {
            return Err(PotentialError::SelfLoop(l.id.clone()));
        }
        let edges: Vec<_> = (0..g.edge_count())
            .map(|i| {
                let (a, b) = g.edge_ends(i);
                (a, b, g.edges()[i].length.clone())
            })
            .collect();
        Self::new(g.vertex_count(), &edges)
    }

    fn entry(&self, i: usize, j: usize) -> Rational {
        if i == 0 || j == 0 {
            Rational::zero()
        } else {
            self.inv[(i - 1, j - 1)].clone()
        }
    }

    fn resistance(&self, p: usize, q: usize) -> Rational {
        self.entry(p, p) + self.entry(q, q) - int(2) * self.entry(p, q)
    }

    /// Potentials (grounded at vertex 0) for a balanced current injection.
    fn potentials(&self, rhs: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| (1..self.n).map(|j| self.entry(i, j) * &rhs[j]).sum())
            .collect()
    }
}

/// Resistance between `p` and `q` with every edge a resistor of its length.
pub fn effective_resistance(g: &MetrizedGraph, p: &str, q: &str) -> Result<Rational, PotentialError> {
    let (a, b) = (g.require_vertex(p)?, g.require_vertex(q)?);
    Ok(Network::from_graph(g)?.resistance(a, b))
}

/// All pairwise effective resistances, indexed by vertex position.
pub fn resistance_matrix(g: &MetrizedGraph) -> Result<Vec<Vec<Rational>>, PotentialError> {
    let net = Network::from_graph(g)?;
    let n = g.vertex_count();
    Ok((0..n).map(|p| (0..n).map(|q| net.resistance(p, q)).collect()).collect())
}

/// Resistance between the endpoints of `e` once the interior of `e` is
/// removed; infinite across a bridge.
pub fn cross_resistance(g: &MetrizedGraph, e: &str) -> Result<ExtendedRational, PotentialError> {
    let idx = g.require_edge(e)?;
    if let Some(l) = g.loops().next() {
        return Err(PotentialError::SelfLoop(l.id.clone()));
    }
    let (a, b) = g.edge_ends(idx);
    let rest: Vec<_> = (0..g.edge_count())
        .filter(|&i| i != idx)
        .map(|i| {
            let (x, y) = g.edge_ends(i);
            (x, y, g.edges()[i].length.clone())
        })
        .collect();
    match Network::new(g.vertex_count(), &rest) {
        Ok(net) => Ok(ExtendedRational::Finite(net.resistance(a, b))),
        Err(_) => Ok(ExtendedRational::Infinity),
    }
}

/// Vertex masses `1 - valence/2` and densities `1/(l_e + r_e)`.
pub fn canonical_measure(g: &MetrizedGraph) -> Result<Measure, PotentialError> {
    let net = Network::from_graph(g)?;
    let vertex_masses = g
        .vertices()
        .iter()
        .map(|v| {
            (
                v.clone(),
                Rational::one() - Rational::new((g.valence(v) as i64).into(), 2.into()),
            )
        })
        .filter(|(_, m)| !m.is_zero())
        .collect();
    // 1/(l + r_e) = (l - R)/l^2 where R is the resistance across e in g itself
    let edge_densities = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (a, b) = g.edge_ends(i);
            let r = net.resistance(a, b);
            (e.id.clone(), (&e.length - r) / (&e.length * &e.length))
        })
        .filter(|(_, d)| !d.is_zero())
        .collect();
    Ok(Measure {
        vertex_masses,
        edge_densities,
    })
}

/// `(delta_D + 2 * canonical) / (deg D + 2)`.
pub fn admissible_measure(g: &MetrizedGraph, d: &Divisor) -> Result<Measure, PotentialError> {
    d.check_supported(g)?;
    let denom = d.degree() + int(2);
    if denom.is_zero() {
        return Err(PotentialError::DegreeMinusTwo);
    }
    let canonical = canonical_measure(g)?;
    let vertex_masses = g
        .vertices()
        .iter()
        .map(|v| (v.clone(), (d.coefficient(v) + int(2) * canonical.mass(v)) / &denom))
        .filter(|(_, m)| !m.is_zero())
        .collect();
    let edge_densities = canonical
        .edge_densities
        .into_iter()
        .map(|(e, rho)| (e, int(2) * rho / &denom))
        .collect();
    Ok(Measure {
        vertex_masses,
        edge_densities,
    })
}

/// `alpha s^2 + beta s + gamma` on one edge, `s` measured from its first
/// endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeQuadratic {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl EdgeQuadratic {
    pub fn eval(&self, s: &Rational) -> Rational {
        (&self.alpha * s + &self.beta) * s + &self.gamma
    }

    pub fn second_derivative(&self) -> Rational {
        int(2) * &self.alpha
    }

    pub fn slope_at_start(&self) -> &Rational {
        &self.beta
    }

    fn integral(&self, l: &Rational) -> Rational {
        let l2 = l * l;
        &self.alpha * &l2 * l / int(3) + &self.beta * &l2 / int(2) + &self.gamma * l
    }
}

/// `y -> g(source, y)` as a piecewise quadratic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePotential {
    pub source: String,
    pub vertex_values: BTreeMap<String, Rational>,
    pub edges: BTreeMap<String, EdgeQuadratic>,
}

impl PiecewisePotential {
    pub fn at_vertex(&self, v: &str) -> Option<&Rational> {
        self.vertex_values.get(v)
    }

    /// Value at distance `s` along edge `e` from its first endpoint.
    pub fn evaluate(&self, g: &MetrizedGraph, e: &str, s: &Rational) -> Result<Rational, PotentialError> {
        let edge = g.edge(e).ok_or_else(|| GraphError::UnknownEdge(e.to_string()))?;
        if s < &Rational::zero() || s > &edge.length {
            return Err(GraphError::SubdivisionOutOfRange { edge: e.to_string() }.into());
        }
        Ok(self.edges[e].eval(s))
    }

    /// Re-verifies continuity, the edge equation, vertex flux balance, mass
    /// normalization and `integral g dmu = 0`.
    pub fn check_properties(&self, g: &MetrizedGraph, mu: &Measure) -> Result<(), PotentialError> {
        if mu.total_mass(g) != Rational::one() {
            return Err(PotentialError::PropertyViolation("total mass is not 1"));
        }
        let mut flux: BTreeMap<&str, Rational> = BTreeMap::new();
        let mut integral = Rational::zero();
        for e in g.edges() {
            let q = &self.edges[&e.id];
            if &q.gamma != &self.vertex_values[&e.u] || q.eval(&e.length) != self.vertex_values[&e.v] {
                return Err(PotentialError::PropertyViolation("continuity"));
            }
            let rho = mu.density(&e.id);
            if q.second_derivative() != rho {
                return Err(PotentialError::PropertyViolation("edge Laplacian"));
            }
            *flux.entry(&e.u).or_insert_with(Rational::zero) += &q.beta;
            let end_slope = int(2) * &q.alpha * &e.length + &q.beta;
            *flux.entry(&e.v).or_insert_with(Rational::zero) -= end_slope;
            integral += rho * q.integral(&e.length);
        }
        for v in g.vertices() {
            let out = flux.get(v.as_str()).cloned().unwrap_or_else(Rational::zero);
            let point = if *v == self.source {
                Rational::one()
            } else {
                Rational::zero()
            };
            if out != mu.mass(v) - point {
                return Err(PotentialError::PropertyViolation("vertex Laplacian"));
            }
            integral += mu.mass(v) * &self.vertex_values[v];
        }
        if !integral.is_zero() {
            return Err(PotentialError::PropertyViolation("normalization"));
        }
        Ok(())
    }
}

/// Green's function of a polarized metrized graph, solved once for every
/// vertex source.
#[derive(Clone, Debug)]
pub struct GreenKernel {
    graph: MetrizedGraph,
    divisor: Divisor,
    measure: Measure,
    values: Vec<Vec<Rational>>,
}

impl GreenKernel {
    pub fn new(g: &MetrizedGraph, d: &Divisor) -> Result<Self, PotentialError> {
        let measure = admissible_measure(g, d)?;
        let net = Network::from_graph(g)?;
        let n = g.vertex_count();
        // constant part of the injection: -m_p - sum over incident edges of rho l / 2
        let mut base = vec![Rational::zero(); n];
        for (p, v) in g.vertices().iter().enumerate() {
            base[p] -= measure.mass(v);
        }
        for (i, e) in g.edges().iter().enumerate() {
            let half = measure.density(&e.id) * &e.length / int(2);
            let (a, b) = g.edge_ends(i);
            base[a] -= &half;
            base[b] -= &half;
        }
        let mut values = Vec::with_capacity(n);
        for x in 0..n {
            let mut rhs = base.clone();
            rhs[x] += Rational::one();
            let mut pot = net.potentials(&rhs);
            let shift = Self::integral(g, &measure, &pot);
            for value in &mut pot {
                *value -= &shift;
            }
            values.push(pot);
        }
        Ok(GreenKernel {
            graph: g.clone(),
            divisor: d.clone(),
            measure,
            values,
        })
    }

    fn integral(g: &MetrizedGraph, mu: &Measure, pot: &[Rational]) -> Rational {
        let atoms: Rational = g.vertices().iter().enumerate().map(|(p, v)| mu.mass(v) * &pot[p]).sum();
        let spread: Rational = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (a, b) = g.edge_ends(i);
                let rho = mu.density(&e.id);
                let l = &e.length;
                let chord = l * (&pot[a] + &pot[b]) / int(2);
                let bulge = &rho * l * l * l / int(12);
                rho * (chord - bulge)
            })
            .sum();
        atoms + spread
    }

    pub fn graph(&self) -> &MetrizedGraph {
        &self.graph
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// `g(p, q)` for vertices `p`, `q`.
    pub fn pairing(&self, p: &str, q: &str) -> Result<Rational, PotentialError> {
        let (a, b) = (self.graph.require_vertex(p)?, self.graph.require_vertex(q)?);
        Ok(self.values[a][b].clone())
    }

    /// The full piecewise-quadratic `y -> g(source, y)`, checked against the
    /// defining properties before it is returned.
    pub fn potential(&self, source: &str) -> Result<PiecewisePotential, PotentialError> {
        let x = self.graph.require_vertex(source)?;
        let row = &self.values[x];
        let vertex_values = self.graph.vertices().iter().cloned().zip(row.iter().cloned()).collect();
        let edges = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (a, b) = self.graph.edge_ends(i);
                let alpha = self.measure.density(&e.id) / int(2);
                let beta = (&row[b] - &row[a]) / &e.length - &alpha * &e.length;
                (
                    e.id.clone(),
                    EdgeQuadratic {
                        alpha,
                        beta,
                        gamma: row[a].clone(),
                    },
                )
            })
            .collect();
        let pot = PiecewisePotential {
            source: source.to_string(),
            vertex_values,
            edges,
        };
        pot.check_properties(&self.graph, &self.measure)?;
        Ok(pot)
    }

    /// `g(D, y) + g(y, y)` at every vertex `y`, in vertex order.
    pub fn c_values(&self) -> Vec<Rational> {
        let n = self.graph.vertex_count();
        let support: Vec<(usize, Rational)> = self
            .divisor
            .iter()
            .map(|(v, a)| (self.graph.vertex_position(v).expect("supported divisor"), a.clone()))
            .collect();
        (0..n)
            .map(|y| {
                let gd: Rational = support.iter().map(|(p, a)| a * &self.values[*p][y]).sum();
                gd + &self.values[y][y]
            })
            .collect()
    }

    /// The constant `c`, after checking that `g(D,y) + g(y,y)` agrees at all
    /// vertices.
    pub fn constant(&self) -> Result<Rational, PotentialError> {
        let cs = self.c_values();
        for (y, c) in cs.iter().enumerate().skip(1) {
            if c != &cs[0] {
                return Err(PotentialError::ConstancyViolation {
                    first: self.graph.vertices()[0].clone(),
                    second: self.graph.vertices()[y].clone(),
                });
            }
        }
        Ok(cs[0].clone())
    }

    /// `g(D, D)`.
    pub fn divisor_pairing(&self) -> Rational {
        let support: Vec<(usize, &Rational)> = self
            .divisor
            .iter()
            .map(|(v, a)| (self.graph.vertex_position(v).expect("supported divisor"), a))
            .collect();
        let mut total = Rational::zero();
        for (p, a) in &support {
            for (q, b) in &support {
                total += *a * *b * &self.values[*p][*q];
            }
        }
        total
    }

    /// `(epsilon, c)` with `epsilon = 2 deg(D) c - g(D, D)`.
    pub fn epsilon(&self) -> Result<(Rational, Rational), PotentialError> {
        let c = self.constant()?;
        let eps = int(2) * self.divisor.degree() * &c - self.divisor_pairing();
        Ok((eps, c))
    }
}

/// Green's function from `source` on `(g, d)`.
pub fn green_function(g: &MetrizedGraph, d: &Divisor, source: &str) -> Result<PiecewisePotential, PotentialError> {
    GreenKernel::new(g, d)?.potential(source)
}

pub fn green_pairing(g: &MetrizedGraph, d: &Divisor, p: &str, q: &str) -> Result<Rational, PotentialError> {
    GreenKernel::new(g, d)?.pairing(p, q)
}

/// Admissible constant and `c` of `(g, d)`.
pub fn epsilon_numeric(g: &MetrizedGraph, d: &Divisor) -> Result<(Rational, Rational), PotentialError> {
    GreenKernel::new(g, d)?.epsilon()
}
