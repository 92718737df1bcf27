//! Brute-force oracle for the Green's function: resistances from weighted
//! spanning-tree sums, then every defining property written as one linear
//! equation in the vertex values and the three coefficients of each edge
//! quadratic. The system is overdetermined and must be consistent with a
//! unique solution.

use admgraph_core::graph::{Divisor, Edge, MetrizedGraph};
use admgraph_core::potential::{admissible_measure, GreenKernel};
use admgraph_core::rational::{int, rat, Rational};
use admgraph_core::testkit::{random_hyperelliptic, random_polarization};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn spanning_weight(n: usize, edges: &[(usize, usize, Rational)]) -> Rational {
    let mut total = Rational::zero();
    let m = edges.len();
    if n == 1 {
        return Rational::one();
    }
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut ok = true;
        let mut w = Rational::one();
        for (i, (a, b, c)) in edges.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
            if ra == rb {
                ok = false;
                break;
            }
            parent[ra] = rb;
            w *= c;
        }
        if ok {
            total += w;
        }
    }
    total
}

/// Resistance between `p` and `q` in a graph given by conductances; `None`
/// when they are disconnected.
fn resistance(n: usize, edges: &[(usize, usize, Rational)], p: usize, q: usize) -> Option<Rational> {
    if p == q {
        return Some(Rational::zero());
    }
    let whole = spanning_weight(n, edges);
    if whole.is_zero() {
        return None;
    }
    let relabel = |x: usize| {
        let x = if x == q { p } else { x };
        if x > q {
            x - 1
        } else {
            x
        }
    };
    let merged: Vec<_> = edges
        .iter()
        .map(|(a, b, c)| (relabel(*a), relabel(*b), c.clone()))
        .filter(|(a, b, _)| a != b)
        .collect();
    Some(spanning_weight(n - 1, &merged) / whole)
}

struct OracleMeasure {
    mass: Vec<Rational>,
    density: Vec<Rational>,
}

fn oracle_measure(g: &MetrizedGraph, d: &Divisor) -> OracleMeasure {
    let n = g.vertex_count();
    let conductances: Vec<_> = (0..g.edge_count())
        .map(|i| {
            let (a, b) = g.edge_ends(i);
            (a, b, Rational::one() / &g.edges()[i].length)
        })
        .collect();
    let deg = d.degree();
    let denom = &deg + int(2);
    let mass = g
        .vertices()
        .iter()
        .map(|v| {
            let canonical = int(1) - rat(g.valence(v) as i64, 2);
            (d.coefficient(v) + int(2) * canonical) / &denom
        })
        .collect();
    let density = (0..g.edge_count())
        .map(|i| {
            let mut rest = conductances.clone();
            let (a, b, _) = rest.remove(i);
            match resistance(n, &rest, a, b) {
                None => Rational::zero(),
                Some(r) => int(2) / ((&g.edges()[i].length + r) * &denom),
            }
        })
        .collect();
    OracleMeasure { mass, density }
}

/// Solves `rows * x = rhs` by elimination; `None` unless the system is
/// consistent with a unique solution.
fn solve_unique(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>, unknowns: usize) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in 0..unknowns {
                    let delta = &f * &rows[r][c];
                    rows[i][c] -= delta;
                }
                let delta = &f * &rhs[r];
                rhs[i] -= delta;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() != unknowns || rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(rhs[..unknowns].to_vec())
}

/// Vertex values of `y -> g(x, y)` from the five defining properties.
fn oracle_green_row(g: &MetrizedGraph, mu: &OracleMeasure, x: usize) -> Vec<Rational> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let unknowns = n + 3 * m;
    let (a, b, c) = (|e: usize| n + 3 * e, |e: usize| n + 3 * e + 1, |e: usize| n + 3 * e + 2);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |row: Vec<(usize, Rational)>, value: Rational| {
        let mut dense = vec![Rational::zero(); unknowns];
        for (i, v) in row {
            dense[i] += v;
        }
        rows.push(dense);
        rhs.push(value);
    };
    let mut flux: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    let mut integral = Vec::new();
    for e in 0..m {
        let (u, v) = g.edge_ends(e);
        let l = g.edges()[e].length.clone();
        push(vec![(a(e), int(1)), (u, int(-1))], Rational::zero());
        push(
            vec![(a(e), int(1)), (b(e), l.clone()), (c(e), &l * &l), (v, int(-1))],
            Rational::zero(),
        );
        push(vec![(c(e), int(2))], mu.density[e].clone());
        flux[u].push((b(e), int(1)));
        flux[v].push((b(e), int(-1)));
        flux[v].push((c(e), int(-2) * &l));
        let rho = &mu.density[e];
        integral.push((a(e), rho * &l));
        integral.push((b(e), rho * &l * &l / int(2)));
        integral.push((c(e), rho * &l * &l * &l / int(3)));
    }
    for p in 0..n {
        let point = if p == x { int(1) } else { int(0) };
        push(flux[p].clone(), &mu.mass[p] - point);
        integral.push((p, mu.mass[p].clone()));
    }
    push(integral, Rational::zero());
    let sol = solve_unique(rows, rhs, unknowns).expect("five properties determine g");
    sol[..n].to_vec()
}

fn check_graph(g: &MetrizedGraph, d: &Divisor) {
    let mu = oracle_measure(g, d);
    let lib_mu = admissible_measure(g, d).unwrap();
    for (i, v) in g.vertices().iter().enumerate() {
        assert_eq!(lib_mu.mass(v), mu.mass[i], "mass at {v}");
    }
    for (i, e) in g.edges().iter().enumerate() {
        assert_eq!(lib_mu.density(&e.id), mu.density[i], "density on {}", e.id);
    }
    let kernel = GreenKernel::new(g, d).unwrap();
    let n = g.vertex_count();
    let rows: Vec<Vec<Rational>> = (0..n).map(|x| oracle_green_row(g, &mu, x)).collect();
    for x in 0..n {
        for y in 0..n {
            let (vx, vy) = (&g.vertices()[x], &g.vertices()[y]);
            assert_eq!(kernel.pairing(vx, vy).unwrap(), rows[x][y]);
        }
    }
    let cs: Vec<Rational> = (0..n)
        .map(|y| {
            let gd: Rational = d
                .iter()
                .map(|(v, coef)| coef * &rows[g.vertex_position(v).unwrap()][y])
                .sum();
            gd + &rows[y][y]
        })
        .collect();
    assert!(cs.iter().all(|c| c == &cs[0]), "c is constant");
    let mut gdd = Rational::zero();
    for (p, a) in d.iter() {
        for (q, b) in d.iter() {
            gdd += a * b * &rows[g.vertex_position(p).unwrap()][g.vertex_position(q).unwrap()];
        }
    }
    let eps = int(2) * d.degree() * &cs[0] - gdd;
    assert_eq!(kernel.epsilon().unwrap(), (eps, cs[0].clone()));
}

#[test]
fn sg_by_hand() {
    let g = MetrizedGraph::new(
        ["P", "Q"],
        vec![Edge::new("e1", "P", "Q", int(1)), Edge::new("e2", "P", "Q", int(1))],
    )
    .unwrap();
    let d = Divisor::from_pairs([("P", int(1)), ("Q", int(1))]);
    let mu = oracle_measure(&g, &d);
    assert_eq!(mu.mass, vec![rat(1, 4), rat(1, 4)]);
    let row = oracle_green_row(&g, &mu, 0);
    assert_eq!(row, vec![rat(13, 96), rat(-11, 96)]);
    check_graph(&g, &d);
}

#[test]
fn random_hyperelliptic_graphs() {
    for seed in 0..60 {
        let h = random_hyperelliptic(seed, 1..=3).unwrap();
        if h.graph().edge_count() > 14 {
            continue;
        }
        check_graph(h.graph(), &random_polarization(&h, seed));
    }
}

fn arb_graph() -> impl Strategy<Value = (MetrizedGraph, Divisor)> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let extra = proptest::collection::vec((0..n, 0..n, 1i64..=4, 1i64..=3), 0..4);
            let path = proptest::collection::vec((1i64..=4, 1i64..=3), n - 1);
            let coeffs = proptest::collection::vec(-1i64..=3, n);
            (Just(n), path, extra, coeffs)
        })
        .prop_filter_map("degree -2", |(n, path, extra, coeffs)| {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for (i, (p, q)) in path.iter().enumerate() {
                edges.push(Edge::new(
                    format!("p{i}"),
                    names[i].clone(),
                    names[i + 1].clone(),
                    rat(*p, *q),
                ));
            }
            for (k, (a, b, p, q)) in extra.iter().enumerate() {
                if a != b {
                    edges.push(Edge::new(
                        format!("x{k}"),
                        names[*a].clone(),
                        names[*b].clone(),
                        rat(*p, *q),
                    ));
                }
            }
            let g = MetrizedGraph::new(names.clone(), edges).ok()?;
            let d = Divisor::from_pairs(names.iter().cloned().zip(coeffs.iter().map(|c| int(*c))));
            (d.degree() != int(-2)).then_some((g, d))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_graphs_match_oracle((g, d) in arb_graph()) {
        check_graph(&g, &d);
    }
}

#[test]
fn zero_divisor_on_tree() {
    let g = MetrizedGraph::new(
        ["A", "B", "C"],
        vec![Edge::new("x", "A", "B", rat(1, 2)), Edge::new("y", "B", "C", int(3))],
    )
    .unwrap();
    check_graph(&g, &Divisor::zero());
}
