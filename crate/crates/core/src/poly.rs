//! Sparse polynomials in edge-class indeterminates, the graph polynomials
//! `L_G` and `M_G` of a hyperelliptic graph, and the closed form of the
//! admissible constant built from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::graph::Divisor;
use crate::hyperelliptic::{EdgeKind, HyperellipticError, HyperellipticGraph};
use crate::rational::{int, rat, Rational};

/// Default bound on the number of edge classes the subset enumerations will
/// accept.
pub const DEFAULT_MAX_CLASSES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error(transparent)]
    Hyperelliptic(#[from] HyperellipticError),
    #[error("polynomial is not multilinear in {0:?}")]
    NotMultilinear(String),
    #[error("no value given for variable {0:?}")]
    MissingVariable(String),
    #[error("denominator vanishes")]
    ZeroDenominator,
    #[error("{classes} edge classes exceed the enumeration cap of {cap}")]
    TooManyClasses { classes: usize, cap: usize },
    #[error("polarization has degree -2")]
    DegreeMinusTwo,
    #[error("divisor is not invariant or has a coefficient other than nu(v) - 2 at a non-fixed vertex")]
    PolarizationShape,
}

/// Sorted multiset of variable names. Ordered by degree, then
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<String>);

impl Monomial {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        let mut v: Vec<String> = vars.into_iter().map(Into::into).collect();
        v.sort();
        Monomial(v)
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn power_of(&self, x: &str) -> usize {
        self.0.iter().filter(|v| *v == x).count()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Monomial(v)
    }

    fn without_one(&self, x: &str) -> Monomial {
        let mut v = self.0.clone();
        if let Some(i) = v.iter().position(|y| y == x) {
            v.remove(i);
        }
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with rational coefficients; zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_terms([(Monomial::default(), c)])
    }

    pub fn var(x: impl Into<String>) -> Self {
        Self::from_terms([(Monomial::new([x.into()]), Rational::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Elementary symmetric polynomial of degree `k` in `vars`; zero when
    /// `k < 0` or `k > vars.len()`.
    pub fn elementary_symmetric(k: i64, vars: &[&str]) -> Self {
        if k < 0 || k as usize > vars.len() {
            return MultiPoly::zero();
        }
        MultiPoly::from_terms(
            combinations(vars.len(), k as usize)
                .map(|idx| (Monomial::new(idx.iter().map(|&i| vars[i])), Rational::one())),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.terms.keys().flat_map(|m| m.0.iter().map(String::as_str)).collect()
    }

    /// Largest monomial degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    /// No variable appears squared in any monomial.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|m| m.0.windows(2).all(|w| w[0] != w[1]))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        MultiPoly::from_terms(self.terms.iter().map(|(m, a)| (m.clone(), a * c)))
    }

    pub fn evaluate(&self, values: &BTreeMap<String, Rational>) -> Result<Rational, PolyError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for x in &m.0 {
                term *= values.get(x).ok_or_else(|| PolyError::MissingVariable(x.clone()))?;
            }
            total += term;
        }
        Ok(total)
    }

    /// Substitutes zero for `x`.
    pub fn specialize_zero(&self, x: &str) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.power_of(x) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The `P` in `self = x * P + (terms free of x)`.
    pub fn coefficient_poly(&self, x: &str) -> Result<Self, PolyError> {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            match m.power_of(x) {
                0 => {}
                1 => out.add_term(m.without_one(x), c),
                _ => return Err(PolyError::NotMultilinear(x.to_string())),
            }
        }
        Ok(out)
    }

    /// `self / x` when every monomial contains `x`.
    pub fn divide_by_var(&self, x: &str) -> Option<Self> {
        if self.terms.keys().any(|m| m.power_of(x) == 0) {
            return None;
        }
        Some(MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.without_one(x), c.clone())).collect(),
        })
    }

    /// Renames variables; monomials that collide are merged.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::new(m.0.iter().map(|x| map.get(x).cloned().unwrap_or_else(|| x.clone()))),
                c.clone(),
            )
        }))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&int(-1))
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.times(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let parts: Vec<&str> = m.0.iter().map(String::as_str).collect();
            match (c.is_one(), parts.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (true, false) => write!(f, "{}", parts.join("*"))?,
                (false, false) => write!(f, "{c}*{}", parts.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Quotient of two polynomials with a nonzero denominator.
#[derive(Clone, Debug)]
pub struct RationalFn {
    pub numerator: MultiPoly,
    pub denominator: MultiPoly,
}

impl RationalFn {
    pub fn new(numerator: MultiPoly, denominator: MultiPoly) -> Result<Self, PolyError> {
        if denominator.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(RationalFn { numerator, denominator })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFn {
            numerator: p,
            denominator: MultiPoly::one(),
        }
    }

    pub fn evaluate(&self, values: &BTreeMap<String, Rational>) -> Result<Rational, PolyError> {
        let den = self.denominator.evaluate(values)?;
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(self.numerator.evaluate(values)? / den)
    }

    /// Substitutes zero for `x`, first cancelling powers of `x` common to
    /// numerator and denominator.
    pub fn specialize_zero(&self, x: &str) -> Result<Self, PolyError> {
        let (mut num, mut den) = (self.numerator.clone(), self.denominator.clone());
        while den.specialize_zero(x).is_zero() {
            match (num.divide_by_var(x), den.divide_by_var(x)) {
                (Some(n), Some(d)) => {
                    num = n;
                    den = d;
                }
                (None, Some(_)) if num.is_zero() => {
                    return Ok(RationalFn::from_poly(MultiPoly::zero()));
                }
                _ => return Err(PolyError::ZeroDenominator),
            }
        }
        RationalFn::new(num.specialize_zero(x), den.specialize_zero(x))
    }

    /// Equality as rational functions, by cross-multiplication.
    pub fn same_as(&self, other: &RationalFn) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }
}

/// How `L_G` and `M_G` are assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Enumerate class subsets and inspect every restriction.
    #[default]
    Definition,
    /// Sum over disjoint-class subsets of products of elementary symmetric
    /// polynomials, multiplied across irreducible components.
    Symmetric,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Definition => "definition",
            Strategy::Symmetric => "symmetric",
        }
    }
}

/// Index subsets of `0..n` of size `k`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    core::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let mut c = out.clone();
            let mut i = k;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(c);
                }
            }
        };
        current = next;
        Some(out)
    })
}

fn monomial_of(classes: &[&str]) -> Monomial {
    Monomial::new(classes.iter().copied())
}

fn check_cap(h: &HyperellipticGraph, cap: usize) -> Result<(), PolyError> {
    let classes = h.classes().len();
    if classes > cap {
        return Err(PolyError::TooManyClasses { classes, cap });
    }
    Ok(())
}

/// `L_G` and `M_G` together.
pub fn lm_polynomials(h: &HyperellipticGraph, strategy: Strategy) -> Result<(MultiPoly, MultiPoly), PolyError> {
    lm_polynomials_capped(h, strategy, DEFAULT_MAX_CLASSES)
}

pub fn lm_polynomials_capped(
    h: &HyperellipticGraph,
    strategy: Strategy,
    cap: usize,
) -> Result<(MultiPoly, MultiPoly), PolyError> {
    check_cap(h, cap)?;
    match strategy {
        Strategy::Definition => Ok((l_by_definition(h)?, m_by_definition(h)?)),
        Strategy::Symmetric => {
            let mut l = MultiPoly::one();
            let mut m = MultiPoly::zero();
            for c in h.components() {
                let (lc, mc) = lm_symmetric_irreducible(&c)?;
                m = &(&m * &lc) + &(&l * &mc);
                l = &l * &lc;
            }
            Ok((l, m))
        }
    }
}

pub fn l_polynomial(h: &HyperellipticGraph, strategy: Strategy) -> Result<MultiPoly, PolyError> {
    Ok(lm_polynomials(h, strategy)?.0)
}

pub fn m_polynomial(h: &HyperellipticGraph, strategy: Strategy) -> Result<MultiPoly, PolyError> {
    Ok(lm_polynomials(h, strategy)?.1)
}

fn l_by_definition(h: &HyperellipticGraph) -> Result<MultiPoly, PolyError> {
    let n = h.size();
    let classes = h.class_names();
    let mut out = MultiPoly::zero();
    for idx in combinations(classes.len(), n) {
        let subset: Vec<&str> = idx.iter().map(|&i| classes[i]).collect();
        let (r, _) = h.restrict_classes(&subset)?;
        if r.is_semisimple() && r.size() == n {
            out.add_term(monomial_of(&subset), &Rational::one());
        }
    }
    Ok(out)
}

fn m_by_definition(h: &HyperellipticGraph) -> Result<MultiPoly, PolyError> {
    let n = h.size();
    let classes = h.class_names();
    let mut out = MultiPoly::zero();
    for idx in combinations(classes.len(), n + 1) {
        let subset: Vec<&str> = idx.iter().map(|&i| classes[i]).collect();
        let (r, _) = h.restrict_classes(&subset)?;
        let reps = r.non_fixed_classes();
        if let [v] = reps.as_slice() {
            let nu = r.graph().valence(v) as i64;
            out.add_term(monomial_of(&subset), &int(nu - 2));
        }
    }
    Ok(out)
}

fn lm_symmetric_irreducible(h: &HyperellipticGraph) -> Result<(MultiPoly, MultiPoly), PolyError> {
    if h.graph().edge_count() == 0 {
        return Ok((MultiPoly::one(), MultiPoly::zero()));
    }
    if h.is_simple() {
        return Ok((MultiPoly::var(h.class_names()[0]), MultiPoly::zero()));
    }
    let ed0 = h.classes_of_kind(EdgeKind::Disjoint);
    let mut l = MultiPoly::zero();
    let mut m = MultiPoly::zero();
    for mask in 0u64..(1u64 << ed0.len()) {
        let mut kept = Vec::new();
        let mut rest = Vec::new();
        for (i, c) in ed0.iter().enumerate() {
            if mask & (1 << i) != 0 {
                kept.push(*c);
            } else {
                rest.push(*c);
            }
        }
        let (gp, _) = h.contract_classes(&rest)?;
        let mut sigmas = Vec::new();
        let mut taus = Vec::new();
        let mut nus = Vec::new();
        for v in gp.non_fixed_classes() {
            let at_v: Vec<&str> = gp
                .graph()
                .edges()
                .iter()
                .filter(|e| e.touches(v) && gp.kind(&e.id) == Some(EdgeKind::OneJointed))
                .map(|e| gp.class_of(&e.id).expect("edge has a class"))
                .collect();
            let nu1 = at_v.len() as i64;
            sigmas.push(MultiPoly::elementary_symmetric(nu1 - 1, &at_v));
            taus.push(MultiPoly::elementary_symmetric(nu1, &at_v));
            nus.push(gp.nu_counts(v)?.nu as i64);
        }
        let x = MultiPoly::from_terms([(monomial_of(&kept), Rational::one())]);
        let prod = sigmas.iter().fold(MultiPoly::one(), |acc, s| &acc * s);
        l = &l + &(&prod * &x);
        for (i, tau) in taus.iter().enumerate() {
            let others = sigmas
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(MultiPoly::one(), |acc, (_, s)| &acc * s);
            let term = (&(tau * &others) * &x).scale(&int(nus[i] - 2));
            m = &m + &term;
        }
    }
    Ok((l, m))
}

/// The admissible constant of `(h, d)` as a rational function of the class
/// lengths:
/// `sum_c (2/3 k + w_c (deg - w_c) / (deg + 2)) X_c + 2/3 k M/L`
/// with `k = deg / (deg + 2)`.
pub fn epsilon_closed_form_fn(
    h: &HyperellipticGraph,
    d: &Divisor,
    strategy: Strategy,
) -> Result<RationalFn, PolyError> {
    epsilon_closed_form_fn_capped(h, d, strategy, DEFAULT_MAX_CLASSES)
}

pub fn epsilon_closed_form_fn_capped(
    h: &HyperellipticGraph,
    d: &Divisor,
    strategy: Strategy,
    cap: usize,
) -> Result<RationalFn, PolyError> {
    let deg = d.degree();
    let denom = &deg + int(2);
    if denom.is_zero() {
        return Err(PolyError::DegreeMinusTwo);
    }
    d.check_supported(h.graph()).map_err(HyperellipticError::from)?;
    if !h.has_polarization_shape(d) {
        return Err(PolyError::PolarizationShape);
    }
    let k = rat(2, 3) * &deg / &denom;
    let mut linear = MultiPoly::zero();
    for c in h.class_names() {
        let w = h.w_weight(d, c)?;
        let coeff = &k + &w * (&deg - &w) / &denom;
        linear = &linear + &MultiPoly::var(c).scale(&coeff);
    }
    let (l, m) = lm_polynomials_capped(h, strategy, cap)?;
    RationalFn::new(&(&linear * &l) + &m.scale(&k), l)
}

/// The closed form evaluated at the lengths of `h`.
pub fn epsilon_closed_form(h: &HyperellipticGraph, d: &Divisor) -> Result<Rational, PolyError> {
    epsilon_closed_form_fn(h, d, Strategy::Symmetric)?.evaluate(&h.class_lengths())
}
