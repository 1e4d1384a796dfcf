//! Exact differential polynomials and rational differential expressions.
//!
//! Indeterminates are derivatives of dependent variables (including the
//! order-0 derivative, i.e. the function itself) together with the
//! independent variables, over arbitrary-precision rationals. Values are
//! immutable after construction.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational coefficient.
pub type Rational = num::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Names of the independent and dependent variables of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSignature {
    pub indep_names: Vec<String>,
    pub dep_names: Vec<String>,
}

impl SystemSignature {
    pub fn new(indep_names: Vec<String>, dep_names: Vec<String>) -> Self {
        SystemSignature {
            indep_names,
            dep_names,
        }
    }

    pub fn n_indep(&self) -> usize {
        self.indep_names.len()
    }

    pub fn n_dep(&self) -> usize {
        self.dep_names.len()
    }

    pub fn indep_index(&self, name: &str) -> Option<usize> {
        self.indep_names.iter().position(|n| n == name)
    }

    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.dep_names.iter().position(|n| n == name)
    }
}

/// A derivative of a dependent variable, encoded by a multi-index.
///
/// `idx[i]` counts differentiations with respect to independent variable
/// `i`; the all-zero multi-index denotes the function itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Derivative {
    pub dep: usize,
    pub idx: Vec<u32>,
}

impl Derivative {
    pub fn new(dep: usize, idx: Vec<u32>) -> Self {
        Derivative { dep, idx }
    }

    pub fn base(dep: usize, n_indep: usize) -> Self {
        Derivative {
            dep,
            idx: vec![0; n_indep],
        }
    }

    pub fn order(&self) -> u32 {
        self.idx.iter().sum()
    }

    /// The derivative obtained by one further differentiation in direction `i`.
    pub fn differentiate(&self, i: usize) -> Derivative {
        let mut idx = self.idx.clone();
        idx[i] += 1;
        Derivative { dep: self.dep, idx }
    }

    /// True if `self` is a (possibly improper) derivative of `other`.
    pub fn is_derivative_of(&self, other: &Derivative) -> bool {
        self.dep == other.dep
            && self
                .idx
                .iter()
                .zip(other.idx.iter())
                .all(|(a, b)| a >= b)
    }

    /// Human-readable subscript name, e.g. `u_xy` or `eta_xx`.
    pub fn subscript_name(&self, sig: &SystemSignature) -> String {
        let mut s = sig.dep_names[self.dep].clone();
        if self.order() > 0 {
            s.push('_');
            for (i, &e) in self.idx.iter().enumerate() {
                for _ in 0..e {
                    s.push_str(&sig.indep_names[i]);
                }
            }
        }
        s
    }
}

/// A power product of derivatives and independent variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffMonomial {
    /// derivative -> positive exponent
    pub factors: BTreeMap<Derivative, u32>,
    /// independent-variable index -> positive exponent
    pub indep: BTreeMap<usize, u32>,
}

impl DiffMonomial {
    pub fn one() -> Self {
        DiffMonomial::default()
    }

    pub fn from_derivative(d: Derivative) -> Self {
        let mut factors = BTreeMap::new();
        factors.insert(d, 1);
        DiffMonomial {
            factors,
            indep: BTreeMap::new(),
        }
    }

    pub fn from_indep(i: usize) -> Self {
        let mut indep = BTreeMap::new();
        indep.insert(i, 1);
        DiffMonomial {
            factors: BTreeMap::new(),
            indep,
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.indep.is_empty()
    }

    /// Total degree in the derivative indeterminates.
    pub fn deriv_degree(&self) -> u32 {
        self.factors.values().sum()
    }

    pub fn indep_degree(&self) -> u32 {
        self.indep.values().sum()
    }

    pub fn mul(&self, other: &DiffMonomial) -> DiffMonomial {
        let mut out = self.clone();
        for (d, e) in &other.factors {
            *out.factors.entry(d.clone()).or_insert(0) += e;
        }
        for (i, e) in &other.indep {
            *out.indep.entry(*i).or_insert(0) += e;
        }
        out
    }

    /// Componentwise quotient, or `None` when `other` does not divide `self`.
    pub fn try_div(&self, other: &DiffMonomial) -> Option<DiffMonomial> {
        let mut out = self.clone();
        for (d, e) in &other.factors {
            match out.factors.get_mut(d) {
                Some(f) if *f >= *e => {
                    *f -= e;
                    if *f == 0 {
                        out.factors.remove(d);
                    }
                }
                _ => return None,
            }
        }
        for (i, e) in &other.indep {
            match out.indep.get_mut(i) {
                Some(f) if *f >= *e => {
                    *f -= e;
                    if *f == 0 {
                        out.indep.remove(i);
                    }
                }
                _ => return None,
            }
        }
        Some(out)
    }

    /// Componentwise gcd.
    pub fn gcd(&self, other: &DiffMonomial) -> DiffMonomial {
        let mut out = DiffMonomial::one();
        for (d, e) in &self.factors {
            if let Some(f) = other.factors.get(d) {
                out.factors.insert(d.clone(), *e.min(f));
            }
        }
        for (i, e) in &self.indep {
            if let Some(f) = other.indep.get(i) {
                out.indep.insert(*i, *e.min(f));
            }
        }
        out
    }

    /// Exponents collapsed to 1 (the radical of the power product).
    pub fn radical(&self) -> DiffMonomial {
        DiffMonomial {
            factors: self.factors.keys().map(|d| (d.clone(), 1)).collect(),
            indep: self.indep.keys().map(|i| (*i, 1)).collect(),
        }
    }
}

/// A sparse multivariate polynomial in derivatives and independent
/// variables over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPolynomial {
    /// monomial -> nonzero coefficient
    pub terms: BTreeMap<DiffMonomial, Rational>,
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        DiffPolynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(DiffMonomial::one(), c);
        }
        DiffPolynomial { terms }
    }

    pub fn one() -> Self {
        DiffPolynomial::constant(Rational::one())
    }

    pub fn from_derivative(d: Derivative) -> Self {
        DiffPolynomial::from_monomial(DiffMonomial::from_derivative(d), Rational::one())
    }

    pub fn from_indep(i: usize) -> Self {
        DiffPolynomial::from_monomial(DiffMonomial::from_indep(i), Rational::one())
    }

    pub fn from_monomial(m: DiffMonomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True if the polynomial is a rational constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// True if no derivative indeterminate occurs (independent variables may).
    pub fn is_derivative_free(&self) -> bool {
        self.terms.keys().all(|m| m.factors.is_empty())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&DiffMonomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert_term(&mut self, m: DiffMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPolynomial) -> DiffPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffPolynomial {
        DiffPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DiffPolynomial {
        if c.is_zero() {
            return DiffPolynomial::zero();
        }
        DiffPolynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &DiffMonomial, c: &Rational) -> DiffPolynomial {
        if c.is_zero() {
            return DiffPolynomial::zero();
        }
        DiffPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> DiffPolynomial {
        let mut out = DiffPolynomial::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// All derivatives occurring in the polynomial.
    pub fn derivatives(&self) -> impl Iterator<Item = &Derivative> {
        self.terms.keys().flat_map(|m| m.factors.keys())
    }

    /// Maximal derivative order occurring, 0 if derivative-free.
    pub fn max_order(&self) -> u32 {
        self.derivatives().map(|d| d.order()).max().unwrap_or(0)
    }

    /// Degree in a single derivative indeterminate.
    pub fn degree_in(&self, d: &Derivative) -> u32 {
        self.terms
            .keys()
            .map(|m| m.factors.get(d).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient polynomial of `d^k`, with the factor `d^k` removed.
    pub fn coefficient_of(&self, d: &Derivative, k: u32) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            if m.factors.get(d).copied().unwrap_or(0) == k {
                let mut m2 = m.clone();
                if k > 0 {
                    m2.factors.remove(d);
                }
                out.insert_term(m2, c.clone());
            }
        }
        out
    }

    /// The total derivative operator `D_i`.
    pub fn total_derivative(&self, i: usize) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            // product rule across derivative factors
            for (d, e) in &m.factors {
                let mut m2 = m.clone();
                if *e == 1 {
                    m2.factors.remove(d);
                } else {
                    *m2.factors.get_mut(d).unwrap() -= 1;
                }
                let m2 = m2.mul(&DiffMonomial::from_derivative(d.differentiate(i)));
                out.insert_term(m2, c * Rational::from(BigInt::from(*e)));
            }
            // explicit independent variables
            if let Some(e) = m.indep.get(&i) {
                let mut m2 = m.clone();
                if *e == 1 {
                    m2.indep.remove(&i);
                } else {
                    *m2.indep.get_mut(&i).unwrap() -= 1;
                }
                out.insert_term(m2, c * Rational::from(BigInt::from(*e)));
            }
        }
        out
    }

    /// Formal partial derivative with respect to a derivative indeterminate.
    pub fn partial_wrt_derivative(&self, d: &Derivative) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            if let Some(e) = m.factors.get(d) {
                let mut m2 = m.clone();
                if *e == 1 {
                    m2.factors.remove(d);
                } else {
                    *m2.factors.get_mut(d).unwrap() -= 1;
                }
                out.insert_term(m2, c * Rational::from(BigInt::from(*e)));
            }
        }
        out
    }

    /// Formal partial derivative with respect to an explicit independent variable.
    pub fn partial_wrt_indep(&self, i: usize) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            if let Some(e) = m.indep.get(&i) {
                let mut m2 = m.clone();
                if *e == 1 {
                    m2.indep.remove(&i);
                } else {
                    *m2.indep.get_mut(&i).unwrap() -= 1;
                }
                out.insert_term(m2, c * Rational::from(BigInt::from(*e)));
            }
        }
        out
    }

    /// Common monomial factor of all terms (1 for the zero polynomial).
    pub fn monomial_content(&self) -> DiffMonomial {
        let mut it = self.terms.keys();
        let mut g = match it.next() {
            Some(m) => m.clone(),
            None => return DiffMonomial::one(),
        };
        for m in it {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Rational content: the positive rational `c` such that `self / c` has
    /// coprime integer coefficients.
    pub fn rational_content(&self) -> Rational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num::integer::gcd(num_gcd, c.numer().abs());
            den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
        }
        if num_gcd.is_zero() {
            return Rational::one();
        }
        Rational::new(num_gcd, den_lcm)
    }

    /// Divide out the rational content.
    pub fn primitive_part(&self) -> DiffPolynomial {
        if self.is_zero() {
            return DiffPolynomial::zero();
        }
        let c = self.rational_content();
        self.scale(&c.recip())
    }

    /// Rename derivatives through `map`; used when relabelling parametric
    /// derivatives as states or duplicating a signature.
    pub fn map_derivatives(&self, map: &impl Fn(&Derivative) -> Derivative) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            let mut m2 = DiffMonomial {
                factors: BTreeMap::new(),
                indep: m.indep.clone(),
            };
            for (d, e) in &m.factors {
                *m2.factors.entry(map(d)).or_insert(0) += e;
            }
            out.insert_term(m2, c.clone());
        }
        out
    }

    /// Floating-point evaluation. Every derivative occurring must be bound.
    pub fn eval_f64(
        &self,
        point: &dyn Fn(&Derivative) -> Option<f64>,
        indep: &[f64],
    ) -> Result<f64> {
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut v = c.to_f64().ok_or(Error::DivZero)?;
            for (d, e) in &m.factors {
                let x = point(d).ok_or_else(|| {
                    Error::Invalid(format!("unbound derivative in evaluation: {:?}", d))
                })?;
                v *= x.powi(*e as i32);
            }
            for (i, e) in &m.indep {
                v *= indep[*i].powi(*e as i32);
            }
            sum += v;
        }
        Ok(sum)
    }

    /// Exact rational evaluation.
    pub fn eval_exact(
        &self,
        point: &dyn Fn(&Derivative) -> Option<Rational>,
        indep: &[Rational],
    ) -> Result<Rational> {
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (d, e) in &m.factors {
                let x = point(d).ok_or_else(|| {
                    Error::Invalid(format!("unbound derivative in evaluation: {:?}", d))
                })?;
                for _ in 0..*e {
                    v *= &x;
                }
            }
            for (i, e) in &m.indep {
                for _ in 0..*e {
                    v *= &indep[*i];
                }
            }
            sum += v;
        }
        Ok(sum)
    }
}

impl fmt::Display for DiffPolynomial {
    /// Debug-oriented display with structural term order; use
    /// `render::poly_to_text` for the canonical surface syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (d, e) in &m.factors {
                write!(f, "*[{}:{:?}]^{}", d.dep, d.idx, e)?;
            }
            for (i, e) in &m.indep {
                write!(f, "*x{}^{}", i, e)?;
            }
        }
        Ok(())
    }
}

/// A quotient of differential polynomials with nonzero denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalExpr {
    pub num: DiffPolynomial,
    pub den: DiffPolynomial,
}

impl RationalExpr {
    /// Build `num/den`, removing the common monomial factor and the rational
    /// content so that `den` is primitive. The sign convention (positive
    /// leading coefficient of `den` under a term order) is applied by the
    /// caller when a ranking is in scope; here the structurally largest
    /// denominator term is made positive, which is deterministic.
    pub fn new(num: DiffPolynomial, den: DiffPolynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalExpr {
                num,
                den: DiffPolynomial::one(),
            };
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                DiffPolynomial {
                    terms: num
                        .terms
                        .iter()
                        .map(|(m, c)| (m.try_div(&g).unwrap(), c.clone()))
                        .collect(),
                },
                DiffPolynomial {
                    terms: den
                        .terms
                        .iter()
                        .map(|(m, c)| (m.try_div(&g).unwrap(), c.clone()))
                        .collect(),
                },
            )
        };
        // make den primitive and scale num accordingly
        let c = den.rational_content();
        let mut scale = c.recip();
        // deterministic sign: structurally largest denominator term positive
        if let Some((_, lc)) = den.terms.iter().next_back() {
            if lc.is_negative() {
                scale = -scale;
            }
        }
        den = den.scale(&scale);
        num = num.scale(&scale);
        if den == DiffPolynomial::one() {
            // fall through, already canonical
        }
        RationalExpr { num, den }
    }

    pub fn from_poly(p: DiffPolynomial) -> Self {
        RationalExpr {
            num: p,
            den: DiffPolynomial::one(),
        }
    }

    pub fn zero() -> Self {
        RationalExpr::from_poly(DiffPolynomial::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        RationalExpr::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        RationalExpr::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RationalExpr) -> Result<RationalExpr> {
        if other.is_zero() {
            return Err(Error::Invalid("division by the zero expression".into()));
        }
        Ok(RationalExpr::new(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn pow(&self, n: u32) -> RationalExpr {
        RationalExpr {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Total derivative via the quotient rule.
    pub fn total_derivative(&self, i: usize) -> RationalExpr {
        let dn = self.num.total_derivative(i);
        let dd = self.den.total_derivative(i);
        if dd.is_zero() {
            RationalExpr::new(dn, self.den.clone())
        } else {
            RationalExpr::new(
                dn.mul(&self.den).sub(&self.num.mul(&dd)),
                self.den.mul(&self.den),
            )
        }
    }

    pub fn map_derivatives(&self, map: &impl Fn(&Derivative) -> Derivative) -> RationalExpr {
        RationalExpr {
            num: self.num.map_derivatives(map),
            den: self.den.map_derivatives(map),
        }
    }

    pub fn max_order(&self) -> u32 {
        self.num.max_order().max(self.den.max_order())
    }

    /// Floating-point value of `num/den`; a denominator within `1e-12` of
    /// zero signals a pivot violation.
    pub fn eval_f64(
        &self,
        point: &dyn Fn(&Derivative) -> Option<f64>,
        indep: &[f64],
    ) -> Result<f64> {
        let d = self.den.eval_f64(point, indep)?;
        if d.abs() <= 1e-12 {
            return Err(Error::DivZero);
        }
        Ok(self.num.eval_f64(point, indep)? / d)
    }

    /// Exact rational value of `num/den`.
    pub fn eval_exact(
        &self,
        point: &dyn Fn(&Derivative) -> Option<Rational>,
        indep: &[Rational],
    ) -> Result<Rational> {
        let d = self.den.eval_exact(point, indep)?;
        if d.is_zero() {
            return Err(Error::DivZero);
        }
        Ok(self.num.eval_exact(point, indep)? / d)
    }
}
