//! Rankings of derivatives and the induced term order on monomials.

use std::cmp::Ordering;

use crate::diffpoly::{Derivative, DiffMonomial, DiffPolynomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankKind {
    GrLex,
}

/// A total order on derivatives, compatible with and stable under
/// differentiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub kind: RankKind,
    /// permutation of independent-variable indices used for tie-breaking
    pub indep_order: Vec<usize>,
    /// permutation of dependent-variable indices
    pub dep_order: Vec<usize>,
}

impl Ranking {
    /// Default grlex ranking with variables in declaration order.
    pub fn grlex(n_indep: usize, n_dep: usize) -> Self {
        Ranking {
            kind: RankKind::GrLex,
            indep_order: (0..n_indep).collect(),
            dep_order: (0..n_dep).collect(),
        }
    }

    /// Compare two derivatives: total order first, then lexicographically on
    /// the multi-index in `indep_order`, then by dependent variable.
    pub fn compare(&self, a: &Derivative, b: &Derivative) -> Ordering {
        match a.order().cmp(&b.order()) {
            Ordering::Equal => {}
            o => return o,
        }
        for &i in &self.indep_order {
            match a.idx[i].cmp(&b.idx[i]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        let pa = self.dep_order.iter().position(|&d| d == a.dep).unwrap();
        let pb = self.dep_order.iter().position(|&d| d == b.dep).unwrap();
        // later position in dep_order ranks higher
        pb.cmp(&pa)
    }

    /// The ranking-maximal derivative occurring in `p`.
    pub fn leading_derivative(&self, p: &DiffPolynomial) -> Result<Derivative> {
        p.derivatives()
            .max_by(|a, b| self.compare(a, b))
            .cloned()
            .ok_or(Error::NoDerivative)
    }

    /// Ranking-induced term order on monomials: derivative total degree
    /// first, then the descending derivative multisets lexicographically,
    /// then the explicit independent part (degree, then lex).
    pub fn term_cmp(&self, a: &DiffMonomial, b: &DiffMonomial) -> Ordering {
        match a.deriv_degree().cmp(&b.deriv_degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let mut da: Vec<&Derivative> = Vec::new();
        for (d, e) in &a.factors {
            for _ in 0..*e {
                da.push(d);
            }
        }
        let mut db: Vec<&Derivative> = Vec::new();
        for (d, e) in &b.factors {
            for _ in 0..*e {
                db.push(d);
            }
        }
        da.sort_by(|x, y| self.compare(y, x));
        db.sort_by(|x, y| self.compare(y, x));
        for (x, y) in da.iter().zip(db.iter()) {
            match self.compare(x, y) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        match a.indep_degree().cmp(&b.indep_degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for &i in &self.indep_order {
            let ea = a.indep.get(&i).copied().unwrap_or(0);
            let eb = b.indep.get(&i).copied().unwrap_or(0);
            match ea.cmp(&eb) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Leading monomial of a nonzero polynomial under the term order.
    pub fn leading_monomial<'a>(&self, p: &'a DiffPolynomial) -> Option<&'a DiffMonomial> {
        p.terms.keys().max_by(|a, b| self.term_cmp(a, b))
    }

    pub fn leading_coefficient(&self, p: &DiffPolynomial) -> Option<crate::diffpoly::Rational> {
        self.leading_monomial(p).map(|m| p.terms[m].clone())
    }

    /// Canonical equation form: primitive with positive leading coefficient.
    pub fn canonicalize_equation(&self, p: &DiffPolynomial) -> DiffPolynomial {
        use num::traits::Signed;
        if p.is_zero() {
            return DiffPolynomial::zero();
        }
        let pp = p.primitive_part();
        let lm = self.leading_monomial(&pp).unwrap();
        if pp.terms[lm].is_negative() {
            pp.neg()
        } else {
            pp
        }
    }
}
