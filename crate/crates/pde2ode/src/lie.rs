//! Structure constants of a finite-dimensional Lie algebra of symmetry
//! vector fields, computed directly from a canonical form and its initial
//! data, with derived-algebra diagnostics.
//!
//! Each solution of the determining system is a vector field
//! `X = Σ_l c_l(x) ∂/∂x_{s(l)}` whose coefficient functions are the
//! dependent variables; the basis field `X_i` is the solution whose
//! initial-data vector is the `i`-th unit vector. Commutator coefficients
//! `[A,B]_k = Σ_l (a_l D_l b_k − b_l D_l a_k)` are formed symbolically over
//! a doubled signature, every derivative is reduced modulo the canonical
//! form to parametric derivatives, and the result is evaluated exactly at a
//! rational expansion point.

use std::collections::BTreeMap;

use num::Zero;

use crate::diffpoly::{
    rat_int, Derivative, DiffMonomial, DiffPolynomial, Rational, RationalExpr, SystemSignature,
};
use crate::elimination::{reduce, RifForm, Rule};
use crate::error::{Error, Result};
use crate::initial_data::InitialData;
use crate::ranking::Ranking;

/// Assignment of dependent variables to independent-variable slots: the
/// dependent variable `l` is the coefficient of `∂/∂x_{slot[l]}`.
#[derive(Debug, Clone)]
pub struct VectorFieldSpec {
    pub slot: Vec<usize>,
}

impl VectorFieldSpec {
    /// One coefficient per independent variable, in matching declaration
    /// order (`dep l ↔ ∂/∂x_l`).
    pub fn diagonal(n: usize) -> Self {
        VectorFieldSpec {
            slot: (0..n).collect(),
        }
    }

    /// Parse a `"xi:x,eta:y"`-style assignment against a signature.
    pub fn parse(text: &str, sig: &SystemSignature) -> Result<Self> {
        let mut slot = vec![usize::MAX; sig.dep_names.len()];
        for entry in text.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (dep, indep) = entry.split_once(':').ok_or_else(|| {
                Error::Invalid(format!("vector field entry `{entry}` is not `dep:indep`"))
            })?;
            let d = sig
                .dep_names
                .iter()
                .position(|n| n == dep.trim())
                .ok_or_else(|| Error::UnknownSymbol(dep.trim().to_string()))?;
            let i = sig
                .indep_names
                .iter()
                .position(|n| n == indep.trim())
                .ok_or_else(|| Error::UnknownSymbol(indep.trim().to_string()))?;
            slot[d] = i;
        }
        let spec = VectorFieldSpec { slot };
        spec.validate(sig)?;
        Ok(spec)
    }

    fn validate(&self, sig: &SystemSignature) -> Result<()> {
        if self.slot.len() != sig.dep_names.len() {
            return Err(Error::Invalid(
                "vector field must assign every dependent variable".into(),
            ));
        }
        let mut seen = vec![false; sig.indep_names.len()];
        for (d, &s) in self.slot.iter().enumerate() {
            if s >= sig.indep_names.len() {
                return Err(Error::Invalid(format!(
                    "dependent variable `{}` has no direction",
                    sig.dep_names[d]
                )));
            }
            if seen[s] {
                return Err(Error::Invalid(format!(
                    "direction `{}` assigned twice",
                    sig.indep_names[s]
                )));
            }
            seen[s] = true;
        }
        Ok(())
    }
}

/// Exact structure constants `[X_i, X_j] = Σ_k c[i][j][k] X_k` at a rational
/// expansion point, for the basis of solutions with unit initial data.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    /// parametric derivatives in basis order (X_k ↔ basis[k])
    pub basis: Vec<Derivative>,
    pub basis_names: Vec<String>,
    /// expansion point, one value per independent variable
    pub point: Vec<Rational>,
    pub c: Vec<Vec<Vec<Rational>>>,
}

impl StructureConstants {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Bracket of two fields given by coordinate vectors in the basis.
    pub fn bracket_of(&self, v: &[Rational], w: &[Rational]) -> Vec<Rational> {
        let m = self.dimension();
        let mut out = vec![Rational::zero(); m];
        for a in 0..m {
            if v[a].is_zero() {
                continue;
            }
            for b in 0..m {
                if w[b].is_zero() {
                    continue;
                }
                for k in 0..m {
                    out[k] += &v[a] * &w[b] * &self.c[a][b][k];
                }
            }
        }
        out
    }
}

/// Resolve an optional basis-order request (subscript names such as
/// `eta_xx`) against the parametric derivatives; default is listing order.
pub fn resolve_basis(
    id: &InitialData,
    sig: &SystemSignature,
    names: Option<&[String]>,
) -> Result<Vec<Derivative>> {
    let Some(names) = names else {
        return Ok(id.parametric.clone());
    };
    if names.len() != id.parametric.len() {
        return Err(Error::Invalid(format!(
            "basis lists {} derivatives, expected {}",
            names.len(),
            id.parametric.len()
        )));
    }
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let d = id
            .parametric
            .iter()
            .find(|d| d.subscript_name(sig) == *name)
            .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
        if out.contains(d) {
            return Err(Error::Invalid(format!("basis repeats `{name}`")));
        }
        out.push(d.clone());
    }
    Ok(out)
}

fn check_linear(f: &RifForm) -> Result<()> {
    for r in &f.rules {
        let lead_name = r.lead.subscript_name(&f.signature);
        if r.rhs.den.terms.keys().any(|m| m.deriv_degree() > 0) {
            return Err(Error::NotLinear(
                lead_name,
                "denominator involves the unknowns".into(),
            ));
        }
        if r.rhs.num.terms.keys().any(|m| m.deriv_degree() > 1) {
            return Err(Error::NotLinear(
                lead_name,
                "right-hand side is nonlinear in the unknowns".into(),
            ));
        }
    }
    Ok(())
}

fn check_inequations_at_point(f: &RifForm, point: &[Rational]) -> Result<()> {
    for g in &f.inequations {
        // inequations involving the unknowns cannot be checked pointwise
        if g.terms.keys().any(|m| m.deriv_degree() > 0) {
            continue;
        }
        let v = g.eval_exact(&|_| None, point)?;
        if v.is_zero() {
            return Err(Error::PivotAtPoint(
                crate::render::poly_to_text(g, &f.signature),
            ));
        }
    }
    Ok(())
}

/// The canonical form over the doubled signature (an `a`-copy and a `b`-copy
/// of every dependent variable sharing the same rules).
fn doubled_form(f: &RifForm) -> RifForm {
    let n = f.signature.dep_names.len();
    let mut dep_names = Vec::with_capacity(2 * n);
    for name in &f.signature.dep_names {
        dep_names.push(format!("a_{name}"));
    }
    for name in &f.signature.dep_names {
        dep_names.push(format!("b_{name}"));
    }
    let sig = SystemSignature::new(f.signature.indep_names.clone(), dep_names);
    let ranking = Ranking::grlex(sig.indep_names.len(), 2 * n);
    let mut out = RifForm::empty(sig, ranking);
    for shift in [0usize, n] {
        let rename = |d: &Derivative| Derivative::new(d.dep + shift, d.idx.clone());
        for r in &f.rules {
            out.rules.push(Rule {
                lead: rename(&r.lead),
                rhs: r.rhs.map_derivatives(&rename),
                pivot: r.pivot.as_ref().map(|p| p.map_derivatives(&rename)),
            });
        }
        for c in &f.constraints {
            out.constraints.push(c.map_derivatives(&rename));
        }
        for g in &f.inequations {
            out.inequations.push(g.map_derivatives(&rename));
        }
    }
    out.status = f.status.clone();
    out
}

/// Symbolic commutator coefficient `[A,B]_k` over the doubled signature.
fn commutator_coefficient(k: usize, n: usize, n_indep: usize, vf: &VectorFieldSpec) -> DiffPolynomial {
    let mut c = DiffPolynomial::zero();
    for l in 0..n {
        let mut e = vec![0u32; n_indep];
        e[vf.slot[l]] = 1;
        let a_l = DiffMonomial::from_derivative(Derivative::new(l, vec![0; n_indep]));
        let b_l = DiffMonomial::from_derivative(Derivative::new(n + l, vec![0; n_indep]));
        let d_b_k = DiffMonomial::from_derivative(Derivative::new(n + k, e.clone()));
        let d_a_k = DiffMonomial::from_derivative(Derivative::new(k, e));
        c = c.add(&DiffPolynomial::from_monomial(a_l.mul(&d_b_k), rat_int(1)));
        c = c.sub(&DiffPolynomial::from_monomial(b_l.mul(&d_a_k), rat_int(1)));
    }
    c
}

/// Structure constants of the symmetry algebra cut out by `f`, for the basis
/// of solutions whose initial data at `point` are the unit vectors in the
/// order of `basis`.
pub fn structure_constants(
    f: &RifForm,
    id: &InitialData,
    vf: &VectorFieldSpec,
    point: &[Rational],
    basis: &[Derivative],
) -> Result<StructureConstants> {
    let n = f.signature.dep_names.len();
    let n_indep = f.signature.indep_names.len();
    vf.validate(&f.signature)?;
    check_linear(f)?;
    check_inequations_at_point(f, point)?;
    if point.len() != n_indep {
        return Err(Error::Invalid(format!(
            "expansion point has {} coordinates, expected {n_indep}",
            point.len()
        )));
    }
    if !id.constraints_among_parametric.is_empty() {
        return Err(Error::Invalid(
            "initial data carries nonlinear constraints; the solution set is not a vector space"
                .into(),
        ));
    }
    if basis.len() != id.parametric.len() {
        return Err(Error::Invalid(format!(
            "basis has {} elements, expected {}",
            basis.len(),
            id.parametric.len()
        )));
    }

    let double = doubled_form(f);
    let m = basis.len();
    let mut basis_pos: BTreeMap<Derivative, usize> = BTreeMap::new();
    for (k, d) in basis.iter().enumerate() {
        basis_pos.insert(d.clone(), k);
    }

    // reduce D^σ([A,B]_k) once per basis slot; the result is bilinear in the
    // parametric derivatives of the two copies
    let mut reduced: Vec<RationalExpr> = Vec::with_capacity(m);
    for d in basis {
        let mut p = commutator_coefficient(d.dep, n, n_indep, vf);
        for (i, &e) in d.idx.iter().enumerate() {
            for _ in 0..e {
                p = p.total_derivative(i);
            }
        }
        reduced.push(reduce(&p, &double)?.expr);
    }

    let mut c = vec![vec![vec![Rational::zero(); m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            let value = |d: &Derivative| -> Option<Rational> {
                let (orig, sel) = if d.dep < n {
                    (d.clone(), i)
                } else {
                    (Derivative::new(d.dep - n, d.idx.clone()), j)
                };
                let k = *basis_pos.get(&orig)?;
                Some(if k == sel { rat_int(1) } else { rat_int(0) })
            };
            for (k, expr) in reduced.iter().enumerate() {
                c[i][j][k] = match expr.eval_exact(&value, point) {
                    Ok(v) => v,
                    Err(Error::DivZero) => {
                        return Err(Error::PivotAtPoint(crate::render::poly_to_text(
                            &expr.den,
                            &double.signature,
                        )))
                    }
                    Err(e) => return Err(e),
                };
            }
        }
    }
    Ok(StructureConstants {
        basis: basis.to_vec(),
        basis_names: basis.iter().map(|d| d.subscript_name(&f.signature)).collect(),
        point: point.to_vec(),
        c,
    })
}

/// Bring rows to echelon form by exact Gaussian elimination; returns the
/// nonzero rows (a spanning set of the row space).
fn row_space(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for col in 0..width {
        let Some(p) = (0..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        let pivot_row = rows.swap_remove(p);
        for r in rows.iter_mut() {
            if !r[col].is_zero() {
                let f = &r[col] / &pivot_row[col];
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        out.push(pivot_row);
    }
    out
}

fn bracket_vectors(sc: &StructureConstants) -> Vec<Vec<Rational>> {
    let m = sc.dimension();
    let mut rows = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if sc.c[i][j].iter().any(|x| !x.is_zero()) {
                rows.push(sc.c[i][j].clone());
            }
        }
    }
    rows
}

/// Dimension of the derived algebra: the exact rank of the span of all
/// bracket vectors.
pub fn derived_algebra_dimension(sc: &StructureConstants) -> usize {
    row_space(bracket_vectors(sc)).len()
}

/// Whether all brackets between spanning elements of the derived algebra
/// vanish.
pub fn derived_algebra_abelian(sc: &StructureConstants) -> bool {
    let span = row_space(bracket_vectors(sc));
    span.iter().all(|v| {
        span.iter()
            .all(|w| sc.bracket_of(v, w).iter().all(|x| x.is_zero()))
    })
}

/// An `r`-th order ODE with this point-symmetry algebra is linearizable iff
/// the derived algebra has dimension `r` and is abelian.
pub fn linearizability_verdict(sc: &StructureConstants, r: usize) -> bool {
    derived_algebra_dimension(sc) == r && derived_algebra_abelian(sc)
}
