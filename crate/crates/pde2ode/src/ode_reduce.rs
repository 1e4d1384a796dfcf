//! Relabel parametric derivatives as state variables and emit one
//! first-order ODE system per independent variable, sharing the constraints
//! and pivot inequations.

use std::collections::BTreeMap;

use crate::diffpoly::{Derivative, DiffPolynomial, RationalExpr, SystemSignature};
use crate::elimination::{reduce, RifForm};
use crate::error::{Error, Result};
use crate::initial_data::parametric_derivatives;

/// A first-order system dv/dx_i = f_i(x, v) on the constraint variety
/// h(x, v) = 0 away from g(x, v) = 0. States live in their own signature:
/// same independent variables, one dependent name per state.
#[derive(Debug, Clone)]
pub struct ParametricOdeSystem {
    /// signature whose dependent variables are the states
    pub signature: SystemSignature,
    /// source derivative for each state, in the original signature
    pub sources: Vec<Derivative>,
    /// odes[i][k] = right-hand side of d(state k)/d(x_i)
    pub odes: Vec<Vec<RationalExpr>>,
    pub constraints: Vec<DiffPolynomial>,
    pub inequations: Vec<DiffPolynomial>,
}

impl ParametricOdeSystem {
    pub fn n_states(&self) -> usize {
        self.sources.len()
    }

    pub fn state_derivative(&self, k: usize) -> Derivative {
        Derivative::base(k, self.signature.n_indep())
    }

    pub fn state_names(&self) -> &[String] {
        &self.signature.dep_names
    }
}

/// Rewrite a finite-dimensional RIF form as parametric ODE systems.
pub fn reduce_to_parametric_ode(f: &RifForm) -> Result<ParametricOdeSystem> {
    let data = parametric_derivatives(f)?;
    let n_indep = f.signature.n_indep();
    let mut index: BTreeMap<Derivative, usize> = BTreeMap::new();
    for (k, d) in data.parametric.iter().enumerate() {
        index.insert(d.clone(), k);
    }
    let state_names: Vec<String> = data
        .parametric
        .iter()
        .map(|d| d.subscript_name(&f.signature))
        .collect();
    let signature = SystemSignature::new(f.signature.indep_names.clone(), state_names);
    let rename = |p: &DiffPolynomial| -> Result<DiffPolynomial> {
        for d in p.derivatives() {
            if !index.contains_key(d) {
                return Err(Error::NotClosed(d.subscript_name(&f.signature)));
            }
        }
        Ok(p.map_derivatives(&|d| Derivative::base(index[d], n_indep)))
    };
    let mut odes = Vec::with_capacity(n_indep);
    for i in 0..n_indep {
        let mut fi = Vec::with_capacity(data.parametric.len());
        for theta in &data.parametric {
            let d_theta = DiffPolynomial::from_derivative(theta.differentiate(i));
            let red = reduce(&d_theta, f)?;
            fi.push(RationalExpr {
                num: rename(&red.expr.num)?,
                den: rename(&red.expr.den)?,
            });
        }
        odes.push(fi);
    }
    let mut constraints = Vec::new();
    for c in &f.constraints {
        constraints.push(rename(c)?);
    }
    let mut inequations: Vec<DiffPolynomial> = Vec::new();
    for g in &f.inequations {
        // guards not expressible in states cannot be monitored along the flow
        if let Ok(r) = rename(g) {
            if !inequations.contains(&r) {
                inequations.push(r);
            }
        }
    }
    Ok(ParametricOdeSystem {
        signature,
        sources: data.parametric,
        odes,
        constraints,
        inequations,
    })
}

/// Total derivative of `p` in direction x_j through the flow: the chain rule
/// substitutes dv_r/dx_j = f_j[r].
fn chain_poly(p: &DiffPolynomial, j: usize, sys: &ParametricOdeSystem) -> RationalExpr {
    let mut out = RationalExpr::from_poly(p.partial_wrt_indep(j));
    for r in 0..sys.n_states() {
        let pv = p.partial_wrt_derivative(&sys.state_derivative(r));
        if pv.is_zero() {
            continue;
        }
        out = out.add(&RationalExpr::from_poly(pv).mul(&sys.odes[j][r]));
    }
    out
}

fn chain_expr(e: &RationalExpr, j: usize, sys: &ParametricOdeSystem) -> RationalExpr {
    let dn = chain_poly(&e.num, j, sys);
    let dd = chain_poly(&e.den, j, sys);
    // (n/d)' = (n' d - n d') / d^2
    let num = dn
        .mul(&RationalExpr::from_poly(e.den.clone()))
        .sub(&RationalExpr::from_poly(e.num.clone()).mul(&dd));
    RationalExpr::new(
        num.num,
        num.den.mul(&e.den).mul(&e.den),
    )
}

/// One residual of the compatibility check; empty report means the flows are
/// formally compatible.
#[derive(Debug, Clone)]
pub struct CompatibilityResidual {
    pub state: usize,
    pub pair: (usize, usize),
    pub residual: DiffPolynomial,
}

#[derive(Debug, Clone, Default)]
pub struct CompatibilityReport {
    pub residuals: Vec<CompatibilityResidual>,
    /// nonzero reductions of D_i h (constraint drift under the flow)
    pub constraint_residuals: Vec<(usize, usize, DiffPolynomial)>,
}

impl CompatibilityReport {
    pub fn is_compatible(&self) -> bool {
        self.residuals.is_empty() && self.constraint_residuals.is_empty()
    }
}

/// Cross-derivatives of the right-hand sides, reduced modulo the constraint
/// ideal; a nonzero residual flags a missing integrability condition.
pub fn check_formal_compatibility(sys: &ParametricOdeSystem) -> CompatibilityReport {
    use crate::ranking::Ranking;
    let ranking = Ranking::grlex(sys.signature.n_indep(), sys.signature.n_dep());
    let mut mod_form = RifForm::empty(sys.signature.clone(), ranking.clone());
    mod_form.constraints = sys
        .constraints
        .iter()
        .map(|c| ranking.canonicalize_equation(c))
        .collect();
    let reduce_mod = |p: &DiffPolynomial| -> DiffPolynomial {
        match reduce(p, &mod_form) {
            Ok(r) => ranking.canonicalize_equation(&r.expr.num),
            Err(_) => p.clone(),
        }
    };
    let mut report = CompatibilityReport::default();
    let n = sys.signature.n_indep();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..sys.n_states() {
                let a = chain_expr(&sys.odes[i][k], j, sys);
                let b = chain_expr(&sys.odes[j][k], i, sys);
                let diff = a.sub(&b);
                let res = reduce_mod(&diff.num);
                if !res.is_zero() {
                    report.residuals.push(CompatibilityResidual {
                        state: k,
                        pair: (i, j),
                        residual: res,
                    });
                }
            }
        }
    }
    for (ci, h) in sys.constraints.iter().enumerate() {
        for i in 0..n {
            let dh = chain_poly(h, i, sys);
            let res = reduce_mod(&dh.num);
            if !res.is_zero() {
                report.constraint_residuals.push((ci, i, res));
            }
        }
    }
    report
}
