//! Staircase of leading derivatives, the complementary parametric
//! derivatives, finite-dimensionality, and the initial-data statement.

use std::collections::BTreeMap;

use crate::diffpoly::{Derivative, DiffPolynomial};
use crate::elimination::RifForm;
use crate::error::{Error, Result};

/// Per dependent variable, the minimal generators of the monomial ideal of
/// lead multi-indices.
#[derive(Debug, Clone)]
pub struct Staircase {
    /// indexed by dependent variable
    pub generators: Vec<Vec<Vec<u32>>>,
}

/// The initial-data statement: one arbitrary constant per parametric
/// derivative, evaluated at an expansion point.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub parametric: Vec<Derivative>,
    /// x_0, y_0, ... after the independent variables
    pub point_symbols: Vec<String>,
    /// C_1 .. C_m, attached in listing order
    pub constants: Vec<String>,
    /// constraints of the form relating parametric derivatives only
    pub constraints_among_parametric: Vec<DiffPolynomial>,
}

impl InitialData {
    /// Formal dimension: the number of parametric derivatives. Nonlinear
    /// constraints among them are reported but not subtracted.
    pub fn dimension(&self) -> usize {
        self.parametric.len()
    }
}

fn dominates(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x >= y)
}

/// Minimal generators of the lead ideal, per dependent variable.
pub fn leading_set(f: &RifForm) -> Staircase {
    let mut generators: Vec<Vec<Vec<u32>>> = vec![Vec::new(); f.signature.n_dep()];
    for r in &f.rules {
        let idx = r.lead.idx.clone();
        let gens = &mut generators[r.lead.dep];
        if gens.iter().any(|g| dominates(&idx, g)) {
            continue;
        }
        gens.retain(|g| !dominates(g, &idx));
        gens.push(idx);
    }
    for gens in &mut generators {
        gens.sort();
    }
    Staircase { generators }
}

/// A solution space is finite-dimensional exactly when, for every dependent
/// variable and every independent variable, some lead is a pure power of
/// that variable (each staircase axis is blocked).
pub fn is_finite_dimensional(f: &RifForm) -> bool {
    let stair = leading_set(f);
    let n = f.signature.n_indep();
    stair.generators.iter().all(|gens| {
        (0..n).all(|axis| {
            gens.iter()
                .any(|g| g.iter().enumerate().all(|(i, &e)| i == axis || e == 0))
        })
    })
}

/// Listing order for initial data and ODE states: total order ascending,
/// then dependent variable in declaration order, then derivatives in earlier
/// independent variables first (so u_x is listed before u_y).
pub fn presentation_cmp(a: &Derivative, b: &Derivative) -> std::cmp::Ordering {
    a.order()
        .cmp(&b.order())
        .then(a.dep.cmp(&b.dep))
        .then_with(|| {
            for (x, y) in a.idx.iter().zip(b.idx.iter()) {
                match y.cmp(x) {
                    std::cmp::Ordering::Equal => {}
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        })
}

/// Enumerate the parametric derivatives (staircase complement) of a
/// finite-dimensional form, with point and constant names.
pub fn parametric_derivatives(f: &RifForm) -> Result<InitialData> {
    if !is_finite_dimensional(f) {
        return Err(Error::Infinite);
    }
    let stair = leading_set(f);
    let n = f.signature.n_indep();
    let mut parametric: Vec<Derivative> = Vec::new();
    for (dep, gens) in stair.generators.iter().enumerate() {
        // per-axis bound from the pure-power generator
        let bounds: Vec<u32> = (0..n)
            .map(|axis| {
                gens.iter()
                    .filter(|g| g.iter().enumerate().all(|(i, &e)| i == axis || e == 0))
                    .map(|g| g[axis])
                    .min()
                    .unwrap()
            })
            .collect();
        let mut idx = vec![0u32; n];
        loop {
            if !gens.iter().any(|g| dominates(&idx, g)) {
                parametric.push(Derivative::new(dep, idx.clone()));
            }
            // advance the box counter
            let mut axis = 0;
            loop {
                if axis == n {
                    break;
                }
                idx[axis] += 1;
                if idx[axis] < bounds[axis] {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
            if axis == n {
                break;
            }
        }
    }
    parametric.sort_by(presentation_cmp);
    let point_symbols = f
        .signature
        .indep_names
        .iter()
        .map(|v| format!("{v}_0"))
        .collect();
    let constants = (1..=parametric.len()).map(|i| format!("C_{i}")).collect();
    // constraints in normal form mention only irreducible (parametric)
    // derivatives, so the whole constraint set relates initial data
    let constraints_among_parametric = f.constraints.clone();
    Ok(InitialData {
        parametric,
        point_symbols,
        constants,
        constraints_among_parametric,
    })
}

/// Brute-force staircase-complement count up to a box bound; used as an
/// enumeration oracle in tests.
pub fn brute_force_parametric_count(f: &RifForm, bound: u32) -> usize {
    let stair = leading_set(f);
    let n = f.signature.n_indep();
    let mut count = 0usize;
    for gens in &stair.generators {
        let mut idx = vec![0u32; n];
        loop {
            if !gens.iter().any(|g| dominates(&idx, g)) {
                count += 1;
            }
            let mut axis = 0;
            loop {
                if axis == n {
                    break;
                }
                idx[axis] += 1;
                if idx[axis] <= bound {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
            if axis == n {
                break;
            }
        }
    }
    count
}

/// Multiplicity of each parametric derivative class; handy for reports.
pub fn parametric_by_order(data: &InitialData) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for d in &data.parametric {
        *m.entry(d.order()).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::{rif, DEFAULT_PROLONGATION_CAP};
    use crate::parse::parse_system;
    use crate::ranking::Ranking;

    fn form(src: &str, n_indep: usize, n_dep: usize) -> RifForm {
        let src = parse_system(src).unwrap();
        rif(&src, &Ranking::grlex(n_indep, n_dep), DEFAULT_PROLONGATION_CAP).unwrap()
    }

    #[test]
    fn example1_parametric_list() {
        let f = form(
            "vars x,y; funcs u(x,y);\n\
             eq diff(u,x,x) - diff(u,x,y) = 0;\n\
             eq diff(u,y)^2 + diff(u,y) - u = 0;",
            2,
            1,
        );
        let data = parametric_derivatives(&f).unwrap();
        let names: Vec<String> = data
            .parametric
            .iter()
            .map(|d| d.subscript_name(&f.signature))
            .collect();
        assert_eq!(names, vec!["u", "u_x", "u_y"]);
        assert_eq!(data.dimension(), 3);
        assert_eq!(data.constraints_among_parametric.len(), 2);
        assert_eq!(data.constants, vec!["C_1", "C_2", "C_3"]);
        assert_eq!(data.point_symbols, vec!["x_0", "y_0"]);
    }

    #[test]
    fn determining_system_parametric_list() {
        let f = form(
            "vars x,y; funcs xi(x,y), eta(x,y);\n\
             eq 2*diff(eta,x,x,x) - y*diff(eta,y) + eta = 0;\n\
             eq y*diff(eta,x,y) + diff(eta,x) = 0;\n\
             eq y^2*diff(eta,y,y) + y*diff(eta,y) - eta = 0;\n\
             eq diff(xi,x) = 0;\n\
             eq diff(xi,y) = 0;",
            2,
            2,
        );
        assert!(is_finite_dimensional(&f));
        let data = parametric_derivatives(&f).unwrap();
        let names: Vec<String> = data
            .parametric
            .iter()
            .map(|d| d.subscript_name(&f.signature))
            .collect();
        assert_eq!(names, vec!["xi", "eta", "eta_x", "eta_y", "eta_xx"]);
        assert_eq!(data.dimension(), 5);
        assert!(data.constraints_among_parametric.is_empty());
    }

    #[test]
    fn infinite_dimensional_detected() {
        // heat-like single rule u_xx = u_y leaves the y-axis open
        let f = form("vars x,y; funcs u(x,y); eq diff(u,x,x) - diff(u,y) = 0;", 2, 1);
        assert!(!is_finite_dimensional(&f));
        assert!(matches!(parametric_derivatives(&f), Err(Error::Infinite)));
    }

    #[test]
    fn enumeration_agrees_with_brute_force() {
        let f = form(
            "vars x,y; funcs u(x,y);\n\
             eq diff(u,x,x) - diff(u,x,y) = 0;\n\
             eq diff(u,y)^2 + diff(u,y) - u = 0;",
            2,
            1,
        );
        let data = parametric_derivatives(&f).unwrap();
        assert_eq!(data.dimension(), brute_force_parametric_count(&f, 10));
    }

    #[test]
    fn staircase_generators_are_minimal() {
        let f = form(
            "vars x,y; funcs u(x,y);\n\
             eq diff(u,x,x) - diff(u,x,y) = 0;\n\
             eq diff(u,y)^2 + diff(u,y) - u = 0;",
            2,
            1,
        );
        let s = leading_set(&f);
        let gens = &s.generators[0];
        for (i, a) in gens.iter().enumerate() {
            for (j, b) in gens.iter().enumerate() {
                if i != j {
                    assert!(!dominates(a, b));
                }
            }
        }
        assert_eq!(gens.len(), 3); // (0,2), (1,1), (2,0)
    }
}
