//! Deterministic text and JSON rendering. Text forms re-parse to equal
//! values; JSON is the interchange format of the CLI (schema "pde2ode/1").

use num::BigInt;
use num::One;
use serde_json::{json, Value};

use crate::diffpoly::{Derivative, DiffMonomial, DiffPolynomial, Rational, RationalExpr, SystemSignature};
use crate::elimination::{RifForm, RifStatus};
use crate::initial_data::InitialData;
use crate::lie::StructureConstants;
use crate::ode_reduce::ParametricOdeSystem;
use crate::parse::SystemSource;
use crate::ranking::Ranking;
use crate::zero_dim::{MultiplicationSystem, RootSet};

pub const SCHEMA: &str = "pde2ode/1";

pub fn rational_to_text(r: &Rational) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn derivative_to_text(d: &Derivative, sig: &SystemSignature) -> String {
    if d.order() == 0 {
        return sig.dep_names[d.dep].clone();
    }
    let mut parts = vec![sig.dep_names[d.dep].clone()];
    for (i, &e) in d.idx.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(sig.indep_names[i].clone()),
            _ => parts.push(format!("{}${}", sig.indep_names[i], e)),
        }
    }
    format!("diff({})", parts.join(","))
}

fn monomial_to_text(m: &DiffMonomial, sig: &SystemSignature) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (d, &e) in &m.factors {
        let base = derivative_to_text(d, sig);
        parts.push(if e == 1 { base } else { format!("{base}^{e}") });
    }
    for (&i, &e) in &m.indep {
        let base = sig.indep_names[i].clone();
        parts.push(if e == 1 { base } else { format!("{base}^{e}") });
    }
    parts.join("*")
}

/// Canonical surface syntax; terms descending under the default term order.
pub fn poly_to_text(p: &DiffPolynomial, sig: &SystemSignature) -> String {
    use num::Signed;
    if p.is_zero() {
        return "0".into();
    }
    let ranking = Ranking::grlex(sig.n_indep(), sig.n_dep().max(1));
    let mut terms: Vec<(&DiffMonomial, &Rational)> = p.terms.iter().collect();
    terms.sort_by(|a, b| ranking.term_cmp(b.0, a.0));
    let mut out = String::new();
    for (k, (m, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = if neg { -(*c).clone() } else { (*c).clone() };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff_txt = rational_to_text(&abs);
        if m.is_one() {
            out.push_str(&coeff_txt);
        } else if abs == Rational::one() {
            out.push_str(&monomial_to_text(m, sig));
        } else {
            out.push_str(&coeff_txt);
            out.push('*');
            out.push_str(&monomial_to_text(m, sig));
        }
    }
    out
}

pub fn expr_to_text(e: &RationalExpr, sig: &SystemSignature) -> String {
    if e.den.is_constant() && e.den.as_constant() == Some(Rational::one()) {
        poly_to_text(&e.num, sig)
    } else {
        format!("({})/({})", poly_to_text(&e.num, sig), poly_to_text(&e.den, sig))
    }
}

/// Render a system source back to `.pde` statements (round-trips through
/// `parse_system`).
pub fn system_to_text(src: &SystemSource) -> String {
    let sig = &src.signature;
    let mut out = String::new();
    out.push_str(&format!("vars {};\n", sig.indep_names.join(",")));
    if sig.n_dep() > 0 {
        let funcs: Vec<String> = sig
            .dep_names
            .iter()
            .map(|d| format!("{}({})", d, sig.indep_names.join(",")))
            .collect();
        out.push_str(&format!("funcs {};\n", funcs.join(", ")));
    }
    for (k, v) in &src.options {
        out.push_str(&format!("option {k} {v};\n"));
    }
    for e in &src.equations {
        out.push_str(&format!("eq {} = 0;\n", poly_to_text(e, sig)));
    }
    for g in &src.inequations {
        out.push_str(&format!("ineq {};\n", poly_to_text(g, sig)));
    }
    out
}

pub fn rif_to_text(f: &RifForm) -> String {
    let sig = &f.signature;
    let mut out = String::new();
    for r in &f.rules {
        out.push_str(&format!(
            "rule {} = {}\n",
            derivative_to_text(&r.lead, sig),
            expr_to_text(&r.rhs, sig)
        ));
    }
    for c in &f.constraints {
        out.push_str(&format!("constraint {} = 0\n", poly_to_text(c, sig)));
    }
    for g in &f.inequations {
        out.push_str(&format!("inequation {} != 0\n", poly_to_text(g, sig)));
    }
    out.push_str(match f.status {
        RifStatus::Complete => "status complete\n",
        RifStatus::IterationCapped => "status iteration_capped\n",
    });
    out
}

pub fn initdata_to_text(data: &InitialData, sig: &SystemSignature) -> String {
    let point = data.point_symbols.join(",");
    let mut out = String::new();
    for (d, c) in data.parametric.iter().zip(&data.constants) {
        out.push_str(&format!("{}({}) = {}\n", d.subscript_name(sig), point, c));
    }
    out.push_str(&format!("dimension {}\n", data.dimension()));
    for c in &data.constraints_among_parametric {
        out.push_str(&format!("constraint {} = 0\n", poly_to_text(c, sig)));
    }
    out
}

pub fn ode_to_text(sys: &ParametricOdeSystem) -> String {
    let sig = &sys.signature;
    let mut out = String::new();
    for (i, var) in sig.indep_names.iter().enumerate() {
        out.push_str(&format!("system d/d{var}:\n"));
        for (k, name) in sys.state_names().iter().enumerate() {
            out.push_str(&format!(
                "  {name}' = {}\n",
                expr_to_text(&sys.odes[i][k], sig)
            ));
        }
    }
    for c in &sys.constraints {
        out.push_str(&format!("constraint {} = 0\n", poly_to_text(c, sig)));
    }
    for g in &sys.inequations {
        out.push_str(&format!("inequation {} != 0\n", poly_to_text(g, sig)));
    }
    out
}

// ---------------------------------------------------------------------------
// JSON

pub fn poly_to_json(p: &DiffPolynomial, sig: &SystemSignature) -> Value {
    let ranking = Ranking::grlex(sig.n_indep(), sig.n_dep().max(1));
    let mut terms: Vec<(&DiffMonomial, &Rational)> = p.terms.iter().collect();
    terms.sort_by(|a, b| ranking.term_cmp(b.0, a.0));
    let items: Vec<Value> = terms
        .into_iter()
        .map(|(m, c)| {
            let factors: Vec<Value> = m
                .factors
                .iter()
                .map(|(d, e)| {
                    json!({
                        "dep": sig.dep_names[d.dep],
                        "idx": d.idx,
                        "exp": e,
                    })
                })
                .collect();
            let indep: Vec<Value> = m
                .indep
                .iter()
                .map(|(i, e)| json!({"var": sig.indep_names[*i], "exp": e}))
                .collect();
            json!({"coeff": rational_to_text(c), "factors": factors, "indep": indep})
        })
        .collect();
    Value::Array(items)
}

pub fn expr_to_json(e: &RationalExpr, sig: &SystemSignature) -> Value {
    json!({"num": poly_to_json(&e.num, sig), "den": poly_to_json(&e.den, sig)})
}

pub fn rif_to_json(f: &RifForm) -> Value {
    let sig = &f.signature;
    json!({
        "schema": SCHEMA,
        "rules": f.rules.iter().map(|r| json!({
            "lead": {"dep": sig.dep_names[r.lead.dep], "idx": r.lead.idx},
            "rhs": expr_to_json(&r.rhs, sig),
            "pivot": r.pivot.as_ref().map(|p| poly_to_json(p, sig)),
        })).collect::<Vec<_>>(),
        "constraints": f.constraints.iter().map(|c| poly_to_json(c, sig)).collect::<Vec<_>>(),
        "inequations": f.inequations.iter().map(|g| poly_to_json(g, sig)).collect::<Vec<_>>(),
        "status": match f.status {
            RifStatus::Complete => "complete",
            RifStatus::IterationCapped => "iteration_capped",
        },
    })
}

pub fn initdata_to_json(data: &InitialData, sig: &SystemSignature) -> Value {
    json!({
        "schema": SCHEMA,
        "parametric": data.parametric.iter().map(|d| d.subscript_name(sig)).collect::<Vec<_>>(),
        "dimension": data.dimension(),
        "point_symbols": data.point_symbols,
        "constants": data.constants,
        "constraints_among_parametric": data.constraints_among_parametric
            .iter().map(|c| poly_to_json(c, sig)).collect::<Vec<_>>(),
    })
}

pub fn ode_to_json(sys: &ParametricOdeSystem) -> Value {
    let sig = &sys.signature;
    let mut odes = serde_json::Map::new();
    for (i, var) in sig.indep_names.iter().enumerate() {
        odes.insert(
            var.clone(),
            Value::Array(
                sys.odes[i]
                    .iter()
                    .map(|e| expr_to_json(e, sig))
                    .collect(),
            ),
        );
    }
    json!({
        "schema": SCHEMA,
        "states": sys.state_names(),
        "odes": Value::Object(odes),
        "constraints": sys.constraints.iter().map(|c| poly_to_json(c, sig)).collect::<Vec<_>>(),
        "inequations": sys.inequations.iter().map(|g| poly_to_json(g, sig)).collect::<Vec<_>>(),
    })
}

pub fn multiplication_to_json(ms: &MultiplicationSystem, sig: &SystemSignature) -> Value {
    json!({
        "schema": SCHEMA,
        "dimension": ms.dimension(),
        "basis": ms.basis.iter().map(|d| d.subscript_name(sig)).collect::<Vec<_>>(),
        "matrices": ms.matrices.iter().map(|x| {
            x.iter().map(|row| row.iter().map(rational_to_text).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
    })
}

pub fn lie_to_text(sc: &StructureConstants, order: Option<usize>) -> String {
    use crate::lie::{derived_algebra_abelian, derived_algebra_dimension, linearizability_verdict};
    let m = sc.dimension();
    let mut out = String::new();
    out.push_str(&format!(
        "basis: {}\n",
        sc.basis_names
            .iter()
            .enumerate()
            .map(|(k, n)| format!("X{} = {}", k + 1, n))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    for i in 0..m {
        for j in (i + 1)..m {
            let mut rhs = String::new();
            for (k, x) in sc.c[i][j].iter().enumerate() {
                if num::Zero::is_zero(x) {
                    continue;
                }
                use num::Signed;
                let mag = x.abs();
                let sign = if x.is_negative() { "-" } else { "+" };
                if rhs.is_empty() {
                    if x.is_negative() {
                        rhs.push('-');
                    }
                } else {
                    rhs.push_str(&format!(" {sign} "));
                }
                if mag == Rational::one() {
                    rhs.push_str(&format!("X{}", k + 1));
                } else {
                    rhs.push_str(&format!("{}*X{}", rational_to_text(&mag), k + 1));
                }
            }
            if !rhs.is_empty() {
                out.push_str(&format!("[X{}, X{}] = {rhs}\n", i + 1, j + 1));
            }
        }
    }
    out.push_str(&format!(
        "derived algebra: dimension {}, {}\n",
        derived_algebra_dimension(sc),
        if derived_algebra_abelian(sc) {
            "abelian"
        } else {
            "nonabelian"
        }
    ));
    if let Some(r) = order {
        out.push_str(&format!(
            "linearizable for order {r}: {}\n",
            linearizability_verdict(sc, r)
        ));
    }
    out
}

pub fn lie_to_json(sc: &StructureConstants, order: Option<usize>) -> Value {
    use crate::lie::{derived_algebra_abelian, derived_algebra_dimension, linearizability_verdict};
    let m = sc.dimension();
    let mut brackets = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            brackets.push(json!({
                "i": i + 1,
                "j": j + 1,
                "coeffs": sc.c[i][j].iter().map(rational_to_text).collect::<Vec<_>>(),
            }));
        }
    }
    json!({
        "schema": SCHEMA,
        "basis": sc.basis_names,
        "point": sc.point.iter().map(rational_to_text).collect::<Vec<_>>(),
        "brackets": brackets,
        "derived_dimension": derived_algebra_dimension(sc),
        "derived_abelian": derived_algebra_abelian(sc),
        "linearizable_for_order": order.map(|r| linearizability_verdict(sc, r)),
    })
}

pub fn roots_to_json(rs: &RootSet, dimension: usize) -> Value {
    json!({
        "schema": SCHEMA,
        "dimension": dimension,
        "roots": rs.roots.iter().map(|r| json!({
            "coords": r.coords.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
            "multiplicity": r.multiplicity,
            "residual": r.residual,
        })).collect::<Vec<_>>(),
    })
}
