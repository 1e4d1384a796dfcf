//! Numerical integration of a parametric ODE system along curves in
//! independent-variable space: classical RK4 with constraint projection,
//! pivot monitoring, and commuting-flow diagnostics.

use crate::diffpoly::{Derivative, DiffPolynomial, RationalExpr};
use crate::error::{Error, Result};
use crate::ode_reduce::ParametricOdeSystem;
use crate::render::poly_to_text;

pub const DEFAULT_GUARD: f64 = 1e-8;
pub const DEFAULT_POINT_TOL: f64 = 1e-10;

/// Straight-line curve x(t) = start + t·direction, sampled at t = k·h.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub start: Vec<f64>,
    pub direction: Vec<f64>,
    pub h: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// max |h(x,v)| per sample
    pub drift: Vec<f64>,
    /// min |g(x,v)| per sample
    pub pivot_margin: Vec<f64>,
}

fn eval_poly(p: &DiffPolynomial, x: &[f64], v: &[f64]) -> Result<f64> {
    p.eval_f64(
        &|d: &Derivative| {
            if d.order() == 0 {
                v.get(d.dep).copied()
            } else {
                None
            }
        },
        x,
    )
}

fn eval_expr(e: &RationalExpr, x: &[f64], v: &[f64]) -> Result<f64> {
    let den = eval_poly(&e.den, x, v)?;
    if den.abs() <= 1e-12 {
        return Err(Error::DivZero);
    }
    Ok(eval_poly(&e.num, x, v)? / den)
}

fn max_drift(sys: &ParametricOdeSystem, x: &[f64], v: &[f64]) -> Result<f64> {
    let mut m = 0.0f64;
    for c in &sys.constraints {
        m = m.max(eval_poly(c, x, v)?.abs());
    }
    Ok(m)
}

fn min_pivot(sys: &ParametricOdeSystem, x: &[f64], v: &[f64]) -> Result<f64> {
    let mut m = f64::INFINITY;
    for g in &sys.inequations {
        m = m.min(eval_poly(g, x, v)?.abs());
    }
    Ok(m)
}

/// Check that a point satisfies the constraints (|h| ≤ tol) and stays away
/// from the pivots (|g| ≥ guard). Returns the list of violations.
pub fn check_consistent_point(
    sys: &ParametricOdeSystem,
    x0: &[f64],
    v0: &[f64],
    tol: f64,
    guard: f64,
) -> Result<Vec<String>> {
    let mut violations = Vec::new();
    for c in &sys.constraints {
        let val = eval_poly(c, x0, v0)?;
        if val.abs() > tol {
            violations.push(format!(
                "constraint {} = {:.3e} exceeds tolerance {:.1e}",
                poly_to_text(c, &sys.signature),
                val,
                tol
            ));
        }
    }
    for g in &sys.inequations {
        let val = eval_poly(g, x0, v0)?;
        if val.abs() < guard {
            violations.push(format!(
                "inequation |{}| = {:.3e} below guard {:.1e}",
                poly_to_text(g, &sys.signature),
                val,
                guard
            ));
        }
    }
    Ok(violations)
}

/// Combined vector field along the curve: F(t, v) = Σ_i d_i f_i(x(t), v),
/// guarding the pivots at every evaluation. A pivot is hit when its value
/// shrinks below the guard or changes sign relative to the starting point
/// (a continuous trajectory cannot cross the pivot locus).
fn field(
    sys: &ParametricOdeSystem,
    curve: &CurveSpec,
    t: f64,
    v: &[f64],
    guard: f64,
    ref_signs: &[f64],
) -> Result<Vec<f64>> {
    let x: Vec<f64> = curve
        .start
        .iter()
        .zip(&curve.direction)
        .map(|(s, d)| s + t * d)
        .collect();
    for (g, s) in sys.inequations.iter().zip(ref_signs) {
        let val = eval_poly(g, &x, v)?;
        if val.abs() < guard || !val.is_finite() || val.signum() != *s {
            return Err(Error::Pivot {
                inequation: poly_to_text(g, &sys.signature),
                value: val,
                guard,
                t,
            });
        }
    }
    let mut out = vec![0.0; sys.n_states()];
    for (i, di) in curve.direction.iter().enumerate() {
        if *di == 0.0 {
            continue;
        }
        for k in 0..sys.n_states() {
            out[k] += di * eval_expr(&sys.odes[i][k], &x, v)?;
        }
    }
    if out.iter().any(|z| !z.is_finite()) {
        return Err(Error::ProjectFail(f64::NAN));
    }
    Ok(out)
}

/// Gauss–Newton projection of v onto the constraint variety at fixed x:
/// solve J Jᵀ λ = h and update v ← v − Jᵀ λ until |h| < 1e-12 (max 5
/// iterations).
fn project(sys: &ParametricOdeSystem, x: &[f64], v: &mut [f64]) -> Result<()> {
    let m = sys.constraints.len();
    if m == 0 {
        return Ok(());
    }
    let n = v.len();
    // symbolic Jacobian entries ∂h_c/∂v_k
    let jac: Vec<Vec<DiffPolynomial>> = sys
        .constraints
        .iter()
        .map(|c| {
            (0..n)
                .map(|k| c.partial_wrt_derivative(&sys.state_derivative(k)))
                .collect()
        })
        .collect();
    for _ in 0..5 {
        let h: Vec<f64> = sys
            .constraints
            .iter()
            .map(|c| eval_poly(c, x, v))
            .collect::<Result<_>>()?;
        let hnorm = h.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if hnorm < 1e-12 {
            return Ok(());
        }
        let j: Vec<Vec<f64>> = jac
            .iter()
            .map(|row| row.iter().map(|p| eval_poly(p, x, v)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        // normal equations J Jᵀ λ = h
        let mut a = vec![vec![0.0f64; m]; m];
        for r in 0..m {
            for s in 0..m {
                a[r][s] = (0..n).map(|k| j[r][k] * j[s][k]).sum();
            }
        }
        let lambda = solve_spd(&mut a, &h).ok_or(Error::ProjectFail(hnorm))?;
        for k in 0..n {
            for r in 0..m {
                v[k] -= j[r][k] * lambda[r];
            }
        }
    }
    let hfinal = sys
        .constraints
        .iter()
        .map(|c| eval_poly(c, x, v))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .fold(0.0f64, |a, b| a.max(b.abs()));
    if hfinal > 1e-6 {
        return Err(Error::ProjectFail(hfinal));
    }
    Ok(())
}

/// Gaussian elimination with partial pivoting for the (small, symmetric
/// positive semidefinite) normal-equation system.
fn solve_spd(a: &mut [Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut x = b.to_vec();
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, a[i][k].abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        if mag < 1e-14 {
            return None;
        }
        a.swap(k, piv);
        x.swap(k, piv);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let xj = x[j];
            x[i] -= a[i][j] * xj;
        }
        x[i] /= a[i][i];
    }
    Some(x)
}

/// Classical fixed-step RK4 along the curve, with optional projection onto
/// the constraint variety after each step.
pub fn integrate_along_curve(
    sys: &ParametricOdeSystem,
    curve: &CurveSpec,
    v0: &[f64],
    do_project: bool,
    guard: f64,
) -> Result<Trajectory> {
    assert!(curve.h > 0.0 && curve.direction.iter().any(|d| *d != 0.0));
    let mut v = v0.to_vec();
    let mut t = 0.0;
    let x_at = |t: f64| -> Vec<f64> {
        curve
            .start
            .iter()
            .zip(&curve.direction)
            .map(|(s, d)| s + t * d)
            .collect()
    };
    let mut traj = Trajectory {
        samples: Vec::with_capacity(curve.steps + 1),
        drift: Vec::with_capacity(curve.steps + 1),
        pivot_margin: Vec::with_capacity(curve.steps + 1),
    };
    let record = |traj: &mut Trajectory, t: f64, v: &[f64]| -> Result<()> {
        let x = x_at(t);
        traj.drift.push(max_drift(sys, &x, v)?);
        traj.pivot_margin.push(min_pivot(sys, &x, v)?);
        traj.samples.push(Sample {
            t,
            x,
            v: v.to_vec(),
        });
        Ok(())
    };
    record(&mut traj, t, &v)?;
    let ref_signs: Vec<f64> = sys
        .inequations
        .iter()
        .map(|g| eval_poly(g, &x_at(0.0), v0).map(|x| x.signum()))
        .collect::<Result<_>>()?;
    let h = curve.h;
    for _ in 0..curve.steps {
        let k1 = field(sys, curve, t, &v, guard, &ref_signs)?;
        let v2: Vec<f64> = v.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
        let k2 = field(sys, curve, t + 0.5 * h, &v2, guard, &ref_signs)?;
        let v3: Vec<f64> = v.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
        let k3 = field(sys, curve, t + 0.5 * h, &v3, guard, &ref_signs)?;
        let v4: Vec<f64> = v.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = field(sys, curve, t + h, &v4, guard, &ref_signs)?;
        for i in 0..v.len() {
            v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
        if do_project {
            project(sys, &x_at(t), &mut v)?;
        }
        // guard the accepted point as well
        let _ = field(sys, curve, t, &v, guard, &ref_signs)?;
        record(&mut traj, t, &v)?;
    }
    Ok(traj)
}

/// One-step flow commutator defect: step h along x_i then x_j versus the
/// reverse order; returns the max-norm discrepancy. O(h³) for compatible
/// systems.
pub fn check_flow_commutativity(
    sys: &ParametricOdeSystem,
    x0: &[f64],
    v0: &[f64],
    h: f64,
    i: usize,
    j: usize,
    guard: f64,
) -> Result<f64> {
    let n = x0.len();
    let axis = |k: usize| -> Vec<f64> {
        let mut d = vec![0.0; n];
        d[k] = 1.0;
        d
    };
    let one_step = |start: &[f64], v: &[f64], dir: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let curve = CurveSpec {
            start: start.to_vec(),
            direction: axis(dir),
            h,
            steps: 1,
        };
        let traj = integrate_along_curve(sys, &curve, v, false, guard)?;
        let last = traj.samples.last().unwrap();
        Ok((last.x.clone(), last.v.clone()))
    };
    let (x_i, v_i) = one_step(x0, v0, i)?;
    let (_, v_ij) = one_step(&x_i, &v_i, j)?;
    let (x_j, v_j) = one_step(x0, v0, j)?;
    let (_, v_ji) = one_step(&x_j, &v_j, i)?;
    Ok(v_ij
        .iter()
        .zip(&v_ji)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::SystemSignature;
    use crate::elimination::{rif, DEFAULT_PROLONGATION_CAP};
    use crate::ode_reduce::reduce_to_parametric_ode;
    use crate::parse::parse_system;
    use crate::ranking::Ranking;

    fn example1_system() -> ParametricOdeSystem {
        let src = parse_system(
            "vars x,y; funcs u(x,y);\n\
             eq diff(u,x,x) - diff(u,x,y) = 0;\n\
             eq diff(u,y)^2 + diff(u,y) - u = 0;",
        )
        .unwrap();
        let f = rif(&src, &Ranking::grlex(2, 1), DEFAULT_PROLONGATION_CAP).unwrap();
        reduce_to_parametric_ode(&f).unwrap()
    }

    #[test]
    fn consistent_point_checks() {
        let sys = example1_system();
        // v = (u, u_x, u_y) = (2, 1, 1): 1·1−1²=0, 1+1−2=0, pivot 3
        let ok = check_consistent_point(&sys, &[0.0, 0.0], &[2.0, 1.0, 1.0], 1e-10, 1e-8)
            .unwrap();
        assert!(ok.is_empty(), "{ok:?}");
        let bad = check_consistent_point(&sys, &[0.0, 0.0], &[0.0, 1.0, 0.0], 1e-10, 1e-8)
            .unwrap();
        assert!(!bad.is_empty());
        let pivot_bad =
            check_consistent_point(&sys, &[0.0, 0.0], &[-0.25, 0.0, -0.5], 1e-10, 1e-8)
                .unwrap();
        assert!(pivot_bad.iter().any(|m| m.contains("inequation")));
    }

    /// Closed-form solution through v0=(2,1,1): u = f(x+y) with
    /// f'² + f' − f = 0, f(0)=2, f'(0)=1.
    fn reference_u(s: f64) -> f64 {
        // integrate f numerically at tiny step with RK4 on f' = g,
        // g' = g/(2g+1), as an independent high-accuracy oracle
        let mut f = 2.0;
        let mut g = 1.0;
        let h = s / 200_000.0;
        for _ in 0..200_000 {
            let k = |f: f64, g: f64| -> (f64, f64) {
                let _ = f;
                (g, g / (2.0 * g + 1.0))
            };
            let (k1f, k1g) = k(f, g);
            let (k2f, k2g) = k(f + 0.5 * h * k1f, g + 0.5 * h * k1g);
            let (k3f, k3g) = k(f + 0.5 * h * k2f, g + 0.5 * h * k2g);
            let (k4f, k4g) = k(f + h * k3f, g + h * k3g);
            f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
            g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        }
        f
    }

    #[test]
    fn drift_stays_small_with_projection() {
        let sys = example1_system();
        let curve = CurveSpec {
            start: vec![0.0, 0.0],
            direction: vec![1.0, 0.0],
            h: 0.01,
            steps: 100,
        };
        let traj = integrate_along_curve(&sys, &curve, &[2.0, 1.0, 1.0], true, 1e-8).unwrap();
        assert_eq!(traj.samples.len(), 101);
        assert!(traj.drift.iter().all(|d| *d < 1e-9), "max drift {:?}",
            traj.drift.iter().cloned().fold(0.0f64, f64::max));
    }

    #[test]
    fn rk4_converges_to_reference() {
        let sys = example1_system();
        let run = |h: f64, steps: usize| -> f64 {
            let curve = CurveSpec {
                start: vec![0.0, 0.0],
                direction: vec![1.0, 0.0],
                h,
                steps,
            };
            let traj =
                integrate_along_curve(&sys, &curve, &[2.0, 1.0, 1.0], false, 1e-8).unwrap();
            traj.samples.last().unwrap().v[0]
        };
        let exact = reference_u(1.0);
        let e1 = (run(0.1, 10) - exact).abs();
        let e2 = (run(0.05, 20) - exact).abs();
        let ratio = e1 / e2;
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}, errors {e1} {e2}");
    }

    #[test]
    fn pivot_error_before_nan() {
        let sys = example1_system();
        // u_y ∈ (−1/2, 0): the y-flow drives u_y toward −1/2
        let uy = -0.4;
        let u = uy * uy + uy;
        let v0 = [u, 0.0, uy];
        assert!(
            check_consistent_point(&sys, &[0.0, 0.0], &v0, 1e-10, 1e-8)
                .unwrap()
                .is_empty()
        );
        let curve = CurveSpec {
            start: vec![0.0, 0.0],
            direction: vec![0.0, 1.0],
            h: 0.05,
            steps: 100_000,
        };
        let err = integrate_along_curve(&sys, &curve, &v0, true, 1e-8).unwrap_err();
        match err {
            Error::Pivot { value, .. } => assert!(value.is_finite()),
            other => panic!("expected pivot error, got {other:?}"),
        }
    }

    #[test]
    fn flows_commute_for_example1() {
        // the constraint u_x·u_y = u_x² forces u_x = 0 or u_x = u_y, and on
        // both branches the x- and y-direction fields coincide pointwise, so
        // the numerical one-step maps agree to round-off
        let sys = example1_system();
        let x0 = [0.0, 0.0];
        let v0 = [2.0, 1.0, 1.0];
        let d1 = check_flow_commutativity(&sys, &x0, &v0, 0.1, 0, 1, 1e-8).unwrap();
        let d2 = check_flow_commutativity(&sys, &x0, &v0, 0.05, 0, 1, 1e-8).unwrap();
        assert!(d1 <= 1e-12 && d2 <= 1e-12, "{d1} {d2}");
    }

    #[test]
    fn flows_commute_for_determining_system() {
        // variable coefficients make the one-step discrepancy a genuine
        // O(h³) quantity: halving h should cut it by ≥ 6
        let src = parse_system(
            "vars x,y; funcs xi(x,y), eta(x,y);\n\
             eq 2*diff(eta,x,x,x) - y*diff(eta,y) + eta = 0;\n\
             eq y*diff(eta,x,y) + diff(eta,x) = 0;\n\
             eq y^2*diff(eta,y,y) + y*diff(eta,y) - eta = 0;\n\
             eq diff(xi,x) = 0;\n\
             eq diff(xi,y) = 0;",
        )
        .unwrap();
        let f = rif(&src, &Ranking::grlex(2, 2), DEFAULT_PROLONGATION_CAP).unwrap();
        let sys = reduce_to_parametric_ode(&f).unwrap();
        let x0 = [0.0, 2.0];
        let v0 = [1.0, 1.0, 1.0, 1.0, 1.0];
        let mut prev: Option<f64> = None;
        for h in [0.1, 0.05, 0.025] {
            let d = check_flow_commutativity(&sys, &x0, &v0, h, 0, 1, 1e-8).unwrap();
            if let Some(p) = prev {
                assert!(p / d >= 6.0, "ratio {} at h={h}", p / d);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn incompatible_toy_has_second_order_defect() {
        let signature = SystemSignature::new(vec!["x".into(), "y".into()], vec!["v".into()]);
        let one = RationalExpr::from_poly(DiffPolynomial::one());
        let x = RationalExpr::from_poly(DiffPolynomial::from_indep(0));
        let sys = ParametricOdeSystem {
            signature,
            sources: vec![Derivative::new(0, vec![0, 0])],
            odes: vec![vec![one], vec![x]],
            constraints: vec![],
            inequations: vec![],
        };
        let d1 = check_flow_commutativity(&sys, &[0.0, 0.0], &[1.0], 0.1, 0, 1, 1e-8).unwrap();
        let d2 = check_flow_commutativity(&sys, &[0.0, 0.0], &[1.0], 0.05, 0, 1, 1e-8).unwrap();
        let ratio = d1 / d2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
}
