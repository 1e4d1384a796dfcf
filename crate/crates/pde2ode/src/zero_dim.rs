//! Zero-dimensional polynomial systems: the map x_j ↔ ∂/∂x_j into a
//! constant-coefficient PDE system, commuting multiplication matrices from
//! the parametric ODE form, and numerical root finding by eigenvalue
//! methods.

use num::complex::Complex64 as C64;
use num::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffpoly::{Derivative, DiffPolynomial, Rational, SystemSignature};
use crate::eigen;
use crate::error::{Error, Result};
use crate::ode_reduce::ParametricOdeSystem;
use crate::parse::SystemSource;

/// Commuting multiplication matrices on the parametric-derivative basis.
/// Column k of `matrices[i]` encodes D_i(basis_k) in the basis, so the
/// matrices represent multiplication by x_i on the quotient ring.
#[derive(Debug, Clone)]
pub struct MultiplicationSystem {
    pub basis: Vec<Derivative>,
    pub matrices: Vec<Vec<Vec<Rational>>>,
}

impl MultiplicationSystem {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self, i: usize) -> Rational {
        let mut t = Rational::from_integer(0.into());
        for k in 0..self.dimension() {
            t += &self.matrices[i][k][k];
        }
        t
    }
}

/// A numerically recovered root cluster.
#[derive(Debug, Clone)]
pub struct Root {
    pub coords: Vec<C64>,
    pub multiplicity: usize,
    /// max |p_k(coords)| over the input polynomials
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// Map polynomials in the independent variables to a constant-coefficient
/// PDE system: x^α ↦ D^α u, constants ↦ (constant)·u.
pub fn poly_to_diff(src: &SystemSource) -> Result<SystemSource> {
    if src.signature.n_dep() != 0 {
        return Err(Error::Invalid(
            "polynomial input must not declare funcs".into(),
        ));
    }
    let n = src.signature.n_indep();
    let signature = SystemSignature::new(src.signature.indep_names.clone(), vec!["u".into()]);
    let map_poly = |p: &DiffPolynomial| -> Result<DiffPolynomial> {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &p.terms {
            if !m.factors.is_empty() {
                return Err(Error::Invalid("input is not a pure polynomial".into()));
            }
            let mut idx = vec![0u32; n];
            for (i, e) in &m.indep {
                idx[*i] = *e;
            }
            out = out.add(&DiffPolynomial::from_monomial(
                crate::diffpoly::DiffMonomial::from_derivative(Derivative::new(0, idx)),
                c.clone(),
            ));
        }
        Ok(out)
    };
    let mut equations = Vec::with_capacity(src.equations.len());
    for p in &src.equations {
        equations.push(map_poly(p)?);
    }
    Ok(SystemSource {
        signature,
        equations,
        inequations: Vec::new(),
        options: src.options.clone(),
    })
}

/// Extract the multiplication matrices from a linear constant-coefficient
/// parametric ODE system and verify pairwise commutation exactly.
pub fn build_multiplication_matrices(
    sys: &ParametricOdeSystem,
) -> Result<MultiplicationSystem> {
    let m = sys.n_states();
    let n = sys.signature.n_indep();
    if !sys.constraints.is_empty() {
        return Err(Error::NotLinear(
            "(system)".into(),
            "constraints present".into(),
        ));
    }
    let zero = Rational::from_integer(0.into());
    let mut matrices = vec![vec![vec![zero.clone(); m]; m]; n];
    for i in 0..n {
        for k in 0..m {
            let f = &sys.odes[i][k];
            let state = || sys.state_names()[k].clone();
            let dir = || sys.signature.indep_names[i].clone();
            let den = f
                .den
                .as_constant()
                .ok_or_else(|| Error::NotLinear(state(), dir()))?;
            for (mono, c) in &f.num.terms {
                if !mono.indep.is_empty() || mono.deriv_degree() != 1 {
                    return Err(Error::NotLinear(state(), dir()));
                }
                let (d, _) = mono.factors.iter().next().unwrap();
                // column k encodes the image of basis_k
                matrices[i][d.dep][k] = c / &den;
            }
        }
    }
    // exact commutation check
    for i in 0..n {
        for j in (i + 1)..n {
            for r in 0..m {
                for s in 0..m {
                    let mut xy = zero.clone();
                    let mut yx = zero.clone();
                    for t in 0..m {
                        xy += &matrices[i][r][t] * &matrices[j][t][s];
                        yx += &matrices[j][r][t] * &matrices[i][t][s];
                    }
                    if xy != yx {
                        return Err(Error::NotCommuting(i, j));
                    }
                }
            }
        }
    }
    Ok(MultiplicationSystem {
        basis: sys.sources.clone(),
        matrices,
    })
}

fn to_f64_matrix(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|row| row.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn eval_poly_complex(p: &DiffPolynomial, point: &[C64]) -> f64 {
    let mut sum = C64::new(0.0, 0.0);
    for (m, c) in &p.terms {
        let mut v = C64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
        for (i, e) in &m.indep {
            v *= point[*i].powu(*e);
        }
        sum += v;
    }
    sum.norm()
}

/// Solve the zero-dimensional system represented by `ms`: eigen-decompose a
/// random combination of the multiplication operators and read off the root
/// coordinates as Rayleigh quotients. `polys` are the original polynomials
/// (pure, in the independent variables) used for residual reporting.
pub fn solve_zero_dim(
    ms: &MultiplicationSystem,
    polys: &[DiffPolynomial],
    tol: f64,
    seed: u64,
) -> Result<RootSet> {
    let m = ms.dimension();
    let n = ms.matrices.len();
    if m == 0 {
        return Ok(RootSet { roots: Vec::new() });
    }
    // act on evaluation functionals: the transposes share the eigenvectors
    // b(ζ) = (basis_k(ζ))_k with eigenvalue ζ_i
    let at: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            let x = to_f64_matrix(&ms.matrices[i]);
            (0..m)
                .map(|r| (0..m).map(|s| x[s][r]).collect())
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = Error::EigenFail;
    for _attempt in 0..2 {
        let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut combo = vec![vec![0.0f64; m]; m];
        for i in 0..n {
            for r in 0..m {
                for s in 0..m {
                    combo[r][s] += coeffs[i] * at[i][r][s];
                }
            }
        }
        let eigs = match eigen::eigenvalues(&combo) {
            Ok(e) => e,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let mut points: Vec<Vec<C64>> = Vec::with_capacity(m);
        for lam in eigs {
            let w = eigen::eigenvector(&combo, lam, &mut rng);
            let mut coords = Vec::with_capacity(n);
            let wn: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            for i in 0..n {
                // Rayleigh quotient (w* A_i w)/(w* w)
                let mut s = C64::new(0.0, 0.0);
                for r in 0..m {
                    let mut row = C64::new(0.0, 0.0);
                    for t in 0..m {
                        row += C64::new(at[i][r][t], 0.0) * w[t];
                    }
                    s += w[r].conj() * row;
                }
                coords.push(s / C64::new(wn, 0.0));
            }
            points.push(coords);
        }
        // cluster coordinates agreeing within 10·tol
        let cluster_tol = 10.0 * tol;
        let mut roots: Vec<Root> = Vec::new();
        'points: for p in points {
            for r in roots.iter_mut() {
                if r.coords
                    .iter()
                    .zip(p.iter())
                    .all(|(a, b)| (a - b).norm() < cluster_tol)
                {
                    r.multiplicity += 1;
                    continue 'points;
                }
            }
            let residual = polys
                .iter()
                .map(|q| eval_poly_complex(q, &p))
                .fold(0.0, f64::max);
            roots.push(Root {
                coords: p,
                multiplicity: 1,
                residual,
            });
        }
        roots.sort_by(|a, b| {
            let na: f64 = a.coords.iter().map(|z| z.norm()).sum();
            let nb: f64 = b.coords.iter().map(|z| z.norm()).sum();
            na.total_cmp(&nb)
        });
        return Ok(RootSet { roots });
    }
    Err(last_err)
}
