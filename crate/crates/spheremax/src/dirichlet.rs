//! A 1D finite-difference Dirichlet problem driven through the abstract
//! sphere machinery.
//!
//! The discrete problem is A u = mu (u + phi) with A = (1/h^2) tridiag(-1,2,-1)
//! on n interior nodes of [0, 1]. With the energy inner product <u, v> =
//! h u^T A v and the L^2 pairing h u^T v, the substitution x = K^{1/2} u with
//! K = h A turns the constrained maximization of
//! Phi(u) = h (u^T u + 2 phi^T u) over {u : h u^T A u = r} into the crate's
//! standard problem for T = A^{-1} and z = -sqrt(h) A^{-1/2} phi, exactly at
//! the discrete level. The mu-side (tridiagonal solves, scalar root-finding
//! on psi) and the r-side (dense spectral machinery) are kept as two
//! independent computation routes and checked against each other.

use serde::Serialize;

use crate::boundary::diagnose_boundary;
use crate::curves::{audit_curve, geometric_grid, sample_curve, AuditReport};
use crate::eigen::{eigendecompose, Spectrum};
use crate::error::Error;
use crate::instance::Instance;
use crate::linalg::{Operator, SymmetricOperator, Vector};
use crate::spherical::maximize_on_sphere;
use crate::tol;

/// Symmetric tridiagonal matrix with constant storage, plus shifted solves.
#[derive(Debug, Clone)]
pub struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiag {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        let n = self.dim();
        assert_eq!(n, x.dim(), "tridiagonal apply dimension mismatch");
        Vector::from_fn(n, |i| {
            let mut sum = self.diag[i] * x[i];
            if i > 0 {
                sum += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                sum += self.off[i] * x[i + 1];
            }
            sum
        })
    }

    /// Thomas solve of (A - shift I) x = rhs. Stable without pivoting as long
    /// as the shifted matrix stays positive definite, which the callers
    /// guarantee by keeping the shift below the smallest eigenvalue.
    pub fn solve_shifted(&self, shift: f64, rhs: &Vector) -> Vector {
        let n = self.dim();
        assert_eq!(n, rhs.dim(), "tridiagonal solve dimension mismatch");
        let mut main: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut b = rhs.to_vec();
        for i in 1..n {
            let m = self.off[i - 1] / main[i - 1];
            main[i] -= m * self.off[i - 1];
            b[i] -= m * b[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = b[n - 1] / main[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (b[i] - self.off[i] * x[i + 1]) / main[i];
        }
        Vector::from_fn(n, |i| x[i])
    }

    fn to_dense(&self) -> SymmetricOperator {
        let n = self.dim();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            rows[i][i] = self.diag[i];
            if i + 1 < n {
                rows[i][i + 1] = self.off[i];
                rows[i + 1][i] = self.off[i];
            }
        }
        SymmetricOperator::from_rows(rows).expect("tridiagonal is symmetric")
    }
}

/// The discretized problem: grid, source term, stiffness matrix and its
/// spectral data.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    n: usize,
    h: f64,
    phi: Vector,
    stiffness: Tridiag,
    lambda1: f64,
    stiffness_spectrum: Spectrum,
}

impl DirichletProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing 1 / (n + 1).
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn phi(&self) -> &Vector {
        &self.phi
    }

    pub fn stiffness(&self) -> &Tridiag {
        &self.stiffness
    }

    /// Smallest stiffness eigenvalue, from the dense eigensolve.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn stiffness_spectrum(&self) -> &Spectrum {
        &self.stiffness_spectrum
    }

    /// Interior node coordinates (i + 1) h.
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.h
    }

    /// k-th discrete Dirichlet eigenfunction sin(k pi x) sampled at the
    /// interior nodes and normalized to unit Euclidean norm.
    pub fn discrete_eigenfunction(&self, k: usize) -> Vector {
        let v = Vector::from_fn(self.n, |i| {
            (k as f64 * std::f64::consts::PI * self.node(i)).sin()
        });
        v.scaled(1.0 / v.norm())
    }
}

/// Assembles the problem from a source function sampled at interior nodes.
pub fn build_problem(n: usize, phi_fn: impl Fn(f64) -> f64) -> Result<DirichletProblem, Error> {
    let h = 1.0 / (n as f64 + 1.0);
    let samples: Vec<f64> = (0..n).map(|i| phi_fn((i as f64 + 1.0) * h)).collect();
    build_problem_from_samples(n, samples)
}

/// Assembles the problem from explicit interior-node samples of the source.
pub fn build_problem_from_samples(
    n: usize,
    phi_samples: Vec<f64>,
) -> Result<DirichletProblem, Error> {
    if n < 3 {
        return Err(Error::DimensionTooSmall {
            got: n,
            required: 3,
        });
    }
    if phi_samples.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: phi_samples.len(),
        });
    }
    let phi = Vector::new(phi_samples)?;
    if phi.norm() == 0.0 {
        return Err(Error::ZeroPhi);
    }

    let h = 1.0 / (n as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let stiffness = Tridiag {
        diag: vec![2.0 * inv_h2; n],
        off: vec![-inv_h2; n - 1],
    };
    let stiffness_spectrum = eigendecompose(&stiffness.to_dense())?;
    let lambda1 = stiffness_spectrum.lambda_min();

    Ok(DirichletProblem {
        n,
        h,
        phi,
        stiffness,
        lambda1,
        stiffness_spectrum,
    })
}

/// Solution of A u = mu (u + phi) for one admissible mu.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletSolution {
    pub mu: f64,
    pub u: Vector,
    /// Discrete energy h u^T A u.
    pub psi: f64,
    /// ||A u - mu (u + phi)||.
    pub pde_residual: f64,
}

/// Tridiagonal solve of (A - mu I) u = mu phi for 0 < mu < lambda1.
pub fn solve_u_mu(problem: &DirichletProblem, mu: f64) -> Result<DirichletSolution, Error> {
    let lambda1 = problem.lambda1;
    if !(mu > 0.0) || mu > lambda1 * (1.0 - tol::MU_MARGIN_REL) {
        return Err(Error::MuOutOfRange {
            mu,
            min: 0.0,
            max: lambda1,
        });
    }
    let u = problem.stiffness.solve_shifted(mu, &problem.phi.scaled(mu));
    let au = problem.stiffness.apply(&u);
    let psi = problem.h * au.dot(&u);
    let pde_residual = au.sub(&u.add(&problem.phi).scaled(mu)).norm();
    Ok(DirichletSolution {
        mu,
        u,
        psi,
        pde_residual,
    })
}

/// psi(mu) = h u_mu^T A u_mu, the discrete energy of the solution.
pub fn psi_value(problem: &DirichletProblem, mu: f64) -> Result<f64, Error> {
    Ok(solve_u_mu(problem, mu)?.psi)
}

/// Inverts psi on ]0, lambda1[ by bracketing, bisection and Newton polish.
///
/// The admissible range ]0, delta[ comes from the boundary diagnosis of the
/// transformed instance, keeping a single source of truth for the threshold;
/// the root-finding itself stays entirely on the tridiagonal route.
pub fn invert_psi(problem: &DirichletProblem, r: f64) -> Result<f64, Error> {
    let delta = EnergyTransform::new(problem)?.delta();
    invert_psi_checked(problem, r, delta)
}

fn invert_psi_checked(problem: &DirichletProblem, r: f64, delta: f64) -> Result<f64, Error> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { r });
    }
    if r >= delta {
        return Err(Error::OutOfRange { r, theta: delta });
    }
    let lambda1 = problem.lambda1;
    let psi = |mu: f64| -> f64 {
        solve_u_mu(problem, mu)
            .expect("bracket stays inside ]0, lambda1[")
            .psi
    };

    // psi is strictly increasing: grow the upper end toward lambda1 until it
    // clears r, shrink the lower end toward 0 until it drops below. The upper
    // end stops at the solver margin; a radius that close to delta is
    // unreachable in floating point and reported as out of range.
    let hi_cap = lambda1 * (1.0 - 10.0 * tol::MU_MARGIN_REL);
    let mut hi = 0.75 * lambda1;
    while psi(hi) <= r {
        if hi >= hi_cap {
            return Err(Error::OutOfRange { r, theta: delta });
        }
        hi = (lambda1 - 0.25 * (lambda1 - hi)).min(hi_cap);
    }
    let mut lo = 0.5 * lambda1;
    while psi(lo) >= r {
        lo *= 0.25;
        assert!(lo > 1e-280, "psi bracket collapsed at the lower end");
    }

    while hi - lo > tol::SECULAR_BISECT_REL * lambda1 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut mu = 0.5 * (lo + hi);
    let mut best = (mu, (psi(mu) - r).abs());
    for _ in 0..8 {
        if best.1 <= tol::SECULAR_TARGET_REL * r {
            break;
        }
        let solution = solve_u_mu(problem, mu)?;
        // d(psi)/d(mu) = 2 h (u')^T A u with u' = (A - mu I)^{-1} (phi + u).
        let u_prime = problem
            .stiffness
            .solve_shifted(mu, &problem.phi.add(&solution.u));
        let derivative = 2.0 * problem.h * problem.stiffness.apply(&solution.u).dot(&u_prime);
        if derivative <= 0.0 || !derivative.is_finite() {
            break;
        }
        let mut next = mu - (solution.psi - r) / derivative;
        if !(lo..=hi).contains(&next) {
            next = 0.5 * (lo + hi);
        }
        mu = next;
        let err = (psi(mu) - r).abs();
        if err < best.1 {
            best = (mu, err);
        }
    }
    Ok(best.0)
}

/// The change of variables x = K^{1/2} u with K = h A, together with the
/// abstract instance (T, z) = (A^{-1}, -sqrt(h) A^{-1/2} phi) it produces.
#[derive(Debug, Clone)]
pub struct EnergyTransform {
    sqrt_k: SymmetricOperator,
    inv_sqrt_k: SymmetricOperator,
    instance: Instance,
}

impl EnergyTransform {
    pub fn new(problem: &DirichletProblem) -> Result<Self, Error> {
        let n = problem.n;
        let h = problem.h;
        let spectrum = &problem.stiffness_spectrum;
        let eigenvalues = spectrum.eigenvalues().to_vec();

        let q: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (i, k) = (idx / n, idx % n);
                spectrum.eigenvector(k)[i]
            })
            .collect();

        let inverse: Vec<f64> = eigenvalues.iter().map(|&l| 1.0 / l).collect();
        let sqrt_scaled: Vec<f64> = eigenvalues.iter().map(|&l| (h * l).sqrt()).collect();
        let inv_sqrt_scaled: Vec<f64> = eigenvalues.iter().map(|&l| 1.0 / (h * l).sqrt()).collect();

        let abstract_t = SymmetricOperator::from_conjugation(n, &q, &inverse);
        let sqrt_k = SymmetricOperator::from_conjugation(n, &q, &sqrt_scaled);
        let inv_sqrt_k = SymmetricOperator::from_conjugation(n, &q, &inv_sqrt_scaled);

        let phi_spectral = spectrum.to_spectral(&problem.phi);
        let scaled = Vector::from_fn(n, |k| -h.sqrt() * phi_spectral[k] / eigenvalues[k].sqrt());
        let abstract_z = spectrum.from_spectral(&scaled);

        let instance = Instance::new(abstract_t, abstract_z)?;
        Ok(Self {
            sqrt_k,
            inv_sqrt_k,
            instance,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// x = K^{1/2} u.
    pub fn to_abstract(&self, u: &Vector) -> Vector {
        self.sqrt_k.apply(u)
    }

    /// u = K^{-1/2} x.
    pub fn to_grid(&self, x: &Vector) -> Vector {
        self.inv_sqrt_k.apply(x)
    }

    /// Threshold of the transformed instance; the energy curve cannot reach
    /// past it.
    pub fn delta(&self) -> f64 {
        diagnose_boundary(&self.instance).theta
    }
}

/// One grid radius of the Dirichlet curve report.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletPoint {
    pub r: f64,
    /// Value curve of the transformed problem.
    pub eta: f64,
    /// Its derivative (the abstract multiplier).
    pub eta_prime: f64,
    /// Inverse of psi at r, computed on the tridiagonal route.
    pub mu: f64,
    /// ||A w - (1 / eta') (w + phi)||: the discrete equation satisfied by the
    /// mapped-back maximizer.
    pub c5_residual: f64,
    /// ||w_r - u_{psi^{-1}(r)}||: agreement of the two routes.
    pub w_vs_u: f64,
    /// |eta'(r) * psi^{-1}(r) - 1|.
    pub duality_gap: f64,
}

/// Full audit of the energy curve: the abstract predicates plus the per-point
/// PDE-side identities.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletCurveReport {
    pub lambda1: f64,
    #[serde(serialize_with = "crate::serde_util::serialize_maybe_infinite")]
    pub delta: f64,
    pub audit: AuditReport,
    pub points: Vec<DirichletPoint>,
    pub max_w_vs_u: f64,
    pub max_duality_gap: f64,
    pub max_c5_residual: f64,
}

/// Samples the energy curve eta on a geometric radius grid inside ]0, delta[
/// and cross-checks the two computation routes at every node.
pub fn eta_curve(
    problem: &DirichletProblem,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> Result<DirichletCurveReport, Error> {
    if steps < 3 {
        return Err(Error::TooFewSamples {
            got: steps,
            required: 3,
        });
    }
    if !(r_min > 0.0) {
        return Err(Error::NonPositiveRadius { r: r_min });
    }
    let transform = EnergyTransform::new(problem)?;
    let delta = transform.delta();
    if !(r_min < r_max) || r_max >= delta {
        return Err(Error::OutOfRange {
            r: r_max,
            theta: delta,
        });
    }

    let abstract_samples = sample_curve(transform.instance(), r_min, r_max, steps)?;
    let audit = audit_curve(&abstract_samples)?;

    let mut points = Vec::with_capacity(steps);
    for &r in &geometric_grid(r_min, r_max, steps) {
        let solution = maximize_on_sphere(transform.instance(), r)?;
        let w = transform.to_grid(&solution.x_hat);

        let mu = invert_psi_checked(problem, r, delta)?;
        let u = solve_u_mu(problem, mu)?.u;

        let eta_prime = solution.multiplier;
        let c5_residual = problem
            .stiffness
            .apply(&w)
            .sub(&w.add(&problem.phi).scaled(1.0 / eta_prime))
            .norm();

        points.push(DirichletPoint {
            r,
            eta: solution.gamma,
            eta_prime,
            mu,
            c5_residual,
            w_vs_u: w.sub(&u).norm(),
            duality_gap: (eta_prime * mu - 1.0).abs(),
        });
    }

    let max_w_vs_u = points.iter().map(|p| p.w_vs_u).fold(0.0, f64::max);
    let max_duality_gap = points.iter().map(|p| p.duality_gap).fold(0.0, f64::max);
    let max_c5_residual = points.iter().map(|p| p.c5_residual).fold(0.0, f64::max);

    Ok(DirichletCurveReport {
        lambda1: problem.lambda1,
        delta,
        audit,
        points,
        max_w_vs_u,
        max_duality_gap,
        max_c5_residual,
    })
}

/// Closed-form smallest eigenvalue of (1/h^2) tridiag(-1, 2, -1).
pub fn lambda1_closed_form(n: usize) -> f64 {
    let h = 1.0 / (n as f64 + 1.0);
    2.0 / (h * h) * (1.0 - (std::f64::consts::PI * h).cos())
}
