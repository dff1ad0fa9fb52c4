//! Numerical search for central configurations.
//!
//! [`find_cc`] runs Levenberg-Marquardt on the stacked system
//! `F_i - lambda grad I_i = 0` together with the soft constraints
//! `q_i.q_i = sign`, over the 4N + 1 unknowns `(q, lambda)`. The forces are
//! evaluated at the radial retraction of each `q_i`, so iterates may drift off
//! the manifold without the force formulas breaking down. The two-parameter
//! symmetry group makes the Jacobian rank deficient; the damping term takes
//! care of that without gauge constraints.
//!
//! [`special_curve`] traces the zero set of the closed-form multiplier of the
//! triangle family.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::catalog::{family_q, lambda_single, FamilyParams};
use crate::ccstat::fit_lambda;
use crate::ccstat::{
    analyze, common_phi, fit_lambda_from, normalize_to_h2xyw_with, residuals_from, CCReport,
    Tolerances,
};
use crate::dynamics::{forces_raw, grad_u, moment_gradient_raw, Configuration};
use crate::error::{Error, Result};
use crate::manifold::{
    geodesic_distance, retract, sdot, AmbientVector, GroupElement, Sign, RHO_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Relative step size below which the iteration is considered stalled.
    pub step_tol: f64,
    /// Convergence threshold on the max per-body CC residual.
    pub residual_tol: f64,
    /// Starting multiplier; `None` fits it to the initial configuration.
    pub lambda_init: Option<f64>,
    /// Hold lambda at this value instead of solving for it (`Some(0.0)`
    /// searches for special configurations).
    pub fixed_lambda: Option<f64>,
    /// Initial damping, relative to the largest diagonal entry of `J^T J`.
    pub damping_init: f64,
    pub seed: u64,
    /// Central-difference step for the Jacobian.
    pub fd_step: f64,
    /// Random initial configurations keep all pairs at least this far apart.
    pub min_separation: f64,
    pub tolerances: Tolerances,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 300,
            step_tol: 1e-15,
            residual_tol: 1e-10,
            lambda_init: None,
            fixed_lambda: None,
            damping_init: 1e-3,
            seed: 0,
            fd_step: 1e-7,
            min_separation: 0.1,
            tolerances: Tolerances::default(),
        }
    }
}

impl SolveOptions {
    pub fn with_seed(seed: u64) -> Self {
        SolveOptions {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0
            || !(self.step_tol > 0.0)
            || !(self.residual_tol > 0.0)
            || !(self.fd_step > 0.0)
            || !(self.damping_init > 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "bad solve options: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Starting point for [`find_cc`].
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Draw positions from the seeded RNG.
    Random,
    /// Ambient positions, retracted onto the manifold before the first step.
    Positions(Vec<AmbientVector>),
}

impl From<&Configuration> for Init {
    fn from(c: &Configuration) -> Self {
        Init::Positions(c.positions().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub converged: bool,
    pub config: Configuration,
    pub report: CCReport,
    pub iterations: usize,
    pub fingerprint: Vec<f64>,
}

/// Positions drawn uniformly on S^3, or with Gaussian `(x, y, z)` lifted to
/// H^3; redrawn until every pair is `min_separation` away from the singular
/// set.
pub fn random_positions(
    sign: Sign,
    n: usize,
    min_separation: f64,
    rng: &mut impl Rng,
) -> Vec<AmbientVector> {
    loop {
        let q: Vec<AmbientVector> = (0..n)
            .map(|_| {
                let mut g = || rng.sample::<f64, _>(StandardNormal);
                match sign {
                    Sign::Spherical => {
                        let v = AmbientVector::new(g(), g(), g(), g());
                        v * (1.0 / v.euclid_norm())
                    }
                    Sign::Hyperbolic => {
                        let (x, y, z) = (g(), g(), g());
                        AmbientVector::new(x, y, z, (1.0 + x * x + y * y + z * z).sqrt())
                    }
                }
            })
            .collect();
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| match geodesic_distance(q[i], q[j], sign) {
                Ok(d) => {
                    d >= min_separation && (sign == Sign::Hyperbolic || d <= PI - min_separation)
                }
                Err(_) => false,
            })
        });
        if ok {
            return q;
        }
    }
}

/// Typical pair-force magnitude, `mean_{i<j} m_i m_j / sn^2(d_ij)`.
///
/// Residual rows are divided by it so that spreading the bodies apart on H^3,
/// where every force decays, does not pass for convergence.
fn force_scale(sign: Sign, masses: &[f64], q: &[AmbientVector]) -> Option<f64> {
    let n = masses.len();
    let mut acc = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let (_, sn) = crate::dynamics::pair_trig(q[i], q[j], sign).ok()?;
            acc += masses[i] * masses[j] / (sn * sn);
            pairs += 1;
        }
    }
    (pairs > 0).then(|| acc / pairs as f64)
}

/// The CC system over the raw parameter vector `[q_1 .. q_N, lambda]`
/// (`lambda` omitted when it is held fixed).
struct CcSystem<'a> {
    sign: Sign,
    masses: &'a [f64],
    fixed_lambda: Option<f64>,
}

enum EvalFailure {
    Singular(Error),
    OffSheet,
}

impl CcSystem<'_> {
    fn n(&self) -> usize {
        self.masses.len()
    }

    fn dim(&self) -> usize {
        4 * self.n() + usize::from(self.fixed_lambda.is_none())
    }

    fn unpack(&self, p: &DVector<f64>) -> (Vec<AmbientVector>, f64) {
        let q = (0..self.n())
            .map(|i| AmbientVector::new(p[4 * i], p[4 * i + 1], p[4 * i + 2], p[4 * i + 3]))
            .collect();
        (q, self.fixed_lambda.unwrap_or_else(|| p[4 * self.n()]))
    }

    fn retracted(
        &self,
        q: &[AmbientVector],
    ) -> std::result::Result<Vec<AmbientVector>, EvalFailure> {
        q.iter()
            .map(|&qi| retract(qi, self.sign).ok_or(EvalFailure::OffSheet))
            .collect()
    }

    fn residual(&self, p: &DVector<f64>) -> std::result::Result<DVector<f64>, EvalFailure> {
        let n = self.n();
        let (q, lambda) = self.unpack(p);
        let on = self.retracted(&q)?;
        let forces = forces_raw(self.sign, self.masses, &on).map_err(EvalFailure::Singular)?;
        let scale = force_scale(self.sign, self.masses, &on)
            .ok_or(EvalFailure::Singular(Error::SingularPair(None)))?;
        let mut r = DVector::zeros(5 * n);
        for i in 0..n {
            let g = moment_gradient_raw(self.sign, self.masses[i], on[i]);
            let e = (forces[i] - g * lambda) * (1.0 / scale);
            for k in 0..4 {
                r[4 * i + k] = e[k];
            }
            r[4 * n + i] = sdot(q[i], q[i], self.sign) - self.sign.value();
        }
        Ok(r)
    }

    fn jacobian(&self, p: &DVector<f64>, h: f64) -> std::result::Result<DMatrix<f64>, EvalFailure> {
        let mut jac = DMatrix::zeros(5 * self.n(), p.len());
        let mut work = p.clone();
        for k in 0..p.len() {
            let step = h * (1.0 + p[k].abs());
            work[k] = p[k] + step;
            let plus = self.residual(&work)?;
            work[k] = p[k] - step;
            let minus = self.residual(&work)?;
            work[k] = p[k];
            jac.set_column(k, &((plus - minus) / (2.0 * step)));
        }
        Ok(jac)
    }

    fn lambda_for(&self, forces: &[AmbientVector], grads: &[AmbientVector]) -> f64 {
        self.fixed_lambda
            .unwrap_or_else(|| fit_lambda_from(forces, grads).lambda)
    }

    /// Residual of the retracted positions with lambda refitted (or fixed),
    /// relative to the typical pair force.
    fn quality(&self, p: &DVector<f64>) -> Option<f64> {
        let (q, _) = self.unpack(p);
        let on = self.retracted(&q).ok()?;
        let forces = forces_raw(self.sign, self.masses, &on).ok()?;
        let grads: Vec<_> = self
            .masses
            .iter()
            .zip(&on)
            .map(|(&m, &qi)| moment_gradient_raw(self.sign, m, qi))
            .collect();
        let lambda = self.lambda_for(&forces, &grads);
        let absolute = residuals_from(&forces, &grads, lambda)
            .into_iter()
            .fold(0.0, f64::max);
        Some(absolute / force_scale(self.sign, self.masses, &on)?)
    }

    /// Retract exactly, refit lambda and measure. `None` if the retracted
    /// positions do not form a valid configuration.
    fn finish(&self, p: &DVector<f64>, tol: &Tolerances) -> Option<(Configuration, CCReport)> {
        let (q, _) = self.unpack(p);
        let on = self.retracted(&q).ok()?;
        let config = Configuration::new(self.sign, self.masses.to_vec(), on).ok()?;
        let report = analyze(&config, self.fixed_lambda, tol).ok()?;
        Some((config, report))
    }
}

/// Consecutive failed evaluations (singular or off-sheet trial points)
/// tolerated before giving up.
const MAX_SINGULAR_RETRIES: usize = 3;

/// Iterations stop early once the scaled residual reaches round-off.
const POLISH_TOL: f64 = 1e-14;

/// Damped least-squares search for a central configuration.
///
/// Returns `converged = false` with the best iterate when the residual does
/// not drop below `opts.residual_tol`. Converged outcomes satisfy the
/// threshold both absolutely and relative to the typical pair force.
pub fn find_cc(
    sign: Sign,
    masses: &[f64],
    init: Init,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    opts.validate()?;
    let n = masses.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two bodies".into()));
    }
    if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidArgument("masses must be positive".into()));
    }
    let start = match init {
        Init::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            random_positions(sign, n, opts.min_separation, &mut rng)
        }
        Init::Positions(q) => {
            if q.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} initial positions for {n} masses",
                    q.len()
                )));
            }
            q.iter()
                .map(|&qi| {
                    retract(qi, sign).ok_or_else(|| {
                        Error::InvalidArgument("initial position cannot be retracted".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let init_config = Configuration::new(sign, masses.to_vec(), start)?;

    let sys = CcSystem {
        sign,
        masses,
        fixed_lambda: opts.fixed_lambda,
    };
    let mut p = DVector::zeros(sys.dim());
    for (i, q) in init_config.positions().iter().enumerate() {
        for k in 0..4 {
            p[4 * i + k] = q[k];
        }
    }
    if opts.fixed_lambda.is_none() {
        p[4 * n] = match opts.lambda_init {
            Some(l) => l,
            None => fit_lambda(&init_config)?.lambda,
        };
    }

    let as_singular = |f: EvalFailure| match f {
        EvalFailure::Singular(e) => e,
        EvalFailure::OffSheet => Error::SingularPair(None),
    };
    let mut r = sys.residual(&p).map_err(as_singular)?;
    let mut cost = 0.5 * r.norm_squared();
    let mut best = (sys.quality(&p).unwrap_or(f64::INFINITY), p.clone());
    let mut mu: Option<f64> = None;
    let mut nu = 2.0;
    let mut iterations = 0;

    while iterations < opts.max_iter && best.0 > POLISH_TOL {
        iterations += 1;
        let jac = sys.jacobian(&p, opts.fd_step).map_err(as_singular)?;
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * &r;
        let mut mu_k = *mu.get_or_insert_with(|| {
            opts.damping_init * a.diagonal().iter().copied().fold(0.0, f64::max).max(1e-12)
        });
        let mut failures = 0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut damped = a.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += mu_k;
            }
            let Some(chol) = damped.cholesky() else {
                mu_k *= 10.0;
                continue;
            };
            let delta = -chol.solve(&g);
            if delta.norm() < opts.step_tol * (p.norm() + opts.step_tol) {
                break;
            }
            let trial = &p + &delta;
            match sys.residual(&trial) {
                Err(f) => {
                    failures += 1;
                    if failures > MAX_SINGULAR_RETRIES {
                        return Err(as_singular(f));
                    }
                    mu_k *= 10.0;
                }
                Ok(r_new) => {
                    failures = 0;
                    let cost_new = 0.5 * r_new.norm_squared();
                    let predicted = 0.5 * delta.dot(&(delta.scale(mu_k) - &g));
                    let rho = (cost - cost_new) / predicted;
                    if rho > 0.0 && cost_new.is_finite() {
                        p = trial;
                        r = r_new;
                        cost = cost_new;
                        mu_k *= f64::max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0).powi(3));
                        nu = 2.0;
                        accepted = true;
                        break;
                    }
                    mu_k *= nu;
                    nu *= 2.0;
                }
            }
        }
        mu = Some(mu_k);
        if accepted {
            if let Some(q) = sys.quality(&p) {
                if q < best.0 {
                    best = (q, p.clone());
                }
            }
        } else {
            break;
        }
    }

    let (config, report) = sys
        .finish(&best.1, &opts.tolerances)
        .or_else(|| sys.finish(&p, &opts.tolerances))
        .ok_or(Error::SingularPair(None))?;
    let converged = report.residual_inf < opts.residual_tol && best.0 < opts.residual_tol;
    let fingerprint = config.fingerprint()?;
    Ok(SolveOutcome {
        converged,
        config,
        report,
        iterations,
        fingerprint,
    })
}

/// Representative of the configuration's equivalence class: on H^3 boost
/// onto `z = 0` when the bodies share a phase, then rotate in xy so the body
/// farthest from the zw plane sits on the positive x axis.
pub fn canonical_gauge(config: &Configuration) -> Result<Configuration> {
    canonical_gauge_with(config, Tolerances::default().coplanar_tol)
}

pub fn canonical_gauge_with(config: &Configuration, coplanar_tol: f64) -> Result<Configuration> {
    let mut out = config.clone();
    if config.sign() == Sign::Hyperbolic && common_phi(config, coplanar_tol).is_some() {
        out = normalize_to_h2xyw_with(config, coplanar_tol)?.0;
    }
    let (k, r2) = out
        .positions()
        .iter()
        .map(|q| q.r2())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    if r2.sqrt() < RHO_TOL {
        return Err(Error::GaugeDegenerate);
    }
    let q = out.positions()[k];
    let angle = q.y.atan2(q.x);
    if angle != 0.0 {
        out = out.transformed(GroupElement::new(-angle, 0.0, config.sign()));
    }
    Ok(out)
}

/// Fingerprints equal to within `tol` in every sorted distance.
pub fn fingerprints_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Default fingerprint comparison tolerance.
pub const FINGERPRINT_TOL: f64 = 1e-6;

/// `trials` independent random-start solves; trial `k` uses seed `opts.seed + k`.
pub fn solve_batch(
    sign: Sign,
    masses: &[f64],
    trials: usize,
    opts: &SolveOptions,
) -> Vec<Result<SolveOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let o = SolveOptions {
                seed: opts.seed.wrapping_add(k as u64),
                ..opts.clone()
            };
            find_cc(sign, masses, Init::Random, &o)
        })
        .collect()
}

/// A distinct class among converged outcomes.
#[derive(Debug, Clone)]
pub struct CcClass {
    /// First outcome of the class, with its configuration in canonical gauge.
    pub representative: SolveOutcome,
    pub multiplicity: usize,
}

/// Canonicalize converged outcomes and group them by fingerprint.
pub fn dedup_classes<'a>(
    outcomes: impl IntoIterator<Item = &'a SolveOutcome>,
    tol: f64,
) -> Vec<CcClass> {
    let mut classes: Vec<CcClass> = Vec::new();
    for o in outcomes.into_iter().filter(|o| o.converged) {
        if let Some(c) = classes
            .iter_mut()
            .find(|c| fingerprints_match(&c.representative.fingerprint, &o.fingerprint, tol))
        {
            c.multiplicity += 1;
            continue;
        }
        let mut rep = o.clone();
        if let Ok(canon) = canonical_gauge(&o.config) {
            rep.config = canon;
        }
        classes.push(CcClass {
            representative: rep,
            multiplicity: 1,
        });
    }
    classes
}

/// Which side of the zero-set curve a root lies on: `Rising` where lambda
/// crosses from negative to positive with increasing theta, `Falling` where it
/// returns negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Rising,
    Falling,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Rising => "rising",
            Branch::Falling => "falling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialRoot {
    pub theta: f64,
    pub lambda: f64,
    /// Largest Euclidean force norm of the assembled configuration.
    pub max_force: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialCurveEntry {
    pub c: f64,
    pub roots: Result<Vec<SpecialRoot>>,
}

impl SpecialCurveEntry {
    /// The root where lambda turns negative again (the larger theta in the
    /// `c < 0` rectangle).
    pub fn falling(&self) -> Option<&SpecialRoot> {
        self.roots
            .as_ref()
            .ok()?
            .iter()
            .find(|r| r.branch == Branch::Falling)
    }

    pub fn rising(&self) -> Option<&SpecialRoot> {
        self.roots
            .as_ref()
            .ok()?
            .iter()
            .find(|r| r.branch == Branch::Rising)
    }
}

/// Number of uniform theta samples used to bracket roots.
pub const SCAN_SAMPLES: usize = 64;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

fn special_roots(c: f64) -> Result<Vec<SpecialRoot>> {
    if !(c > -1.0 && c < 1.0) || c == 0.0 {
        return Err(Error::RegionInvalid { c, theta: f64::NAN });
    }
    // The family is symmetric under (c, theta) -> (-c, pi - theta).
    let mirrored = c > 0.0;
    let cn = -c.abs();
    let lam = |t: f64| lambda_single(cn, t);
    let step = FRAC_PI_2 / (SCAN_SAMPLES + 1) as f64;
    let thetas: Vec<f64> = (1..=SCAN_SAMPLES).map(|k| k as f64 * step).collect();
    let mut roots = Vec::new();
    for w in thetas.windows(2) {
        let (a, b) = (lam(w[0]), lam(w[1]));
        if a.signum() == b.signum() && a != 0.0 {
            continue;
        }
        let t = bisect(lam, w[0], w[1]);
        let branch = if a < b {
            Branch::Rising
        } else {
            Branch::Falling
        };
        let theta = if mirrored { PI - t } else { t };
        let config = family_q(&FamilyParams::new(c, theta))?;
        let max_force = grad_u(&config)?
            .iter()
            .map(|f| f.euclid_norm())
            .fold(0.0, f64::max);
        roots.push(SpecialRoot {
            theta,
            lambda: lambda_single(c, theta),
            max_force,
            branch,
        });
    }
    if roots.is_empty() {
        return Err(Error::NoSignChange { c });
    }
    Ok(roots)
}

/// Zeros of the triangle-family multiplier for each `c`: the special
/// (force-free) members of the family.
pub fn special_curve(c_grid: &[f64]) -> Vec<SpecialCurveEntry> {
    c_grid
        .iter()
        .map(|&c| SpecialCurveEntry {
            c,
            roots: special_roots(c),
        })
        .collect()
}
