//! Force function, moment of inertia about the zw plane, their gradients,
//! the constrained equations of motion and a projected RK4 integrator.

use crate::error::{Error, Pair, Result};
use crate::manifold::{
    geodesic_distance, on_manifold, project_tangent, retract, sdot, AmbientVector, GroupElement,
    Sign,
};

/// Positions must satisfy `q.q = sign` to this tolerance.
pub const ON_TOL: f64 = 1e-9;
/// Velocities must satisfy `v.q = 0` to this (relative) tolerance.
pub const TANGENT_TOL: f64 = 1e-8;

/// Masses and on-manifold positions, free of collisions and antipodal pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    sign: Sign,
    masses: Vec<f64>,
    positions: Vec<AmbientVector>,
}

impl Configuration {
    pub fn new(sign: Sign, masses: Vec<f64>, positions: Vec<AmbientVector>) -> Result<Self> {
        Self::with_tol(sign, masses, positions, ON_TOL)
    }

    pub fn with_tol(
        sign: Sign,
        masses: Vec<f64>,
        positions: Vec<AmbientVector>,
        on_tol: f64,
    ) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidConfig("no bodies".into()));
        }
        if masses.len() != positions.len() {
            return Err(Error::InvalidConfig(format!(
                "{} masses but {} positions",
                masses.len(),
                positions.len()
            )));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "mass {i} = {m} is not positive"
                )));
            }
        }
        for (i, &q) in positions.iter().enumerate() {
            // Far out on H^3 the constraint cancels terms of size |q|^2.
            if !on_manifold(q, sign, on_tol * q.euclid_dot(q).max(1.0)) {
                return Err(Error::InvalidConfig(format!(
                    "body {i} is off the manifold (q.q = {}, expected {})",
                    sdot(q, q, sign),
                    sign.value()
                )));
            }
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                geodesic_distance(positions[i], positions[j], sign).map_err(|e| e.at_pair(i, j))?;
            }
        }
        Ok(Configuration {
            sign,
            masses,
            positions,
        })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn positions(&self) -> &[AmbientVector] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        geodesic_distance(self.positions[i], self.positions[j], self.sign)
            .map_err(|e| e.at_pair(i, j))
    }

    /// Distances `d_ij` for `i < j`, in row-major order.
    pub fn pairwise_distances(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.distance(i, j)?);
            }
        }
        Ok(out)
    }

    /// Sorted pairwise distances; identifies a configuration up to the
    /// symmetry group and relabeling.
    pub fn fingerprint(&self) -> Result<Vec<f64>> {
        let mut d = self.pairwise_distances()?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Image under a group element (an isometry, so validity is preserved).
    pub fn transformed(&self, g: GroupElement) -> Configuration {
        debug_assert_eq!(g.sign, self.sign);
        Configuration {
            sign: self.sign,
            masses: self.masses.clone(),
            positions: self.positions.iter().map(|&q| g.apply(q)).collect(),
        }
    }

    /// Reorder bodies: body `k` of the result is body `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Configuration {
        Configuration {
            sign: self.sign,
            masses: perm.iter().map(|&k| self.masses[k]).collect(),
            positions: perm.iter().map(|&k| self.positions[k]).collect(),
        }
    }
}

/// `(sn, csn, ctn)`: `(sin, cos, cot)` on the sphere and `(sinh, cosh, coth)`
/// on the hyperbolic sphere.
pub fn unified_trig(x: f64, sign: Sign) -> (f64, f64, f64) {
    match sign {
        Sign::Spherical => {
            let (s, c) = x.sin_cos();
            (s, c, c / s)
        }
        Sign::Hyperbolic => {
            let (s, c) = (x.sinh(), x.cosh());
            (s, c, c / s)
        }
    }
}

/// `(csn d, sn d)` for the pair, read off the dot product directly.
pub(crate) fn pair_trig(qi: AmbientVector, qj: AmbientVector, sign: Sign) -> Result<(f64, f64)> {
    geodesic_distance(qi, qj, sign)?;
    let csn = sign.value() * sdot(qi, qj, sign);
    let sn = (sign.value() * (1.0 - csn * csn)).sqrt();
    Ok((csn, sn))
}

fn pair_force(
    sign: Sign,
    mi: f64,
    mj: f64,
    qi: AmbientVector,
    qj: AmbientVector,
) -> Result<AmbientVector> {
    let (csn, sn) = pair_trig(qi, qj, sign)?;
    Ok((qj - qi * csn) * (mi * mj / (sn * sn * sn)))
}

/// `F_i` for every body from bare slices; positions need not be validated.
pub(crate) fn forces_raw(
    sign: Sign,
    masses: &[f64],
    positions: &[AmbientVector],
) -> Result<Vec<AmbientVector>> {
    let n = masses.len();
    let mut out = vec![AmbientVector::ZERO; n];
    for i in 0..n {
        for j in i + 1..n {
            let (csn, sn) =
                pair_trig(positions[i], positions[j], sign).map_err(|e| e.at_pair(i, j))?;
            let k = masses[i] * masses[j] / (sn * sn * sn);
            out[i] += (positions[j] - positions[i] * csn) * k;
            out[j] += (positions[i] - positions[j] * csn) * k;
        }
    }
    Ok(out)
}

/// Tangential gradient of `m (x^2 + y^2)` at one point.
pub(crate) fn moment_gradient_raw(sign: Sign, m: f64, q: AmbientVector) -> AmbientVector {
    let r2 = q.r2();
    match sign {
        Sign::Spherical => {
            let rho2 = q.w * q.w + q.z * q.z;
            AmbientVector::new(q.x * rho2, q.y * rho2, -q.z * r2, -q.w * r2) * (2.0 * m)
        }
        Sign::Hyperbolic => {
            let rho2 = q.w * q.w - q.z * q.z;
            AmbientVector::new(q.x * rho2, q.y * rho2, q.z * r2, q.w * r2) * (2.0 * m)
        }
    }
}

/// `F_ij = m_i m_j (q_j - csn(d_ij) q_i) / sn^3(d_ij)`.
pub fn force_pair(config: &Configuration, i: usize, j: usize) -> Result<AmbientVector> {
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "force_pair needs i != j (got {i})"
        )));
    }
    let m = config.masses();
    let q = config.positions();
    pair_force(config.sign(), m[i], m[j], q[i], q[j]).map_err(|e| e.at_pair(i, j))
}

/// Gradient of the force function, `F_i = sum_{j != i} F_ij`.
pub fn grad_u(config: &Configuration) -> Result<Vec<AmbientVector>> {
    forces_raw(config.sign(), config.masses(), config.positions())
}

/// Force function `U = sum_{i<j} m_i m_j ctn(d_ij)` (the potential is `-U`).
pub fn potential(config: &Configuration) -> Result<f64> {
    let m = config.masses();
    let q = config.positions();
    let n = config.len();
    let mut u = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (csn, sn) = pair_trig(q[i], q[j], config.sign()).map_err(|e| e.at_pair(i, j))?;
            u += m[i] * m[j] * csn / sn;
        }
    }
    Ok(u)
}

/// Tangential gradient of the moment `I`.
pub fn grad_i(config: &Configuration) -> Vec<AmbientVector> {
    config
        .masses()
        .iter()
        .zip(config.positions())
        .map(|(&m, &q)| moment_gradient_raw(config.sign(), m, q))
        .collect()
}

/// `I = sum_i m_i (x_i^2 + y_i^2)`.
pub fn moment(config: &Configuration) -> f64 {
    config
        .masses()
        .iter()
        .zip(config.positions())
        .map(|(&m, q)| m * q.r2())
        .sum()
}

/// Positions plus tangent velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub config: Configuration,
    pub velocities: Vec<AmbientVector>,
}

impl PhaseState {
    pub fn new(config: Configuration, velocities: Vec<AmbientVector>) -> Result<Self> {
        if velocities.len() != config.len() {
            return Err(Error::InvalidConfig(format!(
                "{} velocities for {} bodies",
                velocities.len(),
                config.len()
            )));
        }
        for (i, (&v, &q)) in velocities.iter().zip(config.positions()).enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("velocity {i} is not finite")));
            }
            let t = sdot(v, q, config.sign());
            if t.abs() > TANGENT_TOL * (1.0 + v.euclid_norm()) {
                return Err(Error::InvalidConfig(format!(
                    "velocity {i} is not tangent (v.q = {t})"
                )));
            }
        }
        Ok(PhaseState { config, velocities })
    }

    pub fn at_rest(config: Configuration) -> Self {
        let velocities = vec![AmbientVector::ZERO; config.len()];
        PhaseState { config, velocities }
    }

    /// `E = (1/2) sum m_i v_i.v_i - U`.
    pub fn energy(&self) -> Result<f64> {
        Ok(kinetic(&self.config, &self.velocities) - potential(&self.config)?)
    }

    /// `(J_xy, J_zw)`.
    pub fn angular_momenta(&self) -> (f64, f64) {
        angular_momenta(
            self.config.masses(),
            self.config.positions(),
            &self.velocities,
        )
    }
}

fn kinetic(config: &Configuration, velocities: &[AmbientVector]) -> f64 {
    0.5 * config
        .masses()
        .iter()
        .zip(velocities)
        .map(|(&m, &v)| m * sdot(v, v, config.sign()))
        .sum::<f64>()
}

fn angular_momenta(masses: &[f64], q: &[AmbientVector], v: &[AmbientVector]) -> (f64, f64) {
    let mut jxy = 0.0;
    let mut jzw = 0.0;
    for ((&m, q), v) in masses.iter().zip(q).zip(v) {
        jxy += m * (q.x * v.y - q.y * v.x);
        jzw += m * (q.z * v.w - q.w * v.z);
    }
    (jxy, jzw)
}

fn accelerations_raw(
    sign: Sign,
    masses: &[f64],
    q: &[AmbientVector],
    v: &[AmbientVector],
) -> Result<Vec<AmbientVector>> {
    let f = forces_raw(sign, masses, q)?;
    Ok(f.into_iter()
        .zip(masses)
        .zip(q.iter().zip(v))
        .map(|((fi, &m), (&qi, &vi))| fi * (1.0 / m) - qi * (sign.value() * sdot(vi, vi, sign)))
        .collect())
}

/// `q''_i = F_i / m_i - sign (q'_i . q'_i) q_i`.
pub fn eom_rhs(state: &PhaseState) -> Result<Vec<AmbientVector>> {
    let c = &state.config;
    accelerations_raw(c.sign(), c.masses(), c.positions(), &state.velocities)
}

/// Where and why an integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Abort {
    pub time: f64,
    pub pair: Option<Pair>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub energy: Vec<f64>,
    pub momentum_xy: Vec<f64>,
    pub momentum_zw: Vec<f64>,
    pub abort: Option<Abort>,
}

impl Trajectory {
    /// Largest change of any pairwise distance relative to the first sample.
    pub fn max_distance_drift(&self) -> f64 {
        let Some(first) = self.states.first() else {
            return 0.0;
        };
        let Ok(d0) = first.config.pairwise_distances() else {
            return f64::NAN;
        };
        self.states
            .iter()
            .map(|s| match s.config.pairwise_distances() {
                Ok(d) => d
                    .iter()
                    .zip(&d0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
                Err(_) => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    pub fn max_energy_error(&self) -> f64 {
        max_dev(&self.energy)
    }

    pub fn max_momentum_error(&self) -> (f64, f64) {
        (max_dev(&self.momentum_xy), max_dev(&self.momentum_zw))
    }
}

fn max_dev(xs: &[f64]) -> f64 {
    match xs.first() {
        Some(&x0) => xs.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max),
        None => 0.0,
    }
}

/// Fixed-step RK4 with post-step projection; every step is recorded.
pub fn integrate(state: &PhaseState, dt: f64, t_end: f64) -> Result<Trajectory> {
    integrate_sampled(state, dt, t_end, 1)
}

/// As [`integrate`], keeping every `every`-th step (and always the last).
///
/// The step is shrunk slightly so that `t_end` is hit exactly. A singular
/// pair mid-run ends the trajectory early with [`Trajectory::abort`] set.
pub fn integrate_sampled(
    state: &PhaseState,
    dt: f64,
    t_end: f64,
    every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end > 0.0) || every == 0 {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0, t_end > 0, every >= 1 (got {dt}, {t_end}, {every})"
        )));
    }
    let sign = state.config.sign();
    let masses = state.config.masses().to_vec();
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energy: Vec::new(),
        momentum_xy: Vec::new(),
        momentum_zw: Vec::new(),
        abort: None,
    };
    let mut record = |t: f64, s: &PhaseState| -> Result<()> {
        let (jxy, jzw) = s.angular_momenta();
        traj.energy.push(s.energy()?);
        traj.momentum_xy.push(jxy);
        traj.momentum_zw.push(jzw);
        traj.times.push(t);
        traj.states.push(s.clone());
        Ok(())
    };
    record(0.0, state)?;

    let mut q = state.config.positions().to_vec();
    let mut v = state.velocities.clone();
    let n = q.len();
    let axpy = |base: &[AmbientVector], k: &[AmbientVector], a: f64| -> Vec<AmbientVector> {
        base.iter().zip(k).map(|(&b, &k)| b + k * a).collect()
    };

    for step in 1..=steps {
        let t = step as f64 * h;
        let stage = || -> Result<(Vec<AmbientVector>, Vec<AmbientVector>)> {
            let a1 = accelerations_raw(sign, &masses, &q, &v)?;
            let (q2, v2) = (axpy(&q, &v, h / 2.0), axpy(&v, &a1, h / 2.0));
            let a2 = accelerations_raw(sign, &masses, &q2, &v2)?;
            let (q3, v3) = (axpy(&q, &v2, h / 2.0), axpy(&v, &a2, h / 2.0));
            let a3 = accelerations_raw(sign, &masses, &q3, &v3)?;
            let (q4, v4) = (axpy(&q, &v3, h), axpy(&v, &a3, h));
            let a4 = accelerations_raw(sign, &masses, &q4, &v4)?;
            let mut qn = Vec::with_capacity(n);
            let mut vn = Vec::with_capacity(n);
            for i in 0..n {
                let dq = (v[i] + (v2[i] + v3[i]) * 2.0 + v4[i]) * (h / 6.0);
                let dv = (a1[i] + (a2[i] + a3[i]) * 2.0 + a4[i]) * (h / 6.0);
                let qi = retract(q[i] + dq, sign).ok_or(Error::SingularPair(None))?;
                qn.push(qi);
                vn.push(project_tangent(qi, v[i] + dv, sign));
            }
            Ok((qn, vn))
        };
        let next = stage().and_then(|(qn, vn)| {
            let config = Configuration::new(sign, masses.clone(), qn)?;
            Ok(PhaseState {
                config,
                velocities: vn,
            })
        });
        let next = match next {
            Ok(s) => s,
            Err(Error::SingularPair(pair)) => {
                traj.abort = Some(Abort { time: t, pair });
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        q = next.config.positions().to_vec();
        v = next.velocities.clone();
        if step % every == 0 || step == steps {
            record(t, &next)?;
        }
    }
    Ok(traj)
}

/// Spin rates `(alpha, beta)` of the relative equilibrium selected by `s`.
pub fn spin_rates(sign: Sign, lambda: f64, s: f64) -> Result<(f64, f64)> {
    let infeasible = || Error::InfeasibleSpin { lambda, s };
    if !(s >= 0.0) {
        return Err(infeasible());
    }
    // Round-off at the edge of the feasible range (e.g. s = sqrt(-2 lambda)).
    let slack = 1e-12 * (1.0 + lambda.abs() + s * s);
    let snap = |b2: f64| if b2 < 0.0 && b2 > -slack { 0.0 } else { b2 };
    match sign {
        Sign::Spherical => {
            let b2 = snap(2.0 * lambda + s * s);
            if b2 < 0.0 {
                return Err(infeasible());
            }
            Ok((s, b2.sqrt()))
        }
        Sign::Hyperbolic => {
            let b2 = snap(-2.0 * lambda - s * s);
            if lambda > 0.0 || b2 < 0.0 {
                return Err(infeasible());
            }
            Ok((s, b2.sqrt()))
        }
    }
}

/// Initial velocities of the rigid motion generated by a central
/// configuration with multiplier `lambda`: an xy rotation at rate `alpha`
/// combined with a zw rotation (sphere) or boost (hyperbolic) at rate `beta`.
pub fn relative_equilibrium_velocities(
    config: &Configuration,
    lambda: f64,
    s: f64,
) -> Result<Vec<AmbientVector>> {
    let sign = config.sign();
    let (alpha, beta) = spin_rates(sign, lambda, s)?;
    Ok(config
        .positions()
        .iter()
        .map(|q| {
            let rot = AmbientVector::new(-q.y, q.x, 0.0, 0.0) * alpha;
            let zw = match sign {
                Sign::Spherical => AmbientVector::new(0.0, 0.0, -q.w, q.z),
                Sign::Hyperbolic => AmbientVector::new(0.0, 0.0, q.w, q.z),
            };
            rot + zw * beta
        })
        .collect())
}
