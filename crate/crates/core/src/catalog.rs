//! Exact central configurations on S^3: the five-body pentatope and the
//! two-parameter family of two axis bodies above and below a regular polygon.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::dynamics::{grad_u, Configuration};
use crate::error::{Error, Result};
use crate::manifold::{AmbientVector, Sign};

/// The regular 4-simplex in S^3 with five unit masses; every pairwise dot
/// product is -1/4 and every force vanishes.
pub fn pentatope() -> Configuration {
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    let y = -s5 / (4.0 * s3);
    let positions = vec![
        AmbientVector::new(1.0, 0.0, 0.0, 0.0),
        AmbientVector::new(-0.25, 15f64.sqrt() / 4.0, 0.0, 0.0),
        AmbientVector::new(-0.25, y, s5 / s6, 0.0),
        AmbientVector::new(-0.25, y, -s5 / (2.0 * s6), s5 / (2.0 * s2)),
        AmbientVector::new(-0.25, y, -s5 / (2.0 * s6), -s5 / (2.0 * s2)),
    ];
    Configuration::new(Sign::Spherical, vec![1.0; 5], positions)
        .expect("pentatope coordinates are valid")
}

/// Parameters of the polygon family: ring latitude `z = c`, axis bodies at
/// `(0, 0, cos theta, +-sin theta)`, and `n` unit masses on the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub c: f64,
    pub theta: f64,
    pub n: usize,
}

impl FamilyParams {
    pub fn new(c: f64, theta: f64) -> Self {
        FamilyParams { c, theta, n: 3 }
    }

    pub fn with_n(c: f64, theta: f64, n: usize) -> Self {
        FamilyParams { c, theta, n }
    }

    /// Ring radius `sqrt(1 - c^2)`.
    pub fn r(&self) -> f64 {
        (1.0 - self.c * self.c).sqrt()
    }

    /// `c cos(theta) < 0`, i.e. `(-1,0) x (0,pi/2)` or `(0,1) x (pi/2,pi)`.
    pub fn region_valid(&self) -> bool {
        let (c, t) = (self.c, self.theta);
        let c_ok = c > -1.0 && c < 1.0 && c != 0.0;
        let t_ok = t > 0.0 && t < PI && t != FRAC_PI_2;
        c_ok && t_ok && self.n >= 3 && c * t.cos() < 0.0
    }

    fn check(&self) -> Result<()> {
        if self.region_valid() {
            Ok(())
        } else {
            Err(Error::RegionInvalid {
                c: self.c,
                theta: self.theta,
            })
        }
    }

    /// `sin^2 d_13 = 1 - c^2 cos^2 theta`.
    fn sin2_d13(&self) -> f64 {
        let k = self.c * self.theta.cos();
        1.0 - k * k
    }
}

/// Bodies 0 and 1 on the zw circle with mass `m`, then the ring.
fn assemble(p: &FamilyParams, m: f64) -> Result<Configuration> {
    let (st, ct) = p.theta.sin_cos();
    let r = p.r();
    let mut positions = vec![
        AmbientVector::new(0.0, 0.0, ct, st),
        AmbientVector::new(0.0, 0.0, ct, -st),
    ];
    for k in 0..p.n {
        let a = 2.0 * PI * k as f64 / p.n as f64;
        positions.push(AmbientVector::new(r * a.cos(), r * a.sin(), p.c, 0.0));
    }
    let mut masses = vec![m, m];
    masses.extend(std::iter::repeat_n(1.0, p.n));
    Configuration::new(Sign::Spherical, masses, positions)
}

/// Axis mass that makes the triangle family central.
pub fn family_mass(c: f64, theta: f64) -> Result<f64> {
    let p = FamilyParams::new(c, theta);
    p.check()?;
    let s2t = (2.0 * theta).sin().abs();
    Ok(-3.0 * c * s2t.powi(3) / (2.0 * theta.cos() * p.sin2_d13().powf(1.5)))
}

/// The triangle family `q(c, theta)` with masses `(m, m, 1, 1, 1)`.
pub fn family_q(p: &FamilyParams) -> Result<Configuration> {
    if p.n != 3 {
        return Err(Error::InvalidArgument(format!(
            "family_q is the triangle family (n = 3, got {}); use ngon_family",
            p.n
        )));
    }
    assemble(p, family_mass(p.c, p.theta)?)
}

/// Multiplier of the triangle family, split into the ring's own part and the
/// axis-body contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyLambda {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda: f64,
}

/// `lambda1 = -3 / (2 sin^3 d_34)`, `lambda2 = -m cos(theta) / (c sin^3 d_13)`.
pub fn lambda_closed_form(p: &FamilyParams) -> Result<FamilyLambda> {
    p.check()?;
    let m = family_mass(p.c, p.theta)?;
    let cos34 = 1.5 * p.c * p.c - 0.5;
    let sin34 = (1.0 - cos34 * cos34).sqrt();
    let lambda1 = -3.0 / (2.0 * sin34.powi(3));
    let lambda2 = -m * p.theta.cos() / (p.c * p.sin2_d13().powf(1.5));
    Ok(FamilyLambda {
        lambda1,
        lambda2,
        lambda: lambda1 + lambda2,
    })
}

/// The same multiplier written as one expression in `(c, theta)`; its zero
/// set is the curve of special (force-free) members of the family.
pub fn lambda_single(c: f64, theta: f64) -> f64 {
    let c2 = c * c;
    let k = c * theta.cos();
    let ring = -8.0 / (3.0 * 3f64.sqrt() * (1.0 + 3.0 * c2).powf(1.5) * (1.0 - c2).powf(1.5));
    let axis = (2.0 * theta).sin().abs().powi(3) / (1.0 - k * k).powi(3);
    1.5 * (ring + axis)
}

/// Upper end of the mass bracket for [`ngon_family`].
pub const NGON_MASS_MAX: f64 = 1e3;

/// Force on the upper axis body along `(0, 0, sin theta, -cos theta)`, per
/// unit axis mass. Linear in `m`; its root balances the axis bodies.
pub fn axis_balance(p: &FamilyParams, m: f64) -> Result<f64> {
    let config = assemble(p, m)?;
    let f1 = grad_u(&config)?[0];
    let (st, ct) = p.theta.sin_cos();
    Ok((f1.z * st - f1.w * ct) / m)
}

/// Axis mass for an `n`-gon ring, found by bisection on [`axis_balance`]
/// over `(0, NGON_MASS_MAX]`.
pub fn ngon_mass(p: &FamilyParams) -> Result<f64> {
    p.check()?;
    let no_solution = || Error::NoMassSolution {
        c: p.c,
        theta: p.theta,
    };
    let mut lo = 1e-12;
    let mut hi = NGON_MASS_MAX;
    let f_lo = axis_balance(p, lo)?;
    let f_hi = axis_balance(p, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(no_solution());
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = axis_balance(p, mid)?;
        if f == 0.0 {
            return Ok(mid);
        }
        if f.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Regular `n`-gon of unit masses at latitude `c` with the two balanced axis
/// bodies.
pub fn ngon_family(n: usize, c: f64, theta: f64) -> Result<Configuration> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "polygon needs n >= 3 (got {n})"
        )));
    }
    let p = FamilyParams::with_n(c, theta, n);
    let m = ngon_mass(&p)?;
    assemble(&p, m)
}
