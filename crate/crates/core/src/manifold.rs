//! Signed linear algebra on R^4 / R^{3,1} and the unit manifolds S^3, H^3.
//!
//! Points are stored extrinsically as `(x, y, z, w)`. The curvature sign
//! selects the bilinear form `x1 x2 + y1 y2 + z1 z2 + sign * w1 w2`; the
//! manifold is `{ q : q.q = sign }`, with `w > 0` on the hyperbolic sheet.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dot products closer than this to the singular boundary are rejected.
pub const CLAMP_TOL: f64 = 1e-12;
/// Below this zw-radius the spherical phase is left undefined.
pub const RHO_TOL: f64 = 1e-10;
/// Stereographic pole guard.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// S^3, Euclidean form.
    Spherical,
    /// H^3, Minkowski form.
    Hyperbolic,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Spherical => 1.0,
            Sign::Hyperbolic => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Spherical => 1,
            Sign::Hyperbolic => -1,
        }
    }

    pub fn from_i64(s: i64) -> Option<Sign> {
        match s {
            1 => Some(Sign::Spherical),
            -1 => Some(Sign::Hyperbolic),
            _ => None,
        }
    }
}

/// A vector of R^4 (or R^{3,1}); the bilinear form is supplied per call.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AmbientVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl AmbientVector {
    pub const ZERO: AmbientVector = AmbientVector::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        AmbientVector { x, y, z, w }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        AmbientVector::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    /// Ordinary Euclidean inner product, regardless of curvature.
    pub fn euclid_dot(self, other: AmbientVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z + self.w * other.w
    }

    pub fn euclid_norm(self) -> f64 {
        self.euclid_dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.w.is_finite()
    }

    /// Squared distance from the zw plane, `x^2 + y^2`.
    pub fn r2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

impl Index<usize> for AmbientVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        match k {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            3 => &self.w,
            _ => panic!("AmbientVector index {k} out of range"),
        }
    }
}

impl Add for AmbientVector {
    type Output = AmbientVector;
    fn add(self, o: AmbientVector) -> AmbientVector {
        AmbientVector::new(self.x + o.x, self.y + o.y, self.z + o.z, self.w + o.w)
    }
}

impl Sub for AmbientVector {
    type Output = AmbientVector;
    fn sub(self, o: AmbientVector) -> AmbientVector {
        AmbientVector::new(self.x - o.x, self.y - o.y, self.z - o.z, self.w - o.w)
    }
}

impl Neg for AmbientVector {
    type Output = AmbientVector;
    fn neg(self) -> AmbientVector {
        AmbientVector::new(-self.x, -self.y, -self.z, -self.w)
    }
}

impl Mul<f64> for AmbientVector {
    type Output = AmbientVector;
    fn mul(self, s: f64) -> AmbientVector {
        AmbientVector::new(self.x * s, self.y * s, self.z * s, self.w * s)
    }
}

impl Mul<AmbientVector> for f64 {
    type Output = AmbientVector;
    fn mul(self, v: AmbientVector) -> AmbientVector {
        v * self
    }
}

impl AddAssign for AmbientVector {
    fn add_assign(&mut self, o: AmbientVector) {
        *self = *self + o;
    }
}

impl SubAssign for AmbientVector {
    fn sub_assign(&mut self, o: AmbientVector) {
        *self = *self - o;
    }
}

pub fn sdot(u: AmbientVector, v: AmbientVector, sign: Sign) -> f64 {
    u.x * v.x + u.y * v.y + u.z * v.z + sign.value() * u.w * v.w
}

pub fn on_manifold(u: AmbientVector, sign: Sign, tol: f64) -> bool {
    if !u.is_finite() || (sdot(u, u, sign) - sign.value()).abs() > tol {
        return false;
    }
    match sign {
        Sign::Spherical => true,
        Sign::Hyperbolic => u.w > 0.0,
    }
}

/// Geodesic distance on S^3 (`arccos`) or H^3 (`arccosh` of minus the dot).
///
/// Pairs whose dot product lies within [`CLAMP_TOL`] of a singular value
/// (collision, or antipodes on S^3) are rejected rather than mapped to 0 / pi.
pub fn geodesic_distance(u: AmbientVector, v: AmbientVector, sign: Sign) -> Result<f64> {
    let dot = sdot(u, v, sign);
    match sign {
        Sign::Spherical => {
            if dot.is_nan() || dot.abs() >= 1.0 - CLAMP_TOL {
                return Err(Error::SingularPair(None));
            }
            Ok(dot.clamp(-1.0, 1.0).acos())
        }
        Sign::Hyperbolic => {
            let c = -dot;
            if c.is_nan() || c <= 1.0 + CLAMP_TOL {
                return Err(Error::SingularPair(None));
            }
            Ok(c.acosh())
        }
    }
}

/// Euclidean-orthogonal projection onto the tangent space at `q` (with respect
/// to the signed form): `v - sign (v.q) q`, valid for `q.q = sign`.
pub fn project_tangent(q: AmbientVector, v: AmbientVector, sign: Sign) -> AmbientVector {
    v - q * (sign.value() * sdot(v, q, sign))
}

/// Radially rescale `q` back onto the manifold. Returns `None` when `q` is not
/// on the right side of the light cone (or on the lower sheet for H^3).
pub fn retract(q: AmbientVector, sign: Sign) -> Option<AmbientVector> {
    let n2 = sign.value() * sdot(q, q, sign);
    if !(n2 > 0.0) || !n2.is_finite() {
        return None;
    }
    if sign == Sign::Hyperbolic && q.w <= 0.0 {
        return None;
    }
    Some(q * (1.0 / n2.sqrt()))
}

/// An element of SO(2) x SO(2) (sphere) or SO(2) x SO(1,1) (hyperbolic
/// sphere): an xy rotation by `psi` combined with a zw rotation or boost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub psi: f64,
    /// zw rotation angle (sphere) or boost rapidity (hyperbolic).
    pub chi: f64,
    pub sign: Sign,
}

impl GroupElement {
    pub fn new(psi: f64, chi: f64, sign: Sign) -> Self {
        GroupElement { psi, chi, sign }
    }

    pub fn identity(sign: Sign) -> Self {
        GroupElement::new(0.0, 0.0, sign)
    }

    pub fn inverse(self) -> Self {
        GroupElement::new(-self.psi, -self.chi, self.sign)
    }

    pub fn is_identity(self) -> bool {
        self.psi == 0.0 && self.chi == 0.0
    }

    /// Act on a point or tangent vector (the action is linear).
    pub fn apply(self, u: AmbientVector) -> AmbientVector {
        let (sp, cp) = self.psi.sin_cos();
        let x = cp * u.x - sp * u.y;
        let y = sp * u.x + cp * u.y;
        let (z, w) = match self.sign {
            Sign::Spherical => {
                let (sc, cc) = self.chi.sin_cos();
                (cc * u.z - sc * u.w, sc * u.z + cc * u.w)
            }
            Sign::Hyperbolic => {
                let (sh, ch) = (self.chi.sinh(), self.chi.cosh());
                (ch * u.z - sh * u.w, -sh * u.z + ch * u.w)
            }
        };
        AmbientVector::new(x, y, z, w)
    }
}

pub fn apply_group(g: GroupElement, u: AmbientVector) -> AmbientVector {
    g.apply(u)
}

/// zw-polar decomposition. On H^3 `(z, w) = rho (sinh phi, cosh phi)`; on S^3
/// `(z, w) = rho (sin phi, cos phi)` and `phi` is only defined away from the
/// xy plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarZW {
    pub rho: f64,
    pub phi: Option<f64>,
}

impl PolarZW {
    pub fn is_defined(&self) -> bool {
        self.phi.is_some()
    }

    /// Rebuild `(z, w)`; `None` when the phase is undefined.
    pub fn zw(&self, sign: Sign) -> Option<(f64, f64)> {
        let phi = self.phi?;
        Some(match sign {
            Sign::Spherical => (self.rho * phi.sin(), self.rho * phi.cos()),
            Sign::Hyperbolic => (self.rho * phi.sinh(), self.rho * phi.cosh()),
        })
    }
}

pub fn polar_zw(u: AmbientVector, sign: Sign, rho_tol: f64) -> PolarZW {
    match sign {
        Sign::Hyperbolic => {
            let rho = (u.w * u.w - u.z * u.z).sqrt();
            PolarZW {
                rho,
                phi: Some((u.z / u.w).atanh()),
            }
        }
        Sign::Spherical => {
            let rho = u.z.hypot(u.w);
            let phi = (rho >= rho_tol).then(|| u.z.atan2(u.w));
            PolarZW { rho, phi }
        }
    }
}

/// Stereographic projection of S^3 from the pole `(0, 0, 1, 0)` onto the
/// `z = 0` hyperplane, returned as `(x, y, w) / (1 - z)`.
pub fn stereographic(u: AmbientVector) -> Result<[f64; 3]> {
    let den = 1.0 - u.z;
    if den.abs() < POLE_TOL {
        return Err(Error::ProjectionPole);
    }
    Ok([u.x / den, u.y / den, u.w / den])
}

/// Hyperboloid to Poincare ball: `(x, y, z) / (1 + w)`.
pub fn poincare_ball(u: AmbientVector) -> [f64; 3] {
    let den = 1.0 + u.w;
    [u.x / den, u.y / den, u.z / den]
}

/// Wrap an angle into `(-pi, pi]`.
pub(crate) fn wrap_pi(a: f64) -> f64 {
    let mut t = a.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pent1() -> AmbientVector {
        AmbientVector::new(1.0, 0.0, 0.0, 0.0)
    }

    fn pent2() -> AmbientVector {
        AmbientVector::new(-0.25, 15f64.sqrt() / 4.0, 0.0, 0.0)
    }

    #[test]
    fn sdot_examples() {
        let t = AmbientVector::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(sdot(t, t, Sign::Hyperbolic), -1.0);
        assert!((sdot(pent1(), pent2(), Sign::Spherical) + 0.25).abs() < 1e-16);
        let th = PI / 4.0;
        let a = AmbientVector::new(0.0, 0.0, th.cos(), th.sin());
        let b = AmbientVector::new(0.0, 0.0, th.cos(), -th.sin());
        assert!(sdot(a, b, Sign::Spherical).abs() < 1e-15);
    }

    #[test]
    fn membership() {
        assert!(on_manifold(pent1(), Sign::Spherical, 1e-12));
        assert!(!on_manifold(
            AmbientVector::new(0.0, 0.0, 0.0, -1.0),
            Sign::Hyperbolic,
            1e-12
        ));
        let h = AmbientVector::new(0.0, 0.0, 1f64.sinh(), 1f64.cosh());
        assert!(on_manifold(h, Sign::Hyperbolic, 1e-12));
        assert!(!on_manifold(
            AmbientVector::new(f64::NAN, 0.0, 0.0, 1.0),
            Sign::Spherical,
            1e-12
        ));
    }

    #[test]
    fn distances() {
        let d = geodesic_distance(pent1(), pent2(), Sign::Spherical).unwrap();
        assert!((d - (-0.25f64).acos()).abs() < 1e-15);
        assert!((d - 1.823_476_581_936_975).abs() < 1e-12);

        assert_eq!(
            geodesic_distance(pent1(), pent1(), Sign::Spherical),
            Err(Error::SingularPair(None))
        );
        assert_eq!(
            geodesic_distance(pent1(), -pent1(), Sign::Spherical),
            Err(Error::SingularPair(None))
        );

        let x = 1.0f64;
        let w = (1.0 + x * x).sqrt();
        let u = AmbientVector::new(x, 0.0, 0.0, w);
        let v = AmbientVector::new(-x, 0.0, 0.0, w);
        let d = geodesic_distance(u, v, Sign::Hyperbolic).unwrap();
        assert!((d - 3f64.acosh()).abs() < 1e-15);
        assert!((d - 1.762_747_174_039_086).abs() < 1e-12);
        assert!(geodesic_distance(u, u, Sign::Hyperbolic).is_err());
    }

    #[test]
    fn group_action_examples() {
        let u = AmbientVector::new(0.3, -0.2, 0.5, 0.6);
        assert_eq!(GroupElement::identity(Sign::Spherical).apply(u), u);

        let (rho, phi) = (1.7f64, 0.8f64);
        let h = AmbientVector::new(0.0, 0.0, rho * phi.sinh(), rho * phi.cosh());
        let out = GroupElement::new(0.0, phi, Sign::Hyperbolic).apply(h);
        assert!(out.z.abs() < 1e-14);
        assert!((out.w - rho).abs() < 1e-14);
    }

    #[test]
    fn polar_examples() {
        let h = AmbientVector::new(0.0, 0.0, 0.5f64.sinh(), 0.5f64.cosh());
        let p = polar_zw(h, Sign::Hyperbolic, RHO_TOL);
        assert!((p.rho - 1.0).abs() < 1e-15);
        assert!((p.phi.unwrap() - 0.5).abs() < 1e-15);

        let p = polar_zw(pent1(), Sign::Spherical, 1e-12);
        assert_eq!(p.rho, 0.0);
        assert!(!p.is_defined());

        let th = PI / 4.0;
        let s = AmbientVector::new(0.0, 0.0, th.cos(), th.sin());
        let p = polar_zw(s, Sign::Spherical, RHO_TOL);
        assert!((p.rho - 1.0).abs() < 1e-15);
        assert!((p.phi.unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn projections() {
        let th = PI / 4.0;
        let s = stereographic(AmbientVector::new(0.0, 0.0, th.cos(), th.sin())).unwrap();
        assert!((s[2] - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        assert_eq!(
            stereographic(AmbientVector::new(0.0, 0.0, -1.0, 0.0)).unwrap(),
            [0.0, 0.0, 0.0]
        );
        assert_eq!(
            stereographic(AmbientVector::new(0.0, 0.0, 1.0, 0.0)),
            Err(Error::ProjectionPole)
        );

        assert_eq!(
            poincare_ball(AmbientVector::new(0.0, 0.0, 0.0, 1.0)),
            [0.0, 0.0, 0.0]
        );
        let b = poincare_ball(AmbientVector::new(0.0, 0.0, 1f64.sinh(), 1f64.cosh()));
        assert!((b[2] - 0.5f64.tanh()).abs() < 1e-15);
        assert!((b[2] - 0.462_117_157_260_009_8).abs() < 1e-12);
    }

    #[test]
    fn wrap_range() {
        assert!((wrap_pi(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_pi(-0.5) + 0.5).abs() < 1e-15);
    }
}
