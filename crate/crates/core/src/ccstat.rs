//! Central-configuration diagnostics: the least-squares multiplier, residuals
//! of `grad U = lambda grad I`, dimension classes, the zw-phase necessary
//! conditions and the reduction of hyperbolic configurations onto `z = 0`.

use std::fmt;

use nalgebra::DMatrix;

use crate::dynamics::{grad_i, grad_u, pair_trig, Configuration};
use crate::error::{Error, Result};
use crate::manifold::{polar_zw, wrap_pi, AmbientVector, GroupElement, Sign, RHO_TOL};

/// Thresholds shared by the diagnostics; every field is overridable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub lambda_tol: f64,
    pub cc_tol: f64,
    pub rank_tol: f64,
    pub coplanar_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lambda_tol: 1e-9,
            cc_tol: 1e-9,
            rank_tol: 1e-8,
            coplanar_tol: 1e-8,
        }
    }
}

/// Below this `sum |grad I_i|^2` the multiplier is not identifiable.
pub const DENOM_TOL: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaFit {
    pub lambda: f64,
    /// Every `grad I_i` vanishes (all bodies on the zw circle); `lambda` is 0.
    pub degenerate: bool,
}

pub(crate) fn fit_lambda_from(forces: &[AmbientVector], grads: &[AmbientVector]) -> LambdaFit {
    let num: f64 = forces
        .iter()
        .zip(grads)
        .map(|(f, g)| f.euclid_dot(*g))
        .sum();
    let den: f64 = grads.iter().map(|g| g.euclid_dot(*g)).sum();
    if den < DENOM_TOL {
        LambdaFit {
            lambda: 0.0,
            degenerate: true,
        }
    } else {
        LambdaFit {
            lambda: num / den,
            degenerate: false,
        }
    }
}

/// Least-squares `lambda` over the stacked 4N components, Euclidean weights.
pub fn fit_lambda(config: &Configuration) -> Result<LambdaFit> {
    Ok(fit_lambda_from(&grad_u(config)?, &grad_i(config)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DimClass {
    Geodesic,
    TwoDimensional,
    ThreeDimensional,
}

impl DimClass {
    pub fn label(self) -> &'static str {
        match self {
            DimClass::Geodesic => "geodesic",
            DimClass::TwoDimensional => "2d",
            DimClass::ThreeDimensional => "3d",
        }
    }
}

impl fmt::Display for DimClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CCReport {
    pub lambda: f64,
    pub residual_inf: f64,
    pub residual_per_body: Vec<f64>,
    pub is_special: bool,
    pub dim_class: Option<DimClass>,
    pub common_phi: Option<f64>,
}

pub(crate) fn residuals_from(
    forces: &[AmbientVector],
    grads: &[AmbientVector],
    lambda: f64,
) -> Vec<f64> {
    forces
        .iter()
        .zip(grads)
        .map(|(&f, &g)| (f - g * lambda).euclid_norm())
        .collect()
}

/// Per-body Euclidean norms of `F_i - lambda grad I_i`.
pub fn cc_residual(config: &Configuration, lambda: f64) -> Result<CCReport> {
    cc_residual_with(config, lambda, &Tolerances::default())
}

pub fn cc_residual_with(config: &Configuration, lambda: f64, tol: &Tolerances) -> Result<CCReport> {
    let per = residuals_from(&grad_u(config)?, &grad_i(config), lambda);
    let inf = per.iter().copied().fold(0.0, f64::max);
    Ok(CCReport {
        lambda,
        residual_inf: inf,
        residual_per_body: per,
        is_special: lambda.abs() < tol.lambda_tol && inf < tol.cc_tol,
        dim_class: None,
        common_phi: None,
    })
}

/// Fitted (or supplied) `lambda`, residuals, dimension class and common phase.
pub fn analyze(config: &Configuration, lambda: Option<f64>, tol: &Tolerances) -> Result<CCReport> {
    let lambda = match lambda {
        Some(l) => l,
        None => fit_lambda(config)?.lambda,
    };
    let mut report = cc_residual_with(config, lambda, tol)?;
    report.dim_class = classify_dimension(config, tol.rank_tol).ok();
    report.common_phi = common_phi(config, tol.coplanar_tol);
    Ok(report)
}

/// Numerical rank of the 4 x N position matrix.
pub fn position_rank(config: &Configuration, rank_tol: f64) -> usize {
    let q = config.positions();
    let m = DMatrix::from_fn(4, q.len(), |r, c| q[c][r]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rank_tol * top).count()
}

/// Smallest great (hyperbolic) sphere containing the bodies: a geodesic is a
/// 2-plane section, a 2-sphere a 3-plane section.
pub fn classify_dimension(config: &Configuration, rank_tol: f64) -> Result<DimClass> {
    match position_rank(config, rank_tol) {
        2 => Ok(DimClass::Geodesic),
        3 => Ok(DimClass::TwoDimensional),
        4 => Ok(DimClass::ThreeDimensional),
        rank => Err(Error::DegenerateConfig { rank }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NecessarySums {
    /// Zero where undefined.
    pub values: Vec<f64>,
    pub defined_mask: Vec<bool>,
}

impl NecessarySums {
    /// `(body, value)` for the bodies with a defined phase.
    pub fn defined(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.defined_mask)
            .enumerate()
            .filter(|(_, (_, &d))| d)
            .map(|(i, (&v, _))| (i, v))
    }

    pub fn max_abs(&self) -> f64 {
        self.defined().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }
}

/// Component of `F_i` normal to the zw-phase plane through `q_i`:
/// `sum_j m_i m_j rho_j sn(phi_j - phi_i) / sn^3(d_ij)`.
///
/// At a central configuration these vanish, because `grad I_i` has no
/// component in that direction.
pub fn necessary_sums(config: &Configuration) -> Result<NecessarySums> {
    let sign = config.sign();
    let q = config.positions();
    let m = config.masses();
    let polar: Vec<_> = q.iter().map(|&p| polar_zw(p, sign, RHO_TOL)).collect();
    let sn = |x: f64| match sign {
        Sign::Spherical => x.sin(),
        Sign::Hyperbolic => x.sinh(),
    };
    let n = config.len();
    let mut values = vec![0.0; n];
    let mut mask = vec![false; n];
    for i in 0..n {
        let Some(phi_i) = polar[i].phi else { continue };
        mask[i] = true;
        let mut acc = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let Some(phi_j) = polar[j].phi else { continue };
            let (_, s) = pair_trig(q[i], q[j], sign).map_err(|e| e.at_pair(i, j))?;
            acc += m[i] * m[j] * polar[j].rho * sn(phi_j - phi_i) / (s * s * s);
        }
        values[i] = acc;
    }
    Ok(NecessarySums {
        values,
        defined_mask: mask,
    })
}

/// Shared zw phase of all bodies, if any: the bodies then lie on the
/// 2-sphere `{cos(phi) z = sin(phi) w}` (sphere) or `{cosh(phi) z = sinh(phi) w}`
/// (hyperbolic).
///
/// On S^3 phases are compared modulo pi, since `phi` and `phi + pi` lie in the
/// same plane; bodies with undefined phase are compatible with every plane.
pub fn common_phi(config: &Configuration, tol: f64) -> Option<f64> {
    let sign = config.sign();
    let polar: Vec<_> = config
        .positions()
        .iter()
        .map(|&p| polar_zw(p, sign, RHO_TOL))
        .filter_map(|p| p.phi.map(|phi| (p.rho, phi)))
        .collect();
    if polar.is_empty() {
        return Some(0.0);
    }
    let phis: Vec<(f64, f64)> = match sign {
        Sign::Hyperbolic => polar,
        Sign::Spherical => {
            let (_, reference) =
                polar.iter().copied().fold(
                    (f64::NEG_INFINITY, 0.0),
                    |a, b| if b.0 > a.0 { b } else { a },
                );
            polar
                .iter()
                .map(|&(rho, phi)| {
                    let d = wrap_pi(2.0 * (phi - reference)) / 2.0;
                    (rho, reference + d)
                })
                .collect()
        }
    };
    let wsum: f64 = phis.iter().map(|p| p.0).sum();
    let mean = phis.iter().map(|p| p.0 * p.1).sum::<f64>() / wsum;
    let spread = phis.iter().map(|p| (p.1 - mean).abs()).fold(0.0, f64::max);
    (spread < tol).then_some(match sign {
        Sign::Spherical => wrap_pi(mean),
        Sign::Hyperbolic => mean,
    })
}

/// Boost a coplanar hyperbolic configuration onto `H^2_xyw` (`z = 0`).
pub fn normalize_to_h2xyw(config: &Configuration) -> Result<(Configuration, GroupElement)> {
    normalize_to_h2xyw_with(config, Tolerances::default().coplanar_tol)
}

pub fn normalize_to_h2xyw_with(
    config: &Configuration,
    tol: f64,
) -> Result<(Configuration, GroupElement)> {
    if config.sign() != Sign::Hyperbolic {
        return Err(Error::WrongSign { expected: -1 });
    }
    let phi = common_phi(config, tol).ok_or(Error::NotCoplanar)?;
    let g = GroupElement::new(0.0, phi, Sign::Hyperbolic);
    Ok((config.transformed(g), g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::AmbientVector as V;

    fn h2_triangle() -> Configuration {
        let pts = [(0.3, 0.1), (-0.4, 0.5), (0.2, -0.6)];
        let q = pts
            .iter()
            .map(|&(x, y)| V::new(x, y, 0.0, (1.0f64 + x * x + y * y).sqrt()))
            .collect();
        Configuration::new(Sign::Hyperbolic, vec![1.0, 2.0, 0.5], q).unwrap()
    }

    #[test]
    fn dim_classes() {
        let q = vec![V::new(1.0, 0.0, 0.0, 0.0), V::new(0.0, 1.0, 0.0, 0.0)];
        let c = Configuration::new(Sign::Spherical, vec![1.0, 1.0], q).unwrap();
        assert_eq!(classify_dimension(&c, 1e-8), Ok(DimClass::Geodesic));
        assert_eq!(
            classify_dimension(&h2_triangle(), 1e-8),
            Ok(DimClass::TwoDimensional)
        );
        let one = Configuration::new(Sign::Spherical, vec![1.0], vec![V::new(1.0, 0.0, 0.0, 0.0)])
            .unwrap();
        assert_eq!(
            classify_dimension(&one, 1e-8),
            Err(Error::DegenerateConfig { rank: 1 })
        );
    }

    #[test]
    fn common_phi_on_h2xyw_and_boosts() {
        let c = h2_triangle();
        assert_eq!(common_phi(&c, 1e-8), Some(0.0));
        let (n, g) = normalize_to_h2xyw(&c).unwrap();
        assert!(g.is_identity());
        assert_eq!(n, c);

        let boosted = c.transformed(GroupElement::new(0.3, -0.7, Sign::Hyperbolic));
        let phi = common_phi(&boosted, 1e-8).unwrap();
        assert!((phi - 0.7).abs() < 1e-12);
        let (back, _) = normalize_to_h2xyw(&boosted).unwrap();
        assert!(back.positions().iter().all(|q| q.z.abs() < 1e-12));
    }

    #[test]
    fn normalize_requires_hyperbolic_and_coplanar() {
        let q = vec![V::new(1.0, 0.0, 0.0, 0.0), V::new(0.0, 1.0, 0.0, 0.0)];
        let c = Configuration::new(Sign::Spherical, vec![1.0, 1.0], q).unwrap();
        assert_eq!(
            normalize_to_h2xyw(&c),
            Err(Error::WrongSign { expected: -1 })
        );

        let mk = |x: f64, z: f64| V::new(x, 0.0, z, (1.0 + x * x + z * z).sqrt());
        let c = Configuration::new(
            Sign::Hyperbolic,
            vec![1.0, 1.0, 1.0],
            vec![mk(0.5, 0.0), mk(-0.5, 0.0), mk(0.0, 0.8)],
        )
        .unwrap();
        assert_eq!(common_phi(&c, 1e-8), None);
        assert_eq!(normalize_to_h2xyw(&c), Err(Error::NotCoplanar));
    }

    #[test]
    fn sums_vanish_at_common_phase() {
        let s = necessary_sums(&h2_triangle()).unwrap();
        assert!(s.defined_mask.iter().all(|&d| d));
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sums_negative_for_top_rapidity() {
        let q = [(0.4, 0.9), (-0.3, 0.2), (0.1, -0.5)]
            .iter()
            .map(|&(x, phi): &(f64, f64)| {
                let rho = (1.0 + x * x + 0.01f64).sqrt();
                V::new(x, 0.1, rho * phi.sinh(), rho * phi.cosh())
            })
            .collect();
        let c = Configuration::new(Sign::Hyperbolic, vec![1.0, 2.0, 3.0], q).unwrap();
        let s = necessary_sums(&c).unwrap();
        assert!(s.values[0] < 0.0);
        assert!(s.values[2] > 0.0);
    }

    #[test]
    fn degenerate_fit() {
        let th = 0.3f64;
        let c = Configuration::new(
            Sign::Spherical,
            vec![1.0, 1.0],
            vec![
                V::new(0.0, 0.0, th.cos(), th.sin()),
                V::new(0.0, 0.0, -th.sin(), th.cos()),
            ],
        )
        .unwrap();
        let fit = fit_lambda(&c).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.lambda, 0.0);
    }
}
