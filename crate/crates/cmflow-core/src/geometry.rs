//! Ambient Cartan-Hadamard model spaces.
//!
//! Three variants ship: Euclidean space, hyperbolic space of curvature
//! -kappa0^2 in the hyperboloid (Minkowski) model, and a rotationally
//! symmetric 2-D warped product dr^2 + phi(r)^2 dtheta^2. Distance,
//! the comparison functions ct_kappa / f_kappa, and the Laplacian/Hessian
//! of the distance function are all exact closed forms here; that is what
//! the monotonicity quantities downstream rely on.
//!
//! Hyperbolic points live on the hyperboloid <x,x>_Mink = -1/kappa0^2 with
//! positive time coordinate. The hyperboloid model is used instead of the
//! Poincare ball so that distances, geodesics, and transports stay
//! closed-form without boundary conditioning; points are renormalized onto
//! the hyperboloid after every arithmetic step.

use crate::error::{CmError, Result};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub type Coords = SmallVec<[f64; 4]>;

/// kappa*coth(kappa*r) for kappa > 0, 1/r for kappa = 0.
pub fn ct_kappa(kappa: f64, r: f64) -> f64 {
    if kappa == 0.0 {
        1.0 / r
    } else {
        let kr = kappa * r;
        if kr < 1e-4 {
            // coth(x) = 1/x + x/3 - x^3/45 + ...
            1.0 / r + kappa * kr / 3.0 - kappa * kr * kr * kr / 45.0
        } else {
            kappa / kr.tanh()
        }
    }
}

/// (cosh(kappa*r) - 1)/kappa^2 for kappa > 0, r^2/2 for kappa = 0.
pub fn f_kappa(kappa: f64, r: f64) -> f64 {
    if kappa == 0.0 {
        0.5 * r * r
    } else {
        let kr = kappa * r;
        // cosh(x) - 1 = 2 sinh^2(x/2), stable near 0
        2.0 * (0.5 * kr).sinh().powi(2) / (kappa * kappa)
    }
}

/// Metric radius of the geodesic sphere: sinh(kappa*r)/kappa, or r at kappa = 0.
pub fn s_kappa(kappa: f64, r: f64) -> f64 {
    if kappa == 0.0 {
        r
    } else {
        (kappa * r).sinh() / kappa
    }
}

/// log(sinh(x)/x), stable for all x >= 0.
pub fn ln_sinhc(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        (x2 / 6.0) * (1.0 - x2 / 20.0)
    } else if x < 20.0 {
        (x.sinh() / x).ln()
    } else {
        // sinh x = e^x (1 - e^{-2x})/2
        x - x.ln() + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// Surface area of the unit k-sphere in R^{k+1}: omega_0 = 2, omega_1 = 2*pi, ...
pub fn unit_sphere_area(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        4 => 8.0 * PI * PI / 3.0,
        5 => PI * PI * PI,
        _ => {
            // omega_k = 2 pi^{(k+1)/2} / Gamma((k+1)/2), recurse via omega_k = 2 pi omega_{k-2}/ (k-1)
            2.0 * PI * unit_sphere_area(k - 2) / (k as f64 - 1.0)
        }
    }
}

/// Warping profiles for the 2-D rotationally symmetric variant.
///
/// Only analytic callables with explicit derivatives; two profiles ship.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WarpedProfile {
    /// phi(r) = r * exp(r^4/4): complete, Gauss curvature -(5r^2 + r^6),
    /// geodesic circles have curvature 1/R + R^3.
    BlossomExp,
    /// phi(r) = sinh(kappa0 r)/kappa0: the hyperbolic plane of curvature
    /// -kappa0^2 in polar coordinates, used for validation.
    Sinh { kappa0: f64 },
}

impl WarpedProfile {
    pub fn phi(&self, r: f64) -> f64 {
        match self {
            WarpedProfile::BlossomExp => r * (0.25 * r.powi(4)).exp(),
            WarpedProfile::Sinh { kappa0 } => s_kappa(*kappa0, r),
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        match self {
            WarpedProfile::BlossomExp => (1.0 + r.powi(4)) * (0.25 * r.powi(4)).exp(),
            WarpedProfile::Sinh { kappa0 } => (kappa0 * r).cosh(),
        }
    }

    pub fn d2phi(&self, r: f64) -> f64 {
        match self {
            WarpedProfile::BlossomExp => r.powi(3) * (5.0 + r.powi(4)) * (0.25 * r.powi(4)).exp(),
            WarpedProfile::Sinh { kappa0 } => kappa0 * (kappa0 * r).sinh(),
        }
    }
}

/// An ambient Cartan-Hadamard geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ModelSpace {
    Euclidean { dim: usize },
    Hyperbolic { dim: usize, kappa0: f64 },
    Warped2d { profile: WarpedProfile },
}

/// A point of a `ModelSpace`: Cartesian coordinates (Euclidean), Minkowski
/// hyperboloid coordinates (Hyperbolic, one extra coordinate), or polar
/// (r, theta) for the warped variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub coords: Coords,
}

impl AmbientPoint {
    pub fn new(coords: impl Into<Coords>) -> Self {
        AmbientPoint {
            coords: coords.into(),
        }
    }

    pub fn from_slice(c: &[f64]) -> Self {
        AmbientPoint {
            coords: SmallVec::from_slice(c),
        }
    }
}

/// An orthonormal frame at a point: tangent vectors span the submanifold
/// directions, normal vectors the rest. All vectors are ambient-coordinate
/// vectors, orthonormal in the variant's metric.
#[derive(Debug, Clone)]
pub struct Frame {
    pub base: AmbientPoint,
    pub tangent_vectors: Vec<Coords>,
    pub normal_vectors: Vec<Coords>,
}

impl ModelSpace {
    pub fn euclidean(dim: usize) -> Self {
        ModelSpace::Euclidean { dim }
    }

    pub fn hyperbolic(dim: usize, kappa0: f64) -> Self {
        ModelSpace::Hyperbolic { dim, kappa0 }
    }

    pub fn warped(profile: WarpedProfile) -> Self {
        ModelSpace::Warped2d { profile }
    }

    /// Manifold dimension m.
    pub fn dim(&self) -> usize {
        match self {
            ModelSpace::Euclidean { dim } => *dim,
            ModelSpace::Hyperbolic { dim, .. } => *dim,
            ModelSpace::Warped2d { .. } => 2,
        }
    }

    /// Number of ambient coordinates a point carries.
    pub fn coord_len(&self) -> usize {
        match self {
            ModelSpace::Euclidean { dim } => *dim,
            ModelSpace::Hyperbolic { dim, .. } => dim + 1,
            ModelSpace::Warped2d { .. } => 2,
        }
    }

    /// Upper curvature bound -kappa0^2 as the kappa0 value (0 for Euclidean;
    /// 0 for the shipped warped profiles, whose curvature tends to 0 at the
    /// pole).
    pub fn kappa0(&self) -> f64 {
        match self {
            ModelSpace::Euclidean { .. } => 0.0,
            ModelSpace::Hyperbolic { kappa0, .. } => *kappa0,
            ModelSpace::Warped2d { profile } => match profile {
                WarpedProfile::BlossomExp => 0.0,
                WarpedProfile::Sinh { kappa0 } => *kappa0,
            },
        }
    }

    /// The distinguished origin: 0 in Euclidean space, the hyperboloid apex,
    /// the pole of the warped product.
    pub fn origin(&self) -> AmbientPoint {
        match self {
            ModelSpace::Euclidean { dim } => {
                AmbientPoint::new(SmallVec::from_elem(0.0, *dim))
            }
            ModelSpace::Hyperbolic { dim, kappa0 } => {
                let mut c = SmallVec::from_elem(0.0, dim + 1);
                c[0] = 1.0 / kappa0;
                AmbientPoint::new(c)
            }
            ModelSpace::Warped2d { .. } => AmbientPoint::from_slice(&[0.0, 0.0]),
        }
    }

    /// Minkowski inner product (Hyperbolic) or Euclidean dot product of
    /// ambient coordinate vectors.
    pub fn ambient_dot(&self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            ModelSpace::Hyperbolic { .. } => {
                let mut acc = -u[0] * v[0];
                for i in 1..u.len() {
                    acc += u[i] * v[i];
                }
                acc
            }
            _ => u.iter().zip(v).map(|(a, b)| a * b).sum(),
        }
    }

    /// Metric inner product of tangent vectors at `at`. For the warped
    /// variant the vectors are (dr, dtheta) components.
    pub fn dot(&self, at: &AmbientPoint, u: &[f64], v: &[f64]) -> f64 {
        match self {
            ModelSpace::Warped2d { profile } => {
                let phi = profile.phi(at.coords[0]);
                u[0] * v[0] + phi * phi * u[1] * v[1]
            }
            _ => self.ambient_dot(u, v),
        }
    }

    pub fn norm(&self, at: &AmbientPoint, u: &[f64]) -> f64 {
        self.dot(at, u, u).max(0.0).sqrt()
    }

    /// Validate a point against the variant constraint.
    pub fn check_point(&self, x: &AmbientPoint) -> Result<()> {
        if x.coords.len() != self.coord_len() {
            return Err(CmError::Domain(format!(
                "point has {} coordinates, space needs {}",
                x.coords.len(),
                self.coord_len()
            )));
        }
        if let ModelSpace::Hyperbolic { kappa0, .. } = self {
            let q = self.ambient_dot(&x.coords, &x.coords);
            let target = -1.0 / (kappa0 * kappa0);
            if ((q - target) / target).abs() > 1e-9 || x.coords[0] <= 0.0 {
                return Err(CmError::Domain(format!(
                    "point off the hyperboloid: <x,x> = {q}, expected {target}"
                )));
            }
        }
        if let ModelSpace::Warped2d { .. } = self {
            if x.coords[0] < 0.0 {
                return Err(CmError::Domain("warped radial coordinate < 0".into()));
            }
        }
        Ok(())
    }

    /// Rescale a near-hyperboloid point exactly onto the hyperboloid.
    pub fn renormalize(&self, x: &mut AmbientPoint) {
        if let ModelSpace::Hyperbolic { kappa0, .. } = self {
            let q = -self.ambient_dot(&x.coords, &x.coords);
            if q > 0.0 {
                let scale = 1.0 / (kappa0 * q.sqrt());
                for c in x.coords.iter_mut() {
                    *c *= scale;
                }
            }
        }
    }

    /// Geodesic distance. Warped pairs are supported only when one argument
    /// is the pole.
    pub fn distance(&self, x: &AmbientPoint, y: &AmbientPoint) -> Result<f64> {
        match self {
            ModelSpace::Euclidean { .. } => Ok(x
                .coords
                .iter()
                .zip(&y.coords)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()),
            ModelSpace::Hyperbolic { kappa0, .. } => {
                let c = -kappa0 * kappa0 * self.ambient_dot(&x.coords, &y.coords);
                // c = cosh(kappa0 * d) >= 1 up to rounding
                Ok(stable_acosh(c.max(1.0)) / kappa0)
            }
            ModelSpace::Warped2d { .. } => {
                let rx = x.coords[0];
                let ry = y.coords[0];
                if rx == 0.0 {
                    Ok(ry)
                } else if ry == 0.0 {
                    Ok(rx)
                } else {
                    Err(CmError::UnsupportedPair(
                        "warped distance requires one argument at the pole".into(),
                    ))
                }
            }
        }
    }

    /// Unit gradient of rho = dist(., x0) at x, as an ambient vector
    /// (a (dr, dtheta) pair for the warped variant).
    pub fn grad_rho(&self, x0: &AmbientPoint, x: &AmbientPoint) -> Result<Coords> {
        let rho = self.distance(x0, x)?;
        if rho < 1e-14 {
            return Err(CmError::CoincidentPoints);
        }
        match self {
            ModelSpace::Euclidean { .. } => {
                let mut g: Coords = x.coords.clone();
                for (gi, x0i) in g.iter_mut().zip(&x0.coords) {
                    *gi = (*gi - x0i) / rho;
                }
                Ok(g)
            }
            ModelSpace::Hyperbolic { kappa0, .. } => {
                // grad rho = kappa0 (cosh(kappa0 rho) x - x0) / sinh(kappa0 rho)
                let kr = kappa0 * rho;
                let (ch, sh) = (kr.cosh(), kr.sinh());
                let mut g: Coords = x.coords.clone();
                for (gi, x0i) in g.iter_mut().zip(&x0.coords) {
                    *gi = kappa0 * (ch * *gi - x0i) / sh;
                }
                Ok(g)
            }
            ModelSpace::Warped2d { .. } => {
                if x0.coords[0] != 0.0 {
                    return Err(CmError::UnsupportedPair(
                        "warped grad_rho requires x0 at the pole".into(),
                    ));
                }
                Ok(SmallVec::from_slice(&[1.0, 0.0]))
            }
        }
    }

    /// Laplacian of the distance function at x: (m-1) ct_{kappa0}(rho) in
    /// space forms, phi'(rho)/phi(rho) in the warped plane (x0 = pole).
    pub fn laplacian_rho(&self, x0: &AmbientPoint, x: &AmbientPoint) -> Result<f64> {
        let rho = self.distance(x0, x)?;
        if rho < 1e-14 {
            return Err(CmError::CoincidentPoints);
        }
        match self {
            ModelSpace::Euclidean { dim } => Ok((*dim as f64 - 1.0) / rho),
            ModelSpace::Hyperbolic { dim, kappa0 } => {
                Ok((*dim as f64 - 1.0) * ct_kappa(*kappa0, rho))
            }
            ModelSpace::Warped2d { profile } => {
                if x0.coords[0] != 0.0 {
                    return Err(CmError::UnsupportedPair(
                        "warped laplacian_rho requires x0 at the pole".into(),
                    ));
                }
                Ok(profile.dphi(rho) / profile.phi(rho))
            }
        }
    }

    /// Hessian of rho evaluated on (v, v): ct_{kappa0}(rho) (|v|^2 - drho(v)^2)
    /// in space forms. Unsupported for the warped variant.
    pub fn hessian_rho(&self, x0: &AmbientPoint, x: &AmbientPoint, v: &[f64]) -> Result<f64> {
        let rho = self.distance(x0, x)?;
        if rho < 1e-14 {
            return Err(CmError::CoincidentPoints);
        }
        match self {
            ModelSpace::Warped2d { .. } => Err(CmError::UnsupportedPair(
                "hessian_rho is only available in space forms".into(),
            )),
            _ => {
                let grad = self.grad_rho(x0, x)?;
                let vv = self.dot(x, v, v);
                let dv = self.dot(x, &grad, v);
                Ok(ct_kappa(self.kappa0_of_form(), rho) * (vv - dv * dv))
            }
        }
    }

    fn kappa0_of_form(&self) -> f64 {
        match self {
            ModelSpace::Euclidean { .. } => 0.0,
            ModelSpace::Hyperbolic { kappa0, .. } => *kappa0,
            ModelSpace::Warped2d { .. } => 0.0,
        }
    }

    /// Sectional curvature at x (constant for space forms; -phi''/phi for the
    /// warped plane, by limit 0 at the pole for the blossoming profile).
    pub fn sectional_curvature(&self, x: &AmbientPoint) -> f64 {
        match self {
            ModelSpace::Euclidean { .. } => 0.0,
            ModelSpace::Hyperbolic { kappa0, .. } => -kappa0 * kappa0,
            ModelSpace::Warped2d { profile } => {
                let r = x.coords[0];
                match profile {
                    WarpedProfile::BlossomExp => -(5.0 * r * r + r.powi(6)),
                    WarpedProfile::Sinh { kappa0 } => -kappa0 * kappa0,
                }
            }
        }
    }

    /// Exponential map at `base` applied to the tangent vector `v`.
    pub fn exp_map(&self, base: &AmbientPoint, v: &[f64]) -> Result<AmbientPoint> {
        match self {
            ModelSpace::Euclidean { .. } => {
                let mut c = base.coords.clone();
                for (ci, vi) in c.iter_mut().zip(v) {
                    *ci += vi;
                }
                Ok(AmbientPoint::new(c))
            }
            ModelSpace::Hyperbolic { kappa0, .. } => {
                let norm = self.ambient_dot(v, v).max(0.0).sqrt();
                if norm < 1e-300 {
                    return Ok(base.clone());
                }
                let kn = kappa0 * norm;
                let (ch, shc) = (kn.cosh(), kn.sinh() / kn);
                let mut c = base.coords.clone();
                for (ci, vi) in c.iter_mut().zip(v) {
                    *ci = ch * *ci + shc * vi;
                }
                let mut p = AmbientPoint::new(c);
                self.renormalize(&mut p);
                Ok(p)
            }
            ModelSpace::Warped2d { .. } => Err(CmError::UnsupportedPair(
                "exp_map unsupported in the warped plane".into(),
            )),
        }
    }

    /// Inverse of the exponential map: the tangent vector at `base` pointing
    /// to `target` with length dist(base, target).
    pub fn log_map(&self, base: &AmbientPoint, target: &AmbientPoint) -> Result<Coords> {
        match self {
            ModelSpace::Euclidean { .. } => {
                let mut v: Coords = target.coords.clone();
                for (vi, bi) in v.iter_mut().zip(&base.coords) {
                    *vi -= bi;
                }
                Ok(v)
            }
            ModelSpace::Hyperbolic { kappa0, .. } => {
                let rho = self.distance(base, target)?;
                if rho < 1e-15 {
                    return Ok(SmallVec::from_elem(0.0, base.coords.len()));
                }
                let kr = kappa0 * rho;
                let (ch, sh) = (kr.cosh(), kr.sinh());
                // target = cosh(kr) base + sinh(kr)/ (kappa0) u  with |u| = 1
                let mut v: Coords = target.coords.clone();
                for (vi, bi) in v.iter_mut().zip(&base.coords) {
                    *vi = (*vi - ch * bi) * kappa0 * rho / sh;
                }
                Ok(v)
            }
            ModelSpace::Warped2d { .. } => Err(CmError::UnsupportedPair(
                "log_map unsupported in the warped plane".into(),
            )),
        }
    }

    /// An orthonormal tangent basis at `base` (metric orthonormal).
    pub fn tangent_basis(&self, base: &AmbientPoint) -> Vec<Coords> {
        match self {
            ModelSpace::Euclidean { dim } => (0..*dim)
                .map(|i| {
                    let mut e = SmallVec::from_elem(0.0, *dim);
                    e[i] = 1.0;
                    e
                })
                .collect(),
            ModelSpace::Hyperbolic { dim, kappa0 } => {
                // Gram-Schmidt the coordinate directions against the Minkowski
                // normal (the point itself).
                let m = *dim;
                let mut basis: Vec<Coords> = Vec::with_capacity(m);
                let xx = -1.0 / (kappa0 * kappa0);
                for i in 1..=m {
                    let mut e: Coords = SmallVec::from_elem(0.0, m + 1);
                    e[i] = 1.0;
                    // project out the normal component
                    let xn = self.ambient_dot(&e, &base.coords) / xx;
                    for (ei, bi) in e.iter_mut().zip(&base.coords) {
                        *ei -= xn * bi;
                    }
                    for b in &basis {
                        let c = self.ambient_dot(&e, b);
                        for (ei, bi) in e.iter_mut().zip(b.iter()) {
                            *ei -= c * bi;
                        }
                    }
                    let n = self.ambient_dot(&e, &e).max(0.0).sqrt();
                    for ei in e.iter_mut() {
                        *ei /= n;
                    }
                    basis.push(e);
                }
                basis
            }
            ModelSpace::Warped2d { profile } => {
                let phi = profile.phi(base.coords[0]);
                let mut b = vec![SmallVec::from_slice(&[1.0, 0.0])];
                if phi > 0.0 {
                    b.push(SmallVec::from_slice(&[0.0, 1.0 / phi]));
                }
                b
            }
        }
    }
}

/// acosh with full precision near 1.
pub fn stable_acosh(c: f64) -> f64 {
    debug_assert!(c >= 1.0);
    let e = c - 1.0;
    if e < 1e-4 {
        // acosh(1+e) = sqrt(2e) (1 - e/12 + 3 e^2/160)
        let s = (2.0 * e).sqrt();
        s * (1.0 - e / 12.0 + 3.0 * e * e / 160.0)
    } else {
        (e * (c + 1.0)).sqrt().asinh()
    }
}

/// An isometry of a space form, stored as an ambient linear map plus a
/// translation (the translation is zero in the hyperboloid model, where
/// isometries are Lorentz transformations).
#[derive(Debug, Clone)]
pub struct Isometry {
    pub matrix: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        let mut matrix = vec![vec![0.0; n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Isometry {
            matrix,
            translation: vec![0.0; n],
        }
    }

    /// Lorentz boost of rapidity `a` in the (0, axis) plane of the hyperboloid.
    pub fn boost(n: usize, axis: usize, a: f64) -> Self {
        let mut iso = Isometry::identity(n);
        iso.matrix[0][0] = a.cosh();
        iso.matrix[0][axis] = a.sinh();
        iso.matrix[axis][0] = a.sinh();
        iso.matrix[axis][axis] = a.cosh();
        iso
    }

    /// Rotation by `theta` in the (i, j) coordinate plane.
    pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut iso = Isometry::identity(n);
        iso.matrix[i][i] = theta.cos();
        iso.matrix[j][j] = theta.cos();
        iso.matrix[i][j] = -theta.sin();
        iso.matrix[j][i] = theta.sin();
        iso
    }

    /// Pure translation (Euclidean spaces).
    pub fn translation_by(t: &[f64]) -> Self {
        let mut iso = Isometry::identity(t.len());
        iso.translation = t.to_vec();
        iso
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        let n = self.matrix.len();
        let mut matrix = vec![vec![0.0; n]; n];
        let mut translation = self.translation.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    matrix[i][j] += self.matrix[i][k] * other.matrix[k][j];
                }
                translation[i] += self.matrix[i][j] * other.translation[j];
            }
        }
        Isometry {
            matrix,
            translation,
        }
    }

    pub fn apply(&self, space: &ModelSpace, x: &AmbientPoint) -> AmbientPoint {
        let n = x.coords.len();
        let mut c: Coords = SmallVec::from_elem(0.0, n);
        for i in 0..n {
            let mut acc = self.translation[i];
            for j in 0..n {
                acc += self.matrix[i][j] * x.coords[j];
            }
            c[i] = acc;
        }
        let mut p = AmbientPoint::new(c);
        space.renormalize(&mut p);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn random_hyperbolic_point(
        space: &ModelSpace,
        rng: &mut impl Rng,
        scale: f64,
    ) -> AmbientPoint {
        let m = space.dim();
        let v: Vec<f64> = (0..=m)
            .map(|i| if i == 0 { 0.0 } else { rng.gen_range(-scale..scale) })
            .collect();
        space.exp_map(&space.origin(), &v).unwrap()
    }

    #[test]
    fn euclidean_distance() {
        let sp = ModelSpace::euclidean(2);
        let d = sp
            .distance(
                &AmbientPoint::from_slice(&[0.0, 0.0]),
                &AmbientPoint::from_slice(&[3.0, 4.0]),
            )
            .unwrap();
        assert_relative_eq!(d, 5.0);
    }

    #[test]
    fn hyperbolic_unit_speed_geodesic() {
        let sp = ModelSpace::hyperbolic(2, 1.0);
        let x0 = AmbientPoint::from_slice(&[1.0, 0.0, 0.0]);
        let x1 = AmbientPoint::from_slice(&[1.0f64.cosh(), 1.0f64.sinh(), 0.0]);
        assert_relative_eq!(sp.distance(&x0, &x1).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn warped_pole_distance_and_errors() {
        let sp = ModelSpace::warped(WarpedProfile::BlossomExp);
        let pole = sp.origin();
        let p = AmbientPoint::from_slice(&[2.0, 0.7]);
        assert_relative_eq!(sp.distance(&pole, &p).unwrap(), 2.0);
        let q = AmbientPoint::from_slice(&[1.0, 0.0]);
        assert!(sp.distance(&p, &q).is_err());
    }

    #[test]
    fn grad_rho_matches_spec_example() {
        let sp = ModelSpace::hyperbolic(2, 1.0);
        let x0 = AmbientPoint::from_slice(&[1.0, 0.0, 0.0]);
        let x = AmbientPoint::from_slice(&[1.0f64.cosh(), 1.0f64.sinh(), 0.0]);
        let g = sp.grad_rho(&x0, &x).unwrap();
        assert_relative_eq!(g[0], 1.0f64.sinh(), max_relative = 1e-12);
        assert_relative_eq!(g[1], 1.0f64.cosh(), max_relative = 1e-12);
        assert_relative_eq!(g[2], 0.0);
        // Minkowski-unit and tangent to the hyperboloid
        assert_relative_eq!(sp.ambient_dot(&g, &g), 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            sp.ambient_dot(&g, &x.coords),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn grad_rho_matches_finite_differences_of_distance() {
        let sp = ModelSpace::hyperbolic(3, 0.7);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x0 = random_hyperbolic_point(&sp, &mut rng, 1.0);
            let x = random_hyperbolic_point(&sp, &mut rng, 1.0);
            if sp.distance(&x0, &x).unwrap() < 0.05 {
                continue;
            }
            let g = sp.grad_rho(&x0, &x).unwrap();
            for e in sp.tangent_basis(&x) {
                let num = crate::quad::richardson_d1(
                    |s| {
                        let mut v = e.clone();
                        for vi in v.iter_mut() {
                            *vi *= s;
                        }
                        let y = sp.exp_map(&x, &v).unwrap();
                        sp.distance(&x0, &y).unwrap()
                    },
                    0.0,
                    1e-3,
                );
                assert_relative_eq!(num, sp.ambient_dot(&g, &e), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn laplacian_and_hessian_closed_forms() {
        let sp = ModelSpace::hyperbolic(2, 1.0);
        let x0 = sp.origin();
        let x = sp.exp_map(&x0, &[0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(
            sp.laplacian_rho(&x0, &x).unwrap(),
            1.0 / 1.0f64.tanh(),
            max_relative = 1e-12
        );
        // v perpendicular to grad rho
        let g = sp.grad_rho(&x0, &x).unwrap();
        let basis = sp.tangent_basis(&x);
        let mut v = basis[1].clone();
        let c = sp.ambient_dot(&v, &g);
        for (vi, gi) in v.iter_mut().zip(g.iter()) {
            *vi -= c * gi;
        }
        let n = sp.ambient_dot(&v, &v).sqrt();
        for vi in v.iter_mut() {
            *vi /= n;
        }
        assert_relative_eq!(
            sp.hessian_rho(&x0, &x, &v).unwrap(),
            1.0 / 1.0f64.tanh(),
            max_relative = 1e-10
        );
        assert_relative_eq!(sp.hessian_rho(&x0, &x, &g).unwrap(), 0.0, epsilon = 1e-10);

        let se = ModelSpace::euclidean(3);
        let y0 = se.origin();
        let y = AmbientPoint::from_slice(&[2.0, 0.0, 0.0]);
        assert_relative_eq!(se.laplacian_rho(&y0, &y).unwrap(), 1.0);
        assert_relative_eq!(
            se.hessian_rho(&y0, &y, &[0.0, 1.0, 0.0]).unwrap(),
            0.5
        );
    }

    #[test]
    fn warped_blossom_formulas() {
        let sp = ModelSpace::warped(WarpedProfile::BlossomExp);
        let pole = sp.origin();
        let x = AmbientPoint::from_slice(&[1.0, 0.3]);
        // phi'/phi = 1/r + r^3 at r = 1  ->  2
        assert_relative_eq!(sp.laplacian_rho(&pole, &x).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(sp.sectional_curvature(&x), -6.0, max_relative = 1e-12);
        // curvature stays nonpositive, phi'' >= 0, and phi(0)=0, phi'(0)=1
        for i in 0..50 {
            let r = 0.05 + 0.1 * i as f64;
            let p = AmbientPoint::from_slice(&[r, 0.0]);
            assert!(sp.sectional_curvature(&p) <= 0.0);
            assert!(WarpedProfile::BlossomExp.d2phi(r) >= 0.0);
        }
        assert_relative_eq!(WarpedProfile::BlossomExp.phi(0.0), 0.0);
        assert_relative_eq!(WarpedProfile::BlossomExp.dphi(0.0), 1.0);
    }

    #[test]
    fn hyperbolic_sectional_curvature_constant() {
        let sp = ModelSpace::hyperbolic(3, 2.0);
        assert_relative_eq!(sp.sectional_curvature(&sp.origin()), -4.0);
    }

    #[test]
    fn triangle_inequality_random_triples() {
        for (sp, scale) in [
            (ModelSpace::euclidean(3), 2.0),
            (ModelSpace::hyperbolic(2, 1.0), 2.0),
            (ModelSpace::hyperbolic(3, 0.5), 3.0),
        ] {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            for _ in 0..200 {
                let a = random_hyperbolic_point(&sp, &mut rng, scale);
                let b = random_hyperbolic_point(&sp, &mut rng, scale);
                let c = random_hyperbolic_point(&sp, &mut rng, scale);
                let ab = sp.distance(&a, &b).unwrap();
                let bc = sp.distance(&b, &c).unwrap();
                let ac = sp.distance(&a, &c).unwrap();
                assert!(ac <= ab + bc + 1e-10);
                assert!(ab <= ac + bc + 1e-10);
            }
        }
    }

    #[test]
    fn grad_rho_is_unit() {
        let sp = ModelSpace::hyperbolic(3, 1.3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x0 = random_hyperbolic_point(&sp, &mut rng, 1.5);
            let x = random_hyperbolic_point(&sp, &mut rng, 1.5);
            if sp.distance(&x0, &x).unwrap() < 1e-3 {
                continue;
            }
            let g = sp.grad_rho(&x0, &x).unwrap();
            assert_relative_eq!(sp.dot(&x, &g, &g), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn hessian_equality_case_on_random_vectors() {
        // For space forms, hessian_rho(v,v) - ct(rho)(|v|^2 - drho(v)^2) = 0.
        let sp = ModelSpace::hyperbolic(3, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x0 = random_hyperbolic_point(&sp, &mut rng, 1.0);
            let x = random_hyperbolic_point(&sp, &mut rng, 1.0);
            let rho = sp.distance(&x0, &x).unwrap();
            if rho < 0.05 {
                continue;
            }
            let basis = sp.tangent_basis(&x);
            let mut v: Coords = SmallVec::from_elem(0.0, 4);
            for b in &basis {
                let c: f64 = rng.gen_range(-1.0..1.0);
                for (vi, bi) in v.iter_mut().zip(b.iter()) {
                    *vi += c * bi;
                }
            }
            let g = sp.grad_rho(&x0, &x).unwrap();
            let expected = ct_kappa(1.0, rho)
                * (sp.dot(&x, &v, &v) - sp.dot(&x, &g, &v).powi(2));
            assert_relative_eq!(
                sp.hessian_rho(&x0, &x, &v).unwrap(),
                expected,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn f_kappa_ode_on_grid() {
        // f'' = 1 + kappa^2 f, checked by finite differences
        for kappa in [0.0, 0.7, 1.0, 2.0] {
            for i in 1..40 {
                let r = 0.1 * i as f64;
                let d2 = crate::quad::richardson_d2(|x| f_kappa(kappa, x), r, 1e-2);
                assert_relative_eq!(
                    d2,
                    1.0 + kappa * kappa * f_kappa(kappa, r),
                    max_relative = 1e-9,
                    epsilon = 1e-9
                );
            }
        }
        // limits: ct_kappa -> 1/r and f_kappa -> r^2/2 as kappa -> 0
        assert_relative_eq!(ct_kappa(1e-8, 2.0), 0.5, max_relative = 1e-9);
        assert_relative_eq!(f_kappa(1e-8, 2.0), 2.0, max_relative = 1e-9);
    }

    #[test]
    fn exp_log_roundtrip() {
        let sp = ModelSpace::hyperbolic(2, 1.5);
        let base = sp.exp_map(&sp.origin(), &[0.0, 0.4, -0.2]).unwrap();
        let v = [0.0, 0.3, 0.8];
        // project v tangent first
        let basis = sp.tangent_basis(&base);
        let mut vt: Coords = SmallVec::from_elem(0.0, 3);
        for b in &basis {
            let c = sp.ambient_dot(&v, b);
            for (vi, bi) in vt.iter_mut().zip(b.iter()) {
                *vi += c * bi;
            }
        }
        let y = sp.exp_map(&base, &vt).unwrap();
        let back = sp.log_map(&base, &y).unwrap();
        for (a, b) in back.iter().zip(vt.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn isometry_preserves_distance() {
        let sp = ModelSpace::hyperbolic(2, 1.0);
        let iso = Isometry::boost(3, 1, 0.8).compose(&Isometry::rotation(3, 1, 2, 1.1));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = random_hyperbolic_point(&sp, &mut rng, 1.5);
            let b = random_hyperbolic_point(&sp, &mut rng, 1.5);
            let d0 = sp.distance(&a, &b).unwrap();
            let d1 = sp
                .distance(&iso.apply(&sp, &a), &iso.apply(&sp, &b))
                .unwrap();
            assert_relative_eq!(d0, d1, epsilon = 1e-11);
        }
    }
}
