//! Discretized submanifolds: geodesic spheres, polyline curves, and
//! surfaces of revolution, carrying quadrature weights, normal frames, and
//! mean curvature.
//!
//! Spheres are exact objects. They are never polygonized: their areas are
//! closed forms and every kernel integral over them reduces to a 1-D radial
//! quadrature (the integrand depends only on the polar angle toward the
//! kernel center). That makes them the oracles the discrete pipeline is
//! checked against.
//!
//! Polylines discretize curves (ambient dimension 2); revolution surfaces
//! discretize rotationally symmetric surfaces in 3-space by a profile
//! polyline in a totally geodesic half-plane slice, with all integrals
//! reduced to the profile times the rotational Jacobian.

use crate::error::{CmError, Result};
use crate::geometry::{ct_kappa, s_kappa, AmbientPoint, Coords, Frame, ModelSpace};
use crate::kernel::BackwardsKernel;
use crate::quad::gauss_legendre;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::f64::consts::PI;

pub const SCHEMA_SUBMANIFOLD: &str = "cmflow-sub-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Submanifold {
    GeodesicSphere {
        space: ModelSpace,
        center: AmbientPoint,
        radius: f64,
    },
    PolylineCurve {
        space: ModelSpace,
        vertices: Vec<AmbientPoint>,
        closed: bool,
    },
    /// Profile polyline in the slice {last coordinate = 0} of a 3-dimensional
    /// ambient space, rotated about the axis geodesic of the slice. Profile
    /// endpoints may sit on the axis (poles of a closed surface).
    RevolutionSurface {
        space: ModelSpace,
        profile: Vec<AmbientPoint>,
    },
}

/// One quadrature node of a discretized submanifold.
#[derive(Debug, Clone)]
pub struct QuadratureSample {
    pub point: AmbientPoint,
    /// Local area/length element; the weights sum to the total volume.
    pub weight: f64,
    pub normal_frame: Frame,
    pub mean_curvature_vector: Coords,
}

impl Submanifold {
    pub fn space(&self) -> &ModelSpace {
        match self {
            Submanifold::GeodesicSphere { space, .. } => space,
            Submanifold::PolylineCurve { space, .. } => space,
            Submanifold::RevolutionSurface { space, .. } => space,
        }
    }

    /// Intrinsic dimension n (the kernel dimension it pairs with).
    pub fn intrinsic_dim(&self) -> usize {
        match self {
            Submanifold::GeodesicSphere { space, .. } => space.dim() - 1,
            Submanifold::PolylineCurve { .. } => 1,
            Submanifold::RevolutionSurface { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Submanifold::GeodesicSphere {
                space,
                center,
                radius,
            } => {
                space.check_point(center)?;
                if !(*radius > 0.0) {
                    return Err(CmError::DegenerateGeometry(format!(
                        "sphere radius must be > 0, got {radius}"
                    )));
                }
                if let ModelSpace::Warped2d { .. } = space {
                    if center.coords[0] != 0.0 {
                        return Err(CmError::UnsupportedPair(
                            "warped circles must be centered at the pole".into(),
                        ));
                    }
                }
                Ok(())
            }
            Submanifold::PolylineCurve {
                space,
                vertices,
                closed,
            } => {
                if space.dim() != 2 {
                    return Err(CmError::DegenerateGeometry(
                        "polyline curves live in 2-dimensional ambient spaces".into(),
                    ));
                }
                let min_count = if *closed { 3 } else { 2 };
                if vertices.len() < min_count {
                    return Err(CmError::DegenerateGeometry(format!(
                        "polyline needs at least {min_count} vertices"
                    )));
                }
                for v in vertices {
                    space.check_point(v)?;
                }
                for (a, b) in segment_pairs(vertices, *closed) {
                    if space.distance(&vertices[a], &vertices[b])? < 1e-10 {
                        return Err(CmError::DegenerateGeometry(format!(
                            "polyline segment {a}-{b} collapsed below 1e-10"
                        )));
                    }
                }
                Ok(())
            }
            Submanifold::RevolutionSurface { space, profile } => {
                if space.dim() != 3 {
                    return Err(CmError::DegenerateGeometry(
                        "revolution surfaces need a 3-dimensional ambient space".into(),
                    ));
                }
                if matches!(space, ModelSpace::Warped2d { .. }) {
                    return Err(CmError::UnsupportedPair(
                        "revolution surfaces are supported in space forms only".into(),
                    ));
                }
                if profile.len() < 3 {
                    return Err(CmError::DegenerateGeometry(
                        "revolution profile needs at least 3 vertices".into(),
                    ));
                }
                for p in profile {
                    space.check_point(p)?;
                    if axis_distance(space, p) < -1e-12 {
                        return Err(CmError::DegenerateGeometry(
                            "profile crossed to negative axis distance".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Total volume (length/area) from closed forms where available.
    pub fn total_volume(&self) -> Result<f64> {
        match self {
            Submanifold::GeodesicSphere {
                space, radius: r, ..
            } => match space {
                ModelSpace::Euclidean { dim } => {
                    let n = dim - 1;
                    Ok(crate::geometry::unit_sphere_area(n) * r.powi(n as i32))
                }
                ModelSpace::Hyperbolic { dim, kappa0 } => {
                    let n = dim - 1;
                    Ok(crate::geometry::unit_sphere_area(n)
                        * s_kappa(*kappa0, *r).powi(n as i32))
                }
                ModelSpace::Warped2d { profile } => Ok(2.0 * PI * profile.phi(*r)),
            },
            Submanifold::PolylineCurve {
                space,
                vertices,
                closed,
            } => {
                let mut acc = 0.0;
                for (a, b) in segment_pairs(vertices, *closed) {
                    acc += space.distance(&vertices[a], &vertices[b])?;
                }
                Ok(acc)
            }
            Submanifold::RevolutionSurface { space, profile } => {
                let kappa0 = space.kappa0();
                let mut acc = 0.0;
                for w in profile.windows(2) {
                    let len = space.distance(&w[0], &w[1])?;
                    let dm = 0.5 * (axis_distance(space, &w[0]) + axis_distance(space, &w[1]));
                    acc += len * 2.0 * PI * s_kappa(kappa0, dm);
                }
                Ok(acc)
            }
        }
    }

    /// Discretize into quadrature samples. `resolution` controls the angular
    /// node count for spheres and the azimuthal count for revolution
    /// surfaces; polylines sample at their vertices.
    pub fn sample(&self, resolution: usize) -> Result<Vec<QuadratureSample>> {
        self.validate()?;
        if resolution < 8 {
            return Err(CmError::BadConfig(format!(
                "resolution must be >= 8, got {resolution}"
            )));
        }
        match self {
            Submanifold::GeodesicSphere {
                space,
                center,
                radius,
            } => sample_sphere(space, center, *radius, resolution),
            Submanifold::PolylineCurve {
                space,
                vertices,
                closed,
            } => sample_polyline(space, vertices, *closed),
            Submanifold::RevolutionSurface { space, profile } => {
                sample_revolution(space, profile, resolution)
            }
        }
    }

    /// Mean curvature vector at a sample index of `sample(resolution)`.
    pub fn mean_curvature(&self, resolution: usize, at: usize) -> Result<Coords> {
        let samples = self.sample(resolution)?;
        samples
            .get(at)
            .map(|s| s.mean_curvature_vector.clone())
            .ok_or_else(|| CmError::BadConfig(format!("sample index {at} out of range")))
    }

    /// Integral of the backwards kernel over the submanifold at time `t`.
    /// For spheres this is the exact 1-D radial reduction; discretized
    /// variants sum over quadrature samples.
    pub fn integrate_kernel(
        &self,
        bk: &BackwardsKernel,
        t: f64,
        resolution: usize,
    ) -> Result<f64> {
        if t >= bk.t0 {
            return Err(CmError::Domain(format!(
                "kernel integral needs t < t0 = {}, got {t}",
                bk.t0
            )));
        }
        if bk.evaluator.n() as usize != self.intrinsic_dim() {
            return Err(CmError::Domain(format!(
                "kernel dimension {} != submanifold dimension {}",
                bk.evaluator.n(),
                self.intrinsic_dim()
            )));
        }
        let tau = bk.t0 - t;
        match self {
            Submanifold::GeodesicSphere {
                space,
                center,
                radius,
            } => sphere_kernel_integral(space, center, *radius, bk, tau, resolution),
            _ => {
                let samples = self.sample(resolution)?;
                let mut acc = 0.0;
                for s in &samples {
                    let lp = bk.log_phi(t, &s.point)?;
                    acc += s.weight * lp.exp();
                }
                Ok(acc)
            }
        }
    }

    /// Sum of sample weights within geodesic distance `radius` of `x1`.
    pub fn volume_in_ball(
        &self,
        x1: &AmbientPoint,
        radius: f64,
        resolution: usize,
    ) -> Result<f64> {
        if radius <= 0.0 {
            return Ok(0.0);
        }
        let space = self.space();
        let samples = self.sample(resolution)?;
        let mut acc = 0.0;
        for s in &samples {
            if space.distance(x1, &s.point)? <= radius {
                acc += s.weight;
            }
        }
        Ok(acc)
    }

    /// Center and radius of a geodesic ball containing the submanifold.
    pub fn bounding_ball(&self) -> Result<(AmbientPoint, f64)> {
        match self {
            Submanifold::GeodesicSphere { center, radius, .. } => {
                Ok((center.clone(), *radius))
            }
            Submanifold::PolylineCurve {
                space, vertices, ..
            } => {
                let c = ambient_mean(space, vertices);
                let mut r: f64 = 0.0;
                for v in vertices {
                    r = r.max(space.distance(&c, v)?);
                }
                Ok((c, r))
            }
            Submanifold::RevolutionSurface { space, profile } => {
                let c = ambient_mean(space, profile);
                let mut r: f64 = 0.0;
                for v in profile {
                    r = r.max(space.distance(&c, v)?);
                }
                Ok((c, r))
            }
        }
    }

    /// Serialize to the versioned `cmflow-sub-v1` JSON document.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(self)?;
        v.as_object_mut()
            .expect("submanifold serializes to an object")
            .insert("schema".into(), SCHEMA_SUBMANIFOLD.into());
        Ok(v)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA_SUBMANIFOLD) => {}
            other => {
                return Err(CmError::BadConfig(format!(
                    "expected schema {SCHEMA_SUBMANIFOLD:?}, found {other:?}"
                )))
            }
        }
        let sub: Submanifold = serde_json::from_value(v.clone())?;
        sub.validate()?;
        Ok(sub)
    }

    /// Re-parameterize a polyline to near-uniform arclength (same vertex
    /// count). Other variants are returned unchanged.
    pub fn resample_uniform(&self) -> Result<Submanifold> {
        let Submanifold::PolylineCurve {
            space,
            vertices,
            closed,
        } = self
        else {
            return Ok(self.clone());
        };
        let n = vertices.len();
        let mut cum = vec![0.0f64];
        for (a, b) in segment_pairs(vertices, *closed) {
            let d = space.distance(&vertices[a], &vertices[b])?;
            cum.push(cum.last().unwrap() + d);
        }
        let total = *cum.last().unwrap();
        let segments = if *closed { n } else { n - 1 };
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let target = if *closed {
                total * i as f64 / n as f64
            } else {
                total * i as f64 / (n - 1) as f64
            };
            let mut k = match cum.binary_search_by(|c| c.total_cmp(&target)) {
                Ok(j) => j,
                Err(j) => j.saturating_sub(1),
            };
            if k >= segments {
                k = segments - 1;
            }
            let seg_len = cum[k + 1] - cum[k];
            let lambda = if seg_len > 0.0 {
                ((target - cum[k]) / seg_len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let a = &vertices[k];
            let b = &vertices[(k + 1) % n];
            out.push(geodesic_interpolate(space, a, b, lambda)?);
        }
        Ok(Submanifold::PolylineCurve {
            space: space.clone(),
            vertices: out,
            closed: *closed,
        })
    }

    /// Max/min segment-length ratio of a polyline (1.0 for other variants).
    pub fn segment_ratio(&self) -> Result<f64> {
        let Submanifold::PolylineCurve {
            space,
            vertices,
            closed,
        } = self
        else {
            return Ok(1.0);
        };
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (a, b) in segment_pairs(vertices, *closed) {
            let d = space.distance(&vertices[a], &vertices[b])?;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Ok(hi / lo)
    }
}

/// Point on the geodesic from `a` to `b` at parameter `lambda` in [0, 1].
pub fn geodesic_interpolate(
    space: &ModelSpace,
    a: &AmbientPoint,
    b: &AmbientPoint,
    lambda: f64,
) -> Result<AmbientPoint> {
    match space {
        ModelSpace::Euclidean { .. } => {
            let mut c = a.coords.clone();
            for (ci, (ai, bi)) in c.iter_mut().zip(a.coords.iter().zip(&b.coords)) {
                *ci = ai + lambda * (bi - ai);
            }
            Ok(AmbientPoint::new(c))
        }
        ModelSpace::Hyperbolic { .. } => {
            let v = space.log_map(a, b)?;
            let mut scaled = v;
            for vi in scaled.iter_mut() {
                *vi *= lambda;
            }
            space.exp_map(a, &scaled)
        }
        ModelSpace::Warped2d { .. } => Err(CmError::UnsupportedPair(
            "geodesic interpolation unsupported in the warped plane".into(),
        )),
    }
}

fn segment_pairs(vertices: &[AmbientPoint], closed: bool) -> Vec<(usize, usize)> {
    let n = vertices.len();
    let mut out: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if closed {
        out.push((n - 1, 0));
    }
    out
}

fn ambient_mean(space: &ModelSpace, pts: &[AmbientPoint]) -> AmbientPoint {
    if let ModelSpace::Warped2d { .. } = space {
        // only the pole is a usable center in the warped plane
        return space.origin();
    }
    let len = space.coord_len();
    let mut c: Coords = SmallVec::from_elem(0.0, len);
    for p in pts {
        for (ci, pi) in c.iter_mut().zip(&p.coords) {
            *ci += pi / pts.len() as f64;
        }
    }
    let mut p = AmbientPoint::new(c);
    space.renormalize(&mut p);
    p
}

/// Distance from a slice point to the rotation axis.
fn axis_distance(space: &ModelSpace, p: &AmbientPoint) -> f64 {
    match space {
        ModelSpace::Euclidean { .. } => p.coords[0],
        ModelSpace::Hyperbolic { kappa0, .. } => (kappa0 * p.coords[2]).asinh() / kappa0,
        ModelSpace::Warped2d { .. } => f64::NAN,
    }
}

/// Unit gradient of the axis-distance function at a slice point.
fn axis_distance_gradient(space: &ModelSpace, p: &AmbientPoint) -> Coords {
    match space {
        ModelSpace::Euclidean { .. } => SmallVec::from_slice(&[1.0, 0.0, 0.0]),
        ModelSpace::Hyperbolic { kappa0, .. } => {
            let d = axis_distance(space, p);
            let mut g: Coords = SmallVec::from_elem(0.0, 4);
            g[2] = 1.0;
            // project e2 onto the tangent space at p and normalize
            let xn = kappa0 * (kappa0 * d).sinh();
            for (gi, pi) in g.iter_mut().zip(&p.coords) {
                *gi += xn * pi;
            }
            let norm = (kappa0 * d).cosh();
            for gi in g.iter_mut() {
                *gi /= norm;
            }
            g
        }
        ModelSpace::Warped2d { .. } => SmallVec::new(),
    }
}

/// Rotate a slice point by angle phi about the axis.
fn rotate_about_axis(space: &ModelSpace, p: &AmbientPoint, phi: f64) -> AmbientPoint {
    let mut c = p.coords.clone();
    match space {
        ModelSpace::Euclidean { .. } => {
            let x = p.coords[0];
            c[0] = x * phi.cos();
            c[1] = x * phi.sin();
        }
        ModelSpace::Hyperbolic { .. } => {
            let x = p.coords[2];
            c[2] = x * phi.cos();
            c[3] = x * phi.sin();
        }
        ModelSpace::Warped2d { .. } => {}
    }
    AmbientPoint::new(c)
}

fn rotate_vector_about_axis(space: &ModelSpace, v: &[f64], phi: f64) -> Coords {
    let mut c: Coords = SmallVec::from_slice(v);
    match space {
        ModelSpace::Euclidean { .. } => {
            let x = v[0];
            c[0] = x * phi.cos();
            c[1] = x * phi.sin();
        }
        ModelSpace::Hyperbolic { .. } => {
            let x = v[2];
            c[2] = x * phi.cos();
            c[3] = x * phi.sin();
        }
        ModelSpace::Warped2d { .. } => {}
    }
    c
}

/// Orthonormal frame splitting the tangent space at `point` into directions
/// tangent and normal to the submanifold, given the unit normals.
fn frame_from_normals(space: &ModelSpace, point: &AmbientPoint, normals: Vec<Coords>) -> Frame {
    let basis = space.tangent_basis(point);
    let mut tangents: Vec<Coords> = Vec::new();
    for e in basis {
        let mut v = e;
        for n in &normals {
            let c = space.dot(point, &v, n);
            for (vi, ni) in v.iter_mut().zip(n.iter()) {
                *vi -= c * ni;
            }
        }
        for t in &tangents {
            let c = space.dot(point, &v, t);
            for (vi, ti) in v.iter_mut().zip(t.iter()) {
                *vi -= c * ti;
            }
        }
        let norm = space.norm(point, &v);
        if norm > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            tangents.push(v);
        }
    }
    Frame {
        base: point.clone(),
        tangent_vectors: tangents,
        normal_vectors: normals,
    }
}

fn sample_sphere(
    space: &ModelSpace,
    center: &AmbientPoint,
    radius: f64,
    resolution: usize,
) -> Result<Vec<QuadratureSample>> {
    let m = space.dim();
    let total = Submanifold::GeodesicSphere {
        space: space.clone(),
        center: center.clone(),
        radius,
    }
    .total_volume()?;

    let h_mag = sphere_mean_curvature_magnitude(space, radius);
    let mut out = Vec::new();
    match (space, m) {
        (ModelSpace::Warped2d { .. }, _) => {
            for j in 0..resolution {
                let theta = 2.0 * PI * j as f64 / resolution as f64;
                let point = AmbientPoint::from_slice(&[radius, theta]);
                let normal: Coords = SmallVec::from_slice(&[1.0, 0.0]);
                let mut hv: Coords = normal.clone();
                for c in hv.iter_mut() {
                    *c *= -h_mag;
                }
                let frame = frame_from_normals(space, &point, vec![normal]);
                out.push(QuadratureSample {
                    point,
                    weight: total / resolution as f64,
                    normal_frame: frame,
                    mean_curvature_vector: hv,
                });
            }
        }
        (_, 2) => {
            // circle: uniform angular nodes, exact arc weights
            let basis = space.tangent_basis(center);
            for j in 0..resolution {
                let theta = 2.0 * PI * j as f64 / resolution as f64;
                let mut dir: Coords = SmallVec::from_elem(0.0, space.coord_len());
                for (di, (e0, e1)) in dir
                    .iter_mut()
                    .zip(basis[0].iter().zip(basis[1].iter()))
                {
                    *di = radius * (theta.cos() * e0 + theta.sin() * e1);
                }
                let point = space.exp_map(center, &dir)?;
                let normal = space.grad_rho(center, &point)?;
                let mut hv: Coords = normal.clone();
                for c in hv.iter_mut() {
                    *c *= -h_mag;
                }
                let frame = frame_from_normals(space, &point, vec![normal]);
                out.push(QuadratureSample {
                    point,
                    weight: total / resolution as f64,
                    normal_frame: frame,
                    mean_curvature_vector: hv,
                });
            }
        }
        (_, 3) => {
            // Gauss-Legendre in the polar cosine x uniform azimuth; weights
            // sum exactly to the closed-form area
            let (nodes, weights) = gauss_legendre(resolution);
            let q_az = 2 * resolution;
            let basis = space.tangent_basis(center);
            for (u, wu) in nodes.iter().zip(weights.iter()) {
                let theta = u.acos();
                for j in 0..q_az {
                    let phi = 2.0 * PI * j as f64 / q_az as f64;
                    let mut dir: Coords = SmallVec::from_elem(0.0, space.coord_len());
                    let d = [
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    ];
                    for (k, e) in basis.iter().enumerate() {
                        for (di, ei) in dir.iter_mut().zip(e.iter()) {
                            *di += radius * d[k] * ei;
                        }
                    }
                    let point = space.exp_map(center, &dir)?;
                    let normal = space.grad_rho(center, &point)?;
                    let mut hv: Coords = normal.clone();
                    for c in hv.iter_mut() {
                        *c *= -h_mag;
                    }
                    let frame = frame_from_normals(space, &point, vec![normal]);
                    out.push(QuadratureSample {
                        point,
                        weight: total * wu / (2.0 * q_az as f64),
                        normal_frame: frame,
                        mean_curvature_vector: hv,
                    });
                }
            }
        }
        _ => {
            return Err(CmError::UnsupportedPair(format!(
                "sphere sampling implemented for ambient dimension 2 and 3, got {m}"
            )))
        }
    }
    Ok(out)
}

/// Closed-form mean curvature magnitude of a geodesic sphere.
pub fn sphere_mean_curvature_magnitude(space: &ModelSpace, radius: f64) -> f64 {
    match space {
        ModelSpace::Euclidean { dim } => (dim - 1) as f64 / radius,
        ModelSpace::Hyperbolic { dim, kappa0 } => (dim - 1) as f64 * ct_kappa(*kappa0, radius),
        ModelSpace::Warped2d { profile } => profile.dphi(radius) / profile.phi(radius),
    }
}

fn sample_polyline(
    space: &ModelSpace,
    vertices: &[AmbientPoint],
    closed: bool,
) -> Result<Vec<QuadratureSample>> {
    let n = vertices.len();
    let mut seg = Vec::with_capacity(n);
    for (a, b) in segment_pairs(vertices, closed) {
        seg.push(space.distance(&vertices[a], &vertices[b])?);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (prev_len, next_len, interior) = if closed {
            (seg[(i + n - 1) % n], seg[i], true)
        } else if i == 0 {
            (0.0, seg[0], false)
        } else if i == n - 1 {
            (seg[n - 2], 0.0, false)
        } else {
            (seg[i - 1], seg[i], true)
        };
        let weight = 0.5 * (prev_len + next_len);
        let point = vertices[i].clone();
        let (hv, normal) = if interior {
            let prev = &vertices[(i + n - 1) % n];
            let next = &vertices[(i + 1) % n];
            polyline_curvature(space, prev, &point, next, prev_len, next_len)?
        } else {
            // open endpoints carry no curvature data
            let other = if i == 0 { 1 } else { n - 2 };
            let t = unit_chord(space, &point, &vertices[other])?;
            let normal = perp_in_tangent(space, &point, &t);
            (SmallVec::from_elem(0.0, space.coord_len()), normal)
        };
        let frame = frame_from_normals(space, &point, vec![normal]);
        out.push(QuadratureSample {
            point,
            weight,
            normal_frame: frame,
            mean_curvature_vector: hv,
        });
    }
    Ok(out)
}

/// Discrete geodesic curvature at an interior polyline vertex: the
/// arclength-weighted second difference in ambient coordinates, projected
/// onto the normal direction within the tangent space (the projection also
/// removes the hyperboloid embedding's ambient curvature term).
pub(crate) fn polyline_curvature(
    space: &ModelSpace,
    prev: &AmbientPoint,
    point: &AmbientPoint,
    next: &AmbientPoint,
    a: f64,
    b: f64,
) -> Result<(Coords, Coords)> {
    let len = space.coord_len();
    let mut d2: Coords = SmallVec::from_elem(0.0, len);
    for k in 0..len {
        let fwd = (next.coords[k] - point.coords[k]) / b;
        let back = (point.coords[k] - prev.coords[k]) / a;
        d2[k] = 2.0 * (fwd - back) / (a + b);
    }
    // tangent direction
    let mut t: Coords = SmallVec::from_elem(0.0, len);
    for k in 0..len {
        t[k] = next.coords[k] - prev.coords[k];
    }
    project_tangent(space, point, &mut t);
    let tn = space.norm(point, &t);
    for ti in t.iter_mut() {
        *ti /= tn;
    }
    let normal = perp_in_tangent(space, point, &t);
    // project the second difference onto the normal line
    let c = space.dot(point, &d2, &normal);
    let mut hv: Coords = normal.clone();
    for x in hv.iter_mut() {
        *x *= c;
    }
    Ok((hv, normal))
}

fn unit_chord(space: &ModelSpace, from: &AmbientPoint, to: &AmbientPoint) -> Result<Coords> {
    let mut t: Coords = SmallVec::from_elem(0.0, space.coord_len());
    for (k, ti) in t.iter_mut().enumerate() {
        *ti = to.coords[k] - from.coords[k];
    }
    project_tangent(space, from, &mut t);
    let n = space.norm(from, &t);
    for ti in t.iter_mut() {
        *ti /= n;
    }
    Ok(t)
}

/// Remove the component normal to the model space (hyperboloid constraint).
pub(crate) fn project_tangent(space: &ModelSpace, at: &AmbientPoint, v: &mut Coords) {
    if let ModelSpace::Hyperbolic { kappa0, .. } = space {
        let xx = -1.0 / (kappa0 * kappa0);
        let c = space.ambient_dot(v, &at.coords) / xx;
        for (vi, xi) in v.iter_mut().zip(&at.coords) {
            *vi -= c * xi;
        }
    }
}

/// The unit tangent-space vector orthogonal to `t` (2-dimensional spaces).
fn perp_in_tangent(space: &ModelSpace, at: &AmbientPoint, t: &[f64]) -> Coords {
    let basis = space.tangent_basis(at);
    let mut n: Coords = SmallVec::from_elem(0.0, space.coord_len());
    for e in &basis {
        let mut v = e.clone();
        let c = space.dot(at, &v, t);
        for (vi, ti) in v.iter_mut().zip(t.iter()) {
            *vi -= c * ti;
        }
        let norm = space.norm(at, &v);
        if norm > 1e-7 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            n = v;
            break;
        }
    }
    n
}

fn sample_revolution(
    space: &ModelSpace,
    profile: &[AmbientPoint],
    resolution: usize,
) -> Result<Vec<QuadratureSample>> {
    let n = profile.len();
    let kappa0 = space.kappa0();
    let mut seg = Vec::with_capacity(n - 1);
    for w in profile.windows(2) {
        seg.push(space.distance(&w[0], &w[1])?);
    }
    let q_az = resolution;
    let mut out = Vec::new();
    for i in 0..n {
        let d = axis_distance(space, &profile[i]);
        if d < 1e-12 {
            continue; // pole vertex: its orbit has zero length
        }
        let (a, b) = if i == 0 {
            (0.0, seg[0])
        } else if i == n - 1 {
            (seg[n - 2], 0.0)
        } else {
            (seg[i - 1], seg[i])
        };
        let ell = 0.5 * (a + b);

        // in-slice data at the unrotated profile point
        let (kvec, normal) = if i > 0 && i < n - 1 {
            polyline_curvature(space, &profile[i - 1], &profile[i], &profile[i + 1], a, b)?
        } else {
            let t = unit_chord(space, &profile[i], &profile[if i == 0 { 1 } else { n - 2 }])?;
            let normal = perp_in_tangent(space, &profile[i], &t);
            (SmallVec::from_elem(0.0, space.coord_len()), normal)
        };
        let grad_d = axis_distance_gradient(space, &profile[i]);
        let nd = space.dot(&profile[i], &normal, &grad_d);
        // H = profile curvature - ct(d) (n . grad d) n   (rotational term)
        let rot = ct_kappa(kappa0, d) * nd;
        let mut hv = kvec;
        for (h, ni) in hv.iter_mut().zip(normal.iter()) {
            *h -= rot * ni;
        }

        let ring = 2.0 * PI * s_kappa(kappa0, d);
        for j in 0..q_az {
            let phi = 2.0 * PI * j as f64 / q_az as f64;
            let point = rotate_about_axis(space, &profile[i], phi);
            let nrot = rotate_vector_about_axis(space, &normal, phi);
            let hrot = rotate_vector_about_axis(space, &hv, phi);
            let frame = frame_from_normals(space, &point, vec![nrot]);
            out.push(QuadratureSample {
                point,
                weight: ell * ring / q_az as f64,
                normal_frame: frame,
                mean_curvature_vector: hrot,
            });
        }
    }
    Ok(out)
}

/// Exact 1-D reduction of the kernel integral over a geodesic sphere: the
/// integrand depends only on the polar angle toward the kernel center.
fn sphere_kernel_integral(
    space: &ModelSpace,
    center: &AmbientPoint,
    radius: f64,
    bk: &BackwardsKernel,
    tau: f64,
    resolution: usize,
) -> Result<f64> {
    let total = Submanifold::GeodesicSphere {
        space: space.clone(),
        center: center.clone(),
        radius,
    }
    .total_volume()?;
    if let ModelSpace::Warped2d { .. } = space {
        // kernel centers away from the pole have no distance function
        if bk.x0.coords[0] != 0.0 {
            return Err(CmError::UnsupportedPair(
                "warped kernel integrals need the center at the pole".into(),
            ));
        }
        return Ok(total * bk.evaluator.eval(tau, radius)?);
    }
    let d = space.distance(center, &bk.x0)?;
    if d < 1e-14 {
        return Ok(total * bk.evaluator.eval(tau, radius)?);
    }
    let m = space.dim();
    let kappa0 = space.kappa0();
    let dist_at = |cos_theta: f64| -> f64 {
        match space {
            ModelSpace::Euclidean { .. } => {
                (radius * radius + d * d - 2.0 * radius * d * cos_theta)
                    .max(0.0)
                    .sqrt()
            }
            ModelSpace::Hyperbolic { .. } => {
                let c = (kappa0 * radius).cosh() * (kappa0 * d).cosh()
                    - (kappa0 * radius).sinh() * (kappa0 * d).sinh() * cos_theta;
                crate::geometry::stable_acosh(c.max(1.0)) / kappa0
            }
            ModelSpace::Warped2d { .. } => unreachable!(),
        }
    };
    match m {
        2 => {
            // mean over uniform angles (spectrally accurate trapezoid)
            let mut acc = 0.0;
            for j in 0..resolution {
                let theta = 2.0 * PI * j as f64 / resolution as f64;
                acc += bk.evaluator.log_eval(tau, dist_at(theta.cos()))?.exp();
            }
            Ok(total * acc / resolution as f64)
        }
        3 => {
            let (nodes, weights) = gauss_legendre(resolution);
            let mut acc = 0.0;
            for (u, w) in nodes.iter().zip(weights.iter()) {
                acc += w * bk.evaluator.log_eval(tau, dist_at(*u))?.exp();
            }
            Ok(total * acc / 2.0)
        }
        _ => Err(CmError::UnsupportedPair(format!(
            "sphere kernel integral implemented for ambient dimension 2 and 3, got {m}"
        ))),
    }
}
