//! Geometric realizations of rank-3 mutation classes.
//!
//! Vectors live in R^3 with either the Euclidean form (unit sphere, great
//! circles given by unit normals) or the Minkowski form
//! `<u,v> = u1 v1 + u2 v2 - u3 v3` (hyperboloid model of the hyperbolic
//! plane, geodesics given by unit spacelike normals).
//!
//! * Mutation-cyclic classes are three points `a_i` on the upper sheet with
//!   weights `2 cosh d(a_i, a_j) = -2 <a_i, a_j>`. Mutation at `k` rotates
//!   one of the other two points by `pi` about `a_k`.
//! * Mutation-acyclic classes are three lines with weights `2 |<e_i, e_j>|`.
//!   Mutation at `k` reflects one of the other two lines across `l_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::{Edge, ExchangeTriple, Vertex};

/// Tolerance for `<a,a> = -1` and `<e,e> = 1`, relative to the squared
/// Euclidean length of the vector.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
const DISTANCE_SLACK: f64 = 1e-9;
const CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Spherical,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HVector {
    pub x: [f64; 3],
    pub form: Form,
}

impl HVector {
    pub fn new(form: Form, x: [f64; 3]) -> Result<HVector> {
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfiguration(format!(
                "non-finite coordinates {x:?}"
            )));
        }
        Ok(HVector { x, form })
    }

    pub fn hyperbolic(x: [f64; 3]) -> Result<HVector> {
        HVector::new(Form::Hyperbolic, x)
    }

    pub fn spherical(x: [f64; 3]) -> Result<HVector> {
        HVector::new(Form::Spherical, x)
    }

    /// The base point `(0, 0, 1)` of the hyperboloid.
    pub const ORIGIN: HVector = HVector {
        x: [0.0, 0.0, 1.0],
        form: Form::Hyperbolic,
    };

    /// The bilinear form of `self`.
    #[inline]
    pub fn dot(&self, other: &HVector) -> f64 {
        let [a, b, c] = self.x;
        let [u, v, w] = other.x;
        match self.form {
            Form::Spherical => a * u + b * v + c * w,
            Form::Hyperbolic => a * u + b * v - c * w,
        }
    }

    fn euclid_sq(&self) -> f64 {
        self.x.iter().map(|c| c * c).sum()
    }

    /// `self + t * other`.
    #[inline]
    fn axpy(&self, t: f64, other: &HVector) -> HVector {
        HVector {
            x: [
                self.x[0] + t * other.x[0],
                self.x[1] + t * other.x[1],
                self.x[2] + t * other.x[2],
            ],
            form: self.form,
        }
    }

    fn neg(&self) -> HVector {
        HVector {
            x: [-self.x[0], -self.x[1], -self.x[2]],
            form: self.form,
        }
    }

    fn is_hyperbolic_point(&self) -> bool {
        self.form == Form::Hyperbolic
            && self.x[2] > 0.0
            && (self.dot(self) + 1.0).abs() <= NORMALIZATION_TOLERANCE * self.euclid_sq().max(1.0)
    }

    fn is_unit_normal(&self) -> bool {
        (self.dot(self) - 1.0).abs() <= NORMALIZATION_TOLERANCE * self.euclid_sq().max(1.0)
    }
}

fn same_form(a: &HVector, b: &HVector) -> Result<()> {
    if a.form != b.form {
        return Err(Error::InvalidConfiguration(format!(
            "mixed forms {:?} and {:?}",
            a.form, b.form
        )));
    }
    Ok(())
}

fn check_point(a: &HVector) -> Result<()> {
    if !a.is_hyperbolic_point() {
        return Err(Error::InvalidConfiguration(format!(
            "{:?} is not on the upper sheet of the hyperboloid (<a,a> = {})",
            a.x,
            a.dot(a)
        )));
    }
    Ok(())
}

fn check_normal(e: &HVector) -> Result<()> {
    if !e.is_unit_normal() {
        return Err(Error::InvalidConfiguration(format!(
            "{:?} is not a unit normal (<e,e> = {})",
            e.x,
            e.dot(e)
        )));
    }
    Ok(())
}

/// Hyperbolic distance `arccosh(-<a,b>)`.
pub fn point_distance(a: &HVector, b: &HVector) -> Result<f64> {
    check_point(a)?;
    check_point(b)?;
    let c = -a.dot(b);
    if c < 1.0 - DISTANCE_SLACK {
        return Err(Error::InvalidConfiguration(format!(
            "-<a,b> = {c} is below 1; the points are not on one sheet"
        )));
    }
    Ok(c.max(1.0).acosh())
}

/// The `pi`-rotation about `center`: `-x - 2 <x,c> c`.
pub fn rotate_point_pi(x: &HVector, center: &HVector) -> HVector {
    x.neg().axpy(-2.0 * x.dot(center), center)
}

/// Reflection of `e` across the line with unit normal `mirror`.
pub fn reflect_line(e: &HVector, mirror: &HVector) -> HVector {
    e.axpy(-2.0 * e.dot(mirror), mirror)
}

/// Minkowski reflection that maps `a` to the origin; identity if `a` is
/// already there.
fn recenter_map(a: &HVector) -> impl Fn(&HVector) -> HVector {
    // m = a - origin, with a_z - 1 written as rho^2 / (a_z + 1) so that the
    // mirror stays well defined for centres within rounding of the origin
    let [x, y, z] = a.x;
    let rho2 = x * x + y * y;
    let m = HVector {
        x: [x, y, rho2 / (z + 1.0)],
        form: Form::Hyperbolic,
    };
    let mm = 2.0 * rho2 / (z + 1.0);
    move |v: &HVector| {
        if mm > 0.0 {
            v.axpy(-2.0 * v.dot(&m) / mm, &m)
        } else {
            *v
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryConfig", into = "GeometryConfig")]
pub struct PointConfig {
    points: [HVector; 3],
}

impl PointConfig {
    pub fn new(points: [HVector; 3]) -> Result<PointConfig> {
        for a in &points {
            check_point(a)?;
        }
        Ok(PointConfig { points })
    }

    pub fn point(&self, v: Vertex) -> &HVector {
        &self.points[(v.get() - 1) as usize]
    }

    pub fn points(&self) -> &[HVector; 3] {
        &self.points
    }

    pub fn is_valid(&self) -> bool {
        self.points.iter().all(HVector::is_hyperbolic_point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryConfig", into = "GeometryConfig")]
pub struct LineConfig {
    normals: [HVector; 3],
}

impl LineConfig {
    pub fn new(normals: [HVector; 3]) -> Result<LineConfig> {
        let form = normals[0].form;
        for e in &normals {
            if e.form != form {
                return Err(Error::InvalidConfiguration(
                    "lines must share one form".into(),
                ));
            }
            check_normal(e)?;
        }
        Ok(LineConfig { normals })
    }

    pub fn form(&self) -> Form {
        self.normals[0].form
    }

    pub fn normal(&self, v: Vertex) -> &HVector {
        &self.normals[(v.get() - 1) as usize]
    }

    pub fn normals(&self) -> &[HVector; 3] {
        &self.normals
    }

    /// `2 |<e_i, e_j>|` in the order `{1,2}`, `{2,3}`, `{1,3}`.
    pub fn weights(&self) -> [f64; 3] {
        Edge::ALL.map(|edge| {
            let (i, j) = edge.endpoints();
            let w = 2.0 * self.normal(i).dot(self.normal(j)).abs();
            if self.form() == Form::Spherical && w > 2.0 && w <= 2.0 + 2.0 * CLAMP {
                2.0
            } else {
                w
            }
        })
    }
}

/// JSON shape shared by both configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub form: Form,
    pub vectors: [[f64; 3]; 3],
}

impl GeometryConfig {
    fn vectors(&self) -> Result<[HVector; 3]> {
        Ok([
            HVector::new(self.form, self.vectors[0])?,
            HVector::new(self.form, self.vectors[1])?,
            HVector::new(self.form, self.vectors[2])?,
        ])
    }

    pub fn into_points(self) -> Result<PointConfig> {
        if self.form != Form::Hyperbolic {
            return Err(Error::InvalidConfiguration(
                "point configurations live in the hyperbolic plane".into(),
            ));
        }
        PointConfig::new(self.vectors()?)
    }

    pub fn into_lines(self) -> Result<LineConfig> {
        LineConfig::new(self.vectors()?)
    }
}

impl TryFrom<GeometryConfig> for PointConfig {
    type Error = Error;

    fn try_from(g: GeometryConfig) -> Result<Self> {
        g.into_points()
    }
}

impl TryFrom<GeometryConfig> for LineConfig {
    type Error = Error;

    fn try_from(g: GeometryConfig) -> Result<Self> {
        g.into_lines()
    }
}

impl From<PointConfig> for GeometryConfig {
    fn from(c: PointConfig) -> Self {
        GeometryConfig {
            form: Form::Hyperbolic,
            vectors: c.points.map(|a| a.x),
        }
    }
}

impl From<LineConfig> for GeometryConfig {
    fn from(c: LineConfig) -> Self {
        GeometryConfig {
            form: c.form(),
            vectors: c.normals.map(|e| e.x),
        }
    }
}

/// Pairwise point weights `2 cosh d(a_i, a_j)` in the order `{1,2}`,
/// `{2,3}`, `{1,3}`.
pub fn point_weights(cfg: &PointConfig) -> [f64; 3] {
    Edge::ALL.map(|edge| {
        let (i, j) = edge.endpoints();
        let w = -2.0 * cfg.point(i).dot(cfg.point(j));
        if (2.0 - 2.0 * CLAMP..2.0).contains(&w) {
            2.0
        } else {
            w
        }
    })
}

/// The cyclic quiver `1 -> 2 -> 3 -> 1` realized by the points.
pub fn points_to_quiver(cfg: &PointConfig) -> ExchangeTriple {
    let [w12, w23, w13] = point_weights(cfg);
    ExchangeTriple::cyclic(w12, w23, w13).expect("finite configuration gives finite weights")
}

/// Mutation at `k` in the point model.
///
/// The configuration is first moved by an isometry that takes `a_k` to the
/// origin, then the lower-indexed of the other two points is rotated by `pi`
/// about it. The result is expressed in that recentred frame; all pairwise
/// distances are as if `a_k` had stayed put.
pub fn geom_mutate_points(cfg: &PointConfig, k: Vertex) -> PointConfig {
    let center = *cfg.point(k);
    let map = recenter_map(&center);
    let mut points = cfg.points.map(|a| map(&a));
    let slot = |v: Vertex| (v.get() - 1) as usize;
    points[slot(k)] = HVector::ORIGIN;
    let (moving, _) = k.others();
    points[slot(moving)] = rotate_point_pi(&points[slot(moving)], &HVector::ORIGIN);
    PointConfig { points }
}

/// Three points with the given pairwise distances: `a1` at the origin, `a2`
/// on the first axis and `a3` in the half-plane `x2 >= 0`.
pub fn realize_points_from_distances(d12: f64, d23: f64, d13: f64) -> Result<PointConfig> {
    for (name, d) in [("d12", d12), ("d23", d23), ("d13", d13)] {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidConfiguration(format!(
                "{name} = {d} is not a nonnegative distance"
            )));
        }
    }
    let a1 = HVector::ORIGIN;
    let a2 = HVector::hyperbolic([d12.sinh(), 0.0, d12.cosh()])?;
    let coincide = |d: f64, other: f64| (d - other).abs() <= DISTANCE_SLACK * d.max(1.0);
    if d13 == 0.0 && coincide(d12, d23) {
        return Ok(PointConfig {
            points: [a1, a2, a1],
        });
    }
    if d23 == 0.0 && coincide(d12, d13) {
        return Ok(PointConfig {
            points: [a1, a2, a2],
        });
    }
    let z = d13.cosh();
    let x = if d12 == 0.0 {
        if !coincide(d13, d23) {
            return Err(Error::InvalidConfiguration(format!(
                "signature test failed: a1 = a2 but d13 = {d13} differs from d23 = {d23}"
            )));
        }
        d13.sinh()
    } else {
        (z * d12.cosh() - d23.cosh()) / d12.sinh()
    };
    let y_sq = z * z - 1.0 - x * x;
    if y_sq < -DISTANCE_SLACK * z * z {
        return Err(Error::InvalidConfiguration(format!(
            "signature test failed: the Gram matrix of distances ({d12}, {d23}, {d13}) is not of signature (2,1); the triangle inequality is violated"
        )));
    }
    let a3 = HVector::hyperbolic([x, y_sq.max(0.0).sqrt(), z])?;
    Ok(PointConfig {
        points: [a1, a2, a3],
    })
}

/// `2 |<e, f>|` for two unit normals of the same form.
pub fn line_weight(e: &HVector, f: &HVector) -> Result<f64> {
    same_form(e, f)?;
    check_normal(e)?;
    check_normal(f)?;
    Ok(2.0 * e.dot(f).abs())
}

/// How two hyperbolic lines meet, read off their weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LineRelation {
    /// Intersecting at angle `alpha` with `|2 cos alpha|` equal to the weight.
    Intersecting {
        angle: f64,
    },
    Parallel,
    /// Disjoint at distance `d` with `2 cosh d` equal to the weight.
    Disjoint {
        distance: f64,
    },
}

pub fn line_relation(e: &HVector, f: &HVector) -> Result<LineRelation> {
    let w = line_weight(e, f)?;
    if e.form == Form::Spherical || w < 2.0 - CLAMP {
        return Ok(LineRelation::Intersecting {
            angle: (w / 2.0).min(1.0).acos(),
        });
    }
    if w <= 2.0 + CLAMP {
        return Ok(LineRelation::Parallel);
    }
    Ok(LineRelation::Disjoint {
        distance: (w / 2.0).acosh(),
    })
}

/// Mutation at `k` in the line model: the lower-indexed of the other two
/// lines is reflected across `l_k`. Hyperbolic configurations are first
/// moved so that `l_k` passes through the origin.
pub fn geom_mutate_lines(cfg: &LineConfig, k: Vertex) -> LineConfig {
    let mut normals = cfg.normals;
    let at = |v: Vertex| (v.get() - 1) as usize;
    let (moving, _) = k.others();
    match cfg.form() {
        Form::Hyperbolic => {
            let map = recenter_map(&foot_point(cfg.normal(k)));
            normals = normals.map(|e| map(&e));
            // the mirror now passes through the origin, so its coordinates
            // are small and rescaling it is well conditioned
            normals[at(k)] = unit(normals[at(k)]);
            normals[at(moving)] = reflect_line(&normals[at(moving)], &normals[at(k)]);
        }
        Form::Spherical => {
            normals[at(moving)] = unit(reflect_line(&normals[at(moving)], &normals[at(k)]));
        }
    }
    LineConfig { normals }
}

/// The point of the line with normal `e` closest to the origin.
fn foot_point(e: &HVector) -> HVector {
    let s = e.x[2] / e.dot(e);
    let f = 1.0 / (1.0 + s * e.x[2]).sqrt();
    HVector {
        x: [s * e.x[0] * f, s * e.x[1] * f, (1.0 + s * e.x[2]) * f],
        form: Form::Hyperbolic,
    }
}

/// Rescales back to `<e,e> = 1`; repeated reflections otherwise amplify
/// rounding in the mirrors.
fn unit(e: HVector) -> HVector {
    let n = e.dot(&e);
    if n > 0.0 {
        let s = n.sqrt();
        HVector {
            x: e.x.map(|c| c / s),
            form: e.form,
        }
    } else {
        e
    }
}

/// The two values the exchange relation allows for the changed weight:
/// `w_ik w_kj + w_ij` and `|w_ik w_kj - w_ij|`.
pub fn exchange_candidates(weights: [f64; 3], k: Vertex) -> [f64; 2] {
    let changed = Edge::opposite(k);
    let (i, j) = changed.endpoints();
    let w = |e: Edge| weights[Edge::ALL.iter().position(|x| *x == e).expect("edge")];
    let product = w(Edge::between(i, k)) * w(Edge::between(k, j));
    [product + w(changed), (product - w(changed)).abs()]
}

/// Smallest angle in a spherical realization of a class with constant `C`;
/// `2 cos` of it is `sqrt(C)`.
pub fn min_realization_angle(c: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&c) {
        return Err(Error::InvalidArgument(format!(
            "Markov constant {c} outside [0, 4]"
        )));
    }
    // same angle as arcsin(sqrt(4 - C) / 2), without the cancellation near C = 4
    Ok((4.0 - c).sqrt().atan2(c.sqrt()))
}
