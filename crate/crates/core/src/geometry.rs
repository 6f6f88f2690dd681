//! Exact planar points, affine maps and the generic substitution engine.

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{GoldenValue, Rational};

/// Default recursion cap for [`substitute`].
pub const DEFAULT_SUBSTITUTION_DEPTH_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: GoldenValue,
    pub y: GoldenValue,
}

impl Point {
    pub fn new(x: GoldenValue, y: GoldenValue) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::default()
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(GoldenValue::from_int(x), GoldenValue::from_int(y))
    }

    pub fn from_rationals(x: Rational, y: Rational) -> Self {
        Point::new(x.into(), y.into())
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, s: &GoldenValue) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, o: &Point) -> GoldenValue {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    pub fn norm_squared(&self) -> GoldenValue {
        self.dot(self)
    }

    /// Exact squared Euclidean distance.
    pub fn dist_squared(&self, o: &Point) -> GoldenValue {
        self.sub(o).norm_squared()
    }

    /// Cross product `self × o` (z component).
    pub fn cross(&self, o: &Point) -> GoldenValue {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }
}

/// `g(p) = h·p + v` with an exact 2×2 linear part `h` and translation `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub m00: GoldenValue,
    pub m01: GoldenValue,
    pub m10: GoldenValue,
    pub m11: GoldenValue,
    pub tx: GoldenValue,
    pub ty: GoldenValue,
}

impl AffineMap {
    pub fn new(linear: [[GoldenValue; 2]; 2], translation: [GoldenValue; 2]) -> Self {
        let [[m00, m01], [m10, m11]] = linear;
        let [tx, ty] = translation;
        AffineMap {
            m00,
            m01,
            m10,
            m11,
            tx,
            ty,
        }
    }

    pub fn identity() -> Self {
        Self::new(
            [
                [GoldenValue::one(), GoldenValue::zero()],
                [GoldenValue::zero(), GoldenValue::one()],
            ],
            [GoldenValue::zero(), GoldenValue::zero()],
        )
    }

    /// Uniform scaling by `s` followed by translation.
    pub fn scaling(s: GoldenValue, tx: GoldenValue, ty: GoldenValue) -> Self {
        Self::new([[s.clone(), GoldenValue::zero()], [GoldenValue::zero(), s]], [tx, ty])
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &(&(&self.m00 * &p.x) + &(&self.m01 * &p.y)) + &self.tx,
            &(&(&self.m10 * &p.x) + &(&self.m11 * &p.y)) + &self.ty,
        )
    }

    /// `self ∘ other`, i.e. `p ↦ self(other(p))`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let t = self.apply(&Point::new(other.tx.clone(), other.ty.clone()));
        AffineMap {
            m00: &(&self.m00 * &other.m00) + &(&self.m01 * &other.m10),
            m01: &(&self.m00 * &other.m01) + &(&self.m01 * &other.m11),
            m10: &(&self.m10 * &other.m00) + &(&self.m11 * &other.m10),
            m11: &(&self.m10 * &other.m01) + &(&self.m11 * &other.m11),
            tx: t.x,
            ty: t.y,
        }
    }

    pub fn determinant(&self) -> GoldenValue {
        &(&self.m00 * &self.m11) - &(&self.m01 * &self.m10)
    }

    /// `r²` when the linear part is a similarity (rotation or reflection
    /// times a scalar `r`), `None` otherwise.
    pub fn similarity_ratio_squared(&self) -> Option<GoldenValue> {
        let rotation = self.m00 == self.m11 && self.m01 == -&self.m10;
        let reflection = self.m00 == -&self.m11 && self.m01 == self.m10;
        if rotation || reflection {
            Some(&self.m00.square() + &self.m10.square())
        } else {
            None
        }
    }

    /// Largest singular value of the linear part, in floating point.
    pub fn spectral_norm(&self) -> f64 {
        let (a, b, c, d) = (
            self.m00.to_f64(),
            self.m01.to_f64(),
            self.m10.to_f64(),
            self.m11.to_f64(),
        );
        // eigenvalues of MᵀM
        let p = a * a + c * c;
        let q = a * b + c * d;
        let r = b * b + d * d;
        let tr = p + r;
        let disc = ((p - r) * (p - r) + 4.0 * q * q).sqrt();
        ((tr + disc) / 2.0).sqrt()
    }

    pub fn image(&self, s: &PointSet) -> PointSet {
        affine_apply(self, s)
    }
}

/// A finite, deduplicated set of exact points with provenance metadata.
///
/// Iteration follows insertion order, which keeps serialized output
/// deterministic; set semantics (equality, subset) ignore order.
#[derive(Clone, Debug, Default)]
pub struct PointSet {
    pub label: String,
    pub step: usize,
    points: IndexSet<Point>,
}

impl PointSet {
    pub fn new(label: impl Into<String>, step: usize) -> Self {
        PointSet {
            label: label.into(),
            step,
            points: IndexSet::new(),
        }
    }

    pub fn from_points(label: impl Into<String>, step: usize, points: impl IntoIterator<Item = Point>) -> Self {
        PointSet {
            label: label.into(),
            step,
            points: points.into_iter().collect(),
        }
    }

    /// Returns `true` if the point was not already present.
    pub fn insert(&mut self, p: Point) -> bool {
        self.points.insert(p)
    }

    pub fn extend(&mut self, pts: impl IntoIterator<Item = Point>) {
        self.points.extend(pts);
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> + '_ {
        self.points.iter()
    }

    pub fn points(&self) -> &IndexSet<Point> {
        &self.points
    }

    pub fn as_slice(&self) -> &indexmap::set::Slice<Point> {
        self.points.as_slice()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.points.is_subset(&other.points)
    }

    pub fn same_points(&self, other: &PointSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out
    }

    pub fn floats(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(Point::to_f64).collect()
    }

    pub fn with_meta(mut self, label: impl Into<String>, step: usize) -> Self {
        self.label = label.into();
        self.step = step;
        self
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.step == other.step && self.same_points(other)
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        PointSet::from_points("", 0, iter)
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    x: GoldenValue,
    y: GoldenValue,
    #[serde(default, skip_deserializing)]
    xf: f64,
    #[serde(default, skip_deserializing)]
    yf: f64,
}

#[derive(Serialize, Deserialize)]
struct PointSetRepr {
    label: String,
    step: usize,
    points: Vec<PointRepr>,
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetRepr {
            label: self.label.clone(),
            step: self.step,
            points: self
                .points
                .iter()
                .map(|p| PointRepr {
                    xf: p.x.to_f64(),
                    yf: p.y.to_f64(),
                    x: p.x.clone(),
                    y: p.y.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PointSetRepr::deserialize(d)?;
        Ok(PointSet::from_points(
            repr.label,
            repr.step,
            repr.points.into_iter().map(|p| Point::new(p.x, p.y)),
        ))
    }
}

/// Image of a point set under an affine map, deduplicated.
pub fn affine_apply(map: &AffineMap, s: &PointSet) -> PointSet {
    let images: Vec<Point> = s.as_slice().par_iter().map(|p| map.apply(p)).collect();
    PointSet::from_points(s.label.clone(), s.step, images)
}

/// A prototile polygon and the affine maps placing its child tiles.
#[derive(Clone, Debug)]
pub struct SubstitutionRule {
    pub name: String,
    pub prototile: Vec<Point>,
    pub maps: Vec<AffineMap>,
}

impl SubstitutionRule {
    /// Validates that every map's linear part is contracting.
    pub fn new(name: impl Into<String>, prototile: Vec<Point>, maps: Vec<AffineMap>) -> Result<Self> {
        for (index, m) in maps.iter().enumerate() {
            let norm = m.spectral_norm();
            if norm.is_nan() || norm >= 1.0 {
                return Err(Error::NonContracting { index, norm });
            }
        }
        Ok(SubstitutionRule {
            name: name.into(),
            prototile,
            maps,
        })
    }
}

/// Vertex set `A_n` of the n-th substitution step, under the default depth cap.
pub fn substitute(rule: &SubstitutionRule, n: usize) -> Result<PointSet> {
    substitute_capped(rule, n, DEFAULT_SUBSTITUTION_DEPTH_CAP)
}

/// `A_0` is the prototile's vertex list and `A_n = ⋃ᵢ gᵢ(A_{n−1})`, which is
/// the union over all length-n map words applied to the prototile vertices.
pub fn substitute_capped(rule: &SubstitutionRule, n: usize, cap: usize) -> Result<PointSet> {
    if n > cap {
        return Err(Error::DepthExceeded { requested: n, cap });
    }
    let mut current = PointSet::from_points(rule.name.clone(), 0, rule.prototile.iter().cloned());
    for step in 1..=n {
        let parts: Vec<PointSet> = rule.maps.par_iter().map(|m| affine_apply(m, &current)).collect();
        let mut next = PointSet::new(rule.name.clone(), step);
        for part in parts {
            next.extend(part.points);
        }
        current = next;
    }
    Ok(current)
}

fn orient(a: &Point, b: &Point, p: &Point) -> i32 {
    b.sub(a).cross(&p.sub(a)).sign()
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let (xlo, xhi) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ylo, yhi) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    *xlo <= p.x && p.x <= *xhi && *ylo <= p.y && p.y <= *yhi
}

/// Exact closed point-in-polygon test (boundary counts as inside).
pub fn polygon_contains(polygon: &[Point], p: &Point) -> bool {
    let n = polygon.len();
    if n == 0 {
        return false;
    }
    let mut winding = 0i32;
    for i in 0..n {
        let a = &polygon[i];
        let b = &polygon[(i + 1) % n];
        if on_segment(a, b, p) {
            return true;
        }
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) > 0 {
                winding += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) < 0 {
            winding -= 1;
        }
    }
    winding != 0
}
