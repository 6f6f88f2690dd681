//! Named point-set generators: the golden Ammann chair recursion, the 4- and
//! 9-tile chair substitutions, the quarter-square grid and the integer
//! lattice calibration set. Also the Hecke (2,5,∞) generator orbit search.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{affine_apply, substitute_capped, AffineMap, Point, PointSet, SubstitutionRule};
use crate::numeric::{GoldenValue, Rational};

/// Largest Ammann chair step produced by default.
pub const AMMANN_DEPTH_CAP: usize = 21;

pub const MODEL_NAMES: [&str; 5] = [
    "ammann-chair",
    "ammann-chair2",
    "chair3",
    "integer-lattice",
    "square-grid",
];

fn gp(k: i32) -> GoldenValue {
    GoldenValue::gamma_pow(k)
}

fn pt(x: GoldenValue, y: GoldenValue) -> Point {
    Point::new(x, y)
}

/// Matrices, translations and base vertex lists of the golden Ammann chair.
///
/// `L(p) = M1·p + T1` rotates by 90° and shrinks by φ^{-1/2};
/// `S(p) = M2·p + T2` reflects in the x-axis and shrinks by φ^{-1}.
#[derive(Clone, Debug)]
pub struct AmmannChairConstants {
    pub m1: [[GoldenValue; 2]; 2],
    pub m2: [[GoldenValue; 2]; 2],
    pub t1: [GoldenValue; 2],
    pub t2: [GoldenValue; 2],
    pub base0: PointSet,
    pub base1: PointSet,
}

impl AmmannChairConstants {
    pub fn new() -> Self {
        let z = GoldenValue::zero;
        let ginv = gp(-1);
        let phiinv = gp(-2);
        let m1 = [[z(), -&ginv], [ginv.clone(), z()]];
        let m2 = [[phiinv.clone(), z()], [z(), -&phiinv]];
        let t1 = [gp(5), z()];
        let t2 = [z(), gp(6)];
        let base0_pts = vec![
            pt(z(), z()),
            pt(gp(5), z()),
            pt(gp(5), gp(4)),
            pt(gp(3), gp(4)),
            pt(gp(3), gp(6)),
            pt(z(), gp(6)),
        ];
        let mut base1_pts = base0_pts.clone();
        base1_pts.extend([pt(z(), gp(2)), pt(gp(1), gp(2)), pt(gp(1), gp(4))]);
        AmmannChairConstants {
            m1,
            m2,
            t1,
            t2,
            base0: PointSet::from_points("ammann-chair", 0, base0_pts),
            base1: PointSet::from_points("ammann-chair", 1, base1_pts),
        }
    }

    /// The large-tile map `L`.
    pub fn l_map(&self) -> AffineMap {
        AffineMap::new(self.m1.clone(), self.t1.clone())
    }

    /// The small-tile map `S`.
    pub fn s_map(&self) -> AffineMap {
        AffineMap::new(self.m2.clone(), self.t2.clone())
    }

    /// Prototile outline (counter-clockwise), identical to `base0`.
    pub fn prototile(&self) -> Vec<Point> {
        self.base0.iter().cloned().collect()
    }
}

impl Default for AmmannChairConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `L_0 … L_n` of the two-term recursion `L_N = L(L_{N−1}) ∪ S(L_{N−2})`.
pub fn ammann_chair_levels(n: usize) -> Result<Vec<PointSet>> {
    ammann_chair_levels_capped(n, AMMANN_DEPTH_CAP)
}

pub fn ammann_chair_levels_capped(n: usize, cap: usize) -> Result<Vec<PointSet>> {
    if n > cap {
        return Err(Error::DepthExceeded { requested: n, cap });
    }
    let k = AmmannChairConstants::new();
    let (l, s) = (k.l_map(), k.s_map());
    let mut levels = vec![k.base0.clone(), k.base1.clone()];
    for step in 2..=n {
        let mut next = affine_apply(&l, &levels[step - 1]);
        next.extend(affine_apply(&s, &levels[step - 2]).iter().cloned());
        levels.push(next.with_meta("ammann-chair", step));
    }
    levels.truncate(n + 1);
    Ok(levels)
}

/// The exact vertex set `L_n`.
pub fn ammann_chair(n: usize) -> Result<PointSet> {
    Ok(ammann_chair_levels(n)?.pop().expect("at least one level"))
}

/// `(S(L_{n−2}), L(L_{n−1}))`, whose union is `L_n`.
pub fn ammann_chair_split(n: usize) -> Result<(PointSet, PointSet)> {
    if n < 2 {
        return Err(Error::Precondition(format!("split needs n >= 2, got {n}")));
    }
    let levels = ammann_chair_levels(n - 1)?;
    let k = AmmannChairConstants::new();
    Ok((
        affine_apply(&k.s_map(), &levels[n - 2]).with_meta("S(L_{n-2})", n),
        affine_apply(&k.l_map(), &levels[n - 1]).with_meta("L(L_{n-1})", n),
    ))
}

fn rat(n: i64, d: i64) -> GoldenValue {
    GoldenValue::from_rational(Rational::new(n, d))
}

fn unit_chair() -> Vec<Point> {
    vec![
        Point::from_ints(0, 0),
        Point::from_ints(1, 0),
        pt(rat(1, 1), rat(1, 2)),
        pt(rat(1, 2), rat(1, 2)),
        pt(rat(1, 2), rat(1, 1)),
        Point::from_ints(0, 1),
    ]
}

/// Scale `s`, then translate: `(x, y) ↦ s·(x, y) + t`.
fn same_orientation(s: (i64, i64), t: (GoldenValue, GoldenValue)) -> AffineMap {
    AffineMap::scaling(rat(s.0, s.1), t.0, t.1)
}

/// Quarter turn clockwise: `(x, y) ↦ t + s·(y, −x)`.
fn turned_cw(s: (i64, i64), t: (GoldenValue, GoldenValue)) -> AffineMap {
    let k = rat(s.0, s.1);
    AffineMap::new(
        [[GoldenValue::zero(), k.clone()], [-&k, GoldenValue::zero()]],
        [t.0, t.1],
    )
}

/// Quarter turn counter-clockwise: `(x, y) ↦ t + s·(−y, x)`.
fn turned_ccw(s: (i64, i64), t: (GoldenValue, GoldenValue)) -> AffineMap {
    let k = rat(s.0, s.1);
    AffineMap::new([[GoldenValue::zero(), -&k], [k, GoldenValue::zero()]], [t.0, t.1])
}

/// The quarter-square rule on `[0,1]²`; `A_n` is the grid `(2⁻ⁿℤ)² ∩ [0,1]²`.
pub fn square_grid_rule() -> SubstitutionRule {
    let h = (1, 2);
    let maps = [(0, 0), (1, 0), (0, 1), (1, 1)]
        .into_iter()
        .map(|(i, j)| same_orientation(h, (rat(i, 2), rat(j, 2))))
        .collect();
    let proto = vec![
        Point::from_ints(0, 0),
        Point::from_ints(1, 0),
        Point::from_ints(1, 1),
        Point::from_ints(0, 1),
    ];
    SubstitutionRule::new("square-grid", proto, maps).expect("contracting")
}

/// The 4-tile chair: two half-size copies in the original orientation
/// (corner and centre) and two turned copies in the remaining corners.
pub fn ammann_chair2_rule() -> SubstitutionRule {
    let h = (1, 2);
    let maps = vec![
        same_orientation(h, (rat(0, 1), rat(0, 1))),
        same_orientation(h, (rat(1, 4), rat(1, 4))),
        turned_cw(h, (rat(0, 1), rat(1, 1))),
        turned_ccw(h, (rat(1, 1), rat(0, 1))),
    ];
    SubstitutionRule::new("ammann-chair2", unit_chair(), maps).expect("contracting")
}

/// The 9-tile chair with scale 1/3.
pub fn chair3_rule() -> SubstitutionRule {
    let t = (1, 3);
    let maps = vec![
        // diagonal run in the original orientation
        same_orientation(t, (rat(0, 1), rat(0, 1))),
        same_orientation(t, (rat(1, 6), rat(1, 6))),
        same_orientation(t, (rat(1, 3), rat(1, 3))),
        // corner at the upper left
        turned_cw(t, (rat(0, 1), rat(2, 3))),
        turned_cw(t, (rat(0, 1), rat(1, 1))),
        turned_cw(t, (rat(2, 3), rat(1, 2))),
        // corner at the lower right
        turned_ccw(t, (rat(1, 2), rat(2, 3))),
        turned_ccw(t, (rat(2, 3), rat(0, 1))),
        turned_ccw(t, (rat(1, 1), rat(0, 1))),
    ];
    SubstitutionRule::new("chair3", unit_chair(), maps).expect("contracting")
}

/// Integer points with `0 < y < x ≤ r`.
pub fn integer_lattice(r: i64) -> Result<PointSet> {
    if r < 2 {
        return Err(Error::Precondition(format!("integer lattice needs r >= 2, got {r}")));
    }
    let pts = (2..=r).flat_map(|x| (1..x).map(move |y| Point::from_ints(x, y)));
    Ok(PointSet::from_points("integer-lattice", r as usize, pts))
}

/// Generates a registered model at the given step (radius for the lattice).
pub fn generate_model(model: &str, steps: usize) -> Result<PointSet> {
    match model {
        "ammann-chair" => ammann_chair(steps),
        "ammann-chair2" => Ok(substitute_capped(
            &ammann_chair2_rule(),
            steps,
            crate::geometry::DEFAULT_SUBSTITUTION_DEPTH_CAP,
        )?),
        "chair3" => Ok(substitute_capped(
            &chair3_rule(),
            steps,
            crate::geometry::DEFAULT_SUBSTITUTION_DEPTH_CAP,
        )?),
        "square-grid" => Ok(substitute_capped(
            &square_grid_rule(),
            steps,
            crate::geometry::DEFAULT_SUBSTITUTION_DEPTH_CAP,
        )?),
        "integer-lattice" => integer_lattice(steps as i64),
        other => Err(Error::Precondition(format!(
            "unknown model {other:?}; valid models: {}",
            MODEL_NAMES.join(", ")
        ))),
    }
}

/// Bounds of the scalar family `c = a·φ^{p/2}` tried by the orbit search.
#[derive(Clone, Copy, Debug)]
pub struct HeckeSearch {
    pub a_max: i64,
    pub p_max: i32,
}

impl Default for HeckeSearch {
    fn default() -> Self {
        HeckeSearch { a_max: 8, p_max: 12 }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HeckeRecord {
    pub v: Point,
    pub found: bool,
    pub m: Option<usize>,
    pub w: Option<Point>,
    pub a: Option<i64>,
    pub p: Option<i32>,
    pub scalar: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HeckeReport {
    pub generator: u8,
    pub records: Vec<HeckeRecord>,
    pub success_fraction: f64,
}

/// The shear generators `g1 = [[1, φ], [0, 1]]` and `g2 = [[1, 0], [φ, 1]]`.
pub fn hecke_generator(i: u8) -> AffineMap {
    let (o, z, phi) = (GoldenValue::one, GoldenValue::zero, GoldenValue::phi);
    match i {
        1 => AffineMap::new([[o(), phi()], [z(), o()]], [z(), z()]),
        2 => AffineMap::new([[o(), z()], [phi(), o()]], [z(), z()]),
        _ => panic!("Hecke generator index must be 1 or 2"),
    }
}

/// For every `v ∈ L_n` and each generator, looks for `m ∈ [1, search_depth]`,
/// `w ∈ L_m` and `c = a·φ^{p/2}` with `g·v = c·w`, preferring the smallest m,
/// then the smallest p, then the smallest a.
pub fn hecke_orbit_check(n: usize, search_depth: usize, search: HeckeSearch) -> Result<Vec<HeckeReport>> {
    if n < 1 || search_depth < n {
        return Err(Error::Precondition(format!(
            "need 1 <= n <= search_depth, got n = {n}, search_depth = {search_depth}"
        )));
    }
    let levels = ammann_chair_levels(search_depth)?;
    let mut first_level: HashMap<Point, usize> = HashMap::new();
    for (m, level) in levels.iter().enumerate().skip(1) {
        for p in level.iter() {
            first_level.entry(p.clone()).or_insert(m);
        }
    }
    let inv_scalars: Vec<(i32, i64, GoldenValue)> = (0..=search.p_max)
        .flat_map(|p| {
            let gi = gp(-p);
            (1..=search.a_max).map(move |a| (p, a, gi.scale(&Rational::new(1, a))))
        })
        .collect();
    let targets = levels[n].as_slice();
    let reports = [1u8, 2]
        .into_iter()
        .map(|gen| {
            let g = hecke_generator(gen);
            let records: Vec<HeckeRecord> = targets
                .par_iter()
                .map(|v| {
                    let gv = g.apply(v);
                    let mut best: Option<(usize, i32, i64, Point)> = None;
                    for (p, a, inv) in &inv_scalars {
                        let w = gv.scale(inv);
                        if let Some(&m) = first_level.get(&w) {
                            if best.as_ref().is_none_or(|b| m < b.0) {
                                best = Some((m, *p, *a, w));
                            }
                        }
                    }
                    match best {
                        Some((m, p, a, w)) => HeckeRecord {
                            v: v.clone(),
                            found: true,
                            m: Some(m),
                            w: Some(w),
                            a: Some(a),
                            p: Some(p),
                            scalar: Some(format!("{a}*phi^({p}/2)")),
                        },
                        None => HeckeRecord {
                            v: v.clone(),
                            found: false,
                            m: None,
                            w: None,
                            a: None,
                            p: None,
                            scalar: None,
                        },
                    }
                })
                .collect();
            let found = records.iter().filter(|r| r.found).count();
            HeckeReport {
                generator: gen,
                success_fraction: found as f64 / records.len() as f64,
                records,
            }
        })
        .collect();
    Ok(reports)
}
