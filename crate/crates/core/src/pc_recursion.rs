//! Recursive decomposition of the Ammann chair squared-distance sets `D̃_n`.
//!
//! `D̃_n` is the set of exact values `‖p − q‖²`, `p ≠ q ∈ L_n`. Because
//! `L_n = S(L_{n−2}) ∪ L(L_{n−1})` and both maps are similarities, `D̃_n`
//! splits exactly into `φ⁻¹D̃_{n−1}`, `φ⁻²D̃_{n−2}` and a cross term. The
//! stacked decomposition replaces the cross term by closed-form component
//! families and measures how much of `D̃_n` they reach.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{affine_apply, AffineMap, Point, PointSet};
use crate::numeric::GoldenValue;
use crate::stats::{BinSpec, Histogram, HistogramMeta};
use crate::tilings::{ammann_chair_levels, AmmannChairConstants};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistanceValueSet {
    pub values: HashSet<GoldenValue>,
    pub source_label: String,
}

impl DistanceValueSet {
    pub fn new(label: impl Into<String>, values: HashSet<GoldenValue>) -> Self {
        DistanceValueSet {
            values,
            source_label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &GoldenValue) -> bool {
        self.values.contains(v)
    }

    pub fn same_values(&self, other: &DistanceValueSet) -> bool {
        self.values == other.values
    }

    pub fn is_subset(&self, other: &DistanceValueSet) -> bool {
        self.values.is_subset(&other.values)
    }

    pub fn intersection_len(&self, other: &DistanceValueSet) -> usize {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.values.iter().filter(|v| big.values.contains(*v)).count()
    }

    /// `f·D`, every value multiplied by `f`.
    pub fn scaled(&self, f: &GoldenValue, label: impl Into<String>) -> Self {
        DistanceValueSet::new(label, self.values.iter().map(|v| v * f).collect())
    }

    pub fn union(sets: &[&DistanceValueSet], label: impl Into<String>) -> Self {
        let mut values = HashSet::new();
        for s in sets {
            values.extend(s.values.iter().cloned());
        }
        DistanceValueSet::new(label, values)
    }

    /// Values as floats, ascending.
    pub fn floats(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().map(GoldenValue::to_f64).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn merge_sets(mut a: HashSet<GoldenValue>, b: HashSet<GoldenValue>) -> HashSet<GoldenValue> {
    if a.len() < b.len() {
        return merge_sets(b, a);
    }
    a.extend(b);
    a
}

/// All `‖p − q‖²` with `p ∈ a`, `q ∈ b`, `p ≠ q`.
pub fn dset(a: &PointSet, b: &PointSet) -> DistanceValueSet {
    let bs = b.as_slice();
    let values = a
        .as_slice()
        .par_iter()
        .fold(HashSet::new, |mut acc, p| {
            for q in bs.iter().filter(|q| *q != p) {
                acc.insert(p.dist_squared(q));
            }
            acc
        })
        .reduce(HashSet::new, merge_sets);
    DistanceValueSet::new(format!("D({}, {})", a.label, b.label), values)
}

/// `D̃_n` of a single set, scanning each unordered pair once.
pub fn dset_self(a: &PointSet) -> DistanceValueSet {
    let pts = a.as_slice();
    let values = (0..pts.len())
        .into_par_iter()
        .fold(HashSet::new, |mut acc, i| {
            for q in pts.iter().skip(i + 1) {
                acc.insert(pts[i].dist_squared(q));
            }
            acc
        })
        .reduce(HashSet::new, merge_sets);
    DistanceValueSet::new(format!("D({})", a.label), values)
}

/// `(φ⁻¹D̃_{n−1}, φ⁻²D̃_{n−2}, D̃(S(L_{n−2}), L(L_{n−1})))`.
pub fn exact_split(n: usize) -> Result<(DistanceValueSet, DistanceValueSet, DistanceValueSet)> {
    if n < 2 {
        return Err(Error::Precondition(format!("exact_split needs n >= 2, got {n}")));
    }
    let levels = ammann_chair_levels(n - 1)?;
    let k = AmmannChairConstants::new();
    let d1 = dset_self(&levels[n - 1]);
    let d2 = dset_self(&levels[n - 2]);
    let s_part = affine_apply(&k.s_map(), &levels[n - 2]);
    let l_part = affine_apply(&k.l_map(), &levels[n - 1]);
    Ok((
        d1.scaled(&GoldenValue::phi_pow(-1), "RHS(n-1)"),
        d2.scaled(&GoldenValue::phi_pow(-2), "RHS(n-2)"),
        DistanceValueSet::new("cross", dset(&s_part, &l_part).values),
    ))
}

/// Shift constants `γ̃_{i,0,x}, γ̃_{i,0,y}` of the component families,
/// written exactly as tabulated (rows read in order i = 2, 3, 4, 5).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionConstants {
    pub g2x: GoldenValue,
    pub g2y: GoldenValue,
    pub g3x: GoldenValue,
    pub g3y: GoldenValue,
    pub g4x: GoldenValue,
    pub g4y: GoldenValue,
    pub g5x: GoldenValue,
    pub g5y: GoldenValue,
}

impl DecompositionConstants {
    /// Only `m = 0` is tabulated; anything else is refused.
    pub fn for_m(m: i64) -> Result<Self> {
        if m != 0 {
            return Err(Error::UnsupportedConstants(m));
        }
        let phi = GoldenValue::phi_pow;
        let two = GoldenValue::from_int(2);
        let m2 = GoldenValue::from_int(-2);
        Ok(DecompositionConstants {
            g2x: &phi(-1) * &(&two * &phi(3)),
            g2y: &phi(-1) * &(&two * &phi(2)),
            g3x: &GoldenValue::gamma_pow(-3) * &(&two * &phi(4)),
            g3y: &GoldenValue::gamma_pow(-3) * &(&two * &phi(3)),
            g4x: GoldenValue::zero(),
            g4y: GoldenValue::zero(),
            g5x: &phi(-2) * &(&m2 * &phi(3)),
            g5y: &phi(-2) * &(&m2 * &phi(2)),
        })
    }

    pub fn pair(&self, i: u8) -> (&GoldenValue, &GoldenValue) {
        match i {
            2 => (&self.g2x, &self.g2y),
            3 => (&self.g3x, &self.g3y),
            4 => (&self.g4x, &self.g4y),
            5 => (&self.g5x, &self.g5y),
            _ => panic!("component index must be in 2..=5"),
        }
    }
}

/// Signs combining `(x1, x2)` and `(y1, y2)`: `+1` for a sum, `−1` for a
/// difference.
pub fn component_signs(i: u8) -> (i8, i8) {
    match i {
        2 => (1, -1),
        3 => (1, 1),
        4 => (-1, 1),
        5 => (-1, -1),
        _ => panic!("component index must be in 2..=5"),
    }
}

/// The family `D̃_{i,m,n−j}` over `φ^{−(4m+i)/2}·L_{n−j}`, taken over all
/// ordered pairs of points (a point may be paired with itself).
pub fn component_set(i: u8, m: i64, j: usize, n: usize) -> Result<DistanceValueSet> {
    if !(2..=5).contains(&i) {
        return Err(Error::Precondition(format!(
            "component index must be in 2..=5, got {i}"
        )));
    }
    let consts = DecompositionConstants::for_m(m)?;
    let k = n
        .checked_sub(j)
        .ok_or_else(|| Error::Precondition(format!("component level n - j must be >= 0, got n = {n}, j = {j}")))?;
    let levels = ammann_chair_levels(k)?;
    Ok(component_over(i, &consts, &levels[k], format!("RHS_{i}({k})")))
}

fn component_over(i: u8, consts: &DecompositionConstants, base: &PointSet, label: String) -> DistanceValueSet {
    let f = GoldenValue::gamma_pow(-(i as i32));
    let pts: Vec<Point> = base.iter().map(|p| p.scale(&f)).collect();
    let (cx, cy) = consts.pair(i);
    let (sx, sy) = component_signs(i);
    let comb = |a: &GoldenValue, b: &GoldenValue, s: i8| if s > 0 { a + b } else { a - b };
    let values = pts
        .par_iter()
        .fold(HashSet::new, |mut acc, p| {
            for q in &pts {
                let u = &comb(&p.x, &q.x, sx) - cx;
                let v = &comb(&p.y, &q.y, sy) - cy;
                acc.insert(&u.square() + &v.square());
            }
            acc
        })
        .reduce(HashSet::new, merge_sets);
    DistanceValueSet::new(label, values)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentSummary {
    pub label: String,
    pub count: usize,
    pub in_full: usize,
    pub spurious: usize,
    /// `|C ∩ D̃_n| / |D̃_n|` for this component alone.
    pub coverage: f64,
    /// Coverage of the union of this and all earlier components.
    pub cumulative_coverage: f64,
    /// The same cumulative coverage as an exact fraction `(num, den)`.
    pub cumulative_covered: (usize, usize),
}

/// A cross term `D̃(W₁(L_a), W₂(L_b))` built by composing the chair maps,
/// compared with the closed-form component it is paired with.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OperatorTerm {
    pub label: String,
    pub paired_with: String,
    pub count: usize,
    pub in_full: usize,
    pub shared_with_component: usize,
    pub component_count: usize,
}

#[derive(Clone, Debug)]
pub struct StackedDecomposition {
    pub n: usize,
    pub full: DistanceValueSet,
    pub components: Vec<DistanceValueSet>,
    pub residual: DistanceValueSet,
    pub spurious: DistanceValueSet,
    pub summaries: Vec<ComponentSummary>,
    pub operator_terms: Vec<OperatorTerm>,
}

/// Applies a word over {L, S} to `L_k`; the rightmost letter acts first.
pub fn operator_word(word: &str, k: usize, levels: &[PointSet]) -> PointSet {
    let c = AmmannChairConstants::new();
    let (l, s) = (c.l_map(), c.s_map());
    let mut set = levels[k].clone();
    for ch in word.chars().rev() {
        let m: &AffineMap = match ch {
            'L' => &l,
            'S' => &s,
            _ => panic!("operator words use only L and S"),
        };
        set = affine_apply(m, &set);
    }
    set.with_meta(format!("{word}_{k}"), k)
}

pub fn stacked_decomposition(n: usize) -> Result<StackedDecomposition> {
    if n < 7 {
        return Err(Error::Precondition(format!(
            "stacked decomposition needs n >= 7, got {n}"
        )));
    }
    let levels = ammann_chair_levels(n)?;
    let consts = DecompositionConstants::for_m(0)?;
    let d = |k: usize| dset_self(&levels[k]);
    let full = DistanceValueSet::new(format!("D_{n}"), d(n).values);
    let phi = GoldenValue::phi_pow;
    let components = vec![
        d(n - 1).scaled(&phi(-1), "RHS(n-1)"),
        d(n - 2).scaled(&phi(-2), "RHS(n-2)"),
        component_over(2, &consts, &levels[n - 2], "RHS_2(n-2)".into()),
        component_over(3, &consts, &levels[n - 3], "RHS_3(n-3)".into()),
        component_over(4, &consts, &levels[n - 4], "RHS_4(n-4)".into()),
        component_over(5, &consts, &levels[n - 5], "RHS_5(n-5)".into()),
        d(n - 4).scaled(&phi(-4), "RHS(n-4)"),
    ];

    let mut covered: HashSet<GoldenValue> = HashSet::new();
    let mut spurious: HashSet<GoldenValue> = HashSet::new();
    let mut summaries = Vec::new();
    let total = full.len();
    for c in &components {
        let mut in_full = 0;
        for v in &c.values {
            if full.contains(v) {
                in_full += 1;
                covered.insert(v.clone());
            } else {
                spurious.insert(v.clone());
            }
        }
        summaries.push(ComponentSummary {
            label: c.source_label.clone(),
            count: c.len(),
            in_full,
            spurious: c.len() - in_full,
            coverage: in_full as f64 / total as f64,
            cumulative_coverage: covered.len() as f64 / total as f64,
            cumulative_covered: (covered.len(), total),
        });
    }
    let residual: HashSet<GoldenValue> = full.values.iter().filter(|v| !covered.contains(*v)).cloned().collect();

    let words: [(&str, usize, &str, usize, usize); 5] = [
        ("S", n - 2, "LL", n - 2, 2),
        ("LS", n - 3, "SL", n - 3, 3),
        ("SS", n - 4, "LSL", n - 4, 4),
        ("LSS", n - 5, "SSL", n - 5, 5),
        ("SSS", n - 6, "SSL", n - 5, 6),
    ];
    let operator_terms = words
        .iter()
        .map(|&(w1, k1, w2, k2, idx)| {
            let a = operator_word(w1, k1, &levels);
            let b = operator_word(w2, k2, &levels);
            let term = dset(&a, &b);
            let comp = &components[idx];
            OperatorTerm {
                label: format!("D({w1}_{k1}, {w2}_{k2})"),
                paired_with: comp.source_label.clone(),
                count: term.len(),
                in_full: term.intersection_len(&full),
                shared_with_component: term.intersection_len(comp),
                component_count: comp.len(),
            }
        })
        .collect();

    Ok(StackedDecomposition {
        n,
        full,
        components,
        residual: DistanceValueSet::new("residual", residual),
        spurious: DistanceValueSet::new("spurious", spurious),
        summaries,
        operator_terms,
    })
}

impl StackedDecomposition {
    pub fn coverage(&self) -> f64 {
        self.summaries.last().map_or(0.0, |s| s.cumulative_coverage)
    }

    /// Counts and coverage; with `values` the float value lists are included.
    pub fn to_json(&self, values: bool) -> Value {
        let mut comps: Vec<Value> = self
            .summaries
            .iter()
            .map(|s| serde_json::to_value(s).expect("plain data"))
            .collect();
        if values {
            for (c, v) in self.components.iter().zip(comps.iter_mut()) {
                v["values"] = json!(c.floats());
            }
        }
        let mut out = json!({
            "n": self.n,
            "fullCount": self.full.len(),
            "components": comps,
            "coverage": self.coverage(),
            "residualCount": self.residual.len(),
            "spuriousCount": self.spurious.len(),
            "operatorTerms": self.operator_terms,
        });
        if values {
            out["fullValues"] = json!(self.full.floats());
            out["residualValues"] = json!(self.residual.floats());
        }
        out
    }
}

fn profile(values: Vec<f64>, d: &StackedDecomposition, bins: &BinSpec, label: &str) -> Result<Histogram> {
    // data-driven bins span the full value set so the two profiles line up
    let edges = bins.resolve(d.full.floats())?;
    let mut h = Histogram::new(edges)?;
    h.add_all(values);
    Ok(h.with_meta(HistogramMeta {
        source: Some(format!("{label} n={}", d.n)),
        ..Default::default()
    }))
}

/// Histogram of the residual values (those of `D̃_n` in no component).
pub fn residual_tail_profile(d: &StackedDecomposition, bins: &BinSpec) -> Result<Histogram> {
    profile(d.residual.floats(), d, bins, "residual")
}

/// Histogram of all of `D̃_n` on the same bins as [`residual_tail_profile`].
pub fn full_profile(d: &StackedDecomposition, bins: &BinSpec) -> Result<Histogram> {
    profile(d.full.floats(), d, bins, "full")
}
