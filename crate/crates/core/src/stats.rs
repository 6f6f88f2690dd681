//! Direction series, normalized gaps, pair correlation and the uniformity /
//! Poisson reference checks run on generated point sets.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::numeric::GoldenValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DirectionKind {
    Slope,
    Angle,
}

/// Which `N` multiplies the consecutive differences in [`normalized_gaps_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GapNormalization {
    /// Number of points the series was drawn from, before deduplication.
    #[default]
    SourceCount,
    /// Length of the (possibly deduplicated) series itself.
    SeriesLength,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DirectionSeries {
    pub kind: DirectionKind,
    pub values: Vec<f64>,
    pub source_count: usize,
    pub excluded_vertical: usize,
    pub deduped: bool,
}

impl DirectionSeries {
    /// Builds a series from raw values (sorted here); mostly for tests and
    /// synthetic input.
    pub fn from_values(kind: DirectionKind, mut values: Vec<f64>, source_count: usize) -> Self {
        values.sort_by(f64::total_cmp);
        DirectionSeries {
            kind,
            values,
            source_count,
            excluded_vertical: 0,
            deduped: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Slopes `y/x` or angles `atan2(y, x)` of the non-origin points of `s`.
///
/// Points on the y-axis have no slope and are counted in
/// `excluded_vertical`; their angle is ±π/2. Equal directions are detected
/// exactly, so `dedupe` never merges two distinct directions that happen to
/// round to the same float.
pub fn directions(s: &PointSet, kind: DirectionKind, dedupe: bool) -> Result<DirectionSeries> {
    let mut seen: HashSet<(i32, i32, Option<GoldenValue>)> = HashSet::new();
    let mut values = Vec::with_capacity(s.len());
    let mut excluded_vertical = 0;
    let mut source_count = 0;
    for p in s.iter().filter(|p| !p.is_origin()) {
        let (sx, sy) = (p.x.sign(), p.y.sign());
        let slope = if sx == 0 {
            None
        } else {
            Some(&p.y * &p.x.inverse().expect("nonzero"))
        };
        let value = match (kind, &slope) {
            (DirectionKind::Slope, None) => {
                excluded_vertical += 1;
                continue;
            }
            (DirectionKind::Slope, Some(m)) => m.to_f64(),
            (DirectionKind::Angle, None) => FRAC_PI_2 * sy as f64,
            (DirectionKind::Angle, Some(m)) => {
                let t = m.to_f64().atan();
                match (sx, sy) {
                    (1, _) => t,
                    (_, -1) => t - PI,
                    _ => t + PI,
                }
            }
        };
        source_count += 1;
        if dedupe {
            // slopes identify lines; angles additionally need the half-plane
            let key = match kind {
                DirectionKind::Slope => (0, 0, slope),
                DirectionKind::Angle => (sx, sy, slope),
            };
            if !seen.insert(key) {
                continue;
            }
        }
        values.push(value);
    }
    if values.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "need at least 2 usable directions, found {}",
            values.len()
        )));
    }
    values.sort_by(f64::total_cmp);
    Ok(DirectionSeries {
        kind,
        values,
        source_count,
        excluded_vertical,
        deduped: dedupe,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GapSeries {
    pub gaps: Vec<f64>,
    pub normalization: f64,
    pub normalization_mode: GapNormalization,
}

impl GapSeries {
    pub fn min(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fraction of gaps strictly greater than `t`.
    pub fn survival(&self, t: f64) -> f64 {
        self.gaps.iter().filter(|&&g| g > t).count() as f64 / self.gaps.len() as f64
    }
}

/// `g_i = N·(v_{i+1} − v_i)` with `N` the source point count.
pub fn normalized_gaps(d: &DirectionSeries) -> Result<GapSeries> {
    normalized_gaps_with(d, GapNormalization::SourceCount)
}

pub fn normalized_gaps_with(d: &DirectionSeries, mode: GapNormalization) -> Result<GapSeries> {
    if d.values.len() < 2 {
        return Err(Error::EmptyInput("gap series needs at least 2 values".into()));
    }
    let n = match mode {
        GapNormalization::SourceCount => d.source_count,
        GapNormalization::SeriesLength => d.values.len(),
    } as f64;
    let gaps = d.values.windows(2).map(|w| n * (w[1] - w[0])).collect();
    Ok(GapSeries {
        gaps,
        normalization: n,
        normalization_mode: mode,
    })
}

/// Kolmogorov–Smirnov distance between the empirical distribution of the
/// series and the uniform distribution on `[a, b]`.
pub fn equidistribution_stat(d: &DirectionSeries, a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    if d.values.is_empty() {
        return Err(Error::EmptyInput("no values".into()));
    }
    if let Some(&v) = d.values.iter().find(|&&v| !(a..=b).contains(&v)) {
        return Err(Error::RangeViolation { value: v, lo: a, hi: b });
    }
    let n = d.values.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &v) in d.values.iter().enumerate() {
        let u = (v - a) / (b - a);
        ks = ks.max((i + 1) as f64 / n - u).max(u - i as f64 / n);
    }
    Ok(ks.clamp(0.0, 1.0))
}

/// Limiting gap survival `e^{−t}` of a Poisson process of intensity 1.
pub fn poisson_reference(t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain(format!("poisson reference needs t >= 0, got {t}")));
    }
    Ok((-t).exp())
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivalCheck {
    pub t: f64,
    pub empirical: f64,
    pub expected: f64,
    pub std_error: f64,
    pub z: f64,
}

/// Gap survival of `n` seeded i.i.d. uniform points on `[0, 1)` at each `t`,
/// compared with `e^{−t}`. The standard error is the binomial one.
pub fn poisson_baseline(n: usize, seed: u64, ts: &[f64]) -> Result<Vec<SurvivalCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let series = DirectionSeries::from_values(DirectionKind::Slope, values, n);
    let gaps = normalized_gaps(&series)?;
    let m = gaps.gaps.len() as f64;
    ts.iter()
        .map(|&t| {
            let expected = poisson_reference(t)?;
            let empirical = gaps.survival(t);
            let std_error = (expected * (1.0 - expected) / m).sqrt();
            Ok(SurvivalCheck {
                t,
                empirical,
                expected,
                std_error,
                z: (empirical - expected) / std_error,
            })
        })
        .collect()
}

/// Bin layout request, resolved against the data by [`BinSpec::resolve`].
#[derive(Clone, Debug, PartialEq)]
pub enum BinSpec {
    Edges(Vec<f64>),
    Uniform {
        k: usize,
        lo: f64,
        hi: f64,
    },
    /// `k` equal bins over `[min, max]` of the data.
    Auto {
        k: usize,
    },
}

impl BinSpec {
    pub fn resolve(&self, values: impl IntoIterator<Item = f64>) -> Result<Vec<f64>> {
        match self {
            BinSpec::Edges(e) => {
                validate_edges(e)?;
                Ok(e.clone())
            }
            BinSpec::Uniform { k, lo, hi } => uniform_edges(*k, *lo, *hi),
            BinSpec::Auto { k } => {
                let (lo, hi) = values
                    .into_iter()
                    .filter(|v| v.is_finite())
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                if !lo.is_finite() {
                    return Err(Error::EmptyInput("auto bins need at least one value".into()));
                }
                // bins are half open, so nudge the top edge past the maximum
                let hi = if hi > lo { hi + (hi - lo) * 1e-9 } else { lo + 1.0 };
                uniform_edges(*k, lo, hi)
            }
        }
    }

    pub fn needs_data(&self) -> bool {
        matches!(self, BinSpec::Auto { .. })
    }
}

impl FromStr for BinSpec {
    type Err = Error;

    /// `edges:e0,e1,…`, `uniform:K:lo:hi` or `auto:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::BinSpec(format!("{s:?}: {why}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let count = |t: &str| match t.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(bad("bin count must be a positive integer")),
        };
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected kind:args"))?;
        match kind {
            "edges" => {
                let e = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
                validate_edges(&e)?;
                Ok(BinSpec::Edges(e))
            }
            "uniform" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 3 {
                    return Err(bad("expected uniform:K:lo:hi"));
                }
                let spec = BinSpec::Uniform {
                    k: count(parts[0])?,
                    lo: num(parts[1])?,
                    hi: num(parts[2])?,
                };
                spec.resolve([])?;
                Ok(spec)
            }
            "auto" => Ok(BinSpec::Auto { k: count(rest)? }),
            _ => Err(bad("kind must be edges, uniform or auto")),
        }
    }
}

fn validate_edges(e: &[f64]) -> Result<()> {
    if e.len() < 2 {
        return Err(Error::BinSpec("need at least two edges".into()));
    }
    if e.iter().any(|v| !v.is_finite()) || e.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BinSpec("edges must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn uniform_edges(k: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::BinSpec("bin count must be positive".into()));
    }
    let w = (hi - lo) / k as f64;
    let mut e: Vec<f64> = (0..k).map(|i| lo + w * i as f64).collect();
    e.push(hi);
    validate_edges(&e)?;
    Ok(e)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NormMode {
    #[default]
    Raw,
    Pdf,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HistogramMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_mode: Option<GapNormalization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_vertical: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Counts over half-open bins `[e_i, e_{i+1})`. Values outside
/// `[e_0, e_last)` (and NaN) go to `overflow`, so `Σcounts + overflow = total`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub overflow: u64,
    pub norm_mode: NormMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<f64>>,
    #[serde(default)]
    pub meta: HistogramMeta,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        validate_edges(&edges)?;
        Ok(Histogram {
            counts: vec![0; edges.len() - 1],
            edges,
            total: 0,
            overflow: 0,
            norm_mode: NormMode::Raw,
            density: None,
            meta: HistogramMeta::default(),
        })
    }

    pub fn from_values(spec: &BinSpec, values: &[f64]) -> Result<Self> {
        let mut h = Histogram::new(spec.resolve(values.iter().copied())?)?;
        h.add_all(values.iter().copied());
        Ok(h)
    }

    #[inline]
    pub fn bin_of(&self, v: f64) -> Option<usize> {
        let i = self.edges.partition_point(|&e| e <= v);
        (i > 0 && i < self.edges.len()).then(|| i - 1)
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        self.total += 1;
        match self.bin_of(v) {
            Some(b) => self.counts[b] += 1,
            None => self.overflow += 1,
        }
    }

    pub fn add_all(&mut self, vs: impl IntoIterator<Item = f64>) {
        for v in vs {
            self.add(v);
        }
    }

    /// Adds the counts of `other`; both must share bit-identical edges.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges.len() != other.edges.len()
            || self
                .edges
                .iter()
                .zip(&other.edges)
                .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            return Err(Error::EdgeMismatch);
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.total += other.total;
        self.overflow += other.overflow;
        Ok(())
    }

    pub fn merged(mut self, other: &Histogram) -> Result<Self> {
        self.merge(other)?;
        Ok(self)
    }

    /// Switches to pdf mode: `density_i = count_i / (total·width_i)`.
    pub fn to_pdf(mut self) -> Self {
        let t = self.total.max(1) as f64;
        self.density = Some(
            self.counts
                .iter()
                .zip(self.edges.windows(2))
                .map(|(&c, w)| c as f64 / (t * (w[1] - w[0])))
                .collect(),
        );
        self.norm_mode = NormMode::Pdf;
        self
    }

    pub fn with_meta(mut self, meta: HistogramMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn binned(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// First bin at which the running count reaches half of the binned mass.
    pub fn median_bin(&self) -> Option<usize> {
        let half = self.binned() as f64 / 2.0;
        if half == 0.0 {
            return None;
        }
        let mut acc = 0;
        self.counts.iter().position(|&c| {
            acc += c;
            acc as f64 >= half
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("edge_lo,edge_hi,count\n");
        for (c, w) in self.counts.iter().zip(self.edges.windows(2)) {
            let _ = writeln!(out, "{},{},{}", w[0], w[1], c);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PairMode {
    Distance,
    SquaredDistance,
}

#[inline]
fn pair_value(p: (f64, f64), q: (f64, f64), mode: PairMode, scale: f64) -> f64 {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let d2 = dx * dx + dy * dy;
    match mode {
        PairMode::Distance => scale * d2.sqrt(),
        PairMode::SquaredDistance => scale * d2,
    }
}

fn pair_edges(pts: &[(f64, f64)], mode: PairMode, scale: f64, bins: &BinSpec) -> Result<Vec<f64>> {
    if !bins.needs_data() {
        return bins.resolve([]);
    }
    let (lo, hi) = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            pts[i + 1..]
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &q| {
                    let v = pair_value(pts[i], q, mode, scale);
                    (a.min(v), b.max(v))
                })
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |x, y| (x.0.min(y.0), x.1.max(y.1)),
        );
    bins.resolve([lo, hi])
}

fn pair_meta(mode: PairMode, scale: f64) -> HistogramMeta {
    HistogramMeta {
        scale: Some(scale),
        mode: Some(
            match mode {
                PairMode::Distance => "distance",
                PairMode::SquaredDistance => "squaredDistance",
            }
            .into(),
        ),
        ..Default::default()
    }
}

/// Histogram of `scale·‖x_k − x_j‖` (or the squared norm) over all unordered
/// pairs `j < k`. Rows are scanned in parallel, each worker fills its own
/// histogram and the partial histograms are merged.
pub fn pair_correlation(s: &PointSet, mode: PairMode, scale: f64, bins: &BinSpec) -> Result<Histogram> {
    if s.len() < 2 {
        return Err(Error::EmptyInput("pair correlation needs at least 2 points".into()));
    }
    let pts = s.floats();
    let edges = pair_edges(&pts, mode, scale, bins)?;
    let empty = Histogram::new(edges)?;
    let n = pts.len();
    let h = (0..n)
        .into_par_iter()
        .with_min_len(16)
        .fold(
            || empty.clone(),
            |mut h, i| {
                let p = pts[i];
                for &q in &pts[i + 1..] {
                    h.add(pair_value(p, q, mode, scale));
                }
                h
            },
        )
        .reduce(|| empty.clone(), |a, b| a.merged(&b).expect("shared edges"));
    Ok(h.with_meta(pair_meta(mode, scale)))
}

/// Plain double loop; the reference the parallel scan is checked against.
pub fn pair_correlation_brute(s: &PointSet, mode: PairMode, scale: f64, bins: &BinSpec) -> Result<Histogram> {
    if s.len() < 2 {
        return Err(Error::EmptyInput("pair correlation needs at least 2 points".into()));
    }
    let pts = s.floats();
    let mut values = Vec::new();
    for k in 0..pts.len() {
        for j in 0..k {
            values.push(pair_value(pts[j], pts[k], mode, scale));
        }
    }
    let edges = match bins {
        BinSpec::Auto { .. } => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            bins.resolve([lo, hi])?
        }
        _ => bins.resolve([])?,
    };
    let mut counts = vec![0u64; edges.len() - 1];
    let mut overflow = 0;
    for &v in &values {
        let mut hit = false;
        for b in 0..counts.len() {
            if edges[b] <= v && v < edges[b + 1] {
                counts[b] += 1;
                hit = true;
                break;
            }
        }
        if !hit {
            overflow += 1;
        }
    }
    Ok(Histogram {
        edges,
        counts,
        total: values.len() as u64,
        overflow,
        norm_mode: NormMode::Raw,
        density: None,
        meta: pair_meta(mode, scale),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::tilings::{ammann_chair, integer_lattice};
    use proptest::prelude::*;

    fn square() -> PointSet {
        [(0, 0), (1, 0), (0, 1), (1, 1)]
            .into_iter()
            .map(|(x, y)| Point::from_ints(x, y))
            .collect()
    }

    #[test]
    fn single_diagonal_point() {
        let s: PointSet = [Point::origin(), Point::from_ints(1, 1), Point::from_ints(2, 2)]
            .into_iter()
            .collect();
        let sl = directions(&s, DirectionKind::Slope, true).unwrap_err();
        assert!(matches!(sl, Error::EmptyInput(_)));
        let sl = directions(&s, DirectionKind::Slope, false).unwrap();
        assert_eq!(sl.values, vec![1.0, 1.0]);
        let an = directions(&s, DirectionKind::Angle, false).unwrap();
        assert_eq!(an.values, vec![PI / 4.0, PI / 4.0]);
        assert_eq!(normalized_gaps(&sl).unwrap().gaps, vec![0.0]);
    }

    #[test]
    fn lattice_slopes() {
        let d = directions(&integer_lattice(3).unwrap(), DirectionKind::Slope, true).unwrap();
        assert_eq!(d.values, vec![1.0 / 3.0, 0.5, 2.0 / 3.0]);
        assert_eq!(d.source_count, 3);
        let d = directions(&integer_lattice(5).unwrap(), DirectionKind::Slope, true).unwrap();
        assert_eq!(d.len(), 9);
        assert_eq!(d.source_count, 10);
    }

    #[test]
    fn vertical_directions() {
        let s: PointSet = [(0, 0), (0, 2), (1, 1), (2, 1), (-1, 1)]
            .into_iter()
            .map(|(x, y)| Point::from_ints(x, y))
            .collect();
        let sl = directions(&s, DirectionKind::Slope, false).unwrap();
        assert_eq!(sl.excluded_vertical, 1);
        assert_eq!(sl.values, vec![-1.0, 0.5, 1.0]);
        let an = directions(&s, DirectionKind::Angle, false).unwrap();
        assert_eq!(an.excluded_vertical, 0);
        assert!(an.values.contains(&FRAC_PI_2));
        assert!((an.values[3] - 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn exact_dedupe_of_golden_directions() {
        let phi = GoldenValue::phi();
        let s: PointSet = [
            Point::new(GoldenValue::one(), phi.clone()),
            Point::new(phi.clone(), &phi * &phi),
            Point::new(GoldenValue::from_int(2), GoldenValue::from_int(3)),
        ]
        .into_iter()
        .collect();
        let d = directions(&s, DirectionKind::Slope, true).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn gap_examples() {
        let d = DirectionSeries::from_values(DirectionKind::Slope, vec![0.0, 0.5, 1.0], 3);
        assert_eq!(normalized_gaps(&d).unwrap().gaps, vec![1.5, 1.5]);
        let d = DirectionSeries::from_values(DirectionKind::Slope, vec![0.2, 0.2], 2);
        assert_eq!(normalized_gaps(&d).unwrap().gaps, vec![0.0]);
        let d = DirectionSeries::from_values(DirectionKind::Slope, vec![0.2], 1);
        assert!(normalized_gaps(&d).is_err());
    }

    #[test]
    fn farey_small_order() {
        // reduced fractions of order 5 in (0,1): 9 of them, smallest gap 1/20
        let d = directions(&integer_lattice(5).unwrap(), DirectionKind::Slope, true).unwrap();
        let g = normalized_gaps_with(&d, GapNormalization::SeriesLength).unwrap();
        assert!((g.min() - 9.0 / 20.0).abs() < 1e-12);
    }

    #[test]
    fn ks_examples() {
        let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = DirectionSeries::from_values(DirectionKind::Angle, grid, 100);
        assert!(equidistribution_stat(&d, 0.0, 1.0).unwrap() <= 0.01 + 1e-12);
        let d = DirectionSeries::from_values(DirectionKind::Angle, vec![0.0; 50], 50);
        assert!((equidistribution_stat(&d, 0.0, 1.0).unwrap() - 1.0).abs() <= 1.0 / 50.0);
        let d = DirectionSeries::from_values(DirectionKind::Angle, vec![0.5, 1.5], 2);
        assert!(matches!(
            equidistribution_stat(&d, 0.0, 1.0),
            Err(Error::RangeViolation { .. })
        ));
    }

    #[test]
    fn chair_angle_ks_matches_oracle() {
        // tools/oracle.py, atan2 of all non-origin points, no dedupe
        let ks = |n| {
            let d = directions(&ammann_chair(n).unwrap(), DirectionKind::Angle, false).unwrap();
            equidistribution_stat(&d, 0.0, FRAC_PI_2).unwrap()
        };
        let (k6, k12) = (ks(6), ks(12));
        assert!((k6 - 0.1287372645945124).abs() < 1e-12, "{k6}");
        assert!((k12 - 0.09149698016182606).abs() < 1e-12, "{k12}");
        assert!(k12 < k6);
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_reference(0.0).unwrap(), 1.0);
        assert!((poisson_reference(1.0).unwrap() - 0.36788).abs() < 1e-5);
        assert!((poisson_reference(2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(poisson_reference(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn square_pair_correlation() {
        let s = square();
        let h = pair_correlation(&s, PairMode::Distance, 1.0, &BinSpec::Edges(vec![0.0, 1.25, 1.75])).unwrap();
        assert_eq!(h.counts, vec![4, 2]);
        assert_eq!(h.total, 6);
        let h = pair_correlation(&s, PairMode::SquaredDistance, 1.0, &BinSpec::Edges(vec![0.5, 1.5, 2.5])).unwrap();
        assert_eq!(h.counts, vec![4, 2]);
    }

    #[test]
    fn chair_pair_correlation_matches_brute_force() {
        let s = ammann_chair(4).unwrap();
        let n = s.len() as u64;
        for bins in [
            BinSpec::Uniform {
                k: 37,
                lo: 0.0,
                hi: 30.0,
            },
            BinSpec::Auto { k: 50 },
        ] {
            let fast = pair_correlation(&s, PairMode::SquaredDistance, 1.0, &bins).unwrap();
            let slow = pair_correlation_brute(&s, PairMode::SquaredDistance, 1.0, &bins).unwrap();
            assert_eq!(fast, slow);
            assert_eq!(fast.total, n * (n - 1) / 2);
            assert_eq!(fast.overflow, 0);
        }
    }

    #[test]
    fn histogram_overflow_and_pdf() {
        let mut h = Histogram::new(vec![0.0, 1.0, 2.0]).unwrap();
        h.add_all([-1.0, 0.0, 0.5, 1.0, 2.0, f64::NAN]);
        assert_eq!(h.counts, vec![2, 1]);
        assert_eq!(h.overflow, 3);
        assert_eq!(h.binned() + h.overflow, h.total);
        let p = h.to_pdf();
        let integral: f64 = p.density.as_ref().unwrap().iter().sum();
        assert!(integral <= 1.0);
        assert_eq!(p.norm_mode, NormMode::Pdf);
    }

    #[test]
    fn histogram_json_and_csv() {
        let mut h = Histogram::new(vec![0.0, 1.25, 1.75]).unwrap();
        h.add_all([1.0, 1.5]);
        let v = serde_json::to_value(&h).unwrap();
        for key in ["edges", "counts", "total", "overflow", "normMode", "meta"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["normMode"], "raw");
        assert_eq!(h.to_csv(), "edge_lo,edge_hi,count\n0,1.25,1\n1.25,1.75,1\n");
        let back: Histogram = serde_json::from_value(v).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn merge_rejects_other_edges() {
        let mut a = Histogram::new(vec![0.0, 1.0]).unwrap();
        let b = Histogram::new(vec![0.0, 2.0]).unwrap();
        assert_eq!(a.merge(&b), Err(Error::EdgeMismatch));
    }

    #[test]
    fn bin_spec_parsing() {
        assert_eq!(
            "edges:0,1.25,1.75".parse::<BinSpec>().unwrap(),
            BinSpec::Edges(vec![0.0, 1.25, 1.75])
        );
        assert_eq!(
            "uniform:4:0:2".parse::<BinSpec>().unwrap().resolve([]).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!("auto:3".parse::<BinSpec>().unwrap(), BinSpec::Auto { k: 3 });
        for bad in [
            "edges:1,0",
            "uniform:0:0:1",
            "uniform:2:1:1",
            "auto:x",
            "log:3",
            "edges:1",
        ] {
            assert!(bad.parse::<BinSpec>().is_err(), "{bad}");
        }
        let e = BinSpec::Auto { k: 4 }.resolve([1.0, 3.0]).unwrap();
        let mut h = Histogram::new(e).unwrap();
        h.add_all([1.0, 3.0]);
        assert_eq!(h.overflow, 0);
    }

    #[test]
    fn poisson_baseline_small() {
        for c in poisson_baseline(20_000, 7, &[0.5, 1.0, 2.0]).unwrap() {
            assert!(c.z.abs() < 4.0, "{c:?}");
        }
    }

    fn arb_points() -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((-40i64..40, -40i64..40), 2..60)
    }

    proptest! {
        #[test]
        fn pair_totals_and_oracle(pts in arb_points(), k in 1usize..20, squared in any::<bool>()) {
            let s: PointSet = pts.into_iter().map(|(x, y)| Point::from_ints(x, y)).collect();
            prop_assume!(s.len() >= 2);
            let mode = if squared { PairMode::SquaredDistance } else { PairMode::Distance };
            let bins = BinSpec::Uniform { k, lo: 0.0, hi: 60.0 };
            let fast = pair_correlation(&s, mode, 1.0, &bins).unwrap();
            let n = s.len() as u64;
            prop_assert_eq!(fast.total, n * (n - 1) / 2);
            prop_assert_eq!(fast.binned() + fast.overflow, fast.total);
            prop_assert_eq!(fast, pair_correlation_brute(&s, mode, 1.0, &bins).unwrap());
        }

        #[test]
        fn merge_is_associative_and_commutative(
            a in prop::collection::vec(-1.0f64..3.0, 0..50),
            b in prop::collection::vec(-1.0f64..3.0, 0..50),
            c in prop::collection::vec(-1.0f64..3.0, 0..50),
        ) {
            let spec = BinSpec::Uniform { k: 7, lo: 0.0, hi: 2.0 };
            let h = |v: &[f64]| Histogram::from_values(&spec, v).unwrap();
            let (ha, hb, hc) = (h(&a), h(&b), h(&c));
            let left = ha.clone().merged(&hb).unwrap().merged(&hc).unwrap();
            let right = ha.clone().merged(&hb.clone().merged(&hc).unwrap()).unwrap();
            let swapped = hb.merged(&ha).unwrap().merged(&hc).unwrap();
            let all: Vec<f64> = a.iter().chain(&b).chain(&c).copied().collect();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(&left, &swapped);
            prop_assert_eq!(&left, &h(&all));
        }

        #[test]
        fn gap_sum_telescopes(v in prop::collection::vec(-10.0f64..10.0, 2..200), extra in 0usize..50) {
            let n = v.len() + extra;
            let d = DirectionSeries::from_values(DirectionKind::Slope, v, n);
            let g = normalized_gaps(&d).unwrap();
            let sum: f64 = g.gaps.iter().sum();
            let expect = n as f64 * (d.values[d.len() - 1] - d.values[0]);
            prop_assert!(g.gaps.iter().all(|&x| x >= 0.0));
            prop_assert_eq!(g.gaps.len(), d.len() - 1);
            prop_assert!((sum - expect).abs() <= 1e-9 * expect.abs().max(1.0));
        }
    }
}
