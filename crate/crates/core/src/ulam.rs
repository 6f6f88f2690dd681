//! Two-dimensional Ulam sets generated by a pair of vectors `v0, v1` in the
//! closed first quadrant.
//!
//! Members are stored by lattice coordinates `(a, b)` for `a·v0 + b·v1`.
//! At every step all vectors of minimal norm that are the sum of exactly one
//! unordered pair of distinct members (and are not members yet) are admitted
//! together; `K(a, b)` is the step at which `(a, b)` entered.
//!
//! Generation is incremental: representation counts (capped at 2) live in a
//! dense grid and only pairs involving newly admitted members are added.
//! Candidates wait in a heap keyed by an approximate float norm; ties and
//! near ties are settled by exact comparison.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::numeric::{GoldenValue, Rational};

pub type Coord = (i64, i64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum UlamMode {
    #[serde(rename = "userdef-2d")]
    UserDef,
    #[serde(rename = "random-2d")]
    Random { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UlamConfig {
    pub v0: Point,
    pub v1: Point,
    pub max_steps: usize,
    pub mode: UlamMode,
}

impl UlamConfig {
    pub fn new(v0: Point, v1: Point, max_steps: usize) -> Result<Self> {
        let cfg = UlamConfig {
            v0,
            v1,
            max_steps,
            mode: UlamMode::UserDef,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `v0 = (1, 0)`, `v1 = (0, 1)`.
    pub fn unit(max_steps: usize) -> Self {
        Self::new(Point::from_ints(1, 0), Point::from_ints(0, 1), max_steps).expect("valid")
    }

    /// `v0 = (1, φ)`, `v1 = (φ, 1)`.
    pub fn golden(max_steps: usize) -> Self {
        let (one, phi) = (GoldenValue::one(), GoldenValue::phi());
        Self::new(Point::new(one.clone(), phi.clone()), Point::new(phi, one), max_steps).expect("valid")
    }

    /// Both vectors uniform on `[0, 1)²` with coordinates `k / 2⁵³`;
    /// parallel or zero draws are rejected and redrawn.
    pub fn random(seed: u64, max_steps: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Rational::new((rng.next_u64() >> 11) as i64, 1 << 53);
        loop {
            let v0 = Point::from_rationals(draw(), draw());
            let v1 = Point::from_rationals(draw(), draw());
            let cfg = UlamConfig {
                v0,
                v1,
                max_steps,
                mode: UlamMode::Random { seed },
            };
            if cfg.validate().is_ok() {
                return cfg;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("v0", &self.v0), ("v1", &self.v1)] {
            if v.is_origin() {
                return Err(Error::DegenerateConfig(format!("{name} is the zero vector")));
            }
            if v.x.sign() < 0 || v.y.sign() < 0 {
                return Err(Error::DegenerateConfig(format!(
                    "{name} is not in the closed first quadrant"
                )));
            }
        }
        if self.v0.cross(&self.v1).is_zero() {
            return Err(Error::DegenerateConfig("v0 and v1 are parallel".into()));
        }
        Ok(())
    }

    pub fn position(&self, (a, b): Coord) -> Point {
        let s = |k: i64| GoldenValue::from_int(k);
        self.v0.scale(&s(a)).add(&self.v1.scale(&s(b)))
    }

    fn gram(&self) -> Gram {
        let a = self.v0.norm_squared();
        let b = self.v0.dot(&self.v1);
        let c = self.v1.norm_squared();
        Gram {
            af: a.to_f64(),
            bf: b.to_f64(),
            cf: c.to_f64(),
            a,
            b,
            c,
        }
    }
}

/// Gram matrix entries `v0·v0, v0·v1, v1·v1`, exact and as floats.
#[derive(Clone, Debug)]
struct Gram {
    a: GoldenValue,
    b: GoldenValue,
    c: GoldenValue,
    af: f64,
    bf: f64,
    cf: f64,
}

impl Gram {
    fn exact(&self, (x, y): Coord) -> GoldenValue {
        let r = |k: i64| Rational::from_int(k);
        &(&self.a.scale(&r(x * x)) + &self.b.scale(&r(2 * x * y))) + &self.c.scale(&r(y * y))
    }

    fn approx(&self, (x, y): Coord) -> f64 {
        let (x, y) = (x as f64, y as f64);
        x * x * self.af + 2.0 * x * y * self.bf + y * y * self.cf
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub step: usize,
    pub added: Vec<Coord>,
    pub norm2: GoldenValue,
}

#[derive(Clone, Debug)]
pub struct UlamState {
    pub config: UlamConfig,
    /// Members in admission order with their entry step.
    pub members: Vec<(Coord, usize)>,
    pub entry: HashMap<Coord, usize>,
    pub step_log: Vec<StepRecord>,
    pub steps_done: usize,
    /// Smallest exact norm among admissible candidates still waiting.
    pub frontier: Option<GoldenValue>,
}

const MEMBER: u8 = 4;
const COUNT: u8 = 3;

/// Representation counts and membership on a dense, growable grid.
struct Grid {
    side: usize,
    cells: Vec<u8>,
}

impl Grid {
    fn new(side: usize) -> Self {
        Grid {
            side,
            cells: vec![0; side * side],
        }
    }

    fn ensure(&mut self, need: usize) {
        if need < self.side {
            return;
        }
        let mut side = self.side;
        while side <= need {
            side *= 2;
        }
        let mut cells = vec![0; side * side];
        for a in 0..self.side {
            cells[a * side..a * side + self.side].copy_from_slice(&self.cells[a * self.side..(a + 1) * self.side]);
        }
        self.side = side;
        self.cells = cells;
    }

    #[inline]
    fn cell(&mut self, (a, b): Coord) -> &mut u8 {
        &mut self.cells[a as usize * self.side + b as usize]
    }

    #[inline]
    fn get(&self, (a, b): Coord) -> u8 {
        self.cells[a as usize * self.side + b as usize]
    }
}

type HeapEntry = Reverse<(u64, i64, i64)>;

struct Generator {
    gram: Gram,
    grid: Grid,
    heap: BinaryHeap<HeapEntry>,
    members: Vec<(Coord, usize)>,
    max_coord: i64,
}

/// Relative width of the float window inside which norms are compared exactly.
const WINDOW: f64 = 1e-9;

impl Generator {
    fn new(cfg: &UlamConfig) -> Self {
        Generator {
            gram: cfg.gram(),
            grid: Grid::new(64),
            heap: BinaryHeap::new(),
            members: Vec::new(),
            max_coord: 0,
        }
    }

    fn push(&mut self, c: Coord) {
        self.heap.push(Reverse((self.gram.approx(c).to_bits(), c.0, c.1)));
    }

    fn admissible(&self, c: Coord) -> bool {
        self.grid.get(c) == 1
    }

    /// Adds members and the sums they form with everything already present.
    fn admit(&mut self, batch: &[Coord], step: usize) {
        for &(a, b) in batch {
            self.max_coord = self.max_coord.max(a).max(b);
        }
        self.grid.ensure(2 * self.max_coord as usize + 1);
        for &w in batch {
            *self.grid.cell(w) |= MEMBER;
            for i in 0..self.members.len() {
                let u = self.members[i].0;
                let s = (w.0 + u.0, w.1 + u.1);
                let cell = self.grid.cell(s);
                let count = *cell & COUNT;
                if count < 2 {
                    *cell += 1;
                    if count == 0 && *cell & MEMBER == 0 {
                        self.push(s);
                    }
                }
            }
            self.members.push((w, step));
        }
    }

    /// Pops the exact minimal admissible candidates. With `take = false` the
    /// heap is restored and only the norm is reported.
    fn next_batch(&mut self, take: bool) -> Option<(Vec<Coord>, GoldenValue)> {
        let mut window: Vec<(u64, Coord)> = Vec::new();
        let mut limit = f64::NAN;
        while let Some(&Reverse((bits, a, b))) = self.heap.peek() {
            let approx = f64::from_bits(bits);
            if !window.is_empty() && approx > limit {
                break;
            }
            self.heap.pop();
            if !self.admissible((a, b)) {
                continue;
            }
            if window.is_empty() {
                limit = approx * (1.0 + WINDOW) + f64::MIN_POSITIVE;
            }
            window.push((bits, (a, b)));
        }
        if window.is_empty() {
            return None;
        }
        let exact: Vec<GoldenValue> = window.iter().map(|&(_, c)| self.gram.exact(c)).collect();
        let min = exact.iter().min().expect("nonempty").clone();
        let mut batch = Vec::new();
        for ((bits, c), e) in window.into_iter().zip(&exact) {
            if take && *e == min {
                batch.push(c);
            } else {
                self.heap.push(Reverse((bits, c.0, c.1)));
            }
        }
        batch.sort();
        Some((batch, min))
    }
}

/// Runs `cfg.max_steps` batch steps from `{v0, v1}`.
pub fn ulam_generate(cfg: &UlamConfig) -> Result<UlamState> {
    cfg.validate()?;
    let mut g = Generator::new(cfg);
    g.admit(&[(1, 0), (0, 1)], 0);
    let mut step_log = Vec::with_capacity(cfg.max_steps);
    for step in 1..=cfg.max_steps {
        let Some((batch, norm2)) = g.next_batch(true) else {
            break;
        };
        g.admit(&batch, step);
        step_log.push(StepRecord {
            step,
            added: batch,
            norm2,
        });
    }
    let frontier = g.next_batch(false).map(|(_, n)| n);
    let steps_done = step_log.len();
    let entry = g.members.iter().copied().collect();
    Ok(UlamState {
        config: cfg.clone(),
        members: g.members,
        entry,
        step_log,
        steps_done,
        frontier,
    })
}

/// Lattice coordinates predicted by the structure theorem:
/// `(n, 1)`, `(1, n)` for `n ≥ 0`, and `(a, b)` with both odd and `≥ 3`.
pub fn structure_predicate(a: i64, b: i64) -> bool {
    if a < 0 || b < 0 {
        return false;
    }
    a == 1 || b == 1 || (a >= 3 && b >= 3 && a % 2 == 1 && b % 2 == 1)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Mismatch {
    pub a: i64,
    pub b: i64,
    pub member: bool,
    pub predicted: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureReport {
    pub mismatches: Vec<Mismatch>,
    pub safe_region_size: usize,
    pub frontier: Option<f64>,
}

impl UlamState {
    pub fn is_member(&self, c: Coord) -> bool {
        self.entry.contains_key(&c)
    }

    pub fn entry_step(&self, c: Coord) -> Option<usize> {
        self.entry.get(&c).copied()
    }

    pub fn norm2(&self, c: Coord) -> GoldenValue {
        self.config.gram().exact(c)
    }

    /// Whether every lattice vector of norm at most that of `c` has its
    /// membership settled.
    pub fn is_settled(&self, c: Coord) -> bool {
        self.frontier.as_ref().is_some_and(|f| self.norm2(c) < *f)
    }

    /// Nonzero lattice points `(a, b)`, `a, b ≥ 0`, strictly inside the frontier.
    pub fn safe_region(&self) -> Vec<Coord> {
        let Some(f) = &self.frontier else {
            return Vec::new();
        };
        let gram = self.config.gram();
        let ff = f.to_f64();
        let mut out = Vec::new();
        // the cross term is nonnegative, so a²·|v0|² < frontier bounds a
        for a in 0.. {
            if a > 0 && gram.af * (a * a) as f64 > ff * (1.0 + WINDOW) {
                break;
            }
            for b in 0.. {
                let c = (a, b);
                let approx = gram.approx(c);
                if approx > ff * (1.0 + WINDOW) {
                    break;
                }
                if c != (0, 0) && gram.exact(c) < *f {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Members with `a + b = n + 1`, sorted.
    pub fn segment_points(&self, n: i64) -> Vec<Coord> {
        let mut v: Vec<Coord> = self
            .members
            .iter()
            .map(|&(c, _)| c)
            .filter(|&(a, b)| a + b == n + 1)
            .collect();
        v.sort();
        v
    }

    /// A segment is complete once both endpoints lie inside the frontier;
    /// the norm is convex along the segment, so every point on it is settled.
    pub fn segment_complete(&self, n: i64) -> bool {
        n >= 0 && self.is_settled((n + 1, 0)) && self.is_settled((0, n + 1))
    }

    pub fn largest_complete_segment(&self) -> Option<i64> {
        (1..).take_while(|&n| self.segment_complete(n)).last()
    }
}

/// Compares membership with [`structure_predicate`] on the safe region.
pub fn verify_structure(state: &UlamState) -> StructureReport {
    let region = state.safe_region();
    let mismatches = region
        .iter()
        .filter_map(|&(a, b)| {
            let member = state.is_member((a, b));
            let predicted = structure_predicate(a, b);
            (member != predicted).then_some(Mismatch {
                a,
                b,
                member,
                predicted,
            })
        })
        .collect();
    StructureReport {
        mismatches,
        safe_region_size: region.len(),
        frontier: state.frontier.as_ref().map(GoldenValue::to_f64),
    }
}

/// Points on segment `n` predicted by the structure theorem (`n ≥ 1`).
pub fn segment_count_formula(n: i64) -> i64 {
    if n % 2 == 0 {
        2
    } else {
        (n + 1) / 2
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentTimingRow {
    pub n: i64,
    pub t_min: Option<usize>,
    pub t_max: Option<usize>,
    pub count: usize,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentTiming {
    pub rows: Vec<SegmentTimingRow>,
}

impl SegmentTiming {
    pub fn complete(&self) -> impl Iterator<Item = &SegmentTimingRow> {
        self.rows.iter().filter(|r| r.complete)
    }

    pub fn row(&self, n: i64) -> Option<&SegmentTimingRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Entry-time range per segment, for every segment that has a member.
pub fn timing_series(state: &UlamState) -> Result<SegmentTiming> {
    if state.steps_done < 2 {
        return Err(Error::Precondition("timing needs at least 2 steps".into()));
    }
    let mut by_n: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &((a, b), k) in &state.members {
        if a + b >= 2 {
            by_n.entry(a + b - 1).or_default().push(k);
        }
    }
    let top = by_n.keys().last().copied().unwrap_or(0);
    let rows = (1..=top)
        .map(|n| {
            let ks = by_n.get(&n).map(Vec::as_slice).unwrap_or(&[]);
            SegmentTimingRow {
                n,
                t_min: ks.iter().min().copied(),
                t_max: ks.iter().max().copied(),
                count: ks.len(),
                complete: state.segment_complete(n),
            }
        })
        .collect();
    Ok(SegmentTiming { rows })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadraticFit {
    pub c: f64,
    pub r2: f64,
    pub n_lo: i64,
    pub n_hi: i64,
    pub points: usize,
}

/// Least squares `y ≈ c·n²` through the origin, with `R² = 1 − SS_res/SS_tot`.
pub fn fit_quadratic(data: &[(i64, f64)]) -> Result<QuadraticFit> {
    if data.len() < 2 {
        return Err(Error::EmptyInput("quadratic fit needs at least 2 points".into()));
    }
    let x2 = |n: i64| (n * n) as f64;
    let c = data.iter().map(|&(n, y)| x2(n) * y).sum::<f64>() / data.iter().map(|&(n, _)| x2(n).powi(2)).sum::<f64>();
    let mean = data.iter().map(|&(_, y)| y).sum::<f64>() / data.len() as f64;
    let ss_res: f64 = data.iter().map(|&(n, y)| (y - c * x2(n)).powi(2)).sum();
    let ss_tot: f64 = data.iter().map(|&(_, y)| (y - mean).powi(2)).sum();
    Ok(QuadraticFit {
        c,
        r2: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        n_lo: data.iter().map(|d| d.0).min().unwrap(),
        n_hi: data.iter().map(|d| d.0).max().unwrap(),
        points: data.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TimingReport {
    pub fit_max: QuadraticFit,
    pub fit_min: QuadraticFit,
    /// max/min of `T_max(n)/n²` over the fitted range.
    pub band_max: f64,
    pub band_min: f64,
}

/// Quadratic fits of `T_max` and `T_min` over complete segments with `n ≥ n_lo`.
pub fn timing_report(timing: &SegmentTiming, n_lo: i64) -> Result<TimingReport> {
    let rows: Vec<&SegmentTimingRow> = timing.complete().filter(|r| r.n >= n_lo && r.count > 0).collect();
    let series = |f: fn(&SegmentTimingRow) -> Option<usize>| -> Vec<(i64, f64)> {
        rows.iter()
            .map(|r| (r.n, f(r).expect("nonempty segment") as f64))
            .collect()
    };
    let tmax = series(|r| r.t_max);
    let tmin = series(|r| r.t_min);
    let band = |d: &[(i64, f64)]| {
        let ratios: Vec<f64> = d.iter().map(|&(n, y)| y / (n * n) as f64).collect();
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    };
    Ok(TimingReport {
        fit_max: fit_quadratic(&tmax)?,
        fit_min: fit_quadratic(&tmin)?,
        band_max: band(&tmax),
        band_min: band(&tmin),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MinMagnitude {
    pub n: i64,
    pub minimizers: Vec<Coord>,
    pub prediction: Vec<Coord>,
    pub norm2: GoldenValue,
    /// For even `n` every minimizer is predicted; for odd `n` the predicted
    /// vector is among the minimizers (ties are allowed).
    pub holds: bool,
}

/// Exact minimizers of the norm among structure-theorem points on segment `n`.
pub fn min_magnitude_vector(n: i64, cfg: &UlamConfig) -> Result<MinMagnitude> {
    if n < 2 {
        return Err(Error::Precondition(format!("min magnitude needs n >= 2, got {n}")));
    }
    let gram = cfg.gram();
    let pts: Vec<(Coord, GoldenValue)> = (0..=n + 1)
        .map(|a| (a, n + 1 - a))
        .filter(|&(a, b)| structure_predicate(a, b))
        .map(|c| (c, gram.exact(c)))
        .collect();
    let norm2 = pts.iter().map(|(_, v)| v).min().expect("boundary points exist").clone();
    let minimizers: Vec<Coord> = pts.iter().filter(|(_, v)| *v == norm2).map(|(c, _)| *c).collect();
    let prediction = match n % 4 {
        0 | 2 => vec![(n, 1), (1, n)],
        1 => vec![((n + 1) / 2, (n + 1) / 2)],
        _ => vec![((n + 3) / 2, (n - 1) / 2)],
    };
    let holds = if n % 2 == 0 {
        minimizers.iter().all(|m| prediction.contains(m))
    } else {
        minimizers.contains(&prediction[0])
    };
    Ok(MinMagnitude {
        n,
        minimizers,
        prediction,
        norm2,
        holds,
    })
}

/// Relative slack on the radicand of `λ₀`.
pub const RADICAND_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PerStepBound {
    pub bound_at_r: f64,
    pub asymptotic: f64,
}

/// `8‖P₃ − P₁‖ / min(‖v0‖, ‖v1‖)` with `P₁ = v0 + λ₀(v0+v1)`,
/// `P₃ = (v0+v1)/‖v0+v1‖·(‖v0+v1‖ + R)`, and its large-R limit
/// `8(‖v0+v1‖ + ‖v0‖) / min(‖v0‖, ‖v1‖)`.
pub fn points_per_step_bound(cfg: &UlamConfig, r: f64) -> Result<PerStepBound> {
    let (x0, y0) = cfg.v0.to_f64();
    let (x1, y1) = cfg.v1.to_f64();
    let (sx, sy) = (x0 + x1, y0 + y1);
    let n0 = x0.hypot(y0);
    let ns = sx.hypot(sy);
    let m = n0.min(x1.hypot(y1));
    // ‖v0‖·‖v0+v1‖·cos(angle between them) is the dot product
    let radicand = r * r - n0 * n0 - 2.0 * (x0 * sx + y0 * sy);
    // a decimal R just below R_min (e.g. 1.7320508 for √3) counts as R_min
    if radicand < -RADICAND_TOLERANCE * r * r || !radicand.is_finite() {
        return Err(Error::Domain(format!("R = {r} is too small: radicand {radicand} < 0")));
    }
    let l0 = radicand.max(0.0).sqrt() / ns;
    let p1 = (x0 + l0 * sx, y0 + l0 * sy);
    let k = (ns + r) / ns;
    let p3 = (sx * k, sy * k);
    Ok(PerStepBound {
        bound_at_r: 8.0 * (p3.0 - p1.0).hypot(p3.1 - p1.1) / m,
        asymptotic: 8.0 * (ns + n0) / m,
    })
}

/// Largest number of vectors admitted in a single step.
pub fn empirical_max_per_step(state: &UlamState) -> usize {
    state.step_log.iter().map(|s| s.added.len()).max().unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FillOrderRow {
    pub n: i64,
    pub completion_step: usize,
    /// Members on later segments already present at that step.
    pub later_points: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FillOrderReport {
    pub rows: Vec<FillOrderRow>,
    /// Consecutive complete segments `(n, n+1)` that finished out of order.
    pub violations: Vec<(i64, i64)>,
    /// Least squares `later_points ≈ c·n²` over the rows with `n ≥ 2`.
    pub later_fit: Option<QuadraticFit>,
    pub later_max_ratio: f64,
}

pub fn fill_order_check(state: &UlamState) -> Result<FillOrderReport> {
    let timing = timing_series(state)?;
    let rows: Vec<FillOrderRow> = timing
        .complete()
        .filter_map(|r| r.t_max.map(|t| (r.n, t)))
        .map(|(n, t)| FillOrderRow {
            n,
            completion_step: t,
            later_points: state
                .members
                .iter()
                .filter(|&&((a, b), k)| a + b - 1 > n && k <= t)
                .count(),
        })
        .collect();
    let violations = rows
        .windows(2)
        .filter(|w| w[1].n == w[0].n + 1 && w[0].completion_step > w[1].completion_step)
        .map(|w| (w[0].n, w[1].n))
        .collect();
    let data: Vec<(i64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 2)
        .map(|r| (r.n, r.later_points as f64))
        .collect();
    let later_max_ratio = data.iter().map(|&(n, y)| y / (n * n) as f64).fold(0.0, f64::max);
    Ok(FillOrderReport {
        later_fit: fit_quadratic(&data).ok(),
        rows,
        violations,
        later_max_ratio,
    })
}

fn point_json(p: &Point) -> Value {
    json!({ "x": p.x, "y": p.y })
}

impl UlamState {
    /// Members, step log, timing series and the configuration.
    pub fn to_json(&self) -> Value {
        let members: Vec<Value> = self
            .members
            .iter()
            .map(|&(c, k)| {
                let (x, y) = self.config.position(c).to_f64();
                json!({ "a": c.0, "b": c.1, "step": k, "x": x, "y": y })
            })
            .collect();
        let log: Vec<Value> = self
            .step_log
            .iter()
            .map(|s| json!({ "step": s.step, "added": s.added, "norm2": s.norm2 }))
            .collect();
        json!({
            "config": {
                "v0": point_json(&self.config.v0),
                "v1": point_json(&self.config.v1),
                "maxSteps": self.config.max_steps,
                "mode": self.config.mode,
            },
            "stepsDone": self.steps_done,
            "memberCount": self.members.len(),
            "members": members,
            "stepLog": log,
            "timing": timing_series(self).ok(),
            "maxPerStep": empirical_max_per_step(self),
        })
    }
}
