use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use tilestat::stats::{self, BinSpec, DirectionKind, GapNormalization, Histogram, HistogramMeta, PairMode};
use tilestat::tilings::{self, HeckeSearch};
use tilestat::ulam::{self, UlamConfig};
use tilestat::{pc_recursion, Error, PointSet};

use crate::vectors::{parse_range, parse_vector};
use crate::{Cli, Command, Kind, Normalize, PcArgs, Stat, StatsArgs, TilingCmd, UlamArgs, UlamCmd, UlamModeArg, Usage};

/// Library errors caused by bad flags exit 2; everything else exits 1.
fn lift(e: Error) -> anyhow::Error {
    match e {
        Error::Precondition(_) | Error::BinSpec(_) | Error::DegenerateConfig(_) | Error::UnsupportedConstants(_) => {
            Usage(e.to_string()).into()
        }
        e => e.into(),
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T>;
}

impl<T> Lift<T> for tilestat::Result<T> {
    fn lift(self) -> Result<T> {
        self.map_err(lift)
    }
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Tiling(TilingCmd::Gen { model, steps, out }) => {
            let set = tilings::generate_model(model.name(), *steps).lift()?;
            write_json(out, &set)?;
            crate::manifest::write(std::slice::from_ref(out), &[], None)
        }
        Command::Tiling(TilingCmd::Hecke {
            steps,
            depth,
            a_max,
            p_max,
            out,
        }) => {
            let search = HeckeSearch {
                a_max: *a_max,
                p_max: *p_max,
            };
            let reports = tilings::hecke_orbit_check(*steps, *depth, search).lift()?;
            let v = json!({
                "n": steps,
                "depth": depth,
                "aMax": a_max,
                "pMax": p_max,
                "reports": reports,
            });
            write_json(out, &v)?;
            crate::manifest::write(std::slice::from_ref(out), &[], None)
        }
        Command::Stats(args) => run_stats(args),
        Command::Ulam(cmd) => run_ulam(cmd),
        Command::PcDecompose(args) => run_pc(args),
    }
}

fn bins(args: &StatsArgs) -> Result<Option<BinSpec>> {
    args.bins
        .as_deref()
        .map(|s| s.parse::<BinSpec>().map_err(lift))
        .transpose()
}

fn histogram(spec: &BinSpec, values: &[f64], meta: HistogramMeta, pdf: bool) -> Result<Histogram> {
    let h = Histogram::from_values(spec, values).lift()?.with_meta(meta);
    Ok(if pdf { h.to_pdf() } else { h })
}

fn run_stats(args: &StatsArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let set: PointSet =
        serde_json::from_str(&text).map_err(|e| Usage(format!("{} is not a point set: {e}", args.input.display())))?;
    let spec = bins(args)?;
    let kind = match args.kind {
        Kind::Slope => DirectionKind::Slope,
        Kind::Angle => DirectionKind::Angle,
    };
    let source = Some(format!("{} step {}", set.label, set.step));

    let out = match args.stat {
        Stat::SlopeGaps | Stat::AngleGaps => {
            let kind = if args.stat == Stat::SlopeGaps {
                DirectionKind::Slope
            } else {
                DirectionKind::Angle
            };
            let mode = match args.normalize {
                Normalize::Source => GapNormalization::SourceCount,
                Normalize::Distinct => GapNormalization::SeriesLength,
            };
            let d = stats::directions(&set, kind, args.dedupe).lift()?;
            let g = stats::normalized_gaps_with(&d, mode).lift()?;
            let h = spec
                .map(|s| {
                    let meta = HistogramMeta {
                        normalization: Some(g.normalization),
                        normalization_mode: Some(mode),
                        excluded_vertical: Some(d.excluded_vertical),
                        source: source.clone(),
                        ..Default::default()
                    };
                    histogram(&s, &g.gaps, meta, args.pdf)
                })
                .transpose()?;
            json!({
                "stat": if kind == DirectionKind::Slope { "slope-gaps" } else { "angle-gaps" },
                "source": source,
                "directionCount": d.len(),
                "sourceCount": d.source_count,
                "excludedVertical": d.excluded_vertical,
                "deduped": d.deduped,
                "normalization": g.normalization,
                "normalizationMode": mode,
                "gapCount": g.gaps.len(),
                "minGap": g.min(),
                "maxGap": g.max(),
                "gaps": g.gaps,
                "histogram": h,
            })
        }
        Stat::Directions => {
            let d = stats::directions(&set, kind, args.dedupe).lift()?;
            let h = spec
                .map(|s| {
                    let meta = HistogramMeta {
                        excluded_vertical: Some(d.excluded_vertical),
                        source: source.clone(),
                        ..Default::default()
                    };
                    histogram(&s, &d.values, meta, args.pdf)
                })
                .transpose()?;
            json!({
                "stat": "directions",
                "source": source,
                "series": d,
                "histogram": h,
            })
        }
        Stat::Ks => {
            let d = stats::directions(&set, kind, args.dedupe).lift()?;
            let (a, b) = match (&args.range, kind) {
                (Some(r), _) => parse_range(r)?,
                (None, DirectionKind::Angle) => (0.0, std::f64::consts::FRAC_PI_2),
                (None, DirectionKind::Slope) => {
                    return Err(Usage("ks on slopes needs --range a,b".into()).into());
                }
            };
            let ks = stats::equidistribution_stat(&d, a, b).lift()?;
            json!({
                "stat": "ks",
                "source": source,
                "kind": kind,
                "range": [a, b],
                "count": d.len(),
                "statistic": ks,
            })
        }
        Stat::PairCorrelation | Stat::PcSquared => {
            let Some(spec) = spec else {
                return Err(Usage("pair correlation needs --bins".into()).into());
            };
            let mode = if args.stat == Stat::PairCorrelation {
                PairMode::Distance
            } else {
                PairMode::SquaredDistance
            };
            let mut h = stats::pair_correlation(&set, mode, args.scale, &spec).lift()?;
            h.meta.source = source.clone();
            if args.pdf {
                h = h.to_pdf();
            }
            json!({
                "stat": if mode == PairMode::Distance { "pair-correlation" } else { "pc-squared" },
                "source": source,
                "pointCount": set.len(),
                "histogram": h,
            })
        }
    };

    write_json(&args.out, &out)?;
    let mut outputs = vec![args.out.clone()];
    if args.csv {
        let Some(h) = out.get("histogram").filter(|h| !h.is_null()) else {
            return Err(Usage("--csv needs a histogram; pass --bins".into()).into());
        };
        let h: Histogram = serde_json::from_value(h.clone())?;
        let csv = args.out.with_extension("csv");
        fs::write(&csv, h.to_csv()).with_context(|| format!("writing {}", csv.display()))?;
        outputs.push(csv);
    }
    crate::manifest::write(&outputs, &[&args.input], None)
}

fn ulam_config(args: &UlamArgs) -> Result<UlamConfig> {
    match args.mode {
        UlamModeArg::Random2d => {
            if args.v0.is_some() || args.v1.is_some() {
                return Err(Usage("random-2d draws its own vectors; drop --v0/--v1".into()).into());
            }
            Ok(UlamConfig::random(args.seed, args.steps))
        }
        UlamModeArg::Userdef2d => match (&args.v0, &args.v1) {
            (Some(a), Some(b)) => {
                let v0 = parse_vector(a, args.golden)?;
                let v1 = parse_vector(b, args.golden)?;
                UlamConfig::new(v0, v1, args.steps).lift()
            }
            (None, None) if args.golden => Ok(UlamConfig::golden(args.steps)),
            (None, None) => Ok(UlamConfig::unit(args.steps)),
            _ => Err(Usage("give both --v0 and --v1, or neither".into()).into()),
        },
    }
}

fn run_ulam(cmd: &UlamCmd) -> Result<()> {
    let (args, out) = match cmd {
        UlamCmd::Gen(a) | UlamCmd::Timing(a) | UlamCmd::VerifyStructure(a) | UlamCmd::Bounds(a) => (a, a.out.clone()),
    };
    let cfg = ulam_config(args)?;
    let seed = (args.mode == UlamModeArg::Random2d).then_some(args.seed);

    let v = match cmd {
        UlamCmd::Gen(_) => ulam::ulam_generate(&cfg).lift()?.to_json(),
        UlamCmd::Timing(_) => {
            let state = ulam::ulam_generate(&cfg).lift()?;
            let timing = ulam::timing_series(&state).lift()?;
            let report = ulam::timing_report(&timing, args.fit_from).lift()?;
            let fill = ulam::fill_order_check(&state).lift()?;
            json!({
                "stepsDone": state.steps_done,
                "fitFrom": args.fit_from,
                "largestCompleteSegment": state.largest_complete_segment(),
                "rows": timing.rows,
                "fitMax": report.fit_max,
                "fitMin": report.fit_min,
                "bandMax": report.band_max,
                "bandMin": report.band_min,
                "fillOrder": fill,
            })
        }
        UlamCmd::VerifyStructure(_) => {
            let state = ulam::ulam_generate(&cfg).lift()?;
            let report = ulam::verify_structure(&state);
            let top = state.largest_complete_segment().unwrap_or(0);
            let segments: Vec<Value> = (1..=top)
                .map(|n| {
                    let count = state.segment_points(n).len() as i64;
                    json!({ "n": n, "count": count, "formula": ulam::segment_count_formula(n) })
                })
                .collect();
            json!({
                "stepsDone": state.steps_done,
                "mismatches": report.mismatches.len(),
                "mismatchList": report.mismatches,
                "safeRegionSize": report.safe_region_size,
                "frontier": report.frontier,
                "largestCompleteSegment": state.largest_complete_segment(),
                "segments": segments,
            })
        }
        UlamCmd::Bounds(_) => {
            let r = args.r.ok_or_else(|| Usage("bounds needs --r".into()))?;
            let b = ulam::points_per_step_bound(&cfg, r).lift()?;
            let empirical = if args.steps > 0 {
                Some(ulam::empirical_max_per_step(&ulam::ulam_generate(&cfg).lift()?))
            } else {
                None
            };
            json!({
                "r": r,
                "boundAtR": b.bound_at_r,
                "asymptotic": b.asymptotic,
                "steps": args.steps,
                "empiricalMaxPerStep": empirical,
            })
        }
    };
    write_json(&out, &v)?;
    crate::manifest::write(&[out], &[], seed)
}

fn run_pc(args: &PcArgs) -> Result<()> {
    if args.n < 7 {
        return Err(Usage(format!("pc-decompose needs n >= 7, got {}", args.n)).into());
    }
    let d = pc_recursion::stacked_decomposition(args.n).lift()?;
    write_json(&args.out, &d.to_json(!args.no_values))?;
    crate::manifest::write(std::slice::from_ref(&args.out), &[], None)
}
