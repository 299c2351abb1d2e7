//! Monte Carlo driver, exhaustive low-weight fault verification, interval
//! statistics, CSV I/O and the log-log fits used to read slopes and
//! thresholds off the results.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use crate::decoder::{Decoder, Metric, Verdict};
use crate::error::{DecodeError, HarnessError};
use crate::frame::PauliFrame;
use crate::graph::{extract_events, DetectionEvent};
use crate::layout::{Basis, CodeLayout};
use crate::schedule::RoundSchedule;
use crate::sim::{FrameSimulator, NoiseConfig, ScheduledFault};

/// Failures needed before a point counts as an estimate rather than a bound.
pub const MIN_REPORTED_FAILURES: u64 = 10;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub min_failures: u64,
    pub max_trials: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub distances: Vec<usize>,
    pub p_values: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// Noisy rounds per trial; `None` means `d`.
    pub rounds: Option<usize>,
    pub stop: StopRule,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            distances: vec![3],
            p_values: vec![1e-3],
            metrics: vec![Metric::Standard],
            rounds: None,
            stop: StopRule {
                min_failures: 100,
                max_trials: 1_000_000,
            },
            seed: 1,
            output: None,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, HarnessError> {
    value
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| HarnessError::InvalidSpec(format!("bad value '{s}' for {key}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .trim()
        .parse()
        .map_err(|_| HarnessError::InvalidSpec(format!("bad value '{value}' for {key}")))
}

impl ExperimentSpec {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let value = value.trim();
        match key.trim() {
            "d" | "distances" => self.distances = parse_list(key, value)?,
            "p_g" | "p" | "p_values" => self.p_values = parse_list(key, value)?,
            "metric" | "metrics" => {
                self.metrics = value
                    .split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Metric>().map_err(HarnessError::InvalidSpec))
                    .collect::<Result<_, _>>()?
            }
            "T" | "rounds" => self.rounds = Some(parse_one(key, value)?),
            "min_failures" => self.stop.min_failures = parse_one(key, value)?,
            "max_trials" => self.stop.max_trials = parse_one(key, value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(HarnessError::InvalidSpec(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Flat `key = value` text; `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self, HarnessError> {
        let mut spec = Self::default();
        spec.apply_config_str(text)?;
        Ok(spec)
    }

    pub fn apply_config_str(&mut self, text: &str) -> Result<(), HarnessError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::InvalidSpec(format!("line {}: expected key = value", n + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.distances.is_empty() || self.distances.contains(&0) {
            return Err(HarnessError::InvalidSpec(
                "distances must be positive".into(),
            ));
        }
        if self.p_values.is_empty() || self.p_values.iter().any(|p| !(0.0..1.0).contains(p)) {
            return Err(HarnessError::InvalidSpec(
                "p_g values must lie in [0, 1)".into(),
            ));
        }
        if self.metrics.is_empty() {
            return Err(HarnessError::InvalidSpec("no metric given".into()));
        }
        if self.rounds == Some(0) {
            return Err(HarnessError::InvalidSpec("rounds must be positive".into()));
        }
        if self.stop.min_failures < MIN_REPORTED_FAILURES {
            return Err(HarnessError::InvalidSpec(format!(
                "min_failures must be at least {MIN_REPORTED_FAILURES}"
            )));
        }
        if self.stop.max_trials == 0 {
            return Err(HarnessError::InvalidSpec(
                "max_trials must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Wilson score interval for `k` successes out of `n` at 95%.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let low = if k == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if k == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub d: usize,
    pub p_g: f64,
    pub metric: Metric,
    pub rounds: usize,
    pub trials: u64,
    pub failures: u64,
    /// Point estimate, or the upper confidence limit when no failure was seen.
    pub p_fail: f64,
    /// `1 - (1 - p_fail)^(1/T)`; equals `p_fail / T` for small `p_fail`.
    pub err_per_round: f64,
    pub mean_rounds: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Set when fewer than the requested failures were observed.
    pub bound_flag: bool,
}

impl ResultRow {
    pub fn from_counts(
        d: usize,
        p_g: f64,
        metric: Metric,
        rounds: usize,
        trials: u64,
        failures: u64,
        min_failures: u64,
    ) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials);
        let p_fail = if failures == 0 {
            ci_high
        } else {
            failures as f64 / trials as f64
        };
        let err_per_round = per_round_rate(p_fail, rounds);
        let mean_rounds = (failures > 0 && p_fail < 0.3).then(|| 1.0 / err_per_round);
        Self {
            d,
            p_g,
            metric,
            rounds,
            trials,
            failures,
            p_fail,
            err_per_round,
            mean_rounds,
            ci_low,
            ci_high,
            bound_flag: failures < min_failures,
        }
    }

    /// Usable as a point in a fit.
    pub fn is_estimate(&self) -> bool {
        !self.bound_flag && self.failures > 0
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "d",
    "p_g",
    "metric",
    "T",
    "trials",
    "failures",
    "p_fail",
    "err_per_round",
    "mean_rounds",
    "ci_low",
    "ci_high",
    "bound_flag",
];

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| HarnessError::Parse(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.d.to_string(),
            r.p_g.to_string(),
            r.metric.to_string(),
            r.rounds.to_string(),
            r.trials.to_string(),
            r.failures.to_string(),
            r.p_fail.to_string(),
            r.err_per_round.to_string(),
            r.mean_rounds.map_or(String::new(), |m| m.to_string()),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            u8::from(r.bound_flag).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| HarnessError::Parse(e.to_string()))?
        .clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(HarnessError::Parse(format!(
            "unexpected header {headers:?}"
        )));
    }
    let mut rows = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| HarnessError::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize| {
            HarnessError::Parse(format!(
                "row {}: bad {} '{}'",
                n + 1,
                CSV_HEADER[i],
                field(i)
            ))
        };
        macro_rules! num {
            ($i:expr) => {
                field($i).parse().map_err(|_| bad($i))?
            };
        }
        rows.push(ResultRow {
            d: num!(0),
            p_g: num!(1),
            metric: field(2).parse().map_err(|_| bad(2))?,
            rounds: num!(3),
            trials: num!(4),
            failures: num!(5),
            p_fail: num!(6),
            err_per_round: num!(7),
            mean_rounds: if field(8).is_empty() {
                None
            } else {
                Some(num!(8))
            },
            ci_low: num!(9),
            ci_high: num!(10),
            bound_flag: match field(11) {
                "0" => false,
                "1" => true,
                _ => return Err(bad(11)),
            },
        });
    }
    Ok(rows)
}

/// Seed of the generator family for one (d, p_g) point. Both metrics share
/// it so their trials see identical fault samples.
pub fn point_seed(seed: u64, d: usize, p_g: f64) -> u64 {
    let mut x =
        seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ p_g.to_bits().rotate_left(17);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Trials of one batch: sizes depend only on counts so far, which keeps the
/// totals independent of the thread count.
fn next_batch(trials: u64, failures: u64, stop: &StopRule) -> u64 {
    let remaining = stop.max_trials - trials;
    let size = if failures == 0 {
        trials.max(256)
    } else {
        let needed = stop.min_failures.saturating_sub(failures) as f64;
        let rate = failures as f64 / trials as f64;
        ((needed / rate * 1.1).ceil() as u64).clamp(256, 4 * trials.max(256))
    };
    size.min(remaining)
}

/// Per-trial record for the verdict stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialVerdict {
    pub seed: u64,
    pub trial: u64,
    pub metric: Metric,
    pub verdict: Verdict,
}

impl fmt::Display for TrialVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.seed, self.trial, self.metric, self.verdict
        )
    }
}

/// Run one (d, p_g, metric) point until the stop rule is met.
pub fn run_point(
    decoder: &Decoder<'_>,
    schedule: &RoundSchedule,
    p_g: f64,
    seed: u64,
    stop: &StopRule,
    stream: &mut dyn FnMut(&TrialVerdict),
) -> Result<(u64, u64), HarnessError> {
    let layout = decoder.layout();
    let rounds = decoder.rounds();
    let sim = FrameSimulator::new(layout, schedule);
    let noise = NoiseConfig::new(p_g, seed)?;
    let (mut trials, mut failures) = (0u64, 0u64);
    while failures < stop.min_failures && trials < stop.max_trials {
        let batch = next_batch(trials, failures, stop);
        let verdicts: Vec<Verdict> = (trials..trials + batch)
            .into_par_iter()
            .map(|t| -> Result<Verdict, HarnessError> {
                let (record, frame) = sim.run_trial(&noise, rounds, t)?;
                Ok(decoder.decode_and_verify(&record, &frame)?)
            })
            .collect::<Result<_, _>>()?;
        for (k, &verdict) in verdicts.iter().enumerate() {
            stream(&TrialVerdict {
                seed,
                trial: trials + k as u64,
                metric: decoder.metric(),
                verdict,
            });
        }
        failures += verdicts.iter().filter(|v| v.is_failure()).count() as u64;
        trials += batch;
    }
    Ok((trials, failures))
}

/// All rows of an experiment, ordered by d, then metric, then p_g.
/// `stream` sees every trial's verdict in trial order.
pub fn run_experiment(
    spec: &ExperimentSpec,
    stream: &mut dyn FnMut(&TrialVerdict),
) -> Result<Vec<ResultRow>, HarnessError> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &d in &spec.distances {
        let layout = CodeLayout::new(d)?;
        let schedule = RoundSchedule::new(&layout);
        let rounds = spec.rounds.unwrap_or(d);
        for &metric in &spec.metrics {
            let decoder = Decoder::new(&layout, &schedule, metric, rounds)?;
            for &p in &spec.p_values {
                let seed = point_seed(spec.seed, d, p);
                let (trials, failures) =
                    run_point(&decoder, &schedule, p, seed, &spec.stop, stream)?;
                rows.push(ResultRow::from_counts(
                    d,
                    p,
                    metric,
                    rounds,
                    trials,
                    failures,
                    spec.stop.min_failures,
                ));
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

impl SlopeFit {
    /// Fitted per-round error rate at `p_g`.
    pub fn predict(&self, p_g: f64) -> f64 {
        (self.intercept + self.slope * p_g.ln()).exp()
    }
}

/// Least-squares fit of `ln y` against `ln x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<SlopeFit, HarnessError> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(HarnessError::InsufficientPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        points: points.len(),
    })
}

/// Slope of log error-per-round against log p_g over the estimate rows.
pub fn fit_slope(rows: &[ResultRow]) -> Result<SlopeFit, HarnessError> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.is_estimate())
        .map(|r| (r.p_g, r.err_per_round))
        .collect();
    fit_loglog(&pts)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdEstimate {
    pub p_cross: f64,
    /// 95% interval of the crossing.
    pub low: f64,
    pub high: f64,
}

impl ThresholdEstimate {
    pub fn overlaps(&self, other: &ThresholdEstimate) -> bool {
        self.low <= other.high && other.low <= self.high
    }
}

/// `ln r` and its variance for one row, with `r = 1 - (1 - P)^(1/T)`.
fn log_rate(r: &ResultRow) -> (f64, f64) {
    let n = r.trials as f64;
    let p = r.failures as f64 / n;
    let t = r.rounds as f64;
    let rate = per_round_rate(p, r.rounds);
    // d(ln rate)/dP by the chain rule; binomial variance of P.
    let deriv = (1.0 - p).powf(1.0 / t - 1.0) / (t * rate);
    (rate.ln(), deriv * deriv * p * (1.0 - p) / n)
}

/// Crossing of the per-round error curves of a smaller and a larger
/// distance. With `g = ln r_small - ln r_large`, which falls through zero at
/// threshold, a weighted least-squares line in `ln p_g` is fitted to the two
/// points bracketing the first sign change and one neighbour on each side;
/// the interval is the delta-method 95% range of its root.
pub fn estimate_threshold(
    small: &[ResultRow],
    large: &[ResultRow],
) -> Result<ThresholdEstimate, HarnessError> {
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    for a in small
        .iter()
        .filter(|r| r.failures > 0 && r.failures < r.trials)
    {
        if let Some(b) = large
            .iter()
            .find(|b| b.p_g == a.p_g && b.failures > 0 && b.failures < b.trials)
        {
            let (la, va) = log_rate(a);
            let (lb, vb) = log_rate(b);
            pts.push((a.p_g.ln(), la - lb, va + vb));
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    if pts.len() < 2 {
        return Err(HarnessError::InsufficientPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let k = (0..pts.len() - 1)
        .find(|&k| pts[k].1 > 0.0 && pts[k + 1].1 <= 0.0)
        .ok_or(HarnessError::NoCrossing)?;
    let window = &pts[k.saturating_sub(1)..(k + 3).min(pts.len())];

    let sw: f64 = window.iter().map(|p| 1.0 / p.2).sum();
    let mx = window.iter().map(|p| p.0 / p.2).sum::<f64>() / sw;
    let my = window.iter().map(|p| p.1 / p.2).sum::<f64>() / sw;
    let sxx: f64 = window.iter().map(|p| (p.0 - mx).powi(2) / p.2).sum();
    let sxy: f64 = window.iter().map(|p| (p.0 - mx) * (p.1 - my) / p.2).sum();
    let slope = sxy / sxx;
    // Also rejects a NaN slope.
    if slope.partial_cmp(&0.0) != Some(std::cmp::Ordering::Less) {
        return Err(HarnessError::NoCrossing);
    }
    let root = mx - my / slope;
    // Delta method: var(my) = 1/sw and var(slope) = 1/sxx, independent.
    let dx = root - mx;
    let sigma = ((1.0 / sw) + dx * dx / sxx).sqrt() / slope.abs();
    Ok(ThresholdEstimate {
        p_cross: root.exp(),
        low: (root - Z95 * sigma).exp(),
        high: (root + Z95 * sigma).exp(),
    })
}

/// Per-round failure rate of a trial of `rounds` rounds that fails with
/// probability `p_fail`: `1 - (1 - P)^(1/T)`, which is `P/T` for small `P`.
pub fn per_round_rate(p_fail: f64, rounds: usize) -> f64 {
    -((-p_fail).ln_1p() / rounds as f64).exp_m1()
}

/// What one fault does to one check type's graph: its detection events in
/// absolute rounds and a representative residual data-error component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Effect {
    events: Vec<DetectionEvent>,
    residual: Vec<usize>,
    logical: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveReport {
    pub d: usize,
    pub weight: usize,
    pub metric: Metric,
    pub rounds: usize,
    /// Single (round, location, class) choices in the window.
    pub fault_choices: usize,
    pub fault_sets: u64,
    pub failures: u64,
    /// Distinct per-graph decoding problems solved.
    pub distinct_decodes: usize,
    /// Distinct problems whose verdict changed when events were presented
    /// in reverse order.
    pub tie_instabilities: usize,
    pub examples: Vec<Vec<ScheduledFault>>,
}

impl ExhaustiveReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Verdict flag (logical flip) of decoding the XOR of the given effects on
/// one graph, plus the flag with reversed event order.
fn decode_combination(
    decoder: &Decoder<'_>,
    layout: &CodeLayout,
    basis: Basis,
    effects: &[&Effect],
) -> Result<(bool, bool), HarnessError> {
    let mut events: Vec<DetectionEvent> = Vec::new();
    let mut residual = PauliFrame::new(layout.site_count());
    let err = basis.detected_error();
    for e in effects {
        events.extend_from_slice(&e.events);
        for &q in &e.residual {
            residual.flip(err, q);
        }
    }
    // Same order as `extract_events`, so ties break as in a real decode.
    events.sort_by_key(|e| (e.round, e.site));
    let mut reduced: Vec<DetectionEvent> = Vec::with_capacity(events.len());
    for ev in events {
        if reduced.last() == Some(&ev) {
            reduced.pop();
        } else {
            reduced.push(ev);
        }
    }
    let outcome = |evs: &[DetectionEvent]| -> Result<bool, HarnessError> {
        let mut frame = residual.clone();
        for site in decoder.correction_for(evs, basis)? {
            frame.flip(err, layout.index(site));
        }
        let sites = layout.stabilizer_violations(&frame, basis);
        if !sites.is_empty() {
            return Err(DecodeError::UnsatisfiedStabilizer { basis, sites }.into());
        }
        Ok(layout.logical_parity(&frame, err))
    };
    let forward = outcome(&reduced)?;
    reduced.reverse();
    let backward = outcome(&reduced)?;
    Ok((forward, backward))
}

/// Decode every set of `weight` distinct single faults placed in a window of
/// `weight + 1` noisy rounds.
///
/// The simulation is linear in the faults and the two check types decode
/// independently, so each fault is simulated once and each distinct
/// per-graph combination of effects is decoded once.
pub fn exhaustive_weight_test(
    d: usize,
    weight: usize,
    metric: Metric,
) -> Result<ExhaustiveReport, HarnessError> {
    exhaustive_weight_test_with_limit(d, weight, metric, 16)
}

/// As [`exhaustive_weight_test`], keeping at most `max_examples` failing sets.
pub fn exhaustive_weight_test_with_limit(
    d: usize,
    weight: usize,
    metric: Metric,
    max_examples: usize,
) -> Result<ExhaustiveReport, HarnessError> {
    if weight == 0 {
        return Err(HarnessError::InvalidSpec(
            "fault weight must be at least 1".into(),
        ));
    }
    let layout = CodeLayout::new(d)?;
    let schedule = RoundSchedule::new(&layout);
    let rounds = weight + 1;
    let decoder = Decoder::new(&layout, &schedule, metric, rounds)?;
    let sim = FrameSimulator::new(&layout, &schedule);

    let mut faults = Vec::new();
    for round in 1..=rounds {
        for location in schedule.fault_locations() {
            faults.push(ScheduledFault { round, location });
        }
    }

    // Per basis: effect id of every fault, and the distinct effects.
    let mut ids: [Vec<u32>; 2] = [
        Vec::with_capacity(faults.len()),
        Vec::with_capacity(faults.len()),
    ];
    let mut effects: [Vec<Effect>; 2] = [Vec::new(), Vec::new()];
    let mut index: [HashMap<Effect, u32>; 2] = [HashMap::new(), HashMap::new()];
    for f in &faults {
        let (record, frame) = sim.simulate(rounds, std::slice::from_ref(f))?;
        for (b, basis) in Basis::BOTH.into_iter().enumerate() {
            let err = basis.detected_error();
            let effect = Effect {
                events: extract_events(&layout, &record, basis),
                residual: frame.support(err),
                logical: layout.logical_parity(&frame, err),
            };
            // Same events and logical class: residuals differ by a
            // stabilizer, so one representative stands for all.
            let key = Effect {
                residual: Vec::new(),
                ..effect.clone()
            };
            let next = effects[b].len() as u32;
            let id = *index[b].entry(key).or_insert_with(|| {
                effects[b].push(effect);
                next
            });
            ids[b].push(id);
        }
    }

    let mut memo: [HashMap<Vec<u32>, bool>; 2] = [HashMap::new(), HashMap::new()];
    let mut tie_instabilities = 0;
    let mut report = ExhaustiveReport {
        d,
        weight,
        metric,
        rounds,
        fault_choices: faults.len(),
        fault_sets: 0,
        failures: 0,
        distinct_decodes: 0,
        tie_instabilities: 0,
        examples: Vec::new(),
    };

    let mut combo: Vec<usize> = (0..weight).collect();
    let mut key: Vec<u32> = Vec::with_capacity(weight);
    if weight > faults.len() {
        return Ok(report);
    }
    loop {
        let mut failed = false;
        for b in 0..2 {
            key.clear();
            key.extend(combo.iter().map(|&i| ids[b][i]));
            key.sort_unstable();
            // Identical effects cancel in pairs.
            let mut k = 0;
            while k + 1 < key.len() {
                if key[k] == key[k + 1] {
                    key.drain(k..k + 2);
                } else {
                    k += 1;
                }
            }
            let flag = match memo[b].get(key.as_slice()) {
                Some(&f) => f,
                None => {
                    let refs: Vec<&Effect> =
                        key.iter().map(|&id| &effects[b][id as usize]).collect();
                    let (fwd, bwd) = decode_combination(&decoder, &layout, Basis::BOTH[b], &refs)?;
                    if fwd != bwd {
                        tie_instabilities += 1;
                    }
                    memo[b].insert(key.clone(), fwd);
                    fwd
                }
            };
            failed |= flag;
        }
        report.fault_sets += 1;
        if failed {
            report.failures += 1;
            if report.examples.len() < max_examples {
                report
                    .examples
                    .push(combo.iter().map(|&i| faults[i]).collect());
            }
        }

        // Next combination in lexicographic order.
        let n = faults.len();
        let mut i = weight;
        while i > 0 && combo[i - 1] == n - weight + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        combo[i - 1] += 1;
        for j in i..weight {
            combo[j] = combo[j - 1] + 1;
        }
    }
    report.distinct_decodes = memo[0].len() + memo[1].len();
    report.tie_instabilities = tie_instabilities;
    Ok(report)
}

/// Human-readable failing fault set.
pub fn describe_fault_set(schedule: &RoundSchedule, set: &[ScheduledFault]) -> String {
    set.iter()
        .map(|f| format!("r{} {}", f.round, schedule.describe(f.location)))
        .collect::<Vec<_>>()
        .join(" + ")
}
