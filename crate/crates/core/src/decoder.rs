//! Matching decoder: detection events of each check type are paired by
//! minimum-weight perfect matching under a separation metric, and the
//! chains between matched events are applied to the residual frame.

use std::fmt;
use std::str::FromStr;

use crate::error::{DecodeError, GraphError};
use crate::frame::PauliFrame;
use crate::graph::{
    extract_events, DetectionEvent, DetectorGraph, PropagationMetric, SeparationMetric,
    StandardMetric,
};
use crate::layout::{Basis, CodeLayout, Site};
use crate::matching::{augment_with_boundary, min_weight_perfect_matching};
use crate::schedule::RoundSchedule;
use crate::sim::SyndromeRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Standard,
    Propagation,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Standard, Metric::Propagation];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Standard => "standard",
            Metric::Propagation => "propagation",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "manhattan" => Ok(Metric::Standard),
            "propagation" | "prop" => Ok(Metric::Propagation),
            other => Err(format!(
                "unknown metric '{other}' (expected standard or propagation)"
            )),
        }
    }
}

/// Outcome of decoding one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Success,
    LogicalX,
    LogicalZ,
    Both,
}

impl Verdict {
    pub fn from_flags(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Verdict::Success,
            (true, false) => Verdict::LogicalX,
            (false, true) => Verdict::LogicalZ,
            (true, true) => Verdict::Both,
        }
    }

    pub fn is_failure(self) -> bool {
        self != Verdict::Success
    }

    /// Whether the logical observable of `basis` type flipped.
    pub fn flipped(self, which: Basis) -> bool {
        matches!(
            (self, which),
            (Verdict::LogicalX, Basis::X) | (Verdict::LogicalZ, Basis::Z) | (Verdict::Both, _)
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Success => "success",
            Verdict::LogicalX => "logical-x",
            Verdict::LogicalZ => "logical-z",
            Verdict::Both => "logical-xz",
        })
    }
}

enum Metrics<'a> {
    Standard([StandardMetric<'a>; 2]),
    Propagation(Box<[PropagationMetric; 2]>),
}

/// Decoder for a fixed code, metric and number of noisy rounds.
pub struct Decoder<'a> {
    layout: &'a CodeLayout,
    metric: Metric,
    rounds: usize,
    metrics: Metrics<'a>,
}

fn basis_slot(basis: Basis) -> usize {
    match basis {
        Basis::X => 0,
        Basis::Z => 1,
    }
}

impl<'a> Decoder<'a> {
    pub fn new(
        layout: &'a CodeLayout,
        schedule: &RoundSchedule,
        metric: Metric,
        rounds: usize,
    ) -> Result<Self, GraphError> {
        let metrics = match metric {
            Metric::Standard => Metrics::Standard([
                StandardMetric::new(layout, Basis::X),
                StandardMetric::new(layout, Basis::Z),
            ]),
            Metric::Propagation => {
                let build = |basis| -> Result<PropagationMetric, GraphError> {
                    let graph = DetectorGraph::build(layout, schedule, basis)?;
                    Ok(PropagationMetric::new(layout, &graph, rounds))
                };
                Metrics::Propagation(Box::new([build(Basis::X)?, build(Basis::Z)?]))
            }
        };
        Ok(Self {
            layout,
            metric,
            rounds,
            metrics,
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn layout(&self) -> &'a CodeLayout {
        self.layout
    }

    pub fn separation(&self, basis: Basis) -> &dyn SeparationMetric {
        match &self.metrics {
            Metrics::Standard(m) => &m[basis_slot(basis)],
            Metrics::Propagation(m) => &m[basis_slot(basis)],
        }
    }

    /// Data sites to flip for the events of checks of type `basis`.
    pub fn correction_for(
        &self,
        events: &[DetectionEvent],
        basis: Basis,
    ) -> Result<Vec<Site>, DecodeError> {
        let m = self.separation(basis);
        let k = events.len();
        let problem = augment_with_boundary(
            k,
            |i, j| m.pair_separation(&events[i], &events[j]) as u64,
            |i| m.boundary_separation(&events[i]) as u64,
        );
        let matching = min_weight_perfect_matching(&problem)?;
        let mut out = Vec::new();
        for &(a, b) in &matching.pairs {
            match (a < k, b < k) {
                (true, true) => m.pair_correction(&events[a], &events[b], &mut out),
                (true, false) => m.boundary_correction(&events[a], &mut out),
                (false, true) => m.boundary_correction(&events[b], &mut out),
                (false, false) => {}
            }
        }
        Ok(out)
    }

    /// Correction frame for a whole record.
    pub fn decode(&self, record: &SyndromeRecord) -> Result<PauliFrame, DecodeError> {
        if record.rounds() != self.rounds {
            return Err(DecodeError::RoundMismatch {
                expected: self.rounds,
                actual: record.rounds(),
            });
        }
        let mut correction = PauliFrame::new(self.layout.site_count());
        for basis in Basis::BOTH {
            let events = extract_events(self.layout, record, basis);
            for site in self.correction_for(&events, basis)? {
                correction.flip(basis.detected_error(), self.layout.index(site));
            }
        }
        Ok(correction)
    }

    /// Decode, apply the correction to `residual` and classify the result.
    /// A corrected frame that still violates a stabilizer is a decoder bug
    /// and is reported as an error.
    pub fn decode_and_verify(
        &self,
        record: &SyndromeRecord,
        residual: &PauliFrame,
    ) -> Result<Verdict, DecodeError> {
        let mut frame = self.decode(record)?;
        frame.xor_with(residual);
        for basis in Basis::BOTH {
            let sites = self.layout.stabilizer_violations(&frame, basis);
            if !sites.is_empty() {
                return Err(DecodeError::UnsatisfiedStabilizer { basis, sites });
            }
        }
        Ok(Verdict::from_flags(
            self.layout.logical_parity(&frame, Basis::X),
            self.layout.logical_parity(&frame, Basis::Z),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Pauli;
    use crate::schedule::{FaultClass, FaultLocation, GateKind};
    use crate::sim::{FrameSimulator, NoiseConfig, ScheduledFault};

    fn setup(d: usize) -> (CodeLayout, RoundSchedule) {
        let l = CodeLayout::new(d).unwrap();
        let s = RoundSchedule::new(&l);
        (l, s)
    }

    fn hook(s: &RoundSchedule, anc: Site, round: usize) -> ScheduledFault {
        let op = s
            .ops()
            .iter()
            .position(|o| o.kind == GateKind::Cnot && o.step == 2 && o.sites[0] == anc)
            .unwrap();
        ScheduledFault {
            round,
            location: FaultLocation {
                op,
                class: FaultClass::Cnot(Pauli::X, Pauli::I),
            },
        }
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("standard".parse::<Metric>(), Ok(Metric::Standard));
        assert_eq!("Propagation".parse::<Metric>(), Ok(Metric::Propagation));
        assert!("other".parse::<Metric>().is_err());
        assert_eq!(Metric::Propagation.to_string(), "propagation");
    }

    #[test]
    fn verdict_flags() {
        assert_eq!(Verdict::from_flags(false, false), Verdict::Success);
        assert!(Verdict::Both.flipped(Basis::X) && Verdict::Both.flipped(Basis::Z));
        assert!(!Verdict::LogicalX.flipped(Basis::Z));
        assert!(!Verdict::Success.is_failure());
    }

    #[test]
    fn no_faults_no_failure() {
        for d in 1..=7 {
            let (l, s) = setup(d);
            let sim = FrameSimulator::new(&l, &s);
            let (rec, frame) = sim.simulate(d, &[]).unwrap();
            for metric in Metric::ALL {
                let dec = Decoder::new(&l, &s, metric, d).unwrap();
                assert_eq!(dec.decode_and_verify(&rec, &frame), Ok(Verdict::Success));
                assert!(dec.decode(&rec).unwrap().is_clean());
            }
        }
    }

    #[test]
    fn round_mismatch_is_an_error() {
        let (l, s) = setup(3);
        let sim = FrameSimulator::new(&l, &s);
        let (rec, frame) = sim.simulate(2, &[]).unwrap();
        let dec = Decoder::new(&l, &s, Metric::Standard, 3).unwrap();
        assert_eq!(
            dec.decode_and_verify(&rec, &frame),
            Err(DecodeError::RoundMismatch {
                expected: 3,
                actual: 2
            })
        );
    }

    /// Every single circuit fault is corrected by the propagation decoder.
    #[test]
    fn propagation_corrects_every_single_fault() {
        for d in 3..=5 {
            let (l, s) = setup(d);
            let sim = FrameSimulator::new(&l, &s);
            let rounds = 2;
            let dec = Decoder::new(&l, &s, Metric::Propagation, rounds).unwrap();
            for round in 1..=rounds {
                for location in s.fault_locations() {
                    let f = ScheduledFault { round, location };
                    let (rec, frame) = sim.simulate(rounds, &[f]).unwrap();
                    let v = dec.decode_and_verify(&rec, &frame).unwrap();
                    assert_eq!(v, Verdict::Success, "d={d} {}", s.describe(location));
                }
            }
        }
    }

    /// Single data errors are corrected by the standard decoder too.
    #[test]
    fn standard_corrects_single_data_errors() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        let dec = Decoder::new(&l, &s, Metric::Standard, 3).unwrap();
        for location in s.fault_locations() {
            if s.ops()[location.op].kind != GateKind::IdleData {
                continue;
            }
            let f = ScheduledFault { round: 2, location };
            let (rec, frame) = sim.simulate(3, &[f]).unwrap();
            assert_eq!(dec.decode_and_verify(&rec, &frame), Ok(Verdict::Success));
        }
    }

    /// Two chained hook errors at d=7: two adjacent middle events make the
    /// standard metric prefer sending the outer events to opposite
    /// boundaries, which completes a logical operator. The propagation
    /// metric sees each hook as a single edge and undoes both.
    #[test]
    fn chained_hooks_fool_standard_metric_only() {
        let (l, s) = setup(7);
        let sim = FrameSimulator::new(&l, &s);
        let faults = [hook(&s, Site::new(4, 5), 1), hook(&s, Site::new(8, 7), 2)];
        let rounds = 3;
        let (rec, frame) = sim.simulate(rounds, &faults).unwrap();
        let events = extract_events(&l, &rec, Basis::Z);
        assert_eq!(
            events,
            vec![
                DetectionEvent::new(3, 4, 1),
                DetectionEvent::new(5, 6, 2),
                DetectionEvent::new(7, 6, 2),
                DetectionEvent::new(9, 8, 3),
            ]
        );
        assert!(extract_events(&l, &rec, Basis::X).is_empty());

        let std = Decoder::new(&l, &s, Metric::Standard, rounds).unwrap();
        let m = std.separation(Basis::Z);
        let pairs =
            m.pair_separation(&events[0], &events[1]) + m.pair_separation(&events[2], &events[3]);
        let alt = m.boundary_separation(&events[0])
            + m.pair_separation(&events[1], &events[2])
            + m.boundary_separation(&events[3]);
        assert_eq!((pairs, alt), (6, 5));
        assert_eq!(std.decode_and_verify(&rec, &frame), Ok(Verdict::LogicalX));

        let prop = Decoder::new(&l, &s, Metric::Propagation, rounds).unwrap();
        let m = prop.separation(Basis::Z);
        assert_eq!(m.pair_separation(&events[0], &events[1]), 1);
        assert_eq!(m.pair_separation(&events[2], &events[3]), 1);
        assert_eq!(prop.decode_and_verify(&rec, &frame), Ok(Verdict::Success));
    }

    /// Decoding is a pure function of the record.
    #[test]
    fn decoding_is_deterministic() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        let noise = NoiseConfig::new(0.01, 3).unwrap();
        for metric in Metric::ALL {
            let dec = Decoder::new(&l, &s, metric, 5).unwrap();
            for trial in 0..50 {
                let (rec, frame) = sim.run_trial(&noise, 5, trial).unwrap();
                let a = dec.decode(&rec).unwrap();
                let b = dec.decode(&rec).unwrap();
                assert_eq!(a, b);
                dec.decode_and_verify(&rec, &frame).unwrap();
            }
        }
    }

    /// X-type and Z-type decoding do not interact: a Z-only fault pattern
    /// leaves the X part of the correction empty and vice versa.
    #[test]
    fn check_types_decode_independently() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        let dec = Decoder::new(&l, &s, Metric::Propagation, 3).unwrap();
        let data = |p: Pauli| -> Vec<ScheduledFault> {
            s.fault_locations()
                .into_iter()
                .filter(|loc| {
                    s.ops()[loc.op].kind == GateKind::IdleData && loc.class == FaultClass::Idle(p)
                })
                .step_by(7)
                .map(|location| ScheduledFault { round: 2, location })
                .collect()
        };
        let (rec_x, _) = sim.simulate(3, &data(Pauli::X)).unwrap();
        let (rec_z, _) = sim.simulate(3, &data(Pauli::Z)).unwrap();
        let cx = dec.decode(&rec_x).unwrap();
        let cz = dec.decode(&rec_z).unwrap();
        assert!(cx.support(Basis::Z).is_empty());
        assert!(cz.support(Basis::X).is_empty());
        let mut both = rec_x.clone();
        both.xor_with(&rec_z);
        let mut sum = cx.clone();
        sum.xor_with(&cz);
        assert_eq!(dec.decode(&both).unwrap(), sum);
    }
}
