//! Stochastic Pauli-frame simulation of repeated syndrome extraction.
//!
//! A trial runs a noiseless reference round 0, noisy rounds `1..=T` and a
//! noiseless closure round `T+1`. The record stores, for each round and
//! ancilla, whether the outcome differs from the noiseless outcome.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::frame::PauliFrame;
use crate::layout::{CodeLayout, Site};
use crate::schedule::{CompiledOp, FaultClass, FaultLocation, RoundSchedule};

/// Outcome flips for every ancilla in rounds `0..=T+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SyndromeRecord {
    rounds: usize,
    slots: usize,
    values: Vec<bool>,
}

impl SyndromeRecord {
    pub fn new(slots: usize, rounds: usize) -> Self {
        Self {
            rounds,
            slots,
            values: vec![false; slots * (rounds + 2)],
        }
    }

    /// Number of noisy rounds `T`.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    #[inline]
    pub fn get(&self, slot: usize, round: usize) -> bool {
        self.values[round * self.slots + slot]
    }

    #[inline]
    pub fn toggle(&mut self, slot: usize, round: usize) {
        self.values[round * self.slots + slot] ^= true;
    }

    pub fn xor_with(&mut self, other: &SyndromeRecord) {
        assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a ^= b;
        }
    }

    pub fn is_trivial(&self) -> bool {
        !self.values.iter().any(|&v| v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    /// Probability that any one fault location is afflicted.
    pub p_g: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(p_g: f64, seed: u64) -> Result<Self, SimError> {
        if !(0.0..1.0).contains(&p_g) {
            return Err(SimError::BadProbability(p_g));
        }
        Ok(Self { p_g, seed })
    }
}

/// A fault placed in a specific noisy round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScheduledFault {
    pub round: usize,
    pub location: FaultLocation,
}

/// Apply `class` to `frame` right after `op` has executed. Returns whether
/// the op's measurement record is flipped.
pub(crate) fn apply_fault(frame: &mut PauliFrame, op: &CompiledOp, class: FaultClass) -> bool {
    match (*op, class) {
        (CompiledOp::Init { qubit, basis }, FaultClass::InitFlip) => {
            frame.flip(basis.detected_error(), qubit);
            false
        }
        (CompiledOp::Measure { .. }, FaultClass::MeasureFlip) => true,
        (CompiledOp::Idle { qubit }, FaultClass::Idle(p)) => {
            frame.apply(qubit, p);
            false
        }
        (CompiledOp::Cnot { control, target }, FaultClass::Cnot(pc, pt)) => {
            frame.apply(control, pc);
            frame.apply(target, pt);
            false
        }
        _ => unreachable!("fault class {class} does not fit op {op:?}"),
    }
}

/// Apply the fault at `location` to `frame`. Measurement flips leave the
/// frame alone and return `true` (the record bit toggles).
pub fn inject_fault(
    frame: &mut PauliFrame,
    schedule: &RoundSchedule,
    location: FaultLocation,
) -> Result<bool, SimError> {
    let op = schedule
        .compiled()
        .get(location.op)
        .ok_or(SimError::UnknownOp {
            op: location.op,
            ops: schedule.ops().len(),
        })?;
    if !schedule.ops()[location.op]
        .fault_classes()
        .contains(&location.class)
    {
        return Err(SimError::ClassMismatch {
            op: location.op,
            class: location.class.to_string(),
        });
    }
    Ok(apply_fault(frame, op, location.class))
}

#[derive(Clone, Copy, Debug)]
pub struct FrameSimulator<'a> {
    layout: &'a CodeLayout,
    schedule: &'a RoundSchedule,
}

impl<'a> FrameSimulator<'a> {
    pub fn new(layout: &'a CodeLayout, schedule: &'a RoundSchedule) -> Self {
        Self { layout, schedule }
    }

    pub fn layout(&self) -> &'a CodeLayout {
        self.layout
    }

    pub fn schedule(&self) -> &'a RoundSchedule {
        self.schedule
    }

    /// Run `rounds` noisy rounds with exactly the given faults. Returns the
    /// record and the data-qubit frame after the closure round.
    pub fn simulate(
        &self,
        rounds: usize,
        faults: &[ScheduledFault],
    ) -> Result<(SyndromeRecord, PauliFrame), SimError> {
        if rounds == 0 {
            return Err(SimError::NoRounds);
        }
        let ops = self.schedule.ops().len();
        for f in faults {
            if f.round == 0 || f.round > rounds {
                return Err(SimError::FaultRoundOutOfRange {
                    round: f.round,
                    rounds,
                });
            }
            if f.location.op >= ops {
                return Err(SimError::UnknownOp {
                    op: f.location.op,
                    ops,
                });
            }
            if !self.schedule.ops()[f.location.op]
                .fault_classes()
                .contains(&f.location.class)
            {
                return Err(SimError::ClassMismatch {
                    op: f.location.op,
                    class: f.location.class.to_string(),
                });
            }
        }
        let mut sorted = faults.to_vec();
        sorted.sort_by_key(|f| (f.round, f.location.op));
        Ok(self.run_sorted(rounds, &sorted))
    }

    fn run_sorted(&self, rounds: usize, faults: &[ScheduledFault]) -> (SyndromeRecord, PauliFrame) {
        let mut frame = PauliFrame::new(self.layout.site_count());
        let mut record = SyndromeRecord::new(self.layout.syndrome_sites().len(), rounds);
        let mut next = 0;
        for round in 0..=rounds + 1 {
            for (op_index, op) in self.schedule.compiled().iter().enumerate() {
                let mut flip = false;
                match *op {
                    CompiledOp::Init { qubit, .. } => frame.clear(qubit),
                    CompiledOp::Cnot { control, target } => frame.propagate_cnot(control, target),
                    CompiledOp::Idle { .. } | CompiledOp::Measure { .. } => {}
                }
                while next < faults.len()
                    && faults[next].round == round
                    && faults[next].location.op == op_index
                {
                    flip ^= apply_fault(&mut frame, op, faults[next].location.class);
                    next += 1;
                }
                if let CompiledOp::Measure { qubit, basis, slot } = *op {
                    if frame.component(basis.detected_error(), qubit) ^ flip {
                        record.toggle(slot, round);
                    }
                }
            }
        }
        for &s in self.layout.syndrome_sites() {
            frame.clear(self.layout.index(s));
        }
        (record, frame)
    }

    /// Draw i.i.d. faults: every op of every noisy round is afflicted with
    /// probability `p_g`, with a uniformly chosen class.
    pub fn sample_faults<R: Rng>(
        &self,
        rng: &mut R,
        p_g: f64,
        rounds: usize,
    ) -> Vec<ScheduledFault> {
        let mut out = Vec::new();
        if p_g <= 0.0 {
            return out;
        }
        let ops = self.schedule.ops();
        let total = (ops.len() * rounds) as u64;
        let log_q = (-p_g).ln_1p();
        let mut pos: u64 = 0;
        loop {
            // Geometric gap to the next afflicted location.
            let u: f64 = 1.0 - rng.random::<f64>();
            let gap = (u.ln() / log_q).floor();
            if !gap.is_finite() || gap >= (total - pos) as f64 {
                break;
            }
            pos += gap as u64;
            let op = (pos % ops.len() as u64) as usize;
            let round = (pos / ops.len() as u64) as usize + 1;
            let classes = ops[op].fault_classes();
            let class = classes[rng.random_range(0..classes.len())];
            out.push(ScheduledFault {
                round,
                location: FaultLocation { op, class },
            });
            pos += 1;
            if pos >= total {
                break;
            }
        }
        out
    }

    /// One reproducible trial: stream `trial` of the seeded generator.
    pub fn run_trial(
        &self,
        noise: &NoiseConfig,
        rounds: usize,
        trial: u64,
    ) -> Result<(SyndromeRecord, PauliFrame), SimError> {
        let faults = self.sample_trial_faults(noise, rounds, trial)?;
        Ok(self.run_sorted(rounds, &faults))
    }

    pub fn sample_trial_faults(
        &self,
        noise: &NoiseConfig,
        rounds: usize,
        trial: u64,
    ) -> Result<Vec<ScheduledFault>, SimError> {
        if rounds == 0 {
            return Err(SimError::NoRounds);
        }
        if !(0.0..1.0).contains(&noise.p_g) {
            return Err(SimError::BadProbability(noise.p_g));
        }
        let mut rng = trial_rng(noise.seed, trial);
        Ok(self.sample_faults(&mut rng, noise.p_g, rounds))
    }

    /// `round site class` per injected fault.
    pub fn trace(&self, faults: &[ScheduledFault]) -> String {
        let mut out = String::new();
        for f in faults {
            let op = &self.schedule.ops()[f.location.op];
            let sites: Vec<String> = op.sites.iter().map(Site::to_string).collect();
            writeln!(
                out,
                "{} {} {} {}",
                f.round,
                op.step,
                sites.join(" "),
                f.location.class
            )
            .unwrap();
        }
        out
    }
}

/// Independent generator per (seed, trial) pair.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Pauli;
    use crate::layout::Basis;
    use crate::schedule::GateKind;
    use proptest::prelude::*;

    fn setup(d: usize) -> (CodeLayout, RoundSchedule) {
        let l = CodeLayout::new(d).unwrap();
        let s = RoundSchedule::new(&l);
        (l, s)
    }

    fn op_index(s: &RoundSchedule, kind: GateKind, step: usize, sites: &[Site]) -> usize {
        s.ops()
            .iter()
            .position(|op| op.kind == kind && op.step == step && op.sites == sites)
            .expect("op present")
    }

    fn events(l: &CodeLayout, rec: &SyndromeRecord) -> Vec<(Site, usize)> {
        let mut out = Vec::new();
        for t in 1..=rec.rounds() + 1 {
            for (slot, &s) in l.syndrome_sites().iter().enumerate() {
                if rec.get(slot, t) != rec.get(slot, t - 1) {
                    out.push((s, t));
                }
            }
        }
        out
    }

    #[test]
    fn noiseless_trial_is_clean() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        let (rec, frame) = sim
            .run_trial(&NoiseConfig::new(0.0, 1).unwrap(), 5, 0)
            .unwrap();
        assert!(rec.is_trivial());
        assert!(frame.is_clean());
    }

    #[test]
    fn measurement_flip_toggles_one_bit() {
        let (l, s) = setup(3);
        let sim = FrameSimulator::new(&l, &s);
        let anc = Site::new(1, 2);
        let op = op_index(&s, GateKind::MeasureSyndrome, 5, &[anc]);
        let f = ScheduledFault {
            round: 2,
            location: FaultLocation {
                op,
                class: FaultClass::MeasureFlip,
            },
        };
        let (rec, frame) = sim.simulate(3, &[f]).unwrap();
        assert!(frame.is_clean());
        assert_eq!(events(&l, &rec), vec![(anc, 2), (anc, 3)]);
        let mut frame = PauliFrame::new(l.site_count());
        assert!(inject_fault(&mut frame, &s, f.location).unwrap());
        assert!(frame.is_clean());
    }

    #[test]
    fn init_flip_gives_time_pair() {
        let (l, s) = setup(3);
        let sim = FrameSimulator::new(&l, &s);
        let anc = Site::new(1, 2);
        let op = op_index(&s, GateKind::InitSyndrome, 0, &[anc]);
        let f = ScheduledFault {
            round: 1,
            location: FaultLocation {
                op,
                class: FaultClass::InitFlip,
            },
        };
        let (rec, frame) = sim.simulate(2, &[f]).unwrap();
        assert!(frame.is_clean());
        assert_eq!(events(&l, &rec), vec![(anc, 1), (anc, 2)]);
    }

    #[test]
    fn two_qubit_xx_equals_x_before_gate() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        // Every CNOT: XX after the gate vs X on the control after the
        // previous op on that qubit (equivalently, before the gate).
        for (op, g) in s
            .ops()
            .iter()
            .enumerate()
            .filter(|(_, g)| g.kind == GateKind::Cnot)
        {
            let after = ScheduledFault {
                round: 1,
                location: FaultLocation {
                    op,
                    class: FaultClass::Cnot(Pauli::X, Pauli::X),
                },
            };
            let (ra, fa) = sim.simulate(1, &[after]).unwrap();

            // Find the op acting on the control in the previous step.
            let control = g.sites[0];
            let prev = s
                .ops()
                .iter()
                .position(|o| o.step + 1 == g.step && o.sites.contains(&control))
                .unwrap();
            let class = match s.ops()[prev].kind {
                GateKind::Cnot => {
                    if s.ops()[prev].sites[0] == control {
                        FaultClass::Cnot(Pauli::X, Pauli::I)
                    } else {
                        FaultClass::Cnot(Pauli::I, Pauli::X)
                    }
                }
                GateKind::InitSyndrome => {
                    // X on a fresh |+> ancilla is trivial: the frame ends
                    // up holding the X stabilizer itself.
                    assert_eq!(g.basis, Some(Basis::X));
                    assert!(ra.is_trivial());
                    assert!(l.stabilizer_violations(&fa, Basis::Z).is_empty());
                    assert!(!l.logical_parity(&fa, Basis::X));
                    continue;
                }
                _ => FaultClass::Idle(Pauli::X),
            };
            let before = ScheduledFault {
                round: 1,
                location: FaultLocation { op: prev, class },
            };
            let (rb, fb) = sim.simulate(1, &[before]).unwrap();
            assert_eq!(ra, rb, "record mismatch at op {op}");
            assert_eq!(fa, fb, "frame mismatch at op {op}");
        }
    }

    #[test]
    fn hook_fault_spans_two_space_one_time() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        // X-check ancilla at (4,3); an X error after layer 2 spreads to the
        // west and south data qubits.
        let anc = Site::new(4, 3);
        let op = s
            .ops()
            .iter()
            .position(|o| o.kind == GateKind::Cnot && o.step == 2 && o.sites[0] == anc)
            .unwrap();
        let f = ScheduledFault {
            round: 1,
            location: FaultLocation {
                op,
                class: FaultClass::Cnot(Pauli::X, Pauli::I),
            },
        };
        let (rec, frame) = sim.simulate(1, &[f]).unwrap();
        let ev = events(&l, &rec);
        assert_eq!(ev, vec![(Site::new(3, 2), 1), (Site::new(5, 4), 2)]);
        assert_eq!(
            frame.support(Basis::X),
            vec![l.index(Site::new(4, 2)), l.index(Site::new(5, 3))]
        );
    }

    #[test]
    fn idle_data_error_gives_adjacent_space_pair() {
        let (l, s) = setup(3);
        let sim = FrameSimulator::new(&l, &s);
        let q = Site::new(2, 2);
        let op = op_index(&s, GateKind::IdleData, 5, &[q]);
        let f = ScheduledFault {
            round: 1,
            location: FaultLocation {
                op,
                class: FaultClass::Idle(Pauli::X),
            },
        };
        let (rec, _) = sim.simulate(1, &[f]).unwrap();
        assert_eq!(
            events(&l, &rec),
            vec![(Site::new(1, 2), 2), (Site::new(3, 2), 2)]
        );

        let edge = Site::new(0, 2);
        let op = op_index(&s, GateKind::IdleData, 5, &[edge]);
        let f = ScheduledFault {
            round: 1,
            location: FaultLocation {
                op,
                class: FaultClass::Idle(Pauli::X),
            },
        };
        let (rec, _) = sim.simulate(1, &[f]).unwrap();
        assert_eq!(events(&l, &rec), vec![(Site::new(1, 2), 2)]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (l, s) = setup(3);
        let sim = FrameSimulator::new(&l, &s);
        assert_eq!(sim.simulate(0, &[]), Err(SimError::NoRounds));
        assert!(NoiseConfig::new(1.0, 0).is_err());
        assert!(NoiseConfig::new(-0.1, 0).is_err());
        let bad = ScheduledFault {
            round: 3,
            location: FaultLocation {
                op: 0,
                class: FaultClass::InitFlip,
            },
        };
        assert!(matches!(
            sim.simulate(2, &[bad]),
            Err(SimError::FaultRoundOutOfRange { .. })
        ));
        let mismatch = ScheduledFault {
            round: 1,
            location: FaultLocation {
                op: 0,
                class: FaultClass::MeasureFlip,
            },
        };
        assert!(matches!(
            sim.simulate(1, &[mismatch]),
            Err(SimError::ClassMismatch { .. })
        ));
    }

    #[test]
    fn same_seed_same_trial() {
        let (l, s) = setup(5);
        let sim = FrameSimulator::new(&l, &s);
        let noise = NoiseConfig::new(0.01, 42).unwrap();
        for trial in 0..20 {
            assert_eq!(
                sim.run_trial(&noise, 5, trial).unwrap(),
                sim.run_trial(&noise, 5, trial).unwrap()
            );
        }
        assert_ne!(
            sim.sample_trial_faults(&noise, 5, 0).unwrap(),
            sim.sample_trial_faults(&noise, 5, 1).unwrap()
        );
    }

    #[test]
    fn fault_rate_matches_probability() {
        let (l, s) = setup(3);
        let sim = FrameSimulator::new(&l, &s);
        let noise = NoiseConfig::new(0.02, 7).unwrap();
        let trials = 4000;
        let n: usize = (0..trials)
            .map(|t| sim.sample_trial_faults(&noise, 3, t).unwrap().len())
            .sum();
        let expected = 0.02 * (s.ops().len() * 3) as f64 * trials as f64;
        let sigma = expected.sqrt();
        assert!(
            (n as f64 - expected).abs() < 5.0 * sigma,
            "{n} vs {expected}"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn simulation_is_linear(d in 2usize..=5, seed in any::<u64>()) {
            let (l, s) = setup(d);
            let sim = FrameSimulator::new(&l, &s);
            let noise = NoiseConfig::new(0.01, seed).unwrap();
            let a = sim.sample_trial_faults(&noise, 3, 0).unwrap();
            let b = sim.sample_trial_faults(&noise, 3, 1).unwrap();
            let (mut ra, mut fa) = sim.simulate(3, &a).unwrap();
            let (rb, fb) = sim.simulate(3, &b).unwrap();
            let both: Vec<_> = a.iter().chain(&b).copied().collect();
            let (rab, fab) = sim.simulate(3, &both).unwrap();
            ra.xor_with(&rb);
            fa.xor_with(&fb);
            prop_assert_eq!(ra, rab);
            prop_assert_eq!(fa, fab);
        }
    }
}
