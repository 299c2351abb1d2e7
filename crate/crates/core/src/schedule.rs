//! One round of simultaneous syndrome extraction.
//!
//! A round has six steps: ancilla initialisation (step 0), four CNOT layers
//! (steps 1-4) and ancilla measurement (step 5). Z stabilizers touch their
//! data qubits in north, west, east, south order; X stabilizers in north,
//! east, west, south order. With that interleaving no data qubit is shared by
//! two CNOTs in the same layer. Z-type checks use data-controlled CNOTs onto
//! a `|0>` ancilla measured in Z; X-type checks use ancilla-controlled CNOTs
//! from a `|+>` ancilla measured in X.

use std::fmt::{self, Write as _};

use crate::frame::Pauli;
use crate::layout::{Basis, CodeLayout, Site, SiteKind};

pub const STEPS_PER_ROUND: usize = 6;
pub const MEASURE_STEP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    InitSyndrome,
    Cnot,
    IdleData,
    IdleSyndrome,
    MeasureSyndrome,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::InitSyndrome => "init",
            GateKind::Cnot => "cnot",
            GateKind::IdleData => "idle-data",
            GateKind::IdleSyndrome => "idle-syndrome",
            GateKind::MeasureSyndrome => "measure",
        })
    }
}

/// A single operation. CNOTs list `[control, target]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub step: usize,
    pub sites: Vec<Site>,
    /// Basis of the stabilizer this op belongs to, for ancilla operations
    /// and CNOTs.
    pub basis: Option<Basis>,
}

impl GateOp {
    pub fn fault_classes(&self) -> &'static [FaultClass] {
        match self.kind {
            GateKind::InitSyndrome => &[FaultClass::InitFlip],
            GateKind::MeasureSyndrome => &[FaultClass::MeasureFlip],
            GateKind::IdleData | GateKind::IdleSyndrome => &IDLE_CLASSES,
            GateKind::Cnot => &CNOT_CLASSES,
        }
    }
}

/// What goes wrong at a fault location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultClass {
    /// Ancilla prepared in the wrong eigenstate (X for a Z check, Z for an X
    /// check).
    InitFlip,
    /// Classical flip of the recorded outcome.
    MeasureFlip,
    /// Pauli applied after an idle step.
    Idle(Pauli),
    /// Two-qubit Pauli `(control, target)` applied after a CNOT.
    Cnot(Pauli, Pauli),
}

impl fmt::Display for FaultClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultClass::InitFlip => f.write_str("init-flip"),
            FaultClass::MeasureFlip => f.write_str("measure-flip"),
            FaultClass::Idle(p) => write!(f, "{p}"),
            FaultClass::Cnot(a, b) => write!(f, "{a}{b}"),
        }
    }
}

const IDLE_CLASSES: [FaultClass; 3] = [
    FaultClass::Idle(Pauli::X),
    FaultClass::Idle(Pauli::Y),
    FaultClass::Idle(Pauli::Z),
];

const CNOT_CLASSES: [FaultClass; 15] = {
    use Pauli::*;
    [
        FaultClass::Cnot(I, X),
        FaultClass::Cnot(I, Y),
        FaultClass::Cnot(I, Z),
        FaultClass::Cnot(X, I),
        FaultClass::Cnot(X, X),
        FaultClass::Cnot(X, Y),
        FaultClass::Cnot(X, Z),
        FaultClass::Cnot(Y, I),
        FaultClass::Cnot(Y, X),
        FaultClass::Cnot(Y, Y),
        FaultClass::Cnot(Y, Z),
        FaultClass::Cnot(Z, I),
        FaultClass::Cnot(Z, X),
        FaultClass::Cnot(Z, Y),
        FaultClass::Cnot(Z, Z),
    ]
};

/// One (op, class) pair of a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultLocation {
    pub op: usize,
    pub class: FaultClass,
}

/// Pre-resolved op used by the simulator hot loop.
#[derive(Clone, Copy, Debug)]
pub(crate) enum CompiledOp {
    Init {
        qubit: usize,
        basis: Basis,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Idle {
        qubit: usize,
    },
    Measure {
        qubit: usize,
        basis: Basis,
        slot: usize,
    },
}

#[derive(Clone, Debug)]
pub struct RoundSchedule {
    ops: Vec<GateOp>,
    compiled: Vec<CompiledOp>,
}

impl PartialEq for RoundSchedule {
    fn eq(&self, other: &Self) -> bool {
        self.ops == other.ops
    }
}

impl Eq for RoundSchedule {}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    North,
    West,
    East,
    South,
}

const Z_ORDER: [Dir; 4] = [Dir::North, Dir::West, Dir::East, Dir::South];
const X_ORDER: [Dir; 4] = [Dir::North, Dir::East, Dir::West, Dir::South];

fn step_neighbor(layout: &CodeLayout, site: Site, dir: Dir) -> Option<Site> {
    let n = layout.grid_size();
    let (r, c) = (site.row, site.col);
    match dir {
        Dir::North => (r > 0).then(|| Site::new(r - 1, c)),
        Dir::West => (c > 0).then(|| Site::new(r, c - 1)),
        Dir::East => (c + 1 < n).then(|| Site::new(r, c + 1)),
        Dir::South => (r + 1 < n).then(|| Site::new(r + 1, c)),
    }
}

impl RoundSchedule {
    pub fn new(layout: &CodeLayout) -> Self {
        let mut ops = Vec::new();
        let basis_of = |s: Site| match layout.kind(s) {
            Some(SiteKind::Syndrome(b)) => b,
            _ => unreachable!("syndrome site"),
        };

        for &s in layout.syndrome_sites() {
            ops.push(GateOp {
                kind: GateKind::InitSyndrome,
                step: 0,
                sites: vec![s],
                basis: Some(basis_of(s)),
            });
        }
        for &q in layout.data_sites() {
            ops.push(GateOp {
                kind: GateKind::IdleData,
                step: 0,
                sites: vec![q],
                basis: None,
            });
        }

        for layer in 0..4 {
            let step = layer + 1;
            let mut busy = vec![false; layout.site_count()];
            let mut idle_syndromes = Vec::new();
            for &s in layout.syndrome_sites() {
                let basis = basis_of(s);
                let dir = match basis {
                    Basis::Z => Z_ORDER[layer],
                    Basis::X => X_ORDER[layer],
                };
                match step_neighbor(layout, s, dir) {
                    Some(q) => {
                        debug_assert!(!busy[layout.index(q)], "data qubit {q} double-booked");
                        busy[layout.index(q)] = true;
                        busy[layout.index(s)] = true;
                        let sites = match basis {
                            Basis::Z => vec![q, s],
                            Basis::X => vec![s, q],
                        };
                        ops.push(GateOp {
                            kind: GateKind::Cnot,
                            step,
                            sites,
                            basis: Some(basis),
                        });
                    }
                    None => idle_syndromes.push(s),
                }
            }
            for s in idle_syndromes {
                ops.push(GateOp {
                    kind: GateKind::IdleSyndrome,
                    step,
                    sites: vec![s],
                    basis: Some(basis_of(s)),
                });
            }
            for &q in layout.data_sites() {
                if !busy[layout.index(q)] {
                    ops.push(GateOp {
                        kind: GateKind::IdleData,
                        step,
                        sites: vec![q],
                        basis: None,
                    });
                }
            }
        }

        for &s in layout.syndrome_sites() {
            ops.push(GateOp {
                kind: GateKind::MeasureSyndrome,
                step: MEASURE_STEP,
                sites: vec![s],
                basis: Some(basis_of(s)),
            });
        }
        for &q in layout.data_sites() {
            ops.push(GateOp {
                kind: GateKind::IdleData,
                step: MEASURE_STEP,
                sites: vec![q],
                basis: None,
            });
        }

        let compiled = ops
            .iter()
            .map(|op| {
                let q = |k: usize| layout.index(op.sites[k]);
                match op.kind {
                    GateKind::InitSyndrome => CompiledOp::Init {
                        qubit: q(0),
                        basis: op.basis.expect("ancilla basis"),
                    },
                    GateKind::Cnot => CompiledOp::Cnot {
                        control: q(0),
                        target: q(1),
                    },
                    GateKind::IdleData | GateKind::IdleSyndrome => CompiledOp::Idle { qubit: q(0) },
                    GateKind::MeasureSyndrome => CompiledOp::Measure {
                        qubit: q(0),
                        basis: op.basis.expect("ancilla basis"),
                        slot: layout.syndrome_slot(op.sites[0]).expect("syndrome site"),
                    },
                }
            })
            .collect();

        Self { ops, compiled }
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub(crate) fn compiled(&self) -> &[CompiledOp] {
        &self.compiled
    }

    /// Every (op, class) pair of the round, in op order.
    pub fn fault_locations(&self) -> Vec<FaultLocation> {
        self.ops
            .iter()
            .enumerate()
            .flat_map(|(op, g)| {
                g.fault_classes()
                    .iter()
                    .map(move |&class| FaultLocation { op, class })
            })
            .collect()
    }

    pub fn describe(&self, loc: FaultLocation) -> String {
        let op = &self.ops[loc.op];
        let sites: Vec<String> = op.sites.iter().map(Site::to_string).collect();
        format!(
            "step{} {} {} {}",
            op.step,
            op.kind,
            sites.join(" "),
            loc.class
        )
    }

    /// Deterministic text dump: `step kind sites` per op.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let sites: Vec<String> = op.sites.iter().map(Site::to_string).collect();
            writeln!(out, "{} {} {}", op.step, op.kind, sites.join(" ")).unwrap();
        }
        out
    }
}
