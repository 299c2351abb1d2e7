//! Detection events and the two separation metrics used for matching.
//!
//! The standard metric is the Manhattan distance between events in
//! same-type sublattice coordinates, so neighbouring checks of one type are
//! one unit apart. The propagation metric is the edge-count distance in a
//! space-time graph whose edges are exactly the event pairs (or single
//! events next to a boundary) that one circuit fault can produce. The edges
//! are found by simulating every fault of the round on its own.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::GraphError;
use crate::frame::PauliFrame;
use crate::layout::{Basis, CodeLayout, Site, SiteKind};
use crate::schedule::{FaultLocation, RoundSchedule};
use crate::sim::{FrameSimulator, ScheduledFault, SyndromeRecord};

/// A space-time point where an ancilla outcome changed, `round` in
/// `1..=T+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectionEvent {
    pub site: Site,
    pub round: usize,
}

impl DetectionEvent {
    pub const fn new(row: usize, col: usize, round: usize) -> Self {
        Self {
            site: Site::new(row, col),
            round,
        }
    }
}

/// Events of checks of type `basis`: outcome at `t` differs from `t-1`.
pub fn extract_events(
    layout: &CodeLayout,
    record: &SyndromeRecord,
    basis: Basis,
) -> Vec<DetectionEvent> {
    let mut out = Vec::new();
    for t in 1..=record.rounds() + 1 {
        for (slot, &site) in layout.syndrome_sites().iter().enumerate() {
            if record.get(slot, t) != record.get(slot, t - 1)
                && layout.kind(site) == Some(SiteKind::Syndrome(basis))
            {
                out.push(DetectionEvent { site, round: t });
            }
        }
    }
    out
}

/// Coordinates of a check on the lattice of checks of its own type.
pub fn sublattice_coords(layout: &CodeLayout, site: Site) -> Option<(Basis, usize, usize)> {
    match layout.kind(site)? {
        SiteKind::Syndrome(Basis::Z) => Some((Basis::Z, (site.row - 1) / 2, site.col / 2)),
        SiteKind::Syndrome(Basis::X) => Some((Basis::X, site.row / 2, (site.col - 1) / 2)),
        SiteKind::Data => None,
    }
}

/// `|i1-i2| + |j1-j2| + |t1-t2|` in sublattice coordinates.
pub fn standard_separation(
    layout: &CodeLayout,
    a: &DetectionEvent,
    b: &DetectionEvent,
) -> Result<u32, GraphError> {
    let (ba, ia, ja) =
        sublattice_coords(layout, a.site).ok_or(GraphError::BasisMismatch { basis: Basis::X })?;
    let (bb, ib, jb) =
        sublattice_coords(layout, b.site).ok_or(GraphError::BasisMismatch { basis: ba })?;
    if ba != bb {
        return Err(GraphError::BasisMismatch { basis: bb });
    }
    Ok((ia.abs_diff(ib) + ja.abs_diff(jb) + a.round.abs_diff(b.round)) as u32)
}

/// Which of the two absorbing boundaries of a check type an error chain ends
/// on: top/bottom for Z checks, left/right for X checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundarySide {
    Low,
    High,
}

impl std::fmt::Display for BoundarySide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundarySide::Low => "low",
            BoundarySide::High => "high",
        })
    }
}

/// Data sites of the straight chain from check `site` to one boundary.
pub fn boundary_chain(layout: &CodeLayout, site: Site, side: BoundarySide) -> Vec<Site> {
    let last = layout.grid_size() - 1;
    match layout.kind(site) {
        Some(SiteKind::Syndrome(Basis::Z)) => match side {
            BoundarySide::Low => (0..site.row)
                .rev()
                .step_by(2)
                .map(|r| Site::new(r, site.col))
                .collect(),
            BoundarySide::High => (site.row + 1..=last)
                .step_by(2)
                .map(|r| Site::new(r, site.col))
                .collect(),
        },
        Some(SiteKind::Syndrome(Basis::X)) => match side {
            BoundarySide::Low => (0..site.col)
                .rev()
                .step_by(2)
                .map(|c| Site::new(site.row, c))
                .collect(),
            BoundarySide::High => (site.col + 1..=last)
                .step_by(2)
                .map(|c| Site::new(site.row, c))
                .collect(),
        },
        _ => Vec::new(),
    }
}

/// Interface the decoder needs from a separation metric.
pub trait SeparationMetric: Sync {
    fn basis(&self) -> Basis;
    fn pair_separation(&self, a: &DetectionEvent, b: &DetectionEvent) -> u32;
    fn boundary_separation(&self, e: &DetectionEvent) -> u32;
    /// Data sites flipped to annihilate the pair `a`, `b`.
    fn pair_correction(&self, a: &DetectionEvent, b: &DetectionEvent, out: &mut Vec<Site>);
    /// Data sites flipped to carry `e` to the boundary.
    fn boundary_correction(&self, e: &DetectionEvent, out: &mut Vec<Site>);
}

/// Manhattan separation on the check sublattice.
#[derive(Clone, Debug)]
pub struct StandardMetric<'a> {
    layout: &'a CodeLayout,
    basis: Basis,
}

impl<'a> StandardMetric<'a> {
    pub fn new(layout: &'a CodeLayout, basis: Basis) -> Self {
        Self { layout, basis }
    }

    fn coords(&self, e: &DetectionEvent) -> (usize, usize) {
        let (b, i, j) = sublattice_coords(self.layout, e.site).expect("event on a check site");
        debug_assert_eq!(b, self.basis);
        (i, j)
    }

    fn nearest_side(&self, e: &DetectionEvent) -> (BoundarySide, u32) {
        let (i, j) = self.coords(e);
        let span = self.layout.distance() - 1;
        let k = match self.basis {
            Basis::Z => i,
            Basis::X => j,
        };
        let (low, high) = (k + 1, span - k);
        if low <= high {
            (BoundarySide::Low, low as u32)
        } else {
            (BoundarySide::High, high as u32)
        }
    }
}

impl SeparationMetric for StandardMetric<'_> {
    fn basis(&self) -> Basis {
        self.basis
    }

    fn pair_separation(&self, a: &DetectionEvent, b: &DetectionEvent) -> u32 {
        let (ia, ja) = self.coords(a);
        let (ib, jb) = self.coords(b);
        (ia.abs_diff(ib) + ja.abs_diff(jb) + a.round.abs_diff(b.round)) as u32
    }

    /// Number of data errors on the shortest straight chain to a boundary of
    /// the matching type; time never contributes.
    fn boundary_separation(&self, e: &DetectionEvent) -> u32 {
        self.nearest_side(e).1
    }

    /// Vertical leg along `a`'s column, then horizontal leg along `b`'s row.
    fn pair_correction(&self, a: &DetectionEvent, b: &DetectionEvent, out: &mut Vec<Site>) {
        let (r0, c0) = (a.site.row, a.site.col);
        let (r1, c1) = (b.site.row, b.site.col);
        let (lo, hi) = (r0.min(r1), r0.max(r1));
        out.extend((lo..hi).step_by(2).map(|r| Site::new(r + 1, c0)));
        let (lo, hi) = (c0.min(c1), c0.max(c1));
        out.extend((lo..hi).step_by(2).map(|c| Site::new(r1, c + 1)));
    }

    fn boundary_correction(&self, e: &DetectionEvent, out: &mut Vec<Site>) {
        let side = self.nearest_side(e).0;
        out.extend(boundary_chain(self.layout, e.site, side));
    }
}

/// One endpoint of a graph edge: a check site and the round offset of its
/// event relative to the round the fault occurred in.
pub type EdgeEnd = (Site, usize);

/// A single-fault connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub a: EdgeEnd,
    /// `None` for a boundary edge.
    pub b: Option<EdgeEnd>,
    pub boundary_side: Option<BoundarySide>,
    /// Data sites whose error component this edge stands for.
    pub payload: Vec<Site>,
    pub sources: Vec<FaultLocation>,
}

/// Edges found by exhaustive single-fault propagation, for the checks of
/// one basis.
#[derive(Clone, Debug)]
pub struct DetectorGraph {
    basis: Basis,
    edges: Vec<GraphEdge>,
    payload_conflicts: usize,
}

impl DetectorGraph {
    /// Simulate every fault of one round in isolation and collect the event
    /// pairs (or single boundary events) it leaves on checks of `basis`.
    pub fn build(
        layout: &CodeLayout,
        schedule: &RoundSchedule,
        basis: Basis,
    ) -> Result<Self, GraphError> {
        let sim = FrameSimulator::new(layout, schedule);
        let err = basis.detected_error();
        let mut by_key: BTreeMap<(EdgeEnd, Option<EdgeEnd>, Option<BoundarySide>), GraphEdge> =
            BTreeMap::new();
        let mut payload_conflicts = 0;

        for location in schedule.fault_locations() {
            let fault = ScheduledFault { round: 1, location };
            let (record, frame) = sim.simulate(1, &[fault])?;
            let events = extract_events(layout, &record, basis);
            let mut ends: Vec<EdgeEnd> = events.iter().map(|e| (e.site, e.round - 1)).collect();
            ends.sort();
            let key = match ends.as_slice() {
                [] => continue,
                [a] => (*a, None),
                [a, b] => (*a, Some(*b)),
                _ => {
                    return Err(GraphError::TooManyEvents {
                        basis,
                        count: ends.len(),
                        fault: schedule.describe(location),
                    })
                }
            };
            let payload: Vec<Site> = frame
                .support(err)
                .into_iter()
                .map(|q| layout.site(q))
                .collect();
            let boundary_side = key
                .1
                .is_none()
                .then(|| payload_side(layout, basis, key.0 .0, &payload));
            match by_key.get_mut(&(key.0, key.1, boundary_side)) {
                Some(edge) => {
                    if !payloads_equivalent(layout, basis, &edge.payload, &payload) {
                        payload_conflicts += 1;
                    }
                    if payload.len() < edge.payload.len() {
                        edge.payload = payload;
                    }
                    edge.sources.push(location);
                }
                None => {
                    by_key.insert(
                        (key.0, key.1, boundary_side),
                        GraphEdge {
                            a: key.0,
                            b: key.1,
                            boundary_side,
                            payload,
                            sources: vec![location],
                        },
                    );
                }
            }
        }
        Ok(Self {
            basis,
            edges: by_key.into_values().collect(),
            payload_conflicts,
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Parallel edges whose payloads differ by more than a stabilizer.
    pub fn payload_conflicts(&self) -> usize {
        self.payload_conflicts
    }

    /// Edge census, one line per edge:
    /// `di dj dt | a b | payload | boundary | sources`.
    pub fn census(&self, schedule: &RoundSchedule) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# {}-check graph, {} edges",
            self.basis,
            self.edges.len()
        )
        .unwrap();
        for e in &self.edges {
            let (sa, ta) = e.a;
            let (delta, other) = match e.b {
                Some((sb, tb)) => (
                    format!(
                        "{} {} {}",
                        sb.row as i64 - sa.row as i64,
                        sb.col as i64 - sa.col as i64,
                        tb as i64 - ta as i64
                    ),
                    format!("{sb}@{tb}"),
                ),
                None => ("- - -".to_string(), "boundary".to_string()),
            };
            let payload: Vec<String> = e.payload.iter().map(Site::to_string).collect();
            let side = e.boundary_side.map_or("-".to_string(), |s| s.to_string());
            let sources: Vec<String> = e.sources.iter().map(|&l| schedule.describe(l)).collect();
            writeln!(
                out,
                "{delta} | {sa}@{ta} {other} | {} | {side} | {}",
                if payload.is_empty() {
                    "-".to_string()
                } else {
                    payload.join(" ")
                },
                sources.join("; ")
            )
            .unwrap();
        }
        out
    }
}

fn frame_of(layout: &CodeLayout, err: Basis, sites: &[Site]) -> PauliFrame {
    let mut f = PauliFrame::new(layout.site_count());
    for &s in sites {
        f.flip(err, layout.index(s));
    }
    f
}

/// Same syndrome and same logical class.
fn payloads_equivalent(layout: &CodeLayout, basis: Basis, a: &[Site], b: &[Site]) -> bool {
    let err = basis.detected_error();
    let mut f = frame_of(layout, err, a);
    f.xor_with(&frame_of(layout, err, b));
    layout.stabilizer_violations(&f, basis).is_empty() && !layout.logical_parity(&f, err)
}

fn payload_side(layout: &CodeLayout, basis: Basis, site: Site, payload: &[Site]) -> BoundarySide {
    let low = boundary_chain(layout, site, BoundarySide::Low);
    if payloads_equivalent(layout, basis, &low, payload) {
        BoundarySide::Low
    } else {
        BoundarySide::High
    }
}

/// The detector graph laid out over rounds `1..=T+1` with all-pairs
/// shortest paths precomputed.
#[derive(Clone, Debug)]
pub struct PropagationMetric {
    basis: Basis,
    rounds: usize,
    /// Check-site grid index -> position among checks of `basis`.
    site_slot: Vec<Option<usize>>,
    checks: usize,
    nodes: usize,
    adjacency: Vec<Vec<(usize, usize)>>,
    edge_payloads: Vec<Vec<Site>>,
    grid_size: usize,
    dist: Vec<u32>,
    parent_edge: Vec<u32>,
    boundary_dist: Vec<u32>,
    boundary_parent: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl PropagationMetric {
    /// Instantiate `graph` for `rounds` noisy rounds: every edge is placed at
    /// every fault round `1..=rounds`.
    pub fn new(layout: &CodeLayout, graph: &DetectorGraph, rounds: usize) -> Self {
        let basis = graph.basis();
        let mut site_slot = vec![None; layout.site_count()];
        let checks = layout.syndrome_sites_of(basis).len();
        for (k, &s) in layout.syndrome_sites_of(basis).iter().enumerate() {
            site_slot[layout.index(s)] = Some(k);
        }
        let nodes = checks * (rounds + 1);
        let boundary = nodes;
        let node =
            |s: Site, t: usize| (t - 1) * checks + site_slot[layout.index(s)].expect("check");

        // Deduplicate by absolute endpoints, keeping the lightest payload.
        let mut unique: BTreeMap<(usize, usize), Vec<Site>> = BTreeMap::new();
        for t in 1..=rounds {
            for e in &graph.edges {
                let u = node(e.a.0, t + e.a.1);
                let v = e.b.map_or(boundary, |(s, dt)| node(s, t + dt));
                let key = (u.min(v), u.max(v));
                match unique.get(&key) {
                    Some(p) if p.len() <= e.payload.len() => {}
                    _ => {
                        unique.insert(key, e.payload.clone());
                    }
                }
            }
        }
        let mut adjacency = vec![Vec::new(); nodes + 1];
        let mut edge_payloads = Vec::with_capacity(unique.len());
        for ((u, v), payload) in unique {
            let id = edge_payloads.len();
            edge_payloads.push(payload);
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }

        let mut metric = Self {
            basis,
            rounds,
            site_slot,
            checks,
            nodes,
            adjacency,
            edge_payloads,
            grid_size: layout.grid_size(),
            dist: vec![NONE; nodes * nodes],
            parent_edge: vec![NONE; nodes * nodes],
            boundary_dist: vec![NONE; nodes],
            boundary_parent: vec![NONE; nodes],
        };
        metric.all_pairs();
        metric
    }

    fn all_pairs(&mut self) {
        let n = self.nodes;
        let mut queue = VecDeque::with_capacity(n + 1);
        for src in 0..n {
            let row = src * n;
            self.dist[row + src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                let du = self.dist[row + u];
                for &(v, id) in &self.adjacency[u] {
                    if v == n || self.dist[row + v] != NONE {
                        continue;
                    }
                    self.dist[row + v] = du + 1;
                    self.parent_edge[row + v] = id as u32;
                    queue.push_back(v);
                }
            }
        }
        // Distances to the virtual boundary node.
        queue.clear();
        for &(v, id) in &self.adjacency[n] {
            if self.boundary_dist[v] == NONE {
                self.boundary_dist[v] = 1;
                self.boundary_parent[v] = id as u32;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = self.boundary_dist[u];
            for &(v, id) in &self.adjacency[u] {
                if v == n || self.boundary_dist[v] != NONE {
                    continue;
                }
                self.boundary_dist[v] = du + 1;
                self.boundary_parent[v] = id as u32;
                queue.push_back(v);
            }
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edge_payloads.len()
    }

    /// Node id of `e`, or `None` if it is off the lattice.
    pub fn node(&self, e: &DetectionEvent) -> Option<usize> {
        if e.round == 0 || e.round > self.rounds + 1 {
            return None;
        }
        if e.site.row >= self.grid_size || e.site.col >= self.grid_size {
            return None;
        }
        let slot = self.site_slot[e.site.row * self.grid_size + e.site.col]?;
        Some((e.round - 1) * self.checks + slot)
    }

    /// Neighbours of node `u` as `(node, edge id)`; the boundary is node
    /// `node_count()`.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adjacency[u]
    }

    pub fn edge_payload(&self, id: usize) -> &[Site] {
        &self.edge_payloads[id]
    }

    fn expect_node(&self, e: &DetectionEvent) -> usize {
        self.node(e)
            .unwrap_or_else(|| panic!("{e:?} is not a node of the {}-check lattice", self.basis))
    }

    fn other_end(&self, v: usize, id: usize) -> usize {
        self.adjacency[v]
            .iter()
            .find(|&&(_, e)| e == id)
            .map(|&(w, _)| w)
            .expect("edge incident to node")
    }
}

impl SeparationMetric for PropagationMetric {
    fn basis(&self) -> Basis {
        self.basis
    }

    fn pair_separation(&self, a: &DetectionEvent, b: &DetectionEvent) -> u32 {
        let (u, v) = (self.expect_node(a), self.expect_node(b));
        self.dist[u * self.nodes + v]
    }

    fn boundary_separation(&self, e: &DetectionEvent) -> u32 {
        self.boundary_dist[self.expect_node(e)]
    }

    fn pair_correction(&self, a: &DetectionEvent, b: &DetectionEvent, out: &mut Vec<Site>) {
        let (src, mut v) = (self.expect_node(a), self.expect_node(b));
        let row = src * self.nodes;
        while v != src {
            let id = self.parent_edge[row + v] as usize;
            out.extend_from_slice(&self.edge_payloads[id]);
            v = self.other_end(v, id);
        }
    }

    fn boundary_correction(&self, e: &DetectionEvent, out: &mut Vec<Site>) {
        let mut v = self.expect_node(e);
        while v != self.nodes {
            let id = self.boundary_parent[v] as usize;
            out.extend_from_slice(&self.edge_payloads[id]);
            v = self.other_end(v, id);
        }
    }
}
