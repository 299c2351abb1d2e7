//! Exact minimum-weight perfect matching on general graphs.
//!
//! The solver is the primal-dual blossom method for maximum-weight matching
//! (Edmonds; Galil's O(n^3) formulation with van Rantwijk's bookkeeping).
//! A minimum-weight perfect matching is the maximum-weight,
//! maximum-cardinality matching under weights `C - w`.

use crate::error::MatchingError;

/// Undirected weighted graph to be perfectly matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingProblem {
    nodes: usize,
    edges: Vec<(usize, usize, u64)>,
}

impl MatchingProblem {
    pub fn new(nodes: usize) -> Self {
        Self {
            nodes,
            edges: Vec::new(),
        }
    }

    /// Complete graph with `weight(i, j)` for every `i < j`.
    pub fn complete(nodes: usize, mut weight: impl FnMut(usize, usize) -> u64) -> Self {
        let mut p = Self::new(nodes);
        for i in 0..nodes {
            for j in i + 1..nodes {
                p.edges.push((i, j, weight(i, j)));
            }
        }
        p
    }

    /// Build from a dense symmetric matrix; `None` entries are missing
    /// weights, which is an error for a complete instance.
    pub fn from_matrix(weights: &[Vec<Option<u64>>]) -> Result<Self, MatchingError> {
        let n = weights.len();
        let mut p = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                let w = weights[i]
                    .get(j)
                    .copied()
                    .flatten()
                    .ok_or(MatchingError::MissingWeight(i, j))?;
                p.edges.push((i, j, w));
            }
        }
        Ok(p)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, weight: u64) {
        self.edges.push((i, j, weight));
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    /// DIMACS-like dump: `p edge n m` then `e i j w` lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.nodes, self.edges.len());
        for &(i, j, w) in &self.edges {
            out.push_str(&format!("e {i} {j} {w}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: u64,
}

impl Matching {
    /// Partner of every node.
    pub fn mates(&self, nodes: usize) -> Vec<usize> {
        let mut m = vec![usize::MAX; nodes];
        for &(a, b) in &self.pairs {
            m[a] = b;
            m[b] = a;
        }
        m
    }
}

pub fn min_weight_perfect_matching(problem: &MatchingProblem) -> Result<Matching, MatchingError> {
    let n = problem.nodes;
    if n % 2 == 1 {
        return Err(MatchingError::OddNodeCount(n));
    }
    for &(i, j, _) in &problem.edges {
        if i >= n || j >= n || i == j {
            return Err(MatchingError::InvalidEdge(i, j));
        }
    }
    if n == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            total_weight: 0,
        });
    }
    let max_w = problem.edges.iter().map(|e| e.2).max().unwrap_or(0);
    let ceiling = max_w as i64 + 1;
    let edges: Vec<(usize, usize, i64)> = problem
        .edges
        .iter()
        .map(|&(i, j, w)| (i, j, 2 * (ceiling - w as i64)))
        .collect();
    let mate = Blossom::new(n, edges).solve(true);

    let mut pairs = Vec::with_capacity(n / 2);
    for (v, &m) in mate.iter().enumerate() {
        if m == NONE {
            return Err(MatchingError::NoPerfectMatching);
        }
        if v < m {
            pairs.push((v, m));
        }
    }
    // Recover original weights (cheapest parallel edge per pair).
    let mut total_weight = 0;
    for &(a, b) in &pairs {
        total_weight += problem
            .edges
            .iter()
            .filter(|&&(i, j, _)| (i, j) == (a, b) || (i, j) == (b, a))
            .map(|e| e.2)
            .min()
            .expect("matched along an edge");
    }
    Ok(Matching {
        pairs,
        total_weight,
    })
}

/// Boundary construction for decoding: real events `0..k`, virtual
/// boundary copies `k..2k`. Real-real edges cost the pair separation, each
/// real event connects to its own virtual copy at its boundary separation,
/// and virtual copies pair up among themselves for free.
pub fn augment_with_boundary(
    count: usize,
    mut pair_sep: impl FnMut(usize, usize) -> u64,
    mut boundary_sep: impl FnMut(usize) -> u64,
) -> MatchingProblem {
    let mut p = MatchingProblem::new(2 * count);
    for i in 0..count {
        for j in i + 1..count {
            p.add_edge(i, j, pair_sep(i, j));
        }
    }
    for i in 0..count {
        p.add_edge(i, count + i, boundary_sep(i));
    }
    for i in 0..count {
        for j in i + 1..count {
            p.add_edge(count + i, count + j, 0);
        }
    }
    p
}

const NONE: usize = usize::MAX;

/// Maximum-weight matching state. Vertices are `0..n`, blossoms `n..2n`;
/// edge endpoints `2k` and `2k+1` are the two ends of edge `k`.
struct Blossom {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Blossom {
    fn new(n: usize, edges: Vec<(usize, usize, i64)>) -> Self {
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * edges.len());
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let m = edges.len();
        Self {
            n,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar: std::iter::repeat_n(maxweight, n)
                .chain(std::iter::repeat_n(0, n))
                .collect(),
            allowedge: vec![false; m],
            queue: Vec::new(),
            edges,
        }
    }

    /// Twice the slack of edge `k` (valid outside blossoms).
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(x) = stack.pop() {
            if x < self.n {
                out.push(x);
            } else {
                stack.extend(self.blossomchilds[x].iter().rev().copied());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let mut w = w;
        let mut t = t;
        let mut p = p;
        loop {
            let b = self.inblossom[w];
            debug_assert!(self.label[w] == 0 && self.label[b] == 0);
            self.label[w] = t;
            self.label[b] = t;
            self.labelend[w] = p;
            self.labelend[b] = p;
            self.bestedge[w] = NONE;
            self.bestedge[b] = NONE;
            if t == 1 {
                let leaves = self.leaves(b);
                self.queue.extend(leaves);
                return;
            }
            // T-blossom: its base's mate becomes S.
            let base = self.blossombase[b];
            let mb = self.mate[base];
            debug_assert_ne!(mb, NONE);
            w = self.endpoint[mb];
            t = 1;
            p = mb ^ 1;
        }
    }

    /// Trace back from `v` and `w`; return the base of a new blossom or
    /// `NONE` if an augmenting path was found.
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("free blossom slot");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for leaf in self.leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }

        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &sub in &path {
            let lists: Vec<Vec<usize>> = match self.blossombestedges[sub].take() {
                Some(list) => vec![list],
                None => self
                    .leaves(sub)
                    .into_iter()
                    .map(|leaf| self.neighbend[leaf].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for list in lists {
                for k in list {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[sub] = NONE;
        }
        let best: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for &k in &best {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossombestedges[b] = Some(best);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len() as isize;
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs
                .iter()
                .position(|&c| c == entrychild)
                .expect("entry child") as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
            let mut p = self.labelend[b];
            while j != 0 {
                let q = self.endpoint[p ^ 1];
                self.label[q] = 0;
                let e = self.blossomendps[b][at(j - endptrick as isize)];
                let r = self.endpoint[e ^ endptrick ^ 1];
                self.label[r] = 0;
                self.assign_label(q, 2, p);
                self.allowedge[e / 2] = true;
                j += jstep;
                p = self.blossomendps[b][at(j - endptrick as isize)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            let q = self.endpoint[p ^ 1];
            self.label[q] = 2;
            self.label[bv] = 2;
            self.labelend[q] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                if let Some(v) = self.leaves(bv).into_iter().find(|&v| self.label[v] != 0) {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let m = self.endpoint[self.mate[self.blossombase[bv]]];
                    self.label[m] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = u8::MAX;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let i = self.blossomchilds[b]
            .iter()
            .position(|&c| c == t)
            .expect("child") as isize;
        let mut j = i;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            let p = self.blossomendps[b][at(j - endptrick as isize)] ^ endptrick;
            if t >= self.n {
                let e = self.endpoint[p];
                self.augment_blossom(t, e);
            }
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            if t >= self.n {
                let e = self.endpoint[p ^ 1];
                self.augment_blossom(t, e);
            }
            let (a, c) = (self.endpoint[p], self.endpoint[p ^ 1]);
            self.mate[a] = p ^ 1;
            self.mate[c] = p;
        }
        self.blossomchilds[b].rotate_left(i as usize);
        self.blossomendps[b].rotate_left(i as usize);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(mut self, maxcardinality: bool) -> Vec<usize> {
        let n = self.n;
        if self.edges.is_empty() {
            return vec![NONE; n];
        }
        for _ in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            let mut augmented = false;
            loop {
                while !augmented {
                    let Some(v) = self.queue.pop() else { break };
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path with tight edges: adjust duals.
                let mut deltatype = 0u8;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !maxcardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..n].iter().min().expect("vertices");
                }
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == 1
                        && self.bestedge[b] != NONE
                    {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // Maximum cardinality reached; final dual adjustment.
                    deltatype = 1;
                    delta = self.dualvar[..n].iter().min().copied().unwrap_or(0).max(0);
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }

        self.mate
            .iter()
            .map(|&p| if p == NONE { NONE } else { self.endpoint[p] })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Minimum over all (n-1)!! perfect matchings.
    fn brute_force(n: usize, w: &dyn Fn(usize, usize) -> u64) -> u64 {
        fn go(free: &mut Vec<usize>, w: &dyn Fn(usize, usize) -> u64) -> u64 {
            if free.is_empty() {
                return 0;
            }
            let a = free.remove(0);
            let mut best = u64::MAX;
            for k in 0..free.len() {
                let b = free.remove(k);
                let rest = go(free, w);
                best = best.min(rest + w(a, b));
                free.insert(k, b);
            }
            free.insert(0, a);
            best
        }
        go(&mut (0..n).collect(), w)
    }

    fn check_perfect(m: &Matching, n: usize) {
        let mut seen = vec![false; n];
        for &(a, b) in &m.pairs {
            assert!(!seen[a] && !seen[b]);
            seen[a] = true;
            seen[b] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn two_nodes() {
        let p = MatchingProblem::complete(2, |_, _| 5);
        let m = min_weight_perfect_matching(&p).unwrap();
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.total_weight, 5);
    }

    #[test]
    fn unique_cheap_pairing() {
        let p = MatchingProblem::complete(4, |i, j| match (i, j) {
            (0, 1) | (2, 3) => 1,
            _ => 10,
        });
        let m = min_weight_perfect_matching(&p).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.total_weight, 2);
    }

    #[test]
    fn errors() {
        assert_eq!(
            min_weight_perfect_matching(&MatchingProblem::complete(3, |_, _| 1)),
            Err(MatchingError::OddNodeCount(3))
        );
        let mut p = MatchingProblem::new(4);
        p.add_edge(0, 1, 1);
        p.add_edge(0, 2, 1);
        p.add_edge(0, 3, 1);
        assert_eq!(
            min_weight_perfect_matching(&p),
            Err(MatchingError::NoPerfectMatching)
        );
        let mut p = MatchingProblem::new(2);
        p.add_edge(0, 0, 1);
        assert_eq!(
            min_weight_perfect_matching(&p),
            Err(MatchingError::InvalidEdge(0, 0))
        );
        let w = vec![vec![None, Some(1)], vec![Some(1), None], vec![]];
        assert!(MatchingProblem::from_matrix(&w[..2]).is_ok());
        let w = [vec![None, None], vec![None, None]];
        assert_eq!(
            MatchingProblem::from_matrix(&w),
            Err(MatchingError::MissingWeight(0, 1))
        );
        assert_eq!(
            min_weight_perfect_matching(&MatchingProblem::new(0))
                .unwrap()
                .total_weight,
            0
        );
    }

    #[test]
    fn boundary_augmentation_examples() {
        let p = augment_with_boundary(1, |_, _| 0, |_| 1);
        let m = min_weight_perfect_matching(&p).unwrap();
        assert_eq!((m.pairs.clone(), m.total_weight), (vec![(0, 1)], 1));

        let p = augment_with_boundary(2, |_, _| 1, |_| 3);
        let m = min_weight_perfect_matching(&p).unwrap();
        assert_eq!(m.total_weight, 1);
        assert!(m.pairs.contains(&(0, 1)));

        let p = augment_with_boundary(2, |_, _| 7, |i| [1, 2][i]);
        let m = min_weight_perfect_matching(&p).unwrap();
        assert_eq!(m.total_weight, 3);
        assert!(m.pairs.contains(&(0, 2)) && m.pairs.contains(&(1, 3)));
    }

    #[test]
    fn matches_brute_force_on_random_complete_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let n = 2 * rng.random_range(1..=6);
            let mut w = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    w[i][j] = rng.random_range(0..=20);
                    w[j][i] = w[i][j];
                }
            }
            let p = MatchingProblem::complete(n, |i, j| w[i][j]);
            let m = min_weight_perfect_matching(&p).unwrap();
            check_perfect(&m, n);
            let direct: u64 = m.pairs.iter().map(|&(a, b)| w[a][b]).sum();
            assert_eq!(direct, m.total_weight);
            assert_eq!(m.total_weight, brute_force(n, &|i, j| w[i][j]));
        }
    }

    #[test]
    fn sparse_graphs_with_blossoms() {
        // Odd cycles force blossom formation and expansion.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = 2 * rng.random_range(2..=5);
            let mut p = MatchingProblem::new(n);
            let mut w = vec![vec![None; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(0.6) {
                        let x = rng.random_range(0..=9);
                        p.add_edge(i, j, x);
                        w[i][j] = Some(x);
                        w[j][i] = Some(x);
                    }
                }
            }
            const INF: u64 = 1_000_000;
            let best = brute_force(n, &|i, j| w[i][j].unwrap_or(INF));
            match min_weight_perfect_matching(&p) {
                Ok(m) => {
                    check_perfect(&m, n);
                    assert_eq!(m.total_weight, best);
                }
                Err(MatchingError::NoPerfectMatching) => assert!(best >= INF),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn dimacs_dump() {
        let p = MatchingProblem::complete(2, |_, _| 4);
        assert_eq!(p.to_dimacs(), "p edge 2 1\ne 0 1 4\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn uniform_shift_adds_c_times_half_n(
            half in 1usize..=5,
            weights in proptest::collection::vec(0u64..=20, 45),
            c in 0u64..=10,
        ) {
            let n = 2 * half;
            let w = |i: usize, j: usize| weights[(i * 7 + j * 3) % weights.len()];
            let base = min_weight_perfect_matching(&MatchingProblem::complete(n, w)).unwrap();
            let shifted = min_weight_perfect_matching(&MatchingProblem::complete(n, |i, j| w(i, j) + c)).unwrap();
            prop_assert_eq!(shifted.total_weight, base.total_weight + c * half as u64);
        }

        #[test]
        fn boundary_construction_matches_oracle(
            k in 1usize..=5,
            pair in proptest::collection::vec(0u64..=8, 25),
            bnd in proptest::collection::vec(0u64..=8, 5),
        ) {
            let ps = |i: usize, j: usize| pair[i.min(j) * 5 + i.max(j)];
            let p = augment_with_boundary(k, ps, |i| bnd[i]);
            let m = min_weight_perfect_matching(&p).unwrap();
            // Oracle: each event either pairs with another or goes to the
            // boundary; brute force over subsets of events paired up.
            fn best(free: &mut Vec<usize>, ps: &dyn Fn(usize, usize) -> u64, b: &[u64]) -> u64 {
                if free.is_empty() { return 0; }
                let a = free.remove(0);
                let mut out = b[a] + best(free, ps, b);
                for idx in 0..free.len() {
                    let x = free.remove(idx);
                    out = out.min(ps(a, x) + best(free, ps, b));
                    free.insert(idx, x);
                }
                free.insert(0, a);
                out
            }
            prop_assert_eq!(m.total_weight, best(&mut (0..k).collect(), &ps, &bnd));
        }
    }
}
