//! Planar surface-code lattice geometry.
//!
//! Sites live on a `(2d-1) x (2d-1)` integer grid indexed `(row, col)`:
//!
//! * data qubits where `row + col` is even,
//! * Z-syndrome qubits at (odd row, even col),
//! * X-syndrome qubits at (even row, odd col).
//!
//! Z stabilizers therefore have weight 3 on the left and right edges and X
//! stabilizers on the top and bottom edges. An X error chain running from the
//! top row to the bottom row commutes with every Z stabilizer and is the
//! logical X operator (data column 0); the logical Z operator runs along data
//! row 0. Both paths meet at `(0, 0)`.

use std::fmt::{self, Write as _};

use crate::error::LayoutError;
use crate::frame::PauliFrame;

/// A grid coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub row: usize,
    pub col: usize,
}

impl Site {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Pauli basis of a stabilizer, a logical operator or an error component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub const BOTH: [Basis; 2] = [Basis::X, Basis::Z];

    /// The error component a stabilizer of this basis detects.
    pub fn detected_error(self) -> Basis {
        self.other()
    }

    pub fn other(self) -> Basis {
        match self {
            Basis::X => Basis::Z,
            Basis::Z => Basis::X,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::X => "X",
            Basis::Z => "Z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Data,
    Syndrome(Basis),
}

/// Immutable distance-`d` planar surface-code layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeLayout {
    distance: usize,
    grid_size: usize,
    kinds: Vec<SiteKind>,
    data_sites: Vec<Site>,
    x_syndrome_sites: Vec<Site>,
    z_syndrome_sites: Vec<Site>,
    syndrome_sites: Vec<Site>,
    syndrome_slot: Vec<Option<usize>>,
    supports: Vec<Vec<Site>>,
    logical_x_path: Vec<Site>,
    logical_z_path: Vec<Site>,
}

impl CodeLayout {
    pub fn new(distance: usize) -> Result<Self, LayoutError> {
        if distance == 0 {
            return Err(LayoutError::ZeroDistance);
        }
        let grid_size = 2 * distance - 1;
        let mut kinds = Vec::with_capacity(grid_size * grid_size);
        let mut data_sites = Vec::new();
        let mut x_syndrome_sites = Vec::new();
        let mut z_syndrome_sites = Vec::new();
        let mut syndrome_sites = Vec::new();
        let mut syndrome_slot = vec![None; grid_size * grid_size];

        for row in 0..grid_size {
            for col in 0..grid_size {
                let site = Site::new(row, col);
                let kind = if (row + col) % 2 == 0 {
                    data_sites.push(site);
                    SiteKind::Data
                } else if row % 2 == 1 {
                    z_syndrome_sites.push(site);
                    SiteKind::Syndrome(Basis::Z)
                } else {
                    x_syndrome_sites.push(site);
                    SiteKind::Syndrome(Basis::X)
                };
                if let SiteKind::Syndrome(_) = kind {
                    syndrome_slot[row * grid_size + col] = Some(syndrome_sites.len());
                    syndrome_sites.push(site);
                }
                kinds.push(kind);
            }
        }

        let mut layout = Self {
            distance,
            grid_size,
            kinds,
            data_sites,
            x_syndrome_sites,
            z_syndrome_sites,
            syndrome_sites,
            syndrome_slot,
            supports: Vec::new(),
            logical_x_path: (0..distance).map(|k| Site::new(2 * k, 0)).collect(),
            logical_z_path: (0..distance).map(|k| Site::new(0, 2 * k)).collect(),
        };
        layout.supports = layout
            .syndrome_sites
            .iter()
            .map(|&s| layout.neighbors(s))
            .collect();
        Ok(layout)
    }

    /// Grid neighbours of `site` in north, west, east, south order.
    fn neighbors(&self, site: Site) -> Vec<Site> {
        let n = self.grid_size;
        let mut out = Vec::with_capacity(4);
        if site.row > 0 {
            out.push(Site::new(site.row - 1, site.col));
        }
        if site.col > 0 {
            out.push(Site::new(site.row, site.col - 1));
        }
        if site.col + 1 < n {
            out.push(Site::new(site.row, site.col + 1));
        }
        if site.row + 1 < n {
            out.push(Site::new(site.row + 1, site.col));
        }
        out
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn site_count(&self) -> usize {
        self.grid_size * self.grid_size
    }

    /// Row-major linear index of `site`.
    #[inline]
    pub fn index(&self, site: Site) -> usize {
        site.row * self.grid_size + site.col
    }

    #[inline]
    pub fn site(&self, index: usize) -> Site {
        Site::new(index / self.grid_size, index % self.grid_size)
    }

    pub fn contains(&self, site: Site) -> bool {
        site.row < self.grid_size && site.col < self.grid_size
    }

    pub fn kind(&self, site: Site) -> Option<SiteKind> {
        self.contains(site).then(|| self.kinds[self.index(site)])
    }

    pub fn data_sites(&self) -> &[Site] {
        &self.data_sites
    }

    pub fn syndrome_sites_of(&self, basis: Basis) -> &[Site] {
        match basis {
            Basis::X => &self.x_syndrome_sites,
            Basis::Z => &self.z_syndrome_sites,
        }
    }

    /// All syndrome sites, row-major. Positions in this list are the
    /// "syndrome slots" used by [`SyndromeRecord`](crate::sim::SyndromeRecord).
    pub fn syndrome_sites(&self) -> &[Site] {
        &self.syndrome_sites
    }

    pub fn syndrome_slot(&self, site: Site) -> Option<usize> {
        if self.contains(site) {
            self.syndrome_slot[self.index(site)]
        } else {
            None
        }
    }

    pub fn logical_x_path(&self) -> &[Site] {
        &self.logical_x_path
    }

    pub fn logical_z_path(&self) -> &[Site] {
        &self.logical_z_path
    }

    /// Data sites acted on by the stabilizer measured at `site`, in
    /// north/west/east/south order.
    pub fn stabilizer_support(&self, site: Site) -> Result<&[Site], LayoutError> {
        self.syndrome_slot(site)
            .map(|slot| self.supports[slot].as_slice())
            .ok_or(LayoutError::NotASyndromeSite(site))
    }

    /// Parity of the error component that anticommutes with the logical
    /// operator of basis `which`'s partner: `Basis::X` reports whether a
    /// logical X flip is present (X errors counted along the logical Z path),
    /// `Basis::Z` whether a logical Z flip is present.
    pub fn logical_parity(&self, frame: &PauliFrame, which: Basis) -> bool {
        let path = match which {
            Basis::X => &self.logical_z_path,
            Basis::Z => &self.logical_x_path,
        };
        path.iter()
            .fold(false, |acc, &s| acc ^ frame.component(which, self.index(s)))
    }

    /// Stabilizers of basis `basis` violated by the data part of `frame`.
    pub fn stabilizer_violations(&self, frame: &PauliFrame, basis: Basis) -> Vec<Site> {
        let err = basis.detected_error();
        self.syndrome_sites_of(basis)
            .iter()
            .copied()
            .filter(|&s| {
                let slot = self.syndrome_slot[self.index(s)].expect("syndrome site");
                self.supports[slot]
                    .iter()
                    .fold(false, |acc, &d| acc ^ frame.component(err, self.index(d)))
            })
            .collect()
    }

    /// Deterministic text dump, one line per site.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# distance {} grid {}", self.distance, self.grid_size).unwrap();
        for row in 0..self.grid_size {
            for col in 0..self.grid_size {
                let site = Site::new(row, col);
                match self.kinds[self.index(site)] {
                    SiteKind::Data => writeln!(out, "{site} data").unwrap(),
                    SiteKind::Syndrome(b) => {
                        let support: Vec<String> = self
                            .stabilizer_support(site)
                            .expect("syndrome site")
                            .iter()
                            .map(Site::to_string)
                            .collect();
                        writeln!(out, "{site} {b}-syndrome {}", support.join(" ")).unwrap();
                    }
                }
            }
        }
        let fmt_path = |p: &[Site]| p.iter().map(Site::to_string).collect::<Vec<_>>().join(" ");
        writeln!(out, "logical-x {}", fmt_path(&self.logical_x_path)).unwrap();
        writeln!(out, "logical-z {}", fmt_path(&self.logical_z_path)).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Pauli;
    use proptest::prelude::*;

    #[test]
    fn site_counts_follow_closed_forms() {
        for d in 1..=10 {
            let l = CodeLayout::new(d).unwrap();
            assert_eq!(l.data_sites().len(), d * d + (d - 1) * (d - 1));
            assert_eq!(l.syndrome_sites().len(), 2 * d * (d - 1));
            assert_eq!(
                l.syndrome_sites_of(Basis::X).len() + l.syndrome_sites_of(Basis::Z).len(),
                2 * d * (d - 1)
            );
            assert_eq!(l.site_count(), (2 * d - 1) * (2 * d - 1));
        }
    }

    #[test]
    fn distance_seven_is_thirteen_by_thirteen() {
        assert_eq!(CodeLayout::new(7).unwrap().site_count(), 169);
    }

    #[test]
    fn distance_one_is_a_single_data_qubit() {
        let l = CodeLayout::new(1).unwrap();
        assert_eq!(l.data_sites(), &[Site::new(0, 0)]);
        assert!(l.syndrome_sites().is_empty());
        assert!(matches!(
            l.stabilizer_support(Site::new(0, 0)),
            Err(LayoutError::NotASyndromeSite(_))
        ));
    }

    #[test]
    fn distance_four_matches_checkerboard() {
        let l = CodeLayout::new(4).unwrap();
        assert_eq!(l.data_sites().len(), 25);
        assert_eq!(l.syndrome_sites().len(), 24);
    }

    #[test]
    fn rejects_zero_distance() {
        assert_eq!(CodeLayout::new(0), Err(LayoutError::ZeroDistance));
    }

    #[test]
    fn supports_are_weight_three_or_four() {
        for d in 2..=7 {
            let l = CodeLayout::new(d).unwrap();
            for &s in l.syndrome_sites() {
                let sup = l.stabilizer_support(s).unwrap();
                let on_edge = match l.kind(s).unwrap() {
                    SiteKind::Syndrome(Basis::Z) => s.col == 0 || s.col == l.grid_size() - 1,
                    SiteKind::Syndrome(Basis::X) => s.row == 0 || s.row == l.grid_size() - 1,
                    SiteKind::Data => unreachable!(),
                };
                assert_eq!(sup.len(), if on_edge { 3 } else { 4 }, "site {s}");
                assert!(sup.iter().all(|&q| l.kind(q) == Some(SiteKind::Data)));
            }
        }
    }

    #[test]
    fn bulk_support_in_nwes_order() {
        let l = CodeLayout::new(3).unwrap();
        assert_eq!(l.kind(Site::new(1, 2)), Some(SiteKind::Syndrome(Basis::Z)));
        assert_eq!(
            l.stabilizer_support(Site::new(1, 2)).unwrap(),
            &[
                Site::new(0, 2),
                Site::new(1, 1),
                Site::new(1, 3),
                Site::new(2, 2)
            ]
        );
        assert_eq!(l.stabilizer_support(Site::new(1, 0)).unwrap().len(), 3);
        assert_eq!(l.stabilizer_support(Site::new(0, 1)).unwrap().len(), 3);
        assert!(l.stabilizer_support(Site::new(0, 0)).is_err());
        assert!(l.stabilizer_support(Site::new(9, 9)).is_err());
    }

    #[test]
    fn logical_paths_meet_once_and_have_length_d() {
        for d in 1..=9 {
            let l = CodeLayout::new(d).unwrap();
            let common: Vec<_> = l
                .logical_x_path()
                .iter()
                .filter(|s| l.logical_z_path().contains(s))
                .collect();
            assert_eq!(common, vec![&Site::new(0, 0)]);
            assert_eq!(l.logical_x_path().len().min(l.logical_z_path().len()), d);
        }
    }

    #[test]
    fn logical_operators_commute_with_opposite_stabilizers() {
        for d in 2..=6 {
            let l = CodeLayout::new(d).unwrap();
            let mut fx = PauliFrame::new(l.site_count());
            for &s in l.logical_x_path() {
                fx.apply(l.index(s), Pauli::X);
            }
            assert!(l.stabilizer_violations(&fx, Basis::Z).is_empty());
            assert!(l.logical_parity(&fx, Basis::X));
            let mut fz = PauliFrame::new(l.site_count());
            for &s in l.logical_z_path() {
                fz.apply(l.index(s), Pauli::Z);
            }
            assert!(l.stabilizer_violations(&fz, Basis::X).is_empty());
            assert!(l.logical_parity(&fz, Basis::Z));
        }
    }

    #[test]
    fn parity_examples() {
        let l = CodeLayout::new(3).unwrap();
        let mut f = PauliFrame::new(l.site_count());
        assert!(!l.logical_parity(&f, Basis::X));
        assert!(!l.logical_parity(&f, Basis::Z));
        f.apply(l.index(Site::new(0, 0)), Pauli::X);
        assert!(l.logical_parity(&f, Basis::X));
        assert!(!l.logical_parity(&f, Basis::Z));
    }

    #[test]
    fn stabilizers_never_flip_logical_parity() {
        for d in 1..=5 {
            let l = CodeLayout::new(d).unwrap();
            for &s in l.syndrome_sites() {
                let SiteKind::Syndrome(b) = l.kind(s).unwrap() else {
                    unreachable!()
                };
                let p = match b {
                    Basis::X => Pauli::X,
                    Basis::Z => Pauli::Z,
                };
                let mut f = PauliFrame::new(l.site_count());
                for &q in l.stabilizer_support(s).unwrap() {
                    f.apply(l.index(q), p);
                }
                assert!(!l.logical_parity(&f, Basis::X), "d={d} {s}");
                assert!(!l.logical_parity(&f, Basis::Z), "d={d} {s}");
                assert!(l.stabilizer_violations(&f, Basis::X).is_empty());
                assert!(l.stabilizer_violations(&f, Basis::Z).is_empty());
            }
        }
    }

    #[test]
    fn dump_is_deterministic() {
        let a = CodeLayout::new(3).unwrap().dump();
        let b = CodeLayout::new(3).unwrap().dump();
        assert_eq!(a, b);
        assert!(a.contains("(1,2) Z-syndrome (0,2) (1,1) (1,3) (2,2)"));
        assert_eq!(a.lines().count(), 1 + 25 + 2);
    }

    proptest! {
        #[test]
        fn logical_parity_is_linear(
            d in 1usize..6,
            a in proptest::collection::vec(0u8..4, 81),
            b in proptest::collection::vec(0u8..4, 81),
        ) {
            let l = CodeLayout::new(d).unwrap();
            let mut fa = PauliFrame::new(l.site_count());
            let mut fb = PauliFrame::new(l.site_count());
            for i in 0..l.site_count() {
                fa.apply(i, Pauli::from_bits(a[i] & 1 == 1, a[i] & 2 == 2));
                fb.apply(i, Pauli::from_bits(b[i] & 1 == 1, b[i] & 2 == 2));
            }
            let mut sum = fa.clone();
            sum.xor_with(&fb);
            for w in Basis::BOTH {
                prop_assert_eq!(
                    l.logical_parity(&sum, w),
                    l.logical_parity(&fa, w) ^ l.logical_parity(&fb, w)
                );
            }
        }
    }
}
