//! Pauli operators and the per-qubit error frame.

use std::fmt;

use crate::layout::Basis;

/// Single-qubit Pauli, stored as its (x, z) symplectic bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn component(self, basis: Basis) -> bool {
        match basis {
            Basis::X => self.has_x(),
            Basis::Z => self.has_z(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

/// X/Z error indicator bits for every grid site. `Y` is both bits set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(sites: usize) -> Self {
        Self {
            x: vec![false; sites],
            z: vec![false; sites],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x[q], self.z[q])
    }

    #[inline]
    pub fn component(&self, basis: Basis, q: usize) -> bool {
        match basis {
            Basis::X => self.x[q],
            Basis::Z => self.z[q],
        }
    }

    /// Multiply `p` into qubit `q` (phases ignored).
    #[inline]
    pub fn apply(&mut self, q: usize, p: Pauli) {
        self.x[q] ^= p.has_x();
        self.z[q] ^= p.has_z();
    }

    #[inline]
    pub fn flip(&mut self, basis: Basis, q: usize) {
        match basis {
            Basis::X => self.x[q] ^= true,
            Basis::Z => self.z[q] ^= true,
        }
    }

    #[inline]
    pub fn clear(&mut self, q: usize) {
        self.x[q] = false;
        self.z[q] = false;
    }

    /// Conjugate the frame by a CNOT: X on the control spreads to the
    /// target, Z on the target spreads to the control.
    #[inline]
    pub fn propagate_cnot(&mut self, control: usize, target: usize) {
        debug_assert_ne!(control, target);
        self.x[target] ^= self.x[control];
        self.z[control] ^= self.z[target];
    }

    pub fn xor_with(&mut self, other: &PauliFrame) {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    pub fn is_clean(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&b| b)
    }

    /// Indices with the given component set.
    pub fn support(&self, basis: Basis) -> Vec<usize> {
        let bits = match basis {
            Basis::X => &self.x,
            Basis::Z => &self.z,
        };
        bits.iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}
