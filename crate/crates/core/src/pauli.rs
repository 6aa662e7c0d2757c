//! Phase-free Pauli operators on up to 128 qubits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 128;

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// An n-qubit Pauli operator stored as X and Z bit masks. Phases are dropped.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    x: u128,
    z: u128,
}

fn width_mask(n: usize) -> u128 {
    if n == MAX_QUBITS {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n, x: 0, z: 0 }
    }

    /// Builds from raw masks; bits at or above `n` are rejected.
    pub fn from_masks(n: usize, x: u128, z: u128) -> Result<Self, Error> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let m = width_mask(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::QubitOutOfRange { qubit: 127 - (x | z).leading_zeros() as usize, n });
        }
        Ok(Self { n, x, z })
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        assert!(qubit < n);
        let (x, z) = p.bits();
        Self { n, x: (x as u128) << qubit, z: (z as u128) << qubit }
    }

    /// `X` on every qubit of `support`.
    pub fn x_on(n: usize, support: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &q in support {
            assert!(q < n);
            p.x |= 1 << q;
        }
        p
    }

    pub fn z_on(n: usize, support: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &q in support {
            assert!(q < n);
            p.z |= 1 << q;
        }
        p
    }

    /// Parses a string such as `"XIZY"`; character `i` acts on qubit `i`.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let n = s.chars().count();
        let mut p = Self::identity(n.min(MAX_QUBITS));
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        for (i, c) in s.chars().enumerate() {
            let pauli = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse { line: 1, token: other.to_string(), reason: "not a Pauli letter".into() }),
            };
            p.set(i, pauli);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn x_mask(&self) -> u128 {
        self.x
    }
    pub fn z_mask(&self) -> u128 {
        self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n);
        let (x, z) = p.bits();
        self.x = (self.x & !(1 << q)) | ((x as u128) << q);
        self.z = (self.z & !(1 << q)) | ((z as u128) << q);
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        bits(self.x | self.z).collect()
    }

    /// Componentwise product with the phase discarded.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, Error> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(PauliString { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// X part only.
    pub fn x_part(&self) -> PauliString {
        PauliString { n: self.n, x: self.x, z: 0 }
    }

    pub fn z_part(&self) -> PauliString {
        PauliString { n: self.n, x: 0, z: self.z }
    }

    /// Restricts to the listed qubits, re-indexed in list order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.x |= (self.x >> q & 1) << i;
            out.z |= (self.z >> q & 1) << i;
        }
        out
    }
}

impl std::ops::Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        self.multiply(&rhs).expect("Pauli size mismatch")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// Iterates the set bit positions of a mask.
pub fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn involution_and_products() {
        let x1 = PauliString::single(3, 1, Pauli::X);
        assert!((x1 * x1).is_identity());
        let z1 = PauliString::single(3, 1, Pauli::Z);
        assert_eq!((x1 * z1).get(1), Pauli::Y);
        let a = PauliString::parse("XXI").unwrap();
        let b = PauliString::parse("IXX").unwrap();
        assert_eq!((a * b).to_string(), "XIX");
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = PauliString::identity(3);
        let b = PauliString::identity(4);
        assert!(matches!(a.multiply(&b), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn commutation() {
        let a = PauliString::parse("XX").unwrap();
        let b = PauliString::parse("ZZ").unwrap();
        let c = PauliString::parse("ZI").unwrap();
        assert!(a.commutes_with(&b));
        assert!(!a.commutes_with(&c));
    }

    proptest! {
        #[test]
        fn weight_bounded(n in 1usize..=128, x: u128, z: u128) {
            let m = width_mask(n);
            let p = PauliString::from_masks(n, x & m, z & m).unwrap();
            prop_assert!(p.weight() <= n);
            prop_assert_eq!(PauliString::parse(&p.to_string()).unwrap(), p);
        }
    }
}
