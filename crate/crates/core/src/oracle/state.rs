//! Dense state vectors with in-place gate kernels. Slot `k` is bit `k` of
//! the amplitude index.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Error;

pub const MAX_SLOTS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check(n: usize) -> Result<(), Error> {
    if n > MAX_SLOTS {
        Err(Error::TooManyQubits { n, max: MAX_SLOTS })
    } else {
        Ok(())
    }
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self, Error> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, bits: u64) -> Result<Self, Error> {
        check(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[(bits & ((1u64 << n) - 1)) as usize] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, Error> {
        check(n)?;
        if amps.len() != 1 << n {
            return Err(Error::SizeMismatch { left: 1 << n, right: amps.len() });
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Basis index and probability of the largest amplitude.
    pub fn dominant(&self) -> (u64, f64) {
        let (i, a) = self.amps.iter().enumerate().max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr())).unwrap();
        (i as u64, a.norm_sqr())
    }

    pub fn apply_x(&mut self, q: usize) {
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    pub fn apply_z(&mut self, q: usize) {
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
    }

    pub fn apply_h(&mut self, q: usize) {
        let m = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * s;
                self.amps[i | m] = (a - b) * s;
            }
        }
    }

    /// NOT on `t` controlled by every qubit of `controls`.
    pub fn apply_mcx(&mut self, controls: &[usize], t: usize) {
        let cm = controls.iter().fold(0usize, |m, &c| m | 1 << c);
        let tm = 1usize << t;
        for i in 0..self.amps.len() {
            if i & tm == 0 && i & cm == cm {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// Controlled square root of X (or its inverse) on `t`.
    pub fn apply_cv(&mut self, c: usize, t: usize, dagger: bool) {
        let half = Complex64::new(0.5, 0.0);
        let i1 = Complex64::new(0.0, if dagger { -1.0 } else { 1.0 });
        let (p, q) = (half * (ONE + i1), half * (ONE - i1));
        let (cm, tm) = (1usize << c, 1usize << t);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                let (a, b) = (self.amps[i], self.amps[i | tm]);
                self.amps[i] = p * a + q * b;
                self.amps[i | tm] = q * a + p * b;
            }
        }
    }

    /// Hermitian Pauli X^x Z^z times i^|x&z| on slot masks.
    pub fn apply_pauli(&mut self, x: u64, z: u64) {
        let phase = match (x & z).count_ones() % 4 {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => -ONE,
            _ => Complex64::new(0.0, -1.0),
        };
        let mut out = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sign = if (i as u64 & z).count_ones() % 2 == 1 { -phase } else { phase };
            out[i ^ x as usize] = *a * sign;
        }
        self.amps = out;
    }

    pub fn expectation(&self, x: u64, z: u64) -> f64 {
        let mut p = self.clone();
        p.apply_pauli(x, z);
        self.inner(&p).re
    }

    /// Appends a qubit in `state` as the new highest slot.
    pub fn push_qubit(&mut self, state: [Complex64; 2]) -> Result<usize, Error> {
        check(self.n + 1)?;
        let len = self.amps.len();
        let mut amps = Vec::with_capacity(2 * len);
        amps.extend(self.amps.iter().map(|a| *a * state[0]));
        amps.extend(self.amps.iter().map(|a| *a * state[1]));
        self.amps = amps;
        self.n += 1;
        Ok(self.n - 1)
    }

    fn split(&self, q: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let m = 1usize << q;
        let low = m - 1;
        let half = self.amps.len() / 2;
        let mut a0 = Vec::with_capacity(half);
        let mut a1 = Vec::with_capacity(half);
        for j in 0..half {
            let i = ((j & !low) << 1) | (j & low);
            a0.push(self.amps[i]);
            a1.push(self.amps[i | m]);
        }
        (a0, a1)
    }

    /// Removes slot `q`; higher slots move down by one. If the qubit is in
    /// a product state the rest is kept exactly and `true` is returned;
    /// otherwise the qubit is projected onto a Z-basis outcome drawn from
    /// `rng`.
    pub fn remove_qubit<R: Rng>(&mut self, q: usize, rng: &mut R) -> bool {
        let (a0, a1) = self.split(q);
        let n0: f64 = a0.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = a1.iter().map(|a| a.norm_sqr()).sum();
        let c: Complex64 = a0.iter().zip(&a1).map(|(a, b)| a.conj() * b).sum();
        let pure = (c.norm_sqr() - n0 * n1).abs() < 1e-9;
        let keep = if pure {
            if n0 >= n1 {
                a0
            } else {
                a1
            }
        } else if rng.gen::<f64>() < n0 / (n0 + n1) {
            a0
        } else {
            a1
        };
        self.amps = keep;
        self.n -= 1;
        self.normalize();
        pure
    }

    /// Removes slot `q` only if it is in a product state with the rest.
    pub fn remove_if_pure(&mut self, q: usize) -> bool {
        let (a0, a1) = self.split(q);
        let n0: f64 = a0.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = a1.iter().map(|a| a.norm_sqr()).sum();
        let c: Complex64 = a0.iter().zip(&a1).map(|(a, b)| a.conj() * b).sum();
        if (c.norm_sqr() - n0 * n1).abs() >= 1e-9 {
            return false;
        }
        self.amps = if n0 >= n1 { a0 } else { a1 };
        self.n -= 1;
        self.normalize();
        true
    }

    /// Squared overlap of the qubits in `slots` with `target`, every other
    /// slot traced out.
    pub fn overlap_on(&self, slots: &[usize], target: &StateVector) -> f64 {
        assert_eq!(slots.len(), target.n);
        let mask = slots.iter().fold(0usize, |m, &s| m | 1 << s);
        let spread = |i: usize| slots.iter().enumerate().fold(0usize, |acc, (k, &s)| acc | ((i >> k & 1) << s));
        let idx: Vec<usize> = (0..target.amps.len()).map(spread).collect();
        let mut total = 0.0;
        for rest in 0..self.amps.len() {
            if rest & mask != 0 {
                continue;
            }
            let a: Complex64 = target.amps.iter().zip(&idx).map(|(t, &i)| t.conj() * self.amps[rest | i]).sum();
            total += a.norm_sqr();
        }
        total
    }

    /// Projective Z measurement of slot `q`, removing it.
    pub fn measure_z<R: Rng>(&mut self, q: usize, rng: &mut R) -> bool {
        let (a0, a1) = self.split(q);
        let n0: f64 = a0.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = a1.iter().map(|a| a.norm_sqr()).sum();
        let one = rng.gen::<f64>() >= n0 / (n0 + n1);
        self.amps = if one { a1 } else { a0 };
        self.n -= 1;
        self.normalize();
        one
    }

    /// Reorders slots: new slot `i` is old slot `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector, Error> {
        if order.len() != self.n {
            return Err(Error::SizeMismatch { left: self.n, right: order.len() });
        }
        let mut amps = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let j = order.iter().enumerate().fold(0usize, |acc, (k, &o)| acc | ((i >> o & 1) << k));
            amps[j] = *a;
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// `self` on the low slots, `other` above.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, Error> {
        check(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        Ok(StateVector { n: self.n + other.n, amps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hh_is_identity_and_cnot_chain_copies() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_h(0);
        s.apply_h(0);
        assert!((s.amplitudes()[0] - ONE).norm() < 1e-12);
        let mut s = StateVector::basis(4, 1).unwrap();
        for t in 1..4 {
            s.apply_mcx(&[t - 1], t);
        }
        assert_eq!(s.dominant(), (0b1111, 1.0));
    }

    #[test]
    fn cv_squared_is_cnot() {
        let mut s = StateVector::basis(2, 0b01).unwrap();
        s.apply_cv(0, 1, false);
        s.apply_cv(0, 1, false);
        let (i, p) = s.dominant();
        assert_eq!(i, 0b11);
        assert!((p - 1.0).abs() < 1e-12);
        s.apply_cv(0, 1, true);
        s.apply_cv(0, 1, false);
        assert!((s.dominant().1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn removing_a_product_qubit_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = StateVector::zero(1).unwrap();
        s.apply_h(0);
        s.push_qubit([ZERO, ONE]).unwrap();
        assert!(s.remove_qubit(1, &mut rng));
        assert!((s.expectation(1, 0) - 1.0).abs() < 1e-12);
        let mut bell = StateVector::zero(2).unwrap();
        bell.apply_h(0);
        bell.apply_mcx(&[0], 1);
        assert!(!bell.remove_qubit(0, &mut rng));
        assert!((bell.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_expectations() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_h(0);
        assert!((s.expectation(0, 1)).abs() < 1e-12);
        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.expectation(0, 0b11), 1.0);
        assert!(StateVector::zero(25).is_err());
    }
}
