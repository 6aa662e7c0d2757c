//! Execution time of protected gadgets, in level-0 gate slots.
//!
//! A level-k gadget is a sequence of steps of level-(k-1) protected gates,
//! each taking one level-(k-1) slot T(G(k-1)). The number of such steps is
//! read off the level-1 circuits.

use crate::error::Error;
use crate::gadgets::{build_circuit, GadgetKind, GadgetSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimingModel {
    /// Steps of one EC_X round.
    pub ecx_steps: u128,
    /// Extra steps of a full EC round over EC_X.
    pub ec_extra_steps: u128,
    /// Steps of the repetition-code voter.
    pub m_steps: u128,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self::from_circuits().expect("level-1 gadgets build")
    }
}

impl TimingModel {
    pub fn from_circuits() -> Result<Self, Error> {
        let depth = |k| build_circuit(GadgetSpec::new(k)).map(|g| g.circuit.depth() as u128);
        let ecx = depth(GadgetKind::ECX)?;
        let ec = depth(GadgetKind::ECFull)?;
        let m = depth(GadgetKind::MX)?;
        if ec < ecx {
            return Err(Error::InvalidCircuit(format!("EC depth {ec} below EC_X depth {ecx}")));
        }
        Ok(TimingModel { ecx_steps: ecx, ec_extra_steps: ec - ecx, m_steps: m })
    }

    /// T(G(k)): one protected gate, EC on both sides of a single step.
    pub fn gate(&self, k: u32) -> u128 {
        if k == 0 {
            return 1;
        }
        2 * self.ec(k) + self.gate(k - 1)
    }

    pub fn ec_x(&self, k: u32) -> u128 {
        if k == 0 {
            return 0;
        }
        self.ecx_steps * self.gate(k - 1)
    }

    pub fn ec(&self, k: u32) -> u128 {
        if k == 0 {
            return 0;
        }
        self.ec_x(k) + self.ec_extra_steps * self.gate(k - 1)
    }

    pub fn m(&self, k: u32) -> u128 {
        if k == 0 {
            return 0;
        }
        self.m_steps * self.gate(k - 1)
    }

    /// T(N(k)) with T(N(0)) = T(N(-1)) = 0.
    pub fn n(&self, k: u32) -> u128 {
        if k == 0 {
            return 0;
        }
        let lower = if k >= 2 { self.n(k - 2) } else { 0 };
        2 * self.ec_x(k) + 2 * self.gate(k - 1) + lower
    }

    /// Duration of the contracted VN exRec at level k, taken at its bound
    /// 2T(EC_X(k)) + 4T(G(k-1)) + T(N(k-1)). At level 0 the row step is a
    /// single physical slot.
    pub fn vn(&self, k: u32) -> u128 {
        if k == 0 {
            return 1;
        }
        2 * self.ec_x(k) + 4 * self.gate(k - 1) + self.n(k - 1)
    }

    pub fn duration(&self, kind: GadgetKind, k: u32) -> Result<u128, Error> {
        Ok(match kind {
            GadgetKind::ECX | GadgetKind::ECZ => self.ec_x(k),
            GadgetKind::ECFull => self.ec(k),
            GadgetKind::NX | GadgetKind::NZ => self.n(k),
            GadgetKind::VNRow | GadgetKind::ExRecVN => self.vn(k),
            GadgetKind::MX | GadgetKind::MZ => self.m(k),
            GadgetKind::ExRecCNOT | GadgetKind::ExRecBTOFF => self.gate(k),
            other => return Err(Error::UnsupportedGadget(format!("no timing rule for {}", other.name()))),
        })
    }

    /// Checks the timing chain at level k; returns the failed relations.
    pub fn check(&self, k: u32) -> Vec<String> {
        let mut bad = Vec::new();
        if k >= 1 {
            let g1 = self.gate(k - 1);
            if self.ec(k) != self.ec_x(k) + 2 * g1 {
                bad.push(format!("EC-time identity at k={k}"));
            }
            if self.gate(k) != 2 * self.ec_x(k) + 5 * g1 {
                bad.push(format!("G-time identity at k={k}"));
            }
            if self.gate(k) - self.n(k) <= 2 * g1 {
                bad.push(format!("N-time inequality at k={k}"));
            }
            if self.vn(k - 1) > g1 {
                bad.push(format!("VN bound at k={k}"));
            }
            if self.m(k) >= self.ec_x(k) {
                bad.push(format!("M faster than EC_X at k={k}"));
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_values() {
        let t = TimingModel::default();
        assert_eq!((t.ecx_steps, t.ec_extra_steps), (8, 2));
        assert_eq!(t.gate(1) - t.n(1), 3 * t.gate(0));
        assert!(t.duration(GadgetKind::Encoder, 1).is_err());
    }

    #[test]
    fn chain_holds_to_level_ten() {
        let t = TimingModel::default();
        for k in 1..=10 {
            assert!(t.check(k).is_empty(), "{:?}", t.check(k));
        }
    }
}
