//! Gadget constructors.
//!
//! Level-1 gadgets are explicit physical circuits. Higher levels are returned
//! as a [`Schematic`] over level-(k-1) gate symbols.

mod bacon_shor;
mod decompose;
mod majority;
mod schematic;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitBuilder, Role};
use crate::code::Basis;
use crate::error::Error;

pub use bacon_shor::{
    append_ec, append_ec_x, append_ec_z, append_n_x, append_n_z, bs_row, EcStage,
};
pub use majority::{append_m, append_m_basis, k_set, steane_x_logicals};
pub use decompose::{decompose_circuit, decompose_gadget};
pub use schematic::{Schematic, SymbolicGate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetKind {
    MX,
    MZ,
    MN(usize),
    ParityVoter(usize),
    CatVerify(usize),
    NX,
    NZ,
    VNRow,
    ECX,
    ECZ,
    ECFull,
    ExRecCNOT,
    ExRecBTOFF,
    ExRecVN,
    PrepZeroL,
    PrepPlusL,
    Encoder,
    CoolingTree(usize),
    SteaneN,
}

impl GadgetKind {
    pub fn name(&self) -> String {
        match self {
            GadgetKind::MX => "M_X".into(),
            GadgetKind::MZ => "M_Z".into(),
            GadgetKind::MN(n) => format!("M_N({n})"),
            GadgetKind::ParityVoter(n) => format!("ParityVoter({n})"),
            GadgetKind::CatVerify(n) => format!("CatVerify({n})"),
            GadgetKind::NX => "N_X".into(),
            GadgetKind::NZ => "N_Z".into(),
            GadgetKind::VNRow => "VN_row".into(),
            GadgetKind::ECX => "EC_X".into(),
            GadgetKind::ECZ => "EC_Z".into(),
            GadgetKind::ECFull => "EC_full".into(),
            GadgetKind::ExRecCNOT => "ExRecCNOT".into(),
            GadgetKind::ExRecBTOFF => "ExRecBTOFF".into(),
            GadgetKind::ExRecVN => "ExRecVN".into(),
            GadgetKind::PrepZeroL => "PrepZero_L".into(),
            GadgetKind::PrepPlusL => "PrepPlus_L".into(),
            GadgetKind::Encoder => "Encoder".into(),
            GadgetKind::CoolingTree(j) => format!("CoolingTree({j})"),
            GadgetKind::SteaneN => "SteaneN".into(),
        }
    }

    /// Accepts the names produced by [`GadgetKind::name`], case-insensitively,
    /// with `M_N5` style shorthands for parameterised kinds.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let bad = || Error::UnsupportedGadget(s.to_string());
        let norm: String = s.chars().filter(|c| !matches!(c, '_' | '-' | ' ')).collect::<String>().to_ascii_lowercase();
        let (head, arg) = match norm.find(|c: char| c.is_ascii_digit() || c == '(') {
            Some(i) => (&norm[..i], Some(norm[i..].trim_matches(|c| c == '(' || c == ')').parse::<usize>().map_err(|_| bad())?)),
            None => (norm.as_str(), None),
        };
        Ok(match (head, arg) {
            ("mx", None) => GadgetKind::MX,
            ("mz", None) => GadgetKind::MZ,
            ("mn", Some(n)) => GadgetKind::MN(n),
            ("parityvoter", Some(n)) => GadgetKind::ParityVoter(n),
            ("catverify", n) => GadgetKind::CatVerify(n.unwrap_or(4)),
            ("nx", None) => GadgetKind::NX,
            ("nz", None) => GadgetKind::NZ,
            ("vnrow", None) => GadgetKind::VNRow,
            ("ecx", None) => GadgetKind::ECX,
            ("ecz", None) => GadgetKind::ECZ,
            ("ecfull" | "ec", None) => GadgetKind::ECFull,
            ("exreccnot" | "cnot", None) => GadgetKind::ExRecCNOT,
            ("exrecbtoff" | "btoff", None) => GadgetKind::ExRecBTOFF,
            ("exrecvn" | "vn", None) => GadgetKind::ExRecVN,
            ("prepzerol", None) => GadgetKind::PrepZeroL,
            ("prepplusl", None) => GadgetKind::PrepPlusL,
            ("encoder", None) => GadgetKind::Encoder,
            ("coolingtree", j) => GadgetKind::CoolingTree(j.unwrap_or(1)),
            ("steanen", None) => GadgetKind::SteaneN,
            _ => return Err(bad()),
        })
    }

    pub fn is_ec_kind(&self) -> bool {
        matches!(
            self,
            GadgetKind::ECX | GadgetKind::ECZ | GadgetKind::ECFull | GadgetKind::ExRecCNOT | GadgetKind::ExRecBTOFF | GadgetKind::ExRecVN
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ToffoliMode {
    #[default]
    Native,
    TwoQubitDecomposed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GadgetSpec {
    pub kind: GadgetKind,
    pub level: usize,
    pub toffoli_mode: ToffoliMode,
}

impl GadgetSpec {
    pub fn new(kind: GadgetKind) -> Self {
        GadgetSpec { kind, level: 1, toffoli_mode: ToffoliMode::Native }
    }
    pub fn at_level(mut self, level: usize) -> Self {
        self.level = level;
        self
    }
    pub fn two_qubit(mut self) -> Self {
        self.toffoli_mode = ToffoliMode::TwoQubitDecomposed;
        self
    }
}

/// Error sectors a block is judged in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    X,
    Z,
    Both,
}

impl Sector {
    pub fn has_x(self) -> bool {
        matches!(self, Sector::X | Sector::Both)
    }
    pub fn has_z(self) -> bool {
        matches!(self, Sector::Z | Sector::Both)
    }
}

/// Encoding carried by a block of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockCode {
    BaconShor,
    /// Three-qubit repetition code; `Basis::Z` protects against bit flips.
    Repetition(Basis),
    /// Unencoded qubits, only used for truth-table gadgets.
    Raw,
    Steane,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub qubits: Vec<usize>,
    pub code: BlockCode,
    pub sector: Sector,
}

impl Block {
    pub fn new(name: &str, qubits: &[usize], code: BlockCode, sector: Sector) -> Self {
        Block { name: name.to_string(), qubits: qubits.to_vec(), code, sector }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetCircuit {
    pub spec: GadgetSpec,
    pub circuit: Circuit,
    pub data_qubits: Vec<usize>,
    pub ancilla_qubits: Vec<usize>,
    /// Encoded blocks entering the gadget (fault-free codewords by assumption).
    pub inputs: Vec<Block>,
    /// Blocks judged after the gadget.
    pub outputs: Vec<Block>,
}

impl GadgetCircuit {
    pub(crate) fn from_builder(spec: GadgetSpec, b: CircuitBuilder, inputs: Vec<Block>, outputs: Vec<Block>) -> Self {
        let circuit = b.build();
        let data_qubits: Vec<usize> = (0..circuit.n_qubits).filter(|&q| circuit.roles[q] == Role::Data).collect();
        let ancilla_qubits: Vec<usize> = (0..circuit.n_qubits).filter(|&q| circuit.roles[q] != Role::Data).collect();
        GadgetCircuit { spec, circuit, data_qubits, ancilla_qubits, inputs, outputs }
    }

    pub fn n_locations(&self) -> usize {
        self.circuit.location_count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gadget {
    Circuit(Box<GadgetCircuit>),
    Schematic(Schematic),
}

/// Builds any gadget; level > 1 gives a schematic where one exists.
pub fn build(spec: GadgetSpec) -> Result<Gadget, Error> {
    if spec.level == 0 {
        return Err(Error::InvalidArgument("gadget level must be at least 1".into()));
    }
    if spec.level > 1 {
        return schematic::build_schematic(spec).map(Gadget::Schematic);
    }
    build_circuit(spec).map(|g| Gadget::Circuit(Box::new(g)))
}

/// Level-1 physical circuit for `spec`.
pub fn build_circuit(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    if spec.level != 1 {
        return Err(Error::UnsupportedGadget(format!("{} is only flattened at level 1", spec.kind.name())));
    }
    if spec.toffoli_mode == ToffoliMode::TwoQubitDecomposed {
        let native = build_circuit(GadgetSpec { toffoli_mode: ToffoliMode::Native, ..spec })?;
        let mut g = decompose_gadget(&native);
        g.spec = spec;
        return Ok(g);
    }
    use GadgetKind::*;
    match spec.kind {
        MX => majority::build_m(spec, Basis::Z, 3),
        MZ => majority::build_m(spec, Basis::X, 3),
        MN(n) => majority::build_m(spec, Basis::Z, n),
        ParityVoter(n) => majority::build_parity_voter(spec, n),
        CatVerify(n) => majority::build_cat_verify(spec, n),
        CoolingTree(j) => majority::build_cooling_tree(spec, j),
        SteaneN => majority::build_steane_n(spec),
        NX => bacon_shor::build_n(spec, Basis::Z),
        NZ => bacon_shor::build_n(spec, Basis::X),
        VNRow => bacon_shor::build_vn_row(spec),
        ECX => bacon_shor::build_ec(spec, EcStage::X),
        ECZ => bacon_shor::build_ec(spec, EcStage::Z),
        ECFull => bacon_shor::build_ec(spec, EcStage::Full),
        ExRecCNOT => bacon_shor::build_exrec_cnot(spec),
        ExRecBTOFF => bacon_shor::build_exrec_btoff(spec),
        ExRecVN => bacon_shor::build_exrec_vn(spec),
        PrepZeroL => bacon_shor::build_prep(spec, Basis::Z),
        PrepPlusL => bacon_shor::build_prep(spec, Basis::X),
        Encoder => bacon_shor::build_encoder(spec),
    }
}

pub(crate) fn bs_block(name: &str, qubits: &[usize], sector: Sector) -> Block {
    Block::new(name, qubits, BlockCode::BaconShor, sector)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        let kinds = [
            GadgetKind::MX,
            GadgetKind::MZ,
            GadgetKind::MN(5),
            GadgetKind::ParityVoter(3),
            GadgetKind::CatVerify(4),
            GadgetKind::NX,
            GadgetKind::NZ,
            GadgetKind::VNRow,
            GadgetKind::ECX,
            GadgetKind::ECZ,
            GadgetKind::ECFull,
            GadgetKind::ExRecCNOT,
            GadgetKind::ExRecBTOFF,
            GadgetKind::ExRecVN,
            GadgetKind::PrepZeroL,
            GadgetKind::PrepPlusL,
            GadgetKind::Encoder,
            GadgetKind::CoolingTree(2),
            GadgetKind::SteaneN,
        ];
        for k in kinds {
            assert_eq!(GadgetKind::parse(&k.name()).unwrap(), k, "{}", k.name());
        }
        assert!(GadgetKind::parse("bogus").is_err());
    }

    #[test]
    fn every_level_one_gadget_validates() {
        for kind in [
            GadgetKind::MX,
            GadgetKind::MZ,
            GadgetKind::MN(5),
            GadgetKind::MN(7),
            GadgetKind::ParityVoter(4),
            GadgetKind::CatVerify(4),
            GadgetKind::NX,
            GadgetKind::NZ,
            GadgetKind::VNRow,
            GadgetKind::ECX,
            GadgetKind::ECZ,
            GadgetKind::ECFull,
            GadgetKind::ExRecCNOT,
            GadgetKind::ExRecBTOFF,
            GadgetKind::ExRecVN,
            GadgetKind::PrepZeroL,
            GadgetKind::PrepPlusL,
            GadgetKind::Encoder,
            GadgetKind::CoolingTree(2),
            GadgetKind::SteaneN,
        ] {
            let g = build_circuit(GadgetSpec::new(kind)).unwrap();
            let v = g.circuit.validate();
            assert!(v.is_empty(), "{}: {:?}", kind.name(), v);
            assert_eq!(g.data_qubits.len() + g.ancilla_qubits.len(), g.circuit.n_qubits);
        }
        let g = build_circuit(GadgetSpec::new(GadgetKind::ExRecBTOFF).two_qubit()).unwrap();
        assert!(g.circuit.is_valid());
    }

    #[test]
    fn unsupported_requests() {
        assert!(build_circuit(GadgetSpec::new(GadgetKind::MN(4))).is_err());
        assert!(build_circuit(GadgetSpec::new(GadgetKind::MN(9))).is_err());
        assert!(build(GadgetSpec::new(GadgetKind::ECFull).at_level(0)).is_err());
        assert!(matches!(build(GadgetSpec::new(GadgetKind::ECFull).at_level(2)).unwrap(), Gadget::Schematic(_)));
    }
}
