//! Binary circuit code.
//!
//! Layout: magic `0x51`, version `0x01`, width byte, then one fixed-width
//! 3-byte record per gate: opcode, first qubit, second qubit. Single-qubit
//! gates carry a `0x00` padding byte in the second slot. The code is
//! therefore always at least three times the gate count.

use crate::error::{Error, Result};
use crate::quantum::circuit::{Circuit, Gate, GateKind};

pub const MAGIC: u8 = 0x51;
pub const VERSION: u8 = 0x01;
pub const RECORD_LEN: usize = 3;

/// Encoded bytes of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircuitCode(Vec<u8>);

impl CircuitCode {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CircuitCode(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn opcode(kind: GateKind) -> u8 {
    match kind {
        GateKind::H => 0x01,
        GateKind::T => 0x02,
        GateKind::Tdg => 0x03,
        GateKind::S => 0x04,
        GateKind::Sdg => 0x05,
        GateKind::X => 0x06,
        GateKind::Cnot => 0x07,
    }
}

fn kind_of(op: u8) -> Option<GateKind> {
    Some(match op {
        0x01 => GateKind::H,
        0x02 => GateKind::T,
        0x03 => GateKind::Tdg,
        0x04 => GateKind::S,
        0x05 => GateKind::Sdg,
        0x06 => GateKind::X,
        0x07 => GateKind::Cnot,
        _ => return None,
    })
}

pub fn encode_circuit(circuit: &Circuit) -> Result<CircuitCode> {
    let width = u8::try_from(circuit.width())
        .map_err(|_| Error::Codec(format!("width {} exceeds 255", circuit.width())))?;
    let mut bytes = Vec::with_capacity(3 + 3 * circuit.size());
    bytes.extend([MAGIC, VERSION, width]);
    for gate in circuit.gates() {
        // indices are < width <= 255
        let record = match *gate {
            Gate::Single(kind, q) => [opcode(kind), q as u8, 0x00],
            Gate::Cnot { control, target } => [opcode(GateKind::Cnot), control as u8, target as u8],
        };
        bytes.extend(record);
    }
    Ok(CircuitCode(bytes))
}

pub fn decode_circuit(code: &CircuitCode) -> Result<Circuit> {
    let bytes = code.as_bytes();
    if bytes.len() < 3 {
        return Err(Error::Codec("truncated header".into()));
    }
    if bytes[0] != MAGIC {
        return Err(Error::Codec(format!("bad magic byte {:#04x}", bytes[0])));
    }
    if bytes[1] != VERSION {
        return Err(Error::Codec(format!(
            "unsupported version {:#04x}",
            bytes[1]
        )));
    }
    let width = bytes[2] as usize;
    if width == 0 {
        return Err(Error::Codec("zero width".into()));
    }
    let mut circuit = Circuit::new(width);
    let mut pos = 3;
    while pos < bytes.len() {
        let op = bytes[pos];
        let kind = kind_of(op)
            .ok_or_else(|| Error::Codec(format!("unknown opcode {op:#04x} at byte {pos}")))?;
        let record = bytes
            .get(pos..pos + RECORD_LEN)
            .ok_or_else(|| Error::Codec(format!("truncated record at byte {pos}")))?;
        let operands = &record[1..1 + kind.arity()];
        if kind.arity() == 1 && record[2] != 0 {
            return Err(Error::Codec(format!("nonzero padding at byte {}", pos + 2)));
        }
        for &q in operands {
            if q as usize >= width {
                return Err(Error::Codec(format!(
                    "qubit index {q} >= width {width} at byte {pos}"
                )));
            }
        }
        let gate = match kind {
            GateKind::Cnot => Gate::cnot(operands[0] as usize, operands[1] as usize),
            k => Gate::Single(k, operands[0] as usize),
        };
        circuit
            .push(gate)
            .map_err(|e| Error::Codec(format!("record at byte {pos}: {e}")))?;
        pos += RECORD_LEN;
    }
    Ok(circuit)
}
