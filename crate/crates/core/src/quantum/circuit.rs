use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::state::Qustring;

/// The fixed universal gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    T,
    Tdg,
    S,
    Sdg,
    X,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::H,
        GateKind::T,
        GateKind::Tdg,
        GateKind::S,
        GateKind::Sdg,
        GateKind::X,
        GateKind::Cnot,
    ];

    pub const SINGLE_QUBIT: [GateKind; 6] = [
        GateKind::H,
        GateKind::T,
        GateKind::Tdg,
        GateKind::S,
        GateKind::Sdg,
        GateKind::X,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<GateKind> {
        Some(match s.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "T" => GateKind::T,
            "TDG" | "T†" => GateKind::Tdg,
            "S" => GateKind::S,
            "SDG" | "S†" => GateKind::Sdg,
            "X" => GateKind::X,
            "CNOT" | "CX" => GateKind::Cnot,
            _ => return None,
        })
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            k => k,
        }
    }

    /// Row-major 2x2 matrix of a single-qubit kind.
    pub fn matrix2(self) -> Option<[Complex64; 4]> {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let i = Complex64::new(0.0, 1.0);
        Some(match self {
            GateKind::H => [r, r, r, -r],
            GateKind::T => [o, z, z, t],
            GateKind::Tdg => [o, z, z, t.conj()],
            GateKind::S => [o, z, z, i],
            GateKind::Sdg => [o, z, z, -i],
            GateKind::X => [z, o, o, z],
            GateKind::Cnot => return None,
        })
    }
}

/// One gate placed on concrete qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Single(GateKind, usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn h(q: usize) -> Gate {
        Gate::Single(GateKind::H, q)
    }
    pub fn t(q: usize) -> Gate {
        Gate::Single(GateKind::T, q)
    }
    pub fn tdg(q: usize) -> Gate {
        Gate::Single(GateKind::Tdg, q)
    }
    pub fn s(q: usize) -> Gate {
        Gate::Single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Gate {
        Gate::Single(GateKind::Sdg, q)
    }
    pub fn x(q: usize) -> Gate {
        Gate::Single(GateKind::X, q)
    }
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    /// Builds a gate, rejecting CNOT as a single-qubit kind.
    pub fn single(kind: GateKind, q: usize) -> Result<Gate> {
        if kind == GateKind::Cnot {
            return Err(Error::InvalidArgument("CNOT needs two qubits".into()));
        }
        Ok(Gate::Single(kind, q))
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Single(k, _) => *k,
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Single(_, q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Single(k, q) => Gate::Single(k.inverse(), q),
            cnot => cnot,
        }
    }

    /// Same gate with every qubit index passed through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Single(k, q) => Gate::Single(k, map(q)),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: map(control),
                target: map(target),
            },
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= width {
                return Err(Error::QubitOutOfRange { index: q, width });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::RepeatedQubit(qs[0]));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Single(k, q) => write!(f, "{} {q}", k.mnemonic()),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

/// An ordered gate sequence on `width` qubits. The first gate acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        assert!(width >= 1, "circuits act on at least one qubit");
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidArgument(
                "circuit width must be positive".into(),
            ));
        }
        for g in &gates {
            g.validate(width)?;
        }
        Ok(Circuit { width, gates })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other` (which may be narrower) with its qubits remapped.
    pub fn extend_mapped(&mut self, other: &Circuit, map: impl Fn(usize) -> usize) -> Result<()> {
        for g in &other.gates {
            self.push(g.remap(&map))?;
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Applies the circuit to `state`, returning `U(C)|state>`.
    pub fn apply(&self, state: &Qustring) -> Result<Qustring> {
        if state.num_qubits() != self.width {
            return Err(Error::WidthMismatch {
                circuit: self.width,
                state: state.num_qubits(),
            });
        }
        let mut out = state.clone();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, state: &mut Qustring) {
        let n = self.width;
        let amps = state.amps_mut();
        for gate in &self.gates {
            match *gate {
                Gate::Single(kind, q) => {
                    let m = kind.matrix2().expect("single-qubit kind");
                    apply_single(amps, n, q, &m);
                }
                Gate::Cnot { control, target } => {
                    let cbit = 1usize << (n - 1 - control);
                    let tbit = 1usize << (n - 1 - target);
                    for i in 0..amps.len() {
                        if i & cbit != 0 && i & tbit == 0 {
                            amps.swap(i, i | tbit);
                        }
                    }
                }
            }
        }
    }
}

pub(crate) fn apply_single(amps: &mut [Complex64], n: usize, q: usize, m: &[Complex64; 4]) {
    let stride = 1usize << (n - 1 - q);
    let block = stride << 1;
    for base in (0..amps.len()).step_by(block) {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[i + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

/// `U(C)|s>` as a free function.
pub fn apply(circuit: &Circuit, state: &Qustring) -> Result<Qustring> {
    circuit.apply(state)
}

/// Text format: a `width <n>` line followed by one gate per line.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width {}", self.width)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: String| Error::CircuitText { line, message };

        let (line_no, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing `width <n>` header".into()))?;
        let width = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["width", w] => w
                .parse::<usize>()
                .map_err(|e| err(line_no, format!("bad width: {e}")))?,
            _ => {
                return Err(err(
                    line_no,
                    format!("expected `width <n>`, got {header:?}"),
                ))
            }
        };
        if width == 0 {
            return Err(err(line_no, "width must be positive".into()));
        }
        let mut circuit = Circuit::new(width);
        for (line_no, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let kind = GateKind::from_mnemonic(parts[0])
                .ok_or_else(|| err(line_no, format!("unknown gate {:?}", parts[0])))?;
            let idx: Vec<usize> = parts[1..]
                .iter()
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(line_no, format!("bad qubit index: {e}")))?;
            if idx.len() != kind.arity() {
                return Err(err(
                    line_no,
                    format!("{} takes {} qubit(s)", kind.mnemonic(), kind.arity()),
                ));
            }
            let gate = match kind {
                GateKind::Cnot => Gate::cnot(idx[0], idx[1]),
                k => Gate::Single(k, idx[0]),
            };
            circuit
                .push(gate)
                .map_err(|e| err(line_no, e.to_string()))?;
        }
        Ok(circuit)
    }
}
