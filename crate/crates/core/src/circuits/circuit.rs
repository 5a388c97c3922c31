use std::path::Path;

use super::{Gate, GateKind};
use crate::qstate::{DensityMatrix, Matrix, Statevector};
use crate::{Error, Result};

/// Layered gate program. Gates within a layer act on disjoint qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    layers: Vec<Vec<Gate>>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("circuit needs at least one qubit"));
        }
        Ok(Self {
            n,
            layers: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates().filter(|g| g.kind == GateKind::Cnot).count()
    }

    /// Number of layers containing at least one entangling gate.
    pub fn depth(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.iter().any(Gate::is_entangling))
            .count()
    }

    pub fn push_layer(&mut self, layer: Vec<Gate>) -> Result<()> {
        let mut used = vec![false; self.n];
        for g in &layer {
            let g = Gate::new(g.kind, g.qubits.clone())?;
            for &q in &g.qubits {
                if q >= self.n {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n: self.n,
                    });
                }
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::DuplicateQubit(q));
                }
            }
        }
        if !layer.is_empty() {
            self.layers.push(layer);
        }
        Ok(())
    }

    /// Appends all layers of `other`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        self.layers.extend(other.layers.iter().cloned());
        Ok(())
    }

    /// Expands every `rzz` into CNOT, Rz, CNOT layers. Other gates in a layer
    /// with an `rzz` stay in the first of the three layers.
    pub fn compile(&self) -> Circuit {
        let mut layers = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            if !layer.iter().any(|g| matches!(g.kind, GateKind::Rzz(_))) {
                layers.push(layer.clone());
                continue;
            }
            let (mut first, mut mid, mut last) = (Vec::new(), Vec::new(), Vec::new());
            for g in layer {
                if let GateKind::Rzz(theta) = g.kind {
                    let (a, b) = (g.qubits[0], g.qubits[1]);
                    first.push(Gate::cnot(a, b));
                    mid.push(Gate::rz(b, theta));
                    last.push(Gate::cnot(a, b));
                } else {
                    first.push(g.clone());
                }
            }
            layers.extend([first, mid, last]);
        }
        Circuit { n: self.n, layers }
    }

    pub fn apply_to_statevector(&self, psi: &Statevector) -> Result<Statevector> {
        if psi.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: psi.n(),
            });
        }
        let mut out = psi.clone();
        for g in self.gates() {
            out.apply_in_place(&g.matrix(), &g.qubits);
        }
        Ok(out)
    }

    pub fn apply_to_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: rho.n(),
            });
        }
        let mut out = rho.clone();
        for g in self.gates() {
            out.conjugate_in_place(&g.matrix(), &g.qubits);
        }
        Ok(out)
    }

    /// Explicit `2^n x 2^n` unitary. Intended for small registers.
    pub fn unitary(&self) -> Result<Matrix> {
        if self.n > 10 {
            return Err(Error::arg("explicit unitaries are limited to 10 qubits"));
        }
        let dim = 1usize << self.n;
        let mut u = Matrix::identity(dim, dim);
        for c in 0..dim {
            let mut col: Vec<_> = u.column(c).iter().copied().collect();
            for g in self.gates() {
                crate::qstate::kernel::apply(&mut col, &g.matrix(), &g.qubits);
            }
            u.set_column(c, &nalgebra::DVector::from_vec(col));
        }
        Ok(u)
    }

    /// Parses the line-based text format.
    ///
    /// ```text
    /// qubits 3
    /// u3 0 0.1 0.2 0.3
    /// cnot 0,1
    /// barrier
    /// rz 2 0.5
    /// ```
    ///
    /// Gates accumulate into the current layer; `barrier` closes it, and a
    /// gate overlapping the current layer opens a new one. `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        let mut layer: Vec<Gate> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap_or_default().to_ascii_lowercase();
            if head == "qubits" {
                if circuit.is_some() {
                    return Err(Error::parse(lineno, "duplicate qubits directive"));
                }
                let n: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::parse(lineno, "expected `qubits <n>`"))?;
                circuit = Some(Circuit::new(n).map_err(|e| Error::parse(lineno, e.to_string()))?);
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| Error::parse(lineno, "`qubits <n>` must come first"))?;
            if head == "barrier" {
                c.push_layer(std::mem::take(&mut layer))
                    .map_err(|e| Error::parse(lineno, e.to_string()))?;
                continue;
            }
            let qubits: Vec<usize> = parts
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing qubit list"))?
                .split(',')
                .map(|q| {
                    q.trim()
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad qubit {q:?}")))
                })
                .collect::<Result<_>>()?;
            let angles: Vec<f64> = parts
                .map(|a| {
                    a.parse()
                        .map_err(|_| Error::parse(lineno, format!("bad angle {a:?}")))
                })
                .collect::<Result<_>>()?;
            let kind = GateKind::from_parts(&head, &angles)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            let gate = Gate::new(kind, qubits).map_err(|e| Error::parse(lineno, e.to_string()))?;
            if let Some(&q) = gate.qubits.iter().find(|&&q| q >= c.n) {
                return Err(Error::parse(lineno, format!("qubit {q} out of range")));
            }
            if layer
                .iter()
                .any(|g| g.qubits.iter().any(|q| gate.qubits.contains(q)))
            {
                c.push_layer(std::mem::take(&mut layer))
                    .map_err(|e| Error::parse(lineno, e.to_string()))?;
            }
            layer.push(gate);
        }
        let mut c = circuit
            .ok_or_else(|| Error::Format("circuit text has no `qubits` directive".into()))?;
        c.push_layer(layer)?;
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n);
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push_str("barrier\n");
            }
            for g in layer {
                out.push_str(&g.to_string());
                out.push('\n');
            }
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
