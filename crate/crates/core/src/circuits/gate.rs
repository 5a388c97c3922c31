use std::fmt;

use crate::qstate::Matrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// Generic rotation with Euler angles `(theta, phi, lambda)`.
    U3(f64, f64, f64),
    Rx(f64),
    Rz(f64),
    /// `exp(-i theta/2 Z Z)`; compiled to CNOT, Rz, CNOT before noisy runs.
    Rzz(f64),
    /// Control first, target second.
    Cnot,
    X,
    H,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::U3(..) => "u3",
            GateKind::Rx(_) => "rx",
            GateKind::Rz(_) => "rz",
            GateKind::Rzz(_) => "rzz",
            GateKind::Cnot => "cnot",
            GateKind::X => "x",
            GateKind::H => "h",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Rzz(_) | GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        match *self {
            GateKind::U3(a, b, c) => vec![a, b, c],
            GateKind::Rx(a) | GateKind::Rz(a) | GateKind::Rzz(a) => vec![a],
            _ => vec![],
        }
    }

    pub fn from_parts(name: &str, angles: &[f64]) -> Result<Self> {
        let want = |k: usize| {
            if angles.len() == k {
                Ok(())
            } else {
                Err(Error::arg(format!(
                    "{name} takes {k} angles, got {}",
                    angles.len()
                )))
            }
        };
        let kind = match name.to_ascii_lowercase().as_str() {
            "u3" => {
                want(3)?;
                GateKind::U3(angles[0], angles[1], angles[2])
            }
            "rx" => {
                want(1)?;
                GateKind::Rx(angles[0])
            }
            "rz" => {
                want(1)?;
                GateKind::Rz(angles[0])
            }
            "rzz" => {
                want(1)?;
                GateKind::Rzz(angles[0])
            }
            "cnot" | "cx" => {
                want(0)?;
                GateKind::Cnot
            }
            "x" => {
                want(0)?;
                GateKind::X
            }
            "h" => {
                want(0)?;
                GateKind::H
            }
            other => return Err(Error::arg(format!("unknown gate {other:?}"))),
        };
        Ok(kind)
    }

    /// Unitary in the local basis; bit `j` of the row index is target `j`.
    pub fn matrix(&self) -> Matrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let cis = |a: f64| C64::from_polar(1.0, a);
        match *self {
            GateKind::U3(theta, phi, lambda) => {
                let (s, c) = (theta / 2.0).sin_cos();
                Matrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new(c, 0.0),
                        -cis(lambda) * s,
                        cis(phi) * s,
                        cis(phi + lambda) * c,
                    ],
                )
            }
            GateKind::Rx(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let ms = C64::new(0.0, -s);
                Matrix::from_row_slice(2, 2, &[C64::new(c, 0.0), ms, ms, C64::new(c, 0.0)])
            }
            GateKind::Rz(theta) => {
                Matrix::from_row_slice(2, 2, &[cis(-theta / 2.0), z, z, cis(theta / 2.0)])
            }
            GateKind::Rzz(theta) => {
                let (a, b) = (cis(-theta / 2.0), cis(theta / 2.0));
                Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b, b, a]))
            }
            GateKind::Cnot => {
                let mut m = Matrix::identity(4, 4);
                m[(1, 1)] = z;
                m[(3, 3)] = z;
                m[(1, 3)] = one;
                m[(3, 1)] = one;
                m
            }
            GateKind::X => Matrix::from_row_slice(2, 2, &[z, one, one, z]),
            GateKind::H => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Matrix::from_row_slice(2, 2, &[h, h, h, -h])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::arg(format!(
                "{} acts on {} qubits, got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::DuplicateQubit(qubits[0]));
        }
        if kind.angles().iter().any(|a| !a.is_finite()) {
            return Err(Error::arg("gate angles must be finite"));
        }
        Ok(Self { kind, qubits })
    }

    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self {
            kind: GateKind::U3(theta, phi, lambda),
            qubits: vec![q],
        }
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rx(theta),
            qubits: vec![q],
        }
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rz(theta),
            qubits: vec![q],
        }
    }

    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rzz(theta),
            qubits: vec![a, b],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            qubits: vec![control, target],
        }
    }

    pub fn x(q: usize) -> Self {
        Self {
            kind: GateKind::X,
            qubits: vec![q],
        }
    }

    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            qubits: vec![q],
        }
    }

    pub fn matrix(&self) -> Matrix {
        self.kind.matrix()
    }

    pub fn is_entangling(&self) -> bool {
        self.kind.arity() == 2
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, "{} {}", self.kind.name(), qs.join(","))?;
        for a in self.kind.angles() {
            write!(f, " {a:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::check_unitary;

    #[test]
    fn all_kinds_are_unitary() {
        for k in [
            GateKind::U3(0.3, -1.2, 2.5),
            GateKind::Rx(0.7),
            GateKind::Rz(-0.4),
            GateKind::Rzz(1.1),
            GateKind::Cnot,
            GateKind::X,
            GateKind::H,
        ] {
            check_unitary(&k.matrix()).unwrap();
        }
    }

    #[test]
    fn u3_zero_is_identity() {
        assert!((GateKind::U3(0.0, 0.0, 0.0).matrix() - Matrix::identity(2, 2)).camax() < 1e-15);
    }

    #[test]
    fn rzz_equals_cnot_rz_cnot() {
        let theta = 0.83;
        let cx = GateKind::Cnot.matrix();
        // rz on the target bit (bit 1 of the local index)
        let rz = GateKind::Rz(theta)
            .matrix()
            .kronecker(&Matrix::identity(2, 2));
        let composed = &cx * rz * &cx;
        assert!((composed - GateKind::Rzz(theta).matrix()).camax() < 1e-14);
    }

    #[test]
    fn u3_special_cases() {
        let pi = std::f64::consts::PI;
        // u3(pi, 0, pi) = X
        assert!((GateKind::U3(pi, 0.0, pi).matrix() - GateKind::X.matrix()).camax() < 1e-15);
        // u3(theta, -pi/2, pi/2) = rx(theta)
        let t = 0.9;
        assert!(
            (GateKind::U3(t, -pi / 2.0, pi / 2.0).matrix() - GateKind::Rx(t).matrix()).camax()
                < 1e-15
        );
    }

    #[test]
    fn constructor_validation() {
        assert!(Gate::new(GateKind::Cnot, vec![1, 1]).is_err());
        assert!(Gate::new(GateKind::Rx(f64::NAN), vec![0]).is_err());
        assert!(Gate::new(GateKind::X, vec![0, 1]).is_err());
        assert!(GateKind::from_parts("u3", &[1.0]).is_err());
        assert_eq!(GateKind::from_parts("CX", &[]).unwrap(), GateKind::Cnot);
    }
}
