use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::Matrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Matrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => Matrix::from_row_slice(2, 2, &[l, o, o, l]),
            Pauli::X => Matrix::from_row_slice(2, 2, &[o, l, l, o]),
            Pauli::Y => Matrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => Matrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }
}

/// Tensor product of single-qubit Paulis in symplectic form.
///
/// Qubit `q` carries an X component when bit `q` of `x` is set and a Z
/// component when bit `q` of `z` is set; both set means Y. In the text form
/// the leftmost character is qubit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Result<Self> {
        if paulis.is_empty() || paulis.len() > 63 {
            return Err(Error::arg("Pauli strings must cover 1 to 63 qubits"));
        }
        let mut s = Self::identity(paulis.len());
        for (q, p) in paulis.iter().enumerate() {
            s = s.with(q, *p);
        }
        Ok(s)
    }

    /// Single non-identity factor `p` on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        Self::identity(n).with(q, p)
    }

    pub fn with(mut self, q: usize, p: Pauli) -> Self {
        assert!(q < self.n, "qubit {q} outside {}-qubit string", self.n);
        let bit = 1u64 << q;
        self.x &= !bit;
        self.z &= !bit;
        match p {
            Pauli::I => {}
            Pauli::X => self.x |= bit,
            Pauli::Y => {
                self.x |= bit;
                self.z |= bit;
            }
            Pauli::Z => self.z |= bit,
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> Pauli {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub(crate) fn x_mask(&self) -> usize {
        self.x as usize
    }

    /// `P|b> = phase(b) |b ^ x_mask>`.
    pub(crate) fn phase(&self, b: usize) -> C64 {
        let ny = (self.x & self.z).count_ones();
        let sign = if (b as u64 & self.z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let ipow = match ny % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        ipow * sign
    }

    pub fn matrix(&self) -> Matrix {
        let dim = 1usize << self.n;
        let mut m = Matrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b ^ self.x_mask(), b)] = self.phase(b);
        }
        m
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let paulis = s
            .trim()
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| Error::arg(format!("bad Pauli character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_paulis(&paulis)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

/// Real-weighted sum of Pauli strings on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliObservable {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliObservable {
    pub fn new(n: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("observable needs at least one qubit"));
        }
        for (c, s) in &terms {
            if s.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: s.n(),
                });
            }
            if !c.is_finite() {
                return Err(Error::arg("non-finite coefficient"));
            }
        }
        Ok(Self { n, terms })
    }

    pub fn single(coefficient: f64, string: PauliString) -> Self {
        Self {
            n: string.n(),
            terms: vec![(coefficient, string)],
        }
    }

    /// `sigma^z` on qubit `q`.
    pub fn z(n: usize, q: usize) -> Self {
        Self::single(1.0, PauliString::single(n, q, Pauli::Z))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// `Tr[O] = 2^n * (sum of identity coefficients)`.
    pub fn trace(&self) -> f64 {
        let id: f64 = self
            .terms
            .iter()
            .filter(|(_, s)| s.is_identity())
            .map(|(c, _)| c)
            .sum();
        id * (1u64 << self.n) as f64
    }

    /// `2^-n Tr[O]`, the value on the maximally mixed state.
    pub fn mixed_value(&self) -> f64 {
        self.trace() / (1u64 << self.n) as f64
    }

    pub fn matrix(&self) -> Matrix {
        let dim = 1usize << self.n;
        let mut m = Matrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            for b in 0..dim {
                m[(b ^ s.x_mask(), b)] += s.phase(b) * *c;
            }
        }
        m
    }

    /// Sum of absolute coefficients, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(c, s)| (c * factor, *s)).collect(),
        }
    }

    /// Parses the operator-file format: one `coefficient PAULISTRING` term per
    /// line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(c), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(i + 1, "expected `coefficient PAULISTRING`"));
            };
            let c: f64 = c
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad coefficient {c:?}")))?;
            let s: PauliString = s
                .parse()
                .map_err(|e: Error| Error::parse(i + 1, e.to_string()))?;
            match n {
                None => n = Some(s.n()),
                Some(n) if n != s.n() => {
                    return Err(Error::parse(
                        i + 1,
                        format!("string length {} differs from {n}", s.n()),
                    ))
                }
                _ => {}
            }
            terms.push((c, s));
        }
        let n = n.ok_or_else(|| Error::Format("operator file has no terms".into()))?;
        Self::new(n, terms)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        self.terms
            .iter()
            .map(|(c, s)| format!("{c} {s}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip_and_order() {
        let s: PauliString = "XYZIXX".parse().unwrap();
        assert_eq!(s.n(), 6);
        assert_eq!(s.get(0), Pauli::X);
        assert_eq!(s.get(1), Pauli::Y);
        assert_eq!(s.get(3), Pauli::I);
        assert_eq!(s.to_string(), "XYZIXX");
        assert_eq!(s.weight(), 5);
    }

    #[test]
    fn matrix_matches_kronecker_product() {
        let s: PauliString = "XY".parse().unwrap();
        // qubit 0 is the least significant bit, so it is the right factor
        let expected = Pauli::Y.matrix().kronecker(&Pauli::X.matrix());
        assert!((s.matrix() - expected).camax() < 1e-15);
    }

    #[test]
    fn trace_counts_identity_terms() {
        let o = PauliObservable::parse("0.5 III\n-1.25 ZZI\n2 III # again\n").unwrap();
        assert_eq!(o.trace(), 8.0 * 2.5);
        assert!((o.matrix().trace().re - o.trace()).abs() < 1e-12);
    }

    #[test]
    fn parse_rejects_ragged_lengths() {
        assert!(matches!(
            PauliObservable::parse("1 ZZ\n1 ZZZ"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(PauliObservable::parse("# nothing").is_err());
        assert!(PauliObservable::parse("1 ZQ").is_err());
    }
}
