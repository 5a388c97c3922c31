use crate::qstate::{arity_of, check_targets, DensityMatrix, Matrix, Pauli};
use crate::{tolerances, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    General,
    /// `(1 - p) rho + p Tr_T[rho] ⊗ I/2^k`, applied in closed form.
    Depolarizing(f64),
}

/// Completely positive trace-preserving map on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Matrix>,
    arity: usize,
    kind: ChannelKind,
}

impl KrausChannel {
    /// Validates `sum K^dag K = 1` to [`tolerances::COMPLETENESS`].
    pub fn new(operators: Vec<Matrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::arg("channel needs at least one Kraus operator"))?;
        let dim = first.nrows();
        let arity = arity_of(dim)?;
        if !(1..=2).contains(&arity) {
            return Err(Error::arg(format!(
                "channels act on 1 or 2 qubits, got {arity}"
            )));
        }
        let mut sum = Matrix::zeros(dim, dim);
        for k in &operators {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: k.nrows().max(k.ncols()),
                });
            }
            sum += k.adjoint() * k;
        }
        let dev = (sum - Matrix::identity(dim, dim)).camax();
        if dev > tolerances::COMPLETENESS {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self {
            operators,
            arity,
            kind: ChannelKind::General,
        })
    }

    pub fn identity(arity: usize) -> Self {
        let d = 1 << arity;
        Self {
            operators: vec![Matrix::identity(d, d)],
            arity,
            kind: ChannelKind::General,
        }
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// Entanglement fidelity `sum |Tr K|^2 / d^2`.
    pub fn process_fidelity(&self) -> f64 {
        let d = (1usize << self.arity) as f64;
        self.operators
            .iter()
            .map(|k| k.trace().norm_sqr())
            .sum::<f64>()
            / (d * d)
    }

    /// Depolarizing probability with the same process fidelity.
    pub fn depolarizing_equivalent(&self) -> f64 {
        let d2 = (1usize << (2 * self.arity)) as f64;
        ((1.0 - self.process_fidelity()) / (1.0 - 1.0 / d2)).clamp(0.0, 1.0)
    }

    /// Sequential composition: `self` first, then `after`.
    pub fn then(&self, after: &KrausChannel) -> Result<Self> {
        if self.arity != after.arity {
            return Err(Error::Dimension {
                expected: self.arity,
                got: after.arity,
            });
        }
        let ops = after
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .filter(|m| m.camax() > 0.0)
            .collect();
        KrausChannel::new(ops)
    }

    /// Applies in place without argument checks.
    pub(crate) fn apply_in_place(&self, rho: &mut DensityMatrix, targets: &[usize]) {
        match self.kind {
            ChannelKind::Depolarizing(p) => depolarize_in_place(rho, p, targets),
            ChannelKind::General => {
                if let [k] = self.operators.as_slice() {
                    rho.conjugate_in_place(k, targets);
                    return;
                }
                let mut acc = vec![C64::default(); rho.data().len()];
                for k in &self.operators {
                    let mut term = rho.clone();
                    term.conjugate_in_place(k, targets);
                    acc.iter_mut().zip(term.data()).for_each(|(a, b)| *a += b);
                }
                rho.data_mut().copy_from_slice(&acc);
            }
        }
    }
}

/// `rho -> (1 - p) rho + p Tr_T[rho] ⊗ I_T / 2^k`.
fn depolarize_in_place(rho: &mut DensityMatrix, p: f64, targets: &[usize]) {
    if p == 0.0 {
        return;
    }
    let dim = rho.dim();
    let local = 1usize << targets.len();
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let offsets: Vec<usize> = (0..local)
        .map(|l| crate::qstate::kernel::scatter_bits(l, targets))
        .collect();
    let scale = p / local as f64;
    let data = rho.data_mut();
    debug_assert_eq!(data.len(), dim * dim);
    for r in (0..dim).filter(|r| r & mask == 0) {
        for c in (0..dim).filter(|c| c & mask == 0) {
            let s: C64 = offsets
                .iter()
                .map(|&e| data[(r | e) * dim + (c | e)])
                .sum::<C64>()
                * scale;
            for &e in &offsets {
                for &f in &offsets {
                    let idx = (r | e) * dim + (c | f);
                    data[idx] *= 1.0 - p;
                    if e == f {
                        data[idx] += s;
                    }
                }
            }
        }
    }
}

/// Depolarizing channel on `arity` qubits with replacement probability `p`.
///
/// Kraus form: `sqrt(1 - p (4^k - 1)/4^k) I` and `sqrt(p / 4^k) P` for the
/// `4^k - 1` non-identity Pauli products, which reproduces
/// `(1 - p) rho + p I/2^k Tr[rho]` exactly.
pub fn depolarizing_channel(p: f64, arity: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::Probability(p));
    }
    if !(1..=2).contains(&arity) {
        return Err(Error::arg(format!(
            "depolarizing channel arity must be 1 or 2, got {arity}"
        )));
    }
    let d2 = (1usize << (2 * arity)) as f64;
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut ops = Vec::new();
    for idx in 0..(1usize << (2 * arity)) {
        let m = if arity == 1 {
            paulis[idx].matrix()
        } else {
            // second factor is qubit 1 (high bit)
            paulis[idx / 4]
                .matrix()
                .kronecker(&paulis[idx % 4].matrix())
        };
        let w = if idx == 0 {
            1.0 - p * (d2 - 1.0) / d2
        } else {
            p / d2
        };
        if w > 0.0 {
            ops.push(m * C64::new(w.sqrt(), 0.0));
        }
    }
    let mut ch = KrausChannel::new(ops)?;
    ch.kind = ChannelKind::Depolarizing(p);
    Ok(ch)
}

/// Generalized amplitude damping followed by pure dephasing.
///
/// Damping `gamma = 1 - exp(-t/T1)` relaxes towards the thermal state with
/// excited population `excited_population`; the extra dephasing
/// `lambda = 1 - exp(-2t/T2 + t/T1)` makes coherences decay as `exp(-t/T2)`.
pub fn thermal_relaxation_channel(
    t1: f64,
    t2: f64,
    gate_time: f64,
    excited_population: f64,
) -> Result<KrausChannel> {
    if !(t1 > 0.0 && t2 > 0.0) || !t1.is_finite() || !t2.is_finite() {
        return Err(Error::arg("T1 and T2 must be positive"));
    }
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(Error::arg(format!("T2 = {t2} exceeds 2 T1 = {}", 2.0 * t1)));
    }
    if !(gate_time >= 0.0) || !gate_time.is_finite() {
        return Err(Error::arg("gate time must be >= 0"));
    }
    if !(0.0..=1.0).contains(&excited_population) {
        return Err(Error::Probability(excited_population));
    }
    let gamma = 1.0 - (-gate_time / t1).exp();
    let lambda = (1.0 - (-2.0 * gate_time / t2 + gate_time / t1).exp()).clamp(0.0, 1.0);
    let r = |x: f64| C64::new(x, 0.0);
    let m =
        |a: f64, b: f64, c: f64, d: f64| Matrix::from_row_slice(2, 2, &[r(a), r(b), r(c), r(d)]);
    let (g, sg) = (gamma, gamma.sqrt());
    let (p0, p1) = ((1.0 - excited_population).sqrt(), excited_population.sqrt());
    let damping = KrausChannel::new(
        [
            m(p0, 0.0, 0.0, p0 * (1.0 - g).sqrt()),
            m(0.0, p0 * sg, 0.0, 0.0),
            m(p1 * (1.0 - g).sqrt(), 0.0, 0.0, p1),
            m(0.0, 0.0, p1 * sg, 0.0),
        ]
        .into_iter()
        .filter(|k| k.camax() > 0.0)
        .collect(),
    )?;
    let dephasing = KrausChannel::new(
        [
            m(1.0, 0.0, 0.0, (1.0 - lambda).sqrt()),
            m(0.0, 0.0, 0.0, lambda.sqrt()),
        ]
        .into_iter()
        .filter(|k| k.camax() > 0.0)
        .collect(),
    )?;
    damping.then(&dephasing)
}

/// `sum K rho K^dag` on `targets`.
pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    targets: &[usize],
) -> Result<DensityMatrix> {
    check_targets(targets, rho.n(), ch.arity())?;
    let mut out = rho.clone();
    ch.apply_in_place(&mut out, targets);
    Ok(out)
}
