use std::io::{BufRead, Write};

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::MeasurementPlan;
use crate::qstate::{DensityMatrix, Matrix};
use crate::{tolerances, Error, Result};

/// Outcome counts of one random unitary, indexed by local outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    pub unitary_index: usize,
    pub counts: Vec<u64>,
}

impl ShotRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial(rng: &mut impl rand::Rng, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = shots;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(left, q).expect("valid binomial").sample(rng);
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts
}

/// Samples `N_m` shots per random unitary from the rotated reduced state.
pub fn simulate_shots(
    rho: &DensityMatrix,
    unitaries: &[Vec<Matrix>],
    plan: &MeasurementPlan,
) -> Result<Vec<ShotRecord>> {
    plan.validate()?;
    if unitaries.len() != plan.n_u {
        return Err(Error::Dimension {
            expected: plan.n_u,
            got: unitaries.len(),
        });
    }
    let full: Vec<usize> = (0..rho.n()).collect();
    let reduced = if plan.subsystem == full {
        rho.clone()
    } else {
        rho.partial_trace(&plan.subsystem)?
    };
    unitaries
        .par_iter()
        .enumerate()
        .map(|(u, tuple)| {
            if tuple.len() != plan.n_a() {
                return Err(Error::Dimension {
                    expected: plan.n_a(),
                    got: tuple.len(),
                });
            }
            let mut r = reduced.clone();
            for (j, m) in tuple.iter().enumerate() {
                r.conjugate_in_place(m, &[j]);
            }
            let probs: Vec<f64> = (0..r.dim())
                .map(|s| {
                    let p = r.get(s, s).re;
                    if p < -tolerances::NEGATIVE_PROBABILITY {
                        Err(Error::InvalidState(format!(
                            "negative outcome probability {p:.3e}"
                        )))
                    } else {
                        Ok(p.max(0.0))
                    }
                })
                .collect::<Result<_>>()?;
            let mut rng = plan.rng(2 * u as u64 + 1);
            Ok(ShotRecord {
                unitary_index: u,
                counts: multinomial(&mut rng, plan.n_m as u64, &probs),
            })
        })
        .collect()
}

/// Restricts records measured on `plan.subsystem` to the qubits `keep`
/// (labels, in the order they should appear in the new outcomes).
pub fn marginalize(
    records: &[ShotRecord],
    plan: &MeasurementPlan,
    keep: &[usize],
) -> Result<(Vec<ShotRecord>, MeasurementPlan)> {
    let positions: Vec<usize> = keep
        .iter()
        .map(|q| {
            plan.subsystem
                .iter()
                .position(|s| s == q)
                .ok_or_else(|| Error::arg(format!("qubit {q} was not measured")))
        })
        .collect::<Result<_>>()?;
    let sub = MeasurementPlan {
        subsystem: keep.to_vec(),
        ..plan.clone()
    };
    sub.validate()?;
    let out = records
        .iter()
        .map(|r| {
            let mut counts = vec![0u64; 1 << keep.len()];
            for (s, &c) in r.counts.iter().enumerate() {
                counts[crate::qstate::kernel::gather_bits(s, &positions)] += c;
            }
            ShotRecord {
                unitary_index: r.unitary_index,
                counts,
            }
        })
        .collect();
    Ok((out, sub))
}

fn bitstring(s: usize, width: usize) -> String {
    format!("{s:0width$b}")
}

/// Writes records as CSV. Comment lines carry the plan; outcome strings
/// are written most significant local bit first, so the rightmost
/// character is `subsystem[0]`. Zero counts are omitted.
pub fn write_records_csv<W: Write>(
    out: W,
    records: &[ShotRecord],
    plan: &MeasurementPlan,
) -> Result<()> {
    let mut out = out;
    let subsystem: Vec<String> = plan.subsystem.iter().map(|q| q.to_string()).collect();
    writeln!(
        out,
        "# n_u={} n_m={} subsystem={} seed={}",
        plan.n_u,
        plan.n_m,
        subsystem.join(";"),
        plan.seed
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["unitary_index", "bitstring", "count"])
        .map_err(csv_err)?;
    for r in records {
        for (s, &c) in r.counts.iter().enumerate().filter(|(_, &c)| c > 0) {
            w.write_record([
                r.unitary_index.to_string(),
                bitstring(s, plan.n_a()),
                c.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn parse_header(line: &str) -> Result<MeasurementPlan> {
    let body = line.trim_start_matches('#').trim();
    let mut n_u = None;
    let mut n_m = None;
    let mut subsystem = None;
    let mut seed = None;
    for kv in body.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("bad header field {kv:?}")))?;
        let bad = || Error::parse(1, format!("bad value for {k}"));
        match k {
            "n_u" => n_u = Some(v.parse().map_err(|_| bad())?),
            "n_m" => n_m = Some(v.parse().map_err(|_| bad())?),
            "seed" => seed = Some(v.parse().map_err(|_| bad())?),
            "subsystem" => {
                subsystem = Some(
                    v.split(';')
                        .map(|q| q.parse().map_err(|_| bad()))
                        .collect::<Result<Vec<usize>>>()?,
                )
            }
            _ => {}
        }
    }
    match (n_u, n_m, subsystem, seed) {
        (Some(n_u), Some(n_m), Some(subsystem), Some(seed)) => {
            MeasurementPlan::new(n_u, n_m, subsystem, seed)
        }
        _ => Err(Error::parse(
            1,
            "header must carry n_u, n_m, subsystem and seed",
        )),
    }
}

pub fn read_records_csv<R: BufRead>(input: R) -> Result<(Vec<ShotRecord>, MeasurementPlan)> {
    let mut input = input;
    // leading comment lines may precede the one carrying the plan
    let plan = loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 || !line.starts_with('#') {
            return Err(Error::parse(1, "missing `# n_u=...` header"));
        }
        if line.contains("n_u=") {
            break parse_header(&line)?;
        }
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let mut records: Vec<ShotRecord> = (0..plan.n_u)
        .map(|u| ShotRecord {
            unitary_index: u,
            counts: vec![0; 1 << plan.n_a()],
        })
        .collect();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 3;
        let (Some(u), Some(b), Some(c)) = (row.get(0), row.get(1), row.get(2)) else {
            return Err(Error::parse(line, "expected three columns"));
        };
        let u: usize = u
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, "bad unitary index"))?;
        let b = b.trim();
        if b.len() != plan.n_a() {
            return Err(Error::parse(
                line,
                format!("bitstring {b:?} has wrong width"),
            ));
        }
        let s = usize::from_str_radix(b, 2)
            .map_err(|_| Error::parse(line, format!("bad bitstring {b:?}")))?;
        let c: u64 = c
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, "bad count"))?;
        let rec = records
            .get_mut(u)
            .ok_or_else(|| Error::parse(line, format!("unitary index {u} >= n_u")))?;
        rec.counts[s] += c;
    }
    for r in &records {
        if r.total() != plan.n_m as u64 {
            return Err(Error::Format(format!(
                "unitary {} has {} shots, plan says {}",
                r.unitary_index,
                r.total(),
                plan.n_m
            )));
        }
    }
    Ok((records, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmeas::sample_local_random_unitaries;

    #[test]
    fn identity_rotation_on_zero_state() {
        let plan = MeasurementPlan::new(3, 64, vec![0], 1).unwrap();
        let id = vec![vec![Matrix::identity(2, 2)]; 3];
        let recs = simulate_shots(&DensityMatrix::basis(1, 0).unwrap(), &id, &plan).unwrap();
        for r in recs {
            assert_eq!(r.counts, vec![64, 0]);
        }
    }

    #[test]
    fn counts_sum_to_shots() {
        let plan = MeasurementPlan::new(10, 37, vec![2, 0], 4).unwrap();
        let us = sample_local_random_unitaries(&plan).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        for r in simulate_shots(&rho, &us, &plan).unwrap() {
            assert_eq!(r.total(), 37);
            assert_eq!(r.counts.len(), 4);
        }
    }

    #[test]
    fn empirical_distribution_converges() {
        // rotated |0> on one qubit: P(0) = |u00|^2
        let plan = MeasurementPlan::new(2, 100_000, vec![0], 5).unwrap();
        let us = sample_local_random_unitaries(&plan).unwrap();
        let recs = simulate_shots(&DensityMatrix::basis(1, 0).unwrap(), &us, &plan).unwrap();
        for (r, u) in recs.iter().zip(&us) {
            let p0 = u[0][(0, 0)].norm_sqr();
            let tv = (r.counts[0] as f64 / 1e5 - p0).abs();
            assert!(tv < 0.01, "tv {tv}");
        }
    }

    #[test]
    fn marginal_matches_direct_sampling_distribution() {
        let plan = MeasurementPlan::new(4, 1000, vec![0, 1, 2], 9).unwrap();
        let recs: Vec<ShotRecord> = (0..4)
            .map(|u| ShotRecord {
                unitary_index: u,
                counts: (0..8).map(|s| (s * 10 + u) as u64).collect(),
            })
            .collect();
        let (m, sub) = marginalize(&recs, &plan, &[2]).unwrap();
        assert_eq!(sub.subsystem, vec![2]);
        // qubit 2 is bit 2 of the local outcome
        let hi: u64 = (4..8).map(|s| recs[1].counts[s]).sum();
        assert_eq!(m[1].counts[1], hi);
        assert!(marginalize(&recs, &plan, &[5]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let plan = MeasurementPlan::new(5, 50, vec![1, 0], 3).unwrap();
        let us = sample_local_random_unitaries(&plan).unwrap();
        let rho = DensityMatrix::basis(2, 1).unwrap();
        let recs = simulate_shots(&rho, &us, &plan).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &recs, &plan).unwrap();
        let (back, p2) = read_records_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(p2, plan);
        assert_eq!(back, recs);
    }

    #[test]
    fn csv_rejects_short_records() {
        let text =
            "# n_u=2 n_m=3 subsystem=0 seed=1\nunitary_index,bitstring,count\n0,0,3\n1,1,2\n";
        assert!(read_records_csv(std::io::Cursor::new(text)).is_err());
        let text = "# n_u=2 n_m=3 subsystem=0 seed=1\nunitary_index,bitstring,count\n0,00,3\n";
        assert!(read_records_csv(std::io::Cursor::new(text)).is_err());
    }
}
