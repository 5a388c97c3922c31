use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{depolarizing_channel, thermal_relaxation_channel, KrausChannel};
use crate::circuits::Gate;
use crate::qstate::Matrix;
use crate::{Error, Result, C64};

/// Parameters of a thermal-relaxation shortcut in a noise-model file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub t1: f64,
    pub t2: f64,
    pub gate_time: f64,
    #[serde(default)]
    pub pop: f64,
}

/// One channel as written in a noise-model file. Exactly one of the three
/// fields is set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    /// Kraus matrices as rows of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depolarizing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalSpec>,
}

impl ChannelSpec {
    /// Builds the channel; `arity` is used by the depolarizing shortcut.
    /// Thermal relaxation is always single-qubit.
    pub fn build(&self, arity: usize) -> Result<KrausChannel> {
        match (&self.kraus, self.depolarizing, self.thermal) {
            (Some(ops), None, None) => {
                let mats = ops
                    .iter()
                    .map(|rows| {
                        let dim = rows.len();
                        if rows.iter().any(|r| r.len() != dim) {
                            return Err(Error::Format("Kraus matrix is not square".into()));
                        }
                        let flat: Vec<C64> = rows
                            .iter()
                            .flatten()
                            .map(|[re, im]| C64::new(*re, *im))
                            .collect();
                        Ok(Matrix::from_row_slice(dim, dim, &flat))
                    })
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::new(mats)
            }
            (None, Some(p), None) => depolarizing_channel(p, arity),
            (None, None, Some(t)) => thermal_relaxation_channel(t.t1, t.t2, t.gate_time, t.pop),
            _ => Err(Error::Format(
                "channel entry needs exactly one of `kraus`, `depolarizing`, `thermal`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RuleEntry {
    gate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qubits: Option<Vec<usize>>,
    #[serde(flatten)]
    channel: ChannelSpec,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct ModelFile {
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    #[serde(default)]
    gates: Vec<RuleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prep: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<ChannelSpec>,
}

/// Channel attached to a gate name, optionally restricted to exact qubits.
#[derive(Debug, Clone)]
pub struct NoiseRule {
    pub gate: String,
    pub qubits: Option<Vec<usize>>,
    pub channel: KrausChannel,
}

/// Gate-keyed noise plus optional state-preparation and measurement
/// channels applied to every qubit.
///
/// For a gate, rules naming its exact qubits take precedence over rules
/// naming only the gate. Matching rules apply in file order. A
/// single-qubit channel attached to a two-qubit gate acts on each of its
/// qubits. Gates without a rule run ideally.
#[derive(Debug, Clone, Default)]
pub struct NoiseModel {
    pub name: String,
    rules: Vec<NoiseRule>,
    prep: Option<KrausChannel>,
    measure: Option<KrausChannel>,
    source: Option<String>,
}

fn gate_arity(name: &str) -> Result<usize> {
    match name {
        "u3" | "rx" | "rz" | "x" | "h" => Ok(1),
        "cnot" | "rzz" => Ok(2),
        other => Err(Error::Format(format!(
            "noise rule for unknown gate {other:?}"
        ))),
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            name: "ideal".into(),
            ..Default::default()
        }
    }

    pub fn with_rule(
        mut self,
        gate: &str,
        qubits: Option<Vec<usize>>,
        channel: KrausChannel,
    ) -> Result<Self> {
        let gate = gate.to_ascii_lowercase();
        let arity = gate_arity(&gate)?;
        if channel.arity() != 1 && channel.arity() != arity {
            return Err(Error::Dimension {
                expected: arity,
                got: channel.arity(),
            });
        }
        if let Some(q) = &qubits {
            if q.len() != arity {
                return Err(Error::Dimension {
                    expected: arity,
                    got: q.len(),
                });
            }
        }
        self.rules.push(NoiseRule {
            gate,
            qubits,
            channel,
        });
        Ok(self)
    }

    pub fn with_prep(mut self, ch: KrausChannel) -> Result<Self> {
        if ch.arity() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                got: ch.arity(),
            });
        }
        self.prep = Some(ch);
        Ok(self)
    }

    pub fn with_measure(mut self, ch: KrausChannel) -> Result<Self> {
        if ch.arity() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                got: ch.arity(),
            });
        }
        self.measure = Some(ch);
        Ok(self)
    }

    /// Depolarizing noise of strength `p1` after single-qubit gates and `p2`
    /// after CNOTs.
    pub fn depolarizing(p1: f64, p2: f64) -> Result<Self> {
        let mut m = Self {
            name: format!("depolarizing(p1={p1}, p2={p2})"),
            ..Default::default()
        };
        for g in ["u3", "rx", "rz", "x", "h"] {
            if p1 > 0.0 {
                m = m.with_rule(g, None, depolarizing_channel(p1, 1)?)?;
            }
        }
        if p2 > 0.0 {
            m = m.with_rule("cnot", None, depolarizing_channel(p2, 2)?)?;
        }
        Ok(m)
    }

    pub fn rules(&self) -> &[NoiseRule] {
        &self.rules
    }

    pub fn prep(&self) -> Option<&KrausChannel> {
        self.prep.as_ref()
    }

    pub fn measure(&self) -> Option<&KrausChannel> {
        self.measure.as_ref()
    }

    pub fn is_ideal(&self) -> bool {
        self.rules.is_empty() && self.prep.is_none() && self.measure.is_none()
    }

    /// Channels to apply after `gate`, with their target qubits.
    pub fn channels_for<'a>(
        &'a self,
        gate: &'a Gate,
    ) -> impl Iterator<Item = (&'a KrausChannel, Vec<usize>)> + 'a {
        let name = gate.kind.name();
        let specific = self
            .rules
            .iter()
            .any(|r| r.gate == name && r.qubits.as_deref() == Some(&gate.qubits[..]));
        self.rules
            .iter()
            .filter(move |r| {
                r.gate == name
                    && if specific {
                        r.qubits.as_deref() == Some(&gate.qubits[..])
                    } else {
                        r.qubits.is_none()
                    }
            })
            .flat_map(move |r| {
                if r.channel.arity() == gate.qubits.len() {
                    vec![(&r.channel, gate.qubits.clone())]
                } else {
                    gate.qubits.iter().map(|&q| (&r.channel, vec![q])).collect()
                }
            })
    }

    /// Parses the JSON noise-model format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let mut m = Self {
            name: file.name,
            source: Some(text.to_string()),
            ..Default::default()
        };
        for e in &file.gates {
            let gate = match e.gate.to_ascii_lowercase().as_str() {
                "cx" => "cnot".to_string(),
                g => g.to_string(),
            };
            let arity = if e.channel.thermal.is_some() {
                1
            } else {
                gate_arity(&gate)?
            };
            m = m.with_rule(&gate, e.qubits.clone(), e.channel.build(arity)?)?;
        }
        if let Some(p) = &file.prep {
            m = m.with_prep(p.build(1)?)?;
        }
        if let Some(p) = &file.measure {
            m = m.with_measure(p.build(1)?)?;
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    /// Serializes every channel as explicit Kraus matrices.
    pub fn to_json(&self) -> Result<String> {
        let kraus = |ch: &KrausChannel| ChannelSpec {
            kraus: Some(
                ch.operators()
                    .iter()
                    .map(|k| {
                        (0..k.nrows())
                            .map(|r| {
                                (0..k.ncols())
                                    .map(|c| [k[(r, c)].re, k[(r, c)].im])
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
            ),
            ..Default::default()
        };
        let file = ModelFile {
            name: self.name.clone(),
            description: String::new(),
            gates: self
                .rules
                .iter()
                .map(|r| RuleEntry {
                    gate: r.gate.clone(),
                    qubits: r.qubits.clone(),
                    channel: kraus(&r.channel),
                })
                .collect(),
            prep: self.prep.as_ref().map(kraus),
            measure: self.measure.as_ref().map(kraus),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Raw text the model was parsed from, if any.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::Gate;

    const FILE: &str = r#"{
        "name": "test",
        "gates": [
            {"gate": "cnot", "depolarizing": 0.02},
            {"gate": "cnot", "thermal": {"t1": 100.0, "t2": 80.0, "gate_time": 0.3}},
            {"gate": "u3", "qubits": [1], "kraus": [[[[0,0],[1,0]],[[1,0],[0,0]]]]},
            {"gate": "u3", "depolarizing": 0.001}
        ],
        "measure": {"depolarizing": 0.01}
    }"#;

    #[test]
    fn parses_all_entry_forms() {
        let m = NoiseModel::from_json(FILE).unwrap();
        assert_eq!(m.rules().len(), 4);
        assert!(m.measure().is_some() && m.prep().is_none());
        let cx = Gate::cnot(0, 1);
        let chans: Vec<_> = m.channels_for(&cx).collect();
        // one two-qubit depolarizing, then thermal on each qubit
        assert_eq!(chans.len(), 3);
        assert_eq!(chans[0].1, vec![0, 1]);
        assert_eq!(chans[2].1, vec![1]);
        // specific rule shadows the generic one
        let g1 = Gate::u3(1, 0.0, 0.0, 0.0);
        let on1: Vec<_> = m.channels_for(&g1).collect();
        assert_eq!(on1.len(), 1);
        assert_eq!(on1[0].0.operators().len(), 1);
        assert_eq!(m.channels_for(&Gate::u3(0, 0.0, 0.0, 0.0)).count(), 1);
        assert_eq!(m.channels_for(&Gate::h(0)).count(), 0);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(NoiseModel::from_json(r#"{"gates":[{"gate":"cnot"}]}"#).is_err());
        assert!(NoiseModel::from_json(r#"{"gates":[{"gate":"cnot","depolarizing":0.1,"thermal":{"t1":1,"t2":1,"gate_time":0.1}}]}"#).is_err());
        assert!(NoiseModel::from_json(r#"{"gates":[{"gate":"foo","depolarizing":0.1}]}"#).is_err());
        assert!(NoiseModel::from_json(
            r#"{"gates":[{"gate":"x","kraus":[[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}]}"#
        )
        .is_err());
        assert!(NoiseModel::from_json(r#"{"gates":[{"gate":"x","depolarizing":1.5}]}"#).is_err());
    }

    #[test]
    fn json_round_trip_preserves_channels() {
        let m = NoiseModel::from_json(FILE).unwrap();
        let back = NoiseModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back.rules().len(), m.rules().len());
        for (a, b) in back.rules().iter().zip(m.rules()) {
            assert_eq!(a.channel.operators().len(), b.channel.operators().len());
            for (x, y) in a.channel.operators().iter().zip(b.channel.operators()) {
                assert!((x - y).camax() < 1e-15);
            }
        }
    }
}
