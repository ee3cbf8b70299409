use serde::{Deserialize, Serialize};

use super::channel::ChannelLabels;
use super::{
    validate_channel, validate_source, ChannelSpec, ConditionalDistribution, Distribution,
    RawChannel, RawSource, SourceSpec, ValidationErrors, ValidationIssue,
};

/// JSON Schema for [`SpecFile`], shipped alongside the crate.
pub const CHANNEL_SCHEMA: &str = include_str!("../../../../schema/channel.schema.json");

/// On-disk channel/source description. Every section is optional so that a
/// file may carry only a source, only a channel, or both.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<Vec<Vec<Vec<Vec<f64>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_distortion: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<ChannelLabels>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<RawSource>,
    /// Encoder kernel `P(x | u)`, rows indexed by source symbol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoder: Option<Vec<Vec<f64>>>,
    /// Channel input distribution used by the random-coding simulator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_distribution: Option<Vec<f64>>,
}

fn missing(field: &str) -> ValidationErrors {
    ValidationErrors(vec![ValidationIssue::Empty {
        field: field.to_string(),
    }])
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }

    pub fn from_parts(channel: Option<&ChannelSpec>, source: Option<&SourceSpec>) -> Self {
        let mut file = SpecFile::default();
        if let Some(ch) = channel {
            let raw = ch.to_raw();
            file.state_prior = Some(raw.state_prior);
            file.law = Some(raw.law);
            file.cost = raw.cost;
            file.state_distortion = Some(raw.state_distortion);
            file.labels = raw.labels;
        }
        file.source = source.map(SourceSpec::to_raw);
        file
    }

    pub fn has_channel(&self) -> bool {
        self.law.is_some()
    }

    pub fn channel(&self) -> Result<ChannelSpec, ValidationErrors> {
        let raw = RawChannel {
            state_prior: self.state_prior.clone().ok_or_else(|| missing("state_prior"))?,
            law: self.law.clone().ok_or_else(|| missing("law"))?,
            cost: self.cost.clone(),
            state_distortion: self
                .state_distortion
                .clone()
                .ok_or_else(|| missing("state_distortion"))?,
            labels: self.labels.clone(),
        };
        validate_channel(raw)
    }

    pub fn source(&self) -> Result<SourceSpec, ValidationErrors> {
        validate_source(self.source.clone().ok_or_else(|| missing("source"))?)
    }

    pub fn encoder(&self) -> Option<Result<ConditionalDistribution, ValidationErrors>> {
        self.encoder.clone().map(ConditionalDistribution::new)
    }

    pub fn input_distribution(&self) -> Option<Result<Distribution, ValidationErrors>> {
        self.input_distribution.clone().map(Distribution::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::build_binary_isac_channel;
    use proptest::prelude::*;

    #[test]
    fn schema_is_valid_json() {
        let v: serde_json::Value = serde_json::from_str(CHANNEL_SCHEMA).unwrap();
        assert!(v["properties"]["law"].is_object());
    }

    #[test]
    fn parse_errors_are_line_anchored() {
        let e = SpecFile::from_json("{\n  \"state_prior\": [0.5, 0.5],\n  \"law\": oops\n}")
            .unwrap_err();
        assert_eq!(e.line(), 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(SpecFile::from_json(r#"{"state_priors": [1.0]}"#).is_err());
    }

    #[test]
    fn source_only_file() {
        let f = SpecFile::from_json(
            r#"{"source": {"prior": [0.4, 0.6], "distortion": [[0, 1], [1, 0]]}}"#,
        )
        .unwrap();
        assert!(!f.has_channel());
        assert_eq!(f.source().unwrap().n_symbols(), 2);
        assert!(f.channel().is_err());
    }

    fn arbitrary_channel() -> impl Strategy<Value = ChannelSpec> {
        (1usize..4, 1usize..4, 1usize..3, 1usize..3, 1usize..4).prop_flat_map(
            |(ns, nx, ny, nz, ne)| {
                (
                    prop::collection::vec(0.01f64..1.0, ns),
                    prop::collection::vec(prop::collection::vec(0.0f64..1.0, ny * nz), ns * nx),
                    prop::collection::vec(0.0f64..5.0, nx),
                    prop::collection::vec(0.0f64..3.0, ns * ne),
                )
                    .prop_map(move |(prior, rows, cost, dist)| {
                        let prior = normalize(prior);
                        let law = (0..ns)
                            .map(|s| {
                                (0..nx)
                                    .map(|x| {
                                        let r = normalize(
                                            rows[s * nx + x].iter().map(|v| v + 1e-3).collect(),
                                        );
                                        r.chunks(nz).map(<[f64]>::to_vec).collect()
                                    })
                                    .collect()
                            })
                            .collect();
                        let raw = RawChannel {
                            state_prior: prior,
                            law,
                            cost: Some(cost),
                            state_distortion: dist.chunks(ne).map(<[f64]>::to_vec).collect(),
                            labels: None,
                        };
                        validate_channel(raw).unwrap()
                    })
            },
        )
    }

    fn normalize(v: Vec<f64>) -> Vec<f64> {
        let s: f64 = v.iter().sum();
        let mut v: Vec<f64> = v.iter().map(|x| x / s).collect();
        let tail: f64 = v[1..].iter().sum();
        v[0] = 1.0 - tail;
        v
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(ch in arbitrary_channel(), pu in prop::collection::vec(0.01f64..1.0, 1..5)) {
            let pu = normalize(pu);
            let n = pu.len();
            let src = SourceSpec::hamming(Distribution::new(pu).unwrap());
            let text = SpecFile::from_parts(Some(&ch), Some(&src)).to_json();
            let back = SpecFile::from_json(&text).unwrap();
            let ch2 = back.channel().unwrap();
            let src2 = back.source().unwrap();
            prop_assert_eq!(src2.n_symbols(), n);
            let (a, b) = (ch.to_raw(), ch2.to_raw());
            let bits = |r: &RawChannel| -> Vec<u64> {
                r.law.iter().flatten().flatten().flatten()
                    .chain(&r.state_prior)
                    .chain(r.cost.iter().flatten())
                    .chain(r.state_distortion.iter().flatten())
                    .map(|v| v.to_bits()).collect()
            };
            prop_assert_eq!(bits(&a), bits(&b));
            let sbits = |s: &SourceSpec| -> Vec<u64> {
                let r = s.to_raw();
                r.prior.iter().chain(r.distortion.iter().flatten()).map(|v| v.to_bits()).collect()
            };
            prop_assert_eq!(sbits(&src), sbits(&src2));
        }
    }

    #[test]
    fn binary_channel_round_trip() {
        let ch = build_binary_isac_channel(0.4).unwrap();
        let text = SpecFile::from_parts(Some(&ch), None).to_json();
        assert_eq!(SpecFile::from_json(&text).unwrap().channel().unwrap(), ch);
    }
}
