//! JSON documents read and written by the command line tool, and CSV output.

use std::io::{self, Write};

use levyband_core::{Band, BandStrategy, CandidateLevels, ClaimLaw, RiskModel, SimResult};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClaimsDoc {
    Exp { rate: f64 },
    Erlang { shape: u32, rate: f64 },
    Hyperexp { weights: Vec<f64>, rates: Vec<f64> },
}

/// `{"p", "lambda", "claims": {"kind": ...}, "sigma2", "q"}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub p: f64,
    pub lambda: f64,
    pub claims: ClaimsDoc,
    #[serde(default)]
    pub sigma2: f64,
    pub q: f64,
}

impl ModelDoc {
    pub fn to_model(&self) -> levyband_core::Result<RiskModel> {
        let claims = match &self.claims {
            ClaimsDoc::Exp { rate } => ClaimLaw::Exponential { rate: *rate },
            ClaimsDoc::Erlang { shape, rate } => ClaimLaw::Erlang {
                shape: *shape,
                rate: *rate,
            },
            ClaimsDoc::Hyperexp { weights, rates } => ClaimLaw::HyperExponential {
                weights: weights.clone(),
                rates: rates.clone(),
            },
        };
        RiskModel::new(self.p, self.lambda, claims, self.sigma2, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandDoc {
    pub a: f64,
    pub b_minus: f64,
    pub b_plus: f64,
}

/// `{"bands": [{"a", "b_minus", "b_plus"}]}`. Extra fields are ignored, so an
/// `optimize` report can be used as a strategy file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyDoc {
    pub bands: Vec<BandDoc>,
}

impl StrategyDoc {
    pub fn to_strategy(&self) -> levyband_core::Result<BandStrategy> {
        BandStrategy::new(
            self.bands
                .iter()
                .map(|b| Band {
                    a: b.a,
                    b_minus: b.b_minus,
                    b_plus: b.b_plus,
                })
                .collect(),
        )
    }

    pub fn from_strategy(s: &BandStrategy) -> Self {
        StrategyDoc {
            bands: s
                .bands
                .iter()
                .map(|b| BandDoc {
                    a: b.a,
                    b_minus: b.b_minus,
                    b_plus: b.b_plus,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub bands: Vec<BandDoc>,
    pub generator_margin: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl OptimizeReport {
    pub fn new(levels: &CandidateLevels) -> Self {
        OptimizeReport {
            bands: StrategyDoc::from_strategy(&levels.strategy).bands,
            generator_margin: levels.generator_margin,
            iterations: levels.iterations,
            converged: levels.converged,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResultDoc {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub ruin_fraction: f64,
    pub mean_discounted_penalty: f64,
    pub mean_discounted_dividends: f64,
    pub truncation_bias: f64,
}

impl From<SimResult> for SimResultDoc {
    fn from(r: SimResult) -> Self {
        SimResultDoc {
            mean: r.mean,
            stderr: r.stderr,
            n_paths: r.n_paths,
            ruin_fraction: r.ruin_fraction,
            mean_discounted_penalty: r.mean_discounted_penalty,
            mean_discounted_dividends: r.mean_discounted_dividends,
            truncation_bias: r.truncation_bias,
        }
    }
}

/// 12 significant digits, plain notation unless the magnitude is extreme.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap();
    if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-1234567.891234567), "-1234567.89123");
        assert_eq!(fmt_num(1.5e-9), "1.5e-9");
        assert_eq!(fmt_num(0.0), "0");
    }

    proptest::proptest! {
        #[test]
        fn formatting_keeps_twelve_digits(m in -1.0f64..1.0, e in -300i32..300) {
            let x = m * 10f64.powi(e);
            let back: f64 = fmt_num(x).parse().unwrap();
            proptest::prop_assert!((back - x).abs() <= 5e-12 * x.abs());
        }
    }

    #[test]
    fn model_document_round_trip() {
        let text = r#"{"p": 1.5, "lambda": 1, "claims": {"kind": "hyperexp", "weights": [0.4, 0.6], "rates": [1, 3]}, "sigma2": 0, "q": 0.1}"#;
        let doc: ModelDoc = serde_json::from_str(text).unwrap();
        let m = doc.to_model().unwrap();
        assert_eq!(m.claims.gamma_terms().len(), 2);
        let back: ModelDoc = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
        assert!(serde_json::from_str::<ModelDoc>(r#"{"p":1,"lambda":1,"claims":{"kind":"gamma"},"q":0.1}"#).is_err());
    }

    #[test]
    fn report_reads_as_strategy() {
        let text = r#"{"bands":[{"a":0,"b_minus":0,"b_plus":0},{"a":1.8,"b_minus":10.2,"b_plus":10.2}],"generator_margin":-1,"iterations":2,"converged":true}"#;
        let s: StrategyDoc = serde_json::from_str(text).unwrap();
        assert_eq!(s.to_strategy().unwrap().bands.len(), 2);
    }
}
