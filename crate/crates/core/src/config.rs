//! Experiment configuration files: TOML, normally written as flat dotted
//! keys.
//!
//! ```toml
//! graph.source = "sbm"        # or "file"
//! graph.n = 100
//! sbm.p = 0.5
//! sbm.eps = 0.05
//! experiment.alphas = [0.05, 0.1, 0.2]
//! experiment.replications = 100
//! experiment.seed = 1
//! output.csv = "results.csv"
//! ```
//!
//! Every key is optional and defaults to the block-model study in
//! [`ExperimentConfig::block_model_study`]; unknown keys are rejected. Relative
//! paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::baselines::{CvtConfig, ThresholdGrid};
use crate::conformal::Adjustment;
use crate::error::{Error, Result};
use crate::generator::SbmParams;
use crate::harness::{ExperimentConfig, GraphSource, Method};
use crate::io::{load_observed, LoadOptions};
use crate::scoring::{ScorerKind, TrainConfig};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    graph: RawGraph,
    #[serde(default)]
    sbm: RawSbm,
    #[serde(default)]
    data: RawData,
    #[serde(default)]
    design: RawDesign,
    #[serde(default)]
    scorer: RawScorer,
    #[serde(default)]
    experiment: RawExperiment,
    #[serde(default)]
    conformal: RawConformal,
    #[serde(default)]
    cvt: RawCvt,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    source: Option<String>,
    n: Option<usize>,
    directed: Option<bool>,
    self_pairs: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSbm {
    p: Option<f64>,
    eps: Option<f64>,
    pi: Option<Vec<f64>>,
    gamma: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    edges: Option<PathBuf>,
    one_based: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    pi_mis: Option<f64>,
    ratio_h0_h1: Option<f64>,
    cal_size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScorer {
    kind: Option<String>,
    learning_rate: Option<f64>,
    iterations: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    methods: Option<Vec<String>>,
    alphas: Option<Vec<f64>>,
    replications: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConformal {
    adjust: Option<String>,
    storey_lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCvt {
    val_fraction: Option<f64>,
    divisors: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<PathBuf>,
}

/// A parsed configuration: the experiment plus where to write results.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub csv: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(crate::io::io_err(path))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

/// Parses config text; relative paths are resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut config = ExperimentConfig::block_model_study();
    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

    let directed = raw.graph.directed.unwrap_or(false);
    let self_pairs = raw.graph.self_pairs.unwrap_or(true);
    config.source = match raw.graph.source.as_deref().unwrap_or("sbm") {
        "sbm" => {
            let params = match (raw.sbm.pi, raw.sbm.gamma) {
                (Some(pi), Some(gamma)) => {
                    if raw.sbm.p.is_some() || raw.sbm.eps.is_some() {
                        return Err(Error::Config(
                            "sbm.p/sbm.eps conflict with sbm.pi/sbm.gamma".into(),
                        ));
                    }
                    SbmParams::new(pi, gamma)?
                }
                (None, None) => {
                    SbmParams::five_class_hub(raw.sbm.p.unwrap_or(0.5), raw.sbm.eps.unwrap_or(0.05))
                }
                _ => {
                    return Err(Error::Config(
                        "sbm.pi and sbm.gamma must be given together".into(),
                    ))
                }
            };
            GraphSource::Sbm {
                params,
                n: raw.graph.n.unwrap_or(100),
                directed,
                self_pairs,
            }
        }
        "file" => {
            let edges = raw.data.edges.ok_or_else(|| {
                Error::Config("graph.source = \"file\" requires data.edges".into())
            })?;
            let options = LoadOptions {
                n: raw.graph.n,
                directed,
                no_self_pairs: !self_pairs,
                one_based: raw.data.one_based.unwrap_or(false),
            };
            GraphSource::Fixed(load_observed(&resolve(edges), None, &options)?)
        }
        other => {
            return Err(Error::Config(format!(
                "graph.source `{other}` must be \"sbm\" or \"file\""
            )))
        }
    };

    if let Some(v) = raw.design.pi_mis {
        config.design.pi_mis = v;
    }
    if let Some(v) = raw.design.ratio_h0_h1 {
        config.design.ratio_h0_h1 = v;
    }
    if let Some(v) = raw.design.cal_size {
        config.design.cal_size = v;
    }

    if let Some(kind) = raw.scorer.kind {
        config.scorer = kind.parse()?;
    }
    if raw.scorer.learning_rate.is_some() || raw.scorer.iterations.is_some() {
        let ScorerKind::Logistic(train) = &mut config.scorer else {
            return Err(Error::Config(
                "scorer.learning_rate/iterations require scorer.kind = \"logistic\"".into(),
            ));
        };
        let defaults = TrainConfig::default();
        train.learning_rate = raw.scorer.learning_rate.unwrap_or(defaults.learning_rate);
        train.iterations = raw.scorer.iterations.unwrap_or(defaults.iterations);
    }

    if let Some(methods) = raw.experiment.methods {
        config.methods = methods
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<_>>()?;
    }
    if let Some(v) = raw.experiment.alphas {
        config.alphas = v;
    }
    if let Some(v) = raw.experiment.replications {
        config.replications = v;
    }
    if let Some(v) = raw.experiment.seed {
        config.master_seed = v;
    }

    config.adjustment = match raw.conformal.adjust.as_deref().unwrap_or("ratio") {
        "ratio" => Adjustment::Ratio,
        "none" => Adjustment::None,
        "storey" => Adjustment::Storey {
            lambda: raw.conformal.storey_lambda.unwrap_or(0.5),
        },
        other => {
            return Err(Error::Config(format!(
                "conformal.adjust `{other}` must be \"ratio\", \"storey\" or \"none\""
            )))
        }
    };

    let mut cvt = CvtConfig::default();
    if let Some(v) = raw.cvt.val_fraction {
        cvt.val_fraction = v;
    }
    if let Some(d) = raw.cvt.divisors {
        cvt.grid = ThresholdGrid::Divisors(d);
    }
    config.cvt = cvt;

    config.validate()?;
    Ok(RunConfig {
        experiment: config,
        csv: raw.output.csv.map(resolve),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default_study() {
        let run = parse_config("", Path::new(".")).unwrap();
        assert_eq!(run.experiment, ExperimentConfig::block_model_study());
        assert!(run.csv.is_none());
    }

    #[test]
    fn overrides_apply() {
        let text = r#"
            graph.n = 40
            experiment.methods = ["conformal", "cvt"]
            experiment.alphas = [0.1]
            experiment.replications = 3
            experiment.seed = 9
            scorer.kind = "logistic"
            scorer.iterations = 50
            conformal.adjust = "storey"
            conformal.storey_lambda = 0.4
            output.csv = "out.csv"
        "#;
        let run = parse_config(text, Path::new("/tmp/x")).unwrap();
        let e = &run.experiment;
        assert!(matches!(e.source, GraphSource::Sbm { n: 40, .. }));
        assert_eq!(e.methods, vec![Method::Conformal, Method::CrossValidated]);
        assert_eq!(e.master_seed, 9);
        assert!(matches!(&e.scorer, ScorerKind::Logistic(t) if t.iterations == 50));
        assert_eq!(e.adjustment, Adjustment::Storey { lambda: 0.4 });
        assert_eq!(run.csv.unwrap(), Path::new("/tmp/x/out.csv"));
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(parse_config("[graph]\nnodes = 3\n", Path::new(".")).is_err());
        assert!(parse_config("[bogus]\n", Path::new(".")).is_err());
        assert!(parse_config("[experiment]\nalphas = [1.5]\n", Path::new(".")).is_err());
        assert!(parse_config("[experiment]\nmethods = [\"magic\"]\n", Path::new(".")).is_err());
        assert!(parse_config("[graph]\nsource = \"file\"\n", Path::new(".")).is_err());
        assert!(parse_config("[scorer]\niterations = 5\n", Path::new(".")).is_err());
    }
}
