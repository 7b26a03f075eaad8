//! Synthetic datasets with a known set of relevant pathways.
//!
//! Expression values are i.i.d. standard normal, pathways are consecutive
//! blocks of `pathway_size` genes, and the log odds depend only on the first
//! few blocks:
//!
//! ```text
//! model 1: 2x₁⁽¹⁾ + 3x₂⁽¹⁾ + exp(0.8x₁⁽²⁾ + 0.8x₂⁽²⁾) + 4x₁⁽³⁾x₂⁽³⁾
//! model 2: 4 sin(x₁⁽¹⁾ + x₂⁽¹⁾) + 3|x₁⁽²⁾ − x₂⁽²⁾| + 2x₁⁽³⁾² − 2x₂⁽³⁾²
//! model 3: 2 Σ_{m=1..10} ‖x⁽ᵐ⁾‖₂
//! ```
//!
//! The log odds are centered at their sample median before labels are drawn.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{ExpressionDataset, LabelVector, Pathway, PathwayCollection};
use crate::error::{PkbError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimModel {
    Model1,
    Model2,
    Model3,
}

impl SimModel {
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(SimModel::Model1),
            2 => Ok(SimModel::Model2),
            3 => Ok(SimModel::Model3),
            _ => Err(PkbError::InvalidConfig(format!("simulation model must be 1, 2 or 3, got {id}"))),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            SimModel::Model1 => 1,
            SimModel::Model2 => 2,
            SimModel::Model3 => 3,
        }
    }

    /// Number of leading pathways the log odds depend on.
    pub fn relevant_count(self) -> usize {
        match self {
            SimModel::Model1 | SimModel::Model2 => 3,
            SimModel::Model3 => 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeRule {
    /// `y = +1` with probability `1/(1 + e^{−F})`.
    Bernoulli,
    /// `y = sign(F)`, zero mapped to +1.
    Sign,
}

impl FromStr for OutcomeRule {
    type Err = PkbError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(OutcomeRule::Bernoulli),
            "sign" => Ok(OutcomeRule::Sign),
            _ => Err(PkbError::InvalidConfig(format!("unknown outcome rule `{s}`"))),
        }
    }
}

impl fmt::Display for OutcomeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeRule::Bernoulli => "bernoulli",
            OutcomeRule::Sign => "sign",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub model: SimModel,
    /// Total number of pathways, relevant ones included.
    pub n_pathways: usize,
    pub pathway_size: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub outcome: OutcomeRule,
}

impl SimSpec {
    pub fn new(model: SimModel, n_pathways: usize, seed: u64) -> Self {
        SimSpec {
            model,
            n_pathways,
            pathway_size: 5,
            n_samples: 900,
            seed,
            outcome: OutcomeRule::Bernoulli,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PkbError::InvalidConfig(msg));
        if self.n_pathways < self.model.relevant_count() {
            return bad(format!(
                "model {} needs at least {} pathways, got {}",
                self.model.id(),
                self.model.relevant_count(),
                self.n_pathways
            ));
        }
        let min_size = if self.model == SimModel::Model3 { 1 } else { 2 };
        if self.pathway_size < min_size {
            return bad(format!("pathway size must be at least {min_size}"));
        }
        if self.n_samples < 2 {
            return bad("at least two samples are required".into());
        }
        Ok(())
    }
}

/// A generated dataset plus the 0-based indices of the relevant pathways.
#[derive(Debug, Clone)]
pub struct SimData {
    pub data: ExpressionDataset,
    pub pathways: PathwayCollection,
    pub labels: LabelVector,
    pub relevant: Vec<usize>,
    /// Median-centered log odds per sample.
    pub log_odds: Vec<f64>,
}

#[derive(Serialize)]
struct GroundTruth<'a> {
    model: u8,
    seed: u64,
    n_pathways: usize,
    pathway_size: usize,
    n_samples: usize,
    outcome_rule: String,
    relevant_pathways: Vec<&'a str>,
    relevant_indices: Vec<usize>,
}

impl SimData {
    /// Writes `expression.csv`, `pathways.gmt`, `labels.csv` and
    /// `ground_truth.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, spec: &SimSpec) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| PkbError::io(dir, e))?;
        self.data.write_csv(dir.join("expression.csv"))?;
        self.pathways.write_gmt(dir.join("pathways.gmt"), &self.data)?;
        self.labels.write_csv(dir.join("labels.csv"), self.data.sample_ids())?;
        let truth = GroundTruth {
            model: spec.model.id(),
            seed: spec.seed,
            n_pathways: spec.n_pathways,
            pathway_size: spec.pathway_size,
            n_samples: spec.n_samples,
            outcome_rule: spec.outcome.to_string(),
            relevant_pathways: self.relevant.iter().map(|&m| self.pathways.get(m).name.as_str()).collect(),
            relevant_indices: self.relevant.clone(),
        };
        let path = dir.join("ground_truth.json");
        std::fs::write(&path, serde_json::to_string_pretty(&truth)? + "\n").map_err(|e| PkbError::io(&path, e))
    }
}

/// True log odds for one sample; `x` holds the sample's genes in pathway
/// order, `pathway_size` per pathway.
pub fn true_log_odds(x: &[f64], model: SimModel, pathway_size: usize) -> f64 {
    let g = |m: usize, j: usize| x[m * pathway_size + j];
    match model {
        SimModel::Model1 => 2.0 * g(0, 0) + 3.0 * g(0, 1) + (0.8 * g(1, 0) + 0.8 * g(1, 1)).exp() + 4.0 * g(2, 0) * g(2, 1),
        SimModel::Model2 => {
            4.0 * (g(0, 0) + g(0, 1)).sin() + 3.0 * (g(1, 0) - g(1, 1)).abs() + 2.0 * g(2, 0).powi(2)
                - 2.0 * g(2, 1).powi(2)
        }
        SimModel::Model3 => {
            2.0 * (0..10)
                .map(|m| x[m * pathway_size..(m + 1) * pathway_size].iter().map(|v| v * v).sum::<f64>().sqrt())
                .sum::<f64>()
        }
    }
}

/// Median, averaging the two middle values for an even count.
pub fn median(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn generate(spec: &SimSpec) -> Result<SimData> {
    spec.validate()?;
    let n = spec.n_samples;
    let p = spec.n_pathways * spec.pathway_size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();

    let raw: Vec<f64> = values.chunks(p).map(|x| true_log_odds(x, spec.model, spec.pathway_size)).collect();
    let mid = median(&raw);
    let log_odds: Vec<f64> = raw.iter().map(|f| f - mid).collect();
    let labels: Vec<f64> = match spec.outcome {
        OutcomeRule::Sign => log_odds.iter().map(|&f| if f >= 0.0 { 1.0 } else { -1.0 }).collect(),
        OutcomeRule::Bernoulli => log_odds
            .iter()
            .map(|&f| {
                let prob = 1.0 / (1.0 + (-f).exp());
                if rng.random::<f64>() < prob {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect(),
    };

    let data = ExpressionDataset::new(
        values,
        (1..=n).map(|i| format!("s{i}")).collect(),
        (1..=p).map(|j| format!("g{j}")).collect(),
    )?;
    let pathways = PathwayCollection::new(
        (0..spec.n_pathways)
            .map(|m| Pathway {
                name: format!("pathway{}", m + 1),
                genes: (m * spec.pathway_size..(m + 1) * spec.pathway_size).collect(),
            })
            .collect(),
        p,
    )?;
    Ok(SimData {
        data,
        pathways,
        labels: LabelVector::new(labels)?,
        relevant: (0..spec.model.relevant_count()).collect(),
        log_odds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas_at_known_points() {
        let zero = vec![0.0; 50];
        assert_eq!(true_log_odds(&zero, SimModel::Model1, 5), 1.0);
        assert_eq!(true_log_odds(&zero, SimModel::Model2, 5), 0.0);
        let mut unit = vec![0.0; 60];
        for m in 0..10 {
            unit[m * 5] = 1.0;
        }
        assert_eq!(true_log_odds(&unit, SimModel::Model3, 5), 20.0);

        let mut x = vec![0.0; 15];
        x[0] = 1.0;
        x[1] = -1.0;
        x[5] = 0.5;
        x[6] = 0.25;
        x[10] = 2.0;
        x[11] = 1.5;
        let m1 = 2.0 - 3.0 + (0.8f64 * 0.75).exp() + 4.0 * 3.0;
        assert!((true_log_odds(&x, SimModel::Model1, 5) - m1).abs() < 1e-14);
        let m2 = 4.0 * 0f64.sin() + 3.0 * 0.25 + 2.0 * 4.0 - 2.0 * 2.25;
        assert!((true_log_odds(&x, SimModel::Model2, 5) - m2).abs() < 1e-14);
    }

    #[test]
    fn median_rule() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn sign_rule_splits_evenly() {
        let spec = SimSpec {
            outcome: OutcomeRule::Sign,
            n_samples: 100,
            ..SimSpec::new(SimModel::Model1, 10, 3)
        };
        let sim = generate(&spec).unwrap();
        assert_eq!(sim.labels.class_counts(), (50, 50));
        assert_eq!(median(&sim.log_odds), 0.0);
    }

    #[test]
    fn bernoulli_classes_are_roughly_balanced() {
        for seed in 0..20 {
            let spec = SimSpec::new(SimModel::Model1, 5, seed);
            let sim = generate(&spec).unwrap();
            let (pos, _) = sim.labels.class_counts();
            let frac = pos as f64 / 900.0;
            assert!((0.40..=0.60).contains(&frac), "seed {seed}: {frac}");
        }
    }

    #[test]
    fn layout_and_determinism() {
        let spec = SimSpec::new(SimModel::Model3, 12, 9);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.data.n_genes(), 60);
        assert_eq!(a.relevant, (0..10).collect::<Vec<_>>());
        let mut seen = vec![0; 60];
        for pw in a.pathways.iter() {
            assert_eq!(pw.genes.len(), 5);
            for &g in &pw.genes {
                seen[g] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        assert_ne!(generate(&SimSpec::new(SimModel::Model3, 12, 10)).unwrap().data, a.data);
    }

    #[test]
    fn invalid_specs() {
        assert!(SimModel::from_id(4).is_err());
        assert!(generate(&SimSpec::new(SimModel::Model3, 9, 0)).is_err());
        let small = SimSpec {
            pathway_size: 1,
            ..SimSpec::new(SimModel::Model1, 5, 0)
        };
        assert!(generate(&small).is_err());
    }
}
