//! Metric labels for one basin image: repeat-averaged FDim, Sb and Sbb and
//! a single Wada verdict.

use crate::grid::BasinGrid;
use crate::metrics::{
    repeat_metric, scale_budget, wada_test, EntropyConfig, Estimator, FDimConfig, MetricError,
    MetricResult, WadaConfig, WadaReport, DEFAULT_REPEATS,
};
use serde::{Deserialize, Serialize};

/// Sampling budgets for [`label_basin`]. The default is the full budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelBudgets {
    pub fdim: FDimConfig,
    pub entropy: EntropyConfig,
    pub wada: WadaConfig,
    pub repeats: usize,
}

impl Default for LabelBudgets {
    fn default() -> Self {
        LabelBudgets {
            fdim: FDimConfig::default(),
            entropy: EntropyConfig::default(),
            wada: WadaConfig::default(),
            repeats: DEFAULT_REPEATS,
        }
    }
}

impl LabelBudgets {
    /// Full budgets with every Monte Carlo box count multiplied by `scale`.
    /// Box sizes, the fattening radius and the repeat count are unchanged.
    pub fn scaled(scale: f64) -> Self {
        let d = Self::default();
        LabelBudgets {
            fdim: FDimConfig { boxes_per_size: scale_budget(d.fdim.boxes_per_size, scale), ..d.fdim },
            entropy: EntropyConfig { n_boxes: scale_budget(d.entropy.n_boxes, scale), ..d.entropy },
            ..d
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinLabels {
    pub fdim: Result<MetricResult, MetricError>,
    pub sb: Result<MetricResult, MetricError>,
    pub sbb: Result<MetricResult, MetricError>,
    pub wada: WadaReport,
}

/// Run the three scalar metrics `budgets.repeats` times each with seeds
/// `seed..seed + repeats`, and the Wada test once. A failing metric is
/// recorded in its field and does not affect the others.
pub fn label_basin(grid: &BasinGrid, budgets: &LabelBudgets, seed: u64) -> BasinLabels {
    let run = |est: Estimator| repeat_metric(&est, grid, budgets.repeats, seed);
    BasinLabels {
        fdim: run(Estimator::FractalDimension(budgets.fdim.clone())),
        sb: run(Estimator::BasinEntropy(budgets.entropy.clone())),
        sbb: run(Estimator::BoundaryBasinEntropy(budgets.entropy.clone())),
        wada: wada_test(grid, &budgets.wada),
    }
}
