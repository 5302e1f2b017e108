// Copyright contributors to the qadapt project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! TOML configuration for the cost model and the search.
//!
//! ```toml
//! [cost]
//! model = "experimental"
//! base_factor = 1e-4
//! calibrated_angle = 0.5
//! angle_floor = 0.25
//!
//! [search]
//! cost_limit_factor = 1.1
//! threshold = 1e-8
//! max_nodes = 1000000   # 0 searches exhaustively
//! child_order = "textual"
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cost::{cost_model, CostModel, CostParams};
use crate::error::{Error, Result};
use crate::search::{ChildOrder, CostLimit, SearchConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSection {
    pub model: String,
    pub base_factor: f64,
    pub calibrated_angle: f64,
    pub angle_floor: f64,
}

impl Default for CostSection {
    fn default() -> Self {
        let p = CostParams::default();
        Self {
            model: "experimental".into(),
            base_factor: p.base_factor,
            calibrated_angle: p.calibrated_angle,
            angle_floor: p.angle_floor,
        }
    }
}

impl CostSection {
    pub fn params(&self) -> CostParams {
        CostParams {
            base_factor: self.base_factor,
            calibrated_angle: self.calibrated_angle,
            angle_floor: self.angle_floor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub cost_limit_factor: f64,
    /// Replaces the QR-relative limit when set.
    pub absolute_limit: Option<f64>,
    pub threshold: f64,
    pub diag_tol: f64,
    pub max_nodes: u64,
    pub return_first: bool,
    pub child_order: ChildOrder,
    pub max_depth: Option<usize>,
    pub rollouts: bool,
}

impl Default for SearchSection {
    fn default() -> Self {
        let d = SearchConfig::default();
        Self {
            cost_limit_factor: 1.1,
            absolute_limit: None,
            threshold: d.threshold,
            diag_tol: d.diag_tol,
            max_nodes: d.max_nodes.unwrap_or(0),
            return_first: d.return_first,
            child_order: d.child_order,
            max_depth: d.max_depth,
            rollouts: d.rollouts,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub cost: CostSection,
    pub search: SearchSection,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.cost_model()?;
        cfg.search_config().validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn cost_model(&self) -> Result<Arc<dyn CostModel>> {
        cost_model(&self.cost.model, self.cost.params())
    }

    pub fn search_config(&self) -> SearchConfig {
        let s = &self.search;
        SearchConfig {
            cost_limit: match s.absolute_limit {
                Some(l) => CostLimit::Absolute(l),
                None => CostLimit::QrFactor(s.cost_limit_factor),
            },
            threshold: s.threshold,
            diag_tol: s.diag_tol,
            max_nodes: (s.max_nodes > 0).then_some(s.max_nodes),
            return_first: s.return_first,
            child_order: s.child_order,
            max_depth: s.max_depth,
            rollouts: s.rollouts,
            record_time: false,
        }
    }
}
