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

//! Experimental cost of rotations and of the routing needed to enable them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Gate, GateSequence};
use crate::graph::{EnergyCouplingGraph, RoutingPlan};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostParams {
    /// Cost scale of a π rotation.
    pub base_factor: f64,
    /// Angle each coupling is calibrated for, in units of π.
    pub calibrated_angle: f64,
    /// Lower end of the fitted angle range, in units of π. The same
    /// formula is used below it.
    pub angle_floor: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            base_factor: 1e-4,
            calibrated_angle: 0.5,
            angle_floor: 0.25,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("base_factor", self.base_factor),
            ("calibrated_angle", self.calibrated_angle),
            ("angle_floor", self.angle_floor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "cost.{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Cost of physical rotations. Virtual Z gates are always free.
pub trait CostModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Cost of a rotation by `theta` radians between states `distance`
    /// edges apart.
    fn rotation_cost(&self, theta: f64, distance: usize) -> f64;

    fn pulse_cost(&self) -> f64 {
        self.rotation_cost(PI, 1)
    }
}

/// `base · d · (4t + |mod(t + c/2, c) − c/2|)` with `t = |θ|/π` and `c` the
/// calibrated angle: linear in the angle plus a penalty that grows with the
/// distance from the nearest calibrated multiple.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExperimentalCost {
    pub params: CostParams,
}

impl ExperimentalCost {
    pub fn new(params: CostParams) -> Self {
        Self { params }
    }

    /// Calibration penalty for an angle `t` in units of π.
    pub fn calibration_term(&self, t: f64) -> f64 {
        let half = self.params.calibrated_angle / 2.0;
        ((t + half).rem_euclid(self.params.calibrated_angle) - half).abs()
    }

    /// Whether `theta` lies in the range the formula was fitted on.
    pub fn in_fitted_range(&self, theta: f64) -> bool {
        theta.abs() / PI >= self.params.angle_floor
    }
}

impl CostModel for ExperimentalCost {
    fn name(&self) -> &'static str {
        "experimental"
    }

    fn rotation_cost(&self, theta: f64, distance: usize) -> f64 {
        let t = theta.abs() / PI;
        self.params.base_factor * distance as f64 * (4.0 * t + self.calibration_term(t))
    }
}

/// Every rotation costs `base · d` regardless of angle.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GateCountCost {
    pub params: CostParams,
}

impl CostModel for GateCountCost {
    fn name(&self) -> &'static str {
        "gate_count"
    }

    fn rotation_cost(&self, theta: f64, distance: usize) -> f64 {
        if theta == 0.0 {
            0.0
        } else {
            self.params.base_factor * distance as f64
        }
    }
}

/// Looks up a cost model by its configuration name.
pub fn cost_model(name: &str, params: CostParams) -> Result<Arc<dyn CostModel>> {
    params.validate()?;
    match name {
        "experimental" => Ok(Arc::new(ExperimentalCost::new(params))),
        "gate_count" => Ok(Arc::new(GateCountCost { params })),
        other => Err(Error::Config(format!("unknown cost model `{other}`"))),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub rotation: f64,
    pub routing: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.rotation + self.routing
    }
}

impl std::ops::Add for CostBreakdown {
    type Output = CostBreakdown;

    fn add(self, rhs: CostBreakdown) -> CostBreakdown {
        CostBreakdown {
            rotation: self.rotation + rhs.rotation,
            routing: self.routing + rhs.routing,
        }
    }
}

impl std::ops::AddAssign for CostBreakdown {
    fn add_assign(&mut self, rhs: CostBreakdown) {
        *self = *self + rhs;
    }
}

/// Cost of rotating states `i` and `j` by `theta` on `graph`, including the
/// pulses that first bring `j` next to `i`. The routing plan is returned
/// alongside so callers can continue from the routed graph.
pub fn gate_cost(
    model: &dyn CostModel,
    graph: &EnergyCouplingGraph,
    i: usize,
    j: usize,
    theta: f64,
) -> Result<(CostBreakdown, RoutingPlan)> {
    let plan = graph.plan_routing(i, j)?;
    let routing = plan
        .pulses
        .iter()
        .map(|p| model.rotation_cost(p.theta, 1))
        .sum();
    let cost = CostBreakdown {
        rotation: model.rotation_cost(theta, 1),
        routing,
    };
    Ok((cost, plan))
}

/// Same cost as [`gate_cost`] without building the routing plan.
pub fn gate_cost_estimate(
    model: &dyn CostModel,
    graph: &EnergyCouplingGraph,
    i: usize,
    j: usize,
    theta: f64,
) -> Result<CostBreakdown> {
    let pulses = graph.distance(i, j)?.saturating_sub(1);
    Ok(CostBreakdown {
        rotation: model.rotation_cost(theta, 1),
        routing: pulses as f64 * model.pulse_cost(),
    })
}

/// Cost of an already physical sequence: pulses count as routing, virtual Z
/// gates are free.
pub fn sequence_cost(model: &dyn CostModel, seq: &GateSequence) -> CostBreakdown {
    let mut cost = CostBreakdown::default();
    for gate in seq {
        match gate {
            Gate::Rotation(r) => cost.rotation += model.rotation_cost(r.theta, 1),
            Gate::Pulse(p) => cost.routing += model.rotation_cost(p.theta, 1),
            Gate::VirtualZ(_) => {}
        }
    }
    cost
}
