//! Traversal-time cost model: a per-(controller, true-terrain) table in
//! seconds per meter, a per-scan cost, and the expected edge cost over the
//! semantic belief of the node being departed.

use crate::belief::{ClassId, ClassSet, SemanticBelief};
use crate::error::{Result, SbgError};
use crate::graph::{NodeId, Sbg};

pub const DEFAULT_UNSAFE_COST: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    /// `nav[controller][true_class]`, d_l rows by d_l+1 columns, seconds/m.
    nav: Vec<Vec<f64>>,
    /// Seconds charged per information-gathering action.
    ig_cost: f64,
    /// Penalty used for controller/terrain pairs marked unsafe.
    unsafe_cost: f64,
}

impl CostModel {
    pub fn new(nav: Vec<Vec<f64>>, ig_cost: f64, unsafe_cost: f64) -> Result<Self> {
        if nav.is_empty() {
            return Err(SbgError::invalid(
                "nav cost table must have at least one row",
            ));
        }
        let d = nav.len();
        for (m, row) in nav.iter().enumerate() {
            if row.len() != d + 1 {
                return Err(SbgError::invalid(format!(
                    "nav cost row {m} has {} columns, expected {} (named classes + unknown)",
                    row.len(),
                    d + 1
                )));
            }
            for (n, v) in row.iter().enumerate() {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(SbgError::invalid(format!(
                        "nav cost entry [{m}][{n}] must be positive and finite, got {v}"
                    )));
                }
            }
        }
        for (m, row) in nav.iter().enumerate() {
            if row.iter().any(|v| row[m] > *v) {
                return Err(SbgError::invalid(format!(
                    "controller {m} is slower on its own terrain than on a mismatched one"
                )));
            }
        }
        if !(ig_cost.is_finite() && ig_cost >= 0.0) {
            return Err(SbgError::invalid("ig_cost must be non-negative and finite"));
        }
        if !(unsafe_cost.is_finite() && unsafe_cost > 0.0) {
            return Err(SbgError::invalid("unsafe_cost must be positive and finite"));
        }
        Ok(CostModel {
            nav,
            ig_cost,
            unsafe_cost,
        })
    }

    /// Default table for the flat_ground/stair/rubble class set. Mismatched
    /// pairs are slow; pairs that would drop the robot are unsafe. The
    /// unknown column holds each controller's worst named-class entry.
    /// Values are defaults, not ground truth; scenarios may override them.
    pub fn default_three_class(ig_cost: f64) -> CostModel {
        let u = DEFAULT_UNSAFE_COST;
        CostModel::new(
            vec![
                // flat ctrl:   flat stair rubble unknown
                vec![1.0, u, u, u],
                // stair ctrl
                vec![2.0, 2.0, 6.0, 6.0],
                // rubble ctrl
                vec![3.0, u, 3.0, u],
            ],
            ig_cost,
            u,
        )
        .expect("default table is valid")
    }

    pub fn named_controllers(&self) -> usize {
        self.nav.len()
    }

    pub fn matches_class_set(&self, classes: &ClassSet) -> bool {
        self.nav.len() == classes.named_count()
    }

    pub fn nav_table(&self) -> &[Vec<f64>] {
        &self.nav
    }

    pub fn ig_cost(&self) -> f64 {
        self.ig_cost
    }

    pub fn unsafe_cost(&self) -> f64 {
        self.unsafe_cost
    }

    fn check_controller(&self, controller: ClassId) -> Result<()> {
        if controller.0 >= self.nav.len() {
            return Err(SbgError::invalid(format!(
                "no controller exists for class index {} (unknown or out of range)",
                controller.0
            )));
        }
        Ok(())
    }

    /// Expected traversal time of departing a node with `belief` over an edge
    /// of `length` meters using `controller`:
    /// `length * Σ_m belief[m] * nav[controller][m]`.
    pub fn expected_nav_cost(
        &self,
        belief: &SemanticBelief,
        controller: ClassId,
        length: f64,
    ) -> Result<f64> {
        self.check_controller(controller)?;
        if !(length > 0.0) {
            return Err(SbgError::invalid("edge length must be positive"));
        }
        if belief.len() != self.nav.len() + 1 {
            return Err(SbgError::invalid("belief length does not match cost table"));
        }
        let row = &self.nav[controller.0];
        let per_meter: f64 = belief.probs().iter().zip(row).map(|(p, c)| p * c).sum();
        Ok(length * per_meter)
    }

    /// Ground-truth traversal time: `length * nav[controller][true_class]`.
    pub fn true_nav_cost(
        &self,
        true_class: ClassId,
        controller: ClassId,
        length: f64,
    ) -> Result<f64> {
        self.check_controller(controller)?;
        if !(length > 0.0) {
            return Err(SbgError::invalid("edge length must be positive"));
        }
        if true_class.0 > self.nav.len() {
            return Err(SbgError::invalid("true class index out of range"));
        }
        Ok(length * self.nav[controller.0][true_class.0])
    }

    /// Cost of one information-gathering action. Constant per action; the
    /// node parameter is reserved for per-terrain scan times.
    pub fn ig_action_cost(&self, _sbg: &Sbg, _node: NodeId) -> f64 {
        self.ig_cost
    }
}
