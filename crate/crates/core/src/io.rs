//! JSON interchange for problems and plans.

use serde::{Deserialize, Serialize};

use crate::error::{OtError, Result};
use crate::types::{CostMatrix, SimplexVector, TransportPlan};

/// `{"n": .., "cost": [row-major n²], "p": [..], "q": [..]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub cost: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ProblemFile {
    pub fn from_parts(cost: &CostMatrix, p: &SimplexVector, q: &SimplexVector) -> Self {
        Self {
            n: cost.n(),
            cost: cost.as_slice().to_vec(),
            p: p.as_slice().to_vec(),
            q: q.as_slice().to_vec(),
        }
    }

    /// Validates and splits into typed parts.
    pub fn into_parts(self) -> Result<(CostMatrix, SimplexVector, SimplexVector)> {
        for v in [&self.p, &self.q] {
            if v.len() != self.n {
                return Err(OtError::ShapeMismatch {
                    expected: self.n,
                    got: v.len(),
                });
            }
        }
        let cost = CostMatrix::new(self.n, self.cost)?;
        Ok((cost, SimplexVector::new(self.p)?, SimplexVector::new(self.q)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric data serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub n: usize,
    pub plan: Vec<f64>,
}

impl PlanFile {
    pub fn from_plan(x: &TransportPlan) -> Self {
        Self {
            n: x.rows(),
            plan: x.as_slice().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric data serializes")
    }
}
