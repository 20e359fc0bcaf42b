//! Link-rate matrix and its feasibility checks.
//!
//! `R[i][j]` is the bit/s that node `i` transmits directly to node `j`.
//! The routing layer only ever writes integer-valued rates, so balance
//! checks hold exactly in f64; the validator still allows an absolute
//! tolerance to stay honest about arithmetic on derived arrays.

use crate::error::{Error, NodeId, Result};
use crate::model::energy::EnergyModel;
use crate::model::node::{Deployment, NodeKind};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct RateArray {
    n: usize,
    data: Vec<f64>,
}

impl RateArray {
    pub fn zeros(n: usize) -> Self {
        RateArray {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidRateArray(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        let arr = RateArray { n, data };
        arr.check_structure()?;
        Ok(arr)
    }

    fn check_structure(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidRateArray(format!(
                        "entry ({i}, {j}) is {v}; rates must be finite and non-negative"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidRateArray(format!(
                        "diagonal entry ({i}, {i}) must be zero, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: NodeId, j: NodeId, v: f64) {
        debug_assert!(i != j || v == 0.0, "no self loops");
        debug_assert!(v >= 0.0 && v.is_finite());
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: NodeId, j: NodeId, dv: f64) {
        debug_assert!(i != j);
        self.data[i * self.n + j] += dv;
    }

    /// Total bit/s transmitted by `i`.
    pub fn outgoing(&self, i: NodeId) -> f64 {
        self.data[i * self.n..(i + 1) * self.n].iter().sum()
    }

    /// Total bit/s received by `i` from any node.
    pub fn incoming(&self, i: NodeId) -> f64 {
        (0..self.n).map(|k| self.get(k, i)).sum()
    }

    pub fn out_neighbors(&self, i: NodeId) -> Vec<NodeId> {
        (0..self.n).filter(|&j| self.get(i, j) > 0.0).collect()
    }

    pub fn in_neighbors(&self, i: NodeId) -> Vec<NodeId> {
        (0..self.n).filter(|&k| self.get(k, i) > 0.0).collect()
    }

    /// Same rates in a matrix with `extra` additional zero rows/columns.
    pub fn expanded(&self, extra: usize) -> RateArray {
        let m = self.n + extra;
        let mut out = RateArray::zeros(m);
        for i in 0..self.n {
            let src = &self.data[i * self.n..(i + 1) * self.n];
            out.data[i * m..i * m + self.n].copy_from_slice(src);
        }
        out
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Sensor outflow must equal inflow plus its own generation.
    SensorBalance,
    /// Relay outflow must equal inflow.
    RelayBalance,
    /// Outflow may not exceed link capacity.
    Capacity,
    /// Positive rate over a link longer than comm range.
    Range { dst: NodeId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateViolation {
    pub node: NodeId,
    pub kind: ConstraintKind,
    /// How far past the constraint the node sits (bit/s, or metres for range).
    pub excess: f64,
}

impl fmt::Display for RateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConstraintKind::SensorBalance => write!(
                f,
                "sensor {} violates flow balance by {} bit/s",
                self.node, self.excess
            ),
            ConstraintKind::RelayBalance => write!(
                f,
                "relay {} violates flow balance by {} bit/s",
                self.node, self.excess
            ),
            ConstraintKind::Capacity => write!(
                f,
                "node {} exceeds link capacity by {} bit/s",
                self.node, self.excess
            ),
            ConstraintKind::Range { dst } => write!(
                f,
                "link {} -> {} overshoots comm range by {} m",
                self.node, dst, self.excess
            ),
        }
    }
}

/// Checks balance, capacity and range for every constrained node. An empty
/// result means the array is a feasible routing for this deployment.
pub fn validate_rate_array(
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
    balance_tol: f64,
) -> Result<Vec<RateViolation>> {
    if rate.len() != deployment.len() {
        return Err(Error::InvalidRateArray(format!(
            "rate array is {}x{} but the deployment has {} nodes",
            rate.len(),
            rate.len(),
            deployment.len()
        )));
    }
    let mut out = Vec::new();
    let cap = model.link_capacity();
    for i in 0..rate.len() {
        let kind = deployment.kind(i);
        let outgoing = rate.outgoing(i);
        let incoming = rate.incoming(i);
        match kind {
            NodeKind::Sensor => {
                let gap = (outgoing - incoming - deployment.node(i).generation_rate).abs();
                if gap > balance_tol {
                    out.push(RateViolation {
                        node: i,
                        kind: ConstraintKind::SensorBalance,
                        excess: gap,
                    });
                }
            }
            NodeKind::Relay => {
                let gap = (outgoing - incoming).abs();
                if gap > balance_tol {
                    out.push(RateViolation {
                        node: i,
                        kind: ConstraintKind::RelayBalance,
                        excess: gap,
                    });
                }
            }
            NodeKind::SurfaceBuoy => {}
        }
        if kind != NodeKind::SurfaceBuoy && outgoing > cap + balance_tol {
            out.push(RateViolation {
                node: i,
                kind: ConstraintKind::Capacity,
                excess: outgoing - cap,
            });
        }
        for j in 0..rate.len() {
            if rate.get(i, j) > 0.0 {
                let d = deployment.distance(i, j);
                if d > deployment.comm_range + 1e-6 {
                    out.push(RateViolation {
                        node: i,
                        kind: ConstraintKind::Range { dst: j },
                        excess: d - deployment.comm_range,
                    });
                }
            }
        }
    }
    Ok(out)
}
