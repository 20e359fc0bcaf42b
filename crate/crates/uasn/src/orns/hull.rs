//! Candidate region for a relay: the convex hull of the bottleneck node and
//! its upper neighbors.
//!
//! Any point of the hull is written in barycentric form x(w) = sum w_k a_k
//! with w on the unit simplex. The anchor order is fixed as the upper
//! neighbors ascending by id followed by the bottleneck node itself, so the
//! last coordinate always belongs to the node being relieved.

use crate::error::NodeId;
use crate::geom::Point3;
use crate::model::Deployment;

#[derive(Debug, Clone)]
pub struct Hull {
    anchor_ids: Vec<NodeId>,
    anchors: Vec<Point3>,
}

impl Hull {
    /// `neighbors` must be sorted ascending; the bottleneck `c` goes last.
    pub fn new(c: NodeId, neighbors: &[NodeId], deployment: &Deployment) -> Self {
        debug_assert!(neighbors.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(!neighbors.contains(&c));
        let mut anchor_ids = neighbors.to_vec();
        anchor_ids.push(c);
        let anchors = anchor_ids
            .iter()
            .map(|&id| *deployment.position(id))
            .collect();
        Hull {
            anchor_ids,
            anchors,
        }
    }

    /// Number of anchors; barycentric vectors have this length.
    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn anchor_ids(&self) -> &[NodeId] {
        &self.anchor_ids
    }

    pub fn anchors(&self) -> &[Point3] {
        &self.anchors
    }

    /// Index of the bottleneck anchor (always the last slot).
    pub fn bottleneck_index(&self) -> usize {
        self.anchors.len() - 1
    }

    pub fn bottleneck_position(&self) -> &Point3 {
        &self.anchors[self.bottleneck_index()]
    }

    pub fn position(&self, weights: &[f64]) -> Point3 {
        Point3::combine(&self.anchors, weights)
    }

    /// Distances from x(w) to every anchor, in anchor order.
    pub fn anchor_distances(&self, weights: &[f64]) -> Vec<f64> {
        let x = self.position(weights);
        self.anchors.iter().map(|a| x.distance(a)).collect()
    }

    /// Largest distance between the bottleneck anchor and any other anchor.
    /// Bounds the distance from any hull point to the bottleneck node.
    pub fn spread(&self) -> f64 {
        let c = self.bottleneck_position();
        self.anchors
            .iter()
            .map(|a| a.distance(c))
            .fold(0.0, f64::max)
    }

    pub fn on_simplex(weights: &[f64], tol: f64) -> bool {
        if weights.is_empty() {
            return false;
        }
        let sum: f64 = weights.iter().sum();
        (sum - 1.0).abs() <= tol && weights.iter().all(|&w| w >= -tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Field, Node, NodeKind};

    fn deployment() -> Deployment {
        let mk = |id, kind, x: f64, z: f64, g: f64| Node {
            id,
            kind,
            position: Point3::new(x, 0.0, z),
            residual_energy: 1.0e5,
            primary_energy: 1.0e5,
            generation_rate: g,
        };
        Deployment::new(
            vec![
                mk(0, NodeKind::SurfaceBuoy, 0.0, 0.0, 0.0),
                mk(1, NodeKind::Sensor, 0.0, -200.0, 50.0),
                mk(2, NodeKind::Sensor, 100.0, -300.0, 50.0),
                mk(3, NodeKind::Sensor, -100.0, -400.0, 50.0),
            ],
            500.0,
            Field {
                radius: 1000.0,
                depth: 2000.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn bottleneck_sits_last() {
        let h = Hull::new(3, &[1, 2], &deployment());
        assert_eq!(h.anchor_ids(), &[1, 2, 3]);
        assert_eq!(h.bottleneck_index(), 2);
        assert_eq!(h.bottleneck_position(), &Point3::new(-100.0, 0.0, -400.0));
    }

    #[test]
    fn corner_weights_recover_anchors() {
        let h = Hull::new(3, &[1, 2], &deployment());
        assert_eq!(h.position(&[1.0, 0.0, 0.0]), Point3::new(0.0, 0.0, -200.0));
        assert_eq!(h.position(&[0.0, 0.0, 1.0]), *h.bottleneck_position());
    }

    #[test]
    fn interior_point_is_within_spread_of_bottleneck() {
        let h = Hull::new(3, &[1, 2], &deployment());
        let w = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        let x = h.position(&w);
        assert!(x.distance(h.bottleneck_position()) <= h.spread() + 1e-12);
    }

    #[test]
    fn simplex_membership() {
        assert!(Hull::on_simplex(&[0.5, 0.5], 1e-9));
        assert!(!Hull::on_simplex(&[0.6, 0.6], 1e-9));
        assert!(!Hull::on_simplex(&[1.2, -0.2], 1e-9));
        assert!(!Hull::on_simplex(&[], 1e-9));
    }
}
