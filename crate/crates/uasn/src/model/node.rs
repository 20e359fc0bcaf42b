//! Network nodes and deployments.

use crate::error::{Error, NodeId, Result};
use crate::geom::Point3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Sensor,
    Relay,
    SurfaceBuoy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Metres; z <= 0 underwater, the buoy floats at z = 0.
    pub position: Point3,
    /// Joules left in the battery.
    pub residual_energy: f64,
    /// Joules at full charge. Defaults to the residual when absent on disk.
    #[serde(default)]
    pub primary_energy: f64,
    /// Bit/s injected by this node; zero for relays and the buoy.
    pub generation_rate: f64,
}

/// Cylindrical surveillance volume: radius around the buoy, depth below it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Field {
    pub radius: f64,
    pub depth: f64,
}

impl Field {
    pub fn contains(&self, p: &Point3) -> bool {
        let slack = 1e-9;
        p.radial() <= self.radius + slack && p.z() <= slack && p.z() >= -self.depth - slack
    }
}

/// A validated set of nodes plus the geometry they live in.
///
/// Ids are dense and index directly into the node list. Id 0 is always the
/// surface buoy; sensors follow, relays are appended as they are deployed.
#[derive(Debug, Clone)]
pub struct Deployment {
    nodes: Vec<Node>,
    pub comm_range: f64,
    pub field: Field,
}

impl Deployment {
    pub fn new(nodes: Vec<Node>, comm_range: f64, field: Field) -> Result<Self> {
        if !(comm_range > 0.0) {
            return Err(Error::InvalidDeployment(format!(
                "comm_range must be positive, got {comm_range}"
            )));
        }
        if !(field.radius > 0.0) || !(field.depth > 0.0) {
            return Err(Error::InvalidDeployment(
                "field radius and depth must be positive".into(),
            ));
        }
        let mut buoys = 0usize;
        for (idx, node) in nodes.iter().enumerate() {
            if node.id != idx {
                return Err(Error::InvalidDeployment(format!(
                    "node ids must be dense and ordered; slot {idx} holds id {}",
                    node.id
                )));
            }
            if !node.position.is_finite() {
                return Err(Error::InvalidDeployment(format!(
                    "node {idx} has a non-finite position"
                )));
            }
            if !node.residual_energy.is_finite() || node.residual_energy < 0.0 {
                return Err(Error::InvalidDeployment(format!(
                    "node {idx} has residual energy {}",
                    node.residual_energy
                )));
            }
            if node.primary_energy < node.residual_energy {
                return Err(Error::InvalidDeployment(format!(
                    "node {idx} holds more residual ({}) than primary ({}) energy",
                    node.residual_energy, node.primary_energy
                )));
            }
            match node.kind {
                NodeKind::SurfaceBuoy => {
                    buoys += 1;
                    if node.id != 0 {
                        return Err(Error::InvalidDeployment(
                            "the surface buoy must have id 0".into(),
                        ));
                    }
                }
                NodeKind::Sensor => {
                    if !(node.generation_rate > 0.0) {
                        return Err(Error::InvalidDeployment(format!(
                            "sensor {idx} must generate traffic, got {}",
                            node.generation_rate
                        )));
                    }
                    if !field.contains(&node.position) {
                        return Err(Error::InvalidDeployment(format!(
                            "sensor {idx} lies outside the field"
                        )));
                    }
                }
                NodeKind::Relay => {
                    if node.generation_rate != 0.0 {
                        return Err(Error::InvalidDeployment(format!(
                            "relay {idx} must not generate traffic"
                        )));
                    }
                    if !field.contains(&node.position) {
                        return Err(Error::InvalidDeployment(format!(
                            "relay {idx} lies outside the field"
                        )));
                    }
                }
            }
        }
        if buoys != 1 {
            return Err(Error::InvalidDeployment(format!(
                "expected exactly one surface buoy, found {buoys}"
            )));
        }
        Ok(Deployment {
            nodes,
            comm_range,
            field,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn position(&self, id: NodeId) -> &Point3 {
        &self.nodes[id].position
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id].kind
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.nodes[a].position.distance(&self.nodes[b].position)
    }

    /// Ids of every energy-constrained node (sensors and relays).
    pub fn constrained_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind != NodeKind::SurfaceBuoy)
            .map(|n| n.id)
    }

    pub fn sensor_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Sensor)
            .map(|n| n.id)
    }

    pub fn relay_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Relay)
            .map(|n| n.id)
    }

    pub fn sensor_count(&self) -> usize {
        self.sensor_ids().count()
    }

    /// Overwrites one node's remaining battery, joules.
    pub fn set_residual_energy(&mut self, id: NodeId, energy: f64) -> Result<()> {
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::InvalidDeployment(format!(
                "residual energy must be positive and finite, got {energy}"
            )));
        }
        self.nodes[id].residual_energy = energy;
        Ok(())
    }

    /// Appends a relay at `position` with a fresh battery and returns its id.
    pub fn push_relay(&mut self, position: Point3, energy: f64) -> Result<NodeId> {
        if !position.is_finite() {
            return Err(Error::InvalidDeployment(
                "relay position must be finite".into(),
            ));
        }
        if !self.field.contains(&position) {
            return Err(Error::InvalidDeployment(
                "relay position lies outside the field".into(),
            ));
        }
        if !(energy > 0.0) {
            return Err(Error::InvalidDeployment(format!(
                "relay energy must be positive, got {energy}"
            )));
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            kind: NodeKind::Relay,
            position,
            residual_energy: energy,
            primary_energy: energy,
            generation_rate: 0.0,
        });
        Ok(id)
    }

    /// True when every sensor reaches the buoy through hops of at most
    /// `comm_range` metres, using sensors and the buoy as forwarders.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if seen[v] || self.nodes[v].kind == NodeKind::Relay {
                    continue;
                }
                if self.distance(u, v) <= self.comm_range {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        self.sensor_ids().all(|s| seen[s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> Field {
        Field {
            radius: 1000.0,
            depth: 2000.0,
        }
    }

    fn buoy() -> Node {
        Node {
            id: 0,
            kind: NodeKind::SurfaceBuoy,
            position: Point3::ORIGIN,
            residual_energy: 1.0,
            primary_energy: 1.0,
            generation_rate: 0.0,
        }
    }

    fn sensor(id: NodeId, z: f64) -> Node {
        Node {
            id,
            kind: NodeKind::Sensor,
            position: Point3::new(10.0 * id as f64, 0.0, z),
            residual_energy: 100.0,
            primary_energy: 100.0,
            generation_rate: 50.0,
        }
    }

    #[test]
    fn accepts_well_formed_deployment() {
        let d = Deployment::new(vec![buoy(), sensor(1, -100.0)], 500.0, field()).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.is_connected());
    }

    #[test]
    fn rejects_gapped_ids() {
        let mut s = sensor(1, -100.0);
        s.id = 2;
        assert!(Deployment::new(vec![buoy(), s], 500.0, field()).is_err());
    }

    #[test]
    fn rejects_sensor_outside_field() {
        let s = Node {
            position: Point3::new(0.0, 0.0, -2500.0),
            ..sensor(1, -100.0)
        };
        assert!(Deployment::new(vec![buoy(), s], 500.0, field()).is_err());
    }

    #[test]
    fn rejects_residual_above_primary() {
        let s = Node {
            residual_energy: 200.0,
            ..sensor(1, -100.0)
        };
        assert!(Deployment::new(vec![buoy(), s], 500.0, field()).is_err());
    }

    #[test]
    fn connectivity_needs_a_path() {
        let far = Node {
            position: Point3::new(0.0, 0.0, -1900.0),
            ..sensor(1, -1900.0)
        };
        let d = Deployment::new(vec![buoy(), far], 500.0, field()).unwrap();
        assert!(!d.is_connected());
    }

    #[test]
    fn relays_do_not_forward_for_connectivity() {
        let mut d = Deployment::new(vec![buoy(), sensor(1, -400.0)], 500.0, field()).unwrap();
        // A sensor at -950 m is only reachable through the relay, which does
        // not count as a forwarder until flows are rerouted through it.
        d.push_relay(Point3::new(10.0, 0.0, -650.0), 100.0).unwrap();
        assert!(d.is_connected());
        let far = Node {
            id: 3,
            position: Point3::new(10.0, 0.0, -950.0),
            ..sensor(3, -950.0)
        };
        let mut nodes = d.nodes().to_vec();
        nodes.push(far);
        let d2 = Deployment::new(nodes, 500.0, field()).unwrap();
        assert!(!d2.is_connected());
    }
}
