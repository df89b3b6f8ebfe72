//! Link-conflict predicates.
//!
//! A [`ConflictModel`] decides whether two radio links are potential
//! interference links. Only the protocol model ships; the trait is the
//! extension point for other models.

use serde::{Deserialize, Serialize};

use crate::error::TopologyError;
use crate::topology::{RadioLink, WmnGraph};

/// Parameters of the protocol interference model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolModelParams {
    /// Guard-zone factor: a receiver tolerates interferers at distance
    /// `>= (1 + delta) * link length`.
    pub delta: f64,
    /// Effective communication range in meters.
    pub tx_range: f64,
}

impl ProtocolModelParams {
    pub fn new(delta: f64, tx_range: f64) -> Result<Self, TopologyError> {
        let p = Self { delta, tx_range };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), TopologyError> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(TopologyError::InvalidParameter(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        if !(self.tx_range > 0.0 && self.tx_range.is_finite()) {
            return Err(TopologyError::InvalidParameter(format!(
                "tx_range must be > 0, got {}",
                self.tx_range
            )));
        }
        Ok(())
    }
}

impl Default for ProtocolModelParams {
    fn default() -> Self {
        Self {
            delta: 1.0,
            tx_range: 250.0,
        }
    }
}

/// A symmetric, channel-independent link-conflict predicate.
pub trait ConflictModel: Sync {
    /// Whether `x` and `l` are potential interference links.
    fn conflicts(&self, g: &WmnGraph, x: &RadioLink, l: &RadioLink) -> Result<bool, TopologyError>;

    /// Upper bound on the node distance across which two links with no
    /// common node can still conflict. `None` disables spatial pruning.
    fn reach(&self, g: &WmnGraph) -> Option<f64>;
}

/// The protocol model generalized to bidirectional links.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProtocolModel {
    pub params: ProtocolModelParams,
}

impl ProtocolModel {
    pub fn new(params: ProtocolModelParams) -> Self {
        Self { params }
    }

    pub fn with_delta(delta: f64, tx_range: f64) -> Result<Self, TopologyError> {
        Ok(Self::new(ProtocolModelParams::new(delta, tx_range)?))
    }
}

impl ConflictModel for ProtocolModel {
    fn conflicts(&self, g: &WmnGraph, x: &RadioLink, l: &RadioLink) -> Result<bool, TopologyError> {
        links_conflict_protocol(g, x, l, &self.params)
    }

    fn reach(&self, g: &WmnGraph) -> Option<f64> {
        Some((1.0 + self.params.delta) * g.max_edge_length())
    }
}

/// Protocol-model conflict test between two radio links.
///
/// * a shared radio always conflicts;
/// * a shared node without a shared radio does not conflict here (radio
///   co-location is added by the enhanced builder, not by this predicate);
/// * otherwise the links conflict when some endpoint of one lies strictly
///   closer than `(1 + delta) * len` to some endpoint of the other, for the
///   length of either link. Equality is a successful reception.
pub fn links_conflict_protocol(
    g: &WmnGraph,
    x: &RadioLink,
    l: &RadioLink,
    p: &ProtocolModelParams,
) -> Result<bool, TopologyError> {
    for r in x.radios().into_iter().chain(l.radios()) {
        g.check_radio(r)?;
    }
    if x.shares_radio(l) {
        return Ok(true);
    }
    if x.shares_node(l) {
        return Ok(false);
    }
    let guard = 1.0 + p.delta;
    let threshold = guard * g.link_length(x).max(g.link_length(l));
    Ok(x.nodes()
        .iter()
        .any(|&u| l.nodes().iter().any(|&v| g.distance(u, v) < threshold)))
}
