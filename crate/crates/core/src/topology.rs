//! Camera network: which cameras a target can reach directly and how long the
//! trip takes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::CameraId;

/// Walking time between two cameras, in frames. Sampled times lie in
/// `[mean - spread, mean + spread]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub mean: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: CameraId,
    pub b: CameraId,
    pub transition: Transition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraTopology {
    cameras: BTreeSet<CameraId>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopologyViolation {
    SelfEdge(CameraId),
    UnknownCamera(CameraId),
    NonPositiveTransition { a: CameraId, b: CameraId, mean: f64 },
    /// The same unordered pair listed twice with different transition times.
    AsymmetricTransition { a: CameraId, b: CameraId },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SelfEdge(c) => write!(f, "self-edge at camera {c}"),
            Self::UnknownCamera(c) => write!(f, "edge references unknown camera {c}"),
            Self::NonPositiveTransition { a, b, mean } => {
                write!(f, "non-positive transition {mean} on edge {a}-{b}")
            }
            Self::AsymmetricTransition { a, b } => {
                write!(f, "asymmetric transition times on edge {a}-{b}")
            }
        }
    }
}

impl CameraTopology {
    /// Builds a topology without validating it; see [`CameraTopology::validate`].
    pub fn new(cameras: impl IntoIterator<Item = CameraId>, edges: Vec<Edge>) -> Self {
        Self {
            cameras: cameras.into_iter().collect(),
            edges,
        }
    }

    /// Cameras `1..=n` connected in a line.
    pub fn chain(n: u32, transition: Transition) -> Self {
        let edges = (1..n)
            .map(|a| Edge {
                a,
                b: a + 1,
                transition,
            })
            .collect();
        Self::new(1..=n, edges)
    }

    /// Cameras `1..=n` connected in a cycle.
    pub fn ring(n: u32, transition: Transition) -> Self {
        let mut topo = Self::chain(n, transition);
        if n > 2 {
            topo.edges.push(Edge {
                a: n,
                b: 1,
                transition,
            });
        }
        topo
    }

    /// Every camera pair connected.
    pub fn complete(cameras: impl IntoIterator<Item = CameraId>, transition: Transition) -> Self {
        let cameras: BTreeSet<CameraId> = cameras.into_iter().collect();
        let list: Vec<CameraId> = cameras.iter().copied().collect();
        let mut edges = Vec::new();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                edges.push(Edge { a, b, transition });
            }
        }
        Self { cameras, edges }
    }

    pub fn cameras(&self) -> &BTreeSet<CameraId> {
        &self.cameras
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, cam: CameraId) -> bool {
        self.cameras.contains(&cam)
    }

    /// All cameras sharing an edge with `cam`.
    pub fn neighbors(&self, cam: CameraId) -> Result<BTreeSet<CameraId>> {
        if !self.contains(cam) {
            return Err(Error::UnknownCamera(cam));
        }
        Ok(self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == cam {
                    Some(e.b)
                } else if e.b == cam {
                    Some(e.a)
                } else {
                    None
                }
            })
            .filter(|&c| c != cam)
            .collect())
    }

    pub fn are_neighbors(&self, a: CameraId, b: CameraId) -> bool {
        a != b
            && self
                .edges
                .iter()
                .any(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    pub fn transition(&self, a: CameraId, b: CameraId) -> Option<Transition> {
        self.edges
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
            .map(|e| e.transition)
    }

    /// Diagnostic pass; never fails, returns every violation found.
    pub fn validate(&self) -> std::result::Result<(), Vec<TopologyViolation>> {
        let mut violations = Vec::new();
        let mut seen: BTreeMap<(CameraId, CameraId), Transition> = BTreeMap::new();
        for e in &self.edges {
            if e.a == e.b {
                violations.push(TopologyViolation::SelfEdge(e.a));
            }
            for c in [e.a, e.b] {
                if !self.cameras.contains(&c) {
                    violations.push(TopologyViolation::UnknownCamera(c));
                }
            }
            if !(e.transition.mean > 0.0) {
                violations.push(TopologyViolation::NonPositiveTransition {
                    a: e.a,
                    b: e.b,
                    mean: e.transition.mean,
                });
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            if let Some(prev) = seen.insert(key, e.transition) {
                if prev != e.transition {
                    violations.push(TopologyViolation::AsymmetricTransition { a: key.0, b: key.1 });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Number of edges on the shortest path, `None` when disconnected.
    pub fn hop_distance(&self, from: CameraId, to: CameraId) -> Option<usize> {
        if !self.contains(from) || !self.contains(to) {
            return None;
        }
        let mut dist: BTreeMap<CameraId, usize> = BTreeMap::new();
        dist.insert(from, 0);
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            if c == to {
                return dist.get(&c).copied();
            }
            let d = dist[&c];
            for n in self.neighbors(c).ok()? {
                if let std::collections::btree_map::Entry::Vacant(v) = dist.entry(n) {
                    v.insert(d + 1);
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Sum of mean transition times along the fastest route between two
    /// distinct cameras.
    pub fn travel_time(&self, from: CameraId, to: CameraId) -> Option<f64> {
        if !self.contains(from) || !self.contains(to) {
            return None;
        }
        // Dijkstra over a handful of cameras; a linear scan is enough.
        let mut best: BTreeMap<CameraId, f64> = BTreeMap::new();
        let mut done: BTreeSet<CameraId> = BTreeSet::new();
        best.insert(from, 0.0);
        loop {
            let next = best
                .iter()
                .filter(|(c, _)| !done.contains(c))
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(&c, &d)| (c, d));
            let (c, d) = next?;
            if c == to {
                return Some(d);
            }
            done.insert(c);
            for e in &self.edges {
                let other = if e.a == c {
                    e.b
                } else if e.b == c {
                    e.a
                } else {
                    continue;
                };
                let cand = d + e.transition.mean;
                if best.get(&other).is_none_or(|&old| cand < old) {
                    best.insert(other, cand);
                }
            }
        }
    }

    /// Mean of all edge transition means.
    pub fn mean_transition(&self) -> Option<f64> {
        if self.edges.is_empty() {
            return None;
        }
        Some(self.edges.iter().map(|e| e.transition.mean).sum::<f64>() / self.edges.len() as f64)
    }
}
