use alloc::vec;
use alloc::vec::Vec;

use crate::graph::NodeId;

/// Dense membership bitmap plus the insertion-ordered member list.
#[derive(Debug, Clone, Default)]
pub struct NodeSet {
    mark: Vec<bool>,
    members: Vec<NodeId>,
}

impl NodeSet {
    pub fn new(n: usize) -> Self {
        NodeSet {
            mark: vec![false; n],
            members: Vec::new(),
        }
    }

    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(n: usize, nodes: I) -> Self {
        let mut set = NodeSet::new(n);
        for v in nodes {
            set.insert(v);
        }
        set
    }

    pub fn full(n: usize) -> Self {
        NodeSet::from_nodes(n, (0..n).map(NodeId::from))
    }

    /// Capacity, i.e. the node count of the graph the set belongs to.
    pub fn universe(&self) -> usize {
        self.mark.len()
    }

    /// Returns `true` if `v` was not present.
    #[inline]
    pub fn insert(&mut self, v: NodeId) -> bool {
        let slot = &mut self.mark[v.index()];
        if *slot {
            false
        } else {
            *slot = true;
            self.members.push(v);
            true
        }
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.mark.get(v.index()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().copied()
    }

    /// Members in insertion order.
    pub fn as_slice(&self) -> &[NodeId] {
        &self.members
    }

    pub fn to_sorted_vec(&self) -> Vec<NodeId> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }

    pub fn extend_from(&mut self, other: &NodeSet) {
        for v in other.iter() {
            self.insert(v);
        }
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Number of members not in `other`.
    pub fn count_outside(&self, other: &NodeSet) -> usize {
        self.iter().filter(|&v| !other.contains(v)).count()
    }

    pub fn clear(&mut self) {
        for v in self.members.drain(..) {
            self.mark[v.index()] = false;
        }
    }
}

impl PartialEq for NodeSet {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }
}

impl Eq for NodeSet {}
