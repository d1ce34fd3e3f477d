use super::{GateKind, NodeId, XagNetwork};

/// Linear transitive fan-in: the inputs and AND nodes whose parity equals a
/// node's value (up to a complement). Kept sorted by node index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LtfiSet(Vec<NodeId>);

impl LtfiSet {
    pub fn singleton(node: NodeId) -> Self {
        LtfiSet(vec![node])
    }

    /// Builds a set from arbitrary members; duplicates cancel pairwise.
    pub fn from_members(members: impl IntoIterator<Item = NodeId>) -> Self {
        let mut v: Vec<NodeId> = members.into_iter().collect();
        v.sort_unstable();
        let mut out: Vec<NodeId> = Vec::with_capacity(v.len());
        for m in v {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        LtfiSet(out)
    }

    pub fn members(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn first(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn is_subset(&self, other: &LtfiSet) -> bool {
        let mut it = other.0.iter();
        'outer: for m in &self.0 {
            for o in it.by_ref() {
                if o == m {
                    continue 'outer;
                }
                if o > m {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn symmetric_difference(&self, other: &LtfiSet) -> LtfiSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LtfiSet(out)
    }

    /// Members of `self` not in `other`, in ascending order.
    pub fn difference(&self, other: &LtfiSet) -> LtfiSet {
        LtfiSet(self.0.iter().copied().filter(|m| !other.contains(*m)).collect())
    }
}

/// Linear transitive fan-ins of every node, indexed by node index. The
/// constant node has the empty set.
pub fn ltfi_all(network: &XagNetwork) -> Vec<LtfiSet> {
    let mut sets = Vec::with_capacity(network.num_nodes() + 1);
    sets.push(LtfiSet::default());
    sets.extend(network.input_ids().map(LtfiSet::singleton));
    for (id, step) in network.step_ids() {
        let set = match step.kind {
            GateKind::And => LtfiSet::singleton(id),
            GateKind::Xor => sets[step.left.index()].symmetric_difference(&sets[step.right.index()]),
        };
        sets.push(set);
    }
    sets
}

pub fn ltfi(network: &XagNetwork, node: NodeId) -> LtfiSet {
    assert!(node.index() <= network.num_nodes(), "node out of range");
    ltfi_all(network).swap_remove(node.index())
}
