//! Link-graph heuristic that derives k and the initial centroid groups.
//!
//! Every page keeps a reach list (its undirected in-result neighborhood to
//! begin with). Rounds of expansion let each page absorb the reach list of
//! its most promising member, the member whose own list is largest, until a
//! full round changes nothing. Pages whose lists touch are then merged into
//! groups; each group of two or more pages becomes one seed centroid.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{DocId, LinkAdjacency};
use crate::sparse::SparseVector;

/// Per-page search state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentState {
    pub page: DocId,
    pub promising: DocId,
    pub reach_list: BTreeSet<DocId>,
}

/// Output of the heuristic phase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedGroups {
    pub k: usize,
    /// Disjoint, each sorted ascending with at least two members, ordered by
    /// smallest member.
    pub groups: Vec<Vec<DocId>>,
    pub unseeded: Vec<DocId>,
}

impl SeedGroups {
    pub fn seeded_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Move the given groups to `unseeded`, keeping both lists ordered.
    fn dissolve(&mut self, drop: &[usize]) {
        if drop.is_empty() {
            return;
        }
        let mut kept = Vec::with_capacity(self.groups.len());
        for (i, g) in std::mem::take(&mut self.groups).into_iter().enumerate() {
            if drop.contains(&i) {
                self.unseeded.extend(g);
            } else {
                kept.push(g);
            }
        }
        self.groups = kept;
        self.unseeded.sort_unstable();
        self.k = self.groups.len();
    }
}

/// Reach list = undirected neighborhood; promising page = self.
pub fn init_agents(adj: &LinkAdjacency) -> Vec<AgentState> {
    adj.undirected_neighbors()
        .into_iter()
        .enumerate()
        .map(|(page, reach_list)| AgentState {
            page,
            promising: page,
            reach_list,
        })
        .collect()
}

/// Member of the agent's reach list with the largest reach list, lowest id
/// on ties; the page itself when the list is empty.
pub fn select_promising(agent: &AgentState, agents: &[AgentState]) -> DocId {
    best_by_list_size(agent.reach_list.iter().copied(), agents).unwrap_or(agent.page)
}

fn best_by_list_size(candidates: impl Iterator<Item = DocId>, agents: &[AgentState]) -> Option<DocId> {
    // Candidates arrive ascending, so strict `>` keeps the lowest id on ties.
    let mut best: Option<(DocId, usize)> = None;
    for j in candidates {
        let size = agents[j].reach_list.len();
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((j, size));
        }
    }
    best.map(|(j, _)| j)
}

/// Promising page used during expansion: the largest-list member among
/// those that still contribute unseen pages, falling back to
/// [`select_promising`] once none do.
///
/// Without the filter a page can stall on a big neighbor whose list it
/// already holds while a smaller neighbor still reaches further.
fn select_expanding(i: usize, agents: &[AgentState]) -> DocId {
    let me = &agents[i];
    let contributes = me.reach_list.iter().copied().filter(|&j| {
        agents[j]
            .reach_list
            .iter()
            .any(|&x| x != i && !me.reach_list.contains(&x))
    });
    best_by_list_size(contributes, agents).unwrap_or_else(|| select_promising(me, agents))
}

/// Summary of an expansion run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expansion {
    /// Rounds that changed at least one list.
    pub rounds: usize,
}

/// Expand reach lists until a full round changes nothing. Returns the final
/// states and the number of rounds that changed something.
///
/// Updates happen in place within a round, in doc_id order. At the fixpoint
/// each non-empty reach list is the page's connected component minus itself.
pub fn expand_to_fixpoint(mut agents: Vec<AgentState>) -> (Vec<AgentState>, Expansion) {
    let mut rounds = 0;
    loop {
        let mut changed = false;
        for i in 0..agents.len() {
            if agents[i].reach_list.is_empty() {
                continue;
            }
            let p = select_expanding(i, &agents);
            agents[i].promising = p;
            if p == i {
                continue;
            }
            let additions: Vec<DocId> = agents[p]
                .reach_list
                .iter()
                .copied()
                .filter(|&x| x != i && !agents[i].reach_list.contains(&x))
                .collect();
            if !additions.is_empty() {
                agents[i].reach_list.extend(additions);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
    }
    (agents, Expansion { rounds })
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Merge pages whose reach lists share an element or contain each other,
/// starting from singletons. Groups of two or more become seeds.
pub fn merge_groups(agents: &[AgentState]) -> SeedGroups {
    let n = agents.len();
    let mut ds = DisjointSet::new(n);
    // Uniting each page with every member of its list covers both merge
    // conditions: pages whose lists share x both end up in x's group.
    for a in agents {
        for &x in &a.reach_list {
            ds.union(a.page, x);
        }
    }

    let mut members: Vec<Vec<DocId>> = vec![Vec::new(); n];
    for page in 0..n {
        let r = ds.find(page);
        members[r].push(page);
    }
    let mut groups: Vec<Vec<DocId>> = Vec::new();
    let mut unseeded = Vec::new();
    for m in members.into_iter().filter(|m| !m.is_empty()) {
        if m.len() >= 2 {
            groups.push(m);
        } else {
            unseeded.push(m[0]);
        }
    }
    groups.sort_by_key(|g| g[0]);
    unseeded.sort_unstable();
    SeedGroups {
        k: groups.len(),
        groups,
        unseeded,
    }
}

/// Run the whole heuristic phase on a link graph.
pub fn seed_groups(adj: &LinkAdjacency) -> SeedGroups {
    let (agents, _) = expand_to_fixpoint(init_agents(adj));
    merge_groups(&agents)
}

/// One unit centroid per group: the normalized sum of its non-empty member
/// vectors. Groups whose members are all empty are dissolved into
/// `unseeded` (the returned groups reflect that).
pub fn build_seed_centroids(groups: &SeedGroups, vectors: &[SparseVector]) -> (SeedGroups, Vec<SparseVector>) {
    let mut out = groups.clone();
    let mut centroids = Vec::with_capacity(groups.groups.len());
    let mut dissolved = Vec::new();
    for (gi, g) in groups.groups.iter().enumerate() {
        let sum = SparseVector::sum(g.iter().map(|&d| &vectors[d]).filter(|v| !v.is_empty()));
        if sum.is_empty() {
            dissolved.push(gi);
        } else {
            centroids.push(sum.l2_normalized());
        }
    }
    out.dissolve(&dissolved);
    (out, centroids)
}
