//! Union-find over candidate pairs with smallest-id retention.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DupCluster {
    /// Sorted.
    pub members: Vec<String>,
    /// Lexicographically smallest member.
    pub retained: String,
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Links the larger root under the smaller, so every root is the
    /// smallest index of its set.
    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Connected components of the pair graph over `ids`, restricted to
/// components of two or more members, sorted by retained id.
pub fn resolve_clusters(ids: &[&str], pairs: &[(u32, u32)]) -> Vec<DupCluster> {
    let mut uf = UnionFind::new(ids.len());
    for &(a, b) in pairs {
        uf.union(a, b);
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<String>> = Default::default();
    let mut touched: Vec<u32> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    touched.sort_unstable();
    touched.dedup();
    for x in touched {
        let r = uf.find(x);
        groups.entry(r).or_default().push(ids[x as usize].to_string());
    }
    let mut clusters: Vec<DupCluster> = groups
        .into_values()
        .filter(|m| m.len() > 1)
        .map(|mut members| {
            members.sort();
            members.dedup();
            DupCluster { retained: members[0].clone(), members }
        })
        .filter(|c| c.members.len() > 1)
        .collect();
    clusters.sort_by(|a, b| a.retained.cmp(&b.retained));
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transitive_cluster() {
        let ids = ["b", "a", "c", "d"];
        let c = resolve_clusters(&ids, &[(0, 1), (0, 2)]);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].members, vec!["a", "b", "c"]);
        assert_eq!(c[0].retained, "a");
        assert!(resolve_clusters(&ids, &[]).is_empty());
    }

    proptest! {
        #[test]
        fn order_independent(pairs in prop::collection::vec((0u32..40, 0u32..40), 0..60), seed in any::<u64>()) {
            let names: Vec<String> = (0..40).map(|i| format!("d{:03}", (i * 17) % 40)).collect();
            let ids: Vec<&str> = names.iter().map(String::as_str).collect();
            let mut shuffled = pairs.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = crate::hashing::fmix64(s.wrapping_add(i as u64));
                shuffled.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let flipped: Vec<(u32, u32)> = shuffled.iter().map(|&(a, b)| (b, a)).collect();
            prop_assert_eq!(resolve_clusters(&ids, &pairs), resolve_clusters(&ids, &flipped));
        }
    }
}
