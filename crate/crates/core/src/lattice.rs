//! Temporal/rhetorical relation type hierarchy.
//!
//! The hierarchy is read from an edge list (`child parent` per line). The
//! root is the most general relation (`any_rel`), its direct children are
//! the four core temporal relations, and rhetorical relations refine those.
//! An explicit bottom node makes meet total; callers see a bottom meet as
//! [`Inconsistent`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::CoreRelation;

pub const TOP_NAME: &str = "any_rel";
pub const BOTTOM_NAME: &str = "bottom";

/// Handle to a node of a [`RelationLattice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationNode(u16);

impl RelationNode {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Two relation nodes with no common subtype.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent {
    pub left: RelationNode,
    pub right: RelationNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationLattice {
    names: Vec<String>,
    by_name: HashMap<String, RelationNode>,
    /// `leq[a][b]` iff a is a subtype of (or equal to) b.
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<RelationNode>>,
    join: Vec<Vec<RelationNode>>,
    top: RelationNode,
    core: [RelationNode; 4],
    projection: Vec<Option<CoreRelation>>,
}

const BOTTOM: RelationNode = RelationNode(0);

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl RelationLattice {
    /// Parses an edge list and checks that it forms a lattice whose top has
    /// exactly the four core relations as children.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names = vec![BOTTOM_NAME.to_string()];
        let mut by_name = HashMap::new();
        by_name.insert(BOTTOM_NAME.to_string(), BOTTOM);
        let mut edges = Vec::new();

        let mut intern = |name: &str, line: usize| -> Result<RelationNode> {
            if !valid_name(name) {
                return Err(Error::Syntax { line, message: format!("bad node name `{name}`") });
            }
            if name == BOTTOM_NAME {
                return Err(Error::Syntax { line, message: "bottom is implicit and may not appear in edges".into() });
            }
            if let Some(&n) = by_name.get(name) {
                return Ok(n);
            }
            let n = RelationNode(names.len() as u16);
            names.push(name.to_string());
            by_name.insert(name.to_string(), n);
            Ok(n)
        };

        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [child, parent] = fields[..] else {
                return Err(Error::Syntax { line: i + 1, message: "expected `child parent`".into() });
            };
            if child == parent {
                return Err(Error::Syntax { line: i + 1, message: format!("self edge on `{child}`") });
            }
            let c = intern(child, i + 1)?;
            let p = intern(parent, i + 1)?;
            edges.push((c, p));
        }

        let n = names.len();
        if n == 1 {
            return Err(Error::Lattice("no relation nodes".into()));
        }
        let mut leq = vec![vec![false; n]; n];
        for (a, row) in leq.iter_mut().enumerate() {
            row[a] = true;
        }
        leq[0].fill(true);
        for &(c, p) in &edges {
            leq[c.index()][p.index()] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    let via = leq[k].clone();
                    for (cell, reach) in leq[i].iter_mut().zip(via) {
                        *cell |= reach;
                    }
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if leq[a][b] && leq[b][a] {
                    return Err(Error::Lattice(format!("cycle through `{}` and `{}`", names[a], names[b])));
                }
            }
        }

        let roots: Vec<usize> = (1..n).filter(|&a| (1..n).all(|b| b == a || !leq[a][b])).collect();
        let top = match roots[..] {
            [r] => RelationNode(r as u16),
            _ => {
                let listed: Vec<&str> = roots.iter().map(|&r| names[r].as_str()).collect();
                return Err(Error::Lattice(format!("expected a single root, found {}", listed.join(", "))));
            }
        };
        if names[top.index()] != TOP_NAME {
            return Err(Error::Lattice(format!("root must be `{TOP_NAME}`, found `{}`", names[top.index()])));
        }

        let bound = |candidates: Vec<usize>, greatest: bool| -> Option<usize> {
            candidates.iter().copied().find(|&c| {
                candidates.iter().all(|&o| if greatest { leq[o][c] } else { leq[c][o] })
            })
        };
        let mut meet = vec![vec![BOTTOM; n]; n];
        let mut join = vec![vec![BOTTOM; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
                let upper: Vec<usize> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
                let m = bound(lower, true).ok_or_else(|| {
                    Error::Lattice(format!("`{}` and `{}` have no greatest common subtype", names[a], names[b]))
                })?;
                let j = bound(upper, false).ok_or_else(|| {
                    Error::Lattice(format!("`{}` and `{}` have no least common supertype", names[a], names[b]))
                })?;
                meet[a][b] = RelationNode(m as u16);
                join[a][b] = RelationNode(j as u16);
            }
        }

        let children_of_top: Vec<usize> = edges
            .iter()
            .filter(|(_, p)| *p == top)
            .map(|(c, _)| c.index())
            .collect();
        let mut core = [BOTTOM; 4];
        for (slot, rel) in core.iter_mut().zip(CoreRelation::ALL) {
            let node = by_name
                .get(rel.as_str())
                .copied()
                .filter(|node| children_of_top.contains(&node.index()))
                .ok_or_else(|| Error::Lattice(format!("`{rel}` must be a direct child of `{TOP_NAME}`")))?;
            *slot = node;
        }
        if children_of_top.len() != 4 {
            return Err(Error::Lattice(format!("`{TOP_NAME}` must have exactly the four core relations as children")));
        }

        let mut projection = vec![None; n];
        for (a, slot) in projection.iter_mut().enumerate().skip(1) {
            if a == top.index() {
                continue;
            }
            let above: Vec<CoreRelation> = CoreRelation::ALL
                .iter()
                .zip(core)
                .filter(|(_, c)| leq[a][c.index()])
                .map(|(r, _)| *r)
                .collect();
            match above[..] {
                [r] => *slot = Some(r),
                _ => return Err(Error::Lattice(format!("`{}` must refine exactly one core relation", names[a]))),
            }
        }

        Ok(RelationLattice { names, by_name, leq, meet, join, top, core, projection })
    }

    pub fn top(&self) -> RelationNode {
        self.top
    }

    pub fn bottom(&self) -> RelationNode {
        BOTTOM
    }

    pub fn is_top(&self, node: RelationNode) -> bool {
        node == self.top
    }

    pub fn is_bottom(&self, node: RelationNode) -> bool {
        node == BOTTOM
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All nodes except bottom.
    pub fn nodes(&self) -> impl Iterator<Item = RelationNode> + '_ {
        (1..self.names.len()).map(|i| RelationNode(i as u16))
    }

    pub fn node(&self, name: &str) -> Result<RelationNode> {
        self.by_name
            .get(name)
            .copied()
            .filter(|n| *n != BOTTOM)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn name(&self, node: RelationNode) -> &str {
        &self.names[node.index()]
    }

    pub fn core(&self, rel: CoreRelation) -> RelationNode {
        self.core[rel as usize]
    }

    /// `a` is a subtype of (or equal to) `b`.
    pub fn leq(&self, a: RelationNode, b: RelationNode) -> bool {
        self.leq[a.index()][b.index()]
    }

    /// Greatest lower bound, possibly bottom.
    pub fn meet_total(&self, a: RelationNode, b: RelationNode) -> RelationNode {
        self.meet[a.index()][b.index()]
    }

    /// Greatest lower bound; bottom is reported as an inconsistency.
    pub fn meet(&self, a: RelationNode, b: RelationNode) -> std::result::Result<RelationNode, Inconsistent> {
        let m = self.meet_total(a, b);
        if m == BOTTOM {
            Err(Inconsistent { left: a, right: b })
        } else {
            Ok(m)
        }
    }

    /// Least upper bound.
    pub fn join(&self, a: RelationNode, b: RelationNode) -> RelationNode {
        self.join[a.index()][b.index()]
    }

    /// Least upper bound of a non-empty set.
    pub fn join_all<I: IntoIterator<Item = RelationNode>>(&self, nodes: I) -> Option<RelationNode> {
        nodes.into_iter().reduce(|a, b| self.join(a, b))
    }

    /// The core temporal relation a node refines; `None` for top and bottom.
    pub fn temporal_projection(&self, node: RelationNode) -> Option<CoreRelation> {
        self.projection[node.index()]
    }

    /// Writes the lattice back out in edge-list form (covering edges only).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for a in self.nodes() {
            for b in self.nodes() {
                if a != b && self.leq(a, b) && !self.nodes().any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b)) {
                    out.push_str(&format!("{} {}\n", self.name(a), self.name(b)));
                }
            }
        }
        out
    }
}

/// Maps cue tokens to the relation node they mark.
#[derive(Debug, Clone, PartialEq)]
pub struct CueLexicon {
    entries: BTreeMap<String, RelationNode>,
}

impl CueLexicon {
    pub fn parse(text: &str, lattice: &RelationLattice) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [token, node] = fields[..] else {
                return Err(Error::Syntax { line: i + 1, message: "expected `token node`".into() });
            };
            if token.chars().any(|c| c.is_uppercase()) {
                return Err(Error::Syntax { line: i + 1, message: format!("cue `{token}` must be lowercase") });
            }
            let node = lattice.node(node).map_err(|e| Error::Syntax { line: i + 1, message: e.to_string() })?;
            entries.insert(token.to_string(), node);
        }
        Ok(CueLexicon { entries })
    }

    pub fn get(&self, token: &str) -> Option<RelationNode> {
        self.entries.get(token).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, RelationNode)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Node marked by a cue token.
pub fn cue_relation(lexicon: &CueLexicon, token: &str) -> Result<RelationNode> {
    lexicon.get(token).ok_or_else(|| Error::UnknownCue(token.to_string()))
}

impl fmt::Display for RelationNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn lattice() -> RelationLattice {
        data::default_lattice()
    }

    fn n(l: &RelationLattice, name: &str) -> RelationNode {
        l.node(name).unwrap()
    }

    /// Least upper bound by scanning every node, independent of the
    /// precomputed join table.
    fn brute_lub(l: &RelationLattice, a: RelationNode, b: RelationNode) -> RelationNode {
        let uppers: Vec<_> = l.nodes().filter(|&x| l.leq(a, x) && l.leq(b, x)).collect();
        *uppers.iter().find(|&&x| uppers.iter().all(|&y| l.leq(x, y))).unwrap()
    }

    #[test]
    fn shipped_hierarchy_shape() {
        let l = lattice();
        assert_eq!(l.nodes().count(), 10);
        assert_eq!(l.name(l.top()), "any_rel");
        for (child, parent) in [
            ("narration", "just_after"),
            ("result", "just_after"),
            ("cause", "precede"),
            ("background", "overlap"),
            ("elaboration", "same_event"),
        ] {
            assert!(l.leq(n(&l, child), n(&l, parent)));
            assert!(!l.leq(n(&l, parent), n(&l, child)));
        }
        for x in l.nodes() {
            assert!(l.leq(l.bottom(), x));
            assert!(l.leq(x, l.top()));
        }
    }

    #[test]
    fn meet_examples() {
        let l = lattice();
        assert_eq!(l.meet(n(&l, "overlap"), n(&l, "background")), Ok(n(&l, "background")));
        assert!(l.meet(n(&l, "result"), n(&l, "precede")).is_err());
        for x in l.nodes() {
            assert_eq!(l.meet(l.top(), x), Ok(x));
        }
    }

    #[test]
    fn join_examples() {
        let l = lattice();
        let ja = n(&l, "just_after");
        let se = n(&l, "same_event");
        assert_eq!(brute_lub(&l, ja, se), l.top());
        assert_eq!(l.join(ja, se), l.top());
        assert_eq!(l.join(n(&l, "background"), n(&l, "overlap")), n(&l, "overlap"));
        for x in l.nodes() {
            assert_eq!(l.join(x, x), x);
        }
    }

    #[test]
    fn join_matches_brute_force() {
        let l = lattice();
        for a in l.nodes() {
            for b in l.nodes() {
                assert_eq!(l.join(a, b), brute_lub(&l, a, b));
            }
        }
    }

    #[test]
    fn projection() {
        let l = lattice();
        assert_eq!(l.temporal_projection(n(&l, "cause")), Some(CoreRelation::Precede));
        assert_eq!(l.temporal_projection(n(&l, "background")), Some(CoreRelation::Overlap));
        assert_eq!(l.temporal_projection(n(&l, "elaboration")), Some(CoreRelation::SameEvent));
        assert_eq!(l.temporal_projection(n(&l, "narration")), Some(CoreRelation::JustAfter));
        assert_eq!(l.temporal_projection(n(&l, "result")), Some(CoreRelation::JustAfter));
        assert_eq!(l.temporal_projection(n(&l, "just_after")), Some(CoreRelation::JustAfter));
        assert_eq!(l.temporal_projection(l.top()), None);
        assert_eq!(l.temporal_projection(l.bottom()), None);
    }

    #[test]
    fn cues() {
        let l = lattice();
        let cues = data::default_cues();
        assert_eq!(cue_relation(&cues, "because").unwrap(), n(&l, "cause"));
        assert_eq!(cue_relation(&cues, "meanwhile").unwrap(), n(&l, "background"));
        assert_eq!(cue_relation(&cues, "as_a_result").unwrap(), n(&l, "result"));
        assert_eq!(cue_relation(&cues, "and").unwrap(), l.top());
        assert_eq!(cue_relation(&cues, "whereupon"), Err(Error::UnknownCue("whereupon".into())));
    }

    #[test]
    fn edge_list_round_trip() {
        let l = lattice();
        assert_eq!(RelationLattice::parse(&l.to_edge_list()).unwrap(), l);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(RelationLattice::parse("a b\nb a\n").is_err());
        assert!(RelationLattice::parse("just_after top\n").is_err());
        // two roots
        assert!(RelationLattice::parse("just_after any_rel\nprecede other\n").is_err());
        // missing core relations
        assert!(RelationLattice::parse("just_after any_rel\n").is_err());
        assert!(matches!(RelationLattice::parse("bad-name any_rel\n"), Err(Error::Syntax { line: 1, .. })));
        // cause under two cores
        let twisted = "just_after any_rel\nprecede any_rel\noverlap any_rel\nsame_event any_rel\ncause precede\ncause overlap\n";
        assert!(RelationLattice::parse(twisted).is_err());
    }

    #[test]
    fn cue_file_must_name_known_nodes() {
        let l = lattice();
        assert!(CueLexicon::parse("because causation\n", &l).is_err());
        assert!(CueLexicon::parse("Because cause\n", &l).is_err());
    }
}
