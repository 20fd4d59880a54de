use super::Constraint;
use crate::error::Result;
use std::collections::BTreeSet;

/// Independent groups of atoms with disjoint variable sets.
#[derive(Clone, Debug)]
pub struct SliceSet {
    /// Each group: the restricted constraint and the original indices of
    /// its variables (in the restricted constraint's order).
    pub groups: Vec<(Constraint, Vec<usize>)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partitions the atoms of `c` into groups over transitively dependent
/// variables. Variables in the same correlation group are dependent.
///
/// Groups are ordered by their smallest variable index.
pub fn slice_constraint(c: &Constraint, correlation_groups: &[Vec<usize>]) -> Result<SliceSet> {
    let n = c.dim();
    let mut uf = UnionFind::new(n);
    let atom_vars: Vec<BTreeSet<usize>> = c
        .atoms()
        .iter()
        .map(|a| {
            let mut s = BTreeSet::new();
            a.lhs.collect_vars(&mut s);
            a.rhs.collect_vars(&mut s);
            s
        })
        .collect();
    for vs in &atom_vars {
        let mut it = vs.iter();
        if let Some(&first) = it.next() {
            for &v in it {
                uf.union(first, v);
            }
        }
    }
    for g in correlation_groups {
        for w in g.windows(2) {
            uf.union(w[0], w[1]);
        }
    }

    let used: BTreeSet<usize> = atom_vars.iter().flatten().copied().collect();
    let mut roots: Vec<usize> = Vec::new();
    let mut var_groups: Vec<Vec<usize>> = Vec::new();
    let mut atom_groups: Vec<Vec<usize>> = Vec::new();
    let group_of = |root: usize, roots: &mut Vec<usize>| match roots.iter().position(|&r| r == root) {
        Some(g) => g,
        None => {
            roots.push(root);
            roots.len() - 1
        }
    };
    // Variables in a correlation group with a used variable join its slice.
    let mut members: BTreeSet<usize> = used.clone();
    for g in correlation_groups {
        if g.iter().any(|v| used.contains(v)) {
            members.extend(g.iter().copied());
        }
    }
    for &v in &members {
        let root = uf.find(v);
        let g = group_of(root, &mut roots);
        if g == var_groups.len() {
            var_groups.push(Vec::new());
            atom_groups.push(Vec::new());
        }
        var_groups[g].push(v);
    }
    for (ai, vs) in atom_vars.iter().enumerate() {
        // Variable-free atoms are attached to the first group.
        let g = match vs.iter().next() {
            Some(&v) => {
                let root = uf.find(v);
                group_of(root, &mut roots)
            }
            None => 0,
        };
        if atom_groups.is_empty() {
            var_groups.push(Vec::new());
            atom_groups.push(Vec::new());
        }
        atom_groups[g].push(ai);
    }

    let groups = var_groups
        .into_iter()
        .zip(atom_groups)
        .map(|(vars, atoms)| Ok((c.restrict(&atoms, &vars)?, vars)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceSet { groups })
}

impl SliceSet {
    /// Product of the group indicators, each evaluated on its own variables.
    pub fn indicator(&self, x: &[f64]) -> u8 {
        let mut buf = Vec::new();
        for (c, vars) in &self.groups {
            buf.clear();
            buf.extend(vars.iter().map(|&v| x[v]));
            if !c.satisfied(&buf) {
                return 0;
            }
        }
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XYZ: &str = "x -2 2\ny -2 2\nz -2 2";

    #[test]
    fn independent_atoms_split() {
        let c = Constraint::parse("x <= 1 && y <= 1", XYZ).unwrap();
        let s = slice_constraint(&c, &[]).unwrap();
        assert_eq!(s.groups.len(), 2);
        assert_eq!(s.groups[0].1, vec![0]);
        assert_eq!(s.groups[1].1, vec![1]);
    }

    #[test]
    fn transitive_closure_merges() {
        let c = Constraint::parse("x + y <= 1 && y + z <= 1", XYZ).unwrap();
        let s = slice_constraint(&c, &[]).unwrap();
        assert_eq!(s.groups.len(), 1);
        assert_eq!(s.groups[0].1, vec![0, 1, 2]);
        assert_eq!(s.groups[0].0.atoms().len(), 2);
    }

    #[test]
    fn correlation_merges() {
        let c = Constraint::parse("x <= 1 && y <= 1", XYZ).unwrap();
        let s = slice_constraint(&c, &[vec![0, 1]]).unwrap();
        assert_eq!(s.groups.len(), 1);
        assert_eq!(s.groups[0].1, vec![0, 1]);
    }

    #[test]
    fn correlated_free_variable_joins_slice() {
        let c = Constraint::parse("x <= 1", XYZ).unwrap();
        let s = slice_constraint(&c, &[vec![0, 2]]).unwrap();
        assert_eq!(s.groups.len(), 1);
        assert_eq!(s.groups[0].1, vec![0, 2]);
    }
}
