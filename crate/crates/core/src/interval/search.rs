use super::{Contractor, IntervalBox};
use crate::constraint::{Certainty, Constraint};

/// Upper bound on boxes examined by [`dfs_feasible_boxes`].
pub const DFS_NODE_BUDGET: usize = 100_000;

/// Depth-first branch-and-contract search for feasible boxes.
///
/// Collects up to `max_solutions` boxes that are either certified inner
/// boxes or undecided boxes no wider than `accuracy` whose center satisfies
/// the constraint. The result need not cover every solution.
pub fn dfs_feasible_boxes(c: &Constraint, accuracy: f64, max_solutions: usize) -> Vec<IntervalBox> {
    assert!(accuracy > 0.0);
    let domain = c.domain();
    let k = Contractor::new(c);
    let mut found = Vec::new();
    let mut stack = vec![domain.clone()];
    let mut nodes = 0;
    while let Some(b) = stack.pop() {
        if found.len() >= max_solutions || nodes >= DFS_NODE_BUDGET {
            break;
        }
        nodes += 1;
        let Some(b) = k.contract(&b) else { continue };
        match k.classify(&b) {
            Certainty::True => found.push(b),
            Certainty::False => {}
            Certainty::Unknown => {
                let (dim, w) = b.widest_normalized(domain);
                if super::within_accuracy(w, accuracy) {
                    if c.satisfied(&b.center()) {
                        found.push(b);
                    }
                } else {
                    let (l, r) = b.split(dim);
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_has_feasible_center() {
        let c = Constraint::parse("x*x + y*y <= 1", "x -2 2\ny -2 2").unwrap();
        let boxes = dfs_feasible_boxes(&c, 0.5, 8);
        assert!(!boxes.is_empty() && boxes.len() <= 8);
        assert!(boxes.iter().all(|b| c.satisfied(&b.center())));
    }

    #[test]
    fn infeasible_gives_nothing() {
        let c = Constraint::parse("x^2 + y^2 <= -1", "x -2 2\ny -2 2").unwrap();
        assert!(dfs_feasible_boxes(&c, 0.1, 100).is_empty());
    }

    #[test]
    fn box_contracted_to_accuracy_is_not_split() {
        let text = (1..=10).map(|i| format!("(x{i} - 1)^2")).collect::<Vec<_>>().join(" + ") + " <= 1";
        let decls = (1..=10).map(|i| format!("x{i} -10 10")).collect::<Vec<_>>().join("\n");
        let c = Constraint::parse(&text, &decls).unwrap();
        let boxes = dfs_feasible_boxes(&c, 0.1, 1024);
        assert_eq!(boxes.len(), 1);
        assert!(c.satisfied(&boxes[0].center()));
    }

    #[test]
    fn torus_both_lobes() {
        let c = Constraint::parse(
            "(sqrt(x^2+y^2)-3)^2 + z^2 <= 1",
            "x -5 5\ny -5 5\nz -5 5",
        )
        .unwrap();
        let boxes = dfs_feasible_boxes(&c, 0.1, 1024);
        let xs: Vec<f64> = boxes.iter().map(|b| b.center()[0]).collect();
        assert!(xs.iter().any(|&x| x > 0.0) && xs.iter().any(|&x| x < 0.0));
    }
}
