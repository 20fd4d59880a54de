//! Numeric path conditions: conjunctions of inequality atoms over bounded
//! real variables.

mod expr;
mod parser;
mod slice;

pub use expr::{Expr, ExprDisplay};
pub use slice::{slice_constraint, SliceSet};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Ge => ">=",
            Rel::Gt => ">",
            Rel::Eq => "==",
        }
    }

    /// Whether `lhs - rhs = d` satisfies the relation. NaN never does.
    pub fn holds(self, d: f64) -> bool {
        match self {
            Rel::Le => d <= 0.0,
            Rel::Lt => d < 0.0,
            Rel::Ge => d >= 0.0,
            Rel::Gt => d > 0.0,
            Rel::Eq => d == 0.0,
        }
    }

    /// Closed set of admissible values of `lhs - rhs`, used for contraction.
    pub fn admissible(self) -> Interval {
        match self {
            Rel::Le | Rel::Lt => Interval::new(f64::NEG_INFINITY, 0.0),
            Rel::Ge | Rel::Gt => Interval::new(0.0, f64::INFINITY),
            Rel::Eq => Interval::point(0.0),
        }
    }

    /// Three-valued truth of the relation over an enclosure of `lhs - rhs`.
    pub fn certainty(self, d: &Interval) -> Certainty {
        let (t, f) = match self {
            Rel::Le => (d.hi <= 0.0, d.lo > 0.0),
            Rel::Lt => (d.hi < 0.0, d.lo >= 0.0),
            Rel::Ge => (d.lo >= 0.0, d.hi < 0.0),
            Rel::Gt => (d.lo > 0.0, d.hi <= 0.0),
            Rel::Eq => (d.lo == 0.0 && d.hi == 0.0, !d.contains_zero()),
        };
        if t {
            Certainty::True
        } else if f {
            Certainty::False
        } else {
            Certainty::Unknown
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    True,
    False,
    Unknown,
}

/// One inequality `lhs rel rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub lhs: Expr,
    pub rel: Rel,
    pub rhs: Expr,
    diff: Expr,
}

impl Atom {
    pub fn new(lhs: Expr, rel: Rel, rhs: Expr) -> Atom {
        let diff = Expr::Sub(Box::new(lhs.clone()), Box::new(rhs.clone()));
        Atom {
            lhs,
            rel,
            rhs,
            diff,
        }
    }

    /// `lhs - rhs`, the expression the relation is checked against zero.
    pub fn difference(&self) -> &Expr {
        &self.diff
    }

    pub fn holds(&self, x: &[f64]) -> AtomValue {
        let d = self.lhs.eval(x) - self.rhs.eval(x);
        if d.is_nan() {
            AtomValue::Nan
        } else if self.rel.holds(d) {
            AtomValue::True
        } else {
            AtomValue::False
        }
    }

    fn remap(&self, map: &[Option<usize>]) -> Atom {
        Atom::new(self.lhs.remap(map), self.rel, self.rhs.remap(map))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomValue {
    True,
    False,
    Nan,
}

/// A conjunction of atoms over named variables with a bounded domain.
///
/// Immutable after construction apart from a diagnostic counter of NaN
/// evaluations, so it can be shared freely across threads.
#[derive(Debug)]
pub struct Constraint {
    atoms: Vec<Atom>,
    vars: Vec<String>,
    domain: IntervalBox,
    nan_events: AtomicU64,
}

impl Clone for Constraint {
    fn clone(&self) -> Self {
        Constraint {
            atoms: self.atoms.clone(),
            vars: self.vars.clone(),
            domain: self.domain.clone(),
            nan_events: AtomicU64::new(self.nan_events.load(Ordering::Relaxed)),
        }
    }
}

impl PartialEq for Constraint {
    fn eq(&self, o: &Self) -> bool {
        self.atoms == o.atoms && self.vars == o.vars && self.domain == o.domain
    }
}

impl Constraint {
    pub fn new(atoms: Vec<Atom>, vars: Vec<String>, domain: IntervalBox) -> Result<Constraint> {
        if atoms.is_empty() {
            return Err(Error::Syntax {
                pos: 0,
                msg: "a constraint needs at least one atom".into(),
            });
        }
        if domain.dim() != vars.len() {
            return Err(Error::Dimension {
                expected: vars.len(),
                got: domain.dim(),
            });
        }
        for (name, iv) in vars.iter().zip(domain.iter()) {
            if !(iv.lo.is_finite() && iv.hi.is_finite() && iv.lo <= iv.hi) {
                return Err(Error::UnboundedDomain(name.clone()));
            }
        }
        let mut used = std::collections::BTreeSet::new();
        for a in &atoms {
            a.lhs.collect_vars(&mut used);
            a.rhs.collect_vars(&mut used);
        }
        if let Some(&i) = used.iter().find(|&&i| i >= vars.len()) {
            return Err(Error::UndeclaredVariable {
                name: format!("#{i}"),
                pos: 0,
            });
        }
        Ok(Constraint {
            atoms,
            vars,
            domain,
            nan_events: AtomicU64::new(0),
        })
    }

    /// Parses `text` against a domain declaration: one `name lo hi` line
    /// per variable. Variables are ordered as declared.
    pub fn parse(text: &str, domain_decls: &str) -> Result<Constraint> {
        let (vars, domain) = parse_domain(domain_decls)?;
        Self::parse_with(text, vars, domain)
    }

    pub fn parse_with(text: &str, vars: Vec<String>, domain: IntervalBox) -> Result<Constraint> {
        let atoms = parser::Parser::new(text, &vars)?.constraint()?;
        Constraint::new(atoms, vars, domain)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn domain(&self) -> &IntervalBox {
        &self.domain
    }

    /// Indicator of the solution set: 1 iff every atom holds at `x`.
    ///
    /// Atoms evaluating to NaN count as unsatisfied and bump
    /// [`Constraint::nan_events`].
    pub fn indicator(&self, x: &[f64]) -> u8 {
        self.satisfied(x) as u8
    }

    pub fn satisfied(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.vars.len(), "point dimension mismatch");
        for a in &self.atoms {
            match a.holds(x) {
                AtomValue::True => {}
                AtomValue::False => return false,
                AtomValue::Nan => {
                    self.nan_events.fetch_add(1, Ordering::Relaxed);
                    return false;
                }
            }
        }
        true
    }

    pub fn nan_events(&self) -> u64 {
        self.nan_events.load(Ordering::Relaxed)
    }

    /// The sub-constraint made of the atoms at `atom_idx`, over the
    /// variables `var_idx` (in that order).
    pub fn restrict(&self, atom_idx: &[usize], var_idx: &[usize]) -> Result<Constraint> {
        let mut map = vec![None; self.vars.len()];
        for (new, &old) in var_idx.iter().enumerate() {
            map[old] = Some(new);
        }
        let atoms = atom_idx.iter().map(|&i| self.atoms[i].remap(&map)).collect();
        let vars = var_idx.iter().map(|&i| self.vars[i].clone()).collect();
        let domain = IntervalBox::new(var_idx.iter().map(|&i| self.domain[i]).collect());
        Constraint::new(atoms, vars, domain)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, " && ")?;
            }
            write!(
                f,
                "{} {} {}",
                a.lhs.display(&self.vars),
                a.rel.symbol(),
                a.rhs.display(&self.vars)
            )?;
        }
        Ok(())
    }
}

/// Parses domain declarations, one `name lo hi` per line. Blank lines and
/// `#` comments are ignored.
pub fn parse_domain(decls: &str) -> Result<(Vec<String>, IntervalBox)> {
    let mut vars = Vec::new();
    let mut dims = Vec::new();
    for (ln, raw) in decls.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::DomainDecl {
            line: ln + 1,
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad("expected `name lo hi`"));
        }
        let name = parts[0];
        if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            || name == "sqrt"
        {
            return Err(bad("invalid variable name"));
        }
        if vars.iter().any(|v| v == name) {
            return Err(bad("duplicate variable"));
        }
        let lo: f64 = parts[1].parse().map_err(|_| bad("invalid lower bound"))?;
        let hi: f64 = parts[2].parse().map_err(|_| bad("invalid upper bound"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::UnboundedDomain(name.to_string()));
        }
        vars.push(name.to_string());
        dims.push(Interval::new(lo, hi));
    }
    Ok((vars, IntervalBox::new(dims)))
}

/// Renders a domain back into declaration lines.
pub fn format_domain(vars: &[String], domain: &IntervalBox) -> String {
    vars.iter()
        .zip(domain.iter())
        .map(|(v, i)| format!("{v} {:?} {:?}\n", i.lo, i.hi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "x -2 2\ny -2 2\n";

    #[test]
    fn parses_circle() {
        let c = Constraint::parse("x*x + y*y <= 1", SQUARE).unwrap();
        assert_eq!(c.atoms().len(), 1);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.indicator(&[0.0, 0.0]), 1);
        assert_eq!(c.indicator(&[1.0, 1.0]), 0);
    }

    #[test]
    fn parses_torus() {
        let c = Constraint::parse(
            "(sqrt(x^2+y^2)-3)^2 + z^2 <= 1",
            "x -5 5\ny -5 5\nz -5 5",
        )
        .unwrap();
        assert_eq!(c.atoms().len(), 1);
        assert_eq!(c.dim(), 3);
        assert_eq!(c.indicator(&[3.0, 0.0, 0.0]), 1);
        assert_eq!(c.indicator(&[0.0, 0.0, 0.0]), 0);
    }

    #[test]
    fn tautology() {
        let c = Constraint::parse("x <= x", "x 0 1").unwrap();
        assert_eq!(c.atoms().len(), 1);
        assert_eq!(c.indicator(&[0.3]), 1);
    }

    #[test]
    fn boundary_semantics() {
        let c = Constraint::parse("x <= 1 && x >= 1", "x 0 2").unwrap();
        assert!(c.satisfied(&[1.0]));
        let strict = Constraint::parse("x < 1", "x 0 2").unwrap();
        assert!(!strict.satisfied(&[1.0]));
        let eq = Constraint::parse("x == 1", "x 0 2").unwrap();
        assert!(eq.satisfied(&[1.0]) && !eq.satisfied(&[1.0 + 1e-15]));
    }

    #[test]
    fn nan_counts_as_unsatisfied() {
        let c = Constraint::parse("sqrt(x) <= 10 && 1/y >= 0", "x -1 1\ny -1 1").unwrap();
        assert_eq!(c.indicator(&[-0.5, 1.0]), 0);
        assert_eq!(c.nan_events(), 1);
        // 1/0 is +inf, not NaN.
        assert_eq!(c.indicator(&[0.5, 0.0]), 1);
        let z = Constraint::parse("x/y >= 0", "x -1 1\ny -1 1").unwrap();
        assert_eq!(z.indicator(&[0.0, 0.0]), 0);
        assert_eq!(z.nan_events(), 1);
    }

    #[test]
    fn undeclared_and_unbounded_variables() {
        let e = Constraint::parse("x + w <= 1", "x 0 1").unwrap_err();
        assert_eq!(
            e,
            Error::UndeclaredVariable {
                name: "w".into(),
                pos: 4
            }
        );
        let e = Constraint::parse("x <= 1", "x 0 inf").unwrap_err();
        assert_eq!(e, Error::UnboundedDomain("x".into()));
        let e = Constraint::parse("x <= 1", "x 3 1").unwrap_err();
        assert_eq!(e, Error::UnboundedDomain("x".into()));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = Constraint::parse("x + <= 1", "x 0 1").unwrap_err();
        assert!(matches!(e, Error::Syntax { pos: 4, .. }), "{e:?}");
        let e = Constraint::parse("x <= 1 y", "x 0 1\ny 0 1").unwrap_err();
        assert!(matches!(e, Error::Syntax { pos: 7, .. }), "{e:?}");
    }

    #[test]
    fn display_round_trips() {
        let c = Constraint::parse("-(x - y) * 2 <= (y / 3)^2 && sqrt(x) > -1", SQUARE).unwrap();
        let again = Constraint::parse_with(&c.to_string(), c.vars().to_vec(), c.domain().clone())
            .unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn restrict_reindexes_variables() {
        let c = Constraint::parse("x <= 1 && z >= 0.5", "x 0 2\ny 0 2\nz 0 1").unwrap();
        let r = c.restrict(&[1], &[2]).unwrap();
        assert_eq!(r.vars(), ["z".to_string()]);
        assert!(r.satisfied(&[0.7]));
        assert!(!r.satisfied(&[0.2]));
    }
}
