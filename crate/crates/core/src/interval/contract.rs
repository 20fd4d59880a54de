//! Forward-backward (HC4-revise) contraction over compiled expression tapes.

use super::{Interval, IntervalBox};
use crate::constraint::{Certainty, Constraint, Expr, Rel};

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(f64),
    Var(usize),
    Neg(usize),
    Sqrt(usize),
    Pow(usize, u32),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
}

/// An expression flattened so that children precede parents.
#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
}

impl Tape {
    pub fn compile(e: &Expr) -> Tape {
        let mut ops = Vec::new();
        push(e, &mut ops);
        Tape { ops }
    }

    /// Forward interval evaluation; `None` when some sub-expression has an
    /// empty range (e.g. sqrt of an entirely negative interval).
    pub fn eval(&self, b: &IntervalBox) -> Option<Interval> {
        let mut vals = Vec::with_capacity(self.ops.len());
        self.forward(b, &mut vals)?;
        vals.last().copied()
    }

    fn forward(&self, b: &IntervalBox, vals: &mut Vec<Interval>) -> Option<()> {
        vals.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Const(c) => Interval::point(c),
                Op::Var(k) => b[k],
                Op::Neg(a) => vals[a].neg(),
                Op::Sqrt(a) => vals[a].sqrt()?,
                Op::Pow(a, n) => vals[a].powi(n),
                Op::Add(a, c) => vals[a].add(&vals[c]),
                Op::Sub(a, c) => vals[a].sub(&vals[c]),
                Op::Mul(a, c) => vals[a].mul(&vals[c]),
                Op::Div(a, c) => vals[a].div(&vals[c]),
            };
            vals.push(v);
        }
        Some(())
    }

    /// One HC4-revise pass narrowing `b` so that the tape's value lies in
    /// `target`. Returns `false` when the box is proven empty.
    pub fn revise(&self, target: &Interval, b: &mut IntervalBox, vals: &mut Vec<Interval>) -> bool {
        if self.forward(b, vals).is_none() {
            return false;
        }
        let root = self.ops.len() - 1;
        match vals[root].intersect(target) {
            Some(r) => vals[root] = r,
            None => return false,
        }
        for i in (0..self.ops.len()).rev() {
            let r = vals[i];
            let ok = match self.ops[i] {
                Op::Const(c) => r.contains(c),
                Op::Var(k) => narrow_box(b, k, &r),
                Op::Neg(a) => narrow(vals, a, &r.neg()),
                Op::Add(a, c) => {
                    let pa = r.sub(&vals[c]);
                    narrow(vals, a, &pa) && {
                        let pc = r.sub(&vals[a]);
                        narrow(vals, c, &pc)
                    }
                }
                Op::Sub(a, c) => {
                    let pa = r.add(&vals[c]);
                    narrow(vals, a, &pa) && {
                        let pc = vals[a].sub(&r);
                        narrow(vals, c, &pc)
                    }
                }
                Op::Mul(a, c) => {
                    let pa = r.div(&vals[c]);
                    (vals[c].contains_zero() || narrow(vals, a, &pa)) && {
                        let pc = r.div(&vals[a]);
                        vals[a].contains_zero() || narrow(vals, c, &pc)
                    }
                }
                Op::Div(a, c) => {
                    let pa = r.mul(&vals[c]);
                    narrow(vals, a, &pa) && {
                        let pc = vals[a].div(&r);
                        r.contains_zero() || narrow(vals, c, &pc)
                    }
                }
                Op::Sqrt(a) => match Interval::checked(r.lo.max(0.0), r.hi) {
                    Some(s) => narrow(vals, a, &Interval::new(s.lo * s.lo, s.hi * s.hi)),
                    None => false,
                },
                Op::Pow(a, n) => revise_pow(vals, a, n, &r),
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

fn push(e: &Expr, ops: &mut Vec<Op>) -> usize {
    let op = match e {
        Expr::Const(c) => Op::Const(*c),
        Expr::Var(k) => Op::Var(*k),
        Expr::Neg(a) => Op::Neg(push(a, ops)),
        Expr::Sqrt(a) => Op::Sqrt(push(a, ops)),
        Expr::Pow(a, n) => Op::Pow(push(a, ops), *n),
        Expr::Add(a, b) => {
            let (x, y) = (push(a, ops), push(b, ops));
            Op::Add(x, y)
        }
        Expr::Sub(a, b) => {
            let (x, y) = (push(a, ops), push(b, ops));
            Op::Sub(x, y)
        }
        // A product of identical factors is evaluated as a square, which
        // is exact over intervals straddling zero.
        Expr::Mul(a, b) if a == b => Op::Pow(push(a, ops), 2),
        Expr::Mul(a, b) => {
            let (x, y) = (push(a, ops), push(b, ops));
            Op::Mul(x, y)
        }
        Expr::Div(a, b) => {
            let (x, y) = (push(a, ops), push(b, ops));
            Op::Div(x, y)
        }
    };
    ops.push(op);
    ops.len() - 1
}

fn narrow(vals: &mut [Interval], i: usize, proj: &Interval) -> bool {
    match vals[i].intersect(&proj.inflate()) {
        Some(v) => {
            vals[i] = v;
            true
        }
        None => false,
    }
}

fn narrow_box(b: &mut IntervalBox, k: usize, proj: &Interval) -> bool {
    match b[k].intersect(&proj.inflate()) {
        Some(v) => {
            b[k] = v;
            true
        }
        None => false,
    }
}

fn root(v: f64, n: u32) -> f64 {
    if v.is_infinite() {
        return v;
    }
    if n == 2 {
        return v.sqrt();
    }
    v.signum() * v.abs().powf(1.0 / n as f64)
}

fn revise_pow(vals: &mut [Interval], a: usize, n: u32, r: &Interval) -> bool {
    if n == 0 {
        return r.contains(1.0);
    }
    if n % 2 == 1 {
        return narrow(vals, a, &Interval::new(root(r.lo, n), root(r.hi, n)));
    }
    let Some(pos) = Interval::checked(r.lo.max(0.0), r.hi) else {
        return false;
    };
    let s = Interval::new(root(pos.lo, n), root(pos.hi, n)).inflate();
    let cur = vals[a];
    let hull = match (cur.intersect(&s), cur.intersect(&s.neg())) {
        (Some(p), Some(q)) => p.hull(&q),
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => return false,
    };
    vals[a] = hull;
    true
}

/// Compiled contractor for all atoms of a constraint.
#[derive(Clone, Debug)]
pub struct Contractor {
    atoms: Vec<(Tape, Rel)>,
}

/// Stop iterating once no dimension shrinks by more than this fraction.
const FIXPOINT_IMPROVEMENT: f64 = 0.01;
const MAX_SWEEPS: usize = 100;

impl Contractor {
    pub fn new(c: &Constraint) -> Contractor {
        Contractor {
            atoms: c
                .atoms()
                .iter()
                .map(|a| (Tape::compile(a.difference()), a.rel))
                .collect(),
        }
    }

    /// Contracts `b` to a sub-box containing every solution in `b`, or
    /// `None` if no solution provably exists.
    pub fn contract(&self, b: &IntervalBox) -> Option<IntervalBox> {
        let mut cur = b.clone();
        let mut vals = Vec::new();
        for _ in 0..MAX_SWEEPS {
            let before = cur.clone();
            for (tape, rel) in &self.atoms {
                if !tape.revise(&rel.admissible(), &mut cur, &mut vals) {
                    return None;
                }
            }
            let improvement = before
                .iter()
                .zip(cur.iter())
                .map(|(o, n)| {
                    let w = o.width();
                    if w > 0.0 && w.is_finite() {
                        (w - n.width()) / w
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max);
            if improvement < FIXPOINT_IMPROVEMENT {
                break;
            }
        }
        Some(cur)
    }

    /// Interval certificate of the conjunction over `b`.
    pub fn classify(&self, b: &IntervalBox) -> Certainty {
        let mut all_true = true;
        for (tape, rel) in &self.atoms {
            let cert = match tape.eval(b) {
                Some(d) => rel.certainty(&d),
                None => Certainty::False,
            };
            match cert {
                Certainty::False => return Certainty::False,
                Certainty::Unknown => all_true = false,
                Certainty::True => {}
            }
        }
        if all_true {
            Certainty::True
        } else {
            Certainty::Unknown
        }
    }
}

/// Sound enclosure of `e` over `b`; `None` marks an empty range.
pub fn interval_eval(e: &Expr, b: &IntervalBox) -> Option<Interval> {
    Tape::compile(e).eval(b)
}

pub fn hc4_contract(c: &Constraint, b: &IntervalBox) -> Option<IntervalBox> {
    Contractor::new(c).contract(b)
}

/// Fixpoint contraction of the whole domain; encloses every solution.
pub fn bounding_box(c: &Constraint) -> Option<IntervalBox> {
    hc4_contract(c, c.domain())
}
