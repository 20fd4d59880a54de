use std::collections::BTreeSet;
use std::fmt;

/// Arithmetic expression over the variables of a constraint.
///
/// Variables are stored as indices into the owning constraint's variable
/// list; use [`Expr::display`] to print with names.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Sqrt(Box<Expr>),
    /// Integer power with a non-negative literal exponent.
    Pow(Box<Expr>, u32),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Sqrt(a) => a.eval(x).sqrt(),
            Expr::Pow(a, n) => a.eval(x).powi(*n as i32),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Neg(a) | Expr::Sqrt(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Rewrites variable indices through `map`. Panics if a used variable
    /// has no image.
    pub(crate) fn remap(&self, map: &[Option<usize>]) -> Expr {
        let r = |e: &Expr| Box::new(e.remap(map));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => Expr::Var(map[*i].expect("variable outside remap domain")),
            Expr::Neg(a) => Expr::Neg(r(a)),
            Expr::Sqrt(a) => Expr::Sqrt(r(a)),
            Expr::Pow(a, n) => Expr::Pow(r(a), *n),
            Expr::Add(a, b) => Expr::Add(r(a), r(b)),
            Expr::Sub(a, b) => Expr::Sub(r(a), r(b)),
            Expr::Mul(a, b) => Expr::Mul(r(a), r(b)),
            Expr::Div(a, b) => Expr::Div(r(a), r(b)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) | Expr::Sqrt(_) => 5,
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

/// Prints an expression with the minimum parentheses needed for the parser
/// to rebuild the same tree.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl ExprDisplay<'_> {
    fn child<'b>(&'b self, e: &'b Expr) -> ExprDisplay<'b> {
        ExprDisplay {
            expr: e,
            names: self.names,
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.child(e))
        } else {
            write!(f, "{}", self.child(e))
        }
    }

    fn binary(&self, f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr) -> fmt::Result {
        let p = self.expr.precedence();
        self.wrapped(f, a, a.precedence() < p)?;
        write!(f, " {op} ")?;
        self.wrapped(f, b, b.precedence() <= p)
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => match self.names.get(*i) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "_v{i}"),
            },
            Expr::Neg(a) => {
                write!(f, "-")?;
                self.wrapped(f, a, a.precedence() <= 3)
            }
            Expr::Sqrt(a) => write!(f, "sqrt({})", self.child(a)),
            Expr::Pow(a, n) => {
                self.wrapped(f, a, a.precedence() <= 4)?;
                write!(f, "^{n}")
            }
            Expr::Add(a, b) => self.binary(f, a, "+", b),
            Expr::Sub(a, b) => self.binary(f, a, "-", b),
            Expr::Mul(a, b) => self.binary(f, a, "*", b),
            Expr::Div(a, b) => self.binary(f, a, "/", b),
        }
    }
}
