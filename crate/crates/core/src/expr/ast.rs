use std::collections::BTreeSet;
use std::fmt;

/// Byte range in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

/// Chart and curve variables understood natively by the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    U,
    V,
    T,
}

impl Var {
    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "u" => Some(Var::U),
            "v" => Some(Var::V),
            "t" => Some(Var::T),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
    Atan2,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "atan2" => Func::Atan2,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan2 => "atan2",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Num(f64),
    Pi,
    Var(Var),
    /// Integration variable of an enclosing `integral(...)`.
    Bound(String),
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Integral {
        integrand: Box<Expr>,
        var: String,
        lower: Box<Expr>,
        upper: Box<Expr>,
    },
}

/// Expression tree node. Equality is structural and ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a.to_bits() == b.to_bits(),
            (Pi, Pi) => true,
            (Var(a), Var(b)) => a == b,
            (Bound(a), Bound(b)) | (Param(a), Param(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Binary(o1, a1, b1), Binary(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1 == a2,
            (
                Integral { integrand: g1, var: r1, lower: l1, upper: u1 },
                Integral { integrand: g2, var: r2, lower: l2, upper: u2 },
            ) => g1 == g2 && r1 == r2 && l1 == l2 && u1 == u2,
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Node without a meaningful source location (programmatic construction).
    pub fn synthetic(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn num(x: f64) -> Self {
        Expr::synthetic(ExprKind::Num(x))
    }

    pub fn var(v: Var) -> Self {
        Expr::synthetic(ExprKind::Var(v))
    }

    pub fn param(name: &str) -> Self {
        Expr::synthetic(ExprKind::Param(name.to_string()))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::synthetic(ExprKind::Binary(op, Box::new(a), Box::new(b)))
    }

    pub fn negate(a: Expr) -> Self {
        Expr::synthetic(ExprKind::Neg(Box::new(a)))
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Self {
        Expr::synthetic(ExprKind::Call(f, args))
    }

    /// Names of all parameters referenced anywhere in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Param(p) = &e.kind {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Chart/curve variables referenced outside integrands.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Var(v) = &e.kind {
                out.insert(*v);
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        use ExprKind::*;
        1 + match &self.kind {
            Num(_) | Pi | Var(_) | Bound(_) | Param(_) => 0,
            Neg(a) => a.depth(),
            Binary(_, a, b) => a.depth().max(b.depth()),
            Call(_, args) => args.iter().map(Expr::depth).max().unwrap_or(0),
            Integral { integrand, lower, upper, .. } => integrand.depth().max(lower.depth()).max(upper.depth()),
        }
    }

    pub fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        use ExprKind::*;
        match &self.kind {
            Num(_) | Pi | Var(_) | Bound(_) | Param(_) => {}
            Neg(a) => a.visit(f),
            Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Call(_, args) => args.iter().for_each(|a| a.visit(f)),
            Integral { integrand, lower, upper, .. } => {
                integrand.visit(f);
                lower.visit(f);
                upper.visit(f);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExprKind::*;
        match &self.kind {
            Num(x) => {
                if *x < 0.0 {
                    write!(f, "(-{:?})", -x)
                } else {
                    write!(f, "{:?}", x)
                }
            }
            Pi => write!(f, "pi"),
            Var(v) => write!(f, "{}", v.name()),
            Bound(n) | Param(n) => write!(f, "{}", n),
            Neg(a) => write!(f, "(-{})", a),
            Binary(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
            Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
            Integral { integrand, var, lower, upper } => {
                write!(f, "integral({}, {}, {}, {})", integrand, var, lower, upper)
            }
        }
    }
}
