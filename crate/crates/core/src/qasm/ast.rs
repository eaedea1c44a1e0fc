use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// Real-valued parameter expression. `Param(i)` refers to the i-th parameter of the enclosing
/// gate definition and only appears inside gate bodies.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    Pi,
    Param(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates with `params` bound to `Param` slots. Out-of-range slots evaluate to NaN.
    pub fn eval(&self, params: &[f64]) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Param(i) => params.get(*i).copied().unwrap_or(f64::NAN),
            Expr::Neg(e) => -e.eval(params),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(params), b.eval(params));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(params)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterDecl {
    pub name: String,
    pub size: usize,
    pub span: Span,
}

/// One gate application inside a gate body; `qargs` index the definition's formal qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub name: String,
    pub params: Vec<Expr>,
    pub qargs: Vec<usize>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<String>,
    pub qargs: Vec<String>,
    pub body: Vec<GateOp>,
    pub opaque: bool,
    /// Set for definitions that came from an included library.
    pub from_include: bool,
    pub span: Span,
}

/// A quantum or classical argument: a single element or a whole register (broadcast).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Bit { reg: usize, index: usize },
    Register { reg: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateCall {
    /// `U`, `CX` or the name of a definition.
    pub name: String,
    pub params: Vec<Expr>,
    pub args: Vec<Operand>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Gate(GateCall),
    Measure { qubit: Operand, clbit: Operand, span: Span },
    Barrier { args: Vec<Operand>, span: Span },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QasmAst {
    pub version: Option<String>,
    pub includes: Vec<String>,
    pub qregs: Vec<RegisterDecl>,
    pub cregs: Vec<RegisterDecl>,
    pub gate_defs: Vec<GateDef>,
    pub statements: Vec<Statement>,
    pub warnings: Vec<super::ParseDiagnostic>,
}

impl QasmAst {
    /// Total number of qubits; registers are laid out consecutively in declaration order.
    pub fn num_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.size).sum()
    }

    /// Index of the first qubit of each quantum register in the flat numbering.
    pub fn qreg_offsets(&self) -> Vec<usize> {
        self.qregs
            .iter()
            .scan(0, |acc, r| {
                let off = *acc;
                *acc += r.size;
                Some(off)
            })
            .collect()
    }

    pub fn gate_def(&self, name: &str) -> Option<&GateDef> {
        self.gate_defs.iter().find(|d| d.name == name)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
