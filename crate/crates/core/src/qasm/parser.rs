use std::collections::HashMap;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::ParseDiagnostic;

/// Largest register accepted by the parser.
pub const MAX_REGISTER_SIZE: usize = 1 << 16;
const MAX_EXPR_DEPTH: usize = 256;
const MAX_EXPR_NODES: usize = 1024;

const QELIB1: &str = include_str!("qelib1.inc");

/// Marker for an error that has already been pushed as a diagnostic.
struct Reported;
type PResult<T> = Result<T, Reported>;

#[derive(Clone, Copy)]
enum RegRef {
    Quantum(usize),
    Classical(usize),
}

#[derive(Clone, Copy)]
struct Sig {
    params: usize,
    qubits: usize,
}

struct State {
    ast: QasmAst,
    diags: Vec<ParseDiagnostic>,
    regs: HashMap<String, RegRef>,
    gates: HashMap<String, usize>,
    included_qelib: bool,
}

impl State {
    fn sig(&self, name: &str) -> Option<Sig> {
        match name {
            "U" => Some(Sig { params: 3, qubits: 1 }),
            "CX" => Some(Sig { params: 0, qubits: 2 }),
            _ => self.gates.get(name).map(|&i| {
                let d = &self.ast.gate_defs[i];
                Sig { params: d.params.len(), qubits: d.qargs.len() }
            }),
        }
    }
}

pub(crate) fn parse(src: &str) -> Result<QasmAst, Vec<ParseDiagnostic>> {
    let mut st = State {
        ast: QasmAst::default(),
        diags: Vec::new(),
        regs: HashMap::new(),
        gates: HashMap::new(),
        included_qelib: false,
    };
    run_parser(&mut st, src, false);
    let State { mut ast, diags, .. } = st;
    if diags.iter().any(ParseDiagnostic::is_error) {
        Err(diags)
    } else {
        ast.warnings = diags;
        Ok(ast)
    }
}

fn run_parser(st: &mut State, src: &str, from_include: bool) {
    let toks = lex(src, &mut st.diags);
    let mut p = Parser { toks, pos: 0, st, from_include, expr_depth: 0, expr_nodes: 0 };
    p.program();
}

struct Parser<'s> {
    toks: Vec<Token>,
    pos: usize,
    st: &'s mut State,
    from_include: bool,
    expr_depth: usize,
    expr_nodes: usize,
}

/// Formal names visible inside a gate body.
struct Scope<'a> {
    params: &'a [String],
    qargs: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&mut self, span: Span, msg: impl Into<String>) -> PResult<T> {
        self.st.diags.push(ParseDiagnostic::error(span, msg));
        Err(Reported)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            let found = self.peek().describe();
            self.error(self.span(), format!("expected {what}, found {found}"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        if let Tok::Ident(name) = self.peek() {
            let name = name.clone();
            Ok((name, self.bump().span))
        } else {
            let found = self.peek().describe();
            self.error(self.span(), format!("expected {what}, found {found}"))
        }
    }

    fn int(&mut self, what: &str) -> PResult<(u64, Span)> {
        if let Tok::Int(v) = *self.peek() {
            Ok((v, self.bump().span))
        } else {
            let found = self.peek().describe();
            self.error(self.span(), format!("expected {what}, found {found}"))
        }
    }

    /// Whether the statement begun at `start` already consumed its terminating `;` or `}`.
    fn just_finished(&self, start: usize) -> bool {
        self.pos > start && matches!(self.toks[self.pos - 1].tok, Tok::Semi | Tok::RBrace)
    }

    /// Skips to the end of the current statement, treating a braced block as part of it.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    self.bump();
                    if depth <= 1 {
                        return;
                    }
                    depth -= 1;
                    continue;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Skips to the end of the current body statement without leaving the body.
    fn recover_in_body(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof | Tok::RBrace => return,
                Tok::Semi => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn program(&mut self) {
        if *self.peek() == Tok::OpenQasm {
            if self.header().is_err() {
                self.recover();
            }
        } else if !self.from_include {
            let span = self.span();
            self.st.diags.push(ParseDiagnostic::warning(span, "missing `OPENQASM 2.0;` header"));
        }
        while *self.peek() != Tok::Eof {
            let start = self.pos;
            if self.statement().is_err() && !self.just_finished(start) {
                self.recover();
            }
        }
    }

    fn header(&mut self) -> PResult<()> {
        self.bump();
        let span = self.span();
        let version = match *self.peek() {
            Tok::Real(2.0) => "2.0".to_string(),
            Tok::Int(2) => "2".to_string(),
            Tok::Real(_) | Tok::Int(_) => {
                let found = self.peek().describe();
                self.bump();
                return self.error(span, format!("unsupported OpenQASM version {found}; only 2.0 is supported"));
            }
            _ => {
                let found = self.peek().describe();
                return self.error(span, format!("expected version number, found {found}"));
            }
        };
        self.bump();
        self.expect(Tok::Semi, "`;`")?;
        self.st.ast.version = Some(version);
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let span = self.span();
        match self.peek().clone() {
            Tok::OpenQasm => self.error(span, "`OPENQASM` header must be the first statement"),
            Tok::Include => self.include(),
            Tok::Qreg => self.register(true),
            Tok::Creg => self.register(false),
            Tok::Gate => self.gate_def(false),
            Tok::Opaque => self.gate_def(true),
            Tok::Measure => self.measure(),
            Tok::Barrier => self.barrier(),
            Tok::Reset => self.error(span, "`reset` is not supported"),
            Tok::If => self.error(span, "classically controlled operations (`if`) are not supported"),
            Tok::Ident(_) => self.gate_call(),
            Tok::RBrace => {
                self.bump();
                self.error(span, "unmatched `}`")
            }
            other => self.error(span, format!("expected a statement, found {}", other.describe())),
        }
    }

    fn include(&mut self) -> PResult<()> {
        self.bump();
        let span = self.span();
        let Tok::Str(name) = self.peek().clone() else {
            let found = self.peek().describe();
            return self.error(span, format!("expected file name string, found {found}"));
        };
        self.bump();
        self.expect(Tok::Semi, "`;`")?;
        if name != "qelib1.inc" {
            return self.error(span, format!("cannot resolve include \"{name}\": only \"qelib1.inc\" is available"));
        }
        if self.st.included_qelib {
            self.st.diags.push(ParseDiagnostic::warning(span, "\"qelib1.inc\" included more than once"));
            return Ok(());
        }
        self.st.included_qelib = true;
        self.st.ast.includes.push(name);
        run_parser(self.st, QELIB1, true);
        Ok(())
    }

    fn register(&mut self, quantum: bool) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("register name")?;
        self.expect(Tok::LBracket, "`[`")?;
        let (size, size_span) = self.int("register size")?;
        self.expect(Tok::RBracket, "`]`")?;
        self.expect(Tok::Semi, "`;`")?;
        if size == 0 {
            return self.error(size_span, "register size must be at least 1");
        }
        if size > MAX_REGISTER_SIZE as u64 {
            return self.error(size_span, format!("register size {size} exceeds the limit of {MAX_REGISTER_SIZE}"));
        }
        if self.st.regs.contains_key(&name) {
            return self.error(span, format!("register `{name}` is already declared"));
        }
        let decl = RegisterDecl { name: name.clone(), size: size as usize, span };
        let reg = if quantum {
            self.st.ast.qregs.push(decl);
            RegRef::Quantum(self.st.ast.qregs.len() - 1)
        } else {
            self.st.ast.cregs.push(decl);
            RegRef::Classical(self.st.ast.cregs.len() - 1)
        };
        self.st.regs.insert(name, reg);
        Ok(())
    }

    fn name_list(&mut self, what: &str, close: Option<Tok>) -> PResult<Vec<(String, Span)>> {
        let mut out: Vec<(String, Span)> = Vec::new();
        if let Some(close) = &close {
            if self.peek() == close {
                return Ok(out);
            }
        }
        loop {
            let (name, span) = self.ident(what)?;
            if out.iter().any(|(n, _)| *n == name) {
                return self.error(span, format!("duplicate {what} `{name}`"));
            }
            out.push((name, span));
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn gate_def(&mut self, opaque: bool) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("gate name")?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            params = self.name_list("parameter name", Some(Tok::RParen))?;
            self.expect(Tok::RParen, "`)`")?;
        }
        let qargs = self.name_list("qubit argument", None)?;
        if let Some((p, s)) = params.iter().find(|(p, _)| qargs.iter().any(|(q, _)| q == p)) {
            let (p, s) = (p.clone(), *s);
            return self.error(s, format!("`{p}` is used as both a parameter and a qubit argument"));
        }
        let params: Vec<String> = params.into_iter().map(|(n, _)| n).collect();
        let qargs: Vec<String> = qargs.into_iter().map(|(n, _)| n).collect();

        let mut body = Vec::new();
        if opaque {
            self.expect(Tok::Semi, "`;`")?;
        } else {
            self.expect(Tok::LBrace, "`{`")?;
            let scope = Scope { params: &params, qargs: &qargs };
            let mut failed = false;
            while !matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                let start = self.pos;
                match self.body_op(&scope) {
                    Ok(Some(op)) => body.push(op),
                    Ok(None) => {}
                    Err(Reported) => {
                        failed = true;
                        if !self.just_finished(start) {
                            self.recover_in_body();
                        }
                    }
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
            if failed {
                return Err(Reported);
            }
        }
        if matches!(name.as_str(), "U" | "CX") || self.st.gates.contains_key(&name) {
            return self.error(span, format!("gate `{name}` is already defined"));
        }
        self.st.gates.insert(name.clone(), self.st.ast.gate_defs.len());
        self.st.ast.gate_defs.push(GateDef { name, params, qargs, body, opaque, from_include: self.from_include, span });
        Ok(())
    }

    fn body_op(&mut self, scope: &Scope<'_>) -> PResult<Option<GateOp>> {
        let span = self.span();
        if self.eat(&Tok::Barrier) {
            let _ = self.body_qargs(scope)?;
            self.expect(Tok::Semi, "`;`")?;
            return Ok(None);
        }
        let (name, name_span) = self.ident("gate name")?;
        let params = self.call_params(Some(scope))?;
        let qargs = self.body_qargs(scope)?;
        self.expect(Tok::Semi, "`;`")?;
        let Some(sig) = self.st.sig(&name) else {
            return self.error(name_span, format!("unresolved gate `{name}`"));
        };
        self.check_sig(&name, sig, params.len(), qargs.len(), name_span)?;
        for (i, a) in qargs.iter().enumerate() {
            if qargs[..i].contains(a) {
                return self.error(span, format!("qubit argument `{}` repeated in call to `{name}`", scope.qargs[*a]));
            }
        }
        Ok(Some(GateOp { name, params, qargs, span }))
    }

    fn body_qargs(&mut self, scope: &Scope<'_>) -> PResult<Vec<usize>> {
        let mut out = Vec::new();
        loop {
            let (name, span) = self.ident("qubit argument")?;
            if *self.peek() == Tok::LBracket {
                return self.error(self.span(), "indexing is not allowed inside gate bodies");
            }
            match scope.qargs.iter().position(|q| *q == name) {
                Some(i) => out.push(i),
                None => return self.error(span, format!("unresolved qubit argument `{name}`")),
            }
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn check_sig(&mut self, name: &str, sig: Sig, params: usize, qubits: usize, span: Span) -> PResult<()> {
        if params != sig.params {
            return self.error(span, format!("gate `{name}` takes {} parameter(s), {params} given", sig.params));
        }
        if qubits != sig.qubits {
            return self.error(span, format!("gate `{name}` acts on {} qubit(s), {qubits} given", sig.qubits));
        }
        Ok(())
    }

    fn call_params(&mut self, scope: Option<&Scope<'_>>) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if !self.eat(&Tok::LParen) {
            return Ok(out);
        }
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            self.expr_depth = 0;
            self.expr_nodes = 0;
            out.push(self.expr(scope)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn operand(&mut self) -> PResult<(RegRef, Option<usize>, Span)> {
        let (name, span) = self.ident("register name")?;
        let Some(reg) = self.st.regs.get(&name).copied() else {
            return self.error(span, format!("unresolved register `{name}`"));
        };
        let size = match reg {
            RegRef::Quantum(i) => self.st.ast.qregs[i].size,
            RegRef::Classical(i) => self.st.ast.cregs[i].size,
        };
        if !self.eat(&Tok::LBracket) {
            return Ok((reg, None, span));
        }
        let (index, index_span) = self.int("index")?;
        self.expect(Tok::RBracket, "`]`")?;
        if index >= size as u64 {
            return self.error(index_span, format!("index {index} out of bounds for register `{name}` of size {size}"));
        }
        Ok((reg, Some(index as usize), span))
    }

    fn quantum_operand(&mut self) -> PResult<(Operand, Span)> {
        let (reg, index, span) = self.operand()?;
        let RegRef::Quantum(reg) = reg else {
            return self.error(span, "expected a quantum register, found a classical register");
        };
        let op = match index {
            Some(index) => Operand::Bit { reg, index },
            None => Operand::Register { reg },
        };
        Ok((op, span))
    }

    fn operand_width(&self, op: Operand) -> Option<usize> {
        match op {
            Operand::Bit { .. } => None,
            Operand::Register { reg } => Some(self.st.ast.qregs[reg].size),
        }
    }

    fn gate_call(&mut self) -> PResult<()> {
        let (name, span) = self.ident("gate name")?;
        let params = self.call_params(None)?;
        let mut args = Vec::new();
        loop {
            args.push(self.quantum_operand()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Semi, "`;`")?;
        let Some(sig) = self.st.sig(&name) else {
            return self.error(span, format!("unresolved gate `{name}`"));
        };
        self.check_sig(&name, sig, params.len(), args.len(), span)?;

        let mut width: Option<usize> = None;
        for &(op, op_span) in &args {
            if let Some(w) = self.operand_width(op) {
                match width {
                    Some(prev) if prev != w => {
                        return self.error(op_span, format!("register size mismatch in broadcast: {prev} vs {w}"));
                    }
                    _ => width = Some(w),
                }
            }
        }
        let offsets = self.st.ast.qreg_offsets();
        for i in 0..width.unwrap_or(1) {
            let flat: Vec<usize> = args
                .iter()
                .map(|(op, _)| match *op {
                    Operand::Bit { reg, index } => offsets[reg] + index,
                    Operand::Register { reg } => offsets[reg] + i,
                })
                .collect();
            if let Some(j) = (1..flat.len()).find(|&j| flat[..j].contains(&flat[j])) {
                return self.error(args[j].1, format!("duplicate qubit argument in call to `{name}`"));
            }
        }
        let args = args.into_iter().map(|(op, _)| op).collect();
        self.st.ast.statements.push(Statement::Gate(GateCall { name, params, args, span }));
        Ok(())
    }

    fn measure(&mut self) -> PResult<()> {
        let span = self.bump().span;
        let (qubit, q_span) = self.quantum_operand()?;
        self.expect(Tok::Arrow, "`->`")?;
        let (reg, index, c_span) = self.operand()?;
        self.expect(Tok::Semi, "`;`")?;
        let RegRef::Classical(creg) = reg else {
            return self.error(c_span, "measurement target must be a classical register");
        };
        let clbit = match index {
            Some(index) => Operand::Bit { reg: creg, index },
            None => Operand::Register { reg: creg },
        };
        let q_width = self.operand_width(qubit);
        let c_width = match clbit {
            Operand::Bit { .. } => None,
            Operand::Register { reg } => Some(self.st.ast.cregs[reg].size),
        };
        if q_width != c_width {
            let show = |w: Option<usize>| w.map_or("a single bit".to_string(), |w| format!("{w} bits"));
            return self.error(q_span, format!("cannot measure {} into {}", show(q_width), show(c_width)));
        }
        self.st.ast.statements.push(Statement::Measure { qubit, clbit, span });
        Ok(())
    }

    fn barrier(&mut self) -> PResult<()> {
        let span = self.bump().span;
        let mut args = Vec::new();
        loop {
            args.push(self.quantum_operand()?.0);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Semi, "`;`")?;
        self.st.ast.statements.push(Statement::Barrier { args, span });
        Ok(())
    }

    fn node(&mut self) -> PResult<()> {
        self.expr_nodes += 1;
        if self.expr_nodes > MAX_EXPR_NODES {
            return self.error(self.span(), "expression is too long");
        }
        Ok(())
    }

    fn expr(&mut self, scope: Option<&Scope<'_>>) -> PResult<Expr> {
        let mut lhs = self.term(scope)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            self.node()?;
            let rhs = self.term(scope)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self, scope: Option<&Scope<'_>>) -> PResult<Expr> {
        let mut lhs = self.unary(scope)?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            self.node()?;
            let rhs = self.unary(scope)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self, scope: Option<&Scope<'_>>) -> PResult<Expr> {
        self.expr_depth += 1;
        if self.expr_depth > MAX_EXPR_DEPTH {
            return self.error(self.span(), "expression is nested too deeply");
        }
        self.node()?;
        let out = if self.eat(&Tok::Minus) {
            Expr::Neg(Box::new(self.unary(scope)?))
        } else {
            let base = self.atom(scope)?;
            if self.eat(&Tok::Caret) {
                Expr::Binary(BinOp::Pow, Box::new(base), Box::new(self.unary(scope)?))
            } else {
                base
            }
        };
        self.expr_depth -= 1;
        Ok(out)
    }

    fn atom(&mut self, scope: Option<&Scope<'_>>) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Real(v) => {
                self.bump();
                Ok(Expr::Number(v))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Number(v as f64))
            }
            Tok::Pi => {
                self.bump();
                Ok(Expr::Pi)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(scope)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let Some(f) = Func::from_name(&name) else {
                        return self.error(span, format!("unknown function `{name}`"));
                    };
                    self.bump();
                    let arg = self.expr(scope)?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match scope.and_then(|s| s.params.iter().position(|p| *p == name)) {
                    Some(i) => Ok(Expr::Param(i)),
                    None => self.error(span, format!("unresolved identifier `{name}` in expression")),
                }
            }
            other => self.error(span, format!("expected an expression, found {}", other.describe())),
        }
    }
}
