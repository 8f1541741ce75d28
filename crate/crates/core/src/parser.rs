//! Recursive-descent parser for the ASCII concrete syntax (`docs/grammar.ebnf`).
//!
//! Action operators, tightest first: prefix, hiding, `endby`/`startby`,
//! `;`, `/\`, `[]`/`|~|`, parallel/interleave.

use crate::ast::*;
use crate::diag::{Diagnostic, Pos, SourceSpan};
use crate::lexer::{lex, Tok, Token};

const MAX_DEPTH: usize = 256;

const RESERVED: &[&str] = &[
    "Skip", "Stop", "HOLE", "mu", "wait", "endby", "startby", "if", "then", "fi", "var", "true", "false", "null",
    "in", "notin", "and", "or", "not", "this", "begin", "end", "state", "process", "channel", "const", "ids",
    "safelet", "sequencer", "mission", "periodic", "aperiodic", "handler", "method", "newI", "newM", "newPR",
    "newPM",
];

pub fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

/// A parsed program together with one span per paragraph.
#[derive(Debug, Clone)]
pub struct Located {
    pub program: Program,
    pub spans: Vec<SourceSpan>,
}

pub fn parse_program(source: &str) -> Result<Program, Vec<Diagnostic>> {
    parse_program_in(source, "<input>").map(|l| l.program)
}

// Nesting is capped at MAX_DEPTH, but each level costs several frames, so
// parsing runs on a thread with a generous stack.
fn on_big_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(64 << 20)
            .spawn_scoped(s, f)
            .expect("spawn parser thread")
            .join()
            .expect("parser thread panicked")
    })
}

pub fn parse_program_in(source: &str, file: &str) -> Result<Located, Vec<Diagnostic>> {
    on_big_stack(|| program_in(source, file))
}

fn program_in(source: &str, file: &str) -> Result<Located, Vec<Diagnostic>> {
    let mut p = Parser::new(source, file)?;
    let mut paragraphs = Vec::new();
    let mut spans = Vec::new();
    while !p.at_eof() {
        let start = p.peek().start;
        let par = p.paragraph().map_err(|d| vec![d])?;
        spans.push(SourceSpan::new(file, start, p.prev_end()));
        paragraphs.push(par);
    }
    Ok(Located { program: Program { paragraphs }, spans })
}

pub fn parse_action(source: &str) -> Result<Action, Vec<Diagnostic>> {
    on_big_stack(|| {
        let mut p = Parser::new(source, "<input>")?;
        let a = p.action().map_err(|d| vec![d])?;
        p.expect_eof().map_err(|d| vec![d])?;
        Ok(a)
    })
}

pub fn parse_process(source: &str) -> Result<Process, Vec<Diagnostic>> {
    on_big_stack(|| {
        let mut p = Parser::new(source, "<input>")?;
        let a = p.process().map_err(|d| vec![d])?;
        p.expect_eof().map_err(|d| vec![d])?;
        Ok(a)
    })
}

pub fn parse_expr(source: &str) -> Result<Expr, Vec<Diagnostic>> {
    on_big_stack(|| {
        let mut p = Parser::new(source, "<input>")?;
        let e = p.expr().map_err(|d| vec![d])?;
        p.expect_eof().map_err(|d| vec![d])?;
        Ok(e)
    })
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: String,
    depth: usize,
}

impl Parser {
    fn new(source: &str, file: &str) -> Result<Self, Vec<Diagnostic>> {
        let toks = lex(source).map_err(|e| {
            vec![Diagnostic::error("E-SYNTAX", e.message, SourceSpan::point(file, e.at))]
        })?;
        Ok(Parser { toks, pos: 0, file: file.to_string(), depth: 0 })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn prev_end(&self) -> Pos {
        if self.pos == 0 {
            self.toks[0].start
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn span_here(&self) -> SourceSpan {
        let t = self.peek();
        SourceSpan::new(self.file.clone(), t.start, t.end)
    }

    fn err(&self, code: &str, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(code, msg, self.span_here())
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let found = match &self.peek().tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        };
        let code = if self.at_eof() { "E-UNTERMINATED" } else { "E-SYNTAX" };
        self.err(code, format!("expected {wanted}, found {found}"))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.err("E-SYNTAX", "nesting too deep"))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // -- paragraphs ---------------------------------------------------------

    fn paragraph(&mut self) -> PResult<Paragraph> {
        if self.eat_kw("channel") {
            let mut names = vec![self.ident()?];
            while self.eat_sym(",") {
                names.push(self.ident()?);
            }
            let mut sorts = Vec::new();
            if self.eat_sym(":") {
                sorts.push(self.sort()?);
                while self.eat_sym(".") {
                    sorts.push(self.sort()?);
                }
            }
            return Ok(Paragraph::Circus(CircusParagraph::Channel(ChannelDecl { names, sorts })));
        }
        if self.eat_kw("const") {
            let name = self.ident()?;
            let sort = if self.eat_sym(":") { self.sort()? } else { Sort::Nat };
            let value = if self.eat_sym("=") { Some(self.expr()?) } else { None };
            return Ok(Paragraph::Circus(CircusParagraph::Const { name, sort, value }));
        }
        if self.eat_kw("ids") {
            let mut names = vec![self.ident()?];
            while self.eat_sym(",") {
                names.push(self.ident()?);
            }
            return Ok(Paragraph::Circus(CircusParagraph::Ids(names)));
        }
        if self.eat_kw("process") {
            let name = self.ident()?;
            self.expect_sym("=")?;
            let params = if matches!(self.peek_at(1), Tok::Sym(":")) {
                let ps = self.decls()?;
                self.expect_sym("@")?;
                ps
            } else {
                Vec::new()
            };
            let body = self.process()?;
            return Ok(Paragraph::Circus(CircusParagraph::Process(ProcessDecl { name, params, body })));
        }
        for kw in ["safelet", "sequencer", "mission"] {
            if self.is_kw(kw) {
                self.bump();
                return self.scj_paragraph(kw);
            }
        }
        if self.eat_kw("periodic") {
            self.expect_kw("handler")?;
            return self.scj_paragraph("periodic");
        }
        if self.eat_kw("aperiodic") {
            self.expect_kw("handler")?;
            return self.scj_paragraph("aperiodic");
        }
        Err(self.unexpected("paragraph"))
    }

    fn scj_paragraph(&mut self, kind: &str) -> PResult<Paragraph> {
        let head = self.span_here();
        let name = self.ident()?;
        self.expect_sym("=")?;
        self.expect_kw("begin")?;
        let mut c = Clauses::default();
        loop {
            let at = self.span_here();
            if self.eat_kw("end") {
                break;
            }
            if self.at_eof() {
                return Err(self.err("E-UNTERMINATED", format!("missing `end` for {kind} `{name}`")));
            }
            let Tok::Ident(word) = self.peek().tok.clone() else {
                return Err(self.unexpected("clause or `end`"));
            };
            self.bump();
            match word.as_str() {
                "state" => {
                    self.expect_sym("[")?;
                    let ds = if self.is_sym("]") { Vec::new() } else { self.decls()? };
                    self.expect_sym("]")?;
                    set_once(&mut c.state, ds, &word, at)?;
                }
                "initial" => {
                    self.expect_sym("=")?;
                    let params = if matches!(self.peek_at(1), Tok::Sym(":")) {
                        let ps = self.decls()?;
                        self.expect_sym("@")?;
                        ps
                    } else {
                        Vec::new()
                    };
                    let body = self.action()?;
                    set_once(&mut c.initial, Initial { params, body }, &word, at)?;
                }
                "initialize" | "getSequencer" | "getNextMission" | "handleAsyncEvent" | "cleanup" => {
                    self.expect_sym("=")?;
                    let body = self.action()?;
                    let slot = match word.as_str() {
                        "initialize" => &mut c.initialize,
                        "getSequencer" => &mut c.get_sequencer,
                        "getNextMission" => &mut c.get_next_mission,
                        "handleAsyncEvent" => &mut c.handle,
                        _ => &mut c.cleanup,
                    };
                    set_once(slot, body, &word, at)?;
                }
                "method" => {
                    let mname = self.ident()?;
                    self.expect_sym("=")?;
                    let body = self.action()?;
                    c.methods.push(Method { name: mname, body });
                }
                "handlers" => {
                    let mut hs = Vec::new();
                    if !self.is_kw("end") && matches!(self.peek().tok, Tok::Ident(ref s) if !is_clause(s)) {
                        hs.push(self.handler_ref()?);
                        while self.eat_sym(",") {
                            hs.push(self.handler_ref()?);
                        }
                    }
                    set_once(&mut c.handlers, hs, &word, at)?;
                }
                "start" => {
                    let s = self.time_sum()?;
                    self.expect_kw("period")?;
                    let p = self.time_sum()?;
                    set_once(&mut c.timing, (s, p), &word, at)?;
                }
                other => {
                    return Err(Diagnostic::error("E-SYNTAX", format!("unknown clause `{other}` in {kind}"), at));
                }
            }
        }
        c.build(kind, name, head)
    }

    fn handler_ref(&mut self) -> PResult<HandlerRef> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            if !self.is_sym(")") {
                args.push(self.expr()?);
                while self.eat_sym(",") {
                    args.push(self.expr()?);
                }
            }
            self.expect_sym(")")?;
        }
        Ok(HandlerRef { name, args })
    }

    fn decls(&mut self) -> PResult<Vec<VarDecl>> {
        let mut out = Vec::new();
        loop {
            let name = self.ident()?;
            self.expect_sym(":")?;
            let sort = self.sort()?;
            out.push(VarDecl { name, sort });
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(out)
    }

    fn sort(&mut self) -> PResult<Sort> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(match s.as_str() {
                    "Nat" => Sort::Nat,
                    "Bool" => Sort::Bool,
                    "ID" => Sort::Id,
                    "Unit" => Sort::Unit,
                    "seq" => {
                        self.expect_kw("Nat")?;
                        Sort::SeqNat
                    }
                    _ if is_reserved(&s) => return Err(self.err("E-SYNTAX", format!("`{s}` is not a sort"))),
                    _ => Sort::Named(s),
                })
            }
            _ => Err(self.unexpected("sort")),
        }
    }

    // -- processes ----------------------------------------------------------

    pub fn process(&mut self) -> PResult<Process> {
        self.enter()?;
        let mut l = self.process_hide()?;
        loop {
            if self.is_sym("[|") {
                self.bump();
                let cs = self.chanset()?;
                self.expect_sym("|]")?;
                let r = self.process_hide()?;
                l = Process::par(l, cs, r);
            } else if self.eat_sym("|||") {
                let r = self.process_hide()?;
                l = Process::interleave(l, r);
            } else {
                break;
            }
        }
        self.leave();
        Ok(l)
    }

    fn process_hide(&mut self) -> PResult<Process> {
        let mut p = self.process_atom()?;
        while self.eat_sym("\\") {
            p = Process::hide(p, self.chanset()?);
        }
        Ok(p)
    }

    fn process_atom(&mut self) -> PResult<Process> {
        if self.eat_sym("(") {
            let p = self.process()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        if self.eat_kw("begin") {
            let mut state = Vec::new();
            if self.eat_kw("state") {
                self.expect_sym("[")?;
                if !self.is_sym("]") {
                    state = self.decls()?;
                }
                self.expect_sym("]")?;
            }
            let mut actions = Vec::new();
            while !self.is_sym("@") {
                let n = self.ident()?;
                self.expect_sym("=")?;
                actions.push((n, self.action()?));
            }
            self.expect_sym("@")?;
            let main = self.action()?;
            self.expect_kw("end")?;
            return Ok(Process::Basic(BasicProcess { state, actions, main }));
        }
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            if !self.is_sym(")") {
                args.push(self.expr()?);
                while self.eat_sym(",") {
                    args.push(self.expr()?);
                }
            }
            self.expect_sym(")")?;
        }
        Ok(Process::Inst(name, args))
    }

    fn chanset(&mut self) -> PResult<ChanSet> {
        self.expect_sym("{|")?;
        let mut out = Vec::new();
        if !self.is_sym("|}") {
            loop {
                let chan = self.ident()?;
                let mut prefix = Vec::new();
                while self.eat_sym(".") {
                    prefix.push(self.expr_atom()?);
                }
                out.push(ChanItem { chan, prefix });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("|}")?;
        Ok(out)
    }

    fn nameset(&mut self) -> PResult<Vec<String>> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        if !self.is_sym("}") {
            out.push(self.ident()?);
            while self.eat_sym(",") {
                out.push(self.ident()?);
            }
        }
        self.expect_sym("}")?;
        Ok(out)
    }

    // -- actions ------------------------------------------------------------

    pub fn action(&mut self) -> PResult<Action> {
        self.enter()?;
        let mut l = self.choice()?;
        loop {
            if self.is_sym("[|") {
                self.bump();
                let ns1 = self.nameset()?;
                self.expect_sym("|")?;
                let cs = self.chanset()?;
                self.expect_sym("|")?;
                let ns2 = self.nameset()?;
                self.expect_sym("|]")?;
                let r = self.choice()?;
                l = Action::par(l, ns1, cs, ns2, r);
            } else if self.eat_sym("|||") {
                let r = self.choice()?;
                l = Action::interleave(l, r);
            } else {
                break;
            }
        }
        self.leave();
        Ok(l)
    }

    fn choice(&mut self) -> PResult<Action> {
        let mut l = self.interrupt()?;
        loop {
            if self.eat_sym("[]") {
                l = Action::ext(l, self.interrupt()?);
            } else if self.eat_sym("|~|") {
                l = Action::int(l, self.interrupt()?);
            } else {
                break;
            }
        }
        Ok(l)
    }

    fn interrupt(&mut self) -> PResult<Action> {
        let mut l = self.seq()?;
        while self.is_sym("/\\") {
            let at = self.span_here();
            self.bump();
            let r = self.seq()?;
            let (trigger, right) = match r {
                Action::Prefix(c, k) => (c, *k),
                Action::Seq(first, rest) => match *first {
                    Action::Prefix(c, k) => (c, Action::Seq(k, rest)),
                    _ => return Err(Diagnostic::error("E-SYNTAX", "interrupt must be triggered by a communication", at)),
                },
                _ => return Err(Diagnostic::error("E-SYNTAX", "interrupt must be triggered by a communication", at)),
            };
            l = Action::interrupt(l, trigger, right);
        }
        Ok(l)
    }

    fn seq(&mut self) -> PResult<Action> {
        let mut l = self.deadline()?;
        while self.eat_sym(";") {
            l = Action::seq(l, self.deadline()?);
        }
        Ok(l)
    }

    fn deadline(&mut self) -> PResult<Action> {
        let mut l = self.hide()?;
        loop {
            if self.eat_kw("endby") {
                l = Action::endby(l, self.time_sum()?);
            } else if self.eat_kw("startby") {
                l = Action::startby(l, self.time_sum()?);
            } else {
                break;
            }
        }
        Ok(l)
    }

    fn hide(&mut self) -> PResult<Action> {
        let mut l = self.prefix()?;
        while self.eat_sym("\\") {
            l = Action::hide(l, self.chanset()?);
        }
        Ok(l)
    }

    fn starts_comm(&self) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if !is_reserved(s))
            && matches!(self.peek_at(1), Tok::Sym("->") | Tok::Sym("!") | Tok::Sym("?") | Tok::Sym("."))
    }

    fn prefix(&mut self) -> PResult<Action> {
        if self.starts_comm() {
            self.enter()?;
            let c = self.comm()?;
            self.expect_sym("->")?;
            let k = self.prefix()?;
            self.leave();
            return Ok(Action::prefix(c, k));
        }
        self.atom()
    }

    fn comm(&mut self) -> PResult<Comm> {
        let chan = self.ident()?;
        let mut items = Vec::new();
        loop {
            if self.eat_sym("!") {
                items.push(CommItem::Out(self.expr_atom()?));
            } else if self.eat_sym("?") {
                items.push(CommItem::In(self.ident()?));
            } else if self.eat_sym(".") {
                items.push(CommItem::Dot(self.expr_atom()?));
            } else {
                break;
            }
        }
        Ok(Comm { chan, items })
    }

    fn atom(&mut self) -> PResult<Action> {
        let tok = self.peek().tok.clone();
        match tok {
            Tok::Sym("(") => {
                self.bump();
                let a = self.action()?;
                self.expect_sym(")")?;
                Ok(a)
            }
            Tok::Ident(w) => match w.as_str() {
                "Skip" => {
                    self.bump();
                    Ok(Action::Skip)
                }
                "Stop" => {
                    self.bump();
                    Ok(Action::Stop)
                }
                "HOLE" => {
                    self.bump();
                    Ok(Action::Hole)
                }
                "mu" => {
                    self.bump();
                    let x = self.ident()?;
                    self.expect_sym("@")?;
                    let body = self.action()?;
                    Ok(Action::Mu(x, Box::new(body)))
                }
                "var" => {
                    self.bump();
                    let ds = self.decls()?;
                    self.expect_sym("@")?;
                    let body = self.action()?;
                    Ok(Action::VarBlock(ds, Box::new(body)))
                }
                "wait" => {
                    self.bump();
                    Ok(Action::Wait(self.time()?))
                }
                "if" => {
                    self.bump();
                    let mut alts = Vec::new();
                    loop {
                        let g = self.expr()?;
                        self.expect_kw("then")?;
                        let a = self.interrupt()?;
                        alts.push((g, a));
                        if self.eat_kw("fi") {
                            break;
                        }
                        if !self.eat_sym("[]") {
                            return Err(self.unexpected("`[]` or `fi`"));
                        }
                    }
                    Ok(Action::Guarded(alts))
                }
                "this" => {
                    self.bump();
                    self.expect_sym(".")?;
                    let var = self.ident()?;
                    self.expect_sym(":=")?;
                    let value = self.expr()?;
                    Ok(Action::Assign { this: true, var, value })
                }
                _ if is_reserved(&w) => Err(self.unexpected("action")),
                _ => {
                    self.bump();
                    if self.eat_sym(":=") {
                        let value = self.expr()?;
                        Ok(Action::Assign { this: false, var: w, value })
                    } else {
                        Ok(Action::Call(w))
                    }
                }
            },
            _ => Err(self.unexpected("action")),
        }
    }

    // -- time ---------------------------------------------------------------

    fn time(&mut self) -> PResult<TimeExpr> {
        let lo = self.time_sum()?;
        if self.eat_sym("..") {
            let hi = self.time_sum().map_err(|mut d| {
                d.code = "E-TIMEEXPR".into();
                d.message = format!("malformed time range: {}", d.message);
                d
            })?;
            return Ok(TimeExpr::range(lo, hi));
        }
        Ok(lo)
    }

    fn time_sum(&mut self) -> PResult<TimeExpr> {
        let mut l = self.time_atom()?;
        while self.eat_sym("+") {
            l = TimeExpr::Sum(Box::new(l), Box::new(self.time_atom()?));
        }
        Ok(l)
    }

    fn time_atom(&mut self) -> PResult<TimeExpr> {
        match &self.peek().tok {
            Tok::Nat(n) => {
                let n = *n;
                self.bump();
                Ok(TimeExpr::Lit(n))
            }
            Tok::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                self.bump();
                Ok(TimeExpr::Name(s))
            }
            Tok::Sym("(") => {
                self.enter()?;
                self.bump();
                let t = self.time_sum()?;
                self.expect_sym(")")?;
                self.leave();
                Ok(t)
            }
            _ => {
                let mut d = self.unexpected("time expression");
                d.code = "E-TIMEEXPR".into();
                Err(d)
            }
        }
    }

    // -- expressions --------------------------------------------------------

    pub fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let e = self.expr_bin(1);
        self.leave();
        e
    }

    fn binop_here(&self) -> Option<BinOp> {
        Some(match &self.peek().tok {
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("^") => BinOp::Concat,
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Neq,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Ident(s) if s == "in" => BinOp::In,
            Tok::Ident(s) if s == "notin" => BinOp::NotIn,
            Tok::Ident(s) if s == "and" => BinOp::And,
            Tok::Ident(s) if s == "or" => BinOp::Or,
            _ => return None,
        })
    }

    fn expr_bin(&mut self, min: u8) -> PResult<Expr> {
        let mut l = self.expr_unary()?;
        while let Some(op) = self.binop_here() {
            if op.level() < min {
                break;
            }
            self.bump();
            let r = if matches!(op, BinOp::In | BinOp::NotIn) {
                Expr::Name(self.ident()?)
            } else {
                self.expr_bin(op.level() + 1)?
            };
            l = Expr::bin(op, l, r);
            // comparisons do not chain
            if op.level() == 4 && self.binop_here().is_some_and(|o| o.level() == 4) {
                return Err(self.err("E-SYNTAX", "comparison operators do not associate"));
            }
        }
        Ok(l)
    }

    fn expr_unary(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            self.enter()?;
            let e = self.expr_unary()?;
            self.leave();
            return Ok(Expr::Not(Box::new(e)));
        }
        self.expr_atom()
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        let tok = self.peek().tok.clone();
        match tok {
            Tok::Nat(n) => {
                self.bump();
                Ok(Expr::Nat(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("<") => {
                self.bump();
                let mut xs = Vec::new();
                if !self.is_sym(">") {
                    self.enter()?;
                    xs.push(self.expr_bin(5)?);
                    while self.eat_sym(",") {
                        xs.push(self.expr_bin(5)?);
                    }
                    self.leave();
                }
                self.expect_sym(">")?;
                Ok(Expr::SeqLit(xs))
            }
            Tok::Ident(w) => {
                match w.as_str() {
                    "true" => {
                        self.bump();
                        Ok(Expr::Bool(true))
                    }
                    "false" => {
                        self.bump();
                        Ok(Expr::Bool(false))
                    }
                    "null" => {
                        self.bump();
                        Ok(Expr::Null)
                    }
                    "this" => {
                        self.bump();
                        self.expect_sym(".")?;
                        Ok(Expr::Field(self.ident()?))
                    }
                    _ => {
                        if let Some(kind) = NewKind::from_keyword(&w) {
                            self.bump();
                            let class = self.ident()?;
                            self.expect_sym("(")?;
                            let mut args = Vec::new();
                            if !self.is_sym(")") {
                                args.push(self.expr()?);
                                while self.eat_sym(",") {
                                    args.push(self.expr()?);
                                }
                            }
                            self.expect_sym(")")?;
                            return Ok(Expr::New { kind, class, args });
                        }
                        Ok(Expr::Name(self.ident()?))
                    }
                }
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

fn is_clause(s: &str) -> bool {
    matches!(
        s,
        "state" | "initial" | "initialize" | "getSequencer" | "getNextMission" | "handleAsyncEvent" | "cleanup"
            | "method" | "handlers" | "start" | "end"
    )
}

fn set_once<T>(slot: &mut Option<T>, v: T, what: &str, at: SourceSpan) -> PResult<()> {
    if slot.is_some() {
        return Err(Diagnostic::error("E-SYNTAX", format!("duplicate `{what}` clause"), at));
    }
    *slot = Some(v);
    Ok(())
}

#[derive(Default)]
struct Clauses {
    state: Option<Vec<VarDecl>>,
    initial: Option<Initial>,
    initialize: Option<Action>,
    get_sequencer: Option<Action>,
    get_next_mission: Option<Action>,
    handle: Option<Action>,
    cleanup: Option<Action>,
    methods: Vec<Method>,
    handlers: Option<Vec<HandlerRef>>,
    timing: Option<(TimeExpr, TimeExpr)>,
}

impl Clauses {
    fn build(self, kind: &str, name: String, head: SourceSpan) -> PResult<Paragraph> {
        let missing = |what: &str| {
            Diagnostic::error("E-METH", format!("{kind} `{name}` is missing mandatory `{what}`"), head.clone())
        };
        let stray = |what: &str, present: bool| -> PResult<()> {
            if present {
                Err(Diagnostic::error("E-SYNTAX", format!("`{what}` is not allowed in a {kind}"), head.clone()))
            } else {
                Ok(())
            }
        };
        let state = self.state.unwrap_or_default();
        Ok(match kind {
            "safelet" => {
                stray("initial", self.initial.is_some())?;
                stray("getNextMission", self.get_next_mission.is_some())?;
                stray("handleAsyncEvent", self.handle.is_some())?;
                stray("cleanup", self.cleanup.is_some())?;
                stray("handlers", self.handlers.is_some())?;
                stray("start", self.timing.is_some())?;
                let initialize = self.initialize.ok_or_else(|| missing("initialize"))?;
                let get_sequencer = self.get_sequencer.ok_or_else(|| missing("getSequencer"))?;
                Paragraph::Safelet(SafeletDecl { name, state, methods: self.methods, initialize, get_sequencer })
            }
            "sequencer" => {
                stray("initialize", self.initialize.is_some())?;
                stray("getSequencer", self.get_sequencer.is_some())?;
                stray("handleAsyncEvent", self.handle.is_some())?;
                stray("cleanup", self.cleanup.is_some())?;
                stray("handlers", self.handlers.is_some())?;
                stray("start", self.timing.is_some())?;
                let get_next_mission = self.get_next_mission.ok_or_else(|| missing("getNextMission"))?;
                Paragraph::Sequencer(SequencerDecl {
                    name,
                    state,
                    initial: self.initial,
                    methods: self.methods,
                    get_next_mission,
                })
            }
            "mission" => {
                stray("getSequencer", self.get_sequencer.is_some())?;
                stray("getNextMission", self.get_next_mission.is_some())?;
                stray("handleAsyncEvent", self.handle.is_some())?;
                stray("start", self.timing.is_some())?;
                let initialize = self.initialize.ok_or_else(|| missing("initialize"))?;
                Paragraph::Mission(MissionDecl {
                    name,
                    state,
                    initial: self.initial,
                    methods: self.methods,
                    initialize,
                    handlers: self.handlers.unwrap_or_default(),
                    cleanup: self.cleanup.unwrap_or(Action::Skip),
                })
            }
            "periodic" => {
                stray("initialize", self.initialize.is_some())?;
                stray("getSequencer", self.get_sequencer.is_some())?;
                stray("getNextMission", self.get_next_mission.is_some())?;
                stray("cleanup", self.cleanup.is_some())?;
                stray("handlers", self.handlers.is_some())?;
                let handle = self.handle.ok_or_else(|| missing("handleAsyncEvent"))?;
                let (start, period) = self.timing.ok_or_else(|| missing("start/period"))?;
                Paragraph::Periodic(PeriodicHandlerDecl {
                    name,
                    start,
                    period,
                    state,
                    initial: self.initial,
                    methods: self.methods,
                    handle,
                })
            }
            _ => {
                stray("initialize", self.initialize.is_some())?;
                stray("getSequencer", self.get_sequencer.is_some())?;
                stray("getNextMission", self.get_next_mission.is_some())?;
                stray("cleanup", self.cleanup.is_some())?;
                stray("handlers", self.handlers.is_some())?;
                stray("start", self.timing.is_some())?;
                let handle = self.handle.ok_or_else(|| missing("handleAsyncEvent"))?;
                Paragraph::Aperiodic(AperiodicHandlerDecl {
                    name,
                    state,
                    initial: self.initial,
                    methods: self.methods,
                    handle,
                })
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_program() {
        assert_eq!(parse_program("").unwrap(), Program::default());
        assert_eq!(parse_program("  -- only a comment\n").unwrap(), Program::default());
    }

    #[test]
    fn simple_actions() {
        assert_eq!(parse_action("Skip").unwrap(), Action::Skip);
        assert_eq!(
            parse_action("mu X @ c -> X").unwrap(),
            Action::mu("X", Action::event("c", Action::call("X")))
        );
    }

    #[test]
    fn precedence() {
        // prefix binds tighter than sequence, sequence tighter than choice
        let a = parse_action("a -> Skip ; b -> Skip [] c -> Skip").unwrap();
        let want = Action::ext(
            Action::seq(Action::event("a", Action::Skip), Action::event("b", Action::Skip)),
            Action::event("c", Action::Skip),
        );
        assert_eq!(a, want);
        let d = parse_action("a -> Skip endby 3 ; Skip").unwrap();
        assert_eq!(d, Action::seq(Action::endby(Action::event("a", Action::Skip), TimeExpr::Lit(3)), Action::Skip));
    }

    #[test]
    fn s_anchor_handle_async_event() {
        let a = parse_action("(input?x -> Skip) startby ID ; setBuffer!(buffer ^ <x>) -> release -> wait 0..PTB")
            .unwrap();
        let input = Action::prefix(Comm::new("input", vec![CommItem::In("x".into())]), Action::Skip);
        let set = Comm::new(
            "setBuffer",
            vec![CommItem::Out(Expr::bin(
                BinOp::Concat,
                Expr::name("buffer"),
                Expr::SeqLit(vec![Expr::name("x")]),
            ))],
        );
        let want = Action::seq(
            Action::startby(input, TimeExpr::name("ID")),
            Action::prefix(
                set,
                Action::event("release", Action::Wait(TimeExpr::range(TimeExpr::Lit(0), TimeExpr::name("PTB")))),
            ),
        );
        assert_eq!(a, want);
    }

    #[test]
    fn interrupt_and_parallel() {
        let a = parse_action("(mu Y @ Y) /\\ done!id -> Skip").unwrap();
        assert!(matches!(a, Action::Interrupt { ref trigger, .. } if trigger.chan == "done"));
        let p = parse_action("a -> Skip [| {x} | {| a, b.id |} | {} |] a -> Skip").unwrap();
        match p {
            Action::Par { ns1, cs, ns2, .. } => {
                assert_eq!(ns1, vec!["x".to_string()]);
                assert!(ns2.is_empty());
                assert_eq!(cs[1], ChanItem::with_prefix("b", vec![Expr::name("id")]));
            }
            _ => panic!("not a parallel"),
        }
    }

    #[test]
    fn handler_without_body_is_rejected() {
        let d = parse_program("periodic handler H = begin end").unwrap_err();
        assert_eq!(d[0].code, "E-METH");
        assert!(d[0].message.contains("handleAsyncEvent"));
    }

    #[test]
    fn unterminated_and_malformed() {
        let d = parse_program("safelet S = begin initialize = Skip").unwrap_err();
        assert_eq!(d[0].code, "E-UNTERMINATED");
        let d = parse_action("wait 0..").unwrap_err();
        assert_eq!(d[0].code, "E-TIMEEXPR");
        let d = parse_action("a -> ").unwrap_err();
        assert!(d[0].span.start.line >= 1);
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = "(".repeat(5000) + "Skip" + &")".repeat(5000);
        assert!(parse_action(&src).is_err());
    }
}
