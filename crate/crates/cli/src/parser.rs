//! Recursive-descent parser for definition files.
//!
//! ```text
//! file     := decl*
//! decl     := chart | bivector | casimir | liealg | map | product | data | volume
//! chart    := "chart" NAME "=" "(" names ("|" names)? ")"
//! bivector := "bivector" NAME ("on" NAME "{" comps "}" | "=" "lie" NAME "on" NAME)
//! casimir  := "casimir" NAME "=" expr "on" NAME
//! liealg   := "liealg" NAME "dim" INT "{" ("[" idx "," idx "]" "=" expr),* "}"
//! map      := "map" NAME ":" NAME "->" NAME "{" exprs "}" ("inverse" "{" exprs "}")?
//! product  := "product" NAME "=" "(" NAME "," NAME ")" "x" "(" NAME "," NAME ")"
//! data     := "data" NAME "on" NAME "{" (("gamma"|"nu"|"phi") "(" idx "," idx ")" ":" expr),* "}"
//! volume   := "volume" NAME "on" NAME "=" expr "leaf" INT "positive"?
//! comps    := ("(" idx "," idx ")" ":" expr),*
//! expr     := term (("+"|"-") term)*
//! term     := unary (("*"|"/") unary)*
//! unary    := "-" unary | power
//! power    := atom ("^" "-"? INT)?
//! atom     := NUMBER | NAME | ("exp"|"ln") "(" expr ")" | "(" expr ")"
//! ```
//!
//! Keywords are contextual, so `x` and `dim` stay usable as names.

use crate::ast::*;
use crate::error::{Diagnostic, Phase, Pos};
use crate::lexer::{tokenize, Tok, Token};

const DECL_KEYWORDS: [&str; 8] = ["chart", "bivector", "casimir", "liealg", "map", "product", "data", "volume"];

/// Words that end an expression and so cannot name a coordinate.
pub const RESERVED: [&str; 11] = [
    "on", "leaf", "inverse", "chart", "bivector", "casimir", "liealg", "map", "product", "data", "volume",
];

pub fn parse(file: &str, src: &str) -> Result<DefinitionFile, Diagnostic> {
    let tokens = tokenize(file, src)?;
    let mut p = Parser {
        file,
        tokens,
        at: 0,
    };
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(DefinitionFile { decls })
}

/// Parses a single expression, e.g. a command-line argument.
pub fn parse_expr(file: &str, src: &str) -> Result<Expr, Diagnostic> {
    let tokens = tokenize(file, src)?;
    let mut p = Parser {
        file,
        tokens,
        at: 0,
    };
    let e = p.expr()?;
    p.expect(Tok::Eof, &["end of input"])?;
    Ok(e)
}

struct Parser<'a> {
    file: &'a str,
    tokens: Vec<Token>,
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error_at(&self, pos: Pos, message: String, expected: &[&str]) -> Diagnostic {
        Diagnostic {
            file: self.file.into(),
            phase: Phase::Syntax,
            pos,
            message,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        self.error_at(self.pos(), format!("unexpected {}", self.peek().describe()), expected)
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<Pos, Diagnostic> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn punct(&mut self, tok: Tok) -> Result<Pos, Diagnostic> {
        let sym = format!("`{}`", tok.symbol());
        self.expect(tok, &[sym.as_str()])
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, Diagnostic> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            let want = format!("`{kw}`");
            Err(self.unexpected(&[want.as_str()]))
        }
    }

    fn ident(&mut self) -> Result<Ident, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let pos = self.bump().pos;
                Ok(Ident { name, pos })
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn integer(&mut self) -> Result<(usize, Pos), Diagnostic> {
        match self.peek().clone() {
            Tok::Number(n) => {
                let pos = self.pos();
                let v = n
                    .parse::<usize>()
                    .map_err(|_| self.error_at(pos, format!("`{n}` is not a non-negative integer"), &["integer"]))?;
                self.bump();
                Ok((v, pos))
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn decl(&mut self) -> Result<Decl, Diagnostic> {
        let kw = match self.peek() {
            Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => {
                let want: Vec<String> = DECL_KEYWORDS.iter().map(|k| format!("`{k}`")).collect();
                let want: Vec<&str> = want.iter().map(String::as_str).collect();
                return Err(self.unexpected(&want));
            }
        };
        self.bump();
        match kw.as_str() {
            "chart" => self.chart(),
            "bivector" => self.bivector(),
            "casimir" => self.casimir(),
            "liealg" => self.liealg(),
            "map" => self.map(),
            "product" => self.product(),
            "data" => self.data(),
            _ => self.volume(),
        }
    }

    fn names(&mut self) -> Result<Vec<Ident>, Diagnostic> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn chart(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.punct(Tok::Equals)?;
        self.punct(Tok::LParen)?;
        let base = self.names()?;
        let fiber = if self.eat(&Tok::Bar) { Some(self.names()?) } else { None };
        if fiber.is_none() {
            self.expect(Tok::RParen, &["`,`", "`|`", "`)`"])?;
        } else {
            self.expect(Tok::RParen, &["`,`", "`)`"])?;
        }
        Ok(Decl::Chart { name, base, fiber })
    }

    fn index(&mut self) -> Result<Index, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(_) => Ok(Index::Name(self.ident()?)),
            Tok::Number(n) => Ok(Index::Number(n, self.bump().pos)),
            _ => Err(self.unexpected(&["coordinate name"])),
        }
    }

    fn index_pair(&mut self, open: Tok, close: Tok) -> Result<(Index, Index), Diagnostic> {
        self.punct(open)?;
        let i = self.index()?;
        self.punct(Tok::Comma)?;
        let j = self.index()?;
        self.punct(close)?;
        Ok((i, j))
    }

    /// `{ item, item, ... }` with an optional trailing comma.
    fn block<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, Diagnostic>, first: &[&str]) -> Result<Vec<T>, Diagnostic> {
        self.punct(Tok::LBrace)?;
        let mut out = Vec::new();
        loop {
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::RBrace, &["`,`", "`}`"])?;
                return Ok(out);
            }
            if *self.peek() != Tok::RBrace && !self.starts_item(first) {
                let mut want: Vec<&str> = first.to_vec();
                want.push("`}`");
                return Err(self.unexpected(&want));
            }
        }
    }

    fn starts_item(&self, first: &[&str]) -> bool {
        first.iter().any(|f| match *f {
            "`(`" => *self.peek() == Tok::LParen,
            "`[`" => *self.peek() == Tok::LBracket,
            kw => matches!(self.peek(), Tok::Ident(s) if format!("`{s}`") == kw),
        })
    }

    fn component(&mut self) -> Result<Component, Diagnostic> {
        let (i, j) = self.index_pair(Tok::LParen, Tok::RParen)?;
        self.punct(Tok::Colon)?;
        let value = self.expr()?;
        Ok(Component { i, j, value })
    }

    fn bivector(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        if self.eat(&Tok::Equals) {
            self.keyword("lie")?;
            let alg = self.ident()?;
            self.keyword("on")?;
            let chart = self.ident()?;
            return Ok(Decl::Bivector {
                name,
                chart,
                body: BivectorBody::Lie(alg),
            });
        }
        if !self.is_keyword("on") {
            return Err(self.unexpected(&["`on`", "`=`"]));
        }
        self.bump();
        let chart = self.ident()?;
        let comps = self.block(Self::component, &["`(`"])?;
        Ok(Decl::Bivector {
            name,
            chart,
            body: BivectorBody::Components(comps),
        })
    }

    fn casimir(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.punct(Tok::Equals)?;
        let value = self.expr()?;
        self.keyword("on")?;
        let chart = self.ident()?;
        Ok(Decl::Casimir { name, value, chart })
    }

    fn liealg(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.keyword("dim")?;
        let (dim, _) = self.integer()?;
        let brackets = self.block(
            |p| {
                let (i, j) = p.index_pair(Tok::LBracket, Tok::RBracket)?;
                p.punct(Tok::Equals)?;
                let value = p.expr()?;
                Ok(Component { i, j, value })
            },
            &["`[`"],
        )?;
        Ok(Decl::LieAlg { name, dim, brackets })
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, Diagnostic> {
        self.punct(Tok::LBrace)?;
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        self.expect(Tok::RBrace, &["`,`", "`}`"])?;
        Ok(out)
    }

    fn map(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.punct(Tok::Colon)?;
        let source = self.ident()?;
        self.punct(Tok::Arrow)?;
        let target = self.ident()?;
        let forward = self.expr_list()?;
        let inverse = if self.is_keyword("inverse") {
            self.bump();
            Some(self.expr_list()?)
        } else {
            None
        };
        Ok(Decl::Map {
            name,
            source,
            target,
            forward,
            inverse,
        })
    }

    fn factor(&mut self) -> Result<Factor, Diagnostic> {
        self.punct(Tok::LParen)?;
        let structure = self.ident()?;
        self.punct(Tok::Comma)?;
        let casimir = self.ident()?;
        self.punct(Tok::RParen)?;
        Ok(Factor { structure, casimir })
    }

    fn product(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.punct(Tok::Equals)?;
        let first = self.factor()?;
        self.keyword("x")?;
        let second = self.factor()?;
        Ok(Decl::Product { name, first, second })
    }

    fn data(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.keyword("on")?;
        let chart = self.ident()?;
        let entries = self.block(
            |p| {
                let kind = match p.peek() {
                    Tok::Ident(s) if s == "gamma" => DataKind::Gamma,
                    Tok::Ident(s) if s == "nu" => DataKind::Nu,
                    Tok::Ident(s) if s == "phi" => DataKind::Phi,
                    _ => return Err(p.unexpected(&["`gamma`", "`nu`", "`phi`"])),
                };
                p.bump();
                let component = p.component()?;
                Ok(DataEntry { kind, component })
            },
            &["`gamma`", "`nu`", "`phi`"],
        )?;
        Ok(Decl::Data { name, chart, entries })
    }

    fn volume(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.ident()?;
        self.keyword("on")?;
        let chart = self.ident()?;
        self.punct(Tok::Equals)?;
        let value = self.expr()?;
        self.keyword("leaf")?;
        let (leaf, _) = self.integer()?;
        let positive = if self.is_keyword("positive") {
            self.bump();
            true
        } else {
            false
        };
        Ok(Decl::Volume {
            name,
            chart,
            value,
            leaf,
            positive,
        })
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.operand(pos, Self::term)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.operand(pos, Self::unary)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    /// Parses the right operand of the operator at `op`, reporting a
    /// missing operand at the operator itself.
    fn operand(&mut self, op: Pos, f: fn(&mut Self) -> Result<Expr, Diagnostic>) -> Result<Expr, Diagnostic> {
        if self.starts_operand() {
            f(self)
        } else {
            Err(self.dangling(op))
        }
    }

    fn starts_operand(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !RESERVED.contains(&s.as_str()),
            t => matches!(t, Tok::Number(_) | Tok::LParen | Tok::Minus),
        }
    }

    fn dangling(&self, op: Pos) -> Diagnostic {
        self.error_at(
            op,
            format!("operator has no right operand (found {})", self.peek().describe()),
            &["number", "identifier", "`(`", "`-`"],
        )
    }

    fn unary(&mut self) -> Result<Expr, Diagnostic> {
        if *self.peek() == Tok::Minus {
            let pos = self.bump().pos;
            let a = self.operand(pos, Self::unary)?;
            return Ok(Expr::Neg(Box::new(a), pos));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Diagnostic> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let pos = self.bump().pos;
        let negative = self.eat(&Tok::Minus);
        let Tok::Number(n) = self.peek().clone() else {
            return Err(if negative { self.unexpected(&["integer"]) } else { self.dangling_exponent(pos) });
        };
        let k: i32 = n
            .parse()
            .map_err(|_| self.error_at(self.pos(), format!("exponent `{n}` is not an integer"), &["integer"]))?;
        self.bump();
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }, pos))
    }

    fn dangling_exponent(&self, op: Pos) -> Diagnostic {
        self.error_at(
            op,
            format!("`^` needs an integer exponent (found {})", self.peek().describe()),
            &["integer", "`-`"],
        )
    }

    fn atom(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek().clone() {
            Tok::Number(n) => Ok(Expr::Num(n, self.bump().pos)),
            Tok::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                let pos = self.bump().pos;
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    _ => None,
                };
                match func {
                    Some(f) if *self.peek() == Tok::LParen => {
                        self.bump();
                        let a = self.expr()?;
                        self.expect(Tok::RParen, &["`)`"])?;
                        Ok(Expr::Call(f, Box::new(a), pos))
                    }
                    _ => Ok(Expr::Name(Ident { name, pos })),
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, &["`)`", "operator"])?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["number", "identifier", "`(`", "`-`"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(line: usize, col: usize) -> (usize, usize) {
        (line, col)
    }

    #[test]
    fn dangling_operator_points_at_operator() {
        let e = parse("m.def", "bivector pi on M { (0,1): x^").unwrap_err();
        assert_eq!(e.phase, Phase::Syntax);
        assert_eq!((e.pos.line, e.pos.col), pos(1, 28));
        assert!(e.expected.contains(&"integer".to_string()));
        let e = parse("m.def", "casimir f = x +\n on M").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), pos(1, 15));
    }

    #[test]
    fn precedence_and_printing() {
        let e = parse_expr("t", "-x^2 + 3*(y - z)/2 - exp(-z)").unwrap();
        assert_eq!(e.to_string(), "-x^2 + 3 * (y - z) / 2 - exp(-z)");
        let e2 = parse_expr("t", &e.to_string()).unwrap();
        assert_eq!(e, e2);
        let r = parse_expr("t", "a - (b - c)").unwrap();
        assert_eq!(r.to_string(), "a - (b - c)");
        let p = parse_expr("t", "(1 + z)^-1").unwrap();
        assert_eq!(p.to_string(), "(1 + z)^-1");
    }

    #[test]
    fn declarations() {
        let src = "chart M = (u, v | z)\n\
                   bivector p on M { (u, v): 1/(1 + z), }\n\
                   liealg g dim 3 { [e1, e2] = e3 }\n\
                   product w = (a, f) x (b, g)\n\
                   volume vol on R = 4*pi*r leaf 2 positive\n";
        let f = parse("t", src).unwrap();
        assert_eq!(f.decls.len(), 5);
        assert_eq!(parse("t", &f.to_string()).unwrap(), f);
    }

    #[test]
    fn unknown_declaration() {
        let e = parse("t", "\n  chrat M = (u)").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), pos(2, 3));
        assert!(e.expected.iter().any(|s| s == "`chart`"));
    }
}
