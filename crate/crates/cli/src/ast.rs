//! Syntax tree of definition files and its canonical printer.

use std::fmt::{self, Write};

use crate::error::Pos;

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub name: String,
    pub pos: Pos,
}

impl Ident {
    pub fn new(name: &str) -> Self {
        Ident {
            name: name.into(),
            pos: Pos::default(),
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// An index slot such as `(u, v)`. Numbers parse but never resolve.
#[derive(Clone, Debug, PartialEq)]
pub enum Index {
    Name(Ident),
    Number(String, Pos),
}

impl Index {
    pub fn pos(&self) -> Pos {
        match self {
            Index::Name(i) => i.pos,
            Index::Number(_, p) => *p,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Name(i) => f.write_str(&i.name),
            Index::Number(n, _) => f.write_str(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Decimal literal as written.
    Num(String, Pos),
    Name(Ident),
    Neg(Box<Expr>, Pos),
    Bin(BinOp, Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, i32, Pos),
    Call(Func, Box<Expr>, Pos),
}

const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Num(_, p) | Expr::Neg(_, p) | Expr::Bin(.., p) | Expr::Pow(_, _, p) | Expr::Call(_, _, p) => *p,
            Expr::Name(i) => i.pos,
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Num(..) | Expr::Name(_) | Expr::Call(..) => PREC_ATOM,
            Expr::Neg(..) => PREC_UNARY,
            Expr::Bin(op, ..) => op.prec(),
            Expr::Pow(..) => PREC_POW,
        }
    }

    fn write_at(&self, min: u8, out: &mut String) {
        let paren = self.prec() < min;
        if paren {
            out.push('(');
        }
        match self {
            Expr::Num(n, _) => out.push_str(n),
            Expr::Name(i) => out.push_str(&i.name),
            Expr::Neg(a, _) => {
                out.push('-');
                a.write_at(PREC_UNARY, out);
            }
            Expr::Bin(op, a, b, _) => {
                a.write_at(op.prec(), out);
                let _ = write!(out, " {} ", op.symbol());
                b.write_at(op.prec() + 1, out);
            }
            Expr::Pow(a, k, _) => {
                a.write_at(PREC_ATOM, out);
                let _ = write!(out, "^{k}");
            }
            Expr::Call(f, a, _) => {
                out.push_str(f.name());
                out.push('(');
                a.write_at(0, out);
                out.push(')');
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_at(0, &mut s);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub i: Index,
    pub j: Index,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BivectorBody {
    Components(Vec<Component>),
    Lie(Ident),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    Gamma,
    Nu,
    Phi,
}

impl DataKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DataKind::Gamma => "gamma",
            DataKind::Nu => "nu",
            DataKind::Phi => "phi",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataEntry {
    pub kind: DataKind,
    pub component: Component,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub structure: Ident,
    pub casimir: Ident,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Chart {
        name: Ident,
        base: Vec<Ident>,
        fiber: Option<Vec<Ident>>,
    },
    Bivector {
        name: Ident,
        chart: Ident,
        body: BivectorBody,
    },
    Casimir {
        name: Ident,
        value: Expr,
        chart: Ident,
    },
    LieAlg {
        name: Ident,
        dim: usize,
        brackets: Vec<Component>,
    },
    Map {
        name: Ident,
        source: Ident,
        target: Ident,
        forward: Vec<Expr>,
        inverse: Option<Vec<Expr>>,
    },
    Product {
        name: Ident,
        first: Factor,
        second: Factor,
    },
    Data {
        name: Ident,
        chart: Ident,
        entries: Vec<DataEntry>,
    },
    Volume {
        name: Ident,
        chart: Ident,
        value: Expr,
        leaf: usize,
        positive: bool,
    },
}

impl Decl {
    pub fn name(&self) -> &Ident {
        match self {
            Decl::Chart { name, .. }
            | Decl::Bivector { name, .. }
            | Decl::Casimir { name, .. }
            | Decl::LieAlg { name, .. }
            | Decl::Map { name, .. }
            | Decl::Product { name, .. }
            | Decl::Data { name, .. }
            | Decl::Volume { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Decl::Chart { .. } => "chart",
            Decl::Bivector { .. } => "bivector",
            Decl::Casimir { .. } => "casimir",
            Decl::LieAlg { .. } => "liealg",
            Decl::Map { .. } => "map",
            Decl::Product { .. } => "product",
            Decl::Data { .. } => "data",
            Decl::Volume { .. } => "volume",
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

fn write_block(f: &mut fmt::Formatter<'_>, lines: &[String]) -> fmt::Result {
    if lines.is_empty() {
        return f.write_str("{ }");
    }
    writeln!(f, "{{")?;
    for (k, l) in lines.iter().enumerate() {
        let sep = if k + 1 < lines.len() { "," } else { "" };
        writeln!(f, "    {l}{sep}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Chart { name, base, fiber } => {
                write!(f, "chart {name} = ({}", join(base))?;
                if let Some(fib) = fiber {
                    write!(f, " | {}", join(fib))?;
                }
                f.write_str(")")
            }
            Decl::Bivector { name, chart, body } => match body {
                BivectorBody::Lie(alg) => write!(f, "bivector {name} = lie {alg} on {chart}"),
                BivectorBody::Components(cs) => {
                    write!(f, "bivector {name} on {chart} ")?;
                    let lines: Vec<String> = cs.iter().map(|c| format!("({}, {}): {}", c.i, c.j, c.value)).collect();
                    write_block(f, &lines)
                }
            },
            Decl::Casimir { name, value, chart } => write!(f, "casimir {name} = {value} on {chart}"),
            Decl::LieAlg { name, dim, brackets } => {
                write!(f, "liealg {name} dim {dim} ")?;
                let lines: Vec<String> = brackets.iter().map(|c| format!("[{}, {}] = {}", c.i, c.j, c.value)).collect();
                write_block(f, &lines)
            }
            Decl::Map {
                name,
                source,
                target,
                forward,
                inverse,
            } => {
                write!(f, "map {name}: {source} -> {target} {{ {} }}", join(forward))?;
                if let Some(inv) = inverse {
                    write!(f, " inverse {{ {} }}", join(inv))?;
                }
                Ok(())
            }
            Decl::Product { name, first, second } => write!(
                f,
                "product {name} = ({}, {}) x ({}, {})",
                first.structure, first.casimir, second.structure, second.casimir
            ),
            Decl::Data { name, chart, entries } => {
                write!(f, "data {name} on {chart} ")?;
                let lines: Vec<String> = entries
                    .iter()
                    .map(|e| format!("{}({}, {}): {}", e.kind.keyword(), e.component.i, e.component.j, e.component.value))
                    .collect();
                write_block(f, &lines)
            }
            Decl::Volume {
                name,
                chart,
                value,
                leaf,
                positive,
            } => {
                write!(f, "volume {name} on {chart} = {value} leaf {leaf}")?;
                if *positive {
                    f.write_str(" positive")?;
                }
                Ok(())
            }
        }
    }
}

/// Declarations in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DefinitionFile {
    pub decls: Vec<Decl>,
}

impl fmt::Display for DefinitionFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
