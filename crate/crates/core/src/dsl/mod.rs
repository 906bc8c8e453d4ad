//! Text format for decision-tree models (`.rdt`).
//!
//! ```text
//! model     = "model" STRING "{" meta* strategy+ "}" ;
//! meta      = "effect_units" STRING | "currency" STRING ;
//! strategy  = "strategy" STRING "{" node "}" ;
//! node      = chance | outcome ;
//! chance    = "chance" "{" branch+ "}" ;
//! branch    = "branch" "p" "=" NUMBER [ STRING ] "->" node ;
//! outcome   = "outcome" "{" "cost" "=" NUMBER "effect" "=" NUMBER [ "label" "=" STRING ] "}" ;
//! ```
//!
//! Whitespace between tokens is free-form and `#` starts a line comment.
//! Strings are double-quoted with `\"` and `\\` escapes.
//!
//! Parsing only enforces the grammar, probability literals in `[0, 1]` and
//! unique strategy names. Whether branch probabilities sum to one is checked
//! by [`validate_tree`](crate::model::validate_tree).

mod lexer;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::model::{Branch, ChanceNode, DecisionTree, Node, OutcomeNode, Strategy};
use lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl core::error::Error for ParseError {}

/// Parses a model. On failure returns every error found; the first one is
/// always reported, later ones on a best-effort basis.
pub fn parse_model(source: &str) -> Result<DecisionTree, Vec<ParseError>> {
    let mut p = Parser {
        tokens: tokenize(source),
        pos: 0,
        errors: Vec::new(),
    };
    match p.model() {
        Ok(tree) if p.errors.is_empty() => Ok(tree),
        Ok(_) => {
            p.errors.sort_by_key(|e| (e.line, e.column));
            Err(p.errors)
        }
        Err(e) => {
            p.errors.push(e);
            p.errors.sort_by_key(|e| (e.line, e.column));
            Err(p.errors)
        }
    }
}

type PResult<T> = Result<T, ParseError>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if !matches!(t.kind, TokenKind::Eof) {
            self.pos += 1;
        }
        t
    }

    fn error_at(token: &Token, expected: &[&str]) -> ParseError {
        let message = match &token.kind {
            TokenKind::Invalid(msg) => msg.clone(),
            other => alloc::format!("unexpected {}", other.describe()),
        };
        ParseError {
            line: token.line,
            column: token.column,
            message,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<Token> {
        if self.is_keyword(kw) {
            Ok(self.advance())
        } else {
            Err(Self::error_at(self.peek(), &[&alloc::format!("`{kw}`")]))
        }
    }

    fn punct(&mut self, kind: TokenKind, what: &str) -> PResult<Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(Self::error_at(self.peek(), &[what]))
        }
    }

    fn string(&mut self) -> PResult<(String, Token)> {
        if let TokenKind::Str(s) = &self.peek().kind {
            let s = s.clone();
            Ok((s, self.advance()))
        } else {
            Err(Self::error_at(self.peek(), &["string"]))
        }
    }

    fn number(&mut self) -> PResult<(f64, Token)> {
        if let TokenKind::Number(v) = self.peek().kind {
            Ok((v, self.advance()))
        } else {
            Err(Self::error_at(self.peek(), &["number"]))
        }
    }

    /// `name = NUMBER`
    fn assignment(&mut self, name: &str) -> PResult<(f64, Token)> {
        self.keyword(name)?;
        self.punct(TokenKind::Eq, "`=`")?;
        self.number()
    }

    fn model(&mut self) -> PResult<DecisionTree> {
        self.keyword("model")?;
        let (name, _) = self.string()?;
        self.punct(TokenKind::LBrace, "`{`")?;
        let mut tree = DecisionTree::new(name, Vec::new());

        loop {
            let slot = if self.is_keyword("effect_units") {
                &mut tree.effect_units
            } else if self.is_keyword("currency") {
                &mut tree.currency
            } else {
                break;
            };
            let kw = self.advance();
            let (value, _) = self.string()?;
            if slot.is_some() {
                self.errors.push(ParseError {
                    line: kw.line,
                    column: kw.column,
                    message: alloc::format!("duplicate {}", kw.kind.describe()),
                    expected: Vec::new(),
                });
            }
            *slot = Some(value);
        }

        while self.is_keyword("strategy") {
            if let Some((s, name_tok)) = self.strategy_recovering() {
                if tree.strategies.iter().any(|o| o.name == s.name) {
                    self.errors.push(ParseError {
                        line: name_tok.line,
                        column: name_tok.column,
                        message: alloc::format!("duplicate strategy name `{}`", s.name),
                        expected: Vec::new(),
                    });
                } else {
                    tree.strategies.push(s);
                }
            }
        }
        if tree.strategies.is_empty() && self.errors.is_empty() {
            return Err(Self::error_at(
                self.peek(),
                &["`strategy`", "`effect_units`", "`currency`"],
            ));
        }
        self.punct(TokenKind::RBrace, "`strategy` or `}`")?;
        if !matches!(self.peek().kind, TokenKind::Eof) {
            return Err(Self::error_at(self.peek(), &["end of input"]));
        }
        Ok(tree)
    }

    /// Parses one strategy; on a syntax error records it and skips to the
    /// brace closing the strategy so later strategies can still be checked.
    fn strategy_recovering(&mut self) -> Option<(Strategy, Token)> {
        let start = self.pos;
        match self.strategy() {
            Ok(s) => Some(s),
            Err(e) => {
                self.errors.push(e);
                self.pos = start;
                self.skip_strategy();
                None
            }
        }
    }

    fn skip_strategy(&mut self) {
        // `strategy` STRING? `{` ... matching `}`
        self.advance();
        let mut depth = 0usize;
        loop {
            match self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    if depth == 1 {
                        self.advance();
                        return;
                    }
                    depth -= 1;
                }
                TokenKind::Ident(ref s) if depth == 0 && s == "strategy" => return,
                _ => {}
            }
            self.advance();
        }
    }

    fn strategy(&mut self) -> PResult<(Strategy, Token)> {
        self.keyword("strategy")?;
        let (name, name_tok) = self.string()?;
        self.punct(TokenKind::LBrace, "`{`")?;
        let root = self.node()?;
        self.punct(TokenKind::RBrace, "`}`")?;
        Ok((Strategy { name, root }, name_tok))
    }

    fn node(&mut self) -> PResult<Node> {
        if self.is_keyword("chance") {
            self.chance().map(Node::Chance)
        } else if self.is_keyword("outcome") {
            self.outcome().map(Node::Outcome)
        } else {
            Err(Self::error_at(self.peek(), &["`chance`", "`outcome`"]))
        }
    }

    fn chance(&mut self) -> PResult<ChanceNode> {
        self.keyword("chance")?;
        self.punct(TokenKind::LBrace, "`{`")?;
        let mut branches = Vec::new();
        while self.is_keyword("branch") {
            branches.push(self.branch()?);
        }
        if branches.is_empty() {
            return Err(Self::error_at(self.peek(), &["`branch`"]));
        }
        self.punct(TokenKind::RBrace, "`branch` or `}`")?;
        Ok(ChanceNode { branches })
    }

    fn branch(&mut self) -> PResult<Branch> {
        self.keyword("branch")?;
        let (probability, tok) = self.assignment("p")?;
        if !(0.0..=1.0).contains(&probability) {
            self.errors.push(ParseError {
                line: tok.line,
                column: tok.column,
                message: alloc::format!("probability literal out of range: {probability}"),
                expected: vec!["number in [0, 1]".into()],
            });
        }
        let label = match &self.peek().kind {
            TokenKind::Str(_) => Some(self.string()?.0),
            _ => None,
        };
        self.punct(TokenKind::Arrow, "`->`")?;
        let child = self.node()?;
        Ok(Branch {
            probability,
            label,
            child,
        })
    }

    fn outcome(&mut self) -> PResult<OutcomeNode> {
        self.keyword("outcome")?;
        self.punct(TokenKind::LBrace, "`{`")?;
        let (cost, _) = self.assignment("cost")?;
        let (effect, _) = self.assignment("effect")?;
        let label = if self.is_keyword("label") {
            self.advance();
            self.punct(TokenKind::Eq, "`=`")?;
            Some(self.string()?.0)
        } else {
            None
        };
        self.punct(TokenKind::RBrace, "`label` or `}`")?;
        Ok(OutcomeNode {
            cost,
            effect,
            label,
        })
    }
}

/// Renders a tree in the text format. The output parses back to an equal
/// tree and is byte-identical across calls.
pub fn serialize_model(tree: &DecisionTree) -> String {
    let mut out = String::new();
    let _ = write_model(&mut out, tree);
    out
}

fn write_model(out: &mut String, tree: &DecisionTree) -> fmt::Result {
    writeln!(out, "model {} {{", quote(&tree.name))?;
    if let Some(u) = &tree.effect_units {
        writeln!(out, "  effect_units {}", quote(u))?;
    }
    if let Some(c) = &tree.currency {
        writeln!(out, "  currency {}", quote(c))?;
    }
    for s in &tree.strategies {
        writeln!(out, "  strategy {} {{", quote(&s.name))?;
        indent(out, 2);
        write_node(out, &s.root, 2)?;
        out.push('\n');
        writeln!(out, "  }}")?;
    }
    writeln!(out, "}}")
}

fn write_node(out: &mut String, node: &Node, level: usize) -> fmt::Result {
    match node {
        Node::Outcome(o) => {
            write!(
                out,
                "outcome {{ cost={} effect={}",
                number(o.cost),
                number(o.effect)
            )?;
            if let Some(l) = &o.label {
                write!(out, " label={}", quote(l))?;
            }
            out.push_str(" }");
        }
        Node::Chance(c) => {
            out.push_str("chance {\n");
            for b in &c.branches {
                indent(out, level + 1);
                write!(out, "branch p={}", number(b.probability))?;
                if let Some(l) = &b.label {
                    write!(out, " {}", quote(l))?;
                }
                out.push_str(" -> ");
                write_node(out, &b.child, level + 1)?;
                out.push('\n');
            }
            indent(out, level);
            out.push('}');
        }
    }
    Ok(())
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Shortest representation that parses back to the same `f64`.
fn number(v: f64) -> String {
    alloc::format!("{v:?}")
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}
