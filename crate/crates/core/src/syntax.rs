//! Concrete syntax for functor expressions and functor values.
//!
//! Functor grammar (whitespace-insensitive, loosest binding first):
//!
//! ```text
//! sum   := prod ('+' prod)*
//! prod  := comp (('x' | '×' | '*') comp)*
//! comp  := expo ('.' comp)?                  right-associative
//! expo  := atom ('^' set)*
//! atom  := 'Id' | 'Bag' | 'Pow' | set | '(' sum ')'
//!        | '+' '(' sum ')'                   one-summand coproduct
//!        | 'x' '(' sum ')'                   one-factor product
//! set   := '{' sym (',' sym)* '}' | '1' | '2'
//! ```
//!
//! `2` abbreviates `{0,1}` and `1` abbreviates `{⊥}`.
//!
//! Value encodings: `@state`, `#symbol`, `( v, … )`, `tag: v`,
//! `{ a: v, … }`, `[ elem*mult, … ]` and `{| elem, … |}`. Inside bags and
//! sets a state may be written without the `@`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::functor::{FValue, FunctorExpr, StateId, BOTTOM};

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// Characters that may appear in state names and symbols.
pub fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !"@#(),:{}[]*|=;^+>".contains(c)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str, functor_mode: bool) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let sym = match c {
            '{' => {
                chars.next();
                if chars.peek().map(|&(_, d)| d) == Some('|') {
                    chars.next();
                    Some("{|")
                } else {
                    Some("{")
                }
            }
            '|' => {
                chars.next();
                if chars.peek().map(|&(_, d)| d) == Some('}') {
                    chars.next();
                    Some("|}")
                } else {
                    return Err(syntax(pos, "stray `|`"));
                }
            }
            '}' | '(' | ')' | ',' | ':' | '[' | ']' | '*' | '@' | '#' | '+' | '^' => {
                chars.next();
                Some(match c {
                    '}' => "}",
                    '(' => "(",
                    ')' => ")",
                    ',' => ",",
                    ':' => ":",
                    '[' => "[",
                    ']' => "]",
                    '*' => "*",
                    '@' => "@",
                    '#' => "#",
                    '+' => "+",
                    _ => "^",
                })
            }
            '×' if functor_mode => {
                chars.next();
                Some("*")
            }
            '∘' if functor_mode => {
                chars.next();
                Some(".")
            }
            '.' if functor_mode => {
                chars.next();
                Some(".")
            }
            _ => None,
        };
        if let Some(sym) = sym {
            tokens.push(Token {
                tok: Tok::Sym(sym),
                pos,
            });
            continue;
        }
        if !is_name_char(c) {
            return Err(syntax(pos, format!("unexpected character `{c}`")));
        }
        let mut word = String::new();
        while let Some(&(_, d)) = chars.peek() {
            // in functor text `.` is the composition operator
            if !is_name_char(d) || (functor_mode && (d == '.' || d == '∘' || d == '×')) {
                break;
            }
            word.push(d);
            chars.next();
        }
        tokens.push(Token {
            tok: Tok::Word(word),
            pos,
        });
    }
    Ok(tokens)
}

struct Parser<'t> {
    tokens: &'t [Token],
    at: usize,
    end: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], text_len: usize) -> Self {
        Parser {
            tokens,
            at: 0,
            end: text_len,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.at + 1).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected `{s}`")))
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok(w)
            }
            _ => Err(syntax(self.pos(), "expected a name")),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.at < self.tokens.len() {
            Err(syntax(self.pos(), "unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    // ---- functor expressions

    fn sum(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.prod()?];
        while self.eat("+") {
            parts.push(self.prod()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FunctorExpr::Coproduct(parts)
        })
    }

    fn is_product_op(&self) -> bool {
        self.is_sym("*") || matches!(self.peek(), Some(Tok::Word(w)) if w == "x")
    }

    fn prod(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.comp()?];
        while self.is_product_op() {
            self.at += 1;
            parts.push(self.comp()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FunctorExpr::Product(parts)
        })
    }

    fn comp(&mut self) -> Result<FunctorExpr> {
        let outer = self.expo()?;
        if self.eat(".") {
            let inner = self.comp()?;
            Ok(FunctorExpr::compose(outer, inner))
        } else {
            Ok(outer)
        }
    }

    fn expo(&mut self) -> Result<FunctorExpr> {
        let mut base = self.atom()?;
        while self.is_sym("^") {
            self.at += 1;
            let pos = self.pos();
            let alphabet = self.set_literal()?;
            base = FunctorExpr::exponent(base, alphabet).map_err(|e| at(pos, e))?;
        }
        Ok(base)
    }

    fn set_literal(&mut self) -> Result<Vec<String>> {
        let pos = self.pos();
        if self.eat("{") {
            let mut items = Vec::new();
            if !self.is_sym("}") {
                loop {
                    items.push(self.word()?);
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect("}")?;
            if items.is_empty() {
                return Err(syntax(pos, "empty set literal"));
            }
            return Ok(items);
        }
        match self.peek() {
            Some(Tok::Word(w)) if w == "1" => {
                self.at += 1;
                Ok(vec![BOTTOM.to_string()])
            }
            Some(Tok::Word(w)) if w == "2" => {
                self.at += 1;
                Ok(vec!["0".to_string(), "1".to_string()])
            }
            _ => Err(syntax(pos, "expected a set literal")),
        }
    }

    fn atom(&mut self) -> Result<FunctorExpr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Sym("(")) => {
                self.at += 1;
                let inner = self.sum()?;
                self.expect(")")?;
                Ok(inner)
            }
            Some(Tok::Sym("+")) if self.peek2() == Some(&Tok::Sym("(")) => {
                self.at += 2;
                let inner = self.sum()?;
                self.expect(")")?;
                Ok(FunctorExpr::Coproduct(vec![inner]))
            }
            Some(Tok::Word(w)) if w == "x" && self.peek2() == Some(&Tok::Sym("(")) => {
                self.at += 2;
                let inner = self.sum()?;
                self.expect(")")?;
                Ok(FunctorExpr::Product(vec![inner]))
            }
            Some(Tok::Sym("{")) | Some(Tok::Word(_)) if self.is_set_start() => {
                let items = self.set_literal()?;
                FunctorExpr::constant(items).map_err(|e| at(pos, e))
            }
            Some(Tok::Word(w)) => {
                self.at += 1;
                match w.as_str() {
                    "Id" => Ok(FunctorExpr::Identity),
                    "Bag" => Ok(FunctorExpr::Bag),
                    "Pow" => Ok(FunctorExpr::Pow),
                    _ => Err(syntax(pos, format!("unknown functor `{w}`"))),
                }
            }
            _ => Err(syntax(pos, "expected a functor")),
        }
    }

    fn is_set_start(&self) -> bool {
        match self.peek() {
            Some(Tok::Sym("{")) => true,
            Some(Tok::Word(w)) => w == "1" || w == "2",
            _ => false,
        }
    }

    // ---- values

    fn value(&mut self, functor: &FunctorExpr, leaf: &mut dyn FnMut(&mut Self) -> Result<FValue>) -> Result<FValue> {
        let pos = self.pos();
        match functor {
            FunctorExpr::Identity => leaf(self),
            FunctorExpr::Const(symbols) => {
                self.eat("#");
                let w = self.word()?;
                if !symbols.contains(&w) {
                    return Err(syntax(
                        pos,
                        format!("`{w}` is not one of {{{}}}", symbols.join(",")),
                    ));
                }
                Ok(FValue::Const(w))
            }
            FunctorExpr::Product(fs) => {
                self.expect("(")?;
                let mut items = Vec::with_capacity(fs.len());
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        self.expect(",")?;
                    }
                    items.push(self.value(f, leaf)?);
                }
                self.expect(")")?;
                Ok(FValue::Tuple(items))
            }
            FunctorExpr::Coproduct(fs) => {
                let w = self.word()?;
                let tag: usize = w
                    .parse()
                    .map_err(|_| syntax(pos, format!("expected a summand index, found `{w}`")))?;
                let f = fs.get(tag).ok_or_else(|| {
                    syntax(pos, format!("summand index {tag} out of range 0..{}", fs.len()))
                })?;
                self.expect(":")?;
                Ok(FValue::inj(tag, self.value(f, leaf)?))
            }
            FunctorExpr::Exponent(base, alphabet) => {
                self.expect("{")?;
                let mut entries = BTreeMap::new();
                if !self.is_sym("}") {
                    loop {
                        let lpos = self.pos();
                        let a = self.word()?;
                        if !alphabet.contains(&a) {
                            return Err(syntax(lpos, format!("`{a}` is not in the alphabet")));
                        }
                        self.expect(":")?;
                        let v = self.value(base, leaf)?;
                        if entries.insert(a.clone(), v).is_some() {
                            return Err(syntax(lpos, format!("letter `{a}` given twice")));
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.expect("}")?;
                if let Some(a) = alphabet.iter().find(|a| !entries.contains_key(*a)) {
                    return Err(syntax(pos, format!("no entry for letter `{a}`")));
                }
                Ok(FValue::Map(entries))
            }
            FunctorExpr::Compose(outer, inner) => {
                self.value(outer, &mut |p: &mut Self| p.value(inner, leaf))
            }
            FunctorExpr::Bag => {
                self.expect("[")?;
                let mut entries = Vec::new();
                if !self.is_sym("]") {
                    loop {
                        let v = leaf(self)?;
                        let mut n = 1;
                        if self.eat("*") {
                            let npos = self.pos();
                            let w = self.word()?;
                            n = w
                                .parse::<u32>()
                                .ok()
                                .filter(|n| *n > 0)
                                .ok_or_else(|| syntax(npos, "multiplicity must be a positive integer"))?;
                        }
                        entries.push((v, n));
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.expect("]")?;
                Ok(FValue::bag(entries))
            }
            FunctorExpr::Pow => {
                self.expect("{|")?;
                let mut items = Vec::new();
                if !self.is_sym("|}") {
                    loop {
                        items.push(leaf(self)?);
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.expect("|}")?;
                Ok(FValue::pow(items))
            }
        }
    }
}

fn at(pos: usize, e: Error) -> Error {
    match e {
        Error::Syntax { .. } => e,
        other => syntax(pos, other.to_string()),
    }
}

fn state_leaf(p: &mut Parser<'_>) -> Result<FValue> {
    p.eat("@");
    Ok(FValue::State(StateId::new(p.word()?)))
}

/// Parses a functor expression.
pub fn parse_functor(text: &str) -> Result<FunctorExpr> {
    let tokens = lex(text, true)?;
    let mut p = Parser::new(&tokens, text.len());
    let f = p.sum()?;
    p.finish()?;
    Ok(f)
}

/// Parses a value of `functor` whose leaves are state names.
pub fn parse_value(functor: &FunctorExpr, text: &str) -> Result<FValue> {
    let tokens = lex(text, false)?;
    let mut p = Parser::new(&tokens, text.len());
    let v = p.value(functor, &mut state_leaf)?;
    p.finish()?;
    Ok(v)
}

impl FunctorExpr {
    fn precedence(&self) -> u8 {
        match self {
            FunctorExpr::Coproduct(fs) if fs.len() > 1 => 0,
            FunctorExpr::Product(fs) if fs.len() > 1 => 1,
            FunctorExpr::Compose(..) => 2,
            FunctorExpr::Exponent(..) => 3,
            _ => 4,
        }
    }

    fn write_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_bare(f)?;
            f.write_str(")")
        } else {
            self.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorExpr::Identity => f.write_str("Id"),
            FunctorExpr::Bag => f.write_str("Bag"),
            FunctorExpr::Pow => f.write_str("Pow"),
            FunctorExpr::Const(symbols) => write_set(symbols, f),
            FunctorExpr::Coproduct(fs) if fs.len() == 1 => write!(f, "+({})", fs[0]),
            FunctorExpr::Product(fs) if fs.len() == 1 => write!(f, "x({})", fs[0]),
            FunctorExpr::Coproduct(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    g.write_at(1, f)?;
                }
                Ok(())
            }
            FunctorExpr::Product(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    g.write_at(2, f)?;
                }
                Ok(())
            }
            FunctorExpr::Compose(outer, inner) => {
                outer.write_at(3, f)?;
                f.write_str(" . ")?;
                inner.write_at(2, f)
            }
            FunctorExpr::Exponent(base, alphabet) => {
                base.write_at(3, f)?;
                f.write_str("^")?;
                write_set(alphabet, f)
            }
        }
    }
}

fn write_set(symbols: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if symbols.len() == 2 && symbols[0] == "0" && symbols[1] == "1" {
        return f.write_str("2");
    }
    if symbols.len() == 1 && symbols[0] == BOTTOM {
        return f.write_str("1");
    }
    write!(f, "{{{}}}", symbols.join(","))
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_bare(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_dfa_functor() {
        let f = parse_functor("2 x (Id + 1)^{a,b}").unwrap();
        let expected = FunctorExpr::Product(vec![
            FunctorExpr::Const(vec!["0".into(), "1".into()]),
            FunctorExpr::Exponent(
                Box::new(FunctorExpr::Coproduct(vec![
                    FunctorExpr::Identity,
                    FunctorExpr::Const(vec!["⊥".into()]),
                ])),
                vec!["a".into(), "b".into()],
            ),
        ]);
        assert_eq!(f, expected);
        assert_eq!(f, FunctorExpr::partial_dfa(["a", "b"]).unwrap());
    }

    #[test]
    fn parses_atoms() {
        assert_eq!(parse_functor("Id").unwrap(), FunctorExpr::Identity);
        assert_eq!(parse_functor("Bag").unwrap(), FunctorExpr::Bag);
        assert_eq!(parse_functor(" Pow ").unwrap(), FunctorExpr::Pow);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_functor("Id x Id + 1").unwrap();
        assert_eq!(
            f,
            FunctorExpr::Coproduct(vec![
                FunctorExpr::Product(vec![FunctorExpr::Identity, FunctorExpr::Identity]),
                FunctorExpr::one(),
            ])
        );
        let g = parse_functor("Bag . Id x Id").unwrap();
        assert_eq!(
            g,
            FunctorExpr::Product(vec![
                FunctorExpr::compose(FunctorExpr::Bag, FunctorExpr::Identity),
                FunctorExpr::Identity
            ])
        );
        let h = parse_functor("Pow . Bag . Id").unwrap();
        assert_eq!(
            h,
            FunctorExpr::compose(
                FunctorExpr::Pow,
                FunctorExpr::compose(FunctorExpr::Bag, FunctorExpr::Identity)
            )
        );
        assert_eq!(parse_functor("Id × Id").unwrap(), parse_functor("Id * Id").unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_functor("Id x"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_functor("Foo"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_functor("{}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_functor("Id^{}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_functor("(Id"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_functor("{a,a}"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn singleton_components_round_trip() {
        for f in [
            FunctorExpr::Coproduct(vec![FunctorExpr::Identity]),
            FunctorExpr::Product(vec![FunctorExpr::Bag]),
        ] {
            assert_eq!(parse_functor(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn parses_values() {
        let f = parse_functor("2 x (Id + 1)^{a,b}").unwrap();
        let v = parse_value(&f, "(#1, { a: 0: @q1, b: 1: #⊥ })").unwrap();
        let expected = FValue::tuple([
            FValue::constant("1"),
            FValue::map([
                ("a", FValue::inj(0, FValue::state("q1"))),
                ("b", FValue::inj(1, FValue::bottom())),
            ]),
        ]);
        assert_eq!(v, expected);
        assert_eq!(parse_value(&f, &v.to_string()).unwrap(), v);

        let bag = parse_value(&FunctorExpr::Bag, "[q*2, @v]").unwrap();
        assert_eq!(
            bag,
            FValue::bag([(FValue::state("q"), 2), (FValue::state("v"), 1)])
        );
        assert_eq!(parse_value(&FunctorExpr::Bag, "[]").unwrap(), FValue::bag([]));
        assert_eq!(parse_value(&FunctorExpr::Pow, "{||}").unwrap(), FValue::pow([]));
        assert_eq!(
            parse_value(&FunctorExpr::Pow, "{| q, q |}").unwrap(),
            FValue::pow([FValue::state("q")])
        );
    }

    #[test]
    fn value_errors() {
        let f = parse_functor("2 x (Id + 1)^{a,b}").unwrap();
        assert!(parse_value(&f, "(#1, { a: 0: @q1 })").is_err());
        assert!(parse_value(&f, "(#3, { a: 1: #⊥, b: 1: #⊥ })").is_err());
        assert!(parse_value(&FunctorExpr::Bag, "[q*0]").is_err());
        assert!(parse_value(&FunctorExpr::Identity, "@q extra").is_err());
    }

    fn symbol() -> impl Strategy<Value = String> {
        prop_oneof![Just("a"), Just("b"), Just("c"), Just("0"), Just("1"), Just("⊥")]
            .prop_map(String::from)
    }

    fn symbols() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::btree_set(symbol(), 1..4).prop_map(|s| s.into_iter().collect())
    }

    fn functor_expr() -> impl Strategy<Value = FunctorExpr> {
        let leaf = prop_oneof![
            Just(FunctorExpr::Identity),
            Just(FunctorExpr::Bag),
            Just(FunctorExpr::Pow),
            symbols().prop_map(FunctorExpr::Const),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 1..4).prop_map(FunctorExpr::Product),
                proptest::collection::vec(inner.clone(), 1..4).prop_map(FunctorExpr::Coproduct),
                (inner.clone(), symbols())
                    .prop_map(|(b, a)| FunctorExpr::Exponent(Box::new(b), a)),
                (inner.clone(), inner).prop_map(|(o, i)| FunctorExpr::compose(o, i)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(f in functor_expr()) {
            let text = f.to_string();
            prop_assert_eq!(parse_functor(&text).unwrap(), f);
        }
    }
}
