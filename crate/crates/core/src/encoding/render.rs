//! Source-like rendering of tests and the `.tests` suite format.
//!
//! A suite file starts with a header naming the subject and the seed, then
//! holds one block per test:
//!
//! ```text
//! subject Fraction
//! seed 42
//!
//! test 0 {
//!     Fraction v0 = new Fraction(2, 3);
//!     double v1 = v0.pow(2.0);
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use super::testcase::{Arg, Statement, TestCase};
use super::EncodingError;
use crate::lang::lexer::{tokenize, Tok, Token};
use crate::lang::{Literal, TypeTag, TypedUnit};

/// Variable names per position (`None` for statements defining nothing).
fn var_names(test: &TestCase) -> Vec<Option<String>> {
    let mut next = 0;
    test.statements()
        .iter()
        .map(|s| {
            s.value_type().map(|_| {
                next += 1;
                format!("v{}", next - 1)
            })
        })
        .collect()
}

/// One line per statement.
pub fn render_lines(test: &TestCase) -> Vec<String> {
    let names = var_names(test);
    let name = |p: usize| {
        names
            .get(p)
            .cloned()
            .flatten()
            .unwrap_or_else(|| "<undefined>".to_string())
    };
    let args = |args: &[Arg]| {
        args.iter()
            .map(|a| match a {
                Arg::Literal(l) => l.to_string(),
                Arg::Ref(p) => name(*p),
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    test.statements()
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            Statement::Primitive { ty, value } => format!("{ty} {} = {value};", name(i)),
            Statement::Construct { callee, args: a } => format!(
                "{} {} = new {}({});",
                callee.owner,
                name(i),
                callee.owner,
                args(a)
            ),
            Statement::Invoke {
                receiver,
                callee,
                args: a,
            } => {
                let call = format!("{}.{}({});", name(*receiver), callee.name, args(a));
                match &callee.ret {
                    Some(ty) => format!("{ty} {} = {call}", name(i)),
                    None => call,
                }
            }
        })
        .collect()
}

pub fn render(test: &TestCase) -> String {
    let mut out = render_lines(test).join("\n");
    out.push('\n');
    out
}

/// A parsed `.tests` file.
#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub subject: String,
    pub seed: u64,
    pub tests: Vec<TestCase>,
}

pub fn render_suite(subject: &str, seed: u64, tests: &[TestCase]) -> String {
    let mut out = format!("subject {subject}\nseed {seed}\n");
    for (i, t) in tests.iter().enumerate() {
        let _ = write!(out, "\ntest {i} {{\n");
        for line in render_lines(t) {
            let _ = writeln!(out, "    {line}");
        }
        out.push_str("}\n");
    }
    out
}

struct SuiteParser<'a> {
    toks: Vec<Token>,
    pos: usize,
    unit: &'a TypedUnit,
}

fn err(line: u32, message: impl Into<String>) -> EncodingError {
    EncodingError::Parse {
        line,
        message: message.into(),
    }
}

impl<'a> SuiteParser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn line(&self) -> u32 {
        self.toks[self.pos].span.line
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn punct(&mut self, p: &str) -> Result<(), EncodingError> {
        match self.next() {
            Tok::Punct(q) if q == p => Ok(()),
            other => Err(err(self.line(), format!("expected `{p}`, found {}", other.describe()))),
        }
    }

    fn ident(&mut self) -> Result<String, EncodingError> {
        match self.next() {
            Tok::Ident(s) => Ok(s),
            other => Err(err(self.line(), format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), EncodingError> {
        let w = self.ident()?;
        if w == kw {
            Ok(())
        } else {
            Err(err(self.line(), format!("expected `{kw}`, found `{w}`")))
        }
    }

    fn number(&mut self) -> Result<u64, EncodingError> {
        match self.next() {
            Tok::Int(v) => Ok(v),
            other => Err(err(self.line(), format!("expected number, found {}", other.describe()))),
        }
    }

    fn type_tag(&self, name: &str) -> Result<TypeTag, EncodingError> {
        if let Some(t) = TypeTag::from_keyword(name) {
            return Ok(t);
        }
        self.unit
            .unit()
            .subject_index(name)
            .map(|_| TypeTag::Subject(name.to_string()))
            .ok_or_else(|| err(self.line(), format!("unknown type `{name}`")))
    }

    fn literal(&mut self, ty: &TypeTag) -> Result<Literal, EncodingError> {
        let line = self.line();
        let negative = matches!(self.peek(), Tok::Punct("-"));
        if negative {
            self.next();
        }
        let bad = |t: &Tok| err(line, format!("expected {ty} literal, found {}", t.describe()));
        let tok = self.next();
        let lit = match (ty, &tok) {
            (TypeTag::Int, Tok::Int(v)) => {
                let v = if negative { -(*v as i128) } else { *v as i128 };
                Literal::Int(i32::try_from(v).map_err(|_| bad(&tok))?)
            }
            (TypeTag::Long, Tok::Long(v)) => {
                let v = if negative { -(*v as i128) } else { *v as i128 };
                Literal::Long(i64::try_from(v).map_err(|_| bad(&tok))?)
            }
            (TypeTag::Double, Tok::Double(v)) => Literal::Double(if negative { -v } else { *v }),
            (TypeTag::Double, Tok::Ident(w)) if w == "NaN" || w == "inf" => {
                let v = if w == "NaN" { f64::NAN } else { f64::INFINITY };
                Literal::Double(if negative { -v } else { v })
            }
            (TypeTag::Boolean, Tok::Ident(w)) if !negative && (w == "true" || w == "false") => {
                Literal::Bool(w == "true")
            }
            (TypeTag::Char, Tok::Char(c)) if !negative => Literal::Char(*c),
            (TypeTag::Str, Tok::Str(s)) if !negative => Literal::Str(s.clone()),
            _ => return Err(bad(&tok)),
        };
        Ok(lit)
    }

    fn args(
        &mut self,
        params: &[TypeTag],
        vars: &BTreeMap<String, usize>,
    ) -> Result<Vec<Arg>, EncodingError> {
        self.punct("(")?;
        let mut out = Vec::new();
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                self.punct(",")?;
            }
            let is_var = matches!(self.peek(), Tok::Ident(w) if vars.contains_key(w));
            if is_var {
                let name = self.ident()?;
                out.push(Arg::Ref(vars[&name]));
            } else {
                out.push(Arg::Literal(self.literal(p)?));
            }
        }
        self.punct(")")?;
        Ok(out)
    }

    fn var(&self, vars: &BTreeMap<String, usize>, name: &str) -> Result<usize, EncodingError> {
        vars.get(name)
            .copied()
            .ok_or_else(|| err(self.line(), format!("undefined variable `{name}`")))
    }

    /// Method call after `recv .`; returns the statement.
    fn invoke(
        &mut self,
        receiver: usize,
        recv_ty: &TypeTag,
        vars: &BTreeMap<String, usize>,
    ) -> Result<Statement, EncodingError> {
        let method = self.ident()?;
        let owner = recv_ty.subject_name().unwrap_or_default().to_string();
        let callee = self
            .unit
            .signatures()
            .iter()
            .find(|s| !s.is_ctor && s.owner == owner && s.name == method)
            .cloned()
            .ok_or_else(|| err(self.line(), format!("unknown method `{owner}.{method}`")))?;
        let args = self.args(&callee.params, vars)?;
        Ok(Statement::Invoke {
            receiver,
            callee,
            args,
        })
    }

    fn test(&mut self) -> Result<TestCase, EncodingError> {
        self.keyword("test")?;
        self.number()?;
        self.punct("{")?;
        let mut test = TestCase::default();
        let mut vars: BTreeMap<String, usize> = BTreeMap::new();
        while !matches!(self.peek(), Tok::Punct("}")) {
            let first = self.ident()?;
            let stmt = if matches!(self.peek(), Tok::Punct(".")) {
                self.next();
                let recv = self.var(&vars, &first)?;
                let ty = test.statements()[recv].value_type().unwrap_or(TypeTag::Int);
                let stmt = self.invoke(recv, &ty, &vars)?;
                self.punct(";")?;
                test.push(stmt);
                continue;
            } else {
                let ty = self.type_tag(&first)?;
                let name = self.ident()?;
                self.punct("=")?;
                let stmt = match self.peek().clone() {
                    Tok::Ident(w) if w == "new" => {
                        self.next();
                        let owner = self.ident()?;
                        // Arity is the number of top-level commas plus one.
                        let arity = self.count_args();
                        let callee = self
                            .unit
                            .signatures()
                            .iter()
                            .find(|s| s.is_ctor && s.owner == owner && s.params.len() == arity)
                            .cloned()
                            .ok_or_else(|| {
                                err(self.line(), format!("no constructor {owner}/{arity}"))
                            })?;
                        let args = self.args(&callee.params, &vars)?;
                        Statement::Construct { callee, args }
                    }
                    Tok::Ident(w) if vars.contains_key(&w) => {
                        self.next();
                        if matches!(self.peek(), Tok::Punct(".")) {
                            self.next();
                            let recv = vars[&w];
                            let rty = test.statements()[recv].value_type().unwrap_or(TypeTag::Int);
                            self.invoke(recv, &rty, &vars)?
                        } else {
                            return Err(err(self.line(), "expected `.` after variable"));
                        }
                    }
                    _ => Statement::Primitive {
                        value: self.literal(&ty)?,
                        ty: ty.clone(),
                    },
                };
                vars.insert(name, test.len());
                stmt
            };
            self.punct(";")?;
            test.push(stmt);
        }
        self.punct("}")?;
        Ok(test)
    }

    fn count_args(&self) -> usize {
        let mut depth = 0;
        let mut commas = 0;
        let mut empty = true;
        for t in &self.toks[self.pos..] {
            match &t.tok {
                Tok::Punct("(") => depth += 1,
                Tok::Punct(")") => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Tok::Punct(",") if depth == 1 => commas += 1,
                Tok::Eof => break,
                _ => empty = false,
            }
        }
        if empty {
            0
        } else {
            commas + 1
        }
    }
}

/// Parses a `.tests` file against the unit it was generated for.
pub fn parse_suite(text: &str, unit: &TypedUnit) -> Result<Suite, EncodingError> {
    let toks = tokenize(text).map_err(|e| err(0, e.to_string()))?;
    let mut p = SuiteParser { toks, pos: 0, unit };
    p.keyword("subject")?;
    let subject = p.ident()?;
    p.keyword("seed")?;
    let seed = p.number()?;
    let mut tests = Vec::new();
    while !matches!(p.peek(), Tok::Eof) {
        tests.push(p.test()?);
    }
    Ok(Suite {
        subject,
        seed,
        tests,
    })
}
