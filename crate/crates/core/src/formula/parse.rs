use thiserror::Error;

use super::Formula;

/// A syntax error, positioned at the offending token (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bot,
    And,
    Or,
    Imp,
    Not,
    Mu,
    Nu,
    Dot,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Top => "`T`".into(),
            Tok::Bot => "`F`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Not => "`~`".into(),
            Tok::Mu => "`mu`".into(),
            Tok::Nu => "`nu`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '~' => push(Tok::Not, 1, &mut i, &mut col),
            '/' if chars.get(i + 1) == Some(&'\\') => push(Tok::And, 2, &mut i, &mut col),
            '\\' if chars.get(i + 1) == Some(&'/') => push(Tok::Or, 2, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Imp, 2, &mut i, &mut col),
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                // Trailing primes are produced by capture-avoiding renaming.
                while j < chars.len() && chars[j] == '\'' {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "T" => Tok::Top,
                    "F" => Tok::Bot,
                    "mu" => Tok::Mu,
                    "nu" => Tok::Nu,
                    _ => Tok::Ident(word),
                };
                push(tok, j - i, &mut i, &mut col);
            }
            other => {
                return Err(err(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    // imp := disj ('->' imp)?
    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::neg(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.imp()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Mu | Tok::Nu => {
                let is_mu = self.bump() == Tok::Mu;
                let binder = match self.bump() {
                    Tok::Ident(name) => name,
                    other => {
                        self.pos -= 1;
                        return Err(self.error(format!(
                            "expected binder variable, found {}",
                            other.describe()
                        )));
                    }
                };
                self.expect(Tok::Dot)?;
                // The body extends as far right as possible.
                let body = self.imp()?;
                Ok(if is_mu {
                    Formula::mu(binder, body)
                } else {
                    Formula::nu(binder, body)
                })
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// Parses the ASCII concrete syntax.
///
/// Precedence from loosest to tightest: `->` (right associative), `\/`,
/// `/\` (both left associative), prefix `~` (sugar for `φ -> F`). A `mu`/`nu`
/// body extends to the longest possible suffix. Parsing is purely syntactic:
/// free variables and non-positive binders are accepted here and reported by
/// [`well_formed`](super::well_formed).
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.imp()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn parses_mu_with_maximal_body() {
        let f = parse("mu x. b \\/ (a -> x)").unwrap();
        assert_eq!(f, Formula::mu("x", Formula::or(v("b"), Formula::imp(v("a"), v("x")))));
    }

    #[test]
    fn parses_constants() {
        assert_eq!(parse("T -> F").unwrap(), Formula::imp(Formula::Top, Formula::Bot));
    }

    #[test]
    fn parses_nested_binders() {
        let f = parse("nu x. mu y. (x /\\ y)").unwrap();
        assert_eq!(f, Formula::nu("x", Formula::mu("y", Formula::and(v("x"), v("y")))));
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse("a -> b -> c").unwrap();
        assert_eq!(f, Formula::imp(v("a"), Formula::imp(v("b"), v("c"))));
    }

    #[test]
    fn precedence_and_over_or_over_imp() {
        let f = parse("a /\\ b \\/ c -> d").unwrap();
        let expect = Formula::imp(Formula::or(Formula::and(v("a"), v("b")), v("c")), v("d"));
        assert_eq!(f, expect);
    }

    #[test]
    fn disjunction_is_left_associative() {
        let f = parse("a \\/ b \\/ c").unwrap();
        assert_eq!(f, Formula::or(Formula::or(v("a"), v("b")), v("c")));
    }

    #[test]
    fn tilde_is_negation() {
        assert_eq!(parse("~~a").unwrap(), Formula::neg(Formula::neg(v("a"))));
        assert_eq!(parse("~a /\\ b").unwrap(), Formula::and(Formula::neg(v("a")), v("b")));
    }

    #[test]
    fn binder_inside_operand_swallows_rest() {
        let f = parse("b \\/ mu x. x \\/ a").unwrap();
        assert_eq!(f, Formula::or(v("b"), Formula::mu("x", Formula::or(v("x"), v("a")))));
    }

    #[test]
    fn identifiers_with_digits_underscores_and_primes() {
        assert_eq!(parse("a_1'").unwrap(), v("a_1'"));
        assert_eq!(parse("mux").unwrap(), v("mux"));
    }

    #[test]
    fn error_positions() {
        let e = parse("a /\\\n  (b -> )").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse("a $ b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
        let e = parse("(a").unwrap_err();
        assert!(e.message.contains("expected `)`"), "{e}");
        let e = parse("mu . a").unwrap_err();
        assert!(e.message.contains("binder"), "{e}");
        assert!(parse("a b").is_err());
        assert!(parse("").is_err());
        assert!(parse("_y").is_err());
    }

    #[test]
    fn free_variables_and_negative_binders_parse() {
        assert!(parse("mu x. x -> a").is_ok());
        assert!(parse("q").is_ok());
    }
}
