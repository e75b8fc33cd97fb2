//! Parser for the compact ratio notation, e.g. `3m+3n, 3n, 2m, 2n / 2m+3n, m+2n, m+n, m, n, n`.
//!
//! ```text
//! spec  := forms "/" forms
//! forms := form ("," form)*
//! form  := term (("+"|"-") term)*
//! term  := [unsigned-integer] letter | unsigned-integer
//! ```

use super::{LinearForm, RatioError, RatioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Num(i64),
    Letter(char),
    Plus,
    Minus,
    Comma,
    Slash,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, RatioError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut value: i64 = 0;
                while let Some(&(_, d)) = chars.peek() {
                    let Some(digit) = d.to_digit(10) else { break };
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(digit as i64))
                        .ok_or_else(|| RatioError::parse(pos, "integer literal too large"))?;
                    chars.next();
                }
                out.push((pos, Tok::Num(value)));
            }
            c if c.is_alphabetic() => {
                out.push((pos, Tok::Letter(c)));
                chars.next();
            }
            '+' | '-' | ',' | '/' => {
                out.push((
                    pos,
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        ',' => Tok::Comma,
                        _ => Tok::Slash,
                    },
                ));
                chars.next();
            }
            other => return Err(RatioError::parse(pos, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// A form before parameter indices are fixed: `(letter, coefficient)` pairs plus a constant.
struct RawForm {
    terms: Vec<(char, i64)>,
    constant: i64,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(p, _)| p)
    }

    fn forms(&mut self) -> Result<Vec<RawForm>, RatioError> {
        let mut forms = vec![self.form()?];
        while self.peek() == Some(Tok::Comma) {
            self.pos += 1;
            forms.push(self.form()?);
        }
        Ok(forms)
    }

    fn form(&mut self) -> Result<RawForm, RatioError> {
        let start = self.offset();
        let mut form = RawForm {
            terms: Vec::new(),
            constant: 0,
        };
        let mut sign = 1;
        loop {
            let term_pos = self.offset();
            let (letter, coeff) = self.term()?;
            let coeff = sign * coeff;
            match letter {
                Some(l) => {
                    if form.terms.iter().any(|&(seen, _)| seen == l) {
                        return Err(RatioError::DuplicateParam {
                            position: term_pos,
                            name: l.to_string(),
                        });
                    }
                    form.terms.push((l, coeff));
                }
                None => form.constant += coeff,
            }
            sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => break,
            };
            self.pos += 1;
        }
        if form.terms.iter().all(|&(_, c)| c == 0) {
            return Err(RatioError::parse(start, "factorial argument has no parameter"));
        }
        Ok(form)
    }

    fn term(&mut self) -> Result<(Option<char>, i64), RatioError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if let Some(Tok::Letter(l)) = self.peek() {
                    self.pos += 1;
                    Ok((Some(l), n))
                } else {
                    Ok((None, n))
                }
            }
            Some(Tok::Letter(l)) => {
                self.pos += 1;
                Ok((Some(l), 1))
            }
            Some(t) => Err(RatioError::parse(
                self.offset(),
                format!("expected a term, found {}", describe(t)),
            )),
            None => Err(RatioError::parse(self.end, "expected a term, found end of input")),
        }
    }
}

fn describe(t: Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Letter(c) => format!("parameter {c}"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Comma => "','".into(),
        Tok::Slash => "'/'".into(),
    }
}

/// Parses ratio notation into a validated [`RatioSpec`].
///
/// Parameters are numbered in order of first appearance.
pub fn parse_spec(text: &str) -> Result<RatioSpec, RatioError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let num = p.forms()?;
    match p.peek() {
        Some(Tok::Slash) => p.pos += 1,
        Some(t) => {
            return Err(RatioError::parse(
                p.offset(),
                format!("expected ',' or '/', found {}", describe(t)),
            ))
        }
        None => return Err(RatioError::parse(p.end, "missing '/' between numerator and denominator")),
    }
    let den = p.forms()?;
    if let Some(t) = p.peek() {
        return Err(RatioError::parse(
            p.offset(),
            format!("unexpected {} after denominator", describe(t)),
        ));
    }

    let mut params: Vec<char> = Vec::new();
    for f in num.iter().chain(&den) {
        for &(l, _) in &f.terms {
            if !params.contains(&l) {
                params.push(l);
            }
        }
    }
    let lower = |forms: Vec<RawForm>| -> Vec<LinearForm> {
        forms
            .into_iter()
            .map(|f| {
                let mut coeffs = vec![0; params.len()];
                for (l, c) in f.terms {
                    let i = params.iter().position(|&p| p == l).expect("collected above");
                    coeffs[i] = c;
                }
                LinearForm::with_constant(coeffs, f.constant)
            })
            .collect()
    };
    let num = lower(num);
    let den = lower(den);
    RatioSpec::new(params.iter().map(|c| c.to_string()).collect(), num, den)
}
