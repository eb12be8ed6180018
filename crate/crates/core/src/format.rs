//! Line-oriented text format for Bayesian nets.
//!
//! ```text
//! # comment
//! variable rain { no, yes }
//! variable wet { no, yes }
//! cpt rain { 0.8, 0.2 }
//! cpt wet | rain { 0.9, 0.1, 0.2, 0.8 }
//! ```
//!
//! A conditional lists one row per parent assignment, the first listed
//! parent varying slowest, and within a row one entry per child state.
//! Variables without a `cpt` line are unspecified roots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::semibn::SemiBayesNet;
use crate::tables::{Potential, Universe, VarId, VarKind};

/// Largest deviation of a conditional's row sum from 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Bar,
    Comma,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            let column = line[..pos].chars().count() + 1;
            let simple = match c {
                '{' => Some(Tok::Open),
                '}' => Some(Tok::Close),
                '|' => Some(Tok::Bar),
                ',' => Some(Tok::Comma),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line: n + 1, column });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else {
                let start = i;
                while i < chars.len() && !chars[i].1.is_whitespace() && !"{}|,".contains(chars[i].1) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push(Token { tok: Tok::Word(word), line: n + 1, column });
            }
        }
    }
    out
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<Token> {
        let (line, column) = self.here();
        match self.next() {
            Some(t @ Token { tok: Tok::Word(_), .. }) => Ok(t),
            _ => Err(parse_error(line, column, format!("expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let (line, column) = self.here();
        match self.next() {
            Some(t) if t.tok == tok => Ok(()),
            _ => Err(parse_error(line, column, format!("expected {what}"))),
        }
    }

    /// Comma-separated words up to a closing brace.
    fn braced_list(&mut self, what: &str) -> Result<Vec<Token>> {
        self.expect(Tok::Open, "'{'")?;
        let mut out = Vec::new();
        if self.peek().is_some_and(|t| t.tok == Tok::Close) {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(self.word(what)?);
            let (line, column) = self.here();
            match self.next().map(|t| t.tok) {
                Some(Tok::Comma) => {}
                Some(Tok::Close) => return Ok(out),
                _ => return Err(parse_error(line, column, "expected ',' or '}'")),
            }
        }
    }
}

fn text(t: &Token) -> &str {
    match &t.tok {
        Tok::Word(w) => w,
        _ => "",
    }
}

/// Parses a net. Every conditional must have rows summing to 1.
pub fn parse_net(src: &str) -> Result<SemiBayesNet> {
    let toks = tokenize(src);
    let end = (src.lines().count().max(1), 1);
    let mut cur = Cursor { toks, pos: 0, end };
    let mut universe = Universe::new();
    struct Cpt {
        child: VarId,
        parents: Vec<VarId>,
        values: Vec<Token>,
        at: (usize, usize),
    }
    let mut cpts: Vec<Cpt> = Vec::new();
    let mut owners: BTreeSet<VarId> = BTreeSet::new();

    while let Some(t) = cur.next() {
        let at = (t.line, t.column);
        match t.tok {
            Tok::Word(ref w) if w == "variable" => {
                let name = cur.word("a variable name")?;
                let states = cur.braced_list("a state name")?;
                let labels: Vec<String> = states.iter().map(|s| text(s).to_string()).collect();
                if universe.lookup(text(&name)).is_ok() {
                    return Err(parse_error(name.line, name.column, format!("variable {} declared twice", text(&name))));
                }
                universe.add(text(&name), labels, VarKind::Net).map_err(|e| parse_error(name.line, name.column, e.to_string()))?;
            }
            Tok::Word(ref w) if w == "cpt" => {
                let resolve = |t: &Token, u: &Universe| -> Result<VarId> {
                    u.lookup(text(t)).map(|v| v.id).map_err(|_| parse_error(t.line, t.column, format!("unknown variable {}", text(t))))
                };
                let child_tok = cur.word("a variable name")?;
                let child = resolve(&child_tok, &universe)?;
                if !owners.insert(child) {
                    return Err(parse_error(child_tok.line, child_tok.column, format!("second cpt for {}", text(&child_tok))));
                }
                let mut parents = Vec::new();
                if cur.peek().is_some_and(|t| t.tok == Tok::Bar) {
                    cur.next();
                    loop {
                        let p = cur.word("a parent name")?;
                        let id = resolve(&p, &universe)?;
                        if id == child || parents.contains(&id) {
                            return Err(parse_error(p.line, p.column, format!("{} listed twice", text(&p))));
                        }
                        parents.push(id);
                        if cur.peek().is_some_and(|t| t.tok == Tok::Comma) {
                            cur.next();
                        } else {
                            break;
                        }
                    }
                }
                let values = cur.braced_list("a probability")?;
                cpts.push(Cpt { child, parents, values, at });
            }
            _ => return Err(parse_error(at.0, at.1, "expected 'variable' or 'cpt'")),
        }
    }
    if universe.is_empty() {
        return Err(Error::Input("the net declares no variables".into()));
    }

    let mut items = Vec::new();
    for cpt in cpts {
        let card = |v: VarId| universe.var(v).map(|x| x.card()).unwrap_or(1);
        let child_card = card(cpt.child);
        let rows: usize = cpt.parents.iter().map(|&p| card(p)).product();
        if cpt.values.len() != rows * child_card {
            return Err(parse_error(
                cpt.at.0,
                cpt.at.1,
                format!("expected {} probabilities, found {}", rows * child_card, cpt.values.len()),
            ));
        }
        let mut values = Vec::with_capacity(cpt.values.len());
        for t in &cpt.values {
            let x: f64 = text(t)
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| parse_error(t.line, t.column, format!("{} is not a probability", text(t))))?;
            values.push(x);
        }
        for (r, row) in values.chunks(child_card).enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                let t = &cpt.values[r * child_card];
                return Err(parse_error(t.line, t.column, format!("row sums to {sum}, not 1")));
            }
        }
        let mut layout: Vec<(VarId, usize)> = cpt.parents.iter().map(|&p| (p, card(p))).collect();
        layout.push((cpt.child, child_card));
        items.push((cpt.child, cpt.parents, Potential::from_layout(&layout, values)?));
    }
    let ids: Vec<VarId> = universe.iter().map(|v| v.id).collect();
    let universe = Arc::new(universe);
    SemiBayesNet::from_conditionals(universe.clone(), ids, items).map_err(|e| match e {
        Error::Cycle(v) => {
            let name = v.strip_prefix('#').and_then(|n| n.parse().ok()).and_then(|n| universe.get(VarId(n)));
            Error::Cycle(name.map(|x| x.name.clone()).unwrap_or(v))
        }
        other => other,
    })
}

/// Writes a net in the text format. Only conditional items are written;
/// parameters and auxiliary variables have no representation.
pub fn print_net(net: &SemiBayesNet) -> Result<String> {
    if !net.params().is_empty() || !net.auxiliaries().is_empty() {
        return Err(Error::Contract("only nets without parameters or auxiliaries can be written".into()));
    }
    let mut out = String::new();
    for &v in net.vertices() {
        let var = net.var(v).ok_or_else(|| Error::Internal(format!("no description for {v}")))?;
        let _ = writeln!(out, "variable {} {{ {} }}", var.name, var.states.join(", "));
    }
    for item in net.items() {
        let child = item.child();
        let parents: Vec<VarId> = net.parents(child).iter().copied().collect();
        let mut layout: Vec<VarId> = parents.clone();
        layout.push(child);
        let cards: Vec<usize> = layout.iter().map(|&v| net.card(v)).collect::<Result<_>>()?;
        let mut values = Vec::new();
        let mut counter = vec![0usize; layout.len()];
        let total: usize = cards.iter().product();
        for _ in 0..total {
            let assignment: BTreeMap<VarId, usize> = layout.iter().copied().zip(counter.iter().copied()).collect();
            values.push(format!("{}", item.table().get(&assignment)?));
            for pos in (0..counter.len()).rev() {
                counter[pos] += 1;
                if counter[pos] < cards[pos] {
                    break;
                }
                counter[pos] = 0;
            }
        }
        let _ = write!(out, "cpt {}", net.name_of(child));
        if !parents.is_empty() {
            let names: Vec<String> = parents.iter().map(|p| net.name_of(*p)).collect();
            let _ = write!(out, " | {}", names.join(", "));
        }
        let _ = writeln!(out, " {{ {} }}", values.join(", "));
    }
    Ok(out)
}
