//! A subset of the BIF interchange format: `network`, discrete `variable`
//! and `probability` blocks. `property` lines are skipped; `//` and `/* */`
//! comments are allowed.
//!
//! A `table` under a node with parents lists values child-state major, with
//! parent combinations in lexicographic order inside each child state.

use std::collections::HashMap;

use crate::bn::{renormalize, BayesianNetwork, Encoding, NodeSpec};
use crate::error::{ParseError, Result};

use super::{all_rows, check_row, locate, Cpt, Pos};

/// Rows are renormalized when their sum is within this distance of one.
const BIF_ROW_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Punct(char),
}

type PResult<T> = std::result::Result<T, ParseError>;

fn tokenize(text: &str) -> PResult<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut pos = Pos { line: 1, column: 1 };
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let here = pos;
        if ch.is_whitespace() {
            chars.next();
            pos.advance(ch);
        } else if ch == '/' && text_at(&chars, 1) == Some('/') {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                pos.advance(c);
            }
        } else if ch == '/' && text_at(&chars, 1) == Some('*') {
            chars.next();
            pos.advance('/');
            chars.next();
            pos.advance('*');
            let mut prev = ' ';
            loop {
                let Some(c) = chars.next() else {
                    return Err(here.err("unterminated comment"));
                };
                pos.advance(c);
                if prev == '*' && c == '/' {
                    break;
                }
                prev = c;
            }
        } else if "{}()[],;|".contains(ch) {
            chars.next();
            pos.advance(ch);
            out.push((Tok::Punct(ch), here));
        } else if ch == '"' {
            chars.next();
            pos.advance(ch);
            let mut word = String::new();
            loop {
                let Some(c) = chars.next() else {
                    return Err(here.err("unterminated string"));
                };
                pos.advance(c);
                if c == '"' {
                    break;
                }
                word.push(c);
            }
            out.push((Tok::Word(word), here));
        } else {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || "{}()[],;|\"".contains(c) {
                    break;
                }
                word.push(c);
                chars.next();
                pos.advance(c);
            }
            out.push((Tok::Word(word), here));
        }
    }
    Ok(out)
}

fn text_at(chars: &std::iter::Peekable<std::str::Chars<'_>>, ahead: usize) -> Option<char> {
    chars.clone().nth(ahead)
}

struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn next(&mut self, what: &str) -> PResult<(Tok, Pos)> {
        let item = self.toks.get(self.at).cloned().ok_or_else(|| {
            self.end
                .err(format!("unexpected end of input, expected {what}"))
        })?;
        self.at += 1;
        Ok(item)
    }

    fn word(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.next(what)? {
            (Tok::Word(w), p) => Ok((w, p)),
            (Tok::Punct(c), p) => Err(p.err(format!("expected {what}, found `{c}`"))),
        }
    }

    fn punct(&mut self, want: char) -> PResult<Pos> {
        match self.next(&format!("`{want}`"))? {
            (Tok::Punct(c), p) if c == want => Ok(p),
            (Tok::Punct(c), p) => Err(p.err(format!("expected `{want}`, found `{c}`"))),
            (Tok::Word(w), p) => Err(p.err(format!("expected `{want}`, found `{w}`"))),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(&Tok::Punct(want)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    /// Skips to just past the next `;`.
    fn skip_statement(&mut self) -> PResult<()> {
        loop {
            if let (Tok::Punct(';'), _) = self.next("`;`")? {
                return Ok(());
            }
        }
    }

    /// Skips a `{ … }` block, including nested braces.
    fn skip_block(&mut self) -> PResult<()> {
        self.punct('{')?;
        let mut depth = 1;
        while depth > 0 {
            match self.next("`}`")?.0 {
                Tok::Punct('{') => depth += 1,
                Tok::Punct('}') => depth -= 1,
                _ => {}
            }
        }
        Ok(())
    }

    /// Comma-separated words up to (and consuming) `close`.
    fn word_list(&mut self, close: char, what: &str) -> PResult<Vec<(String, Pos)>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.word(what)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }

    /// Comma-separated numbers up to (and consuming) `;`.
    fn numbers(&mut self) -> PResult<Vec<f64>> {
        let mut out = Vec::new();
        loop {
            let (w, p) = self.word("a probability")?;
            let x = w
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| p.err(format!("`{w}` is not a number")))?;
            out.push(x);
            if self.eat(';') {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }
}

struct Variable {
    name: String,
    states: Vec<String>,
    pos: Pos,
}

fn parse_variable(cur: &mut Cursor) -> PResult<Variable> {
    let (name, pos) = cur.word("a variable name")?;
    cur.punct('{')?;
    let mut states = None;
    while !cur.eat('}') {
        let (kw, kp) = cur.word("`type` or `property`")?;
        match kw.as_str() {
            "type" => {
                let (kind, p) = cur.word("a type kind")?;
                if kind != "discrete" {
                    return Err(p.err(format!("unsupported: {kind}")));
                }
                cur.punct('[')?;
                let (k, kp) = cur.word("a cardinality")?;
                let k: usize = k
                    .parse()
                    .map_err(|_| kp.err("cardinality is not an integer"))?;
                cur.punct(']')?;
                let sp = cur.punct('{')?;
                let list: Vec<String> = cur
                    .word_list('}', "a state name")?
                    .into_iter()
                    .map(|(w, _)| w)
                    .collect();
                if list.len() != k {
                    return Err(sp.err(format!(
                        "variable {name} declares {k} states but lists {}",
                        list.len()
                    )));
                }
                cur.punct(';')?;
                states = Some(list);
            }
            "property" => cur.skip_statement()?,
            other => return Err(kp.err(format!("unexpected `{other}` in variable block"))),
        }
    }
    let states = states.ok_or_else(|| pos.err(format!("variable {name} has no type")))?;
    Ok(Variable { name, states, pos })
}

/// Parent labels with their positions, the values, and the row position.
type RawRow = (Vec<(String, Pos)>, Vec<f64>, Pos);

struct RawProbability {
    child: String,
    parents: Vec<String>,
    pos: Pos,
    table: Option<(Vec<f64>, Pos)>,
    default: Option<(Vec<f64>, Pos)>,
    rows: Vec<RawRow>,
}

fn parse_probability(cur: &mut Cursor) -> PResult<RawProbability> {
    let pos = cur.punct('(')?;
    let (child, _) = cur.word("a child name")?;
    let parents = if cur.eat('|') {
        cur.word_list(')', "a parent name")?
            .into_iter()
            .map(|(w, _)| w)
            .collect()
    } else {
        cur.punct(')')?;
        Vec::new()
    };
    cur.punct('{')?;
    let mut prob = RawProbability {
        child,
        parents,
        pos,
        table: None,
        default: None,
        rows: Vec::new(),
    };
    while !cur.eat('}') {
        let here = cur.pos();
        if cur.eat('(') {
            let key = cur.word_list(')', "a parent state")?;
            let vals = cur.numbers()?;
            prob.rows.push((key, vals, here));
            continue;
        }
        let (kw, kp) = cur.word("a CPT entry")?;
        match kw.as_str() {
            "table" => prob.table = Some((cur.numbers()?, kp)),
            "default" => prob.default = Some((cur.numbers()?, kp)),
            "property" => cur.skip_statement()?,
            other => return Err(kp.err(format!("unexpected `{other}` in probability block"))),
        }
    }
    Ok(prob)
}

fn normalized(mut row: Vec<f64>, k: usize, pos: Pos) -> PResult<Vec<f64>> {
    check_row(&row, k, pos, BIF_ROW_TOLERANCE)?;
    renormalize(&mut row);
    Ok(row)
}

fn build_rows(
    prob: RawProbability,
    k: usize,
    parent_states: &[&[String]],
) -> PResult<Vec<Vec<f64>>> {
    let combos = all_rows(parent_states);
    let mut table_rows: Vec<Option<Vec<f64>>> = vec![None; combos.len()];
    if let Some((vals, p)) = prob.table {
        if vals.len() != k * combos.len() {
            return Err(p.err(format!(
                "table has {} entries, expected {}",
                vals.len(),
                k * combos.len()
            )));
        }
        for (r, slot) in table_rows.iter_mut().enumerate() {
            let row = (0..k).map(|s| vals[s * combos.len() + r]).collect();
            *slot = Some(normalized(row, k, p)?);
        }
    }
    let index: HashMap<&[usize], usize> = combos
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    for (key, vals, p) in prob.rows {
        if key.len() != parent_states.len() {
            return Err(p.err(format!(
                "row names {} parent states, expected {}",
                key.len(),
                parent_states.len()
            )));
        }
        let mut combo = Vec::with_capacity(key.len());
        for ((label, lp), states) in key.iter().zip(parent_states) {
            combo.push(
                states
                    .iter()
                    .position(|s| s == label)
                    .ok_or_else(|| lp.err(format!("unknown parent state `{label}`")))?,
            );
        }
        let slot = &mut table_rows[index[combo.as_slice()]];
        if slot.is_some() {
            return Err(p.err("duplicate CPT row"));
        }
        *slot = Some(normalized(vals, k, p)?);
    }
    let default = prob
        .default
        .map(|(vals, p)| normalized(vals, k, p))
        .transpose()?;
    combos
        .iter()
        .zip(table_rows)
        .map(|(combo, row)| {
            row.or_else(|| default.clone()).ok_or_else(|| {
                let names: Vec<&str> = combo
                    .iter()
                    .zip(parent_states)
                    .map(|(&s, states)| states[s].as_str())
                    .collect();
                prob.pos
                    .err(format!("missing CPT row for ({})", names.join(" ")))
            })
        })
        .collect()
}

/// Parses the BIF subset. Every node becomes an output, one-hot.
pub fn parse_bif_subset(text: &str) -> Result<BayesianNetwork> {
    let toks = tokenize(text)?;
    let mut end = Pos { line: 1, column: 1 };
    text.chars().for_each(|c| end.advance(c));
    let mut cur = Cursor { toks, at: 0, end };

    let mut variables: Vec<Variable> = Vec::new();
    let mut probabilities = Vec::new();
    while cur.peek().is_some() {
        let (kw, kp) = cur.word("a block keyword")?;
        match kw.as_str() {
            "network" => {
                if matches!(cur.peek(), Some(Tok::Word(_))) {
                    cur.word("a network name")?;
                }
                cur.skip_block()?;
            }
            "variable" => variables.push(parse_variable(&mut cur)?),
            "probability" => probabilities.push(parse_probability(&mut cur)?),
            other => return Err(kp.err(format!("unknown block `{other}`")).into()),
        }
    }
    if variables.is_empty() {
        return Err(end.err("no variables declared").into());
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in variables.iter().enumerate() {
        if index.insert(v.name.as_str(), i).is_some() {
            return Err(v
                .pos
                .err(format!("variable {} declared twice", v.name))
                .into());
        }
    }

    let mut cpts: Vec<Option<Cpt>> = vec![None; variables.len()];
    for prob in probabilities {
        let pos = prob.pos;
        let &ci = index
            .get(prob.child.as_str())
            .ok_or_else(|| pos.err(format!("reference to undeclared node `{}`", prob.child)))?;
        let mut parent_states = Vec::new();
        for p in &prob.parents {
            let &pi = index
                .get(p.as_str())
                .ok_or_else(|| pos.err(format!("reference to undeclared node `{p}`")))?;
            parent_states.push(variables[pi].states.as_slice());
        }
        if cpts[ci].is_some() {
            return Err(pos
                .err(format!("second probability block for {}", prob.child))
                .into());
        }
        let parents = prob.parents.clone();
        let rows = build_rows(prob, variables[ci].states.len(), &parent_states)?;
        cpts[ci] = Some((parents, rows));
    }

    let mut nodes = Vec::with_capacity(variables.len());
    for (v, cpt) in variables.iter().zip(cpts) {
        let (parents, rows) = cpt.ok_or_else(|| {
            v.pos
                .err(format!("missing probability block for {}", v.name))
        })?;
        nodes.push(NodeSpec::new(
            v.name.clone(),
            v.states.clone(),
            parents,
            rows,
        ));
    }
    let outputs: Vec<String> = nodes.iter().map(|n| n.name.clone()).collect();
    BayesianNetwork::new(nodes, &outputs, Encoding::OneHot)
        .map_err(|e| locate(e, variables.iter().map(|v| (v.name.as_str(), v.pos))))
}
