//! The s-expression network format:
//!
//! ```text
//! (define NETWORK
//!   '((variable A (type discrete (2) (f t)))
//!     (probability (A) (table 0.5 0.5))
//!     (probability (B A) ((f) 0.9 0.1) ((t) 0.2 0.8))))
//! ```
//!
//! The `(define NAME '…)` wrapper is optional; a bare clause list parses the
//! same. `;` starts a comment that runs to the end of the line.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::bn::{BayesianNetwork, Encoding, NodeSpec};
use crate::error::{ParseError, Result};

use super::{all_rows, check_row, locate, Cpt, Pos};

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn atom(&self, what: &str) -> std::result::Result<&str, ParseError> {
        match self {
            Sexp::Atom(s, _) => Ok(s),
            Sexp::List(_, p) => Err(p.err(format!("expected {what}, found a list"))),
        }
    }

    fn list(&self, what: &str) -> std::result::Result<&[Sexp], ParseError> {
        match self {
            Sexp::List(items, _) => Ok(items),
            Sexp::Atom(a, p) => Err(p.err(format!("expected {what}, found `{a}`"))),
        }
    }
}

fn read(text: &str) -> std::result::Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut pos = Pos { line: 1, column: 1 };
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let here = pos;
        match ch {
            '(' => {
                chars.next();
                pos.advance(ch);
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                pos.advance(ch);
                let (items, start) = stack
                    .pop()
                    .ok_or_else(|| here.err("unbalanced parentheses: unexpected `)`"))?;
                let node = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            '\'' => {
                chars.next();
                pos.advance(ch);
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    pos.advance(c);
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                pos.advance(c);
            }
            _ => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '\'' | ';') {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                    pos.advance(c);
                }
                let node = Sexp::Atom(tok, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(start.err("unbalanced parentheses: `(` is never closed"));
    }
    Ok(top)
}

struct Variable {
    name: String,
    states: Vec<String>,
    pos: Pos,
}

struct Probability<'a> {
    child: String,
    parents: Vec<String>,
    body: &'a [Sexp],
    pos: Pos,
}

fn parse_number(s: &Sexp) -> std::result::Result<f64, ParseError> {
    let text = s.atom("a probability")?;
    text.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| s.pos().err(format!("`{text}` is not a number")))
}

fn parse_variable(items: &[Sexp], pos: Pos) -> std::result::Result<Variable, ParseError> {
    // (variable NAME (type discrete (K) (s1 … sK)))
    let name = items
        .get(1)
        .ok_or_else(|| pos.err("variable clause needs a name"))?
        .atom("a variable name")?
        .to_string();
    let ty = items
        .get(2)
        .ok_or_else(|| pos.err(format!("variable {name} needs a type")))?
        .list("(type discrete …)")?;
    if items.len() > 3 {
        return Err(items[3]
            .pos()
            .err("unexpected trailing item in variable clause"));
    }
    let head = ty.first().map(|h| h.atom("`type`")).transpose()?;
    if head != Some("type") {
        return Err(pos.err(format!("variable {name}: expected (type discrete …)")));
    }
    match ty.get(1).map(|k| k.atom("a type kind")).transpose()? {
        Some("discrete") => {}
        Some(other) => {
            return Err(ty[1].pos().err(format!("unsupported: {other}")));
        }
        None => return Err(pos.err(format!("variable {name}: missing type kind"))),
    }
    let card_list = ty
        .get(2)
        .ok_or_else(|| pos.err(format!("variable {name}: missing cardinality")))?;
    let card_items = card_list.list("(K)")?;
    let k: usize = match card_items {
        [only] => only
            .atom("a cardinality")?
            .parse()
            .map_err(|_| only.pos().err("cardinality is not an integer"))?,
        _ => return Err(card_list.pos().err("cardinality must be a single integer")),
    };
    let states_sexp = ty
        .get(3)
        .ok_or_else(|| pos.err(format!("variable {name}: missing state list")))?;
    let states = states_sexp
        .list("a state list")?
        .iter()
        .map(|s| s.atom("a state name").map(str::to_string))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if states.len() != k {
        return Err(states_sexp.pos().err(format!(
            "variable {name} declares {k} states but lists {}",
            states.len()
        )));
    }
    Ok(Variable { name, states, pos })
}

fn parse_probability(items: &[Sexp], pos: Pos) -> std::result::Result<Probability<'_>, ParseError> {
    let head = items
        .get(1)
        .ok_or_else(|| pos.err("probability clause needs (CHILD PARENTS…)"))?
        .list("(CHILD PARENTS…)")?;
    let mut names = head
        .iter()
        .map(|s| s.atom("a node name").map(str::to_string));
    let child = names
        .next()
        .ok_or_else(|| items[1].pos().err("probability clause has no child"))??;
    let parents = names.collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Probability {
        child,
        parents,
        body: &items[2..],
        pos,
    })
}

/// Parses an s-expression network. Every node becomes an output, one-hot.
pub fn parse_sexpr(text: &str) -> Result<BayesianNetwork> {
    let top = read(text)?;
    let clauses: &[Sexp] = match top.as_slice() {
        [] => return Err(ParseError::new(1, 1, "empty network description").into()),
        [Sexp::List(items, pos)] => match items.first() {
            Some(Sexp::Atom(head, _)) if head == "define" => match items.as_slice() {
                [_, name, body] => {
                    name.atom("a network name")?;
                    body.list("a clause list")?
                }
                _ => return Err(pos.err("expected (define NAME '(clauses…))").into()),
            },
            _ => items,
        },
        [_, extra, ..] => {
            return Err(extra
                .pos()
                .err("unexpected content after the network")
                .into())
        }
        [atom] => {
            return Err(atom
                .pos()
                .err("expected a parenthesized clause list")
                .into())
        }
    };

    let mut variables: Vec<Variable> = Vec::new();
    let mut probabilities: Vec<Probability<'_>> = Vec::new();
    for clause in clauses {
        let items = clause.list("a clause")?;
        let head = items
            .first()
            .ok_or_else(|| clause.pos().err("empty clause"))?
            .atom("a clause head")?;
        match head {
            "variable" => variables.push(parse_variable(items, clause.pos())?),
            "probability" => probabilities.push(parse_probability(items, clause.pos())?),
            other => {
                return Err(items[0]
                    .pos()
                    .err(format!("unknown clause head `{other}`"))
                    .into())
            }
        }
    }

    let index: HashMap<&str, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    if index.len() != variables.len() {
        let dup = variables
            .iter()
            .enumerate()
            .find(|(i, v)| index[v.name.as_str()] != *i)
            .map(|(_, v)| v)
            .expect("a duplicate exists");
        return Err(dup
            .pos
            .err(format!("variable {} declared twice", dup.name))
            .into());
    }

    let mut cpts: Vec<Option<Cpt>> = vec![None; variables.len()];
    for prob in &probabilities {
        let &ci = index.get(prob.child.as_str()).ok_or_else(|| {
            prob.pos
                .err(format!("reference to undeclared node `{}`", prob.child))
        })?;
        let mut parent_states = Vec::new();
        for p in &prob.parents {
            let &pi = index
                .get(p.as_str())
                .ok_or_else(|| prob.pos.err(format!("reference to undeclared node `{p}`")))?;
            parent_states.push(variables[pi].states.as_slice());
        }
        if cpts[ci].is_some() {
            return Err(prob
                .pos
                .err(format!("second probability clause for {}", prob.child))
                .into());
        }
        let k = variables[ci].states.len();
        let rows = parse_rows(prob, k, &parent_states)?;
        cpts[ci] = Some((prob.parents.clone(), rows));
    }

    let mut nodes = Vec::with_capacity(variables.len());
    for (v, cpt) in variables.iter().zip(cpts) {
        let (parents, rows) = cpt.ok_or_else(|| {
            v.pos
                .err(format!("missing probability clause for {}", v.name))
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

fn parse_rows(
    prob: &Probability<'_>,
    k: usize,
    parent_states: &[&[String]],
) -> std::result::Result<Vec<Vec<f64>>, ParseError> {
    let combos = all_rows(parent_states);
    if prob.parents.is_empty() {
        // (table p1 … pK)
        let [table] = prob.body else {
            return Err(prob.pos.err(format!(
                "root node {} needs exactly one (table …)",
                prob.child
            )));
        };
        let items = table.list("(table …)")?;
        if items.first().map(|h| h.atom("`table`")).transpose()? != Some("table") {
            return Err(table.pos().err("expected (table p1 … pK)"));
        }
        let row = items[1..]
            .iter()
            .map(parse_number)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        check_row(&row, k, table.pos(), 1e-12)?;
        return Ok(vec![row]);
    }

    let mut by_combo: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
    for entry in prob.body {
        let items = entry.list("((parent states…) p1 … pK)")?;
        let key_sexp = items
            .first()
            .ok_or_else(|| entry.pos().err("empty CPT row"))?;
        let labels = key_sexp.list("(parent states…)")?;
        if labels.len() != parent_states.len() {
            return Err(key_sexp.pos().err(format!(
                "row names {} parent states, expected {}",
                labels.len(),
                parent_states.len()
            )));
        }
        let mut key = Vec::with_capacity(labels.len());
        for (label, states) in labels.iter().zip(parent_states) {
            let l = label.atom("a parent state")?;
            key.push(
                states
                    .iter()
                    .position(|s| s == l)
                    .ok_or_else(|| label.pos().err(format!("unknown parent state `{l}`")))?,
            );
        }
        let row = items[1..]
            .iter()
            .map(parse_number)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        check_row(&row, k, entry.pos(), 1e-12)?;
        if by_combo.insert(key, row).is_some() {
            return Err(entry.pos().err("duplicate CPT row"));
        }
    }
    combos
        .into_iter()
        .map(|combo| {
            by_combo.remove(&combo).ok_or_else(|| {
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

/// Probability literal with 17 significant digits in plain decimal notation.
pub(crate) fn format_prob(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Canonical s-expression text: nodes in topological order, rows in
/// lexicographic parent-state order.
pub fn emit_sexpr(bn: &BayesianNetwork) -> String {
    let mut out = String::from("(define NETWORK\n  '(");
    let mut first = true;
    let mut clause = |out: &mut String, text: &str| {
        if !first {
            out.push_str("\n    ");
        }
        first = false;
        out.push_str(text);
    };
    for node in bn.nodes() {
        let text = format!(
            "(variable {} (type discrete ({}) ({})))",
            node.name,
            node.cardinality(),
            node.states.join(" ")
        );
        clause(&mut out, &text);
    }
    for (i, node) in bn.nodes().iter().enumerate() {
        let mut text = String::new();
        let head: Vec<&str> = std::iter::once(node.name.as_str())
            .chain(node.parents.iter().map(String::as_str))
            .collect();
        write!(text, "(probability ({})", head.join(" ")).unwrap();
        let probs = |row: &[f64]| {
            row.iter()
                .map(|&p| format_prob(p))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if node.parents.is_empty() {
            write!(text, " (table {}))", probs(&node.cpt[0])).unwrap();
        } else {
            let parent_states: Vec<&[String]> = bn
                .parent_indices(i)
                .iter()
                .map(|&p| bn.node(p).states.as_slice())
                .collect();
            for (combo, row) in all_rows(&parent_states).iter().zip(&node.cpt) {
                let labels: Vec<&str> = combo
                    .iter()
                    .zip(&parent_states)
                    .map(|(&s, states)| states[s].as_str())
                    .collect();
                write!(text, "\n      (({}) {})", labels.join(" "), probs(row)).unwrap();
            }
            text.push(')');
        }
        clause(&mut out, &text);
    }
    out.push_str("))\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::populations::CANCER_SEXPR;

    #[test]
    fn fair_coin() {
        let bn = parse_sexpr(
            "(define NETWORK '((variable A (type discrete (2) (f t))) (probability (A) (table 0.5 0.5))))",
        )
        .unwrap();
        assert_eq!(bn.node_count(), 1);
        assert_eq!(bn.node(0).cpt, vec![vec![0.5, 0.5]]);
    }

    #[test]
    fn bare_clause_list() {
        let bn = parse_sexpr(
            "((variable A (type discrete (2) (f t))) (probability (A) (table 0.2 0.8)))",
        )
        .unwrap();
        assert_eq!(bn.node(0).cpt[0], vec![0.2, 0.8]);
    }

    #[test]
    fn cancer_smoker_prior() {
        let bn = parse_sexpr(CANCER_SEXPR).unwrap();
        assert_eq!(bn.node_count(), 5);
        let s = bn.node(bn.index_of("Smoker").unwrap());
        assert_eq!(s.cpt[0][0], 0.3);
    }

    #[test]
    fn missing_row_is_named() {
        let text = CANCER_SEXPR.replace("((high True) 0.05 0.95)", "");
        let err = parse_sexpr(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("missing CPT row for (high True)"), "{msg}");
        assert!(
            matches!(err, Error::Parse(ParseError { line: 7, .. })),
            "{msg}"
        );
    }

    #[test]
    fn unbalanced_parens() {
        let err = parse_sexpr("((variable A (type discrete (2) (f t)))").unwrap_err();
        assert!(err.to_string().contains("unbalanced"), "{err}");
        let err = parse_sexpr("((variable A))))").unwrap_err();
        assert!(err.to_string().contains("unbalanced"), "{err}");
    }

    #[test]
    fn unknown_head_and_undeclared_node() {
        let err = parse_sexpr("((varible A (type discrete (2) (f t))))").unwrap_err();
        assert!(
            err.to_string().contains("1:3: unknown clause head"),
            "{err}"
        );
        let err = parse_sexpr(
            "((variable A (type discrete (2) (f t))) (probability (A B) ((f) 0.5 0.5)))",
        )
        .unwrap_err();
        assert!(err.to_string().contains("undeclared node `B`"), "{err}");
    }

    #[test]
    fn row_length_mismatch() {
        let err = parse_sexpr(
            "((variable A (type discrete (2) (f t))) (probability (A) (table 0.5 0.25 0.25)))",
        )
        .unwrap_err();
        assert!(
            err.to_string().contains("row has 3 entries, expected 2"),
            "{err}"
        );
    }

    #[test]
    fn emit_round_trip_and_determinism() {
        let bn = parse_sexpr(CANCER_SEXPR).unwrap();
        let text = emit_sexpr(&bn);
        assert_eq!(text, emit_sexpr(&bn));
        let back = parse_sexpr(&text).unwrap();
        assert_eq!(back, bn);
    }

    #[test]
    fn format_prob_keeps_seventeen_digits() {
        assert_eq!(format_prob(0.3), "0.29999999999999999");
        assert_eq!(format_prob(1.0), "1.0000000000000000");
        assert_eq!(format_prob(0.0), "0");
        for x in [0.001, 7.682262e-05, 0.9999999, 1.0 / 3.0] {
            assert_eq!(format_prob(x).parse::<f64>().unwrap(), x);
        }
    }
}
