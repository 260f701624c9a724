//! Line-oriented text formats. Vertices, bag ids and class ids are 1-based
//! on disk. Comment lines start with `c`; blank lines are ignored.
//!
//! Serializers emit the canonical form, which parsing reproduces exactly:
//! no comments, arcs sorted by `(u, v)`, partition classes numbered by first
//! appearance, bags sorted.
//!
//! ```text
//! p ashg <n> <arcs>         s part <n> <classes>      s td <bags> <max bag> <n>
//! a <u> <v> <w>             <v> <class>               b <id> <v>...
//!                                                     <id> <id>
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::decomposition::TreeDecomposition;
use crate::error::Error;
use crate::game::{AshgInstance, Partition, Vertex, Weight};
use crate::reductions::cnf::{CnfFormula, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("missing header line")]
    MissingHeader,

    #[error(transparent)]
    Invalid(#[from] Error),
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Syntax { line, msg: msg.into() })
}

/// Non-comment, non-blank lines with their 1-based line numbers, split into
/// whitespace-separated tokens.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let comment = toks.first().is_none_or(|t| t.starts_with('c'));
        (!comment).then_some((i + 1, toks))
    })
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, FormatError> {
    tok.parse().or_else(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<Vertex, FormatError> {
    let v: usize = number(line, tok, "a vertex id")?;
    if v == 0 || v > n {
        return syntax(line, format!("vertex {v} outside 1..={n}"));
    }
    Ok(v - 1)
}

fn expect_len(line: usize, toks: &[&str], len: usize, shape: &str) -> Result<(), FormatError> {
    if toks.len() == len {
        Ok(())
    } else {
        syntax(line, format!("expected `{shape}`"))
    }
}

pub fn parse_instance(text: &str) -> Result<AshgInstance, FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(FormatError::MissingHeader)?;
    if header.len() != 4 || header[0] != "p" || header[1] != "ashg" {
        return syntax(hl, "expected `p ashg <n> <arcs>`");
    }
    let n: usize = number(hl, header[2], "a vertex count")?;
    let m: usize = number(hl, header[3], "an arc count")?;
    let mut arcs = Vec::with_capacity(m);
    for (line, toks) in lines {
        if toks[0] != "a" {
            return syntax(line, format!("unexpected `{}`", toks[0]));
        }
        expect_len(line, &toks, 4, "a <u> <v> <w>")?;
        let u = vertex(line, toks[1], n)?;
        let v = vertex(line, toks[2], n)?;
        let w: Weight = number(line, toks[3], "an integer weight")?;
        arcs.push((u, v, w));
    }
    if arcs.len() != m {
        return syntax(hl, format!("header announces {m} arcs but {} follow", arcs.len()));
    }
    Ok(AshgInstance::new(n, arcs)?)
}

pub fn write_instance(instance: &AshgInstance) -> String {
    write_instance_with_comments(instance, &[])
}

/// Comment lines go before the header.
pub fn write_instance_with_comments(instance: &AshgInstance, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        for l in c.lines() {
            let _ = writeln!(out, "c {l}");
        }
    }
    let _ = writeln!(out, "p ashg {} {}", instance.n(), instance.arcs().len());
    for a in instance.arcs() {
        let _ = writeln!(out, "a {} {} {}", a.from + 1, a.to + 1, a.weight);
    }
    out
}

pub fn parse_partition(text: &str) -> Result<Partition, FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(FormatError::MissingHeader)?;
    if header.len() != 4 || header[0] != "s" || header[1] != "part" {
        return syntax(hl, "expected `s part <n> <classes>`");
    }
    let n: usize = number(hl, header[2], "a vertex count")?;
    let k: usize = number(hl, header[3], "a class count")?;
    let mut class = vec![usize::MAX; n];
    for (line, toks) in lines {
        expect_len(line, &toks, 2, "<vertex> <class>")?;
        let v = vertex(line, toks[0], n)?;
        let c: usize = number(line, toks[1], "a class id")?;
        if c == 0 || c > k {
            return syntax(line, format!("class {c} outside 1..={k}"));
        }
        if class[v] != usize::MAX {
            return Err(Error::DuplicateMember(v).into());
        }
        class[v] = c;
    }
    if let Some(v) = class.iter().position(|&c| c == usize::MAX) {
        return Err(Error::MissingMember(v).into());
    }
    let p = Partition::from_labels(&class);
    if p.num_classes() != k {
        return syntax(hl, format!("header announces {k} classes but {} are used", p.num_classes()));
    }
    Ok(p)
}

pub fn write_partition(partition: &Partition) -> String {
    let mut out = format!("s part {} {}\n", partition.len(), partition.num_classes());
    for (v, &c) in partition.labels().iter().enumerate() {
        let _ = writeln!(out, "{} {}", v + 1, c + 1);
    }
    out
}

/// `n` is the vertex count of the instance the decomposition belongs to.
pub fn parse_decomposition(text: &str) -> Result<(TreeDecomposition, usize), FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(FormatError::MissingHeader)?;
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return syntax(hl, "expected `s td <bags> <max bag> <n>`");
    }
    let nb: usize = number(hl, header[2], "a bag count")?;
    let max_bag: usize = number(hl, header[3], "a bag size")?;
    let n: usize = number(hl, header[4], "a vertex count")?;
    let mut bags: Vec<Option<Vec<Vertex>>> = vec![None; nb];
    let mut edges = Vec::new();
    for (line, toks) in lines {
        if toks[0] == "b" {
            if toks.len() < 2 {
                return syntax(line, "expected `b <id> <v>...`");
            }
            let id = vertex(line, toks[1], nb).or_else(|_| syntax(line, format!("bag id outside 1..={nb}")))?;
            if bags[id].is_some() {
                return syntax(line, format!("bag {} listed twice", id + 1));
            }
            let members = toks[2..].iter().map(|t| vertex(line, t, n)).collect::<Result<Vec<_>, _>>()?;
            bags[id] = Some(members);
        } else {
            expect_len(line, &toks, 2, "<bag id> <bag id>")?;
            let a = vertex(line, toks[0], nb)?;
            let b = vertex(line, toks[1], nb)?;
            edges.push((a, b));
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or(FormatError::Syntax { line: hl, msg: format!("bag {} is never listed", i + 1) }))
        .collect::<Result<Vec<_>, _>>()?;
    let td = TreeDecomposition::new(bags, edges);
    if td.max_bag_size() != max_bag {
        return syntax(hl, format!("header announces max bag size {max_bag} but the bags have {}", td.max_bag_size()));
    }
    Ok((td, n))
}

/// Edges are written as sorted `(low, high)` pairs.
pub fn write_decomposition(td: &TreeDecomposition, n: usize) -> String {
    let mut out = format!("s td {} {} {}\n", td.len(), td.max_bag_size(), n);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    let mut edges: Vec<(usize, usize)> = td.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// DIMACS CNF. Clauses may span lines and end with `0`; a line starting
/// with `%` ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, FormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (line, toks) in content_lines(text) {
        last_line = line;
        if toks[0].starts_with('%') {
            break;
        }
        if toks[0] == "p" {
            if header.is_some() {
                return syntax(line, "second `p` line");
            }
            if toks.len() != 4 || toks[1] != "cnf" {
                return syntax(line, "expected `p cnf <vars> <clauses>`");
            }
            header = Some((line, number(line, toks[2], "a variable count")?, number(line, toks[3], "a clause count")?));
            continue;
        }
        let Some((_, n, _)) = header else {
            return Err(FormatError::MissingHeader);
        };
        for t in toks {
            let code: i64 = number(line, t, "a literal")?;
            if code == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let lit = Literal::from_dimacs(code).filter(|l| l.var < n);
            match lit {
                Some(l) => current.push(l),
                None => return syntax(line, format!("literal {code} outside ±1..={n}")),
            }
        }
    }
    let (hl, n, m) = header.ok_or(FormatError::MissingHeader)?;
    if !current.is_empty() {
        return syntax(last_line, "last clause is not terminated by 0");
    }
    if clauses.len() != m {
        return syntax(hl, format!("header announces {m} clauses but {} follow", clauses.len()));
    }
    Ok(CnfFormula::new(n, clauses)?)
}

pub fn write_dimacs(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.num_vars(), phi.num_clauses());
    for c in phi.clauses() {
        for l in c {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Whitespace-separated signed integers; used for item lists and
/// certificates.
pub fn parse_integers(text: &str) -> Result<Vec<i64>, FormatError> {
    let mut out = Vec::new();
    for (line, toks) in content_lines(text) {
        for t in toks {
            out.push(number(line, t, "an integer")?);
        }
    }
    Ok(out)
}

pub fn write_integers(values: &[i64]) -> String {
    let mut out = values.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let text = "c stalker\np ashg 3 2\na 2 1 -1\n\na 1 2 1\n";
        let g = parse_instance(text).unwrap();
        assert_eq!(g.weight(0, 1), 1);
        let canon = write_instance(&g);
        assert_eq!(canon, "p ashg 3 2\na 1 2 1\na 2 1 -1\n");
        assert_eq!(write_instance(&parse_instance(&canon).unwrap()), canon);
    }

    #[test]
    fn instance_errors_carry_line_numbers() {
        let err = parse_instance("p ashg 2 1\na 1 3 1\n").unwrap_err();
        assert_eq!(err, FormatError::Syntax { line: 2, msg: "vertex 3 outside 1..=2".into() });
        assert!(matches!(parse_instance("p ashg 2 2\na 1 2 1\n"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(matches!(parse_instance("a 1 2 1\n"), Err(FormatError::Syntax { line: 1, .. })));
        assert_eq!(parse_instance("c only\n"), Err(FormatError::MissingHeader));
        assert!(matches!(
            parse_instance("p ashg 2 2\na 1 2 1\na 1 2 3\n"),
            Err(FormatError::Invalid(Error::DuplicateArc(0, 1)))
        ));
        assert!(matches!(parse_instance("p ashg 2 1\na 1 2 x\n"), Err(FormatError::Syntax { line: 2, .. })));
    }

    #[test]
    fn partition_round_trip() {
        let text = "s part 4 2\n3 7\n1 2\n2 2\n4 1\n";
        assert!(parse_partition(text).is_err());
        let text = "s part 4 2\n3 2\n1 2\n2 2\n4 1\n";
        let p = parse_partition(text).unwrap();
        assert_eq!(p.coalitions(), vec![vec![0, 1, 2], vec![3]]);
        let canon = write_partition(&p);
        assert_eq!(canon, "s part 4 2\n1 1\n2 1\n3 1\n4 2\n");
        assert_eq!(parse_partition(&canon).unwrap(), p);
    }

    #[test]
    fn partition_membership_errors() {
        assert_eq!(parse_partition("s part 2 1\n1 1\n"), Err(FormatError::Invalid(Error::MissingMember(1))));
        assert_eq!(parse_partition("s part 1 1\n1 1\n1 1\n"), Err(FormatError::Invalid(Error::DuplicateMember(0))));
        assert!(parse_partition("s part 2 3\n1 1\n2 2\n").is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let text = "c path\ns td 2 2 3\nb 2 3 2\nb 1 1 2\n1 2\n";
        let (td, n) = parse_decomposition(text).unwrap();
        assert_eq!(n, 3);
        assert_eq!(td.bags(), &[vec![0, 1], vec![1, 2]]);
        let canon = write_decomposition(&td, n);
        assert_eq!(canon, "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
        let (again, _) = parse_decomposition(&canon).unwrap();
        assert_eq!(write_decomposition(&again, n), canon);
        assert!(parse_decomposition("s td 2 3 3\nb 1 1 2\nb 2 2 3\n1 2\n").is_err());
        assert!(parse_decomposition("s td 2 2 3\nb 1 1 2\n").is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 3 2\n1 -3\n0 2 3 -1 0\n%\n0\n";
        let phi = parse_dimacs(text).unwrap();
        assert_eq!(phi.num_clauses(), 2);
        let canon = write_dimacs(&phi);
        assert_eq!(canon, "p cnf 3 2\n1 -3 -3 0\n2 3 -1 0\n");
        assert_eq!(write_dimacs(&parse_dimacs(&canon).unwrap()), canon);
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
    }

    #[test]
    fn integer_lists() {
        assert_eq!(parse_integers("c items\n3 3\n 3\n").unwrap(), vec![3, 3, 3]);
        assert_eq!(write_integers(&[1, -2]), "1 -2\n");
        assert!(parse_integers("1 two").is_err());
    }
}
