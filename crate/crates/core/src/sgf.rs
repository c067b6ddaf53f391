//! SGF1, the line-oriented text format for Schreier graphs.
//!
//! ```text
//! SGF1
//! gens <d>
//! label <index> <name> inv <index>      (d lines)
//! vertices <n> root <r> [truncated <R>]
//! e <v> <label-index> <w>               (one per defined slot)
//! b <v>                                 (one per boundary vertex)
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{SchreierGraph, NO_EDGE};
use crate::words::GenSet;

pub fn serialize(g: &SchreierGraph) -> String {
    let mut out = String::new();
    let gens = g.gens();
    out.push_str("SGF1\n");
    let _ = writeln!(out, "gens {}", gens.degree());
    for l in 0..gens.degree() {
        let _ = writeln!(out, "label {} {} inv {}", l, gens.name(l), gens.inv(l));
    }
    let _ = write!(out, "vertices {} root {}", g.vertex_count(), g.root());
    if let Some(r) = g.truncation() {
        let _ = write!(out, " truncated {r}");
    }
    out.push('\n');
    for v in 0..g.vertex_count() {
        for (l, w) in g.neighbors(v) {
            let _ = writeln!(out, "e {v} {l} {w}");
        }
    }
    for v in g.boundary_vertices() {
        let _ = writeln!(out, "b {v}");
    }
    out
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn int(line: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse::<usize>().map_err(|_| perr(line, format!("{what} `{tok}` is not a decimal integer")))
}

fn keyword(line: usize, tok: Option<&str>, want: &str) -> Result<()> {
    match tok {
        Some(t) if t == want => Ok(()),
        Some(t) => Err(perr(line, format!("expected `{want}`, found `{t}`"))),
        None => Err(perr(line, format!("expected `{want}`"))),
    }
}

fn no_more<'a>(line: usize, mut toks: impl Iterator<Item = &'a str>) -> Result<()> {
    match toks.next() {
        Some(t) => Err(perr(line, format!("unexpected trailing field `{t}`"))),
        None => Ok(()),
    }
}

pub fn parse(text: &str) -> Result<SchreierGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = |what: &str| lines.next().ok_or_else(|| perr(0, format!("unexpected end of input, expected {what}")));

    let (ln, l) = next_line("header")?;
    if l != "SGF1" {
        return Err(perr(ln, "missing SGF1 header"));
    }
    let (ln, l) = next_line("gens line")?;
    let mut t = l.split(' ');
    keyword(ln, t.next(), "gens")?;
    let d = int(ln, t.next(), "degree")?;
    no_more(ln, t)?;
    if d == 0 {
        return Err(perr(ln, "degree must be positive"));
    }
    let mut names = Vec::with_capacity(d);
    let mut inv = Vec::with_capacity(d);
    for i in 0..d {
        let (ln, l) = next_line("label line")?;
        let mut t = l.split(' ');
        keyword(ln, t.next(), "label")?;
        let idx = int(ln, t.next(), "label index")?;
        if idx != i {
            return Err(perr(ln, format!("label index {idx} out of order, expected {i}")));
        }
        let name = t.next().ok_or_else(|| perr(ln, "missing label name"))?;
        keyword(ln, t.next(), "inv")?;
        let j = int(ln, t.next(), "inverse index")?;
        no_more(ln, t)?;
        names.push(name.to_string());
        inv.push(j);
    }
    let gens = GenSet::new(names, inv)?;

    let (ln, l) = next_line("vertices line")?;
    let mut t = l.split(' ');
    keyword(ln, t.next(), "vertices")?;
    let n = int(ln, t.next(), "vertex count")?;
    keyword(ln, t.next(), "root")?;
    let root = int(ln, t.next(), "root")?;
    let truncation = match t.next() {
        None => None,
        Some("truncated") => {
            let r = int(ln, t.next(), "truncation radius")?;
            Some(u32::try_from(r).map_err(|_| perr(ln, "truncation radius too large"))?)
        }
        Some(other) => return Err(perr(ln, format!("unexpected field `{other}`"))),
    };
    no_more(ln, t)?;
    if n == 0 {
        return Err(perr(ln, "graph has no vertices"));
    }
    if n >= NO_EDGE as usize {
        return Err(perr(ln, "too many vertices"));
    }
    if root >= n {
        return Err(perr(ln, format!("root {root} is not a vertex")));
    }

    let mut next = vec![NO_EDGE; n * d];
    let mut boundary = vec![false; n];
    for (ln, l) in lines {
        if l.is_empty() {
            return Err(perr(ln, "empty line"));
        }
        let mut t = l.split(' ');
        match t.next() {
            Some("e") => {
                let v = int(ln, t.next(), "source vertex")?;
                let lab = int(ln, t.next(), "label index")?;
                let w = int(ln, t.next(), "target vertex")?;
                no_more(ln, t)?;
                if v >= n || w >= n {
                    return Err(perr(ln, "edge endpoint is not a vertex"));
                }
                if lab >= d {
                    return Err(perr(ln, format!("label index {lab} out of range")));
                }
                if next[v * d + lab] != NO_EDGE {
                    return Err(perr(ln, format!("slot ({v},{}) defined twice", gens.name(lab))));
                }
                next[v * d + lab] = w as u32;
            }
            Some("b") => {
                let v = int(ln, t.next(), "boundary vertex")?;
                no_more(ln, t)?;
                if v >= n {
                    return Err(perr(ln, "boundary vertex is not a vertex"));
                }
                boundary[v] = true;
            }
            Some(other) => return Err(perr(ln, format!("unknown record `{other}`"))),
            None => return Err(perr(ln, "empty line")),
        }
    }
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(perr(text.lines().count(), "last line is not newline-terminated"));
    }
    SchreierGraph::new(gens, root, next, boundary, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PermAction;

    fn c3() -> SchreierGraph {
        crate::builders::from_perm_action(&PermAction::cyclic(3).unwrap(), 0)
    }

    #[test]
    fn c3_text_is_exact() {
        let text = serialize(&c3());
        let expected = "SGF1\ngens 2\nlabel 0 t inv 1\nlabel 1 T inv 0\nvertices 3 root 0\n\
e 0 0 1\ne 0 1 2\ne 1 0 2\ne 1 1 0\ne 2 0 0\ne 2 1 1\n";
        assert_eq!(text, expected);
        assert_eq!(parse(&text).unwrap(), c3());
    }

    #[test]
    fn inconsistent_edge_diagnostic() {
        let text = "SGF1\ngens 2\nlabel 0 a inv 1\nlabel 1 A inv 0\nvertices 3 root 0\n\
e 0 0 1\ne 0 1 2\ne 1 0 2\ne 1 1 2\ne 2 0 0\ne 2 1 1\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.to_string(), "label-consistency violated at edge (0,a)");
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let err = parse("SGF1\ngens x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse("SGF2\n").is_err());
        let missing_newline = serialize(&c3());
        assert!(parse(missing_newline.trim_end()).is_err());
    }

    #[test]
    fn truncated_round_trip() {
        let ball = crate::builders::free_ball(2, 2);
        let text = serialize(&ball);
        assert!(text.contains("truncated 2"));
        assert_eq!(parse(&text).unwrap(), ball);
    }
}
