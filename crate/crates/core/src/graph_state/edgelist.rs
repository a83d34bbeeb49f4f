//! Plain-text edge lists.
//!
//! ```text
//! graphstate v1 4
//! # in: 0
//! # out: 3
//! # premeasure: 1 Y
//! 0 1
//! 1 2
//! 2 3
//! ```
//!
//! The header gives the vertex count. Each data line is one edge `u v`;
//! export writes `u < v` in ascending order. Lines starting with `#` are
//! comments, except the attachment annotations shown above.

use std::fmt::Write;

use super::pauli::Pauli;
use super::register::GraphRegister;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub premeasure: Vec<(usize, Pauli)>,
}

pub fn write_edge_list(reg: &GraphRegister) -> String {
    write_annotated(reg, &Annotations::default())
}

pub fn write_annotated(reg: &GraphRegister, ann: &Annotations) -> String {
    let mut s = format!("graphstate v1 {}\n", reg.vertex_count());
    for v in &ann.inputs {
        writeln!(s, "# in: {v}").unwrap();
    }
    for v in &ann.outputs {
        writeln!(s, "# out: {v}").unwrap();
    }
    for (v, p) in &ann.premeasure {
        writeln!(s, "# premeasure: {v} {p}").unwrap();
    }
    for (u, v) in reg.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_vertex(tok: &str, n: usize, line: usize) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| perr(line, format!("bad vertex id {tok:?}")))?;
    if v >= n {
        return Err(perr(line, format!("vertex {v} out of range for {n} vertices")));
    }
    Ok(v)
}

pub fn read_edge_list(text: &str) -> Result<(GraphRegister, Annotations)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let n = match parts.as_slice() {
        ["graphstate", "v1", n] => n.parse::<usize>().map_err(|_| perr(hl, "bad vertex count"))?,
        _ => return Err(perr(hl, "expected `graphstate v1 <n>`")),
    };
    let mut reg = GraphRegister::new(n);
    let mut ann = Annotations::default();
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("in:") {
                ann.inputs.push(parse_vertex(v.trim(), n, ln)?);
            } else if let Some(v) = rest.strip_prefix("out:") {
                ann.outputs.push(parse_vertex(v.trim(), n, ln)?);
            } else if let Some(v) = rest.strip_prefix("premeasure:") {
                let toks: Vec<&str> = v.split_whitespace().collect();
                let [vt, bt] = toks.as_slice() else {
                    return Err(perr(ln, "expected `# premeasure: <v> <X|Y|Z>`"));
                };
                let basis = match *bt {
                    "X" => Pauli::X,
                    "Y" => Pauli::Y,
                    "Z" => Pauli::Z,
                    other => return Err(perr(ln, format!("unknown basis {other:?}"))),
                };
                ann.premeasure.push((parse_vertex(vt, n, ln)?, basis));
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = toks.as_slice() else {
            return Err(perr(ln, "expected `u v`"));
        };
        let (a, b) = (parse_vertex(a, n, ln)?, parse_vertex(b, n, ln)?);
        if a == b {
            return Err(perr(ln, "self loop"));
        }
        if reg.has_edge(a, b) {
            return Err(perr(ln, format!("duplicate edge {a} {b}")));
        }
        reg.toggle_edge(a, b);
    }
    Ok((reg, ann))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let reg = GraphRegister::from_edges(4, &[(2, 1), (0, 3), (1, 0)]).unwrap();
        let text = write_edge_list(&reg);
        assert_eq!(text, "graphstate v1 4\n0 1\n0 3\n1 2\n");
        let (back, _) = read_edge_list(&text).unwrap();
        assert_eq!(back, reg);
    }

    #[test]
    fn annotations() {
        let text = "graphstate v1 3\n# in: 0\n# out: 2\n# premeasure: 1 Y\n0 1\n1 2\n";
        let (reg, ann) = read_edge_list(text).unwrap();
        assert_eq!(ann.inputs, vec![0]);
        assert_eq!(ann.outputs, vec![2]);
        assert_eq!(ann.premeasure, vec![(1, Pauli::Y)]);
        assert_eq!(write_annotated(&reg, &ann), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_edge_list("graph v1 3\n").is_err());
        assert!(read_edge_list("graphstate v1 2\n0 2\n").is_err());
        assert!(read_edge_list("graphstate v1 2\n1 1\n").is_err());
        assert!(read_edge_list("graphstate v1 2\n0 1\n1 0\n").is_err());
    }
}
