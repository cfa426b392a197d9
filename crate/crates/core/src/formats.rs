//! Text formats: `.states`, `.hasse`, `.seqs` and `.semilattice`.
//!
//! Every format is UTF-8 and line based. Blank lines and lines starting with
//! `#` are ignored. Line numbers in parse errors are 1-based.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::quasi_ordinal::HasseDiagram;
use crate::semilattice::SemilatticeTable;
use crate::sequence_space::SequenceSpace;
use crate::space_any::AnySpace;
use crate::state::{Domain, SharedDomain};

/// The file formats understood by [`parse_space`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    States,
    Hasse,
    Seqs,
}

impl Format {
    /// Format named by a file extension.
    pub fn from_extension(ext: &str) -> Option<Format> {
        match ext {
            "states" => Some(Format::States),
            "hasse" => Some(Format::Hasse),
            "seqs" => Some(Format::Seqs),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Result<Format> {
        path.extension()
            .and_then(|e| e.to_str())
            .and_then(Format::from_extension)
            .ok_or_else(|| Error::Validation(format!("{}: expected a .states, .hasse or .seqs file", path.display())))
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::States => "states",
            Format::Hasse => "hasse",
            Format::Seqs => "seqs",
        }
    }
}

/// Non-comment, non-blank lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Validation(m) => Error::parse(line, m),
        other => other,
    })
}

fn header<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    text.strip_prefix(key)
        .and_then(|r| r.strip_prefix(':'))
        .map(str::trim)
        .ok_or_else(|| Error::parse(line, format!("expected `{key}: ...`")))
}

fn parse_domain<'a, I: Iterator<Item = (usize, &'a str)>>(lines: &mut I) -> Result<SharedDomain> {
    let (line, first) = lines.next().ok_or_else(|| Error::parse(1, "missing `domain:` header"))?;
    let rest = header(line, first, "domain")?;
    let labels: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(',').map(str::trim).collect() };
    Ok(Arc::new(at_line(line, Domain::new(labels))?))
}

fn domain_line(d: &Domain) -> String {
    format!("domain: {}\n", d.labels().join(","))
}

/// Parses a `.states` file; duplicate states are dropped.
pub fn parse_states(text: &str) -> Result<SetFamily> {
    let mut lines = content_lines(text);
    let domain = parse_domain(&mut lines)?;
    let mut family = SetFamily::new(domain.clone());
    for (line, l) in lines {
        let s = at_line(line, domain.parse_state(l))?;
        family.insert(s)?;
    }
    Ok(family)
}

/// One state per line, in family order.
pub fn write_states(f: &SetFamily) -> String {
    let d = f.domain();
    let mut out = domain_line(d);
    for s in f.iter() {
        out.push_str(&d.format_state(s));
        out.push('\n');
    }
    out
}

/// Parses a `.hasse` file of `edge X Y` lines.
pub fn parse_hasse(text: &str) -> Result<HasseDiagram> {
    let mut lines = content_lines(text);
    let domain = parse_domain(&mut lines)?;
    let mut edges = Vec::new();
    let mut last = 1;
    for (line, l) in lines {
        last = line;
        let parts: Vec<&str> = l.split_whitespace().collect();
        match parts.as_slice() {
            ["edge", x, y] => {
                let x = at_line(line, domain.require(x))?;
                let y = at_line(line, domain.require(y))?;
                edges.push((x, y));
            }
            _ => return Err(Error::parse(line, format!("expected `edge X Y`, got `{l}`"))),
        }
    }
    HasseDiagram::new(domain, edges).map_err(|e| match e {
        Error::Validation(m) => Error::parse(last, m),
        other => other,
    })
}

pub fn write_hasse(h: &HasseDiagram) -> String {
    let d = h.domain();
    let mut out = domain_line(d);
    for &(x, y) in h.edges() {
        out.push_str(&format!("edge {} {}\n", d.label(x), d.label(y)));
    }
    out
}

/// Parses a `.seqs` file, one comma-separated sequence per line.
pub fn parse_seqs(text: &str) -> Result<SequenceSpace> {
    let mut lines = content_lines(text);
    let domain = parse_domain(&mut lines)?;
    let mut seqs = Vec::new();
    for (line, l) in lines {
        let seq = l.split(',').map(|x| at_line(line, domain.require(x.trim()))).collect::<Result<Vec<_>>>()?;
        let before = seqs.len();
        seqs.push(seq);
        at_line(line, SequenceSpace::new(domain.clone(), seqs[before..].to_vec()).map(|_| ()))?;
    }
    if seqs.is_empty() && !domain.is_empty() {
        return Err(Error::parse(1, "no sequences"));
    }
    SequenceSpace::new(domain, seqs)
}

pub fn write_seqs(sp: &SequenceSpace) -> String {
    let mut out = domain_line(sp.domain());
    for i in 0..sp.k() {
        out.push_str(&sp.format_sequence(i));
        out.push('\n');
    }
    out
}

/// Parses a `.semilattice` file: `objects: m`, `identity: i`, then `m` rows
/// of `m` space-separated object indices.
pub fn parse_semilattice(text: &str) -> Result<SemilatticeTable> {
    let mut lines = content_lines(text);
    let (l1, t1) = lines.next().ok_or_else(|| Error::parse(1, "missing `objects:` header"))?;
    let m: usize = header(l1, t1, "objects")?.parse().map_err(|_| Error::parse(l1, "object count is not a number"))?;
    let (l2, t2) = lines.next().ok_or_else(|| Error::parse(l1 + 1, "missing `identity:` header"))?;
    let identity: usize = header(l2, t2, "identity")?.parse().map_err(|_| Error::parse(l2, "identity is not a number"))?;
    let mut rows = Vec::with_capacity(m);
    let mut last = l2;
    for (line, l) in lines {
        last = line;
        if rows.len() == m {
            return Err(Error::parse(line, format!("more than {m} rows")));
        }
        let row = l
            .split_whitespace()
            .map(|v| v.parse::<usize>().map_err(|_| Error::parse(line, format!("`{v}` is not an object index"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != m {
            return Err(Error::parse(line, format!("row has {} entries, expected {m}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != m {
        return Err(Error::parse(last, format!("expected {m} rows, found {}", rows.len())));
    }
    SemilatticeTable::new(rows, identity)
}

pub fn write_semilattice(t: &SemilatticeTable) -> String {
    let rows = t.rows();
    let mut out = format!("objects: {}\nidentity: {}\n", rows.len(), t.identity());
    for r in rows {
        out.push_str(&r.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

/// Parses a space in the given format.
pub fn parse_space(text: &str, format: Format) -> Result<AnySpace> {
    Ok(match format {
        Format::States => {
            let f = parse_states(text)?;
            if !f.is_learning_space() {
                return Err(Error::Validation("the states do not form a learning space".into()));
            }
            AnySpace::Explicit(f)
        }
        Format::Hasse => AnySpace::Hasse(parse_hasse(text)?),
        Format::Seqs => AnySpace::Sequences(parse_seqs(text)?),
    })
}

/// Serializes a space in its own format.
pub fn write_space(space: &AnySpace) -> String {
    match space {
        AnySpace::Explicit(f) => write_states(f),
        AnySpace::Hasse(h) => write_hasse(h),
        AnySpace::Sequences(s) => write_seqs(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_round_trip() {
        let text = "domain: A,B,C\n{}\nA\nC\nA,B\nA,C\nB,C\nA,B,C\n";
        let f = parse_states(text).unwrap();
        assert_eq!(f.len(), 7);
        assert_eq!(write_states(&f), text);
        let noisy = "# comment\n\ndomain: A,B,C\n{}\nA\nA\n";
        let g = parse_states(noisy).unwrap();
        assert_eq!(write_states(&g), "domain: A,B,C\n{}\nA\n");
        assert_eq!(write_states(&parse_states(&write_states(&g)).unwrap()), write_states(&g));
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(parse_states("domain: A,B\n{}\nA,Q\n").unwrap_err(), Error::parse(3, "unknown concept `Q`"));
        assert!(matches!(parse_states("A,B\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_hasse("domain: A,B\nedge A\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_seqs("domain: A,B\nA,B\nA,A\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_semilattice("objects: 2\nidentity: 0\n0 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_semilattice("objects: x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_hasse("domain: A,B\nedge A B\nedge B A\n"), Err(Error::Structural(_))));
    }

    #[test]
    fn hasse_and_seqs_round_trip() {
        let text = "domain: A,B,C\nedge A B\nedge A C\n";
        let h = parse_hasse(text).unwrap();
        assert_eq!(write_hasse(&h), text);
        let text = "domain: A,B,C\nA,B,C\nC,B,A\n";
        let s = parse_seqs(text).unwrap();
        assert_eq!(s.k(), 2);
        assert_eq!(write_seqs(&s), text);
    }

    #[test]
    fn semilattice_round_trip() {
        let text = "objects: 3\nidentity: 0\n0 1 2\n1 1 2\n2 2 2\n";
        let t = parse_semilattice(text).unwrap();
        assert_eq!(write_semilattice(&t), text);
    }

    #[test]
    fn formats_from_paths() {
        assert_eq!(Format::from_path(Path::new("x/y.hasse")).unwrap(), Format::Hasse);
        assert!(Format::from_path(Path::new("x.txt")).is_err());
        let sp = parse_space("domain: A,B\n{}\nB\n", Format::States).unwrap();
        assert_eq!(write_space(&sp), "domain: A,B\n{}\nB\n");
        assert!(parse_space("domain: A,B\n{}\nA,B\n", Format::States).is_err());
    }
}
