//! A small SPICE-flavoured netlist format for passive networks.
//!
//! ```text
//! title line
//! * comment
//! R<name> <n+> <n-> <value>
//! L<name> <n+> <n-> <value> [Q=<value>]
//! C<name> <n+> <n-> <value> [Q=<value>]
//! K<name> L<name> L<name> <k>
//! P<idx> <n+> <n-> <ref-ohms>
//! .ac lin <count> <f-start> <f-stop>
//! .end
//! ```
//!
//! Element names and value suffixes are case-insensitive. Node `0` is
//! ground. A trailing `; text` on an element line is kept as a comment.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetlistErrorKind {
    UnknownElement,
    UnknownDirective,
    DuplicateName,
    MalformedValue,
    UnknownSuffix,
    EmptyNumber,
    NonPositiveValue,
    WrongFieldCount,
    DanglingK,
    CouplingOutOfRange,
    MissingGround,
    MissingAc,
    DuplicateAc,
    BadAc,
    PortNumbering,
    EmptyInput,
}

impl fmt::Display for NetlistErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::UnknownElement => "unknown element kind",
            Self::UnknownDirective => "unknown directive",
            Self::DuplicateName => "duplicate name",
            Self::MalformedValue => "malformed value",
            Self::UnknownSuffix => "unknown suffix",
            Self::EmptyNumber => "empty numeric part",
            Self::NonPositiveValue => "non-positive value",
            Self::WrongFieldCount => "wrong number of fields",
            Self::DanglingK => "dangling K reference",
            Self::CouplingOutOfRange => "coupling magnitude above 1",
            Self::MissingGround => "missing ground",
            Self::MissingAc => "missing .ac",
            Self::DuplicateAc => "duplicate .ac",
            Self::BadAc => "bad .ac sweep",
            Self::PortNumbering => "ports must be numbered 1..N with positive reference",
            Self::EmptyInput => "empty input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} '{token}', line {line}")]
pub struct NetlistError {
    pub line: usize,
    pub token: String,
    pub kind: NetlistErrorKind,
}

impl NetlistError {
    fn new(line: usize, token: impl Into<String>, kind: NetlistErrorKind) -> Self {
        Self { line, token: token.into(), kind }
    }
}

/// Linear frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcSweep {
    pub count: usize,
    pub start: f64,
    pub stop: f64,
}

impl AcSweep {
    pub fn new(count: usize, start: f64, stop: f64) -> Self {
        Self { count, start, stop }
    }

    pub fn is_valid(&self) -> bool {
        self.count >= 1
            && self.start > 0.0
            && self.start.is_finite()
            && self.stop.is_finite()
            && (self.stop > self.start || (self.count == 1 && self.stop >= self.start))
    }

    /// `start + i·step`; a grid with twice the points lands on the same
    /// values at shared indices.
    pub fn frequencies(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + i as f64 * step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Resistor { nodes: (String, String), value: f64 },
    Inductor { nodes: (String, String), value: f64, q: Option<f64> },
    Capacitor { nodes: (String, String), value: f64, q: Option<f64> },
    Coupling { inductors: (String, String), k: f64 },
    Port { index: usize, nodes: (String, String), z_ref: f64 },
}

impl ElementKind {
    pub fn nodes(&self) -> Option<(&str, &str)> {
        match self {
            ElementKind::Resistor { nodes, .. }
            | ElementKind::Inductor { nodes, .. }
            | ElementKind::Capacitor { nodes, .. }
            | ElementKind::Port { nodes, .. } => Some((&nodes.0, &nodes.1)),
            ElementKind::Coupling { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetlistElement {
    pub name: String,
    pub kind: ElementKind,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Element(NetlistElement),
    /// Full comment line, leading `*` included.
    Comment(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub title: String,
    pub items: Vec<Item>,
    pub analysis: AcSweep,
}

impl Netlist {
    pub fn elements(&self) -> impl Iterator<Item = &NetlistElement> {
        self.items.iter().filter_map(|i| match i {
            Item::Element(e) => Some(e),
            Item::Comment(_) => None,
        })
    }

    pub fn element(&self, name: &str) -> Option<&NetlistElement> {
        self.elements().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    pub fn element_mut(&mut self, name: &str) -> Option<&mut NetlistElement> {
        self.items.iter_mut().find_map(|i| match i {
            Item::Element(e) if e.name.eq_ignore_ascii_case(name) => Some(e),
            _ => None,
        })
    }

    /// Ports ordered by index.
    pub fn ports(&self) -> Vec<(usize, (&str, &str), f64)> {
        let mut out: Vec<_> = self
            .elements()
            .filter_map(|e| match &e.kind {
                ElementKind::Port { index, nodes, z_ref } => {
                    Some((*index, (nodes.0.as_str(), nodes.1.as_str()), *z_ref))
                }
                _ => None,
            })
            .collect();
        out.sort_by_key(|p| p.0);
        out
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.analysis.frequencies()
    }
}

const SUFFIXES: [(&str, i32); 10] = [
    ("meg", 6),
    ("f", -15),
    ("p", -12),
    ("n", -9),
    ("u", -6),
    ("m", -3),
    ("k", 3),
    ("g", 9),
    ("t", 12),
    ("", 0),
];

/// Splits a numeric token into `(mantissa-and-exponent, suffix)`.
fn split_number(token: &str) -> (&str, &str) {
    let b = token.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    token.split_at(i)
}

/// Parses `200p`, `3MEG`, `4.7e-3k` and friends. Scaling is done on the
/// decimal exponent, so a rendered value parses back bit-exactly.
pub fn parse_value(token: &str) -> Result<f64, NetlistErrorKind> {
    let (num, suffix) = split_number(token);
    let digits = num.trim_start_matches(['+', '-']);
    let mantissa_part = digits.split(['e', 'E']).next().unwrap_or("");
    if !mantissa_part.bytes().any(|c| c.is_ascii_digit()) {
        return Err(NetlistErrorKind::EmptyNumber);
    }
    let lower = suffix.to_ascii_lowercase();
    let scale = SUFFIXES
        .iter()
        .find(|(s, _)| *s == lower)
        .map(|(_, e)| *e)
        .ok_or(NetlistErrorKind::UnknownSuffix)?;
    let (mant, exp) = match num.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = num[pos + 1..].parse().map_err(|_| NetlistErrorKind::MalformedValue)?;
            (&num[..pos], e)
        }
        None => (num, 0),
    };
    if mant.matches('.').count() > 1 {
        return Err(NetlistErrorKind::MalformedValue);
    }
    format!("{mant}e{}", exp + scale).parse::<f64>().map_err(|_| NetlistErrorKind::MalformedValue)
}

/// Engineering-suffix rendering using the shortest round-trip digits.
pub fn render_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0".into() } else { format!("{v}") };
    }
    let sci = format!("{:e}", v.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let eng = exp.div_euclid(3) * 3;
    let suffix = match eng {
        -15 => "f",
        -12 => "p",
        -9 => "n",
        -6 => "u",
        -3 => "m",
        0 => "",
        3 => "k",
        6 => "meg",
        9 => "g",
        12 => "t",
        _ => return format!("{}{}", if v < 0.0 { "-" } else { "" }, sci),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let point = 1 + (exp - eng) as usize;
    let mut digits = digits;
    while digits.len() < point {
        digits.push('0');
    }
    let (int, frac) = digits.split_at(point);
    let sign = if v < 0.0 { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}{suffix}")
    } else {
        format!("{sign}{int}.{frac}{suffix}")
    }
}

fn render_plain(v: f64) -> String {
    format!("{v:?}")
}

fn is_ground(node: &str) -> bool {
    node == "0"
}

pub fn parse(text: &str) -> Result<Netlist, NetlistError> {
    use NetlistErrorKind as E;
    let mut lines = text.lines().enumerate();
    let title = match lines.next() {
        Some((_, t)) => t.trim_end().to_string(),
        None => return Err(NetlistError::new(1, "", E::EmptyInput)),
    };
    let mut items = Vec::new();
    let mut analysis: Option<AcSweep> = None;
    let mut names: HashSet<String> = HashSet::new();
    let mut inductors: HashSet<String> = HashSet::new();
    let mut couplings: Vec<(usize, String, String)> = Vec::new();
    let mut last_line = 1;

    for (idx, raw) in lines {
        let lineno = idx + 1;
        last_line = lineno;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('*') {
            items.push(Item::Comment(trimmed.to_string()));
            continue;
        }
        let (body, comment) = match trimmed.split_once(';') {
            Some((b, c)) => (b.trim(), Some(c.trim().to_string())),
            None => (trimmed, None),
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let head = fields[0];
        let value = |tok: &str| parse_value(tok).map_err(|k| NetlistError::new(lineno, tok, k));
        if head.starts_with('.') {
            match head.to_ascii_lowercase().as_str() {
                ".end" => break,
                ".ac" => {
                    if analysis.is_some() {
                        return Err(NetlistError::new(lineno, head, E::DuplicateAc));
                    }
                    if fields.len() != 5 || !fields[1].eq_ignore_ascii_case("lin") {
                        return Err(NetlistError::new(lineno, body, E::BadAc));
                    }
                    let count: usize = fields[2]
                        .parse()
                        .map_err(|_| NetlistError::new(lineno, fields[2], E::MalformedValue))?;
                    let sweep = AcSweep::new(count, value(fields[3])?, value(fields[4])?);
                    if !sweep.is_valid() {
                        return Err(NetlistError::new(lineno, body, E::BadAc));
                    }
                    analysis = Some(sweep);
                }
                _ => return Err(NetlistError::new(lineno, head, E::UnknownDirective)),
            }
            continue;
        }
        let key = head.to_ascii_lowercase();
        if !names.insert(key.clone()) {
            return Err(NetlistError::new(lineno, head, E::DuplicateName));
        }
        let two = |a: &str, b: &str| (a.to_string(), b.to_string());
        let letter = head.chars().next().unwrap().to_ascii_uppercase();
        let kind = match letter {
            'R' | 'L' | 'C' => {
                let mut q = None;
                let mut positional = Vec::new();
                for f in &fields[1..] {
                    if f.len() > 2 && f[..2].eq_ignore_ascii_case("q=") && letter != 'R' {
                        let qv = value(&f[2..])?;
                        if !(qv > 0.0) {
                            return Err(NetlistError::new(lineno, *f, E::NonPositiveValue));
                        }
                        q = Some(qv);
                    } else {
                        positional.push(*f);
                    }
                }
                if positional.len() != 3 {
                    return Err(NetlistError::new(lineno, body, E::WrongFieldCount));
                }
                let v = value(positional[2])?;
                let ok = match letter {
                    'C' => v >= 0.0,
                    _ => v > 0.0,
                };
                if !ok || !v.is_finite() {
                    return Err(NetlistError::new(lineno, positional[2], E::NonPositiveValue));
                }
                let nodes = two(positional[0], positional[1]);
                match letter {
                    'R' => ElementKind::Resistor { nodes, value: v },
                    'L' => {
                        inductors.insert(key.clone());
                        ElementKind::Inductor { nodes, value: v, q }
                    }
                    _ => ElementKind::Capacitor { nodes, value: v, q },
                }
            }
            'K' => {
                if fields.len() != 4 {
                    return Err(NetlistError::new(lineno, body, E::WrongFieldCount));
                }
                let k = value(fields[3])?;
                if !(k.abs() <= 1.0) {
                    return Err(NetlistError::new(lineno, fields[3], E::CouplingOutOfRange));
                }
                couplings.push((lineno, fields[1].to_string(), fields[2].to_string()));
                ElementKind::Coupling { inductors: two(fields[1], fields[2]), k }
            }
            'P' => {
                if fields.len() != 4 {
                    return Err(NetlistError::new(lineno, body, E::WrongFieldCount));
                }
                let index: usize = head[1..]
                    .parse()
                    .map_err(|_| NetlistError::new(lineno, head, E::PortNumbering))?;
                let z_ref = value(fields[3])?;
                if !(z_ref > 0.0) {
                    return Err(NetlistError::new(lineno, fields[3], E::PortNumbering));
                }
                ElementKind::Port { index, nodes: two(fields[1], fields[2]), z_ref }
            }
            _ => return Err(NetlistError::new(lineno, head, E::UnknownElement)),
        };
        items.push(Item::Element(NetlistElement { name: head.to_string(), kind, comment }));
    }

    for (line, a, b) in &couplings {
        for l in [a, b] {
            if !inductors.contains(&l.to_ascii_lowercase()) {
                return Err(NetlistError::new(*line, l.as_str(), E::DanglingK));
            }
        }
    }
    let netlist = Netlist {
        title,
        items,
        analysis: analysis.ok_or_else(|| NetlistError::new(last_line, "", E::MissingAc))?,
    };
    let mut has_nodes = false;
    let mut has_ground = false;
    for e in netlist.elements() {
        if let Some((a, b)) = e.kind.nodes() {
            has_nodes = true;
            has_ground |= is_ground(a) || is_ground(b);
        }
    }
    if has_nodes && !has_ground {
        return Err(NetlistError::new(last_line, "0", E::MissingGround));
    }
    let ports = netlist.ports();
    for (i, p) in ports.iter().enumerate() {
        if p.0 != i + 1 {
            return Err(NetlistError::new(last_line, format!("P{}", p.0), E::PortNumbering));
        }
    }
    Ok(netlist)
}

fn render_element(e: &NetlistElement) -> String {
    let mut s = match &e.kind {
        ElementKind::Resistor { nodes, value } => {
            format!("{} {} {} {}", e.name, nodes.0, nodes.1, render_value(*value))
        }
        ElementKind::Inductor { nodes, value, q } | ElementKind::Capacitor { nodes, value, q } => {
            let mut s = format!("{} {} {} {}", e.name, nodes.0, nodes.1, render_value(*value));
            if let Some(q) = q {
                s.push_str(&format!(" Q={}", render_plain(*q)));
            }
            s
        }
        ElementKind::Coupling { inductors, k } => {
            format!("{} {} {} {}", e.name, inductors.0, inductors.1, render_plain(*k))
        }
        ElementKind::Port { nodes, z_ref, .. } => {
            format!("{} {} {} {}", e.name, nodes.0, nodes.1, render_value(*z_ref))
        }
    };
    if let Some(c) = &e.comment {
        s.push_str(" ; ");
        s.push_str(c);
    }
    s
}

/// Canonical text form: title, items in declaration order, `.ac` last.
pub fn serialize(n: &Netlist) -> String {
    let mut out = String::new();
    out.push_str(&n.title);
    out.push('\n');
    for item in &n.items {
        match item {
            Item::Comment(c) => out.push_str(c),
            Item::Element(e) => out.push_str(&render_element(e)),
        }
        out.push('\n');
    }
    out.push_str(&format!(
        ".ac lin {} {} {}\n",
        n.analysis.count,
        render_value(n.analysis.start),
        render_value(n.analysis.stop)
    ));
    out
}

/// Case-insensitive lookup of element values by name, used when
/// comparing netlists produced by different routes.
pub fn value_map(n: &Netlist) -> HashMap<String, f64> {
    n.elements()
        .filter_map(|e| {
            let v = match &e.kind {
                ElementKind::Resistor { value, .. }
                | ElementKind::Inductor { value, .. }
                | ElementKind::Capacitor { value, .. } => *value,
                ElementKind::Coupling { k, .. } => *k,
                ElementKind::Port { z_ref, .. } => *z_ref,
            };
            Some((e.name.to_ascii_lowercase(), v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn value_suffixes() {
        assert_eq!(parse_value("200p"), Ok(2.0e-10));
        assert_eq!(parse_value("3MEG"), Ok(3.0e6));
        assert_eq!(parse_value("3m"), Ok(3.0e-3));
        assert_eq!(parse_value("3M"), Ok(3.0e-3));
        assert_eq!(parse_value("4.039p"), Ok(4.039e-12));
        assert_eq!(parse_value("1.5e3k"), Ok(1.5e6));
        assert_eq!(parse_value("-2.5"), Ok(-2.5));
        assert_eq!(parse_value("28g"), Ok(28e9));
        assert_eq!(parse_value("10x"), Err(NetlistErrorKind::UnknownSuffix));
        assert_eq!(parse_value("p"), Err(NetlistErrorKind::EmptyNumber));
        assert_eq!(parse_value(""), Err(NetlistErrorKind::EmptyNumber));
        assert_eq!(parse_value("1.2.3"), Err(NetlistErrorKind::MalformedValue));
    }

    #[test]
    fn renders_with_suffix() {
        assert_eq!(render_value(2.0e-10), "200p");
        assert_eq!(render_value(4.039e-12), "4.039p");
        assert_eq!(render_value(3.0e6), "3meg");
        assert_eq!(render_value(50.0), "50");
        assert_eq!(render_value(1.5e-18), "1.5e-18");
        assert_eq!(render_value(-0.25), "-250m");
        assert_eq!(render_value(28e9), "28g");
    }

    const SAMPLE: &str = "dual-band test\n\
        * transformer\n\
        L1 in tap 200p Q=25 ; primary half\n\
        L2 tap 0 200p q=25\n\
        K1 L1 L2 0.8\n\
        R1 in 0 50\n\
        P1 in 0 50\n\
        .ac lin 11 20g 45g\n\
        .end\n";

    #[test]
    fn parses_sample() {
        let n = parse(SAMPLE).unwrap();
        assert_eq!(n.title, "dual-band test");
        match &n.element("l1").unwrap().kind {
            ElementKind::Inductor { nodes, value, q } => {
                assert_eq!(nodes, &("in".to_string(), "tap".to_string()));
                assert_eq!(*value, 2.0e-10);
                assert_eq!(*q, Some(25.0));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(n.element("L1").unwrap().comment.as_deref(), Some("primary half"));
        assert_eq!(n.analysis, AcSweep::new(11, 20e9, 45e9));
        assert_eq!(n.ports().len(), 1);
    }

    #[test]
    fn dangling_coupling_reference() {
        let err = parse("t\nL1 a 0 1n\nK1 L1 L2 0.8\n.ac lin 2 1g 2g\n").unwrap_err();
        assert_eq!(err.kind, NetlistErrorKind::DanglingK);
        assert_eq!(err.line, 3);
        assert!(err.to_string().contains("dangling K reference"));
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn missing_ground() {
        let err = parse("t\nR1 a b 50\n.ac lin 2 1g 2g\n").unwrap_err();
        assert_eq!(err.kind, NetlistErrorKind::MissingGround);
        assert!(err.to_string().contains("missing ground"));
    }

    #[test]
    fn error_paths_carry_line_and_token() {
        let cases = [
            ("t\nX1 a 0 1\n.ac lin 2 1g 2g\n", NetlistErrorKind::UnknownElement, 2, "X1"),
            ("t\nR1 a 0 1\nr1 a 0 2\n.ac lin 2 1g 2g\n", NetlistErrorKind::DuplicateName, 3, "r1"),
            ("t\nR1 a 0 1zz\n.ac lin 2 1g 2g\n", NetlistErrorKind::UnknownSuffix, 2, "1zz"),
            ("t\nR1 a 0 k\n.ac lin 2 1g 2g\n", NetlistErrorKind::EmptyNumber, 2, "k"),
            ("t\nR1 a 0 1\n", NetlistErrorKind::MissingAc, 2, ""),
            ("t\nR1 a 0 1\n.ac lin 2 1g 2g\n.ac lin 2 1g 2g\n", NetlistErrorKind::DuplicateAc, 4, ".ac"),
            ("t\nL1 a 0 1n\nL2 a 0 1n\nK1 L1 L2 1.5\n.ac lin 2 1g 2g\n", NetlistErrorKind::CouplingOutOfRange, 4, "1.5"),
            ("t\nP2 a 0 50\n.ac lin 2 1g 2g\n", NetlistErrorKind::PortNumbering, 3, "P2"),
            ("t\nR1 a 0 -5\n.ac lin 2 1g 2g\n", NetlistErrorKind::NonPositiveValue, 2, "-5"),
            ("t\n.tran 1n\n", NetlistErrorKind::UnknownDirective, 2, ".tran"),
        ];
        for (text, kind, line, token) in cases {
            let err = parse(text).unwrap_err();
            assert_eq!((err.kind.clone(), err.line, err.token.as_str()), (kind, line, token), "{text}");
        }
    }

    #[test]
    fn empty_netlist_serializes_to_two_lines() {
        let n = parse("empty\n.ac lin 3 1g 2g\n").unwrap();
        let text = serialize(&n);
        assert_eq!(text, "empty\n.ac lin 3 1g 2g\n");
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn comments_survive_round_trip() {
        let n = parse(SAMPLE).unwrap();
        let text = serialize(&n);
        assert!(text.contains("* transformer"));
        assert!(text.contains("; primary half"));
        assert_eq!(parse(&text).unwrap(), n);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    fn arb_value() -> impl Strategy<Value = f64> {
        (-18.0f64..12.0, 1.0f64..10.0).prop_map(|(e, m)| m * 10f64.powf(e.floor()))
    }

    fn arb_netlist() -> impl Strategy<Value = Netlist> {
        let el = (0usize..4, arb_value(), proptest::option::of(1.0f64..200.0), 0usize..5, 0usize..5);
        (proptest::collection::vec(el, 0..12), -1.0f64..=1.0, 1usize..100).prop_map(
            |(els, k, count)| {
                let node = |i: usize| if i == 0 { "0".to_string() } else { format!("n{i}") };
                let mut items = vec![Item::Comment("* generated".into())];
                let mut inductors = Vec::new();
                for (i, (kind, v, q, a, b)) in els.into_iter().enumerate() {
                    let nodes = (node(a), "0".to_string());
                    let _ = b;
                    let kind = match kind {
                        0 => ElementKind::Resistor { nodes, value: v },
                        1 => {
                            inductors.push(format!("L{i}"));
                            ElementKind::Inductor { nodes, value: v, q }
                        }
                        2 => ElementKind::Capacitor { nodes, value: v, q },
                        _ => ElementKind::Resistor { nodes, value: v * 3.0 },
                    };
                    let prefix = match &kind {
                        ElementKind::Inductor { .. } => "L",
                        ElementKind::Capacitor { .. } => "C",
                        _ => "R",
                    };
                    items.push(Item::Element(NetlistElement {
                        name: format!("{prefix}{i}"),
                        kind,
                        comment: if i % 3 == 0 { Some(format!("note {i}")) } else { None },
                    }));
                }
                if inductors.len() >= 2 {
                    items.push(Item::Element(NetlistElement {
                        name: "K1".into(),
                        kind: ElementKind::Coupling {
                            inductors: (inductors[0].clone(), inductors[1].clone()),
                            k,
                        },
                        comment: None,
                    }));
                }
                Netlist {
                    title: "generated".into(),
                    items,
                    analysis: AcSweep::new(count, 1e9, 2e9 + count as f64 * 1e6),
                }
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn render_parse_identity(m in 1.0f64..10.0, e in -18i32..=12, neg in any::<bool>()) {
            let v = if neg { -m } else { m } * 10f64.powi(e);
            let back = parse_value(&render_value(v)).unwrap();
            prop_assert_eq!(back, v);
        }

        #[test]
        fn parse_serialize_idempotent(n in arb_netlist()) {
            let text = serialize(&n);
            let parsed = parse(&text).unwrap();
            prop_assert_eq!(&parsed, &n);
            prop_assert_eq!(serialize(&parsed), text);
        }
    }
}
