//! Text formats for algebra definitions and tensor elements.
//!
//! Algebra definition, one directive per line, `#` starts a comment:
//!
//! ```text
//! grading 2
//! pairing 1
//! basis x 1
//! basis y 1
//! basis z 0
//! bracket x y = z:1
//! bracket y x = z:1
//! alpha x = x:-1
//! flags involutive multiplicative
//! ```
//!
//! `epsilon <deg> <deg> <scalar>` lines may replace `pairing`. Degrees are
//! comma-separated residues. Without `alpha` lines the twist is the identity;
//! otherwise every basis element needs one. Scalars are exact literals such
//! as `3/4` or `z^2-1/2`, where `z` is a primitive root of unity whose order is
//! the exponent of the grading group.
//!
//! Element files hold one term per line: `x y z : 3/4` (coefficient optional).

use std::fmt;

use thiserror::Error;

use crate::algebra::{
    AlgebraElement, AlgebraFlags, BracketTable, ColorHomLieAlgebra, GradedBasis, LinearMap,
};
use crate::grading::{CommutationFactor, Degree, GradingGroup};
use crate::scalar::Scalar;
use crate::tensor::{TensorElement, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, field {field}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub field: usize,
    pub message: String,
}

fn err(line: usize, field: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        field,
        message: message.into(),
    }
}

struct Line<'a> {
    number: usize,
    fields: Vec<&'a str>,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        (!fields.is_empty()).then_some(Line {
            number: i + 1,
            fields,
        })
    })
}

fn parse_scalar(text: &str, order: u32, line: usize, field: usize) -> Result<Scalar, FormatError> {
    Scalar::parse(text, order).map_err(|e| {
        err(
            line,
            field,
            format!("bad scalar '{text}' at column {}: {}", e.column, e.message),
        )
    })
}

fn parse_int(text: &str, line: usize, field: usize) -> Result<i64, FormatError> {
    text.parse()
        .map_err(|_| err(line, field, format!("expected an integer, got '{text}'")))
}

fn parse_degree(g: &GradingGroup, text: &str, line: usize, field: usize) -> Result<Degree, FormatError> {
    let residues = text
        .split(',')
        .map(|p| parse_int(p, line, field))
        .collect::<Result<Vec<i64>, _>>()?;
    g.degree(&residues)
        .map_err(|e| err(line, field, e.to_string()))
}

/// Parses `name:scalar` terms starting at field index `start`.
fn parse_terms(
    line: &Line<'_>,
    start: usize,
    basis: &GradedBasis,
    order: u32,
) -> Result<AlgebraElement, FormatError> {
    let mut terms = Vec::new();
    for (offset, tok) in line.fields[start..].iter().enumerate() {
        let field = start + offset + 1;
        let (name, coeff) = match tok.split_once(':') {
            Some((n, c)) => (n, parse_scalar(c, order, line.number, field)?),
            None => (*tok, Scalar::one()),
        };
        let k = basis
            .index_of(name)
            .ok_or_else(|| err(line.number, field, format!("unknown basis element '{name}'")))?;
        terms.push((k, coeff));
    }
    Ok(AlgebraElement::from_terms(terms))
}

/// Parses an algebra definition.
pub fn parse_algebra(text: &str) -> Result<ColorHomLieAlgebra, FormatError> {
    let all: Vec<Line<'_>> = lines(text).collect();
    let mut group: Option<GradingGroup> = None;
    for l in &all {
        if l.fields[0] == "grading" {
            if group.is_some() {
                return Err(err(l.number, 1, "duplicate grading line"));
            }
            let moduli = l.fields[1..]
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let v = parse_int(f, l.number, i + 2)?;
                    u32::try_from(v).map_err(|_| err(l.number, i + 2, format!("bad modulus {v}")))
                })
                .collect::<Result<Vec<u32>, _>>()?;
            group = Some(GradingGroup::new(moduli).map_err(|e| err(l.number, 2, e.to_string()))?);
        }
    }
    let group = group.ok_or_else(|| err(1, 1, "missing 'grading' line"))?;
    let order = group.exponent();

    let mut pairing: Vec<Vec<i64>> = Vec::new();
    let mut pairing_line = 0;
    let mut eps_entries = Vec::new();
    let mut eps_line = 0;
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    let mut flags = AlgebraFlags::default();
    for l in &all {
        match l.fields[0] {
            "grading" | "bracket" | "alpha" => {}
            "pairing" => {
                let row = l.fields[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, f)| parse_int(f, l.number, i + 2))
                    .collect::<Result<Vec<i64>, _>>()?;
                pairing.push(row);
                pairing_line = l.number;
            }
            "epsilon" => {
                if l.fields.len() != 4 {
                    return Err(err(l.number, 1, "expected 'epsilon <degree> <degree> <scalar>'"));
                }
                let a = parse_degree(&group, l.fields[1], l.number, 2)?;
                let b = parse_degree(&group, l.fields[2], l.number, 3)?;
                let v = parse_scalar(l.fields[3], order, l.number, 4)?;
                eps_entries.push((a, b, v));
                eps_line = l.number;
            }
            "basis" => {
                if l.fields.len() != 3 {
                    return Err(err(l.number, 1, "expected 'basis <name> <degree>'"));
                }
                let name = l.fields[1];
                if name.contains(':') {
                    return Err(err(l.number, 2, "basis names may not contain ':'"));
                }
                if names.iter().any(|n| n == name) {
                    return Err(err(l.number, 2, format!("duplicate basis name '{name}'")));
                }
                names.push(name.to_string());
                degrees.push(parse_degree(&group, l.fields[2], l.number, 3)?);
            }
            "flags" => {
                for (i, f) in l.fields[1..].iter().enumerate() {
                    match *f {
                        "involutive" => flags.involutive = true,
                        "multiplicative" => flags.multiplicative = true,
                        other => return Err(err(l.number, i + 2, format!("unknown flag '{other}'"))),
                    }
                }
            }
            other => return Err(err(l.number, 1, format!("unknown directive '{other}'"))),
        }
    }
    let epsilon = match (pairing.is_empty(), eps_entries.is_empty()) {
        (false, true) => CommutationFactor::from_pairing(&group, &pairing)
            .map_err(|e| err(pairing_line, 1, e.to_string()))?,
        (true, false) => CommutationFactor::from_table(&group, eps_entries)
            .map_err(|e| err(eps_line, 1, e.to_string()))?,
        (true, true) => return Err(err(1, 1, "missing 'pairing' or 'epsilon' lines")),
        (false, false) => {
            return Err(err(eps_line.max(pairing_line), 1, "use either 'pairing' or 'epsilon', not both"))
        }
    };
    let basis = GradedBasis::new(names, degrees).map_err(|e| err(1, 1, e.to_string()))?;
    let n = basis.dim();

    let mut bracket = BracketTable::new();
    let mut alpha_cols: Vec<Option<AlgebraElement>> = vec![None; n];
    let mut any_alpha = 0;
    for l in &all {
        let kind = l.fields[0];
        if kind != "bracket" && kind != "alpha" {
            continue;
        }
        let arity = if kind == "bracket" { 2 } else { 1 };
        if l.fields.len() < arity + 2 || l.fields[arity + 1] != "=" {
            let shape = if kind == "bracket" { "bracket <a> <b> = <name:scalar> ..." } else { "alpha <a> = <name:scalar> ..." };
            return Err(err(l.number, 1, format!("expected '{shape}'")));
        }
        let idx = |f: usize| {
            basis
                .index_of(l.fields[f])
                .ok_or_else(|| err(l.number, f + 1, format!("unknown basis element '{}'", l.fields[f])))
        };
        let value = parse_terms(l, arity + 2, &basis, order)?;
        if kind == "bracket" {
            let (i, j) = (idx(1)?, idx(2)?);
            if bracket.get(i, j).is_some() {
                return Err(err(l.number, 2, "duplicate bracket entry"));
            }
            bracket.set(i, j, value);
        } else {
            let j = idx(1)?;
            if alpha_cols[j].is_some() {
                return Err(err(l.number, 2, "duplicate alpha entry"));
            }
            alpha_cols[j] = Some(value);
            any_alpha = l.number;
        }
    }
    let alpha = if any_alpha == 0 {
        LinearMap::identity(n)
    } else {
        let mut cols = Vec::with_capacity(n);
        for (j, c) in alpha_cols.into_iter().enumerate() {
            cols.push(c.ok_or_else(|| {
                err(any_alpha, 1, format!("alpha is missing basis element '{}'", basis.name(j)))
            })?);
        }
        LinearMap::from_columns(n, cols).expect("indices come from the basis")
    };
    ColorHomLieAlgebra::new(basis, epsilon, bracket, alpha, flags).map_err(|e| err(1, 1, e.to_string()))
}

fn write_terms(out: &mut String, x: &AlgebraElement, basis: &GradedBasis) {
    for (k, c) in x.terms() {
        out.push(' ');
        out.push_str(basis.name(k));
        out.push(':');
        out.push_str(&c.to_string());
    }
}

/// Prints an algebra definition that [`parse_algebra`] reads back to an equal value.
pub fn print_algebra(a: &ColorHomLieAlgebra) -> String {
    use fmt::Write;
    let mut out = String::new();
    let g = a.epsilon().group();
    let moduli: Vec<String> = g.moduli().iter().map(u32::to_string).collect();
    writeln!(out, "grading {}", moduli.join(" ")).unwrap();
    match a.epsilon().pairing() {
        Some(p) => {
            for row in p {
                let r: Vec<String> = row.iter().map(i64::to_string).collect();
                writeln!(out, "pairing {}", r.join(" ")).unwrap();
            }
        }
        None => {
            for x in g.elements() {
                for y in g.elements() {
                    writeln!(out, "epsilon {x} {y} {}", a.epsilon().value(&x, &y)).unwrap();
                }
            }
        }
    }
    let basis = a.basis();
    for i in 0..basis.dim() {
        writeln!(out, "basis {} {}", basis.name(i), basis.degree(i)).unwrap();
    }
    for ((i, j), v) in a.bracket_table().entries() {
        write!(out, "bracket {} {} =", basis.name(i), basis.name(j)).unwrap();
        write_terms(&mut out, v, basis);
        out.push('\n');
    }
    if !a.alpha().is_identity() {
        for j in 0..basis.dim() {
            write!(out, "alpha {} =", basis.name(j)).unwrap();
            write_terms(&mut out, a.alpha().column(j), basis);
            out.push('\n');
        }
    }
    let f = a.flags();
    if f.involutive || f.multiplicative {
        out.push_str("flags");
        if f.involutive {
            out.push_str(" involutive");
        }
        if f.multiplicative {
            out.push_str(" multiplicative");
        }
        out.push('\n');
    }
    out
}

/// Parses an element file against `names`.
pub fn parse_element(text: &str, names: &[String], order: u32) -> Result<TensorElement, FormatError> {
    let mut t = TensorElement::zero();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (word_part, coeff) = match content.split_once(':') {
            Some((w, c)) => {
                let field = w.split_whitespace().count() + 1;
                (w, parse_scalar(c.trim(), order, number, field)?)
            }
            None => (content, Scalar::one()),
        };
        let mut letters = Vec::new();
        for (f, name) in word_part.split_whitespace().enumerate() {
            let k = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| err(number, f + 1, format!("unknown basis element '{name}'")))?;
            letters.push(k);
        }
        let word = Word::new(letters).map_err(|_| err(number, 1, "empty word"))?;
        t.add_term(word, coeff);
    }
    Ok(t)
}

/// One `word : scalar` line per term, in word order; empty for zero.
pub fn print_element(t: &TensorElement, names: &[String]) -> String {
    let mut out = String::new();
    for (w, c) in t.terms() {
        out.push_str(&format!("{} : {c}\n", w.display(names)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresetError {
    #[error("{names} names but {parities} parities")]
    Count { names: usize, parities: usize },
    #[error("parity of '{name}' must be 0 or 1, got {value}")]
    Parity { name: String, value: u32 },
    #[error("in generated definition: {0}")]
    Format(#[from] FormatError),
}

/// A `Z_2`-graded definition with the sign rule `ε(x,y) = (-1)^{|x||y|}`.
///
/// `brackets` entries read `a b = c:k ...`, `alpha` entries read `a = c:k ...`.
pub fn super_preset(
    names: &[String],
    parities: &[u32],
    brackets: &[String],
    alpha: &[String],
    flags: AlgebraFlags,
) -> Result<ColorHomLieAlgebra, PresetError> {
    if names.len() != parities.len() {
        return Err(PresetError::Count {
            names: names.len(),
            parities: parities.len(),
        });
    }
    let mut text = String::from("grading 2\npairing 1\n");
    for (n, &p) in names.iter().zip(parities) {
        if p > 1 {
            return Err(PresetError::Parity {
                name: n.clone(),
                value: p,
            });
        }
        text.push_str(&format!("basis {n} {p}\n"));
    }
    for b in brackets {
        text.push_str(&format!("bracket {b}\n"));
    }
    for a in alpha {
        text.push_str(&format!("alpha {a}\n"));
    }
    if flags.involutive || flags.multiplicative {
        text.push_str("flags");
        if flags.involutive {
            text.push_str(" involutive");
        }
        if flags.multiplicative {
            text.push_str(" multiplicative");
        }
        text.push('\n');
    }
    Ok(parse_algebra(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: &str = "\
# super Heisenberg
grading 2
pairing 1
basis x 1
basis y 1
basis z 0
bracket x y = z:1
bracket y x = z
";

    #[test]
    fn parse_and_roundtrip() {
        let a = parse_algebra(H).unwrap();
        assert_eq!(a.dim(), 3);
        assert!(a.verify().passed());
        let printed = print_algebra(&a);
        assert_eq!(parse_algebra(&printed).unwrap(), a);
    }

    #[test]
    fn bad_scalar_carries_position() {
        let text = H.replace("z:1\n", "z:1/0\n");
        let e = parse_algebra(&text).unwrap_err();
        assert_eq!((e.line, e.field), (7, 5));
        assert!(e.message.contains("column"), "{e}");
    }

    #[test]
    fn unknown_name_and_missing_alpha() {
        let e = parse_algebra(&H.replace("bracket y x = z", "bracket y w = z")).unwrap_err();
        assert_eq!((e.line, e.field), (8, 3));
        let e = parse_algebra(&format!("{H}alpha x = x:-1\n")).unwrap_err();
        assert!(e.message.contains("missing"), "{e}");
    }

    #[test]
    fn epsilon_table_roundtrip() {
        let text = "grading 2\nepsilon 0 0 1\nepsilon 0 1 1\nepsilon 1 0 1\nepsilon 1 1 2\nbasis a 1\n";
        let a = parse_algebra(text).unwrap();
        assert!(!a.epsilon().verify().passed());
        assert_eq!(parse_algebra(&print_algebra(&a)).unwrap(), a);
    }

    #[test]
    fn element_roundtrip() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let t = parse_element("x y : -1\nz\n# c\ny x : 1/2\n", &names, 2).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(parse_element(&print_element(&t, &names), &names, 2).unwrap(), t);
        assert!(parse_element("x q : 1", &names, 2).is_err());
    }

    #[test]
    fn super_preset_matches_generic_file() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let brackets = vec!["x y = z:1".to_string(), "y x = z".to_string()];
        let a = super_preset(&names, &[1, 1, 0], &brackets, &[], AlgebraFlags::default()).unwrap();
        assert_eq!(a, parse_algebra(H).unwrap());
        assert!(matches!(
            super_preset(&names, &[1, 1], &[], &[], AlgebraFlags::default()),
            Err(PresetError::Count { .. })
        ));
    }
}
