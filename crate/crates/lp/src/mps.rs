//! Fixed-column MPS output and a whitespace-tolerant reader.
//!
//! Fixed MPS limits names to 8 characters and numbers to 12, so rows and
//! columns are written under generated codes (`R0000001`, `C0000001`) with the
//! original names listed in leading comment lines. Numbers use the most
//! precise representation that fits the field.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::MpsError;
use crate::problem::{Col, LinearProgram, Sense};

const OBJ_ROW: &str = "COST";

fn row_code(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn col_code(j: usize) -> String {
    format!("C{:07}", j + 1)
}

/// Shortest-error rendering of `v` in at most 12 characters.
pub fn format_number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    let mut best: Option<(f64, String)> = None;
    let mut consider = |s: String| {
        if s.len() <= 12 {
            if let Ok(back) = s.parse::<f64>() {
                let err = (back - v).abs();
                if best.as_ref().is_none_or(|(e, _)| err < *e) {
                    best = Some((err, s));
                }
            }
        }
    };
    for p in 0..=11 {
        consider(format!("{v:.p$e}"));
        consider(format!("{v:.p$}"));
    }
    best.map(|(_, s)| s).unwrap_or_else(|| format!("{v:.0e}"))
}

fn field_line(out: &mut impl Write, f1: &str, f2: &str, f3: &str, f4: &str, f5: &str, f6: &str) -> std::io::Result<()> {
    let mut line = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}");
    if !f5.is_empty() {
        line.push_str(&format!("   {f5:<8}  {f6:>12}"));
    }
    writeln!(out, "{}", line.trim_end())
}

/// Writes `lp` in fixed-column MPS format.
pub fn write_mps(lp: &LinearProgram, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "* {}", lp.name())?;
    for (i, name) in lp.row_names().iter().enumerate() {
        writeln!(out, "* {} {}", row_code(i), name)?;
    }
    for (j, name) in lp.col_names().iter().enumerate() {
        writeln!(out, "* {} {}", col_code(j), name)?;
    }
    let short: String = lp.name().chars().filter(|c| !c.is_whitespace()).take(8).collect();
    writeln!(out, "NAME          {}", if short.is_empty() { "LP" } else { &short })?;
    writeln!(out, "ROWS")?;
    writeln!(out, " N  {OBJ_ROW}")?;
    for (i, s) in lp.senses().iter().enumerate() {
        let t = match s {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        writeln!(out, " {t}  {}", row_code(i))?;
    }

    let (start, rows, vals) = lp.to_csc();
    writeln!(out, "COLUMNS")?;
    for j in 0..lp.num_cols() {
        let code = col_code(j);
        let mut entries: Vec<(String, f64)> = Vec::new();
        if lp.cost()[j] != 0.0 {
            entries.push((OBJ_ROW.to_string(), lp.cost()[j]));
        }
        for e in start[j]..start[j + 1] {
            entries.push((row_code(rows[e]), vals[e]));
        }
        if entries.is_empty() {
            // Keep the column declared so bounds can refer to it.
            entries.push((OBJ_ROW.to_string(), 0.0));
        }
        for pair in entries.chunks(2) {
            let (r1, v1) = &pair[0];
            match pair.get(1) {
                Some((r2, v2)) => field_line(out, "", &code, r1, &format_number(*v1), r2, &format_number(*v2))?,
                None => field_line(out, "", &code, r1, &format_number(*v1), "", "")?,
            }
        }
    }

    writeln!(out, "RHS")?;
    let nz: Vec<(String, f64)> = lp
        .rhs()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != 0.0)
        .map(|(i, &b)| (row_code(i), b))
        .collect();
    for pair in nz.chunks(2) {
        let (r1, v1) = &pair[0];
        match pair.get(1) {
            Some((r2, v2)) => field_line(out, "", "RHS", r1, &format_number(*v1), r2, &format_number(*v2))?,
            None => field_line(out, "", "RHS", r1, &format_number(*v1), "", "")?,
        }
    }

    writeln!(out, "BOUNDS")?;
    for j in 0..lp.num_cols() {
        let (l, u) = (lp.lower()[j], lp.upper()[j]);
        let code = col_code(j);
        if l == u {
            field_line(out, "FX", "BND", &code, &format_number(l), "", "")?;
            continue;
        }
        match (l.is_finite(), u.is_finite()) {
            (false, false) => field_line(out, "FR", "BND", &code, "", "", "")?,
            (false, true) => {
                field_line(out, "MI", "BND", &code, "", "", "")?;
                field_line(out, "UP", "BND", &code, &format_number(u), "", "")?;
            }
            (true, _) => {
                if l != 0.0 {
                    field_line(out, "LO", "BND", &code, &format_number(l), "", "")?;
                }
                if u.is_finite() {
                    field_line(out, "UP", "BND", &code, &format_number(u), "", "")?;
                }
            }
        }
    }
    writeln!(out, "ENDATA")
}

#[derive(PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

/// Reads an MPS file (fixed or free layout without spaces in names).
/// Generated names map back to the originals listed in the comment header.
pub fn read_mps(input: impl BufRead) -> Result<LinearProgram, MpsError> {
    let mut aliases: HashMap<String, String> = HashMap::new();
    let mut name = String::from("LP");
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_names = Vec::new();
    let mut senses = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut lower: Vec<f64> = Vec::new();
    let mut upper: Vec<f64> = Vec::new();

    let parse = |s: &str, line: usize| -> Result<f64, MpsError> {
        s.parse::<f64>().map_err(|_| MpsError::Parse { line, msg: format!("bad number {s}") })
    };

    for (ln, raw) in input.lines().enumerate() {
        let raw = raw?;
        let line_no = ln + 1;
        if let Some(rest) = raw.strip_prefix('*') {
            let mut it = rest.split_whitespace();
            if let (Some(code), Some(orig)) = (it.next(), it.next()) {
                if code.len() == 8 && (code.starts_with('R') || code.starts_with('C')) {
                    aliases.insert(code.to_string(), orig.to_string());
                }
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            section = match tokens[0] {
                "NAME" => {
                    if let Some(n) = tokens.get(1) {
                        name = n.to_string();
                    }
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => break,
                other => {
                    return Err(MpsError::Parse { line: line_no, msg: format!("unknown section {other}") })
                }
            };
            continue;
        }
        let err = |msg: &str| MpsError::Parse { line: line_no, msg: msg.to_string() };
        match section {
            Section::Rows => {
                let [t, r] = tokens[..] else { return Err(err("row line needs type and name")) };
                let sense = match t {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(r.to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(err("unknown row type")),
                };
                row_index.insert(r.to_string(), row_names.len());
                row_names.push(r.to_string());
                senses.push(sense);
                rhs.push(0.0);
            }
            Section::Columns => {
                if tokens.contains(&"'MARKER'") {
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(err("column line needs 3 or 5 fields"));
                }
                let c = tokens[0];
                let j = *col_index.entry(c.to_string()).or_insert_with(|| {
                    col_names.push(c.to_string());
                    costs.push(0.0);
                    entries.push(Vec::new());
                    lower.push(0.0);
                    upper.push(f64::INFINITY);
                    col_names.len() - 1
                });
                for pair in tokens[1..].chunks(2) {
                    let v = parse(pair[1], line_no)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        costs[j] += v;
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        entries[j].push((i, v));
                    } else {
                        return Err(err("column references unknown row"));
                    }
                }
            }
            Section::Rhs => {
                let body = if tokens.len() % 2 == 1 { &tokens[1..] } else { &tokens[..] };
                for pair in body.chunks(2) {
                    if pair.len() != 2 {
                        return Err(err("rhs line needs name/value pairs"));
                    }
                    let v = parse(pair[1], line_no)?;
                    if let Some(&i) = row_index.get(pair[0]) {
                        rhs[i] = v;
                    } else if Some(pair[0]) != obj_row.as_deref() {
                        return Err(err("rhs references unknown row"));
                    }
                }
            }
            Section::Ranges => return Err(err("RANGES section is not supported")),
            Section::Bounds => {
                if tokens.len() < 3 {
                    return Err(err("bound line too short"));
                }
                let kind = tokens[0];
                let &j = col_index.get(tokens[2]).ok_or_else(|| err("bound on unknown column"))?;
                let val = tokens.get(3).map(|s| parse(s, line_no)).transpose()?;
                let need = || val.ok_or_else(|| err("bound needs a value"));
                match kind {
                    "UP" => upper[j] = need()?,
                    "LO" => lower[j] = need()?,
                    "FX" => {
                        lower[j] = need()?;
                        upper[j] = lower[j];
                    }
                    "FR" => {
                        lower[j] = f64::NEG_INFINITY;
                        upper[j] = f64::INFINITY;
                    }
                    "MI" => lower[j] = f64::NEG_INFINITY,
                    "PL" => upper[j] = f64::INFINITY,
                    _ => return Err(err("unsupported bound type")),
                }
            }
            Section::None => return Err(err("data outside of a section")),
        }
    }

    let alias = |s: &str| aliases.get(s).cloned().unwrap_or_else(|| s.to_string());
    let mut lp = LinearProgram::new(name);
    let cols: Vec<Col> = (0..col_names.len())
        .map(|j| lp.add_col(alias(&col_names[j]), costs[j], lower[j], upper[j]))
        .collect();
    let mut by_row: Vec<Vec<(Col, f64)>> = vec![Vec::new(); row_names.len()];
    for (j, list) in entries.iter().enumerate() {
        for &(i, v) in list {
            by_row[i].push((cols[j], v));
        }
    }
    for (i, coeffs) in by_row.into_iter().enumerate() {
        lp.add_row(alias(&row_names[i]), coeffs, senses[i], rhs[i]);
    }
    Ok(lp)
}
