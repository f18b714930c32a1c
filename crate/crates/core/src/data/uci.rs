use std::io::BufRead;
use std::path::Path;

use super::table::{CategoricalColumn, CategoricalTable, LabeledTable};
use crate::error::{io_err, parse_err, Result};

const ZOO_ATTRIBUTES: [&str; 16] = [
    "hair", "feathers", "eggs", "milk", "airborne", "aquatic", "predator", "toothed", "backbone",
    "breathes", "venomous", "fins", "legs", "tail", "domestic", "catsize",
];

const MUSHROOM_ATTRIBUTES: [&str; 22] = [
    "cap-shape",
    "cap-surface",
    "cap-color",
    "bruises",
    "odor",
    "gill-attachment",
    "gill-spacing",
    "gill-size",
    "gill-color",
    "stalk-shape",
    "stalk-root",
    "stalk-surface-above-ring",
    "stalk-surface-below-ring",
    "stalk-color-above-ring",
    "stalk-color-below-ring",
    "veil-type",
    "veil-color",
    "ring-number",
    "ring-type",
    "spore-print-color",
    "population",
    "habitat",
];

fn read_rows(path: &Path, fields: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let f = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (ln, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let parts: Vec<String> = t.split(',').map(|s| s.trim().to_string()).collect();
        if parts.len() != fields {
            return Err(parse_err(
                path,
                ln + 1,
                format!("expected {fields} comma-separated fields, found {}", parts.len()),
            ));
        }
        rows.push((ln + 1, parts));
    }
    Ok(rows)
}

fn build_table(rows: &[Vec<String>], names: &[&str], first_attr: usize) -> Result<CategoricalTable> {
    let cols = names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let values: Vec<Option<&str>> = rows.iter().map(|r| Some(r[first_attr + c].as_str())).collect();
            CategoricalColumn::from_values(*name, &values)
        })
        .collect();
    CategoricalTable::new(rows.len(), cols)
}

/// UCI Zoo: `name, 16 attributes, type` with type in 1..=7 (class `type - 1`).
pub fn load_zoo(path: &Path) -> Result<LabeledTable> {
    let rows = read_rows(path, 18)?;
    let mut classes = Vec::with_capacity(rows.len());
    for (ln, r) in &rows {
        match r[17].parse::<usize>() {
            Ok(t) if (1..=7).contains(&t) => classes.push(t - 1),
            _ => return Err(parse_err(path, *ln, format!("invalid class '{}'", r[17]))),
        }
    }
    let fields: Vec<Vec<String>> = rows.into_iter().map(|(_, r)| r).collect();
    Ok(LabeledTable {
        table: build_table(&fields, &ZOO_ATTRIBUTES, 1)?,
        classes,
        class_names: (1..=7).map(|t| t.to_string()).collect(),
    })
}

/// UCI Mushroom: `class, 22 attributes` with class `e` (0) or `p` (1).
/// `?` is kept as an ordinary category.
pub fn load_mushroom(path: &Path) -> Result<LabeledTable> {
    let rows = read_rows(path, 23)?;
    let mut classes = Vec::with_capacity(rows.len());
    for (ln, r) in &rows {
        match r[0].as_str() {
            "e" => classes.push(0),
            "p" => classes.push(1),
            other => return Err(parse_err(path, *ln, format!("invalid class '{other}'"))),
        }
    }
    let fields: Vec<Vec<String>> = rows.into_iter().map(|(_, r)| r).collect();
    Ok(LabeledTable {
        table: build_table(&fields, &MUSHROOM_ATTRIBUTES, 1)?,
        classes,
        class_names: vec!["e".into(), "p".into()],
    })
}
