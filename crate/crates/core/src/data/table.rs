use std::collections::HashMap;

use crate::error::{invalid, Result};

const ABSENT: u32 = u32::MAX;

/// One categorical attribute; values are interned in order of first appearance.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalColumn {
    name: String,
    levels: Vec<String>,
    codes: Vec<u32>,
}

impl CategoricalColumn {
    /// `None` marks a row that belongs to no group of this column.
    pub fn from_values<S: AsRef<str>>(name: impl Into<String>, values: &[Option<S>]) -> Self {
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut levels: Vec<String> = Vec::new();
        let mut codes = Vec::with_capacity(values.len());
        for v in values {
            match v {
                None => codes.push(ABSENT),
                Some(s) => {
                    let s = s.as_ref();
                    let c = *index.entry(s).or_insert_with(|| {
                        levels.push(s.to_string());
                        (levels.len() - 1) as u32
                    });
                    codes.push(c);
                }
            }
        }
        Self {
            name: name.into(),
            levels,
            codes,
        }
    }

    /// Presence column: rows in `present` take the single level `"1"`.
    pub fn presence(name: impl Into<String>, n_rows: usize, present: &[usize]) -> Self {
        let mut codes = vec![ABSENT; n_rows];
        for &r in present {
            codes[r] = 0;
        }
        Self {
            name: name.into(),
            levels: vec!["1".to_string()],
            codes,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code(&self, row: usize) -> Option<u32> {
        let c = self.codes[row];
        (c != ABSENT).then_some(c)
    }

    pub fn codes(&self) -> impl Iterator<Item = Option<u32>> + '_ {
        self.codes.iter().map(|&c| (c != ABSENT).then_some(c))
    }

    pub fn value(&self, row: usize) -> Option<&str> {
        self.code(row).map(|c| self.levels[c as usize].as_str())
    }
}

/// Categorical feature matrix. Class labels are kept outside the table.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalTable {
    n_rows: usize,
    columns: Vec<CategoricalColumn>,
}

impl CategoricalTable {
    pub fn new(n_rows: usize, columns: Vec<CategoricalColumn>) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != n_rows) {
            return Err(invalid(format!(
                "column '{}' has {} rows, expected {n_rows}",
                c.name,
                c.len()
            )));
        }
        Ok(Self { n_rows, columns })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn columns(&self) -> &[CategoricalColumn] {
        &self.columns
    }
}

/// Table plus integer class labels `0..class_names.len()`.
#[derive(Clone, Debug)]
pub struct LabeledTable {
    pub table: CategoricalTable,
    pub classes: Vec<usize>,
    pub class_names: Vec<String>,
}

impl LabeledTable {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}
