use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use super::table::{CategoricalColumn, CategoricalTable, LabeledTable};
use crate::error::{io_err, parse_err, Result};

/// Citation network: binary word-presence table plus the citation links.
#[derive(Clone, Debug)]
pub struct CitationData {
    pub labeled: LabeledTable,
    pub paper_ids: Vec<String>,
    /// `(cited, citing)` row pairs between papers present in the content file.
    pub links: Vec<(usize, usize)>,
    /// Links that mention a paper missing from the content file.
    pub dangling_links: usize,
}

/// Reads `<id> <w_1> ... <w_m> <class>` rows (whitespace separated, binary
/// word indicators) and optionally a `<cited> <citing>` link file. Each word
/// column contributes a group only for papers containing the word. Classes are
/// numbered by sorted class name.
pub fn load_citation(content: &Path, cites: Option<&Path>) -> Result<CitationData> {
    let f = std::fs::File::open(content).map_err(|e| io_err(content, e))?;
    let mut ids = Vec::new();
    let mut class_raw = Vec::new();
    let mut present: Vec<Vec<usize>> = Vec::new();
    let mut width: Option<usize> = None;
    for (ln, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_err(content, e))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() < 3 {
            return Err(parse_err(content, ln + 1, "expected id, word indicators and class"));
        }
        let m = toks.len() - 2;
        match width {
            None => {
                width = Some(m);
                present = vec![Vec::new(); m];
            }
            Some(w) if w != m => {
                return Err(parse_err(content, ln + 1, format!("expected {w} word indicators, found {m}")));
            }
            _ => {}
        }
        let row = ids.len();
        for (w, tok) in toks[1..=m].iter().enumerate() {
            match *tok {
                "0" => {}
                "1" => present[w].push(row),
                other => {
                    return Err(parse_err(content, ln + 1, format!("word indicator must be 0 or 1, got '{other}'")))
                }
            }
        }
        ids.push(toks[0].to_string());
        class_raw.push(toks[m + 1].to_string());
    }
    let n = ids.len();
    let class_names: Vec<String> = class_raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let classes = class_raw
        .iter()
        .map(|c| class_names.binary_search(c).expect("collected"))
        .collect();
    let columns = present
        .iter()
        .enumerate()
        .map(|(w, rows)| CategoricalColumn::presence(format!("w{w}"), n, rows))
        .collect();
    let table = CategoricalTable::new(n, columns)?;

    let mut links = Vec::new();
    let mut dangling = 0;
    if let Some(cp) = cites {
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let f = std::fs::File::open(cp).map_err(|e| io_err(cp, e))?;
        for (ln, line) in std::io::BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| io_err(cp, e))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if toks.len() != 2 {
                return Err(parse_err(cp, ln + 1, "expected '<cited> <citing>'"));
            }
            match (index.get(toks[0]), index.get(toks[1])) {
                (Some(&a), Some(&b)) => links.push((a, b)),
                _ => dangling += 1,
            }
        }
    }
    Ok(CitationData {
        labeled: LabeledTable {
            table,
            classes,
            class_names,
        },
        paper_ids: ids,
        links,
        dangling_links: dangling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn dangling_links_are_counted() {
        let dir = std::env::temp_dir();
        let c = dir.join(format!("hohl-cite-{}.content", std::process::id()));
        let l = dir.join(format!("hohl-cite-{}.cites", std::process::id()));
        std::fs::File::create(&c)
            .unwrap()
            .write_all(b"p1\t1\t0\t1\tAI\np2\t1\t1\t0\tML\np3\t0\t1\t1\tAI\n")
            .unwrap();
        std::fs::File::create(&l).unwrap().write_all(b"p1 p2\np9 p1\np3 p1\n").unwrap();
        let d = load_citation(&c, Some(&l)).unwrap();
        assert_eq!(d.labeled.classes, vec![0, 1, 0]);
        assert_eq!(d.links, vec![(0, 1), (2, 0)]);
        assert_eq!(d.dangling_links, 1);
        assert_eq!(d.labeled.table.columns()[0].value(2), None);
        assert_eq!(d.labeled.table.columns()[2].value(2), Some("1"));
    }
}
