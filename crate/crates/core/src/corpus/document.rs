use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One record of the input corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub r#abstract: String,
    #[serde(default)]
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentSet {
    pub documents: Vec<Document>,
}

impl DocumentSet {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter()
    }

    /// Write the set back out as JSONL, one record per line.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for doc in &self.documents {
            let line = serde_json::to_string(doc)
                .map_err(|e| Error::Input(format!("cannot serialize document {}: {e}", doc.id)))?;
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// What ingestion dropped, and why.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines_read: usize,
    pub dropped_empty_abstract: usize,
    pub malformed_lines: Vec<usize>,
    pub duplicate_ids: Vec<String>,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.dropped_empty_abstract + self.malformed_lines.len() + self.duplicate_ids.len()
    }
}

/// Parse JSONL records from a reader. Blank lines are ignored; line numbers
/// in the report are 1-based.
pub fn read_documents(reader: impl BufRead) -> Result<(DocumentSet, IngestReport)> {
    let mut report = IngestReport::default();
    let mut seen = HashSet::new();
    let mut documents = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(format!("<line {line_no}>"), e))?;
        if line.trim().is_empty() {
            continue;
        }
        report.lines_read += 1;

        let doc: Document = match serde_json::from_str(&line) {
            Ok(doc) => doc,
            Err(err) => {
                warn!("skipping malformed record on line {line_no}: {err}");
                report.malformed_lines.push(line_no);
                continue;
            }
        };
        if doc.id.trim().is_empty() {
            warn!("skipping record without id on line {line_no}");
            report.malformed_lines.push(line_no);
            continue;
        }
        if doc.r#abstract.trim().is_empty() {
            report.dropped_empty_abstract += 1;
            continue;
        }
        if !seen.insert(doc.id.clone()) {
            warn!("skipping duplicate id `{}` on line {line_no}", doc.id);
            report.duplicate_ids.push(doc.id);
            continue;
        }
        documents.push(doc);
    }

    if documents.is_empty() {
        warn!("ingested document set is empty");
    }
    Ok((DocumentSet { documents }, report))
}

/// Load a JSONL corpus from disk, dropping records without an abstract.
pub fn ingest_documents(path: &Path) -> Result<(DocumentSet, IngestReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (docs, report) = read_documents(BufReader::new(file))?;
    log::info!(
        "ingested {} documents from {} ({} dropped)",
        docs.len(),
        path.display(),
        report.dropped()
    );
    Ok((docs, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> (DocumentSet, IngestReport) {
        read_documents(text.as_bytes()).unwrap()
    }

    #[test]
    fn drops_empty_abstract() {
        let text = r#"{"id":"a","title":"t","abstract":"virus spread","keywords":["virus"]}
{"id":"b","title":"t","abstract":"","keywords":[]}
{"id":"c","title":"t","abstract":"vaccine trial","keywords":[]}
"#;
        let (docs, report) = parse(text);
        assert_eq!(docs.len(), 2);
        assert_eq!(report.dropped(), 1);
        assert_eq!(report.dropped_empty_abstract, 1);
    }

    #[test]
    fn missing_abstract_field_is_dropped_too() {
        let (docs, report) = parse("{\"id\":\"a\",\"title\":\"x\"}\n");
        assert!(docs.is_empty());
        assert_eq!(report.dropped_empty_abstract, 1);
    }

    #[test]
    fn empty_input_gives_empty_set() {
        let (docs, report) = parse("");
        assert!(docs.is_empty());
        assert_eq!(report.lines_read, 0);
    }

    #[test]
    fn duplicate_id_keeps_first() {
        let text = r#"{"id":"a","abstract":"first"}
{"id":"a","abstract":"second"}
"#;
        let (docs, report) = parse(text);
        assert_eq!(docs.len(), 1);
        assert_eq!(docs.documents[0].r#abstract, "first");
        assert_eq!(report.duplicate_ids, vec!["a".to_string()]);
    }

    #[test]
    fn malformed_line_is_reported_with_line_number() {
        let text = "{\"id\":\"a\",\"abstract\":\"ok\"}\nnot json\n{\"id\":\"b\",\"abstract\":\"fine\"}\n";
        let (docs, report) = parse(text);
        assert_eq!(docs.len(), 2);
        assert_eq!(report.malformed_lines, vec![2]);
    }

    #[test]
    fn unreadable_file_is_fatal() {
        let err = ingest_documents(Path::new("/definitely/not/here.jsonl")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
