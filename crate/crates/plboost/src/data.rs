//! SVMlight/LETOR corpus parsing and query grouping.
//!
//! Each non-empty line is `<label> qid:<qid> (<fid>:<val>)* (# comment)?`
//! with whitespace-separated tokens. Records are grouped by query id in
//! first-appearance order; feature ids are 1-based and stored dense with
//! zeros for unset ids.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// One parsed line: a labelled document with sparse features.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub qid: String,
    pub label: u32,
    /// (feature id, value) pairs, ids >= 1, no duplicates.
    pub features: Vec<(u32, f64)>,
}

/// All documents of one query: a dense feature matrix plus labels, in
/// stable file order.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryGroup {
    pub qid: String,
    /// Row-major `n_docs x n_features`, single precision.
    pub features: Vec<f32>,
    pub n_features: usize,
    pub labels: Vec<u32>,
}

impl QueryGroup {
    pub fn n_docs(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, doc: usize) -> &[f32] {
        &self.features[doc * self.n_features..(doc + 1) * self.n_features]
    }
}

/// An ordered collection of query groups with a global feature width.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub groups: Vec<QueryGroup>,
    pub n_features: usize,
}

impl Dataset {
    pub fn n_queries(&self) -> usize {
        self.groups.len()
    }

    pub fn n_docs(&self) -> usize {
        self.groups.iter().map(|g| g.n_docs()).sum()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_svmlight(&text)
    }

    /// Serialize back to SVMlight text. Rows are written dense so a
    /// re-parse reconstructs the same matrices and feature width.
    pub fn to_svmlight(&self) -> String {
        let mut out = String::new();
        for group in &self.groups {
            for doc in 0..group.n_docs() {
                let _ = write!(out, "{} qid:{}", group.labels[doc], group.qid);
                for (j, &v) in group.row(doc).iter().enumerate() {
                    let _ = write!(out, " {}:{}", j + 1, v);
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn summary(&self) -> DatasetSummary {
        let mut label_histogram = BTreeMap::new();
        let mut all_zero_label_queries = 0;
        for group in &self.groups {
            for &label in &group.labels {
                *label_histogram.entry(label).or_insert(0usize) += 1;
            }
            if group.labels.iter().all(|&l| l == 0) {
                all_zero_label_queries += 1;
            }
        }
        DatasetSummary {
            n_queries: self.n_queries(),
            n_docs: self.n_docs(),
            n_features: self.n_features,
            label_histogram,
            all_zero_label_queries,
        }
    }
}

/// Corpus-level counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub n_queries: usize,
    pub n_docs: usize,
    pub n_features: usize,
    pub label_histogram: BTreeMap<u32, usize>,
    pub all_zero_label_queries: usize,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_record(line_no: usize, line: &str) -> Result<DocumentRecord> {
    let mut tokens = line.split_whitespace();

    let label_tok = tokens
        .next()
        .ok_or_else(|| parse_error(line_no, "missing label"))?;
    let label: i64 = label_tok
        .parse()
        .map_err(|_| parse_error(line_no, format!("label {label_tok:?} is not an integer")))?;
    if label < 0 {
        return Err(parse_error(line_no, format!("negative label {label}")));
    }

    let qid_tok = tokens
        .next()
        .ok_or_else(|| parse_error(line_no, "missing qid:<id> token"))?;
    let qid = qid_tok
        .strip_prefix("qid:")
        .ok_or_else(|| parse_error(line_no, format!("expected qid:<id>, got {qid_tok:?}")))?;
    if qid.is_empty() {
        return Err(parse_error(line_no, "empty qid"));
    }

    let mut features = Vec::new();
    for tok in tokens {
        let (fid_str, val_str) = tok
            .split_once(':')
            .ok_or_else(|| parse_error(line_no, format!("expected <fid>:<val>, got {tok:?}")))?;
        let fid: u32 = fid_str
            .parse()
            .map_err(|_| parse_error(line_no, format!("feature id {fid_str:?} is not an integer")))?;
        if fid == 0 {
            return Err(parse_error(line_no, "feature ids are 1-based; got 0"));
        }
        let value: f64 = val_str
            .parse()
            .map_err(|_| parse_error(line_no, format!("feature value {val_str:?} is not a number")))?;
        if features.iter().any(|&(f, _)| f == fid) {
            return Err(parse_error(line_no, format!("duplicate feature id {fid}")));
        }
        features.push((fid, value));
    }

    Ok(DocumentRecord {
        qid: qid.to_string(),
        label: label as u32,
        features,
    })
}

/// Parse SVMlight/LETOR text into query groups.
///
/// Queries split across non-contiguous blocks are merged by qid; group
/// order is first appearance; document order within a group is file order.
/// The feature width is the largest feature id seen anywhere.
pub fn parse_svmlight(text: &str) -> Result<Dataset> {
    let mut records: Vec<DocumentRecord> = Vec::new();
    let mut max_fid: u32 = 0;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.split_once('#') {
            Some((content, _comment)) => content,
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(idx + 1, line)?;
        for &(fid, _) in &record.features {
            max_fid = max_fid.max(fid);
        }
        records.push(record);
    }

    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let n_features = max_fid as usize;
    let mut order: Vec<String> = Vec::new();
    let mut by_qid: BTreeMap<String, Vec<DocumentRecord>> = BTreeMap::new();
    for record in records {
        if !by_qid.contains_key(&record.qid) {
            order.push(record.qid.clone());
        }
        by_qid.entry(record.qid.clone()).or_default().push(record);
    }

    let groups = order
        .into_iter()
        .map(|qid| {
            let docs = by_qid.remove(&qid).expect("qid registered in order");
            let mut features = vec![0.0f32; docs.len() * n_features];
            let mut labels = Vec::with_capacity(docs.len());
            for (i, doc) in docs.iter().enumerate() {
                labels.push(doc.label);
                for &(fid, value) in &doc.features {
                    features[i * n_features + (fid as usize - 1)] = value as f32;
                }
            }
            QueryGroup { qid, features, n_features, labels }
        })
        .collect();

    Ok(Dataset { groups, n_features })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_labels_qids_and_features() {
        let record = parse_record(1, "2 qid:7 1:0.5 3:-1.2").unwrap();
        assert_eq!(record.label, 2);
        assert_eq!(record.qid, "7");
        assert_eq!(record.features, vec![(1, 0.5), (3, -1.2)]);
    }

    #[test]
    fn comment_runs_to_end_of_line() {
        let ds = parse_svmlight("2 qid:7 1:0.5 3:-1.2 # doc-x 9:9\n").unwrap();
        assert_eq!(ds.n_features, 3);
        assert_eq!(ds.groups[0].labels, vec![2]);
        assert_eq!(ds.groups[0].row(0), &[0.5, 0.0, -1.2]);
    }

    #[test]
    fn groups_by_qid() {
        let ds = parse_svmlight("0 qid:1 1:0\n0 qid:1 2:0\n").unwrap();
        assert_eq!(ds.n_queries(), 1);
        assert_eq!(ds.groups[0].n_docs(), 2);
        assert_eq!(ds.n_features, 2);
    }

    #[test]
    fn unset_features_read_as_zero() {
        let ds = parse_svmlight("1 qid:q 1:2.5 5:1\n").unwrap();
        assert_eq!(ds.n_features, 5);
        assert_eq!(ds.groups[0].row(0), &[2.5, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn non_contiguous_qid_blocks_merge() {
        let ds = parse_svmlight("1 qid:a 1:1\n0 qid:b 1:2\n2 qid:a 1:3\n").unwrap();
        assert_eq!(ds.n_queries(), 2);
        assert_eq!(ds.groups[0].qid, "a");
        assert_eq!(ds.groups[0].labels, vec![1, 2]);
        assert_eq!(ds.groups[1].qid, "b");
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let err = parse_svmlight("1 qid:a 1:1\nnot a line\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn negative_label_rejected() {
        assert!(matches!(
            parse_svmlight("-1 qid:a 1:1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn zero_feature_id_rejected() {
        assert!(parse_svmlight("1 qid:a 0:1\n").is_err());
    }

    #[test]
    fn duplicate_feature_id_rejected() {
        assert!(parse_svmlight("1 qid:a 1:1 1:2\n").is_err());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_svmlight(""), Err(Error::EmptyDataset)));
        assert!(matches!(parse_svmlight("\n# only a comment\n"), Err(Error::EmptyDataset)));
    }

    #[test]
    fn summary_counts() {
        let ds = parse_svmlight(
            "0 qid:a 1:1\n0 qid:a 1:2\n0 qid:a 1:3\n2 qid:b 1:1\n0 qid:b 1:2\n1 qid:b 1:3\n",
        )
        .unwrap();
        let s = ds.summary();
        assert_eq!(s.n_queries, 2);
        assert_eq!(s.n_docs, 6);
        assert_eq!(s.all_zero_label_queries, 1);
        assert_eq!(s.label_histogram.get(&0), Some(&4));
        assert_eq!(s.label_histogram.get(&1), Some(&1));
        assert_eq!(s.label_histogram.get(&2), Some(&1));
    }

    #[test]
    fn round_trip_through_text() {
        let text = "2 qid:7 1:0.5 3:-1.25\n0 qid:7 2:1e-3\n1 qid:8 1:0.333333343\n";
        let ds = parse_svmlight(text).unwrap();
        let again = parse_svmlight(&ds.to_svmlight()).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn round_trip_keeps_trailing_zero_column() {
        // An explicit zero in the last column must survive serialization.
        let ds = parse_svmlight("0 qid:1 5:0\n").unwrap();
        assert_eq!(ds.n_features, 5);
        let again = parse_svmlight(&ds.to_svmlight()).unwrap();
        assert_eq!(ds, again);
    }

    proptest! {
        #[test]
        fn round_trip_random_datasets(
            qids in proptest::collection::vec(0u8..4, 1..20),
            values in proptest::collection::vec(-1e6f32..1e6, 1..20),
            width in 1usize..6,
        ) {
            let mut text = String::new();
            for (i, (&q, &v)) in qids.iter().zip(values.iter()).enumerate() {
                let fid = (i % width) + 1;
                text.push_str(&format!("{} qid:q{} {}:{}\n", i % 5, q, fid, v));
            }
            let ds = parse_svmlight(&text).unwrap();
            let again = parse_svmlight(&ds.to_svmlight()).unwrap();
            prop_assert_eq!(&ds, &again);

            // Grouping is a partition of the records.
            let total: usize = ds.groups.iter().map(|g| g.n_docs()).sum();
            prop_assert_eq!(total, qids.len());
        }
    }
}
