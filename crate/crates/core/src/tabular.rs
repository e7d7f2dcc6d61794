//! Column-major flow-feature tables, CSV ingestion and the cleaning /
//! transformation steps applied before feature scoring.
//!
//! Every cell is stored as `f64`. Categorical text cells (and a textual label
//! column) are replaced by integer codes assigned in lexicographic order of
//! the distinct category strings, so the same input always yields the same
//! codes.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Label,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            kind,
            values,
        }
    }

    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column::new(name, ColumnKind::Numeric, values)
    }

    pub fn label(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column::new(name, ColumnKind::Label, values)
    }
}

/// An immutable table with exactly one label column.
///
/// `row_ids` carries the identity of each row in the source it was loaded
/// from, so row subsets taken by cleaning or sampling stay traceable.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    columns: Vec<Column>,
    row_ids: Vec<usize>,
    label: usize,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.values.len());
        Self::with_row_ids(columns, (0..rows).collect())
    }

    pub fn with_row_ids(columns: Vec<Column>, row_ids: Vec<usize>) -> Result<Self> {
        let labels: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ColumnKind::Label)
            .map(|(i, _)| i)
            .collect();
        if labels.len() != 1 {
            return Err(Error::Config(format!(
                "a table needs exactly one label column, found {}",
                labels.len()
            )));
        }
        if let Some(c) = columns.iter().find(|c| c.values.len() != row_ids.len()) {
            return Err(Error::Config(format!(
                "column {:?} has {} cells, expected {}",
                c.name,
                c.values.len(),
                row_ids.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(c) = columns.iter().find(|c| !seen.insert(c.name.as_str())) {
            return Err(Error::Config(format!("duplicate column name {:?}", c.name)));
        }
        Ok(Table {
            columns,
            row_ids,
            label: labels[0],
        })
    }

    pub fn row_count(&self) -> usize {
        self.row_ids.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn label_column(&self) -> &Column {
        &self.columns[self.label]
    }

    /// Feature columns (everything except the label), in table order.
    pub fn features(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter().filter(|c| c.kind != ColumnKind::Label)
    }

    pub fn feature_count(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features().map(|c| c.name.clone()).collect()
    }

    /// Label column as 0/1 class indices. Fails unless every label is 0 or 1.
    pub fn binary_labels(&self) -> Result<Vec<u8>> {
        self.label_column()
            .values
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    Ok(0)
                } else if v == 1.0 {
                    Ok(1)
                } else {
                    Err(Error::NonBinaryLabel(v))
                }
            })
            .collect()
    }

    /// Feature values of one row, in feature order.
    pub fn feature_row(&self, row: usize) -> Vec<f64> {
        self.features().map(|c| c.values[row]).collect()
    }

    /// Row-major copy of the feature cells.
    pub fn feature_rows(&self) -> Vec<Vec<f64>> {
        let feats: Vec<&Column> = self.features().collect();
        (0..self.row_count())
            .map(|r| feats.iter().map(|c| c.values[r]).collect())
            .collect()
    }

    /// New table holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Table {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                kind: c.kind,
                values: rows.iter().map(|&r| c.values[r]).collect(),
            })
            .collect();
        Table {
            columns,
            row_ids: rows.iter().map(|&r| self.row_ids[r]).collect(),
            label: self.label,
        }
    }

    /// Projection onto the named feature columns (in the order given) plus the
    /// label column, which is kept last.
    pub fn select_features(&self, names: &[String]) -> Result<Table> {
        let mut columns = Vec::with_capacity(names.len() + 1);
        for name in names {
            let col = self.features().find(|c| &c.name == name).ok_or_else(|| {
                Error::ManifestMismatch {
                    expected: names.to_vec(),
                    found: self.feature_names(),
                }
            })?;
            columns.push(col.clone());
        }
        columns.push(self.label_column().clone());
        Table::with_row_ids(columns, self.row_ids.clone())
    }

    fn retain_rows(&self, keep: &[bool]) -> Table {
        let rows: Vec<usize> = (0..self.row_count()).filter(|&r| keep[r]).collect();
        self.select_rows(&rows)
    }

    fn retain_columns(&self, keep: &[bool]) -> Table {
        let columns: Vec<Column> = self
            .columns
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(c, _)| c.clone())
            .collect();
        let label = columns
            .iter()
            .position(|c| c.kind == ColumnKind::Label)
            .expect("label column is never dropped");
        Table {
            columns,
            row_ids: self.row_ids.clone(),
            label,
        }
    }
}

/// Per-column category code tables. The code of a category is its position in
/// the column's list, which is sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMapping {
    pub columns: BTreeMap<String, Vec<String>>,
}

impl CategoryMapping {
    pub fn code(&self, column: &str, category: &str) -> Option<f64> {
        self.columns
            .get(column)?
            .binary_search_by(|c| c.as_str().cmp(category))
            .ok()
            .map(|i| i as f64)
    }

    pub fn decode(&self, column: &str, code: f64) -> Option<&str> {
        if code < 0.0 || code.fract() != 0.0 {
            return None;
        }
        self.columns
            .get(column)?
            .get(code as usize)
            .map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ColumnDropReason {
    #[serde(rename = "single-valued")]
    SingleValued,
    #[serde(rename = "excluded-by-name")]
    ExcludedByName,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RowDropReason {
    #[serde(rename = "non-finite")]
    NonFinite,
    #[serde(rename = "negative")]
    Negative,
    #[serde(rename = "repeated-header")]
    RepeatedHeader,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedColumn {
    pub name: String,
    pub reason: ColumnDropReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub dropped_columns: Vec<DroppedColumn>,
    pub dropped_row_counts: BTreeMap<RowDropReason, usize>,
    /// Names asked to be dropped that were not in the table.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absent_columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Default for CleaningReport {
    fn default() -> Self {
        let dropped_row_counts = [
            RowDropReason::NonFinite,
            RowDropReason::Negative,
            RowDropReason::RepeatedHeader,
        ]
        .into_iter()
        .map(|r| (r, 0))
        .collect();
        CleaningReport {
            dropped_columns: Vec::new(),
            dropped_row_counts,
            absent_columns: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

impl CleaningReport {
    pub fn rows_dropped(&self, reason: RowDropReason) -> usize {
        self.dropped_row_counts.get(&reason).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: CleaningReport) {
        self.dropped_columns.extend(other.dropped_columns);
        for (reason, n) in other.dropped_row_counts {
            *self.dropped_row_counts.entry(reason).or_insert(0) += n;
        }
        self.absent_columns.extend(other.absent_columns);
        self.warnings.extend(other.warnings);
    }
}

/// Result of reading one or more CSV files into a single table.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub table: Table,
    pub mapping: CategoryMapping,
    pub report: CleaningReport,
    /// Number of data rows contributed by each input file, in input order.
    /// Row ids are assigned consecutively across files.
    pub rows_per_file: Vec<usize>,
}

impl Loaded {
    /// Index of the input file a row id came from.
    pub fn file_of_row(&self, row_id: usize) -> usize {
        let mut end = 0;
        for (i, n) in self.rows_per_file.iter().enumerate() {
            end += n;
            if row_id < end {
                return i;
            }
        }
        self.rows_per_file.len().saturating_sub(1)
    }
}

pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Loaded> {
    load_csvs(&[path.as_ref().to_path_buf()], label_column)
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

/// Reads and merges CSV files that share one header.
///
/// A column becomes `Numeric` when every data cell across all files parses as
/// a number, otherwise `Categorical`. The label column keeps numeric values
/// when they all parse and is code-encoded otherwise. Lines that repeat the
/// header verbatim are skipped and counted.
pub fn load_csvs(paths: &[PathBuf], label_column: &str) -> Result<Loaded> {
    if paths.is_empty() {
        return Err(Error::Config("no input files".into()));
    }

    // First pass: header, row shape, column types and category sets.
    let mut header: Option<csv::StringRecord> = None;
    let mut numeric: Vec<bool> = Vec::new();
    let mut categories: Vec<BTreeSet<String>> = Vec::new();
    for path in paths {
        let mut rdr = reader(path)?;
        let mut records = rdr.records();
        let first = match records.next() {
            Some(r) => r.map_err(|e| csv_err(path, e))?,
            None => return Err(Error::EmptyFile { path: path.clone() }),
        };
        match &header {
            None => {
                if !first.iter().any(|h| h == label_column) {
                    return Err(Error::MissingLabelColumn {
                        path: path.clone(),
                        column: label_column.to_string(),
                    });
                }
                numeric = vec![true; first.len()];
                categories = vec![BTreeSet::new(); first.len()];
                header = Some(first);
            }
            Some(h) if *h != first => {
                return Err(Error::HeaderMismatch { path: path.clone() });
            }
            Some(_) => {}
        }
        let header = header.as_ref().unwrap();
        for record in records {
            let record = record.map_err(|e| csv_err(path, e))?;
            if record == *header {
                continue;
            }
            if record.len() != header.len() {
                return Err(Error::RaggedRow {
                    path: path.clone(),
                    row: record.position().map_or(0, |p| p.line() as usize),
                    found: record.len(),
                    expected: header.len(),
                });
            }
            for (i, cell) in record.iter().enumerate() {
                if numeric[i] && parse_number(cell).is_none() {
                    numeric[i] = false;
                }
                categories[i].insert(cell.to_string());
            }
        }
    }
    let header = header.expect("at least one file was read");

    let mut mapping = CategoryMapping::default();
    let lookup: Vec<Option<Vec<String>>> = header
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if numeric[i] {
                None
            } else {
                let cats: Vec<String> = std::mem::take(&mut categories[i]).into_iter().collect();
                mapping.columns.insert(name.to_string(), cats.clone());
                Some(cats)
            }
        })
        .collect();
    drop(categories);

    // Second pass: fill the column-major store.
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    let mut report = CleaningReport::default();
    let mut rows_per_file = Vec::with_capacity(paths.len());
    for path in paths {
        let mut rdr = reader(path)?;
        let mut rows = 0usize;
        for record in rdr.records().skip(1) {
            let record = record.map_err(|e| csv_err(path, e))?;
            if record == header {
                *report
                    .dropped_row_counts
                    .entry(RowDropReason::RepeatedHeader)
                    .or_insert(0) += 1;
                continue;
            }
            for (i, cell) in record.iter().enumerate() {
                let v = match &lookup[i] {
                    None => parse_number(cell).expect("checked in first pass"),
                    Some(cats) => cats
                        .binary_search_by(|c| c.as_str().cmp(cell))
                        .expect("category collected in first pass")
                        as f64,
                };
                values[i].push(v);
            }
            rows += 1;
        }
        rows_per_file.push(rows);
    }

    let columns = header
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (name, vals))| {
            let kind = if name == label_column {
                ColumnKind::Label
            } else if numeric[i] {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            };
            Column::new(name, kind, vals)
        })
        .collect();
    let table = Table::new(columns)?;
    Ok(Loaded {
        table,
        mapping,
        report,
        rows_per_file,
    })
}

/// Writes the table as CSV with a single header line. Cells are printed with
/// the shortest representation that parses back to the same `f64`.
pub fn write_csv(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
    wtr.write_record(table.column_names())
        .map_err(|e| csv_err(path, e))?;
    let mut cells = vec![String::new(); table.column_count()];
    for r in 0..table.row_count() {
        for (cell, col) in cells.iter_mut().zip(table.columns()) {
            cell.clear();
            use std::fmt::Write as _;
            let _ = write!(cell, "{}", col.values[r]);
        }
        wtr.write_record(&cells).map_err(|e| csv_err(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Removes the named columns. Names not present are ignored and listed in the
/// report as absent.
pub fn drop_columns_by_name(t: &Table, names: &[String]) -> Result<(Table, CleaningReport)> {
    let mut report = CleaningReport::default();
    let mut keep = vec![true; t.column_count()];
    for name in names {
        match t.columns().iter().position(|c| &c.name == name) {
            Some(i) if t.columns()[i].kind == ColumnKind::Label => {
                return Err(Error::DropLabel(name.clone()));
            }
            Some(i) => {
                if keep[i] {
                    keep[i] = false;
                    report.dropped_columns.push(DroppedColumn {
                        name: name.clone(),
                        reason: ColumnDropReason::ExcludedByName,
                    });
                }
            }
            None => report.absent_columns.push(name.clone()),
        }
    }
    Ok((t.retain_columns(&keep), report))
}

fn distinct_at_least_two(values: &[f64]) -> bool {
    let Some(&first) = values.first() else {
        return false;
    };
    // -0.0 == 0.0 and NaN != NaN would both mislead a plain comparison.
    let key = |v: f64| if v == 0.0 { 0u64 } else { v.to_bits() };
    values.iter().any(|&v| key(v) != key(first))
}

/// Removes every non-label column holding fewer than two distinct values.
pub fn drop_single_valued_columns(t: &Table) -> (Table, CleaningReport) {
    let mut report = CleaningReport::default();
    let keep: Vec<bool> = t
        .columns()
        .iter()
        .map(|c| {
            let keep = c.kind == ColumnKind::Label || distinct_at_least_two(&c.values);
            if !keep {
                report.dropped_columns.push(DroppedColumn {
                    name: c.name.clone(),
                    reason: ColumnDropReason::SingleValued,
                });
            }
            keep
        })
        .collect();
    let out = t.retain_columns(&keep);
    if out.column_count() == 1 {
        report
            .warnings
            .push("every feature column was single-valued; only the label remains".into());
    }
    (out, report)
}

/// Removes rows with a NaN or infinite Numeric cell (counted as non-finite),
/// then rows with a negative Numeric cell (counted as negative).
pub fn drop_invalid_rows(t: &Table) -> (Table, CleaningReport) {
    let numeric: Vec<&Column> = t
        .columns()
        .iter()
        .filter(|c| c.kind == ColumnKind::Numeric)
        .collect();
    let mut non_finite = 0;
    let mut negative = 0;
    let keep: Vec<bool> = (0..t.row_count())
        .map(|r| {
            if numeric.iter().any(|c| !c.values[r].is_finite()) {
                non_finite += 1;
                false
            } else if numeric.iter().any(|c| c.values[r] < 0.0) {
                negative += 1;
                false
            } else {
                true
            }
        })
        .collect();
    let mut report = CleaningReport::default();
    report
        .dropped_row_counts
        .insert(RowDropReason::NonFinite, non_finite);
    report
        .dropped_row_counts
        .insert(RowDropReason::Negative, negative);
    (t.retain_rows(&keep), report)
}

/// Min-max scaling of every Numeric column onto [0, 1]. Categorical codes and
/// the label are left alone.
pub fn minmax_normalize(t: &Table) -> Result<Table> {
    let mut columns = t.columns().to_vec();
    for col in columns.iter_mut().filter(|c| c.kind == ColumnKind::Numeric) {
        if col.values.is_empty() {
            continue;
        }
        if col.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteColumn(col.name.clone()));
        }
        let min = col.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = col.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == min {
            return Err(Error::ConstantColumn(col.name.clone()));
        }
        let range = max - min;
        for v in &mut col.values {
            *v = (*v - min) / range;
        }
    }
    Table::with_row_ids(columns, t.row_ids().to_vec())
}

/// Resolves a label text to the value stored in the label column: through the
/// category mapping when the label was text-encoded, else as a number.
pub fn label_value(t: &Table, mapping: &CategoryMapping, label: &str) -> Option<f64> {
    let name = &t.label_column().name;
    if mapping.columns.contains_key(name) {
        mapping.code(name, label)
    } else {
        parse_number(label)
    }
}

#[derive(Clone, Debug)]
pub struct AttackSplit {
    /// One table per attack label, keyed by the label text; labels are
    /// binarized to 0 = benign, 1 = attack.
    pub tables: BTreeMap<String, Table>,
    pub warnings: Vec<String>,
}

/// Builds one binary table per attack label: all benign rows plus the rows of
/// that attack, in source order.
pub fn split_by_attack(
    t: &Table,
    mapping: &CategoryMapping,
    benign: &str,
    attacks: &[String],
) -> Result<AttackSplit> {
    let labels = &t.label_column().values;
    let benign_value =
        label_value(t, mapping, benign).ok_or_else(|| Error::UnknownLabel(benign.to_string()))?;
    let mut warnings = Vec::new();
    if !labels.contains(&benign_value) {
        warnings.push(format!("no rows carry the benign label {benign:?}"));
    }
    let mut tables = BTreeMap::new();
    for attack in attacks {
        let value = label_value(t, mapping, attack)
            .filter(|v| labels.contains(v))
            .ok_or_else(|| Error::UnknownLabel(attack.clone()))?;
        let rows: Vec<usize> = (0..t.row_count())
            .filter(|&r| labels[r] == benign_value || labels[r] == value)
            .collect();
        let mut sub = t.select_rows(&rows);
        let label = sub.label;
        for v in &mut sub.columns[label].values {
            *v = if *v == value { 1.0 } else { 0.0 };
        }
        tables.insert(attack.clone(), sub);
    }
    Ok(AttackSplit { tables, warnings })
}
