//! Scored response matrices and the CSV interchange format.
//!
//! The CSV starts with a `student_id` column, may carry the optional
//! demographic columns `grade`, `age`, `after_school_programming` and
//! `external_score` in any order, and treats every remaining column
//! as an item scored 0 or 1.

use super::StatsError;
use std::collections::BTreeMap;
use thiserror::Error;

/// Names reserved for non-item columns.
pub const META_COLUMNS: [&str; 4] = ["grade", "age", "after_school_programming", "external_score"];

/// Problems reading or writing the response CSV.
#[derive(Debug, Error)]
pub enum ResponseCsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("first column must be 'student_id', found '{0}'")]
    MissingStudentId(String),
    #[error("no item columns after student_id and the demographic columns")]
    NoItemColumns,
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("row {row}: bad value '{value}' for column '{column}' ({expected})")]
    BadValue {
        row: usize,
        column: String,
        value: String,
        expected: &'static str,
    },
    #[error("row {row}: duplicate student id '{id}'")]
    DuplicateStudent { row: usize, id: String },
    #[error("csv has no data rows")]
    Empty,
    #[error(transparent)]
    Matrix(#[from] StatsError),
}

/// Binary scores for `n` persons on `k` items, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMatrix {
    person_ids: Vec<String>,
    item_ids: Vec<String>,
    data: Vec<u8>,
}

impl ResponseMatrix {
    /// Builds a matrix, checking id uniqueness, row lengths and that
    /// every value is 0 or 1.
    pub fn new(
        person_ids: Vec<String>,
        item_ids: Vec<String>,
        rows: Vec<Vec<u8>>,
    ) -> Result<Self, StatsError> {
        if person_ids.len() != rows.len() {
            return Err(StatsError::LengthMismatch {
                left: person_ids.len(),
                right: rows.len(),
            });
        }
        check_unique(&person_ids, "person ids")?;
        check_unique(&item_ids, "item ids")?;
        let k = item_ids.len();
        let mut data = Vec::with_capacity(rows.len() * k);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(StatsError::RaggedRow {
                    row: r + 1,
                    expected: k,
                    got: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(StatsError::NotBinary {
                        row: r + 1,
                        column: item_ids[c].clone(),
                        value: v.to_string(),
                    });
                }
                data.push(v);
            }
        }
        Ok(ResponseMatrix {
            person_ids,
            item_ids,
            data,
        })
    }

    pub fn n_persons(&self) -> usize {
        self.person_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn person_ids(&self) -> &[String] {
        &self.person_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn get(&self, person: usize, item: usize) -> u8 {
        self.data[person * self.item_ids.len() + item]
    }

    pub fn row(&self, person: usize) -> &[u8] {
        let k = self.item_ids.len();
        &self.data[person * k..(person + 1) * k]
    }

    /// Raw score of one person.
    pub fn person_total(&self, person: usize) -> u32 {
        self.row(person).iter().map(|&v| v as u32).sum()
    }

    /// Number of correct responses on one item.
    pub fn item_total(&self, item: usize) -> u32 {
        (0..self.n_persons()).map(|p| self.get(p, item) as u32).sum()
    }

    /// All raw scores in person order.
    pub fn person_totals(&self) -> Vec<u32> {
        (0..self.n_persons()).map(|p| self.person_total(p)).collect()
    }

    /// New matrix keeping only the named items, in the given order.
    pub fn select_items(&self, ids: &[String]) -> Result<ResponseMatrix, StatsError> {
        let mut indices = Vec::with_capacity(ids.len());
        for id in ids {
            let idx = self
                .item_ids
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| StatsError::UnknownItem { id: id.clone() })?;
            indices.push(idx);
        }
        let rows: Vec<Vec<u8>> = (0..self.n_persons())
            .map(|p| indices.iter().map(|&i| self.get(p, i)).collect())
            .collect();
        ResponseMatrix::new(self.person_ids.clone(), ids.to_vec(), rows)
    }
}

fn check_unique(ids: &[String], what: &'static str) -> Result<(), StatsError> {
    let mut seen = std::collections::BTreeSet::new();
    for id in ids {
        if id.trim().is_empty() {
            return Err(StatsError::EmptyId { what });
        }
        if !seen.insert(id.as_str()) {
            return Err(StatsError::DuplicateId { id: id.clone() });
        }
    }
    Ok(())
}

/// Optional demographics of one person.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersonMeta {
    pub grade: Option<u32>,
    pub age: Option<u32>,
    pub after_school_programming: Option<bool>,
    pub external_score: Option<f64>,
}

/// Demographics keyed by person id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetaTable {
    by_person: BTreeMap<String, PersonMeta>,
}

impl MetaTable {
    pub fn insert(&mut self, person_id: impl Into<String>, meta: PersonMeta) {
        self.by_person.insert(person_id.into(), meta);
    }

    pub fn get(&self, person_id: &str) -> Option<&PersonMeta> {
        self.by_person.get(person_id)
    }

    pub fn is_empty(&self) -> bool {
        self.by_person.is_empty()
    }

    fn has(&self, pick: impl Fn(&PersonMeta) -> bool) -> bool {
        self.by_person.values().any(pick)
    }
}

/// Parses the response CSV into scores and demographics.
pub fn responses_from_csv(text: &str) -> Result<(ResponseMatrix, MetaTable), ResponseCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    match headers.first() {
        Some(first) if first == "student_id" => {}
        other => {
            return Err(ResponseCsvError::MissingStudentId(
                other.cloned().unwrap_or_default(),
            ))
        }
    }

    let mut seen = std::collections::BTreeSet::new();
    for h in &headers {
        if !seen.insert(h.clone()) {
            return Err(ResponseCsvError::DuplicateColumn(h.clone()));
        }
    }

    // Everything that is not student_id or a demographic is an item.
    let mut meta_cols: Vec<(usize, &str)> = Vec::new();
    let mut item_cols: Vec<(usize, String)> = Vec::new();
    for (i, h) in headers.iter().enumerate().skip(1) {
        if let Some(name) = META_COLUMNS.iter().find(|m| *m == h) {
            meta_cols.push((i, name));
        } else {
            item_cols.push((i, h.clone()));
        }
    }
    if item_cols.is_empty() {
        return Err(ResponseCsvError::NoItemColumns);
    }

    let mut person_ids = Vec::new();
    let mut rows = Vec::new();
    let mut meta = MetaTable::default();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = r + 2;
        let sid = record.get(0).unwrap_or("").to_string();
        if person_ids.contains(&sid) {
            return Err(ResponseCsvError::DuplicateStudent {
                row: row_no,
                id: sid,
            });
        }

        let mut pm = PersonMeta::default();
        for &(col, name) in &meta_cols {
            let raw = record.get(col).unwrap_or("");
            if raw.is_empty() {
                continue;
            }
            let bad = |expected| ResponseCsvError::BadValue {
                row: row_no,
                column: name.to_string(),
                value: raw.to_string(),
                expected,
            };
            match name {
                "grade" => pm.grade = Some(raw.parse().map_err(|_| bad("an integer"))?),
                "age" => pm.age = Some(raw.parse().map_err(|_| bad("an integer"))?),
                "after_school_programming" => {
                    pm.after_school_programming = Some(parse_flag(raw).ok_or_else(|| bad("yes or no"))?)
                }
                "external_score" => {
                    pm.external_score = Some(raw.parse().map_err(|_| bad("a number"))?)
                }
                _ => unreachable!("meta_cols only holds known names"),
            }
        }

        let mut row = Vec::with_capacity(item_cols.len());
        for (col, item_id) in &item_cols {
            let raw = record.get(*col).unwrap_or("");
            match raw {
                "0" => row.push(0),
                "1" => row.push(1),
                _ => {
                    return Err(ResponseCsvError::BadValue {
                        row: row_no,
                        column: item_id.clone(),
                        value: raw.to_string(),
                        expected: "0 or 1",
                    })
                }
            }
        }
        meta.insert(sid.clone(), pm);
        person_ids.push(sid);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ResponseCsvError::Empty);
    }

    let item_ids: Vec<String> = item_cols.into_iter().map(|(_, id)| id).collect();
    let matrix = ResponseMatrix::new(person_ids, item_ids, rows)?;
    Ok((matrix, meta))
}

fn parse_flag(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "yes" | "true" | "1" => Some(true),
        "no" | "false" | "0" => Some(false),
        _ => None,
    }
}

/// Renders scores plus demographics back to CSV. A demographic column
/// appears when at least one person has a value for it.
pub fn responses_to_csv(matrix: &ResponseMatrix, meta: &MetaTable) -> String {
    let persons = matrix.person_ids();
    let with_grade = meta.has(|m| m.grade.is_some());
    let with_age = meta.has(|m| m.age.is_some());
    let with_flag = meta.has(|m| m.after_school_programming.is_some());
    let with_external = meta.has(|m| m.external_score.is_some());

    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["student_id".to_string()];
    if with_grade {
        header.push("grade".into());
    }
    if with_age {
        header.push("age".into());
    }
    if with_flag {
        header.push("after_school_programming".into());
    }
    if with_external {
        header.push("external_score".into());
    }
    header.extend(matrix.item_ids().iter().cloned());
    writer.write_record(&header).expect("in-memory write");

    for (p, sid) in persons.iter().enumerate() {
        let pm = meta.get(sid).cloned().unwrap_or_default();
        let mut record = vec![sid.clone()];
        if with_grade {
            record.push(pm.grade.map(|g| g.to_string()).unwrap_or_default());
        }
        if with_age {
            record.push(pm.age.map(|a| a.to_string()).unwrap_or_default());
        }
        if with_flag {
            record.push(
                pm.after_school_programming
                    .map(|f| if f { "yes" } else { "no" }.to_string())
                    .unwrap_or_default(),
            );
        }
        if with_external {
            record.push(pm.external_score.map(|e| format!("{e}")).unwrap_or_default());
        }
        record.extend(matrix.row(p).iter().map(|v| v.to_string()));
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
