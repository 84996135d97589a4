//! Typed CSV tables, their encoding as facts, and cross-validation folds.
//!
//! Header cells carry the column kind: `name:id`, `name:cat`, `name:cat:bare`,
//! `name:bool`, `name:num` and `name:label=<positive value>`. Untyped cells
//! are categorical. A separate schema file may hold the same declarations,
//! one per line.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{ExampleError, ExampleSet};
use crate::logic::{Atom, Clause, Program, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnKind {
    Id,
    /// `bare` emits `value(s)` instead of `column_value(s)`.
    Categorical {
        bare: bool,
    },
    Boolean,
    Numeric,
    Target {
        positive: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub columns: Vec<Column>,
}

#[derive(Debug)]
pub enum DataError {
    Io(std::io::Error),
    Csv(String),
    Schema(String),
    Missing { line: u64, column: String },
    BadValue { line: u64, column: String, value: String },
    Collision { name: String, first: String, second: String },
    DuplicateSubject(String),
    Folds { k: usize, rows: usize },
    Examples(ExampleError),
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::Io(e) => write!(f, "{e}"),
            DataError::Csv(e) => write!(f, "csv: {e}"),
            DataError::Schema(e) => write!(f, "schema: {e}"),
            DataError::Missing { line, column } => write!(f, "line {line}: missing value in column `{column}`"),
            DataError::BadValue { line, column, value } => {
                write!(f, "line {line}: column `{column}` cannot hold `{value}`")
            }
            DataError::Collision { name, first, second } => {
                write!(f, "predicate `{name}` generated by both {first} and {second}")
            }
            DataError::DuplicateSubject(s) => write!(f, "subject `{s}` appears twice"),
            DataError::Folds { k, rows } => write!(f, "cannot split {rows} rows into {k} folds"),
            DataError::Examples(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for DataError {}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError::Io(e)
    }
}

impl From<csv::Error> for DataError {
    fn from(e: csv::Error) -> Self {
        DataError::Csv(e.to_string())
    }
}

/// Lowercase identifier form: runs of other characters become `_`.
pub fn normalize(raw: &str) -> String {
    let mut out = String::new();
    for ch in raw.trim().chars().flat_map(char::to_lowercase) {
        if ch.is_ascii_alphanumeric() {
            out.push(ch);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn starts_with_letter(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
}

impl Column {
    /// Parses `name[:kind[:bare]]` or `name:label=<value>`.
    pub fn parse(decl: &str) -> Result<Column, DataError> {
        let mut parts = decl.trim().splitn(2, ':');
        let name = normalize(parts.next().unwrap_or(""));
        if name.is_empty() || !starts_with_letter(&name) {
            return Err(DataError::Schema(format!("bad column name `{decl}`")));
        }
        let kind = match parts.next().map(str::trim) {
            None | Some("cat") | Some("") => ColumnKind::Categorical { bare: false },
            Some("cat:bare") => ColumnKind::Categorical { bare: true },
            Some("id") => ColumnKind::Id,
            Some("bool") => ColumnKind::Boolean,
            Some("num") => ColumnKind::Numeric,
            Some(other) => match other.strip_prefix("label=") {
                Some(v) if !v.trim().is_empty() => ColumnKind::Target {
                    positive: v.trim().to_string(),
                },
                _ => return Err(DataError::Schema(format!("unknown column kind in `{decl}`"))),
            },
        };
        Ok(Column { name, kind })
    }
}

impl Schema {
    pub fn from_header(cells: &[&str]) -> Result<Schema, DataError> {
        let columns = cells.iter().map(|c| Column::parse(c)).collect::<Result<Vec<_>, _>>()?;
        let schema = Schema { columns };
        schema.validate()?;
        Ok(schema)
    }

    /// One declaration per line; blank lines and `#` comments are skipped.
    pub fn from_declarations(text: &str) -> Result<Schema, DataError> {
        let cells: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Schema::from_header(&cells)
    }

    fn validate(&self) -> Result<(), DataError> {
        let targets = self.columns.iter().filter(|c| matches!(c.kind, ColumnKind::Target { .. })).count();
        if targets != 1 {
            return Err(DataError::Schema(format!("expected one label column, found {targets}")));
        }
        if self.columns.iter().filter(|c| c.kind == ColumnKind::Id).count() > 1 {
            return Err(DataError::Schema("more than one id column".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.columns {
            if !seen.insert(&c.name) {
                return Err(DataError::Schema(format!("column `{}` declared twice", c.name)));
            }
        }
        Ok(())
    }

    pub fn target(&self) -> &Column {
        self.columns
            .iter()
            .find(|c| matches!(c.kind, ColumnKind::Target { .. }))
            .expect("validated schema has a label column")
    }

    pub fn positive_label(&self) -> &str {
        match &self.target().kind {
            ColumnKind::Target { positive } => positive,
            _ => unreachable!(),
        }
    }

    pub fn set_positive_label(&mut self, label: &str) {
        for c in &mut self.columns {
            if let ColumnKind::Target { positive } = &mut c.kind {
                *positive = label.to_string();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Bool(bool),
    Num(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub subject: String,
    /// One cell per schema column.
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub schema: Schema,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Declarations replacing the header's own annotations.
    pub schema: Option<Schema>,
    pub positive_label: Option<String>,
    pub drop_missing_rows: bool,
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_csv(std::fs::File::open(path)?, &name, options)
}

pub fn read_csv<R: Read>(reader: R, name: &str, options: &LoadOptions) -> Result<Dataset, DataError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
    let mut schema = match &options.schema {
        None => Schema::from_header(&header.iter().map(String::as_str).collect::<Vec<_>>())?,
        Some(declared) => {
            // columns are matched to header cells by name
            let names: Vec<String> = header.iter().map(|h| normalize(h.split(':').next().unwrap_or(""))).collect();
            let mut columns = Vec::new();
            for n in &names {
                let col = declared
                    .columns
                    .iter()
                    .find(|c| &c.name == n)
                    .ok_or_else(|| DataError::Schema(format!("no declaration for column `{n}`")))?;
                columns.push(col.clone());
            }
            let s = Schema { columns };
            s.validate()?;
            s
        }
    };
    if let Some(label) = &options.positive_label {
        schema.set_positive_label(label);
    }

    let id_col = schema.columns.iter().position(|c| c.kind == ColumnKind::Id);
    let mut rows = Vec::new();
    let mut subjects = HashSet::new();
    'records: for record in csv.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut cells = Vec::with_capacity(schema.columns.len());
        for (col, raw) in schema.columns.iter().zip(record.iter()) {
            if raw.is_empty() || raw == "?" {
                if options.drop_missing_rows {
                    continue 'records;
                }
                return Err(DataError::Missing {
                    line,
                    column: col.name.clone(),
                });
            }
            let bad = || DataError::BadValue {
                line,
                column: col.name.clone(),
                value: raw.to_string(),
            };
            cells.push(match col.kind {
                ColumnKind::Numeric => {
                    let v: f64 = raw.parse().map_err(|_| bad())?;
                    if !v.is_finite() {
                        return Err(bad());
                    }
                    Cell::Num(v)
                }
                ColumnKind::Boolean => Cell::Bool(match raw.to_lowercase().as_str() {
                    "true" | "t" | "yes" | "y" | "1" => true,
                    "false" | "f" | "no" | "n" | "0" => false,
                    _ => return Err(bad()),
                }),
                _ => Cell::Text(raw.to_string()),
            });
        }
        if cells.len() != schema.columns.len() {
            return Err(DataError::Csv(format!(
                "line {line}: expected {} cells, found {}",
                schema.columns.len(),
                record.len()
            )));
        }
        let subject = match id_col {
            Some(i) => match &cells[i] {
                Cell::Text(t) => normalize(t),
                _ => unreachable!(),
            },
            None => format!("d{}", rows.len() + 1),
        };
        if subject.is_empty() || !subjects.insert(subject.clone()) {
            return Err(DataError::DuplicateSubject(subject));
        }
        rows.push(Row { subject, cells });
    }
    Ok(Dataset {
        name: name.to_string(),
        schema,
        rows,
    })
}

/// Background facts plus labelled goal atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Propositional {
    pub background: Program,
    pub positives: BTreeSet<Atom>,
    pub negatives: BTreeSet<Atom>,
}

impl Propositional {
    pub fn examples(&self) -> Result<ExampleSet, DataError> {
        ExampleSet::new(self.positives.clone(), self.negatives.clone()).map_err(DataError::Examples)
    }
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn subset(&self, rows: Vec<Row>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            schema: self.schema.clone(),
            rows,
        }
    }

    pub fn is_positive(&self, row: &Row) -> bool {
        let target = self
            .schema
            .columns
            .iter()
            .position(|c| matches!(c.kind, ColumnKind::Target { .. }))
            .unwrap();
        match &row.cells[target] {
            Cell::Text(t) => normalize(t) == normalize(self.schema.positive_label()),
            _ => false,
        }
    }
}

fn predicate_name(col: &Column, value: &str) -> String {
    let v = normalize(value);
    match col.kind {
        ColumnKind::Categorical { bare: true } if starts_with_letter(&v) => v,
        _ if v.is_empty() => col.name.clone(),
        _ => format!("{}_{}", col.name, v),
    }
}

/// Encodes every row as facts about its subject and labels it for `goal`.
pub fn propositionalize(d: &Dataset, goal: &str) -> Result<Propositional, DataError> {
    let goal = normalize(goal);
    // generated name -> (column, value) that produced it
    let mut origin: HashMap<String, String> = HashMap::new();
    origin.insert(goal.clone(), "the goal".to_string());
    let mut claim = |name: &str, source: String| -> Result<(), DataError> {
        match origin.get(name) {
            Some(first) if *first != source => Err(DataError::Collision {
                name: name.to_string(),
                first: first.clone(),
                second: source,
            }),
            Some(_) => Ok(()),
            None => {
                origin.insert(name.to_string(), source);
                Ok(())
            }
        }
    };

    let mut clauses = Vec::new();
    let mut positives = BTreeSet::new();
    let mut negatives = BTreeSet::new();
    for row in &d.rows {
        let s = || Term::constant(row.subject.clone());
        for (col, cell) in d.schema.columns.iter().zip(&row.cells) {
            match (&col.kind, cell) {
                (ColumnKind::Categorical { .. }, Cell::Text(v)) => {
                    let name = predicate_name(col, v);
                    claim(&name, format!("{}={}", col.name, normalize(v)))?;
                    clauses.push(Clause::fact(Atom::new(name, vec![s()])));
                }
                (ColumnKind::Boolean, Cell::Bool(b)) => {
                    claim(&col.name, format!("column {}", col.name))?;
                    if *b {
                        clauses.push(Clause::fact(Atom::new(col.name.clone(), vec![s()])));
                    }
                }
                (ColumnKind::Numeric, Cell::Num(v)) => {
                    claim(&col.name, format!("column {}", col.name))?;
                    clauses.push(Clause::fact(Atom::new(col.name.clone(), vec![s(), Term::num(*v)])));
                }
                _ => {}
            }
        }
        let atom = Atom::new(goal.clone(), vec![s()]);
        if d.is_positive(row) {
            positives.insert(atom);
        } else {
            negatives.insert(atom);
        }
    }
    Ok(Propositional {
        background: Program::new(clauses),
        positives,
        negatives,
    })
}

/// Seeded shuffle into `k` near-equal folds; returns `(train, test)` pairs
/// with rows kept in their original order.
pub fn split_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>, DataError> {
    let n = d.rows.len();
    if k < 2 || k > n {
        return Err(DataError::Folds { k, rows: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        fold_of[row] = pos % k;
    }
    Ok((0..k)
        .map(|f| {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (i, row) in d.rows.iter().enumerate() {
                if fold_of[i] == f { &mut test } else { &mut train }.push(row.clone());
            }
            (d.subset(train), d.subset(test))
        })
        .collect())
}
