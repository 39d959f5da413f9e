//! Categorical datasets: CSV ingestion, equal-width discretization and
//! seeded train/test splitting.
//!
//! Every attribute value and class label is encoded as an index into a
//! vocabulary. Vocabularies are ordered by first appearance in the source
//! rows, so the encoding of a given file is fully deterministic.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::sync::Arc;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeKind {
    Categorical,
    /// Values are equal-width bins over a numeric column.
    Discretized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttributeSchema {
    pub name: String,
    pub values: Vec<String>,
    pub kind: AttributeKind,
}

impl AttributeSchema {
    pub fn value_index(&self, token: &str) -> Option<usize> {
        self.values.iter().position(|v| v == token)
    }

    pub fn value_name(&self, index: usize) -> Option<&str> {
        self.values.get(index).map(String::as_str)
    }
}

/// Attribute vocabularies plus the class vocabulary, shared by a dataset and
/// every subset split from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schema {
    pub attributes: Vec<AttributeSchema>,
    pub class_attribute: String,
    pub class_names: Vec<String>,
}

impl Schema {
    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Total vocabulary size over all attributes.
    pub fn n_selectors(&self) -> usize {
        self.attributes.iter().map(|a| a.values.len()).sum()
    }

    pub fn class_name(&self, class: usize) -> &str {
        self.class_names.get(class).map_or("?", String::as_str)
    }

    pub fn class_index(&self, token: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == token)
    }
}

/// An immutable table of encoded examples.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    schema: Arc<Schema>,
    rows: Vec<Vec<usize>>,
    classes: Vec<usize>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        schema: Arc<Schema>,
        rows: Vec<Vec<usize>>,
        classes: Vec<usize>,
    ) -> Result<Self> {
        let n_a = schema.n_attributes();
        if n_a == 0 {
            return Err(Error::Schema("a dataset needs at least one attribute".into()));
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        if rows.len() != classes.len() {
            return Err(Error::Schema(format!(
                "{} rows but {} class labels",
                rows.len(),
                classes.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_a {
                return Err(Error::Schema(format!(
                    "row {i} has {} values, expected {n_a}",
                    row.len()
                )));
            }
            for (a, &v) in row.iter().enumerate() {
                if v >= schema.attributes[a].values.len() {
                    return Err(Error::Schema(format!(
                        "row {i}: value index {v} outside the vocabulary of {}",
                        schema.attributes[a].name
                    )));
                }
            }
        }
        if let Some((i, &c)) = classes
            .iter()
            .enumerate()
            .find(|(_, &c)| c >= schema.n_classes())
        {
            return Err(Error::Schema(format!("row {i}: class index {c} out of range")));
        }
        Ok(Dataset {
            name: name.into(),
            schema,
            rows,
            classes,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.n_attributes()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.classes[i]
    }

    /// Decodes one cell back to its source token.
    pub fn token(&self, row: usize, attribute: usize) -> &str {
        &self.schema.attributes[attribute].values[self.rows[row][attribute]]
    }

    /// Most frequent class; ties go to the lowest class index.
    pub fn modal_class(&self) -> usize {
        let mut counts = vec![0usize; self.schema.n_classes()];
        for &c in &self.classes {
            counts[c] += 1;
        }
        modal_index(&counts)
    }

    /// New dataset holding the given rows (in the given order) under the same
    /// schema.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let classes = indices.iter().map(|&i| self.classes[i]).collect();
        Dataset::new(self.name.clone(), Arc::clone(&self.schema), rows, classes)
    }

    pub fn stats(&self) -> DatasetStats {
        let mut seen: Vec<Vec<bool>> = self
            .schema
            .attributes
            .iter()
            .map(|a| vec![false; a.values.len()])
            .collect();
        let mut classes = vec![false; self.schema.n_classes()];
        for (row, &c) in self.rows.iter().zip(&self.classes) {
            for (a, &v) in row.iter().enumerate() {
                seen[a][v] = true;
            }
            classes[c] = true;
        }
        DatasetStats {
            examples: self.len(),
            attributes: self.n_attributes(),
            selectors: seen.iter().flatten().filter(|&&s| s).count(),
            classes: classes.iter().filter(|&&s| s).count(),
        }
    }
}

/// Summary counts in the shape of a dataset catalogue row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub examples: usize,
    pub attributes: usize,
    /// Distinct attribute-value pairs occurring in the rows.
    pub selectors: usize,
    pub classes: usize,
}

pub(crate) fn modal_index(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = i;
        }
    }
    best
}

/// Which source column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ClassColumn {
    First,
    #[default]
    Last,
    /// Zero-based column position.
    Index(usize),
    /// Header name; only valid when the source has a header row.
    Name(String),
}

impl FromStr for ClassColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "" => Err(Error::InvalidArgument("empty class column designator".into())),
            "first" => Ok(ClassColumn::First),
            "last" => Ok(ClassColumn::Last),
            _ => Ok(s
                .parse::<usize>()
                .map(ClassColumn::Index)
                .unwrap_or_else(|_| ClassColumn::Name(s.to_string()))),
        }
    }
}

impl fmt::Display for ClassColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassColumn::First => f.write_str("first"),
            ClassColumn::Last => f.write_str("last"),
            ClassColumn::Index(i) => write!(f, "{i}"),
            ClassColumn::Name(n) => f.write_str(n),
        }
    }
}

/// Parsed but not yet encoded delimiter-separated text.
#[derive(Debug, Clone)]
pub struct RawTable {
    /// Column names for every source column, class column included.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// 1-based source line of each row, for diagnostics.
    pub lines: Vec<u64>,
    pub class_column: usize,
}

impl RawTable {
    pub fn read<R: Read>(source: R, has_header: bool, class_column: &ClassColumn) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source);

        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        let mut width = None;
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let expected = *width.get_or_insert(record.len());
            if record.len() != expected {
                return Err(Error::RaggedRow {
                    line,
                    expected,
                    found: record.len(),
                });
            }
            if let Some(column) = record.iter().position(str::is_empty) {
                return Err(Error::EmptyCell {
                    line,
                    column: column + 1,
                });
            }
            let cells: Vec<String> = record.iter().map(str::to_string).collect();
            if has_header && header.is_none() {
                header = Some(cells);
            } else {
                rows.push(cells);
                lines.push(line);
            }
        }

        let width = match width {
            Some(w) if !rows.is_empty() => w,
            _ => return Err(Error::EmptyInput),
        };
        let columns = header.unwrap_or_else(|| {
            (0..width)
                .map(|i| if i + 1 == width { "class".to_string() } else { format!("x{}", i + 1) })
                .collect()
        });
        let class_column = match class_column {
            ClassColumn::First => 0,
            ClassColumn::Last => width - 1,
            ClassColumn::Index(i) if *i < width => *i,
            ClassColumn::Index(i) => {
                return Err(Error::Schema(format!(
                    "class column {i} does not exist ({width} columns)"
                )))
            }
            ClassColumn::Name(name) if !has_header => {
                return Err(Error::Schema(format!(
                    "class column {name:?} named but the input has no header"
                )))
            }
            ClassColumn::Name(name) => columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::Schema(format!("no column named {name:?}")))?,
        };
        if width < 2 {
            return Err(Error::Schema(
                "need at least one attribute column besides the class".into(),
            ));
        }
        Ok(RawTable {
            columns,
            rows,
            lines,
            class_column,
        })
    }

    /// Source column positions of the attributes, in order.
    pub fn attribute_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.columns.len()).filter(move |&c| c != self.class_column)
    }

    fn numeric_column(&self, column: usize) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .zip(&self.lines)
            .map(|(row, &line)| {
                let cell = &row[column];
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::NotNumeric {
                        line,
                        column: column + 1,
                        value: cell.clone(),
                    }),
                }
            })
            .collect()
    }

    fn is_numeric(&self, column: usize) -> bool {
        self.rows
            .iter()
            .all(|r| r[column].parse::<f64>().is_ok_and(f64::is_finite))
    }
}

/// Interns tokens in first-appearance order.
#[derive(Default)]
struct Vocabulary {
    values: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    fn seeded(values: &[String]) -> Self {
        let index = values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Vocabulary {
            values: values.to_vec(),
            index,
        }
    }

    fn intern(&mut self, token: &str) -> usize {
        if let Some(&i) = self.index.get(token) {
            return i;
        }
        let i = self.values.len();
        self.values.push(token.to_string());
        self.index.insert(token.to_string(), i);
        i
    }
}

/// Reads comma-separated text into a categorical dataset. Every column other
/// than the class column becomes an attribute.
pub fn load_csv<R: Read>(source: R, has_header: bool, class_column: &ClassColumn) -> Result<Dataset> {
    let table = RawTable::read(source, has_header, class_column)?;
    encode_categorical(&table)
}

/// Encodes every attribute column as categorical tokens.
pub fn encode_categorical(table: &RawTable) -> Result<Dataset> {
    encode(table, &vec![None; table.columns.len()], "dataset")
}

fn encode(table: &RawTable, bins: &[Option<EqualWidthBins>], name: &str) -> Result<Dataset> {
    let attribute_columns: Vec<usize> = table.attribute_columns().collect();
    let mut vocabularies: Vec<Vocabulary> =
        attribute_columns.iter().map(|_| Vocabulary::default()).collect();
    let mut class_vocabulary = Vocabulary::default();
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut classes = Vec::with_capacity(table.rows.len());

    for cells in &table.rows {
        let mut row = Vec::with_capacity(attribute_columns.len());
        for (a, &column) in attribute_columns.iter().enumerate() {
            let index = match &bins[column] {
                Some(b) => {
                    // already validated as numeric by the caller
                    let v: f64 = cells[column].parse().unwrap_or(b.min);
                    vocabularies[a].intern(&b.label(b.bin(v)))
                }
                None => vocabularies[a].intern(&cells[column]),
            };
            row.push(index);
        }
        rows.push(row);
        classes.push(class_vocabulary.intern(&cells[table.class_column]));
    }

    let attributes = attribute_columns
        .iter()
        .zip(vocabularies)
        .map(|(&column, vocabulary)| AttributeSchema {
            name: table.columns[column].clone(),
            values: vocabulary.values,
            kind: if bins[column].is_some() {
                AttributeKind::Discretized
            } else {
                AttributeKind::Categorical
            },
        })
        .collect();
    let schema = Schema {
        attributes,
        class_attribute: table.columns[table.class_column].clone(),
        class_names: class_vocabulary.values,
    };
    Dataset::new(name, Arc::new(schema), rows, classes)
}

/// Encodes rows against an existing schema, e.g. a test file against the
/// training vocabularies. Tokens unknown to the schema are appended to the
/// vocabulary of the returned dataset and so never match a selector induced
/// from the original schema.
pub fn encode_against(table: &RawTable, schema: &Schema) -> Result<Dataset> {
    let attribute_columns: Vec<usize> = table.attribute_columns().collect();
    if attribute_columns.len() != schema.n_attributes() {
        return Err(Error::Schema(format!(
            "expected {} attributes, found {}",
            schema.n_attributes(),
            attribute_columns.len()
        )));
    }
    let mut vocabularies: Vec<Vocabulary> = schema
        .attributes
        .iter()
        .map(|a| Vocabulary::seeded(&a.values))
        .collect();
    let mut class_vocabulary = Vocabulary::seeded(&schema.class_names);
    let rows = table
        .rows
        .iter()
        .map(|cells| {
            attribute_columns
                .iter()
                .enumerate()
                .map(|(a, &column)| vocabularies[a].intern(&cells[column]))
                .collect()
        })
        .collect();
    let classes = table
        .rows
        .iter()
        .map(|cells| class_vocabulary.intern(&cells[table.class_column]))
        .collect();
    let attributes = schema
        .attributes
        .iter()
        .zip(vocabularies)
        .map(|(a, vocabulary)| AttributeSchema {
            name: a.name.clone(),
            values: vocabulary.values,
            kind: a.kind,
        })
        .collect();
    let extended = Schema {
        attributes,
        class_attribute: schema.class_attribute.clone(),
        class_names: class_vocabulary.values,
    };
    Dataset::new("dataset", Arc::new(extended), rows, classes)
}

/// Equal-width bins spanning `[min, max]` of one numeric column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualWidthBins {
    pub min: f64,
    pub max: f64,
    pub width: f64,
    /// `n_bins + 1` strictly increasing cut points.
    pub edges: Vec<f64>,
}

impl EqualWidthBins {
    pub fn new(min: f64, max: f64, n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidArgument("number of bins must be at least 1".into()));
        }
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(Error::InvalidArgument(format!("invalid range [{min}, {max}]")));
        }
        // A constant column still gets strictly increasing edges, over a unit span.
        let span = if max > min { max - min } else { 1.0 };
        let width = span / n_bins as f64;
        let mut edges: Vec<f64> = (0..n_bins).map(|i| min + i as f64 * width).collect();
        edges.push(min + span);
        Ok(EqualWidthBins {
            min,
            max,
            width,
            edges,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// `floor((v - min) / width)`, with `max` in the last bin and values
    /// outside the range clamped to the end bins.
    pub fn bin(&self, v: f64) -> usize {
        let last = self.n_bins() - 1;
        let raw = ((v - self.min) / self.width).floor();
        let mut k = if raw.is_nan() || raw < 0.0 {
            0
        } else {
            (raw as usize).min(last)
        };
        // rounding in the division can land one bin off the edges
        while k > 0 && v < self.edges[k] {
            k -= 1;
        }
        while k < last && v >= self.edges[k + 1] {
            k += 1;
        }
        k
    }

    pub fn label(&self, k: usize) -> String {
        let close = if k + 1 == self.n_bins() { ']' } else { ')' };
        format!(
            "bin{k}[{:.3},{:.3}{close}",
            self.edges[k],
            self.edges[k + 1]
        )
    }
}

/// Bin layout used to discretize a dataset; `bins[a]` is `None` for
/// attributes that were categorical in the source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizationSpec {
    pub n_bins: usize,
    pub bins: Vec<Option<EqualWidthBins>>,
}

impl DiscretizationSpec {
    pub fn bin_of(&self, attribute: usize, v: f64) -> Option<usize> {
        self.bins.get(attribute)?.as_ref().map(|b| b.bin(v))
    }
}

/// Discretizes every attribute column of a numeric table into `n_bins`
/// equal-width bins computed over all rows. The class column stays
/// categorical.
pub fn discretize(table: &RawTable, n_bins: usize) -> Result<(Dataset, DiscretizationSpec)> {
    if n_bins == 0 {
        return Err(Error::InvalidArgument("number of bins must be at least 1".into()));
    }
    let columns: Vec<usize> = table.attribute_columns().collect();
    discretize_columns(table, n_bins, &columns)
}

/// Discretizes only the attribute columns whose cells are all numeric and
/// that have more than `n_bins` distinct values; other columns are kept as
/// categorical tokens.
pub fn discretize_numeric(table: &RawTable, n_bins: usize) -> Result<(Dataset, DiscretizationSpec)> {
    if n_bins == 0 {
        return Err(Error::InvalidArgument("number of bins must be at least 1".into()));
    }
    let columns: Vec<usize> = table
        .attribute_columns()
        .filter(|&c| {
            if !table.is_numeric(c) {
                return false;
            }
            let mut distinct: Vec<&str> = table.rows.iter().map(|r| r[c].as_str()).collect();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len() > n_bins
        })
        .collect();
    discretize_columns(table, n_bins, &columns)
}

fn discretize_columns(
    table: &RawTable,
    n_bins: usize,
    columns: &[usize],
) -> Result<(Dataset, DiscretizationSpec)> {
    let mut by_column: Vec<Option<EqualWidthBins>> = vec![None; table.columns.len()];
    for &column in columns {
        let values = table.numeric_column(column)?;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        by_column[column] = Some(EqualWidthBins::new(min, max, n_bins)?);
    }
    let dataset = encode(table, &by_column, "dataset")?;
    let bins = table
        .attribute_columns()
        .map(|c| by_column[c].clone())
        .collect();
    Ok((dataset, DiscretizationSpec { n_bins, bins }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

/// Row order after the split shuffle: a Fisher-Yates pass from the last
/// index down to 1, swapping position `i` with `j = next_u64() % (i + 1)`,
/// drawing from SplitMix64 seeded with `seed`.
pub fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    order
}

/// Splits into `(train, test)`. The test part is the last
/// `round(test_fraction * n)` positions of [`shuffled_order`]; both parts keep
/// their rows in original order and share the parent schema.
pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let f = spec.test_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {f} outside (0, 1)"
        )));
    }
    let n = d.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "splitting needs at least two rows".into(),
        ));
    }
    let n_test = (f * n as f64).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::InvalidArgument(format!(
            "test fraction {f} of {n} rows leaves an empty partition"
        )));
    }
    let order = shuffled_order(n, spec.seed);
    let (train_part, test_part) = order.split_at(n - n_test);
    let mut train_idx = train_part.to_vec();
    let mut test_idx = test_part.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((d.subset(&train_idx)?, d.subset(&test_idx)?))
}

const TOY: &str = "\
A,B,C,Class
A1,B1,C1,0
A1,B1,C1,0
A2,B1,C2,1
A2,B2,C1,2
A2,B2,C2,3
";

pub const FIXTURE_NAMES: &[&str] = &["toy"];

/// Built-in datasets by name.
pub fn fixture(name: &str) -> Option<Dataset> {
    match name {
        "toy" => Some(
            load_csv(TOY.as_bytes(), true, &ClassColumn::Last)
                .expect("embedded fixture is well-formed")
                .with_name(name),
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(text: &str, header: bool) -> RawTable {
        RawTable::read(text.as_bytes(), header, &ClassColumn::Last).unwrap()
    }

    #[test]
    fn toy_shape() {
        let d = fixture("toy").unwrap();
        assert_eq!(d.n_attributes(), 3);
        assert_eq!(d.len(), 5);
        assert_eq!(d.schema().n_classes(), 4);
        let vocab: Vec<&Vec<String>> = d.schema().attributes.iter().map(|a| &a.values).collect();
        assert_eq!(vocab[0], &["A1", "A2"]);
        assert_eq!(vocab[1], &["B1", "B2"]);
        assert_eq!(vocab[2], &["C1", "C2"]);
        assert_eq!(d.schema().class_names, ["0", "1", "2", "3"]);
        assert_eq!(d.classes(), &[0, 0, 1, 2, 3]);
    }

    #[test]
    fn single_row_without_header() {
        let d = load_csv("x,y,c\n".as_bytes(), false, &ClassColumn::Last).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.n_attributes(), 2);
        assert!(d.schema().attributes.iter().all(|a| a.values.len() == 1));
    }

    #[test]
    fn vocabulary_follows_first_appearance() {
        let d = load_csv("z,q\na,q\nz,p\nm,r\n".as_bytes(), false, &ClassColumn::Last).unwrap();
        assert_eq!(d.schema().attributes[0].values, ["z", "a", "m"]);
        assert_eq!(d.schema().class_names, ["q", "p", "r"]);
    }

    #[test]
    fn cells_are_trimmed() {
        let d = load_csv(" a , b ,c\n".as_bytes(), false, &ClassColumn::Last).unwrap();
        assert_eq!(d.token(0, 0), "a");
        assert_eq!(d.token(0, 1), "b");
    }

    #[test]
    fn ragged_row_names_line() {
        let err = load_csv("a,b,c\nd,e\n".as_bytes(), false, &ClassColumn::Last).unwrap_err();
        match err {
            Error::RaggedRow { line, expected, found } => {
                assert_eq!((line, expected, found), (2, 3, 2));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(
            load_csv("".as_bytes(), false, &ClassColumn::Last),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            load_csv("a,b\n".as_bytes(), true, &ClassColumn::Last),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn empty_cell_rejected() {
        assert!(matches!(
            load_csv("a,,c\n".as_bytes(), false, &ClassColumn::Last),
            Err(Error::EmptyCell { line: 1, column: 2 })
        ));
    }

    #[test]
    fn missing_class_column() {
        for designator in [ClassColumn::Index(7), ClassColumn::Name("label".into())] {
            assert!(matches!(
                load_csv("a,b,c\n1,2,3\n".as_bytes(), true, &designator),
                Err(Error::Schema(_))
            ));
        }
        assert!(matches!(
            load_csv("a,b,c\n".as_bytes(), false, &ClassColumn::Name("c".into())),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn class_column_designators() {
        let text = "cls,u,v\np,1,2\nn,3,4\n";
        let by_name = load_csv(text.as_bytes(), true, &ClassColumn::Name("cls".into())).unwrap();
        let first = load_csv(text.as_bytes(), true, &ClassColumn::First).unwrap();
        assert_eq!(by_name.schema(), first.schema());
        assert_eq!(first.schema().class_names, ["p", "n"]);
        assert_eq!(first.schema().attributes[0].name, "u");
        assert_eq!("2".parse::<ClassColumn>().unwrap(), ClassColumn::Index(2));
        assert_eq!("last".parse::<ClassColumn>().unwrap(), ClassColumn::Last);
    }

    #[test]
    fn discretize_three_points_into_seven_bins() {
        let (d, spec) = discretize(&raw("0,a\n3.5,a\n7,b\n", false), 7).unwrap();
        let bins = spec.bins[0].as_ref().unwrap();
        assert_eq!(bins.edges, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let assigned: Vec<usize> = [0.0, 3.5, 7.0].iter().map(|&v| bins.bin(v)).collect();
        assert_eq!(assigned, [0, 3, 6]);
        assert_eq!(d.schema().attributes[0].kind, AttributeKind::Discretized);
        assert_eq!(d.schema().attributes[0].values.len(), 3);
    }

    #[test]
    fn discretize_constant_column() {
        let (d, spec) = discretize(&raw("5,a\n5,b\n5,a\n", false), 7).unwrap();
        assert!((0..3).all(|r| d.row(r)[0] == 0));
        let bins = spec.bins[0].as_ref().unwrap();
        assert_eq!(bins.bin(5.0), 0);
        assert!(bins.edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn discretize_errors() {
        assert!(matches!(
            discretize(&raw("1,a\nx,b\n", false), 7),
            Err(Error::NotNumeric { line: 2, column: 1, .. })
        ));
        assert!(matches!(
            discretize(&raw("1,a\n2,b\n", false), 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn discretize_numeric_keeps_small_domains_categorical() {
        let text = "1,x,1.0,a\n2,y,2.5,b\n3,x,9.0,a\n";
        let (d, spec) = discretize_numeric(&raw(text, false), 2).unwrap();
        assert!(spec.bins[0].is_some());
        assert!(spec.bins[1].is_none());
        assert!(spec.bins[2].is_some());
        assert_eq!(d.schema().attributes[1].kind, AttributeKind::Categorical);
    }

    #[test]
    fn split_sizes_and_errors() {
        let text: String = (0..150).map(|i| format!("v{},c{}\n", i % 7, i % 3)).collect();
        let d = load_csv(text.as_bytes(), false, &ClassColumn::Last).unwrap();
        let (train, test) = split(&d, &SplitSpec { test_fraction: 0.2, seed: 11 }).unwrap();
        assert_eq!((train.len(), test.len()), (120, 30));
        assert!(Arc::ptr_eq(train.shared_schema(), d.shared_schema()));
        for f in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(split(&d, &SplitSpec { test_fraction: f, seed: 1 }).is_err());
        }
        let one = fixture("toy").unwrap().subset(&[0]).unwrap();
        assert!(split(&one, &SplitSpec { test_fraction: 0.5, seed: 1 }).is_err());
    }

    #[test]
    fn encode_against_extends_vocabulary() {
        let train = fixture("toy").unwrap();
        let table = raw("A,B,C,Class\nA3,B1,C1,0\nA1,B2,C2,9\n", true);
        let test = encode_against(&table, train.schema()).unwrap();
        assert_eq!(test.schema().attributes[0].values, ["A1", "A2", "A3"]);
        assert_eq!(test.row(0)[0], 2);
        assert_eq!(test.row(1), &[0, 1, 1]);
        assert_eq!(test.schema().class_names.last().unwrap(), "9");
    }
}
