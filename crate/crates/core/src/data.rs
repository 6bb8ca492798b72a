//! Tabular datasets with a protected-group predicate and a favorable-outcome
//! predicate, plus the seeded 75/25 train/validation split.
//!
//! Categorical columns are encoded ordinally in order of first appearance. The
//! code table is kept on the [`Dataset`] so encoded values can be decoded back.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of rows assigned to the training split.
pub const TRAIN_FRACTION: f64 = 0.75;

const MAX_SPLIT_ATTEMPTS: usize = 100;

/// Cell values treated as missing. Rows containing one in a used column are dropped.
const MISSING_MARKERS: &[&str] = &["", "?", "NA", "NaN"];

/// Dense row-major matrix of feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    n_cols: usize,
}

impl FeatureMatrix {
    pub fn new(values: Vec<f64>, n_cols: usize) -> Result<Self> {
        if n_cols == 0 {
            if !values.is_empty() {
                return Err(Error::Shape {
                    expected: 0,
                    actual: values.len(),
                });
            }
        } else if !values.len().is_multiple_of(n_cols) {
            return Err(Error::LengthMismatch(format!(
                "{} values do not fill rows of width {n_cols}",
                values.len()
            )));
        }
        Ok(Self { values, n_cols })
    }

    pub fn from_rows(rows: &[Vec<f64>], n_cols: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::Shape {
                    expected: n_cols,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self { values, n_cols })
    }

    pub fn empty(n_cols: usize) -> Self {
        Self {
            values: Vec::new(),
            n_cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.values.len().checked_div(self.n_cols).unwrap_or(0)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols.max(1))
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.rows().map(|r| r[col]).collect()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            values,
            n_cols: self.n_cols,
        }
    }
}

/// Labeled tabular data.
///
/// `labels` are binary; a row has a favorable outcome when its label equals
/// `favorable_label`. `protected[i]` is the group index of row `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub features: FeatureMatrix,
    pub labels: Vec<u8>,
    pub protected: Vec<usize>,
    pub feature_names: Vec<String>,
    pub group_names: Vec<String>,
    pub favorable_label: u8,
    /// Per-feature category table; `None` for numeric columns.
    pub categories: Vec<Option<Vec<String>>>,
}

impl Dataset {
    /// Builds a dataset from parts, checking every invariant.
    pub fn new(
        name: impl Into<String>,
        features: FeatureMatrix,
        labels: Vec<u8>,
        protected: Vec<usize>,
        group_names: Vec<String>,
        favorable_label: u8,
    ) -> Result<Self> {
        let n_cols = features.n_cols();
        let feature_names = (0..n_cols).map(|j| format!("x{j}")).collect();
        let ds = Self {
            name: name.into(),
            features,
            labels,
            protected,
            feature_names,
            group_names,
            favorable_label,
            categories: vec![None; n_cols],
        };
        ds.check()?;
        Ok(ds)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                actual: names.len(),
            });
        }
        self.feature_names = names;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        let n = self.features.n_rows();
        if self.labels.len() != n || self.protected.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{n} feature rows, {} labels, {} protected entries",
                self.labels.len(),
                self.protected.len()
            )));
        }
        if self.group_names.len() < 2 {
            return Err(Error::Schema(format!(
                "at least two protected groups are required, got {}",
                self.group_names.len()
            )));
        }
        if let Some(&bad) = self.protected.iter().find(|&&g| g >= self.group_names.len()) {
            return Err(Error::Schema(format!(
                "protected index {bad} out of range for {} groups",
                self.group_names.len()
            )));
        }
        if self.labels.iter().any(|&y| y > 1) || self.favorable_label > 1 {
            return Err(Error::Label("labels must be 0 or 1".into()));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn n_groups(&self) -> usize {
        self.group_names.len()
    }

    /// Returns the original string of an encoded categorical value.
    pub fn decode(&self, feature: usize, code: f64) -> Option<&str> {
        let table = self.categories.get(feature)?.as_ref()?;
        if code < 0.0 || code.fract() != 0.0 {
            return None;
        }
        table.get(code as usize).map(String::as_str)
    }

    /// Rows restricted to `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            protected: indices.iter().map(|&i| self.protected[i]).collect(),
            feature_names: self.feature_names.clone(),
            group_names: self.group_names.clone(),
            favorable_label: self.favorable_label,
            categories: self.categories.clone(),
        }
    }
}

/// Row indices of each protected group; list `g` holds the rows with `protected == g`.
pub fn group_indices(d: &Dataset) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); d.n_groups()];
    for (i, &g) in d.protected.iter().enumerate() {
        groups[g].push(i);
    }
    groups
}

/// Train/validation partition of a dataset.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub train: Dataset,
    pub validation: Dataset,
    pub seed: u64,
    pub train_rows: Vec<usize>,
    pub validation_rows: Vec<usize>,
}

/// Shuffles rows with `seed` and assigns the first `round(0.75 n)` to training.
///
/// Shuffles are re-drawn (up to 100 times) until every group present in the
/// input appears on both sides.
pub fn split_dataset(d: &Dataset, seed: u64) -> Result<DataSplit> {
    let n = d.n_rows();
    if n < 4 {
        return Err(Error::Size(format!("need at least 4 rows to split, got {n}")));
    }
    let n_train = (TRAIN_FRACTION * n as f64).round() as usize;
    let mut present = vec![false; d.n_groups()];
    for &g in &d.protected {
        present[g] = true;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for attempt in 0..MAX_SPLIT_ATTEMPTS {
        order.shuffle(&mut rng);
        let (train, validation) = order.split_at(n_train);
        if covers(d, train, &present) && covers(d, validation, &present) {
            if attempt > 0 {
                log::debug!("split seed {seed}: group coverage after {} shuffles", attempt + 1);
            }
            return Ok(DataSplit {
                train: d.subset(train),
                validation: d.subset(validation),
                seed,
                train_rows: train.to_vec(),
                validation_rows: validation.to_vec(),
            });
        }
    }
    Err(Error::Stratification(format!(
        "no shuffle in {MAX_SPLIT_ATTEMPTS} attempts placed every protected group in both splits"
    )))
}

fn covers(d: &Dataset, rows: &[usize], present: &[bool]) -> bool {
    let mut seen = vec![false; present.len()];
    for &i in rows {
        seen[d.protected[i]] = true;
    }
    seen.iter().zip(present).all(|(&s, &p)| s || !p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// Declarative description of a CSV dataset.
///
/// Stored as TOML:
///
/// ```toml
/// version = 1
/// name = "census"
/// csv = "adult.csv"          # relative to the schema file
/// label = "income"
/// favorable = ">50K"
/// protected = "sex"
/// groups = ["Male", "Female"] # optional; default is first-appearance order
/// other_group = "Other"       # optional; collects values not named in `groups`
///
/// [columns]
/// age = "numeric"
/// workclass = "categorical"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    pub label: String,
    pub favorable: String,
    pub protected: String,
    #[serde(default)]
    pub groups: Option<Vec<String>>,
    #[serde(default)]
    pub other_group: Option<String>,
    pub columns: HashMap<String, ColumnKind>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl DatasetSchema {
    pub fn from_toml(text: &str) -> Result<Self> {
        let schema: Self = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if schema.version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                schema.version
            )));
        }
        Ok(schema)
    }

    /// Reads a schema file; a relative `csv` path is resolved against the schema's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut schema = Self::from_toml(&text)?;
        if let Some(csv) = &schema.csv {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    schema.csv = Some(dir.join(csv));
                }
            }
        }
        if schema.name.is_none() {
            schema.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(schema)
    }
}

/// Loads the dataset a schema file points at.
pub fn load_from_schema(schema_path: impl AsRef<Path>) -> Result<Dataset> {
    let schema = DatasetSchema::from_file(schema_path.as_ref())?;
    let csv = schema.csv.clone().ok_or_else(|| {
        Error::Schema(format!(
            "{} does not name a csv file",
            schema_path.as_ref().display()
        ))
    })?;
    load_dataset(csv, &schema)
}

pub fn load_dataset(csv_path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset> {
    let path = csv_path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = schema.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    read_csv(file, schema, name)
}

/// Parses CSV text from any reader according to `schema`.
pub fn read_csv(reader: impl std::io::Read, schema: &DatasetSchema, name: String) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::format("csv header", e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let position = |col: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| Error::Schema(format!("column {col:?} not found in csv header")))
    };

    let label_col = position(&schema.label)?;
    let protected_col = position(&schema.protected)?;
    for col in schema.columns.keys() {
        position(col)?;
    }
    if schema.columns.contains_key(&schema.label) {
        return Err(Error::Schema(format!(
            "label column {:?} cannot also be a feature",
            schema.label
        )));
    }
    // features follow csv header order
    let feature_cols: Vec<(usize, ColumnKind)> = header
        .iter()
        .enumerate()
        .filter_map(|(j, h)| schema.columns.get(h).map(|&k| (j, k)))
        .collect();

    let mut codes: Vec<HashMap<String, usize>> = vec![HashMap::new(); feature_cols.len()];
    let mut tables: Vec<Vec<String>> = vec![Vec::new(); feature_cols.len()];
    let mut group_names: Vec<String> = schema.groups.clone().unwrap_or_default();
    let mut n_declared = group_names.len();
    if schema.other_group.is_some() && schema.groups.is_none() {
        return Err(Error::Schema("other_group requires an explicit groups list".into()));
    }
    let other_index = schema.other_group.as_ref().map(|other| {
        group_names.push(other.clone());
        group_names.len() - 1
    });
    let fixed_groups = schema.groups.is_some();

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut protected = Vec::new();
    let mut dropped = 0usize;

    for (r, record) in rdr.records().enumerate() {
        let row_number = r + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Parse {
            row: row_number,
            column: String::new(),
            message: e.to_string(),
        })?;
        let cell = |j: usize| record.get(j).unwrap_or("");
        let used = feature_cols
            .iter()
            .map(|&(j, _)| j)
            .chain([label_col, protected_col]);
        if used.clone().any(|j| MISSING_MARKERS.contains(&cell(j))) {
            dropped += 1;
            continue;
        }

        for (f, &(j, kind)) in feature_cols.iter().enumerate() {
            let text = cell(j);
            let v = match kind {
                ColumnKind::Numeric => text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(
                    || Error::Parse {
                        row: row_number,
                        column: header[j].clone(),
                        message: format!("{text:?} is not a number"),
                    },
                )?,
                ColumnKind::Categorical => {
                    let next = codes[f].len();
                    let code = *codes[f].entry(text.to_owned()).or_insert_with(|| {
                        tables[f].push(text.to_owned());
                        next
                    });
                    code as f64
                }
            };
            values.push(v);
        }

        let group_value = cell(protected_col);
        let declared = group_names[..n_declared].iter().position(|g| g == group_value);
        let g = match (declared, other_index) {
            (Some(g), _) => g,
            (None, Some(other)) => other,
            (None, None) if fixed_groups => {
                return Err(Error::Schema(format!(
                    "protected value {group_value:?} at row {row_number} is not a declared group"
                )))
            }
            (None, None) => {
                group_names.push(group_value.to_owned());
                n_declared += 1;
                n_declared - 1
            }
        };
        protected.push(g);
        raw_labels.push(cell(label_col).to_owned());
    }
    if dropped > 0 {
        log::warn!("{name}: dropped {dropped} rows with missing values");
    }

    let (labels, favorable_label) = encode_labels(&raw_labels, &schema.favorable)?;
    let n_cols = feature_cols.len();
    let features = FeatureMatrix::new(values, n_cols)?;
    let categories = feature_cols
        .iter()
        .zip(tables)
        .map(|(&(_, kind), table)| (kind == ColumnKind::Categorical).then_some(table))
        .collect();
    let ds = Dataset {
        name,
        features,
        labels,
        protected,
        feature_names: feature_cols.iter().map(|&(j, _)| header[j].clone()).collect(),
        group_names,
        favorable_label,
        categories,
    };
    ds.check()?;
    Ok(ds)
}

/// Maps raw label strings to {0,1}.
///
/// Columns already holding `0`/`1` keep their values and the favorable label is
/// parsed from the schema; otherwise the favorable string becomes label 1.
fn encode_labels(raw: &[String], favorable: &str) -> Result<(Vec<u8>, u8)> {
    let mut distinct: Vec<&str> = Vec::new();
    for v in raw {
        if !distinct.contains(&v.as_str()) {
            distinct.push(v);
            if distinct.len() > 2 {
                return Err(Error::Label(format!(
                    "label column is not binary; saw {:?}",
                    distinct
                )));
            }
        }
    }
    let numeric = distinct.iter().all(|v| *v == "0" || *v == "1");
    if numeric && (favorable == "0" || favorable == "1") {
        let labels = raw.iter().map(|v| u8::from(v == "1")).collect();
        return Ok((labels, u8::from(favorable == "1")));
    }
    if distinct.len() == 2 && !distinct.contains(&favorable) {
        return Err(Error::Label(format!(
            "favorable value {favorable:?} is not one of the label values {distinct:?}"
        )));
    }
    Ok((raw.iter().map(|v| u8::from(v == favorable)).collect(), 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema(text: &str) -> DatasetSchema {
        DatasetSchema::from_toml(text).unwrap()
    }

    const SCHEMA: &str = r#"
        version = 1
        label = "y"
        favorable = "1"
        protected = "sex"
        [columns]
        color = "categorical"
        x = "numeric"
    "#;

    fn load(csv: &str, s: &DatasetSchema) -> Result<Dataset> {
        read_csv(csv.as_bytes(), s, "t".into())
    }

    #[test]
    fn four_row_csv() {
        let csv = "x,color,sex,y\n1,red,M,0\n2,blue,F,1\n3,red,M,1\n4,green,F,0\n";
        let d = load(csv, &schema(SCHEMA)).unwrap();
        assert_eq!(d.n_rows(), 4);
        assert_eq!(d.n_groups(), 2);
        assert_eq!(d.feature_names, vec!["x", "color"]);
        assert_eq!(d.features.column(1), vec![0.0, 1.0, 0.0, 2.0]);
        assert_eq!(d.protected, vec![0, 1, 0, 1]);
        assert_eq!(d.labels, vec![0, 1, 1, 0]);
        assert_eq!(d.decode(1, 1.0), Some("blue"));
    }

    #[test]
    fn missing_schema_column() {
        let s = schema(&SCHEMA.replace("x = \"numeric\"", "age = \"numeric\""));
        let csv = "x,color,sex,y\n1,red,M,0\n";
        assert!(matches!(load(csv, &s), Err(Error::Schema(m)) if m.contains("age")));
    }

    #[test]
    fn non_binary_label() {
        let csv = "x,color,sex,y\n1,red,M,0\n2,red,F,1\n3,red,M,2\n";
        assert!(matches!(load(csv, &schema(SCHEMA)), Err(Error::Label(_))));
    }

    #[test]
    fn bad_number_names_row_and_column() {
        let csv = "x,color,sex,y\n1,red,M,0\nabc,red,F,1\n";
        match load(csv, &schema(SCHEMA)) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn string_labels_and_missing_rows() {
        let s = schema(
            r#"
            version = 1
            label = "income"
            favorable = ">50K"
            protected = "race"
            groups = ["White"]
            other_group = "Non-White"
            [columns]
            age = "numeric"
            race = "categorical"
        "#,
        );
        let csv = "age,race,income\n30,White,>50K\n?,Black,<=50K\n41,Asian,<=50K\n52,White,<=50K\n";
        let d = load(csv, &s).unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.labels, vec![1, 0, 0]);
        assert_eq!(d.favorable_label, 1);
        assert_eq!(d.group_names, vec!["White", "Non-White"]);
        assert_eq!(d.protected, vec![0, 1, 0]);
    }

    fn toy(n: usize) -> Dataset {
        let features = FeatureMatrix::new((0..n).map(|i| i as f64).collect(), 1).unwrap();
        let labels = (0..n).map(|i| (i % 2) as u8).collect();
        let protected = (0..n).map(|i| (i / 2) % 2).collect();
        Dataset::new("toy", features, labels, protected, vec!["a".into(), "b".into()], 1).unwrap()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let d = toy(100);
        let s = split_dataset(&d, 7).unwrap();
        assert_eq!(s.train.n_rows(), 75);
        assert_eq!(s.validation.n_rows(), 25);

        let d8 = toy(8);
        let a = split_dataset(&d8, 7).unwrap();
        let b = split_dataset(&d8, 7).unwrap();
        assert_eq!(a.train_rows, b.train_rows);
        assert_eq!(a.train, b.train);
    }

    #[test]
    fn split_too_small() {
        assert!(matches!(split_dataset(&toy(3), 1), Err(Error::Size(_))));
    }

    #[test]
    fn split_single_row_group_fails() {
        let mut d = toy(8);
        d.protected = vec![0, 0, 0, 0, 0, 0, 0, 1];
        assert!(matches!(split_dataset(&d, 1), Err(Error::Stratification(_))));
    }

    #[test]
    fn group_index_lists() {
        let mut d = toy(3);
        d.protected = vec![0, 1, 0];
        assert_eq!(group_indices(&d), vec![vec![0, 2], vec![1]]);
        d.protected = vec![0, 0, 0];
        assert_eq!(group_indices(&d), vec![vec![0, 1, 2], vec![]]);
        d.protected = vec![2, 0, 1];
        d.group_names.push("c".into());
        assert_eq!(group_indices(&d), vec![vec![1], vec![2], vec![0]]);
    }
}
