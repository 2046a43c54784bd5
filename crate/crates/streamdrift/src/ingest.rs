//! Loading benchmark datasets from CSV and ARFF into replayable streams.
//!
//! Row order is the stream order. Nominal attributes are one-hot encoded and
//! class labels get dense indices in order of first appearance.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use streamdrift_core::{Instance, LabeledInstance, StreamSource};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Csv,
    Arff,
}

impl DatasetFormat {
    /// Guess from the file extension; anything but `.arff` is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => DatasetFormat::Arff,
            _ => DatasetFormat::Csv,
        }
    }
}

/// Which column holds the class. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

/// What to do when the attribute count differs from the expected one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountPolicy {
    #[default]
    Fail,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: DatasetFormat,
    /// Defaults to the last column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<LabelColumn>,
    /// CSV only: first row is a header.
    #[serde(default)]
    pub header: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    /// Attributes excluding the label, counted before one-hot expansion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attributes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(default)]
    pub attribute_policy: CountPolicy,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        DatasetSpec {
            format: DatasetFormat::from_path(&path),
            path,
            label: None,
            header: false,
            instances: None,
            attributes: None,
            classes: None,
            attribute_policy: CountPolicy::Fail,
        }
    }

    /// Electricity: 45,312 rows, binary. The usual distribution carries 8
    /// attributes rather than 6, so an attribute mismatch only warns.
    pub fn electricity(path: impl Into<PathBuf>) -> Self {
        DatasetSpec {
            header: true,
            instances: Some(45_312),
            attributes: Some(6),
            classes: Some(2),
            attribute_policy: CountPolicy::Warn,
            ..DatasetSpec::new(path)
        }
    }

    pub fn covertype(path: impl Into<PathBuf>) -> Self {
        DatasetSpec {
            header: true,
            instances: Some(581_012),
            attributes: Some(54),
            classes: Some(7),
            ..DatasetSpec::new(path)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    /// Number of encoded features.
    pub fn width(&self) -> usize {
        match &self.kind {
            AttributeKind::Numeric => 1,
            AttributeKind::Nominal(values) => values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub class_names: Vec<String>,
    pub warnings: Vec<String>,
    examples: Vec<LabeledInstance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Encoded feature dimension.
    pub fn dim(&self) -> usize {
        self.attributes.iter().map(Attribute::width).sum()
    }

    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn examples(&self) -> &[LabeledInstance] {
        &self.examples
    }
}

/// Replays a loaded dataset from the first row.
#[derive(Debug, Clone)]
pub struct DatasetStream {
    data: Arc<Dataset>,
    pos: usize,
    limit: usize,
}

impl DatasetStream {
    pub fn new(data: Arc<Dataset>) -> Self {
        let limit = data.len();
        DatasetStream { data, pos: 0, limit }
    }

    /// Stop after the first `n` rows.
    pub fn with_limit(mut self, n: usize) -> Self {
        self.limit = n.min(self.data.len());
        self
    }
}

impl StreamSource for DatasetStream {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn classes(&self) -> usize {
        self.data.classes()
    }

    fn next_instance(&mut self) -> Option<LabeledInstance> {
        if self.pos >= self.limit {
            return None;
        }
        self.pos += 1;
        Some(self.data.examples[self.pos - 1].clone())
    }

    fn describe(&self) -> String {
        format!("dataset={} rows={}", self.data.name, self.limit)
    }
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    let text = fs::read_to_string(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    let raw = match spec.format {
        DatasetFormat::Arff => parse_arff(&spec.path, &text)?,
        DatasetFormat::Csv => parse_csv(&spec.path, &text, spec.header)?,
    };
    let dataset = encode(&spec.path, raw, spec.label.as_ref())?;
    validate(spec, dataset)
}

/// Columns and rows before encoding. `kinds` is `None` for CSV, where
/// column types are inferred from the values.
struct Raw {
    relation: String,
    names: Vec<String>,
    kinds: Option<Vec<AttributeKind>>,
    rows: Vec<(u64, Vec<String>)>,
}

fn parse_csv(path: &Path, text: &str, header: bool) -> Result<Raw> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut names: Vec<String> = if header {
        reader.headers().map_err(csv_err)?.iter().map(String::from).collect()
    } else {
        Vec::new()
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::malformed(
                path,
                pos.as_ref().map_or(0, |p| p.line()),
                format!("expected {expected_len} fields, found {len}"),
            ),
            _ => csv_err(e),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record.iter().map(String::from).collect::<Vec<_>>()));
    }
    if names.is_empty() {
        let width = rows.first().map_or(0, |(_, r)| r.len());
        names = (0..width).map(|i| format!("c{i}")).collect();
    }
    let relation = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("csv")
        .to_string();
    Ok(Raw {
        relation,
        names,
        kinds: None,
        rows,
    })
}

fn parse_arff(path: &Path, text: &str) -> Result<Raw> {
    let mut relation = String::from("arff");
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx as u64 + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(Error::malformed(path, lineno, "sparse ARFF rows are not supported"));
            }
            let fields = split_fields(line);
            if fields.len() != names.len() {
                return Err(Error::malformed(
                    path,
                    lineno,
                    format!("expected {} fields, found {}", names.len(), fields.len()),
                ));
            }
            rows.push((lineno, fields));
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => relation = unquote(rest.trim()).to_string(),
            "@attribute" => {
                let (name, ty) = split_name(rest.trim())
                    .ok_or_else(|| Error::malformed(path, lineno, "attribute declaration needs a name and a type"))?;
                kinds.push(parse_type(ty).map_err(|r| Error::malformed(path, lineno, r))?);
                names.push(name);
            }
            "@data" => in_data = true,
            _ => return Err(Error::malformed(path, lineno, format!("unexpected header line `{line}`"))),
        }
    }
    if !in_data {
        return Err(Error::malformed(path, text.lines().count() as u64, "missing @data section"));
    }
    Ok(Raw {
        relation,
        names,
        kinds: Some(kinds),
        rows,
    })
}

fn unquote(s: &str) -> &str {
    let b = s.as_bytes();
    if b.len() >= 2 && (b[0] == b'\'' || b[0] == b'"') && b[b.len() - 1] == b[0] {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Splits `name type`, where the name may be quoted.
fn split_name(s: &str) -> Option<(String, &str)> {
    let first = s.chars().next()?;
    if first == '\'' || first == '"' {
        let end = s[1..].find(first)? + 1;
        Some((s[1..end].to_string(), s[end + 1..].trim()))
    } else {
        let (name, ty) = s.split_once(char::is_whitespace)?;
        Some((name.to_string(), ty.trim()))
    }
}

fn parse_type(ty: &str) -> std::result::Result<AttributeKind, String> {
    if let Some(inner) = ty.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| format!("unterminated nominal list `{ty}`"))?;
        let values = split_fields(inner);
        if values.is_empty() {
            return Err("empty nominal list".into());
        }
        return Ok(AttributeKind::Nominal(values));
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(AttributeKind::Numeric),
        other => Err(format!("unsupported attribute type `{other}`")),
    }
}

/// Comma split honouring single and double quotes.
fn split_fields(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    for c in line.chars() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => cur.push(c),
            None if c == '\'' || c == '"' => quote = Some(c),
            None if c == ',' => out.push(std::mem::take(&mut cur).trim().to_string()),
            None => cur.push(c),
        }
    }
    let last = cur.trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last.to_string());
    }
    out
}

fn is_missing(v: &str) -> bool {
    v.is_empty() || v == "?"
}

fn resolve_label(path: &Path, names: &[String], label: Option<&LabelColumn>) -> Result<usize> {
    let width = names.len();
    if width < 2 {
        return Err(Error::malformed(path, 1, "need at least one attribute and a label column"));
    }
    match label {
        None => Ok(width - 1),
        Some(LabelColumn::Index(i)) if *i < width => Ok(*i),
        Some(LabelColumn::Index(i)) => Err(Error::invalid(
            "label",
            format!("column {i} out of range for {width} columns"),
        )),
        Some(LabelColumn::Name(n)) => names
            .iter()
            .position(|c| c == n)
            .ok_or_else(|| Error::invalid("label", format!("no column named `{n}`"))),
    }
}

fn infer_kinds(path: &Path, raw: &Raw, label: usize) -> Result<Vec<AttributeKind>> {
    let mut kinds = Vec::with_capacity(raw.names.len());
    for col in 0..raw.names.len() {
        if col == label {
            kinds.push(AttributeKind::Nominal(Vec::new()));
            continue;
        }
        let mut numeric = true;
        for (line, row) in &raw.rows {
            let v = row[col].as_str();
            if is_missing(v) {
                return Err(Error::malformed(
                    path,
                    *line,
                    format!("missing value in column `{}`", raw.names[col]),
                ));
            }
            numeric &= v.parse::<f64>().is_ok();
        }
        kinds.push(if numeric {
            AttributeKind::Numeric
        } else {
            let mut values: Vec<String> = Vec::new();
            for (_, row) in &raw.rows {
                if !values.contains(&row[col]) {
                    values.push(row[col].clone());
                }
            }
            AttributeKind::Nominal(values)
        });
    }
    Ok(kinds)
}

fn encode(path: &Path, raw: Raw, label: Option<&LabelColumn>) -> Result<Dataset> {
    let label_col = resolve_label(path, &raw.names, label)?;
    let kinds = match &raw.kinds {
        Some(k) => k.clone(),
        None => infer_kinds(path, &raw, label_col)?,
    };
    let declared_classes = match &kinds[label_col] {
        AttributeKind::Nominal(values) if !values.is_empty() => Some(values.clone()),
        _ => None,
    };
    let attributes: Vec<Attribute> = raw
        .names
        .iter()
        .zip(kinds)
        .enumerate()
        .filter(|(i, _)| *i != label_col)
        .map(|(_, (name, kind))| Attribute {
            name: name.clone(),
            kind,
        })
        .collect();
    let lookup: Vec<Option<HashMap<&str, usize>>> = attributes
        .iter()
        .map(|a| match &a.kind {
            AttributeKind::Numeric => None,
            AttributeKind::Nominal(values) => {
                Some(values.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect())
            }
        })
        .collect();
    let dim: usize = attributes.iter().map(Attribute::width).sum();

    let mut class_names: Vec<String> = Vec::new();
    let mut examples = Vec::with_capacity(raw.rows.len());
    for (line, row) in &raw.rows {
        let mut features = Vec::with_capacity(dim);
        let columns = row.iter().enumerate().filter(|(i, _)| *i != label_col);
        for ((_, value), (attr, table)) in columns.zip(attributes.iter().zip(&lookup)) {
            if is_missing(value) {
                return Err(Error::malformed(path, *line, format!("missing value for `{}`", attr.name)));
            }
            match table {
                None => {
                    let v: f64 = value.parse().map_err(|_| {
                        Error::malformed(path, *line, format!("`{value}` is not numeric for `{}`", attr.name))
                    })?;
                    if !v.is_finite() {
                        return Err(Error::malformed(path, *line, format!("non-finite value for `{}`", attr.name)));
                    }
                    features.push(v);
                }
                Some(table) => {
                    let hot = *table.get(value.as_str()).ok_or_else(|| {
                        Error::malformed(path, *line, format!("undeclared value `{value}` for `{}`", attr.name))
                    })?;
                    let start = features.len();
                    features.resize(start + table.len(), 0.0);
                    features[start + hot] = 1.0;
                }
            }
        }
        let class = &row[label_col];
        if is_missing(class) {
            return Err(Error::malformed(path, *line, "missing class label"));
        }
        if declared_classes.as_ref().is_some_and(|d| !d.contains(class)) {
            return Err(Error::malformed(path, *line, format!("undeclared class `{class}`")));
        }
        let y = match class_names.iter().position(|c| c == class) {
            Some(y) => y,
            None => {
                class_names.push(class.clone());
                class_names.len() - 1
            }
        };
        let instance = Instance::new(features).map_err(|e| Error::malformed(path, *line, e.to_string()))?;
        examples.push(LabeledInstance::new(instance, y));
    }
    Ok(Dataset {
        name: raw.relation,
        attributes,
        class_names,
        warnings: Vec::new(),
        examples,
    })
}

fn validate(spec: &DatasetSpec, mut data: Dataset) -> Result<Dataset> {
    let mismatch = |what, expected, found| Error::Mismatch {
        path: spec.path.clone(),
        what,
        expected,
        found,
    };
    if let Some(n) = spec.instances {
        if n != data.len() {
            return Err(mismatch("instance count", n, data.len()));
        }
    }
    if let Some(n) = spec.attributes {
        let found = data.attributes.len();
        if n != found {
            match spec.attribute_policy {
                CountPolicy::Fail => return Err(mismatch("attribute count", n, found)),
                CountPolicy::Warn => data.warnings.push(format!(
                    "{}: expected {n} attributes, file has {found}; continuing with the file's attributes",
                    spec.path.display()
                )),
            }
        }
    }
    if let Some(n) = spec.classes {
        if n != data.classes() {
            return Err(mismatch("class count", n, data.classes()));
        }
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_quoted_fields() {
        assert_eq!(split_fields("1, 'a,b' ,\"c\""), vec!["1", "a,b", "c"]);
        assert_eq!(split_fields(""), Vec::<String>::new());
    }

    #[test]
    fn parses_types() {
        assert_eq!(parse_type("REAL"), Ok(AttributeKind::Numeric));
        assert_eq!(
            parse_type("{UP, DOWN}"),
            Ok(AttributeKind::Nominal(vec!["UP".into(), "DOWN".into()]))
        );
        assert!(parse_type("string").is_err());
        assert!(parse_type("{a,b").is_err());
    }

    #[test]
    fn split_name_handles_quotes() {
        assert_eq!(split_name("'my attr' numeric"), Some(("my attr".into(), "numeric")));
        assert_eq!(split_name("x {a,b}"), Some(("x".into(), "{a,b}")));
        assert_eq!(split_name("lonely"), None);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(DatasetFormat::from_path(Path::new("a/elec.ARFF")), DatasetFormat::Arff);
        assert_eq!(DatasetFormat::from_path(Path::new("a/elec.csv")), DatasetFormat::Csv);
    }
}
