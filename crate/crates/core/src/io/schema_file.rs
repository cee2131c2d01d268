//! Line-oriented schema sidecar for CSV data.
//!
//! ```text
//! # comment
//! missing_token ?
//! attribute outlook nominal sunny,overcast,rain
//! attribute temperature continuous
//! class play yes,no
//! ```
//!
//! Columns appear in the data file in the order of the `attribute` and
//! `class` lines. `missing_token` defaults to `?`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::data::{Attribute, AttributeKind, Schema};
use crate::error::{Error, Result};

pub const DEFAULT_MISSING_TOKEN: &str = "?";

/// A schema together with the layout of the data file it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaFile {
    pub schema: Arc<Schema>,
    /// Zero-based column of the class value in each data row.
    pub class_column: usize,
    pub missing_token: String,
}

impl SchemaFile {
    /// Layout with the class in the last column and the default missing token.
    pub fn trailing_class(schema: impl Into<Arc<Schema>>) -> Self {
        let schema = schema.into();
        SchemaFile {
            class_column: schema.len(),
            schema,
            missing_token: DEFAULT_MISSING_TOKEN.to_string(),
        }
    }

    /// Number of columns in a data row.
    pub fn columns(&self) -> usize {
        self.schema.len() + 1
    }

    /// Column names in data-file order.
    pub fn column_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.schema.attributes().iter().map(|a| a.name.as_str()).collect();
        names.insert(self.class_column, self.schema.class_name());
        names
    }

    /// Parses schema text; `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line as u64,
            message,
        };
        let mut attributes = Vec::new();
        let mut class: Option<(String, Vec<String>, usize)> = None;
        let mut missing_token: Option<String> = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let directive = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            match directive {
                "attribute" => {
                    let (name, kind) =
                        match rest.as_slice() {
                            [name, "continuous"] => (*name, AttributeKind::Continuous),
                            [name, "nominal", values @ ..] if !values.is_empty() => {
                                (*name, AttributeKind::Nominal(split_values(&values.join(" "))))
                            }
                            _ => return Err(err(
                                line_no,
                                "expected `attribute <name> continuous` or `attribute <name> nominal <v1>,<v2>,...`"
                                    .into(),
                            )),
                        };
                    attributes.push(Attribute {
                        name: name.to_string(),
                        kind,
                    });
                }
                "class" => {
                    if class.is_some() {
                        return Err(err(line_no, "duplicate `class` line".into()));
                    }
                    match rest.as_slice() {
                        [name, values @ ..] if !values.is_empty() => {
                            class = Some((name.to_string(), split_values(&values.join(" ")), attributes.len()));
                        }
                        _ => return Err(err(line_no, "expected `class <name> <v1>,<v2>,...`".into())),
                    }
                }
                "missing_token" => {
                    if missing_token.is_some() {
                        return Err(err(line_no, "duplicate `missing_token` line".into()));
                    }
                    match rest.as_slice() {
                        [token] => missing_token = Some(token.to_string()),
                        _ => return Err(err(line_no, "expected `missing_token <token>`".into())),
                    }
                }
                other => return Err(err(line_no, format!("unknown directive `{other}`"))),
            }
        }

        let (class_name, labels, class_column) =
            class.ok_or_else(|| err(text.lines().count().max(1), "no `class` line".into()))?;
        let schema = Schema::new(attributes, class_name, labels).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
        Ok(SchemaFile {
            schema: Arc::new(schema),
            class_column,
            missing_token: missing_token.unwrap_or_else(|| DEFAULT_MISSING_TOKEN.to_string()),
        })
    }

    /// Renders the schema in the sidecar format; `parse` inverts it.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.missing_token != DEFAULT_MISSING_TOKEN {
            let _ = writeln!(out, "missing_token {}", self.missing_token);
        }
        let class_line = format!("class {} {}", self.schema.class_name(), self.schema.labels().join(","));
        for (j, attr) in self.schema.attributes().iter().enumerate() {
            if j == self.class_column {
                let _ = writeln!(out, "{class_line}");
            }
            match &attr.kind {
                AttributeKind::Continuous => {
                    let _ = writeln!(out, "attribute {} continuous", attr.name);
                }
                AttributeKind::Nominal(domain) => {
                    let _ = writeln!(out, "attribute {} nominal {}", attr.name, domain.join(","));
                }
            }
        }
        if self.class_column == self.schema.len() {
            let _ = writeln!(out, "{class_line}");
        }
        out
    }
}

fn split_values(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .collect()
}

/// Reads and parses a schema sidecar file.
pub fn load_schema(path: impl AsRef<Path>) -> Result<SchemaFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SchemaFile::parse(&text, path)
}
