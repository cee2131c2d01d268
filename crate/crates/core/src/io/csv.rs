//! Comma-separated data files described by a schema sidecar.

use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, Trim};

use super::schema_file::{load_schema, SchemaFile};
use crate::data::{AttributeKind, Cell, Dataset, Instance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// The first record names the columns and must match the schema.
    pub has_header: bool,
    /// Accept rows that omit the class column entirely (unlabeled data).
    pub class_optional: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            class_optional: false,
        }
    }
}

/// Loads `data` using the schema sidecar at `schema`.
pub fn load_dataset<T: Scalar>(
    data: impl AsRef<Path>,
    schema: impl AsRef<Path>,
    options: CsvOptions,
) -> Result<(SchemaFile, Dataset<T>)> {
    let layout = load_schema(schema)?;
    let path = data.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let dataset = read_dataset(file, &layout, options, path)?;
    Ok((layout, dataset))
}

/// Parses CSV records from `reader`. `path` is only used in error messages.
pub fn read_dataset<T: Scalar, R: Read>(
    reader: R,
    layout: &SchemaFile,
    options: CsvOptions,
    path: &Path,
) -> Result<Dataset<T>> {
    let schema = &layout.schema;
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(reader);
    let full = layout.columns();
    let names = layout.column_names();
    let mut instances = Vec::new();
    let mut first = true;

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if first && options.has_header {
            first = false;
            let header: Vec<&str> = record.iter().collect();
            let without_class: Vec<&str> = schema.attributes().iter().map(|a| a.name.as_str()).collect();
            let ok = header == names || (options.class_optional && header == without_class);
            if !ok {
                return Err(err(format!(
                    "header `{}` does not match the schema columns `{}`",
                    header.join(","),
                    names.join(",")
                )));
            }
            continue;
        }
        first = false;

        let labeled = match record.len() {
            n if n == full => true,
            n if n == full - 1 && options.class_optional => false,
            n => {
                return Err(err(format!("expected {full} fields, found {n}")));
            }
        };
        let mut values = Vec::with_capacity(schema.len());
        let mut label = None;
        let mut fields = record.iter();
        for col in 0..full {
            if col == layout.class_column {
                if labeled {
                    let raw = fields.next().unwrap_or_default();
                    if raw != layout.missing_token {
                        if schema.label_index(raw).is_none() {
                            return Err(err(format!(
                                "class value `{raw}` is not one of {}",
                                schema.labels().join(",")
                            )));
                        }
                        label = Some(raw.to_string());
                    }
                }
                continue;
            }
            let j = if col < layout.class_column { col } else { col - 1 };
            let attr = schema.attribute(j);
            let raw = fields.next().unwrap_or_default();
            if raw == layout.missing_token {
                values.push(Cell::Missing);
                continue;
            }
            let cell = match &attr.kind {
                AttributeKind::Continuous => {
                    let x: T = raw
                        .parse()
                        .map_err(|_| err(format!("`{raw}` is not a number (attribute `{}`)", attr.name)))?;
                    if !x.is_finite() {
                        return Err(err(format!("non-finite value `{raw}` (attribute `{}`)", attr.name)));
                    }
                    Cell::Continuous(x)
                }
                AttributeKind::Nominal(domain) => {
                    if !domain.iter().any(|d| d == raw) {
                        return Err(err(format!(
                            "`{raw}` is not in the domain of `{}` ({})",
                            attr.name,
                            domain.join(",")
                        )));
                    }
                    Cell::Nominal(raw.to_string())
                }
            };
            values.push(cell);
        }
        instances.push(Instance::new(values, label));
    }
    Ok(Dataset::new(layout.schema.clone(), instances))
}
