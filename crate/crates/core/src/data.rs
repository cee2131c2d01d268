//! Typed dataset representation: schemas with nominal and continuous
//! attributes, instances with optional labels and missing cells.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    /// Discrete attribute over an ordered, duplicate-free value domain.
    Nominal(Vec<String>),
    Continuous,
}

impl AttributeKind {
    pub fn is_continuous(&self) -> bool {
        matches!(self, AttributeKind::Continuous)
    }

    pub fn domain(&self) -> Option<&[String]> {
        match self {
            AttributeKind::Nominal(d) => Some(d),
            AttributeKind::Continuous => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn nominal<S: Into<String>>(name: impl Into<String>, domain: impl IntoIterator<Item = S>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal(domain.into_iter().map(Into::into).collect()),
        }
    }

    pub fn continuous(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Continuous,
        }
    }
}

/// Predictive attributes plus the class attribute and its ordered labels.
///
/// The label order is significant: every tie in the crate is broken in
/// favour of the earlier label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    class_name: String,
    labels: Vec<String>,
}

impl Schema {
    pub fn new<S: Into<String>>(
        attributes: Vec<Attribute>,
        class_name: impl Into<String>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let class_name = class_name.into();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();

        if attributes.is_empty() {
            return Err(Error::InvalidSchema(
                "at least one predictive attribute is required".into(),
            ));
        }
        if labels.len() < 2 {
            return Err(Error::InvalidSchema(format!(
                "class `{class_name}` needs at least two labels"
            )));
        }
        if let Some(dup) = first_duplicate(&labels) {
            return Err(Error::InvalidSchema(format!("duplicate class label `{dup}`")));
        }

        let mut names = HashSet::new();
        names.insert(class_name.as_str());
        for attr in &attributes {
            if !names.insert(attr.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if let AttributeKind::Nominal(domain) = &attr.kind {
                if domain.is_empty() {
                    return Err(Error::InvalidSchema(format!(
                        "nominal attribute `{}` has an empty domain",
                        attr.name
                    )));
                }
                if let Some(dup) = first_duplicate(domain) {
                    return Err(Error::InvalidSchema(format!(
                        "nominal attribute `{}` lists `{dup}` twice",
                        attr.name
                    )));
                }
            }
        }

        Ok(Schema {
            attributes,
            class_name,
            labels,
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    /// Number of predictive attributes.
    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

fn first_duplicate(items: &[String]) -> Option<&str> {
    let mut seen = HashSet::new();
    items.iter().find(|s| !seen.insert(s.as_str())).map(String::as_str)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell<T> {
    Nominal(String),
    Continuous(T),
    Missing,
}

impl<T: Scalar> Cell<T> {
    pub fn nominal(value: impl Into<String>) -> Self {
        Cell::Nominal(value.into())
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub values: Vec<Cell<T>>,
    pub label: Option<String>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(values: Vec<Cell<T>>, label: Option<String>) -> Self {
        Instance { values, label }
    }

    pub fn labeled(values: Vec<Cell<T>>, label: impl Into<String>) -> Self {
        Instance {
            values,
            label: Some(label.into()),
        }
    }

    pub fn unlabeled(values: Vec<Cell<T>>) -> Self {
        Instance { values, label: None }
    }

    /// Checks cell count, cell kinds, domain membership and finiteness.
    /// The label is not inspected.
    pub fn conformance(&self, schema: &Schema) -> std::result::Result<(), (Option<usize>, String)> {
        if self.values.len() != schema.len() {
            return Err((
                None,
                format!("has {} cells, schema declares {}", self.values.len(), schema.len()),
            ));
        }
        for (j, (cell, attr)) in self.values.iter().zip(schema.attributes()).enumerate() {
            if let Some(reason) = cell_problem(cell, &attr.kind) {
                return Err((Some(j), reason));
            }
        }
        Ok(())
    }
}

fn cell_problem<T: Scalar>(cell: &Cell<T>, kind: &AttributeKind) -> Option<String> {
    match (cell, kind) {
        (Cell::Missing, _) => None,
        (Cell::Nominal(v), AttributeKind::Nominal(domain)) => {
            (!domain.contains(v)).then(|| format!("value `{v}` is not in the declared domain"))
        }
        (Cell::Continuous(x), AttributeKind::Continuous) => {
            (!x.is_finite()).then(|| format!("continuous value {x} is not finite"))
        }
        (Cell::Nominal(v), AttributeKind::Continuous) => Some(format!("nominal value `{v}` in a continuous attribute")),
        (Cell::Continuous(x), AttributeKind::Nominal(_)) => {
            Some(format!("continuous value {x} in a nominal attribute"))
        }
    }
}

/// A single invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub instance: usize,
    /// Attribute name, or the class name for label problems. `None` when the
    /// instance as a whole is malformed (wrong cell count).
    pub attribute: Option<String>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.attribute {
            Some(a) => write!(f, "instance {}, `{}`: {}", self.instance, a, self.reason),
            None => write!(f, "instance {}: {}", self.instance, self.reason),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    schema: Arc<Schema>,
    instances: Vec<Instance<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(schema: impl Into<Arc<Schema>>, instances: Vec<Instance<T>>) -> Self {
        Dataset {
            schema: schema.into(),
            instances,
        }
    }

    pub fn empty(schema: impl Into<Arc<Schema>>) -> Self {
        Self::new(schema, Vec::new())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn instances(&self) -> &[Instance<T>] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// New dataset sharing this schema, holding clones of the selected rows.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Dataset {
            schema: Arc::clone(&self.schema),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }

    /// Label index of every instance, failing on the first unlabeled or
    /// unknown label.
    pub fn label_indices(&self) -> Result<Vec<usize>> {
        self.instances
            .iter()
            .enumerate()
            .map(|(i, inst)| label_index_of(&self.schema, i, inst))
            .collect()
    }
}

pub(crate) fn label_index_of<T>(schema: &Schema, index: usize, inst: &Instance<T>) -> Result<usize> {
    let label = inst.label.as_deref().ok_or(Error::UnlabeledInstance { index })?;
    schema.label_index(label).ok_or_else(|| Error::NonConforming {
        index,
        reason: format!("label `{label}` is not declared for class `{}`", schema.class_name()),
    })
}

/// Lists every invariant violation in the dataset. An empty list means the
/// dataset is well formed.
pub fn validate<T: Scalar>(dataset: &Dataset<T>) -> Vec<Violation> {
    let schema = dataset.schema();
    let mut out = Vec::new();
    for (i, inst) in dataset.instances().iter().enumerate() {
        if inst.values.len() != schema.len() {
            out.push(Violation {
                instance: i,
                attribute: None,
                reason: format!("has {} cells, schema declares {}", inst.values.len(), schema.len()),
            });
        } else {
            for (cell, attr) in inst.values.iter().zip(schema.attributes()) {
                if let Some(reason) = cell_problem(cell, &attr.kind) {
                    out.push(Violation {
                        instance: i,
                        attribute: Some(attr.name.clone()),
                        reason,
                    });
                }
            }
        }
        if let Some(label) = &inst.label {
            if schema.label_index(label).is_none() {
                out.push(Violation {
                    instance: i,
                    attribute: Some(schema.class_name().to_string()),
                    reason: format!("label `{label}` is not declared"),
                });
            }
        }
    }
    out
}

/// Per-label instance counts in schema label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    labels: Vec<String>,
    counts: Vec<usize>,
}

impl ClassCounts {
    pub fn get(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| self.counts[i])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.labels.iter().map(String::as_str).zip(self.counts.iter().copied())
    }
}

pub fn class_counts<T: Scalar>(dataset: &Dataset<T>) -> Result<ClassCounts> {
    let schema = dataset.schema();
    let mut counts = vec![0; schema.num_classes()];
    for c in dataset.label_indices()? {
        counts[c] += 1;
    }
    Ok(ClassCounts {
        labels: schema.labels().to_vec(),
        counts,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The five-case training set with one nominal and one continuous attribute.
    pub fn toy() -> Dataset<f64> {
        let schema = Schema::new(
            vec![Attribute::nominal("X1", ["a", "b"]), Attribute::continuous("X2")],
            "C",
            ["+", "-"],
        )
        .unwrap();
        let row = |c: &str, a: &str, x: f64| Instance::labeled(vec![Cell::nominal(a), Cell::Continuous(x)], c);
        Dataset::new(
            schema,
            vec![
                row("+", "a", 1.0),
                row("+", "b", 1.2),
                row("+", "a", 3.0),
                row("-", "b", 4.4),
                row("-", "b", 4.5),
            ],
        )
    }
}
