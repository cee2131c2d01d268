//! Versioned TOML files for trained models and synthetic domains.
//!
//! Floats are written in shortest round-trip form, so a reloaded model
//! reproduces the original posteriors bit for bit.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::schema_file::SchemaFile;
use crate::classifier::{ClassifierModel, EstimatorChoice, KernelWidth, TrainConfig};
use crate::data::{Attribute, AttributeKind, Schema};
use crate::density::{DensityModel, GaussianModel, KernelModel, NominalModel, SigmaConvention, Smoothing};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthetic::{Component, Conditional, SyntheticSpec};

pub const MODEL_FORMAT: &str = "flexbayes-model";
pub const DOMAIN_FORMAT: &str = "flexbayes-domain";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc<T> {
    format: String,
    version: u32,
    estimator: String,
    smoothing: String,
    sigma: String,
    kernel_width: String,
    schema: SchemaDoc,
    #[serde(default = "Vec::new")]
    classes: Vec<ClassDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    class: String,
    labels: Vec<String>,
    class_column: usize,
    missing_token: String,
    attributes: Vec<AttributeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    domain: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc<T> {
    label: String,
    count: u64,
    #[serde(default = "Vec::new")]
    estimators: Vec<EstimatorDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum EstimatorDoc<T> {
    Nominal {
        attribute: String,
        counts: Vec<u64>,
    },
    Gaussian {
        attribute: String,
        mean: T,
        sigma: T,
        n: usize,
    },
    Kernel {
        attribute: String,
        width: T,
        centers: Vec<T>,
    },
}

impl<T> EstimatorDoc<T> {
    fn attribute(&self) -> &str {
        match self {
            EstimatorDoc::Nominal { attribute, .. }
            | EstimatorDoc::Gaussian { attribute, .. }
            | EstimatorDoc::Kernel { attribute, .. } => attribute,
        }
    }
}

fn bad(what: &'static str, message: impl Into<String>) -> Error {
    Error::Format {
        what,
        message: message.into(),
    }
}

fn check_header(what: &'static str, format: &str, expected: &str, version: u32) -> Result<()> {
    if format != expected {
        return Err(bad(what, format!("format is `{format}`, expected `{expected}`")));
    }
    if version != FORMAT_VERSION {
        return Err(bad(
            what,
            format!("version {version} is not supported (expected {FORMAT_VERSION})"),
        ));
    }
    Ok(())
}

/// Serializes a model together with the data layout it was trained on.
pub fn model_to_string<T: Scalar>(model: &ClassifierModel<T>, layout: &SchemaFile) -> Result<String> {
    let schema = model.schema();
    if *layout.schema != *schema {
        return Err(Error::InvalidArgument(
            "layout schema differs from the model schema".into(),
        ));
    }
    let config = model.config();
    let attributes = schema
        .attributes()
        .iter()
        .map(|a| match &a.kind {
            AttributeKind::Continuous => AttributeDoc {
                name: a.name.clone(),
                kind: "continuous".into(),
                domain: Vec::new(),
            },
            AttributeKind::Nominal(d) => AttributeDoc {
                name: a.name.clone(),
                kind: "nominal".into(),
                domain: d.clone(),
            },
        })
        .collect();
    let classes = schema
        .labels()
        .iter()
        .enumerate()
        .map(|(c, label)| ClassDoc {
            label: label.clone(),
            count: model.training_counts()[c],
            estimators: model.conditionals()[c]
                .iter()
                .zip(schema.attributes())
                .filter_map(|(m, a)| {
                    let attribute = a.name.clone();
                    m.as_ref().map(|m| match m {
                        DensityModel::Nominal(m) => EstimatorDoc::Nominal {
                            attribute,
                            counts: m.counts().to_vec(),
                        },
                        DensityModel::Gaussian(m) => EstimatorDoc::Gaussian {
                            attribute,
                            mean: m.mean(),
                            sigma: m.sigma(),
                            n: m.n(),
                        },
                        DensityModel::Kernel(m) => EstimatorDoc::Kernel {
                            attribute,
                            width: m.width(),
                            centers: m.centers().to_vec(),
                        },
                    })
                })
                .collect(),
        })
        .collect();
    let doc = ModelDoc {
        format: MODEL_FORMAT.into(),
        version: FORMAT_VERSION,
        estimator: config.choice.name().into(),
        smoothing: config.smoothing.name().into(),
        sigma: config.sigma.name().into(),
        kernel_width: config.kernel_width.name().into(),
        schema: SchemaDoc {
            class: schema.class_name().into(),
            labels: schema.labels().to_vec(),
            class_column: layout.class_column,
            missing_token: layout.missing_token.clone(),
            attributes,
        },
        classes,
    };
    toml::to_string(&doc).map_err(|e| bad("model", e.to_string()))
}

/// Parses a model file, returning the model and its data layout.
pub fn model_from_str<T: Scalar>(text: &str) -> Result<(ClassifierModel<T>, SchemaFile)> {
    let doc: ModelDoc<T> = toml::from_str(text).map_err(|e| bad("model", e.to_string()))?;
    check_header("model", &doc.format, MODEL_FORMAT, doc.version)?;
    let parse_name = |field: &str, value: &str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(bad("model", format!("unknown {field} `{value}`")))
        }
    };
    let choice = EstimatorChoice::from_name(&doc.estimator);
    parse_name("estimator", &doc.estimator, choice.is_some())?;
    let smoothing = Smoothing::from_name(&doc.smoothing);
    parse_name("smoothing", &doc.smoothing, smoothing.is_some())?;
    let sigma = SigmaConvention::from_name(&doc.sigma);
    parse_name("sigma", &doc.sigma, sigma.is_some())?;
    let kernel_width = KernelWidth::from_name(&doc.kernel_width);
    parse_name("kernel_width", &doc.kernel_width, kernel_width.is_some())?;
    let config = TrainConfig::new(choice.unwrap())
        .with_smoothing(smoothing.unwrap())
        .with_sigma(sigma.unwrap())
        .with_kernel_width(kernel_width.unwrap());

    let attributes = doc
        .schema
        .attributes
        .into_iter()
        .map(|a| match a.kind.as_str() {
            "continuous" if a.domain.is_empty() => Ok(Attribute::continuous(a.name)),
            "nominal" => Ok(Attribute::nominal(a.name, a.domain)),
            other => Err(bad("model", format!("attribute `{}` has kind `{other}`", a.name))),
        })
        .collect::<Result<Vec<_>>>()?;
    let schema = Arc::new(Schema::new(attributes, doc.schema.class, doc.schema.labels)?);
    if doc.schema.class_column > schema.len() {
        return Err(bad("model", "class_column is out of range"));
    }
    if doc.classes.len() != schema.num_classes() {
        return Err(bad(
            "model",
            format!(
                "{} class entries for {} labels",
                doc.classes.len(),
                schema.num_classes()
            ),
        ));
    }

    let mut counts = Vec::with_capacity(doc.classes.len());
    let mut conditionals = Vec::with_capacity(doc.classes.len());
    for (class, label) in doc.classes.into_iter().zip(schema.labels()) {
        if &class.label != label {
            return Err(bad(
                "model",
                format!("class entry `{}` where `{label}` was expected", class.label),
            ));
        }
        counts.push(class.count);
        let mut row: Vec<Option<DensityModel<T>>> = vec![None; schema.len()];
        for est in class.estimators {
            let j = schema
                .attribute_index(est.attribute())
                .ok_or_else(|| bad("model", format!("unknown attribute `{}`", est.attribute())))?;
            if row[j].is_some() {
                return Err(bad(
                    "model",
                    format!("two estimators for `{}` in class `{label}`", est.attribute()),
                ));
            }
            row[j] = Some(match est {
                EstimatorDoc::Nominal { counts, .. } => {
                    let domain = schema
                        .attribute(j)
                        .kind
                        .domain()
                        .ok_or_else(|| bad("model", "nominal estimator on a continuous attribute"))?;
                    DensityModel::Nominal(NominalModel::from_counts(domain.to_vec(), counts)?)
                }
                EstimatorDoc::Gaussian { mean, sigma, n, .. } => {
                    DensityModel::Gaussian(GaussianModel::from_parts(mean, sigma, n)?)
                }
                EstimatorDoc::Kernel { width, centers, .. } => {
                    DensityModel::Kernel(KernelModel::with_width(centers, width)?)
                }
            });
        }
        conditionals.push(row);
    }
    let model = ClassifierModel::from_parts(Arc::clone(&schema), config, counts, conditionals)?;
    let layout = SchemaFile {
        schema,
        class_column: doc.schema.class_column,
        missing_token: doc.schema.missing_token,
    };
    Ok((model, layout))
}

pub fn save_model<T: Scalar>(model: &ClassifierModel<T>, layout: &SchemaFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = model_to_string(model, layout)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<(ClassifierModel<T>, SchemaFile)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc<T> {
    format: String,
    version: u32,
    classes: Vec<DomainClassDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainClassDoc<T> {
    label: String,
    prior: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<T>,
    #[serde(default = "Vec::new", skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc<T> {
    weight: T,
    mean: T,
    sigma: T,
}

/// Serializes a synthetic domain. A class is written either as a single
/// `mean`/`sigma` pair or as a list of weighted `components`.
pub fn spec_to_string<T: Scalar>(spec: &SyntheticSpec<T>) -> Result<String> {
    let classes = spec
        .labels()
        .iter()
        .zip(spec.priors())
        .zip(spec.conditionals())
        .map(|((label, &prior), cond)| match cond {
            Conditional::Gaussian { mean, sigma } => DomainClassDoc {
                label: label.clone(),
                prior,
                mean: Some(*mean),
                sigma: Some(*sigma),
                components: Vec::new(),
            },
            Conditional::Mixture(cs) => DomainClassDoc {
                label: label.clone(),
                prior,
                mean: None,
                sigma: None,
                components: cs
                    .iter()
                    .map(|c| ComponentDoc {
                        weight: c.weight,
                        mean: c.mean,
                        sigma: c.sigma,
                    })
                    .collect(),
            },
        })
        .collect();
    let doc = DomainDoc {
        format: DOMAIN_FORMAT.into(),
        version: FORMAT_VERSION,
        classes,
    };
    toml::to_string(&doc).map_err(|e| bad("domain", e.to_string()))
}

pub fn spec_from_str<T: Scalar>(text: &str) -> Result<SyntheticSpec<T>> {
    let doc: DomainDoc<T> = toml::from_str(text).map_err(|e| bad("domain", e.to_string()))?;
    check_header("domain", &doc.format, DOMAIN_FORMAT, doc.version)?;
    let mut labels = Vec::new();
    let mut priors = Vec::new();
    let mut conditionals = Vec::new();
    for class in doc.classes {
        let cond = match (class.mean, class.sigma, class.components.is_empty()) {
            (Some(mean), Some(sigma), true) => Conditional::Gaussian { mean, sigma },
            (None, None, false) => Conditional::Mixture(
                class
                    .components
                    .into_iter()
                    .map(|c| Component {
                        weight: c.weight,
                        mean: c.mean,
                        sigma: c.sigma,
                    })
                    .collect(),
            ),
            _ => {
                return Err(bad(
                    "domain",
                    format!(
                        "class `{}` needs either `mean` and `sigma` or a `components` list",
                        class.label
                    ),
                ))
            }
        };
        labels.push(class.label);
        priors.push(class.prior);
        conditionals.push(cond);
    }
    SyntheticSpec::new(labels, priors, conditionals)
}

pub fn load_spec<T: Scalar>(path: impl AsRef<Path>) -> Result<SyntheticSpec<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    spec_from_str(&text)
}
