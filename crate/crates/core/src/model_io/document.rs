use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::diagnostics::{Diagnostic, DiagnosticCode as Code, Diagnostics};
use crate::adaptive::{EntropyMode, EvaluationFunction, Metadata, QuestionItem, QuestionnaireModel};
use crate::bn::{
    validate_network, BayesianNetwork, DiscreteVariable, ViolationKind, VariableRole,
};
use crate::elicit::{compile_dg_cpt, DgParams, DgQuestionSpec};

/// The only document version this build reads and writes.
pub const FORMAT_VERSION: u32 = 1;

/// On-disk questionnaire. Field order here is the canonical key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionnaireDocument {
    pub format_version: u32,
    #[serde(default)]
    pub metadata: DocumentMetadata,
    pub skills: Vec<VariableDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub auxiliary: Vec<VariableDecl>,
    pub questions: Vec<QuestionDecl>,
    /// One value per joint skill state, skills in declaration order, last
    /// skill varying fastest.
    pub evaluation: Vec<f64>,
    pub stop_threshold: f64,
    #[serde(default)]
    pub max_questions: Option<usize>,
    #[serde(default)]
    pub entropy_mode: EntropyMode,
    #[serde(default)]
    pub risks: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentMetadata {
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub explain_panel: bool,
}

/// Skill or auxiliary variable. `cpt` has one row per parent configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub id: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

/// A question carries exactly one of `cpt` and `dg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionDecl {
    pub id: String,
    pub text: String,
    pub states: Vec<String>,
    /// Display text per state; defaults to the state labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<String>>,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpt: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dg: Option<Vec<DgParams>>,
}

/// Parses and validates a document, collecting every problem found.
pub fn parse_questionnaire(text: &str) -> Result<QuestionnaireModel, Diagnostics> {
    let doc = parse_document(text)?;
    document_to_model(&doc)
}

/// Strict deserialisation only, without semantic checks.
pub fn parse_document(text: &str) -> Result<QuestionnaireDocument, Diagnostics> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        let mut d = Diagnostic::new(Code::Syntax, ".", e.to_string());
        d.line = Some(e.line());
        d.column = Some(e.column());
        Diagnostics(vec![d])
    })?;
    if let Some(v) = value.get("format_version") {
        if v.as_u64() != Some(u64::from(FORMAT_VERSION)) {
            return Err(Diagnostics(vec![Diagnostic::new(
                Code::UnsupportedVersion,
                "format_version",
                format!("format_version {v} is not supported (expected {FORMAT_VERSION})"),
            )]));
        }
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = match e.path().to_string() {
            p if p.is_empty() => ".".to_string(),
            p => p,
        };
        let inner = e.inner();
        let msg = inner.to_string();
        let code = if msg.starts_with("unknown field") {
            Code::UnknownField
        } else {
            Code::Schema
        };
        let mut d = Diagnostic::new(code, path, msg);
        d.line = Some(inner.line());
        d.column = Some(inner.column());
        Diagnostics(vec![d])
    })
}

struct Declared<'a> {
    var: DiscreteVariable,
    path: String,
    parents: &'a [String],
}

/// Semantic validation and compilation of a deserialised document.
pub fn document_to_model(doc: &QuestionnaireDocument) -> Result<QuestionnaireModel, Diagnostics> {
    let mut diags = Diagnostics::default();
    if doc.format_version != FORMAT_VERSION {
        diags.push(
            Code::UnsupportedVersion,
            "format_version",
            format!("format_version {} is not supported (expected {FORMAT_VERSION})", doc.format_version),
        );
        return Err(diags);
    }
    if doc.skills.is_empty() {
        diags.push(Code::InvalidVariable, "skills", "at least one skill is required");
    }

    // Variables first, so that parents can be resolved in any order.
    let mut declared: Vec<Declared> = Vec::new();
    let mut ids: HashMap<&str, String> = HashMap::new();
    let all = doc
        .skills
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("skills[{i}]"), &v.id, &v.states, &v.parents[..], VariableRole::Skill))
        .chain(doc.auxiliary.iter().enumerate().map(|(i, v)| {
            (format!("auxiliary[{i}]"), &v.id, &v.states, &v.parents[..], VariableRole::Auxiliary)
        }))
        .chain(doc.questions.iter().enumerate().map(|(i, q)| {
            (format!("questions[{i}]"), &q.id, &q.states, &q.parents[..], VariableRole::Question)
        }));
    for (path, id, states, parents, role) in all {
        if let Some(first) = ids.get(id.as_str()) {
            diags.push(Code::DuplicateId, format!("{path}.id"), format!("id `{id}` already declared at {first}"));
            continue;
        }
        match DiscreteVariable::new(id.clone(), states.iter().cloned(), role) {
            Ok(var) => {
                ids.insert(id, path.clone());
                declared.push(Declared { var, path, parents });
            }
            Err(e) => diags.push(Code::InvalidVariable, path, e.to_string()),
        }
    }
    let cards: HashMap<&str, usize> =
        declared.iter().map(|d| (d.var.id(), d.var.cardinality())).collect();
    let variables: Vec<DiscreteVariable> = declared.iter().map(|d| d.var.clone()).collect();

    let mut parents_ok: HashMap<&str, bool> = HashMap::new();
    for d in &declared {
        let mut ok = true;
        for (j, p) in d.parents.iter().enumerate() {
            if !cards.contains_key(p.as_str()) {
                ok = false;
                diags.push(
                    Code::UnknownVariable,
                    format!("{}.parents[{j}]", d.path),
                    format!("parent `{p}` of `{}` is not declared", d.var.id()),
                );
            } else if p == d.var.id() {
                ok = false;
                diags.push(
                    Code::Network,
                    format!("{}.parents[{j}]", d.path),
                    format!("`{p}` lists itself as parent"),
                );
            } else if d.parents[..j].contains(p) {
                ok = false;
                diags.push(
                    Code::DuplicateId,
                    format!("{}.parents[{j}]", d.path),
                    format!("parent `{p}` listed twice"),
                );
            }
        }
        parents_ok.insert(d.var.id(), ok);
    }
    let configs = |d: &Declared| d.parents.iter().map(|p| cards[p.as_str()]).product::<usize>();

    let mut tables: HashMap<String, Vec<f64>> = HashMap::new();
    let mut dg_specs = BTreeMap::new();
    for d in &declared {
        if !parents_ok[d.var.id()] {
            continue;
        }
        let rows_expected = configs(d);
        match d.var.role() {
            VariableRole::Skill | VariableRole::Auxiliary => {
                let decl = doc
                    .skills
                    .iter()
                    .chain(&doc.auxiliary)
                    .find(|v| v.id == d.var.id())
                    .expect("declared from the document");
                if let Some(t) = check_rows(&decl.cpt, rows_expected, d.var.cardinality(), &format!("{}.cpt", d.path), &mut diags) {
                    tables.insert(d.var.id().to_string(), t);
                }
            }
            VariableRole::Question => {
                let q = doc.questions.iter().find(|q| q.id == d.var.id()).expect("declared");
                let path = &d.path;
                if let Some(opts) = &q.options {
                    if opts.len() != d.var.cardinality() {
                        diags.push(
                            Code::OptionsMismatch,
                            format!("{path}.options"),
                            format!("{} options for {} states", opts.len(), d.var.cardinality()),
                        );
                    }
                }
                match (&q.cpt, &q.dg) {
                    (Some(_), Some(_)) | (None, None) => diags.push(
                        Code::Parameterization,
                        path.clone(),
                        format!("question `{}` needs exactly one parameterization: `cpt` or `dg`", q.id),
                    ),
                    (Some(rows), None) => {
                        if let Some(t) = check_rows(rows, rows_expected, d.var.cardinality(), &format!("{path}.cpt"), &mut diags) {
                            tables.insert(q.id.clone(), t);
                        }
                    }
                    (None, Some(dg)) => {
                        if d.var.cardinality() != 2 {
                            diags.push(
                                Code::NonBinaryQuestion,
                                format!("{path}.dg"),
                                format!("`dg` needs a binary question, `{}` has {} states", q.id, d.var.cardinality()),
                            );
                            continue;
                        }
                        if dg.len() != rows_expected {
                            diags.push(
                                Code::Parameterization,
                                format!("{path}.dg"),
                                format!("{} `dg` pairs given, one per parent configuration ({rows_expected}) required", dg.len()),
                            );
                            continue;
                        }
                        let mut feasible = true;
                        for (k, p) in dg.iter().enumerate() {
                            if let Err(e) = crate::elicit::dg_to_probabilities(*p) {
                                feasible = false;
                                diags.push(Code::InfeasibleParameters, format!("{path}.dg[{k}]"), e.to_string());
                            }
                        }
                        if !feasible {
                            continue;
                        }
                        let spec = DgQuestionSpec { question: q.id.clone(), parents: q.parents.clone(), params: dg.clone() };
                        match compile_dg_cpt(&spec, &variables) {
                            Ok(f) => {
                                tables.insert(q.id.clone(), f.table().to_vec());
                                dg_specs.insert(q.id.clone(), spec);
                            }
                            Err(e) => diags.push(Code::Parameterization, format!("{path}.dg"), e.to_string()),
                        }
                    }
                }
            }
        }
    }

    let joint: usize = doc
        .skills
        .iter()
        .map(|s| cards.get(s.id.as_str()).copied().unwrap_or(0))
        .product();
    if doc.evaluation.len() != joint {
        diags.push(
            Code::EvaluationShape,
            "evaluation",
            format!("{} entries given, skills have {joint} joint states", doc.evaluation.len()),
        );
    }
    if !(doc.stop_threshold.is_finite() && doc.stop_threshold >= 0.0) {
        diags.push(
            Code::InvalidThreshold,
            "stop_threshold",
            format!("stop_threshold must be non-negative, got {}", doc.stop_threshold),
        );
    }
    if doc.max_questions == Some(0) {
        diags.push(Code::InvalidMaxQuestions, "max_questions", "max_questions must be positive or null");
    }
    for (label, states) in &doc.risks {
        let path = format!("risks.{label}");
        if states.is_empty() {
            diags.push(Code::InvalidRisk, path, format!("risk `{label}` lists no states"));
        } else if let Some(s) = states.iter().find(|&&s| s >= joint) {
            diags.push(Code::InvalidRisk, path, format!("joint state {s} out of range, {joint} exist"));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut b = BayesianNetwork::builder();
    for d in &declared {
        b = b
            .variable(d.var.clone())
            .cpt(d.var.id(), d.parents.iter().cloned(), tables.remove(d.var.id()).unwrap());
    }
    let network = b.build().map_err(|e| Diagnostics(vec![Diagnostic::new(Code::Network, ".", e.to_string())]))?;

    let report = validate_network(&network);
    for v in &report.violations {
        let d = declared.iter().find(|d| d.var.id() == v.variable).expect("validated variable is declared");
        match &v.kind {
            ViolationKind::RowNotNormalized { row, .. } => {
                let field = match doc.questions.iter().find(|q| q.id == v.variable) {
                    Some(q) if q.dg.is_some() => "dg",
                    _ => "cpt",
                };
                diags.push(Code::InvalidCpt, format!("{}.{field}[{row}]", d.path), v.to_string());
            }
            _ => diags.push(Code::Network, d.path.clone(), v.to_string()),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let pool = doc
        .questions
        .iter()
        .map(|q| QuestionItem {
            id: q.id.clone(),
            text: q.text.clone(),
            options: q.options.clone().unwrap_or_else(|| q.states.clone()),
        })
        .collect();
    let build = || -> crate::Result<QuestionnaireModel> {
        QuestionnaireModel::new(
            network,
            doc.skills.iter().map(|s| s.id.clone()).collect(),
            pool,
            EvaluationFunction::new(doc.evaluation.clone())?,
            doc.stop_threshold,
        )?
        .with_max_questions(doc.max_questions)?
        .with_risks(doc.risks.clone())?
        .with_dg_specs(dg_specs)
        .map(|m| {
            m.with_entropy_mode(doc.entropy_mode).with_metadata(Metadata {
                title: doc.metadata.title.clone(),
                description: doc.metadata.description.clone(),
                explain_panel: doc.metadata.explain_panel,
            })
        })
    };
    build().map_err(|e| Diagnostics(vec![Diagnostic::new(Code::Network, ".", e.to_string())]))
}

/// Row-count, width and sign checks; returns the flattened table.
fn check_rows(
    rows: &[Vec<f64>],
    expected_rows: usize,
    width: usize,
    path: &str,
    diags: &mut Diagnostics,
) -> Option<Vec<f64>> {
    let before = diags.0.len();
    if rows.len() != expected_rows {
        diags.push(
            Code::InvalidCpt,
            path,
            format!("{} rows given, one per parent configuration ({expected_rows}) required", rows.len()),
        );
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            diags.push(Code::InvalidCpt, format!("{path}[{r}]"), format!("row has {} entries, variable has {width} states", row.len()));
        } else if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            diags.push(Code::InvalidCpt, format!("{path}[{r}]"), format!("entry {x} is not a probability"));
        }
    }
    (diags.0.len() == before).then(|| rows.concat())
}

/// Canonical document for a model.
pub fn model_to_document(model: &QuestionnaireModel) -> QuestionnaireDocument {
    let net = model.network();
    let rows = |id: &str| -> Vec<Vec<f64>> {
        let card = net.cardinality(id).expect("model variable");
        net.cpt(id).expect("model variable").table().chunks(card).map(<[f64]>::to_vec).collect()
    };
    let decl = |v: &DiscreteVariable| VariableDecl {
        id: v.id().to_string(),
        states: v.states().to_vec(),
        parents: net.parents(v.id()).to_vec(),
        cpt: rows(v.id()),
    };
    let skills = model
        .skills()
        .iter()
        .map(|s| decl(net.variable(s).expect("model skill")))
        .collect();
    let auxiliary = net
        .variables()
        .iter()
        .filter(|v| v.role() == VariableRole::Auxiliary)
        .map(decl)
        .collect();
    let questions = model
        .pool()
        .iter()
        .map(|item| {
            let v = net.variable(&item.id).expect("model question");
            let parents = net.parents(&item.id).to_vec();
            let dg = model.dg_specs().get(&item.id).filter(|spec| {
                spec.parents == parents
                    && compile_dg_cpt(spec, net.variables())
                        .is_ok_and(|f| f.table() == net.cpt(&item.id).unwrap().table())
            });
            QuestionDecl {
                id: item.id.clone(),
                text: item.text.clone(),
                states: v.states().to_vec(),
                options: Some(item.options.clone()),
                parents,
                cpt: dg.is_none().then(|| rows(&item.id)),
                dg: dg.map(|spec| spec.params.clone()),
            }
        })
        .collect();
    let meta = model.metadata();
    QuestionnaireDocument {
        format_version: FORMAT_VERSION,
        metadata: DocumentMetadata {
            title: meta.title.clone(),
            description: meta.description.clone(),
            explain_panel: meta.explain_panel,
        },
        skills,
        auxiliary,
        questions,
        evaluation: model.evaluation().table().to_vec(),
        stop_threshold: model.stop_threshold(),
        max_questions: model.max_questions(),
        entropy_mode: model.entropy_mode(),
        risks: model.risks().clone(),
    }
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn serialize_questionnaire(model: &QuestionnaireModel) -> String {
    let mut s = serde_json::to_string_pretty(&model_to_document(model))
        .expect("documents contain only finite numbers and string keys");
    s.push('\n');
    s
}
