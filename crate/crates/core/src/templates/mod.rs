//! Automation templates.
//!
//! A template describes one statement kind as a list of typed slots. A
//! filled-in [`TemplateInstance`] is validated slot by slot, turned into a
//! [`Statement`], and realized into a sentence by the NLG engine. Control
//! structures come out as skeletons with empty bodies; the caller decides
//! where later statements go.
//!
//! The catalog itself is data: it is loaded from the embedded
//! `catalog.json`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize};

use crate::ast::{
    Condition, Expression, Ident, IfArm, NodeSpan, Place, SelectCase, Statement, TypeTag,
};
use crate::diagnostic::{Code, Diagnostic};
use crate::nlg::realize_statement;
use crate::parser::{parse_condition_text, parse_expression_text, parse_source, MAX_ARRAY_SIZE};
use crate::semantics::{analyze_in_context, check_identifier, SymbolTable};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotKind {
    Identifier,
    TypeChoice,
    Expression,
    Condition,
    /// Conditions, one per line.
    ConditionList,
    Literal,
    /// Literals, one per line.
    LiteralList,
    Integer,
    String,
    Boolean,
    /// One of the descriptor's `choices`.
    Choice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SlotDescriptor {
    pub name: String,
    pub label: String,
    pub kind: SlotKind,
    pub required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateDescriptor {
    pub id: String,
    pub title: String,
    pub description: String,
    pub slots: Vec<SlotDescriptor>,
}

impl TemplateDescriptor {
    pub fn slot(&self, name: &str) -> Option<&SlotDescriptor> {
        self.slots.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub templates: Vec<TemplateDescriptor>,
}

impl Catalog {
    pub fn get(&self, id: &str) -> Option<&TemplateDescriptor> {
        self.templates.iter().find(|t| t.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }
}

const CATALOG_JSON: &str = include_str!("catalog.json");

/// The built-in catalog of eight statement templates.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| serde_json::from_str(CATALOG_JSON).expect("embedded catalog is valid"))
}

/// A user's fill-in of one template. Expression and condition slots hold
/// natural text fragments such as `Radius * 2`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TemplateInstance {
    pub template_id: String,
    #[serde(default, deserialize_with = "slot_values")]
    pub slots: BTreeMap<String, String>,
}

impl TemplateInstance {
    pub fn new(template_id: impl Into<String>) -> Self {
        Self {
            template_id: template_id.into(),
            slots: BTreeMap::new(),
        }
    }

    pub fn with(mut self, slot: impl Into<String>, value: impl Into<String>) -> Self {
        self.slots.insert(slot.into(), value.into());
        self
    }
}

/// Slot values are strings; numbers, booleans and null are accepted and
/// converted for the convenience of JSON clients.
fn slot_values<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, String>, D::Error> {
    let raw = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
    raw.into_iter()
        .filter_map(|(k, v)| match v {
            serde_json::Value::Null => None,
            serde_json::Value::String(s) => Some(Ok((k, s))),
            serde_json::Value::Number(n) => Some(Ok((k, n.to_string()))),
            serde_json::Value::Bool(b) => Some(Ok((k, b.to_string()))),
            other => Some(Err(serde::de::Error::custom(format!(
                "slot '{k}' must be a string, found {other}"
            )))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("template instance is invalid: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "))]
pub struct InvalidInstance(pub Vec<Diagnostic>);

/// Checks an instance against its template and against the program context
/// described by `symbols`. An empty result guarantees that the generated
/// sentence compiles in that context.
pub fn validate_instance(inst: &TemplateInstance, symbols: &SymbolTable) -> Vec<Diagnostic> {
    let stmt = match build(inst) {
        Ok(stmt) => stmt,
        Err(diags) => return diags,
    };
    let sentence = realize_statement(&stmt);
    let parsed = parse_source(&sentence);
    if !parsed.diagnostics.is_empty() {
        return parsed.diagnostics;
    }
    analyze_in_context(&parsed.program, symbols.clone()).diagnostics
}

/// Converts a valid instance into its statement.
pub fn instantiate(inst: &TemplateInstance) -> Result<Statement, InvalidInstance> {
    build(inst).map_err(InvalidInstance)
}

/// Validates in context and realizes the sentence(s) for `inst`.
pub fn generate(inst: &TemplateInstance, symbols: &SymbolTable) -> Result<String, Vec<Diagnostic>> {
    let diags = validate_instance(inst, symbols);
    if !diags.is_empty() {
        return Err(diags);
    }
    let stmt = build(inst)?;
    Ok(realize_statement(&stmt))
}

/// Generates in the context of existing program text; declarations in
/// `context` are visible to the redeclaration and use checks.
pub fn generate_in_source(inst: &TemplateInstance, context: &str) -> Result<String, Vec<Diagnostic>> {
    let parsed = parse_source(context);
    let symbols = crate::semantics::analyze_collect(&parsed.program).symbols;
    generate(inst, &symbols)
}

fn slot_error(code: Code, slot: &str, message: String) -> Diagnostic {
    Diagnostic::error(code, SourceSpan::origin(), message).with_name(slot)
}

/// Parsed value of one slot.
enum SlotValue {
    Ident(String),
    Type(TypeTag),
    Expr(Expression),
    Cond(Condition),
    Conds(Vec<Condition>),
    Exprs(Vec<Expression>),
    Int(u32),
    Text(String),
    Flag(bool),
    Choice(String),
}

fn first_message(diags: &[Diagnostic]) -> String {
    diags.first().map_or_else(String::new, |d| d.message.clone())
}

fn non_blank_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

fn parse_literal(text: &str) -> Result<Expression, String> {
    let expr = parse_expression_text(text).map_err(|d| first_message(&d))?;
    if expr.literal_type().is_none() {
        return Err(format!("'{text}' is not a number or quoted string literal"));
    }
    Ok(expr)
}

fn parse_slot(desc: &SlotDescriptor, raw: &str) -> Result<SlotValue, String> {
    let text = raw.trim();
    match desc.kind {
        SlotKind::Identifier => check_identifier(text)
            .map(|_| SlotValue::Ident(text.to_string()))
            .map_err(|d| d.message),
        SlotKind::TypeChoice => TypeTag::from_keyword(text)
            .map(SlotValue::Type)
            .ok_or_else(|| format!("'{text}' is not a type; choose Number or String")),
        SlotKind::Expression => parse_expression_text(text)
            .map(SlotValue::Expr)
            .map_err(|d| first_message(&d)),
        SlotKind::Condition => parse_condition_text(text)
            .map(SlotValue::Cond)
            .map_err(|d| first_message(&d)),
        SlotKind::ConditionList => non_blank_lines(text)
            .map(|l| parse_condition_text(l).map_err(|d| first_message(&d)))
            .collect::<Result<_, _>>()
            .map(SlotValue::Conds),
        SlotKind::Literal => parse_literal(text).map(SlotValue::Expr),
        SlotKind::LiteralList => non_blank_lines(text)
            .map(parse_literal)
            .collect::<Result<_, _>>()
            .map(SlotValue::Exprs),
        SlotKind::Integer => match text.parse::<u32>() {
            Ok(n) if text.bytes().all(|b| b.is_ascii_digit()) && (1..=MAX_ARRAY_SIZE).contains(&n) => {
                Ok(SlotValue::Int(n))
            }
            _ => Err(format!(
                "'{text}' is not a whole number from 1 to {MAX_ARRAY_SIZE}"
            )),
        },
        SlotKind::String => Ok(SlotValue::Text(raw.to_string())),
        SlotKind::Boolean => match text.to_ascii_lowercase().as_str() {
            "true" | "yes" => Ok(SlotValue::Flag(true)),
            "false" | "no" => Ok(SlotValue::Flag(false)),
            _ => Err(format!("'{text}' is not true or false")),
        },
        SlotKind::Choice => {
            let choices = desc.choices.as_deref().unwrap_or_default();
            choices
                .iter()
                .find(|c| c.eq_ignore_ascii_case(text))
                .map(|c| SlotValue::Choice(c.clone()))
                .ok_or_else(|| format!("'{text}' is not one of: {}", choices.join(", ")))
        }
    }
}

/// Slot values after per-slot validation, keyed by slot name.
struct Filled(BTreeMap<String, SlotValue>);

impl Filled {
    fn ident(&self, name: &str) -> Ident {
        match self.0.get(name) {
            Some(SlotValue::Ident(s)) => Ident::new(s, SourceSpan::default()),
            _ => unreachable!("identifier slot '{name}' checked"),
        }
    }

    fn ty(&self, name: &str) -> TypeTag {
        match self.0.get(name) {
            Some(SlotValue::Type(t)) => *t,
            _ => unreachable!("type slot '{name}' checked"),
        }
    }

    fn expr(&self, name: &str) -> Option<Expression> {
        match self.0.get(name) {
            Some(SlotValue::Expr(e)) => Some(e.clone()),
            _ => None,
        }
    }

    fn cond(&self, name: &str) -> Option<Condition> {
        match self.0.get(name) {
            Some(SlotValue::Cond(c)) => Some(c.clone()),
            _ => None,
        }
    }

    fn flag(&self, name: &str) -> bool {
        matches!(self.0.get(name), Some(SlotValue::Flag(true)))
    }

    fn place(&self, target: &str, index: &str) -> Place {
        let array = self.ident(target);
        match self.expr(index) {
            Some(i) => Place::Element {
                index: Box::new(i),
                array,
                span: NodeSpan::default(),
            },
            None => Place::Var(array),
        }
    }
}

fn build(inst: &TemplateInstance) -> Result<Statement, Vec<Diagnostic>> {
    let Some(desc) = catalog().get(&inst.template_id) else {
        return Err(vec![slot_error(
            Code::T002,
            "templateId",
            format!("there is no template called '{}'", inst.template_id),
        )]);
    };
    let mut diags = Vec::new();
    for name in inst.slots.keys() {
        if desc.slot(name).is_none() {
            diags.push(slot_error(
                Code::T002,
                name,
                format!("template '{}' has no slot called '{name}'", desc.id),
            ));
        }
    }
    let mut filled = BTreeMap::new();
    for slot in &desc.slots {
        let raw = inst.slots.get(&slot.name).filter(|v| !v.trim().is_empty());
        match raw {
            None if slot.required => diags.push(slot_error(
                Code::T001,
                &slot.name,
                format!("'{}' must be filled in", slot.label),
            )),
            None => {}
            Some(raw) => match parse_slot(slot, raw) {
                Ok(v) => {
                    filled.insert(slot.name.clone(), v);
                }
                Err(message) => diags.push(slot_error(
                    Code::T002,
                    &slot.name,
                    format!("'{}': {message}", slot.label),
                )),
            },
        }
    }
    if desc.id == "repeat" {
        if let Some(SlotValue::Choice(mode)) = filled.get("mode") {
            let needed = if mode == "while" { "condition" } else { "count" };
            if !inst.slots.get(needed).is_some_and(|v| !v.trim().is_empty()) {
                let label = &desc.slot(needed).expect("repeat slots").label;
                diags.push(slot_error(
                    Code::T001,
                    needed,
                    format!("'{label}' must be filled in when repeating {mode}"),
                ));
            }
        }
    }
    if desc.id == "select" && matches!(filled.get("cases"), Some(SlotValue::Exprs(v)) if v.is_empty())
    {
        diags.push(slot_error(
            Code::T001,
            "cases",
            "at least one case value is needed".to_string(),
        ));
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let filled = Filled(filled);
    let span = NodeSpan::default();
    let stmt = match desc.id.as_str() {
        "declare-variable" => Statement::DeclareVariable {
            name: filled.ident("name"),
            ty: filled.ty("type"),
            initial: filled.expr("initial"),
            span,
        },
        "declare-array" => Statement::DeclareArray {
            name: filled.ident("name"),
            element: filled.ty("type"),
            size: match filled.0.get("size") {
                Some(SlotValue::Int(n)) => *n,
                _ => unreachable!("size checked"),
            },
            span,
        },
        "assignment" => Statement::Assign {
            target: filled.place("target", "index"),
            value: filled.expr("value").expect("value checked"),
            span,
        },
        "display" => Statement::Display {
            value: filled.expr("value").expect("value checked"),
            span,
        },
        "read" => Statement::Read {
            target: filled.place("target", "index"),
            prompt: match filled.0.get("prompt") {
                Some(SlotValue::Text(t)) => Some(t.clone()),
                _ => None,
            },
            span,
        },
        "if" => {
            let mut arms = vec![IfArm {
                condition: filled.cond("condition").expect("condition checked"),
                body: Vec::new(),
            }];
            if let Some(SlotValue::Conds(more)) = filled.0.get("otherwise-if") {
                arms.extend(more.iter().map(|c| IfArm {
                    condition: c.clone(),
                    body: Vec::new(),
                }));
            }
            Statement::If {
                arms,
                otherwise: filled.flag("include-otherwise").then(Vec::new),
                span,
            }
        }
        "repeat" => match filled.0.get("mode") {
            Some(SlotValue::Choice(m)) if m == "while" => Statement::RepeatWhile {
                condition: filled.cond("condition").expect("condition checked"),
                body: Vec::new(),
                span,
            },
            _ => Statement::RepeatTimes {
                count: filled.expr("count").expect("count checked"),
                body: Vec::new(),
                span,
            },
        },
        "select" => Statement::Select {
            scrutinee: filled.expr("scrutinee").expect("scrutinee checked"),
            cases: match filled.0.get("cases") {
                Some(SlotValue::Exprs(labels)) => labels
                    .iter()
                    .map(|l| SelectCase {
                        label: l.clone(),
                        body: Vec::new(),
                    })
                    .collect(),
                _ => unreachable!("cases checked"),
            },
            other: filled.flag("include-other").then(Vec::new),
            span,
        },
        other => unreachable!("catalog template '{other}' has no builder"),
    };
    Ok(stmt)
}
