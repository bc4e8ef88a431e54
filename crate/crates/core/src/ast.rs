//! Syntax tree for natural-language programs.
//!
//! Every node carries a [`NodeSpan`]. Node spans never take part in
//! equality, so a tree built from a template instance compares equal to the
//! tree parsed back from its realized text.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

/// Span attached to a syntax node. All node spans compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct NodeSpan(pub SourceSpan);

impl PartialEq for NodeSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl From<SourceSpan> for NodeSpan {
    fn from(span: SourceSpan) -> Self {
        NodeSpan(span)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    Number,
    String,
}

impl TypeTag {
    pub fn name(self) -> &'static str {
        match self {
            TypeTag::Number => "Number",
            TypeTag::String => "String",
        }
    }

    /// Case-insensitive lookup of a type keyword.
    pub fn from_keyword(word: &str) -> Option<Self> {
        if word.eq_ignore_ascii_case("number") {
            Some(TypeTag::Number)
        } else if word.eq_ignore_ascii_case("string") {
            Some(TypeTag::String)
        } else {
            None
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An identifier as spelled in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: NodeSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: impl Into<NodeSpan>) -> Self {
        Self {
            name: name.into(),
            span: span.into(),
        }
    }

    /// Lookup key: identifiers are compared case-insensitively.
    pub fn key(&self) -> String {
        self.name.to_lowercase()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Concat,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Concat => "&",
        }
    }

    /// Binding strength; higher binds tighter. All operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Concat => 1,
            BinaryOp::Add | BinaryOp::Sub => 2,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 3,
        }
    }

    pub const ARITHMETIC: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Greater,
    Smaller,
    GreaterOrEqual,
    SmallerOrEqual,
    Equal,
    NotEqual,
}

impl RelOp {
    pub const ALL: [RelOp; 6] = [
        RelOp::Greater,
        RelOp::Smaller,
        RelOp::GreaterOrEqual,
        RelOp::SmallerOrEqual,
        RelOp::Equal,
        RelOp::NotEqual,
    ];

    /// Ordering comparisons are defined on Numbers only.
    pub fn is_ordering(self) -> bool {
        !matches!(self, RelOp::Equal | RelOp::NotEqual)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicOp {
    And,
    Or,
}

/// An assignable location: a variable or a 1-based array element.
#[derive(Debug, Clone, PartialEq)]
pub enum Place {
    Var(Ident),
    Element {
        index: Box<Expression>,
        array: Ident,
        span: NodeSpan,
    },
}

impl Place {
    pub fn name(&self) -> &Ident {
        match self {
            Place::Var(id) => id,
            Place::Element { array, .. } => array,
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            Place::Var(id) => id.span.0,
            Place::Element { span, .. } => span.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    /// Literal values are never negative; `-5` parses as a negation.
    Number { value: f64, span: NodeSpan },
    Text { value: String, span: NodeSpan },
    Place(Place),
    Neg { operand: Box<Expression>, span: NodeSpan },
    Binary {
        op: BinaryOp,
        left: Box<Expression>,
        right: Box<Expression>,
        span: NodeSpan,
    },
}

impl Expression {
    pub fn number(value: f64) -> Self {
        Expression::Number {
            value,
            span: NodeSpan::default(),
        }
    }

    pub fn text(value: impl Into<String>) -> Self {
        Expression::Text {
            value: value.into(),
            span: NodeSpan::default(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expression::Place(Place::Var(Ident::new(name, SourceSpan::default())))
    }

    pub fn element(index: Expression, array: impl Into<String>) -> Self {
        Expression::Place(Place::Element {
            index: Box::new(index),
            array: Ident::new(array, SourceSpan::default()),
            span: NodeSpan::default(),
        })
    }

    pub fn negate(operand: Expression) -> Self {
        Expression::Neg {
            operand: Box::new(operand),
            span: NodeSpan::default(),
        }
    }

    pub fn binary(op: BinaryOp, left: Expression, right: Expression) -> Self {
        Expression::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
            span: NodeSpan::default(),
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            Expression::Number { span, .. }
            | Expression::Text { span, .. }
            | Expression::Neg { span, .. }
            | Expression::Binary { span, .. } => span.0,
            Expression::Place(place) => place.span(),
        }
    }

    /// Overwrites the outermost node span (used to include parentheses).
    pub(crate) fn set_span(&mut self, new: SourceSpan) {
        match self {
            Expression::Number { span, .. }
            | Expression::Text { span, .. }
            | Expression::Neg { span, .. }
            | Expression::Binary { span, .. } => span.0 = new,
            Expression::Place(Place::Element { span, .. }) => span.0 = new,
            Expression::Place(Place::Var(id)) => id.span.0 = new,
        }
    }

    /// Number or string literal, optionally a negated number. These are the
    /// only forms accepted as Select case labels.
    pub fn literal_type(&self) -> Option<TypeTag> {
        match self {
            Expression::Number { .. } => Some(TypeTag::Number),
            Expression::Text { .. } => Some(TypeTag::String),
            Expression::Neg { operand, .. } => match **operand {
                Expression::Number { .. } => Some(TypeTag::Number),
                _ => None,
            },
            _ => None,
        }
    }
}

/// A guard: comparisons joined by And/Or. Conditions have no value type and
/// appear only in If, Otherwise-if and Repeat-while headers.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Compare {
        op: RelOp,
        left: Expression,
        right: Expression,
        span: NodeSpan,
    },
    Logical {
        op: LogicOp,
        left: Box<Condition>,
        right: Box<Condition>,
        span: NodeSpan,
    },
}

impl Condition {
    pub fn compare(op: RelOp, left: Expression, right: Expression) -> Self {
        Condition::Compare {
            op,
            left,
            right,
            span: NodeSpan::default(),
        }
    }

    pub fn logical(op: LogicOp, left: Condition, right: Condition) -> Self {
        Condition::Logical {
            op,
            left: Box::new(left),
            right: Box::new(right),
            span: NodeSpan::default(),
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            Condition::Compare { span, .. } | Condition::Logical { span, .. } => span.0,
        }
    }

    pub(crate) fn set_span(&mut self, new: SourceSpan) {
        match self {
            Condition::Compare { span, .. } | Condition::Logical { span, .. } => span.0 = new,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfArm {
    pub condition: Condition,
    pub body: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectCase {
    /// Checked to be a literal during analysis.
    pub label: Expression,
    pub body: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    DeclareVariable {
        name: Ident,
        ty: TypeTag,
        initial: Option<Expression>,
        span: NodeSpan,
    },
    DeclareArray {
        name: Ident,
        element: TypeTag,
        size: u32,
        span: NodeSpan,
    },
    Assign {
        target: Place,
        value: Expression,
        span: NodeSpan,
    },
    Display {
        value: Expression,
        span: NodeSpan,
    },
    Read {
        target: Place,
        prompt: Option<String>,
        span: NodeSpan,
    },
    If {
        arms: Vec<IfArm>,
        otherwise: Option<Vec<Statement>>,
        span: NodeSpan,
    },
    RepeatWhile {
        condition: Condition,
        body: Vec<Statement>,
        span: NodeSpan,
    },
    RepeatTimes {
        count: Expression,
        body: Vec<Statement>,
        span: NodeSpan,
    },
    Select {
        scrutinee: Expression,
        cases: Vec<SelectCase>,
        other: Option<Vec<Statement>>,
        span: NodeSpan,
    },
}

impl Statement {
    pub fn span(&self) -> SourceSpan {
        match self {
            Statement::DeclareVariable { span, .. }
            | Statement::DeclareArray { span, .. }
            | Statement::Assign { span, .. }
            | Statement::Display { span, .. }
            | Statement::Read { span, .. }
            | Statement::If { span, .. }
            | Statement::RepeatWhile { span, .. }
            | Statement::RepeatTimes { span, .. }
            | Statement::Select { span, .. } => span.0,
        }
    }

    /// Short name of the statement form, as used by template ids.
    pub fn form(&self) -> &'static str {
        match self {
            Statement::DeclareVariable { .. } => "declare-variable",
            Statement::DeclareArray { .. } => "declare-array",
            Statement::Assign { .. } => "assignment",
            Statement::Display { .. } => "display",
            Statement::Read { .. } => "read",
            Statement::If { .. } => "if",
            Statement::RepeatWhile { .. } | Statement::RepeatTimes { .. } => "repeat",
            Statement::Select { .. } => "select",
        }
    }

    pub fn is_declaration(&self) -> bool {
        matches!(
            self,
            Statement::DeclareVariable { .. } | Statement::DeclareArray { .. }
        )
    }

    /// Nested statement lists, in source order.
    pub fn bodies(&self) -> Vec<&[Statement]> {
        match self {
            Statement::If { arms, otherwise, .. } => arms
                .iter()
                .map(|a| a.body.as_slice())
                .chain(otherwise.as_deref())
                .collect(),
            Statement::RepeatWhile { body, .. } | Statement::RepeatTimes { body, .. } => {
                vec![body.as_slice()]
            }
            Statement::Select { cases, other, .. } => cases
                .iter()
                .map(|c| c.body.as_slice())
                .chain(other.as_deref())
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// Globals followed by instructions, in written order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Program {
    pub statements: Vec<Statement>,
}

impl Program {
    pub fn new(statements: Vec<Statement>) -> Self {
        Self { statements }
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}
