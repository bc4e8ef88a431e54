//! Template-filling natural language generation.
//!
//! Each statement form has a sentence pattern made of fixed words and
//! `{slot}` interpolation points. Text inside `[...]` is an optional clause,
//! emitted only when every slot it mentions has a value. Swapping the
//! [`PatternTable`] changes the surface wording without touching the rest of
//! the pipeline; only English ships.
//!
//! The realizer is also the canonical pretty-printer: realizing a parsed
//! program and parsing the result yields an equal tree.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ast::{Condition, Expression, LogicOp, Place, Program, RelOp, Statement};
use crate::token::escape_string;

const INDENT: &str = "    ";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternTable {
    pub language: String,
    pub declare_variable: String,
    pub declare_array: String,
    pub assignment: String,
    pub display: String,
    pub read: String,
    pub if_head: String,
    pub otherwise_if_head: String,
    pub otherwise_head: String,
    pub if_end: String,
    pub repeat_while_head: String,
    pub repeat_times_head: String,
    pub repeat_end: String,
    pub select_head: String,
    pub select_case: String,
    pub select_other: String,
    pub select_end: String,
    pub element: String,
    pub comparison: String,
    pub greater: String,
    pub smaller: String,
    pub greater_or_equal: String,
    pub smaller_or_equal: String,
    pub equal: String,
    pub not_equal: String,
    pub and: String,
    pub or: String,
}

impl PatternTable {
    pub fn english() -> Self {
        let s = |x: &str| x.to_string();
        Self {
            language: s("en"),
            declare_variable: s(
                "Declare a variable called {name} of type {type}[ with initial value {initial}].",
            ),
            declare_array: s("Declare an array called {name} of type {type} with size {size}."),
            assignment: s("Set {target} to {value}."),
            display: s("Display {value} on the screen."),
            read: s("Read {target} from the keyboard[ with prompt {prompt}]."),
            if_head: s("If {condition} then"),
            otherwise_if_head: s("Otherwise if {condition} then"),
            otherwise_head: s("Otherwise"),
            if_end: s("End of condition."),
            repeat_while_head: s("Repeat while {condition}"),
            repeat_times_head: s("Repeat {count} times"),
            repeat_end: s("End of repeat."),
            select_head: s("Select on {scrutinee}"),
            select_case: s("When {label} then"),
            select_other: s("When other then"),
            select_end: s("End of select."),
            element: s("element {index} of {array}"),
            comparison: s("{left} {relop} {right}"),
            greater: s("is Greater than"),
            smaller: s("is Smaller than"),
            greater_or_equal: s("is Greater or Equal to"),
            smaller_or_equal: s("is Smaller or Equal to"),
            equal: s("is Equal to"),
            not_equal: s("is Not Equal to"),
            and: s("And"),
            or: s("Or"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pattern table serializes")
    }

    fn relop(&self, op: RelOp) -> &str {
        match op {
            RelOp::Greater => &self.greater,
            RelOp::Smaller => &self.smaller,
            RelOp::GreaterOrEqual => &self.greater_or_equal,
            RelOp::SmallerOrEqual => &self.smaller_or_equal,
            RelOp::Equal => &self.equal,
            RelOp::NotEqual => &self.not_equal,
        }
    }
}

impl Default for PatternTable {
    fn default() -> Self {
        Self::english()
    }
}

/// Fills `pattern` with slot values. Optional clauses whose slots are absent
/// are dropped; an unknown slot inside a mandatory part renders empty.
pub fn fill(pattern: &str, slots: &HashMap<&str, String>) -> String {
    fn run(chars: &[char], slots: &HashMap<&str, String>, out: &mut String) -> bool {
        let mut complete = true;
        let mut i = 0;
        while i < chars.len() {
            match chars[i] {
                '{' => {
                    let end = chars[i..]
                        .iter()
                        .position(|&c| c == '}')
                        .map_or(chars.len(), |p| i + p);
                    let name: String = chars[i + 1..end].iter().collect();
                    match slots.get(name.as_str()) {
                        Some(v) => out.push_str(v),
                        None => complete = false,
                    }
                    i = end + 1;
                }
                '[' => {
                    let mut depth = 0;
                    let mut end = i;
                    while end < chars.len() {
                        match chars[end] {
                            '[' => depth += 1,
                            ']' => {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                            }
                            _ => {}
                        }
                        end += 1;
                    }
                    let mut clause = String::new();
                    if run(&chars[i + 1..end.min(chars.len())], slots, &mut clause) {
                        out.push_str(&clause);
                    }
                    i = end + 1;
                }
                c => {
                    out.push(c);
                    i += 1;
                }
            }
        }
        complete
    }
    let chars: Vec<char> = pattern.chars().collect();
    let mut out = String::new();
    run(&chars, slots, &mut out);
    out
}

/// Shortest decimal text that reads back as the same double; integral values
/// have no decimal point and negative zero renders as `0`.
pub fn render_number(value: f64) -> String {
    if value == 0.0 {
        "0".to_string()
    } else {
        format!("{value}")
    }
}

pub fn realize_statement(stmt: &Statement) -> String {
    Realizer::new(&PatternTable::english()).statement(stmt)
}

/// One statement per line, each followed by a newline.
pub fn realize_program(program: &Program) -> String {
    Realizer::new(&PatternTable::english()).program(program)
}

pub fn realize_expression(expr: &Expression) -> String {
    Realizer::new(&PatternTable::english()).expression(expr)
}

pub fn realize_condition(cond: &Condition) -> String {
    Realizer::new(&PatternTable::english()).condition(cond)
}

pub struct Realizer<'p> {
    table: &'p PatternTable,
}

impl<'p> Realizer<'p> {
    pub fn new(table: &'p PatternTable) -> Self {
        Self { table }
    }

    pub fn program(&self, program: &Program) -> String {
        let mut out = String::new();
        for stmt in &program.statements {
            self.write_statement(stmt, 0, &mut out);
        }
        out
    }

    /// Sentences for one statement, without a trailing newline.
    pub fn statement(&self, stmt: &Statement) -> String {
        let mut out = String::new();
        self.write_statement(stmt, 0, &mut out);
        out.pop();
        out
    }

    fn line(&self, depth: usize, text: &str, out: &mut String) {
        for _ in 0..depth {
            out.push_str(INDENT);
        }
        out.push_str(text);
        out.push('\n');
    }

    fn body(&self, stmts: &[Statement], depth: usize, out: &mut String) {
        for s in stmts {
            self.write_statement(s, depth, out);
        }
    }

    fn write_statement(&self, stmt: &Statement, depth: usize, out: &mut String) {
        let t = self.table;
        let mut slots = HashMap::new();
        match stmt {
            Statement::DeclareVariable {
                name, ty, initial, ..
            } => {
                slots.insert("name", name.name.clone());
                slots.insert("type", ty.name().to_string());
                if let Some(init) = initial {
                    slots.insert("initial", self.expression(init));
                }
                self.line(depth, &fill(&t.declare_variable, &slots), out);
            }
            Statement::DeclareArray {
                name,
                element,
                size,
                ..
            } => {
                slots.insert("name", name.name.clone());
                slots.insert("type", element.name().to_string());
                slots.insert("size", size.to_string());
                self.line(depth, &fill(&t.declare_array, &slots), out);
            }
            Statement::Assign { target, value, .. } => {
                slots.insert("target", self.place(target));
                slots.insert("value", self.expression(value));
                self.line(depth, &fill(&t.assignment, &slots), out);
            }
            Statement::Display { value, .. } => {
                slots.insert("value", self.expression(value));
                self.line(depth, &fill(&t.display, &slots), out);
            }
            Statement::Read { target, prompt, .. } => {
                slots.insert("target", self.place(target));
                if let Some(p) = prompt {
                    slots.insert("prompt", escape_string(p));
                }
                self.line(depth, &fill(&t.read, &slots), out);
            }
            Statement::If {
                arms, otherwise, ..
            } => {
                for (i, arm) in arms.iter().enumerate() {
                    let head = if i == 0 {
                        &t.if_head
                    } else {
                        &t.otherwise_if_head
                    };
                    slots.insert("condition", self.condition(&arm.condition));
                    self.line(depth, &fill(head, &slots), out);
                    self.body(&arm.body, depth + 1, out);
                }
                if let Some(body) = otherwise {
                    self.line(depth, &t.otherwise_head, out);
                    self.body(body, depth + 1, out);
                }
                self.line(depth, &t.if_end, out);
            }
            Statement::RepeatWhile {
                condition, body, ..
            } => {
                slots.insert("condition", self.condition(condition));
                self.line(depth, &fill(&t.repeat_while_head, &slots), out);
                self.body(body, depth + 1, out);
                self.line(depth, &t.repeat_end, out);
            }
            Statement::RepeatTimes { count, body, .. } => {
                slots.insert("count", self.expression(count));
                self.line(depth, &fill(&t.repeat_times_head, &slots), out);
                self.body(body, depth + 1, out);
                self.line(depth, &t.repeat_end, out);
            }
            Statement::Select {
                scrutinee,
                cases,
                other,
                ..
            } => {
                slots.insert("scrutinee", self.expression(scrutinee));
                self.line(depth, &fill(&t.select_head, &slots), out);
                for case in cases {
                    slots.insert("label", self.expression(&case.label));
                    self.line(depth + 1, &fill(&t.select_case, &slots), out);
                    self.body(&case.body, depth + 2, out);
                }
                if let Some(body) = other {
                    self.line(depth + 1, &t.select_other, out);
                    self.body(body, depth + 2, out);
                }
                self.line(depth, &t.select_end, out);
            }
        }
    }

    pub fn place(&self, place: &Place) -> String {
        match place {
            Place::Var(id) => id.name.clone(),
            Place::Element { index, array, .. } => {
                let slots = HashMap::from([
                    ("index", self.expression(index)),
                    ("array", array.name.clone()),
                ]);
                fill(&self.table.element, &slots)
            }
        }
    }

    pub fn expression(&self, expr: &Expression) -> String {
        let mut out = String::new();
        self.write_expr(expr, &mut out);
        out
    }

    fn write_expr(&self, expr: &Expression, out: &mut String) {
        match expr {
            Expression::Number { value, .. } => out.push_str(&render_number(*value)),
            Expression::Text { value, .. } => out.push_str(&escape_string(value)),
            Expression::Place(p) => out.push_str(&self.place(p)),
            Expression::Neg { operand, .. } => {
                out.push('-');
                self.write_operand(operand, expr_precedence(operand) < ATOM, out);
            }
            Expression::Binary {
                op, left, right, ..
            } => {
                let prec = op.precedence();
                self.write_operand(left, expr_precedence(left) < prec, out);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                self.write_operand(right, expr_precedence(right) <= prec, out);
            }
        }
    }

    fn write_operand(&self, expr: &Expression, parens: bool, out: &mut String) {
        if parens {
            out.push('(');
        }
        self.write_expr(expr, out);
        if parens {
            out.push(')');
        }
    }

    pub fn condition(&self, cond: &Condition) -> String {
        match cond {
            Condition::Compare {
                op, left, right, ..
            } => {
                let slots = HashMap::from([
                    ("left", self.expression(left)),
                    ("relop", self.table.relop(*op).to_string()),
                    ("right", self.expression(right)),
                ]);
                fill(&self.table.comparison, &slots)
            }
            Condition::Logical {
                op, left, right, ..
            } => {
                let prec = logic_precedence(*op);
                let wrap = |c: &Condition, parens: bool| {
                    let text = self.condition(c);
                    if parens {
                        format!("({text})")
                    } else {
                        text
                    }
                };
                let connective = match op {
                    LogicOp::And => &self.table.and,
                    LogicOp::Or => &self.table.or,
                };
                format!(
                    "{} {connective} {}",
                    wrap(left, condition_precedence(left) < prec),
                    wrap(right, condition_precedence(right) <= prec)
                )
            }
        }
    }
}

const ATOM: u8 = 10;

fn expr_precedence(expr: &Expression) -> u8 {
    match expr {
        Expression::Binary { op, .. } => op.precedence(),
        Expression::Neg { .. } => ATOM - 1,
        _ => ATOM,
    }
}

fn logic_precedence(op: LogicOp) -> u8 {
    match op {
        LogicOp::Or => 1,
        LogicOp::And => 2,
    }
}

fn condition_precedence(cond: &Condition) -> u8 {
    match cond {
        Condition::Logical { op, .. } => logic_precedence(*op),
        Condition::Compare { .. } => ATOM,
    }
}
