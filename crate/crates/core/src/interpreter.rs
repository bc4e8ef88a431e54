//! Tree-walking interpreter.
//!
//! Runs a [`CheckedProgram`] against an input provider and collects the
//! displayed lines. Every executed statement, every evaluated expression or
//! condition node and every loop iteration costs one step; a run that goes
//! over its step limit stops with R105.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::ast::{BinaryOp, Condition, Expression, LogicOp, Place, RelOp, Statement, TypeTag};
use crate::diagnostic::{Code, Diagnostic};
use crate::nlg::render_number;
use crate::semantics::{CheckedProgram, SymbolTable, SymbolType};
use crate::span::SourceSpan;

pub const DEFAULT_STEP_LIMIT: u64 = 10_000_000;

/// Building text or arrays costs one extra step per this many bytes or
/// elements, so the step limit also bounds memory.
pub const UNITS_PER_STEP: u64 = 16;

/// A runtime value. Numbers are always finite.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    pub fn default_for(ty: TypeTag) -> Self {
        match ty {
            TypeTag::Number => Value::Number(0.0),
            TypeTag::String => Value::Text(String::new()),
        }
    }

    /// Text shown by Display and used by `&`.
    pub fn render(&self) -> String {
        match self {
            Value::Number(n) => render_number(*n),
            Value::Text(s) => s.clone(),
        }
    }

    fn as_number(&self) -> f64 {
        match self {
            Value::Number(n) => *n,
            Value::Text(_) => unreachable!("analysis guarantees a Number here"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Variable and array storage, keyed by case-folded name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Environment {
    scalars: HashMap<String, Value>,
    arrays: HashMap<String, Vec<Value>>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every symbol set to its type's default (Number 0, String empty).
    pub fn with_defaults(symbols: &SymbolTable) -> Self {
        let mut env = Self::new();
        for sym in symbols.iter() {
            env.declare(&sym.name, sym.ty);
        }
        env
    }

    /// (Re)initializes a symbol to its defaults.
    pub fn declare(&mut self, name: &str, ty: SymbolType) {
        let key = name.to_lowercase();
        match ty {
            SymbolType::Scalar(t) => {
                self.scalars.insert(key, Value::default_for(t));
            }
            SymbolType::Array { element, size } => {
                self.arrays
                    .insert(key, vec![Value::default_for(element); size as usize]);
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.scalars.get(&name.to_lowercase())
    }

    pub fn set(&mut self, name: &str, value: Value) {
        self.scalars.insert(name.to_lowercase(), value);
    }

    pub fn array(&self, name: &str) -> Option<&[Value]> {
        self.arrays.get(&name.to_lowercase()).map(Vec::as_slice)
    }

    fn array_mut(&mut self, name: &str) -> Option<&mut Vec<Value>> {
        self.arrays.get_mut(&name.to_lowercase())
    }
}

/// Source of text answers for Read statements.
pub trait InputProvider {
    /// Next input line, or `None` when the input is exhausted.
    fn next_input(&mut self, prompt: Option<&str>) -> Option<String>;
}

/// Inputs fixed in advance, consumed in order.
#[derive(Debug, Clone, Default)]
pub struct ScriptedInput {
    lines: VecDeque<String>,
}

impl ScriptedInput {
    pub fn new<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            lines: lines.into_iter().map(Into::into).collect(),
        }
    }
}

impl InputProvider for ScriptedInput {
    fn next_input(&mut self, _prompt: Option<&str>) -> Option<String> {
        self.lines.pop_front()
    }
}

/// Receives displayed lines as they are produced.
pub trait OutputSink {
    fn write_line(&mut self, line: &str);
}

impl OutputSink for Vec<String> {
    fn write_line(&mut self, line: &str) {
        self.push(line.to_string());
    }
}

struct NullSink;

impl OutputSink for NullSink {
    fn write_line(&mut self, _: &str) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Displayed lines, including those before a runtime error.
    pub outputs: Vec<String>,
    pub runtime_error: Option<Diagnostic>,
    pub steps_used: u64,
}

impl RunResult {
    pub fn is_ok(&self) -> bool {
        self.runtime_error.is_none()
    }
}

pub fn run(program: &CheckedProgram, inputs: &mut dyn InputProvider, step_limit: u64) -> RunResult {
    run_with_sink(program, inputs, step_limit, &mut NullSink)
}

/// Like [`run`], additionally streaming each displayed line to `sink`.
pub fn run_with_sink(
    program: &CheckedProgram,
    inputs: &mut dyn InputProvider,
    step_limit: u64,
    sink: &mut dyn OutputSink,
) -> RunResult {
    let mut machine = Machine {
        env: Environment::with_defaults(program.symbols()),
        steps: Steps::new(step_limit),
        symbols: program.symbols(),
        inputs,
        sink,
        outputs: Vec::new(),
    };
    let result = machine.block(&program.program().statements);
    RunResult {
        outputs: machine.outputs,
        runtime_error: result.err(),
        steps_used: machine.steps.used,
    }
}

/// Evaluates one expression without a step limit.
pub fn eval_expression(expr: &Expression, env: &Environment) -> Result<Value, Diagnostic> {
    eval(expr, env, &mut Steps::new(u64::MAX))
}

fn runtime(code: Code, span: SourceSpan, message: impl Into<String>) -> Diagnostic {
    Diagnostic::error(code, span, message)
}

struct Steps {
    used: u64,
    limit: u64,
}

impl Steps {
    fn new(limit: u64) -> Self {
        Self { used: 0, limit }
    }

    fn tick(&mut self, span: SourceSpan) -> Result<(), Diagnostic> {
        self.used += 1;
        if self.used > self.limit {
            return Err(runtime(
                Code::R105,
                span,
                format!("step limit of {} exceeded", self.limit),
            ));
        }
        Ok(())
    }

    fn charge(&mut self, units: usize, span: SourceSpan) -> Result<(), Diagnostic> {
        self.used = self.used.saturating_add(units as u64 / UNITS_PER_STEP);
        if self.used > self.limit {
            self.used = self.used.min(self.limit);
            return self.tick(span);
        }
        Ok(())
    }
}

/// Parses keyboard text as a Number: optional sign, digits, optional
/// fraction. Surrounding whitespace is ignored.
pub fn parse_number_input(text: &str) -> Option<f64> {
    let t = text.trim();
    let unsigned = t.strip_prefix(['-', '+']).unwrap_or(t);
    let (int, frac) = match unsigned.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (unsigned, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn check_finite(value: f64, span: SourceSpan) -> Result<Value, Diagnostic> {
    if value.is_finite() {
        Ok(Value::Number(value))
    } else {
        Err(runtime(Code::R101, span, "arithmetic result is too large to represent"))
    }
}

fn element_slot(index: f64, len: usize, name: &str, span: SourceSpan) -> Result<usize, Diagnostic> {
    if index.fract() != 0.0 || index < 1.0 || index > len as f64 {
        return Err(runtime(
            Code::R102,
            span,
            format!(
                "element {} of '{name}' does not exist; valid elements are 1 to {len}",
                render_number(index)
            ),
        ));
    }
    Ok(index as usize - 1)
}

fn eval(expr: &Expression, env: &Environment, steps: &mut Steps) -> Result<Value, Diagnostic> {
    steps.tick(expr.span())?;
    match expr {
        Expression::Number { value, .. } => Ok(Value::Number(*value)),
        Expression::Text { value, .. } => Ok(Value::Text(value.clone())),
        Expression::Place(Place::Var(id)) => Ok(env
            .get(&id.name)
            .cloned()
            .expect("analysis guarantees declared scalars")),
        Expression::Place(Place::Element { index, array, span }) => {
            let i = eval(index, env, steps)?.as_number();
            let values = env
                .array(&array.name)
                .expect("analysis guarantees declared arrays");
            let slot = element_slot(i, values.len(), &array.name, span.0)?;
            Ok(values[slot].clone())
        }
        Expression::Neg { operand, span } => {
            let v = eval(operand, env, steps)?.as_number();
            check_finite(-v, span.0)
        }
        Expression::Binary {
            op,
            left,
            right,
            span,
        } => {
            let l = eval(left, env, steps)?;
            let r = eval(right, env, steps)?;
            if *op == BinaryOp::Concat {
                let (l, r) = (l.render(), r.render());
                steps.charge(l.len() + r.len(), span.0)?;
                return Ok(Value::Text(l + &r));
            }
            let (a, b) = (l.as_number(), r.as_number());
            let result = match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div | BinaryOp::Rem if b == 0.0 => {
                    return Err(runtime(Code::R101, span.0, "division by zero"));
                }
                BinaryOp::Div => a / b,
                BinaryOp::Rem => a % b,
                BinaryOp::Concat => unreachable!(),
            };
            check_finite(result, span.0)
        }
    }
}

fn eval_condition(cond: &Condition, env: &Environment, steps: &mut Steps) -> Result<bool, Diagnostic> {
    steps.tick(cond.span())?;
    match cond {
        Condition::Compare {
            op, left, right, ..
        } => {
            let l = eval(left, env, steps)?;
            let r = eval(right, env, steps)?;
            Ok(match op {
                RelOp::Equal => l == r,
                RelOp::NotEqual => l != r,
                RelOp::Greater => l.as_number() > r.as_number(),
                RelOp::Smaller => l.as_number() < r.as_number(),
                RelOp::GreaterOrEqual => l.as_number() >= r.as_number(),
                RelOp::SmallerOrEqual => l.as_number() <= r.as_number(),
            })
        }
        Condition::Logical {
            op, left, right, ..
        } => {
            let l = eval_condition(left, env, steps)?;
            match (op, l) {
                (LogicOp::And, false) => Ok(false),
                (LogicOp::Or, true) => Ok(true),
                _ => eval_condition(right, env, steps),
            }
        }
    }
}

struct Machine<'a> {
    env: Environment,
    steps: Steps,
    symbols: &'a SymbolTable,
    inputs: &'a mut dyn InputProvider,
    sink: &'a mut dyn OutputSink,
    outputs: Vec<String>,
}

impl Machine<'_> {
    fn block(&mut self, stmts: &[Statement]) -> Result<(), Diagnostic> {
        stmts.iter().try_for_each(|s| self.statement(s))
    }

    fn eval(&mut self, expr: &Expression) -> Result<Value, Diagnostic> {
        eval(expr, &self.env, &mut self.steps)
    }

    fn condition(&mut self, cond: &Condition) -> Result<bool, Diagnostic> {
        eval_condition(cond, &self.env, &mut self.steps)
    }

    /// Evaluates the index of an element place before anything else.
    fn resolve_place(&mut self, place: &Place) -> Result<Option<f64>, Diagnostic> {
        match place {
            Place::Var(_) => Ok(None),
            Place::Element { index, .. } => Ok(Some(self.eval(index)?.as_number())),
        }
    }

    fn store(&mut self, place: &Place, index: Option<f64>, value: Value) -> Result<(), Diagnostic> {
        match (place, index) {
            (Place::Element { array, span, .. }, Some(i)) => {
                let values = self
                    .env
                    .array_mut(&array.name)
                    .expect("analysis guarantees declared arrays");
                let slot = element_slot(i, values.len(), &array.name, span.0)?;
                values[slot] = value;
            }
            (place, _) => self.env.set(&place.name().name, value),
        }
        Ok(())
    }

    fn statement(&mut self, stmt: &Statement) -> Result<(), Diagnostic> {
        self.steps.tick(stmt.span())?;
        match stmt {
            Statement::DeclareVariable {
                name, ty, initial, ..
            } => {
                let value = match initial {
                    Some(e) => self.eval(e)?,
                    None => Value::default_for(*ty),
                };
                self.env.set(&name.name, value);
            }
            Statement::DeclareArray {
                name,
                element,
                size,
                span,
            } => {
                self.steps.charge(*size as usize, span.0)?;
                self.env.declare(
                    &name.name,
                    SymbolType::Array {
                        element: *element,
                        size: *size,
                    },
                );
            }
            Statement::Assign { target, value, .. } => {
                let index = self.resolve_place(target)?;
                let value = self.eval(value)?;
                self.store(target, index, value)?;
            }
            Statement::Display { value, .. } => {
                let line = self.eval(value)?.render();
                self.sink.write_line(&line);
                self.outputs.push(line);
            }
            Statement::Read {
                target,
                prompt,
                span,
            } => {
                let index = self.resolve_place(target)?;
                let name = &target.name().name;
                let Some(text) = self.inputs.next_input(prompt.as_deref()) else {
                    return Err(runtime(
                        Code::R103,
                        span.0,
                        format!("no input left to read into '{name}'"),
                    ));
                };
                let ty = self
                    .symbols
                    .lookup(name)
                    .expect("analysis guarantees declared targets")
                    .ty
                    .element_type();
                let value = match ty {
                    TypeTag::String => Value::Text(text),
                    TypeTag::Number => match parse_number_input(&text) {
                        Some(n) => Value::Number(n),
                        None => {
                            return Err(runtime(
                                Code::R103,
                                span.0,
                                format!("'{}' is not a number (reading into '{name}')", text.trim()),
                            ))
                        }
                    },
                };
                self.store(target, index, value)?;
            }
            Statement::If {
                arms, otherwise, ..
            } => {
                for arm in arms {
                    if self.condition(&arm.condition)? {
                        return self.block(&arm.body);
                    }
                }
                if let Some(body) = otherwise {
                    self.block(body)?;
                }
            }
            Statement::RepeatWhile {
                condition,
                body,
                span,
            } => {
                while self.condition(condition)? {
                    self.block(body)?;
                    self.steps.tick(span.0)?;
                }
            }
            Statement::RepeatTimes { count, body, span } => {
                let n = self.eval(count)?.as_number();
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(runtime(
                        Code::R104,
                        count.span(),
                        format!(
                            "repeat count must be a whole number of at least 0, found {}",
                            render_number(n)
                        ),
                    ));
                }
                let mut done = 0.0;
                while done < n {
                    self.block(body)?;
                    self.steps.tick(span.0)?;
                    done += 1.0;
                }
            }
            Statement::Select {
                scrutinee,
                cases,
                other,
                ..
            } => {
                let value = self.eval(scrutinee)?;
                for case in cases {
                    if self.eval(&case.label)? == value {
                        return self.block(&case.body);
                    }
                }
                if let Some(body) = other {
                    self.block(body)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile;
    use crate::parser::parse_expression_text;

    fn run_src(src: &str, inputs: &[&str]) -> RunResult {
        let checked = compile(src).unwrap_or_else(|d| panic!("{d:?}"));
        run(&checked, &mut ScriptedInput::new(inputs.iter().copied()), 1000)
    }

    fn eval_text(src: &str) -> Value {
        eval_expression(&parse_expression_text(src).unwrap(), &Environment::new()).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval_text("3 + 4 * 2"), Value::Number(11.0));
        assert_eq!(eval_text("10 % 3"), Value::Number(1.0));
        assert_eq!(eval_text("-7 % 3"), Value::Number(-1.0));
        assert_eq!(eval_text("7 % -3"), Value::Number(1.0));
        assert_eq!(eval_text("7 / 2"), Value::Number(3.5));
        assert_eq!(eval_text("\"Age: \" & 25"), Value::Text("Age: 25".into()));
        assert_eq!(eval_text("1 & 0.5"), Value::Text("10.5".into()));
    }

    #[test]
    fn average_of_three() {
        let src = "\
Declare a variable called X of type Number.
Declare a variable called Y of type Number.
Declare a variable called Z of type Number.
Read X from the keyboard.
Read Y from the keyboard.
Read Z from the keyboard.
Display (X + Y + Z) / 3 on the screen.
";
        let r = run_src(src, &["10", "20", "30"]);
        assert!(r.is_ok());
        assert_eq!(r.outputs, ["20"]);
    }

    #[test]
    fn division_by_zero_keeps_prior_output() {
        let r = run_src(
            "Declare a variable called X of type Number.\nDisplay \"before\" on the screen.\nSet X to 1 / 0.\nDisplay \"after\" on the screen.",
            &[],
        );
        assert_eq!(r.outputs, ["before"]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R101);
        let r = run_src("Display 5 % 0 on the screen.", &[]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R101);
    }

    #[test]
    fn overflow_is_r101() {
        let big = "9".repeat(300);
        let r = run_src(&format!("Display {big} * {big} on the screen."), &[]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R101);
    }

    #[test]
    fn infinite_loop_hits_step_limit() {
        let r = run_src("Repeat while 1 is Equal to 1\nEnd of repeat.", &[]);
        let e = r.runtime_error.unwrap();
        assert_eq!(e.code, Code::R105);
        assert_eq!(r.steps_used, 1001);
    }

    #[test]
    fn growing_text_is_bounded_by_step_limit() {
        let src = "\
Declare a variable called S of type String with initial value \"xy\".
Repeat while 1 is Equal to 1
    Set S to S & S.
End of repeat.
";
        let r = run_src(src, &[]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R105);
        assert_eq!(r.steps_used, 1001);
    }

    #[test]
    fn array_size_is_charged() {
        let r = run_src("Declare an array called Arr of type Number with size 32.", &[]);
        assert_eq!(r.steps_used, 3);
        let r = run_src("Declare an array called Arr of type Number with size 1000000.", &[]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R105);
        assert_eq!(r.steps_used, 1001);
    }

    #[test]
    fn arrays_are_one_based_and_checked() {
        let src = "\
Declare an array called Arr of type Number with size 3.
Set element 1 of Arr to 5.
Set element 3 of Arr to element 1 of Arr * 2.
Display element 3 of Arr & \",\" & element 2 of Arr on the screen.
Set element 4 of Arr to 1.
";
        let r = run_src(src, &[]);
        assert_eq!(r.outputs, ["10,0"]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R102);
        let r = run_src(
            "Declare an array called Arr of type String with size 2.\nDisplay element 1.5 of Arr on the screen.",
            &[],
        );
        assert_eq!(r.runtime_error.unwrap().code, Code::R102);
    }

    #[test]
    fn read_conversion() {
        let src = "Declare a variable called N of type Number.\nDeclare a variable called S of type String.\nRead S from the keyboard.\nRead N from the keyboard.\nDisplay S & N on the screen.";
        assert_eq!(run_src(src, &["hi", " -2.5 "]).outputs, ["hi-2.5"]);
        let r = run_src(src, &["hi", "abc"]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R103);
        let r = run_src(src, &["hi"]);
        assert_eq!(r.runtime_error.unwrap().code, Code::R103);
    }

    #[test]
    fn number_input_format() {
        assert_eq!(parse_number_input("42"), Some(42.0));
        assert_eq!(parse_number_input("+1.5"), Some(1.5));
        assert_eq!(parse_number_input("-0.25\n"), Some(-0.25));
        for bad in ["", "1e5", "inf", "NaN", ".5", "5.", "1,000", "--1", "0x10"] {
            assert_eq!(parse_number_input(bad), None, "{bad}");
        }
    }

    #[test]
    fn repeat_times() {
        let src = "Declare a variable called I of type Number.\nRepeat 3 times\nSet I to I + 1.\nDisplay I on the screen.\nEnd of repeat.";
        assert_eq!(run_src(src, &[]).outputs, ["1", "2", "3"]);
        for bad in ["-1", "2.5"] {
            let r = run_src(&format!("Repeat {bad} times\nEnd of repeat."), &[]);
            assert_eq!(r.runtime_error.unwrap().code, Code::R104);
        }
        assert!(run_src("Repeat 0 times\nDisplay 1 on the screen.\nEnd of repeat.", &[])
            .outputs
            .is_empty());
    }

    #[test]
    fn short_circuit() {
        let src = "Declare a variable called X of type Number.\nIf X is Equal to 0 Or (1 / X) is Greater than 0 then\nDisplay \"ok\" on the screen.\nEnd of condition.";
        let r = run_src(src, &[]);
        assert!(r.is_ok(), "{:?}", r.runtime_error);
        assert_eq!(r.outputs, ["ok"]);
        let src = "Declare a variable called X of type Number.\nIf X is Not Equal to 0 And (1 / X) is Greater than 0 then\nEnd of condition.";
        assert!(run_src(src, &[]).is_ok());
    }

    #[test]
    fn if_chain_and_select() {
        let src = "\
Declare a variable called N of type Number.
Read N from the keyboard.
If N is Greater than 10 then
    Display \"big\" on the screen.
Otherwise if N is Greater than 5 then
    Display \"medium\" on the screen.
Otherwise
    Display \"small\" on the screen.
End of condition.
Select on N
    When 1 then
        Display \"one\" on the screen.
    When -2 then
        Display \"minus two\" on the screen.
    When other then
        Display \"other\" on the screen.
End of select.
";
        assert_eq!(run_src(src, &["7"]).outputs, ["medium", "other"]);
        assert_eq!(run_src(src, &["1"]).outputs, ["small", "one"]);
        assert_eq!(run_src(src, &["-2"]).outputs, ["small", "minus two"]);
        assert_eq!(run_src(src, &["11"]).outputs, ["big", "other"]);
    }

    #[test]
    fn declarations_reset_and_default() {
        let src = "\
Repeat 2 times
    Declare a variable called C of type Number with initial value 5.
    Set C to C + 1.
    Display C on the screen.
End of repeat.
Declare a variable called S of type String.
Display \"[\" & S & \"]\" on the screen.
";
        assert_eq!(run_src(src, &[]).outputs, ["6", "6", "[]"]);
    }

    #[test]
    fn deterministic() {
        let src = "Declare a variable called X of type Number.\nRepeat 5 times\nSet X to X * 2 + 1.\nEnd of repeat.\nDisplay X on the screen.";
        assert_eq!(run_src(src, &[]), run_src(src, &[]));
    }

    #[test]
    fn streams_to_sink() {
        let checked = compile("Display 1 on the screen.\nDisplay 2 on the screen.").unwrap();
        let mut sink = Vec::new();
        let r = run_with_sink(&checked, &mut ScriptedInput::default(), 100, &mut sink);
        assert_eq!(sink, r.outputs);
    }
}
