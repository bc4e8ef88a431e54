//! Generators and oracles shared by the integration suites.
#![allow(dead_code)]

use natprog_core::ast::{
    BinaryOp, Condition, Expression, Ident, IfArm, LogicOp, NodeSpan, Place, Program, RelOp,
    SelectCase, Statement, TypeTag,
};
use natprog_core::nlg::{realize_condition, realize_expression};
use natprog_core::semantics::{analyze_collect, SymbolTable};
use natprog_core::span::SourceSpan;
use natprog_core::templates::TemplateInstance;
use natprog_core::token::is_reserved;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Declarations every generated fragment may refer to.
pub const CONTEXT: &str = "\
Declare a variable called Count of type Number with initial value 4.
Declare a variable called Total of type Number with initial value -2.5.
Declare a variable called Name of type String with initial value \"Ada\".
Declare a variable called Title of type String.
Declare an array called Scores of type Number with size 5.
Declare an array called Words of type String with size 3.
";

pub const NUMBER_VARS: [&str; 2] = ["Count", "Total"];
pub const TEXT_VARS: [&str; 2] = ["Name", "Title"];
pub const NUMBER_ARRAY: &str = "Scores";
pub const TEXT_ARRAY: &str = "Words";

pub fn context_program() -> Program {
    natprog_core::parser::parse_source(CONTEXT).program
}

pub fn context_symbols() -> SymbolTable {
    analyze_collect(&context_program()).symbols
}

/// Runner that performs exactly `cases` successful cases from a fixed seed.
pub fn deterministic_runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_shrink_iters: 256,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn ident(name: &str) -> Ident {
    Ident::new(name, SourceSpan::default())
}

fn element(index: Expression, array: &str) -> Place {
    Place::Element {
        index: Box::new(index),
        array: ident(array),
        span: NodeSpan::default(),
    }
}

/// Non-negative finite literal values, biased toward small integers.
pub fn number_value() -> impl Strategy<Value = f64> {
    prop_oneof![
        6 => (0u32..10).prop_map(f64::from),
        2 => (0u32..1000).prop_map(f64::from),
        2 => (0u32..100_000, 1u32..5).prop_map(|(n, k)| f64::from(n) / 10f64.powi(k as i32)),
        1 => 0.0f64..1e30,
        1 => (0.0f64..1.0).prop_map(|v| v * 1e-7),
    ]
}

/// Text content exercising escapes, separators and non-ASCII letters.
pub fn text_value() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            8 => proptest::char::range('a', 'z'),
            2 => Just(' '),
            1 => Just('"'),
            1 => Just('\\'),
            1 => Just('\n'),
            1 => Just('&'),
            1 => Just('.'),
            1 => Just('é'),
            1 => Just('7'),
        ],
        0..12,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

const ARITHMETIC: [BinaryOp; 5] = [
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Div,
    BinaryOp::Rem,
];

fn arithmetic_op() -> impl Strategy<Value = BinaryOp> {
    proptest::sample::select(&ARITHMETIC[..])
}

fn relop() -> impl Strategy<Value = RelOp> {
    proptest::sample::select(&RelOp::ALL[..])
}

/// Number-typed expressions over the context symbols. `depth` bounds the
/// nesting of operator nodes; array indexes count toward it.
pub fn number_expr(depth: u32) -> BoxedStrategy<Expression> {
    number_expr_with(depth, number_value().boxed(), true)
}

/// Number expressions whose leaves are integer literals 0 to 9.
pub fn small_number_expr(depth: u32) -> BoxedStrategy<Expression> {
    number_expr_with(depth, (0u32..10).prop_map(f64::from).boxed(), false)
}

fn number_expr_with(depth: u32, values: BoxedStrategy<f64>, places: bool) -> BoxedStrategy<Expression> {
    let literal = values.clone().prop_map(Expression::number);
    let leaf = if places {
        prop_oneof![
            3 => literal,
            1 => proptest::sample::select(&NUMBER_VARS[..]).prop_map(Expression::var),
        ]
        .boxed()
    } else {
        literal.boxed()
    };
    if depth == 0 {
        return leaf;
    }
    let sub = number_expr_with(depth - 1, values.clone(), places);
    let mut options = vec![
        (3, leaf),
        (
            4,
            (arithmetic_op(), sub.clone(), sub.clone())
                .prop_map(|(op, l, r)| Expression::binary(op, l, r))
                .boxed(),
        ),
        (1, sub.clone().prop_map(Expression::negate).boxed()),
    ];
    if places {
        options.push((
            1,
            sub.prop_map(|i| Expression::Place(element(i, NUMBER_ARRAY)))
                .boxed(),
        ));
    }
    proptest::strategy::Union::new_weighted(options).boxed()
}

/// String-typed expressions; `&` operands may be of either type.
pub fn text_expr(depth: u32) -> BoxedStrategy<Expression> {
    text_expr_with(depth, number_expr(depth.saturating_sub(1)), text_value().boxed(), true)
}

pub fn small_text_expr(depth: u32) -> BoxedStrategy<Expression> {
    let words = proptest::sample::select(&["a", "bc", "", "x y", "\"q\""][..])
        .prop_map(String::from)
        .boxed();
    text_expr_with(depth, small_number_expr(depth.saturating_sub(1)), words, false)
}

fn text_expr_with(
    depth: u32,
    numbers: BoxedStrategy<Expression>,
    texts: BoxedStrategy<String>,
    places: bool,
) -> BoxedStrategy<Expression> {
    let literal = texts.clone().prop_map(Expression::text);
    let leaf = if places {
        prop_oneof![
            3 => literal,
            1 => proptest::sample::select(&TEXT_VARS[..]).prop_map(Expression::var),
            1 => number_expr(0).prop_map(|i| Expression::Place(element(i, TEXT_ARRAY))),
        ]
        .boxed()
    } else {
        literal.boxed()
    };
    if depth == 0 {
        return leaf;
    }
    let sub = text_expr_with(depth - 1, numbers.clone(), texts, places);
    let operand = prop_oneof![2 => sub, 1 => numbers].boxed();
    prop_oneof![
        2 => leaf,
        3 => (operand.clone(), operand)
            .prop_map(|(l, r)| Expression::binary(BinaryOp::Concat, l, r)),
    ]
    .boxed()
}

pub fn typed_expr(ty: TypeTag, depth: u32) -> BoxedStrategy<Expression> {
    match ty {
        TypeTag::Number => number_expr(depth),
        TypeTag::String => text_expr(depth),
    }
}

pub fn any_expr(depth: u32) -> BoxedStrategy<Expression> {
    prop_oneof![number_expr(depth), text_expr(depth)].boxed()
}

fn type_tag() -> impl Strategy<Value = TypeTag> {
    prop_oneof![Just(TypeTag::Number), Just(TypeTag::String)]
}

pub fn condition(depth: u32) -> BoxedStrategy<Condition> {
    let compare = prop_oneof![
        (relop(), number_expr(2), number_expr(2))
            .prop_map(|(op, l, r)| Condition::compare(op, l, r)),
        (
            prop_oneof![Just(RelOp::Equal), Just(RelOp::NotEqual)],
            text_expr(2),
            text_expr(2)
        )
            .prop_map(|(op, l, r)| Condition::compare(op, l, r)),
    ]
    .boxed();
    if depth == 0 {
        return compare;
    }
    let sub = condition(depth - 1);
    prop_oneof![
        2 => compare,
        1 => (prop_oneof![Just(LogicOp::And), Just(LogicOp::Or)], sub.clone(), sub)
            .prop_map(|(op, l, r)| Condition::logical(op, l, r)),
    ]
    .boxed()
}

/// An assignable place and its element type.
pub fn place() -> impl Strategy<Value = (Place, TypeTag)> {
    prop_oneof![
        proptest::sample::select(&NUMBER_VARS[..]).prop_map(|n| (Place::Var(ident(n)), TypeTag::Number)),
        proptest::sample::select(&TEXT_VARS[..]).prop_map(|n| (Place::Var(ident(n)), TypeTag::String)),
        number_expr(1).prop_map(|i| (element(i, NUMBER_ARRAY), TypeTag::Number)),
        number_expr(1).prop_map(|i| (element(i, TEXT_ARRAY), TypeTag::String)),
    ]
}

/// Valid fresh identifiers (never reserved, never a context name).
pub fn fresh_name() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,11}".prop_filter("reserved or context name", |s| {
        let lower = s.to_lowercase();
        !is_reserved(s)
            && !NUMBER_VARS
                .iter()
                .chain(&TEXT_VARS)
                .chain(&[NUMBER_ARRAY, TEXT_ARRAY])
                .any(|n| n.to_lowercase() == lower)
    })
}

fn span() -> NodeSpan {
    NodeSpan::default()
}

/// Well-typed statements over the context symbols. Declarations use
/// placeholder names that [`fresh_declarations`] makes unique.
pub fn statement(depth: u32) -> BoxedStrategy<Statement> {
    let simple = prop_oneof![
        2 => place().prop_flat_map(|(target, ty)| {
            typed_expr(ty, 3).prop_map(move |value| Statement::Assign {
                target: target.clone(),
                value,
                span: span(),
            })
        }),
        2 => any_expr(3).prop_map(|value| Statement::Display { value, span: span() }),
        1 => (place(), proptest::option::of(text_value())).prop_map(|((target, _), prompt)| {
            Statement::Read { target, prompt, span: span() }
        }),
        1 => type_tag().prop_flat_map(|ty| {
            proptest::option::of(typed_expr(ty, 2)).prop_map(move |initial| Statement::DeclareVariable {
                name: ident("Fresh"),
                ty,
                initial,
                span: span(),
            })
        }),
        1 => (type_tag(), 1u32..20).prop_map(|(element, size)| Statement::DeclareArray {
            name: ident("Fresh"),
            element,
            size,
            span: span(),
        }),
    ]
    .boxed();
    if depth == 0 {
        return simple;
    }
    let body = proptest::collection::vec(statement(depth - 1), 0..3);
    let select = prop_oneof![
        (
            number_expr(2),
            proptest::collection::vec(
                (number_value(), any::<bool>()).prop_map(|(v, neg)| {
                    let n = Expression::number(v);
                    if neg { Expression::negate(n) } else { n }
                }),
                1..4
            )
        ),
        (
            text_expr(2),
            proptest::collection::vec(text_value().prop_map(Expression::text), 1..4)
        ),
    ];
    prop_oneof![
        4 => simple,
        1 => (
            proptest::collection::vec((condition(1), body.clone()), 1..3),
            proptest::option::of(body.clone())
        )
            .prop_map(|(arms, otherwise)| Statement::If {
                arms: arms
                    .into_iter()
                    .map(|(condition, body)| IfArm { condition, body })
                    .collect(),
                otherwise,
                span: span(),
            }),
        1 => (condition(1), body.clone()).prop_map(|(condition, body)| Statement::RepeatWhile {
            condition,
            body,
            span: span(),
        }),
        1 => (number_expr(2), body.clone()).prop_map(|(count, body)| Statement::RepeatTimes {
            count,
            body,
            span: span(),
        }),
        1 => (select, proptest::collection::vec(body.clone(), 4), proptest::option::of(body))
            .prop_map(|((scrutinee, labels), bodies, other)| Statement::Select {
                scrutinee,
                cases: labels
                    .into_iter()
                    .zip(bodies)
                    .map(|(label, body)| SelectCase { label, body })
                    .collect(),
                other,
                span: span(),
            }),
    ]
    .boxed()
}

/// Renames every declaration to a unique `FreshN` name.
pub fn fresh_declarations(stmts: &mut [Statement], counter: &mut usize) {
    for stmt in stmts {
        match stmt {
            Statement::DeclareVariable { name, .. } | Statement::DeclareArray { name, .. } => {
                *counter += 1;
                *name = ident(&format!("Fresh{counter}"));
            }
            Statement::If { arms, otherwise, .. } => {
                for arm in arms {
                    fresh_declarations(&mut arm.body, counter);
                }
                if let Some(body) = otherwise {
                    fresh_declarations(body, counter);
                }
            }
            Statement::RepeatWhile { body, .. } | Statement::RepeatTimes { body, .. } => {
                fresh_declarations(body, counter)
            }
            Statement::Select { cases, other, .. } => {
                for case in cases {
                    fresh_declarations(&mut case.body, counter);
                }
                if let Some(body) = other {
                    fresh_declarations(body, counter);
                }
            }
            _ => {}
        }
    }
}

/// Context declarations followed by random well-typed statements.
pub fn program() -> impl Strategy<Value = Program> {
    proptest::collection::vec(statement(2), 0..8).prop_map(|mut stmts| {
        fresh_declarations(&mut stmts, &mut 0);
        let mut program = context_program();
        program.statements.extend(stmts);
        program
    })
}

/// Input lines for Read statements: mostly numbers, some junk.
pub fn inputs() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec(
        prop_oneof![
            3 => (-50i32..50).prop_map(|n| n.to_string()),
            1 => Just("2.5".to_string()),
            1 => text_value(),
        ],
        0..6,
    )
}

// ---------------------------------------------------------------------------
// Template instances

fn lines<T>(items: &[T], render: impl Fn(&T) -> String) -> String {
    items.iter().map(render).collect::<Vec<_>>().join("\n")
}

fn flag() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(&["true", "false", "yes", "no"][..])
}

fn with_place(inst: TemplateInstance, target: &Place) -> TemplateInstance {
    match target {
        Place::Var(id) => inst.with("target", &id.name),
        Place::Element { index, array, .. } => inst
            .with("target", &array.name)
            .with("index", realize_expression(index)),
    }
}

fn declare_variable_instance() -> impl Strategy<Value = TemplateInstance> {
    (fresh_name(), type_tag()).prop_flat_map(|(name, ty)| {
        proptest::option::of(typed_expr(ty, 3)).prop_map(move |initial| {
            let inst = TemplateInstance::new("declare-variable")
                .with("name", &name)
                .with("type", ty.name());
            match initial {
                Some(e) => inst.with("initial", realize_expression(&e)),
                None => inst,
            }
        })
    })
}

fn declare_array_instance() -> impl Strategy<Value = TemplateInstance> {
    (fresh_name(), type_tag(), 1u32..=1_000_000).prop_map(|(name, ty, size)| {
        TemplateInstance::new("declare-array")
            .with("name", name)
            .with("type", ty.name())
            .with("size", size.to_string())
    })
}

fn assignment_instance() -> impl Strategy<Value = TemplateInstance> {
    place().prop_flat_map(|(target, ty)| {
        typed_expr(ty, 4).prop_map(move |value| {
            with_place(TemplateInstance::new("assignment"), &target)
                .with("value", realize_expression(&value))
        })
    })
}

fn display_instance() -> impl Strategy<Value = TemplateInstance> {
    any_expr(4).prop_map(|e| TemplateInstance::new("display").with("value", realize_expression(&e)))
}

fn read_instance() -> impl Strategy<Value = TemplateInstance> {
    (place(), proptest::option::of(text_value())).prop_map(|((target, _), prompt)| {
        let inst = with_place(TemplateInstance::new("read"), &target);
        match prompt {
            Some(p) => inst.with("prompt", p),
            None => inst,
        }
    })
}

fn if_instance() -> impl Strategy<Value = TemplateInstance> {
    (
        condition(2),
        proptest::collection::vec(condition(1), 0..3),
        proptest::option::of(flag()),
    )
        .prop_map(|(first, more, otherwise)| {
            let mut inst = TemplateInstance::new("if").with("condition", realize_condition(&first));
            if !more.is_empty() {
                inst = inst.with("otherwise-if", lines(&more, realize_condition));
            }
            match otherwise {
                Some(f) => inst.with("include-otherwise", f),
                None => inst,
            }
        })
}

fn repeat_instance() -> impl Strategy<Value = TemplateInstance> {
    prop_oneof![
        condition(2).prop_map(|c| TemplateInstance::new("repeat")
            .with("mode", "while")
            .with("condition", realize_condition(&c))),
        number_expr(3).prop_map(|e| TemplateInstance::new("repeat")
            .with("mode", "times")
            .with("count", realize_expression(&e))),
    ]
}

fn select_instance() -> impl Strategy<Value = TemplateInstance> {
    let labels = prop_oneof![
        (
            number_expr(3),
            proptest::collection::vec(
                (number_value(), any::<bool>()).prop_map(|(v, neg)| {
                    let n = Expression::number(v);
                    if neg { Expression::negate(n) } else { n }
                }),
                1..5
            )
        ),
        (
            text_expr(3),
            proptest::collection::vec(text_value().prop_map(Expression::text), 1..5)
        ),
    ];
    (labels, proptest::option::of(flag())).prop_map(|((scrutinee, cases), other)| {
        let inst = TemplateInstance::new("select")
            .with("scrutinee", realize_expression(&scrutinee))
            .with("cases", lines(&cases, realize_expression));
        match other {
            Some(f) => inst.with("include-other", f),
            None => inst,
        }
    })
}

/// Valid instances of all eight templates in the context of [`CONTEXT`].
pub fn template_instance() -> BoxedStrategy<TemplateInstance> {
    prop_oneof![
        declare_variable_instance(),
        declare_array_instance(),
        assignment_instance(),
        display_instance(),
        read_instance(),
        if_instance(),
        repeat_instance(),
        select_instance(),
    ]
    .boxed()
}

// ---------------------------------------------------------------------------
// Reference evaluator

#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Num(f64),
    Str(String),
}

/// Known values of the context symbols after [`ORACLE_SETUP`] runs.
pub struct OracleEnv {
    pub count: f64,
    pub total: f64,
    pub name: &'static str,
    pub title: &'static str,
    pub scores: [f64; 5],
    pub words: [&'static str; 3],
}

/// Statements run after [`CONTEXT`] so arrays hold distinct values.
pub const ORACLE_SETUP: &str = "\
Set element 1 of Scores to 3.
Set element 2 of Scores to -1.5.
Set element 5 of Scores to 8.
Set element 2 of Words to \"mid\".
Set element 3 of Words to \"end\".
";

pub const ORACLE_ENV: OracleEnv = OracleEnv {
    count: 4.0,
    total: -2.5,
    name: "Ada",
    title: "",
    scores: [3.0, -1.5, 0.0, 0.0, 8.0],
    words: ["", "mid", "end"],
};

/// Shortest round-trip decimal text, never in exponent form.
pub fn oracle_render(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let s = format!("{v}");
    debug_assert_eq!(s.parse::<f64>(), Ok(v));
    s
}

fn show(v: &Val) -> String {
    match v {
        Val::Num(n) => oracle_render(*n),
        Val::Str(s) => s.clone(),
    }
}

fn lookup_element(values: &[Val], i: f64) -> Result<Val, &'static str> {
    if i.floor() != i || i < 1.0 || i > values.len() as f64 {
        return Err("R102");
    }
    Ok(values[i as usize - 1].clone())
}

enum Work<'a> {
    Visit(&'a Expression),
    Apply(&'a Expression),
}

/// Post-order evaluation over an explicit stack. Returns the runtime error
/// code of the first failing node.
pub fn oracle_eval(expr: &Expression, env: &OracleEnv) -> Result<Val, &'static str> {
    let mut work = vec![Work::Visit(expr)];
    let mut values: Vec<Val> = Vec::new();
    while let Some(item) = work.pop() {
        match item {
            Work::Visit(e) => {
                work.push(Work::Apply(e));
                match e {
                    Expression::Binary { left, right, .. } => {
                        work.push(Work::Visit(right));
                        work.push(Work::Visit(left));
                    }
                    Expression::Neg { operand, .. } => work.push(Work::Visit(operand)),
                    Expression::Place(Place::Element { index, .. }) => work.push(Work::Visit(index)),
                    _ => {}
                }
            }
            Work::Apply(e) => {
                let v = match e {
                    Expression::Number { value, .. } => Val::Num(*value),
                    Expression::Text { value, .. } => Val::Str(value.clone()),
                    Expression::Place(Place::Var(id)) => match id.name.to_lowercase().as_str() {
                        "count" => Val::Num(env.count),
                        "total" => Val::Num(env.total),
                        "name" => Val::Str(env.name.into()),
                        "title" => Val::Str(env.title.into()),
                        other => panic!("oracle has no variable {other}"),
                    },
                    Expression::Place(Place::Element { array, .. }) => {
                        let Some(Val::Num(i)) = values.pop() else { panic!("index") };
                        let cells: Vec<Val> = match array.name.to_lowercase().as_str() {
                            "scores" => env.scores.iter().map(|&n| Val::Num(n)).collect(),
                            "words" => env.words.iter().map(|&s| Val::Str(s.into())).collect(),
                            other => panic!("oracle has no array {other}"),
                        };
                        lookup_element(&cells, i)?
                    }
                    Expression::Neg { .. } => {
                        let Some(Val::Num(n)) = values.pop() else { panic!("negation operand") };
                        Val::Num(-n)
                    }
                    Expression::Binary { op, .. } => {
                        let r = values.pop().expect("right operand");
                        let l = values.pop().expect("left operand");
                        if *op == BinaryOp::Concat {
                            Val::Str(show(&l) + &show(&r))
                        } else {
                            let (Val::Num(a), Val::Num(b)) = (l, r) else { panic!("arithmetic on text") };
                            let n = match op {
                                BinaryOp::Add => a + b,
                                BinaryOp::Sub => a - b,
                                BinaryOp::Mul => a * b,
                                BinaryOp::Div if b == 0.0 => return Err("R101"),
                                BinaryOp::Div => a / b,
                                BinaryOp::Rem if b == 0.0 => return Err("R101"),
                                BinaryOp::Rem => a % b,
                                BinaryOp::Concat => unreachable!(),
                            };
                            if !n.is_finite() {
                                return Err("R101");
                            }
                            Val::Num(n)
                        }
                    }
                };
                values.push(v);
            }
        }
    }
    Ok(values.pop().expect("one result"))
}

/// Text the oracle predicts for `Display expr on the screen.`, or the
/// runtime error code.
pub fn oracle_display(expr: &Expression) -> Result<String, &'static str> {
    oracle_eval(expr, &ORACLE_ENV).map(|v| show(&v))
}

// ---------------------------------------------------------------------------
// Corpus and target toolchain

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub struct CorpusProgram {
    pub name: String,
    pub path: PathBuf,
    pub source: String,
    pub inputs: Vec<String>,
}

impl CorpusProgram {
    pub fn sibling(&self, ext: &str) -> PathBuf {
        self.path.with_extension(ext)
    }
}

/// Every `.mpl` file in the corpus, sorted by name.
pub fn corpus() -> Vec<CorpusProgram> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "mpl"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let source = std::fs::read_to_string(&path).expect("corpus source");
            let inputs = std::fs::read_to_string(path.with_extension("in"))
                .map(|t| t.lines().map(String::from).collect())
                .unwrap_or_default();
            CorpusProgram {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                path,
                source,
                inputs,
            }
        })
        .collect()
}

/// Expected `.out` text: one displayed line per line.
pub fn output_text(lines: &[String]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

pub enum Toolchain {
    Dotnet,
    Mono,
}

fn on_path(tool: &str) -> bool {
    Command::new(tool)
        .arg("--version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok_and(|s| s.success())
}

pub fn find_csharp_toolchain() -> Option<Toolchain> {
    if on_path("dotnet") {
        Some(Toolchain::Dotnet)
    } else if on_path("mcs") && on_path("mono") {
        Some(Toolchain::Mono)
    } else {
        None
    }
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("natprog-cs-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn run_with_input(mut cmd: Command, input: &[String]) -> Result<Vec<String>, String> {
    use std::io::Write;
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    let text: String = input.iter().map(|l| format!("{l}\n")).collect();
    child.stdin.take().unwrap().write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    Ok(stdout.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

/// Compiles and runs C# source, returning its standard output lines.
pub fn run_csharp(tc: &Toolchain, tag: &str, source: &str, input: &[String]) -> Result<Vec<String>, String> {
    let dir = scratch_dir(tag);
    std::fs::write(dir.join("Program.cs"), source).map_err(|e| e.to_string())?;
    match tc {
        Toolchain::Dotnet => {
            let version = Command::new("dotnet").arg("--version").output().map_err(|e| e.to_string())?;
            let major = String::from_utf8_lossy(&version.stdout)
                .split('.')
                .next()
                .unwrap_or("8")
                .trim()
                .to_string();
            let project = format!(
                "<Project Sdk=\"Microsoft.NET.Sdk\"><PropertyGroup><OutputType>Exe</OutputType>\
                 <TargetFramework>net{major}.0</TargetFramework><ImplicitUsings>disable</ImplicitUsings>\
                 <Nullable>disable</Nullable></PropertyGroup></Project>"
            );
            std::fs::write(dir.join("check.csproj"), project).map_err(|e| e.to_string())?;
            let build = Command::new("dotnet")
                .args(["build", "-nologo", "-v", "q", "-o"])
                .arg(dir.join("bin"))
                .arg(&dir)
                .output()
                .map_err(|e| e.to_string())?;
            if !build.status.success() {
                return Err(String::from_utf8_lossy(&build.stdout).into_owned());
            }
            let mut cmd = Command::new("dotnet");
            cmd.arg(dir.join("bin/check.dll"));
            run_with_input(cmd, input)
        }
        Toolchain::Mono => {
            let exe = dir.join("check.exe");
            let build = Command::new("mcs")
                .arg(format!("-out:{}", exe.display()))
                .arg(dir.join("Program.cs"))
                .output()
                .map_err(|e| e.to_string())?;
            if !build.status.success() {
                return Err(String::from_utf8_lossy(&build.stdout).into_owned());
            }
            let mut cmd = Command::new("mono");
            cmd.arg(exe);
            run_with_input(cmd, input)
        }
    }
}
