//! C# code generation.
//!
//! The emitted unit is a single self-contained file: a `Program` class whose
//! `Main` holds the translated statements, plus the `Rt` helper class that
//! reproduces the interpreter's number formatting, input parsing and
//! runtime checks. Runtime errors are written to stderr as
//! `ERROR <code>: <message>.` and exit with status 1. The target has no step
//! limit.

use std::fmt::Write as _;

use crate::ast::{BinaryOp, Condition, Expression, LogicOp, Place, RelOp, Statement, TypeTag};
use crate::nlg::render_number;
use crate::semantics::{CheckedProgram, SymbolTable, SymbolType};

/// Generated source text ready to be written to a `.cs` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetUnit {
    pub source_text: String,
    pub entry_point_name: String,
}

pub const ENTRY_POINT: &str = "Program.Main";

const PRELUDE: &str = "\
using System;
using System.Globalization;

public static class Program
{
    public static void Main()
    {
        Console.OutputEncoding = new System.Text.UTF8Encoding(false);
";

const RUNTIME: &str = r#"
public sealed class RtError : Exception
{
    public RtError(string code, string message) : base("ERROR " + code + ": " + message + ".") { }
}

public static class Rt
{
    public static string Show(string s)
    {
        return s;
    }

    public static string Show(double d)
    {
        if (d == 0) return "0";
        string r = d.ToString("R", CultureInfo.InvariantCulture);
        int e = r.IndexOfAny(new[] { 'E', 'e' });
        if (e < 0) return r;
        string mantissa = r.Substring(0, e);
        int exp = int.Parse(r.Substring(e + 1), NumberStyles.AllowLeadingSign, CultureInfo.InvariantCulture);
        bool negative = mantissa.StartsWith("-");
        if (negative) mantissa = mantissa.Substring(1);
        int dot = mantissa.IndexOf('.');
        string digits = dot < 0 ? mantissa : mantissa.Remove(dot, 1);
        int point = (dot < 0 ? mantissa.Length : dot) + exp;
        string s;
        if (point <= 0) s = "0." + new string('0', -point) + digits;
        else if (point >= digits.Length) s = digits + new string('0', point - digits.Length);
        else s = digits.Substring(0, point) + "." + digits.Substring(point);
        return negative ? "-" + s : s;
    }

    public static double Num(double d)
    {
        if (double.IsNaN(d) || double.IsInfinity(d))
            throw new RtError("R101", "arithmetic result is too large to represent");
        return d;
    }

    public static double Div(double a, double b)
    {
        if (b == 0) throw new RtError("R101", "division by zero");
        return Num(a / b);
    }

    public static double Mod(double a, double b)
    {
        if (b == 0) throw new RtError("R101", "division by zero");
        return Num(a % b);
    }

    public static double Count(double n)
    {
        if (n < 0 || Math.Floor(n) != n)
            throw new RtError("R104", "repeat count must be a whole number of at least 0, found " + Show(n));
        return n;
    }

    public static double[] NewNumbers(int size)
    {
        return new double[size];
    }

    public static string[] NewTexts(int size)
    {
        string[] a = new string[size];
        for (int i = 0; i < size; i++) a[i] = "";
        return a;
    }

    static int Slot(int length, double index, string name)
    {
        if (Math.Floor(index) != index || index < 1 || index > length)
            throw new RtError("R102", "element " + Show(index) + " of '" + name + "' does not exist; valid elements are 1 to " + length);
        return (int)index - 1;
    }

    public static T Get<T>(T[] a, double index, string name)
    {
        return a[Slot(a.Length, index, name)];
    }

    public static void Set<T>(T[] a, double index, T value, string name)
    {
        a[Slot(a.Length, index, name)] = value;
    }

    static string Line(string prompt, string name)
    {
        if (prompt != null) Console.Error.Write(prompt);
        string line = Console.ReadLine();
        if (line == null) throw new RtError("R103", "no input left to read into '" + name + "'");
        return line;
    }

    public static string ReadText(string prompt, string name)
    {
        return Line(prompt, name);
    }

    public static double ReadNumber(string prompt, string name)
    {
        string t = Line(prompt, name).Trim();
        int i = 0;
        if (i < t.Length && (t[i] == '+' || t[i] == '-')) i++;
        int start = i;
        while (i < t.Length && t[i] >= '0' && t[i] <= '9') i++;
        bool ok = i > start;
        if (ok && i < t.Length && t[i] == '.')
        {
            int frac = ++i;
            while (i < t.Length && t[i] >= '0' && t[i] <= '9') i++;
            ok = i > frac;
        }
        double v = 0;
        ok = ok && i == t.Length && double.TryParse(t, NumberStyles.AllowLeadingSign | NumberStyles.AllowDecimalPoint, CultureInfo.InvariantCulture, out v);
        if (!ok || double.IsInfinity(v))
            throw new RtError("R103", "'" + t + "' is not a number (reading into '" + name + "')");
        return v;
    }
}
"#;

pub fn emit_target(program: &CheckedProgram) -> TargetUnit {
    let mut g = Generator {
        symbols: program.symbols(),
        out: String::from(PRELUDE),
        depth: 2,
        counter: 0,
    };
    for sym in program.symbols().iter() {
        let line = match sym.ty {
            SymbolType::Scalar(TypeTag::Number) => format!("double {} = 0d;", var_name(&sym.name)),
            SymbolType::Scalar(TypeTag::String) => format!("string {} = \"\";", var_name(&sym.name)),
            SymbolType::Array { element, size } => format!(
                "{}[] {} = {};",
                cs_type(element),
                array_name(&sym.name),
                new_array(element, size)
            ),
        };
        g.line(&line);
    }
    g.line("try");
    g.open();
    for stmt in &program.program().statements {
        g.statement(stmt);
    }
    g.close();
    g.line("catch (RtError e)");
    g.open();
    g.line("Console.Out.Flush();");
    g.line("Console.Error.WriteLine(e.Message);");
    g.line("Environment.Exit(1);");
    g.close();
    g.close();
    g.close();
    g.out.push_str(RUNTIME);
    TargetUnit {
        source_text: g.out,
        entry_point_name: ENTRY_POINT.to_string(),
    }
}

fn var_name(name: &str) -> String {
    format!("v_{}", name.to_lowercase())
}

fn array_name(name: &str) -> String {
    format!("a_{}", name.to_lowercase())
}

fn cs_type(ty: TypeTag) -> &'static str {
    match ty {
        TypeTag::Number => "double",
        TypeTag::String => "string",
    }
}

fn new_array(element: TypeTag, size: u32) -> String {
    match element {
        TypeTag::Number => format!("Rt.NewNumbers({size})"),
        TypeTag::String => format!("Rt.NewTexts({size})"),
    }
}

/// C# string literal. Non-ASCII text is kept verbatim; the file is UTF-8.
pub fn string_literal(text: &str) -> String {
    let mut s = String::with_capacity(text.len() + 2);
    s.push('"');
    for c in text.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\r' => s.push_str("\\r"),
            '\t' => s.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' || c == '\u{2028}' || c == '\u{2029}' || c == '\u{85}' => {
                let _ = write!(s, "\\u{:04x}", c as u32);
            }
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

fn number_literal(value: f64) -> String {
    format!("{}d", render_number(value))
}

struct Generator<'a> {
    symbols: &'a SymbolTable,
    out: String,
    depth: usize,
    counter: usize,
}

impl Generator<'_> {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn open(&mut self) {
        self.line("{");
        self.depth += 1;
    }

    fn close(&mut self) {
        self.depth -= 1;
        self.line("}");
    }

    fn fresh(&mut self) -> usize {
        self.counter += 1;
        self.counter
    }

    fn body(&mut self, stmts: &[Statement]) {
        self.open();
        for s in stmts {
            self.statement(s);
        }
        self.close();
    }

    fn store(&mut self, place: &Place, value: String) {
        let line = match place {
            Place::Var(id) => format!("{} = {value};", var_name(&id.name)),
            Place::Element { index, array, .. } => format!(
                "Rt.Set({}, {}, {value}, {});",
                array_name(&array.name),
                expression(index),
                string_literal(&array.name)
            ),
        };
        self.line(&line);
    }

    fn statement(&mut self, stmt: &Statement) {
        match stmt {
            Statement::DeclareVariable {
                name, ty, initial, ..
            } => {
                let value = match (initial, ty) {
                    (Some(e), _) => expression(e),
                    (None, TypeTag::Number) => "0d".to_string(),
                    (None, TypeTag::String) => "\"\"".to_string(),
                };
                self.line(&format!("{} = {value};", var_name(&name.name)));
            }
            Statement::DeclareArray {
                name,
                element,
                size,
                ..
            } => {
                self.line(&format!(
                    "{} = {};",
                    array_name(&name.name),
                    new_array(*element, *size)
                ));
            }
            Statement::Assign { target, value, .. } => self.store(target, expression(value)),
            Statement::Display { value, .. } => {
                self.line(&format!("Console.WriteLine(Rt.Show({}));", expression(value)));
            }
            Statement::Read { target, prompt, .. } => {
                let prompt = prompt
                    .as_deref()
                    .map_or_else(|| "null".to_string(), string_literal);
                let name = &target.name().name;
                let kind = match self.symbols.lookup(name).map(|s| s.ty.element_type()) {
                    Some(TypeTag::String) => "Text",
                    _ => "Number",
                };
                let reader = format!("Rt.Read{kind}({prompt}, {})", string_literal(name));
                self.store(target, reader);
            }
            Statement::If {
                arms, otherwise, ..
            } => {
                for (i, arm) in arms.iter().enumerate() {
                    let kw = if i == 0 { "if" } else { "else if" };
                    self.line(&format!("{kw} {}", condition(&arm.condition)));
                    self.body(&arm.body);
                }
                if let Some(body) = otherwise {
                    self.line("else");
                    self.body(body);
                }
            }
            Statement::RepeatWhile {
                condition: cond,
                body,
                ..
            } => {
                self.line(&format!("while {}", condition(cond)));
                self.body(body);
            }
            Statement::RepeatTimes { count, body, .. } => {
                let n = self.fresh();
                self.line(&format!("double __c{n} = Rt.Count({});", expression(count)));
                self.line(&format!("for (double __i{n} = 0; __i{n} < __c{n}; __i{n}++)"));
                self.body(body);
            }
            Statement::Select {
                scrutinee,
                cases,
                other,
                ..
            } => {
                let n = self.fresh();
                self.open();
                self.line(&format!("var __s{n} = {};", expression(scrutinee)));
                for (i, case) in cases.iter().enumerate() {
                    let kw = if i == 0 { "if" } else { "else if" };
                    self.line(&format!("{kw} (__s{n} == {})", expression(&case.label)));
                    self.body(&case.body);
                }
                if let Some(body) = other {
                    self.line("else");
                    self.body(body);
                }
                self.close();
            }
        }
    }
}

fn expression(expr: &Expression) -> String {
    match expr {
        Expression::Number { value, .. } => number_literal(*value),
        Expression::Text { value, .. } => string_literal(value),
        Expression::Place(Place::Var(id)) => var_name(&id.name),
        Expression::Place(Place::Element { index, array, .. }) => format!(
            "Rt.Get({}, {}, {})",
            array_name(&array.name),
            expression(index),
            string_literal(&array.name)
        ),
        Expression::Neg { operand, .. } => format!("(-{})", expression(operand)),
        Expression::Binary {
            op, left, right, ..
        } => {
            let (l, r) = (expression(left), expression(right));
            match op {
                BinaryOp::Add => format!("Rt.Num({l} + {r})"),
                BinaryOp::Sub => format!("Rt.Num({l} - {r})"),
                BinaryOp::Mul => format!("Rt.Num({l} * {r})"),
                BinaryOp::Div => format!("Rt.Div({l}, {r})"),
                BinaryOp::Rem => format!("Rt.Mod({l}, {r})"),
                BinaryOp::Concat => format!("(Rt.Show({l}) + Rt.Show({r}))"),
            }
        }
    }
}

fn condition(cond: &Condition) -> String {
    match cond {
        Condition::Compare {
            op, left, right, ..
        } => {
            let sym = match op {
                RelOp::Greater => ">",
                RelOp::Smaller => "<",
                RelOp::GreaterOrEqual => ">=",
                RelOp::SmallerOrEqual => "<=",
                RelOp::Equal => "==",
                RelOp::NotEqual => "!=",
            };
            format!("({} {sym} {})", expression(left), expression(right))
        }
        Condition::Logical {
            op, left, right, ..
        } => {
            let sym = match op {
                LogicOp::And => "&&",
                LogicOp::Or => "||",
            };
            format!("({} {sym} {})", condition(left), condition(right))
        }
    }
}
