use std::fmt::Write;
use std::rc::Rc;

use crate::lang::{Literal, SubjectUnit, TypeTag};

/// Index of an object on the per-execution heap.
pub type Handle = u32;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i32),
    Long(i64),
    Double(f64),
    Bool(bool),
    Char(char),
    Str(Rc<str>),
    Obj(Handle),
    Null,
}

impl Value {
    pub fn from_literal(lit: &Literal) -> Value {
        match lit {
            Literal::Int(v) => Value::Int(*v),
            Literal::Long(v) => Value::Long(*v),
            Literal::Double(v) => Value::Double(*v),
            Literal::Bool(v) => Value::Bool(*v),
            Literal::Char(v) => Value::Char(*v),
            Literal::Str(s) => Value::Str(Rc::from(s.as_str())),
            Literal::Null => Value::Null,
        }
    }

    /// Applies implicit widening towards the declared type `ty`.
    pub fn coerce(self, ty: &TypeTag) -> Value {
        match (self, ty) {
            (Value::Int(v), TypeTag::Long) => Value::Long(v as i64),
            (Value::Int(v), TypeTag::Double) => Value::Double(v as f64),
            (Value::Long(v), TypeTag::Double) => Value::Double(v as f64),
            (v, _) => v,
        }
    }

    /// Default value of a freshly allocated field.
    pub fn default_for(ty: &TypeTag) -> Value {
        match ty {
            TypeTag::Int => Value::Int(0),
            TypeTag::Long => Value::Long(0),
            TypeTag::Double => Value::Double(0.0),
            TypeTag::Boolean => Value::Bool(false),
            TypeTag::Char => Value::Char('\0'),
            TypeTag::Str => Value::Str(Rc::from("")),
            TypeTag::Subject(_) => Value::Null,
        }
    }

    /// Numeric view used for distances; chars map to their code point.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Long(v) => Some(*v as f64),
            Value::Double(v) => Some(*v),
            Value::Char(c) => Some(*c as u32 as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn as_int(&self) -> i32 {
        match self {
            Value::Int(v) => *v,
            _ => 0,
        }
    }

    /// Equality used for infection checks: doubles compare by bits so that
    /// NaN equals itself and -0.0 differs from 0.0.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Double(a), Value::Double(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

pub(crate) struct Object {
    pub subject: u32,
    pub fields: Vec<Value>,
}

const RENDER_DEPTH: usize = 4;

/// Deep rendering of a value, following object fields.
pub(crate) fn render_value(
    v: &Value,
    heap: &[Object],
    unit: &SubjectUnit,
) -> String {
    let mut out = String::new();
    render_into(&mut out, v, heap, unit, 0, &mut Vec::new());
    out
}

fn render_into(
    out: &mut String,
    v: &Value,
    heap: &[Object],
    unit: &SubjectUnit,
    depth: usize,
    path: &mut Vec<Handle>,
) {
    match v {
        Value::Int(x) => {
            let _ = write!(out, "{x}");
        }
        Value::Long(x) => {
            let _ = write!(out, "{x}L");
        }
        Value::Double(x) => {
            let _ = write!(out, "{x:?}");
        }
        Value::Bool(x) => {
            let _ = write!(out, "{x}");
        }
        Value::Char(c) => {
            let _ = write!(out, "{}", Literal::Char(*c));
        }
        Value::Str(s) => {
            let _ = write!(out, "{}", Literal::Str(s.to_string()));
        }
        Value::Null => out.push_str("null"),
        Value::Obj(h) => {
            let obj = &heap[*h as usize];
            let decl = &unit.subjects[obj.subject as usize];
            let name = &decl.name;
            if path.contains(h) {
                let _ = write!(out, "{name}{{<cycle>}}");
                return;
            }
            if depth >= RENDER_DEPTH {
                let _ = write!(out, "{name}{{..}}");
                return;
            }
            path.push(*h);
            let _ = write!(out, "{name}{{");
            for (i, (f, fv)) in decl.fields.iter().zip(&obj.fields).enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}=", f.name);
                render_into(out, fv, heap, unit, depth + 1, path);
            }
            out.push('}');
            path.pop();
        }
    }
}
