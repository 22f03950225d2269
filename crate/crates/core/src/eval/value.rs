//! Runtime values. Every value carries the graph vertex at its root.

use std::fmt;
use std::sync::{Arc, LazyLock};

use super::env::Env;
use super::prim::Primitive;
use crate::desugar::core::{Elim, RecDefs};
use crate::desugar::signature::{CONS, NIL};
use crate::graph::VertexId;
use crate::syntax::pretty::{float_literal, string_literal};

#[derive(Clone)]
pub struct Value {
    pub addr: VertexId,
    pub kind: Arc<ValueKind>,
}

pub enum ValueKind {
    Int(i64),
    Float(f64),
    Str(String),
    Constr(String, Vec<Value>),
    /// Fields keep their construction order.
    Dict(Vec<(String, Value)>),
    Closure(Closure),
    /// A primitive together with the arguments supplied so far.
    Prim(&'static Primitive, Vec<Value>),
    /// A `@doc` value: the paragraph, then the documented target. Shares the
    /// target's root address.
    Doc(Value, Value),
}

pub struct Closure {
    pub env: Env,
    pub rec: Arc<RecDefs>,
    pub elim: Arc<Elim>,
}

/// A value with addresses, closures' insides and documentation erased, for
/// comparing results across interpreters.
#[derive(Debug, Clone, PartialEq)]
pub enum Erased {
    Int(i64),
    Float(f64),
    Str(String),
    Constr(String, Vec<Erased>),
    Dict(Vec<(String, Erased)>),
    Function,
}

impl Value {
    pub fn new(addr: VertexId, kind: ValueKind) -> Self {
        Value { addr, kind: Arc::new(kind) }
    }

    /// Looks through documentation to the value it documents.
    pub fn strip(&self) -> &Value {
        let mut v = self;
        while let ValueKind::Doc(_, target) = &*v.kind {
            v = target;
        }
        v
    }

    pub fn kind(&self) -> &ValueKind {
        &self.strip().kind
    }

    pub fn as_constr(&self) -> Option<(&str, &[Value])> {
        match self.kind() {
            ValueKind::Constr(c, args) => Some((c, args)),
            _ => None,
        }
    }

    /// Elements of a proper `Cons`/`[]` list.
    pub fn as_list(&self) -> Option<Vec<&Value>> {
        let mut out = Vec::new();
        let mut v = self;
        loop {
            match v.as_constr()? {
                (NIL, []) => return Some(out),
                (CONS, [h, t]) => {
                    out.push(h);
                    v = t;
                }
                _ => return None,
            }
        }
    }

    /// The `Cons` cells of a proper list, head first.
    pub fn list_cells(&self) -> Option<Vec<&Value>> {
        let mut out = Vec::new();
        let mut v = self;
        loop {
            match v.as_constr()? {
                (NIL, []) => return Some(out),
                (CONS, [_, t]) => {
                    out.push(v.strip());
                    v = t;
                }
                _ => return None,
            }
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self.kind() {
            ValueKind::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self.kind() {
            ValueKind::Int(n) => Some(*n as f64),
            ValueKind::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_dict(&self) -> Option<&[(String, Value)]> {
        match self.kind() {
            ValueKind::Dict(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        self.as_dict()?.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn doc(&self) -> Option<&Value> {
        match &*self.kind {
            ValueKind::Doc(p, _) => Some(p),
            _ => None,
        }
    }

    pub fn erase(&self) -> Erased {
        match self.kind() {
            ValueKind::Int(n) => Erased::Int(*n),
            ValueKind::Float(x) => Erased::Float(*x),
            ValueKind::Str(s) => Erased::Str(s.clone()),
            ValueKind::Constr(c, args) => Erased::Constr(c.clone(), args.iter().map(Value::erase).collect()),
            ValueKind::Dict(fs) => Erased::Dict(fs.iter().map(|(k, v)| (k.clone(), v.erase())).collect()),
            ValueKind::Closure(_) | ValueKind::Prim(..) => Erased::Function,
            ValueKind::Doc(..) => unreachable!("stripped"),
        }
    }

    /// Every vertex in this value's data tree, root first. Constructors,
    /// dictionaries and documented values recurse; closures stop at the root.
    pub fn subtree(&self, out: &mut Vec<VertexId>) {
        out.push(self.addr);
        match &*self.kind {
            ValueKind::Constr(_, args) => args.iter().for_each(|a| a.subtree(out)),
            ValueKind::Dict(fs) => fs.iter().for_each(|(_, v)| v.subtree(out)),
            ValueKind::Doc(_, t) => t.subtree(out),
            _ => {}
        }
    }
}

// Stands in for a value's contents while they are being dropped.
static HOLE: LazyLock<Arc<ValueKind>> = LazyLock::new(|| Arc::new(ValueKind::Int(0)));

impl Drop for Value {
    // Long lists are deeply nested; drop them with an explicit stack.
    fn drop(&mut self) {
        if Arc::strong_count(&self.kind) != 1 {
            return;
        }
        fn hollow(v: &mut Value) -> Arc<ValueKind> {
            std::mem::replace(&mut v.kind, HOLE.clone())
        }
        let mut stack = vec![hollow(self)];
        while let Some(arc) = stack.pop() {
            let Ok(kind) = Arc::try_unwrap(arc) else { continue };
            match kind {
                ValueKind::Constr(_, args) | ValueKind::Prim(_, args) => {
                    stack.extend(args.into_iter().map(|mut a| hollow(&mut a)));
                }
                ValueKind::Dict(fs) => stack.extend(fs.into_iter().map(|(_, mut a)| hollow(&mut a))),
                ValueKind::Doc(mut p, mut t) => {
                    stack.push(hollow(&mut p));
                    stack.push(hollow(&mut t));
                }
                ValueKind::Int(_) | ValueKind::Float(_) | ValueKind::Str(_) | ValueKind::Closure(_) => {}
            }
        }
    }
}

impl fmt::Display for Erased {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Erased::Int(n) => write!(f, "{n}"),
            Erased::Float(x) => f.write_str(&float_literal(*x)),
            Erased::Str(s) => f.write_str(&string_literal(s)),
            Erased::Function => f.write_str("<function>"),
            Erased::Dict(fs) => {
                f.write_str("{")?;
                for (i, (k, v)) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
            Erased::Constr(c, args) => {
                if let Some(items) = erased_list(self) {
                    f.write_str("[")?;
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{v}")?;
                    }
                    return f.write_str("]");
                }
                f.write_str(c)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, v) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{v}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn erased_list(mut e: &Erased) -> Option<Vec<&Erased>> {
    let mut out = Vec::new();
    loop {
        match e {
            Erased::Constr(c, args) if c == NIL && args.is_empty() => return Some(out),
            Erased::Constr(c, args) if c == CONS && args.len() == 2 => {
                out.push(&args[0]);
                e = &args[1];
            }
            _ => return None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.erase())
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.addr)
    }
}

impl fmt::Debug for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueKind::Int(n) => write!(f, "Int({n})"),
            ValueKind::Float(x) => write!(f, "Float({x})"),
            ValueKind::Str(s) => write!(f, "Str({s:?})"),
            ValueKind::Constr(c, args) => write!(f, "Constr({c}, {args:?})"),
            ValueKind::Dict(fs) => write!(f, "Dict({fs:?})"),
            ValueKind::Closure(_) => f.write_str("Closure"),
            ValueKind::Prim(p, args) => write!(f, "Prim({}, {args:?})", p.name),
            ValueKind::Doc(p, t) => write!(f, "Doc({p:?}, {t:?})"),
        }
    }
}
