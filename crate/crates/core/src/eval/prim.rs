//! Primitive operations. A primitive's result depends on its operands' roots
//! and nothing else, except that a zero factor annihilates multiplication.

use super::value::{Value, ValueKind};
use crate::desugar::signature::{CONS, FALSE, TRUE};
use crate::graph::{DepGraph, Origin, VertexId};
use crate::span::Span;

pub struct Primitive {
    pub name: &'static str,
    pub arity: usize,
    pub imp: fn(&mut PrimCtx<'_>, &[Value]) -> Result<Value, String>,
}

pub struct PrimCtx<'a> {
    pub graph: &'a mut DepGraph,
    pub span: Span,
}

impl PrimCtx<'_> {
    pub fn make(&mut self, deps: &[VertexId], kind: ValueKind) -> Value {
        let a = self.graph.add_vertex(deps, Origin::Primitive, Some(self.span));
        let v = Value::new(a, kind);
        self.graph.set_value(a, v.clone());
        v
    }

    fn from_all(&mut self, args: &[Value], kind: ValueKind) -> Value {
        let deps: Vec<VertexId> = args.iter().map(|a| a.addr).collect();
        self.make(&deps, kind)
    }

    fn boolean(&mut self, args: &[Value], b: bool) -> Value {
        self.from_all(args, ValueKind::Constr(if b { TRUE } else { FALSE }.into(), Vec::new()))
    }
}

pub static PRIMITIVES: &[Primitive] = &[
    Primitive { name: "+", arity: 2, imp: add },
    Primitive { name: "-", arity: 2, imp: sub },
    Primitive { name: "*", arity: 2, imp: mul },
    Primitive { name: "/", arity: 2, imp: div },
    Primitive { name: "mod", arity: 2, imp: modulo },
    Primitive { name: "quot", arity: 2, imp: quot },
    Primitive { name: "pow", arity: 2, imp: pow },
    Primitive { name: "==", arity: 2, imp: eq },
    Primitive { name: "!=", arity: 2, imp: ne },
    Primitive { name: "<", arity: 2, imp: lt },
    Primitive { name: "<=", arity: 2, imp: le },
    Primitive { name: ">", arity: 2, imp: gt },
    Primitive { name: ">=", arity: 2, imp: ge },
    Primitive { name: "and", arity: 2, imp: and },
    Primitive { name: "or", arity: 2, imp: or },
    Primitive { name: "++", arity: 2, imp: concat },
    Primitive { name: "numToStr", arity: 1, imp: num_to_str },
    Primitive { name: "error", arity: 1, imp: error },
    Primitive { name: "floor", arity: 1, imp: floor },
    Primitive { name: "ceiling", arity: 1, imp: ceiling },
    Primitive { name: "sqrt", arity: 1, imp: sqrt },
    Primitive { name: "toFloat", arity: 1, imp: to_float },
];

pub fn lookup(name: &str) -> Option<&'static Primitive> {
    PRIMITIVES.iter().find(|p| p.name == name)
}

/// Primitives that programs reach by name rather than through operator syntax.
pub fn named() -> impl Iterator<Item = &'static Primitive> {
    PRIMITIVES.iter().filter(|p| p.name.starts_with(|c: char| c.is_alphabetic()) && p.name != "and" && p.name != "or")
}

enum Num {
    I(i64),
    F(f64),
}

fn num(v: &Value, op: &str) -> Result<Num, String> {
    match v.kind() {
        ValueKind::Int(n) => Ok(Num::I(*n)),
        ValueKind::Float(x) => Ok(Num::F(*x)),
        _ => Err(format!("{op} expects numbers, got {v}")),
    }
}

fn int(v: &Value, op: &str) -> Result<i64, String> {
    match v.kind() {
        ValueKind::Int(n) => Ok(*n),
        _ => Err(format!("{op} expects integers, got {v}")),
    }
}

fn float(n: Num) -> f64 {
    match n {
        Num::I(i) => i as f64,
        Num::F(x) => x,
    }
}

fn arith(
    ctx: &mut PrimCtx<'_>,
    args: &[Value],
    op: &str,
    fi: fn(i64, i64) -> Option<i64>,
    ff: fn(f64, f64) -> f64,
) -> Result<Value, String> {
    let kind = match (num(&args[0], op)?, num(&args[1], op)?) {
        (Num::I(a), Num::I(b)) => ValueKind::Int(fi(a, b).ok_or_else(|| format!("integer overflow in {op}"))?),
        (a, b) => ValueKind::Float(ff(float(a), float(b))),
    };
    Ok(ctx.from_all(args, kind))
}

fn add(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    arith(ctx, args, "+", i64::checked_add, |a, b| a + b)
}

fn sub(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    arith(ctx, args, "-", i64::checked_sub, |a, b| a - b)
}

fn is_zero(v: &Value) -> bool {
    match v.kind() {
        ValueKind::Int(n) => *n == 0,
        ValueKind::Float(x) => *x == 0.0,
        _ => false,
    }
}

fn mul(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let kind = match (num(&args[0], "*")?, num(&args[1], "*")?) {
        (Num::I(a), Num::I(b)) => ValueKind::Int(a.checked_mul(b).ok_or("integer overflow in *")?),
        (a, b) => ValueKind::Float(float(a) * float(b)),
    };
    // Zero annihilates: the product depends on the zero factor alone.
    let deps = if is_zero(&args[0]) {
        vec![args[0].addr]
    } else if is_zero(&args[1]) {
        vec![args[1].addr]
    } else {
        vec![args[0].addr, args[1].addr]
    };
    Ok(ctx.make(&deps, kind))
}

fn div(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let a = float(num(&args[0], "/")?);
    let b = float(num(&args[1], "/")?);
    if b == 0.0 {
        return Err("division by zero".into());
    }
    Ok(ctx.from_all(args, ValueKind::Float(a / b)))
}

fn modulo(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let (a, b) = (int(&args[0], "mod")?, int(&args[1], "mod")?);
    let r = a.checked_rem_euclid(b).ok_or("division by zero in mod")?;
    Ok(ctx.from_all(args, ValueKind::Int(r)))
}

fn quot(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let (a, b) = (int(&args[0], "quot")?, int(&args[1], "quot")?);
    let r = a.checked_div(b).ok_or("division by zero in quot")?;
    Ok(ctx.from_all(args, ValueKind::Int(r)))
}

fn pow(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let kind = match (num(&args[0], "pow")?, num(&args[1], "pow")?) {
        (Num::I(a), Num::I(b)) if b >= 0 => ValueKind::Int(
            u32::try_from(b).ok().and_then(|b| a.checked_pow(b)).ok_or("integer overflow in pow")?,
        ),
        (a, b) => ValueKind::Float(float(a).powf(float(b))),
    };
    Ok(ctx.from_all(args, kind))
}

/// Structural equality; numbers compare by value across int and float.
pub fn values_equal(a: &Value, b: &Value) -> Result<bool, String> {
    Ok(match (a.kind(), b.kind()) {
        (ValueKind::Str(x), ValueKind::Str(y)) => x == y,
        (ValueKind::Int(x), ValueKind::Int(y)) => x == y,
        (ValueKind::Int(_) | ValueKind::Float(_), ValueKind::Int(_) | ValueKind::Float(_)) => {
            a.as_number() == b.as_number()
        }
        (ValueKind::Constr(c, xs), ValueKind::Constr(d, ys)) => {
            if c != d || xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys) {
                if !values_equal(x, y)? {
                    return Ok(false);
                }
            }
            true
        }
        (ValueKind::Dict(xs), ValueKind::Dict(ys)) => {
            if xs.len() != ys.len() {
                return Ok(false);
            }
            for (k, x) in xs {
                match b.field(k) {
                    Some(y) if values_equal(x, y)? => {}
                    _ => return Ok(false),
                }
            }
            true
        }
        (ValueKind::Closure(_) | ValueKind::Prim(..), _) | (_, ValueKind::Closure(_) | ValueKind::Prim(..)) => {
            return Err("functions cannot be compared".into())
        }
        _ => false,
    })
}

fn eq(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = values_equal(&args[0], &args[1])?;
    Ok(ctx.boolean(args, b))
}

fn ne(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = !values_equal(&args[0], &args[1])?;
    Ok(ctx.boolean(args, b))
}

fn compare(args: &[Value], op: &str) -> Result<std::cmp::Ordering, String> {
    match (args[0].kind(), args[1].kind()) {
        (ValueKind::Str(a), ValueKind::Str(b)) => Ok(a.cmp(b)),
        (ValueKind::Int(a), ValueKind::Int(b)) => Ok(a.cmp(b)),
        _ => {
            let a = float(num(&args[0], op)?);
            let b = float(num(&args[1], op)?);
            a.partial_cmp(&b).ok_or_else(|| format!("{op}: cannot order NaN"))
        }
    }
}

fn lt(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = compare(args, "<")?.is_lt();
    Ok(ctx.boolean(args, b))
}

fn le(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = compare(args, "<=")?.is_le();
    Ok(ctx.boolean(args, b))
}

fn gt(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = compare(args, ">")?.is_gt();
    Ok(ctx.boolean(args, b))
}

fn ge(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = compare(args, ">=")?.is_ge();
    Ok(ctx.boolean(args, b))
}

fn boolean(v: &Value, op: &str) -> Result<bool, String> {
    match v.as_constr() {
        Some((TRUE, [])) => Ok(true),
        Some((FALSE, [])) => Ok(false),
        _ => Err(format!("{op} expects True or False, got {v}")),
    }
}

fn and(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = boolean(&args[0], "and")? & boolean(&args[1], "and")?;
    Ok(ctx.boolean(args, b))
}

fn or(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let b = boolean(&args[0], "or")? | boolean(&args[1], "or")?;
    Ok(ctx.boolean(args, b))
}

/// Strings concatenate. Lists append by copying the left spine: each new
/// cell depends on the cell it copies, and the right list is shared.
fn concat(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    if let (Some(a), Some(b)) = (args[0].as_str(), args[1].as_str()) {
        let s = format!("{a}{b}");
        return Ok(ctx.from_all(args, ValueKind::Str(s)));
    }
    let cells = args[0].list_cells().ok_or_else(|| format!("++ expects two strings or two lists, got {}", args[0]))?;
    if args[1].list_cells().is_none() {
        return Err(format!("++ expects two strings or two lists, got {}", args[1]));
    }
    let mut acc = args[1].clone();
    for cell in cells.into_iter().rev() {
        let head = match cell.as_constr() {
            Some((CONS, [h, _])) => h.clone(),
            _ => unreachable!(),
        };
        acc = ctx.make(&[cell.addr], ValueKind::Constr(CONS.into(), vec![head, acc]));
    }
    Ok(acc)
}

/// Shortest decimal form that reads back as the same number.
pub fn format_number(v: &Value) -> Option<String> {
    match v.kind() {
        ValueKind::Int(n) => Some(n.to_string()),
        ValueKind::Float(x) => Some(format!("{x}")),
        _ => None,
    }
}

fn num_to_str(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let s = format_number(&args[0]).ok_or_else(|| format!("numToStr expects a number, got {}", args[0]))?;
    Ok(ctx.from_all(args, ValueKind::Str(s)))
}

fn error(_: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    Err(match args[0].as_str() {
        Some(s) => s.to_string(),
        None => args[0].to_string(),
    })
}

fn floor(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let n = match num(&args[0], "floor")? {
        Num::I(i) => i,
        Num::F(x) => x.floor() as i64,
    };
    Ok(ctx.from_all(args, ValueKind::Int(n)))
}

fn ceiling(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let n = match num(&args[0], "ceiling")? {
        Num::I(i) => i,
        Num::F(x) => x.ceil() as i64,
    };
    Ok(ctx.from_all(args, ValueKind::Int(n)))
}

fn sqrt(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let x = float(num(&args[0], "sqrt")?);
    Ok(ctx.from_all(args, ValueKind::Float(x.sqrt())))
}

fn to_float(ctx: &mut PrimCtx<'_>, args: &[Value]) -> Result<Value, String> {
    let x = float(num(&args[0], "toFloat")?);
    Ok(ctx.from_all(args, ValueKind::Float(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(g: &mut DepGraph, kind: ValueKind) -> Value {
        let a = g.add_vertex(&[], Origin::Literal, None);
        Value::new(a, kind)
    }

    fn apply(g: &mut DepGraph, name: &str, args: &[Value]) -> Result<Value, String> {
        let p = lookup(name).unwrap();
        (p.imp)(&mut PrimCtx { graph: g, span: Span::default() }, args)
    }

    #[test]
    fn zero_annihilates_multiplication() {
        let mut g = DepGraph::new();
        let zero = lit(&mut g, ValueKind::Int(0));
        let seven = lit(&mut g, ValueKind::Int(7));
        let r = apply(&mut g, "*", &[zero.clone(), seven.clone()]).unwrap();
        assert_eq!(g.predecessors(r.addr), &[zero.addr]);
        let r = apply(&mut g, "*", &[seven.clone(), zero.clone()]).unwrap();
        assert_eq!(g.predecessors(r.addr), &[zero.addr]);
        let other = lit(&mut g, ValueKind::Float(0.0));
        let r = apply(&mut g, "*", &[zero.clone(), other]).unwrap();
        assert_eq!(g.predecessors(r.addr), &[zero.addr]);
    }

    #[test]
    fn addition_depends_on_both_summands() {
        let mut g = DepGraph::new();
        let a = lit(&mut g, ValueKind::Int(0));
        let b = lit(&mut g, ValueKind::Int(0));
        let r = apply(&mut g, "+", &[a.clone(), b.clone()]).unwrap();
        assert_eq!(g.predecessors(r.addr), &[a.addr, b.addr]);
        let two = lit(&mut g, ValueKind::Int(2));
        let three = lit(&mut g, ValueKind::Int(3));
        let r = apply(&mut g, "*", &[two.clone(), three.clone()]).unwrap();
        assert!(matches!(r.kind(), ValueKind::Int(6)));
        assert_eq!(g.predecessors(r.addr), &[two.addr, three.addr]);
    }

    #[test]
    fn arithmetic_errors() {
        let mut g = DepGraph::new();
        let one = lit(&mut g, ValueKind::Int(1));
        let zero = lit(&mut g, ValueKind::Int(0));
        let s = lit(&mut g, ValueKind::Str("a".into()));
        assert!(apply(&mut g, "/", &[one.clone(), zero.clone()]).unwrap_err().contains("division by zero"));
        assert!(apply(&mut g, "+", &[one.clone(), s]).is_err());
        let r = apply(&mut g, "/", &[one.clone(), one.clone()]).unwrap();
        assert!(matches!(r.kind(), ValueKind::Float(x) if *x == 1.0));
        let big = lit(&mut g, ValueKind::Int(i64::MAX));
        assert!(apply(&mut g, "+", &[big, one]).unwrap_err().contains("overflow"));
    }
}
