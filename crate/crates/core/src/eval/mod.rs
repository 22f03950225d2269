//! Big-step evaluation that builds the dependence graph as it goes.
//!
//! Every introduction form (literal, constructor, dictionary, closure) gets a
//! fresh vertex with an edge from each vertex in the active set `V`. A call
//! runs its body with `V` set to the closure's own vertex plus whatever the
//! argument match consumed; the caller's `V` does not leak in.

pub mod env;
pub mod prim;
pub mod value;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use self::env::Env;
use self::prim::{PrimCtx, Primitive};
use self::value::{Closure, Value, ValueKind};
use crate::desugar::core::{Cont, CoreDef, CoreModule, CorePattern, Elim, Expr, RecDefs};
use crate::graph::{DepGraph, Origin, VertexId};
use crate::span::Span;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct EvalError {
    pub span: Option<Span>,
    pub message: String,
}

impl EvalError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        EvalError { span: Some(span), message: message.into() }
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(sp) => write!(f, "evaluation error at {sp}: {}", self.message),
            None => write!(f, "evaluation error: {}", self.message),
        }
    }
}

type EResult<T> = Result<T, EvalError>;

/// Deepest call nesting allowed before giving up with an error.
pub const MAX_DEPTH: usize = 20_000;

pub struct Evaluator {
    pub graph: DepGraph,
    depth: usize,
    fuel: Option<u64>,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new()
    }
}

impl Evaluator {
    pub fn new() -> Self {
        Evaluator { graph: DepGraph::new(), depth: 0, fuel: None }
    }

    /// Limits the number of evaluation steps; useful for generated programs.
    pub fn with_fuel(mut self, steps: u64) -> Self {
        self.fuel = Some(steps);
        self
    }

    fn alloc(&mut self, v: &[VertexId], origin: Origin, span: Span, kind: ValueKind) -> Value {
        let a = self.graph.add_vertex(v, origin, Some(span));
        let val = Value::new(a, kind);
        self.graph.set_value(a, val.clone());
        val
    }

    /// The environment every module starts from: named primitives, each with
    /// its own vertex.
    pub fn base_env(&mut self) -> Env {
        let mut env = Env::new();
        for p in prim::named() {
            let a = self.graph.add_vertex(&[], Origin::Builtin, None);
            let v = Value::new(a, ValueKind::Prim(p, Vec::new()));
            self.graph.set_value(a, v.clone());
            env = env.bind(p.name, v);
        }
        env
    }

    pub fn eval(&mut self, env: &Env, e: &Expr, v: &[VertexId]) -> EResult<Value> {
        if let Some(fuel) = &mut self.fuel {
            if *fuel == 0 {
                return Err(EvalError { span: None, message: "step limit exceeded".into() });
            }
            *fuel -= 1;
        }
        match e {
            Expr::Var(x, sp) => {
                env.lookup(x).cloned().ok_or_else(|| EvalError::new(*sp, format!("unbound variable {x}")))
            }
            Expr::Int(n, sp) => Ok(self.alloc(v, Origin::Literal, *sp, ValueKind::Int(*n))),
            Expr::Float(x, sp) => Ok(self.alloc(v, Origin::Literal, *sp, ValueKind::Float(*x))),
            Expr::Str(s, sp) => Ok(self.alloc(v, Origin::Literal, *sp, ValueKind::Str(s.clone()))),
            Expr::Constr(c, es, sp) => {
                let args = self.eval_sequence(env, es, v)?;
                Ok(self.alloc(v, Origin::Constructor, *sp, ValueKind::Constr(c.clone(), args)))
            }
            Expr::Dict(fs, sp) => {
                let mut fields = Vec::with_capacity(fs.len());
                for (k, fe) in fs {
                    fields.push((k.clone(), self.eval(env, fe, v)?));
                }
                Ok(self.alloc(v, Origin::Dict, *sp, ValueKind::Dict(fields)))
            }
            Expr::Project(de, x, sp) => {
                let d = self.eval(env, de, v)?;
                project(&d, x, *sp)
            }
            Expr::DProject(de, ke, sp) => {
                let d = self.eval(env, de, v)?;
                let k = self.eval(env, ke, v)?;
                let key = k
                    .as_str()
                    .ok_or_else(|| EvalError::new(*sp, format!("dictionary key must be a string, got {k}")))?;
                project(&d, key, *sp)
            }
            Expr::Op(name) => {
                let p = prim::lookup(name).expect("operators are primitives");
                let a = self.graph.add_vertex(v, Origin::Primitive, None);
                let val = Value::new(a, ValueKind::Prim(p, Vec::new()));
                self.graph.set_value(a, val.clone());
                Ok(val)
            }
            Expr::App(..) => self.eval_app(env, e, v),
            Expr::Lambda(sigma, sp) => {
                let c = Closure { env: env.clone(), rec: Arc::new(Vec::new()), elim: sigma.clone() };
                Ok(self.alloc(v, Origin::Closure, *sp, ValueKind::Closure(c)))
            }
            Expr::Let(p, bound, body, sp) => {
                let val = self.eval(env, bound, v)?;
                let mut binds = Vec::new();
                let mut consumed = v.to_vec();
                match_pattern(&val, p, &mut binds, &mut consumed, *sp)?;
                self.eval(&env.extend(binds), body, &consumed)
            }
            Expr::LetRec(rho, body) => {
                let closures = self.close_definitions(env, rho, v);
                self.eval(&env.extend(closures), body, v)
            }
            Expr::Doc(de, te) => {
                let para = self.eval(env, de, v)?;
                let target = self.eval(env, te, v)?;
                self.graph.attach_doc(target.addr, para.clone());
                Ok(Value::new(target.addr, ValueKind::Doc(para, target)))
            }
        }
    }

    /// Evaluates left to right, stopping at the first error.
    pub fn eval_sequence(&mut self, env: &Env, es: &[Expr], v: &[VertexId]) -> EResult<Vec<Value>> {
        es.iter().map(|e| self.eval(env, e, v)).collect()
    }

    /// One closure per definition, each capturing `env` and all of `rho`.
    pub fn close_definitions(&mut self, env: &Env, rho: &Arc<RecDefs>, v: &[VertexId]) -> Vec<(String, Value)> {
        rho.iter()
            .map(|(name, sigma)| {
                let c = Closure { env: env.clone(), rec: rho.clone(), elim: sigma.clone() };
                let a = self.graph.add_vertex(v, Origin::Closure, None);
                let val = Value::new(a, ValueKind::Closure(c));
                self.graph.set_value(a, val.clone());
                (name.clone(), val)
            })
            .collect()
    }

    fn eval_app(&mut self, env: &Env, e: &Expr, v: &[VertexId]) -> EResult<Value> {
        // Unwind the application spine: head applied to args, leftmost first.
        let mut args: Vec<&Expr> = Vec::new();
        let mut head = e;
        let mut span = Span::default();
        while let Expr::App(f, a, sp) = head {
            args.push(a);
            span = *sp;
            head = f;
        }
        args.reverse();

        // A saturated primitive call goes straight to the primitive, with no
        // vertex for the operator itself.
        let direct = match head {
            Expr::Op(name) => prim::lookup(name),
            Expr::Var(x, _) => match env.lookup(x).map(|f| f.kind()) {
                Some(ValueKind::Prim(p, held)) if held.is_empty() => Some(*p),
                _ => None,
            },
            _ => None,
        };
        if let Some(p) = direct.filter(|p| p.arity == args.len()) {
            let vals = args.iter().map(|a| self.eval(env, a, v)).collect::<EResult<Vec<_>>>()?;
            return self.apply_primitive(p, &vals, span);
        }

        let mut f = self.eval(env, head, v)?;
        for a in args {
            f = self.apply(f, env, a, v, span)?;
        }
        Ok(f)
    }

    fn apply(&mut self, f: Value, env: &Env, arg: &Expr, v: &[VertexId], span: Span) -> EResult<Value> {
        match f.kind() {
            ValueKind::Closure(c) => {
                let closed = self.close_definitions(&c.env, &c.rec, &[f.strip().addr]);
                let av = self.eval(env, arg, v)?;
                let mut binds = Vec::new();
                let mut active = Vec::new();
                let body = match_elim(av, &c.elim, &mut binds, &mut active, span)?;
                active.push(f.strip().addr);
                let body_env = c.env.extend(closed).extend(binds);
                if self.depth >= MAX_DEPTH {
                    return Err(EvalError::new(span, "recursion too deep"));
                }
                self.depth += 1;
                let r = self.eval(&body_env, body, &active);
                self.depth -= 1;
                r
            }
            ValueKind::Prim(p, held) => {
                let av = self.eval(env, arg, v)?;
                let mut all = held.clone();
                all.push(av);
                if all.len() == p.arity {
                    self.apply_primitive(p, &all, span)
                } else {
                    Ok(self.alloc(v, Origin::Primitive, span, ValueKind::Prim(p, all)))
                }
            }
            _ => Err(EvalError::new(span, format!("cannot apply {f}: it is not a function"))),
        }
    }

    pub fn apply_primitive(&mut self, p: &'static Primitive, args: &[Value], span: Span) -> EResult<Value> {
        let stripped: Vec<Value> = args.iter().map(|a| a.strip().clone()).collect();
        (p.imp)(&mut PrimCtx { graph: &mut self.graph, span }, &stripped).map_err(|m| EvalError::new(span, m))
    }

    /// Evaluates a module's definitions in order, starting from `env`.
    /// Returns the environment after the definitions, the bindings the module
    /// itself introduced, and the value of its final term if it has one.
    pub fn eval_module(&mut self, env: &Env, m: &CoreModule) -> EResult<(Env, Vec<(String, Value)>, Option<Value>)> {
        let mut env = env.clone();
        let mut own = Vec::new();
        for d in &m.defs {
            let binds = match d {
                CoreDef::Def(p, e, sp) => {
                    let val = self.eval(&env, e, &[])?;
                    let mut binds = Vec::new();
                    match_pattern(&val, p, &mut binds, &mut Vec::new(), *sp)?;
                    binds
                }
                CoreDef::Rec(rho) => self.close_definitions(&env, rho, &[]),
            };
            env = env.extend(binds.iter().cloned());
            own.extend(binds);
        }
        let result = m.body.as_ref().map(|e| self.eval(&env, e, &[])).transpose()?;
        Ok((env, own, result))
    }
}

fn project(d: &Value, key: &str, span: Span) -> EResult<Value> {
    match d.kind() {
        ValueKind::Dict(_) => d
            .field(key)
            .cloned()
            .ok_or_else(|| EvalError::new(span, format!("dictionary has no field {key}"))),
        _ => Err(EvalError::new(span, format!("cannot look up {key} in {d}: not a dictionary"))),
    }
}

/// Matches one argument against an eliminator, returning the selected body.
/// Roots of constructor and dictionary values that the match inspects are
/// pushed to `consumed`.
pub fn match_elim<'e>(
    v: Value,
    sigma: &'e Elim,
    binds: &mut Vec<(String, Value)>,
    consumed: &mut Vec<VertexId>,
    span: Span,
) -> EResult<&'e Expr> {
    let mut queue = VecDeque::from([v]);
    let mut elim = sigma;
    loop {
        let next: &Cont = match elim {
            Elim::Var(x, k) => {
                binds.push((x.clone(), queue.pop_front().expect("pattern depth matches values")));
                k
            }
            Elim::Dict(xs, k) => {
                let d = queue.pop_front().expect("pattern depth matches values");
                if d.as_dict().is_none() {
                    return Err(EvalError::new(span, format!("pattern match failure: {d} is not a dictionary")));
                }
                for x in xs.iter().rev() {
                    let fv = d
                        .field(x)
                        .ok_or_else(|| EvalError::new(span, format!("pattern match failure: {d} has no field {x}")))?;
                    queue.push_front(fv.clone());
                }
                consumed.push(d.strip().addr);
                k
            }
            Elim::Constr(branches) => {
                let c = queue.pop_front().expect("pattern depth matches values");
                let Some((name, args)) = c.as_constr() else {
                    return Err(EvalError::new(span, format!("pattern match failure: {c} is not a constructor value")));
                };
                let Some((_, k)) = branches.iter().find(|(b, _)| b == name) else {
                    let expected: Vec<&str> = branches.iter().map(|(b, _)| b.as_str()).collect();
                    return Err(EvalError::new(
                        span,
                        format!("pattern match failure: {c} matches none of {}", expected.join(", ")),
                    ));
                };
                for a in args.iter().rev() {
                    queue.push_front(a.clone());
                }
                consumed.push(c.strip().addr);
                k
            }
        };
        match next {
            Cont::Elim(s) => elim = s,
            Cont::Expr(body) => {
                debug_assert!(queue.is_empty());
                return Ok(body);
            }
        }
    }
}

pub fn match_pattern(
    v: &Value,
    p: &CorePattern,
    binds: &mut Vec<(String, Value)>,
    consumed: &mut Vec<VertexId>,
    span: Span,
) -> EResult<()> {
    match p {
        CorePattern::Var(x) => binds.push((x.clone(), v.clone())),
        CorePattern::Constr(c, ps) => match v.as_constr() {
            Some((name, args)) if name == c && args.len() == ps.len() => {
                consumed.push(v.strip().addr);
                for (a, q) in args.iter().zip(ps) {
                    match_pattern(a, q, binds, consumed, span)?;
                }
            }
            _ => return Err(EvalError::new(span, format!("pattern match failure: {v} does not match {c}"))),
        },
        CorePattern::Dict(fs) => {
            if v.as_dict().is_none() {
                return Err(EvalError::new(span, format!("pattern match failure: {v} is not a dictionary")));
            }
            consumed.push(v.strip().addr);
            for (k, q) in fs {
                let fv = v
                    .field(k)
                    .ok_or_else(|| EvalError::new(span, format!("pattern match failure: {v} has no field {k}")))?;
                match_pattern(fv, q, binds, consumed, span)?;
            }
        }
    }
    Ok(())
}
