//! A plain interpreter for the core language: no graph, no addresses.
//!
//! Each value carries a single taint bit instead. A value's bit is the OR of
//! the bits of whatever it would depend on in the graph, so running once with
//! one input part tainted shows exactly which results that part reaches.
//! Kept deliberately separate from the engine's evaluator; it shares only
//! the front end and the module loader.

use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;
use std::sync::Arc;

use fluence_core::desugar::core::{Cont, CoreDef, CoreModule, CorePattern, Elim, Expr, RecDefs};
use fluence_core::desugar::desugar_module;
use fluence_core::desugar::signature::Signature;
use fluence_core::eval::value::Erased;
use fluence_core::loader::{ModuleGraph, PRELUDE};
use fluence_core::syntax::parse_source;
use fluence_core::SourceId;

#[derive(Clone)]
pub struct RVal {
    pub taint: bool,
    pub kind: Rc<RKind>,
}

pub enum RKind {
    Int(i64),
    Float(f64),
    Str(String),
    Constr(String, Vec<RVal>),
    Dict(Vec<(String, RVal)>),
    Closure { env: REnv, rec: Arc<RecDefs>, elim: Arc<Elim> },
    Prim { name: &'static str, arity: usize, held: Vec<RVal> },
    Doc(RVal, RVal),
}

impl RVal {
    fn new(taint: bool, kind: RKind) -> Self {
        RVal { taint, kind: Rc::new(kind) }
    }

    pub fn strip(&self) -> &RVal {
        let mut v = self;
        while let RKind::Doc(_, t) = &*v.kind {
            v = t;
        }
        v
    }

    pub fn kind(&self) -> &RKind {
        &self.strip().kind
    }

    pub fn erase(&self) -> Erased {
        match self.kind() {
            RKind::Int(n) => Erased::Int(*n),
            RKind::Float(x) => Erased::Float(*x),
            RKind::Str(s) => Erased::Str(s.clone()),
            RKind::Constr(c, args) => Erased::Constr(c.clone(), args.iter().map(RVal::erase).collect()),
            RKind::Dict(fs) => Erased::Dict(fs.iter().map(|(k, v)| (k.clone(), v.erase())).collect()),
            RKind::Closure { .. } | RKind::Prim { .. } => Erased::Function,
            RKind::Doc(..) => unreachable!(),
        }
    }

    /// Taint bits of the value's parts, in the same order as the engine's
    /// `Value::subtree`.
    pub fn subtree_taints(&self, out: &mut Vec<bool>) {
        out.push(self.taint);
        match &*self.kind {
            RKind::Constr(_, args) => args.iter().for_each(|a| a.subtree_taints(out)),
            RKind::Dict(fs) => fs.iter().for_each(|(_, v)| v.subtree_taints(out)),
            RKind::Doc(_, t) => t.subtree_taints(out),
            _ => {}
        }
    }

    /// A copy with the parts at the given subtree positions tainted.
    pub fn taint_at(&self, positions: &[usize]) -> RVal {
        let mut next = 0;
        self.retaint(positions, &mut next)
    }

    fn retaint(&self, positions: &[usize], next: &mut usize) -> RVal {
        let here = positions.contains(next);
        *next += 1;
        let kind = match &*self.kind {
            RKind::Constr(c, args) => RKind::Constr(c.clone(), args.iter().map(|a| a.retaint(positions, next)).collect()),
            RKind::Dict(fs) => RKind::Dict(fs.iter().map(|(k, v)| (k.clone(), v.retaint(positions, next))).collect()),
            RKind::Doc(p, t) => {
                // The documented value shares the target's position.
                let t = t.retaint(positions, next);
                return RVal::new(t.taint || here, RKind::Doc(p.clone(), t));
            }
            _ => return RVal { taint: self.taint || here, kind: self.kind.clone() },
        };
        RVal::new(self.taint || here, kind)
    }

    fn as_constr(&self) -> Option<(&str, &[RVal])> {
        match self.kind() {
            RKind::Constr(c, args) => Some((c, args)),
            _ => None,
        }
    }

    fn field(&self, k: &str) -> Option<&RVal> {
        match self.kind() {
            RKind::Dict(fs) => fs.iter().find(|(x, _)| x == k).map(|(_, v)| v),
            _ => None,
        }
    }
}

impl Drop for RVal {
    // Lists nest deeply; unlink them without recursion.
    fn drop(&mut self) {
        if Rc::strong_count(&self.kind) != 1 {
            return;
        }
        let hole = || Rc::new(RKind::Int(0));
        let mut stack = vec![std::mem::replace(&mut self.kind, hole())];
        while let Some(rc) = stack.pop() {
            let Ok(kind) = Rc::try_unwrap(rc) else { continue };
            match kind {
                RKind::Constr(_, args) | RKind::Prim { held: args, .. } => {
                    stack.extend(args.into_iter().map(|mut a| std::mem::replace(&mut a.kind, hole())))
                }
                RKind::Dict(fs) => stack.extend(fs.into_iter().map(|(_, mut a)| std::mem::replace(&mut a.kind, hole()))),
                RKind::Doc(mut p, mut t) => {
                    stack.push(std::mem::replace(&mut p.kind, hole()));
                    stack.push(std::mem::replace(&mut t.kind, hole()));
                }
                _ => {}
            }
        }
    }
}

/// Environments as plain persistent lists.
#[derive(Clone, Default)]
pub struct REnv(Option<Rc<(String, RVal, REnv)>>);

impl REnv {
    fn bind(&self, x: &str, v: RVal) -> REnv {
        REnv(Some(Rc::new((x.to_string(), v, self.clone()))))
    }

    fn extend(&self, bs: &[(String, RVal)]) -> REnv {
        bs.iter().fold(self.clone(), |e, (x, v)| e.bind(x, v.clone()))
    }

    fn get(&self, x: &str) -> Option<&RVal> {
        let mut cur = self.0.as_deref();
        while let Some((y, v, next)) = cur {
            if y == x {
                return Some(v);
            }
            cur = next.0.as_deref();
        }
        None
    }
}

impl Drop for REnv {
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(rc) = cur {
            match Rc::try_unwrap(rc) {
                Ok((_, _, mut next)) => cur = next.0.take(),
                Err(_) => break,
            }
        }
    }
}

type R<T> = Result<T, String>;

const NAMED: &[(&str, usize)] =
    &[("numToStr", 1), ("error", 1), ("floor", 1), ("ceiling", 1), ("sqrt", 1), ("toFloat", 1), ("mod", 2), ("quot", 2), ("pow", 2)];

fn op_arity(name: &str) -> Option<(&'static str, usize)> {
    const OPS: &[&str] = &["+", "-", "*", "/", "==", "!=", "<", "<=", ">", ">=", "and", "or", "++"];
    OPS.iter().find(|o| **o == name).map(|o| (*o, 2)).or_else(|| NAMED.iter().find(|(n, _)| *n == name).copied())
}

fn is_true(v: &RVal) -> R<bool> {
    match v.as_constr() {
        Some(("True", [])) => Ok(true),
        Some(("False", [])) => Ok(false),
        _ => Err("expected a boolean".into()),
    }
}

fn boolean(b: bool, taint: bool) -> RVal {
    RVal::new(taint, RKind::Constr(if b { "True" } else { "False" }.into(), vec![]))
}

fn number(v: &RVal) -> R<f64> {
    match v.kind() {
        RKind::Int(n) => Ok(*n as f64),
        RKind::Float(x) => Ok(*x),
        _ => Err("expected a number".into()),
    }
}

fn equal(a: &RVal, b: &RVal) -> R<bool> {
    Ok(match (a.kind(), b.kind()) {
        (RKind::Int(x), RKind::Int(y)) => x == y,
        (RKind::Int(_) | RKind::Float(_), RKind::Int(_) | RKind::Float(_)) => number(a)? == number(b)?,
        (RKind::Str(x), RKind::Str(y)) => x == y,
        (RKind::Constr(c, xs), RKind::Constr(d, ys)) => {
            if c != d || xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys) {
                if !equal(x, y)? {
                    return Ok(false);
                }
            }
            true
        }
        (RKind::Dict(xs), RKind::Dict(_)) => {
            let RKind::Dict(ys) = b.kind() else { unreachable!() };
            if xs.len() != ys.len() {
                return Ok(false);
            }
            for (k, x) in xs {
                match b.field(k) {
                    Some(y) if equal(x, y)? => {}
                    _ => return Ok(false),
                }
            }
            true
        }
        (RKind::Closure { .. } | RKind::Prim { .. }, _) | (_, RKind::Closure { .. } | RKind::Prim { .. }) => {
            return Err("functions cannot be compared".into())
        }
        _ => false,
    })
}

fn order(a: &RVal, b: &RVal) -> R<std::cmp::Ordering> {
    match (a.kind(), b.kind()) {
        (RKind::Str(x), RKind::Str(y)) => Ok(x.cmp(y)),
        (RKind::Int(x), RKind::Int(y)) => Ok(x.cmp(y)),
        _ => number(a)?.partial_cmp(&number(b)?).ok_or_else(|| "NaN".into()),
    }
}

fn is_zero(v: &RVal) -> bool {
    matches!(v.kind(), RKind::Int(0)) || matches!(v.kind(), RKind::Float(x) if *x == 0.0)
}

fn list_items(v: &RVal) -> Option<Vec<RVal>> {
    let mut out = Vec::new();
    let mut cur = v.clone();
    loop {
        let next = match cur.as_constr()? {
            ("[]", []) => return Some(out),
            ("Cons", [h, t]) => {
                out.push(h.clone());
                t.clone()
            }
            _ => return None,
        };
        cur = next;
    }
}

/// Shortest form that reads back as the same number.
fn show_number(v: &RVal) -> R<String> {
    match v.kind() {
        RKind::Int(n) => Ok(format!("{n}")),
        RKind::Float(x) => Ok(format!("{x}")),
        _ => Err("numToStr expects a number".into()),
    }
}

fn int_arith(name: &str, a: i64, b: i64) -> R<i64> {
    let r = match name {
        "+" => a.checked_add(b),
        "-" => a.checked_sub(b),
        "*" => a.checked_mul(b),
        "mod" => a.checked_rem_euclid(b),
        "quot" => a.checked_div(b),
        "pow" => u32::try_from(b).ok().and_then(|b| a.checked_pow(b)),
        _ => unreachable!(),
    };
    r.ok_or_else(|| format!("{name} failed"))
}

fn call_prim(name: &str, args: &[RVal]) -> R<RVal> {
    let args: Vec<RVal> = args.iter().map(|a| a.strip().clone()).collect();
    let all = args.iter().any(|a| a.taint);
    let num = |kind| Ok(RVal::new(all, kind));
    match name {
        "+" | "-" | "*" => {
            let kind = match (args[0].kind(), args[1].kind()) {
                (RKind::Int(a), RKind::Int(b)) => RKind::Int(int_arith(name, *a, *b)?),
                _ => {
                    let (a, b) = (number(&args[0])?, number(&args[1])?);
                    RKind::Float(match name {
                        "+" => a + b,
                        "-" => a - b,
                        _ => a * b,
                    })
                }
            };
            let taint = if name != "*" {
                all
            } else if is_zero(&args[0]) {
                args[0].taint
            } else if is_zero(&args[1]) {
                args[1].taint
            } else {
                all
            };
            Ok(RVal::new(taint, kind))
        }
        "/" => {
            let (a, b) = (number(&args[0])?, number(&args[1])?);
            if b == 0.0 {
                return Err("division by zero".into());
            }
            num(RKind::Float(a / b))
        }
        "mod" | "quot" => match (args[0].kind(), args[1].kind()) {
            (RKind::Int(a), RKind::Int(b)) => num(RKind::Int(int_arith(name, *a, *b)?)),
            _ => Err(format!("{name} expects integers")),
        },
        "pow" => match (args[0].kind(), args[1].kind()) {
            (RKind::Int(a), RKind::Int(b)) if *b >= 0 => num(RKind::Int(int_arith(name, *a, *b)?)),
            _ => num(RKind::Float(number(&args[0])?.powf(number(&args[1])?))),
        },
        "==" => Ok(boolean(equal(&args[0], &args[1])?, all)),
        "!=" => Ok(boolean(!equal(&args[0], &args[1])?, all)),
        "<" => Ok(boolean(order(&args[0], &args[1])?.is_lt(), all)),
        "<=" => Ok(boolean(order(&args[0], &args[1])?.is_le(), all)),
        ">" => Ok(boolean(order(&args[0], &args[1])?.is_gt(), all)),
        ">=" => Ok(boolean(order(&args[0], &args[1])?.is_ge(), all)),
        "and" => Ok(boolean(is_true(&args[0])? & is_true(&args[1])?, all)),
        "or" => Ok(boolean(is_true(&args[0])? | is_true(&args[1])?, all)),
        "++" => {
            if let (RKind::Str(a), RKind::Str(b)) = (args[0].kind(), args[1].kind()) {
                return num(RKind::Str(format!("{a}{b}")));
            }
            // Copy the left spine; each copy inherits the bit of its original.
            let mut cells = Vec::new();
            let mut cur = args[0].clone();
            loop {
                let next = match cur.as_constr() {
                    Some(("[]", [])) => break,
                    Some(("Cons", [h, t])) => {
                        cells.push((cur.taint, h.clone()));
                        t.clone()
                    }
                    _ => return Err("++ expects lists or strings".into()),
                };
                cur = next;
            }
            if list_items(&args[1]).is_none() {
                return Err("++ expects lists or strings".into());
            }
            let mut acc = args[1].clone();
            for (taint, h) in cells.into_iter().rev() {
                acc = RVal::new(taint, RKind::Constr("Cons".into(), vec![h, acc]));
            }
            Ok(acc)
        }
        "numToStr" => num(RKind::Str(show_number(&args[0])?)),
        "error" => Err(match args[0].kind() {
            RKind::Str(s) => s.clone(),
            _ => "error".into(),
        }),
        "floor" | "ceiling" => match args[0].kind() {
            RKind::Int(n) => num(RKind::Int(*n)),
            RKind::Float(x) => num(RKind::Int(if name == "floor" { x.floor() } else { x.ceil() } as i64)),
            _ => Err(format!("{name} expects a number")),
        },
        "sqrt" => num(RKind::Float(number(&args[0])?.sqrt())),
        "toFloat" => num(RKind::Float(number(&args[0])?)),
        _ => Err(format!("unknown primitive {name}")),
    }
}

/// Taint to apply to a top-level binding as soon as it is defined.
pub type TaintSpec = BTreeMap<String, Vec<usize>>;

pub struct Interp<'t> {
    taints: &'t TaintSpec,
    depth: usize,
}

const MAX_DEPTH: usize = 20_000;

impl<'t> Interp<'t> {
    pub fn new(taints: &'t TaintSpec) -> Self {
        Interp { taints, depth: 0 }
    }

    pub fn base_env(&self) -> REnv {
        NAMED.iter().fold(REnv::default(), |env, (name, arity)| {
            env.bind(name, RVal::new(false, RKind::Prim { name, arity: *arity, held: vec![] }))
        })
    }

    fn eval(&mut self, env: &REnv, e: &Expr, ctx: bool) -> R<RVal> {
        match e {
            Expr::Var(x, _) => env.get(x).cloned().ok_or_else(|| format!("unbound variable {x}")),
            Expr::Int(n, _) => Ok(RVal::new(ctx, RKind::Int(*n))),
            Expr::Float(x, _) => Ok(RVal::new(ctx, RKind::Float(*x))),
            Expr::Str(s, _) => Ok(RVal::new(ctx, RKind::Str(s.clone()))),
            Expr::Constr(c, es, _) => {
                let args = es.iter().map(|a| self.eval(env, a, ctx)).collect::<R<Vec<_>>>()?;
                Ok(RVal::new(ctx, RKind::Constr(c.clone(), args)))
            }
            Expr::Dict(fs, _) => {
                let mut out = Vec::new();
                for (k, fe) in fs {
                    out.push((k.clone(), self.eval(env, fe, ctx)?));
                }
                Ok(RVal::new(ctx, RKind::Dict(out)))
            }
            Expr::Project(d, k, _) => {
                let d = self.eval(env, d, ctx)?;
                d.field(k).cloned().ok_or_else(|| format!("no field {k}"))
            }
            Expr::DProject(d, k, _) => {
                let d = self.eval(env, d, ctx)?;
                let k = self.eval(env, k, ctx)?;
                let RKind::Str(k) = k.kind() else { return Err("key is not a string".into()) };
                d.field(k).cloned().ok_or_else(|| format!("no field {k}"))
            }
            Expr::Op(name) => {
                let (name, arity) = op_arity(name).ok_or("unknown operator")?;
                Ok(RVal::new(ctx, RKind::Prim { name, arity, held: vec![] }))
            }
            Expr::App(..) => {
                let mut args = Vec::new();
                let mut head = e;
                while let Expr::App(f, a, _) = head {
                    args.push(&**a);
                    head = f;
                }
                args.reverse();
                let direct = match head {
                    Expr::Op(name) => op_arity(name),
                    Expr::Var(x, _) => match env.get(x).map(RVal::kind) {
                        Some(RKind::Prim { name, arity, held }) if held.is_empty() => Some((*name, *arity)),
                        _ => None,
                    },
                    _ => None,
                };
                if let Some((name, arity)) = direct {
                    if arity == args.len() {
                        let vals = args.iter().map(|a| self.eval(env, a, ctx)).collect::<R<Vec<_>>>()?;
                        return call_prim(name, &vals);
                    }
                }
                let mut f = self.eval(env, head, ctx)?;
                for a in args {
                    f = self.apply(f, env, a, ctx)?;
                }
                Ok(f)
            }
            Expr::Lambda(sigma, _) => {
                Ok(RVal::new(ctx, RKind::Closure { env: env.clone(), rec: Arc::new(vec![]), elim: sigma.clone() }))
            }
            Expr::Let(p, bound, body, _) => {
                let v = self.eval(env, bound, ctx)?;
                let mut binds = Vec::new();
                let mut used = ctx;
                bind_pattern(&v, p, &mut binds, &mut used)?;
                self.eval(&env.extend(&binds), body, used)
            }
            Expr::LetRec(rho, body) => {
                let fs = close(env, rho, ctx);
                self.eval(&env.extend(&fs), body, ctx)
            }
            Expr::Doc(d, t) => {
                let para = self.eval(env, d, ctx)?;
                let target = self.eval(env, t, ctx)?;
                Ok(RVal::new(target.taint, RKind::Doc(para, target)))
            }
        }
    }

    fn apply(&mut self, f: RVal, env: &REnv, arg: &Expr, ctx: bool) -> R<RVal> {
        match f.kind() {
            RKind::Closure { env: cenv, rec, elim } => {
                let fs = close(cenv, rec, f.taint);
                let a = self.eval(env, arg, ctx)?;
                let mut binds = Vec::new();
                let mut used = f.taint;
                let body = select(a, elim, &mut binds, &mut used)?;
                if self.depth >= MAX_DEPTH {
                    return Err("recursion too deep".into());
                }
                self.depth += 1;
                let r = self.eval(&cenv.extend(&fs).extend(&binds), body, used);
                self.depth -= 1;
                r
            }
            RKind::Prim { name, arity, held } => {
                let a = self.eval(env, arg, ctx)?;
                let mut all = held.clone();
                all.push(a);
                if all.len() == *arity {
                    call_prim(name, &all)
                } else {
                    Ok(RVal::new(ctx, RKind::Prim { name, arity: *arity, held: all }))
                }
            }
            _ => Err("not a function".into()),
        }
    }

    /// Runs a module's definitions from `env`; returns the new environment,
    /// the module's own bindings, and its final value if any.
    /// Taints apply only when `entry` is set.
    pub fn module(&mut self, env: &REnv, m: &CoreModule, entry: bool) -> R<(REnv, Vec<(String, RVal)>, Option<RVal>)> {
        let mut env = env.clone();
        let mut own = Vec::new();
        for d in &m.defs {
            let mut binds = match d {
                CoreDef::Def(p, e, _) => {
                    let v = self.eval(&env, e, false)?;
                    let mut binds = Vec::new();
                    bind_pattern(&v, p, &mut binds, &mut false)?;
                    binds
                }
                CoreDef::Rec(rho) => close(&env, rho, false),
            };
            for (x, v) in binds.iter_mut().filter(|_| entry) {
                if let Some(ps) = self.taints.get(x) {
                    *v = v.taint_at(ps);
                }
            }
            env = env.extend(&binds);
            own.extend(binds);
        }
        let body = match &m.body {
            Some(e) => Some(self.eval(&env, e, false)?),
            None => None,
        };
        Ok((env, own, body))
    }
}

fn close(env: &REnv, rho: &Arc<RecDefs>, taint: bool) -> Vec<(String, RVal)> {
    rho.iter()
        .map(|(x, s)| (x.clone(), RVal::new(taint, RKind::Closure { env: env.clone(), rec: rho.clone(), elim: s.clone() })))
        .collect()
}

fn select<'e>(v: RVal, sigma: &'e Elim, binds: &mut Vec<(String, RVal)>, used: &mut bool) -> R<&'e Expr> {
    let mut pending = VecDeque::from([v]);
    let mut elim = sigma;
    loop {
        let k = match elim {
            Elim::Var(x, k) => {
                binds.push((x.clone(), pending.pop_front().unwrap()));
                k
            }
            Elim::Dict(xs, k) => {
                let d = pending.pop_front().unwrap();
                if !matches!(d.kind(), RKind::Dict(_)) {
                    return Err("not a dictionary".into());
                }
                for x in xs.iter().rev() {
                    pending.push_front(d.field(x).ok_or("missing field")?.clone());
                }
                *used |= d.strip().taint;
                k
            }
            Elim::Constr(bs) => {
                let c = pending.pop_front().unwrap();
                let (name, args) = c.as_constr().ok_or("not a constructor")?;
                let (_, k) = bs.iter().find(|(b, _)| b == name).ok_or("no matching branch")?;
                for a in args.iter().rev() {
                    pending.push_front(a.clone());
                }
                *used |= c.strip().taint;
                k
            }
        };
        match k {
            Cont::Elim(s) => elim = s,
            Cont::Expr(e) => return Ok(e),
        }
    }
}

fn bind_pattern(v: &RVal, p: &CorePattern, binds: &mut Vec<(String, RVal)>, used: &mut bool) -> R<()> {
    match p {
        CorePattern::Var(x) => binds.push((x.clone(), v.clone())),
        CorePattern::Constr(c, ps) => {
            let (name, args) = v.as_constr().ok_or("not a constructor")?;
            if name != c || args.len() != ps.len() {
                return Err(format!("does not match {c}"));
            }
            *used |= v.strip().taint;
            for (a, q) in args.iter().zip(ps) {
                bind_pattern(a, q, binds, used)?;
            }
        }
        CorePattern::Dict(fs) => {
            if !matches!(v.kind(), RKind::Dict(_)) {
                return Err("not a dictionary".into());
            }
            *used |= v.strip().taint;
            for (k, q) in fs {
                bind_pattern(v.field(k).ok_or("missing field")?, q, binds, used)?;
            }
        }
    }
    Ok(())
}

/// Evaluates a loaded program: the prelude, then each module in order, each
/// seeing only its direct imports.
pub fn run_modules(modules: &ModuleGraph, taints: &TaintSpec) -> R<RVal> {
    let sig = Signature::builtin();
    let mut it = Interp::new(taints);
    let base = it.base_env();
    let prelude = parse_source(PRELUDE, SourceId(0)).map_err(|e| e.to_string())?;
    let prelude = desugar_module(&prelude, &sig).map_err(|e| e.to_string())?;
    let (_, prelude_own, _) = it.module(&base, &prelude, false)?;
    let start = base.extend(&prelude_own);
    let mut exports: BTreeMap<&str, Vec<(String, RVal)>> = BTreeMap::new();
    let mut result = None;
    for name in &modules.order {
        let node = &modules.nodes[name];
        let core = desugar_module(&node.surface, &sig).map_err(|e| e.to_string())?;
        let mut env = start.clone();
        for imp in &node.imports {
            env = env.extend(&exports[imp.as_str()]);
        }
        let (_, own, body) = it.module(&env, &core, *name == modules.entry)?;
        if *name == modules.entry {
            result = body;
        } else {
            exports.insert(name, own);
        }
    }
    result.ok_or_else(|| "the program has no final term".into())
}
