//! Small random programs, well typed by construction so most of them run.
//!
//! Values are numbers, booleans, strings, integer lists or two-field records.
//! Most syntax shows up somewhere, `@doc` and paragraphs included. Runtime
//! failures such as overflow stay possible on purpose, since both
//! interpreters must fail on the same programs.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    List,
    Str,
    Rec,
}

struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
    /// Top-level functions from (list, int) to int.
    list_funs: Vec<String>,
    /// Top-level functions from records to int.
    rec_funs: Vec<String>,
}

type Scope = Vec<(String, Ty)>;

/// The program for a given seed. Same seed, same text.
pub fn program(seed: u64) -> String {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0, list_funs: vec![], rec_funs: vec![] };
    g.module()
}

impl Gen {
    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn module(&mut self) -> String {
        let mut out = String::new();
        let mut scope: Scope = Vec::new();
        let n = self.rng.gen_range(1..=4);
        for _ in 0..n {
            match self.rng.gen_range(0..4) {
                0 => out.push_str(&self.list_fun()),
                1 => out.push_str(&self.rec_fun()),
                _ => {
                    let ty = *[Ty::Int, Ty::List, Ty::Rec, Ty::Str, Ty::Bool].choose(&mut self.rng).unwrap();
                    let x = self.name("v");
                    let e = self.expr(ty, 3, &scope);
                    out.push_str(&format!("def {x} = {e}\n\n"));
                    scope.push((x, ty));
                }
            }
        }
        let body = match self.rng.gen_range(0..4) {
            0 => format!("Pair({}, {})", self.expr(Ty::Int, 3, &scope), self.expr(Ty::List, 3, &scope)),
            1 => format!(
                "{{total: {}, items: {}, label: {}}}",
                self.expr(Ty::Int, 3, &scope),
                self.expr(Ty::List, 2, &scope),
                self.expr(Ty::Str, 2, &scope)
            ),
            2 => format!("toFloat({}) / 4", self.expr(Ty::Int, 3, &scope)),
            _ => {
                let ty = *[Ty::Int, Ty::List, Ty::Rec, Ty::Str, Ty::Bool].choose(&mut self.rng).unwrap();
                self.expr(ty, 4, &scope)
            }
        };
        out.push_str(&body);
        out.push('\n');
        out
    }

    fn list_fun(&mut self) -> String {
        let f = self.name("f");
        let empty = self.expr(Ty::Int, 2, &vec![("n".into(), Ty::Int)]);
        let scope = vec![("h".into(), Ty::Int), ("t".into(), Ty::List), ("n".into(), Ty::Int)];
        let cons = self.expr(Ty::Int, 2, &scope);
        self.list_funs.push(f.clone());
        format!("def {f}([], n): {empty}\ndef {f}([h, *t], n): {cons}\n\n")
    }

    fn rec_fun(&mut self) -> String {
        let f = self.name("g");
        let scope = vec![("x".into(), Ty::Int), ("y".into(), Ty::Int)];
        let body = self.expr(Ty::Int, 3, &scope);
        self.rec_funs.push(f.clone());
        format!("def {f}({{a: x, b: y}}): {body}\n\n")
    }

    fn var(&mut self, ty: Ty, scope: &Scope) -> Option<String> {
        let xs: Vec<&String> = scope.iter().filter(|(_, t)| *t == ty).map(|(x, _)| x).collect();
        xs.choose(&mut self.rng).map(|x| x.to_string())
    }

    fn with(scope: &Scope, x: &str, ty: Ty) -> Scope {
        let mut s = scope.clone();
        s.push((x.to_string(), ty));
        s
    }

    fn expr(&mut self, ty: Ty, depth: u32, scope: &Scope) -> String {
        if depth == 0 || self.rng.gen_bool(0.25) {
            if let Some(x) = self.var(ty, scope).filter(|_| self.rng.gen_bool(0.6)) {
                return x;
            }
            return self.leaf(ty, scope);
        }
        let d = depth - 1;
        match ty {
            Ty::Int => self.int(d, scope),
            Ty::Bool => self.boolean(d, scope),
            Ty::List => self.list(d, scope),
            Ty::Str => self.string(d, scope),
            Ty::Rec => format!("{{a: {}, b: {}}}", self.expr(Ty::Int, d, scope), self.expr(Ty::Int, d, scope)),
        }
    }

    fn leaf(&mut self, ty: Ty, _scope: &Scope) -> String {
        match ty {
            // Zero often, to exercise multiplication by zero.
            Ty::Int => (if self.rng.gen_bool(0.3) { 0 } else { self.rng.gen_range(1..10) }).to_string(),
            Ty::Bool => ["True", "False"].choose(&mut self.rng).unwrap().to_string(),
            Ty::List => {
                let n = self.rng.gen_range(0..4);
                let items: Vec<String> = (0..n).map(|_| self.leaf(Ty::Int, _scope)).collect();
                format!("[{}]", items.join(", "))
            }
            Ty::Str => ["\"a\"", "\"bc\"", "\"\""].choose(&mut self.rng).unwrap().to_string(),
            Ty::Rec => format!("{{a: {}, b: {}}}", self.leaf(Ty::Int, _scope), self.leaf(Ty::Int, _scope)),
        }
    }

    fn int(&mut self, d: u32, s: &Scope) -> String {
        match self.rng.gen_range(0..14) {
            0 => format!("({} + {})", self.expr(Ty::Int, d, s), self.expr(Ty::Int, d, s)),
            1 => format!("({} - {})", self.expr(Ty::Int, d, s), self.expr(Ty::Int, d, s)),
            2 | 3 => format!("({} * {})", self.expr(Ty::Int, d, s), self.expr(Ty::Int, d, s)),
            4 => format!("sum({})", self.expr(Ty::List, d, s)),
            5 => format!("length({})", self.expr(Ty::List, d, s)),
            6 => format!(
                "(if {}: {} else: {})",
                self.expr(Ty::Bool, d, s),
                self.expr(Ty::Int, d, s),
                self.expr(Ty::Int, d, s)
            ),
            7 => {
                let x = self.name("x");
                let body = self.expr(Ty::Int, d, &Self::with(s, &x, Ty::Int));
                format!("(lambda {x}: {body})({})", self.expr(Ty::Int, d, s))
            }
            8 => {
                let (acc, x) = (self.name("acc"), self.name("x"));
                let inner = Self::with(&Self::with(s, &acc, Ty::Int), &x, Ty::Int);
                let body = self.expr(Ty::Int, d, &inner);
                format!("foldl(lambda {acc}, {x}: {body}, {}, {})", self.expr(Ty::Int, d, s), self.expr(Ty::List, d, s))
            }
            9 if !self.list_funs.is_empty() => {
                let f = self.list_funs.choose(&mut self.rng).unwrap().clone();
                format!("{f}({}, {})", self.expr(Ty::List, d, s), self.expr(Ty::Int, d, s))
            }
            10 if !self.rec_funs.is_empty() => {
                let f = self.rec_funs.choose(&mut self.rng).unwrap().clone();
                format!("{f}({})", self.expr(Ty::Rec, d, s))
            }
            10 | 11 => {
                let field = ["a", "b"].choose(&mut self.rng).unwrap();
                format!("({}).{field}", self.expr(Ty::Rec, d, s))
            }
            12 => format!(
                "(@doc(p\"computed from {{{}}}\") {})",
                self.expr(Ty::Int, d, s),
                self.expr(Ty::Int, d, s)
            ),
            // The divisor is kept positive so that most programs finish.
            _ => {
                let b = self.expr(Ty::Int, d, s);
                format!("({} `mod` ({b} * {b} + 1))", self.expr(Ty::Int, d, s))
            }
        }
    }

    fn boolean(&mut self, d: u32, s: &Scope) -> String {
        match self.rng.gen_range(0..6) {
            0 => format!("({} < {})", self.expr(Ty::Int, d, s), self.expr(Ty::Int, d, s)),
            1 => format!("({} == {})", self.expr(Ty::Int, d, s), self.expr(Ty::Int, d, s)),
            2 => format!("({} and {})", self.expr(Ty::Bool, d, s), self.expr(Ty::Bool, d, s)),
            3 => format!("not({})", self.expr(Ty::Bool, d, s)),
            4 => format!("elem({}, {})", self.expr(Ty::Int, d, s), self.expr(Ty::List, d, s)),
            _ => format!("({} == {})", self.expr(Ty::List, d, s), self.expr(Ty::List, d, s)),
        }
    }

    fn list(&mut self, d: u32, s: &Scope) -> String {
        match self.rng.gen_range(0..10) {
            0 => {
                let n = self.rng.gen_range(0..4);
                let items: Vec<String> = (0..n).map(|_| self.expr(Ty::Int, d, s)).collect();
                format!("[{}]", items.join(", "))
            }
            1 => {
                let x = self.name("x");
                let body = self.expr(Ty::Int, d, &Self::with(s, &x, Ty::Int));
                format!("map(lambda {x}: {body}, {})", self.expr(Ty::List, d, s))
            }
            2 => {
                let x = self.name("x");
                let body = self.expr(Ty::Bool, d, &Self::with(s, &x, Ty::Int));
                format!("filter(lambda {x}: {body}, {})", self.expr(Ty::List, d, s))
            }
            3 => {
                let x = self.name("x");
                let inner = Self::with(s, &x, Ty::Int);
                let src = self.expr(Ty::List, d, s);
                let guard = self.expr(Ty::Bool, d, &inner);
                let body = self.expr(Ty::Int, d, &inner);
                format!("[{body} for {x} in {src} if {guard}]")
            }
            4 => {
                let (x, y) = (self.name("x"), self.name("y"));
                let xs = self.expr(Ty::List, d, s);
                let ys = self.expr(Ty::List, d, &Self::with(s, &x, Ty::Int));
                let inner = Self::with(&Self::with(s, &x, Ty::Int), &y, Ty::Int);
                let body = self.expr(Ty::Int, d, &inner);
                format!("[{body} for {x} in take(3, {xs}) for {y} in take(3, {ys})]")
            }
            5 => {
                let (x, z) = (self.name("x"), self.name("z"));
                let xs = self.expr(Ty::List, d, s);
                let with_x = Self::with(s, &x, Ty::Int);
                let bound = self.expr(Ty::Int, d, &with_x);
                let body = self.expr(Ty::Int, d, &Self::with(&with_x, &z, Ty::Int));
                format!("[{body} for {x} in {xs} def {z} = {bound}]")
            }
            6 => format!("({} ++ {})", self.expr(Ty::List, d, s), self.expr(Ty::List, d, s)),
            7 => format!("range(0, {})", self.rng.gen_range(0..5)),
            8 => format!("reverse({})", self.expr(Ty::List, d, s)),
            _ => format!("take({}, {})", self.rng.gen_range(0..4), self.expr(Ty::List, d, s)),
        }
    }

    fn string(&mut self, d: u32, s: &Scope) -> String {
        match self.rng.gen_range(0..3) {
            0 => format!("({} ++ {})", self.expr(Ty::Str, d, s), self.expr(Ty::Str, d, s)),
            1 => format!("numToStr({})", self.expr(Ty::Int, d, s)),
            _ => format!("join(intersperse(\", \", map(numToStr, {})))", self.expr(Ty::List, d, s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(program(7), program(7));
        assert_ne!(program(7), program(8));
    }
}
