//! Persistent environments: a shared linked list, newest binding first.

use std::sync::Arc;

use super::value::Value;

#[derive(Clone, Default)]
pub struct Env(Option<Arc<Node>>);

struct Node {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    pub fn new() -> Self {
        Env(None)
    }

    pub fn bind(&self, name: impl Into<String>, value: Value) -> Env {
        Env(Some(Arc::new(Node { name: name.into(), value, next: self.clone() })))
    }

    /// Binds each pair in order, so later pairs shadow earlier ones.
    pub fn extend<I: IntoIterator<Item = (String, Value)>>(&self, bindings: I) -> Env {
        bindings.into_iter().fold(self.clone(), |env, (x, v)| env.bind(x, v))
    }

    /// The most recent binding of `name`.
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self.0.as_deref();
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = node.next.0.as_deref();
        }
        None
    }

    /// All bindings, oldest first, including shadowed ones.
    pub fn bindings(&self) -> Vec<(&str, &Value)> {
        let mut out = Vec::new();
        let mut cur = self.0.as_deref();
        while let Some(node) = cur {
            out.push((node.name.as_str(), &node.value));
            cur = node.next.0.as_deref();
        }
        out.reverse();
        out
    }
}

impl Drop for Env {
    // Unlinks iteratively so long chains cannot overflow the stack.
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut n) => cur = n.next.0.take(),
                Err(_) => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::value::ValueKind;

    #[test]
    fn rightmost_binding_wins() {
        let one = Value::new(0, ValueKind::Int(1));
        let two = Value::new(1, ValueKind::Int(2));
        let env = Env::new().bind("x", one).bind("y", two.clone()).bind("x", two);
        assert_eq!(env.lookup("x").unwrap().addr, 1);
        assert!(env.lookup("z").is_none());
        assert_eq!(env.bindings().len(), 3);
    }
}
