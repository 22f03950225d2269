//! Constructor signature: which datatype each constructor belongs to, and its arity.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtrInfo {
    pub datatype: String,
    pub arity: usize,
}

#[derive(Debug, Clone)]
pub struct Signature {
    ctrs: BTreeMap<String, CtrInfo>,
    /// Constructors of each datatype, in declaration order.
    datatypes: BTreeMap<String, Vec<String>>,
}

pub const CONS: &str = "Cons";
pub const NIL: &str = "[]";
pub const TRUE: &str = "True";
pub const FALSE: &str = "False";
pub const PARAGRAPH: &str = "Paragraph";
pub const MATRIX: &str = "Matrix";
pub const BAR_CHART: &str = "BarChart";
pub const STACKED_BAR_CHART: &str = "StackedBarChart";
pub const MULTI_VIEW: &str = "MultiView";

impl Signature {
    pub fn empty() -> Self {
        Signature { ctrs: BTreeMap::new(), datatypes: BTreeMap::new() }
    }

    /// Built-in datatypes.
    pub fn builtin() -> Self {
        let mut s = Signature::empty();
        s.declare("Bool", &[(TRUE, 0), (FALSE, 0)]);
        s.declare("List", &[(CONS, 2), (NIL, 0)]);
        s.declare("Option", &[("Some", 1), ("None", 0)]);
        s.declare("Pair", &[("Pair", 2)]);
        s.declare("Ordering", &[("LT", 0), ("EQ", 0), ("GT", 0)]);
        s.declare(PARAGRAPH, &[(PARAGRAPH, 1)]);
        s.declare(MATRIX, &[(MATRIX, 3)]);
        s.declare(BAR_CHART, &[(BAR_CHART, 1)]);
        s.declare(STACKED_BAR_CHART, &[(STACKED_BAR_CHART, 1)]);
        s.declare(MULTI_VIEW, &[(MULTI_VIEW, 1)]);
        s
    }

    /// Panics if a constructor is already taken; signatures are fixed at startup.
    pub fn declare(&mut self, datatype: &str, ctrs: &[(&str, usize)]) {
        for &(c, arity) in ctrs {
            let prev = self.ctrs.insert(c.to_string(), CtrInfo { datatype: datatype.to_string(), arity });
            assert!(prev.is_none(), "constructor {c} declared twice");
        }
        self.datatypes
            .entry(datatype.to_string())
            .or_default()
            .extend(ctrs.iter().map(|(c, _)| c.to_string()));
    }

    pub fn get(&self, c: &str) -> Option<&CtrInfo> {
        self.ctrs.get(c)
    }

    pub fn arity(&self, c: &str) -> Option<usize> {
        self.ctrs.get(c).map(|i| i.arity)
    }

    pub fn datatype(&self, c: &str) -> Option<&str> {
        self.ctrs.get(c).map(|i| i.datatype.as_str())
    }

    /// All constructors of `c`'s datatype, including `c`.
    pub fn siblings(&self, c: &str) -> &[String] {
        self.datatype(c).and_then(|d| self.datatypes.get(d)).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Default for Signature {
    fn default() -> Self {
        Signature::builtin()
    }
}
