use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

/// An interned variable name. Equality is pointer equality; ordering is
/// lexicographic on the text.
#[derive(Clone, Copy)]
pub struct Symbol(&'static str);

static INTERNER: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        let mut table = INTERNER.get_or_init(|| Mutex::new(HashSet::new())).lock().expect("symbol table poisoned");
        if let Some(s) = table.get(name) {
            return Symbol(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        table.insert(leaked);
        Symbol(leaked)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn from_count(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// How a variable behaves under total derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// Jet coordinate of a dependent or fiber (antifield) variable:
    /// `D_x` maps order `k` to order `k + 1`.
    Jet,
    /// Flux-defined nonlocal variable; only order 0 exists.
    Nonlocal,
    /// Constant parameter, annihilated by every total derivative.
    Parameter,
}

/// A coordinate: `name[order]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Symbol,
    pub order: u32,
    pub kind: VarKind,
    pub parity: Parity,
}

impl Var {
    pub fn jet(name: &str, order: u32, parity: Parity) -> Var {
        Var { name: Symbol::new(name), order, kind: VarKind::Jet, parity }
    }

    pub fn even(name: &str, order: u32) -> Var {
        Var::jet(name, order, Parity::Even)
    }

    pub fn odd(name: &str, order: u32) -> Var {
        Var::jet(name, order, Parity::Odd)
    }

    pub fn parameter(name: &str) -> Var {
        Var { name: Symbol::new(name), order: 0, kind: VarKind::Parameter, parity: Parity::Even }
    }

    pub fn nonlocal(name: &str, parity: Parity) -> Var {
        Var { name: Symbol::new(name), order: 0, kind: VarKind::Nonlocal, parity }
    }

    pub fn is_odd(&self) -> bool {
        self.parity.is_odd()
    }

    /// The same family at another jet order.
    pub fn with_order(&self, order: u32) -> Var {
        Var { order, ..*self }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // odd jet coordinates keep an explicit order so that antifields read
        // as `p[0]`, `q[0]`
        if self.order == 0 && !(self.kind == VarKind::Jet && self.is_odd()) {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}[{}]", self.name, self.order)
        }
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;

    fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}
