//! Uniquely identified typed symbols.
//!
//! An identifier packs the allocation counter and the symbol type into one
//! integer: `id = 4 * counter + code(type)`. Identifiers are drawn from a
//! [`SymbolProvider`]; the process-wide provider returned by [`global`] is
//! what every set operation in this crate uses, so two independently built
//! sets never share a symbol unless they were derived from each other.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{LazyLock, Mutex};

use serde::{Deserialize, Serialize};

use crate::polynotope::Monomial;

/// Number of low bits reserved for the type code.
pub const TYPE_BITS: u32 = 2;

/// Largest counter value an identifier can carry.
pub const MAX_COUNTER: u64 = (1 << 62) - 1;

/// Domain tag of a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolType {
    /// No domain attached.
    Unspecified,
    /// Continuous unit interval `[-1, 1]`.
    Interval,
    /// Discrete `{-1, +1}`.
    Signed,
    /// Discrete `{0, 1}`.
    Boolean,
}

impl SymbolType {
    pub const fn code(self) -> u64 {
        match self {
            SymbolType::Unspecified => 0,
            SymbolType::Interval => 1,
            SymbolType::Signed => 2,
            SymbolType::Boolean => 3,
        }
    }

    pub const fn from_code(code: u64) -> SymbolType {
        match code & 3 {
            0 => SymbolType::Unspecified,
            1 => SymbolType::Interval,
            2 => SymbolType::Signed,
            _ => SymbolType::Boolean,
        }
    }

    /// Convex hull of the domain, `None` for the empty domain.
    pub fn hull(self) -> Option<(f64, f64)> {
        match self {
            SymbolType::Unspecified => None,
            SymbolType::Interval | SymbolType::Signed => Some((-1.0, 1.0)),
            SymbolType::Boolean => Some((0.0, 1.0)),
        }
    }

    /// Whether `value` is a member of the domain.
    pub fn contains(self, value: f64) -> bool {
        match self {
            SymbolType::Unspecified => false,
            SymbolType::Interval => (-1.0..=1.0).contains(&value),
            SymbolType::Signed => value == 1.0 || value == -1.0,
            SymbolType::Boolean => value == 0.0 || value == 1.0,
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, SymbolType::Signed | SymbolType::Boolean)
    }
}

/// The two bi-valued symbol domains used for logic and mixed encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `{-1, +1}`, false is `-1`.
    Signed,
    /// `{0, 1}`, false is `0`.
    Boolean,
}

impl Flavor {
    pub const fn symbol_type(self) -> SymbolType {
        match self {
            Flavor::Signed => SymbolType::Signed,
            Flavor::Boolean => SymbolType::Boolean,
        }
    }

    pub const fn truth(self) -> f64 {
        1.0
    }

    pub const fn falsity(self) -> f64 {
        match self {
            Flavor::Signed => -1.0,
            Flavor::Boolean => 0.0,
        }
    }

    /// Domain value for a truth value.
    pub const fn value(self, b: bool) -> f64 {
        if b {
            self.truth()
        } else {
            self.falsity()
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signed" => Ok(Flavor::Signed),
            "boolean" => Ok(Flavor::Boolean),
            other => Err(format!("unknown flavor `{other}` (expected signed or boolean)")),
        }
    }
}

/// Identifier of a typed symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolId(pub u64);

impl SymbolId {
    pub const fn new(raw: u64) -> Self {
        SymbolId(raw)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    /// Type decoded from the low bits.
    pub const fn ty(self) -> SymbolType {
        SymbolType::from_code(self.0)
    }

    /// Allocation counter value carried by the identifier.
    pub const fn counter(self) -> u64 {
        self.0 >> TYPE_BITS
    }
}

impl fmt::Debug for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.ty() {
            SymbolType::Unspecified => "u",
            SymbolType::Interval => "i",
            SymbolType::Signed => "s",
            SymbolType::Boolean => "b",
        };
        write!(f, "{}{}", tag, self.0)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Type of the symbol named by `id`.
pub fn type_of(id: SymbolId) -> SymbolType {
    id.ty()
}

/// Allocator of fresh identifiers plus the replacement tables shared by the
/// enclosure rewrites.
///
/// The replacement tables make the rewrites global: the same boolean symbol,
/// or the same monomial, is always replaced by the same fresh symbol.
#[derive(Default)]
pub struct SymbolProvider {
    counter: AtomicU64,
    boolean_to_signed: Mutex<HashMap<SymbolId, SymbolId>>,
    monomial_to_interval: Mutex<HashMap<Monomial, SymbolId>>,
}

impl SymbolProvider {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reserves `n` identifiers of type `ty`, strictly increasing.
    ///
    /// Panics when the counter would exceed [`MAX_COUNTER`]; identifiers are
    /// never recycled.
    pub fn fresh(&self, n: usize, ty: SymbolType) -> Vec<SymbolId> {
        if n == 0 {
            return Vec::new();
        }
        let n = n as u64;
        let last = self
            .counter
            .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |l| {
                l.checked_add(n).filter(|&next| next <= MAX_COUNTER)
            })
            .map(|previous| previous + n)
            .unwrap_or_else(|_| panic!("symbol counter overflow while allocating {n} symbols"));
        (last - n + 1..=last)
            .map(|l| SymbolId((l << TYPE_BITS) | ty.code()))
            .collect()
    }

    pub fn fresh_one(&self, ty: SymbolType) -> SymbolId {
        self.fresh(1, ty)[0]
    }

    /// Advances the counter so no later allocation can return `id` again.
    pub fn reserve_through(&self, id: SymbolId) {
        self.counter.fetch_max(id.counter().min(MAX_COUNTER), Ordering::Relaxed);
    }

    /// Current value of the allocation counter.
    pub fn allocated(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }

    /// Signed symbol standing for `2b - 1` where `b` is the boolean symbol `id`.
    pub fn signed_for_boolean(&self, id: SymbolId) -> SymbolId {
        debug_assert_eq!(id.ty(), SymbolType::Boolean);
        let mut table = self.boolean_to_signed.lock().expect("symbol table poisoned");
        *table
            .entry(id)
            .or_insert_with(|| self.fresh_one(SymbolType::Signed))
    }

    /// Interval symbol naming the unit-range image of `monomial`.
    pub fn interval_for_monomial(&self, monomial: &Monomial) -> SymbolId {
        let mut table = self
            .monomial_to_interval
            .lock()
            .expect("symbol table poisoned");
        if let Some(id) = table.get(monomial) {
            return *id;
        }
        let id = self.fresh_one(SymbolType::Interval);
        table.insert(monomial.clone(), id);
        id
    }
}

static GLOBAL: LazyLock<SymbolProvider> = LazyLock::new(SymbolProvider::new);

/// The process-wide provider.
pub fn global() -> &'static SymbolProvider {
    &GLOBAL
}

/// Reserves `n` fresh identifiers of type `ty` from the global provider.
pub fn fresh(n: usize, ty: SymbolType) -> Vec<SymbolId> {
    GLOBAL.fresh(n, ty)
}

/// A single fresh identifier from the global provider.
pub fn fresh_one(ty: SymbolType) -> SymbolId {
    GLOBAL.fresh_one(ty)
}
