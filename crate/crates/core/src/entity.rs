//! Entity indexing and the global entity cap.
//!
//! The universe is a tensor product of two-level elementary entities.
//! Entity 0 is the most significant tensor factor: basis index `b` of a
//! `2^n`-dimensional space encodes entity `k`'s bit at position `n - 1 - k`.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default cap on the number of entities (dense dimension 1024).
pub const DEFAULT_MAX_ENTITIES: usize = 10;

/// Hard ceiling the cap can be raised to via `EINSEL_MAX_ENTITIES`.
pub const HARD_MAX_ENTITIES: usize = 12;

static MAX_ENTITIES: OnceLock<usize> = OnceLock::new();

/// Configured entity cap: `EINSEL_MAX_ENTITIES` clamped to
/// `1..=HARD_MAX_ENTITIES`, defaulting to [`DEFAULT_MAX_ENTITIES`].
///
/// Read once; later environment changes have no effect.
pub fn max_entities() -> usize {
    *MAX_ENTITIES.get_or_init(|| {
        std::env::var("EINSEL_MAX_ENTITIES")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .map(|n| n.clamp(1, HARD_MAX_ENTITIES))
            .unwrap_or(DEFAULT_MAX_ENTITIES)
    })
}

/// Checks an entity count against the configured cap.
pub fn check_capacity(entities: usize) -> Result<()> {
    let max = max_entities();
    if entities > max {
        Err(Error::Capacity { requested: entities, max, hard: HARD_MAX_ENTITIES })
    } else {
        Ok(())
    }
}

/// A set of entity indices, stored as a bitmask (indices < 16).
///
/// Iteration and `Display` are in ascending index order, so every derived
/// ordering is deterministic.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EntitySet(u16);

impl EntitySet {
    pub const EMPTY: EntitySet = EntitySet(0);

    pub fn new() -> Self {
        EntitySet(0)
    }

    /// Set containing the single index `i`.
    pub fn single(i: usize) -> Self {
        let mut s = EntitySet(0);
        s.insert(i);
        s
    }

    /// Set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= 16, "entity index out of range");
        if n == 0 {
            EntitySet(0)
        } else {
            EntitySet(((1u32 << n) - 1) as u16)
        }
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < 16, "entity index out of range");
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < 16, "entity index out of range");
        self.0 &= !(1 << i);
    }

    pub fn with(mut self, i: usize) -> Self {
        self.insert(i);
        self
    }

    pub fn without(mut self, i: usize) -> Self {
        self.remove(i);
        self
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 16 && self.0 & (1 << i) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, other: &EntitySet) -> EntitySet {
        EntitySet(self.0 | other.0)
    }

    pub fn intersection(&self, other: &EntitySet) -> EntitySet {
        EntitySet(self.0 & other.0)
    }

    pub fn difference(&self, other: &EntitySet) -> EntitySet {
        EntitySet(self.0 & !other.0)
    }

    pub fn is_disjoint(&self, other: &EntitySet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(&self, other: &EntitySet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within a universe of `n` entities.
    pub fn complement(&self, n: usize) -> EntitySet {
        EntitySet(EntitySet::full(n).0 & !self.0)
    }

    /// Largest index in the set, if any.
    pub fn max_index(&self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(15 - self.0.leading_zeros() as usize)
        }
    }

    /// Indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.0;
        (0..16).filter(move |i| bits & (1 << i) != 0)
    }

    /// Ascending index vector.
    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for EntitySet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = EntitySet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for EntitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EntitySet{self}")
    }
}

impl fmt::Display for EntitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
