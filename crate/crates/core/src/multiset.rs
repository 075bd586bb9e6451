//! Finite multisets with natural-number multiplicities.
//!
//! A [`Multiset`] is stored in canonical form: an element is either absent
//! (multiplicity zero) or present with a multiplicity of at least one. Every
//! operation here preserves that form, so derived equality and ordering are
//! extensional.

use std::collections::BTreeMap;
use std::fmt;

/// A finite multiset over `T`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord> {
    entries: BTreeMap<T, u64>,
}

/// Returned when a multiplicity would exceed `u64::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("multiplicity overflow")]
pub struct Overflow;

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// The multiset containing `x` exactly `k` times.
    pub fn singleton(x: T, k: u64) -> Self {
        let mut m = Self::new();
        m.insert(x, k);
        m
    }

    /// Multiplicity of `x` (zero when absent).
    pub fn get(&self, x: &T) -> u64 {
        self.entries.get(x).copied().unwrap_or(0)
    }

    /// Adds `k` copies of `x`.
    ///
    /// # Panics
    /// On multiplicity overflow; use [`Multiset::try_insert`] to handle it.
    pub fn insert(&mut self, x: T, k: u64) {
        self.try_insert(x, k).expect("multiplicity overflow");
    }

    pub fn try_insert(&mut self, x: T, k: u64) -> Result<(), Overflow> {
        if k == 0 {
            return Ok(());
        }
        let slot = self.entries.entry(x).or_insert(0);
        *slot = slot.checked_add(k).ok_or(Overflow)?;
        Ok(())
    }

    /// Removes up to `k` copies of `x`, returning how many were removed.
    pub fn remove(&mut self, x: &T, k: u64) -> u64 {
        match self.entries.get_mut(x) {
            None => 0,
            Some(n) if *n > k => {
                *n -= k;
                k
            }
            Some(_) => self.entries.remove(x).unwrap_or(0),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|A|`, the sum of all multiplicities (saturating).
    pub fn cardinality(&self) -> u64 {
        self.entries.values().fold(0u64, |acc, &k| acc.saturating_add(k))
    }

    /// Elements with non-zero multiplicity, in ascending order.
    pub fn support(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries.keys()
    }

    /// `(element, multiplicity)` pairs in ascending element order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> + '_ {
        self.entries.iter().map(|(x, &k)| (x, k))
    }

    /// Every element repeated according to its multiplicity.
    pub fn expanded(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries
            .iter()
            .flat_map(|(x, &k)| std::iter::repeat_n(x, k as usize))
    }

    /// `A ⊆ B`: pointwise `A(x) <= B(x)`.
    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        self.entries.iter().all(|(x, &k)| other.get(x) >= k)
    }

    /// `A ∪ B`, the pointwise maximum.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, &k) in &other.entries {
            let slot = out.entries.entry(x.clone()).or_insert(0);
            *slot = (*slot).max(k);
        }
        out
    }

    /// `A ∩ B`, the pointwise minimum.
    pub fn intersection(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|(x, &k)| {
                let m = k.min(other.get(x));
                (m > 0).then(|| (x.clone(), m))
            })
            .collect();
        Multiset { entries }
    }

    /// `A + B`, the pointwise sum.
    pub fn checked_sum(&self, other: &Self) -> Result<Self, Overflow> {
        let mut out = self.clone();
        for (x, &k) in &other.entries {
            out.try_insert(x.clone(), k)?;
        }
        Ok(out)
    }

    /// `A - B`, the pointwise truncated difference `max(A(x) - B(x), 0)`.
    pub fn monus(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|(x, &k)| {
                let m = k.saturating_sub(other.get(x));
                (m > 0).then(|| (x.clone(), m))
            })
            .collect();
        Multiset { entries }
    }

    /// `k · A`.
    pub fn checked_scale(&self, k: u64) -> Result<Self, Overflow> {
        if k == 0 {
            return Ok(Self::new());
        }
        let mut entries = BTreeMap::new();
        for (x, &m) in &self.entries {
            entries.insert(x.clone(), m.checked_mul(k).ok_or(Overflow)?);
        }
        Ok(Multiset { entries })
    }

    /// `A ↾ Y`: keeps only the elements accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&T) -> bool) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(x, _)| keep(x))
            .map(|(x, &k)| (x.clone(), k))
            .collect();
        Multiset { entries }
    }

    /// Image under `f`, summing multiplicities of elements with equal image.
    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Multiset<U> {
        let mut out = Multiset::new();
        for (x, &k) in &self.entries {
            out.insert(f(x), k);
        }
        out
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x, 1);
        }
        m
    }
}

impl<T: Ord + Clone> FromIterator<(T, u64)> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = (T, u64)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (x, k) in iter {
            m.insert(x, k);
        }
        m
    }
}

impl<T: Ord + Clone> std::ops::Add for &Multiset<T> {
    type Output = Multiset<T>;

    /// # Panics
    /// On multiplicity overflow.
    fn add(self, rhs: Self) -> Multiset<T> {
        self.checked_sum(rhs).expect("multiplicity overflow")
    }
}

impl<T: Ord + Clone> std::ops::Sub for &Multiset<T> {
    type Output = Multiset<T>;

    fn sub(self, rhs: Self) -> Multiset<T> {
        self.monus(rhs)
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}
