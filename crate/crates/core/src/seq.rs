//! Eventually periodic sequences `u · v v v …` in canonical form.
//!
//! The canonical form has a primitive period word and a minimal preperiod,
//! so structural equality coincides with equality of the infinite sequences.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventuallyPeriodic<T> {
    pre: Vec<T>,
    per: Vec<T>,
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn primitive_len<T: PartialEq>(word: &[T]) -> usize {
    let n = word.len();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| (d..n).all(|i| word[i] == word[i - d]))
        .unwrap_or(n)
}

impl<T: Clone + PartialEq> EventuallyPeriodic<T> {
    /// Builds the canonical representative of `pre · per^∞`.
    pub fn new(mut pre: Vec<T>, mut per: Vec<T>) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        per.truncate(primitive_len(&per));
        while let Some(last) = pre.last() {
            if *last != per[per.len() - 1] {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(Self { pre, per })
    }

    pub fn periodic(per: Vec<T>) -> Result<Self> {
        Self::new(Vec::new(), per)
    }

    pub fn preperiod(&self) -> &[T] {
        &self.pre
    }

    pub fn period(&self) -> &[T] {
        &self.per
    }

    /// `(preperiod length, period length)` of the canonical form.
    pub fn preperiod_period(&self) -> (usize, usize) {
        (self.pre.len(), self.per.len())
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    pub fn at(&self, k: usize) -> &T {
        if k < self.pre.len() {
            &self.pre[k]
        } else {
            &self.per[(k - self.pre.len()) % self.per.len()]
        }
    }

    pub fn first(&self) -> &T {
        self.at(0)
    }

    /// Drops the first entry.
    pub fn shift(&self) -> Self {
        if self.pre.is_empty() {
            let mut per = self.per.clone();
            per.rotate_left(1);
            Self { pre: Vec::new(), per }
        } else {
            Self { pre: self.pre[1..].to_vec(), per: self.per.clone() }
        }
    }

    pub fn shift_by(&self, n: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.shift();
        }
        out
    }

    /// Prepends one entry.
    pub fn prepend(&self, head: T) -> Self {
        let mut pre = Vec::with_capacity(self.pre.len() + 1);
        pre.push(head);
        pre.extend(self.pre.iter().cloned());
        Self::new(pre, self.per.clone()).expect("period is nonempty")
    }

    /// The distinct points `σ^j(self)` for `j < m + n`; the orbit closes after that.
    pub fn orbit(&self) -> Vec<Self> {
        let (m, n) = self.preperiod_period();
        let mut out = Vec::with_capacity(m + n);
        let mut cur = self.clone();
        for _ in 0..m + n {
            let next = cur.shift();
            out.push(cur);
            cur = next;
        }
        out
    }

    /// Number of leading positions after which both sequences are periodic with a common period.
    pub(crate) fn horizon(&self, other: &Self) -> usize {
        self.pre.len().max(other.pre.len()) + lcm(self.per.len(), other.per.len())
    }

    /// Applies `f` entrywise and re-normalizes.
    pub fn map<U: Clone + PartialEq>(&self, mut f: impl FnMut(&T) -> U) -> EventuallyPeriodic<U> {
        EventuallyPeriodic::new(self.pre.iter().map(&mut f).collect(), self.per.iter().map(&mut f).collect())
            .expect("period is nonempty")
    }
}

impl<T: Clone + Ord> EventuallyPeriodic<T> {
    /// Lexicographic comparison of the infinite sequences.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        (0..self.horizon(other))
            .map(|k| self.at(k).cmp(other.at(k)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}
