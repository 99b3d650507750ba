//! Sectors of the dynamic partition of address space.
//!
//! With chosen addresses `s^1 < … < s^n`, the boundary addresses starting
//! with a symbol `F` are `F·s^1 < … < F·s^n`, so every gap between cyclically
//! adjacent boundary addresses has the form `(F·s^j, F·s^{j+1})` or
//! `(F·s^n, succ(F)·s^1)`. That gap is the elementary interval keyed `(F, j)`.
//! A sector glues `n` elementary intervals together, one per level `j`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::address::{AddressPoint, ExtAddress, Side, Symbol};
use crate::error::{Error, Result};
use crate::portrait::Portrait;

/// Whether `T` and `U` do not interleave in the cyclic order.
pub fn unlinked(t: &[ExtAddress], u: &[ExtAddress]) -> Result<bool> {
    if t.iter().any(|a| u.contains(a)) {
        return Err(Error::Overlap);
    }
    let mut all: Vec<(&ExtAddress, bool)> = t.iter().map(|a| (a, false)).chain(u.iter().map(|a| (a, true))).collect();
    all.sort();
    let len = all.len();
    let changes = (0..len).filter(|&i| all[i].1 != all[(i + 1) % len].1).count();
    Ok(changes < 4)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementaryInterval {
    pub lower: ExtAddress,
    pub upper: ExtAddress,
    /// First symbol of `lower`.
    pub symbol: Symbol,
    /// Index `j` with `σ(lower) = s^j`.
    pub level: usize,
}

impl ElementaryInterval {
    /// Strict containment of an address.
    pub fn contains(&self, a: &ExtAddress) -> bool {
        &self.lower < a && a < &self.upper
    }

    pub fn render(&self, chains: u32) -> String {
        format!("{},{}", self.lower.render(chains), self.upper.render(chains))
    }
}

/// A sector: its elementary intervals in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorId {
    pub intervals: Vec<ElementaryInterval>,
}

impl SectorId {
    /// The lexicographically minimal interval, used as the sector's name.
    pub fn key(&self) -> &ElementaryInterval {
        &self.intervals[0]
    }

    pub fn render(&self, chains: u32) -> String {
        self.key().render(chains)
    }

    pub fn has_endpoint(&self, b: &ExtAddress) -> bool {
        self.intervals.iter().any(|iv| &iv.lower == b || &iv.upper == b)
    }
}

impl fmt::Display for SectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.key().lower, self.key().upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OneSide {
    Minus,
    Plus,
}

impl OneSide {
    pub fn side(self) -> Side {
        match self {
            OneSide::Minus => Side::Below,
            OneSide::Plus => Side::Above,
        }
    }
}

/// `I⁻` (upper endpoints added) or `I⁺` (lower endpoints added).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorSide {
    pub sector: SectorId,
    pub side: OneSide,
}

impl Portrait {
    pub fn elementary_interval(&self, symbol: Symbol, level: usize) -> ElementaryInterval {
        let n = self.n();
        let lower = self.s(level).prepend(symbol);
        let upper = if level < n { self.s(level + 1).prepend(symbol) } else { self.s(1).prepend(symbol.succ()) };
        ElementaryInterval { lower, upper, symbol, level }
    }

    fn locate(&self, pt: &AddressPoint) -> Result<(Symbol, usize)> {
        if pt.side == Side::Exact && self.is_boundary(&pt.address) {
            return Err(Error::BoundaryNeedsSide);
        }
        let f = pt.address.first();
        let r = self.rank_of(&AddressPoint { address: pt.address.shift(), side: pt.side });
        Ok(if r == 0 { (f.pred(), self.n()) } else { (f, r) })
    }

    pub fn elementary_interval_of(&self, pt: &AddressPoint) -> Result<ElementaryInterval> {
        let (f, j) = self.locate(pt)?;
        Ok(self.elementary_interval(f, j))
    }

    fn glue(&self, (f, j): (Symbol, usize)) -> (Symbol, usize) {
        if j < self.n() {
            (self.group_pred(j + 1, f), j + 1)
        } else {
            (self.group_pred(1, f.succ()), 1)
        }
    }

    /// Interval keys of the sector containing `(F, j)`, in walk order.
    pub(crate) fn walk_from(&self, start: (Symbol, usize)) -> Result<Vec<(Symbol, usize)>> {
        let n = self.n();
        let mut keys = vec![start];
        let mut cur = start;
        for _ in 1..n {
            cur = self.glue(cur);
            if cur == start {
                return Err(Error::SectorWalk { steps: keys.len() });
            }
            keys.push(cur);
        }
        if self.glue(cur) != start {
            return Err(Error::SectorWalk { steps: n });
        }
        Ok(keys)
    }

    fn sector_from(&self, start: (Symbol, usize)) -> Result<SectorId> {
        let mut intervals: Vec<_> =
            self.walk_from(start)?.into_iter().map(|(f, j)| self.elementary_interval(f, j)).collect();
        intervals.sort();
        Ok(SectorId { intervals })
    }

    pub fn sector_of(&self, pt: &AddressPoint) -> Result<SectorId> {
        self.sector_from(self.locate(pt)?)
    }

    /// Sector of a bare address, taking the `I^side` convention at boundary addresses.
    pub fn sector_side_of(&self, a: &ExtAddress, side: OneSide) -> SectorId {
        let side = if self.is_boundary(a) { side.side() } else { Side::Exact };
        self.sector_of(&AddressPoint { address: a.clone(), side }).expect("side-tagged points are located")
    }

    /// Whether no landing set of the portrait separates `u` and `v`.
    pub fn same_sector(&self, u: &AddressPoint, v: &AddressPoint) -> Result<bool> {
        for p in [u, v] {
            if p.side == Side::Exact && self.is_boundary(&p.address) {
                return Err(Error::BoundaryNeedsSide);
            }
        }
        let (lo, hi) = match u.cmp(v) {
            Ordering::Equal => return Ok(true),
            Ordering::Less => (u, v),
            Ordering::Greater => (v, u),
        };
        if lo.address.first().chain != hi.address.first().chain {
            return Ok(self.sector_of(lo)? == self.sector_of(hi)?);
        }
        for (_, g) in self.boundary_addresses_in(lo, hi)? {
            if self.has_member_outside(g, lo, hi) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn in_side(&self, ss: &SectorSide, a: &ExtAddress) -> bool {
        ss.sector.intervals.iter().any(|iv| {
            iv.contains(a)
                || match ss.side {
                    OneSide::Minus => &iv.upper == a,
                    OneSide::Plus => &iv.lower == a,
                }
        })
    }

    /// The unique `b ∈ I^side` with `σ(b) = a`.
    pub fn sector_pullback(&self, sector: &SectorId, a: &ExtAddress, side: OneSide) -> ExtAddress {
        if self.singular_index(a).is_some() {
            let hit = sector.intervals.iter().find_map(|iv| {
                let b = match side {
                    OneSide::Minus => &iv.upper,
                    OneSide::Plus => &iv.lower,
                };
                (&b.shift() == a).then(|| b.clone())
            });
            return hit.expect("every sector has one endpoint over each chosen address");
        }
        let r = self.rank_of(&AddressPoint::exact(a.clone()));
        let level = if r == 0 { self.n() } else { r };
        let iv = sector.intervals.iter().find(|iv| iv.level == level).expect("one interval per level");
        a.prepend(if r == 0 { iv.symbol.succ() } else { iv.symbol })
    }

    /// Left (`Minus`) or right (`Plus`) projection onto the closure of `I^side`.
    pub fn project(&self, ss: &SectorSide, a: &ExtAddress) -> ExtAddress {
        if self.in_side(ss, a) {
            return a.clone();
        }
        let ivs = &ss.sector.intervals;
        match ss.side {
            OneSide::Minus => ivs
                .iter()
                .rev()
                .map(|iv| &iv.upper)
                .find(|u| *u < a)
                .unwrap_or(&ivs[ivs.len() - 1].upper)
                .clone(),
            OneSide::Plus => ivs.iter().map(|iv| &iv.lower).find(|l| *l > a).unwrap_or(&ivs[0].lower).clone(),
        }
    }
}
