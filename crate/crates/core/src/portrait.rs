//! Singular data of a post-singularly finite map: chosen addresses at the
//! singular values and the grouping of their preimage addresses into the
//! landing sets `Crit(c)` of the points `c` over each singular value.
//!
//! Preimage symbols not claimed by any listed group are regular preimages:
//! each forms its own one-member group.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::address::{Alphabet, AddressPoint, ExtAddress, Symbol};
use crate::error::{Error, Result};
use crate::partition::unlinked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    Julia,
    Fatou,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularEntry {
    pub address: ExtAddress,
    pub locus: Locus,
    /// Preperiod of the singular value's orbit (user metadata).
    pub orbit_preperiod: usize,
    /// Period of the singular value's orbit (user metadata).
    pub orbit_period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    /// One point with the listed preimage symbols.
    Finite { members: Vec<Symbol> },
    /// One point with infinitely many preimage symbols: every symbol of
    /// `chain` whose index is congruent to one of `residues` modulo
    /// `modulus`, except the listed indices. `modulus = 1, residues = [0]`
    /// is the whole chain (an asymptotic tract).
    ZFamily { chain: u32, modulus: i64, residues: Vec<i64>, except: Vec<i64> },
    /// Infinitely many points, one per block `b`: the symbols
    /// `(chain, b * modulus + r)` for `r` in `residues`.
    Pattern { chain: u32, modulus: i64, residues: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CritGroup {
    pub point: String,
    /// 1-based index of the singular value the members map to.
    pub target: usize,
    pub locus: Locus,
    pub kind: GroupKind,
}

/// Identifies one point `c` over a singular value, i.e. one `Crit(c)` set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupRef {
    Listed { group: usize },
    Block { group: usize, block: i64 },
    Regular { target: usize, symbol: Symbol },
}

impl GroupRef {
    pub fn listed_index(&self) -> Option<usize> {
        match *self {
            GroupRef::Listed { group } | GroupRef::Block { group, .. } => Some(group),
            GroupRef::Regular { .. } => None,
        }
    }
}

impl CritGroup {
    pub fn contains_symbol(&self, s: Symbol) -> bool {
        match &self.kind {
            GroupKind::Finite { members } => members.contains(&s),
            GroupKind::ZFamily { chain, modulus, residues, except } => {
                s.chain == *chain && residues.contains(&s.index.rem_euclid(*modulus)) && !except.contains(&s.index)
            }
            GroupKind::Pattern { chain, modulus, residues } => {
                s.chain == *chain && residues.contains(&s.index.rem_euclid(*modulus))
            }
        }
    }

    fn block_members(chain: u32, modulus: i64, residues: &[i64], block: i64) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = residues.iter().map(|r| Symbol::new(chain, block * modulus + r)).collect();
        v.sort();
        v
    }

    fn cyclic_pred(sorted: &[Symbol], s: Symbol) -> Symbol {
        let i = sorted.iter().position(|m| *m == s).expect("symbol is a member");
        sorted[(i + sorted.len() - 1) % sorted.len()]
    }

    /// Cyclic predecessor of `s` among the symbols of its point's group.
    fn pred_symbol(&self, s: Symbol) -> Symbol {
        match &self.kind {
            GroupKind::Finite { members } => {
                let mut sorted = members.clone();
                sorted.sort();
                Self::cyclic_pred(&sorted, s)
            }
            GroupKind::ZFamily { .. } => {
                let mut t = s.pred();
                while !self.contains_symbol(t) {
                    t = t.pred();
                }
                t
            }
            GroupKind::Pattern { chain, modulus, residues } => {
                let block = s.index.div_euclid(*modulus);
                Self::cyclic_pred(&Self::block_members(*chain, *modulus, residues, block), s)
            }
        }
    }

    fn is_infinite(&self) -> bool {
        matches!(self.kind, GroupKind::ZFamily { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portrait {
    pub alphabet: Alphabet,
    pub singulars: Vec<SingularEntry>,
    pub groups: Vec<CritGroup>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleReport {
    /// Property (1): each chosen address has eventual period 1.
    pub fixed: Vec<bool>,
    /// Property (2): Fatou entries satisfy `σ^{m+n}(s) = σ^m(s)`; `None` for Julia entries.
    pub minimal: Vec<Option<bool>>,
    /// Property (3) proxy: each Julia entry's address has the orbit data of its point.
    pub forward_invariant: Vec<bool>,
}

impl SimpleReport {
    pub fn is_simple(&self) -> bool {
        self.fixed.iter().all(|&b| b)
            && self.minimal.iter().all(|m| m.unwrap_or(true))
            && self.forward_invariant.iter().all(|&b| b)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, ok) in self.fixed.iter().enumerate() {
            if !ok {
                out.push(format!("s^{} is not eventually fixed", i + 1));
            }
        }
        for (i, m) in self.minimal.iter().enumerate() {
            if *m == Some(false) {
                out.push(format!("s^{} is not minimal", i + 1));
            }
        }
        for (i, ok) in self.forward_invariant.iter().enumerate() {
            if !ok {
                out.push(format!("s^{} does not match its orbit data", i + 1));
            }
        }
        out
    }
}

impl Portrait {
    pub fn n(&self) -> usize {
        self.singulars.len()
    }

    /// Chosen address `s^j`, 1-based.
    pub fn s(&self, j: usize) -> &ExtAddress {
        &self.singulars[j - 1].address
    }

    /// Index `j` with `s^j = a`, if `a` is a chosen address.
    pub fn singular_index(&self, a: &ExtAddress) -> Option<usize> {
        self.singulars.iter().position(|e| &e.address == a).map(|i| i + 1)
    }

    /// Whether `a ∈ σ^{-1}({s^1..s^n})`.
    pub fn is_boundary(&self, a: &ExtAddress) -> bool {
        self.singular_index(&a.shift()).is_some()
    }

    /// Number of chosen addresses strictly below `pt`.
    pub(crate) fn rank_of(&self, pt: &AddressPoint) -> usize {
        self.singulars.iter().filter(|e| AddressPoint::exact(e.address.clone()) < *pt).count()
    }

    /// The group containing `F·s^target`.
    pub fn group_of(&self, target: usize, symbol: Symbol) -> GroupRef {
        for (gi, g) in self.groups.iter().enumerate() {
            if g.target == target && g.contains_symbol(symbol) {
                return match &g.kind {
                    GroupKind::Pattern { modulus, .. } => {
                        GroupRef::Block { group: gi, block: symbol.index.div_euclid(*modulus) }
                    }
                    _ => GroupRef::Listed { group: gi },
                };
            }
        }
        GroupRef::Regular { target, symbol }
    }

    /// Group of a boundary address, `None` for addresses off the boundary.
    pub fn group_of_address(&self, a: &ExtAddress) -> Option<GroupRef> {
        let j = self.singular_index(&a.shift())?;
        Some(self.group_of(j, a.first()))
    }

    pub fn group_target(&self, g: GroupRef) -> usize {
        match g {
            GroupRef::Listed { group } | GroupRef::Block { group, .. } => self.groups[group].target,
            GroupRef::Regular { target, .. } => target,
        }
    }

    pub fn group_locus(&self, g: GroupRef) -> Locus {
        match g.listed_index() {
            Some(gi) => self.groups[gi].locus,
            None => self.singulars[self.group_target(g) - 1].locus,
        }
    }

    pub fn group_label(&self, g: GroupRef) -> String {
        match g {
            GroupRef::Listed { group } => self.groups[group].point.clone(),
            GroupRef::Block { group, block } => format!("{}[{}]", self.groups[group].point, block),
            GroupRef::Regular { target, symbol } => {
                format!("r{}.{}", target, symbol.render(self.alphabet.chains))
            }
        }
    }

    pub fn group_is_tract(&self, g: GroupRef) -> bool {
        g.listed_index().is_some_and(|gi| self.groups[gi].is_infinite())
    }

    fn group_contains_symbol(&self, g: GroupRef, s: Symbol) -> bool {
        match g {
            GroupRef::Listed { group } => self.groups[group].contains_symbol(s),
            GroupRef::Block { group, block } => {
                let grp = &self.groups[group];
                match &grp.kind {
                    GroupKind::Pattern { modulus, .. } => {
                        grp.contains_symbol(s) && s.index.div_euclid(*modulus) == block
                    }
                    _ => false,
                }
            }
            GroupRef::Regular { target, symbol } => {
                s == symbol && self.group_of(target, s) == g
            }
        }
    }

    /// Cyclic predecessor of `F·s^target` within its group, as a symbol.
    pub fn group_pred(&self, target: usize, symbol: Symbol) -> Symbol {
        match self.group_of(target, symbol) {
            GroupRef::Listed { group } | GroupRef::Block { group, .. } => self.groups[group].pred_symbol(symbol),
            GroupRef::Regular { .. } => symbol,
        }
    }

    /// Exact membership test for `Crit(c)`.
    pub fn crit_contains(&self, g: GroupRef, a: &ExtAddress) -> bool {
        let target = self.group_target(g);
        &a.shift() == self.s(target) && self.group_contains_symbol(g, a.first())
    }

    /// Members of `g` whose first symbol has index in `lo..=hi`, in linear order.
    pub fn crit_members(&self, g: GroupRef, lo: i64, hi: i64) -> Vec<ExtAddress> {
        let target = self.group_target(g);
        let tail = self.s(target);
        let mut v: Vec<ExtAddress> = self
            .alphabet
            .window(lo, hi)
            .into_iter()
            .filter(|s| self.group_contains_symbol(g, *s))
            .map(|s| tail.prepend(s))
            .collect();
        v.sort();
        v
    }

    /// Members of every point of listed group `gi` with first symbol index in `lo..=hi`.
    pub fn listed_members(&self, gi: usize, lo: i64, hi: i64) -> Vec<ExtAddress> {
        let g = &self.groups[gi];
        let tail = self.s(g.target);
        let mut v: Vec<ExtAddress> = self
            .alphabet
            .window(lo, hi)
            .into_iter()
            .filter(|s| g.contains_symbol(*s))
            .map(|s| tail.prepend(s))
            .collect();
        v.sort();
        v
    }

    /// All groups with at least two members, truncated to `lo..=hi`
    /// (Pattern groups are split into their blocks).
    pub fn truncated_groups(&self, lo: i64, hi: i64) -> Vec<(GroupRef, Vec<ExtAddress>)> {
        let mut out = Vec::new();
        for (gi, g) in self.groups.iter().enumerate() {
            match &g.kind {
                GroupKind::Pattern { modulus, .. } => {
                    let mut blocks = BTreeSet::new();
                    for s in self.alphabet.window(lo, hi) {
                        if g.contains_symbol(s) {
                            blocks.insert(s.index.div_euclid(*modulus));
                        }
                    }
                    for block in blocks {
                        let r = GroupRef::Block { group: gi, block };
                        out.push((r, self.crit_members(r, lo, hi)));
                    }
                }
                _ => {
                    let r = GroupRef::Listed { group: gi };
                    out.push((r, self.crit_members(r, lo, hi)));
                }
            }
        }
        out.retain(|(_, m)| m.len() >= 2);
        out
    }

    /// Boundary addresses `F·s^j` strictly inside the arc `(lo, hi)` that does
    /// not contain the cut point, sorted, each tagged with its group.
    pub fn boundary_addresses_in(&self, lo: &AddressPoint, hi: &AddressPoint) -> Result<Vec<(ExtAddress, GroupRef)>> {
        if lo >= hi {
            return Err(Error::ArcContainsCut);
        }
        let (f_lo, f_hi) = (lo.address.first(), hi.address.first());
        if f_lo.chain != f_hi.chain {
            return Err(Error::ArcContainsChain { lo: f_lo.chain, hi: f_hi.chain });
        }
        let mut out = Vec::new();
        for idx in f_lo.index..=f_hi.index {
            let f = Symbol::new(f_lo.chain, idx);
            for j in 1..=self.n() {
                let b = self.s(j).prepend(f);
                let pt = AddressPoint::exact(b.clone());
                if *lo < pt && pt < *hi {
                    out.push((b, self.group_of(j, f)));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Whether group `g` has a member outside the closed arc `[lo, hi]` (`lo < hi`, same chain).
    pub(crate) fn has_member_outside(&self, g: GroupRef, lo: &AddressPoint, hi: &AddressPoint) -> bool {
        let outside = |a: ExtAddress| {
            let p = AddressPoint::exact(a);
            p < *lo || p > *hi
        };
        match g {
            GroupRef::Regular { target, symbol } => outside(self.s(target).prepend(symbol)),
            GroupRef::Block { .. } => {
                // Blocks are finite: enumerate their members.
                let GroupRef::Block { group, block } = g else { unreachable!() };
                let grp = &self.groups[group];
                let GroupKind::Pattern { chain, modulus, residues } = &grp.kind else { unreachable!() };
                CritGroup::block_members(*chain, *modulus, residues, block)
                    .into_iter()
                    .any(|s| outside(self.s(grp.target).prepend(s)))
            }
            GroupRef::Listed { group } => {
                let grp = &self.groups[group];
                match &grp.kind {
                    GroupKind::Finite { members } => {
                        members.iter().any(|s| outside(self.s(grp.target).prepend(*s)))
                    }
                    // Unbounded in both directions along its chain; an arc
                    // confined to one chain cannot hold all of it.
                    _ => true,
                }
            }
        }
    }

    /// Checks every combinatorially decidable admissibility condition.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let n = self.n();
        if self.alphabet.chains == 0 {
            v.push("alphabet needs at least one chain".to_string());
            return ValidationReport { violations: v };
        }
        if n == 0 {
            v.push("portrait has no singular values".to_string());
        }
        for (i, e) in self.singulars.iter().enumerate() {
            if let Err(err) = e.address.check(&self.alphabet) {
                v.push(format!("s^{}: {err}", i + 1));
            }
        }
        for i in 1..n {
            if self.singulars[i - 1].address >= self.singulars[i].address {
                v.push(format!("chosen addresses not strictly increasing at s^{} / s^{}", i, i + 1));
            }
        }
        let mut structural = true;
        for (gi, g) in self.groups.iter().enumerate() {
            let name = &g.point;
            if g.target == 0 || g.target > n {
                v.push(format!("group {name}: target {} out of range", g.target));
                structural = false;
                continue;
            }
            match &g.kind {
                GroupKind::Finite { members } => {
                    if members.is_empty() {
                        v.push(format!("group {name}: no members"));
                    }
                    let set: BTreeSet<_> = members.iter().collect();
                    if set.len() != members.len() {
                        v.push(format!("group {name}: repeated member"));
                    }
                    for s in members {
                        if let Err(err) = self.alphabet.check(*s) {
                            v.push(format!("group {name}: {err}"));
                        }
                    }
                }
                GroupKind::ZFamily { chain, modulus, residues, .. } | GroupKind::Pattern { chain, modulus, residues } => {
                    if *chain >= self.alphabet.chains {
                        v.push(format!("group {name}: chain {chain} out of range"));
                        structural = false;
                    }
                    if *modulus < 1 || residues.is_empty() || residues.iter().any(|r| *r < 0 || r >= modulus) {
                        v.push(format!("group {name}: bad modulus/residues"));
                        structural = false;
                    }
                }
            }
            let _ = gi;
        }
        if !structural || n == 0 || !v.is_empty() {
            return ValidationReport { violations: v };
        }

        // Coverage: no preimage symbol claimed twice for the same target.
        let (lo, hi) = self.check_window();
        for j in 1..=n {
            for s in self.alphabet.window(lo, hi) {
                let owners: Vec<&str> = self
                    .groups
                    .iter()
                    .filter(|g| g.target == j && g.contains_symbol(s))
                    .map(|g| g.point.as_str())
                    .collect();
                if owners.len() > 1 {
                    v.push(format!(
                        "symbol {} over s^{j} claimed by groups {}",
                        s.render(self.alphabet.chains),
                        owners.join(", ")
                    ));
                }
            }
        }
        // Chosen addresses must not sit in another singular value's listed group.
        for (i, e) in self.singulars.iter().enumerate() {
            if let Some(j) = self.singular_index(&e.address.shift()) {
                if j != i + 1 {
                    if let Some(gi) = self.group_of(j, e.address.first()).listed_index() {
                        v.push(format!("s^{} lies in group {} over s^{j}", i + 1, self.groups[gi].point));
                    }
                }
            }
        }
        if !v.is_empty() {
            return ValidationReport { violations: v };
        }
        // Distinct points have unlinked landing sets.
        let groups = self.truncated_groups(lo, hi);
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                if !unlinked(&groups[a].1, &groups[b].1).unwrap_or(false) {
                    v.push(format!(
                        "groups {} and {} are linked",
                        self.group_label(groups[a].0),
                        self.group_label(groups[b].0)
                    ));
                }
            }
        }
        // Every sector closes up after exactly n gluing steps.
        for s in self.alphabet.window(lo, hi) {
            for j in 1..=n {
                if let Err(err) = self.walk_from((s, j)) {
                    v.push(format!("sector walk from ({}, {j}): {err}", s.render(self.alphabet.chains)));
                }
            }
        }
        if !v.is_empty() {
            return ValidationReport { violations: v };
        }
        // Periodic chosen addresses of distinct Julia singular values must not land together.
        for i in 1..=n {
            for j in i + 1..=n {
                let (a, b) = (&self.singulars[i - 1], &self.singulars[j - 1]);
                let julia = a.locus == Locus::Julia && b.locus == Locus::Julia;
                if julia
                    && a.address.is_periodic()
                    && b.address.is_periodic()
                    && crate::itinerary::itinerary_left(&a.address, self) == crate::itinerary::itinerary_left(&b.address, self)
                {
                    v.push(format!("s^{i} and s^{j} have equal left itineraries"));
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// A symbol index window that exposes every finite feature of the groups
    /// plus two full periods of every congruence pattern.
    pub(crate) fn check_window(&self) -> (i64, i64) {
        let mut lo = -4i64;
        let mut hi = 4i64;
        let mut period = 1i64;
        for g in &self.groups {
            match &g.kind {
                GroupKind::Finite { members } => {
                    for s in members {
                        lo = lo.min(s.index);
                        hi = hi.max(s.index);
                    }
                }
                GroupKind::ZFamily { modulus, except, .. } => {
                    for e in except {
                        lo = lo.min(*e);
                        hi = hi.max(*e);
                    }
                    period = crate::seq::lcm(period as usize, *modulus as usize) as i64;
                }
                GroupKind::Pattern { modulus, .. } => {
                    period = crate::seq::lcm(period as usize, *modulus as usize) as i64;
                }
            }
        }
        (lo - 2 * period - 2, hi + 2 * period + 2)
    }

    /// Combinatorial proxies for the simple-partition properties.
    pub fn check_simple(&self) -> SimpleReport {
        let fixed = self.singulars.iter().map(|e| e.address.preperiod_period().1 == 1).collect();
        let minimal = self
            .singulars
            .iter()
            .map(|e| match e.locus {
                Locus::Julia => None,
                Locus::Fatou => {
                    let (m, n) = (e.orbit_preperiod, e.orbit_period);
                    Some(e.address.shift_by(m + n) == e.address.shift_by(m))
                }
            })
            .collect();
        let forward_invariant = self
            .singulars
            .iter()
            .map(|e| match e.locus {
                Locus::Julia => e.address.preperiod_period() == (e.orbit_preperiod, e.orbit_period),
                Locus::Fatou => true,
            })
            .collect();
        SimpleReport { fixed, minimal, forward_invariant }
    }

    /// Validation plus simplicity, as required before landing computations.
    pub fn require_simple(&self) -> Result<()> {
        let v = self.validate();
        if !v.is_ok() {
            return Err(Error::InvalidPortrait(v.violations.join("; ")));
        }
        let s = self.check_simple();
        if !s.is_simple() {
            return Err(Error::NotSimple(s.failures().join("; ")));
        }
        Ok(())
    }
}

/// Ready-made portraits used throughout the tests and documentation.
pub mod examples {
    use super::*;

    fn addr(pre: &[i64], per: &[i64]) -> ExtAddress {
        ExtAddress::ints(pre, per).expect("valid address")
    }

    fn tract(point: &str, target: usize, except: Vec<i64>, modulus: i64, residues: Vec<i64>) -> CritGroup {
        CritGroup {
            point: point.into(),
            target,
            locus: Locus::Julia,
            kind: GroupKind::ZFamily { chain: 0, modulus, residues, except },
        }
    }

    /// One chain, `s^1 = 0̄`, one asymptotic tract over it.
    pub fn exponential() -> Portrait {
        exponential_with(addr(&[], &[0]), 0, 1)
    }

    /// Exponential-type portrait with chosen address `s` and orbit data `(m, n)`.
    pub fn exponential_with(s: ExtAddress, m: usize, n: usize) -> Portrait {
        Portrait {
            alphabet: Alphabet { chains: 1 },
            singulars: vec![SingularEntry { address: s, locus: Locus::Julia, orbit_preperiod: m, orbit_period: n }],
            groups: vec![tract("T0", 1, vec![], 1, vec![0])],
        }
    }

    /// Asymptotic value with one regular preimage plus a critical value with
    /// one degree-2 critical point (the combinatorics of `z·e^z`).
    pub fn tract_and_critical() -> Portrait {
        Portrait {
            alphabet: Alphabet { chains: 1 },
            singulars: vec![
                SingularEntry { address: addr(&[], &[0]), locus: Locus::Julia, orbit_preperiod: 0, orbit_period: 1 },
                SingularEntry { address: addr(&[], &[2]), locus: Locus::Julia, orbit_preperiod: 0, orbit_period: 1 },
            ],
            groups: vec![
                tract("T", 1, vec![1], 1, vec![0]),
                CritGroup {
                    point: "c".into(),
                    target: 2,
                    locus: Locus::Julia,
                    kind: GroupKind::Finite { members: vec![Symbol::int(0), Symbol::int(1)] },
                },
            ],
        }
    }

    /// Infinitely many degree-2 critical points over `s^1` (blocks `{3b+1, 3b+2}`)
    /// and a tract over `s^2` through the indices `≢ 1 (mod 3)`.
    pub fn periodic_pattern() -> Portrait {
        Portrait {
            alphabet: Alphabet { chains: 1 },
            singulars: vec![
                SingularEntry { address: addr(&[], &[0]), locus: Locus::Julia, orbit_preperiod: 0, orbit_period: 1 },
                SingularEntry { address: addr(&[], &[1]), locus: Locus::Julia, orbit_preperiod: 0, orbit_period: 1 },
            ],
            groups: vec![
                CritGroup {
                    point: "C".into(),
                    target: 1,
                    locus: Locus::Julia,
                    kind: GroupKind::Pattern { chain: 0, modulus: 3, residues: vec![1, 2] },
                },
                tract("T", 2, vec![], 3, vec![0, 2]),
            ],
        }
    }
}
