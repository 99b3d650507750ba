//! Which (pre)periodic addresses land together.
//!
//! The relation is generated by two rules: equal left itineraries, and
//! agreeing `I⁻` sectors up to a step where both orbits enter the landing
//! set of the same Julia critical point or transcendental singularity.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::address::{between, Alphabet, AddressPoint, ExtAddress, Side};
use crate::error::{Error, Result};
use crate::itinerary::{itinerary_left, itinerary_right, Itinerary, ItineraryEntry};
use crate::partition::{OneSide, SectorId};
use crate::portrait::{GroupRef, Locus, Portrait};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLocus {
    /// A point of the complex plane.
    Plane,
    /// A transcendental singularity or one of its preimages.
    Tract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandingClass {
    /// Minimal member.
    pub id: ExtAddress,
    /// Members found in the enumeration window, sorted.
    pub members: Vec<ExtAddress>,
    pub preperiod: usize,
    pub period: usize,
    pub locus: ClassLocus,
    /// Julia groups whose members belong to the class; an infinite group
    /// means the class is infinite.
    pub groups: Vec<GroupRef>,
}

/// All normalized addresses with symbol indices in `lo..=hi` on every chain,
/// preperiod at most `max_pre` and period at most `max_per`, sorted.
pub fn enumerate_addresses(alphabet: &Alphabet, lo: i64, hi: i64, max_pre: usize, max_per: usize) -> Vec<ExtAddress> {
    let symbols = alphabet.window(lo, hi);
    let words = |max_len: usize, min_len: usize| {
        let mut all = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<_>| {
                    symbols.iter().map(move |s| {
                        let mut v = w.clone();
                        v.push(*s);
                        v
                    })
                })
                .collect();
            all.extend(layer.iter().cloned());
        }
        all.retain(|w| w.len() >= min_len);
        all
    };
    let pres = words(max_pre, 0);
    let pers = words(max_per, 1);
    let set: BTreeSet<ExtAddress> = pres
        .par_iter()
        .flat_map_iter(|pre| pers.iter().map(move |per| ExtAddress::normalize(pre.clone(), per.clone()).expect("nonempty")))
        .collect();
    set.into_iter().collect()
}

/// Landing computations over a portrait that has been checked to be simple.
#[derive(Debug, Clone, Copy)]
pub struct Landing<'p> {
    p: &'p Portrait,
}

impl<'p> Landing<'p> {
    pub fn new(p: &'p Portrait) -> Result<Self> {
        p.require_simple()?;
        Ok(Self { p })
    }

    pub fn portrait(&self) -> &'p Portrait {
        self.p
    }

    fn left_sector(&self, a: &ExtAddress) -> SectorId {
        self.p.sector_side_of(a, OneSide::Minus)
    }

    pub fn periodic_land_together(&self, s: &ExtAddress, t: &ExtAddress) -> Result<bool> {
        if !s.is_periodic() || !t.is_periodic() {
            return Err(Error::NotPeriodic);
        }
        Ok(itinerary_left(s, self.p) == itinerary_left(t, self.p))
    }

    /// Julia group of `b` usable by the second rule: a listed group, and `b`
    /// not the periodic member that some groups share with their target.
    fn julia_group(&self, b: &ExtAddress) -> Option<GroupRef> {
        if b.is_periodic() {
            return None;
        }
        let g = self.p.group_of_address(b)?;
        (g.listed_index().is_some() && self.p.group_locus(g) == Locus::Julia).then_some(g)
    }

    pub fn equivalent(&self, s: &ExtAddress, t: &ExtAddress) -> bool {
        if s == t {
            return true;
        }
        let (m, n) = s.preperiod_period();
        if (m, n) != t.preperiod_period() {
            return false;
        }
        if m == 0 {
            return itinerary_left(s, self.p) == itinerary_left(t, self.p);
        }
        if !self.equivalent(&s.shift(), &t.shift()) {
            return false;
        }
        let (is, it) = (self.left_sector(s), self.left_sector(t));
        is == it || self.bridged(s, &is, &it)
    }

    /// Whether the sectors of `s` and `t` share, as upper endpoints, members
    /// of one Julia group whose image lands with `σ(s)`.
    fn bridged(&self, s: &ExtAddress, is: &SectorId, it: &SectorId) -> bool {
        let image = s.shift();
        is.intervals.iter().any(|iv| {
            let Some(g) = self.julia_group(&iv.upper) else { return false };
            let target = self.p.s(self.p.group_target(g));
            self.equivalent(target, &image)
                && it.intervals.iter().any(|jv| self.julia_group(&jv.upper) == Some(g))
        })
    }

    fn relation_keys(&self, a: &ExtAddress) -> (Itinerary, Vec<(Vec<SectorId>, GroupRef)>) {
        let (m, _) = a.preperiod_period();
        let left = itinerary_left(a, self.p);
        let mut keys = Vec::new();
        let mut x = a.clone();
        for i0 in 0..m {
            if let Some(g) = self.julia_group(&x) {
                let prefix = (0..i0).map(|k| left.at(k).sector().expect("sector entry").clone()).collect();
                keys.push((prefix, g));
            }
            x = x.shift();
        }
        (left, keys)
    }

    /// Closure of the two generating rules over `addresses`.
    pub fn classes(&self, addresses: &[ExtAddress]) -> Vec<LandingClass> {
        let keys: Vec<_> = addresses.par_iter().map(|a| self.relation_keys(a)).collect();
        let mut uf = UnionFind::<usize>::new(addresses.len());
        let mut by_itinerary: HashMap<&Itinerary, usize> = HashMap::new();
        let mut by_group: HashMap<&(Vec<SectorId>, GroupRef), usize> = HashMap::new();
        let mut groups_of: HashMap<usize, BTreeSet<GroupRef>> = HashMap::new();
        for (i, (left, rel2)) in keys.iter().enumerate() {
            let first = *by_itinerary.entry(left).or_insert(i);
            uf.union(first, i);
            for key in rel2 {
                let first = *by_group.entry(key).or_insert(i);
                uf.union(first, i);
                if key.0.is_empty() {
                    groups_of.entry(i).or_default().insert(key.1);
                }
            }
        }
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..addresses.len() {
            buckets.entry(uf.find(i)).or_default().push(i);
        }
        let mut out: Vec<LandingClass> = buckets
            .into_values()
            .map(|idx| {
                let mut members: Vec<ExtAddress> = idx.iter().map(|&i| addresses[i].clone()).collect();
                members.sort();
                let groups: BTreeSet<GroupRef> =
                    idx.iter().filter_map(|i| groups_of.get(i)).flatten().copied().collect();
                let id = members[0].clone();
                let (preperiod, period) = id.preperiod_period();
                LandingClass { locus: self.locus_of(&id), id, members, preperiod, period, groups: groups.into_iter().collect() }
            })
            .collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    fn locus_of(&self, a: &ExtAddress) -> ClassLocus {
        let m = a.preperiod_period().0;
        let tract = a.orbit()[..m]
            .iter()
            .any(|x| self.julia_group(x).is_some_and(|g| self.p.group_is_tract(g)));
        if tract {
            ClassLocus::Tract
        } else {
            ClassLocus::Plane
        }
    }

    /// Plane-side itinerary of the common landing point of the class of `a`.
    pub fn class_itinerary(&self, a: &ExtAddress) -> Itinerary {
        let (m, n) = a.preperiod_period();
        let entries: Vec<ItineraryEntry> = a.orbit().iter().map(|x| self.landing_entry(x)).collect();
        Itinerary::new(entries[..m].to_vec(), entries[m..m + n].to_vec()).expect("period is nonempty")
    }

    fn landing_entry(&self, x: &ExtAddress) -> ItineraryEntry {
        let sector = self.left_sector(x);
        let image = x.shift();
        let on_boundary = (1..=self.p.n()).find(|&j| self.equivalent(self.p.s(j), &image));
        let Some(j) = on_boundary else { return ItineraryEntry::Sector(sector) };
        // The boundary address of the sector landing with `x`.
        let b = self.p.sector_pullback(&sector, self.p.s(j), OneSide::Minus);
        let g = self.p.group_of_address(&b).expect("boundary address");
        let label = self.p.group_label(g);
        match self.p.group_locus(g) {
            Locus::Fatou => ItineraryEntry::FatouDiamond { group: g, label },
            Locus::Julia if self.julia_group(&b).is_some() => ItineraryEntry::JuliaStar { group: g, label },
            Locus::Julia if b.is_periodic() => ItineraryEntry::Sector(sector),
            Locus::Julia => {
                let at = |side| self.p.sector_of(&AddressPoint { address: b.clone(), side }).expect("side given");
                ItineraryEntry::BoundaryPair { left: at(Side::Below), right: at(Side::Above) }
            }
        }
    }
}

pub fn periodic_land_together(s: &ExtAddress, t: &ExtAddress, p: &Portrait) -> Result<bool> {
    Landing::new(p)?.periodic_land_together(s, t)
}

pub fn landing_equivalent(s: &ExtAddress, t: &ExtAddress, p: &Portrait) -> Result<bool> {
    Ok(Landing::new(p)?.equivalent(s, t))
}

pub fn enumerate_classes(p: &Portrait, lo: i64, hi: i64, max_pre: usize, max_per: usize) -> Result<Vec<LandingClass>> {
    let engine = Landing::new(p)?;
    Ok(engine.classes(&enumerate_addresses(&p.alphabet, lo, hi, max_pre, max_per)))
}

pub fn class_itinerary(cl: &LandingClass, p: &Portrait) -> Result<Itinerary> {
    Ok(Landing::new(p)?.class_itinerary(&cl.id))
}

/// A periodic address whose left (or, failing that, right) itinerary is `u`.
pub fn realize_itinerary(u: &Itinerary, p: &Portrait) -> Result<ExtAddress> {
    let v = p.validate();
    if !v.is_ok() {
        return Err(Error::InvalidPortrait(v.violations.join("; ")));
    }
    if !u.is_periodic() {
        return Err(Error::NotRealizable("itinerary is not periodic".into()));
    }
    let word: Vec<&SectorId> = u
        .period()
        .iter()
        .map(|e| e.sector().ok_or_else(|| Error::NotRealizable("entries must be sectors".into())))
        .collect::<Result<_>>()?;
    let q = word.len();
    let orbit_points: BTreeSet<ExtAddress> = (1..=p.n()).flat_map(|j| p.s(j).orbit()).collect();

    // Components of the first sector minus the forward orbits of the chosen addresses.
    let mut components: Vec<(ExtAddress, ExtAddress)> = Vec::new();
    for iv in &word[0].intervals {
        let mut cuts = vec![iv.lower.clone()];
        cuts.extend(orbit_points.iter().filter(|x| iv.contains(x)).cloned());
        cuts.push(iv.upper.clone());
        components.extend(cuts.windows(2).map(|w| (w[0].clone(), w[1].clone())));
    }
    let component_of = |x: &ExtAddress| components.iter().position(|(lo, hi)| lo < x && x < hi);

    let mut prefixes = Vec::with_capacity(components.len());
    let mut rho = Vec::with_capacity(components.len());
    for (lo, hi) in &components {
        let mut rep = between(lo, hi).ok_or_else(|| Error::NotRealizable("empty component".into()))?;
        while p.is_boundary(&rep) || orbit_points.contains(&rep) {
            rep = between(&rep, hi).ok_or_else(|| Error::NotRealizable("empty component".into()))?;
        }
        let mut x = rep;
        for l in (0..q).rev() {
            x = p.sector_pullback(word[l], &x, OneSide::Minus);
        }
        let next = component_of(&x).ok_or_else(|| Error::NotRealizable("pullback left the first sector".into()))?;
        prefixes.push((0..q).map(|k| x.at(k)).collect::<Vec<_>>());
        rho.push(next);
    }

    let mut seen = vec![false; components.len()];
    let mut c = 0;
    while !seen[c] {
        seen[c] = true;
        c = rho[c];
    }
    // `c` lies on a cycle; the address in `J_{ρ(c)}` reads `w_c` first.
    let mut cycle = vec![c];
    let mut d = rho[c];
    while d != c {
        cycle.push(d);
        d = rho[d];
    }
    let mut per = prefixes[c].clone();
    for &k in cycle[1..].iter().rev() {
        per.extend(prefixes[k].iter().copied());
    }
    let s = ExtAddress::normalize(Vec::new(), per)?;
    if &itinerary_left(&s, p) == u || &itinerary_right(&s, p) == u {
        Ok(s)
    } else {
        Err(Error::NotRealizable(format!("cycle address {s} does not follow the itinerary")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RealizationReport {
    /// Distinct one-sided itineraries of the enumerated addresses.
    pub targets: usize,
    /// Distinct classes hit by some target.
    pub classes: usize,
    /// Targets realized by more than one class, with the class ids.
    pub violations: Vec<(Itinerary, Vec<ExtAddress>)>,
}

/// Checks that every itinerary is realized by addresses of exactly one class.
pub fn unique_realization_report(p: &Portrait, lo: i64, hi: i64, max_pre: usize, max_per: usize) -> Result<RealizationReport> {
    let engine = Landing::new(p)?;
    let addresses = enumerate_addresses(&p.alphabet, lo, hi, max_pre, max_per);
    let classes = engine.classes(&addresses);
    let class_of: HashMap<&ExtAddress, &ExtAddress> =
        classes.iter().flat_map(|c| c.members.iter().map(move |a| (a, &c.id))).collect();
    let sided: Vec<(Itinerary, Itinerary)> =
        addresses.par_iter().map(|a| (itinerary_left(a, p), itinerary_right(a, p))).collect();
    let mut hits: BTreeMap<String, (Itinerary, BTreeSet<&ExtAddress>)> = BTreeMap::new();
    for (a, (l, r)) in addresses.iter().zip(&sided) {
        for it in [l, r] {
            hits.entry(crate::itinerary::render_itinerary(it, p.alphabet.chains))
                .or_insert_with(|| (it.clone(), BTreeSet::new()))
                .1
                .insert(class_of[a]);
        }
    }
    let mut report = RealizationReport { targets: hits.len(), ..Default::default() };
    let mut all = BTreeSet::new();
    for (_, (it, ids)) in hits {
        all.extend(ids.iter().copied());
        if ids.len() != 1 {
            report.violations.push((it, ids.into_iter().cloned().collect()));
        }
    }
    report.classes = all.len();
    Ok(report)
}
