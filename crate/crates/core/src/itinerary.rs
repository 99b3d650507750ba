//! Itineraries of addresses with respect to the sectors of a portrait.

use crate::address::{AddressPoint, ExtAddress, Side};
use crate::error::{Error, Result};
use crate::partition::{OneSide, SectorId};
use crate::portrait::{GroupRef, Portrait};
use crate::seq::EventuallyPeriodic;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItineraryEntry {
    Sector(SectorId),
    /// A boundary address: `left` is the sector of `I⁻`, `right` that of `I⁺`.
    BoundaryPair { left: SectorId, right: SectorId },
    /// A Julia point whose landing set is `Crit(group)`.
    JuliaStar { group: GroupRef, label: String },
    /// An orbit point of a Fatou singular value.
    FatouDiamond { group: GroupRef, label: String },
}

pub type Itinerary = EventuallyPeriodic<ItineraryEntry>;

impl ItineraryEntry {
    pub fn sector(&self) -> Option<&SectorId> {
        match self {
            ItineraryEntry::Sector(s) => Some(s),
            _ => None,
        }
    }

    /// Whether the entry is compatible with the plain sector `u` as seen from
    /// the given side.
    fn matches(&self, u: &SectorId, side: OneSide, p: &Portrait) -> bool {
        match self {
            ItineraryEntry::Sector(s) => s == u,
            ItineraryEntry::BoundaryPair { left, right } => match side {
                OneSide::Minus => left == u,
                OneSide::Plus => right == u,
            },
            ItineraryEntry::JuliaStar { group, .. } => u
                .intervals
                .iter()
                .flat_map(|iv| [&iv.lower, &iv.upper])
                .any(|b| p.group_of_address(b) == Some(*group)),
            ItineraryEntry::FatouDiamond { .. } => false,
        }
    }

    pub fn render(&self, chains: u32) -> String {
        match self {
            ItineraryEntry::Sector(s) => format!("S({})", s.render(chains)),
            ItineraryEntry::BoundaryPair { left, right } => {
                format!("B({} | {})", left.render(chains), right.render(chains))
            }
            ItineraryEntry::JuliaStar { label, .. } => format!("*({label})"),
            ItineraryEntry::FatouDiamond { label, .. } => format!("o({label})"),
        }
    }
}

fn one_sided(a: &ExtAddress, p: &Portrait, side: OneSide) -> Itinerary {
    let (m, n) = a.preperiod_period();
    let orbit = a.orbit();
    let entry = |x: &ExtAddress| ItineraryEntry::Sector(p.sector_side_of(x, side));
    Itinerary::new(orbit[..m].iter().map(entry).collect(), orbit[m..m + n].iter().map(entry).collect())
        .expect("period is nonempty")
}

/// Entry `j` is the sector whose `I⁻` contains `σ^j(a)`.
pub fn itinerary_left(a: &ExtAddress, p: &Portrait) -> Itinerary {
    one_sided(a, p, OneSide::Minus)
}

/// Entry `j` is the sector whose `I⁺` contains `σ^j(a)`.
pub fn itinerary_right(a: &ExtAddress, p: &Portrait) -> Itinerary {
    one_sided(a, p, OneSide::Plus)
}

pub fn itinerary_full(a: &ExtAddress, p: &Portrait) -> Itinerary {
    let (m, n) = a.preperiod_period();
    let orbit = a.orbit();
    let entry = |x: &ExtAddress| {
        if p.is_boundary(x) {
            let at = |side| p.sector_of(&AddressPoint { address: x.clone(), side }).expect("side given");
            ItineraryEntry::BoundaryPair { left: at(Side::Below), right: at(Side::Above) }
        } else {
            ItineraryEntry::Sector(p.sector_of(&AddressPoint::exact(x.clone())).expect("interior point"))
        }
    };
    Itinerary::new(orbit[..m].iter().map(entry).collect(), orbit[m..m + n].iter().map(entry).collect())
        .expect("period is nonempty")
}

/// Whether `it` is adjacent to the sector sequence `u`: all entries match
/// `u` through their left components, or all through their right ones.
pub fn adjacent(it: &Itinerary, u: &Itinerary, p: &Portrait) -> bool {
    let horizon = it.preperiod().len().max(u.preperiod().len())
        + crate::seq::lcm(it.period().len(), u.period().len());
    [OneSide::Minus, OneSide::Plus].into_iter().any(|side| {
        (0..horizon).all(|k| u.at(k).sector().is_some_and(|s| it.at(k).matches(s, side, p)))
    })
}

pub fn render_itinerary(it: &Itinerary, chains: u32) -> String {
    let join = |w: &[ItineraryEntry]| w.iter().map(|e| e.render(chains)).collect::<Vec<_>>().join(" ");
    format!("{} | {}", join(it.preperiod()), join(it.period())).trim().to_string()
}

/// Splits `s` at top-level occurrences of `sep` (outside parentheses).
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_sector(s: &str, p: &Portrait) -> Result<SectorId> {
    let bad = || Error::Parse(format!("bad sector `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let (lo, hi) = (ExtAddress::parse(lo)?, ExtAddress::parse(hi)?);
    let sector = p.sector_of(&AddressPoint::above(lo.clone()))?;
    if sector.intervals.iter().any(|iv| iv.lower == lo && iv.upper == hi) {
        Ok(sector)
    } else {
        Err(Error::Parse(format!("`{s}` is not an elementary interval of the portrait")))
    }
}

fn parse_entry(s: &str, p: &Portrait) -> Result<ItineraryEntry> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad itinerary entry `{s}`"));
    let (tag, rest) = s.split_once('(').ok_or_else(bad)?;
    let body = rest.strip_suffix(')').ok_or_else(bad)?.trim();
    let group = || p.group_by_label(body).ok_or_else(|| Error::Parse(format!("unknown point `{body}`")));
    match tag.trim() {
        "S" => Ok(ItineraryEntry::Sector(parse_sector(body, p)?)),
        "B" => {
            let (l, r) = body.split_once(" | ").ok_or_else(bad)?;
            Ok(ItineraryEntry::BoundaryPair { left: parse_sector(l.trim(), p)?, right: parse_sector(r.trim(), p)? })
        }
        "*" => Ok(ItineraryEntry::JuliaStar { group: group()?, label: body.to_string() }),
        "o" => Ok(ItineraryEntry::FatouDiamond { group: group()?, label: body.to_string() }),
        _ => Err(bad()),
    }
}

fn keyword_form(s: &str) -> Option<String> {
    let s = s.trim();
    if let Some(per) = s.strip_prefix("per ") {
        return Some(format!("| {per}"));
    }
    let rest = s.strip_prefix("pre ")?;
    let at = split_top(rest, ' ').iter().position(|t| *t == "per")?;
    let tokens = split_top(rest, ' ');
    Some(format!("{} | {}", tokens[..at].join(" "), tokens[at + 1..].join(" ")))
}

/// Parses `pre | per` with whitespace-separated entries; a string without a
/// top-level `|` is a purely periodic word. The keyword forms
/// `per <word>` and `pre <word> per <word>` are accepted too.
pub fn parse_itinerary(s: &str, p: &Portrait) -> Result<Itinerary> {
    let keyworded;
    let s = match keyword_form(s) {
        Some(k) => {
            keyworded = k;
            keyworded.as_str()
        }
        None => s,
    };
    let parts = split_top(s, '|');
    let (pre, per) = match parts.as_slice() {
        [per] => ("", *per),
        [pre, per] => (*pre, *per),
        _ => return Err(Error::Parse(format!("itinerary `{s}` has more than one `|`"))),
    };
    let word = |w: &str| -> Result<Vec<ItineraryEntry>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        for c in w.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if c.is_whitespace() && depth == 0 {
                if !cur.is_empty() {
                    out.push(parse_entry(&cur, p)?);
                    cur.clear();
                }
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            out.push(parse_entry(&cur, p)?);
        }
        Ok(out)
    };
    Itinerary::new(word(pre)?, word(per)?)
}

impl Portrait {
    /// Inverse of `group_label`.
    pub fn group_by_label(&self, label: &str) -> Option<GroupRef> {
        if let Some((name, rest)) = label.split_once('[') {
            let block: i64 = rest.strip_suffix(']')?.parse().ok()?;
            let group = self.groups.iter().position(|g| g.point == name)?;
            let r = GroupRef::Block { group, block };
            return (self.group_label(r) == label).then_some(r);
        }
        if let Some(group) = self.groups.iter().position(|g| g.point == label) {
            return Some(GroupRef::Listed { group });
        }
        let (target, sym) = label.strip_prefix('r')?.split_once('.')?;
        let target: usize = target.parse().ok()?;
        if target == 0 || target > self.n() {
            return None;
        }
        let r = self.group_of(target, crate::address::Symbol::parse(sym).ok()?);
        matches!(r, GroupRef::Regular { .. }).then_some(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::examples::*;
    use proptest::prelude::*;

    fn a(pre: &[i64], per: &[i64]) -> ExtAddress {
        ExtAddress::ints(pre, per).unwrap()
    }

    fn sector(p: &Portrait, x: ExtAddress) -> SectorId {
        p.sector_of(&AddressPoint::exact(x)).unwrap()
    }

    fn sec(p: &Portrait, x: ExtAddress) -> ItineraryEntry {
        ItineraryEntry::Sector(sector(p, x))
    }

    #[test]
    fn left_examples() {
        let p = exponential();
        let s1 = sec(&p, a(&[], &[1]));
        let s2 = sec(&p, a(&[], &[2]));
        assert_eq!(itinerary_left(&a(&[], &[1]), &p), Itinerary::periodic(vec![s1.clone()]).unwrap());
        assert_eq!(
            itinerary_left(&a(&[], &[1, 2]), &p),
            Itinerary::periodic(vec![s1.clone(), s2.clone()]).unwrap()
        );
        let zero = itinerary_left(&a(&[], &[0]), &p);
        assert_eq!(itinerary_left(&a(&[2], &[0]), &p), zero.prepend(s1.clone()));
        assert_eq!(itinerary_right(&a(&[2], &[0]), &p), itinerary_right(&a(&[], &[0]), &p).prepend(s2.clone()));
        assert_eq!(itinerary_right(&a(&[], &[1]), &p), itinerary_left(&a(&[], &[1]), &p));
    }

    #[test]
    fn full_and_adjacency_examples() {
        let p = exponential();
        let full = itinerary_full(&a(&[2], &[0]), &p);
        let (s1, s2) = (sector(&p, a(&[], &[1])), sector(&p, a(&[], &[2])));
        assert_eq!(full.at(0), &ItineraryEntry::BoundaryPair { left: s1.clone(), right: s2.clone() });
        let tail = itinerary_left(&a(&[], &[0]), &p);
        assert!(adjacent(&full, &tail.prepend(ItineraryEntry::Sector(s1)), &p));
        let tail_r = itinerary_right(&a(&[], &[0]), &p);
        assert!(adjacent(&full, &tail_r.prepend(ItineraryEntry::Sector(s2)), &p));
        assert!(!adjacent(&full, &tail.prepend(sec(&p, a(&[], &[3]))), &p));
    }

    #[test]
    fn render_parse_round_trip() {
        for p in [exponential(), tract_and_critical(), periodic_pattern()] {
            for x in [a(&[2], &[0]), a(&[], &[1, 2]), a(&[0, 1], &[2]), a(&[3], &[1])] {
                for it in [itinerary_left(&x, &p), itinerary_full(&x, &p)] {
                    let text = render_itinerary(&it, 1);
                    assert_eq!(parse_itinerary(&text, &p).unwrap(), it, "{text}");
                }
            }
            for (gi, _) in p.groups.iter().enumerate() {
                let g = p.group_of_address(&p.listed_members(gi, 0, 3)[0]).unwrap();
                assert_eq!(p.group_by_label(&p.group_label(g)), Some(g));
            }
        }
    }

    #[test]
    fn keyword_forms() {
        let p = exponential();
        let plain = parse_itinerary("| S(1|0,2|0) S(2|0,3|0)", &p).unwrap();
        assert_eq!(parse_itinerary("per S(1|0,2|0) S(2|0,3|0)", &p).unwrap(), plain);
        let mixed = parse_itinerary("S(0|0,1|0) | S(1|0,2|0)", &p).unwrap();
        assert_eq!(parse_itinerary("pre S(0|0,1|0) per S(1|0,2|0)", &p).unwrap(), mixed);
    }

    fn corpus_address() -> impl Strategy<Value = ExtAddress> {
        (prop::collection::vec(-3i64..=3, 0..3), prop::collection::vec(-3i64..=3, 1..4))
            .prop_map(|(q, r)| ExtAddress::ints(&q, &r).unwrap())
    }

    proptest! {
        #[test]
        fn shift_equivariance(x in corpus_address()) {
            for p in [exponential(), tract_and_critical(), periodic_pattern()] {
                prop_assert_eq!(itinerary_left(&x.shift(), &p), itinerary_left(&x, &p).shift());
                prop_assert_eq!(itinerary_right(&x.shift(), &p), itinerary_right(&x, &p).shift());
            }
        }

        #[test]
        fn periodic_itinerary_only_for_periodic_addresses(x in corpus_address()) {
            for p in [exponential(), tract_and_critical(), periodic_pattern()] {
                if itinerary_left(&x, &p).is_periodic() {
                    prop_assert!(x.is_periodic(), "{}", x);
                }
            }
        }

        #[test]
        fn interior_entries_are_sectors(x in corpus_address()) {
            for p in [exponential(), tract_and_critical(), periodic_pattern()] {
                let (l, r) = (itinerary_left(&x, &p), itinerary_right(&x, &p));
                let full = itinerary_full(&x, &p);
                for (j, y) in x.orbit().iter().enumerate() {
                    if !p.is_boundary(y) {
                        let s = sector(&p, y.clone());
                        prop_assert_eq!(l.at(j).sector(), Some(&s));
                        prop_assert_eq!(r.at(j).sector(), Some(&s));
                    }
                    let left = match full.at(j) {
                        ItineraryEntry::Sector(s) | ItineraryEntry::BoundaryPair { left: s, .. } => s,
                        _ => unreachable!(),
                    };
                    prop_assert_eq!(Some(left), l.at(j).sector());
                }
            }
        }
    }
}
