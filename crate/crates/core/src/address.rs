//! Symbols, external addresses and the order structure of address space.
//!
//! Fundamental domains are modeled as `k` bi-infinite chains; a symbol is a
//! `(chain, index)` pair. The linear order on symbols is lexicographic on that
//! pair and the linear order on addresses is lexicographic over symbols. The
//! cyclic order closes the line through the cut point `α`, which sits after
//! the last chain and before the first.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::EventuallyPeriodic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub chain: u32,
    pub index: i64,
}

impl Symbol {
    pub const fn new(chain: u32, index: i64) -> Self {
        Self { chain, index }
    }

    /// Symbol on chain 0; the whole alphabet when `k = 1`.
    pub const fn int(index: i64) -> Self {
        Self { chain: 0, index }
    }

    pub fn succ(self) -> Self {
        Self { index: self.index + 1, ..self }
    }

    pub fn pred(self) -> Self {
        Self { index: self.index - 1, ..self }
    }

    pub fn render(&self, chains: u32) -> String {
        if chains <= 1 {
            self.index.to_string()
        } else {
            format!("{}:{}", self.chain, self.index)
        }
    }

    /// Parses `index` (chain 0) or `chain:index`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad symbol `{s}`"));
        match s.split_once(':') {
            Some((c, i)) => Ok(Self::new(c.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?)),
            None => Ok(Self::int(s.parse().map_err(|_| bad())?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    pub chains: u32,
}

impl Alphabet {
    pub fn new(chains: u32) -> Result<Self> {
        if chains == 0 {
            return Err(Error::InvalidPortrait("alphabet needs at least one chain".into()));
        }
        Ok(Self { chains })
    }

    pub fn check(&self, s: Symbol) -> Result<()> {
        if s.chain < self.chains {
            Ok(())
        } else {
            Err(Error::ChainOutOfRange { chain: s.chain, chains: self.chains })
        }
    }

    /// All symbols of every chain with index in `lo..=hi`, in linear order.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (0..self.chains).flat_map(|c| (lo..=hi).map(move |i| Symbol::new(c, i))).collect()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self { chains: 1 }
    }
}

/// An eventually periodic external address in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtAddress(EventuallyPeriodic<Symbol>);

impl ExtAddress {
    pub fn normalize(pre: Vec<Symbol>, per: Vec<Symbol>) -> Result<Self> {
        EventuallyPeriodic::new(pre, per).map(Self)
    }

    /// Convenience constructor for single-chain addresses.
    pub fn ints(pre: &[i64], per: &[i64]) -> Result<Self> {
        Self::normalize(pre.iter().copied().map(Symbol::int).collect(), per.iter().copied().map(Symbol::int).collect())
    }

    /// The fixed address `F F F …`.
    pub fn constant(s: Symbol) -> Self {
        Self(EventuallyPeriodic::periodic(vec![s]).expect("nonempty"))
    }

    pub fn seq(&self) -> &EventuallyPeriodic<Symbol> {
        &self.0
    }

    pub fn preperiod(&self) -> &[Symbol] {
        self.0.preperiod()
    }

    pub fn period(&self) -> &[Symbol] {
        self.0.period()
    }

    pub fn preperiod_period(&self) -> (usize, usize) {
        self.0.preperiod_period()
    }

    pub fn is_periodic(&self) -> bool {
        self.0.is_periodic()
    }

    pub fn at(&self, k: usize) -> Symbol {
        *self.0.at(k)
    }

    pub fn first(&self) -> Symbol {
        self.at(0)
    }

    pub fn shift(&self) -> Self {
        Self(self.0.shift())
    }

    pub fn shift_by(&self, n: usize) -> Self {
        Self(self.0.shift_by(n))
    }

    /// `F · self`.
    pub fn prepend(&self, head: Symbol) -> Self {
        Self(self.0.prepend(head))
    }

    pub fn orbit(&self) -> Vec<Self> {
        self.0.orbit().into_iter().map(Self).collect()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.0.preperiod().iter().chain(self.0.period())
    }

    /// Groups the symbol stream into consecutive `n`-blocks: the address of
    /// the same dreadlock for the `n`-th iterate.
    pub fn reblock(&self, n: usize) -> Result<BlockAddress> {
        if n == 0 {
            return Err(Error::Parse("block length must be at least 1".into()));
        }
        let (m, p) = self.preperiod_period();
        let pre_blocks = m.div_ceil(n);
        let per_blocks = crate::seq::lcm(p, n) / n;
        let block = |b: usize| (0..n).map(|i| self.at(b * n + i)).collect::<Vec<_>>();
        let pre = (0..pre_blocks).map(block).collect();
        let per = (pre_blocks..pre_blocks + per_blocks).map(block).collect();
        EventuallyPeriodic::new(pre, per)
    }

    pub fn render(&self, chains: u32) -> String {
        let join = |w: &[Symbol]| w.iter().map(|s| s.render(chains)).collect::<Vec<_>>().join(" ");
        format!("{}|{}", join(self.preperiod()), join(self.period()))
    }

    /// Parses `pre|per`, symbols separated by whitespace.
    pub fn parse(s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("address `{s}` lacks `|` between preperiod and period")))?;
        let word = |w: &str| w.split_whitespace().map(Symbol::parse).collect::<Result<Vec<_>>>();
        Self::normalize(word(pre)?, word(per)?)
    }

    pub fn check(&self, alphabet: &Alphabet) -> Result<()> {
        self.symbols().try_for_each(|s| alphabet.check(*s))
    }
}

impl Ord for ExtAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lex_cmp(&other.0)
    }
}

impl PartialOrd for ExtAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chains = if self.symbols().any(|s| s.chain > 0) { 2 } else { 1 };
        f.write_str(&self.render(chains))
    }
}

/// Address over the alphabet of `n`-blocks of symbols.
pub type BlockAddress = EventuallyPeriodic<Vec<Symbol>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Exact,
    Above,
}

/// An address, or a point infinitesimally below or above it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AddressPoint {
    pub address: ExtAddress,
    pub side: Side,
}

impl AddressPoint {
    pub fn exact(address: ExtAddress) -> Self {
        Self { address, side: Side::Exact }
    }

    pub fn below(address: ExtAddress) -> Self {
        Self { address, side: Side::Below }
    }

    pub fn above(address: ExtAddress) -> Self {
        Self { address, side: Side::Above }
    }
}

impl From<ExtAddress> for AddressPoint {
    fn from(a: ExtAddress) -> Self {
        Self::exact(a)
    }
}

pub fn compare_linear(a: &AddressPoint, b: &AddressPoint) -> Ordering {
    a.cmp(b)
}

/// Whether `b` lies on the arc from `a` to `c` in the cyclic order.
pub fn cyclic_order<T: Ord>(a: &T, b: &T, c: &T) -> Result<bool> {
    if a == b || b == c || a == c {
        return Err(Error::NotDistinct);
    }
    Ok((a < b && b < c) || (b < c && c < a) || (c < a && a < b))
}

/// A point strictly between `a < b`, or `None` when `a >= b`.
pub fn between(a: &ExtAddress, b: &ExtAddress) -> Option<ExtAddress> {
    if a >= b {
        return None;
    }
    let k = (0..a.seq().horizon(b.seq())).find(|&k| a.at(k) != b.at(k))?;
    let mut prefix: Vec<Symbol> = (0..=k).map(|i| a.at(i)).collect();
    let bump = a.at(k + 1).succ();
    prefix.push(bump);
    ExtAddress::normalize(prefix, vec![bump]).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(pre: &[i64], per: &[i64]) -> ExtAddress {
        ExtAddress::ints(pre, per).unwrap()
    }

    #[test]
    fn shift_examples() {
        assert_eq!(a(&[3], &[1, 2]).shift(), a(&[], &[1, 2]));
        assert_eq!(a(&[], &[0]).shift(), a(&[], &[0]));
        assert_eq!(a(&[], &[1, 2]).shift(), a(&[], &[2, 1]));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(a(&[1, 0], &[0]), a(&[1], &[0]));
        assert_eq!(a(&[1, 0], &[0]).preperiod_period(), (1, 1));
        assert_eq!(a(&[], &[1, 2, 1, 2]).period(), &[Symbol::int(1), Symbol::int(2)]);
        let n = a(&[3], &[1, 2]);
        assert_eq!(n.preperiod(), &[Symbol::int(3)]);
        assert_eq!(ExtAddress::ints(&[1], &[]), Err(Error::EmptyPeriod));
    }

    #[test]
    fn preperiod_period_examples() {
        assert_eq!(a(&[], &[0]).preperiod_period(), (0, 1));
        assert_eq!(a(&[3], &[1, 2]).preperiod_period(), (1, 2));
        assert_eq!(a(&[0, 1], &[0]).preperiod_period(), (2, 1));
    }

    #[test]
    fn compare_examples() {
        let p = AddressPoint::exact;
        assert_eq!(compare_linear(&p(a(&[], &[0])), &p(a(&[], &[1]))), Ordering::Less);
        assert_eq!(compare_linear(&p(a(&[1], &[0])), &p(a(&[], &[1]))), Ordering::Less);
        assert_eq!(
            compare_linear(&AddressPoint::above(a(&[1], &[0])), &p(a(&[1], &[0]))),
            Ordering::Greater
        );
    }

    #[test]
    fn cyclic_examples() {
        let (z, o, t, th) = (a(&[], &[0]), a(&[], &[1]), a(&[], &[2]), a(&[], &[3]));
        assert!(cyclic_order(&z, &o, &t).unwrap());
        assert!(!cyclic_order(&z, &t, &o).unwrap());
        // Wraps through the cut: the three cases expanded by hand.
        let expanded = (t < th && th < z) || (th < z && z < t) || (z < t && t < th);
        assert!(expanded);
        assert!(cyclic_order(&t, &th, &z).unwrap());
        assert_eq!(cyclic_order(&z, &z, &o), Err(Error::NotDistinct));
    }

    #[test]
    fn succ_pred() {
        assert_eq!(Symbol::new(0, 5).succ(), Symbol::new(0, 6));
        assert_eq!(Symbol::new(0, 0).pred(), Symbol::new(0, -1));
        assert_eq!(Symbol::new(1, -3).succ().pred(), Symbol::new(1, -3));
    }

    #[test]
    fn reblock_examples() {
        let r = a(&[], &[1, 2]).reblock(2).unwrap();
        assert_eq!(r.period(), &[vec![Symbol::int(1), Symbol::int(2)]]);
        let r = a(&[], &[0]).reblock(3).unwrap();
        assert_eq!(r.period(), &[vec![Symbol::int(0); 3]]);
        let s = a(&[3], &[1, 2]);
        assert_eq!(s.reblock(2).unwrap().shift(), s.shift_by(2).reblock(2).unwrap());
    }

    #[test]
    fn render_and_parse() {
        let s = a(&[3], &[1, 2]);
        assert_eq!(s.render(1), "3|1 2");
        assert_eq!(ExtAddress::parse("3|1 2").unwrap(), s);
        let m = ExtAddress::normalize(vec![Symbol::new(1, -2)], vec![Symbol::new(0, 4)]).unwrap();
        assert_eq!(m.render(2), "1:-2|0:4");
        assert_eq!(ExtAddress::parse(&m.render(2)).unwrap(), m);
        assert!(ExtAddress::parse("3 1 2").is_err());
    }

    fn arb_address() -> impl Strategy<Value = ExtAddress> {
        (prop::collection::vec(-3i64..=3, 0..3), prop::collection::vec(-3i64..=3, 1..4))
            .prop_map(|(pre, per)| ExtAddress::ints(&pre, &per).unwrap())
    }

    fn arb_point() -> impl Strategy<Value = AddressPoint> {
        (arb_address(), prop_oneof![Just(Side::Below), Just(Side::Exact), Just(Side::Above)])
            .prop_map(|(address, side)| AddressPoint { address, side })
    }

    proptest! {
        #[test]
        fn linear_order_is_total(x in arb_point(), y in arb_point(), z in arb_point()) {
            let xy = compare_linear(&x, &y);
            prop_assert_eq!(xy, compare_linear(&y, &x).reverse());
            prop_assert_eq!(xy == Ordering::Equal, x == y);
            if xy.is_le() && compare_linear(&y, &z).is_le() {
                prop_assert!(compare_linear(&x, &z).is_le());
            }
        }

        #[test]
        fn cyclic_rotation_and_swap(x in arb_address(), y in arb_address(), z in arb_address()) {
            prop_assume!(x != y && y != z && x != z);
            let c = cyclic_order(&x, &y, &z).unwrap();
            prop_assert_eq!(c, cyclic_order(&y, &z, &x).unwrap());
            prop_assert_eq!(c, !cyclic_order(&x, &z, &y).unwrap());
        }

        #[test]
        fn normalize_idempotent_and_shift_lengths(x in arb_address()) {
            let again = ExtAddress::normalize(x.preperiod().to_vec(), x.period().to_vec()).unwrap();
            prop_assert_eq!(&again, &x);
            let (m, n) = x.preperiod_period();
            prop_assert_eq!(x.shift().preperiod_period(), (m.saturating_sub(1), n));
        }

        #[test]
        fn density(x in arb_address(), y in arb_address()) {
            prop_assume!(x != y);
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            let mid = between(&lo, &hi).unwrap();
            prop_assert!(lo < mid && mid < hi);
        }

        #[test]
        fn reblock_commutes_with_shift(x in arb_address(), n in 1usize..4) {
            prop_assert_eq!(x.reblock(n).unwrap().shift(), x.shift_by(n).reblock(n).unwrap());
        }
    }
}
