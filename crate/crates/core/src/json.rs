//! Portrait files in JSON syntax.
//!
//! ```json
//! {
//!   "chains": 1,
//!   "singulars": [{ "address": "|0", "locus": "julia", "preperiod": 0, "period": 1 }],
//!   "groups": [
//!     { "point": "T0", "target": 1, "locus": "julia", "kind": "zfamily", "chain": 0 }
//!   ]
//! }
//! ```
//!
//! Addresses use the `pre|per` grammar of [`ExtAddress::parse`]; members of
//! finite groups are symbol strings. `zfamily` defaults to the whole chain.

use serde::{Deserialize, Serialize};

use crate::address::{Alphabet, ExtAddress, Symbol};
use crate::error::{Error, Result};
use crate::portrait::{CritGroup, GroupKind, Locus, Portrait, SingularEntry};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortraitDoc {
    chains: u32,
    singulars: Vec<SingularDoc>,
    #[serde(default)]
    groups: Vec<GroupDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SingularDoc {
    address: String,
    locus: Locus,
    preperiod: usize,
    period: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupDoc {
    point: String,
    target: usize,
    locus: Locus,
    #[serde(flatten)]
    kind: KindDoc,
}

fn one() -> i64 {
    1
}

fn zero_residue() -> Vec<i64> {
    vec![0]
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum KindDoc {
    Finite {
        members: Vec<String>,
    },
    Zfamily {
        chain: u32,
        #[serde(default = "one")]
        modulus: i64,
        #[serde(default = "zero_residue")]
        residues: Vec<i64>,
        #[serde(default)]
        except: Vec<i64>,
    },
    Pattern {
        chain: u32,
        modulus: i64,
        residues: Vec<i64>,
    },
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

impl Portrait {
    /// Reads a portrait file. Only the syntax and the alphabet are checked;
    /// call [`Portrait::validate`] for the structural rules.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PortraitDoc = serde_json::from_str(text).map_err(parse_err)?;
        let alphabet = Alphabet::new(doc.chains)?;
        let singulars = doc
            .singulars
            .into_iter()
            .map(|s| {
                let address = ExtAddress::parse(&s.address)?;
                address.check(&alphabet)?;
                Ok(SingularEntry { address, locus: s.locus, orbit_preperiod: s.preperiod, orbit_period: s.period })
            })
            .collect::<Result<Vec<_>>>()?;
        let groups = doc
            .groups
            .into_iter()
            .map(|g| {
                let kind = match g.kind {
                    KindDoc::Finite { members } => {
                        let members = members.iter().map(|m| Symbol::parse(m)).collect::<Result<Vec<_>>>()?;
                        members.iter().try_for_each(|s| alphabet.check(*s))?;
                        GroupKind::Finite { members }
                    }
                    KindDoc::Zfamily { chain, modulus, residues, except } => {
                        alphabet.check(Symbol::new(chain, 0))?;
                        GroupKind::ZFamily { chain, modulus, residues, except }
                    }
                    KindDoc::Pattern { chain, modulus, residues } => {
                        alphabet.check(Symbol::new(chain, 0))?;
                        GroupKind::Pattern { chain, modulus, residues }
                    }
                };
                if matches!(kind, GroupKind::ZFamily { modulus, .. } | GroupKind::Pattern { modulus, .. } if modulus < 1) {
                    return Err(Error::Parse(format!("group `{}`: modulus must be positive", g.point)));
                }
                Ok(CritGroup { point: g.point, target: g.target, locus: g.locus, kind })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Portrait { alphabet, singulars, groups })
    }

    pub fn to_json(&self) -> String {
        let chains = self.alphabet.chains;
        let doc = PortraitDoc {
            chains,
            singulars: self
                .singulars
                .iter()
                .map(|s| SingularDoc {
                    address: s.address.render(chains),
                    locus: s.locus,
                    preperiod: s.orbit_preperiod,
                    period: s.orbit_period,
                })
                .collect(),
            groups: self
                .groups
                .iter()
                .map(|g| GroupDoc {
                    point: g.point.clone(),
                    target: g.target,
                    locus: g.locus,
                    kind: match &g.kind {
                        GroupKind::Finite { members } => {
                            KindDoc::Finite { members: members.iter().map(|s| s.render(chains)).collect() }
                        }
                        GroupKind::ZFamily { chain, modulus, residues, except } => KindDoc::Zfamily {
                            chain: *chain,
                            modulus: *modulus,
                            residues: residues.clone(),
                            except: except.clone(),
                        },
                        GroupKind::Pattern { chain, modulus, residues } => {
                            KindDoc::Pattern { chain: *chain, modulus: *modulus, residues: residues.clone() }
                        }
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("portrait documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::examples;
    use proptest::prelude::*;

    #[test]
    fn examples_round_trip() {
        for p in [examples::exponential(), examples::tract_and_critical(), examples::periodic_pattern()] {
            let text = p.to_json();
            let back = Portrait::from_json(&text).unwrap();
            assert_eq!(back, p);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn minimal_exponential_file() {
        let text = r#"{"chains": 1,
            "singulars": [{"address": "|0", "locus": "julia", "preperiod": 0, "period": 1}],
            "groups": [{"point": "T0", "target": 1, "locus": "julia", "kind": "zfamily", "chain": 0}]}"#;
        assert_eq!(Portrait::from_json(text).unwrap(), examples::exponential());
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            "{",
            r#"{"chains": 0, "singulars": []}"#,
            r#"{"chains": 1, "singulars": [{"address": "0", "locus": "julia", "preperiod": 0, "period": 1}]}"#,
            r#"{"chains": 1, "singulars": [{"address": "|1:0", "locus": "julia", "preperiod": 0, "period": 1}]}"#,
            r#"{"chains": 1, "singulars": [], "groups": [{"point": "c", "target": 1, "locus": "julia", "kind": "blob"}]}"#,
            r#"{"chains": 1, "singulars": [], "groups": [{"point": "c", "target": 1, "locus": "julia", "kind": "pattern", "chain": 0, "modulus": 0, "residues": []}]}"#,
        ];
        for t in bad {
            assert!(matches!(Portrait::from_json(t), Err(Error::Parse(_)) | Err(Error::InvalidPortrait(_)) | Err(Error::ChainOutOfRange { .. })), "{t}");
        }
    }

    fn symbol(chains: u32) -> impl Strategy<Value = Symbol> {
        (0..chains, -9i64..=9).prop_map(|(c, i)| Symbol::new(c, i))
    }

    fn address(chains: u32) -> impl Strategy<Value = ExtAddress> {
        (prop::collection::vec(symbol(chains), 0..3), prop::collection::vec(symbol(chains), 1..4))
            .prop_map(|(pre, per)| ExtAddress::normalize(pre, per).unwrap())
    }

    fn portrait() -> impl Strategy<Value = Portrait> {
        (1u32..3).prop_flat_map(|chains| {
            let locus = prop_oneof![Just(Locus::Julia), Just(Locus::Fatou)];
            let singular = (address(chains), locus.clone(), 0usize..3, 1usize..4).prop_map(|(address, locus, m, n)| {
                SingularEntry { address, locus, orbit_preperiod: m, orbit_period: n }
            });
            let kind = prop_oneof![
                prop::collection::vec(symbol(chains), 1..4).prop_map(|members| GroupKind::Finite { members }),
                (0..chains, 1i64..4, prop::collection::vec(0i64..3, 1..3), prop::collection::vec(-5i64..5, 0..2))
                    .prop_map(|(chain, modulus, residues, except)| GroupKind::ZFamily { chain, modulus, residues, except }),
                (0..chains, 1i64..4, prop::collection::vec(0i64..3, 1..3))
                    .prop_map(|(chain, modulus, residues)| GroupKind::Pattern { chain, modulus, residues }),
            ];
            let group = ("[a-z][a-z0-9]{0,3}", 1usize..3, locus, kind)
                .prop_map(|(point, target, locus, kind)| CritGroup { point, target, locus, kind });
            (prop::collection::vec(singular, 1..3), prop::collection::vec(group, 0..4)).prop_map(
                move |(singulars, groups)| Portrait { alphabet: Alphabet { chains }, singulars, groups },
            )
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_parse_is_identity(p in portrait()) {
            let text = p.to_json();
            let back = Portrait::from_json(&text).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
