//! Builders for the standard coefficient fixtures and the JSON fixture
//! formats consumed by the CLI.

use crate::crossed::{CrossedMorphism, CrossedSequence, CrossedSheaf};
use crate::error::{Budget, Error, Result};
use crate::group::FinGroup;
use crate::presheaf::{constant_group_sheaf, GroupPresheaf, SetMorphism, SetPresheaf};
use crate::site::{FiniteSite, Obj};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Lifts a base-group homomorphism to the constant sheaves it generates:
/// componentwise on irreducible coordinates, then glued.
pub fn constant_sheaf_hom(
    site: &FiniteSite,
    src: &GroupPresheaf,
    src_base: &FinGroup,
    dst: &GroupPresheaf,
    dst_base: &FinGroup,
    base_map: &[usize],
) -> Result<SetMorphism> {
    let irr = site.irreducibles();
    let mut maps = Vec::new();
    for u in site.objects() {
        let members: Vec<Obj> = irr.iter().copied().filter(|&v| site.leq(v, u)).collect();
        let dst_index: BTreeMap<Vec<usize>, usize> = (0..dst.size(u))
            .map(|y| {
                (
                    members
                        .iter()
                        .map(|&v| dst.res(u, v, y))
                        .collect::<Vec<_>>(),
                    y,
                )
            })
            .collect();
        let mut map = Vec::with_capacity(src.size(u));
        for x in 0..src.size(u) {
            let image: Vec<usize> = members
                .iter()
                .map(|&v| {
                    // constant sheaves carry base labels on irreducibles
                    let base_elt = src_base
                        .index_of(src.group(v).label(src.res(u, v, x)))
                        .ok_or_else(|| {
                            Error::Fixture("constant sheaf label is not a base label".into())
                        })?;
                    dst.group(v)
                        .index_of(dst_base.label(base_map[base_elt]))
                        .ok_or_else(|| {
                            Error::Fixture("image label missing in the target stalk".into())
                        })
                })
                .collect::<Result<_>>()?;
            map.push(*dst_index.get(&image).ok_or_else(|| {
                Error::Fixture("image coordinates do not glue to a section".into())
            })?);
        }
        maps.push(map);
    }
    let m = SetMorphism { maps };
    m.check_group(site, src, dst)?;
    Ok(m)
}

/// The trivial map into a trivial-Π sheaf.
fn collapse_pi(site: &FiniteSite, src: &CrossedSheaf) -> SetMorphism {
    SetMorphism {
        maps: site.objects().map(|u| vec![0; src.pi.size(u)]).collect(),
    }
}

/// 1 → (Z/2, 1) → (Z/4, 1) → (Z/2, 1) → 1 with doubling and reduction.
pub fn sequence_z2_z4_z2(site: &FiniteSite, budget: &Budget) -> Result<CrossedSequence> {
    let c2 = FinGroup::cyclic(2);
    let c4 = FinGroup::cyclic(4);
    let z2 = constant_group_sheaf(site, &c2, budget)?;
    let z4 = constant_group_sheaf(site, &c4, budget)?;
    let left = CrossedSheaf::with_trivial_pi(site, &z2);
    let mid = CrossedSheaf::with_trivial_pi(site, &z4);
    let right = CrossedSheaf::with_trivial_pi(site, &z2);
    let f = constant_sheaf_hom(site, &z2, &c2, &z4, &c4, &[0, 2])?;
    let h = constant_sheaf_hom(site, &z4, &c4, &z2, &c2, &[0, 1, 0, 1])?;
    let incl = CrossedMorphism {
        f,
        varphi: collapse_pi(site, &left),
    };
    let proj = CrossedMorphism {
        f: h,
        varphi: collapse_pi(site, &mid),
    };
    Ok(CrossedSequence {
        left,
        mid,
        right,
        incl,
        proj,
    })
}

/// 1 → (Z/3, Int S₃) → (S₃, Int S₃) → (Z/2, 1) → 1 with the 3-cycle
/// inclusion and the sign map.
pub fn sequence_z3_s3_z2(site: &FiniteSite, budget: &Budget) -> Result<CrossedSequence> {
    let c3 = FinGroup::cyclic(3);
    let s3 = FinGroup::symmetric3();
    let c2 = FinGroup::cyclic(2);
    let z3 = constant_group_sheaf(site, &c3, budget)?;
    let s3_sheaf = constant_group_sheaf(site, &s3, budget)?;
    let z2 = constant_group_sheaf(site, &c2, budget)?;
    let mid = crate::crossed::int_crossed(site, &s3_sheaf, budget)?;
    // inclusion of the 3-cycles
    let incl_base: Vec<usize> = ["e", "r", "r2"]
        .iter()
        .map(|l| s3.index_of(l).unwrap())
        .collect();
    let incl_f = constant_sheaf_hom(site, &z3, &c3, &s3_sheaf, &s3, &incl_base)?;
    // (Z/3, Int S₃): ρ = int ∘ incl, φ = conjugation pulled back through the
    // (injective) inclusion
    let rho_left = incl_f.compose(&mid.rho);
    let phi_left: Vec<Vec<Vec<usize>>> = site
        .objects()
        .map(|u| {
            (0..mid.pi.size(u))
                .map(|p| {
                    (0..z3.size(u))
                        .map(|x| {
                            let conj = mid.act(u, p, incl_f.apply(u, x));
                            (0..z3.size(u))
                                .find(|&y| incl_f.apply(u, y) == conj)
                                .expect("3-cycles are closed under conjugation")
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let left = CrossedSheaf {
        a: z3,
        pi: mid.pi.clone(),
        rho: rho_left,
        phi: phi_left,
    };
    let right = CrossedSheaf::with_trivial_pi(site, &z2);
    let sign_base: Vec<usize> = (0..6).map(|x| usize::from(x >= 3)).collect();
    let sign = constant_sheaf_hom(site, &s3_sheaf, &s3, &z2, &c2, &sign_base)?;
    let incl = CrossedMorphism {
        f: incl_f,
        varphi: SetMorphism {
            maps: site
                .objects()
                .map(|u| (0..mid.pi.size(u)).collect())
                .collect(),
        },
    };
    let proj = CrossedMorphism {
        f: sign,
        varphi: collapse_pi(site, &mid),
    };
    Ok(CrossedSequence {
        left,
        mid,
        right,
        incl,
        proj,
    })
}

/// Sheaf of crossed groups with ρ trivial: (Z/2, Z/2, 0, trivial action).
/// Its H² over a two-member circle cover is a 2-element set, which makes it
/// the canary for over-eager gauge fixing.
pub fn rho_zero_z2_z2(site: &FiniteSite, budget: &Budget) -> Result<CrossedSheaf> {
    let c2 = FinGroup::cyclic(2);
    let a = constant_group_sheaf(site, &c2, budget)?;
    let pi = constant_group_sheaf(site, &c2, budget)?;
    let rho = SetMorphism {
        maps: site.objects().map(|u| vec![pi.one(u); a.size(u)]).collect(),
    };
    let phi = site
        .objects()
        .map(|u| vec![(0..a.size(u)).collect::<Vec<_>>(); pi.size(u)])
        .collect();
    Ok(CrossedSheaf { a, pi, rho, phi })
}

/// A commutative diagram of short exact sequences with non-identity
/// verticals: Z/2→Z/4→Z/2 over Z/2→(Z/2×Z/2)→Z/2.
pub fn naturality_diagram(
    site: &FiniteSite,
    budget: &Budget,
) -> Result<crate::cohomology::SquareDiagram> {
    let c2 = FinGroup::cyclic(2);
    let c4 = FinGroup::cyclic(4);
    let klein = FinGroup::product(&c2, &c2);
    let top = sequence_z2_z4_z2(site, budget)?;
    let z2 = constant_group_sheaf(site, &c2, budget)?;
    let kl = constant_group_sheaf(site, &klein, budget)?;
    let left = CrossedSheaf::with_trivial_pi(site, &z2);
    let mid = CrossedSheaf::with_trivial_pi(site, &kl);
    let right = CrossedSheaf::with_trivial_pi(site, &z2);
    // y ↦ (y, 0) and (u, v) ↦ v
    let g_base: Vec<usize> = (0..2)
        .map(|y| klein.index_of(&format!("{y}|0")).unwrap())
        .collect();
    let g = constant_sheaf_hom(site, &z2, &c2, &kl, &klein, &g_base)?;
    let hp_base: Vec<usize> = (0..4)
        .map(|i| {
            let label = klein.label(i);
            label.split('|').nth(1).unwrap().parse().unwrap()
        })
        .collect();
    let hp = constant_sheaf_hom(site, &kl, &klein, &z2, &c2, &hp_base)?;
    let bottom = CrossedSequence {
        incl: CrossedMorphism {
            f: g,
            varphi: collapse_pi(site, &left),
        },
        proj: CrossedMorphism {
            f: hp,
            varphi: collapse_pi(site, &mid),
        },
        left,
        mid,
        right,
    };
    // verticals: zero, x ↦ (0, x mod 2), identity
    let z4 = constant_group_sheaf(site, &c4, budget)?;
    let v_left = CrossedMorphism {
        f: constant_sheaf_hom(site, &z2, &c2, &z2, &c2, &[0, 0])?,
        varphi: collapse_pi(site, &top.left),
    };
    let vm_base: Vec<usize> = (0..4)
        .map(|x| klein.index_of(&format!("0|{}", x % 2)).unwrap())
        .collect();
    let v_mid = CrossedMorphism {
        f: constant_sheaf_hom(site, &z4, &c4, &kl, &klein, &vm_base)?,
        varphi: collapse_pi(site, &top.mid),
    };
    let v_right = CrossedMorphism {
        f: constant_sheaf_hom(site, &z2, &c2, &z2, &c2, &[0, 1])?,
        varphi: collapse_pi(site, &top.right),
    };
    Ok(crate::cohomology::SquareDiagram {
        top,
        bottom,
        v_left,
        v_mid,
        v_right,
    })
}

// ---------------------------------------------------------------------------
// JSON fixture formats
// ---------------------------------------------------------------------------

/// A site fixture: either a finite space (points and opens) or explicit
/// objects, order and covering families.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteFixture {
    Space {
        points: Vec<String>,
        opens: Vec<Vec<String>>,
    },
    Abstract {
        objects: Vec<String>,
        leq: Vec<(String, String)>,
        covers: BTreeMap<String, Vec<Vec<String>>>,
    },
}

impl SiteFixture {
    pub fn build(&self) -> Result<FiniteSite> {
        match self {
            SiteFixture::Space { points, opens } => FiniteSite::from_space(points, opens),
            SiteFixture::Abstract {
                objects,
                leq,
                covers,
            } => FiniteSite::from_parts(objects.clone(), leq, covers.clone()),
        }
    }

    pub fn from_site(site: &FiniteSite) -> SiteFixture {
        let objects = site.names.clone();
        let mut leq = Vec::new();
        for u in site.objects() {
            for v in site.objects() {
                if u != v && site.leq(u, v) {
                    leq.push((site.name(u).to_string(), site.name(v).to_string()));
                }
            }
        }
        let covers = site
            .objects()
            .map(|u| {
                (
                    site.name(u).to_string(),
                    site.covers[u]
                        .iter()
                        .map(|f| f.iter().map(|&m| site.name(m).to_string()).collect())
                        .collect(),
                )
            })
            .collect();
        SiteFixture::Abstract {
            objects,
            leq,
            covers,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupStalkFixture {
    pub elements: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

/// Group presheaf fixture: per-object tables plus "U -> V" restriction maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupPresheafFixture {
    pub values: BTreeMap<String, GroupStalkFixture>,
    pub res: BTreeMap<String, BTreeMap<String, String>>,
}

fn res_key(site: &FiniteSite, u: Obj, v: Obj) -> String {
    format!("{} -> {}", site.name(u), site.name(v))
}

fn parse_res_key(site: &FiniteSite, key: &str) -> Result<(Obj, Obj)> {
    let (a, b) = key
        .split_once(" -> ")
        .ok_or_else(|| Error::Fixture(format!("restriction key {key:?} is not 'U -> V'")))?;
    let u = site
        .object_by_name(a)
        .ok_or_else(|| Error::Fixture(format!("unknown object {a:?}")))?;
    let v = site
        .object_by_name(b)
        .ok_or_else(|| Error::Fixture(format!("unknown object {b:?}")))?;
    Ok((u, v))
}

impl GroupPresheafFixture {
    pub fn from_presheaf(site: &FiniteSite, p: &GroupPresheaf) -> GroupPresheafFixture {
        let values = site
            .objects()
            .map(|u| {
                (
                    site.name(u).to_string(),
                    GroupStalkFixture {
                        elements: p.group(u).labels.clone(),
                        mul: p.group(u).mul.clone(),
                    },
                )
            })
            .collect();
        let res = p
            .res
            .iter()
            .filter(|((u, v), _)| u != v)
            .map(|(&(u, v), map)| {
                (
                    res_key(site, u, v),
                    map.iter()
                        .enumerate()
                        .map(|(x, &y)| {
                            (
                                p.group(u).label(x).to_string(),
                                p.group(v).label(y).to_string(),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        GroupPresheafFixture { values, res }
    }

    pub fn build(&self, site: &FiniteSite) -> Result<GroupPresheaf> {
        let mut groups = Vec::with_capacity(site.object_count());
        for u in site.objects() {
            let stalk = self.values.get(site.name(u)).ok_or_else(|| {
                Error::Fixture(format!("missing stalk for object {}", site.name(u)))
            })?;
            groups.push(FinGroup::from_table(
                stalk.elements.clone(),
                stalk.mul.clone(),
            )?);
        }
        let mut res = BTreeMap::new();
        for u in site.objects() {
            res.insert((u, u), (0..groups[u].order()).collect());
        }
        for (key, table) in &self.res {
            let (u, v) = parse_res_key(site, key)?;
            let map = groups[u]
                .labels
                .clone()
                .iter()
                .map(|label| {
                    let target = table.get(label).ok_or_else(|| {
                        Error::Fixture(format!("restriction {key} misses element {label}"))
                    })?;
                    groups[v].index_of(target).ok_or_else(|| {
                        Error::Fixture(format!("restriction {key} maps to unknown {target}"))
                    })
                })
                .collect::<Result<_>>()?;
            res.insert((u, v), map);
        }
        let p = GroupPresheaf { groups, res };
        p.check(site)?;
        Ok(p)
    }
}

/// Set presheaf fixture (used by check-sheaf and torsor files).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetPresheafFixture {
    pub values: BTreeMap<String, Vec<String>>,
    pub res: BTreeMap<String, BTreeMap<String, String>>,
}

impl SetPresheafFixture {
    pub fn from_presheaf(site: &FiniteSite, p: &SetPresheaf) -> SetPresheafFixture {
        let values = site
            .objects()
            .map(|u| (site.name(u).to_string(), p.values[u].clone()))
            .collect();
        let res = p
            .res
            .iter()
            .filter(|((u, v), _)| u != v)
            .map(|(&(u, v), map)| {
                (
                    res_key(site, u, v),
                    map.iter()
                        .enumerate()
                        .map(|(x, &y)| (p.label(u, x).to_string(), p.label(v, y).to_string()))
                        .collect(),
                )
            })
            .collect();
        SetPresheafFixture { values, res }
    }

    pub fn build(&self, site: &FiniteSite) -> Result<SetPresheaf> {
        let mut values = Vec::with_capacity(site.object_count());
        for u in site.objects() {
            let stalk = self.values.get(site.name(u)).ok_or_else(|| {
                Error::Fixture(format!("missing stalk for object {}", site.name(u)))
            })?;
            values.push(stalk.clone());
        }
        let index = |u: Obj, label: &str, values: &Vec<Vec<String>>| -> Result<usize> {
            values[u]
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::Fixture(format!("unknown element {label:?}")))
        };
        let mut res = BTreeMap::new();
        for u in site.objects() {
            res.insert((u, u), (0..values[u].len()).collect());
        }
        for (key, table) in &self.res {
            let (u, v) = parse_res_key(site, key)?;
            let map = values[u]
                .clone()
                .iter()
                .map(|label| {
                    let target = table.get(label).ok_or_else(|| {
                        Error::Fixture(format!("restriction {key} misses element {label}"))
                    })?;
                    index(v, target, &values)
                })
                .collect::<Result<_>>()?;
            res.insert((u, v), map);
        }
        let p = SetPresheaf { values, res };
        p.check(site)?;
        Ok(p)
    }
}

/// Either a group presheaf or a bare set presheaf, for check-sheaf.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresheafFixture {
    Group(GroupPresheafFixture),
    Set(SetPresheafFixture),
}

impl PresheafFixture {
    pub fn build_set(&self, site: &FiniteSite) -> Result<SetPresheaf> {
        match self {
            PresheafFixture::Group(g) => Ok(g.build(site)?.as_set_presheaf()),
            PresheafFixture::Set(s) => s.build(site),
        }
    }
}

/// Crossed sheaf fixture: two group presheaves plus ρ and φ tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedFixture {
    pub a: GroupPresheafFixture,
    pub pi: GroupPresheafFixture,
    /// per object: a-element → pi-element
    pub rho: BTreeMap<String, BTreeMap<String, String>>,
    /// per object: pi-element → (a-element → a-element)
    pub phi: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
}

impl CrossedFixture {
    pub fn from_crossed(site: &FiniteSite, c: &CrossedSheaf) -> CrossedFixture {
        let rho = site
            .objects()
            .map(|u| {
                (
                    site.name(u).to_string(),
                    (0..c.a.size(u))
                        .map(|x| {
                            (
                                c.a.group(u).label(x).to_string(),
                                c.pi.group(u).label(c.rho(u, x)).to_string(),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        let phi = site
            .objects()
            .map(|u| {
                (
                    site.name(u).to_string(),
                    (0..c.pi.size(u))
                        .map(|p| {
                            (
                                c.pi.group(u).label(p).to_string(),
                                (0..c.a.size(u))
                                    .map(|x| {
                                        (
                                            c.a.group(u).label(x).to_string(),
                                            c.a.group(u).label(c.act(u, p, x)).to_string(),
                                        )
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        CrossedFixture {
            a: GroupPresheafFixture::from_presheaf(site, &c.a),
            pi: GroupPresheafFixture::from_presheaf(site, &c.pi),
            rho,
            phi,
        }
    }

    pub fn build(&self, site: &FiniteSite) -> Result<CrossedSheaf> {
        let a = self.a.build(site)?;
        let pi = self.pi.build(site)?;
        let mut rho_maps = Vec::new();
        for u in site.objects() {
            let table = self
                .rho
                .get(site.name(u))
                .ok_or_else(|| Error::Fixture(format!("missing rho table at {}", site.name(u))))?;
            let map = a
                .group(u)
                .labels
                .clone()
                .iter()
                .map(|label| {
                    let image = table.get(label).ok_or_else(|| {
                        Error::Fixture(format!("rho at {} misses {label}", site.name(u)))
                    })?;
                    pi.group(u)
                        .index_of(image)
                        .ok_or_else(|| Error::Fixture(format!("unknown Π element {image}")))
                })
                .collect::<Result<_>>()?;
            rho_maps.push(map);
        }
        let mut phi = Vec::new();
        for u in site.objects() {
            let tables = self
                .phi
                .get(site.name(u))
                .ok_or_else(|| Error::Fixture(format!("missing phi table at {}", site.name(u))))?;
            let mut per_p = Vec::new();
            for p in 0..pi.size(u) {
                let p_label = pi.group(u).label(p).to_string();
                let table = tables.get(&p_label).ok_or_else(|| {
                    Error::Fixture(format!("phi at {} misses {p_label}", site.name(u)))
                })?;
                let row = a
                    .group(u)
                    .labels
                    .clone()
                    .iter()
                    .map(|label| {
                        let image = table.get(label).ok_or_else(|| {
                            Error::Fixture(format!("phi at {} misses {label}", site.name(u)))
                        })?;
                        a.group(u)
                            .index_of(image)
                            .ok_or_else(|| Error::Fixture(format!("unknown A element {image}")))
                    })
                    .collect::<Result<_>>()?;
                per_p.push(row);
            }
            phi.push(per_p);
        }
        Ok(CrossedSheaf {
            a,
            pi,
            rho: SetMorphism { maps: rho_maps },
            phi,
        })
    }
}

/// Per-object element maps for both components of a crossed morphism.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismFixture {
    pub f: BTreeMap<String, BTreeMap<String, String>>,
    pub varphi: BTreeMap<String, BTreeMap<String, String>>,
}

impl MorphismFixture {
    pub fn from_morphism(
        site: &FiniteSite,
        src: &CrossedSheaf,
        dst: &CrossedSheaf,
        m: &CrossedMorphism,
    ) -> MorphismFixture {
        let component = |src_p: &GroupPresheaf, dst_p: &GroupPresheaf, mor: &SetMorphism| {
            site.objects()
                .map(|u| {
                    (
                        site.name(u).to_string(),
                        (0..src_p.size(u))
                            .map(|x| {
                                (
                                    src_p.group(u).label(x).to_string(),
                                    dst_p.group(u).label(mor.apply(u, x)).to_string(),
                                )
                            })
                            .collect(),
                    )
                })
                .collect()
        };
        MorphismFixture {
            f: component(&src.a, &dst.a, &m.f),
            varphi: component(&src.pi, &dst.pi, &m.varphi),
        }
    }

    pub fn build(
        &self,
        site: &FiniteSite,
        src: &CrossedSheaf,
        dst: &CrossedSheaf,
    ) -> Result<CrossedMorphism> {
        let build_component = |tables: &BTreeMap<String, BTreeMap<String, String>>,
                               src_p: &GroupPresheaf,
                               dst_p: &GroupPresheaf|
         -> Result<SetMorphism> {
            let mut maps = Vec::new();
            for u in site.objects() {
                let table = tables.get(site.name(u)).ok_or_else(|| {
                    Error::Fixture(format!("missing morphism table at {}", site.name(u)))
                })?;
                let map = src_p
                    .group(u)
                    .labels
                    .clone()
                    .iter()
                    .map(|label| {
                        let image = table.get(label).ok_or_else(|| {
                            Error::Fixture(format!("morphism misses element {label}"))
                        })?;
                        dst_p
                            .group(u)
                            .index_of(image)
                            .ok_or_else(|| Error::Fixture(format!("unknown element {image}")))
                    })
                    .collect::<Result<_>>()?;
                maps.push(map);
            }
            Ok(SetMorphism { maps })
        };
        Ok(CrossedMorphism {
            f: build_component(&self.f, &src.a, &dst.a)?,
            varphi: build_component(&self.varphi, &src.pi, &dst.pi)?,
        })
    }
}

/// A short exact sequence fixture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFixture {
    pub left: CrossedFixture,
    pub mid: CrossedFixture,
    pub right: CrossedFixture,
    pub f: MorphismFixture,
    pub h: MorphismFixture,
}

impl SequenceFixture {
    pub fn from_sequence(site: &FiniteSite, seq: &CrossedSequence) -> SequenceFixture {
        SequenceFixture {
            left: CrossedFixture::from_crossed(site, &seq.left),
            mid: CrossedFixture::from_crossed(site, &seq.mid),
            right: CrossedFixture::from_crossed(site, &seq.right),
            f: MorphismFixture::from_morphism(site, &seq.left, &seq.mid, &seq.incl),
            h: MorphismFixture::from_morphism(site, &seq.mid, &seq.right, &seq.proj),
        }
    }

    pub fn build(&self, site: &FiniteSite) -> Result<CrossedSequence> {
        let left = self.left.build(site)?;
        let mid = self.mid.build(site)?;
        let right = self.right.build(site)?;
        let incl = self.f.build(site, &left, &mid)?;
        let proj = self.h.build(site, &mid, &right)?;
        Ok(CrossedSequence {
            left,
            mid,
            right,
            incl,
            proj,
        })
    }
}

/// A naturality diagram fixture: two sequences with three verticals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramFixture {
    pub top: SequenceFixture,
    pub bottom: SequenceFixture,
    pub v_left: MorphismFixture,
    pub v_mid: MorphismFixture,
    pub v_right: MorphismFixture,
}

impl DiagramFixture {
    pub fn from_diagram(site: &FiniteSite, d: &crate::cohomology::SquareDiagram) -> DiagramFixture {
        DiagramFixture {
            top: SequenceFixture::from_sequence(site, &d.top),
            bottom: SequenceFixture::from_sequence(site, &d.bottom),
            v_left: MorphismFixture::from_morphism(site, &d.top.left, &d.bottom.left, &d.v_left),
            v_mid: MorphismFixture::from_morphism(site, &d.top.mid, &d.bottom.mid, &d.v_mid),
            v_right: MorphismFixture::from_morphism(
                site,
                &d.top.right,
                &d.bottom.right,
                &d.v_right,
            ),
        }
    }

    pub fn build(&self, site: &FiniteSite) -> Result<crate::cohomology::SquareDiagram> {
        let top = self.top.build(site)?;
        let bottom = self.bottom.build(site)?;
        let v_left = self.v_left.build(site, &top.left, &bottom.left)?;
        let v_mid = self.v_mid.build(site, &top.mid, &bottom.mid)?;
        let v_right = self.v_right.build(site, &top.right, &bottom.right)?;
        Ok(crate::cohomology::SquareDiagram {
            top,
            bottom,
            v_left,
            v_mid,
            v_right,
        })
    }
}

/// Torsor fixture: the carrier presheaf plus an action table block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorsorFixture {
    pub carrier: SetPresheafFixture,
    pub group: GroupPresheafFixture,
    pub side: String,
    /// per object: carrier element → (group element → carrier element)
    pub act: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
}

impl TorsorFixture {
    pub fn from_action(site: &FiniteSite, t: &crate::action::ActionSheaf) -> TorsorFixture {
        let act = site
            .objects()
            .map(|u| {
                (
                    site.name(u).to_string(),
                    (0..t.carrier.size(u))
                        .map(|x| {
                            (
                                t.carrier.label(u, x).to_string(),
                                (0..t.group.size(u))
                                    .map(|g| {
                                        (
                                            t.group.group(u).label(g).to_string(),
                                            t.carrier.label(u, t.act(u, x, g)).to_string(),
                                        )
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        TorsorFixture {
            carrier: SetPresheafFixture::from_presheaf(site, &t.carrier),
            group: GroupPresheafFixture::from_presheaf(site, &t.group),
            side: match t.side {
                crate::action::Side::Right => "right".into(),
                crate::action::Side::Left => "left".into(),
            },
            act,
        }
    }

    pub fn build(&self, site: &FiniteSite) -> Result<crate::action::ActionSheaf> {
        let carrier = self.carrier.build(site)?;
        let group = self.group.build(site)?;
        let side = match self.side.as_str() {
            "right" => crate::action::Side::Right,
            "left" => crate::action::Side::Left,
            other => {
                return Err(Error::Fixture(format!(
                    "side must be 'left' or 'right', got {other:?}"
                )))
            }
        };
        let mut act = Vec::new();
        for u in site.objects() {
            let tables = self.act.get(site.name(u)).ok_or_else(|| {
                Error::Fixture(format!("missing action table at {}", site.name(u)))
            })?;
            let mut per_x = Vec::new();
            for x in 0..carrier.size(u) {
                let x_label = carrier.label(u, x).to_string();
                let table = tables
                    .get(&x_label)
                    .ok_or_else(|| Error::Fixture(format!("action misses element {x_label}")))?;
                let row = group
                    .group(u)
                    .labels
                    .clone()
                    .iter()
                    .map(|g_label| {
                        let image = table.get(g_label).ok_or_else(|| {
                            Error::Fixture(format!("action misses group element {g_label}"))
                        })?;
                        carrier.values[u]
                            .iter()
                            .position(|l| l == image)
                            .ok_or_else(|| Error::Fixture(format!("unknown element {image}")))
                    })
                    .collect::<Result<_>>()?;
                per_x.push(row);
            }
            act.push(per_x);
        }
        let action = crate::action::ActionSheaf {
            carrier,
            group,
            side,
            act,
        };
        action.check(site)?;
        Ok(action)
    }
}

/// Loads a JSON fixture of any deserializable shape.
pub fn load_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Saves a JSON fixture with stable formatting.
pub fn save_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}
