//! Finitely generated abelian groups `Z^r + Z/m_1 + ... + Z/m_s`, their
//! elements, finite subsets and finite subgroups.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Int;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmbientGroup {
    free_rank: usize,
    moduli: Vec<Int>,
}

/// Coordinates of a group element. Torsion coordinates are kept reduced.
///
/// The derived ordering is lexicographic on coordinates, which is the
/// canonical order used everywhere for deterministic output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(#[serde(with = "crate::scalar::json_ints")] pub Vec<Int>);

impl GroupElement {
    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl AmbientGroup {
    pub fn new(free_rank: usize, moduli: Vec<Int>) -> Result<Self> {
        if let Some(m) = moduli.iter().find(|m| **m < BigInt::from(2)) {
            return Err(Error::Parse(format!("torsion modulus {m} must be at least 2")));
        }
        Ok(AmbientGroup { free_rank, moduli })
    }

    pub fn integers() -> Self {
        AmbientGroup { free_rank: 1, moduli: vec![] }
    }

    pub fn lattice(rank: usize) -> Self {
        AmbientGroup { free_rank: rank, moduli: vec![] }
    }

    pub fn cyclic(m: u64) -> Self {
        AmbientGroup::new(0, vec![Int::from(m)]).expect("cyclic modulus must be >= 2")
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn moduli(&self) -> &[Int] {
        &self.moduli
    }

    pub fn coord_len(&self) -> usize {
        self.free_rank + self.moduli.len()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<Int> {
        self.is_finite().then(|| self.moduli.iter().product())
    }

    fn reduce_in_place(&self, coords: &mut [Int]) {
        for (c, m) in coords[self.free_rank..].iter_mut().zip(&self.moduli) {
            *c = c.mod_floor(m);
        }
    }

    /// Builds an element, reducing torsion coordinates.
    pub fn element(&self, mut coords: Vec<Int>) -> Result<GroupElement> {
        if coords.len() != self.coord_len() {
            return Err(Error::Parse(format!(
                "element has {} coordinates, group needs {}",
                coords.len(),
                self.coord_len()
            )));
        }
        self.reduce_in_place(&mut coords);
        Ok(GroupElement(coords))
    }

    /// Convenience constructor from machine integers; panics on a length mismatch.
    pub fn elem(&self, coords: &[i64]) -> GroupElement {
        self.element(coords.iter().map(|&c| Int::from(c)).collect())
            .expect("coordinate count mismatch")
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.0.len() == self.coord_len()
            && a.0[self.free_rank..]
                .iter()
                .zip(&self.moduli)
                .all(|(c, m)| !c.is_negative() && c < m)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![Int::zero(); self.coord_len()])
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut out: Vec<Int> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        for (c, m) in out[self.free_rank..].iter_mut().zip(&self.moduli) {
            if &*c >= m {
                *c -= m;
            }
        }
        GroupElement(out)
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let mut out: Vec<Int> = a.0.iter().map(|x| -x).collect();
        self.reduce_in_place(&mut out);
        GroupElement(out)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut out: Vec<Int> = a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect();
        for (c, m) in out[self.free_rank..].iter_mut().zip(&self.moduli) {
            if c.is_negative() {
                *c += m;
            }
        }
        GroupElement(out)
    }

    /// `n * a`, with `0a = 0` and `(-n)a = -(na)`.
    pub fn scale(&self, n: &Int, a: &GroupElement) -> GroupElement {
        let mut out: Vec<Int> = a.0.iter().map(|x| x * n).collect();
        self.reduce_in_place(&mut out);
        GroupElement(out)
    }

    /// `sum_i n_i * v_i`.
    pub fn combine(&self, coeffs: &[Int], steps: &[GroupElement]) -> GroupElement {
        let mut out = vec![Int::zero(); self.coord_len()];
        for (n, v) in coeffs.iter().zip(steps) {
            if n.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(&v.0) {
                *o += n * x;
            }
        }
        self.reduce_in_place(&mut out);
        GroupElement(out)
    }

    /// Order of `a`, or `None` when `a` has a nonzero free part.
    pub fn element_order(&self, a: &GroupElement) -> Option<Int> {
        if a.0[..self.free_rank].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut order = Int::one();
        for (c, m) in a.0[self.free_rank..].iter().zip(&self.moduli) {
            let o = m / c.gcd(m);
            order = order.lcm(&o);
        }
        Some(order)
    }

    /// Every element of a finite group, in canonical order.
    pub fn all_elements(&self, cap: usize) -> Result<FiniteSet> {
        let order = self.order().ok_or_else(|| Error::cap("elements of an infinite group", cap))?;
        if order > Int::from(cap) {
            return Err(Error::cap("elements of the ambient group", cap));
        }
        let mut out = vec![self.zero()];
        for (i, m) in self.moduli.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                let mut k = Int::zero();
                while &k < m {
                    let mut c = e.clone();
                    c.0[i] = k.clone();
                    next.push(c);
                    k += 1;
                }
            }
            out = next;
        }
        Ok(FiniteSet::from_vec(self.clone(), out))
    }

    pub(crate) fn check_same(&self, other: &AmbientGroup) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

impl fmt::Display for AmbientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.moduli.iter().map(|m| format!("Z/{m}")));
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A deduplicated, canonically ordered finite subset of an ambient group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSet {
    group: AmbientGroup,
    elements: Vec<GroupElement>,
}

impl FiniteSet {
    pub fn empty(group: AmbientGroup) -> Self {
        FiniteSet { group, elements: Vec::new() }
    }

    pub fn singleton(group: AmbientGroup, a: GroupElement) -> Self {
        FiniteSet { group, elements: vec![a] }
    }

    pub fn from_vec(group: AmbientGroup, mut elements: Vec<GroupElement>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        FiniteSet { group, elements }
    }

    pub fn from_hash(group: AmbientGroup, set: HashSet<GroupElement>) -> Self {
        let mut elements: Vec<GroupElement> = set.into_iter().collect();
        elements.sort_unstable();
        FiniteSet { group, elements }
    }

    /// Builds a set of integers in `Z`.
    pub fn integers(values: &[i64]) -> Self {
        let g = AmbientGroup::integers();
        let els = values.iter().map(|&v| g.elem(&[v])).collect();
        FiniteSet::from_vec(g, els)
    }

    /// Builds a set in a cyclic group `Z/m`.
    pub fn cyclic(m: u64, values: &[i64]) -> Self {
        let g = AmbientGroup::cyclic(m);
        let els = values.iter().map(|&v| g.elem(&[v])).collect();
        FiniteSet::from_vec(g, els)
    }

    pub fn group(&self) -> &AmbientGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        self.elements.binary_search(a).is_ok()
    }

    pub fn first(&self) -> Option<&GroupElement> {
        self.elements.first()
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.len() <= other.len() && self.elements.iter().all(|a| other.contains(a))
    }

    pub fn to_hash(&self) -> HashSet<GroupElement> {
        self.elements.iter().cloned().collect()
    }

    pub fn union(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.group.check_same(&other.group)?;
        let mut v = self.elements.clone();
        v.extend(other.elements.iter().cloned());
        Ok(FiniteSet::from_vec(self.group.clone(), v))
    }

    pub fn translate(&self, x: &GroupElement) -> FiniteSet {
        let v = self.elements.iter().map(|a| self.group.add(a, x)).collect();
        FiniteSet::from_vec(self.group.clone(), v)
    }

    pub fn negate(&self) -> FiniteSet {
        let v = self.elements.iter().map(|a| self.group.neg(a)).collect();
        FiniteSet::from_vec(self.group.clone(), v)
    }

    pub fn difference_set(&self, other: &FiniteSet) -> Result<FiniteSet> {
        sumset(self, &other.negate())
    }
}

/// `A + B`.
pub fn sumset(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    sumset_capped(a, b, usize::MAX)
}

pub fn sumset_capped(a: &FiniteSet, b: &FiniteSet, cap: usize) -> Result<FiniteSet> {
    a.group.check_same(&b.group)?;
    let g = &a.group;
    let mut out = HashSet::with_capacity(a.len().max(b.len()));
    for x in &a.elements {
        for y in &b.elements {
            out.insert(g.add(x, y));
        }
        if out.len() > cap {
            return Err(Error::cap("sumset", cap));
        }
    }
    Ok(FiniteSet::from_hash(g.clone(), out))
}

/// `lA` by binary doubling.
pub fn iterated_sumset(a: &FiniteSet, l: u64, cap: usize) -> Result<FiniteSet> {
    if l == 0 {
        return Err(Error::pre("iterated sumset needs l >= 1"));
    }
    if a.len() > cap {
        return Err(Error::cap("iterated sumset", cap));
    }
    let mut acc: Option<FiniteSet> = None;
    let mut base = a.clone();
    let mut rest = l;
    loop {
        if rest & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(s) => sumset_capped(&s, &base, cap)?,
            });
        }
        rest >>= 1;
        if rest == 0 {
            break;
        }
        base = sumset_capped(&base, &base, cap)?;
    }
    Ok(acc.expect("l >= 1"))
}

/// `n . A = { na : a in A }`.
pub fn dilate_set(n: &Int, a: &FiniteSet) -> FiniteSet {
    let v = a.elements.iter().map(|x| a.group.scale(n, x)).collect();
    FiniteSet::from_vec(a.group.clone(), v)
}

/// A finite subgroup together with a generating list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSubgroup {
    generators: Vec<GroupElement>,
    elements: FiniteSet,
}

impl FiniteSubgroup {
    pub fn trivial(group: AmbientGroup) -> Self {
        let zero = group.zero();
        FiniteSubgroup { generators: Vec::new(), elements: FiniteSet::singleton(group, zero) }
    }

    pub fn generated(group: &AmbientGroup, gens: &[GroupElement], cap: usize) -> Result<Self> {
        let mut h = FiniteSubgroup::trivial(group.clone());
        for g in gens {
            h = h.adjoin(g, cap)?;
        }
        Ok(h)
    }

    /// Subgroup generated by `self` and `g`.
    pub fn adjoin(&self, g: &GroupElement, cap: usize) -> Result<Self> {
        if self.contains(g) {
            return Ok(self.clone());
        }
        let group = self.elements.group.clone();
        if group.element_order(g).is_none() {
            return Err(Error::cap("subgroup generated by an element of infinite order", cap));
        }
        // H + <g> is the union of cosets H + kg until kg falls back into H.
        let mut all: Vec<GroupElement> = self.elements.elements.clone();
        let mut kg = g.clone();
        while !self.contains(&kg) {
            for h in self.elements.iter() {
                all.push(group.add(h, &kg));
            }
            if all.len() > cap {
                return Err(Error::cap("finite subgroup", cap));
            }
            kg = group.add(&kg, g);
        }
        let mut generators = self.generators.clone();
        generators.push(g.clone());
        Ok(FiniteSubgroup { generators, elements: FiniteSet::from_vec(group, all) })
    }

    pub fn group(&self) -> &AmbientGroup {
        self.elements.group()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> &FiniteSet {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        self.elements.contains(a)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains_subgroup(&self, other: &FiniteSubgroup) -> bool {
        other.elements.is_subset(&self.elements)
    }
}

/// Closure of `S u -S u {0}` under addition.
pub fn subgroup_generated(s: &FiniteSet, cap: usize) -> Result<FiniteSubgroup> {
    FiniteSubgroup::generated(s.group(), s.elements(), cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> AmbientGroup {
        AmbientGroup::integers()
    }

    #[test]
    fn torsion_coordinates_stay_reduced() {
        let g = AmbientGroup::new(1, vec![Int::from(5)]).unwrap();
        let a = g.elem(&[3, 4]);
        let b = g.elem(&[-1, 3]);
        assert_eq!(g.add(&a, &b), g.elem(&[2, 2]));
        assert_eq!(g.neg(&a), g.elem(&[-3, 1]));
        assert_eq!(g.scale(&Int::from(-2), &a), g.elem(&[-6, 2]));
        assert_eq!(g.scale(&Int::from(0), &a), g.zero());
        assert!(g.contains(&g.sub(&b, &a)));
    }

    #[test]
    fn bad_modulus_rejected() {
        assert!(AmbientGroup::new(0, vec![Int::from(1)]).is_err());
    }

    #[test]
    fn sumset_examples() {
        let s = sumset(&FiniteSet::integers(&[0, 1]), &FiniteSet::integers(&[0, 2])).unwrap();
        assert_eq!(s, FiniteSet::integers(&[0, 1, 2, 3]));
        let b = FiniteSet::integers(&[4, -2, 7]);
        assert_eq!(sumset(&FiniteSet::integers(&[0]), &b).unwrap(), b);
        let a = FiniteSet::cyclic(5, &[0, 1, 3]);
        assert_eq!(sumset(&a, &a).unwrap(), FiniteSet::cyclic(5, &[0, 1, 2, 3, 4]));
    }

    #[test]
    fn sumset_group_mismatch() {
        let err = sumset(&FiniteSet::integers(&[0]), &FiniteSet::cyclic(3, &[1])).unwrap_err();
        assert_eq!(err, Error::GroupMismatch);
    }

    #[test]
    fn iterated_sumset_examples() {
        let a = FiniteSet::integers(&[0, 1]);
        assert_eq!(iterated_sumset(&a, 1, 100).unwrap(), a);
        assert_eq!(iterated_sumset(&a, 5, 100).unwrap(), FiniteSet::integers(&[0, 1, 2, 3, 4, 5]));
        let c = FiniteSet::cyclic(6, &[0, 1]);
        assert_eq!(iterated_sumset(&c, 7, 100).unwrap(), AmbientGroup::cyclic(6).all_elements(100).unwrap());
        assert!(matches!(iterated_sumset(&a, 50, 10), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn dilate_examples() {
        let a = FiniteSet::integers(&[0, 1]);
        assert_eq!(dilate_set(&Int::from(2), &a), FiniteSet::integers(&[0, 2]));
        assert_eq!(dilate_set(&Int::from(0), &FiniteSet::integers(&[3, 5])), FiniteSet::integers(&[0]));
        assert_eq!(
            dilate_set(&Int::from(-1), &FiniteSet::integers(&[1, 2])),
            FiniteSet::integers(&[-1, -2])
        );
    }

    #[test]
    fn subgroup_examples() {
        let h = subgroup_generated(&FiniteSet::cyclic(6, &[2]), 100).unwrap();
        assert_eq!(h.elements(), &FiniteSet::cyclic(6, &[0, 2, 4]));
        let triv = subgroup_generated(&FiniteSet::empty(z()), 100).unwrap();
        assert_eq!(triv.order(), 1);
        let g = AmbientGroup::new(0, vec![Int::from(2), Int::from(3)]).unwrap();
        let s = FiniteSet::from_vec(g.clone(), vec![g.elem(&[1, 1])]);
        let h = subgroup_generated(&s, 100).unwrap();
        assert_eq!(h.order(), 6);
        assert!(matches!(subgroup_generated(&FiniteSet::integers(&[1]), 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn all_elements_of_finite_group() {
        let g = AmbientGroup::new(0, vec![Int::from(2), Int::from(3)]).unwrap();
        let all = g.all_elements(10).unwrap();
        assert_eq!(all.len(), 6);
        assert!(g.all_elements(5).is_err());
        assert!(z().all_elements(5).is_err());
    }
}
