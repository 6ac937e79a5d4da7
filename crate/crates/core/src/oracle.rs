//! Naive reference computations for cross-checking and certificate audit.
//!
//! Nothing here calls the main algorithms: group arithmetic, subgroup
//! closure, lattice membership and point enumeration are redone from scratch
//! with plain loops and ordered sets.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::convex::SymmetricPolytope;
use crate::error::{Error, Result};
use crate::group::{AmbientGroup, FiniteSet, GroupElement};
use crate::lattice::Lattice;
use crate::progression::CosetProgression;
use crate::scalar::{Int, Rational};

type Point = Vec<Int>;

/// Outcome of checking one claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub holds: bool,
    /// Offending element or tuple, present exactly when the claim fails.
    pub counterexample: Option<Vec<GroupElement>>,
    pub elements_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn pass(claim: impl Into<String>, checked: usize) -> Self {
        VerificationReport { claim: claim.into(), holds: true, counterexample: None, elements_checked: checked, note: None }
    }

    pub fn fail(claim: impl Into<String>, witness: Vec<GroupElement>, checked: usize) -> Self {
        VerificationReport { claim: claim.into(), holds: false, counterexample: Some(witness), elements_checked: checked, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Coordinates of `Z^r + Z/m_1 + ... + Z/m_k`, reduced by hand.
struct Arith {
    free: usize,
    moduli: Vec<Int>,
}

impl Arith {
    fn of(g: &AmbientGroup) -> Self {
        Arith { free: g.free_rank(), moduli: g.moduli().to_vec() }
    }

    fn len(&self) -> usize {
        self.free + self.moduli.len()
    }

    fn reduce(&self, mut v: Point) -> Point {
        for (i, m) in self.moduli.iter().enumerate() {
            v[self.free + i] = v[self.free + i].mod_floor(m);
        }
        v
    }

    fn zero(&self) -> Point {
        vec![Int::zero(); self.len()]
    }

    fn add(&self, a: &[Int], b: &[Int]) -> Point {
        self.reduce(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    fn sub(&self, a: &[Int], b: &[Int]) -> Point {
        self.reduce(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    fn times(&self, n: &Int, a: &[Int]) -> Point {
        self.reduce(a.iter().map(|x| n * x).collect())
    }
}

fn to_set(g: &AmbientGroup, pts: BTreeSet<Point>) -> FiniteSet {
    FiniteSet::from_vec(g.clone(), pts.into_iter().map(GroupElement).collect())
}

/// Closure of the generators under addition in a finite part of the group.
fn closure(ar: &Arith, gens: &[Point], cap: usize) -> Result<BTreeSet<Point>> {
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    seen.insert(ar.zero());
    let mut frontier = vec![ar.zero()];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = ar.add(&x, g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::cap("subgroup closure", cap));
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    Ok(seen)
}

fn floor_of(t: &Rational, n: &Rational) -> Int {
    let x = t * n;
    x.numer().div_floor(x.denom())
}

/// Calls `f` on every integer vector in `[-b_1, b_1] x ... x [-b_r, b_r]`.
fn each_vector(bounds: &[Int], mut f: impl FnMut(&[Int])) {
    let mut c: Vec<Int> = bounds.iter().map(|b| -b).collect();
    if bounds.iter().any(|b| b.is_negative()) {
        return;
    }
    loop {
        f(&c);
        let mut i = c.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i].clone();
        }
    }
}

fn box_size(bounds: &[Int]) -> Int {
    bounds.iter().fold(Int::one(), |acc, b| acc * (Int::from(2) * b + 1))
}

/// Arithmetic, box bounds, steps and symmetry-group elements of `P_t`.
type Parts = (Arith, Vec<Int>, Vec<Point>, Vec<Point>);

fn progression_parts(p: &CosetProgression, t: &Rational, cap: usize) -> Result<Parts> {
    if !t.is_positive() {
        return Err(Error::pre("dilation must be positive"));
    }
    let ar = Arith::of(p.group());
    let bounds: Vec<Int> = p.dims().iter().map(|n| floor_of(t, n)).collect();
    let gens: Vec<Point> = p.symmetry_group().generators().iter().map(|g| g.coords().to_vec()).collect();
    let h: Vec<Point> = closure(&ar, &gens, cap)?.into_iter().collect();
    let steps = p.steps().iter().map(|v| v.coords().to_vec()).collect();
    Ok((ar, bounds, steps, h))
}

fn check_box(bounds: &[Int], h: &[Point], cap: usize) -> Result<()> {
    if box_size(bounds) * Int::from(h.len()) > Int::from(cap) {
        return Err(Error::cap("formal sums", cap));
    }
    Ok(())
}

fn evaluate(ar: &Arith, coeffs: &[Int], steps: &[Point]) -> Point {
    let mut x = ar.zero();
    for (c, v) in coeffs.iter().zip(steps) {
        x = ar.add(&x, &ar.times(c, v));
    }
    x
}

/// `Image(P_t)` by nested loops over every formal sum.
pub fn brute_image(p: &CosetProgression, t: &Rational, cap: usize) -> Result<FiniteSet> {
    let (ar, bounds, steps, h) = progression_parts(p, t, cap)?;
    if check_box(&bounds, &h, cap).is_err() {
        return image_by_factors(p, &ar, &bounds, &steps, h, cap);
    }
    let mut out = BTreeSet::new();
    each_vector(&bounds, |c| {
        let x = evaluate(&ar, c, &steps);
        for y in &h {
            out.insert(ar.add(&x, y));
        }
    });
    Ok(to_set(p.group(), out))
}

/// `H + S_1 + ... + S_d` with `S_i = { n v_i : |n| <= b_i }`, one factor at
/// a time; for dilates whose formal sums outnumber the cap.
fn image_by_factors(p: &CosetProgression, ar: &Arith, bounds: &[Int], steps: &[Point], h: Vec<Point>, cap: usize) -> Result<FiniteSet> {
    let mut acc: BTreeSet<Point> = h.into_iter().collect();
    for (b, v) in bounds.iter().zip(steps) {
        let mut multiples = BTreeSet::new();
        let mut n = -b.clone();
        while n <= *b {
            multiples.insert(ar.times(&n, v));
            n += 1;
        }
        if acc.len().saturating_mul(multiples.len()) > cap.saturating_mul(64) {
            return Err(Error::cap("factor sums", cap));
        }
        let mut next = BTreeSet::new();
        for x in &acc {
            for m in &multiples {
                next.insert(ar.add(x, m));
            }
        }
        if next.len() > cap {
            return Err(Error::cap("progression image", cap));
        }
        acc = next;
    }
    Ok(to_set(p.group(), acc))
}

/// A collision between two distinct formal sums of `P_t`, as
/// `(coefficients ++ h)` pairs, or `None` when `P_t` is proper.
pub fn brute_collision(p: &CosetProgression, t: &Rational, cap: usize) -> Result<Option<(Point, Point)>> {
    let (ar, bounds, steps, h) = progression_parts(p, t, cap)?;
    check_box(&bounds, &h, cap)?;
    let mut seen: BTreeMap<Point, Point> = BTreeMap::new();
    let mut found = None;
    each_vector(&bounds, |c| {
        if found.is_some() {
            return;
        }
        let x = evaluate(&ar, c, &steps);
        for y in &h {
            let mut formal = c.to_vec();
            formal.extend(y.iter().cloned());
            let z = ar.add(&x, y);
            if let Some(prev) = seen.get(&z) {
                found = Some((prev.clone(), formal));
                return;
            }
            seen.insert(z, formal);
        }
    });
    Ok(found)
}

pub fn brute_is_proper(p: &CosetProgression, t: &Rational, cap: usize) -> Result<bool> {
    Ok(brute_collision(p, t, cap)?.is_none())
}

/// `A + B` by a double loop.
pub fn brute_sumset(a: &FiniteSet, b: &FiniteSet, cap: usize) -> Result<FiniteSet> {
    let ar = Arith::of(a.group());
    let mut out = BTreeSet::new();
    for x in a.iter() {
        for y in b.iter() {
            out.insert(ar.add(x.coords(), y.coords()));
        }
        if out.len() > cap {
            return Err(Error::cap("sumset", cap));
        }
    }
    Ok(to_set(a.group(), out))
}

/// `lA` for `l >= 1`, one copy of `A` at a time. Once `(k+1)A = kA + x`,
/// every later step is the same translate, so `lA = kA + (l - k) x`.
pub fn brute_iterated_sumset(a: &FiniteSet, l: u64, cap: usize) -> Result<FiniteSet> {
    if l == 0 {
        return Err(Error::pre("l must be positive"));
    }
    let ar = Arith::of(a.group());
    let mut s = a.clone();
    for k in 1..l {
        let next = brute_sumset(&s, a, cap)?;
        if let Some(x) = translate_between(&ar, &s, &next) {
            let shift = ar.times(&Int::from(l - k), &x);
            return Ok(to_set(s.group(), s.iter().map(|y| ar.add(y.coords(), &shift)).collect()));
        }
        s = next;
    }
    Ok(s)
}

/// Some `x` with `t = s + x`, if any.
fn translate_between(ar: &Arith, s: &FiniteSet, t: &FiniteSet) -> Option<Point> {
    if s.len() != t.len() {
        return None;
    }
    let s0 = s.first()?.coords();
    let target = t.to_hash();
    t.iter().map(|y| ar.sub(y.coords(), s0)).find(|x| s.iter().all(|z| target.contains(&GroupElement(ar.add(z.coords(), x)))))
}

pub fn brute_translate(s: &FiniteSet, x: &GroupElement) -> FiniteSet {
    let ar = Arith::of(s.group());
    to_set(s.group(), s.iter().map(|y| ar.add(y.coords(), x.coords())).collect())
}

/// `S1 ⊆ S2`, with the least element of `S1 \ S2` as counterexample.
pub fn verify_inclusion(s1: &FiniteSet, s2: &FiniteSet) -> VerificationReport {
    let big: BTreeSet<&GroupElement> = s2.iter().collect();
    let small: BTreeSet<&GroupElement> = s1.iter().collect();
    let mut checked = 0;
    for x in small {
        checked += 1;
        if !big.contains(x) {
            return VerificationReport::fail("inclusion", vec![x.clone()], checked);
        }
    }
    VerificationReport::pass("inclusion", checked)
}

/// Some `x` with `x + T ⊆ S`, scanning candidates `x ∈ S - T` in order.
pub fn verify_translate_containment(s: &FiniteSet, t: &FiniteSet) -> Option<GroupElement> {
    let ar = Arith::of(s.group());
    let members: BTreeSet<Point> = s.iter().map(|x| x.coords().to_vec()).collect();
    let t0 = t.first()?;
    let mut candidates: BTreeSet<Point> = BTreeSet::new();
    for y in s.iter() {
        candidates.insert(ar.sub(y.coords(), t0.coords()));
    }
    candidates
        .into_iter()
        .find(|x| t.iter().all(|z| members.contains(&ar.add(x, z.coords()))))
        .map(GroupElement)
}

/// Lifts of the generators plus the torsion relations, brought to echelon
/// form by Euclid's algorithm on rows.
fn echelon(ar: &Arith, gens: &[Point]) -> Vec<Point> {
    let n = ar.len();
    let mut rows: Vec<Point> = gens.to_vec();
    for (i, m) in ar.moduli.iter().enumerate() {
        let mut r = vec![Int::zero(); n];
        r[ar.free + i] = m.clone();
        rows.push(r);
    }
    let mut out = Vec::new();
    for col in 0..n {
        loop {
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            nz.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let p = nz[0];
            if nz.len() == 1 {
                let mut r = rows.remove(p);
                if r[col].is_negative() {
                    r.iter_mut().for_each(|x| *x = -x.clone());
                }
                out.push(r);
                break;
            }
            let pivot = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col].div_floor(&pivot[col]);
                for j in 0..n {
                    let d = &q * &pivot[j];
                    rows[i][j] -= d;
                }
            }
        }
    }
    out
}

/// Membership of `x` in the subgroup generated by `gens`.
fn in_span(ar: &Arith, basis: &[Point], x: &[Int]) -> bool {
    let mut x: Point = x.to_vec();
    for r in basis {
        let col = r.iter().position(|v| !v.is_zero()).expect("nonzero row");
        if !x[col].is_multiple_of(&r[col]) {
            return false;
        }
        let q = &x[col] / &r[col];
        for j in 0..ar.len() {
            x[j] -= &q * &r[j];
        }
    }
    x.iter().all(|v| v.is_zero())
}

/// `<S1> = <S2>`; the counterexample is a generator of one side missing
/// from the other.
pub fn verify_same_generated(g: &AmbientGroup, s1: &[GroupElement], s2: &[GroupElement]) -> VerificationReport {
    let ar = Arith::of(g);
    let p1: Vec<Point> = s1.iter().map(|x| x.coords().to_vec()).collect();
    let p2: Vec<Point> = s2.iter().map(|x| x.coords().to_vec()).collect();
    let e1 = echelon(&ar, &p1);
    let e2 = echelon(&ar, &p2);
    let mut checked = 0;
    for (xs, basis) in [(&p1, &e2), (&p2, &e1)] {
        for x in xs.iter() {
            checked += 1;
            if !in_span(&ar, basis, x) {
                return VerificationReport::fail("same generated subgroup", vec![GroupElement(x.clone())], checked);
            }
        }
    }
    VerificationReport::pass("same generated subgroup", checked)
}

/// Whether `S = s + <A - A>` for some `s`, in a finite group.
pub fn brute_is_coset(s: &FiniteSet, a: &FiniteSet, cap: usize) -> Result<bool> {
    let ar = Arith::of(s.group());
    let (Some(a0), Some(s0)) = (a.first(), s.first()) else { return Ok(false) };
    let diffs: Vec<Point> = a.iter().map(|x| ar.sub(x.coords(), a0.coords())).collect();
    let h = closure(&ar, &diffs, cap)?;
    let coset: BTreeSet<Point> = h.iter().map(|y| ar.add(s0.coords(), y)).collect();
    let mine: BTreeSet<Point> = s.iter().map(|x| x.coords().to_vec()).collect();
    Ok(coset == mine)
}

/// The elements of the subgroup generated by `gens` (finite part only).
pub fn brute_subgroup(g: &AmbientGroup, gens: &[GroupElement], cap: usize) -> Result<FiniteSet> {
    let ar = Arith::of(g);
    let pts: Vec<Point> = gens.iter().map(|x| x.coords().to_vec()).collect();
    Ok(to_set(g, closure(&ar, &pts, cap)?))
}

/// Solves a square rational system by Gaussian elimination; `None` when
/// singular.
fn solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        rhs.swap(col, p);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &f * y;
                }
                let d = &f * &rhs[col];
                rhs[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn choose(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Integer coefficient vectors `c` with `B c ∈ t K`, where `B` is the
/// lattice basis. Bounds come from the vertices of the pulled-back body,
/// found by trying every choice of tight facets.
pub fn brute_lattice_points(
    body: &SymmetricPolytope<Rational>,
    lattice: &Lattice<Rational>,
    t: &Rational,
    cap: usize,
) -> Result<Vec<Point>> {
    let d = body.dim();
    let basis = lattice.basis();
    // Rows a B with right-hand sides t b.
    let rows: Vec<(Vec<Rational>, Rational)> = body
        .constraints()
        .iter()
        .map(|c| {
            let ab: Vec<Rational> = (0..d).map(|j| (0..d).map(|i| &c.a[i] * &basis[(i, j)]).sum()).collect();
            (ab, t * &c.b)
        })
        .collect();
    let inside = |x: &[Rational]| rows.iter().all(|(a, b)| a.iter().zip(x).map(|(u, v)| u * v).sum::<Rational>().abs() <= *b);
    let facets: Vec<(Vec<Rational>, Rational)> = rows.iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (a.clone(), -b.clone())]).collect();
    let mut reach = vec![Rational::zero(); d];
    choose(facets.len(), d, |pick| {
        let m: Vec<Vec<Rational>> = pick.iter().map(|&i| facets[i].0.clone()).collect();
        let r: Vec<Rational> = pick.iter().map(|&i| facets[i].1.clone()).collect();
        if let Some(v) = solve(m, r) {
            if inside(&v) {
                for (slot, x) in reach.iter_mut().zip(&v) {
                    if x.abs() > *slot {
                        *slot = x.abs();
                    }
                }
            }
        }
    });
    let bounds: Vec<Int> = reach.iter().map(|r| r.numer().div_floor(r.denom())).collect();
    if box_size(&bounds) > Int::from(cap) {
        return Err(Error::cap("lattice box", cap));
    }
    let mut out = Vec::new();
    each_vector(&bounds, |c| {
        let x: Vec<Rational> = c.iter().map(|v| Rational::from_integer(v.clone())).collect();
        if inside(&x) {
            out.push(c.to_vec());
        }
    });
    Ok(out)
}

/// Checks `x = Σ c_i v_i + h` with `|c_i| <= floor(t N_i)` and `h ∈ H`.
pub fn check_representation(p: &CosetProgression, t: &Rational, x: &GroupElement, coeffs: &[Int], h: &GroupElement, h_set: &FiniteSet) -> bool {
    if coeffs.len() != p.rank() || !h_set.contains(h) {
        return false;
    }
    let ar = Arith::of(p.group());
    let in_box = coeffs.iter().zip(p.dims()).all(|(c, n)| c.abs() <= floor_of(t, n));
    let steps: Vec<Point> = p.steps().iter().map(|v| v.coords().to_vec()).collect();
    in_box && ar.add(&evaluate(&ar, coeffs, &steps), h.coords()) == x.coords()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteSubgroup;
    use crate::scalar::{int, rat};

    #[test]
    fn image_examples() {
        let p = CosetProgression::simple(AmbientGroup::integers(), &[2], &[&[3]]).unwrap();
        assert_eq!(brute_image(&p, &rat(1, 1), 100).unwrap(), FiniteSet::integers(&[-6, -3, 0, 3, 6]));
        let g = AmbientGroup::cyclic(6);
        let h = FiniteSubgroup::generated(&g, &[g.elem(&[2])], 10).unwrap();
        let p = CosetProgression::subgroup(h);
        assert_eq!(brute_image(&p, &rat(1, 1), 100).unwrap(), FiniteSet::cyclic(6, &[0, 2, 4]));
        assert!(brute_image(&p, &rat(0, 1), 100).is_err());
    }

    #[test]
    fn collision_example() {
        let p = CosetProgression::simple(AmbientGroup::integers(), &[1, 1], &[&[1], &[2]]).unwrap();
        let (a, b) = brute_collision(&p, &rat(1, 1), 100).unwrap().unwrap();
        assert_ne!(a, b);
        assert!(brute_is_proper(&p, &rat(1, 2), 100).unwrap());
    }

    #[test]
    fn inclusion_examples() {
        let r = verify_inclusion(&FiniteSet::integers(&[0, 1]), &FiniteSet::integers(&[0, 1, 2]));
        assert!(r.holds && r.counterexample.is_none());
        let r = verify_inclusion(&FiniteSet::integers(&[0, 3]), &FiniteSet::integers(&[0, 1, 2]));
        assert_eq!(r.counterexample, Some(vec![GroupElement(vec![int(3)])]));
    }

    #[test]
    fn translate_examples() {
        let s = FiniteSet::integers(&(0..=10).collect::<Vec<_>>());
        let t = FiniteSet::integers(&[0, 1, 2, 3]);
        let x = verify_translate_containment(&s, &t).unwrap();
        assert!(x.coords()[0] >= int(0) && x.coords()[0] <= int(7));
        assert!(verify_translate_containment(&t, &s).is_none());
    }

    #[test]
    fn generated_subgroups() {
        let g = AmbientGroup::new(1, vec![int(4)]).unwrap();
        let a = vec![g.elem(&[2, 0]), g.elem(&[3, 1])];
        let b = vec![g.elem(&[1, 3]), g.elem(&[0, 2])];
        assert!(verify_same_generated(&g, &a, &b).holds);
        let c = vec![g.elem(&[1, 0])];
        assert!(!verify_same_generated(&g, &a, &c).holds);
    }

    #[test]
    fn lattice_points_square() {
        let body = SymmetricPolytope::cuboid(&[rat(3, 2), rat(1, 1)]).unwrap();
        let pts = brute_lattice_points(&body, &Lattice::standard(2), &rat(1, 1), 1000).unwrap();
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn coset_check() {
        let s = FiniteSet::cyclic(6, &[1, 3, 5]);
        assert!(brute_is_coset(&s, &FiniteSet::cyclic(6, &[0, 2]), 100).unwrap());
        assert!(!brute_is_coset(&s, &FiniteSet::cyclic(6, &[0, 1]), 100).unwrap());
    }
}
