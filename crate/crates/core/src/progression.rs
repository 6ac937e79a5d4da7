//! Generalized arithmetic progressions and coset progressions: dilates,
//! images, properness and membership with explicit witnesses.

use std::collections::HashMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{sumset_capped, AmbientGroup, FiniteSet, FiniteSubgroup, GroupElement};
use crate::lattice::hnf;
use crate::linalg::Matrix;
use crate::scalar::{floor, Int, Rational};

/// Default budget for materialized sets and enumerated boxes.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Symmetric GAP `(N, v, d)`: the sums `n_1 v_1 + ... + n_d v_d`, `|n_i| <= N_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    group: AmbientGroup,
    dims: Vec<Rational>,
    steps: Vec<GroupElement>,
}

impl Gap {
    pub fn new(group: AmbientGroup, dims: Vec<Rational>, steps: Vec<GroupElement>) -> Result<Self> {
        if dims.len() != steps.len() {
            return Err(Error::pre("dims and steps differ in length"));
        }
        if dims.iter().any(|n| !n.is_positive()) {
            return Err(Error::pre("dimensions must be positive"));
        }
        if steps.iter().any(|v| !group.contains(v)) {
            return Err(Error::GroupMismatch);
        }
        Ok(Gap { group, dims, steps })
    }

    pub fn group(&self) -> &AmbientGroup {
        &self.group
    }

    pub fn dims(&self) -> &[Rational] {
        &self.dims
    }

    pub fn steps(&self) -> &[GroupElement] {
        &self.steps
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }
}

/// Coset progression `(N, v, d, H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetProgression {
    gap: Gap,
    symmetry_group: FiniteSubgroup,
}

/// Coefficient tuple together with a symmetry group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub coeffs: Vec<Int>,
    pub h: GroupElement,
}

/// Outcome of a properness scan.
#[derive(Clone, Debug, PartialEq)]
pub struct PropernessResult {
    pub proper: bool,
    /// Two distinct representations with equal value: the earlier one in
    /// scan order first.
    pub witness: Option<(Representation, Representation)>,
}

impl CosetProgression {
    pub fn new(gap: Gap, symmetry_group: FiniteSubgroup) -> Result<Self> {
        gap.group.check_same(symmetry_group.group())?;
        Ok(CosetProgression { gap, symmetry_group })
    }

    pub fn from_gap(gap: Gap) -> Self {
        let h = FiniteSubgroup::trivial(gap.group.clone());
        CosetProgression { gap, symmetry_group: h }
    }

    /// Convenience constructor with integer dimensions.
    pub fn simple(group: AmbientGroup, dims: &[i64], steps: &[&[i64]]) -> Result<Self> {
        let steps = steps.iter().map(|s| group.element(s.iter().map(|&x| Int::from(x)).collect())).collect::<Result<Vec<_>>>()?;
        let dims = dims.iter().map(|&n| Rational::from_integer(Int::from(n))).collect();
        Ok(CosetProgression::from_gap(Gap::new(group, dims, steps)?))
    }

    /// Rank 0 progression with image `H`.
    pub fn subgroup(h: FiniteSubgroup) -> Self {
        let gap = Gap { group: h.group().clone(), dims: vec![], steps: vec![] };
        CosetProgression { gap, symmetry_group: h }
    }

    pub fn gap(&self) -> &Gap {
        &self.gap
    }

    pub fn group(&self) -> &AmbientGroup {
        &self.gap.group
    }

    pub fn dims(&self) -> &[Rational] {
        &self.gap.dims
    }

    pub fn steps(&self) -> &[GroupElement] {
        &self.gap.steps
    }

    pub fn rank(&self) -> usize {
        self.gap.rank()
    }

    pub fn symmetry_group(&self) -> &FiniteSubgroup {
        &self.symmetry_group
    }

    /// `P_t`: every dimension multiplied by `t`.
    pub fn dilate(&self, t: &Rational) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::pre("dilation factor must be positive"));
        }
        let mut out = self.clone();
        for n in &mut out.gap.dims {
            *n = &*n * t;
        }
        Ok(out)
    }

    /// Integer box `floor(t N_i)`.
    pub fn bounds(&self, t: &Rational) -> Vec<Int> {
        self.gap.dims.iter().map(|n| floor(&(n * t))).collect()
    }

    /// `|H| * prod (2 floor(t N_i) + 1)`, the size of a proper `P_t`.
    pub fn box_count(&self, t: &Rational) -> Int {
        let mut c = Int::from(self.symmetry_group.order());
        for b in self.bounds(t) {
            c *= Int::from(2) * b + 1;
        }
        c
    }

    pub fn evaluate(&self, coeffs: &[Int]) -> GroupElement {
        self.group().combine(coeffs, self.steps())
    }

    pub fn evaluate_rep(&self, rep: &Representation) -> GroupElement {
        self.group().add(&self.evaluate(&rep.coeffs), &rep.h)
    }

    /// Checks that `rep` is a legal representation in `P_t`.
    pub fn admits(&self, rep: &Representation, t: &Rational) -> bool {
        rep.coeffs.len() == self.rank()
            && self.symmetry_group.contains(&rep.h)
            && rep.coeffs.iter().zip(self.bounds(t)).all(|(n, b)| n.abs() <= b)
    }

    /// Same steps and symmetry group, each dimension rounded down.
    pub fn with_integer_dims(&self) -> Self {
        let mut out = self.clone();
        for n in &mut out.gap.dims {
            *n = Rational::from_integer(floor(n));
        }
        out
    }

    /// Drops the steps whose dimension is below one (they contribute nothing).
    pub fn drop_trivial_steps(&self) -> Self {
        let keep: Vec<usize> = (0..self.rank()).filter(|&i| self.gap.dims[i] >= Rational::one()).collect();
        let gap = Gap {
            group: self.gap.group.clone(),
            dims: keep.iter().map(|&i| self.gap.dims[i].clone()).collect(),
            steps: keep.iter().map(|&i| self.gap.steps[i].clone()).collect(),
        };
        CosetProgression { gap, symmetry_group: self.symmetry_group.clone() }
    }

    /// Moves into `H` every step `v` whose order modulo `H` is exactly
    /// `2 floor(N) + 1`, so that `[-N, N] v + H = <v> + H`. The image is
    /// unchanged and properness is preserved.
    pub fn absorb_saturated_steps(&self, cap: usize) -> Result<Self> {
        let mut p = self.clone();
        'outer: loop {
            for i in 0..p.rank() {
                let Some(width) = (Int::from(2) * floor(&p.gap.dims[i]) + Int::one()).to_usize() else { continue };
                let g = p.group().clone();
                let v = p.gap.steps[i].clone();
                let mut x = g.zero();
                for k in 1..=width {
                    x = g.add(&x, &v);
                    if p.symmetry_group.contains(&x) {
                        if k == width {
                            p.symmetry_group = p.symmetry_group.adjoin(&v, cap)?;
                            p.gap.dims.remove(i);
                            p.gap.steps.remove(i);
                            continue 'outer;
                        }
                        break;
                    }
                }
            }
            return Ok(p);
        }
    }
}

/// `{ n v : |n| <= b }`, stopping once the multiples cycle.
fn multiples(group: &AmbientGroup, v: &GroupElement, b: &Int, cap: usize) -> Result<FiniteSet> {
    let mut out = vec![group.zero()];
    let mut x = group.zero();
    let mut n = Int::zero();
    while &n < b {
        x = group.add(&x, v);
        if x.is_zero() {
            break;
        }
        out.push(group.neg(&x));
        out.push(x.clone());
        if out.len() > cap {
            return Err(Error::cap("progression image", cap));
        }
        n += 1;
    }
    Ok(FiniteSet::from_vec(group.clone(), out))
}

/// `Image(P_t)`, built as an iterated sumset; the cap bounds every
/// intermediate set.
pub fn image(p: &CosetProgression, t: &Rational, cap: usize) -> Result<FiniteSet> {
    if !t.is_positive() {
        return Err(Error::pre("dilation factor must be positive"));
    }
    let g = p.group();
    let mut acc = p.symmetry_group.elements().clone();
    for (v, b) in p.steps().iter().zip(p.bounds(t)) {
        let m = multiples(g, v, &b, cap)?;
        acc = sumset_capped(&acc, &m, cap)?;
    }
    if acc.len() > cap {
        return Err(Error::cap("progression image", cap));
    }
    Ok(acc)
}

pub fn size(p: &CosetProgression, t: &Rational, cap: usize) -> Result<usize> {
    Ok(image(p, t, cap)?.len())
}

/// Calls `f` on every integer vector in the box `|n_i| <= b_i` in
/// lexicographic order; stops early when `f` returns `false`.
pub fn for_each_in_box(bounds: &[Int], mut f: impl FnMut(&[Int]) -> bool) {
    let d = bounds.len();
    let mut cur: Vec<Int> = bounds.iter().map(|b| -b).collect();
    loop {
        if !f(&cur) {
            return;
        }
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < bounds[i] {
                cur[i] += 1;
                for j in i + 1..d {
                    cur[j] = -bounds[j].clone();
                }
                break;
            }
        }
    }
}

/// Hash scan for two formal sums `(n, h)` with the same value, fed one
/// coefficient vector at a time; the stored table is bounded by `cap`.
pub struct CollisionScan<'a> {
    group: &'a AmbientGroup,
    steps: &'a [GroupElement],
    h: &'a FiniteSubgroup,
    cap: usize,
    seen: HashMap<GroupElement, Representation>,
    found: Option<(Representation, Representation)>,
}

impl<'a> CollisionScan<'a> {
    pub fn new(group: &'a AmbientGroup, steps: &'a [GroupElement], h: &'a FiniteSubgroup, cap: usize) -> Self {
        CollisionScan { group, steps, h, cap, seen: HashMap::new(), found: None }
    }

    /// Adds `n` crossed with `H`; `Ok(false)` once a collision is known.
    pub fn push(&mut self, n: &[Int]) -> Result<bool> {
        if self.found.is_some() {
            return Ok(false);
        }
        let base = self.group.combine(n, self.steps);
        for e in self.h.elements().iter() {
            let x = self.group.add(&base, e);
            let rep = Representation { coeffs: n.to_vec(), h: e.clone() };
            if let Some(prev) = self.seen.get(&x) {
                self.found = Some((prev.clone(), rep));
                return Ok(false);
            }
            if self.seen.len() >= self.cap {
                return Err(Error::cap("properness scan", self.cap));
            }
            self.seen.insert(x, rep);
        }
        Ok(true)
    }

    pub fn finish(self) -> PropernessResult {
        PropernessResult { proper: self.found.is_none(), witness: self.found }
    }
}

/// Properness of `P_t` by a hash scan in lexicographic coefficient order,
/// stopping at the first collision.
pub fn is_proper(p: &CosetProgression, t: &Rational, cap: usize) -> Result<PropernessResult> {
    if !t.is_positive() {
        return Err(Error::pre("dilation factor must be positive"));
    }
    let mut scan = CollisionScan::new(p.group(), p.steps(), &p.symmetry_group, cap);
    let mut err = None;
    for_each_in_box(&p.bounds(t), |n| match scan.push(n) {
        Ok(more) => more,
        Err(e) => {
            err = Some(e);
            false
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(scan.finish()),
    }
}

/// Solutions `n` of `sum n_i w_i = x` in `G`, as a particular solution plus
/// a basis (HNF columns) of the solution lattice.
struct LinearSolutions {
    particular: Vec<Int>,
    kernel: Matrix<Int>,
}

fn solve_linear(group: &AmbientGroup, steps: &[GroupElement], x: &GroupElement) -> Option<LinearSolutions> {
    let d = steps.len();
    let rows = group.coord_len();
    let s = group.moduli().len();
    // A = [W | D]; columns of D are the torsion relations.
    let mut cols: Vec<Vec<Int>> = steps.iter().map(|v| v.coords().to_vec()).collect();
    for (j, m) in group.moduli().iter().enumerate() {
        let mut c = vec![Int::zero(); rows];
        c[group.free_rank() + j] = m.clone();
        cols.push(c);
    }
    let total = d + s;
    if total == 0 {
        return x.is_zero().then(|| LinearSolutions { particular: vec![], kernel: Matrix::zeros(0, 0) });
    }
    let a = Matrix::from_columns(rows, &cols);
    let (h, u) = hnf(&a);
    // Forward substitution on the lower echelon form.
    let mut z = vec![Int::zero(); total];
    let mut col = 0;
    for r in 0..rows {
        let mut rest = x.coords()[r].clone();
        for (c, zc) in z.iter().enumerate().take(col) {
            rest -= &h[(r, c)] * zc;
        }
        if col < total && !h[(r, col)].is_zero() {
            let p = &h[(r, col)];
            if !(&rest % p).is_zero() {
                return None;
            }
            z[col] = &rest / p;
            col += 1;
        } else if !rest.is_zero() {
            return None;
        }
    }
    let full = u.mul_vec(&z);
    let particular = full[..d].to_vec();
    let kernel_gens: Vec<Vec<Int>> = (col..total).map(|c| u.col(c)[..d].to_vec()).collect();
    let kernel = if kernel_gens.is_empty() || d == 0 {
        Matrix::zeros(d, 0)
    } else {
        let (kh, _) = hnf(&Matrix::from_columns(d, &kernel_gens));
        let rank = (0..kh.cols()).take_while(|&c| kh.col(c).iter().any(|v| !v.is_zero())).count();
        kh.take_cols(rank)
    };
    Some(LinearSolutions { particular, kernel })
}

/// Basis columns of the relation lattice `{ n in Z^d : sum n_i v_i in H }`.
pub fn relation_lattice(group: &AmbientGroup, steps: &[GroupElement], h: &FiniteSubgroup) -> Matrix<Int> {
    let d = steps.len();
    let mut all = steps.to_vec();
    all.extend(h.generators().iter().cloned());
    let sol = solve_linear(group, &all, &group.zero()).expect("zero is always reachable");
    let gens: Vec<Vec<Int>> = (0..sol.kernel.cols()).map(|c| sol.kernel.col(c)[..d].to_vec()).collect();
    if gens.is_empty() || d == 0 {
        return Matrix::zeros(d, 0);
    }
    let (kh, _) = hnf(&Matrix::from_columns(d, &gens));
    let rank = (0..kh.cols()).take_while(|&c| kh.col(c).iter().any(|v| !v.is_zero())).count();
    kh.take_cols(rank)
}

/// First point (in increasing kernel coordinates) of `n0 + K` in the box.
fn lattice_point_in_box(sol: &LinearSolutions, bounds: &[Int]) -> Option<Vec<Int>> {
    let d = bounds.len();
    let k = sol.kernel.cols();
    let pivots: Vec<usize> = (0..k).map(|c| (0..d).find(|&r| !sol.kernel[(r, c)].is_zero()).expect("nonzero column")).collect();
    let mut z: Vec<Int> = Vec::with_capacity(k);
    search(sol, bounds, &pivots, &mut z)
}

fn value_at(sol: &LinearSolutions, z: &[Int], r: usize) -> Int {
    let mut v = sol.particular[r].clone();
    for (c, zc) in z.iter().enumerate() {
        v += &sol.kernel[(r, c)] * zc;
    }
    v
}

fn search(sol: &LinearSolutions, bounds: &[Int], pivots: &[usize], z: &mut Vec<Int>) -> Option<Vec<Int>> {
    let d = bounds.len();
    let j = z.len();
    // Rows fixed by the current prefix: all rows before the next pivot.
    let limit = if j < pivots.len() { pivots[j] } else { d };
    let from = if j == 0 { 0 } else { pivots[j - 1] };
    if (from..limit).any(|r| value_at(sol, z, r).abs() > bounds[r]) {
        return None;
    }
    if j == pivots.len() {
        return Some((0..d).map(|r| value_at(sol, z, r)).collect());
    }
    let r = pivots[j];
    let base = value_at(sol, z, r);
    let p = sol.kernel[(r, j)].clone();
    // -b <= base + p z_j <= b with p > 0.
    let lo = num_integer::Integer::div_ceil(&(-&bounds[r] - &base), &p);
    let hi = num_integer::Integer::div_floor(&(&bounds[r] - &base), &p);
    let mut zj = lo;
    while zj <= hi {
        z.push(zj.clone());
        if let Some(found) = search(sol, bounds, pivots, z) {
            return Some(found);
        }
        z.pop();
        zj += 1;
    }
    None
}

/// A representation of `x` in `P_t`, if `x` lies in `Image(P_t)`.
pub fn locate(p: &CosetProgression, x: &GroupElement, t: &Rational) -> Option<Representation> {
    let g = p.group();
    let bounds = p.bounds(t);
    for h in p.symmetry_group.elements().iter() {
        let target = g.sub(x, h);
        if let Some(sol) = solve_linear(g, p.steps(), &target) {
            if let Some(coeffs) = lattice_point_in_box(&sol, &bounds) {
                return Some(Representation { coeffs, h: h.clone() });
            }
        }
    }
    None
}

/// Witnessed inclusion `S ⊆ Image(P_t)`: a representation for every element,
/// or the first element that has none.
pub fn locate_all(p: &CosetProgression, s: &FiniteSet, t: &Rational) -> std::result::Result<Vec<Representation>, GroupElement> {
    s.iter().map(|x| locate(p, x, t).ok_or_else(|| x.clone())).collect()
}

/// Generating set of `<Image(P)>`: the steps with a nonzero box, plus `H`.
pub fn generators(p: &CosetProgression) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> =
        p.steps().iter().zip(p.dims()).filter(|(_, n)| **n >= Rational::one()).map(|(v, _)| v.clone()).collect();
    out.extend(p.symmetry_group.generators().iter().cloned());
    out
}

/// The progression with the given integer dimensions, steps of dimension
/// zero left out.
fn with_counts(group: &AmbientGroup, steps: &[GroupElement], h: &FiniteSubgroup, counts: &[u64]) -> Result<CosetProgression> {
    let keep: Vec<usize> = (0..steps.len()).filter(|&i| counts[i] > 0).collect();
    let gap = Gap::new(
        group.clone(),
        keep.iter().map(|&i| Rational::from_integer(Int::from(counts[i]))).collect(),
        keep.iter().map(|&i| steps[i].clone()).collect(),
    )?;
    CosetProgression::new(gap, h.clone())
}

/// Proper with image inside `target`. A proper progression has exactly
/// `box_count` image points, which bounds the work.
fn fits_within(p: &CosetProgression, target: &FiniteSet, cap: usize) -> Result<bool> {
    if p.box_count(&Rational::one()) > Int::from(target.len()) {
        return Ok(false);
    }
    let img = image(p, &Rational::one(), cap)?;
    Ok(img.is_subset(target) && is_proper(p, &Rational::one(), cap)?.proper)
}

/// Grows integer dimensions for `steps` (with symmetry group `h`), one
/// coordinate at a time by galloping search, keeping the progression proper
/// with image inside `target`. Both conditions are monotone in each
/// dimension, so a single pass reaches a maximal choice.
pub fn grow_within(
    steps: &[GroupElement],
    h: &FiniteSubgroup,
    target: &FiniteSet,
    cap: usize,
) -> Result<CosetProgression> {
    let g = target.group();
    let mut counts = vec![0u64; steps.len()];
    if !fits_within(&with_counts(g, steps, h, &counts)?, target, cap)? {
        return Err(Error::pre("the symmetry group does not fit inside the target"));
    }
    for i in 0..steps.len() {
        let mut ok = 0u64;
        let mut bad = None;
        let mut jump = 1u64;
        while bad.is_none() {
            counts[i] = ok + jump;
            if fits_within(&with_counts(g, steps, h, &counts)?, target, cap)? {
                ok += jump;
                jump *= 2;
            } else {
                bad = Some(ok + jump);
            }
        }
        let mut bad = bad.expect("loop exits on failure");
        while bad - ok > 1 {
            let mid = ok + (bad - ok) / 2;
            counts[i] = mid;
            if fits_within(&with_counts(g, steps, h, &counts)?, target, cap)? {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        counts[i] = ok;
    }
    with_counts(g, steps, h, &counts)
}

/// `floor(t N_i)` as machine integers, for callers that index by them.
pub fn small_bounds(p: &CosetProgression, t: &Rational) -> Option<Vec<i64>> {
    p.bounds(t).iter().map(|b| b.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn z1(dims: &[i64], steps: &[i64]) -> CosetProgression {
        let s: Vec<Vec<i64>> = steps.iter().map(|&v| vec![v]).collect();
        let refs: Vec<&[i64]> = s.iter().map(|v| v.as_slice()).collect();
        CosetProgression::simple(AmbientGroup::integers(), dims, &refs).unwrap()
    }

    fn ints(s: &FiniteSet) -> Vec<i64> {
        s.iter().map(|e| e.coords()[0].to_i64().unwrap()).collect()
    }

    #[test]
    fn image_examples() {
        let p = z1(&[2], &[3]);
        assert_eq!(ints(&image(&p, &rat(1, 1), 100).unwrap()), vec![-6, -3, 0, 3, 6]);
        assert_eq!(ints(&image(&p, &rat(1, 2), 100).unwrap()), vec![-3, 0, 3]);
        let g = AmbientGroup::cyclic(6);
        let h = FiniteSubgroup::generated(&g, &[g.elem(&[3])], 100).unwrap();
        let gap = Gap::new(g.clone(), vec![rat(1, 1)], vec![g.elem(&[1])]).unwrap();
        let p = CosetProgression::new(gap, h).unwrap();
        assert_eq!(image(&p, &rat(1, 1), 100).unwrap().len(), 6);
    }

    #[test]
    fn image_cap() {
        let p = z1(&[50, 50], &[1, 1000]);
        assert!(matches!(image(&p, &rat(1, 1), 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn properness_examples() {
        assert!(is_proper(&z1(&[2], &[3]), &rat(1, 1), 100).unwrap().proper);
        let r = is_proper(&z1(&[1, 1], &[1, 2]), &rat(1, 1), 100).unwrap();
        assert!(!r.proper);
        let (a, b) = r.witness.unwrap();
        assert_eq!(a.coeffs, vec![int(-1), int(0)]);
        assert_eq!(b.coeffs, vec![int(1), int(-1)]);
        let g = AmbientGroup::cyclic(6);
        let p = CosetProgression::simple(g, &[2], &[&[1]]).unwrap();
        assert!(is_proper(&p, &rat(1, 1), 100).unwrap().proper);
        let r = is_proper(&p, &rat(3, 2), 100).unwrap();
        assert!(!r.proper);
        let (a, b) = r.witness.unwrap();
        assert_eq!(p.evaluate(&a.coeffs), p.evaluate(&b.coeffs));
    }

    #[test]
    fn rank_zero() {
        let g = AmbientGroup::cyclic(4);
        let h = FiniteSubgroup::generated(&g, &[g.elem(&[2])], 10).unwrap();
        let p = CosetProgression::subgroup(h);
        assert_eq!(image(&p, &rat(5, 1), 10).unwrap().len(), 2);
        assert!(is_proper(&p, &rat(1, 1), 10).unwrap().proper);
    }

    #[test]
    fn locate_examples() {
        let p = z1(&[1, 1], &[1, 2]);
        let rep = locate(&p, &AmbientGroup::integers().elem(&[3]), &rat(1, 1)).unwrap();
        assert_eq!(p.evaluate(&rep.coeffs), AmbientGroup::integers().elem(&[3]));
        assert!(locate(&p, &AmbientGroup::integers().elem(&[4]), &rat(1, 1)).is_none());
        let g = AmbientGroup::new(1, vec![int(6)]).unwrap();
        let p = CosetProgression::simple(g.clone(), &[3, 2], &[&[1, 2], &[0, 1]]).unwrap();
        let img = image(&p, &rat(1, 1), 1000).unwrap();
        for x in img.iter() {
            let rep = locate(&p, x, &rat(1, 1)).unwrap();
            assert!(p.admits(&rep, &rat(1, 1)));
            assert_eq!(&p.evaluate_rep(&rep), x);
        }
        assert!(locate(&p, &g.elem(&[4, 0]), &rat(1, 1)).is_none());
    }

    #[test]
    fn sumset_embedding() {
        let p = z1(&[2, 1], &[3, 5]);
        let a = image(&p, &rat(1, 1), 1000).unwrap();
        let b = image(&p, &rat(3, 2), 1000).unwrap();
        let c = image(&p, &rat(5, 2), 1000).unwrap();
        assert!(sumset_capped(&a, &b, 10_000).unwrap().is_subset(&c));
    }
}
