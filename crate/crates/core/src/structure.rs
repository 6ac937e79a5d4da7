//! Structure of iterated sumsets `lA`: symmetric cores, a desk-scale Freiman
//! engine, step adjoining, and the final sandwich
//! `x + Image(Q) ⊆ lA ⊆ x' + K Image(Q)`.

use std::collections::{HashMap, HashSet};

use num_traits::{One, ToPrimitive, Zero};

use crate::coalescence::{coalesce, CoalescenceResult};
use crate::error::{Error, Result};
use crate::group::{iterated_sumset, sumset_capped, AmbientGroup, FiniteSet, FiniteSubgroup, GroupElement};
use crate::john::JohnOptions;
use crate::progression::{grow_within, image, is_proper, locate, CosetProgression, Gap, Representation};
use crate::scalar::{Int, Rational};

/// Default for the gate `l^d |A| >= T |lA|`.
pub const DEFAULT_THRESHOLD: u64 = 64;

/// Constant of the gate `l |A| >= C_2 |G|` in [`sarkozy_check`].
pub const SARKOZY_CONSTANT: u64 = 2;

/// Candidate tile sizes above this skip the best-base search when covering.
const GREEDY_TILE_LIMIT: usize = 512;

/// Doubling data of a set and of its dyadic sumsets.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublingReport {
    /// `|2A| / |A|`.
    pub doubling: Rational,
    /// `|2^k A|` for `k = 0, 1, ...` as far as the scan went.
    pub sizes: Vec<usize>,
    /// `|2^{k+1} A| / |2^k A|`.
    pub ratios: Vec<Rational>,
}

/// `2^k A`.
pub fn dyadic_sumset(a: &FiniteSet, k: usize, cap: usize) -> Result<FiniteSet> {
    let mut b = a.clone();
    for _ in 0..k {
        b = sumset_capped(&b, &b, cap)?;
    }
    Ok(b)
}

/// Picks `x` with the most representations `x = a + b` (ties to the least
/// `x`) and returns `F = {a in A : x - a in A}`.
pub fn symmetric_core(a: &FiniteSet) -> Result<(FiniteSet, GroupElement)> {
    let first = a.first().ok_or_else(|| Error::pre("symmetric core of an empty set"))?;
    let g = a.group();
    let mut counts: HashMap<GroupElement, usize> = HashMap::new();
    for x in a.iter() {
        for y in a.iter() {
            *counts.entry(g.add(x, y)).or_default() += 1;
        }
    }
    let mut best = (0usize, g.add(first, first));
    for (x, &c) in &counts {
        if c > best.0 || (c == best.0 && *x < best.1) {
            best = (c, x.clone());
        }
    }
    let x = best.1;
    let f: Vec<GroupElement> = a.iter().filter(|y| a.contains(&g.sub(&x, y))).cloned().collect();
    let f = FiniteSet::from_vec(g.clone(), f);
    if f.len() != best.0 || f.len() * counts.len() < a.len() * a.len() {
        return Err(Error::Audit("symmetric core is smaller than |A|^2 / |2A|".into()));
    }
    Ok((f, x))
}

/// Least `k'` with `|2^{k'+1} A| <= 2^d |2^{k'} A|`.
pub fn find_doubling_index(a: &FiniteSet, d: u32, cap: usize) -> Result<(usize, DoublingReport)> {
    if a.is_empty() {
        return Err(Error::pre("doubling index of an empty set"));
    }
    let limit = 1usize.checked_shl(d).unwrap_or(usize::MAX);
    let mut b = a.clone();
    let mut sizes = vec![b.len()];
    let mut ratios = Vec::new();
    let mut k = 0;
    loop {
        let next = sumset_capped(&b, &b, cap)?;
        sizes.push(next.len());
        ratios.push(Rational::new(Int::from(next.len()), Int::from(b.len())));
        if next.len() <= limit.saturating_mul(b.len()) {
            let doubling = ratios[0].clone();
            return Ok((k, DoublingReport { doubling, sizes, ratios }));
        }
        b = next;
        k += 1;
    }
}

/// Tuning of the exhaustive Freiman engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreimanOptions {
    pub r_max: usize,
    /// Candidate steps tried per round.
    pub budget: usize,
    pub cap: usize,
}

impl Default for FreimanOptions {
    fn default() -> Self {
        FreimanOptions { r_max: 4, budget: 32, cap: crate::progression::DEFAULT_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct FreimanExtract {
    pub progression: CosetProgression,
    pub size: usize,
    pub core_size: usize,
    /// `size(P) / |F|`.
    pub ratio: Rational,
}

fn torsion_weight(g: &AmbientGroup, v: &GroupElement) -> Int {
    let r = g.free_rank();
    let mut w = Int::zero();
    for (i, c) in v.coords().iter().enumerate() {
        if i < r {
            w += if c < &Int::zero() { -c } else { c.clone() };
        } else {
            let m = &g.moduli()[i - r];
            let alt = m - c;
            w += if alt < *c { alt } else { c.clone() };
        }
    }
    w
}

/// Nonzero elements of `D` up to sign, lightest first.
fn step_candidates(g: &AmbientGroup, d: &FiniteSet) -> Vec<GroupElement> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in d.iter() {
        if v.is_zero() || seen.contains(v) {
            continue;
        }
        seen.insert(g.neg(v));
        seen.insert(v.clone());
        out.push(v.clone());
    }
    out.sort_by(|a, b| torsion_weight(g, a).cmp(&torsion_weight(g, b)).then_with(|| a.cmp(b)));
    out
}

/// A large proper coset progression inside `2F - 2F`, found by exhaustive
/// greedy search.
pub fn freiman_extract(f: &FiniteSet, opts: &FreimanOptions) -> Result<FreimanExtract> {
    if f.is_empty() {
        return Err(Error::pre("Freiman extraction from an empty set"));
    }
    let g = f.group().clone();
    let cap = opts.cap;
    let two_f = sumset_capped(f, f, cap)?;
    let s = two_f.difference_set(&two_f)?;
    let d = f.difference_set(f)?;
    let candidates = step_candidates(&g, &d);

    // Largest subgroup inside 2F - 2F reachable by adjoining elements of F - F.
    let mut h = FiniteSubgroup::trivial(g.clone());
    for v in &candidates {
        if g.element_order(v).is_none() || h.contains(v) {
            continue;
        }
        let h2 = h.adjoin(v, cap)?;
        if h2.elements().is_subset(&s) {
            h = h2;
        }
    }
    let mut groups = vec![FiniteSubgroup::trivial(g.clone())];
    if !h.is_trivial() {
        groups.push(h);
    }

    let mut best: Option<(CosetProgression, usize)> = None;
    for h in groups {
        let mut p = CosetProgression::subgroup(h);
        let mut size = p.symmetry_group().order();
        while p.rank() < opts.r_max {
            let mut round: Option<(CosetProgression, usize)> = None;
            let fresh = candidates.iter().filter(|v| !p.symmetry_group().contains(v) && !p.steps().contains(v));
            for v in fresh.take(opts.budget) {
                let mut steps = p.steps().to_vec();
                steps.push(v.clone());
                let q = grow_within(&steps, p.symmetry_group(), &s, cap)?;
                let sz = image(&q, &Rational::one(), cap)?.len();
                if round.as_ref().is_none_or(|(_, b)| sz > *b) {
                    round = Some((q, sz));
                }
            }
            match round {
                Some((q, sz)) if sz > size => {
                    p = q;
                    size = sz;
                }
                _ => break,
            }
        }
        if best.as_ref().is_none_or(|(_, b)| size > *b) {
            best = Some((p, size));
        }
    }
    let (progression, size) = best.expect("the trivial subgroup is always a candidate");
    let progression = progression.absorb_saturated_steps(cap)?;
    Ok(FreimanExtract { progression, size, core_size: f.len(), ratio: Rational::new(Int::from(size), Int::from(f.len())) })
}

/// One adjoined step `a = b - c` with `b, c` in `2^{k'+2} A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjoinedStep {
    pub a: GroupElement,
    pub b: GroupElement,
    pub c: GroupElement,
}

#[derive(Clone, Debug)]
pub struct Adjoined {
    pub progression: CosetProgression,
    pub x1: GroupElement,
    /// Number of adjoined steps, including `2x_0` when it is nonzero.
    pub m: usize,
    pub steps: Vec<AdjoinedStep>,
    /// Covering translates `2x_0 + a_i`.
    pub translates: Vec<GroupElement>,
}

/// Covers `2^{k'+2} A` by translates `2x_0 + a_i + Image(P)` and adjoins the
/// `a_i` (and `2x_0`) as steps of dimension one. `A` must contain 0.
pub fn adjoin_steps(p: &CosetProgression, a: &FiniteSet, k: usize, x0: &GroupElement, cap: usize) -> Result<Adjoined> {
    let g = a.group().clone();
    if !a.contains(&g.zero()) {
        return Err(Error::pre("adjoin_steps expects 0 in A"));
    }
    let b = dyadic_sumset(a, k + 2, cap)?;
    let two_x0 = g.add(x0, x0);
    let tile = image(p, &Rational::one(), cap)?;
    if !tile.translate(&two_x0).is_subset(&b) {
        return Err(Error::pre("2x_0 + Image(P) is not inside 2^{k'+2} A"));
    }

    let mut uncovered: HashSet<GroupElement> = b.to_hash();
    let mut picks: Vec<(GroupElement, GroupElement)> = Vec::new();
    for u in b.iter() {
        if !uncovered.contains(u) {
            continue;
        }
        let mut choice = (0usize, g.zero());
        if tile.len() <= GREEDY_TILE_LIMIT {
            for q in tile.iter() {
                let base = g.sub(u, q);
                let gain = tile.iter().filter(|y| uncovered.contains(&g.add(&base, y))).count();
                if gain > choice.0 {
                    choice = (gain, q.clone());
                }
            }
        }
        let base = g.sub(u, &choice.1);
        for y in tile.iter() {
            uncovered.remove(&g.add(&base, y));
        }
        picks.push((u.clone(), choice.1));
    }

    let mut steps = Vec::new();
    if !two_x0.is_zero() {
        steps.push(AdjoinedStep { a: two_x0.clone(), b: two_x0.clone(), c: g.zero() });
    }
    let mut translates = Vec::new();
    for (u, q) in &picks {
        let c = g.add(&two_x0, q);
        let base = g.sub(u, q);
        translates.push(base.clone());
        let a = g.sub(&base, &two_x0);
        if !a.is_zero() {
            steps.push(AdjoinedStep { a, b: u.clone(), c });
        }
    }
    let mut dims = p.dims().to_vec();
    let mut all_steps = p.steps().to_vec();
    for s in &steps {
        dims.push(Rational::one());
        all_steps.push(s.a.clone());
    }
    let progression = CosetProgression::new(Gap::new(g.clone(), dims, all_steps)?, p.symmetry_group().clone())?;
    let m = steps.len();

    let symmetric = a.negate() == *a;
    let x1 = if symmetric {
        g.zero()
    } else {
        steps.iter().fold(two_x0.clone(), |acc, s| g.add(&g.add(&acc, &s.b), &s.c))
    };

    // Every element of 2^{k'+2}A is some translate plus an element of Image(P).
    for s in &steps {
        if g.sub(&s.b, &s.c) != s.a || !b.contains(&s.b) || !b.contains(&s.c) {
            return Err(Error::Audit("adjoined step is not a difference of elements of 2^{k'+2}A".into()));
        }
    }
    let image_p2 = image(&progression, &Rational::one(), cap)?;
    let covered: HashSet<GroupElement> = translates.iter().flat_map(|t| tile.iter().map(move |y| (t, y))).map(|(t, y)| g.add(t, y)).collect();
    if !b.iter().all(|x| covered.contains(x)) || !covered.iter().all(|x| image_p2.contains(x)) {
        return Err(Error::Audit("2^{k'+2}A is not covered inside Image(P')".into()));
    }
    let big = dyadic_sumset(a, k + 3, cap)?;
    let outer = iterated_sumset(&big, (m + 1) as u64, cap)?;
    if !image_p2.translate(&x1).is_subset(&outer) {
        return Err(Error::Audit("x_1 + Image(P') is not inside (m+1) 2^{k'+3} A".into()));
    }
    Ok(Adjoined { progression, x1, m, steps, translates })
}

#[derive(Clone, Debug)]
pub struct StructureOptions {
    pub threshold: u64,
    pub freiman: FreimanOptions,
    pub john: JohnOptions,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions { threshold: DEFAULT_THRESHOLD, freiman: FreimanOptions::default(), john: JohnOptions::default() }
    }
}

/// How the final progression was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Coalescence of the adjoined progression.
    Pipeline,
    /// `lA` is already a coset `x + H`; `Q = H` with `K = 1`.
    Coset,
}

#[derive(Clone, Debug)]
pub struct SumsetStructureResult {
    pub l: u64,
    pub d: u32,
    /// The shift with `0 in A - shift`.
    pub shift: GroupElement,
    pub progression: CosetProgression,
    pub x: GroupElement,
    pub x_prime: GroupElement,
    /// Least `K` with `lA ⊆ x' + Image(Q_K)`.
    pub k_factor: Int,
    /// `ceil(l / (l' 2^{k'+2})) K'` as given by the construction.
    pub k_construction: Int,
    pub doubling_index: usize,
    pub doubling: DoublingReport,
    pub core: FiniteSet,
    pub x0: GroupElement,
    pub freiman: FreimanExtract,
    pub adjoined: Adjoined,
    /// Zero on the coset route.
    pub l_prime: u64,
    /// Absent on the coset route.
    pub coalescence: Option<CoalescenceResult>,
    pub route: Route,
    /// Representations in `Q_K` of `y - x'` for every `y` in `lA`.
    pub witnesses: Vec<(GroupElement, Representation)>,
    pub rank_reduced: bool,
}

impl SumsetStructureResult {
    pub fn rank(&self) -> usize {
        self.progression.rank()
    }
}

/// `l^d |A| >= T |lA|`.
pub fn structure_gate(a_len: usize, la_len: usize, l: u64, d: u32, threshold: u64) -> bool {
    let lhs = Int::from(l).pow(d) * Int::from(a_len);
    lhs >= Int::from(threshold) * Int::from(la_len)
}

pub fn iterated_structure(a: &FiniteSet, l: u64, d: u32, opts: &StructureOptions) -> Result<SumsetStructureResult> {
    if a.is_empty() || l == 0 || d == 0 {
        return Err(Error::pre("iterated structure needs non-empty A, l >= 1 and d >= 1"));
    }
    let cap = opts.john.cap;
    let g = a.group().clone();
    let la = iterated_sumset(a, l, cap)?;
    if !structure_gate(a.len(), la.len(), l, d, opts.threshold) {
        return Err(Error::HypothesisNotMet(format!("l^d |A| < {} |lA|", opts.threshold)));
    }
    let shift = if a.contains(&g.zero()) { g.zero() } else { a.first().expect("non-empty").clone() };
    let a0 = a.translate(&g.neg(&shift));

    let (k, doubling) = find_doubling_index(&a0, d, cap)?;
    let bk = dyadic_sumset(&a0, k, cap)?;
    let (core, x0) = symmetric_core(&bk)?;
    let freiman = freiman_extract(&core, &opts.freiman)?;
    let adjoined = adjoin_steps(&freiman.progression, &a0, k, &x0, cap)?;

    if let Some((base, h)) = as_coset(&la, cap)? {
        let witnesses = la.iter().map(|y| (y.clone(), Representation { coeffs: vec![], h: g.sub(y, &base) })).collect();
        return Ok(SumsetStructureResult {
            l,
            d,
            shift,
            progression: CosetProgression::subgroup(h),
            x: base.clone(),
            x_prime: base,
            k_factor: Int::one(),
            k_construction: Int::one(),
            doubling_index: k,
            doubling,
            core,
            x0,
            freiman,
            adjoined,
            l_prime: 0,
            coalescence: None,
            route: Route::Coset,
            witnesses,
            rank_reduced: true,
        });
    }
    let unit = Int::from(adjoined.m as u64 + 1) << (k + 3);
    let l_prime = (Int::from(l) / &unit).to_u64().unwrap_or(0);
    if l_prime == 0 {
        return Err(Error::HypothesisNotMet(format!("l = {l} is below (m+1) 2^(k'+3) = {unit}")));
    }
    let coal = coalesce(&adjoined.progression, l_prime, &opts.john)?;
    let q = coal.progression.clone();
    let block = Int::from(l_prime) << (k + 2);
    let c = (Int::from(l) + &block - Int::one()) / &block;
    let k_construction = c * &coal.k_factor;

    let x = g.add(&g.scale(&Int::from(l_prime), &adjoined.x1), &g.scale(&Int::from(l), &shift));
    let x_prime = g.scale(&Int::from(l), &shift);

    let qi = image(&q, &Rational::one(), cap)?;
    if !qi.translate(&x).is_subset(&la) {
        return Err(Error::Audit("x + Image(Q) is not inside lA".into()));
    }
    let covers = |k: &Int| {
        let kr = Rational::from_integer(k.clone());
        la.iter().all(|y| locate(&q, &g.sub(y, &x_prime), &kr).is_some())
    };
    if !covers(&k_construction) {
        return Err(Error::Audit("lA is not inside x' + K Image(Q)".into()));
    }
    // The construction's K is usually far from tight; the least valid one is
    // found by bisection, since Image(Q_K) grows with K.
    let (mut lo, mut hi) = (Int::zero(), k_construction.clone());
    while &hi - &lo > Int::one() {
        let mid: Int = (&lo + &hi) / Int::from(2);
        if covers(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k_factor = hi;
    let kr = Rational::from_integer(k_factor.clone());
    let mut witnesses = Vec::with_capacity(la.len());
    for y in la.iter() {
        let rep = locate(&q, &g.sub(y, &x_prime), &kr).expect("checked above");
        witnesses.push((y.clone(), rep));
    }
    let rank_reduced = q.rank() < d as usize;
    Ok(SumsetStructureResult {
        l,
        d,
        shift,
        progression: q,
        x,
        x_prime,
        k_factor,
        k_construction,
        doubling_index: k,
        doubling,
        core,
        x0,
        freiman,
        adjoined,
        l_prime,
        coalescence: Some(coal),
        route: Route::Pipeline,
        witnesses,
        rank_reduced,
    })
}

/// `(x, H)` with `S = x + H` for a finite subgroup `H`, taking `x = 0` when
/// `0 in S`.
fn as_coset(s: &FiniteSet, cap: usize) -> Result<Option<(GroupElement, FiniteSubgroup)>> {
    let g = s.group();
    let Some(first) = s.first() else { return Ok(None) };
    let base = if s.contains(&g.zero()) { g.zero() } else { first.clone() };
    let h = s.translate(&g.neg(&base));
    let closed = h.iter().all(|a| h.iter().all(|b| h.contains(&g.add(a, b))));
    if !closed {
        return Ok(None);
    }
    Ok(Some((base, FiniteSubgroup::generated(g, h.elements(), cap)?)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SarkozyReport {
    pub holds: bool,
    /// `a` with `lA = a + <A - A>` when the conclusion holds.
    pub coset_rep: Option<GroupElement>,
    pub subgroup_order: usize,
    pub sumset_size: usize,
    /// Whether `l |A| >= C_2 |G|`.
    pub gate: bool,
    /// Least `l` for which `lA` is a coset of `<A - A>`.
    pub first_l: u64,
}

/// Least `l` with `l |A| >= C_2 |G|`.
pub fn sarkozy_threshold(a_len: usize, order: usize) -> u64 {
    let need = SARKOZY_CONSTANT as usize * order;
    need.div_ceil(a_len) as u64
}

/// Membership bitmask of a subset of `Z_m`, `m <= 64`.
fn cyclic_mask(a: &FiniteSet) -> u64 {
    a.iter().fold(0u64, |acc, x| acc | 1u64 << x.coords()[0].to_usize().expect("reduced residue"))
}

fn rotate(mask: u64, by: usize, m: usize) -> u64 {
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    if by == 0 {
        return mask;
    }
    ((mask << by) | (mask >> (m - by))) & full
}

/// Sárközy for `A` in `Z_m` with `m <= 64`, on bitmasks.
fn sarkozy_cyclic(a: &FiniteSet, l: u64, m: usize) -> SarkozyReport {
    let elems: Vec<usize> = a.iter().map(|x| x.coords()[0].to_usize().expect("reduced residue")).collect();
    let a0 = elems[0];
    let mut step = 0usize;
    for &x in &elems {
        step = num_integer::gcd(step, (x + m - a0) % m);
    }
    let step = num_integer::gcd(step, m);
    let h_order = m / step;
    let is_coset = |mask: u64| {
        if mask.count_ones() as usize != h_order {
            return false;
        }
        let lo = mask.trailing_zeros() as usize;
        (0..h_order).all(|i| mask >> ((lo + i * step) % m) & 1 == 1)
    };
    let amask = cyclic_mask(a);
    let plus_a = |s: u64| elems.iter().fold(0u64, |acc, &x| acc | rotate(s, x, m));
    let mut s = amask;
    let mut first_l = None;
    let mut at_l = None;
    let mut j = 1u64;
    loop {
        if first_l.is_none() && is_coset(s) {
            first_l = Some(j);
        }
        if j == l {
            at_l = Some(s);
        }
        if first_l.is_some() && at_l.is_some() {
            break;
        }
        s = plus_a(s);
        j += 1;
    }
    let la = at_l.expect("reached l");
    let holds = is_coset(la);
    let g = a.group();
    SarkozyReport {
        holds,
        coset_rep: holds.then(|| g.elem(&[la.trailing_zeros() as i64])),
        subgroup_order: h_order,
        sumset_size: la.count_ones() as usize,
        gate: l as usize * a.len() >= SARKOZY_CONSTANT as usize * m,
        first_l: first_l.expect("lA is eventually a coset"),
    }
}

/// Decides whether `lA` is a coset of `<A - A>` in a finite group.
pub fn sarkozy_check(a: &FiniteSet, l: u64, cap: usize) -> Result<SarkozyReport> {
    let g = a.group().clone();
    let order = g.order().ok_or_else(|| Error::pre("Sárközy check needs a finite group"))?;
    let order = order.to_usize().filter(|&n| n <= cap).ok_or_else(|| Error::cap("group order", cap))?;
    if a.is_empty() || l == 0 {
        return Err(Error::pre("Sárközy check needs non-empty A and l >= 1"));
    }
    if g.free_rank() == 0 && g.moduli().len() == 1 && order <= 64 {
        return Ok(sarkozy_cyclic(a, l, order));
    }
    let a0 = a.first().expect("non-empty");
    let diffs: Vec<GroupElement> = a.iter().map(|x| g.sub(x, a0)).collect();
    let h = FiniteSubgroup::generated(&g, &diffs, cap)?;
    let coset_of = |s: &FiniteSet| s.first().is_some_and(|x| s.len() == h.order() && h.elements().translate(x) == *s);
    let mut s = a.clone();
    let mut first_l = None;
    let mut at_l = None;
    let mut j = 1u64;
    loop {
        if first_l.is_none() && coset_of(&s) {
            first_l = Some(j);
        }
        if j == l {
            at_l = Some(s.clone());
        }
        if first_l.is_some() && at_l.is_some() {
            break;
        }
        s = sumset_capped(&s, a, cap)?;
        j += 1;
    }
    let la = at_l.expect("reached l");
    let holds = coset_of(&la);
    Ok(SarkozyReport {
        holds,
        coset_rep: if holds { la.first().cloned() } else { None },
        subgroup_order: h.order(),
        sumset_size: la.len(),
        gate: l as usize * a.len() >= SARKOZY_CONSTANT as usize * order,
        first_l: first_l.expect("lA is eventually a coset"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreimanHomCheck {
    pub is_hom: bool,
    /// `(x1, x2, x3, x4)` with `x1 + x2 = x3 + x4` but
    /// `f(x1) + f(x2) != f(x3) + f(x4)`.
    pub witness: Option<[GroupElement; 4]>,
    pub quadruples: usize,
}

/// Exhaustive check of `f(x1) + f(x2) = f(x3) + f(x4)` over additive
/// quadruples of the domain.
pub fn freiman_hom_check(domain: &AmbientGroup, codomain: &AmbientGroup, f: &[(GroupElement, GroupElement)]) -> Result<FreimanHomCheck> {
    let mut map: Vec<(GroupElement, GroupElement)> = f.to_vec();
    map.sort();
    map.dedup();
    for w in map.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::pre("the map assigns two values to one point"));
        }
    }
    let mut first: HashMap<GroupElement, (usize, usize, GroupElement)> = HashMap::new();
    let mut quadruples = 0;
    for i in 0..map.len() {
        for j in i..map.len() {
            let s = domain.add(&map[i].0, &map[j].0);
            let fs = codomain.add(&map[i].1, &map[j].1);
            match first.get(&s) {
                None => {
                    first.insert(s, (i, j, fs));
                }
                Some((i0, j0, f0)) => {
                    quadruples += 1;
                    if *f0 != fs {
                        let w = [map[*i0].0.clone(), map[*j0].0.clone(), map[i].0.clone(), map[j].0.clone()];
                        return Ok(FreimanHomCheck { is_hom: false, witness: Some(w), quadruples });
                    }
                }
            }
        }
    }
    Ok(FreimanHomCheck { is_hom: true, witness: None, quadruples })
}

#[derive(Clone, Debug)]
pub struct CounterexampleDemo {
    pub n: u64,
    pub progression: CosetProgression,
    pub image_size: usize,
    pub min: Int,
    pub max: Int,
    /// Integers strictly between `min` and `max` missing from the image.
    pub missing: Vec<Int>,
    /// `(j + 1/2) N` for `|j| <= N`, with whether each lies in the image.
    pub half_multiples: Vec<(Int, bool)>,
    /// True iff no half-integer multiple of `N` lies in the image.
    pub misses_half_multiples: bool,
    pub proper_at_2: bool,
    /// `x -> x`.
    pub identity_map: FreimanHomCheck,
    /// `x -> (a, b)` for the representation `x = a + bN` found first.
    pub coordinate_map: FreimanHomCheck,
}

/// Materializes `P = ((N/2, N), (1, N))` in `Z` for even `N`.
pub fn demo_counterexample(n: u64, cap: usize) -> Result<CounterexampleDemo> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::pre("the construction needs a positive even N"));
    }
    let ni = n as i64;
    let z = AmbientGroup::integers();
    let p = CosetProgression::simple(z.clone(), &[ni / 2, ni], &[&[1], &[ni]])?;
    let img = image(&p, &Rational::one(), cap)?;
    let values: Vec<Int> = img.iter().map(|x| x.coords()[0].clone()).collect();
    let min = values.first().expect("non-empty").clone();
    let max = values.last().expect("non-empty").clone();
    let present: HashSet<&Int> = values.iter().collect();
    let mut missing = Vec::new();
    let mut v = &min + Int::one();
    while v < max {
        if !present.contains(&v) {
            missing.push(v.clone());
        }
        v += Int::one();
    }
    let mut half_multiples = Vec::new();
    for j in -ni..ni {
        let h = Int::from(2 * j + 1) * Int::from(ni / 2);
        let inside = present.contains(&h);
        half_multiples.push((h, inside));
    }
    let misses_half_multiples = half_multiples.iter().all(|(_, b)| !b);
    let proper_at_2 = is_proper(&p, &Rational::from_integer(Int::from(2)), cap)?.proper;
    let identity: Vec<(GroupElement, GroupElement)> = img.iter().map(|x| (x.clone(), x.clone())).collect();
    let z2 = AmbientGroup::lattice(2);
    let mut coords = Vec::with_capacity(img.len());
    for x in img.iter() {
        let rep = locate(&p, x, &Rational::one()).ok_or_else(|| Error::Audit(format!("{x} has no representation")))?;
        coords.push((x.clone(), GroupElement(rep.coeffs.clone())));
    }
    Ok(CounterexampleDemo {
        n,
        image_size: img.len(),
        progression: p,
        min,
        max,
        missing,
        half_multiples,
        misses_half_multiples,
        proper_at_2,
        identity_map: freiman_hom_check(&z, &z, &identity)?,
        coordinate_map: freiman_hom_check(&z, &z2, &coords)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn z(values: &[i64]) -> FiniteSet {
        FiniteSet::integers(values)
    }

    #[test]
    fn symmetric_core_examples() {
        let (f, x) = symmetric_core(&z(&[0, 1, 2, 5])).unwrap();
        assert_eq!(x, GroupElement(vec![int(2)]));
        assert_eq!(f, z(&[0, 1, 2]));
        let (f, x) = symmetric_core(&z(&[-2, 0, 2])).unwrap();
        assert!(x.is_zero());
        assert_eq!(f, z(&[-2, 0, 2]));
        let (f, x) = symmetric_core(&z(&[7])).unwrap();
        assert_eq!(x, GroupElement(vec![int(14)]));
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn doubling_index_examples() {
        assert_eq!(find_doubling_index(&z(&[0, 1]), 1, 1000).unwrap().0, 0);
        let h = FiniteSet::cyclic(6, &[0, 2, 4]);
        assert_eq!(find_doubling_index(&h, 1, 1000).unwrap().0, 0);
        let (k, rep) = find_doubling_index(&z(&[0, 1, 10]), 1, 100_000).unwrap();
        assert!(rep.ratios[k] <= Rational::from_integer(int(2)));
        assert!(rep.ratios[..k].iter().all(|r| *r > Rational::from_integer(int(2))));
    }

    #[test]
    fn freiman_engine() {
        let f = z(&(-5..=5).collect::<Vec<_>>());
        let e = freiman_extract(&f, &FreimanOptions::default()).unwrap();
        assert_eq!(e.progression.rank(), 1);
        assert!(e.size >= f.len());
        let h = FiniteSet::cyclic(12, &[0, 4, 8]);
        let e = freiman_extract(&h, &FreimanOptions::default()).unwrap();
        assert_eq!(e.progression.rank(), 0);
        assert_eq!(e.size, 3);
    }

    #[test]
    fn adjoin_example() {
        let a = z(&[0, 1, 10]);
        let (k, _) = find_doubling_index(&a, 1, 100_000).unwrap();
        let (f, x0) = symmetric_core(&dyadic_sumset(&a, k, 100_000).unwrap()).unwrap();
        let p = freiman_extract(&f, &FreimanOptions::default()).unwrap().progression;
        let adj = adjoin_steps(&p, &a, k, &x0, 100_000).unwrap();
        assert!(adj.m >= 1);
        assert!(adjoin_steps(&p, &a, k, &x0, 10).is_err());
    }

    #[test]
    fn interval_structure() {
        let r = iterated_structure(&z(&[0, 1]), 64, 2, &StructureOptions::default()).unwrap();
        assert_eq!(r.rank(), 1);
        assert!(r.rank_reduced);
        assert!(r.x.is_zero() || r.x.coords()[0] >= int(0));
    }

    #[test]
    fn coset_structure() {
        let a = FiniteSet::cyclic(12, &[1, 5, 9]);
        let r = iterated_structure(&a, 64, 1, &StructureOptions::default()).unwrap();
        assert_eq!(r.rank(), 0);
        assert_eq!(r.k_factor, int(1));
        assert_eq!(r.progression.symmetry_group().order(), 3);
    }

    #[test]
    fn gate_rejects_dissociated() {
        let e = iterated_structure(&z(&[0, 1, 100, 10_000]), 2, 1, &StructureOptions::default()).unwrap_err();
        assert!(matches!(e, Error::HypothesisNotMet(_)));
    }

    #[test]
    fn sarkozy_examples() {
        let r = sarkozy_check(&FiniteSet::cyclic(5, &[0, 1]), 4, 1000).unwrap();
        assert!(r.holds && r.sumset_size == 5 && r.first_l == 4);
        let r = sarkozy_check(&FiniteSet::cyclic(4, &[0, 2]), 2, 1000).unwrap();
        assert!(r.holds && r.subgroup_order == 2);
        let r = sarkozy_check(&FiniteSet::cyclic(9, &[4]), 3, 1000).unwrap();
        assert!(r.holds && r.coset_rep == Some(GroupElement(vec![int(3)])));
        let r = sarkozy_check(&FiniteSet::cyclic(7, &[0, 1]), 3, 1000).unwrap();
        assert!(!r.holds && r.first_l == 6);
    }

    #[test]
    fn sarkozy_generic_path_agrees() {
        let g = AmbientGroup::new(0, vec![int(2), int(6)]).unwrap();
        let a = FiniteSet::from_vec(g.clone(), vec![g.elem(&[0, 0]), g.elem(&[1, 2])]);
        assert!(!sarkozy_check(&a, 3, 1000).unwrap().holds);
        let r = sarkozy_check(&a, 5, 1000).unwrap();
        assert!(r.holds);
        assert_eq!(r.subgroup_order, 6);
        assert_eq!(r.first_l, 5);
    }

    #[test]
    fn freiman_hom_examples() {
        let z1 = AmbientGroup::integers();
        let e = |v: i64| GroupElement(vec![int(v)]);
        let f = vec![(e(0), e(0)), (e(1), e(1)), (e(2), e(3))];
        let r = freiman_hom_check(&z1, &z1, &f).unwrap();
        assert!(!r.is_hom);
        assert_eq!(r.witness, Some([e(0), e(2), e(1), e(1)]));
        let f: Vec<_> = (0..6).map(|x| (e(x), e(3 * x + 7))).collect();
        assert!(freiman_hom_check(&z1, &z1, &f).unwrap().is_hom);
    }

    #[test]
    fn counterexample_demo() {
        let d = demo_counterexample(6, 100_000).unwrap();
        assert!(d.identity_map.is_hom);
        assert!(!d.proper_at_2);
        assert!(!d.misses_half_multiples);
        assert!(demo_counterexample(5, 1000).is_err());
    }
}
