//! Coalescence: a single proper coset progression sandwiching the `l`-fold
//! sumset of a coset progression.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{FiniteSet, GroupElement};
use crate::john::{gap_john, gap_john_outer, JohnOptions, BOUND_CONSTANT};
use crate::lattice::subgroup_lattice;
use crate::progression::{generators, grow_within, image, is_proper, locate, CosetProgression, Representation};
use crate::scalar::{ceil, floor, Int, Rational};

/// Diagnostics for one level of the recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct CoalescenceLevel {
    pub rank: usize,
    pub l: Int,
    /// `P` is `2^k`-proper but not `2^{k+1}`-proper (`k = -1`: not
    /// 1-proper). `None` when `P` was already `l`-proper.
    pub k: Option<i64>,
    /// Total dilation `S` with `Image(P') ⊆ Image(P_S)`.
    pub outer_dilation: Option<Rational>,
    /// Scale handed to the next level.
    pub l_next: Option<Int>,
    /// Which terminal rule produced `Q` at this level, if any.
    pub terminal: Option<Terminal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// Rank zero: `Q = P`.
    Trivial,
    /// `P` is `l`-proper: `Q = P_l`.
    Proper,
    /// `l'' < 1` with `k >= 0`: `Q = P_{2^k}`.
    ProperDilate,
    /// `l'' < 1` with `k = -1`: `Q` from the inner John theorem on `P_l`,
    /// with `K` found by search.
    Inner,
}

#[derive(Clone, Debug)]
pub struct CoalescenceResult {
    /// The input with dimensions rounded down and empty steps dropped.
    pub input: CosetProgression,
    pub l: u64,
    pub progression: CosetProgression,
    /// `Image(Q) ⊆ l Image(P) ⊆ K Image(Q)`.
    pub k_factor: Int,
    pub depth: usize,
    pub levels: Vec<CoalescenceLevel>,
    /// `size(Q) / (l^{d'} size(P))`, when both sizes were enumerable.
    pub size_ratio: Option<f64>,
    /// A representation in `Q_K` of every element of `l Image(P)`.
    pub witnesses: Vec<(GroupElement, Representation)>,
    pub verified: bool,
}

/// `floor((C d)^{3d^2/4})`.
pub fn k_bound(d: usize) -> f64 {
    let df = d as f64;
    (BOUND_CONSTANT * df).powf(0.75 * df * df).floor().max(1.0)
}

fn int_dims(p: &CosetProgression) -> CosetProgression {
    p.with_integer_dims().drop_trivial_steps()
}

fn largest_power_of_two_at_most(x: &Rational) -> Option<Int> {
    if *x < Rational::one() {
        return None;
    }
    let f = floor(x);
    let bits = f.bits();
    Some(Int::one() << (bits - 1))
}

pub fn coalesce(p: &CosetProgression, l: u64, opts: &JohnOptions) -> Result<CoalescenceResult> {
    if l == 0 {
        return Err(Error::pre("coalescence needs l >= 1"));
    }
    let input = int_dims(p);
    let li = Int::from(l);
    let mut levels = Vec::new();
    let (q, k) = recurse(&input, &li, opts, &mut levels)?;
    let q = q.absorb_saturated_steps(opts.cap)?;
    let mut res = CoalescenceResult {
        input,
        l,
        progression: q,
        k_factor: k,
        depth: levels.len().saturating_sub(1),
        levels,
        size_ratio: None,
        witnesses: vec![],
        verified: false,
    };
    if opts.verify {
        verify(&mut res, opts.cap)?;
    }
    Ok(res)
}

fn recurse(p: &CosetProgression, l: &Int, opts: &JohnOptions, levels: &mut Vec<CoalescenceLevel>) -> Result<(CosetProgression, Int)> {
    let cap = opts.cap;
    let d = p.rank();
    let mut level = CoalescenceLevel { rank: d, l: l.clone(), k: None, outer_dilation: None, l_next: None, terminal: None };
    if d == 0 {
        level.terminal = Some(Terminal::Trivial);
        levels.push(level);
        return Ok((p.clone(), Int::one()));
    }
    let lr = Rational::from_integer(l.clone());
    // Smallest j with P_{2^j} improper, testing P_l itself once 2^j >= l.
    let mut j: i64 = 0;
    let k = loop {
        let tau = Int::one() << (j as usize);
        if tau >= *l {
            if is_proper(p, &lr, cap)?.proper {
                level.terminal = Some(Terminal::Proper);
                levels.push(level);
                return Ok((p.dilate(&lr)?, Int::one()));
            }
            break j - 1;
        }
        if !is_proper(p, &Rational::from_integer(tau), cap)?.proper {
            break j - 1;
        }
        j += 1;
    };
    level.k = Some(k);
    let tau4 = Int::one() << ((k + 2) as usize);
    let p4 = p.dilate(&Rational::from_integer(tau4.clone()))?;
    let quiet = JohnOptions { verify: false, ..opts.clone() };
    let outer = gap_john_outer(&p4, &Rational::one(), &quiet)?;
    let s = Rational::from_integer(tau4.clone()) * &outer.lambda;
    level.outer_dilation = Some(s.clone());
    let m = ceil(&Rational::new(l.clone(), tau4.clone()));
    match largest_power_of_two_at_most(&(&lr / &s)) {
        Some(l2) => {
            level.l_next = Some(l2.clone());
            levels.push(level);
            let next = int_dims(&outer.progression);
            let (q, k2) = recurse(&next, &l2, opts, levels)?;
            Ok((q, m.div_ceil(&l2) * k2))
        }
        None if k >= 0 => {
            level.terminal = Some(Terminal::ProperDilate);
            levels.push(level);
            let tau = Int::one() << (k as usize);
            let q = p.dilate(&Rational::from_integer(tau.clone()))?;
            Ok((q, l.div_ceil(&tau)))
        }
        None => {
            level.terminal = Some(Terminal::Inner);
            levels.push(level);
            fallback(p, l, &outer.progression, &s, &quiet)
        }
    }
}

/// `P` is not 1-proper and the outer progression overshoots `l`. Candidates
/// are the outer progression shrunk by powers of two until it fits inside
/// `l Image(P)`, the inner John progression of `P_l`, and maximal proper
/// progressions inside `l Image(P)` on the steps of `P` and of the outer
/// progression; the one with the least sandwich factor wins.
fn fallback(
    p: &CosetProgression,
    l: &Int,
    outer: &CosetProgression,
    s: &Rational,
    opts: &JohnOptions,
) -> Result<(CosetProgression, Int)> {
    let cap = opts.cap;
    let lr = Rational::from_integer(l.clone());
    let pl = p.dilate(&lr)?;
    let target = image(&pl, &Rational::one(), cap)?;
    let span = subgroup_lattice(p.group(), &generators(p));
    let limit = k_bound(p.rank());
    let mut candidates = Vec::new();
    let mut mu = Rational::one();
    while &mu * s > lr {
        mu /= Int::from(2);
    }
    loop {
        let q = int_dims(&outer.dilate(&mu)?);
        if image(&q, &Rational::one(), cap)?.is_subset(&target) {
            candidates.push(q);
            break;
        }
        mu /= Int::from(2);
    }
    if let Ok(inner) = gap_john(&pl, &Rational::one(), opts) {
        candidates.push(int_dims(&inner.progression));
    }
    let choices = [(p.steps(), p.symmetry_group()), (outer.steps(), outer.symmetry_group()), (outer.steps(), p.symmetry_group())];
    for (steps, h) in choices {
        if let Ok(q) = grow_within(steps, h, &target, cap) {
            candidates.push(q);
        }
    }
    let mut best: Option<(CosetProgression, Int)> = None;
    for q in candidates {
        if subgroup_lattice(q.group(), &generators(&q)) != span {
            continue;
        }
        if let Some(k) = search_k(&target, &q, limit) {
            if best.as_ref().is_none_or(|(_, b)| k < *b) {
                best = Some((q, k));
            }
        }
    }
    best.ok_or_else(|| Error::HypothesisNotMet("no sandwich factor within the coalescence bound".into()))
}

/// Least power of two `K` with `target ⊆ Image(Q_K)`, if one is at most
/// twice `limit`.
fn search_k(target: &FiniteSet, q: &CosetProgression, limit: f64) -> Option<Int> {
    let mut k = Int::one();
    while k.to_f64().unwrap_or(f64::INFINITY) <= 2.0 * limit {
        let kr = Rational::from_integer(k.clone());
        if target.iter().all(|x| locate(q, x, &kr).is_some()) {
            return Some(k);
        }
        k <<= 1;
    }
    None
}

fn verify(res: &mut CoalescenceResult, cap: usize) -> Result<()> {
    let p = &res.input;
    let q = &res.progression;
    let l = Rational::from_integer(Int::from(res.l));
    let target = image(p, &l, cap)?;
    let qi = image(q, &Rational::one(), cap)?;
    if !qi.is_subset(&target) {
        return Err(Error::Audit("Image(Q) is not inside l Image(P)".into()));
    }
    let kr = Rational::from_integer(res.k_factor.clone());
    let mut witnesses = Vec::with_capacity(target.len());
    for x in target.iter() {
        match locate(q, x, &kr) {
            Some(rep) => witnesses.push((x.clone(), rep)),
            None => return Err(Error::Audit(format!("{x} in l Image(P) but not in K Image(Q)"))),
        }
    }
    res.witnesses = witnesses;
    if !is_proper(q, &Rational::one(), cap)?.proper {
        return Err(Error::Audit("coalesced progression is not proper".into()));
    }
    if subgroup_lattice(p.group(), &generators(p)) != subgroup_lattice(q.group(), &generators(q)) {
        return Err(Error::Audit("Image(Q) and Image(P) generate different groups".into()));
    }
    let d = p.rank();
    if q.rank() > d || res.depth > d {
        return Err(Error::Audit("rank or depth grew".into()));
    }
    if res.k_factor.to_f64().unwrap_or(f64::INFINITY) > k_bound(d) {
        return Err(Error::Audit(format!("K = {} exceeds the bound {}", res.k_factor, k_bound(d))));
    }
    let sp = image(p, &Rational::one(), cap)?.len() as f64;
    let dq = q.rank() as i32;
    res.size_ratio = Some(qi.len() as f64 / ((res.l as f64).powi(dq) * sp));
    res.verified = true;
    Ok(())
}

/// `true` iff `K Image(Q)` (as an iterated sumset) equals `Image(Q_K)`;
/// holds whenever the dimensions of `Q` are integers.
pub fn integer_dims(q: &CosetProgression) -> bool {
    q.dims().iter().all(|n| n.is_integer() && !n.is_zero())
}
