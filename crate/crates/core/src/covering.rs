//! Explicit coverings of dilated progressions by translates.

use std::collections::HashSet;

use num_traits::One;

use crate::error::{Error, Result};
use crate::group::{FiniteSet, GroupElement};
use crate::john::ConvexCosetProgression;
use crate::progression::{image, CosetProgression};
use crate::scalar::{pow_rational, Int, Rational};

/// Greedy search for the best base is quadratic in the tile; above this tile
/// size the base is the first uncovered element itself.
const GREEDY_TILE_LIMIT: usize = 512;

/// Which set the translates are taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tile {
    /// `Image(P)` itself.
    Image,
    /// `Image(Q_2)`, a superset of `Image(Q) - Image(Q)`.
    DoubleDilate,
}

/// `target ⊆ ∪ (b + tile)` over the listed bases, with `count <= bound`.
#[derive(Clone, Debug)]
pub struct CoveringCertificate {
    pub bases: Vec<GroupElement>,
    pub target: FiniteSet,
    pub tile: FiniteSet,
    pub tile_kind: Tile,
    pub count: usize,
    pub bound: Rational,
    /// For Ruzsa covers: `count * size(Q) / ((t + t' + 1)^d size(P))`.
    pub run_constant: Option<Rational>,
}

impl CoveringCertificate {
    /// Exact re-check of the union.
    pub fn covers(&self) -> bool {
        let g = self.target.group();
        let mut union = HashSet::new();
        for b in &self.bases {
            for x in self.tile.iter() {
                union.insert(g.add(b, x));
            }
        }
        self.target.iter().all(|x| union.contains(x))
    }
}

/// Greedy cover of `target` by translates of the symmetric set `tile`.
pub fn greedy_cover(target: &FiniteSet, tile: &FiniteSet) -> Result<Vec<GroupElement>> {
    target.group().check_same(tile.group())?;
    let g = target.group();
    let mut uncovered: HashSet<GroupElement> = target.to_hash();
    let mut bases = Vec::new();
    for u in target.iter() {
        if !uncovered.contains(u) {
            continue;
        }
        let base = if tile.len() <= GREEDY_TILE_LIMIT {
            let mut best: Option<(usize, GroupElement)> = None;
            for p in tile.iter() {
                let b = g.sub(u, p);
                let gain = tile.iter().filter(|x| uncovered.contains(&g.add(&b, x))).count();
                let better = match &best {
                    None => true,
                    Some((bg, bb)) => gain > *bg || (gain == *bg && b < *bb),
                };
                if better {
                    best = Some((gain, b));
                }
            }
            best.expect("nonempty tile").1
        } else {
            u.clone()
        };
        for x in tile.iter() {
            uncovered.remove(&g.add(&base, x));
        }
        bases.push(base);
    }
    Ok(bases)
}

/// Bases from tiling each coordinate interval `[-floor(tN), floor(tN)]` by
/// intervals of length `2 floor(N) + 1`.
fn box_tiling(p: &CosetProgression, t: &Rational) -> Vec<GroupElement> {
    let inner: Vec<Int> = p.bounds(&Rational::one());
    let outer: Vec<Int> = p.bounds(t);
    let mut centres: Vec<Vec<Int>> = Vec::new();
    for (n, m) in inner.iter().zip(&outer) {
        let width = Int::from(2) * n + 1;
        let mut cs = Vec::new();
        // First interval starts at -m.
        let mut c = -m + n;
        loop {
            cs.push(c.clone());
            if &c + n >= *m {
                break;
            }
            c += &width;
        }
        centres.push(cs);
    }
    let g = p.group();
    let mut out = Vec::new();
    let mut idx = vec![0usize; centres.len()];
    loop {
        let coeffs: Vec<Int> = idx.iter().enumerate().map(|(i, &j)| centres[i][j].clone()).collect();
        out.push(g.combine(&coeffs, p.steps()));
        let mut i = idx.len();
        loop {
            if i == 0 {
                let set = FiniteSet::from_vec(g.clone(), out);
                return set.elements().to_vec();
            }
            i -= 1;
            if idx[i] + 1 < centres[i].len() {
                idx[i] += 1;
                for j in idx.iter_mut().skip(i + 1) {
                    *j = 0;
                }
                break;
            }
        }
    }
}

/// `(4t + 1)^d`.
pub fn doubling_bound(d: usize, t: &Rational) -> Rational {
    pow_rational(&(t * Rational::from_integer(Int::from(4)) + Rational::one()), d as u32)
}

/// Covers `Image(P_t)` by translates of `Image(P)`: the better of a greedy
/// cover and the coordinate tiling.
pub fn doubling_cover(p: &CosetProgression, t: &Rational, cap: usize) -> Result<CoveringCertificate> {
    if *t < Rational::one() {
        return Err(Error::pre("doubling cover needs t >= 1"));
    }
    let target = image(p, t, cap)?;
    let tile = image(p, &Rational::one(), cap)?;
    let greedy = greedy_cover(&target, &tile)?;
    let tiling = box_tiling(p, t);
    let bases = if tiling.len() < greedy.len() { tiling } else { greedy };
    finish_doubling(bases, target, tile, p.rank(), t)
}

/// [`doubling_cover`] for a convex coset progression (greedy only).
pub fn doubling_cover_convex(p: &ConvexCosetProgression, t: &Rational, cap: usize) -> Result<CoveringCertificate> {
    if *t < Rational::one() {
        return Err(Error::pre("doubling cover needs t >= 1"));
    }
    let target = p.image(t, cap)?;
    let tile = p.image(&Rational::one(), cap)?;
    let bases = greedy_cover(&target, &tile)?;
    finish_doubling(bases, target, tile, p.rank(), t)
}

fn finish_doubling(
    bases: Vec<GroupElement>,
    target: FiniteSet,
    tile: FiniteSet,
    d: usize,
    t: &Rational,
) -> Result<CoveringCertificate> {
    let bound = doubling_bound(d, t);
    let cert = CoveringCertificate { count: bases.len(), bases, target, tile, tile_kind: Tile::Image, bound, run_constant: None };
    if Rational::from_integer(Int::from(cert.count)) > cert.bound {
        return Err(Error::Audit(format!("{} translates exceed the bound {}", cert.count, cert.bound)));
    }
    if cert.tile.len() > cert.target.len()
        || Rational::from_integer(Int::from(cert.target.len())) > &cert.bound * Rational::from_integer(Int::from(cert.tile.len()))
    {
        return Err(Error::Audit("size inequality of the doubling lemma fails".into()));
    }
    if !cert.covers() {
        return Err(Error::Audit("greedy translates do not cover the target".into()));
    }
    Ok(cert)
}

/// Ruzsa covering: a maximal family of bases in `Image(P_{t'})` with disjoint
/// `Q`-translates, whose `Q_2`-translates then cover `Image(P_{t'})`.
pub fn ruzsa_cover(
    p: &CosetProgression,
    q: &CosetProgression,
    t: &Rational,
    t_prime: &Rational,
    cap: usize,
) -> Result<CoveringCertificate> {
    p.group().check_same(q.group())?;
    let qi = image(q, &Rational::one(), cap)?;
    if !qi.is_subset(&image(p, t, cap)?) {
        return Err(Error::pre("Image(Q) is not contained in Image(P_t)"));
    }
    let target = image(p, t_prime, cap)?;
    let g = p.group();
    let mut used: HashSet<GroupElement> = HashSet::new();
    let mut bases = Vec::new();
    for a in target.iter() {
        let translate: Vec<GroupElement> = qi.iter().map(|x| g.add(a, x)).collect();
        if translate.iter().all(|x| !used.contains(x)) {
            used.extend(translate);
            bases.push(a.clone());
        }
    }
    let tile = image(q, &Rational::from_integer(Int::from(2)), cap)?;
    let count = bases.len();
    // count * |Q| <= |P_{t'} + Q| <= |P_{t + t'}|.
    let big = image(p, &(t + t_prime), cap)?;
    let bound = Rational::new(Int::from(big.len()), Int::from(qi.len()));
    let d = p.rank();
    let sp = image(p, &Rational::one(), cap)?.len();
    let denom = pow_rational(&(t + t_prime + Rational::one()), d as u32) * Rational::from_integer(Int::from(sp));
    let run_constant = Rational::from_integer(Int::from(count * qi.len())) / denom;
    let cert = CoveringCertificate { bases, target, tile, tile_kind: Tile::DoubleDilate, count, bound, run_constant: Some(run_constant) };
    if Rational::from_integer(Int::from(count)) > cert.bound {
        return Err(Error::Audit("Ruzsa count exceeds |P_{t+t'}| / |Q|".into()));
    }
    if !cert.covers() {
        return Err(Error::Audit("Ruzsa translates do not cover the target".into()));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{AmbientGroup, FiniteSubgroup};
    use crate::scalar::rat;

    fn z_prog(dims: &[i64], steps: &[&[i64]], free_rank: usize) -> CosetProgression {
        CosetProgression::simple(AmbientGroup::lattice(free_rank), dims, steps).unwrap()
    }

    #[test]
    fn doubling_examples() {
        let p = z_prog(&[1], &[&[1]], 1);
        let c = doubling_cover(&p, &rat(3, 1), 1000).unwrap();
        assert_eq!(c.count, 3);
        assert_eq!(c.bound, rat(13, 1));
        assert_eq!(doubling_cover(&p, &rat(1, 1), 1000).unwrap().count, 1);
        let p = z_prog(&[2, 3], &[&[1, 0], &[0, 1]], 2);
        let c = doubling_cover(&p, &rat(2, 1), 10_000).unwrap();
        assert!(c.count <= 25);
        let cc = doubling_cover_convex(&crate::john::to_convex(&p), &rat(2, 1), 10_000).unwrap();
        assert!(cc.count <= 81);
    }

    #[test]
    fn ruzsa_examples() {
        let p = z_prog(&[10], &[&[1]], 1);
        let q = z_prog(&[2], &[&[1]], 1);
        let c = ruzsa_cover(&p, &q, &rat(1, 1), &rat(1, 1), 1000).unwrap();
        assert!(c.covers());
        assert_eq!(c.count, 5);
        let c = ruzsa_cover(&p, &p, &rat(1, 1), &rat(1, 1), 1000).unwrap();
        assert!(c.count <= 3);
        let zero = CosetProgression::subgroup(FiniteSubgroup::trivial(AmbientGroup::integers()));
        let c = ruzsa_cover(&p, &zero, &rat(1, 1), &rat(1, 1), 1000).unwrap();
        assert_eq!(c.count, 21);
        assert!(ruzsa_cover(&q, &p, &rat(1, 1), &rat(1, 1), 1000).is_err());
    }
}
