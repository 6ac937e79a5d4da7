//! Seeded random inputs for the CLI and the test corpora.

use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::convex::{Constraint, SymmetricPolytope};
use crate::group::{AmbientGroup, FiniteSet, FiniteSubgroup, GroupElement};
use crate::lattice::{integer_points, Lattice};
use crate::linalg::Matrix;
use crate::progression::{CosetProgression, Gap};
use crate::scalar::{Int, Rational};

/// Bounds for [`progression`].
#[derive(Clone, Debug)]
pub struct Shape {
    pub max_free_rank: usize,
    pub max_modulus: u64,
    pub max_rank: usize,
    pub max_dim: i64,
    /// Upper bound on `box_count * |H|`.
    pub max_size: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_free_rank: 2, max_modulus: 12, max_rank: 3, max_dim: 5, max_size: 20_000 }
    }
}

/// `Z^r + Z/m_1 + ...` with `r <= max_free_rank`, at most two cyclic
/// factors of order `2..=max_modulus`, and at least one factor overall.
pub fn group<R: Rng>(rng: &mut R, max_free_rank: usize, max_modulus: u64) -> AmbientGroup {
    loop {
        let r = rng.gen_range(0..=max_free_rank);
        let k = if max_modulus >= 2 { rng.gen_range(0..=2) } else { 0 };
        if r + k == 0 {
            continue;
        }
        let moduli = (0..k).map(|_| Int::from(rng.gen_range(2..=max_modulus))).collect();
        return AmbientGroup::new(r, moduli).expect("moduli are at least 2");
    }
}

pub fn element<R: Rng>(rng: &mut R, g: &AmbientGroup, spread: i64) -> GroupElement {
    let mut coords: Vec<Int> = (0..g.free_rank()).map(|_| Int::from(rng.gen_range(-spread..=spread))).collect();
    for m in g.moduli() {
        coords.push(Int::from(rng.gen_range(0..m.to_i64().expect("small modulus"))));
    }
    g.element(coords).expect("coordinates match the group")
}

fn dimension<R: Rng>(rng: &mut R, max_dim: i64) -> Rational {
    let n = rng.gen_range(1..=max_dim);
    if rng.gen_bool(0.2) {
        Rational::new(Int::from(2 * n - 1), Int::from(2))
    } else {
        Rational::from_integer(Int::from(n))
    }
}

/// A coset progression within `shape`; the symmetry group is non-trivial
/// about a third of the time when the group has torsion.
pub fn progression<R: Rng>(rng: &mut R, shape: &Shape) -> CosetProgression {
    loop {
        let g = group(rng, shape.max_free_rank, shape.max_modulus);
        let rank = rng.gen_range(0..=shape.max_rank);
        let dims: Vec<Rational> = (0..rank).map(|_| dimension(rng, shape.max_dim)).collect();
        let steps = (0..rank).map(|_| element(rng, &g, 4)).collect();
        let gap = Gap::new(g.clone(), dims, steps).expect("matching lengths");
        let h = if !g.moduli().is_empty() && rng.gen_bool(0.35) {
            let torsion = element(rng, &AmbientGroup::new(0, g.moduli().to_vec()).expect("valid"), 0);
            let mut coords = vec![Int::from(0); g.free_rank()];
            coords.extend(torsion.coords().iter().cloned());
            FiniteSubgroup::generated(&g, &[g.element(coords).expect("valid")], shape.max_size).expect("finite")
        } else {
            FiniteSubgroup::trivial(g.clone())
        };
        let p = CosetProgression::new(gap, h).expect("same group");
        let size = p.box_count(&Rational::one()) * Int::from(p.symmetry_group().order());
        if size <= Int::from(shape.max_size) {
            return p;
        }
    }
}

/// A uniformly random subset of `Z/m` of the given size.
pub fn cyclic_subset<R: Rng>(rng: &mut R, m: u64, size: usize) -> FiniteSet {
    let mut all: Vec<i64> = (0..m as i64).collect();
    all.shuffle(rng);
    all.truncate(size.min(m as usize));
    FiniteSet::cyclic(m, &all)
}

/// A symmetric polytope in `R^d`: a box with half-widths in `[1, 4]` cut by
/// up to two extra symmetric slabs, paired with `Z^d` or a random
/// sublattice of small index.
/// Redrawn until `B ∩ Γ` spans `R^d`.
pub fn body<R: Rng>(rng: &mut R, d: usize) -> (SymmetricPolytope<Rational>, Lattice<Rational>) {
    loop {
        let (body, lattice) = body_once(rng, d);
        if spans(&body, &lattice) {
            return (body, lattice);
        }
    }
}

fn spans(body: &SymmetricPolytope<Rational>, lattice: &Lattice<Rational>) -> bool {
    let Ok(pulled) = body.pullback(lattice.basis()) else { return false };
    let Ok(pts) = integer_points(&pulled, 100_000) else { return false };
    let rows = pts.iter().map(|p| p.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    Matrix::from_rows(rows).rank() == body.dim()
}

fn body_once<R: Rng>(rng: &mut R, d: usize) -> (SymmetricPolytope<Rational>, Lattice<Rational>) {
    let q = |n: i64| Rational::from_integer(Int::from(n));
    let mut cons = Vec::new();
    for i in 0..d {
        let mut a = vec![q(0); d];
        a[i] = q(1);
        let w = Rational::new(Int::from(rng.gen_range(2..=8)), Int::from(2));
        cons.push(Constraint { a, b: w });
    }
    for _ in 0..rng.gen_range(0..=2) {
        let a: Vec<Rational> = (0..d).map(|_| q(rng.gen_range(-2..=2))).collect();
        if a.iter().all(|x| *x == q(0)) {
            continue;
        }
        cons.push(Constraint { a, b: q(rng.gen_range(2..=6)) });
    }
    let body = SymmetricPolytope::new(d, cons).expect("positive right-hand sides");
    let lattice = if rng.gen_bool(0.5) {
        Lattice::standard(d)
    } else {
        let m = Matrix::from_fn(d, d, |r, c| match r.cmp(&c) {
            std::cmp::Ordering::Equal => q(rng.gen_range(1..=2)),
            std::cmp::Ordering::Less => q(rng.gen_range(-1..=1)),
            std::cmp::Ordering::Greater => q(0),
        });
        Lattice::new(m).expect("triangular with non-zero diagonal")
    };
    (body, lattice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn progressions_respect_the_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shape = Shape::default();
        for _ in 0..50 {
            let p = progression(&mut rng, &shape);
            assert!(p.rank() <= 3);
            assert!(p.group().free_rank() <= 2);
            assert!(p.box_count(&Rational::one()) * Int::from(p.symmetry_group().order()) <= Int::from(20_000));
        }
    }

    #[test]
    fn same_seed_same_output() {
        let a = progression(&mut ChaCha8Rng::seed_from_u64(9), &Shape::default());
        let b = progression(&mut ChaCha8Rng::seed_from_u64(9), &Shape::default());
        assert_eq!(a, b);
        let (k, l) = body(&mut ChaCha8Rng::seed_from_u64(3), 2);
        assert_eq!(k.dim(), 2);
        assert_eq!(l.dim(), 2);
        assert_eq!(cyclic_subset(&mut ChaCha8Rng::seed_from_u64(3), 10, 4).len(), 4);
    }
}
