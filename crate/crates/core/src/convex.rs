//! Symmetric polytopes `{ x : |<a_j, x>| <= b_j }` in H-representation.
//!
//! Vertex enumeration, Fourier-Motzkin projection, exact volume and the
//! inscribed ellipsoid all assume an exact scalar (rationals). The container
//! itself is generic so that float copies can be made for numerics.

use std::sync::OnceLock;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::{rational_from_f64_trunc, sqrt_ceil, Int, Rational, Scalar};

/// Default dimension limit for exact volume.
pub const VOLUME_DIM_LIMIT: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint<T> {
    pub a: Vec<T>,
    pub b: T,
}

#[derive(Clone, Debug)]
pub struct SymmetricPolytope<T: Scalar> {
    dim: usize,
    constraints: Vec<Constraint<T>>,
    vertices: OnceLock<Vec<Vec<T>>>,
}

impl<T: Scalar> PartialEq for SymmetricPolytope<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.constraints == other.constraints
    }
}

impl<T: Scalar> SymmetricPolytope<T> {
    pub fn new(dim: usize, constraints: Vec<Constraint<T>>) -> Result<Self> {
        for c in &constraints {
            if c.a.len() != dim {
                return Err(Error::Parse(format!("constraint normal has length {}, expected {dim}", c.a.len())));
            }
            if !c.b.is_positive() {
                return Err(Error::Degenerate("constraint bound must be positive".into()));
            }
        }
        if dim > 0 {
            let normals = Matrix::from_rows(constraints.iter().map(|c| c.a.clone()).collect());
            if constraints.is_empty() || normals.rank() < dim {
                return Err(Error::Degenerate("constraint normals do not span the space (unbounded body)".into()));
            }
        }
        Ok(SymmetricPolytope { dim, constraints, vertices: OnceLock::new() })
    }

    /// The zero-dimensional body `{0}`.
    pub fn point() -> Self {
        SymmetricPolytope { dim: 0, constraints: vec![], vertices: OnceLock::new() }
    }

    /// Axis-parallel box `prod [-w_i, w_i]`.
    pub fn cuboid(half_widths: &[T]) -> Result<Self> {
        let d = half_widths.len();
        let cons = (0..d)
            .map(|i| Constraint {
                a: (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect(),
                b: half_widths[i].clone(),
            })
            .collect();
        SymmetricPolytope::new(d, cons)
    }

    /// `|x_1| + ... + |x_d| <= r`.
    pub fn cross_polytope(d: usize, r: T) -> Result<Self> {
        let mut cons = Vec::new();
        for mask in 0..(1usize << d.saturating_sub(1)) {
            let mut a = vec![T::one()];
            for j in 1..d {
                a.push(if mask >> (j - 1) & 1 == 1 { -T::one() } else { T::one() });
            }
            cons.push(Constraint { a, b: r.clone() });
        }
        SymmetricPolytope::new(d, cons)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    /// Exact membership (closed body).
    pub fn contains(&self, x: &[T]) -> bool {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        self.constraints.iter().all(|c| dot(&c.a, x).abs() <= c.b)
    }

    /// `t . B`.
    pub fn dilate(&self, t: &T) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::pre("dilation factor must be positive"));
        }
        let cons = self
            .constraints
            .iter()
            .map(|c| Constraint { a: c.a.clone(), b: c.b.clone() * t.clone() })
            .collect();
        Ok(SymmetricPolytope { dim: self.dim, constraints: cons, vertices: OnceLock::new() })
    }

    /// Image `U . B` under an invertible linear map.
    pub fn transform(&self, u: &Matrix<T>) -> Result<Self> {
        let inv = u.inverse().ok_or_else(|| Error::Degenerate("singular transform".into()))?;
        self.pullback(&inv)
    }

    /// Preimage `{ x : M x in B }` for invertible `M`.
    pub fn pullback(&self, m: &Matrix<T>) -> Result<Self> {
        assert_eq!(m.rows(), self.dim);
        let mt = m.transpose();
        let cons = self
            .constraints
            .iter()
            .map(|c| Constraint { a: mt.mul_vec(&c.a), b: c.b.clone() })
            .collect();
        SymmetricPolytope::new(m.cols(), cons)
    }

    /// Vertices, computed once and cached. Vertices come in `+-` pairs.
    pub fn vertices(&self) -> &[Vec<T>] {
        self.vertices.get_or_init(|| self.compute_vertices())
    }

    /// Double description: start from the parallelotope cut out by `d`
    /// independent constraints, then intersect with the remaining halfspaces
    /// one at a time. A cut keeps the vertices on the inner side and adds one
    /// point on every edge that crosses it; two vertices span an edge exactly
    /// when the halfspaces tight at both have rank `d - 1`.
    fn compute_vertices(&self) -> Vec<Vec<T>> {
        let d = self.dim;
        if d == 0 {
            return vec![vec![]];
        }
        // Halfspace 2j is <a_j, x> <= b_j and 2j+1 is <-a_j, x> <= b_j.
        let half: Vec<(Vec<T>, T)> = self
            .constraints
            .iter()
            .flat_map(|c| [(c.a.clone(), c.b.clone()), (c.a.iter().map(|x| -x.clone()).collect(), c.b.clone())])
            .collect();
        let words = half.len().div_ceil(64);
        let mut basis: Vec<usize> = Vec::new();
        for (j, c) in self.constraints.iter().enumerate() {
            let mut rows: Vec<Vec<T>> = basis.iter().map(|&k| self.constraints[k].a.clone()).collect();
            rows.push(c.a.clone());
            if Matrix::from_rows(rows).rank() == basis.len() + 1 {
                basis.push(j);
                if basis.len() == d {
                    break;
                }
            }
        }
        if basis.len() < d {
            return Vec::new();
        }
        let inv = Matrix::from_rows(basis.iter().map(|&j| self.constraints[j].a.clone()).collect())
            .inverse()
            .expect("independent rows");
        let set = |bits: &mut Vec<u64>, h: usize| bits[h / 64] |= 1u64 << (h % 64);
        let mut verts: Vec<(Vec<T>, Vec<u64>)> = Vec::with_capacity(1 << d);
        for signs in 0..(1usize << d) {
            let mut tight = vec![0u64; words];
            let rhs: Vec<T> = basis
                .iter()
                .enumerate()
                .map(|(k, &j)| {
                    let neg = signs >> k & 1 == 1;
                    set(&mut tight, 2 * j + neg as usize);
                    if neg {
                        -self.constraints[j].b.clone()
                    } else {
                        self.constraints[j].b.clone()
                    }
                })
                .collect();
            verts.push((inv.mul_vec(&rhs), tight));
        }
        let in_basis: Vec<bool> = (0..self.constraints.len()).map(|j| basis.contains(&j)).collect();
        for (h, (a, b)) in half.iter().enumerate() {
            if in_basis[h / 2] {
                continue;
            }
            let slack: Vec<T> = verts.iter().map(|(x, _)| dot(a, x) - b.clone()).collect();
            if slack.iter().all(|s| !s.is_positive()) {
                for ((_, tight), s) in verts.iter_mut().zip(&slack) {
                    if s.is_zero() {
                        set(tight, h);
                    }
                }
                continue;
            }
            let out_idx: Vec<usize> = (0..verts.len()).filter(|&i| slack[i].is_positive()).collect();
            let in_idx: Vec<usize> = (0..verts.len()).filter(|&i| slack[i].is_negative()).collect();
            let mut added = Vec::new();
            for &p in &out_idx {
                for &n in &in_idx {
                    let common: Vec<u64> = verts[p].1.iter().zip(&verts[n].1).map(|(x, y)| x & y).collect();
                    let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                    if (count as usize) < d - 1 {
                        continue;
                    }
                    let rows: Vec<Vec<T>> = (0..half.len()).filter(|&k| common[k / 64] >> (k % 64) & 1 == 1).map(|k| half[k].0.clone()).collect();
                    if Matrix::from_rows(rows).rank() != d - 1 {
                        continue;
                    }
                    let (sp, sn) = (slack[p].clone(), slack[n].clone());
                    let lambda = sp.clone() / (sp - sn);
                    let x: Vec<T> = verts[p].0.iter().zip(&verts[n].0).map(|(u, v)| u.clone() + lambda.clone() * (v.clone() - u.clone())).collect();
                    let mut tight = common;
                    set(&mut tight, h);
                    added.push((x, tight));
                }
            }
            let mut next: Vec<(Vec<T>, Vec<u64>)> = Vec::with_capacity(verts.len() + added.len());
            for (i, (x, mut tight)) in verts.into_iter().enumerate() {
                if slack[i].is_zero() {
                    set(&mut tight, h);
                }
                if !slack[i].is_positive() {
                    next.push((x, tight));
                }
            }
            next.extend(added);
            verts = next;
        }
        let mut out: Vec<Vec<T>> = verts.into_iter().map(|(x, _)| x).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// Affine dimension of a set of points.
    fn affine_rank(points: &[&Vec<T>]) -> usize {
        if points.len() <= 1 {
            return 0;
        }
        let base = points[0];
        let rows: Vec<Vec<T>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(x, y)| x.clone() - y.clone()).collect())
            .collect();
        Matrix::from_rows(rows).rank()
    }

    /// Canonical form: every constraint scaled to bound 1 with a positive
    /// leading coefficient, duplicates and facet-free constraints removed.
    pub fn normalized(&self) -> Self {
        if self.dim == 0 {
            return SymmetricPolytope::point();
        }
        let mut canon: Vec<Constraint<T>> = Vec::new();
        for c in &self.constraints {
            if c.a.iter().all(Zero::is_zero) {
                continue;
            }
            let lead = c.a.iter().find(|x| !x.is_zero()).expect("nonzero normal").clone();
            let scale = if lead.is_negative() { -c.b.clone() } else { c.b.clone() };
            let a: Vec<T> = c.a.iter().map(|x| x.clone() / scale.clone()).collect();
            let cand = Constraint { a, b: T::one() };
            if !canon.contains(&cand) {
                canon.push(cand);
            }
        }
        let body = SymmetricPolytope { dim: self.dim, constraints: canon, vertices: OnceLock::new() };
        let verts = body.vertices().to_vec();
        let d = self.dim;
        let kept: Vec<Constraint<T>> = body
            .constraints
            .iter()
            .filter(|c| {
                let tight: Vec<&Vec<T>> = verts.iter().filter(|v| dot(&c.a, v) == c.b).collect();
                tight.len() >= d && Self::affine_rank(&tight) == d - 1
            })
            .cloned()
            .collect();
        let mut kept = kept;
        kept.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
        let out = SymmetricPolytope { dim: d, constraints: kept, vertices: OnceLock::new() };
        let _ = out.vertices.set(verts);
        out
    }

    /// Same point set (compares canonical forms).
    pub fn equivalent(&self, other: &Self) -> bool {
        self.dim == other.dim && self.normalized().constraints == other.normalized().constraints
    }

    /// Shadow under the projection dropping the last coordinate, by
    /// Fourier-Motzkin elimination with redundancy pruning.
    pub fn project(&self) -> Result<Self> {
        if self.dim == 0 {
            return Err(Error::pre("cannot project a zero-dimensional body"));
        }
        let d = self.dim;
        if d == 1 {
            return Ok(SymmetricPolytope::point());
        }
        let mut halfspaces: Vec<(Vec<T>, T)> = Vec::new();
        for c in &self.constraints {
            halfspaces.push((c.a.clone(), c.b.clone()));
            halfspaces.push((c.a.iter().map(|x| -x.clone()).collect(), c.b.clone()));
        }
        let mut out: Vec<Constraint<T>> = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (a, b) in &halfspaces {
            let c = &a[d - 1];
            if c.is_zero() {
                out.push(Constraint { a: a[..d - 1].to_vec(), b: b.clone() });
            } else if c.is_positive() {
                pos.push((a, b));
            } else {
                neg.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let cp = ap[d - 1].clone();
                let cn = -an[d - 1].clone();
                let a: Vec<T> = (0..d - 1).map(|i| ap[i].clone() * cn.clone() + an[i].clone() * cp.clone()).collect();
                let b = (*bp).clone() * cn.clone() + (*bn).clone() * cp.clone();
                out.push(Constraint { a, b });
            }
        }
        let body = SymmetricPolytope::new(d - 1, out)?;
        Ok(body.normalized())
    }

    /// Exact volume by triangulating the boundary complex from one vertex.
    pub fn volume(&self) -> Result<T> {
        self.volume_with_limit(VOLUME_DIM_LIMIT)
    }

    pub fn volume_with_limit(&self, limit: usize) -> Result<T> {
        let d = self.dim;
        if d > limit {
            return Err(Error::DimensionLimit { dim: d, limit });
        }
        if d == 0 {
            return Ok(T::one());
        }
        let verts = self.vertices();
        let mut tight_sets: Vec<Vec<usize>> = Vec::new();
        for c in &self.constraints {
            for sign in [true, false] {
                let set: Vec<usize> = (0..verts.len())
                    .filter(|&i| {
                        let s = dot(&c.a, &verts[i]);
                        if sign {
                            s == c.b
                        } else {
                            s == -c.b.clone()
                        }
                    })
                    .collect();
                tight_sets.push(set);
            }
        }
        let all: Vec<usize> = (0..verts.len()).collect();
        let simplices = self.triangulate(&all, d, &tight_sets);
        let mut factorial = T::one();
        for k in 2..=d {
            factorial = factorial * T::from_usize(k).expect("small integer");
        }
        let mut total = T::zero();
        for s in simplices {
            let v0 = &verts[s[0]];
            let m = Matrix::from_fn(d, d, |r, c| verts[s[c + 1]][r].clone() - v0[r].clone());
            total = total + m.det().abs();
        }
        Ok(total / factorial)
    }

    fn triangulate(&self, face: &[usize], face_dim: usize, tight_sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
        if face_dim == 0 {
            return vec![vec![face[0]]];
        }
        let verts = self.vertices();
        let apex = face[0];
        let mut facets: Vec<Vec<usize>> = Vec::new();
        for tight in tight_sets {
            let g: Vec<usize> = face.iter().copied().filter(|i| tight.contains(i)).collect();
            if g.len() == face.len() || g.len() < face_dim || g.contains(&apex) || facets.contains(&g) {
                continue;
            }
            let pts: Vec<&Vec<T>> = g.iter().map(|&i| &verts[i]).collect();
            if Self::affine_rank(&pts) == face_dim - 1 {
                facets.push(g);
            }
        }
        let mut out = Vec::new();
        for g in facets {
            for mut s in self.triangulate(&g, face_dim - 1, tight_sets) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
}

impl SymmetricPolytope<Rational> {
    pub fn to_f64(&self) -> SymmetricPolytope<f64> {
        let cons = self
            .constraints
            .iter()
            .map(|c| Constraint {
                a: c.a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
                b: c.b.to_f64().unwrap_or(f64::NAN),
            })
            .collect();
        SymmetricPolytope { dim: self.dim, constraints: cons, vertices: OnceLock::new() }
    }

    /// Exact maximum of a linear functional `|<f, x>|` over the body.
    pub fn support(&self, f: &[Rational]) -> Rational {
        self.vertices()
            .iter()
            .map(|v| dot(f, v).abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Origin-centred ellipsoid `{ x : x^T Q x <= 1 }` with a certified quality
/// factor `rho`: `E` lies in the body and the body lies in `rho . E`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    pub shape: Matrix<Rational>,
    /// Exact `max_v v^T Q v` over the body's vertices, i.e. `rho^2`.
    pub rho_squared: Rational,
    pub rho: f64,
}

impl Ellipsoid {
    pub fn contains(&self, x: &[Rational]) -> bool {
        quad_form(&self.shape, x) <= Rational::one()
    }

    /// Rational upper bound on `rho`.
    pub fn rho_upper(&self) -> Rational {
        sqrt_ceil(&self.rho_squared, 1 << 20)
    }
}

pub fn quad_form<T: Scalar>(q: &Matrix<T>, x: &[T]) -> T {
    dot(x, &q.mul_vec(x))
}

/// Positive definiteness via leading principal minors (exact for rationals).
pub fn is_positive_definite(q: &Matrix<Rational>) -> bool {
    let n = q.rows();
    (1..=n).all(|k| Matrix::from_fn(k, k, |r, c| q[(r, c)].clone()).det().is_positive())
}

/// Approximate maximal-volume inscribed ellipsoid.
///
/// Runs Khachiyan's minimum-volume enclosing ellipsoid iteration on the polar
/// points `a_j / b_j` in floating point, shrinks by `1 + eps/2`, rounds to
/// rationals and checks `E in B` exactly (shrinking again if the check fails).
pub fn inscribed_ellipsoid(body: &SymmetricPolytope<Rational>, eps: f64) -> Result<Ellipsoid> {
    let d = body.dim();
    if d == 0 {
        return Err(Error::Degenerate("zero-dimensional body has no inscribed ellipsoid".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::pre("ellipsoid tolerance must lie in (0, 1/2)"));
    }
    let polar: Vec<Vec<f64>> = body
        .constraints()
        .iter()
        .map(|c| {
            let b = c.b.to_f64().unwrap_or(f64::NAN);
            c.a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / b).collect()
        })
        .collect();
    let m = polar.len();
    let mut u = vec![1.0 / m as f64; m];
    let tol = eps / 4.0;
    let df = d as f64;
    let moment = |u: &[f64]| {
        let mut x = Matrix::<f64>::zeros(d, d);
        for (w, c) in u.iter().zip(&polar) {
            for r in 0..d {
                for s in 0..d {
                    x[(r, s)] += w * c[r] * c[s];
                }
            }
        }
        x
    };
    let mut x = moment(&u);
    for _ in 0..100_000 {
        let inv = x.inverse().ok_or_else(|| Error::Degenerate("moment matrix singular".into()))?;
        let (best, kappa) = polar
            .iter()
            .map(|c| quad_form(&inv, c))
            .enumerate()
            .fold((0, f64::MIN), |acc, (j, k)| if k > acc.1 { (j, k) } else { acc });
        if kappa <= df * (1.0 + tol) {
            break;
        }
        let alpha = (kappa - df) / (df * (kappa - 1.0));
        for w in u.iter_mut() {
            *w *= 1.0 - alpha;
        }
        u[best] += alpha;
        x = moment(&u);
    }
    // Inscribed shape is Q = d X; scale so every polar point satisfies c^T Q^{-1} c <= 1.
    let inv = x.inverse().ok_or_else(|| Error::Degenerate("moment matrix singular".into()))?;
    let kmax = polar.iter().map(|c| quad_form(&inv, c)).fold(0.0, f64::max);
    let mut scale = kmax.max(df) * (1.0 + eps / 2.0) * (1.0 + eps / 2.0);
    for _ in 0..60 {
        let q = Matrix::from_fn(d, d, |r, c| {
            let v = x[(r, c)] * scale;
            rational_from_f64_trunc(v, 1 << 40)
        });
        let q = Matrix::from_fn(d, d, |r, c| {
            if r <= c {
                q[(r, c)].clone()
            } else {
                q[(c, r)].clone()
            }
        });
        if is_positive_definite(&q) {
            if let Some(qinv) = q.inverse() {
                let inside = body.constraints().iter().all(|c| {
                    let cc: Vec<Rational> = c.a.iter().map(|a| a / &c.b).collect();
                    quad_form(&qinv, &cc) <= Rational::one()
                });
                if inside {
                    let rho_squared = body
                        .vertices()
                        .iter()
                        .map(|v| quad_form(&q, v))
                        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
                    let rho = rho_squared.to_f64().unwrap_or(f64::NAN).sqrt();
                    return Ok(Ellipsoid { shape: q, rho_squared, rho });
                }
            }
        }
        scale *= 1.0 + eps / 64.0;
    }
    Err(Error::Degenerate("could not certify an inscribed ellipsoid".into()))
}

pub fn rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(Int::from(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn square(w: i64) -> SymmetricPolytope<Rational> {
        SymmetricPolytope::cuboid(&[rat(w, 1), rat(w, 1)]).unwrap()
    }

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                if n - i < k - cur.len() {
                    break;
                }
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::new(), &mut out);
        out
    }

    /// Every vertex as the solution of `d` tight constraints.
    fn brute_vertices(p: &SymmetricPolytope<Rational>) -> Vec<Vec<Rational>> {
        let d = p.dim();
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for subset in subsets(p.constraints().len(), d) {
            let a = Matrix::from_rows(subset.iter().map(|&j| p.constraints()[j].a.clone()).collect());
            let Some(inv) = a.inverse() else { continue };
            for signs in 0..(1usize << d) {
                let rhs: Vec<Rational> = subset
                    .iter()
                    .enumerate()
                    .map(|(k, &j)| if signs >> k & 1 == 1 { -p.constraints()[j].b.clone() } else { p.constraints()[j].b.clone() })
                    .collect();
                let x = inv.mul_vec(&rhs);
                if p.contains(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    proptest::proptest! {
        #[test]
        fn vertices_match_brute_force(
            d in 1usize..4,
            rows in proptest::collection::vec((proptest::collection::vec(-3i64..=3, 3), 1i64..=6), 0..5),
        ) {
            let mut cons: Vec<Constraint<Rational>> = (0..d)
                .map(|i| Constraint { a: (0..d).map(|k| rat((k == i) as i64, 1)).collect(), b: rat(4, 1) })
                .collect();
            for (a, b) in rows {
                let a: Vec<Rational> = a[..d].iter().map(|&x| rat(x, 1)).collect();
                if a.iter().any(|x| !x.is_zero()) {
                    cons.push(Constraint { a, b: rat(b, 1) });
                }
            }
            let p = SymmetricPolytope::new(d, cons).unwrap();
            let mut fast = p.vertices().to_vec();
            fast.sort();
            proptest::prop_assert_eq!(fast, brute_vertices(&p));
        }
    }

    fn hexagon() -> SymmetricPolytope<Rational> {
        SymmetricPolytope::new(
            2,
            vec![
                Constraint { a: rational_vec(&[1, 0]), b: rat(2, 1) },
                Constraint { a: rational_vec(&[0, 1]), b: rat(3, 2) },
                Constraint { a: rational_vec(&[1, 1]), b: rat(3, 1) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(square(1).contains(&rational_vec(&[1, 1])));
        assert!(!SymmetricPolytope::cross_polytope(2, rat(1, 1)).unwrap().contains(&rational_vec(&[1, 1])));
        assert!(square(1).contains(&rational_vec(&[-1, 0])));
    }

    #[test]
    fn unbounded_rejected() {
        let err = SymmetricPolytope::new(2, vec![Constraint { a: rational_vec(&[1, 0]), b: rat(1, 1) }]);
        assert!(matches!(err, Err(Error::Degenerate(_))));
        let err = SymmetricPolytope::new(1, vec![Constraint { a: rational_vec(&[1]), b: rat(0, 1) }]);
        assert!(err.is_err());
    }

    #[test]
    fn dilate_and_identity_transform() {
        assert_eq!(square(1).dilate(&rat(2, 1)).unwrap().normalized(), square(2).normalized());
        let id = Matrix::<Rational>::identity(2);
        assert_eq!(square(1).transform(&id).unwrap(), square(1));
        assert!(square(1).dilate(&rat(0, 1)).is_err());
    }

    #[test]
    fn transform_moves_vertices() {
        let u = Matrix::from_rows(vec![rational_vec(&[2, 1]), rational_vec(&[1, 1])]);
        let img = hexagon().transform(&u).unwrap();
        let mut expected: Vec<Vec<Rational>> = hexagon().vertices().iter().map(|v| u.mul_vec(v)).collect();
        expected.sort();
        assert_eq!(img.vertices(), &expected[..]);
    }

    #[test]
    fn vertices_of_square_and_hexagon() {
        assert_eq!(square(1).vertices().len(), 4);
        assert_eq!(hexagon().vertices().len(), 6);
        assert_eq!(SymmetricPolytope::<Rational>::point().vertices().len(), 1);
    }

    #[test]
    fn projection_examples() {
        let unit = SymmetricPolytope::cuboid(&[rat(1, 1)]).unwrap();
        assert!(square(1).project().unwrap().equivalent(&unit));
        let c = SymmetricPolytope::cross_polytope(2, rat(1, 1)).unwrap().project().unwrap();
        assert!(c.equivalent(&unit));
        assert!(hexagon().project().unwrap().equivalent(&SymmetricPolytope::cuboid(&[rat(2, 1)]).unwrap()));
        assert_eq!(SymmetricPolytope::cuboid(&[rat(1, 1)]).unwrap().project().unwrap().dim(), 0);
    }

    #[test]
    fn normalization_drops_redundant_constraints() {
        let b = SymmetricPolytope::new(
            2,
            vec![
                Constraint { a: rational_vec(&[1, 0]), b: rat(1, 1) },
                Constraint { a: rational_vec(&[0, 2]), b: rat(2, 1) },
                Constraint { a: rational_vec(&[1, 1]), b: rat(5, 1) },
                Constraint { a: rational_vec(&[-3, 0]), b: rat(3, 1) },
            ],
        )
        .unwrap();
        assert_eq!(b.normalized().constraints().len(), 2);
    }

    #[test]
    fn volume_examples() {
        for d in 1..=4usize {
            let cube = SymmetricPolytope::cuboid(&vec![rat(1, 1); d]).unwrap();
            assert_eq!(cube.volume().unwrap(), rat(1 << d, 1));
        }
        assert_eq!(SymmetricPolytope::cross_polytope(2, rat(1, 1)).unwrap().volume().unwrap(), rat(2, 1));
        assert_eq!(SymmetricPolytope::cross_polytope(3, rat(1, 1)).unwrap().volume().unwrap(), rat(4, 3));
        // hexagon: square [-2,2]x[-3/2,3/2] minus two corner triangles with legs 1/2
        assert_eq!(hexagon().volume().unwrap(), rat(12, 1) - rat(1, 4));
        let big = SymmetricPolytope::cuboid(&vec![rat(1, 1); 5]).unwrap();
        assert!(matches!(big.volume(), Err(Error::DimensionLimit { .. })));
    }

    #[test]
    fn ellipsoid_in_square_is_near_disk() {
        let eps = 0.02;
        let e = inscribed_ellipsoid(&square(1), eps).unwrap();
        assert!(e.rho <= (1.0 + eps) * 2f64.sqrt());
        for v in square(1).vertices() {
            assert!(quad_form(&e.shape, v) <= e.rho_squared);
        }
        let q00 = e.shape[(0, 0)].to_f64().unwrap();
        assert!((q00 - 1.0).abs() < 0.1, "{q00}");
    }

    #[test]
    fn ellipsoid_in_hexagon_certified() {
        let e = inscribed_ellipsoid(&hexagon(), 0.05).unwrap();
        for c in hexagon().constraints() {
            let cc: Vec<Rational> = c.a.iter().map(|a| a / &c.b).collect();
            assert!(quad_form(&e.shape.inverse().unwrap(), &cc) <= Rational::one());
        }
        assert!(e.rho <= 1.05 * 2f64.sqrt());
    }
}
