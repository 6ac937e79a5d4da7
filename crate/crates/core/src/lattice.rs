//! Exact lattice algebra: Hermite normal form, primitive vectors, basis
//! completion, LLL reduction under a quadratic form and lattice-point
//! enumeration in symmetric polytopes.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::convex::SymmetricPolytope;
use crate::error::{Error, Result};
use crate::group::{AmbientGroup, GroupElement};
use crate::linalg::{dot, int_to_rational, rational_to_int, Matrix};
use crate::scalar::{ceil, floor, Int, Rational, Scalar};

/// LLL parameter.
pub const LLL_DELTA: (i64, i64) = (99, 100);

/// Full-rank lattice in `R^d`; the columns of `basis` are the basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<T: Scalar> {
    basis: Matrix<T>,
}

impl<T: Scalar> Lattice<T> {
    pub fn new(basis: Matrix<T>) -> Result<Self> {
        if basis.rows() != basis.cols() {
            return Err(Error::Degenerate("lattice basis must be square".into()));
        }
        if basis.rows() > 0 && basis.det().is_zero() {
            return Err(Error::Degenerate("lattice basis is singular".into()));
        }
        Ok(Lattice { basis })
    }

    /// `Z^d`.
    pub fn standard(d: usize) -> Self {
        Lattice { basis: Matrix::identity(d) }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn covolume(&self) -> T {
        if self.dim() == 0 {
            T::one()
        } else {
            self.basis.det().abs()
        }
    }
}

impl Lattice<Rational> {
    pub fn scaled_standard(d: usize, k: i64) -> Self {
        Lattice { basis: Matrix::identity(d).map(|x: &Rational| x * Rational::from_integer(Int::from(k))) }
    }

    pub fn is_standard(&self) -> bool {
        self.basis.is_identity()
    }

    /// Integer coordinates of `x` in the basis, if `x` is a lattice point.
    pub fn coefficients(&self, x: &[Rational]) -> Option<Vec<Int>> {
        let c = self.basis.solve(x)?;
        c.iter().all(|v| v.is_integer()).then(|| c.iter().map(|v| v.to_integer()).collect())
    }

    pub fn point(&self, coeffs: &[Int]) -> Vec<Rational> {
        let c: Vec<Rational> = coeffs.iter().map(|n| Rational::from_integer(n.clone())).collect();
        self.basis.mul_vec(&c)
    }
}

/// Column Hermite normal form: returns `(H, U)` with `M U = H`, `U` unimodular,
/// `H` lower echelon with positive pivots and entries left of each pivot
/// reduced into `[0, pivot)`. Zero columns of a rank-deficient `M` end up last.
pub fn hnf(m: &Matrix<Int>) -> (Matrix<Int>, Matrix<Int>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = Matrix::<Int>::identity(cols);
    let mut k = 0;
    for i in 0..rows {
        if k == cols {
            break;
        }
        for j in k + 1..cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            let x = h[(i, k)].clone();
            let y = h[(i, j)].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (p, q) = (-(&y / &g), &x / &g);
            column_combine(&mut h, k, j, &s, &t, &p, &q);
            column_combine(&mut u, k, j, &s, &t, &p, &q);
        }
        if h[(i, k)].is_zero() {
            continue;
        }
        if h[(i, k)].is_negative() {
            negate_column(&mut h, k);
            negate_column(&mut u, k);
        }
        let pivot = h[(i, k)].clone();
        for j in 0..k {
            let f = h[(i, j)].div_floor(&pivot);
            if !f.is_zero() {
                add_column_multiple(&mut h, j, k, &(-&f));
                add_column_multiple(&mut u, j, k, &(-&f));
            }
        }
        k += 1;
    }
    (h, u)
}

/// `(col_a, col_b) <- (s col_a + t col_b, p col_a + q col_b)`.
fn column_combine(m: &mut Matrix<Int>, a: usize, b: usize, s: &Int, t: &Int, p: &Int, q: &Int) {
    for r in 0..m.rows() {
        let x = m[(r, a)].clone();
        let y = m[(r, b)].clone();
        m[(r, a)] = s * &x + t * &y;
        m[(r, b)] = p * &x + q * &y;
    }
}

fn negate_column(m: &mut Matrix<Int>, c: usize) {
    for r in 0..m.rows() {
        m[(r, c)] = -m[(r, c)].clone();
    }
}

/// `col_dst += f * col_src`.
fn add_column_multiple(m: &mut Matrix<Int>, dst: usize, src: usize, f: &Int) {
    for r in 0..m.rows() {
        let v = &m[(r, src)] * f;
        m[(r, dst)] += v;
    }
}

/// Splits an integer vector as `n * y'` with `y'` primitive (content 1).
pub fn primitive_factor_coeffs(y: &[Int]) -> Result<(Int, Vec<Int>)> {
    let n = y.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if n.is_zero() {
        return Err(Error::pre("cannot factor the zero vector"));
    }
    Ok((n.clone(), y.iter().map(|x| x / &n).collect()))
}

/// `y = n y'` with `y'` primitive in `lattice`.
pub fn primitive_factor(y: &[Rational], lattice: &Lattice<Rational>) -> Result<(Int, Vec<Rational>)> {
    let coeffs = lattice.coefficients(y).ok_or_else(|| Error::pre("vector is not in the lattice"))?;
    let (n, prim) = primitive_factor_coeffs(&coeffs)?;
    Ok((n, lattice.point(&prim)))
}

/// Result of extending a primitive vector to a lattice basis.
#[derive(Clone, Debug)]
pub struct CompletedBasis {
    /// New basis with the primitive vector as last column.
    pub basis: Matrix<Rational>,
    /// Unimodular `U` with `basis = old_basis * U`; its last column is the
    /// coefficient vector of the primitive vector.
    pub change: Matrix<Int>,
    /// `U^{-1}`: maps old coefficients to new ones, sending `y'` to `e_d`.
    pub normalizer: Matrix<Int>,
    /// Spanning vectors of the complement `Gamma'` (the first `d-1` columns).
    pub complement: Matrix<Rational>,
}

/// Unimodular integer matrix whose last column is the primitive vector `c`.
pub fn complete_coefficients(c: &[Int]) -> Result<Matrix<Int>> {
    let d = c.len();
    let row = Matrix::from_rows(vec![c.to_vec()]);
    let (h, w) = hnf(&row);
    if !h[(0, 0)].is_one() {
        return Err(Error::NotPrimitive(h[(0, 0)].to_string()));
    }
    // c^T W = e_1^T, so c is the first column of W^{-T}.
    let winv_t = rational_to_int(&int_to_rational(&w).inverse().expect("unimodular")).expect("integral inverse").transpose();
    let mut u = winv_t;
    for j in 0..d.saturating_sub(1) {
        u.swap_cols(j, j + 1);
    }
    Ok(u)
}

pub fn complete_basis(y_prime: &[Rational], lattice: &Lattice<Rational>) -> Result<CompletedBasis> {
    let coeffs = lattice.coefficients(y_prime).ok_or_else(|| Error::pre("vector is not in the lattice"))?;
    let (n, _) = primitive_factor_coeffs(&coeffs)?;
    if !n.is_one() {
        return Err(Error::NotPrimitive(n.to_string()));
    }
    let change = complete_coefficients(&coeffs)?;
    let basis = lattice.basis().mul(&int_to_rational(&change));
    let normalizer = rational_to_int(&int_to_rational(&change).inverse().expect("unimodular")).expect("integral inverse");
    let d = lattice.dim();
    let complement = basis.take_cols(d - 1);
    Ok(CompletedBasis { basis, change, normalizer, complement })
}

/// Output of [`reduced_basis`].
#[derive(Clone, Debug)]
pub struct ReducedBasisReport {
    /// Reduced basis vectors as columns.
    pub basis: Matrix<Rational>,
    /// Unimodular `U` with `basis = old_basis * U`.
    pub change: Matrix<Int>,
    /// Squared lengths `v_i^T G v_i`.
    pub squared_lengths: Vec<Rational>,
    /// `(prod |v_i|)^2 / covolume^2`, both measured in the form `G`.
    pub defect_squared: Rational,
    pub orthogonality_defect: f64,
}

impl ReducedBasisReport {
    /// The LLL guarantee `2^{d(d-1)/4}` for the orthogonality defect.
    pub fn lll_bound(d: usize) -> f64 {
        2f64.powf((d * d.saturating_sub(1)) as f64 / 4.0)
    }
}

fn gram_schmidt(b: &[Vec<Rational>], g: &Matrix<Rational>) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let d = b.len();
    let mut mu = vec![vec![Rational::zero(); d]; d];
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(d);
    let mut norms: Vec<Rational> = Vec::with_capacity(d);
    for i in 0..d {
        let mut v = b[i].clone();
        for j in 0..i {
            let m = dot(&b[i], &g.mul_vec(&star[j])) / &norms[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &m * y;
            }
            mu[i][j] = m;
        }
        norms.push(dot(&v, &g.mul_vec(&v)));
        star.push(v);
    }
    (mu, norms)
}

/// LLL reduction (parameter 0.99) of the lattice basis in the inner product
/// `<x, y> = x^T G y`.
pub fn reduced_basis(lattice: &Lattice<Rational>, gram: &Matrix<Rational>) -> Result<ReducedBasisReport> {
    let d = lattice.dim();
    if gram.rows() != d || gram.cols() != d || !crate::convex::is_positive_definite(gram) {
        return Err(Error::pre("quadratic form is not positive definite"));
    }
    let delta = Rational::new(Int::from(LLL_DELTA.0), Int::from(LLL_DELTA.1));
    let mut b: Vec<Vec<Rational>> = lattice.basis().columns();
    let mut u: Vec<Vec<Int>> = Matrix::<Int>::identity(d).columns();
    let mut k = 1;
    while k < d {
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&b, gram);
            let q = round(&mu[k][j]);
            if !q.is_zero() {
                let qr = Rational::from_integer(q.clone());
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &qr * y;
                }
                let uj = u[j].clone();
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= &q * y;
                }
            }
        }
        let (mu, norms) = gram_schmidt(&b, gram);
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    let basis = Matrix::from_columns(d, &b);
    let change = Matrix::from_columns(d, &u);
    let squared_lengths: Vec<Rational> = b.iter().map(|v| dot(v, &gram.mul_vec(v))).collect();
    let covol_sq = if d == 0 { Rational::one() } else { basis.transpose().mul(gram).mul(&basis).det() };
    let prod = squared_lengths.iter().fold(Rational::one(), |a, x| a * x);
    let defect_squared = prod / covol_sq;
    let orthogonality_defect = defect_squared.to_f64().unwrap_or(f64::INFINITY).sqrt();
    Ok(ReducedBasisReport { basis, change, squared_lengths, defect_squared, orthogonality_defect })
}

fn round(x: &Rational) -> Int {
    floor(&(x + Rational::new(Int::one(), Int::from(2))))
}

/// Integer points of a body given in coefficient coordinates of `Z^d`, in
/// lexicographic order, by recursive coordinate bounding over the chain of
/// Fourier-Motzkin shadows.
pub fn integer_points(body: &SymmetricPolytope<Rational>, cap: usize) -> Result<Vec<Vec<Int>>> {
    let mut out = Vec::new();
    for_each_integer_point(body, cap, |p| {
        out.push(p.to_vec());
        true
    })?;
    Ok(out)
}

/// Calls `f` on the integer points of `body` in lexicographic order until it
/// returns `false`; errors once more than `cap` points have been visited.
pub fn for_each_integer_point(body: &SymmetricPolytope<Rational>, cap: usize, mut f: impl FnMut(&[Int]) -> bool) -> Result<()> {
    let d = body.dim();
    if d == 0 {
        f(&[]);
        return Ok(());
    }
    // shadows[k] lives in the first k+1 coordinates.
    let mut shadows = vec![body.normalized()];
    for _ in 1..d {
        let next = shadows.last().expect("nonempty").project()?;
        shadows.push(next);
    }
    shadows.reverse();
    let mut prefix: Vec<Int> = Vec::with_capacity(d);
    let mut visit = Visit { f: &mut f, seen: 0, cap, stopped: false };
    enumerate_level(&shadows, &mut prefix, &mut visit)
}

struct Visit<'a, F> {
    f: &'a mut F,
    seen: usize,
    cap: usize,
    stopped: bool,
}

fn enumerate_level<F: FnMut(&[Int]) -> bool>(
    shadows: &[SymmetricPolytope<Rational>],
    prefix: &mut Vec<Int>,
    visit: &mut Visit<'_, F>,
) -> Result<()> {
    let k = prefix.len();
    let body = &shadows[k];
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for c in body.constraints() {
        let fixed: Rational = c.a[..k].iter().zip(prefix.iter()).map(|(a, x)| a * Rational::from_integer(x.clone())).sum();
        let coef = &c.a[k];
        if coef.is_zero() {
            if fixed.abs() > c.b {
                return Ok(());
            }
            continue;
        }
        // -b <= fixed + coef x <= b
        let (a, b) = ((-&c.b - &fixed) / coef, (&c.b - &fixed) / coef);
        let (l, h) = if a <= b { (a, b) } else { (b, a) };
        lo = Some(match lo {
            Some(v) if v >= l => v,
            _ => l,
        });
        hi = Some(match hi {
            Some(v) if v <= h => v,
            _ => h,
        });
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::Degenerate("unbounded coordinate during enumeration".into()));
    };
    let mut x = ceil(&lo);
    let top = floor(&hi);
    while x <= top && !visit.stopped {
        prefix.push(x.clone());
        if k + 1 == shadows.len() {
            visit.seen += 1;
            if visit.seen > visit.cap {
                return Err(Error::cap("lattice points in body", visit.cap));
            }
            visit.stopped = !(visit.f)(prefix);
        } else {
            enumerate_level(shadows, prefix, visit)?;
        }
        prefix.pop();
        x += 1;
    }
    Ok(())
}

/// Axis-aligned fallback: scan the bounding box and filter by membership.
pub fn integer_points_box_scan(body: &SymmetricPolytope<Rational>, cap: usize) -> Result<Vec<Vec<Int>>> {
    let d = body.dim();
    if d == 0 {
        return Ok(vec![vec![]]);
    }
    let bounds: Vec<Int> = (0..d)
        .map(|i| {
            let m = body.vertices().iter().map(|v| v[i].abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a });
            floor(&m)
        })
        .collect();
    let mut volume = Int::one();
    for b in &bounds {
        volume *= Int::from(2) * b + 1;
    }
    if volume > Int::from(cap).max(Int::one()) * Int::from(64) {
        return Err(Error::cap("bounding box scan", cap));
    }
    let mut out = Vec::new();
    let mut cur: Vec<Int> = bounds.iter().map(|b| -b).collect();
    loop {
        let q: Vec<Rational> = cur.iter().map(|x| Rational::from_integer(x.clone())).collect();
        if body.contains(&q) {
            out.push(cur.clone());
            if out.len() > cap {
                return Err(Error::cap("lattice points in body", cap));
            }
        }
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
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

/// Points of `B ∩ Γ`, in lexicographic order of their coefficient vectors.
pub fn enumerate_points(
    body: &SymmetricPolytope<Rational>,
    lattice: &Lattice<Rational>,
    cap: usize,
) -> Result<Vec<Vec<Rational>>> {
    if body.dim() != lattice.dim() {
        return Err(Error::pre("body and lattice dimensions differ"));
    }
    let pulled = if body.dim() == 0 { body.clone() } else { body.pullback(lattice.basis())? };
    Ok(integer_points(&pulled, cap)?.iter().map(|c| lattice.point(c)).collect())
}

/// Canonical basis (column HNF, zero columns dropped) of the preimage in
/// `Z^{r+s}` of the subgroup generated by `gens`, torsion relations included.
/// Two generating sets span the same subgroup iff these matrices agree.
pub fn subgroup_lattice(group: &AmbientGroup, gens: &[GroupElement]) -> Matrix<Int> {
    let n = group.coord_len();
    let mut cols: Vec<Vec<Int>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    for (j, m) in group.moduli().iter().enumerate() {
        let mut c = vec![Int::zero(); n];
        c[group.free_rank() + j] = m.clone();
        cols.push(c);
    }
    if cols.is_empty() {
        return Matrix::zeros(n, 0);
    }
    let (h, _) = hnf(&Matrix::from_columns(n, &cols));
    let rank = (0..h.cols()).take_while(|&c| h.col(c).iter().any(|x| !x.is_zero())).count();
    h.take_cols(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{rational_vec, Constraint};
    use crate::linalg::int_det;
    use crate::scalar::{int, rat};

    fn imat(rows: Vec<Vec<i64>>) -> Matrix<Int> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(Int::from).collect()).collect())
    }

    #[test]
    fn hnf_examples() {
        let id = imat(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(hnf(&id).0, id);
        let d = imat(vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(hnf(&d).0, d);
        // columns (2,0) and (2,2)
        let m = imat(vec![vec![2, 2], vec![0, 2]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, imat(vec![vec![2, 0], vec![0, 2]]));
        assert_eq!(m.mul(&u), h);
        assert_eq!(int_det(&u).abs(), int(1));
    }

    #[test]
    fn hnf_rank_deficient() {
        let m = imat(vec![vec![2, 4, 6], vec![1, 2, 3]]);
        let (h, u) = hnf(&m);
        assert_eq!(m.mul(&u), h);
        assert!(h.col(1).iter().all(Zero::is_zero) && h.col(2).iter().all(Zero::is_zero));
        assert_eq!(int_det(&u).abs(), int(1));
    }

    #[test]
    fn primitive_factor_examples() {
        let z2 = Lattice::standard(2);
        assert_eq!(primitive_factor(&rational_vec(&[2, 4]), &z2).unwrap(), (int(2), rational_vec(&[1, 2])));
        assert_eq!(primitive_factor(&rational_vec(&[3, 5]), &z2).unwrap(), (int(1), rational_vec(&[3, 5])));
        assert_eq!(primitive_factor(&rational_vec(&[0, 6]), &z2).unwrap(), (int(6), rational_vec(&[0, 1])));
        assert!(primitive_factor(&rational_vec(&[0, 0]), &z2).is_err());
        assert!(primitive_factor(&[rat(1, 2), rat(0, 1)], &z2).is_err());
    }

    #[test]
    fn complete_basis_examples() {
        let z2 = Lattice::standard(2);
        let c = complete_basis(&rational_vec(&[1, 0]), &z2).unwrap();
        assert_eq!(c.basis.col(1), rational_vec(&[1, 0]));
        assert_eq!(c.basis.det().abs(), rat(1, 1));
        let c = complete_basis(&rational_vec(&[2, 3]), &z2).unwrap();
        assert_eq!(c.basis.col(1), rational_vec(&[2, 3]));
        assert_eq!(c.basis.det().abs(), rat(1, 1));
        assert_eq!(c.normalizer.mul_vec(&[int(2), int(3)]), vec![int(0), int(1)]);
        assert!(matches!(complete_basis(&rational_vec(&[2, 4]), &z2), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn lll_examples() {
        let id = Matrix::<Rational>::identity(2);
        let r = reduced_basis(&Lattice::standard(2), &id).unwrap();
        assert_eq!(r.defect_squared, rat(1, 1));
        let skew = Lattice::new(Matrix::from_rows(vec![rational_vec(&[1, 10]), rational_vec(&[0, 1])])).unwrap();
        let r = reduced_basis(&skew, &id).unwrap();
        assert_eq!(r.defect_squared, rat(1, 1));
        assert_eq!(int_det(&r.change).abs(), int(1));
        let b = Lattice::new(Matrix::from_rows(vec![
            rational_vec(&[7, 3, -5]),
            rational_vec(&[2, 9, 4]),
            rational_vec(&[-6, 1, 8]),
        ]))
        .unwrap();
        let r = reduced_basis(&b, &Matrix::identity(3)).unwrap();
        assert!(r.orthogonality_defect <= ReducedBasisReport::lll_bound(3));
        assert_eq!(b.basis().mul(&int_to_rational(&r.change)), r.basis);
        let bad = Matrix::from_rows(vec![rational_vec(&[1, 0]), rational_vec(&[0, -1])]);
        assert!(reduced_basis(&Lattice::standard(2), &bad).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let b = SymmetricPolytope::cuboid(&[rat(3, 2), rat(3, 2)]).unwrap();
        assert_eq!(enumerate_points(&b, &Lattice::standard(2), 100).unwrap().len(), 9);
        let disk_ish = SymmetricPolytope::cross_polytope(2, rat(1, 1)).unwrap();
        let pts = enumerate_points(&disk_ish, &Lattice::scaled_standard(2, 2), 100).unwrap();
        assert_eq!(pts, vec![rational_vec(&[0, 0])]);
        assert!(enumerate_points(&b, &Lattice::standard(2), 5).is_err());
    }

    #[test]
    fn enumeration_matches_box_scan_on_slanted_body() {
        let b = SymmetricPolytope::new(
            3,
            vec![
                Constraint { a: rational_vec(&[1, 2, 0]), b: rat(7, 2) },
                Constraint { a: rational_vec(&[0, 1, -1]), b: rat(2, 1) },
                Constraint { a: rational_vec(&[3, 0, 1]), b: rat(5, 1) },
                Constraint { a: rational_vec(&[1, 1, 1]), b: rat(3, 1) },
            ],
        )
        .unwrap();
        let fp = integer_points(&b, 10_000).unwrap();
        let scan = integer_points_box_scan(&b, 10_000).unwrap();
        assert_eq!(fp, scan);
        for p in &fp {
            let neg: Vec<Int> = p.iter().map(|x| -x).collect();
            assert!(fp.contains(&neg));
        }
    }
}
