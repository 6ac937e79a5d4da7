//! John-type theorems: the discrete John theorem for lattices, rank reduction
//! of improper convex coset progressions, and properization of coset
//! progressions from the inside and from the outside.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::convex::{inscribed_ellipsoid, SymmetricPolytope, VOLUME_DIM_LIMIT};
use crate::error::{Error, Result};
use crate::group::{AmbientGroup, FiniteSet, FiniteSubgroup, GroupElement};
use crate::lattice::{complete_coefficients, for_each_integer_point, integer_points, primitive_factor_coeffs, reduced_basis, Lattice};
use crate::linalg::{int_to_rational, rational_to_int, Matrix};
use crate::progression::{
    for_each_in_box, relation_lattice, CollisionScan, image, is_proper, CosetProgression, Gap, PropernessResult, Representation,
};
use crate::scalar::{floor, pow_rational, sqrt_ceil, Int, Rational};

/// Tolerance handed to the inscribed-ellipsoid routine.
pub const ELLIPSOID_EPS: f64 = 0.1;

/// Constant substituted for the `O(.)` in the published bounds when checking
/// run-certified factors.
pub const BOUND_CONSTANT: f64 = 16.0;

fn half() -> Rational {
    Rational::new(Int::one(), Int::from(2))
}

fn q(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

/// `phi(B ∩ Γ) + H`, with `phi` given by the images of the lattice basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexCosetProgression {
    body: SymmetricPolytope<Rational>,
    lattice: Lattice<Rational>,
    phi: Vec<GroupElement>,
    symmetry_group: FiniteSubgroup,
}

impl ConvexCosetProgression {
    pub fn new(
        body: SymmetricPolytope<Rational>,
        lattice: Lattice<Rational>,
        phi: Vec<GroupElement>,
        symmetry_group: FiniteSubgroup,
    ) -> Result<Self> {
        if body.dim() != lattice.dim() || phi.len() != body.dim() {
            return Err(Error::pre("body, lattice and homomorphism dimensions differ"));
        }
        if phi.iter().any(|v| !symmetry_group.group().contains(v)) {
            return Err(Error::GroupMismatch);
        }
        Ok(ConvexCosetProgression { body, lattice, phi, symmetry_group })
    }

    pub fn rank(&self) -> usize {
        self.body.dim()
    }

    pub fn group(&self) -> &AmbientGroup {
        self.symmetry_group.group()
    }

    pub fn body(&self) -> &SymmetricPolytope<Rational> {
        &self.body
    }

    pub fn lattice(&self) -> &Lattice<Rational> {
        &self.lattice
    }

    pub fn phi(&self) -> &[GroupElement] {
        &self.phi
    }

    pub fn symmetry_group(&self) -> &FiniteSubgroup {
        &self.symmetry_group
    }

    pub fn dilate(&self, t: &Rational) -> Result<Self> {
        Ok(ConvexCosetProgression { body: self.body.dilate(t)?, ..self.clone() })
    }

    /// Same progression expressed in lattice coordinates, so that `Γ = Z^d`.
    pub fn normalized(&self) -> Result<Self> {
        if self.lattice.is_standard() || self.rank() == 0 {
            return Ok(self.clone());
        }
        let body = self.body.pullback(self.lattice.basis())?;
        Ok(ConvexCosetProgression { body, lattice: Lattice::standard(self.rank()), ..self.clone() })
    }

    /// Lattice coordinates of the points of `(t B) ∩ Γ`, lexicographically.
    pub fn points(&self, t: &Rational, cap: usize) -> Result<Vec<Vec<Int>>> {
        let n = self.normalized()?;
        integer_points(&n.body.dilate(t)?, cap)
    }

    pub fn evaluate(&self, coeffs: &[Int]) -> GroupElement {
        self.group().combine(coeffs, &self.phi)
    }

    pub fn image(&self, t: &Rational, cap: usize) -> Result<FiniteSet> {
        let g = self.group();
        let mut out = std::collections::HashSet::new();
        for n in self.points(t, cap)? {
            let base = self.evaluate(&n);
            for h in self.symmetry_group.elements().iter() {
                out.insert(g.add(&base, h));
            }
            if out.len() > cap {
                return Err(Error::cap("convex progression image", cap));
            }
        }
        Ok(FiniteSet::from_hash(g.clone(), out))
    }

    pub fn is_proper(&self, t: &Rational, cap: usize) -> Result<PropernessResult> {
        if let Some(r) = self.relation_scan(t, cap)? {
            return Ok(r);
        }
        let n = self.normalized()?;
        let mut scan = CollisionScan::new(self.group(), &self.phi, &self.symmetry_group, cap);
        let mut err = None;
        for_each_integer_point(&n.body.dilate(t)?, cap, |p| match scan.push(p) {
            Ok(more) => more,
            Err(e) => {
                err = Some(e);
                false
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(scan.finish())
    }
}

impl ConvexCosetProgression {
    /// Decides properness from the relation lattice `K = { y : phi(y) in H }`
    /// when possible: a nonzero `y` in `tB ∩ K` gives the collision
    /// `(y, 0) ~ (0, phi(y))`, and `2tB ∩ K = {0}` rules out collisions since
    /// differences of points of `tB` lie in `2tB`.
    fn relation_scan(&self, t: &Rational, cap: usize) -> Result<Option<PropernessResult>> {
        let g = self.group();
        let k = relation_lattice(g, &self.phi, &self.symmetry_group);
        let proper = Some(PropernessResult { proper: true, witness: None });
        if k.cols() == 0 {
            return Ok(proper);
        }
        let n = self.normalized()?;
        let k_rat = k.map(|x| Rational::from_integer(x.clone()));
        let nonzero = |s: &Rational| -> Result<Option<Vec<Int>>> {
            let pulled = n.body.dilate(s)?.pullback(&k_rat)?;
            let mut found = None;
            for_each_integer_point(&pulled, cap, |c| {
                if c.iter().any(|x| !x.is_zero()) {
                    found = Some(c.to_vec());
                }
                found.is_none()
            })?;
            Ok(found)
        };
        if let Some(c) = nonzero(t)? {
            let y = k.mul_vec(&c);
            let h = self.evaluate(&y);
            let zero = vec![Int::from(0); y.len()];
            let witness = (Representation { coeffs: y, h: g.zero() }, Representation { coeffs: zero, h });
            return Ok(Some(PropernessResult { proper: false, witness: Some(witness) }));
        }
        if nonzero(&(t * q(2)))?.is_none() {
            return Ok(proper);
        }
        Ok(None)
    }
}

/// Box body, standard lattice, `phi(e_i) = v_i`, same symmetry group.
pub fn to_convex(p: &CosetProgression) -> ConvexCosetProgression {
    let body = if p.rank() == 0 {
        SymmetricPolytope::point()
    } else {
        SymmetricPolytope::cuboid(p.dims()).expect("positive dimensions")
    };
    ConvexCosetProgression {
        body,
        lattice: Lattice::standard(p.rank()),
        phi: p.steps().to_vec(),
        symmetry_group: p.symmetry_group().clone(),
    }
}

/// How the inclusions of a certificate were established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMethod {
    ExactEnumeration,
    Structural,
}

/// Two-sided inclusion data. The meaning of the two factors is fixed by the
/// producing operation and documented there.
#[derive(Clone, Debug, PartialEq)]
pub struct InclusionCert {
    pub inner_factor: Rational,
    pub outer_factor: Rational,
    pub checked_dilations: Vec<Rational>,
    pub method: CheckMethod,
}

/// `Some(sub ⊆ sup)`, or `None` if either side is over budget.
fn subset_under_cap(sub: Result<FiniteSet>, sup: Result<FiniteSet>) -> Result<Option<bool>> {
    match (sub, sup) {
        (Ok(a), Ok(b)) => Ok(Some(a.is_subset(&b))),
        (Err(Error::CapExceeded { .. }), _) | (_, Err(Error::CapExceeded { .. })) => Ok(None),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Everything recorded about one rank reduction step.
#[derive(Clone, Debug)]
pub struct RankReductionTrace {
    pub collision: (Representation, Representation),
    /// `y = x - x'`, a nonzero lattice point of `B` with `phi(y) in H`.
    pub y: Vec<Int>,
    /// Content of `y`: `y = content * y'`.
    pub content: Int,
    pub y_prime: Vec<Int>,
    /// Least `n >= 1` with `n phi(y') in H`.
    pub torsion_order: Int,
    /// Unimodular `U` whose last column is `y'`.
    pub change: Matrix<Int>,
    /// `U^{-1}`, sending `y'` to `e_d`.
    pub normalizer: Matrix<Int>,
    pub projected_body: SymmetricPolytope<Rational>,
    pub new_symmetry_group: FiniteSubgroup,
    /// Dilations at which `Image(P_t) ⊆ Image(Q_{2t})` was checked exactly.
    pub outer_checked: Vec<Rational>,
    /// Dilations at which `Image(Q_t) ⊆ Image(P_t)` was checked exactly.
    pub inner_checked: Vec<Rational>,
}

/// Drops the last row of `U^{-1}`: lattice coordinates before the step to
/// lattice coordinates after it.
fn reduction_map(trace: &RankReductionTrace) -> Matrix<Int> {
    let d = trace.normalizer.rows();
    Matrix::from_fn(d - 1, d, |r, c| trace.normalizer[(r, c)].clone())
}

/// One rank reduction step for a progression whose half dilate is improper.
pub fn rank_reduce(p: &ConvexCosetProgression, cap: usize) -> Result<(ConvexCosetProgression, RankReductionTrace)> {
    let (qp, trace) = rank_reduce_unchecked(p, cap)?;
    let mut trace = trace;
    let pn = p.normalized()?;
    for t in [half(), q(1), q(2)] {
        match subset_under_cap(pn.image(&t, cap), qp.image(&(&t * q(2)), cap))? {
            Some(true) => trace.outer_checked.push(t),
            Some(false) => return Err(Error::Audit(format!("Image(P_t) not inside Image(Q_2t) at t = {t}"))),
            None => {}
        }
    }
    for t in [q(1), q(2)] {
        match subset_under_cap(qp.image(&t, cap), pn.image(&t, cap))? {
            Some(true) => trace.inner_checked.push(t),
            Some(false) => return Err(Error::Audit(format!("Image(Q_t) not inside Image(P_t) at t = {t}"))),
            None => {}
        }
    }
    Ok((qp, trace))
}

fn rank_reduce_unchecked(
    p: &ConvexCosetProgression,
    cap: usize,
) -> Result<(ConvexCosetProgression, RankReductionTrace)> {
    let p = p.normalized()?;
    let d = p.rank();
    let g = p.group().clone();
    let res = p.is_proper(&half(), cap)?;
    let Some((first, second)) = res.witness else {
        return Err(Error::pre("the half dilate is already proper"));
    };
    let y: Vec<Int> = second.coeffs.iter().zip(&first.coeffs).map(|(a, b)| a - b).collect();
    let (content, y_prime) = primitive_factor_coeffs(&y)?;
    let step = p.evaluate(&y_prime);
    let h = p.symmetry_group();
    let mut torsion_order = Int::one();
    let mut acc = step.clone();
    while !h.contains(&acc) {
        torsion_order += 1;
        if torsion_order > content {
            return Err(Error::Audit("content multiple of the collision step left the symmetry group".into()));
        }
        acc = g.add(&acc, &step);
    }
    let change = complete_coefficients(&y_prime)?;
    let normalizer = rational_to_int(&int_to_rational(&change).inverse().expect("unimodular")).expect("integral");
    let moved = p.body.pullback(&int_to_rational(&change))?;
    let projected_body = moved.project()?;
    let phi_new: Vec<GroupElement> = (0..d).map(|i| g.combine(&change.col(i), &p.phi)).collect();
    let new_h = h.adjoin(&phi_new[d - 1], cap)?;
    if Int::from(new_h.order()) != &torsion_order * Int::from(h.order()) {
        return Err(Error::Audit("enlarged symmetry group has unexpected order".into()));
    }
    if !new_h.contains_subgroup(h) {
        return Err(Error::Audit("enlarged symmetry group lost the old one".into()));
    }
    let q_body = projected_body.dilate(&half())?;
    let qp = ConvexCosetProgression {
        body: q_body,
        lattice: Lattice::standard(d - 1),
        phi: phi_new[..d - 1].to_vec(),
        symmetry_group: new_h.clone(),
    };
    let trace = RankReductionTrace {
        collision: (first, second),
        y,
        content,
        y_prime,
        torsion_order,
        change,
        normalizer,
        projected_body,
        new_symmetry_group: new_h,
        outer_checked: vec![],
        inner_checked: vec![],
    };
    Ok((qp, trace))
}

/// Output of [`conv_john`].
#[derive(Clone, Debug)]
pub struct ConvJohn {
    pub progression: ConvexCosetProgression,
    pub ledger: Vec<RankReductionTrace>,
    /// Lattice coordinates of the input to those of the output.
    pub coefficient_map: Matrix<Int>,
    /// `Image(P_{t'}) ⊆ Image(Q_{outer t'})` for all `t' > 0`.
    pub outer_factor: Rational,
    /// `Image(Q_{inner t'}) ⊆ Image(P_{t'})` for all `t' >= 1`.
    pub inner_factor: Rational,
    pub outer_checked: Vec<Rational>,
    pub inner_checked: Vec<Rational>,
}

/// Rank reduction until the half dilate is proper.
fn properize_half(p: &ConvexCosetProgression, cap: usize, check: bool) -> Result<ConvJohn> {
    let mut cur = p.normalized()?;
    let d = cur.rank();
    let mut ledger = Vec::new();
    let mut map = Matrix::<Int>::identity(d);
    while cur.rank() > 0 && !cur.is_proper(&half(), cap)?.proper {
        let (next, trace) = if check { rank_reduce(&cur, cap)? } else { rank_reduce_unchecked(&cur, cap)? };
        map = reduction_map(&trace).mul(&map);
        ledger.push(trace);
        cur = next;
    }
    let r = cur.rank();
    Ok(ConvJohn {
        progression: cur,
        ledger,
        coefficient_map: map,
        outer_factor: pow_rational(&q(2), (d - r) as u32),
        inner_factor: q(1),
        outer_checked: vec![],
        inner_checked: vec![],
    })
}

/// A `t`-proper convex coset progression `Q` of rank `r <= d` with
/// `Image(P_{t'}) ⊆ Image(Q_{2^{d-r+1} t t'})` for `t' > 0` and
/// `Image(Q_{2 t t'}) ⊆ Image(P_{t'})` for `t' >= 1`.
pub fn conv_john(p: &ConvexCosetProgression, t: &Rational, cap: usize) -> Result<ConvJohn> {
    if *t < half() {
        return Err(Error::pre("conv_john needs t >= 1/2"));
    }
    let mut out = properize_half(p, cap, true)?;
    let scale = (q(2) * t).recip();
    out.progression = out.progression.dilate(&scale)?;
    out.outer_factor = &out.outer_factor * q(2) * t;
    out.inner_factor = q(2) * t;
    let pn = p.normalized()?;
    for s in [half(), q(1), q(2)] {
        match subset_under_cap(pn.image(&s, cap), out.progression.image(&(&out.outer_factor * &s), cap))? {
            Some(true) => out.outer_checked.push(s),
            Some(false) => return Err(Error::Audit(format!("outer inclusion fails at t' = {s}"))),
            None => {}
        }
    }
    for s in [q(1), q(2)] {
        match subset_under_cap(out.progression.image(&(&out.inner_factor * &s), cap), pn.image(&s, cap))? {
            Some(true) => out.inner_checked.push(s),
            Some(false) => return Err(Error::Audit(format!("inner inclusion fails at t' = {s}"))),
            None => {}
        }
    }
    if !out.progression.is_proper(t, cap)?.proper {
        return Err(Error::Audit("conv_john output is not t-proper".into()));
    }
    Ok(out)
}

/// Output of [`discrete_john`]: a GAP in `Γ` with linearly independent steps.
#[derive(Clone, Debug)]
pub struct DiscreteJohn {
    /// Steps in lattice coordinates (columns of a unimodular matrix).
    pub coefficient_steps: Matrix<Int>,
    /// Steps as vectors of `R^d`.
    pub steps: Matrix<Rational>,
    pub dims: Vec<Rational>,
    pub rho_squared: Rational,
    pub rho: f64,
    pub defect_squared: Rational,
    pub defect: f64,
    /// Exact factor with `(λ^{-1} t B) ∩ Γ ⊆ Image(P_t)` for every `t > 0`.
    pub lambda: Rational,
    /// The a priori bound `d ρ defect` (times the rounding slack of `N_i`).
    pub lambda_bound: f64,
    /// `|B ∩ Γ|`, if it was enumerable.
    pub lattice_points: Option<usize>,
    /// Whether `B ∩ Γ` spans `R^d`, the setting of the packing bound.
    pub points_span: bool,
    /// `prod (2 floor(N_i) + 1)`.
    pub size: Int,
    /// `inner_factor = λ`, `outer_factor = 1`.
    pub cert: InclusionCert,
}

impl DiscreteJohn {
    /// Lattice coordinates of `sum n_i v_i`.
    pub fn point(&self, coeffs: &[Int]) -> Vec<Int> {
        self.coefficient_steps.mul_vec(coeffs)
    }
}

pub fn discrete_john(body: &SymmetricPolytope<Rational>, lattice: &Lattice<Rational>, cap: usize) -> Result<DiscreteJohn> {
    discrete_john_with(body, lattice, cap, &[q(1), q(2), q(4)])
}

/// [`discrete_john`] with an explicit list of dilations to verify.
pub fn discrete_john_with(
    body: &SymmetricPolytope<Rational>,
    lattice: &Lattice<Rational>,
    cap: usize,
    checks: &[Rational],
) -> Result<DiscreteJohn> {
    if body.dim() != lattice.dim() {
        return Err(Error::pre("body and lattice dimensions differ"));
    }
    let d = body.dim();
    if d == 0 {
        return Ok(DiscreteJohn {
            coefficient_steps: Matrix::zeros(0, 0),
            steps: Matrix::zeros(0, 0),
            dims: vec![],
            rho_squared: q(0),
            rho: 0.0,
            defect_squared: q(1),
            defect: 1.0,
            lambda: q(1),
            lambda_bound: 1.0,
            lattice_points: Some(1),
            points_span: true,
            size: Int::one(),
            cert: InclusionCert { inner_factor: q(1), outer_factor: q(1), checked_dilations: vec![], method: CheckMethod::Structural },
        });
    }
    let coeff_body = body.pullback(lattice.basis())?;
    let mut out = john_in_coordinates(&coeff_body, cap, checks)?;
    out.steps = lattice.basis().mul(&int_to_rational(&out.coefficient_steps));
    Ok(out)
}

/// Discrete John for a body given in lattice coordinates (`Γ = Z^d`).
fn john_in_coordinates(body: &SymmetricPolytope<Rational>, cap: usize, checks: &[Rational]) -> Result<DiscreteJohn> {
    let d = body.dim();
    let ell = inscribed_ellipsoid(body, ELLIPSOID_EPS)?;
    let red = reduced_basis(&Lattice::standard(d), &ell.shape)?;
    let v = rational_to_int(&red.basis).expect("integral reduced basis");
    let vinv = red.basis.inverse().expect("unimodular basis");
    let df = q(d as i64);
    // N_i = 1 / (d |v_i|) rounded down through an upper bound on |v_i|.
    let lengths: Vec<Rational> = red.squared_lengths.iter().map(|l2| sqrt_ceil(l2, 1 << 20)).collect();
    let dims: Vec<Rational> = lengths.iter().map(|l| (&df * l).recip()).collect();
    // Outer inclusion for all t at once: sum_i N_i |a . v_i| <= b.
    for c in body.constraints() {
        let s: Rational = (0..d)
            .map(|i| {
                let av: Rational = c.a.iter().zip(v.col(i)).map(|(a, x)| a * Rational::from_integer(x)).sum();
                &dims[i] * av.abs()
            })
            .sum();
        if s > c.b {
            return Err(Error::Audit("GAP box corner escapes the body".into()));
        }
    }
    // Exact inner factor from the dual functionals.
    let mut lambda = q(0);
    for (i, dim) in dims.iter().enumerate().take(d) {
        let h = body.support(&vinv.row(i));
        let r = h / dim;
        if r > lambda {
            lambda = r;
        }
    }
    let slack = (0..d)
        .map(|i| lengths[i].to_f64().unwrap_or(f64::NAN) / red.squared_lengths[i].to_f64().unwrap_or(f64::NAN).sqrt())
        .fold(1.0, f64::max);
    let lambda_bound = d as f64 * ell.rho * red.orthogonality_defect * slack;
    let lambda_f = lambda.to_f64().unwrap_or(f64::INFINITY);
    if lambda_f > lambda_bound * (1.0 + 1e-9) {
        return Err(Error::Audit(format!("inner factor {lambda_f} exceeds the a priori bound {lambda_bound}")));
    }
    let size = dims.iter().fold(Int::one(), |acc, n| acc * (Int::from(2) * floor(n) + 1));
    let (lattice_points, points_span) = match integer_points(body, cap) {
        Ok(p) => {
            let rows: Vec<Vec<Rational>> = p.iter().map(|x| x.iter().map(|c| Rational::from_integer(c.clone())).collect()).collect();
            (Some(p.len()), Matrix::from_rows(rows).rank() == d)
        }
        Err(Error::CapExceeded { .. }) => (None, false),
        Err(e) => return Err(e),
    };
    if let Some(count) = lattice_points {
        check_size_bounds(body, count, &size, points_span)?;
    }
    let mut checked = Vec::new();
    for t in checks {
        if verify_discrete_at(body, &v, &vinv, &dims, &lambda, t, cap)? {
            checked.push(t.clone());
        }
    }
    Ok(DiscreteJohn {
        coefficient_steps: v,
        steps: red.basis.clone(),
        dims,
        rho_squared: ell.rho_squared.clone(),
        rho: ell.rho,
        defect_squared: red.defect_squared.clone(),
        defect: red.orthogonality_defect,
        lambda: lambda.clone(),
        lambda_bound,
        lattice_points,
        points_span,
        size,
        cert: InclusionCert {
            inner_factor: lambda,
            outer_factor: q(1),
            checked_dilations: checked,
            method: CheckMethod::ExactEnumeration,
        },
    })
}

/// Size sandwich `(C d)^{-7d/2} |B ∩ Z^d| <= size <= |B ∩ Z^d|` and the
/// packing bound `|B ∩ Z^d| <= 3^d d! vol(B) / 2^d`.
fn check_size_bounds(body: &SymmetricPolytope<Rational>, count: usize, size: &Int, spans: bool) -> Result<()> {
    let d = body.dim();
    let count_i = Int::from(count);
    if size > &count_i {
        return Err(Error::Audit("GAP larger than the lattice points of the body".into()));
    }
    let lower = (count as f64) * (BOUND_CONSTANT * d as f64).powf(-3.5 * d as f64);
    if size.to_f64().unwrap_or(f64::INFINITY) < lower {
        return Err(Error::Audit("GAP size below the discrete John lower bound".into()));
    }
    // The packing bound needs every successive minimum to be at most 1.
    if spans && d <= VOLUME_DIM_LIMIT {
        let vol = body.volume()?;
        let fact: i64 = (1..=d as i64).product();
        let bound = vol * q(3i64.pow(d as u32)) * q(fact) / q(2i64.pow(d as u32));
        if Rational::from_integer(count_i) > bound {
            return Err(Error::Audit("lattice point count exceeds the packing bound".into()));
        }
    }
    Ok(())
}

/// Exact check of `(λ^{-1} t B) ∩ Z^d ⊆ Image(P_t) ⊆ (t B) ∩ Z^d`; `false`
/// when the sets are over budget.
fn verify_discrete_at(
    body: &SymmetricPolytope<Rational>,
    v: &Matrix<Int>,
    vinv: &Matrix<Rational>,
    dims: &[Rational],
    lambda: &Rational,
    t: &Rational,
    cap: usize,
) -> Result<bool> {
    let bounds: Vec<Int> = dims.iter().map(|n| floor(&(n * t))).collect();
    let count = bounds.iter().fold(Int::one(), |acc, b| acc * (Int::from(2) * b + 1));
    if count > Int::from(cap) {
        return Ok(false);
    }
    let tb = body.dilate(t)?;
    let mut ok = true;
    for_each_in_box(&bounds, |n| {
        let x: Vec<Rational> = v.mul_vec(n).into_iter().map(Rational::from_integer).collect();
        ok = tb.contains(&x);
        ok
    });
    if !ok {
        return Err(Error::Audit(format!("Image(P_t) leaves t.B at t = {t}")));
    }
    let inner = match integer_points(&body.dilate(&(t / lambda))?, cap) {
        Ok(p) => p,
        Err(Error::CapExceeded { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    for x in inner {
        let xr: Vec<Rational> = x.into_iter().map(Rational::from_integer).collect();
        let n = vinv.mul_vec(&xr);
        if n.iter().zip(&bounds).any(|(c, b)| !c.is_integer() || c.abs() > Rational::from_integer(b.clone())) {
            return Err(Error::Audit(format!("inner inclusion fails at t = {t}")));
        }
    }
    Ok(true)
}

/// Options for the GAP John operations.
#[derive(Clone, Debug)]
pub struct JohnOptions {
    pub cap: usize,
    /// Run the exact verification passes.
    pub verify: bool,
    pub retry_limit: usize,
}

impl Default for JohnOptions {
    fn default() -> Self {
        JohnOptions { cap: crate::progression::DEFAULT_CAP, verify: true, retry_limit: 8 }
    }
}

/// Output of [`gap_john`] and [`gap_john_outer`].
#[derive(Clone, Debug)]
pub struct JohnResult {
    pub input: CosetProgression,
    pub progression: CosetProgression,
    pub t: Rational,
    /// `Image(P_{t'}) ⊆ Image(Q_{λ t t'})` for every `t' > 0` (for
    /// [`gap_john`]); the dilation applied to `P` (for [`gap_john_outer`]).
    pub lambda: Rational,
    /// For [`gap_john`]: `inner_factor = 1` (`Image(Q) ⊆ Image(P)`) and
    /// `outer_factor = λ t` (`Image(P) ⊆ Image(Q_{λ t})`). For
    /// [`gap_john_outer`]: `inner_factor = 1` (`Image(P) ⊆ Image(Q)`) and
    /// `outer_factor = λ t` (`Image(Q) ⊆ Image(P_{λ t})`).
    pub cert: InclusionCert,
    /// Lattice coordinates of `P` to those of `Q`; the difference of the two
    /// evaluations lies in the symmetry group of `Q`.
    pub coefficient_map: Matrix<Int>,
    pub ledger: Vec<RankReductionTrace>,
    pub discrete: Option<DiscreteJohn>,
    /// Representations in `Q_{λ t}` of every element of `Image(P)` (for
    /// [`gap_john`]) or in `Q` (for [`gap_john_outer`]).
    pub outer_witnesses: Vec<(GroupElement, Representation)>,
    pub size_input: Option<usize>,
    pub size_output: Option<usize>,
    /// Number of dilation doublings used by [`gap_john_outer`].
    pub retries: usize,
}

/// The a priori dilation bound `(C d)^{3d/2}`.
pub fn lambda_bound(d: usize) -> f64 {
    (BOUND_CONSTANT * d as f64).powf(1.5 * d as f64).max(1.0)
}

/// A `t`-proper coset progression `Q` of rank at most `rank(P)` with
/// `Image(Q_{t t'}) ⊆ Image(P_{t'})` for `t' >= 1` and
/// `Image(P_{t'}) ⊆ Image(Q_{λ t t'})` for `t' > 0`.
pub fn gap_john(p: &CosetProgression, t: &Rational, opts: &JohnOptions) -> Result<JohnResult> {
    if *t < q(1) {
        return Err(Error::pre("gap_john needs t >= 1"));
    }
    let cap = opts.cap;
    let d = p.rank();
    let g = p.group().clone();
    let conv = properize_half(&to_convex(p), cap, opts.verify)?;
    let pp = &conv.progression;
    let r = pp.rank();
    let (progression, map, discrete, lambda) = if r == 0 {
        let qp = CosetProgression::subgroup(pp.symmetry_group().clone());
        (qp, Matrix::zeros(0, d), None, q(1))
    } else {
        let dj = john_in_coordinates(&pp.body().dilate(&half())?, cap, &[])?;
        let steps: Vec<GroupElement> = (0..r).map(|i| g.combine(&dj.coefficient_steps.col(i), pp.phi())).collect();
        let dims: Vec<Rational> = dj.dims.iter().map(|m| m / t).collect();
        let qp = CosetProgression::new(Gap::new(g.clone(), dims, steps)?, pp.symmetry_group().clone())?;
        let vinv = rational_to_int(&int_to_rational(&dj.coefficient_steps).inverse().expect("unimodular")).expect("integral");
        let map = vinv.mul(&conv.coefficient_map);
        // Linear-map factor: max_i sum_k |M_ik| N_k / M_i.
        let mut lin = q(0);
        for i in 0..r {
            let s: Rational = (0..d).map(|k| Rational::from_integer(map[(i, k)].abs()) * &p.dims()[k]).sum();
            let f = s / &dj.dims[i];
            if f > lin {
                lin = f;
            }
        }
        let structural = pow_rational(&q(2), (d - r + 1) as u32) * &dj.lambda;
        let lambda = if lin < structural { lin } else { structural };
        (qp, map, Some(dj), lambda)
    };
    let lambda = if lambda < q(1) { q(1) } else { lambda };
    if lambda.to_f64().unwrap_or(f64::INFINITY) > lambda_bound(d) {
        return Err(Error::Audit("certified dilation exceeds the a priori bound".into()));
    }
    let outer = &lambda * t;
    let mut result = JohnResult {
        input: p.clone(),
        progression,
        t: t.clone(),
        lambda,
        cert: InclusionCert { inner_factor: q(1), outer_factor: outer, checked_dilations: vec![], method: CheckMethod::Structural },
        coefficient_map: map,
        ledger: conv.ledger,
        discrete,
        outer_witnesses: vec![],
        size_input: None,
        size_output: None,
        retries: 0,
    };
    if opts.verify {
        verify_gap_john(&mut result, cap)?;
    }
    Ok(result)
}

/// Representation in `Q_s` of `phi_P(n) + h`, read off the coefficient map.
fn mapped_witness(res: &JohnResult, n: &[Int], h: &GroupElement) -> (GroupElement, Representation) {
    let g = res.input.group();
    let x = g.add(&res.input.evaluate(n), h);
    let c = res.coefficient_map.mul_vec(n);
    let hq = g.sub(&x, &res.progression.evaluate(&c));
    (x, Representation { coeffs: c, h: hq })
}

/// Witnesses that `Image(P_{t'})` lies in `Image(Q_s)`, one per element.
pub fn outer_witnesses(res: &JohnResult, t_prime: &Rational, s: &Rational, cap: usize) -> Result<Option<Vec<(GroupElement, Representation)>>> {
    let p = &res.input;
    if p.box_count(t_prime) > Int::from(cap) {
        return Ok(None);
    }
    let mut seen = std::collections::HashMap::new();
    let mut bad = None;
    for_each_in_box(&p.bounds(t_prime), |n| {
        for h in p.symmetry_group().elements().iter() {
            let (x, rep) = mapped_witness(res, n, h);
            if seen.contains_key(&x) {
                continue;
            }
            if !res.progression.admits(&rep, s) {
                bad = Some(x);
                return false;
            }
            seen.insert(x, rep);
        }
        true
    });
    if let Some(x) = bad {
        return Err(Error::Audit(format!("no witness for {x} in the outer progression")));
    }
    let mut out: Vec<(GroupElement, Representation)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Some(out))
}

fn verify_gap_john(res: &mut JohnResult, cap: usize) -> Result<()> {
    let p = res.input.clone();
    let qp = res.progression.clone();
    let t = res.t.clone();
    let d = p.rank();
    match is_proper(&qp, &t, cap) {
        Ok(r) if !r.proper => return Err(Error::Audit("output is not t-proper".into())),
        Ok(_) => {}
        Err(Error::CapExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    let mut checked = Vec::new();
    // Image(Q) ⊆ Image(P), and Image(Q_{t t'}) ⊆ Image(P_{t'}) for t' in {1, 2}.
    if let Some(false) = subset_under_cap(image(&qp, &q(1), cap), image(&p, &q(1), cap))? { return Err(Error::Audit("Image(Q) not inside Image(P)".into())) }
    for s in [q(1), q(2)] {
        match subset_under_cap(image(&qp, &(&t * &s), cap), image(&p, &s, cap))? {
            Some(true) => checked.push(s),
            Some(false) => return Err(Error::Audit(format!("Image(Q_tt') not inside Image(P_t') at t' = {s}"))),
            None => {}
        }
    }
    let outer = res.cert.outer_factor.clone();
    if let Some(w) = outer_witnesses(res, &q(1), &outer, cap)? {
        res.outer_witnesses = w;
    }
    let _ = outer_witnesses(res, &q(2), &(&outer * q(2)), cap)?;
    res.cert.checked_dilations = checked;
    res.cert.method = CheckMethod::ExactEnumeration;
    let sp = image(&p, &q(1), cap).ok().map(|s| s.len());
    let sq = image(&qp, &q(1), cap).ok().map(|s| s.len());
    res.size_input = sp;
    res.size_output = sq;
    if let (Some(sp), Some(sq)) = (sp, sq) {
        if sq > sp {
            return Err(Error::Audit("size(Q) exceeds size(P)".into()));
        }
        if (sq as f64) < (sp as f64) * gap_john_size_factor(d, &t) {
            return Err(Error::Audit("size(Q) below the lower bound".into()));
        }
    }
    Ok(())
}

/// `t^{-d} 2^{-d^2 - C d log2(2d)}`.
pub fn gap_john_size_factor(d: usize, t: &Rational) -> f64 {
    let df = d as f64;
    let tf = t.to_f64().unwrap_or(f64::INFINITY);
    let ld = if d == 0 { 0.0 } else { (2.0 * df).log2() };
    tf.powf(-df) * 2f64.powf(-df * df - BOUND_CONSTANT * df * ld)
}

/// `(C d)^{3d^2/2} t^d`, the growth allowed for the outer version.
pub fn gap_john_outer_size_factor(d: usize, t: &Rational) -> f64 {
    let df = d as f64;
    (BOUND_CONSTANT * df).powf(1.5 * df * df).max(1.0) * t.to_f64().unwrap_or(f64::INFINITY).powf(df)
}

/// A `t`-proper `Q` with `Image(P) ⊆ Image(Q) ⊆ Image(P_{λ t})`.
///
/// Runs [`gap_john`] on `P_{λ t}` with `λ` taken from a dry run on `P`, and
/// doubles `λ` until `Image(P) ⊆ Image(Q)` holds with explicit witnesses.
pub fn gap_john_outer(p: &CosetProgression, t: &Rational, opts: &JohnOptions) -> Result<JohnResult> {
    if *t < q(1) {
        return Err(Error::pre("gap_john_outer needs t >= 1"));
    }
    let cap = opts.cap;
    let quiet = JohnOptions { verify: false, ..opts.clone() };
    if p.rank() == 0 {
        let mut res = gap_john(p, &q(1), &quiet)?;
        res.t = t.clone();
        res.lambda = q(1);
        res.cert.outer_factor = t.clone();
        return Ok(res);
    }
    let dry = gap_john(p, &q(1), &quiet)?;
    let mut lambda = if dry.lambda < q(1) { q(1) } else { dry.lambda };
    for attempt in 0..=opts.retry_limit {
        let s = &lambda * t;
        let ps = p.dilate(&s)?;
        let run = gap_john(&ps, t, &quiet)?;
        // The run's map sends coefficients of P_s (= those of P) into Q.
        let probe = JohnResult { input: p.clone(), ..run.clone() };
        let witnesses = if opts.verify {
            match outer_witnesses(&probe, &q(1), &q(1), cap) {
                Ok(w) => w,
                Err(Error::Audit(_)) => {
                    lambda *= q(2);
                    continue;
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let structural = &run.lambda * t <= s;
        if !opts.verify && !structural {
            lambda *= q(2);
            continue;
        }
        let mut res = JohnResult {
            input: p.clone(),
            t: t.clone(),
            lambda: lambda.clone(),
            cert: InclusionCert {
                inner_factor: q(1),
                outer_factor: s.clone(),
                checked_dilations: vec![],
                method: CheckMethod::Structural,
            },
            outer_witnesses: witnesses.unwrap_or_default(),
            retries: attempt,
            ..run
        };
        if opts.verify {
            verify_outer(&mut res, cap)?;
        }
        return Ok(res);
    }
    Err(Error::RetryLimit(opts.retry_limit))
}

fn verify_outer(res: &mut JohnResult, cap: usize) -> Result<()> {
    let p = &res.input;
    let qp = &res.progression;
    let t = &res.t;
    match is_proper(qp, t, cap) {
        Ok(r) if !r.proper => return Err(Error::Audit("output is not t-proper".into())),
        Ok(_) | Err(Error::CapExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    // Image(Q) ⊆ Image(P_s), checked element by element.
    let s = res.cert.outer_factor.clone();
    let mut checked = vec![];
    if let Ok(img) = image(qp, &q(1), cap) {
        for x in img.iter() {
            if crate::progression::locate(p, x, &s).is_none() {
                return Err(Error::Audit(format!("{x} in Image(Q) but not in Image(P_s)")));
            }
        }
        checked.push(q(1));
        res.size_output = Some(img.len());
    }
    res.size_input = image(p, &q(1), cap).ok().map(|s| s.len());
    if let (Some(sp), Some(sq)) = (res.size_input, res.size_output) {
        if sq < sp {
            return Err(Error::Audit("size(Q) below size(P)".into()));
        }
        if sq as f64 > sp as f64 * gap_john_outer_size_factor(p.rank(), t) {
            return Err(Error::Audit("size(Q) above the outer size bound".into()));
        }
    }
    res.cert.checked_dilations = checked;
    res.cert.method = CheckMethod::ExactEnumeration;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::rat;

    fn z_prog(dims: &[i64], steps: &[i64]) -> CosetProgression {
        let s: Vec<Vec<i64>> = steps.iter().map(|&v| vec![v]).collect();
        let refs: Vec<&[i64]> = s.iter().map(|v| v.as_slice()).collect();
        CosetProgression::simple(AmbientGroup::integers(), dims, &refs).unwrap()
    }

    #[test]
    fn to_convex_images_agree() {
        let p = z_prog(&[2], &[3]);
        let c = to_convex(&p);
        for t in [rat(1, 2), rat(1, 1), rat(2, 1)] {
            assert_eq!(c.image(&t, 100).unwrap(), image(&p, &t, 100).unwrap());
        }
        assert_eq!(to_convex(&p).dilate(&rat(2, 1)).unwrap(), to_convex(&p.dilate(&rat(2, 1)).unwrap()));
        let g = AmbientGroup::cyclic(4);
        let h = FiniteSubgroup::generated(&g, &[g.elem(&[2])], 10).unwrap();
        let c = to_convex(&CosetProgression::subgroup(h.clone()));
        assert_eq!(c.rank(), 0);
        assert_eq!(&c.image(&rat(1, 1), 10).unwrap(), h.elements());
    }

    #[test]
    fn discrete_john_square() {
        let b = SymmetricPolytope::cuboid(&[rat(3, 1), rat(3, 1)]).unwrap();
        let dj = discrete_john(&b, &Lattice::standard(2), 10_000).unwrap();
        assert_eq!(dj.cert.checked_dilations, vec![rat(1, 1), rat(2, 1), rat(4, 1)]);
        let mut cols: Vec<Vec<Int>> = dj.coefficient_steps.columns();
        for c in &mut cols {
            if c.iter().any(|x| x.is_negative()) {
                for x in c.iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        cols.sort();
        assert_eq!(cols, vec![vec![Int::zero(), Int::one()], vec![Int::one(), Int::zero()]]);
        assert!(dj.lambda.to_f64().unwrap() <= dj.lambda_bound * (1.0 + 1e-9));
    }

    #[test]
    fn discrete_john_even_lattice() {
        let b = SymmetricPolytope::cuboid(&[rat(2, 1), rat(2, 1)]).unwrap();
        let l = Lattice::scaled_standard(2, 2);
        let dj = discrete_john_with(&b, &l, 10_000, &[rat(1, 1), rat(4, 1)]).unwrap();
        assert!(dj.cert.checked_dilations.contains(&rat(4, 1)));
        for c in dj.steps.columns() {
            assert!(c.iter().all(|x| x.is_integer() && x.to_integer() % 2 == Int::zero()));
        }
    }

    #[test]
    fn discrete_john_interval() {
        for n in [1, 5, 17] {
            let b = SymmetricPolytope::cuboid(&[rat(n, 1)]).unwrap();
            let dj = discrete_john(&b, &Lattice::standard(1), 10_000).unwrap();
            assert!(&dj.dims[0] * &dj.lambda >= rat(n, 1));
            assert_eq!(dj.cert.checked_dilations.len(), 3);
        }
    }

    #[test]
    fn rank_reduce_equal_steps() {
        let p = z_prog(&[2, 2], &[1, 1]);
        assert!(matches!(rank_reduce(&to_convex(&z_prog(&[1, 1], &[1, 1])), 100), Err(Error::Precondition(_))));
        let (qp, tr) = rank_reduce(&to_convex(&p), 1000).unwrap();
        assert_eq!(qp.rank(), 1);
        assert!(tr.y == vec![Int::one(), -Int::one()] || tr.y == vec![-Int::one(), Int::one()]);
        assert_eq!(tr.outer_checked.len(), 3);
        assert_eq!(tr.inner_checked.len(), 2);
    }

    #[test]
    fn rank_reduce_torsion() {
        let g = AmbientGroup::cyclic(4);
        let p = CosetProgression::simple(g.clone(), &[4], &[&[1]]).unwrap();
        let (qp, tr) = rank_reduce(&to_convex(&p), 1000).unwrap();
        assert_eq!(qp.rank(), 0);
        assert_eq!(tr.new_symmetry_group.order(), 4);
        assert_eq!(qp.image(&rat(1, 1), 100).unwrap().len(), 4);
        let proper = z_prog(&[2], &[3]);
        assert!(matches!(rank_reduce(&to_convex(&proper), 100), Err(Error::Precondition(_))));
    }

    #[test]
    fn conv_john_cases() {
        let proper = z_prog(&[2], &[3]);
        let r = conv_john(&to_convex(&proper), &rat(1, 1), 1000).unwrap();
        assert!(r.ledger.is_empty());
        let g = AmbientGroup::cyclic(4);
        let p = CosetProgression::simple(g, &[4], &[&[1]]).unwrap();
        let r = conv_john(&to_convex(&p), &rat(1, 1), 1000).unwrap();
        assert_eq!(r.progression.rank(), 0);
        assert!(r.ledger.len() <= 1);
    }

    #[test]
    fn gap_john_examples() {
        let opts = JohnOptions { cap: 100_000, ..Default::default() };
        let r = gap_john(&z_prog(&[3], &[2]), &rat(1, 1), &opts).unwrap();
        assert!(!r.outer_witnesses.is_empty());
        // (1,1) dims give a 1/2-proper progression; (2,2) is the smallest improper one.
        let r = gap_john(&z_prog(&[2, 2], &[1, 1]), &rat(1, 1), &opts).unwrap();
        assert!(r.progression.rank() <= 1);
        let g = AmbientGroup::cyclic(6);
        let h = FiniteSubgroup::generated(&g, &[g.elem(&[2])], 10).unwrap();
        let r = gap_john(&CosetProgression::subgroup(h), &rat(1, 1), &opts).unwrap();
        assert_eq!(r.progression.rank(), 0);
        assert_eq!(r.lambda, rat(1, 1));
    }

    #[test]
    fn gap_john_outer_examples() {
        let opts = JohnOptions { cap: 200_000, ..Default::default() };
        let p = z_prog(&[3], &[2]);
        let r = gap_john_outer(&p, &rat(2, 1), &opts).unwrap();
        assert!(image(&p, &rat(1, 1), 100).unwrap().is_subset(&image(&r.progression, &rat(1, 1), 10_000).unwrap()));
        let r = gap_john_outer(&z_prog(&[1, 1], &[1, 2]), &rat(1, 1), &opts).unwrap();
        assert!(r.progression.rank() <= 1);
    }

    #[test]
    fn lattice_points_helper() {
        let b = SymmetricPolytope::cuboid(&[rat(1, 1)]).unwrap();
        let c = ConvexCosetProgression::new(b, Lattice::standard(1), vec![AmbientGroup::integers().elem(&[1])], FiniteSubgroup::trivial(AmbientGroup::integers())).unwrap();
        assert_eq!(c.points(&rat(1, 1), 10).unwrap().len(), 3);
    }
}
