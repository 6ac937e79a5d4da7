//! JSON documents and certificates, and the audit that re-checks every
//! certificate claim with the naive oracle.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::convex::{Constraint, SymmetricPolytope};
use crate::error::{Error, Result};
use crate::group::{AmbientGroup, FiniteSet, FiniteSubgroup, GroupElement};
use crate::lattice::Lattice;
use crate::linalg::Matrix;
use crate::oracle::{self, VerificationReport};
use crate::progression::{CosetProgression, Gap};
use crate::scalar::{json_ints, json_rational, json_rationals, Int, Rational};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub free_rank: usize,
    #[serde(with = "json_ints", default)]
    pub moduli: Vec<Int>,
}

impl GroupDoc {
    pub fn of(g: &AmbientGroup) -> Self {
        GroupDoc { free_rank: g.free_rank(), moduli: g.moduli().to_vec() }
    }

    pub fn to_group(&self) -> Result<AmbientGroup> {
        AmbientGroup::new(self.free_rank, self.moduli.clone())
    }
}

fn elements(g: &AmbientGroup, xs: &[GroupElement]) -> Result<Vec<GroupElement>> {
    xs.iter().map(|x| g.element(x.coords().to_vec())).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressionDoc {
    pub group: GroupDoc,
    #[serde(with = "json_rationals")]
    pub dims: Vec<Rational>,
    pub steps: Vec<GroupElement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetry_generators: Vec<GroupElement>,
}

impl ProgressionDoc {
    pub fn of(p: &CosetProgression) -> Self {
        ProgressionDoc {
            group: GroupDoc::of(p.group()),
            dims: p.dims().to_vec(),
            steps: p.steps().to_vec(),
            symmetry_generators: p.symmetry_group().generators().to_vec(),
        }
    }

    pub fn to_progression(&self, cap: usize) -> Result<CosetProgression> {
        let g = self.group.to_group()?;
        let steps = elements(&g, &self.steps)?;
        let gens = elements(&g, &self.symmetry_generators)?;
        let h = FiniteSubgroup::generated(&g, &gens, cap)?;
        CosetProgression::new(Gap::new(g, self.dims.clone(), steps)?, h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDoc {
    pub group: GroupDoc,
    pub elements: Vec<GroupElement>,
}

impl SetDoc {
    pub fn of(s: &FiniteSet) -> Self {
        SetDoc { group: GroupDoc::of(s.group()), elements: s.elements().to_vec() }
    }

    pub fn to_set(&self) -> Result<FiniteSet> {
        let g = self.group.to_group()?;
        let xs = elements(&g, &self.elements)?;
        Ok(FiniteSet::from_vec(g, xs))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    #[serde(with = "json_rationals")]
    pub a: Vec<Rational>,
    #[serde(with = "json_rational")]
    pub b: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalVec(#[serde(with = "json_rationals")] pub Vec<Rational>);

/// `{x : |a_j . x| <= b_j}` with a lattice given by basis vectors
/// (default `Z^d`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyDoc {
    pub dim: usize,
    pub constraints: Vec<ConstraintDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<RationalVec>>,
}

impl BodyDoc {
    pub fn of(body: &SymmetricPolytope<Rational>, lattice: &Lattice<Rational>) -> Self {
        let constraints = body.constraints().iter().map(|c| ConstraintDoc { a: c.a.clone(), b: c.b.clone() }).collect();
        let lattice = (!lattice.is_standard()).then(|| lattice.basis().columns().into_iter().map(RationalVec).collect());
        BodyDoc { dim: body.dim(), constraints, lattice }
    }

    pub fn to_body(&self) -> Result<(SymmetricPolytope<Rational>, Lattice<Rational>)> {
        let cons = self.constraints.iter().map(|c| Constraint { a: c.a.clone(), b: c.b.clone() }).collect();
        let body = SymmetricPolytope::new(self.dim, cons)?;
        let lattice = match &self.lattice {
            None => Lattice::standard(self.dim),
            Some(cols) => {
                if cols.len() != self.dim || cols.iter().any(|c| c.0.len() != self.dim) {
                    return Err(Error::Parse("lattice basis must have dim vectors of length dim".into()));
                }
                Lattice::new(Matrix::from_columns(self.dim, &cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>()))?
            }
        };
        Ok((body, lattice))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Group(GroupDoc),
    Progression(ProgressionDoc),
    Body(BodyDoc),
    Set(SetDoc),
}

/// An input document: a version tag, one payload and free-form metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: u32,
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Value>,
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Document { version: SCHEMA_VERSION, payload, metadata: BTreeMap::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", doc.version)));
        }
        Ok(doc)
    }

    /// Canonical pretty form; parsing it back and printing again is the
    /// identity.
    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

pub(crate) fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Object {
    Progression(ProgressionDoc),
    Set(SetDoc),
    Body(BodyDoc),
}

/// A finite set described by how to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetExpr {
    /// `Image(P_t)` of a named progression.
    Image {
        progression: String,
        #[serde(with = "json_rational")]
        t: Rational,
    },
    /// A named set object.
    Set(String),
    Translate { by: GroupElement, of: Box<SetExpr> },
    /// `l`-fold sumset.
    Sumset { of: Box<SetExpr>, l: u64 },
    /// Lattice coordinates of the points of `t K`.
    LatticePoints {
        body: String,
        #[serde(with = "json_rational")]
        t: Rational,
    },
}

impl SetExpr {
    pub fn image(name: &str, t: Rational) -> Self {
        SetExpr::Image { progression: name.into(), t }
    }

    pub fn set(name: &str) -> Self {
        SetExpr::Set(name.into())
    }

    pub fn translate(by: GroupElement, of: SetExpr) -> Self {
        SetExpr::Translate { by, of: Box::new(of) }
    }

    pub fn sumset(of: SetExpr, l: u64) -> Self {
        SetExpr::Sumset { of: Box::new(of), l }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Size(SetExpr),
    /// Number of elements of a named set object.
    Count(String),
    Value(#[serde(with = "json_rational")] Rational),
    /// `|num| / |den|`.
    Ratio { num: SetExpr, den: SetExpr },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: GroupElement,
    #[serde(with = "json_ints")]
    pub coeffs: Vec<Int>,
    pub h: GroupElement,
}

/// A formal sum: coefficients and a symmetry-group element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Formal {
    #[serde(with = "json_ints")]
    pub coeffs: Vec<Int>,
    pub h: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    Subset {
        id: String,
        lhs: SetExpr,
        rhs: SetExpr,
    },
    /// `lhs ⊆ Image(P_t)`, with a representation for every element.
    Witnessed {
        id: String,
        lhs: SetExpr,
        progression: String,
        #[serde(with = "json_rational")]
        t: Rational,
        witnesses: Vec<Witness>,
    },
    Proper {
        id: String,
        progression: String,
        #[serde(with = "json_rational")]
        t: Rational,
    },
    /// Two distinct formal sums of `P_t` with the same value.
    Collision {
        id: String,
        progression: String,
        #[serde(with = "json_rational")]
        t: Rational,
        first: Formal,
        second: Formal,
    },
    /// `target ⊆ ∪ (b + tile)` over the named set of bases.
    Covering {
        id: String,
        target: SetExpr,
        tile: SetExpr,
        bases: String,
    },
    AtMost {
        id: String,
        quantity: Quantity,
        #[serde(with = "json_rational")]
        bound: Rational,
    },
    AtLeast {
        id: String,
        quantity: Quantity,
        #[serde(with = "json_rational")]
        bound: Rational,
    },
    /// Whether `set` is a coset of the subgroup generated by
    /// `differences_of - differences_of`.
    Coset {
        id: String,
        set: SetExpr,
        differences_of: SetExpr,
        expected: bool,
    },
    /// The two progressions generate the same subgroup.
    SameGenerated {
        id: String,
        lhs: String,
        rhs: String,
    },
    RankAtMost {
        id: String,
        progression: String,
        bound: usize,
    },
}

impl Claim {
    pub fn id(&self) -> &str {
        match self {
            Claim::Subset { id, .. }
            | Claim::Witnessed { id, .. }
            | Claim::Proper { id, .. }
            | Claim::Collision { id, .. }
            | Claim::Covering { id, .. }
            | Claim::AtMost { id, .. }
            | Claim::AtLeast { id, .. }
            | Claim::Coset { id, .. }
            | Claim::SameGenerated { id, .. }
            | Claim::RankAtMost { id, .. } => id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub objects: BTreeMap<String, Object>,
    /// Informational summary; not audited.
    pub result: Value,
    pub claims: Vec<Claim>,
}

impl Certificate {
    pub fn new(command: &str) -> Self {
        Certificate {
            version: SCHEMA_VERSION,
            command: command.into(),
            params: BTreeMap::new(),
            objects: BTreeMap::new(),
            result: Value::Null,
            claims: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: Certificate = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if c.version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", c.version)));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.params.insert(key.into(), serde_json::to_value(v).expect("params serialize"));
        self
    }

    pub fn progression(&mut self, name: &str, p: &CosetProgression) -> &mut Self {
        self.objects.insert(name.into(), Object::Progression(ProgressionDoc::of(p)));
        self
    }

    pub fn set(&mut self, name: &str, s: &FiniteSet) -> &mut Self {
        self.objects.insert(name.into(), Object::Set(SetDoc::of(s)));
        self
    }

    pub fn body(&mut self, name: &str, body: &SymmetricPolytope<Rational>, lattice: &Lattice<Rational>) -> &mut Self {
        self.objects.insert(name.into(), Object::Body(BodyDoc::of(body, lattice)));
        self
    }

    pub fn claim(&mut self, c: Claim) -> &mut Self {
        self.claims.push(c);
        self
    }
}

/// Outcome of auditing a whole certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub version: u32,
    pub command: String,
    pub holds: bool,
    pub reports: Vec<VerificationReport>,
}

struct Auditor {
    cap: usize,
    progressions: HashMap<String, CosetProgression>,
    sets: HashMap<String, FiniteSet>,
    bodies: HashMap<String, (SymmetricPolytope<Rational>, Lattice<Rational>)>,
    /// Evaluated expressions, keyed by their JSON form.
    cache: RefCell<HashMap<String, FiniteSet>>,
}

fn missing(name: &str) -> Error {
    Error::Parse(format!("unknown object {name:?}"))
}

impl Auditor {
    fn new(cert: &Certificate, cap: usize) -> Result<Self> {
        let mut a = Auditor { cap, progressions: HashMap::new(), sets: HashMap::new(), bodies: HashMap::new(), cache: RefCell::new(HashMap::new()) };
        for (name, obj) in &cert.objects {
            match obj {
                Object::Progression(p) => {
                    a.progressions.insert(name.clone(), p.to_progression(cap)?);
                }
                Object::Set(s) => {
                    a.sets.insert(name.clone(), s.to_set()?);
                }
                Object::Body(b) => {
                    a.bodies.insert(name.clone(), b.to_body()?);
                }
            }
        }
        Ok(a)
    }

    fn prog(&self, name: &str) -> Result<&CosetProgression> {
        self.progressions.get(name).ok_or_else(|| missing(name))
    }

    fn eval(&self, e: &SetExpr) -> Result<FiniteSet> {
        let key = serde_json::to_string(e).expect("expressions serialize");
        if let Some(s) = self.cache.borrow().get(&key) {
            return Ok(s.clone());
        }
        let s = self.eval_uncached(e)?;
        self.cache.borrow_mut().insert(key, s.clone());
        Ok(s)
    }

    fn eval_uncached(&self, e: &SetExpr) -> Result<FiniteSet> {
        match e {
            SetExpr::Image { progression, t } => oracle::brute_image(self.prog(progression)?, t, self.cap),
            SetExpr::Set(name) => self.sets.get(name).cloned().ok_or_else(|| missing(name)),
            SetExpr::Translate { by, of } => {
                let s = self.eval(of)?;
                let by = s.group().element(by.coords().to_vec())?;
                Ok(oracle::brute_translate(&s, &by))
            }
            SetExpr::Sumset { of, l } => oracle::brute_iterated_sumset(&self.eval(of)?, *l, self.cap),
            SetExpr::LatticePoints { body, t } => {
                let (k, lat) = self.bodies.get(body).ok_or_else(|| missing(body))?;
                let pts = oracle::brute_lattice_points(k, lat, t, self.cap)?;
                let g = AmbientGroup::lattice(k.dim());
                Ok(FiniteSet::from_vec(g, pts.into_iter().map(GroupElement).collect()))
            }
        }
    }

    fn quantity(&self, q: &Quantity) -> Result<Rational> {
        let n = |k: usize| Rational::from_integer(Int::from(k));
        Ok(match q {
            Quantity::Size(e) => n(self.eval(e)?.len()),
            Quantity::Count(name) => n(self.sets.get(name).ok_or_else(|| missing(name))?.len()),
            Quantity::Value(v) => v.clone(),
            Quantity::Ratio { num, den } => {
                let d = self.eval(den)?.len();
                if d == 0 {
                    return Err(Error::Degenerate("ratio over an empty set".into()));
                }
                Rational::new(Int::from(self.eval(num)?.len()), Int::from(d))
            }
        })
    }

    fn formal_value(&self, p: &CosetProgression, t: &Rational, f: &Formal, h_set: &FiniteSet) -> Option<GroupElement> {
        let g = p.group();
        let h = g.element(f.h.coords().to_vec()).ok()?;
        let x = {
            let mut acc = h.clone();
            if f.coeffs.len() != p.rank() {
                return None;
            }
            for (c, v) in f.coeffs.iter().zip(p.steps()) {
                acc = g.add(&acc, &g.scale(c, v));
            }
            acc
        };
        oracle::check_representation(p, t, &x, &f.coeffs, &h, h_set).then_some(x)
    }

    fn check(&self, claim: &Claim) -> Result<VerificationReport> {
        let id = claim.id();
        Ok(match claim {
            Claim::Subset { lhs, rhs, .. } => {
                let mut r = oracle::verify_inclusion(&self.eval(lhs)?, &self.eval(rhs)?);
                r.claim = id.into();
                r
            }
            Claim::Witnessed { lhs, progression, t, witnesses, .. } => {
                let p = self.prog(progression)?;
                let s = self.eval(lhs)?;
                let h_set = oracle::brute_subgroup(p.group(), p.symmetry_group().generators(), self.cap)?;
                let by_x: HashMap<&GroupElement, &Witness> = witnesses.iter().map(|w| (&w.x, w)).collect();
                let mut checked = 0;
                for x in s.iter() {
                    checked += 1;
                    let ok = by_x.get(x).is_some_and(|w| {
                        p.group().element(w.h.coords().to_vec()).is_ok_and(|h| oracle::check_representation(p, t, x, &w.coeffs, &h, &h_set))
                    });
                    if !ok {
                        return Ok(VerificationReport::fail(id, vec![x.clone()], checked));
                    }
                }
                VerificationReport::pass(id, checked)
            }
            Claim::Proper { progression, t, .. } => {
                let p = self.prog(progression)?;
                match oracle::brute_collision(p, t, self.cap)? {
                    None => VerificationReport::pass(id, 1),
                    Some((a, b)) => VerificationReport::fail(id, vec![GroupElement(a), GroupElement(b)], 1).with_note("colliding formal sums (coefficients then h)"),
                }
            }
            Claim::Collision { progression, t, first, second, .. } => {
                let p = self.prog(progression)?;
                let h_set = oracle::brute_subgroup(p.group(), p.symmetry_group().generators(), self.cap)?;
                let a = self.formal_value(p, t, first, &h_set);
                let b = self.formal_value(p, t, second, &h_set);
                let distinct = first.coeffs != second.coeffs || first.h != second.h;
                match (a, b) {
                    (Some(a), Some(b)) if a == b && distinct => VerificationReport::pass(id, 2),
                    (a, b) => {
                        let shown = [a, b].into_iter().flatten().collect();
                        VerificationReport::fail(id, shown, 2).with_note("formal sums are equal, out of range, or evaluate differently")
                    }
                }
            }
            Claim::Covering { target, tile, bases, .. } => {
                let target = self.eval(target)?;
                let tile = self.eval(tile)?;
                let bases = self.sets.get(bases).ok_or_else(|| missing(bases))?;
                let mut union = FiniteSet::empty(target.group().clone());
                for b in bases.iter() {
                    union = union.union(&oracle::brute_translate(&tile, b))?;
                }
                let mut r = oracle::verify_inclusion(&target, &union);
                r.claim = id.into();
                r
            }
            Claim::AtMost { quantity, bound, .. } => {
                let v = self.quantity(quantity)?;
                numeric(id, v <= *bound, &v, bound)
            }
            Claim::AtLeast { quantity, bound, .. } => {
                let v = self.quantity(quantity)?;
                numeric(id, v >= *bound, &v, bound)
            }
            Claim::Coset { set, differences_of, expected, .. } => {
                let s = self.eval(set)?;
                let is = oracle::brute_is_coset(&s, &self.eval(differences_of)?, self.cap)?;
                if is == *expected {
                    VerificationReport::pass(id, s.len())
                } else {
                    VerificationReport::fail(id, s.first().cloned().into_iter().collect(), s.len()).with_note(format!("coset status is {is}"))
                }
            }
            Claim::SameGenerated { lhs, rhs, .. } => {
                let (p, q) = (self.prog(lhs)?, self.prog(rhs)?);
                let gens = |p: &CosetProgression| {
                    let mut v = p.steps().to_vec();
                    v.extend(p.symmetry_group().generators().iter().cloned());
                    v
                };
                let mut r = oracle::verify_same_generated(p.group(), &gens(p), &gens(q));
                r.claim = id.into();
                r
            }
            Claim::RankAtMost { progression, bound, .. } => {
                let r = self.prog(progression)?.rank();
                if r <= *bound {
                    VerificationReport::pass(id, 1)
                } else {
                    VerificationReport::fail(id, vec![], 1).with_note(format!("rank {r} exceeds {bound}"))
                }
            }
        })
    }
}

fn numeric(id: &str, holds: bool, v: &Rational, bound: &Rational) -> VerificationReport {
    let note = format!("value {} against bound {}", crate::scalar::format_rational(v), crate::scalar::format_rational(bound));
    if holds {
        VerificationReport::pass(id, 1).with_note(note)
    } else {
        VerificationReport::fail(id, vec![], 1).with_note(note)
    }
}

/// Re-checks every claim of `cert` with the oracle. Claims that cannot be
/// evaluated (unknown objects, cap exceeded) are reported as failures.
pub fn audit(cert: &Certificate, cap: usize) -> AuditReport {
    let mut reports = Vec::new();
    match Auditor::new(cert, cap) {
        Err(e) => reports.push(VerificationReport::fail("objects", vec![], 0).with_note(e.to_string())),
        Ok(a) => {
            if cert.claims.is_empty() {
                reports.push(VerificationReport::fail("claims", vec![], 0).with_note("certificate makes no claims"));
            }
            for c in &cert.claims {
                reports.push(match a.check(c) {
                    Ok(r) => r,
                    Err(e) => VerificationReport::fail(c.id(), vec![], 0).with_note(e.to_string()),
                });
            }
        }
    }
    finish(cert, reports)
}

/// Like [`audit`], but returns the first evaluation error instead of
/// reporting it as a failed claim.
pub fn audit_strict(cert: &Certificate, cap: usize) -> Result<AuditReport> {
    let a = Auditor::new(cert, cap)?;
    let reports = cert.claims.iter().map(|c| a.check(c)).collect::<Result<Vec<_>>>()?;
    Ok(finish(cert, reports))
}

fn finish(cert: &Certificate, reports: Vec<VerificationReport>) -> AuditReport {
    let holds = !reports.is_empty() && reports.iter().all(|r| r.holds);
    AuditReport { version: SCHEMA_VERSION, command: cert.command.clone(), holds, reports }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{json_int, rat};

    #[derive(Serialize, Deserialize)]
    struct IntBox(#[serde(with = "json_int")] Int);

    fn p12() -> CosetProgression {
        CosetProgression::simple(AmbientGroup::integers(), &[1, 1], &[&[1], &[2]]).unwrap()
    }

    #[test]
    fn document_round_trip() {
        let doc = Document::new(Payload::Progression(ProgressionDoc::of(&p12())));
        let text = doc.to_json();
        assert_eq!(Document::parse(&text).unwrap().to_json(), text);
        assert!(text.contains("\"version\": 1"));
        assert!(Document::parse("{\"version\": 2, \"set\": {\"group\": {\"free_rank\": 1}, \"elements\": []}}").is_err());
        assert!(Document::parse("not json").is_err());
    }

    #[test]
    fn big_integers_survive() {
        let g = AmbientGroup::integers();
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let s = FiniteSet::from_vec(g, vec![GroupElement(vec![big.clone()])]);
        let text = Document::new(Payload::Set(SetDoc::of(&s))).to_json();
        assert!(text.contains("\"123456789012345678901234567890\""));
        assert_eq!(Document::parse(&text).unwrap().payload, Payload::Set(SetDoc::of(&s)));
        let b: IntBox = serde_json::from_str("\"-7\"").unwrap();
        assert_eq!(b.0, Int::from(-7));
    }

    #[test]
    fn audit_detects_false_claims() {
        let mut c = Certificate::new("test");
        c.progression("P", &p12());
        c.claim(Claim::Subset { id: "self".into(), lhs: SetExpr::image("P", rat(1, 1)), rhs: SetExpr::image("P", rat(2, 1)) });
        c.claim(Claim::Proper { id: "half".into(), progression: "P".into(), t: rat(1, 2) });
        assert!(audit(&c, 10_000).holds);
        c.claim(Claim::Proper { id: "one".into(), progression: "P".into(), t: rat(1, 1) });
        let r = audit(&c, 10_000);
        assert!(!r.holds);
        assert!(r.reports[2].counterexample.is_some());
        let back = Certificate::parse(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_objects_fail() {
        let mut c = Certificate::new("test");
        c.claim(Claim::Proper { id: "x".into(), progression: "nope".into(), t: rat(1, 1) });
        assert!(!audit(&c, 100).holds);
        assert!(!audit(&Certificate::new("empty"), 100).holds);
    }
}
