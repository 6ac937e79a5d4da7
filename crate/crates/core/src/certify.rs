//! Builders turning pipeline results into certificates whose claims can be
//! audited without trusting the pipeline.

use num_traits::One;
use serde_json::{json, Value};

use crate::certificate::{Certificate, Claim, Formal, Quantity, SetExpr, Witness};
use crate::coalescence::{k_bound, CoalescenceResult};
use crate::convex::SymmetricPolytope;
use crate::covering::CoveringCertificate;
use crate::error::{Error, Result};
use crate::group::{AmbientGroup, FiniteSet, GroupElement};
use crate::john::{gap_john_outer_size_factor, gap_john_size_factor, lambda_bound, outer_witnesses, DiscreteJohn, JohnResult};
use crate::lattice::Lattice;
use crate::progression::{image, is_proper, locate_all, CosetProgression, Gap, Representation};
use crate::scalar::{format_rational, int_to_json, Int, Rational};
use crate::structure::{CounterexampleDemo, SarkozyReport, SumsetStructureResult};

fn r(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

fn ri(n: &Int) -> Rational {
    Rational::from_integer(n.clone())
}

fn rs(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// Exact value of a finite `f64` bound.
fn exact(x: f64) -> Option<Rational> {
    if x.is_finite() {
        Rational::from_float(x)
    } else {
        None
    }
}

fn witnesses(ws: &[(GroupElement, Representation)]) -> Vec<Witness> {
    ws.iter().map(|(x, rep)| Witness { x: x.clone(), coeffs: rep.coeffs.clone(), h: rep.h.clone() }).collect()
}

fn formal(rep: &Representation) -> Formal {
    Formal { coeffs: rep.coeffs.clone(), h: rep.h.clone() }
}

fn id(s: &str) -> String {
    s.to_string()
}

/// Adds a collision in `P_at`, when there is one, and the rank claim it
/// justifies.
fn rank_claims(c: &mut Certificate, p: &CosetProgression, at: Rational, cap: usize) -> Result<()> {
    let d = p.rank();
    let bound = match is_proper(p, &at, cap) {
        Ok(res) if !res.proper => {
            let (a, b) = res.witness.expect("improper scans carry a witness");
            c.claim(Claim::Collision { id: id("input_improper"), progression: id("P"), t: at, first: formal(&a), second: formal(&b) });
            d.saturating_sub(1)
        }
        Ok(_) => d,
        Err(crate::error::Error::CapExceeded { .. }) => d,
        Err(e) => return Err(e),
    };
    c.claim(Claim::RankAtMost { id: id("rank"), progression: id("Q"), bound });
    Ok(())
}

fn john_result(res: &JohnResult) -> Value {
    json!({
        "rank_in": res.input.rank(),
        "rank_out": res.progression.rank(),
        "t": rs(&res.t),
        "lambda": rs(&res.lambda),
        "inner_factor": rs(&res.cert.inner_factor),
        "outer_factor": rs(&res.cert.outer_factor),
        "checked_dilations": res.cert.checked_dilations.iter().map(rs).collect::<Vec<_>>(),
        "reductions": res.ledger.len(),
        "retries": res.retries,
        "size_input": res.size_input,
        "size_output": res.size_output,
    })
}

/// `Q` is `t`-proper with `Image(Q) ⊆ Image(P) ⊆ Image(Q_{λ t})` at
/// `t' ∈ {1, 2}`, with the rank and size bounds.
pub fn john(res: &JohnResult, cap: usize) -> Result<Certificate> {
    let mut c = Certificate::new("john");
    c.param("t", format_rational(&res.t));
    c.progression("P", &res.input).progression("Q", &res.progression);
    c.result = john_result(res);
    let one = r(1);
    c.claim(Claim::Proper { id: id("output_t_proper"), progression: id("Q"), t: res.t.clone() });
    c.claim(Claim::Subset { id: id("inner"), lhs: SetExpr::image("Q", one.clone()), rhs: SetExpr::image("P", one.clone()) });
    outer_claim(&mut c, res, &one, "outer", cap)?;
    rank_claims(&mut c, &res.input, Rational::new(Int::one(), Int::from(2)), cap)?;
    if let Some(b) = exact(lambda_bound(res.input.rank())) {
        c.claim(Claim::AtMost { id: id("lambda_bound"), quantity: Quantity::Value(res.lambda.clone()), bound: b });
    }
    let two = r(2);
    c.claim(Claim::Subset { id: id("inner_at_2"), lhs: SetExpr::image("Q", &res.t * &two), rhs: SetExpr::image("P", two.clone()) });
    outer_claim(&mut c, res, &two, "outer_at_2", cap)?;
    let ratio = || Quantity::Ratio { num: SetExpr::image("Q", r(1)), den: SetExpr::image("P", r(1)) };
    c.claim(Claim::AtMost { id: id("size_upper"), quantity: ratio(), bound: r(1) });
    if let Some(b) = exact(gap_john_size_factor(res.input.rank(), &res.t)) {
        c.claim(Claim::AtLeast { id: id("size_lower"), quantity: ratio(), bound: b });
    }
    Ok(c)
}

fn outer_claim(c: &mut Certificate, res: &JohnResult, t_prime: &Rational, name: &str, cap: usize) -> Result<()> {
    let s = &res.cert.outer_factor * t_prime;
    let lhs = SetExpr::image("P", t_prime.clone());
    match outer_witnesses(res, t_prime, &s, cap)? {
        Some(ws) => c.claim(Claim::Witnessed { id: id(name), lhs, progression: id("Q"), t: s, witnesses: witnesses(&ws) }),
        None => c.claim(Claim::Subset { id: id(name), lhs, rhs: SetExpr::image("Q", s) }),
    };
    Ok(())
}

/// `Q` is `t`-proper with `Image(P) ⊆ Image(Q) ⊆ Image(P_{λ t})`.
/// The rank drops when `P_{λ t / 2}` has a collision.
pub fn john_outer(res: &JohnResult, cap: usize) -> Result<Certificate> {
    let mut c = Certificate::new("john-outer");
    c.param("t", format_rational(&res.t));
    c.progression("P", &res.input).progression("Q", &res.progression);
    c.result = john_result(res);
    let one = r(1);
    c.claim(Claim::Proper { id: id("output_t_proper"), progression: id("Q"), t: res.t.clone() });
    let lhs = SetExpr::image("P", one.clone());
    if res.outer_witnesses.is_empty() {
        c.claim(Claim::Subset { id: id("inner"), lhs, rhs: SetExpr::image("Q", one.clone()) });
    } else {
        c.claim(Claim::Witnessed { id: id("inner"), lhs, progression: id("Q"), t: one.clone(), witnesses: witnesses(&res.outer_witnesses) });
    }
    let s = res.cert.outer_factor.clone();
    let qi = image(&res.progression, &one, cap)?;
    let ws = locate_all(&res.input, &qi, &s).map_err(|x| Error::Audit(format!("{x} in Image(Q) but not in Image(P_s)")))?;
    let ws: Vec<Witness> = qi.iter().zip(ws).map(|(x, rep)| Witness { x: x.clone(), coeffs: rep.coeffs, h: rep.h }).collect();
    c.claim(Claim::Witnessed { id: id("outer"), lhs: SetExpr::image("Q", one.clone()), progression: id("P"), t: s, witnesses: ws });
    rank_claims(&mut c, &res.input, &res.cert.outer_factor / r(2), cap)?;
    if let Some(b) = exact(gap_john_outer_size_factor(res.input.rank(), &res.t)) {
        let q = Quantity::Ratio { num: SetExpr::image("Q", one.clone()), den: SetExpr::image("P", one) };
        c.claim(Claim::AtMost { id: id("size_upper"), quantity: q, bound: b });
    }
    Ok(c)
}

/// A `t`-proper progression containing `P`: the outer construction, with
/// the rank claim up front.
pub fn properize(res: &JohnResult, cap: usize) -> Result<Certificate> {
    let mut c = john_outer(res, cap)?;
    c.command = id("properize");
    Ok(c)
}

/// The discrete John GAP in lattice coordinates, as a progression in `Z^d`.
pub fn discrete_gap(dj: &DiscreteJohn) -> Result<CosetProgression> {
    let d = dj.coefficient_steps.rows();
    let g = AmbientGroup::lattice(d);
    let steps = dj.coefficient_steps.columns().into_iter().map(GroupElement).collect();
    Ok(CosetProgression::from_gap(Gap::new(g, dj.dims.clone(), steps)?))
}

/// `(t/λ) B ∩ Γ ⊆ Image(P_t) ⊆ t B ∩ Γ` for `t ∈ {1, 2}`, in lattice
/// coordinates, with the size and packing bounds.
pub fn discrete_john(body: &SymmetricPolytope<Rational>, lattice: &Lattice<Rational>, dj: &DiscreteJohn) -> Result<Certificate> {
    let mut c = Certificate::new("discrete-john");
    let p = discrete_gap(dj)?;
    let d = body.dim();
    c.body("B", body, lattice).progression("P", &p);
    c.result = json!({
        "dim": d,
        "dims": dj.dims.iter().map(rs).collect::<Vec<_>>(),
        "steps": dj.steps.columns().iter().map(|v| v.iter().map(rs).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "coefficient_steps": dj.coefficient_steps.columns().iter().map(|v| v.iter().map(int_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "lambda": rs(&dj.lambda),
        "lambda_bound": dj.lambda_bound,
        "rho": dj.rho,
        "defect": dj.defect,
        "lattice_points": dj.lattice_points,
        "size": int_to_json(&dj.size),
    });
    for t in [r(1), r(2)] {
        let tag = format_rational(&t);
        c.claim(Claim::Subset {
            id: format!("outer_at_{tag}"),
            lhs: SetExpr::image("P", t.clone()),
            rhs: SetExpr::LatticePoints { body: id("B"), t: t.clone() },
        });
        c.claim(Claim::Subset {
            id: format!("inner_at_{tag}"),
            lhs: SetExpr::LatticePoints { body: id("B"), t: &t / &dj.lambda },
            rhs: SetExpr::image("P", t.clone()),
        });
    }
    if d > 0 {
        let df = d as f64;
        if let Some(b) = exact((16.0 * df).powf(-3.5 * df)) {
            let q = Quantity::Ratio { num: SetExpr::image("P", r(1)), den: SetExpr::LatticePoints { body: id("B"), t: r(1) } };
            c.claim(Claim::AtLeast { id: id("size_lower"), quantity: q, bound: b });
        }
    }
    if d > 0 && dj.points_span {
        // |B ∩ Γ| <= 3^d d! vol(B) / (2^d covol(Γ)) when B ∩ Γ spans.
        let mut bound = body.volume()? / lattice.covolume();
        for k in 1..=d as i64 {
            bound = bound * r(3) * r(k) / r(2);
        }
        let q = Quantity::Size(SetExpr::LatticePoints { body: id("B"), t: r(1) });
        c.claim(Claim::AtMost { id: id("packing"), quantity: q, bound });
    }
    Ok(c)
}

/// `Image(P_t)` is covered by the listed translates of `Image(P)`.
pub fn cover(p: &CosetProgression, t: &Rational, cov: &CoveringCertificate) -> Certificate {
    let mut c = Certificate::new("cover");
    c.param("t", format_rational(t));
    let bases = FiniteSet::from_vec(p.group().clone(), cov.bases.clone());
    c.progression("P", p).set("bases", &bases);
    c.result = json!({
        "count": cov.count,
        "bound": rs(&cov.bound),
        "target_size": cov.target.len(),
        "tile_size": cov.tile.len(),
    });
    c.claim(Claim::Covering { id: id("covering"), target: SetExpr::image("P", t.clone()), tile: SetExpr::image("P", r(1)), bases: id("bases") });
    c.claim(Claim::AtMost { id: id("count"), quantity: Quantity::Count(id("bases")), bound: cov.bound.clone() });
    c
}

/// `Image(Q) ⊆ l Image(P) ⊆ Image(Q_K)`, `Q` proper and generating the same
/// subgroup. The input carries integer dimensions, so `Image(P_l)` is the
/// iterated sumset `l Image(P)`.
pub fn coalesce(res: &CoalescenceResult) -> Certificate {
    let mut c = Certificate::new("coalesce");
    c.param("l", res.l);
    c.progression("P", &res.input).progression("Q", &res.progression);
    let l = r(res.l as i64);
    let k = ri(&res.k_factor);
    c.result = json!({
        "l": res.l,
        "k_factor": int_to_json(&res.k_factor),
        "k_bound": k_bound(res.input.rank()),
        "rank_in": res.input.rank(),
        "rank_out": res.progression.rank(),
        "depth": res.depth,
        "size_ratio": res.size_ratio,
    });
    c.claim(Claim::Subset { id: id("inner"), lhs: SetExpr::image("Q", r(1)), rhs: SetExpr::image("P", l.clone()) });
    c.claim(Claim::Witnessed { id: id("outer"), lhs: SetExpr::image("P", l), progression: id("Q"), t: k.clone(), witnesses: witnesses(&res.witnesses) });
    c.claim(Claim::Proper { id: id("proper"), progression: id("Q"), t: r(1) });
    c.claim(Claim::SameGenerated { id: id("same_subgroup"), lhs: id("P"), rhs: id("Q") });
    c.claim(Claim::RankAtMost { id: id("rank"), progression: id("Q"), bound: res.input.rank() });
    if let Some(b) = exact(k_bound(res.input.rank())) {
        c.claim(Claim::AtMost { id: id("k_bound"), quantity: Quantity::Value(k), bound: b });
    }
    c
}

/// `x + Image(Q) ⊆ lA ⊆ x' + Image(Q_K)`.
pub fn sumset_structure(a: &FiniteSet, res: &SumsetStructureResult) -> Certificate {
    let mut c = Certificate::new("sumset-structure");
    c.param("l", res.l).param("d", res.d);
    c.set("A", a).progression("Q", &res.progression);
    let g = a.group();
    let la = SetExpr::sumset(SetExpr::set("A"), res.l);
    c.result = json!({
        "l": res.l,
        "d": res.d,
        "rank": res.rank(),
        "rank_reduced": res.rank_reduced,
        "x": res.x,
        "x_prime": res.x_prime,
        "k_factor": int_to_json(&res.k_factor),
        "k_construction": int_to_json(&res.k_construction),
        "doubling_index": res.doubling_index,
        "doubling": rs(&res.doubling.doubling),
        "core_size": res.core.len(),
        "x0": res.x0,
        "freiman_rank": res.freiman.progression.rank(),
        "freiman_size": res.freiman.size,
        "adjoined_steps": res.adjoined.steps.len(),
        "m": res.adjoined.m,
        "x1": res.adjoined.x1,
        "l_prime": res.l_prime,
        "coalescence_k": res.coalescence.as_ref().map(|c| int_to_json(&c.k_factor)),
        "route": format!("{:?}", res.route).to_lowercase(),
    });
    c.claim(Claim::Subset { id: id("inner"), lhs: SetExpr::translate(res.x.clone(), SetExpr::image("Q", r(1))), rhs: la.clone() });
    let shifted: Vec<Witness> = res
        .witnesses
        .iter()
        .map(|(y, rep)| Witness { x: g.sub(y, &res.x_prime), coeffs: rep.coeffs.clone(), h: rep.h.clone() })
        .collect();
    c.claim(Claim::Witnessed {
        id: id("outer"),
        lhs: SetExpr::translate(g.neg(&res.x_prime), la),
        progression: id("Q"),
        t: ri(&res.k_factor),
        witnesses: shifted,
    });
    c.claim(Claim::Proper { id: id("proper"), progression: id("Q"), t: r(1) });
    let bound = if res.rank_reduced { res.d as usize - 1 } else { res.d as usize };
    c.claim(Claim::RankAtMost { id: id("rank"), progression: id("Q"), bound });
    c
}

/// Whether `lA` is a coset of `<A - A>`, as computed.
pub fn sarkozy(a: &FiniteSet, l: u64, rep: &SarkozyReport) -> Certificate {
    let mut c = Certificate::new("sarkozy");
    c.param("l", l);
    c.set("A", a);
    c.result = json!({
        "holds": rep.holds,
        "coset_rep": rep.coset_rep,
        "subgroup_order": rep.subgroup_order,
        "sumset_size": rep.sumset_size,
        "gate": rep.gate,
        "first_l": rep.first_l,
    });
    c.claim(Claim::Coset { id: id("coset"), set: SetExpr::sumset(SetExpr::set("A"), l), differences_of: SetExpr::set("A"), expected: rep.holds });
    c
}

/// The construction, a collision of `P_2`, and which half-integer multiples
/// of `N` the image actually contains.
pub fn demo_counterexample(demo: &CounterexampleDemo, cap: usize) -> Result<Certificate> {
    let mut c = Certificate::new("demo-counterexample");
    c.param("n", demo.n);
    let p = &demo.progression;
    c.progression("P", p);
    let hit: Vec<GroupElement> = demo.half_multiples.iter().filter(|(_, b)| *b).map(|(h, _)| GroupElement(vec![h.clone()])).collect();
    let hit_set = FiniteSet::from_vec(p.group().clone(), hit);
    c.set("half_multiples_in_image", &hit_set);
    let hom = |h: &crate::structure::FreimanHomCheck| json!({"is_hom": h.is_hom, "witness": h.witness, "quadruples": h.quadruples});
    c.result = json!({
        "n": demo.n,
        "image_size": demo.image_size,
        "min": int_to_json(&demo.min),
        "max": int_to_json(&demo.max),
        "missing": demo.missing.iter().map(int_to_json).collect::<Vec<_>>(),
        "half_multiples_in_image": hit_set.len(),
        "half_multiples_total": demo.half_multiples.len(),
        "misses_half_multiples": demo.misses_half_multiples,
        "proper_at_2": demo.proper_at_2,
        "identity_map": hom(&demo.identity_map),
        "coordinate_map": hom(&demo.coordinate_map),
    });
    let two = r(2);
    if let Some((a, b)) = is_proper(p, &two, cap)?.witness {
        c.claim(Claim::Collision { id: id("improper_at_2"), progression: id("P"), t: two, first: formal(&a), second: formal(&b) });
    }
    c.claim(Claim::Subset { id: id("half_multiples"), lhs: SetExpr::set("half_multiples_in_image"), rhs: SetExpr::image("P", r(1)) });
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::audit;
    use crate::john::JohnOptions;

    const CAP: usize = 100_000;

    fn p12() -> CosetProgression {
        CosetProgression::simple(AmbientGroup::integers(), &[1, 1], &[&[1], &[2]]).unwrap()
    }

    fn passes(c: &Certificate) {
        let rep = audit(c, CAP);
        assert!(rep.holds, "{:#?}", rep.reports.iter().filter(|r| !r.holds).collect::<Vec<_>>());
        assert_eq!(Certificate::parse(&c.to_json()).unwrap(), *c);
    }

    #[test]
    fn john_certificates_audit() {
        let opts = JohnOptions::default();
        let res = crate::john::gap_john(&p12(), &r(1), &opts).unwrap();
        passes(&john(&res, CAP).unwrap());
        let outer = crate::john::gap_john_outer(&p12(), &r(1), &opts).unwrap();
        assert!(outer.progression.rank() <= 1);
        let c = properize(&outer, CAP).unwrap();
        passes(&c);
        assert!(c.claims.iter().any(|c| matches!(c, Claim::RankAtMost { bound: 1, .. })));
        let outer = crate::john::gap_john_outer(&p12(), &r(2), &opts).unwrap();
        passes(&john_outer(&outer, CAP).unwrap());
    }

    #[test]
    fn other_certificates_audit() {
        let body = SymmetricPolytope::cuboid(&[r(3), r(2)]).unwrap();
        let lat = Lattice::standard(2);
        let dj = crate::john::discrete_john(&body, &lat, CAP).unwrap();
        passes(&discrete_john(&body, &lat, &dj).unwrap());

        let p = p12();
        let cov = crate::covering::doubling_cover(&p, &r(3), CAP).unwrap();
        passes(&cover(&p, &r(3), &cov));

        let co = crate::coalescence::coalesce(&p, 5, &JohnOptions::default()).unwrap();
        passes(&coalesce(&co));

        let a = FiniteSet::cyclic(5, &[0, 1]);
        let rep = crate::structure::sarkozy_check(&a, 4, CAP).unwrap();
        assert!(rep.holds);
        passes(&sarkozy(&a, 4, &rep));

        let demo = crate::structure::demo_counterexample(6, CAP).unwrap();
        passes(&demo_counterexample(&demo, CAP).unwrap());

        let a = FiniteSet::integers(&[0, 1]);
        let st = crate::structure::iterated_structure(&a, 64, 2, &Default::default()).unwrap();
        passes(&sumset_structure(&a, &st));
    }

    #[test]
    fn removing_a_translate_breaks_the_cover() {
        let p = CosetProgression::simple(AmbientGroup::integers(), &[1], &[&[1]]).unwrap();
        let cov = crate::covering::doubling_cover(&p, &r(3), CAP).unwrap();
        let mut c = cover(&p, &r(3), &cov);
        if let Some(crate::certificate::Object::Set(s)) = c.objects.get_mut("bases") {
            s.elements.pop();
        }
        let rep = audit(&c, CAP);
        assert!(!rep.holds);
        assert!(rep.reports[0].counterexample.as_ref().is_some_and(|v| v.len() == 1));
    }
}
