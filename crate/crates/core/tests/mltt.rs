//! Elaboration and normalization: towers, diagonals, the iterated
//! eliminator, the diagonal lemmas over the whole corpus, and the
//! J computation rule (including a deliberately corrupted eliminator).

mod common;

use cohcheck::check::{diagonal, DeclKind};
use cohcheck::corpus;
use cohcheck::mltt::{
    check_diagonal_lemmas, diag, elaborate_mor, elaborate_tm, elaborate_ty, fresh_base,
    iterated_tower, j_delta, normalize_tm, normalize_ty, Clo, JApp, MTm, MTy,
};
use cohcheck::syntax::{Name, Tm, Ty};
use common::*;

fn mvar(x: &str) -> MTm {
    MTm::Var(n(x))
}

/// The comp context (x y : *) (p : x = y) (z : *) (q : y = z).
fn comp_ctx() -> cohcheck::syntax::Ctx {
    ctx(&[
        ("x", Ty::Star),
        ("y", Ty::Star),
        ("p", hom(Ty::Star, v("x"), v("y"))),
        ("z", Ty::Star),
        ("q", hom(Ty::Star, v("y"), v("z"))),
    ])
}

/// The base case `\a. i_k` of an unfolded coherence.
fn tower_case(a: &Name, k: u32) -> Clo {
    Clo {
        params: vec![a.clone()],
        body: iterated_tower(a, k).1,
    }
}

#[test]
fn towers() {
    let a = n("a");
    let (ty0, tm0) = iterated_tower(&a, 0);
    assert_eq!((ty0, tm0), (MTy::Base, mvar("a")));
    let (ty1, tm1) = iterated_tower(&a, 1);
    assert_eq!(ty1, MTy::id(MTy::Base, mvar("a"), mvar("a")));
    assert_eq!(tm1, MTm::idp(mvar("a")));
    let (ty2, tm2) = iterated_tower(&a, 2);
    assert_eq!(ty2, MTy::id(ty1, tm1.clone(), tm1));
    assert_eq!(tm2.to_string(), "idp^2 a");
    assert_eq!(ty2.to_string(), "Id^2 A a");
}

#[test]
fn diagonals() {
    let a = n("a");
    assert_eq!(diag(&ctx(&[("x", Ty::Star)]), &a).unwrap(), vec![mvar("a")]);
    let (inv_ctx, _) = inv_head();
    assert_eq!(
        diag(&inv_ctx, &a).unwrap(),
        vec![mvar("a"), mvar("a"), MTm::idp(mvar("a"))]
    );
    assert_eq!(
        diag(&comp_ctx(), &a).unwrap(),
        vec![
            mvar("a"),
            mvar("a"),
            MTm::idp(mvar("a")),
            mvar("a"),
            MTm::idp(mvar("a"))
        ]
    );
    // Non-contractible contexts have no diagonal.
    assert!(diag(&ctx(&[("x", Ty::Star), ("y", Ty::Star)]), &a).is_err());
}

#[test]
fn elaborated_terms_at_the_diagonal() {
    let a = n("a");
    let (inv_ctx, inv_ty) = inv_head();
    let id_inv = diag(&inv_ctx, &a).unwrap();

    // The path variable goes to the constant path.
    let t_img = elaborate_tm(&inv_ctx, &v("t")).apply(&id_inv);
    assert_eq!(t_img, MTm::idp(mvar("a")));

    // The constant-path coherence applied to a point.
    let (idp_ctx, idp_ty) = idp_head();
    let a_ctx = ctx(&[("a", Ty::Star)]);
    let idp_a = Tm::coh(idp_ctx, idp_ty, mor(vec![v("a")]));
    let nf = normalize_tm(&elaborate_tm(&a_ctx, &idp_a).apply(&[mvar("a")])).unwrap();
    assert_eq!(nf, MTm::idp(mvar("a")));
    assert_eq!(nf.to_string(), "idp^1 a");

    // The inverse at the diagonal also normalizes to the constant path.
    let inverse = Tm::coh(inv_ctx.clone(), inv_ty.clone(), inv_ctx.identity());
    let nf = normalize_tm(&elaborate_tm(&inv_ctx, &inverse).apply(&id_inv)).unwrap();
    assert_eq!(nf, MTm::idp(mvar("a")));

    // The elaborated return type of the inverse at the diagonal is I_1.
    let ty_nf = normalize_ty(&elaborate_ty(&inv_ctx, &inv_ty).apply(&id_inv)).unwrap();
    assert_eq!(ty_nf, iterated_tower(&a, 1).0);
}

#[test]
fn j_delta_base_and_step() {
    let a = n("a");
    // Base case: J over (x : *) is just the diagonal case.
    let x_ctx = ctx(&[("x", Ty::Star)]);
    let j = j_delta(
        &x_ctx,
        &elaborate_ty(&x_ctx, &Ty::Star),
        &tower_case(&a, 0),
    )
    .unwrap();
    assert_eq!(j.apply(&[mvar("b")]), mvar("b"));

    // Step case over the inverse context: fires at the diagonal ...
    let (inv_ctx, inv_ty) = inv_head();
    let p = elaborate_ty(&inv_ctx, &inv_ty);
    let j = j_delta(&inv_ctx, &p, &tower_case(&a, 1)).unwrap();
    let at_diag = j.apply(&diag(&inv_ctx, &a).unwrap());
    assert_eq!(normalize_tm(&at_diag).unwrap(), MTm::idp(mvar("a")));

    // ... and is stuck on a symbolic path.
    let symbolic = j.apply(&[mvar("a"), mvar("b"), mvar("p")]);
    let nf = normalize_tm(&symbolic).unwrap();
    match &nf {
        MTm::J(japp) => {
            assert_eq!(japp.major, mvar("b"));
            assert_eq!(japp.path, mvar("p"));
        }
        other => panic!("expected a stuck J, got {other}"),
    }
    // Normal forms are stable.
    assert_eq!(normalize_tm(&nf).unwrap(), nf);
}

#[test]
fn diagonal_lemmas_hold_over_the_corpus() {
    let (table, _) = corpus::load();
    let mut names = Vec::new();
    for entry in table.iter() {
        if !matches!(entry.kind, DeclKind::Coh) {
            continue;
        }
        let report = check_diagonal_lemmas(&entry.ctx, &entry.ty, &entry.name)
            .unwrap_or_else(|e| panic!("{e}"));
        let a = fresh_base(&entry.ctx);
        let (want_ty, want_tm) = iterated_tower(&a, entry.ty.dim());
        assert_eq!(report.type_nf, want_ty.to_string(), "{}", entry.name);
        assert_eq!(report.term_nf, want_tm.to_string(), "{}", entry.name);
        names.push(entry.name.clone());
    }
    assert!(names.len() >= 18, "only {} coherences", names.len());
    assert!(names.contains(&n("pentagon")));
    assert!(names.contains(&n("invinv")));
    let (table, _) = corpus::load();
    assert_eq!(table.get(&n("pentagon")).unwrap().ty.dim(), 3);
}

#[test]
fn j_computes_on_corpus_motives() {
    // For every coherence of the corpus, the iterated eliminator built from
    // its own motive satisfies the computation rule J(P, d)(id) = d(a).
    let (table, _) = corpus::load();
    let mut seen = 0;
    for entry in table.iter() {
        if !matches!(entry.kind, DeclKind::Coh) {
            continue;
        }
        let a = fresh_base(&entry.ctx);
        let p = elaborate_ty(&entry.ctx, &entry.ty);
        let d = tower_case(&a, entry.ty.dim());
        let j = j_delta(&entry.ctx, &p, &d).unwrap();
        let fired = normalize_tm(&j.apply(&diag(&entry.ctx, &a).unwrap())).unwrap();
        assert_eq!(fired, iterated_tower(&a, entry.ty.dim()).1, "{}", entry.name);
        seen += 1;
    }
    assert!(seen >= 18);
}

#[test]
fn corrupted_j_fails_to_compute() {
    let a = n("a");
    let (inv_ctx, inv_ty) = inv_head();
    let p = elaborate_ty(&inv_ctx, &inv_ty);
    let correct = j_delta(&inv_ctx, &p, &tower_case(&a, 1)).unwrap();
    let MTm::J(japp) = &correct.body else {
        panic!("step case must be a J");
    };

    // Swapping the major premise and the path argument leaves the
    // eliminator stuck even at the diagonal.
    let mut swapped = (**japp).clone();
    std::mem::swap(&mut swapped.major, &mut swapped.path);
    let corrupted = Clo {
        params: correct.params.clone(),
        body: MTm::japp(swapped),
    };
    let expected = iterated_tower(&a, 1).1;
    let nf = normalize_tm(&corrupted.apply(&diag(&inv_ctx, &a).unwrap())).unwrap();
    assert_ne!(nf, expected);
    assert!(matches!(nf, MTm::J(_)), "swapped J must be stuck");

    // A wrong diagonal case computes, but to the wrong tower.
    let wrong_case = JApp {
        diag_case: iterated_tower(&n("x"), 2).1,
        ..(**japp).clone()
    };
    let corrupted = Clo {
        params: correct.params.clone(),
        body: MTm::japp(wrong_case),
    };
    let nf = normalize_tm(&corrupted.apply(&diag(&inv_ctx, &a).unwrap())).unwrap();
    assert_eq!(nf, iterated_tower(&a, 2).1);
    assert_ne!(nf, expected);
}

#[test]
fn elaborated_syntactic_diagonal_matches_diag() {
    // The syntactic diagonal of the checker elaborates, component by
    // component, to the semantic diagonal.
    let (table, _) = corpus::load();
    let a_ctx = ctx(&[("a", Ty::Star)]);
    let mut seen = 0;
    for entry in table.iter() {
        let Ok(syn) = diagonal(&entry.ctx, &n("a")) else {
            continue;
        };
        let semantic: Vec<MTm> = diag(&entry.ctx, &n("a"))
            .unwrap()
            .iter()
            .map(|t| normalize_tm(t).unwrap())
            .collect();
        let elaborated: Vec<MTm> = elaborate_mor(&a_ctx, &syn)
            .iter()
            .map(|c| normalize_tm(&c.apply(&[mvar("a")])).unwrap())
            .collect();
        assert_eq!(semantic, elaborated, "{}", entry.name);
        seen += 1;
    }
    assert!(seen >= 18);
}

#[test]
fn normalization_is_idempotent_on_corpus_material() {
    let (table, _) = corpus::load();
    for entry in table.iter() {
        if !matches!(entry.kind, DeclKind::Coh) {
            continue;
        }
        // The fully symbolic instance: identity arguments, nothing fires.
        let own = Tm::coh(entry.ctx.clone(), entry.ty.clone(), entry.ctx.identity());
        let body = elaborate_tm(&entry.ctx, &own).body;
        let once = normalize_tm(&body).unwrap();
        assert_eq!(normalize_tm(&once).unwrap(), once, "{}", entry.name);
    }
}
