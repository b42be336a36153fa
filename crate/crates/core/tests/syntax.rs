//! Oracle tests for the structural operations: the expected values are
//! worked out by hand from the definitions.

mod common;

use std::collections::BTreeSet;

use cohcheck::check::DeclKind;
use cohcheck::corpus;
use cohcheck::syntax::{
    project, substitute, syntactic_eq, Ctx, CtxMor, Name, Node, Tm, Ty,
};
use common::*;
use proptest::prelude::*;

#[test]
fn free_vars_of_coh_skip_the_subscript() {
    // coh_{(x,y:*, t:x=y)}{y=x}(y, z, g): the subscript binds x, y, t; the
    // free variables are exactly the argument occurrences.
    let (c, t) = inv_head();
    let term = Tm::coh(c, t, mor(vec![v("y"), v("z"), v("g")]));
    let expected: BTreeSet<Name> = [n("y"), n("z"), n("g")].into_iter().collect();
    assert_eq!(term.free_vars(), expected);
}

#[test]
fn free_vars_of_var_and_mixed_type() {
    assert_eq!(v("x").free_vars(), [n("x")].into_iter().collect());
    // x =_* coh_{(x:*)}{x=x}(w) has free variables x and w only.
    let (c, t) = idp_head();
    let ty = hom(Ty::Star, v("x"), Tm::coh(c, t, mor(vec![v("w")])));
    let expected: BTreeSet<Name> = [n("x"), n("w")].into_iter().collect();
    assert_eq!(ty.free_vars(), expected);
}

#[test]
fn substitute_replaces_a_variable() {
    let c = ctx(&[("x", Ty::Star)]);
    let out = substitute(&v("x"), &mor(vec![v("a")]), &c).unwrap();
    assert_eq!(out, v("a"));
}

#[test]
fn substitute_leaves_subscripts_byte_identical() {
    // (coh_{(x,y:*, t:x=y)}{y=x}(p,q,r))[(u,v,w)/(p,q:*, r:p=q)]
    let (sub_ctx, sub_ty) = inv_head();
    let term = Tm::coh(sub_ctx.clone(), sub_ty.clone(), mor(vec![v("p"), v("q"), v("r")]));
    let target = ctx(&[
        ("p", Ty::Star),
        ("q", Ty::Star),
        ("r", hom(Ty::Star, v("p"), v("q"))),
    ]);
    let out = substitute(&term, &mor(vec![v("u"), v("v"), v("w")]), &target).unwrap();
    match &out {
        Tm::Coh(c) => {
            assert_eq!(c.ctx, sub_ctx, "subscript context changed");
            assert_eq!(c.ty, sub_ty, "subscript type changed");
            assert_eq!(
                format!("{}|{}", c.ctx, c.ty),
                format!("{}|{}", sub_ctx, sub_ty),
                "printed subscript differs"
            );
            assert_eq!(c.args, mor(vec![v("u"), v("v"), v("w")]));
        }
        Tm::Var(_) => panic!("substitution must keep the coh node"),
    }
}

#[test]
fn substitute_ignores_entries_for_absent_variables() {
    // x[(gamma,u)/(ctx, z:T)] = x[gamma/ctx] when z is not free in x.
    let (c, t) = inv_head();
    let term = Tm::coh(c, t, mor(vec![v("p"), v("p"), v("r")]));
    let small = ctx(&[
        ("p", Ty::Star),
        ("r", hom(Ty::Star, v("p"), v("p"))),
    ]);
    let mut big = small.clone();
    big.push(n("z"), Ty::Star).unwrap();
    let short = mor(vec![v("a"), v("b")]);
    let long = mor(vec![v("a"), v("b"), v("junk")]);
    assert_eq!(
        substitute(&term, &short, &small).unwrap(),
        substitute(&term, &long, &big).unwrap()
    );
}

#[test]
fn project_is_positional_and_matches_substitute() {
    let c = ctx(&[
        ("x", Ty::Star),
        ("y", Ty::Star),
        ("t", hom(Ty::Star, v("x"), v("y"))),
    ]);
    let gamma = mor(vec![v("a"), v("b"), v("p")]);
    assert_eq!(project(&gamma, &c, &n("y")).unwrap(), v("b"));
    assert_eq!(project(&gamma, &c, &n("x")).unwrap(), v("a"));
    for x in ["x", "y", "t"] {
        assert_eq!(
            project(&gamma, &c, &n(x)).unwrap(),
            substitute(&v(x), &gamma, &c).unwrap()
        );
    }
    let single = ctx(&[("x", Ty::Star)]);
    assert_eq!(project(&mor(vec![v("a")]), &single, &n("x")).unwrap(), v("a"));
}

#[test]
fn depth_base_cases() {
    assert_eq!(Ty::Star.depth(), 0);
    assert_eq!(v("x").depth(), 0);
    assert_eq!(CtxMor::new(vec![]).depth(), 0);
}

#[test]
fn depth_of_applied_inverse_is_one() {
    let (c, t) = inv_head();
    let term = Tm::coh(c, t, mor(vec![v("a"), v("b"), v("p")]));
    assert_eq!(term.depth(), 1);
}

#[test]
fn corpus_depths_and_dims() {
    let (table, reports) = corpus::load();
    let get = |name: &str| table.get(&n(name)).unwrap();
    // Double inverse: return type t = inv(inv(t)) nests operations once.
    assert_eq!(get("invinv").ty.depth(), 1);
    let invinv = reports.iter().find(|r| r.decl == n("invinv")).unwrap();
    assert_eq!(invinv.depth, 1);
    // Return type of comp mentions only variables.
    let comp = reports.iter().find(|r| r.decl == n("comp")).unwrap();
    assert_eq!((comp.dim, comp.depth), (1, 0));
    // Exchange is a 3-cell between 2-cells.
    assert_eq!(get("exchange").ty.dim(), 3);
    let pentagon = reports.iter().find(|r| r.decl == n("pentagon")).unwrap();
    assert_eq!(pentagon.dim, 3);
}

#[test]
fn dim_base_cases() {
    assert_eq!(Ty::Star.dim(), 0);
    assert_eq!(hom(Ty::Star, v("x"), v("y")).dim(), 1);
}

#[test]
fn alpha_identifies_renamed_subscripts() {
    let (c, t) = idp_head();
    let a = Tm::coh(c, t, mor(vec![v("a")]));
    let cw = ctx(&[("w", Ty::Star)]);
    let tw = hom(Ty::Star, v("w"), v("w"));
    let b = Tm::coh(cw, tw, mor(vec![v("a")]));
    assert_ne!(a, b);
    assert_eq!(a.alpha_canonicalize(), b.alpha_canonicalize());
    assert!(syntactic_eq(&a, &b));
}

#[test]
fn alpha_keeps_variables_and_orientation_matters() {
    assert_eq!(v("x").alpha_canonicalize(), v("x"));
    let xy = hom(Ty::Star, v("x"), v("y"));
    let yx = hom(Ty::Star, v("y"), v("x"));
    assert!(syntactic_eq(&xy, &xy.clone()));
    assert!(!syntactic_eq(&xy, &yx));
}

// Random (not necessarily well-typed) terms for the purely structural
// properties: canonicalization idempotence and depth invariance.

fn arb_name() -> impl Strategy<Value = Name> {
    "[a-z][a-z0-9]{0,2}".prop_map(|s| Name::new(s).unwrap())
}

fn arb_ty(depth: u32) -> BoxedStrategy<Ty> {
    if depth == 0 {
        Just(Ty::Star).boxed()
    } else {
        prop_oneof![
            Just(Ty::Star),
            (arb_ty(depth - 1), arb_tm(depth - 1), arb_tm(depth - 1))
                .prop_map(|(b, l, r)| Ty::hom(b, l, r)),
        ]
        .boxed()
    }
}

fn arb_ctx(depth: u32) -> BoxedStrategy<Ctx> {
    prop::collection::vec(arb_ty(depth), 1..4)
        .prop_map(|tys| {
            Ctx::new(
                tys.into_iter()
                    .enumerate()
                    .map(|(i, ty)| (Name::new(format!("b{i}")).unwrap(), ty))
                    .collect(),
            )
            .unwrap()
        })
        .boxed()
}

fn arb_tm(depth: u32) -> BoxedStrategy<Tm> {
    if depth == 0 {
        arb_name().prop_map(Tm::Var).boxed()
    } else {
        prop_oneof![
            arb_name().prop_map(Tm::Var),
            (
                arb_ctx(depth - 1),
                arb_ty(depth - 1),
                prop::collection::vec(arb_tm(depth - 1), 0..4)
            )
                .prop_map(|(c, t, args)| Tm::coh(c, t, CtxMor::new(args))),
        ]
        .boxed()
    }
}

proptest! {
    #[test]
    fn alpha_is_idempotent(t in arb_tm(3)) {
        let once = t.alpha_canonicalize();
        prop_assert_eq!(once.clone(), once.alpha_canonicalize());
    }

    #[test]
    fn depth_invariant_under_alpha(t in arb_tm(3)) {
        prop_assert_eq!(t.depth(), t.alpha_canonicalize().depth());
    }
}

#[test]
fn depth_and_dim_invariant_under_variable_substitution() {
    // Renaming-by-variables substitution keeps depth of terms and dim of
    // types, over all corpus material.
    let (table, _) = corpus::load();
    for entry in table.iter() {
        let renamed = Ctx::new(
            entry
                .ctx
                .names()
                .enumerate()
                .map(|(i, _)| (n(&format!("r{i}")), Ty::Star))
                .collect(),
        )
        .unwrap();
        let gamma = renamed.identity();
        let ty = substitute(&entry.ty, &gamma, &entry.ctx).unwrap();
        assert_eq!(ty.dim(), entry.ty.dim());
        assert_eq!(ty.depth(), entry.ty.depth());
        if let DeclKind::Def(body) = &entry.kind {
            let out = substitute(body, &gamma, &entry.ctx).unwrap();
            assert_eq!(out.depth(), body.depth());
        }
    }
}

#[test]
fn free_vars_after_substitution_come_from_selected_terms() {
    let (table, _) = corpus::load();
    for entry in table.iter() {
        let fresh: Vec<Tm> = (0..entry.ctx.len()).map(|i| v(&format!("f{i}"))).collect();
        let gamma = CtxMor::new(fresh);
        let out = substitute(&entry.ty, &gamma, &entry.ctx).unwrap();
        let selected: BTreeSet<Name> = entry
            .ty
            .free_vars()
            .iter()
            .map(|x| {
                project(&gamma, &entry.ctx, x)
                    .unwrap()
                    .free_vars()
                    .into_iter()
            })
            .flatten()
            .collect();
        assert!(out.free_vars().is_subset(&selected));
    }
}
