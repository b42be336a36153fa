#![allow(dead_code)]

use cohcheck::syntax::{Ctx, CtxMor, Name, Tm, Ty};

pub fn n(s: &str) -> Name {
    Name::new(s).unwrap()
}

pub fn v(s: &str) -> Tm {
    Tm::Var(n(s))
}

pub fn hom(base: Ty, lhs: Tm, rhs: Tm) -> Ty {
    Ty::hom(base, lhs, rhs)
}

pub fn ctx(entries: &[(&str, Ty)]) -> Ctx {
    Ctx::new(
        entries
            .iter()
            .map(|(name, ty)| (n(name), ty.clone()))
            .collect(),
    )
    .unwrap()
}

pub fn mor(terms: Vec<Tm>) -> CtxMor {
    CtxMor::new(terms)
}

/// The subscript of the inverse operation: `(x y : *) (t : x = y) |- y = x`.
pub fn inv_head() -> (Ctx, Ty) {
    let c = ctx(&[
        ("x", Ty::Star),
        ("y", Ty::Star),
        ("t", hom(Ty::Star, v("x"), v("y"))),
    ]);
    let t = hom(Ty::Star, v("y"), v("x"));
    (c, t)
}

/// The subscript of the constant-path operation: `(x : *) |- x = x`.
pub fn idp_head() -> (Ctx, Ty) {
    let c = ctx(&[("x", Ty::Star)]);
    let t = hom(Ty::Star, v("x"), v("x"));
    (c, t)
}
