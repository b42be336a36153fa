//! Elaboration into a Martin-Lof fragment with identity types and J.
//!
//! The target has one abstract base type `A`, identity types `Id_T(u,v)`,
//! constant paths `idp`, and the J eliminator with its definitional
//! computation rule, here implemented as a reduction. A coherence operation
//! over a contractible context elaborates to an iterated J ([`j_delta`])
//! whose base case is an iterated constant path; the diagonal lemmas state
//! that at the diagonal `id^D_a` everything normalizes to the towers
//! `I_n` / `i_n` ([`iterated_tower`]).
//!
//! Binders are defunctionalized closures applied only in full, so
//! normalization needs no general beta reduction: the only redexes are
//! J-on-idp and the unfolding of elaborated coherences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::check::{check_contractible, infer_type, CheckError};
use crate::syntax::{Ctx, CtxMor, Name, Tm, Ty};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MTy {
    /// The abstract base type `A`.
    Base,
    Id(Box<MId>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MId {
    pub base: MTy,
    pub lhs: MTm,
    pub rhs: MTm,
}

impl MTy {
    pub fn id(base: MTy, lhs: MTm, rhs: MTm) -> MTy {
        MTy::Id(Box::new(MId { base, lhs, rhs }))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MTm {
    Var(Name),
    Idp(Box<MTm>),
    J(Box<JApp>),
    /// A not-yet-unfolded elaborated coherence operation.
    CohRef(Box<MCoh>),
}

/// One application of the regular J rule: `J(u, P, d)(v, p)`, where the
/// diagonal case `d` is already the fully applied term `d : P(u, idp u)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JApp {
    pub base_point: MTm,
    pub motive: TyClo,
    pub diag_case: MTm,
    pub major: MTm,
    pub path: MTm,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MCoh {
    pub ctx: Ctx,
    pub ty: Ty,
    pub args: Vec<MTm>,
}

impl MTm {
    pub fn idp(t: MTm) -> MTm {
        MTm::Idp(Box::new(t))
    }

    pub fn japp(j: JApp) -> MTm {
        MTm::J(Box::new(j))
    }
}

/// A defunctionalized term binder; applied only in full.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clo {
    pub params: Vec<Name>,
    pub body: MTm,
}

/// A defunctionalized type binder; applied only in full.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TyClo {
    pub params: Vec<Name>,
    pub body: MTy,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlttError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("lemma {lemma} fails for {decl}: {detail}")]
    LemmaFailure {
        lemma: &'static str,
        decl: Name,
        detail: String,
    },
}

// ---------------------------------------------------------------------------
// Substitution over MLTT terms

type Map = BTreeMap<Name, MTm>;

fn free_tm(t: &MTm, out: &mut BTreeSet<Name>) {
    match t {
        MTm::Var(x) => {
            out.insert(x.clone());
        }
        MTm::Idp(u) => free_tm(u, out),
        MTm::J(j) => {
            free_tm(&j.base_point, out);
            free_ty_clo(&j.motive, out);
            free_tm(&j.diag_case, out);
            free_tm(&j.major, out);
            free_tm(&j.path, out);
        }
        MTm::CohRef(c) => {
            for a in &c.args {
                free_tm(a, out);
            }
        }
    }
}

fn free_ty(t: &MTy, out: &mut BTreeSet<Name>) {
    if let MTy::Id(i) = t {
        free_ty(&i.base, out);
        free_tm(&i.lhs, out);
        free_tm(&i.rhs, out);
    }
}

fn free_ty_clo(c: &TyClo, out: &mut BTreeSet<Name>) {
    let mut inner = BTreeSet::new();
    free_ty(&c.body, &mut inner);
    for p in &c.params {
        inner.remove(p);
    }
    out.extend(inner);
}

fn subst_tm(t: &MTm, map: &Map) -> MTm {
    match t {
        MTm::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
        MTm::Idp(u) => MTm::idp(subst_tm(u, map)),
        MTm::J(j) => MTm::japp(JApp {
            base_point: subst_tm(&j.base_point, map),
            motive: subst_ty_clo(&j.motive, map),
            diag_case: subst_tm(&j.diag_case, map),
            major: subst_tm(&j.major, map),
            path: subst_tm(&j.path, map),
        }),
        MTm::CohRef(c) => MTm::CohRef(Box::new(MCoh {
            ctx: c.ctx.clone(),
            ty: c.ty.clone(),
            args: c.args.iter().map(|a| subst_tm(a, map)).collect(),
        })),
    }
}

fn subst_ty(t: &MTy, map: &Map) -> MTy {
    match t {
        MTy::Base => MTy::Base,
        MTy::Id(i) => MTy::id(
            subst_ty(&i.base, map),
            subst_tm(&i.lhs, map),
            subst_tm(&i.rhs, map),
        ),
    }
}

/// Substitutes under a binder, renaming its parameters away from the free
/// variables of the images to avoid capture.
fn subst_ty_clo(c: &TyClo, map: &Map) -> TyClo {
    let mut inner: Map = map
        .iter()
        .filter(|(k, _)| !c.params.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return c.clone();
    }
    let mut avoid = BTreeSet::new();
    for v in inner.values() {
        free_tm(v, &mut avoid);
    }
    let mut params = Vec::with_capacity(c.params.len());
    for p in &c.params {
        if avoid.contains(p) {
            let fresh = (1..)
                .map(|k| Name::internal(format!("{p}~{k}")))
                .find(|cand| !avoid.contains(cand) && !c.params.contains(cand))
                .expect("unbounded candidate stream");
            inner.insert(p.clone(), MTm::Var(fresh.clone()));
            avoid.insert(fresh.clone());
            params.push(fresh);
        } else {
            avoid.insert(p.clone());
            params.push(p.clone());
        }
    }
    TyClo {
        params,
        body: subst_ty(&c.body, &inner),
    }
}

fn full_map(params: &[Name], args: &[MTm]) -> Map {
    assert_eq!(params.len(), args.len(), "closures are applied in full");
    params.iter().cloned().zip(args.iter().cloned()).collect()
}

impl Clo {
    pub fn apply(&self, args: &[MTm]) -> MTm {
        subst_tm(&self.body, &full_map(&self.params, args))
    }
}

impl TyClo {
    pub fn apply(&self, args: &[MTm]) -> MTy {
        subst_ty(&self.body, &full_map(&self.params, args))
    }
}

// ---------------------------------------------------------------------------
// Towers and elaboration

/// `(I_n, i_n)` over the base point `a`: `I_0 = A`, `i_0 = a`,
/// `I_{n+1} = Id_{I_n}(i_n, i_n)`, `i_{n+1} = idp i_n`.
pub fn iterated_tower(a: &Name, n: u32) -> (MTy, MTm) {
    let mut ty = MTy::Base;
    let mut tm = MTm::Var(a.clone());
    for _ in 0..n {
        ty = MTy::id(ty, tm.clone(), tm.clone());
        tm = MTm::idp(tm);
    }
    (ty, tm)
}

fn erase_tm(t: &Tm) -> MTm {
    match t {
        Tm::Var(x) => MTm::Var(x.clone()),
        Tm::Coh(c) => MTm::CohRef(Box::new(MCoh {
            ctx: c.ctx.clone(),
            ty: c.ty.clone(),
            args: c.args.terms().iter().map(erase_tm).collect(),
        })),
    }
}

fn erase_ty(t: &Ty) -> MTy {
    match t {
        Ty::Star => MTy::Base,
        Ty::Hom(h) => MTy::id(erase_ty(&h.base), erase_tm(&h.lhs), erase_tm(&h.rhs)),
    }
}

/// The elaboration of a term as a binder over the names of its context:
/// variables project, coherences become deferred [`MCoh`] references that
/// [`normalize_tm`] unfolds through [`j_delta`].
pub fn elaborate_tm(ctx: &Ctx, t: &Tm) -> Clo {
    Clo {
        params: ctx.names().cloned().collect(),
        body: erase_tm(t),
    }
}

pub fn elaborate_ty(ctx: &Ctx, t: &Ty) -> TyClo {
    TyClo {
        params: ctx.names().cloned().collect(),
        body: erase_ty(t),
    }
}

/// Pointwise elaboration of a context morphism.
pub fn elaborate_mor(ctx: &Ctx, gamma: &CtxMor) -> Vec<Clo> {
    gamma
        .terms()
        .iter()
        .map(|t| elaborate_tm(ctx, t))
        .collect()
}

/// The diagonal `id^D_a`: the base point goes to `a`, each block
/// `(y : T), (z : u = y)` to the image of `u` and the constant path on it.
pub fn diag(delta: &Ctx, a: &Name) -> Result<Vec<MTm>, CheckError> {
    check_contractible(delta)?;
    let mut terms = vec![MTm::Var(a.clone())];
    let mut i = 1;
    while i < delta.len() {
        let prefix = delta.prefix(i);
        let (_, z_ty) = &delta.entries()[i + 1];
        let h = match z_ty {
            Ty::Hom(h) => h,
            Ty::Star => unreachable!("checked contractible"),
        };
        let u_img = elaborate_tm(&prefix, &h.lhs).apply(&terms);
        terms.push(u_img.clone());
        terms.push(MTm::idp(u_img));
        i += 2;
    }
    Ok(terms)
}

/// The iterated eliminator `J_D(P, d)` as a binder over the names of `D`:
/// the base case applies `d`, the step case wraps one regular J (on the
/// final path entry) around `J_{D'}`, so that at the diagonal every J fires.
pub fn j_delta(delta: &Ctx, p: &TyClo, d: &Clo) -> Result<Clo, CheckError> {
    check_contractible(delta)?;
    if delta.len() == 1 {
        let x = delta.entries()[0].0.clone();
        return Ok(Clo {
            params: vec![x.clone()],
            body: d.apply(&[MTm::Var(x)]),
        });
    }
    let n = delta.len();
    let (y, _) = delta.entries()[n - 2].clone();
    let (z, z_ty) = delta.entries()[n - 1].clone();
    let prefix = delta.prefix(n - 2);
    let h = match &z_ty {
        Ty::Hom(h) => h,
        Ty::Star => unreachable!("checked contractible"),
    };
    let vars: Vec<MTm> = prefix.names().map(|x| MTm::Var(x.clone())).collect();
    let u_e = elaborate_tm(&prefix, &h.lhs).apply(&vars);

    // P'(d') = P(d', u, idp u), the motive for the recursive call.
    let mut diag_args = vars.clone();
    diag_args.push(u_e.clone());
    diag_args.push(MTm::idp(u_e.clone()));
    let p_step = TyClo {
        params: prefix.names().cloned().collect(),
        body: p.apply(&diag_args),
    };
    let inner = j_delta(&prefix, &p_step, d)?;

    // The motive of the regular J: (y, z) -> P(d', y, z).
    let mut motive_args = vars.clone();
    motive_args.push(MTm::Var(y.clone()));
    motive_args.push(MTm::Var(z.clone()));
    let motive = TyClo {
        params: vec![y.clone(), z.clone()],
        body: p.apply(&motive_args),
    };

    let body = MTm::japp(JApp {
        base_point: u_e,
        motive,
        diag_case: inner.apply(&vars),
        major: MTm::Var(y),
        path: MTm::Var(z),
    });
    Ok(Clo {
        params: delta.names().cloned().collect(),
        body,
    })
}

// ---------------------------------------------------------------------------
// Normalization

/// The base case `λa. i_{dim T}` used when unfolding a coherence.
fn tower_case(dim: u32) -> Clo {
    let a = Name::internal("%a".into());
    let (_, i_n) = iterated_tower(&a, dim);
    Clo {
        params: vec![a],
        body: i_n,
    }
}

fn unfold_coh(c: &MCoh, args: &[MTm]) -> Result<MTm, CheckError> {
    let p = elaborate_ty(&c.ctx, &c.ty);
    let d = tower_case(c.ty.dim());
    Ok(j_delta(&c.ctx, &p, &d)?.apply(args))
}

/// Leftmost-innermost normalization: unfolds coherence references and fires
/// J on a matching constant path. Stuck terms are normal forms.
pub fn normalize_tm(t: &MTm) -> Result<MTm, CheckError> {
    match t {
        MTm::Var(_) => Ok(t.clone()),
        MTm::Idp(u) => Ok(MTm::idp(normalize_tm(u)?)),
        MTm::CohRef(c) => {
            let args = c
                .args
                .iter()
                .map(normalize_tm)
                .collect::<Result<Vec<_>, _>>()?;
            normalize_tm(&unfold_coh(c, &args)?)
        }
        MTm::J(j) => {
            let path = normalize_tm(&j.path)?;
            let base_point = normalize_tm(&j.base_point)?;
            if let MTm::Idp(w) = &path {
                if **w == base_point {
                    return normalize_tm(&j.diag_case);
                }
            }
            Ok(MTm::japp(JApp {
                base_point,
                motive: TyClo {
                    params: j.motive.params.clone(),
                    body: normalize_ty(&j.motive.body)?,
                },
                diag_case: normalize_tm(&j.diag_case)?,
                major: normalize_tm(&j.major)?,
                path,
            }))
        }
    }
}

pub fn normalize_ty(t: &MTy) -> Result<MTy, CheckError> {
    match t {
        MTy::Base => Ok(MTy::Base),
        MTy::Id(i) => Ok(MTy::id(
            normalize_ty(&i.base)?,
            normalize_tm(&i.lhs)?,
            normalize_tm(&i.rhs)?,
        )),
    }
}

// ---------------------------------------------------------------------------
// The diagonal lemmas

/// Per-declaration outcome of the diagonal lemma check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetaReport {
    pub decl: Name,
    /// Dimension of the return type; the tower index of both normal forms.
    pub dim: u32,
    /// Normal form of the elaborated return type at the diagonal.
    pub type_nf: String,
    /// Normal form of the elaborated coherence at the diagonal.
    pub term_nf: String,
    /// Coherence subterms checked against lemma `term`.
    pub terms_checked: usize,
    /// Context morphisms checked against lemma `ctxmor`.
    pub mors_checked: usize,
}

/// A base-point name not bound by the context.
pub fn fresh_base(delta: &Ctx) -> Name {
    std::iter::once("a".to_string())
        .chain((0..).map(|i| format!("a{i}")))
        .map(|s| Name::new(s).expect("valid name"))
        .find(|n| delta.lookup(n).is_none())
        .expect("unbounded candidate stream")
}

fn collect_cohs(t: &Tm, out: &mut Vec<crate::syntax::Coh>) {
    if let Tm::Coh(c) = t {
        out.push((**c).clone());
        for a in c.args.terms() {
            collect_cohs(a, out);
        }
    }
}

fn collect_cohs_ty(t: &Ty, out: &mut Vec<crate::syntax::Coh>) {
    if let Ty::Hom(h) = t {
        collect_cohs_ty(&h.base, out);
        collect_cohs(&h.lhs, out);
        collect_cohs(&h.rhs, out);
    }
}

/// Checks the three diagonal lemmas for one coherence declaration
/// `delta |- ty`:
///
/// 1. `type`: the elaborated return type at `id^D_a` normalizes to
///    `I_{dim ty}`.
/// 2. `term`: the declared coherence itself, and every coherence subterm of
///    the return type, normalize at `id^D_a` to the `i_k` of their dimension.
/// 3. `ctxmor`: for every coherence subterm, the elaborated argument
///    morphism carries `id^D_a` to the diagonal of its own context.
pub fn check_diagonal_lemmas(delta: &Ctx, ty: &Ty, decl: &Name) -> Result<MetaReport, MlttError> {
    let a = fresh_base(delta);
    let id_delta = diag(delta, &a)?;
    let dim = ty.dim();
    let (expect_ty, expect_tm) = iterated_tower(&a, dim);

    let fail = |lemma: &'static str, detail: String| MlttError::LemmaFailure {
        lemma,
        decl: decl.clone(),
        detail,
    };

    // Lemma `type`.
    let type_nf = normalize_ty(&elaborate_ty(delta, ty).apply(&id_delta))?;
    if type_nf != expect_ty {
        return Err(fail(
            "type",
            format!("normalized type {type_nf}, expected {expect_ty}"),
        ));
    }

    // Lemma `term`, first for the declared operation itself ...
    let own = Tm::coh(delta.clone(), ty.clone(), delta.identity());
    let term_nf = normalize_tm(&elaborate_tm(delta, &own).apply(&id_delta))?;
    if term_nf != expect_tm {
        return Err(fail(
            "term",
            format!("normalized term {term_nf}, expected {expect_tm}"),
        ));
    }

    // ... then for every coherence subterm of the return type.
    let mut cohs = Vec::new();
    collect_cohs_ty(ty, &mut cohs);
    let mut terms_checked = 1;
    let mut mors_checked = 0;
    for c in &cohs {
        let sub = Tm::Coh(Box::new(c.clone()));
        let k = infer_type(delta, &sub).map_err(MlttError::Check)?.dim();
        let nf = normalize_tm(&elaborate_tm(delta, &sub).apply(&id_delta))?;
        let (_, expect) = iterated_tower(&a, k);
        if nf != expect {
            return Err(fail(
                "term",
                format!("subterm {sub} normalizes to {nf}, expected {expect}"),
            ));
        }
        terms_checked += 1;

        // Lemma `ctxmor` for the argument morphism of this subterm.
        let target_diag = diag(&c.ctx, &a)?
            .iter()
            .map(|t| normalize_tm(t))
            .collect::<Result<Vec<_>, _>>()?;
        let image = elaborate_mor(delta, &c.args)
            .iter()
            .map(|clo| normalize_tm(&clo.apply(&id_delta)))
            .collect::<Result<Vec<_>, _>>()?;
        if image != target_diag {
            return Err(fail(
                "ctxmor",
                format!("morphism of {sub} does not carry the diagonal to the diagonal"),
            ));
        }
        mors_checked += 1;
    }

    Ok(MetaReport {
        decl: decl.clone(),
        dim,
        type_nf: type_nf.to_string(),
        term_nf: term_nf.to_string(),
        terms_checked,
        mors_checked,
    })
}

// ---------------------------------------------------------------------------
// Printing

/// Pure constant-path towers print as `idp^k a`.
fn tm_tower(t: &MTm) -> Option<(u32, &Name)> {
    match t {
        MTm::Var(x) => Some((0, x)),
        MTm::Idp(u) => tm_tower(u).map(|(k, x)| (k + 1, x)),
        _ => None,
    }
}

/// Identity towers `I_k` over a variable print as `Id^k A a`.
fn ty_tower(t: &MTy) -> Option<(u32, Option<&Name>)> {
    match t {
        MTy::Base => Some((0, None)),
        MTy::Id(i) => {
            let (k, a) = ty_tower(&i.base)?;
            let (j, x) = tm_tower(&i.lhs)?;
            if i.lhs != i.rhs || j != k || a.is_some_and(|a| a != x) {
                return None;
            }
            Some((k + 1, Some(x)))
        }
    }
}

impl fmt::Display for MTm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match tm_tower(self) {
            Some((0, x)) => write!(f, "{x}"),
            Some((k, x)) => write!(f, "idp^{k} {x}"),
            None => match self {
                MTm::Var(x) => write!(f, "{x}"),
                MTm::Idp(u) => write!(f, "idp({u})"),
                MTm::J(j) => write!(
                    f,
                    "J({}; {}; {})({}, {})",
                    j.base_point, j.motive, j.diag_case, j.major, j.path
                ),
                MTm::CohRef(c) => {
                    write!(f, "coh[{}](", c.ctx.len())?;
                    for (i, a) in c.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")
                }
            },
        }
    }
}

impl fmt::Display for MTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match ty_tower(self) {
            Some((0, _)) => f.write_str("A"),
            Some((k, Some(x))) => write!(f, "Id^{k} A {x}"),
            _ => match self {
                MTy::Base => f.write_str("A"),
                MTy::Id(i) => write!(f, "Id({}, {}, {})", i.base, i.lhs, i.rhs),
            },
        }
    }
}

impl fmt::Display for TyClo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\\(")?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "). {}", self.body)
    }
}
