//! The typing judgments and the declaration checker.
//!
//! Kernel layer: well-formed contexts, types, terms and context morphisms,
//! plus the decision procedure for contractibility. The kernel works on the
//! abstract syntax of [`crate::syntax`] and knows nothing about source files.
//!
//! Surface layer: resolution of parsed declarations against a symbol table.
//! A `coh` declaration names a coherence operation; applying it inlines a
//! `coh_{D.T}(args)` term. A `def` declaration is a checked abbreviation;
//! applying it substitutes the arguments into its body.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::parse::{Decl, Program, STm, STmKind, STy, STyKind, SourceSpan};
use crate::syntax::{
    substitute, syntactic_eq, Coh, Ctx, CtxMor, Name, Node, SyntaxError, Tm, Ty,
};

/// Stable diagnostic codes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ErrorCode {
    DuplicateName,
    UnboundVariable,
    NotContractible,
    TypeMismatch,
    ArityMismatch,
    UnknownName,
    EndpointTypeMismatch,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::DuplicateName => "E001",
            ErrorCode::UnboundVariable => "E002",
            ErrorCode::NotContractible => "E003",
            ErrorCode::TypeMismatch => "E004",
            ErrorCode::ArityMismatch => "E005",
            ErrorCode::UnknownName => "E006",
            ErrorCode::EndpointTypeMismatch => "E007",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ErrorCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Diagnostic {
    pub code: ErrorCode,
    pub message: String,
    pub span: Option<SourceSpan>,
}

#[derive(Clone, PartialEq, Debug, Error)]
#[error("{}: {}", .0.code, .0.message)]
pub struct CheckError(pub Diagnostic);

impl CheckError {
    fn new(code: ErrorCode, message: impl Into<String>) -> CheckError {
        CheckError(Diagnostic {
            code,
            message: message.into(),
            span: None,
        })
    }

    /// Attaches a span unless one is already present.
    fn at(mut self, span: &SourceSpan) -> CheckError {
        if self.0.span.is_none() {
            self.0.span = Some(span.clone());
        }
        self
    }

    pub fn code(&self) -> ErrorCode {
        self.0.code
    }
}

impl From<SyntaxError> for CheckError {
    fn from(e: SyntaxError) -> CheckError {
        let code = match &e {
            SyntaxError::DuplicateName(_) => ErrorCode::DuplicateName,
            SyntaxError::UnboundVariable(_) => ErrorCode::UnboundVariable,
            SyntaxError::ArityMismatch { .. } => ErrorCode::ArityMismatch,
        };
        CheckError::new(code, e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Kernel judgments

/// `ctx` is a well-formed context: each entry type is well-formed over the
/// preceding entries. Name distinctness is enforced by construction of
/// [`Ctx`], but is re-checked here so the judgment stands on its own.
pub fn check_context(ctx: &Ctx) -> Result<(), CheckError> {
    for (i, (name, ty)) in ctx.entries().iter().enumerate() {
        let prefix = ctx.prefix(i);
        if prefix.lookup(name).is_some() {
            return Err(CheckError::new(
                ErrorCode::DuplicateName,
                format!("duplicate name {name} in context"),
            ));
        }
        check_type(&prefix, ty)?;
    }
    Ok(())
}

/// `ctx |- ty type`. An equality is well-formed when its base is and both
/// endpoints inhabit the base.
pub fn check_type(ctx: &Ctx, ty: &Ty) -> Result<(), CheckError> {
    match ty {
        Ty::Star => Ok(()),
        Ty::Hom(h) => {
            check_type(ctx, &h.base)?;
            check_endpoint(ctx, &h.lhs, &h.base, "left")?;
            check_endpoint(ctx, &h.rhs, &h.base, "right")
        }
    }
}

fn check_endpoint(ctx: &Ctx, tm: &Tm, base: &Ty, side: &str) -> Result<(), CheckError> {
    let found = infer_type(ctx, tm)?;
    if syntactic_eq(&found, base) {
        Ok(())
    } else {
        Err(CheckError::new(
            ErrorCode::EndpointTypeMismatch,
            format!("{side} endpoint {tm} has type {found}, but the equality is over {base}"),
        ))
    }
}

/// Infers `ctx |- tm : ?`. For a coherence operation `coh_{D.T}(d)` this
/// checks that `D` is a well-formed contractible context, `D |- T type`, and
/// `ctx |- d : D`, and returns `T[d/D]`.
pub fn infer_type(ctx: &Ctx, tm: &Tm) -> Result<Ty, CheckError> {
    match tm {
        Tm::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| {
            CheckError::new(ErrorCode::UnboundVariable, format!("unbound variable {x}"))
        }),
        Tm::Coh(c) => {
            check_coh_head(c)?;
            check_ctx_morphism(ctx, &c.args, &c.ctx)?;
            Ok(substitute(&c.ty, &c.args, &c.ctx)?)
        }
    }
}

fn check_coh_head(c: &Coh) -> Result<(), CheckError> {
    check_context(&c.ctx)?;
    check_contractible(&c.ctx)?;
    check_type(&c.ctx, &c.ty)
}

/// `ctx |- tm : ty`, by inference followed by syntactic comparison.
pub fn check_term(ctx: &Ctx, tm: &Tm, ty: &Ty) -> Result<(), CheckError> {
    let found = infer_type(ctx, tm)?;
    if syntactic_eq(&found, ty) {
        Ok(())
    } else {
        Err(CheckError::new(
            ErrorCode::TypeMismatch,
            format!("term {tm} has type {found}, expected {ty}"),
        ))
    }
}

/// `ctx |- gamma : target`: the i-th term inhabits the i-th target type with
/// the earlier components substituted in.
pub fn check_ctx_morphism(ctx: &Ctx, gamma: &CtxMor, target: &Ctx) -> Result<(), CheckError> {
    if gamma.len() != target.len() {
        return Err(CheckError::new(
            ErrorCode::ArityMismatch,
            format!(
                "context morphism has length {}, target context has length {}",
                gamma.len(),
                target.len()
            ),
        ));
    }
    for (i, tm) in gamma.terms().iter().enumerate() {
        let prefix_mor = CtxMor::new(gamma.terms()[..i].to_vec());
        let prefix_ctx = target.prefix(i);
        let expected = substitute(&target.entries()[i].1, &prefix_mor, &prefix_ctx)?;
        check_term(ctx, tm, &expected)?;
    }
    Ok(())
}

/// Decides contractibility. A context is contractible when it is `(x : *)`,
/// or has the shape `D, (y : T), (z : u = y over T)` with `D` contractible
/// and `u` a term over `D` alone.
///
/// Peeling the final two entries is complete: in a well-formed context the
/// last entry of a contractible context is forced to be the `z` of the rule,
/// which determines `y` and `u`.
pub fn check_contractible(ctx: &Ctx) -> Result<(), CheckError> {
    let fail = |why: String| {
        CheckError::new(
            ErrorCode::NotContractible,
            format!("context ({ctx}) is not contractible: {why}"),
        )
    };
    if ctx.is_empty() {
        return Err(fail("it is empty".into()));
    }
    if ctx.len() % 2 == 0 {
        return Err(fail(format!("it has even length {}", ctx.len())));
    }
    let mut rest = ctx.clone();
    while rest.len() > 1 {
        let n = rest.len();
        let (z, z_ty) = &rest.entries()[n - 1];
        let (y, y_ty) = &rest.entries()[n - 2];
        let inner = rest.prefix(n - 2);
        let h = match z_ty {
            Ty::Hom(h) => h,
            Ty::Star => {
                return Err(fail(format!("the last entry ({z} : *) is not an equality")))
            }
        };
        if h.rhs != Tm::Var(y.clone()) {
            return Err(fail(format!(
                "the type of {z} must have right endpoint {y}, found {}",
                h.rhs
            )));
        }
        if !syntactic_eq(&h.base, y_ty) {
            return Err(fail(format!(
                "the type of {z} is an equality over {}, but {y} has type {y_ty}",
                h.base
            )));
        }
        if let Err(e) = check_term(&inner, &h.lhs, &h.base) {
            return Err(fail(format!(
                "the left endpoint {} does not live over the preceding entries: {}",
                h.lhs, e.0.message
            )));
        }
        rest = inner;
    }
    match &rest.entries()[0].1 {
        Ty::Star => Ok(()),
        ty => {
            let (x, _) = &rest.entries()[0];
            Err(fail(format!(
                "the first remaining entry ({x} : {ty}) must have type *"
            )))
        }
    }
}

// ---------------------------------------------------------------------------
// The syntactic diagonal

/// The iterated-constant-path operation on cells of dimension `k`: the
/// contractible context `(x0 y0 : *) ... (t : x_{k-1} = y_{k-1})` together
/// with the return type `t = t`.
pub fn idp_coh(k: u32) -> (Ctx, Ty) {
    let mut ctx = Ctx::empty();
    let mut cur = Ty::Star;
    for i in 0..k {
        let x = Name::internal(format!("x{i}"));
        let y = Name::internal(format!("y{i}"));
        ctx.push(x.clone(), cur.clone()).expect("fresh binder");
        ctx.push(y.clone(), cur.clone()).expect("fresh binder");
        cur = Ty::hom(cur, Tm::Var(x), Tm::Var(y));
    }
    let t = Name::internal("t".into());
    ctx.push(t.clone(), cur.clone()).expect("fresh binder");
    let ty = Ty::hom(cur, Tm::Var(t.clone()), Tm::Var(t));
    (ctx, ty)
}

/// The boundary of a type, innermost first: for a k-dimensional type this is
/// the argument list `x0, y0, ..., x_{k-1}, y_{k-1}` of [`idp_coh`].
fn boundary(ty: &Ty, out: &mut Vec<Tm>) {
    if let Ty::Hom(h) = ty {
        boundary(&h.base, out);
        out.push(h.lhs.clone());
        out.push(h.rhs.clone());
    }
}

/// The constant path on a cell `u` of type `ty`.
pub fn idp_at(u: &Tm, ty: &Ty) -> Tm {
    let (ctx, ret) = idp_coh(ty.dim());
    let mut args = Vec::new();
    boundary(ty, &mut args);
    args.push(u.clone());
    Tm::coh(ctx, ret, CtxMor::new(args))
}

/// The diagonal morphism `(a : *) -> ctx` of a contractible context: the
/// base point goes to `a`, and each appended block `(y : T), (z : u = y)`
/// goes to the image of `u` and the constant path on it.
pub fn diagonal(ctx: &Ctx, a: &Name) -> Result<CtxMor, CheckError> {
    check_contractible(ctx)?;
    let mut terms = vec![Tm::Var(a.clone())];
    let mut i = 1;
    while i < ctx.len() {
        let prefix = ctx.prefix(i);
        let part = CtxMor::new(terms.clone());
        let (_, z_ty) = &ctx.entries()[i + 1];
        let h = match z_ty {
            Ty::Hom(h) => h,
            Ty::Star => unreachable!("checked contractible"),
        };
        let u_img = substitute(&h.lhs, &part, &prefix)?;
        let u_img_ty = substitute(&h.base, &part, &prefix)?;
        terms.push(u_img.clone());
        terms.push(idp_at(&u_img, &u_img_ty));
        i += 2;
    }
    Ok(CtxMor::new(terms))
}

// ---------------------------------------------------------------------------
// Symbol table and surface resolution

#[derive(Clone, PartialEq, Debug)]
pub enum DeclKind {
    /// A coherence operation; applications inline a `coh` term.
    Coh,
    /// An abbreviation; applications substitute into the body.
    Def(Tm),
}

#[derive(Clone, PartialEq, Debug)]
pub struct DeclEntry {
    pub name: Name,
    pub ctx: Ctx,
    pub ty: Ty,
    pub kind: DeclKind,
}

impl DeclEntry {
    /// The kernel term denoted by applying this declaration to `args`.
    /// Arity must already be checked.
    fn apply(&self, args: Vec<Tm>) -> Result<Tm, CheckError> {
        let mor = CtxMor::new(args);
        match &self.kind {
            DeclKind::Coh => Ok(Tm::coh(self.ctx.clone(), self.ty.clone(), mor)),
            DeclKind::Def(body) => Ok(substitute(body, &mor, &self.ctx)?),
        }
    }
}

/// Checked declarations in insertion order.
#[derive(Clone, Default, Debug)]
pub struct SymbolTable {
    entries: Vec<DeclEntry>,
}

impl SymbolTable {
    pub fn new() -> SymbolTable {
        SymbolTable::default()
    }

    pub fn get(&self, name: &Name) -> Option<&DeclEntry> {
        self.entries.iter().find(|e| &e.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DeclEntry> {
        self.entries.iter()
    }

    pub fn insert(&mut self, entry: DeclEntry) -> Result<(), CheckError> {
        if self.get(&entry.name).is_some() {
            return Err(CheckError::new(
                ErrorCode::DuplicateName,
                format!("declaration {} already exists", entry.name),
            ));
        }
        self.entries.push(entry);
        Ok(())
    }
}

/// Resolves a surface term over `ctx`, looking unapplied and applied heads up
/// in the table. Local variables shadow declarations.
pub fn resolve_tm(table: &SymbolTable, ctx: &Ctx, tm: &STm) -> Result<Tm, CheckError> {
    match &tm.kind {
        STmKind::Ident(n) => {
            if ctx.lookup(n).is_some() {
                return Ok(Tm::Var(n.clone()));
            }
            match table.get(n) {
                Some(entry) if entry.ctx.is_empty() => entry.apply(Vec::new()),
                Some(entry) => Err(CheckError::new(
                    ErrorCode::ArityMismatch,
                    format!(
                        "{n} expects {} arguments, but is used without any",
                        entry.ctx.len()
                    ),
                )
                .at(&tm.span)),
                None => Err(CheckError::new(
                    ErrorCode::UnboundVariable,
                    format!("unbound variable {n}"),
                )
                .at(&tm.span)),
            }
        }
        STmKind::App(head, args) => {
            if ctx.lookup(head).is_some() {
                return Err(CheckError::new(
                    ErrorCode::UnknownName,
                    format!("{head} is a variable, not a declared operation"),
                )
                .at(&tm.span));
            }
            let entry = table.get(head).ok_or_else(|| {
                CheckError::new(ErrorCode::UnknownName, format!("unknown name {head}"))
                    .at(&tm.span)
            })?;
            if args.len() != entry.ctx.len() {
                return Err(CheckError::new(
                    ErrorCode::ArityMismatch,
                    format!(
                        "{head} expects {} arguments, found {}",
                        entry.ctx.len(),
                        args.len()
                    ),
                )
                .at(&tm.span));
            }
            let args = args
                .iter()
                .map(|a| resolve_tm(table, ctx, a))
                .collect::<Result<Vec<_>, _>>()?;
            entry.apply(args).map_err(|e| e.at(&tm.span))
        }
    }
}

/// Resolves a surface type over `ctx`. The base of a bare equality `u = v`
/// is inferred from the left endpoint, so resolution of types needs typing.
pub fn resolve_ty(table: &SymbolTable, ctx: &Ctx, ty: &STy) -> Result<Ty, CheckError> {
    match &ty.kind {
        STyKind::Star => Ok(Ty::Star),
        STyKind::Hom { base, lhs, rhs } => {
            let lhs_k = resolve_tm(table, ctx, lhs)?;
            let rhs_k = resolve_tm(table, ctx, rhs)?;
            let base_k = match base {
                Some(b) => resolve_ty(table, ctx, b)?,
                None => infer_type(ctx, &lhs_k).map_err(|e| e.at(&lhs.span))?,
            };
            Ok(Ty::hom(base_k, lhs_k, rhs_k))
        }
    }
}

// ---------------------------------------------------------------------------
// Declaration checking and reports

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "error")]
    Error,
}

/// The outcome of checking one declaration.
#[derive(Clone, PartialEq, Debug)]
pub struct CheckReport {
    pub decl: Name,
    pub status: Verdict,
    /// Dimension of the declared type.
    pub dim: u32,
    /// Depth of the declaration: for a `coh`, the depth of its return type;
    /// for a `def`, the depth of its body.
    pub depth: u32,
    pub diagnostics: Vec<Diagnostic>,
}

impl Serialize for CheckReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CheckReport", 5)?;
        st.serialize_field("decl", self.decl.as_str())?;
        st.serialize_field("status", &self.status)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("diagnostics", &self.diagnostics)?;
        st.end()
    }
}

/// Builds the kernel context of a declaration's telescope, resolving each
/// group type over the prefix.
fn resolve_telescope(
    table: &SymbolTable,
    tele: &[crate::parse::TeleGroup],
) -> Result<Ctx, CheckError> {
    let mut ctx = Ctx::empty();
    for group in tele {
        let ty = resolve_ty(table, &ctx, &group.ty)?.clone();
        check_type(&ctx, &ty).map_err(|e| e.at(&group.ty.span))?;
        for (name, span) in &group.names {
            ctx.push(name.clone(), ty.clone())
                .map_err(|e| CheckError::from(e).at(span))?;
        }
    }
    Ok(ctx)
}

/// Checks one declaration against the table; on success the declaration is
/// added to the table.
pub fn check_decl(table: &mut SymbolTable, decl: &Decl) -> Result<CheckReport, CheckError> {
    let (name, tele, sty, span) = match decl {
        Decl::Coh(d) => (&d.name, &d.tele, &d.ty, &d.span),
        Decl::Def(d) => (&d.name, &d.tele, &d.ty, &d.span),
    };
    if table.get(name).is_some() {
        return Err(CheckError::new(
            ErrorCode::DuplicateName,
            format!("declaration {name} already exists"),
        )
        .at(span));
    }
    let ctx = resolve_telescope(table, tele)?;
    let ty = resolve_ty(table, &ctx, sty)?;
    check_type(&ctx, &ty).map_err(|e| e.at(&sty.span))?;
    let (kind, depth) = match decl {
        Decl::Coh(d) => {
            check_contractible(&ctx).map_err(|e| e.at(&d.span))?;
            // The depth of a coherence operation is the depth of its return
            // type, not of the coh term that names it.
            (DeclKind::Coh, ty.depth())
        }
        Decl::Def(d) => {
            let body = resolve_tm(table, &ctx, &d.body)?;
            check_term(&ctx, &body, &ty).map_err(|e| e.at(&d.body.span))?;
            (DeclKind::Def(body.clone()), body.depth())
        }
    };
    let report = CheckReport {
        decl: name.clone(),
        status: Verdict::Ok,
        dim: ty.dim(),
        depth,
        diagnostics: Vec::new(),
    };
    table.insert(DeclEntry {
        name: name.clone(),
        ctx,
        ty,
        kind,
    })?;
    Ok(report)
}

/// Checks a whole program in order. A failed declaration is reported and not
/// added to the table; checking continues unless `fail_fast` is set.
pub fn check_program_with(
    table: &mut SymbolTable,
    program: &Program,
    fail_fast: bool,
) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    for d in &program.decls {
        let report = check_decl(table, d).unwrap_or_else(|e| CheckReport {
            decl: d.name().clone(),
            status: Verdict::Error,
            dim: 0,
            depth: 0,
            diagnostics: vec![e.0],
        });
        let failed = report.status == Verdict::Error;
        reports.push(report);
        if failed && fail_fast {
            break;
        }
    }
    reports
}

/// [`check_program_with`] without fail-fast.
pub fn check_program(table: &mut SymbolTable, program: &Program) -> Vec<CheckReport> {
    check_program_with(table, program, false)
}
