//! Abstract syntax of the groupoid language and its pure structural
//! operations: free variables, simultaneous substitution, projection, depth,
//! dimension, alpha-canonicalization and syntactic equality.
//!
//! Substitution replaces free variables only. The subscript `D.T` of a
//! coherence term `coh_{D.T}(d)` is an atomic name: substitution goes into
//! the argument list `d` and never into `D` or `T`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Words that cannot be used as variable or declaration names.
pub const RESERVED: &[&str] = &["coh", "def"];

/// A variable or declaration name: nonempty, no whitespace, not reserved.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Name(String);

impl Name {
    pub fn new(text: impl Into<String>) -> Result<Name, NameError> {
        let text = text.into();
        if text.is_empty() {
            return Err(NameError::Empty);
        }
        if text.chars().any(char::is_whitespace) {
            return Err(NameError::Whitespace(text));
        }
        if RESERVED.contains(&text.as_str()) {
            return Err(NameError::Reserved(text));
        }
        Ok(Name(text))
    }

    /// Internal names for canonical binders and gensyms; not reachable from
    /// source syntax because they are not valid identifiers there.
    pub(crate) fn internal(text: String) -> Name {
        Name(text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty name")]
    Empty,
    #[error("name {0:?} contains whitespace")]
    Whitespace(String),
    #[error("name {0:?} is a reserved word")]
    Reserved(String),
}

/// Types: the base type `*` and hom types `lhs = rhs` over a base type.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Ty {
    Star,
    Hom(Box<Hom>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Hom {
    pub base: Ty,
    pub lhs: Tm,
    pub rhs: Tm,
}

impl Ty {
    pub fn hom(base: Ty, lhs: Tm, rhs: Tm) -> Ty {
        Ty::Hom(Box::new(Hom { base, lhs, rhs }))
    }

    /// `dim(*) = 0`, `dim(u = v over T) = dim(T) + 1`.
    pub fn dim(&self) -> u32 {
        match self {
            Ty::Star => 0,
            Ty::Hom(h) => h.base.dim() + 1,
        }
    }
}

/// Terms: variables and coherence operations `coh_{D.T}(args)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Tm {
    Var(Name),
    Coh(Box<Coh>),
}

/// A coherence operation. The pair `(ctx, ty)` is the name of the operation
/// and is a closed package: its variables are bound, not free in the term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coh {
    pub ctx: Ctx,
    pub ty: Ty,
    pub args: CtxMor,
}

impl Tm {
    pub fn var(name: Name) -> Tm {
        Tm::Var(name)
    }

    pub fn coh(ctx: Ctx, ty: Ty, args: CtxMor) -> Tm {
        Tm::Coh(Box::new(Coh { ctx, ty, args }))
    }
}

/// A context: an ordered telescope of distinct names with their types.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ctx {
    entries: Vec<(Name, Ty)>,
}

impl Ctx {
    pub fn empty() -> Ctx {
        Ctx::default()
    }

    /// Builds a context, rejecting duplicate names.
    pub fn new(entries: Vec<(Name, Ty)>) -> Result<Ctx, SyntaxError> {
        let mut seen = BTreeSet::new();
        for (name, _) in &entries {
            if !seen.insert(name.clone()) {
                return Err(SyntaxError::DuplicateName(name.clone()));
            }
        }
        Ok(Ctx { entries })
    }

    pub fn entries(&self) -> &[(Name, Ty)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(n, _)| n)
    }

    pub fn lookup(&self, name: &Name) -> Option<&Ty> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn position(&self, name: &Name) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    /// Appends an entry, rejecting a name already in scope.
    pub fn push(&mut self, name: Name, ty: Ty) -> Result<(), SyntaxError> {
        if self.lookup(&name).is_some() {
            return Err(SyntaxError::DuplicateName(name));
        }
        self.entries.push((name, ty));
        Ok(())
    }

    /// The context with the last `n` entries removed.
    pub fn prefix(&self, len: usize) -> Ctx {
        Ctx {
            entries: self.entries[..len].to_vec(),
        }
    }

    /// The identity context morphism on this context.
    pub fn identity(&self) -> CtxMor {
        CtxMor::new(self.names().map(|n| Tm::Var(n.clone())).collect())
    }
}

/// A context morphism: a sequence of terms, paired positionally with a
/// target context when typed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CtxMor {
    terms: Vec<Tm>,
}

impl CtxMor {
    pub fn new(terms: Vec<Tm>) -> CtxMor {
        CtxMor { terms }
    }

    pub fn terms(&self) -> &[Tm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A named, checked coherence declaration: the symbol-table unit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CohDecl {
    pub name: Name,
    pub ctx: Ctx,
    pub ty: Ty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("duplicate name {0} in context")]
    DuplicateName(Name),
    #[error("unbound variable {0}")]
    UnboundVariable(Name),
    #[error("arity mismatch: morphism has length {found}, context has length {expected}")]
    ArityMismatch { expected: usize, found: usize },
}

/// A simultaneous substitution `[gamma/ctx]`, mapping the i-th name of the
/// context to the i-th term of the morphism.
pub struct Subst<'a> {
    map: BTreeMap<&'a Name, &'a Tm>,
}

impl<'a> Subst<'a> {
    pub fn new(gamma: &'a CtxMor, ctx: &'a Ctx) -> Result<Subst<'a>, SyntaxError> {
        if gamma.len() != ctx.len() {
            return Err(SyntaxError::ArityMismatch {
                expected: ctx.len(),
                found: gamma.len(),
            });
        }
        let map = ctx.names().zip(gamma.terms()).collect();
        Ok(Subst { map })
    }

    fn get(&self, name: &Name) -> Result<&'a Tm, SyntaxError> {
        self.map
            .get(name)
            .copied()
            .ok_or_else(|| SyntaxError::UnboundVariable(name.clone()))
    }
}

/// Structural operations shared by terms, types and context morphisms.
pub trait Node: Sized + Clone + PartialEq {
    fn free_vars_into(&self, out: &mut BTreeSet<Name>);

    /// Applies a substitution to the free variables. Subscripts of `coh`
    /// are left untouched.
    fn apply_subst(&self, sub: &Subst<'_>) -> Result<Self, SyntaxError>;

    /// Renames free variables; names missing from the map are kept. Total.
    fn rename(&self, map: &BTreeMap<Name, Name>) -> Self;

    /// Highest level of nestedness of coherence operations.
    fn depth(&self) -> u32;

    /// Renames the binders of every `coh` subscript to the positional scheme
    /// `v0, v1, ...`. Idempotent; free variables untouched.
    fn alpha_canonicalize(&self) -> Self;

    fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }
}

impl Node for Tm {
    fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Tm::Var(x) => {
                out.insert(x.clone());
            }
            Tm::Coh(c) => c.args.free_vars_into(out),
        }
    }

    fn apply_subst(&self, sub: &Subst<'_>) -> Result<Tm, SyntaxError> {
        match self {
            Tm::Var(x) => Ok(sub.get(x)?.clone()),
            Tm::Coh(c) => Ok(Tm::coh(
                c.ctx.clone(),
                c.ty.clone(),
                c.args.apply_subst(sub)?,
            )),
        }
    }

    fn rename(&self, map: &BTreeMap<Name, Name>) -> Tm {
        match self {
            Tm::Var(x) => Tm::Var(map.get(x).unwrap_or(x).clone()),
            Tm::Coh(c) => Tm::coh(c.ctx.clone(), c.ty.clone(), c.args.rename(map)),
        }
    }

    fn depth(&self) -> u32 {
        match self {
            Tm::Var(_) => 0,
            Tm::Coh(c) => c
                .args
                .depth()
                .max(c.ty.depth() + 1)
                .max(c.ctx.depth() + 1),
        }
    }

    fn alpha_canonicalize(&self) -> Tm {
        match self {
            Tm::Var(_) => self.clone(),
            Tm::Coh(c) => {
                let map: BTreeMap<Name, Name> = c
                    .ctx
                    .names()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), Name::internal(format!("v{i}"))))
                    .collect();
                let entries = c
                    .ctx
                    .entries()
                    .iter()
                    .map(|(n, t)| (map[n].clone(), t.alpha_canonicalize().rename(&map)))
                    .collect();
                let ctx = Ctx { entries };
                let ty = c.ty.alpha_canonicalize().rename(&map);
                Tm::coh(ctx, ty, c.args.alpha_canonicalize())
            }
        }
    }
}

impl Node for Ty {
    fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        if let Ty::Hom(h) = self {
            h.base.free_vars_into(out);
            h.lhs.free_vars_into(out);
            h.rhs.free_vars_into(out);
        }
    }

    fn apply_subst(&self, sub: &Subst<'_>) -> Result<Ty, SyntaxError> {
        match self {
            Ty::Star => Ok(Ty::Star),
            Ty::Hom(h) => Ok(Ty::hom(
                h.base.apply_subst(sub)?,
                h.lhs.apply_subst(sub)?,
                h.rhs.apply_subst(sub)?,
            )),
        }
    }

    fn rename(&self, map: &BTreeMap<Name, Name>) -> Ty {
        match self {
            Ty::Star => Ty::Star,
            Ty::Hom(h) => Ty::hom(h.base.rename(map), h.lhs.rename(map), h.rhs.rename(map)),
        }
    }

    fn depth(&self) -> u32 {
        match self {
            Ty::Star => 0,
            Ty::Hom(h) => h.base.depth().max(h.lhs.depth()).max(h.rhs.depth()),
        }
    }

    fn alpha_canonicalize(&self) -> Ty {
        match self {
            Ty::Star => Ty::Star,
            Ty::Hom(h) => Ty::hom(
                h.base.alpha_canonicalize(),
                h.lhs.alpha_canonicalize(),
                h.rhs.alpha_canonicalize(),
            ),
        }
    }
}

impl Node for CtxMor {
    fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        for t in &self.terms {
            t.free_vars_into(out);
        }
    }

    fn apply_subst(&self, sub: &Subst<'_>) -> Result<CtxMor, SyntaxError> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.apply_subst(sub))
            .collect::<Result<_, _>>()?;
        Ok(CtxMor { terms })
    }

    fn rename(&self, map: &BTreeMap<Name, Name>) -> CtxMor {
        CtxMor {
            terms: self.terms.iter().map(|t| t.rename(map)).collect(),
        }
    }

    fn depth(&self) -> u32 {
        self.terms.iter().map(Node::depth).max().unwrap_or(0)
    }

    fn alpha_canonicalize(&self) -> CtxMor {
        CtxMor {
            terms: self.terms.iter().map(Node::alpha_canonicalize).collect(),
        }
    }
}

impl Ctx {
    /// Depth of a context: max over the entry types.
    pub fn depth(&self) -> u32 {
        self.entries.iter().map(|(_, t)| t.depth()).max().unwrap_or(0)
    }

    /// Canonicalizes subscripts inside the entry types. The context's own
    /// names are free here, not binders of a subscript, and are kept.
    pub fn alpha_canonicalize(&self) -> Ctx {
        Ctx {
            entries: self
                .entries
                .iter()
                .map(|(n, t)| (n.clone(), t.alpha_canonicalize()))
                .collect(),
        }
    }
}

/// `x[gamma/ctx]`: every free occurrence of the i-th name of `ctx` is
/// replaced by the i-th term of `gamma`. Coh subscripts are untouched.
pub fn substitute<N: Node>(x: &N, gamma: &CtxMor, ctx: &Ctx) -> Result<N, SyntaxError> {
    let sub = Subst::new(gamma, ctx)?;
    x.apply_subst(&sub)
}

/// The projection `pi_x(gamma)`: the term of `gamma` at the position of `x`
/// in `ctx`. Equals `Var(x)[gamma/ctx]`.
pub fn project(gamma: &CtxMor, ctx: &Ctx, x: &Name) -> Result<Tm, SyntaxError> {
    if gamma.len() != ctx.len() {
        return Err(SyntaxError::ArityMismatch {
            expected: ctx.len(),
            found: gamma.len(),
        });
    }
    let pos = ctx
        .position(x)
        .ok_or_else(|| SyntaxError::UnboundVariable(x.clone()))?;
    Ok(gamma.terms()[pos].clone())
}

/// Syntactic equality up to renaming of coh-subscript binders.
pub fn syntactic_eq<N: Node>(a: &N, b: &N) -> bool {
    a.alpha_canonicalize() == b.alpha_canonicalize()
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Star => f.write_str("*"),
            Ty::Hom(h) => write!(f, "{} = {}", h.lhs, h.rhs),
        }
    }
}

impl fmt::Display for Tm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tm::Var(x) => write!(f, "{x}"),
            Tm::Coh(c) => {
                write!(f, "coh{{{}}}{{{}}}(", c.ctx, c.ty)?;
                for (i, t) in c.args.terms().iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({n} : {t})")?;
        }
        Ok(())
    }
}
