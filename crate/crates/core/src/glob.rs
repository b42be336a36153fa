//! Finite globular models and an exhaustive interpreter.
//!
//! Two model families are supported. In the discrete model on `n` points
//! every higher cell is degenerate: a `(k+1)`-cell between `x` and `y`
//! exists exactly when `x == y`, and is then unique. In the codiscrete
//! model on `n` points there is exactly one `(k+1)`-cell between any two
//! parallel `k`-cells. Both interpret every coherence operation because
//! hom fibers over interpreted endpoints are singletons whenever the
//! endpoints came from a well-typed environment.
//!
//! Environments over a context are enumerated exhaustively, so the
//! semantic counterparts of the syntactic lemmas (typing, substitution,
//! projection, weakening) can be checked by brute force.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::check::{infer_type, CheckError, DeclEntry, DeclKind};
use crate::syntax::{substitute, Ctx, CtxMor, Name, Tm, Ty};

/// A cell of a finite globular set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Cell {
    /// A point (0-cell) of either model family.
    Pt(usize),
    /// The unique degenerate `level`-cell over a point of the discrete
    /// model; `level >= 1`.
    Disc { obj: usize, level: u32 },
    /// The unique cell between two parallel cells of the codiscrete model.
    Codi { src: Box<Cell>, tgt: Box<Cell> },
}

impl Cell {
    pub fn dim(&self) -> u32 {
        match self {
            Cell::Pt(_) => 0,
            Cell::Disc { level, .. } => *level,
            Cell::Codi { src, .. } => src.dim() + 1,
        }
    }

    /// The source boundary; `None` for points.
    pub fn src(&self) -> Option<Cell> {
        match self {
            Cell::Pt(_) => None,
            Cell::Disc { obj, level: 1 } => Some(Cell::Pt(*obj)),
            Cell::Disc { obj, level } => Some(Cell::Disc {
                obj: *obj,
                level: level - 1,
            }),
            Cell::Codi { src, .. } => Some((**src).clone()),
        }
    }

    /// The target boundary; `None` for points.
    pub fn tgt(&self) -> Option<Cell> {
        match self {
            Cell::Codi { tgt, .. } => Some((**tgt).clone()),
            _ => self.src(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Pt(p) => write!(f, "{p}"),
            Cell::Disc { obj, level } => write!(f, "1^{level}_{obj}"),
            Cell::Codi { src, tgt } => write!(f, "<{src}->{tgt}>"),
        }
    }
}

/// A model descriptor, parsed from strings like `discrete:2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Model {
    Discrete(usize),
    Codiscrete(usize),
}

impl Model {
    pub fn points(&self) -> usize {
        match self {
            Model::Discrete(n) | Model::Codiscrete(n) => *n,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Discrete(n) => write!(f, "discrete:{n}"),
            Model::Codiscrete(n) => write!(f, "codiscrete:{n}"),
        }
    }
}

impl FromStr for Model {
    type Err = GlobError;

    fn from_str(s: &str) -> Result<Self, GlobError> {
        let bad = || GlobError::BadModel(s.to_string());
        let (family, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if !(1..=9).contains(&n) {
            return Err(bad());
        }
        match family {
            "discrete" => Ok(Model::Discrete(n)),
            "codiscrete" => Ok(Model::Codiscrete(n)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlobError {
    #[error("unknown model descriptor {0:?} (expected discrete:N or codiscrete:N, 1 <= N <= 9)")]
    BadModel(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("fiber of {ty} has {found} elements, expected exactly one")]
    NonSingletonFiber { ty: String, found: usize },
    #[error("environment enumeration for {decl} exceeds {budget} environments")]
    BudgetExceeded { decl: Name, budget: usize },
    #[error("semantic lemma {lemma} fails for {decl}: {detail}")]
    LemmaFailure {
        lemma: &'static str,
        decl: Name,
        detail: String,
    },
}

/// A positional environment over a context.
pub type Env = Vec<Cell>;

/// All cells of the interpreted type under the environment.
pub fn interp_ty(model: Model, ctx: &Ctx, ty: &Ty, env: &Env) -> Result<Vec<Cell>, GlobError> {
    match ty {
        Ty::Star => Ok((0..model.points()).map(Cell::Pt).collect()),
        Ty::Hom(h) => {
            let l = interp_tm(model, ctx, &h.lhs, env)?;
            let r = interp_tm(model, ctx, &h.rhs, env)?;
            match model {
                Model::Discrete(_) => {
                    if l != r {
                        return Ok(vec![]);
                    }
                    Ok(vec![match l {
                        Cell::Pt(p) => Cell::Disc { obj: p, level: 1 },
                        Cell::Disc { obj, level } => Cell::Disc {
                            obj,
                            level: level + 1,
                        },
                        Cell::Codi { .. } => unreachable!("codiscrete cell in discrete model"),
                    }])
                }
                Model::Codiscrete(_) => Ok(vec![Cell::Codi {
                    src: Box::new(l),
                    tgt: Box::new(r),
                }]),
            }
        }
    }
}

/// The cell denoted by a term under the environment. A coherence pushes the
/// environment through its arguments and takes the unique inhabitant of its
/// return type's fiber; a non-singleton fiber is an error.
pub fn interp_tm(model: Model, ctx: &Ctx, tm: &Tm, env: &Env) -> Result<Cell, GlobError> {
    match tm {
        Tm::Var(x) => {
            let i = ctx
                .position(x)
                .ok_or_else(|| CheckError::from(crate::syntax::SyntaxError::UnboundVariable(
                    x.clone(),
                )))?;
            Ok(env[i].clone())
        }
        Tm::Coh(c) => {
            let inner = interp_mor(model, ctx, &c.args, env)?;
            let fiber = interp_ty(model, &c.ctx, &c.ty, &inner)?;
            if fiber.len() != 1 {
                return Err(GlobError::NonSingletonFiber {
                    ty: c.ty.to_string(),
                    found: fiber.len(),
                });
            }
            Ok(fiber.into_iter().next().unwrap())
        }
    }
}

/// Componentwise interpretation of a context morphism.
pub fn interp_mor(model: Model, ctx: &Ctx, mor: &CtxMor, env: &Env) -> Result<Env, GlobError> {
    mor.terms()
        .iter()
        .map(|t| interp_tm(model, ctx, t, env))
        .collect()
}

/// Exhaustively enumerates all environments over the context: each entry
/// ranges over the fiber of its type under the partial environment built so
/// far. Empty fibers prune the enumeration.
pub fn envs(model: Model, ctx: &Ctx) -> Result<Vec<Env>, GlobError> {
    let mut out: Vec<Env> = vec![vec![]];
    for i in 0..ctx.len() {
        let prefix = ctx.prefix(i);
        let (_, ty) = &ctx.entries()[i];
        let mut next = Vec::new();
        for env in &out {
            for cell in interp_ty(model, &prefix, ty, env)? {
                let mut e = env.clone();
                e.push(cell);
                next.push(e);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Verifies the globular identities `s(s(c)) = s(t(c))` and
/// `t(s(c)) = t(t(c))` for every cell of dimension at most `max_dim`
/// reachable over contexts of iterated hom types.
pub fn check_globular_identities(model: Model, max_dim: u32) -> Result<usize, GlobError> {
    let mut layer: Vec<Cell> = (0..model.points()).map(Cell::Pt).collect();
    let mut checked = 0;
    for _ in 0..max_dim {
        let mut next = Vec::new();
        for a in &layer {
            for b in &layer {
                // Fillers exist only between parallel cells.
                if a.src() != b.src() || a.tgt() != b.tgt() {
                    continue;
                }
                let fillers = match model {
                    Model::Discrete(_) => {
                        if a == b {
                            vec![match a.clone() {
                                Cell::Pt(p) => Cell::Disc { obj: p, level: 1 },
                                Cell::Disc { obj, level } => Cell::Disc {
                                    obj,
                                    level: level + 1,
                                },
                                Cell::Codi { .. } => unreachable!(),
                            }]
                        } else {
                            vec![]
                        }
                    }
                    Model::Codiscrete(_) => vec![Cell::Codi {
                        src: Box::new(a.clone()),
                        tgt: Box::new(b.clone()),
                    }],
                };
                for c in fillers {
                    if c.dim() >= 2 {
                        let ss = c.src().unwrap().src();
                        let st = c.tgt().unwrap().src();
                        let ts = c.src().unwrap().tgt();
                        let tt = c.tgt().unwrap().tgt();
                        assert_eq!(ss, st, "globular identity s.s = s.t");
                        assert_eq!(ts, tt, "globular identity t.s = t.t");
                        checked += 1;
                    }
                    next.push(c);
                }
            }
        }
        layer = next;
    }
    Ok(checked)
}

/// Per-declaration outcome of the exhaustive semantic check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InterpReport {
    pub decl: Name,
    pub model: Model,
    /// Number of environments over the declaration's context.
    pub envs: usize,
    /// Individual lemma instances verified.
    pub checks: usize,
}

fn collect_cohs_tm(tm: &Tm, out: &mut Vec<(Ctx, CtxMor)>) {
    if let Tm::Coh(c) = tm {
        out.push((c.ctx.clone(), c.args.clone()));
        for t in c.args.terms() {
            collect_cohs_tm(t, out);
        }
    }
}

fn collect_cohs_ty(ty: &Ty, out: &mut Vec<(Ctx, CtxMor)>) {
    if let Ty::Hom(h) = ty {
        collect_cohs_ty(&h.base, out);
        collect_cohs_tm(&h.lhs, out);
        collect_cohs_tm(&h.rhs, out);
    }
}

/// Exhaustively checks the semantic lemmas for one declaration:
///
/// * typing: the interpreted representative lands in the fiber of its type;
/// * substitution: `[[X[g]]](e) = [[X]]([[g]](e))` for every entry type of
///   every coherence subterm's context;
/// * projection: variables of the target context project the pushed
///   environment;
/// * weakening: interpretation is stable under appending an unused entry.
pub fn check_decl_semantics(
    model: Model,
    entry: &DeclEntry,
    budget: usize,
) -> Result<InterpReport, GlobError> {
    let ctx = &entry.ctx;
    let environments = envs(model, ctx)?;
    if environments.len() > budget {
        return Err(GlobError::BudgetExceeded {
            decl: entry.name.clone(),
            budget,
        });
    }
    let fail = |lemma: &'static str, detail: String| GlobError::LemmaFailure {
        lemma,
        decl: entry.name.clone(),
        detail,
    };

    let rep = match &entry.kind {
        DeclKind::Coh => Tm::coh(ctx.clone(), entry.ty.clone(), ctx.identity()),
        DeclKind::Def(body) => body.clone(),
    };
    let rep_ty = infer_type(ctx, &rep).map_err(GlobError::Check)?;
    let mut cohs = Vec::new();
    collect_cohs_ty(&entry.ty, &mut cohs);
    collect_cohs_tm(&rep, &mut cohs);

    // A fresh point entry for the weakening lemma.
    let fresh = (0..)
        .map(|k| Name::new(format!("w{k}")).unwrap())
        .find(|x| ctx.lookup(x).is_none())
        .unwrap();
    let mut wide = ctx.clone();
    wide.push(fresh, Ty::Star).map_err(CheckError::from)?;

    let mut checks = 0;
    for env in &environments {
        // Typing.
        let cell = interp_tm(model, ctx, &rep, env)?;
        let fiber = interp_ty(model, ctx, &rep_ty, env)?;
        if !fiber.contains(&cell) {
            return Err(fail("typing", format!("{cell} not in fiber of {rep_ty}")));
        }
        checks += 1;

        // Weakening: any value of the extra entry leaves the result alone.
        for p in 0..model.points() {
            let mut wide_env = env.clone();
            wide_env.push(Cell::Pt(p));
            let again = interp_tm(model, &wide, &rep, &wide_env)?;
            if again != cell {
                return Err(fail("weakening", format!("{again} != {cell}")));
            }
            checks += 1;
        }

        for (target, args) in &cohs {
            let pushed = interp_mor(model, ctx, args, env)?;
            for (i, (x, x_ty)) in target.entries().iter().enumerate() {
                // Projection.
                let via_var = interp_tm(model, target, &Tm::Var(x.clone()), &pushed)?;
                let direct = interp_tm(model, ctx, &args.terms()[i], env)?;
                if via_var != direct {
                    return Err(fail("projection", format!("{x}: {via_var} != {direct}")));
                }
                // Substitution on the entry type.
                let substituted = substitute(x_ty, args, target).map_err(CheckError::from)?;
                let outer = interp_ty(model, ctx, &substituted, env)?;
                let inner = interp_ty(model, target, x_ty, &pushed)?;
                if outer != inner {
                    return Err(fail(
                        "substitution",
                        format!("fibers of {x_ty} disagree under the arguments"),
                    ));
                }
                checks += 2;
            }
        }
    }

    Ok(InterpReport {
        decl: entry.name.clone(),
        model,
        envs: environments.len(),
        checks,
    })
}
