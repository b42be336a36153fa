//! Finite-model interpreter: globular identities, environment enumeration,
//! singleton fibers, and the exhaustive semantic lemmas over the corpus.

mod common;

use std::str::FromStr;
use std::time::Instant;

use cohcheck::corpus;
use cohcheck::glob::{
    check_decl_semantics, check_globular_identities, envs, interp_tm, interp_ty, Cell, Env,
    GlobError, Model,
};
use cohcheck::syntax::{Tm, Ty};
use common::*;

const BUDGET: usize = 10_000;

#[test]
fn model_descriptors() {
    assert_eq!(Model::from_str("discrete:2").unwrap(), Model::Discrete(2));
    assert_eq!(Model::from_str("codiscrete:3").unwrap(), Model::Codiscrete(3));
    for bad in ["discrete", "discrete:0", "discrete:10", "chaotic:2", "2"] {
        assert!(matches!(Model::from_str(bad), Err(GlobError::BadModel(_))));
    }
    assert_eq!(Model::Codiscrete(3).to_string(), "codiscrete:3");
}

#[test]
fn globular_identities_hold() {
    // Boundaries of boundaries agree in both families, by enumeration.
    assert!(check_globular_identities(Model::Discrete(2), 3).unwrap() > 0);
    assert!(check_globular_identities(Model::Codiscrete(3), 3).unwrap() > 0);
}

#[test]
fn environment_enumeration() {
    let (inv_ctx, _) = inv_head();
    // Discrete on 2 points: only the diagonal environments survive the
    // empty fiber over unequal endpoints.
    let d = envs(Model::Discrete(2), &inv_ctx).unwrap();
    assert_eq!(d.len(), 2);
    for e in &d {
        assert_eq!(e[0], e[1]);
        assert_eq!(e[2].dim(), 1);
    }
    // Codiscrete on 3 points: hom fibers are singletons, so 3 x 3 choices.
    let c = envs(Model::Codiscrete(3), &inv_ctx).unwrap();
    assert_eq!(c.len(), 9);
}

#[test]
fn hom_fibers_are_singletons_over_valid_environments() {
    let (inv_ctx, inv_ty) = inv_head();
    for model in [Model::Discrete(2), Model::Codiscrete(3)] {
        for env in envs(model, &inv_ctx).unwrap() {
            let fiber = interp_ty(model, &inv_ctx, &inv_ty, &env).unwrap();
            assert_eq!(fiber.len(), 1, "{model}");
        }
    }
}

#[test]
fn coherences_interpret_by_the_unique_filler() {
    let (inv_ctx, inv_ty) = inv_head();
    let inverse = Tm::coh(inv_ctx.clone(), inv_ty.clone(), inv_ctx.identity());
    let model = Model::Codiscrete(2);
    for env in envs(model, &inv_ctx).unwrap() {
        let cell = interp_tm(model, &inv_ctx, &inverse, &env).unwrap();
        // The inverse of the cell from env[0] to env[1] runs backwards.
        let expected = Cell::Codi {
            src: Box::new(env[1].clone()),
            tgt: Box::new(env[0].clone()),
        };
        assert_eq!(cell, expected);
    }
}

#[test]
fn empty_context_has_one_environment() {
    let e = envs(Model::Discrete(2), &cohcheck::syntax::Ctx::empty()).unwrap();
    assert_eq!(e, vec![Env::new()]);
    // A lone point ranges over the points.
    let one = envs(Model::Discrete(2), &ctx(&[("x", Ty::Star)])).unwrap();
    assert_eq!(one.len(), 2);
}

#[test]
fn semantic_lemmas_hold_over_the_corpus() {
    // Exhaustive over both required models, within budget and time.
    let (table, _) = corpus::load();
    let start = Instant::now();
    for model in [Model::Discrete(2), Model::Codiscrete(3)] {
        let mut decls = 0;
        for entry in table.iter() {
            let report = check_decl_semantics(model, entry, BUDGET)
                .unwrap_or_else(|e| panic!("{model} {}: {e}", entry.name));
            assert!(report.envs <= BUDGET);
            assert!(report.checks >= report.envs);
            decls += 1;
        }
        assert!(decls >= 18, "only {decls} declarations under {model}");
    }
    assert!(
        start.elapsed().as_secs() < 10,
        "semantic sweep took {:?}",
        start.elapsed()
    );
}

#[test]
fn budget_is_enforced() {
    let (table, _) = corpus::load();
    let entry = table.iter().next().unwrap();
    let err = check_decl_semantics(Model::Discrete(2), entry, 0).unwrap_err();
    assert!(matches!(err, GlobError::BudgetExceeded { .. }));
}
