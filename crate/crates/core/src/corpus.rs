//! The embedded corpus of coherence operations, in dependency order.

use crate::check::{check_program, CheckReport, SymbolTable, Verdict};
use crate::parse::{parse_program, ParseError, Program};

/// The corpus files, in the order they must be checked.
pub const FILES: &[(&str, &str)] = &[
    ("basics.coh", include_str!("../corpus/basics.coh")),
    ("laws.coh", include_str!("../corpus/laws.coh")),
    ("twodim.coh", include_str!("../corpus/twodim.coh")),
    ("pentagon.coh", include_str!("../corpus/pentagon.coh")),
    ("extras.coh", include_str!("../corpus/extras.coh")),
    ("eh.coh", include_str!("../corpus/eh.coh")),
];

/// Parses every corpus file.
pub fn parse_all() -> Result<Vec<(&'static str, Program)>, ParseError> {
    FILES
        .iter()
        .map(|(name, text)| Ok((*name, parse_program(text, name)?)))
        .collect()
}

/// Parses and checks the whole corpus into one symbol table.
///
/// Panics if the embedded corpus is broken: the corpus ships with the crate
/// and failing to check it is a build defect, not an input error.
pub fn load() -> (SymbolTable, Vec<CheckReport>) {
    let mut table = SymbolTable::new();
    let mut reports = Vec::new();
    for (name, program) in parse_all().expect("embedded corpus must parse") {
        for report in check_program(&mut table, &program) {
            assert!(
                report.status == Verdict::Ok,
                "embedded corpus declaration {} in {} failed: {:?}",
                report.decl,
                name,
                report.diagnostics
            );
            reports.push(report);
        }
    }
    (table, reports)
}
