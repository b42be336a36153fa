use cohcheck::check::Verdict;
use cohcheck::corpus;

#[test]
fn corpus_checks() {
    let (_table, reports) = corpus::load();
    assert!(reports.len() >= 18, "corpus has {} declarations", reports.len());
    for r in &reports {
        assert_eq!(r.status, Verdict::Ok, "{}: {:?}", r.decl, r.diagnostics);
    }
}
