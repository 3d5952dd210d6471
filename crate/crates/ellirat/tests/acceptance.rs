//! Acceptance suite: runs every verification criterion against the built-in
//! corpus and prints one pass/fail line per criterion.
//!
//! Run with `cargo test -p ellirat --test acceptance -- --nocapture` to see
//! the matrix.

use ellirat::verify;

#[test]
fn acceptance_criteria() {
    let outcomes = verify::run_all();
    assert_eq!(outcomes.len(), 12, "expected all twelve criteria to run");
    let mut all_passed = true;
    for o in &outcomes {
        println!(
            "[{}] {:<24} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        all_passed &= o.passed;
    }
    assert!(
        all_passed,
        "acceptance criteria failed; see the matrix above"
    );
}
