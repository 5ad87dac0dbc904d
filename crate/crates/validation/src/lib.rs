//! Acceptance checks for the workspace live in `tests/acceptance.rs`; run
//! them with `cargo test -p avlab-validation`. Each criterion prints one
//! `PASS` or `FAIL` line and the target fails if any criterion does.
