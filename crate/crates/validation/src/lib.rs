//! Holds the `acceptance` test target for `distomp-core`.
//!
//! Run it with `cargo test -p distomp-validation --test acceptance`. It prints
//! one PASS/FAIL line per criterion and exits nonzero if any fails. Living in
//! its own package, it runs after every other test binary in the workspace.
