//! Acceptance criteria for `isoparam`, run by `cargo test -p isoparam-acceptance`.
