//! Browser demo bindings.
