//! Shared input builders for the benchmark suite live in the bench
//! target itself; this library is intentionally empty.
