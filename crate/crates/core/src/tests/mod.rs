//! Property tests and frozen reference draws. They live with the unit tests
//! so they run ahead of the acceptance binary.

mod rng_reference;
