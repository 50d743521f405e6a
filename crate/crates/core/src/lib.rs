//! Additive representation counts r(k, A, n) computed two independent ways:
//! by truncated power-series convolution, and through automata, linear
//! representations and the semigroup construction.

pub mod digit_automata;
pub mod linrep;
pub mod regular_to_automatic;
pub mod relations;
pub mod series_oracle;
pub mod verify;
