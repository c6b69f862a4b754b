//! Local (p-adic) machinery: characters, counts modulo prime powers, and
//! closed-form local densities for single levels and for pairs.

pub mod chars;
pub mod count;
pub mod density;
pub mod pair;

pub use chars::{chi4, chi8, jacobi, kronecker, legendre};
pub use count::{count_markoff_prime_power, count_mod, count_pair_prime_power, COUNT_MOD_LIMIT};
pub use density::{
    delta_2, delta_p, delta_p_odd, delta_truncated, explicit_solution_mod, local_solvable, nl_terms, np_closed, to_f64,
    LocalDensityProfile,
};
pub use pair::{delta_pair_odd, delta_pair_two, pair_density_at_level, pair_nl_two};
