//! Closed-form bounds with exact rationals, certified series intervals and
//! numeric corroboration of the underlying mathematical programs.

mod poa;
mod program;
mod series;
mod table;

pub use poa::{ff_ratio, poa_lower, poa_upper};
pub use program::{lambda_t_r_x, mp_bruteforce, mp_objective, optimal_vector, SizeVector};
pub use series::{
    lambda_limit, lambda_r, lambda_t, lambda_t_x, lambda_t_x_argmax_check, BoundInterval,
};
pub use table::{results_table, table_csv, TableRow};
