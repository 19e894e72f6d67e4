//! Numerical building blocks shared by the physics modules.

pub mod gaussian;
pub mod hermite;
pub mod ode;
pub mod operator;
pub mod quadrature;
pub mod special;

pub use gaussian::{integrate_gaussian_quadratic, log_integrate_gaussian_quadratic};
pub use hermite::{hermite_functions, hermite_phys, hermite_phys_all};
pub use ode::{solve_ode, solve_ode_until, OdeProblem, OdeSolution, Termination};
pub use operator::{expm, matrix_exp, TruncatedOperator};
pub use quadrature::{AdaptiveOptions, Integral, QuadratureRule, RuleKind};
pub use special::{erfc_real, gaussian_density};
