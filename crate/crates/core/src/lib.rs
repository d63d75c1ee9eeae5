//! Root enumeration for separable complex equations `f(z) = y` through the
//! hyper-Lambert `HW` maps.
//!
//! The solver truncates `z·exp(c(z)) - y` to a Taylor polynomial, takes the
//! polynomial root closest to satisfying the untruncated equation, polishes
//! it with Newton's method, then divides the found root out and repeats.
//!
//! ```
//! use hwroots::{enumerate::{enumerate_roots, EnumerateOptions}, expr::parse, Complex64};
//!
//! let f = parse("(z-2)*(z-3)*(z-5)").unwrap();
//! let found = enumerate_roots(&f, Complex64::new(2.0, 0.0), 3, &EnumerateOptions::default()).unwrap();
//! assert_eq!(found.roots.len(), 3);
//! assert!(found.roots.iter().all(|r| r.residual < 1e-9));
//! ```

pub mod enumerate;
pub mod expr;
pub mod hw;
pub mod polyroots;
pub mod series;

pub use num_complex::Complex64;

pub use enumerate::{cluster_multiplicities, enumerate_rational, enumerate_roots, RootRecord};
pub use expr::{eval_point, parse, simplify_exp_log, Expr, ExprError};
pub use hw::{g_map, hw_solve, HwQuery, HwResult};
pub use polyroots::{all_roots, Poly};
pub use series::{jet_of_expr, Jet, SeriesError};
