//! Windows on ℝ: a closed symbolic class with exact evaluation, closed-form or
//! certified-quadrature inner products, painless duals, restriction to γℤ,
//! periodization, and Janssen coefficients over lattices in ℝ².

pub mod janssen;
pub mod painless;
pub mod piecewise;
pub mod poly;
pub mod quad;
pub mod sampled;
pub mod window;

pub use janssen::{janssen_coefficients, janssen_cross, right_action, JanssenOptions};
pub use painless::{painless_dual, PainlessDual};
pub use piecewise::{PeriodicPoly, PiecewisePoly};
pub use quad::{Integral, EPS_QUAD};
pub use sampled::{restrict, restrict_within, SampledSequence, EPS_TAIL};
pub use window::{inner_product, inner_product_with_error, QuotientWindow, Window};
