//! Named numerical thresholds and default quadrature orders.

/// Default Gauss–Legendre order per axis.
pub const DEFAULT_ORDER: usize = 16;

/// Default order per axis for three-dimensional sphere and disk fibers.
pub const FIBER3_ORDER: usize = 12;

/// Default order of the `[0,1]` and simplex quadratures inside transgressions.
pub const TRANSGRESSION_ORDER: usize = 16;

/// Sections with smaller norm at some node are treated as vanishing.
pub const VANISHING_SECTION: f64 = 1e-8;

/// Projectors must be idempotent and symmetric to this accuracy.
pub const PROJECTOR: f64 = 1e-10;

/// Minimum singular value of the vertical derivative at a transversal zero.
pub const TRANSVERSALITY: f64 = 1e-6;

/// Spot checks of bundle-map compatibility with a connection.
pub const SYMMETRY_PRECONDITION: f64 = 1e-6;

/// Pointwise closedness of base forms fed to inverse Thom maps.
pub const CLOSEDNESS: f64 = 1e-8;

/// Closedness of the odd-rank pair.
pub const ODD_PAIR_CLOSEDNESS: f64 = 1e-5;
