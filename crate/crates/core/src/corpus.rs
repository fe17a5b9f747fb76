//! Diagrams and scripts shipped with the crate.

pub const SUPP_LHS: &str = include_str!("../corpus/supp_lhs.rgd");
pub const SUPP_RHS: &str = include_str!("../corpus/supp_rhs.rgd");
/// Rewrites `T(SUPP_LHS)` into `T(SUPP_RHS)` in rgb.
pub const SUPPLEMENTARITY: &str = include_str!("../corpus/supplementarity.rgs");
pub const EULER_LHS: &str = include_str!("../corpus/euler_lhs.rgd");
pub const EULER_RHS: &str = include_str!("../corpus/euler_rhs.rgd");
pub const EULER: &str = include_str!("../corpus/euler.rgs");

/// Every bundled diagram file with its name.
pub const DIAGRAMS: [(&str, &str); 4] = [
    ("supp_lhs.rgd", SUPP_LHS),
    ("supp_rhs.rgd", SUPP_RHS),
    ("euler_lhs.rgd", EULER_LHS),
    ("euler_rhs.rgd", EULER_RHS),
];
