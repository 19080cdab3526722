//! Independent references: lattice dispersion, the continuum retarded
//! propagator, and exact (untrotterized) evolution for one or a few sites.

mod bessel;
mod dispersion;
mod few_site;
mod single;

pub use bessel::{bessel_j0, retarded_propagator};
pub use dispersion::{dispersion, signed_momentum, DispersionTable};
pub use few_site::{FewSiteSystem, FEW_SITE_DIMENSION_LIMIT};
pub use single::ExactQumodeEvolver;
