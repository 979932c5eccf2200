//! Facet enumeration, facet certificates, membership and projection.

mod certificate;
mod dd;
mod fine;
mod fm;
mod membership;

pub use certificate::{check_facet, FacetCertificate, NotFacet};
pub use dd::{classify_facets, dd_facets, dd_facets_with, facets_of_points, local_facets, ClassCount, FacetEnumeration, DEFAULT_MAX_VERTICES};
pub use fine::{build_fine_system, fine_elimination_order, fine_facets};
pub use fm::{fm_eliminate, project, remove_redundant, LinearSystem};
pub use membership::{membership, Membership};
