//! Exact-arithmetic construction and classification of Bell-local,
//! no-signalling and partially deterministic polytopes over finite
//! correlation scenarios.
//!
//! Every number in the library is an exact rational ([`Q`]). Membership
//! answers come with certificates that are checked before they are
//! returned, and enumeration kernels fail deterministically once a work
//! budget is exhausted.

pub mod applications;
pub mod behaviour;
pub mod classify;
pub mod error;
pub mod exactgeom;
pub mod fine;
pub mod json;
pub mod num;
pub mod polytopes;
pub mod product;
pub mod scenario;

pub use applications::{
    Inequality, InequalityTag, PartySubsetCollection, Relabeling, SequentialScenario, Witness,
};
pub use behaviour::{Behaviour, NsViolation};
pub use classify::{ClassReport, Classification, MsfDescriptor, Relation};
pub use error::{Error, Result};
pub use exactgeom::{AffineFunctional, Budget, HRep, MembershipCertificate, VRep};
pub use fine::{JointDistribution, PdModel};
pub use num::Q;
pub use polytopes::{Family, FamilySpec, VertexSet};
pub use scenario::{Half, InputCollection, Restriction, Scenario};
