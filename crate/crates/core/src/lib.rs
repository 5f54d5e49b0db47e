//! Agents exchanging Slick policies, enacting actions whose permission any
//! observer can decide, and touching shared assets only through enacted
//! effects.

pub mod agents;
pub mod dataplane;
pub mod lang;
pub mod model;
pub mod runtime;
