//! Evaluation of collaboration strategies for city logistics.
//!
//! The macro level scores signed collaboration blocks between businesses and
//! citizens; the micro level filters trucks by compliance intents, packs
//! orders into the fewest trips, routes them and tallies emissions.

pub mod assignment;
pub mod collab;
pub mod complexity;
pub mod compliance;
pub mod emissions;
pub mod fixtures;
pub mod num;
pub mod pipeline;
pub mod report;
pub mod routing;
pub mod scenario;
