pub mod error;
pub mod field;
pub mod geometry;
pub mod order;
pub mod poly;
pub mod presentation;
pub mod rees;
pub mod session;
pub mod resultant;
pub mod transform;
pub mod verify;
