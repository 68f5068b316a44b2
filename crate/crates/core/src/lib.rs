pub mod ca;
pub mod cubelets;
pub mod error;
pub mod sleptsov;
pub mod verify;

/// Nets with 64-bit token counts.
pub type SleptsovNet = sleptsov::Net<u64>;
pub type SleptsovMarking = sleptsov::Marking<u64>;
