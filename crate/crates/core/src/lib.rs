//! Conjugacy classes of PSL(2,q) viewed as racks.

pub mod abelian;
pub mod assoc;
pub mod config;
pub mod conjugacy;
pub mod field;
pub mod finite;
pub mod fpgroup;
pub mod matrix;
pub mod rack;
pub mod subgroups;
pub mod taxonomy;
pub mod verify;
