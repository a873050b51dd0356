pub mod bmodule;
pub mod charmod;
pub mod cli;
pub mod cohom;
pub mod error;
pub mod replay;
pub mod rootsys;
pub mod subspace;
pub mod verify;
