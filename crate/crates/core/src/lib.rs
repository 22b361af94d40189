pub mod cli;
pub mod constraint;
pub mod fpalg;
pub mod frame;
pub mod genbench;
pub mod perm;
pub mod reduction;
