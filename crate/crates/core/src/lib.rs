pub mod gf2linalg;
pub mod gf2poly;
pub mod construct;
pub mod codec;
pub mod sim;
pub mod cli;
