pub mod circuit;
pub mod dynamics;
pub mod encoding;
pub mod harness;
pub mod statics;
pub mod syntax;
