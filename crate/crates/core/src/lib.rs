pub mod syntax;
pub mod semantics;
pub mod machine;
pub mod compile;
pub mod decision;
pub mod encoders;
pub mod gen;
pub mod corpus;
pub mod cli;
