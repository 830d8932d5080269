pub mod bits;
pub mod conf;
pub mod crosscheck;
pub mod encoding;
pub mod equiv;
pub mod export;
pub mod game;
pub mod ident;
pub mod memenc;
pub mod rccs;
pub mod syntax;
