pub mod fem;
pub mod infsup;
pub mod linalg;
pub mod mesh;
pub mod study;
