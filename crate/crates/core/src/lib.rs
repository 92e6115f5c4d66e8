pub mod scalar;
pub mod upoly;
pub mod linalg;
pub mod groupring;
pub mod toric;
pub mod algebra;
pub mod jacobian;
pub mod floer;
pub mod hochschild;
pub mod pearl;
pub mod config;
pub mod cache;
pub mod pipeline;
pub mod suite;
