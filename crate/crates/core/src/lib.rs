pub mod dist;
pub mod entropy;
pub mod error;
pub mod exponents;
pub mod numeric;
pub mod oracle;
pub mod rate;
