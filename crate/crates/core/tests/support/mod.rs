#![allow(dead_code)]

pub mod bessel_oracle;
pub mod kernels;
pub mod random;
