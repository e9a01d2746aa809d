#![no_std]

extern crate alloc;

pub mod agamma;
pub mod cantor;
pub mod closeness;
pub mod compensator;
pub mod error;
pub mod functional;
pub mod measure;
pub mod operator;
pub mod quotient;
pub mod sample;
pub mod scalar;
