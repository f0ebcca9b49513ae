#![allow(dead_code)]

pub mod bruteforce;
pub mod enumerate;
