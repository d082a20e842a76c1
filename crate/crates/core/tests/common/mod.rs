#![allow(dead_code)]

pub mod fixtures;
pub mod mailbox;
pub mod toy;
