//! Library side of the command-line front end: run configuration, the five
//! on-disk data formats, JSON report bodies, SVG emission, and the
//! block-parallel simulation driver. The `qdot` binary is a thin dispatcher
//! over [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod report;
pub mod svg;
