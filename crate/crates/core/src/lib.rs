//! Sizing toolkit for a wind / photovoltaic / biogas / battery microgrid.
//!
//! The crate simulates one candidate system over an hourly site-year
//! ([`dispatch`]), prices it over a multi-decade horizon ([`economics`]),
//! and searches the mixed-integer design space with a family of
//! population-based metaheuristics ([`optimize`]). [`bench`] reproduces the
//! full comparison protocol — repeated independent runs per algorithm with
//! statistics and exportable tables — and [`config`] binds every tunable to
//! one TOML file. Input years are ingested or synthesized by
//! [`timeseries`]; [`solar`] and [`components`] hold the underlying device
//! and geometry models.

pub mod components;
pub mod config;
pub mod dispatch;
pub mod economics;
pub mod seeding;
pub mod solar;
pub mod timeseries;

pub mod bench;
pub mod optimize;
