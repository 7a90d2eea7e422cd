//! Techno-economic modeling of islanded hybrid microgrids.
//!
//! The crate simulates a PV / wind / diesel / battery / converter system hour
//! by hour over one year, routes surplus renewable energy into a hot-water
//! diversion load, prices the result (net present cost, cost of energy, CO₂),
//! and enumerates sizing search spaces to rank candidate systems.
//!
//! Modules follow the pipeline:
//!
//! * [`resource`] — solar/wind/temperature series, Weibull wind statistics
//! * [`load`] — appliance-based electrical load profiles
//! * [`components`] — per-component power, fuel, and efficiency models
//! * [`thermal`] — the water-heater diversion load and its storage tank
//! * [`dispatch`] — the hourly power-management engine
//! * [`economics`] — discounted cash flows, NPC/COE, emissions
//! * [`optimizer`] — enumeration, ranking, and sensitivity sweeps
//! * [`scenario`] — the bundled island-resort study defaults

pub mod components;
pub mod dispatch;
pub mod economics;
pub mod error;
pub mod load;
pub mod optimizer;
pub mod resource;
pub mod scenario;
pub mod thermal;

pub use error::{Error, Result};

/// Hours in the simulated (non-leap) year.
pub const HOURS_PER_YEAR: usize = 8760;

/// Days in the simulated year.
pub const DAYS_PER_YEAR: usize = 365;

/// Days in each calendar month of the simulated year.
pub const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Month index (0-11) containing the given day of year (0-364).
pub fn month_of_day(day: usize) -> usize {
    let mut d = day;
    for (m, &len) in MONTH_DAYS.iter().enumerate() {
        if d < len {
            return m;
        }
        d -= len;
    }
    11
}
