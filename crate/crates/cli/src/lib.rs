//! Library behind the `macfeas` binary: scenario files, report documents,
//! and the four subcommands (check, allocate, bench, region).

pub mod allocate;
pub mod bench;
pub mod check;
pub mod region;
pub mod report;
pub mod scenario;

/// Process exit codes shared by all subcommands: 0 success/feasible,
/// 1 usage or input error, 2 infeasible verdict or below-threshold sum.
pub mod exit_code {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
}
