use dynlab::space::{CantorWord, CompactifiedInteger, SolenoidPoint};
use dynlab::systems::{FullShift, Odometer, PlusOne, ShiftWindow, Solenoid, Sturmian, System, SystemId, GOLDEN};

use crate::cli::SystemArgs;
use crate::output::{config, CliResult};

/// A system whose points can be read and written on the command line.
pub trait CliSystem: System {
    fn parse_point(&self, s: &str) -> CliResult<Self::Point>;
    fn show_point(&self, p: &Self::Point) -> String;
}

fn depth_check(found: u32, want: u32) -> CliResult<()> {
    if found != want {
        return Err(config(format!("point has depth {found}, system has depth {want}")));
    }
    Ok(())
}

impl CliSystem for Odometer {
    fn parse_point(&self, s: &str) -> CliResult<CantorWord> {
        let w: CantorWord = s.parse()?;
        depth_check(w.depth(), self.depth)?;
        Ok(w)
    }

    fn show_point(&self, p: &CantorWord) -> String {
        p.to_string()
    }
}

impl CliSystem for FullShift {
    fn parse_point(&self, s: &str) -> CliResult<ShiftWindow> {
        let w: ShiftWindow = s.parse()?;
        depth_check(w.half_width(), self.half_width)?;
        Ok(w)
    }

    fn show_point(&self, p: &ShiftWindow) -> String {
        p.to_string()
    }
}

impl CliSystem for Sturmian {
    fn parse_point(&self, s: &str) -> CliResult<i64> {
        s.parse().map_err(|_| config(format!("a Sturmian point is an integer position, got {s:?}")))
    }

    fn show_point(&self, p: &i64) -> String {
        p.to_string()
    }
}

impl CliSystem for PlusOne {
    fn parse_point(&self, s: &str) -> CliResult<CompactifiedInteger> {
        Ok(s.parse()?)
    }

    fn show_point(&self, p: &CompactifiedInteger) -> String {
        p.to_string()
    }
}

impl CliSystem for Solenoid {
    fn parse_point(&self, s: &str) -> CliResult<SolenoidPoint> {
        let p: SolenoidPoint = s.parse()?;
        depth_check(p.depth(), self.depth)?;
        Ok(p)
    }

    fn show_point(&self, p: &SolenoidPoint) -> String {
        p.to_string()
    }
}

pub fn parse_t0(s: &str) -> CliResult<f64> {
    if s == "golden" {
        return Ok(GOLDEN);
    }
    s.parse::<f64>()
        .ok()
        .filter(|t| t.is_finite())
        .ok_or_else(|| config(format!("flow time must be a number or `golden`, got {s:?}")))
}

/// The concrete system named by the arguments.
pub enum AnySystem {
    Odometer(Odometer),
    FullShift(FullShift),
    Sturmian(Sturmian),
    PlusOne(PlusOne),
    Solenoid(Solenoid),
}

impl AnySystem {
    pub fn from_args(args: &SystemArgs) -> CliResult<Self> {
        let id: SystemId = args.system.parse()?;
        if !(1..=40).contains(&args.depth) {
            return Err(config(format!("depth {} not in 1..=40", args.depth)));
        }
        Ok(match id {
            SystemId::Odometer => {
                if args.depth > 24 {
                    return Err(config("odometer depth above 24 makes the net too large"));
                }
                AnySystem::Odometer(Odometer { depth: args.depth })
            }
            SystemId::FullShift => {
                if args.depth > 20 {
                    return Err(config("full shift windows are limited to half width 20"));
                }
                AnySystem::FullShift(FullShift::new(args.depth))
            }
            SystemId::Sturmian(alpha) => AnySystem::Sturmian(Sturmian {
                alpha,
                half_width: args.depth.min(31),
                sample: args.span,
            }),
            SystemId::PlusOne => AnySystem::PlusOne(PlusOne),
            SystemId::Solenoid(t0) => {
                let t0 = match &args.t0 {
                    Some(s) => parse_t0(s)?,
                    None => t0,
                };
                AnySystem::Solenoid(Solenoid::new(args.depth, t0)?)
            }
        })
    }
}

/// Runs `$body` with `$sys` bound to the concrete system.
macro_rules! with_system {
    ($any:expr, $sys:ident => $body:expr) => {
        match $any {
            $crate::systems::AnySystem::Odometer($sys) => $body,
            $crate::systems::AnySystem::FullShift($sys) => $body,
            $crate::systems::AnySystem::Sturmian($sys) => $body,
            $crate::systems::AnySystem::PlusOne($sys) => $body,
            $crate::systems::AnySystem::Solenoid($sys) => $body,
        }
    };
}

/// As `with_system!`, for the zero-dimensional systems only.
macro_rules! with_zero_dimensional {
    ($any:expr, $sys:ident => $body:expr) => {
        match $any {
            $crate::systems::AnySystem::Odometer($sys) => $body,
            $crate::systems::AnySystem::FullShift($sys) => $body,
            $crate::systems::AnySystem::Sturmian($sys) => $body,
            $crate::systems::AnySystem::PlusOne($sys) => $body,
            $crate::systems::AnySystem::Solenoid(_) => {
                Err($crate::output::config("the solenoid is not zero-dimensional"))
            }
        }
    };
}

pub(crate) use {with_system, with_zero_dimensional};
