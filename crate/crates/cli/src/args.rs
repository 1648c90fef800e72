use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krein_core::contour::Side;
use krein_core::krein::{KreinConfig, ZetaRoute};
use krein_core::schottky::Orientation;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "krein",
    version,
    about = "Zeta functions, scattering determinants and Krein phases of Schottky surfaces"
)]
pub struct Cli {
    /// Group specification file (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Width of the parallel grids; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=256))]
    #[serde(skip)]
    pub threads: u16,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Primitive length spectrum (CSV: word, length, multiplicity).
    Spectrum {
        #[arg(long, default_value_t = 20.0)]
        l_max: f64,
        #[arg(long, value_enum, default_value_t = OrientationArg::Unoriented)]
        orientation: OrientationArg,
    },
    /// Exponent of convergence δ.
    Delta {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 32)]
        nodes: usize,
    },
    /// log Z on a λ grid by both routes, with their discrepancy.
    Zeta {
        /// `RE0:RE1:N,IM0:IM1:M`; defaults to Re λ ∈ [δ+0.2, δ+2], |Im λ| ≤ 5.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 40.0)]
        l_max: f64,
        #[arg(long, default_value_t = 32)]
        nodes: usize,
    },
    /// Zeros of Z in a rectangle (JSON records).
    Resonances {
        /// `RE0:RE1,IM0:IM1`.
        #[arg(long, default_value = "0:0.5,-1:1")]
        rect: String,
        #[arg(long, default_value_t = 24)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// ξ and ∂ξ on [0, zmax] (CSV: t, xi, dxi, weyl_residual).
    Xi {
        #[arg(long, default_value_t = 10.0)]
        zmax: f64,
        /// Number of grid points, including t = 0.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Weyl polynomial with the printed factor convention.
        #[arg(long)]
        paper_literal: bool,
        #[command(flatten)]
        krein: KreinArgs,
    },
    /// det S_X on (0, zmax] by both routes, with the functional-equation residual.
    Dets {
        #[arg(long, default_value_t = 4.0)]
        zmax: f64,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Order of the zero of Z at 1/2; verified numerically when absent.
        #[arg(long)]
        m_half: Option<i64>,
        #[command(flatten)]
        krein: KreinArgs,
    },
    /// det P_k with the contour used (JSON).
    Detpk {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value_t = SideArg::Upper)]
        contour_side: SideArg,
        #[arg(long, default_value_t = 0.1)]
        contour_radius: f64,
        #[command(flatten)]
        krein: KreinArgs,
    },
    /// Weyl-law fit of ξ (JSON report).
    Weyl {
        #[arg(long, default_value_t = 20.0)]
        tmax: f64,
        #[arg(long, default_value_t = 31)]
        samples: usize,
        #[arg(long)]
        paper_literal: bool,
        #[command(flatten)]
        krein: KreinArgs,
    },
    /// Finite part of ∫ u x^w dx for samples read from CSV (columns x, u).
    Renorm {
        #[arg(long)]
        input: PathBuf,
        /// Declared exponents; suffix `L` adds a log term, e.g. `-2,-1L,0,1`.
        #[arg(long, default_value = "-2,-1,0,1,2", allow_hyphen_values = true)]
        shape: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        weight: f64,
        /// Fit window as a fraction of the largest x.
        #[arg(long, default_value_t = 0.125)]
        window: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Delta { .. } => "delta",
            Command::Zeta { .. } => "zeta",
            Command::Resonances { .. } => "resonances",
            Command::Xi { .. } => "xi",
            Command::Dets { .. } => "dets",
            Command::Detpk { .. } => "detpk",
            Command::Weyl { .. } => "weyl",
            Command::Renorm { .. } => "renorm",
        }
    }

    pub fn needs_group(&self) -> bool {
        !matches!(self, Command::Renorm { .. })
    }
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct KreinArgs {
    #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
    pub route: RouteArg,
    /// Euler cutoff; chosen from --dxi-tol when absent.
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub dxi_tol: f64,
    #[arg(long, default_value_t = 32)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub quad_tol: f64,
}

impl KreinArgs {
    pub fn config(&self) -> KreinConfig {
        KreinConfig {
            route: match self.route {
                RouteArg::Auto => ZetaRoute::Auto,
                RouteArg::Euler => ZetaRoute::Euler,
                RouteArg::Fredholm => ZetaRoute::Fredholm,
            },
            euler_l_max: self.l_max,
            dxi_tol: self.dxi_tol,
            nodes: self.nodes,
            quad_tol: self.quad_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Auto,
    Euler,
    Fredholm,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationArg {
    Oriented,
    Unoriented,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Oriented => Orientation::Oriented,
            OrientationArg::Unoriented => Orientation::Unoriented,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Upper,
    Lower,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Upper => Side::Upper,
            SideArg::Lower => Side::Lower,
        }
    }
}
