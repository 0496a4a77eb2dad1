//! Optimal dividend band strategies for Cramér–Lundberg risk processes whose
//! claim sizes have rational Laplace transforms (exponential, Erlang and
//! hyperexponential laws), with Gerber–Shiu ruin penalties and an optional
//! fixed cost per dividend payment.
//!
//! The pipeline is
//! [`RiskModel`] → [`ScaleBasis`] → [`GerberShiu`] → [`multi_band_recursion`]
//! → [`PiecewiseValue`], and [`simulate`] checks any value function against
//! an exact event-driven Monte Carlo of the controlled reserve.
//!
//! Every function of the surplus level is carried as an [`ExpPoly`], a finite
//! sum of polynomial-times-exponential terms. Convolution with the scale
//! function and tail integrals against the claim density stay inside this
//! class, so value functions of multi-band strategies are exact closed forms.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod exppoly;
mod poly;
mod search;

pub mod band_optimizer;
pub mod gerber_shiu;
pub mod levy_model;
pub mod scale_functions;
pub mod simulator;
pub mod value_function;

pub use band_optimizer::{
    check_generator_nonpositive, d_function, find_single_band, find_two_band,
    horizon, multi_band_recursion, BarrierInfluence, Branch, CandidateLevels, GeneratorCheck, NextBand,
};
pub use error::Error;
pub use exppoly::{ExpPoly, ExpTerm};
pub use gerber_shiu::{gerber_shiu_exppoly, GerberShiu, Payoff, PayoffPiece, Penalty};
pub use levy_model::{cl_roots, net_profit, psi, ClaimLaw, GammaTerm, RiskModel, RootSet};
pub use poly::{Poly, C64};
pub use scale_functions::ScaleBasis;
pub use simulator::{
    ruin_transform_paths, simulate, simulate_paths, simulate_ruin_transform, BLOCK, PathStats, SimConfig, SimResult};
pub use value_function::{assemble, lump_sum_value, Band, BandStrategy, PiecewiseValue, Segment};

pub type Result<T> = core::result::Result<T, Error>;
