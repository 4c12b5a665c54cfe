//! Passenger behavior model for shared mobility-on-demand pricing.
//!
//! A ride offer with uncertain travel times is an uncertain prospect: its
//! utility is a bounded random variable shifted by the tariff. This crate
//! models how a passenger subjectively values such an offer (reference-point
//! framing, loss aversion, diminishing sensitivity, and rank-dependent
//! probability distortion), turns objective and subjective utilities into
//! acceptance probabilities, and inverts the acceptance curve to price an
//! offer at a target probability.
//!
//! Modules:
//! - [`cpt`]: value function, Prelec probability weighting, decision weights,
//!   and subjective utility of discrete and continuous prospects.
//! - [`dist`]: the bounded travel-disutility distributions (truncated normal,
//!   optimistic/pessimistic truncated exponential, truncated Poisson, discrete
//!   atoms, point mass) with exact cdf/quantile/mean/atomization.
//! - [`behavior`]: travel attributes to utilities, reference points, and
//!   objective/subjective acceptance probabilities.
//! - [`pricing`]: monotone tariff inversion, the loss-aversion threshold, the
//!   mixed-prospect tariff band, and the waiting-time-driven target
//!   probability hook.
//!
//! All arithmetic is generic over the scalar type via [`num::Real`]
//! (`f32` or `f64`); concrete `f64` aliases live at the crate root.

// Validations use the negated-comparison form so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behavior;
pub mod cpt;
pub mod dist;
pub mod num;
pub mod pricing;

mod math;
mod quad;

pub use quad::adaptive_simpson;

/// `f64` aliases for the main model types.
pub type CptParams64 = cpt::CptParams<f64>;
pub type OutcomeLottery64 = cpt::OutcomeLottery<f64>;
pub type LotteryAtom64 = cpt::LotteryAtom<f64>;
pub type DecisionWeights64 = cpt::DecisionWeights<f64>;
pub type Discretization64 = cpt::Discretization<f64>;
pub type SupportInterval64 = dist::SupportInterval<f64>;
pub type BoundedDistribution64 = dist::BoundedDistribution<f64>;
pub type UtilityCoefficients64 = behavior::UtilityCoefficients<f64>;
pub type TravelTimes64 = behavior::TravelTimes<f64>;
pub type TravelTimeBounds64 = behavior::TravelTimeBounds<f64>;
pub type RideOffer64 = behavior::RideOffer<f64>;
pub type CertainOption64 = behavior::CertainOption<f64>;
pub type Reference64 = behavior::Reference<f64>;
pub type AcceptanceCurve64 = behavior::AcceptanceCurve<f64>;
pub type TariffBracket64 = pricing::TariffBracket<f64>;
pub type SolverSettings64 = pricing::SolverSettings<f64>;
pub type TariffSolution64 = pricing::TariffSolution<f64>;
pub type MixedProspectBand64 = pricing::MixedProspectBand<f64>;
pub type EwtState64 = pricing::EwtState<f64>;
pub type HPolicy64 = pricing::HPolicy<f64>;
