//! Synthetic takers and policy comparison.
//!
//! A taker is a latent profile sampled from the prior; answers are drawn
//! from the question CPT rows at that profile. [`run_batch`] runs every
//! policy against the same takers (a paired design), and all randomness
//! comes from ChaCha8 streams derived from one seed, so a report is a pure
//! function of its inputs.

mod batch;
mod generate;
mod run;
mod taker;

pub use batch::{
    compare_to_information_gain, derive_seed, run_batch, run_generated_batch, stop_reason_total,
    summarize, BatchReport, PairedComparison, PolicySummary, RunTrace, RNG_ALGORITHM,
};
pub use generate::{generate_model, GeneratorConfig};
pub use run::{run_session, PolicySpec, SessionTrace};
pub use taker::{profile_index, sample_profile, simulate_answer, Profile, SimulatedTaker};
