//! A workbench for finite and locally finite Kripke frames: p-morphisms
//! and their bounded epi/mono classification, categorical constructions
//! (coequalizers, cokernel pairs, equalizers, pullbacks), powerset modal
//! algebras and their duality with frames, a set-based sequent calculus at
//! finite instantiation, and bounded probes for definability,
//! interpolation, amalgamation and exactness properties.
//!
//! Every operation is deterministic: frames iterate in sorted order, all
//! searches pick witnesses canonically, and randomized suites take an
//! explicit seed.
//!
//! ## Runnable examples
//!
//! One example per capability, under `examples/`:
//!
//! ```text
//! cargo run --example subreductions        # subreduction catalogs
//! cargo run --example morphism_classes     # bounded epi/mono classification
//! cargo run --example cokernel_pairs       # cokernel pair + equalizer = image
//! cargo run --example quotients            # coequalizers and joint coequalizers
//! cargo run --example duality              # powerset algebra round trip
//! cargo run --example local_finiteness     # identity checks and lazy-frame probes
//! cargo run --example sequent_proofs       # proof checking and derived equivalences
//! cargo run --example deduction            # theory discharge and recovery
//! cargo run --example normal_forms         # meet-of-joins normal forms
//! cargo run --example countermodels        # valuation search over catalogs
//! cargo run --example amalgamation         # amalgamation and superamalgamation
//! cargo run --example definability         # weak and strong definability probes
//! cargo run --example separation           # separation-of-variables checks
//! cargo run --example functional_frames    # products and equalizers of functions
//! cargo run --example walkthrough          # end-to-end reproduction run
//! ```
//!
//! The `kframes` binary exposes the same capabilities over frame,
//! morphism, formula and proof files; see the README for the verb list.

pub mod algebra;
pub mod calculus;
pub mod cat;
pub mod cli;
pub mod fileio;
pub mod fixtures;
pub mod frame;
pub mod morphism;
pub mod props;
pub mod report;

pub use frame::{Frame, FrameClass, LazyFrame, PointId, TableLogic};
pub use morphism::{Classification, PMorphism};
