//! Exact finite probabilistic metric spaces and their level distances.
//!
//! A finite probabilistic metric space assigns to every pair of points a
//! distance distribution. Its λ-quantiles form a family of extended
//! pseudo-quasi-metrics which, read one way, is an approach system and, read
//! another way, a uniform gauge. This crate computes both directions of that
//! correspondence in exact rational arithmetic and decides the axioms on
//! either side.

pub mod carrier;
pub mod distributions;
pub mod error;
pub mod exactnum;
pub mod gen;
pub mod levels;
pub mod morphisms;
pub mod probmet;
pub mod report;
pub mod systems;
pub mod tnorms;

pub use carrier::{Carrier, PairMap};
pub use distributions::{epsilon_zero, DistributionFunction, Jump};
pub use error::{Error, Result};
pub use exactnum::{ExtNonneg, UnitRational};
pub use levels::{
    check_level_axioms, check_mixed_triangle, delta_transform, duality_check, is_fin_family, level_eval,
    phi_reconstruct, LevelFamily, LevelProfile, Piece,
};
pub use morphisms::{
    functor_composition_check, is_levelwise_nonexpansive, is_nonexpansive, morphism_equivalence_suite, MorphismReport,
    SpaceMap,
};
pub use probmet::{check_pm_axioms, is_lim_space, FinitePMSpace};
pub use report::{Axiom, AxiomReport, AxiomVerdict, Verdict, Witness};
pub use systems::{
    check_local_basis, check_uniform_basis, is_contraction, is_uniform_contraction, saturation_member,
    FiniteDistanceTable, FiniteLocalTable,
};
pub use tnorms::{check_lemma_star, verify_tnorm_laws, LambdaGrid, LemmaStar, TNorm};
