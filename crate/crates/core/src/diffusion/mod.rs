//! Diffusion maps and diffusion bases.

mod data;
mod distance;
mod embed;
mod epsilon;
mod kernel;
mod nystrom;
mod spectral;

pub use data::{coordinate_vectors, pairwise_sq_dist, DataMatrix};
pub use distance::{diffusion_distance, diffusion_distances, DistanceMethod};
pub use embed::{
    coordinate_model, db_basis, db_embed, db_embed_model, dm_embed, dm_embed_model, DbVariant, DmVariant, Embedding,
    EmbeddingKind, Truncation,
};
pub use epsilon::{
    choose_epsilon, median_positive, resolve_epsilon, sum_affinity, EpsilonChoice, EpsilonGrid, EpsilonScan,
    EpsilonSource, ScanConfig,
};
pub use kernel::{gaussian_affinity, markov_normalize, symmetric_conjugate, KernelParams};
pub use nystrom::{nystrom_extend, NystromModel};
pub use spectral::{fix_sign, recover_biorthogonal, spectral_decompose, Eigenpairs, EtaChoice, Route, SpectralModel};
