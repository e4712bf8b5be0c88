//! Trajectories, fixed points, Jacobians and spectra, decay rates and basin sweeps.

pub mod decay;
pub mod eigen;
pub mod fixed_point;
pub mod jacobian;
pub mod sweep;
pub mod trajectory;
pub mod unnormalized;

pub use decay::{estimate_decay_exponent, fit_power_law, DecayFit};
pub use eigen::{
    characteristic_polynomial, classify, durand_kerner, eigenvalues_2x2, eigenvalues_2x2_exact,
    eigenvalues_4x4, Classification, Mat,
};
pub use fixed_point::{
    find_fixed_points, fixed_point_residual, CandidateWarning, FixedPointLocation,
    FixedPointReport, FixedPointSearch, Jacobian,
};
pub use jacobian::{jacobian_f, jacobian_fd, jacobian_w, jacobian_w_analytic};
pub use sweep::{barycentric_lattice, basin_sweep, SweepConfig, SweepRecord};
pub use trajectory::{
    iterate, run_to_target, ExactLimits, IterateOptions, RunOutcome, StopReason, Trajectory,
};
pub use unnormalized::{classify_unnormalized_orbit, UnnormalizedOrbit, UnnormalizedVerdict};
