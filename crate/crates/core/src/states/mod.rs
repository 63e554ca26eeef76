//! Membership tests, constructions and numerical oracles for the regions of
//! classical versions that admit `M` perfectly distinguishable states.

mod a43;
mod pair;
mod permutohedron;
mod phase_search;
mod phases;
mod scan;
mod unistochastic;

pub use pair::{construct_fourier_set, construct_pair, lift_coarse_grained, states_to_unitary};
pub use permutohedron::{
    appendix_b_vector, flat_vector, on_permutohedron_boundary, permutohedron_contains, CoarseGraining,
};
pub use phase_search::{phase_search, PhaseSearchResult, SearchOptions, SearchStatus};
pub use phases::{pairwise_residual, PhaseAssignment};
pub use unistochastic::{
    is_unistochastic, UnistochasticCertificate, UnistochasticOutcome, UnistochasticVerdict,
};
pub use a43::{
    a43_conjecture_point, a43_edge_line_states, a43_face_point, conjecture_predicts_member, edge_annulus,
    edge_line_point, face_center_line_point, three_column_matrix, vertices, Annulus, EdgeLineStates, FacePoint,
    FaceVerdict,
};
pub use scan::{
    a43_skeleton, face_center_ts, point_seed, scan_region, star_shape_probe, ScanRecord, SkeletonKind, SkeletonPoint,
    StarProbe,
};
