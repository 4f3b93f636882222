use thiserror::Error;

/// Errors raised by the toolkit. Every message names the operation that failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: invalid input: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    #[error("torus_coords_of: point lies {distance:.3e} off the torus surface")]
    OffSurface { distance: f64 },

    #[error("linking_number: curves come within {distance:.3e} of each other")]
    NearSingular { distance: f64 },

    #[error("maximize_thickness: no linked seed found")]
    Infeasible,

    #[error("contact_points: expected 2 minimisers against ring {ring}, found {found}")]
    ContactCount { ring: usize, found: usize },

    #[error("master_tooth_profile: {0}")]
    InvalidProfile(String),

    #[error("offset_profile: offset {gap} self-intersects the curve")]
    OffsetTooLarge { gap: f64 },

    #[error("carve_flank: ambiguous closest point at step {step}")]
    Ambiguous { step: usize },

    #[error("carve_flank: fit residual {residual:.3e} exceeds {limit:.1e}")]
    FitFailure { residual: f64, limit: f64 },

    #[error("flank_surface: flank curves {first} and {second} cross")]
    DegenerateTooth { first: usize, second: usize },

    #[error("{op}: surface is not watertight, {} open edges (first {:?})", .edges.len(), .edges.first())]
    NonWatertight {
        op: &'static str,
        edges: Vec<(usize, usize)>,
    },

    #[error("carve_axle_section: {0}")]
    AxleImpossible(String),

    #[error("paradox_screws: screws interpenetrate at t = 0 (clearance {clearance:.3e})")]
    InvalidSpacing { clearance: f64 },

    #[error("contact_normal_report: no contact within {threshold:.1e} at phase {phase:.6}")]
    NoContact { phase: f64, threshold: f64 },

    #[error("write_stl: {0} triangles do not fit a 32-bit count")]
    TooLarge(usize),

    #[error("read_stl: {msg} at byte {offset}")]
    Parse { offset: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("design config: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Error {
    Error::InvalidInput {
        op,
        msg: msg.into(),
    }
}
