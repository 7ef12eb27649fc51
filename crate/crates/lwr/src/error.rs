use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LwrError {
    #[error("matrix is not nilpotent (|det| = {det:.3e}, |tr| = {trace:.3e})")]
    NotNilpotent { det: f64, trace: f64 },
    #[error("vector is not a unit vector (length {norm})")]
    NotUnit { norm: f64 },
    #[error("matrix is not Hermitian trace-free (residual {residual:.3e})")]
    NotEuclidean { residual: f64 },
    #[error("matrix is not a point of H3 (hermitian residual {hermitian:.3e}, det residual {det:.3e})")]
    NotHyperbolic { hermitian: f64, det: f64 },
    #[error("evaluation at a pole near z = {z}")]
    PoleCollision { z: Complex64 },
    #[error("critical point of g at z = {z}")]
    CriticalPoint { z: Complex64 },
    #[error("weight q vanishes; residue cannot be normalized")]
    ZeroWeight,
    #[error("potential is degenerate (q vanishes at every probe)")]
    Degenerate,
    #[error("step size collapsed near z = {z}")]
    PoleEncounter { z: Complex64 },
    #[error("error controller failed to meet tolerance near z = {z}")]
    ToleranceFailure { z: Complex64 },
    #[error("loop is not closed (endpoint gap {gap:.3e})")]
    NotClosed { gap: f64 },
    #[error("path violates pole clearance: distance {distance:.3e} to pole {pole}")]
    ClearanceViolation { pole: Complex64, distance: f64 },
    #[error("path segments are not contiguous (gap {gap:.3e})")]
    DisconnectedPath { gap: f64 },
    #[error("frame bundle lacks evaluation data at lambda = {lambda}")]
    MissingEvaluation { lambda: Complex64 },
    #[error("node is not interior to the grid")]
    BoundaryNode,
    #[error("dressing is not unitary at the evaluation point (residual {residual:.3e})")]
    NotUnitaryAtEvaluation { residual: f64 },
    #[error("simple factor pole alpha = {alpha} coincides with an evaluation point")]
    AlphaAtEvaluation { alpha: Complex64 },
    #[error("potential is degenerate at z = {z}: spinor line undefined")]
    DegeneratePotential { z: Complex64 },
    #[error("line is not an eigenline of the monodromy at alpha (residual {residual:.3e})")]
    NotEigenline { residual: f64 },
    #[error("triple violates its relation (residual {residual:.3e})")]
    RelationViolated { residual: f64 },
    #[error("associated-family parameter must be nonzero")]
    ZeroParameter,
    #[error("invalid parameters: {0}")]
    BadWeights(String),
    #[error("degenerate trinoid weights (delta = {delta})")]
    DegenerateWeights { delta: Complex64 },
    #[error("monodromy is not unitarizable: {0}")]
    NotUnitarizable(String),
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl LwrError {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        LwrError::Config { pointer: pointer.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, LwrError>;
