use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curvature constant must be nonzero")]
    ZeroCurvature,
    #[error("model {model} requires {required} curvature, got c = {c}")]
    ModelCurvatureMismatch {
        model: &'static str,
        required: &'static str,
        c: f64,
    },
    #[error("tangent vectors are based at different points")]
    BaseMismatch,
    #[error("point {0:?} lies outside the chart domain")]
    OutsideChart([f64; 4]),
    #[error("integration left the chart domain at {position:?} (t = {t})")]
    LeftChart { position: [f64; 4], t: f64 },
    #[error("integration parameter {t} exceeds horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("step size {step} too large for |c| = {c_abs}")]
    StepTooLarge { step: f64, c_abs: f64 },
    #[error("degenerate curve step at sample {0}")]
    DegenerateStep(usize),
    #[error("focal point: det D = {det} at r = {r}")]
    FocalPoint { r: f64, det: f64 },
    #[error("vector is not tangent to the submanifold (normal residual {0})")]
    NotTangent(f64),
    #[error("vector is not a unit normal (residual {0})")]
    NotUnitNormal(f64),
    #[error("immersion degenerates at {0:?} (Gram determinant {1})")]
    NotImmersed([f64; 2], f64),
    #[error("normal bundle has rank {0}, operation requires rank {1}")]
    NormalRank(usize, usize),
    #[error("eigenframe continuation failed at {u:?} (alignment {alignment})")]
    FrameContinuation { u: [f64; 2], alignment: f64 },
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
