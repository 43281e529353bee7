use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("series has no invertible leading term")]
    NonInvertibleLeadingTerm,
    #[error("infinite product does not converge formally: {0}")]
    DivergentProduct(String),
    #[error("precision exhausted: resulting order {order} does not exceed floor {floor}")]
    PrecisionExhausted { order: i64, floor: i64 },
    #[error("substitution of a q-dependent value needs a declared zeta window")]
    UnboundedZetaSupport,
    #[error("family {0} has no combinatorial definition")]
    NoCombinatorialDefinition(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("root of unity outside the eighth cyclotomic field: {0}")]
    RootOfUnityOutsideCyc8(String),
    #[error("denominator cannot be expanded formally: {0}")]
    NonExpandableDenominator(String),
    #[error("requested precision cannot be reached: {0}")]
    PrecisionUnreachable(String),
    #[error("evaluation too close to a pole: {0}")]
    PoleProximity(String),
    #[error("specialization hits a pole: {0}")]
    SpecializationPole(String),
    #[error("cone is unbounded for the quadratic form: {0}")]
    UnboundedCone(String),
    #[error("zeta window too small: exponent {exponent} outside [{lo}, {hi}]")]
    WindowTooSmall { exponent: String, lo: i64, hi: i64 },
    #[error("contour passes through a pole: {0}")]
    ContourThroughPole(String),
    #[error("matrix outside the multiplier's domain: {0}")]
    DomainViolation(String),
    #[error("matrix is not unimodular: determinant {0}")]
    NotUnimodular(i64),
    #[error("finite-difference stencil meets a singularity: {0}")]
    StencilThroughSingularity(String),
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),
    #[error("unknown object: {0}")]
    UnknownObject(String),
    #[error("point is not in the upper half-plane (imaginary part {0})")]
    NotInUpperHalfPlane(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
