use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polyhedron contains a line")]
    LinealityDetected,
    #[error("vertex representation has rays; expected a polytope")]
    RaysPresent,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("no feasible point found in the box")]
    InstanceInfeasible,
    #[error("feasible set has no strictly feasible point")]
    NoInteriorPoint,
    #[error("objective matrix does not have full row rank")]
    RankDeficient,
    #[error("iteration cap of {0} cuts reached")]
    IterationCap(usize),
    #[error("inner set is not contained in outer set (excess {excess:.3e})")]
    NotNested { excess: f64 },
    #[error("eps = {0} too large: perturbed point is not a vertex")]
    EpsTooLarge(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
