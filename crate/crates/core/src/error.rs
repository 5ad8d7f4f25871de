use std::fmt;

use thiserror::Error;

/// Which of the four reduced mutual distances vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionPair {
    /// `q1 = 0`: bodies 1 and 3 meet at the origin.
    Q1Origin,
    /// `q2 = 0`: bodies 2 and 4 meet at the origin.
    Q2Origin,
    /// `q1 = q2`: bodies 1 and 2 (and 3 and 4) meet.
    Q1EqQ2,
    /// `q1 = -q2`: bodies 1 and 4 (and 2 and 3) meet.
    Q1EqNegQ2,
}

impl fmt::Display for CollisionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CollisionPair::Q1Origin => "|q1| (bodies 1-3)",
            CollisionPair::Q2Origin => "|q2| (bodies 2-4)",
            CollisionPair::Q1EqQ2 => "|q1 - q2| (bodies 1-2, 3-4)",
            CollisionPair::Q1EqNegQ2 => "|q1 + q2| (bodies 1-4, 2-3)",
        };
        f.write_str(s)
    }
}

/// Boundary conditions of the fundamental segment `[0, pi/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// `P_x q1(0) = 0` and `P_y q2(0) = 0`.
    Rhomboidal,
    /// `q2(pi/4) = R_x q1(pi/4)`.
    Rectangular,
    /// One of the sign conditions of the admissible set.
    Sign,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Rhomboidal => f.write_str("rhomboidal condition violated"),
            BoundaryCondition::Rectangular => f.write_str("rectangular condition violated"),
            BoundaryCondition::Sign => f.write_str("sign condition violated"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("collision: {pair} vanished{}", time.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Collision {
        pair: CollisionPair,
        time: Option<f64>,
    },

    #[error("{condition} (residual {residual:.3e})")]
    Boundary {
        condition: BoundaryCondition,
        residual: f64,
    },

    #[error("close approach {distance:.3e} below floor at t = {time}")]
    CloseApproach { time: f64, distance: f64 },

    #[error("secondary collision in regularized coordinates at tau = {tau}")]
    SecondaryCollision { tau: f64 },

    #[error("integrator failure at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("all {starts} starts failed: {summary}")]
    AllStartsFailed { starts: usize, summary: String },

    #[error("continuation rung {rung} (eps = {eps}): {source}")]
    Rung {
        rung: usize,
        eps: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed orbit file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for every variant that signals bodies (nearly) meeting.
    pub fn is_collision(&self) -> bool {
        match self {
            Error::Collision { .. }
            | Error::CloseApproach { .. }
            | Error::SecondaryCollision { .. } => true,
            Error::Rung { source, .. } => source.is_collision(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
