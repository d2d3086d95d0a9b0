use std::fmt;

use thiserror::Error;

use crate::mesh::Axis;

/// Where an unphysical state was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Location {
    #[default]
    Unknown,
    Zone {
        patch: usize,
        index: [isize; 3],
        step: Option<u64>,
    },
    Face {
        patch: usize,
        axis: Axis,
        index: [isize; 3],
    },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Unknown => write!(f, "unknown location"),
            Location::Zone { patch, index, step } => {
                write!(f, "patch {patch} zone ({}, {}, {})", index[0], index[1], index[2])?;
                if let Some(step) = step {
                    write!(f, " at step {step}")?;
                }
                Ok(())
            }
            Location::Face { patch, axis, index } => write!(
                f,
                "patch {patch} {axis}-face ({}, {}, {})",
                index[0], index[1], index[2]
            ),
        }
    }
}

/// A pointwise state with non-positive (or non-finite) density or pressure.
///
/// Pointwise kernels return this bare value; patch loops attach a
/// [`Location`] through [`UnphysicalState::at`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnphysicalState {
    pub rho: f64,
    pub pressure: f64,
}

impl UnphysicalState {
    pub fn at(self, location: Location) -> HydroError {
        HydroError::Unphysical {
            location,
            rho: self.rho,
            pressure: self.pressure,
        }
    }
}

impl fmt::Display for UnphysicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rho = {:e}, p = {:e}", self.rho, self.pressure)
    }
}

impl std::error::Error for UnphysicalState {}

impl From<UnphysicalState> for HydroError {
    fn from(e: UnphysicalState) -> Self {
        e.at(Location::Unknown)
    }
}

#[derive(Debug, Error)]
pub enum HydroError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch in {what}: expected {expected:?}, found {found:?}")]
    Shape {
        what: &'static str,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("unphysical state at {location}: rho = {rho:e}, p = {pressure:e}")]
    Unphysical {
        location: Location,
        rho: f64,
        pressure: f64,
    },

    #[error("reproducibility check failed: {0}")]
    Reproducibility(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HydroError {
    pub fn config(msg: impl Into<String>) -> Self {
        HydroError::Config(msg.into())
    }

    /// Fills in the step number of a zone-located unphysical state.
    pub fn with_step(self, step: u64) -> Self {
        match self {
            HydroError::Unphysical {
                location: Location::Zone { patch, index, .. },
                rho,
                pressure,
            } => HydroError::Unphysical {
                location: Location::Zone {
                    patch,
                    index,
                    step: Some(step),
                },
                rho,
                pressure,
            },
            other => other,
        }
    }
}

impl HydroError {
    /// Tags a located unphysical state with the patch it came from.
    pub fn in_patch(self, id: usize) -> Self {
        match self {
            HydroError::Unphysical {
                location,
                rho,
                pressure,
            } => {
                let location = match location {
                    Location::Zone { index, step, .. } => Location::Zone {
                        patch: id,
                        index,
                        step,
                    },
                    Location::Face { axis, index, .. } => Location::Face {
                        patch: id,
                        axis,
                        index,
                    },
                    Location::Unknown => Location::Unknown,
                };
                HydroError::Unphysical {
                    location,
                    rho,
                    pressure,
                }
            }
            other => other,
        }
    }
}

pub type Result<T, E = HydroError> = std::result::Result<T, E>;
