pub mod error;
pub mod exactnum;
pub mod fans;
pub mod feaslp;
pub mod galedual;
pub mod genpos;
pub mod kneser;
pub mod pipeline;
pub mod tverberg;

pub use error::{Error, Result};
pub use exactnum::{FieldKind, Rational, Scalar};
pub use fans::{Classification, ComplexFan, Fan, RealFan, VerificationReport, VerifyMode};
pub use galedual::{GaleDualPair, PointConfig};
pub use kneser::{ColoringCertificate, SetFamily};
pub use pipeline::{PipelineOptions, PipelineResult, TwoFanMode, TwoFanResult};
pub use tverberg::{SearchConstraint, SearchOptions, TverbergTuple};
