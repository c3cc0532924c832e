pub mod berezin;
pub mod carleson;
pub mod density;
pub mod error;
pub mod hardy;
pub mod quadrature;
pub mod radial;
pub mod spectra;
pub mod sum;

pub use error::{Error, Result};
