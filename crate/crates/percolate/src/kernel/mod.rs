//! Seedable randomness with bit-identical replay for a given build, no
//! matter the worker count. Everything downstream assumes two properties proved here by
//! test: a stream is a pure function of (seed, stream_id, word index), and a
//! draw consumes a fixed number of words of its caller's stream.

mod binomial;
mod brownian;
mod gaussian;
mod stream;

pub use binomial::binomial_draw;
pub use brownian::{sample_stretched_bm, VarianceSchedule};
pub use gaussian::gaussian_draw;
pub use stream::RngStream;
