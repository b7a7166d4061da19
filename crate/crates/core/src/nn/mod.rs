//! Dense neural-network substrate shared by the classifier and the policy.

mod checkpoint;
mod loss;
mod matrix;
mod mlp;
mod optim;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use loss::{log_softmax_rows, softmax_cross_entropy, softmax_rows};
pub use matrix::Matrix;
pub use mlp::{ForwardCache, MlpGrads, MlpModel};
pub use optim::{AdamW, AdamWConfig};
