//! Clustering of web search results.
//!
//! The number of clusters comes from the hyperlinks between result pages:
//! linked pages are grouped into seed centroids, and every remaining page is
//! assigned to its most cosine-similar centroid or, when nothing is similar
//! enough, starts a centroid of its own.

pub mod clustering;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod harness;
pub mod output;
pub mod preprocess;
pub mod seeding;
pub mod sparse;

pub use clustering::{run_linked_kmeans, ClusterParams, ClusteringResult};
pub use corpus::{load_corpus, Corpus};
pub use error::{Error, Result};
