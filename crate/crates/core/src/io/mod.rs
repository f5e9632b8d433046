//! Dataset ingestion, graph generators, the brute-force oracle and feature
//! serialization.

pub mod edgelist;
pub mod features;
pub mod generate;
pub mod oracle;
pub mod tu;

pub use edgelist::{parse_edgelist, parse_edgelist_str, write_edgelist, EdgeListError};
pub use features::{read_features, write_features, FeatureError, FeatureRecord};
pub use generate::{generate, Family, GenError, Generated, GroundTruth, LabeledPair, PairSuite};
pub use oracle::{brute_force_isomorphic, OracleError};
pub use tu::{parse_tu_dataset, TuDataset, TuError};
