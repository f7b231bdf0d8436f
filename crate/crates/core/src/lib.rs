//! Incremental graph queries over typed graphs with RETE nets, including localized
//! nets that compute complete results for a relevant subgraph without a global search,
//! localized checks of nested graph conditions and localized detection of result changes.

pub mod bench;
pub mod delta;
pub mod dot;
pub mod exec;
pub mod fixtures;
pub mod gen;
pub mod graph;
pub mod id;
pub mod incremental;
pub mod io;
pub mod marking;
pub mod modification;
pub mod morphism;
pub mod msnet;
pub mod oracle;
pub mod query;
pub mod rete;
pub mod synth;
pub mod verify;

pub use delta::{compute_result_delta, compute_sat_dependent, ResultDelta};
pub use exec::{execute_order, stripped_result_set, ExecEnv, MsConfiguration};
pub use graph::{RelevantSubgraph, TypeGraph, TypedGraph};
pub use id::Id;
pub use marking::Marking;
pub use modification::{Change, GraphModification, HostState};
pub use morphism::Match;
pub use msnet::{localize, localize_psi, LocalizeOptions, MsNet};
pub use query::{Condition, ExtendedQuery, QueryGraph};
pub use rete::{build_extended_net, build_join_tree, ReteNet};
